//! Group assignment for arbitrary α-tight instances.
//!
//! Jobs are spread over `g` groups. A job joins the lowest group holding no
//! job that δ-dominates it. When every group holds one, a chain of `τ`
//! candidates is built from the per-group dominators and the job is charged
//! to the first candidate bin with room, joining that candidate's group.
//! Within a group, each slot runs exactly the ≺-minimal unfinished jobs whose
//! δ-interval covers the slot.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::engine::{Decision, LabelKeeper, OnlinePolicy, PolicyError};
use crate::laminar::{ceil_log2, doubling_step, FIXED_POINT_CAP};
use crate::model::{check_open_unit, IntervalUnion, Job, JobId, Rational, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralParams {
    pub g: usize,
    pub tau: usize,
    pub q: usize,
}

fn check_delta(delta: Rational) -> Result<(), PolicyError> {
    if delta <= Rational::from_integer(0) || delta >= Rational::new(1, 2) {
        return Err(PolicyError::Param(format!("delta = {delta} outside (0, 1/2)")));
    }
    Ok(())
}

/// Per-group concurrency cap `⌈16m/(αδ)⌉`.
pub fn group_concurrency_cap(m: usize, alpha: Rational, delta: Rational) -> usize {
    (Rational::from_integer(16 * m as i64) / (alpha * delta)).ceil().to_integer() as usize
}

/// The certified constants:
/// `q = ⌈(16/(αδ) + 2)/(1 − 2δ)⌉`,
/// `τ` the smallest integer with `τ ≥ (⌊2m/α⌋ + 1)·⌈log₂(2qmτ)⌉ + 2m`,
/// `g = τ·(⌈16m/(αδ)⌉ + ⌈m/α⌉ + 1)`.
pub fn general_params(m: usize, alpha: Rational, delta: Rational) -> Result<GeneralParams, PolicyError> {
    check_open_unit("alpha", alpha).map_err(|e| PolicyError::Param(e.to_string()))?;
    check_delta(delta)?;
    if m == 0 {
        return Err(PolicyError::Param("m must be at least 1".into()));
    }
    let one = Rational::from_integer(1);
    let q_rat = (Rational::from_integer(16) / (alpha * delta) + 2) / (one - delta * 2);
    let q = q_rat.ceil().to_integer() as u64;
    let k = doubling_step(m, alpha);
    let m64 = m as u64;
    let tau = (1..=FIXED_POINT_CAP as u64)
        .find(|&tau| tau >= k * ceil_log2(2 * q * m64 * tau) + 2 * m64)
        .ok_or_else(|| PolicyError::Param(format!("no tau below {FIXED_POINT_CAP} for m = {m}")))?;
    let per_level = group_concurrency_cap(m, alpha, delta) as u64
        + (Rational::from_integer(m as i64) / alpha).ceil().to_integer() as u64
        + 1;
    Ok(GeneralParams { g: (tau * per_level) as usize, tau: tau as usize, q: q as usize })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupChoice {
    FreeGroup(usize),
    /// One dominator per group, indexed by group.
    DominatorSet(Vec<Job>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFailure {
    pub job: Option<JobId>,
    /// Candidates picked before the pool ran dry, outermost first.
    pub picked: Vec<JobId>,
    pub wanted: usize,
    pub pool: usize,
}

impl fmt::Display for ChainFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let job = self.job.map_or_else(|| "?".to_string(), |id| id.to_string());
        write!(f, "chain failure for job {job}: picked {:?} of {} from a pool of {}", self.picked, self.wanted, self.pool)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralFailure {
    pub job: Job,
    /// `(i, candidate, laxity, |U_i ∪ I(j)|)` per level tried.
    pub bins: Vec<(usize, JobId, Time, Time)>,
}

impl fmt::Display for GeneralFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "assignment of {} failed; bins:", self.job)?;
        for (i, c, lax, len) in &self.bins {
            write!(f, " {i}:j{c}(l={lax},|U+I|={len})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Member {
    job: Job,
    group: usize,
    bins: Vec<IntervalUnion>,
    remaining: Time,
}

#[derive(Debug, Clone)]
pub struct GeneralState {
    params: GeneralParams,
    m: usize,
    delta: Rational,
    groups: Vec<Vec<JobId>>,
    jobs: HashMap<JobId, Member>,
}

impl GeneralState {
    pub fn new(params: GeneralParams, m: usize, delta: Rational) -> Result<Self, PolicyError> {
        check_delta(delta)?;
        if params.g == 0 || params.tau == 0 || params.q == 0 || m == 0 {
            return Err(PolicyError::Param(format!("degenerate parameters {params:?}, m = {m}")));
        }
        Ok(Self { params, m, delta, groups: Vec::new(), jobs: HashMap::new() })
    }

    pub fn params(&self) -> GeneralParams {
        self.params
    }

    /// Groups created so far; groups are opened lazily in index order.
    pub fn groups_opened(&self) -> usize {
        self.groups.len()
    }

    pub fn group_of(&self, id: JobId) -> Option<usize> {
        self.jobs.get(&id).map(|m| m.group)
    }

    pub fn group_members(&self, group: usize) -> impl Iterator<Item = &Job> {
        self.groups.get(group).into_iter().flatten().map(|id| &self.jobs[id].job)
    }

    /// `q·m·τ` bins per unit of laxity.
    fn bin_scale(&self) -> Time {
        (self.params.q * self.m * self.params.tau) as Time
    }

    /// Checks `q·m·τ·|I(U_i(j′))| ≤ ℓ_{j′}` for every bin.
    pub fn check_bins(&self) -> Result<(), String> {
        let scale = self.bin_scale();
        for mem in self.jobs.values() {
            for (i, bin) in mem.bins.iter().enumerate() {
                if scale * bin.len() > mem.job.laxity() {
                    return Err(format!("bin {} of {} covers {} slots", i + 1, mem.job, bin.len()));
                }
            }
        }
        Ok(())
    }

    /// Places `job` in `group` with the given bins, bypassing the assignment
    /// rule. Opens groups up to `group` as needed.
    pub fn seed(&mut self, job: Job, group: usize, bins: Vec<IntervalUnion>) {
        let mut bins = bins;
        bins.resize(self.params.tau, IntervalUnion::empty());
        while self.groups.len() <= group {
            self.groups.push(Vec::new());
        }
        self.groups[group].push(job.id);
        self.jobs.insert(job.id, Member { job, group, bins, remaining: job.p });
    }
}

/// The lowest group with no δ-dominator of `j`, opening a fresh group while
/// fewer than `g` exist. Otherwise, per group, the minimum-laxity job among
/// the ≺-minimal δ-dominators of `j`.
pub fn pick_group(state: &GeneralState, j: &Job) -> GroupChoice {
    let mut set = Vec::with_capacity(state.groups.len());
    for (g, _) in state.groups.iter().enumerate() {
        let dominators: Vec<&Job> = state.group_members(g).filter(|c| c.delta_dominates_unchecked(j, state.delta)).collect();
        if dominators.is_empty() {
            return GroupChoice::FreeGroup(g);
        }
        let minimal = dominators.iter().filter(|c| !dominators.iter().any(|o| c.dominates(o)));
        let pick = minimal.min_by(|a, b| a.laxity().cmp(&b.laxity()).then_with(|| a.canonical_cmp(b))).unwrap();
        set.push(**pick);
    }
    if state.groups.len() < state.params.g {
        return GroupChoice::FreeGroup(state.groups.len());
    }
    GroupChoice::DominatorSet(set)
}

/// Picks `c_τ, c_{τ−1}, …, c_1`, each the maximum-laxity job of `pool`
/// dominated by every earlier pick. Returns `c_1, …, c_τ`.
pub fn select_chain(pool: &[Job], tau: usize) -> Result<Vec<Job>, ChainFailure> {
    let mut picked: Vec<Job> = Vec::with_capacity(tau);
    while picked.len() < tau {
        let next = pool
            .iter()
            .filter(|c| picked.iter().all(|p| p.dominates(c)))
            .max_by(|a, b| a.laxity().cmp(&b.laxity()).then_with(|| b.canonical_cmp(a)));
        match next {
            Some(c) => picked.push(*c),
            None => {
                return Err(ChainFailure {
                    job: None,
                    picked: picked.iter().map(|c| c.id).collect(),
                    wanted: tau,
                    pool: pool.len(),
                })
            }
        }
    }
    picked.reverse();
    Ok(picked)
}

/// Charges `j` to the smallest level `i` whose bin on `c_i` still fits
/// `I(j)`, and places `j` in `c_i`'s group. Returns the group.
pub fn assign_general(state: &mut GeneralState, j: &Job, chain: &[Job]) -> Result<usize, GeneralFailure> {
    let scale = state.bin_scale();
    let mut tried = Vec::with_capacity(chain.len());
    for (k, c) in chain.iter().enumerate().take(state.params.tau) {
        let Some(mem) = state.jobs.get(&c.id) else { continue };
        let mut grown = mem.bins[k].clone();
        grown.insert(j.r, j.d);
        let len = grown.len();
        tried.push((k + 1, c.id, c.laxity(), len));
        if scale * len <= c.laxity() {
            let group = mem.group;
            state.jobs.get_mut(&c.id).unwrap().bins[k] = grown;
            state.seed(*j, group, Vec::new());
            return Ok(group);
        }
    }
    Err(GeneralFailure { job: *j, bins: tried })
}

/// Whether slot `[t, t+1)` counts as inside `I_δ(j)`: its midpoint lies in
/// the rational interval.
pub fn in_delta_window(j: &Job, delta: Rational, t: Time) -> bool {
    j.shrunk_window(delta).contains(Rational::new(2 * t + 1, 2))
}

/// The ≺-minimal unfinished jobs of `group` whose δ-interval covers slot `t`.
pub fn group_decide(state: &GeneralState, group: usize, t: Time) -> Vec<JobId> {
    let live: Vec<&Job> = state.groups[group]
        .iter()
        .map(|id| &state.jobs[id])
        .filter(|m| m.remaining > 0 && in_delta_window(&m.job, state.delta, t))
        .map(|m| &m.job)
        .collect();
    let mut out: Vec<&Job> = live.iter().copied().filter(|a| !live.iter().any(|b| a.dominates(b))).collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    out.into_iter().map(|j| j.id).collect()
}

pub struct GeneralPolicy {
    state: GeneralState,
    alpha: Rational,
    keepers: Vec<LabelKeeper>,
    global: BTreeMap<(usize, usize), usize>,
    peaks: Vec<usize>,
    chain_failures: Vec<ChainFailure>,
    failures: Vec<GeneralFailure>,
    cap_violations: Vec<String>,
    bin_violation: Option<String>,
}

impl GeneralPolicy {
    pub fn new(m: usize, alpha: Rational, delta: Rational, params: GeneralParams) -> Result<Self, PolicyError> {
        check_open_unit("alpha", alpha).map_err(|e| PolicyError::Param(e.to_string()))?;
        Ok(Self {
            state: GeneralState::new(params, m.max(1), delta)?,
            alpha,
            keepers: Vec::new(),
            global: BTreeMap::new(),
            peaks: Vec::new(),
            chain_failures: Vec::new(),
            failures: Vec::new(),
            cap_violations: Vec::new(),
            bin_violation: None,
        })
    }

    /// Parameters from the config: certified defaults with per-key overrides.
    pub fn from_config(m: usize, cfg: &crate::config::AlgoConfig) -> Result<Self, PolicyError> {
        let alpha = cfg.general_alpha();
        let delta = cfg.general_delta;
        let mut params = general_params(m.max(1), alpha, delta)?;
        if let Some(q) = cfg.general_q_override {
            params.q = q;
        }
        if let Some(tau) = cfg.general_tau_override {
            params.tau = tau;
        }
        if let Some(g) = cfg.general_g_override {
            params.g = g;
        }
        Self::new(m, alpha, delta, params)
    }

    pub fn state(&self) -> &GeneralState {
        &self.state
    }

    pub fn chain_failures(&self) -> &[ChainFailure] {
        &self.chain_failures
    }

    pub fn assign_failures(&self) -> &[GeneralFailure] {
        &self.failures
    }

    pub fn group_peaks(&self) -> &[usize] {
        &self.peaks
    }

    pub fn concurrency_cap(&self) -> usize {
        group_concurrency_cap(self.state.m, self.alpha, self.state.delta)
    }

    fn place(&mut self, j: &Job) {
        match pick_group(&self.state, j) {
            GroupChoice::FreeGroup(g) => self.state.seed(*j, g, Vec::new()),
            GroupChoice::DominatorSet(set) => match select_chain(&set, self.state.params.tau) {
                Ok(chain) => {
                    if let Err(f) = assign_general(&mut self.state, j, &chain) {
                        self.failures.push(f);
                    }
                }
                Err(mut f) => {
                    f.job = Some(j.id);
                    self.chain_failures.push(f);
                }
            },
        }
    }
}

impl OnlinePolicy for GeneralPolicy {
    fn name(&self) -> String {
        let p = self.state.params;
        format!("general(g={},tau={},q={})", p.g, p.tau, p.q)
    }

    fn on_release(&mut self, _t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        for j in batch {
            self.place(j);
            if self.bin_violation.is_none() {
                self.bin_violation = self.state.check_bins().err();
            }
        }
        Ok(())
    }

    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        let cap = self.concurrency_cap();
        let groups = self.state.groups.len();
        self.keepers.resize_with(groups, LabelKeeper::default);
        self.peaks.resize(groups, 0);
        let mut out = Vec::new();
        for g in 0..groups {
            let running = group_decide(&self.state, g, t);
            if running.len() > cap {
                self.cap_violations.push(format!("group {g} runs {} > {cap} jobs at t={t}", running.len()));
            }
            self.peaks[g] = self.peaks[g].max(running.len());
            for (id, local) in self.keepers[g].assign(&running) {
                let next = self.global.len();
                let label = *self.global.entry((g, local)).or_insert(next);
                self.state.jobs.get_mut(&id).unwrap().remaining -= 1;
                out.push((id, label));
            }
        }
        Ok(out)
    }

    fn machines_opened(&self) -> usize {
        self.global.len()
    }

    fn stats(&self) -> Vec<(String, String)> {
        let p = self.state.params;
        let peaks: Vec<String> = self.peaks.iter().map(ToString::to_string).collect();
        vec![
            ("general.g".into(), p.g.to_string()),
            ("general.tau".into(), p.tau.to_string()),
            ("general.q".into(), p.q.to_string()),
            ("general.groups_opened".into(), self.state.groups.len().to_string()),
            ("general.group_cap".into(), self.concurrency_cap().to_string()),
            ("general.max_group_peak".into(), self.peaks.iter().max().copied().unwrap_or(0).to_string()),
            ("general.group_peaks".into(), peaks.join(",")),
            ("general.chain_failures".into(), self.chain_failures.len().to_string()),
            ("general.assign_failures".into(), self.failures.len().to_string()),
            ("general.cap_violations".into(), self.cap_violations.len().to_string()),
        ]
    }

    fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.chain_failures.iter().map(ToString::to_string).collect();
        out.extend(self.failures.iter().map(ToString::to_string));
        out.extend(self.cap_violations.iter().cloned());
        out.extend(self.bin_violation.iter().cloned());
        out
    }
}
