//! Machine assignment for α-tight laminar instances.
//!
//! Every job is pinned to one machine at its release and never moves. A job
//! lands either on a machine that is surely free at its release, or as a user
//! of one of its candidates: the per-machine ≺-minimal jobs whose windows
//! contain the release date. Each assigned job splits its laxity into `m′`
//! bins; its `i`-th bin holds the windows of its `i`-th users and may cover at
//! most `ℓ/m′` slots. Machines run EDF independently.

use std::collections::HashMap;
use std::fmt;

use crate::engine::{Decision, OnlinePolicy, PolicyError};
use crate::model::{check_open_unit, IntervalUnion, Job, JobId, Rational, Time};

/// Largest machine count the fixed-point searches will consider.
pub const FIXED_POINT_CAP: usize = 1 << 16;

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub(crate) fn ceil_log2(x: u64) -> u64 {
    debug_assert!(x >= 1);
    u64::from(64 - (x - 1).leading_zeros()) * u64::from(x > 1)
}

/// Number of doubling steps `⌊2m/α⌋ + 1` after which a blocking set's
/// covered length at least doubles.
pub(crate) fn doubling_step(m: usize, alpha: Rational) -> u64 {
    (Rational::from_integer(2 * m as i64) / alpha).floor().to_integer() as u64 + 1
}

/// Smallest `m′` with `m′ ≥ (⌊2m/α⌋ + 1)·⌈log₂(2m′)⌉ + 2m`.
pub fn laminar_m_prime(m: usize, alpha: Rational) -> Result<usize, PolicyError> {
    check_open_unit("alpha", alpha).map_err(|e| PolicyError::Param(e.to_string()))?;
    if m == 0 {
        return Err(PolicyError::Param("m must be at least 1".into()));
    }
    let k = doubling_step(m, alpha);
    (1..=FIXED_POINT_CAP as u64)
        .find(|&mp| mp >= k * ceil_log2(2 * mp) + 2 * m as u64)
        .map(|mp| mp as usize)
        .ok_or_else(|| PolicyError::Param(format!("no m' below {FIXED_POINT_CAP} for m = {m}, alpha = {alpha}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidates {
    SurelyFree(usize),
    /// `c_1 ≺ c_2 ≺ … ≺ c_{m′}`, one per machine.
    Chain(Vec<JobId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentRecord {
    pub job: JobId,
    pub machine: usize,
    /// `(candidate, i)` when `j` became the `i`-th user (1-based) of a
    /// candidate; `None` on a surely free machine.
    pub user_of: Option<(JobId, usize)>,
}

/// An assignment that found no bin. Carries the bin state it saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignFailure {
    pub job: Job,
    /// `(i, candidate, laxity, |U_i(c_i) ∪ I(j)|)` for every level tried.
    pub bins: Vec<(usize, JobId, Time, Time)>,
    pub machines: usize,
}

impl fmt::Display for AssignFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "assignment of {} failed on {} machines; bins:", self.job, self.machines)?;
        for (i, c, lax, len) in &self.bins {
            write!(f, " {i}:j{c}(l={lax},|U+I|={len})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Assigned {
    job: Job,
    machine: usize,
    /// `bins[i - 1]` = `I(U_i(job))`
    bins: Vec<IntervalUnion>,
    remaining: Time,
}

#[derive(Debug, Clone)]
pub struct LaminarState {
    m_prime: usize,
    per_machine: Vec<Vec<JobId>>,
    jobs: HashMap<JobId, Assigned>,
}

impl LaminarState {
    pub fn new(m_prime: usize) -> Self {
        Self { m_prime, per_machine: vec![Vec::new(); m_prime], jobs: HashMap::new() }
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn assigned_count(&self, machine: usize) -> usize {
        self.per_machine[machine].len()
    }

    pub fn machine_of(&self, id: JobId) -> Option<usize> {
        self.jobs.get(&id).map(|a| a.machine)
    }

    /// `|I(U_i(id))|` for `i = 1..=m′`.
    pub fn bin_lengths(&self, id: JobId) -> Vec<Time> {
        self.jobs.get(&id).map(|a| a.bins.iter().map(IntervalUnion::len).collect()).unwrap_or_default()
    }

    /// `Σ_i |I(U_i(id))|`, the most `id` can be preempted by its users.
    pub fn bin_usage(&self, id: JobId) -> Time {
        self.bin_lengths(id).iter().sum()
    }

    /// Checks `m′·|I(U_i(j′))| ≤ ℓ_{j′}` for every bin.
    pub fn check_bins(&self) -> Result<(), String> {
        for a in self.jobs.values() {
            for (i, bin) in a.bins.iter().enumerate() {
                if self.m_prime as Time * bin.len() > a.job.laxity() {
                    return Err(format!(
                        "bin {} of {} covers {} > {}/{}",
                        i + 1,
                        a.job,
                        bin.len(),
                        a.job.laxity(),
                        self.m_prime
                    ));
                }
            }
        }
        Ok(())
    }

    /// Installs `job` on `machine` with the given users' windows per bin,
    /// bypassing the assignment rule. Meant for constructing states in tests
    /// and diagnostics.
    pub fn seed(&mut self, job: Job, machine: usize, bins: Vec<IntervalUnion>) {
        let mut bins = bins;
        bins.resize(self.m_prime, IntervalUnion::empty());
        self.per_machine[machine].push(job.id);
        self.jobs.insert(job.id, Assigned { job, machine, bins, remaining: job.p });
    }

    fn install(&mut self, job: Job, machine: usize) {
        self.seed(job, machine, Vec::new());
    }
}

/// A surely free machine (lowest index) if one exists, otherwise the chain
/// of per-machine ≺-minimal jobs whose windows contain `r_j`.
pub fn find_candidates(state: &LaminarState, j: &Job) -> Result<Candidates, PolicyError> {
    let mut chain: Vec<&Job> = Vec::with_capacity(state.m_prime);
    for (machine, ids) in state.per_machine.iter().enumerate() {
        let covering = ids.iter().map(|id| &state.jobs[id].job).filter(|c| c.in_window(j.r));
        // smallest window; identical windows resolved by smallest index
        let minimal = covering.min_by_key(|c| (c.window_len(), c.canonical_key()));
        match minimal {
            None => return Ok(Candidates::SurelyFree(machine)),
            Some(c) => chain.push(c),
        }
    }
    // c_1 is the innermost window; among identical windows the later job in
    // canonical order is the dominated one
    chain.sort_by(|a, b| a.window_len().cmp(&b.window_len()).then_with(|| b.canonical_cmp(a)));
    for pair in chain.windows(2) {
        if !pair[1].dominates(pair[0]) {
            return Err(PolicyError::NotLaminar(format!("candidates {} and {} are not nested", pair[0], pair[1])));
        }
    }
    if let Some(c) = chain.first() {
        if !c.dominates(j) {
            return Err(PolicyError::NotLaminar(format!("{j} is not nested in candidate {c}")));
        }
    }
    Ok(Candidates::Chain(chain.into_iter().map(|c| c.id).collect()))
}

/// Assigns `j`: to a surely free machine if there is one, otherwise as the
/// `i`-th user of `c_i(j)` for the smallest `i` with
/// `|I(U_i(c_i(j))) ∪ I(j)| ≤ ℓ_{c_i(j)}/m′`.
pub fn assign_laminar(state: &mut LaminarState, j: &Job) -> Result<Result<AssignmentRecord, AssignFailure>, PolicyError> {
    let chain = match find_candidates(state, j)? {
        Candidates::SurelyFree(machine) => {
            state.install(*j, machine);
            return Ok(Ok(AssignmentRecord { job: j.id, machine, user_of: None }));
        }
        Candidates::Chain(chain) => chain,
    };
    let m_prime = state.m_prime as Time;
    let mut tried = Vec::with_capacity(chain.len());
    for (k, cand) in chain.iter().enumerate() {
        let c = &state.jobs[cand];
        let mut grown = c.bins[k].clone();
        grown.insert(j.r, j.d);
        let len = grown.len();
        tried.push((k + 1, *cand, c.job.laxity(), len));
        if m_prime * len <= c.job.laxity() {
            let machine = c.machine;
            state.jobs.get_mut(cand).unwrap().bins[k] = grown;
            state.install(*j, machine);
            return Ok(Ok(AssignmentRecord { job: j.id, machine, user_of: Some((*cand, k + 1)) }));
        }
    }
    Ok(Err(AssignFailure { job: *j, bins: tried, machines: state.m_prime }))
}

/// Per machine, the unfinished assigned job with the smallest deadline (ties
/// canonical) whose window contains `t`.
pub fn laminar_decide(state: &LaminarState, t: Time) -> Decision {
    let mut out = Vec::new();
    for (machine, ids) in state.per_machine.iter().enumerate() {
        let pick = ids
            .iter()
            .map(|id| &state.jobs[id])
            .filter(|a| a.remaining > 0 && a.job.in_window(t))
            .min_by_key(|a| (a.job.d, a.job.canonical_key()));
        if let Some(a) = pick {
            out.push((a.job.id, machine));
        }
    }
    out
}

pub struct LaminarPolicy {
    state: LaminarState,
    records: Vec<AssignmentRecord>,
    failures: Vec<AssignFailure>,
    bin_violation: Option<String>,
}

impl LaminarPolicy {
    pub fn new(m_prime: usize) -> Self {
        Self { state: LaminarState::new(m_prime), records: Vec::new(), failures: Vec::new(), bin_violation: None }
    }

    /// `m′` from the config: the override if set, otherwise the fixed point
    /// scaled by the multiplier.
    pub fn machines_for(m: usize, cfg: &crate::config::AlgoConfig) -> Result<usize, PolicyError> {
        if let Some(mp) = cfg.laminar_m_prime_override {
            return Ok(mp.max(1));
        }
        let base = laminar_m_prime(m.max(1), cfg.laminar_alpha())?;
        let scaled = (cfg.laminar_m_prime_multiplier * Rational::from_integer(base as i64)).ceil().to_integer();
        Ok(scaled.max(1) as usize)
    }

    pub fn state(&self) -> &LaminarState {
        &self.state
    }

    pub fn records(&self) -> &[AssignmentRecord] {
        &self.records
    }

    pub fn assign_failures(&self) -> &[AssignFailure] {
        &self.failures
    }

    /// First bin-capacity violation seen after any assignment.
    pub fn bin_violation(&self) -> Option<&str> {
        self.bin_violation.as_deref()
    }
}

impl OnlinePolicy for LaminarPolicy {
    fn name(&self) -> String {
        format!("laminar(m'={})", self.state.m_prime)
    }

    fn on_release(&mut self, _t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        for j in batch {
            match assign_laminar(&mut self.state, j)? {
                Ok(rec) => self.records.push(rec),
                Err(fail) => self.failures.push(fail),
            }
            if self.bin_violation.is_none() {
                self.bin_violation = self.state.check_bins().err();
            }
        }
        Ok(())
    }

    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        let out = laminar_decide(&self.state, t);
        for &(id, _) in &out {
            self.state.jobs.get_mut(&id).unwrap().remaining -= 1;
        }
        Ok(out)
    }

    fn machines_opened(&self) -> usize {
        self.state.m_prime
    }

    fn stats(&self) -> Vec<(String, String)> {
        let counts: Vec<String> = (0..self.state.m_prime).map(|m| self.state.assigned_count(m).to_string()).collect();
        vec![
            ("laminar.m_prime".into(), self.state.m_prime.to_string()),
            ("laminar.assign_failures".into(), self.failures.len().to_string()),
            ("laminar.per_machine".into(), counts.join(",")),
        ]
    }

    fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.failures.iter().map(ToString::to_string).collect();
        out.extend(self.bin_violation.iter().cloned());
        out
    }
}
