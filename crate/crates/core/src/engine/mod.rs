//! The integral-time semi-online event loop.
//!
//! At every `t` the engine first delivers the jobs released at `t` (in
//! canonical order, as one batch), then asks the policy which jobs run during
//! `[t, t+1)`, validates the answer and books the work.

mod busy;
mod double;
mod split;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use busy::{busy_load_check, busy_load_violation, is_busy};
pub use double::{DoublePolicy, Epoch, PolicyFamily};
pub use split::SplitPolicy;

use crate::model::{Instance, Job, JobId, Schedule, Time};

/// `(job, machine label)` pairs chosen for one slot.
pub type Decision = Vec<(JobId, usize)>;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("instance is not laminar: {0}")]
    NotLaminar(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("{0}")]
    Contract(String),
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("policy contract violated at t={t}: {detail}")]
    ContractViolation { t: Time, detail: String },
    #[error("policy failed at t={t}: {source}")]
    Policy { t: Time, source: PolicyError },
}

/// A semi-online scheduling policy driven by [`run_semi_online`].
///
/// Policies track remaining work themselves: every job returned by
/// [`decide`](OnlinePolicy::decide) is assumed to receive one unit.
pub trait OnlinePolicy {
    fn name(&self) -> String;

    /// Jobs released at `t`, in canonical order. Never called with an empty
    /// batch.
    fn on_release(&mut self, t: Time, batch: &[Job]) -> Result<(), PolicyError>;

    /// Jobs to run during `[t, t+1)` with distinct machine labels below
    /// [`machines_opened`](OnlinePolicy::machines_opened).
    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError>;

    fn machines_opened(&self) -> usize;

    /// Free-form counters for the run report.
    fn stats(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    /// Assignment failures and similar first-class non-fatal events.
    fn failures(&self) -> Vec<String> {
        Vec::new()
    }
}

impl<P: OnlinePolicy + ?Sized> OnlinePolicy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn on_release(&mut self, t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        (**self).on_release(t, batch)
    }
    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        (**self).decide(t)
    }
    fn machines_opened(&self) -> usize {
        (**self).machines_opened()
    }
    fn stats(&self) -> Vec<(String, String)> {
        (**self).stats()
    }
    fn failures(&self) -> Vec<String> {
        (**self).failures()
    }
}

/// Workload counters at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub t: Time,
    /// `w_A(t)`: units processed during `[t, t+1)`.
    pub work: usize,
    /// `W_A(t)`: remaining work of all unfinished jobs, released or not,
    /// before slot `t` is processed.
    pub remaining: Time,
    /// Released, unfinished jobs whose deadline is still ahead.
    pub active: usize,
    /// Minimum of `d_j − t − p_j(t)` over unfinished jobs; `None` when all
    /// jobs are done.
    pub min_laxity: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub policy: String,
    pub schedule: Schedule,
    /// Machine label of every job in every slot, as reported by the policy.
    pub labels: Vec<Vec<(JobId, usize)>>,
    pub machines: usize,
    pub missed: BTreeSet<JobId>,
    pub trace: Vec<TraceRecord>,
    pub stats: Vec<(String, String)>,
    pub failures: Vec<String>,
}

impl RunResult {
    pub fn stat(&self, key: &str) -> Option<&str> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Slots during which each job was preempted while active: the gap
    /// between release and completion minus its processing time. Only
    /// completed jobs are listed.
    pub fn preemption_by_job(&self, inst: &Instance) -> BTreeMap<JobId, Time> {
        let by_job = self.schedule.slots_by_job();
        inst.jobs()
            .iter()
            .filter(|j| !self.missed.contains(&j.id))
            .filter_map(|j| {
                let last = *by_job.get(&j.id)?.last()?;
                Some((j.id, last + 1 - j.r - j.p))
            })
            .collect()
    }
}

/// Runs `policy` on `inst` over `[0, max deadline)`.
///
/// A deadline miss does not stop the run; the job is reported in
/// [`RunResult::missed`]. A malformed decision (unknown, unreleased, finished
/// or expired job, duplicate job or label, label beyond the opened machines)
/// aborts with [`EngineError::ContractViolation`].
pub fn run_semi_online<P: OnlinePolicy + ?Sized>(inst: &Instance, policy: &mut P) -> Result<RunResult, EngineError> {
    let horizon = inst.max_deadline();
    let jobs: HashMap<JobId, &Job> = inst.jobs().iter().map(|j| (j.id, j)).collect();
    let mut remaining: HashMap<JobId, Time> = inst.jobs().iter().map(|j| (j.id, j.p)).collect();
    let mut total_remaining = inst.total_work();
    let mut schedule = Schedule::new(horizon);
    let mut labels = Vec::with_capacity(horizon as usize);
    let mut trace = Vec::with_capacity(horizon as usize + 1);
    let mut next_release = 0usize;
    let all = inst.jobs();

    let snapshot = |t: Time, remaining: &HashMap<JobId, Time>, released: usize| {
        let mut active = 0;
        let mut min_laxity: Option<Time> = None;
        for (k, j) in all.iter().enumerate() {
            let rem = remaining[&j.id];
            if rem == 0 {
                continue;
            }
            if k < released && t < j.d {
                active += 1;
            }
            let lax = j.d - t - rem;
            min_laxity = Some(min_laxity.map_or(lax, |m: Time| m.min(lax)));
        }
        (active, min_laxity)
    };

    for t in 0..horizon {
        let start = next_release;
        while next_release < all.len() && all[next_release].r == t {
            next_release += 1;
        }
        if next_release > start {
            policy
                .on_release(t, &all[start..next_release])
                .map_err(|source| EngineError::Policy { t, source })?;
        }

        let decision = policy.decide(t).map_err(|source| EngineError::Policy { t, source })?;
        let opened = policy.machines_opened();
        let violation = |detail: String| EngineError::ContractViolation { t, detail };
        let mut used_labels = BTreeSet::new();
        let mut used_jobs = BTreeSet::new();
        for &(id, label) in &decision {
            let job = jobs.get(&id).ok_or_else(|| violation(format!("unknown job {id}")))?;
            if !job.in_window(t) {
                return Err(violation(format!("job {id} outside its window [{}, {})", job.r, job.d)));
            }
            if remaining[&id] == 0 {
                return Err(violation(format!("job {id} already finished")));
            }
            if !used_jobs.insert(id) {
                return Err(violation(format!("job {id} scheduled twice")));
            }
            if label >= opened {
                return Err(violation(format!("machine {label} not opened ({opened} open)")));
            }
            if !used_labels.insert(label) {
                return Err(violation(format!("machine {label} used twice")));
            }
        }

        let (active, min_laxity) = snapshot(t, &remaining, next_release);
        trace.push(TraceRecord { t, work: decision.len(), remaining: total_remaining, active, min_laxity });
        for &(id, _) in &decision {
            *remaining.get_mut(&id).unwrap() -= 1;
            schedule.push(t, id);
        }
        total_remaining -= decision.len() as Time;
        let mut slot_labels = decision;
        slot_labels.sort_unstable_by_key(|&(_, m)| m);
        labels.push(slot_labels);
    }
    let (active, min_laxity) = snapshot(horizon, &remaining, next_release);
    trace.push(TraceRecord { t: horizon, work: 0, remaining: total_remaining, active, min_laxity });

    for t in 0..horizon {
        schedule.slot_mut(t).sort_unstable();
    }
    let missed = remaining.iter().filter(|(_, &r)| r > 0).map(|(&id, _)| id).collect();
    Ok(RunResult {
        policy: policy.name(),
        schedule,
        labels,
        machines: policy.machines_opened(),
        missed,
        trace,
        stats: policy.stats(),
        failures: policy.failures(),
    })
}

/// Runs the doubling wrapper over `family` with competitiveness `rho`.
pub fn run_double(inst: &Instance, rho: usize, family: double::PolicyFamily) -> Result<RunResult, EngineError> {
    run_semi_online(inst, &mut DoublePolicy::new(rho, family))
}

/// Hands out machine labels so that a job keeps its label across
/// consecutive slots; newcomers take the lowest free label.
#[derive(Debug, Clone, Default)]
pub struct LabelKeeper {
    previous: HashMap<JobId, usize>,
}

impl LabelKeeper {
    pub fn assign(&mut self, running: &[JobId]) -> Decision {
        let mut taken = BTreeSet::new();
        let mut out = Vec::with_capacity(running.len());
        let mut fresh = Vec::new();
        for &id in running {
            match self.previous.get(&id) {
                Some(&m) => {
                    taken.insert(m);
                    out.push((id, m));
                }
                None => fresh.push(id),
            }
        }
        let mut next = 0;
        for id in fresh {
            while taken.contains(&next) {
                next += 1;
            }
            taken.insert(next);
            out.push((id, next));
        }
        self.previous = out.iter().copied().collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Runs every active job on its own fresh machine, optionally cheating.
    struct Greedy {
        active: Vec<(Job, Time)>,
        cheat_at: Option<Time>,
    }

    impl OnlinePolicy for Greedy {
        fn name(&self) -> String {
            "greedy".into()
        }
        fn on_release(&mut self, _t: Time, batch: &[Job]) -> Result<(), PolicyError> {
            self.active.extend(batch.iter().map(|j| (*j, j.p)));
            Ok(())
        }
        fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
            if self.cheat_at == Some(t) {
                return Ok(vec![(self.active[0].0.id, 0)]);
            }
            let mut out = Vec::new();
            for (k, (j, rem)) in self.active.iter_mut().enumerate() {
                if *rem > 0 && j.in_window(t) {
                    *rem -= 1;
                    out.push((j.id, k));
                }
            }
            Ok(out)
        }
        fn machines_opened(&self) -> usize {
            self.active.len()
        }
    }

    fn inst(jobs: &[(u32, Time, Time, Time)]) -> Instance {
        Instance::new(jobs.iter().map(|&(id, r, p, d)| Job { id, r, p, d }).collect()).unwrap()
    }

    #[test]
    fn empty_instance() {
        let res = run_semi_online(&Instance::default(), &mut Greedy { active: vec![], cheat_at: None }).unwrap();
        assert_eq!(res.schedule.horizon(), 0);
        assert_eq!(res.machines, 0);
        assert!(res.missed.is_empty());
    }

    #[test]
    fn trace_conserves_work() {
        let i = inst(&[(0, 0, 2, 5), (1, 1, 3, 6)]);
        let res = run_semi_online(&i, &mut Greedy { active: vec![], cheat_at: None }).unwrap();
        assert_eq!(res.trace[0].remaining, 5);
        for w in res.trace.windows(2) {
            assert_eq!(w[1].remaining, w[0].remaining - w[0].work as Time);
        }
        assert_eq!(res.trace.last().unwrap().remaining, 0);
        assert_eq!(res.trace[1].active, 2);
    }

    #[test]
    fn out_of_window_is_a_contract_violation() {
        let i = inst(&[(0, 0, 1, 2), (1, 3, 1, 5)]);
        // after job 0 finishes, cheat by running it again at t = 4
        let err = run_semi_online(&i, &mut Greedy { active: vec![], cheat_at: Some(4) }).unwrap_err();
        assert!(matches!(err, EngineError::ContractViolation { t: 4, .. }), "{err}");
    }

    #[test]
    fn label_keeper_is_sticky() {
        let mut k = LabelKeeper::default();
        assert_eq!(k.assign(&[5, 6]), vec![(5, 0), (6, 1)]);
        assert_eq!(k.assign(&[7, 6]), vec![(6, 1), (7, 0)]);
    }
}
