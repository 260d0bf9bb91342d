//! EDF and LLF on a fixed number of machines.

use crate::engine::{Decision, LabelKeeper, OnlinePolicy, PolicyError};
use crate::model::{check_open_unit, Job, JobId, Rational, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Priority {
    EarliestDeadline,
    LeastLaxity,
}

/// Active jobs with their remaining work, on `machines` machines.
#[derive(Debug, Clone, Default)]
pub struct PriorityState {
    pub machines: usize,
    pub active: Vec<(Job, Time)>,
}

impl PriorityState {
    pub fn new(machines: usize) -> Self {
        Self { machines, active: Vec::new() }
    }

    pub fn release(&mut self, job: Job) {
        self.active.push((job, job.p));
    }

    /// Drops finished jobs and jobs whose deadline has passed.
    fn prune(&mut self, t: Time) {
        self.active.retain(|(j, rem)| *rem > 0 && t < j.d);
    }

    fn select(&self, t: Time, rule: Priority) -> Vec<JobId> {
        let mut ranked: Vec<&(Job, Time)> = self.active.iter().filter(|(j, rem)| *rem > 0 && j.in_window(t)).collect();
        match rule {
            Priority::EarliestDeadline => ranked.sort_by_key(|(j, _)| (j.d, j.canonical_key())),
            Priority::LeastLaxity => ranked.sort_by_key(|(j, rem)| (j.d - t - rem, j.canonical_key())),
        }
        ranked.into_iter().take(self.machines).map(|(j, _)| j.id).collect()
    }
}

/// The `min(m′, |active|)` active jobs with the smallest deadlines, ties by
/// canonical order.
pub fn edf_decide(state: &PriorityState, t: Time) -> Vec<JobId> {
    state.select(t, Priority::EarliestDeadline)
}

/// The `min(m′, |active|)` active jobs with the smallest current laxity
/// `d − t − p(t)`, ties by canonical order.
pub fn llf_decide(state: &PriorityState, t: Time) -> Vec<JobId> {
    state.select(t, Priority::LeastLaxity)
}

/// `⌈m / (1 − α)²⌉`: enough machines for EDF on α-loose jobs with optimum `m`.
pub fn edf_machines_for_loose(m: usize, alpha: Rational) -> Result<usize, PolicyError> {
    check_open_unit("alpha", alpha).map_err(|e| PolicyError::Param(e.to_string()))?;
    let slack = Rational::from_integer(1) - alpha;
    let need = Rational::from_integer(m as i64) / (slack * slack);
    Ok(need.ceil().to_integer() as usize)
}

pub struct PriorityPolicy {
    rule: Priority,
    state: PriorityState,
    labels: LabelKeeper,
}

impl PriorityPolicy {
    pub fn edf(machines: usize) -> Self {
        Self { rule: Priority::EarliestDeadline, state: PriorityState::new(machines), labels: LabelKeeper::default() }
    }

    pub fn llf(machines: usize) -> Self {
        Self { rule: Priority::LeastLaxity, state: PriorityState::new(machines), labels: LabelKeeper::default() }
    }
}

impl OnlinePolicy for PriorityPolicy {
    fn name(&self) -> String {
        match self.rule {
            Priority::EarliestDeadline => format!("edf({})", self.state.machines),
            Priority::LeastLaxity => format!("llf({})", self.state.machines),
        }
    }

    fn on_release(&mut self, _t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        batch.iter().for_each(|j| self.state.release(*j));
        Ok(())
    }

    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        self.state.prune(t);
        let running = self.state.select(t, self.rule);
        for (j, rem) in self.state.active.iter_mut() {
            if running.contains(&j.id) {
                *rem -= 1;
            }
        }
        Ok(self.labels.assign(&running))
    }

    fn machines_opened(&self) -> usize {
        self.state.machines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(id: JobId, r: Time, p: Time, d: Time) -> Job {
        Job { id, r, p, d }
    }

    #[test]
    fn edf_picks_smallest_deadlines() {
        let mut s = PriorityState::new(2);
        for (id, d) in [(0, 9), (1, 5), (2, 7)] {
            s.release(job(id, 0, 1, d));
        }
        let mut got = edf_decide(&s, 0);
        got.sort();
        assert_eq!(got, vec![1, 2]);
    }

    #[test]
    fn edf_is_busy_with_spare_machines() {
        let mut s = PriorityState::new(4);
        s.release(job(0, 0, 2, 5));
        assert_eq!(edf_decide(&s, 0), vec![0]);
    }

    #[test]
    fn edf_ties_follow_canonical_order() {
        let mut s = PriorityState::new(1);
        s.release(job(3, 1, 1, 10));
        s.release(job(2, 0, 1, 10));
        assert_eq!(edf_decide(&s, 1), vec![2]);
    }

    #[test]
    fn llf_examples() {
        let mut s = PriorityState::new(1);
        s.release(job(0, 0, 5, 10)); // laxity 5
        s.release(job(1, 0, 4, 4)); // laxity 0
        s.release(job(2, 0, 2, 5)); // laxity 3
        assert_eq!(llf_decide(&s, 0), vec![1]);

        let mut s = PriorityState::new(2);
        for id in [4, 1, 3] {
            s.release(job(id, 0, 2, 6));
        }
        assert_eq!(llf_decide(&s, 0), vec![1, 3]);
        assert!(llf_decide(&PriorityState::new(3), 0).is_empty());
    }

    #[test]
    fn loose_machine_counts() {
        assert_eq!(edf_machines_for_loose(1, Rational::new(1, 2)).unwrap(), 4);
        assert_eq!(edf_machines_for_loose(3, Rational::new(1, 2)).unwrap(), 12);
        assert_eq!(edf_machines_for_loose(2, Rational::new(1, 3)).unwrap(), 5);
        assert!(edf_machines_for_loose(2, Rational::new(1, 1)).is_err());
    }
}
