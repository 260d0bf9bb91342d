//! MediumFit: non-preemptive placement of α-tight agreeable jobs in the
//! middle of their windows, opening machines on demand.

use crate::edf::{edf_machines_for_loose, PriorityPolicy};
use crate::engine::{Decision, OnlinePolicy, PolicyError, SplitPolicy};
use crate::model::{check_open_unit, Job, JobId, Rational, Time};

/// Committed busy intervals per opened machine.
#[derive(Debug, Clone, Default)]
pub struct MachineTimeline {
    machines: Vec<Vec<(Time, Time, JobId)>>,
}

impl MachineTimeline {
    pub fn machines(&self) -> usize {
        self.machines.len()
    }

    pub fn committed(&self, machine: usize) -> &[(Time, Time, JobId)] {
        &self.machines[machine]
    }

    fn vacant(&self, machine: usize, a: Time, b: Time) -> bool {
        self.machines[machine].iter().all(|&(s, e, _)| e <= a || b <= s)
    }
}

/// The slots a job occupies under MediumFit: `[r + ⌊ℓ/2⌋, r + ⌊ℓ/2⌋ + p)`.
/// For odd laxity this is the exact middle shifted left by half a slot.
pub fn placement_interval(j: &Job) -> (Time, Time) {
    let start = j.r + j.laxity() / 2;
    (start, start + j.p)
}

/// Commits `j` to the lowest-indexed machine vacant throughout its placement
/// interval, opening a machine if none is. Returns the machine index.
pub fn mediumfit_place(j: &Job, timelines: &mut MachineTimeline) -> usize {
    let (a, b) = placement_interval(j);
    let machine = (0..timelines.machines.len())
        .find(|&m| timelines.vacant(m, a, b))
        .unwrap_or_else(|| {
            timelines.machines.push(Vec::new());
            timelines.machines.len() - 1
        });
    let slot = &mut timelines.machines[machine];
    let pos = slot.partition_point(|&(s, _, _)| s < a);
    slot.insert(pos, (a, b, j.id));
    machine
}

/// `⌈8m/(αβ)⌉`: the certified cap on pairwise β-agreeable α-tight jobs with no
/// larger laxity than a given job, which bounds MediumFit's machines.
pub fn agreeable_machine_bound(m: usize, alpha: Rational, beta: Rational) -> Result<usize, PolicyError> {
    check_open_unit("alpha", alpha).map_err(|e| PolicyError::Param(e.to_string()))?;
    if beta <= Rational::from_integer(0) || beta > Rational::new(1, 2) {
        return Err(PolicyError::Param(format!("beta = {beta} outside (0, 1/2]")));
    }
    let bound = Rational::from_integer(8 * m as i64) / (alpha * beta);
    Ok(bound.ceil().to_integer() as usize)
}

#[derive(Debug, Clone, Default)]
pub struct MediumFit {
    timeline: MachineTimeline,
    /// (job, machine, start) not yet finished
    pending: Vec<(Job, usize, Time)>,
    peak: usize,
}

impl MediumFit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn timeline(&self) -> &MachineTimeline {
        &self.timeline
    }
}

impl OnlinePolicy for MediumFit {
    fn name(&self) -> String {
        "mediumfit".into()
    }

    fn on_release(&mut self, _t: Time, batch: &[Job]) -> Result<(), PolicyError> {
        for j in batch {
            let machine = mediumfit_place(j, &mut self.timeline);
            self.pending.push((*j, machine, placement_interval(j).0));
        }
        Ok(())
    }

    fn decide(&mut self, t: Time) -> Result<Decision, PolicyError> {
        self.pending.retain(|&(j, _, s)| t < s + j.p);
        let out: Decision = self
            .pending
            .iter()
            .filter(|&&(_, _, s)| s <= t)
            .map(|&(j, m, _)| (j.id, m))
            .collect();
        self.peak = self.peak.max(out.len());
        Ok(out)
    }

    fn machines_opened(&self) -> usize {
        self.timeline.machines()
    }

    fn stats(&self) -> Vec<(String, String)> {
        vec![("mediumfit.peak_concurrency".into(), self.peak.to_string())]
    }
}

/// Loose jobs to EDF on `⌈m/(1−α)²⌉` machines, tight jobs to MediumFit.
pub fn agreeable_pipeline(m: usize, alpha: Rational) -> Result<SplitPolicy<PriorityPolicy, MediumFit>, PolicyError> {
    let edf = PriorityPolicy::edf(edf_machines_for_loose(m, alpha)?);
    SplitPolicy::new(alpha, edf, MediumFit::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(id: JobId, r: Time, p: Time, d: Time) -> Job {
        Job { id, r, p, d }
    }

    #[test]
    fn places_in_the_middle() {
        let mut tl = MachineTimeline::default();
        assert_eq!(mediumfit_place(&job(0, 0, 6, 10), &mut tl), 0);
        assert_eq!(tl.committed(0), &[(2, 8, 0)]);
        assert_eq!(mediumfit_place(&job(1, 0, 6, 10), &mut tl), 1);
        assert_eq!(mediumfit_place(&job(2, 20, 6, 30), &mut tl), 0);
        assert_eq!(tl.machines(), 2);
    }

    #[test]
    fn odd_laxity_rounds_down() {
        assert_eq!(placement_interval(&job(0, 0, 4, 7)), (1, 5));
        assert_eq!(placement_interval(&job(0, 3, 4, 7)), (3, 7));
    }

    #[test]
    fn bound_examples() {
        let h = Rational::new(1, 2);
        assert_eq!(agreeable_machine_bound(1, h, h).unwrap(), 32);
        assert_eq!(agreeable_machine_bound(2, h, h).unwrap(), 64);
        assert_eq!(agreeable_machine_bound(1, Rational::new(1, 4), h).unwrap(), 64);
        assert_eq!(agreeable_machine_bound(1, h, Rational::new(1, 4)).unwrap(), 64);
        assert!(agreeable_machine_bound(1, h, Rational::new(3, 4)).is_err());
    }
}
