//! Single-defect edits of feasible schedules, one per violation kind.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Instance, Job, Schedule, Time, ViolationKind};

/// A schedule (and machine count) carrying exactly one injected defect of
/// `kind`, or `None` when this schedule offers no place to inject it.
pub fn mutate<R: Rng>(
    inst: &Instance,
    sched: &Schedule,
    machines: usize,
    kind: ViolationKind,
    rng: &mut R,
) -> Option<(Schedule, usize)> {
    let mut out = sched.clone();
    let runs: Vec<(Time, u32)> =
        (0..sched.horizon()).flat_map(|t| sched.slot(t).iter().map(move |&id| (t, id))).collect();
    match kind {
        ViolationKind::DeadlineMiss => {
            let &(t, id) = runs.choose(rng)?;
            out.remove(t, id);
            Some((out, machines))
        }
        ViolationKind::OutsideWindow => {
            let j = inst.jobs().choose(rng)?;
            let t = if j.r > 0 && rng.gen_bool(0.5) { rng.gen_range(0..j.r) } else { j.d };
            out.push(t, j.id);
            Some((out, machines + 1))
        }
        ViolationKind::DuplicateInSlot => {
            let &(t, id) = runs.choose(rng)?;
            out.push(t, id);
            Some((out, machines + 1))
        }
        ViolationKind::OverCapacity => {
            // move one unit of a job into the busiest slot it may use
            let peak = sched.peak();
            let busiest: Vec<Time> = (0..sched.horizon()).filter(|&t| sched.load(t) == peak && peak > 0).collect();
            let mut moves = Vec::new();
            for &t in &busiest {
                for &(s, id) in &runs {
                    let j = inst.get(id)?;
                    if s != t && j.in_window(t) && !sched.runs(t, id) {
                        moves.push((s, t, id));
                    }
                }
            }
            match moves.choose(rng) {
                Some(&(from, to, id)) => {
                    out.remove(from, id);
                    out.push(to, id);
                    Some((out, machines.min(peak)))
                }
                None if peak > 0 => Some((out, peak - 1)),
                None => None,
            }
        }
        ViolationKind::ExcessWork => {
            let spare: Vec<(Time, &Job)> = inst
                .jobs()
                .iter()
                .flat_map(|j| (j.r..j.d).filter(move |&t| !sched.runs(t, j.id)).map(move |t| (t, j)))
                .collect();
            let &(t, j) = spare.choose(rng)?;
            out.push(t, j.id);
            Some((out, machines + 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_schedule;
    use crate::offline::optimal_schedule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn each_kind_is_detected() {
        let inst = Instance::new(vec![
            Job { id: 0, r: 0, p: 2, d: 4 },
            Job { id: 1, r: 1, p: 2, d: 3 },
            Job { id: 2, r: 2, p: 1, d: 6 },
        ])
        .unwrap();
        let sched = optimal_schedule(&inst, 2).unwrap();
        assert!(verify_schedule(&inst, &sched, 2).feasible());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for kind in ViolationKind::ALL {
            for _ in 0..10 {
                let (bad, m) = mutate(&inst, &sched, 2, kind, &mut rng).unwrap();
                assert!(verify_schedule(&inst, &bad, m).has(kind), "{kind:?}");
            }
        }
    }
}
