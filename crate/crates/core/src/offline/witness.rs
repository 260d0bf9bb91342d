use std::fmt;

use super::{lexicographic_minimize, move_graph_reachable, optimal_schedule, optimum_machines};
use crate::model::{contribution_set, Instance, IntervalUnion, Rational, Time};

/// An interval union whose contribution density certifies the optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub machines: usize,
    pub interval: IntervalUnion,
    /// `C(J, I*)`
    pub contribution: Time,
    /// `C(J, I*) / |I*|`
    pub density: Rational,
}

impl Witness {
    pub fn ceil_density(&self) -> i64 {
        self.density.ceil().to_integer()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I*={}; density={}/{}", self.interval, self.density.numer(), self.density.denom())
    }
}

/// Extracts the density witness of a non-empty instance: take an optimal
/// schedule, drive it to a move-free fixpoint, and collect every slot
/// reachable from a full slot in the move graph.
///
/// Returns `None` for an empty instance.
pub fn density_witness(inst: &Instance) -> Option<Witness> {
    if inst.is_empty() {
        return None;
    }
    let m = optimum_machines(inst);
    let sched = optimal_schedule(inst, m).expect("optimum is feasible");
    let sched = lexicographic_minimize(inst, &sched, m).expect("flow schedule is feasible");
    let interval = IntervalUnion::from_slots(move_graph_reachable(inst, &sched, m));
    let contribution = contribution_set(inst.jobs(), &interval);
    // m is optimal, so some slot runs at full load and the union is non-empty
    let density = Rational::new(contribution, interval.len());
    Some(Witness { machines: m, interval, contribution, density })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;

    fn inst(jobs: &[(u32, Time, Time, Time)]) -> Instance {
        Instance::new(jobs.iter().map(|&(id, r, p, d)| Job { id, r, p, d }).collect()).unwrap()
    }

    #[test]
    fn single_job() {
        let w = density_witness(&inst(&[(0, 0, 5, 5)])).unwrap();
        assert_eq!(w.interval, IntervalUnion::interval(0, 5));
        assert_eq!(w.density, Rational::from_integer(1));
    }

    #[test]
    fn three_short_jobs() {
        let w = density_witness(&inst(&[(1, 0, 2, 3), (2, 0, 2, 3), (3, 0, 2, 3)])).unwrap();
        assert_eq!(w.machines, 2);
        assert_eq!(w.interval, IntervalUnion::interval(0, 3));
        assert_eq!(w.contribution, 6);
        assert_eq!(w.density, Rational::from_integer(2));
        assert_eq!(w.to_string(), "I*=[0,3); density=2/1");
    }

    #[test]
    fn parallel_zero_laxity() {
        let k: Vec<_> = (0..4).map(|i| (i, 0, 6, 6)).collect();
        let w = density_witness(&inst(&k)).unwrap();
        assert_eq!(w.interval, IntervalUnion::interval(0, 6));
        assert_eq!(w.density, Rational::from_integer(4));
    }

    #[test]
    fn empty_instance_has_no_witness() {
        assert!(density_witness(&Instance::default()).is_none());
    }
}
