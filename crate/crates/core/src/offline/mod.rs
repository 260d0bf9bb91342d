//! Exact offline machinery: flow feasibility, the optimum machine count, an
//! explicit optimal schedule, lexicographic load minimization and the
//! density witness certifying the optimum.

mod flow;
mod lexmin;
mod witness;

use std::collections::BTreeMap;

pub use flow::FlowGraph;
pub use lexmin::{lexicographic_minimize, minimize_with_stats, move_graph_reachable, LoadVector};
pub use witness::{density_witness, Witness};

use crate::model::{Instance, Schedule, Time};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OfflineError {
    #[error("machine count must be at least 1")]
    NoMachines,
    #[error("instance is infeasible on {0} machines")]
    Infeasible(usize),
    #[error("input schedule is not feasible on {0} machines")]
    InfeasibleSchedule(usize),
}

/// The job/slot flow network: source → job (cap `p_j`), job → slot (cap 1
/// inside the window), slot → sink (cap `m`). Slot nodes exist only for
/// slots covered by some window.
struct Network {
    graph: FlowGraph,
    source: usize,
    sink: usize,
    /// (job id, slot, edge) for every job → slot arc
    arcs: Vec<(crate::model::JobId, Time, flow::EdgeRef)>,
}

impl Network {
    fn build(inst: &Instance, m: usize) -> Self {
        let covered = crate::model::IntervalUnion::from_parts(inst.jobs().iter().map(|j| (j.r, j.d)));
        let slot_node: BTreeMap<Time, usize> =
            covered.slots().enumerate().map(|(i, t)| (t, 2 + inst.len() + i)).collect();
        let mut graph = FlowGraph::new(2 + inst.len() + slot_node.len());
        let (source, sink) = (0, 1);
        let mut arcs = Vec::new();
        for (k, job) in inst.jobs().iter().enumerate() {
            graph.add_edge(source, 2 + k, job.p);
            for t in job.r..job.d {
                let e = graph.add_edge(2 + k, slot_node[&t], 1);
                arcs.push((job.id, t, e));
            }
        }
        for &node in slot_node.values() {
            graph.add_edge(node, sink, m as i64);
        }
        Self { graph, source, sink, arcs }
    }

    fn solve(&mut self) -> i64 {
        self.graph.max_flow(self.source, self.sink)
    }
}

/// Whether the instance fits on `m` machines (max-flow saturates all work).
pub fn feasible_on(inst: &Instance, m: usize) -> Result<bool, OfflineError> {
    if m == 0 {
        return Err(OfflineError::NoMachines);
    }
    Ok(Network::build(inst, m).solve() == inst.total_work())
}

/// Smallest `m` with [`feasible_on`]; 0 for an empty instance.
pub fn optimum_machines(inst: &Instance) -> usize {
    if inst.is_empty() {
        return 0;
    }
    // n machines always suffice since every job fits its own window
    let (mut lo, mut hi) = (1usize, inst.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible_on(inst, mid).unwrap_or(false) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// An integral schedule on `m` machines read off a maximum flow.
pub fn optimal_schedule(inst: &Instance, m: usize) -> Result<Schedule, OfflineError> {
    if m == 0 {
        return Err(OfflineError::NoMachines);
    }
    let mut net = Network::build(inst, m);
    if net.solve() != inst.total_work() {
        return Err(OfflineError::Infeasible(m));
    }
    let mut sched = Schedule::new(inst.max_deadline());
    for &(id, t, e) in &net.arcs {
        if net.graph.flow(e) > 0 {
            sched.push(t, id);
        }
    }
    for t in 0..sched.horizon() {
        sched.slot_mut(t).sort_unstable();
    }
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_schedule, Job};

    fn inst(jobs: &[(u32, Time, Time, Time)]) -> Instance {
        Instance::new(jobs.iter().map(|&(id, r, p, d)| Job { id, r, p, d }).collect()).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        assert!(feasible_on(&inst(&[(0, 0, 5, 5)]), 1).unwrap());
        assert!(!feasible_on(&inst(&[(0, 0, 5, 5), (1, 0, 5, 5)]), 1).unwrap());
        let three = inst(&[(1, 0, 2, 3), (2, 0, 2, 3), (3, 0, 2, 3)]);
        assert!(feasible_on(&three, 2).unwrap());
        assert!(!feasible_on(&three, 1).unwrap());
        assert_eq!(feasible_on(&three, 0), Err(OfflineError::NoMachines));
    }

    #[test]
    fn optimum_examples() {
        assert_eq!(optimum_machines(&inst(&[(0, 3, 2, 9)])), 1);
        let k: Vec<_> = (0..5).map(|i| (i, 0, 7, 7)).collect();
        assert_eq!(optimum_machines(&inst(&k)), 5);
        assert_eq!(optimum_machines(&inst(&[(1, 0, 2, 3), (2, 0, 2, 3), (3, 0, 2, 3)])), 2);
        assert_eq!(optimum_machines(&Instance::default()), 0);
    }

    #[test]
    fn schedule_examples() {
        let one = inst(&[(0, 0, 5, 5)]);
        let s = optimal_schedule(&one, 1).unwrap();
        assert_eq!(s.slots(), &[vec![0], vec![0], vec![0], vec![0], vec![0]]);

        let three = inst(&[(1, 0, 2, 3), (2, 0, 2, 3), (3, 0, 2, 3)]);
        let s = optimal_schedule(&three, 2).unwrap();
        assert!(verify_schedule(&three, &s, 2).feasible());
        assert_eq!(optimal_schedule(&three, 1), Err(OfflineError::Infeasible(1)));

        let chain = inst(&[(1, 0, 1, 1), (2, 1, 1, 2)]);
        assert_eq!(optimal_schedule(&chain, 1).unwrap().slots(), &[vec![1], vec![2]]);
    }
}
