//! Path moves on the slot move graph.
//!
//! Vertex `v_t` is the slot `[t, t+1)` with load `φ_t`. There is an arc
//! `v_i → v_k` iff `φ_i ≥ φ_k` and some job runs at `i`, does not run at `k`,
//! and has both slots inside its window. Moving one unit along a path from a
//! full slot (`φ = m`) to a slot with `φ ≤ m − 2` strictly decreases the load
//! vector `χ = (χ_m, …, χ_0)` lexicographically.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};

use super::OfflineError;
use crate::model::{verify_schedule, Instance, Job, JobId, Schedule, Time};

/// Slot-load histogram `χ` plus the per-slot loads `φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadVector {
    /// `chi[h]` = number of slots with exactly `h` busy machines, `h = 0..=m`.
    pub chi: Vec<usize>,
    pub phi: Vec<usize>,
}

impl LoadVector {
    pub fn of(sched: &Schedule, m: usize) -> Self {
        let phi = sched.loads();
        let mut chi = vec![0; m + 1];
        for &load in &phi {
            chi[load.min(m)] += 1;
        }
        Self { chi, phi }
    }

    pub fn m(&self) -> usize {
        self.chi.len() - 1
    }
}

impl PartialOrd for LoadVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LoadVector {
    /// Compares `(χ_m, χ_{m−1}, …, χ_0)` lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.chi.iter().rev().cmp(other.chi.iter().rev())
    }
}

/// BFS parents `(previous slot, moved job)` and distances.
type Search = (Vec<Option<(Time, JobId)>>, Vec<Option<usize>>);

struct MoveGraph<'a> {
    jobs: HashMap<JobId, &'a Job>,
    sched: &'a Schedule,
    phi: Vec<usize>,
}

impl<'a> MoveGraph<'a> {
    fn new(inst: &'a Instance, sched: &'a Schedule) -> Self {
        Self {
            jobs: inst.jobs().iter().map(|j| (j.id, j)).collect(),
            phi: sched.loads(),
            sched,
        }
    }

    /// Out-neighbours of slot `i` in ascending slot order, each with the
    /// smallest job id witnessing the arc.
    fn neighbours(&self, i: Time) -> BTreeMap<Time, JobId> {
        let mut out = BTreeMap::new();
        let phi_i = self.phi[i as usize];
        for &id in self.sched.slot(i) {
            let job = self.jobs[&id];
            for k in job.r..job.d.min(self.sched.horizon()) {
                if k != i && self.phi[k as usize] <= phi_i && !self.sched.runs(k, id) {
                    out.entry(k).and_modify(|w: &mut JobId| *w = (*w).min(id)).or_insert(id);
                }
            }
        }
        out
    }

    /// Breadth-first search from every slot at full load `m`. Returns the
    /// parent pointers `(predecessor, witness job)` of every reached slot and
    /// the BFS distance.
    fn search(&self, m: usize) -> Search {
        let n = self.phi.len();
        let mut parent = vec![None; n];
        let mut dist = vec![None; n];
        let mut queue = VecDeque::new();
        for (t, &load) in self.phi.iter().enumerate() {
            if load == m && m > 0 {
                dist[t] = Some(0);
                queue.push_back(t as Time);
            }
        }
        while let Some(i) = queue.pop_front() {
            let di = dist[i as usize].unwrap();
            for (k, witness) in self.neighbours(i) {
                if dist[k as usize].is_none() {
                    dist[k as usize] = Some(di + 1);
                    parent[k as usize] = Some((i, witness));
                    queue.push_back(k);
                }
            }
        }
        (parent, dist)
    }
}

/// Slots reachable from the full slots (`φ = m`) in the move graph of `sched`,
/// ascending. Includes the full slots themselves.
pub fn move_graph_reachable(inst: &Instance, sched: &Schedule, m: usize) -> Vec<Time> {
    let graph = MoveGraph::new(inst, sched);
    let (_, dist) = graph.search(m);
    dist.iter().enumerate().filter(|(_, d)| d.is_some()).map(|(t, _)| t as Time).collect()
}

/// Applies one path move if the move graph has a path from a full slot to a
/// slot with load at most `m − 2`. Returns whether a move happened.
fn improve_once(inst: &Instance, sched: &mut Schedule, m: usize) -> bool {
    if m < 2 {
        return false;
    }
    let path = {
        let graph = MoveGraph::new(inst, sched);
        let (parent, dist) = graph.search(m);
        // nearest low-load slot, ties by smallest index
        let target = (0..graph.phi.len())
            .filter(|&t| graph.phi[t] + 2 <= m)
            .filter_map(|t| dist[t].map(|d| (d, t)))
            .min();
        let Some((_, target)) = target else {
            return false;
        };
        let mut path = Vec::new();
        let mut cur = target as Time;
        while let Some((prev, job)) = parent[cur as usize] {
            path.push((prev, cur, job));
            cur = prev;
        }
        path
    };
    // Witnesses were taken against the unmodified schedule and the path is
    // simple, so no job lands twice in one slot.
    for (from, to, job) in path {
        let removed = sched.remove(from, job);
        debug_assert!(removed);
        sched.push(to, job);
    }
    true
}

/// Repeats path moves until none exists. Returns the fixpoint schedule and the
/// number of moves applied.
pub fn minimize_with_stats(inst: &Instance, sched: &Schedule, m: usize) -> Result<(Schedule, usize), OfflineError> {
    if m == 0 {
        return Err(OfflineError::NoMachines);
    }
    let mut sched = sched.clone();
    let horizon = sched.horizon().max(inst.max_deadline());
    if horizon > 0 {
        sched.slot_mut(horizon - 1);
    }
    if !verify_schedule(inst, &sched, m).feasible() {
        return Err(OfflineError::InfeasibleSchedule(m));
    }
    let mut moves = 0;
    while improve_once(inst, &mut sched, m) {
        moves += 1;
    }
    for t in 0..sched.horizon() {
        sched.slot_mut(t).sort_unstable();
    }
    Ok((sched, moves))
}

/// A feasible schedule on `m` machines whose move graph has no path from a
/// full slot to a slot with load `≤ m − 2`.
pub fn lexicographic_minimize(inst: &Instance, sched: &Schedule, m: usize) -> Result<Schedule, OfflineError> {
    minimize_with_stats(inst, sched, m).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::optimal_schedule;

    fn inst(jobs: &[(u32, Time, Time, Time)]) -> Instance {
        Instance::new(jobs.iter().map(|&(id, r, p, d)| Job { id, r, p, d }).collect()).unwrap()
    }

    #[test]
    fn load_vector_order() {
        let a = LoadVector::of(&Schedule::from_slots(vec![vec![1, 2], vec![]]), 2);
        let b = LoadVector::of(&Schedule::from_slots(vec![vec![1], vec![2]]), 2);
        assert_eq!(a.chi, vec![1, 0, 1]);
        assert_eq!(b.chi, vec![0, 2, 0]);
        assert!(b < a);
    }

    #[test]
    fn spreads_packed_pair() {
        let i = inst(&[(0, 0, 1, 2), (1, 0, 1, 2)]);
        let packed = Schedule::from_slots(vec![vec![0, 1], vec![]]);
        assert_eq!(LoadVector::of(&packed, 2).chi[2], 1);
        let (out, moves) = minimize_with_stats(&i, &packed, 2).unwrap();
        assert_eq!(moves, 1);
        assert_eq!(LoadVector::of(&out, 2).chi[2], 0);
        assert!(verify_schedule(&i, &out, 2).feasible());
    }

    #[test]
    fn fixpoint_is_unchanged() {
        let i = inst(&[(0, 0, 1, 2), (1, 0, 1, 2)]);
        let spread = Schedule::from_slots(vec![vec![0], vec![1]]);
        let (out, moves) = minimize_with_stats(&i, &spread, 2).unwrap();
        assert_eq!(moves, 0);
        assert_eq!(out, spread);
    }

    #[test]
    fn rejects_infeasible_input() {
        let i = inst(&[(0, 0, 2, 2)]);
        let bad = Schedule::from_slots(vec![vec![0], vec![]]);
        assert_eq!(lexicographic_minimize(&i, &bad, 1), Err(OfflineError::InfeasibleSchedule(1)));
    }

    #[test]
    fn multi_hop_move() {
        // slot 0 full with jobs confined near it; the only relief is a chain
        let i = inst(&[(0, 0, 1, 2), (1, 0, 1, 1), (2, 0, 1, 1), (3, 1, 1, 3), (4, 1, 2, 3)]);
        let m = 3;
        let s = optimal_schedule(&i, m).unwrap();
        let out = lexicographic_minimize(&i, &s, m).unwrap();
        assert!(verify_schedule(&i, &out, m).feasible());
        assert!(LoadVector::of(&out, m) <= LoadVector::of(&s, m));
    }
}
