//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use machmin::model::{Instance, Job, Schedule, Time};

/// Whether `jobs` fit on `m` machines, by exhaustive search over which
/// subset of unfinished jobs runs in each slot.
pub fn brute_feasible(jobs: &[Job], m: usize) -> bool {
    let horizon = jobs.iter().map(|j| j.d).max().unwrap_or(0);
    let rem: Vec<Time> = jobs.iter().map(|j| j.p).collect();
    let mut memo = HashMap::new();
    search(jobs, m, 0, horizon, rem, &mut memo)
}

fn search(
    jobs: &[Job],
    m: usize,
    t: Time,
    horizon: Time,
    rem: Vec<Time>,
    memo: &mut HashMap<(Time, Vec<Time>), bool>,
) -> bool {
    if rem.iter().all(|&r| r == 0) {
        return true;
    }
    if t >= horizon {
        return false;
    }
    // a job that can no longer fit its remaining work is lost
    if jobs.iter().zip(&rem).any(|(j, &r)| r > 0 && r > j.d - t.max(j.r)) {
        return false;
    }
    if let Some(&v) = memo.get(&(t, rem.clone())) {
        return v;
    }
    let active: Vec<usize> = (0..jobs.len()).filter(|&i| rem[i] > 0 && jobs[i].r <= t && t < jobs[i].d).collect();
    let mut ok = false;
    for mask in 0u32..(1 << active.len()) {
        if mask.count_ones() as usize > m {
            continue;
        }
        let mut next = rem.clone();
        for (k, &i) in active.iter().enumerate() {
            if mask >> k & 1 == 1 {
                next[i] -= 1;
            }
        }
        if search(jobs, m, t + 1, horizon, next, memo) {
            ok = true;
            break;
        }
    }
    memo.insert((t, rem), ok);
    ok
}

pub fn brute_optimum(inst: &Instance) -> usize {
    if inst.is_empty() {
        return 0;
    }
    (1..=inst.len()).find(|&m| brute_feasible(inst.jobs(), m)).unwrap()
}

/// `Σ_j max(0, |I ∩ I(j)| − ℓ_j)` counted slot by slot.
pub fn slot_contribution(jobs: &[Job], slots: &BTreeSet<Time>) -> Time {
    jobs.iter()
        .map(|j| {
            let inside = slots.iter().filter(|&&t| j.r <= t && t < j.d).count() as Time;
            (inside - (j.d - j.r - j.p)).max(0)
        })
        .sum()
}

/// Whether every job's slots form one contiguous block.
pub fn non_preemptive(sched: &Schedule) -> bool {
    sched.slots_by_job().values().all(|ts| ts.windows(2).all(|w| w[1] == w[0] + 1))
}

/// Whether each job keeps one machine label for its whole run.
pub fn non_migratory(labels: &[Vec<(u32, usize)>]) -> bool {
    let mut seen: HashMap<u32, usize> = HashMap::new();
    labels.iter().flatten().all(|&(id, m)| *seen.entry(id).or_insert(m) == m)
}
