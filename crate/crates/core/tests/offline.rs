mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use machmin::model::{verify_schedule, Instance, Job, Time};
use machmin::offline::{
    density_witness, feasible_on, lexicographic_minimize, move_graph_reachable, optimal_schedule, optimum_machines,
    LoadVector,
};

fn arb_instance(max_n: usize, horizon: Time) -> impl Strategy<Value = Instance> {
    prop::collection::vec((0..horizon - 1, 1..=horizon, 1..=horizon), 1..=max_n).prop_map(move |raw| {
        let jobs = raw
            .into_iter()
            .enumerate()
            .map(|(i, (r, len, p))| {
                let d = (r + len).min(horizon).max(r + 1);
                Job { id: i as u32, r, p: p.min(d - r), d }
            })
            .collect();
        Instance::new(jobs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn optimum_matches_exhaustive_search(inst in arb_instance(5, 10)) {
        prop_assert_eq!(optimum_machines(&inst), common::brute_optimum(&inst));
    }

    #[test]
    fn feasibility_is_monotone_and_tight(inst in arb_instance(8, 20)) {
        let m = optimum_machines(&inst);
        prop_assert!(feasible_on(&inst, m).unwrap());
        prop_assert!(m == 1 || !feasible_on(&inst, m - 1).unwrap());
        prop_assert!(feasible_on(&inst, m + 1).unwrap());
    }

    #[test]
    fn lexmin_keeps_feasibility_and_never_worsens(inst in arb_instance(8, 20)) {
        let m = optimum_machines(&inst);
        let s = optimal_schedule(&inst, m).unwrap();
        let lex = lexicographic_minimize(&inst, &s, m).unwrap();
        prop_assert!(verify_schedule(&inst, &lex, m).feasible());
        prop_assert!(LoadVector::of(&lex, m) <= LoadVector::of(&s, m));
        // at the fixpoint no full slot reaches a slot with two spare machines
        let loads = lex.loads();
        for t in move_graph_reachable(&inst, &lex, m) {
            prop_assert!(loads.get(t as usize).copied().unwrap_or(0) + 2 > m);
        }
    }

    #[test]
    fn witness_density_certifies_optimum(inst in arb_instance(10, 24)) {
        let m = optimum_machines(&inst) as i64;
        let w = density_witness(&inst).unwrap();
        let slots: BTreeSet<Time> = w.interval.slots().collect();
        let c = common::slot_contribution(inst.jobs(), &slots);
        prop_assert_eq!(c, w.contribution);
        prop_assert_eq!((c + slots.len() as i64 - 1) / slots.len() as i64, m);
    }
}

#[test]
fn empty_instance() {
    let inst = Instance::new(vec![]).unwrap();
    assert_eq!(optimum_machines(&inst), 0);
    assert!(density_witness(&inst).is_none());
}

#[test]
fn zero_laxity_stack() {
    let jobs = (0..5).map(|id| Job { id, r: 2, p: 4, d: 6 }).collect();
    let inst = Instance::new(jobs).unwrap();
    assert_eq!(optimum_machines(&inst), 5);
    let w = density_witness(&inst).unwrap();
    assert_eq!(w.to_string(), "I*=[2,6); density=5/1");
}
