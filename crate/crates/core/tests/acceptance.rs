//! The acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line even when all pass.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use machmin::agreeable::{agreeable_machine_bound, MediumFit};
use machmin::edf::{edf_machines_for_loose, PriorityPolicy};
use machmin::engine::{busy_load_violation, run_semi_online, DoublePolicy, OnlinePolicy, PolicyError};
use machmin::general::{general_params, group_concurrency_cap, GeneralPolicy};
use machmin::harness::gen::{generate, Class, GenSpec};
use machmin::harness::mutate::mutate;
use machmin::harness::suite::{run_suite, to_csv, Suite};
use machmin::laminar::{laminar_m_prime, LaminarPolicy};
use machmin::model::{verify_schedule, Instance, IntervalUnion, Job, JobId, Rational, Time, ViolationKind};
use machmin::offline::{density_witness, optimal_schedule, optimum_machines};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn half() -> Rational {
    Rational::new(1, 2)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_small(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=6);
    let jobs = (0..n)
        .map(|id| {
            let r = rng.gen_range(0..12);
            let d = rng.gen_range(r + 1..=12);
            Job { id, r, p: rng.gen_range(1..=d - r), d }
        })
        .collect();
    Instance::new(jobs).unwrap()
}

/// `count` generated instances passing `keep`, with target hints cycling
/// through `0..targets` so the optimum varies.
fn instances(
    class: Class,
    n: usize,
    horizon: Time,
    targets: usize,
    count: usize,
    keep: impl Fn(&Instance, usize) -> bool,
) -> Vec<(Instance, usize)> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0;
    while out.len() < count {
        let mut spec = GenSpec::new(class, n, horizon, seed);
        spec.target = Some(seed as usize % targets.max(1)).filter(|&t| t > 0);
        let inst = generate(&spec).expect("generator");
        seed += 1;
        let m = optimum_machines(&inst);
        if keep(&inst, m) {
            out.push((inst, m));
        }
        assert!(seed < 100 * count as u64, "generator rarely meets the filter");
    }
    out
}

fn c1_offline_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..100 {
        let inst = random_small(&mut rng);
        let (fast, slow) = (optimum_machines(&inst), common::brute_optimum(&inst));
        check(fast == slow, || format!("instance {k}: flow {fast} vs exhaustive {slow}: {:?}", inst.jobs()))?;
    }
    Ok("100/100 exact matches".into())
}

fn c2_witness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let classes = [Class::GeneralTight, Class::Mixed, Class::Loose, Class::LaminarTight, Class::AgreeableTight];
    let mut unions = 0usize;
    for k in 0..100u64 {
        let n = rng.gen_range(5..=30);
        let horizon = 60;
        let inst = generate(&GenSpec::new(classes[k as usize % classes.len()], n, horizon, 100 + k)).unwrap();
        let m = optimum_machines(&inst);
        let w = density_witness(&inst).ok_or("no witness")?;
        let slots: BTreeSet<Time> = w.interval.slots().collect();
        let c = common::slot_contribution(inst.jobs(), &slots);
        let len = slots.len() as i64;
        check(c == w.contribution, || format!("instance {k}: contribution {} vs recount {c}", w.contribution))?;
        let density = Rational::new(c, len);
        check(density.ceil().to_integer() == m as i64, || format!("instance {k}: ceil({density}) != {m}"))?;
        check(density > Rational::from_integer(m as i64 - 1), || format!("instance {k}: density {density} <= m-1"))?;
        for _ in 0..1000 {
            let parts = rng.gen_range(1..=3);
            let iu = IntervalUnion::from_parts((0..parts).map(|_| {
                let a = rng.gen_range(0..horizon);
                (a, rng.gen_range(a + 1..=horizon))
            }));
            let slots: BTreeSet<Time> = iu.slots().collect();
            let c = common::slot_contribution(inst.jobs(), &slots);
            let ceil = (c + slots.len() as i64 - 1) / slots.len() as i64;
            check(ceil <= m as i64, || format!("instance {k}: {iu} has density {c}/{} above m = {m}", slots.len()))?;
            unions += 1;
        }
    }
    Ok(format!("100 witnesses certify m_opt; {unions} random unions within bound"))
}

fn c3_edf_loose() -> Outcome {
    let set = instances(Class::Loose, 40, 300, 6, 200, |_, _| true);
    let mut worst = 0usize;
    for (k, (inst, m)) in set.iter().enumerate() {
        let machines = edf_machines_for_loose(*m, half()).unwrap();
        check(machines == 4 * m, || format!("EDF machines {machines} for m = {m}"))?;
        let run = run_semi_online(inst, &mut PriorityPolicy::edf(machines)).map_err(|e| e.to_string())?;
        check(run.missed.is_empty(), || format!("instance {k}: missed {:?}", run.missed))?;
        check(verify_schedule(inst, &run.schedule, machines).feasible(), || format!("instance {k}: infeasible"))?;
        let opt = optimal_schedule(inst, *m).unwrap();
        if let Some(t) = busy_load_violation(&run, &opt, half(), *m) {
            return Err(format!("instance {k}: busy-load inequality fails at t = {t}"));
        }
        worst = worst.max(*m);
    }
    Ok(format!("200 loose instances (m_opt up to {worst}), 0 misses, busy-load holds at every t"))
}

fn c4_mediumfit() -> Outcome {
    let set = instances(Class::AgreeableTight, 30, 300, 4, 200, |_, _| true);
    let mut peak_ratio = Rational::from_integer(0);
    for (k, (inst, m)) in set.iter().enumerate() {
        let mut policy = MediumFit::new();
        let run = run_semi_online(inst, &mut policy).map_err(|e| e.to_string())?;
        check(run.missed.is_empty(), || format!("instance {k}: missed {:?}", run.missed))?;
        check(verify_schedule(inst, &run.schedule, run.machines).feasible(), || format!("instance {k}: infeasible"))?;
        check(common::non_preemptive(&run.schedule), || format!("instance {k}: preemptive output"))?;
        check(common::non_migratory(&run.labels), || format!("instance {k}: job changed machine"))?;
        let bound = agreeable_machine_bound(*m, half(), Rational::new(1, 4)).unwrap();
        check(bound == 64 * m, || format!("bound {bound} for m = {m}"))?;
        check(run.machines <= bound, || format!("instance {k}: {} machines > {bound}", run.machines))?;
        peak_ratio = peak_ratio.max(Rational::new(run.machines as i64, *m as i64));
    }
    Ok(format!("200 agreeable tight instances, 0 misses, non-preemptive, empirical peak {peak_ratio} x m_opt (bound 64)"))
}

fn c5_laminar() -> Outcome {
    let set = instances(Class::LaminarTight, 30, 300, 3, 200, |_, m| m <= 8);
    let mut max_m = 0;
    for (k, (inst, m)) in set.iter().enumerate() {
        let m_prime = laminar_m_prime(*m, half()).unwrap();
        let mut policy = LaminarPolicy::new(m_prime);
        let run = run_semi_online(inst, &mut policy).map_err(|e| e.to_string())?;
        check(policy.assign_failures().is_empty(), || format!("instance {k}: {}", policy.assign_failures()[0]))?;
        check(policy.bin_violation().is_none(), || format!("instance {k}: {:?}", policy.bin_violation()))?;
        // bins only grow, so checking the final bins covers every assignment
        let jobs: BTreeMap<JobId, &Job> = inst.jobs().iter().map(|j| (j.id, j)).collect();
        let mut bins: BTreeMap<(JobId, usize), IntervalUnion> = BTreeMap::new();
        for rec in policy.records() {
            if let Some((c, i)) = rec.user_of {
                let j = jobs[&rec.job];
                bins.entry((c, i)).or_insert_with(IntervalUnion::empty).insert(j.r, j.d);
            }
        }
        for ((c, i), bin) in &bins {
            let lax = jobs[c].laxity();
            check(m_prime as Time * bin.len() <= lax, || format!("instance {k}: bin {i} of job {c} holds {} > {lax}/{m_prime}", bin.len()))?;
        }
        check(run.missed.is_empty(), || format!("instance {k}: missed {:?}", run.missed))?;
        check(verify_schedule(inst, &run.schedule, run.machines).feasible(), || format!("instance {k}: infeasible"))?;
        check(common::non_migratory(&run.labels), || format!("instance {k}: job changed machine"))?;
        for (id, pre) in run.preemption_by_job(inst) {
            let lax = jobs[&id].laxity();
            check(pre <= lax, || format!("instance {k}: job {id} preempted {pre} > {lax}"))?;
        }
        max_m = max_m.max(*m);
    }
    Ok(format!("200 laminar tight instances (m_opt up to {max_m}), 0 failures, 0 misses, bins within capacity"))
}

fn c6_general() -> Outcome {
    let set = instances(Class::GeneralTight, 25, 300, 3, 100, |_, m| m <= 4);
    let mut max_peak = 0;
    for (k, (inst, m)) in set.iter().enumerate() {
        let params = general_params(*m, half(), Rational::new(1, 4)).unwrap();
        let mut policy = GeneralPolicy::new(*m, half(), Rational::new(1, 4), params).map_err(|e| e.to_string())?;
        let run = run_semi_online(inst, &mut policy).map_err(|e| e.to_string())?;
        check(policy.chain_failures().is_empty(), || format!("instance {k}: {}", policy.chain_failures()[0]))?;
        check(policy.assign_failures().is_empty(), || format!("instance {k}: {}", policy.assign_failures()[0]))?;
        check(run.missed.is_empty(), || format!("instance {k}: missed {:?}", run.missed))?;
        check(verify_schedule(inst, &run.schedule, run.machines).feasible(), || format!("instance {k}: infeasible"))?;
        let cap = group_concurrency_cap(*m, half(), Rational::new(1, 4));
        check(cap == 128 * m, || format!("cap {cap} for m = {m}"))?;
        for (t, slot) in run.labels.iter().enumerate() {
            let mut per_group: BTreeMap<usize, usize> = BTreeMap::new();
            for &(id, _) in slot {
                *per_group.entry(policy.state().group_of(id).unwrap()).or_default() += 1;
            }
            for (g, c) in per_group {
                check(c <= cap, || format!("instance {k}: group {g} runs {c} > {cap} at t = {t}"))?;
                max_peak = max_peak.max(c);
            }
        }
        let machines: usize = policy.group_peaks().iter().sum();
        check(machines == run.machines, || format!("instance {k}: {} machines vs group peaks {machines}", run.machines))?;
    }
    Ok(format!("100 general tight instances, 0 chain failures, 0 failures, 0 misses, max group peak {max_peak}"))
}

fn c7_double() -> Outcome {
    let set = instances(Class::LooseRamp, 100, 800, 0, 50, |_, _| true);
    let rho = 4;
    let mut epochs_seen = 0;
    for (k, (inst, m_final)) in set.iter().enumerate() {
        let family = Box::new(|m: usize| -> Result<Box<dyn OnlinePolicy>, PolicyError> {
            Ok(Box::new(PriorityPolicy::edf(edf_machines_for_loose(m, half())?)))
        });
        let mut policy = DoublePolicy::new(rho, family);
        let run = run_semi_online(inst, &mut policy).map_err(|e| e.to_string())?;
        check(run.missed.is_empty(), || format!("instance {k}: missed {:?}", run.missed))?;
        check(verify_schedule(inst, &run.schedule, run.machines).feasible(), || format!("instance {k}: infeasible"))?;
        check(run.machines <= 4 * rho * m_final, || format!("instance {k}: {} > 4*{rho}*{m_final}", run.machines))?;
        // epochs recomputed from prefix optima at every release date
        let releases: BTreeSet<Time> = inst.jobs().iter().map(|j| j.r).collect();
        let mut expected: Vec<(Time, usize)> = Vec::new();
        for t in releases {
            let m = optimum_machines(&inst.prefix(t));
            if expected.last().is_none_or(|&(_, last)| m > 2 * last) {
                expected.push((t, m));
            }
        }
        let got: Vec<(Time, usize)> = policy.epochs().iter().map(|e| (e.start, e.optimum)).collect();
        check(got == expected, || format!("instance {k}: epochs {got:?} vs {expected:?}"))?;
        check(got.windows(2).all(|w| w[1].1 > 2 * w[0].1), || format!("instance {k}: epochs {got:?} do not double"))?;
        let total: usize = got.iter().map(|&(_, m)| 2 * rho * m).sum();
        check(total == run.machines, || format!("instance {k}: {} machines vs {total} reserved", run.machines))?;
        epochs_seen += got.len();
    }
    Ok(format!("50 ramp instances, {epochs_seen} epochs, machines <= 4*rho*m_final on every run"))
}

fn c8_mutations() -> Outcome {
    let classes = [Class::GeneralTight, Class::Mixed, Class::LaminarTight, Class::AgreeableTight, Class::Loose];
    let mut bases = Vec::new();
    for seed in 0..40u64 {
        let inst = generate(&GenSpec::new(classes[seed as usize % classes.len()], 10, 40, 500 + seed)).unwrap();
        let m = optimum_machines(&inst);
        let sched = optimal_schedule(&inst, m).unwrap();
        let report = verify_schedule(&inst, &sched, m);
        check(report.feasible(), || format!("false positive on base {seed}: {report}"))?;
        let run = run_semi_online(&inst, &mut PriorityPolicy::edf(4 * m)).map_err(|e| e.to_string())?;
        if run.missed.is_empty() {
            let report = verify_schedule(&inst, &run.schedule, run.machines);
            check(report.feasible(), || format!("false positive on EDF run {seed}: {report}"))?;
        }
        bases.push((inst, sched, m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut summary = Vec::new();
    for kind in ViolationKind::ALL {
        let mut detected = 0;
        let mut tried = 0;
        for (inst, sched, m) in bases.iter().cycle() {
            if tried == 20 {
                break;
            }
            let Some((bad, machines)) = mutate(inst, sched, *m, kind, &mut rng) else { continue };
            tried += 1;
            if verify_schedule(inst, &bad, machines).has(kind) {
                detected += 1;
            }
        }
        check(detected == 20, || format!("{}: detected {detected}/20", kind.as_str()))?;
        summary.push(format!("{} 20/20", kind.as_str()));
    }
    Ok(format!("{}; 0 false positives on {} feasible schedules", summary.join(", "), bases.len()))
}

const DETERMINISM_SUITE: &str = "\
cell = loose edf seeds=0..6 n=20 horizon=150
cell = agreeable-tight mediumfit seeds=0..4 n=15 horizon=150
cell = laminar-tight laminar seeds=0..4 n=15 horizon=150
cell = general-tight general seeds=0..4 n=12 horizon=120
cell = general-tight laminar seeds=0..2 n=12 horizon=120
cell = loose-ramp double:edf seeds=0..3 n=40 horizon=400
cell = mixed opt seeds=0..4 n=10 horizon=40 mutate=excess-work
cell = mixed llf seeds=0..3 n=10 horizon=60
";

fn c9_determinism() -> Outcome {
    let suite = Suite::parse(DETERMINISM_SUITE).map_err(|e| e.to_string())?;
    let first = to_csv(&run_suite(&suite));
    let second = to_csv(&run_suite(&suite));
    check(first == second, || "CSV differs between reruns".into())?;
    let rows = first.lines().count() - 1;
    Ok(format!("{rows} rows, {} bytes, byte-identical across reruns", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("offline oracle equivalence", c1_offline_oracle),
        ("density witness", c2_witness),
        ("EDF on loose jobs", c3_edf_loose),
        ("MediumFit on agreeable jobs", c4_mediumfit),
        ("laminar assignment", c5_laminar),
        ("general assignment", c6_general),
        ("doubling accounting", c7_double),
        ("verifier mutations", c8_mutations),
        ("suite determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}) in {secs:.1}s", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail}) in {secs:.1}s", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
