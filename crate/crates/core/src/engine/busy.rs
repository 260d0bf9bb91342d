use super::RunResult;
use crate::model::{Rational, Schedule, Time};

/// First recorded `t` at which
/// `W_A(t) ≤ W_OPT(t) + α/(1−α)·m·(d_max − t)` fails, checked only while no
/// unfinished job has negative laxity. `W_OPT` is read off `opt`.
pub fn busy_load_violation(run: &RunResult, opt: &Schedule, alpha: Rational, m: usize) -> Option<Time> {
    let total = run.trace.first()?.remaining;
    let d_max = run.trace.last()?.t;
    let (a, b) = (*alpha.numer(), *alpha.denom());
    let mut opt_done: Time = 0;
    for rec in &run.trace {
        if matches!(rec.min_laxity, Some(l) if l < 0) {
            break;
        }
        let w_opt = total - opt_done;
        // multiply through by (1 − α)·b = b − a to stay integral
        let lhs = (b - a) * rec.remaining;
        let rhs = (b - a) * w_opt + a * m as Time * (d_max - rec.t);
        if lhs > rhs {
            return Some(rec.t);
        }
        opt_done += opt.load(rec.t) as Time;
    }
    None
}

pub fn busy_load_check(run: &RunResult, opt: &Schedule, alpha: Rational, m: usize) -> bool {
    busy_load_violation(run, opt, alpha, m).is_none()
}

/// Whether fewer than `machines` jobs ran only when exactly those were all
/// the active jobs.
pub fn is_busy(run: &RunResult, machines: usize) -> bool {
    run.trace.iter().all(|r| r.work >= machines || r.work == r.active)
}
