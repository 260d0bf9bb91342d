//! Seeded instance generators, one per structural class.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{check_open_unit, Instance, Job, JobId, Rational, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    Loose,
    AgreeableTight,
    LaminarTight,
    GeneralTight,
    Mixed,
    /// α-loose jobs released in phases whose optimum keeps more than
    /// doubling, for exercising the doubling wrapper.
    LooseRamp,
}

impl Class {
    pub const ALL: [Class; 6] =
        [Class::Loose, Class::AgreeableTight, Class::LaminarTight, Class::GeneralTight, Class::Mixed, Class::LooseRamp];

    pub fn as_str(self) -> &'static str {
        match self {
            Class::Loose => "loose",
            Class::AgreeableTight => "agreeable-tight",
            Class::LaminarTight => "laminar-tight",
            Class::GeneralTight => "general-tight",
            Class::Mixed => "mixed",
            Class::LooseRamp => "loose-ramp",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Class::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown class `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub class: Class,
    pub n: usize,
    pub horizon: Time,
    pub alpha: Rational,
    /// Best-effort optimum: this many zero-laxity copies of one window are
    /// layered in. Loose classes use loose copies of roughly that density.
    pub target: Option<usize>,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(class: Class, n: usize, horizon: Time, seed: u64) -> Self {
        Self { class, n, horizon, alpha: Rational::new(1, 2), target: None, seed }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("unsatisfiable spec: {0}")]
    Unsatisfiable(String),
}

fn unsat<T>(msg: impl Into<String>) -> Result<T, GenError> {
    Err(GenError::Unsatisfiable(msg.into()))
}

/// Largest `p` with `p ≤ α·len`.
fn loose_cap(alpha: Rational, len: Time) -> Time {
    (alpha * len).floor().to_integer()
}

fn tight_p(rng: &mut ChaCha8Rng, alpha: Rational, len: Time) -> Time {
    rng.gen_range(loose_cap(alpha, len) + 1..=len)
}

fn loose_p(rng: &mut ChaCha8Rng, alpha: Rational, len: Time) -> Time {
    rng.gen_range(1..=loose_cap(alpha, len))
}

/// Shortest window admitting a loose job.
fn min_loose_len(alpha: Rational) -> Time {
    (Rational::from_integer(1) / alpha).ceil().to_integer()
}

struct Ctx {
    rng: ChaCha8Rng,
    alpha: Rational,
    horizon: Time,
    max_len: Time,
}

impl Ctx {
    fn window(&mut self, min_len: Time) -> (Time, Time) {
        let len = self.rng.gen_range(min_len..=self.max_len.max(min_len));
        let r = self.rng.gen_range(0..=self.horizon - len);
        (r, r + len)
    }
}

/// A deterministic instance of the requested class.
pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    if check_open_unit("alpha", spec.alpha).is_err() {
        return unsat(format!("alpha = {} outside (0, 1)", spec.alpha));
    }
    if spec.horizon < 1 {
        return unsat("horizon must be positive");
    }
    let loose_class = matches!(spec.class, Class::Loose | Class::Mixed | Class::LooseRamp);
    let min_len = min_loose_len(spec.alpha);
    if loose_class && spec.horizon < min_len {
        return unsat(format!("horizon {} too short for loose jobs at alpha = {}", spec.horizon, spec.alpha));
    }
    let cores = spec.target.unwrap_or(0);
    let core_jobs = match spec.class {
        Class::Loose => cores * min_len as usize,
        Class::LooseRamp => 0,
        _ => cores,
    };
    if core_jobs > spec.n {
        return unsat(format!("target {cores} needs {core_jobs} jobs but n = {}", spec.n));
    }
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        alpha: spec.alpha,
        horizon: spec.horizon,
        max_len: (spec.horizon / 8).max(2 * min_len).min(spec.horizon),
    };
    let base = spec.n - core_jobs;
    let mut windows: Vec<(Time, Time, Time)> = match spec.class {
        Class::Loose => (0..base)
            .map(|_| {
                let (r, d) = ctx.window(min_len);
                (r, loose_p(&mut ctx.rng, ctx.alpha, d - r), d)
            })
            .collect(),
        Class::GeneralTight => (0..base)
            .map(|_| {
                let (r, d) = ctx.window(1);
                (r, tight_p(&mut ctx.rng, ctx.alpha, d - r), d)
            })
            .collect(),
        Class::Mixed => (0..base)
            .map(|_| {
                let (r, d) = ctx.window(min_len);
                let p = if ctx.rng.gen_bool(0.5) { loose_p(&mut ctx.rng, ctx.alpha, d - r) } else { tight_p(&mut ctx.rng, ctx.alpha, d - r) };
                (r, p, d)
            })
            .collect(),
        Class::AgreeableTight => agreeable(&mut ctx, base),
        Class::LaminarTight => laminar(&mut ctx, base)?,
        Class::LooseRamp => ramp(&mut ctx, base)?,
    };
    if core_jobs > 0 {
        let Some(&(r, _, d)) = windows.choose(&mut ctx.rng) else {
            return unsat("target needs at least one base job");
        };
        let p = if spec.class == Class::Loose { loose_cap(ctx.alpha, d - r).max(1) } else { d - r };
        if spec.class == Class::Loose && loose_cap(ctx.alpha, d - r) < 1 {
            return unsat("core window too short for a loose job");
        }
        windows.extend(std::iter::repeat_n((r, p, d), core_jobs));
    }
    let jobs = windows.into_iter().enumerate().map(|(i, (r, p, d))| Job { id: i as JobId, r, p, d }).collect();
    Instance::new(jobs).map_err(|e| GenError::Unsatisfiable(e.to_string()))
}

/// Releases and deadlines both non-decreasing in job order.
fn agreeable(ctx: &mut Ctx, n: usize) -> Vec<(Time, Time, Time)> {
    let mut releases: Vec<Time> = (0..n).map(|_| ctx.rng.gen_range(0..ctx.horizon)).collect();
    releases.sort_unstable();
    let mut last_d = 0;
    releases
        .into_iter()
        .map(|r| {
            let len = ctx.rng.gen_range(1..=ctx.max_len);
            let d = (r + len).max(last_d).min(ctx.horizon);
            last_d = d;
            (r, tight_p(&mut ctx.rng, ctx.alpha, d - r), d)
        })
        .collect()
}

/// Maximum nesting depth of generated laminar windows; it bounds the
/// optimum of the base instance by `LAMINAR_DEPTH + 1`.
pub const LAMINAR_DEPTH: usize = 5;

/// Windows drawn one at a time inside a random existing window (or the whole
/// horizon), rejecting any draw that would cross an earlier window.
fn laminar(ctx: &mut Ctx, n: usize) -> Result<Vec<(Time, Time, Time)>, GenError> {
    let mut out: Vec<(Time, Time, Time, usize)> = Vec::with_capacity(n);
    let crosses = |out: &[(Time, Time, Time, usize)], a: Time, b: Time| {
        out.iter().any(|&(r, _, d, _)| a < d && r < b && !((r <= a && b <= d) || (a <= r && d <= b)))
    };
    // depth of the deepest window containing [a, b)
    let depth_at = |out: &[(Time, Time, Time, usize)], a: Time, b: Time| {
        out.iter().filter(|&&(r, _, d, _)| r <= a && b <= d).map(|&(_, _, _, k)| k + 1).max().unwrap_or(0)
    };
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 200 * n + 1000 {
            return unsat(format!("could not place {n} laminar windows in horizon {}", ctx.horizon));
        }
        let (lo, hi) = match out.choose(&mut ctx.rng) {
            Some(&(r, _, d, k)) if k < LAMINAR_DEPTH && ctx.rng.gen_bool(0.7) => (r, d),
            _ => (0, ctx.horizon),
        };
        let span = hi - lo;
        let len = ctx.rng.gen_range(1..=span.min(ctx.max_len));
        let a = ctx.rng.gen_range(lo..=hi - len);
        let b = a + len;
        if crosses(&out, a, b) {
            continue;
        }
        let depth = depth_at(&out, a, b);
        // a window wrapping existing ones must not deepen them past the cap
        let below = out
            .iter()
            .filter(|&&(r, _, d, _)| a <= r && d <= b && !(r == a && d == b))
            .map(|&(_, _, _, k)| k.saturating_sub(depth) + 1)
            .max()
            .unwrap_or(0);
        if depth + below > LAMINAR_DEPTH {
            continue;
        }
        let p = tight_p(&mut ctx.rng, ctx.alpha, len);
        for w in out.iter_mut().filter(|w| a <= w.0 && w.2 <= b && !(w.0 == a && w.2 == b)) {
            w.3 += 1;
        }
        out.push((a, p, b, depth));
    }
    Ok(out.into_iter().map(|(r, p, d, _)| (r, p, d)).collect())
}

/// Consecutive phases, each a burst of loose jobs sharing most of one
/// window, with phase optima growing by a factor of two to three.
fn ramp(ctx: &mut Ctx, n: usize) -> Result<Vec<(Time, Time, Time)>, GenError> {
    let alpha = ctx.alpha;
    // window lengths are multiples of α's denominator, so `⌈m/α⌉` jobs of
    // length `α·len` give a phase optimum of exactly `m`
    let den = *alpha.denom();
    let jobs_for = |m: usize| (Rational::from_integer(m as i64) / alpha).ceil().to_integer() as usize;
    let mut plan = Vec::new();
    let mut m = 1usize;
    let mut used = 0usize;
    while used + jobs_for(m) <= n {
        plan.push(m);
        used += jobs_for(m);
        m = 2 * m + 1 + usize::from(ctx.rng.gen_bool(0.5)) * m;
    }
    if plan.is_empty() {
        return unsat(format!("n = {n} too small for a single ramp phase"));
    }
    let phase = ctx.horizon / plan.len() as Time;
    let units = phase / den;
    if units < 2 {
        return unsat(format!("horizon {} too short for {} ramp phases", ctx.horizon, plan.len()));
    }
    let mut out = Vec::with_capacity(n);
    for (i, &m) in plan.iter().enumerate() {
        let start = i as Time * phase;
        let len = ctx.rng.gen_range(2..=units) * den;
        for _ in 0..jobs_for(m) {
            out.push((start, loose_cap(alpha, len), start + len));
        }
    }
    // leftover jobs: unit fillers inside the last phase
    let last = (plan.len() - 1) as Time * phase;
    let min_len = min_loose_len(alpha);
    while out.len() < n {
        let len = ctx.rng.gen_range(min_len..=phase);
        let r = ctx.rng.gen_range(last..=last + phase - len);
        out.push((r, 1, r + len));
    }
    Ok(out)
}
