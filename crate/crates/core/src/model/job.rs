use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{IntervalUnion, ModelError, Time};

pub type JobId = u32;

/// Exact rational used for every tunable constant and every derived window
/// endpoint. No decision predicate in this crate touches floating point.
pub type Rational = Ratio<i64>;

/// A job with integral release date `r`, processing time `p` and deadline `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub r: Time,
    pub p: Time,
    pub d: Time,
}

/// Whether `p ≤ α·(d − r)` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tightness {
    Loose,
    Tight,
}

/// A half-open interval with rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    pub fn len(&self) -> Rational {
        (self.hi - self.lo).max(Rational::from_integer(0))
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn meets(&self, other: &RatInterval) -> bool {
        self.lo.max(other.lo) < self.hi.min(other.hi)
    }

    pub fn contains(&self, x: Rational) -> bool {
        self.lo <= x && x < self.hi
    }

    /// Whether the integer interval `[a, b)` meets this one.
    pub fn meets_window(&self, a: Time, b: Time) -> bool {
        self.meets(&RatInterval {
            lo: Rational::from_integer(a),
            hi: Rational::from_integer(b),
        })
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

pub(crate) fn check_open_unit(name: &'static str, x: Rational) -> Result<(), ModelError> {
    if x > Rational::from_integer(0) && x < Rational::from_integer(1) {
        Ok(())
    } else {
        Err(ModelError::ParamOutOfRange { name, value: x.to_string(), range: "(0, 1)" })
    }
}

impl Job {
    pub fn new(id: JobId, r: Time, p: Time, d: Time) -> Result<Self, ModelError> {
        let job = Self { id, r, p, d };
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.r < 0 || self.p < 1 || self.d < self.r + self.p {
            return Err(ModelError::InvalidJob(*self));
        }
        Ok(())
    }

    pub fn laxity(&self) -> Time {
        self.d - self.r - self.p
    }

    pub fn window_len(&self) -> Time {
        self.d - self.r
    }

    /// The window `I(j) = [r, d)` as an interval union.
    pub fn window(&self) -> IntervalUnion {
        IntervalUnion::interval(self.r, self.d)
    }

    pub fn in_window(&self, t: Time) -> bool {
        self.r <= t && t < self.d
    }

    /// Sort key of the canonical order: ascending release, then descending
    /// deadline, then ascending id.
    pub fn canonical_key(&self) -> (Time, std::cmp::Reverse<Time>, JobId) {
        (self.r, std::cmp::Reverse(self.d), self.id)
    }

    pub fn canonical_cmp(&self, other: &Job) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }

    /// Loose iff `p ≤ α(d − r)`, compared exactly.
    pub fn classify(&self, alpha: Rational) -> Result<Tightness, ModelError> {
        check_open_unit("alpha", alpha)?;
        Ok(if Rational::from_integer(self.p) <= alpha * self.window_len() {
            Tightness::Loose
        } else {
            Tightness::Tight
        })
    }

    pub fn is_loose(&self, alpha: Rational) -> bool {
        Rational::from_integer(self.p) <= alpha * self.window_len()
    }

    /// The window shrunk by `shrink·ℓ` on both sides, for any shrink factor
    /// in `[0, 1/2]`. Used for both β-intervals and δ-intervals.
    pub fn shrunk_window(&self, shrink: Rational) -> RatInterval {
        let cut = shrink * self.laxity();
        RatInterval {
            lo: Rational::from_integer(self.r) + cut,
            hi: Rational::from_integer(self.d) - cut,
        }
    }

    /// `I_β(j) = [r + βℓ, d − βℓ)` for `β ∈ (0, 1/2]`.
    pub fn beta_interval(&self, beta: Rational) -> Result<RatInterval, ModelError> {
        if beta <= Rational::from_integer(0) || beta > Rational::new(1, 2) {
            return Err(ModelError::ParamOutOfRange { name: "beta", value: beta.to_string(), range: "(0, 1/2]" });
        }
        Ok(self.shrunk_window(beta))
    }

    /// Minimum work `max{0, |I ∩ I(j)| − ℓ}` this job must perform inside `I`.
    pub fn contribution(&self, iu: &IntervalUnion) -> Time {
        (iu.overlap_with(self.r, self.d) - self.laxity()).max(0)
    }

    /// `I(self) ⊇ I(other)`.
    pub fn contains_window(&self, other: &Job) -> bool {
        self.r <= other.r && other.d <= self.d
    }

    /// `self ≻ other`: `self` precedes `other` canonically and its window
    /// contains `other`'s window.
    pub fn dominates(&self, other: &Job) -> bool {
        self.contains_window(other) && self.canonical_cmp(other) == Ordering::Less
    }

    /// Domination where `other`'s window also meets `I_δ(self)`.
    pub fn delta_dominates(&self, other: &Job, delta: Rational) -> Result<bool, ModelError> {
        if delta <= Rational::from_integer(0) || delta >= Rational::new(1, 2) {
            return Err(ModelError::ParamOutOfRange { name: "delta", value: delta.to_string(), range: "(0, 1/2)" });
        }
        Ok(self.delta_dominates_unchecked(other, delta))
    }

    pub(crate) fn delta_dominates_unchecked(&self, other: &Job, delta: Rational) -> bool {
        self.dominates(other) && self.shrunk_window(delta).meets_window(other.r, other.d)
    }

    /// `r_j < r_j'` implies `d_j ≤ d_j'`, in both directions.
    pub fn agreeable_with(&self, other: &Job) -> bool {
        !(self.r < other.r && self.d > other.d) && !(other.r < self.r && other.d > self.d)
    }
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j{}(r={}, p={}, d={})", self.id, self.r, self.p, self.d)
    }
}

/// `C(S, I) = Σ_{j ∈ S} C(j, I)`.
pub fn contribution_set<'a, I>(jobs: I, iu: &IntervalUnion) -> Time
where
    I: IntoIterator<Item = &'a Job>,
{
    if iu.is_empty() {
        return 0;
    }
    jobs.into_iter().map(|j| j.contribution(iu)).sum()
}

/// Two jobs are β-agreeable if they are agreeable and their β-intervals meet.
pub fn beta_agreeable(a: &Job, b: &Job, beta: Rational) -> Result<bool, ModelError> {
    Ok(a.agreeable_with(b) && a.beta_interval(beta)?.meets(&b.beta_interval(beta)?))
}
