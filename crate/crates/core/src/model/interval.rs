//! Finite unions of half-open integer intervals.

use std::fmt;

use super::Time;

/// A finite union of disjoint half-open intervals `[a, b)` with integer
/// endpoints.
///
/// The parts are kept sorted, non-empty and non-adjacent, so two unions
/// covering the same set of slots compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IntervalUnion {
    parts: Vec<(Time, Time)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// The single interval `[a, b)`; empty when `b <= a`.
    pub fn interval(a: Time, b: Time) -> Self {
        Self::from_parts([(a, b)])
    }

    /// Builds a normalized union from arbitrary (possibly overlapping,
    /// unsorted or empty) parts.
    pub fn from_parts<I>(parts: I) -> Self
    where
        I: IntoIterator<Item = (Time, Time)>,
    {
        let mut raw: Vec<(Time, Time)> = parts.into_iter().filter(|&(a, b)| a < b).collect();
        raw.sort_unstable();
        let mut merged: Vec<(Time, Time)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { parts: merged }
    }

    /// Union of unit slots `[t, t+1)`.
    pub fn from_slots<I>(slots: I) -> Self
    where
        I: IntoIterator<Item = Time>,
    {
        Self::from_parts(slots.into_iter().map(|t| (t, t + 1)))
    }

    pub fn parts(&self) -> &[(Time, Time)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Total measure `Σ (b_i − a_i)`.
    pub fn len(&self) -> Time {
        self.parts.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: Time) -> bool {
        // parts are sorted by start; find the last part starting at or before t
        let idx = self.parts.partition_point(|&(a, _)| a <= t);
        idx > 0 && t < self.parts[idx - 1].1
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (mut i, mut k) = (0, 0);
        let mut out = Vec::new();
        while i < self.parts.len() && k < other.parts.len() {
            let (a1, b1) = self.parts[i];
            let (a2, b2) = other.parts[k];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                k += 1;
            }
        }
        // pieces of two normalized unions never touch each other
        Self { parts: out }
    }

    /// `|self ∩ [a, b)|` without allocating.
    pub fn overlap_with(&self, a: Time, b: Time) -> Time {
        self.parts
            .iter()
            .map(|&(lo, hi)| (hi.min(b) - lo.max(a)).max(0))
            .sum()
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        Self::from_parts(self.parts.iter().chain(other.parts.iter()).copied())
    }

    /// In-place union with `[a, b)`.
    pub fn insert(&mut self, a: Time, b: Time) {
        if a < b {
            *self = Self::from_parts(self.parts.iter().copied().chain([(a, b)]));
        }
    }

    /// Iterates the unit slots `t` with `[t, t+1) ⊆ self`.
    pub fn slots(&self) -> impl Iterator<Item = Time> + '_ {
        self.parts.iter().flat_map(|&(a, b)| a..b)
    }
}

impl fmt::Display for IntervalUnion {
    /// Renders as `[a,b)∪[c,d)`; the empty union renders as `∅`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, (a, b)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, "∪")?;
            }
            write!(f, "[{a},{b})")?;
        }
        Ok(())
    }
}
