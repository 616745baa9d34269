//! Exact-rational interval unions.
//!
//! All endpoints of the truncated constructions are rationals whenever the
//! dilation parameter is rational, so the float path can be validated against
//! exact arithmetic. This mirrors the subset of [`crate::interval_sets`]
//! needed for that cross-check; there is no tolerance, merging is exact.

use num_rational::Ratio;

use crate::interval_sets::{Interval, IntervalSet, DEFAULT_MERGE_TOL};

pub type Rational = Ratio<i128>;

/// Sorted disjoint closed intervals with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalIntervalSet {
    parts: Vec<(Rational, Rational)>,
}

impl RationalIntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// Exact normalization: touching or overlapping intervals are merged.
    pub fn normalize(mut intervals: Vec<(Rational, Rational)>) -> Self {
        intervals.retain(|(lo, hi)| lo <= hi);
        intervals.sort();
        let mut parts: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match parts.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => parts.push((lo, hi)),
            }
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[(Rational, Rational)] {
        &self.parts
    }

    pub fn measure(&self) -> Rational {
        self.parts
            .iter()
            .fold(Rational::new(0, 1), |acc, (lo, hi)| acc + (hi - lo))
    }

    pub fn complement_in(&self, window: (Rational, Rational)) -> Self {
        let mut parts = Vec::new();
        let mut cursor = window.0;
        for (lo, hi) in &self.parts {
            if *hi < window.0 || *lo > window.1 {
                continue;
            }
            if *lo > cursor {
                parts.push((cursor, (*lo).min(window.1)));
            }
            if *hi > cursor {
                cursor = *hi;
            }
            if cursor >= window.1 {
                break;
            }
        }
        if cursor < window.1 {
            parts.push((cursor, window.1));
        }
        parts.retain(|(lo, hi)| lo < hi);
        Self { parts }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.parts.clone();
        all.extend_from_slice(&other.parts);
        Self::normalize(all)
    }

    /// Lossy conversion to the floating-point representation.
    pub fn to_float(&self) -> IntervalSet {
        let intervals = self
            .parts
            .iter()
            .map(|(lo, hi)| Interval {
                lo: ratio_to_f64(*lo),
                hi: ratio_to_f64(*hi),
            })
            .collect();
        IntervalSet::normalize(intervals, DEFAULT_MERGE_TOL).expect("rational endpoints are finite")
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
