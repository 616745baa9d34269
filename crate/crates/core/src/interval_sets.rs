//! Exact algebra of finite unions of closed real intervals.
//!
//! [`IntervalSet`] keeps a sorted list of pairwise-disjoint closed intervals
//! together with an absolute endpoint tolerance `merge_tol`; two intervals
//! whose gap is at most `merge_tol` are fused during normalization. All set
//! operations (union, intersection, complement within a window, affine image)
//! re-normalize, so the canonical form is an invariant of the type. Lebesgue
//! measure is the sum of part lengths.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default absolute endpoint tolerance used by the constructions.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum IntervalError {
    #[error("interval endpoints must be finite, got [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
    #[error("interval endpoints out of order: lo = {lo} > hi = {hi}")]
    Inverted { lo: f64, hi: f64 },
    #[error("merge tolerance must be finite and nonnegative, got {0}")]
    BadTolerance(f64),
    #[error("affine scale must be nonzero")]
    ZeroScale,
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The window `[-1/2, 1/2]` that hosts every construction in this crate.
    pub fn unit_window() -> Self {
        Self { lo: -0.5, hi: 0.5 }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A normalized finite union of disjoint closed intervals.
///
/// Invariants: parts are sorted by `lo`, and consecutive parts are separated
/// by more than `merge_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    parts: Vec<Interval>,
    merge_tol: f64,
}

impl IntervalSet {
    /// The empty set (legal input everywhere).
    pub fn empty() -> Self {
        Self::empty_with_tol(DEFAULT_MERGE_TOL)
    }

    pub fn empty_with_tol(merge_tol: f64) -> Self {
        Self { parts: Vec::new(), merge_tol }
    }

    /// Sorts the inputs, fuses intervals that overlap or sit within
    /// `merge_tol` of each other, and returns the canonical form.
    pub fn normalize(intervals: Vec<Interval>, merge_tol: f64) -> Result<Self, IntervalError> {
        if !merge_tol.is_finite() || merge_tol < 0.0 {
            return Err(IntervalError::BadTolerance(merge_tol));
        }
        for iv in &intervals {
            if !iv.lo.is_finite() || !iv.hi.is_finite() {
                return Err(IntervalError::NonFinite { lo: iv.lo, hi: iv.hi });
            }
            if iv.lo > iv.hi {
                return Err(IntervalError::Inverted { lo: iv.lo, hi: iv.hi });
            }
        }
        let mut sorted = intervals;
        sorted.sort_unstable_by(|a, b| {
            (a.lo, a.hi).partial_cmp(&(b.lo, b.hi)).expect("finite endpoints")
        });
        let mut parts: Vec<Interval> = Vec::with_capacity(sorted.len());
        for iv in sorted {
            match parts.last_mut() {
                Some(last) if iv.lo <= last.hi + merge_tol => {
                    last.hi = last.hi.max(iv.hi);
                }
                _ => parts.push(iv),
            }
        }
        Ok(Self { parts, merge_tol })
    }

    /// Convenience constructor from `(lo, hi)` pairs with the default tolerance.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, IntervalError> {
        let intervals = pairs
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Self::normalize(intervals, DEFAULT_MERGE_TOL)
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Lebesgue measure: the sum of part lengths.
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    /// `window \ self`, normalized. Degenerate slivers of zero length are
    /// dropped; boundary points carry no measure.
    pub fn complement_in(&self, window: Interval) -> Self {
        let mut parts = Vec::new();
        let mut cursor = window.lo;
        for p in &self.parts {
            if p.hi < window.lo || p.lo > window.hi {
                continue;
            }
            if p.lo > cursor {
                parts.push(Interval { lo: cursor, hi: p.lo.min(window.hi) });
            }
            cursor = cursor.max(p.hi);
            if cursor >= window.hi {
                break;
            }
        }
        if cursor < window.hi {
            parts.push(Interval { lo: cursor, hi: window.hi });
        }
        parts.retain(|p| p.length() > 0.0);
        Self::normalize(parts, self.merge_tol).expect("complement preserves validity")
    }

    /// The image `{scale * x + shift : x in self}`. Measure scales by `|scale|`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self, IntervalError> {
        if scale == 0.0 {
            return Err(IntervalError::ZeroScale);
        }
        if !scale.is_finite() || !shift.is_finite() {
            return Err(IntervalError::NonFinite { lo: scale, hi: shift });
        }
        let mapped = self
            .parts
            .iter()
            .map(|p| {
                let a = scale * p.lo + shift;
                let b = scale * p.hi + shift;
                Interval { lo: a.min(b), hi: a.max(b) }
            })
            .collect();
        Self::normalize(mapped, self.merge_tol)
    }

    pub fn union(&self, other: &Self) -> Self {
        let tol = self.merge_tol.max(other.merge_tol);
        let mut all = self.parts.clone();
        all.extend_from_slice(&other.parts);
        Self::normalize(all, tol).expect("union of valid sets is valid")
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let tol = self.merge_tol.max(other.merge_tol);
        let mut parts = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = self.parts[i];
            let b = other.parts[j];
            let lo = a.lo.max(b.lo);
            let hi = a.hi.min(b.hi);
            if lo <= hi {
                parts.push(Interval { lo, hi });
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalize(parts, tol).expect("intersection of valid sets is valid")
    }

    /// Closed-interval membership; used by Monte-Carlo cross-checks.
    pub fn contains_point(&self, x: f64) -> bool {
        let idx = self.parts.partition_point(|p| p.lo <= x);
        idx > 0 && self.parts[idx - 1].contains(x)
    }

    /// Part-wise equality of endpoints within `tol`, i.e. set equality up to
    /// endpoint noise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.parts.len() == other.parts.len()
            && self
                .parts
                .iter()
                .zip(&other.parts)
                .all(|(a, b)| (a.lo - b.lo).abs() <= tol && (a.hi - b.hi).abs() <= tol)
    }

    /// Uniform samples of the characteristic function over `window`.
    ///
    /// Returns `grid_n` rows `(x, chi)` with `x` spanning the window
    /// endpoints inclusively; feeds the `x,chi` CSV export.
    pub fn char_fn_samples(&self, window: Interval, grid_n: usize) -> Vec<(f64, u8)> {
        assert!(grid_n >= 2, "need at least two grid points");
        let step = window.length() / (grid_n - 1) as f64;
        (0..grid_n)
            .map(|i| {
                let x = window.lo + step * i as f64;
                (x, u8::from(self.contains_point(x)))
            })
            .collect()
    }
}

// JSON schema: {"parts": [[lo, hi], ...], "measure": m}
impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let pairs: Vec<[f64; 2]> = self.parts.iter().map(|p| [p.lo, p.hi]).collect();
        let mut st = serializer.serialize_struct("IntervalSet", 2)?;
        st.serialize_field("parts", &pairs)?;
        st.serialize_field("measure", &self.measure())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            parts: Vec<[f64; 2]>,
            #[serde(default)]
            #[allow(dead_code)]
            measure: Option<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let intervals = raw
            .parts
            .into_iter()
            .map(|[lo, hi]| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        IntervalSet::normalize(intervals, DEFAULT_MERGE_TOL).map_err(D::Error::custom)
    }
}
