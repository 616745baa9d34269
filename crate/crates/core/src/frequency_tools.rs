//! Discrete frequency-set utilities: separation, windowed Beurling-density
//! estimation, lattice rounding, residue-class analysis, exact and
//! approximate arithmetic-progression search, and the example-set generators
//! used across the test suites.
//!
//! The approximate-AP extraction follows the rounding argument: round the
//! separated set to a lattice `(1/N)Z` fine enough that rounding is injective
//! and moves points by at most `delta`, partition the scaled integers by
//! residue, and search the classes for an exact progression. Unbounded
//! existence arguments are replaced by exhaustive search over the finite
//! window; a miss is reported as [`FreqError::ApNotFound`] with the longest
//! run that was found.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval_sets::Interval;

/// Integer magnitudes above this are refused so AP arithmetic stays exact.
pub const MAGNITUDE_CAP: f64 = (1u64 << 40) as f64;

#[derive(Debug, Error, PartialEq)]
pub enum FreqError {
    #[error("need at least {need} points, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("frequency {0} is not finite")]
    NonFinite(f64),
    #[error("duplicate frequency {0}")]
    Duplicate(f64),
    #[error("frequency {0} is not an integer")]
    NonInteger(f64),
    #[error("magnitude {0} exceeds the 2^40 integer cap")]
    MagnitudeCap(f64),
    #[error("lattice step 1/{n} is not finer than the separation {separation}; collisions possible")]
    LatticeTooCoarse { n: u64, separation: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(
        "no arithmetic progression of length {requested_len} found in the window \
         (longest found: {best_len})"
    )]
    ApNotFound { requested_len: usize, best_len: usize },
}

/// A finite sorted set of real frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySet {
    points: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<String>,
}

impl FrequencySet {
    /// Sorts the inputs and enforces strict monotonicity.
    pub fn new(mut points: Vec<f64>, meta: Option<String>) -> Result<Self, FreqError> {
        for &p in &points {
            if !p.is_finite() {
                return Err(FreqError::NonFinite(p));
            }
        }
        points.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(FreqError::Duplicate(w[0]));
            }
        }
        Ok(Self { points, meta })
    }

    /// The integers `-k ..= k`.
    pub fn integer_range(k: i64) -> Self {
        let points = (-k..=k).map(|n| n as f64).collect();
        Self { points, meta: Some(format!("Z in [-{k}, {k}]")) }
    }

    /// The lattice `step * (-k ..= k)`.
    pub fn scaled_lattice(step: f64, k: i64) -> Result<Self, FreqError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(FreqError::BadParameter(format!("lattice step {step} must be positive")));
        }
        Self::new(
            (-k..=k).map(|n| n as f64 * step).collect(),
            Some(format!("{step}*Z in window, k={k}")),
        )
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The mirrored set `self ∪ (-self)`.
    pub fn mirrored(&self) -> Self {
        let mut points: Vec<f64> = self.points.iter().flat_map(|&x| [x, -x]).collect();
        points.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        points.dedup();
        Self { points, meta: self.meta.as_ref().map(|m| format!("+- mirror of {m}")) }
    }

    /// The subset with points in `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p <= hi);
        Self { points: self.points[a..b].to_vec(), meta: self.meta.clone() }
    }

    /// Interprets the set as integers, refusing non-integral or oversized points.
    pub fn as_integers(&self) -> Result<Vec<i64>, FreqError> {
        self.points
            .iter()
            .map(|&p| {
                if p.fract() != 0.0 {
                    Err(FreqError::NonInteger(p))
                } else if p.abs() > MAGNITUDE_CAP {
                    Err(FreqError::MagnitudeCap(p))
                } else {
                    Ok(p as i64)
                }
            })
            .collect()
    }
}

/// Minimum consecutive gap (the separation constant of the finite set).
pub fn separation(l: &FrequencySet) -> Result<f64, FreqError> {
    if l.len() < 2 {
        return Err(FreqError::TooFew { need: 2, got: l.len() });
    }
    Ok(l.points
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

/// Windowed counts `inf_x |L ∩ [x, x+r]| / r` and `sup_x ... / r` at one radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadiusDensity {
    pub r: f64,
    pub inf_over_r: f64,
    pub sup_over_r: f64,
}

/// Finite-window estimates of the lower/upper Beurling densities.
#[derive(Debug, Clone, Serialize)]
pub struct DensityEstimate {
    pub d_minus: f64,
    pub d_plus: f64,
    pub per_r: Vec<RadiusDensity>,
}

/// Sweeps windows `[x, x+r]` over `window` at step `separation/2` for each
/// radius in `r_grid` and returns the per-radius extremal counts.
///
/// The lower-density estimate is the largest `inf/r` over the grid (the
/// sweep value grows toward the asymptotic lower density as `r` grows), and
/// the upper-density estimate is the largest `sup/r` (finite truncation
/// starves large radii, so the caller picks the grid scale of interest).
pub fn density_bounds(
    l: &FrequencySet,
    window: Interval,
    r_grid: &[f64],
) -> Result<DensityEstimate, FreqError> {
    if r_grid.is_empty() {
        return Err(FreqError::BadParameter("empty r grid".into()));
    }
    let sep = separation(l)?;
    let step = sep / 2.0;
    let mut per_r = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r > 0.0 && r <= window.length()) {
            return Err(FreqError::BadParameter(format!(
                "radius {r} must lie in (0, window length {}]",
                window.length()
            )));
        }
        let n_pos = ((window.length() - r) / step).floor() as usize + 1;
        let pts = &l.points;
        let (mut lo_idx, mut hi_idx) = (0usize, 0usize);
        let mut min_count = usize::MAX;
        let mut max_count = 0usize;
        for k in 0..n_pos {
            let x = window.lo + step * k as f64;
            while lo_idx < pts.len() && pts[lo_idx] < x {
                lo_idx += 1;
            }
            if hi_idx < lo_idx {
                hi_idx = lo_idx;
            }
            while hi_idx < pts.len() && pts[hi_idx] <= x + r {
                hi_idx += 1;
            }
            let count = hi_idx - lo_idx;
            min_count = min_count.min(count);
            max_count = max_count.max(count);
        }
        per_r.push(RadiusDensity {
            r,
            inf_over_r: min_count as f64 / r,
            sup_over_r: max_count as f64 / r,
        });
    }
    let d_minus = per_r.iter().map(|d| d.inf_over_r).fold(0.0, f64::max);
    let d_plus = per_r.iter().map(|d| d.sup_over_r).fold(0.0, f64::max);
    Ok(DensityEstimate { d_minus, d_plus, per_r })
}

fn round_half_down(x: f64) -> i64 {
    let fl = x.floor();
    let frac = x - fl;
    // Exact midpoints round to the lower lattice point.
    if frac > 0.5 {
        fl as i64 + 1
    } else {
        fl as i64
    }
}

fn lattice_indices(l: &FrequencySet, n: u64) -> Result<Vec<i64>, FreqError> {
    l.points
        .iter()
        .map(|&p| {
            let scaled = p * n as f64;
            if scaled.abs() > MAGNITUDE_CAP {
                return Err(FreqError::MagnitudeCap(scaled));
            }
            Ok(round_half_down(scaled))
        })
        .collect()
}

/// Rounds every point to the nearest lattice point in `(1/N)Z`, refusing a
/// lattice coarser than the set's separation (collisions would be possible).
/// Exact midpoints go to the lower point; deviations are at most `1/(2N)`.
pub fn round_to_lattice(l: &FrequencySet, n: u64) -> Result<FrequencySet, FreqError> {
    if n == 0 {
        return Err(FreqError::BadParameter("lattice denominator must be positive".into()));
    }
    let sep = separation(l)?;
    if 1.0 / n as f64 >= sep {
        return Err(FreqError::LatticeTooCoarse { n, separation: sep });
    }
    let idx = lattice_indices(l, n)?;
    let points: Vec<f64> = idx.iter().map(|&k| k as f64 / n as f64).collect();
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    FrequencySet::new(points, l.meta.clone())
}

/// Partition of an integer set by residue modulo `n`.
#[derive(Debug, Clone, Serialize)]
pub struct ResidueClasses {
    pub modulus: u64,
    pub classes: BTreeMap<u64, Vec<i64>>,
    /// Residue of the most populated class (the windowed upper-density
    /// proxy: all classes share the window, so counts order the densities).
    /// Ties go to the smaller residue.
    pub densest: u64,
}

pub fn residue_classes(o: &FrequencySet, n: u64) -> Result<ResidueClasses, FreqError> {
    if n == 0 {
        return Err(FreqError::BadParameter("modulus must be >= 1".into()));
    }
    let ints = o.as_integers()?;
    let mut classes: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
    for z in ints {
        classes.entry(z.rem_euclid(n as i64) as u64).or_default().push(z);
    }
    let densest = classes
        .iter()
        .max_by_key(|(u, v)| (v.len(), std::cmp::Reverse(**u)))
        .map(|(u, _)| *u)
        .unwrap_or(0);
    Ok(ResidueClasses { modulus: n, classes, densest })
}

fn longest_run(sorted: &[i64], members: &HashSet<i64>, diff: i64) -> (usize, i64) {
    let mut best = (0usize, 0i64);
    for &z in sorted {
        if members.contains(&(z - diff)) {
            continue; // not a run head
        }
        let mut len = 1usize;
        while members.contains(&(z + len as i64 * diff)) {
            len += 1;
        }
        if len > best.0 {
            best = (len, z);
        }
    }
    best
}

/// Longest run `start, start+p, ..., start+(len-1)p` fully inside the integer
/// set, by hashed membership. Returns `(length, start)`; `(0, 0)` for the
/// empty set. Ties resolve to the smallest start.
pub fn find_ap_fixed_diff(o: &FrequencySet, p: u64) -> Result<(usize, i64), FreqError> {
    if p == 0 {
        return Err(FreqError::BadParameter("common difference must be >= 1".into()));
    }
    if p as f64 > MAGNITUDE_CAP {
        return Err(FreqError::MagnitudeCap(p as f64));
    }
    let ints = o.as_integers()?;
    let members: HashSet<i64> = ints.iter().copied().collect();
    Ok(longest_run(&ints, &members, p as i64))
}

/// An approximate arithmetic progression extracted from a separated set:
/// `2M+1` members `s(-M) < ... < s(M)` with `|s(j) - c*j - d| <= max_deviation`.
#[derive(Debug, Clone, Serialize)]
pub struct ApResult {
    pub c: u64,
    pub d: f64,
    pub s: Vec<f64>,
    pub max_deviation: f64,
    /// Lattice denominator used for the rounding step.
    pub lattice_n: u64,
}

/// Extracts an approximate AP of length `2m+1` with deviation at most `delta`
/// and common difference a positive multiple of `lmult`.
///
/// Rounds to `(1/N)Z` with `N` the smallest power of two with `1/N <
/// min(separation, 2*delta)`, partitions the scaled integers by residue mod
/// `lmult*N`, and scans common differences in increasing order (so the
/// returned `c` is the smallest realizable one). Returned members are the
/// original, unrounded points.
pub fn extract_approx_ap(
    l: &FrequencySet,
    m: u32,
    delta: f64,
    lmult: u64,
) -> Result<ApResult, FreqError> {
    if m < 1 {
        return Err(FreqError::BadParameter("m must be >= 1".into()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(FreqError::BadParameter(format!("delta {delta} must be positive")));
    }
    if lmult < 1 {
        return Err(FreqError::BadParameter("lmult must be >= 1".into()));
    }
    let need = 2 * m as usize + 1;
    if l.len() < 2 {
        return Err(FreqError::ApNotFound { requested_len: need, best_len: l.len().min(1) });
    }
    let sep = separation(l)?;
    let tau = sep.min(2.0 * delta);
    let mut n: u64 = 1;
    while 1.0 / n as f64 >= tau {
        n = n
            .checked_mul(2)
            .filter(|&v| (v as f64) <= MAGNITUDE_CAP)
            .ok_or_else(|| FreqError::BadParameter("required lattice is too fine".into()))?;
    }
    let modulus = (n as u128 * lmult as u128 <= MAGNITUDE_CAP as u128)
        .then(|| (n * lmult) as i64)
        .ok_or_else(|| FreqError::BadParameter("lmult * N exceeds the integer cap".into()))?;

    let z = lattice_indices(l, n)?;
    debug_assert!(z.windows(2).all(|w| w[0] < w[1]), "rounding must stay injective");
    let index_of: HashMap<i64, usize> = z.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();

    let mut classes: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &v in &z {
        classes.entry(v.rem_euclid(modulus)).or_default().push(v);
    }
    let class_sets: BTreeMap<i64, HashSet<i64>> = classes
        .iter()
        .map(|(u, v)| (*u, v.iter().copied().collect()))
        .collect();

    let span = z[z.len() - 1] - z[0];
    let t_max = span / (2 * m as i64 * modulus);
    // Scanning t = 1..=t_max is complete for runs of the requested length
    // (longer differences cannot fit the span). When even that range is
    // empty the request is hopeless by span alone, so the scan widens to
    // every difference that could host a run of length 3, purely to report
    // an honest best-found length.
    let t_limit = if t_max >= 1 { t_max } else { span / (2 * modulus) };
    const OPS_BUDGET: u128 = 2_000_000_000;
    let mut ops: u128 = 0;
    let mut best_len = 1usize;
    for t in 1..=t_limit.max(0) {
        ops += z.len() as u128;
        if ops > OPS_BUDGET {
            return Err(FreqError::BadParameter(format!(
                "exhaustive search exhausted its budget at difference multiplier {t} of \
                 {t_limit}; tighten m, delta, or lmult, or shrink the window"
            )));
        }
        let diff = t * modulus;
        for (u, members) in &classes {
            let (len, start) = longest_run(members, &class_sets[u], diff);
            best_len = best_len.max(len);
            if len >= need {
                let d0 = start + m as i64 * diff;
                let c = (t as u64) * lmult;
                let d = d0 as f64 / n as f64;
                let s: Vec<f64> = (0..need)
                    .map(|i| l.points[index_of[&(start + i as i64 * diff)]])
                    .collect();
                let max_deviation = s
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let j = i as i64 - m as i64;
                        (v - (d0 + j * diff) as f64 / n as f64).abs()
                    })
                    .fold(0.0, f64::max);
                debug_assert!(max_deviation <= 0.5 / n as f64 + 1e-12);
                return Ok(ApResult { c, d, s, max_deviation, lattice_n: n });
            }
        }
    }
    Err(FreqError::ApNotFound { requested_len: need, best_len })
}

/// Square-free integers in `[1, limit]` by sieving out multiples of squares.
pub fn squarefree_set(limit: u64) -> Result<FrequencySet, FreqError> {
    // The sieve is a dense bool array; 10^8 keeps it within desk-scale memory.
    if !(1..=100_000_000).contains(&limit) {
        return Err(FreqError::BadParameter(format!("limit {limit} out of range (1..=10^8)")));
    }
    let mut free = vec![true; limit as usize + 1];
    let mut d: u64 = 2;
    while d * d <= limit {
        let sq = (d * d) as usize;
        let mut idx = sq;
        while idx <= limit as usize {
            free[idx] = false;
            idx += sq;
        }
        d += 1;
    }
    let points: Vec<f64> = (1..=limit as usize).filter(|&i| free[i]).map(|i| i as f64).collect();
    Ok(FrequencySet { points, meta: Some(format!("square-free integers <= {limit}")) })
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Square-free obstruction report: any progression with difference `p` whose
/// length reached `q^2` (with `q` the smallest prime above `p`) would contain
/// a multiple of `q^2`, so `cap = q^2 - 1` bounds the observed length.
#[derive(Debug, Clone, Serialize)]
pub struct SquarefreeObstruction {
    #[serde(rename = "P")]
    pub p: u64,
    #[serde(rename = "Q")]
    pub q: u64,
    pub cap: u64,
    pub observed: usize,
    pub observed_start: i64,
    pub limit: u64,
}

pub fn squarefree_obstruction(p: u64, limit: u64) -> Result<SquarefreeObstruction, FreqError> {
    if p < 1 {
        return Err(FreqError::BadParameter("P must be >= 1".into()));
    }
    if limit < 4 {
        return Err(FreqError::BadParameter("limit must be >= 4".into()));
    }
    let set = squarefree_set(limit)?;
    let mut q = p + 1;
    while !is_prime(q) {
        q += 1;
    }
    let (observed, observed_start) = find_ap_fixed_diff(&set, p)?;
    Ok(SquarefreeObstruction { p, q, cap: q * q - 1, observed, observed_start, limit })
}

/// Block set `±⋃_k {d_k + P, ..., d_k + M_k P}` with `d_1 = 0` and
/// `d_{k+1} = d_k + 2 M_k P`; contains runs of every listed block length
/// with common difference `P`.
pub fn example_set_a(
    p: u64,
    block_sizes: &[u64],
    window_k: Option<f64>,
) -> Result<FrequencySet, FreqError> {
    if p < 1 {
        return Err(FreqError::BadParameter("P must be >= 1".into()));
    }
    if block_sizes.is_empty() {
        return Err(FreqError::BadParameter("need at least one block".into()));
    }
    let mut positives: Vec<i64> = Vec::new();
    let mut d: i64 = 0;
    for &mk in block_sizes {
        if mk < 1 {
            return Err(FreqError::BadParameter("block sizes must be >= 1".into()));
        }
        for j in 1..=mk as i64 {
            let v = d + j * p as i64;
            if v as f64 > MAGNITUDE_CAP {
                return Err(FreqError::MagnitudeCap(v as f64));
            }
            positives.push(v);
        }
        d += 2 * mk as i64 * p as i64;
    }
    let mut points: Vec<f64> = positives
        .iter()
        .flat_map(|&v| [v as f64, -v as f64])
        .filter(|&v| window_k.is_none_or(|k| v.abs() <= k))
        .collect();
    points.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(FrequencySet {
        points,
        meta: Some(format!("example-a P={p} blocks={}", block_sizes.len())),
    })
}

/// Blocks `±(σ_k + N k + {0, 100^k, ..., (k-1) 100^k})` for `k = 1..=k_max`
/// with `σ_k = frac(k·sqrt(2))`, optionally truncated to `[-K, K]`: per `k`,
/// exactly one maximal run with common difference `100^k` (of length `k`)
/// on each side of the origin.
pub fn example_set_b(
    n_param: u64,
    k_max: u32,
    window_k: Option<f64>,
) -> Result<FrequencySet, FreqError> {
    if n_param < 1 {
        return Err(FreqError::BadParameter("N must be >= 1".into()));
    }
    if !(1..=6).contains(&k_max) {
        // 100^k overwhelms f64 resolution past k = 6.
        return Err(FreqError::BadParameter("k_max must be in 1..=6".into()));
    }
    let mut points = Vec::new();
    for k in 1..=k_max {
        let sigma = (k as f64 * std::f64::consts::SQRT_2).fract();
        let base = sigma + (n_param * k as u64) as f64;
        let stride = 100f64.powi(k as i32);
        for j in 0..k {
            let v = base + j as f64 * stride;
            if window_k.is_none_or(|cap| v.abs() <= cap) {
                points.push(v);
                points.push(-v);
            }
        }
    }
    points.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(FrequencySet {
        points,
        meta: Some(format!("example-b N={n_param} k_max={k_max}")),
    })
}

/// Maximal runs with common difference `diff` (members matched within `tol`).
#[derive(Debug, Clone, Serialize)]
pub struct ApCensus {
    pub diff: f64,
    /// Maximal runs of length >= 2 as `(start, length)`.
    pub runs: Vec<(f64, usize)>,
    /// Length of the longest run (1 for a nonempty set with no pair).
    pub max_len: usize,
}

pub fn ap_census(l: &FrequencySet, diff: f64, tol: f64) -> Result<ApCensus, FreqError> {
    if !(diff > 0.0 && diff.is_finite()) {
        return Err(FreqError::BadParameter(format!("difference {diff} must be positive")));
    }
    if !(tol >= 0.0 && tol < diff / 2.0) {
        return Err(FreqError::BadParameter(format!("tolerance {tol} too large for {diff}")));
    }
    let nearest = |target: f64| -> Option<f64> {
        let idx = l.points.partition_point(|&p| p < target);
        let mut best: Option<f64> = None;
        for cand in idx.saturating_sub(1)..(idx + 1).min(l.points.len()) {
            let v = l.points[cand];
            if (v - target).abs() <= tol
                && best.is_none_or(|b| (v - target).abs() < (b - target).abs())
            {
                best = Some(v);
            }
        }
        best
    };
    let mut runs = Vec::new();
    let mut max_len = usize::from(!l.is_empty());
    for &x in &l.points {
        if nearest(x - diff).is_some() {
            continue; // not a run head
        }
        let mut len = 1usize;
        let mut cur = x;
        while let Some(next) = nearest(cur + diff) {
            len += 1;
            cur = next;
        }
        max_len = max_len.max(len);
        if len >= 2 {
            runs.push((x, len));
        }
    }
    Ok(ApCensus { diff, runs, max_len })
}
