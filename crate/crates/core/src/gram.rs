//! Gram matrices of exponentials over interval sets and their extremal
//! eigenvalues.
//!
//! The inner product of two exponentials over a finite union of intervals has
//! the closed form `∫_S e^{2πiθx} dx = Σ (b-a) sinc(θ(b-a)) e^{iπθ(a+b)}`, so
//! Gram entries are exact up to rounding. Extremal eigenvalues (the optimal
//! Riesz/frame bounds of the finite family) come from a cyclic Jacobi sweep
//! on the Hermitian matrix; the solver is dependency-free and validates the
//! returned extremal pairs against their eigenresidual.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::frequency_tools::{FreqError, FrequencySet};
use crate::interval_sets::IntervalSet;

/// Relative off-diagonal mass at which the Jacobi sweep stops.
const JACOBI_TOL: f64 = 1e-12;
/// Relative eigenresidual accepted for extremal pairs.
const RESIDUAL_TOL: f64 = 1e-9;
/// Absolute tolerance for projection and rank decisions.
const PROJECTION_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum GramError {
    #[error("matrix has dimension zero")]
    EmptyMatrix,
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Jacobi sweep did not converge")]
    NoConvergence,
    #[error("eigenresidual {residual} exceeds bound {bound}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("matrix is not an orthogonal projection (deviation {deviation})")]
    NotAProjection { deviation: f64 },
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("frequency set is not a union of residue classes over the window (residue {residue})")]
    NotResidueUnion { residue: u64 },
    #[error("the set has measure zero")]
    DegenerateSet,
    #[error(transparent)]
    Freq(#[from] FreqError),
}

/// `∫_S e^{2πiθx} dx`, exactly, part by part. `θ = 0` returns the measure.
pub fn exp_inner(theta: f64, s: &IntervalSet) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(s.measure(), 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for p in s.parts() {
        let len = p.length();
        let t = theta * len;
        let sinc = if t == 0.0 { 1.0 } else { (PI * t).sin() / (PI * t) };
        acc += Complex64::from_polar(len * sinc, PI * theta * (p.lo + p.hi));
    }
    acc
}

/// Hermitian matrix `G[m,n] = ∫_S e^{2πi(λ_m - λ_n)x} dx` for a finite
/// frequency set, with snapshots of its inputs.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    freqs: FrequencySet,
    set: IntervalSet,
    n: usize,
    entries: Vec<Complex64>,
}

impl GramMatrix {
    pub fn build(freqs: &FrequencySet, s: &IntervalSet) -> Result<Self, GramError> {
        let pts = freqs.points();
        let n = pts.len();
        if n == 0 {
            return Err(GramError::EmptyMatrix);
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        let measure = s.measure();
        for i in 0..n {
            entries[i * n + i] = Complex64::new(measure, 0.0);
            for j in i + 1..n {
                let g = exp_inner(pts[i] - pts[j], s);
                entries[i * n + j] = g;
                entries[j * n + i] = g.conj();
            }
        }
        Ok(Self { freqs: freqs.clone(), set: s.clone(), n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn freqs(&self) -> &FrequencySet {
        &self.freqs
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `c* G c`, i.e. the energy `∫_S |Σ c_k e^{2πiλ_k x}|² dx`.
    pub fn quadratic_form(&self, c: &[Complex64]) -> Result<f64, GramError> {
        if c.len() != self.n {
            return Err(GramError::DimensionMismatch { expected: self.n, got: c.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                acc += c[i].conj() * self.entries[i * self.n + j] * c[j];
            }
        }
        Ok(acc.re)
    }

    pub fn eigendecomposition(&self) -> Result<HermitianEig, GramError> {
        hermitian_eigs(&self.entries, self.n)
    }

    /// Smallest and largest eigenvalue with validated eigenresiduals.
    pub fn extremal_eigs(&self) -> Result<(f64, f64), GramError> {
        let eig = self.eigendecomposition()?;
        let scale = frobenius(&self.entries);
        for idx in [0, self.n - 1] {
            let res = eig_residual(&self.entries, self.n, eig.values[idx], eig.vector(idx));
            let bound = RESIDUAL_TOL * scale.max(1e-300);
            if res > bound {
                return Err(GramError::ResidualTooLarge { residual: res, bound });
            }
        }
        Ok((eig.values[0], eig.values[self.n - 1]))
    }

    /// Row-major little-endian `(re, im)` pairs, for external cross-checks.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.entries.len() * 16);
        for e in &self.entries {
            out.extend_from_slice(&e.re.to_le_bytes());
            out.extend_from_slice(&e.im.to_le_bytes());
        }
        out
    }

    pub fn export(&self) -> GramExport {
        GramExport {
            freqs: self.freqs.points().to_vec(),
            set: self.set.clone(),
            dim: self.n,
            entries: self.entries.iter().map(|e| [e.re, e.im]).collect(),
        }
    }
}

/// JSON form of a Gram matrix.
#[derive(Debug, Serialize)]
pub struct GramExport {
    pub freqs: Vec<f64>,
    pub set: IntervalSet,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

/// Full Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    vectors: Vec<Complex64>, // column-major
    n: usize,
}

impl HermitianEig {
    /// Eigenvector for `values[i]`.
    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }
}

fn frobenius(a: &[Complex64]) -> f64 {
    a.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_mass(a: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn eig_residual(a: &[Complex64], n: usize, lambda: f64, v: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += a[i * n + j] * v[j];
        }
        acc += (row - lambda * v[i]).norm_sqr();
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigensolver for a dense Hermitian matrix (row-major).
///
/// Each rotation factors the pivot phase out of the 2x2 block and applies the
/// classical symmetric rotation; sweeping stops once the off-diagonal
/// Frobenius mass falls below `1e-12 * ||A||_F`.
pub fn hermitian_eigs(a: &[Complex64], n: usize) -> Result<HermitianEig, GramError> {
    if n == 0 {
        return Err(GramError::EmptyMatrix);
    }
    if a.len() != n * n {
        return Err(GramError::DimensionMismatch { expected: n * n, got: a.len() });
    }
    let mut m = a.to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let scale = frobenius(&m);
    if scale > 0.0 {
        let mut converged = off_diagonal_mass(&m, n) <= JACOBI_TOL * scale;
        let mut sweeps = 0;
        while !converged {
            sweeps += 1;
            if sweeps > 100 {
                return Err(GramError::NoConvergence);
            }
            for p in 0..n {
                for q in p + 1..n {
                    let beta = m[p * n + q];
                    let abs_beta = beta.norm();
                    if abs_beta <= 1e-300 {
                        continue;
                    }
                    let phase = beta / abs_beta; // e^{i phi}
                    let alpha = m[p * n + p].re;
                    let gamma = m[q * n + q].re;
                    let tau = (gamma - alpha) / (2.0 * abs_beta);
                    let t = if tau == 0.0 {
                        1.0
                    } else {
                        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on (p, q).
                    let upp = Complex64::new(c, 0.0);
                    let upq = Complex64::new(s, 0.0);
                    let uqp = -s * phase.conj();
                    let uqq = c * phase.conj();
                    for k in 0..n {
                        if k == p || k == q {
                            continue;
                        }
                        let akp = m[k * n + p];
                        let akq = m[k * n + q];
                        let new_kp = akp * upp + akq * uqp;
                        let new_kq = akp * upq + akq * uqq;
                        m[k * n + p] = new_kp;
                        m[k * n + q] = new_kq;
                        m[p * n + k] = new_kp.conj();
                        m[q * n + k] = new_kq.conj();
                    }
                    m[p * n + p] = Complex64::new(c * c * alpha - 2.0 * c * s * abs_beta + s * s * gamma, 0.0);
                    m[q * n + q] = Complex64::new(s * s * alpha + 2.0 * c * s * abs_beta + c * c * gamma, 0.0);
                    m[p * n + q] = Complex64::new(0.0, 0.0);
                    m[q * n + p] = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * upp + vkq * uqp;
                        v[k * n + q] = vkp * upq + vkq * uqq;
                    }
                }
            }
            converged = off_diagonal_mass(&m, n) <= JACOBI_TOL * scale;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.partial_cmp(&m[j * n + j].re).expect("finite"));
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[col * n + k] = v[k * n + src];
        }
    }
    Ok(HermitianEig { values, vectors, n })
}

/// `λ_min` of the Gram matrix for each truncation in `family` over the fixed
/// set `s`; for nested truncations the sequence is nonincreasing
/// (eigenvalue interlacing of principal submatrices).
pub fn riesz_lower_trajectory(
    family: &[FrequencySet],
    s: &IntervalSet,
) -> Result<Vec<f64>, GramError> {
    family
        .iter()
        .map(|freqs| Ok(GramMatrix::build(freqs, s)?.extremal_eigs()?.0))
        .collect()
}

/// Outcome of the finite-dimensional Bessel/frame/Riesz duality check.
///
/// For an orthogonal projection `P` and an index subset `J`, the compressions
/// `{P e_j}` tie together: the optimal Bessel bound of the `J` family, the
/// lower frame bound of the complementary family on `range(P)`, and the lower
/// Riesz bound of `{(I-P) e_j}_{j in J}` satisfy
/// `frame_lower = 1 - bessel_opt = riesz_lower` whenever `bessel_opt < 1`.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub n: usize,
    pub rank: usize,
    pub j_len: usize,
    pub bessel_opt: f64,
    pub frame_lower: f64,
    pub riesz_lower: f64,
    pub consistent: bool,
    /// Set when the optimal Bessel bound sits at 0 or 1, where the
    /// equivalence degenerates.
    pub boundary: bool,
}

fn principal_submatrix(a: &[Complex64], n: usize, idx: &[usize]) -> Vec<Complex64> {
    let k = idx.len();
    let mut out = vec![Complex64::new(0.0, 0.0); k * k];
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out[r * k + c] = a[i * n + j];
        }
    }
    out
}

/// Pivoted Gram-Schmidt orthonormal basis of the column span, rank decided at
/// residual norm `1e-10`. Returns column-major `n x rank`.
fn range_basis(p: &[Complex64], n: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| p[i * n + j]).collect())
        .collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    loop {
        let (best, norm) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
            .expect("n >= 1 columns");
        if norm <= PROJECTION_TOL {
            break;
        }
        let q: Vec<Complex64> = cols[best].iter().map(|z| z / norm).collect();
        for col in cols.iter_mut() {
            let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            for (ci, qi) in col.iter_mut().zip(&q) {
                *ci -= proj * qi;
            }
        }
        basis.push(q);
    }
    basis
}

/// Checks the projection duality at one `(P, J)` instance; see
/// [`DualityReport`]. `J = ∅` uses the conventions `bessel_opt = 0`,
/// `riesz_lower = 1`.
pub fn duality_check(p: &[Complex64], n: usize, j_set: &[usize]) -> Result<DualityReport, GramError> {
    if n == 0 {
        return Err(GramError::EmptyMatrix);
    }
    if p.len() != n * n {
        return Err(GramError::DimensionMismatch { expected: n * n, got: p.len() });
    }
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut sq = Complex64::new(0.0, 0.0);
            for k in 0..n {
                sq += p[i * n + k] * p[k * n + j];
            }
            deviation = deviation.max((sq - p[i * n + j]).norm());
            deviation = deviation.max((p[i * n + j] - p[j * n + i].conj()).norm());
        }
    }
    if deviation > PROJECTION_TOL {
        return Err(GramError::NotAProjection { deviation });
    }
    let mut j_sorted: Vec<usize> = j_set.to_vec();
    j_sorted.sort_unstable();
    j_sorted.dedup();
    if let Some(&bad) = j_sorted.iter().find(|&&i| i >= n) {
        return Err(GramError::IndexOutOfRange { index: bad, n });
    }

    // Gram of {P e_j}_{j in J} is the principal submatrix P[J, J].
    let bessel_opt = if j_sorted.is_empty() {
        0.0
    } else {
        let sub = principal_submatrix(p, n, &j_sorted);
        *hermitian_eigs(&sub, j_sorted.len())?.values.last().expect("nonempty")
    };

    let basis = range_basis(p, n);
    let rank = basis.len();
    let in_j = {
        let mut mask = vec![false; n];
        for &j in &j_sorted {
            mask[j] = true;
        }
        mask
    };
    let frame_lower = if rank == 0 {
        1.0 // trivial subspace: nothing to bound
    } else {
        // Frame operator of {P e_j}_{j in J^c} on range(P): T = Q* E_{J^c} Q.
        let mut t = vec![Complex64::new(0.0, 0.0); rank * rank];
        for a in 0..rank {
            for b in 0..rank {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    if !in_j[k] {
                        acc += basis[a][k].conj() * basis[b][k];
                    }
                }
                t[a * rank + b] = acc;
            }
        }
        hermitian_eigs(&t, rank)?.values[0]
    };

    let riesz_lower = if j_sorted.is_empty() {
        1.0
    } else {
        // Gram of {(I - P) e_j}_{j in J} is (I - P)[J, J].
        let k = j_sorted.len();
        let mut sub = principal_submatrix(p, n, &j_sorted);
        for (r, entry) in sub.iter_mut().enumerate() {
            *entry = -*entry;
            if r % (k + 1) == 0 {
                *entry += 1.0;
            }
        }
        hermitian_eigs(&sub, k)?.values[0]
    };

    let target = 1.0 - bessel_opt;
    let consistent =
        (frame_lower - target).abs() <= 1e-9 && (riesz_lower - target).abs() <= 1e-9;
    let boundary = !(1e-9..=1.0 - 1e-9).contains(&bessel_opt);
    Ok(DualityReport {
        n,
        rank,
        j_len: j_sorted.len(),
        bessel_opt,
        frame_lower,
        riesz_lower,
        consistent,
        boundary,
    })
}

/// Draws a rank-`rank` orthogonal projection from the unitarily invariant
/// ensemble (Gaussian columns, orthonormalized).
pub fn random_projection<R: rand::Rng>(n: usize, rank: usize, rng: &mut R) -> Vec<Complex64> {
    use rand_distr::StandardNormal;
    assert!(rank <= n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut col: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for q in &basis {
            let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            for (ci, qi) in col.iter_mut().zip(q) {
                *ci -= proj * qi;
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(col.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut p = vec![Complex64::new(0.0, 0.0); n * n];
    for q in &basis {
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] += q[i] * q[j].conj();
            }
        }
    }
    p
}

/// Finite-truncation upper estimate `1 - λ_max(Gram(Ω ∩ [-K,K], V))` of the
/// lower frame bound of `E(Ω')` on `L²(V)`, where `Ω = Z \ Ω'` and `Ω'` must
/// be a union of residue classes mod `modulus` intersected with the window.
///
/// With the raw inner-product normalization the Gram of integer frequencies
/// over `V ⊆ [-1/2, 1/2]` is a compression of an orthonormal family, so its
/// spectrum sits in `[0, 1]` and the estimate is monotone in `K`.
pub fn complement_frame_bound(
    omega_prime: &FrequencySet,
    modulus: u64,
    v: &IntervalSet,
    k: i64,
) -> Result<f64, GramError> {
    if v.measure() <= 0.0 {
        return Err(GramError::DegenerateSet);
    }
    if modulus == 0 {
        return Err(FreqError::BadParameter("modulus must be >= 1".into()).into());
    }
    let ints = omega_prime.as_integers()?;
    if ints.iter().any(|&z| z.abs() > k) {
        return Err(FreqError::BadParameter(format!("frequencies exceed the window [-{k}, {k}]"))
            .into());
    }
    let members: std::collections::HashSet<i64> = ints.iter().copied().collect();
    let residues: std::collections::HashSet<u64> =
        ints.iter().map(|&z| z.rem_euclid(modulus as i64) as u64).collect();
    for z in -k..=k {
        let r = z.rem_euclid(modulus as i64) as u64;
        if residues.contains(&r) != members.contains(&z) {
            return Err(GramError::NotResidueUnion { residue: r });
        }
    }
    let omega: Vec<f64> = (-k..=k)
        .filter(|z| !members.contains(z))
        .map(|z| z as f64)
        .collect();
    if omega.is_empty() {
        // Ω' is all of Z in the window; E(Z) keeps frame bounds 1 on L²(V).
        return Ok(1.0);
    }
    let freqs = FrequencySet::new(omega, Some("complement of omega'".into()))?;
    let gram = GramMatrix::build(&freqs, v)?;
    let (_, lambda_max) = gram.extremal_eigs()?;
    Ok(1.0 - lambda_max)
}
