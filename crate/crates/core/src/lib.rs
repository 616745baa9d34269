//! Numerical toolkit for exponential systems on finite unions of intervals.
//!
//! The crate builds the explicit "deleted-grid" subsets of `[-1/2, 1/2]`
//! whose complements defeat the lower Riesz inequality for structured
//! frequency sets, certifies the defeat with witness trigonometric
//! polynomials, and measures Riesz/frame bounds directly through Gram
//! matrices of exponentials. Supporting machinery covers interval-set
//! algebra, Beurling-density estimation, arithmetic-progression extraction
//! from separated sets, and the square-free counterexample to fixed-difference
//! progressions.
//!
//! Modules map one-to-one onto the toolkit's components:
//!
//! - [`interval_sets`]: normalized unions of closed intervals with exact
//!   measure, Boolean operations, and affine maps.
//! - [`construction`]: the deleted sets `V` and kept sets `S`, box and
//!   triangle Fourier coefficients, truncation and phase-budget selection,
//!   witness polynomials, and witness verification.
//! - [`gram`]: closed-form exponential inner products, Gram matrices, a
//!   dependency-free Hermitian Jacobi eigensolver, the projection duality
//!   check, and frame-bound trajectory estimators.
//! - [`frequency_tools`]: separation and density estimates, lattice rounding,
//!   residue classes, exact and approximate arithmetic-progression search,
//!   square-free sieving, and example-set generators.
//! - [`rational`]: exact-rational interval unions for validating the float
//!   path.
//! - [`report`]: deterministic JSON/CSV rendering shared by the CLI.

#![forbid(unsafe_code)]

pub mod construction;
pub mod frequency_tools;
pub mod gram;
pub mod interval_sets;
pub mod rational;
pub mod report;

pub use num_complex::Complex64;
