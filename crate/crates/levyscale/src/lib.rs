//! Numerical q-scale functions of spectrally negative Lévy processes.
//!
//! A spectrally negative Lévy process with Laplace exponent ψ admits, for every
//! q ≥ 0, a unique nondecreasing function W^(q) on [0,∞) with
//!
//! ```text
//! L[W^(q)](β) = 1 / (ψ(β) − q),    β > Φ(q) = sup{ y : ψ(y) = q }.
//! ```
//!
//! This crate evaluates W^(q) by convolution power series on a uniform
//! midpoint grid, with product integration that treats power-law endpoint
//! singularities exactly. Three regimes are covered:
//!
//! * Gaussian component (σ² > 0) — series in the integrated jump tail,
//! * bounded variation (σ² = 0, small jumps summable) — series in the jump tail,
//! * unbounded variation without Gaussian part — series built from an
//!   auxiliary kernel h with h ∗ ν̄̄ (0+) = 1 (power kernels, Volterra
//!   resolvents, or the compensated process).
//!
//! Every computed table can be verified independently against the defining
//! Laplace identity ([`verify::verify_scale`]) and against closed forms
//! (Brownian two-exponential, Mittag-Leffler for stable processes, the
//! Cramér–Lundberg ruin probability).
//!
//! Module map:
//! * [`grid`] — uniform-grid functions, convolution, fractional calculus;
//! * [`levy`] — Lévy models: Laplace exponent, Φ(q), tails, drift constants;
//! * [`series`] — the truncated convolution power-series engine;
//! * [`scale`] — the scale-function entry points and closed-form oracles;
//! * [`resolvent`] — first-kind Volterra resolvents and renewal equations;
//! * [`verify`] — numerical Laplace transforms, residual checks, oracles.

pub mod error;
pub mod grid;
pub mod levy;
pub mod resolvent;
pub mod scale;
pub mod series;
pub mod special;
pub mod verify;

pub use error::Error;
pub use grid::{Grid, GridFunction, MixedDistribution};
pub use levy::{DriftConvention, JumpMeasure, LevyModel, Regime};
pub use resolvent::{solve_renewal, solve_resolvent, RenewalVariant, ResolventResult};
pub use scale::{
    mittag_leffler, mittag_leffler_derivative, scale_auto, scale_bounded_variation,
    scale_brownian_closed_form, scale_gaussian, scale_gaussian_roots, scale_stable_closed_form,
    scale_unbounded_variation, scale_with_cpp_perturbation, tilt, HKernel, Method, ScaleOptions,
    ScaleTable,
};
pub use series::{convolution_series, Kernel, SeriesReport, SeriesSpec, WeightRule};
pub use verify::{laplace_transform, ruin_probability, verify_scale, LaplaceCheck};
