//! Truncated convolution power series: kernel ∗ Σₙ wₙ f^(∗n).
//!
//! All three scale-function regimes, the renewal solvers and the compound
//! Poisson perturbation reduce to this shape. Powers are built iteratively so
//! the origin-exponent bookkeeping of each convolution stays exact; the n = 0
//! term (δ₀) is handled symbolically and never becomes a grid spike.

use std::sync::Arc;

use crate::error::SeriesError;
use crate::grid::{convolve, GridFunction};

/// Weight rule for the series Σₙ wₙ f^(∗n).
#[derive(Clone)]
pub enum WeightRule {
    /// wₙ = 1/b^(n+1), b ≠ 0. The factor 1/b is folded into the iterated
    /// term, which keeps intermediate magnitudes balanced.
    Geometric { b: f64 },
    /// Arbitrary weight sequence n ↦ wₙ.
    Explicit(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

/// Convolution kernel applied to the accumulated series.
#[derive(Clone)]
pub enum Kernel<'a> {
    /// δ₀: the series itself is returned (requires `include_zeroth = false`,
    /// a δ₀ spike is not grid-representable).
    Delta0,
    Grid(&'a GridFunction),
}

pub struct SeriesSpec<'a> {
    pub term: &'a GridFunction,
    pub weights: WeightRule,
    pub kernel: Kernel<'a>,
    /// Stop once the weighted term's L¹ norm over [0, x_max] falls below this.
    pub tolerance: f64,
    pub max_terms: usize,
    /// Whether the n = 0 term w₀·(kernel ∗ δ₀) participates.
    pub include_zeroth: bool,
}

impl<'a> SeriesSpec<'a> {
    /// Defaults per the engine contract: ε = 1e−10·max(1, ‖kernel‖₁),
    /// maxTerms = 200.
    pub fn new(term: &'a GridFunction, weights: WeightRule, kernel: Kernel<'a>) -> Self {
        let kernel_l1 = match &kernel {
            Kernel::Delta0 => 1.0,
            Kernel::Grid(k) => k.l1_norm(k.grid().x_max()),
        };
        SeriesSpec {
            term,
            weights,
            kernel,
            tolerance: 1e-10 * kernel_l1.max(1.0),
            max_terms: 200,
            include_zeroth: true,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_max_terms(mut self, m: usize) -> Self {
        self.max_terms = m;
        self
    }

    pub fn without_zeroth(mut self) -> Self {
        self.include_zeroth = false;
        self
    }
}

/// Convergence diagnostics of a truncated convolution power series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub terms_used: usize,
    pub last_term_l1: f64,
    /// Bound on everything dropped after truncation, via the geometric tail
    /// of the term norms and a Hölder pairing with the kernel.
    pub tail_bound: f64,
    pub converged: bool,
    /// Weighted L¹ norm of every accumulated term (n ≥ 1).
    pub term_norms: Vec<f64>,
}

impl SeriesReport {
    pub fn exact(terms_used: usize) -> Self {
        SeriesReport {
            terms_used,
            last_term_l1: 0.0,
            tail_bound: 0.0,
            converged: true,
            term_norms: Vec::new(),
        }
    }
}

/// Exponent cap above which an iterated power is flattened to exponent 0.
/// Convolution powers gain s ↦ s + s_f + 1 each step; once the function
/// vanishes at least linearly at the origin the power factor carries no
/// singular information and keeping it would overflow x^s on long domains.
const REBASE_EXPONENT: f64 = 1.0;

struct Accumulated {
    basis: f64,
    values: Vec<f64>,
    any: bool,
}

impl Accumulated {
    fn new(basis: f64, n: usize) -> Self {
        Accumulated {
            basis,
            values: vec![0.0; n],
            any: false,
        }
    }

    fn add(&mut self, term: &GridFunction, weight: f64) {
        let g = term.grid();
        let d = term.exponent() - self.basis;
        for j in 0..g.len() {
            let v = if d == 0.0 {
                term.regular_values()[j]
            } else {
                g.node(j).powf(d) * term.regular_values()[j]
            };
            self.values[j] += weight * v;
        }
        self.any = true;
    }
}

/// Accumulate kernel ∗ Σₙ wₙ f^(∗n) until the weighted term norm drops below
/// tolerance (holding for three consecutive decreasing terms, which guards
/// against pre-asymptotic plateaus) or `max_terms` is hit.
pub fn convolution_series(
    spec: &SeriesSpec<'_>,
) -> Result<(GridFunction, SeriesReport), SeriesError> {
    let f = spec.term;
    let grid = f.grid();
    let x_max = grid.x_max();

    // fold 1/b into the iterated term for geometric weights
    let (iter_term, outer, weight_at): (GridFunction, f64, Arc<dyn Fn(usize) -> f64 + Send + Sync>) =
        match &spec.weights {
            WeightRule::Geometric { b } => {
                assert!(*b != 0.0, "geometric weight base must be nonzero");
                (f.scale(1.0 / b), 1.0 / b, Arc::new(|_| 1.0))
            }
            WeightRule::Explicit(w) => (f.clone(), 1.0, w.clone()),
        };

    let mut acc = Accumulated::new(iter_term.exponent(), grid.len());
    let mut power = iter_term.clone();
    let mut term_norms: Vec<f64> = Vec::new();
    let mut last_l1 = f64::INFINITY;
    let mut decreasing = 0usize;
    let mut terms_used = if spec.include_zeroth { 1 } else { 0 };
    let mut converged = false;
    let mut last_weighted = f64::INFINITY;
    let mut ratio = f64::NAN;
    let mut last_sup = 0.0;

    for n in 1..=spec.max_terms {
        let w = weight_at(n);
        let weighted_l1 = w.abs() * power.l1_norm(x_max);
        if !weighted_l1.is_finite() {
            return Err(SeriesError::NonFinite(n));
        }
        acc.add(&power, w);
        terms_used += 1;
        term_norms.push(weighted_l1);
        last_sup = w.abs() * power.sup_norm();
        if weighted_l1 < last_l1 {
            decreasing += 1;
        } else {
            decreasing = 0;
        }
        ratio = weighted_l1 / last_l1;
        last_l1 = weighted_l1;
        last_weighted = weighted_l1;
        if weighted_l1 == 0.0 || (weighted_l1 <= spec.tolerance && decreasing >= 3) {
            converged = true;
            break;
        }
        if n < spec.max_terms {
            let base = if power.exponent() >= REBASE_EXPONENT {
                power.rebased()
            } else {
                power
            };
            power = convolve(&base, &iter_term)?;
        }
    }

    // geometric tail estimate from the final norm ratio
    let tail_l1 = if last_weighted == 0.0 {
        0.0
    } else if ratio.is_finite() && ratio < 1.0 {
        last_weighted * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };

    let sum = GridFunction::from_values(grid, acc.basis, acc.values.clone())?;
    let (result, kernel_l1, kernel_sup) = match &spec.kernel {
        Kernel::Delta0 => {
            assert!(
                !spec.include_zeroth,
                "a δ₀ kernel cannot carry a zeroth term on the grid"
            );
            (sum.clone(), 1.0, 1.0)
        }
        Kernel::Grid(k) => {
            let conv = convolve(k, &sum)?;
            // express kernel ∗ T on the kernel's exponent basis
            let mut values: Vec<f64> = (0..grid.len())
                .map(|j| grid.node(j).powf(acc.basis + 1.0) * conv.regular_values()[j])
                .collect();
            if spec.include_zeroth {
                let w0 = match &spec.weights {
                    WeightRule::Geometric { .. } => 1.0, // folded: outer factor applies below
                    WeightRule::Explicit(w) => w(0),
                };
                for (v, kv) in values.iter_mut().zip(k.regular_values()) {
                    *v += w0 * kv;
                }
            }
            let out = GridFunction::from_values(grid, k.exponent(), values)?;
            (
                out,
                k.l1_norm(x_max),
                k.regular_values()
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (grid.node(j).powf(k.exponent()) * v).abs())
                    .fold(0.0, f64::max),
            )
        }
    };
    let result = if matches!(spec.weights, WeightRule::Geometric { .. }) {
        result.scale(outer)
    } else {
        result
    };

    let tail_bound = if tail_l1.is_finite() {
        let tail_sup = if ratio.is_finite() && ratio < 1.0 {
            last_sup * ratio / (1.0 - ratio)
        } else {
            0.0
        };
        (kernel_sup * tail_l1).min(kernel_l1 * tail_sup) * outer.abs()
    } else {
        f64::INFINITY
    };

    for t in &mut term_norms {
        *t *= outer.abs();
    }
    let report = SeriesReport {
        terms_used,
        last_term_l1: last_weighted * outer.abs(),
        tail_bound,
        converged,
        term_norms,
    };

    if !converged {
        return Err(SeriesError::NotConverged {
            terms: report.terms_used,
            last_term_l1: report.last_term_l1,
            partial: Box::new((result, report)),
        });
    }
    Ok((result, report))
}
