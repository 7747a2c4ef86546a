//! Spectrally negative Lévy models.
//!
//! A model owns a drift value under one declared convention, a Gaussian
//! coefficient σ² (the coefficient of β² in ψ), and a jump measure described
//! through its reflected tail ν̄(x) = ν([x, ∞)). Everything else — the
//! Laplace exponent in its three representations, the right inverse Φ(q),
//! integrated tails, drift-convention conversions, regime classification,
//! the large-jump truncation and the exponential change of measure — derives
//! from these.
//!
//! Convention: drift constants are mutually convertible only when the
//! corresponding moment integrals converge; conversions that diverge are
//! reported as absent (or as errors where a representation requires them).

use std::sync::Arc;

use crate::error::{GridError, LevyError};
use crate::grid::{Grid, GridFunction, MixedDistribution};
use crate::special::{gamma, gl_fixed, quad_graded0, quad_tail, upper_gamma_ext};

/// Which drift constant the model's `drift` field stores.
///
/// c is the raw triplet drift, c′ = c + ∫_(0,1) y ν(dy) the bounded-variation
/// drift, c″ = c − ∫_[1,∞) y ν(dy) = E L₁ the mean drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftConvention {
    C,
    CPrime,
    CDoublePrime,
}

/// Path regime of a spectrally negative Lévy process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Gaussian,
    BoundedVariation,
    UnboundedVariationNoGaussian,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Gaussian => write!(f, "gaussian"),
            Regime::BoundedVariation => write!(f, "bounded-variation"),
            Regime::UnboundedVariationNoGaussian => write!(f, "unbounded-variation"),
        }
    }
}

pub type TailFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Description of the reflected jump measure ν on (0, ∞).
#[derive(Clone)]
pub enum JumpMeasure {
    /// ν̄̄(x) = x^(1−α)/Γ(2−α) exactly; ψ(β) = c″β + σ²β² + β^α.
    Stable { alpha: f64 },
    /// ν = rate · law.
    CompoundPoisson { rate: f64, law: MixedDistribution },
    /// e^(−θx)-tempered stable density, `scale` multiplies the measure.
    TemperedStable { alpha: f64, theta: f64, scale: f64 },
    /// ν̄ given on a grid (locally integrable tails only, i.e. bounded
    /// variation); the integrated tail is precomputed at construction and
    /// the measure is treated as supported on [0, x_max].
    TabulatedTail {
        tail: GridFunction,
        integrated: GridFunction,
    },
    /// ν̄ as a callable; ν̄̄ optionally supplied, otherwise integrated by
    /// adaptive quadrature. `tail_exponent` declares the power behaviour of
    /// ν̄ at 0 (0 means bounded), driving regime tests and grid bases.
    Custom {
        tail: TailFn,
        integrated_tail: Option<TailFn>,
        tail_exponent: f64,
        label: String,
    },
}

impl std::fmt::Debug for JumpMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JumpMeasure::Stable { alpha } => write!(f, "Stable(alpha={alpha})"),
            JumpMeasure::CompoundPoisson { rate, law } => {
                write!(
                    f,
                    "CompoundPoisson(rate={rate}, atoms={}, density={})",
                    law.atoms.len(),
                    law.density.is_some()
                )
            }
            JumpMeasure::TemperedStable {
                alpha,
                theta,
                scale,
            } => write!(f, "TemperedStable(alpha={alpha}, theta={theta}, scale={scale})"),
            JumpMeasure::TabulatedTail { tail, .. } => {
                write!(f, "TabulatedTail(n={})", tail.grid().len())
            }
            JumpMeasure::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// Stable density coefficient A with ν(dx) = A x^(−1−α) dx.
fn stable_density_coeff(alpha: f64) -> f64 {
    alpha * (alpha - 1.0) / gamma(2.0 - alpha)
}

/// Output of the large-jump truncation at level z (the split
/// ν = ν|_[0,z) + ν|_[z,∞) that removes any moment condition at infinity).
pub struct TruncatedMeasure {
    /// ν̄̄⁽⁰⁾(x) = ∫_[x,z) ν̄(y) dy on the grid (zero beyond z).
    pub small_integrated: GridFunction,
    /// ν restricted to [z, ∞), as atoms and/or a grid density.
    pub large: MixedDistribution,
    /// c″_z = c − ∫_[1,z) x ν(dx).
    pub c_double_prime_z: f64,
    /// ‖ν|_[z,∞)‖ = ν̄(z).
    pub mass: f64,
}

/// A spectrally negative Lévy process, immutable after construction.
#[derive(Debug, Clone)]
pub struct LevyModel {
    drift: f64,
    convention: DriftConvention,
    sigma2: f64,
    jumps: JumpMeasure,
    descriptor: String,
}

impl LevyModel {
    pub fn new(
        drift: f64,
        convention: DriftConvention,
        sigma2: f64,
        jumps: JumpMeasure,
    ) -> Result<Self, LevyError> {
        if sigma2 < 0.0 || !sigma2.is_finite() || !drift.is_finite() {
            return Err(LevyError::InvalidModel(format!(
                "sigma2 = {sigma2}, drift = {drift}"
            )));
        }
        match &jumps {
            JumpMeasure::Stable { alpha } | JumpMeasure::TemperedStable { alpha, .. } => {
                if !(*alpha > 1.0 && *alpha < 2.0) {
                    return Err(LevyError::InvalidModel(format!("alpha = {alpha}")));
                }
            }
            JumpMeasure::CompoundPoisson { rate, .. } if *rate < 0.0 => {
                return Err(LevyError::InvalidModel(format!("rate = {rate}")));
            }
            _ => {}
        }
        if let JumpMeasure::TemperedStable { theta, scale, .. } = &jumps {
            if *theta < 0.0 || *scale <= 0.0 {
                return Err(LevyError::InvalidModel(format!(
                    "theta = {theta}, scale = {scale}"
                )));
            }
        }
        let descriptor = format!("{jumps:?}");
        Ok(LevyModel {
            drift,
            convention,
            sigma2,
            jumps,
            descriptor,
        })
    }

    /// Brownian motion with drift: ψ(β) = cβ + σ²β².
    pub fn brownian(c: f64, sigma2: f64) -> Result<Self, LevyError> {
        LevyModel::new(
            c,
            DriftConvention::C,
            sigma2,
            JumpMeasure::CompoundPoisson {
                rate: 0.0,
                law: MixedDistribution::empty(),
            },
        )
    }

    /// Spectrally negative stable process with ψ(β) = β^α.
    pub fn stable(alpha: f64) -> Result<Self, LevyError> {
        LevyModel::new(
            0.0,
            DriftConvention::CDoublePrime,
            0.0,
            JumpMeasure::Stable { alpha },
        )
    }

    /// Compound Poisson with drift c′ and jump law Π (usually a probability):
    /// ψ(β) = c′β + σ²β² + rate·∫(e^(−βx) − 1)Π(dx).
    pub fn compound_poisson(
        c_prime: f64,
        sigma2: f64,
        rate: f64,
        law: MixedDistribution,
    ) -> Result<Self, LevyError> {
        LevyModel::new(
            c_prime,
            DriftConvention::CPrime,
            sigma2,
            JumpMeasure::CompoundPoisson { rate, law },
        )
    }

    /// Cramér–Lundberg model: drift c′, claim arrivals at `rate`, Exp(r)
    /// claim sizes. Tails are closed-form: ν̄(x) = λ e^(−r x).
    pub fn compound_poisson_exp(c_prime: f64, rate: f64, claim_rate: f64) -> Result<Self, LevyError> {
        if rate < 0.0 || claim_rate <= 0.0 {
            return Err(LevyError::InvalidModel(format!(
                "rate = {rate}, claim_rate = {claim_rate}"
            )));
        }
        let lam = rate;
        let r = claim_rate;
        LevyModel::new(
            c_prime,
            DriftConvention::CPrime,
            0.0,
            JumpMeasure::Custom {
                tail: Arc::new(move |x| lam * (-r * x).exp()),
                integrated_tail: Some(Arc::new(move |x| lam / r * (-r * x).exp())),
                tail_exponent: 0.0,
                label: format!("cp-exp(rate={rate}, claim_rate={claim_rate})"),
            },
        )
    }

    pub fn drift_value(&self) -> f64 {
        self.drift
    }

    pub fn drift_convention(&self) -> DriftConvention {
        self.convention
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn jumps(&self) -> &JumpMeasure {
        &self.jumps
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "{};sigma2={};drift({:?})={}",
            self.descriptor, self.sigma2, self.convention, self.drift
        )
    }

    pub fn has_jumps(&self) -> bool {
        match &self.jumps {
            JumpMeasure::CompoundPoisson { rate, law } => *rate > 0.0 && !law.is_empty(),
            _ => true,
        }
    }

    // ----- moments of the jump measure ------------------------------------

    /// ∫_(0,1) y ν(dy); `None` means divergent.
    pub fn small_jump_moment(&self) -> Option<f64> {
        match &self.jumps {
            JumpMeasure::Stable { .. } | JumpMeasure::TemperedStable { .. } => None,
            JumpMeasure::CompoundPoisson { rate, law } => {
                if *rate == 0.0 {
                    return Some(0.0);
                }
                let atoms: f64 = law
                    .atoms
                    .iter()
                    .filter(|&&(l, _)| l < 1.0)
                    .map(|&(l, m)| l * m)
                    .sum();
                let dens: f64 = law
                    .density
                    .as_ref()
                    .map(|d| {
                        let g = d.grid();
                        (0..g.len())
                            .map(|j| {
                                let y = g.node(j);
                                if y < 1.0 {
                                    y * d.value(j) * g.step()
                                } else {
                                    0.0
                                }
                            })
                            .sum()
                    })
                    .unwrap_or(0.0);
                Some(rate * (atoms + dens))
            }
            JumpMeasure::TabulatedTail { tail, .. } => {
                // s > −1 is enforced by the grid type, so this is finite
                let up = 1.0f64.min(tail.grid().x_max());
                Some(tail.l1_norm(up) - self.tail(1.0))
            }
            JumpMeasure::Custom {
                tail,
                tail_exponent,
                ..
            } => {
                if *tail_exponent <= -1.0 {
                    return None;
                }
                if *tail_exponent == 0.0 && !self.custom_small_moment_converges(tail) {
                    return None;
                }
                let int = quad_graded0(|y| tail(y), 1.0, 1e-11);
                Some(int - tail(1.0))
            }
        }
    }

    /// Panel-decay probe: ∫₀¹ ν̄ converges iff the dyadic panel sums decay
    /// geometrically (constant panels mean y^(−1)-type growth).
    fn custom_small_moment_converges(&self, tail: &TailFn) -> bool {
        let mut hi = 1.0;
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let lo = hi * 0.5;
            let panel = gl_fixed(|y| tail(y), lo, hi, 8);
            if k > 10 && panel > 0.98 * prev {
                return false;
            }
            if k > 10 && panel < 1e-14 * prev.max(1.0) {
                return true;
            }
            prev = panel;
            hi = lo;
        }
        true
    }

    /// ∫_[1,∞) y ν(dy) = ν̄(1) + ν̄̄(1); `None` means divergent.
    pub fn large_jump_mean(&self) -> Option<f64> {
        match &self.jumps {
            JumpMeasure::Stable { alpha } => Some(alpha / gamma(2.0 - alpha)),
            JumpMeasure::TemperedStable { .. } => {
                Some(self.tail(1.0) + self.integrated_tail_unchecked(1.0))
            }
            JumpMeasure::CompoundPoisson { rate, law } => {
                let atoms: f64 = law
                    .atoms
                    .iter()
                    .filter(|&&(l, _)| l >= 1.0)
                    .map(|&(l, m)| l * m)
                    .sum();
                let dens: f64 = law
                    .density
                    .as_ref()
                    .map(|d| {
                        let g = d.grid();
                        (0..g.len())
                            .map(|j| {
                                let y = g.node(j);
                                if y >= 1.0 {
                                    y * d.value(j) * g.step()
                                } else {
                                    0.0
                                }
                            })
                            .sum()
                    })
                    .unwrap_or(0.0);
                Some(rate * (atoms + dens))
            }
            JumpMeasure::TabulatedTail { tail, integrated } => {
                Some(tail.eval(1.0) + integrated.eval(1.0))
            }
            JumpMeasure::Custom {
                tail,
                integrated_tail,
                ..
            } => {
                if let Some(it) = integrated_tail {
                    return Some(tail(1.0) + it(1.0));
                }
                quad_tail(|y| tail(y), 1.0, 1e-11).map(|ibar| tail(1.0) + ibar)
            }
        }
    }

    // ----- drift constants -------------------------------------------------

    /// Every drift convention whose conversion integral converges.
    pub fn drift_constants(&self) -> (Option<f64>, Option<f64>, Option<f64>) {
        let sjm = self.small_jump_moment();
        let ljm = self.large_jump_mean();
        let (c, cp, cpp) = match self.convention {
            DriftConvention::C => {
                let c = Some(self.drift);
                (c, sjm.map(|m| self.drift + m), ljm.map(|m| self.drift - m))
            }
            DriftConvention::CPrime => {
                let c = sjm.map(|m| self.drift - m);
                (c, Some(self.drift), c.and_then(|c| ljm.map(|m| c - m)))
            }
            DriftConvention::CDoublePrime => {
                let c = ljm.map(|m| self.drift + m);
                (c, c.and_then(|c| sjm.map(|m| c + m)), Some(self.drift))
            }
        };
        (c, cp, cpp)
    }

    pub fn c_raw(&self) -> Result<f64, LevyError> {
        self.drift_constants().0.ok_or_else(|| {
            LevyError::NonConvergentIntegral("conversion to the raw drift c diverges".into())
        })
    }

    pub fn c_prime(&self) -> Result<f64, LevyError> {
        self.drift_constants().1.ok_or_else(|| {
            LevyError::NonConvergentIntegral(
                "small-jump moment diverges; c' is not defined".into(),
            )
        })
    }

    /// c″ = E L₁ = ψ'(0+) whenever the first moment is finite.
    pub fn c_double_prime(&self) -> Result<f64, LevyError> {
        self.drift_constants().2.ok_or_else(|| {
            LevyError::NonConvergentIntegral(
                "large-jump mean diverges; c'' is not defined".into(),
            )
        })
    }

    // ----- tails ------------------------------------------------------------

    /// ν̄(x) = ν([x, ∞)) for x > 0.
    pub fn tail(&self, x: f64) -> f64 {
        assert!(x > 0.0, "tail needs x > 0");
        match &self.jumps {
            JumpMeasure::Stable { alpha } => {
                (alpha - 1.0) / gamma(2.0 - alpha) * x.powf(-alpha)
            }
            JumpMeasure::TemperedStable {
                alpha,
                theta,
                scale,
            } => {
                if *theta == 0.0 {
                    return scale * (alpha - 1.0) / gamma(2.0 - alpha) * x.powf(-alpha);
                }
                // ∫_x^∞ e^(−θy) A y^(−1−α) dy = A θ^α Γ(−α, θx)
                let a = stable_density_coeff(*alpha);
                scale * a * theta.powf(*alpha) * upper_gamma_ext(-alpha, theta * x)
            }
            JumpMeasure::CompoundPoisson { rate, law } => rate * law.tail(x),
            JumpMeasure::TabulatedTail { tail, .. } => {
                if x >= tail.grid().x_max() {
                    0.0
                } else {
                    tail.eval(x)
                }
            }
            JumpMeasure::Custom { tail, .. } => tail(x),
        }
    }

    fn integrated_tail_unchecked(&self, x: f64) -> f64 {
        match &self.jumps {
            JumpMeasure::Stable { alpha } => x.powf(1.0 - alpha) / gamma(2.0 - alpha),
            JumpMeasure::TemperedStable {
                alpha,
                theta,
                scale,
            } => {
                if *theta == 0.0 {
                    return scale * x.powf(1.0 - alpha) / gamma(2.0 - alpha);
                }
                // ν̄̄(x) = A θ^(α−1) Γ(1−α, θx) − A θ^α x Γ(−α, θx)
                let a = stable_density_coeff(*alpha);
                let z = theta * x;
                scale
                    * a
                    * (theta.powf(alpha - 1.0) * upper_gamma_ext(1.0 - alpha, z)
                        - theta.powf(*alpha) * x * upper_gamma_ext(-alpha, z))
            }
            JumpMeasure::CompoundPoisson { rate, law } => rate * law.integrated_tail(x),
            JumpMeasure::TabulatedTail { integrated, .. } => {
                if x >= integrated.grid().x_max() {
                    0.0
                } else {
                    integrated.eval(x)
                }
            }
            JumpMeasure::Custom {
                tail,
                integrated_tail,
                ..
            } => match integrated_tail {
                Some(it) => it(x),
                None => quad_tail(|y| tail(y), x, 1e-11).unwrap_or(f64::INFINITY),
            },
        }
    }

    /// ν̄̄(x) = ∫_[x,∞) ν̄(y) dy for x > 0; requires a finite first moment.
    pub fn integrated_tail(&self, x: f64) -> Result<f64, LevyError> {
        assert!(x > 0.0, "integrated_tail needs x > 0");
        if self.large_jump_mean().is_none() {
            return Err(LevyError::NonConvergentIntegral(
                "first moment diverges; the integrated tail is infinite".into(),
            ));
        }
        Ok(self.integrated_tail_unchecked(x))
    }

    /// Power behaviour of ν̄ at the origin (0 for bounded tails).
    pub fn tail_origin_exponent(&self) -> f64 {
        match &self.jumps {
            JumpMeasure::Stable { alpha } | JumpMeasure::TemperedStable { alpha, .. } => -alpha,
            JumpMeasure::CompoundPoisson { .. } => 0.0,
            JumpMeasure::TabulatedTail { tail, .. } => tail.exponent(),
            JumpMeasure::Custom { tail_exponent, .. } => *tail_exponent,
        }
    }

    /// ν̄ sampled on a grid with its origin exponent; errors when ν̄ is not
    /// locally integrable (unbounded-variation small jumps).
    pub fn tail_grid(&self, grid: Grid) -> Result<GridFunction, LevyError> {
        let s = self.tail_origin_exponent();
        if s <= -1.0 {
            return Err(LevyError::NonConvergentIntegral(
                "tail is not locally integrable on this grid".into(),
            ));
        }
        match &self.jumps {
            JumpMeasure::Stable { .. } => unreachable!("stable tails have exponent ≤ −1"),
            JumpMeasure::TabulatedTail { tail, .. } => {
                if tail.grid() == grid {
                    Ok(tail.clone())
                } else {
                    GridFunction::from_regular_fn(grid, tail.exponent(), |x| {
                        if x >= tail.grid().x_max() {
                            0.0
                        } else {
                            tail.eval(x) / x.powf(tail.exponent())
                        }
                    })
                    .map_err(grid_err)
                }
            }
            _ => GridFunction::from_regular_fn(grid, s, |x| {
                let t = self.tail(x);
                if s == 0.0 {
                    t
                } else {
                    t / x.powf(s)
                }
            })
            .map_err(grid_err),
        }
    }

    /// ν̄̄ sampled on a grid, with exponent s_ν̄ + 1 when ν̄̄(0+) = ∞.
    pub fn integrated_tail_grid(&self, grid: Grid) -> Result<GridFunction, LevyError> {
        if self.large_jump_mean().is_none() {
            return Err(LevyError::NonConvergentIntegral(
                "first moment diverges; the integrated tail is infinite".into(),
            ));
        }
        let s_tail = self.tail_origin_exponent();
        let s = if s_tail <= -1.0 { s_tail + 1.0 } else { 0.0 };
        match &self.jumps {
            JumpMeasure::Stable { alpha } => {
                GridFunction::power(grid, 1.0 - alpha, 1.0 / gamma(2.0 - alpha)).map_err(grid_err)
            }
            _ => GridFunction::from_regular_fn(grid, s, |x| {
                let v = self.integrated_tail_unchecked(x);
                if s == 0.0 {
                    v
                } else {
                    v / x.powf(s)
                }
            })
            .map_err(grid_err),
        }
    }

    // ----- classification ---------------------------------------------------

    /// Gaussian / bounded variation / unbounded variation; errors when the
    /// model has monotone paths (σ² = 0, summable jumps and c′ ≤ 0).
    pub fn classify(&self) -> Result<Regime, LevyError> {
        if self.sigma2 > 0.0 {
            return Ok(Regime::Gaussian);
        }
        match self.small_jump_moment() {
            Some(_) => {
                let cp = self.c_prime()?;
                if cp <= 0.0 {
                    return Err(LevyError::SubordinatorExcluded(format!(
                        "sigma2 = 0 and c' = {cp} <= 0"
                    )));
                }
                Ok(Regime::BoundedVariation)
            }
            None => Ok(Regime::UnboundedVariationNoGaussian),
        }
    }

    // ----- Laplace exponent --------------------------------------------------

    /// ∫(1 − e^(−βx)) ν(dx) = β L[ν̄](β); needs bounded-variation jumps.
    fn jump_bv_part(&self, beta: f64) -> Result<f64, LevyError> {
        match &self.jumps {
            JumpMeasure::Stable { .. } | JumpMeasure::TemperedStable { .. } => {
                Err(LevyError::NonConvergentIntegral(
                    "small jumps are not summable; no bounded-variation form".into(),
                ))
            }
            JumpMeasure::CompoundPoisson { rate, law } => {
                let atoms: f64 = law
                    .atoms
                    .iter()
                    .map(|&(l, m)| m * (-(-beta * l).exp_m1()))
                    .sum();
                let dens: f64 = law
                    .density
                    .as_ref()
                    .map(|d| {
                        let g = d.grid();
                        (0..g.len())
                            .map(|j| d.value(j) * (-(-beta * g.node(j)).exp_m1()) * g.step())
                            .sum()
                    })
                    .unwrap_or(0.0);
                Ok(rate * (atoms + dens))
            }
            JumpMeasure::TabulatedTail { tail, .. } => Ok(beta * tail.laplace(beta)),
            JumpMeasure::Custom {
                tail,
                tail_exponent,
                ..
            } => {
                if *tail_exponent <= -1.0 {
                    return Err(LevyError::NonConvergentIntegral(
                        "small jumps are not summable; no bounded-variation form".into(),
                    ));
                }
                let head = quad_graded0(|y| (-beta * y).exp() * tail(y), 1.0, 1e-12);
                let tail_part = quad_tail(|y| (-beta * y).exp() * tail(y), 1.0, 1e-12)
                    .ok_or_else(|| {
                        LevyError::NonConvergentIntegral("Laplace tail of ν̄ diverges".into())
                    })?;
                Ok(beta * (head + tail_part))
            }
        }
    }

    /// ∫(e^(−βx) − 1 + βx) ν(dx) = β² L[ν̄̄](β); needs a finite first moment.
    fn jump_mean_part(&self, beta: f64) -> Result<f64, LevyError> {
        match &self.jumps {
            JumpMeasure::Stable { alpha } => Ok(beta.powf(*alpha)),
            JumpMeasure::TemperedStable {
                alpha,
                theta,
                scale,
            } => Ok(scale
                * ((beta + theta).powf(*alpha)
                    - theta.powf(*alpha)
                    - *alpha * theta.powf(alpha - 1.0) * beta)),
            JumpMeasure::CompoundPoisson { rate, law } => {
                let atoms: f64 = law
                    .atoms
                    .iter()
                    .map(|&(l, m)| m * ((-beta * l).exp_m1() + beta * l))
                    .sum();
                let dens: f64 = law
                    .density
                    .as_ref()
                    .map(|d| {
                        let g = d.grid();
                        (0..g.len())
                            .map(|j| {
                                let y = g.node(j);
                                d.value(j) * ((-beta * y).exp_m1() + beta * y) * g.step()
                            })
                            .sum()
                    })
                    .unwrap_or(0.0);
                Ok(rate * (atoms + dens))
            }
            JumpMeasure::TabulatedTail { tail, .. } => {
                // β ∫ (1 − e^(−βy)) ν̄(y) dy = β (‖ν̄‖₁ − L[ν̄](β))
                let total = tail.l1_norm(tail.grid().x_max());
                Ok(beta * (total - tail.laplace(beta)))
            }
            JumpMeasure::Custom { tail, .. } => {
                if self.large_jump_mean().is_none() {
                    return Err(LevyError::NonConvergentIntegral(
                        "first moment diverges; no mean form".into(),
                    ));
                }
                let head =
                    quad_graded0(|y| -(-beta * y).exp_m1() * tail(y), 1.0, 1e-12);
                let tail_part = quad_tail(|y| -(-beta * y).exp_m1() * tail(y), 1.0, 1e-12)
                    .ok_or_else(|| {
                        LevyError::NonConvergentIntegral("tail moment integral diverges".into())
                    })?;
                Ok(beta * (head + tail_part))
            }
        }
    }

    /// ∫(e^(−βx) − 1 + βx·1_(0,1)(x)) ν(dx): the raw compensated integral,
    /// convergent for every Lévy measure.
    fn jump_raw_part(&self, beta: f64) -> f64 {
        // ∫_(0,1)(e^(−βx) − 1 + βx) ν(dx) = β ∫₀¹ (1 − e^(−βt)) (ν̄(t) − ν̄(1)) dt
        let nu1 = self.tail(1.0);
        let head = beta
            * quad_graded0(
                |t| -(-beta * t).exp_m1() * (self.tail(t) - nu1),
                1.0,
                1e-12,
            );
        // ∫_[1,∞)(e^(−βx) − 1) ν(dx) = (e^(−β) − 1) ν̄(1) − β ∫₁^∞ e^(−βt) ν̄(t) dt
        let tail_int = quad_tail(|t| (-beta * t).exp() * self.tail(t), 1.0, 1e-12)
            .unwrap_or(0.0);
        head + (-beta).exp_m1() * nu1 - beta * tail_int
    }

    /// ψ(β) = c′β + σ²β² − βL[ν̄](β); requires bounded-variation jumps.
    pub fn psi_bv_form(&self, beta: f64) -> Result<f64, LevyError> {
        let cp = self.c_prime()?;
        Ok(cp * beta + self.sigma2 * beta * beta - self.jump_bv_part(beta)?)
    }

    /// ψ(β) = c″β + σ²β² + β²L[ν̄̄](β); requires a finite first moment.
    pub fn psi_mean_form(&self, beta: f64) -> Result<f64, LevyError> {
        let cpp = self.c_double_prime()?;
        Ok(cpp * beta + self.sigma2 * beta * beta + self.jump_mean_part(beta)?)
    }

    /// ψ(β) = cβ + σ²β² + ∫(e^(−βx) − 1 + βx·1_(0,1))ν(dx).
    pub fn psi_raw_form(&self, beta: f64) -> Result<f64, LevyError> {
        let c = self.c_raw()?;
        Ok(c * beta + self.sigma2 * beta * beta + self.jump_raw_part(beta))
    }

    /// The Laplace exponent, using the representation matching the regime.
    pub fn psi(&self, beta: f64) -> Result<f64, LevyError> {
        assert!(beta >= 0.0, "psi needs beta >= 0");
        if beta == 0.0 {
            return Ok(0.0);
        }
        if self.small_jump_moment().is_some() && self.convention == DriftConvention::CPrime {
            return self.psi_bv_form(beta);
        }
        if self.large_jump_mean().is_some() {
            if let Ok(v) = self.psi_mean_form(beta) {
                return Ok(v);
            }
        }
        if self.small_jump_moment().is_some() {
            if let Ok(v) = self.psi_bv_form(beta) {
                return Ok(v);
            }
        }
        self.psi_raw_form(beta)
    }

    /// ψ'(β) by a centered difference; ψ'(0+) is c″ and is served exactly.
    pub fn psi_prime(&self, beta: f64) -> Result<f64, LevyError> {
        if beta == 0.0 {
            return self.c_double_prime();
        }
        let d = 1e-6 * (1.0 + beta);
        let lo = (beta - d).max(0.0);
        Ok((self.psi(beta + d)? - self.psi(lo)?) / (beta + d - lo))
    }

    /// Φ(q) = sup{ y : ψ(y) = q }: bracket by doubling, then bisect to
    /// 1e−13 absolute on β.
    pub fn phi(&self, q: f64) -> Result<f64, LevyError> {
        assert!(q >= 0.0, "phi needs q >= 0");
        const CAP: f64 = 1e12;
        let mut hi = 1.0;
        while self.psi(hi)? <= q {
            hi *= 2.0;
            if hi > CAP {
                return Err(LevyError::RootNotBracketed { q, cap: CAP });
            }
        }
        let mut lo = 0.0;
        if q == 0.0 {
            // ψ'(0+) ≥ 0 means Φ(0) = 0; otherwise ψ dips below zero
            match self.c_double_prime() {
                Ok(cpp) if cpp >= 0.0 => return Ok(0.0),
                _ => {
                    let mut t = hi * 0.5;
                    loop {
                        if self.psi(t)? < 0.0 {
                            lo = t;
                            break;
                        }
                        t *= 0.5;
                        if t < 1e-300 {
                            return Ok(0.0);
                        }
                    }
                }
            }
        }
        for _ in 0..500 {
            if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.psi(mid)? <= q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    // ----- measure truncation -------------------------------------------------

    /// Split ν at z ≥ 1 into the restriction ν|_[z,∞) and a small-jump part
    /// carried by the restricted measure's integrated tail
    /// ν̄̄⁽⁰⁾(x) = ∫_[x,z) (ν̄(y) − ν̄(z)) dy. The −ν̄(z) offset makes the
    /// reconstruction ψ = c″_z β + σ²β² + β²L[ν̄̄⁽⁰⁾] + L[ν∞] − ‖ν∞‖ exact;
    /// without it the split double-counts the tail mass below z.
    pub fn truncate_measure(&self, z: f64, grid: Grid) -> Result<TruncatedMeasure, LevyError> {
        if z < 1.0 {
            return Err(LevyError::InvalidModel(format!("truncation level z = {z} < 1")));
        }
        let mass = self.tail(z);

        let s_tail = self.tail_origin_exponent();
        let s_out = if s_tail <= -1.0 { s_tail + 1.0 } else { 0.0 };
        let n = grid.len();
        let mut vals = vec![0.0; n];
        if self.large_jump_mean().is_some() {
            // ν̄̄ is finite: ν̄̄⁽⁰⁾(x) = (ν̄̄(x) − ν̄̄(z)) − ν̄(z)(z − x),
            // exact through the family tails (this also respects jump
            // discontinuities of atomic measures).
            let iiz = self.integrated_tail_unchecked(z);
            for (j, v) in vals.iter_mut().enumerate() {
                let x = grid.node(j);
                if x >= z {
                    continue;
                }
                let val = (self.integrated_tail_unchecked(x) - iiz) - mass * (z - x);
                *v = if s_out == 0.0 { val } else { val / x.powf(s_out) };
            }
        } else {
            // infinite first moment: accumulate ∫(ν̄ − ν̄(z)) backward from z;
            // every inter-node gap avoids the origin so a fixed rule per gap
            // is accurate.
            let mut upper = z.min(grid.x_max());
            let mut acc = if z > grid.x_max() {
                gl_fixed(|y| self.tail(y) - mass, grid.x_max(), z, 24)
            } else {
                0.0
            };
            let mut j = n;
            while j > 0 {
                j -= 1;
                let x = grid.node(j);
                if x >= upper {
                    vals[j] = 0.0;
                    continue;
                }
                acc += gl_fixed(|y| self.tail(y) - mass, x, upper, 8);
                vals[j] = if s_out == 0.0 { acc } else { acc / x.powf(s_out) };
                upper = x;
            }
        }
        let small_integrated = GridFunction::from_values(grid, s_out, vals).map_err(grid_err)?;

        // restriction ν|_[z,∞)
        let large = match &self.jumps {
            JumpMeasure::CompoundPoisson { rate, law } => {
                let atoms: Vec<(f64, f64)> = law
                    .atoms
                    .iter()
                    .filter(|&&(l, _)| l >= z)
                    .map(|&(l, m)| (l, rate * m))
                    .collect();
                let density = match &law.density {
                    Some(d) => {
                        let g = d.grid();
                        let vals: Vec<f64> = (0..g.len())
                            .map(|j| if g.node(j) >= z { rate * d.value(j) } else { 0.0 })
                            .collect();
                        Some(GridFunction::from_values(g, 0.0, vals).map_err(grid_err)?)
                    }
                    None => None,
                };
                MixedDistribution { atoms, density }
            }
            _ => {
                // density −ν̄'(x) on [z, ∞) sampled on the grid
                let d = 1e-5 * z;
                let vals: Vec<f64> = (0..n)
                    .map(|j| {
                        let x = grid.node(j);
                        if x >= z {
                            (self.tail(x - d) - self.tail(x + d)) / (2.0 * d)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                MixedDistribution::with_density(
                    GridFunction::from_values(grid, 0.0, vals).map_err(grid_err)?,
                )
            }
        };

        // c″_z = c − ∫_[1,z) x ν(dx)
        let c_double_prime_z = match self.c_double_prime() {
            Ok(cpp) => cpp + z * self.tail(z) + self.integrated_tail_unchecked(z),
            Err(_) => {
                // c exists even without a first moment; subtract the finite piece
                let c = self.c_raw()?;
                let int_1z = (self.tail(1.0) - self.tail(z))
                    + gl_fixed(|t| self.tail(t) - self.tail(z), 1.0, z, 24);
                c - int_1z
            }
        };

        Ok(TruncatedMeasure {
            small_integrated,
            large,
            c_double_prime_z,
            mass,
        })
    }

    // ----- exponential change of measure ---------------------------------------

    /// The tilted model under e^(Φ(q)·x): ψ_Φ(β) = ψ(β + φ) − ψ(φ),
    /// ν_Φ(dx) = e^(−φx) ν(dx). BV models keep c′; otherwise the tilted
    /// model gets the mean convention c″_Φ = ψ'(φ).
    pub fn tilted(&self, phi: f64, grid: Grid) -> Result<LevyModel, LevyError> {
        assert!(phi >= 0.0);
        if phi == 0.0 {
            return Ok(self.clone());
        }
        let jumps = match &self.jumps {
            JumpMeasure::Stable { alpha } => JumpMeasure::TemperedStable {
                alpha: *alpha,
                theta: phi,
                scale: 1.0,
            },
            JumpMeasure::TemperedStable {
                alpha,
                theta,
                scale,
            } => JumpMeasure::TemperedStable {
                alpha: *alpha,
                theta: theta + phi,
                scale: *scale,
            },
            JumpMeasure::CompoundPoisson { rate, law } => {
                let atoms: Vec<(f64, f64)> = law
                    .atoms
                    .iter()
                    .map(|&(l, m)| (l, m * (-phi * l).exp()))
                    .collect();
                let density = match &law.density {
                    Some(d) => {
                        let vals: Vec<f64> = (0..d.grid().len())
                            .map(|j| d.regular_values()[j] * (-phi * d.grid().node(j)).exp())
                            .collect();
                        Some(
                            GridFunction::from_values(d.grid(), d.exponent(), vals)
                                .map_err(grid_err)?,
                        )
                    }
                    None => None,
                };
                let tilted_law = MixedDistribution { atoms, density };
                let m = tilted_law.total_mass();
                if m == 0.0 {
                    JumpMeasure::CompoundPoisson {
                        rate: 0.0,
                        law: MixedDistribution::empty(),
                    }
                } else {
                    let norm = MixedDistribution {
                        atoms: tilted_law
                            .atoms
                            .iter()
                            .map(|&(l, w)| (l, w / m))
                            .collect(),
                        density: tilted_law.density.as_ref().map(|d| d.scale(1.0 / m)),
                    };
                    JumpMeasure::CompoundPoisson {
                        rate: rate * m,
                        law: norm,
                    }
                }
            }
            JumpMeasure::TabulatedTail { tail, .. } => {
                // ν̄_φ(x) = e^(−φx) ν̄(x) − φ ∫_x^∞ e^(−φy) ν̄(y) dy
                let g = tail.grid();
                let mut integral = vec![0.0; g.len()];
                let mut acc = 0.0;
                let mut upper = g.x_max();
                for j in (0..g.len()).rev() {
                    let x = g.node(j);
                    acc += gl_fixed(|y| (-phi * y).exp() * tail.eval(y), x, upper, 8);
                    integral[j] = acc;
                    upper = x;
                }
                let s = tail.exponent();
                let vals: Vec<f64> = (0..g.len())
                    .map(|j| {
                        let x = g.node(j);
                        (-phi * x).exp() * tail.regular_values()[j]
                            - phi * integral[j] / x.powf(s)
                    })
                    .collect();
                let new_tail = GridFunction::from_values(g, s, vals).map_err(grid_err)?;
                JumpMeasure::tabulated(new_tail)?
            }
            JumpMeasure::Custom {
                tail,
                tail_exponent,
                label,
                ..
            } => {
                let base = tail.clone();
                let t2 = base.clone();
                let tilted_tail: TailFn = Arc::new(move |x| {
                    let direct = (-phi * x).exp() * base(x);
                    let int = quad_tail(|y| (-phi * y).exp() * base(y), x, 1e-11).unwrap_or(0.0);
                    direct - phi * int
                });
                let tilted_int: TailFn = Arc::new(move |x| {
                    // ν̄̄_φ(x) = ∫_x^∞ ν̄_φ: integrate the tilted tail directly
                    let x = x.max(1e-12);
                    quad_tail(
                        |y| {
                            let direct = (-phi * y).exp() * t2(y);
                            let int =
                                quad_tail(|u| (-phi * u).exp() * t2(u), y, 1e-10).unwrap_or(0.0);
                            direct - phi * int
                        },
                        x,
                        1e-9,
                    )
                    .unwrap_or(0.0)
                });
                JumpMeasure::Custom {
                    tail: tilted_tail,
                    integrated_tail: Some(tilted_int),
                    tail_exponent: *tail_exponent,
                    label: format!("{label}|tilt({phi:.6})"),
                }
            }
        };
        let _ = grid; // grid is only needed when retabulating custom tails
        let (drift, convention) = if self.sigma2 == 0.0 && self.small_jump_moment().is_some() {
            (self.c_prime()?, DriftConvention::CPrime)
        } else {
            (self.psi_prime(phi)?, DriftConvention::CDoublePrime)
        };
        let mut out = LevyModel::new(drift, convention, self.sigma2, jumps)?;
        out.descriptor = format!("{}|tilt({:.6})", self.descriptor, phi);
        Ok(out)
    }
}

fn grid_err(e: GridError) -> LevyError {
    LevyError::InvalidModel(e.to_string())
}

impl JumpMeasure {
    /// Tabulated tail with its integrated tail precomputed; the measure is
    /// treated as supported on [0, x_max].
    pub fn tabulated(tail: GridFunction) -> Result<Self, LevyError> {
        let g = tail.grid();
        let n = g.len();
        // ∫_x^{x_max} ν̄ backward, exact per cell on the declared exponent
        let total = tail.l1_norm(g.x_max());
        let vals: Vec<f64> = (0..n).map(|j| total - tail.l1_norm(g.node(j))).collect();
        let integrated = GridFunction::from_values(g, 0.0, vals).map_err(grid_err)?;
        Ok(JumpMeasure::TabulatedTail { tail, integrated })
    }
}
