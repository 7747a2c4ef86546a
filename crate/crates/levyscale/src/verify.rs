//! Independent verification: numerical Laplace transforms, the defining
//! identity L[W^(q)]·(ψ − q) = 1, ruin probabilities, the κ growth
//! classifier, and brute-force discrete convolution oracles.

use crate::error::VerifyError;
use crate::grid::{Grid, GridFunction};
use crate::levy::{LevyModel, Regime};
use crate::scale::{scale_bounded_variation, ScaleOptions, ScaleTable};

/// ∫₀^(x_max) e^(−βx) f(x) dx by exact per-cell integration of the power
/// factor against midpoint regular values.
pub fn laplace_transform(f: &GridFunction, beta: f64) -> f64 {
    assert!(beta > 0.0, "laplace_transform needs beta > 0");
    f.laplace(beta)
}

/// Residuals of the defining identity |L[W](β)·(ψ(β) − q) − 1| on a
/// geometric β grid above Φ(q).
#[derive(Debug, Clone)]
pub struct LaplaceCheck {
    pub betas: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Per-β bound on the neglected tail ∫_(x_max)^∞ e^(−βx) W(x) dx,
    /// scaled by |ψ(β) − q|, using W(x) ≤ W(x_max) e^(Φ(q)(x − x_max)).
    pub truncation_bounds: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl LaplaceCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Check a computed scale table against L[W^(q)] = 1/(ψ − q).
///
/// The β grid starts at β_min = Φ(q) + max(1, 5/x_max·ln(10/τ)), which keeps
/// both the exponential growth e^(Φ(q)x) and the domain-truncation error
/// under control; the identity only holds for β > Φ(q).
pub fn verify_scale(
    model: &LevyModel,
    q: f64,
    table: &ScaleTable,
    tolerance: f64,
) -> Result<LaplaceCheck, VerifyError> {
    let phi = model.phi(q)?;
    let x_max = table.w.grid().x_max();
    let beta_min = phi + (5.0 / x_max * (10.0 / tolerance).ln()).max(1.0);
    if ((phi - beta_min) * x_max).exp() >= tolerance / 10.0 {
        return Err(VerifyError::DomainTooShort {
            x_max,
            tol: tolerance,
        });
    }
    let n_points = 12usize;
    let w_end = table.w.value(table.w.grid().len() - 1).abs();
    let mut betas = Vec::with_capacity(n_points);
    let mut residuals = Vec::with_capacity(n_points);
    let mut truncation_bounds = Vec::with_capacity(n_points);
    let ratio = 10.0f64.powf(1.0 / (n_points as f64 - 1.0));
    let mut beta = beta_min;
    let mut passed = true;
    for _ in 0..n_points {
        let lw = table.w.laplace(beta);
        let psi = model.psi(beta)?;
        let residual = (lw * (psi - q) - 1.0).abs();
        let trunc = w_end * (-beta * x_max).exp() / (beta - phi) * (psi - q).abs();
        if residual >= tolerance + trunc {
            passed = false;
        }
        betas.push(beta);
        residuals.push(residual);
        truncation_bounds.push(trunc);
        beta *= ratio;
    }
    Ok(LaplaceCheck {
        betas,
        residuals,
        truncation_bounds,
        tolerance,
        passed,
    })
}

/// Ruin probability curve r(x) = 1 − ψ'(0+)·W^(0)(x) of a bounded-variation
/// model with positive safety loading, plus ψ'(0+) itself.
pub fn ruin_curve(model: &LevyModel, grid: Grid) -> Result<(GridFunction, f64), VerifyError> {
    if model.classify()? != Regime::BoundedVariation {
        return Err(VerifyError::Levy(crate::error::LevyError::InvalidModel(
            "ruin probabilities need a bounded-variation model".into(),
        )));
    }
    let psi_prime0 = match model.c_double_prime() {
        Ok(v) => v,
        Err(_) => return Err(VerifyError::NetProfitViolated(f64::NEG_INFINITY)),
    };
    if psi_prime0 <= 0.0 {
        return Err(VerifyError::NetProfitViolated(psi_prime0));
    }
    let table = scale_bounded_variation(model, 0.0, grid, &ScaleOptions::default())
        .map_err(|e| VerifyError::Scale(Box::new(e)))?;
    let values: Vec<f64> = (0..grid.len())
        .map(|j| 1.0 - psi_prime0 * table.w.value(j))
        .collect();
    Ok((GridFunction::from_values(grid, 0.0, values)?, psi_prime0))
}

/// r(x) at a single point.
pub fn ruin_probability(model: &LevyModel, grid: Grid, x: f64) -> Result<f64, VerifyError> {
    assert!(x >= 0.0);
    let (curve, _) = ruin_curve(model, grid)?;
    Ok(curve.eval(x.max(grid.node(0))))
}

/// The κ(f) growth classifier: 2 iff |f(x)| < C x^(α−1/2) near 0 for some
/// α > 0, read off a log-log slope fit over the first decades of nodes
/// (slope > −0.5 + 0.02 margin); otherwise 1. Advisory only.
pub fn kappa_classifier(f: &GridFunction) -> u8 {
    let grid = f.grid();
    let x0 = grid.node(0);
    let hi = (100.0 * x0).min(0.5);
    let pts: Vec<(f64, f64)> = (0..grid.len())
        .map(|j| (grid.node(j), f.value(j).abs()))
        .filter(|&(x, v)| x <= hi && v > 0.0)
        .map(|(x, v)| (x.ln(), v.ln()))
        .collect();
    assert!(pts.len() >= 16, "kappa needs at least 16 nodes near 0");
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if slope > -0.5 + 0.02 {
        2
    } else {
        1
    }
}

/// Exact n-fold convolution of a pmf on {0, 1, 2, …} by direct summation;
/// entries below 1e−14 total-mass contribution are kept (no truncation
/// beyond the array bounds).
pub fn brute_force_convolution_pmf(pmf: &[f64], n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    let mut out = pmf.to_vec();
    for _ in 1..n {
        let mut next = vec![0.0; out.len() + pmf.len() - 1];
        for (i, &a) in out.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in pmf.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyModel;
    use crate::scale::{scale_gaussian, Method};
    use crate::series::SeriesReport;

    fn grid(h: f64, n: usize) -> Grid {
        Grid::new(h, n).unwrap()
    }

    #[test]
    fn laplace_examples() {
        let g = grid(1.0 / 512.0, 512 * 40);
        let f = GridFunction::from_fn(g, |x| (-x).exp());
        assert!((laplace_transform(&f, 1.0) - 0.5).abs() < 1e-6);
        let id = GridFunction::identity(g);
        assert!((laplace_transform(&id, 2.0) - 0.25).abs() < 1e-6);
        let sq = GridFunction::power(g, -0.5, 1.0).unwrap();
        assert!((laplace_transform(&sq, 1.0) - std::f64::consts::PI.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn laplace_linearity() {
        let g = grid(1.0 / 256.0, 1024);
        let f = GridFunction::from_fn(g, |x| (0.4 * x).sin() + 1.5);
        let q = GridFunction::from_fn(g, |x| (-0.3 * x).exp());
        let combo = f.scale(2.0).add(&q.scale(-0.7)).unwrap();
        for &beta in &[0.7, 2.0, 9.0] {
            let lhs = laplace_transform(&combo, beta);
            let rhs = 2.0 * laplace_transform(&f, beta) - 0.7 * laplace_transform(&q, beta);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "beta={beta}");
        }
    }

    #[test]
    fn convolution_theorem_within_budget() {
        let g = grid(1.0 / 256.0, 2048);
        // compactly supported inputs keep the truncation error out
        let f = GridFunction::from_fn(g, |x| if x < 1.0 { 1.0 - x } else { 0.0 });
        let q = GridFunction::from_fn(g, |x| if x < 2.0 { (-x).exp() } else { 0.0 });
        let c = crate::grid::convolve(&f, &q).unwrap();
        for &beta in &[1.0, 3.0] {
            let lhs = laplace_transform(&c, beta);
            let rhs = laplace_transform(&f, beta) * laplace_transform(&q, beta);
            assert!((lhs - rhs).abs() < 1e-5, "beta={beta}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn derivative_rule_within_budget() {
        // L[f'](β) = βL[f](β) − f(0+) for smooth compactly supported f
        let g = grid(1.0 / 512.0, 4096);
        let f = GridFunction::from_fn(g, |x| (-x * x).exp());
        let df = f.derivative();
        for &beta in &[1.0, 2.5] {
            let lhs = laplace_transform(&df, beta);
            let rhs = beta * laplace_transform(&f, beta) - 1.0;
            assert!((lhs - rhs).abs() < 1e-4, "beta={beta}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn verify_brownian_closed_form_table() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let g = grid(1.0 / 256.0, 256 * 50);
        let table = ScaleTable {
            fingerprint: m.fingerprint(),
            q: 0.0,
            grid: g,
            w: GridFunction::identity(g),
            regime: Regime::Gaussian,
            report: SeriesReport::exact(1),
            method: Method::ClosedBrownian,
        };
        let check = verify_scale(&m, 0.0, &table, 1e-2).unwrap();
        assert!(check.passed, "residuals {:?}", check.residuals);
    }

    #[test]
    fn verify_stable_closed_form_table() {
        let m = LevyModel::stable(1.5).unwrap();
        let g = grid(1.0 / 1024.0, 1024 * 50);
        let w = GridFunction::power(g, 0.5, 1.0 / crate::special::gamma(1.5)).unwrap();
        let table = ScaleTable {
            fingerprint: m.fingerprint(),
            q: 0.0,
            grid: g,
            w,
            regime: Regime::UnboundedVariationNoGaussian,
            report: SeriesReport::exact(1),
            method: Method::ClosedStable,
        };
        let check = verify_scale(&m, 0.0, &table, 1e-2).unwrap();
        assert!(check.passed, "residuals {:?}", check.residuals);
    }

    #[test]
    fn verify_rejects_perturbed_tables() {
        // a 5% multiplicative error must fail with residual ≈ 0.05
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let g = grid(1.0 / 256.0, 256 * 50);
        let table = ScaleTable {
            fingerprint: m.fingerprint(),
            q: 0.0,
            grid: g,
            w: GridFunction::identity(g).scale(1.05),
            regime: Regime::Gaussian,
            report: SeriesReport::exact(1),
            method: Method::ClosedBrownian,
        };
        let check = verify_scale(&m, 0.0, &table, 1e-2).unwrap();
        assert!(!check.passed);
        for r in &check.residuals {
            assert!((r - 0.05).abs() < 5e-3, "residual {r}");
        }
    }

    #[test]
    fn verify_adapts_beta_range_to_short_domains() {
        // x_max = 1 pushes β_min to ~34; the grid must resolve e^(−βx),
        // so the step has to shrink accordingly
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let g = grid(1.0 / 4096.0, 4096); // x_max = 1
        let table = ScaleTable {
            fingerprint: m.fingerprint(),
            q: 0.0,
            grid: g,
            w: GridFunction::identity(g),
            regime: Regime::Gaussian,
            report: SeriesReport::exact(1),
            method: Method::ClosedBrownian,
        };
        let check = verify_scale(&m, 0.0, &table, 1e-2).unwrap();
        assert!(check.passed, "residuals {:?}", check.residuals);
    }

    #[test]
    fn gaussian_series_table_verifies() {
        let m = LevyModel::brownian(1.0, 1.0).unwrap();
        let g = grid(1.0 / 512.0, 512 * 8);
        let t = scale_gaussian(&m, 0.5, g, &ScaleOptions::default()).unwrap();
        let check = verify_scale(&m, 0.5, &t, 1e-2).unwrap();
        assert!(check.passed, "residuals {:?}", check.residuals);
    }

    #[test]
    fn ruin_probability_cramer_lundberg() {
        let m = LevyModel::compound_poisson_exp(2.0, 1.0, 1.0).unwrap();
        let g = grid(1.0 / 1024.0, 1024 * 12);
        let (curve, loading) = ruin_curve(&m, g).unwrap();
        assert!((loading - 1.0).abs() < 1e-9);
        // r(0) = λμ/c' = 0.5; r(2) = 0.5 e^(−1)
        assert!((curve.value(0) - 0.5).abs() < 1e-3);
        assert!((curve.eval(2.0) - 0.5 * (-1.0f64).exp()).abs() < 1e-4);
        // bounds and monotonicity
        let mut prev = 1.0;
        for j in 0..g.len() {
            let r = curve.value(j);
            assert!((-1e-9..=1.0 + 1e-9).contains(&r));
            assert!(r <= prev + 1e-9);
            prev = r;
        }
        assert!(curve.value(g.len() - 1) < curve.value(0));
    }

    #[test]
    fn ruin_needs_net_profit() {
        let m = LevyModel::compound_poisson_exp(0.5, 1.0, 1.0).unwrap();
        let g = grid(1.0 / 128.0, 256);
        assert!(matches!(
            ruin_curve(&m, g),
            Err(VerifyError::NetProfitViolated(_))
        ));
    }

    #[test]
    fn kappa_examples() {
        let g = grid(1.0 / 1024.0, 1024);
        assert_eq!(kappa_classifier(&GridFunction::one(g)), 2);
        let inv_sqrt = GridFunction::power(g, -0.5, 1.0).unwrap();
        assert_eq!(kappa_classifier(&inv_sqrt), 1);
        let mild = GridFunction::power(g, -0.3, 1.0).unwrap();
        assert_eq!(kappa_classifier(&mild), 2);
    }

    #[test]
    fn brute_force_pmf_examples() {
        // δ₁ convolved three times is δ₃
        let d3 = brute_force_convolution_pmf(&[0.0, 1.0], 3);
        assert_eq!(d3.len(), 4);
        assert!((d3[3] - 1.0).abs() < 1e-15);
        // geometric(1/2) squared at k = 3: 2·g(1)g(2) = 0.25
        let geo: Vec<f64> = (0..40i32).map(|k| if k == 0 { 0.0 } else { 0.5f64.powi(k) }).collect();
        let g2 = brute_force_convolution_pmf(&geo, 2);
        assert!((g2[3] - 0.25).abs() < 1e-15);
        // negative binomial cross-check at a few k
        for (k, &v) in g2.iter().enumerate().take(12).skip(2) {
            let nb = (k - 1) as f64 * 0.5f64.powi(k as i32);
            assert!((v - nb).abs() < 1e-14, "k={k}");
        }
    }
}
