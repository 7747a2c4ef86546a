//! Acceptance suite: every exit criterion, one test per criterion, each
//! printing a PASS/FAIL line (run with `--nocapture` to see them).
//!
//! Criteria are pinned here, not calibrated elsewhere:
//!  1. Brownian oracle, rel err < 1e−3 on [0.05, 5] at h = 1/2048, < 10 s
//!  2. stable oracle (Mittag-Leffler), rel err < 1e−2 on [0.1, 2], < 60 s
//!  3. Cramér–Lundberg ruin oracle, abs err < 1e−4 on [0, 10]
//!  4. defining-identity residual < 1e−2 at x_max = 50 for all tables above
//!  5. stable resolvent residual < 1e−2 and compensated cross-check
//!  6. boundary values per regime
//!  7. tilt identity against the direct bounded-variation series
//!  8. zero-truncated Poisson recursion vs brute-force convolution
//!  9. finite roots expansion for lattice jumps
//! 10. stable + Poisson perturbation formula
//! 11. renewal solver residual and closed form
//! 12. grid-refinement order (the randomized suites live in properties.rs)

use std::time::Instant;

use levyscale::grid::{convolve, Grid, GridFunction, MixedDistribution};
use levyscale::levy::LevyModel;
use levyscale::resolvent::{resolvent_via_compensated, solve_renewal, solve_resolvent, RenewalVariant};
use levyscale::scale::{
    mittag_leffler, scale_bounded_variation, scale_brownian_closed_form, scale_gaussian,
    scale_gaussian_roots, scale_stable_closed_form, scale_unbounded_variation, tilt, ztp_mass,
    Method, ScaleOptions, ScaleTable,
};
use levyscale::series::SeriesReport;
use levyscale::verify::{brute_force_convolution_pmf, ruin_curve, verify_scale};
use levyscale::Regime;

fn grid(h: f64, x_max: f64) -> Grid {
    Grid::with_xmax(h, x_max).unwrap()
}

fn opts() -> ScaleOptions {
    ScaleOptions::default()
}

/// max relative error of `table` against `oracle` over grid nodes in [lo, hi].
fn max_rel_err(table: &GridFunction, lo: f64, hi: f64, oracle: impl Fn(f64) -> f64) -> f64 {
    let g = table.grid();
    let mut worst = 0.0f64;
    for j in 0..g.len() {
        let x = g.node(j);
        if x < lo || x > hi {
            continue;
        }
        let want = oracle(x);
        let got = table.value(j);
        worst = worst.max((got - want).abs() / want.abs().max(1e-300));
    }
    worst
}

#[test]
fn criterion_01_brownian_oracle() {
    let start = Instant::now();
    let h = 1.0 / 2048.0;
    let g = grid(h, 5.25);
    let m = LevyModel::brownian(1.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for q in [0.0, 1.0] {
        let t = scale_gaussian(&m, q, g, &opts()).unwrap();
        assert!(t.report.converged);
        let e = max_rel_err(&t.w, 0.05, 5.0, |x| scale_brownian_closed_form(1.0, 1.0, q, x));
        worst = worst.max(e);
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(worst < 1e-3, "criterion 1: FAIL (max rel err {worst:.3e})");
    assert!(dt < 10.0, "criterion 1: FAIL (runtime {dt:.1}s >= 10s)");
    println!("criterion 1 (Brownian oracle): PASS — max rel err {worst:.3e}, {dt:.2}s");
}

#[test]
fn criterion_02_stable_oracle() {
    let start = Instant::now();
    let h = 1.0 / 2048.0;
    let g = grid(h, 2.25);
    let mut worst = 0.0f64;
    for &alpha in &[1.25, 1.5, 1.75] {
        let m = LevyModel::stable(alpha).unwrap();
        for q in [0.0, 1.0] {
            let t = scale_unbounded_variation(&m, q, g, None, &opts()).unwrap();
            assert!(t.report.converged);
            let e = max_rel_err(&t.w, 0.1, 2.0, |x| scale_stable_closed_form(alpha, q, x));
            worst = worst.max(e);
        }
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(worst < 1e-2, "criterion 2: FAIL (max rel err {worst:.3e})");
    assert!(dt < 60.0, "criterion 2: FAIL (runtime {dt:.1}s >= 60s)");
    println!("criterion 2 (stable oracle): PASS — max rel err {worst:.3e}, {dt:.2}s");
}

#[test]
fn criterion_03_ruin_oracle() {
    let g = grid(1.0 / 1024.0, 10.5);
    let m = LevyModel::compound_poisson_exp(2.0, 1.0, 1.0).unwrap();
    let (curve, loading) = ruin_curve(&m, g).unwrap();
    assert!((loading - 1.0).abs() < 1e-9);
    let mut worst = 0.0f64;
    for j in 0..g.len() {
        let x = g.node(j);
        if x > 10.0 {
            break;
        }
        let want = 0.5 * (-0.5 * x).exp();
        worst = worst.max((curve.value(j) - want).abs());
    }
    assert!(worst < 1e-4, "criterion 3: FAIL (max abs err {worst:.3e})");
    println!("criterion 3 (Pollaczeck–Khintchine oracle): PASS — max abs err {worst:.3e}");
}

/// The x_max = 50 verification tables for the models of criteria 1–3,
/// computed by the regime-appropriate artifact method. The Brownian tables
/// use the roots expansion, whose single term is the exact two-exponential:
/// the alternating Gaussian series is a compact-domain tool and cancels
/// catastrophically in f64 once ‖f‖·x_max/σ² passes the exponent range.
fn verification_tables() -> Vec<(LevyModel, f64, ScaleTable)> {
    let mut out = Vec::new();
    let gb = grid(50.0 / 16384.0, 50.0);
    let mb = LevyModel::brownian(1.0, 1.0).unwrap();
    for q in [0.0, 1.0] {
        let t = scale_gaussian_roots(&mb, q, gb, &opts()).unwrap();
        out.push((mb.clone(), q, t));
    }
    let gs = grid(50.0 / 8192.0, 50.0);
    for &alpha in &[1.25, 1.5, 1.75] {
        let m = LevyModel::stable(alpha).unwrap();
        for q in [0.0, 1.0] {
            let t = scale_unbounded_variation(&m, q, gs, None, &ScaleOptions {
                max_terms: 400,
                ..opts()
            })
            .unwrap();
            out.push((m.clone(), q, t));
        }
    }
    let m = LevyModel::compound_poisson_exp(2.0, 1.0, 1.0).unwrap();
    let t = scale_bounded_variation(&m, 0.0, gs, &opts()).unwrap();
    out.push((m, 0.0, t));
    out
}

#[test]
fn criterion_04_defining_identity() {
    let mut worst = 0.0f64;
    for (m, q, t) in verification_tables() {
        let check = verify_scale(&m, q, &t, 1e-2).unwrap();
        assert!(
            check.passed,
            "criterion 4: FAIL for {} q={q}: residuals {:?}",
            m.fingerprint(),
            check.residuals
        );
        worst = worst.max(check.max_residual());
    }
    println!("criterion 4 (defining identity at x_max = 50): PASS — max residual {worst:.3e}");
}

#[test]
fn criterion_05_resolvent() {
    let h = 1.0 / 1024.0;
    let g = grid(h, 2.0);
    let mut worst_res = 0.0f64;
    let mut worst_cross = 0.0f64;
    for &alpha in &[1.25, 1.5, 1.75] {
        let m = LevyModel::stable(alpha).unwrap();
        let nubb = m.integrated_tail_grid(g).unwrap();
        let direct = solve_resolvent(&nubb, None).unwrap();
        assert!(
            direct.max_residual < 1e-2,
            "criterion 5: FAIL (alpha {alpha} residual {:.3e})",
            direct.max_residual
        );
        worst_res = worst_res.max(direct.max_residual);
        let comp = resolvent_via_compensated(&m, g, None).unwrap();
        assert!(comp.max_residual < 1e-2);
        for j in 0..g.len() {
            if g.node(j) < 3.0 * h {
                continue;
            }
            let a = direct.rho.value(j);
            let b = comp.rho.value(j);
            let rel = (a - b).abs() / a.abs().max(1e-300);
            worst_cross = worst_cross.max(rel);
        }
    }
    assert!(
        worst_cross < 1e-2,
        "criterion 5: FAIL (cross-method deviation {worst_cross:.3e})"
    );
    println!(
        "criterion 5 (resolvent): PASS — max residual {worst_res:.3e}, cross-method {worst_cross:.3e}"
    );
}

#[test]
fn criterion_06_boundary_values() {
    // bounded variation: W(0+) = 1/c'
    let m = LevyModel::compound_poisson_exp(2.0, 1.0, 1.0).unwrap();
    let g = grid(1.0 / 1024.0, 5.0);
    let t = scale_bounded_variation(&m, 0.0, g, &opts()).unwrap();
    let dev = (t.w.value(0) - 0.5).abs();
    assert!(dev < 1e-3, "criterion 6: FAIL (BV boundary dev {dev:.3e})");

    // Gaussian and UBV: W(3h) small relative to W(x_max/2), improving with h
    let mut small = Vec::new();
    for h in [1.0 / 512.0, 1.0 / 1024.0] {
        let g = grid(h, 4.0);
        let mb = LevyModel::brownian(1.0, 1.0).unwrap();
        let tb = scale_gaussian(&mb, 0.5, g, &opts()).unwrap();
        let ms = LevyModel::stable(1.5).unwrap();
        let ts = scale_unbounded_variation(&ms, 0.5, g, None, &opts()).unwrap();
        let mut pair = Vec::new();
        for t in [&tb, &ts] {
            let at3h = t.w.eval(3.0 * h).abs();
            let mid = t.w.eval(2.0).abs();
            assert!(
                at3h < 5e-2 * mid,
                "criterion 6: FAIL (W(3h) = {at3h:.3e} vs {mid:.3e})"
            );
            pair.push(at3h);
        }
        small.push(pair);
    }
    for (coarse, fine) in small[0].iter().zip(&small[1]) {
        assert!(
            fine < coarse,
            "criterion 6: FAIL (W(3h) not decreasing with h)"
        );
    }
    println!("criterion 6 (boundary values): PASS — BV dev {dev:.3e}");
}

#[test]
fn criterion_07_tilt_identity() {
    let g = grid(1.0 / 2048.0, 5.25);
    let m = LevyModel::compound_poisson_exp(2.0, 1.0, 1.0).unwrap();
    let q = 0.5;
    let direct = scale_bounded_variation(&m, q, g, &opts()).unwrap();
    let tilted = tilt(&m, q, g, &opts()).unwrap();
    assert_eq!(tilted.method, Method::Tilt);
    let mut worst = 0.0f64;
    for j in 0..g.len() {
        let x = g.node(j);
        if !(0.1..=5.0).contains(&x) {
            continue;
        }
        let a = direct.w.value(j);
        let b = tilted.w.value(j);
        worst = worst.max((a - b).abs() / a.abs().max(1e-300));
    }
    assert!(worst < 1e-3, "criterion 7: FAIL (max rel dev {worst:.3e})");
    println!("criterion 7 (tilt identity): PASS — max rel dev {worst:.3e}");
}

#[test]
fn criterion_08_ztp_combinatorics() {
    let mut worst = 0.0f64;
    for &mu in &[0.5f64, 1.0, 2.0] {
        // unnormalized truncated Poisson weights w(j) = μ^j e^(−μ)/j!, j ≥ 1
        let mut w = vec![0.0f64];
        let mut fact = 1.0;
        for j in 1..=32i32 {
            fact *= j as f64;
            w.push(mu.powi(j) * (-mu).exp() / fact);
        }
        for n in 0..=8usize {
            let brute = brute_force_convolution_pmf(&w, n);
            for k in 0..=16usize {
                let direct = ztp_mass(k, n, mu);
                let want = if n == 0 {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    brute.get(k).copied().unwrap_or(0.0)
                };
                let dev = (direct - want).abs();
                assert!(
                    dev <= 1e-12,
                    "criterion 8: FAIL (mu={mu} n={n} k={k}: {direct} vs {want})"
                );
                worst = worst.max(dev);
            }
        }
    }
    println!("criterion 8 (ZTP combinatorics): PASS — max abs dev {worst:.3e}");
}

#[test]
fn criterion_09_finite_roots_expansion() {
    let h = 1.0 / 2048.0;
    let x_max = 4.0;
    let g = grid(h, x_max);
    let m = LevyModel::compound_poisson(
        1.0,
        1.0,
        1.0,
        MixedDistribution::point_mass(1.0, 1.0),
    )
    .unwrap();
    let roots = scale_gaussian_roots(&m, 0.0, g, &opts()).unwrap();
    assert!(roots.report.converged);
    let expected_terms = x_max.floor() as usize + 1;
    assert_eq!(
        roots.report.terms_used, expected_terms,
        "criterion 9: FAIL (terms {} vs {expected_terms})",
        roots.report.terms_used
    );
    let series = scale_gaussian(&m, 0.0, g, &opts()).unwrap();
    let mut worst = 0.0f64;
    for j in 0..g.len() {
        let x = g.node(j);
        if x < 0.1 {
            continue;
        }
        let a = roots.w.value(j);
        let b = series.w.value(j);
        worst = worst.max((a - b).abs() / a.abs().max(1e-300));
    }
    assert!(worst < 1e-3, "criterion 9: FAIL (max rel dev {worst:.3e})");
    println!(
        "criterion 9 (finite roots expansion): PASS — {expected_terms} terms, max rel dev {worst:.3e}"
    );
}

#[test]
fn criterion_10_perturbation_formula() {
    let g = grid(1.0 / 1024.0, 2.0);
    let alpha = 1.5;
    let lambda = 1.0;
    let m = LevyModel::stable(alpha).unwrap();
    let base = |qq: f64| scale_unbounded_variation(&m, qq, g, None, &opts());
    let pi = MixedDistribution::point_mass(1.0, 1.0);
    let t = levyscale::scale::scale_with_cpp_perturbation(base, lambda, &pi, 0.0, g, &opts())
        .unwrap();
    let mut worst = 0.0f64;
    for j in 0..g.len() {
        let x = g.node(j);
        if x >= 1.0 {
            break;
        }
        let want = scale_stable_closed_form(alpha, lambda, x);
        worst = worst.max((t.w.value(j) - want).abs());
    }
    assert!(worst < 1e-2, "criterion 10: FAIL (max abs dev {worst:.3e})");
    println!("criterion 10 (stable + Poisson perturbation): PASS — max abs dev {worst:.3e}");
}

#[test]
fn criterion_11_renewal_solver() {
    let h = 1.0 / 512.0;
    let g = grid(h, 5.0);
    let gf = GridFunction::power(g, -0.5, std::f64::consts::PI.sqrt()).unwrap();
    let sol = solve_renewal(&gf, RenewalVariant::ViaResolvent).unwrap();
    let residual_ok = sol.residual_sup < 1e-2;
    // closed form pinned by the criterion
    let oracle = |x: f64| mittag_leffler(0.5, -x.sqrt() / std::f64::consts::PI) - 1.0;
    let mut worst = 0.0f64;
    for j in 0..g.len() {
        let x = g.node(j);
        if x < 5.0 * h {
            continue;
        }
        worst = worst.max((sol.f.value(j) - oracle(x)).abs());
    }
    let closed_ok = worst <= 2e-2;
    if residual_ok && closed_ok {
        println!(
            "criterion 11 (renewal solver): PASS — residual {:.3e}, closed-form dev {worst:.3e}",
            sol.residual_sup
        );
    } else {
        // full diagnostics: the two printed series variants are mutually
        // exclusive here — the alternating one reproduces the pinned closed
        // form but does not satisfy the equation, the proof-consistent one
        // satisfies the equation and sums to 1 − E_{1/2}(√x/π)
        for c in &sol.candidates {
            let dev = {
                let mut d = 0.0f64;
                for j in 0..g.len() {
                    let x = g.node(j);
                    if x < 5.0 * h {
                        continue;
                    }
                    d = d.max((c.f.value(j) - oracle(x)).abs());
                }
                d
            };
            println!(
                "criterion 11 diagnostics: variant '{}' — equation residual {:.3e}, dev from E_1/2(−√x/π)−1: {:.3e}",
                c.label, c.residual_sup, dev
            );
        }
        println!(
            "criterion 11 (renewal solver): FAIL — residual {:.3e} (ok: {residual_ok}), closed-form dev {worst:.3e} (ok: {closed_ok})",
            sol.residual_sup
        );
        panic!(
            "criterion 11: the residual-arbitrated solution and the pinned closed form are \
             incompatible: residual {:.3e}, closed-form dev {worst:.3e}",
            sol.residual_sup
        );
    }
}

#[test]
fn criterion_12_refinement_order() {
    // smooth convolution: error must shrink by ≥ 1.8× per halving
    let smooth_err = |n: usize| {
        let g = Grid::new(1.0 / n as f64, 2 * n).unwrap();
        let f = GridFunction::from_fn(g, |x| (-x).exp());
        let c = convolve(&f, &f).unwrap();
        let mut e = 0.0f64;
        for j in 0..g.len() {
            let x = g.node(j);
            e = e.max((c.value(j) - x * (-x).exp()).abs());
        }
        e
    };
    let s1 = smooth_err(128);
    let s2 = smooth_err(256);
    assert!(
        s1 / s2 >= 1.8,
        "criterion 12: FAIL (smooth refinement ratio {:.2})",
        s1 / s2
    );

    // singular convolution with a non-constant regular factor:
    // f = x^(-1/2)(1+x): f∗f = π + πx + (π/8)x²
    let singular_err = |n: usize| {
        let g = Grid::new(1.0 / n as f64, 2 * n).unwrap();
        let f = GridFunction::from_regular_fn(g, -0.5, |x| 1.0 + x).unwrap();
        let c = convolve(&f, &f).unwrap();
        let pi = std::f64::consts::PI;
        let mut e = 0.0f64;
        for j in 0..g.len() {
            let x = g.node(j);
            let want = pi + pi * x + pi / 8.0 * x * x;
            e = e.max((c.value(j) - want).abs());
        }
        e
    };
    let g1 = singular_err(128);
    let g2 = singular_err(256);
    assert!(
        g1 / g2 >= 1.4,
        "criterion 12: FAIL (singular refinement ratio {:.2})",
        g1 / g2
    );

    // the scale pipeline end to end (Brownian drift case)
    let pipeline_err = |h: f64| {
        let g = grid(h, 3.0);
        let m = LevyModel::brownian(1.0, 1.0).unwrap();
        let t = scale_gaussian(&m, 0.0, g, &opts()).unwrap();
        max_rel_err(&t.w, 0.1, 2.9, |x| scale_brownian_closed_form(1.0, 1.0, 0.0, x))
    };
    let p1 = pipeline_err(1.0 / 256.0);
    let p2 = pipeline_err(1.0 / 512.0);
    assert!(
        p1 / p2 >= 1.8,
        "criterion 12: FAIL (pipeline refinement ratio {:.2})",
        p1 / p2
    );
    println!(
        "criterion 12 (refinement order): PASS — smooth {:.2}×, singular {:.2}×, pipeline {:.2}×",
        s1 / s2,
        g1 / g2,
        p1 / p2
    );
}

/// Regime sanity shared by several criteria: positivity, monotonicity and
/// the regime tag recorded on each table.
#[test]
fn scale_tables_are_monotone_nonnegative() {
    let g = grid(1.0 / 512.0, 4.0);
    let tables = vec![
        scale_gaussian(&LevyModel::brownian(1.0, 1.0).unwrap(), 0.7, g, &opts()).unwrap(),
        scale_bounded_variation(
            &LevyModel::compound_poisson_exp(2.0, 1.0, 1.0).unwrap(),
            0.3,
            g,
            &opts(),
        )
        .unwrap(),
        scale_unbounded_variation(&LevyModel::stable(1.4).unwrap(), 0.5, g, None, &opts())
            .unwrap(),
    ];
    for t in &tables {
        let mut prev = -1e-9;
        for j in 0..g.len() {
            let v = t.w.value(j);
            assert!(v >= -1e-9, "{:?} negative at node {j}", t.method);
            assert!(v + 1e-9 * (1.0 + v.abs()) >= prev, "{:?} decreasing at {j}", t.method);
            prev = v;
        }
    }
    assert_eq!(tables[0].regime, Regime::Gaussian);
    assert_eq!(tables[1].regime, Regime::BoundedVariation);
    assert_eq!(tables[2].regime, Regime::UnboundedVariationNoGaussian);
    let _ = SeriesReport::exact(1);
}
