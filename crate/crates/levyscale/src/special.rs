//! Scalar special functions and small quadrature helpers.
//!
//! Only what the grid kernels and closed forms need: log-gamma (Lanczos),
//! the beta function, Gauss–Legendre nodes on [0,1], and adaptive panel
//! quadrature robust to an integrable singularity at the left endpoint.

use std::f64::consts::PI;

// Lanczos approximation, g = 7, n = 9 (Godfrey coefficients).
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // reflection keeps the Lanczos argument away from 0
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let base = x + LANCZOS_G + 0.5;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * base.ln() - base + sum.ln()
}

/// Γ(x) for x > 0, and via reflection for negative non-integer x.
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        ln_gamma(x).exp()
    } else {
        assert!(
            x.fract() != 0.0,
            "gamma undefined at non-positive integer {x}"
        );
        PI / ((PI * x).sin() * gamma(1.0 - x))
    }
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Upper incomplete gamma Γ(s, z) for s ∈ (0, 1), z > 0.
///
/// Series for the lower function at small z, Lentz continued fraction for
/// large z (the usual gser/gcf split).
pub fn upper_gamma(s: f64, z: f64) -> f64 {
    assert!(s > 0.0 && s < 1.0 && z > 0.0);
    if z < 1.5 {
        // γ(s, z) series, then Γ(s, z) = Γ(s) − γ(s, z)
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= z / (s + k);
            sum += term;
            k += 1.0;
            if k > 500.0 {
                break;
            }
        }
        let lower = (-z).exp() * z.powf(s) * sum;
        gamma(s) - lower
    } else {
        // modified Lentz for the continued fraction of Γ(s, z)
        let tiny = 1e-300;
        let mut b = z + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut f = d;
        for i in 1..300 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-z).exp() * z.powf(s) * f
    }
}

/// Γ(s, z) for s ∈ (−2, 1), s not 0 or −1, via the downward recurrence
/// Γ(s, z) = (Γ(s+1, z) − z^s e^(−z)) / s.
pub fn upper_gamma_ext(s: f64, z: f64) -> f64 {
    assert!(z > 0.0);
    if s > 0.0 {
        return upper_gamma(s, z);
    }
    (upper_gamma_ext(s + 1.0, z) - z.powf(s) * (-z).exp()) / s
}

/// Gauss–Legendre nodes and weights on [0, 1].
///
/// Computed by Newton iteration on the Legendre recurrence; accurate to
/// machine precision for the small n used here.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-style initial guess on [-1, 1]
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    // map [-1,1] -> [0,1]
    for i in 0..n {
        nodes[i] = 0.5 * (1.0 - nodes[i]);
        weights[i] *= 0.5;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Fixed Gauss–Legendre quadrature of `f` over [a, b].
pub fn gl_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (u, w) = gauss_legendre_01(n);
    let len = b - a;
    let mut acc = 0.0;
    for m in 0..n {
        acc += w[m] * f(a + len * u[m]);
    }
    acc * len
}

/// ∫₀ᵇ f, allowing an integrable singularity at 0.
///
/// Geometric panels [b·2^(−m−1), b·2^(−m)] with a fixed 12-point rule; for
/// f ~ x^(−a), a < 1, panel sums decay geometrically, so the loop stops once
/// the running contribution is below `tol` relative to the accumulated value.
pub fn quad_graded0<F: Fn(f64) -> f64>(f: F, b: f64, tol: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut hi = b;
    for _ in 0..220 {
        let lo = hi * 0.5;
        let panel = gl_fixed(&f, lo, hi, 12);
        acc += panel;
        if panel.abs() < tol * acc.abs().max(1e-300) && lo < 1e-3 * b {
            break;
        }
        hi = lo;
    }
    acc
}

/// ∫ₐ^∞ f for decaying integrands, by interval doubling.
///
/// Returns `None` when no convergence is detected within the doubling budget
/// (used as a divergence signal for moment tests).
pub fn quad_tail<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Option<f64> {
    assert!(a > 0.0, "quad_tail needs a positive left endpoint");
    let mut acc = 0.0;
    let mut lo = a;
    for _ in 0..120 {
        let hi = lo * 2.0;
        let panel = gl_fixed(&f, lo, hi, 12);
        acc += panel;
        if panel.abs() < tol * acc.abs().max(1e-300) {
            return Some(acc);
        }
        lo = hi;
    }
    None
}
