//! Product-integration convolution on the midpoint grid.
//!
//! For f = x^a·F and g = x^b·G with cellwise-constant regular factors, the
//! boundary values (f∗g)(kh) decompose into per-cell power moments
//! ∫ (kh−y)^a y^b dy. Evaluating at cell boundaries keeps each y-cell inside
//! a single f-cell, so the moments reduce to
//!
//! ```text
//! μ(i, j) = ∫₀¹ (i+1−u)^a (j+u)^b du,      i = k−1−j.
//! ```
//!
//! Interior moments (i, j ≥ 1) are analytic and a fixed Gauss–Legendre rule
//! is separable: μ(i,j) = Σ_m w_m·A_m[i]·B_m[j], which turns the whole
//! convolution into a handful of plain polynomial products. The singular
//! boundary cells (i = 0 or j = 0) are corrected with exact moments from a
//! binomial series, so the scheme is exact whenever both regular factors are
//! cellwise constant. Midpoint outputs are recovered by interpolating the
//! regular factor of the result between boundaries.

use rayon::prelude::*;

use super::{GridFunction, MixedDistribution};
use crate::error::GridError;
use crate::special::{beta, gauss_legendre_01};

const PAR_THRESHOLD: usize = 1024;

/// c[m] = Σ_{j≤m} a[m−j]·b[j] for m = 0..n−1 (truncated polynomial product).
/// Summation order per output index is fixed, so the result is independent
/// of the parallelism degree.
pub(crate) fn poly_mul_trunc(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let body = |(m, out): (usize, &mut f64)| {
        let s: f64 = a[..=m]
            .iter()
            .rev()
            .zip(&b[..=m])
            .map(|(x, y)| x * y)
            .sum();
        *out = s;
    };
    let mut out = vec![0.0; n];
    if n >= PAR_THRESHOLD {
        out.par_iter_mut().enumerate().for_each(body);
    } else {
        out.iter_mut().enumerate().for_each(body);
    }
    out
}

/// Exact ∫₀¹ (c−u)^s u^t du for c ≥ 2, by the binomial series in u/c.
/// Terminates exactly for integer s ≥ 0.
fn edge_moment(s: f64, t: f64, c: f64) -> f64 {
    debug_assert!(c >= 2.0);
    let mut acc = 0.0;
    let mut coef = 1.0; // (−1)^m · binom(s, m)
    let mut cm = 1.0; // c^(−m)
    let mut m = 0usize;
    loop {
        let term = coef * cm / (t + 1.0 + m as f64);
        acc += term;
        if m > 2 && term.abs() < 1e-18 * acc.abs().max(1e-300) {
            break;
        }
        coef *= -(s - m as f64) / (m as f64 + 1.0);
        cm /= c;
        m += 1;
        if m > 400 {
            break;
        }
    }
    c.powf(s) * acc
}

fn node_count(sf: f64, sg: f64) -> usize {
    // 12 nodes give ~1e−19 relative error for interior cells; positive
    // exponent pairs (integer powers in the roots expansion) need the rule
    // to stay exact up to the combined polynomial degree.
    let deg = sf.max(0.0) + sg.max(0.0);
    12usize.max((deg / 2.0).ceil() as usize + 3)
}

/// Queryable exact cell moments μ(i, j) for a fixed exponent pair; used by
/// the forward-substitution Volterra solver.
pub struct PowerPairMoments {
    w: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    exact_i0: Vec<f64>,
    exact_0j: Vec<f64>,
}

impl PowerPairMoments {
    /// Moments for the pair (x^sf, x^sg) on an n-cell grid.
    pub fn new(sf: f64, sg: f64, n: usize) -> Self {
        let m_nodes = node_count(sf, sg);
        let (u, w) = gauss_legendre_01(m_nodes);
        let a: Vec<Vec<f64>> = u
            .iter()
            .map(|&um| {
                (0..n)
                    .map(|i| (i as f64 + 1.0 - um).powf(sf))
                    .collect::<Vec<_>>()
            })
            .collect();
        let b: Vec<Vec<f64>> = u
            .iter()
            .map(|&um| {
                (0..n)
                    .map(|j| (j as f64 + um).powf(sg))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut exact_i0 = vec![0.0; n];
        let mut exact_0j = vec![0.0; n];
        exact_i0[0] = beta(sg + 1.0, sf + 1.0);
        exact_0j[0] = exact_i0[0];
        for i in 1..n {
            exact_i0[i] = edge_moment(sf, sg, i as f64 + 1.0);
            exact_0j[i] = edge_moment(sg, sf, i as f64 + 1.0);
        }
        PowerPairMoments {
            w,
            a,
            b,
            exact_i0,
            exact_0j,
        }
    }

    /// μ(i, j) = ∫₀¹ (i+1−u)^sf (j+u)^sg du.
    pub fn mu(&self, i: usize, j: usize) -> f64 {
        if j == 0 {
            self.exact_i0[i]
        } else if i == 0 {
            self.exact_0j[j]
        } else {
            self.w
                .iter()
                .zip(self.a.iter().zip(&self.b))
                .map(|(w, (a, b))| w * a[i] * b[j])
                .sum()
        }
    }
}

/// Boundary values (f∗g)(kh), k = 1..n, as full function values.
fn convolve_boundaries(f: &GridFunction, g: &GridFunction) -> Vec<f64> {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.step();
    let sf = f.exponent();
    let sg = g.exponent();
    let fv = f.regular_values();
    let gv = g.regular_values();

    if sf == 0.0 && sg == 0.0 {
        let mut bv = poly_mul_trunc(fv, gv);
        for v in &mut bv {
            *v *= h;
        }
        return bv;
    }

    if sg == 0.0 {
        return convolve_single_singular(h, sf, fv, gv);
    }
    if sf == 0.0 {
        return convolve_single_singular(h, sg, gv, fv);
    }

    // both factors carry a power
    let m_nodes = node_count(sf, sg);
    let (u, w) = gauss_legendre_01(m_nodes);
    let mut acc = vec![0.0; n];
    let mut gl_i0 = vec![0.0; n];
    let mut gl_0j = vec![0.0; n];
    for m in 0..m_nodes {
        let um = u[m];
        let wm = w[m];
        let am: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0 - um).powf(sf)).collect();
        let bm: Vec<f64> = (0..n).map(|j| (j as f64 + um).powf(sg)).collect();
        for i in 0..n {
            gl_i0[i] += wm * am[i] * bm[0];
            gl_0j[i] += wm * am[0] * bm[i];
        }
        let fa: Vec<f64> = fv.iter().zip(&am).map(|(x, a)| x * a).collect();
        let gb: Vec<f64> = gv.iter().zip(&bm).map(|(x, b)| x * b).collect();
        let c = poly_mul_trunc(&fa, &gb);
        for (o, ci) in acc.iter_mut().zip(&c) {
            *o += wm * ci;
        }
    }
    // exact boundary-cell corrections
    let mut exact_i0 = vec![0.0; n];
    let mut exact_0j = vec![0.0; n];
    exact_i0[0] = beta(sg + 1.0, sf + 1.0);
    for i in 1..n {
        exact_i0[i] = edge_moment(sf, sg, i as f64 + 1.0);
        exact_0j[i] = edge_moment(sg, sf, i as f64 + 1.0);
    }
    for k in 2..=n {
        let idx = k - 1;
        acc[idx] += fv[idx] * gv[0] * (exact_i0[idx] - gl_i0[idx])
            + fv[0] * gv[idx] * (exact_0j[idx] - gl_0j[idx]);
    }
    acc[0] = fv[0] * gv[0] * exact_i0[0];

    let scale = h.powf(sf + sg + 1.0);
    for v in &mut acc {
        *v *= scale;
    }
    acc
}

/// One singular factor x^s·F against a plain factor G: the per-cell power
/// moments P_i = ∫_i^(i+1) t^s dt are elementary and the sum is Toeplitz.
fn convolve_single_singular(h: f64, s: f64, fv: &[f64], gv: &[f64]) -> Vec<f64> {
    let n = fv.len();
    let sp1 = s + 1.0;
    let mut fp = vec![0.0; n];
    let mut lo = 0.0;
    for (i, fpi) in fp.iter_mut().enumerate() {
        let hi = (i as f64 + 1.0).powf(sp1);
        *fpi = fv[i] * (hi - lo) / sp1;
        lo = hi;
    }
    let mut bv = poly_mul_trunc(&fp, gv);
    let scale = h.powf(sp1);
    for v in &mut bv {
        *v *= scale;
    }
    bv
}

/// f ∗ g with origin exponent s_f + s_g + 1.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction, GridError> {
    if f.grid() != g.grid() {
        return Err(GridError::GridMismatch(format!(
            "convolve: h = {} vs {}, n = {} vs {}",
            f.grid().step(),
            g.grid().step(),
            f.grid().len(),
            g.grid().len()
        )));
    }
    let grid = f.grid();
    let n = grid.len();
    let h = grid.step();
    let s_out = f.exponent() + g.exponent() + 1.0;
    let bv = convolve_boundaries(f, g);
    // regular factor at boundaries, then interpolate to midpoints
    let mut rb = bv;
    if s_out != 0.0 {
        for (m, v) in rb.iter_mut().enumerate() {
            *v /= (h * (m as f64 + 1.0)).powf(s_out);
        }
    }
    let mut values = vec![0.0; n];
    values[0] = 1.5 * rb[0] - 0.5 * rb[1];
    for j in 1..n {
        values[j] = 0.5 * (rb[j - 1] + rb[j]);
    }
    GridFunction::from_values(grid, s_out, values)
}

/// f ∗ d for a mixed distribution d: exact shifts for atoms (δ₀ is the
/// identity and never touches the grid), grid convolution for the density.
pub fn convolve_mixed(
    f: &GridFunction,
    d: &MixedDistribution,
) -> Result<GridFunction, GridError> {
    let grid = f.grid();
    // pure point mass at 0: exact, exponent preserved
    if d.density.is_none() && d.atoms.iter().all(|&(l, _)| l == 0.0) {
        let mass: f64 = d.atoms.iter().map(|&(_, m)| m).sum();
        return Ok(f.scale(mass));
    }
    let n = grid.len();
    let h = grid.step();
    let mut acc = vec![0.0; n];
    for &(loc, mass) in &d.atoms {
        if loc == 0.0 {
            for (j, a) in acc.iter_mut().enumerate() {
                *a += mass * f.value(j);
            }
            continue;
        }
        if loc > grid.x_max() {
            continue;
        }
        let shift = loc / h;
        let m = shift.round();
        if (shift - m).abs() <= 1e-9 * (1.0 + shift) {
            // grid-aligned: x_j − loc is exactly node j−m
            let m = m as usize;
            for (j, a) in acc.iter_mut().enumerate().skip(m) {
                *a += mass * f.value(j - m);
            }
        } else {
            for (j, a) in acc.iter_mut().enumerate() {
                let y = grid.node(j) - loc;
                if y > 0.0 {
                    *a += mass * f.eval(y);
                }
            }
        }
    }
    if let Some(dens) = &d.density {
        let c = convolve(f, dens)?;
        for (j, a) in acc.iter_mut().enumerate() {
            *a += c.value(j);
        }
    }
    GridFunction::from_values(grid, 0.0, acc)
}
