//! Uniform-grid functions with origin-singularity bookkeeping.
//!
//! A [`GridFunction`] stores midpoint samples of the *regular factor* of
//! f(x) = x^s · r(x), where the origin exponent s > −1 is declared, never
//! inferred. Midpoint sampling keeps the possibly singular origin off the
//! grid. All integral operators (convolution, primitives, L¹ norms, Laplace
//! transforms) integrate the power factor exactly within each cell and hold
//! the regular factor at its midpoint value, which makes them exact whenever
//! the regular factors are cellwise constant.

mod conv;

pub use conv::{convolve, convolve_mixed, PowerPairMoments};

use crate::error::GridError;

/// Uniform grid with N midpoints x_j = (j + 1/2)·h, j = 0..N−1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    h: f64,
    n: usize,
}

impl Grid {
    pub fn new(h: f64, n: usize) -> Result<Self, GridError> {
        if h <= 0.0 || !h.is_finite() {
            return Err(GridError::InvalidGrid(format!("step {h}")));
        }
        if n < 2 {
            return Err(GridError::InvalidGrid(format!("count {n}")));
        }
        Ok(Grid { h, n })
    }

    /// Smallest grid with step `h` covering [0, x_max].
    pub fn with_xmax(h: f64, x_max: f64) -> Result<Self, GridError> {
        if x_max <= 0.0 {
            return Err(GridError::InvalidGrid(format!("x_max {x_max}")));
        }
        let n = (x_max / h).ceil() as usize;
        Grid::new(h, n.max(2))
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_max(&self) -> f64 {
        self.h * self.n as f64
    }

    /// Midpoint x_j = (j + 1/2)·h.
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h
    }

    /// Cell boundary k·h.
    pub fn boundary(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    /// Refined grid with half the step and the same x_max.
    pub fn refined(&self) -> Grid {
        Grid {
            h: self.h * 0.5,
            n: self.n * 2,
        }
    }
}

/// f(x) = x^s · r(x) sampled at grid midpoints; `values[j] = r(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    exponent: f64,
    values: Vec<f64>,
}

impl GridFunction {
    /// Build from the regular-factor samples.
    pub fn from_values(grid: Grid, exponent: f64, values: Vec<f64>) -> Result<Self, GridError> {
        if exponent <= -1.0 || !exponent.is_finite() {
            return Err(GridError::InvalidExponent(exponent));
        }
        if values.len() != grid.len() {
            return Err(GridError::GridMismatch(format!(
                "{} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction {
            grid,
            exponent,
            values,
        })
    }

    /// Sample the regular factor r at the midpoints: f(x) = x^s · r(x).
    pub fn from_regular_fn<F: Fn(f64) -> f64>(
        grid: Grid,
        exponent: f64,
        r: F,
    ) -> Result<Self, GridError> {
        let values = grid.nodes().map(r).collect();
        GridFunction::from_values(grid, exponent, values)
    }

    /// Sample a plain function (exponent 0).
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Self {
        GridFunction {
            grid,
            exponent: 0.0,
            values: grid.nodes().map(f).collect(),
        }
    }

    /// The constant function c.
    pub fn constant(grid: Grid, c: f64) -> Self {
        GridFunction {
            grid,
            exponent: 0.0,
            values: vec![c; grid.len()],
        }
    }

    /// 𝟙.
    pub fn one(grid: Grid) -> Self {
        GridFunction::constant(grid, 1.0)
    }

    /// id, stored exactly as x^1 · 1.
    pub fn identity(grid: Grid) -> Self {
        GridFunction {
            grid,
            exponent: 1.0,
            values: vec![1.0; grid.len()],
        }
    }

    /// coeff · x^s.
    pub fn power(grid: Grid, exponent: f64, coeff: f64) -> Result<Self, GridError> {
        GridFunction::from_values(grid, exponent, vec![coeff; grid.len()])
    }

    /// The zero function.
    pub fn zero(grid: Grid) -> Self {
        GridFunction::constant(grid, 0.0)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn regular_values(&self) -> &[f64] {
        &self.values
    }

    /// Full function value at node j: x_j^s · r_j.
    pub fn value(&self, j: usize) -> f64 {
        if self.exponent == 0.0 {
            self.values[j]
        } else {
            self.grid.node(j).powf(self.exponent) * self.values[j]
        }
    }

    /// Full values at all nodes.
    pub fn values_full(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|j| self.value(j)).collect()
    }

    /// Evaluate at arbitrary x ∈ (0, x_max]: linear interpolation of the
    /// regular factor times the exact power. Outside the node range the
    /// regular factor is held flat.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        let t = x / self.grid.step() - 0.5;
        let r = if t <= 0.0 {
            self.values[0]
        } else if t >= (n - 1) as f64 {
            self.values[n - 1]
        } else {
            let j = t.floor() as usize;
            let w = t - j as f64;
            self.values[j] * (1.0 - w) + self.values[j + 1] * w
        };
        if self.exponent == 0.0 {
            r
        } else {
            x.powf(self.exponent) * r
        }
    }

    /// Same data with exponent 0 (values become the full function values).
    pub fn rebased(&self) -> GridFunction {
        if self.exponent == 0.0 {
            return self.clone();
        }
        GridFunction {
            grid: self.grid,
            exponent: 0.0,
            values: self.values_full(),
        }
    }

    /// Reinterpret on a different exponent basis: r_new = x^(s_old − s_new) · r.
    pub fn on_basis(&self, exponent: f64) -> Result<GridFunction, GridError> {
        if exponent <= -1.0 || !exponent.is_finite() {
            return Err(GridError::InvalidExponent(exponent));
        }
        if exponent == self.exponent {
            return Ok(self.clone());
        }
        let d = self.exponent - exponent;
        let values = (0..self.grid.len())
            .map(|j| self.grid.node(j).powf(d) * self.values[j])
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            exponent,
            values,
        })
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            exponent: self.exponent,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<(), GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch(format!(
                "h = {} vs {}, n = {} vs {}",
                self.grid.step(),
                other.grid.step(),
                self.grid.len(),
                other.grid.len()
            )));
        }
        Ok(())
    }

    /// Pointwise sum on the basis min(s_f, s_g); the piece with the larger
    /// exponent vanishes at the origin, so the combined regular factor stays
    /// continuous there.
    pub fn add(&self, other: &GridFunction) -> Result<GridFunction, GridError> {
        self.check_same_grid(other)?;
        let s = self.exponent.min(other.exponent);
        let a = self.on_basis(s)?;
        let b = other.on_basis(s)?;
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x + y)
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            exponent: s,
            values,
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction, GridError> {
        self.add(&other.scale(-1.0))
    }

    /// ∫₀ˣ |f(y)| dy by exact cellwise integration of the power factor.
    pub fn l1_norm(&self, up_to: f64) -> f64 {
        let h = self.grid.step();
        let s = self.exponent;
        let x = up_to.min(self.grid.x_max());
        if x <= 0.0 {
            return 0.0;
        }
        let full_cells = ((x / h).floor() as usize).min(self.grid.len());
        let mut acc = 0.0;
        let sp1 = s + 1.0;
        let mut lo_pow = 0.0; // (k·h)^(s+1) at k = 0
        for (k, v) in self.values.iter().take(full_cells).enumerate() {
            let hi_pow = (h * (k as f64 + 1.0)).powf(sp1);
            acc += v.abs() * (hi_pow - lo_pow) / sp1;
            lo_pow = hi_pow;
        }
        if full_cells < self.grid.len() {
            let lo = h * full_cells as f64;
            if x > lo {
                acc += self.values[full_cells].abs() * (x.powf(sp1) - lo.powf(sp1)) / sp1;
            }
        }
        acc
    }

    /// max over nodes of |f(x_j)|.
    pub fn sup_norm(&self) -> f64 {
        (0..self.grid.len())
            .map(|j| self.value(j).abs())
            .fold(0.0, f64::max)
    }

    /// 𝟙 ∗ f with exponent s + 1; exact for cellwise-constant regular factors.
    pub fn primitive(&self) -> GridFunction {
        let h = self.grid.step();
        let s = self.exponent;
        let sp1 = s + 1.0;
        let n = self.grid.len();
        let mut values = vec![0.0; n];
        let mut cum = 0.0; // ∫ up to the cell boundary j·h
        let mut lo_pow = 0.0;
        for (j, out) in values.iter_mut().enumerate() {
            let mid_pow = self.grid.node(j).powf(sp1);
            let hi_pow = (h * (j as f64 + 1.0)).powf(sp1);
            *out = (cum + self.values[j] * (mid_pow - lo_pow) / sp1) / mid_pow;
            cum += self.values[j] * (hi_pow - lo_pow) / sp1;
            lo_pow = hi_pow;
        }
        GridFunction {
            grid: self.grid,
            exponent: sp1,
            values,
        }
    }

    /// Derivative: central differences on the regular factor combined with
    /// the exact derivative of the power prefactor,
    /// (x^s r)' = x^(s−1) (s·r + x·r').
    ///
    /// The two boundary nodes use one-sided second-order stencils; the first
    /// node is the least trustworthy since the regular factor may vary
    /// fastest there. Inputs with s < 0 are differentiated on the rebased
    /// values (the true derivative is no longer locally integrable, so no
    /// exponent is split off).
    pub fn derivative(&self) -> GridFunction {
        let n = self.grid.len();
        assert!(n >= 3, "derivative needs at least 3 nodes");
        let h = self.grid.step();
        let work = if self.exponent < 0.0 {
            self.rebased()
        } else {
            self.clone()
        };
        let s = work.exponent;
        let r = &work.values;
        let mut dr = vec![0.0; n];
        dr[0] = (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * h);
        dr[n - 1] = (3.0 * r[n - 1] - 4.0 * r[n - 2] + r[n - 3]) / (2.0 * h);
        for j in 1..n - 1 {
            dr[j] = (r[j + 1] - r[j - 1]) / (2.0 * h);
        }
        if s == 0.0 {
            GridFunction {
                grid: self.grid,
                exponent: 0.0,
                values: dr,
            }
        } else {
            let values = (0..n)
                .map(|j| s * r[j] + self.grid.node(j) * dr[j])
                .collect();
            GridFunction {
                grid: self.grid,
                exponent: s - 1.0,
                values,
            }
        }
    }

    /// ∫₀^(x_max) e^(−βx) f(x) dx.
    ///
    /// For exponent 0 the exponential is taken at cell midpoints; otherwise
    /// the power factor is integrated exactly per cell and the exponential is
    /// bracketed by its cell-endpoint values (midpoint of the bracket).
    pub fn laplace(&self, beta: f64) -> f64 {
        let h = self.grid.step();
        let s = self.exponent;
        if s == 0.0 {
            return (0..self.grid.len())
                .map(|j| self.values[j] * (-beta * self.grid.node(j)).exp() * h)
                .sum();
        }
        let sp1 = s + 1.0;
        let mut acc = 0.0;
        let mut lo_pow = 0.0;
        let mut e_lo = 1.0; // e^(−β·0)
        for (k, v) in self.values.iter().enumerate() {
            let hi = h * (k as f64 + 1.0);
            let hi_pow = hi.powf(sp1);
            let e_hi = (-beta * hi).exp();
            acc += v * (hi_pow - lo_pow) / sp1 * 0.5 * (e_lo + e_hi);
            lo_pow = hi_pow;
            e_lo = e_hi;
        }
        acc
    }

    /// Riemann–Liouville fractional integral I^μ f = x^(μ−1)/Γ(μ) ∗ f.
    pub fn frac_integral(&self, mu: f64) -> Result<GridFunction, GridError> {
        assert!(mu > 0.0 && mu < 1.0, "order must be in (0,1), got {mu}");
        let kernel = GridFunction::power(self.grid, mu - 1.0, 1.0 / crate::special::gamma(mu))?;
        convolve(&kernel, self)
    }

    /// Riemann–Liouville fractional derivative D^μ f = ∂ I^(1−μ) f.
    pub fn frac_derivative(&self, mu: f64) -> Result<GridFunction, GridError> {
        assert!(mu > 0.0 && mu < 1.0, "order must be in (0,1), got {mu}");
        Ok(self.frac_integral(1.0 - mu)?.derivative())
    }
}

/// Atoms plus an optional grid density: the carrier for discrete or mixed
/// jump laws (δ-measures, geometric laws, tabulated claim densities).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixedDistribution {
    /// (location ≥ 0, mass > 0), locations strictly increasing.
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<GridFunction>,
}

impl MixedDistribution {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self, GridError> {
        let mut prev = -1.0;
        for &(loc, mass) in &atoms {
            if loc < 0.0 || mass <= 0.0 || loc <= prev {
                return Err(GridError::InvalidGrid(format!(
                    "bad atom (loc {loc}, mass {mass})"
                )));
            }
            prev = loc;
        }
        Ok(MixedDistribution {
            atoms,
            density: None,
        })
    }

    pub fn point_mass(loc: f64, mass: f64) -> Self {
        MixedDistribution {
            atoms: vec![(loc, mass)],
            density: None,
        }
    }

    pub fn with_density(density: GridFunction) -> Self {
        MixedDistribution {
            atoms: Vec::new(),
            density: Some(density),
        }
    }

    pub fn empty() -> Self {
        MixedDistribution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.density.is_none()
    }

    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|&(_, m)| m).sum();
        let dens_mass = self
            .density
            .as_ref()
            .map(|d| d.l1_norm(d.grid().x_max()))
            .unwrap_or(0.0);
        atom_mass + dens_mass
    }

    pub fn mean(&self) -> f64 {
        let atom_mean: f64 = self.atoms.iter().map(|&(l, m)| l * m).sum();
        let dens_mean = self
            .density
            .as_ref()
            .map(|d| {
                let g = d.grid();
                (0..g.len()).map(|j| g.node(j) * d.value(j) * g.step()).sum()
            })
            .unwrap_or(0.0);
        atom_mean + dens_mean
    }

    /// Upper tail mass beyond x (atoms at locations ≥ x plus the density tail).
    pub fn tail(&self, x: f64) -> f64 {
        let atom_tail: f64 = self
            .atoms
            .iter()
            .filter(|&&(l, _)| l >= x)
            .map(|&(_, m)| m)
            .sum();
        let dens_tail = self
            .density
            .as_ref()
            .map(|d| {
                let total = d.l1_norm(d.grid().x_max());
                total - d.l1_norm(x)
            })
            .unwrap_or(0.0);
        atom_tail + dens_tail
    }

    /// ∫ (loc − x)₊ over the distribution: the integrated upper tail.
    pub fn integrated_tail(&self, x: f64) -> f64 {
        let atom_part: f64 = self
            .atoms
            .iter()
            .filter(|&&(l, _)| l > x)
            .map(|&(l, m)| (l - x) * m)
            .sum();
        let dens_part = self
            .density
            .as_ref()
            .map(|d| {
                let g = d.grid();
                (0..g.len())
                    .map(|j| {
                        let y = g.node(j);
                        if y > x {
                            (y - x) * d.value(j) * g.step()
                        } else {
                            0.0
                        }
                    })
                    .sum()
            })
            .unwrap_or(0.0);
        atom_part + dens_part
    }

    /// Convolution of two mixed distributions. Atom ∗ atom stays exact;
    /// anything touching a density lands on the density grid.
    pub fn convolve_with(&self, other: &MixedDistribution) -> Result<MixedDistribution, GridError> {
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for &(la, ma) in &self.atoms {
            for &(lb, mb) in &other.atoms {
                let loc = la + lb;
                let mass = ma * mb;
                match atoms
                    .iter_mut()
                    .find(|(l, _)| (*l - loc).abs() <= 1e-12 * (1.0 + loc.abs()))
                {
                    Some(hit) => hit.1 += mass,
                    None => atoms.push((loc, mass)),
                }
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut density: Option<GridFunction> = None;
        let mut add_density = |d: GridFunction| -> Result<(), GridError> {
            density = Some(match density.take() {
                Some(acc) => acc.add(&d)?,
                None => d,
            });
            Ok(())
        };
        if let Some(da) = &self.density {
            if !other.atoms.is_empty() {
                let shifted = convolve_mixed(
                    da,
                    &MixedDistribution {
                        atoms: other.atoms.clone(),
                        density: None,
                    },
                )?;
                add_density(shifted)?;
            }
            if let Some(db) = &other.density {
                add_density(convolve(da, db)?)?;
            }
        }
        if let Some(db) = &other.density {
            if !self.atoms.is_empty() {
                let shifted = convolve_mixed(
                    db,
                    &MixedDistribution {
                        atoms: self.atoms.clone(),
                        density: None,
                    },
                )?;
                add_density(shifted)?;
            }
        }
        Ok(MixedDistribution { atoms, density })
    }

    /// ∫ e^(−βx) d(atoms + density): atoms exactly, the density by the grid
    /// rule.
    pub fn laplace(&self, beta: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|&(l, m)| m * (-beta * l).exp()).sum();
        atoms + self.density.as_ref().map(|d| d.laplace(beta)).unwrap_or(0.0)
    }

    /// Drop atoms beyond x_max (they cannot contribute on the grid).
    pub fn truncate_support(&self, x_max: f64) -> MixedDistribution {
        MixedDistribution {
            atoms: self
                .atoms
                .iter()
                .copied()
                .filter(|&(l, _)| l <= x_max)
                .collect(),
            density: self.density.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: f64, n: usize) -> Grid {
        Grid::new(h, n).unwrap()
    }

    #[test]
    fn primitive_of_one_is_identity() {
        let g = grid(1.0 / 256.0, 512);
        let p = GridFunction::one(g).primitive();
        assert_eq!(p.exponent(), 1.0);
        for j in [0, 100, 511] {
            assert!((p.values[j] - 1.0).abs() < 1e-14);
        }
        // id at x = 2
        assert!((p.eval(2.0) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn primitive_of_inverse_sqrt_is_two_sqrt() {
        // ∫₀ˣ y^(-1/2) dy = 2 x^(1/2); at x = 4 this is 4
        let g = grid(1.0 / 128.0, 512);
        let f = GridFunction::power(g, -0.5, 1.0).unwrap();
        let p = f.primitive();
        assert_eq!(p.exponent(), 0.5);
        assert!((p.eval(4.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn primitive_of_identity_is_half_square() {
        let g = grid(1.0 / 256.0, 1024);
        let p = GridFunction::identity(g).primitive();
        assert!((p.eval(2.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_identity_is_one() {
        let g = grid(1.0 / 64.0, 128);
        let d = GridFunction::identity(g).derivative();
        for j in 0..g.len() {
            assert!((d.value(j) - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn derivative_of_half_square_is_identity() {
        let g = grid(1.0 / 64.0, 128);
        let f = GridFunction::from_fn(g, |x| 0.5 * x * x);
        let d = f.derivative();
        for j in 1..g.len() - 1 {
            let x = g.node(j);
            assert!((d.value(j) - x).abs() < 1e-10 * (1.0 + x));
        }
    }

    #[test]
    fn derivative_of_declared_sqrt() {
        // f = x^(1/2) as exponent 1/2, regular 1: derivative (1/2) x^(-1/2), at 1 → 0.5
        let g = grid(1.0 / 128.0, 256);
        let f = GridFunction::power(g, 0.5, 1.0).unwrap();
        let d = f.derivative();
        assert_eq!(d.exponent(), -0.5);
        assert!((d.eval(1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn l1_norm_examples() {
        let g = grid(1.0 / 128.0, 512);
        assert!((GridFunction::one(g).l1_norm(3.0) - 3.0).abs() < 1e-13);
        let f = GridFunction::power(g, -0.5, 1.0).unwrap();
        assert!((f.l1_norm(1.0) - 2.0).abs() < 1e-12);
        let neg_id = GridFunction::identity(g).scale(-1.0);
        assert!((neg_id.l1_norm(2.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frac_integral_power_rule() {
        // I^(1/2) 1 = x^(1/2)/Γ(3/2); at x = 1: 1.1283792
        let g = grid(1.0 / 256.0, 512);
        let f = GridFunction::one(g);
        let v = f.frac_integral(0.5).unwrap();
        assert!((v.eval(1.0) - 1.0 / crate::special::gamma(1.5)).abs() < 1e-9);
        // I^γ x^(-γ) = Γ(1-γ) (constant), then D^(1-γ) x^(-γ) = 0
        let gam = 0.4;
        let p = GridFunction::power(g, -gam, 1.0).unwrap();
        let c = p.frac_integral(gam).unwrap();
        let expect = crate::special::gamma(1.0 - gam);
        for j in [0, 50, 300] {
            assert!((c.value(j) - expect).abs() < 1e-10 * expect);
        }
        let d = p.frac_derivative(1.0 - gam).unwrap();
        for j in 2..g.len() - 2 {
            assert!(d.value(j).abs() < 1e-8);
        }
    }

    #[test]
    fn derivative_then_primitive_roundtrip() {
        let g = grid(1.0 / 128.0, 256);
        let f = GridFunction::from_fn(g, |x| (0.7 * x).sin() + 2.0);
        let back = f.primitive().derivative();
        for j in 3..g.len() - 3 {
            let err = (back.value(j) - f.value(j)).abs();
            assert!(err < 2e-4, "node {j}: {err}");
        }
    }

    #[test]
    fn mixed_distribution_atom_convolution() {
        let d1 = MixedDistribution::point_mass(1.0, 1.0);
        let d3 = d1.convolve_with(&d1).unwrap().convolve_with(&d1).unwrap();
        assert_eq!(d3.atoms.len(), 1);
        assert!((d3.atoms[0].0 - 3.0).abs() < 1e-12);
        assert!((d3.atoms[0].1 - 1.0).abs() < 1e-12);
    }
}
