//! Radial Laplace-Beltrami operator `u'' + F(r)u'` on balls `B_R`.
//!
//! Fields live on the uniform grid `r_i = i·dr`, `i = 0..=N+1`, with the
//! pole at `i = 0` and the Dirichlet node at `i = N+1`.

use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::geometry::ModelManifold;

/// Shortest round-trip text for `x`, switching to exponent notation for very
/// small or large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Uniform grid on `[0, R]` with `N` interior nodes, `dr = R/(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n_interior: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_interior: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(invalid(format!("grid radius must be positive, got {r_max}")));
        }
        if n_interior < 2 {
            return Err(invalid(format!("need at least 2 interior nodes, got {n_interior}")));
        }
        Ok(Self { r_max, n_interior })
    }

    /// Grid whose spacing is as close as possible to `dr`.
    pub fn with_spacing(r_max: f64, dr: f64) -> Result<Self> {
        if !(dr > 0.0) {
            return Err(invalid(format!("grid spacing must be positive, got {dr}")));
        }
        let cells = (r_max / dr).round().max(3.0) as usize;
        Self::new(r_max, cells - 1)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    /// Total node count `N + 2`.
    pub fn len(&self) -> usize {
        self.n_interior + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_max / (self.n_interior + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_interior + 1 {
            self.r_max
        } else {
            i as f64 * self.dr()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Index of the node nearest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        ((r / self.dr()).round().max(0.0) as usize).min(self.len() - 1)
    }
}

/// Values of a radial function at the nodes of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite field value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.nodes().into_iter().map(f).collect(),
            grid,
        }
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at `r` by linear interpolation between nodes.
    pub fn interpolate(&self, r: f64) -> f64 {
        let dr = self.grid.dr();
        let x = (r / dr).clamp(0.0, (self.values.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let t = x - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Same field with the Dirichlet node forced to zero.
    pub fn with_zero_boundary(mut self) -> Self {
        if let Some(last) = self.values.last_mut() {
            *last = 0.0;
        }
        self
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "u"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([fmt_num(self.grid.node(i)), fmt_num(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        if rdr.headers()?.iter().ne(["r", "u"]) {
            return Err(Error::Parse("expected header r,u".into()));
        }
        let mut rs = Vec::new();
        let mut us = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let p = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
            rs.push(p(&rec[0])?);
            us.push(p(&rec[1])?);
        }
        if rs.len() < 4 || rs[0] != 0.0 {
            return Err(Error::Parse("field CSV must start at r = 0 with >= 4 rows".into()));
        }
        let grid = RadialGrid::new(*rs.last().unwrap(), rs.len() - 2)?;
        for (i, &r) in rs.iter().enumerate() {
            if (r - grid.node(i)).abs() > 1e-9 * grid.r_max() {
                return Err(Error::Parse(format!("non-uniform r at row {i}")));
            }
        }
        Self::new(grid, us)
    }
}

/// Radial function with analytic first and second derivatives.
pub trait RadialFunction {
    fn eval(&self, r: f64) -> f64;
    fn deriv1(&self, r: f64) -> f64;
    fn deriv2(&self, r: f64) -> f64;
}

type Scalar = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A [`RadialFunction`] assembled from three closures.
pub struct SmoothRadialFn {
    eval: Scalar,
    deriv1: Scalar,
    deriv2: Scalar,
}

impl SmoothRadialFn {
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Box::new(eval),
            deriv1: Box::new(deriv1),
            deriv2: Box::new(deriv2),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0, |_| 0.0)
    }
}

impl RadialFunction for SmoothRadialFn {
    fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }
    fn deriv1(&self, r: f64) -> f64 {
        (self.deriv1)(r)
    }
    fn deriv2(&self, r: f64) -> f64 {
        (self.deriv2)(r)
    }
}

/// Tridiagonal matrix of the discrete Laplacian `Δ_h` acting on the unknowns
/// `u_0..u_N`. Row `N` also couples to the boundary value `u_{N+1}` through
/// `boundary_coupling`.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    grid: RadialGrid,
    pub(crate) lower: Vec<f64>,
    pub(crate) diag: Vec<f64>,
    pub(crate) upper: Vec<f64>,
    pub(crate) boundary_coupling: f64,
}

impl RadialOperator {
    /// Assembles `Δ_h` on `grid`. Centered differences at interior nodes;
    /// `Δu(0) ≈ 2n(u_1 - u_0)/dr²` at the pole.
    ///
    /// Rejects grids where `dr·F(r_i) >= 2` at some interior node outside the
    /// pole layer `i <= (n-1)/2` (inside it `dr·F ≈ (n-1)/i` whatever `dr` is).
    pub fn new(m: &ModelManifold, grid: RadialGrid) -> Result<Self> {
        if grid.r_max() > m.r_max() * (1.0 + 1e-12) {
            return Err(Error::GridMismatch(format!(
                "grid radius {} exceeds the manifold table range {}",
                grid.r_max(),
                m.r_max()
            )));
        }
        let n = m.dim();
        let dr = grid.dr();
        let inv2 = 1.0 / (dr * dr);
        let size = grid.n_interior() + 1;
        let mut lower = vec![0.0; size];
        let mut diag = vec![0.0; size];
        let mut upper = vec![0.0; size];
        diag[0] = -2.0 * n as f64 * inv2;
        upper[0] = 2.0 * n as f64 * inv2;
        let pole_layer = (n - 1) / 2;
        let mut boundary_coupling = 0.0;
        for i in 1..size {
            let r = grid.node(i);
            let f = m.drift_at(r);
            if i > pole_layer && dr * f >= 2.0 {
                return Err(invalid(format!(
                    "grid too coarse for the drift: dr*F(r) = {:.4} >= 2 at r = {r:.4} (dr = {dr})",
                    dr * f
                )));
            }
            lower[i] = inv2 - 0.5 * f / dr;
            diag[i] = -2.0 * inv2;
            if i + 1 < size {
                upper[i] = inv2 + 0.5 * f / dr;
            } else {
                boundary_coupling = inv2 + 0.5 * f / dr;
            }
        }
        Ok(Self {
            grid,
            lower,
            diag,
            upper,
            boundary_coupling,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `Δ_h u`; the entry at the Dirichlet node is set to 0.
    pub fn apply(&self, u: &RadialField) -> Result<RadialField> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch("field grid differs from operator grid".into()));
        }
        Ok(RadialField::from_vec_unchecked(self.grid, self.apply_slice(u.values())))
    }

    pub(crate) fn apply_slice(&self, u: &[f64]) -> Vec<f64> {
        let size = self.diag.len();
        let mut out = vec![0.0; size + 1];
        for i in 0..size {
            let mut s = self.diag[i] * u[i];
            if i > 0 {
                s += self.lower[i] * u[i - 1];
            }
            s += if i + 1 < size {
                self.upper[i] * u[i + 1]
            } else {
                self.boundary_coupling * u[size]
            };
            out[i] = s;
        }
        out
    }
}

/// Discrete Laplacian of a radial field, see [`RadialOperator::new`].
pub fn apply_laplacian(m: &ModelManifold, u: &RadialField) -> Result<RadialField> {
    RadialOperator::new(m, *u.grid())?.apply(u)
}

/// `f''(r) + F(r)f'(r)` with exact derivatives and the model's exact drift.
pub fn apply_laplacian_analytic(m: &ModelManifold, f: &dyn RadialFunction, r: f64) -> Result<f64> {
    let drift = m.drift(r)?;
    Ok(f.deriv2(r) + drift * f.deriv1(r))
}

/// `max_i |u_i|`.
pub fn sup_norm(u: &RadialField) -> f64 {
    sup_norm_slice(u.values())
}

pub(crate) fn sup_norm_slice(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Trapezoidal weights `ψ^{n-1}(r_i)·dr` divided by `exp(shift)`, where
/// `shift` is the largest log-weight (keeps fast-growing models finite).
fn scaled_volume_weights(m: &ModelManifold, grid: &RadialGrid) -> Result<(Vec<f64>, f64)> {
    if grid.r_max() > m.r_max() * (1.0 + 1e-12) {
        return Err(Error::GridMismatch("grid exceeds manifold table range".into()));
    }
    let logs: Vec<f64> = grid.nodes().into_iter().map(|r| m.log_volume_density(r)).collect();
    let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dr = grid.dr();
    let last = logs.len() - 1;
    let weights = logs
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let end = if i == 0 || i == last { 0.5 } else { 1.0 };
            end * dr * (l - shift).exp()
        })
        .collect();
    Ok((weights, shift))
}

/// `∫₀^R u w ψ^{n-1} dr` by the trapezoidal rule. The area of the unit
/// sphere is not included; it cancels in every quotient this crate forms.
/// May overflow to infinity on very large balls of fast-growing models; use
/// [`rayleigh_quotient`] for ratios.
pub fn volume_inner_product(m: &ModelManifold, u: &RadialField, w: &RadialField) -> Result<f64> {
    if u.grid() != w.grid() {
        return Err(Error::GridMismatch("inner product of fields on different grids".into()));
    }
    let (weights, shift) = scaled_volume_weights(m, u.grid())?;
    let s: f64 = weights
        .iter()
        .zip(u.values().iter().zip(w.values()))
        .map(|(c, (a, b))| c * a * b)
        .sum();
    Ok(s * shift.exp())
}

/// `⟨-Δ_h u, u⟩ / ⟨u, u⟩` in the volume inner product.
pub fn rayleigh_quotient(m: &ModelManifold, u: &RadialField) -> Result<f64> {
    let op = RadialOperator::new(m, *u.grid())?;
    let lap = op.apply(u)?;
    let (weights, _) = scaled_volume_weights(m, u.grid())?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((c, a), l) in weights.iter().zip(u.values()).zip(lap.values()) {
        num -= c * l * a;
        den += c * a * a;
    }
    if den == 0.0 {
        return Err(invalid("Rayleigh quotient of the zero field"));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid3() -> ModelManifold {
        ModelManifold::euclidean(3).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = RadialGrid::new(1.0, 9).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g.dr() - 0.1).abs() < 1e-15);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(10), 1.0);
        assert!(RadialGrid::new(0.0, 10).is_err());
        assert!(RadialGrid::new(1.0, 1).is_err());
    }

    #[test]
    fn quadratic_is_exact_in_flat_space() {
        let grid = RadialGrid::new(2.0, 199).unwrap();
        let u = RadialField::from_fn(grid, |r| r * r);
        let lap = apply_laplacian(&euclid3(), &u).unwrap();
        for &v in &lap.values()[..grid.len() - 1] {
            assert!((v - 6.0).abs() < 1e-8);
        }
    }

    #[test]
    fn constants_are_harmonic() {
        let grid = RadialGrid::new(5.0, 499).unwrap();
        let u = RadialField::from_fn(grid, |_| 3.5);
        for m in [euclid3(), ModelManifold::hyperbolic(4, 1.0).unwrap()] {
            let lap = apply_laplacian(&m, &u).unwrap();
            assert!(sup_norm(&lap) < 1e-9, "{}", sup_norm(&lap));
        }
    }

    #[test]
    fn analytic_laplacian_examples() {
        let e = euclid3();
        let sq = SmoothRadialFn::new(|r| r * r, |r| 2.0 * r, |_| 2.0);
        assert!((apply_laplacian_analytic(&e, &sq, 1.0).unwrap() - 6.0).abs() < 1e-15);

        let h = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let f = SmoothRadialFn::new(|r| (-r).exp(), |r| -(-r).exp(), |r| (-r).exp());
        let expected = (-2f64).exp() * (1.0 - 2.0 / 2f64.tanh());
        assert!((apply_laplacian_analytic(&h, &f, 2.0).unwrap() - expected).abs() < 1e-15);

        let one = SmoothRadialFn::constant(1.0);
        assert_eq!(apply_laplacian_analytic(&h, &one, 0.7).unwrap(), 0.0);
        assert!(apply_laplacian_analytic(&h, &one, 0.0).is_err());
    }

    #[test]
    fn sup_norm_example() {
        let grid = RadialGrid::new(3.0, 2).unwrap();
        let u = RadialField::new(grid, vec![0.0, 1.0, -3.0, 2.0]).unwrap();
        assert_eq!(sup_norm(&u), 3.0);
    }

    #[test]
    fn unit_ball_volume_integral() {
        let grid = RadialGrid::new(1.0, 999).unwrap();
        let one = RadialField::from_fn(grid, |_| 1.0);
        let v = volume_inner_product(&euclid3(), &one, &one).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_mismatched_grids() {
        let a = RadialField::zeros(RadialGrid::new(1.0, 10).unwrap());
        let b = RadialField::zeros(RadialGrid::new(1.0, 11).unwrap());
        assert!(volume_inner_product(&euclid3(), &a, &b).is_err());
        let op = RadialOperator::new(&euclid3(), *a.grid()).unwrap();
        assert!(op.apply(&b).is_err());
        assert!(RadialField::new(*a.grid(), vec![0.0; 3]).is_err());
    }

    #[test]
    fn rejects_grid_beyond_table() {
        let m = ModelManifold::gamma_model(3, 1.0, 2.0, 5.0, 1e-3).unwrap();
        let grid = RadialGrid::new(6.0, 100).unwrap();
        assert!(RadialOperator::new(&m, grid).is_err());
    }

    #[test]
    fn rejects_coarse_grid_for_fast_drift() {
        let m = ModelManifold::gamma_model(3, 1.0, 2.0, 20.0, 1e-3).unwrap();
        // F(20) ≈ 40, so dr must stay below 0.05.
        assert!(RadialOperator::new(&m, RadialGrid::with_spacing(20.0, 0.1).unwrap()).is_err());
        assert!(RadialOperator::new(&m, RadialGrid::with_spacing(20.0, 0.02).unwrap()).is_ok());
    }

    #[test]
    fn field_csv_round_trip() {
        let grid = RadialGrid::new(2.0, 7).unwrap();
        let u = RadialField::from_fn(grid, |r| (-r).exp());
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("r,u\n"));
        assert_eq!(RadialField::read_csv(buf.as_slice()).unwrap(), u);
    }
}
