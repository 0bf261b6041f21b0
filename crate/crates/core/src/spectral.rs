//! Bottom of the spectrum of `-Δ`: the McKean lower bound and Dirichlet
//! eigenvalues on balls, which approximate `λ₁(M)` from above.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::geometry::ModelManifold;
use crate::radial::{fmt_num, sup_norm_slice, RadialField, RadialGrid, RadialOperator};
use crate::tridiag;

/// Successive eigenvalue estimates must agree to this relative precision.
pub const EIGEN_TOL: f64 = 1e-12;
pub const EIGEN_MAX_ITER: usize = 50_000;

/// `(n-1)²k²/4`, valid whenever every sectional curvature is `<= -k²`.
pub fn mckean_bound(n: usize, k: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {n}")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid(format!("curvature scale must be positive, got {k}")));
    }
    let nm1 = (n - 1) as f64;
    Ok(0.25 * nm1 * nm1 * k * k)
}

/// First Dirichlet eigenpair of `-Δ_h` on `B_R`.
#[derive(Debug, Clone)]
pub struct EigenEstimate {
    pub r_max: f64,
    pub lambda1: f64,
    /// Positive at interior nodes, sup-norm 1, zero at `R`.
    pub eigenfunction: RadialField,
    pub iterations: usize,
    /// `‖Δ_h φ + λφ‖∞ / ‖φ‖∞`.
    pub residual: f64,
}

/// Inverse power iteration on the tridiagonal `-Δ_h` (Dirichlet at `R`,
/// symmetric at the pole). Unshifted until the estimate settles to 1e-6,
/// then shifted by that estimate.
pub fn dirichlet_lambda1(m: &ModelManifold, r_max: f64, n_interior: usize) -> Result<EigenEstimate> {
    let grid = RadialGrid::new(r_max, n_interior)?;
    let op = RadialOperator::new(m, grid)?;
    let size = n_interior + 1;
    let lower: Vec<f64> = op.lower.iter().map(|v| -v).collect();
    let upper: Vec<f64> = op.upper.iter().map(|v| -v).collect();
    let base_diag: Vec<f64> = op.diag.iter().map(|v| -v).collect();

    let mut x: Vec<f64> = (0..size)
        .map(|i| (0.5 * std::f64::consts::PI * grid.node(i) / r_max).cos())
        .collect();
    let mut y = vec![0.0; size];
    let mut scratch = vec![0.0; size];
    let mut diag = base_diag.clone();
    let mut shift = 0.0;
    let mut shifted = false;
    let mut previous = f64::NAN;
    let mut estimate = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < EIGEN_MAX_ITER {
        iterations += 1;
        y.copy_from_slice(&x);
        tridiag::solve_in_place(&lower, &diag, &upper, &mut y, &mut scratch);
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|b| b * b).sum();
        if !(yy > 0.0 && yy.is_finite()) {
            return Err(Error::NonConvergence(format!(
                "inverse iteration produced a degenerate vector at iteration {iterations}"
            )));
        }
        estimate = shift + xy / yy;
        let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        let norm = sup_norm_slice(&y);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = sign * yi / norm;
        }
        let change = (estimate - previous).abs();
        let scale = estimate.abs().max(1.0);
        if shifted && change <= EIGEN_TOL * scale {
            converged = true;
            break;
        }
        if !shifted && change <= 1e-6 * scale {
            shifted = true;
            shift = estimate;
            for (d, b) in diag.iter_mut().zip(&base_diag) {
                *d = b - shift;
            }
        }
        previous = estimate;
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "Dirichlet eigenvalue on B_{r_max} did not settle within {EIGEN_MAX_ITER} iterations"
        )));
    }
    let mut values = x;
    values.push(0.0);
    if let Some(i) = values[..size].iter().position(|v| *v <= 0.0) {
        return Err(Error::NonConvergence(format!(
            "eigenvector not positive at r = {} (converged to a higher mode)",
            grid.node(i)
        )));
    }
    let lap = op.apply_slice(&values);
    let residual = (0..size)
        .map(|i| (lap[i] + estimate * values[i]).abs())
        .fold(0.0, f64::max)
        / sup_norm_slice(&values);
    Ok(EigenEstimate {
        r_max,
        lambda1: estimate,
        eigenfunction: RadialField::from_vec_unchecked(grid, values),
        iterations,
        residual,
    })
}

/// Writes `R,lambda1,residual` rows.
pub fn write_eigen_csv<W: Write>(estimates: &[EigenEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["R", "lambda1", "residual"])?;
    for e in estimates {
        w.write_record([fmt_num(e.r_max), fmt_num(e.lambda1), fmt_num(e.residual)])?;
    }
    w.flush()?;
    Ok(())
}

/// Dirichlet eigenvalues on an increasing family of balls.
#[derive(Debug, Clone)]
pub struct Lambda1Sequence {
    pub estimates: Vec<EigenEstimate>,
    /// Strictly decreasing in `R` (domain monotonicity). `false` signals a
    /// discretization failure.
    pub monotone: bool,
    /// Last value of the sequence.
    pub limit: f64,
    /// Last decrement, used as the error bar of `limit`.
    pub error_bar: f64,
}

/// Runs [`dirichlet_lambda1`] on every radius with grid spacing close to
/// `dr`. Radii must be strictly increasing.
pub fn lambda1_estimate(m: &ModelManifold, radii: &[f64], dr: f64) -> Result<Lambda1Sequence> {
    if radii.is_empty() {
        return Err(invalid("empty radius list"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("radii must be strictly increasing"));
    }
    let estimates = radii
        .iter()
        .map(|&r| {
            let grid = RadialGrid::with_spacing(r, dr)?;
            dirichlet_lambda1(m, r, grid.n_interior())
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = estimates
        .windows(2)
        .all(|w| w[1].lambda1 < w[0].lambda1 + 1e-10);
    let limit = estimates.last().unwrap().lambda1;
    let error_bar = match estimates.len() {
        1 => f64::INFINITY,
        k => (estimates[k - 2].lambda1 - limit).abs(),
    };
    Ok(Lambda1Sequence {
        estimates,
        monotone,
        limit,
        error_bar,
    })
}

/// Outward solution of `φ'' + F(r)φ' + λφ = 0`, `φ(0) = 1`, `φ'(0) = 0`.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub lambda: f64,
    pub phi: RadialField,
    /// `φ'` at the grid nodes.
    pub dphi: Vec<f64>,
    /// First zero crossing, if any; signals `λ > λ₁(B_R)`.
    pub first_zero: Option<f64>,
}

impl RadialSolution {
    pub fn is_positive(&self) -> bool {
        self.first_zero.is_none()
    }

    /// `(φ(r), φ'(r))` by cubic Hermite interpolation of the nodal data.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let grid = self.phi.grid();
        let dr = grid.dr();
        let last = grid.len() - 1;
        let x = (r / dr).clamp(0.0, last as f64);
        let i = (x.floor() as usize).min(last - 1);
        let t = x - i as f64;
        let v = self.phi.values();
        let (f0, f1, m0, m1) = (v[i], v[i + 1], self.dphi[i], self.dphi[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * dr * m0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * dr * m1;
        let der = (6.0 * t2 - 6.0 * t) * (f0 - f1) / dr + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1;
        (val, der)
    }
}

/// Integrates the radial eigen-equation outward with RK4 on the grid of
/// `B_R` with `N` interior nodes, starting from `φ ≈ 1 - λr²/(2n)` at
/// `r = dr`.
pub fn positive_radial_solution(m: &ModelManifold, lambda: f64, r_max: f64, n_interior: usize) -> Result<RadialSolution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let grid = RadialGrid::new(r_max, n_interior)?;
    if r_max > m.r_max() * (1.0 + 1e-12) {
        return Err(Error::GridMismatch(format!(
            "radius {r_max} exceeds the manifold table range {}",
            m.r_max()
        )));
    }
    let n = m.dim() as f64;
    let dr = grid.dr();
    let len = grid.len();
    let mut phi = vec![0.0; len];
    let mut dphi = vec![0.0; len];
    phi[0] = 1.0;
    phi[1] = 1.0 - lambda * dr * dr / (2.0 * n);
    dphi[1] = -lambda * dr / n;
    let rhs = |r: f64, p: f64, d: f64| -> f64 { -m.drift_at(r) * d - lambda * p };
    for i in 1..len - 1 {
        let r = grid.node(i);
        let h = grid.node(i + 1) - r;
        let (p, d) = (phi[i], dphi[i]);
        let k1p = d;
        let k1d = rhs(r, p, d);
        let k2p = d + 0.5 * h * k1d;
        let k2d = rhs(r + 0.5 * h, p + 0.5 * h * k1p, k2p);
        let k3p = d + 0.5 * h * k2d;
        let k3d = rhs(r + 0.5 * h, p + 0.5 * h * k2p, k3p);
        let k4p = d + h * k3d;
        let k4d = rhs(r + h, p + h * k3p, k4p);
        phi[i + 1] = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dphi[i + 1] = d + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if !(phi[i + 1].is_finite() && dphi[i + 1].is_finite()) {
            return Err(Error::Overflow(format!(
                "radial solution blew up at r = {} (refine the grid)",
                r + h
            )));
        }
    }
    let mut sol = RadialSolution {
        lambda,
        phi: RadialField::from_vec_unchecked(grid, phi),
        dphi,
        first_zero: None,
    };
    let vals = sol.phi.values();
    if let Some(i) = (1..len).find(|&i| vals[i] <= 0.0) {
        sol.first_zero = Some(locate_zero(&sol, grid.node(i - 1), grid.node(i)));
    }
    Ok(sol)
}

fn locate_zero(sol: &RadialSolution, mut a: f64, mut b: f64) -> f64 {
    if sol.eval(b).0 == 0.0 {
        return b;
    }
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if sol.eval(mid).0 > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mckean_values() {
        assert_eq!(mckean_bound(3, 1.0).unwrap(), 1.0);
        assert_eq!(mckean_bound(2, 1.0).unwrap(), 0.25);
        assert_eq!(mckean_bound(3, 2.0).unwrap(), 4.0);
        assert!(mckean_bound(1, 1.0).is_err());
        assert!(mckean_bound(3, 0.0).is_err());
    }

    #[test]
    fn euclidean_unit_ball() {
        let m = ModelManifold::euclidean(3).unwrap();
        let e = dirichlet_lambda1(&m, 1.0, 2000).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((e.lambda1 / pi2 - 1.0).abs() < 1e-3, "{}", e.lambda1);
        assert!(e.residual < 1e-8, "residual {}", e.residual);
        let v = e.eigenfunction.values();
        assert!(v[..v.len() - 1].iter().all(|&x| x > 0.0));
        assert_eq!(*v.last().unwrap(), 0.0);
        // sin(πr)/(πr) shape.
        let i = e.eigenfunction.grid().nearest(0.5);
        let r = e.eigenfunction.grid().node(i);
        let exact = (std::f64::consts::PI * r).sin() / (std::f64::consts::PI * r);
        assert!((v[i] - exact).abs() < 1e-8);
    }

    #[test]
    fn euclidean_zero_of_radial_solution() {
        let m = ModelManifold::euclidean(3).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        let sol = positive_radial_solution(&m, pi2, 1.5, 1499).unwrap();
        let z = sol.first_zero.expect("sign change");
        assert!((z - 1.0).abs() < 1e-4, "{z}");
        let (v, _) = sol.eval(0.3);
        let exact = (std::f64::consts::PI * 0.3).sin() / (std::f64::consts::PI * 0.3);
        assert!((v - exact).abs() < 1e-8);
    }

    #[test]
    fn small_lambda_gives_nearly_constant() {
        let m = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let sol = positive_radial_solution(&m, 1e-8, 5.0, 499).unwrap();
        assert!(sol.is_positive());
        assert!(sol.phi.values().iter().all(|v| (v - 1.0).abs() < 1e-6));
    }

    #[test]
    fn radial_solution_rejects_nonpositive_lambda() {
        let m = ModelManifold::euclidean(3).unwrap();
        assert!(positive_radial_solution(&m, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn estimate_rejects_unsorted_radii() {
        let m = ModelManifold::euclidean(3).unwrap();
        assert!(lambda1_estimate(&m, &[2.0, 1.0], 0.01).is_err());
        assert!(lambda1_estimate(&m, &[], 0.01).is_err());
    }

    #[test]
    fn eigen_csv_header() {
        let m = ModelManifold::euclidean(3).unwrap();
        let e = dirichlet_lambda1(&m, 1.0, 200).unwrap();
        let mut buf = Vec::new();
        write_eigen_csv(&[e], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("R,lambda1,residual\n1,"));
    }
}
