#![allow(dead_code)]

use warpheat::radial::{apply_laplacian, apply_laplacian_analytic, RadialField, RadialFunction, RadialGrid, SmoothRadialFn};
use warpheat::forcing::ForcingH;
use warpheat::ModelManifold;

/// The three built-in families on a common radius, with a name for messages.
pub fn builtin_manifolds(r_max: f64) -> Vec<(&'static str, ModelManifold)> {
    vec![
        ("euclidean", ModelManifold::euclidean(3).unwrap()),
        ("hyperbolic", ModelManifold::hyperbolic(3, 1.0).unwrap()),
        ("gamma2", ModelManifold::gamma_model(3, 1.0, 2.0, r_max, 1e-3).unwrap()),
    ]
}

/// Smooth radial functions with `f'(0) = 0`, with exact derivatives.
pub fn smooth_functions() -> Vec<(&'static str, SmoothRadialFn)> {
    vec![
        (
            "gaussian",
            SmoothRadialFn::new(
                |r| (-r * r).exp(),
                |r| -2.0 * r * (-r * r).exp(),
                |r| (4.0 * r * r - 2.0) * (-r * r).exp(),
            ),
        ),
        (
            "lorentzian",
            SmoothRadialFn::new(
                |r| 1.0 / (1.0 + r * r),
                |r| -2.0 * r / (1.0 + r * r).powi(2),
                |r| (6.0 * r * r - 2.0) / (1.0 + r * r).powi(3),
            ),
        ),
        ("cosine", SmoothRadialFn::new(f64::cos, |r| -r.sin(), |r| -r.cos())),
    ]
}

/// Classical RK4 for a scalar ODE `y' = f(t, y)` on `[0, t_end]`, returning
/// the values at every step.
pub fn rk4(f: impl Fn(f64, f64) -> f64, y0: f64, t_end: f64, steps: usize) -> Vec<(f64, f64)> {
    let h = t_end / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push((0.0, y));
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((t + h, y));
    }
    out
}

use warpheat::barriers::{
    glued_outer_bound, prop42_barrier, prop43_window, prop44_params, prop45_params, prop47_barrier,
    verify_supersolution, Barrier, ExpBarrier, SupersolutionCheck,
};
use warpheat::geometry::{drift_lower_bound_constant, linspace};

/// One constructor draw: label, the check, and for glued barriers the worst
/// `w - v` outside `R₀`.
pub struct BarrierCase {
    pub label: String,
    pub check: SupersolutionCheck,
    pub outer_violation: Option<f64>,
}

fn gamma_setup(c0: f64, gamma: f64, r_max: f64) -> (ModelManifold, Vec<f64>, f64) {
    let m = ModelManifold::gamma_model(3, c0, gamma, r_max, 1e-3).unwrap();
    let grid = linspace(0.01, r_max, (r_max * 100.0) as usize);
    let cbar = drift_lower_bound_constant(&m, gamma, &grid).unwrap();
    (m, grid, cbar)
}

/// Three parameter draws for each of the five barrier constructors.
pub fn barrier_suite() -> Vec<BarrierCase> {
    let mut out = Vec::new();
    let mut push = |label: String, check: SupersolutionCheck, outer: Option<f64>| {
        out.push(BarrierCase { label, check, outer_violation: outer })
    };

    let h3 = ModelManifold::hyperbolic(3, 1.0).unwrap();
    let h3_grid = linspace(0.0, 40.0, 4001);
    for (lambda, pick) in [(0.75, 0usize), (0.5, 1), (1.0, 0)] {
        let (lo, hi) = prop43_window(3, 1.0, lambda).unwrap();
        let beta = [lo, hi][pick];
        let b = Barrier::Exp(ExpBarrier::new(1.0, beta).unwrap());
        push(format!("prop43 lambda={lambda} beta={beta:.4}"), verify_supersolution(&h3, &b, lambda, &h3_grid).unwrap(), None);
    }

    for (c0, gamma) in [(1.0, 2.0), (1.0, 3.0), (2.0, 1.0)] {
        let (m, grid, cbar) = gamma_setup(c0, gamma, 20.0);
        let lambda = 0.5 * (2.0 * cbar).powi(2) / 4.0;
        let (alpha, beta) = prop44_params(3, cbar, gamma, lambda).unwrap();
        let b = Barrier::Exp(ExpBarrier::new(alpha, beta).unwrap());
        push(
            format!("prop44 C0={c0} gamma={gamma} alpha={alpha:.4}"),
            verify_supersolution(&m, &b, lambda, &grid).unwrap(),
            None,
        );
    }

    for (c0, gamma, alpha) in [(1.0, 2.0, 1.0), (1.0, 3.0, 1.5), (2.0, 1.0, 1.25)] {
        let (m, grid, cbar) = gamma_setup(c0, gamma, 20.0);
        let lambda = 0.8 * (2.0 * cbar).powi(2) / 4.0;
        let beta = prop45_params(3, cbar, gamma, lambda, alpha).unwrap();
        let b = Barrier::Exp(ExpBarrier::new(alpha, beta).unwrap());
        push(
            format!("prop45 C0={c0} gamma={gamma} alpha={alpha}"),
            verify_supersolution(&m, &b, lambda, &grid).unwrap(),
            None,
        );
    }

    let (m, grid, cbar) = gamma_setup(1.0, 3.0, 20.0);
    for (alpha, frac) in [(1.0, 1.0), (0.5, 0.5), (2.0, 1.0)] {
        let (z, lambda_star) = prop47_barrier(3, 1.0, cbar, 3.0, alpha).unwrap();
        let lambda = frac * lambda_star;
        push(
            format!("prop47 alpha={alpha} lambda={lambda:.4}"),
            verify_supersolution(&m, &Barrier::Power(z), lambda, &grid).unwrap(),
            None,
        );
    }

    for (lambda, beta) in [(1.0, 1.0), (0.75, 0.5), (0.5, 1.5)] {
        let g = prop42_barrier(&h3, lambda, 1.0, beta, [5.0, 6.0, 8.0], 30.0, 2999).unwrap();
        let nodes: Vec<f64> = g.phi().phi.grid().nodes().into_iter().filter(|&r| r > 0.0).collect();
        let outer = glued_outer_bound(&g, &nodes);
        let b = Barrier::Glued(g);
        push(format!("prop42 lambda={lambda} beta={beta}"), verify_supersolution(&h3, &b, lambda, &nodes).unwrap(), Some(outer));
    }
    out
}

/// `ExpBarrier(1, 1)` with `λ = 1` on flat 3-space: must fail.
pub fn barrier_negative_control() -> SupersolutionCheck {
    let m = ModelManifold::euclidean(3).unwrap();
    let b = Barrier::Exp(ExpBarrier::new(1.0, 1.0).unwrap());
    verify_supersolution(&m, &b, 1.0, &linspace(0.0, 40.0, 4001)).unwrap()
}

/// Max nodal error of `Δ_h f` on `B_R` with `cells` cells against the exact
/// Laplacian, over nodes `0..=N` (the pole compared with `n f''(0)`).
pub fn laplacian_error(m: &ModelManifold, f: &dyn RadialFunction, r_max: f64, cells: usize) -> f64 {
    let grid = RadialGrid::new(r_max, cells - 1).unwrap();
    let u = RadialField::from_fn(grid, |r| f.eval(r));
    let lap = apply_laplacian(m, &u).unwrap();
    (0..=grid.n_interior())
        .map(|i| {
            let exact = if i == 0 {
                m.dim() as f64 * f.deriv2(0.0)
            } else {
                apply_laplacian_analytic(m, f, grid.node(i)).unwrap()
            };
            (lap.values()[i] - exact).abs()
        })
        .fold(0.0, f64::max)
}

/// Errors at 100, 200 and 400 cells for every (manifold, function) pair.
pub fn richardson_errors(r_max: f64) -> Vec<(String, Vec<f64>)> {
    let mut out = Vec::new();
    for (mname, m) in builtin_manifolds(r_max) {
        for (fname, f) in smooth_functions() {
            let errs = [100, 200, 400].iter().map(|&c| laplacian_error(&m, &f, r_max, c)).collect();
            out.push((format!("{mname}/{fname}"), errs));
        }
    }
    out
}

/// A forcing paired with an independent closure for `h(t)`.
pub type ForcingCase = (ForcingH, Box<dyn Fn(f64) -> f64>);

/// One member of each forcing family with finite weighted integral for
/// `(p-1)λ ≥ 0.75`.
pub fn forcing_cases() -> Vec<ForcingCase> {
    vec![
        (ForcingH::One, Box::new(|_| 1.0)),
        (ForcingH::power_law(1.5).unwrap(), Box::new(|t: f64| (1.0 + t).powf(1.5))),
        (ForcingH::exponential(0.5).unwrap(), Box::new(|t: f64| (0.5 * t).exp())),
    ]
}
