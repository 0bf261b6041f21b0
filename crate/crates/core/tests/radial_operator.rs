mod common;

use proptest::prelude::*;
use warpheat::radial::{apply_laplacian, rayleigh_quotient, RadialField, RadialGrid};
use warpheat::spectral::dirichlet_lambda1;
use warpheat::ModelManifold;

const R: f64 = 4.0;

#[test]
fn richardson_order_two_on_builtin_manifolds() {
    for (label, errs) in common::richardson_errors(R) {
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (3.5..=4.5).contains(&ratio) && (ratio.log2() - 2.0).abs() <= 0.5,
                "{label}: errors {errs:?}, ratio {ratio}"
            );
        }
    }
}

#[test]
fn hyperbolic_exponential_error_ratio() {
    // u = e^{-r} is not smooth at the pole, so compare away from it.
    let m = ModelManifold::hyperbolic(3, 1.0).unwrap();
    let err = |cells: usize| {
        let grid = RadialGrid::new(R, cells - 1).unwrap();
        let u = RadialField::from_fn(grid, |r| (-r).exp());
        let lap = apply_laplacian(&m, &u).unwrap();
        (1..=grid.n_interior())
            .filter(|&i| grid.node(i) >= 1.0)
            .map(|i| {
                let r = grid.node(i);
                (lap.values()[i] - (-r).exp() * (1.0 - 2.0 / r.tanh())).abs()
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(100), err(200));
    let dr = R / 100.0;
    assert!(e1 < 0.5 * dr * dr, "error {e1}");
    assert!((3.5..=4.5).contains(&(e1 / e2)), "ratio {}", e1 / e2);
}

#[test]
fn maximum_principle_at_interior_maximum() {
    // A field with a strict interior maximum has Δ_h u <= 0 there.
    for (name, m) in common::builtin_manifolds(R) {
        let grid = RadialGrid::new(R, 199).unwrap();
        for peak in [0.0, 1.0, 2.5] {
            let u = RadialField::from_fn(grid, |r| (-(r - peak).powi(2)).exp());
            let i = grid.nearest(peak);
            let lap = apply_laplacian(&m, &u).unwrap();
            assert!(lap.values()[i] <= 0.0, "{name}: Δu = {} at r = {peak}", lap.values()[i]);
        }
    }
}

#[test]
fn rayleigh_quotient_reproduces_eigenvalue() {
    for (name, m) in common::builtin_manifolds(5.0) {
        let est = dirichlet_lambda1(&m, 5.0, 999).unwrap();
        let q = rayleigh_quotient(&m, &est.eigenfunction).unwrap();
        assert!((q - est.lambda1).abs() < 1e-6 * est.lambda1.max(1.0), "{name}: {q} vs {}", est.lambda1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn laplacian_is_linear(
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        s in 0.1f64..3.0,
        t in 0.1f64..3.0,
        which in 0usize..3,
    ) {
        let (_, m) = common::builtin_manifolds(R).swap_remove(which);
        let grid = RadialGrid::new(R, 99).unwrap();
        let u = RadialField::from_fn(grid, |r| (-s * r * r).exp());
        let w = RadialField::from_fn(grid, |r| (t * r).cos());
        let combo = RadialField::from_fn(grid, |r| a * (-s * r * r).exp() + b * (t * r).cos());
        let (lu, lw, lc) = (
            apply_laplacian(&m, &u).unwrap(),
            apply_laplacian(&m, &w).unwrap(),
            apply_laplacian(&m, &combo).unwrap(),
        );
        let scale = lc.values().iter().chain(lu.values()).chain(lw.values()).fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..grid.len() {
            let lin = a * lu.values()[i] + b * lw.values()[i];
            prop_assert!((lc.values()[i] - lin).abs() <= 1e-12 * scale * (a.abs() + b.abs() + 1.0));
        }
    }
}
