//! Thomas algorithm for tridiagonal systems.
//!
//! `lower[i]` multiplies `x[i-1]` in row `i` (so `lower[0]` is unused),
//! `upper[i]` multiplies `x[i+1]` (so `upper[n-1]` is unused).

/// Solves the tridiagonal system in place; `rhs` is overwritten with the
/// solution. `scratch` must have the same length as `rhs`.
///
/// No pivoting. Callers only pass diagonally dominant matrices.
pub fn solve_in_place(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n && scratch.len() == n);
    if n == 0 {
        return;
    }
    let mut denom = diag[0];
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Allocating convenience wrapper around [`solve_in_place`].
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let mut x = rhs.to_vec();
    let mut scratch = vec![0.0; rhs.len()];
    solve_in_place(lower, diag, upper, &mut x, &mut scratch);
    x
}
