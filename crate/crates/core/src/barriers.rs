//! Stationary supersolutions of `Δw + λw ≤ 0` and the time envelope
//! `ū(x, t) = e^{-λt} ξ(t) C̃ w(x)` built on top of them.

use std::fmt;

use statrs::function::gamma::gamma_ui;

use crate::error::{hypothesis, invalid, Error, Result};
use crate::forcing::ForcingH;
use crate::geometry::ModelManifold;
use crate::quadrature;
use crate::radial::{apply_laplacian_analytic, RadialField, RadialFunction, RadialGrid};
use crate::spectral::{positive_radial_solution, RadialSolution};

/// Absolute residual accepted by [`verify_supersolution`].
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Number of α candidates scanned by [`prop44_params`].
pub const ALPHA_GRID: usize = 512;

/// Margin applied to the discriminant condition when selecting α.
pub const ALPHA_MARGIN: f64 = 0.9;

/// Radial step of the search for the glue radius of [`prop47_barrier`].
pub const R0_STEP: f64 = 0.01;

/// `v(r) = e^{-βr^α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpBarrier {
    pub alpha: f64,
    pub beta: f64,
}

impl ExpBarrier {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("barrier exponent alpha must be positive, got {alpha}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!("barrier rate beta must be positive, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    /// Right derivative at the pole.
    fn origin_slope(&self) -> f64 {
        if self.alpha < 1.0 {
            f64::NEG_INFINITY
        } else if self.alpha == 1.0 {
            -self.beta
        } else {
            0.0
        }
    }
}

impl RadialFunction for ExpBarrier {
    fn eval(&self, r: f64) -> f64 {
        (-self.beta * r.powf(self.alpha)).exp()
    }

    fn deriv1(&self, r: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        -a * b * r.powf(a - 1.0) * self.eval(r)
    }

    fn deriv2(&self, r: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        -a * b * self.eval(r) * ((a - 1.0) * r.powf(a - 2.0) - a * b * r.powf(2.0 * a - 2.0))
    }
}

/// `ζ = a - br` on `[0, R₀]`, `ζ = r^{-α}` outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBarrier {
    pub alpha: f64,
    pub r0: f64,
    pub a: f64,
    pub b: f64,
}

impl PowerBarrier {
    /// Linear cap matched to `r^{-α}` in value and slope at `r0`.
    pub fn new(alpha: f64, r0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("barrier exponent alpha must be positive, got {alpha}")));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(invalid(format!("glue radius must be positive, got {r0}")));
        }
        let b = alpha * r0.powf(-alpha - 1.0);
        let a = b * r0 + r0.powf(-alpha);
        Ok(Self { alpha, r0, a, b })
    }

    fn outer(&self, r: f64) -> bool {
        r >= self.r0
    }

    fn inner_slope(&self) -> f64 {
        -self.b
    }

    fn outer_slope(&self) -> f64 {
        -self.alpha * self.r0.powf(-self.alpha - 1.0)
    }
}

impl RadialFunction for PowerBarrier {
    fn eval(&self, r: f64) -> f64 {
        if self.outer(r) {
            r.powf(-self.alpha)
        } else {
            self.a - self.b * r
        }
    }

    fn deriv1(&self, r: f64) -> f64 {
        if self.outer(r) {
            -self.alpha * r.powf(-self.alpha - 1.0)
        } else {
            -self.b
        }
    }

    fn deriv2(&self, r: f64) -> f64 {
        if self.outer(r) {
            self.alpha * (self.alpha + 1.0) * r.powf(-self.alpha - 2.0)
        } else {
            0.0
        }
    }
}

/// `w = Cφ` on `B_{R₀}` and `min{Cφ, v}` outside, with `φ` the positive
/// radial solution of `Δφ + λφ = 0`. Beyond the range of `φ`, `w = v`.
#[derive(Debug, Clone)]
pub struct GluedBarrier {
    pub c: f64,
    pub v: ExpBarrier,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    phi: RadialSolution,
    manifold: ModelManifold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Phi,
    Exp,
}

impl GluedBarrier {
    pub fn phi(&self) -> &RadialSolution {
        &self.phi
    }

    pub fn lambda(&self) -> f64 {
        self.phi.lambda
    }

    /// Radius up to which `φ` is available.
    pub fn phi_range(&self) -> f64 {
        self.phi.phi.grid().r_max()
    }

    fn phi_parts(&self, r: f64) -> (f64, f64, f64) {
        let (p, dp) = self.phi.eval(r);
        // φ solves φ'' = -Fφ' - λφ, with φ''(0) = -λ/n at the pole.
        let ddp = if r > 0.0 {
            -self.manifold.drift_at(r) * dp - self.phi.lambda * p
        } else {
            -self.phi.lambda / self.manifold.dim() as f64
        };
        (self.c * p, self.c * dp, self.c * ddp)
    }

    fn piece(&self, r: f64) -> Piece {
        if r < self.r0 {
            Piece::Phi
        } else if r > self.phi_range() {
            Piece::Exp
        } else if self.c * self.phi.eval(r).0 < self.v.eval(r) {
            Piece::Phi
        } else {
            Piece::Exp
        }
    }

    fn sample_parts(&self, piece: Piece, r: f64) -> (f64, f64, f64) {
        match piece {
            Piece::Phi => self.phi_parts(r),
            Piece::Exp => (self.v.eval(r), self.v.deriv1(r), self.v.deriv2(r)),
        }
    }

    /// Radii in `[R₀, range]` where the active piece switches.
    fn crossings(&self) -> Vec<f64> {
        let grid = *self.phi.phi.grid();
        let mut out = Vec::new();
        let start = grid.nodes().iter().position(|&r| r >= self.r0).unwrap_or(grid.len());
        let gap = |r: f64| self.c * self.phi.eval(r).0 - self.v.eval(r);
        for i in start..grid.len() - 1 {
            let (a, b) = (grid.node(i), grid.node(i + 1));
            let (ga, gb) = (gap(a), gap(b));
            if (ga < 0.0) == (gb < 0.0) {
                continue;
            }
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (gap(mid) < 0.0) == (ga < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }
}

impl RadialFunction for GluedBarrier {
    fn eval(&self, r: f64) -> f64 {
        self.sample_parts(self.piece(r), r).0
    }
    fn deriv1(&self, r: f64) -> f64 {
        self.sample_parts(self.piece(r), r).1
    }
    fn deriv2(&self, r: f64) -> f64 {
        self.sample_parts(self.piece(r), r).2
    }
}

/// Any of the stationary barriers.
#[derive(Debug, Clone)]
pub enum Barrier {
    Exp(ExpBarrier),
    Power(PowerBarrier),
    Glued(GluedBarrier),
}

/// Jump in slope at a point where a barrier is not `C¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    pub r: f64,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl Kink {
    /// A kink is admissible for a supersolution when it is concave:
    /// `w'(r⁺) ≤ w'(r⁻)`.
    pub fn is_concave(&self) -> bool {
        let scale = self.left_slope.abs().max(self.right_slope.abs()).max(1e-300);
        self.right_slope <= self.left_slope || (self.right_slope - self.left_slope) <= 1e-9 * scale
    }
}

impl Barrier {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Barrier::Exp(_) => "exp",
            Barrier::Power(_) => "power",
            Barrier::Glued(_) => "glued",
        }
    }

    fn as_fn(&self) -> &dyn RadialFunction {
        match self {
            Barrier::Exp(b) => b,
            Barrier::Power(b) => b,
            Barrier::Glued(b) => b,
        }
    }

    /// Kinks including the pole, where the left slope is taken as 0 by
    /// radial symmetry.
    pub fn kinks(&self) -> Vec<Kink> {
        match self {
            Barrier::Exp(v) => vec![Kink { r: 0.0, left_slope: 0.0, right_slope: v.origin_slope() }],
            Barrier::Power(z) => vec![
                Kink { r: 0.0, left_slope: 0.0, right_slope: z.inner_slope() },
                Kink { r: z.r0, left_slope: z.inner_slope(), right_slope: z.outer_slope() },
            ],
            Barrier::Glued(g) => {
                let mut out = vec![Kink { r: 0.0, left_slope: 0.0, right_slope: g.phi_parts(0.0).1 }];
                let mut points = vec![g.r0];
                points.extend(g.crossings());
                points.push(g.phi_range());
                points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                for r in points {
                    let eps = 1e-9 * r.max(1.0);
                    let left = g.piece((r - eps).max(0.0));
                    let right = g.piece(r + eps);
                    if left != right {
                        out.push(Kink {
                            r,
                            left_slope: g.sample_parts(left, r).1,
                            right_slope: g.sample_parts(right, r).1,
                        });
                    }
                }
                out
            }
        }
    }

    pub fn sup_norm(&self, grid: &RadialGrid) -> f64 {
        match self {
            Barrier::Exp(_) => 1.0,
            Barrier::Power(z) => z.a,
            Barrier::Glued(g) => grid.nodes().iter().map(|&r| g.eval(r)).fold(0.0, f64::max).max(g.c),
        }
    }

    /// Nodal values on `grid`.
    pub fn sample(&self, grid: &RadialGrid) -> RadialField {
        let f = self.as_fn();
        RadialField::from_fn(*grid, |r| f.eval(r))
    }

    /// Serializes to the flat `key=value` form.
    pub fn describe(&self, lambda: f64) -> String {
        match self {
            Barrier::Exp(v) => format!("kind=exp alpha={} beta={} lambda={lambda}", v.alpha, v.beta),
            Barrier::Power(z) => format!("kind=power alpha={} r0={} a={} b={} lambda={lambda}", z.alpha, z.r0, z.a, z.b),
            Barrier::Glued(g) => {
                let grid = g.phi.phi.grid();
                format!(
                    "kind=glued alpha={} beta={} lambda={} c={} r0={} r1={} r2={} r_max={} n_interior={}",
                    g.v.alpha,
                    g.v.beta,
                    g.phi.lambda,
                    g.c,
                    g.r0,
                    g.r1,
                    g.r2,
                    grid.r_max(),
                    grid.n_interior()
                )
            }
        }
    }
}

impl RadialFunction for Barrier {
    fn eval(&self, r: f64) -> f64 {
        self.as_fn().eval(r)
    }
    fn deriv1(&self, r: f64) -> f64 {
        self.as_fn().deriv1(r)
    }
    fn deriv2(&self, r: f64) -> f64 {
        self.as_fn().deriv2(r)
    }
}

/// A barrier together with the `λ` it is certified for.
#[derive(Debug, Clone)]
pub struct BarrierSpec {
    pub barrier: Barrier,
    pub lambda: f64,
}

impl fmt::Display for BarrierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.barrier.describe(self.lambda))
    }
}

impl BarrierSpec {
    /// Parses the `key=value` form produced by [`Barrier::describe`]. Glued
    /// barriers are rebuilt on `m`, which is required for them.
    pub fn parse(text: &str, m: Option<&ModelManifold>) -> Result<Self> {
        let mut kind = None;
        let mut values = std::collections::BTreeMap::new();
        for token in text.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{token}'")))?;
            if key == "kind" {
                kind = Some(value.to_string());
            } else {
                let x: f64 = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("'{key}' is not a number: '{value}'")))?;
                values.insert(key.to_string(), x);
            }
        }
        let get = |key: &str| {
            values
                .get(key)
                .copied()
                .ok_or_else(|| Error::Parse(format!("missing key '{key}'")))
        };
        let lambda = get("lambda")?;
        let barrier = match kind.as_deref() {
            Some("exp") => Barrier::Exp(ExpBarrier::new(get("alpha")?, get("beta")?)?),
            Some("power") => Barrier::Power(PowerBarrier::new(get("alpha")?, get("r0")?)?),
            Some("glued") => {
                let m = m.ok_or_else(|| Error::Parse("glued barriers need a manifold".into()))?;
                let n_interior = get("n_interior")?;
                if n_interior.fract() != 0.0 || n_interior < 1.0 {
                    return Err(Error::Parse(format!("n_interior must be a positive integer, got {n_interior}")));
                }
                let g = prop42_barrier(
                    m,
                    lambda,
                    get("alpha")?,
                    get("beta")?,
                    [get("r1")?, get("r0")?, get("r2")?],
                    get("r_max")?,
                    n_interior as usize,
                )?;
                Barrier::Glued(g)
            }
            Some(other) => return Err(Error::Parse(format!("unknown barrier kind '{other}'"))),
            None => return Err(Error::Parse("missing key 'kind'".into())),
        };
        Ok(Self { barrier, lambda })
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {x}")))
    }
}

fn check_dim(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {n}")));
    }
    Ok(n as f64)
}

/// Roots `(β₋, β₊)` of `β² - sβ + λ`, `s > 0`, `0 < λ ≤ s²/4`, in the
/// cancellation-free form.
fn small_large_roots(s: f64, lambda: f64) -> (f64, f64) {
    let d = (s * s - 4.0 * lambda).max(0.0);
    let large = 0.5 * (s + d.sqrt());
    (lambda / large, large)
}

/// Admissible `β` for `v = e^{-βr}` when every sphere curvature is `≤ -k²`
/// and `0 < λ ≤ (n-1)²k²/4`.
pub fn prop43_window(n: usize, k: f64, lambda: f64) -> Result<(f64, f64)> {
    let nf = check_dim(n)?;
    check_positive("k", k)?;
    check_positive("lambda", lambda)?;
    let s = k * (nf - 1.0);
    let cap = s * s / 4.0;
    if lambda > cap {
        return Err(hypothesis(
            "small-eigenvalue condition",
            format!("requires lambda <= (n-1)^2 k^2 / 4 = {cap}, got {lambda}"),
        ));
    }
    Ok(small_large_roots(s, lambda))
}

/// Smallest feasible `α ∈ (max{1-γ/2, 0}, 1)` on a fixed grid together with
/// the smaller admissible `β`, for `v = e^{-βr^α}` on a manifold whose drift
/// satisfies `F ≥ C̲(n-1)(1+r)^{1+γ/2}/r`.
pub fn prop44_params(n: usize, cbar: f64, gamma: f64, lambda: f64) -> Result<(f64, f64)> {
    let nf = check_dim(n)?;
    check_positive("C", cbar)?;
    check_positive("lambda", lambda)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(hypothesis("curvature growth", format!("requires gamma > 0, got {gamma}")));
    }
    let s = cbar * (nf - 1.0);
    let cap = s * s / 4.0;
    if lambda >= cap {
        return Err(hypothesis(
            "small-eigenvalue condition",
            format!("requires lambda < (n-1)^2 C^2 / 4 = {cap}, got {lambda}"),
        ));
    }
    let lo = (1.0 - gamma / 2.0).max(0.0);
    for j in 0..ALPHA_GRID {
        let alpha = lo + (1.0 - lo) * (j + 1) as f64 / (ALPHA_GRID + 1) as f64;
        let c = s - (1.0 - alpha);
        if c > 0.0 && lambda <= ALPHA_MARGIN * c * c / 4.0 {
            let beta = 2.0 * lambda / (alpha * (c + (c * c - 4.0 * lambda).sqrt()));
            return Ok((alpha, beta));
        }
    }
    Err(hypothesis(
        "exponent window",
        format!("no alpha in ({lo}, 1) satisfies lambda <= [C(n-1) - 1 + alpha]^2/4 with margin for lambda = {lambda}"),
    ))
}

/// Smaller root `β` of `α²β² - αC̲(n-1)β + λ = 0`, for
/// `1 ≤ α ≤ min{1+γ/2, 2}` and `0 < λ ≤ (n-1)²C̲²/4`.
pub fn prop45_params(n: usize, cbar: f64, gamma: f64, lambda: f64, alpha: f64) -> Result<f64> {
    let nf = check_dim(n)?;
    check_positive("C", cbar)?;
    check_positive("lambda", lambda)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    let hi = (1.0 + gamma / 2.0).min(2.0);
    if !(1.0..=hi).contains(&alpha) {
        return Err(hypothesis(
            "exponent window",
            format!("requires 1 <= alpha <= min(1 + gamma/2, 2) = {hi}, got {alpha}"),
        ));
    }
    let s = cbar * (nf - 1.0);
    let cap = s * s / 4.0;
    if lambda > cap {
        return Err(hypothesis(
            "small-eigenvalue condition",
            format!("requires lambda <= (n-1)^2 C^2 / 4 = {cap}, got {lambda}"),
        ));
    }
    // In terms of x = αβ the quadratic is x² - sx + λ.
    Ok(small_large_roots(s, lambda).0 / alpha)
}

/// `λ*(R₀) = αk(n-1)/((α+1)R₀)`, the interior condition with equality.
pub fn prop47_lambda_star(n: usize, k: f64, alpha: f64, r0: f64) -> f64 {
    alpha * k * (n as f64 - 1.0) / ((alpha + 1.0) * r0)
}

/// Power-tail barrier for `γ > 2`: glue radius `R₀` on a grid of step
/// [`R0_STEP`] and the certified `λ*`.
pub fn prop47_barrier(n: usize, k: f64, cbar: f64, gamma: f64, alpha: f64) -> Result<(PowerBarrier, f64)> {
    let nf = check_dim(n)?;
    check_positive("k", k)?;
    check_positive("C", cbar)?;
    check_positive("alpha", alpha)?;
    if !(gamma > 2.0 && gamma.is_finite()) {
        return Err(hypothesis("curvature growth", format!("power-tail barriers require gamma > 2, got {gamma}")));
    }
    // Exterior bracket at r = R with λ = λ*(R); decreasing in R for γ > 2.
    let bracket = |j: u64| {
        let r = j as f64 * R0_STEP;
        alpha * (alpha + 1.0) / (r * r) - alpha * cbar * (nf - 1.0) * r.powf(gamma / 2.0 - 1.0)
            + prop47_lambda_star(n, k, alpha, r)
    };
    let mut hi = 1u64;
    let mut steps = 0;
    while bracket(hi) > 0.0 {
        hi *= 2;
        steps += 1;
        if steps > 100 {
            return Err(Error::NonConvergence("glue radius search did not close in 100 doublings".into()));
        }
    }
    let mut lo = hi / 2;
    if lo == 0 || bracket(lo) <= 0.0 {
        lo = 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bracket(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r0 = hi as f64 * R0_STEP;
    let barrier = PowerBarrier::new(alpha, r0)?;
    Ok((barrier, prop47_lambda_star(n, k, alpha, r0)))
}

/// `C = min over annulus nodes of v/φ`, then `w = Cφ` on `B_{R₀}` and
/// `min{Cφ, v}` outside. `radii = [R₁, R₀, R₂]`.
pub fn prop42_barrier(
    m: &ModelManifold,
    lambda: f64,
    alpha: f64,
    beta: f64,
    radii: [f64; 3],
    r_max: f64,
    n_interior: usize,
) -> Result<GluedBarrier> {
    let [r1, r0, r2] = radii;
    let v = ExpBarrier::new(alpha, beta)?;
    if !(0.0 < r1 && r1 < r0 && r0 < r2 && r2 < r_max) {
        return Err(invalid(format!(
            "radii must satisfy 0 < R1 < R0 < R2 < R_max, got {r1}, {r0}, {r2}, {r_max}"
        )));
    }
    let gamma = m
        .gamma_exponent()
        .ok_or_else(|| invalid("glued barriers need a manifold with a known curvature exponent"))?;
    let lo = (1.0 - gamma / 2.0).max(0.0);
    let hi = 1.0 + gamma / 2.0;
    let in_window = (lo < alpha && alpha < hi) || (gamma == 0.0 && alpha == 1.0);
    if !in_window {
        return Err(hypothesis(
            "exponent window",
            format!("requires max(1 - gamma/2, 0) < alpha < 1 + gamma/2 = ({lo}, {hi}), got {alpha}"),
        ));
    }
    let phi = positive_radial_solution(m, lambda, r_max, n_interior)?;
    if let Some(z) = phi.first_zero {
        return Err(hypothesis(
            "eigenvalue bound",
            format!("positive solution changes sign at r = {z}; lambda = {lambda} exceeds the ball eigenvalue"),
        ));
    }
    let grid = *phi.phi.grid();
    let vals = phi.phi.values();
    let c = (0..grid.len())
        .filter(|&i| (r1..=r2).contains(&grid.node(i)))
        .map(|i| v.eval(grid.node(i)) / vals[i])
        .fold(f64::INFINITY, f64::min);
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid(format!("annulus [{r1}, {r2}] contains no grid node")));
    }
    Ok(GluedBarrier { c, v, r0, r1, r2, phi, manifold: m.clone() })
}

/// Smallest node of `grid` beyond which `v` has nonpositive residual at
/// every node, i.e. the radius after which `v` is a classical
/// supersolution on the sampled range.
pub fn lemma41_radius(m: &ModelManifold, v: &ExpBarrier, lambda: f64, grid: &[f64]) -> Result<Option<f64>> {
    let mut radius = None;
    for &r in grid.iter().rev() {
        if r <= 0.0 {
            break;
        }
        let res = apply_laplacian_analytic(m, v, r)? + lambda * v.eval(r);
        if res > 0.0 {
            break;
        }
        radius = Some(r);
    }
    Ok(radius)
}

/// Verdict of [`verify_supersolution`].
#[derive(Debug, Clone)]
pub struct SupersolutionCheck {
    /// `max (w'' + Fw' + λw)` over the checked nodes.
    pub max_residual: f64,
    /// Same maximum divided by `w` at each node.
    pub max_relative_residual: f64,
    pub worst_r: f64,
    pub kinks: Vec<Kink>,
    pub nodes_checked: usize,
    pub pass: bool,
}

/// Evaluates `w'' + F w' + λw` analytically at every grid node with `r > 0`
/// that is not a kink, and checks the one-sided slopes at the kinks.
pub fn verify_supersolution(m: &ModelManifold, barrier: &Barrier, lambda: f64, grid: &[f64]) -> Result<SupersolutionCheck> {
    let kinks = barrier.kinks();
    let mut max_residual = f64::NEG_INFINITY;
    let mut max_relative = f64::NEG_INFINITY;
    let mut worst_r = f64::NAN;
    let mut checked = 0;
    for &r in grid {
        if r <= 0.0 || kinks.iter().any(|k| (k.r - r).abs() <= 1e-12 * r.max(1.0)) {
            continue;
        }
        let w = barrier.eval(r);
        let res = apply_laplacian_analytic(m, barrier, r)? + lambda * w;
        checked += 1;
        if res > max_residual || max_residual.is_nan() {
            max_residual = res;
            worst_r = r;
        }
        if w > 0.0 {
            max_relative = max_relative.max(res / w);
        }
    }
    let kinks_ok = kinks.iter().all(Kink::is_concave);
    let pass = checked > 0 && max_residual <= RESIDUAL_TOL && kinks_ok;
    Ok(SupersolutionCheck {
        max_residual,
        max_relative_residual: max_relative,
        worst_r,
        kinks,
        nodes_checked: checked,
        pass,
    })
}

/// Worst violation of `0 < w ≤ v` at the nodes of `grid` outside `R₀`.
pub fn glued_outer_bound(g: &GluedBarrier, grid: &[f64]) -> f64 {
    grid.iter()
        .filter(|&&r| r >= g.r0)
        .map(|&r| {
            let w = g.eval(r);
            if w <= 0.0 {
                f64::INFINITY
            } else {
                w - g.v.eval(r)
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `h̃`, `H̃`, `ξ` and the amplitude bound `C̃_max` for one forcing.
#[derive(Debug, Clone)]
pub struct TimeEnvelope {
    pub lambda: f64,
    pub p: f64,
    pub forcing: ForcingH,
    /// `‖w‖∞` of the barrier the envelope multiplies.
    pub barrier_sup_norm: f64,
    /// `H̃_∞`, `None` when divergent.
    pub h_tilde_inf: Option<f64>,
}

/// Builds the envelope for `h`, `λ > 0`, `p > 1` and a barrier of sup norm
/// `barrier_sup_norm`.
pub fn time_envelope(forcing: ForcingH, lambda: f64, p: f64, barrier_sup_norm: f64) -> Result<TimeEnvelope> {
    forcing.validate()?;
    check_positive("lambda", lambda)?;
    check_positive("barrier sup norm", barrier_sup_norm)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    let a = (p - 1.0) * lambda;
    let h_tilde_inf = match forcing {
        ForcingH::One => Some(1.0 / a),
        ForcingH::Exponential { sigma } => (a > sigma).then(|| 1.0 / (a - sigma)),
        ForcingH::PowerLaw { q } => Some(power_law_tail(q, a)),
    };
    Ok(TimeEnvelope { lambda, p, forcing, barrier_sup_norm, h_tilde_inf })
}

/// `∫₀^∞ (1+s)^q e^{-as} ds = e^a a^{-(q+1)} Γ(q+1, a)`.
fn power_law_tail(q: f64, a: f64) -> f64 {
    let closed = if a < 600.0 {
        a.exp() * a.powf(-(q + 1.0)) * gamma_ui(q + 1.0, a)
    } else {
        f64::NAN
    };
    if closed.is_finite() && closed > 0.0 {
        closed
    } else {
        quadrature::integrate_to_infinity(|s| (1.0 + s).powf(q) * (-a * s).exp(), 0.0, 1e-14)
    }
}

impl TimeEnvelope {
    fn rate(&self) -> f64 {
        (self.p - 1.0) * self.lambda
    }

    /// `h̃(t) = h(t) e^{-(p-1)λt}`.
    pub fn h_tilde(&self, t: f64) -> f64 {
        self.forcing.eval(t) * (-self.rate() * t).exp()
    }

    /// `H̃(t) = ∫₀ᵗ h̃`.
    pub fn h_tilde_integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let a = self.rate();
        match self.forcing {
            ForcingH::One => -(-a * t).exp_m1() / a,
            ForcingH::Exponential { sigma } => {
                let c = a - sigma;
                if c == 0.0 {
                    t
                } else {
                    -(-c * t).exp_m1() / c
                }
            }
            ForcingH::PowerLaw { .. } => quadrature::integrate(|s| self.h_tilde(s), 0.0, t, 1e-14 * (1.0 + t)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.h_tilde_inf.is_some()
    }

    /// `(1/‖w‖∞)[1/((p-1)H̃_∞)]^{1/(p-1)}`; `None` when `H̃_∞ = ∞`.
    pub fn c_tilde_max(&self) -> Option<f64> {
        let hinf = self.h_tilde_inf?;
        let pm1 = self.p - 1.0;
        Some((1.0 / (pm1 * hinf)).powf(1.0 / pm1) / self.barrier_sup_norm)
    }

    /// `ξ(t) = [1 - (p-1)W^{p-1}H̃(t)]^{-1/(p-1)}` with `W = C̃‖w‖∞`;
    /// `+∞` once the bracket reaches zero.
    pub fn xi(&self, c_tilde: f64, t: f64) -> f64 {
        let pm1 = self.p - 1.0;
        let w = c_tilde * self.barrier_sup_norm;
        let base = 1.0 - pm1 * w.powf(pm1) * self.h_tilde_integral(t);
        if base <= 0.0 {
            f64::INFINITY
        } else {
            base.powf(-1.0 / pm1)
        }
    }

    /// Time factor `e^{-λt} ξ(t)` of the envelope `ū = e^{-λt}ξ(t)C̃w`.
    pub fn factor(&self, c_tilde: f64, t: f64) -> f64 {
        (-self.lambda * t).exp() * self.xi(c_tilde, t)
    }
}
