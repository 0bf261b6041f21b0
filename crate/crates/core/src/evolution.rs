//! `∂ₜu = Δu + h(t)uᵖ` on balls `B_R` with Dirichlet data, radial `u`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::barriers::{Barrier, TimeEnvelope};
use crate::error::{invalid, Error, Result};
use crate::forcing::ForcingH;
use crate::geometry::ModelManifold;
use crate::radial::{fmt_num, sup_norm_slice, RadialField, RadialFunction, RadialGrid, RadialOperator};
use crate::tridiag;

/// Time-stepping controls.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionControls {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Sup-norm cap for blow-up; `None` means `1e8·‖u0‖∞`.
    pub blowup_threshold: Option<f64>,
    pub t_end: f64,
    pub rel_tol: f64,
    /// Number of equally spaced snapshot times in `(0, t_end]`.
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for EvolutionControls {
    fn default() -> Self {
        Self {
            dt_init: 1e-3,
            dt_min: 1e-12,
            dt_max: 0.25,
            blowup_threshold: None,
            t_end: 50.0,
            rel_tol: 1e-3,
            samples: 50,
            max_steps: 5_000_000,
        }
    }
}

impl EvolutionControls {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt_min > 0.0
            && self.dt_min < self.dt_init
            && self.dt_init <= self.dt_max
            && self.dt_max.is_finite()
            && self.t_end > 0.0
            && self.t_end.is_finite()
            && self.rel_tol > 0.0
            && self.samples > 0;
        if !ok {
            return Err(invalid(format!(
                "controls need 0 < dt_min < dt_init <= dt_max, t_end > 0, rel_tol > 0, samples > 0; got {self:?}"
            )));
        }
        if let Some(th) = self.blowup_threshold {
            if !(th > 0.0 && th.is_finite()) {
                return Err(invalid(format!("blow-up threshold must be finite and positive, got {th}")));
            }
        }
        Ok(())
    }

    fn threshold(&self, u0_sup: f64) -> f64 {
        self.blowup_threshold.unwrap_or(1e8 * u0_sup)
    }

    fn sample_times(&self) -> Vec<f64> {
        (1..=self.samples).map(|j| self.t_end * j as f64 / self.samples as f64).collect()
    }
}

/// Source term of the evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reaction {
    /// `h(t) max(u, 0)^p`.
    Power { h: ForcingH, p: f64 },
    /// `λu`; linear test hook with a known exact solution.
    Linear { lambda: f64 },
}

impl Reaction {
    fn eval(&self, t: f64, u: f64) -> f64 {
        match *self {
            Reaction::Power { h, p } => h.eval(t) * u.max(0.0).powf(p),
            Reaction::Linear { lambda } => lambda * u,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    GlobalUpToHorizon,
    BlowUp(f64),
    Undecided,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::GlobalUpToHorizon => "global-up-to-horizon",
            Verdict::BlowUp(_) => "blow-up",
            Verdict::Undecided => "undecided",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::BlowUp(t) => write!(f, "blow-up at t = {t}"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryPoint {
    pub t: f64,
    pub sup_norm: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: RadialField,
}

/// Result of one run on one ball.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub verdict: Verdict,
    /// One entry per accepted step, starting with `(0, ‖u0‖∞, 0)`.
    pub history: Vec<HistoryPoint>,
    /// `u0` followed by the fields at the sample times reached.
    pub snapshots: Vec<Snapshot>,
    pub final_field: RadialField,
    pub final_time: f64,
    /// Smallest nodal value seen over all accepted steps.
    pub min_value: f64,
    pub rejected_steps: usize,
    pub diagnostic: Option<String>,
}

impl RunOutcome {
    pub fn initial_sup(&self) -> f64 {
        self.history[0].sup_norm
    }

    pub fn grid(&self) -> &RadialGrid {
        self.final_field.grid()
    }

    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "sup_norm", "dt"])?;
        for h in &self.history {
            w.write_record([fmt_num(h.t), fmt_num(h.sup_norm), fmt_num(h.dt)])?;
        }
        w.flush()?;
        Ok(())
    }

    fn accepted_times(&self) -> Vec<f64> {
        self.history[1..].iter().map(|h| h.t).collect()
    }
}

struct Stepper {
    op: RadialOperator,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    scratch: Vec<f64>,
    full: Vec<f64>,
    half: Vec<f64>,
}

impl Stepper {
    fn new(m: &ModelManifold, grid: RadialGrid) -> Result<Self> {
        let op = RadialOperator::new(m, grid)?;
        let size = op.diag.len();
        Ok(Self {
            op,
            lower: vec![0.0; size],
            diag: vec![0.0; size],
            upper: vec![0.0; size],
            scratch: vec![0.0; size],
            full: vec![0.0; size + 1],
            half: vec![0.0; size + 1],
        })
    }

    /// One step of size `h` and two of size `h/2`; writes the extrapolated
    /// value `max(2u_{h/2} - u_h, 0)` to `out` and returns `max |u_{h/2} - u_h|`.
    fn advance(&mut self, reaction: &Reaction, u: &[f64], t: f64, h: f64, out: &mut [f64]) -> f64 {
        let mut full = std::mem::take(&mut self.full);
        let mut half = std::mem::take(&mut self.half);
        self.step(reaction, u, t, h, &mut full);
        self.step(reaction, u, t, 0.5 * h, &mut half);
        self.step(reaction, &half, t + 0.5 * h, 0.5 * h, out);
        let mut diff: f64 = 0.0;
        let mut finite = true;
        for (o, f) in out.iter_mut().zip(&full) {
            let d = *o - f;
            finite &= d.is_finite();
            diff = diff.max(d.abs());
            *o = (*o + d).max(0.0);
        }
        if !finite {
            diff = f64::NAN;
        }
        self.full = full;
        self.half = half;
        diff
    }

    /// One IMEX Euler step: `(I - dtΔ_h)u⁺ = u + dt·f(t, u)`.
    fn step(&mut self, reaction: &Reaction, u: &[f64], t: f64, dt: f64, out: &mut [f64]) {
        let size = self.diag.len();
        for i in 0..size {
            self.lower[i] = -dt * self.op.lower[i];
            self.diag[i] = 1.0 - dt * self.op.diag[i];
            self.upper[i] = -dt * self.op.upper[i];
            out[i] = u[i] + dt * reaction.eval(t, u[i]);
        }
        tridiag::solve_in_place(&self.lower, &self.diag, &self.upper, &mut out[..size], &mut self.scratch);
        out[size] = 0.0;
    }
}

fn check_initial(m: &ModelManifold, u0: &RadialField) -> Result<()> {
    let v = u0.values();
    if let Some(x) = v.iter().find(|&&x| x < 0.0) {
        return Err(invalid(format!("initial data must be nonnegative, found {x}")));
    }
    if *v.last().unwrap() != 0.0 {
        return Err(invalid("initial data must vanish on the boundary of the ball"));
    }
    if u0.grid().r_max() > m.r_max() * (1.0 + 1e-12) {
        return Err(Error::GridMismatch(format!(
            "ball radius {} exceeds the manifold range {}",
            u0.grid().r_max(),
            m.r_max()
        )));
    }
    Ok(())
}

/// Solves on the ball carried by `u0`'s grid with `h(t)uᵖ`, `p > 1`.
pub fn solve_on_ball(m: &ModelManifold, u0: &RadialField, h: ForcingH, p: f64, controls: &EvolutionControls) -> Result<RunOutcome> {
    h.validate()?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    solve_with_reaction(m, u0, Reaction::Power { h, p }, controls)
}

/// Adaptive IMEX integration with step-doubling error control.
pub fn solve_with_reaction(m: &ModelManifold, u0: &RadialField, reaction: Reaction, controls: &EvolutionControls) -> Result<RunOutcome> {
    controls.validate()?;
    check_initial(m, u0)?;
    let grid = *u0.grid();
    let mut stepper = Stepper::new(m, grid)?;
    let len = grid.len();
    let u0_sup = sup_norm_slice(u0.values());
    let threshold = controls.threshold(u0_sup);
    let samples = controls.sample_times();

    let mut u = u0.values().to_vec();
    let mut two = vec![0.0; len];
    let mut t = 0.0;
    let mut dt = controls.dt_init;
    let mut next_sample = 0;
    let mut run = RunOutcome {
        verdict: Verdict::Undecided,
        history: vec![HistoryPoint { t: 0.0, sup_norm: u0_sup, dt: 0.0 }],
        snapshots: vec![Snapshot { t: 0.0, field: u0.clone() }],
        final_field: u0.clone(),
        final_time: 0.0,
        min_value: u.iter().copied().fold(f64::INFINITY, f64::min),
        rejected_steps: 0,
        diagnostic: None,
    };
    let mut steps = 0;
    loop {
        if next_sample >= samples.len() {
            run.verdict = Verdict::GlobalUpToHorizon;
            break;
        }
        if steps >= controls.max_steps {
            run.diagnostic = Some(format!("step cap {} reached at t = {t}", controls.max_steps));
            break;
        }
        let target = samples[next_sample];
        let mut h = dt.min(controls.dt_max);
        let clipped = t + h >= target;
        if clipped {
            h = target - t;
        }
        let diff = stepper.advance(&reaction, &u, t, h, &mut two);
        let sup = sup_norm_slice(&two);
        if !(diff.is_finite() && sup.is_finite()) {
            run.diagnostic = Some(format!("non-finite values at t = {t}, sup norm before {}", sup_norm_slice(&u)));
            break;
        }
        let err = diff / (controls.rel_tol * sup.max(f64::MIN_POSITIVE));
        let factor = if err > 0.0 { (0.9 * err.powf(-0.5)).clamp(0.2, 4.0) } else { 4.0 };
        if err > 1.0 {
            run.rejected_steps += 1;
            dt = h * factor;
            if dt < controls.dt_min {
                let now = sup_norm_slice(&u);
                if now > threshold {
                    run.verdict = Verdict::BlowUp(t);
                } else {
                    run.diagnostic = Some(format!("step size collapsed below {} at t = {t} with sup norm {now}", controls.dt_min));
                }
                break;
            }
            continue;
        }
        steps += 1;
        t = if clipped { target } else { t + h };
        std::mem::swap(&mut u, &mut two);
        run.min_value = run.min_value.min(u.iter().copied().fold(f64::INFINITY, f64::min));
        run.history.push(HistoryPoint { t, sup_norm: sup, dt: h });
        if clipped {
            run.snapshots.push(Snapshot { t, field: RadialField::from_vec_unchecked(grid, u.clone()) });
            next_sample += 1;
            // Keep the controller's proposal rather than the clipped step.
            dt = dt.max(h * factor);
        } else {
            dt = h * factor;
        }
        if dt < controls.dt_min {
            if sup > threshold {
                run.verdict = Verdict::BlowUp(t);
            } else {
                run.diagnostic = Some(format!("step size collapsed below {} at t = {t} with sup norm {sup}", controls.dt_min));
            }
            break;
        }
    }
    run.final_time = t;
    run.final_field = RadialField::from_vec_unchecked(grid, u);
    Ok(run)
}

/// Marches through the prescribed accepted times of another run with the
/// same samples; no error control.
fn solve_on_schedule(m: &ModelManifold, u0: &RadialField, reaction: Reaction, controls: &EvolutionControls, times: &[f64]) -> Result<RunOutcome> {
    check_initial(m, u0)?;
    let grid = *u0.grid();
    let mut stepper = Stepper::new(m, grid)?;
    let u0_sup = sup_norm_slice(u0.values());
    let samples = controls.sample_times();
    let mut u = u0.values().to_vec();
    let mut next = vec![0.0; grid.len()];
    let mut t = 0.0;
    let mut sample = 0;
    let mut run = RunOutcome {
        verdict: Verdict::Undecided,
        history: vec![HistoryPoint { t: 0.0, sup_norm: u0_sup, dt: 0.0 }],
        snapshots: vec![Snapshot { t: 0.0, field: u0.clone() }],
        final_field: u0.clone(),
        final_time: 0.0,
        min_value: u.iter().copied().fold(f64::INFINITY, f64::min),
        rejected_steps: 0,
        diagnostic: None,
    };
    for &tn in times {
        let h = tn - t;
        let diff = stepper.advance(&reaction, &u, t, h, &mut next);
        if !diff.is_finite() {
            run.diagnostic = Some(format!("non-finite values at t = {t}"));
            break;
        }
        std::mem::swap(&mut u, &mut next);
        t = tn;
        run.min_value = run.min_value.min(u.iter().copied().fold(f64::INFINITY, f64::min));
        run.history.push(HistoryPoint { t, sup_norm: sup_norm_slice(&u), dt: h });
        if sample < samples.len() && t == samples[sample] {
            run.snapshots.push(Snapshot { t, field: RadialField::from_vec_unchecked(grid, u.clone()) });
            sample += 1;
        }
    }
    if sample == samples.len() {
        run.verdict = Verdict::GlobalUpToHorizon;
    }
    run.final_time = t;
    run.final_field = RadialField::from_vec_unchecked(grid, u);
    Ok(run)
}

/// Nested runs on `B_{R_1} ⊂ B_{R_2} ⊂ …` and their comparison.
#[derive(Debug, Clone)]
pub struct ExhaustionReport {
    pub radii: Vec<f64>,
    pub outcomes: Vec<RunOutcome>,
    /// `max (u_{R_j} - u_{R_{j+1}})` over shared nodes and common snapshots,
    /// one entry per consecutive pair.
    pub monotonicity_violations: Vec<f64>,
    /// `max |u_{R_j} - u_{R_{j+1}}|` over shared nodes and common snapshots.
    pub gaps: Vec<f64>,
    pub tolerance: f64,
    /// True when the larger balls were marched on the step schedule of the
    /// largest one.
    pub shared_schedule: bool,
}

impl ExhaustionReport {
    pub fn monotone(&self) -> bool {
        self.monotonicity_violations.iter().all(|&v| v <= self.tolerance)
    }

    pub fn gaps_decreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] <= w[0])
    }

    /// Blow-up times, `None` for runs without blow-up.
    pub fn blowup_times(&self) -> Vec<Option<f64>> {
        self.outcomes
            .iter()
            .map(|o| match o.verdict {
                Verdict::BlowUp(t) => Some(t),
                _ => None,
            })
            .collect()
    }

    pub fn warning(&self) -> Option<String> {
        (!self.monotone()).then(|| {
            format!(
                "nested solutions not monotone in R beyond {:.3e}: violations {:?}",
                self.tolerance, self.monotonicity_violations
            )
        })
    }
}

/// Runs every ball of `radii` (increasing) at spacing `dr` with
/// `u0 = init(grid)`. When the largest ball reaches the horizon, the others
/// reuse its accepted step times so the discrete comparison principle
/// applies exactly; otherwise each ball is integrated adaptively.
pub fn exhaustion_solve(
    m: &ModelManifold,
    radii: &[f64],
    dr: f64,
    init: &(dyn Fn(&RadialGrid) -> RadialField + Sync),
    h: ForcingH,
    p: f64,
    controls: &EvolutionControls,
) -> Result<ExhaustionReport> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("radii must be nonempty and strictly increasing, got {radii:?}")));
    }
    let grids = radii.iter().map(|&r| RadialGrid::with_spacing(r, dr)).collect::<Result<Vec<_>>>()?;
    let last = grids.len() - 1;
    let largest = solve_on_ball(m, &init(&grids[last]), h, p, controls)?;
    let shared = largest.verdict == Verdict::GlobalUpToHorizon;
    let times = largest.accepted_times();
    let reaction = Reaction::Power { h, p };
    let mut outcomes = grids[..last]
        .par_iter()
        .map(|g| {
            let u0 = init(g);
            if shared {
                solve_on_schedule(m, &u0, reaction, controls, &times)
            } else {
                solve_on_ball(m, &u0, h, p, controls)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    outcomes.push(largest);
    let tolerance = 1e-3 * outcomes.iter().map(|o| o.initial_sup()).fold(0.0, f64::max);
    let mut violations = Vec::new();
    let mut gaps = Vec::new();
    for pair in outcomes.windows(2) {
        let (small, big) = (&pair[0], &pair[1]);
        let mut worst = f64::NEG_INFINITY;
        let mut gap: f64 = 0.0;
        for (a, b) in small.snapshots.iter().zip(&big.snapshots) {
            if a.t != b.t {
                break;
            }
            let (va, vb) = (a.field.values(), b.field.values());
            let ga = a.field.grid();
            for (i, &u) in va.iter().enumerate() {
                let d = u - vb[b.field.grid().nearest(ga.node(i))];
                worst = worst.max(d);
                gap = gap.max(d.abs());
            }
        }
        violations.push(worst);
        gaps.push(gap);
    }
    Ok(ExhaustionReport {
        radii: radii.to_vec(),
        outcomes,
        monotonicity_violations: violations,
        gaps,
        tolerance,
        shared_schedule: shared,
    })
}

/// Comparison of a run against `ū = e^{-λt}ξ(t)C̃w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeComparison {
    /// `max (u - ū)` over snapshot times and nodes.
    pub max_violation: f64,
    pub worst_t: f64,
    pub worst_r: f64,
    /// `max (‖u‖∞ - e^{-λt}ξ(t)C̃‖w‖∞)` over snapshot times.
    pub max_sup_violation: f64,
    /// Most negative nodal value seen.
    pub min_value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `0 ≤ u ≤ ū + tol` at all snapshots; `tol = None` means
/// `1e-3·‖u0‖∞`.
pub fn compare_with_envelope(
    run: &RunOutcome,
    barrier: &Barrier,
    envelope: &TimeEnvelope,
    c_tilde: f64,
    tol: Option<f64>,
) -> EnvelopeComparison {
    let tolerance = tol.unwrap_or(1e-3 * run.initial_sup());
    let grid = run.grid();
    let w: Vec<f64> = grid.nodes().iter().map(|&r| barrier.eval(r)).collect();
    let w_sup = envelope.barrier_sup_norm;
    let mut out = EnvelopeComparison {
        max_violation: f64::NEG_INFINITY,
        worst_t: 0.0,
        worst_r: 0.0,
        max_sup_violation: f64::NEG_INFINITY,
        min_value: run.min_value,
        tolerance,
        pass: false,
    };
    for snap in &run.snapshots {
        let factor = envelope.factor(c_tilde, snap.t);
        let u = snap.field.values();
        for (i, (&ui, &wi)) in u.iter().zip(&w).enumerate() {
            let d = ui - factor * c_tilde * wi;
            if d > out.max_violation {
                out.max_violation = d;
                out.worst_t = snap.t;
                out.worst_r = grid.node(i);
            }
        }
        out.max_sup_violation = out.max_sup_violation.max(sup_norm_slice(u) - factor * c_tilde * w_sup);
    }
    out.pass = out.max_violation <= tolerance && out.max_sup_violation <= tolerance && out.min_value >= -1e-12;
    out
}

/// Whether `[H(t)]^{1/(p-1)} / e^{(λ₁+ε)t} → ∞`.
pub fn blowup_criterion(h: ForcingH, p: f64, lambda1: f64, epsilon: f64) -> Result<bool> {
    h.validate()?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    if !(lambda1 > 0.0 && lambda1.is_finite()) {
        return Err(invalid(format!("lambda1 must be positive, got {lambda1}")));
    }
    if !(epsilon > 0.0 && epsilon < lambda1) {
        return Err(invalid(format!("epsilon must lie in (0, lambda1) = (0, {lambda1}), got {epsilon}")));
    }
    Ok(match h {
        ForcingH::One | ForcingH::PowerLaw { .. } => false,
        ForcingH::Exponential { sigma } => sigma / (p - 1.0) > lambda1 + epsilon,
    })
}

/// `c·w` sampled on `grid`, with the boundary node set to zero.
pub fn scaled_barrier(barrier: &Barrier, c: f64, grid: &RadialGrid) -> RadialField {
    barrier.sample(grid).scaled(c).with_zero_boundary()
}

/// `A(1 - (r/ρ)²)²` on `B_ρ`, zero outside.
pub fn bump(amplitude: f64, radius: f64, grid: &RadialGrid) -> Result<RadialField> {
    if !(amplitude >= 0.0 && amplitude.is_finite() && radius > 0.0) {
        return Err(invalid(format!("bump needs amplitude >= 0 and radius > 0, got {amplitude}, {radius}")));
    }
    Ok(RadialField::from_fn(*grid, |r| {
        let s = r / radius;
        if s < 1.0 {
            amplitude * (1.0 - s * s).powi(2)
        } else {
            0.0
        }
    })
    .with_zero_boundary())
}

/// `A·min{1, r^{-α}}` with the boundary node set to zero.
pub fn power_tail(amplitude: f64, alpha: f64, grid: &RadialGrid) -> Result<RadialField> {
    if !(amplitude >= 0.0 && amplitude.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("power tail needs amplitude >= 0 and alpha > 0, got {amplitude}, {alpha}")));
    }
    Ok(RadialField::from_fn(*grid, |r| amplitude * r.powf(-alpha).min(1.0)).with_zero_boundary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dirichlet_lambda1;

    #[test]
    fn zero_data_stays_zero() {
        let m = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let grid = RadialGrid::new(5.0, 99).unwrap();
        let u0 = RadialField::zeros(grid);
        let c = EvolutionControls { t_end: 2.0, ..Default::default() };
        let run = solve_on_ball(&m, &u0, ForcingH::Exponential { sigma: 1.0 }, 2.0, &c).unwrap();
        assert_eq!(run.verdict, Verdict::GlobalUpToHorizon);
        assert!(run.final_field.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_bad_initial_data() {
        let m = ModelManifold::euclidean(3).unwrap();
        let grid = RadialGrid::new(1.0, 9).unwrap();
        let c = EvolutionControls::default();
        let neg = RadialField::from_fn(grid, |r| r - 0.5).with_zero_boundary();
        assert!(solve_on_ball(&m, &neg, ForcingH::One, 2.0, &c).is_err());
        let nonzero = RadialField::from_fn(grid, |_| 1.0);
        assert!(solve_on_ball(&m, &nonzero, ForcingH::One, 2.0, &c).is_err());
    }

    #[test]
    fn linear_hook_follows_eigenvalue() {
        let m = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let e = dirichlet_lambda1(&m, 5.0, 199).unwrap();
        let lambda = 0.3;
        let c = EvolutionControls { t_end: 1.0, rel_tol: 1e-7, samples: 4, ..Default::default() };
        let run = solve_with_reaction(&m, &e.eigenfunction, Reaction::Linear { lambda }, &c).unwrap();
        let expect = ((lambda - e.lambda1) * 1.0).exp();
        let got = run.final_field.values()[0] / e.eigenfunction.values()[0];
        assert!((got / expect - 1.0).abs() < 1e-4, "{got} vs {expect}");
    }

    #[test]
    fn criterion_cases() {
        assert!(!blowup_criterion(ForcingH::One, 2.0, 1.0, 0.5).unwrap());
        assert!(blowup_criterion(ForcingH::Exponential { sigma: 2.0 }, 1.5, 1.0, 0.5).unwrap());
        assert!(!blowup_criterion(ForcingH::Exponential { sigma: 1.0 }, 3.0, 1.0, 0.1).unwrap());
        assert!(blowup_criterion(ForcingH::One, 2.0, 1.0, 1.0).is_err());
    }
}
