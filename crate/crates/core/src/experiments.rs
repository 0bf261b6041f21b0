//! The five experiment commands. Each writes deterministic artifacts under
//! an output directory and returns its verification verdicts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::barriers::{
    glued_outer_bound, prop42_barrier, prop43_window, prop44_params, prop45_params, prop47_barrier, time_envelope,
    verify_supersolution, Barrier, ExpBarrier, TimeEnvelope,
};
use crate::config::{BarrierChoice, ExperimentConfig, InitialSpec, LambdaPolicy};
use crate::error::{hypothesis, invalid, Result};
use crate::evolution::{bump, compare_with_envelope, scaled_barrier, solve_on_ball, EnvelopeComparison, RunOutcome, Verdict};
use crate::forcing::ForcingH;
use crate::geometry::{check_a0, drift_lower_bound_constant, linspace, ModelManifold};
use crate::radial::{apply_laplacian_analytic, fmt_num, RadialField, RadialFunction, RadialGrid};
use crate::spectral::{dirichlet_lambda1, lambda1_estimate, mckean_bound, write_eigen_csv};
use crate::svg;

/// Built-in experiment presets, `(name, TOML)`.
pub const PRESETS: [(&str, &str); 3] = [
    ("exp-forcing-hyperbolic", include_str!("../presets/exp-forcing-hyperbolic.toml")),
    ("power-tail-gamma3", include_str!("../presets/power-tail-gamma3.toml")),
    ("fujita-euclidean", include_str!("../presets/fujita-euclidean.toml")),
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| invalid(format!("unknown preset '{name}'; available: {}", preset_names().join(", "))))?;
    ExperimentConfig::from_toml(text)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// One PASS/FAIL line of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verification {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub verifications: Vec<Verification>,
}

impl CommandReport {
    pub fn all_pass(&self) -> bool {
        self.verifications.iter().all(|v| v.pass)
    }

    fn write(&mut self, dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn key_values(lines: &[(String, String)]) -> String {
    lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Manifold and simulation grid shared by the commands.
pub struct Setup {
    pub manifold: ModelManifold,
    pub grid: RadialGrid,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let mut reach = cfg.grid.r_max;
        if let Some(g) = &cfg.geometry {
            reach = reach.max(g.r_max);
        }
        if let Some(e) = &cfg.eigen {
            reach = reach.max(*e.radii.last().unwrap());
        }
        Ok(Self {
            manifold: cfg.manifold.build(reach)?,
            grid: RadialGrid::with_spacing(cfg.grid.r_max, cfg.grid.dr)?,
        })
    }

    /// Positive grid nodes, where barrier residuals are evaluated.
    pub fn check_nodes(&self) -> Vec<f64> {
        self.grid.nodes().into_iter().filter(|&r| r > 0.0).collect()
    }
}

/// A barrier with the `λ` it certifies and how it was chosen.
pub struct BuiltBarrier {
    pub barrier: Barrier,
    pub lambda: f64,
    pub cbar: Option<f64>,
    pub notes: Vec<(String, String)>,
}

fn policy_lambda(cfg: &ExperimentConfig, setup: &Setup) -> Result<f64> {
    let n = cfg.manifold.dim();
    match cfg.problem.lambda_policy {
        LambdaPolicy::Explicit => Ok(cfg.problem.lambda.expect("validated")),
        LambdaPolicy::Mckean => {
            let k = cfg
                .curvature_k()
                .ok_or_else(|| hypothesis("negative curvature bound", "McKean policy needs k > 0"))?;
            mckean_bound(n, k)
        }
        LambdaPolicy::Eigen => Ok(dirichlet_lambda1(&setup.manifold, setup.grid.r_max(), setup.grid.n_interior())?.lambda1),
        LambdaPolicy::LambdaStar => Err(invalid("lambda_star is resolved by the prop47 barrier")),
    }
}

fn cbar(cfg: &ExperimentConfig, setup: &Setup) -> Result<f64> {
    match cfg.problem.cbar {
        Some(c) => Ok(c),
        None => drift_lower_bound_constant(&setup.manifold, cfg.manifold.gamma(), &setup.check_nodes()),
    }
}

pub fn build_barrier(cfg: &ExperimentConfig, setup: &Setup) -> Result<BuiltBarrier> {
    let choice = cfg.barrier.as_ref().ok_or_else(|| invalid("this command needs a [barrier] section"))?;
    let n = cfg.manifold.dim();
    let gamma = cfg.manifold.gamma();
    let mut notes = vec![("barrier_choice".to_string(), choice.name().to_string())];
    let need_k = || {
        cfg.curvature_k()
            .ok_or_else(|| hypothesis("negative curvature bound", "this barrier needs a curvature bound k > 0"))
    };
    let built = match *choice {
        BarrierChoice::Prop43 { beta } => {
            let lambda = policy_lambda(cfg, setup)?;
            let k = need_k()?;
            let (lo, hi) = prop43_window(n, k, lambda)?;
            notes.push(("beta_window".into(), format!("[{lo}, {hi}]")));
            let beta = beta.unwrap_or(lo);
            if !(lo * (1.0 - 1e-12) <= beta && beta <= hi * (1.0 + 1e-12)) {
                return Err(hypothesis(
                    "rate window",
                    format!("requires {lo} <= beta <= {hi} for lambda = {lambda}, got {beta}"),
                ));
            }
            BuiltBarrier { barrier: Barrier::Exp(ExpBarrier::new(1.0, beta)?), lambda, cbar: None, notes }
        }
        BarrierChoice::Prop44 => {
            let lambda = policy_lambda(cfg, setup)?;
            let c = cbar(cfg, setup)?;
            let (alpha, beta) = prop44_params(n, c, gamma, lambda)?;
            BuiltBarrier { barrier: Barrier::Exp(ExpBarrier::new(alpha, beta)?), lambda, cbar: Some(c), notes }
        }
        BarrierChoice::Prop45 { alpha } => {
            let lambda = policy_lambda(cfg, setup)?;
            let c = cbar(cfg, setup)?;
            let beta = prop45_params(n, c, gamma, lambda, alpha)?;
            BuiltBarrier { barrier: Barrier::Exp(ExpBarrier::new(alpha, beta)?), lambda, cbar: Some(c), notes }
        }
        BarrierChoice::Prop47 { alpha } => {
            let c = cbar(cfg, setup)?;
            let (z, lambda_star) = prop47_barrier(n, need_k()?, c, gamma, alpha)?;
            notes.push(("lambda_star".into(), fmt_num(lambda_star)));
            let lambda = match cfg.problem.lambda_policy {
                LambdaPolicy::LambdaStar => lambda_star,
                _ => {
                    let l = policy_lambda(cfg, setup)?;
                    if l > lambda_star {
                        return Err(hypothesis(
                            "power-tail eigenvalue bound",
                            format!("requires lambda <= lambda* = {lambda_star}, got {l}"),
                        ));
                    }
                    l
                }
            };
            BuiltBarrier { barrier: Barrier::Power(z), lambda, cbar: Some(c), notes }
        }
        BarrierChoice::Prop42 { alpha, beta, r0, r1, r2 } => {
            let lambda = policy_lambda(cfg, setup)?;
            let g = prop42_barrier(
                &setup.manifold,
                lambda,
                alpha,
                beta,
                [r1, r0, r2],
                setup.grid.r_max(),
                setup.grid.n_interior(),
            )?;
            notes.push(("matching_constant".into(), fmt_num(g.c)));
            BuiltBarrier { barrier: Barrier::Glued(g), lambda, cbar: None, notes }
        }
    };
    Ok(built)
}

/// Initial data, the barrier multiple it sits under and the envelope.
pub struct InitialData {
    pub u0: RadialField,
    /// Smallest `C̃` with `u0 ≤ C̃w` at the nodes, when a barrier exists.
    pub c_tilde: Option<f64>,
    pub envelope: Option<TimeEnvelope>,
}

fn initial_data(
    cfg: &ExperimentConfig,
    setup: &Setup,
    built: Option<&BuiltBarrier>,
    forcing: ForcingH,
    p: f64,
) -> Result<InitialData> {
    let spec = cfg.initial.as_ref().ok_or_else(|| invalid("this command needs an [initial] section"))?;
    let grid = &setup.grid;
    let envelope = match built {
        Some(b) => Some(time_envelope(forcing, b.lambda, p, b.barrier.sup_norm(grid))?),
        None => None,
    };
    let c_max = envelope.as_ref().and_then(TimeEnvelope::c_tilde_max);
    let need_barrier = || invalid("scaled initial data need a [barrier] section");
    let u0 = match *spec {
        InitialSpec::ScaledBarrier { factor, fallback_amplitude } => {
            let b = built.ok_or_else(need_barrier)?;
            let amplitude = match (c_max, fallback_amplitude) {
                (Some(c), _) => factor * c,
                (None, Some(a)) => a,
                (None, None) => {
                    return Err(hypothesis(
                        "finite time integral",
                        "the amplitude bound is undefined because the weighted forcing integral diverges; set fallback_amplitude",
                    ))
                }
            };
            scaled_barrier(&b.barrier, amplitude, grid)
        }
        InitialSpec::Bump { amplitude, radius } => bump(amplitude, radius, grid)?,
        InitialSpec::PowerTail { alpha, factor } => {
            let b = built.ok_or_else(need_barrier)?;
            let c = c_max.ok_or_else(|| {
                hypothesis("finite time integral", "the amplitude bound is undefined for this forcing")
            })?;
            let shape = |r: f64| r.powf(-alpha).min(1.0);
            let ratio = grid
                .nodes()
                .iter()
                .map(|&r| shape(r) / b.barrier.eval(r))
                .fold(0.0, f64::max);
            crate::evolution::power_tail(factor * c / ratio, alpha, grid)?
        }
    };
    let c_tilde = built.map(|b| {
        grid.nodes()
            .iter()
            .zip(u0.values())
            .map(|(&r, &u)| u / b.barrier.eval(r))
            .fold(0.0, f64::max)
    });
    Ok(InitialData { u0, c_tilde, envelope })
}

/// One evolution with its envelope comparison.
pub struct SimulationResult {
    pub run: RunOutcome,
    pub data: InitialData,
    pub comparison: Option<EnvelopeComparison>,
}

impl SimulationResult {
    /// Whether the amplitude respects the bound, so the envelope is a proven
    /// upper bound.
    pub fn envelope_applies(&self) -> bool {
        match (&self.data.envelope, self.data.c_tilde) {
            (Some(e), Some(c)) => e.c_tilde_max().is_some_and(|m| c <= m * (1.0 + 1e-12)),
            _ => false,
        }
    }
}

pub fn simulate(
    cfg: &ExperimentConfig,
    setup: &Setup,
    built: Option<&BuiltBarrier>,
    forcing: ForcingH,
    p: f64,
) -> Result<SimulationResult> {
    let data = initial_data(cfg, setup, built, forcing, p)?;
    let run = solve_on_ball(&setup.manifold, &data.u0, forcing, p, &cfg.controls.to_controls())?;
    let mut out = SimulationResult { run, data, comparison: None };
    if out.envelope_applies() {
        let b = built.expect("envelope implies barrier");
        let env = out.data.envelope.as_ref().unwrap();
        out.comparison = Some(compare_with_envelope(&out.run, &b.barrier, env, out.data.c_tilde.unwrap(), None));
    }
    Ok(out)
}

fn run_descriptor(cfg: &ExperimentConfig, setup: &Setup) -> Vec<(String, String)> {
    vec![
        ("dr".into(), fmt_num(setup.grid.dr())),
        ("r_max".into(), fmt_num(setup.grid.r_max())),
        ("dt_max".into(), fmt_num(cfg.controls.dt_max)),
        ("rel_tol".into(), fmt_num(cfg.controls.rel_tol)),
        ("horizon".into(), fmt_num(cfg.controls.t_end)),
    ]
}

pub fn cmd_geometry(cfg: &ExperimentConfig, out: &Path) -> Result<CommandReport> {
    let setup = Setup::new(cfg)?;
    let mut report = CommandReport::default();
    let (nodes, claims) = match &cfg.geometry {
        Some(g) => (linspace(g.r_min, g.r_max, g.nodes), (g.k, g.c0, g.gamma)),
        None => (linspace(setup.grid.dr(), setup.grid.r_max(), 400), (None, None, None)),
    };
    let own = cfg.manifold.curvature_constants();
    let k = claims.0.or(own.map(|c| c.0));
    let c0 = claims.1.or(own.map(|c| c.1));
    let gamma = claims.2.or(own.map(|c| c.2));
    let (Some(k), Some(c0), Some(gamma)) = (k, c0, gamma) else {
        return Err(invalid("a flat manifold needs claimed k, c0 and gamma in [geometry]"));
    };
    let m = &setup.manifold;
    let rep = check_a0(m, k, c0, gamma, &nodes)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["r", "drift", "radial_curvature", "sphere_curvature"])?;
    for &r in &nodes {
        csv.write_record([
            fmt_num(r),
            fmt_num(m.drift(r)?),
            fmt_num(m.radial_curvature(r)?),
            fmt_num(m.sphere_curvature(r)?),
        ])?;
    }
    let cbar = drift_lower_bound_constant(m, gamma, &nodes)?;
    let mut lines = rep.to_lines();
    lines.push(("drift_constant_on_grid".into(), fmt_num(cbar)));
    lines.push(("verdict".into(), verdict_word(rep.all_hold()).into()));
    report.write(out, "curvature.csv", csv.into_inner().map_err(|e| invalid(e.to_string()))?)?;
    report.write(out, "geometry_report.txt", key_values(&lines))?;
    report.verifications.push(Verification::new(
        "curvature hypothesis",
        rep.all_hold(),
        format!(
            "sectional <= -k^2: {} (worst margin {:.3e}); radial <= -C0(1+r^gamma): {} (worst margin {:.3e})",
            rep.a0_ii.holds, rep.a0_ii.worst_margin, rep.a0_iii.holds, rep.a0_iii.worst_margin
        ),
    ));
    Ok(report)
}

pub fn cmd_eigen(cfg: &ExperimentConfig, out: &Path) -> Result<CommandReport> {
    let setup = Setup::new(cfg)?;
    let mut report = CommandReport::default();
    let radii = cfg.eigen.as_ref().map_or_else(|| vec![setup.grid.r_max()], |e| e.radii.clone());
    let seq = lambda1_estimate(&setup.manifold, &radii, setup.grid.dr())?;
    let mut buf = Vec::new();
    write_eigen_csv(&seq.estimates, &mut buf)?;
    report.write(out, "eigen.csv", buf)?;
    let mut lines = vec![
        ("monotone".to_string(), seq.monotone.to_string()),
        ("limit".into(), fmt_num(seq.limit)),
        ("error_bar".into(), fmt_num(seq.error_bar)),
    ];
    report.verifications.push(Verification::new(
        "domain monotonicity",
        seq.monotone,
        format!("lambda1 over R = {radii:?}: {:?}", seq.estimates.iter().map(|e| e.lambda1).collect::<Vec<_>>()),
    ));
    let worst_residual = seq.estimates.iter().map(|e| e.residual).fold(0.0, f64::max);
    report.verifications.push(Verification::new(
        "eigen residual",
        worst_residual <= 1e-8,
        format!("max |Delta_h phi + lambda phi| / |phi| = {worst_residual:.3e}"),
    ));
    if let Some(k) = cfg.curvature_k() {
        let bound = mckean_bound(cfg.manifold.dim(), k)?;
        let ok = seq.estimates.iter().all(|e| e.lambda1 >= bound);
        lines.push(("mckean_bound".into(), fmt_num(bound)));
        lines.push(("bracket".into(), format!("[{bound}, {}]", seq.limit)));
        report.verifications.push(Verification::new(
            "McKean lower bound",
            ok,
            format!("all estimates >= (n-1)^2 k^2 / 4 = {bound}"),
        ));
    }
    report.write(out, "eigen_summary.txt", key_values(&lines))?;
    Ok(report)
}

pub fn cmd_barrier(cfg: &ExperimentConfig, out: &Path) -> Result<CommandReport> {
    let setup = Setup::new(cfg)?;
    let mut report = CommandReport::default();
    let built = build_barrier(cfg, &setup)?;
    let nodes = setup.check_nodes();
    let check = verify_supersolution(&setup.manifold, &built.barrier, built.lambda, &nodes)?;
    report.write(out, "barrier.txt", format!("{}\n", built.barrier.describe(built.lambda)))?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["r", "w", "residual"])?;
    for &r in &nodes {
        let w = built.barrier.eval(r);
        let res = apply_laplacian_analytic(&setup.manifold, &built.barrier, r)? + built.lambda * w;
        csv.write_record([fmt_num(r), fmt_num(w), fmt_num(res)])?;
    }
    report.write(out, "barrier.csv", csv.into_inner().map_err(|e| invalid(e.to_string()))?)?;
    let mut lines = built.notes.clone();
    lines.push(("lambda".into(), fmt_num(built.lambda)));
    if let Some(c) = built.cbar {
        lines.push(("drift_constant".into(), fmt_num(c)));
    }
    lines.push(("max_residual".into(), fmt_num(check.max_residual)));
    lines.push(("max_relative_residual".into(), fmt_num(check.max_relative_residual)));
    lines.push(("worst_r".into(), fmt_num(check.worst_r)));
    lines.push(("nodes_checked".into(), check.nodes_checked.to_string()));
    for k in &check.kinks {
        lines.push((format!("kink_at_{}", k.r), format!("left {} right {} concave {}", k.left_slope, k.right_slope, k.is_concave())));
    }
    lines.push(("verdict".into(), verdict_word(check.pass).into()));
    report.verifications.push(Verification::new(
        "supersolution residual",
        check.pass,
        format!("max residual {:.3e} at r = {}, {} kinks", check.max_residual, check.worst_r, check.kinks.len()),
    ));
    if let Barrier::Glued(g) = &built.barrier {
        let worst = glued_outer_bound(g, &nodes);
        lines.push(("outer_bound_violation".into(), fmt_num(worst)));
        report.verifications.push(Verification::new("0 < w <= v outside R0", worst <= 0.0, format!("max w - v = {worst:.3e}")));
    }
    report.write(out, "barrier_check.txt", key_values(&lines))?;
    Ok(report)
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<CommandReport> {
    let setup = Setup::new(cfg)?;
    let mut report = CommandReport::default();
    let built = cfg.barrier.as_ref().map(|_| build_barrier(cfg, &setup)).transpose()?;
    let sim = simulate(cfg, &setup, built.as_ref(), cfg.forcing, cfg.problem.p)?;
    let mut buf = Vec::new();
    sim.run.write_history_csv(&mut buf)?;
    report.write(out, "history.csv", buf)?;
    let mut buf = Vec::new();
    sim.run.final_field.write_csv(&mut buf)?;
    report.write(out, "final.csv", buf)?;
    let points: Vec<(f64, f64)> = sim.run.history.iter().map(|h| (h.t, h.sup_norm.max(1e-300).log10())).collect();
    report.write(out, "history.svg", svg::line_plot("sup norm", "t", "log10 |u|", &points))?;

    let mut lines = vec![
        ("verdict".to_string(), sim.run.verdict.to_string()),
        ("final_time".into(), fmt_num(sim.run.final_time)),
        ("initial_sup".into(), fmt_num(sim.run.initial_sup())),
        ("final_sup".into(), fmt_num(sim.run.history.last().unwrap().sup_norm)),
        ("accepted_steps".into(), (sim.run.history.len() - 1).to_string()),
        ("rejected_steps".into(), sim.run.rejected_steps.to_string()),
        ("min_value".into(), fmt_num(sim.run.min_value)),
    ];
    lines.extend(run_descriptor(cfg, &setup));
    if let Some(d) = &sim.run.diagnostic {
        lines.push(("diagnostic".into(), d.clone()));
    }
    if let Some(b) = &built {
        lines.push(("barrier".into(), b.barrier.describe(b.lambda)));
    }
    if let Some(env) = &sim.data.envelope {
        lines.push((
            "h_tilde_inf".into(),
            env.h_tilde_inf.map_or("inf".to_string(), fmt_num),
        ));
        lines.push(("c_tilde_max".into(), env.c_tilde_max().map_or("undefined".to_string(), fmt_num)));
    }
    if let Some(c) = sim.data.c_tilde {
        lines.push(("c_tilde".into(), fmt_num(c)));
    }
    let h = cfg.forcing;
    report.verifications.push(Verification::new(
        "nonnegativity",
        sim.run.min_value >= -1e-12,
        format!("min u = {:.3e}", sim.run.min_value),
    ));
    match &sim.comparison {
        Some(c) => {
            lines.push(("envelope_max_violation".into(), fmt_num(c.max_violation)));
            lines.push(("envelope_sup_violation".into(), fmt_num(c.max_sup_violation)));
            lines.push(("envelope_tolerance".into(), fmt_num(c.tolerance)));
            lines.push(("envelope".into(), verdict_word(c.pass).into()));
            report.verifications.push(Verification::new(
                "envelope comparison",
                c.pass,
                format!(
                    "max u - envelope = {:.3e} at (t = {}, r = {}), tolerance {:.3e}",
                    c.max_violation, c.worst_t, c.worst_r, c.tolerance
                ),
            ));
        }
        None => lines.push(("envelope".into(), "not applicable".into())),
    }
    lines.push(("forcing".into(), h.to_string()));
    report.write(out, "summary.txt", key_values(&lines))?;
    Ok(report)
}

/// One cell of a phase diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub p: f64,
    pub sigma: Option<f64>,
    pub verdict: Verdict,
    /// `Some(pass)` when the amplitude bound holds and the envelope was
    /// checked.
    pub envelope: Option<bool>,
    pub amplitude: f64,
    /// Position of `p` relative to `1 + σ/λ` for exponential forcing; the
    /// critical value itself is covered by neither the global nor the
    /// blow-up result.
    pub regime: Option<&'static str>,
}

impl SweepCell {
    pub fn category(&self) -> &'static str {
        match (self.verdict, self.envelope) {
            (Verdict::BlowUp(_), _) => "blow-up",
            (Verdict::GlobalUpToHorizon, Some(true)) => "global-certified",
            (Verdict::GlobalUpToHorizon, _) => "global-up-to-horizon",
            (Verdict::Undecided, _) => "undecided",
        }
    }
}

const CATEGORIES: [(&str, &str); 4] = [
    ("blow-up", "#d62728"),
    ("global-certified", "#2ca02c"),
    ("global-up-to-horizon", "#98df8a"),
    ("undecided", "#7f7f7f"),
];

/// Runs every cell of the configured phase diagram in the current rayon
/// pool; results come back in axis order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepCell>> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| invalid("this command needs a [sweep] section"))?;
    let setup = Setup::new(cfg)?;
    let built = cfg.barrier.as_ref().map(|_| build_barrier(cfg, &setup)).transpose()?;
    let lambda = match &built {
        Some(b) => Some(b.lambda),
        None => policy_lambda(cfg, &setup).ok(),
    };
    let sigmas: Vec<Option<f64>> = match &spec.sigma {
        Some(axis) => axis.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let cells: Vec<(f64, Option<f64>)> = sigmas
        .iter()
        .flat_map(|&s| spec.p.values().into_iter().map(move |p| (p, s)))
        .collect();
    cells
        .par_iter()
        .map(|&(p, sigma)| {
            let forcing = match sigma {
                Some(s) => ForcingH::exponential(s)?,
                None => cfg.forcing,
            };
            let sim = simulate(cfg, &setup, built.as_ref(), forcing, p)?;
            let regime = match (forcing, lambda) {
                (ForcingH::Exponential { sigma }, Some(l)) => {
                    let critical = 1.0 + sigma / l;
                    Some(if (p - critical).abs() <= 1e-9 * critical {
                        "critical"
                    } else if p < critical {
                        "below-critical"
                    } else {
                        "above-critical"
                    })
                }
                _ => None,
            };
            Ok(SweepCell {
                p,
                sigma,
                verdict: sim.run.verdict,
                envelope: sim.comparison.map(|c| c.pass),
                amplitude: sim.run.initial_sup(),
                regime,
            })
        })
        .collect()
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<CommandReport> {
    let cells = run_sweep(cfg)?;
    let setup = Setup::new(cfg)?;
    let mut report = CommandReport::default();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "p", "sigma", "verdict", "blowup_time", "envelope", "regime", "amplitude", "dr", "dt_max", "horizon",
    ])?;
    for c in &cells {
        csv.write_record([
            fmt_num(c.p),
            c.sigma.map_or(String::new(), fmt_num),
            c.category().to_string(),
            match c.verdict {
                Verdict::BlowUp(t) => fmt_num(t),
                _ => String::new(),
            },
            c.envelope.map_or("n/a".to_string(), |e| verdict_word(e).to_string()),
            c.regime.unwrap_or("n/a").to_string(),
            fmt_num(c.amplitude),
            fmt_num(setup.grid.dr()),
            fmt_num(cfg.controls.dt_max),
            fmt_num(cfg.controls.t_end),
        ])?;
    }
    report.write(out, "sweep.csv", csv.into_inner().map_err(|e| invalid(e.to_string()))?)?;

    let spec = cfg.sweep.as_ref().unwrap();
    let ps = spec.p.values();
    let sigmas = spec.sigma.as_ref().map_or_else(|| vec![0.0], |a| a.values());
    let index = |c: &SweepCell| CATEGORIES.iter().position(|(n, _)| *n == c.category()).unwrap();
    let grid: Vec<Vec<usize>> = cells.chunks(ps.len()).map(|row| row.iter().map(index).collect()).collect();
    let y_label = if spec.sigma.is_some() { "sigma" } else { "" };
    report.write(out, "sweep.svg", svg::heatmap("verdict map", "p", y_label, &ps, &sigmas, &grid, &CATEGORIES))?;

    let mut summary = String::new();
    for (name, _) in CATEGORIES {
        let count = cells.iter().filter(|c| c.category() == name).count();
        let _ = writeln!(summary, "{name} = {count}");
    }
    let last_blowup = cells.iter().filter(|c| matches!(c.verdict, Verdict::BlowUp(_))).map(|c| c.p).fold(f64::NAN, f64::max);
    let first_certified = cells.iter().filter(|c| c.envelope == Some(true)).map(|c| c.p).fold(f64::NAN, f64::min);
    let _ = writeln!(summary, "largest_blowup_p = {last_blowup}");
    let _ = writeln!(summary, "smallest_certified_p = {first_certified}");
    let transition = cells.iter().filter(|c| c.p > last_blowup && c.p < first_certified).count();
    let _ = writeln!(summary, "transition_cells = {transition}");
    if let Some(c) = cells.iter().find(|c| c.regime == Some("critical")) {
        let _ = writeln!(summary, "critical_cell = p {} ({}), outside both existence and blow-up results", c.p, c.category());
    }
    for (k, v) in run_descriptor(cfg, &setup) {
        let _ = writeln!(summary, "{k} = {v}");
    }
    report.write(out, "sweep_summary.txt", summary)?;
    let failed: Vec<f64> = cells.iter().filter(|c| c.envelope == Some(false)).map(|c| c.p).collect();
    report.verifications.push(Verification::new(
        "envelope comparison on admissible cells",
        failed.is_empty(),
        format!(
            "{} admissible cells checked, failures at p = {failed:?}",
            cells.iter().filter(|c| c.envelope.is_some()).count()
        ),
    ));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Geometry,
    Eigen,
    Barrier,
    Simulate,
    Sweep,
}

/// Runs `command` in a pool of `threads` workers (0 means rayon's default)
/// after creating `out`.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path, threads: usize) -> Result<CommandReport> {
    fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Geometry => cmd_geometry(cfg, out),
        Command::Eigen => cmd_eigen(cfg, out),
        Command::Barrier => cmd_barrier(cfg, out),
        Command::Simulate => cmd_simulate(cfg, out),
        Command::Sweep => cmd_sweep(cfg, out),
    })
}
