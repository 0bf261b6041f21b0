//! Experiment configuration: flat TOML sections, one per concern.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{hypothesis, invalid, Error, Result};
use crate::evolution::EvolutionControls;
use crate::forcing::ForcingH;
use crate::geometry::ModelManifold;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Euclidean { n: usize },
    Hyperbolic { n: usize, k: f64 },
    /// Radial curvature `-C₀(1 + r^γ)`, tabulated with step `dr`.
    Gamma {
        n: usize,
        c0: f64,
        gamma: f64,
        #[serde(default = "default_table_dr")]
        dr: f64,
    },
}

fn default_table_dr() -> f64 {
    1e-3
}

impl ManifoldSpec {
    pub fn dim(&self) -> usize {
        match *self {
            ManifoldSpec::Euclidean { n } | ManifoldSpec::Hyperbolic { n, .. } | ManifoldSpec::Gamma { n, .. } => n,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            ManifoldSpec::Gamma { gamma, .. } => gamma,
            _ => 0.0,
        }
    }

    /// Builds the manifold, tabulating γ-models up to `r_max`.
    pub fn build(&self, r_max: f64) -> Result<ModelManifold> {
        match *self {
            ManifoldSpec::Euclidean { n } => ModelManifold::euclidean(n),
            ManifoldSpec::Hyperbolic { n, k } => ModelManifold::hyperbolic(n, k),
            ManifoldSpec::Gamma { n, c0, gamma, dr } => ModelManifold::gamma_model(n, c0, gamma, r_max, dr),
        }
    }

    /// Curvature constants `(k, C₀, γ)` the manifold is built to satisfy.
    pub fn curvature_constants(&self) -> Option<(f64, f64, f64)> {
        match *self {
            ManifoldSpec::Euclidean { .. } => None,
            ManifoldSpec::Hyperbolic { k, .. } => Some((k, 0.5 * k * k, 0.0)),
            ManifoldSpec::Gamma { c0, gamma, .. } => Some((c0.sqrt(), c0, gamma)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaPolicy {
    /// The value given in `problem.lambda`.
    Explicit,
    /// `(n-1)²k²/4`, a certified lower bound for `λ₁`.
    Mckean,
    /// Dirichlet eigenvalue of the computational ball.
    Eigen,
    /// The `λ*` certified by the power-tail barrier.
    LambdaStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub p: f64,
    pub lambda_policy: LambdaPolicy,
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Curvature bound `k` used by the McKean policy and the linear-decay
    /// barriers; defaults to the manifold's own constant.
    #[serde(default)]
    pub k: Option<f64>,
    /// Drift constant `C̲`; computed on the grid when absent.
    #[serde(default)]
    pub cbar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BarrierChoice {
    /// `e^{-βr}`; `beta` defaults to the lower end of the window.
    Prop43 {
        #[serde(default)]
        beta: Option<f64>,
    },
    Prop44,
    Prop45 {
        #[serde(default = "one")]
        alpha: f64,
    },
    Prop47 {
        #[serde(default = "one")]
        alpha: f64,
    },
    Prop42 { alpha: f64, beta: f64, r0: f64, r1: f64, r2: f64 },
}

fn one() -> f64 {
    1.0
}

impl BarrierChoice {
    pub fn name(&self) -> &'static str {
        match self {
            BarrierChoice::Prop43 { .. } => "prop43",
            BarrierChoice::Prop44 => "prop44",
            BarrierChoice::Prop45 { .. } => "prop45",
            BarrierChoice::Prop47 { .. } => "prop47",
            BarrierChoice::Prop42 { .. } => "prop42",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `factor·C̃_max·w`. When `C̃_max` is undefined, `fallback_amplitude·w`.
    ScaledBarrier {
        factor: f64,
        #[serde(default)]
        fallback_amplitude: Option<f64>,
    },
    /// `A(1 - (r/ρ)²)²` on `B_ρ`.
    Bump { amplitude: f64, radius: f64 },
    /// `c·min{1, r^{-α}}`, with `c` chosen so that `max u0/w = factor·C̃_max`.
    PowerTail { alpha: f64, factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_max: f64,
    pub dr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsSpec {
    #[serde(default = "ControlsSpec::dt_init")]
    pub dt_init: f64,
    #[serde(default = "ControlsSpec::dt_min")]
    pub dt_min: f64,
    #[serde(default = "ControlsSpec::dt_max")]
    pub dt_max: f64,
    #[serde(default)]
    pub blowup_threshold: Option<f64>,
    #[serde(default = "ControlsSpec::t_end")]
    pub t_end: f64,
    #[serde(default = "ControlsSpec::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "ControlsSpec::samples")]
    pub samples: usize,
}

impl ControlsSpec {
    fn dt_init() -> f64 {
        EvolutionControls::default().dt_init
    }
    fn dt_min() -> f64 {
        EvolutionControls::default().dt_min
    }
    fn dt_max() -> f64 {
        EvolutionControls::default().dt_max
    }
    fn t_end() -> f64 {
        EvolutionControls::default().t_end
    }
    fn rel_tol() -> f64 {
        EvolutionControls::default().rel_tol
    }
    fn samples() -> usize {
        EvolutionControls::default().samples
    }

    pub fn to_controls(&self) -> EvolutionControls {
        EvolutionControls {
            dt_init: self.dt_init,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            blowup_threshold: self.blowup_threshold,
            t_end: self.t_end,
            rel_tol: self.rel_tol,
            samples: self.samples,
            ..EvolutionControls::default()
        }
    }
}

impl Default for ControlsSpec {
    fn default() -> Self {
        let c = EvolutionControls::default();
        Self {
            dt_init: c.dt_init,
            dt_min: c.dt_min,
            dt_max: c.dt_max,
            blowup_threshold: c.blowup_threshold,
            t_end: c.t_end,
            rel_tol: c.rel_tol,
            samples: c.samples,
        }
    }
}

/// Radii for the eigenvalue sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSpec {
    pub radii: Vec<f64>,
}

/// Radii at which the curvature hypothesis is checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    /// Claimed constants; default to the manifold's own.
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub c0: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

/// Swept values: an inclusive range of `cells` points or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum AxisSpec {
    Range { lo: f64, hi: f64, cells: usize },
    List { values: Vec<f64> },
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            AxisSpec::Range { lo, cells: 1, .. } => vec![lo],
            AxisSpec::Range { lo, hi, cells } => {
                // Snapped to 12 decimals so that 1.1 + 0.1·i prints as typed.
                let w = (hi - lo) / (cells - 1) as f64;
                (0..cells).map(|i| ((lo + w * i as f64) * 1e12).round() / 1e12).collect()
            }
            AxisSpec::List { ref values } => values.clone(),
        }
    }

    fn validate(&self, name: &str, min: f64) -> Result<()> {
        let vals = self.values();
        let ok = match *self {
            AxisSpec::Range { lo, hi, cells } => lo.is_finite() && hi.is_finite() && lo < hi && cells > 0,
            AxisSpec::List { ref values } => !values.is_empty(),
        };
        if !ok || vals.iter().any(|v| !(v.is_finite() && *v > min)) {
            return Err(invalid(format!("swept {name} values must be finite and exceed {min}, got {self:?}")));
        }
        Ok(())
    }
}

/// Swept axes of a phase diagram; the rest of the config is held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramSpec {
    pub p: AxisSpec,
    /// Exponential forcing rate; requires exponential forcing.
    #[serde(default)]
    pub sigma: Option<AxisSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub manifold: ManifoldSpec,
    #[serde(default = "default_forcing")]
    pub forcing: ForcingH,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub barrier: Option<BarrierChoice>,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    pub grid: GridSpec,
    #[serde(default)]
    pub controls: ControlsSpec,
    #[serde(default)]
    pub eigen: Option<EigenSpec>,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub sweep: Option<PhaseDiagramSpec>,
}

fn default_forcing() -> ForcingH {
    ForcingH::One
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Admissibility checks that do not need any numerics.
    pub fn validate(&self) -> Result<()> {
        self.forcing.validate()?;
        if !(self.problem.p > 1.0 && self.problem.p.is_finite()) {
            return Err(invalid(format!("p must exceed 1, got {}", self.problem.p)));
        }
        if !(self.grid.r_max > 0.0 && self.grid.dr > 0.0 && self.grid.dr < self.grid.r_max) {
            return Err(invalid(format!("grid needs 0 < dr < r_max, got {:?}", self.grid)));
        }
        self.controls.to_controls().validate()?;
        match (self.problem.lambda_policy, self.problem.lambda) {
            (LambdaPolicy::Explicit, None) => return Err(invalid("lambda_policy = explicit needs problem.lambda")),
            (LambdaPolicy::Explicit, Some(l)) if !(l > 0.0 && l.is_finite()) => {
                return Err(invalid(format!("lambda must be positive, got {l}")))
            }
            (LambdaPolicy::Mckean, _) if self.problem.k.is_none() && self.manifold.curvature_constants().is_none() => {
                return Err(hypothesis(
                    "negative curvature bound",
                    "the McKean policy needs sectional curvatures <= -k^2 with k > 0; flat space has none",
                ))
            }
            (LambdaPolicy::LambdaStar, _) if !matches!(self.barrier, Some(BarrierChoice::Prop47 { .. })) => {
                return Err(invalid("lambda_policy = lambda_star needs the prop47 barrier"))
            }
            _ => {}
        }
        let gamma = self.manifold.gamma();
        if let Some(b) = &self.barrier {
            match b {
                BarrierChoice::Prop44 if gamma <= 0.0 => {
                    return Err(hypothesis(
                        "curvature growth",
                        format!("the prop44 barrier requires gamma > 0, got {gamma}"),
                    ))
                }
                BarrierChoice::Prop47 { .. } if gamma <= 2.0 => {
                    return Err(hypothesis(
                        "curvature growth",
                        format!("the prop47 barrier requires gamma > 2, got {gamma}"),
                    ))
                }
                BarrierChoice::Prop43 { .. } | BarrierChoice::Prop45 { .. } | BarrierChoice::Prop47 { .. }
                    if self.manifold.curvature_constants().is_none() && self.problem.k.is_none() =>
                {
                    return Err(hypothesis(
                        "negative curvature bound",
                        format!("the {} barrier needs a curvature bound k > 0", b.name()),
                    ))
                }
                BarrierChoice::Prop42 { r0, r1, r2, .. } if !(*r1 < *r0 && *r0 < *r2 && *r2 < self.grid.r_max) => {
                    return Err(invalid(format!(
                        "prop42 radii must satisfy R1 < R0 < R2 < r_max, got {r1}, {r0}, {r2}, {}",
                        self.grid.r_max
                    )))
                }
                _ => {}
            }
        }
        if let Some(s) = &self.sweep {
            s.p.validate("p", 1.0)?;
            if let Some(sig) = &s.sigma {
                if !matches!(self.forcing, ForcingH::Exponential { .. }) {
                    return Err(invalid("a sigma axis needs exponential forcing"));
                }
                sig.validate("sigma", 0.0)?;
            }
        }
        if let Some(e) = &self.eigen {
            if e.radii.is_empty() || e.radii.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid(format!("eigen radii must be strictly increasing, got {:?}", e.radii)));
            }
        }
        Ok(())
    }

    /// Curvature bound `k` used by the McKean policy and the barriers.
    pub fn curvature_k(&self) -> Option<f64> {
        self.problem.k.or(self.manifold.curvature_constants().map(|c| c.0))
    }
}
