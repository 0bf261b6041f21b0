//! Rotationally symmetric model manifolds `dr² + ψ(r)² dθ²`.
//!
//! A model is fixed by its dimension and the warping function `ψ`. All
//! quantities the rest of the crate needs (drift, curvatures, volume
//! density) depend on `ψ` only through `ψ'/ψ`, `ψ''/ψ` and `log ψ`, so those
//! are the primitive evaluators. Tabulated warping functions store exactly
//! these three columns, which keeps super-exponentially growing `ψ` finite.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Largest `dr·sqrt(ψ''/ψ)` accepted when integrating the Jacobi equation.
pub const MAX_JACOBI_STEP: f64 = 0.25;

/// Header of the warping-table CSV.
pub const WARPING_CSV_HEADER: [&str; 4] = ["r", "log_psi", "psi1_over_psi", "psi2_over_psi"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarpingKind {
    /// `ψ(r) = r`.
    Euclidean,
    /// `ψ(r) = sinh(kr)/k`.
    Hyperbolic { k: f64 },
    /// Solution of `ψ'' = C₀(1 + r^γ)ψ`, `ψ(0) = 0`, `ψ'(0) = 1`.
    Gamma { c0: f64, gamma: f64 },
    /// Read from a table with no closed form attached.
    Tabulated,
}

/// Uniform table of `(log ψ, ψ'/ψ, ψ''/ψ)` starting at `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingTable {
    dr: f64,
    log_psi: Vec<f64>,
    ratio1: Vec<f64>,
    ratio2: Vec<f64>,
}

impl WarpingTable {
    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn len(&self) -> usize {
        self.log_psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_psi.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.dr * (self.len() - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dr
    }

    pub fn log_psi(&self) -> &[f64] {
        &self.log_psi
    }

    pub fn psi1_over_psi(&self) -> &[f64] {
        &self.ratio1
    }

    pub fn psi2_over_psi(&self) -> &[f64] {
        &self.ratio2
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(WARPING_CSV_HEADER)?;
        for j in 0..self.len() {
            w.write_record([
                self.node(j).to_string(),
                self.log_psi[j].to_string(),
                self.ratio1[j].to_string(),
                self.ratio2[j].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`WarpingTable::write_csv`]. The `r` column
    /// must start at 0 and be uniformly spaced.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(WARPING_CSV_HEADER.iter().copied()) {
            return Err(Error::Parse(format!(
                "expected header {}, got {}",
                WARPING_CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut r = Vec::new();
        let mut table = WarpingTable {
            dr: 0.0,
            log_psi: Vec::new(),
            ratio1: Vec::new(),
            ratio2: Vec::new(),
        };
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("column {}: {e}", WARPING_CSV_HEADER[i])))
            };
            r.push(parse(0)?);
            table.log_psi.push(parse(1)?);
            table.ratio1.push(parse(2)?);
            table.ratio2.push(parse(3)?);
        }
        if r.len() < 3 {
            return Err(Error::Parse("warping table needs at least 3 rows".into()));
        }
        if r[0] != 0.0 {
            return Err(Error::Parse("warping table must start at r = 0".into()));
        }
        let dr = r[1];
        for (j, &rj) in r.iter().enumerate() {
            if (rj - j as f64 * dr).abs() > 1e-9 * dr.max(rj) {
                return Err(Error::Parse(format!("non-uniform spacing at row {j}")));
            }
        }
        table.dr = dr;
        Ok(table)
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let x = r / self.dr;
        let j = (x.floor() as usize).min(self.len() - 2);
        (j, x - j as f64)
    }
}

/// Cubic Hermite interpolation on a unit-parameterised interval.
fn hermite(t: f64, h: f64, f0: f64, m0: f64, f1: f64, m1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * h * m1
}

/// A warping function of class 𝒜: `ψ(0) = 0`, `ψ'(0) = 1`, `ψ > 0` on `(0, ∞)`.
#[derive(Debug, Clone)]
pub struct WarpingFunction {
    kind: WarpingKind,
    table: Option<Arc<WarpingTable>>,
}

/// Values of `ψ`, `ψ'` and `ψ''/ψ` near the pole for the Jacobi equation
/// with `Q(r) = c0(1 + r^γ)`.
fn jacobi_series(c0: f64, gamma: f64, r: f64) -> (f64, f64) {
    let rg = r.powf(gamma);
    let psi = r + c0 * r.powi(3) / 6.0
        + c0 * rg * r.powi(3) / ((gamma + 2.0) * (gamma + 3.0))
        + c0 * c0 * r.powi(5) / 120.0;
    let dpsi = 1.0 + c0 * r * r / 2.0 + c0 * rg * r * r / (gamma + 2.0) + c0 * c0 * r.powi(4) / 24.0;
    (psi, dpsi)
}

impl WarpingFunction {
    pub fn euclidean() -> Self {
        Self {
            kind: WarpingKind::Euclidean,
            table: None,
        }
    }

    pub fn hyperbolic(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid(format!("hyperbolic curvature scale must be positive, got {k}")));
        }
        Ok(Self {
            kind: WarpingKind::Hyperbolic { k },
            table: None,
        })
    }

    /// Integrates `ψ'' = C₀(1 + r^γ)ψ` on `[0, r_max]` with classical RK4 and
    /// fixed step `dr`, starting from the pole series at `r = dr`.
    ///
    /// The state `(ψ, ψ')` is renormalised by `ψ` after every step and the
    /// logarithm of the scale accumulated, so only `log ψ` and the ratios are
    /// ever stored.
    pub fn gamma(c0: f64, gamma: f64, r_max: f64, dr: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(invalid(format!("curvature amplitude C0 must be positive, got {c0}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("curvature exponent gamma must be >= 0, got {gamma}")));
        }
        if !(dr > 0.0 && r_max > 2.0 * dr && r_max.is_finite()) {
            return Err(invalid(format!("need 0 < 2 dr < r_max, got dr = {dr}, r_max = {r_max}")));
        }
        let q = |r: f64| c0 * (1.0 + r.powf(gamma));
        let stiffness = dr * q(r_max).sqrt();
        if stiffness > MAX_JACOBI_STEP {
            return Err(invalid(format!(
                "step dr = {dr} does not resolve the Jacobi equation up to r_max = {r_max} \
                 (dr*sqrt(Q(r_max)) = {stiffness:.3} > {MAX_JACOBI_STEP})"
            )));
        }
        let steps = (r_max / dr).round() as usize;
        let mut log_psi = Vec::with_capacity(steps + 1);
        let mut ratio1 = Vec::with_capacity(steps + 1);
        let mut ratio2 = Vec::with_capacity(steps + 1);
        log_psi.push(f64::NEG_INFINITY);
        ratio1.push(f64::INFINITY);
        ratio2.push(c0);

        let (psi1, dpsi1) = jacobi_series(c0, gamma, dr);
        let mut log_scale = psi1.ln();
        let mut b = dpsi1 / psi1;
        log_psi.push(log_scale);
        ratio1.push(b);
        ratio2.push(q(dr));

        for j in 1..steps {
            let r = j as f64 * dr;
            let h = dr;
            // Linear system: a' = b, b' = Q a, with a = 1 at the step start.
            let (a0, b0) = (1.0, b);
            let qm = q(r + 0.5 * h);
            let k1a = b0;
            let k1b = q(r) * a0;
            let k2a = b0 + 0.5 * h * k1b;
            let k2b = qm * (a0 + 0.5 * h * k1a);
            let k3a = b0 + 0.5 * h * k2b;
            let k3b = qm * (a0 + 0.5 * h * k2a);
            let k4a = b0 + h * k3b;
            let k4b = q(r + h) * (a0 + h * k3a);
            let a1 = a0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            let b1 = b0 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
            if !(a1 > 0.0 && a1.is_finite() && b1.is_finite()) {
                return Err(Error::Overflow(format!(
                    "Jacobi integration broke down at r = {:.6}",
                    r + h
                )));
            }
            log_scale += a1.ln();
            b = b1 / a1;
            log_psi.push(log_scale);
            ratio1.push(b);
            ratio2.push(q(r + h));
        }
        Ok(Self {
            kind: WarpingKind::Gamma { c0, gamma },
            table: Some(Arc::new(WarpingTable {
                dr,
                log_psi,
                ratio1,
                ratio2,
            })),
        })
    }

    /// Wraps an externally supplied table. Checks class 𝒜 membership on the
    /// table (positive `ψ` away from the pole, `ψ'/ψ ~ 1/r` at the first node).
    pub fn tabulated(table: WarpingTable) -> Result<Self> {
        if table.len() < 3 {
            return Err(invalid("warping table needs at least 3 nodes"));
        }
        let dr = table.dr;
        for j in 1..table.len() {
            if !(table.log_psi[j].is_finite() && table.ratio1[j].is_finite() && table.ratio2[j].is_finite()) {
                return Err(invalid(format!("non-finite warping data at r = {}", table.node(j))));
            }
        }
        // ψ(dr) ≈ dr and ψ'(dr) ≈ 1 for a class 𝒜 function.
        let psi1 = table.log_psi[1].exp();
        let dpsi1 = table.ratio1[1] * psi1;
        if (psi1 / dr - 1.0).abs() > 0.05 || (dpsi1 - 1.0).abs() > 0.05 {
            return Err(invalid("table does not start like ψ(r) = r near the pole"));
        }
        Ok(Self {
            kind: WarpingKind::Tabulated,
            table: Some(Arc::new(table)),
        })
    }

    pub fn kind(&self) -> WarpingKind {
        self.kind
    }

    pub fn table(&self) -> Option<&WarpingTable> {
        self.table.as_deref()
    }

    /// Largest radius at which the function can be evaluated.
    pub fn r_max(&self) -> f64 {
        self.table.as_ref().map_or(f64::INFINITY, |t| t.r_max())
    }

    fn near_pole(&self, r: f64) -> (f64, f64, f64) {
        let table = self.table.as_ref().expect("tabulated kinds only");
        let (psi, dpsi, ratio2) = match self.kind {
            WarpingKind::Gamma { c0, gamma } => {
                let (p, d) = jacobi_series(c0, gamma, r);
                (p, d, c0 * (1.0 + r.powf(gamma)))
            }
            _ => {
                let q = table.ratio2[1];
                (r + q * r.powi(3) / 6.0, 1.0 + q * r * r / 2.0, q)
            }
        };
        (psi.ln(), dpsi / psi, ratio2)
    }

    /// `(log ψ, ψ'/ψ, ψ''/ψ)` at `r > 0`.
    pub fn log_ratios(&self, r: f64) -> (f64, f64, f64) {
        match self.kind {
            WarpingKind::Euclidean => (r.ln(), 1.0 / r, 0.0),
            WarpingKind::Hyperbolic { k } => {
                let x = k * r;
                // log(sinh(x)/k) without overflow.
                let log_psi = x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2 - k.ln();
                (log_psi, k / x.tanh(), k * k)
            }
            WarpingKind::Gamma { .. } | WarpingKind::Tabulated => {
                let table = self.table.as_ref().expect("tabulated kinds carry a table");
                if r < table.dr {
                    return self.near_pole(r);
                }
                let (j, t) = table.locate(r);
                let h = table.dr;
                let (r0, r1) = (table.node(j), table.node(j + 1));
                let (y0, y1) = (table.ratio1[j], table.ratio1[j + 1]);
                let (q0, q1) = (table.ratio2[j], table.ratio2[j + 1]);
                // Interpolate log(ψ/r) and ψ'/ψ - 1/r, which stay smooth at the pole.
                let g = hermite(
                    t,
                    h,
                    table.log_psi[j] - r0.ln(),
                    y0 - 1.0 / r0,
                    table.log_psi[j + 1] - r1.ln(),
                    y1 - 1.0 / r1,
                );
                let z = hermite(
                    t,
                    h,
                    y0 - 1.0 / r0,
                    q0 - y0 * y0 + 1.0 / (r0 * r0),
                    y1 - 1.0 / r1,
                    q1 - y1 * y1 + 1.0 / (r1 * r1),
                );
                let log_psi = g + r.ln();
                let y = z + 1.0 / r;
                let q = match self.kind {
                    WarpingKind::Gamma { c0, gamma } => c0 * (1.0 + r.powf(gamma)),
                    _ => q0 + t * (q1 - q0),
                };
                (log_psi, y, q)
            }
        }
    }

    pub fn log_psi(&self, r: f64) -> f64 {
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.log_ratios(r).0
    }

    /// `ψ(r)`; overflows to infinity for large radii on fast-growing models.
    pub fn eval(&self, r: f64) -> f64 {
        match self.kind {
            WarpingKind::Euclidean => r,
            WarpingKind::Hyperbolic { k } => (k * r).sinh() / k,
            _ if r == 0.0 => 0.0,
            _ => self.log_psi(r).exp(),
        }
    }

    pub fn deriv1(&self, r: f64) -> f64 {
        match self.kind {
            WarpingKind::Euclidean => 1.0,
            WarpingKind::Hyperbolic { k } => (k * r).cosh(),
            _ if r == 0.0 => 1.0,
            _ => {
                let (lp, y, _) = self.log_ratios(r);
                y * lp.exp()
            }
        }
    }

    pub fn deriv2(&self, r: f64) -> f64 {
        match self.kind {
            WarpingKind::Euclidean => 0.0,
            WarpingKind::Hyperbolic { k } => k * (k * r).sinh(),
            _ if r == 0.0 => 0.0,
            _ => {
                let (lp, _, q) = self.log_ratios(r);
                q * lp.exp()
            }
        }
    }

    pub fn psi1_over_psi(&self, r: f64) -> f64 {
        self.log_ratios(r).1
    }

    pub fn psi2_over_psi(&self, r: f64) -> f64 {
        self.log_ratios(r).2
    }
}

/// The model manifold `M_ψ` of dimension `n`.
#[derive(Debug, Clone)]
pub struct ModelManifold {
    n: usize,
    psi: WarpingFunction,
}

impl ModelManifold {
    pub fn new(n: usize, psi: WarpingFunction) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Self { n, psi })
    }

    /// Flat `ℝⁿ`.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(n, WarpingFunction::euclidean())
    }

    /// Hyperbolic space with sectional curvature `-k²`.
    pub fn hyperbolic(n: usize, k: f64) -> Result<Self> {
        Self::new(n, WarpingFunction::hyperbolic(k)?)
    }

    /// Model with radial curvature exactly `-C₀(1 + r^γ)`, tabulated on
    /// `[0, r_max]` with step `dr`.
    pub fn gamma_model(n: usize, c0: f64, gamma: f64, r_max: f64, dr: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {n}")));
        }
        Self::new(n, WarpingFunction::gamma(c0, gamma, r_max, dr)?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.psi
    }

    /// Largest radius covered by the warping function.
    pub fn r_max(&self) -> f64 {
        self.psi.r_max()
    }

    /// Curvature growth exponent γ of the model, when it has one.
    pub fn gamma_exponent(&self) -> Option<f64> {
        match self.psi.kind {
            WarpingKind::Euclidean | WarpingKind::Hyperbolic { .. } => Some(0.0),
            WarpingKind::Gamma { gamma, .. } => Some(gamma),
            WarpingKind::Tabulated => None,
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) {
            return Err(invalid(format!("radius must be positive, got {r}")));
        }
        if r > self.r_max() * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "radius {r} beyond the tabulated range [0, {}]",
                self.r_max()
            )));
        }
        Ok(())
    }

    /// Unchecked drift for hot loops whose grid has already been validated.
    pub(crate) fn drift_at(&self, r: f64) -> f64 {
        (self.n - 1) as f64 * self.psi.psi1_over_psi(r)
    }

    /// `F(r) = (n-1)ψ'(r)/ψ(r)`, the first-order coefficient of the radial
    /// Laplacian.
    pub fn drift(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.drift_at(r))
    }

    /// Sectional curvature of planes containing `∂_r`: `-ψ''/ψ`.
    pub fn radial_curvature(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(-self.psi.psi2_over_psi(r))
    }

    /// Sectional curvature of planes tangent to the geodesic sphere:
    /// `(1 - ψ'²)/ψ²`.
    pub fn sphere_curvature(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(match self.psi.kind {
            WarpingKind::Euclidean => 0.0,
            WarpingKind::Hyperbolic { k } => -k * k,
            _ => {
                let (lp, y, _) = self.psi.log_ratios(r);
                (-2.0 * lp).exp() - y * y
            }
        })
    }

    /// `(n-1) log ψ(r)`, the log of the volume density up to the sphere area.
    pub fn log_volume_density(&self, r: f64) -> f64 {
        (self.n - 1) as f64 * self.psi.log_psi(r)
    }
}

/// Pointwise verdict for one clause of the curvature hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseVerdict {
    pub holds: bool,
    /// Radius of the node with the smallest margin.
    pub worst_r: f64,
    /// Smallest `bound - curvature` over the grid (negative when violated).
    pub worst_margin: f64,
}

/// Grid evaluation of the curvature hypothesis. A pointwise check, not a
/// proof: it certifies the stated inequalities only at the listed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub n: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_nodes: usize,
    pub grid_max_radial_k: f64,
    pub grid_max_sphere_k: f64,
    /// Every sectional curvature `<= -k²`.
    pub a0_ii: ClauseVerdict,
    pub k: f64,
    /// Radial curvature `<= -C₀(1 + r^γ)`.
    pub a0_iii: ClauseVerdict,
    pub c0: f64,
    pub gamma: f64,
}

impl CurvatureReport {
    pub fn all_hold(&self) -> bool {
        self.n >= 2 && self.a0_ii.holds && self.a0_iii.holds
    }

    /// Key-value lines, one per field.
    pub fn to_lines(&self) -> Vec<(String, String)> {
        vec![
            ("n".into(), self.n.to_string()),
            ("grid_min".into(), self.grid_min.to_string()),
            ("grid_max".into(), self.grid_max.to_string()),
            ("grid_nodes".into(), self.grid_nodes.to_string()),
            ("grid_max_radial_K".into(), self.grid_max_radial_k.to_string()),
            ("grid_max_sphere_K".into(), self.grid_max_sphere_k.to_string()),
            ("k".into(), self.k.to_string()),
            ("a0_ii_holds".into(), self.a0_ii.holds.to_string()),
            ("a0_ii_worst_r".into(), self.a0_ii.worst_r.to_string()),
            ("a0_ii_worst_margin".into(), self.a0_ii.worst_margin.to_string()),
            ("C0".into(), self.c0.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("a0_iii_holds".into(), self.a0_iii.holds.to_string()),
            ("a0_iii_worst_r".into(), self.a0_iii.worst_r.to_string()),
            ("a0_iii_worst_margin".into(), self.a0_iii.worst_margin.to_string()),
        ]
    }
}

// Relative slack for the pointwise comparisons (rounding in ψ''/ψ).
const CURVATURE_SLACK: f64 = 1e-12;

/// Checks the curvature hypothesis at the given radii (all must be positive).
pub fn check_a0(m: &ModelManifold, k: f64, c0: f64, gamma: f64, grid: &[f64]) -> Result<CurvatureReport> {
    if grid.is_empty() {
        return Err(invalid("empty grid"));
    }
    if !(k > 0.0 && c0 > 0.0 && gamma >= 0.0) {
        return Err(invalid(format!(
            "candidates need k > 0, C0 > 0, gamma >= 0; got k = {k}, C0 = {c0}, gamma = {gamma}"
        )));
    }
    let mut max_radial = f64::NEG_INFINITY;
    let mut max_sphere = f64::NEG_INFINITY;
    let mut ii = (f64::INFINITY, 0.0);
    let mut iii = (f64::INFINITY, 0.0);
    for &r in grid {
        let kr = m.radial_curvature(r)?;
        let ks = m.sphere_curvature(r)?;
        max_radial = max_radial.max(kr);
        max_sphere = max_sphere.max(ks);
        let margin_ii = -k * k - kr.max(ks);
        if margin_ii < ii.0 {
            ii = (margin_ii, r);
        }
        let bound = -c0 * (1.0 + r.powf(gamma));
        let margin_iii = bound - kr;
        if margin_iii < iii.0 {
            iii = (margin_iii, r);
        }
    }
    let holds = |margin: f64, scale: f64| margin >= -CURVATURE_SLACK * scale.abs().max(1.0);
    Ok(CurvatureReport {
        n: m.dim(),
        grid_min: grid.iter().copied().fold(f64::INFINITY, f64::min),
        grid_max: grid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        grid_nodes: grid.len(),
        grid_max_radial_k: max_radial,
        grid_max_sphere_k: max_sphere,
        a0_ii: ClauseVerdict {
            holds: holds(ii.0, k * k),
            worst_r: ii.1,
            worst_margin: ii.0,
        },
        k,
        a0_iii: ClauseVerdict {
            holds: holds(iii.0, c0 * (1.0 + iii.1.powf(gamma))),
            worst_r: iii.1,
            worst_margin: iii.0,
        },
        c0,
        gamma,
    })
}

/// Smallest value over the grid of `r F(r) / ((n-1)(1+r)^{1+γ/2})`: the
/// largest constant `C̲` for which `F(r) >= C̲(n-1)(1+r)^{1+γ/2}/r` holds
/// at every node. Diagnostic only; barrier constructors take `C̲` as input.
pub fn drift_lower_bound_constant(m: &ModelManifold, gamma: f64, grid: &[f64]) -> Result<f64> {
    let nm1 = (m.dim() - 1) as f64;
    let mut best = f64::INFINITY;
    for &r in grid {
        let f = m.drift(r)?;
        best = best.min(r * f / (nm1 * (1.0 + r).powf(1.0 + 0.5 * gamma)));
    }
    Ok(best)
}

/// Uniform grid `r_min, …, r_max` with `count` nodes.
pub fn linspace(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![r_min],
        _ => {
            let h = (r_max - r_min) / (count - 1) as f64;
            (0..count).map(|i| r_min + h * i as f64).collect()
        }
    }
}
