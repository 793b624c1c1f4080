//! Run configuration: a TOML file with one table per module, every key
//! optional, unknown keys rejected. `--set section.key=value` overrides are
//! applied to the parsed table before it is typed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qco_core::model::{
    fit_quartic_from_extrema, DipoleModel, JunctionPotential, PhysConstants, QuarticPotential,
};
use qco_core::qc::{QcConfig, SwitchingConfig};
use qco_core::scan::ScanConfig;
use qco_core::tdse::{GridSpec, Integrator, PropagatorConfig, DEFAULT_OUTPUT_STRIDE};
use qco_core::{Error, Result};

pub const OUT_DIR_ENV: &str = "QCO_OUT_DIR";

const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub potential: PotentialSection,
    pub grid: GridSection,
    pub propagator: PropagatorSection,
    pub scan: ScanSection,
    pub qc: QcSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSection {
    /// Zero-bias stationary points of the binding term (Å) and their values (meV).
    pub extrema_x: [f64; 3],
    pub extrema_v: [f64; 3],
    /// Explicit binding coefficients `a0..a4`, replacing the fit when given.
    pub coeffs: Option<[f64; 5]>,
    pub mu0_debye: f64,
    pub w: f64,
    pub length: f64,
    /// Working bias (V) for `potential`, `evolve` and `spectrum`.
    pub bias: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self {
            extrema_x: [-0.7, 0.0, 0.89],
            extrema_v: [-12.7, 0.45, -23.2],
            coeffs: None,
            mu0_debye: 0.3,
            w: 2.2,
            length: 1.56,
            bias: -1.1151,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorSection {
    /// `rk4` or `adaptive`.
    pub integrator: String,
    pub dt: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub output_stride: f64,
    /// ħ/Å⁴; enables the squeezing-dissipation term in `evolve`.
    pub kappa: Option<f64>,
    pub t_final: f64,
    pub snapshots: Vec<f64>,
}

impl Default for PropagatorSection {
    fn default() -> Self {
        Self {
            integrator: "rk4".into(),
            dt: None,
            rtol: 1e-9,
            atol: 1e-11,
            output_stride: DEFAULT_OUTPUT_STRIDE,
            kappa: None,
            t_final: 20.0,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub u_min: f64,
    pub u_max: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
    pub t_window: f64,
    pub prominence: f64,
}

impl Default for ScanSection {
    fn default() -> Self {
        let s = ScanConfig::default();
        Self {
            u_min: s.u_min,
            u_max: s.u_max,
            coarse_step: s.coarse_step,
            fine_step: s.fine_step,
            t_window: s.t_window,
            prominence: s.prominence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QcSection {
    /// Stationary points of `V_pol` (Å) and their values (meV).
    pub vpol_x: [f64; 3],
    pub vpol_v: [f64; 3],
    /// Frame frequency (ps⁻¹); defaults to the curvature at the metastable minimum.
    pub omega0: Option<f64>,
    pub dt: f64,
    pub output_stride: f64,
    pub energy_tolerance: f64,
    pub t_final: f64,
    /// Start of the `qc` orbit; defaults to the metastable minimum.
    pub x_start: Option<f64>,
    /// Start of the `qc switch` orbit.
    pub switch_start: f64,
    /// Bisection range of `qc switch`.
    pub switch_range: [f64; 2],
    pub horizon: f64,
    pub settle: f64,
    pub surface_x: [f64; 2],
    pub surface_nx: usize,
    pub surface_v_max: f64,
    pub surface_nv: usize,
    pub surface_phi: f64,
}

impl Default for QcSection {
    fn default() -> Self {
        let q = QcConfig::default();
        let s = SwitchingConfig::default();
        Self {
            vpol_x: [-0.47, -0.19, 1.01],
            vpol_v: [0.8, 1.85, -48.88],
            omega0: None,
            dt: q.dt,
            output_stride: q.output_stride,
            energy_tolerance: q.energy_tolerance,
            t_final: 20.0,
            x_start: None,
            switch_start: -0.25,
            switch_range: [-0.47, -0.2],
            horizon: s.horizon,
            settle: s.settle,
            surface_x: [-0.8, 1.3],
            surface_nx: 211,
            surface_v_max: 2.0,
            surface_nv: 41,
            surface_phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Reads `path` (or starts from defaults) and applies the overrides in order.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| config_error(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| config_error(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| config_error(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

/// `section.key=value`, with `value` read as a TOML value, or as a bare
/// string when it does not parse as one.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| config_error(format!("override `{spec}` is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.len() != 2 || keys.iter().any(|k| k.is_empty()) {
        return Err(config_error(format!("override key `{path}` must be section.key")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let section = table
        .entry(keys[0])
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match section {
        toml::Value::Table(t) => {
            t.insert(keys[1].to_string(), value);
            Ok(())
        }
        _ => Err(config_error(format!("`{}` is not a section", keys[0]))),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.n_points < MIN_GRID_POINTS {
            return Err(config_error(format!(
                "grid.n_points = {} is below {MIN_GRID_POINTS}",
                g.n_points
            )));
        }
        self.grid_spec()?;
        let p = &self.propagator;
        if p.integrator != "rk4" && p.integrator != "adaptive" {
            return Err(config_error(format!(
                "propagator.integrator must be rk4 or adaptive, got `{}`",
                p.integrator
            )));
        }
        positive("propagator.output_stride", p.output_stride)?;
        positive("propagator.t_final", p.t_final)?;
        positive("propagator.rtol", p.rtol)?;
        positive("propagator.atol", p.atol)?;
        if let Some(dt) = p.dt {
            positive("propagator.dt", dt)?;
        }
        if let Some(k) = p.kappa {
            if !(k >= 0.0) {
                return Err(config_error(format!("propagator.kappa must be >= 0, got {k}")));
            }
        }
        let pot = &self.potential;
        positive("potential.mu0_debye", pot.mu0_debye)?;
        positive("potential.w", pot.w)?;
        positive("potential.length", pot.length)?;
        let q = &self.qc;
        positive("qc.dt", q.dt)?;
        positive("qc.output_stride", q.output_stride)?;
        positive("qc.energy_tolerance", q.energy_tolerance)?;
        positive("qc.t_final", q.t_final)?;
        positive("qc.horizon", q.horizon)?;
        if !(q.settle > 0.0 && q.settle < q.horizon) {
            return Err(config_error("qc.settle must lie in (0, qc.horizon)"));
        }
        positive("qc.surface_v_max", q.surface_v_max)?;
        if q.surface_nx < 2 || q.surface_nv < 2 || !(q.surface_x[0] < q.surface_x[1]) {
            return Err(config_error("qc surface needs at least a 2×2 grid over an increasing x range"));
        }
        if let Some(w) = q.omega0 {
            positive("qc.omega0", w)?;
        }
        Ok(())
    }

    pub fn consts(&self) -> PhysConstants {
        PhysConstants::xenon()
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.x_min, self.grid.x_max, self.grid.n_points)
    }

    pub fn binding(&self) -> Result<QuarticPotential> {
        match self.potential.coeffs {
            Some(c) => QuarticPotential::new(c),
            None => Ok(fit_quartic_from_extrema(self.potential.extrema_x, self.potential.extrema_v)?.0),
        }
    }

    pub fn junction(&self, bias: f64) -> Result<JunctionPotential> {
        let c = self.consts();
        let p = &self.potential;
        let dipole = DipoleModel::new(p.mu0_debye * c.debye_to_ea, p.w, p.length)?;
        Ok(JunctionPotential::new(self.binding()?, dipole, bias))
    }

    pub fn propagator(&self) -> PropagatorConfig {
        let p = &self.propagator;
        PropagatorConfig {
            integrator: if p.integrator == "adaptive" {
                Integrator::AdaptiveRk {
                    rtol: p.rtol,
                    atol: p.atol,
                }
            } else {
                Integrator::FixedRk4
            },
            dt: p.dt,
            output_stride: p.output_stride,
            kappa: p.kappa,
            rho_boundary: None,
            snapshot_times: p.snapshots.clone(),
        }
    }

    pub fn scan_config(&self) -> Result<ScanConfig> {
        let s = &self.scan;
        let mut propagator = self.propagator();
        propagator.kappa = None;
        let config = ScanConfig {
            u_min: s.u_min,
            u_max: s.u_max,
            coarse_step: s.coarse_step,
            fine_step: s.fine_step,
            t_window: s.t_window,
            prominence: s.prominence,
            grid: self.grid_spec()?,
            propagator,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn vpol(&self) -> Result<QuarticPotential> {
        Ok(fit_quartic_from_extrema(self.qc.vpol_x, self.qc.vpol_v)?.0)
    }

    pub fn qc_config(&self) -> QcConfig {
        QcConfig {
            dt: self.qc.dt,
            output_stride: self.qc.output_stride,
            energy_tolerance: self.qc.energy_tolerance,
            ..QcConfig::default()
        }
    }

    pub fn switching_config(&self) -> SwitchingConfig {
        SwitchingConfig {
            horizon: self.qc.horizon,
            settle: self.qc.settle,
            qc: self.qc_config(),
            ..SwitchingConfig::default()
        }
    }

    /// `--out`, then the environment, then `output.dir`, then `./out`.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|p| !p.is_empty()) {
            return PathBuf::from(p);
        }
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}
