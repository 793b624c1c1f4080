use super::energy::{expectation_energy, smoothed_potential, EffectivePotential};
use super::state::{moments, GaussianState, ReferenceFrame, WidthState};
use crate::error::{Error, Result};
use crate::model::{find_extrema, QuarticPotential};
use crate::ode::{OdeSystem, Rk4};
use crate::tdse::DEFAULT_OUTPUT_STRIDE;

/// Below this occupation the `(v, φ)` equations are not evaluated.
pub const SINGULAR_V_FLOOR: f64 = 1e-10;

/// `d/dt (x_c, p_c, v, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianRate {
    pub x_c: f64,
    pub p_c: f64,
    pub v: f64,
    pub phi: f64,
}

/// Variational equations in the `(v, φ)` chart: `ẋ = ∂E/∂p`, `ṗ = −∂E/∂x`,
/// `ħφ̇ = ∂E/∂v`, `ħv̇ = −∂E/∂φ`.
pub fn eom_rhs(
    state: &GaussianState,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
) -> Result<GaussianRate> {
    if !(state.v >= SINGULAR_V_FLOOR) {
        return Err(Error::SingularChart { v: state.v });
    }
    let m = moments(state, frame);
    let w = smoothed_potential(vpol, m.mean_x, m.sigma_x2);
    let r = (state.v * (state.v + 1.0)).sqrt();
    let dr = (2.0 * state.v + 1.0) / (2.0 * r);
    let (s2, c2) = (2.0 * state.phi).sin_cos();
    let c0 = frame.c0();
    let p_scale = frame.hbar * frame.mass * frame.omega0;
    let kin = 1.0 / (2.0 * frame.mass);
    let de_dv = w.d_s * (1.0 + dr * c2) / c0 + kin * p_scale * (1.0 - dr * c2);
    let de_dphi = w.d_s * (-2.0 * r * s2) / c0 + kin * p_scale * (2.0 * r * s2);
    Ok(GaussianRate {
        x_c: state.p_c / frame.mass,
        p_c: -w.d_x,
        v: -de_dphi / frame.hbar,
        phi: de_dv / frame.hbar,
    })
}

/// `E = p_c²/2M + p_σ²/2M + ħ²/(8Mσ²) + ⟨V_pol⟩(x_c, σ²)`.
pub fn width_energy(w: &WidthState, vpol: &QuarticPotential, mass: f64, hbar: f64) -> f64 {
    (w.p_c * w.p_c + w.p_sigma * w.p_sigma) / (2.0 * mass)
        + hbar * hbar / (8.0 * mass * w.sigma * w.sigma)
        + smoothed_potential(vpol, w.x_c, w.sigma * w.sigma).value
}

/// Hamilton's equations in `(x_c, p_c, σ, p_σ)`.
pub fn width_rhs(w: &WidthState, vpol: &QuarticPotential, mass: f64, hbar: f64) -> [f64; 4] {
    let sp = smoothed_potential(vpol, w.x_c, w.sigma * w.sigma);
    [
        w.p_c / mass,
        -sp.d_x,
        w.p_sigma / mass,
        hbar * hbar / (4.0 * mass * w.sigma.powi(3)) - 2.0 * w.sigma * sp.d_s,
    ]
}

struct WidthSystem<'a> {
    vpol: &'a QuarticPotential,
    mass: f64,
    hbar: f64,
}

impl OdeSystem for WidthSystem<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        let d = width_rhs(&WidthState::from_array(y), self.vpol, self.mass, self.hbar);
        dydt.copy_from_slice(&d);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcConfig {
    /// Initial fixed RK4 step (ps), halved until the energy drift passes.
    pub dt: f64,
    pub output_stride: f64,
    pub energy_tolerance: f64,
    pub max_halvings: usize,
}

impl Default for QcConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            output_stride: DEFAULT_OUTPUT_STRIDE,
            energy_tolerance: 1e-5,
            max_halvings: 8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QcTrace {
    pub times: Vec<f64>,
    pub x_c: Vec<f64>,
    pub p_c: Vec<f64>,
    pub v: Vec<f64>,
    /// Unwrapped along the orbit.
    pub phi: Vec<f64>,
    pub sigma_x2: Vec<f64>,
    pub energy: Vec<f64>,
    /// Step that met the energy tolerance.
    pub dt: f64,
}

impl QcTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_relative_energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }

    pub fn state(&self, k: usize) -> GaussianState {
        GaussianState {
            x_c: self.x_c[k],
            p_c: self.p_c[k],
            v: self.v[k],
            phi: self.phi[k],
        }
    }
}

fn relative_drift(energy: &[f64]) -> f64 {
    let e0 = energy.first().copied().unwrap_or(0.0);
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    energy.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
}

/// Integrates the variational dynamics from `state0` in the width chart and
/// reports the orbit in `(x_c, p_c, v, φ)`.
pub fn evolve_qc(
    state0: &GaussianState,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
    t_final: f64,
    config: &QcConfig,
) -> Result<QcTrace> {
    state0.validate()?;
    if !(t_final > 0.0) {
        return Err(Error::InvalidInput(format!("t_final = {t_final} must be > 0")));
    }
    if !(config.dt > 0.0 && config.output_stride > 0.0) {
        return Err(Error::InvalidInput(format!(
            "qc step {} and stride {} must be > 0",
            config.dt, config.output_stride
        )));
    }
    let mut dt = config.dt;
    let mut drift = f64::INFINITY;
    for _ in 0..=config.max_halvings {
        let trace = integrate(state0, frame, vpol, t_final, config.output_stride, dt)?;
        drift = trace.max_relative_energy_drift();
        if drift < config.energy_tolerance {
            return Ok(trace);
        }
        dt *= 0.5;
    }
    Err(Error::IntegratorInstability {
        drift,
        suggested_dt: dt,
    })
}

fn integrate(
    state0: &GaussianState,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
    t_final: f64,
    stride: f64,
    dt: f64,
) -> Result<QcTrace> {
    let sys = WidthSystem {
        vpol,
        mass: frame.mass,
        hbar: frame.hbar,
    };
    let mut rk = Rk4::new(4);
    let mut y = WidthState::from_gaussian(state0, frame).as_array();
    let mut trace = QcTrace {
        dt,
        ..QcTrace::default()
    };
    let mut last_phi = state0.phi;
    let mut record = |trace: &mut QcTrace, t: f64, y: &[f64; 4], first: bool| -> Result<()> {
        let w = WidthState::from_array(y);
        if !(w.sigma > 0.0) || !y.iter().all(|c| c.is_finite()) {
            return Err(Error::IntegratorInstability {
                drift: f64::NAN,
                suggested_dt: 0.5 * dt,
            });
        }
        let mut g = w.to_gaussian(frame);
        if first {
            g.phi = state0.phi;
        } else {
            let turns = ((last_phi - g.phi) / std::f64::consts::PI).round();
            g.phi += turns * std::f64::consts::PI;
        }
        last_phi = g.phi;
        trace.times.push(t);
        trace.x_c.push(g.x_c);
        trace.p_c.push(g.p_c);
        trace.v.push(g.v);
        trace.phi.push(g.phi);
        trace.sigma_x2.push(w.sigma * w.sigma);
        trace.energy.push(width_energy(&w, vpol, frame.mass, frame.hbar));
        Ok(())
    };
    record(&mut trace, 0.0, &y, true)?;
    let n_out = (t_final / stride - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    for k in 1..=n_out {
        let t_next = (k as f64 * stride).min(t_final);
        let steps = ((t_next - t) / dt - 1e-9).ceil().max(1.0) as usize;
        let h = (t_next - t) / steps as f64;
        rk.advance(&sys, t, &mut y, h, steps);
        t = t_next;
        record(&mut trace, t, &y, false)?;
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitOutcome {
    /// Never beyond the barrier.
    Confined,
    /// Beyond the barrier throughout the settling window at the end.
    Switched,
    /// Crossed, but back on the metastable side at some point of the settling window.
    Transient,
}

impl OrbitOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitOutcome::Confined => "confined",
            OrbitOutcome::Switched => "switched",
            OrbitOutcome::Transient => "transient",
        }
    }
}

pub fn classify_orbit(trace: &QcTrace, x_barrier: f64, settle: f64) -> OrbitOutcome {
    if trace.x_c.iter().all(|&x| x < x_barrier) {
        return OrbitOutcome::Confined;
    }
    let t_end = trace.times.last().copied().unwrap_or(0.0);
    let stays = trace
        .times
        .iter()
        .zip(&trace.x_c)
        .filter(|(&t, _)| t >= t_end - settle)
        .all(|(_, &x)| x > x_barrier);
    if stays {
        OrbitOutcome::Switched
    } else {
        OrbitOutcome::Transient
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingConfig {
    pub horizon: f64,
    pub settle: f64,
    /// Defaults to the barrier top of `vpol`.
    pub x_barrier: Option<f64>,
    /// Bisection stops once the bracket is narrower than this (Å).
    pub tolerance: f64,
    pub qc: QcConfig,
}

impl Default for SwitchingConfig {
    fn default() -> Self {
        Self {
            horizon: 40.0,
            settle: 10.0,
            x_barrier: None,
            tolerance: 1e-4,
            qc: QcConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingReport {
    pub threshold_x: f64,
    /// `E_c` of the packet at rest at the threshold.
    pub threshold_energy: f64,
    pub confined_x: f64,
    pub escaping_x: f64,
    /// What happens just past the threshold.
    pub outcome: OrbitOutcome,
    pub x_barrier: f64,
    /// `V_av(·, v = 0)` at its metastable minimum and barrier top.
    pub vav_meta: f64,
    pub vav_barrier: f64,
}

/// Outcome of the orbit started at rest, unsqueezed, at `x_start`.
pub fn orbit_outcome(
    x_start: f64,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
    config: &SwitchingConfig,
    x_barrier: f64,
) -> Result<OrbitOutcome> {
    let trace = evolve_qc(&GaussianState::at_rest(x_start), frame, vpol, config.horizon, &config.qc)?;
    Ok(classify_orbit(&trace, x_barrier, config.settle))
}

/// Bisects the starting centroid between a confined and an escaping orbit.
pub fn switching_scan(
    range: (f64, f64),
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
    config: &SwitchingConfig,
) -> Result<SwitchingReport> {
    let (lo, hi) = range;
    let ext = find_extrema(vpol)?;
    let x_barrier = config.x_barrier.unwrap_or(ext.x_barrier);
    if !(lo < hi) || hi >= x_barrier || lo <= ext.x_meta - (x_barrier - ext.x_meta) * 4.0 {
        return Err(Error::InvalidInput(format!(
            "switching range [{lo}, {hi}] must lie in the metastable well (barrier at {x_barrier})"
        )));
    }
    let outcome = |x: f64| orbit_outcome(x, frame, vpol, config, x_barrier);
    let (o_lo, o_hi) = (outcome(lo)?, outcome(hi)?);
    let confined = |o: OrbitOutcome| o == OrbitOutcome::Confined;
    let (mut a, mut b, mut escaped) = match (confined(o_lo), confined(o_hi)) {
        (true, false) => (lo, hi, o_hi),
        (false, true) => (hi, lo, o_lo),
        _ => {
            return Err(Error::NoSwitching(format!(
                "orbits from x = {lo} ({}) and x = {hi} ({}) do not bracket a confinement edge",
                o_lo.as_str(),
                o_hi.as_str()
            )))
        }
    };
    while (b - a).abs() > config.tolerance {
        let mid = 0.5 * (a + b);
        let o = outcome(mid)?;
        if confined(o) {
            a = mid;
        } else {
            b = mid;
            escaped = o;
        }
    }
    let threshold_x = 0.5 * (a + b);
    let vav = find_extrema(&EffectivePotential {
        vpol: *vpol,
        frame: *frame,
        v: 0.0,
        phi: 0.0,
    })?;
    Ok(SwitchingReport {
        threshold_x,
        threshold_energy: expectation_energy(&GaussianState::at_rest(threshold_x), frame, vpol),
        confined_x: a,
        escaping_x: b,
        outcome: escaped,
        x_barrier,
        vav_meta: vav.v_meta,
        vav_barrier: vav.v_barrier,
    })
}
