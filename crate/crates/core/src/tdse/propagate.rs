use std::cell::RefCell;

use super::hamiltonian::first_derivative;
use super::observables::{localization_probability, observables};
use super::{GridHamiltonian, WaveField};
use crate::error::{Error, Result};
use crate::model::{find_extrema, PhysConstants, Potential};
use crate::ode::{DormandPrince, OdeSystem, Rk4};

/// Output sampling interval (ps).
pub const DEFAULT_OUTPUT_STRIDE: f64 = 6.58e-2;

/// Fraction of `ħ/Ê_max` used as the default fixed step.
const STEP_SAFETY: f64 = 0.4;
/// RK4 stability limit on the imaginary axis.
const RK4_STABILITY: f64 = 2.0 * std::f64::consts::SQRT_2;
const NORM_DRIFT_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    FixedRk4,
    /// Embedded Dormand–Prince 5(4).
    AdaptiveRk { rtol: f64, atol: f64 },
}

impl Integrator {
    pub fn adaptive() -> Self {
        Integrator::AdaptiveRk {
            rtol: 1e-9,
            atol: 1e-11,
        }
    }
}

/// Propagation settings. Boundaries are zero Dirichlet.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    pub integrator: Integrator,
    /// Internal step (ps); `None` picks `0.4·ħ/Ê_max`.
    pub dt: Option<f64>,
    /// Sampling interval of the observable trace (ps).
    pub output_stride: f64,
    /// Squeezing-dissipation strength in units of ħ/Å⁴.
    pub kappa: Option<f64>,
    /// Lower limit of the stable-well integral; `None` uses the barrier top of
    /// the potential, or the grid midpoint when there is none.
    pub rho_boundary: Option<f64>,
    pub snapshot_times: Vec<f64>,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            integrator: Integrator::FixedRk4,
            dt: None,
            output_stride: DEFAULT_OUTPUT_STRIDE,
            kappa: None,
            rho_boundary: None,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableTrace {
    pub times: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub sigma_x2: Vec<f64>,
    pub rho: Vec<f64>,
}

impl ObservableTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(t, ρ)` at the largest ρ.
    pub fn rho_max(&self) -> (f64, f64) {
        self.times
            .iter()
            .zip(&self.rho)
            .fold((0.0, f64::NEG_INFINITY), |best, (&t, &r)| {
                if r > best.1 {
                    (t, r)
                } else {
                    best
                }
            })
    }

    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.norm.first().copied().unwrap_or(1.0);
        self.norm.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max)
    }

    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy
            .iter()
            .map(|e| (e - e0).abs() / e0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    fn push(&mut self, t: f64, obs: super::Observables, rho: f64) {
        self.times.push(t);
        self.norm.push(obs.norm);
        self.energy.push(obs.energy);
        self.mean_x.push(obs.mean_x);
        self.sigma_x2.push(obs.sigma_x2);
        self.rho.push(rho);
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: WaveField,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub field: WaveField,
    pub trace: ObservableTrace,
    pub snapshots: Vec<Snapshot>,
    /// Internal fixed step actually used, or `None` for the adaptive integrator.
    pub dt: Option<f64>,
}

/// `u̇ = Ĥv/ħ`, `v̇ = −Ĥu/ħ`.
struct LinearSystem<'a> {
    h: &'a GridHamiltonian,
    hbar: f64,
}

impl OdeSystem for LinearSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.h.grid().n_points
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        let n = self.h.grid().n_points;
        let (u, v) = y.split_at(n);
        let (du, dv) = dydt.split_at_mut(n);
        self.h.apply(v, du);
        self.h.apply(u, dv);
        let inv = 1.0 / self.hbar;
        du.iter_mut().for_each(|d| *d *= inv);
        dv.iter_mut().for_each(|d| *d *= -inv);
    }
}

/// Adds `κ·(x − ⟨x⟩)²·d⟨K̂⟩/dt` to the potential, with the moments taken
/// from the state at every right-hand-side evaluation.
struct SqueezingSystem<'a> {
    h: &'a GridHamiltonian,
    hbar: f64,
    mass: f64,
    /// meV·ps/Å⁴
    kappa: f64,
    x: Vec<f64>,
    scratch: RefCell<Scratch>,
}

struct Scratch {
    du: Vec<f64>,
    dv: Vec<f64>,
    extra: Vec<f64>,
}

impl SqueezingSystem<'_> {
    /// `d⟨K̂⟩/dt = (⟨xp̂ + p̂x⟩ − 2⟨x⟩⟨p̂⟩)/M` from the sixth-order derivative stencil.
    fn width_rate(&self, u: &[f64], v: &[f64], s: &mut Scratch) -> (f64, f64) {
        let l = self.h.grid().spacing();
        first_derivative(u, l, &mut s.du);
        first_derivative(v, l, &mut s.dv);
        let (mut mx, mut p, mut xp) = (0.0, 0.0, 0.0);
        for k in 0..u.len() {
            let current = u[k] * s.dv[k] - v[k] * s.du[k];
            mx += self.x[k] * (u[k] * u[k] + v[k] * v[k]);
            p += current;
            xp += self.x[k] * current;
        }
        let mean_x = mx * l;
        let mean_p = self.hbar * p * l;
        let sym_xp = 2.0 * self.hbar * xp * l;
        (mean_x, (sym_xp - 2.0 * mean_x * mean_p) / self.mass)
    }
}

impl OdeSystem for SqueezingSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.h.grid().n_points
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        let n = self.h.grid().n_points;
        let (u, v) = y.split_at(n);
        let mut s = self.scratch.borrow_mut();
        let (mean_x, rate) = self.width_rate(u, v, &mut s);
        let Scratch { extra, .. } = &mut *s;
        for (w, x) in extra.iter_mut().zip(&self.x) {
            *w = self.kappa * (x - mean_x).powi(2) * rate;
        }
        let (du, dv) = dydt.split_at_mut(n);
        self.h.apply_with_extra(v, du, Some(extra));
        self.h.apply_with_extra(u, dv, Some(extra));
        let inv = 1.0 / self.hbar;
        du.iter_mut().for_each(|d| *d *= inv);
        dv.iter_mut().for_each(|d| *d *= -inv);
    }
}

/// Linear evolution `ψ(t) = exp(−iĤt/ħ)ψ₀`. A `kappa` in the config is ignored.
pub fn evolve(
    field: &WaveField,
    pot: &impl Potential,
    consts: &PhysConstants,
    config: &PropagatorConfig,
    t_final: f64,
) -> Result<Evolution> {
    let h = GridHamiltonian::new(field.grid, pot, consts.mass, consts.hbar);
    let sys = LinearSystem {
        h: &h,
        hbar: consts.hbar,
    };
    let boundary = rho_boundary(config, pot, field);
    run(&sys, &h, field, config, t_final, boundary, consts.hbar)
}

/// Evolution under `Ĥ + κK̂·∂ₜ⟨K̂⟩`, `K̂ = (x − ⟨x⟩)²`.
pub fn evolve_nonlinear(
    field: &WaveField,
    pot: &impl Potential,
    consts: &PhysConstants,
    config: &PropagatorConfig,
    t_final: f64,
) -> Result<Evolution> {
    let kappa = config.kappa.unwrap_or(0.0);
    if !(kappa >= 0.0) {
        return Err(Error::InvalidInput(format!("kappa = {kappa} must be >= 0")));
    }
    let grid = field.grid;
    let n = grid.n_points;
    let h = GridHamiltonian::new(grid, pot, consts.mass, consts.hbar);
    let sys = SqueezingSystem {
        h: &h,
        hbar: consts.hbar,
        mass: consts.mass,
        kappa: kappa * consts.hbar,
        x: grid.points().collect(),
        scratch: RefCell::new(Scratch {
            du: vec![0.0; n],
            dv: vec![0.0; n],
            extra: vec![0.0; n],
        }),
    };
    let boundary = rho_boundary(config, pot, field);
    run(&sys, &h, field, config, t_final, boundary, consts.hbar)
}

fn rho_boundary(config: &PropagatorConfig, pot: &impl Potential, field: &WaveField) -> f64 {
    config.rho_boundary.unwrap_or_else(|| {
        find_extrema(pot)
            .map(|e| e.x_barrier)
            .unwrap_or(0.5 * (field.grid.x_min + field.grid.x_max))
    })
}

fn run<S: OdeSystem>(
    sys: &S,
    h: &GridHamiltonian,
    field: &WaveField,
    config: &PropagatorConfig,
    t_final: f64,
    boundary: f64,
    hbar: f64,
) -> Result<Evolution> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidInput(format!("t_final = {t_final} must be > 0")));
    }
    if !(config.output_stride > 0.0) {
        return Err(Error::InvalidInput(format!(
            "output stride {} must be > 0",
            config.output_stride
        )));
    }
    let n = field.grid.n_points;
    let mut y = Vec::with_capacity(2 * n);
    y.extend_from_slice(&field.re);
    y.extend_from_slice(&field.im);

    let stable_dt = RK4_STABILITY * hbar / h.energy_bound();
    let dt_max = match (config.integrator, config.dt) {
        (Integrator::FixedRk4, Some(dt)) => {
            if !(dt > 0.0) || dt > stable_dt {
                return Err(Error::InvalidInput(format!(
                    "dt = {dt} ps is outside (0, {stable_dt:e}] for this grid"
                )));
            }
            Some(dt)
        }
        (Integrator::FixedRk4, None) => Some(STEP_SAFETY * hbar / h.energy_bound()),
        (Integrator::AdaptiveRk { .. }, _) => None,
    };

    let mut rk4 = Rk4::new(2 * n);
    let mut dp = match config.integrator {
        Integrator::AdaptiveRk { rtol, atol } => Some(DormandPrince::new(2 * n, rtol, atol)),
        Integrator::FixedRk4 => None,
    };

    let mut current = field.clone();
    let mut trace = ObservableTrace::default();
    let record = |trace: &mut ObservableTrace, t: f64, f: &WaveField| {
        let obs = observables(f, h);
        trace.push(t, obs, localization_probability(f, boundary));
    };
    record(&mut trace, 0.0, &current);
    let norm0 = trace.norm[0];

    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = config
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t >= 0.0 && t <= t_final)
        .collect();
    pending.sort_by(f64::total_cmp);
    pending.reverse();
    let mut take_snapshots = |t: f64, f: &WaveField, pending: &mut Vec<f64>| {
        while pending.last().is_some_and(|&ts| ts <= t + 1e-12) {
            pending.pop();
            snapshots.push(Snapshot { t, field: f.clone() });
        }
    };
    take_snapshots(0.0, &current, &mut pending);

    let n_out = (t_final / config.output_stride - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    let mut used_dt = None;
    for k in 1..=n_out {
        let t_next = (k as f64 * config.output_stride).min(t_final);
        let span = t_next - t;
        match (&mut dp, dt_max) {
            (Some(dp), _) => dp.advance_to(sys, t, &mut y, t_next)?,
            (None, Some(dt)) => {
                let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
                let step = span / steps as f64;
                used_dt = Some(step);
                rk4.advance(sys, t, &mut y, step, steps);
            }
            (None, None) => unreachable!("fixed integrator always has a step"),
        }
        t = t_next;
        current.re.copy_from_slice(&y[..n]);
        current.im.copy_from_slice(&y[n..]);
        record(&mut trace, t, &current);
        let drift = (trace.norm[k] - norm0).abs();
        if !(drift <= NORM_DRIFT_LIMIT) {
            let base = dt_max.unwrap_or(stable_dt);
            return Err(Error::IntegratorInstability {
                drift,
                suggested_dt: 0.5 * base,
            });
        }
        take_snapshots(t, &current, &mut pending);
    }

    Ok(Evolution {
        field: current,
        trace,
        snapshots,
        dt: used_dt,
    })
}
