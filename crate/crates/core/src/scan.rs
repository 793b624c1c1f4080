//! Bias-voltage resonance scans: `max ρ` over a fixed window as a function of
//! `U`, peak refinement and the two-level reading of the transfer curve.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{JunctionPotential, PhysConstants};
use crate::tdse::{
    evolve, metastable_packet, spectral_doublet, GridSpec, ObservableTrace, PropagatorConfig,
};

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const NOT_TWO_LEVEL_RMS: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub u_min: f64,
    pub u_max: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
    /// Observation window (ps).
    pub t_window: f64,
    /// Minimum prominence in `max ρ` for a local maximum to be refined.
    pub prominence: f64,
    pub grid: GridSpec,
    pub propagator: PropagatorConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            u_min: -1.2,
            u_max: -0.9,
            coarse_step: 5e-3,
            fine_step: 5e-4,
            t_window: 20.0,
            prominence: 0.5,
            grid: GridSpec::default(),
            propagator: PropagatorConfig::default(),
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_min < self.u_max) {
            return Err(Error::InvalidInput(format!(
                "empty bias range [{}, {}]",
                self.u_min, self.u_max
            )));
        }
        if !(self.coarse_step > 0.0 && self.fine_step > 0.0 && self.t_window > 0.0) {
            return Err(Error::InvalidInput(
                "scan steps and window must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Coarse bias samples from `u_min`, with `u_max` always included.
    pub fn biases(&self) -> Vec<f64> {
        let n = ((self.u_max - self.u_min) / self.coarse_step + 1e-9).floor() as usize;
        let mut us: Vec<f64> = (0..=n)
            .map(|i| self.u_min + i as f64 * self.coarse_step)
            .collect();
        if self.u_max - us[n] > 1e-9 * self.coarse_step {
            us.push(self.u_max);
        }
        us
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub u: f64,
    pub rho_max: f64,
    pub t_at_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelFit {
    pub t_max: f64,
    /// `ħπ/T_max`, meV
    pub delta: f64,
    pub rms: f64,
}

#[derive(Debug, Clone)]
pub struct Peak {
    pub u: f64,
    /// Time of the largest sampled `ρ` at `u`.
    pub t_max: f64,
    pub rho_max: f64,
    pub prominence: f64,
    pub fit: Result<TwoLevelFit>,
    pub delta_spectral: Result<f64>,
    pub trace: ObservableTrace,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub peaks: Vec<Peak>,
    /// Local maxima below the prominence threshold, with their prominence.
    pub secondary: Vec<(ScanPoint, f64)>,
}

/// Evolves the metastable packet at bias `u` over the window. `None` when the
/// metastable well does not exist at `u`.
pub fn evaluate_bias(
    base: &JunctionPotential,
    consts: &PhysConstants,
    config: &ScanConfig,
    u: f64,
) -> Result<Option<(ScanPoint, ObservableTrace)>> {
    let j = base.with_bias(u);
    let packet = match metastable_packet(config.grid, &j, consts.mass, consts.hbar) {
        Ok(p) => p,
        Err(Error::WellVanished { .. }) | Err(Error::NoDoubleWell { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let prop = PropagatorConfig {
        rho_boundary: Some(packet.extrema.x_barrier),
        snapshot_times: Vec::new(),
        ..config.propagator.clone()
    };
    let ev = evolve(&packet.field, &j, consts, &prop, config.t_window)?;
    let (t_at_max, rho_max) = ev.trace.rho_max();
    Ok(Some((ScanPoint { u, rho_max, t_at_max }, ev.trace)))
}

pub fn scan(base: &JunctionPotential, consts: &PhysConstants, config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let evaluated: Vec<Result<Option<ScanPoint>>> = config
        .biases()
        .into_par_iter()
        .map(|u| evaluate_bias(base, consts, config, u).map(|r| r.map(|(p, _)| p)))
        .collect();
    let mut points = Vec::new();
    for r in evaluated {
        if let Some(p) = r? {
            points.push(p);
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyScan);
    }

    let rho: Vec<f64> = points.iter().map(|p| p.rho_max).collect();
    let mut peaks = Vec::new();
    let mut secondary = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        if !(rho[i] > rho[i - 1] && rho[i] >= rho[i + 1]) {
            continue;
        }
        let prom = prominence(&rho, i);
        if prom < config.prominence {
            secondary.push((points[i], prom));
            continue;
        }
        let (u, t_max, rho_max, trace) =
            refine_peak((points[i - 1].u, points[i + 1].u), base, consts, config)?;
        let j = base.with_bias(u);
        peaks.push(Peak {
            u,
            t_max,
            rho_max,
            prominence: prom,
            fit: two_level_fit(&trace, consts.hbar),
            delta_spectral: spectral_doublet(config.grid, &j, consts.mass, consts.hbar)
                .map(|d| d.delta),
            trace,
        });
    }
    Ok(ScanResult {
        points,
        peaks,
        secondary,
    })
}

/// Height above the higher of the two lowest points reachable on either side
/// before meeting a higher sample.
fn prominence(y: &[f64], i: usize) -> f64 {
    let base = |range: &mut dyn Iterator<Item = usize>| {
        let mut low = y[i];
        for k in range {
            if y[k] > y[i] {
                break;
            }
            low = low.min(y[k]);
        }
        low
    };
    let left = base(&mut (0..i).rev());
    let right = base(&mut (i + 1..y.len()));
    y[i] - left.max(right)
}

/// Golden-section search for the largest `max ρ` inside `bracket`, down to the
/// fine step. Returns `(U*, T_max, max ρ, trace at U*)`.
pub fn refine_peak(
    bracket: (f64, f64),
    base: &JunctionPotential,
    consts: &PhysConstants,
    config: &ScanConfig,
) -> Result<(f64, f64, f64, ObservableTrace)> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::BadBracket { lo, hi });
    }
    let eval = |u: f64| -> Result<(ScanPoint, ObservableTrace)> {
        evaluate_bias(base, consts, config, u)?.ok_or(Error::BadBracket { lo, hi })
    };
    let (f_lo, _) = eval(lo)?;
    let (f_hi, _) = eval(hi)?;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut e1 = eval(x1)?;
    let mut e2 = eval(x2)?;
    let mut best = if e1.0.rho_max >= e2.0.rho_max { e1.clone() } else { e2.clone() };
    while b - a > config.fine_step {
        if e1.0.rho_max >= e2.0.rho_max {
            b = x2;
            x2 = x1;
            e2 = e1;
            x1 = b - GOLDEN * (b - a);
            e1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            e1 = e2;
            x2 = a + GOLDEN * (b - a);
            e2 = eval(x2)?;
        }
        for e in [&e1, &e2] {
            if e.0.rho_max > best.0.rho_max {
                best = e.clone();
            }
        }
    }
    if best.0.rho_max < f_lo.rho_max.max(f_hi.rho_max) {
        return Err(Error::BadBracket { lo, hi });
    }
    let (p, trace) = best;
    Ok((p.u, p.t_at_max, p.rho_max, trace))
}

/// Least-squares fit of `ρ(t) = [1 − cos(πt/T)]/2` with `T` no longer than the
/// trace, so that at least half an oscillation is covered.
pub fn two_level_fit(trace: &ObservableTrace, hbar: f64) -> Result<TwoLevelFit> {
    fit_law(&trace.times, &trace.rho, hbar)
}

pub fn fit_law(times: &[f64], rho: &[f64], hbar: f64) -> Result<TwoLevelFit> {
    if times.len() != rho.len() || times.len() < 4 {
        return Err(Error::InvalidInput("two-level fit needs at least 4 samples".into()));
    }
    let span = times[times.len() - 1] - times[0];
    if !(span > 0.0) {
        return Err(Error::InvalidInput("two-level fit needs a time span".into()));
    }
    let sse = |t_max: f64| -> f64 {
        times
            .iter()
            .zip(rho)
            .map(|(&t, &r)| {
                let m = 0.5 * (1.0 - (std::f64::consts::PI * t / t_max).cos());
                (m - r).powi(2)
            })
            .sum()
    };
    let t_lo = span / 50.0;
    let n = 2000;
    let grid: Vec<f64> = (0..=n).map(|k| t_lo * (span / t_lo).powf(k as f64 / n as f64)).collect();
    let k_best = (0..=n)
        .min_by(|&a, &b| sse(grid[a]).total_cmp(&sse(grid[b])))
        .expect("non-empty grid");
    let (mut a, mut b) = (grid[k_best.saturating_sub(1)], grid[(k_best + 1).min(n)]);
    while b - a > 1e-12 * b {
        let x1 = b - GOLDEN * (b - a);
        let x2 = a + GOLDEN * (b - a);
        if sse(x1) <= sse(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let t_max = 0.5 * (a + b);
    let rms = (sse(t_max) / times.len() as f64).sqrt();
    if rms > NOT_TWO_LEVEL_RMS {
        return Err(Error::NotTwoLevel { rms, t_max });
    }
    Ok(TwoLevelFit {
        t_max,
        delta: hbar * std::f64::consts::PI / t_max,
        rms,
    })
}
