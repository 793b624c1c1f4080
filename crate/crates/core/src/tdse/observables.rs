use super::{GridHamiltonian, GridSpec, WaveField};
use crate::error::{Error, Result};
use crate::model::{curvature_frequency, find_extrema, ExtremaReport, Potential};

/// Amplitudes above this at the grid edges are reported as leakage.
const LEAKAGE_AMPLITUDE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageWarning {
    pub boundary_amplitude: f64,
}

/// `ψ₀(x) ∝ exp(−c₀(x − x₀)²/2)`, renormalised on the grid.
pub fn gaussian_packet(
    grid: GridSpec,
    x0: f64,
    c0: f64,
) -> Result<(WaveField, Option<LeakageWarning>)> {
    if !grid.contains(x0) {
        return Err(Error::InvalidInput(format!(
            "packet centre {x0} outside grid [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    if !(c0 > 0.0) {
        return Err(Error::InvalidInput(format!("packet width parameter c0 = {c0}")));
    }
    let mut field = WaveField::zeros(grid);
    let prefactor = (c0 / std::f64::consts::PI).powf(0.25);
    for (k, x) in grid.points().enumerate() {
        field.re[k] = prefactor * (-c0 * (x - x0).powi(2) / 2.0).exp();
    }
    field.normalize();
    let edge = field.boundary_amplitude();
    let warning = (edge > LEAKAGE_AMPLITUDE).then_some(LeakageWarning {
        boundary_amplitude: edge,
    });
    Ok((field, warning))
}

/// The harmonic ground state of the metastable well of `pot`.
#[derive(Debug, Clone)]
pub struct MetastablePacket {
    pub field: WaveField,
    pub extrema: ExtremaReport,
    pub omega0: f64,
    pub c0: f64,
    pub leakage: Option<LeakageWarning>,
}

/// Builds `ψ₀` at the metastable minimum with `c₀ = Mω₀/ħ`, `ω₀ = sqrt(V″(x₀)/M)`.
pub fn metastable_packet(
    grid: GridSpec,
    pot: &impl Potential,
    mass: f64,
    hbar: f64,
) -> Result<MetastablePacket> {
    let extrema = find_extrema(pot)?;
    let omega0 = curvature_frequency(pot, extrema.x_meta, mass)?;
    let c0 = mass * omega0 / hbar;
    let (field, leakage) = gaussian_packet(grid, extrema.x_meta, c0)?;
    Ok(MetastablePacket {
        field,
        extrema,
        omega0,
        c0,
        leakage,
    })
}

/// Probability beyond `x_b`: trapezoidal rule on `|ψ|²` over `[x_b, x_max]`,
/// with the density interpolated linearly at `x_b`.
pub fn localization_probability(field: &WaveField, x_b: f64) -> f64 {
    let grid = &field.grid;
    let l = grid.spacing();
    let n = grid.n_points;
    let density: Vec<f64> = field.density().collect();
    if x_b <= grid.x_min {
        return trapezoid(&density, l);
    }
    if x_b >= grid.x_max {
        return 0.0;
    }
    let pos = (x_b - grid.x_min) / l;
    let k = (pos.floor() as usize).min(n - 2);
    let frac = pos - k as f64;
    let p_b = density[k] * (1.0 - frac) + density[k + 1] * frac;
    let head = (1.0 - frac) * l * 0.5 * (p_b + density[k + 1]);
    head + trapezoid(&density[k + 1..], l)
}

fn trapezoid(y: &[f64], h: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => h * (y[1..n - 1].iter().sum::<f64>() + 0.5 * (y[0] + y[n - 1])),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm: f64,
    /// `Σ (u·Ĥu + v·Ĥv)·ℓ`, meV
    pub energy: f64,
    pub mean_x: f64,
    pub sigma_x2: f64,
}

/// Grid quadratures `Σ f_k·ℓ`. Moments are taken against `|ψ|²` without
/// dividing by the norm.
pub fn observables(field: &WaveField, h: &GridHamiltonian) -> Observables {
    let grid = field.grid;
    let l = grid.spacing();
    let n = grid.n_points;
    let mut hu = vec![0.0; n];
    let mut hv = vec![0.0; n];
    h.apply(&field.re, &mut hu);
    h.apply(&field.im, &mut hv);
    let (mut norm, mut energy, mut m1, mut m2) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..n {
        let (u, v) = (field.re[k], field.im[k]);
        let p = u * u + v * v;
        let x = grid.x(k);
        norm += p;
        energy += u * hu[k] + v * hv[k];
        m1 += x * p;
        m2 += x * x * p;
    }
    let mean_x = m1 * l;
    Observables {
        norm: norm * l,
        energy: energy * l,
        mean_x,
        sigma_x2: m2 * l - mean_x * mean_x,
    }
}
