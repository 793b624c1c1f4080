//! Exact grid dynamics of the Schrödinger equation.
//!
//! The wave function on a uniform grid is split into its real and imaginary
//! parts `(u, v)`, and `iħψ̇ = Ĥψ` is integrated as the real Hamiltonian
//! system `2ħu̇ = ∂H/∂v`, `2ħv̇ = −∂H/∂u` with `H = Σ u·Ĥu + v·Ĥv`.

mod hamiltonian;
mod observables;
mod propagate;
mod spectrum;

pub use hamiltonian::{first_derivative, GridHamiltonian, KINETIC_STENCIL};
pub use observables::{
    gaussian_packet, localization_probability, metastable_packet, observables, LeakageWarning,
    MetastablePacket, Observables,
};
pub use propagate::{
    evolve, evolve_nonlinear, Evolution, Integrator, ObservableTrace, PropagatorConfig, Snapshot,
    DEFAULT_OUTPUT_STRIDE,
};
pub use spectrum::{lowest_eigenpairs, spectral_doublet, Doublet, Eigenpair};

use crate::error::{Error, Result};

/// Uniform grid `x_k = x_min + k·ℓ`, `k = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || n_points < 8 || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid [{x_min}, {x_max}] with {n_points} points"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.x(k))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

impl Default for GridSpec {
    /// 321 points over [−1.2, 2] Å, ℓ = 0.01 Å.
    fn default() -> Self {
        Self {
            x_min: -1.2,
            x_max: 2.0,
            n_points: 321,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: GridSpec,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl WaveField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            re: vec![0.0; grid.n_points],
            im: vec![0.0; grid.n_points],
        }
    }

    pub fn density(&self) -> impl Iterator<Item = f64> + '_ {
        self.re.iter().zip(&self.im).map(|(u, v)| u * u + v * v)
    }

    pub fn norm(&self) -> f64 {
        self.density().sum::<f64>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) {
        let s = self.norm().sqrt();
        if s > 0.0 {
            self.re.iter_mut().chain(self.im.iter_mut()).for_each(|y| *y /= s);
        }
    }

    /// Complex conjugate, i.e. time reversal of the state.
    pub fn conjugate(&mut self) {
        self.im.iter_mut().for_each(|v| *v = -*v);
    }

    /// `⟨self|other⟩` as (re, im).
    pub fn inner(&self, other: &WaveField) -> (f64, f64) {
        let l = self.grid.spacing();
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..self.re.len() {
            let (a, b) = (self.re[k], self.im[k]);
            let (c, d) = (other.re[k], other.im[k]);
            re += a * c + b * d;
            im += a * d - b * c;
        }
        (re * l, im * l)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &WaveField) -> f64 {
        let (re, im) = self.inner(other);
        re * re + im * im
    }

    /// Largest amplitude among the three outermost points on each side.
    pub fn boundary_amplitude(&self) -> f64 {
        let n = self.re.len();
        (0..3)
            .chain(n - 3..n)
            .map(|k| (self.re[k].powi(2) + self.im[k].powi(2)).sqrt())
            .fold(0.0, f64::max)
    }
}
