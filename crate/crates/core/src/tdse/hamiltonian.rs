use super::GridSpec;
use crate::model::Potential;

/// Sixth-order central coefficients of `ℓ²·y″` at offsets 0, ±1, ±2, ±3.
pub const KINETIC_STENCIL: [f64; 4] = [-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];

/// Sixth-order central coefficients of `ℓ·y′` at offsets +1, +2, +3.
const DERIVATIVE_STENCIL: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];

/// Discretised `Ĥ = −ħ²/2M ∂² + V` with zero Dirichlet values beyond the grid.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    grid: GridSpec,
    /// `−ħ²/(2Mℓ²)`
    kinetic: f64,
    potential: Vec<f64>,
}

impl GridHamiltonian {
    pub fn new(grid: GridSpec, pot: &impl Potential, mass: f64, hbar: f64) -> Self {
        let potential = grid.points().map(|x| pot.value(x)).collect();
        Self::from_samples(grid, potential, mass, hbar)
    }

    pub fn from_samples(grid: GridSpec, potential: Vec<f64>, mass: f64, hbar: f64) -> Self {
        assert_eq!(potential.len(), grid.n_points);
        let l = grid.spacing();
        Self {
            grid,
            kinetic: -hbar * hbar / (2.0 * mass * l * l),
            potential,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `−ħ²/(2Mℓ²)`.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.kinetic
    }

    /// Spectral-radius estimate used for step-size selection:
    /// `(49/18)·ħ²/(Mℓ²) + max|V|`. The stencil's largest eigenvalue is about
    /// 11% above the kinetic term of this estimate.
    pub fn energy_bound(&self) -> f64 {
        let vmax = self.potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        2.0 * KINETIC_STENCIL[0].abs() * self.kinetic.abs() + vmax
    }

    /// `out = Ĥ y`.
    pub fn apply(&self, y: &[f64], out: &mut [f64]) {
        self.apply_with_extra(y, out, None);
    }

    /// `out = (Ĥ + W) y` for an optional extra multiplicative potential `W`.
    pub fn apply_with_extra(&self, y: &[f64], out: &mut [f64], extra: Option<&[f64]>) {
        let n = y.len();
        debug_assert_eq!(n, self.potential.len());
        let [c0, c1, c2, c3] = KINETIC_STENCIL;
        let k = self.kinetic;
        let at = |i: isize| -> f64 {
            if i < 0 || i as usize >= n {
                0.0
            } else {
                y[i as usize]
            }
        };
        let edge = |i: usize| -> f64 {
            let ii = i as isize;
            c3 * (at(ii + 3) + at(ii - 3))
                + c2 * (at(ii + 2) + at(ii - 2))
                + c1 * (at(ii + 1) + at(ii - 1))
                + c0 * y[i]
        };
        for i in (0..3.min(n)).chain(n.saturating_sub(3).max(3)..n) {
            out[i] = k * edge(i) + self.potential[i] * y[i];
        }
        for i in 3..n.saturating_sub(3) {
            let lap = c3 * (y[i + 3] + y[i - 3])
                + c2 * (y[i + 2] + y[i - 2])
                + c1 * (y[i + 1] + y[i - 1])
                + c0 * y[i];
            out[i] = k * lap + self.potential[i] * y[i];
        }
        if let Some(w) = extra {
            for i in 0..n {
                out[i] += w[i] * y[i];
            }
        }
    }

    /// Dense symmetric matrix, row-major.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.grid.n_points;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = self.kinetic * KINETIC_STENCIL[0] + self.potential[i];
            for (d, &c) in KINETIC_STENCIL.iter().enumerate().skip(1) {
                if i + d < n {
                    m[i * n + i + d] = self.kinetic * c;
                    m[(i + d) * n + i] = self.kinetic * c;
                }
            }
        }
        m
    }
}

/// `out = y′` with the sixth-order central stencil and zero values beyond the grid.
pub fn first_derivative(y: &[f64], spacing: f64, out: &mut [f64]) {
    let n = y.len();
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= n {
            0.0
        } else {
            y[i as usize]
        }
    };
    let [d1, d2, d3] = DERIVATIVE_STENCIL;
    for (i, o) in out.iter_mut().enumerate().take(n) {
        let ii = i as isize;
        *o = (d1 * (at(ii + 1) - at(ii - 1))
            + d2 * (at(ii + 2) - at(ii - 2))
            + d3 * (at(ii + 3) - at(ii - 3)))
            / spacing;
    }
}
