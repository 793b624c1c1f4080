use nalgebra::{DMatrix, SymmetricEigen};

use super::observables::metastable_packet;
use super::{GridHamiltonian, GridSpec, WaveField};
use crate::error::{Error, Result};
use crate::model::Potential;

/// Smallest overlap weight `|⟨φ|ψ₀⟩|²` accepted for the weaker partner of a doublet.
const DOUBLET_MIN_WEIGHT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    /// Grid-normalised, `Σ φ_k²·ℓ = 1`, with its largest component positive.
    pub vector: Vec<f64>,
}

/// All eigenpairs of the grid Hamiltonian in ascending order, truncated to `count`.
pub fn lowest_eigenpairs(h: &GridHamiltonian, count: usize) -> Vec<Eigenpair> {
    let n = h.grid().n_points;
    let l = h.grid().spacing();
    let matrix = DMatrix::from_row_slice(n, n, &h.dense());
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .take(count)
        .map(|i| {
            let col = eig.eigenvectors.column(i);
            let peak = col.iter().fold(0.0f64, |m, &c| if c.abs() > m.abs() { c } else { m });
            let scale = peak.signum() / l.sqrt();
            Eigenpair {
                energy: eig.eigenvalues[i],
                vector: col.iter().map(|c| c * scale).collect(),
            }
        })
        .collect()
}

/// The pair of eigenstates sharing the metastable packet `ψ₀`.
#[derive(Debug, Clone)]
pub struct Doublet {
    pub e_d: f64,
    pub e_u: f64,
    /// `|E_u − E_d|`, meV
    pub delta: f64,
    pub lower: Eigenpair,
    pub upper: Eigenpair,
    /// Indices in the ascending spectrum.
    pub indices: (usize, usize),
    /// `|⟨φ_d|ψ₀⟩|²`, `|⟨φ_u|ψ₀⟩|²`
    pub weights: (f64, f64),
    /// Probability beyond the barrier of `(φ_d + φ_u)/√2` and of `(φ_d − φ_u)/√2`.
    pub localization: (f64, f64),
}

impl Doublet {
    /// `ħπ/Δ`, the time of full transfer between the wells.
    pub fn transfer_time(&self, hbar: f64) -> f64 {
        hbar * std::f64::consts::PI / self.delta
    }
}

/// Dense eigensolve of the grid Hamiltonian. The two eigenstates carrying the
/// largest weight of `ψ₀` form the doublet.
pub fn spectral_doublet(
    grid: GridSpec,
    pot: &impl Potential,
    mass: f64,
    hbar: f64,
) -> Result<Doublet> {
    let packet = metastable_packet(grid, pot, mass, hbar)?;
    let h = GridHamiltonian::new(grid, pot, mass, hbar);
    let pairs = lowest_eigenpairs(&h, grid.n_points);
    let l = grid.spacing();
    let weights: Vec<f64> = pairs
        .iter()
        .map(|p| {
            let overlap: f64 = p.vector.iter().zip(&packet.field.re).map(|(a, b)| a * b).sum();
            (overlap * l).powi(2)
        })
        .collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let (first, second) = (order[0], order[1]);
    if weights[second] < DOUBLET_MIN_WEIGHT {
        return Err(Error::NoDoublet(format!(
            "packet is {:.3} in one eigenstate, partner weight {:.3}",
            weights[first], weights[second]
        )));
    }
    let (i_d, i_u) = (first.min(second), first.max(second));
    let (lower, upper) = (pairs[i_d].clone(), pairs[i_u].clone());
    let x_b = packet.extrema.x_barrier;
    let combination = |sign: f64| {
        let mut f = WaveField::zeros(grid);
        for k in 0..grid.n_points {
            f.re[k] = (lower.vector[k] + sign * upper.vector[k]) / std::f64::consts::SQRT_2;
        }
        super::localization_probability(&f, x_b)
    };
    Ok(Doublet {
        e_d: lower.energy,
        e_u: upper.energy,
        delta: (upper.energy - lower.energy).abs(),
        localization: (combination(1.0), combination(-1.0)),
        lower,
        upper,
        indices: (i_d, i_u),
        weights: (weights[i_d], weights[i_u]),
    })
}
