//! Quasi-classical dynamics on the squeezed Gaussian manifold
//! `ψ_c = exp(z b̂† − z* b̂) exp((s b̂†² − s* b̂²)/2) ψ₀`, `s = ρ e^{−2iφ}`.
//!
//! Energies are closed-form Gaussian averages over a quartic potential. The
//! equations of motion are integrated in the width chart `(σ, p_σ)`, which is
//! regular at the unsqueezed point where the `(v, φ)` chart is not.

mod dynamics;
mod energy;
mod state;

pub use dynamics::{
    classify_orbit, eom_rhs, evolve_qc, orbit_outcome, switching_scan, width_energy, width_rhs,
    GaussianRate, OrbitOutcome, QcConfig, QcTrace, SwitchingConfig, SwitchingReport,
    SINGULAR_V_FLOOR,
};
pub use energy::{
    curvature_frame, effective_potential, expectation_energy, resonance_vpol, smoothed_potential,
    EffectivePotential, SmoothedPotential,
};
pub use state::{moments, GaussianState, Moments, ReferenceFrame, WidthState};
