//! Coherent tunnelling of a Xe atom in a biased STM surface-tip junction.
//!
//! * [`model`]: the junction potential and its stationary points.
//! * [`tdse`]: grid propagation of the Schrödinger equation as a real
//!   Hamiltonian system, observables and the spectral doublet.
//! * [`qc`]: quasi-classical dynamics on the squeezed Gaussian manifold.
//! * [`scan`]: bias-voltage resonance scans.
//! * [`ode`]: the explicit Runge–Kutta integrators shared by the above.

pub mod error;
pub mod model;
pub mod ode;
pub mod qc;
pub mod scan;
pub mod tdse;

pub use error::{Error, ErrorCategory, Result};
