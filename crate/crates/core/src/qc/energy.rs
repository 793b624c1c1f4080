use super::state::{moments, GaussianState, ReferenceFrame};
use crate::error::Result;
use crate::model::{
    curvature_frequency, find_extrema, fit_quartic_from_extrema, PhysConstants, Potential,
    QuarticPotential,
};

/// Fitted quartic of the junction at the first resonance: extrema at
/// (−0.47, −0.19, 1.01) Å with values (0.8, 1.85, −48.88) meV. Returns the
/// fit residual alongside.
pub fn resonance_vpol() -> (QuarticPotential, f64) {
    fit_quartic_from_extrema([-0.47, -0.19, 1.01], [0.8, 1.85, -48.88])
        .expect("resonance extrema form a double well")
}

/// Frame centred on the metastable minimum of `vpol` with `ω₀ = sqrt(V″(x₀)/M)`.
pub fn curvature_frame(vpol: &impl Potential, consts: &PhysConstants) -> Result<ReferenceFrame> {
    let ext = find_extrema(vpol)?;
    let omega0 = curvature_frequency(vpol, ext.x_meta, consts.mass)?;
    ReferenceFrame::new(ext.x_meta, omega0, consts)
}

/// `⟨V⟩` of a Gaussian with centroid `x` and variance `s`, and its partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedPotential {
    pub value: f64,
    pub d_x: f64,
    pub d_s: f64,
    pub d_xx: f64,
}

pub fn smoothed_potential(vpol: &QuarticPotential, x: f64, s: f64) -> SmoothedPotential {
    let [c0, c1, c2, c3, c4] = vpol.coeffs();
    let x2 = x * x;
    let m2 = x2 + s;
    let m3 = x2 * x + 3.0 * x * s;
    let m4 = x2 * x2 + 6.0 * x2 * s + 3.0 * s * s;
    SmoothedPotential {
        value: c0 + c1 * x + c2 * m2 + c3 * m3 + c4 * m4,
        d_x: c1 + 2.0 * c2 * x + c3 * (3.0 * x2 + 3.0 * s) + c4 * (4.0 * x2 * x + 12.0 * x * s),
        d_s: c2 + 3.0 * c3 * x + c4 * (6.0 * x2 + 6.0 * s),
        d_xx: 2.0 * c2 + 6.0 * c3 * x + c4 * (12.0 * x2 + 12.0 * s),
    }
}

/// `E_c = ⟨ψ_c|Ĥ_pol|ψ_c⟩ = (p_c² + σ_p²)/2M + ⟨V_pol⟩`.
pub fn expectation_energy(
    state: &GaussianState,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
) -> f64 {
    let m = moments(state, frame);
    (m.mean_p * m.mean_p + m.sigma_p2) / (2.0 * frame.mass)
        + smoothed_potential(vpol, m.mean_x, m.sigma_x2).value
}

/// `V_av(x) = E_c(x_c = x, p_c = 0, v, φ)`.
pub fn effective_potential(
    x: f64,
    v: f64,
    phi: f64,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
) -> f64 {
    expectation_energy(&GaussianState { x_c: x, p_c: 0.0, v, phi }, frame, vpol)
}

/// `V_av(·, v, φ)` as a one-dimensional potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential {
    pub vpol: QuarticPotential,
    pub frame: ReferenceFrame,
    pub v: f64,
    pub phi: f64,
}

impl EffectivePotential {
    fn width(&self) -> (f64, f64) {
        let m = moments(&GaussianState { x_c: 0.0, p_c: 0.0, v: self.v, phi: self.phi }, &self.frame);
        (m.sigma_x2, m.sigma_p2 / (2.0 * self.frame.mass))
    }
}

impl Potential for EffectivePotential {
    fn value(&self, x: f64) -> f64 {
        let (s, kinetic) = self.width();
        kinetic + smoothed_potential(&self.vpol, x, s).value
    }

    fn derivative(&self, x: f64) -> f64 {
        smoothed_potential(&self.vpol, x, self.width().0).d_x
    }

    fn second_derivative(&self, x: f64) -> f64 {
        smoothed_potential(&self.vpol, x, self.width().0).d_xx
    }
}
