use crate::error::{Error, Result};
use crate::model::PhysConstants;

/// Centre and width scale of the harmonic reference state `ψ₀` that defines `b̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceFrame {
    pub x0: f64,
    pub omega0: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl ReferenceFrame {
    pub fn new(x0: f64, omega0: f64, consts: &PhysConstants) -> Result<Self> {
        if !(omega0 > 0.0) || !x0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "reference frame needs finite x0 and omega0 > 0 (x0 = {x0}, omega0 = {omega0})"
            )));
        }
        Ok(Self {
            x0,
            omega0,
            mass: consts.mass,
            hbar: consts.hbar,
        })
    }

    /// `c₀ = Mω₀/ħ`, Å⁻².
    pub fn c0(&self) -> f64 {
        self.mass * self.omega0 / self.hbar
    }

    /// Length unit of the displacement `α`: `sqrt(2ħ/Mω₀)`.
    pub fn x_unit(&self) -> f64 {
        (2.0 / self.c0()).sqrt()
    }

    /// Momentum unit of the displacement `β`: `sqrt(2ħMω₀)`.
    pub fn p_unit(&self) -> f64 {
        (2.0 * self.hbar * self.mass * self.omega0).sqrt()
    }
}

/// A point `(x_c, p_c, v, φ)` of the squeezed Gaussian manifold, with
/// `v = sinh²ρ` the squeezing occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub x_c: f64,
    pub p_c: f64,
    pub v: f64,
    pub phi: f64,
}

impl GaussianState {
    /// Unsqueezed packet at rest at `x_c`.
    pub fn at_rest(x_c: f64) -> Self {
        Self {
            x_c,
            p_c: 0.0,
            v: 0.0,
            phi: 0.0,
        }
    }

    /// From the complex displacement `z = α + iβ` and squeezing `(v, φ)`.
    pub fn from_displacement(frame: &ReferenceFrame, alpha: f64, beta: f64, v: f64, phi: f64) -> Self {
        Self {
            x_c: frame.x0 + alpha * frame.x_unit(),
            p_c: beta * frame.p_unit(),
            v,
            phi,
        }
    }

    /// `(α, β)`.
    pub fn displacement(&self, frame: &ReferenceFrame) -> (f64, f64) {
        ((self.x_c - frame.x0) / frame.x_unit(), self.p_c / frame.p_unit())
    }

    /// Squeezing magnitude `ρ = asinh(sqrt(v))`.
    pub fn rho(&self) -> f64 {
        self.v.sqrt().asinh()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 0.0) || !self.x_c.is_finite() || !self.p_c.is_finite() || !self.phi.is_finite() {
            return Err(Error::InvalidInput(format!("invalid Gaussian state {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_x2: f64,
    pub sigma_p2: f64,
    /// `⟨(xp + px)/2⟩ − ⟨x⟩⟨p⟩`
    pub cov_xp: f64,
}

impl Moments {
    pub fn uncertainty_product(&self) -> f64 {
        (self.sigma_x2 * self.sigma_p2).sqrt()
    }
}

pub fn moments(state: &GaussianState, frame: &ReferenceFrame) -> Moments {
    let c0 = frame.c0();
    let r = (state.v * (state.v + 1.0)).sqrt();
    let (s2, c2) = (2.0 * state.phi).sin_cos();
    Moments {
        mean_x: state.x_c,
        mean_p: state.p_c,
        sigma_x2: (0.5 + state.v + r * c2) / c0,
        sigma_p2: frame.hbar * frame.mass * frame.omega0 * (0.5 + state.v - r * c2),
        cov_xp: -frame.hbar * r * s2,
    }
}

/// Width/width-momentum coordinates `(x_c, p_c, σ, p_σ)` with `σ² = σ_x²`
/// and `cov_xp = σ·p_σ`. Smooth through the unsqueezed point `v = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthState {
    pub x_c: f64,
    pub p_c: f64,
    pub sigma: f64,
    pub p_sigma: f64,
}

impl WidthState {
    pub fn from_gaussian(state: &GaussianState, frame: &ReferenceFrame) -> Self {
        let m = moments(state, frame);
        let sigma = m.sigma_x2.sqrt();
        Self {
            x_c: state.x_c,
            p_c: state.p_c,
            sigma,
            p_sigma: m.cov_xp / sigma,
        }
    }

    /// `σ_p² = ħ²/(4σ²) + p_σ²` for a minimum-uncertainty-chirped Gaussian.
    pub fn sigma_p2(&self, hbar: f64) -> f64 {
        hbar * hbar / (4.0 * self.sigma * self.sigma) + self.p_sigma * self.p_sigma
    }

    /// Back to `(v, φ)`, with `φ ∈ (−π/2, π/2]` and `φ = 0` at `v = 0`.
    pub fn to_gaussian(&self, frame: &ReferenceFrame) -> GaussianState {
        let a = frame.c0() * self.sigma * self.sigma;
        let b = self.sigma_p2(frame.hbar) / (frame.hbar * frame.mass * frame.omega0);
        let v = (0.5 * (a + b) - 0.5).max(0.0);
        let r_cos = 0.5 * (a - b);
        let r_sin = -self.sigma * self.p_sigma / frame.hbar;
        // The phase is undefined at v = 0; round-off there must not pick π/2.
        let phi = if v < 1e-12 {
            0.0
        } else {
            0.5 * r_sin.atan2(r_cos)
        };
        GaussianState {
            x_c: self.x_c,
            p_c: self.p_c,
            v,
            phi,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x_c, self.p_c, self.sigma, self.p_sigma]
    }

    pub fn from_array(y: &[f64]) -> Self {
        Self {
            x_c: y[0],
            p_c: y[1],
            sigma: y[2],
            p_sigma: y[3],
        }
    }
}
