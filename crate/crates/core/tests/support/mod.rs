//! Brute-force reference for the squeezed Gaussian manifold: the state is
//! built in a truncated number basis by integrating the squeeze and
//! displacement generators, expanded in Hermite functions and integrated on
//! a fine mesh.

#![allow(dead_code)]

use nalgebra::Complex;
use qco_core::model::{Potential, QuarticPotential};
use qco_core::qc::{GaussianState, ReferenceFrame};

type C = Complex<f64>;

const BASIS: usize = 220;
const GENERATOR_STEPS: usize = 4000;
const MESH: usize = 24_001;

/// `ψ_c` amplitudes in the number basis of the frame.
pub fn fock_amplitudes(state: &GaussianState, frame: &ReferenceFrame) -> Vec<C> {
    let (alpha, beta) = state.displacement(frame);
    let rho = state.rho();
    // s = ρ e^{−2iφ}
    let s = C::from_polar(rho, -2.0 * state.phi);
    let z = C::new(alpha, beta);
    let mut c = vec![C::new(0.0, 0.0); BASIS];
    c[0] = C::new(1.0, 0.0);
    // (s b†² − s* b²)/2
    integrate(&mut c, |y, out| {
        for n in 0..BASIS {
            let mut acc = C::new(0.0, 0.0);
            if n >= 2 {
                acc += s * ((n * (n - 1)) as f64).sqrt() * y[n - 2];
            }
            if n + 2 < BASIS {
                acc -= s.conj() * (((n + 1) * (n + 2)) as f64).sqrt() * y[n + 2];
            }
            out[n] = acc * 0.5;
        }
    });
    // z b† − z* b
    integrate(&mut c, |y, out| {
        for n in 0..BASIS {
            let mut acc = C::new(0.0, 0.0);
            if n >= 1 {
                acc += z * (n as f64).sqrt() * y[n - 1];
            }
            if n + 1 < BASIS {
                acc -= z.conj() * ((n + 1) as f64).sqrt() * y[n + 1];
            }
            out[n] = acc;
        }
    });
    c
}

/// `c(1) = exp(G) c(0)` by RK4 in the flow parameter.
fn integrate(c: &mut [C], g: impl Fn(&[C], &mut [C])) {
    let n = c.len();
    let h = 1.0 / GENERATOR_STEPS as f64;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![C::default(); n],
        vec![C::default(); n],
        vec![C::default(); n],
        vec![C::default(); n],
        vec![C::default(); n],
    );
    for _ in 0..GENERATOR_STEPS {
        g(c, &mut k1);
        for i in 0..n {
            tmp[i] = c[i] + k1[i] * (0.5 * h);
        }
        g(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = c[i] + k2[i] * (0.5 * h);
        }
        g(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = c[i] + k3[i] * h;
        }
        g(&tmp, &mut k4);
        for i in 0..n {
            c[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureMoments {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub sigma_x2: f64,
    pub sigma_p2: f64,
    pub cov_xp: f64,
    pub mean_v: f64,
    pub energy: f64,
}

/// Moments of the explicit wave function by trapezoidal quadrature, with
/// `ψ′` from the analytic Hermite-function derivative.
pub fn quadrature_moments(
    state: &GaussianState,
    frame: &ReferenceFrame,
    vpol: &QuarticPotential,
) -> QuadratureMoments {
    let c = fock_amplitudes(state, frame);
    let c0 = frame.c0();
    let sq = c0.sqrt();
    let width = 1.0 / sq * (1.0 + 2.0 * state.v).sqrt();
    let (lo, hi) = (state.x_c - 14.0 * width, state.x_c + 14.0 * width);
    let dx = (hi - lo) / (MESH - 1) as f64;
    let amp = c0.powf(0.25);
    let mut h = vec![0.0; BASIS + 1];
    let (mut norm, mut mx, mut mx2, mut mp, mut mp2, mut mxp, mut mv) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..MESH {
        let x = lo + k as f64 * dx;
        let xi = sq * (x - frame.x0);
        hermite_functions(xi, &mut h);
        let mut psi = C::default();
        let mut dpsi = C::default();
        for n in 0..BASIS {
            psi += c[n] * h[n];
            let lower = if n > 0 { (n as f64 / 2.0).sqrt() * h[n - 1] } else { 0.0 };
            let upper = ((n + 1) as f64 / 2.0).sqrt() * h[n + 1];
            dpsi += c[n] * (lower - upper);
        }
        psi *= amp;
        dpsi *= amp * sq;
        let w = if k == 0 || k == MESH - 1 { 0.5 * dx } else { dx };
        let dens = psi.norm_sqr();
        let current = (psi.conj() * dpsi).im;
        norm += w * dens;
        mx += w * x * dens;
        mx2 += w * x * x * dens;
        mp += w * current;
        mp2 += w * dpsi.norm_sqr();
        mxp += w * x * current;
        mv += w * vpol.value(x) * dens;
    }
    let hbar = frame.hbar;
    let mean_x = mx / norm;
    let mean_p = hbar * mp / norm;
    let p2 = hbar * hbar * mp2 / norm;
    QuadratureMoments {
        norm,
        mean_x,
        mean_p,
        sigma_x2: mx2 / norm - mean_x * mean_x,
        sigma_p2: p2 - mean_p * mean_p,
        cov_xp: hbar * mxp / norm - mean_x * mean_p,
        mean_v: mv / norm,
        energy: p2 / (2.0 * frame.mass) + mv / norm,
    }
}

/// Normalised Hermite functions `h_0..h_{len−1}` at `ξ` by the stable recurrence.
fn hermite_functions(xi: f64, out: &mut [f64]) {
    out[0] = std::f64::consts::PI.powf(-0.25) * (-xi * xi / 2.0).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * xi * out[0];
    }
    for n in 1..out.len() - 1 {
        out[n + 1] = (2.0 / (n + 1) as f64).sqrt() * xi * out[n]
            - (n as f64 / (n + 1) as f64).sqrt() * out[n - 1];
    }
}
