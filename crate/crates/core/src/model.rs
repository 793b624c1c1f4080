//! Junction potential: a quartic binding term plus the bias-driven dipole term.
//!
//! Units throughout the crate are meV, Å, ps and volts. Momenta are in
//! meV·ps/Å and masses in meV·ps²/Å².

use crate::error::{Error, Result};

/// Reduced Planck constant in meV·ps.
pub const HBAR: f64 = 0.658_211_956_9;

const ATOMIC_MASS_UNIT_MEV: f64 = 931.494_102_42e9;
const SPEED_OF_LIGHT_ANG_PER_PS: f64 = 2.997_924_58e6;
const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const XENON_MASS_U: f64 = 131.293;

/// Default stationary-point search window and sampling step.
pub const SEARCH_WINDOW: (f64, f64) = (-1.2, 2.0);
pub const SEARCH_STEP: f64 = 0.005;

/// Two stationary points closer than this are treated as a merged inflection.
const MERGE_DISTANCE: f64 = 1e-3;
const ROOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    pub hbar: f64,
    pub mass: f64,
    pub debye_to_ea: f64,
}

impl PhysConstants {
    /// Constants for a Xe atom, converted from CODATA inputs.
    pub fn xenon() -> Self {
        Self::with_mass_u(XENON_MASS_U)
    }

    pub fn with_mass_u(mass_u: f64) -> Self {
        let mass =
            mass_u * ATOMIC_MASS_UNIT_MEV / (SPEED_OF_LIGHT_ANG_PER_PS * SPEED_OF_LIGHT_ANG_PER_PS);
        // 1 D = 1e-21 / c  C·m
        let debye_cm = 1e-21 / SPEED_OF_LIGHT_SI;
        Self {
            hbar: HBAR,
            mass,
            debye_to_ea: debye_cm / ELEMENTARY_CHARGE * 1e10,
        }
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::xenon()
    }
}

/// A smooth one-dimensional potential with analytic derivatives.
pub trait Potential: Sync {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;
}

/// `V(x) = Σ cᵢ xⁱ`, i = 0..=4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticPotential {
    coeffs: [f64; 5],
}

impl QuarticPotential {
    pub fn new(coeffs: [f64; 5]) -> Result<Self> {
        if !(coeffs[4] > 0.0) || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "quartic needs finite coefficients and c4 > 0, got {coeffs:?}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// The quartic whose derivative is `4a(x−r₁)(x−r₂)(x−r₃)`, shifted by `offset`.
    pub fn from_stationary_points(roots: [f64; 3], amplitude: f64, offset: f64) -> Result<Self> {
        let [r1, r2, r3] = roots;
        let s1 = r1 + r2 + r3;
        let s2 = r1 * r2 + r1 * r3 + r2 * r3;
        let s3 = r1 * r2 * r3;
        Self::new([
            offset,
            -4.0 * s3 * amplitude,
            2.0 * s2 * amplitude,
            -4.0 / 3.0 * s1 * amplitude,
            amplitude,
        ])
    }

    pub fn coeffs(&self) -> [f64; 5] {
        self.coeffs
    }
}

impl Potential for QuarticPotential {
    fn value(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4])))
    }

    fn derivative(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        c[1] + x * (2.0 * c[2] + x * (3.0 * c[3] + x * 4.0 * c[4]))
    }

    fn second_derivative(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        2.0 * c[2] + x * (6.0 * c[3] + x * 12.0 * c[4])
    }
}

/// Places the three stationary points exactly and picks amplitude and offset
/// by least squares on the three target values.
///
/// Returns the quartic and the largest absolute value mismatch (meV).
pub fn fit_quartic_from_extrema(
    positions: [f64; 3],
    values: [f64; 3],
) -> Result<(QuarticPotential, f64)> {
    if positions.iter().chain(values.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite extremum input".into()));
    }
    if !(positions[0] < positions[1] && positions[1] < positions[2]) {
        return Err(Error::InvalidGeometry(format!(
            "positions must be strictly increasing, got {positions:?}"
        )));
    }
    // Unit-amplitude shape with zero offset; V = a·shape + C.
    let shape = QuarticPotential::from_stationary_points(positions, 1.0, 0.0)?;
    let f: Vec<f64> = positions.iter().map(|&x| shape.value(x)).collect();
    let f_mean = f.iter().sum::<f64>() / 3.0;
    let y_mean = values.iter().sum::<f64>() / 3.0;
    let sxy: f64 = f
        .iter()
        .zip(values.iter())
        .map(|(fi, yi)| (fi - f_mean) * (yi - y_mean))
        .sum();
    let sxx: f64 = f.iter().map(|fi| (fi - f_mean).powi(2)).sum();
    let amplitude = sxy / sxx;
    if !(amplitude > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "values {values:?} do not describe a double well (amplitude {amplitude})"
        )));
    }
    let offset = y_mean - amplitude * f_mean;
    let quartic = QuarticPotential::from_stationary_points(positions, amplitude, offset)?;
    let residual = positions
        .iter()
        .zip(values.iter())
        .map(|(&x, &y)| (quartic.value(x) - y).abs())
        .fold(0.0, f64::max);
    Ok((quartic, residual))
}

/// Dipole interaction with the surface-tip field. `mu0` is in e·Å, so
/// `U·mu0/(2w)` comes out in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleModel {
    pub mu0: f64,
    pub w: f64,
    pub length: f64,
}

impl DipoleModel {
    pub fn new(mu0: f64, w: f64, length: f64) -> Result<Self> {
        if !(mu0 > 0.0 && w > 0.0 && length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "dipole parameters must be positive (mu0 = {mu0}, w = {w}, L = {length})"
            )));
        }
        Ok(Self { mu0, w, length })
    }

    /// 0.3 D, w = 2.2 Å, L = 1.56 Å.
    pub fn standard(consts: &PhysConstants) -> Self {
        Self {
            mu0: 0.3 * consts.debye_to_ea,
            w: 2.2,
            length: 1.56,
        }
    }

    fn profile(&self, y: f64) -> (f64, f64, f64) {
        let l4 = self.length.powi(4);
        let q = 0.3 + 0.7 * y.powi(4) / l4;
        let dq = 2.8 * y.powi(3) / l4;
        let ddq = 8.4 * y * y / l4;
        let g = 1.0 / q;
        let dg = -dq / (q * q);
        let ddg = -ddq / (q * q) + 2.0 * dq * dq / (q * q * q);
        (g, dg, ddg)
    }

    /// Prefactor in meV: `−U·mu0/(2w)` converted from eV.
    fn scale(&self, bias: f64) -> f64 {
        -bias * self.mu0 / (2.0 * self.w) * 1e3
    }

    pub fn value(&self, x: f64, bias: f64) -> f64 {
        let (gp, _, _) = self.profile(self.w + x);
        let (gm, _, _) = self.profile(self.w - x);
        self.scale(bias) * (gp - gm)
    }

    pub fn derivative(&self, x: f64, bias: f64) -> f64 {
        let (_, dgp, _) = self.profile(self.w + x);
        let (_, dgm, _) = self.profile(self.w - x);
        self.scale(bias) * (dgp + dgm)
    }

    pub fn second_derivative(&self, x: f64, bias: f64) -> f64 {
        let (_, _, ddgp) = self.profile(self.w + x);
        let (_, _, ddgm) = self.profile(self.w - x);
        self.scale(bias) * (ddgp - ddgm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionPotential {
    pub binding: QuarticPotential,
    pub dipole: DipoleModel,
    pub bias: f64,
}

impl JunctionPotential {
    pub fn new(binding: QuarticPotential, dipole: DipoleModel, bias: f64) -> Self {
        Self {
            binding,
            dipole,
            bias,
        }
    }

    pub fn with_bias(&self, bias: f64) -> Self {
        Self { bias, ..*self }
    }

    pub fn binding_value(&self, x: f64) -> f64 {
        self.binding.value(x)
    }

    pub fn dipole_value(&self, x: f64) -> f64 {
        self.dipole.value(x, self.bias)
    }
}

impl Potential for JunctionPotential {
    fn value(&self, x: f64) -> f64 {
        self.binding.value(x) + self.dipole.value(x, self.bias)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.binding.derivative(x) + self.dipole.derivative(x, self.bias)
    }

    fn second_derivative(&self, x: f64) -> f64 {
        self.binding.second_derivative(x) + self.dipole.second_derivative(x, self.bias)
    }
}

/// `½Mω²(x − center)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicPotential {
    pub mass: f64,
    pub omega: f64,
    pub center: f64,
}

impl Potential for HarmonicPotential {
    fn value(&self, x: f64) -> f64 {
        0.5 * self.mass * self.omega.powi(2) * (x - self.center).powi(2)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.mass * self.omega.powi(2) * (x - self.center)
    }

    fn second_derivative(&self, _x: f64) -> f64 {
        self.mass * self.omega.powi(2)
    }
}

/// Identically zero potential.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FreeSpace;

impl Potential for FreeSpace {
    fn value(&self, _x: f64) -> f64 {
        0.0
    }

    fn derivative(&self, _x: f64) -> f64 {
        0.0
    }

    fn second_derivative(&self, _x: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremaReport {
    pub x_meta: f64,
    pub x_barrier: f64,
    pub x_stable: f64,
    pub v_meta: f64,
    pub v_barrier: f64,
    pub v_stable: f64,
    pub curv_meta: f64,
    pub curv_stable: f64,
}

impl ExtremaReport {
    /// Barrier height seen from the metastable well, `V_b − V_0`.
    pub fn barrier_height(&self) -> f64 {
        self.v_barrier - self.v_meta
    }
}

/// Stationary points of `pot` over the default window.
pub fn find_extrema(pot: &impl Potential) -> Result<ExtremaReport> {
    find_extrema_in(pot, SEARCH_WINDOW, SEARCH_STEP)
}

/// Brackets sign changes of V′ on a uniform sample, then bisects each one.
pub fn find_extrema_in(
    pot: &impl Potential,
    window: (f64, f64),
    step: f64,
) -> Result<ExtremaReport> {
    let (lo, hi) = window;
    if !(lo < hi && step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bad search window {window:?} / step {step}"
        )));
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut d_prev = pot.derivative(lo);
    for i in 1..=n {
        let x = (lo + i as f64 * step).min(hi);
        let d = pot.derivative(x);
        if d_prev == 0.0 {
            roots.push(x_prev);
        } else if d_prev * d < 0.0 {
            roots.push(bisect(|y| pot.derivative(y), x_prev, x));
        }
        x_prev = x;
        d_prev = d;
    }
    if d_prev == 0.0 {
        roots.push(x_prev);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    match roots.as_slice() {
        [x0, xb, xg] => {
            let (c0, cb, cg) = (
                pot.second_derivative(*x0),
                pot.second_derivative(*xb),
                pot.second_derivative(*xg),
            );
            if (xb - x0).abs() < MERGE_DISTANCE {
                return Err(Error::WellVanished { bias: f64::NAN });
            }
            if !(c0 > 0.0 && cb < 0.0 && cg > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "stationary points {roots:?} are not min/max/min"
                )));
            }
            Ok(ExtremaReport {
                x_meta: *x0,
                x_barrier: *xb,
                x_stable: *xg,
                v_meta: pot.value(*x0),
                v_barrier: pot.value(*xb),
                v_stable: pot.value(*xg),
                curv_meta: c0,
                curv_stable: cg,
            })
        }
        [x] if pot.second_derivative(*x) > 0.0 => Err(Error::WellVanished { bias: f64::NAN }),
        other => Err(Error::NoDoubleWell { found: other.len() }),
    }
}

/// [`find_extrema`] for a junction, with the bias filled into vanished-well errors.
pub fn junction_extrema(j: &JunctionPotential) -> Result<ExtremaReport> {
    find_extrema(j).map_err(|e| match e {
        Error::WellVanished { .. } => Error::WellVanished { bias: j.bias },
        other => other,
    })
}

/// `ω = sqrt(V″(x)/M)`.
pub fn curvature_frequency(pot: &impl Potential, x: f64, mass: f64) -> Result<f64> {
    let curvature = pot.second_derivative(x);
    if !(curvature > 0.0) {
        return Err(Error::NotAMinimum { x, curvature });
    }
    Ok((curvature / mass).sqrt())
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (fm.abs() < ROOT_TOLERANCE && b - a < 1e-13) || b - a <= f64::EPSILON * 4.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// The binding quartic built from the zero-bias extrema (−0.7, 0, 0.89) Å /
/// (−12.7, 0.45, −23.2) meV, together with its fit residual.
pub fn standard_binding() -> (QuarticPotential, f64) {
    fit_quartic_from_extrema([-0.7, 0.0, 0.89], [-12.7, 0.45, -23.2])
        .expect("standard extrema form a double well")
}

/// Junction at `bias` with the standard binding and dipole terms.
pub fn standard_junction(bias: f64) -> JunctionPotential {
    let consts = PhysConstants::xenon();
    JunctionPotential::new(standard_binding().0, DipoleModel::standard(&consts), bias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn xenon_constants() {
        let c = PhysConstants::xenon();
        // 131.293 u · 931.49410242 MeV/u / c², with c = 2.99792458e6 Å/ps.
        let oracle = 131.293 * 931.494_102_42e9 / 2.997_924_58e6f64.powi(2);
        assert_relative_eq!(c.mass, oracle, max_relative = 1e-14);
        assert_relative_eq!(c.mass, 13.6075, max_relative = 1e-5);
        assert_relative_eq!(c.debye_to_ea, 0.20819434, max_relative = 1e-7);
        assert_eq!(c.hbar, 0.6582119569);
    }

    #[test]
    fn symmetric_well_fits_exactly() {
        let (h, c) = (3.0, 0.7);
        let (q, residual) = fit_quartic_from_extrema([-1.0, 0.0, 1.0], [c - h, c, c - h]).unwrap();
        assert!(residual < 1e-12);
        let coeffs = q.coeffs();
        assert_relative_eq!(coeffs[4], h, max_relative = 1e-12);
        assert_relative_eq!(coeffs[2], -2.0 * h, max_relative = 1e-12);
        assert_relative_eq!(coeffs[0], c, max_relative = 1e-12);
        assert!(coeffs[1].abs() < 1e-12 && coeffs[3].abs() < 1e-12);
    }

    /// Composite Simpson integral of V′ = 4a(x−x₀)(x−x_b)(x−x_g).
    fn simpson_rise(a: f64, roots: [f64; 3], from: f64, to: f64) -> f64 {
        let n = 2000;
        let h = (to - from) / n as f64;
        let dv = |x: f64| 4.0 * a * (x - roots[0]) * (x - roots[1]) * (x - roots[2]);
        let mut s = dv(from) + dv(to);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * dv(from + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn zero_bias_fit_is_overdetermined() {
        let roots = [-0.7, 0.0, 0.89];
        // Amplitude forced by matching V(x0) and V(xb) exactly.
        let unit_rise = simpson_rise(1.0, roots, roots[0], roots[1]);
        let a = (0.45 - -12.7) / unit_rise;
        let vg = 0.45 + simpson_rise(a, roots, roots[1], roots[2]);
        assert!((vg - -24.5066).abs() < 1e-3, "quadrature oracle gave {vg}");

        let (q, residual) = standard_binding();
        assert!(residual > 0.1, "three values cannot all be matched");
        assert!((residual - 0.45854).abs() < 1e-4, "residual {residual}");
        for r in roots {
            assert!(q.derivative(r).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_rejects_bad_geometry() {
        assert!(matches!(
            fit_quartic_from_extrema([0.0, -1.0, 1.0], [0.0, 1.0, 0.0]),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            fit_quartic_from_extrema([-1.0, -1.0, 1.0], [0.0, 1.0, 0.0]),
            Err(Error::InvalidGeometry(_))
        ));
        // Barrier below the wells: inverted quartic.
        assert!(matches!(
            fit_quartic_from_extrema([-1.0, 0.0, 1.0], [1.0, -1.0, 1.0]),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn dipole_vanishes_at_origin_and_at_zero_bias() {
        let j = standard_junction(-1.141);
        assert_eq!(j.dipole_value(0.0), 0.0);
        let j0 = standard_junction(0.0);
        for x in [-1.2, -0.3, 0.5, 1.9] {
            assert_eq!(j0.value(x), j0.binding_value(x));
        }
    }

    #[test]
    fn dipole_value_at_stable_minimum() {
        // Independent hand evaluation of the bracket with mu0 = 0.3 D.
        let mu0 = 0.3 * 0.20819434;
        let g = |y: f64| 1.0 / (0.3 + 0.7 * y.powi(4) / 1.56f64.powi(4));
        let expected = 1.141 * mu0 * (g(2.2 + 0.89) - g(2.2 - 0.89)) / 4.4 * 1e3;
        assert!((expected - -23.529).abs() < 1e-2);
        let j = standard_junction(-1.141);
        assert_relative_eq!(j.dipole_value(0.89), expected, max_relative = 1e-6);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let j = standard_junction(-0.8);
        let h = 1e-3;
        for x in [-1.1, -0.7, -0.2, 0.0, 0.4, 1.0, 1.9] {
            let f = |k: f64| j.value(x + k * h);
            // Five-point central differences.
            let fd1 = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
            let fd2 = (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0))
                / (12.0 * h * h);
            assert_relative_eq!(j.derivative(x), fd1, max_relative = 1e-6, epsilon = 1e-7);
            assert_relative_eq!(j.second_derivative(x), fd2, max_relative = 1e-6, epsilon = 1e-4);
        }
    }

    #[test]
    fn extrema_at_zero_and_resonant_bias() {
        let e0 = junction_extrema(&standard_junction(0.0)).unwrap();
        assert!((e0.x_meta + 0.7).abs() < 1e-8);
        assert!(e0.x_barrier.abs() < 1e-8);
        assert!((e0.x_stable - 0.89).abs() < 1e-8);
        assert!((e0.v_barrier - 0.45).abs() < 0.46);

        let e = junction_extrema(&standard_junction(-1.141)).unwrap();
        assert!((e.x_meta + 0.47).abs() < 0.03, "{e:?}");
        assert!((e.x_barrier + 0.19).abs() < 0.03, "{e:?}");
        assert!((e.x_stable - 1.01).abs() < 0.03, "{e:?}");
        let j = standard_junction(-1.141);
        for x in [e.x_meta, e.x_barrier, e.x_stable] {
            assert!(j.derivative(x).abs() < 1e-9);
        }
        assert!(e.barrier_height() > 0.0);
    }

    #[test]
    fn strong_negative_bias_removes_metastable_well() {
        match junction_extrema(&standard_junction(-1.5)) {
            Err(Error::WellVanished { bias }) => assert_eq!(bias, -1.5),
            other => panic!("expected vanished well, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_frequency_is_exact() {
        let h = HarmonicPotential {
            mass: 13.6,
            omega: 2.3,
            center: 0.1,
        };
        assert_relative_eq!(
            curvature_frequency(&h, -0.4, 13.6).unwrap(),
            2.3,
            max_relative = 1e-14
        );
        let j = standard_junction(0.0);
        assert!(matches!(
            curvature_frequency(&j, 0.0, 13.6),
            Err(Error::NotAMinimum { .. })
        ));
    }

    #[test]
    fn resonance_vpol_frequency() {
        let consts = PhysConstants::xenon();
        let (vpol, residual) =
            fit_quartic_from_extrema([-0.47, -0.19, 1.01], [0.8, 1.85, -48.88]).unwrap();
        assert!(residual < 0.05);
        let omega = curvature_frequency(&vpol, -0.47, consts.mass).unwrap();
        // The curvature of this quartic with the Xe mass; the quoted
        // 1.95 ps⁻¹ is not reachable from these extrema.
        assert!((omega - 2.468).abs() < 1e-3, "omega = {omega}");
        let h = 1e-4;
        let fd = (vpol.value(-0.47 + h) - 2.0 * vpol.value(-0.47) + vpol.value(-0.47 - h)) / (h * h);
        assert_relative_eq!(vpol.second_derivative(-0.47), fd, max_relative = 1e-6);
    }

    proptest! {
        #[test]
        fn dipole_is_odd_in_x(x in -2.0f64..2.0, u in -2.0f64..2.0) {
            let d = DipoleModel::standard(&PhysConstants::xenon());
            prop_assert!((d.value(-x, u) + d.value(x, u)).abs() < 1e-12);
        }

        #[test]
        fn dipole_is_linear_in_bias(x in -2.0f64..2.0, u in -2.0f64..2.0, alpha in -3.0f64..3.0) {
            let d = DipoleModel::standard(&PhysConstants::xenon());
            let lhs = d.value(x, alpha * u);
            let rhs = alpha * d.value(x, u);
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn fitted_quartic_is_stationary_at_inputs(
            x0 in -1.5f64..-0.2, gap1 in 0.2f64..1.0, gap2 in 0.2f64..1.5,
            amplitude in 1.0f64..300.0, offset in -5.0f64..5.0, noise in -0.1f64..0.1,
        ) {
            let positions = [x0, x0 + gap1, x0 + gap1 + gap2];
            let exact = QuarticPotential::from_stationary_points(positions, amplitude, offset).unwrap();
            let v: Vec<f64> = positions.iter().map(|&x| exact.value(x)).collect();
            let depth = (v[1] - v[0]).min(v[1] - v[2]);
            let values = [v[0] + noise * depth, v[1], v[2]];
            let (q, _) = fit_quartic_from_extrema(positions, values).unwrap();
            let scale = q.coeffs()[4];
            for x in positions {
                prop_assert!(q.derivative(x).abs() < 1e-11 * scale.max(1.0) * 10.0);
            }
            // Round trip back through the root finder when the window covers the points.
            if positions[0] > -1.2 && positions[2] < 2.0 {
                let e = find_extrema(&q).unwrap();
                prop_assert!((e.x_meta - positions[0]).abs() < 1e-8);
                prop_assert!((e.x_barrier - positions[1]).abs() < 1e-8);
                prop_assert!((e.x_stable - positions[2]).abs() < 1e-8);
            }
        }
    }
}
