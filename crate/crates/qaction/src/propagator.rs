//! Exact Euclidean transition amplitudes of the inverse-square potential,
//! spectral data extracted in the large-time limit, and the dynamically
//! generated time and length scales.
//!
//! The amplitude of the half-line potential V = (1/2) m omega^2 x^2 + g/x^2 is
//!
//! G(x,T;y) = (m omega sqrt(xy) / (hbar sinh(omega T)))
//!            * exp(-(m omega / 2 hbar)(x^2+y^2) coth(omega T))
//!            * I_gamma(m omega x y / (hbar sinh(omega T)))
//!
//! with gamma = sqrt(1 + 8 m g / hbar^2) / 2. All arithmetic runs in
//! log-space with the scaled Bessel function; the direct form overflows
//! already for moderate transition times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionParams1D, PhysConst};
use crate::specfun::{self, QuadratureSpec};

/// One evaluated transition amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSample {
    /// Final point.
    pub x: f64,
    /// Initial point.
    pub y: f64,
    /// Euclidean transition time.
    pub t: f64,
    /// Amplitude value; may underflow to 0 for very large t. `log_value`
    /// is the canonical representation.
    pub value: f64,
    pub log_value: f64,
}

/// Ground-state data and the derived dynamical scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Ground state energy hbar omega (1 + gamma).
    pub e_gr: f64,
    /// Bessel order gamma.
    pub gamma: f64,
    /// Wave-function normalization: psi = sqrt(Z0) x^{1/2+gamma} e^{-m omega x^2 / 2 hbar}.
    pub z0: f64,
    /// Time scale 1 / E_gr.
    pub t_sc: f64,
    /// Length containing 95% of the ground-state probability.
    pub lambda_sc: f64,
}

/// Bessel order gamma = sqrt(1 + 8 m g / hbar^2) / 2 of the amplitude.
pub fn gamma_index(p: &ActionParams1D, pc: &PhysConst) -> f64 {
    (1.0 + 8.0 * p.m * p.coupling() / (pc.hbar * pc.hbar)).sqrt() / 2.0
}

/// ln sinh(a) for a > 0 without overflow.
fn ln_sinh(a: f64) -> f64 {
    a + (-(-2.0 * a).exp()).ln_1p() - std::f64::consts::LN_2
}

fn check_positive(op: &'static str, vals: &[(&str, f64)]) -> Result<()> {
    for (name, v) in vals {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::domain(op, format!("{name} must be > 0 and finite, got {v}")));
        }
    }
    Ok(())
}

/// ln G(x,T;y) for the inverse-square potential, Feynman-Kac safe at any T.
pub fn log_euclidean_green(p: &ActionParams1D, pc: &PhysConst, x: f64, y: f64, t: f64) -> Result<f64> {
    check_positive("euclidean_green", &[("x", x), ("y", y), ("T", t)])?;
    if !(p.v2 > 0.0) {
        return Err(Error::domain("euclidean_green", "requires a confining x^2 term (v2 > 0)"));
    }
    let gamma = gamma_index(p, pc);
    let w = p.omega();
    let mw_h = p.m * w / pc.hbar;
    let a = w * t;
    let ln_sh = ln_sinh(a);
    let coth = 1.0 / a.tanh();
    let ln_u = (mw_h * x * y).ln() - ln_sh;
    if ln_u > 700.0 {
        return Err(Error::overflow(
            "euclidean_green",
            format!("Bessel argument exp({ln_u:.1}) not representable"),
        ));
    }
    let u = ln_u.exp();
    let ln_bessel = specfun::bessel_i_scaled(gamma, u)?.ln() + u;
    Ok((mw_h * (x * y).sqrt()).ln() - ln_sh - 0.5 * mw_h * (x * x + y * y) * coth + ln_bessel)
}

/// The exact Euclidean amplitude G(x,T;y) of Eq. (5)-form.
pub fn euclidean_green(p: &ActionParams1D, pc: &PhysConst, x: f64, y: f64, t: f64) -> Result<PropagatorSample> {
    let log_value = log_euclidean_green(p, pc, x, y, t)?;
    Ok(PropagatorSample { x, y, t, value: log_value.exp(), log_value })
}

/// ln of the full-line harmonic kernel (v_m2 = 0):
/// sqrt(m omega / (2 pi hbar sinh(omega T)))
/// * exp(-(m omega / 2 hbar) [(x^2+y^2) cosh(omega T) - 2 x y] / sinh(omega T)).
///
/// This is the v_m2 = 0 companion of [`euclidean_green`]; boundary points may
/// be anywhere on the line.
pub fn log_harmonic_green(p: &ActionParams1D, pc: &PhysConst, x: f64, y: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("harmonic_green", format!("T must be > 0 and finite, got {t}")));
    }
    if !(p.v2 > 0.0) {
        return Err(Error::domain("harmonic_green", "requires v2 > 0"));
    }
    let w = p.omega();
    let mw_h = p.m * w / pc.hbar;
    let a = w * t;
    let ln_sh = ln_sinh(a);
    let coth = 1.0 / a.tanh();
    // (x^2+y^2) cosh - 2xy over sinh, with the 2xy/sinh term underflow-safe
    let cross = 2.0 * x * y * (ln_sh.exp().recip());
    let cross = if cross.is_finite() { cross } else { 0.0 };
    let exponent = -0.5 * mw_h * ((x * x + y * y) * coth - cross);
    Ok(0.5 * ((mw_h / (2.0 * std::f64::consts::PI * pc.hbar) * pc.hbar).ln() - ln_sh) + exponent)
}

/// Full-line harmonic amplitude sample.
pub fn harmonic_green(p: &ActionParams1D, pc: &PhysConst, x: f64, y: f64, t: f64) -> Result<PropagatorSample> {
    let log_value = log_harmonic_green(p, pc, x, y, t)?;
    Ok(PropagatorSample { x, y, t, value: log_value.exp(), log_value })
}

/// Ground-state energy, wave-function normalization and the dynamical scales.
///
/// E_gr = hbar omega (1 + gamma); T_sc = 1/E_gr; Lambda_sc solves
/// int_0^Lambda |psi|^2 = 0.95, reduced to a regularized-incomplete-gamma
/// condition by t = m omega x^2 / hbar and solved by bisection to 1e-10.
pub fn ground_state(p: &ActionParams1D, pc: &PhysConst) -> Result<SpectralData> {
    if !(p.v2 > 0.0) {
        return Err(Error::domain("ground_state", "requires v2 > 0"));
    }
    let gamma = gamma_index(p, pc);
    let w = p.omega();
    let e_gr = pc.hbar * w * (1.0 + gamma);
    let t_sc = 1.0 / e_gr;
    let mw_h = p.m * w / pc.hbar;
    // unit norm: Z0 = 2 (m omega / hbar)^{1+gamma} / Gamma(1+gamma)
    let z0 = (std::f64::consts::LN_2 + (1.0 + gamma) * mw_h.ln() - specfun::ln_gamma(1.0 + gamma)).exp();
    // P(gamma+1, m omega Lambda^2 / hbar) = 0.95
    let a = gamma + 1.0;
    let mut hi = 1.0;
    while specfun::reg_lower_gamma(a, hi)? < 0.95 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::no_convergence("ground_state", "quantile bracket for Lambda_sc"));
        }
    }
    let t95 = specfun::bisect(|t| specfun::reg_lower_gamma(a, t).unwrap() - 0.95, 0.0, hi, 1e-10, 200)?;
    let lambda_sc = (t95 / mw_h).sqrt();
    Ok(SpectralData { e_gr, gamma, z0, t_sc, lambda_sc })
}

/// Normalized ground-state wave function psi(x) = sqrt(Z0) x^{1/2+gamma} e^{-m omega x^2 / 2 hbar}.
pub fn wavefunction(sd: &SpectralData, p: &ActionParams1D, pc: &PhysConst, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("wavefunction", format!("x must be > 0, got {x}")));
    }
    let mw_h = p.m * p.omega() / pc.hbar;
    Ok((0.5 * sd.z0.ln() + (0.5 + sd.gamma) * x.ln() - 0.5 * mw_h * x * x).exp())
}

/// Semigroup (Chapman-Kolmogorov) residual: relative deviation of
/// int_0^inf G(x,T1;z) G(z,T2;y) dz from G(x,T1+T2;y).
pub fn chapman_kolmogorov_residual(
    p: &ActionParams1D,
    pc: &PhysConst,
    x: f64,
    y: f64,
    t1: f64,
    t2: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let direct = log_euclidean_green(p, pc, x, y, t1 + t2)?;
    let composed = specfun::integrate_to_inf(
        |z| {
            if z <= 0.0 {
                return 0.0;
            }
            let l1 = log_euclidean_green(p, pc, x, z, t1).unwrap_or(f64::NEG_INFINITY);
            let l2 = log_euclidean_green(p, pc, z, y, t2).unwrap_or(f64::NEG_INFINITY);
            (l1 + l2 - direct).exp()
        },
        0.0,
        spec,
    )?;
    Ok((composed - 1.0).abs())
}
