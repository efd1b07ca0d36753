//! Euclidean boundary-value trajectories for the 1-D action and the value of
//! the action along them, by two independent methods:
//!
//! * an energy-conservation quadrature solver (fast, used inside fits), and
//! * a discrete mesh relaxation solver (damped Newton on the discrete
//!   equation of motion), the method whose resolution dependence the
//!   resolution study measures.
//!
//! The Euclidean equation of motion is m x'' = +V'(x); the conserved
//! quantity is E = (m/2) x'^2 - V(x). Transit times and actions are
//! integrals with inverse-square-root turning-point singularities. For the
//! potential family v2 x^2 + v_m2 x^{-2} + v0 the substitution
//!
//!     s = h(x) = sqrt(v2) x - sqrt(v_m2) / x
//!
//! is invertible in closed form and turns V - V_min into s^2 exactly, with
//! no cancellation near the minimum. A second substitution s = a cosh(theta)
//! (or a sinh(theta)) absorbs the square root exactly, so every quadrature
//! below runs over a smooth bounded integrand even when the energy sits
//! within 1e-300 of the critical value. This is the inverse-square-root
//! substitution of `specfun::integrate_sqrt_endpoint`, specialized to the
//! family's closed form.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ActionParams1D;
use crate::specfun::{integrate, QuadratureSpec};

/// Which solver produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Quadrature,
    Relaxation,
}

/// Which kind of extremal path connects the boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathBranch {
    /// Monotone path between the endpoints.
    Direct,
    /// Path with exactly one turning point between the endpoints and the
    /// potential minimum.
    SingleTurning,
}

/// A discretized extremal Euclidean path with its action value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanTrajectory {
    /// Uniform time mesh t_0 = 0 .. t_N = T.
    pub times: Vec<f64>,
    /// Positions on the mesh; positive throughout for half-line potentials.
    pub positions: Vec<f64>,
    /// Conserved Euclidean energy (m/2) x'^2 - V(x).
    pub euclid_energy: f64,
    /// Action value along the path.
    pub sigma: f64,
    pub method: SolveMethod,
    /// Meshpoints per unit time.
    pub mesh_density: usize,
}

/// Closed-form machinery for the potential family in h-space.
#[derive(Debug, Clone, Copy)]
struct HSpace {
    m: f64,
    s2: f64,
    sm2: f64,
    v_min: f64,
}

impl HSpace {
    fn new(p: &ActionParams1D) -> Result<Self> {
        if !(p.v2 > 0.0) {
            return Err(Error::domain("trajectory", "confining potential required (v2 > 0)"));
        }
        p.validate()?;
        Ok(HSpace { m: p.m, s2: p.v2.sqrt(), sm2: p.v_m2.sqrt(), v_min: p.v_min() })
    }

    fn h(&self, x: f64) -> f64 {
        if self.sm2 > 0.0 {
            self.s2 * x - self.sm2 / x
        } else {
            self.s2 * x
        }
    }

    /// Inverse of h; valid for all real s (half-line case maps onto x > 0).
    fn x_of_h(&self, s: f64) -> f64 {
        if self.sm2 > 0.0 {
            (s + (s * s + 4.0 * self.s2 * self.sm2).sqrt()) / (2.0 * self.s2)
        } else {
            s / self.s2
        }
    }

    fn h_prime(&self, x: f64) -> f64 {
        if self.sm2 > 0.0 {
            self.s2 + self.sm2 / (x * x)
        } else {
            self.s2
        }
    }

    /// Transit time along a monotone h-interval at energy |E'| = exp(2 ln_a).
    /// theta parametrizes s = sgn * a cosh(theta) (E' < 0) or s = a sinh(theta)
    /// (E' > 0, theta signed); the substitution removes the turning-point
    /// square root exactly.
    fn segment_time(
        &self,
        ln_a: f64,
        positive_energy: bool,
        sgn: f64,
        th0: f64,
        th1: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if th1 <= th0 {
            return Ok(0.0);
        }
        let val = integrate(
            |th| {
                let ep = (ln_a + th).exp();
                let em = (ln_a - th).exp();
                let s = if positive_energy { 0.5 * (ep - em) } else { sgn * 0.5 * (ep + em) };
                1.0 / self.h_prime(self.x_of_h(s))
            },
            th0,
            th1,
            spec,
        )?;
        Ok((self.m / 2.0).sqrt() * val)
    }

    /// Kinetic action integral sqrt(2m) int sqrt(KE) dx over the same segment.
    fn segment_action(
        &self,
        ln_a: f64,
        positive_energy: bool,
        sgn: f64,
        th0: f64,
        th1: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if th1 <= th0 {
            return Ok(0.0);
        }
        let val = integrate(
            |th| {
                let ep = (ln_a + th).exp();
                let em = (ln_a - th).exp();
                let (s, q) = if positive_energy {
                    (0.5 * (ep - em), 0.5 * (ep + em))
                } else {
                    (sgn * 0.5 * (ep + em), 0.5 * (ep - em))
                };
                q * q / self.h_prime(self.x_of_h(s))
            },
            th0,
            th1,
            spec,
        )?;
        Ok((2.0 * self.m).sqrt() * val)
    }
}

fn theta_sinh(h: f64, ln_a: f64) -> f64 {
    (h / ln_a.exp()).asinh()
}
fn theta_cosh(h_abs: f64, ln_a: f64) -> f64 {
    (h_abs / ln_a.exp()).max(1.0).acosh()
}

/// A solved branch point: E' = E + V_min with |E'| = exp(2 ln_a).
#[derive(Debug, Clone, Copy)]
struct BranchPoint {
    e_shifted: f64,
    ln_a: f64,
    branch: PathBranch,
}

fn path_time(hs: &HSpace, hx: f64, hy: f64, bp: &BranchPoint, spec: &QuadratureSpec) -> Result<f64> {
    match bp.branch {
        PathBranch::Direct => {
            if bp.e_shifted > 0.0 {
                let (t0, t1) = (theta_sinh(hy, bp.ln_a), theta_sinh(hx, bp.ln_a));
                hs.segment_time(bp.ln_a, true, 1.0, t0.min(t1), t0.max(t1), spec)
            } else {
                let sgn = if hx >= 0.0 { 1.0 } else { -1.0 };
                let (t0, t1) = (theta_cosh(hy.abs(), bp.ln_a), theta_cosh(hx.abs(), bp.ln_a));
                hs.segment_time(bp.ln_a, false, sgn, t0.min(t1), t0.max(t1), spec)
            }
        }
        PathBranch::SingleTurning => {
            let sgn = if hx >= 0.0 { 1.0 } else { -1.0 };
            let tx = theta_cosh(hx.abs(), bp.ln_a);
            let ty = theta_cosh(hy.abs(), bp.ln_a);
            Ok(hs.segment_time(bp.ln_a, false, sgn, 0.0, ty, spec)?
                + hs.segment_time(bp.ln_a, false, sgn, 0.0, tx, spec)?)
        }
    }
}

/// Kinetic action integral sqrt(2m) int sqrt(KE) dx along the solved path.
fn path_kinetic_action(hs: &HSpace, hx: f64, hy: f64, bp: &BranchPoint, spec: &QuadratureSpec) -> Result<f64> {
    let kinetic_action = match bp.branch {
        PathBranch::Direct => {
            if bp.e_shifted > 0.0 {
                let (t0, t1) = (theta_sinh(hy, bp.ln_a), theta_sinh(hx, bp.ln_a));
                hs.segment_action(bp.ln_a, true, 1.0, t0.min(t1), t0.max(t1), spec)?
            } else {
                let sgn = if hx >= 0.0 { 1.0 } else { -1.0 };
                let (t0, t1) = (theta_cosh(hy.abs(), bp.ln_a), theta_cosh(hx.abs(), bp.ln_a));
                hs.segment_action(bp.ln_a, false, sgn, t0.min(t1), t0.max(t1), spec)?
            }
        }
        PathBranch::SingleTurning => {
            let sgn = if hx >= 0.0 { 1.0 } else { -1.0 };
            let tx = theta_cosh(hx.abs(), bp.ln_a);
            let ty = theta_cosh(hy.abs(), bp.ln_a);
            hs.segment_action(bp.ln_a, false, sgn, 0.0, ty, spec)?
                + hs.segment_action(bp.ln_a, false, sgn, 0.0, tx, spec)?
        }
    };
    Ok(kinetic_action)
}

fn check_boundary(p: &ActionParams1D, x: f64, y: f64) -> Result<()> {
    if p.half_line() {
        for (name, v) in [("x", x), ("y", y)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain("trajectory", format!("{name} must be > 0 on the half line, got {v}")));
            }
        }
    } else {
        for (name, v) in [("x", x), ("y", y)] {
            if !v.is_finite() {
                return Err(Error::domain("trajectory", format!("{name} must be finite, got {v}")));
            }
        }
    }
    Ok(())
}

/// Transit time from y to x at Euclidean energy E = (m/2) x'^2 - V(x).
///
/// The direct branch is evaluated whenever the energy admits a monotone
/// path; use [`transit_time_with_branch`] to request the single-turning-point
/// branch explicitly (both branches exist for a window of energies).
pub fn transit_time(p: &ActionParams1D, e: f64, x: f64, y: f64) -> Result<f64> {
    transit_time_with_branch(p, e, x, y, PathBranch::Direct)
}

/// Transit time on a chosen branch. Errors with `InfeasibleEnergy` when no
/// real path of that kind exists.
pub fn transit_time_with_branch(p: &ActionParams1D, e: f64, x: f64, y: f64, branch: PathBranch) -> Result<f64> {
    check_boundary(p, x, y)?;
    let hs = HSpace::new(p)?;
    let (hx, hy) = (hs.h(x), hs.h(y));
    let e_shifted = e + hs.v_min;
    let spec = quad_spec();
    match branch {
        PathBranch::Direct => {
            if hx * hy < 0.0 || hx == 0.0 || hy == 0.0 {
                // path passes over the potential minimum
                if e_shifted <= 0.0 {
                    return Err(Error::infeasible(
                        "transit_time",
                        format!("direct path over the minimum needs E > {}, got E = {e}", -hs.v_min),
                    ));
                }
            } else {
                let amin2 = hx.abs().min(hy.abs()).powi(2);
                if e_shifted < -amin2 {
                    return Err(Error::infeasible(
                        "transit_time",
                        format!("direct path needs E >= {}, got E = {e}", -amin2 - hs.v_min),
                    ));
                }
            }
            if e_shifted == 0.0 {
                return Err(Error::infeasible("transit_time", "E = -V_min sits exactly on the critical energy"));
            }
            let ln_a = 0.5 * e_shifted.abs().ln();
            let bp = BranchPoint { e_shifted, ln_a, branch };
            path_time(&hs, hx, hy, &bp, &spec)
        }
        PathBranch::SingleTurning => {
            if hx * hy <= 0.0 {
                return Err(Error::infeasible(
                    "transit_time",
                    "turning path requires both endpoints on the same side of the potential minimum",
                ));
            }
            let amin2 = hx.abs().min(hy.abs()).powi(2);
            if !(e_shifted < 0.0 && e_shifted > -amin2) {
                return Err(Error::infeasible(
                    "transit_time",
                    format!("turning path needs E in ({}, {}), got E = {e}", -amin2 - hs.v_min, -hs.v_min),
                ));
            }
            let ln_a = 0.5 * (-e_shifted).ln();
            let bp = BranchPoint { e_shifted, ln_a, branch };
            path_time(&hs, hx, hy, &bp, &spec)
        }
    }
}

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-12, max_subdivisions: 400 }
}

/// Lowest log-scale for the branch parameter; transit times at this floor
/// exceed any practically requested transition time.
const LN_A_FLOOR: f64 = -340.0;

/// Find the branch point whose transit time equals T, by bisection on a
/// logarithmic energy parametrization. The energy approaches the critical
/// value exponentially fast in T, far below the f64 resolution of E itself,
/// so the bisection variable is ln|E'| rather than E.
fn solve_branch_point(hs: &HSpace, hx: f64, hy: f64, t: f64, spec: &QuadratureSpec) -> Result<BranchPoint> {
    let straddle = hx * hy < 0.0 || hx == 0.0 || hy == 0.0;
    if straddle {
        // direct over the minimum: E' = exp(2 ln_a), time decreasing in ln_a
        let time_at = |ln_a: f64| -> Result<f64> {
            let bp = BranchPoint { e_shifted: (2.0 * ln_a).exp(), ln_a, branch: PathBranch::Direct };
            path_time(hs, hx, hy, &bp, spec)
        };
        let mut hi = 1.0f64;
        while time_at(hi)? > t {
            hi += 4.0;
            if hi > 350.0 {
                return Err(Error::bracketing("solve_trajectory", format!("no direct energy reaches T = {t}")));
            }
        }
        let mut lo = LN_A_FLOOR;
        if time_at(lo)? < t {
            return Err(Error::bracketing(
                "solve_trajectory",
                format!("T = {t} beyond the resolvable range of the direct branch"),
            ));
        }
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if time_at(mid)? > t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ln_a = 0.5 * (lo + hi);
        Ok(BranchPoint { e_shifted: (2.0 * ln_a).exp(), ln_a, branch: PathBranch::Direct })
    } else {
        let amin = hx.abs().min(hy.abs());
        // the slowest direct path grazes zero velocity at the inner endpoint
        let t_direct_max = if hx == hy {
            0.0
        } else {
            let bp = BranchPoint { e_shifted: -amin * amin, ln_a: amin.ln(), branch: PathBranch::Direct };
            path_time(hs, hx, hy, &bp, spec)?
        };
        if t <= t_direct_max {
            // direct branch: bisect E' in [-amin^2, inf), time decreasing in E'
            let time_at = |e_shifted: f64| -> Result<f64> {
                let e_eff = if e_shifted == 0.0 { 1e-300 } else { e_shifted };
                let bp = BranchPoint { e_shifted: e_eff, ln_a: 0.5 * e_eff.abs().ln(), branch: PathBranch::Direct };
                path_time(hs, hx, hy, &bp, spec)
            };
            let mut lo = -amin * amin;
            let mut hi = (amin * amin).max(1.0);
            while time_at(hi)? > t {
                hi = 4.0 * hi + 1.0;
                if !hi.is_finite() {
                    return Err(Error::bracketing("solve_trajectory", format!("no direct energy reaches T = {t}")));
                }
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if time_at(mid)? > t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let e_shifted = 0.5 * (lo + hi);
            let e_eff = if e_shifted == 0.0 { 1e-300 } else { e_shifted };
            Ok(BranchPoint { e_shifted: e_eff, ln_a: 0.5 * e_eff.abs().ln(), branch: PathBranch::Direct })
        } else {
            // turning branch: a in (0, amin], time increasing as a -> 0
            let time_at = |ln_a: f64| -> Result<f64> {
                let bp = BranchPoint { e_shifted: -(2.0 * ln_a).exp(), ln_a, branch: PathBranch::SingleTurning };
                path_time(hs, hx, hy, &bp, spec)
            };
            let mut lo = amin.ln() + LN_A_FLOOR;
            let mut hi = amin.ln();
            let t_floor = time_at(lo)?;
            if t_floor < t {
                return Err(Error::bracketing(
                    "solve_trajectory",
                    format!("T = {t} beyond the resolvable range of the turning branch (max {t_floor})"),
                ));
            }
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if time_at(mid)? > t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let ln_a = 0.5 * (lo + hi);
            Ok(BranchPoint { e_shifted: -(2.0 * ln_a).exp(), ln_a, branch: PathBranch::SingleTurning })
        }
    }
}

/// Sample the solved path on a uniform time mesh by inverting the cumulative
/// time integral on a fine theta grid.
fn sample_positions(hs: &HSpace, hx: f64, hy: f64, bp: &BranchPoint, t_total: f64, n_mesh: usize) -> Vec<f64> {
    let positive_energy = bp.e_shifted > 0.0;
    let sgn = if positive_energy || hx >= 0.0 { 1.0 } else { -1.0 };
    let s_of = |th: f64| -> f64 {
        let ep = (bp.ln_a + th).exp();
        let em = (bp.ln_a - th).exp();
        if positive_energy {
            0.5 * (ep - em)
        } else {
            sgn * 0.5 * (ep + em)
        }
    };
    let (ths, the, turning) = match bp.branch {
        PathBranch::Direct => {
            if positive_energy {
                (theta_sinh(hy, bp.ln_a), theta_sinh(hx, bp.ln_a), None)
            } else {
                (theta_cosh(hy.abs(), bp.ln_a), theta_cosh(hx.abs(), bp.ln_a), None)
            }
        }
        PathBranch::SingleTurning => (theta_cosh(hy.abs(), bp.ln_a), theta_cosh(hx.abs(), bp.ln_a), Some(0.0f64)),
    };
    // u in [0,1] runs along the possibly folded theta path from y to x
    let total_theta = match turning {
        None => (the - ths).abs(),
        Some(t0) => (ths - t0).abs() + (the - t0).abs(),
    };
    let theta_at = |u: f64| -> f64 {
        match turning {
            None => ths + (the - ths) * u,
            Some(t0) => {
                let leg1 = (ths - t0).abs();
                let d = u * total_theta;
                if d <= leg1 {
                    ths - d * (ths - t0).signum()
                } else {
                    t0 + (d - leg1) * (the - t0).signum()
                }
            }
        }
    };
    let n_fine = (8 * n_mesh).clamp(512, 65536);
    let du = 1.0 / n_fine as f64;
    let mut cum = vec![0.0f64; n_fine + 1];
    let rate = |u: f64| (hs.m / 2.0).sqrt() / hs.h_prime(hs.x_of_h(s_of(theta_at(u))));
    let mut prev_rate = rate(0.0);
    for i in 1..=n_fine {
        let r = rate(i as f64 * du);
        cum[i] = cum[i - 1] + 0.5 * (r + prev_rate) * total_theta * du;
        prev_rate = r;
    }
    let total_time = cum[n_fine];
    let mut out = Vec::with_capacity(n_mesh + 1);
    let mut j = 0usize;
    for k in 0..=n_mesh {
        let target = (k as f64 / n_mesh as f64) * total_time;
        while j < n_fine && cum[j + 1] < target {
            j += 1;
        }
        let u = if j >= n_fine {
            1.0
        } else {
            let seg = cum[j + 1] - cum[j];
            let frac = if seg > 0.0 { (target - cum[j]) / seg } else { 0.0 };
            (j as f64 + frac) * du
        };
        out.push(hs.x_of_h(s_of(theta_at(u.clamp(0.0, 1.0)))));
    }
    let _ = t_total;
    out[0] = hs.x_of_h(hy);
    out[n_mesh] = hs.x_of_h(hx);
    out
}

/// Default mesh density (points per unit time) for sampled quadrature paths.
fn default_mesh_density(t: f64) -> usize {
    ((1024.0 / t).ceil() as usize).clamp(64, 4096)
}

/// Solve the boundary-value problem by bisection on the conserved Euclidean
/// energy and evaluate Sigma = int sqrt(2m (E + V)) dx - E T.
pub fn solve_trajectory_quadrature(p: &ActionParams1D, x: f64, y: f64, t: f64) -> Result<EuclideanTrajectory> {
    solve_trajectory_quadrature_meshed(p, x, y, t, 0)
}

/// Quadrature solve with an explicit output mesh density (0 picks a default).
pub fn solve_trajectory_quadrature_meshed(
    p: &ActionParams1D,
    x: f64,
    y: f64,
    t: f64,
    n_t: usize,
) -> Result<EuclideanTrajectory> {
    check_boundary(p, x, y)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("solve_trajectory", format!("T must be > 0 and finite, got {t}")));
    }
    let hs = HSpace::new(p)?;
    let (hx, hy) = (hs.h(x), hs.h(y));
    let n_t = if n_t == 0 { default_mesh_density(t) } else { n_t };
    let n_mesh = ((n_t as f64 * t).round() as usize).max(8);
    let spec = quad_spec();

    // stationary solution at the potential minimum
    if hx == 0.0 && hy == 0.0 {
        let times: Vec<f64> = (0..=n_mesh).map(|k| t * k as f64 / n_mesh as f64).collect();
        return Ok(EuclideanTrajectory {
            positions: vec![x; n_mesh + 1],
            times,
            euclid_energy: -hs.v_min,
            sigma: hs.v_min * t,
            method: SolveMethod::Quadrature,
            mesh_density: n_t,
        });
    }

    let bp = solve_branch_point(&hs, hx, hy, t, &spec)?;
    let kinetic = path_kinetic_action(&hs, hx, hy, &bp, &spec)?;
    let sigma = kinetic - bp.e_shifted * t + hs.v_min * t;
    let times: Vec<f64> = (0..=n_mesh).map(|k| t * k as f64 / n_mesh as f64).collect();
    let positions = sample_positions(&hs, hx, hy, &bp, t, n_mesh);
    Ok(EuclideanTrajectory {
        times,
        positions,
        euclid_energy: bp.e_shifted - hs.v_min,
        sigma,
        method: SolveMethod::Quadrature,
        mesh_density: n_t,
    })
}

fn v_prime(p: &ActionParams1D, x: f64) -> f64 {
    2.0 * p.v2 * x - if p.v_m2 > 0.0 { 2.0 * p.v_m2 / (x * x * x) } else { 0.0 }
}

fn v_double_prime(p: &ActionParams1D, x: f64) -> f64 {
    2.0 * p.v2 + if p.v_m2 > 0.0 { 6.0 * p.v_m2 / (x * x * x * x) } else { 0.0 }
}

fn potential_unchecked(p: &ActionParams1D, x: f64) -> f64 {
    p.v2 * x * x + if p.v_m2 > 0.0 { p.v_m2 / (x * x) } else { 0.0 } + p.v0
}

/// Discrete action of a mesh path: forward-difference kinetic term plus
/// trapezoidal potential term.
pub fn discrete_action(p: &ActionParams1D, positions: &[f64], dt: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..positions.len() - 1 {
        let v = (positions[k + 1] - positions[k]) / dt;
        sum += dt
            * (0.5 * p.m * v * v
                + 0.5 * (potential_unchecked(p, positions[k]) + potential_unchecked(p, positions[k + 1])));
    }
    sum
}

/// Solve the discrete Euclidean equation of motion
/// m (x_{k+1} - 2 x_k + x_{k-1}) / dt^2 = V'(x_k)
/// by damped Newton iteration from a linear initial guess.
pub fn solve_trajectory_relaxation(
    p: &ActionParams1D,
    x: f64,
    y: f64,
    t: f64,
    n_t: usize,
) -> Result<EuclideanTrajectory> {
    solve_trajectory_relaxation_seeded(p, x, y, t, n_t, None)
}

/// Relaxation solve with an optional initial guess (mesh of the same size),
/// used to warm-start Newton from a previously solved nearby path.
pub fn solve_trajectory_relaxation_seeded(
    p: &ActionParams1D,
    x: f64,
    y: f64,
    t: f64,
    n_t: usize,
    seed: Option<&[f64]>,
) -> Result<EuclideanTrajectory> {
    check_boundary(p, x, y)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("solve_trajectory", format!("T must be > 0 and finite, got {t}")));
    }
    let n = (n_t as f64 * t).round() as usize;
    if n < 8 {
        return Err(Error::validation("n_t", format!("N_t * T = {n} mesh intervals; at least 8 required")));
    }
    let dt = t / n as f64;
    let mut xs: Vec<f64> = match seed {
        Some(s) if s.len() == n + 1 => s.to_vec(),
        _ => (0..=n).map(|k| y + (x - y) * k as f64 / n as f64).collect(),
    };
    xs[0] = y;
    xs[n] = x;
    let half_line = p.half_line();
    let idt2 = p.m / (dt * dt);

    let mut resid = vec![0.0f64; n - 1];
    let mut diag = vec![0.0f64; n - 1];
    let mut c_prime = vec![0.0f64; n - 1];
    let mut d_prime = vec![0.0f64; n - 1];
    let mut step = vec![0.0f64; n - 1];
    let mut converged = false;
    for _iter in 0..200 {
        let mut rmax = 0.0f64;
        let mut vp_max = 0.0f64;
        for k in 1..n {
            let vp = v_prime(p, xs[k]);
            let r = idt2 * (xs[k + 1] - 2.0 * xs[k] + xs[k - 1]) - vp;
            resid[k - 1] = r;
            rmax = rmax.max(r.abs());
            vp_max = vp_max.max(vp.abs());
        }
        if rmax <= 1e-9 * (1.0 + vp_max) {
            converged = true;
            break;
        }
        // Newton step on the tridiagonal system (Thomas algorithm)
        for k in 1..n {
            diag[k - 1] = -2.0 * idt2 - v_double_prime(p, xs[k]);
        }
        c_prime[0] = idt2 / diag[0];
        d_prime[0] = -resid[0] / diag[0];
        for k in 1..n - 1 {
            let denom = diag[k] - idt2 * c_prime[k - 1];
            c_prime[k] = idt2 / denom;
            d_prime[k] = (-resid[k] - idt2 * d_prime[k - 1]) / denom;
        }
        step[n - 2] = d_prime[n - 2];
        for k in (0..n - 2).rev() {
            step[k] = d_prime[k] - c_prime[k] * step[k + 1];
        }
        // damping factor 0.5 applied while the step would cross x <= 0
        let mut lambda = 1.0f64;
        if half_line {
            let violates =
                |lam: f64, xs: &[f64], step: &[f64]| (1..n).any(|k| xs[k] + lam * step[k - 1] <= 0.0);
            let mut guard = 0;
            while violates(lambda, &xs, &step) {
                lambda *= 0.5;
                guard += 1;
                if guard > 100 {
                    return Err(Error::positivity(
                        "solve_trajectory_relaxation",
                        format!("Newton step pushes the path through the x = 0 barrier at T = {t}, N_t = {n_t}"),
                    ));
                }
            }
        }
        for k in 1..n {
            xs[k] += lambda * step[k - 1];
        }
    }
    if !converged {
        return Err(Error::no_convergence(
            "solve_trajectory_relaxation",
            format!("EOM residual above tolerance after 200 Newton iterations (T = {t}, N_t = {n_t})"),
        ));
    }
    let sigma = discrete_action(p, &xs, dt);
    // conserved energy from a central difference at the mid node
    let mid = n / 2;
    let vmid = (xs[mid + 1] - xs[mid - 1]) / (2.0 * dt);
    let e = 0.5 * p.m * vmid * vmid - potential_unchecked(p, xs[mid]);
    let times: Vec<f64> = (0..=n).map(|k| dt * k as f64).collect();
    Ok(EuclideanTrajectory {
        times,
        positions: xs,
        euclid_energy: e,
        sigma,
        method: SolveMethod::Relaxation,
        mesh_density: n_t,
    })
}

/// A boundary-value solver strategy: both methods present the same contract
/// and are selected by name at runtime (config key `fit.solver`).
pub trait TrajectorySolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, p: &ActionParams1D, x: f64, y: f64, t: f64) -> Result<EuclideanTrajectory>;
    /// Action value only; solvers may skip mesh sampling here.
    fn action(&self, p: &ActionParams1D, x: f64, y: f64, t: f64) -> Result<f64> {
        Ok(self.solve(p, x, y, t)?.sigma)
    }
}

/// Energy-conservation quadrature solver.
#[derive(Debug, Clone, Default)]
pub struct QuadratureSolver;

impl TrajectorySolver for QuadratureSolver {
    fn name(&self) -> &'static str {
        "quadrature"
    }
    fn solve(&self, p: &ActionParams1D, x: f64, y: f64, t: f64) -> Result<EuclideanTrajectory> {
        solve_trajectory_quadrature(p, x, y, t)
    }
    fn action(&self, p: &ActionParams1D, x: f64, y: f64, t: f64) -> Result<f64> {
        // mesh sampling skipped: branch point and action integral only
        check_boundary(p, x, y)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("solve_trajectory", format!("T must be > 0 and finite, got {t}")));
        }
        let hs = HSpace::new(p)?;
        let (hx, hy) = (hs.h(x), hs.h(y));
        if hx == 0.0 && hy == 0.0 {
            return Ok(hs.v_min * t);
        }
        let spec = quad_spec();
        let bp = solve_branch_point(&hs, hx, hy, t, &spec)?;
        let kinetic = path_kinetic_action(&hs, hx, hy, &bp, &spec)?;
        Ok(kinetic - bp.e_shifted * t + hs.v_min * t)
    }
}

/// Mesh relaxation solver with a fixed meshpoint density per unit time.
///
/// Repeated solves of the same boundary pair (the fitter evaluates each pair
/// once per optimizer step at slightly different parameters) reuse the
/// previous converged mesh as the Newton seed; the converged result does not
/// depend on the seed, only the iteration count does.
#[derive(Debug, Default)]
pub struct RelaxationSolver {
    pub n_t: usize,
    seeds: Mutex<HashMap<(u64, u64), Vec<f64>>>,
}

impl RelaxationSolver {
    pub fn new(n_t: usize) -> Self {
        RelaxationSolver { n_t, seeds: Mutex::new(HashMap::new()) }
    }
}

impl Clone for RelaxationSolver {
    fn clone(&self) -> Self {
        RelaxationSolver::new(self.n_t)
    }
}

impl TrajectorySolver for RelaxationSolver {
    fn name(&self) -> &'static str {
        "relaxation"
    }
    fn solve(&self, p: &ActionParams1D, x: f64, y: f64, t: f64) -> Result<EuclideanTrajectory> {
        let key = (x.to_bits(), y.to_bits());
        let seed = self.seeds.lock().unwrap().get(&key).cloned();
        let tr = solve_trajectory_relaxation_seeded(p, x, y, t, self.n_t, seed.as_deref())?;
        self.seeds.lock().unwrap().insert(key, tr.positions.clone());
        Ok(tr)
    }
}

/// All registered solver strategies keyed by name.
pub fn solver_registry(n_t: usize) -> BTreeMap<&'static str, Box<dyn TrajectorySolver>> {
    let mut map: BTreeMap<&'static str, Box<dyn TrajectorySolver>> = BTreeMap::new();
    map.insert("quadrature", Box::new(QuadratureSolver));
    map.insert("relaxation", Box::new(RelaxationSolver::new(n_t)));
    map
}

/// Look up a solver strategy by name. `n_t` parametrizes the relaxation mesh.
pub fn solver_by_name(name: &str, n_t: usize) -> Result<Box<dyn TrajectorySolver>> {
    let mut reg = solver_registry(n_t);
    match reg.remove(name) {
        Some(s) => Ok(s),
        None => {
            let known: Vec<&str> = solver_registry(n_t).keys().copied().collect();
            Err(Error::validation("solver", format!("unknown solver `{name}`; known: {known:?}")))
        }
    }
}
