//! Global least-squares determination of the quantum-action parameters from
//! exact transition amplitudes, plus the boundary-point and temporal
//! resolution studies built on top of it.
//!
//! The fit minimizes, over (m~, v~2, v~-2) and a per-T normalization ln Z~,
//!
//!     sum_pairs [ ln G_exact(x_f, T; x_i) - (ln Z~ - Sigma~(x_f, x_i, T)/hbar) ]^2
//!
//! in log-amplitude space. v~0 is gauged to 0: at fixed T only the
//! combination ln Z~ - v~0 T / hbar enters, so the offset and the
//! normalization are exactly degenerate. ln Z~ is profiled out analytically
//! (its optimum is the mean residual), leaving a 2- or 3-parameter search in
//! log-parameter space: positivity for free and even scaling across decades.
//! The mass is fitted, not pinned; fixing m~ = m measurably worsens the fit
//! at small T. For a harmonic classical action (v_m2 = 0) the quantum
//! potential family is restricted to v~-2 = 0 and the exact amplitudes are
//! the full-line harmonic kernel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionParams1D, BoundarySet, PhysConst};
use crate::optim::{self, NelderMeadOptions};
use crate::propagator;
use crate::trajectory::{solver_by_name, RelaxationSolver, TrajectorySolver};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

/// Result of one quantum-action fit at a fixed transition time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted quantum parameters (v0 = 0 gauge).
    pub params: ActionParams1D,
    /// Fitted normalization ln Z~ at this T.
    pub log_z: f64,
    /// Product m~ v~2 (the asymptotically constrained combination).
    pub m_v2: f64,
    /// Product m~ v~-2.
    pub m_vm2: f64,
    /// max over samples of |G_fit - G_exact| / G_exact.
    pub residual_max_rel: f64,
    /// rms of the per-sample relative amplitude errors.
    pub residual_rms: f64,
    pub n_samples: usize,
    pub t: f64,
    pub converged: bool,
    /// Sum of squared log-amplitude residuals at the optimum.
    pub objective: f64,
    /// Finite-difference gradient norm of the objective at the optimum.
    pub grad_norm: f64,
    /// Set when the sample geometry cannot separate the parameters.
    pub rank_deficient: bool,
    /// Spread of the multi-start optima (best-to-worst objective gap).
    pub start_spread: f64,
}

/// Options for [`fit_quantum_action`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOptions {
    /// Trajectory solver strategy: "quadrature" (default) or "relaxation".
    pub solver: String,
    /// Mesh density for the relaxation solver.
    pub n_t: usize,
    /// Number of jittered starts (the first start is unjittered).
    pub multi_starts: usize,
    pub seed: u64,
    pub nm_max_iter: usize,
    /// Start the search here and skip warm-up and multi-start jitter.
    pub warm_start: Option<ActionParams1D>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            solver: "quadrature".into(),
            n_t: 200,
            multi_starts: 5,
            seed: 20,
            nm_max_iter: 500,
            warm_start: None,
        }
    }
}

/// ln of the parametrized amplitude: ln Z~ - Sigma~(q; x, y, T) / hbar.
pub fn predict_log_green(
    q: &ActionParams1D,
    pc: &PhysConst,
    log_z: f64,
    x: f64,
    y: f64,
    t: f64,
    solver: &dyn TrajectorySolver,
) -> Result<f64> {
    Ok(log_z - solver.action(q, x, y, t)? / pc.hbar)
}

/// Exact log-amplitudes for a boundary set under the classical action:
/// the inverse-square kernel on the half line, or the full-line harmonic
/// kernel when v_m2 = 0.
pub fn exact_log_amplitudes(classical: &ActionParams1D, pc: &PhysConst, bset: &BoundarySet) -> Result<Vec<f64>> {
    bset.pairs()
        .iter()
        .map(|&(xf, xi)| {
            if classical.half_line() {
                propagator::log_euclidean_green(classical, pc, xf, xi, bset.transition_time)
            } else {
                propagator::log_harmonic_green(classical, pc, xf, xi, bset.transition_time)
            }
        })
        .collect()
}

struct Objective<'a> {
    pairs: &'a [(f64, f64)],
    log_g: &'a [f64],
    t: f64,
    hbar: f64,
    fit_vm2: bool,
    solver: &'a dyn TrajectorySolver,
}

impl Objective<'_> {
    fn params_of(&self, theta: &[f64]) -> Option<ActionParams1D> {
        if theta.iter().any(|v| v.abs() > 8.0) {
            return None;
        }
        Some(ActionParams1D {
            m: theta[0].exp(),
            v2: theta[1].exp(),
            v_m2: if self.fit_vm2 { theta[2].exp() } else { 0.0 },
            v0: 0.0,
        })
    }

    /// Per-sample log-amplitude residuals and the profiled ln Z~.
    fn residuals(&self, theta: &[f64]) -> Option<(Vec<f64>, f64)> {
        let q = self.params_of(theta)?;
        let sigmas: Vec<Option<f64>> = self
            .pairs
            .par_iter()
            .map(|&(xf, xi)| self.solver.action(&q, xf, xi, self.t).ok())
            .collect();
        let mut shifted = Vec::with_capacity(self.pairs.len());
        for (lg, s) in self.log_g.iter().zip(&sigmas) {
            shifted.push(lg + (*s)? / self.hbar);
        }
        let log_z = shifted.iter().sum::<f64>() / shifted.len() as f64;
        let resid: Vec<f64> = shifted.iter().map(|v| v - log_z).collect();
        Some((resid, log_z))
    }

    fn value(&self, theta: &[f64]) -> f64 {
        match self.residuals(theta) {
            Some((r, _)) => r.iter().map(|v| v * v).sum(),
            None => f64::INFINITY,
        }
    }
}

/// Smallest-to-largest eigenvalue ratio of the Gram matrix J^T J of the
/// residual Jacobian; near-zero flags geometries that cannot separate the
/// parameters.
fn gram_condition(obj: &Objective, theta: &[f64]) -> f64 {
    let n = theta.len();
    let h = 1e-5;
    let base = match obj.residuals(theta) {
        Some((r, _)) => r,
        None => return 0.0,
    };
    let mut jac: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut tp = theta.to_vec();
        tp[i] += h;
        match obj.residuals(&tp) {
            Some((rp, _)) => jac.push(rp.iter().zip(&base).map(|(a, b)| (a - b) / h).collect()),
            None => return 0.0,
        }
    }
    let mut a = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = jac[i].iter().zip(&jac[j]).map(|(p, q)| p * q).sum();
        }
    }
    // eigenvalue extremes by cyclic Jacobi (n <= 3)
    for _ in 0..40 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q].abs();
                if a[p][q].abs() > 1e-300 {
                    let phi = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                    let (c, s) = (phi.cos(), phi.sin());
                    #[allow(clippy::needless_range_loop)]
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in a.iter_mut() {
                        let (akp, akq) = (row[p], row[q]);
                        row[p] = c * akp - s * akq;
                        row[q] = s * akp + c * akq;
                    }
                }
            }
        }
        if off < 1e-280 {
            break;
        }
    }
    let eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
    let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
    if max <= 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Fit the quantum-action parameters to the exact amplitudes over a boundary
/// set at its transition time.
pub fn fit_quantum_action(
    classical: &ActionParams1D,
    pc: &PhysConst,
    bset: &BoundarySet,
    opts: &FitOptions,
) -> Result<FitResult> {
    let log_g = exact_log_amplitudes(classical, pc, bset)?;
    fit_to_samples(classical, pc, bset, &log_g, opts)
}

/// Fit to caller-supplied log-amplitudes (round-trip tests feed amplitudes
/// generated by `predict_log_green` itself through this entry).
pub fn fit_to_samples(
    classical: &ActionParams1D,
    pc: &PhysConst,
    bset: &BoundarySet,
    log_g: &[f64],
    opts: &FitOptions,
) -> Result<FitResult> {
    bset.validate()?;
    let pairs = bset.pairs();
    if log_g.len() != pairs.len() {
        return Err(Error::validation("log_g", format!("{} samples for {} pairs", log_g.len(), pairs.len())));
    }
    let mut distinct = pairs.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::validation(
            "boundary set",
            format!("{} distinct samples; at least 4 needed for 3 potential parameters + ln Z", distinct.len()),
        ));
    }
    let fit_vm2 = classical.half_line();
    let solver = solver_by_name(&opts.solver, opts.n_t)?;
    let t = bset.transition_time;
    let obj = Objective { pairs: &pairs, log_g, t, hbar: pc.hbar, fit_vm2, solver: solver.as_ref() };

    let base_start = opts.warm_start.as_ref().unwrap_or(classical);
    let mut theta0 = vec![base_start.m.ln(), base_start.v2.ln()];
    if fit_vm2 {
        theta0.push(if base_start.v_m2 > 0.0 { base_start.v_m2 } else { classical.v_m2 }.ln());
    }

    let nm_opts = NelderMeadOptions {
        max_iter: opts.nm_max_iter,
        initial_step: if opts.warm_start.is_some() { 0.02 } else { 0.1 },
        ..Default::default()
    };
    let mut best: Option<optim::OptimResult> = None;
    let mut worst_fx = f64::NEG_INFINITY;
    let n_starts = if opts.warm_start.is_some() { 1 } else { opts.multi_starts.max(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for k in 0..n_starts {
        let start: Vec<f64> = if k == 0 {
            theta0.clone()
        } else {
            theta0.iter().map(|v| v + rng.gen_range(-0.15..0.15)).collect()
        };
        let warm = if opts.warm_start.is_some() {
            optim::OptimResult { x: start.clone(), fx: obj.value(&start), n_eval: 1, converged: true }
        } else {
            optim::coordinate_descent(|th| obj.value(th), &start, 2, 0.3)
        };
        let run = optim::nelder_mead(|th| obj.value(th), &warm.x, &nm_opts);
        let run = if run.fx <= warm.fx { run } else { warm };
        worst_fx = worst_fx.max(run.fx);
        best = match best {
            Some(b) if b.fx <= run.fx => Some(b),
            _ => Some(run),
        };
    }
    let best = best.unwrap();
    let polished = optim::polish_parabolic(|th| obj.value(th), &best.x, best.fx);
    let theta = polished.x;
    let objective = polished.fx;

    let (resid, log_z) = obj
        .residuals(&theta)
        .ok_or_else(|| Error::no_convergence("fit_quantum_action", "optimum not evaluable"))?;
    let q = obj.params_of(&theta).unwrap();
    let rel: Vec<f64> = resid.iter().map(|r| (r.exp() - 1.0).abs()).collect();
    let residual_max_rel = rel.iter().cloned().fold(0.0, f64::max);
    let residual_rms = (rel.iter().map(|v| v * v).sum::<f64>() / rel.len() as f64).sqrt();
    let grad = optim::fd_gradient(|th| obj.value(th), &theta, 1e-5);
    let grad_norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rank_deficient = gram_condition(&obj, &theta) < 1e-10;
    Ok(FitResult {
        params: q,
        log_z,
        m_v2: q.m * q.v2,
        m_vm2: q.m * q.v_m2,
        residual_max_rel,
        residual_rms,
        n_samples: pairs.len(),
        t,
        converged: objective.is_finite(),
        objective,
        grad_norm,
        rank_deficient,
        start_spread: if worst_fx.is_finite() { worst_fx - objective } else { f64::INFINITY },
    })
}

/// Boundary-point dependence scenarios of the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryScenario {
    FixedInitialVaryFinal,
    FixedFinalVaryInitial,
    Balanced,
}

impl BoundaryScenario {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryScenario::FixedInitialVaryFinal => "fixed-initial-vary-final",
            BoundaryScenario::FixedFinalVaryInitial => "fixed-final-vary-initial",
            BoundaryScenario::Balanced => "balanced",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fixed-initial-vary-final" => Ok(BoundaryScenario::FixedInitialVaryFinal),
            "fixed-final-vary-initial" => Ok(BoundaryScenario::FixedFinalVaryInitial),
            "balanced" => Ok(BoundaryScenario::Balanced),
            _ => Err(Error::validation("scenario", format!("unknown scenario `{name}`"))),
        }
    }

    /// The scenario's boundary sets with human-readable labels.
    pub fn boundary_sets(&self, t: f64) -> Vec<(String, BoundarySet)> {
        use crate::model::linspace;
        match self {
            BoundaryScenario::FixedInitialVaryFinal => [(2.0, 3.0), (5.0, 6.0), (9.0, 10.0), (2.0, 10.0)]
                .iter()
                .map(|&(a, b)| {
                    (
                        format!("x_f in [{a},{b}]"),
                        BoundarySet {
                            initial_points: vec![0.3],
                            final_points: linspace(a, b, 100),
                            transition_time: t,
                        },
                    )
                })
                .collect(),
            BoundaryScenario::FixedFinalVaryInitial => [0.1, 0.2, 0.3, 0.4, 0.5]
                .iter()
                .map(|&xi| {
                    (
                        format!("x_i = {xi}"),
                        BoundarySet {
                            initial_points: vec![xi],
                            final_points: linspace(2.0, 3.0, 100),
                            transition_time: t,
                        },
                    )
                })
                .collect(),
            BoundaryScenario::Balanced => vec![("balanced 10x10".to_string(), BoundarySet::balanced(t))],
        }
    }
}

/// One row of the boundary-dependence table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryStudyRow {
    pub scenario: String,
    pub interval: String,
    pub t: f64,
    /// T below the 5 T_sc threshold, where interval dependence is expected.
    pub below_asymptotic_regime: bool,
    pub fit: FitResult,
}

/// Fit the quantum action per (scenario interval, T) and tabulate.
pub fn boundary_dependence_study(
    classical: &ActionParams1D,
    pc: &PhysConst,
    scenario: BoundaryScenario,
    t_grid: &[f64],
    opts: &FitOptions,
) -> Result<Vec<BoundaryStudyRow>> {
    let t_sc = propagator::ground_state(classical, pc)?.t_sc;
    let mut rows = Vec::new();
    for &t in t_grid {
        for (label, bset) in scenario.boundary_sets(t) {
            let fit = fit_quantum_action(classical, pc, &bset, opts)?;
            rows.push(BoundaryStudyRow {
                scenario: scenario.name().to_string(),
                interval: label,
                t,
                below_asymptotic_regime: t < 5.0 * t_sc,
                fit,
            });
        }
    }
    Ok(rows)
}

/// One cell of the resolution study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionCell {
    pub t: f64,
    pub n_t: usize,
    pub m_v2: f64,
    pub m_vm2: f64,
    pub residual_max_rel: f64,
    pub converged: bool,
    /// Boundary pairs the relaxation solver failed on at the fit optimum.
    pub n_solver_failures: usize,
}

/// Resolution study output: the (T, N_t) table and, per T, the smallest N_t
/// whose fitted products change by less than `stability_tol` upon doubling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub cells: Vec<ResolutionCell>,
    pub min_stable_n_t: Vec<(f64, Option<usize>)>,
    pub stability_tol: f64,
}

/// Run the relaxation-solver fit across an (N_t, T) grid.
///
/// Each cell is warm-started from the quadrature fit at its T, so the study
/// measures the mesh discretization alone, not optimizer wander.
pub fn resolution_study(
    classical: &ActionParams1D,
    pc: &PhysConst,
    bset: &BoundarySet,
    n_t_grid: &[usize],
    t_grid: &[f64],
    opts: &FitOptions,
) -> Result<ResolutionReport> {
    const STABILITY_TOL: f64 = 1e-3;
    let mut cells = Vec::new();
    let mut min_stable = Vec::new();
    for &t in t_grid {
        let mut set = bset.clone();
        set.transition_time = t;
        // reference optimum from the quadrature solver, full search
        let quad_fit =
            fit_quantum_action(classical, pc, &set, &FitOptions { solver: "quadrature".into(), ..opts.clone() })?;
        let mut per_t: Vec<ResolutionCell> = Vec::new();
        for &n_t in n_t_grid {
            let cell_opts = FitOptions {
                solver: "relaxation".into(),
                n_t,
                warm_start: Some(quad_fit.params),
                nm_max_iter: opts.nm_max_iter.min(150),
                ..opts.clone()
            };
            match fit_quantum_action(classical, pc, &set, &cell_opts) {
                Ok(fit) => {
                    let solver = RelaxationSolver::new(n_t);
                    let n_solver_failures = set
                        .pairs()
                        .par_iter()
                        .filter(|&&(xf, xi)| solver.action(&fit.params, xf, xi, t).is_err())
                        .count();
                    per_t.push(ResolutionCell {
                        t,
                        n_t,
                        m_v2: fit.m_v2,
                        m_vm2: fit.m_vm2,
                        residual_max_rel: fit.residual_max_rel,
                        converged: fit.converged,
                        n_solver_failures,
                    });
                }
                Err(_) => per_t.push(ResolutionCell {
                    t,
                    n_t,
                    m_v2: f64::NAN,
                    m_vm2: f64::NAN,
                    residual_max_rel: f64::NAN,
                    converged: false,
                    n_solver_failures: set.n_pairs(),
                }),
            }
        }
        // smallest N_t with both products stable under doubling
        let mut stable: Option<usize> = None;
        for c in &per_t {
            if let Some(c2) = per_t.iter().find(|d| d.n_t == 2 * c.n_t) {
                if c.converged
                    && c2.converged
                    && (c.m_v2 - c2.m_v2).abs() < STABILITY_TOL
                    && (c.m_vm2 - c2.m_vm2).abs() < STABILITY_TOL
                {
                    stable = Some(c.n_t);
                    break;
                }
            }
        }
        min_stable.push((t, stable));
        cells.extend(per_t);
    }
    Ok(ResolutionReport { cells, min_stable_n_t: min_stable, stability_tol: STABILITY_TOL })
}
