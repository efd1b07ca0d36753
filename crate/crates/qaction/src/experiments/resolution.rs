//! Convergence of the fitted parameters with the relaxation solver's
//! meshpoint density, across transition times.

use std::collections::BTreeMap;

use super::fig2::fit_options_from;
use super::{fmt_f64, tolerances, write_csv, CheckOutcome, Experiment, ExperimentContext, ExperimentOutput};
use crate::error::Result;
use crate::fitter::resolution_study;
use crate::model::BoundarySet;

pub struct ResolutionStudy;

impl Experiment for ResolutionStudy {
    fn name(&self) -> &'static str {
        "resolution-study"
    }

    fn description(&self) -> &'static str {
        "fitted products per (T, N_t) under the relaxation solver, with the minimal stable N_t per T"
    }

    fn run(&self, ctx: &ExperimentContext) -> Result<ExperimentOutput> {
        let pc = ctx.config.phys_const()?;
        let classical = ctx.config.action_1d("classical")?;
        let t_grid = ctx.config.get_f64_list("resolution.t_grid", &[2.0, 8.0, 14.0])?;
        let n_t_grid = ctx
            .config
            .get_usize_list("resolution.n_t_grid", &[200, 400, 800, 1600, 3200, 6400])?;
        let opts = fit_options_from(ctx)?;
        let bset = BoundarySet::fig2(1.0); // transition time overridden per cell

        let report = resolution_study(&classical, &pc, &bset, &n_t_grid, &t_grid, &opts)?;

        let rows: Vec<Vec<String>> = report
            .cells
            .iter()
            .map(|c| {
                vec![
                    fmt_f64(c.t),
                    c.n_t.to_string(),
                    fmt_f64(c.m_v2),
                    fmt_f64(c.m_vm2),
                    fmt_f64(c.residual_max_rel),
                    c.converged.to_string(),
                    c.n_solver_failures.to_string(),
                ]
            })
            .collect();
        let cells_csv = write_csv(
            &ctx.out_dir,
            "resolution_cells.csv",
            &["T", "N_t", "m_v2", "m_vm2", "residual_max_rel", "converged", "n_solver_failures"],
            &rows,
        )?;
        let stable_rows: Vec<Vec<String>> = report
            .min_stable_n_t
            .iter()
            .map(|(t, n)| vec![fmt_f64(*t), n.map(|v| v.to_string()).unwrap_or_else(|| "none".into())])
            .collect();
        let stable_csv = write_csv(&ctx.out_dir, "resolution_stability.csv", &["T", "min_stable_n_t"], &stable_rows)?;

        // stability scaling claims: minimal stable N_t nondecreasing in T,
        // and >= 10x growth from the smallest to the largest scanned T
        let stables: Vec<(f64, Option<usize>)> = report.min_stable_n_t.clone();
        let nondecreasing = stables.windows(2).all(|w| match (w[0].1, w[1].1) {
            (Some(a), Some(b)) => b >= a,
            (None, _) => false,
            (_, None) => true, // never-stable at larger T counts as "requires more"
        });
        let factor = match (stables.first().and_then(|v| v.1), stables.last().and_then(|v| v.1)) {
            (Some(a), Some(b)) => b as f64 / a as f64,
            (Some(_), None) => f64::INFINITY,
            _ => f64::NAN,
        };
        let checks = vec![
            CheckOutcome {
                name: "stable-nt-nondecreasing".into(),
                passed: nondecreasing,
                detail: format!("min stable N_t per T: {stables:?}"),
            },
            CheckOutcome {
                name: "stable-nt-growth-factor".into(),
                passed: factor >= tolerances::RESOLUTION_NT_FACTOR,
                detail: format!(
                    "N_t growth factor {factor:.2} from T = {} to T = {}, required >= {}",
                    stables.first().map(|v| v.0).unwrap_or(f64::NAN),
                    stables.last().map(|v| v.0).unwrap_or(f64::NAN),
                    tolerances::RESOLUTION_NT_FACTOR
                ),
            },
        ];

        let mut inputs = BTreeMap::new();
        inputs.insert("classical".into(), format!("{classical:?}"));
        inputs.insert("t_grid".into(), format!("{t_grid:?}"));
        inputs.insert("n_t_grid".into(), format!("{n_t_grid:?}"));
        inputs.insert("stability_tol".into(), fmt_f64(report.stability_tol));
        Ok(ExperimentOutput { inputs, checks, files: vec![cells_csv, stable_csv] })
    }
}
