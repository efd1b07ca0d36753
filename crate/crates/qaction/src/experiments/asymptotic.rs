//! Checks of the large-T analytic relations: coefficient-matching values,
//! transformation-law residuals, and the consistency triangle between the
//! fitter, the reconstruction and the exact spectrum.

use std::collections::BTreeMap;

use super::fig2::fit_options_from;
use super::{fmt_f64, tolerances, write_csv, CheckOutcome, Experiment, ExperimentContext, ExperimentOutput};
use crate::asymptotics::{self, ReconstructedWavefunction};
use crate::error::Result;
use crate::fitter::fit_quantum_action;
use crate::model::{linspace, BoundarySet};
use crate::propagator;

pub struct AsymptoticCheck;

impl Experiment for AsymptoticCheck {
    fn name(&self) -> &'static str {
        "asymptotic-check"
    }

    fn description(&self) -> &'static str {
        "coefficient-matched parameters, transformation-law residuals and the fit/reconstruction consistency triangle"
    }

    fn run(&self, ctx: &ExperimentContext) -> Result<ExperimentOutput> {
        let pc = ctx.config.phys_const()?;
        let classical = ctx.config.action_1d("classical")?;
        let t_fit = ctx.config.get_f64("asymptotic.fit_t", 4.5)?;

        let pred = asymptotics::asymptotic_parameters(&classical, &pc)?;
        let quantum = asymptotics::quantum_action_params(&classical, &pc)?;
        let sd = propagator::ground_state(&classical, &pc)?;

        let pred_rows = vec![vec![
            fmt_f64(pred.m_v2),
            fmt_f64(pred.m_vm2),
            fmt_f64(pred.e_gr),
            fmt_f64(pred.x_min_quantum),
            fmt_f64(pred.v_min_quantum),
            fmt_f64(sd.t_sc),
            fmt_f64(sd.lambda_sc),
        ]];
        let pred_csv = write_csv(
            &ctx.out_dir,
            "asymptotic_parameters.csv",
            &["m_v2", "m_vm2", "e_gr", "x_min_quantum", "v_min_quantum", "t_sc", "lambda_sc"],
            &pred_rows,
        )?;

        // transformation-law residual over a grid outside the singular tube
        let eps = tolerances::LAW_EPS_TUBE;
        let grid: Vec<f64> = linspace(0.3, 3.0, 50)
            .into_iter()
            .filter(|x| (x - quantum.x_min()).abs() > eps)
            .collect();
        let resid = asymptotics::transformation_law_residual(&classical, &quantum, &pc, pred.e_gr, &grid, eps)?;
        let law_rows: Vec<Vec<String>> = grid
            .iter()
            .zip(&resid)
            .map(|(x, r)| vec![fmt_f64(*x), fmt_f64(*r)])
            .collect();
        let law_csv = write_csv(&ctx.out_dir, "transformation_law_residual.csv", &["x", "residual"], &law_rows)?;
        let worst_law = resid.iter().map(|r| r.abs()).fold(0.0f64, f64::max);

        // consistency triangle: large-T fitted products against the matching
        let opts = fit_options_from(ctx)?;
        let fit = fit_quantum_action(&classical, &pc, &BoundarySet::fig2(t_fit), &opts)?;
        let (v2_lo, v2_hi) = tolerances::PRODUCT_M_V2_WINDOW;
        let (vm2_lo, vm2_hi) = tolerances::PRODUCT_M_VM2_WINDOW;

        // reconstruction against the exact ground state on [0.2, Lambda_sc]
        let rec = ReconstructedWavefunction::new(&quantum, &pc)?;
        let rec_grid = linspace(0.2, sd.lambda_sc, 60);
        let psi_max = rec_grid
            .iter()
            .map(|&x| propagator::wavefunction(&sd, &classical, &pc, x).unwrap())
            .fold(0.0f64, f64::max);
        let sup = rec_grid
            .iter()
            .map(|&x| {
                let exact = propagator::wavefunction(&sd, &classical, &pc, x).unwrap();
                (rec.eval(x).unwrap() - exact).abs() / psi_max
            })
            .fold(0.0f64, f64::max);

        let checks = vec![
            CheckOutcome {
                name: "law-residual-matched".into(),
                passed: worst_law < tolerances::TRANSFORMATION_LAW_RESIDUAL,
                detail: format!("worst residual {worst_law:.3e} with matched parameters"),
            },
            CheckOutcome {
                name: "offset-identity".into(),
                passed: (quantum.v_min() - pred.e_gr).abs() < 1e-12,
                detail: format!("v~0 + 2 sqrt(v~2 v~-2) = {} vs E_gr = {}", quantum.v_min(), pred.e_gr),
            },
            CheckOutcome {
                name: "fit-products-approach-matching".into(),
                passed: fit.m_v2 >= v2_lo && fit.m_v2 <= v2_hi && fit.m_vm2 >= vm2_lo && fit.m_vm2 <= vm2_hi,
                detail: format!("fit at T = {t_fit}: ({:.6}, {:.6}) vs analytic ({}, {})", fit.m_v2, fit.m_vm2, pred.m_v2, pred.m_vm2),
            },
            CheckOutcome {
                name: "reconstruction-consistency".into(),
                passed: sup < tolerances::RECONSTRUCTION_SUP_NORM,
                detail: format!("reconstruction sup-norm {sup:.3e} on [0.2, {:.3}]", sd.lambda_sc),
            },
        ];

        let mut inputs = BTreeMap::new();
        inputs.insert("classical".into(), format!("{classical:?}"));
        inputs.insert("fit_t".into(), fmt_f64(t_fit));
        Ok(ExperimentOutput { inputs, checks, files: vec![pred_csv, law_csv] })
    }
}
