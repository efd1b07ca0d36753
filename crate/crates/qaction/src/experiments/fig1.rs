//! Classical potential, quantum potential and ground-state wave function on
//! a common grid: the three curves of the potential/wave-function figure.

use std::collections::BTreeMap;

use super::{fmt_f64, tolerances, write_csv, write_gnuplot_stub, CheckOutcome, Experiment, ExperimentContext, ExperimentOutput};
use crate::asymptotics::{self, ReconstructedWavefunction};
use crate::error::Result;
use crate::model::{linspace, potential_1d};
use crate::propagator;

pub struct Fig1PotentialWave;

impl Experiment for Fig1PotentialWave {
    fn name(&self) -> &'static str {
        "fig1-potential-wave"
    }

    fn description(&self) -> &'static str {
        "classical potential, asymptotic quantum potential and ground-state wave function (exact and reconstructed) on a grid"
    }

    fn run(&self, ctx: &ExperimentContext) -> Result<ExperimentOutput> {
        let pc = ctx.config.phys_const()?;
        let classical = ctx.config.action_1d("classical")?;
        let x_lo = ctx.config.get_f64("fig1.x_min", 0.05)?;
        let x_hi = ctx.config.get_f64("fig1.x_max", 4.0)?;
        let n = ctx.config.get_usize("fig1.n_points", 400)?;

        let quantum = asymptotics::quantum_action_params(&classical, &pc)?;
        let sd = propagator::ground_state(&classical, &pc)?;
        let rec = ReconstructedWavefunction::new(&quantum, &pc)?;

        let grid = linspace(x_lo, x_hi, n);
        let mut rows = Vec::with_capacity(n);
        for &x in &grid {
            rows.push(vec![
                fmt_f64(x),
                fmt_f64(potential_1d(&classical, x)?),
                fmt_f64(potential_1d(&quantum, x)?),
                fmt_f64(propagator::wavefunction(&sd, &classical, &pc, x)?),
                fmt_f64(rec.eval(x)?),
            ]);
        }
        let csv = write_csv(
            &ctx.out_dir,
            "potential_wave.csv",
            &["x", "v_classical", "v_quantum", "psi_exact", "psi_reconstructed"],
            &rows,
        )?;
        let stub = write_gnuplot_stub(
            &ctx.out_dir,
            "potential_wave.gp",
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             plot 'potential_wave.csv' u 1:2 w l, '' u 1:3 w l dt 2, '' u 1:4 w l dt 3, '' u 1:5 w p pt 7 ps 0.3\n",
        )?;

        // built-in checks: reconstruction quality and peak location
        let check_grid = linspace(0.5, 2.35, 80);
        let psi_max = check_grid
            .iter()
            .map(|&x| propagator::wavefunction(&sd, &classical, &pc, x).unwrap())
            .fold(0.0f64, f64::max);
        let sup = check_grid
            .iter()
            .map(|&x| {
                let exact = propagator::wavefunction(&sd, &classical, &pc, x).unwrap();
                (rec.eval(x).unwrap() - exact).abs() / psi_max
            })
            .fold(0.0f64, f64::max);
        let peak = quantum.x_min();
        let peak_err = (peak - 2f64.sqrt()).abs();

        let checks = vec![
            CheckOutcome {
                name: "reconstruction-sup-norm".into(),
                passed: sup <= tolerances::RECONSTRUCTION_SUP_NORM,
                detail: format!("sup-norm {sup:.3e} on [0.5, 2.35], bound {}", tolerances::RECONSTRUCTION_SUP_NORM),
            },
            CheckOutcome {
                name: "peak-location".into(),
                passed: peak_err <= tolerances::PEAK_LOCATION_TOL,
                detail: format!("|peak - sqrt(2)| = {peak_err:.3e}, bound {}", tolerances::PEAK_LOCATION_TOL),
            },
        ];

        let mut inputs = BTreeMap::new();
        inputs.insert("classical".into(), format!("{classical:?}"));
        inputs.insert("quantum(asymptotic)".into(), format!("{quantum:?}"));
        inputs.insert("grid".into(), format!("[{x_lo}, {x_hi}] x {n}"));
        Ok(ExperimentOutput { inputs, checks, files: vec![csv, stub] })
    }
}
