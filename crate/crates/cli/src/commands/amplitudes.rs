use std::path::Path;

use qimetric::format::fmt_f64;
use qimetric::perturbation::{a11, first_order_amplitude};
use qimetric::propagator::{default_step, propagate_sampled, TimeSpan, GROUND};
use qimetric::Level;

use super::{prepare_dir, Output};
use crate::config::{Format, RunConfig};
use crate::error::CliResult;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudesArgs {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl AmplitudesArgs {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let g = &cfg.numerics.amplitudes;
        Self {
            t0: g.t0,
            t1: g.t1,
            steps: g.steps,
        }
    }
}

pub const HEADER: [&str; 11] = [
    "t",
    "a11_re",
    "a11_im",
    "a21_re",
    "a21_im",
    "a11_printed_re",
    "a11_printed_im",
    "exact_a1_re",
    "exact_a1_im",
    "exact_a2_re",
    "exact_a2_im",
];

#[derive(Debug, Clone)]
pub struct Amplitudes {
    pub table: Table,
    pub step: f64,
    pub est_error: f64,
    pub norm_drift: f64,
}

/// Closed-form first-order amplitudes next to the propagated ones, starting
/// from the ground state at `t0`.
pub fn compute(cfg: &RunConfig, args: AmplitudesArgs) -> CliResult<Amplitudes> {
    let sys = cfg.system()?;
    let drive = cfg.drive()?;
    let step = cfg.numerics.rk_step.unwrap_or_else(|| default_step(&drive, &sys));
    let prop = propagate_sampled(
        &drive,
        &sys,
        GROUND,
        TimeSpan::new(args.t0, args.t1),
        args.steps,
        step,
    )?;
    let mut out = Table::new(&HEADER);
    for (&t, a) in prop.times.iter().zip(&prop.amplitudes) {
        let p11 = first_order_amplitude(&drive, &sys, Level::Ground, Level::Ground, t)?;
        let p21 = first_order_amplitude(&drive, &sys, Level::Excited, Level::Ground, t)?;
        let printed = a11(&drive, &sys, t);
        out.push(&[
            Cell::Num(t),
            Cell::Num(p11.re),
            Cell::Num(p11.im),
            Cell::Num(p21.re),
            Cell::Num(p21.im),
            Cell::Num(printed.re),
            Cell::Num(printed.im),
            Cell::Num(a[0].re),
            Cell::Num(a[0].im),
            Cell::Num(a[1].re),
            Cell::Num(a[1].im),
        ]);
    }
    Ok(Amplitudes {
        table: out,
        step: prop.step,
        est_error: prop.est_error,
        norm_drift: prop.norm_drift,
    })
}

pub fn run(cfg: &RunConfig, args: AmplitudesArgs, out_dir: &Path) -> CliResult<Output> {
    let amps = compute(cfg, args)?;
    let mut out = Output::default();
    out.line(format!(
        "amplitudes: {} rows on t in [{}, {}]",
        amps.table.rows(),
        fmt_f64(args.t0),
        fmt_f64(args.t1)
    ));
    out.line(format!("rk4 step = {}", fmt_f64(amps.step)));
    out.line(format!("est_error = {}", fmt_f64(amps.est_error)));
    out.line(format!("norm_drift = {}", fmt_f64(amps.norm_drift)));
    if cfg.wants(Format::Csv) {
        prepare_dir(out_dir)?;
        let path = out_dir.join("amplitudes.csv");
        amps.table.write(&path)?;
        out.wrote(path);
    }
    Ok(out)
}
