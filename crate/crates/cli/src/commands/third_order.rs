use std::fs;
use std::path::Path;

use qimetric::format::fmt_f64;
use qimetric::infometric::{
    chi_definition, finsler_line_element, zeta_tensor, Derivatives, GroundStateFamily,
    LineElement, ParametricState, QuadraticState, ThirdOrderTensor,
};

use super::{fmt_c, prepare_dir, Output};
use crate::config::RunConfig;
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DerivativeArg {
    Analytic,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdOrderArgs {
    pub t: f64,
    pub dl1: f64,
    pub dl2: f64,
    /// Use the quadratic test state instead of the perturbed ground state.
    pub synthetic: bool,
    pub derivatives: DerivativeArg,
}

impl ThirdOrderArgs {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let s = &cfg.numerics.third_order;
        Self {
            t: s.t,
            dl1: s.dl1,
            dl2: s.dl2,
            synthetic: false,
            derivatives: DerivativeArg::Analytic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdOrder {
    pub zeta: ThirdOrderTensor,
    pub line: LineElement,
}

pub fn compute(cfg: &RunConfig, args: ThirdOrderArgs) -> CliResult<ThirdOrder> {
    let params = cfg.params()?;
    let lambda = [params.lambda1, params.lambda2];
    let derivs = match args.derivatives {
        DerivativeArg::Analytic => Derivatives::Analytic,
        DerivativeArg::Fd => cfg.derivatives(),
    };
    let state: Box<dyn ParametricState> = if args.synthetic {
        Box::new(QuadraticState)
    } else {
        let sys = cfg.system()?;
        Box::new(GroundStateFamily::new(&params, &sys, cfg.drive.omega, args.t)?)
    };
    let zeta = zeta_tensor(state.as_ref(), lambda, derivs)?;
    let metric = chi_definition(state.as_ref(), lambda, derivs)?;
    let line = finsler_line_element(&metric, &zeta, [args.dl1, args.dl2]);
    Ok(ThirdOrder { zeta, line })
}

pub fn run(cfg: &RunConfig, args: ThirdOrderArgs, out_dir: &Path) -> CliResult<Output> {
    let r = compute(cfg, args)?;
    let mut out = Output::default();
    out.line(format!(
        "state = {}",
        if args.synthetic { "quadratic" } else { "ground" }
    ));
    if !args.synthetic {
        out.line(format!("t = {}", fmt_f64(args.t)));
    }
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out.line(format!(
                    "zeta_{}{}{} = {}",
                    i + 1,
                    j + 1,
                    k + 1,
                    fmt_c(r.zeta.get(i, j, k))
                ));
            }
        }
    }
    out.line(format!("zeta_F(lambda1) = {}", fmt_c(r.zeta.scalar(0))));
    out.line(format!("zeta_F(lambda2) = {}", fmt_c(r.zeta.scalar(1))));
    out.line(format!(
        "symmetry zeta_ijk = zeta_ikj: {}",
        if r.zeta.is_symmetric() { "PASS" } else { "FAIL" }
    ));
    out.line(format!(
        "dl = ({}, {})",
        fmt_f64(args.dl1),
        fmt_f64(args.dl2)
    ));
    out.line(format!("quadratic_part = {}", fmt_f64(r.line.quadratic_part + 0.0)));
    out.line(format!("finsler_part = {}", fmt_f64(r.line.finsler_part + 0.0)));
    out.line(format!("ds2 = {}", fmt_f64(r.line.ds2 + 0.0)));

    prepare_dir(out_dir)?;
    let path = out_dir.join("third_order.txt");
    fs::write(&path, &out.report)?;
    out.wrote(path);
    Ok(out)
}
