use std::path::Path;

use qimetric::format::fmt_f64;
use qimetric::infometric::{
    chi_closed, chi_definition, chi_uv, gamma_asymptotic, gamma_printed, line_element,
    Derivatives, GroundStateFamily, InfoMetric,
};
use qimetric::{ControlParams, TwoLevelSystem};

use super::{fmt_c, prepare_dir, Output};
use crate::config::{Format, MetricSourceArg, RunConfig, UvGamma};
use crate::error::CliResult;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricArgs {
    pub t: f64,
    pub dl1: f64,
    pub dl2: f64,
    pub source: MetricSourceArg,
}

impl MetricArgs {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let m = &cfg.numerics.metric;
        Self {
            t: m.t,
            dl1: m.dl1,
            dl2: m.dl2,
            source: m.source,
        }
    }
}

pub fn uv_gamma(cfg: &RunConfig, params: &ControlParams) -> f64 {
    match cfg.numerics.uv_gamma {
        UvGamma::Printed => gamma_printed(params),
        UvGamma::Asymptotic => gamma_asymptotic(params),
    }
}

/// Metric at time `t` from the requested source.
pub fn evaluate(
    cfg: &RunConfig,
    sys: &TwoLevelSystem,
    params: &ControlParams,
    source: MetricSourceArg,
    t: f64,
) -> CliResult<InfoMetric> {
    let omega = cfg.drive.omega;
    let lambda = [params.lambda1, params.lambda2];
    let definition = |derivs: Derivatives| -> CliResult<InfoMetric> {
        let family = GroundStateFamily::new(params, sys, omega, t)?;
        let mut m = chi_definition(&family, lambda, derivs)?;
        m.t = Some(t);
        Ok(m)
    };
    match source {
        MetricSourceArg::Closed => Ok(chi_closed(params, sys, omega, t)?),
        MetricSourceArg::Uv => Ok(chi_uv(params, uv_gamma(cfg, params), sys.bohr_frequency(), t)?),
        MetricSourceArg::DefinitionAnalytic => definition(Derivatives::Analytic),
        MetricSourceArg::DefinitionFd => definition(cfg.derivatives()),
    }
}

/// Largest component-wise relative difference between two metrics.
pub fn max_relative_difference(a: &InfoMetric, b: &InfoMetric) -> f64 {
    a.components()
        .iter()
        .flatten()
        .zip(b.components().iter().flatten())
        .map(|(x, y)| {
            let d = (x - y).norm();
            if d == 0.0 {
                0.0
            } else {
                d / y.norm().max(x.norm())
            }
        })
        .fold(0.0, f64::max)
}

pub const HEADER: [&str; 15] = [
    "source",
    "t",
    "chi11_re",
    "chi11_im",
    "chi12_re",
    "chi12_im",
    "chi22_re",
    "chi22_im",
    "dl1",
    "dl2",
    "ds2",
    "determinant",
    "n_positive",
    "n_negative",
    "n_zero",
];

pub fn run(cfg: &RunConfig, args: MetricArgs, out_dir: &Path) -> CliResult<Output> {
    let sys = cfg.system()?;
    let params = cfg.params()?;
    let m = evaluate(cfg, &sys, &params, args.source, args.t)?;
    let ds = line_element(&m, args.dl1, args.dl2);
    let sig = m.signature();
    let det = m.determinant();

    let mut out = Output::default();
    out.line(format!("source = {}", m.source.as_str()));
    out.line(format!("t = {}", fmt_f64(args.t)));
    out.line(format!("chi11 = {}", fmt_c(m.chi11)));
    out.line(format!("chi12 = {}", fmt_c(m.chi12)));
    out.line(format!("chi22 = {}", fmt_c(m.chi22)));
    out.line(format!("re_chi12 = {}", fmt_f64(m.chi12.re)));
    out.line(format!(
        "ds2 = {} at (dl1, dl2) = ({}, {})",
        fmt_f64(ds.ds2 + 0.0),
        fmt_f64(args.dl1),
        fmt_f64(args.dl2)
    ));
    out.line(format!("determinant = {}", fmt_f64(det)));
    out.line(format!(
        "signature = {} positive, {} negative, {} zero",
        sig.positive, sig.negative, sig.zero
    ));
    if args.source == MetricSourceArg::DefinitionFd {
        let exact = evaluate(cfg, &sys, &params, MetricSourceArg::DefinitionAnalytic, args.t)?;
        out.line(format!(
            "cross-check vs definition_analytic: max relative difference = {}",
            fmt_f64(max_relative_difference(&m, &exact))
        ));
    }

    if cfg.wants(Format::Csv) {
        let mut table = Table::new(&HEADER);
        table.push(&[
            Cell::Text(m.source.as_str().into()),
            Cell::Num(args.t),
            Cell::Num(m.chi11.re),
            Cell::Num(m.chi11.im),
            Cell::Num(m.chi12.re),
            Cell::Num(m.chi12.im),
            Cell::Num(m.chi22.re),
            Cell::Num(m.chi22.im),
            Cell::Num(args.dl1),
            Cell::Num(args.dl2),
            Cell::Num(ds.ds2),
            Cell::Num(det),
            Cell::Int(sig.positive as i64),
            Cell::Int(sig.negative as i64),
            Cell::Int(sig.zero as i64),
        ]);
        prepare_dir(out_dir)?;
        let path = out_dir.join("metric.csv");
        table.write(&path)?;
        out.wrote(path);
    }
    Ok(out)
}
