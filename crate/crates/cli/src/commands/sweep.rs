use std::path::Path;

use qimetric::format::fmt_f64;
use qimetric::infometric::{chi_closed, chi_uv};
use qimetric::noise::{linspace, AxisRange};
use qimetric::Error;
use rayon::prelude::*;

use super::metric::uv_gamma;
use super::{prepare_dir, Output};
use crate::config::{Format, RunConfig, UvGamma};
use crate::error::CliResult;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepArgs {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

impl SweepArgs {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let s = &cfg.numerics.sweep;
        Self {
            t0: s.t0,
            t1: s.t1,
            nt: s.nt,
        }
    }
}

/// One sweep row. `closed` is `None` where `α(t)` vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub closed: Option<[f64; 3]>,
    pub uv: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub gamma: f64,
}

pub fn compute(cfg: &RunConfig, args: SweepArgs) -> CliResult<Sweep> {
    let sys = cfg.system()?;
    let params = cfg.params()?;
    let omega = cfg.drive.omega;
    let gamma = uv_gamma(cfg, &params);
    let w0 = sys.bohr_frequency();
    let times = linspace(AxisRange::new(args.t0, args.t1), args.nt);
    let rows = times
        .par_iter()
        .map(|&t| -> CliResult<SweepRow> {
            let closed = match chi_closed(&params, &sys, omega, t) {
                Ok(m) => Some([m.chi11.re, m.chi12.re, m.chi22.re]),
                Err(Error::SingularAlpha { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let uv = chi_uv(&params, gamma, w0, t)?;
            Ok(SweepRow {
                t,
                closed,
                uv: [uv.chi11.re, uv.chi12.re, uv.chi22.re],
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Sweep { rows, gamma })
}

pub const HEADER: [&str; 8] = [
    "t",
    "singular",
    "chi11_closed",
    "re_chi12_closed",
    "chi22_closed",
    "chi11_uv",
    "re_chi12_uv",
    "chi22_uv",
];

impl Sweep {
    pub fn table(&self) -> Table {
        let mut table = Table::new(&HEADER);
        for r in &self.rows {
            let mut cells = vec![Cell::Num(r.t)];
            match r.closed {
                Some(c) => {
                    cells.push(Cell::Int(0));
                    cells.extend(c.iter().map(|&x| Cell::Num(x)));
                }
                None => {
                    cells.push(Cell::Int(1));
                    cells.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
                }
            }
            cells.extend(r.uv.iter().map(|&x| Cell::Num(x)));
            table.push(&cells);
        }
        table
    }
}

pub fn run(cfg: &RunConfig, args: SweepArgs, out_dir: &Path) -> CliResult<Output> {
    let sweep = compute(cfg, args)?;
    let singular = sweep.rows.iter().filter(|r| r.closed.is_none()).count();
    let mut out = Output::default();
    out.line(format!(
        "metric-sweep: {} rows on t in [{}, {}], {} singular",
        sweep.rows.len(),
        fmt_f64(args.t0),
        fmt_f64(args.t1),
        singular
    ));
    let which = match cfg.numerics.uv_gamma {
        UvGamma::Printed => "printed",
        UvGamma::Asymptotic => "asymptotic",
    };
    out.line(format!("uv gamma ({which}) = {}", fmt_f64(sweep.gamma)));
    if cfg.wants(Format::Csv) {
        prepare_dir(out_dir)?;
        let path = out_dir.join("metric_sweep.csv");
        sweep.table().write(&path)?;
        out.wrote(path);
    }
    Ok(out)
}
