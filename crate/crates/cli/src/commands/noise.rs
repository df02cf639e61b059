use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use qimetric::format::fmt_f64;
use qimetric::heatmap::{render_svg, HeatmapStyle};
use qimetric::noise::{
    chi_from_lines, chi_from_second_derivative, noise_grid, noise_time_domain, spectral_lines,
    AxisRange, NoiseGrid, SampledSpectrum,
};

use super::{fmt_c, prepare_dir, Output};
use crate::config::{Format, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseArgs {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
    pub omega0: f64,
    pub omega1: f64,
    pub nomega: usize,
    pub t: f64,
}

impl NoiseArgs {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let n = &cfg.numerics.noise;
        Self {
            t0: n.t0,
            t1: n.t1,
            nt: n.nt,
            omega0: n.omega0,
            omega1: n.omega1,
            nomega: n.nomega,
            t: n.t,
        }
    }
}

pub fn grid(cfg: &RunConfig, args: NoiseArgs) -> CliResult<NoiseGrid> {
    let params = cfg.params()?;
    Ok(noise_grid(
        &params,
        AxisRange::new(args.t0, args.t1),
        AxisRange::new(args.omega0, args.omega1),
        args.nt,
        args.nomega,
    )?)
}

pub fn heatmap(grid: &NoiseGrid) -> String {
    let style = HeatmapStyle {
        title: "S_Q(omega, t)".into(),
        x_label: "t".into(),
        y_label: "omega".into(),
        ..HeatmapStyle::default()
    };
    render_svg(&grid.t_axis, &grid.omega_axis, &grid.values, &style)
}

pub fn run(cfg: &RunConfig, args: NoiseArgs, out_dir: &Path) -> CliResult<Output> {
    let sys = cfg.system()?;
    let params = cfg.params()?;
    let grid = grid(cfg, args)?;

    let lines = spectral_lines(&params, &sys, cfg.drive.omega, cfg.conjugation(), args.t)?;
    let from_lines = chi_from_lines(&lines)?;
    let spectrum = SampledSpectrum::from_fn(cfg.numerics.noise.spacing, 2, |w| {
        noise_time_domain(&params, w, args.t)
    });
    let from_second = chi_from_second_derivative(&spectrum)?;

    let mut out = Output::default();
    out.line(format!(
        "noise grid: {} x {} on t in [{}, {}], omega in [{}, {}]",
        grid.t_axis.len(),
        grid.omega_axis.len(),
        fmt_f64(args.t0),
        fmt_f64(args.t1),
        fmt_f64(args.omega0),
        fmt_f64(args.omega1)
    ));
    out.line(format!("max s_q = {}", fmt_f64(grid.max())));
    out.line(format!("min s_q = {}", fmt_f64(grid.min())));
    out.line(format!(
        "chi_from_lines at t = {}: {}",
        fmt_f64(args.t),
        fmt_f64(from_lines)
    ));
    out.line(format!(
        "chi_from_second_derivative at t = {}: {}",
        fmt_f64(args.t),
        fmt_c(from_second)
    ));

    prepare_dir(out_dir)?;
    if cfg.wants(Format::Csv) {
        let path = out_dir.join("noise.csv");
        let mut w = BufWriter::new(fs::File::create(&path)?);
        grid.write_csv(&mut w)?;
        w.flush()?;
        out.wrote(path);
    }
    if cfg.wants(Format::Svg) {
        let path = out_dir.join("noise.svg");
        fs::write(&path, heatmap(&grid))?;
        out.wrote(path);
    }
    Ok(out)
}
