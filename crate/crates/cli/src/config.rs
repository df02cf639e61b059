//! Run configuration read from a TOML file.
//!
//! Every table rejects unknown keys. Parse errors carry the dotted path of the
//! offending field; semantic errors name the section they came from.

use std::fs;
use std::path::{Path, PathBuf};

use qimetric::infometric::{Derivatives, DEFAULT_FD_STEP};
use qimetric::qcore::DEFAULT_RESONANCE_GUARD;
use qimetric::{
    validate_drive, Conjugation, ControlParams, DriveOperator, DriveSpec, Mat2, TwoLevelSystem, C64,
};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Complex number written as `[re, im]`.
pub type Pair = [f64; 2];

fn c(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn mat(m: &[[Pair; 2]; 2]) -> Mat2 {
    [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub drive: DriveConfig,
    pub params: ParamsConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub e1: f64,
    pub e2: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// `F` as `[[F11, F12], [F21, F22]]`, each entry `[re, im]`.
    pub f: [[Pair; 2]; 2],
    /// `G`, required when `hermitian_drive = false`.
    #[serde(default)]
    pub g: Option<[[Pair; 2]; 2]>,
    pub omega: f64,
    #[serde(default = "yes")]
    pub hermitian_drive: bool,
    /// Use `G_kn` (rather than `F*_kn`) on the `e^{iωt}` term.
    #[serde(default)]
    pub strict_hermitian: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub v11: Pair,
    pub w12: Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UvGamma {
    /// `|4W₁₂*/V₁₁|²`.
    Printed,
    /// `4|W₁₂/V₁₁|²`.
    Asymptotic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub fd_step: f64,
    pub richardson: bool,
    /// Maximum RK4 step; the drive's default when absent.
    pub rk_step: Option<f64>,
    pub resonance_guard: f64,
    pub uv_gamma: UvGamma,
    /// Couplings `ε` applied to the unit-normalised drive in `validate`.
    pub couplings: Vec<f64>,
    pub amplitudes: AmplitudesGrid,
    pub metric: MetricPoint,
    pub sweep: SweepGrid,
    pub noise: NoiseSpec,
    pub third_order: ThirdOrderSpec,
    pub validate: ValidateSpec,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            fd_step: DEFAULT_FD_STEP,
            richardson: true,
            rk_step: None,
            resonance_guard: DEFAULT_RESONANCE_GUARD,
            uv_gamma: UvGamma::Printed,
            couplings: vec![1e-2, 5e-3, 2.5e-3],
            amplitudes: AmplitudesGrid::default(),
            metric: MetricPoint::default(),
            sweep: SweepGrid::default(),
            noise: NoiseSpec::default(),
            third_order: ThirdOrderSpec::default(),
            validate: ValidateSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmplitudesGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl Default for AmplitudesGrid {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 4.0 * std::f64::consts::PI,
            steps: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum MetricSourceArg {
    Closed,
    Uv,
    DefinitionAnalytic,
    DefinitionFd,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricPoint {
    pub t: f64,
    pub dl1: f64,
    pub dl2: f64,
    pub source: MetricSourceArg,
}

impl Default for MetricPoint {
    fn default() -> Self {
        Self {
            t: 0.7,
            dl1: 1e-3,
            dl2: 1e-3,
            source: MetricSourceArg::Closed,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 10.0,
            nt: 201,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
    pub omega0: f64,
    pub omega1: f64,
    pub nomega: usize,
    /// Time at which the two `χ_F` transforms are evaluated.
    pub t: f64,
    /// Frequency spacing of the samples fed to the second-derivative transform.
    pub spacing: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 10.0,
            nt: 101,
            omega0: 0.0,
            omega1: 5.0,
            nomega: 51,
            t: 0.7,
            spacing: 1.0 / 64.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThirdOrderSpec {
    pub t: f64,
    pub dl1: f64,
    pub dl2: f64,
}

impl Default for ThirdOrderSpec {
    fn default() -> Self {
        Self {
            t: 0.7,
            dl1: 1e-2,
            dl2: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSpec {
    /// Propagation window for the perturbative comparison.
    pub t1: f64,
    /// Drive frequency in units of `ω₀` for the high-frequency fit.
    pub uv_ratio: f64,
    /// Time window and sample count of the high-frequency fit.
    pub uv_t1: f64,
    pub uv_samples: usize,
    /// Samples with `|sin ωt|` below this are excluded.
    pub min_abs_sin: f64,
}

impl Default for ValidateSpec {
    fn default() -> Self {
        Self {
            t1: 4.0 * std::f64::consts::PI,
            uv_ratio: 100.0,
            uv_t1: 1.0,
            uv_samples: 400,
            min_abs_sin: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Svg],
        }
    }
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn in_section<T>(section: &str, r: qimetric::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        qimetric::Error::Config(msg) => CliError::Config(format!("{section}: {msg}")),
        other => CliError::from(other),
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Config(format!("field `{path}`: {}", inner.message()))
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        self.system()?;
        self.drive()?;
        self.params()?;
        let n = &self.numerics;
        if !(n.fd_step > 0.0 && n.fd_step.is_finite()) {
            return Err(CliError::Config("numerics.fd_step must be positive".into()));
        }
        if let Some(h) = n.rk_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Config("numerics.rk_step must be positive".into()));
            }
        }
        if n.amplitudes.steps == 0 {
            return Err(CliError::Config("numerics.amplitudes.steps must be at least 1".into()));
        }
        if n.sweep.nt == 0 {
            return Err(CliError::Config("numerics.sweep.nt must be at least 1".into()));
        }
        Ok(())
    }

    pub fn system(&self) -> CliResult<TwoLevelSystem> {
        let s = &self.system;
        let sys = in_section("system", TwoLevelSystem::new(s.e1, s.e2, s.hbar))?;
        in_section(
            "numerics.resonance_guard",
            sys.with_resonance_guard(self.numerics.resonance_guard),
        )
    }

    pub fn conjugation(&self) -> Conjugation {
        if self.drive.strict_hermitian {
            Conjugation::Strict
        } else {
            Conjugation::Printed
        }
    }

    pub fn drive(&self) -> CliResult<DriveOperator> {
        let d = &self.drive;
        in_section(
            "drive",
            validate_drive(DriveSpec {
                f: mat(&d.f),
                g: d.g.as_ref().map(mat),
                omega: d.omega,
                hermitian_drive: d.hermitian_drive,
                conjugation: self.conjugation(),
            }),
        )
    }

    pub fn params(&self) -> CliResult<ControlParams> {
        let p = &self.params;
        in_section(
            "params",
            ControlParams::new(p.lambda1, p.lambda2, c(p.v11), c(p.w12)),
        )
    }

    pub fn derivatives(&self) -> Derivatives {
        Derivatives::FiniteDifference {
            h: self.numerics.fd_step,
            richardson: self.numerics.richardson,
        }
    }

    pub fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }
}
