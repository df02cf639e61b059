//! Quantum noise spectrum `S_Q` of the drive.
//!
//! Two representations are kept side by side: discrete δ-lines
//! `Σ |⟨ψ_n|V|ψ_0⟩|² δ(ω − ω_n0)` ([`spectral_lines`]) and the time-domain form
//! `2|λ₂W₁₂|² cos²(ωt)` ([`noise_time_domain`]), in which `ω` is the drive
//! frequency.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::perturbation::vkn_t;
use crate::qcore::{Conjugation, ControlParams, Level, TwoLevelSystem, C64};

/// Lines closer than this to `ω = 0` make `∫ S_Q/ω²` singular.
pub const LINE_FREQUENCY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub frequency: f64,
    pub weight: f64,
}

/// δ-function spectrum with positive, distinct frequencies and nonnegative weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralLines {
    lines: Vec<SpectralLine>,
}

impl SpectralLines {
    pub fn new(lines: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut out: Vec<SpectralLine> = Vec::new();
        for (frequency, weight) in lines {
            if !(frequency > 0.0 && frequency.is_finite()) {
                return Err(Error::Config(format!(
                    "line frequency {frequency} must be positive and finite"
                )));
            }
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(Error::Config(format!("line weight {weight} must be >= 0")));
            }
            if out.iter().any(|l| l.frequency == frequency) {
                return Err(Error::Config(format!(
                    "duplicate line frequency {frequency}: levels must be non-degenerate"
                )));
            }
            out.push(SpectralLine { frequency, weight });
        }
        Ok(Self { lines: out })
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Union of two spectra sharing no frequency.
    pub fn union(&self, other: &SpectralLines) -> Result<SpectralLines> {
        Self::new(
            self.lines
                .iter()
                .chain(&other.lines)
                .map(|l| (l.frequency, l.weight)),
        )
    }
}

/// One line at `ω₀` weighted by `|V₂₁(t)|²` for the drive induced by `params`.
pub fn spectral_lines(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    conjugation: Conjugation,
    t: f64,
) -> Result<SpectralLines> {
    let drive = params.drive(omega, conjugation)?;
    let v21 = vkn_t(&drive, sys, Level::Excited, Level::Ground, t);
    SpectralLines::new([(sys.bohr_frequency(), v21.norm_sqr())])
}

/// `2|λ₂W₁₂|² cos²(ωt)`.
pub fn noise_time_domain(params: &ControlParams, omega: f64, t: f64) -> f64 {
    let amp = (params.w12 * params.lambda2).norm_sqr();
    let c = (omega * t).cos();
    2.0 * amp * c * c
}

/// `χ_F = ∫ S_Q(ω)/ω² dω`, exact on δ-lines: `Σ w_n / ω_n²`.
pub fn chi_from_lines(lines: &SpectralLines) -> Result<f64> {
    let mut total = 0.0;
    for line in lines.lines() {
        if line.frequency < LINE_FREQUENCY_GUARD {
            return Err(Error::ZeroFrequencyLine {
                frequency: line.frequency,
            });
        }
        total += line.weight / (line.frequency * line.frequency);
    }
    Ok(total)
}

/// Uniform samples of a spectrum on `ω = k·spacing`, `k = −m..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl SampledSpectrum {
    pub fn from_fn(spacing: f64, half_width: usize, f: impl Fn(f64) -> f64) -> Self {
        let m = half_width as i64;
        let values = (-m..=m).map(|k| f(k as f64 * spacing)).collect();
        Self { spacing, values }
    }

    /// Samples on each side of `ω = 0`.
    pub fn half_width(&self) -> usize {
        self.values.len() / 2
    }
}

/// `πi · S_Q''(0)` with the five-point central stencil.
pub fn chi_from_second_derivative(spectrum: &SampledSpectrum) -> Result<C64> {
    let n = spectrum.values.len();
    let have = spectrum.half_width();
    if n % 2 == 0 || have < 2 {
        return Err(Error::InsufficientSamples { have, need: 2 });
    }
    let h = spectrum.spacing;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("sample spacing {h} must be positive")));
    }
    let c = n / 2;
    let f = &spectrum.values;
    let d2 = (-f[c + 2] + 16.0 * f[c + 1] - 30.0 * f[c] + 16.0 * f[c - 1] - f[c - 2])
        / (12.0 * h * h);
    Ok(C64::new(0.0, std::f64::consts::PI * d2))
}

/// Closed inclusive range for a grid axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
}

impl AxisRange {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }
}

/// `n` equally spaced points with both endpoints hit exactly.
pub fn linspace(range: AxisRange, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.min];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                range.max
            } else {
                range.min + (range.max - range.min) * (i as f64 / last)
            }
        })
        .collect()
}

/// `S_Q(ω, t)` sampled on a rectangular grid. `values[i][j]` is at
/// `(t_axis[i], omega_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseGrid {
    pub t_axis: Vec<f64>,
    pub omega_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn noise_grid(
    params: &ControlParams,
    t_range: AxisRange,
    omega_range: AxisRange,
    nt: usize,
    nomega: usize,
) -> Result<NoiseGrid> {
    if nt < 2 || nomega < 2 {
        return Err(Error::Config(format!(
            "grid needs at least 2 points per axis, got nt = {nt}, nomega = {nomega}"
        )));
    }
    for r in [t_range, omega_range] {
        if !(r.min.is_finite() && r.max.is_finite() && r.max > r.min) {
            return Err(Error::Config(format!(
                "grid range [{}, {}] must be finite and nonempty",
                r.min, r.max
            )));
        }
    }
    let t_axis = linspace(t_range, nt);
    let omega_axis = linspace(omega_range, nomega);
    let values = t_axis
        .par_iter()
        .map(|&t| {
            omega_axis
                .iter()
                .map(|&w| noise_time_domain(params, w, t))
                .collect()
        })
        .collect();
    Ok(NoiseGrid {
        t_axis,
        omega_axis,
        values,
    })
}

impl NoiseGrid {
    pub fn max(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::MAX, f64::min)
    }

    /// Header `t,omega,s_q`, one row per grid point, row-major in `t`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,omega,s_q")?;
        for (t, row) in self.t_axis.iter().zip(&self.values) {
            for (w, v) in self.omega_axis.iter().zip(row) {
                writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*w), fmt_f64(*v))?;
            }
        }
        Ok(())
    }
}
