//! Domain types shared by every other module: the unperturbed two-level
//! system, the harmonic drive `V(t) = F e^{-iωt} + G e^{iωt}` and the control
//! parameters `(λ₁, λ₂)`.
//!
//! Units are natural: `hbar` defaults to 1 and every frequency is angular.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Row-major 2×2 complex matrix, indexed `[row][col]` with level 1 at index 0.
pub type Mat2 = [[C64; 2]; 2];

/// Amplitudes on the unperturbed basis `(ψ₁⁽⁰⁾, ψ₂⁽⁰⁾)`.
pub type State2 = [C64; 2];

/// Relative guard used for resonances and for the `sin(ωt) = 0` singularity.
pub const DEFAULT_RESONANCE_GUARD: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Plain `(re, im)` pair used at serialization boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<[f64; 2]> for ComplexValue {
    fn from([re, im]: [f64; 2]) -> Self {
        Self { re, im }
    }
}

impl From<ComplexValue> for [f64; 2] {
    fn from(value: ComplexValue) -> Self {
        [value.re, value.im]
    }
}

impl From<ComplexValue> for C64 {
    fn from(value: ComplexValue) -> Self {
        C64::new(value.re, value.im)
    }
}

impl From<C64> for ComplexValue {
    fn from(value: C64) -> Self {
        Self::new(value.re, value.im)
    }
}

pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn mat2_is_finite(m: &Mat2) -> bool {
    m.iter().flatten().all(|z| is_finite(*z))
}

/// Conjugate transpose.
pub fn adjoint(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn mat2_scale(m: &Mat2, s: f64) -> Mat2 {
    m.map(|row| row.map(|z| z * s))
}

pub fn mat2_max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Level index of the two-level basis. `Ground` is level 1 (energy `e1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::Ground, Level::Excited];

    /// Zero-based position in matrices and state vectors.
    pub fn index(self) -> usize {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Level> {
        match i {
            0 => Some(Level::Ground),
            1 => Some(Level::Excited),
            _ => None,
        }
    }
}

/// The unperturbed system with energies `e1 < e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSystem {
    e1: f64,
    e2: f64,
    hbar: f64,
    resonance_guard: f64,
}

impl TwoLevelSystem {
    pub fn new(e1: f64, e2: f64, hbar: f64) -> Result<Self> {
        if !(e1.is_finite() && e2.is_finite()) {
            return Err(Error::Config("energies must be finite".into()));
        }
        if !(e2 > e1) {
            return Err(Error::Config(format!(
                "excited energy e2 = {e2} must exceed ground energy e1 = {e1}"
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Config(format!("hbar = {hbar} must be positive")));
        }
        Ok(Self {
            e1,
            e2,
            hbar,
            resonance_guard: DEFAULT_RESONANCE_GUARD,
        })
    }

    /// Natural units, `hbar = 1`.
    pub fn natural(e1: f64, e2: f64) -> Result<Self> {
        Self::new(e1, e2, 1.0)
    }

    pub fn with_resonance_guard(mut self, guard: f64) -> Result<Self> {
        if !(guard >= 0.0 && guard.is_finite()) {
            return Err(Error::Config(format!("resonance guard {guard} must be >= 0")));
        }
        self.resonance_guard = guard;
        Ok(self)
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e2(&self) -> f64 {
        self.e2
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn resonance_guard(&self) -> f64 {
        self.resonance_guard
    }

    pub fn energy(&self, level: Level) -> f64 {
        match level {
            Level::Ground => self.e1,
            Level::Excited => self.e2,
        }
    }

    /// `ω₀ = (e2 − e1)/ħ`.
    pub fn bohr_frequency(&self) -> f64 {
        (self.e2 - self.e1) / self.hbar
    }

    /// `ω_kn = (E_k − E_n)/ħ`; `ω_21 = ω₀`, `ω_12 = −ω₀`.
    pub fn omega_kn(&self, k: Level, n: Level) -> f64 {
        (self.energy(k) - self.energy(n)) / self.hbar
    }

    /// Rejects `detuning` when it is within the relative guard of zero.
    pub(crate) fn check_detuning(
        &self,
        what: &'static str,
        detuning: f64,
        scales: &[f64],
    ) -> Result<f64> {
        let scale = scales.iter().fold(1.0_f64, |acc, s| acc.max(s.abs()));
        let guard = self.resonance_guard * scale;
        if detuning.abs() < guard || !detuning.is_finite() {
            return Err(Error::Resonance {
                what,
                detuning: detuning.abs(),
                guard,
            });
        }
        Ok(detuning)
    }

    /// |sin(ωt)| below the guard makes `α(t)` vanish.
    pub(crate) fn check_sin(&self, omega: f64, t: f64) -> Result<f64> {
        let s = (omega * t).sin();
        if s.abs() < self.resonance_guard {
            return Err(Error::SingularAlpha { t, sin: s.abs() });
        }
        Ok(s)
    }
}

pub fn bohr_frequency(sys: &TwoLevelSystem) -> f64 {
    sys.bohr_frequency()
}

/// Which coefficient multiplies `e^{i(ω_kn+ω)t}` in `V_kn(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjugation {
    /// `F*_kn`, the element-wise conjugate as written in the closed forms.
    #[default]
    Printed,
    /// `G_kn`, which equals `F*_nk` for a Hermitian drive and keeps `V(t)` Hermitian.
    Strict,
}

/// Unchecked description of a drive, as read from configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub f: Mat2,
    /// Required when `hermitian_drive` is false.
    pub g: Option<Mat2>,
    pub omega: f64,
    pub hermitian_drive: bool,
    pub conjugation: Conjugation,
}

impl DriveSpec {
    pub fn hermitian(f: Mat2, omega: f64) -> Self {
        Self {
            f,
            g: None,
            omega,
            hermitian_drive: true,
            conjugation: Conjugation::Printed,
        }
    }
}

/// Checked harmonic drive. Only obtainable through [`validate_drive`].
#[derive(Debug, Clone, PartialEq)]
pub struct DriveOperator {
    f: Mat2,
    g: Mat2,
    omega: f64,
    hermitian: bool,
    conjugation: Conjugation,
}

pub fn validate_drive(spec: DriveSpec) -> Result<DriveOperator> {
    if !(spec.omega > 0.0 && spec.omega.is_finite()) {
        return Err(Error::Config(format!(
            "drive omega = {} must be positive and finite",
            spec.omega
        )));
    }
    if !mat2_is_finite(&spec.f) {
        return Err(Error::Config("drive matrix F has non-finite entries".into()));
    }
    let g = if spec.hermitian_drive {
        adjoint(&spec.f)
    } else {
        let g = spec.g.ok_or_else(|| {
            Error::Config("hermitian_drive is off, so an explicit G matrix is required".into())
        })?;
        if !mat2_is_finite(&g) {
            return Err(Error::Config("drive matrix G has non-finite entries".into()));
        }
        g
    };
    Ok(DriveOperator {
        f: spec.f,
        g,
        omega: spec.omega,
        hermitian: spec.hermitian_drive,
        conjugation: spec.conjugation,
    })
}

impl DriveOperator {
    pub fn hermitian(f: Mat2, omega: f64) -> Result<Self> {
        validate_drive(DriveSpec::hermitian(f, omega))
    }

    pub fn f(&self) -> &Mat2 {
        &self.f
    }

    pub fn g(&self) -> &Mat2 {
        &self.g
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn conjugation(&self) -> Conjugation {
        self.conjugation
    }

    pub fn with_conjugation(mut self, conjugation: Conjugation) -> Self {
        self.conjugation = conjugation;
        self
    }

    pub fn f_kn(&self, k: Level, n: Level) -> C64 {
        self.f[k.index()][n.index()]
    }

    /// Coefficient of the `e^{+iωt}` half of `V_kn`, per the conjugation setting.
    pub fn conj_kn(&self, k: Level, n: Level) -> C64 {
        match self.conjugation {
            Conjugation::Printed => self.f_kn(k, n).conj(),
            Conjugation::Strict => self.g[k.index()][n.index()],
        }
    }

    /// Same drive with `F` (and `G`) multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            f: mat2_scale(&self.f, s),
            g: mat2_scale(&self.g, s),
            ..self.clone()
        }
    }

    /// Schrödinger-picture operator `F e^{-iωt} + G e^{iωt}`.
    pub fn v_at(&self, t: f64) -> Mat2 {
        let em = C64::from_polar(1.0, -self.omega * t);
        let ep = C64::from_polar(1.0, self.omega * t);
        let mut v = [[ZERO; 2]; 2];
        for (r, row) in v.iter_mut().enumerate() {
            for (c, z) in row.iter_mut().enumerate() {
                *z = self.f[r][c] * em + self.g[r][c] * ep;
            }
        }
        v
    }
}

/// Control couplings `(λ₁, λ₂)` and the base elements they scale:
/// `F₁₁ = λ₁ V₁₁`, `F₁₂ = λ₂ W₁₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub v11: C64,
    pub w12: C64,
}

impl ControlParams {
    pub fn new(lambda1: f64, lambda2: f64, v11: C64, w12: C64) -> Result<Self> {
        if !(lambda1.is_finite() && lambda2.is_finite() && is_finite(v11) && is_finite(w12)) {
            return Err(Error::Config("control parameters must be finite".into()));
        }
        Ok(Self {
            lambda1,
            lambda2,
            v11,
            w12,
        })
    }

    pub fn with_lambdas(&self, lambda1: f64, lambda2: f64) -> Self {
        Self {
            lambda1,
            lambda2,
            ..*self
        }
    }

    /// `ρ = λ₂/λ₁`.
    pub fn rho(&self) -> Result<f64> {
        self.require_lambda1()?;
        Ok(self.lambda2 / self.lambda1)
    }

    pub fn require_lambda1(&self) -> Result<()> {
        if self.lambda1 == 0.0 {
            Err(Error::ZeroLambda1)
        } else {
            Ok(())
        }
    }

    /// Drive matrix induced by the couplings. `F₂₁ = F₁₂*` so that `F` is
    /// Hermitian whenever `V₁₁` is real; `F₂₂ = 0`.
    pub fn drive_matrix(&self) -> Mat2 {
        let f12 = self.w12 * self.lambda2;
        [[self.v11 * self.lambda1, f12], [f12.conj(), ZERO]]
    }

    pub fn drive(&self, omega: f64, conjugation: Conjugation) -> Result<DriveOperator> {
        validate_drive(DriveSpec {
            conjugation,
            ..DriveSpec::hermitian(self.drive_matrix(), omega)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bohr_frequency_examples() {
        assert_eq!(TwoLevelSystem::new(0.0, 1.0, 1.0).unwrap().bohr_frequency(), 1.0);
        assert_eq!(TwoLevelSystem::new(-0.5, 0.5, 1.0).unwrap().bohr_frequency(), 1.0);
        assert_eq!(TwoLevelSystem::new(0.0, 3.0, 2.0).unwrap().bohr_frequency(), 1.5);
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(TwoLevelSystem::new(1.0, 1.0, 1.0).is_err());
        assert!(TwoLevelSystem::new(2.0, 1.0, 1.0).is_err());
        assert!(TwoLevelSystem::new(0.0, 1.0, 0.0).is_err());
        assert!(TwoLevelSystem::new(0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn omega_kn_signs() {
        let sys = TwoLevelSystem::natural(0.0, 2.0).unwrap();
        assert_eq!(sys.omega_kn(Level::Excited, Level::Ground), 2.0);
        assert_eq!(sys.omega_kn(Level::Ground, Level::Excited), -2.0);
        assert_eq!(sys.omega_kn(Level::Ground, Level::Ground), 0.0);
    }

    #[test]
    fn hermitian_drive_builds_adjoint() {
        let f = [[ONE, ZERO], [ZERO, ZERO]];
        let d = DriveOperator::hermitian(f, 1.0).unwrap();
        assert_eq!(*d.g(), f);

        let f = [[ZERO, I], [ZERO, ZERO]];
        let d = DriveOperator::hermitian(f, 1.0).unwrap();
        assert_eq!(*d.g(), [[ZERO, ZERO], [-I, ZERO]]);
    }

    #[test]
    fn drive_validation_errors() {
        let f = [[ONE, ZERO], [ZERO, ZERO]];
        assert!(DriveOperator::hermitian(f, 0.0).is_err());
        assert!(DriveOperator::hermitian(f, -1.0).is_err());
        assert!(DriveOperator::hermitian(f, f64::INFINITY).is_err());
        let spec = DriveSpec {
            hermitian_drive: false,
            ..DriveSpec::hermitian(f, 1.0)
        };
        assert!(validate_drive(spec.clone()).is_err());
        let bad_g = [[c(f64::NAN, 0.0), ZERO], [ZERO, ZERO]];
        assert!(validate_drive(DriveSpec {
            g: Some(bad_g),
            ..spec.clone()
        })
        .is_err());
        assert!(validate_drive(DriveSpec { g: Some(f), ..spec }).is_ok());
    }

    #[test]
    fn zero_lambda1_rejected_for_rho() {
        let p = ControlParams::new(0.0, 1.0, ONE, ONE).unwrap();
        assert_eq!(p.rho(), Err(Error::ZeroLambda1));
    }

    #[test]
    fn complex_value_serializes_as_pair() {
        let v: ComplexValue = [1.5, -2.0].into();
        assert_eq!(C64::from(v), c(1.5, -2.0));
        assert!(!ComplexValue::new(f64::NAN, 0.0).is_finite());
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
    }

    proptest! {
        #[test]
        fn hermitian_drive_is_hermitian_at_all_times(
            f00 in arb_c64(), f01 in arb_c64(), f10 in arb_c64(), f11 in arb_c64(),
            omega in 0.1..10.0f64,
            ts in proptest::collection::vec(-50.0..50.0f64, 100),
        ) {
            let d = DriveOperator::hermitian([[f00, f01], [f10, f11]], omega).unwrap();
            for t in ts {
                let v = d.v_at(t);
                let vd = adjoint(&v);
                for r in 0..2 {
                    for col in 0..2 {
                        prop_assert!((v[r][col] - vd[r][col]).norm() < 1e-14);
                    }
                }
            }
        }

        #[test]
        fn bohr_frequency_shift_invariant(e1 in -5.0..5.0f64, gap in 0.1..5.0f64, shift in -100.0..100.0f64) {
            let a = TwoLevelSystem::natural(e1, e1 + gap).unwrap().bohr_frequency();
            let b = TwoLevelSystem::natural(e1 + shift, e1 + gap + shift).unwrap().bohr_frequency();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + shift.abs()));
        }
    }
}
