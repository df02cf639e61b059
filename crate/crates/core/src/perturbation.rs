//! First-order time-dependent perturbation theory for the harmonic drive.
//!
//! Every closed form here is the indefinite integral as written, with no
//! integration constant added. `a_kn^(1)(0)` is therefore generally nonzero;
//! [`integration_offset`] exposes that constant so comparisons against an exact
//! propagation can remove it explicitly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qcore::{
    ControlParams, DriveOperator, Level, Mat2, State2, TwoLevelSystem, C64, I, ONE, ZERO,
};

/// Interaction-picture matrix element
/// `V_kn(t) = F_kn e^{i(ω_kn−ω)t} + F̃_kn e^{i(ω_kn+ω)t}`, where `F̃` follows the
/// drive's [`Conjugation`](crate::qcore::Conjugation) setting.
pub fn vkn_t(drive: &DriveOperator, sys: &TwoLevelSystem, k: Level, n: Level, t: f64) -> C64 {
    let w_kn = sys.omega_kn(k, n);
    let w = drive.omega();
    drive.f_kn(k, n) * C64::from_polar(1.0, (w_kn - w) * t)
        + drive.conj_kn(k, n) * C64::from_polar(1.0, (w_kn + w) * t)
}

/// Full interaction-picture matrix `V_mk(t)` for all four level pairs.
pub fn v_matrix_t(drive: &DriveOperator, sys: &TwoLevelSystem, t: f64) -> Mat2 {
    let mut v = [[ZERO; 2]; 2];
    for m in Level::ALL {
        for k in Level::ALL {
            v[m.index()][k.index()] = vkn_t(drive, sys, m, k, t);
        }
    }
    v
}

fn detunings(drive: &DriveOperator, sys: &TwoLevelSystem, k: Level, n: Level) -> Result<(f64, f64)> {
    let w_kn = sys.omega_kn(k, n);
    let w = drive.omega();
    let minus = sys.check_detuning("omega_kn - omega", w_kn - w, &[w, w_kn])?;
    let plus = sys.check_detuning("omega_kn + omega", w_kn + w, &[w, w_kn])?;
    Ok((minus, plus))
}

/// `a_kn^(1)(t) = −F_kn e^{i(ω_kn−ω)t}/(ħ(ω_kn−ω)) − F̃_kn e^{i(ω_kn+ω)t}/(ħ(ω_kn+ω))`.
pub fn first_order_amplitude(
    drive: &DriveOperator,
    sys: &TwoLevelSystem,
    k: Level,
    n: Level,
    t: f64,
) -> Result<C64> {
    let (minus, plus) = detunings(drive, sys, k, n)?;
    let hbar = sys.hbar();
    Ok(-drive.f_kn(k, n) * C64::from_polar(1.0, minus * t) / (hbar * minus)
        - drive.conj_kn(k, n) * C64::from_polar(1.0, plus * t) / (hbar * plus))
}

/// Value of the indefinite-integral closed form at `t = 0`. Subtracting it gives
/// the definite integral `−(i/ħ)∫₀ᵗ V_kn`.
pub fn integration_offset(
    drive: &DriveOperator,
    sys: &TwoLevelSystem,
    k: Level,
    n: Level,
) -> Result<C64> {
    first_order_amplitude(drive, sys, k, n, 0.0)
}

/// The diagonal amplitude in its printed closed form, `i F₁₁ sin(ωt)/(ħω)`.
///
/// The general formula gives `−2i F₁₁ sin(ωt)/(ħω)` for real `F₁₁`; the two
/// are kept side by side and the propagator measures which one holds.
pub fn a11(drive: &DriveOperator, sys: &TwoLevelSystem, t: f64) -> C64 {
    let w = drive.omega();
    I * drive.f_kn(Level::Ground, Level::Ground) * (w * t).sin() / (sys.hbar() * w)
}

/// Printed closed form `−(F₁₂*/ħ)[e^{−iωt}/(ω₀−ω) + e^{iωt}/(ω₀+ω)]`.
pub fn a21_printed(drive: &DriveOperator, sys: &TwoLevelSystem, t: f64) -> Result<C64> {
    let (minus, plus) = detunings(drive, sys, Level::Excited, Level::Ground)?;
    let w = drive.omega();
    let f12c = drive.f_kn(Level::Ground, Level::Excited).conj();
    Ok(-f12c / sys.hbar()
        * (C64::from_polar(1.0, -w * t) / minus + C64::from_polar(1.0, w * t) / plus))
}

/// First-order amplitudes for every `(k, n)` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSet {
    pub t: f64,
    pub include_zeroth: bool,
    a: BTreeMap<(usize, usize), C64>,
}

impl AmplitudeSet {
    pub fn compute(
        drive: &DriveOperator,
        sys: &TwoLevelSystem,
        t: f64,
        include_zeroth: bool,
    ) -> Result<Self> {
        let mut a = BTreeMap::new();
        for k in Level::ALL {
            for n in Level::ALL {
                let mut value = first_order_amplitude(drive, sys, k, n, t)?;
                if include_zeroth && k == n {
                    value += ONE;
                }
                a.insert((k.index(), n.index()), value);
            }
        }
        Ok(Self {
            t,
            include_zeroth,
            a,
        })
    }

    pub fn get(&self, k: Level, n: Level) -> C64 {
        self.a[&(k.index(), n.index())]
    }
}

/// Auxiliary functions `α(t)` and `β(t)` of the perturbed ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateCoeffs {
    pub alpha: C64,
    pub beta: C64,
    pub t: f64,
}

impl GroundStateCoeffs {
    /// `(λ₁α, λ₂β)` plus, optionally, the unperturbed `ψ₁⁽⁰⁾` term.
    pub fn wavefunction(&self, lambda1: f64, lambda2: f64, include_unperturbed: bool) -> State2 {
        let base = if include_unperturbed { ONE } else { ZERO };
        [base + self.alpha * lambda1, self.beta * lambda2]
    }
}

/// `α = iV₁₁ sin(ωt)/(ħω)`,
/// `β = −(iW₁₂*/ħ)(e^{i(ω₀−ω)t}/(ω₀−ω) + e^{i(ω₀+ω)t}/(ω₀+ω))`.
pub fn alpha_beta(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    t: f64,
) -> Result<GroundStateCoeffs> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Config(format!("drive omega = {omega} must be positive")));
    }
    let w0 = sys.bohr_frequency();
    let minus = sys.check_detuning("omega0 - omega", w0 - omega, &[omega, w0])?;
    let plus = sys.check_detuning("omega0 + omega", w0 + omega, &[omega, w0])?;
    let hbar = sys.hbar();
    let alpha = I * params.v11 * (omega * t).sin() / (hbar * omega);
    let beta = -I * params.w12.conj() / hbar
        * (C64::from_polar(1.0, minus * t) / minus + C64::from_polar(1.0, plus * t) / plus);
    Ok(GroundStateCoeffs { alpha, beta, t })
}

/// Coefficients of `ψ₁⁽⁰⁾` and `ψ₂⁽⁰⁾` in the perturbed ground state:
/// `(λ₁α(t), λ₂β(t))`.
pub fn ground_state_wavefunction(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    t: f64,
) -> Result<State2> {
    let ab = alpha_beta(params, sys, omega, t)?;
    Ok(ab.wavefunction(params.lambda1, params.lambda2, false))
}

/// Hamiltonian matrix up to first order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderHamiltonian {
    pub t: f64,
    pub h: Mat2,
    /// The specialised two-level `H₁₂`,
    /// `ω₀F₁₂(e^{i(ω−ω₀)t}/(ω−ω₀) − e^{−i(ω+ω₀)t}/(ω+ω₀))`.
    pub h12_specialized: C64,
    /// `|H₁₂ − H₂₁*|`.
    pub hermiticity_residual: f64,
}

/// Tolerance on `|F_mn − F*_nm|` for the Hermitian-`F` form of `H`.
const HERMITIAN_F_TOL: f64 = 1e-12;

/// `H_nn = E_n`,
/// `H_nm = −e^{iω_nm t} F_nm ω_nm (e^{−iωt}/(ω_nm−ω) + e^{iωt}/(ω_nm+ω))`.
///
/// This form assumes `F_mn = F*_nm`; other drives are rejected.
pub fn h_first_order(
    drive: &DriveOperator,
    sys: &TwoLevelSystem,
    t: f64,
) -> Result<FirstOrderHamiltonian> {
    let f = drive.f();
    let scale = f.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    for r in 0..2 {
        for c in 0..2 {
            if (f[r][c] - f[c][r].conj()).norm() > HERMITIAN_F_TOL * scale {
                return Err(Error::Config(
                    "the first-order Hamiltonian form requires F_mn = F*_nm".into(),
                ));
            }
        }
    }
    let w = drive.omega();
    let mut h = [[ZERO; 2]; 2];
    for n in Level::ALL {
        for m in Level::ALL {
            h[n.index()][m.index()] = if n == m {
                C64::new(sys.energy(n), 0.0)
            } else {
                let w_nm = sys.omega_kn(n, m);
                let minus = sys.check_detuning("omega_nm - omega", w_nm - w, &[w, w_nm])?;
                let plus = sys.check_detuning("omega_nm + omega", w_nm + w, &[w, w_nm])?;
                -C64::from_polar(1.0, w_nm * t)
                    * drive.f_kn(n, m)
                    * w_nm
                    * (C64::from_polar(1.0, -w * t) / minus + C64::from_polar(1.0, w * t) / plus)
            };
        }
    }
    let w0 = sys.bohr_frequency();
    let f12 = drive.f_kn(Level::Ground, Level::Excited);
    let h12_specialized = w0
        * f12
        * (C64::from_polar(1.0, (w - w0) * t) / (w - w0)
            - C64::from_polar(1.0, -(w + w0) * t) / (w + w0));
    let hermiticity_residual = (h[0][1] - h[1][0].conj()).norm();
    Ok(FirstOrderHamiltonian {
        t,
        h,
        h12_specialized,
        hermiticity_residual,
    })
}

/// `O_mn(t) = O⁽⁰⁾_mn e^{iω_nm t} + O⁽¹⁾_mn(t)` with the four-term sum over `k`
/// for `O⁽¹⁾`, evaluated term by term as written.
pub fn operator_first_order(
    o0: &Mat2,
    drive: &DriveOperator,
    sys: &TwoLevelSystem,
    t: f64,
) -> Result<Mat2> {
    let w = drive.omega();
    let hbar = sys.hbar();
    let em = C64::from_polar(1.0, -w * t);
    let ep = C64::from_polar(1.0, w * t);
    let o = |a: Level, b: Level| o0[a.index()][b.index()];
    let den = |what: &'static str, wkn: f64, detuning: f64| -> Result<f64> {
        Ok(hbar * sys.check_detuning(what, detuning, &[w, wkn])?)
    };

    let mut out = [[ZERO; 2]; 2];
    for m in Level::ALL {
        for n in Level::ALL {
            let w_nm = sys.omega_kn(n, m);
            let mut minus_part = ZERO;
            let mut plus_part = ZERO;
            for k in Level::ALL {
                let w_km = sys.omega_kn(k, m);
                let w_kn = sys.omega_kn(k, n);
                let w_mk = sys.omega_kn(m, k);
                let w_nk = sys.omega_kn(n, k);
                minus_part += o(n, k) * drive.f_kn(k, m) / den("omega_km - omega", w_km, w_km - w)?
                    + o(k, m) * drive.f_kn(n, k) / den("omega_kn + omega", w_kn, w_kn + w)?;
                plus_part += o(n, k) * drive.conj_kn(m, k) / den("omega_mk + omega", w_mk, w_mk + w)?
                    + o(k, m) * drive.conj_kn(k, n) / den("omega_nk - omega", w_nk, w_nk - w)?;
            }
            let phase = C64::from_polar(1.0, w_nm * t);
            out[m.index()][n.index()] =
                o(m, n) * phase + phase * (minus_part * em + plus_part * ep);
        }
    }
    Ok(out)
}
