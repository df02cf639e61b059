//! Fidelity-susceptibility metric on the `(λ₁, λ₂)` control plane.
//!
//! Two independent routes are provided and deliberately kept apart:
//!
//! * the closed forms built from `r² = |β/α|²` ([`chi_closed`], [`chi_uv`]);
//! * the defining overlap formula
//!   `χ_ij = [⟨ψ|∂_iψ⟩/⟨ψ|ψ⟩][⟨ψ|∂_jψ⟩/⟨ψ|ψ⟩] + 2δ_ij⟨ψ|∂_i∂_jψ⟩/⟨ψ|ψ⟩`
//!   applied to any [`ParametricState`] ([`chi_definition`]).
//!
//! They do not agree for the perturbed ground state; callers that need both
//! compute both. The third-order tensor `ζ_ijk` and the Finsler line element
//! live here as well.

use crate::error::{Error, Result};
use crate::perturbation::{alpha_beta, GroundStateCoeffs};
use crate::qcore::{ControlParams, State2, TwoLevelSystem, C64, ZERO};

/// Smallest `⟨ψ|ψ⟩` accepted by the defining formula.
pub const NORM_GUARD: f64 = 1e-24;

/// Default relative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Second-difference stencils use this multiple of the first-difference step.
/// Their round-off grows as `ε/h²` rather than `ε/h`.
pub const SECOND_STEP_RATIO: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSource {
    ClosedForm,
    UvLimit,
    DefinitionAnalytic,
    DefinitionFd,
}

impl MetricSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricSource::ClosedForm => "closed_form",
            MetricSource::UvLimit => "uv_limit",
            MetricSource::DefinitionAnalytic => "definition_analytic",
            MetricSource::DefinitionFd => "definition_fd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMetric {
    pub chi11: C64,
    pub chi12: C64,
    pub chi22: C64,
    /// Evaluation time, when the metric belongs to a time slice.
    pub t: Option<f64>,
    pub source: MetricSource,
}

/// Eigenvalue sign counts of a real symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl InfoMetric {
    /// `[[Re χ₁₁, Re χ₁₂], [Re χ₁₂, Re χ₂₂]]`.
    pub fn real_matrix(&self) -> [[f64; 2]; 2] {
        [[self.chi11.re, self.chi12.re], [self.chi12.re, self.chi22.re]]
    }

    pub fn determinant(&self) -> f64 {
        let m = self.real_matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn signature(&self) -> Signature {
        let m = self.real_matrix();
        let tr = m[0][0] + m[1][1];
        let disc = ((m[0][0] - m[1][1]).powi(2) + 4.0 * m[0][1] * m[0][1]).sqrt();
        let eig = [(tr + disc) / 2.0, (tr - disc) / 2.0];
        let scale = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
        let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
        let mut sig = Signature {
            positive: 0,
            negative: 0,
            zero: 0,
        };
        for e in eig {
            if e > tol {
                sig.positive += 1;
            } else if e < -tol {
                sig.negative += 1;
            } else {
                sig.zero += 1;
            }
        }
        sig
    }

    pub fn is_finite(&self) -> bool {
        [self.chi11, self.chi12, self.chi22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn components(&self) -> [[C64; 2]; 2] {
        [[self.chi11, self.chi12], [self.chi12, self.chi22]]
    }
}

/// `ψ(λ)` together with its first and second partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateJet {
    pub psi: State2,
    pub d: [State2; 2],
    pub dd: [[State2; 2]; 2],
}

/// A state depending on the two control parameters.
pub trait ParametricState {
    fn state(&self, lambda: [f64; 2]) -> Result<State2>;

    /// Exact derivatives, when the family knows them.
    fn analytic_jet(&self, _lambda: [f64; 2]) -> Option<Result<StateJet>> {
        None
    }
}

/// Adapts a closure `λ ↦ ψ(λ)`.
pub struct FnState<F>(pub F);

impl<F> ParametricState for FnState<F>
where
    F: Fn([f64; 2]) -> State2,
{
    fn state(&self, lambda: [f64; 2]) -> Result<State2> {
        Ok((self.0)(lambda))
    }
}

/// Perturbed ground state `(λ₁α(t) [+1], λ₂β(t))` at fixed `(t, ω)`; linear in `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateFamily {
    pub coeffs: GroundStateCoeffs,
    pub include_unperturbed: bool,
}

impl GroundStateFamily {
    pub fn new(params: &ControlParams, sys: &TwoLevelSystem, omega: f64, t: f64) -> Result<Self> {
        Ok(Self {
            coeffs: alpha_beta(params, sys, omega, t)?,
            include_unperturbed: false,
        })
    }

    pub fn with_unperturbed(mut self, include: bool) -> Self {
        self.include_unperturbed = include;
        self
    }
}

impl ParametricState for GroundStateFamily {
    fn state(&self, [l1, l2]: [f64; 2]) -> Result<State2> {
        Ok(self.coeffs.wavefunction(l1, l2, self.include_unperturbed))
    }

    fn analytic_jet(&self, lambda: [f64; 2]) -> Option<Result<StateJet>> {
        let psi = match self.state(lambda) {
            Ok(psi) => psi,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(StateJet {
            psi,
            d: [[self.coeffs.alpha, ZERO], [ZERO, self.coeffs.beta]],
            dd: [[[ZERO; 2]; 2]; 2],
        }))
    }
}

/// Hand-built nonlinear test state `ψ(λ) = (1 + λ₁², λ₂²)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticState;

impl ParametricState for QuadraticState {
    fn state(&self, [l1, l2]: [f64; 2]) -> Result<State2> {
        Ok([C64::new(1.0 + l1 * l1, 0.0), C64::new(l2 * l2, 0.0)])
    }

    fn analytic_jet(&self, lambda @ [l1, l2]: [f64; 2]) -> Option<Result<StateJet>> {
        let psi = self.state(lambda).ok()?;
        let two = C64::new(2.0, 0.0);
        Some(Ok(StateJet {
            psi,
            d: [[C64::new(2.0 * l1, 0.0), ZERO], [ZERO, C64::new(2.0 * l2, 0.0)]],
            dd: [[[two, ZERO], [ZERO; 2]], [[ZERO; 2], [ZERO, two]]],
        }))
    }
}

/// How derivatives of `ψ(λ)` are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivatives {
    Analytic,
    /// Central differences with relative step `h` (scaled by `max(1, |λ_i|)`),
    /// optionally sharpened by one Richardson pass.
    FiniteDifference { h: f64, richardson: bool },
}

impl Default for Derivatives {
    fn default() -> Self {
        Derivatives::FiniteDifference {
            h: DEFAULT_FD_STEP,
            richardson: true,
        }
    }
}

fn add(a: State2, b: State2) -> State2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: State2, b: State2) -> State2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale(a: State2, s: f64) -> State2 {
    [a[0] * s, a[1] * s]
}

fn richardson(coarse: State2, fine: State2) -> State2 {
    scale(sub(scale(fine, 4.0), coarse), 1.0 / 3.0)
}

fn shifted(lambda: [f64; 2], i: usize, di: f64, j: usize, dj: f64) -> [f64; 2] {
    let mut l = lambda;
    l[i] += di;
    l[j] += dj;
    l
}

/// Finite-difference jet of any parametric state.
pub fn fd_jet<S: ParametricState + ?Sized>(
    state: &S,
    lambda: [f64; 2],
    h: f64,
    use_richardson: bool,
) -> Result<StateJet> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("finite-difference step {h} must be positive")));
    }
    let psi = state.state(lambda)?;
    let steps = lambda.map(|l| h * l.abs().max(1.0));
    let eval = |l: [f64; 2]| state.state(l);

    let d1 = |i: usize, s: f64| -> Result<State2> {
        let p = eval(shifted(lambda, i, s, i, 0.0))?;
        let m = eval(shifted(lambda, i, -s, i, 0.0))?;
        Ok(scale(sub(p, m), 0.5 / s))
    };
    let d2 = |i: usize, j: usize, s_i: f64, s_j: f64| -> Result<State2> {
        if i == j {
            let p = eval(shifted(lambda, i, s_i, i, 0.0))?;
            let m = eval(shifted(lambda, i, -s_i, i, 0.0))?;
            Ok(scale(sub(add(p, m), scale(psi, 2.0)), 1.0 / (s_i * s_i)))
        } else {
            let pp = eval(shifted(lambda, i, s_i, j, s_j))?;
            let pm = eval(shifted(lambda, i, s_i, j, -s_j))?;
            let mp = eval(shifted(lambda, i, -s_i, j, s_j))?;
            let mm = eval(shifted(lambda, i, -s_i, j, -s_j))?;
            Ok(scale(sub(add(pp, mm), add(pm, mp)), 0.25 / (s_i * s_j)))
        }
    };

    let mut d = [[ZERO; 2]; 2];
    for i in 0..2 {
        let coarse = d1(i, steps[i])?;
        d[i] = if use_richardson {
            richardson(coarse, d1(i, steps[i] / 2.0)?)
        } else {
            coarse
        };
    }
    let wide = steps.map(|s| s * SECOND_STEP_RATIO);
    let mut dd = [[[ZERO; 2]; 2]; 2];
    for i in 0..2 {
        for j in i..2 {
            let coarse = d2(i, j, wide[i], wide[j])?;
            let value = if use_richardson {
                richardson(coarse, d2(i, j, wide[i] / 2.0, wide[j] / 2.0)?)
            } else {
                coarse
            };
            dd[i][j] = value;
            dd[j][i] = value;
        }
    }
    Ok(StateJet { psi, d, dd })
}

fn jet_for<S: ParametricState + ?Sized>(
    state: &S,
    lambda: [f64; 2],
    derivs: Derivatives,
) -> Result<(StateJet, MetricSource)> {
    match derivs {
        Derivatives::Analytic => {
            let jet = state.analytic_jet(lambda).ok_or_else(|| {
                Error::Config("this state has no analytic derivatives".into())
            })??;
            Ok((jet, MetricSource::DefinitionAnalytic))
        }
        Derivatives::FiniteDifference { h, richardson } => {
            Ok((fd_jet(state, lambda, h, richardson)?, MetricSource::DefinitionFd))
        }
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &State2, b: &State2) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn checked_norm(psi: &State2) -> Result<f64> {
    let norm = inner(psi, psi).re;
    if !(norm > NORM_GUARD) {
        return Err(Error::DegenerateNorm { norm });
    }
    Ok(norm)
}

/// Defining formula evaluated on a precomputed jet.
pub fn chi_from_jet(jet: &StateJet) -> Result<[[C64; 2]; 2]> {
    let norm = checked_norm(&jet.psi)?;
    let first = jet.d.map(|d| inner(&jet.psi, &d) / norm);
    let mut chi = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            chi[i][j] = first[i] * first[j];
            if i == j {
                chi[i][j] += 2.0 * inner(&jet.psi, &jet.dd[i][j]) / norm;
            }
        }
    }
    Ok(chi)
}

/// `χ_ij` from the defining overlap formula.
pub fn chi_definition<S: ParametricState + ?Sized>(
    state: &S,
    lambda: [f64; 2],
    derivs: Derivatives,
) -> Result<InfoMetric> {
    let (jet, source) = jet_for(state, lambda, derivs)?;
    let chi = chi_from_jet(&jet)?;
    Ok(InfoMetric {
        chi11: chi[0][0],
        chi12: chi[0][1],
        chi22: chi[1][1],
        t: None,
        source,
    })
}

/// Closed-form components from `λ₁`, `ρ = λ₂/λ₁` and `r² = |β/α|²`.
pub fn closed_components(lambda1: f64, rho: f64, r2: f64) -> [f64; 3] {
    let pre = 1.0 / (2.0 * lambda1);
    let den = 1.0 + r2 * rho * rho;
    [pre / den, pre * ((1.0 + r2 * rho) / den), pre * r2 / den]
}

/// `|β/α|²` in its closed form,
/// `|2ωW₁₂*/V₁₁|² (ω²cos²(ω₀t) + ω₀²sin²(ω₀t)cot²(ωt)) / (ω²−ω₀²)²`.
pub fn beta_alpha_sq(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    t: f64,
) -> Result<f64> {
    let w0 = sys.bohr_frequency();
    sys.check_detuning("omega0 - omega", w0 - omega, &[omega, w0])?;
    let sin_wt = sys.check_sin(omega, t)?;
    if params.v11 == ZERO {
        return Err(Error::SingularAlpha { t, sin: 0.0 });
    }
    let cot = (omega * t).cos() / sin_wt;
    let pref = (2.0 * omega * params.w12.conj() / params.v11).norm_sqr();
    let (s0, c0) = (w0 * t).sin_cos();
    let num = omega * omega * c0 * c0 + w0 * w0 * s0 * s0 * cot * cot;
    Ok(pref * num / (omega * omega - w0 * w0).powi(2))
}

/// `|β(t)|²/|α(t)|²` computed from the auxiliary functions themselves.
pub fn beta_alpha_sq_direct(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    t: f64,
) -> Result<f64> {
    sys.check_sin(omega, t)?;
    let ab = alpha_beta(params, sys, omega, t)?;
    let a2 = ab.alpha.norm_sqr();
    if !(a2 > 0.0) {
        return Err(Error::SingularAlpha { t, sin: 0.0 });
    }
    Ok(ab.beta.norm_sqr() / a2)
}

fn metric_from_real(c: [f64; 3], t: f64, source: MetricSource) -> InfoMetric {
    InfoMetric {
        chi11: C64::new(c[0], 0.0),
        chi12: C64::new(c[1], 0.0),
        chi22: C64::new(c[2], 0.0),
        t: Some(t),
        source,
    }
}

/// Closed-form `χ₁₁, χ₁₂, χ₂₂` with `r² = |β/α|²` from [`beta_alpha_sq`].
pub fn chi_closed(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    t: f64,
) -> Result<InfoMetric> {
    let rho = params.rho()?;
    let r2 = beta_alpha_sq(params, sys, omega, t)?;
    Ok(metric_from_real(
        closed_components(params.lambda1, rho, r2),
        t,
        MetricSource::ClosedForm,
    ))
}

/// `γ ≡ |4W₁₂*/V₁₁|²`, the high-frequency prefactor as defined.
pub fn gamma_printed(params: &ControlParams) -> f64 {
    (4.0 * params.w12.conj() / params.v11).norm_sqr()
}

/// `4|W₁₂/V₁₁|²`, the `ω → ∞` limit of `|β/α|²/cos²(ω₀t)` taken directly.
pub fn gamma_asymptotic(params: &ControlParams) -> f64 {
    4.0 * (params.w12 / params.v11).norm_sqr()
}

/// High-frequency closed forms with `r²` replaced by `γ cos²(ω₀t)`.
pub fn chi_uv(params: &ControlParams, gamma: f64, omega0: f64, t: f64) -> Result<InfoMetric> {
    let rho = params.rho()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!("gamma = {gamma} must be positive")));
    }
    let c = (omega0 * t).cos();
    Ok(metric_from_real(
        closed_components(params.lambda1, rho, gamma * c * c),
        t,
        MetricSource::UvLimit,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineElement {
    pub ds2: f64,
    pub quadratic_part: f64,
    pub finsler_part: f64,
}

/// `ds² = χ₁₁dλ₁² + 2Re(χ₁₂)dλ₁dλ₂ + χ₂₂dλ₂²`, with real parts of the
/// diagonal components.
pub fn line_element(metric: &InfoMetric, dl1: f64, dl2: f64) -> LineElement {
    let q = metric.chi11.re * dl1 * dl1
        + 2.0 * metric.chi12.re * dl1 * dl2
        + metric.chi22.re * dl2 * dl2;
    LineElement {
        ds2: q,
        quadratic_part: q,
        finsler_part: 0.0,
    }
}

/// Rank-3 tensor `ζ_ijk = ⟨ψ|∂_iψ⟩⟨ψ|∂_j∂_kψ⟩ / |⟨ψ|ψ⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdOrderTensor {
    pub zeta: [[[C64; 2]; 2]; 2],
}

impl ThirdOrderTensor {
    pub fn zero() -> Self {
        Self {
            zeta: [[[ZERO; 2]; 2]; 2],
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.zeta[i][j][k]
    }

    /// Single-parameter `ζ_F` along `λ_i`, i.e. `ζ_iii`.
    pub fn scalar(&self, i: usize) -> C64 {
        self.zeta[i][i][i]
    }

    /// Exact `ζ_ijk == ζ_ikj` for all indices.
    pub fn is_symmetric(&self) -> bool {
        (0..2).all(|i| self.zeta[i][0][1] == self.zeta[i][1][0])
    }

    pub fn is_zero(&self) -> bool {
        self.zeta.iter().flatten().flatten().all(|z| *z == ZERO)
    }

    /// `ζ_ijk dλ_i dλ_j dλ_k`.
    pub fn cubic_form(&self, dl: [f64; 2]) -> C64 {
        let mut s = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    s += self.zeta[i][j][k] * (dl[i] * dl[j] * dl[k]);
                }
            }
        }
        s
    }
}

pub fn zeta_from_jet(jet: &StateJet) -> Result<ThirdOrderTensor> {
    let norm = checked_norm(&jet.psi)?;
    let denom = norm * norm;
    let first = jet.d.map(|d| inner(&jet.psi, &d));
    let mut zeta = [[[ZERO; 2]; 2]; 2];
    for (i, fi) in first.iter().enumerate() {
        for j in 0..2 {
            for k in 0..2 {
                zeta[i][j][k] = fi * inner(&jet.psi, &jet.dd[j][k]) / denom;
            }
        }
    }
    Ok(ThirdOrderTensor { zeta })
}

pub fn zeta_tensor<S: ParametricState + ?Sized>(
    state: &S,
    lambda: [f64; 2],
    derivs: Derivatives,
) -> Result<ThirdOrderTensor> {
    let (jet, _) = jet_for(state, lambda, derivs)?;
    zeta_from_jet(&jet)
}

/// `x^{2/3}` on the real branch, `cbrt(x)²`.
pub fn two_thirds_power(x: f64) -> f64 {
    let c = x.cbrt();
    c * c
}

/// `ds² = χ_ij dλ_i dλ_j + (Re ζ_ijk dλ_i dλ_j dλ_k)^{2/3}`.
pub fn finsler_line_element(
    metric: &InfoMetric,
    zeta: &ThirdOrderTensor,
    dl: [f64; 2],
) -> LineElement {
    let quadratic = line_element(metric, dl[0], dl[1]).quadratic_part;
    let finsler = two_thirds_power(zeta.cubic_form(dl).re);
    LineElement {
        ds2: quadratic + finsler,
        quadratic_part: quadratic,
        finsler_part: finsler,
    }
}

/// Which prefactor the high-frequency fit supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMatch {
    /// `4|W₁₂/V₁₁|²`.
    Asymptotic,
    /// `|4W₁₂*/V₁₁|²`.
    Printed,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighFrequencyFit {
    pub omega: f64,
    pub samples: usize,
    /// Mean of `|β/α|²/cos²(ω₀t)` over the accepted samples.
    pub constant: f64,
    /// `(max − min)/mean` of the same ratio.
    pub relative_spread: f64,
    pub gamma_asymptotic: f64,
    pub gamma_printed: f64,
    pub matches: GammaMatch,
}

/// Relative tolerance for declaring that a fitted constant matches a prefactor.
pub const GAMMA_MATCH_TOL: f64 = 0.05;

/// Fits `|β/α|²(t) ≈ C cos²(ω₀t)` on `times`, skipping samples with
/// `|sin ωt| < min_abs_sin`.
pub fn high_frequency_fit(
    params: &ControlParams,
    sys: &TwoLevelSystem,
    omega: f64,
    times: &[f64],
    min_abs_sin: f64,
) -> Result<HighFrequencyFit> {
    let w0 = sys.bohr_frequency();
    let mut ratios = Vec::with_capacity(times.len());
    for &t in times {
        if (omega * t).sin().abs() < min_abs_sin {
            continue;
        }
        let c = (w0 * t).cos();
        if c == 0.0 {
            continue;
        }
        ratios.push(beta_alpha_sq(params, sys, omega, t)? / (c * c));
    }
    if ratios.is_empty() {
        return Err(Error::Config("no admissible samples for the high-frequency fit".into()));
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let ga = gamma_asymptotic(params);
    let gp = gamma_printed(params);
    let close = |g: f64| ((mean - g) / g).abs() <= GAMMA_MATCH_TOL;
    let matches = if close(ga) {
        GammaMatch::Asymptotic
    } else if close(gp) {
        GammaMatch::Printed
    } else {
        GammaMatch::Neither
    };
    Ok(HighFrequencyFit {
        omega,
        samples: ratios.len(),
        constant: mean,
        relative_spread: (max - min) / mean,
        gamma_asymptotic: ga,
        gamma_printed: gp,
        matches,
    })
}
