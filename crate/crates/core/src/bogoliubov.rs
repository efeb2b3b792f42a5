//! Squared Bogoliubov ratios |β/α|² for the tanh profile, evaluated in the
//! log domain.
//!
//! Fermion:
//!
//! ```text
//! |γ⁻|² = (ω₋+mε)(ω₊+mε) / ((ω₋−mε)(ω₊−mε))
//!       · sinh(π(ω₋−mε)/ρ) sinh(π(ω₋+mε)/ρ) / (sinh(π(ω₊+mε)/ρ) sinh(π(ω₊−mε)/ρ))
//! ```
//!
//! multiplied by the spinor factor `|χ|² = k²/(ω_out+μ_out)²` to give the
//! Schmidt ratio `|γ_F|²` of the in-vacuum. Boson:
//!
//! ```text
//! |γ_B|² = (cosh(πω̄/ρ) + cosh(2πω₋/ρ)) / (cosh(πω̄/ρ) + cosh(2πω₊/ρ))
//! ```
//!
//! with `cosh(πω̄/ρ)` continued to `cos(π|ω̄|/ρ)` when `ω̄² < 0`.

use std::f64::consts::{LN_2, PI};

use crate::spectrum::{spectrum, ExpansionParams, ModeParams, Spectrum};

/// Below this `m`, `ε` or `m·ε` the fermionic ratio is taken as exactly zero.
const ZERO_MASS_EPSILON: f64 = 1e-300;

/// Particle statistics of the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Fermion,
    Boson,
}

impl Statistics {
    pub fn name(self) -> &'static str {
        match self {
            Statistics::Fermion => "fermion",
            Statistics::Boson => "boson",
        }
    }
}

/// `ln |γ|²` tagged with the statistics it belongs to. `−∞` encodes `|γ|² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSq {
    log_value: f64,
    statistics: Statistics,
}

impl GammaSq {
    /// Wraps a log-domain ratio. Returns `None` for NaN or `+∞`.
    pub fn from_log(log_value: f64, statistics: Statistics) -> Option<Self> {
        if log_value.is_nan() || log_value == f64::INFINITY {
            None
        } else {
            Some(Self {
                log_value,
                statistics,
            })
        }
    }

    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == f64::NEG_INFINITY
    }
}

/// `ln cosh x`, overflow-free for any finite `x`.
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        // cosh x − 1 = 2 sinh²(x/2)
        let s = (0.5 * a).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        a + (-2.0 * a).exp().ln_1p() - LN_2
    }
}

/// `ln |sinh x|`; `−∞` at `x = 0`.
pub fn log_abs_sinh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        a.sinh().ln()
    } else {
        a + (-(-2.0 * a).exp()).ln_1p() - LN_2
    }
}

/// `ln(sinh x / x)`, finite everywhere including `x = 0`.
pub(crate) fn log_sinhc(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        let a2 = a * a;
        a2 / 6.0 - a2 * a2 / 180.0
    } else {
        log_abs_sinh(a) - a.ln()
    }
}

/// `d/dx ln(sinh x / x) = coth x − 1/x`.
pub(crate) fn d_log_sinhc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 / 45.0 + 2.0 * x2 * x2 / 945.0)
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

/// `ln(e^a + e^b)`.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let lo = a.min(b);
    hi + (lo - hi).exp().ln_1p()
}

fn is_massless(s: &Spectrum) -> bool {
    s.mu_in <= ZERO_MASS_EPSILON || s.mass_epsilon <= ZERO_MASS_EPSILON
}

/// `ln |γ_F|²` from a precomputed spectrum.
pub(crate) fn log_gamma_sq_fermion(s: &Spectrum, rho: f64) -> f64 {
    if is_massless(s) {
        return f64::NEG_INFINITY;
    }
    let a = PI / rho;
    let me = s.mass_epsilon;
    let d_mm = s.omega_minus_less_mass_epsilon();
    let d_mp = s.omega_minus + me;
    let d_pm = s.omega_plus_less_mass_epsilon();
    let d_pp = s.omega_plus + me;

    // (ω₋−mε) appears as sinh(a·d)/d: fused so the k → 0 zero cancels.
    let fused = a.ln() + log_sinhc(a * d_mm);
    let log_gamma_minus = fused - d_pm.ln() - log_abs_sinh(a * d_pm) + d_mp.ln()
        + log_abs_sinh(a * d_mp)
        + d_pp.ln()
        - log_abs_sinh(a * d_pp);
    let log_chi_sq = 2.0 * (s.k.ln() - (s.omega_out + s.mu_out).ln());
    log_gamma_minus + log_chi_sq
}

/// `d ln|γ_F|² / d ln k`, used to polish the entanglement-maximizing mode.
pub(crate) fn d_log_gamma_sq_fermion_d_log_k(s: &Spectrum, rho: f64) -> f64 {
    if is_massless(s) {
        return 0.0;
    }
    let a = PI / rho;
    let me = s.mass_epsilon;
    let k = s.k;
    let d_mm = s.omega_minus_less_mass_epsilon();
    let d_mp = s.omega_minus + me;
    let d_pm = s.omega_plus_less_mass_epsilon();
    let d_pp = s.omega_plus + me;

    let dw_out = k / s.omega_out;
    let dw_in = k / s.omega_in;
    // dω₋/dk = −k ω₋ /(ω_in ω_out)
    let dw_minus = -k * s.omega_minus / (s.omega_in * s.omega_out);
    let dw_plus = 0.5 * (dw_out + dw_in);

    let coth = |x: f64| 1.0 / x.tanh();
    let dl_dk = a * d_log_sinhc(a * d_mm) * dw_minus
        - (1.0 / d_pm + a * coth(a * d_pm)) * dw_plus
        + (1.0 / d_mp + a * coth(a * d_mp)) * dw_minus
        + (1.0 / d_pp - a * coth(a * d_pp)) * dw_plus
        + 2.0 / k
        - 2.0 * dw_out / (s.omega_out + s.mu_out);
    k * dl_dk
}

/// `|γ_F|² = |γ⁻|²·|χ|²`, the fermionic Schmidt ratio.
pub fn gamma_sq_fermion(p: &ExpansionParams, mp: &ModeParams) -> GammaSq {
    let s = spectrum(p, mp);
    GammaSq {
        log_value: log_gamma_sq_fermion(&s, p.rho()),
        statistics: Statistics::Fermion,
    }
}

/// `ln(cosh(πω̄/ρ) + cosh(y))`, with the cosine continuation for `ω̄² < 0`.
fn log_cosh_pair(omega_bar_sq: f64, a: f64, y: f64) -> f64 {
    if omega_bar_sq >= 0.0 {
        log_add_exp(log_cosh(a * omega_bar_sq.sqrt()), log_cosh(y))
    } else {
        // cos θ + cosh y = 2cos²(θ/2) + 2sinh²(y/2), a sum of non-negative terms
        let half_theta = 0.5 * a * (-omega_bar_sq).sqrt();
        let c = half_theta.cos().abs();
        let log_c2 = if c == 0.0 { f64::NEG_INFINITY } else { 2.0 * c.ln() };
        LN_2 + log_add_exp(log_c2, 2.0 * log_abs_sinh(0.5 * y))
    }
}

pub(crate) fn log_gamma_sq_boson(s: &Spectrum, rho: f64) -> f64 {
    if s.mu_in <= ZERO_MASS_EPSILON {
        // cos(π) + cosh(0) = 0
        return f64::NEG_INFINITY;
    }
    let a = PI / rho;
    let num = log_cosh_pair(s.omega_bar_sq, a, 2.0 * a * s.omega_minus);
    let den = log_cosh_pair(s.omega_bar_sq, a, 2.0 * a * s.omega_plus);
    num - den
}

/// `|γ_B|²` for a scalar field.
pub fn gamma_sq_boson(p: &ExpansionParams, mp: &ModeParams) -> GammaSq {
    let s = spectrum(p, mp);
    GammaSq {
        log_value: log_gamma_sq_boson(&s, p.rho()),
        statistics: Statistics::Boson,
    }
}

pub fn gamma_sq(p: &ExpansionParams, mp: &ModeParams, statistics: Statistics) -> GammaSq {
    match statistics {
        Statistics::Fermion => gamma_sq_fermion(p, mp),
        Statistics::Boson => gamma_sq_boson(p, mp),
    }
}
