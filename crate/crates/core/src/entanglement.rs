//! Von Neumann entropies of the out-region reduced states.
//!
//! The in-vacuum restricted to one (k, −k) pair is a two-mode state whose
//! Schmidt weights are fixed by `x = |γ|²`:
//!
//! * fermions: occupations {0, 1} with weights {1, x}/(1 + x),
//! * bosons: occupations n = 0, 1, … with weights (1 − x)xⁿ.
//!
//! All entropies are in bits.

use std::f64::consts::LN_2;

use crate::bogoliubov::{gamma_sq, GammaSq, Statistics};
use crate::error::{Error, Result};
use crate::spectrum::{ExpansionParams, ModeParams};

/// Default boson truncation before the tail check.
pub const DEFAULT_BOSON_TRUNCATION: usize = 512;
/// Upper limit for the doubled boson truncation.
pub const MAX_BOSON_TRUNCATION: usize = 1 << 16;
/// Relative size of the last kept boson weight that triggers doubling.
const TAIL_THRESHOLD: f64 = 1e-15;

/// Below `ln(1e-300)` the `x ln x` term is dropped.
const LOG_TINY: f64 = -690.775_527_898_213_7;

/// Occupation-number weights of one mode after tracing out its partner.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub statistics: Statistics,
    /// Natural-log unnormalized weights of n = 0, 1, ….
    pub occupation_log_weights: Vec<f64>,
    /// Sum of the unnormalized weights.
    pub normalization: f64,
}

impl ReducedState {
    pub fn probabilities(&self) -> Vec<f64> {
        let log_norm = self.normalization.ln();
        self.occupation_log_weights
            .iter()
            .map(|&w| (w - log_norm).exp())
            .collect()
    }

    /// `−Σ p log₂ p` over the stored weights.
    pub fn entropy_bits(&self) -> f64 {
        let log_norm = self.normalization.ln();
        let nats: f64 = self
            .occupation_log_weights
            .iter()
            .map(|&w| {
                let lp = w - log_norm;
                if lp < LOG_TINY {
                    0.0
                } else {
                    -lp.exp() * lp
                }
            })
            .sum();
        nats / LN_2
    }
}

/// One evaluated point of the entropy surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySample {
    pub expansion: ExpansionParams,
    pub mode: ModeParams,
    pub statistics: Statistics,
    pub gamma_sq: GammaSq,
    pub entropy_bits: f64,
}

/// `S_F = log₂(1 + x) − x log₂ x/(1 + x)` for `x = |γ_F|²`.
pub fn entropy_fermion(g: &GammaSq) -> f64 {
    entropy_fermion_log(g.log_value())
}

pub(crate) fn entropy_fermion_log(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        return 0.0;
    }
    // invariant under x → 1/x, so evaluate with u = min(x, 1/x) ≤ 1
    let t = -l.abs();
    let u = t.exp();
    let xlogx = if t < LOG_TINY { 0.0 } else { u * t / (1.0 + u) };
    (u.ln_1p() - xlogx) / LN_2
}

/// `S_B = −log₂(1 − x) − x log₂ x/(1 − x)` for `x = |γ_B|² < 1`.
pub fn entropy_boson(g: &GammaSq) -> Result<f64> {
    let l = g.log_value();
    if l >= 0.0 {
        return Err(Error::BosonRatioOutOfRange { log_value: l });
    }
    if l == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let x = l.exp();
    let one_minus_x = -l.exp_m1();
    let xlogx = if l < LOG_TINY { 0.0 } else { x * l / one_minus_x };
    Ok((-one_minus_x.ln() - xlogx) / LN_2)
}

/// Entropy of the geometric law `p_n = (1 − x)xⁿ` summed directly over
/// `n = 0..=truncation`.
///
/// The neglected tail is about `x^{N+1}(N log₂(1/x) + log₂(1/(1−x)))`.
pub fn entropy_boson_bruteforce(x: f64, truncation: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must lie in [0, 1)",
        });
    }
    if truncation < 1 {
        return Err(Error::InvalidParameter {
            name: "truncation",
            value: truncation as f64,
            reason: "must be >= 1",
        });
    }
    let mut p = 1.0 - x;
    let mut bits = 0.0;
    for _ in 0..=truncation {
        if p <= 0.0 {
            break;
        }
        bits -= p * p.log2();
        p *= x;
    }
    Ok(bits)
}

/// Smallest truncation (512 doubled up to 2¹⁶) whose last weight is at most
/// `1e-15` of the total.
pub fn boson_truncation_for(g: &GammaSq) -> usize {
    let l = g.log_value();
    let mut n = DEFAULT_BOSON_TRUNCATION;
    // last/total = (1 − x)xⁿ/(1 − x^{n+1}) ≤ (1 − x)xⁿ
    let log_one_minus_x = (-l.exp_m1()).ln();
    while n < MAX_BOSON_TRUNCATION && n as f64 * l + log_one_minus_x > TAIL_THRESHOLD.ln() {
        n *= 2;
    }
    n
}

pub fn reduced_state(g: &GammaSq, truncation: usize) -> Result<ReducedState> {
    let l = g.log_value();
    match g.statistics() {
        Statistics::Fermion => {
            Ok(ReducedState {
                statistics: Statistics::Fermion,
                occupation_log_weights: vec![0.0, l],
                normalization: 1.0 + l.exp(),
            })
        }
        Statistics::Boson => {
            if l >= 0.0 {
                return Err(Error::BosonRatioOutOfRange { log_value: l });
            }
            if truncation < 1 {
                return Err(Error::InvalidParameter {
                    name: "truncation",
                    value: truncation as f64,
                    reason: "must be >= 1",
                });
            }
            let weights: Vec<f64> = (0..=truncation)
                .map(|n| if n == 0 { 0.0 } else { n as f64 * l })
                .collect();
            // Σ_{n=0}^{N} xⁿ = (1 − x^{N+1})/(1 − x)
            let tail = ((truncation + 1) as f64 * l).exp_m1();
            let normalization = tail / l.exp_m1();
            Ok(ReducedState {
                statistics: Statistics::Boson,
                occupation_log_weights: weights,
                normalization,
            })
        }
    }
}

pub fn entropy(g: &GammaSq) -> Result<f64> {
    match g.statistics() {
        Statistics::Fermion => Ok(entropy_fermion(g)),
        Statistics::Boson => entropy_boson(g),
    }
}

/// Full pipeline: parameters → |γ|² → entropy.
pub fn sample(
    expansion: &ExpansionParams,
    mode: &ModeParams,
    statistics: Statistics,
) -> Result<EntropySample> {
    let g = gamma_sq(expansion, mode, statistics);
    Ok(EntropySample {
        expansion: *expansion,
        mode: *mode,
        statistics,
        gamma_sq: g,
        entropy_bits: entropy(&g)?,
    })
}
