//! Entanglement-maximizing modes and the two inverse protocols built on them:
//! recovering the rapidity `ρ` from the optimal momentum, and bounding `ε`
//! from below by the entanglement seen in that mode.
//!
//! All maximization uses the fermionic entropy, which has an interior peak in
//! `k`. Since `S_F` is increasing in `|γ_F|² ≤ 1`, the searches work on
//! `ln |γ_F|²` and only convert to bits at the end, so nothing underflows when
//! the entropy is tiny.

use crate::bogoliubov::{d_log_gamma_sq_fermion_d_log_k, log_gamma_sq_fermion};
use crate::entanglement::entropy_fermion_log;
use crate::error::{Error, Result};
use crate::optimize::{bisect, golden_max, logspace};
use crate::spectrum::{spectrum, ExpansionParams, ModeParams};

/// Peak entropies below this are reported as [`Error::FlatEntropy`].
pub const FLAT_ENTROPY: f64 = 1e-12;
/// Relative offset used by the local-maximum certificate.
pub const CERTIFICATE_DELTA: f64 = 1e-3;
/// Scan edges must fall below this fraction of the peak entropy.
const EDGE_FRACTION: f64 = 1e-6;
const MIN_SCAN_POINTS: usize = 64;
const SCAN_POINTS_PER_DECADE: f64 = 8.0;
const MAX_SCAN_EXPANSIONS: usize = 12;
const TIE_ENTROPY: f64 = 1e-9;

/// Range of `u = ln(m(1+2ε)/ρ)` searched by [`max_entanglement`].
pub const MASS_SCALE_RANGE: (f64, f64) = (1e-8, 1e2);
const OUTER_SCAN_POINTS: usize = 41;

/// Number of samples used to verify monotonicity of an inverse map.
pub const MONOTONE_SAMPLES: usize = 8;
/// Largest `ε` tried when bounding `ε` from below.
pub const EPSILON_UPPER: f64 = 1e8;
const EPSILON_LOWER_START: f64 = 1e-2;
const EPSILON_LOWER_LIMIT: f64 = 1e-12;
/// Relative tolerance of the rapidity bisection.
pub const RHO_REL_TOL: f64 = 1e-7;
/// Relative tolerance of the `ε` bisection.
pub const EPSILON_REL_TOL: f64 = 1e-6;

/// The momentum maximizing the fermionic entropy at fixed mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalMode {
    pub k_star: f64,
    pub entropy_at_peak: f64,
    pub log_gamma_sq_at_peak: f64,
    pub expansion: ExpansionParams,
    pub mass: f64,
    /// `k` range of the final coarse scan.
    pub scan_range: (f64, f64),
    /// Set when the scan found another peak within `1e-9` bits; the smaller
    /// `k` is returned.
    pub multimodal: bool,
}

/// Joint maximum over mass and momentum at fixed expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntanglement {
    pub mass: f64,
    pub k_star: f64,
    pub s_max: f64,
    pub expansion: ExpansionParams,
    /// The maximizer lies in the lowest cell of the mass scan. The supremum
    /// is approached as `m/ρ → 0` and the curve is flat to rounding there, so
    /// this is the expected outcome.
    pub at_mass_floor: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub estimate: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub iterations: usize,
}

fn log_gamma_at(p: &ExpansionParams, mass: f64, log_k: f64) -> f64 {
    match ModeParams::new(mass, log_k.exp()) {
        Ok(mp) => log_gamma_sq_fermion(&spectrum(p, &mp), p.rho()),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn slope_at(p: &ExpansionParams, mass: f64, log_k: f64) -> f64 {
    match ModeParams::new(mass, log_k.exp()) {
        Ok(mp) => d_log_gamma_sq_fermion_d_log_k(&spectrum(p, &mp), p.rho()),
        Err(_) => f64::NAN,
    }
}

fn scan_points(lo: f64, hi: f64) -> usize {
    let decades = (hi / lo).log10();
    MIN_SCAN_POINTS.max((decades * SCAN_POINTS_PER_DECADE).ceil() as usize + 1)
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// Finds `k*` maximizing `S_F(k)` for the given mass.
///
/// A log-spaced scan over `[1e-3·min(m,ρ), 1e3·max(m,ρ)]` is widened until
/// both edges fall below `1e-6` of the peak, the best scan cell is refined by
/// golden-section on `ln k`, and the result is polished by bisection on the
/// analytic slope `d ln|γ_F|²/d ln k`.
pub fn optimal_k(p: &ExpansionParams, mass: f64) -> Result<OptimalMode> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(invalid("mass", mass, "must be finite and >= 0"));
    }
    if mass < 1e-290 {
        return Err(Error::FlatEntropy { peak: 0.0 });
    }
    let rho = p.rho();
    let mut lo = 1e-3 * mass.min(rho);
    let mut hi = 1e3 * mass.max(rho);
    let lg = |lk: f64| log_gamma_at(p, mass, lk);

    let mut expansions = 0;
    let (ks, ls, best) = loop {
        let ks: Vec<f64> = logspace(lo, hi, scan_points(lo, hi)).iter().map(|k| k.ln()).collect();
        let ls: Vec<f64> = ks.iter().map(|&lk| lg(lk)).collect();
        let best = pick_peak(&ls);
        let peak = entropy_fermion_log(ls[best.0]);
        let low_open = entropy_fermion_log(ls[0]) >= EDGE_FRACTION * peak || best.0 == 0;
        let n = ls.len();
        let high_open = entropy_fermion_log(ls[n - 1]) >= EDGE_FRACTION * peak || best.0 == n - 1;
        if peak <= 0.0 || !(low_open || high_open) || expansions >= MAX_SCAN_EXPANSIONS {
            break (ks, ls, best);
        }
        expansions += 1;
        if low_open && lo > 1e-280 {
            lo *= 1e-3;
        }
        if high_open && hi < 1e280 {
            hi *= 1e3;
        }
    };
    let (i, multimodal) = best;
    let coarse_peak = entropy_fermion_log(ls[i]);
    if !(coarse_peak >= FLAT_ENTROPY) {
        return Err(Error::FlatEntropy { peak: coarse_peak });
    }

    let a = ks[i.saturating_sub(1)];
    let b = ks[(i + 1).min(ks.len() - 1)];
    let (mut lk, _, _) = golden_max(lg, a, b, 1e-9);
    // ln|γ|² is flat to rounding near the peak, so golden-section stalls near
    // √ε_mach; the slope root is sharper. Keep it when it is as high as the
    // golden point up to rounding.
    if slope_at(p, mass, a) > 0.0 && slope_at(p, mass, b) < 0.0 {
        let (root, _, _) = bisect(|x| slope_at(p, mass, x), a, b, 1e-15);
        let (l_root, l_golden) = (lg(root), lg(lk));
        if l_root >= l_golden - 8.0 * f64::EPSILON * l_golden.abs() {
            lk = root;
        }
    }
    let l_star = lg(lk);
    let k_star = lk.exp();
    let entropy_at_peak = entropy_fermion_log(l_star);
    if entropy_at_peak < FLAT_ENTROPY {
        return Err(Error::FlatEntropy {
            peak: entropy_at_peak,
        });
    }
    for d in [1.0 - CERTIFICATE_DELTA, 1.0 + CERTIFICATE_DELTA] {
        if lg((k_star * d).ln()) > l_star {
            return Err(Error::CertificateViolated { k_star });
        }
    }
    Ok(OptimalMode {
        k_star,
        entropy_at_peak,
        log_gamma_sq_at_peak: l_star,
        expansion: *p,
        mass,
        scan_range: (ks[0].exp(), ks[ks.len() - 1].exp()),
        multimodal,
    })
}

/// Index of the scan peak, preferring the smallest `k` among local maxima
/// whose entropy ties the best to within `1e-9`.
fn pick_peak(ls: &[f64]) -> (usize, bool) {
    let n = ls.len();
    let global = (0..n).fold(0, |b, i| if ls[i] > ls[b] { i } else { b });
    let best_s = entropy_fermion_log(ls[global]);
    let local: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = i == 0 || ls[i] > ls[i - 1];
            let right = i == n - 1 || ls[i] >= ls[i + 1];
            left && right
        })
        .filter(|&i| best_s - entropy_fermion_log(ls[i]) <= TIE_ENTROPY)
        .collect();
    match local.first() {
        Some(&first) => (first, local.len() > 1),
        None => (global, false),
    }
}

fn mass_from_scale(p: &ExpansionParams, u: f64) -> f64 {
    p.rho() * u.exp() / (1.0 + 2.0 * p.epsilon())
}

/// Maximizes the optimal-mode entropy over the mass.
///
/// The outer variable is `u = ln(m(1+2ε)/ρ)` on `[ln 1e-8, ln 1e2]`: a 41-point
/// scan followed by golden-section around the best point.
pub fn max_entanglement(p: &ExpansionParams) -> Result<MaxEntanglement> {
    let (u_lo, u_hi) = (MASS_SCALE_RANGE.0.ln(), MASS_SCALE_RANGE.1.ln());
    let peak = |u: f64| -> Result<f64> {
        match optimal_k(p, mass_from_scale(p, u)) {
            Ok(mode) => Ok(mode.entropy_at_peak),
            Err(Error::FlatEntropy { .. }) => Ok(0.0),
            Err(e) => Err(e),
        }
    };
    let us: Vec<f64> = (0..OUTER_SCAN_POINTS)
        .map(|i| u_lo + (u_hi - u_lo) * i as f64 / (OUTER_SCAN_POINTS - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(us.len());
    for &u in &us {
        values.push(peak(u)?);
    }
    let i = (0..values.len()).fold(0, |b, j| if values[j] > values[b] { j } else { b });
    if values[i] < FLAT_ENTROPY {
        return Err(Error::FlatEntropy { peak: values[i] });
    }

    let a = us[i.saturating_sub(1)];
    let b = us[(i + 1).min(us.len() - 1)];
    let (mut u, mut s, _) = golden_max(|u| peak(u).unwrap_or(0.0), a, b, 1e-6);
    if values[i] >= s {
        u = us[i];
        s = values[i];
    }
    let mass = mass_from_scale(p, u);
    let mode = optimal_k(p, mass)?;
    Ok(MaxEntanglement {
        mass,
        k_star: mode.k_star,
        s_max: s.max(mode.entropy_at_peak),
        expansion: *p,
        at_mass_floor: u <= us[1],
    })
}

/// `S_E^max(ε)`. It does not depend on `ρ`; `ρ = 1` is used.
pub fn s_max(epsilon: f64) -> Result<f64> {
    Ok(max_entanglement(&ExpansionParams::new(epsilon, 1.0)?)?.s_max)
}

fn strictly_monotone(values: &[f64]) -> Option<bool> {
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    match (increasing, decreasing) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

/// Inverts `k*(ρ) = k_observed` at fixed mass and reference `ε`.
///
/// `k*(ρ)` is sampled at 8 log-spaced points of the bracket and must be
/// strictly monotone there. The root is found by bisection on `ln ρ`.
pub fn estimate_rho(
    mass: f64,
    k_observed: f64,
    epsilon_ref: f64,
    bracket: (f64, f64),
) -> Result<EstimationResult> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(invalid("mass", mass, "must be finite and > 0"));
    }
    if !(k_observed.is_finite() && k_observed > 0.0) {
        return Err(invalid("k_observed", k_observed, "must be finite and > 0"));
    }
    ExpansionParams::new(epsilon_ref, 1.0)?;
    let (lo, hi) = bracket;
    if !(lo.is_finite() && lo > 0.0) {
        return Err(invalid("rho_lo", lo, "must be finite and > 0"));
    }
    if !(hi.is_finite() && hi > lo) {
        return Err(invalid("rho_hi", hi, "must be finite and > rho_lo"));
    }

    let k_star = |rho: f64| -> Result<f64> {
        Ok(optimal_k(&ExpansionParams::new(epsilon_ref, rho)?, mass)?.k_star)
    };
    let rhos = logspace(lo, hi, MONOTONE_SAMPLES);
    let mut ks = Vec::with_capacity(rhos.len());
    for &r in &rhos {
        ks.push(k_star(r)?);
    }
    let increasing = strictly_monotone(&ks).ok_or_else(|| Error::NotMonotone {
        what: format!("optimal k over rho in [{lo}, {hi}]"),
    })?;
    let (k_lo, k_hi) = if increasing {
        (ks[0], ks[ks.len() - 1])
    } else {
        (ks[ks.len() - 1], ks[0])
    };
    if !(k_observed >= k_lo && k_observed <= k_hi) {
        return Err(Error::BracketFailure {
            target: k_observed,
            lo_value: k_lo,
            hi_value: k_hi,
        });
    }

    // start from the sample cell that contains the target
    let cell = (0..rhos.len() - 1)
        .find(|&j| {
            let (a, b) = (ks[j].min(ks[j + 1]), ks[j].max(ks[j + 1]));
            k_observed >= a && k_observed <= b
        })
        .unwrap_or(0);
    let (a, b) = (rhos[cell].ln(), rhos[cell + 1].ln());
    let target = k_observed.ln();
    // failures inside an already-validated bracket are mapped to NaN, which
    // bisect treats as "not positive"
    let g = |lr: f64| k_star(lr.exp()).map(|k| k.ln() - target).unwrap_or(f64::NAN);
    let (lr, iterations, (ba, bb)) = bisect(g, a, b, RHO_REL_TOL);
    let estimate = lr.exp();
    let residual = (k_star(estimate)? / k_observed - 1.0).abs();
    Ok(EstimationResult {
        estimate,
        bracket: (ba.exp(), bb.exp()),
        residual,
        iterations,
    })
}

/// Smallest `ε` whose maximum achievable entanglement reaches `s_observed`.
///
/// Any `ε` compatible with an optimal-mode entropy `s_observed` satisfies
/// `ε ≥` the returned estimate.
pub fn epsilon_lower_bound(s_observed: f64) -> Result<EstimationResult> {
    if !(0.0..1.0).contains(&s_observed) {
        return Err(invalid("entropy", s_observed, "must lie in [0, 1)"));
    }
    if s_observed == 0.0 {
        return Ok(EstimationResult {
            estimate: 0.0,
            bracket: (0.0, 0.0),
            residual: 0.0,
            iterations: 0,
        });
    }
    let s_hi = s_max(EPSILON_UPPER)?;
    if s_observed >= s_hi {
        return Err(Error::UpperBracketExhausted {
            target: s_observed,
            epsilon_max: EPSILON_UPPER,
        });
    }
    let mut lo = EPSILON_LOWER_START;
    let mut s_lo = s_max(lo)?;
    while s_lo > s_observed {
        if lo <= EPSILON_LOWER_LIMIT {
            return Err(Error::BracketFailure {
                target: s_observed,
                lo_value: s_lo,
                hi_value: s_hi,
            });
        }
        lo *= 1e-2;
        s_lo = s_max(lo)?;
    }

    let eps = logspace(lo, EPSILON_UPPER, MONOTONE_SAMPLES);
    let mut values = Vec::with_capacity(eps.len());
    for &e in &eps {
        values.push(s_max(e)?);
    }
    if strictly_monotone(&values) != Some(true) {
        return Err(Error::NotMonotone {
            what: format!("maximum entanglement over epsilon in [{lo:e}, {EPSILON_UPPER:e}]"),
        });
    }
    let cell = (0..eps.len() - 1)
        .find(|&j| s_observed >= values[j] && s_observed <= values[j + 1])
        .unwrap_or(0);
    let g = |le: f64| s_max(le.exp()).map(|s| s - s_observed).unwrap_or(f64::NAN);
    let (le, iterations, (ba, bb)) = bisect(g, eps[cell].ln(), eps[cell + 1].ln(), EPSILON_REL_TOL);
    let estimate = le.exp();
    Ok(EstimationResult {
        estimate,
        bracket: (ba.exp(), bb.exp()),
        residual: (s_max(estimate)? - s_observed).abs(),
        iterations,
    })
}
