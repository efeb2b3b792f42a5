//! Expansion and mode parameters, the tanh scale factor, and the closed-form
//! in/out frequencies derived from them.
//!
//! The conformal factor interpolates between two flat regions,
//! `C(η) = (1 + ε(1 + tanh ρη))²`, so `C(−∞) = 1` and `C(+∞) = (1 + 2ε)²`.

use crate::error::{Error, Result};

/// Volume (`epsilon`) and rapidity (`rho`) of the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionParams {
    epsilon: f64,
    rho: f64,
}

impl ExpansionParams {
    pub fn new(epsilon: f64, rho: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "must be finite and > 0",
            });
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self { epsilon, rho })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `√C(η) = 1 + ε(1 + tanh ρη)`.
    pub fn conformal_root(&self, eta: f64) -> f64 {
        1.0 + self.epsilon * one_plus_tanh(self.rho * eta)
    }

    /// `d√C/dη = ερ sech²(ρη)`.
    pub fn conformal_root_derivative(&self, eta: f64) -> f64 {
        self.epsilon * self.rho * sech_sq(self.rho * eta)
    }
}

/// Field mass and mode momentum magnitude |k|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    mass: f64,
    k: f64,
}

impl ModeParams {
    pub fn new(mass: f64, k: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass,
                reason: "must be finite and >= 0",
            });
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self { mass, k })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Asymptotic frequencies and masses for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub k: f64,
    pub mu_in: f64,
    pub mu_out: f64,
    pub omega_in: f64,
    pub omega_out: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// `m²(2ε+1)² − ρ²`. Negative values mean ω̄ is imaginary.
    pub omega_bar_sq: f64,
    /// `m·ε`, equal to `(μ_out − μ_in)/2`.
    pub mass_epsilon: f64,
}

impl Spectrum {
    /// `ω_out − μ_out = k²/(ω_out + μ_out)`.
    pub fn omega_out_minus_mu_out(&self) -> f64 {
        self.k * self.k / (self.omega_out + self.mu_out)
    }

    /// `ω_in − μ_in = k²/(ω_in + μ_in)`.
    pub fn omega_in_minus_mu_in(&self) -> f64 {
        self.k * self.k / (self.omega_in + self.mu_in)
    }

    /// `ω_− − mε`, strictly negative for `m·ε > 0`.
    ///
    /// Since `ω_out − ω_in < μ_out − μ_in`, the direct difference cancels
    /// badly at small k; this form has no subtraction.
    pub fn omega_minus_less_mass_epsilon(&self) -> f64 {
        -self.mass_epsilon * (self.omega_out_minus_mu_out() + self.omega_in_minus_mu_in())
            / (self.omega_out + self.omega_in)
    }

    /// `ω₊ − mε = ((ω_out − μ_out) + ω_in + μ_in)/2`, positive and free of the
    /// cancellation that `ω₊ − mε` suffers at large ε.
    pub fn omega_plus_less_mass_epsilon(&self) -> f64 {
        0.5 * (self.omega_out_minus_mu_out() + self.omega_in + self.mu_in)
    }
}

/// `1 + tanh x` without cancellation for large negative `x`.
fn one_plus_tanh(x: f64) -> f64 {
    // 1 + tanh x = 2 / (1 + e^{-2x})
    if x >= 0.0 {
        1.0 + x.tanh()
    } else {
        let e = (2.0 * x).exp();
        2.0 * e / (1.0 + e)
    }
}

fn sech_sq(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// `C(η) = (1 + ε(1 + tanh ρη))²`.
pub fn scale_factor(eta: f64, p: &ExpansionParams) -> f64 {
    let a = p.conformal_root(eta);
    a * a
}

/// `dC/dη = 2(1 + ε(1 + tanh ρη))·ερ·sech²(ρη)`.
pub fn scale_factor_derivative(eta: f64, p: &ExpansionParams) -> f64 {
    2.0 * p.conformal_root(eta) * p.conformal_root_derivative(eta)
}

pub fn spectrum(p: &ExpansionParams, mp: &ModeParams) -> Spectrum {
    let m = mp.mass();
    let k = mp.k();
    let eps = p.epsilon();
    let rho = p.rho();

    let mass_epsilon = m * eps;
    let mu_in = m;
    let mu_out = m * (1.0 + 2.0 * eps);
    let omega_in = k.hypot(mu_in);
    let omega_out = k.hypot(mu_out);
    // (ω_out − ω_in)/2 = mε(μ_out + μ_in)/(ω_out + ω_in)
    let omega_minus = mass_epsilon * (mu_out + mu_in) / (omega_out + omega_in);
    let omega_plus = 0.5 * (omega_out + omega_in);
    let omega_bar_sq = mu_out * mu_out - rho * rho;

    Spectrum {
        k,
        mu_in,
        mu_out,
        omega_in,
        omega_out,
        omega_plus,
        omega_minus,
        omega_bar_sq,
        mass_epsilon,
    }
}
