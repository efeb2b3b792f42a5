//! Numerical mode evolution across the expansion, used as an oracle for the
//! closed-form ratios.
//!
//! Boson modes obey `χ'' + (k² + m²C)χ = 0`. Fermion modes obey
//! `φ'' + (k² + m²C ± i m a')φ = 0` with `a = √C`; the minus branch is the one
//! that feeds the fermionic ratio. Integration starts from the in-region
//! positive-frequency wave at `η = −T` and the result is projected onto
//! `e^{∓iω_out η}` at `η = +T`.

use num_complex::Complex64;

use crate::bogoliubov::Statistics;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, State};
use crate::spectrum::{spectrum, ExpansionParams, ModeParams};

/// Smallest allowed `ρT`: beyond it `1 − tanh ρT < 5e-18`.
pub const MIN_RHO_T: f64 = 20.0;
/// `ρT` used by [`oracle_gamma_sq`].
pub const DEFAULT_RHO_T: f64 = 25.0;
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_STEPS: usize = 20_000_000;
/// Ratios below this compare absolutely rather than relatively.
pub const ABSOLUTE_FLOOR: f64 = 1e-6;

/// Axis values of the default `3⁴` comparison grid.
pub const GRID_EPSILON: [f64; 3] = [0.5, 1.0, 2.0];
pub const GRID_RHO: [f64; 3] = [0.5, 1.0, 5.0];
pub const GRID_MASS: [f64; 3] = [0.5, 1.0, 2.0];
pub const GRID_K: [f64; 3] = [0.3, 0.7, 1.5];

/// `(ε, ρ, m, k)` points of the default comparison grid, `ε` slowest.
pub fn default_grid() -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::with_capacity(81);
    for &e in &GRID_EPSILON {
        for &r in &GRID_RHO {
            for &m in &GRID_MASS {
                for &k in &GRID_K {
                    out.push((e, r, m, k));
                }
            }
        }
    }
    out
}

/// Sign of the imaginary coupling in the fermionic mode equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    eta_grid: Vec<f64>,
    phi: Vec<Complex64>,
    dphi: Vec<Complex64>,
}

impl ModeTrajectory {
    /// Checks the grid is strictly increasing, the lengths agree and every
    /// entry is finite.
    pub fn new(eta_grid: Vec<f64>, phi: Vec<Complex64>, dphi: Vec<Complex64>) -> Result<Self> {
        let n = eta_grid.len();
        if n == 0 || phi.len() != n || dphi.len() != n {
            return Err(Error::InvalidParameter {
                name: "trajectory",
                value: n as f64,
                reason: "grid, phi and dphi must be non-empty and of equal length",
            });
        }
        if eta_grid.windows(2).any(|w| !(w[1] > w[0])) || eta_grid.iter().any(|e| !e.is_finite())
        {
            return Err(Error::InvalidParameter {
                name: "eta_grid",
                value: n as f64,
                reason: "must be finite and strictly increasing",
            });
        }
        if phi.iter().chain(dphi.iter()).any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: f64::NAN,
                reason: "non-finite mode value",
            });
        }
        Ok(Self {
            eta_grid,
            phi,
            dphi,
        })
    }

    pub fn eta_grid(&self) -> &[f64] {
        &self.eta_grid
    }

    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }

    pub fn dphi(&self) -> &[Complex64] {
        &self.dphi
    }

    fn end(&self) -> (f64, Complex64, Complex64) {
        let i = self.eta_grid.len() - 1;
        (self.eta_grid[i], self.phi[i], self.dphi[i])
    }
}

/// Out-region coefficients of an evolved in-mode, normalized by the flux
/// ratio so that bosons satisfy `|α|² − |β|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub statistics: Statistics,
    pub branch: Branch,
    /// Relative residual of reconstructing `(φ, φ')` at the matching point.
    pub residual: f64,
}

impl BogoliubovPair {
    pub fn ratio_sq(&self) -> f64 {
        self.beta.norm_sqr() / self.alpha.norm_sqr()
    }

    pub fn wronskian(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }
}

fn check_integration(p: &ExpansionParams, t: f64, tol: f64) -> Result<()> {
    if !(t.is_finite() && p.rho() * t >= MIN_RHO_T) {
        return Err(Error::InvalidParameter {
            name: "T",
            value: t,
            reason: "rho*T must be at least 20",
        });
    }
    if !(tol > 1e-13 && tol < 1e-3) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must lie in (1e-13, 1e-3)",
        });
    }
    Ok(())
}

/// The in-region positive-frequency wave `e^{−iω_in η}` and its derivative at `η`.
pub fn in_wave(p: &ExpansionParams, mp: &ModeParams, eta: f64) -> [Complex64; 2] {
    let w = spectrum(p, mp).omega_in;
    let phi = Complex64::from_polar(1.0, -w * eta);
    [phi, Complex64::new(0.0, -w) * phi]
}

/// Integrates from `η = −T` to `η = +T` starting from the in-region wave.
pub fn integrate_mode(
    p: &ExpansionParams,
    mp: &ModeParams,
    statistics: Statistics,
    branch: Branch,
    t: f64,
    tol: f64,
) -> Result<ModeTrajectory> {
    integrate_mode_from(p, mp, statistics, branch, t, tol, in_wave(p, mp, -t))
}

/// As [`integrate_mode`], with an explicit `(φ(−T), φ'(−T))`.
pub fn integrate_mode_from(
    p: &ExpansionParams,
    mp: &ModeParams,
    statistics: Statistics,
    branch: Branch,
    t: f64,
    tol: f64,
    initial: [Complex64; 2],
) -> Result<ModeTrajectory> {
    check_integration(p, t, tol)?;
    let m = mp.mass();
    let k2 = mp.k() * mp.k();
    let p = *p;
    let sign = match (statistics, branch) {
        (Statistics::Boson, _) => 0.0,
        (Statistics::Fermion, Branch::Plus) => 1.0,
        (Statistics::Fermion, Branch::Minus) => -1.0,
    };
    let rhs = move |eta: f64, y: &State| -> State {
        let a = p.conformal_root(eta);
        let re = k2 + m * m * a * a;
        let im = sign * m * p.conformal_root_derivative(eta);
        [y[1], -Complex64::new(re, im) * y[0]]
    };
    let sol = Dopri5 {
        tol,
        max_steps: MAX_STEPS,
    }
    .solve(rhs, -t, t, initial)?;
    let (phi, dphi) = sol.y.iter().map(|s| (s[0], s[1])).unzip();
    ModeTrajectory::new(sol.t, phi, dphi)
}

/// Projects the trajectory endpoint onto `{e^{−iω_out η}, e^{+iω_out η}}`.
pub fn match_out(
    traj: &ModeTrajectory,
    p: &ExpansionParams,
    mp: &ModeParams,
    statistics: Statistics,
    branch: Branch,
) -> Result<BogoliubovPair> {
    let s = spectrum(p, mp);
    let w = s.omega_out;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::IllConditionedBasis { omega_out: w });
    }
    let (eta, phi, dphi) = traj.end();
    let i = Complex64::i();
    let plus = Complex64::from_polar(1.0, -w * eta);
    let minus = plus.conj();
    let a = 0.5 * (phi + i * dphi / w) / plus;
    let b = 0.5 * (phi - i * dphi / w) / minus;

    let phi_back = a * plus + b * minus;
    let dphi_back = -i * w * (a * plus - b * minus);
    let scale = phi.norm() + dphi.norm() / w;
    let residual = ((phi_back - phi).norm() + (dphi_back - dphi).norm() / w) / scale.max(1e-300);

    let flux = (w / s.omega_in).sqrt();
    Ok(BogoliubovPair {
        alpha: a * flux,
        beta: b * flux,
        statistics,
        branch,
        residual,
    })
}

/// Integrates with `ρT = 25`, `tol = 1e-10` and returns the matched pair.
pub fn oracle_pair(
    p: &ExpansionParams,
    mp: &ModeParams,
    statistics: Statistics,
) -> Result<BogoliubovPair> {
    oracle_pair_with(p, mp, statistics, DEFAULT_RHO_T / p.rho(), DEFAULT_TOL)
}

pub fn oracle_pair_with(
    p: &ExpansionParams,
    mp: &ModeParams,
    statistics: Statistics,
    t: f64,
    tol: f64,
) -> Result<BogoliubovPair> {
    let branch = Branch::Minus;
    let traj = integrate_mode(p, mp, statistics, branch, t, tol)?;
    match_out(&traj, p, mp, statistics, branch)
}

/// `|β/α|²` from the ODE, times `k²/(ω_out+μ_out)²` for fermions, so it is
/// directly comparable with [`crate::bogoliubov::gamma_sq`].
pub fn oracle_gamma_sq(p: &ExpansionParams, mp: &ModeParams, statistics: Statistics) -> Result<f64> {
    oracle_gamma_sq_with(p, mp, statistics, DEFAULT_RHO_T / p.rho(), DEFAULT_TOL)
}

pub fn oracle_gamma_sq_with(
    p: &ExpansionParams,
    mp: &ModeParams,
    statistics: Statistics,
    t: f64,
    tol: f64,
) -> Result<f64> {
    let pair = oracle_pair_with(p, mp, statistics, t, tol)?;
    Ok(match statistics {
        Statistics::Boson => pair.ratio_sq(),
        Statistics::Fermion => {
            let s = spectrum(p, mp);
            let chi = s.k / (s.omega_out + s.mu_out);
            pair.ratio_sq() * chi * chi
        }
    })
}

/// Relative error, switching to absolute when both values are below
/// [`ABSOLUTE_FLOOR`].
pub fn comparison_error(oracle: f64, closed_form: f64) -> f64 {
    let diff = (oracle - closed_form).abs();
    if oracle.abs().max(closed_form.abs()) < ABSOLUTE_FLOOR {
        diff
    } else {
        diff / closed_form.abs()
    }
}

/// Whether [`comparison_error`] is within `rel_tol` (or `1e-8` absolutely
/// below the floor).
pub fn agrees(oracle: f64, closed_form: f64, rel_tol: f64) -> bool {
    let err = comparison_error(oracle, closed_form);
    if oracle.abs().max(closed_form.abs()) < ABSOLUTE_FLOOR {
        err <= 1e-8
    } else {
        err <= rel_tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::gamma_sq;
    use std::f64::consts::PI;

    fn params(e: f64, r: f64, m: f64, k: f64) -> (ExpansionParams, ModeParams) {
        (
            ExpansionParams::new(e, r).unwrap(),
            ModeParams::new(m, k).unwrap(),
        )
    }

    /// Closed-form scalar ratio with the radicand `4m²ε² − ρ²` that the
    /// Klein-Gordon equation itself produces.
    fn kg_boson(e: f64, r: f64, m: f64, k: f64) -> f64 {
        let mu_out = m * (1.0 + 2.0 * e);
        let wi = k.hypot(m);
        let wo = k.hypot(mu_out);
        let (wp, wm) = ((wo + wi) / 2.0, (wo - wi) / 2.0);
        let a = PI / r;
        let ob2 = 4.0 * m * m * e * e - r * r;
        let c = if ob2 >= 0.0 {
            (a * ob2.sqrt()).cosh()
        } else {
            (a * (-ob2).sqrt()).cos()
        };
        (c + (2.0 * a * wm).cosh()) / (c + (2.0 * a * wp).cosh())
    }

    #[test]
    fn static_limit_is_plane_wave() {
        let (p, mp) = params(1e-12, 1.0, 1.0, 1.0);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let traj = integrate_mode(&p, &mp, stats, Branch::Minus, 25.0, 1e-11).unwrap();
            let (_, phi, _) = traj.end();
            assert!((phi.norm() - 1.0).abs() < 1e-8, "{}", phi.norm());
            let pair = match_out(&traj, &p, &mp, stats, Branch::Minus).unwrap();
            assert!(pair.beta.norm() < 1e-8);
        }
    }

    #[test]
    fn trajectory_invariants() {
        let (p, mp) = params(1.0, 1.0, 1.0, 1.0);
        let traj = integrate_mode(&p, &mp, Statistics::Boson, Branch::Minus, 25.0, 1e-9).unwrap();
        assert_eq!(traj.eta_grid()[0], -25.0);
        assert_eq!(*traj.eta_grid().last().unwrap(), 25.0);
        assert_eq!(traj.phi().len(), traj.eta_grid().len());
        assert_eq!(traj.dphi().len(), traj.eta_grid().len());
    }

    #[test]
    fn rejects_short_window_and_bad_tolerance() {
        let (p, mp) = params(1.0, 2.0, 1.0, 1.0);
        let r = integrate_mode(&p, &mp, Statistics::Boson, Branch::Minus, 9.0, 1e-8);
        assert!(matches!(r, Err(Error::InvalidParameter { name: "T", .. })));
        for tol in [1e-14, 1e-3, 0.0, f64::NAN] {
            let r = integrate_mode(&p, &mp, Statistics::Boson, Branch::Minus, 12.5, tol);
            assert!(matches!(r, Err(Error::InvalidParameter { name: "tol", .. })));
        }
    }

    #[test]
    fn trajectory_validation() {
        let z = Complex64::new(1.0, 0.0);
        assert!(ModeTrajectory::new(vec![0.0, 0.0], vec![z, z], vec![z, z]).is_err());
        assert!(ModeTrajectory::new(vec![0.0, 1.0], vec![z], vec![z, z]).is_err());
        let nan = Complex64::new(f64::NAN, 0.0);
        assert!(ModeTrajectory::new(vec![0.0, 1.0], vec![z, nan], vec![z, z]).is_err());
        assert!(ModeTrajectory::new(vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn unit_point_boson() {
        let (p, mp) = params(1.0, 1.0, 1.0, 1.0);
        let pair = oracle_pair_with(&p, &mp, Statistics::Boson, 25.0, 1e-11).unwrap();
        assert!((pair.wronskian() - 1.0).abs() < 1e-8, "{}", pair.wronskian());
        assert!(pair.residual < 1e-10);
        let kg = kg_boson(1.0, 1.0, 1.0, 1.0);
        assert!(((pair.ratio_sq() - kg) / kg).abs() < 1e-4, "{} {kg}", pair.ratio_sq());
        // 50-digit value of the Klein-Gordon-consistent closed form
        assert!(((kg - 2.698_701_372_689_001_8e-4) / kg).abs() < 1e-12);
    }

    #[test]
    fn fermion_matches_closed_form() {
        for &(e, r, m, k) in &[(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.0, 0.7), (1.0, 5.0, 2.0, 1.0)] {
            let (p, mp) = params(e, r, m, k);
            let o = oracle_gamma_sq(&p, &mp, Statistics::Fermion).unwrap();
            let c = gamma_sq(&p, &mp, Statistics::Fermion).value();
            assert!(comparison_error(o, c) < 1e-3, "{e} {r} {m} {k}: {o} {c}");
            assert!(agrees(o, c, 1e-3));
        }
    }

    #[test]
    fn fermion_plus_branch_differs() {
        let (p, mp) = params(1.0, 1.0, 1.0, 1.0);
        let traj = integrate_mode(&p, &mp, Statistics::Fermion, Branch::Plus, 25.0, 1e-10).unwrap();
        let plus = match_out(&traj, &p, &mp, Statistics::Fermion, Branch::Plus).unwrap();
        let minus = oracle_pair(&p, &mp, Statistics::Fermion).unwrap();
        assert_eq!(plus.branch, Branch::Plus);
        assert!((plus.ratio_sq() - minus.ratio_sq()).abs() > 1e-3 * minus.ratio_sq());
    }

    #[test]
    fn boson_ode_follows_klein_gordon_radicand() {
        for &(e, r, m, k) in &[(2.0, 0.5, 1.0, 0.7), (1.0, 5.0, 2.0, 1.0), (0.3, 2.0, 0.5, 0.4)] {
            let (p, mp) = params(e, r, m, k);
            let pair = oracle_pair(&p, &mp, Statistics::Boson).unwrap();
            assert!((pair.wronskian() - 1.0).abs() < 1e-6);
            let kg = kg_boson(e, r, m, k);
            assert!(agrees(pair.ratio_sq(), kg, 1e-6), "{e} {r} {m} {k}: {} {kg}", pair.ratio_sq());
        }
    }

    #[test]
    fn boson_closed_form_departs_from_ode() {
        // The closed form keeps the radicand m²(2ε+1)² − ρ²; the ODE does not.
        let (p, mp) = params(1.0, 1.0, 1.0, 1.0);
        let o = oracle_gamma_sq(&p, &mp, Statistics::Boson).unwrap();
        let c = gamma_sq(&p, &mp, Statistics::Boson).value();
        assert!(comparison_error(o, c) > 0.9, "{o} {c}");
    }

    #[test]
    fn pure_out_waves_match_trivially() {
        let (p, mp) = params(1.0, 1.0, 1.0, 2.0);
        let w = spectrum(&p, &mp).omega_out;
        let eta = vec![-1.0, 3.0];
        let i = Complex64::i();
        let wave = |sign: f64, x: f64| Complex64::from_polar(1.0, -sign * w * x);
        let norm = (spectrum(&p, &mp).omega_in / w).sqrt();

        let phi = eta.iter().map(|&x| wave(1.0, x)).collect();
        let dphi = eta.iter().map(|&x| -i * w * wave(1.0, x)).collect();
        let traj = ModeTrajectory::new(eta.clone(), phi, dphi).unwrap();
        let pair = match_out(&traj, &p, &mp, Statistics::Boson, Branch::Minus).unwrap();
        assert!((pair.alpha * norm - 1.0).norm() < 1e-14);
        assert!(pair.beta.norm() < 1e-14);
        assert!(pair.residual < 1e-14);

        let phi = eta.iter().map(|&x| wave(-1.0, x)).collect();
        let dphi = eta.iter().map(|&x| i * w * wave(-1.0, x)).collect();
        let traj = ModeTrajectory::new(eta, phi, dphi).unwrap();
        let pair = match_out(&traj, &p, &mp, Statistics::Boson, Branch::Minus).unwrap();
        assert!(pair.alpha.norm() < 1e-14);
        assert!((pair.beta * norm - 1.0).norm() < 1e-14);
    }

    #[test]
    fn ratio_is_phase_independent() {
        let (p, mp) = params(1.0, 1.0, 1.0, 1.0);
        let t = 25.0;
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let base = oracle_pair_with(&p, &mp, stats, t, 1e-10).unwrap().ratio_sq();
            for theta in [0.3, 2.0, -1.1] {
                let u = Complex64::from_polar(1.0, theta);
                let w = in_wave(&p, &mp, -t);
                let traj =
                    integrate_mode_from(&p, &mp, stats, Branch::Minus, t, 1e-10, [w[0] * u, w[1] * u])
                        .unwrap();
                let r = match_out(&traj, &p, &mp, stats, Branch::Minus).unwrap().ratio_sq();
                assert!(((r - base) / base).abs() < 1e-10, "{theta}: {r} {base}");
            }
        }
    }

    #[test]
    fn independent_of_window() {
        for &(e, r, m, k) in &[(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.0, 0.7)] {
            let (p, mp) = params(e, r, m, k);
            for stats in [Statistics::Boson, Statistics::Fermion] {
                let t = 20.0 / r;
                let a = oracle_gamma_sq_with(&p, &mp, stats, t, 1e-11).unwrap();
                let b = oracle_gamma_sq_with(&p, &mp, stats, 1.5 * t, 1e-11).unwrap();
                assert!(((a - b) / b).abs() < 1e-6, "{e} {r} {m} {k}: {a} {b}");
            }
        }
    }

    #[test]
    fn tightening_tolerance_converges() {
        for &(e, r, m, k) in &[(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.0, 0.7), (1.0, 5.0, 2.0, 1.0)] {
            let (p, mp) = params(e, r, m, k);
            let c = gamma_sq(&p, &mp, Statistics::Fermion).value();
            let errs: Vec<f64> = [1e-4, 1e-6, 1e-8]
                .iter()
                .map(|&tol| {
                    let o = oracle_gamma_sq_with(&p, &mp, Statistics::Fermion, 25.0 / r, tol).unwrap();
                    comparison_error(o, c)
                })
                .collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "{e} {r} {m} {k}: {errs:?}");
        }
    }

    #[test]
    fn massless_ratio_vanishes() {
        let (p, mp) = params(1.0, 1.0, 0.0, 1.0);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            assert!(oracle_gamma_sq(&p, &mp, stats).unwrap() < 1e-8);
        }
    }

    #[test]
    fn comparison_switches_to_absolute() {
        assert_eq!(comparison_error(2e-9, 1e-9), 1e-9);
        assert!(agrees(2e-9, 1e-9, 1e-3));
        assert!(!agrees(1.1, 1.0, 1e-3));
        assert!((comparison_error(1.001, 1.0) - 1e-3).abs() < 1e-12);
    }
}
