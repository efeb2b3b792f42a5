//! Entanglement between particle and antiparticle field modes generated by a
//! 2-D Robertson-Walker universe with scale factor
//! `C(η) = (1 + ε(1 + tanh ρη))²`, for Dirac and scalar fields, and the
//! inversion of that entanglement into the expansion parameters.
//!
//! * [`spectrum`]: parameter types and asymptotic frequencies.
//! * [`bogoliubov`]: closed-form |β/α|² ratios in the log domain.
//! * [`entanglement`]: von Neumann entropies of the reduced states.
//! * [`modeevolution`]: ODE oracle extracting Bogoliubov coefficients numerically.
//! * [`estimation`]: optimal-mode search and the ρ / ε estimation protocols.

pub mod bogoliubov;
pub mod entanglement;
pub mod error;
pub mod estimation;
pub mod modeevolution;
mod ode;
mod optimize;
pub mod spectrum;

pub use bogoliubov::{gamma_sq, gamma_sq_boson, gamma_sq_fermion, GammaSq, Statistics};
pub use entanglement::{entropy_boson, entropy_fermion, sample, EntropySample, ReducedState};
pub use error::{Error, Result};
pub use spectrum::{spectrum, ExpansionParams, ModeParams, Spectrum};
