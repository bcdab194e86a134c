//! Stochastic simulator for the Brownian motion of a rod-like particle.
//!
//! The rod is a prolate top with anisotropic translational friction
//! `gamma_par u u + gamma_perp (1 - u u)` and angular friction `gamma_rot`
//! acting on the transverse angular velocity. The crate provides
//!
//! - exact algebra of the anisotropic friction tensor (powers, the
//!   translational Green function) in [`friction`],
//! - classical white noise at the fluctuation-dissipation strengths and
//!   quantum colored noise with the Ohmic coth spectrum under a frequency
//!   cutoff, synthesized spectrally, in [`noise`],
//! - inertial (exact Ornstein-Uhlenbeck) and overdamped integrators with
//!   sphere-preserving orientation updates in [`dynamics`],
//! - ensemble estimators and the closed-form / quadrature oracles they are
//!   validated against in [`observables`],
//! - reproducible parallel ensembles in [`ensemble`].
//!
//! Reduced units (`k_b = hbar = 1`) are the default throughout.

pub mod dynamics;
pub mod ensemble;
pub mod friction;
pub mod noise;
pub mod observables;
pub mod params;
pub mod quad;
pub mod rng;
pub mod vec3;

pub use params::{
    equilibrium_initial_state, validate_params, BathParams, CutoffShape, ParamError, Regime,
    RodParams, RodState, ValidatedParams,
};
pub use rng::{RngStream, SimRng};
pub use vec3::Vec3;
