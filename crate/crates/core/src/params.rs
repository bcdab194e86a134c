//! Physical parameters of the rod and of the surrounding bath, state of a
//! single rod, and parameter validation.
//!
//! Reduced units are the default: `k_b = 1` and `hbar = 1`, both overridable.
//! The rod is a prolate top; spin about its own axis is disregarded, so the
//! angular velocity always lies in the plane perpendicular to the axis vector.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vec3::{transverse_frame, Vec3};

/// Mechanical identity of the rod. The moment of inertia is always derived
/// from mass and length, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodParams {
    pub mass: f64,
    pub length: f64,
}

impl RodParams {
    pub fn new(mass: f64, length: f64) -> Self {
        RodParams { mass, length }
    }

    /// I = M l^2 / 12, the transverse moment of inertia of a thin rod.
    pub fn moment_of_inertia(&self) -> f64 {
        self.mass * self.length * self.length / 12.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Classical,
    Quantum,
}

/// Shape of the frequency cutoff regularizing the Ohmic spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffShape {
    /// Spectrum vanishes above the cutoff frequency.
    Sharp,
    /// Spectrum damped by exp(-omega/omega_c); no hard upper edge.
    Exponential,
}

impl Default for CutoffShape {
    fn default() -> Self {
        CutoffShape::Sharp
    }
}

fn one() -> f64 {
    1.0
}

/// Bath temperature, friction coefficients and physical constants.
///
/// `gamma_par` and `gamma_perp` are the translational frictions along and
/// across the rod axis (mass/time); `gamma_rot` is the angular friction
/// (mass.length^2/time). The microscopic field couplings enter only through
/// these effective frictions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathParams {
    pub temperature: f64,
    pub gamma_par: f64,
    pub gamma_perp: f64,
    pub gamma_rot: f64,
    #[serde(default = "one")]
    pub k_b: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    /// Cutoff frequency, required in the quantum regime.
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub cutoff_shape: CutoffShape,
    pub regime: Regime,
}

impl BathParams {
    /// Classical bath in reduced units (k_b = hbar = 1).
    pub fn classical(temperature: f64, gamma_par: f64, gamma_perp: f64, gamma_rot: f64) -> Self {
        BathParams {
            temperature,
            gamma_par,
            gamma_perp,
            gamma_rot,
            k_b: 1.0,
            hbar: 1.0,
            cutoff: None,
            cutoff_shape: CutoffShape::Sharp,
            regime: Regime::Classical,
        }
    }

    /// Quantum bath with a sharp cutoff, in reduced units.
    pub fn quantum(
        temperature: f64,
        gamma_par: f64,
        gamma_perp: f64,
        gamma_rot: f64,
        cutoff: f64,
    ) -> Self {
        BathParams {
            temperature,
            gamma_par,
            gamma_perp,
            gamma_rot,
            k_b: 1.0,
            hbar: 1.0,
            cutoff: Some(cutoff),
            cutoff_shape: CutoffShape::Sharp,
            regime: Regime::Quantum,
        }
    }

    /// Thermal energy k_B T.
    pub fn thermal_energy(&self) -> f64 {
        self.k_b * self.temperature
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("parameter `{0}` must be positive")]
    NonPositiveParameter(&'static str),
    #[error("quantum regime requires a cutoff frequency")]
    MissingCutoff,
}

/// Parameter set that has passed validation, with the derived moment of
/// inertia attached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidatedParams {
    pub rod: RodParams,
    pub bath: BathParams,
    pub moment_of_inertia: f64,
}

/// Check every parameter invariant and return the validated set.
///
/// Validation is total: either every invariant holds on the returned value or
/// an error naming the offending field is produced.
pub fn validate_params(rod: &RodParams, bath: &BathParams) -> Result<ValidatedParams, ParamError> {
    use ParamError::NonPositiveParameter;

    if !(rod.mass > 0.0) {
        return Err(NonPositiveParameter("mass"));
    }
    if !(rod.length > 0.0) {
        return Err(NonPositiveParameter("length"));
    }
    if !(bath.gamma_par > 0.0) {
        return Err(NonPositiveParameter("gamma_par"));
    }
    if !(bath.gamma_perp > 0.0) {
        return Err(NonPositiveParameter("gamma_perp"));
    }
    if !(bath.gamma_rot > 0.0) {
        return Err(NonPositiveParameter("gamma_rot"));
    }
    if !(bath.k_b > 0.0) {
        return Err(NonPositiveParameter("k_b"));
    }
    if bath.temperature < 0.0 || bath.temperature.is_nan() {
        return Err(NonPositiveParameter("temperature"));
    }
    match bath.regime {
        Regime::Classical => {
            if !(bath.temperature > 0.0) {
                return Err(NonPositiveParameter("temperature"));
            }
        }
        Regime::Quantum => {
            if !(bath.hbar > 0.0) {
                return Err(NonPositiveParameter("hbar"));
            }
            match bath.cutoff {
                None => return Err(ParamError::MissingCutoff),
                Some(w) if !(w > 0.0) => return Err(NonPositiveParameter("cutoff")),
                Some(_) => {}
            }
        }
    }
    Ok(ValidatedParams {
        rod: *rod,
        bath: *bath,
        moment_of_inertia: rod.moment_of_inertia(),
    })
}

/// Instantaneous state of one rod: center-of-mass position and momentum,
/// axis unit vector, angular velocity and time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodState {
    pub r: Vec3,
    pub p: Vec3,
    pub u: Vec3,
    pub omega: Vec3,
    pub t: f64,
}

/// Tolerance on | |u| - 1 | for a valid state.
pub const UNIT_AXIS_TOL: f64 = 1e-12;
/// Tolerance on |omega . u| for a valid state.
pub const OMEGA_PERP_TOL: f64 = 1e-10;

impl RodState {
    /// State at rest at the origin with the given axis.
    pub fn at_rest(u: Vec3) -> Self {
        RodState {
            r: Vec3::ZERO,
            p: Vec3::ZERO,
            u,
            omega: Vec3::ZERO,
            t: 0.0,
        }
    }

    /// Whether the axis is unit length and the angular velocity transverse,
    /// within the documented tolerances.
    pub fn is_valid(&self) -> bool {
        (self.u.norm() - 1.0).abs() <= UNIT_AXIS_TOL
            && self.omega.dot(self.u).abs() <= OMEGA_PERP_TOL * (1.0 + self.omega.norm())
    }
}

/// Draw an initial state from the classical equilibrium distribution:
/// momentum components Gaussian with variance M k_B T each, angular velocity
/// in the transverse plane with variance k_B T / I per component, axis
/// uniform on the unit sphere, position at the origin.
pub fn equilibrium_initial_state<R: Rng + ?Sized>(
    rod: &RodParams,
    bath: &BathParams,
    rng: &mut R,
) -> RodState {
    let u = Vec3::from(UnitSphere.sample(rng));
    let kt = bath.thermal_energy();
    let sigma_p = (rod.mass * kt).sqrt();
    let p = Vec3::new(
        sigma_p * rng.sample::<f64, _>(StandardNormal),
        sigma_p * rng.sample::<f64, _>(StandardNormal),
        sigma_p * rng.sample::<f64, _>(StandardNormal),
    );
    let sigma_w = (kt / rod.moment_of_inertia()).sqrt();
    let (e1, e2) = transverse_frame(u);
    let omega = e1 * (sigma_w * rng.sample::<f64, _>(StandardNormal))
        + e2 * (sigma_w * rng.sample::<f64, _>(StandardNormal));
    RodState {
        r: Vec3::ZERO,
        p,
        u,
        omega,
        t: 0.0,
    }
}
