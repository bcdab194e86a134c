//! Trajectory propagation.
//!
//! Inertial mode updates momentum and angular velocity with the exact
//! Ornstein-Uhlenbeck transition in the frame of the current axis (one-step
//! mean and variance are exact in distribution for any dt), drifts the
//! position with the pre-step momentum, and rotates the axis by a finite
//! rotation so the unit sphere is preserved to machine precision.
//!
//! Overdamped (Brownian time-scale) mode moves the position through the
//! inverse friction tensor acting on white-noise impulses and rotates the
//! axis by the random angle vector `torque impulse / gamma_rot`; both updates
//! are exact per step for the observables they feed.
//!
//! Quantum (colored-noise) propagation replaces the white impulses with
//! precomputed stationary series and converges weakly as dt -> 0. It runs in
//! the frozen body frame: momentum and angular-velocity components evolve as
//! one-dimensional colored Ornstein-Uhlenbeck maps while the axis stays
//! fixed, which is the regime the colored-noise statistics are defined in.

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::friction::FrictionTensor;
use crate::noise::{
    synthesize_colored_noise, white_force_increment, white_torque_increment, NoiseError,
    NoiseSeries, SpectralDensity,
};
use crate::params::{BathParams, Regime, RodParams, RodState};
use crate::vec3::{rotate_about_axis, transverse_frame, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Inertial,
    Overdamped,
}

/// How the position drift uses the momentum within one inertial step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionScheme {
    /// Drift with the pre-step momentum.
    Euler,
    /// Drift with the average of pre- and post-update momentum.
    Midpoint,
}

impl Default for PositionScheme {
    fn default() -> Self {
        PositionScheme::Euler
    }
}

fn default_record_stride() -> usize {
    10
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub mode: Mode,
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default = "default_record_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub position_scheme: PositionScheme,
}

impl IntegratorConfig {
    pub fn new(mode: Mode, dt: f64, n_steps: usize, record_stride: usize) -> Self {
        IntegratorConfig {
            mode,
            dt,
            n_steps,
            record_stride,
            position_scheme: PositionScheme::Euler,
        }
    }

    /// Check the step size against the mode's stability requirements.
    pub fn validate(&self, rod: &RodParams, bath: &BathParams) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0) {
            return Err(DynamicsError::NonPositiveTimestep);
        }
        if self.record_stride == 0 {
            return Err(DynamicsError::ZeroRecordStride);
        }
        if self.mode == Mode::Inertial {
            let limit = inertial_dt_limit(rod, bath);
            // small slack so boundary values are not lost to roundoff
            if self.dt > limit * (1.0 + 1e-9) {
                return Err(DynamicsError::TimestepTooLarge { dt: self.dt, limit });
            }
        }
        Ok(())
    }
}

/// Momentum and angular-velocity relaxation times (M/gamma_par, M/gamma_perp,
/// I/gamma_rot).
pub fn relaxation_times(rod: &RodParams, bath: &BathParams) -> [f64; 3] {
    [
        rod.mass / bath.gamma_par,
        rod.mass / bath.gamma_perp,
        rod.moment_of_inertia() / bath.gamma_rot,
    ]
}

pub fn max_relaxation_time(rod: &RodParams, bath: &BathParams) -> f64 {
    relaxation_times(rod, bath).into_iter().fold(0.0, f64::max)
}

/// Inertial steps must resolve the fastest relaxation: dt <= 0.1 min(...).
pub fn inertial_dt_limit(rod: &RodParams, bath: &BathParams) -> f64 {
    0.1 * relaxation_times(rod, bath)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("time step must be positive")]
    NonPositiveTimestep,
    #[error("record stride must be at least one")]
    ZeroRecordStride,
    #[error("inertial time step {dt} exceeds the stability bound {limit}")]
    TimestepTooLarge { dt: f64, limit: f64 },
    #[error("quantum propagation supports the inertial mode only")]
    UnsupportedMode,
    #[error("noise series exhausted at step {0}")]
    SeriesExhausted(usize),
    #[error("colored-noise block of {required} steps is too long to synthesize")]
    NoiseBlockTooLong { required: usize },
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Recorded states of one trajectory, every `record_stride` steps starting
/// with the initial state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<RodState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Exact Ornstein-Uhlenbeck momentum update in the frame of the current axis.
/// Decay factors are the entries of the translational Green function; the
/// noise variance `M k_B T (1 - exp(-2 gamma dt / M))` per component makes
/// the transition exact in distribution for any dt at fixed axis.
pub fn step_momentum_inertial<R: Rng + ?Sized>(
    state: &mut RodState,
    rod: &RodParams,
    bath: &BathParams,
    dt: f64,
    rng: &mut R,
) {
    let tensor = FrictionTensor::new(bath.gamma_par, bath.gamma_perp, state.u)
        .expect("state axis is a unit vector");
    let green = tensor.green_function(rod.mass, dt);
    let decayed = green.apply(state.p);
    let mkt = rod.mass * bath.thermal_energy();
    let a_par = green.gamma_par();
    let a_perp = green.gamma_perp();
    let s_par = (mkt * (1.0 - a_par * a_par)).sqrt();
    let s_perp = (mkt * (1.0 - a_perp * a_perp)).sqrt();
    let (e1, e2) = transverse_frame(state.u);
    state.p = decayed
        + state.u * (s_par * rng.sample::<f64, _>(rand_distr::StandardNormal))
        + e1 * (s_perp * rng.sample::<f64, _>(rand_distr::StandardNormal))
        + e2 * (s_perp * rng.sample::<f64, _>(rand_distr::StandardNormal));
}

/// Position drift r += (p / M) dt.
pub fn step_position(state: &mut RodState, rod: &RodParams, dt: f64) {
    state.r += state.p * (dt / rod.mass);
}

/// Exact Ornstein-Uhlenbeck update of the two transverse angular-velocity
/// components (rate gamma_rot / I, stationary variance k_B T / I each),
/// followed by a finite rotation of the axis about the new angular velocity.
pub fn step_rotation_inertial<R: Rng + ?Sized>(
    state: &mut RodState,
    rod: &RodParams,
    bath: &BathParams,
    dt: f64,
    rng: &mut R,
) {
    let inertia = rod.moment_of_inertia();
    let a = (-bath.gamma_rot * dt / inertia).exp();
    let s = (bath.thermal_energy() / inertia * (1.0 - a * a)).sqrt();
    let (e1, e2) = transverse_frame(state.u);
    let w1 = a * state.omega.dot(e1) + s * rng.sample::<f64, _>(rand_distr::StandardNormal);
    let w2 = a * state.omega.dot(e2) + s * rng.sample::<f64, _>(rand_distr::StandardNormal);
    state.omega = e1 * w1 + e2 * w2;
    rotate_axis_by_omega(state, dt);
}

/// Rotate the axis about the current angular velocity by |omega| dt, then
/// renormalize and re-project so the state invariants hold exactly.
fn rotate_axis_by_omega(state: &mut RodState, dt: f64) {
    let w = state.omega.norm();
    let angle = w * dt;
    if angle > 0.0 {
        state.u = rotate_about_axis(state.u, state.omega / w, angle);
    }
    state.u = state.u.normalized();
    state.omega -= state.u * state.omega.dot(state.u);
}

/// One Brownian time-scale step: position through the inverse friction
/// tensor, axis by the finite rotation `torque impulse / gamma_rot`.
pub fn step_overdamped<R: Rng + ?Sized>(
    state: &mut RodState,
    _rod: &RodParams,
    bath: &BathParams,
    dt: f64,
    rng: &mut R,
) -> Result<(), DynamicsError> {
    let (f_par, f_perp) = white_force_increment(bath, state.u, dt, rng)?;
    state.r += f_par * (1.0 / bath.gamma_par) + f_perp * (1.0 / bath.gamma_perp);
    let torque = white_torque_increment(bath, state.u, dt, rng)?;
    let phi = torque * (1.0 / bath.gamma_rot);
    let angle = phi.norm();
    if angle > 0.0 {
        state.u = rotate_about_axis(state.u, phi / angle, angle).normalized();
    }
    state.omega -= state.u * state.omega.dot(state.u);
    Ok(())
}

/// First-order reference scheme for the orientation: Euler step of
/// du/dt = (T / gamma_rot) x u followed by renormalization. Used only as the
/// brute-force oracle the rotation-based update is checked against.
pub fn step_orientation_euler(u: Vec3, torque_impulse: Vec3, gamma_rot: f64) -> Vec3 {
    let phi = torque_impulse * (1.0 / gamma_rot);
    (u + phi.cross(u)).normalized()
}

/// Momentum update driven by precomputed colored-noise samples:
/// p <- exp(-gamma dt / M) p + f(t_k) dt per body-frame component. The
/// parallel series carries one component, the perpendicular series two.
pub fn step_momentum_colored(
    state: &mut RodState,
    rod: &RodParams,
    bath: &BathParams,
    par: &NoiseSeries,
    perp: &NoiseSeries,
    step_index: usize,
    dt: f64,
) -> Result<(), DynamicsError> {
    assert_eq!(par.components.len(), 1, "parallel series carries one component");
    assert_eq!(perp.components.len(), 2, "perpendicular series carries two components");
    if step_index >= par.len() || step_index >= perp.len() {
        return Err(DynamicsError::SeriesExhausted(step_index));
    }
    let tensor = FrictionTensor::new(bath.gamma_par, bath.gamma_perp, state.u)
        .expect("state axis is a unit vector");
    let green = tensor.green_function(rod.mass, dt);
    let decayed = green.apply(state.p);
    let (e1, e2) = transverse_frame(state.u);
    state.p = decayed
        + state.u * (par.components[0][step_index] * dt)
        + e1 * (perp.components[0][step_index] * dt)
        + e2 * (perp.components[1][step_index] * dt);
    Ok(())
}

/// Colored-noise counterpart of the angular-velocity update:
/// w_i <- exp(-gamma_rot dt / I) w_i + (T_i(t_k) / I) dt per transverse
/// component.
///
/// The axis is held fixed. Colored-noise runs produce momentum and
/// angular-velocity statistics in the frozen body frame; re-decomposing
/// against a rotating axis would scramble the temporal correlations the
/// series was synthesized with. Orientational kinematics belongs to the
/// classical modes.
pub fn step_rotation_colored(
    state: &mut RodState,
    rod: &RodParams,
    bath: &BathParams,
    torque: &NoiseSeries,
    step_index: usize,
    dt: f64,
) -> Result<(), DynamicsError> {
    assert_eq!(torque.components.len(), 2, "torque series carries two components");
    if step_index >= torque.len() {
        return Err(DynamicsError::SeriesExhausted(step_index));
    }
    let inertia = rod.moment_of_inertia();
    let a = (-bath.gamma_rot * dt / inertia).exp();
    let (e1, e2) = transverse_frame(state.u);
    let w1 = a * state.omega.dot(e1) + torque.components[0][step_index] / inertia * dt;
    let w2 = a * state.omega.dot(e2) + torque.components[1][step_index] / inertia * dt;
    state.omega = e1 * w1 + e2 * w2;
    Ok(())
}

/// Axis unit vector from the polar Euler angles of the rod frame:
/// (sin b cos g, -sin b sin g, cos b).
pub fn orientation_from_euler(beta: f64, gamma_angle: f64) -> Vec3 {
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma_angle.sin_cos();
    Vec3::new(sb * cg, -sb * sg, cb)
}

/// Uniformly distributed axis with zero momentum and angular velocity; the
/// initial state for quantum runs, which build their statistics dynamically.
pub fn cold_initial_state<R: Rng + ?Sized>(rng: &mut R) -> RodState {
    RodState::at_rest(Vec3::from(UnitSphere.sample(rng)))
}

/// Propagate `n_steps` from `initial`, recording every `record_stride` steps
/// (the initial state is always recorded). Deterministic given the rng.
pub fn propagate<R: Rng + ?Sized>(
    initial: &RodState,
    rod: &RodParams,
    bath: &BathParams,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, DynamicsError> {
    cfg.validate(rod, bath)?;
    debug_assert!(initial.is_valid());
    match (bath.regime, cfg.mode) {
        (Regime::Classical, Mode::Inertial) => propagate_classical_inertial(initial, rod, bath, cfg, rng),
        (Regime::Classical, Mode::Overdamped) => propagate_classical_overdamped(initial, rod, bath, cfg, rng),
        (Regime::Quantum, Mode::Inertial) => propagate_quantum_inertial(initial, rod, bath, cfg, rng),
        (Regime::Quantum, Mode::Overdamped) => Err(DynamicsError::UnsupportedMode),
    }
}

struct Recorder {
    traj: Trajectory,
    stride: usize,
    t0: f64,
    dt: f64,
}

impl Recorder {
    fn new(initial: &RodState, cfg: &IntegratorConfig) -> Self {
        let capacity = cfg.n_steps / cfg.record_stride + 1;
        let mut traj = Trajectory {
            times: Vec::with_capacity(capacity),
            states: Vec::with_capacity(capacity),
        };
        traj.times.push(initial.t);
        traj.states.push(*initial);
        Recorder {
            traj,
            stride: cfg.record_stride,
            t0: initial.t,
            dt: cfg.dt,
        }
    }

    fn after_step(&mut self, step: usize, state: &mut RodState) {
        state.t = self.t0 + (step + 1) as f64 * self.dt;
        if (step + 1) % self.stride == 0 {
            debug_assert!(state.is_valid());
            self.traj.times.push(state.t);
            self.traj.states.push(*state);
        }
    }
}

fn propagate_classical_inertial<R: Rng + ?Sized>(
    initial: &RodState,
    rod: &RodParams,
    bath: &BathParams,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, DynamicsError> {
    let mut state = *initial;
    let mut rec = Recorder::new(initial, cfg);
    for step in 0..cfg.n_steps {
        let p_before = state.p;
        step_momentum_inertial(&mut state, rod, bath, cfg.dt, rng);
        let drift_p = match cfg.position_scheme {
            PositionScheme::Euler => p_before,
            PositionScheme::Midpoint => (p_before + state.p) * 0.5,
        };
        state.r += drift_p * (cfg.dt / rod.mass);
        step_rotation_inertial(&mut state, rod, bath, cfg.dt, rng);
        rec.after_step(step, &mut state);
    }
    Ok(rec.traj)
}

fn propagate_classical_overdamped<R: Rng + ?Sized>(
    initial: &RodState,
    rod: &RodParams,
    bath: &BathParams,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, DynamicsError> {
    let mut state = *initial;
    let mut rec = Recorder::new(initial, cfg);
    for step in 0..cfg.n_steps {
        step_overdamped(&mut state, rod, bath, cfg.dt, rng)?;
        rec.after_step(step, &mut state);
    }
    Ok(rec.traj)
}

/// Colored-noise blocks must span many correlation times so that the
/// independent-block boundaries leave no imprint on the statistics.
const BLOCK_SPAN_RATES: f64 = 50.0;
const MAX_BLOCK_LEN: usize = 1 << 24;

fn colored_block_len(rod: &RodParams, bath: &BathParams, dt: f64) -> Result<usize, DynamicsError> {
    let cutoff = bath.cutoff.ok_or(NoiseError::CutoffMissing)?;
    let min_rate = [
        bath.gamma_par / rod.mass,
        bath.gamma_perp / rod.mass,
        bath.gamma_rot / rod.moment_of_inertia(),
        cutoff,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let required = (BLOCK_SPAN_RATES / (dt * min_rate)).ceil() as usize;
    let len = required.max(1024).next_power_of_two();
    if len > MAX_BLOCK_LEN {
        return Err(DynamicsError::NoiseBlockTooLong { required });
    }
    Ok(len)
}

fn propagate_quantum_inertial<R: Rng + ?Sized>(
    initial: &RodState,
    rod: &RodParams,
    bath: &BathParams,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, DynamicsError> {
    let block_len = colored_block_len(rod, bath, cfg.dt)?;
    let sd_par = SpectralDensity::from_bath(bath, bath.gamma_par)?;
    let sd_perp = SpectralDensity::from_bath(bath, bath.gamma_perp)?;
    let sd_torque = SpectralDensity::from_bath(bath, bath.gamma_rot)?;

    let mut state = *initial;
    let mut rec = Recorder::new(initial, cfg);
    let mut step = 0usize;
    while step < cfg.n_steps {
        let par = synthesize_colored_noise(&sd_par, block_len, cfg.dt, 1, rng)?;
        let perp = synthesize_colored_noise(&sd_perp, block_len, cfg.dt, 2, rng)?;
        let torque = synthesize_colored_noise(&sd_torque, block_len, cfg.dt, 2, rng)?;
        let in_block = block_len.min(cfg.n_steps - step);
        for k in 0..in_block {
            let p_before = state.p;
            step_momentum_colored(&mut state, rod, bath, &par, &perp, k, cfg.dt)?;
            let drift_p = match cfg.position_scheme {
                PositionScheme::Euler => p_before,
                PositionScheme::Midpoint => (p_before + state.p) * 0.5,
            };
            state.r += drift_p * (cfg.dt / rod.mass);
            step_rotation_colored(&mut state, rod, bath, &torque, k, cfg.dt)?;
            rec.after_step(step, &mut state);
            step += 1;
        }
    }
    Ok(rec.traj)
}
