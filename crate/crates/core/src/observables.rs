//! Ensemble estimators and the closed-form / quadrature oracles they are
//! compared against.
//!
//! Mean-square displacement, the orientational correlation and the rotational
//! mean-square displacement are estimated with moving time origins along each
//! trajectory (origins spaced by at least one correlation time); second
//! moments of momentum and angular velocity are binned at absolute times so
//! equilibration is visible. Accumulators merge associatively, which is what
//! makes deterministic parallel ensembles possible.

use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::noise::{NoiseError, SpectralDensity};
use crate::params::{BathParams, RodParams};
use crate::quad;

#[derive(Debug, Error, PartialEq)]
pub enum ObservablesError {
    #[error("trajectory grid does not match the accumulator grid")]
    GridMismatch,
    #[error("no equilibrated samples in the accumulator")]
    InsufficientEquilibration,
    #[error("correlation curve has no usable window above the fit threshold")]
    NonPositiveCurve,
}

/// Mergeable running statistics over an ensemble of trajectories recorded on
/// a fixed time grid.
#[derive(Clone, Debug)]
pub struct EnsembleAccumulator {
    lag_times: Vec<f64>,
    origin_stride: usize,
    equil_time: f64,
    n_traj: u64,
    // lag-resolved sums over (origin, trajectory) pairs
    msd_sum: Vec<f64>,
    corr_sum: Vec<f64>,
    du2_sum: Vec<f64>,
    pair_count: Vec<u64>,
    // absolute-time-resolved second moments
    p_par_sq_sum: Vec<f64>,
    p_perp_sq_sum: Vec<f64>,
    omega_sq_sum: Vec<f64>,
    energy_sum: Vec<f64>,
    state_count: Vec<u64>,
}

/// Second moments averaged over the equilibrated window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMoments {
    pub p_par_sq: f64,
    pub p_perp_sq: f64,
    pub omega_sq: f64,
    pub energy: f64,
}

const GRID_TOL: f64 = 1e-9;

impl EnsembleAccumulator {
    /// `lag_times` is the recorded grid relative to the trajectory start;
    /// `origin_stride` the spacing (in grid bins) between time origins;
    /// `equil_time` the absolute time after which states count as
    /// equilibrated.
    pub fn new(lag_times: Vec<f64>, origin_stride: usize, equil_time: f64) -> Self {
        assert!(origin_stride >= 1, "origin stride must be at least one bin");
        let n = lag_times.len();
        EnsembleAccumulator {
            lag_times,
            origin_stride,
            equil_time,
            n_traj: 0,
            msd_sum: vec![0.0; n],
            corr_sum: vec![0.0; n],
            du2_sum: vec![0.0; n],
            pair_count: vec![0; n],
            p_par_sq_sum: vec![0.0; n],
            p_perp_sq_sum: vec![0.0; n],
            omega_sq_sum: vec![0.0; n],
            energy_sum: vec![0.0; n],
            state_count: vec![0; n],
        }
    }

    pub fn lag_times(&self) -> &[f64] {
        &self.lag_times
    }

    pub fn n_traj(&self) -> u64 {
        self.n_traj
    }

    pub fn equil_time(&self) -> f64 {
        self.equil_time
    }

    /// Fold one trajectory into the running sums.
    pub fn accumulate(&mut self, traj: &Trajectory, rod: &RodParams) -> Result<(), ObservablesError> {
        if traj.times.len() != self.lag_times.len() {
            return Err(ObservablesError::GridMismatch);
        }
        let t0 = traj.times.first().copied().unwrap_or(0.0);
        for (t, lag) in traj.times.iter().zip(&self.lag_times) {
            if ((t - t0) - lag).abs() > GRID_TOL * (1.0 + lag.abs()) {
                return Err(ObservablesError::GridMismatch);
            }
        }

        let k = traj.states.len();
        for origin in (0..k).step_by(self.origin_stride) {
            let base = &traj.states[origin];
            for lag in 0..k - origin {
                let s = &traj.states[origin + lag];
                self.msd_sum[lag] += (s.r - base.r).norm_sq();
                self.corr_sum[lag] += s.u.dot(base.u);
                self.du2_sum[lag] += (s.u - base.u).norm_sq();
                self.pair_count[lag] += 1;
            }
        }

        let mass = rod.mass;
        let inertia = rod.moment_of_inertia();
        for (bin, s) in traj.states.iter().enumerate() {
            let p_par = s.p.dot(s.u);
            let p_par_sq = p_par * p_par;
            let p_perp_sq = s.p.norm_sq() - p_par_sq;
            let omega_sq = s.omega.norm_sq();
            self.p_par_sq_sum[bin] += p_par_sq;
            self.p_perp_sq_sum[bin] += p_perp_sq;
            self.omega_sq_sum[bin] += omega_sq;
            self.energy_sum[bin] += (p_par_sq + p_perp_sq) / (2.0 * mass) + 0.5 * inertia * omega_sq;
            self.state_count[bin] += 1;
        }
        self.n_traj += 1;
        Ok(())
    }

    /// Associative, commutative merge of two accumulators over the same grid.
    pub fn merge(mut self, other: &EnsembleAccumulator) -> Self {
        assert_eq!(self.lag_times.len(), other.lag_times.len(), "grid mismatch in merge");
        assert_eq!(self.origin_stride, other.origin_stride);
        self.n_traj += other.n_traj;
        for i in 0..self.lag_times.len() {
            self.msd_sum[i] += other.msd_sum[i];
            self.corr_sum[i] += other.corr_sum[i];
            self.du2_sum[i] += other.du2_sum[i];
            self.pair_count[i] += other.pair_count[i];
            self.p_par_sq_sum[i] += other.p_par_sq_sum[i];
            self.p_perp_sq_sum[i] += other.p_perp_sq_sum[i];
            self.omega_sq_sum[i] += other.omega_sq_sum[i];
            self.energy_sum[i] += other.energy_sum[i];
            self.state_count[i] += other.state_count[i];
        }
        self
    }

    fn lag_mean(&self, sums: &[f64]) -> Vec<f64> {
        sums.iter()
            .zip(&self.pair_count)
            .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect()
    }

    /// Mean-square displacement per lag bin.
    pub fn msd(&self) -> Vec<f64> {
        self.lag_mean(&self.msd_sum)
    }

    /// Orientational correlation <u(t) . u(0)> per lag bin.
    pub fn orient_corr(&self) -> Vec<f64> {
        self.lag_mean(&self.corr_sum)
    }

    /// Rotational mean-square displacement <|u(t) - u(0)|^2> per lag bin.
    pub fn du2(&self) -> Vec<f64> {
        self.lag_mean(&self.du2_sum)
    }

    fn bin_mean(&self, sums: &[f64]) -> Vec<f64> {
        sums.iter()
            .zip(&self.state_count)
            .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect()
    }

    pub fn p_par_sq(&self) -> Vec<f64> {
        self.bin_mean(&self.p_par_sq_sum)
    }

    pub fn p_perp_sq(&self) -> Vec<f64> {
        self.bin_mean(&self.p_perp_sq_sum)
    }

    pub fn omega_sq(&self) -> Vec<f64> {
        self.bin_mean(&self.omega_sq_sum)
    }

    pub fn energy(&self) -> Vec<f64> {
        self.bin_mean(&self.energy_sum)
    }

    /// Second moments pooled over all bins at `t >= equil_time`, or `None`
    /// when no bin is that late.
    pub fn equilibrated_moments(&self) -> Option<SecondMoments> {
        let mut p_par = 0.0;
        let mut p_perp = 0.0;
        let mut omega = 0.0;
        let mut energy = 0.0;
        let mut count = 0u64;
        for (i, &t) in self.lag_times.iter().enumerate() {
            if t >= self.equil_time && self.state_count[i] > 0 {
                p_par += self.p_par_sq_sum[i];
                p_perp += self.p_perp_sq_sum[i];
                omega += self.omega_sq_sum[i];
                energy += self.energy_sum[i];
                count += self.state_count[i];
            }
        }
        if count == 0 {
            return None;
        }
        let n = count as f64;
        Some(SecondMoments {
            p_par_sq: p_par / n,
            p_perp_sq: p_perp / n,
            omega_sq: omega / n,
            energy: energy / n,
        })
    }
}

/// Mean-square displacement law of the Brownian time scale:
/// `2 k_B T t (1/gamma_par + 2/gamma_perp)`.
pub fn msd_oracle(t: f64, bath: &BathParams) -> f64 {
    2.0 * bath.thermal_energy() * t * (1.0 / bath.gamma_par + 2.0 / bath.gamma_perp)
}

/// Einstein diffusion coefficients along and across the axis.
pub fn diffusion_coefficients(bath: &BathParams) -> (f64, f64) {
    let kt = bath.thermal_energy();
    (kt / bath.gamma_par, kt / bath.gamma_perp)
}

/// Rotational diffusion coefficient D_r = k_B T / gamma_rot.
pub fn rotational_diffusion(bath: &BathParams) -> f64 {
    bath.thermal_energy() / bath.gamma_rot
}

/// Orientational relaxation: `<u(t) . u(0)> = exp(-2 D_r t)` and
/// `<|u(t) - u(0)|^2> = 2 (1 - exp(-2 D_r t))`.
pub fn orientation_oracle(t: f64, bath: &BathParams) -> (f64, f64) {
    let decay = (-2.0 * rotational_diffusion(bath) * t).exp();
    (decay, 2.0 * (1.0 - decay))
}

/// Long-time second moments of the classical stationary state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquipartitionMoments {
    pub p_par_sq: f64,
    pub p_perp_sq: f64,
    pub omega_sq: f64,
    pub energy: f64,
}

/// Equipartition values: `<p_par^2> = M k_B T`, `<p_perp^2> = 2 M k_B T`,
/// `<Omega^2> = 2 k_B T / I` (two transverse degrees of freedom) and
/// `<E> = 5/2 k_B T`.
pub fn equipartition_oracle(rod: &RodParams, bath: &BathParams) -> EquipartitionMoments {
    let kt = bath.thermal_energy();
    EquipartitionMoments {
        p_par_sq: rod.mass * kt,
        p_perp_sq: 2.0 * rod.mass * kt,
        omega_sq: 2.0 * kt / rod.moment_of_inertia(),
        energy: 2.5 * kt,
    }
}

/// Mean energy from given second moments:
/// `E = <p_par^2>/2M + <p_perp^2>/2M + I <Omega^2>/2`.
pub fn mean_energy_from_moments(
    rod: &RodParams,
    p_par_sq: f64,
    p_perp_sq: f64,
    omega_sq: f64,
) -> f64 {
    (p_par_sq + p_perp_sq) / (2.0 * rod.mass) + 0.5 * rod.moment_of_inertia() * omega_sq
}

/// Mean energy over the accumulator's equilibrated window.
pub fn mean_energy_estimate(
    acc: &EnsembleAccumulator,
    rod: &RodParams,
) -> Result<f64, ObservablesError> {
    let m = acc
        .equilibrated_moments()
        .ok_or(ObservablesError::InsufficientEquilibration)?;
    Ok(mean_energy_from_moments(rod, m.p_par_sq, m.p_perp_sq, m.omega_sq))
}

/// Which stationary variance the colored-noise oracle should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumVarianceTarget {
    /// <p_par^2>, the single component along the axis.
    MomentumParallel,
    /// Variance per perpendicular momentum component.
    MomentumPerpendicular,
    /// Variance per transverse angular-velocity component.
    AngularVelocity,
}

const QVAR_REL_TOL: f64 = 1e-8;

/// Stationary per-component variance of the colored-noise-driven
/// Ornstein-Uhlenbeck process under the cutoff spectrum:
/// `(1/2 pi) integral S(w) / (w^2 + rate^2) dw` over the two-sided band,
/// with `rate = gamma/M` for momentum and `gamma_rot/I` (and an extra 1/I^2
/// on the spectrum) for the angular velocity.
pub fn quantum_variance_oracle(
    rod: &RodParams,
    bath: &BathParams,
    which: QuantumVarianceTarget,
) -> Result<f64, NoiseError> {
    let (gamma, rate, scale) = match which {
        QuantumVarianceTarget::MomentumParallel => {
            (bath.gamma_par, bath.gamma_par / rod.mass, 1.0)
        }
        QuantumVarianceTarget::MomentumPerpendicular => {
            (bath.gamma_perp, bath.gamma_perp / rod.mass, 1.0)
        }
        QuantumVarianceTarget::AngularVelocity => {
            let inertia = rod.moment_of_inertia();
            (
                bath.gamma_rot,
                bath.gamma_rot / inertia,
                1.0 / (inertia * inertia),
            )
        }
    };
    let sd = SpectralDensity::from_bath(bath, gamma)?;
    let edge = match bath.cutoff_shape {
        crate::params::CutoffShape::Sharp => sd.cutoff,
        crate::params::CutoffShape::Exponential => 60.0 * sd.cutoff,
    };
    let r = quad::integrate(
        &|w| sd.evaluate(w) / (w * w + rate * rate),
        0.0,
        edge,
        0.0,
        QVAR_REL_TOL,
        10_000,
    );
    Ok(scale * r.value / std::f64::consts::PI)
}

/// Result of a single-exponential fit `A exp(-rate t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFit {
    pub rate: f64,
    pub amplitude: f64,
    pub residual: f64,
}

/// Fit threshold: points below this correlation value are log-noise.
pub const FIT_THRESHOLD: f64 = 0.05;

/// Least-squares fit of `A exp(-rate t)` on the log scale over the leading
/// window where the curve stays at or above [`FIT_THRESHOLD`].
pub fn fit_exponential(times: &[f64], values: &[f64]) -> Result<ExpFit, ObservablesError> {
    assert_eq!(times.len(), values.len());
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .take_while(|(_, &v)| v >= FIT_THRESHOLD)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if window.len() < 2 {
        return Err(ObservablesError::NonPositiveCurve);
    }
    let (slope, intercept) = linear_least_squares(&window);
    let residual = (window
        .iter()
        .map(|&(t, ly)| {
            let d = ly - (intercept + slope * t);
            d * d
        })
        .sum::<f64>()
        / window.len() as f64)
        .sqrt();
    Ok(ExpFit {
        rate: -slope,
        amplitude: intercept.exp(),
        residual,
    })
}

fn linear_least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return (0.0, sy / n);
    }
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

/// Ordinary least-squares line through `(x, y)`; returns (slope, intercept).
pub fn fit_linear(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    linear_least_squares(&pts)
}

/// One oracle comparison: pass iff |estimate - oracle| <= tolerance.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub id: String,
    pub estimate: f64,
    pub oracle: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn absolute(id: impl Into<String>, estimate: f64, oracle: f64, tolerance: f64) -> Self {
        let pass = (estimate - oracle).abs() <= tolerance;
        OracleReport {
            id: id.into(),
            estimate,
            oracle,
            tolerance,
            pass,
        }
    }

    /// Tolerance given as a fraction of the oracle magnitude.
    pub fn relative(id: impl Into<String>, estimate: f64, oracle: f64, rel_tol: f64) -> Self {
        Self::absolute(id, estimate, oracle, rel_tol * oracle.abs())
    }
}
