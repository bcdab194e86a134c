//! Stochastic force and torque generation.
//!
//! Classical regime: delta-correlated Gaussian impulses with strengths fixed
//! by the fluctuation-dissipation relation, `2 k_B T gamma dt` per Cartesian
//! component (one parallel component, two perpendicular ones, two transverse
//! torque components).
//!
//! Quantum regime: stationary Gaussian noise whose two-sided spectral density
//! is the Ohmic coth kernel `hbar gamma |w| coth(hbar |w| / 2 k_B T)` under a
//! frequency cutoff. Series are produced by spectral synthesis: independent
//! complex Gaussian amplitudes per frequency bin weighted by the target
//! spectrum, inverse FFT, Hermitian symmetry enforced so samples are real.
//! The quadrature of the same kernel serves as the oracle the synthesized
//! covariance is tested against.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::params::{BathParams, CutoffShape, Regime};
use crate::quad;
use crate::vec3::{transverse_frame, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("operation requires the {0:?} regime")]
    WrongRegime(Regime),
    #[error("spectral density requires a cutoff frequency")]
    CutoffMissing,
    #[error("time step {dt} violates the Nyquist bound pi/omega_c = {limit}")]
    NyquistViolation { dt: f64, limit: f64 },
    #[error("sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

/// Per-step variances of the classical white-noise impulses. These are the
/// configured fluctuation strengths; the sampled impulses are tested against
/// them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpulseVariances {
    /// Variance of the single component along the rod axis.
    pub par_total: f64,
    /// Variance per perpendicular force component (two components).
    pub perp_per_component: f64,
    /// Variance per transverse torque component (two components).
    pub torque_per_component: f64,
}

impl ImpulseVariances {
    /// Total variance of the perpendicular force block.
    pub fn perp_total(&self) -> f64 {
        2.0 * self.perp_per_component
    }
}

pub fn impulse_variances(bath: &BathParams, dt: f64) -> ImpulseVariances {
    let kt = bath.thermal_energy();
    ImpulseVariances {
        par_total: 2.0 * kt * bath.gamma_par * dt,
        perp_per_component: 2.0 * kt * bath.gamma_perp * dt,
        torque_per_component: 2.0 * kt * bath.gamma_rot * dt,
    }
}

/// Gaussian force impulse over one step, split along the current axis `u`:
/// the parallel part lies along `u`, the perpendicular part in the transverse
/// plane, mutually uncorrelated.
pub fn white_force_increment<R: Rng + ?Sized>(
    bath: &BathParams,
    u: Vec3,
    dt: f64,
    rng: &mut R,
) -> Result<(Vec3, Vec3), NoiseError> {
    if bath.regime != Regime::Classical {
        return Err(NoiseError::WrongRegime(Regime::Classical));
    }
    debug_assert!(dt > 0.0);
    let v = impulse_variances(bath, dt);
    let s_par = v.par_total.sqrt();
    let s_perp = v.perp_per_component.sqrt();
    let par = u * (s_par * rng.sample::<f64, _>(StandardNormal));
    let (e1, e2) = transverse_frame(u);
    let perp = e1 * (s_perp * rng.sample::<f64, _>(StandardNormal))
        + e2 * (s_perp * rng.sample::<f64, _>(StandardNormal));
    Ok((par, perp))
}

/// Gaussian torque impulse over one step, in the plane perpendicular to `u`.
pub fn white_torque_increment<R: Rng + ?Sized>(
    bath: &BathParams,
    u: Vec3,
    dt: f64,
    rng: &mut R,
) -> Result<Vec3, NoiseError> {
    if bath.regime != Regime::Classical {
        return Err(NoiseError::WrongRegime(Regime::Classical));
    }
    debug_assert!(dt > 0.0);
    let s = impulse_variances(bath, dt).torque_per_component.sqrt();
    let (e1, e2) = transverse_frame(u);
    Ok(e1 * (s * rng.sample::<f64, _>(StandardNormal))
        + e2 * (s * rng.sample::<f64, _>(StandardNormal)))
}

/// Two-sided spectral density of one noise component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDensity {
    pub gamma: f64,
    pub temperature: f64,
    pub hbar: f64,
    pub k_b: f64,
    pub cutoff: f64,
    pub cutoff_shape: CutoffShape,
    pub regime: Regime,
}

impl SpectralDensity {
    /// Density for one component with friction `gamma`, taking temperature,
    /// constants, cutoff and regime from the bath.
    pub fn from_bath(bath: &BathParams, gamma: f64) -> Result<Self, NoiseError> {
        let cutoff = bath.cutoff.ok_or(NoiseError::CutoffMissing)?;
        Ok(SpectralDensity {
            gamma,
            temperature: bath.temperature,
            hbar: bath.hbar,
            k_b: bath.k_b,
            cutoff,
            cutoff_shape: bath.cutoff_shape,
            regime: bath.regime,
        })
    }

    fn cutoff_weight(&self, w: f64) -> f64 {
        match self.cutoff_shape {
            CutoffShape::Sharp => {
                if w <= self.cutoff {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffShape::Exponential => (-w / self.cutoff).exp(),
        }
    }

    /// `w coth(hbar w / 2 k_B T)`, with the removable w -> 0 limit
    /// `2 k_B T / hbar` handled analytically.
    fn omega_coth(&self, w: f64) -> f64 {
        let kt = self.k_b * self.temperature;
        if kt == 0.0 {
            return w;
        }
        let x = self.hbar * w / (2.0 * kt);
        if x < 1e-4 {
            // x coth x = 1 + x^2/3 - x^4/45 + ...
            (2.0 * kt / self.hbar) * (1.0 + x * x / 3.0 - x * x * x * x / 45.0)
        } else if x > 20.0 {
            w
        } else {
            w / x.tanh()
        }
    }

    /// S(w), even in w and non-negative.
    pub fn evaluate(&self, w: f64) -> f64 {
        let w = w.abs();
        let weight = self.cutoff_weight(w);
        if weight == 0.0 {
            return 0.0;
        }
        match self.regime {
            Regime::Quantum => self.hbar * self.gamma * self.omega_coth(w) * weight,
            // Classical limit: flat white-noise strength up to the cutoff.
            Regime::Classical => 2.0 * self.k_b * self.temperature * self.gamma * weight,
        }
    }

    /// Upper integration limit beyond which the spectrum is negligible.
    fn band_edge(&self) -> f64 {
        match self.cutoff_shape {
            CutoffShape::Sharp => self.cutoff,
            // exp(-60) ~ 9e-27 leaves nothing to integrate.
            CutoffShape::Exponential => 60.0 * self.cutoff,
        }
    }
}

const KERNEL_REL_TOL: f64 = 1e-12;
const KERNEL_ABS_TOL_FRACTION: f64 = 1e-10;
const KERNEL_MAX_SUBDIVISIONS: usize = 20_000;

/// Stationary autocovariance kernel C(tau) of one noise component,
/// `C(tau) = (1/pi) * integral_0^edge S(w) cos(w tau) dw`,
/// evaluated by adaptive quadrature. C(0) is cached so subsequent
/// evaluations can use the absolute tolerance the contract declares.
#[derive(Clone, Copy, Debug)]
pub struct Kernel {
    sd: SpectralDensity,
    c0: f64,
}

impl Kernel {
    pub fn new(sd: &SpectralDensity) -> Self {
        let edge = sd.band_edge();
        let c0 = quad::integrate(
            &|w| sd.evaluate(w),
            0.0,
            edge,
            0.0,
            KERNEL_REL_TOL,
            KERNEL_MAX_SUBDIVISIONS,
        )
        .value
            / std::f64::consts::PI;
        Kernel { sd: *sd, c0 }
    }

    pub fn at_zero(&self) -> f64 {
        self.c0
    }

    /// C(tau); exactly even in tau.
    pub fn eval(&self, tau: f64) -> f64 {
        let tau = tau.abs();
        if tau == 0.0 {
            return self.c0;
        }
        let sd = self.sd;
        let r = quad::integrate(
            &|w| sd.evaluate(w) * (w * tau).cos(),
            0.0,
            sd.band_edge(),
            KERNEL_ABS_TOL_FRACTION * self.c0.abs() * std::f64::consts::PI,
            0.0,
            KERNEL_MAX_SUBDIVISIONS,
        );
        r.value / std::f64::consts::PI
    }
}

/// One-shot kernel evaluation. Prefer [`Kernel`] when tabulating.
pub fn quantum_kernel(tau: f64, sd: &SpectralDensity) -> f64 {
    Kernel::new(sd).eval(tau)
}

/// Precomputed stationary Gaussian samples on a uniform time grid. The
/// declared covariance contract is the spectral density the series was
/// synthesized from.
#[derive(Clone, Debug)]
pub struct NoiseSeries {
    pub dt: f64,
    pub components: Vec<Vec<f64>>,
    pub contract: SpectralDensity,
}

impl NoiseSeries {
    pub fn len(&self) -> usize {
        self.components.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Synthesize `n_components` independent stationary Gaussian sequences of
/// length `n` (a power of two) on grid spacing `dt`, with expected
/// autocovariance equal to the discretized kernel of `sd`.
pub fn synthesize_colored_noise<R: Rng + ?Sized>(
    sd: &SpectralDensity,
    n: usize,
    dt: f64,
    n_components: usize,
    rng: &mut R,
) -> Result<NoiseSeries, NoiseError> {
    if !n.is_power_of_two() || n < 2 {
        return Err(NoiseError::NotPowerOfTwo(n));
    }
    let limit = std::f64::consts::PI / sd.cutoff;
    if dt > limit * (1.0 + 1e-12) {
        return Err(NoiseError::NyquistViolation { dt, limit });
    }

    let d_omega = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    // sigma_m^2 = S(m d_omega) * d_omega / (2 pi)
    let bin_scale = d_omega / (2.0 * std::f64::consts::PI);
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);

    let mut components = Vec::with_capacity(n_components);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..n_components {
        let sigma0 = (sd.evaluate(0.0) * bin_scale).sqrt();
        spectrum[0] = Complex64::new(sigma0 * rng.sample::<f64, _>(StandardNormal), 0.0);
        let sigma_nyq = (sd.evaluate(n as f64 / 2.0 * d_omega) * bin_scale).sqrt();
        spectrum[n / 2] = Complex64::new(sigma_nyq * rng.sample::<f64, _>(StandardNormal), 0.0);
        for m in 1..n / 2 {
            // half the bin variance in each quadrature
            let sigma = (sd.evaluate(m as f64 * d_omega) * bin_scale / 2.0).sqrt();
            let re = sigma * rng.sample::<f64, _>(StandardNormal);
            let im = sigma * rng.sample::<f64, _>(StandardNormal);
            spectrum[m] = Complex64::new(re, im);
            spectrum[n - m] = Complex64::new(re, -im);
        }
        fft.process(&mut spectrum);
        components.push(spectrum.iter().map(|z| z.re).collect());
        spectrum.fill(Complex64::new(0.0, 0.0));
    }

    Ok(NoiseSeries {
        dt,
        components,
        contract: *sd,
    })
}

/// Circular sample autocovariance at `lag`, averaged over all origins of all
/// realizations. Exactly unbiased for series produced by
/// [`synthesize_colored_noise`], whose stationarity is circulant.
pub fn circular_autocovariance(realizations: &[Vec<f64>], lag: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in realizations {
        let n = x.len();
        for j in 0..n {
            sum += x[j] * x[(j + lag) % n];
        }
        count += n;
    }
    sum / count as f64
}

/// Windowed integrated autocovariance
/// `dt * sum_{|k| <= window} C_hat(k)`, averaged over realizations.
/// Estimates the integral of C over the real line when the window spans many
/// correlation times.
pub fn integrated_autocovariance(realizations: &[Vec<f64>], dt: f64, window: usize) -> f64 {
    let mut total = 0.0;
    for x in realizations {
        let n = x.len();
        assert!(window < n / 2, "window must be shorter than half the series");
        // W(j) = sum of x over the circular window [j - window, j + window]
        let mut ext = Vec::with_capacity(3 * n);
        for _ in 0..3 {
            ext.extend_from_slice(x);
        }
        let mut prefix = Vec::with_capacity(3 * n + 1);
        prefix.push(0.0);
        for v in &ext {
            prefix.push(prefix.last().unwrap() + v);
        }
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            let lo = j + n - window;
            let hi = j + n + window + 1;
            acc += xj * (prefix[hi] - prefix[lo]);
        }
        total += acc * dt / n as f64;
    }
    total / realizations.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BathParams;
    use crate::rng::RngStream;

    #[test]
    fn zero_temperature_impulses_vanish() {
        let bath = BathParams::classical(0.0, 1.0, 2.0, 1.0);
        let mut rng = RngStream::new(1, 0).rng();
        let (par, perp) = white_force_increment(&bath, Vec3::Z, 0.01, &mut rng).unwrap();
        assert_eq!(par, Vec3::ZERO);
        assert_eq!(perp, Vec3::ZERO);
        let t = white_torque_increment(&bath, Vec3::Z, 0.01, &mut rng).unwrap();
        assert_eq!(t, Vec3::ZERO);
    }

    #[test]
    fn impulses_respect_the_axis_geometry() {
        let bath = BathParams::classical(1.5, 1.0, 2.0, 0.7);
        let mut rng = RngStream::new(2, 0).rng();
        let u = Vec3::new(1.0, -2.0, 0.5).normalized();
        for _ in 0..200 {
            let (par, perp) = white_force_increment(&bath, u, 0.01, &mut rng).unwrap();
            assert!(par.cross(u).norm() <= 1e-15 * par.norm().max(1e-300));
            assert!(perp.dot(u).abs() <= 1e-15 * perp.norm().max(1e-300));
            let t = white_torque_increment(&bath, u, 0.01, &mut rng).unwrap();
            assert!(t.dot(u).abs() <= 1e-15 * t.norm().max(1e-300));
        }
    }

    #[test]
    fn wrong_regime_is_rejected() {
        let bath = BathParams::quantum(1.0, 1.0, 1.0, 1.0, 10.0);
        let mut rng = RngStream::new(3, 0).rng();
        assert_eq!(
            white_force_increment(&bath, Vec3::Z, 0.01, &mut rng).unwrap_err(),
            NoiseError::WrongRegime(Regime::Classical)
        );
        assert_eq!(
            white_torque_increment(&bath, Vec3::Z, 0.01, &mut rng).unwrap_err(),
            NoiseError::WrongRegime(Regime::Classical)
        );
    }

    #[test]
    fn perpendicular_block_carries_twice_the_parallel_strength() {
        // On configuration, not samples: two components versus one.
        let bath = BathParams::classical(1.3, 0.8, 0.8, 1.0);
        let v = impulse_variances(&bath, 0.02);
        assert_eq!(v.perp_total(), 2.0 * v.par_total);
    }

    #[test]
    fn sampled_impulse_variance_matches_fdt_strength() {
        // 1e6 draws at gamma_par = 1, T = 1, dt = 0.01: variance 0.02 +- 1%.
        let bath = BathParams::classical(1.0, 1.0, 2.0, 1.0);
        let mut rng = RngStream::new(4, 0).rng();
        let u = Vec3::new(0.0, 0.6, 0.8);
        let n = 1_000_000;
        let mut par_sq = 0.0;
        for _ in 0..n {
            let (par, _) = white_force_increment(&bath, u, 0.01, &mut rng).unwrap();
            par_sq += par.norm_sq();
        }
        let var = par_sq / n as f64;
        assert!((var / 0.02 - 1.0).abs() < 0.01, "parallel impulse variance {var}");
    }

    fn quantum_sd(gamma: f64, t: f64, cutoff: f64) -> SpectralDensity {
        SpectralDensity::from_bath(&BathParams::quantum(t, gamma, gamma, gamma, cutoff), gamma)
            .unwrap()
    }

    #[test]
    fn spectral_density_missing_cutoff() {
        let bath = BathParams::classical(1.0, 1.0, 1.0, 1.0);
        assert_eq!(
            SpectralDensity::from_bath(&bath, 1.0).unwrap_err(),
            NoiseError::CutoffMissing
        );
    }

    #[test]
    fn classical_limit_of_the_spectrum_is_flat() {
        let sd = quantum_sd(1.0, 1000.0, 5.0);
        // k_B T >> hbar omega_c: S -> 2 k_B T gamma across the band
        for w in [0.0, 1.0, 3.0, 5.0] {
            assert!((sd.evaluate(w) / 2000.0 - 1.0).abs() < 1e-4);
        }
        assert_eq!(sd.evaluate(5.1), 0.0);
        assert_eq!(sd.evaluate(-2.0), sd.evaluate(2.0));
    }

    #[test]
    fn kernel_is_even_exactly() {
        let k = Kernel::new(&quantum_sd(1.0, 1.0, 10.0));
        for tau in [0.3, 1.7, 4.0] {
            assert_eq!(k.eval(tau), k.eval(-tau));
        }
    }

    #[test]
    fn zero_temperature_kernel_at_zero_lag() {
        // T -> 0: C(0) = hbar gamma omega_c^2 / (2 pi)
        let k = Kernel::new(&quantum_sd(0.7, 0.0, 12.0));
        let expected = 0.7 * 144.0 / (2.0 * std::f64::consts::PI);
        assert!(
            (k.at_zero() / expected - 1.0).abs() < 1e-8,
            "C(0) = {} vs {expected}",
            k.at_zero()
        );
    }

    #[test]
    fn zero_temperature_kernel_exponential_cutoff() {
        // integral of w exp(-w/wc) over [0, inf) = wc^2
        let mut sd = quantum_sd(1.0, 0.0, 3.0);
        sd.cutoff_shape = CutoffShape::Exponential;
        let k = Kernel::new(&sd);
        let expected = 9.0 / std::f64::consts::PI;
        assert!((k.at_zero() / expected - 1.0).abs() < 1e-8);
    }

    #[test]
    fn high_temperature_kernel_is_a_sinc() {
        // coth -> 2 k_B T / (hbar w): C(tau) -> (2 k_B T gamma / pi) sin(wc tau) / tau
        let wc = 4.0;
        let t = 100.0 * wc; // k_B T / (hbar wc) = 100
        let k = Kernel::new(&quantum_sd(1.0, t, wc));
        for tau in [0.11, 0.6, 1.3, 2.9] {
            let expected = (2.0 * t / std::f64::consts::PI) * (wc * tau).sin() / tau;
            let got = k.eval(tau);
            assert!(
                (got - expected).abs() < 2e-3 * k.at_zero(),
                "tau={tau}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn high_temperature_kernel_integrates_to_white_strength() {
        // integral of C over the real line -> 2 k_B T gamma, via the sinc integral.
        let wc = 5.0;
        let t = 200.0 * wc;
        let gamma = 0.8;
        let k = Kernel::new(&quantum_sd(gamma, t, wc));
        // Simpson over [0, L], doubled; L = 20 full periods of the sinc.
        let l = 40.0 * std::f64::consts::PI / wc;
        let n = 4000;
        let h = l / n as f64;
        let mut integral = k.at_zero() + k.eval(l);
        for j in 1..n {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            integral += w * k.eval(j as f64 * h);
        }
        integral *= h / 3.0;
        let total = 2.0 * integral;
        let expected = 2.0 * t * gamma;
        assert!(
            (total / expected - 1.0).abs() < 0.02,
            "integrated kernel {total} vs {expected}"
        );
    }

    #[test]
    fn synthesis_rejects_bad_grids() {
        let sd = quantum_sd(1.0, 1.0, 10.0);
        let mut rng = RngStream::new(5, 0).rng();
        assert!(matches!(
            synthesize_colored_noise(&sd, 1000, 0.01, 1, &mut rng),
            Err(NoiseError::NotPowerOfTwo(1000))
        ));
        assert!(matches!(
            synthesize_colored_noise(&sd, 1024, 1.0, 1, &mut rng),
            Err(NoiseError::NyquistViolation { .. })
        ));
    }

    #[test]
    fn synthesis_is_deterministic_given_the_stream() {
        let sd = quantum_sd(1.0, 1.0, 10.0);
        let a = synthesize_colored_noise(&sd, 256, 0.05, 2, &mut RngStream::new(6, 1).rng()).unwrap();
        let b = synthesize_colored_noise(&sd, 256, 0.05, 2, &mut RngStream::new(6, 1).rng()).unwrap();
        assert_eq!(a.components, b.components);
    }

    #[test]
    fn synthesized_variance_matches_kernel_oracle() {
        let sd = quantum_sd(1.0, 500.0, 5.0); // high-temperature regime
        let kernel = Kernel::new(&sd);
        let mut rng = RngStream::new(7, 0).rng();
        let mut realizations = Vec::new();
        for _ in 0..300 {
            let s = synthesize_colored_noise(&sd, 1024, 0.1, 1, &mut rng).unwrap();
            realizations.extend(s.components);
        }
        let lag0 = circular_autocovariance(&realizations, 0);
        assert!(
            (lag0 / kernel.at_zero() - 1.0).abs() < 0.03,
            "lag-0 autocovariance {lag0} vs kernel {}",
            kernel.at_zero()
        );
    }

    #[test]
    fn exponential_cutoff_synthesis_matches_its_kernel() {
        let mut sd = quantum_sd(1.0, 0.0, 6.0);
        sd.cutoff_shape = CutoffShape::Exponential;
        let kernel = Kernel::new(&sd);
        // dt small enough that the exponential tail beyond the Nyquist
        // frequency carries nothing
        let dt = 0.02;
        let mut rng = RngStream::new(12, 0).rng();
        let mut realizations = Vec::new();
        for _ in 0..300 {
            let s = synthesize_colored_noise(&sd, 2048, dt, 1, &mut rng).unwrap();
            realizations.extend(s.components);
        }
        for lag in [0usize, 4] {
            let sampled = circular_autocovariance(&realizations, lag);
            let oracle = kernel.eval(lag as f64 * dt);
            assert!(
                (sampled - oracle).abs() < 0.03 * kernel.at_zero(),
                "lag {lag}: {sampled} vs {oracle}"
            );
        }
    }

    #[test]
    fn zero_temperature_covariance_decays_past_the_cutoff_scale() {
        let sd = quantum_sd(1.0, 0.0, 10.0);
        let kernel = Kernel::new(&sd);
        let dt = 0.05;
        let mut rng = RngStream::new(8, 0).rng();
        let mut realizations = Vec::new();
        for _ in 0..400 {
            let s = synthesize_colored_noise(&sd, 2048, dt, 1, &mut rng).unwrap();
            realizations.extend(s.components);
        }
        // Lags >> 2 pi / omega_c: the kernel has decayed to the sharp-cutoff
        // ringing tail (envelope omega_c / (pi tau)), a few percent of C(0),
        // and the sampled covariance tracks the quadrature oracle there.
        for tau in [5.0, 10.0] {
            let lag = (tau / dt) as usize;
            let sampled = circular_autocovariance(&realizations, lag);
            let oracle = kernel.eval(tau);
            assert!(
                oracle.abs() < 0.05 * kernel.at_zero(),
                "kernel should have decayed at tau = {tau}: {oracle}"
            );
            assert!(
                (sampled - oracle).abs() < 0.02 * kernel.at_zero(),
                "tau = {tau}: sampled {sampled} vs kernel {oracle}"
            );
        }
    }

    #[test]
    fn classical_consistency_of_the_integrated_autocovariance() {
        // k_B T / (hbar omega_c) >= 100: integrated autocovariance of the
        // synthesized series matches the white-noise strength within 5%.
        let wc = 5.0;
        let t = 100.0 * wc;
        let gamma = 1.0;
        let sd = quantum_sd(gamma, t, wc);
        let dt = 0.1;
        let n = 2048;
        let mut rng = RngStream::new(9, 0).rng();
        let mut realizations = Vec::new();
        for _ in 0..500 {
            let s = synthesize_colored_noise(&sd, n, dt, 1, &mut rng).unwrap();
            realizations.extend(s.components);
        }
        let window = (12.0 / dt) as usize;
        let integrated = integrated_autocovariance(&realizations, dt, window);
        let expected = 2.0 * t * gamma;
        assert!(
            (integrated / expected - 1.0).abs() < 0.05,
            "integrated autocovariance {integrated} vs {expected}"
        );
    }

    #[test]
    fn parallel_and_perpendicular_impulses_are_uncorrelated() {
        let bath = BathParams::classical(1.0, 1.0, 2.0, 1.0);
        let mut rng = RngStream::new(10, 0).rng();
        let u = Vec3::new(1.0, 1.0, 1.0).normalized();
        let (e1, _) = transverse_frame(u);
        let n = 200_000;
        let mut cov = 0.0;
        let mut var_a = 0.0;
        let mut var_b = 0.0;
        for _ in 0..n {
            let (par, perp) = white_force_increment(&bath, u, 0.01, &mut rng).unwrap();
            let a = par.dot(u);
            let b = perp.dot(e1);
            cov += a * b;
            var_a += a * a;
            var_b += b * b;
        }
        let cov = cov / n as f64;
        let sigma = (var_a / n as f64 * var_b / n as f64 / n as f64).sqrt();
        assert!(cov.abs() < 3.0 * sigma, "cross covariance {cov} vs 3 sigma {}", 3.0 * sigma);
    }
}
