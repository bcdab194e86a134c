//! Built-in acceptance suite.
//!
//! Every headline quantity is re-derived from a full-scale ensemble run and
//! compared against its closed-form or quadrature oracle at a pinned
//! tolerance; the property checks cover the exact algebra, sphere
//! preservation, accumulator merging, determinism, mode consistency and the
//! brute-force orientation oracle. `rodsim selftest` and the `acceptance`
//! test target both drive [`run_all`].

use std::time::Instant;

use rayon::prelude::*;

use rodsim_core::dynamics::{
    propagate, step_momentum_inertial, step_orientation_euler, step_rotation_inertial,
    IntegratorConfig, Mode,
};
use rodsim_core::ensemble::{
    batch_standard_error, run_ensemble, EnsembleOptions, InitialCondition,
};
use rodsim_core::friction::{decompose, FrictionTensor};
use rodsim_core::noise::{
    circular_autocovariance, integrated_autocovariance, synthesize_colored_noise,
    white_force_increment, white_torque_increment, Kernel, SpectralDensity,
};
use rodsim_core::observables::{
    equipartition_oracle, fit_exponential, fit_linear, mean_energy_estimate,
    quantum_variance_oracle, EnsembleAccumulator, OracleReport, QuantumVarianceTarget,
};
use rodsim_core::params::{BathParams, RodParams, RodState};
use rodsim_core::rng::RngStream;
use rodsim_core::vec3::{transverse_frame, Vec3};

use rodsim_core::dynamics::Trajectory;

pub struct Criterion {
    pub number: usize,
    pub name: &'static str,
    pub checks: Vec<OracleReport>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn run_all() -> Vec<Criterion> {
    let mut out = Vec::new();
    let (c1, c2) = msd_and_orientation();
    out.push(c1);
    out.push(c2);
    let (c3, c4) = equipartition_and_energy();
    out.push(c3);
    out.push(c4);
    out.push(classical_fdt());
    out.push(kernel_and_colored_noise());
    out.push(quantum_cutoff_variance());
    out.push(property_suites());
    out
}

fn rod() -> RodParams {
    RodParams::new(1.0, 1.0)
}

fn tol(rel: f64, oracle: f64, se: f64) -> f64 {
    if se.is_finite() {
        (rel * oracle.abs()).max(2.0 * se)
    } else {
        rel * oracle.abs()
    }
}

/// Criteria 1 and 2: overdamped ensemble, gamma_par = 1, gamma_perp = 2,
/// T = 1, 5000 trajectories of 2000 steps at dt = 0.01. MSD slope 4 within
/// 5%, orientational rate 2 D_r = 2 within 5%, saturation 2 within 3%.
fn msd_and_orientation() -> (Criterion, Criterion) {
    let rod = rod();
    let bath = BathParams::classical(1.0, 1.0, 2.0, 1.0);
    let cfg = IntegratorConfig::new(Mode::Overdamped, 0.01, 2000, 10);
    let opts = EnsembleOptions {
        n_trajectories: 5000,
        seed: 101,
        initial: InitialCondition::Equilibrium,
        origin_stride: 5,
        equil_time: 0.0,
    };
    let start = Instant::now();
    let run = run_ensemble(&rod, &bath, &cfg, &opts).expect("classical overdamped run");
    let elapsed = start.elapsed().as_secs_f64();

    let times = run.merged.lag_times().to_vec();
    let (slope, _) = fit_linear(&times, &run.merged.msd());
    let se = batch_standard_error(&run.batches, |b| fit_linear(b.lag_times(), &b.msd()).0);
    let c1 = Criterion {
        number: 1,
        name: "translational MSD law",
        checks: vec![
            OracleReport::absolute("msd_slope", slope, 4.0, tol(0.05, 4.0, se)),
            OracleReport::absolute("runtime_seconds", elapsed, 0.0, 30.0),
        ],
    };

    let fit = fit_exponential(&times, &run.merged.orient_corr()).expect("positive window");
    let du2 = run.merged.du2();
    let mut sat_sum = 0.0;
    let mut sat_n = 0usize;
    for (t, v) in times.iter().zip(&du2) {
        if *t >= 2.5 {
            sat_sum += v;
            sat_n += 1;
        }
    }
    let c2 = Criterion {
        number: 2,
        name: "orientational relaxation",
        checks: vec![
            OracleReport::relative("orient_rate", fit.rate, 2.0, 0.05),
            OracleReport::relative("du2_saturation", sat_sum / sat_n as f64, 2.0, 0.03),
        ],
    };
    (c1, c2)
}

/// Criteria 3 and 4: inertial ensemble with all frictions 1, cold start,
/// equilibrated for 20 relaxation times. Equipartition moments within 3%,
/// mean energy 5/2 k_B T within 5%.
fn equipartition_and_energy() -> (Criterion, Criterion) {
    let rod = rod();
    let bath = BathParams::classical(1.0, 1.0, 1.0, 1.0);
    let cfg = IntegratorConfig::new(Mode::Inertial, 0.008, 5000, 25);
    let opts = EnsembleOptions {
        n_trajectories: 10_000,
        seed: 103,
        initial: InitialCondition::Cold,
        origin_stride: 5,
        equil_time: 20.0,
    };
    let run = run_ensemble(&rod, &bath, &cfg, &opts).expect("classical inertial run");
    let m = run.merged.equilibrated_moments().expect("equilibrated window");
    let oracle = equipartition_oracle(&rod, &bath);

    let se_par = batch_standard_error(&run.batches, |b| {
        b.equilibrated_moments().map_or(f64::NAN, |m| m.p_par_sq)
    });
    let se_perp = batch_standard_error(&run.batches, |b| {
        b.equilibrated_moments().map_or(f64::NAN, |m| m.p_perp_sq)
    });
    let se_omega = batch_standard_error(&run.batches, |b| {
        b.equilibrated_moments().map_or(f64::NAN, |m| m.omega_sq)
    });
    let c3 = Criterion {
        number: 3,
        name: "equipartition",
        checks: vec![
            OracleReport::absolute(
                "equip_p_par_sq",
                m.p_par_sq,
                oracle.p_par_sq,
                tol(0.03, oracle.p_par_sq, se_par),
            ),
            OracleReport::absolute(
                "equip_p_perp_sq",
                m.p_perp_sq,
                oracle.p_perp_sq,
                tol(0.03, oracle.p_perp_sq, se_perp),
            ),
            OracleReport::absolute(
                "equip_omega_sq",
                m.omega_sq,
                oracle.omega_sq,
                tol(0.03, oracle.omega_sq, se_omega),
            ),
        ],
    };

    let energy = mean_energy_estimate(&run.merged, &rod).expect("equilibrated window");
    let se_e = batch_standard_error(&run.batches, |b| {
        mean_energy_estimate(b, &rod).unwrap_or(f64::NAN)
    });
    let c4 = Criterion {
        number: 4,
        name: "mean energy, five degrees of freedom",
        checks: vec![OracleReport::absolute(
            "mean_energy",
            energy,
            oracle.energy,
            tol(0.05, oracle.energy, se_e),
        )],
    };
    (c3, c4)
}

/// Criterion 5: sampled white-noise impulse variances against the
/// fluctuation-dissipation strengths within 1% over 1e6 draws, and zero
/// parallel-perpendicular cross covariance at 3 sigma.
fn classical_fdt() -> Criterion {
    let bath = BathParams::classical(1.0, 1.0, 2.0, 1.5);
    let dt = 0.01;
    let u = Vec3::new(1.0, 1.0, 1.0).normalized();
    let (e1, e2) = transverse_frame(u);
    let n = 1_000_000usize;
    let mut rng = RngStream::new(105, 0).rng();

    let mut var_par = 0.0;
    let mut var_perp1 = 0.0;
    let mut var_perp2 = 0.0;
    let mut var_t1 = 0.0;
    let mut var_t2 = 0.0;
    let mut cross1 = 0.0;
    let mut cross2 = 0.0;
    for _ in 0..n {
        let (par, perp) = white_force_increment(&bath, u, dt, &mut rng).unwrap();
        let a = par.dot(u);
        let b1 = perp.dot(e1);
        let b2 = perp.dot(e2);
        var_par += a * a;
        var_perp1 += b1 * b1;
        var_perp2 += b2 * b2;
        cross1 += a * b1;
        cross2 += a * b2;
        let t = white_torque_increment(&bath, u, dt, &mut rng).unwrap();
        let t1 = t.dot(e1);
        let t2 = t.dot(e2);
        var_t1 += t1 * t1;
        var_t2 += t2 * t2;
    }
    let nf = n as f64;
    let kt = bath.thermal_energy();
    let s_par = 2.0 * kt * bath.gamma_par * dt;
    let s_perp = 2.0 * kt * bath.gamma_perp * dt;
    let s_rot = 2.0 * kt * bath.gamma_rot * dt;
    // 3 sigma bound for the sample covariance of two independent Gaussians
    let sigma_cross = (s_par * s_perp / nf).sqrt();
    let cross = if (cross1 / nf).abs() > (cross2 / nf).abs() {
        cross1 / nf
    } else {
        cross2 / nf
    };

    Criterion {
        number: 5,
        name: "classical fluctuation-dissipation strengths",
        checks: vec![
            OracleReport::relative("fdt_par_variance", var_par / nf, s_par, 0.01),
            OracleReport::relative(
                "fdt_perp_variance_per_component",
                0.5 * (var_perp1 + var_perp2) / nf,
                s_perp,
                0.01,
            ),
            OracleReport::relative(
                "fdt_torque_variance_per_component",
                0.5 * (var_t1 + var_t2) / nf,
                s_rot,
                0.01,
            ),
            OracleReport::absolute("fdt_cross_covariance", cross, 0.0, 3.0 * sigma_cross),
        ],
    }
}

fn synthesized_realizations(
    sd: &SpectralDensity,
    n: usize,
    dt: f64,
    count: u64,
    seed: u64,
) -> Vec<Vec<f64>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i).rng();
            synthesize_colored_noise(sd, n, dt, 1, &mut rng)
                .expect("valid synthesis grid")
                .components
                .remove(0)
        })
        .collect()
}

/// Criterion 6: synthesized colored noise against the coth-kernel quadrature
/// at lags {0, dt, 10 dt} within 3% (gamma = 1, T = 1, omega_c = 20), and
/// the high-temperature integrated autocovariance against the white-noise
/// strength 2 k_B T gamma within 5% (T = 100, omega_c = 5).
fn kernel_and_colored_noise() -> Criterion {
    let mut checks = Vec::new();

    let bath = BathParams::quantum(1.0, 1.0, 1.0, 1.0, 20.0);
    let sd = SpectralDensity::from_bath(&bath, 1.0).unwrap();
    let kernel = Kernel::new(&sd);
    let dt = 0.02;
    let realizations = synthesized_realizations(&sd, 8192, dt, 2000, 106);
    for lag in [0usize, 1, 10] {
        let sampled = circular_autocovariance(&realizations, lag);
        let oracle = kernel.eval(lag as f64 * dt);
        checks.push(OracleReport::relative(
            format!("kernel_lag_{lag}"),
            sampled,
            oracle,
            0.03,
        ));
    }

    let high_t = BathParams::quantum(100.0, 1.0, 1.0, 1.0, 5.0);
    let sd_hot = SpectralDensity::from_bath(&high_t, 1.0).unwrap();
    let dt_hot = 0.1;
    let hot = synthesized_realizations(&sd_hot, 4096, dt_hot, 2000, 107);
    let window = (12.0 / dt_hot) as usize;
    let integrated = integrated_autocovariance(&hot, dt_hot, window);
    let strength = 2.0 * high_t.thermal_energy() * 1.0;
    checks.push(OracleReport::relative(
        "integrated_autocovariance_high_t",
        integrated,
        strength,
        0.05,
    ));

    Criterion {
        number: 6,
        name: "quantum kernel and colored-noise synthesis",
        checks,
    }
}

/// Criterion 7: colored-noise-driven inertial ensemble at T = 0,
/// omega_c = 50, gamma/M = 1. Stationary momentum variances match the
/// cutoff quadrature within 5%; doubling the cutoff raises the oracle by
/// (hbar gamma / pi) ln 2, the logarithmic divergence signature.
fn quantum_cutoff_variance() -> Criterion {
    let rod = rod();
    let bath = BathParams::quantum(0.0, 1.0, 1.0, 1.0, 50.0);
    let cfg = IntegratorConfig::new(Mode::Inertial, 0.005, 8000, 40);
    let opts = EnsembleOptions {
        n_trajectories: 400,
        seed: 108,
        initial: InitialCondition::Cold,
        origin_stride: 10,
        equil_time: 10.0,
    };
    let run = run_ensemble(&rod, &bath, &cfg, &opts).expect("quantum run");
    let m = run.merged.equilibrated_moments().expect("equilibrated window");
    let oracle =
        quantum_variance_oracle(&rod, &bath, QuantumVarianceTarget::MomentumParallel).unwrap();
    let se_par = batch_standard_error(&run.batches, |b| {
        b.equilibrated_moments().map_or(f64::NAN, |m| m.p_par_sq)
    });
    let se_perp = batch_standard_error(&run.batches, |b| {
        b.equilibrated_moments().map_or(f64::NAN, |m| m.p_perp_sq)
    });

    let doubled = BathParams::quantum(0.0, 1.0, 1.0, 1.0, 100.0);
    let oracle_doubled =
        quantum_variance_oracle(&rod, &doubled, QuantumVarianceTarget::MomentumParallel).unwrap();
    let ln2_step = std::f64::consts::LN_2 / std::f64::consts::PI;

    Criterion {
        number: 7,
        name: "quantum stationary variance under the cutoff",
        checks: vec![
            OracleReport::absolute(
                "qvar_p_par_sq",
                m.p_par_sq,
                oracle,
                tol(0.05, oracle, se_par),
            ),
            OracleReport::absolute(
                "qvar_p_perp_sq",
                m.p_perp_sq,
                2.0 * oracle,
                tol(0.05, 2.0 * oracle, se_perp),
            ),
            OracleReport::relative(
                "cutoff_log_growth",
                oracle_doubled - oracle,
                ln2_step,
                0.02,
            ),
        ],
    }
}

/// Exponential rate over the well-resolved part of the decay (value >= 0.2).
fn windowed_rate(times: &[f64], curve: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(curve)
        .take_while(|(_, &c)| c >= 0.2)
        .map(|(&t, &c)| (t, c.ln()))
        .collect();
    let ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ls: Vec<f64> = pts.iter().map(|p| p.1).collect();
    -fit_linear(&ts, &ls).0
}

fn euler_orientation_rate(bath: &BathParams, dt: f64, t_max: f64, n_traj: u64, seed: u64) -> f64 {
    let steps = (t_max / dt).round() as usize;
    let record = (0.05 / dt).round() as usize;
    let bins = steps / record + 1;
    let corr: Vec<f64> = (0..n_traj / 100)
        .into_par_iter()
        .map(|chunk| {
            let mut corr = vec![0.0f64; bins];
            for traj in chunk * 100..(chunk + 1) * 100 {
                let mut rng = RngStream::new(seed, traj).rng();
                let mut u = Vec3::Z;
                let u0 = u;
                corr[0] += 1.0;
                for k in 0..steps {
                    let imp = white_torque_increment(bath, u, dt, &mut rng).unwrap();
                    u = step_orientation_euler(u, imp, bath.gamma_rot);
                    if (k + 1) % record == 0 {
                        corr[(k + 1) / record] += u.dot(u0);
                    }
                }
            }
            corr
        })
        .reduce(
            || vec![0.0f64; bins],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    let times: Vec<f64> = (0..bins).map(|k| (k * record) as f64 * dt).collect();
    let curve: Vec<f64> = corr.iter().map(|c| c / n_traj as f64).collect();
    windowed_rate(&times, &curve)
}

fn window_mean(acc: &EnsembleAccumulator, values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (t, v) in acc.lag_times().iter().zip(values) {
        if *t >= lo && *t <= hi {
            sum += v;
            n += 1;
        }
    }
    sum / n as f64
}

/// Criterion 8: the always-on property suites.
fn property_suites() -> Criterion {
    let mut checks = Vec::new();
    let r = rod();

    // Friction algebra: projector, power and semigroup laws on 1000 random
    // axes, checked through vector application.
    {
        use rand::Rng;
        use rand_distr::{Distribution, UnitSphere};
        let mut rng = RngStream::new(109, 0).rng();
        let mut dev_proj: f64 = 0.0;
        let mut dev_power: f64 = 0.0;
        let mut dev_semigroup: f64 = 0.0;
        for _ in 0..1000 {
            let u = Vec3::from(UnitSphere.sample(&mut rng));
            let v = Vec3::new(
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
                rng.random::<f64>() * 4.0 - 2.0,
            );
            let scale = v.norm().max(1.0);
            let (par, perp) = decompose(v, u).unwrap();
            let (ppar, pperp) = decompose(par, u).unwrap();
            dev_proj = dev_proj
                .max((ppar - par).norm() / scale)
                .max(pperp.norm() / scale)
                .max(((par + perp) - v).norm() / scale);
            let (qpar, qperp) = decompose(perp, u).unwrap();
            dev_proj = dev_proj
                .max(qpar.norm() / scale)
                .max((qperp - perp).norm() / scale);

            let gp = rng.random::<f64>() * 4.0 + 0.1;
            let gq = rng.random::<f64>() * 4.0 + 0.1;
            let g = FrictionTensor::new(gp, gq, u).unwrap();
            let s = rng.random::<f64>() * 3.0 - 1.5;
            let t = rng.random::<f64>() * 3.0 - 1.5;
            let a = g.power(s).unwrap().apply(g.power(t).unwrap().apply(v));
            let b = g.power(s + t).unwrap().apply(v);
            dev_power = dev_power.max((a - b).norm() / b.norm().max(1e-9));

            let dt1 = rng.random::<f64>() * 2.0;
            let dt2 = rng.random::<f64>() * 2.0;
            let mass = rng.random::<f64>() * 2.0 + 0.2;
            let two = g
                .green_function(mass, dt1)
                .apply(g.green_function(mass, dt2).apply(v));
            let one = g.green_function(mass, dt1 + dt2).apply(v);
            dev_semigroup = dev_semigroup.max((two - one).norm() / one.norm().max(1e-9));
        }
        checks.push(OracleReport::absolute("friction_projector_laws", dev_proj, 0.0, 1e-12));
        checks.push(OracleReport::absolute("friction_power_law", dev_power, 0.0, 1e-12));
        checks.push(OracleReport::absolute("friction_green_semigroup", dev_semigroup, 0.0, 1e-12));
    }

    // Sphere preservation over 1e6 inertial steps.
    {
        let bath = BathParams::classical(1.0, 1.0, 2.0, 1.0);
        let mut state = RodState::at_rest(Vec3::Z);
        let mut rng = RngStream::new(110, 0).rng();
        let dt = 0.005;
        let mut dev: f64 = 0.0;
        for _ in 0..1_000_000 {
            step_momentum_inertial(&mut state, &r, &bath, dt, &mut rng);
            step_rotation_inertial(&mut state, &r, &bath, dt, &mut rng);
            dev = dev.max((state.u.norm() - 1.0).abs());
        }
        checks.push(OracleReport::absolute("sphere_preservation", dev, 0.0, 1e-9));
    }

    // Accumulator merge associativity and split-half identity on synthetic
    // trajectories.
    {
        use rand::Rng;
        let times: Vec<f64> = (0..12).map(|k| 0.3 * k as f64).collect();
        let mut rng = RngStream::new(111, 0).rng();
        let trajs: Vec<Trajectory> = (0..1000)
            .map(|_| {
                let states: Vec<RodState> = times
                    .iter()
                    .map(|&t| {
                        let mut s = RodState::at_rest(
                            Vec3::new(
                                rng.random::<f64>() - 0.5,
                                rng.random::<f64>() - 0.5,
                                rng.random::<f64>() - 0.5,
                            )
                            .normalized(),
                        );
                        s.r = Vec3::new(rng.random(), rng.random(), rng.random()) * t;
                        s.p = Vec3::new(rng.random(), rng.random(), rng.random());
                        s.t = t;
                        s
                    })
                    .collect();
                Trajectory {
                    times: times.clone(),
                    states,
                }
            })
            .collect();
        let fresh = || EnsembleAccumulator::new(times.clone(), 2, 1.0);
        let acc_of = |slice: &[Trajectory]| {
            let mut a = fresh();
            for t in slice {
                a.accumulate(t, &r).unwrap();
            }
            a
        };
        let single = acc_of(&trajs);
        let merged = acc_of(&trajs[..500]).merge(&acc_of(&trajs[500..]));
        let assoc_l = acc_of(&trajs[..300])
            .merge(&acc_of(&trajs[300..700]))
            .merge(&acc_of(&trajs[700..]));
        let assoc_r = acc_of(&trajs[..300])
            .merge(&acc_of(&trajs[300..700]).merge(&acc_of(&trajs[700..])));
        let mut dev: f64 = 0.0;
        for (a, b) in [(&single, &merged), (&assoc_l, &assoc_r)] {
            for (x, y) in a.msd().iter().zip(b.msd()) {
                dev = dev.max((x - y).abs() / x.abs().max(1.0));
            }
            for (x, y) in a.energy().iter().zip(b.energy()) {
                dev = dev.max((x - y).abs() / x.abs().max(1.0));
            }
        }
        checks.push(OracleReport::absolute("accumulator_merge", dev, 0.0, 1e-12));
    }

    // Bit-exact determinism of a parallel ensemble under a fixed seed, and
    // of the colored-noise propagation path.
    {
        let bath = BathParams::classical(1.0, 1.0, 2.0, 1.0);
        let cfg = IntegratorConfig::new(Mode::Overdamped, 0.01, 300, 10);
        let opts = EnsembleOptions {
            n_trajectories: 500,
            seed: 112,
            initial: InitialCondition::Equilibrium,
            origin_stride: 3,
            equil_time: 0.0,
        };
        let a = run_ensemble(&r, &bath, &cfg, &opts).unwrap();
        let b = run_ensemble(&r, &bath, &cfg, &opts).unwrap();
        let mut dev: f64 = 0.0;
        for (x, y) in a.merged.msd().iter().zip(b.merged.msd()) {
            dev = dev.max((x - y).abs());
        }
        for (x, y) in a.merged.orient_corr().iter().zip(b.merged.orient_corr()) {
            dev = dev.max((x - y).abs());
        }
        checks.push(OracleReport::absolute("seed_determinism", dev, 0.0, 0.0));

        let qbath = BathParams::quantum(0.0, 1.0, 1.0, 1.0, 20.0);
        let qcfg = IntegratorConfig::new(Mode::Inertial, 0.008, 200, 20);
        let initial = RodState::at_rest(Vec3::Z);
        let qa = propagate(&initial, &r, &qbath, &qcfg, &mut RngStream::new(118, 0).rng()).unwrap();
        let qb = propagate(&initial, &r, &qbath, &qcfg, &mut RngStream::new(118, 0).rng()).unwrap();
        let mut qdev: f64 = 0.0;
        for (sa, sb) in qa.states.iter().zip(&qb.states) {
            qdev = qdev.max((sa.p - sb.p).norm()).max((sa.omega - sb.omega).norm());
        }
        checks.push(OracleReport::absolute("quantum_determinism", qdev, 0.0, 0.0));
    }

    // Overdamped and inertial MSD agree at long times. The comparison needs
    // the axis to stay put on the momentum relaxation time (slow rotation,
    // D_r = 0.01 here): fast rotation averages the anisotropic friction and
    // genuinely lowers the inertial diffusivity below the frozen-axis law.
    {
        let long_rod = RodParams::new(1.0, 12f64.sqrt()); // I = 1
        let bath = BathParams::classical(1.0, 2.0, 4.0, 100.0);
        let inertial_cfg = IntegratorConfig::new(Mode::Inertial, 0.001, 40_000, 400);
        let inertial = run_ensemble(
            &long_rod,
            &bath,
            &inertial_cfg,
            &EnsembleOptions {
                n_trajectories: 1500,
                seed: 113,
                initial: InitialCondition::Equilibrium,
                origin_stride: 3,
                equil_time: 0.0,
            },
        )
        .unwrap();
        let overdamped_cfg = IntegratorConfig::new(Mode::Overdamped, 0.01, 4000, 40);
        let overdamped = run_ensemble(
            &long_rod,
            &bath,
            &overdamped_cfg,
            &EnsembleOptions {
                n_trajectories: 1500,
                seed: 114,
                initial: InitialCondition::Equilibrium,
                origin_stride: 2,
                equil_time: 0.0,
            },
        )
        .unwrap();
        let msd_inertial = inertial.merged.msd();
        let msd_overdamped = overdamped.merged.msd();
        let a = window_mean(&inertial.merged, &msd_inertial, 32.0, 40.0);
        let b = window_mean(&overdamped.merged, &msd_overdamped, 32.0, 40.0);
        checks.push(OracleReport::relative("mode_consistency_msd", a, b, 0.05));
    }

    // Brute-force Euler orientation oracle against the rotation-based
    // update, after dt-halving has stabilized.
    {
        let bath = BathParams::classical(1.0, 1.0, 1.0, 1.0);
        let coarse = euler_orientation_rate(&bath, 0.002, 1.0, 20_000, 115);
        let fine = euler_orientation_rate(&bath, 0.001, 1.0, 20_000, 116);
        checks.push(OracleReport::relative("euler_oracle_dt_stability", coarse, fine, 0.025));

        let cfg = IntegratorConfig::new(Mode::Overdamped, 0.01, 100, 5);
        let opts = EnsembleOptions {
            n_trajectories: 20_000,
            seed: 117,
            initial: InitialCondition::Equilibrium,
            origin_stride: 10,
            equil_time: 0.0,
        };
        let run = run_ensemble(&r, &bath, &cfg, &opts).unwrap();
        let rotation = windowed_rate(run.merged.lag_times(), &run.merged.orient_corr());
        checks.push(OracleReport::relative("euler_oracle_vs_rotation", fine, rotation, 0.05));
    }

    Criterion {
        number: 8,
        name: "property suites",
        checks,
    }
}
