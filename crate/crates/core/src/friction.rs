//! Closed-form algebra of the anisotropic friction tensor
//! `gamma_par * uu + gamma_perp * (1 - uu)`.
//!
//! The tensor is kept in eigen-decomposed form (two eigenvalues plus the axis)
//! rather than as a dense matrix, so real powers and the matrix exponential of
//! the translational Green function are exact one-liners. Dense 3x3 matrices
//! appear only in the test oracles.

use thiserror::Error;

use crate::vec3::Vec3;

/// Axis validation tolerance; axes within this distance of unit length are
/// silently renormalized, anything further is an error.
pub const AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FrictionError {
    #[error("axis is not a unit vector (|u| = {0})")]
    NonUnitAxis(f64),
    #[error("negative power of a singular friction tensor")]
    SingularTensor,
}

fn checked_axis(u: Vec3) -> Result<Vec3, FrictionError> {
    let n = u.norm();
    if (n - 1.0).abs() > AXIS_TOL {
        return Err(FrictionError::NonUnitAxis(n));
    }
    Ok(u / n)
}

/// Split `v` into its components along and transverse to the unit axis `u`:
/// `v_par = (v.u) u`, `v_perp = v - v_par`.
pub fn decompose(v: Vec3, u: Vec3) -> Result<(Vec3, Vec3), FrictionError> {
    let u = checked_axis(u)?;
    let v_par = u * v.dot(u);
    Ok((v_par, v - v_par))
}

/// Anisotropic friction tensor with eigenvalues `{gamma_par, gamma_perp,
/// gamma_perp}` and eigenaxis `axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionTensor {
    gamma_par: f64,
    gamma_perp: f64,
    axis: Vec3,
}

impl FrictionTensor {
    pub fn new(gamma_par: f64, gamma_perp: f64, axis: Vec3) -> Result<Self, FrictionError> {
        assert!(
            gamma_par >= 0.0 && gamma_perp >= 0.0,
            "friction eigenvalues must be non-negative"
        );
        Ok(FrictionTensor {
            gamma_par,
            gamma_perp,
            axis: checked_axis(axis)?,
        })
    }

    pub fn gamma_par(&self) -> f64 {
        self.gamma_par
    }

    pub fn gamma_perp(&self) -> f64 {
        self.gamma_perp
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    /// Apply the tensor: `gamma_par * v_par + gamma_perp * v_perp`.
    pub fn apply(&self, v: Vec3) -> Vec3 {
        let v_par = self.axis * v.dot(self.axis);
        v_par * self.gamma_par + (v - v_par) * self.gamma_perp
    }

    /// Real power, acting on the eigenvalues only. A negative power of a
    /// tensor with a zero eigenvalue is singular.
    pub fn power(&self, s: f64) -> Result<Self, FrictionError> {
        if s < 0.0 && (self.gamma_par == 0.0 || self.gamma_perp == 0.0) {
            return Err(FrictionError::SingularTensor);
        }
        Ok(FrictionTensor {
            gamma_par: self.gamma_par.powf(s),
            gamma_perp: self.gamma_perp.powf(s),
            axis: self.axis,
        })
    }

    /// Matrix exponential `exp(-Gamma dt / mass)` of the momentum relaxation,
    /// again a friction tensor with the same axis.
    pub fn green_function(&self, mass: f64, dt: f64) -> Self {
        assert!(mass > 0.0 && dt >= 0.0);
        FrictionTensor {
            gamma_par: (-self.gamma_par * dt / mass).exp(),
            gamma_perp: (-self.gamma_perp * dt / mass).exp(),
            axis: self.axis,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;
    use rand_distr::{Distribution, UnitSphere};

    // Dense 3x3 oracle machinery, test-only.
    type Mat3 = [[f64; 3]; 3];

    fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
        let mut c = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    fn mat_add(a: &Mat3, b: &Mat3, sb: f64) -> Mat3 {
        let mut c = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = a[i][j] + sb * b[i][j];
            }
        }
        c
    }

    fn identity() -> Mat3 {
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    }

    fn projector_par(u: Vec3) -> Mat3 {
        let u = u.as_array();
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = u[i] * u[j];
            }
        }
        m
    }

    fn dense_tensor(gp: f64, gq: f64, u: Vec3) -> Mat3 {
        let pp = projector_par(u);
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                m[i][j] = gp * pp[i][j] + gq * (id - pp[i][j]);
            }
        }
        m
    }

    fn mat_norm(m: &Mat3) -> f64 {
        let mut s: f64 = 0.0;
        for row in m {
            for x in row {
                s = s.max(x.abs());
            }
        }
        s
    }

    // General-purpose matrix exponential: scaling and squaring with a
    // truncated Taylor series.
    fn mat_exp(a: &Mat3) -> Mat3 {
        let mut s = 0u32;
        while mat_norm(a) / f64::powi(2.0, s as i32) > 0.25 {
            s += 1;
        }
        let scale = 1.0 / f64::powi(2.0, s as i32);
        let mut scaled = *a;
        for row in &mut scaled {
            for x in row {
                *x *= scale;
            }
        }
        let mut result = identity();
        let mut term = identity();
        for k in 1..25 {
            term = mat_mul(&term, &scaled);
            for row in &mut term {
                for x in row {
                    *x /= k as f64;
                }
            }
            result = mat_add(&result, &term, 1.0);
        }
        for _ in 0..s {
            result = mat_mul(&result, &result);
        }
        result
    }

    fn random_axis<R: Rng>(rng: &mut R) -> Vec3 {
        Vec3::from(UnitSphere.sample(rng))
    }

    fn random_vec<R: Rng>(rng: &mut R) -> Vec3 {
        Vec3::new(
            rng.random::<f64>() * 4.0 - 2.0,
            rng.random::<f64>() * 4.0 - 2.0,
            rng.random::<f64>() * 4.0 - 2.0,
        )
    }

    #[test]
    fn decompose_axis_aligned() {
        let (par, perp) = decompose(Vec3::new(1.0, 0.0, 1.0), Vec3::Z).unwrap();
        assert_eq!(par, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(perp, Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn decompose_parallel_input_has_no_transverse_part() {
        let u = Vec3::new(0.3, -0.4, 0.866_025_403_784_438_6).normalized();
        let (_, perp) = decompose(u * 2.5, u).unwrap();
        assert!(perp.norm() < 1e-15);
    }

    #[test]
    fn decompose_oblique_matches_projector_oracle() {
        let u = Vec3::new(1.0, 1.0, 0.0).normalized();
        let v = Vec3::new(1.0, 0.0, 0.0);
        let (par, perp) = decompose(v, u).unwrap();
        // Oracle: dense projector matrix applied to v.
        let oracle_par = mat_vec(&projector_par(u), v);
        assert!((par - oracle_par).norm() < 1e-15);
        assert!((par - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
        assert!((perp - Vec3::new(0.5, -0.5, 0.0)).norm() < 1e-15);
        assert!(par.dot(perp).abs() < 1e-15);
    }

    #[test]
    fn decompose_rejects_far_from_unit_axis() {
        let err = decompose(Vec3::X, Vec3::new(0.0, 0.0, 2.0)).unwrap_err();
        assert!(matches!(err, FrictionError::NonUnitAxis(_)));
        // within tolerance: silently renormalized
        let u = Vec3::new(0.0, 0.0, 1.0 + 5e-10);
        let (par, _) = decompose(Vec3::new(0.0, 0.0, 3.0), u).unwrap();
        assert!((par.norm() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn apply_diagonal_case() {
        let g = FrictionTensor::new(2.0, 5.0, Vec3::Z).unwrap();
        assert_eq!(g.apply(Vec3::new(1.0, 0.0, 1.0)), Vec3::new(5.0, 0.0, 2.0));
    }

    #[test]
    fn apply_isotropic_degeneracy() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..20 {
            let u = random_axis(&mut rng);
            let v = random_vec(&mut rng);
            let g = FrictionTensor::new(1.7, 1.7, u).unwrap();
            assert!((g.apply(v) - v * 1.7).norm() < 1e-14 * v.norm().max(1.0));
        }
    }

    #[test]
    fn apply_oblique_matches_dense_oracle() {
        let u = Vec3::new(1.0, 1.0, 0.0).normalized();
        let g = FrictionTensor::new(1.0, 3.0, u).unwrap();
        let v = Vec3::new(1.0, 0.0, 0.0);
        let got = g.apply(v);
        assert!((got - Vec3::new(2.0, -1.0, 0.0)).norm() < 1e-14);
        let oracle = mat_vec(&dense_tensor(1.0, 3.0, u), v);
        assert!((got - oracle).norm() < 1e-14);
    }

    #[test]
    fn power_half_and_zero() {
        let g = FrictionTensor::new(4.0, 9.0, Vec3::X).unwrap();
        let h = g.power(0.5).unwrap();
        assert_eq!((h.gamma_par(), h.gamma_perp()), (2.0, 3.0));
        let id = g.power(0.0).unwrap();
        assert_eq!((id.gamma_par(), id.gamma_perp()), (1.0, 1.0));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = RngStream::new(2, 0).rng();
        for _ in 0..50 {
            let u = random_axis(&mut rng);
            let gp = rng.random::<f64>() * 3.0 + 0.1;
            let gq = rng.random::<f64>() * 3.0 + 0.1;
            let g = FrictionTensor::new(gp, gq, u).unwrap();
            let ginv = g.power(-1.0).unwrap();
            let v = random_vec(&mut rng);
            let back = ginv.apply(g.apply(v));
            assert!((back - v).norm() <= 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn negative_power_of_singular_tensor_fails() {
        let g = FrictionTensor::new(0.0, 2.0, Vec3::Z).unwrap();
        assert_eq!(g.power(-1.0).unwrap_err(), FrictionError::SingularTensor);
        // non-negative powers of a singular tensor are fine
        assert!(g.power(0.5).is_ok());
    }

    #[test]
    fn green_function_at_zero_lag_is_identity() {
        let g = FrictionTensor::new(1.0, 2.0, Vec3::Y).unwrap();
        let e = g.green_function(1.5, 0.0);
        assert_eq!((e.gamma_par(), e.gamma_perp()), (1.0, 1.0));
    }

    #[test]
    fn green_function_isotropic_is_scalar_decay() {
        let g = FrictionTensor::new(2.0, 2.0, Vec3::Y).unwrap();
        let e = g.green_function(4.0, 1.0);
        let expected = (-0.5f64).exp();
        let v = Vec3::new(0.1, -2.0, 0.7);
        assert!((e.apply(v) - v * expected).norm() < 1e-15);
    }

    #[test]
    fn green_function_matches_matrix_exponential_oracle() {
        let mut rng = RngStream::new(3, 0).rng();
        for _ in 0..50 {
            let u = random_axis(&mut rng);
            let gp = rng.random::<f64>() * 4.0;
            let gq = rng.random::<f64>() * 4.0;
            let mass = rng.random::<f64>() * 2.0 + 0.2;
            let dt = rng.random::<f64>() * 3.0;
            let g = FrictionTensor::new(gp, gq, u).unwrap();
            let e = g.green_function(mass, dt);

            let mut minus = dense_tensor(gp, gq, u);
            for row in &mut minus {
                for x in row {
                    *x *= -dt / mass;
                }
            }
            let oracle = mat_exp(&minus);
            let v = random_vec(&mut rng);
            let got = e.apply(v);
            let want = mat_vec(&oracle, v);
            assert!(
                (got - want).norm() <= 1e-10 * want.norm().max(1.0),
                "green function deviates from matexp oracle: {got:?} vs {want:?}"
            );
        }
    }

    #[test]
    fn projector_algebra_holds_for_random_axes() {
        // P_par^2 = P_par, P_perp^2 = P_perp, P_par P_perp = 0,
        // P_par + P_perp = 1, entrywise within 1e-14, 1000 axes.
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..1000 {
            let u = random_axis(&mut rng);
            let pp = projector_par(u);
            let pq = mat_add(&identity(), &pp, -1.0);
            let d1 = mat_norm(&mat_add(&mat_mul(&pp, &pp), &pp, -1.0));
            let d2 = mat_norm(&mat_add(&mat_mul(&pq, &pq), &pq, -1.0));
            let d3 = mat_norm(&mat_mul(&pp, &pq));
            let sum = mat_add(&pp, &pq, 1.0);
            let d4 = mat_norm(&mat_add(&sum, &identity(), -1.0));
            assert!(d1 < 1e-14 && d2 < 1e-14 && d3 < 1e-14 && d4 < 1e-14);
        }
    }
}
