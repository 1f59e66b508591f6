//! Small fixed-size rotation kernel.
//!
//! Rotations follow the body-to-inertial convention `Ṙ = R ω×`, where `ω` is the
//! body angular rate. Vectors expressed in body axes are obtained from inertial
//! ones with `Rᵀ`.

use std::f64::consts::PI;

use nalgebra::{Quaternion, UnitQuaternion};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Tolerance used when validating orthonormality and determinant.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// `|R₃₁|` threshold above which the ZYX decomposition is treated as gimbal locked.
pub const GIMBAL_LOCK_THRESHOLD: f64 = 1.0 - 1e-9;

/// Skew-symmetric matrix `S` such that `S x = v × x`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(
        0.0, -v.z, v.y, //
        v.z, 0.0, -v.x, //
        -v.y, v.x, 0.0,
    )
}

/// Element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Validates `m` against `mᵀm = I` and `det m = 1`.
    pub fn new(m: Mat3) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("rotation matrix".into()));
        }
        let ortho = (m.transpose() * m - Mat3::identity()).norm();
        let det = m.determinant();
        if ortho > ROTATION_TOLERANCE || (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(Error::NotARotation { ortho, det });
        }
        Ok(Self(m))
    }

    /// Wraps `m` without checking. Callers must guarantee the SO(3) invariants.
    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        Self::identity().rotate_exp(&(axis * (angle / n)), 1.0)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self(self.0 * rhs.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn apply_transpose(&self, v: &Vec3) -> Vec3 {
        self.0.tr_mul(v)
    }

    /// Exact flow of `Ṙ = R ω×` over `dt` for constant `omega`.
    pub fn rotate_exp(&self, omega: &Vec3, dt: f64) -> Self {
        Self(self.0 * exp_so3(&(omega * dt)))
    }

    /// Largest of the orthonormality and determinant defects.
    pub fn defect(&self) -> f64 {
        let ortho = (self.0.transpose() * self.0 - Mat3::identity()).norm();
        ortho.max((self.0.determinant() - 1.0).abs())
    }
}

/// Rodrigues' formula for `exp(φ×)`.
pub fn exp_so3(phi: &Vec3) -> Mat3 {
    let theta2 = phi.norm_squared();
    let k = skew(phi);
    let (a, b) = if theta2 < 1e-8 {
        // Taylor expansions of sinθ/θ and (1-cosθ)/θ², accurate past f64 precision here.
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Mat3::identity() + k * a + k * k * b
}

/// Roll `phi`, pitch `theta`, yaw `psi`, radians, composed as `Rz(ψ) Ry(θ) Rx(φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }
}

pub fn euler_to_rot(e: &EulerAngles) -> RotationMatrix {
    let (sf, cf) = e.phi.sin_cos();
    let (st, ct) = e.theta.sin_cos();
    let (sp, cp) = e.psi.sin_cos();
    RotationMatrix(Mat3::new(
        cp * ct,
        cp * st * sf - sp * cf,
        cp * st * cf + sp * sf,
        sp * ct,
        sp * st * sf + cp * cf,
        sp * st * cf - cp * sf,
        -st,
        ct * sf,
        ct * cf,
    ))
}

/// Body angular velocity for ZYX angle rates `(φ̇, θ̇, ψ̇)` at attitude `e`.
pub fn euler_rates_to_body(e: &EulerAngles, rates: &Vec3) -> Vec3 {
    let (sf, cf) = e.phi.sin_cos();
    let (st, ct) = e.theta.sin_cos();
    let (dphi, dtheta, dpsi) = (rates.x, rates.y, rates.z);
    Vec3::new(
        dphi - dpsi * st,
        dtheta * cf + dpsi * ct * sf,
        -dtheta * sf + dpsi * ct * cf,
    )
}

/// ZYX decomposition. The boolean is `true` near gimbal lock, in which case `psi` is
/// set to zero and the whole heading is carried by `phi`.
pub fn rot_to_euler(r: &RotationMatrix) -> (EulerAngles, bool) {
    let m = &r.0;
    let r31 = m[(2, 0)].clamp(-1.0, 1.0);
    if r31.abs() > GIMBAL_LOCK_THRESHOLD {
        let theta = -r31.signum() * PI / 2.0;
        let phi = (-r31.signum() * m[(0, 1)]).atan2(m[(1, 1)]);
        return (EulerAngles::new(wrap_pi(phi), theta, 0.0), true);
    }
    let theta = (-r31).asin();
    let phi = m[(2, 1)].atan2(m[(2, 2)]);
    let psi = m[(1, 0)].atan2(m[(0, 0)]);
    (EulerAngles::new(wrap_pi(phi), theta, wrap_pi(psi)), false)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Haar-distributed rotation from a normalized Gaussian quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix {
    loop {
        let q = Quaternion::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        if q.norm() > 1e-6 {
            let m = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
            return RotationMatrix(m.into_inner());
        }
    }
}

/// Random vector with Gaussian direction and norm uniform in `[0, max_norm]`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, max_norm: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-9 {
            return v * (rng.gen::<f64>() * max_norm / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn skew_matches_cross_product() {
        let s = skew(&Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(s * Vec3::x(), Vec3::y());
        assert_eq!(skew(&Vec3::zeros()), Mat3::zeros());
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(skew(&v) * Vec3::new(4.0, 5.0, 6.0), Vec3::new(-3.0, 6.0, -3.0));
        assert_eq!(skew(&v).transpose(), -skew(&v));
    }

    #[test]
    fn rotate_exp_quarter_turn_about_z() {
        let r = RotationMatrix::identity().rotate_exp(&Vec3::new(0.0, 0.0, PI / 2.0), 1.0);
        assert_relative_eq!(r.apply(&Vec3::x()), Vec3::y(), epsilon = 1e-15);
        assert_eq!(
            RotationMatrix::identity().rotate_exp(&Vec3::zeros(), 0.1),
            RotationMatrix::identity()
        );
    }

    #[test]
    fn rotate_exp_is_a_one_parameter_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            let w = random_vector(&mut rng, 10.0);
            let once = r.rotate_exp(&w, 0.3);
            let twice = r.rotate_exp(&w, 0.15).rotate_exp(&w, 0.15);
            assert!((once.matrix() - twice.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn small_angle_branch_is_continuous() {
        let w = Vec3::new(1e-5, -2e-5, 3e-5);
        let series = exp_so3(&w);
        let theta = w.norm();
        let k = skew(&w);
        let closed = Mat3::identity()
            + k * (theta.sin() / theta)
            + k * k * ((1.0 - theta.cos()) / (theta * theta));
        assert!((series - closed).norm() < 1e-15);
    }

    #[test]
    fn euler_identity_and_yaw() {
        assert_eq!(euler_to_rot(&EulerAngles::default()).matrix(), &Mat3::identity());
        let rz = RotationMatrix::from_axis_angle(&Vec3::z(), PI / 2.0);
        let (e, locked) = rot_to_euler(&rz);
        assert!(!locked);
        assert_relative_eq!(e.psi, PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(e.phi, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e.theta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn euler_rates_match_differentiated_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-5;
        for _ in 0..200 {
            let e = EulerAngles::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.4..1.4), rng.gen_range(-3.0..3.0));
            let d = random_vector(&mut rng, 2.0);
            let at = |s: f64| *euler_to_rot(&EulerAngles::new(e.phi + s * d.x, e.theta + s * d.y, e.psi + s * d.z)).matrix();
            let r_dot = (at(h) - at(-h)) / (2.0 * h);
            let w_hat = at(0.0).transpose() * r_dot;
            let w = Vec3::new(w_hat[(2, 1)], w_hat[(0, 2)], w_hat[(1, 0)]);
            assert!((euler_rates_to_body(&e, &d) - w).norm() < 1e-8);
        }
    }

    #[test]
    fn euler_round_trip() {
        let e = EulerAngles::new(0.3, -0.5, 1.2);
        let (back, locked) = rot_to_euler(&euler_to_rot(&e));
        assert!(!locked);
        assert_relative_eq!(back.phi, e.phi, epsilon = 1e-9);
        assert_relative_eq!(back.theta, e.theta, epsilon = 1e-9);
        assert_relative_eq!(back.psi, e.psi, epsilon = 1e-9);
    }

    #[test]
    fn gimbal_lock_sets_yaw_to_zero() {
        for &theta in &[PI / 2.0, -PI / 2.0] {
            let e = EulerAngles::new(0.4, theta, 0.0);
            let r = euler_to_rot(&e);
            let (back, locked) = rot_to_euler(&r);
            assert!(locked);
            assert_eq!(back.psi, 0.0);
            assert!((euler_to_rot(&back).matrix() - r.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn wrap_pi_range() {
        assert_eq!(wrap_pi(-PI), PI);
        assert_relative_eq!(wrap_pi(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_eq!(wrap_pi(0.25), 0.25);
    }

    #[test]
    fn new_rejects_non_rotations() {
        assert!(RotationMatrix::new(Mat3::identity() * 2.0).is_err());
        assert!(RotationMatrix::new(-Mat3::identity()).is_err());
        assert!(RotationMatrix::new(Mat3::identity()).is_ok());
    }

    #[test]
    fn random_rotations_are_valid_and_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let r = random_rotation(&mut rng);
            assert!((r.matrix().transpose() * r.matrix() - Mat3::identity()).norm() < 1e-12);
            assert!((r.matrix().determinant() - 1.0).abs() < 1e-12);
        }
        // Haar measure: E[tr R] = 0.
        let n = 100_000;
        let mean = (0..n)
            .map(|_| random_rotation(&mut rng).matrix().trace())
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.05, "mean trace {mean}");
    }
}
