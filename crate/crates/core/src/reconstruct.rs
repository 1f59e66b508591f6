//! Attitude reconstruction from the estimated body vectors and the nominal
//! inertial references.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::so3::{Mat3, RotationMatrix, Vec3};

/// Below this, `|α̂|` is treated as zero.
pub const ALPHA_ZERO_THRESHOLD: f64 = 1e-9;
/// Relative threshold on `|α̂ × β̂| / (|α̂||β̂|)` for collinearity.
pub const COLLINEAR_THRESHOLD: f64 = 1e-9;

/// Orthonormal frame built from two independent inertial references:
/// columns `α_i`, `α_i × β_i`, `α_i × (α_i × β_i)`, each normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceBasis {
    pub alpha_i: Vec3,
    pub beta_i: Vec3,
    norms: Vec3,
    r_i: RotationMatrix,
}

impl ReferenceBasis {
    pub fn new(alpha_i: Vec3, beta_i: Vec3) -> Result<Self> {
        if !alpha_i.iter().chain(beta_i.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("reference vectors".into()));
        }
        let c = alpha_i.cross(&beta_i);
        let cross_norm = c.norm();
        if cross_norm <= 1e-9 {
            return Err(Error::DegenerateReferences { cross_norm });
        }
        let d = alpha_i.cross(&c);
        let norms = Vec3::new(alpha_i.norm(), cross_norm, d.norm());
        let frame = Mat3::from_columns(&[alpha_i / norms.x, c / norms.y, d / norms.z]);
        Ok(Self { alpha_i, beta_i, norms, r_i: RotationMatrix::from_matrix_unchecked(frame) })
    }

    /// `R_i`.
    pub fn frame(&self) -> &RotationMatrix {
        &self.r_i
    }

    /// `(|α_i|, |α_i × β_i|, |α_i × (α_i × β_i)|)`.
    pub fn norms(&self) -> Vec3 {
        self.norms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateFlag {
    None,
    AlphaZero,
    Collinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructedAttitude {
    /// Unprojected estimate; orthogonal only asymptotically.
    pub r_tilde: Mat3,
    pub r_hat: RotationMatrix,
    pub degenerate: DegenerateFlag,
}

/// `R̃` with `R̃ᵀ = (α̂/|α_i|, α̂×β̂/|α_i×β_i|, α̂×(α̂×β̂)/|α_i×(α_i×β_i)|) R_iᵀ`.
pub fn reconstruct_tilde(alpha_hat: &Vec3, beta_hat: &Vec3, basis: &ReferenceBasis) -> Mat3 {
    let c = alpha_hat.cross(beta_hat);
    let d = alpha_hat.cross(&c);
    let n = basis.norms;
    let cols = Mat3::from_columns(&[alpha_hat / n.x, c / n.y, d / n.z]);
    basis.r_i.matrix() * cols.transpose()
}

/// Orthogonal polar factor of `R̃`, computed in closed form from the column
/// structure of `R̃ᵀ`. Degenerate inputs get a deterministic completion and a flag.
pub fn project_polar(r_tilde: &Mat3, alpha_hat: &Vec3, beta_hat: &Vec3, basis: &ReferenceBasis) -> ReconstructedAttitude {
    let (frame, degenerate) = estimated_frame(alpha_hat, beta_hat);
    let r_hat = match frame {
        Some(f) => basis.r_i.matrix() * f.transpose(),
        None => *basis.r_i.matrix(),
    };
    ReconstructedAttitude {
        r_tilde: *r_tilde,
        r_hat: RotationMatrix::from_matrix_unchecked(r_hat),
        degenerate,
    }
}

/// `reconstruct_tilde` followed by `project_polar`.
pub fn reconstruct(alpha_hat: &Vec3, beta_hat: &Vec3, basis: &ReferenceBasis) -> ReconstructedAttitude {
    project_polar(&reconstruct_tilde(alpha_hat, beta_hat, basis), alpha_hat, beta_hat, basis)
}

/// Direct orthonormal frame `(α̂/|α̂|, ...)` in body axes, `None` when `α̂ ≈ 0`.
fn estimated_frame(alpha_hat: &Vec3, beta_hat: &Vec3) -> (Option<Mat3>, DegenerateFlag) {
    let a_norm = alpha_hat.norm();
    if !(a_norm >= ALPHA_ZERO_THRESHOLD) {
        return (None, DegenerateFlag::AlphaZero);
    }
    let e1 = alpha_hat / a_norm;
    let c = alpha_hat.cross(beta_hat);
    let c_norm = c.norm();
    if !(c_norm > COLLINEAR_THRESHOLD * a_norm * beta_hat.norm()) {
        // Complete e1 with the coordinate axis least aligned with it.
        let i = e1.iamin();
        let axis = Vec3::ith(i, 1.0);
        let e2 = (axis - e1 * e1.dot(&axis)).normalize();
        let e3 = e1.cross(&e2);
        return (Some(Mat3::from_columns(&[e1, e2, e3])), DegenerateFlag::Collinear);
    }
    let e2 = c / c_norm;
    let d = alpha_hat.cross(&c);
    let e3 = d / d.norm();
    (Some(Mat3::from_columns(&[e1, e2, e3])), DegenerateFlag::None)
}

/// Geodesic angle between two rotations, radians in `[0, π]`.
pub fn attitude_error_angle(r_hat: &RotationMatrix, r_true: &RotationMatrix) -> f64 {
    let c = ((r_hat.matrix().tr_mul(r_true.matrix())).trace() - 1.0) / 2.0;
    c.clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::random_rotation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn paper_basis() -> ReferenceBasis {
        ReferenceBasis::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)).unwrap()
    }

    #[test]
    fn basis_frame_is_a_rotation() {
        let b = paper_basis();
        assert!(b.frame().defect() < 1e-15);
        assert!(ReferenceBasis::new(Vec3::z(), Vec3::z() * 3.0).is_err());
    }

    #[test]
    fn exact_estimates_reproduce_identity() {
        let b = paper_basis();
        let rt = reconstruct_tilde(&b.alpha_i, &b.beta_i, &b);
        assert!((rt - Mat3::identity()).norm() < 1e-15);
        let rec = project_polar(&rt, &b.alpha_i, &b.beta_i, &b);
        assert_eq!(rec.degenerate, DegenerateFlag::None);
        assert!((rec.r_hat.matrix() - rt).norm() < 1e-15);
    }

    #[test]
    fn exact_estimates_reproduce_random_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = ReferenceBasis::new(Vec3::new(0.3, -1.2, 2.0), Vec3::new(1.5, 0.4, 0.1)).unwrap();
        for _ in 0..200 {
            let r = random_rotation(&mut rng);
            let a = r.apply_transpose(&b.alpha_i);
            let bb = r.apply_transpose(&b.beta_i);
            let rt = reconstruct_tilde(&a, &bb, &b);
            assert!((rt - r.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn scaled_estimates_scale_columns() {
        let b = paper_basis();
        let rt = reconstruct_tilde(&(b.alpha_i * 2.0), &(b.beta_i * 2.0), &b);
        let ri = b.frame().matrix();
        let expected = ri * Mat3::from_diagonal(&Vec3::new(2.0, 4.0, 8.0)) * ri.transpose();
        assert!((rt.transpose() - expected).norm() < 1e-14);
        let rec = project_polar(&rt, &(b.alpha_i * 2.0), &(b.beta_i * 2.0), &b);
        assert!((rec.r_hat.matrix() - Mat3::identity()).norm() < 1e-14);
    }

    #[test]
    fn alpha_zero_falls_back_to_reference_frame() {
        let b = paper_basis();
        let rec = reconstruct(&Vec3::zeros(), &Vec3::new(1.0, 2.0, 3.0), &b);
        assert_eq!(rec.degenerate, DegenerateFlag::AlphaZero);
        assert_eq!(rec.r_hat, *b.frame());
        assert_eq!(rec.r_tilde, Mat3::zeros());
    }

    #[test]
    fn collinear_completion_is_direct_and_keeps_alpha() {
        let b = paper_basis();
        for (a, bb) in [
            (Vec3::new(0.0, 0.0, 2.0), Vec3::new(0.0, 0.0, -1.0)),
            (Vec3::new(1.0, 1.0, 0.0), Vec3::new(2.0, 2.0, 0.0)),
            (Vec3::new(0.3, -0.2, 0.1), Vec3::zeros()),
        ] {
            let rec = reconstruct(&a, &bb, &b);
            assert_eq!(rec.degenerate, DegenerateFlag::Collinear);
            assert!(rec.r_hat.defect() < 1e-14);
            // R̂ᵀ α_i/|α_i| = α̂/|α̂|.
            let first = rec.r_hat.apply_transpose(&b.alpha_i.normalize());
            assert!((first - a.normalize()).norm() < 1e-14);
            assert_eq!(reconstruct(&a, &bb, &b), rec);
        }
    }

    #[test]
    fn error_angle() {
        let i = RotationMatrix::identity();
        assert_eq!(attitude_error_angle(&i, &i), 0.0);
        let rz = RotationMatrix::from_axis_angle(&Vec3::z(), PI / 2.0);
        assert!((attitude_error_angle(&rz, &i) - PI / 2.0).abs() < 1e-15);
        let rx = RotationMatrix::from_axis_angle(&Vec3::x(), PI);
        assert!((attitude_error_angle(&rx, &i) - PI).abs() < 1e-7);
    }

    #[test]
    fn error_angle_is_left_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let (q, a, b) = (random_rotation(&mut rng), random_rotation(&mut rng), random_rotation(&mut rng));
            let lhs = attitude_error_angle(&q.compose(&a), &q.compose(&b));
            let rhs = attitude_error_angle(&a, &b);
            // acos is ill-conditioned near 0 and π; compare cosines there.
            assert!((lhs.cos() - rhs.cos()).abs() < 1e-12);
            if rhs > 1e-3 && rhs < PI - 1e-3 {
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }
}
