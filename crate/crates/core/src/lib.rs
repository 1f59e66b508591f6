//! Attitude and gyro-bias estimation from two or more vector measurements and a
//! biased rate gyro.
//!
//! The estimator ([`observer`]) works on the body-frame vectors directly and
//! needs neither the inertial references nor any rotation parametrization. The
//! attitude is rebuilt afterwards from the estimated vectors ([`reconstruct`]).
//! Convergence is backed by a strict Lyapunov function whose coefficients are
//! computed and checked numerically in [`lyapunov`].
//!
//! Modules:
//! - [`so3`]: rotation kernel (skew maps, exact exponential, ZYX Euler angles).
//! - [`truth`]: ground-truth motion and noisy sensor generation.
//! - [`observer`]: the estimator, its linear-injection variant and the n-vector form.
//! - [`reconstruct`]: attitude reconstruction and closed-form polar projection.
//! - [`error_system`] and [`lyapunov`]: error dynamics and stability certificate.
//! - [`scenario`]: configuration-driven runs producing CSV traces.

// `!(x > tol)` is used on purpose so that NaN lands on the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod error_system;
pub mod lyapunov;
pub mod observer;
pub mod reconstruct;
pub mod scenario;
pub mod so3;
pub mod truth;

pub use error::{Error, Result};
pub use error_system::ErrorState;
pub use lyapunov::{find_certificate, Certificate, LyapunovParams, StrictnessCoefficients};
pub use observer::{Gain, Gains, Observer, ObserverMode, ObserverState, VectorChannel};
pub use reconstruct::{DegenerateFlag, ReconstructedAttitude, ReferenceBasis};
pub use scenario::{paper_preset, run_scenario, ScenarioConfig, Summary};
pub use so3::{EulerAngles, Mat3, RotationMatrix, Vec3};
pub use truth::{Measurement, NoiseSpec, SignalSpec, TruthModel, TruthState};
