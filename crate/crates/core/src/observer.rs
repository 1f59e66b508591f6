//! The attitude/bias observer.
//!
//! The state `(α̂, β̂, b̂)` lives in plain `R³ × R³ × R³`; no norm or orthogonality
//! constraint is ever imposed on it. Reference vectors are not an input: the
//! estimator only sees measurements and gains.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::{Mat3, Vec3};
use crate::truth::Measurement;

/// Scalar gain or symmetric positive-definite 3×3 gain matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "GainRepr", into = "GainRepr")]
pub enum Gain {
    Scalar(f64),
    Matrix(Mat3),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GainRepr {
    Scalar(f64),
    Matrix([[f64; 3]; 3]),
}

impl From<GainRepr> for Gain {
    fn from(r: GainRepr) -> Self {
        match r {
            GainRepr::Scalar(k) => Gain::Scalar(k),
            GainRepr::Matrix(rows) => Gain::Matrix(Mat3::from_fn(|i, j| rows[i][j])),
        }
    }
}

impl From<Gain> for GainRepr {
    fn from(g: Gain) -> Self {
        match g {
            Gain::Scalar(k) => GainRepr::Scalar(k),
            Gain::Matrix(m) => GainRepr::Matrix(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))),
        }
    }
}

impl Gain {
    #[inline]
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        match self {
            Gain::Scalar(k) => v * *k,
            Gain::Matrix(m) => m * v,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Gain::Scalar(k) => Some(*k),
            Gain::Matrix(_) => None,
        }
    }

    /// Smallest eigenvalue (the value itself for scalars).
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Gain::Scalar(k) => *k,
            Gain::Matrix(m) => SymmetricEigen::new(*m).eigenvalues.min(),
        }
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        match self {
            Gain::Scalar(k) => {
                if !(k.is_finite() && *k > 0.0) {
                    return Err(Error::InvalidGain { name, reason: format!("{k} is not strictly positive") });
                }
            }
            Gain::Matrix(m) => {
                if !m.iter().all(|x| x.is_finite()) {
                    return Err(Error::InvalidGain { name, reason: "non-finite entry".into() });
                }
                let asym = (m - m.transpose()).norm();
                if asym > 1e-12 * m.norm().max(1.0) {
                    return Err(Error::InvalidGain { name, reason: format!("not symmetric (defect {asym:e})") });
                }
                let min = self.min_eigenvalue();
                if min <= 0.0 {
                    return Err(Error::InvalidGain { name, reason: format!("not positive definite (min eigenvalue {min:e})") });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gains {
    pub k_alpha: Gain,
    pub k_beta: Gain,
    pub l_alpha: Gain,
    pub l_beta: Gain,
}

impl Gains {
    pub fn scalar(k_alpha: f64, k_beta: f64, l_alpha: f64, l_beta: f64) -> Self {
        Self {
            k_alpha: Gain::Scalar(k_alpha),
            k_beta: Gain::Scalar(k_beta),
            l_alpha: Gain::Scalar(l_alpha),
            l_beta: Gain::Scalar(l_beta),
        }
    }

    /// `(k_α, k_β, l_α, l_β) = (10, 10, 0.15, 0.15)`.
    pub fn paper() -> Self {
        Self::scalar(10.0, 10.0, 0.15, 0.15)
    }

    pub fn validate(&self) -> Result<()> {
        self.k_alpha.validate("k_alpha")?;
        self.k_beta.validate("k_beta")?;
        self.l_alpha.validate("l_alpha")?;
        self.l_beta.validate("l_beta")
    }

    /// `(k_α, k_β, l_α, l_β)` when every gain is scalar.
    pub fn as_scalars(&self) -> Option<ScalarGains> {
        Some(ScalarGains {
            k_alpha: self.k_alpha.as_scalar()?,
            k_beta: self.k_beta.as_scalar()?,
            l_alpha: self.l_alpha.as_scalar()?,
            l_beta: self.l_beta.as_scalar()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarGains {
    pub k_alpha: f64,
    pub k_beta: f64,
    pub l_alpha: f64,
    pub l_beta: f64,
}

/// How the rotation term of each vector channel is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverMode {
    /// `v̂ × (ω_m − b̂)`: only estimated quantities are rotated.
    #[default]
    Filtered,
    /// `v̂ × ω_m − v_m × b̂`: the bias correction uses the raw measurement.
    LinearVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverState {
    pub alpha_hat: Vec3,
    pub beta_hat: Vec3,
    pub b_hat: Vec3,
}

impl ObserverState {
    pub fn is_finite(&self) -> bool {
        [self.alpha_hat, self.beta_hat, self.b_hat]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }

    #[inline]
    fn axpy(&self, h: f64, d: &ObserverState) -> ObserverState {
        ObserverState {
            alpha_hat: self.alpha_hat + d.alpha_hat * h,
            beta_hat: self.beta_hat + d.beta_hat * h,
            b_hat: self.b_hat + d.b_hat * h,
        }
    }
}

/// Rotation plus output-injection term of one vector channel.
#[inline]
fn channel_rate(estimate: &Vec3, measured: &Vec3, omega_m: &Vec3, b_hat: &Vec3, k: &Gain, mode: ObserverMode) -> Vec3 {
    let rotation = match mode {
        ObserverMode::Filtered => estimate.cross(&(omega_m - b_hat)),
        ObserverMode::LinearVariant => estimate.cross(omega_m) - measured.cross(b_hat),
    };
    rotation - k.apply(&(estimate - measured))
}

/// Time derivative of the observer state for a held measurement. The returned
/// value uses the [`ObserverState`] layout for `(α̂̇, β̂̇, b̂̇)`.
pub fn observer_derivative(s: &ObserverState, m: &Measurement, g: &Gains, mode: ObserverMode) -> ObserverState {
    let alpha_dot = channel_rate(&s.alpha_hat, &m.alpha_m, &m.omega_m, &s.b_hat, &g.k_alpha, mode);
    let beta_dot = channel_rate(&s.beta_hat, &m.beta_m, &m.omega_m, &s.b_hat, &g.k_beta, mode);
    let mut b_dot = Vec3::zeros();
    b_dot += g.l_alpha.apply(&s.alpha_hat.cross(&m.alpha_m));
    b_dot += g.l_beta.apply(&s.beta_hat.cross(&m.beta_m));
    ObserverState { alpha_hat: alpha_dot, beta_hat: beta_dot, b_hat: b_dot }
}

fn check_step_inputs(dt: f64, m: &Measurement) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {dt}")));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite(format!("measurement at t = {}", m.t)));
    }
    Ok(())
}

/// One RK4 step with the measurement held over `[t, t + dt]`.
pub fn observer_step(s: &ObserverState, m: &Measurement, g: &Gains, mode: ObserverMode, dt: f64) -> Result<ObserverState> {
    check_step_inputs(dt, m)?;
    if !s.is_finite() {
        return Err(Error::NonFinite("observer state".into()));
    }
    let k1 = observer_derivative(s, m, g, mode);
    let k2 = observer_derivative(&s.axpy(0.5 * dt, &k1), m, g, mode);
    let k3 = observer_derivative(&s.axpy(0.5 * dt, &k2), m, g, mode);
    let k4 = observer_derivative(&s.axpy(dt, &k3), m, g, mode);
    let next = ObserverState {
        alpha_hat: s.alpha_hat + (k1.alpha_hat + k2.alpha_hat * 2.0 + k3.alpha_hat * 2.0 + k4.alpha_hat) * (dt / 6.0),
        beta_hat: s.beta_hat + (k1.beta_hat + k2.beta_hat * 2.0 + k3.beta_hat * 2.0 + k4.beta_hat) * (dt / 6.0),
        b_hat: s.b_hat + (k1.b_hat + k2.b_hat * 2.0 + k3.b_hat * 2.0 + k4.b_hat) * (dt / 6.0),
    };
    if !next.is_finite() {
        return Err(Error::NonFinite("observer state after step".into()));
    }
    Ok(next)
}

/// A vector sensor channel for the n-vector form of the observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorChannel {
    pub measured: Vec3,
    pub estimate: Vec3,
    pub k: Gain,
    pub l: Gain,
}

fn n_derivative(estimates: &[Vec3], b_hat: &Vec3, channels: &[VectorChannel], omega_m: &Vec3, mode: ObserverMode, out: &mut [Vec3]) -> Vec3 {
    let mut b_dot = Vec3::zeros();
    for ((c, est), d) in channels.iter().zip(estimates).zip(out.iter_mut()) {
        *d = channel_rate(est, &c.measured, omega_m, b_hat, &c.k, mode);
        b_dot += c.l.apply(&est.cross(&c.measured));
    }
    b_dot
}

/// RK4 step of the observer generalized to any number of vector channels. Each
/// channel's `estimate` is updated in place, as is `b_hat`.
pub fn observer_step_n(channels: &mut [VectorChannel], omega_m: &Vec3, b_hat: &mut Vec3, mode: ObserverMode, dt: f64) -> Result<()> {
    if channels.is_empty() {
        return Err(Error::InvalidArgument("at least one vector channel is required".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {dt}")));
    }
    let finite = |v: &Vec3| v.iter().all(|x| x.is_finite());
    if !finite(omega_m) || !finite(b_hat) || !channels.iter().all(|c| finite(&c.measured) && finite(&c.estimate)) {
        return Err(Error::NonFinite("n-vector observer input".into()));
    }

    let n = channels.len();
    let x0: Vec<Vec3> = channels.iter().map(|c| c.estimate).collect();
    let mut k1 = vec![Vec3::zeros(); n];
    let mut k2 = vec![Vec3::zeros(); n];
    let mut k3 = vec![Vec3::zeros(); n];
    let mut k4 = vec![Vec3::zeros(); n];
    let mut tmp = vec![Vec3::zeros(); n];

    let kb1 = n_derivative(&x0, b_hat, channels, omega_m, mode, &mut k1);
    for i in 0..n {
        tmp[i] = x0[i] + k1[i] * (0.5 * dt);
    }
    let kb2 = n_derivative(&tmp, &(*b_hat + kb1 * (0.5 * dt)), channels, omega_m, mode, &mut k2);
    for i in 0..n {
        tmp[i] = x0[i] + k2[i] * (0.5 * dt);
    }
    let kb3 = n_derivative(&tmp, &(*b_hat + kb2 * (0.5 * dt)), channels, omega_m, mode, &mut k3);
    for i in 0..n {
        tmp[i] = x0[i] + k3[i] * dt;
    }
    let kb4 = n_derivative(&tmp, &(*b_hat + kb3 * dt), channels, omega_m, mode, &mut k4);

    for (i, c) in channels.iter_mut().enumerate() {
        c.estimate = x0[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
    *b_hat += (kb1 + kb2 * 2.0 + kb3 * 2.0 + kb4) * (dt / 6.0);
    Ok(())
}

/// Observer instance: state plus its fixed tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observer {
    pub state: ObserverState,
    gains: Gains,
    mode: ObserverMode,
}

impl Observer {
    pub fn new(state: ObserverState, gains: Gains, mode: ObserverMode) -> Result<Self> {
        gains.validate()?;
        if !state.is_finite() {
            return Err(Error::NonFinite("initial observer state".into()));
        }
        Ok(Self { state, gains, mode })
    }

    pub fn gains(&self) -> &Gains {
        &self.gains
    }

    pub fn mode(&self) -> ObserverMode {
        self.mode
    }

    pub fn reset(&mut self, state: ObserverState) {
        self.state = state;
    }

    pub fn step(&mut self, m: &Measurement, dt: f64) -> Result<&ObserverState> {
        self.state = observer_step(&self.state, m, &self.gains, self.mode, dt)?;
        Ok(&self.state)
    }
}
