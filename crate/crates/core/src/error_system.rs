//! Estimation-error dynamics, in body axes and rotated into inertial axes.
//!
//! With `e_α = α̂ − α`, `e_β = β̂ − β`, `e_b = b̂ − b` and the rotated variables
//! `E = R e`, `Ω = R ω`, the filtered observer gives
//!
//! ```text
//! Ė_α = E_b × (α_i + E_α) − k_α E_α
//! Ė_β = E_b × (β_i + E_β) − k_β E_β
//! Ė_b = Ω × E_b + l_α E_α × α_i + l_β E_β × β_i
//! ```
//!
//! The linear-injection variant replaces `E_b × E_α` by `E_α × B` with `B = R b`.

use std::ops::{Add, Mul};

use serde::Serialize;

use crate::observer::{ObserverMode, ScalarGains};
use crate::so3::{RotationMatrix, Vec3};

/// Rotated error variables `(E_α, E_β, E_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ErrorState {
    pub e_alpha: Vec3,
    pub e_beta: Vec3,
    pub e_b: Vec3,
}

impl ErrorState {
    pub fn new(e_alpha: Vec3, e_beta: Vec3, e_b: Vec3) -> Self {
        Self { e_alpha, e_beta, e_b }
    }

    /// Euclidean norm of the stacked 9-vector.
    pub fn norm(&self) -> f64 {
        (self.e_alpha.norm_squared() + self.e_beta.norm_squared() + self.e_b.norm_squared()).sqrt()
    }

    /// Rotates body-axis errors into inertial axes.
    pub fn rotated(&self, r: &RotationMatrix) -> Self {
        Self {
            e_alpha: r.apply(&self.e_alpha),
            e_beta: r.apply(&self.e_beta),
            e_b: r.apply(&self.e_b),
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.e_alpha, self.e_beta, self.e_b]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

impl Add for ErrorState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.e_alpha + o.e_alpha, self.e_beta + o.e_beta, self.e_b + o.e_b)
    }
}

impl Mul<f64> for ErrorState {
    type Output = Self;
    fn mul(self, h: f64) -> Self {
        Self::new(self.e_alpha * h, self.e_beta * h, self.e_b * h)
    }
}

/// Rotated error dynamics. `bias_inertial` (`B = R b`) only enters the linear variant.
pub fn rotated_error_derivative(
    e: &ErrorState,
    omega_inertial: &Vec3,
    bias_inertial: &Vec3,
    alpha_i: &Vec3,
    beta_i: &Vec3,
    g: &ScalarGains,
    mode: ObserverMode,
) -> ErrorState {
    let (e_alpha_dot, e_beta_dot) = match mode {
        ObserverMode::Filtered => (
            e.e_b.cross(&(alpha_i + e.e_alpha)) - e.e_alpha * g.k_alpha,
            e.e_b.cross(&(beta_i + e.e_beta)) - e.e_beta * g.k_beta,
        ),
        ObserverMode::LinearVariant => (
            e.e_b.cross(alpha_i) + e.e_alpha.cross(bias_inertial) - e.e_alpha * g.k_alpha,
            e.e_b.cross(beta_i) + e.e_beta.cross(bias_inertial) - e.e_beta * g.k_beta,
        ),
    };
    let e_b_dot = omega_inertial.cross(&e.e_b) + e.e_alpha.cross(alpha_i) * g.l_alpha + e.e_beta.cross(beta_i) * g.l_beta;
    ErrorState::new(e_alpha_dot, e_beta_dot, e_b_dot)
}

/// Body-axis error dynamics of the filtered observer for a constant bias.
pub fn body_error_derivative(e: &ErrorState, alpha: &Vec3, beta: &Vec3, omega: &Vec3, g: &ScalarGains) -> ErrorState {
    ErrorState::new(
        e.e_alpha.cross(omega) - (alpha + e.e_alpha).cross(&e.e_b) - e.e_alpha * g.k_alpha,
        e.e_beta.cross(omega) - (beta + e.e_beta).cross(&e.e_b) - e.e_beta * g.k_beta,
        e.e_alpha.cross(alpha) * g.l_alpha + e.e_beta.cross(beta) * g.l_beta,
    )
}

/// Inputs for integrating the rotated error system directly.
#[derive(Clone, Copy)]
pub struct ErrorSystem<'a> {
    pub alpha_i: Vec3,
    pub beta_i: Vec3,
    pub gains: ScalarGains,
    pub mode: ObserverMode,
    /// Inertial-frame angular velocity `Ω(t)`.
    pub omega_inertial: &'a (dyn Fn(f64) -> Vec3 + Sync),
}

impl ErrorSystem<'_> {
    /// RK4 integration of `(E, B)` with `Ḃ = Ω × B`; returns one sample per step
    /// including the initial one.
    pub fn simulate(&self, e0: ErrorState, bias_inertial0: Vec3, dt: f64, duration: f64) -> Vec<ErrorState> {
        let steps = (duration / dt + 1e-9).floor() as usize;
        let mut out = Vec::with_capacity(steps + 1);
        let mut e = e0;
        let mut b = bias_inertial0;
        out.push(e);
        let f = |t: f64, e: &ErrorState, b: &Vec3| {
            let w = (self.omega_inertial)(t);
            (
                rotated_error_derivative(e, &w, b, &self.alpha_i, &self.beta_i, &self.gains, self.mode),
                w.cross(b),
            )
        };
        for i in 0..steps {
            let t = i as f64 * dt;
            let (k1, b1) = f(t, &e, &b);
            let (k2, b2) = f(t + 0.5 * dt, &(e + k1 * (0.5 * dt)), &(b + b1 * (0.5 * dt)));
            let (k3, b3) = f(t + 0.5 * dt, &(e + k2 * (0.5 * dt)), &(b + b2 * (0.5 * dt)));
            let (k4, b4) = f(t + dt, &(e + k3 * dt), &(b + b3 * dt));
            e = e + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            b += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (dt / 6.0);
            out.push(e);
        }
        out
    }
}

/// Least-squares line through `(t, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Fits `ln y = intercept + slope · t` over samples with `y > 0`.
pub fn log_linear_fit(times: &[f64], values: &[f64]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, &y)| y > 0.0 && y.is_finite())
        .map(|(&t, &y)| (t, y.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let r_squared = if syy == 0.0 { 1.0 } else { sty * sty / (stt * syy) };
    Some(DecayFit { slope, intercept: my - slope * mt, r_squared, samples: n })
}
