//! Strict Lyapunov function for the rotated error system and its numerical
//! certification.
//!
//! ```text
//! V  = σ₁ V₁ + σ₂ V₁² + V₃
//! V₁ = ½ (l_α |E_α|² + l_β |E_β|² + |E_b|²)
//! V₃ = ½ |E_b − u_αβ|²,   u_αβ = (l_α/k_α) α_i × E_α + (l_β/k_β) β_i × E_β
//! ```
//!
//! Along trajectories with `|ω| ≤ c_ω`,
//! `V̇ ≤ −μ′|E_b|² − σ₁α|E_α|² − σ₁β|E_β|² − σ₂α|E_α|⁴ − σ₂β|E_β|⁴
//!      − σ₂αβ|E_α|²|E_β|² − σ′₂α|E_α|²|E_b|² − σ′₂β|E_β|²|E_b|²`.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_system::ErrorState;
use crate::observer::{Gains, ScalarGains};
use crate::so3::{skew, Mat3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovParams {
    pub c_omega: f64,
    pub epsilon: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrictnessCoefficients {
    pub mu_prime: f64,
    pub sigma_1alpha: f64,
    pub sigma_1beta: f64,
    pub sigma_2alpha: f64,
    pub sigma_2beta: f64,
    pub sigma_2alphabeta: f64,
    pub sigma_2alpha_prime: f64,
    pub sigma_2beta_prime: f64,
}

impl StrictnessCoefficients {
    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("mu_prime", self.mu_prime),
            ("sigma_1alpha", self.sigma_1alpha),
            ("sigma_1beta", self.sigma_1beta),
            ("sigma_2alpha", self.sigma_2alpha),
            ("sigma_2beta", self.sigma_2beta),
            ("sigma_2alphabeta", self.sigma_2alphabeta),
            ("sigma_2alpha_prime", self.sigma_2alpha_prime),
            ("sigma_2beta_prime", self.sigma_2beta_prime),
        ]
    }

    pub fn all_positive(&self) -> bool {
        self.named().iter().all(|(_, c)| *c > 0.0)
    }
}

/// `M = −(l_α/k_α) [α_i]×² − (l_β/k_β) [β_i]×²`.
pub fn mu_matrix(alpha_i: &Vec3, beta_i: &Vec3, g: &ScalarGains) -> Mat3 {
    let sa = skew(alpha_i);
    let sb = skew(beta_i);
    -(sa * sa) * (g.l_alpha / g.k_alpha) - (sb * sb) * (g.l_beta / g.k_beta)
}

/// Smallest eigenvalue of [`mu_matrix`]; an error when it is not positive definite.
pub fn compute_mu(alpha_i: &Vec3, beta_i: &Vec3, g: &ScalarGains) -> Result<f64> {
    if !(g.k_alpha > 0.0 && g.k_beta > 0.0 && g.l_alpha >= 0.0 && g.l_beta >= 0.0) {
        return Err(Error::NoCertificate(format!("gains must satisfy k > 0, l >= 0: {g:?}")));
    }
    let m = mu_matrix(alpha_i, beta_i, g);
    let mu = SymmetricEigen::new(m).eigenvalues.min();
    if !(mu > 1e-12 * m.norm()) {
        return Err(Error::NoCertificate(format!("reference matrix is not positive definite (min eigenvalue {mu:e})")));
    }
    Ok(mu)
}

/// `(V₁, V₃, u_αβ)`.
pub fn lyapunov_pieces(e: &ErrorState, alpha_i: &Vec3, beta_i: &Vec3, g: &ScalarGains) -> (f64, f64, Vec3) {
    let v1 = 0.5 * (g.l_alpha * e.e_alpha.norm_squared() + g.l_beta * e.e_beta.norm_squared() + e.e_b.norm_squared());
    let u = alpha_i.cross(&e.e_alpha) * (g.l_alpha / g.k_alpha) + beta_i.cross(&e.e_beta) * (g.l_beta / g.k_beta);
    let v3 = 0.5 * (e.e_b - u).norm_squared();
    (v1, v3, u)
}

/// `V̇₁ = −k_α l_α |E_α|² − k_β l_β |E_β|²`, valid for both observer modes.
pub fn v1_rate(e: &ErrorState, g: &ScalarGains) -> f64 {
    -g.k_alpha * g.l_alpha * e.e_alpha.norm_squared() - g.k_beta * g.l_beta * e.e_beta.norm_squared()
}

pub fn strictness_coefficients(p: &LyapunovParams, g: &ScalarGains, alpha_i: &Vec3, beta_i: &Vec3) -> StrictnessCoefficients {
    let (ka, kb, la, lb) = (g.k_alpha, g.k_beta, g.l_alpha, g.l_beta);
    let (na2, nb2) = (alpha_i.norm_squared(), beta_i.norm_squared());
    let eps = p.epsilon;
    let (s1, s2) = (p.sigma1, p.sigma2);
    let shared = p.c_omega * p.c_omega + 2.0 * la * la / (ka * ka) * na2 * na2 + 2.0 * lb * lb / (kb * kb) * nb2 * nb2;
    StrictnessCoefficients {
        mu_prime: p.mu - eps,
        sigma_1alpha: s1 * ka * la - 4.0 / eps * shared * la * la * na2 / (ka * ka),
        sigma_1beta: s1 * kb * lb - 4.0 / eps * shared * lb * lb * nb2 / (kb * kb),
        sigma_2alpha: s2 * ka * la * la - 4.0 * la.powi(4) * na2 * na2 / (eps * ka.powi(4)),
        sigma_2beta: s2 * kb * lb * lb - 4.0 * lb.powi(4) * nb2 * nb2 / (eps * kb.powi(4)),
        sigma_2alphabeta: s2 * (ka + kb) * la * lb - 8.0 * la * la * lb * lb * na2 * nb2 / (eps * ka * ka * kb * kb),
        sigma_2alpha_prime: s2 * ka * la - la * la * na2 / (eps * ka * ka),
        sigma_2beta_prime: s2 * kb * lb - lb * lb * nb2 / (eps * kb * kb),
    }
}

/// A complete, checked certificate for one set of gains and references.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub params: LyapunovParams,
    pub coefficients: StrictnessCoefficients,
    #[serde(skip)]
    pub gains: ScalarGains,
    #[serde(skip)]
    pub alpha_i: Vec3,
    #[serde(skip)]
    pub beta_i: Vec3,
}

impl Certificate {
    pub fn value(&self, e: &ErrorState) -> f64 {
        lyapunov_value(e, &self.params, &self.gains, &self.alpha_i, &self.beta_i)
    }

    /// Right-hand side of the `V̇` bound at `e`.
    pub fn decrease_bound(&self, e: &ErrorState) -> f64 {
        let c = &self.coefficients;
        let a2 = e.e_alpha.norm_squared();
        let b2 = e.e_beta.norm_squared();
        let eb2 = e.e_b.norm_squared();
        -c.mu_prime * eb2
            - c.sigma_1alpha * a2
            - c.sigma_1beta * b2
            - c.sigma_2alpha * a2 * a2
            - c.sigma_2beta * b2 * b2
            - c.sigma_2alphabeta * a2 * b2
            - c.sigma_2alpha_prime * a2 * eb2
            - c.sigma_2beta_prime * b2 * eb2
    }
}

pub fn lyapunov_value(e: &ErrorState, p: &LyapunovParams, g: &ScalarGains, alpha_i: &Vec3, beta_i: &Vec3) -> f64 {
    let (v1, v3, _) = lyapunov_pieces(e, alpha_i, beta_i, g);
    p.sigma1 * v1 + p.sigma2 * v1 * v1 + v3
}

/// Constructs `(ε, σ₁, σ₂)` for the rate bound `c_omega`: `ε = μ/2`, then twice the
/// smallest `σ₁` and `σ₂` that make their coefficients positive.
pub fn find_certificate(c_omega: f64, gains: &Gains, alpha_i: &Vec3, beta_i: &Vec3) -> Result<Certificate> {
    let g = gains
        .as_scalars()
        .ok_or_else(|| Error::NoCertificate("matrix gains are not supported".into()))?;
    if !(c_omega.is_finite() && c_omega >= 0.0) {
        return Err(Error::InvalidArgument(format!("c_omega must be finite and >= 0, got {c_omega}")));
    }
    let mu = compute_mu(alpha_i, beta_i, &g)?;
    let epsilon = 0.5 * mu;

    // Every coefficient has the form σ·a − b with a > 0; the threshold is b/a.
    let probe = LyapunovParams { c_omega, epsilon, sigma1: 0.0, sigma2: 0.0, mu };
    let zero = strictness_coefficients(&probe, &g, alpha_i, beta_i);
    let (ka, kb, la, lb) = (g.k_alpha, g.k_beta, g.l_alpha, g.l_beta);
    let sigma1_min = f64::max(-zero.sigma_1alpha / (ka * la), -zero.sigma_1beta / (kb * lb));
    let sigma2_min = [
        -zero.sigma_2alpha / (ka * la * la),
        -zero.sigma_2beta / (kb * lb * lb),
        -zero.sigma_2alphabeta / ((ka + kb) * la * lb),
        -zero.sigma_2alpha_prime / (ka * la),
        -zero.sigma_2beta_prime / (kb * lb),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let params = LyapunovParams { c_omega, epsilon, sigma1: 2.0 * sigma1_min, sigma2: 2.0 * sigma2_min, mu };
    let coefficients = strictness_coefficients(&params, &g, alpha_i, beta_i);
    if !coefficients.all_positive() {
        return Err(Error::NoCertificate(format!("coefficients not all positive: {coefficients:?}")));
    }
    Ok(Certificate { params, coefficients, gains: g, alpha_i: *alpha_i, beta_i: *beta_i })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecreaseReport {
    pub samples: usize,
    pub v_max: f64,
    pub tolerance: f64,
    /// Largest central-difference `ΔV/Δt`.
    pub max_rate: f64,
    /// Largest `ΔV/Δt − bound`; negative when the bound holds with margin.
    pub max_excess: f64,
    /// Indices where `ΔV/Δt > bound + tolerance`.
    pub violations: Vec<usize>,
    /// Largest relative gap between the finite-difference and closed-form `V̇₁`.
    pub v1_max_rel_error: f64,
}

impl DecreaseReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Five-point central difference of `y` at index `k`.
fn central_rate(y: &[f64], k: usize, dt: f64) -> f64 {
    (y[k - 2] - 8.0 * y[k - 1] + 8.0 * y[k + 1] - y[k + 2]) / (12.0 * dt)
}

/// Checks the `V̇` bound on a uniformly sampled noiseless error trajectory using
/// five-point central differences, so the first and last two samples are skipped. The tolerance is `tol_rel · max V`. Samples where the
/// closed-form `|V̇₁|` is below `1e-9 · max|V̇₁|` are excluded from the `V̇₁` comparison.
pub fn verify_decrease(trajectory: &[ErrorState], dt: f64, cert: &Certificate, tol_rel: f64) -> DecreaseReport {
    let g = &cert.gains;
    let v: Vec<f64> = trajectory.iter().map(|e| cert.value(e)).collect();
    let v1: Vec<f64> = trajectory
        .iter()
        .map(|e| lyapunov_pieces(e, &cert.alpha_i, &cert.beta_i, g).0)
        .collect();
    let v_max = v.iter().cloned().fold(0.0, f64::max);
    let tolerance = tol_rel * v_max;
    let v1_rate_max = trajectory.iter().map(|e| v1_rate(e, g).abs()).fold(0.0, f64::max);

    let mut report = DecreaseReport {
        samples: trajectory.len(),
        v_max,
        tolerance,
        max_rate: f64::NEG_INFINITY,
        max_excess: f64::NEG_INFINITY,
        violations: Vec::new(),
        v1_max_rel_error: 0.0,
    };
    #[allow(clippy::needless_range_loop)]
    for k in 2..trajectory.len().saturating_sub(2) {
        let rate = central_rate(&v, k, dt);
        let excess = rate - cert.decrease_bound(&trajectory[k]);
        report.max_rate = report.max_rate.max(rate);
        report.max_excess = report.max_excess.max(excess);
        if excess > tolerance {
            report.violations.push(k);
        }
        let closed = v1_rate(&trajectory[k], g);
        if closed.abs() > 1e-9 * v1_rate_max {
            let fd = central_rate(&v1, k, dt);
            report.v1_max_rel_error = report.v1_max_rel_error.max((fd - closed).abs() / closed.abs());
        }
    }
    report
}

/// Runs `verify_decrease` over many cases in parallel. `simulate` turns one case
/// into its sampled trajectory; reports come back in input order.
pub fn verify_batch<T, F>(cases: &[T], dt: f64, cert: &Certificate, tol_rel: f64, simulate: F) -> Vec<DecreaseReport>
where
    T: Sync,
    F: Fn(&T) -> Vec<ErrorState> + Sync,
{
    cases
        .par_iter()
        .map(|case| verify_decrease(&simulate(case), dt, cert, tol_rel))
        .collect()
}
