//! Oracles and random-input generators shared by the integration tests. Nothing
//! here calls into the code paths it checks.

#![allow(dead_code)]

use std::f64::consts::TAU;

use attitude_observer::observer::{Observer, ObserverMode, ObserverState};
use attitude_observer::so3::random_vector;
use attitude_observer::truth::{propagate_truth, AxisSignal, Measurement, SignalSpec, Sinusoid, TruthModel, TruthSignals};
use attitude_observer::{Gains, Mat3, RotationMatrix, Vec3};
use rand::Rng;

/// Sum of vector-valued sinusoids whose amplitudes add up to at most `bound`,
/// so `|Ω(t)| ≤ bound` for every `t`.
#[derive(Debug, Clone)]
pub struct BoundedRate {
    terms: Vec<(Vec3, f64, f64)>,
}

impl BoundedRate {
    pub fn random<R: Rng>(rng: &mut R, bound: f64) -> Self {
        let n = rng.gen_range(1..=4);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = weights.iter().sum::<f64>() + rng.gen_range(0.0..0.5);
        let terms = weights
            .iter()
            .map(|w| {
                let dir = random_vector(rng, 1.0).normalize();
                (dir * (bound * w / total), rng.gen_range(0.005..0.5), rng.gen_range(0.0..TAU))
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        self.terms.iter().map(|(a, f, p)| a * (TAU * f * t + p).sin()).sum()
    }

    /// The same signal expressed as per-axis sinusoids for a scenario file.
    pub fn to_signal(&self) -> SignalSpec {
        let axis = |i: usize| AxisSignal {
            offset: 0.0,
            ramp: 0.0,
            sinusoids: self
                .terms
                .iter()
                .map(|(a, f, p)| Sinusoid { amplitude: a[i], frequency_hz: *f, phase: *p })
                .collect(),
        };
        SignalSpec { x: axis(0), y: axis(1), z: axis(2), window: None }
    }
}

/// Uniform sample in the ball of radius `r` in R⁹, split into three 3-vectors.
pub fn random_in_ball9<R: Rng>(rng: &mut R, r: f64) -> [Vec3; 3] {
    let mut v = [0.0; 9];
    for x in v.iter_mut() {
        *x = rng.sample::<f64, _>(rand_distr::StandardNormal);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = r * rng.gen::<f64>().powf(1.0 / 9.0) / norm;
    [
        Vec3::new(v[0], v[1], v[2]) * scale,
        Vec3::new(v[3], v[4], v[5]) * scale,
        Vec3::new(v[6], v[7], v[8]) * scale,
    ]
}

/// Nearest rotation to `m` in Frobenius norm via SVD.
///
/// nalgebra's SVD stops while the off-diagonal residue is still near 1e-8
/// relative when two singular values almost coincide, which tilts U·Vᵀ by
/// about that much. faer's SVD converges fully, so the oracle uses it.
pub fn svd_polar(m: &Mat3) -> Mat3 {
    let svd = faer::Mat::<f64>::from_fn(3, 3, |i, j| m[(i, j)]).svd();
    let (u, v) = (svd.u(), svd.v());
    let u = Mat3::from_fn(|i, j| u.read(i, j));
    let v = Mat3::from_fn(|i, j| v.read(i, j));
    let mut q = u * v.transpose();
    if q.determinant() < 0.0 {
        // Singular values come in nonincreasing order, so flip the smallest.
        let d = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        q = u * d * v.transpose();
    }
    q
}

/// `min xᵀ M x` over the unit sphere by random search followed by projected
/// gradient descent from the best sample.
pub fn sphere_minimum<R: Rng>(m: &Mat3, samples: usize, rng: &mut R) -> f64 {
    let mut best = Vec3::x();
    let mut best_val = f64::INFINITY;
    for _ in 0..samples {
        let x = Vec3::new(
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        )
        .normalize();
        let val = x.dot(&(m * x));
        if val < best_val {
            best_val = val;
            best = x;
        }
    }
    let step = 0.5 / m.norm();
    let mut x = best;
    for _ in 0..200_000 {
        let next = (x - m * x * step).normalize();
        let done = (next - x).norm() < 1e-15;
        x = next;
        if done {
            break;
        }
    }
    best_val.min(x.dot(&(m * x)))
}

/// Noiseless truth-plus-observer run. Returns `(t, |e_α|, |e_β|, |e_b|)` per sample.
pub fn noiseless_run(
    model: &TruthModel,
    r0: RotationMatrix,
    initial_error: [Vec3; 3],
    gains: Gains,
    mode: ObserverMode,
    dt: f64,
    duration: f64,
) -> Vec<(f64, f64, f64, f64)> {
    let mut truth = model.state_at(0.0, r0);
    let start = ObserverState {
        alpha_hat: truth.alpha() + initial_error[0],
        beta_hat: truth.beta() + initial_error[1],
        b_hat: truth.b + initial_error[2],
    };
    let mut obs = Observer::new(start, gains, mode).unwrap();
    let steps = (duration / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        let s = &obs.state;
        out.push((
            truth.t,
            (s.alpha_hat - truth.alpha()).norm(),
            (s.beta_hat - truth.beta()).norm(),
            (s.b_hat - truth.b).norm(),
        ));
        obs.step(&Measurement::exact(&truth), dt).unwrap();
        truth = propagate_truth(&truth, model, dt);
    }
    out
}

/// Truth model with constant bias and the given body rate.
pub fn model_with(alpha_i: Vec3, beta_i: Vec3, omega: SignalSpec, bias: Vec3) -> TruthModel {
    TruthModel {
        alpha_i,
        beta_i,
        signals: TruthSignals { omega, bias: SignalSpec::constant(bias), ..Default::default() },
    }
}

pub fn paper_references() -> (Vec3, Vec3) {
    (Vec3::new(0.0, 0.0, 1.0), Vec3::new(std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2))
}

/// `M = (l_α/k_α)(|a|²I − a aᵀ) + (l_β/k_β)(|b|²I − b bᵀ)`, i.e. `−[a]×²` weighted,
/// written without skew matrices.
pub fn mu_matrix_oracle(a: &Vec3, b: &Vec3, k_alpha: f64, k_beta: f64, l_alpha: f64, l_beta: f64) -> Mat3 {
    let part = |v: &Vec3| Mat3::identity() * v.norm_squared() - v * v.transpose();
    part(a) * (l_alpha / k_alpha) + part(b) * (l_beta / k_beta)
}
