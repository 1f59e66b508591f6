//! Ground-truth rigid body motion and the biased, noisy sensor streams derived from it.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::{euler_rates_to_body, euler_to_rot, EulerAngles, RotationMatrix, Vec3};

/// `amplitude * sin(2π frequency_hz t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency_hz: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSignal {
    #[serde(default)]
    pub offset: f64,
    /// Linear drift rate, counted from the window start (or `t = 0`).
    #[serde(default)]
    pub ramp: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sinusoids: Vec<Sinusoid>,
}

impl AxisSignal {
    pub fn constant(offset: f64) -> Self {
        Self { offset, ..Default::default() }
    }

    fn eval(&self, t: f64, t0: f64) -> f64 {
        let mut v = self.offset + self.ramp * (t - t0);
        for s in &self.sinusoids {
            v += s.amplitude * (2.0 * PI * s.frequency_hz * t + s.phase).sin();
        }
        v
    }

    fn rate(&self, t: f64) -> f64 {
        let mut v = self.ramp;
        for s in &self.sinusoids {
            let w = 2.0 * PI * s.frequency_hz;
            v += s.amplitude * w * (w * t + s.phase).cos();
        }
        v
    }
}

/// Three-axis waveform, zero outside its optional active window.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    #[serde(default)]
    pub x: AxisSignal,
    #[serde(default)]
    pub y: AxisSignal,
    #[serde(default)]
    pub z: AxisSignal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

impl SignalSpec {
    pub fn constant(v: Vec3) -> Self {
        Self {
            x: AxisSignal::constant(v.x),
            y: AxisSignal::constant(v.y),
            z: AxisSignal::constant(v.z),
            window: None,
        }
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        let t0 = match self.window {
            Some([start, end]) => {
                if t < start || t > end {
                    return Vec3::zeros();
                }
                start
            }
            None => 0.0,
        };
        Vec3::new(self.x.eval(t, t0), self.y.eval(t, t0), self.z.eval(t, t0))
    }

    /// Time derivative of [`eval`](Self::eval), zero outside the window.
    pub fn rate(&self, t: f64) -> Vec3 {
        if let Some([start, end]) = self.window {
            if t < start || t > end {
                return Vec3::zeros();
            }
        }
        Vec3::new(self.x.rate(t), self.y.rate(t), self.z.rate(t))
    }

    /// Upper bound on `|eval(t)|` over all `t`, ignoring the ramp.
    pub fn amplitude_bound(&self) -> f64 {
        let axis = |a: &AxisSignal| a.offset.abs() + a.sinusoids.iter().map(|s| s.amplitude.abs()).sum::<f64>();
        (axis(&self.x).powi(2) + axis(&self.y).powi(2) + axis(&self.z).powi(2)).sqrt()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        for (name, axis) in [("x", &self.x), ("y", &self.y), ("z", &self.z)] {
            let field = |f: &str| format!("{path}.{name}.{f}");
            if !axis.offset.is_finite() {
                return Err(config_err(field("offset"), "must be finite"));
            }
            if !axis.ramp.is_finite() {
                return Err(config_err(field("ramp"), "must be finite"));
            }
            for (i, s) in axis.sinusoids.iter().enumerate() {
                let p = format!("{path}.{name}.sinusoids[{i}]");
                if !(s.amplitude.is_finite() && s.phase.is_finite()) {
                    return Err(config_err(p, "amplitude and phase must be finite"));
                }
                if !(s.frequency_hz.is_finite() && s.frequency_hz >= 0.0) {
                    return Err(config_err(format!("{p}.frequency_hz"), "must be finite and >= 0"));
                }
            }
        }
        if let Some([a, b]) = self.window {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(config_err(format!("{path}.window"), "must satisfy start <= end"));
            }
        }
        Ok(())
    }
}

fn config_err(path: impl Into<String>, message: &str) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

/// Waveforms driving the truth model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSignals {
    /// Body angular velocity, rad/s.
    #[serde(default)]
    pub omega: SignalSpec,
    /// ZYX Euler angle trajectory `(φ, θ, ψ)` in rad. When present, the body rate
    /// is derived from it and `omega` must be left empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attitude: Option<SignalSpec>,
    /// Gyro bias, rad/s.
    #[serde(default)]
    pub bias: SignalSpec,
    /// Additive perturbation of the second inertial reference.
    #[serde(default)]
    pub beta_disturbance: SignalSpec,
}

/// Nominal inertial references plus the driving waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthModel {
    pub alpha_i: Vec3,
    pub beta_i: Vec3,
    pub signals: TruthSignals,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthState {
    pub t: f64,
    pub r: RotationMatrix,
    pub omega: Vec3,
    pub b: Vec3,
    /// Current (possibly disturbed) inertial references.
    pub alpha_i: Vec3,
    pub beta_i: Vec3,
}

impl TruthState {
    /// `α = Rᵀ α_i`.
    pub fn alpha(&self) -> Vec3 {
        self.r.apply_transpose(&self.alpha_i)
    }

    /// `β = Rᵀ β_i`.
    pub fn beta(&self) -> Vec3 {
        self.r.apply_transpose(&self.beta_i)
    }
}

impl TruthModel {
    /// Body angular velocity at `t`.
    pub fn omega_at(&self, t: f64) -> Vec3 {
        match &self.signals.attitude {
            Some(a) => {
                let e = a.eval(t);
                euler_rates_to_body(&EulerAngles::new(e.x, e.y, e.z), &a.rate(t))
            }
            None => self.signals.omega.eval(t),
        }
    }

    /// Attitude at `t = 0`: from the angle trajectory if given, else the identity.
    pub fn initial_rotation(&self) -> RotationMatrix {
        match &self.signals.attitude {
            Some(a) => {
                let e = a.eval(0.0);
                euler_to_rot(&EulerAngles::new(e.x, e.y, e.z))
            }
            None => RotationMatrix::identity(),
        }
    }

    pub fn state_at(&self, t: f64, r: RotationMatrix) -> TruthState {
        TruthState {
            t,
            r,
            omega: self.omega_at(t),
            b: self.signals.bias.eval(t),
            alpha_i: self.alpha_i,
            beta_i: self.beta_i + self.signals.beta_disturbance.eval(t),
        }
    }
}

/// Advances the truth by `dt`, using the exact rotation flow with `ω` taken at the
/// step midpoint.
pub fn propagate_truth(state: &TruthState, model: &TruthModel, dt: f64) -> TruthState {
    debug_assert!(dt > 0.0);
    let omega_mid = model.omega_at(state.t + 0.5 * dt);
    let r = state.r.rotate_exp(&omega_mid, dt);
    model.state_at(state.t + dt, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub t: f64,
    pub omega_m: Vec3,
    pub alpha_m: Vec3,
    pub beta_m: Vec3,
}

impl Measurement {
    /// Noiseless readings of `state`.
    pub fn exact(state: &TruthState) -> Self {
        Self {
            t: state.t,
            omega_m: state.omega + state.b,
            alpha_m: state.alpha(),
            beta_m: state.beta(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && [self.omega_m, self.alpha_m, self.beta_m]
                .iter()
                .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Band-limited white noise description. Each sample is Gaussian with per-axis
/// variance `power / sample_time` and is held for `sample_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub sample_time: f64,
    #[serde(default)]
    pub power_alpha: f64,
    #[serde(default)]
    pub power_beta: f64,
    #[serde(default)]
    pub power_omega: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn noiseless(sample_time: f64) -> Self {
        Self { sample_time, power_alpha: 0.0, power_beta: 0.0, power_omega: 0.0, seed: 0 }
    }

    pub fn std_alpha(&self) -> f64 {
        (self.power_alpha / self.sample_time).sqrt()
    }

    pub fn std_beta(&self) -> f64 {
        (self.power_beta / self.sample_time).sqrt()
    }

    pub fn std_omega(&self) -> f64 {
        (self.power_omega / self.sample_time).sqrt()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.sample_time.is_finite() && self.sample_time > 0.0) {
            return Err(config_err(format!("{path}.sample_time"), "must be > 0"));
        }
        for (name, p) in [
            ("power_alpha", self.power_alpha),
            ("power_beta", self.power_beta),
            ("power_omega", self.power_omega),
        ] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(config_err(format!("{path}.{name}"), "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// One draw of additive sensor noise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSample {
    pub omega: Vec3,
    pub alpha: Vec3,
    pub beta: Vec3,
}

impl NoiseSample {
    /// Always consumes nine normals (ω, α, β order) so streams stay aligned
    /// regardless of which powers are zero.
    pub fn draw<R: Rng + ?Sized>(noise: &NoiseSpec, rng: &mut R) -> Self {
        let mut gauss = |std: f64| {
            let v = Vec3::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            );
            v * std
        };
        let omega = gauss(noise.std_omega());
        let alpha = gauss(noise.std_alpha());
        let beta = gauss(noise.std_beta());
        Self { omega, alpha, beta }
    }

    pub fn apply(&self, state: &TruthState) -> Measurement {
        let exact = Measurement::exact(state);
        Measurement {
            t: exact.t,
            omega_m: exact.omega_m + self.omega,
            alpha_m: exact.alpha_m + self.alpha,
            beta_m: exact.beta_m + self.beta,
        }
    }
}

pub fn sample_sensors<R: Rng + ?Sized>(state: &TruthState, noise: &NoiseSpec, rng: &mut R) -> Measurement {
    NoiseSample::draw(noise, rng).apply(state)
}

/// Seeded noise stream that redraws once every `sample_time` and holds in between.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    spec: NoiseSpec,
    rng: ChaCha8Rng,
    hold_steps: usize,
    counter: usize,
    held: NoiseSample,
}

impl NoiseSource {
    /// `dt` is the simulation step; `sample_time` must be an integer multiple of it.
    pub fn new(spec: NoiseSpec, dt: f64) -> Result<Self> {
        let ratio = spec.sample_time / dt;
        let hold = ratio.round();
        if hold < 1.0 || (ratio - hold).abs() > 1e-9 * ratio {
            return Err(config_err(
                "noise.sample_time",
                "must be an integer multiple of dt",
            ));
        }
        Ok(Self {
            spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            hold_steps: hold as usize,
            counter: 0,
            held: NoiseSample::default(),
        })
    }

    pub fn next_sample(&mut self) -> NoiseSample {
        if self.counter.is_multiple_of(self.hold_steps) {
            self.held = NoiseSample::draw(&self.spec, &mut self.rng);
        }
        self.counter += 1;
        self.held
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::Mat3;
    use approx::assert_relative_eq;

    fn model(omega: Vec3) -> TruthModel {
        TruthModel {
            alpha_i: Vec3::new(0.0, 0.0, 1.0),
            beta_i: Vec3::new(1.0, 0.0, 1.0) / 2f64.sqrt(),
            signals: TruthSignals {
                omega: SignalSpec::constant(omega),
                ..Default::default()
            },
        }
    }

    #[test]
    fn zero_rate_keeps_attitude() {
        let m = model(Vec3::zeros());
        let mut s = m.state_at(0.0, RotationMatrix::identity());
        for _ in 0..1000 {
            s = propagate_truth(&s, &m, 1e-3);
        }
        assert_eq!(s.r, RotationMatrix::identity());
    }

    fn integrate_constant_rate(rate: f64, seconds: f64) -> TruthState {
        let m = model(Vec3::new(0.0, 0.0, rate));
        let mut s = m.state_at(0.0, RotationMatrix::identity());
        for _ in 0..(seconds * 1000.0).round() as usize {
            s = propagate_truth(&s, &m, 1e-3);
        }
        s
    }

    #[test]
    fn constant_yaw_rate_gives_quarter_turn() {
        let s = integrate_constant_rate(PI / 200.0, 100.0);
        let expected = Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let err = (s.r.matrix() - expected).norm();
        assert!(err < 1e-9, "{err:e}");
        assert_relative_eq!(s.t, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_yaw_rate_gives_half_turn() {
        let s = integrate_constant_rate(PI / 100.0, 100.0);
        let expected = Mat3::from_diagonal(&Vec3::new(-1.0, -1.0, 1.0));
        let err = (s.r.matrix() - expected).norm();
        assert!(err < 1e-9, "{err:e}");
    }

    #[test]
    fn body_vector_norms_are_preserved() {
        let m = TruthModel {
            signals: TruthSignals {
                omega: SignalSpec {
                    x: AxisSignal { sinusoids: vec![Sinusoid { amplitude: 0.5, frequency_hz: 0.05, phase: 0.3 }], ..Default::default() },
                    y: AxisSignal::constant(0.2),
                    z: AxisSignal { ramp: 1e-3, ..Default::default() },
                    window: None,
                },
                ..Default::default()
            },
            ..model(Vec3::zeros())
        };
        let mut s = m.state_at(0.0, RotationMatrix::identity());
        for _ in 0..1_000_000 {
            s = propagate_truth(&s, &m, 1e-3);
        }
        assert!((s.alpha().norm() - m.alpha_i.norm()).abs() < 1e-9);
        assert!((s.beta().norm() - m.beta_i.norm()).abs() < 1e-9);
        assert!(s.r.defect() < 1e-12);
    }

    #[test]
    fn attitude_trajectory_is_followed() {
        let sine = |amplitude: f64, period: f64| AxisSignal {
            sinusoids: vec![Sinusoid { amplitude, frequency_hz: 1.0 / period, phase: 0.0 }],
            ..Default::default()
        };
        let angles = SignalSpec {
            x: AxisSignal { offset: 0.1, ..sine(0.4, 20.0) },
            y: sine(0.3, 37.0),
            z: AxisSignal { ramp: 0.01, ..sine(1.5, 90.0) },
            window: None,
        };
        let m = TruthModel {
            signals: TruthSignals { attitude: Some(angles.clone()), ..Default::default() },
            ..model(Vec3::zeros())
        };
        let mut s = m.state_at(0.0, m.initial_rotation());
        let mut worst = 0.0f64;
        for _ in 0..200_000 {
            s = propagate_truth(&s, &m, 1e-3);
            let a = angles.eval(s.t);
            let target = euler_to_rot(&EulerAngles::new(a.x, a.y, a.z));
            worst = worst.max((s.r.matrix() - target.matrix()).norm());
        }
        assert!(worst < 1e-6, "{worst:e}");
    }

    #[test]
    fn signal_window_gates_output() {
        let mut spec = SignalSpec::constant(Vec3::new(1.0, 2.0, 3.0));
        spec.x.ramp = 0.5;
        spec.window = Some([10.0, 20.0]);
        assert_eq!(spec.eval(5.0), Vec3::zeros());
        assert_eq!(spec.eval(21.0), Vec3::zeros());
        assert_eq!(spec.eval(12.0), Vec3::new(2.0, 2.0, 3.0));
    }

    #[test]
    fn sinusoid_term() {
        let spec = SignalSpec {
            y: AxisSignal {
                sinusoids: vec![Sinusoid { amplitude: 2.0, frequency_hz: 0.25, phase: 0.0 }],
                ..Default::default()
            },
            ..Default::default()
        };
        assert_relative_eq!(spec.eval(1.0).y, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_power_gives_exact_measurements() {
        let m = model(Vec3::new(0.1, 0.2, 0.3));
        let s = m.state_at(0.0, RotationMatrix::from_axis_angle(&Vec3::x(), 0.3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let meas = sample_sensors(&s, &NoiseSpec::noiseless(1e-3), &mut rng);
        assert_eq!(meas, Measurement::exact(&s));
    }

    #[test]
    fn noise_source_holds_between_draws() {
        let spec = NoiseSpec { sample_time: 4e-3, power_alpha: 1e-6, power_beta: 1e-6, power_omega: 1e-6, seed: 5 };
        let mut src = NoiseSource::new(spec, 1e-3).unwrap();
        let a: Vec<_> = (0..8).map(|_| src.next_sample()).collect();
        assert_eq!(a[0], a[3]);
        assert_ne!(a[3], a[4]);
        assert_eq!(a[4], a[7]);
        assert!(NoiseSource::new(spec, 3e-3).is_err());
    }

    #[test]
    fn validation_reports_field_path() {
        let mut spec = SignalSpec::default();
        spec.z.sinusoids.push(Sinusoid { amplitude: 1.0, frequency_hz: -1.0, phase: 0.0 });
        match spec.validate("signals.omega") {
            Err(Error::Config { path, .. }) => assert_eq!(path, "signals.omega.z.sinusoids[0].frequency_hz"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
