//! Scenario configuration, the truth → sensors → observer → reconstruction pipeline,
//! and CSV trace output.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_system::ErrorState;
use crate::lyapunov::{find_certificate, Certificate};
use crate::observer::{Gains, Observer, ObserverMode, ObserverState};
use crate::reconstruct::{attitude_error_angle, reconstruct, DegenerateFlag, ReferenceBasis};
use crate::so3::{rot_to_euler, EulerAngles, RotationMatrix, Vec3};
use crate::truth::{
    propagate_truth, AxisSignal, Measurement, NoiseSource, NoiseSpec, SignalSpec, Sinusoid, TruthModel,
    TruthSignals, TruthState,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct References {
    pub alpha_i: Vec3,
    pub beta_i: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialEstimate {
    /// Start from the exact `(α, β, b)` at `t = 0`.
    Truth,
    State {
        alpha_hat: Vec3,
        beta_hat: Vec3,
        b_hat: Vec3,
    },
}

/// Replaces the observer state at the sample nearest to `t`, before stepping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReinitEvent {
    pub t: f64,
    #[serde(default = "Vec3::zeros")]
    pub alpha_hat: Vec3,
    #[serde(default = "Vec3::zeros")]
    pub beta_hat: Vec3,
    #[serde(default = "Vec3::zeros")]
    pub b_hat: Vec3,
}

impl ReinitEvent {
    pub fn state(&self) -> ObserverState {
        ObserverState { alpha_hat: self.alpha_hat, beta_hat: self.beta_hat, b_hat: self.b_hat }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    /// Bound on `|ω|`, rad/s.
    pub c_omega: f64,
}

/// Noise description as it appears in a scenario file; the seed is top-level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sample_time: f64,
    #[serde(default)]
    pub power_alpha: f64,
    #[serde(default)]
    pub power_beta: f64,
    #[serde(default)]
    pub power_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub duration: f64,
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: ObserverMode,
    /// Error level used for the settle times in the run summary.
    #[serde(default = "default_threshold")]
    pub settle_threshold: f64,
    pub references: References,
    pub gains: Gains,
    pub noise: NoiseConfig,
    pub initial: InitialEstimate,
    #[serde(default)]
    pub signals: TruthSignals,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reinit: Vec<ReinitEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
}

fn default_threshold() -> f64 {
    1e-3
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

fn finite_vec(v: &Vec3) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let de = toml::Deserializer::new(s);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(if path == "." { String::new() } else { path }, e.into_inner().message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err("", e.to_string()))
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec {
            sample_time: self.noise.sample_time,
            power_alpha: self.noise.power_alpha,
            power_beta: self.noise.power_beta,
            power_omega: self.noise.power_omega,
            seed: self.seed,
        }
    }

    pub fn truth_model(&self) -> TruthModel {
        TruthModel { alpha_i: self.references.alpha_i, beta_i: self.references.beta_i, signals: self.signals.clone() }
    }

    /// Number of trace rows, `floor(duration / dt) + 1`.
    pub fn row_count(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(config_err("duration", "must be > 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(config_err("dt", "must be > 0"));
        }
        if self.seed > i64::MAX as u64 {
            // TOML integers are signed 64-bit.
            return Err(config_err("seed", "must be at most 2^63 - 1"));
        }
        if !(self.settle_threshold.is_finite() && self.settle_threshold > 0.0) {
            return Err(config_err("settle_threshold", "must be > 0"));
        }
        if !finite_vec(&self.references.alpha_i) || !finite_vec(&self.references.beta_i) {
            return Err(config_err("references", "must be finite"));
        }
        ReferenceBasis::new(self.references.alpha_i, self.references.beta_i)
            .map_err(|e| config_err("references", e.to_string()))?;
        self.gains.validate().map_err(|e| match e {
            Error::InvalidGain { name, reason } => config_err(format!("gains.{name}"), reason),
            other => other,
        })?;
        self.noise_spec().validate("noise")?;
        NoiseSource::new(self.noise_spec(), self.dt)?;
        self.signals.omega.validate("signals.omega")?;
        if let Some(a) = &self.signals.attitude {
            a.validate("signals.attitude")?;
            if self.signals.omega != SignalSpec::default() {
                return Err(config_err("signals.omega", "must be empty when signals.attitude is set"));
            }
        }
        self.signals.bias.validate("signals.bias")?;
        self.signals.beta_disturbance.validate("signals.beta_disturbance")?;
        if let InitialEstimate::State { alpha_hat, beta_hat, b_hat } = &self.initial {
            if ![alpha_hat, beta_hat, b_hat].iter().all(|v| finite_vec(v)) {
                return Err(config_err("initial", "must be finite"));
            }
        }
        for (i, ev) in self.reinit.iter().enumerate() {
            if !(ev.t.is_finite() && ev.t >= 0.0) {
                return Err(config_err(format!("reinit[{i}].t"), "must be finite and >= 0"));
            }
            if !finite_vec(&ev.alpha_hat) || !finite_vec(&ev.beta_hat) || !finite_vec(&ev.b_hat) {
                return Err(config_err(format!("reinit[{i}]"), "state must be finite"));
            }
        }
        if let Some(c) = &self.certificate {
            if !(c.c_omega.is_finite() && c.c_omega >= 0.0) {
                return Err(config_err("certificate.c_omega", "must be finite and >= 0"));
            }
            if self.gains.as_scalars().is_none() {
                return Err(config_err("certificate", "requires scalar gains"));
            }
        }
        Ok(())
    }

    pub fn certificate(&self) -> Result<Option<Certificate>> {
        self.certificate
            .map(|c| find_certificate(c.c_omega, &self.gains, &self.references.alpha_i, &self.references.beta_i))
            .transpose()
    }
}

/// `(amplitude, period)` pairs as sines, so every term vanishes at `t = 0`.
fn sines(terms: &[(f64, f64)]) -> AxisSignal {
    AxisSignal {
        sinusoids: terms
            .iter()
            .map(|&(amplitude, period)| Sinusoid { amplitude, frequency_hz: 1.0 / period, phase: 0.0 })
            .collect(),
        ..Default::default()
    }
}

/// Reference scenario: gravity/magnetic-like references, noisy sensors, a slowly
/// drifting bias, a reset of the observer to zero at `t = 100` and a strong
/// perturbation of the second reference on `[500, 700]`. The motion is a
/// roll/pitch sway of about ±20° under a wide yaw swing, starting level.
pub fn paper_preset() -> ScenarioConfig {
    let attitude = SignalSpec {
        x: sines(&[(0.3, 30.0), (0.1, 11.0)]),
        y: sines(&[(0.25, 45.0), (0.08, 13.0)]),
        z: sines(&[(2.0, 120.0), (0.5, 35.0)]),
        window: None,
    };
    let bias = SignalSpec {
        x: AxisSignal { offset: 0.02, ramp: 1e-5, sinusoids: vec![] },
        y: AxisSignal {
            offset: -0.03,
            ramp: 0.0,
            sinusoids: vec![Sinusoid { amplitude: 0.005, frequency_hz: 1.0 / 500.0, phase: 0.0 }],
        },
        z: AxisSignal { offset: 0.04, ramp: -5e-6, sinusoids: vec![] },
        window: None,
    };
    let beta_disturbance = SignalSpec {
        x: AxisSignal {
            sinusoids: vec![Sinusoid { amplitude: 0.3, frequency_hz: 0.05, phase: 0.0 }],
            ..Default::default()
        },
        y: AxisSignal {
            offset: 0.2,
            sinusoids: vec![Sinusoid { amplitude: 0.5, frequency_hz: 0.1, phase: 1.0 }],
            ..Default::default()
        },
        z: AxisSignal {
            sinusoids: vec![Sinusoid { amplitude: 0.2, frequency_hz: 0.03, phase: 0.5 }],
            ..Default::default()
        },
        window: Some([500.0, 700.0]),
    };
    ScenarioConfig {
        duration: 1000.0,
        dt: 1e-3,
        seed: 42,
        mode: ObserverMode::Filtered,
        settle_threshold: 0.05,
        references: References {
            alpha_i: Vec3::new(0.0, 0.0, 1.0),
            beta_i: Vec3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2),
        },
        gains: Gains::paper(),
        noise: NoiseConfig { sample_time: 1e-3, power_alpha: 2e-6, power_beta: 2e-6, power_omega: 2e-7 },
        initial: InitialEstimate::Truth,
        signals: TruthSignals { omega: SignalSpec::default(), attitude: Some(attitude), bias, beta_disturbance },
        reinit: vec![ReinitEvent { t: 100.0, alpha_hat: Vec3::zeros(), beta_hat: Vec3::zeros(), b_hat: Vec3::zeros() }],
        certificate: Some(CertificateConfig { c_omega: 1.0 }),
    }
}

/// One sample of the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub truth: TruthState,
    pub measurement: Measurement,
    pub estimate: ObserverState,
    pub euler_true: EulerAngles,
    pub euler_hat: EulerAngles,
    pub r_hat: RotationMatrix,
    pub degenerate: DegenerateFlag,
    /// Body-axis errors `(α̂ − α, β̂ − β, b̂ − b)`.
    pub body_error: ErrorState,
    pub attitude_error: f64,
    pub lyapunov: Option<f64>,
}

impl TraceRow {
    pub fn t(&self) -> f64 {
        self.truth.t
    }
}

pub const CSV_COLUMNS: &[&str] = &[
    "t",
    "omega_x", "omega_y", "omega_z",
    "b_x", "b_y", "b_z",
    "phi", "theta", "psi",
    "omega_m_x", "omega_m_y", "omega_m_z",
    "alpha_m_x", "alpha_m_y", "alpha_m_z",
    "beta_m_x", "beta_m_y", "beta_m_z",
    "alpha_hat_x", "alpha_hat_y", "alpha_hat_z",
    "beta_hat_x", "beta_hat_y", "beta_hat_z",
    "b_hat_x", "b_hat_y", "b_hat_z",
    "phi_hat", "theta_hat", "psi_hat",
    "err_alpha", "err_beta", "err_b",
    "att_err",
    "lyapunov_v",
];

/// Stepwise pipeline; yields one row per sample.
pub struct Simulation {
    dt: f64,
    model: TruthModel,
    basis: ReferenceBasis,
    truth: TruthState,
    observer: Observer,
    noise: NoiseSource,
    certificate: Option<Certificate>,
    reinit: Vec<(usize, ObserverState)>,
    next_reinit: usize,
    index: usize,
    rows: usize,
    failed: bool,
}

impl Simulation {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let model = config.truth_model();
        let truth = model.state_at(0.0, model.initial_rotation());
        let initial = match config.initial {
            InitialEstimate::Truth => ObserverState { alpha_hat: truth.alpha(), beta_hat: truth.beta(), b_hat: truth.b },
            InitialEstimate::State { alpha_hat, beta_hat, b_hat } => ObserverState { alpha_hat, beta_hat, b_hat },
        };
        let mut reinit: Vec<(usize, ObserverState)> = config
            .reinit
            .iter()
            .map(|ev| ((ev.t / config.dt).round() as usize, ev.state()))
            .collect();
        reinit.sort_by_key(|(i, _)| *i);
        Ok(Self {
            dt: config.dt,
            basis: ReferenceBasis::new(model.alpha_i, model.beta_i)?,
            truth,
            observer: Observer::new(initial, config.gains, config.mode)?,
            noise: NoiseSource::new(config.noise_spec(), config.dt)?,
            certificate: config.certificate()?,
            model,
            reinit,
            next_reinit: 0,
            index: 0,
            rows: config.row_count(),
            failed: false,
        })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    fn row(&self, m: Measurement) -> TraceRow {
        let est = self.observer.state;
        let rec = reconstruct(&est.alpha_hat, &est.beta_hat, &self.basis);
        let body_error = ErrorState::new(
            est.alpha_hat - self.truth.alpha(),
            est.beta_hat - self.truth.beta(),
            est.b_hat - self.truth.b,
        );
        let lyapunov = self.certificate.as_ref().map(|c| c.value(&body_error.rotated(&self.truth.r)));
        TraceRow {
            truth: self.truth,
            measurement: m,
            estimate: est,
            euler_true: rot_to_euler(&self.truth.r).0,
            euler_hat: rot_to_euler(&rec.r_hat).0,
            r_hat: rec.r_hat,
            degenerate: rec.degenerate,
            body_error,
            attitude_error: attitude_error_angle(&rec.r_hat, &self.truth.r),
            lyapunov,
        }
    }
}

impl Iterator for Simulation {
    type Item = Result<TraceRow>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.index >= self.rows {
            return None;
        }
        let i = self.index;
        while let Some(&(at, state)) = self.reinit.get(self.next_reinit) {
            if at > i {
                break;
            }
            if at == i {
                self.observer.reset(state);
            }
            self.next_reinit += 1;
        }
        let m = self.noise.next_sample().apply(&self.truth);
        let row = self.row(m);
        if i + 1 < self.rows {
            if self.observer.step(&m, self.dt).is_err() {
                self.failed = true;
                return Some(Err(Error::Diverged { index: i }));
            }
            self.truth = propagate_truth(&self.truth, &self.model, self.dt);
        }
        self.index += 1;
        Some(Ok(row))
    }
}

/// Run statistics written alongside the trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub final_err_alpha: f64,
    pub final_err_beta: f64,
    pub final_err_b: f64,
    pub final_att_err: f64,
    pub settle_threshold: f64,
    /// First time after which the error stays below `settle_threshold`.
    pub settle_time_alpha: Option<f64>,
    pub settle_time_beta: Option<f64>,
    pub settle_time_b: Option<f64>,
    pub max_lyapunov: Option<f64>,
    pub certificate_valid: Option<bool>,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "never".to_string(), |t| format!("{t:.3}"));
        writeln!(f, "rows: {}", self.rows)?;
        writeln!(f, "final |alpha_hat - alpha|: {:.6e}", self.final_err_alpha)?;
        writeln!(f, "final |beta_hat - beta|: {:.6e}", self.final_err_beta)?;
        writeln!(f, "final |b_hat - b|: {:.6e}", self.final_err_b)?;
        writeln!(f, "final attitude error (rad): {:.6e}", self.final_att_err)?;
        writeln!(f, "settle threshold: {:e}", self.settle_threshold)?;
        writeln!(f, "settle time alpha (s): {}", opt(self.settle_time_alpha))?;
        writeln!(f, "settle time beta (s): {}", opt(self.settle_time_beta))?;
        write!(f, "settle time b (s): {}", opt(self.settle_time_b))?;
        if let Some(valid) = self.certificate_valid {
            write!(f, "\ncertificate: {}", if valid { "valid" } else { "invalid" })?;
        }
        if let Some(v) = self.max_lyapunov {
            write!(f, "\nmax V: {v:.6e}")?;
        }
        Ok(())
    }
}

struct SummaryBuilder {
    threshold: f64,
    last: Option<TraceRow>,
    settle: [Option<f64>; 3],
    max_v: Option<f64>,
    rows: usize,
}

impl SummaryBuilder {
    fn push(&mut self, row: &TraceRow) {
        let errs = [row.body_error.e_alpha.norm(), row.body_error.e_beta.norm(), row.body_error.e_b.norm()];
        for (slot, e) in self.settle.iter_mut().zip(errs) {
            if e >= self.threshold || !e.is_finite() {
                *slot = None;
            } else if slot.is_none() {
                *slot = Some(row.t());
            }
        }
        if let Some(v) = row.lyapunov {
            self.max_v = Some(self.max_v.map_or(v, |m: f64| m.max(v)));
        }
        self.rows += 1;
        self.last = Some(*row);
    }

    fn finish(self, certificate: Option<&Certificate>) -> Summary {
        let last = self.last.expect("a scenario has at least one row");
        Summary {
            rows: self.rows,
            final_err_alpha: last.body_error.e_alpha.norm(),
            final_err_beta: last.body_error.e_beta.norm(),
            final_err_b: last.body_error.e_b.norm(),
            final_att_err: last.attitude_error,
            settle_threshold: self.threshold,
            settle_time_alpha: self.settle[0],
            settle_time_beta: self.settle[1],
            settle_time_b: self.settle[2],
            max_lyapunov: self.max_v,
            certificate_valid: certificate.map(|c| c.coefficients.all_positive()),
        }
    }
}

fn write_row<W: Write>(out: &mut W, r: &TraceRow) -> std::io::Result<()> {
    let t = &r.truth;
    let m = &r.measurement;
    let e = &r.estimate;
    let values = [
        t.t,
        t.omega.x, t.omega.y, t.omega.z,
        t.b.x, t.b.y, t.b.z,
        r.euler_true.phi, r.euler_true.theta, r.euler_true.psi,
        m.omega_m.x, m.omega_m.y, m.omega_m.z,
        m.alpha_m.x, m.alpha_m.y, m.alpha_m.z,
        m.beta_m.x, m.beta_m.y, m.beta_m.z,
        e.alpha_hat.x, e.alpha_hat.y, e.alpha_hat.z,
        e.beta_hat.x, e.beta_hat.y, e.beta_hat.z,
        e.b_hat.x, e.b_hat.y, e.b_hat.z,
        r.euler_hat.phi, r.euler_hat.theta, r.euler_hat.psi,
        r.body_error.e_alpha.norm(), r.body_error.e_beta.norm(), r.body_error.e_b.norm(),
        r.attitude_error,
    ];
    for v in values {
        write!(out, "{v:.16e},")?;
    }
    match r.lyapunov {
        Some(v) => writeln!(out, "{v:.16e}"),
        None => writeln!(out),
    }
}

/// Runs `config`, writing the CSV trace to `out`.
pub fn run_scenario<W: Write>(config: &ScenarioConfig, out: W) -> Result<Summary> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    let summary = run_with(config, |row| write_row(&mut out, row).map_err(Error::from))?;
    out.flush()?;
    Ok(summary)
}

/// Runs `config`, handing each row to `sink`.
pub fn run_with<F>(config: &ScenarioConfig, mut sink: F) -> Result<Summary>
where
    F: FnMut(&TraceRow) -> Result<()>,
{
    let mut sim = Simulation::new(config)?;
    let mut builder = SummaryBuilder { threshold: config.settle_threshold, last: None, settle: [None; 3], max_v: None, rows: 0 };
    for row in sim.by_ref() {
        let row = row?;
        builder.push(&row);
        sink(&row)?;
    }
    Ok(builder.finish(sim.certificate()))
}

/// The built-in reference scenario.
pub fn paper_sim<W: Write>(out: W) -> Result<Summary> {
    run_scenario(&paper_preset(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(duration: f64) -> ScenarioConfig {
        ScenarioConfig {
            duration,
            dt: 1e-3,
            seed: 1,
            mode: ObserverMode::Filtered,
            settle_threshold: 1e-3,
            references: paper_preset().references,
            gains: Gains::paper(),
            noise: NoiseConfig { sample_time: 1e-3, power_alpha: 0.0, power_beta: 0.0, power_omega: 0.0 },
            initial: InitialEstimate::Truth,
            signals: TruthSignals { bias: SignalSpec::constant(Vec3::new(0.01, -0.02, 0.03)), ..Default::default() },
            reinit: vec![],
            certificate: None,
        }
    }

    #[test]
    fn equilibrium_run_has_no_error() {
        let cfg = quiet(5.0);
        let mut n = 0;
        run_with(&cfg, |row| {
            assert!(row.body_error.norm() < 1e-9);
            assert!(row.attitude_error < 1e-9);
            n += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(n, 5001);
    }

    #[test]
    fn reinit_applies_at_the_sample_boundary() {
        let mut cfg = quiet(0.01);
        cfg.reinit.push(ReinitEvent { t: 0.005, alpha_hat: Vec3::zeros(), beta_hat: Vec3::zeros(), b_hat: Vec3::zeros() });
        let rows: Vec<TraceRow> = Simulation::new(&cfg).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(rows[5].estimate, ObserverState::default());
        assert_eq!(rows[5].degenerate, DegenerateFlag::AlphaZero);
        assert!(rows[4].estimate.alpha_hat.norm() > 0.9);
    }

    #[test]
    fn csv_shape() {
        let cfg = quiet(0.0105);
        let mut buf = Vec::new();
        let summary = run_scenario(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0].split(',').count(), CSV_COLUMNS.len());
        assert_eq!(lines.len(), 1 + 11);
        assert_eq!(summary.rows, 11);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn config_errors_carry_field_paths() {
        let mut text = paper_preset().to_toml_string().unwrap();
        text = text.replace("k_beta = 10.0", "k_beta = -1.0");
        match ScenarioConfig::from_toml_str(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "gains.k_beta"),
            other => panic!("unexpected {other:?}"),
        }
        let text = paper_preset().to_toml_string().unwrap().replace("sample_time = 0.001", "sample_time = \"fast\"");
        match ScenarioConfig::from_toml_str(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "noise.sample_time"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_round_trips_through_toml() {
        let p = paper_preset();
        let back = ScenarioConfig::from_toml_str(&p.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn attitude_and_rate_signals_are_exclusive() {
        let mut cfg = paper_preset();
        assert!(cfg.signals.attitude.is_some());
        cfg.validate().unwrap();
        cfg.signals.omega = SignalSpec::constant(Vec3::new(0.0, 0.0, 0.1));
        match cfg.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "signals.omega"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_starts_on_its_attitude_trajectory() {
        let cfg = paper_preset();
        let first = Simulation::new(&cfg).unwrap().next().unwrap().unwrap();
        let a = cfg.signals.attitude.as_ref().unwrap().eval(0.0);
        let r0 = crate::so3::euler_to_rot(&crate::so3::EulerAngles::new(a.x, a.y, a.z));
        assert_eq!(first.truth.r, r0);
    }
}
