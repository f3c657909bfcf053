//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! gamma = 1.0
//! Omega = 1.0
//! sweep = epsilon 0.0 0.4 41
//! ```

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::dynamics::BlochState;
use crate::effective::AtomConfig;
use crate::error::Error;
use crate::ode::IntegratorOptions;
use crate::quadrature::QuadratureOptions;
use crate::spectra::{BathConfig, PhaseModel};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Gamma,
    Epsilon,
    Omega,
    Delta,
    Phi,
    DeltaN,
    DeltaM,
    XiAbs,
    TauM,
    GammaDecay,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Epsilon => "epsilon",
            SweepParam::Omega => "Omega",
            SweepParam::Delta => "Delta",
            SweepParam::Phi => "phi",
            SweepParam::DeltaN => "delta_N",
            SweepParam::DeltaM => "delta_M",
            SweepParam::XiAbs => "xi_abs",
            SweepParam::TauM => "tau_m",
            SweepParam::GammaDecay => "Gamma",
        }
    }

    fn from_key(key: &str) -> Option<Self> {
        use SweepParam::*;
        [
            Gamma, Epsilon, Omega, Delta, Phi, DeltaN, DeltaM, XiAbs, TauM, GammaDecay,
        ]
        .into_iter()
        .find(|p| p.key() == key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|k| {
                if k == n {
                    return self.stop;
                }
                let s = k as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.start + s * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSpec {
    pub t_i: f64,
    pub tau_m: f64,
    pub k_delta_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outputs {
    pub zeno: bool,
    pub sustainability: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub ode: IntegratorOptions,
    pub quadrature: QuadratureOptions,
    /// Bisection interval width; zero means run to machine precision.
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode: IntegratorOptions::default(),
            quadrature: QuadratureOptions::default(),
            root: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSpec {
    /// Defaults to `20 / gamma`.
    pub t_final: Option<f64>,
    pub samples: usize,
    pub initial: BlochState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectraGrid {
    /// Defaults to `[-10 gamma, 10 gamma]`.
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub atom: AtomConfig,
    pub bath: BathConfig,
    pub measurement: Option<MeasurementSpec>,
    /// Decay parameter used by the dwell-time quantities instead of the
    /// squeezed-bath value.
    pub gamma_override: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub outputs: Outputs,
    pub tolerances: Tolerances,
    pub dynamics: DynamicsSpec,
    pub spectra: SpectraGrid,
}

const KEYS: &[&str] = &[
    "gamma",
    "epsilon",
    "omega_L",
    "Omega",
    "omega_A",
    "Delta",
    "xi_abs",
    "delta_N",
    "delta_M",
    "phase_model",
    "phi",
    "tau_m",
    "t_i",
    "k_delta_E",
    "Gamma",
    "t_final",
    "samples",
    "sigma_z0",
    "sigma_minus0_re",
    "sigma_minus0_im",
    "x_min",
    "x_max",
    "x_count",
    "sweep",
    "outputs",
    "ode_atol",
    "ode_rtol",
    "ode_fixed_step",
    "quad_abs_tol",
    "quad_rel_tol",
    "root_tol",
];

struct Entries {
    values: HashMap<String, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.values.get(key).map(|(l, _)| *l)
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.values.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => parse_number(v)
                .map(Some)
                .ok_or_else(|| err(Some(line), format!("`{key}` expects a finite number, got `{v}`"))),
        }
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse::<usize>()
                .map_err(|_| err(Some(line), format!("`{key}` expects a non-negative integer, got `{v}`"))),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v = self.number(key)?;
        if let Some(x) = v {
            if !(x > 0.0) {
                return Err(err(self.line(key), format!("`{key}` must be positive, got {x}")));
            }
        }
        Ok(v)
    }
}

fn parse_number(text: &str) -> Option<f64> {
    let v: f64 = match text {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        _ => text.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

fn parse_sweep(line: usize, text: &str) -> Result<SweepSpec, ConfigError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if !(parts.len() == 4 || parts.len() == 5) {
        return Err(err(Some(line), "sweep expects `<param> <start> <stop> <count> [log]`"));
    }
    let param =
        SweepParam::from_key(parts[0]).ok_or_else(|| err(Some(line), format!("`{}` cannot be swept", parts[0])))?;
    let start = parse_number(parts[1]).ok_or_else(|| err(Some(line), format!("bad sweep start `{}`", parts[1])))?;
    let stop = parse_number(parts[2]).ok_or_else(|| err(Some(line), format!("bad sweep stop `{}`", parts[2])))?;
    let count: usize = parts[3]
        .parse()
        .map_err(|_| err(Some(line), format!("bad sweep count `{}`", parts[3])))?;
    let spacing = match parts.get(4) {
        None => Spacing::Linear,
        Some(&"log") => Spacing::Log,
        Some(&"linear") => Spacing::Linear,
        Some(other) => return Err(err(Some(line), format!("unknown sweep spacing `{other}`"))),
    };
    if count < 2 {
        return Err(err(Some(line), format!("sweep count must be at least 2, got {count}")));
    }
    if !(start < stop) {
        return Err(err(
            Some(line),
            format!("sweep requires start < stop, got {start} and {stop}"),
        ));
    }
    if spacing == Spacing::Log && start <= 0.0 {
        return Err(err(Some(line), "log sweep requires a positive start"));
    }
    Ok(SweepSpec {
        param,
        start,
        stop,
        count,
        spacing,
    })
}

fn parse_outputs(line: usize, text: &str) -> Result<Outputs, ConfigError> {
    let mut out = Outputs::default();
    for item in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
    {
        match item {
            "timescales" => {}
            "zeno" => out.zeno = true,
            "sustainability" => out.sustainability = true,
            other => return Err(err(Some(line), format!("unknown output `{other}`"))),
        }
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut values = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(Some(line), format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(err(Some(line), format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(err(Some(line), format!("`{key}` has no value")));
        }
        if let Some((first, _)) = values.insert(key.to_string(), (line, value.to_string())) {
            return Err(err(
                Some(line),
                format!("duplicate key `{key}` (first set on line {first})"),
            ));
        }
    }
    let e = Entries { values };

    let sweep = e.raw("sweep").map(|(l, v)| parse_sweep(l, v)).transpose()?;
    let swept = |key: &str| sweep.is_some_and(|s| s.param.key() == key);
    // A swept parameter's base value is the sweep start.
    let base = |key: &str| -> Result<Option<f64>, ConfigError> {
        match e.number(key)? {
            Some(v) => Ok(Some(v)),
            None if swept(key) => Ok(sweep.map(|s| s.start)),
            None => Ok(None),
        }
    };

    let gamma = base("gamma")?;
    let epsilon = base("epsilon")?.unwrap_or(0.0);
    let omega = base("Omega")?;
    let omega_laser = e.number("omega_L")?;
    let omega_atomic = e.number("omega_A")?;
    let delta = match (base("Delta")?, omega_laser, omega_atomic) {
        (Some(d), _, _) => d,
        (None, Some(l), Some(a)) => l - a,
        (None, _, _) => 0.0,
    };
    let phi = base("phi")?.unwrap_or(0.0);
    let phase_model = match e.raw("phase_model") {
        None | Some((_, "constant")) => PhaseModel::Constant(phi),
        Some((_, "linear")) => PhaseModel::Linear {
            phi_atomic: phi,
            rabi: omega.unwrap_or(0.0),
        },
        Some((line, other)) => {
            return Err(err(
                Some(line),
                format!("phase_model must be `constant` or `linear`, got `{other}`"),
            ))
        }
    };

    let bath = BathConfig {
        gamma: gamma.unwrap_or(1.0),
        epsilon,
        omega_laser,
        phase_model,
        delta_n: base("delta_N")?.unwrap_or(0.0),
        delta_m: base("delta_M")?.unwrap_or(0.0),
    };
    let atom = AtomConfig {
        omega_rabi: omega.unwrap_or(0.0),
        omega_atomic,
        delta,
        xi_abs: base("xi_abs")?.unwrap_or(0.0),
    };

    // Invariant violations are reported against the line of the offending key.
    let invariant = |error: Error| -> ConfigError {
        let key = match &error {
            Error::InvalidParameter { name, .. } => *name,
            Error::AmplificationThreshold { .. } => "epsilon",
            Error::LinearPhaseWithoutDrive => "phase_model",
            _ => "",
        };
        err(e.line(key).or_else(|| sweep.and(e.line("sweep"))), error.to_string())
    };
    if gamma.is_some() {
        bath.validate().map_err(invariant)?;
    }
    if omega.is_some() {
        atom.validate(&bath).map_err(invariant)?;
    }
    if gamma.is_none() {
        return Err(err(None, "missing required key `gamma`"));
    }
    if omega.is_none() {
        return Err(err(None, "missing required key `Omega`"));
    }
    if let PhaseModel::Linear { rabi, .. } = phase_model {
        if rabi == 0.0 && !swept("Omega") {
            return Err(invariant(Error::LinearPhaseWithoutDrive));
        }
    }

    let tau_m = base("tau_m")?;
    if let Some(t) = tau_m {
        if !(t > 0.0) {
            return Err(err(e.line("tau_m"), format!("`tau_m` must be positive, got {t}")));
        }
    }
    let measurement = tau_m.map(|tau_m| -> Result<MeasurementSpec, ConfigError> {
        Ok(MeasurementSpec {
            t_i: e.number_or("t_i", 0.0)?,
            tau_m,
            k_delta_e: e.number_or("k_delta_E", 0.0)?,
        })
    });
    let measurement = measurement.transpose()?;
    let gamma_override = base("Gamma")?;
    if let Some(g) = gamma_override {
        if !(g >= 0.0) {
            return Err(err(e.line("Gamma"), format!("`Gamma` must be non-negative, got {g}")));
        }
    }

    let outputs = match e.raw("outputs") {
        Some((line, v)) => parse_outputs(line, v)?,
        None => Outputs::default(),
    };

    let mut ode = IntegratorOptions::default();
    if let Some(v) = e.positive("ode_atol")? {
        ode.atol = v;
    }
    if let Some(v) = e.positive("ode_rtol")? {
        ode.rtol = v;
    }
    ode.fixed_step = e.positive("ode_fixed_step")?;
    let mut quadrature = QuadratureOptions::default();
    if let Some(v) = e.positive("quad_abs_tol")? {
        quadrature.abs_tol = v;
    }
    if let Some(v) = e.positive("quad_rel_tol")? {
        quadrature.rel_tol = v;
    }
    let root = e.positive("root_tol")?.unwrap_or(0.0);

    let samples = e.count("samples", 101)?;
    if samples < 2 {
        return Err(err(e.line("samples"), "`samples` must be at least 2"));
    }
    let sigma_z0 = e.number_or("sigma_z0", -1.0)?;
    let sigma_minus0 = Complex64::new(
        e.number_or("sigma_minus0_re", 0.0)?,
        e.number_or("sigma_minus0_im", 0.0)?,
    );
    let initial = BlochState::new(sigma_minus0, sigma_z0);
    if !initial.is_physical(0.0) || 0.25 * sigma_z0 * sigma_z0 + sigma_minus0.norm_sqr() > 0.25 + 1e-12 {
        return Err(err(
            e.line("sigma_z0")
                .or(e.line("sigma_minus0_re"))
                .or(e.line("sigma_minus0_im")),
            "initial state lies outside the Bloch ball",
        ));
    }
    let dynamics = DynamicsSpec {
        t_final: e.positive("t_final")?,
        samples,
        initial,
    };

    let x_count = e.count("x_count", 201)?;
    if x_count < 2 {
        return Err(err(e.line("x_count"), "`x_count` must be at least 2"));
    }
    let spectra = SpectraGrid {
        x_min: e.number("x_min")?,
        x_max: e.number("x_max")?,
        count: x_count,
    };
    let (lo, hi) = (
        spectra.x_min.unwrap_or(-10.0 * bath.gamma),
        spectra.x_max.unwrap_or(10.0 * bath.gamma),
    );
    if !(lo < hi) {
        return Err(err(
            e.line("x_max").or(e.line("x_min")),
            "spectrum grid requires x_min < x_max",
        ));
    }

    Ok(RunConfig {
        atom,
        bath,
        measurement,
        gamma_override,
        sweep,
        outputs,
        tolerances: Tolerances { ode, quadrature, root },
        dynamics,
        spectra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("gamma = 1.0\nOmega = 1.0").unwrap();
        assert_eq!(c.bath.gamma, 1.0);
        assert_eq!(c.bath.epsilon, 0.0);
        assert_eq!(c.bath.delta_n, 0.0);
        assert_eq!(c.bath.delta_m, 0.0);
        assert_eq!(c.atom.omega_rabi, 1.0);
        assert_eq!(c.atom.delta, 0.0);
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c.sweep.is_none() && c.measurement.is_none());
    }

    #[test]
    fn amplification_threshold_reported_on_its_line() {
        let e = parse_config("gamma = 1.0\nepsilon = 0.6").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("threshold"), "{e}");
    }

    #[test]
    fn sweep_grammar() {
        let c = parse_config("gamma = 1.0\nOmega = 1.0\nsweep = epsilon 0.0 0.4 41").unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.param, SweepParam::Epsilon);
        let v = s.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[40], 0.4);
        let log = parse_config("gamma = 1\nOmega = 1\nsweep = tau_m 0.01 10 4 log").unwrap();
        let v = log.sweep.unwrap().values();
        assert!((v[1] - 0.1).abs() < 1e-15 && (v[2] - 1.0).abs() < 1e-14 && v[3] == 10.0);
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            ("gamma = 1\nOmega = 1\nfoo = 2", Some(3)),
            ("gamma = 1\nOmega", Some(2)),
            ("gamma = 1\ngamma = 2\nOmega = 1", Some(2)),
            ("Omega = 1", None),
            ("gamma = 1", None),
            ("gamma = 1\nOmega = 1\nsweep = epsilon 0.4 0.0 5", Some(3)),
            ("gamma = 1\nOmega = 1\nsweep = epsilon 0.0 0.4 1", Some(3)),
            ("gamma = 1\nOmega = 1\nsweep = colour 0 1 3", Some(3)),
            ("gamma = 1\nOmega = -1", Some(2)),
            ("gamma = abc\nOmega = 1", Some(1)),
            ("gamma = 1\nOmega = 1\ntau_m = 0", Some(3)),
            ("gamma = 1\nOmega = 0\nphase_model = linear", Some(3)),
            ("gamma = 1\nOmega = 1\nsigma_z0 = 2", Some(3)),
        ];
        for (text, line) in cases {
            let e = parse_config(text).expect_err(text);
            assert_eq!(e.line, line, "{text}: {e}");
        }
    }

    #[test]
    fn comments_and_detuning_from_frequencies() {
        let c = parse_config("# header\ngamma = 2 # damping\nOmega = 1\nomega_L = 10\nomega_A = 9.5\n").unwrap();
        assert_eq!(c.atom.delta, 0.5);
        let bad = parse_config("gamma = 2\nOmega = 1\nomega_L = 10\nomega_A = 9.5\nDelta = 0.1").unwrap_err();
        assert_eq!(bad.line, Some(5));
    }

    #[test]
    fn swept_parameter_needs_no_base_value() {
        let c = parse_config("gamma = 1\nsweep = Omega 0.5 2 4\nphase_model = linear").unwrap();
        assert_eq!(c.atom.omega_rabi, 0.5);
        assert_eq!(
            c.bath.phase_model,
            PhaseModel::Linear {
                phi_atomic: 0.0,
                rabi: 0.5
            }
        );
    }
}
