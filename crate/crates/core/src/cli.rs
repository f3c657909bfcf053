//! Command-line driver: reads a run configuration, evaluates one subcommand
//! and emits CSV.
//!
//! Exit status is 0 on success, 1 for an invalid configuration and 2 when
//! the computation itself fails.

pub mod config;
pub mod table;

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::coherence::coherence_time;
use crate::coherence::timescales_from_params;
use crate::dynamics::{
    integrate_bloch_at, master_superoperator, positivity_check, propagate_density, steady_state_analytic,
    steady_state_long_time, steady_state_numeric, BlochEquations, DensityMatrix, SteadyState, LONG_TIME_MAX_BLOCKS,
};
use crate::effective::effective_params;
use crate::error::Error;
use crate::quadrature::integrate;
use crate::spectra::{lambda_mu, spectrum_m_abs, spectrum_n, squeezing_phase, BathConfig, PhaseModel};
use crate::sustainability::{solve_phi_closed_form, solve_phi_root_with_tol, SMALL_ANGLE_LIMIT};
use crate::zeno::{
    coherence_dwell_ratio, dwell_time_frequent, dwell_time_weak, survival_probability_weak, MeasurementWindow,
};
use crate::AtomConfig;

pub use config::{parse_config, ConfigError, RunConfig, SweepParam, SweepSpec};
pub use table::{format_f64, Table};

use table::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectra,
    SteadyState,
    Dynamics,
    Timescales,
    Zeno,
    Sustainability,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid configuration: {e}"),
            RunError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub table: Table,
    pub warnings: Vec<String>,
    /// Rows whose `error` column is set.
    pub failed_rows: usize,
}

impl RunOutcome {
    /// Every row failed, or a single-row command failed.
    pub fn failed(&self) -> bool {
        !self.table.rows.is_empty() && self.failed_rows == self.table.rows.len()
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    match command {
        Command::Spectra => run_spectra(cfg),
        Command::SteadyState => run_steady_state(cfg),
        Command::Dynamics => run_dynamics(cfg),
        Command::Timescales => Ok(points_table(cfg, std::slice::from_ref(cfg))),
        Command::Zeno => run_zeno(cfg),
        Command::Sustainability => run_sustainability(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}

/// Reads `config_path`, runs `command`, writes CSV to `out` (stdout when
/// absent) and returns the process exit status.
pub fn execute(command: Command, config_path: &Path, out: Option<&Path>, quiet: bool) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return 1;
        }
    };
    let result = parse_config(&text)
        .map_err(RunError::from)
        .and_then(|cfg| run(command, &cfg));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if !quiet {
        for w in &outcome.warnings {
            eprintln!("warning: {w}");
        }
    }
    let csv = outcome.table.to_csv();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{csv}"),
    }
    if outcome.failed() {
        eprintln!("error: computation failed; see the error column");
        return 2;
    }
    0
}

fn runtime(e: Error) -> RunError {
    RunError::Runtime(e.to_string())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn run_spectra(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let pair = lambda_mu(&cfg.bath).map_err(runtime)?;
    let g = cfg.bath.gamma;
    let xs = linspace(
        cfg.spectra.x_min.unwrap_or(-10.0 * g),
        cfg.spectra.x_max.unwrap_or(10.0 * g),
        cfg.spectra.count,
    );
    let mut table = Table::new(["x", "N", "M_abs", "saturation_residual"]);
    for x in xs {
        let n = spectrum_n(x, &pair);
        let m = spectrum_m_abs(x, &pair);
        let mut row = Row::new(&table);
        row.num("x", x);
        row.num("N", n);
        row.num("M_abs", m);
        row.num("saturation_residual", m * m - n * (n + 1.0));
        let row = row.finish();
        table.rows.push(row);
    }
    Ok(RunOutcome {
        table,
        warnings: Vec::new(),
        failed_rows: 0,
    })
}

type SteadySolver<'a> = Box<dyn Fn() -> crate::Result<SteadyState> + 'a>;

fn run_steady_state(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let p = effective_params(&cfg.atom, &cfg.bath).map_err(runtime)?;
    let eqs = BlochEquations::new(&p, &cfg.atom, &cfg.bath);
    let margin = p.physicality().margin;
    let mut table = Table::new([
        "method",
        "sigma_z",
        "re_sigma_minus",
        "im_sigma_minus",
        "d",
        "residual",
        "min_eigenvalue",
        "physicality_margin",
        "error",
    ]);
    let methods: [(&str, SteadySolver); 3] = [
        ("analytic", Box::new(|| steady_state_analytic(&p, &cfg.atom, &cfg.bath))),
        (
            "linear_solve",
            Box::new(|| steady_state_numeric(&p, &cfg.atom, &cfg.bath)),
        ),
        (
            "long_time",
            Box::new(|| steady_state_long_time(&eqs, cfg.dynamics.initial, &cfg.tolerances.ode, LONG_TIME_MAX_BLOCKS)),
        ),
    ];
    let mut failed = 0;
    let mut warnings = Vec::new();
    for (name, solve) in methods {
        let mut row = Row::new(&table);
        row.set("method", name);
        row.num("physicality_margin", margin);
        match solve() {
            Ok(ss) => {
                let state = ss.as_bloch();
                row.num("sigma_z", ss.sigma_z_ss);
                row.num("re_sigma_minus", ss.sigma_minus_ss.re);
                row.num("im_sigma_minus", ss.sigma_minus_ss.im);
                row.num("d", ss.d);
                row.num("residual", eqs.residual(&state));
                row.num("min_eigenvalue", DensityMatrix::from_bloch(&state).min_eigenvalue());
            }
            Err(e) => {
                failed += 1;
                row.set("error", e.to_string());
            }
        }
        let row = row.finish();
        table.rows.push(row);
    }
    if !p.physicality().passes {
        warnings.push(format!(
            "effective coefficients violate |M~|^2 <= N~(N~+1) (margin {margin:e})"
        ));
    }
    Ok(RunOutcome {
        table,
        warnings,
        failed_rows: failed,
    })
}

fn run_dynamics(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let p = effective_params(&cfg.atom, &cfg.bath).map_err(runtime)?;
    let eqs = BlochEquations::new(&p, &cfg.atom, &cfg.bath);
    let t_final = cfg.dynamics.t_final.unwrap_or(20.0 / cfg.bath.gamma);
    let times = linspace(0.0, t_final, cfg.dynamics.samples);
    let trajectory = integrate_bloch_at(&eqs, cfg.dynamics.initial, &times, &cfg.tolerances.ode).map_err(runtime)?;
    let generator = master_superoperator(&eqs);
    let rho0 = DensityMatrix::from_bloch(&cfg.dynamics.initial);

    let mut table = Table::new([
        "t",
        "re_sigma_minus",
        "im_sigma_minus",
        "sigma_z",
        "trace",
        "min_eigenvalue",
        "master_deviation",
    ]);
    let mut warnings = Vec::new();
    for point in trajectory {
        let rho = propagate_density(&rho0, &generator, point.t);
        if warnings.is_empty() {
            if let Some(v) = positivity_check(&rho, &eqs) {
                warnings.push(format!(
                    "state loses positivity at t = {} (min eigenvalue {:e}, physicality margin {:e})",
                    format_f64(point.t),
                    v.min_eigenvalue,
                    v.physicality.margin
                ));
            }
        }
        let mut row = Row::new(&table);
        row.num("t", point.t);
        row.num("re_sigma_minus", point.state.sigma_minus.re);
        row.num("im_sigma_minus", point.state.sigma_minus.im);
        row.num("sigma_z", point.state.sigma_z);
        row.num("trace", rho.trace().re);
        row.num("min_eigenvalue", rho.min_eigenvalue());
        row.num("master_deviation", rho.to_bloch().distance(&point.state));
        let row = row.finish();
        table.rows.push(row);
    }
    Ok(RunOutcome {
        table,
        warnings,
        failed_rows: 0,
    })
}

fn run_zeno(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let m = cfg.measurement.ok_or_else(|| {
        RunError::Config(ConfigError {
            line: None,
            message: "the zeno command needs `tau_m`".into(),
        })
    })?;
    let mut table = Table::new([
        "Gamma",
        "tau_m",
        "tau_C",
        "tau_D_exact",
        "tau_D_frequent",
        "tau_D_quadrature",
        "ratio",
        "sustainable",
        "error",
    ]);
    let mut row = Row::new(&table);
    row.num("tau_m", m.tau_m);
    let result = (|| -> crate::Result<()> {
        let gamma = match cfg.gamma_override {
            Some(g) => g,
            None => {
                let p = effective_params(&cfg.atom, &cfg.bath)?;
                timescales_from_params(&cfg.atom, &p, &cfg.bath)?.gamma_decay
            }
        };
        row.num("Gamma", gamma);
        row.num("tau_C", coherence_time(gamma)?);
        row.num("tau_D_exact", dwell_time_weak(gamma, m.tau_m)?);
        row.num("tau_D_frequent", dwell_time_frequent(gamma, m.tau_m)?);
        let window = MeasurementWindow::from_duration(m.t_i, m.tau_m)?;
        let q = integrate(
            |t| survival_probability_weak(t, &window, gamma).unwrap_or(f64::NAN),
            window.t_i(),
            window.t_f(),
            cfg.tolerances.quadrature,
        )?;
        row.num("tau_D_quadrature", q.value);
        let r = coherence_dwell_ratio(gamma, m.tau_m)?;
        row.num("ratio", r.ratio);
        row.set("sustainable", r.sustainable.to_string());
        Ok(())
    })();
    let failed = match result {
        Ok(()) => 0,
        Err(e) => {
            row.set("error", e.to_string());
            1
        }
    };
    let row = row.finish();
    table.rows.push(row);
    Ok(RunOutcome {
        table,
        warnings: Vec::new(),
        failed_rows: failed,
    })
}

fn run_sustainability(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let (atom, bath) = (&cfg.atom, &cfg.bath);
    let mut table = Table::new([
        "phi_star",
        "phi_companion",
        "phi_star_bisection",
        "zeta",
        "omega_tilde_required",
        "feasible",
        "residual",
        "Gamma_at_phi_star",
        "tau_C_at_phi_star",
        "small_angle_valid",
        "error",
    ]);
    let mut row = Row::new(&table);
    let mut warnings = Vec::new();
    let result = (|| -> crate::Result<()> {
        let closed = solve_phi_closed_form(atom, bath)?;
        row.num("phi_star", closed.phi_star);
        row.num("phi_companion", closed.phi_companion);
        row.num("zeta", closed.zeta);
        row.opt("omega_tilde_required", closed.omega_tilde_required);
        if let Some(f) = closed.feasible {
            row.set("feasible", f.to_string());
        }
        row.num("residual", closed.residual);
        row.set("small_angle_valid", closed.small_angle_valid().to_string());
        if matches!(bath.phase_model, PhaseModel::Linear { .. }) && !closed.small_angle_valid() {
            warnings.push(format!(
                "|phi*| = {} exceeds {SMALL_ANGLE_LIMIT}; the small-angle Omega~ condition is unreliable",
                format_f64(closed.phi_star.abs())
            ));
        }
        let root = solve_phi_root_with_tol(atom, bath, cfg.tolerances.root)?;
        row.num("phi_star_bisection", root.phi_star);
        let at_star = BathConfig {
            phase_model: PhaseModel::Constant(closed.phi_star),
            ..*bath
        };
        let p = effective_params(atom, &at_star)?;
        let report = timescales_from_params(atom, &p, &at_star)?;
        row.num("Gamma_at_phi_star", report.gamma_decay);
        row.num("tau_C_at_phi_star", report.tau_c);
        Ok(())
    })();
    let failed = match result {
        Ok(()) => 0,
        Err(e) => {
            row.set("error", e.to_string());
            1
        }
    };
    let row = row.finish();
    table.rows.push(row);
    Ok(RunOutcome {
        table,
        warnings,
        failed_rows: failed,
    })
}

/// Configuration for one sweep point.
pub fn apply_sweep_value(cfg: &RunConfig, param: SweepParam, v: f64) -> RunConfig {
    let mut c = cfg.clone();
    match param {
        SweepParam::Gamma => c.bath.gamma = v,
        SweepParam::Epsilon => c.bath.epsilon = v,
        SweepParam::Omega => {
            c.atom.omega_rabi = v;
            if let PhaseModel::Linear { rabi, .. } = &mut c.bath.phase_model {
                *rabi = v;
            }
        }
        SweepParam::Delta => {
            c.atom.delta = v;
            c.atom.omega_atomic = None;
        }
        SweepParam::Phi => match &mut c.bath.phase_model {
            PhaseModel::Constant(phi) => *phi = v,
            PhaseModel::Linear { phi_atomic, .. } => *phi_atomic = v,
        },
        SweepParam::DeltaN => c.bath.delta_n = v,
        SweepParam::DeltaM => c.bath.delta_m = v,
        SweepParam::XiAbs => c.atom.xi_abs = v,
        SweepParam::TauM => {
            let mut m = c.measurement.unwrap_or(config::MeasurementSpec {
                t_i: 0.0,
                tau_m: v,
                k_delta_e: 0.0,
            });
            m.tau_m = v;
            c.measurement = Some(m);
        }
        SweepParam::GammaDecay => c.gamma_override = Some(v),
    }
    c
}

fn run_sweep(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let spec = cfg.sweep.ok_or_else(|| {
        RunError::Config(ConfigError {
            line: None,
            message: "the sweep command needs a `sweep` line".into(),
        })
    })?;
    let points: Vec<RunConfig> = spec
        .values()
        .into_iter()
        .map(|v| apply_sweep_value(cfg, spec.param, v))
        .collect();
    let mut outcome = points_table(cfg, &points);
    if outcome.failed_rows > 0 && !outcome.failed() {
        outcome.warnings.push(format!(
            "{} of {} sweep points failed",
            outcome.failed_rows,
            points.len()
        ));
    }
    Ok(outcome)
}

const BASE_COLUMNS: [&str; 15] = [
    "gamma",
    "epsilon",
    "Omega",
    "Delta",
    "phi",
    "delta_N",
    "delta_M",
    "xi_abs",
    "Gamma",
    "tau_C",
    "tau_D",
    "ratio",
    "d",
    "ImM_tilde",
    "alpha",
];
const ZENO_COLUMNS: [&str; 5] = ["Gamma_zeno", "tau_m", "tau_D_exact", "tau_D_frequent", "sustainable"];
const SUSTAINABILITY_COLUMNS: [&str; 6] = [
    "phi_star",
    "phi_star_bisection",
    "zeta",
    "omega_tilde_required",
    "feasible",
    "residual",
];

/// One timescale row per configuration, evaluated in parallel with the
/// output order preserved.
fn points_table(base: &RunConfig, points: &[RunConfig]) -> RunOutcome {
    let with_zeno =
        base.outputs.zeno || base.measurement.is_some() || base.sweep.is_some_and(|s| s.param == SweepParam::TauM);
    let with_sustainability = base.outputs.sustainability;
    let mut header: Vec<&str> = BASE_COLUMNS.to_vec();
    if with_zeno {
        header.extend(ZENO_COLUMNS);
    }
    if with_sustainability {
        header.extend(SUSTAINABILITY_COLUMNS);
    }
    header.push("error");
    let mut table = Table::new(header);

    let rows: Vec<(Vec<String>, bool)> = points
        .par_iter()
        .map(|c| point_row(&table, c, with_zeno, with_sustainability))
        .collect();
    let failed_rows = rows.iter().filter(|(_, failed)| *failed).count();
    table.rows = rows.into_iter().map(|(r, _)| r).collect();
    RunOutcome {
        table,
        warnings: Vec::new(),
        failed_rows,
    }
}

fn point_row(table: &Table, c: &RunConfig, with_zeno: bool, with_sustainability: bool) -> (Vec<String>, bool) {
    let (atom, bath): (&AtomConfig, &BathConfig) = (&c.atom, &c.bath);
    let mut row = Row::new(table);
    let mut errors: Vec<String> = Vec::new();
    row.num("gamma", bath.gamma);
    row.num("epsilon", bath.epsilon);
    row.num("Omega", atom.omega_rabi);
    row.num("Delta", atom.delta);
    row.num("delta_N", bath.delta_n);
    row.num("delta_M", bath.delta_m);
    row.num("xi_abs", atom.xi_abs);
    if let Ok(phi) = squeezing_phase(bath, atom.delta) {
        row.num("phi", phi);
    }

    let report = effective_params(atom, bath).and_then(|p| timescales_from_params(atom, &p, bath));
    let pipeline_gamma = match report {
        Ok(r) => {
            row.num("Gamma", r.gamma_decay);
            row.num("tau_C", r.tau_c);
            row.num("d", r.d);
            row.num("ImM_tilde", r.im_m_tilde);
            row.num("alpha", r.alpha);
            Some(r.gamma_decay)
        }
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    };

    if let Some(m) = c.measurement {
        row.num("tau_m", m.tau_m);
        if let Some(gamma) = c.gamma_override.or(pipeline_gamma) {
            row.num("Gamma_zeno", gamma);
            let dwell = (|| -> crate::Result<()> {
                let frequent = dwell_time_frequent(gamma, m.tau_m)?;
                let ratio = coherence_dwell_ratio(gamma, m.tau_m)?;
                row.num("tau_D", frequent);
                row.num("ratio", ratio.ratio);
                row.num("tau_D_frequent", frequent);
                row.num("tau_D_exact", dwell_time_weak(gamma, m.tau_m)?);
                row.set("sustainable", ratio.sustainable.to_string());
                Ok(())
            })();
            if let Err(e) = dwell {
                errors.push(e.to_string());
            }
        }
    } else if with_zeno {
        errors.push("tau_m is not set".into());
    }

    if with_sustainability {
        let sol = solve_phi_closed_form(atom, bath).and_then(|closed| {
            solve_phi_root_with_tol(atom, bath, c.tolerances.root).map(|root| (closed, root.phi_star))
        });
        match sol {
            Ok((closed, bisected)) => {
                row.num("phi_star", closed.phi_star);
                row.num("phi_star_bisection", bisected);
                row.num("zeta", closed.zeta);
                row.opt("omega_tilde_required", closed.omega_tilde_required);
                if let Some(f) = closed.feasible {
                    row.set("feasible", f.to_string());
                }
                row.num("residual", closed.residual);
            }
            Err(e) => errors.push(e.to_string()),
        }
    }

    errors.dedup();
    let failed = !errors.is_empty();
    row.set("error", errors.join("; "));
    (row.finish(), failed)
}
