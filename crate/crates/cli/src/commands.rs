use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sqzq_core::fields::Rectangle;
use sqzq_core::nonsepstates;
use sqzq_core::pdm::{
    self, Classification, ClassicalForm, Dynamics, Grid, PdmModel, SemiclassicalModel, SolverOptions, Trajectory,
};
use sqzq_core::quantmap::{self, ClassicalFunction, QuantisedOperator, StateFamily};
use sqzq_core::sepstates::{self, PhasePoint, TwoModeParams};
use sqzq_core::verify;

use crate::config::{
    self, check_grid, ConfigError, FamilyConfig, FunctionName, PortraitConfig, Quantity, QuantiseConfig, SimulateConfig,
};

pub enum CliError {
    Config(String),
    /// Numerical failure; partial output may already be on disk.
    Numerical(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

fn numerical(e: sqzq_core::Error) -> CliError {
    match e {
        sqzq_core::Error::InvalidParameter(m) => CliError::Config(m),
        sqzq_core::Error::OutsideBox | sqzq_core::Error::DegenerateSqueezing(_) => CliError::Config(e.to_string()),
        e => CliError::Numerical(e.to_string()),
    }
}

pub struct Common {
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub fock_dim: Option<usize>,
    pub timing: bool,
}

impl Common {
    fn out_dir(&self) -> Result<PathBuf, CliError> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(|e| CliError::Config(format!("--out {}: {e}", dir.display())))?;
        Ok(dir)
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    write(path, &s)
}

/// Round-trip precision: 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn tolerances(tol: Option<f64>, rel: Option<f64>, abs: Option<f64>) -> Result<SolverOptions, CliError> {
    let mut o = SolverOptions::default();
    if let Some(t) = tol.or(rel) {
        o.rel = t;
        o.abs = t * 1e-2;
    }
    if let Some(a) = abs {
        o.abs = a;
    }
    if !(o.rel > 0.0 && o.abs > 0.0) {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    Ok(o)
}

/// Model and state parameters implied by a preset name. `fig5` carries the
/// parameters shared by the fig6 runs.
fn preset_parts(name: &str) -> Result<(PdmModel, Option<TwoModeParams>), CliError> {
    if name == "fig5" {
        let (m, p) = pdm::fig6_params().map_err(numerical)?;
        return Ok((m, Some(p)));
    }
    let p = pdm::preset(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
    Ok((p.model, p.params))
}

pub fn portrait(c: &Common) -> Result<(), CliError> {
    let cfg: PortraitConfig = config::load(c.config.as_deref())?;
    let preset = c.preset.clone().or(cfg.preset.clone());
    let (mut model, mut sep) = (None, None);
    if let Some(name) = &preset {
        let (m, p) = preset_parts(name)?;
        model = Some(m);
        sep = p;
    }
    if let Some(m) = &cfg.model {
        model = Some(m.build()?);
    }
    let mut nonsep = None;
    if let Some(s) = &cfg.state {
        sep = Some(s.separable()?);
        nonsep = Some(s.nonseparable()?);
    }
    let quantity = cfg.quantity.ok_or_else(|| CliError::Config("field `quantity` is required".into()))?;
    let grid: Grid = match (cfg.grid, &model) {
        (Some(g), _) => g,
        (None, Some(m)) => config::default_grid(m, 61),
        (None, None) => {
            let a = pdm::Axis { lo: -1.5, hi: 1.5, n: 61 };
            Grid { q1: a, q2: a }
        }
    };
    check_grid(&grid)?;
    let need_state = || CliError::Config("field `state` (or a preset with state parameters) is required".into());
    let bx = match (cfg.field, &model) {
        (Some(b), _) => Rectangle { lo: b.lo, hi: b.hi },
        (None, Some(m)) => Rectangle::centred([1.0 / m.lambda[0], 1.0 / m.lambda[1]]),
        (None, None) => Rectangle::centred([1.0, 1.0]),
    };
    let p = cfg.p;

    let values: Vec<([f64; 2], f64)> = match quantity {
        Quantity::SepHq => {
            let params = sep.ok_or_else(need_state)?;
            grid.evaluate(|q| portrait_or_nan(sepstates::portrait_hq(&bx, PhasePoint::new(q[0], q[1], p[0], p[1]), &params)))
        }
        Quantity::NonsepHq => {
            let params = match nonsep {
                Some(n) => n,
                None => nonsepstates::NonSepParams::new(sep.ok_or_else(need_state)?, 0.0).map_err(numerical)?,
            };
            grid.evaluate(|q| {
                portrait_or_nan(nonsepstates::nonsep_portrait_hq(&bx, PhasePoint::new(q[0], q[1], p[0], p[1]), &params))
            })
        }
        _ => {
            let model = model.ok_or_else(|| CliError::Config("field `model` (or a preset) is required".into()))?;
            let semi = SemiclassicalModel::new(model, sep.ok_or_else(need_state)?).map_err(numerical)?;
            grid.evaluate(|q| match quantity {
                Quantity::Chi => semi.chi(q),
                Quantity::Mass1 => semi.mass(0, q),
                Quantity::Mass2 => semi.mass(1, q),
                Quantity::Q2chi1 => semi.q2chi(0, q),
                Quantity::Q2chi2 => semi.q2chi(1, q),
                _ => semi.effective_potential(q),
            })
        }
    };

    let mut csv = String::from("q1,q2,value\n");
    for (q, v) in &values {
        let _ = writeln!(csv, "{},{},{}", num(q[0]), num(q[1]), num(*v));
    }
    let path = c.out_dir()?.join(format!("portrait_{}.csv", quantity.name()));
    write(&path, &csv)?;
    println!("{}", path.display());
    if values.iter().any(|(_, v)| !v.is_finite()) {
        return Err(CliError::Numerical("portrait evaluation failed at some grid points (written as NaN)".into()));
    }
    Ok(())
}

fn portrait_or_nan(r: sqzq_core::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

struct Run {
    name: String,
    dynamics: Dynamics,
    model: PdmModel,
    params: Option<TwoModeParams>,
    q0: [f64; 2],
    v0: [f64; 2],
    t_end: f64,
    period: Option<f64>,
}

fn resolve_run(c: &Common, cfg: &SimulateConfig) -> Result<Run, CliError> {
    let preset = c.preset.clone().or(cfg.preset.clone());
    let mut run = match &preset {
        Some(name) => {
            let p = pdm::preset(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
            Run {
                name: name.clone(),
                dynamics: p.dynamics,
                model: p.model,
                params: p.params,
                q0: p.q0,
                v0: p.v0,
                t_end: p.t_end,
                period: p.period,
            }
        }
        None => {
            let missing = |f: &str| CliError::Config(format!("field `{f}` is required without a preset"));
            Run {
                name: "custom".into(),
                dynamics: cfg.dynamics.ok_or_else(|| missing("dynamics"))?,
                model: cfg.model.ok_or_else(|| missing("model"))?.build()?,
                params: None,
                q0: cfg.q0.ok_or_else(|| missing("q0"))?,
                v0: cfg.v0.ok_or_else(|| missing("v0"))?,
                t_end: cfg.t_end.ok_or_else(|| missing("t_end"))?,
                period: None,
            }
        }
    };
    if preset.is_some() {
        if let Some(d) = cfg.dynamics {
            run.dynamics = d;
        }
        if let Some(m) = &cfg.model {
            run.model = m.build()?;
        }
        run.q0 = cfg.q0.unwrap_or(run.q0);
        run.v0 = cfg.v0.unwrap_or(run.v0);
        run.t_end = cfg.t_end.unwrap_or(run.t_end);
    }
    if let Some(s) = &cfg.state {
        run.params = Some(s.separable()?);
    }
    if !(run.t_end.is_finite() && run.t_end > 0.0) {
        return Err(CliError::Config("field `t_end`: must be positive".into()));
    }
    if run.dynamics == Dynamics::Semiclassical && run.params.is_none() {
        return Err(CliError::Config("field `state`: semiclassical dynamics need state parameters".into()));
    }
    Ok(run)
}

fn trajectory_csv(tr: &Trajectory) -> String {
    let mut csv = String::from("t,q1,q2,p1,p2,E\n");
    for s in &tr.samples {
        let _ = writeln!(csv, "{},{},{},{},{},{}", num(s.t), num(s.q[0]), num(s.q[1]), num(s.p[0]), num(s.p[1]), num(s.energy));
    }
    csv
}

pub fn simulate(c: &Common) -> Result<(), CliError> {
    let cfg: SimulateConfig = config::load(c.config.as_deref())?;
    let run = resolve_run(c, &cfg)?;
    let dt = cfg.output_dt.unwrap_or(0.01);
    if !(dt > 0.0) {
        return Err(CliError::Config("field `output_dt`: must be positive".into()));
    }
    let opts = tolerances(c.tol, cfg.rel_tol, cfg.abs_tol)?.with_output_dt(dt);
    let dir = c.out_dir()?;
    let start = Instant::now();
    let result = match run.dynamics {
        Dynamics::Classical => {
            if !run.model.inside(run.q0) {
                return Err(CliError::Config("field `q0`: outside the allowed box".into()));
            }
            pdm::classical_integrate(&run.model, run.q0, run.v0, (0.0, run.t_end), cfg.form, opts)
        }
        Dynamics::Semiclassical => {
            let semi = SemiclassicalModel::new(run.model, run.params.expect("checked")).map_err(numerical)?;
            pdm::semiclassical_integrate(&semi, run.q0, run.v0, (0.0, run.t_end), opts)
        }
    };
    let runtime = start.elapsed().as_secs_f64();

    let mut summary = json!({
        "preset": run.name,
        "dynamics": run.dynamics,
        "t_end": run.t_end,
    });
    let outcome = match result {
        Ok(tr) => {
            write(&dir.join("trajectory.csv"), &trajectory_csv(&tr))?;
            let last = tr.last();
            summary["classification"] = json!(tr.classification);
            summary["energy_drift"] = json!(tr.energy_drift());
            summary["samples"] = json!(tr.samples.len());
            summary["final"] = json!({ "t": last.t, "q": last.q, "p": last.p, "energy": last.energy });
            if run.dynamics == Dynamics::Classical && cfg.form == ClassicalForm::Angle {
                if let Some(period) = run.period {
                    let preset = pdm::Preset {
                        name: "",
                        dynamics: run.dynamics,
                        model: run.model,
                        params: run.params,
                        q0: run.q0,
                        v0: run.v0,
                        t_end: run.t_end,
                        period: Some(period),
                    };
                    summary["period"] = json!(period);
                    summary["recurrence_residual"] = json!(preset.recurrence(opts).map_err(numerical)?);
                }
            }
            if tr.classification == Classification::SingularStop {
                Err(CliError::Numerical(format!("singular mass reached at t = {}", last.t)))
            } else {
                Ok(())
            }
        }
        Err(e) => {
            summary["error"] = json!(e.to_string());
            Err(numerical(e))
        }
    };
    if c.timing {
        summary["runtime_s"] = json!(runtime);
    }
    write_json(&dir.join("summary.json"), &summary)?;
    println!("{}", serde_json::to_string(&summary).expect("json values serialise"));
    outcome
}

pub fn verify(c: &Common) -> Result<(), CliError> {
    let mut cfg: config::VerifyFile = config::load(c.config.as_deref())?;
    if let Some(t) = c.tol {
        cfg.tol = t;
    }
    if let Some(n) = c.fock_dim {
        cfg.fock_dim = n;
    }
    if cfg.draws == 0 || !(cfg.tol > 0.0) || cfg.fock_dim < 8 {
        return Err(CliError::Config("verify needs draws >= 1, tol > 0 and fock_dim >= 8".into()));
    }
    let report = verify::run(&cfg).map_err(numerical)?;
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    match &c.out {
        Some(_) => {
            let path = c.out_dir()?.join("verify.json");
            write(&path, &text)?;
            let failed = report.checks.iter().filter(|k| !k.passed).count();
            println!("{} checks, {} above tolerance, {} errata -> {}", report.checks.len(), failed, report.errata.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn function(name: FunctionName, two_mode: bool) -> Result<ClassicalFunction, CliError> {
    use FunctionName::*;
    let wrong = || CliError::Config(format!("field `function`: {name:?} does not fit the chosen family"));
    Ok(match (name, two_mode) {
        (One, false) => ClassicalFunction::constant(1.0),
        (Q, false) => ClassicalFunction::q(),
        (P, false) => ClassicalFunction::p(),
        (Qp, false) => ClassicalFunction::qp(),
        (QSq, false) => ClassicalFunction::one_mode_polynomial(|q, _| q * q, 2),
        (PSq, false) => ClassicalFunction::one_mode_polynomial(|_, p| p * p, 2),
        (One, true) => ClassicalFunction::two_mode_polynomial(|_| 1.0, 0),
        (Q1, true) => ClassicalFunction::two_mode_polynomial(|x| x.q1, 1),
        (Q2, true) => ClassicalFunction::two_mode_polynomial(|x| x.q2, 1),
        (P1, true) => ClassicalFunction::two_mode_polynomial(|x| x.p1, 1),
        (P2, true) => ClassicalFunction::two_mode_polynomial(|x| x.p2, 1),
        (Q1q2, true) => ClassicalFunction::two_mode_polynomial(|x| x.q1 * x.q2, 2),
        _ => return Err(wrong()),
    })
}

fn operator_csv(op: &QuantisedOperator, two_mode: bool) -> String {
    let m = op.matrix.entries();
    let nb = op.basis;
    let mut csv = String::from(if two_mode { "n1,n2,m1,m2,re,im\n" } else { "n,m,re,im\n" });
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if two_mode {
                let _ = writeln!(csv, "{},{},{},{},{},{}", i / nb, i % nb, j / nb, j % nb, num(v.re), num(v.im));
            } else {
                let _ = writeln!(csv, "{i},{j},{},{}", num(v.re), num(v.im));
            }
        }
    }
    csv
}

pub fn quantise(c: &Common) -> Result<(), CliError> {
    let mut cfg: QuantiseConfig = config::load(c.config.as_deref())?;
    if let Some(d) = c.fock_dim {
        if d == 0 {
            return Err(CliError::Config("--fock-dim must be at least 1".into()));
        }
        cfg.nmax = d - 1;
    }
    let (family, two_mode) = match &cfg.family {
        FamilyConfig::OneMode(s) => (StateFamily::OneMode(s.build()?), false),
        FamilyConfig::TwoMode(s) => (StateFamily::TwoMode(s.nonseparable()?), true),
    };
    let f = function(cfg.function, two_mode)?;
    let op = quantmap::quantise(&f, &family, cfg.nmax).map_err(numerical)?;
    let dir = c.out_dir()?;
    write(&dir.join("operator.csv"), &operator_csv(&op, two_mode))?;
    let summary = json!({
        "function": cfg.function,
        "family": op.family,
        "levels_per_mode": op.basis,
        "dimension": op.matrix.dim(),
        "quadrature_error": op.quadrature_error,
        "anti_hermitian_part": op.anti_hermitian_part(),
        "min_eigenvalue": op.min_eigenvalue(),
    });
    write_json(&dir.join("quantise.json"), &summary)?;
    println!("{}", serde_json::to_string(&summary).expect("json values serialise"));
    Ok(())
}
