//! Command dispatch.

use std::path::PathBuf;

use thermoform::freezing::{default_schedule, FREEZING_TOL};
use thermoform::{
    beta_sweep, bowen_root, cylinder_pressure_estimate, detect_freezing, direct_induced_estimate, format_word,
    h_infinity, nonlinear_direct, nonlinear_induced_direct, nonlinear_induced_root, nonlinear_variational,
    spectral_pressure, to_range_one, verify_all, zero_temperature_limit, FreezingVerdict, NonlinearOptions,
    OptimizeOptions, Problem, Vector, VerifyOptions,
};

use crate::config::{build_model, schema, Command, Model, RunConfig};
use crate::error::CliError;
use crate::output::{sweep_svg, Cell, Table};

/// What a command produced, before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub svg: Option<String>,
    /// Human-readable lines (verdicts, notes).
    pub summary: Vec<String>,
    /// Set by `verify` when some check failed: `(failed, total)`.
    pub failed_checks: Option<(usize, usize)>,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self { table, svg: None, summary: Vec::new(), failed_checks: None }
    }
}

/// Where artifacts go; command-line paths win over the config.
#[derive(Debug, Clone, Default)]
pub struct Destinations {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Destinations {
    pub fn resolve(config: &RunConfig, csv: Option<PathBuf>, svg: Option<PathBuf>) -> Self {
        Self {
            csv: csv.or_else(|| config.output.csv_path.as_ref().map(PathBuf::from)),
            svg: svg.or_else(|| config.output.svg_path.as_ref().map(PathBuf::from)),
        }
    }
}

/// Runs `command` on a parsed configuration. A `command` field in the
/// config must agree with the one requested.
pub fn execute(command: Command, config: &RunConfig, seed: Option<u64>) -> Result<Outcome, CliError> {
    if let Some(c) = config.command {
        if c != command {
            return Err(CliError::Validation(format!("config is for command {c}, not {command}")));
        }
    }
    let mut config = config.clone();
    if let Some(s) = seed {
        config.parameters.seed = s;
    }
    let model = build_model(&config)?;
    match command {
        Command::Pressure => pressure(&model, &config),
        Command::Induced => induced(&model, &config),
        Command::Estimate => estimate(&model, &config),
        Command::Nonlinear => nonlinear(&model, &config),
        Command::NonlinearInduced => nonlinear_induced(&model, &config),
        Command::FreezeSweep => freeze_sweep(&model, &config),
        Command::ZeroTemp => zero_temp(&model, &config),
        Command::MaxRatio => max_ratio(&model, &config),
        Command::Verify => verify(&config),
    }
}

fn problem(model: &Model, config: &RunConfig) -> Result<Problem, CliError> {
    let p = &config.parameters;
    let phi = model.potential(&p.phi, "parameters.phi")?;
    let psi = model.psi(p)?;
    Ok(Problem::new(&model.sft, phi.clone(), psi.clone(), format!("{}/{}", p.phi, psi.label()))?)
}

fn optimize_options(config: &RunConfig) -> OptimizeOptions {
    let p = &config.parameters;
    OptimizeOptions { restarts: p.restarts, seed: p.seed, ..OptimizeOptions::default() }
}

fn nonlinear_inputs<'a>(model: &'a Model, config: &RunConfig) -> Result<(Vector, &'a thermoform::Functional), CliError> {
    let p = &config.parameters;
    let names = p.components.clone().unwrap_or_else(|| vec![p.phi.clone()]);
    let components = names
        .iter()
        .map(|n| model.potential(n, "parameters.components").cloned())
        .collect::<Result<Vec<_>, _>>()?;
    let f = model.functional.as_ref().ok_or_else(|| schema("functional", "this command needs a functional"))?;
    Ok((Vector::new(&model.sft, components)?, f))
}

fn pressure(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let phi = model.potential(&p.phi, "parameters.phi")?;
    let result = match p.method.as_deref().unwrap_or("spectral") {
        "spectral" => {
            let r = to_range_one(&model.sft, &[phi])?;
            spectral_pressure(&r.sft, &r.potentials[0])?
        }
        "cylinder" => {
            let n = p.n.ok_or_else(|| schema("parameters.n", "the cylinder method needs n"))?;
            cylinder_pressure_estimate(&model.sft, phi, n)?
        }
        other => return Err(schema("parameters.method", format!("unknown method {other:?} (spectral, cylinder)"))),
    };
    let mut t = Table::new(&["method", "value", "iterations", "residual", "words"]);
    t.push(vec![
        result.method.to_string().into(),
        result.value.into(),
        result.diagnostics.iterations.into(),
        result.diagnostics.residual.into(),
        result.diagnostics.words.into(),
    ]);
    Ok(Outcome::table(t))
}

fn induced(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let r = bowen_root(&problem(model, config)?)?;
    let (lo, hi) = r.diagnostics.bracket.map_or((None, None), |(a, b)| (Some(a), Some(b)));
    let mut t = Table::new(&["method", "value", "iterations", "bracket_lo", "bracket_hi", "notes"]);
    t.push(vec![
        r.method.to_string().into(),
        r.value.into(),
        r.diagnostics.iterations.into(),
        lo.into(),
        hi.into(),
        r.diagnostics.notes.join("; ").into(),
    ]);
    Ok(Outcome::table(t))
}

fn estimate(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let ts = p.t.as_ref().ok_or_else(|| schema("parameters.T", "estimate needs T"))?.values();
    let problem = problem(model, config)?;
    let root = bowen_root(&problem)?.value;
    let mut t = Table::new(&["T", "q", "value", "root", "difference", "words", "split_cylinders"]);
    for time in ts {
        let e = direct_induced_estimate(&problem, time, p.q)?;
        t.push(vec![
            time.into(),
            p.q.into(),
            e.value.into(),
            root.into(),
            (e.value - root).into(),
            e.diagnostics.words.into(),
            e.diagnostics.split_cylinders.into(),
        ]);
    }
    Ok(Outcome::table(t))
}

fn nonlinear(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let (v, f) = nonlinear_inputs(model, config)?;
    let methods: Vec<&str> = match p.method.as_deref() {
        Some(m) => vec![m],
        None if p.n.is_some() => vec!["direct", "variational"],
        None => vec!["variational"],
    };
    let mut t = Table::new(&["method", "n", "value", "heuristic"]);
    let mut outcome_notes = Vec::new();
    for m in methods {
        match m {
            "direct" => {
                let n = p.n.ok_or_else(|| schema("parameters.n", "the direct method needs n"))?;
                let r = nonlinear_direct(&model.sft, &v, f, n)?;
                t.push(vec!["direct".into(), n.into(), r.value.into(), (!f.is_convex()).into()]);
            }
            "variational" => {
                let options = NonlinearOptions { optimize: optimize_options(config), heuristic: p.heuristic };
                let r = nonlinear_variational(&model.sft, &v, f, options)?;
                if r.heuristic {
                    outcome_notes.push("F is not convex: the variational value is only a lower bound".to_string());
                }
                t.push(vec!["variational".into(), Cell::Empty, r.value.into(), r.heuristic.into()]);
            }
            other => {
                return Err(schema("parameters.method", format!("unknown method {other:?} (direct, variational)")))
            }
        }
    }
    let mut out = Outcome::table(t);
    out.summary = outcome_notes;
    Ok(out)
}

fn nonlinear_induced(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let (v, f) = nonlinear_inputs(model, config)?;
    let psi = model.psi(p)?;
    let options = NonlinearOptions { optimize: optimize_options(config), heuristic: p.heuristic };
    let mut t = Table::new(&["method", "T", "value", "residual", "notes"]);
    let r = nonlinear_induced_root(&model.sft, &v, psi, f, options)?;
    t.push(vec![
        r.method.to_string().into(),
        Cell::Empty,
        r.value.into(),
        r.diagnostics.residual.into(),
        r.diagnostics.notes.join("; ").into(),
    ]);
    for time in p.t.as_ref().map(|t| t.values()).unwrap_or_default() {
        let d = nonlinear_induced_direct(&model.sft, &v, psi, f, time, p.q)?;
        t.push(vec![d.method.to_string().into(), time.into(), d.value.into(), Cell::Empty, Cell::Empty]);
    }
    Ok(Outcome::table(t))
}

fn freeze_sweep(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let grid = p.beta_grid.as_ref().ok_or_else(|| schema("parameters.beta_grid", "freeze-sweep needs a beta grid"))?;
    let betas = grid.points();
    if betas.is_empty() {
        return Err(schema("parameters.beta_grid", "grid is empty"));
    }
    let problem = problem(model, config)?;
    let sweep = beta_sweep(&model.sft, problem.phi(), problem.psi(), &betas)?;
    let tol = p.tolerances.freezing.or(p.tolerances.all).unwrap_or(FREEZING_TOL);
    let verdict = match detect_freezing(&sweep, tol) {
        FreezingVerdict::FrozenAt(b) => format!("frozen at beta = {b}"),
        FreezingVerdict::Asymptotic => "asymptotic".to_string(),
        FreezingVerdict::Indeterminate => "indeterminate".to_string(),
    };
    let asymptote = sweep.asymptote();
    let mut t = Table::new(&["beta", "pressure", "ratio", "scaled_entropy", "asymptote", "gap"]);
    for i in 0..sweep.len() {
        t.push(vec![
            sweep.betas[i].into(),
            sweep.pressures[i].into(),
            sweep.ratios[i].into(),
            sweep.scaled_entropies[i].into(),
            asymptote[i].into(),
            sweep.gaps[i].into(),
        ]);
    }
    let svg = if sweep.len() >= 2 { Some(sweep_svg(&sweep)?) } else { None };
    let mut summary = vec![
        format!("verdict: {verdict}"),
        format!("Max = {}, h_inf = {}", sweep.max_ratio, sweep.h_infinity),
    ];
    if !sweep.h_infinity_exact {
        summary.push("h_inf is an upper bound: the maximizing subgraph holds non-maximizing cycles".into());
    }
    Ok(Outcome { table: t, svg, summary, failed_checks: None })
}

fn zero_temp(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let schedule = p.schedule.clone().unwrap_or_else(default_schedule);
    let problem = problem(model, config)?;
    let r = zero_temperature_limit(&model.sft, problem.phi(), problem.psi(), &schedule, p.depth)?;
    let mut t = Table::new(&["beta", "ratio", "ratio_error", "max_increment"]);
    for (i, point) in r.points.iter().enumerate() {
        let inc = if i == 0 { None } else { Some(r.increments[i - 1]) };
        t.push(vec![point.beta.into(), point.ratio.into(), point.ratio_error.into(), inc.into()]);
    }
    let mut out = Outcome::table(t);
    out.summary = vec![
        format!("Max = {}", r.max_ratio),
        format!("rate constant C = {}, final point within max(1e-6, C/beta): {}", r.rate_constant, r.rate_ok),
    ];
    Ok(out)
}

fn max_ratio(model: &Model, config: &RunConfig) -> Result<Outcome, CliError> {
    let problem = problem(model, config)?.range_one()?;
    let h = h_infinity(problem.sft(), problem.phi(), problem.psi())?;
    let k = problem.sft().alphabet_size();
    let mut t = Table::new(&["max_ratio", "witness", "h_infinity", "h_infinity_exact", "subgraph_edges", "iterations"]);
    t.push(vec![
        h.max_ratio.value.into(),
        format_word(h.max_ratio.witness.states(), k).into(),
        h.value.into(),
        h.exact.into(),
        h.max_ratio.subgraph_edges.len().into(),
        h.max_ratio.iterations.into(),
    ]);
    let mut out = Outcome::table(t);
    if problem.sft() != &model.sft {
        out.summary.push("potentials were recoded to range 1; the witness uses block symbols".into());
    }
    Ok(out)
}

fn verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let p = &config.parameters;
    let options = VerifyOptions {
        seed: p.seed,
        draws: p.draws,
        cycle_pairs: p.cycle_pairs,
        restarts: p.restarts,
        tolerances: p.tolerances.resolve(),
    };
    let report = verify_all(&options);
    let mut t = Table::new(&["check", "cases", "failures", "worst_margin", "passed", "detail"]);
    for c in &report.checks {
        t.push(vec![
            c.name.clone().into(),
            c.cases.into(),
            c.failures.into(),
            c.worst_margin.into(),
            c.passed().into(),
            c.detail.clone().into(),
        ]);
    }
    let failed = report.failed_checks().count();
    let mut out = Outcome::table(t);
    out.summary = report.failed_checks().map(ToString::to_string).collect();
    out.summary.push(format!("{} of {} checks passed", report.checks.len() - failed, report.checks.len()));
    out.failed_checks = (failed > 0).then_some((failed, report.checks.len()));
    Ok(out)
}
