//! Batch entry point: argument parsing, subcommand dispatch and the on-disk formats.
//!
//! Exit codes: 0 success, 2 solver failure, 3 invalid configuration,
//! 4 closure validation failure, 5 audit failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::approx::Problem;
use crate::closures::{closure_sweep, DiffusionClosure};
use crate::config::RunConfig;
use crate::error::{config, Error, Result};
use crate::fields::{num_fields, DiscreteSolution, SmoothField};
use crate::mesh::ChannelMesh;
use crate::solver::{continue_path, initial_state, mass, StageKind, StageRecord};
use crate::verification::diagnostics::{
    alpha_bound, b_functional, density_weight_diagnostic, x0_grid, WeightDiagnostic, WeightOptions,
};
use crate::verification::entropy::{entropy_balance, entropy_balance_from_residuals};
use crate::verification::mms::mms_convergence;
use crate::verification::monitor::apriori_monitor;
use crate::verification::regime::{classify_regime, Regime};
use crate::verification::weak::{
    entropy_residuals_def2, global_energy, renormalized_check, weak_residuals_def1,
};
use crate::verification::AuditReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_CLOSURE: i32 = 4;
pub const EXIT_AUDIT: i32 = 5;

/// Seed of the closure sweep when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 1;

/// Relative tolerance of the agreement between the two entropy-balance routes.
const DUAL_ROUTE_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "slipmix",
    version,
    about = "Steady reacting mixture solver with entropy and energy audits"
)]
pub struct Cli {
    /// JSON run configuration; built-in defaults when absent
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// output directory (overrides output.dir)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// byte-identical outputs: sequential sparse factorization, no timings
    #[arg(long, global = true)]
    pub reproducible: bool,
    /// print the default configuration and exit
    #[arg(long)]
    pub dump_defaults: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Continuation run; writes solution, diagnostics and summary
    Solve,
    /// Audit a stored solution against the final stage of the schedule
    Audit {
        /// solution CSV (default: <out>/<output.solution>)
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Manufactured-solution convergence study
    Mms,
    /// Randomized sweep of the built-in closures
    ValidateClosures,
    /// Existence regime of the configured exponents
    Classify,
    /// Density-weight and kinetic functionals of a stored solution
    Diagnose {
        #[arg(long)]
        solution: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => EXIT_CONFIG,
        Error::Closure(_) => EXIT_CLOSURE,
        Error::Domain(_)
        | Error::NonConvergence { .. }
        | Error::LinearSolveFailure(_)
        | Error::PathStalled { .. }
        | Error::Io(_) => EXIT_SOLVER,
    }
}

/// Resolved settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub reproducible: bool,
    /// suppress per-stage progress lines
    pub quiet: bool,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        let out = PathBuf::from(&cfg.output.dir);
        let reproducible = cfg.solver.reproducible;
        Self {
            cfg,
            out,
            seed: DEFAULT_SEED,
            reproducible,
            quiet: false,
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        fs::write(self.path(name), contents)?;
        Ok(())
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    if cli.dump_defaults {
        println!("{}", RunConfig::default().to_json());
        return Ok(EXIT_OK);
    }
    let Some(command) = &cli.command else {
        return Err(config("no subcommand given (try --help)"));
    };
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut ctx = Context::new(cfg);
    if let Some(o) = &cli.out {
        ctx.out = o.clone();
    }
    if let Some(s) = cli.seed {
        ctx.seed = s;
    }
    ctx.reproducible |= cli.reproducible;
    if ctx.reproducible {
        faer::set_global_parallelism(faer::Par::Seq);
    }
    run_command(command, &ctx)
}

pub fn run_command(command: &Command, ctx: &Context) -> Result<i32> {
    match command {
        Command::Solve => solve(ctx),
        Command::Audit { solution } => audit(ctx, solution.as_deref()),
        Command::Mms => mms(ctx),
        Command::ValidateClosures => validate_closures(ctx),
        Command::Classify => classify(ctx),
        Command::Diagnose { solution } => diagnose(ctx, solution.as_deref()),
    }
}

// ---------- file formats ----------

/// Scientific notation with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn rewrite_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                if let Ok(m) = serde_json::from_str::<serde_json::Number>(&fmt_num(f)) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(rewrite_floats),
        Value::Object(o) => o.values_mut().for_each(rewrite_floats),
        _ => {}
    }
}

/// Pretty JSON with every float written with 17 significant digits.
pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let mut v = serde_json::to_value(x)?;
    rewrite_floats(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn solution_header(n: usize) -> String {
    let mut h = String::from("x,y,rho,u1,u2,theta");
    for k in 1..=n {
        h.push_str(&format!(",Y{k}"));
    }
    h
}

pub fn solution_csv(sol: &DiscreteSolution) -> String {
    let nf = sol.nf();
    let mut s = solution_header(sol.n);
    s.push('\n');
    for node in 0..sol.mesh.num_nodes() {
        let x = sol.mesh.node_coords(node);
        let mut row = vec![fmt_num(x[0]), fmt_num(x[1])];
        row.extend((0..nf).map(|f| fmt_num(sol.get(node, f))));
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Inverse of [`solution_csv`]. The mesh is recovered from the node coordinates;
/// `lx` is needed because the periodic column x = Lx is not stored.
pub fn parse_solution_csv(text: &str, lx: f64) -> Result<DiscreteSolution> {
    let bad = |m: String| config(format!("solution file: {m}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 7 {
        return Err(bad("too few columns".into()));
    }
    let n = cols.len() - 6;
    if header.trim() != solution_header(n) {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let v: Vec<f64> = l
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if v.len() != cols.len() {
            return Err(bad(format!("row {} has {} columns", i + 1, v.len())));
        }
        rows.push(v);
    }
    let count_distinct = |j: usize| {
        let mut c: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    };
    let (xs, ys) = (count_distinct(0), count_distinct(1));
    if xs.len() < 2
        || xs.len() % 2 != 0
        || ys.len() < 3
        || ys.len() % 2 != 1
        || rows.len() != xs.len() * ys.len()
    {
        return Err(bad(
            "node coordinates do not form a quadratic channel grid".into()
        ));
    }
    let ly = ys[ys.len() - 1];
    let mesh = ChannelMesh::new(lx, ly, xs.len() / 2, (ys.len() - 1) / 2)?;
    let mut sol = DiscreteSolution::zeros(mesh, n);
    let (dx, dy) = (0.5 * sol.mesh.hx, 0.5 * sol.mesh.hy);
    let nf = num_fields(n);
    for r in &rows {
        let (ix, iy) = ((r[0] / dx).round() as usize, (r[1] / dy).round() as usize);
        let node = sol.mesh.node(ix, iy);
        let c = sol.mesh.node_coords(node);
        if (c[0] - r[0]).abs() > 1e-9 * lx || (c[1] - r[1]).abs() > 1e-9 * ly {
            return Err(bad(format!("node ({}, {}) is off the grid", r[0], r[1])));
        }
        for f in 0..nf {
            sol.set(node, f, r[2 + f]);
        }
    }
    Ok(sol)
}

// ---------- solve ----------

#[derive(Debug, Clone, Serialize)]
pub struct StageRow {
    pub stage: usize,
    pub kind: StageKind,
    pub nx: usize,
    pub ny: usize,
    pub eta: f64,
    pub lambda: f64,
    pub eps: f64,
    pub delta: f64,
    pub newton_iterations: usize,
    pub residual: f64,
    pub mass_defect: f64,
    pub bisections: usize,
    pub min_rho: f64,
    pub min_theta: f64,
    pub min_y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

impl StageRow {
    fn new(r: &StageRecord, mass_defect: f64, reproducible: bool) -> Self {
        Self {
            stage: r.stage,
            kind: r.kind,
            nx: r.nx,
            ny: r.ny,
            eta: r.schedule.eta,
            lambda: r.schedule.lambda,
            eps: r.schedule.eps,
            delta: r.schedule.delta,
            newton_iterations: r.newton.iterations,
            residual: r.newton.final_residual(),
            mass_defect,
            bisections: r.bisections,
            min_rho: r.min_rho,
            min_theta: r.min_theta,
            min_y: r.min_y,
            wall_seconds: (!reproducible).then_some(r.wall_seconds),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub regime: Regime,
    pub passes: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageRow>,
    pub audit: AuditReport,
}

fn kind_name(k: StageKind) -> String {
    serde_json::to_value(k)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Binding per-stage audits: mass identity, entropy equality with psi = 1 and
/// agreement of the two routes to the entropy balance.
pub fn stage_audit(
    report: &mut AuditReport,
    tag: &str,
    problem: &Problem,
    sol: &DiscreteSolution,
    newton_tol: f64,
    entropy_rel_tol: f64,
) -> Result<f64> {
    let mesh = &sol.mesh;
    let defect = (mass(sol, problem) - problem.params.m_total).abs();
    report.equality(
        format!("{tag}mass_identity"),
        defect,
        newton_tol / problem.schedule.eps,
        "total mass constraint",
    );
    let one = SmoothField::constant(mesh.lx, mesh.ly, 1.0);
    let eb = entropy_balance(problem, sol, mesh, &one, &problem.rule)?;
    let scale = eb.scale();
    report.equality(
        format!("{tag}entropy_equality"),
        eb.residual(),
        entropy_rel_tol * scale,
        "entropy equality, unit test function",
    );
    let from_res = entropy_balance_from_residuals(problem, sol, mesh, &one, &problem.rule)?;
    report.equality(
        format!("{tag}entropy_dual_route"),
        eb.residual() - from_res,
        DUAL_ROUTE_TOL * scale,
        "entropy equality recomputed from the discrete residuals",
    );
    Ok(defect)
}

/// Final-state audits: global energy balance (binding) and the advisory limit weak forms.
pub fn final_audit(
    report: &mut AuditReport,
    problem: &Problem,
    sol: &DiscreteSolution,
    ctx: &Context,
) -> Result<()> {
    let mesh = &sol.mesh;
    let ge = global_energy(problem, sol, mesh)?;
    report.equality(
        "global_energy_balance",
        ge.balance(),
        ctx.cfg.audit.energy_rel_tol * ge.scale,
        "global energy balance",
    );
    report.info(
        "global_energy_residual",
        ge.residual,
        "global energy balance without regularization terms",
    );
    report.info(
        "global_energy_remainder",
        ge.remainder,
        "regularization remainder of the global energy balance",
    );
    let tol = ctx.cfg.audit.weak_rel_tol;
    report.extend(weak_residuals_def1(problem, sol, mesh, tol)?);
    report.extend(entropy_residuals_def2(problem, sol, mesh, tol)?);
    report.extend(renormalized_check(problem, sol, mesh, tol));
    Ok(())
}

fn solve(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.cfg;
    cfg.validate()?;
    let problem = cfg.problem()?;
    let path = cfg.path()?;
    let opts = cfg.newton();
    let regime = classify_regime(&cfg.regime_query())?;
    let init = initial_state(&problem, cfg.mesh()?);

    let mut report = AuditReport::default();
    let mut rows: Vec<StageRow> = Vec::new();
    let mut monitor_names: Vec<String> = Vec::new();
    let mut monitor_rows: Vec<Vec<f64>> = Vec::new();
    let result = continue_path(
        &problem,
        init,
        &path,
        &opts,
        cfg.solver.max_bisections,
        |rec, prob, sol| {
            let tag = format!("stage{}.", rec.stage);
            let defect = stage_audit(
                &mut report,
                &tag,
                prob,
                sol,
                opts.newton_tol,
                cfg.audit.entropy_rel_tol,
            )?;
            let mon = apriori_monitor(prob, sol)?;
            if monitor_names.is_empty() {
                monitor_names = mon.names().map(String::from).collect();
            }
            monitor_rows.push(mon.entries.iter().map(|e| e.1).collect());
            let row = StageRow::new(rec, defect, ctx.reproducible);
            if !ctx.quiet {
                println!(
            "stage {:>3} {:<7} {}x{} eta={:.3e} lambda={:.3e} eps={:.3e} delta={:.3e} newton={} residual={:.3e}",
            row.stage,
            kind_name(row.kind),
            row.nx,
            row.ny,
            row.eta,
            row.lambda,
            row.eps,
            row.delta,
            row.newton_iterations,
            row.residual
            );
            }
            rows.push(row);
            Ok(())
        },
    );
    ctx.write(
        &cfg.output.diagnostics,
        &diagnostics_csv(&rows, &monitor_names, &monitor_rows, ctx.reproducible),
    )?;
    let (sol, final_problem, _) = result?;
    final_audit(&mut report, &final_problem, &sol, ctx)?;
    ctx.write(&cfg.output.solution, &solution_csv(&sol))?;
    let summary = Summary {
        schema_version: crate::config::SCHEMA_VERSION,
        command: "solve".into(),
        regime,
        passes: report.passes(),
        stages: rows,
        audit: report,
    };
    ctx.write(&cfg.output.summary, &to_json(&summary)?)?;
    Ok(verdict(&summary.audit))
}

fn verdict(report: &AuditReport) -> i32 {
    let failures: Vec<_> = report.failures().collect();
    for f in &failures {
        eprintln!(
            "audit failure: {} = {:e} (tolerance {:e})",
            f.name, f.value, f.tolerance
        );
    }
    if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_AUDIT
    }
}

pub fn diagnostics_csv(
    rows: &[StageRow],
    names: &[String],
    monitors: &[Vec<f64>],
    reproducible: bool,
) -> String {
    let mut h = vec![
        "stage",
        "kind",
        "nx",
        "ny",
        "eta",
        "lambda",
        "eps",
        "delta",
        "newton_iterations",
        "residual",
        "mass_defect",
        "bisections",
        "min_rho",
        "min_theta",
        "min_y",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    if !reproducible {
        h.push("wall_seconds".into());
    }
    h.extend(names.iter().cloned());
    let mut s = h.join(",") + "\n";
    for (r, m) in rows.iter().zip(monitors) {
        let mut c = vec![
            r.stage.to_string(),
            kind_name(r.kind),
            r.nx.to_string(),
            r.ny.to_string(),
        ];
        c.extend([r.eta, r.lambda, r.eps, r.delta].map(fmt_num));
        c.push(r.newton_iterations.to_string());
        c.push(fmt_num(r.residual));
        c.push(fmt_num(r.mass_defect));
        c.push(r.bisections.to_string());
        c.extend([r.min_rho, r.min_theta, r.min_y].map(fmt_num));
        if let Some(w) = r.wall_seconds {
            c.push(fmt_num(w));
        }
        c.extend(m.iter().map(|v| fmt_num(*v)));
        s.push_str(&c.join(","));
        s.push('\n');
    }
    s
}

// ---------- audit / diagnose on stored solutions ----------

fn load_final(ctx: &Context, solution: Option<&Path>) -> Result<(Problem, DiscreteSolution)> {
    let cfg = &ctx.cfg;
    cfg.validate()?;
    let path = cfg.path()?;
    let mut problem = cfg.problem()?;
    problem.schedule = path
        .stages
        .last()
        .expect("validated path is non-empty")
        .schedule;
    let file = solution
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ctx.path(&cfg.output.solution));
    let text = fs::read_to_string(&file)
        .map_err(|e| config(format!("reading {}: {e}", file.display())))?;
    let sol = parse_solution_csv(&text, cfg.geometry.lx)?;
    if sol.n != problem.n() {
        return Err(config(format!(
            "solution has {} species, configuration has {}",
            sol.n,
            problem.n()
        )));
    }
    Ok((problem, sol))
}

fn audit(ctx: &Context, solution: Option<&Path>) -> Result<i32> {
    let (problem, sol) = load_final(ctx, solution)?;
    let mut report = AuditReport::default();
    stage_audit(
        &mut report,
        "",
        &problem,
        &sol,
        ctx.cfg.solver.newton_tol,
        ctx.cfg.audit.entropy_rel_tol,
    )?;
    final_audit(&mut report, &problem, &sol, ctx)?;
    let summary = Summary {
        schema_version: crate::config::SCHEMA_VERSION,
        command: "audit".into(),
        regime: classify_regime(&ctx.cfg.regime_query())?,
        passes: report.passes(),
        stages: Vec::new(),
        audit: report,
    };
    for e in &summary.audit.entries {
        if e.binding {
            println!(
                "{:<6} {} = {:e} (tolerance {:e})",
                if e.pass { "pass" } else { "FAIL" },
                e.name,
                e.value,
                e.tolerance
            );
        }
    }
    ctx.write(&ctx.cfg.output.audit, &to_json(&summary)?)?;
    Ok(verdict(&summary.audit))
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseReport {
    pub alpha_bound: f64,
    pub density_weight: WeightDiagnostic,
    pub b_exponents: [f64; 2],
    pub b_functional: f64,
}

fn diagnose(ctx: &Context, solution: Option<&Path>) -> Result<i32> {
    let (problem, sol) = load_final(ctx, solution)?;
    let d = &ctx.cfg.diagnose;
    let opts = WeightOptions {
        include_delta: d.include_delta,
        ..Default::default()
    };
    let bound = alpha_bound(problem.params.m_exp);
    if d.alpha >= bound {
        eprintln!(
            "warning: alpha = {} is not below the admissible bound {bound}",
            d.alpha
        );
    }
    let w = density_weight_diagnostic(
        &problem,
        &sol,
        &sol.mesh,
        d.alpha,
        &x0_grid(&sol.mesh),
        &opts,
    )?;
    let b = b_functional(
        &problem,
        &sol,
        &sol.mesh,
        d.b_exponents[0],
        d.b_exponents[1],
    )?;
    println!(
        "density weight (alpha = {}): {:e} at ({}, {})",
        w.alpha, w.value, w.argmax[0], w.argmax[1]
    );
    println!(
        "B functional (a = {}, b = {}): {:e}",
        d.b_exponents[0], d.b_exponents[1], b
    );
    let rep = DiagnoseReport {
        alpha_bound: bound,
        density_weight: w,
        b_exponents: d.b_exponents,
        b_functional: b,
    };
    ctx.write(&ctx.cfg.output.diagnose, &to_json(&rep)?)?;
    Ok(EXIT_OK)
}

// ---------- mms / closures / classify ----------

/// Minimum observed L2 orders on the finest pair of levels: (rho, u, theta, Y).
pub const MMS_MIN_ORDERS: [f64; 4] = [2.0, 2.5, 2.5, 2.0];

fn mms(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.cfg;
    cfg.validate()?;
    let problem = cfg.problem()?;
    let levels: Vec<(usize, usize)> = cfg.mms.levels.iter().map(|&k| (k, k)).collect();
    let table = mms_convergence(
        &problem,
        cfg.geometry.lx,
        cfg.geometry.ly,
        &levels,
        cfg.mms.amplitude,
        &cfg.newton(),
    )?;
    ctx.write(&cfg.output.mms_table, &table.to_csv())?;
    let mut report = AuditReport::default();
    for (i, o) in table.l2_orders.iter().enumerate() {
        println!(
            "levels {}->{}: L2 orders rho {:.3} u {:.3} theta {:.3} Y {:.3}",
            i,
            i + 1,
            o.rho,
            o.u,
            o.theta,
            o.y
        );
    }
    if let Some(o) = table.finest_l2() {
        for (name, v, min) in [
            ("rho", o.rho, MMS_MIN_ORDERS[0]),
            ("u", o.u, MMS_MIN_ORDERS[1]),
            ("theta", o.theta, MMS_MIN_ORDERS[2]),
            ("y", o.y, MMS_MIN_ORDERS[3]),
        ] {
            report.one_sided(
                format!("mms_l2_order_{name}"),
                min - v,
                0.0,
                "observed convergence order",
            );
        }
    }
    Ok(verdict(&report))
}

fn validate_closures(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.cfg;
    let p = cfg.params();
    p.validate()?;
    let (d0, a) = (cfg.physics.d0, cfg.physics.a_exp);
    let rep = closure_sweep(
        &p,
        &DiffusionClosure::nondiagonal(d0, a),
        &DiffusionClosure::fick(d0, a),
        &cfg.reaction(),
        cfg.sweep.samples,
        ctx.seed,
    )?;
    println!("{}", to_json(&rep)?.trim_end());
    if rep.passes() {
        println!(
            "closure sweep passed ({} samples, seed {})",
            rep.samples, ctx.seed
        );
        Ok(EXIT_OK)
    } else {
        eprintln!("closure sweep failed");
        Ok(EXIT_CLOSURE)
    }
}

fn classify(ctx: &Context) -> Result<i32> {
    println!("{}", classify_regime(&ctx.cfg.regime_query())?);
    Ok(EXIT_OK)
}
