//! Damped Newton iteration for the assembled system and continuation over the
//! regularization parameters (mesh refinement first, then eta, lambda, eps, delta).

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::approx::{assemble, rms, Problem, Schedule};
use crate::error::{config, Error, Result};
use crate::fields::{DiscreteSolution, RHO, THETA, Y0};
use crate::mesh::ChannelMesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonOptions {
    /// Tolerance on the RMS residual ||R||_2 / sqrt(ndof).
    pub newton_tol: f64,
    pub max_iter: usize,
    #[serde(default = "default_armijo")]
    pub armijo: f64,
    #[serde(default = "default_backtracks")]
    pub max_backtracks: usize,
    /// Nodal rho, theta, Y may shrink at most to this fraction of the current value per step.
    #[serde(default = "default_floor")]
    pub floor_fraction: f64,
}

fn default_armijo() -> f64 {
    1e-4
}
fn default_backtracks() -> usize {
    30
}
fn default_floor() -> f64 {
    0.01
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_iter: 50,
            armijo: 1e-4,
            max_backtracks: 30,
            floor_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// RMS residual before each step and after the last one.
    pub residuals: Vec<f64>,
    /// Accepted step lengths.
    pub steps: Vec<f64>,
    pub backtracks: usize,
    pub mass_defect: f64,
}

impl NewtonReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }
}

pub fn mass(sol: &DiscreteSolution, problem: &Problem) -> f64 {
    use crate::fields::FieldSource;
    sol.mesh.integrate(&problem.rule, |x| sol.sample(x).v[RHO])
}

fn positive_fields(n: usize) -> Vec<usize> {
    let mut f = vec![RHO, THETA];
    f.extend(Y0..Y0 + n);
    f
}

/// Largest step in (0, 1] keeping the protected nodal values above `floor` times
/// their current value.
fn fraction_to_boundary(sol: &DiscreteSolution, dx: &[f64], floor: f64) -> f64 {
    let nf = sol.nf();
    let mut alpha = 1.0f64;
    for node in 0..sol.mesh.num_nodes() {
        for f in positive_fields(sol.n) {
            let d = node * nf + f;
            let (x, s) = (sol.data[d], dx[d]);
            if s < 0.0 {
                alpha = alpha.min((1.0 - floor) * x / -s);
            }
        }
    }
    alpha
}

fn linear_solve(problem: &Problem, sol: &DiscreteSolution) -> Result<(Vec<f64>, f64)> {
    let a = assemble(problem, sol, true)?;
    let jac = a.jacobian.expect("jacobian requested");
    let n = a.residual.len();
    let lu = jac
        .sp_lu()
        .map_err(|e| Error::LinearSolveFailure(format!("{e:?}")))?;
    let rhs = Mat::from_fn(n, 1, |i, _| -a.residual[i]);
    let x = lu.solve(&rhs);
    let dx: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if dx.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolveFailure(
            "singular Jacobian (non-finite update)".into(),
        ));
    }
    Ok((dx, rms(&a.residual)))
}

/// Newton's method with Armijo backtracking on the RMS residual and a
/// fraction-to-boundary rule on rho, theta and Y. Converged when the RMS residual
/// is at most `newton_tol` and, without a manufactured source, the mass identity
/// |int rho - M| <= newton_tol / eps holds.
pub fn newton_solve(
    problem: &Problem,
    sol: &mut DiscreteSolution,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    problem.validate()?;
    sol.check_positive()?;
    sol.enforce_slip();
    let mut rep = NewtonReport::default();
    let eps = problem.schedule.eps;
    let check_mass = problem.source.is_none();
    let mut r0 = rms(&assemble(problem, sol, false)?.residual);
    loop {
        rep.residuals.push(r0);
        rep.mass_defect = mass(sol, problem) - problem.params.m_total;
        let mass_ok = !check_mass || rep.mass_defect.abs() <= opts.newton_tol / eps;
        if r0 <= opts.newton_tol && mass_ok {
            return Ok(rep);
        }
        if !r0.is_finite() || rep.iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations: rep.iterations,
                residual: r0,
            });
        }
        let (dx, _) = linear_solve(problem, sol)?;
        let mut alpha = fraction_to_boundary(sol, &dx, opts.floor_fraction);
        let base = sol.data.clone();
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            for (d, (b, s)) in sol.data.iter_mut().zip(base.iter().zip(&dx)) {
                *d = b + alpha * s;
            }
            // the LU solve leaves round-off in the identity rows
            sol.enforce_slip();
            match assemble(problem, sol, false) {
                Ok(a) => {
                    let r = rms(&a.residual);
                    if r.is_finite() && r <= (1.0 - opts.armijo * alpha) * r0 {
                        accepted = Some(r);
                        break;
                    }
                }
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
            rep.backtracks += 1;
            alpha *= 0.5;
        }
        rep.iterations += 1;
        match accepted {
            Some(r) => {
                rep.steps.push(alpha);
                r0 = r;
            }
            None => {
                sol.data = base;
                return Err(Error::NonConvergence {
                    iterations: rep.iterations,
                    residual: r0,
                });
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Initial,
    Refine,
    Eta,
    Lambda,
    Eps,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub kind: StageKind,
    pub schedule: Schedule,
    /// Number of uniform refinements of the base mesh.
    pub level: usize,
}

/// Ordered stages. Parameters only shrink, in the order refine, eta, lambda, eps, delta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationPath {
    pub stages: Vec<Stage>,
}

fn halvings(from: f64, to: f64, factor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut v = from;
    while v * factor >= to * (1.0 - 1e-12) && to < from {
        v *= factor;
        out.push(v);
    }
    if let Some(last) = out.last_mut() {
        if (*last - to).abs() > 1e-12 * to && *last > to {
            out.push(to);
        }
    } else if to < from {
        out.push(to);
    }
    out
}

impl ContinuationPath {
    /// Geometric path from `start` to `end` (each parameter reduced by `factor` per stage).
    pub fn geometric(
        start: Schedule,
        end: Schedule,
        refinements: usize,
        factor: f64,
    ) -> Result<Self> {
        if !(factor > 0.0 && factor < 1.0) {
            return Err(config("reduction factor must lie in (0, 1)"));
        }
        let mut stages = vec![Stage {
            kind: StageKind::Initial,
            schedule: start,
            level: 0,
        }];
        for l in 1..=refinements {
            stages.push(Stage {
                kind: StageKind::Refine,
                schedule: start,
                level: l,
            });
        }
        let mut cur = start;
        for v in halvings(start.eta, end.eta, factor) {
            cur.eta = v;
            stages.push(Stage {
                kind: StageKind::Eta,
                schedule: cur,
                level: refinements,
            });
        }
        for v in halvings(start.lambda, end.lambda, factor) {
            cur.lambda = v;
            stages.push(Stage {
                kind: StageKind::Lambda,
                schedule: cur,
                level: refinements,
            });
        }
        for v in halvings(start.eps, end.eps, factor) {
            cur.eps = v;
            stages.push(Stage {
                kind: StageKind::Eps,
                schedule: cur,
                level: refinements,
            });
        }
        for v in halvings(start.delta, end.delta, factor) {
            cur.delta = v;
            stages.push(Stage {
                kind: StageKind::Delta,
                schedule: cur,
                level: refinements,
            });
        }
        Ok(Self { stages })
    }

    pub fn single(schedule: Schedule) -> Self {
        Self {
            stages: vec![Stage {
                kind: StageKind::Initial,
                schedule,
                level: 0,
            }],
        }
    }

    pub fn validate(&self, m_exp: f64) -> Result<()> {
        if self.stages.is_empty() {
            return Err(config("continuation path has no stages"));
        }
        for (i, w) in self.stages.windows(2).enumerate() {
            let (a, b) = (&w[0].schedule, &w[1].schedule);
            if b.eta > a.eta
                || b.lambda > a.lambda
                || b.eps > a.eps
                || b.delta > a.delta
                || w[1].level < w[0].level
            {
                return Err(config(format!("stage {} increases a parameter", i + 1)));
            }
        }
        for s in &self.stages {
            s.schedule.validate(m_exp)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub kind: StageKind,
    pub schedule: Schedule,
    pub nx: usize,
    pub ny: usize,
    pub newton: NewtonReport,
    pub bisections: usize,
    pub min_rho: f64,
    pub min_theta: f64,
    pub min_y: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveReport {
    pub stages: Vec<StageRecord>,
}

/// Compatible uniform initial state: rho = rho_bar, u = 0, theta = mean wall temperature, Y_k = 1/n.
pub fn initial_state(problem: &Problem, mesh: ChannelMesh) -> DiscreteSolution {
    let n = problem.n();
    let rb = problem.rho_bar(&mesh);
    DiscreteSolution::uniform(
        mesh,
        rb,
        [0.0, 0.0],
        problem.params.theta0.mean(),
        &vec![1.0 / n as f64; n],
    )
}

fn record(
    stage: usize,
    kind: StageKind,
    problem: &Problem,
    sol: &DiscreteSolution,
    newton: NewtonReport,
    bisections: usize,
    t: Instant,
) -> StageRecord {
    let min_y = (Y0..Y0 + sol.n)
        .map(|f| sol.field_min(f))
        .fold(f64::INFINITY, f64::min);
    StageRecord {
        stage,
        kind,
        schedule: problem.schedule,
        nx: sol.mesh.nx,
        ny: sol.mesh.ny,
        newton,
        bisections,
        min_rho: sol.field_min(RHO),
        min_theta: sol.field_min(THETA),
        min_y,
        wall_seconds: t.elapsed().as_secs_f64(),
    }
}

fn geometric_mid(a: Schedule, b: Schedule) -> Schedule {
    let g = |x: f64, y: f64| (x * y).sqrt();
    Schedule {
        eta: g(a.eta, b.eta),
        lambda: g(a.lambda, b.lambda),
        eps: g(a.eps, b.eps),
        delta: g(a.delta, b.delta),
        ..b
    }
}

/// Warm-started sequence of Newton solves along `path`, starting from `init` on the
/// base mesh. A failing stage is retried from the last accepted parameters with the
/// step bisected geometrically, at most `max_bisections` times. `on_stage` sees every
/// accepted stage.
pub fn continue_path(
    base: &Problem,
    init: DiscreteSolution,
    path: &ContinuationPath,
    opts: &NewtonOptions,
    max_bisections: usize,
    mut on_stage: impl FnMut(&StageRecord, &Problem, &DiscreteSolution) -> Result<()>,
) -> Result<(DiscreteSolution, Problem, SolveReport)> {
    path.validate(base.params.m_exp)?;
    base.validate()?;
    let mut sol = init;
    let mut problem = base.clone();
    let mut report = SolveReport::default();
    let mut accepted = path.stages[0].schedule;
    let mut level = 0usize;
    for (i, stage) in path.stages.iter().enumerate() {
        let t = Instant::now();
        while level < stage.level {
            sol = DiscreteSolution::interpolate(&sol.mesh.refined(), &sol);
            sol.enforce_slip();
            level += 1;
        }
        let mut target = stage.schedule;
        let mut bisections = 0usize;
        let newton = loop {
            let mut trial_problem = problem.clone();
            trial_problem.schedule = target;
            let mut trial = sol.clone();
            match newton_solve(&trial_problem, &mut trial, opts) {
                Ok(rep) if target == stage.schedule => {
                    sol = trial;
                    problem = trial_problem;
                    accepted = target;
                    break rep;
                }
                Ok(_) => {
                    // an intermediate point was reached; head for the stage target again
                    sol = trial;
                    problem = trial_problem;
                    accepted = target;
                    target = stage.schedule;
                }
                Err(Error::NonConvergence { .. })
                | Err(Error::LinearSolveFailure(_))
                | Err(Error::Domain(_))
                    if i > 0 && bisections < max_bisections =>
                {
                    bisections += 1;
                    target = geometric_mid(accepted, target);
                }
                Err(Error::NonConvergence { .. })
                | Err(Error::LinearSolveFailure(_))
                | Err(Error::Domain(_))
                    if i > 0 =>
                {
                    return Err(Error::PathStalled {
                        stage: i,
                        bisections,
                    });
                }
                Err(e) => return Err(e),
            }
        };
        let rec = record(i, stage.kind, &problem, &sol, newton, bisections, t);
        on_stage(&rec, &problem, &sol)?;
        report.stages.push(rec);
    }
    Ok((sol, problem, report))
}
