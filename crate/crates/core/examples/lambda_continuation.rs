//! Halving lambda at fixed eps on a 16x16 mesh and tracking ||sum Y - 1||_6.

use slipmix::config::RunConfig;
use slipmix::solver::{continue_path, initial_state, StageKind};
use slipmix::verification::monitor::apriori_monitor;

fn main() -> slipmix::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.geometry.nx = 16;
    cfg.geometry.ny = 16;
    cfg.schedule.end = cfg.schedule.start;
    cfg.schedule.end.eta = 2.5e-4;
    cfg.schedule.end.lambda = cfg.schedule.start.lambda / 16.0;
    let problem = cfg.problem()?;
    let mut prev: Option<f64> = None;
    continue_path(
        &problem,
        initial_state(&problem, cfg.mesh()?),
        &cfg.path()?,
        &cfg.newton(),
        cfg.solver.max_bisections,
        |rec, prob, sol| {
            let v = apriori_monitor(prob, sol)?
                .get("sum_y_minus_one_l6")
                .unwrap_or(f64::NAN);
            let ratio = match (rec.kind, prev) {
                (StageKind::Lambda, Some(p)) => format!("{:.3}", v / p),
                _ => "-".into(),
            };
            println!(
                "{:?} lambda {:.3e}: ||sum Y - 1||_6 = {v:.4e}, ratio {ratio}",
                rec.kind, prob.schedule.lambda
            );
            prev = Some(v);
            Ok(())
        },
    )?;
    Ok(())
}
