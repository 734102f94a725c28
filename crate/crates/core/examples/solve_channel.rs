//! Continuation solve of the default channel problem, printing one line per stage.

use slipmix::config::RunConfig;
use slipmix::fields::{RHO, THETA, U1};
use slipmix::solver::{continue_path, initial_state, mass};

fn main() -> slipmix::Result<()> {
    let cfg = RunConfig::default();
    cfg.validate()?;
    let problem = cfg.problem()?;
    let path = cfg.path()?;
    println!(
        "{} stages on a {}x{} mesh",
        path.stages.len(),
        cfg.geometry.nx,
        cfg.geometry.ny
    );
    let (sol, last, _) = continue_path(
        &problem,
        initial_state(&problem, cfg.mesh()?),
        &path,
        &cfg.newton(),
        cfg.solver.max_bisections,
        |rec, prob, sol| {
            let s = &prob.schedule;
            println!(
                "stage {:2} {:?}: eta {:.2e} lambda {:.2e} eps {:.2e} delta {:.2e}, {} Newton steps, mass {:.12}",
                rec.stage,
                rec.kind,
                s.eta,
                s.lambda,
                s.eps,
                s.delta,
                rec.newton.iterations,
                mass(sol, prob)
            );
            Ok(())
        },
    )?;
    println!(
        "rho in [{:.4}, {:.4}], theta in [{:.4}, {:.4}], max u1 {:.4}",
        sol.field_min(RHO),
        sol.field_max(RHO),
        sol.field_min(THETA),
        sol.field_max(THETA),
        sol.field_max(U1)
    );
    println!("final eps {:.3e}", last.schedule.eps);
    Ok(())
}
