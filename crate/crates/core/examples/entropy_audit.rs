//! Entropy balance of a converged solution: named terms, the agreement of the two
//! evaluation routes, and the split into algebraic and consistency parts.

use slipmix::config::RunConfig;
use slipmix::fields::SmoothField;
use slipmix::solver::{initial_state, newton_solve};
use slipmix::verification::battery::nonnegative_battery;
use slipmix::verification::entropy::{
    entropy_balance, entropy_balance_algebraic, entropy_balance_from_residuals,
};

fn main() -> slipmix::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.solver.newton_tol = 1e-12;
    let problem = cfg.problem()?;
    let mut sol = initial_state(&problem, cfg.mesh()?);
    let rep = newton_solve(&problem, &mut sol, &cfg.newton())?;
    println!(
        "converged in {} Newton steps, residual {:.2e}",
        rep.iterations,
        rep.residuals.last().unwrap()
    );

    let one = SmoothField::constant(cfg.geometry.lx, cfg.geometry.ly, 1.0);
    let bal = entropy_balance(&problem, &sol, &sol.mesh, &one, &problem.rule)?;
    println!("\npsi = 1");
    for (side, terms) in [("lhs", &bal.lhs), ("rhs", &bal.rhs)] {
        for (name, v) in terms {
            println!("  {side} {name:32} {v:+.6e}");
        }
    }
    let alg = entropy_balance_algebraic(&problem, &sol, &one)?;
    println!(
        "  residual {:+.3e} = algebraic {:+.3e} + consistency {:+.3e} (scale {:.3e})",
        bal.residual(),
        alg,
        bal.residual() - alg,
        bal.scale()
    );

    println!("\nnonnegative battery: relative residual and route gap");
    for psi in nonnegative_battery(cfg.geometry.lx, cfg.geometry.ly) {
        let b = entropy_balance(&problem, &sol, &sol.mesh, &psi, &problem.rule)?;
        let other = entropy_balance_from_residuals(&problem, &sol, &sol.mesh, &psi, &problem.rule)?;
        println!(
            "  {:12} {:.2e}  {:.2e}",
            psi.name,
            b.residual().abs() / b.scale(),
            (b.residual() - other).abs() / b.scale()
        );
    }
    Ok(())
}
