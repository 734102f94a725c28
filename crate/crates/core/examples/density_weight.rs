//! Singular density-weight functional and the kinetic functional B of a converged
//! solution, for a few admissible alpha.

use slipmix::config::RunConfig;
use slipmix::solver::{initial_state, newton_solve};
use slipmix::verification::diagnostics::{
    alpha_bound, b_functional, density_weight_diagnostic, x0_grid, WeightOptions,
};

fn main() -> slipmix::Result<()> {
    let cfg = RunConfig::default();
    let problem = cfg.problem()?;
    let mut sol = initial_state(&problem, cfg.mesh()?);
    newton_solve(&problem, &mut sol, &cfg.newton())?;
    let grid = x0_grid(&sol.mesh);
    let opts = WeightOptions {
        include_delta: true,
        ..Default::default()
    };
    println!(
        "alpha bound for m = {}: {}",
        problem.params.m_exp,
        alpha_bound(problem.params.m_exp)
    );
    for alpha in [0.25, 0.5, 0.75, 0.95] {
        let d = density_weight_diagnostic(&problem, &sol, &sol.mesh, alpha, &grid, &opts)?;
        println!(
            "alpha {alpha:.2}: sup {:.6} at ({:.4}, {:.4})",
            d.value, d.argmax[0], d.argmax[1]
        );
    }
    for (a, b) in [(1.0, 0.5), (problem.params.gamma, 0.25)] {
        println!(
            "B(a = {a}, b = {b}) = {:.6e}",
            b_functional(&problem, &sol, &sol.mesh, a, b)?
        );
    }
    Ok(())
}
