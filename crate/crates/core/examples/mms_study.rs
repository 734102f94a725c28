//! Manufactured-solution convergence study on 8, 16 and 32 elements per direction.

use slipmix::config::RunConfig;
use slipmix::verification::mms::mms_convergence;

fn main() -> slipmix::Result<()> {
    let cfg = RunConfig::default();
    let problem = cfg.problem()?;
    let levels: Vec<(usize, usize)> = cfg.mms.levels.iter().map(|&n| (n, n)).collect();
    let t = mms_convergence(
        &problem,
        cfg.geometry.lx,
        cfg.geometry.ly,
        &levels,
        cfg.mms.amplitude,
        &cfg.newton(),
    )?;
    print!("{}", t.to_csv());
    println!("\nobserved orders      rho      u        theta    Y");
    for (l2, h1) in t.l2_orders.iter().zip(&t.h1_orders) {
        println!(
            "  L2            {:8.3} {:8.3} {:8.3} {:8.3}",
            l2.rho, l2.u, l2.theta, l2.y
        );
        println!(
            "  H1 seminorm   {:8.3} {:8.3} {:8.3} {:8.3}",
            h1.rho, h1.u, h1.theta, h1.y
        );
    }
    Ok(())
}
