//! Existence regime over a small grid of exponents, planar and axisymmetric.

use slipmix::verification::regime::{classify_regime, RegimeQuery};

fn main() -> slipmix::Result<()> {
    let gammas = [1.2, 1.3, 1.5, 2.0];
    let ms = [0.8, 1.0, 1.5, 2.0, 4.0];
    for axisymmetric in [false, true] {
        println!("axisymmetric = {axisymmetric}, a = 1");
        print!("{:>8}", "gamma\\m");
        for m in ms {
            print!("{m:>22}");
        }
        println!();
        for g in gammas {
            print!("{g:>8}");
            for m in ms {
                let r = classify_regime(&RegimeQuery {
                    gamma: g,
                    m_exp: m,
                    a_exp: 1.0,
                    axisymmetric,
                    f_friction: 1.0,
                })?;
                print!("{:>22}", r.to_string());
            }
            println!();
        }
        println!();
    }
    Ok(())
}
