//! Randomized validation of the built-in diffusion and reaction closures, and a
//! closure that is rejected because reacting species have different heat capacities.

use slipmix::closures::{closure_sweep, DiffusionClosure, ReactionClosure};
use slipmix::mixture::MixtureParameters;

fn main() -> slipmix::Result<()> {
    let p = MixtureParameters {
        molar_masses: vec![1.0; 3],
        cv: vec![1.5; 3],
        ..Default::default()
    };
    let rep = closure_sweep(
        &p,
        &DiffusionClosure::nondiagonal(1.0, 1.0),
        &DiffusionClosure::fick(1.0, 1.0),
        &ReactionClosure::chain(3, 2.0),
        5000,
        42,
    )?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    println!("passes: {}", rep.passes());

    let bad = MixtureParameters {
        cv: vec![1.5, 2.5],
        ..Default::default()
    };
    match closure_sweep(
        &bad,
        &DiffusionClosure::nondiagonal(1.0, 1.0),
        &DiffusionClosure::fick(1.0, 1.0),
        &ReactionClosure::chain(2, 1.0),
        100,
        42,
    ) {
        Ok(r) => println!("unequal heat capacities: passes = {}", r.passes()),
        Err(e) => println!("unequal heat capacities: {e}"),
    }
    Ok(())
}
