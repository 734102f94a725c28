//! Acceptance criteria. One pass/fail line per criterion. A failing criterion is
//! reported but only fails the process when SLIPMIX_ACCEPTANCE_STRICT is set.

use std::path::Path;
use std::time::Instant;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use serde_json::Value;

use slipmix::cli::{run_command, Command, Context};
use slipmix::closures::{closure_sweep, DiffusionClosure, ReactionClosure};
use slipmix::config::RunConfig;
use slipmix::fields::SmoothField;
use slipmix::mixture::MixtureParameters;
use slipmix::solver::{continue_path, initial_state, newton_solve, StageKind};
use slipmix::verification::entropy::{entropy_balance, entropy_balance_algebraic};
use slipmix::verification::identities::{gibbs_relation, production_identity};
use slipmix::verification::mms::mms_convergence;
use slipmix::verification::monitor::apriori_monitor;
use slipmix::verification::regime::{classify_regime, Regime, RegimeQuery};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: &str, title: &str, t: Instant, o: Outcome) -> bool {
    println!(
        "[{}] {id:>3} {title}: {} ({:.1} s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        t.elapsed().as_secs_f64()
    );
    o.pass
}

fn criterion_1() -> Outcome {
    let p = MixtureParameters::default();
    let react = ReactionClosure::chain(p.n(), 1.0);
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, c) in [
        ("nondiagonal", DiffusionClosure::nondiagonal(1.0, 1.0)),
        ("fick", DiffusionClosure::fick(1.0, 1.0)),
    ] {
        let chk = production_identity(&p, &c, &react, 1000, 11).expect("production identity");
        pass &= chk.max_relative_gap <= 1e-8 && chk.min_term >= -1e-10;
        detail.push(format!(
            "{name}: gap {:.2e}, min term {:.2e}",
            chk.max_relative_gap, chk.min_term
        ));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn criterion_2() -> Outcome {
    let chk =
        gibbs_relation(&MixtureParameters::default(), 1000, 12, 1e-6).expect("gibbs relation");
    Outcome {
        pass: chk.max_residual <= 1e-5,
        detail: format!("max residual {:.2e} (tol 1e-5)", chk.max_residual),
    }
}

fn criterion_3() -> Outcome {
    let p = MixtureParameters::default();
    let rep = closure_sweep(
        &p,
        &DiffusionClosure::nondiagonal(1.0, 1.0),
        &DiffusionClosure::fick(1.0, 1.0),
        &ReactionClosure::chain(p.n(), 1.0),
        10_000,
        13,
    )
    .expect("closure sweep");
    Outcome {
        pass: rep.passes()
            && rep.max_flux_sum <= 1e-12
            && rep.max_mass_weighted_rate_sum <= 1e-14
            && rep.max_gibbs_rate_sum <= 1e-12,
        detail: format!(
            "sum F {:.1e}, sum m w {:.1e}, sum g w {:.1e}, min coercivity ratio {:.3}",
            rep.max_flux_sum,
            rep.max_mass_weighted_rate_sum,
            rep.max_gibbs_rate_sum,
            rep.min_coercivity_ratio
        ),
    }
}

fn criterion_4() -> Outcome {
    let cfg = RunConfig::default();
    let problem = cfg.problem().expect("problem");
    let levels = [(8, 8), (16, 16), (32, 32)];
    let t = mms_convergence(&problem, 1.0, 1.0, &levels, 1.0, &cfg.newton()).expect("mms study");
    let pass = t
        .l2_orders
        .iter()
        .all(|o| o.u >= 2.5 && o.theta >= 2.5 && o.rho >= 2.0 && o.y >= 2.0);
    let o = t.finest_l2().expect("orders");
    Outcome {
        pass,
        detail: format!(
            "finest L2 orders rho {:.2}, u {:.2}, theta {:.2}, Y {:.2}",
            o.rho, o.u, o.theta, o.y
        ),
    }
}

fn solve_into(dir: &Path, cfg: RunConfig) -> Value {
    let mut ctx = Context::new(cfg);
    ctx.out = dir.to_path_buf();
    ctx.reproducible = true;
    ctx.quiet = true;
    let code = run_command(&Command::Solve, &ctx).expect("solve runs");
    let s = std::fs::read_to_string(dir.join(&ctx.cfg.output.summary)).expect("summary written");
    let v: Value = serde_json::from_str(&s).expect("summary parses");
    assert!(code == 0 || code == 5, "unexpected exit code {code}");
    v
}

fn entries<'a>(summary: &'a Value, suffix: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
    summary["audit"]["entries"]
        .as_array()
        .expect("entries")
        .iter()
        .filter(move |e| e["name"].as_str().is_some_and(|n| n.ends_with(suffix)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn criterion_5(summary: &Value) -> Outcome {
    let e: Vec<_> = entries(summary, "mass_identity").collect();
    let worst = e
        .iter()
        .map(|x| num(&x["value"]).abs() / num(&x["tolerance"]))
        .fold(0.0, f64::max);
    Outcome {
        pass: !e.is_empty() && e.iter().all(|x| x["pass"].as_bool() == Some(true)),
        detail: format!(
            "{} stages, worst |int rho - M| / (tol/eps) = {:.2e}",
            e.len(),
            worst
        ),
    }
}

fn criterion_6(summary: &Value) -> Outcome {
    let e: Vec<_> = entries(summary, "entropy_equality").collect();
    let worst = e
        .iter()
        .map(|x| num(&x["value"]).abs() / num(&x["tolerance"]) * 1e-6)
        .fold(0.0, f64::max);
    let per_stage = !e.is_empty() && e.iter().all(|x| x["pass"].as_bool() == Some(true));

    // one Newton solve at the first schedule from the same initial state per tolerance
    let final_residual = |tol: f64| -> (f64, f64) {
        let mut cfg = RunConfig::default();
        cfg.solver.newton_tol = tol;
        let problem = cfg.problem().expect("problem");
        let mut sol = initial_state(&problem, cfg.mesh().expect("mesh"));
        newton_solve(&problem, &mut sol, &cfg.newton()).expect("newton");
        let one = SmoothField::constant(1.0, 1.0, 1.0);
        let total = entropy_balance(&problem, &sol, &sol.mesh, &one, &problem.rule)
            .expect("entropy balance")
            .residual();
        (
            total.abs(),
            entropy_balance_algebraic(&problem, &sol, &one)
                .expect("algebraic part")
                .abs(),
        )
    };
    let (loose, loose_alg) = final_residual(1e-8);
    let (tight, tight_alg) = final_residual(1e-12);
    let reduction = loose / tight;
    Outcome {
        pass: per_stage && reduction >= 1e2,
        detail: format!(
            "worst relative residual {worst:.2e} (tol 1e-6); tightening 1e-8 -> 1e-12 reduces |residual| {loose:.2e} -> {tight:.2e}, factor {reduction:.2e} (need 1e2); \
             algebraic part {loose_alg:.2e} -> {tight_alg:.2e}, remainder is quadrature consistency error"
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.geometry.nx = 16;
    cfg.geometry.ny = 16;
    cfg.schedule.end = cfg.schedule.start;
    cfg.schedule.end.eta = 2.5e-4;
    cfg.schedule.end.lambda = cfg.schedule.start.lambda / 16.0;
    let problem = cfg.problem().expect("problem");
    let path = cfg.path().expect("path");
    let mut values = Vec::new();
    let mut last_initial = None;
    continue_path(
        &problem,
        initial_state(&problem, cfg.mesh().expect("mesh")),
        &path,
        &cfg.newton(),
        cfg.solver.max_bisections,
        |rec, prob, sol| {
            let v = apriori_monitor(prob, sol)?
                .get("sum_y_minus_one_l6")
                .expect("monitor entry");
            if rec.kind == StageKind::Lambda {
                values.push(v);
            } else {
                last_initial = Some(v);
            }
            Ok(())
        },
    )
    .expect("continuation");
    let mut seq = vec![last_initial.expect("pre-lambda stage")];
    seq.extend(values);
    let ratios: Vec<f64> = seq.windows(2).map(|w| w[1] / w[0]).collect();
    let (lo, hi) = (0.5 * 0.5f64.sqrt(), 2.0 * 0.5f64.sqrt());
    let pass = ratios.len() == 4
        && seq.windows(2).all(|w| w[1] < w[0])
        && ratios.iter().all(|r| (lo..=hi).contains(r));
    Outcome {
        pass,
        detail: format!(
            "||sum Y - 1||_6 = [{}], ratios [{}] in [{lo:.3}, {hi:.3}]",
            seq.iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(", "),
            ratios
                .iter()
                .map(|v| format!("{v:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn criterion_8(summary: &Value) -> Outcome {
    let e = entries(summary, "global_energy_balance")
        .next()
        .expect("energy entry");
    let rem = num(&entries(summary, "global_energy_remainder")
        .next()
        .expect("remainder")["value"]);
    Outcome {
        pass: e["pass"].as_bool() == Some(true),
        detail: format!(
            "|residual + remainder| {:.2e} <= {:.2e}; regularization remainder {rem:.4e}",
            num(&e["value"]).abs(),
            num(&e["tolerance"])
        ),
    }
}

// ----- independent classifier oracle on exact rationals -----

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn oracle(g: f64, m: f64, a: f64, axi: bool, f: f64) -> Regime {
    let (g, m, a) = (exact(g), exact(m), exact(a));
    let one = BigRational::one();
    // m > 2/3 and m > 2 / (3 (g - 1)), i.e. 3 m (g - 1) > 2 with g > 1
    let base = m > frac(2, 3) && frac(3, 1) * &m * (&g - &one) > frac(2, 1);
    let entropy = if axi {
        f > 0.0 && base && a < frac(3, 2) * &m
    } else {
        base && a < frac(3, 2) * &m
    };
    if !entropy {
        return Regime::OutsideTheory;
    }
    let weak = if axi {
        let tail = if g > frac(5, 4) && g <= frac(4, 3) {
            &m * (frac(15, 1) * &g - frac(16, 1)) > frac(16, 1) * &g
        } else if g > frac(4, 3) && g < frac(5, 3) {
            &m * (frac(9, 1) * &g - frac(7, 1)) > frac(18, 1) - frac(6, 1) * &g
        } else {
            true
        };
        g > frac(5, 4) && m > one && tail
    } else {
        m > one && g > frac(5, 4) && frac(2, 1) * &a < frac(3, 1) * &m - frac(2, 1)
    };
    if weak {
        Regime::Weak
    } else {
        Regime::VariationalEntropy
    }
}

fn criterion_9() -> Outcome {
    let gammas = [
        1.1,
        1.2,
        1.25,
        1.3,
        4.0 / 3.0,
        1.4,
        1.5,
        5.0 / 3.0,
        1.8,
        2.0,
    ];
    let mut points = Vec::new();
    for &g in &gammas {
        let m_entropy = (2.0f64 / 3.0).max(2.0 / (3.0 * (g - 1.0)));
        let m_axi = if g > 1.25 && g <= 4.0 / 3.0 {
            16.0 * g / (15.0 * g - 16.0)
        } else if g > 4.0 / 3.0 && g < 5.0 / 3.0 {
            (18.0 - 6.0 * g) / (9.0 * g - 7.0)
        } else {
            1.5
        };
        for m in [m_entropy, 1.0, m_axi, 2.0, 3.5] {
            for axi in [false, true] {
                for a in [(3.0 * m - 2.0) / 2.0, 1.5 * m] {
                    points.push((g, m, a, axi, 1.0));
                }
            }
        }
    }
    points.push((1.5, 2.0, 1.0, true, 0.0));
    points.push((1.0 + 1e-12, 2.0, 1.0, false, 1.0));
    let mut mismatches = 0;
    let mut counts = [0usize; 3];
    for &(g, m, a, axi, f) in &points {
        let got = classify_regime(&RegimeQuery {
            gamma: g,
            m_exp: m,
            a_exp: a,
            axisymmetric: axi,
            f_friction: f,
        })
        .expect("classify");
        let want = oracle(g, m, a, axi, f);
        counts[want as usize] += 1;
        if got != want {
            mismatches += 1;
            println!("      mismatch at gamma={g} m={m} a={a} axisymmetric={axi}: {got} vs {want}");
        }
    }
    Outcome {
        pass: mismatches == 0 && points.len() >= 200,
        detail: format!(
            "{} points ({} weak, {} variational entropy, {} outside), {mismatches} mismatches",
            points.len(),
            counts[0],
            counts[1],
            counts[2]
        ),
    }
}

fn criterion_10(dir: &Path) -> Outcome {
    let a = dir.join("run_a");
    let b = dir.join("run_b");
    solve_into(&a, RunConfig::default());
    solve_into(&b, RunConfig::default());
    let same = |f: &str| {
        std::fs::read(a.join(f)).expect("read") == std::fs::read(b.join(f)).expect("read")
    };
    let (d, s) = (same("diagnostics.csv"), same("summary.json"));
    Outcome {
        pass: d && s,
        detail: format!("diagnostics.csv identical: {d}, summary.json identical: {s}"),
    }
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut all = true;

    let t = Instant::now();
    let o = criterion_1();
    let pass = o.pass && t.elapsed().as_secs_f64() <= 10.0;
    all &= report("1", "entropy production identity", t, Outcome { pass, ..o });

    let t = Instant::now();
    let o = criterion_2();
    let pass = o.pass && t.elapsed().as_secs_f64() <= 10.0;
    all &= report("2", "Gibbs relation", t, Outcome { pass, ..o });

    let t = Instant::now();
    let o = criterion_3();
    let pass = o.pass && t.elapsed().as_secs_f64() <= 30.0;
    all &= report("3", "closure sweep", t, Outcome { pass, ..o });

    let t = Instant::now();
    let o = criterion_4();
    let pass = o.pass && t.elapsed().as_secs_f64() <= 300.0;
    all &= report(
        "4",
        "manufactured-solution convergence",
        t,
        Outcome { pass, ..o },
    );

    let t = Instant::now();
    let summary = solve_into(&tmp.path().join("base"), RunConfig::default());
    all &= report(
        "5",
        "mass identity at every stage",
        t,
        criterion_5(&summary),
    );

    let t = Instant::now();
    all &= report("6", "entropy-equality audit", t, criterion_6(&summary));

    let t = Instant::now();
    let o = criterion_7();
    let pass = o.pass && t.elapsed().as_secs_f64() <= 600.0;
    all &= report("7", "lambda-continuation law", t, Outcome { pass, ..o });

    let t = Instant::now();
    all &= report("8", "global energy balance", t, criterion_8(&summary));

    let t = Instant::now();
    all &= report("9", "regime classifier", t, criterion_9());

    let t = Instant::now();
    all &= report("10", "reproducible solve", t, criterion_10(tmp.path()));

    println!(
        "acceptance: {}",
        if all {
            "all criteria pass"
        } else {
            "some criteria FAIL"
        }
    );
    if !all && std::env::var_os("SLIPMIX_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
