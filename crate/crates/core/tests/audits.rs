use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slipmix::approx::{total_energy_residual, Problem, Schedule};
use slipmix::closures::{DiffusionClosure, ReactionClosure};
use slipmix::fields::{AnalyticFields, DiscreteSolution, SmoothField, XMode, YMode, U1, Y0};
use slipmix::mesh::ChannelMesh;
use slipmix::mixture::{MixtureParameters, WallTemperature};
use slipmix::solver::{initial_state, newton_solve, NewtonOptions};
use slipmix::verification::battery::{nonnegative_battery, scalar_battery, vector_battery};
use slipmix::verification::entropy::{
    entropy_balance, entropy_balance_algebraic, entropy_balance_from_residuals,
};
use slipmix::verification::weak::{
    def1_momentum_residual, def1_scalar_residuals, entropy_inequality, global_energy,
    renormalized_residual, sample_fields, truncation_k, TRUNCATION_LEVELS,
};

fn problem(p: MixtureParameters) -> Problem {
    let sch = Schedule::with_defaults(1e-3, 1e-2, 1e-1, 1.0, p.m_exp);
    let n = p.n();
    Problem::new(
        p,
        DiffusionClosure::nondiagonal(1.0, 1.0),
        ReactionClosure::chain(n, 1.0),
        sch,
    )
}

fn random_fields(seed: u64, lx: f64, ly: f64) -> AnalyticFields {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = [1.0, 0.3, 0.0, 1.1, 0.4];
    let mut fields: Vec<SmoothField> = base
        .iter()
        .map(|&c| {
            SmoothField::random(&mut rng, lx, ly, 3, 0.05).with(c, XMode::Cos(0), YMode::Pow(0))
        })
        .collect();
    // u2 vanishes on the walls
    fields[2] = SmoothField::zero(lx, ly).with(0.05, XMode::Cos(1), YMode::Sin(1));
    let y1 = fields[Y0].clone();
    fields.push(y1.scaled(-1.0).with(1.0, XMode::Cos(0), YMode::Pow(0)));
    AnalyticFields { fields }
}

fn converged(tol: f64) -> (Problem, DiscreteSolution) {
    let pr = problem(MixtureParameters::default());
    let mut sol = initial_state(&pr, ChannelMesh::new(1.0, 1.0, 8, 8).unwrap());
    newton_solve(
        &pr,
        &mut sol,
        &NewtonOptions {
            newton_tol: tol,
            ..Default::default()
        },
    )
    .unwrap();
    (pr, sol)
}

#[test]
fn entropy_routes_agree_on_interpolated_fields() {
    let pr = problem(MixtureParameters::default());
    let mesh = ChannelMesh::new(1.0, 1.0, 6, 6).unwrap();
    for seed in 0..4 {
        let sol = DiscreteSolution::interpolate(&mesh, &random_fields(seed, 1.0, 1.0));
        for psi in nonnegative_battery(1.0, 1.0) {
            let terms = entropy_balance(&pr, &sol, &mesh, &psi, &pr.rule).unwrap();
            let other = entropy_balance_from_residuals(&pr, &sol, &mesh, &psi, &pr.rule).unwrap();
            let gap = (terms.residual() - other).abs();
            assert!(
                gap <= 1e-10 * terms.scale(),
                "seed {seed} {}: gap {gap:e}",
                psi.name
            );
        }
    }
}

#[test]
fn algebraic_entropy_part_vanishes_at_convergence() {
    let (pr, sol) = converged(1e-12);
    let one = SmoothField::constant(1.0, 1.0, 1.0);
    let alg = entropy_balance_algebraic(&pr, &sol, &one).unwrap();
    let scale = entropy_balance(&pr, &sol, &sol.mesh, &one, &pr.rule)
        .unwrap()
        .scale();
    assert!(
        alg.abs() <= 1e-10 * scale,
        "algebraic part {alg:e}, scale {scale:e}"
    );
}

#[test]
fn global_energy_splits_the_total_energy_residual() {
    let pr = problem(MixtureParameters::default());
    let mesh = ChannelMesh::new(1.0, 1.0, 5, 5).unwrap();
    let one = SmoothField::constant(1.0, 1.0, 1.0);
    for seed in 10..14 {
        let f = random_fields(seed, 1.0, 1.0);
        let g = global_energy(&pr, &f, &mesh).unwrap();
        let total = total_energy_residual(&pr, &f, &mesh, &one).unwrap();
        assert!(
            (g.balance() - total).abs() <= 1e-12 * (g.scale + g.remainder.abs()),
            "{} vs {total}",
            g.balance()
        );
    }
}

#[test]
fn energy_audit_sees_small_velocity_perturbations() {
    let (pr, sol) = converged(1e-10);
    let g0 = global_energy(&pr, &sol, &sol.mesh).unwrap();
    // constant tangential shift: H1 norm equals its size on the unit square
    let mut pert = sol.clone();
    for node in 0..pert.mesh.num_nodes() {
        pert.set(node, U1, sol.get(node, U1) + 1e-3);
    }
    let g1 = global_energy(&pr, &pert, &pert.mesh).unwrap();
    let change = (g1.balance() - g0.balance()).abs();
    assert!(
        change >= 1e-8 * g0.scale,
        "change {change:e}, scale {:e}",
        g0.scale
    );
}

#[test]
fn limit_forms_vanish_on_a_rest_state() {
    let theta = 1.3;
    let p = MixtureParameters {
        force: [0.0, 0.0],
        theta0: WallTemperature {
            bottom: theta,
            top: theta,
            amplitude: 0.0,
        },
        ..Default::default()
    };
    let pr = problem(p);
    let (lx, ly) = (1.0, 1.0);
    let c = |v: f64| SmoothField::constant(lx, ly, v);
    let rest = AnalyticFields {
        fields: vec![c(0.8), c(0.0), c(0.0), c(theta), c(0.5), c(0.5)],
    };
    let mesh = ChannelMesh::new(lx, ly, 8, 8).unwrap();
    for psi in scalar_battery(lx, ly) {
        let r = def1_scalar_residuals(&pr, &rest, &mesh, &psi).unwrap();
        assert!(r.continuity.0.abs() <= 1e-14);
        assert!(r.species.iter().all(|s| s.0.abs() <= 1e-14));
        assert!(
            r.energy.0.abs() <= 1e-14,
            "{}: energy {:e}",
            psi.name,
            r.energy.0
        );
    }
    for phi in vector_battery(lx, ly) {
        let (v, s) = def1_momentum_residual(&pr, &rest, &mesh, &phi).unwrap();
        // pressure times int div phi: zero exactly, up to quadrature error of the trig modes
        assert!(
            v.abs() <= 1e-8 * s,
            "{}: momentum {v:e} scale {s:e}",
            phi.name
        );
    }
    for psi in nonnegative_battery(lx, ly) {
        let e = entropy_inequality(&pr, &rest, &mesh, &psi).unwrap();
        assert!(
            e.residual().abs() <= 1e-12 * e.scale.max(1.0),
            "{}: {:e}",
            psi.name,
            e.residual()
        );
    }
}

#[test]
fn renormalized_continuity_holds_for_shear_flows_only() {
    let (lx, ly) = (1.0, 1.0);
    let pr = problem(MixtureParameters::default());
    let mesh = ChannelMesh::new(lx, ly, 8, 8).unwrap();
    let c = |v: f64| SmoothField::constant(lx, ly, v);
    let rho = c(1.5).with(0.8, XMode::Cos(0), YMode::Cos(1));
    let shear = SmoothField::zero(lx, ly).with(0.7, XMode::Cos(0), YMode::Pow(2));
    let fields = AnalyticFields {
        fields: vec![rho.clone(), shear, c(0.0), c(1.0), c(0.5), c(0.5)],
    };
    let smp = sample_fields(&pr, &fields, &mesh, &pr.rule);
    for k in TRUNCATION_LEVELS {
        let b = move |z: f64| truncation_k(k, z);
        for psi in scalar_battery(lx, ly) {
            let (v, s) = renormalized_residual(&smp, &b, &psi);
            assert!(v.abs() <= 1e-12 * s.max(1.0), "T{k} {}: {v:e}", psi.name);
        }
    }

    // compressing flow with constant density violates continuity
    let wave = SmoothField::zero(lx, ly).with(0.3, XMode::Sin(1), YMode::Pow(0));
    let bad = AnalyticFields {
        fields: vec![c(2.0), wave, c(0.0), c(1.0), c(0.5), c(0.5)],
    };
    let smp = sample_fields(&pr, &bad, &mesh, &pr.rule);
    let psi = SmoothField::zero(lx, ly).with(1.0, XMode::Cos(1), YMode::Pow(0));
    let b = |z: f64| truncation_k(1.0, z);
    let (v, s) = renormalized_residual(&smp, &b, &psi);
    assert!(
        v.abs() >= 1e-3 * s,
        "negative control residual {v:e}, scale {s:e}"
    );
}
