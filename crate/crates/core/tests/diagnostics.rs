use slipmix::approx::{Problem, Schedule};
use slipmix::closures::{DiffusionClosure, ReactionClosure};
use slipmix::fields::{AnalyticFields, SmoothField};
use slipmix::mesh::ChannelMesh;
use slipmix::mixture::{pressure, MixtureParameters, StateSample};
use slipmix::verification::diagnostics::{
    alpha_bound, b_functional, density_weight_diagnostic, weighted_integral, x0_grid, WeightOptions,
};
use slipmix::Error;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        40,
    )
}

/// int over [-ha, ha] x [-hb, hb] of |x|^-alpha, in polar coordinates around the origin.
fn rectangle_weight(ha: f64, hb: f64, alpha: f64) -> f64 {
    let phi = (hb / ha).atan();
    let k = 2.0 - alpha;
    let side = simpson(&|t: f64| (ha / t.cos()).powf(k) / k, -phi, phi, 1e-13);
    let cap = simpson(
        &|t: f64| (hb / t.sin()).powf(k) / k,
        phi,
        std::f64::consts::PI - phi,
        1e-13,
    );
    2.0 * (side + cap)
}

fn problem(gamma: f64) -> Problem {
    let p = MixtureParameters {
        gamma,
        ..Default::default()
    };
    let sch = Schedule::with_defaults(1e-3, 1e-2, 1e-1, 1.0, p.m_exp);
    Problem::new(
        p,
        DiffusionClosure::nondiagonal(1.0, 1.0),
        ReactionClosure::chain(2, 1.0),
        sch,
    )
}

fn uniform(lx: f64, ly: f64, rho: f64, u: f64, theta: f64) -> AnalyticFields {
    let c = |v: f64| SmoothField::constant(lx, ly, v);
    AnalyticFields {
        fields: vec![c(rho), c(u), c(0.0), c(theta), c(0.5), c(0.5)],
    }
}

#[test]
fn weight_of_a_constant_matches_polar_integration() {
    let mesh = ChannelMesh::new(4.0, 1.0, 8, 4).unwrap();
    let one = |_: usize, _: [f64; 2]| 1.0;
    let opts = WeightOptions::default();
    for alpha in [0.25, 0.5, 0.9] {
        let want = rectangle_weight(2.0, 0.5, alpha);
        for x0 in [[2.0, 0.5], [0.3, 0.5], [3.9, 0.5]] {
            // periodic in x: every x0 on the centre line sees the same rectangle
            let got = weighted_integral(&mesh, &one, x0, alpha, &opts);
            assert!(
                (got - want).abs() <= 1e-7 * want,
                "alpha {alpha} x0 {x0:?}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn weight_grows_with_alpha_on_small_domains() {
    let mesh = ChannelMesh::new(0.7, 0.7, 4, 4).unwrap();
    let one = |_: usize, _: [f64; 2]| 1.0;
    let opts = WeightOptions::default();
    for x0 in [[0.35, 0.0], [0.1, 0.35], [0.0, 0.7]] {
        let mut prev = 0.0;
        for i in 1..=9 {
            let v = weighted_integral(&mesh, &one, x0, 0.1 * i as f64, &opts);
            assert!(
                v > prev,
                "x0 {x0:?} alpha {}: {v} <= {prev}",
                0.1 * i as f64
            );
            prev = v;
        }
    }
}

#[test]
fn uniform_rest_state_weight_is_pressure_times_geometry() {
    let pr = problem(2.0);
    let mesh = ChannelMesh::new(1.0, 1.0, 4, 4).unwrap();
    let grid = x0_grid(&mesh);
    let opts = WeightOptions::default();
    let alpha = 0.5;
    let one = |_: usize, _: [f64; 2]| 1.0;
    let geometry = grid
        .iter()
        .map(|&x0| weighted_integral(&mesh, &one, x0, alpha, &opts))
        .fold(0.0, f64::max);
    let (rho, theta) = (0.7, 1.2);
    let v = |r: f64| {
        density_weight_diagnostic(
            &pr,
            &uniform(1.0, 1.0, r, 0.0, theta),
            &mesh,
            alpha,
            &grid,
            &opts,
        )
        .unwrap()
        .value
    };
    let s = StateSample {
        rho,
        u: vec![0.0, 0.0],
        theta,
        y: vec![0.5, 0.5],
    };
    let p = pressure(&s, &pr.params);
    assert!((v(rho) - p * geometry).abs() <= 1e-12 * p * geometry);
    // gamma = 2: the cold part is rho^2, the molecular part is linear in rho
    let gap = v(2.0 * rho) - 2.0 * v(rho);
    assert!(
        (gap - 2.0 * rho * rho * geometry).abs() <= 1e-10 * geometry,
        "{gap}"
    );
}

#[test]
fn kinetic_functional_on_uniform_flow() {
    let pr = problem(1.5);
    let mesh = ChannelMesh::new(2.0, 1.0, 4, 2).unwrap();
    let (rho, u) = (1.3, 0.4);
    let f = uniform(2.0, 1.0, rho, u, 1.0);
    for (a, b) in [(1.0, 0.5), (1.5, 0.25), (1.2, 0.9)] {
        let got = b_functional(&pr, &f, &mesh, a, b).unwrap();
        let u2: f64 = u * u;
        let want = 2.0 * (rho.powf(a) * u2 + rho.powf(b) * u2.powf(b + 1.0));
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }
    for (a, b) in [(0.9, 0.5), (1.6, 0.5), (1.0, 0.0), (1.0, 1.0)] {
        assert!(
            matches!(b_functional(&pr, &f, &mesh, a, b), Err(Error::Config(_))),
            "a {a} b {b}"
        );
    }
}

#[test]
fn alpha_outside_unit_interval_is_rejected() {
    let pr = problem(1.5);
    let mesh = ChannelMesh::new(1.0, 1.0, 2, 2).unwrap();
    let f = uniform(1.0, 1.0, 1.0, 0.0, 1.0);
    let grid = [[0.5, 0.0]];
    for alpha in [0.0, 1.0, -0.2, 1.5] {
        let r = density_weight_diagnostic(&pr, &f, &mesh, alpha, &grid, &WeightOptions::default());
        assert!(matches!(r, Err(Error::Config(_))), "alpha {alpha}");
    }
}

#[test]
fn alpha_bound_lies_in_unit_interval() {
    for i in 1..200 {
        let m = 2.0 / 3.0 + 0.05 * i as f64;
        let b = alpha_bound(m);
        assert!(b > 0.0 && b <= 1.0, "m {m}: {b}");
    }
}
