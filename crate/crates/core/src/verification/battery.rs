//! Fixed, seeded battery of test functions on the periodic channel.
//!
//! Scalars: constants, y, y^2, low x-modes (x itself is not periodic), mixed
//! modes and ten random smooth fields. Vector fields have zero normal component
//! on both walls. Nonnegative scalars are shifted random fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::approx::TestFunction;
use crate::fields::{SmoothField, XMode, YMode};

pub const BATTERY_SEED: u64 = 20_240_601;

#[derive(Debug, Clone)]
pub struct NamedScalar {
    pub name: String,
    pub field: SmoothField,
}

impl TestFunction for NamedScalar {
    fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let (v, g, _) = self.field.eval(x);
        (v, g)
    }
}

/// phi = (a, b * t (1 - t)) with t = y / Ly, so phi . n = 0 on both walls.
#[derive(Debug, Clone)]
pub struct TangentialField {
    pub name: String,
    pub a: SmoothField,
    pub b: SmoothField,
}

impl TangentialField {
    /// (value, gradient) with grad[i][j] = d phi_i / d x_j
    pub fn eval(&self, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let (a, ga, _) = self.a.eval(x);
        let (b, gb, _) = self.b.eval(x);
        let ly = self.b.ly;
        let t = x[1] / ly;
        let bub = t * (1.0 - t);
        let dbub = (1.0 - 2.0 * t) / ly;
        ([a, b * bub], [ga, [gb[0] * bub, gb[1] * bub + b * dbub]])
    }
}

fn named(name: &str, field: SmoothField) -> NamedScalar {
    NamedScalar {
        name: name.to_string(),
        field,
    }
}

pub fn scalar_battery(lx: f64, ly: f64) -> Vec<NamedScalar> {
    let z = || SmoothField::zero(lx, ly);
    let mut out = vec![
        named("one", SmoothField::constant(lx, ly, 1.0)),
        named("y", z().with(1.0, XMode::Cos(0), YMode::Pow(1))),
        named("y2", z().with(1.0, XMode::Cos(0), YMode::Pow(2))),
        named("cos_x", z().with(1.0, XMode::Cos(1), YMode::Pow(0))),
        named("sin_x", z().with(1.0, XMode::Sin(1), YMode::Pow(0))),
        named("y_cos_x", z().with(1.0, XMode::Cos(1), YMode::Pow(1))),
        named("cos_x_cos_y", z().with(1.0, XMode::Cos(1), YMode::Cos(1))),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED);
    for i in 0..10 {
        out.push(named(
            &format!("random_{i:02}"),
            SmoothField::random(&mut rng, lx, ly, 4, 1.0),
        ));
    }
    out
}

/// Nonnegative scalars: constant, y^2, (1 - y)^2 shapes and shifted random fields.
pub fn nonnegative_battery(lx: f64, ly: f64) -> Vec<NamedScalar> {
    let z = || SmoothField::zero(lx, ly);
    let mut out = vec![
        named("one", SmoothField::constant(lx, ly, 1.0)),
        named("y2", z().with(1.0, XMode::Cos(0), YMode::Pow(2))),
        named(
            "one_minus_y_sq",
            z().with(1.0, XMode::Cos(0), YMode::Pow(0))
                .with(-2.0, XMode::Cos(0), YMode::Pow(1))
                .with(1.0, XMode::Cos(0), YMode::Pow(2)),
        ),
        named(
            "bump_x",
            z().with(1.0, XMode::Cos(0), YMode::Pow(0))
                .with(1.0, XMode::Cos(1), YMode::Pow(0)),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED + 1);
    for i in 0..10 {
        let f = SmoothField::random(&mut rng, lx, ly, 4, 1.0);
        // |c X(x) Y(y)| <= |c| on the channel for every term family used
        let shift: f64 = f.terms.iter().map(|t| t.c.abs()).sum();
        out.push(named(
            &format!("shifted_random_{i:02}"),
            f.with(shift, XMode::Cos(0), YMode::Pow(0)),
        ));
    }
    out
}

pub fn vector_battery(lx: f64, ly: f64) -> Vec<TangentialField> {
    let z = || SmoothField::zero(lx, ly);
    let one = SmoothField::constant(lx, ly, 1.0);
    let mut out = vec![
        TangentialField {
            name: "e1".into(),
            a: one.clone(),
            b: z(),
        },
        TangentialField {
            name: "bubble_e2".into(),
            a: z(),
            b: one.clone(),
        },
        TangentialField {
            name: "shear".into(),
            a: z().with(1.0, XMode::Cos(0), YMode::Pow(1)),
            b: z(),
        },
        TangentialField {
            name: "cos_x_mix".into(),
            a: z().with(1.0, XMode::Cos(1), YMode::Cos(1)),
            b: z().with(1.0, XMode::Sin(1), YMode::Pow(0)),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(BATTERY_SEED + 2);
    for i in 0..10 {
        let a = SmoothField::random(&mut rng, lx, ly, 4, 1.0);
        let b = SmoothField::random(&mut rng, lx, ly, 4, 1.0);
        out.push(TangentialField {
            name: format!("random_{i:02}"),
            a,
            b,
        });
    }
    out
}
