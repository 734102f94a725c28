//! Nodal field storage on the channel mesh, pointwise evaluation, interpolation,
//! and analytic smooth fields used as manufactured solutions and test functions.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{domain, Result};
use crate::mesh::{ChannelMesh, ShapeAt};

pub const RHO: usize = 0;
pub const U1: usize = 1;
pub const U2: usize = 2;
pub const THETA: usize = 3;
pub const Y0: usize = 4;

/// Number of unknown fields per node for `n` species.
pub fn num_fields(n: usize) -> usize {
    4 + n
}

/// Values, gradients and Laplacians of every field at one point, in the node
/// field order [rho, u1, u2, theta, Y1..Yn].
#[derive(Debug, Clone, PartialEq)]
pub struct PointState {
    pub v: Vec<f64>,
    pub g: Vec<[f64; 2]>,
    pub lap: Vec<f64>,
}

impl PointState {
    pub fn zeros(nf: usize) -> Self {
        Self {
            v: vec![0.0; nf],
            g: vec![[0.0; 2]; nf],
            lap: vec![0.0; nf],
        }
    }

    pub fn n_species(&self) -> usize {
        self.v.len() - 4
    }

    pub fn y(&self) -> &[f64] {
        &self.v[Y0..]
    }
}

/// Anything that can be sampled pointwise: discrete solutions and analytic
/// manufactured fields.
pub trait FieldSource: Send + Sync {
    fn n_species(&self) -> usize;
    fn sample(&self, x: [f64; 2]) -> PointState;
    /// Sample knowing the element and reference coordinates of `x`.
    fn sample_at(&self, _e: usize, _xi: [f64; 2], x: [f64; 2]) -> PointState {
        self.sample(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub mesh: ChannelMesh,
    pub n: usize,
    /// node-major: data[node * nf + field]
    pub data: Vec<f64>,
}

impl DiscreteSolution {
    pub fn zeros(mesh: ChannelMesh, n: usize) -> Self {
        let len = mesh.num_nodes() * num_fields(n);
        Self {
            mesh,
            n,
            data: vec![0.0; len],
        }
    }

    /// Uniform state.
    pub fn uniform(mesh: ChannelMesh, rho: f64, u: [f64; 2], theta: f64, y: &[f64]) -> Self {
        let n = y.len();
        let mut s = Self::zeros(mesh, n);
        for node in 0..s.mesh.num_nodes() {
            s.set(node, RHO, rho);
            s.set(node, U1, u[0]);
            s.set(node, U2, u[1]);
            s.set(node, THETA, theta);
            for (k, yk) in y.iter().enumerate() {
                s.set(node, Y0 + k, *yk);
            }
        }
        s.enforce_slip();
        s
    }

    pub fn nf(&self) -> usize {
        num_fields(self.n)
    }

    pub fn ndof(&self) -> usize {
        self.data.len()
    }

    pub fn dof(&self, node: usize, field: usize) -> usize {
        node * self.nf() + field
    }

    pub fn get(&self, node: usize, field: usize) -> f64 {
        self.data[node * self.nf() + field]
    }

    pub fn set(&mut self, node: usize, field: usize, v: f64) {
        let nf = self.nf();
        self.data[node * nf + field] = v;
    }

    /// Degrees of freedom removed by the slip constraint (wall-normal velocity).
    pub fn constrained_dofs(&self) -> Vec<usize> {
        (0..self.mesh.num_nodes())
            .filter(|&n| self.mesh.is_wall_node(n))
            .map(|n| self.dof(n, U2))
            .collect()
    }

    pub fn enforce_slip(&mut self) {
        for d in self.constrained_dofs() {
            self.data[d] = 0.0;
        }
    }

    pub fn field_min(&self, field: usize) -> f64 {
        (0..self.mesh.num_nodes())
            .map(|n| self.get(n, field))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn field_max(&self, field: usize) -> f64 {
        (0..self.mesh.num_nodes())
            .map(|n| self.get(n, field))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Strict positivity of rho, theta and every Y_k at the nodes.
    pub fn check_positive(&self) -> Result<()> {
        for f in [RHO, THETA].into_iter().chain(Y0..Y0 + self.n) {
            let m = self.field_min(f);
            if !(m > 0.0) {
                return Err(domain(format!(
                    "nodal field {f} has non-positive minimum {m:e}"
                )));
            }
        }
        Ok(())
    }

    pub fn element_values(&self, e: usize) -> Vec<[f64; 9]> {
        let nodes = self.mesh.element_nodes(e);
        let nf = self.nf();
        let mut out = vec![[0.0; 9]; nf];
        for (l, &node) in nodes.iter().enumerate() {
            for f in 0..nf {
                out[f][l] = self.data[node * nf + f];
            }
        }
        out
    }

    pub fn eval_with(&self, e: usize, sh: &ShapeAt) -> PointState {
        let nf = self.nf();
        let nodes = self.mesh.element_nodes(e);
        let mut ps = PointState::zeros(nf);
        for (l, &node) in nodes.iter().enumerate() {
            let base = node * nf;
            for f in 0..nf {
                let c = self.data[base + f];
                ps.v[f] += sh.phi[l] * c;
                ps.g[f][0] += sh.grad[l][0] * c;
                ps.g[f][1] += sh.grad[l][1] * c;
                ps.lap[f] += sh.lap[l] * c;
            }
        }
        ps
    }

    /// Nodal interpolant of any field source.
    pub fn interpolate(mesh: &ChannelMesh, src: &dyn FieldSource) -> Self {
        let n = src.n_species();
        let mut s = Self::zeros(mesh.clone(), n);
        let nf = s.nf();
        for node in 0..mesh.num_nodes() {
            let ps = src.sample(mesh.node_coords(node));
            s.data[node * nf..(node + 1) * nf].copy_from_slice(&ps.v);
        }
        s
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl FieldSource for DiscreteSolution {
    fn n_species(&self) -> usize {
        self.n
    }

    fn sample(&self, x: [f64; 2]) -> PointState {
        let (e, xi) = self.mesh.locate(x);
        self.eval_with(e, &self.mesh.shape(xi))
    }

    fn sample_at(&self, e: usize, xi: [f64; 2], _x: [f64; 2]) -> PointState {
        self.eval_with(e, &self.mesh.shape(xi))
    }
}

/// x-dependence of a smooth-field term: cos or sin of 2 pi p x / Lx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XMode {
    Cos(u32),
    Sin(u32),
}

/// y-dependence: cos / sin of pi q y / Ly, or (y/Ly)^q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YMode {
    Cos(u32),
    Sin(u32),
    Pow(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub c: f64,
    pub x: XMode,
    pub y: YMode,
}

/// Finite sum of separable terms c X(x) Y(y), periodic in x with period Lx.
/// Value, gradient and Laplacian are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothField {
    pub lx: f64,
    pub ly: f64,
    pub terms: Vec<Term>,
}

impl SmoothField {
    pub fn zero(lx: f64, ly: f64) -> Self {
        Self {
            lx,
            ly,
            terms: Vec::new(),
        }
    }

    pub fn constant(lx: f64, ly: f64, c: f64) -> Self {
        Self::zero(lx, ly).with(c, XMode::Cos(0), YMode::Pow(0))
    }

    pub fn with(mut self, c: f64, x: XMode, y: YMode) -> Self {
        self.terms.push(Term { c, x, y });
        self
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term { c: t.c * a, ..*t })
                .collect(),
            ..self.clone()
        }
    }

    /// Random smooth field: a constant plus `nterms` low-frequency modes with
    /// coefficients in [-amp, amp].
    pub fn random(rng: &mut impl Rng, lx: f64, ly: f64, nterms: usize, amp: f64) -> Self {
        let mut f = Self::zero(lx, ly);
        for _ in 0..nterms {
            let p = rng.gen_range(0..3u32);
            let q = rng.gen_range(0..3u32);
            let x = if rng.gen_bool(0.5) {
                XMode::Cos(p)
            } else {
                XMode::Sin(p.max(1))
            };
            let y = match rng.gen_range(0..3) {
                0 => YMode::Cos(q),
                1 => YMode::Sin(q.max(1)),
                _ => YMode::Pow(q),
            };
            f = f.with(rng.gen_range(-amp..amp), x, y);
        }
        f
    }

    fn xpart(&self, m: XMode, x: f64) -> (f64, f64, f64) {
        let (p, cs) = match m {
            XMode::Cos(p) => (p, true),
            XMode::Sin(p) => (p, false),
        };
        let k = 2.0 * PI * p as f64 / self.lx;
        let (s, c) = (k * x).sin_cos();
        if cs {
            (c, -k * s, -k * k * c)
        } else {
            (s, k * c, -k * k * s)
        }
    }

    fn ypart(&self, m: YMode, y: f64) -> (f64, f64, f64) {
        match m {
            YMode::Cos(q) | YMode::Sin(q) => {
                let k = PI * q as f64 / self.ly;
                let (s, c) = (k * y).sin_cos();
                if matches!(m, YMode::Cos(_)) {
                    (c, -k * s, -k * k * c)
                } else {
                    (s, k * c, -k * k * s)
                }
            }
            YMode::Pow(q) => {
                let t = y / self.ly;
                let qf = q as f64;
                let v = t.powi(q as i32);
                let d = if q >= 1 {
                    qf * t.powi(q as i32 - 1) / self.ly
                } else {
                    0.0
                };
                let dd = if q >= 2 {
                    qf * (qf - 1.0) * t.powi(q as i32 - 2) / (self.ly * self.ly)
                } else {
                    0.0
                };
                (v, d, dd)
            }
        }
    }

    /// (value, gradient, Laplacian)
    pub fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2], f64) {
        let (mut v, mut g, mut l) = (0.0, [0.0; 2], 0.0);
        for t in &self.terms {
            let (a, da, dda) = self.xpart(t.x, x[0]);
            let (b, db, ddb) = self.ypart(t.y, x[1]);
            v += t.c * a * b;
            g[0] += t.c * da * b;
            g[1] += t.c * a * db;
            l += t.c * (dda * b + a * ddb);
        }
        (v, g, l)
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        self.eval(x).0
    }
}

/// Analytic fields for every unknown, in node field order.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFields {
    pub fields: Vec<SmoothField>,
}

impl FieldSource for AnalyticFields {
    fn n_species(&self) -> usize {
        self.fields.len() - 4
    }

    fn sample(&self, x: [f64; 2]) -> PointState {
        let nf = self.fields.len();
        let mut ps = PointState::zeros(nf);
        for (f, sf) in self.fields.iter().enumerate() {
            let (v, g, l) = sf.eval(x);
            ps.v[f] = v;
            ps.g[f] = g;
            ps.lap[f] = l;
        }
        ps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::GaussRule;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn smooth_field_derivatives_match_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = SmoothField::random(&mut rng, 2.0, 1.0, 6, 1.0);
        let x = [0.37, 0.61];
        let h = 1e-5;
        let (_, g, l) = f.eval(x);
        let fx = |dx: f64, dy: f64| f.value([x[0] + dx, x[1] + dy]);
        let gx = (fx(h, 0.0) - fx(-h, 0.0)) / (2.0 * h);
        let gy = (fx(0.0, h) - fx(0.0, -h)) / (2.0 * h);
        assert_relative_eq!(g[0], gx, epsilon = 1e-8);
        assert_relative_eq!(g[1], gy, epsilon = 1e-8);
        let h = 1e-4;
        let lap =
            (fx(h, 0.0) + fx(-h, 0.0) + fx(0.0, h) + fx(0.0, -h) - 4.0 * fx(0.0, 0.0)) / (h * h);
        assert_relative_eq!(l, lap, epsilon = 1e-5);
        assert_relative_eq!(f.value([0.1, 0.3]), f.value([2.1, 0.3]), epsilon = 1e-13);
    }

    #[test]
    fn interpolation_reproduces_q2_fields() {
        let mesh = ChannelMesh::new(1.0, 1.0, 3, 2).unwrap();
        let lx = mesh.lx;
        let q = SmoothField::constant(lx, 1.0, 0.5)
            .with(0.3, XMode::Cos(0), YMode::Pow(2))
            .with(0.2, XMode::Cos(0), YMode::Pow(1));
        let fields = AnalyticFields {
            fields: vec![q.clone(); 6],
        };
        let s = DiscreteSolution::interpolate(&mesh, &fields);
        let x = [0.77, 0.41];
        let a = fields.sample(x);
        let b = s.sample(x);
        for f in 0..6 {
            assert_relative_eq!(a.v[f], b.v[f], epsilon = 1e-14);
            assert_relative_eq!(a.g[f][1], b.g[f][1], epsilon = 1e-13);
            assert_relative_eq!(a.lap[f], b.lap[f], epsilon = 1e-12);
        }
        let r = GaussRule::for_degree(5);
        assert_relative_eq!(
            mesh.integrate(&r, |x| s.sample(x).v[RHO]),
            0.5 + 0.1 + 0.1,
            epsilon = 1e-14
        );
    }

    #[test]
    fn periodic_consistency() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mesh = ChannelMesh::new(2.0, 1.0, 4, 3).unwrap();
        let fields = AnalyticFields {
            fields: (0..6)
                .map(|_| SmoothField::random(&mut rng, 2.0, 1.0, 4, 1.0))
                .collect(),
        };
        let s = DiscreteSolution::interpolate(&mesh, &fields);
        for y in [0.0, 0.13, 0.5, 1.0] {
            let a = s.sample([0.0, y]);
            let (e, xi) = (
                mesh.locate([2.0 - 1e-15, y]).0,
                [1.0, mesh.locate([0.0, y]).1[1]],
            );
            let b = s.sample_at(e, xi, [2.0, y]);
            for f in 0..6 {
                assert_relative_eq!(a.v[f], b.v[f], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn slip_and_positivity() {
        let mesh = ChannelMesh::new(1.0, 1.0, 2, 2).unwrap();
        let mut s = DiscreteSolution::uniform(mesh, 1.0, [0.2, 0.3], 1.0, &[0.5, 0.5]);
        for n in 0..s.mesh.num_nodes() {
            if s.mesh.is_wall_node(n) {
                assert_eq!(s.get(n, U2), 0.0);
            } else {
                assert_eq!(s.get(n, U2), 0.3);
            }
        }
        assert!(s.check_positive().is_ok());
        s.set(3, THETA, -1.0);
        assert!(s.check_positive().is_err());
    }
}
