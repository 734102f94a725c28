//! Periodic channel mesh with biquadratic elements, Gauss rules and integration.
//!
//! The domain is [0, Lx] x [0, Ly], periodic in x, with slip walls at y = 0 and
//! y = Ly. Nodes sit on a (2 nx) x (2 ny + 1) grid after identifying x = 0 with
//! x = Lx; node index is `iy * 2nx + ix`.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Gauss-Legendre rule on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `npts` points; exact for polynomials of degree 2 npts - 1.
    pub fn new(npts: usize) -> Self {
        assert!(npts >= 1);
        let n = npts;
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            points[i] = 0.5 * (1.0 - x);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { points, weights }
    }

    /// Smallest rule exact to polynomial `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// 1D quadratic Lagrange basis on [0,1] with nodes 0, 1/2, 1: values, first and
/// second derivatives.
pub fn lagrange2(t: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    (
        [
            2.0 * (t - 0.5) * (t - 1.0),
            -4.0 * t * (t - 1.0),
            2.0 * t * (t - 0.5),
        ],
        [4.0 * t - 3.0, -8.0 * t + 4.0, 4.0 * t - 1.0],
        [4.0, -8.0, 4.0],
    )
}

/// Q2 shape data at one reference point, already mapped to physical derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ShapeAt {
    pub phi: [f64; 9],
    pub grad: [[f64; 2]; 9],
    /// Laplacian of each shape function.
    pub lap: [f64; 9],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMesh {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

/// Quadrature point inside an element, with physical position and weight.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub xi: [f64; 2],
    pub x: [f64; 2],
    pub w: f64,
}

impl ChannelMesh {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(config(format!(
                "domain extents must be positive, got {lx} x {ly}"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(config(format!(
                "element counts must be positive, got {nx} x {ny}"
            )));
        }
        Ok(Self {
            lx,
            ly,
            nx,
            ny,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
        })
    }

    pub fn from_geometry(g: &Geometry) -> Result<Self> {
        Self::new(g.lx, g.ly, g.nx, g.ny)
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Nodes per row after periodic identification.
    pub fn nodes_x(&self) -> usize {
        2 * self.nx
    }

    pub fn nodes_y(&self) -> usize {
        2 * self.ny + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes_x() * self.nodes_y()
    }

    /// (columns, rows) of the node grid before identifying x = 0 with x = Lx.
    pub fn raw_node_grid(&self) -> (usize, usize) {
        (2 * self.nx + 1, 2 * self.ny + 1)
    }

    pub fn num_elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node(&self, ix: usize, iy: usize) -> usize {
        iy * self.nodes_x() + ix % self.nodes_x()
    }

    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        (node % self.nodes_x(), node / self.nodes_x())
    }

    pub fn node_coords(&self, node: usize) -> [f64; 2] {
        let (ix, iy) = self.node_ij(node);
        [ix as f64 * 0.5 * self.hx, iy as f64 * 0.5 * self.hy]
    }

    pub fn is_wall_node(&self, node: usize) -> bool {
        let (_, iy) = self.node_ij(node);
        iy == 0 || iy == self.nodes_y() - 1
    }

    pub fn element(&self, e: usize) -> (usize, usize) {
        (e % self.nx, e / self.nx)
    }

    /// Global node of local node `l = b * 3 + a` of element `e`.
    pub fn element_nodes(&self, e: usize) -> [usize; 9] {
        let (ex, ey) = self.element(e);
        let mut out = [0; 9];
        for b in 0..3 {
            for a in 0..3 {
                out[b * 3 + a] = self.node(2 * ex + a, 2 * ey + b);
            }
        }
        out
    }

    pub fn element_origin(&self, e: usize) -> [f64; 2] {
        let (ex, ey) = self.element(e);
        [ex as f64 * self.hx, ey as f64 * self.hy]
    }

    /// Element containing a physical point and the reference coordinates there.
    /// x is wrapped periodically; y is clamped to the channel.
    pub fn locate(&self, x: [f64; 2]) -> (usize, [f64; 2]) {
        let xx = x[0].rem_euclid(self.lx);
        let yy = x[1].clamp(0.0, self.ly);
        let ex = ((xx / self.hx).floor() as usize).min(self.nx - 1);
        let ey = ((yy / self.hy).floor() as usize).min(self.ny - 1);
        let xi = [
            (xx - ex as f64 * self.hx) / self.hx,
            (yy - ey as f64 * self.hy) / self.hy,
        ];
        (ey * self.nx + ex, xi)
    }

    pub fn shape(&self, xi: [f64; 2]) -> ShapeAt {
        let (lx, dx, ddx) = lagrange2(xi[0]);
        let (ly, dy, ddy) = lagrange2(xi[1]);
        let mut s = ShapeAt {
            phi: [0.0; 9],
            grad: [[0.0; 2]; 9],
            lap: [0.0; 9],
        };
        for b in 0..3 {
            for a in 0..3 {
                let l = b * 3 + a;
                s.phi[l] = lx[a] * ly[b];
                s.grad[l] = [dx[a] * ly[b] / self.hx, lx[a] * dy[b] / self.hy];
                s.lap[l] =
                    ddx[a] * ly[b] / (self.hx * self.hx) + lx[a] * ddy[b] / (self.hy * self.hy);
            }
        }
        s
    }

    pub fn element_quadrature(&self, e: usize, rule: &GaussRule) -> Vec<QuadPoint> {
        let o = self.element_origin(e);
        let jac = self.hx * self.hy;
        let mut out = Vec::with_capacity(rule.len() * rule.len());
        for (j, &t) in rule.points.iter().enumerate() {
            for (i, &s) in rule.points.iter().enumerate() {
                out.push(QuadPoint {
                    xi: [s, t],
                    x: [o[0] + s * self.hx, o[1] + t * self.hy],
                    w: rule.weights[i] * rule.weights[j] * jac,
                });
            }
        }
        out
    }

    /// Wall quadrature for element `e` if it touches a wall: (top_wall, points).
    pub fn wall_quadrature(&self, e: usize, rule: &GaussRule) -> Vec<(bool, QuadPoint)> {
        let (_, ey) = self.element(e);
        let o = self.element_origin(e);
        let mut out = Vec::new();
        for (top, eta) in [(false, 0.0), (true, 1.0)] {
            let on = if top { ey == self.ny - 1 } else { ey == 0 };
            if !on {
                continue;
            }
            for (i, &s) in rule.points.iter().enumerate() {
                out.push((
                    top,
                    QuadPoint {
                        xi: [s, eta],
                        x: [o[0] + s * self.hx, o[1] + eta * self.hy],
                        w: rule.weights[i] * self.hx,
                    },
                ));
            }
        }
        out
    }

    /// Gauss approximation of the integral of `f(x)` over the channel.
    pub fn integrate(&self, rule: &GaussRule, f: impl Fn([f64; 2]) -> f64) -> f64 {
        let mut acc = 0.0;
        for e in 0..self.num_elements() {
            for q in self.element_quadrature(e, rule) {
                acc += q.w * f(q.x);
            }
        }
        acc
    }

    /// Gauss approximation of the integral of `f(x, top_wall)` over both walls.
    pub fn integrate_walls(&self, rule: &GaussRule, f: impl Fn([f64; 2], bool) -> f64) -> f64 {
        let mut acc = 0.0;
        for e in 0..self.num_elements() {
            for (top, q) in self.wall_quadrature(e, rule) {
                acc += q.w * f(q.x, top);
            }
        }
        acc
    }

    pub fn refined(&self) -> Self {
        Self::new(self.lx, self.ly, 2 * self.nx, 2 * self.ny).expect("refining a valid mesh")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn node_counts() {
        let m = ChannelMesh::new(1.0, 1.0, 2, 2).unwrap();
        assert_eq!(m.raw_node_grid(), (5, 5));
        assert_eq!((m.nodes_x(), m.nodes_y()), (4, 5));
        assert_eq!(m.num_nodes(), 20);
        let m = ChannelMesh::new(2.0, 1.0, 2, 3).unwrap();
        assert_eq!(m.hx, 1.0);
        assert!(ChannelMesh::new(1.0, 1.0, 2, 0).is_err());
        assert!(ChannelMesh::new(-1.0, 1.0, 2, 2).is_err());
    }

    #[test]
    fn periodic_element_nodes_wrap() {
        let m = ChannelMesh::new(1.0, 1.0, 2, 2).unwrap();
        let last = m.element_nodes(1);
        assert_eq!(last[2], m.node(0, 0));
        assert_eq!(m.node(4, 2), m.node(0, 2));
    }

    #[test]
    fn gauss_rule_exactness() {
        for npts in 1..8 {
            let r = GaussRule::new(npts);
            let wsum: f64 = r.weights.iter().sum();
            assert_relative_eq!(wsum, 1.0, epsilon = 1e-14);
            for p in 0..(2 * npts) {
                let got: f64 = r
                    .points
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(p as i32))
                    .sum();
                assert_relative_eq!(got, 1.0 / (p as f64 + 1.0), epsilon = 1e-14);
            }
        }
        assert_eq!(GaussRule::for_degree(5).len(), 3);
    }

    #[test]
    fn integrate_examples() {
        let m = ChannelMesh::new(1.0, 1.0, 3, 2).unwrap();
        let r = GaussRule::for_degree(5);
        assert_relative_eq!(m.integrate(&r, |_| 1.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(m.integrate(&r, |x| x[0] * x[1]), 0.25, epsilon = 1e-14);
        assert_relative_eq!(m.integrate_walls(&r, |_, _| 1.0), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn shape_partition_of_unity() {
        let m = ChannelMesh::new(2.0, 1.0, 4, 3).unwrap();
        let s = m.shape([0.3, 0.8]);
        assert_relative_eq!(s.phi.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        for c in 0..2 {
            assert!(s.grad.iter().map(|g| g[c]).sum::<f64>().abs() < 1e-12);
        }
        assert!(s.lap.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn locate_round_trip() {
        let m = ChannelMesh::new(2.0, 1.0, 4, 3).unwrap();
        let (e, xi) = m.locate([1.3, 0.55]);
        let o = m.element_origin(e);
        assert_relative_eq!(o[0] + xi[0] * m.hx, 1.3, epsilon = 1e-14);
        assert_relative_eq!(o[1] + xi[1] * m.hy, 0.55, epsilon = 1e-14);
        let (e2, xi2) = m.locate([1.3 + 2.0, 0.55]);
        assert_eq!(e, e2);
        assert_relative_eq!(xi[0], xi2[0], epsilon = 1e-12);
    }
}
