//! Weighted density functionals: the singular-weight potential
//!   sup_x0 int (pi + (1 - alpha) rho |u|^2 [+ delta (rho^beta + rho^2)]) / |x - x0|^alpha
//! and the kinetic functional B = int (rho^a |u|^2 + rho^b |u|^(2b+2)).
//!
//! Distances are periodic in x (minimum image). Elements whose closure contains
//! x0 are split into triangles with a vertex at x0 and integrated with a Duffy
//! map; the radial substitution s = sigma^4 turns the factor s^(1-alpha) into a
//! smooth enough power of sigma. Elements close to x0 are subdivided adaptively.

use rayon::prelude::*;
use serde::Serialize;

use crate::approx::Problem;
use crate::error::{config, domain, Result};
use crate::fields::{FieldSource, RHO, THETA, U1, U2, Y0};
use crate::mesh::{ChannelMesh, GaussRule};
use crate::mixture::{pressure, StateSample};

/// Largest admissible alpha for temperature exponent m: min(1, (3m - 2)/(2m)).
pub fn alpha_bound(m_exp: f64) -> f64 {
    ((3.0 * m_exp - 2.0) / (2.0 * m_exp)).min(1.0)
}

/// Evaluation points for the supremum: all wall nodes, interior nodes within
/// 0.2 Ly of a wall, and a coarse interior lattice.
pub fn x0_grid(mesh: &ChannelMesh) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for node in 0..mesh.num_nodes() {
        let x = mesh.node_coords(node);
        let dw = x[1].min(mesh.ly - x[1]);
        if dw <= 0.2 * mesh.ly + 1e-12 {
            out.push(x);
        }
    }
    let (cx, cy) = (8, 4);
    for j in 0..cy {
        for i in 0..cx {
            out.push([
                (i as f64 + 0.5) * mesh.lx / cx as f64,
                (j as f64 + 0.5) * mesh.ly / cy as f64,
            ]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightOptions {
    /// add delta (rho^beta + rho^2) to the integrand
    pub include_delta: bool,
    /// Gauss points per direction on regular cells
    pub points: usize,
    /// Gauss points per direction in the Duffy triangles
    pub singular_points: usize,
    /// recursion limit for cells near x0
    pub max_depth: usize,
}

impl Default for WeightOptions {
    fn default() -> Self {
        Self {
            include_delta: false,
            points: 6,
            singular_points: 20,
            max_depth: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightDiagnostic {
    pub alpha: f64,
    pub value: f64,
    pub argmax: [f64; 2],
}

/// Weighted integral of `h` for one x0; `h(e, xi)` samples the integrand.
pub fn weighted_integral(
    mesh: &ChannelMesh,
    h: &(dyn Fn(usize, [f64; 2]) -> f64 + Sync),
    x0: [f64; 2],
    alpha: f64,
    opts: &WeightOptions,
) -> f64 {
    let regular = GaussRule::new(opts.points);
    let singular = GaussRule::new(opts.singular_points);
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let o = mesh.element_origin(e);
        let c = [o[0] + 0.5 * mesh.hx, o[1] + 0.5 * mesh.hy];
        // image of x0 nearest to this element
        let mut z = x0;
        z[0] += ((c[0] - z[0]) / mesh.lx).round() * mesh.lx;
        let rect = [o, [o[0] + mesh.hx, o[1] + mesh.hy]];
        let to_xi = |x: [f64; 2]| {
            [
                ((x[0] - o[0]) / mesh.hx).clamp(0.0, 1.0),
                ((x[1] - o[1]) / mesh.hy).clamp(0.0, 1.0),
            ]
        };
        let f = |x: [f64; 2]| h(e, to_xi(x));
        let tol = 1e-12 * (mesh.hx + mesh.hy);
        let inside = z[0] >= rect[0][0] - tol
            && z[0] <= rect[1][0] + tol
            && z[1] >= rect[0][1] - tol
            && z[1] <= rect[1][1] + tol;
        if inside {
            total += duffy_rect(&f, rect, z, alpha, &singular);
            continue;
        }
        // the nearest image changes across x = z + Lx/2; split there so each
        // piece sees a smooth distance
        let seam = if z[0] <= c[0] {
            z[0] + 0.5 * mesh.lx
        } else {
            z[0] - 0.5 * mesh.lx
        };
        let pieces = if seam > rect[0][0] + tol && seam < rect[1][0] - tol {
            vec![[rect[0], [seam, rect[1][1]]], [[seam, rect[0][1]], rect[1]]]
        } else {
            vec![rect]
        };
        for r in pieces {
            let mid = 0.5 * (r[0][0] + r[1][0]);
            let mut zi = x0;
            zi[0] += ((mid - zi[0]) / mesh.lx).round() * mesh.lx;
            total += cell(&f, r, zi, alpha, &regular, 0, opts.max_depth);
        }
    }
    total
}

fn dist_to_rect(r: [[f64; 2]; 2], z: [f64; 2]) -> f64 {
    let dx = (r[0][0] - z[0]).max(0.0).max(z[0] - r[1][0]);
    let dy = (r[0][1] - z[1]).max(0.0).max(z[1] - r[1][1]);
    (dx * dx + dy * dy).sqrt()
}

fn cell(
    f: &dyn Fn([f64; 2]) -> f64,
    r: [[f64; 2]; 2],
    z: [f64; 2],
    alpha: f64,
    rule: &GaussRule,
    depth: usize,
    max_depth: usize,
) -> f64 {
    let (wx, wy) = (r[1][0] - r[0][0], r[1][1] - r[0][1]);
    let diam = (wx * wx + wy * wy).sqrt();
    if dist_to_rect(r, z) < 2.0 * diam && depth < max_depth {
        let m = [0.5 * (r[0][0] + r[1][0]), 0.5 * (r[0][1] + r[1][1])];
        let quads = [
            [r[0], m],
            [[m[0], r[0][1]], [r[1][0], m[1]]],
            [[r[0][0], m[1]], [m[0], r[1][1]]],
            [m, r[1]],
        ];
        return quads
            .iter()
            .map(|q| cell(f, *q, z, alpha, rule, depth + 1, max_depth))
            .sum();
    }
    let mut acc = 0.0;
    for (j, &t) in rule.points.iter().enumerate() {
        for (i, &s) in rule.points.iter().enumerate() {
            let x = [r[0][0] + s * wx, r[0][1] + t * wy];
            let d = ((x[0] - z[0]).powi(2) + (x[1] - z[1]).powi(2)).sqrt();
            acc += rule.weights[i] * rule.weights[j] * wx * wy * f(x) * d.powf(-alpha);
        }
    }
    acc
}

fn duffy_rect(
    f: &dyn Fn([f64; 2]) -> f64,
    r: [[f64; 2]; 2],
    z: [f64; 2],
    alpha: f64,
    rule: &GaussRule,
) -> f64 {
    let corners = [r[0], [r[1][0], r[0][1]], r[1], [r[0][0], r[1][1]]];
    let k = 4.0;
    let area = (r[1][0] - r[0][0]) * (r[1][1] - r[0][1]);
    let mut acc = 0.0;
    for i in 0..4 {
        let a = [corners[i][0] - z[0], corners[i][1] - z[1]];
        let b = [
            corners[(i + 1) % 4][0] - z[0],
            corners[(i + 1) % 4][1] - z[1],
        ];
        let det = (a[0] * b[1] - a[1] * b[0]).abs();
        if det <= 1e-14 * area {
            continue;
        }
        for (jt, &t) in rule.points.iter().enumerate() {
            let d = [(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]];
            let dn = (d[0] * d[0] + d[1] * d[1]).sqrt();
            for (js, &sig) in rule.points.iter().enumerate() {
                // s^(1-alpha) ds = k sigma^(k(2-alpha)-1) dsigma
                let s = sig.powf(k);
                let x = [z[0] + s * d[0], z[1] + s * d[1]];
                let jac = k * sig.powf(k * (2.0 - alpha) - 1.0);
                acc += rule.weights[jt] * rule.weights[js] * det * jac * f(x) * dn.powf(-alpha);
            }
        }
    }
    acc
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Supremum over `grid` of the weighted density integral.
pub fn density_weight_diagnostic(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    alpha: f64,
    grid: &[[f64; 2]],
    opts: &WeightOptions,
) -> Result<WeightDiagnostic> {
    check_alpha(alpha)?;
    let p = &problem.params;
    let sch = &problem.schedule;
    let n = p.n();
    let h = |e: usize, xi: [f64; 2]| -> f64 {
        let o = mesh.element_origin(e);
        let x = [o[0] + xi[0] * mesh.hx, o[1] + xi[1] * mesh.hy];
        let ps = src.sample_at(e, xi, x);
        let rho = ps.v[RHO];
        let s = StateSample {
            rho,
            u: vec![ps.v[U1], ps.v[U2]],
            theta: ps.v[THETA],
            y: ps.v[Y0..Y0 + n].to_vec(),
        };
        let u2 = ps.v[U1].powi(2) + ps.v[U2].powi(2);
        let mut v = pressure(&s, p) + (1.0 - alpha) * rho * u2;
        if opts.include_delta {
            v += sch.delta * (rho.max(0.0).powf(sch.beta) + rho * rho);
        }
        v
    };
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&x0| weighted_integral(mesh, &h, x0, alpha, opts))
        .collect();
    let mut best = WeightDiagnostic {
        alpha,
        value: f64::NEG_INFINITY,
        argmax: [0.0; 2],
    };
    for (v, x0) in vals.iter().zip(grid) {
        if !v.is_finite() {
            return Err(domain("weighted density integral is not finite"));
        }
        if *v > best.value {
            best.value = *v;
            best.argmax = *x0;
        }
    }
    Ok(best)
}

/// B = int (rho^a |u|^2 + rho^b |u|^(2b+2)) for 1 <= a <= gamma, 0 < b < 1.
pub fn b_functional(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    a: f64,
    b: f64,
) -> Result<f64> {
    let gamma = problem.params.gamma;
    if !(1.0..=gamma).contains(&a) {
        return Err(config(format!(
            "exponent a must lie in [1, gamma = {gamma}], got {a}"
        )));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(config(format!("exponent b must lie in (0, 1), got {b}")));
    }
    let rule = GaussRule::new(6);
    let mut acc = 0.0;
    for e in 0..mesh.num_elements() {
        for qp in mesh.element_quadrature(e, &rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            let rho = ps.v[RHO];
            if !(rho >= 0.0) {
                return Err(domain("B functional needs rho >= 0"));
            }
            let u2 = ps.v[U1].powi(2) + ps.v[U2].powi(2);
            acc += qp.w * (rho.powf(a) * u2 + rho.powf(b) * u2.powf(b + 1.0));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_bound_values() {
        assert_eq!(alpha_bound(2.0), 1.0);
        assert!((alpha_bound(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn smooth_weight_matches_plain_quadrature() {
        // alpha -> 0 limit: integral of a smooth function
        let mesh = ChannelMesh::new(1.0, 1.0, 3, 3).unwrap();
        let f = |_e: usize, xi: [f64; 2]| 1.0 + xi[0] * xi[1];
        let opts = WeightOptions::default();
        let v = weighted_integral(&mesh, &f, [0.5, 0.0], 1e-9, &opts);
        // per element int (1 + xi eta) = (1 + 1/4) h^2, nine elements
        assert!((v - 1.25).abs() < 1e-8, "{v}");
    }
}
