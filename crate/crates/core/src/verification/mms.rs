//! Manufactured-solution convergence studies. Smooth trigonometric fields are made
//! exact by a compensating source and the discrete system is solved on nested
//! meshes; L2 and H1-seminorm errors give observed orders.

use std::sync::Arc;

use serde::Serialize;

use crate::approx::Problem;
use crate::error::{config, Result};
use crate::fields::{
    AnalyticFields, DiscreteSolution, FieldSource, SmoothField, XMode, YMode, RHO, THETA, U1, U2,
    Y0,
};
use crate::mesh::{ChannelMesh, GaussRule};
use crate::solver::{newton_solve, NewtonOptions};

/// Trigonometric fields on [0, Lx] x [0, Ly]; `amp` scales every perturbation
/// (amp = 0 gives a uniform state). u2 vanishes on both walls.
pub fn manufactured_fields(lx: f64, ly: f64, n: usize, amp: f64) -> AnalyticFields {
    let z = || SmoothField::zero(lx, ly);
    let mut fields = vec![
        z().with(1.0, XMode::Cos(0), YMode::Pow(0))
            .with(0.2 * amp, XMode::Cos(1), YMode::Sin(1)),
        z().with(0.3, XMode::Cos(0), YMode::Pow(0))
            .with(0.2 * amp, XMode::Sin(1), YMode::Cos(1)),
        z().with(0.1 * amp, XMode::Sin(1), YMode::Sin(1)),
        z().with(1.5, XMode::Cos(0), YMode::Pow(0))
            .with(0.3 * amp, XMode::Cos(1), YMode::Cos(1)),
    ];
    for k in 0..n {
        let c = match k {
            0 if n > 1 => 0.1,
            1 => -0.1,
            _ => 0.0,
        };
        fields.push(z().with(1.0 / n as f64, XMode::Cos(0), YMode::Pow(0)).with(
            c * amp,
            XMode::Sin(1),
            YMode::Cos(1),
        ));
    }
    AnalyticFields { fields }
}

/// Errors of one field group: L2 norm and H1 seminorm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GroupError {
    pub l2: f64,
    pub h1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LevelErrors {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub newton_iterations: usize,
    pub rho: GroupError,
    pub u: GroupError,
    pub theta: GroupError,
    pub y: GroupError,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Orders {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MmsTable {
    pub levels: Vec<LevelErrors>,
    /// observed L2 orders between consecutive levels
    pub l2_orders: Vec<Orders>,
    pub h1_orders: Vec<Orders>,
}

impl MmsTable {
    pub fn finest_l2(&self) -> Option<Orders> {
        self.l2_orders.last().copied()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "nx,ny,h,newton_iterations,rho_l2,rho_h1,u_l2,u_h1,theta_l2,theta_h1,y_l2,y_h1\n",
        );
        for l in &self.levels {
            s.push_str(&format!(
                "{},{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                l.nx, l.ny, l.h, l.newton_iterations, l.rho.l2, l.rho.h1, l.u.l2, l.u.h1, l.theta.l2, l.theta.h1, l.y.l2, l.y.h1
            ));
        }
        s
    }
}

/// L2 and H1-seminorm errors of `sol` against `exact`, per field group.
pub fn field_errors(sol: &DiscreteSolution, exact: &dyn FieldSource) -> [GroupError; 4] {
    let mesh = &sol.mesh;
    let rule = GaussRule::new(6);
    let n = sol.n;
    let groups: [Vec<usize>; 4] = [vec![RHO], vec![U1, U2], vec![THETA], (Y0..Y0 + n).collect()];
    let mut acc = [[0.0f64; 2]; 4];
    for e in 0..mesh.num_elements() {
        for qp in mesh.element_quadrature(e, &rule) {
            let ps = sol.eval_with(e, &mesh.shape(qp.xi));
            let ex = exact.sample(qp.x);
            for (gi, fs) in groups.iter().enumerate() {
                for &f in fs {
                    let dv = ps.v[f] - ex.v[f];
                    let dg = [ps.g[f][0] - ex.g[f][0], ps.g[f][1] - ex.g[f][1]];
                    acc[gi][0] += qp.w * dv * dv;
                    acc[gi][1] += qp.w * (dg[0] * dg[0] + dg[1] * dg[1]);
                }
            }
        }
    }
    acc.map(|a| GroupError {
        l2: a[0].sqrt(),
        h1: a[1].sqrt(),
    })
}

fn order(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

/// Solve the manufactured problem on square-element meshes with `levels`
/// elements per direction, starting Newton from the interpolant of the exact fields.
pub fn mms_convergence(
    base: &Problem,
    lx: f64,
    ly: f64,
    levels: &[(usize, usize)],
    amp: f64,
    opts: &NewtonOptions,
) -> Result<MmsTable> {
    if levels.len() < 3 {
        return Err(config(
            "a convergence study needs at least three mesh levels",
        ));
    }
    if levels
        .windows(2)
        .any(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1)
    {
        return Err(config("mesh levels must be strictly refining"));
    }
    let exact = Arc::new(manufactured_fields(lx, ly, base.n(), amp));
    let mut problem = base.clone();
    problem.source = Some(exact.clone());
    let mut table = MmsTable::default();
    for &(nx, ny) in levels {
        let mesh = ChannelMesh::new(lx, ly, nx, ny)?;
        let mut sol = DiscreteSolution::interpolate(&mesh, exact.as_ref());
        let rep = newton_solve(&problem, &mut sol, opts)?;
        let [rho, u, theta, y] = field_errors(&sol, exact.as_ref());
        table.levels.push(LevelErrors {
            nx,
            ny,
            h: (mesh.hx * mesh.hx + mesh.hy * mesh.hy).sqrt(),
            newton_iterations: rep.iterations,
            rho,
            u,
            theta,
            y,
        });
    }
    for w in table.levels.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let o = |f: fn(&LevelErrors) -> f64| order(f(a), f(b), a.h, b.h);
        table.l2_orders.push(Orders {
            rho: o(|l| l.rho.l2),
            u: o(|l| l.u.l2),
            theta: o(|l| l.theta.l2),
            y: o(|l| l.y.l2),
        });
        table.h1_orders.push(Orders {
            rho: o(|l| l.rho.h1),
            u: o(|l| l.u.h1),
            theta: o(|l| l.theta.h1),
            y: o(|l| l.y.h1),
        });
    }
    Ok(table)
}
