//! Entropy balance of the regularized system.
//!
//! Dividing the internal-energy equation by theta and combining it with the
//! continuity equation (weight chi) and the species equations (weights
//! G_k = g_k^lambda / theta) gives an entropy balance whose production terms are
//! nonnegative. For a test function psi the balance reads sum(lhs) = sum(rhs); the
//! density Laplacian is kept in weak form, -eps int psi chi lap rho = eps int grad rho . grad(chi psi).
//!
//! `entropy_balance` evaluates the named terms from closed-form gradients.
//! `entropy_balance_from_residuals` evaluates the same quantity as
//! -R_E(psi/theta) + R_C(chi psi) + sum_k R_k(G_k psi) from the residual
//! integrands, with test-function gradients from forward-mode differentiation.
//! `entropy_balance_algebraic` applies the assembled residual vector to the nodal
//! interpolants of the same test functions; it vanishes with the Newton residual,
//! and the difference to the full balance is the consistency error.

use num_dual::Dual64;
use serde::Serialize;

use crate::approx::{assemble, wall_heat, Problem, TestFunction};
use crate::error::{domain, Result};
use crate::fields::{
    num_fields, DiscreteSolution, FieldSource, PointState, RHO, THETA, U1, U2, Y0,
};
use crate::mesh::{ChannelMesh, GaussRule};
use crate::mixture::cold_energy_t;
use crate::scalar::Real;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EntropyBalance {
    pub lhs: Vec<(String, f64)>,
    pub rhs: Vec<(String, f64)>,
}

impl EntropyBalance {
    /// sum(lhs) - sum(rhs)
    pub fn residual(&self) -> f64 {
        self.lhs.iter().map(|t| t.1).sum::<f64>() - self.rhs.iter().map(|t| t.1).sum::<f64>()
    }

    /// Sum of absolute term magnitudes.
    pub fn scale(&self) -> f64 {
        self.lhs.iter().chain(&self.rhs).map(|t| t.1.abs()).sum()
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.lhs
            .iter()
            .chain(&self.rhs)
            .find(|t| t.0 == name)
            .map(|t| t.1)
    }
}

const LHS: [&str; 8] = [
    "viscous_dissipation",
    "heat_conduction",
    "reaction",
    "delta_source",
    "artificial_pressure_dissipation",
    "cross_diffusion",
    "species_regularization",
    "wall_inflow",
];
const RHS: [&str; 8] = [
    "heat_flux",
    "convection",
    "species_entropy_flux",
    "density_coupling",
    "density_regularization_energy",
    "density_regularization_species",
    "log_penalty",
    "wall_outflow",
];

fn check(ps: &PointState, n: usize) -> Result<()> {
    if !(ps.v[RHO] > 0.0 && ps.v[THETA] > 0.0) || (0..n).any(|k| !(ps.v[Y0 + k] > 0.0)) {
        return Err(domain(
            "entropy balance needs rho, theta, Y > 0 at quadrature points",
        ));
    }
    Ok(())
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Named terms of the entropy balance.
pub fn entropy_balance(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    psi: &dyn TestFunction,
    rule: &GaussRule,
) -> Result<EntropyBalance> {
    let p = &problem.params;
    let sch = &problem.schedule;
    let n = p.n();
    let rho_bar = problem.rho_bar(mesh);
    let rho_bar_k = rho_bar / n as f64;
    let sql = sch.lambda.sqrt();
    let mut l = [0.0f64; 8];
    let mut r = [0.0f64; 8];
    for e in 0..mesh.num_elements() {
        for qp in mesh.element_quadrature(e, rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            check(&ps, n)?;
            let (v, g) = (&ps.v, &ps.g);
            let q = problem.regularized::<f64>(v, g);
            let (w, gw) = psi.eval(qp.x);
            let (rho, th) = (v[RHO], v[THETA]);
            let u = [v[U1], v[U2]];
            let (gr, gt) = (g[RHO], g[THETA]);
            let wt = qp.w;

            let mut sdu = 0.0;
            for i in 0..2 {
                sdu += dot(q.stress[i], g[U1 + i]);
            }
            let div_u = g[U1][0] + g[U2][1];

            // G_k and chi with their gradients
            let lr = (rho + sql).ln();
            let gk: Vec<f64> = (0..n)
                .map(|k| p.cp(k) - p.cv[k] * th.ln() + v[Y0 + k].ln() + lr)
                .collect();
            let ggk: Vec<[f64; 2]> = (0..n)
                .map(|k| {
                    let f = |j: usize| {
                        -p.cv[k] * gt[j] / th + g[Y0 + k][j] / v[Y0 + k] + gr[j] / (rho + sql)
                    };
                    [f(0), f(1)]
                })
                .collect();
            let num = rho.powf(p.gamma - 1.0) + q.e + th;
            let cpy: f64 = (0..n).map(|k| p.cp(k) * v[Y0 + k]).sum();
            let chi = num / th - cpy;
            let gchi: [f64; 2] = {
                let f = |j: usize| {
                    let mut ge = rho.powf(p.gamma - 2.0) * gr[j];
                    for k in 0..n {
                        ge += p.cv[k] * (v[Y0 + k] * gt[j] + th * g[Y0 + k][j]);
                    }
                    let gn = (p.gamma - 1.0) * rho.powf(p.gamma - 2.0) * gr[j] + ge + gt[j];
                    gn / th
                        - num * gt[j] / (th * th)
                        - (0..n).map(|k| p.cp(k) * g[Y0 + k][j]).sum::<f64>()
                };
                [f(0), f(1)]
            };
            let grad_chi_psi = [gchi[0] * w + chi * gw[0], gchi[1] * w + chi * gw[1]];
            let grad_psi_th = [
                gw[0] / th - w * gt[0] / (th * th),
                gw[1] / th - w * gt[1] / (th * th),
            ];

            l[0] += wt * w * sdu / th;
            l[1] += wt * q.kappa_t * dot(gt, gt) * w / (th * th);
            l[3] += wt * sch.delta * w / (th * th);
            l[4] += wt * q.p_delta * w / th;
            r[0] += wt * q.kappa_t * dot(gt, gw) / th;
            let mut conv = rho * q.e * dot(u, grad_psi_th)
                - q.pi * div_u * w / th
                - rho * dot(u, grad_chi_psi);
            r[4] -= wt * (sch.eps * (rho - rho_bar) * chi * w + sch.eps * dot(gr, grad_chi_psi));
            for k in 0..n {
                let yk = v[Y0 + k];
                let gy = g[Y0 + k];
                let ck = sch.eps * (rho + 1.0) * yk + sch.lambda;
                let grad_gpsi = [ggk[k][0] * w + gk[k] * gw[0], ggk[k][1] * w + gk[k] * gw[1]];
                l[2] -= wt * q.omega[k] * gk[k] * w;
                l[5] -= wt * w * dot(q.fhat[k], gy) / yk;
                l[6] += wt * w * ck * dot(gy, gy) / (yk * yk);
                conv -= yk * rho * dot(u, grad_gpsi);
                r[2] += wt * (gk[k] - p.cv[k]) * dot(q.j[k], gw);
                r[3] += wt * dot(q.j[k], gr) / (rho + sql) * w;
                r[5] -= wt
                    * (sch.eps * (yk * rho - rho_bar_k) * gk[k] * w
                        + sch.eps * yk * dot(gr, grad_gpsi));
                r[6] -= wt * sql * yk.ln() * gk[k] * w;
            }
            r[1] -= wt * conv;
        }
        for (top, qp) in mesh.wall_quadrature(e, rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            let th = ps.v[THETA];
            if !(th > 0.0) {
                return Err(domain("entropy balance needs theta > 0 on the walls"));
            }
            let (w, _) = psi.eval(qp.x);
            let t0 = problem.theta0_at(mesh, qp.x[0], top);
            let coef = p.l_heat + sch.delta * th.powf(sch.b_exp - 1.0);
            l[7] += qp.w * w * coef * t0 / th;
            r[7] += qp.w
                * w
                * (coef * th + sch.eps * th.ln() + sch.lambda * th.powf(sch.b_exp / 2.0) * th.ln())
                / th;
        }
    }
    Ok(EntropyBalance {
        lhs: LHS.iter().zip(l).map(|(a, b)| (a.to_string(), b)).collect(),
        rhs: RHS.iter().zip(r).map(|(a, b)| (a.to_string(), b)).collect(),
    })
}

/// chi and G_k as generic functions of the state, for differentiation.
fn weights<T: Real>(problem: &Problem, v: &[T]) -> (T, Vec<T>) {
    let p = &problem.params;
    let n = p.n();
    let sql = problem.schedule.lambda.sqrt();
    let (rho, th) = (v[RHO], v[THETA]);
    let y = &v[Y0..Y0 + n];
    let mut e = cold_energy_t(rho, p.gamma);
    let mut cpy = T::zero();
    for k in 0..n {
        e += th * y[k] * p.cv[k];
        cpy += y[k] * p.cp(k);
    }
    let chi = (rho.powf(p.gamma - 1.0) + e + th) / th - cpy;
    let lr = (rho + sql).ln();
    let gk = (0..n)
        .map(|k| -(th.ln() * p.cv[k]) + y[k].ln() + lr + p.cp(k))
        .collect();
    (chi, gk)
}

/// -R_E(psi/theta) + R_C(chi psi) + sum_k R_k(G_k psi), using the residual integrands.
pub fn entropy_balance_from_residuals(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    psi: &dyn TestFunction,
    rule: &GaussRule,
) -> Result<f64> {
    let n = problem.n();
    let nf = num_fields(n);
    let rho_bar = problem.rho_bar(mesh);
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        for qp in mesh.element_quadrature(e, rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            check(&ps, n)?;
            let (s, f) = problem.interior::<f64>(&ps.v, &ps.g, rho_bar);
            let (w, gw) = psi.eval(qp.x);
            // test functions and their x-gradients: seed the state with d/dx_j
            let mut tv = vec![0.0; nf];
            let mut tg = vec![[0.0; 2]; nf];
            for j in 0..2 {
                let vd: Vec<Dual64> = (0..nf).map(|i| Dual64::new(ps.v[i], ps.g[i][j])).collect();
                let (chi, gk) = weights(problem, &vd);
                let th = vd[THETA];
                let wd = Dual64::new(w, gw[j]);
                let t_e = -(wd / th);
                let t_c = chi * wd;
                tv[THETA] = t_e.re;
                tg[THETA][j] = t_e.eps;
                tv[RHO] = t_c.re;
                tg[RHO][j] = t_c.eps;
                for k in 0..n {
                    let t = gk[k] * wd;
                    tv[Y0 + k] = t.re;
                    tg[Y0 + k][j] = t.eps;
                }
            }
            for i in [RHO, THETA].into_iter().chain(Y0..Y0 + n) {
                total += qp.w * (s[i] * tv[i] + f[i][0] * tg[i][0] + f[i][1] * tg[i][1]);
            }
        }
        for (top, qp) in mesh.wall_quadrature(e, rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            let (w, _) = psi.eval(qp.x);
            let t0 = problem.theta0_at(mesh, qp.x[0], top);
            let th = ps.v[THETA];
            total -= qp.w * wall_heat(th, t0, problem.params.l_heat, &problem.schedule) * w / th;
        }
    }
    Ok(total)
}

/// Algebraic part of the entropy balance: the discrete residual applied to the
/// interpolants of -psi/theta, chi psi and G_k psi.
pub fn entropy_balance_algebraic(
    problem: &Problem,
    sol: &DiscreteSolution,
    psi: &dyn TestFunction,
) -> Result<f64> {
    let a = assemble(problem, sol, false)?;
    let n = sol.n;
    let nf = sol.nf();
    let mut total = 0.0;
    for node in 0..sol.mesh.num_nodes() {
        let v = &sol.data[node * nf..(node + 1) * nf];
        if !(v[RHO] > 0.0 && v[THETA] > 0.0) || (0..n).any(|k| !(v[Y0 + k] > 0.0)) {
            return Err(domain(
                "entropy balance needs rho, theta, Y > 0 at the nodes",
            ));
        }
        let (w, _) = psi.eval(sol.mesh.node_coords(node));
        let (chi, gk) = weights::<f64>(problem, v);
        let r = &a.residual[node * nf..(node + 1) * nf];
        total += w * (-r[THETA] / v[THETA] + r[RHO] * chi);
        for k in 0..n {
            total += w * r[Y0 + k] * gk[k];
        }
    }
    Ok(total)
}
