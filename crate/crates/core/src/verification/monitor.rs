//! A priori estimate monitors: the norm combinations that stay bounded along the
//! regularization limits, evaluated by quadrature on a discrete solution.

use serde::Serialize;

use crate::approx::Problem;
use crate::error::{domain, Result};
use crate::fields::{DiscreteSolution, RHO, THETA, U1, U2, Y0};
use crate::mesh::{lagrange2, GaussRule};

/// Integrability exponent used for the density-dependent entries (s > 1).
pub const DEFAULT_S: f64 = 1.2;

/// Named monitor values in a fixed order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Monitor {
    pub entries: Vec<(String, f64)>,
}

impl Monitor {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == name).map(|e| e.1)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.0.as_str())
    }

    fn push(&mut self, name: &str, v: f64) {
        self.entries.push((name.to_string(), v));
    }
}

/// Second derivatives [rho_xx, rho_xy, rho_yy] of the discrete density.
pub fn density_hessian(sol: &DiscreteSolution, e: usize, xi: [f64; 2]) -> [f64; 3] {
    let m = &sol.mesh;
    let (lx, dx, ddx) = lagrange2(xi[0]);
    let (ly, dy, ddy) = lagrange2(xi[1]);
    let nodes = m.element_nodes(e);
    let mut h = [0.0; 3];
    for b in 0..3 {
        for a in 0..3 {
            let c = sol.get(nodes[b * 3 + a], RHO);
            h[0] += c * ddx[a] * ly[b] / (m.hx * m.hx);
            h[1] += c * dx[a] * dy[b] / (m.hx * m.hy);
            h[2] += c * lx[a] * ddy[b] / (m.hy * m.hy);
        }
    }
    h
}

#[derive(Default)]
struct Sums {
    y_l2: Vec<f64>,
    gy_l2: Vec<f64>,
    gy_over_y_l2: Vec<f64>,
    log_y_l2: Vec<f64>,
    fisher: Vec<f64>,
    gy_l127: Vec<f64>,
    grad_theta_b2: f64,
    grad_theta_over_t2: f64,
    grad_rho_weighted: f64,
    theta_inv2: f64,
    theta_inv: f64,
    hess_rho: f64,
    u_l2: f64,
    gu_l2: f64,
    grad_rho_l6: f64,
    sum_grad_y: f64,
    sum_y_m1_l6: f64,
    y_linf: f64,
    grad_theta_m2: f64,
    grad_theta_mhalf: f64,
    theta_l3m: f64,
    theta_m2_l2: f64,
    force_work: f64,
    rho_gs: f64,
    rho_u_s: f64,
    rho_u2_s: f64,
    rho_moment: f64,
    wall_theta_b: f64,
    wall_log_theta_over_theta: f64,
    wall_theta: f64,
    wall_theta_inv: f64,
    wall_theta_bm2: f64,
}

/// Every monitored norm. Sobolev norms ||v||_{1,2} = (||v||_2^2 + ||grad v||_2^2)^(1/2).
pub fn apriori_monitor(problem: &Problem, sol: &DiscreteSolution) -> Result<Monitor> {
    apriori_monitor_with(problem, sol, DEFAULT_S)
}

pub fn apriori_monitor_with(
    problem: &Problem,
    sol: &DiscreteSolution,
    s_exp: f64,
) -> Result<Monitor> {
    let p = &problem.params;
    let sch = &problem.schedule;
    let n = sol.n;
    let mesh = &sol.mesh;
    let rule = GaussRule::new(7);
    let sql = sch.lambda.sqrt();
    let (bb, m, g) = (sch.b_exp, p.m_exp, p.gamma);
    let mut t = Sums {
        y_l2: vec![0.0; n],
        gy_l2: vec![0.0; n],
        gy_over_y_l2: vec![0.0; n],
        log_y_l2: vec![0.0; n],
        fisher: vec![0.0; n],
        gy_l127: vec![0.0; n],
        ..Default::default()
    };
    for e in 0..mesh.num_elements() {
        for qp in mesh.element_quadrature(e, &rule) {
            let ps = sol.eval_with(e, &mesh.shape(qp.xi));
            let (v, gr) = (&ps.v, &ps.g);
            let w = qp.w;
            let (rho, th) = (v[RHO], v[THETA]);
            if !(rho > 0.0 && th > 0.0) || (0..n).any(|k| !(v[Y0 + k] > 0.0)) {
                return Err(domain(
                    "monitor needs rho, theta, Y > 0 at quadrature points",
                ));
            }
            let n2 = |a: [f64; 2]| a[0] * a[0] + a[1] * a[1];
            let gt2 = n2(gr[THETA]);
            let grho2 = n2(gr[RHO]);
            let mut sy = -1.0;
            let mut sgy = [0.0; 2];
            for k in 0..n {
                let y = v[Y0 + k];
                let gy2 = n2(gr[Y0 + k]);
                t.y_l2[k] += w * y * y;
                t.gy_l2[k] += w * gy2;
                t.gy_over_y_l2[k] += w * gy2 / (y * y);
                t.log_y_l2[k] += w * y.ln().powi(2);
                t.fisher[k] += w * gy2 / y;
                t.gy_l127[k] += w * gy2.sqrt().powf(12.0 / 7.0);
                t.y_linf = t.y_linf.max(y.abs());
                sy += y;
                sgy[0] += gr[Y0 + k][0];
                sgy[1] += gr[Y0 + k][1];
            }
            t.sum_y_m1_l6 += w * sy.powi(6);
            t.sum_grad_y += w * n2(sgy);
            t.grad_theta_b2 += w * (0.5 * bb * th.powf(0.5 * bb - 1.0)).powi(2) * gt2;
            t.grad_theta_over_t2 += w * gt2 / th.powi(4);
            t.grad_rho_weighted += w * grho2 / (rho + sql);
            t.theta_inv2 += w / (th * th);
            t.theta_inv += w / th;
            let h = density_hessian(sol, e, qp.xi);
            t.hess_rho += w * (h[0] * h[0] + 2.0 * h[1] * h[1] + h[2] * h[2]);
            let u = [v[U1], v[U2]];
            let u2 = n2(u);
            t.u_l2 += w * u2;
            t.gu_l2 += w * (n2(gr[U1]) + n2(gr[U2]));
            t.grad_rho_l6 += w * grho2.powi(3);
            t.grad_theta_m2 += w * (0.5 * m * th.powf(0.5 * m - 1.0)).powi(2) * gt2;
            t.grad_theta_mhalf += w * (0.5 * th.powf(-1.5)).powi(2) * gt2;
            t.theta_l3m += w * th.powf(3.0 * m);
            t.theta_m2_l2 += w * th.powf(m);
            t.force_work += w * rho * (p.force[0] * u[0] + p.force[1] * u[1]);
            t.rho_gs += w * rho.powf(g * s_exp);
            t.rho_u_s += w * (rho * u2.sqrt()).powf(s_exp);
            t.rho_u2_s += w * (rho * u2).powf(s_exp);
            t.rho_moment += w * rho.powf(sch.beta + (s_exp - 1.0) * g);
        }
        for (_, qp) in mesh.wall_quadrature(e, &rule) {
            let ps = sol.eval_with(e, &mesh.shape(qp.xi));
            let th = ps.v[THETA];
            if !(th > 0.0) {
                return Err(domain("monitor needs theta > 0 on the walls"));
            }
            t.wall_theta_b += qp.w * th.powf(bb);
            t.wall_log_theta_over_theta += qp.w * (th.ln() / th).abs();
            t.wall_theta += qp.w * th;
            t.wall_theta_inv += qp.w / th;
            t.wall_theta_bm2 += qp.w * th.powf(bb - 2.0);
        }
    }

    let y_h1: Vec<f64> = (0..n).map(|k| (t.y_l2[k] + t.gy_l2[k]).sqrt()).collect();
    let gyy: Vec<f64> = t.gy_over_y_l2.iter().map(|v| v.sqrt()).collect();
    let logy: Vec<f64> = t.log_y_l2.iter().map(|v| v.sqrt()).collect();
    let lam_block: f64 = sql
        * (0..n)
            .map(|k| y_h1[k] + gyy[k] + sch.lambda.powf(-0.25) * logy[k])
            .sum::<f64>();
    let u_h1 = (t.u_l2 + t.gu_l2).sqrt();
    let grad_theta_b2 = t.grad_theta_b2.sqrt();
    let grad_theta_mhalf = t.grad_theta_mhalf.sqrt();

    let mut out = Monitor::default();
    out.push("sum_y_h1", y_h1.iter().sum());
    out.push("sum_grad_log_y_l2", gyy.iter().sum());
    out.push("sum_log_y_l2", logy.iter().sum());
    out.push("sqrt_lambda_species_block", lam_block);
    out.push("sum_fisher_y_l1", t.fisher.iter().sum());
    out.push("grad_theta_pow_b_half_l2", grad_theta_b2);
    out.push("grad_theta_over_theta_sq_l2", t.grad_theta_over_t2.sqrt());
    out.push("grad_rho_weighted_l2", t.grad_rho_weighted.sqrt());
    out.push("theta_inv_sq_l1", t.theta_inv2);
    out.push("theta_wall_lb", t.wall_theta_b.powf(1.0 / bb));
    out.push("log_theta_over_theta_wall_l1", t.wall_log_theta_over_theta);
    out.push("hess_rho_l2", t.hess_rho.sqrt());
    out.push("u_h1", u_h1);
    out.push("grad_rho_l6", t.grad_rho_l6.powf(1.0 / 6.0));
    out.push("sum_grad_y_l2", t.sum_grad_y.sqrt());
    out.push("sum_y_minus_one_l6", t.sum_y_m1_l6.powf(1.0 / 6.0));
    out.push(
        "sum_grad_y_l12_7",
        t.gy_l127.iter().map(|v| v.powf(7.0 / 12.0)).sum(),
    );
    out.push("theta_wall_l1", t.wall_theta);
    out.push("delta_theta_b_wall_l1", sch.delta * t.wall_theta_b);
    out.push("force_work_abs", t.force_work.abs());
    out.push("delta_theta_inv_l1", sch.delta * t.theta_inv);
    out.push("grad_y_l2", t.gy_l2.iter().sum::<f64>().sqrt());
    out.push("y_linf", t.y_linf);
    out.push("grad_theta_pow_m_half_l2", t.grad_theta_m2.sqrt());
    out.push("theta_inv_wall_l1", t.wall_theta_inv);
    out.push(
        "delta_temperature_block",
        sch.delta
            * (grad_theta_b2.powi(2) + grad_theta_mhalf.powi(2) + t.theta_inv2 + t.wall_theta_bm2),
    );
    out.push("theta_l3m", t.theta_l3m.powf(1.0 / (3.0 * m)));
    out.push("rho_l_gamma_s", t.rho_gs.powf(1.0 / (g * s_exp)));
    out.push("rho_u_ls", t.rho_u_s.powf(1.0 / s_exp));
    out.push("rho_u_sq_ls", t.rho_u2_s.powf(1.0 / s_exp));
    out.push(
        "theta_pow_m_half_h1",
        (t.theta_m2_l2 + t.grad_theta_m2).sqrt(),
    );
    out.push("delta_rho_moment_l1", sch.delta * t.rho_moment);
    Ok(out)
}
