//! Regularized approximate system: regularized constitutive quantities, the
//! pointwise weak-form integrands of the continuity, momentum, internal-energy
//! and species equations, and residual/Jacobian assembly.
//!
//! Every equation is written as  R(psi) = int (s psi + F . grad psi) + int_walls b psi.
//! The Jacobian is built by forward-mode differentiation of the same integrands.

use std::sync::Arc;

use faer::sparse::{SparseColMat, Triplet};
use num_dual::Dual64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closures::{DiffusionClosure, DiffusionKind, ReactionClosure};
use crate::error::{config, domain, Error, Result};
use crate::fields::{
    num_fields, DiscreteSolution, FieldSource, PointState, RHO, THETA, U1, U2, Y0,
};
use crate::mesh::{ChannelMesh, GaussRule};
use crate::mixture::{
    cold_energy_t, cold_pressure_t, molecular_energy_t, stress_t, GradientSample,
    MixtureParameters, StateSample,
};
use crate::scalar::Real;

/// The regularization tuple (eta, lambda, eps, delta) with the exponents beta, B, r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub eta: f64,
    pub lambda: f64,
    pub eps: f64,
    pub delta: f64,
    pub beta: f64,
    #[serde(rename = "B")]
    pub b_exp: f64,
    pub r: f64,
}

impl Schedule {
    /// Defaults beta = 4, B = max(2m + 2, 6), r = 1.
    pub fn with_defaults(eta: f64, lambda: f64, eps: f64, delta: f64, m_exp: f64) -> Self {
        Self {
            eta,
            lambda,
            eps,
            delta,
            beta: 4.0,
            b_exp: (2.0 * m_exp + 2.0).max(6.0),
            r: 1.0,
        }
    }

    pub fn validate(&self, m_exp: f64) -> Result<()> {
        if !(self.delta > self.eps
            && self.eps > self.lambda
            && self.lambda > self.eta
            && self.eta > 0.0)
        {
            return Err(config(format!(
                "regularization must satisfy delta > eps > lambda > eta > 0, got delta={} eps={} lambda={} eta={}",
                self.delta, self.eps, self.lambda, self.eta
            )));
        }
        if !(self.beta >= 4.0) {
            return Err(config(format!(
                "beta must be at least 4, got {}",
                self.beta
            )));
        }
        if !(self.b_exp >= 2.0 * m_exp + 2.0) {
            return Err(config(format!(
                "B must be at least 2m + 2 = {}, got {}",
                2.0 * m_exp + 2.0,
                self.b_exp
            )));
        }
        if !(self.r >= 0.0) {
            return Err(config("r must be non-negative"));
        }
        Ok(())
    }
}

// ---------- pointwise regularized quantities on f64 samples ----------

/// S_eta = S(theta, grad u) / (1 + eta theta). The built-in viscosities are smooth,
/// so their mollification is the identity.
pub fn regularized_stress(
    theta: f64,
    grad_u: &[Vec<f64>],
    eta: f64,
    p: &MixtureParameters,
) -> Vec<Vec<f64>> {
    let f = 1.0 / (1.0 + eta * theta);
    crate::mixture::stress(theta, grad_u, p)
        .into_iter()
        .map(|r| r.into_iter().map(|v| v * f).collect())
        .collect()
}

/// kappa_{delta,eta} = kappa(theta) + delta theta^B + delta / theta
pub fn regularized_conductivity(theta: f64, delta: f64, b_exp: f64, p: &MixtureParameters) -> f64 {
    p.kappa(theta) + delta * theta.powf(b_exp) + delta / theta
}

/// (s_k^lambda, g_k^lambda, s^lambda) with
/// s_k^lambda = cv_k log theta - log Y_k - log(rho + sqrt(lambda)), g_k^lambda = cp_k theta - theta s_k^lambda.
pub fn regularized_entropy(
    s: &StateSample,
    lambda: f64,
    p: &MixtureParameters,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if s.y.iter().any(|&y| !(y > 0.0)) {
        return Err(domain("regularized entropy needs Y_k > 0"));
    }
    if !(s.theta > 0.0) {
        return Err(domain("regularized entropy needs theta > 0"));
    }
    let lr = (s.rho + lambda.sqrt()).ln();
    let sk: Vec<f64> = (0..p.n())
        .map(|k| p.cv[k] * s.theta.ln() - s.y[k].ln() - lr)
        .collect();
    let gk: Vec<f64> = (0..p.n())
        .map(|k| p.cp(k) * s.theta - s.theta * sk[k])
        .collect();
    let smix = sk.iter().zip(&s.y).map(|(a, b)| a * b).sum();
    Ok((sk, gk, smix))
}

/// J_k = F_hat_k - (eps (rho + 1) Y_k + lambda) grad Y_k / Y_k, where F_hat is the
/// diffusion flux built from D_hat = D / (sigma_Y + eps)^r.
pub fn regularized_flux_j(
    s: &StateSample,
    g: &GradientSample,
    sch: &Schedule,
    closure: &DiffusionClosure,
) -> Result<Vec<Vec<f64>>> {
    if s.y.iter().any(|&y| !(y > 0.0)) {
        return Err(domain("regularized flux needs Y_k > 0"));
    }
    let d = s.dim();
    let gy: Vec<[f64; 2]> = g
        .grad_y
        .iter()
        .map(|r| [r[0], if d > 1 { r[1] } else { 0.0 }])
        .collect();
    let fh = flux_hat(s.theta, &s.y, &gy, sch, closure);
    Ok((0..s.y.len())
        .map(|k| {
            let c = sch.eps * (s.rho + 1.0) * s.y[k] + sch.lambda;
            (0..d)
                .map(|j| fh[k][j] - c * g.grad_y[k][j] / s.y[k])
                .collect()
        })
        .collect())
}

/// F_hat_k = -sum_l Y_k D_hat_kl grad Y_l (nondiagonal) or -D_hat grad Y_k (Fick).
pub fn flux_hat<T: Real>(
    theta: T,
    y: &[T],
    gy: &[[T; 2]],
    sch: &Schedule,
    c: &DiffusionClosure,
) -> Vec<[T; 2]> {
    let n = y.len();
    let mut sigma = T::zero();
    for v in y {
        sigma += *v;
    }
    let reg = (sigma + sch.eps).powf(-sch.r);
    let mut out = vec![[T::zero(); 2]; n];
    match c.kind {
        DiffusionKind::Fick => {
            let dh = c.scale(theta) * reg;
            for k in 0..n {
                for j in 0..2 {
                    out[k][j] = -dh * gy[k][j];
                }
            }
        }
        DiffusionKind::Nondiagonal => {
            if n == 1 {
                return out;
            }
            let dm = c.matrix_t(theta, y);
            for k in 0..n {
                for l in 0..n {
                    let w = y[k] * dm[k][l] * reg;
                    for j in 0..2 {
                        out[k][j] -= w * gy[l][j];
                    }
                }
            }
        }
    }
    out
}

/// All regularized constitutive quantities at a point.
#[derive(Debug, Clone)]
pub struct Regularized<T> {
    /// rho^gamma + rho theta
    pub pi: T,
    /// pi + delta rho^beta + delta rho^2
    pub pi_total: T,
    pub e: T,
    pub stress: [[T; 2]; 2],
    /// kappa_{delta,eta} (eps + theta) / theta
    pub kappa_t: T,
    pub fhat: Vec<[T; 2]>,
    pub j: Vec<[T; 2]>,
    pub omega: Vec<T>,
    /// delta eps (beta rho^(beta-2) + 2) |grad rho|^2
    pub p_delta: T,
}

/// The discrete problem: physics, closures, regularization and an optional
/// compensating source (manufactured solutions).
#[derive(Clone)]
pub struct Problem {
    pub params: MixtureParameters,
    pub diffusion: DiffusionClosure,
    pub reaction: ReactionClosure,
    pub schedule: Schedule,
    pub rule: GaussRule,
    /// When set, the weak form of the model evaluated on these fields is
    /// subtracted, so they solve the discrete problem up to discretization error.
    pub source: Option<Arc<dyn FieldSource>>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("params", &self.params)
            .field("diffusion", &self.diffusion)
            .field("reaction", &self.reaction)
            .field("schedule", &self.schedule)
            .field("source", &self.source.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new(
        params: MixtureParameters,
        diffusion: DiffusionClosure,
        reaction: ReactionClosure,
        schedule: Schedule,
    ) -> Self {
        Self {
            params,
            diffusion,
            reaction,
            schedule,
            rule: GaussRule::for_degree(5),
            source: None,
        }
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn rho_bar(&self, mesh: &ChannelMesh) -> f64 {
        self.params.m_total / mesh.area()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.params.molar_masses.iter().all(|&m| m == 1.0) {
            return Err(config(
                "the discrete system is posed for equal unit molar masses",
            ));
        }
        self.schedule.validate(self.params.m_exp)?;
        self.reaction.validate(&self.params)?;
        if !(self.params.f_friction > 0.0) {
            return Err(config(
                "friction coefficient must be positive on the periodic channel",
            ));
        }
        Ok(())
    }

    pub fn regularized<T: Real>(&self, v: &[T], g: &[[T; 2]]) -> Regularized<T> {
        let p = &self.params;
        let sch = &self.schedule;
        let n = p.n();
        let rho = v[RHO];
        let theta = v[THETA];
        let y = &v[Y0..Y0 + n];
        let gy = &g[Y0..Y0 + n];

        let pi = cold_pressure_t(rho, p.gamma) + rho * theta;
        let pi_total = pi + rho.powf(sch.beta) * sch.delta + rho * rho * sch.delta;
        let e = cold_energy_t(rho, p.gamma) + molecular_energy_t(theta, y, &p.cv);

        let damp = (theta * sch.eta + 1.0).recip();
        let gu = [[g[U1][0], g[U1][1]], [g[U2][0], g[U2][1]]];
        let stress = stress_t(p.mu(theta) * damp, p.nu(theta) * damp, &gu);

        let kappa = p.kappa(theta) + theta.powf(sch.b_exp) * sch.delta + theta.recip() * sch.delta;
        let kappa_t = kappa * (theta + sch.eps) / theta;

        let fhat = flux_hat(theta, y, gy, sch, &self.diffusion);
        let mut j = fhat.clone();
        for k in 0..n {
            let c = ((rho + 1.0) * y[k] * sch.eps + sch.lambda) / y[k];
            j[k][0] -= c * gy[k][0];
            j[k][1] -= c * gy[k][1];
        }
        let omega = self.reaction.rates_t(rho, theta, y, &p.molar_masses);
        let gr2 = g[RHO][0] * g[RHO][0] + g[RHO][1] * g[RHO][1];
        let p_delta = (rho.powf(sch.beta - 2.0) * sch.beta + 2.0) * gr2 * (sch.delta * sch.eps);
        Regularized {
            pi,
            pi_total,
            e,
            stress,
            kappa_t,
            fhat,
            j,
            omega,
            p_delta,
        }
    }

    /// Source s and flux F of every equation at an interior point.
    pub fn interior<T: Real>(&self, v: &[T], g: &[[T; 2]], rho_bar: f64) -> (Vec<T>, Vec<[T; 2]>) {
        let p = &self.params;
        let sch = &self.schedule;
        let n = p.n();
        let nf = num_fields(n);
        let q = self.regularized(v, g);
        let rho = v[RHO];
        let u = [v[U1], v[U2]];
        let theta = v[THETA];
        let mut s = vec![T::zero(); nf];
        let mut f = vec![[T::zero(); 2]; nf];

        // continuity: eps rho + div(rho u) = eps lap rho + eps rho_bar
        s[RHO] = (rho - rho_bar) * sch.eps;
        for jx in 0..2 {
            f[RHO][jx] = g[RHO][jx] * sch.eps - rho * u[jx];
        }

        // momentum (skew-symmetric convection, artificial pressure, body force)
        for i in 0..2 {
            let conv = u[0] * g[U1 + i][0] + u[1] * g[U1 + i][1];
            s[U1 + i] = rho * conv * 0.5 - rho * p.force[i];
            for jx in 0..2 {
                f[U1 + i][jx] = q.stress[i][jx] - rho * u[i] * u[jx] * 0.5;
            }
            f[U1 + i][i] -= q.pi_total;
        }

        // internal energy
        let div_u = g[U1][0] + g[U2][1];
        let mut s_du = T::zero();
        for i in 0..2 {
            for jx in 0..2 {
                s_du += q.stress[i][jx] * g[U1 + i][jx];
            }
        }
        s[THETA] = q.pi * div_u - theta.recip() * sch.delta - s_du - q.p_delta;
        for jx in 0..2 {
            let mut cj = T::zero();
            for k in 0..n {
                cj += q.j[k][jx] * p.cv[k];
            }
            f[THETA][jx] = q.kappa_t * g[THETA][jx] - rho * q.e * u[jx] - theta * cj;
        }

        // species
        let rho_bar_k = rho_bar / n as f64;
        let sql = sch.lambda.sqrt();
        for k in 0..n {
            let yk = v[Y0 + k];
            s[Y0 + k] =
                -q.omega[k] - T::cst(sch.eps * rho_bar_k) + yk * rho * sch.eps + yk.ln() * sql;
            for jx in 0..2 {
                f[Y0 + k][jx] = -q.j[k][jx] - yk * rho * u[jx] + yk * g[RHO][jx] * sch.eps;
            }
        }
        (s, f)
    }

    /// Wall integrand b of every equation (friction and heat exchange).
    pub fn wall<T: Real>(&self, v: &[T], theta0: f64) -> Vec<T> {
        let p = &self.params;
        let sch = &self.schedule;
        let nf = num_fields(p.n());
        let mut b = vec![T::zero(); nf];
        b[U1] = v[U1] * p.f_friction;
        b[U2] = v[U2] * p.f_friction;
        b[THETA] = wall_heat(v[THETA], theta0, p.l_heat, sch);
        b
    }

    pub fn theta0_at(&self, mesh: &ChannelMesh, x: f64, top: bool) -> f64 {
        self.params.theta0.eval(x / mesh.lx, top)
    }
}

/// (L + delta theta^(B-1))(theta - theta0) + eps log theta + lambda theta^(B/2) log theta
pub fn wall_heat<T: Real>(theta: T, theta0: f64, l_heat: f64, sch: &Schedule) -> T {
    let lt = theta.ln();
    (theta.powf(sch.b_exp - 1.0) * sch.delta + l_heat) * (theta - theta0)
        + lt * sch.eps
        + theta.powf(sch.b_exp / 2.0) * lt * sch.lambda
}

fn check_point(ps: &PointState, n: usize) -> Result<()> {
    if !(ps.v[RHO] > 0.0) {
        return Err(domain(format!(
            "density {:e} at a quadrature point",
            ps.v[RHO]
        )));
    }
    if !(ps.v[THETA] > 0.0) {
        return Err(domain(format!(
            "temperature {:e} at a quadrature point",
            ps.v[THETA]
        )));
    }
    for k in 0..n {
        if !(ps.v[Y0 + k] > 0.0) {
            return Err(domain(format!(
                "mass fraction Y{} = {:e} at a quadrature point",
                k + 1,
                ps.v[Y0 + k]
            )));
        }
    }
    Ok(())
}

struct Local {
    res: Vec<f64>,
    jac: Vec<f64>,
}

fn element_local(
    problem: &Problem,
    sol: &DiscreteSolution,
    e: usize,
    rho_bar: f64,
    with_jac: bool,
) -> Result<Local> {
    let mesh = &sol.mesh;
    let n = sol.n;
    let nf = num_fields(n);
    let nl = 9 * nf;
    let mut res = vec![0.0; nl];
    let mut jac = if with_jac {
        vec![0.0; nl * nl]
    } else {
        Vec::new()
    };

    for qp in mesh.element_quadrature(e, &problem.rule) {
        let sh = mesh.shape(qp.xi);
        let ps = sol.eval_with(e, &sh);
        check_point(&ps, n)?;
        let (mut s, mut f) = problem.interior::<f64>(&ps.v, &ps.g, rho_bar);
        if let Some(src) = &problem.source {
            let ex = src.sample_at(e, qp.xi, qp.x);
            let (se, fe) = problem.interior::<f64>(&ex.v, &ex.g, rho_bar);
            for i in 0..nf {
                s[i] -= se[i];
                f[i][0] -= fe[i][0];
                f[i][1] -= fe[i][1];
            }
        }
        for a in 0..9 {
            for i in 0..nf {
                res[a * nf + i] +=
                    qp.w * (s[i] * sh.phi[a] + f[i][0] * sh.grad[a][0] + f[i][1] * sh.grad[a][1]);
            }
        }
        if !with_jac {
            continue;
        }
        let vd: Vec<Dual64> = ps.v.iter().map(|&x| Dual64::from(x)).collect();
        let gd: Vec<[Dual64; 2]> =
            ps.g.iter()
                .map(|g| [Dual64::from(g[0]), Dual64::from(g[1])])
                .collect();
        let mut row = vec![0.0; nl];
        for fin in 0..nf {
            for c in 0..3 {
                let mut v = vd.clone();
                let mut g = gd.clone();
                if c == 0 {
                    v[fin].eps = 1.0;
                } else {
                    g[fin][c - 1].eps = 1.0;
                }
                let (sd, fd) = problem.interior(&v, &g, rho_bar);
                for a in 0..9 {
                    for i in 0..nf {
                        row[a * nf + i] = qp.w
                            * (sd[i].eps * sh.phi[a]
                                + fd[i][0].eps * sh.grad[a][0]
                                + fd[i][1].eps * sh.grad[a][1]);
                    }
                }
                for b in 0..9 {
                    let wb = match c {
                        0 => sh.phi[b],
                        1 => sh.grad[b][0],
                        _ => sh.grad[b][1],
                    };
                    if wb == 0.0 {
                        continue;
                    }
                    let col = b * nf + fin;
                    for (r, rv) in row.iter().enumerate() {
                        jac[r * nl + col] += rv * wb;
                    }
                }
            }
        }
    }

    for (top, qp) in mesh.wall_quadrature(e, &problem.rule) {
        let sh = mesh.shape(qp.xi);
        let ps = sol.eval_with(e, &sh);
        let t0 = problem.theta0_at(mesh, qp.x[0], top);
        let mut b = problem.wall::<f64>(&ps.v, t0);
        if let Some(src) = &problem.source {
            let ex = src.sample_at(e, qp.xi, qp.x);
            let be = problem.wall::<f64>(&ex.v, t0);
            for i in 0..nf {
                b[i] -= be[i];
            }
        }
        for a in 0..9 {
            for i in 0..nf {
                res[a * nf + i] += qp.w * b[i] * sh.phi[a];
            }
        }
        if !with_jac {
            continue;
        }
        for fin in [U1, U2, THETA] {
            let mut v: Vec<Dual64> = ps.v.iter().map(|&x| Dual64::from(x)).collect();
            v[fin].eps = 1.0;
            let bd = problem.wall(&v, t0);
            for a in 0..9 {
                for i in 0..nf {
                    let d = bd[i].eps;
                    if d == 0.0 {
                        continue;
                    }
                    for bb in 0..9 {
                        jac[(a * nf + i) * nl + bb * nf + fin] += qp.w * d * sh.phi[a] * sh.phi[bb];
                    }
                }
            }
        }
    }
    Ok(Local { res, jac })
}

/// Assembled residual and (optionally) Jacobian.
pub struct Assembled {
    pub residual: Vec<f64>,
    pub jacobian: Option<SparseColMat<usize, f64>>,
}

fn constraint_targets(problem: &Problem, sol: &DiscreteSolution) -> Vec<(usize, f64)> {
    let nf = sol.nf();
    sol.constrained_dofs()
        .into_iter()
        .map(|d| {
            let node = d / nf;
            let target = problem
                .source
                .as_ref()
                .map_or(0.0, |s| s.sample(sol.mesh.node_coords(node)).v[U2]);
            (d, target)
        })
        .collect()
}

/// Residual of the discrete system, with wall-normal velocity rows replaced by
/// the constraint u2 - target.
pub fn assemble(problem: &Problem, sol: &DiscreteSolution, with_jac: bool) -> Result<Assembled> {
    if sol.n != problem.n() {
        return Err(config(
            "species count of the solution and the problem differ",
        ));
    }
    let mesh = &sol.mesh;
    let rho_bar = problem.rho_bar(mesh);
    let nf = sol.nf();
    let locals: Vec<Local> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| element_local(problem, sol, e, rho_bar, with_jac))
        .collect::<Result<Vec<_>>>()?;

    let ndof = sol.ndof();
    let mut residual = vec![0.0; ndof];
    let constraints = constraint_targets(problem, sol);
    let mut is_con = vec![false; ndof];
    for &(d, _) in &constraints {
        is_con[d] = true;
    }
    let nl = 9 * nf;
    let mut trips: Vec<Triplet<usize, usize, f64>> = Vec::new();
    if with_jac {
        trips.reserve(locals.len() * nl * nl);
    }
    for (e, loc) in locals.iter().enumerate() {
        let nodes = mesh.element_nodes(e);
        let gdof = |r: usize| nodes[r / nf] * nf + r % nf;
        for r in 0..nl {
            residual[gdof(r)] += loc.res[r];
        }
        if with_jac {
            for r in 0..nl {
                let gr = gdof(r);
                if is_con[gr] {
                    continue;
                }
                for c in 0..nl {
                    let v = loc.jac[r * nl + c];
                    if v != 0.0 {
                        trips.push(Triplet::new(gr, gdof(c), v));
                    }
                }
            }
        }
    }
    for &(d, target) in &constraints {
        residual[d] = sol.data[d] - target;
        if with_jac {
            trips.push(Triplet::new(d, d, 1.0));
        }
    }
    let jacobian = if with_jac {
        Some(
            SparseColMat::try_new_from_triplets(ndof, ndof, &trips)
                .map_err(|e| Error::LinearSolveFailure(format!("building the Jacobian: {e:?}")))?,
        )
    } else {
        None
    };
    Ok(Assembled { residual, jacobian })
}

/// RMS norm ||r||_2 / sqrt(len).
pub fn rms(r: &[f64]) -> f64 {
    (r.iter().map(|v| v * v).sum::<f64>() / r.len().max(1) as f64).sqrt()
}

/// Scalar test function with gradient.
pub trait TestFunction: Sync {
    fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2]);
}

impl TestFunction for crate::fields::SmoothField {
    fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let (v, g, _) = crate::fields::SmoothField::eval(self, x);
        (v, g)
    }
}

/// Terms of the total-energy balance tested with psi (left side minus right side):
///   -int [rho e + rho|u|^2/2 + Pi] u.grad psi - int (S_eta u.grad psi + delta psi/theta)
///   + int kappa_t grad theta.grad psi + int_walls [heat exchange] psi + f int_walls |u|^2 psi
///   - int theta sum_k cv_k J_k.grad psi
///   - int rho f.u psi - delta/(beta-1) int (eps beta rho_bar rho^(beta-1) psi + rho^beta u.grad psi - eps beta rho^beta psi)
///   - delta int (2 eps rho_bar rho psi + rho^2 u.grad psi - 2 eps rho^2 psi)
pub fn total_energy_residual(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    psi: &dyn TestFunction,
) -> Result<f64> {
    Ok(total_energy_terms(problem, src, mesh, psi)?
        .iter()
        .map(|t| t.1)
        .sum())
}

/// Named contributions of the total-energy residual.
pub fn total_energy_terms(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    psi: &dyn TestFunction,
) -> Result<Vec<(&'static str, f64)>> {
    let p = &problem.params;
    let sch = &problem.schedule;
    let n = p.n();
    let rho_bar = problem.rho_bar(mesh);
    let mut acc = [0.0f64; 8];
    for e in 0..mesh.num_elements() {
        for qp in mesh.element_quadrature(e, &problem.rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            check_point(&ps, n)?;
            let (ps_v, ps_g) = (&ps.v, &ps.g);
            let q = problem.regularized::<f64>(ps_v, ps_g);
            let (w, gw) = psi.eval(qp.x);
            let rho = ps_v[RHO];
            let u = [ps_v[U1], ps_v[U2]];
            let th = ps_v[THETA];
            let u2 = u[0] * u[0] + u[1] * u[1];
            let ugp = u[0] * gw[0] + u[1] * gw[1];
            acc[0] -= qp.w * (rho * q.e + 0.5 * rho * u2 + q.pi_total) * ugp;
            let su = [
                q.stress[0][0] * u[0] + q.stress[0][1] * u[1],
                q.stress[1][0] * u[0] + q.stress[1][1] * u[1],
            ];
            acc[1] -= qp.w * (su[0] * gw[0] + su[1] * gw[1] + sch.delta * w / th);
            acc[2] += qp.w * q.kappa_t * (ps_g[THETA][0] * gw[0] + ps_g[THETA][1] * gw[1]);
            let mut cj = 0.0;
            for k in 0..n {
                cj += p.cv[k] * (q.j[k][0] * gw[0] + q.j[k][1] * gw[1]);
            }
            acc[3] -= qp.w * th * cj;
            acc[4] -= qp.w * rho * (p.force[0] * u[0] + p.force[1] * u[1]) * w;
            let b = sch.beta;
            acc[5] -= qp.w * sch.delta / (b - 1.0)
                * (sch.eps * b * rho_bar * rho.powf(b - 1.0) * w + rho.powf(b) * ugp
                    - sch.eps * b * rho.powf(b) * w);
            acc[6] -= qp.w
                * sch.delta
                * (2.0 * sch.eps * rho_bar * rho * w + rho * rho * ugp
                    - 2.0 * sch.eps * rho * rho * w);
        }
        for (top, qp) in mesh.wall_quadrature(e, &problem.rule) {
            let ps = src.sample_at(e, qp.xi, qp.x);
            let (w, _) = psi.eval(qp.x);
            let t0 = problem.theta0_at(mesh, qp.x[0], top);
            let u2 = ps.v[U1] * ps.v[U1] + ps.v[U2] * ps.v[U2];
            acc[7] += qp.w * (wall_heat(ps.v[THETA], t0, p.l_heat, sch) + p.f_friction * u2) * w;
        }
    }
    Ok(vec![
        ("convective_energy_flux", acc[0]),
        ("viscous_work_and_delta_source", acc[1]),
        ("heat_conduction", acc[2]),
        ("species_heat_flux", acc[3]),
        ("body_force_work", acc[4]),
        ("artificial_pressure_beta", acc[5]),
        ("artificial_pressure_quadratic", acc[6]),
        ("wall_heat_and_friction", acc[7]),
    ])
}
