//! Residuals of the limit weak formulation (physical closures, no regularization),
//! the limit entropy inequality, the global energy balance with the remainder
//! left by the regularization, and the renormalized continuity equation.

use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{wall_heat, Problem, TestFunction};
use crate::closures::production_rates;
use crate::error::{domain, Result};
use crate::fields::{FieldSource, PointState, RHO, THETA, U1, U2, Y0};
use crate::mesh::{ChannelMesh, GaussRule};
use crate::mixture::{
    diffusion_flux, entropy_production, internal_energy, pressure, species_thermo, stress,
    GradientSample, StateSample,
};

use super::battery::{
    nonnegative_battery, scalar_battery, vector_battery, NamedScalar, TangentialField,
};
use super::report::{AuditReport, Comparison};

/// One quadrature point of a sampled field.
#[derive(Debug, Clone)]
pub struct Sample {
    pub x: [f64; 2],
    pub w: f64,
    pub ps: PointState,
}

/// Interior and wall samples of `src`; wall samples carry the wall temperature.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub interior: Vec<Sample>,
    pub walls: Vec<(Sample, f64)>,
}

pub fn sample_fields(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    rule: &GaussRule,
) -> Sampled {
    let per: Vec<(Vec<Sample>, Vec<(Sample, f64)>)> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let inner = mesh
                .element_quadrature(e, rule)
                .into_iter()
                .map(|qp| Sample {
                    x: qp.x,
                    w: qp.w,
                    ps: src.sample_at(e, qp.xi, qp.x),
                })
                .collect();
            let walls = mesh
                .wall_quadrature(e, rule)
                .into_iter()
                .map(|(top, qp)| {
                    let t0 = problem.theta0_at(mesh, qp.x[0], top);
                    (
                        Sample {
                            x: qp.x,
                            w: qp.w,
                            ps: src.sample_at(e, qp.xi, qp.x),
                        },
                        t0,
                    )
                })
                .collect();
            (inner, walls)
        })
        .collect();
    let mut out = Sampled {
        interior: Vec::new(),
        walls: Vec::new(),
    };
    for (a, b) in per {
        out.interior.extend(a);
        out.walls.extend(b);
    }
    out
}

pub fn to_samples(ps: &PointState) -> (StateSample, GradientSample) {
    let n = ps.n_species();
    let s = StateSample {
        rho: ps.v[RHO],
        u: vec![ps.v[U1], ps.v[U2]],
        theta: ps.v[THETA],
        y: ps.v[Y0..Y0 + n].to_vec(),
    };
    let g = GradientSample {
        grad_rho: ps.g[RHO].to_vec(),
        grad_u: vec![ps.g[U1].to_vec(), ps.g[U2].to_vec()],
        grad_theta: ps.g[THETA].to_vec(),
        grad_y: (0..n).map(|k| ps.g[Y0 + k].to_vec()).collect(),
    };
    (s, g)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Accumulates signed terms and their absolute magnitudes.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    value: f64,
    scale: f64,
}

impl Acc {
    fn add(&mut self, terms: &[f64]) {
        for t in terms {
            self.value += t;
            self.scale += t.abs();
        }
    }
}

/// Physical pointwise quantities needed by the limit forms.
struct Physical {
    s: StateSample,
    g: GradientSample,
    pi: f64,
    e: f64,
    stress: Vec<Vec<f64>>,
    kappa: f64,
    flux: Vec<Vec<f64>>,
    omega: Vec<f64>,
}

fn physical(problem: &Problem, ps: &PointState) -> Result<Physical> {
    let p = &problem.params;
    let (s, g) = to_samples(ps);
    if !(s.rho > 0.0 && s.theta > 0.0) {
        return Err(domain(
            "weak residuals need rho > 0 and theta > 0 at quadrature points",
        ));
    }
    let flux = diffusion_flux(&s, &g, &problem.diffusion, p)?;
    let omega = production_rates(&s, p, &problem.reaction)?;
    Ok(Physical {
        pi: pressure(&s, p),
        e: internal_energy(&s, p),
        stress: stress(s.theta, &g.grad_u, p),
        kappa: p.kappa(s.theta),
        flux,
        omega,
        s,
        g,
    })
}

/// Continuity, species and energy residuals for a scalar test function and
/// the momentum residual for a tangential vector test function, as (value, scale).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Def1Residuals {
    pub continuity: (f64, f64),
    pub species: Vec<(f64, f64)>,
    pub energy: (f64, f64),
}

fn def1_scalar(
    problem: &Problem,
    smp: &Sampled,
    phys: &[Physical],
    psi: &dyn TestFunction,
) -> Def1Residuals {
    let p = &problem.params;
    let n = p.n();
    let mut cont = Acc::default();
    let mut spe = vec![Acc::default(); n];
    let mut ene = Acc::default();
    for (sm, q) in smp.interior.iter().zip(phys) {
        let (w, gw) = psi.eval(sm.x);
        let u = &q.s.u;
        let rho = q.s.rho;
        let ugp = dot(u, &gw);
        cont.add(&[sm.w * rho * ugp]);
        for k in 0..n {
            spe[k].add(&[
                -sm.w * q.s.y[k] * rho * ugp,
                -sm.w * dot(&q.flux[k], &gw),
                -sm.w * q.omega[k] * w,
            ]);
        }
        let u2 = dot(u, u);
        let su: Vec<f64> = (0..2).map(|i| dot(&q.stress[i], u)).collect();
        let hf: Vec<f64> = (0..2)
            .map(|j| (0..n).map(|k| p.cp(k) * q.s.theta * q.flux[k][j]).sum())
            .collect();
        ene.add(&[
            -sm.w * (0.5 * rho * u2 + rho * q.e) * ugp,
            sm.w * q.kappa * dot(&q.g.grad_theta, &gw),
            -sm.w * dot(&hf, &gw),
            -sm.w * rho * dot(&p.force, u) * w,
            sm.w * dot(&su, &gw),
            -sm.w * q.pi * ugp,
        ]);
    }
    for (sm, t0) in &smp.walls {
        let (w, _) = psi.eval(sm.x);
        let u2 = sm.ps.v[U1].powi(2) + sm.ps.v[U2].powi(2);
        ene.add(&[
            sm.w * p.l_heat * (sm.ps.v[THETA] - t0) * w,
            sm.w * p.f_friction * u2 * w,
        ]);
    }
    Def1Residuals {
        continuity: (cont.value, cont.scale),
        species: spe.iter().map(|a| (a.value, a.scale)).collect(),
        energy: (ene.value, ene.scale),
    }
}

fn def1_momentum(
    problem: &Problem,
    smp: &Sampled,
    phys: &[Physical],
    phi: &TangentialField,
) -> (f64, f64) {
    let p = &problem.params;
    let mut acc = Acc::default();
    for (sm, q) in smp.interior.iter().zip(phys) {
        let (v, gv) = phi.eval(sm.x);
        let u = &q.s.u;
        let rho = q.s.rho;
        let mut conv = 0.0;
        let mut sg = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                conv += u[i] * u[j] * gv[i][j];
                sg += q.stress[i][j] * gv[i][j];
            }
        }
        let div = gv[0][0] + gv[1][1];
        acc.add(&[
            -sm.w * rho * conv,
            sm.w * sg,
            -sm.w * q.pi * div,
            -sm.w * rho * (p.force[0] * v[0] + p.force[1] * v[1]),
        ]);
    }
    for (sm, _) in &smp.walls {
        let (v, _) = phi.eval(sm.x);
        acc.add(&[sm.w * p.f_friction * (sm.ps.v[U1] * v[0] + sm.ps.v[U2] * v[1])]);
    }
    (acc.value, acc.scale)
}

fn physical_all(problem: &Problem, smp: &Sampled) -> Result<Vec<Physical>> {
    smp.interior
        .par_iter()
        .map(|s| physical(problem, &s.ps))
        .collect()
}

/// Residuals of the four limit weak forms over the fixed battery. Entries are
/// advisory: a discrete solution at positive regularization does not satisfy
/// the limit system exactly. Tolerance is `rel_tol` times the term magnitudes.
pub fn weak_residuals_def1(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    rel_tol: f64,
) -> Result<AuditReport> {
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let phys = physical_all(problem, &smp)?;
    let mut rep = AuditReport::default();
    for t in scalar_battery(mesh.lx, mesh.ly) {
        let r = def1_scalar(problem, &smp, &phys, &t);
        rep.advisory(
            format!("def1_continuity[{}]", t.name),
            r.continuity.0,
            rel_tol * r.continuity.1,
            Comparison::Equality,
            "weak continuity",
        );
        for (k, s) in r.species.iter().enumerate() {
            rep.advisory(
                format!("def1_species{}[{}]", k + 1, t.name),
                s.0,
                rel_tol * s.1,
                Comparison::Equality,
                "weak species balance",
            );
        }
        rep.advisory(
            format!("def1_energy[{}]", t.name),
            r.energy.0,
            rel_tol * r.energy.1,
            Comparison::Equality,
            "weak total energy balance",
        );
    }
    for phi in vector_battery(mesh.lx, mesh.ly) {
        let (v, s) = def1_momentum(problem, &smp, &phys, &phi);
        rep.advisory(
            format!("def1_momentum[{}]", phi.name),
            v,
            rel_tol * s,
            Comparison::Equality,
            "weak momentum balance",
        );
    }
    Ok(rep)
}

/// Def1 residuals for a single scalar test function.
pub fn def1_scalar_residuals(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    psi: &dyn TestFunction,
) -> Result<Def1Residuals> {
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let phys = physical_all(problem, &smp)?;
    Ok(def1_scalar(problem, &smp, &phys, psi))
}

/// Def1 momentum residual for a single tangential test field, as (value, scale).
pub fn def1_momentum_residual(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    phi: &TangentialField,
) -> Result<(f64, f64)> {
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let phys = physical_all(problem, &smp)?;
    Ok(def1_momentum(problem, &smp, &phys, phi))
}

/// Left and right sides of the limit entropy inequality for a nonnegative psi.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EntropyInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl EntropyInequality {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn def2_one(
    problem: &Problem,
    smp: &Sampled,
    phys: &[Physical],
    psi: &dyn TestFunction,
) -> Result<EntropyInequality> {
    let p = &problem.params;
    let n = p.n();
    let mut lhs = Acc::default();
    let mut rhs = Acc::default();
    for (sm, q) in smp.interior.iter().zip(phys) {
        let (w, gw) = psi.eval(sm.x);
        if q.s.y.iter().any(|&y| !(y > 0.0)) {
            return Err(domain(
                "entropy inequality needs Y > 0 at quadrature points",
            ));
        }
        let prod = entropy_production(&q.s, &q.g, &q.flux, &q.omega, p)?;
        // reaction term written with c_pk - c_vk log theta + log Y_k (rho drops out since sum omega = 0)
        let react: f64 = -(0..n)
            .map(|k| q.omega[k] * (p.cp(k) - p.cv[k] * q.s.theta.ln() + q.s.y[k].ln()))
            .sum::<f64>();
        lhs.add(&[
            sm.w * prod.terms[0] * w,
            sm.w * prod.terms[1] * w,
            sm.w * react * w,
            sm.w * prod.terms[2] * w,
        ]);
        let th = species_thermo(&q.s, p)?;
        let gth = &q.g.grad_theta;
        let ugp = dot(&q.s.u, &gw);
        let mut cvf = 0.0;
        let mut flogy = 0.0;
        for k in 0..n {
            let fg = dot(&q.flux[k], &gw);
            cvf += p.cv[k] * fg;
            flogy += q.s.y[k].ln() * fg;
        }
        rhs.add(&[
            sm.w * q.kappa * dot(gth, &gw) / q.s.theta,
            -sm.w * q.s.rho * th.s_mix * ugp,
            -sm.w * q.s.theta.ln() * cvf,
            sm.w * flogy,
        ]);
    }
    for (sm, t0) in &smp.walls {
        let (w, _) = psi.eval(sm.x);
        let th = sm.ps.v[THETA];
        if !(th > 0.0) {
            return Err(domain("entropy inequality needs theta > 0 on the walls"));
        }
        lhs.add(&[sm.w * p.l_heat * t0 / th * w]);
        rhs.add(&[sm.w * p.l_heat * w]);
    }
    Ok(EntropyInequality {
        lhs: lhs.value,
        rhs: rhs.value,
        scale: lhs.scale + rhs.scale,
    })
}

pub fn entropy_inequality(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    psi: &dyn TestFunction,
) -> Result<EntropyInequality> {
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let phys = physical_all(problem, &smp)?;
    def2_one(problem, &smp, &phys, psi)
}

/// One-sided entropy-inequality audit over the nonnegative battery (advisory).
pub fn entropy_residuals_def2(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    rel_tol: f64,
) -> Result<AuditReport> {
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let phys = physical_all(problem, &smp)?;
    let mut rep = AuditReport::default();
    let battery: Vec<NamedScalar> = nonnegative_battery(mesh.lx, mesh.ly);
    for t in &battery {
        let r = def2_one(problem, &smp, &phys, t)?;
        rep.advisory(
            format!("def2_entropy[{}]", t.name),
            r.residual(),
            rel_tol * r.scale,
            Comparison::OneSided,
            "entropy inequality",
        );
    }
    Ok(rep)
}

/// Global energy balance f int|u|^2 + int L(theta - theta0) - int rho f.u and the
/// remainder the regularized system adds to it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GlobalEnergy {
    pub friction: f64,
    pub wall_heat: f64,
    pub force_work: f64,
    pub residual: f64,
    /// -delta int 1/theta + int_walls (regularized heat exchange - L(theta - theta0))
    /// plus the artificial-pressure terms coupled to the density regularization
    pub remainder: f64,
    /// f ||u||^2_{2,walls} + L ||theta - theta0||_{1,walls} + |int rho f.u|
    pub scale: f64,
}

impl GlobalEnergy {
    pub fn balance(&self) -> f64 {
        self.residual + self.remainder
    }
}

pub fn global_energy(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
) -> Result<GlobalEnergy> {
    let p = &problem.params;
    let sch = &problem.schedule;
    let rho_bar = problem.rho_bar(mesh);
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let mut out = GlobalEnergy::default();
    let (b, d, eps) = (sch.beta, sch.delta, sch.eps);
    for sm in &smp.interior {
        let rho = sm.ps.v[RHO];
        let th = sm.ps.v[THETA];
        if !(rho > 0.0 && th > 0.0) {
            return Err(domain("global energy balance needs rho > 0 and theta > 0"));
        }
        out.force_work += sm.w * rho * (p.force[0] * sm.ps.v[U1] + p.force[1] * sm.ps.v[U2]);
        out.remainder -= sm.w
            * (d / th
                + d / (b - 1.0) * eps * b * (rho_bar * rho.powf(b - 1.0) - rho.powf(b))
                + d * 2.0 * eps * (rho_bar * rho - rho * rho));
    }
    let mut heat_abs = 0.0;
    for (sm, t0) in &smp.walls {
        let th = sm.ps.v[THETA];
        let u2 = sm.ps.v[U1].powi(2) + sm.ps.v[U2].powi(2);
        out.friction += sm.w * p.f_friction * u2;
        let lin = p.l_heat * (th - t0);
        out.wall_heat += sm.w * lin;
        heat_abs += sm.w * lin.abs();
        out.remainder += sm.w * (wall_heat(th, *t0, p.l_heat, sch) - lin);
    }
    out.residual = out.friction + out.wall_heat - out.force_work;
    out.scale = out.friction + heat_abs + out.force_work.abs();
    Ok(out)
}

/// T(z) = z on [0,1], 2 - (z-3)^2/4 on [1,3], 2 beyond: concave, C^1.
pub fn truncation(z: f64) -> (f64, f64) {
    if z <= 1.0 {
        (z, 1.0)
    } else if z < 3.0 {
        (2.0 - (z - 3.0).powi(2) / 4.0, -(z - 3.0) / 2.0)
    } else {
        (2.0, 0.0)
    }
}

/// T_k(z) = k T(z/k) and its derivative.
pub fn truncation_k(k: f64, z: f64) -> (f64, f64) {
    let (t, dt) = truncation(z / k);
    (k * t, dt)
}

/// int b(rho) u.grad psi + (b(rho) - b'(rho) rho) div u psi, as (value, scale).
pub fn renormalized_residual(
    smp: &Sampled,
    b: &dyn Fn(f64) -> (f64, f64),
    psi: &dyn TestFunction,
) -> (f64, f64) {
    let mut acc = Acc::default();
    for sm in &smp.interior {
        let (w, gw) = psi.eval(sm.x);
        let rho = sm.ps.v[RHO];
        let (bv, db) = b(rho);
        let div = sm.ps.g[U1][0] + sm.ps.g[U2][1];
        acc.add(&[
            sm.w * bv * (sm.ps.v[U1] * gw[0] + sm.ps.v[U2] * gw[1]),
            sm.w * (bv - db * rho) * div * w,
        ]);
    }
    (acc.value, acc.scale)
}

pub const TRUNCATION_LEVELS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Renormalized continuity over T_k, k = 1, 2, 4, 8, and the scalar battery
/// (advisory at positive eps, where continuity carries the eps terms).
pub fn renormalized_check(
    problem: &Problem,
    src: &dyn FieldSource,
    mesh: &ChannelMesh,
    rel_tol: f64,
) -> AuditReport {
    let smp = sample_fields(problem, src, mesh, &problem.rule);
    let mut rep = AuditReport::default();
    for k in TRUNCATION_LEVELS {
        let b = move |z: f64| truncation_k(k, z);
        for t in scalar_battery(mesh.lx, mesh.ly) {
            let (v, s) = renormalized_residual(&smp, &b, &t);
            rep.advisory(
                format!("renormalized_T{k}[{}]", t.name),
                v,
                rel_tol * s,
                Comparison::Equality,
                "renormalized continuity",
            );
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_shape() {
        assert_eq!(truncation(0.5), (0.5, 1.0));
        assert_eq!(truncation(1.0), (1.0, 1.0));
        assert_eq!(truncation(3.0), (2.0, 0.0));
        assert_eq!(truncation(7.0), (2.0, 0.0));
        // C^1 at the joints and concave in between
        let h = 1e-7;
        for z in [1.0, 3.0] {
            let l = truncation(z - h);
            let r = truncation(z + h);
            assert!((l.0 - r.0).abs() < 1e-6 && (l.1 - r.1).abs() < 1e-6);
        }
        let mut prev = f64::INFINITY;
        for i in 0..=40 {
            let d = truncation(i as f64 * 0.1).1;
            assert!(d <= prev);
            prev = d;
        }
        assert_eq!(truncation_k(4.0, 2.0), (2.0, 1.0));
        assert_eq!(truncation_k(4.0, 20.0), (8.0, 0.0));
    }
}
