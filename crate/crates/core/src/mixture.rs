//! Constitutive kernel: pressure, energies, species thermodynamics, stress,
//! heat flux, diffusion driving forces and fluxes, entropy production.
//!
//! Everything here is a closed-form function of a pointwise state. The generic
//! helpers (`*_t`) are shared with the discrete residual so that the solver and
//! the kernel evaluate literally the same formulas.

use std::sync::Arc;

use num_dual::{Dual64, DualNum};
use serde::{Deserialize, Serialize};

use crate::closures::{DiffusionClosure, DiffusionKind};
use crate::error::{config, domain, Result};
use crate::scalar::Real;

/// Temperature-dependent transport coefficients. Arguments are duals so that a
/// user law can be differentiated by the solver without extra plumbing.
pub trait TransportLaw: Send + Sync {
    fn mu(&self, theta: Dual64) -> Dual64;
    fn nu(&self, theta: Dual64) -> Dual64;
    fn kappa(&self, theta: Dual64) -> Dual64;
}

/// mu = mu0 (1 + theta), nu = nu0 (1 + theta), kappa = kappa0 (1 + theta^m).
#[derive(Debug, Clone, Copy)]
pub struct PowerLawTransport {
    pub mu0: f64,
    pub nu0: f64,
    pub kappa0: f64,
    pub m: f64,
}

impl TransportLaw for PowerLawTransport {
    fn mu(&self, theta: Dual64) -> Dual64 {
        (theta + 1.0) * self.mu0
    }
    fn nu(&self, theta: Dual64) -> Dual64 {
        (theta + 1.0) * self.nu0
    }
    fn kappa(&self, theta: Dual64) -> Dual64 {
        (theta.powf(self.m) + 1.0) * self.kappa0
    }
}

/// Check the growth bounds mu_lo(1+t) <= mu <= mu_hi(1+t), 0 <= nu <= nu_hi(1+t),
/// kappa_lo(1+t^m) <= kappa <= kappa_hi(1+t^m) on sampled temperatures in (0, 1e3].
pub fn check_transport_bounds(
    law: &dyn TransportLaw,
    mu_bounds: (f64, f64),
    nu_hi: f64,
    kappa_bounds: (f64, f64),
    m: f64,
    samples: usize,
) -> Result<()> {
    let rel = 1e-12;
    for i in 0..samples {
        // log-uniform in (1e-6, 1e3]
        let t = 10f64.powf(-6.0 + 9.0 * (i + 1) as f64 / samples as f64);
        let th = Dual64::from(t);
        let (mu, nu, ka) = (law.mu(th).re, law.nu(th).re, law.kappa(th).re);
        let lin = 1.0 + t;
        let pw = 1.0 + t.powf(m);
        let bad = mu < mu_bounds.0 * lin * (1.0 - rel)
            || mu > mu_bounds.1 * lin * (1.0 + rel)
            || nu < 0.0
            || nu > nu_hi * lin * (1.0 + rel)
            || ka < kappa_bounds.0 * pw * (1.0 - rel)
            || ka > kappa_bounds.1 * pw * (1.0 + rel)
            || !(mu.is_finite() && nu.is_finite() && ka.is_finite());
        if bad {
            return Err(crate::Error::Closure(format!(
                "transport law violates growth bounds at theta = {t:e} (mu {mu:e}, nu {nu:e}, kappa {ka:e})"
            )));
        }
    }
    Ok(())
}

/// External wall temperature: `bottom` on y = 0, `top` on y = Ly, each modulated
/// by `amplitude * cos(2 pi x / Lx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallTemperature {
    pub bottom: f64,
    pub top: f64,
    pub amplitude: f64,
}

impl WallTemperature {
    pub fn uniform(t: f64) -> Self {
        Self {
            bottom: t,
            top: t,
            amplitude: 0.0,
        }
    }

    /// `top_wall` selects y = Ly. `phase` is x / Lx.
    pub fn eval(&self, phase: f64, top_wall: bool) -> f64 {
        let base = if top_wall { self.top } else { self.bottom };
        base + self.amplitude * (2.0 * std::f64::consts::PI * phase).cos()
    }

    /// Pointwise lower bound K0.
    pub fn lower_bound(&self) -> f64 {
        self.bottom.min(self.top) - self.amplitude.abs()
    }

    /// Mean over both walls.
    pub fn mean(&self) -> f64 {
        0.5 * (self.bottom + self.top)
    }
}

#[derive(Clone)]
pub struct MixtureParameters {
    pub gamma: f64,
    pub molar_masses: Vec<f64>,
    pub cv: Vec<f64>,
    pub m_exp: f64,
    pub a_exp: f64,
    pub mu0: f64,
    pub nu0: f64,
    pub kappa0: f64,
    pub m_total: f64,
    pub f_friction: f64,
    pub l_heat: f64,
    pub theta0: WallTemperature,
    /// Constant body force.
    pub force: [f64; 2],
    /// Overrides the power-law transport when set.
    pub transport_override: Option<Arc<dyn TransportLaw>>,
}

impl std::fmt::Debug for MixtureParameters {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MixtureParameters")
            .field("gamma", &self.gamma)
            .field("molar_masses", &self.molar_masses)
            .field("cv", &self.cv)
            .field("m_exp", &self.m_exp)
            .field("a_exp", &self.a_exp)
            .field("m_total", &self.m_total)
            .field("f_friction", &self.f_friction)
            .field("l_heat", &self.l_heat)
            .field("theta0", &self.theta0)
            .finish_non_exhaustive()
    }
}

impl Default for MixtureParameters {
    fn default() -> Self {
        Self {
            gamma: 1.5,
            molar_masses: vec![1.0, 1.0],
            cv: vec![1.5, 1.5],
            m_exp: 2.0,
            a_exp: 1.0,
            mu0: 1.0,
            nu0: 0.5,
            kappa0: 1.0,
            m_total: 1.0,
            f_friction: 1.0,
            l_heat: 1.0,
            theta0: WallTemperature {
                bottom: 1.0,
                top: 1.2,
                amplitude: 0.1,
            },
            force: [1.0, -0.5],
            transport_override: None,
        }
    }
}

impl MixtureParameters {
    pub fn n(&self) -> usize {
        self.cv.len()
    }

    pub fn cp(&self, k: usize) -> f64 {
        self.cv[k] + 1.0 / self.molar_masses[k]
    }

    pub fn equal_masses(&self) -> bool {
        self.molar_masses.iter().all(|&m| m == self.molar_masses[0])
    }

    pub fn power_law(&self) -> PowerLawTransport {
        PowerLawTransport {
            mu0: self.mu0,
            nu0: self.nu0,
            kappa0: self.kappa0,
            m: self.m_exp,
        }
    }

    pub fn mu<T: Real>(&self, theta: T) -> T {
        match &self.transport_override {
            Some(t) => T::from_dual(t.mu(theta.to_dual())),
            None => (theta + 1.0) * self.mu0,
        }
    }

    pub fn nu<T: Real>(&self, theta: T) -> T {
        match &self.transport_override {
            Some(t) => T::from_dual(t.nu(theta.to_dual())),
            None => (theta + 1.0) * self.nu0,
        }
    }

    pub fn kappa<T: Real>(&self, theta: T) -> T {
        match &self.transport_override {
            Some(t) => T::from_dual(t.kappa(theta.to_dual())),
            None => (theta.powf(self.m_exp) + 1.0) * self.kappa0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(config("at least one species is required"));
        }
        if self.molar_masses.len() != n {
            return Err(config("molar_masses and cv must have the same length"));
        }
        if !(self.gamma > 1.0) {
            return Err(config(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if self.molar_masses.iter().any(|&m| !(m > 0.0)) {
            return Err(config("molar masses must be positive"));
        }
        if self.cv.iter().any(|&c| !(c > 0.0)) {
            return Err(config("specific heats must be positive"));
        }
        if !(self.m_exp > 0.0) {
            return Err(config("m_exp must be positive"));
        }
        if !(self.a_exp >= 0.0) {
            return Err(config("a_exp must be non-negative"));
        }
        if !(self.m_total > 0.0) {
            return Err(config("total mass must be positive"));
        }
        if !(self.l_heat > 0.0) {
            return Err(config("L_heat must be positive"));
        }
        if !(self.theta0.lower_bound() > 0.0) {
            return Err(config(
                "wall temperature must be bounded below by a positive constant",
            ));
        }
        if !(self.mu0 > 0.0 && self.nu0 >= 0.0 && self.kappa0 > 0.0) {
            return Err(config(
                "transport prefactors must satisfy mu0 > 0, nu0 >= 0, kappa0 > 0",
            ));
        }
        if let Some(t) = &self.transport_override {
            check_transport_bounds(
                t.as_ref(),
                (self.mu0, self.mu0),
                self.nu0,
                (self.kappa0, self.kappa0),
                self.m_exp,
                200,
            )?;
        }
        Ok(())
    }
}

/// Pointwise state. `u` has d components.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSample {
    pub rho: f64,
    pub u: Vec<f64>,
    pub theta: f64,
    pub y: Vec<f64>,
}

impl StateSample {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn check(&self, on_simplex: bool) -> Result<()> {
        if !(self.rho >= 0.0) {
            return Err(domain(format!(
                "density must be non-negative, got {}",
                self.rho
            )));
        }
        if !(self.theta > 0.0) {
            return Err(domain(format!(
                "temperature must be positive, got {}",
                self.theta
            )));
        }
        if self.y.iter().any(|&y| !(0.0..=1.0).contains(&y)) {
            return Err(domain("mass fractions must lie in [0, 1]"));
        }
        if on_simplex && (self.y.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(domain("mass fractions do not sum to one"));
        }
        Ok(())
    }
}

/// Spatial gradients. `grad_u[i][j] = d u_i / d x_j`, `grad_y[k][j] = d Y_k / d x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub grad_rho: Vec<f64>,
    pub grad_u: Vec<Vec<f64>>,
    pub grad_theta: Vec<f64>,
    pub grad_y: Vec<Vec<f64>>,
}

impl GradientSample {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            grad_rho: vec![0.0; d],
            grad_u: vec![vec![0.0; d]; d],
            grad_theta: vec![0.0; d],
            grad_y: vec![vec![0.0; d]; n],
        }
    }

    pub fn div_u(&self) -> f64 {
        (0..self.grad_u.len()).map(|i| self.grad_u[i][i]).sum()
    }
}

// ---------- generic pointwise formulas ----------

pub fn cold_pressure_t<T: Real>(rho: T, gamma: f64) -> T {
    rho.powf(gamma)
}

pub fn cold_energy_t<T: Real>(rho: T, gamma: f64) -> T {
    rho.powf(gamma - 1.0) / (gamma - 1.0)
}

/// sum_k rho Y_k theta / m_k
pub fn molecular_pressure_t<T: Real>(rho: T, theta: T, y: &[T], masses: &[f64]) -> T {
    let mut s = T::zero();
    for (yk, mk) in y.iter().zip(masses) {
        s += *yk / *mk;
    }
    rho * theta * s
}

/// theta * sum_k cv_k Y_k
pub fn molecular_energy_t<T: Real>(theta: T, y: &[T], cv: &[f64]) -> T {
    let mut s = T::zero();
    for (yk, c) in y.iter().zip(cv) {
        s += *yk * *c;
    }
    theta * s
}

/// mu [grad u + grad u^T - (2/3) div u I] + nu div u I for a d x d gradient.
pub fn stress_t<T: Real, const D: usize>(mu: T, nu: T, gu: &[[T; D]; D]) -> [[T; D]; D] {
    let mut div = T::zero();
    for i in 0..D {
        div += gu[i][i];
    }
    let iso = nu * div - mu * div * (2.0 / 3.0);
    let mut s = [[T::zero(); D]; D];
    for i in 0..D {
        for j in 0..D {
            s[i][j] = mu * (gu[i][j] + gu[j][i]);
        }
        s[i][i] += iso;
    }
    s
}

// ---------- kernel operations on f64 samples ----------

/// pi = rho^gamma + sum_k rho Y_k theta / m_k
pub fn pressure(s: &StateSample, p: &MixtureParameters) -> f64 {
    cold_pressure_t(s.rho, p.gamma) + molecular_pressure_t(s.rho, s.theta, &s.y, &p.molar_masses)
}

/// e = rho^(gamma-1)/(gamma-1) + theta sum_k cv_k Y_k
pub fn internal_energy(s: &StateSample, p: &MixtureParameters) -> f64 {
    cold_energy_t(s.rho, p.gamma) + molecular_energy_t(s.theta, &s.y, &p.cv)
}

pub fn total_energy(s: &StateSample, p: &MixtureParameters) -> f64 {
    0.5 * s.u.iter().map(|v| v * v).sum::<f64>() + internal_energy(s, p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesThermo {
    pub h: Vec<f64>,
    pub s: Vec<f64>,
    pub g: Vec<f64>,
    pub h_mix: f64,
    pub s_mix: f64,
    pub g_mix: f64,
}

/// Enthalpies h_k = cp_k theta, entropies s_k = cv_k log theta - (1/m_k) log(rho Y_k / m_k),
/// Gibbs functions g_k = h_k - theta s_k, and their Y-weighted mixture values.
pub fn species_thermo(s: &StateSample, p: &MixtureParameters) -> Result<SpeciesThermo> {
    let n = p.n();
    let (mut h, mut se, mut g) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in 0..n {
        let arg = s.rho * s.y[k] / p.molar_masses[k];
        if !(arg > 0.0) {
            return Err(domain(format!("species entropy needs rho Y_{k} > 0")));
        }
        if !(s.theta > 0.0) {
            return Err(domain("species entropy needs theta > 0"));
        }
        h[k] = p.cp(k) * s.theta;
        se[k] = p.cv[k] * s.theta.ln() - arg.ln() / p.molar_masses[k];
        g[k] = h[k] - s.theta * se[k];
    }
    let wsum = |v: &[f64]| v.iter().zip(&s.y).map(|(a, y)| a * y).sum::<f64>();
    Ok(SpeciesThermo {
        h_mix: wsum(&h),
        s_mix: wsum(&se),
        g_mix: wsum(&g),
        h,
        s: se,
        g,
    })
}

fn stress_dyn(mu: f64, nu: f64, gu: &[Vec<f64>]) -> Vec<Vec<f64>> {
    match gu.len() {
        2 => {
            let a = [[gu[0][0], gu[0][1]], [gu[1][0], gu[1][1]]];
            stress_t(mu, nu, &a).iter().map(|r| r.to_vec()).collect()
        }
        3 => {
            let mut a = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] = gu[i][j];
                }
            }
            stress_t(mu, nu, &a).iter().map(|r| r.to_vec()).collect()
        }
        d => panic!("unsupported spatial dimension {d}"),
    }
}

/// Viscous stress with mu(theta), nu(theta) from the parameter set.
pub fn stress(theta: f64, grad_u: &[Vec<f64>], p: &MixtureParameters) -> Vec<Vec<f64>> {
    stress_dyn(p.mu(theta), p.nu(theta), grad_u)
}

/// Q = sum_k h_k F_k - kappa(theta) grad theta
pub fn heat_flux(
    s: &StateSample,
    g: &GradientSample,
    fluxes: &[Vec<f64>],
    p: &MixtureParameters,
) -> Vec<f64> {
    let kappa = p.kappa(s.theta);
    let mut q: Vec<f64> = g.grad_theta.iter().map(|t| -kappa * t).collect();
    for (k, fk) in fluxes.iter().enumerate() {
        let hk = p.cp(k) * s.theta;
        for (qj, fj) in q.iter_mut().zip(fk) {
            *qj += hk * fj;
        }
    }
    q
}

/// d_k = grad p_k / pi_m - Y_k grad pi_m / pi_m with p_k = rho Y_k theta / m_k.
/// With equal molar masses on the simplex this is exactly grad Y_k, which is
/// what is returned in that case.
pub fn driving_forces(
    s: &StateSample,
    g: &GradientSample,
    p: &MixtureParameters,
) -> Result<Vec<Vec<f64>>> {
    if !(s.rho > 0.0 && s.theta > 0.0) {
        return Err(domain("driving forces need rho > 0 and theta > 0"));
    }
    if p.equal_masses() {
        return Ok(g.grad_y.clone());
    }
    let n = p.n();
    let d = s.dim();
    let pi_m = molecular_pressure_t(s.rho, s.theta, &s.y, &p.molar_masses);
    if !(pi_m > 0.0) {
        return Err(domain("molecular pressure vanishes"));
    }
    let grad_pk: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..d)
                .map(|j| {
                    (s.y[k] * s.theta * g.grad_rho[j]
                        + s.rho * s.theta * g.grad_y[k][j]
                        + s.rho * s.y[k] * g.grad_theta[j])
                        / p.molar_masses[k]
                })
                .collect()
        })
        .collect();
    let grad_pi: Vec<f64> = (0..d).map(|j| grad_pk.iter().map(|v| v[j]).sum()).collect();
    Ok((0..n)
        .map(|k| {
            (0..d)
                .map(|j| (grad_pk[k][j] - s.y[k] * grad_pi[j]) / pi_m)
                .collect()
        })
        .collect())
}

/// Non-diagonal: F_k = -sum_l Y_k D_kl d_l. Fick: F_k = -D grad Y_k.
pub fn diffusion_flux(
    s: &StateSample,
    g: &GradientSample,
    closure: &DiffusionClosure,
    p: &MixtureParameters,
) -> Result<Vec<Vec<f64>>> {
    let d = s.dim();
    let n = p.n();
    match closure.kind {
        DiffusionKind::Fick => {
            let dd = closure.fick_coefficient(s.theta);
            Ok(g.grad_y
                .iter()
                .map(|gy| gy.iter().map(|v| -dd * v).collect())
                .collect())
        }
        DiffusionKind::Nondiagonal => {
            if n == 1 {
                return Ok(vec![vec![0.0; d]]);
            }
            let dm = closure.matrix(s.theta, &s.y)?;
            let df = driving_forces(s, g, p)?;
            Ok((0..n)
                .map(|k| {
                    (0..d)
                        .map(|j| -(0..n).map(|l| s.y[k] * dm[k][l] * df[l][j]).sum::<f64>())
                        .collect()
                })
                .collect())
        }
    }
}

/// Both forms of the entropy production rate and the four terms of the
/// partial-pressure form (viscous, conductive, diffusive, reactive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyProduction {
    pub gibbs: f64,
    pub partial_pressure: f64,
    pub terms: [f64; 4],
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// grad(g_k / theta) = -cv_k grad theta / theta + (1/m_k)(grad rho / rho + grad Y_k / Y_k)
pub fn grad_gibbs_over_theta(
    s: &StateSample,
    g: &GradientSample,
    p: &MixtureParameters,
    k: usize,
) -> Vec<f64> {
    (0..s.dim())
        .map(|j| {
            -p.cv[k] * g.grad_theta[j] / s.theta
                + (g.grad_rho[j] / s.rho + g.grad_y[k][j] / s.y[k]) / p.molar_masses[k]
        })
        .collect()
}

/// Entropy production in the Gibbs-gradient form
/// S:grad u/theta - Q.grad theta/theta^2 - sum F_k.grad(g_k/theta) - sum m_k g_k w_k/theta
/// and in the partial-pressure form
/// S:grad u/theta + kappa|grad theta|^2/theta^2 - sum (F_k/m_k).grad log p_k - sum m_k g_k w_k/theta.
pub fn entropy_production(
    s: &StateSample,
    g: &GradientSample,
    fluxes: &[Vec<f64>],
    omega: &[f64],
    p: &MixtureParameters,
) -> Result<EntropyProduction> {
    if !(s.rho > 0.0) || s.y.iter().any(|&y| !(y > 0.0)) {
        return Err(domain(
            "entropy production needs rho > 0 and Y in the open simplex",
        ));
    }
    let th = species_thermo(s, p)?;
    let n = p.n();
    let sm = stress(s.theta, &g.grad_u, p);
    let visc: f64 = (0..s.dim()).map(|i| dot(&sm[i], &g.grad_u[i])).sum::<f64>() / s.theta;
    let react: f64 = -(0..n)
        .map(|k| p.molar_masses[k] * th.g[k] * omega[k])
        .sum::<f64>()
        / s.theta;

    let q = heat_flux(s, g, fluxes, p);
    let mut gibbs = visc - dot(&q, &g.grad_theta) / (s.theta * s.theta) + react;
    for k in 0..n {
        gibbs -= dot(&fluxes[k], &grad_gibbs_over_theta(s, g, p, k));
    }

    let cond = p.kappa(s.theta) * dot(&g.grad_theta, &g.grad_theta) / (s.theta * s.theta);
    let mut diff = 0.0;
    for k in 0..n {
        let glogp: Vec<f64> = (0..s.dim())
            .map(|j| g.grad_rho[j] / s.rho + g.grad_y[k][j] / s.y[k] + g.grad_theta[j] / s.theta)
            .collect();
        diff -= dot(&fluxes[k], &glogp) / p.molar_masses[k];
    }
    let terms = [visc, cond, diff, react];
    Ok(EntropyProduction {
        gibbs,
        partial_pressure: terms.iter().sum(),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_species(gamma: f64) -> MixtureParameters {
        MixtureParameters {
            gamma,
            molar_masses: vec![1.0],
            cv: vec![1.0],
            ..Default::default()
        }
    }

    fn st(rho: f64, theta: f64, y: Vec<f64>) -> StateSample {
        StateSample {
            rho,
            u: vec![0.0, 0.0],
            theta,
            y,
        }
    }

    #[test]
    fn pressure_examples() {
        assert_eq!(pressure(&st(1.0, 1.0, vec![1.0]), &one_species(2.0)), 2.0);
        assert_eq!(pressure(&st(0.0, 3.0, vec![1.0]), &one_species(2.0)), 0.0);
        let p = MixtureParameters {
            gamma: 1.5,
            molar_masses: vec![1.0, 1.0],
            ..Default::default()
        };
        let s = st(2.0, 3.0, vec![0.25, 0.75]);
        let cold = 2f64.powf(1.5);
        let molecular = 2.0 * 0.25 * 3.0 + 2.0 * 0.75 * 3.0;
        assert_relative_eq!(pressure(&s, &p), cold + molecular, max_relative = 1e-15);
        assert_relative_eq!(pressure(&s, &p), 8.8284271, epsilon = 1e-7);
    }

    #[test]
    fn energy_examples() {
        let p = one_species(2.0);
        assert_eq!(internal_energy(&st(1.0, 1.0, vec![1.0]), &p), 2.0);
        let s = st(1.3, 0.7, vec![1.0]);
        assert_eq!(total_energy(&s, &p), internal_energy(&s, &p));
        let p2 = MixtureParameters {
            gamma: 2.0,
            molar_masses: vec![1.0, 1.0],
            cv: vec![1.0, 2.0],
            ..Default::default()
        };
        assert_relative_eq!(
            internal_energy(&st(1.0, 1.0, vec![0.5, 0.5]), &p2),
            2.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn species_thermo_examples() {
        let p = one_species(2.0);
        let t = species_thermo(&st(1.0, 1.0, vec![1.0]), &p).unwrap();
        assert_eq!(t.s[0], 0.0);
        assert_eq!(t.g[0], t.h[0]);
        assert_eq!(t.h[0], p.cp(0));
        let p = MixtureParameters {
            molar_masses: vec![1.0],
            cv: vec![1.5],
            ..Default::default()
        };
        let t = species_thermo(&st(0.8, 2.0, vec![1.0]), &p).unwrap();
        assert_relative_eq!(t.h[0], 5.0, max_relative = 1e-15);
        assert!(
            species_thermo(&st(1.0, 1.0, vec![0.0, 1.0]), &MixtureParameters::default()).is_err()
        );
    }

    #[test]
    fn stress_examples() {
        let p = MixtureParameters::default();
        let z = stress(1.0, &[vec![0.0; 2], vec![0.0; 2]], &p);
        assert!(z.iter().flatten().all(|&v| v == 0.0));
        let id3 = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let s = stress(0.5, &id3, &p);
        let nu = p.nu(0.5);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 3.0 * nu } else { 0.0 };
                assert_relative_eq!(s[i][j], want, epsilon = 1e-14);
            }
        }
        let shear = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        let s = stress(1.0, &shear, &p);
        let mu = p.mu(1.0);
        assert_eq!(s, vec![vec![0.0, mu], vec![mu, 0.0]]);
    }

    #[test]
    fn heat_flux_examples() {
        let p = MixtureParameters {
            kappa0: 1.0,
            m_exp: 2.0,
            ..Default::default()
        };
        let s = st(1.0, 1.0, vec![0.5, 0.5]);
        let mut g = GradientSample::zeros(2, 2);
        let zero_f = vec![vec![0.0; 2]; 2];
        assert_eq!(heat_flux(&s, &g, &zero_f, &p), vec![0.0, 0.0]);
        g.grad_theta = vec![1.0, 0.0];
        assert_eq!(heat_flux(&s, &g, &zero_f, &p), vec![-2.0, 0.0]);
    }

    #[test]
    fn driving_forces_equal_masses_is_grad_y() {
        let p = MixtureParameters::default();
        let s = st(1.2, 0.9, vec![0.3, 0.7]);
        let mut g = GradientSample::zeros(2, 2);
        g.grad_y = vec![vec![0.4, -0.1], vec![-0.4, 0.1]];
        g.grad_rho = vec![0.3, 0.2];
        assert_eq!(driving_forces(&s, &g, &p).unwrap(), g.grad_y);
        g.grad_y = vec![vec![0.0; 2]; 2];
        assert!(driving_forces(&s, &g, &p)
            .unwrap()
            .iter()
            .flatten()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn pure_shear_production() {
        let p = MixtureParameters {
            mu0: 1.0,
            ..Default::default()
        };
        let s = st(1.0, 1.0, vec![0.5, 0.5]);
        let mut g = GradientSample::zeros(2, 2);
        g.grad_u = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        let f = vec![vec![0.0; 2]; 2];
        let e = entropy_production(&s, &g, &f, &[0.0, 0.0], &p).unwrap();
        // S = mu (grad u + grad u^T) for this traceless shear, so S : grad u = mu(1) = 2
        assert_relative_eq!(e.gibbs, 2.0, max_relative = 1e-15);
        assert_relative_eq!(e.partial_pressure, 2.0, max_relative = 1e-15);
        let g0 = GradientSample::zeros(2, 2);
        let e0 = entropy_production(&s, &g0, &f, &[0.0, 0.0], &p).unwrap();
        assert_eq!(e0.gibbs, 0.0);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(MixtureParameters::default().validate().is_ok());
        let bad = MixtureParameters {
            gamma: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MixtureParameters {
            theta0: WallTemperature {
                bottom: 0.05,
                top: 1.0,
                amplitude: 0.1,
            },
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn power_law_meets_bounds() {
        let p = MixtureParameters::default();
        let law = p.power_law();
        check_transport_bounds(
            &law,
            (p.mu0, p.mu0),
            p.nu0,
            (p.kappa0, p.kappa0),
            p.m_exp,
            1000,
        )
        .unwrap();
        assert_relative_eq!(law.kappa(Dual64::from(1.0)).re, p.kappa(1.0));
    }
}
