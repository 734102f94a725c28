//! Pointwise identities of the constitutive kernel checked on random states:
//! the two forms of the entropy production rate and the Gibbs relation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closures::{production_rates, random_simplex, DiffusionClosure, ReactionClosure};
use crate::error::Result;
use crate::mixture::{
    diffusion_flux, entropy_production, internal_energy, pressure, species_thermo, GradientSample,
    MixtureParameters, StateSample,
};

/// Random state with rho in [0.05, 5], log-uniform theta in [1e-2, 10], Y in the
/// open simplex, and random on-simplex gradients.
pub fn random_state(rng: &mut impl Rng, n: usize, d: usize) -> (StateSample, GradientSample) {
    let rho = rng.gen_range(0.05..5.0);
    let theta = 10f64.powf(rng.gen_range(-2.0..1.0));
    let floor = 10f64.powf(rng.gen_range(-4.0..-1.5)).min(0.5 / n as f64);
    let y = random_simplex(rng, n, floor);
    let u = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut g = GradientSample::zeros(n, d);
    for j in 0..d {
        g.grad_rho[j] = rng.gen_range(-1.0..1.0);
        g.grad_theta[j] = rng.gen_range(-1.0..1.0);
        for i in 0..d {
            g.grad_u[i][j] = rng.gen_range(-1.0..1.0);
        }
        for k in 0..n - 1 {
            g.grad_y[k][j] = rng.gen_range(-1.0..1.0) * y[k];
        }
        g.grad_y[n - 1][j] = -(0..n - 1).map(|k| g.grad_y[k][j]).sum::<f64>();
    }
    (StateSample { rho, u, theta, y }, g)
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ProductionCheck {
    pub samples: usize,
    /// max |sigma_gibbs - sigma_pp| / max(1, sigma_pp)
    pub max_relative_gap: f64,
    /// min over samples and the four partial-pressure terms
    pub min_term: f64,
}

/// Both entropy-production forms on `samples` random states for one closure.
pub fn production_identity(
    p: &MixtureParameters,
    closure: &DiffusionClosure,
    react: &ReactionClosure,
    samples: usize,
    seed: u64,
) -> Result<ProductionCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ProductionCheck {
        samples,
        max_relative_gap: 0.0,
        min_term: f64::INFINITY,
    };
    for _ in 0..samples {
        let (s, g) = random_state(&mut rng, p.n(), 2);
        let f = diffusion_flux(&s, &g, closure, p)?;
        let w = production_rates(&s, p, react)?;
        let e = entropy_production(&s, &g, &f, &w, p)?;
        let gap = (e.gibbs - e.partial_pressure).abs() / e.partial_pressure.abs().max(1.0);
        out.max_relative_gap = out.max_relative_gap.max(gap);
        out.min_term = e.terms.iter().fold(out.min_term, |a, &t| a.min(t));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct GibbsCheck {
    pub samples: usize,
    /// max |theta Ds - De - pi D(1/rho) + sum g_k DY_k| / max(1, sum of magnitudes)
    pub max_residual: f64,
}

fn entropy_energy(s: &StateSample, p: &MixtureParameters) -> Result<(f64, f64)> {
    Ok((species_thermo(s, p)?.s_mix, internal_energy(s, p)))
}

/// Central-difference audit of theta Ds = De + pi D(1/rho) - sum_k g_k DY_k along
/// random directions in (rho, theta, Y). Y is varied freely (not on the simplex).
pub fn gibbs_relation(
    p: &MixtureParameters,
    samples: usize,
    seed: u64,
    h: f64,
) -> Result<GibbsCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n();
    let mut out = GibbsCheck {
        samples,
        max_residual: 0.0,
    };
    for _ in 0..samples {
        let (s, _) = random_state(&mut rng, n, 2);
        let dr = rng.gen_range(-1.0..1.0) * s.rho;
        let dt = rng.gen_range(-1.0..1.0) * s.theta;
        let dy: Vec<f64> = s.y.iter().map(|y| rng.gen_range(-1.0..1.0) * y).collect();
        let shifted = |t: f64| StateSample {
            rho: s.rho + t * dr,
            theta: s.theta + t * dt,
            y: s.y.iter().zip(&dy).map(|(y, d)| y + t * d).collect(),
            u: s.u.clone(),
        };
        let (sp, ep) = entropy_energy(&shifted(h), p)?;
        let (sm, em) = entropy_energy(&shifted(-h), p)?;
        let ds = (sp - sm) / (2.0 * h);
        let de = (ep - em) / (2.0 * h);
        let th = species_thermo(&s, p)?;
        let pi = pressure(&s, p);
        let dinv = -dr / (s.rho * s.rho);
        let gdy: f64 = th.g.iter().zip(&dy).map(|(g, d)| g * d).sum();
        let lhs = s.theta * ds;
        let rhs = de + pi * dinv - gdy;
        let scale = lhs.abs()
            + de.abs()
            + (pi * dinv).abs()
            + th.g
                .iter()
                .zip(&dy)
                .map(|(g, d)| (g * d).abs())
                .sum::<f64>();
        out.max_residual = out.max_residual.max((lhs - rhs).abs() / scale.max(1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_production_sweep() {
        let p = MixtureParameters::default();
        let r = ReactionClosure::chain(2, 1.0);
        for c in [
            DiffusionClosure::nondiagonal(1.0, 1.0),
            DiffusionClosure::fick(1.0, 1.0),
        ] {
            let chk = production_identity(&p, &c, &r, 50, 1).unwrap();
            assert!(chk.max_relative_gap < 1e-10, "{chk:?}");
            assert!(chk.min_term >= -1e-10, "{chk:?}");
        }
    }

    #[test]
    fn gibbs_relation_with_unequal_masses() {
        let p = MixtureParameters {
            molar_masses: vec![1.0, 2.5],
            cv: vec![1.5, 0.9],
            ..Default::default()
        };
        let chk = gibbs_relation(&p, 50, 2, 1e-6).unwrap();
        assert!(chk.max_residual < 1e-6, "{chk:?}");
    }
}
