//! Diffusion-matrix and reaction-rate closures, their regularized forms, and
//! sampling-based validation.

use std::sync::Arc;

use num_dual::Dual64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{
    diffusion_flux, species_thermo, GradientSample, MixtureParameters, StateSample,
};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionKind {
    Nondiagonal,
    Fick,
}

/// User-supplied diffusion matrix D(theta, Y).
pub trait DiffusionMatrixLaw: Send + Sync {
    fn matrix(&self, theta: Dual64, y: &[Dual64]) -> Vec<Vec<Dual64>>;
}

#[derive(Clone)]
pub struct DiffusionClosure {
    pub kind: DiffusionKind,
    pub d0: f64,
    pub a_exp: f64,
    pub user: Option<Arc<dyn DiffusionMatrixLaw>>,
}

impl std::fmt::Debug for DiffusionClosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffusionClosure")
            .field("kind", &self.kind)
            .field("d0", &self.d0)
            .field("a_exp", &self.a_exp)
            .field("user", &self.user.is_some())
            .finish()
    }
}

impl DiffusionClosure {
    pub fn nondiagonal(d0: f64, a_exp: f64) -> Self {
        Self {
            kind: DiffusionKind::Nondiagonal,
            d0,
            a_exp,
            user: None,
        }
    }

    pub fn fick(d0: f64, a_exp: f64) -> Self {
        Self {
            kind: DiffusionKind::Fick,
            d0,
            a_exp,
            user: None,
        }
    }

    /// d(theta) = d0 (1 + theta^a)
    pub fn scale<T: Real>(&self, theta: T) -> T {
        (theta.powf(self.a_exp) + 1.0) * self.d0
    }

    pub fn fick_coefficient(&self, theta: f64) -> f64 {
        self.scale(theta)
    }

    /// D(theta, Y). Built-in family D_kl = d(theta)(delta_kl / Y_k - 1/sigma_Y).
    /// For the Fick closure this returns the equivalent diagonal D delta_kl / Y_k,
    /// which reproduces F_k = -D grad Y_k through F_k = -sum_l Y_k D_kl grad Y_l.
    pub fn matrix_t<T: Real>(&self, theta: T, y: &[T]) -> Vec<Vec<T>> {
        let n = y.len();
        if let (Some(u), DiffusionKind::Nondiagonal) = (&self.user, self.kind) {
            let yd: Vec<Dual64> = y.iter().map(|v| v.to_dual()).collect();
            return u
                .matrix(theta.to_dual(), &yd)
                .into_iter()
                .map(|row| row.into_iter().map(T::from_dual).collect())
                .collect();
        }
        let d = self.scale(theta);
        let mut m = vec![vec![T::zero(); n]; n];
        match self.kind {
            DiffusionKind::Nondiagonal => {
                let mut sigma = T::zero();
                for v in y {
                    sigma += *v;
                }
                let off = d / sigma;
                for k in 0..n {
                    for l in 0..n {
                        m[k][l] = -off;
                    }
                    m[k][k] += d / y[k];
                }
            }
            DiffusionKind::Fick => {
                for k in 0..n {
                    m[k][k] = d / y[k];
                }
            }
        }
        m
    }

    pub fn matrix(&self, theta: f64, y: &[f64]) -> Result<Vec<Vec<f64>>> {
        if y.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Domain("diffusion matrix needs Y_k > 0".into()));
        }
        Ok(self.matrix_t(theta, y))
    }
}

/// D_hat = D / (sigma_Y + eps)^r
pub fn regularized_matrix(
    theta: f64,
    y: &[f64],
    eps: f64,
    r: f64,
    c: &DiffusionClosure,
) -> Result<Vec<Vec<f64>>> {
    let sigma: f64 = y.iter().sum();
    let f = (sigma + eps).powf(-r);
    Ok(c.matrix(theta, y)?
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * f).collect())
        .collect())
}

/// Outcome of the structural checks on one matrix sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct MatrixCheck {
    pub asymmetry: f64,
    /// max_k |(D Y)_k| relative to max |D_kl|
    pub null_y: f64,
    /// min over probes of <Dx,x> / |x|^2 (>= 0 means PSD on the probes)
    pub min_quadratic: f64,
    /// min over probes in U-perp of <Dx,x> / <Y^-1 x, x>
    pub coercivity: f64,
}

/// Symmetry, D Y = 0, positive semidefiniteness and the lower bound
/// delta <Y^-1 x, x> <= <Dx, x> on U-perp, probed on the coordinate basis, the
/// centred coordinate basis and `random_probes` random directions.
pub fn check_matrix(
    dm: &[Vec<f64>],
    y: &[f64],
    rng: &mut impl Rng,
    random_probes: usize,
) -> MatrixCheck {
    let n = y.len();
    let scale = dm
        .iter()
        .flatten()
        .fold(0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut c = MatrixCheck {
        min_quadratic: f64::INFINITY,
        coercivity: f64::INFINITY,
        ..Default::default()
    };
    for k in 0..n {
        for l in 0..n {
            c.asymmetry = c.asymmetry.max((dm[k][l] - dm[l][k]).abs() / scale);
        }
        let dy: f64 = (0..n).map(|l| dm[k][l] * y[l]).sum();
        c.null_y = c.null_y.max(dy.abs() / scale);
    }
    let quad = |x: &[f64]| -> f64 {
        (0..n)
            .map(|k| x[k] * (0..n).map(|l| dm[k][l] * x[l]).sum::<f64>())
            .sum()
    };
    let mut probes: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        probes.push(e);
    }
    for _ in 0..random_probes {
        probes.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    for x in &probes {
        let nx: f64 = x.iter().map(|v| v * v).sum();
        if nx > 0.0 {
            c.min_quadratic = c.min_quadratic.min(quad(x) / nx);
        }
        let mean = x.iter().sum::<f64>() / n as f64;
        let xp: Vec<f64> = x.iter().map(|v| v - mean).collect();
        let w: f64 = xp.iter().zip(y).map(|(v, yk)| v * v / yk).sum();
        if w > 1e-14 {
            c.coercivity = c.coercivity.min(quad(&xp) / w);
        }
    }
    c
}

/// Validate a closure's matrix at one state; the user-law path of the checks.
pub fn validate_matrix_at(
    c: &DiffusionClosure,
    theta: f64,
    y: &[f64],
    rng: &mut impl Rng,
) -> Result<MatrixCheck> {
    let dm = c.matrix(theta, y)?;
    if dm.len() != y.len() || dm.iter().any(|r| r.len() != y.len()) {
        return Err(Error::Closure(
            "diffusion matrix has the wrong shape".into(),
        ));
    }
    if dm.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Closure(
            "diffusion matrix has non-finite entries".into(),
        ));
    }
    let chk = check_matrix(&dm, y, rng, 4);
    if c.kind == DiffusionKind::Nondiagonal {
        if chk.asymmetry > 1e-12 {
            return Err(Error::Closure(format!(
                "diffusion matrix not symmetric ({:e})",
                chk.asymmetry
            )));
        }
        if chk.null_y > 1e-13 {
            return Err(Error::Closure(format!("D Y != 0 ({:e})", chk.null_y)));
        }
        if chk.min_quadratic < -1e-12 {
            return Err(Error::Closure(
                "diffusion matrix not positive semidefinite".into(),
            ));
        }
        if !(chk.coercivity > 0.0) {
            return Err(Error::Closure(
                "diffusion matrix not coercive on U-perp".into(),
            ));
        }
    }
    Ok(chk)
}

/// User-supplied reaction rates omega(rho, theta, Y).
pub trait RateLaw: Send + Sync {
    fn rates(&self, rho: Dual64, theta: Dual64, y: &[Dual64]) -> Vec<Dual64>;
}

/// Pairwise exchange reactions i <-> j with rate K(theta) = K0 theta / (1 + theta):
/// omega_i += K (Y_j - Y_i) / m_i, omega_j -= K (Y_j - Y_i) / m_j.
#[derive(Clone)]
pub struct ReactionClosure {
    pub k0: f64,
    pub pairs: Vec<(usize, usize)>,
    pub r_exp: f64,
    pub user: Option<Arc<dyn RateLaw>>,
}

impl std::fmt::Debug for ReactionClosure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReactionClosure")
            .field("k0", &self.k0)
            .field("pairs", &self.pairs)
            .field("r_exp", &self.r_exp)
            .field("user", &self.user.is_some())
            .finish()
    }
}

impl ReactionClosure {
    /// Chain of neighbouring pairs (0,1), (1,2), ...
    pub fn chain(n: usize, k0: f64) -> Self {
        Self {
            k0,
            pairs: (1..n).map(|k| (k - 1, k)).collect(),
            r_exp: 1.0,
            user: None,
        }
    }

    pub fn rate_constant<T: Real>(&self, theta: T) -> T {
        theta * self.k0 / (theta + 1.0)
    }

    pub fn rates_t<T: Real>(&self, rho: T, theta: T, y: &[T], masses: &[f64]) -> Vec<T> {
        if let Some(u) = &self.user {
            let yd: Vec<Dual64> = y.iter().map(|v| v.to_dual()).collect();
            return u
                .rates(rho.to_dual(), theta.to_dual(), &yd)
                .into_iter()
                .map(T::from_dual)
                .collect();
        }
        let k = self.rate_constant(theta);
        let mut w = vec![T::zero(); y.len()];
        for &(i, j) in &self.pairs {
            let r = k * (y[j] - y[i]);
            w[i] += r / masses[i];
            w[j] -= r / masses[j];
        }
        w
    }

    /// Bound C in omega_k >= -C Y_k^r for the built-in family (r = 1).
    pub fn lower_bound_constant(&self, masses: &[f64]) -> f64 {
        let mmin = masses.iter().cloned().fold(f64::INFINITY, f64::min);
        let deg = (0..masses.len())
            .map(|k| {
                self.pairs
                    .iter()
                    .filter(|&&(i, j)| i == k || j == k)
                    .count()
            })
            .max()
            .unwrap_or(0);
        self.k0 * deg as f64 / mmin
    }

    /// Structural requirements that make sum m_k g_k omega_k <= 0 hold for the
    /// built-in family: each reacting pair shares cv and molar mass, so that
    /// g_i - g_j = theta log(Y_i/Y_j) / m.
    pub fn validate(&self, p: &MixtureParameters) -> Result<()> {
        let n = p.n();
        if !(self.k0 >= 0.0) {
            return Err(Error::Closure(
                "reaction prefactor must be non-negative".into(),
            ));
        }
        for &(i, j) in &self.pairs {
            if i >= n || j >= n || i == j {
                return Err(Error::Closure(format!("invalid reacting pair ({i}, {j})")));
            }
            if self.user.is_none() && (p.cv[i] != p.cv[j] || p.molar_masses[i] != p.molar_masses[j])
            {
                return Err(Error::Closure(format!(
                    "reacting pair ({i}, {j}) must share cv and molar mass for the dissipation inequality"
                )));
            }
        }
        Ok(())
    }
}

/// omega for a pointwise state.
pub fn production_rates(
    s: &StateSample,
    p: &MixtureParameters,
    c: &ReactionClosure,
) -> Result<Vec<f64>> {
    let w = c.rates_t(s.rho, s.theta, &s.y, &p.molar_masses);
    if c.user.is_some() {
        let bal: f64 = w.iter().zip(&p.molar_masses).map(|(a, m)| a * m).sum();
        let scale = w.iter().fold(1f64, |a, v| a.max(v.abs()));
        if bal.abs() > 1e-12 * scale {
            return Err(Error::Closure(format!(
                "user rates violate sum m_k omega_k = 0 ({bal:e})"
            )));
        }
    }
    Ok(w)
}

/// Worst-case statistics from a randomized closure sweep.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub max_asymmetry: f64,
    pub max_null_y: f64,
    pub min_quadratic: f64,
    /// min of <Dx,x>/<Y^-1 x,x> / d(theta) over U-perp probes; >= 1 means the
    /// lower bound holds with delta = d0.
    pub min_coercivity_ratio: f64,
    pub max_flux_sum: f64,
    pub max_fick_flux_sum: f64,
    pub max_mass_weighted_rate_sum: f64,
    pub max_gibbs_rate_sum: f64,
    pub min_rate_lower_bound_margin: f64,
    /// max |Y_i D_ij| / (1 + theta^a)
    pub growth_constant: f64,
    pub min_fick_ratio: f64,
}

impl SweepReport {
    pub fn passes(&self) -> bool {
        self.max_asymmetry <= 1e-12
            && self.max_null_y <= 1e-13
            && self.min_quadratic >= -1e-12
            && self.min_coercivity_ratio >= 1.0 - 1e-10
            && self.max_flux_sum <= 1e-12
            && self.max_fick_flux_sum <= 1e-12
            && self.max_mass_weighted_rate_sum <= 1e-14
            && self.max_gibbs_rate_sum <= 1e-12
            && self.min_rate_lower_bound_margin >= -1e-14
            && self.min_fick_ratio >= 1.0 - 1e-12
            && self.growth_constant.is_finite()
    }
}

/// Random point in the open simplex, bounded away from the faces by `floor`.
pub fn random_simplex(rng: &mut impl Rng, n: usize, floor: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(1e-12..1.0f64)).ln())
        .collect();
    let s: f64 = w.iter().sum();
    let mut y: Vec<f64> = w
        .iter()
        .map(|v| floor + (1.0 - n as f64 * floor) * v / s)
        .collect();
    // put the rounding residue on the largest entry so the sum is 1 to ~1 ulp
    let kmax = (0..n).fold(0, |a, k| if y[k] > y[a] { k } else { a });
    let rest: f64 = (0..n).filter(|&k| k != kmax).map(|k| y[k]).sum();
    y[kmax] = 1.0 - rest;
    y
}

/// Randomized sweep of both diffusion closures and the reaction closure over
/// theta in (0, 100] and Y in the open simplex.
pub fn closure_sweep(
    p: &MixtureParameters,
    nondiag: &DiffusionClosure,
    fick: &DiffusionClosure,
    react: &ReactionClosure,
    samples: usize,
    seed: u64,
) -> Result<SweepReport> {
    react.validate(p)?;
    let n = p.n();
    let d = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = SweepReport {
        samples,
        min_quadratic: f64::INFINITY,
        min_coercivity_ratio: f64::INFINITY,
        min_rate_lower_bound_margin: f64::INFINITY,
        min_fick_ratio: f64::INFINITY,
        ..Default::default()
    };
    let cw = react.lower_bound_constant(&p.molar_masses);
    for _ in 0..samples {
        let theta = rng.gen_range(1e-3..=100.0);
        let floor = 10f64.powf(rng.gen_range(-6.0..-2.0));
        let y = random_simplex(&mut rng, n, floor);
        let rho = rng.gen_range(0.05..5.0);

        let dm = nondiag.matrix(theta, &y)?;
        let chk = check_matrix(&dm, &y, &mut rng, 3);
        let dth = nondiag.scale(theta);
        r.max_asymmetry = r.max_asymmetry.max(chk.asymmetry);
        r.max_null_y = r.max_null_y.max(chk.null_y);
        r.min_quadratic = r.min_quadratic.min(chk.min_quadratic / dth);
        r.min_coercivity_ratio = r.min_coercivity_ratio.min(chk.coercivity / dth);
        let growth = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (y[i] * dm[i][j]).abs())
            .fold(0f64, f64::max)
            / (1.0 + theta.powf(nondiag.a_exp));
        r.growth_constant = r.growth_constant.max(growth / nondiag.d0);

        let fd = fick.fick_coefficient(theta);
        r.min_fick_ratio = r.min_fick_ratio.min(fd / fick.d0);

        // on-simplex gradients: the last row closes the sum
        let mut g = GradientSample::zeros(n, d);
        for k in 0..n - 1 {
            for j in 0..d {
                g.grad_y[k][j] = rng.gen_range(-1.0..1.0);
            }
        }
        for j in 0..d {
            g.grad_y[n - 1][j] = -(0..n - 1).map(|k| g.grad_y[k][j]).sum::<f64>();
            g.grad_rho[j] = rng.gen_range(-1.0..1.0);
            g.grad_theta[j] = rng.gen_range(-1.0..1.0);
        }
        let s = StateSample {
            rho,
            u: vec![0.0; d],
            theta,
            y: y.clone(),
        };
        for (c, slot) in [(nondiag, 0), (fick, 1)] {
            let f = diffusion_flux(&s, &g, c, p)?;
            let fmax = f.iter().flatten().fold(1f64, |a, v| a.max(v.abs()));
            for j in 0..d {
                let sum: f64 = f.iter().map(|fk| fk[j]).sum();
                let rel = sum.abs() / fmax;
                if slot == 0 {
                    r.max_flux_sum = r.max_flux_sum.max(rel);
                } else {
                    r.max_fick_flux_sum = r.max_fick_flux_sum.max(rel);
                }
            }
        }

        let w = production_rates(&s, p, react)?;
        let bal: f64 = w.iter().zip(&p.molar_masses).map(|(a, m)| a * m).sum();
        r.max_mass_weighted_rate_sum = r.max_mass_weighted_rate_sum.max(bal.abs());
        let th = species_thermo(&s, p)?;
        let gw: f64 = (0..n).map(|k| p.molar_masses[k] * th.g[k] * w[k]).sum();
        r.max_gibbs_rate_sum = r.max_gibbs_rate_sum.max(gw);
        for k in 0..n {
            r.min_rate_lower_bound_margin = r
                .min_rate_lower_bound_margin
                .min(w[k] + cw * y[k].powf(react.r_exp));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_species_matrix() {
        // d(theta) = 1 needs d0 (1 + theta^a) = 1: a = 0 gives d = 2 d0
        let c = DiffusionClosure::nondiagonal(0.5, 0.0);
        let y = [0.5, 0.5];
        let m = c.matrix(1.0, &y).unwrap();
        assert_eq!(m, vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        for row in &m {
            assert_eq!(row[0] * y[0] + row[1] * y[1], 0.0);
        }
        let x = [1.0, -1.0];
        let q: f64 = (0..2)
            .map(|k| x[k] * (0..2).map(|l| m[k][l] * x[l]).sum::<f64>())
            .sum();
        let w: f64 = (0..2).map(|k| x[k] * x[k] / y[k]).sum();
        assert_eq!(q, 4.0);
        assert_eq!(w, 4.0);
    }

    #[test]
    fn regularization_examples() {
        let c = DiffusionClosure::nondiagonal(1.0, 1.0);
        let y = [0.3, 0.7];
        let base = c.matrix(2.0, &y).unwrap();
        assert_eq!(regularized_matrix(2.0, &y, 0.0, 1.0, &c).unwrap(), base);
        assert_eq!(regularized_matrix(2.0, &y, 0.7, 0.0, &c).unwrap(), base);
        let half = regularized_matrix(2.0, &y, 1.0, 1.0, &c).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert_relative_eq!(half[k][l], base[k][l] / 2.0, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn rate_examples() {
        let p = MixtureParameters::default();
        let mut c = ReactionClosure::chain(2, 1.0);
        let s = StateSample {
            rho: 1.0,
            u: vec![0.0; 2],
            theta: 1.0,
            y: vec![0.4, 0.4],
        };
        assert_eq!(production_rates(&s, &p, &c).unwrap(), vec![0.0, 0.0]);
        // K(theta) = K0 theta/(1+theta) = 1 needs K0 = 2 at theta = 1
        c.k0 = 2.0;
        let s = StateSample {
            y: vec![0.2, 0.8],
            ..s
        };
        let w = production_rates(&s, &p, &c).unwrap();
        assert_relative_eq!(w[0], 0.6, max_relative = 1e-15);
        assert_relative_eq!(w[1], -0.6, max_relative = 1e-15);
    }

    #[test]
    fn reacting_pair_needs_matching_species() {
        let p = MixtureParameters {
            cv: vec![1.5, 2.5],
            ..Default::default()
        };
        assert!(ReactionClosure::chain(2, 1.0).validate(&p).is_err());
    }

    #[test]
    fn short_sweep_passes() {
        let p = MixtureParameters {
            cv: vec![1.5; 3],
            molar_masses: vec![1.0; 3],
            ..Default::default()
        };
        let r = closure_sweep(
            &p,
            &DiffusionClosure::nondiagonal(1.0, 1.0),
            &DiffusionClosure::fick(1.0, 1.0),
            &ReactionClosure::chain(3, 1.0),
            500,
            7,
        )
        .unwrap();
        assert!(r.passes(), "{r:?}");
    }

    struct Broken;
    impl DiffusionMatrixLaw for Broken {
        fn matrix(&self, _t: Dual64, y: &[Dual64]) -> Vec<Vec<Dual64>> {
            // symmetric but D Y != 0
            let n = y.len();
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|l| Dual64::from(if k == l { 1.0 } else { 0.0 }))
                        .collect()
                })
                .collect()
        }
    }

    #[test]
    fn user_matrix_validation() {
        let c = DiffusionClosure {
            user: Some(Arc::new(Broken)),
            ..DiffusionClosure::nondiagonal(1.0, 1.0)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            validate_matrix_at(&c, 1.0, &[0.5, 0.5], &mut rng),
            Err(Error::Closure(_))
        ));
    }
}
