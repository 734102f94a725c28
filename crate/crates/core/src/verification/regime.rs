//! Existence-regime classifier. All comparisons are exact: inputs are converted
//! to rationals without rounding and thresholds are rational.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One};
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeQuery {
    pub gamma: f64,
    pub m_exp: f64,
    pub a_exp: f64,
    pub axisymmetric: bool,
    pub f_friction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Weak,
    VariationalEntropy,
    OutsideTheory,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::VariationalEntropy => "variational_entropy",
            Regime::OutsideTheory => "outside_theory",
        })
    }
}

fn q(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| config(format!("non-finite parameter {x}")))
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Hypotheses for a variational entropy solution: m > max(2/3, 2/(3(gamma-1))), a < 3m/2.
fn entropy_conditions(g: &BigRational, m: &BigRational, a: &BigRational) -> bool {
    let g1 = g - BigRational::one();
    let two = BigRational::from_i64(2).expect("small integer");
    let three = BigRational::from_i64(3).expect("small integer");
    m > &r(2, 3) && *m > &two / (&three * &g1) && *a < &three * m / &two
}

pub fn classify_regime(q_: &RegimeQuery) -> Result<Regime> {
    if !(q_.gamma > 1.0) {
        return Err(config(format!("gamma must exceed 1, got {}", q_.gamma)));
    }
    let (g, m, a) = (q(q_.gamma)?, q(q_.m_exp)?, q(q_.a_exp)?);
    if q_.axisymmetric && !(q_.f_friction > 0.0) {
        return Ok(Regime::OutsideTheory);
    }
    if !entropy_conditions(&g, &m, &a) {
        return Ok(Regime::OutsideTheory);
    }
    let one = BigRational::one();
    let weak = if !q_.axisymmetric {
        m > one && g > r(5, 4) && a < (r(3, 1) * &m - r(2, 1)) / r(2, 1)
    } else {
        let extra = if g > r(5, 4) && g <= r(4, 3) {
            // 15 gamma - 16 > 0 for gamma > 5/4
            m > r(16, 1) * &g / (r(15, 1) * &g - r(16, 1))
        } else if g > r(4, 3) && g < r(5, 3) {
            m > (r(18, 1) - r(6, 1) * &g) / (r(9, 1) * &g - r(7, 1))
        } else {
            true
        };
        g > r(5, 4) && m > one && extra
    };
    Ok(if weak {
        Regime::Weak
    } else {
        Regime::VariationalEntropy
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(g: f64, m: f64, a: f64) -> Regime {
        classify_regime(&RegimeQuery {
            gamma: g,
            m_exp: m,
            a_exp: a,
            axisymmetric: false,
            f_friction: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn theorem_examples() {
        assert_eq!(cl(2.0, 1.0, 1.0), Regime::VariationalEntropy);
        assert_eq!(cl(1.5, 2.0, 1.0), Regime::Weak);
        assert_eq!(cl(1.1, 0.5, 1.0), Regime::OutsideTheory);
    }

    #[test]
    fn thresholds_are_strict() {
        // m = 2/(3(gamma-1)) exactly at gamma = 2 is 2/3; 2/3 is not representable, so use gamma = 3: 1/3 < 2/3
        assert_eq!(cl(3.0, 2.0 / 3.0 + 1e-15, 0.0), Regime::VariationalEntropy);
        // a = 3m/2 exactly
        assert_eq!(cl(2.0, 2.0, 3.0), Regime::OutsideTheory);
        // m = 1 exactly fails the weak bound
        assert_eq!(cl(2.0, 1.0, 0.0), Regime::VariationalEntropy);
        // gamma = 5/4 exactly fails the weak bound; m must exceed 8/3
        assert_eq!(cl(1.25, 3.0, 0.0), Regime::VariationalEntropy);
        // a = (3m-2)/2 exactly
        assert_eq!(cl(2.0, 2.0, 2.0), Regime::VariationalEntropy);
    }

    #[test]
    fn axisymmetric_needs_friction() {
        let q = RegimeQuery {
            gamma: 1.5,
            m_exp: 2.0,
            a_exp: 1.0,
            axisymmetric: true,
            f_friction: 0.0,
        };
        assert_eq!(classify_regime(&q).unwrap(), Regime::OutsideTheory);
        let q = RegimeQuery {
            f_friction: 1.0,
            ..q
        };
        // gamma = 1.5 in (4/3, 5/3): m > (18 - 9)/(13.5 - 7) = 18/13
        assert_eq!(classify_regime(&q).unwrap(), Regime::Weak);
        // 4/3 < m < 18/13
        let q = RegimeQuery { m_exp: 1.34, ..q };
        assert_eq!(classify_regime(&q).unwrap(), Regime::VariationalEntropy);
    }

    #[test]
    fn gamma_at_most_one_is_rejected() {
        assert!(classify_regime(&RegimeQuery {
            gamma: 1.0,
            m_exp: 2.0,
            a_exp: 1.0,
            axisymmetric: false,
            f_friction: 1.0
        })
        .is_err());
    }
}
