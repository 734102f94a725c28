//! Scalar abstraction so the pointwise model can run on plain floats and on
//! forward-mode duals (for Jacobian assembly) with one implementation.

use num_dual::{Dual64, DualNum};

pub trait Real: DualNum<Primitive = f64> + Copy + Send + Sync + 'static {
    fn cst(x: f64) -> Self {
        Self::from(x)
    }
    fn val(&self) -> f64 {
        self.re()
    }
    fn to_dual(self) -> Dual64;
    fn from_dual(d: Dual64) -> Self;
}

impl Real for f64 {
    fn to_dual(self) -> Dual64 {
        Dual64::from(self)
    }
    fn from_dual(d: Dual64) -> Self {
        d.re
    }
}

impl Real for Dual64 {
    fn to_dual(self) -> Dual64 {
        self
    }
    fn from_dual(d: Dual64) -> Self {
        d
    }
}

/// Seed a dual number with unit derivative.
pub fn seeded(x: f64) -> Dual64 {
    Dual64::new(x, 1.0)
}
