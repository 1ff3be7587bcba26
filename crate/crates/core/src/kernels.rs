//! Reference kernels with closed-form mixed partial derivatives.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::Real;

/// Highest total derivative order a base kernel must provide: a second-order
/// operator applied on top of two first-order constraint functionals.
pub const MAX_KERNEL_ORDER: usize = 4;

/// Symmetric bivariate kernel `R(x, y)` on one coordinate axis.
pub trait Kernel<T: Real>: Debug + Send + Sync {
    /// `∂ₓᵐ ∂ᵧⁿ R(x, y)`.
    fn mixed_partial(&self, m: usize, n: usize, x: &T, y: &T) -> Result<T>;

    /// Largest supported `m + n`.
    fn max_order(&self) -> usize;

    fn eval(&self, x: &T, y: &T) -> T {
        self.mixed_partial(0, 0, x, y).expect("order zero is always supported")
    }
}

pub type KernelRef<T> = Arc<dyn Kernel<T>>;

/// Gaussian RBF `exp(-c²(x-y)²)`.
#[derive(Debug, Clone)]
pub struct GaussianKernel<T> {
    shape: T,
    shape_sq: T,
}

impl<T: Real> GaussianKernel<T> {
    /// Panics unless `shape > 0`.
    pub fn new(shape: T) -> Self {
        assert!(shape > shape.zero(), "shape parameter must be positive");
        let shape_sq = shape.clone() * &shape;
        GaussianKernel { shape, shape_sq }
    }

    pub fn shape(&self) -> &T {
        &self.shape
    }

    pub fn into_ref(self) -> KernelRef<T> {
        Arc::new(self)
    }

    /// `f⁽ᵖ⁾(t)` for `f(t) = exp(-c²t²)`: `(-c)ᵖ Hₚ(ct) f(t)` with physicists'
    /// Hermite polynomials from the three-term recurrence.
    fn profile_derivative(&self, p: usize, t: &T) -> T {
        let s = self.shape.clone() * t;
        let base = (-(s.clone() * &s)).exp();
        if p == 0 {
            return base;
        }
        let two_s = s.clone() + &s;
        let mut h_prev = s.one();
        let mut h = two_s.clone();
        for k in 1..p {
            let next = two_s.clone() * &h - h_prev * &s.lit(2.0 * k as f64);
            h_prev = h;
            h = next;
        }
        let mut scale = self.shape.clone();
        for _ in 1..p {
            scale *= &self.shape;
        }
        if p % 2 == 1 {
            scale = -scale;
        }
        scale * &h * &base
    }
}

impl<T: Real> Kernel<T> for GaussianKernel<T> {
    fn mixed_partial(&self, m: usize, n: usize, x: &T, y: &T) -> Result<T> {
        if m + n > MAX_KERNEL_ORDER {
            return Err(Error::UnsupportedOrder { requested: m + n, max: MAX_KERNEL_ORDER });
        }
        let t = x.clone() - y;
        let d = self.profile_derivative(m + n, &t);
        Ok(if n % 2 == 1 { -d } else { d })
    }

    fn max_order(&self) -> usize {
        MAX_KERNEL_ORDER
    }

    fn eval(&self, x: &T, y: &T) -> T {
        let t = x.clone() - y;
        (-(self.shape_sq.clone() * &t * &t)).exp()
    }
}
