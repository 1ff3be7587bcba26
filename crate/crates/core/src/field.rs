//! Scalar fields over box domains with partial-derivative access.
//!
//! Closed-form data (exact solutions, right-hand sides, boundary data) is
//! written once against [`Elementary`] and evaluated either on plain scalars
//! or on [`Jet`]s, truncated multivariate Taylor expansions that deliver
//! every partial derivative up to total order 3 in up to 3 variables.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use crate::numerics::{Elementary, Real};

/// Number of jet variables.
pub const JET_VARS: usize = 3;
/// Truncation order of a jet.
pub const JET_ORDER: usize = 3;
const JET_LEN: usize = 20;

struct JetTables {
    monos: Vec<[usize; JET_VARS]>,
    /// (i, j, k): mono_i · mono_j = mono_k.
    products: Vec<(usize, usize, usize)>,
}

fn tables() -> &'static JetTables {
    static TABLES: OnceLock<JetTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut monos = Vec::with_capacity(JET_LEN);
        for deg in 0..=JET_ORDER {
            for a in (0..=deg).rev() {
                for b in (0..=(deg - a)).rev() {
                    monos.push([a, b, deg - a - b]);
                }
            }
        }
        debug_assert_eq!(monos.len(), JET_LEN);
        let mut products = Vec::new();
        for (i, mi) in monos.iter().enumerate() {
            for (j, mj) in monos.iter().enumerate() {
                let sum = [mi[0] + mj[0], mi[1] + mj[1], mi[2] + mj[2]];
                if let Some(k) = monos.iter().position(|m| *m == sum) {
                    products.push((i, j, k));
                }
            }
        }
        JetTables { monos, products }
    })
}

fn mono_index(m: [usize; JET_VARS]) -> Option<usize> {
    tables().monos.iter().position(|x| *x == m)
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Truncated Taylor expansion `Σ c_α h^α` around a point, `|α| ≤ 3`.
#[derive(Clone)]
pub struct Jet<T> {
    coeffs: Vec<T>,
}

impl<T: Real> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("value", &self.coeffs[0]).finish()
    }
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let zero = v.zero();
        let mut coeffs = vec![zero; JET_LEN];
        coeffs[0] = v;
        Jet { coeffs }
    }

    /// The coordinate function of `axis`, expanded around `v`.
    pub fn variable(v: T, axis: usize) -> Self {
        assert!(axis < JET_VARS);
        let one = v.one();
        let mut j = Jet::constant(v);
        j.coeffs[1 + axis] = one;
        j
    }

    /// Jets for every coordinate of a point.
    pub fn seed(point: &[T]) -> Vec<Jet<T>> {
        point.iter().enumerate().map(|(k, v)| Jet::variable(v.clone(), k)).collect()
    }

    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    /// Partial derivative with the given per-axis orders (total ≤ 3).
    pub fn partial(&self, orders: &[usize]) -> T {
        let mut m = [0usize; JET_VARS];
        for (k, &o) in orders.iter().enumerate() {
            if o > 0 {
                assert!(k < JET_VARS, "jet supports {JET_VARS} variables");
                m[k] = o;
            }
        }
        let idx = mono_index(m).unwrap_or_else(|| panic!("derivative order {orders:?} exceeds jet order {JET_ORDER}"));
        let scale = m.iter().map(|&o| factorial(o)).product::<i64>();
        self.coeffs[idx].clone() * self.coeffs[idx].lit(scale as f64)
    }

    /// `∂/∂axis` of the expansion; the top-order terms are lost.
    pub fn derivative(&self, axis: usize) -> Self {
        let t = tables();
        let zero = self.coeffs[0].zero();
        let mut out = vec![zero; JET_LEN];
        for (i, m) in t.monos.iter().enumerate() {
            let mut up = *m;
            up[axis] += 1;
            if let Some(k) = mono_index(up) {
                out[i] = self.coeffs[k].clone() * self.coeffs[k].lit(up[axis] as f64);
            }
        }
        Jet { coeffs: out }
    }

    /// Drops every term that depends on `axis`.
    pub fn freeze(mut self, axis: usize) -> Self {
        let zero = self.coeffs[0].zero();
        for (i, m) in tables().monos.iter().enumerate() {
            if m[axis] > 0 {
                self.coeffs[i] = zero.clone();
            }
        }
        self
    }

    /// `f(self)` given `f, f', f'', f'''` at the expansion point.
    fn compose(&self, d: [T; 4]) -> Self {
        let [f0, f1, f2, f3] = d;
        let mut h = self.clone();
        h.coeffs[0] = f0.zero();
        let h2 = h.clone() * &h;
        let h3 = h2.clone() * &h;
        let half = f0.ratio(1, 2);
        let sixth = f0.ratio(1, 6);
        let mut out = h.scale(&f1);
        out = out + h2.scale(&(f2 * &half));
        out = out + h3.scale(&(f3 * &sixth));
        out.coeffs[0] = f0;
        out
    }

    fn scale(&self, s: &T) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|c| c.clone() * s).collect() }
    }
}

impl<T: Real> Add<&Jet<T>> for Jet<T> {
    type Output = Jet<T>;
    fn add(mut self, rhs: &Jet<T>) -> Jet<T> {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl<T: Real> Sub<&Jet<T>> for Jet<T> {
    type Output = Jet<T>;
    fn sub(mut self, rhs: &Jet<T>) -> Jet<T> {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl<T: Real> Mul<&Jet<T>> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        let zero = self.coeffs[0].zero();
        let mut out = vec![zero; JET_LEN];
        for &(i, j, k) in &tables().products {
            out[k].add_mul_assign(&self.coeffs[i], &rhs.coeffs[j]);
        }
        Jet { coeffs: out }
    }
}

impl<T: Real> Div<&Jet<T>> for Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: &Jet<T>) -> Jet<T> {
        self * &rhs.recip()
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                $tr::$m(self, &rhs)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);
by_value!(Div, div);

impl<T: Real> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<T: Real> Elementary for Jet<T> {
    type Base = T;

    fn lift(&self, v: &T) -> Self {
        Jet::constant(v.clone())
    }
    fn lit(&self, v: f64) -> Self {
        Jet::constant(self.coeffs[0].lit(v))
    }
    fn ratio(&self, n: i64, d: i64) -> Self {
        Jet::constant(self.coeffs[0].ratio(n, d))
    }
    fn pi(&self) -> Self {
        Jet::constant(self.coeffs[0].pi())
    }
    fn exp(&self) -> Self {
        let e = self.coeffs[0].exp();
        self.compose([e.clone(), e.clone(), e.clone(), e])
    }
    fn ln(&self) -> Self {
        let a = &self.coeffs[0];
        let r = a.recip();
        let r2 = r.clone() * &r;
        let r3 = r2.clone() * &r;
        self.compose([a.ln(), r, -r2, r3 * &a.lit(2.0)])
    }
    fn sin(&self) -> Self {
        let (s, c) = (self.coeffs[0].sin(), self.coeffs[0].cos());
        self.compose([s.clone(), c.clone(), -s, -c])
    }
    fn cos(&self) -> Self {
        let (s, c) = (self.coeffs[0].sin(), self.coeffs[0].cos());
        self.compose([c.clone(), -s.clone(), -c, s])
    }
    fn sqrt(&self) -> Self {
        let a = &self.coeffs[0];
        let r = a.sqrt();
        let ir = r.recip();
        let ia = a.recip();
        let d1 = ir.clone() * &a.ratio(1, 2);
        let d2 = -(d1.clone() * &ia * &a.ratio(1, 2));
        let d3 = -(d2.clone() * &ia * &a.ratio(3, 2));
        self.compose([r, d1, d2, d3])
    }
    fn recip(&self) -> Self {
        let a = &self.coeffs[0];
        let r = a.recip();
        let r2 = r.clone() * &r;
        let r3 = r2.clone() * &r;
        let r4 = r3.clone() * &r;
        self.compose([r, -r2, r3 * &a.lit(2.0), -(r4 * &a.lit(6.0))])
    }
    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = self.lit(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        result
    }
    fn powr(&self, r: &T) -> Self {
        let a = &self.coeffs[0];
        let one = a.one();
        let f0 = a.powr(r);
        let ia = a.recip();
        let d1 = f0.clone() * r * &ia;
        let d2 = d1.clone() * &(r.clone() - &one) * &ia;
        let d3 = d2.clone() * &(r.clone() - &one - &one) * &ia;
        self.compose([f0, d1, d2, d3])
    }
}

/// A scalar function on a box domain with partial derivatives.
pub trait Field<T: Real>: Send + Sync {
    fn value(&self, p: &[T]) -> T;

    /// Partial derivative with per-axis `orders` (total ≤ 3).
    fn partial(&self, p: &[T], orders: &[usize]) -> T;

    /// `true` only when the field is known to vanish identically.
    fn is_zero(&self) -> bool {
        false
    }
}

pub type FieldRef<T> = Arc<dyn Field<T>>;

type ValueFn<T> = dyn Fn(&[T]) -> T + Send + Sync;
type JetFn<T> = dyn Fn(&[Jet<T>]) -> Jet<T> + Send + Sync;

/// Closed-form field given as a plain-scalar evaluator and a jet evaluator
/// of the same expression.
#[derive(Clone)]
pub struct ExprField<T> {
    value: Arc<ValueFn<T>>,
    jet: Arc<JetFn<T>>,
}

impl<T: Real> ExprField<T> {
    pub fn new(
        value: impl Fn(&[T]) -> T + Send + Sync + 'static,
        jet: impl Fn(&[Jet<T>]) -> Jet<T> + Send + Sync + 'static,
    ) -> Self {
        ExprField { value: Arc::new(value), jet: Arc::new(jet) }
    }

    pub fn into_ref(self) -> FieldRef<T> {
        Arc::new(self)
    }

    pub fn jet(&self, p: &[T]) -> Jet<T> {
        (self.jet)(&Jet::seed(p))
    }
}

impl<T: Real> Field<T> for ExprField<T> {
    fn value(&self, p: &[T]) -> T {
        (self.value)(p)
    }

    fn partial(&self, p: &[T], orders: &[usize]) -> T {
        if orders.iter().all(|&o| o == 0) {
            return (self.value)(p);
        }
        self.jet(p).partial(orders)
    }
}

/// A constant field.
#[derive(Debug, Clone)]
pub struct ConstantField<T>(pub T);

impl<T: Real> ConstantField<T> {
    pub fn into_ref(self) -> FieldRef<T> {
        Arc::new(self)
    }
}

impl<T: Real> Field<T> for ConstantField<T> {
    fn value(&self, _p: &[T]) -> T {
        self.0.clone()
    }

    fn partial(&self, _p: &[T], orders: &[usize]) -> T {
        if orders.iter().all(|&o| o == 0) {
            self.0.clone()
        } else {
            self.0.zero()
        }
    }

    fn is_zero(&self) -> bool {
        self.0 == self.0.zero()
    }
}

/// Identically zero field at the given precision.
pub fn zero_field<T: Real>(prec: crate::numerics::Precision) -> FieldRef<T> {
    Arc::new(ConstantField(T::zero_at(prec)))
}

/// Applies a differential operator given as `(coefficient, orders)` terms.
pub fn apply_terms<T: Real>(field: &dyn Field<T>, p: &[T], terms: &[(T, Vec<usize>)]) -> T {
    let mut acc = p[0].zero();
    for (c, orders) in terms {
        acc.add_mul_assign(c, &field.partial(p, orders));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Mp, Precision};

    fn sample<S: Elementary>(p: &[S]) -> S {
        // exp(x - y)·sin(z) + x²y / (1 + z)
        let (x, y, z) = (&p[0], &p[1], &p[2]);
        (x.clone() - y).exp() * z.sin() + x.clone() * x * y / (z.lit(1.0) + z)
    }

    #[test]
    fn jet_partials_match_hand_derivatives() {
        let p = [0.3, -0.2, 0.7];
        let f = ExprField::new(sample::<f64>, sample::<Jet<f64>>);
        let e = (p[0] - p[1]).exp();
        let (s, c) = (p[2].sin(), p[2].cos());
        let q = 1.0 + p[2];
        let checks: Vec<(Vec<usize>, f64)> = vec![
            (vec![0, 0, 0], e * s + p[0] * p[0] * p[1] / q),
            (vec![1, 0, 0], e * s + 2.0 * p[0] * p[1] / q),
            (vec![0, 2, 0], e * s),
            (vec![1, 1, 0], -e * s + 2.0 * p[0] / q),
            (vec![0, 0, 2], -e * s + 2.0 * p[0] * p[0] * p[1] / q.powi(3)),
            (vec![2, 1, 0], -e * s + 2.0 / q),
            (vec![1, 1, 1], -e * c - 2.0 * p[0] / (q * q)),
            (vec![0, 0, 3], -e * c - 6.0 * p[0] * p[0] * p[1] / q.powi(4)),
        ];
        for (orders, expect) in checks {
            let got = f.partial(&p, &orders);
            assert!((got - expect).abs() < 1e-13, "{orders:?}: {got} vs {expect}");
        }
    }

    #[test]
    fn transcendental_jets_match_finite_differences() {
        fn h<S: Elementary<Base = B>, B: crate::numerics::Real>(p: &[S]) -> S {
            let x = &p[0];
            let r = B::from_f64(1.7, crate::numerics::Precision::Binary64);
            (x.lit(2.0) + x).ln() + x.sqrt() * x.cos() + x.powi(-3) + x.powr(&r)
        }
        let f = ExprField::new(h::<f64, f64>, h::<Jet<f64>, f64>);
        let x0 = 0.8;
        let step = 1e-3;
        let v = |x: f64| f.value(&[x]);
        let d1 = (v(x0 + 0.1 * step) - v(x0 - 0.1 * step)) / (0.2 * step);
        let d2 = (v(x0 + step) - 2.0 * v(x0) + v(x0 - step)) / (step * step);
        let d3 =
            (v(x0 + 2.0 * step) - 2.0 * v(x0 + step) + 2.0 * v(x0 - step) - v(x0 - 2.0 * step)) / (2.0 * step.powi(3));
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(f.partial(&[x0], &[1]), d1) < 1e-6);
        assert!(rel(f.partial(&[x0], &[2]), d2) < 1e-5);
        assert!(rel(f.partial(&[x0], &[3]), d3) < 1e-4);
    }

    #[test]
    fn derivative_and_freeze() {
        let j = Jet::seed(&[0.5, 2.0]);
        let f = j[0].clone() * &j[0] * &j[1];
        let dx = f.derivative(0);
        assert!((dx.value() - 2.0).abs() < 1e-15);
        assert!((dx.partial(&[0, 1]) - 1.0).abs() < 1e-15);
        let frozen = f.freeze(0);
        assert_eq!(frozen.partial(&[1, 0]), 0.0);
        assert!((frozen.partial(&[0, 1]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn big_float_jets() {
        let p = Precision::Digits(40);
        let f = ExprField::new(sample::<Mp>, sample::<Jet<Mp>>);
        let pt = [Mp::from_f64(0.3, p), Mp::from_f64(-0.2, p), Mp::from_f64(0.7, p)];
        let got = f.partial(&pt, &[0, 2, 0]).to_f64();
        let e = (0.5f64).exp() * 0.7f64.sin();
        assert!((got - e).abs() < 1e-14);
    }
}
