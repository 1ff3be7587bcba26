//! Kernels that satisfy homogeneous boundary functionals in both arguments,
//! built from a base kernel by successive rank-one corrections
//! `K ← K − (L_x K)(L_y K) / (L_x L_y K)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functionals::{BoundaryFunctional, Slot, Term, Univariate, UnivariateTrace};
use crate::kernels::{Kernel, KernelRef};
use crate::numerics::Real;

/// One correction `φ(x)·ψ(y)/γ` subtracted from the kernel.
#[derive(Debug, Clone)]
pub struct RankOneCorrection<T> {
    /// `L_y K_prev(x, ·)`, a function of `x`.
    pub phi: UnivariateTrace<T>,
    /// `L_x K_prev(·, y)`, a function of `y`.
    pub psi: UnivariateTrace<T>,
    pub gamma: T,
    pub functional: BoundaryFunctional<T>,
}

#[derive(Debug, Clone)]
pub struct ConstrainedKernel<T> {
    base: KernelRef<T>,
    corrections: Vec<RankOneCorrection<T>>,
}

impl<T: Real> ConstrainedKernel<T> {
    /// The base kernel with no constraints.
    pub fn unconstrained(base: KernelRef<T>) -> Self {
        ConstrainedKernel { base, corrections: Vec::new() }
    }

    /// Imposes `functionals` in order. A vanishing `γ` fails with
    /// [`Error::DegenerateConstraint`] naming the offending position.
    pub fn impose_sequence(base: KernelRef<T>, functionals: &[BoundaryFunctional<T>]) -> Result<Self> {
        let mut k = Self::unconstrained(base);
        for (index, f) in functionals.iter().enumerate() {
            k = k.impose(f).map_err(|e| match e {
                Error::DegenerateConstraint { gamma, .. } => Error::DegenerateConstraint { index, gamma },
                other => other,
            })?;
        }
        Ok(k)
    }

    /// Adds one more constraint.
    pub fn impose(&self, functional: &BoundaryFunctional<T>) -> Result<Self> {
        let phi = self.trace(functional, Slot::Second)?;
        let psi = self.trace(functional, Slot::First)?;
        let gamma = functional.apply(&phi);
        let tol = gamma.lit(gamma.precision().tol_pivot());
        if !gamma.is_finite() || !(gamma.abs() > tol) {
            return Err(Error::DegenerateConstraint { index: self.corrections.len(), gamma: gamma.to_f64() });
        }
        let mut corrections = self.corrections.clone();
        corrections.push(RankOneCorrection { phi, psi, gamma, functional: functional.clone() });
        Ok(ConstrainedKernel { base: self.base.clone(), corrections })
    }

    pub fn base(&self) -> &KernelRef<T> {
        &self.base
    }

    pub fn corrections(&self) -> &[RankOneCorrection<T>] {
        &self.corrections
    }

    pub fn functionals(&self) -> impl Iterator<Item = &BoundaryFunctional<T>> {
        self.corrections.iter().map(|c| &c.functional)
    }

    pub fn into_ref(self) -> KernelRef<T> {
        Arc::new(self)
    }

    /// `functional` applied to `slot`, leaving a function of the other
    /// argument expressed through base-kernel derivatives.
    pub fn trace(&self, functional: &BoundaryFunctional<T>, slot: Slot) -> Result<UnivariateTrace<T>> {
        let free = slot.other();
        let mut atoms: Vec<Term<T>> = functional.terms().to_vec();
        for c in &self.corrections {
            // the factor sharing `slot` is consumed, the other one survives
            let (consumed, survivor) = match slot {
                Slot::First => (&c.phi, &c.psi),
                Slot::Second => (&c.psi, &c.phi),
            };
            let weight = functional.apply(consumed) / &c.gamma;
            for a in survivor.atoms() {
                atoms.push(Term { coeff: -(weight.clone() * &a.coeff), order: a.order, location: a.location.clone() });
            }
        }
        Ok(UnivariateTrace::new(self.base.clone(), free, atoms))
    }

    fn fixed_order(&self) -> usize {
        self.corrections.iter().map(|c| c.functional.max_order()).max().unwrap_or(0)
    }
}

impl<T: Real> Kernel<T> for ConstrainedKernel<T> {
    fn mixed_partial(&self, m: usize, n: usize, x: &T, y: &T) -> Result<T> {
        let base_max = self.base.max_order();
        let fixed = self.fixed_order();
        if m + n > base_max || (!self.corrections.is_empty() && m.max(n) + fixed > base_max) {
            return Err(Error::UnsupportedOrder { requested: m + n, max: self.max_order() });
        }
        let mut v = self.base.mixed_partial(m, n, x, y)?;
        for c in &self.corrections {
            let num = c.phi.try_derivative(m, x)? * &c.psi.try_derivative(n, y)?;
            v -= num / &c.gamma;
        }
        Ok(v)
    }

    fn max_order(&self) -> usize {
        if self.corrections.is_empty() {
            self.base.max_order()
        } else {
            self.base.max_order() - self.fixed_order()
        }
    }
}

/// `x ↦ ∂ₓᵐ K(x, y)` for a fixed `y`, as a univariate function.
pub struct Section<'a, T> {
    pub kernel: &'a dyn Kernel<T>,
    pub y: T,
}

impl<T: Real> Univariate<T> for Section<'_, T> {
    fn derivative(&self, order: usize, x: &T) -> T {
        self.kernel.mixed_partial(order, 0, x, &self.y).expect("section order within budget")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::GaussianKernel;
    use crate::numerics::{cholesky, Matrix, Mp, Precision};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauss(c: f64) -> KernelRef<f64> {
        GaussianKernel::new(c).into_ref()
    }

    fn r(c: f64, x: f64, y: f64) -> f64 {
        (-(c * c) * (x - y) * (x - y)).exp()
    }
    fn r_x(c: f64, x: f64, y: f64) -> f64 {
        -2.0 * c * c * (x - y) * r(c, x, y)
    }
    fn r_xy(c: f64, x: f64, y: f64) -> f64 {
        let t = x - y;
        2.0 * c * c * (1.0 - 2.0 * c * c * t * t) * r(c, x, y)
    }

    #[test]
    fn single_dirichlet_value() {
        let k = ConstrainedKernel::impose_sequence(gauss(1.0), &[BoundaryFunctional::dirichlet(0.0)]).unwrap();
        assert!((k.eval(&0.5, &0.5) - 0.393_469_34).abs() < 1e-8);
        assert!(k.eval(&0.0, &0.3).abs() < 1e-16);
    }

    #[test]
    fn single_neumann_matches_closed_form() {
        let c = 0.8;
        let a = 0.2;
        let k = ConstrainedKernel::impose_sequence(gauss(c), &[BoundaryFunctional::neumann(a)]).unwrap();
        for (x, y) in [(0.3, 0.9), (-0.4, 0.1), (1.1, 1.1)] {
            // R - R_y(x,a) R_x(a,y) / R_xy(a,a), with R_y(x,a) = -R_x(x,a)
            let oracle = r(c, x, y) - (-r_x(c, x, a)) * r_x(c, a, y) / r_xy(c, a, a);
            assert!((k.eval(&x, &y) - oracle).abs() < 1e-14);
        }
    }

    /// `R − rᵀ G⁻¹ r` with `G` the 2×2 Gram matrix of the functionals.
    fn schur_two(k: &dyn Kernel<f64>, f: [&BoundaryFunctional<f64>; 2], x: f64, y: f64) -> f64 {
        let col =
            |l: &BoundaryFunctional<f64>, x: f64| l.apply(&|o: usize, s: &f64| k.mixed_partial(0, o, &x, s).unwrap());
        let row =
            |l: &BoundaryFunctional<f64>, y: f64| l.apply(&|o: usize, s: &f64| k.mixed_partial(o, 0, s, &y).unwrap());
        let g = |a: &BoundaryFunctional<f64>, b: &BoundaryFunctional<f64>| {
            a.apply(&|oa: usize, s: &f64| b.apply(&|ob: usize, t: &f64| k.mixed_partial(oa, ob, s, t).unwrap()))
        };
        let (g00, g01, g10, g11) = (g(f[0], f[0]), g(f[0], f[1]), g(f[1], f[0]), g(f[1], f[1]));
        let det = g00 * g11 - g01 * g10;
        let (u0, u1) = (col(f[0], x), col(f[1], x));
        let (v0, v1) = (row(f[0], y), row(f[1], y));
        let quad = (u0 * (g11 * v0 - g01 * v1) + u1 * (-g10 * v0 + g00 * v1)) / det;
        k.eval(&x, &y) - quad
    }

    #[test]
    fn robin_pair_matches_gram_complement() {
        let eps = 0.25;
        let fs =
            [BoundaryFunctional::robin(1.0, -eps, 0.0).unwrap(), BoundaryFunctional::robin(1.0, 1.0, 1.0).unwrap()];
        let base = gauss(0.9);
        let k = ConstrainedKernel::impose_sequence(base.clone(), &fs).unwrap();
        for (x, y) in [(0.1, 0.7), (0.5, 0.5), (0.95, 0.05)] {
            let oracle = schur_two(base.as_ref(), [&fs[0], &fs[1]], x, y);
            assert!((k.eval(&x, &y) - oracle).abs() < 1e-12, "{} vs {oracle}", k.eval(&x, &y));
        }
    }

    #[test]
    fn multipoint_constraint_annihilates() {
        let fs = [
            BoundaryFunctional::dirichlet(2.0),
            BoundaryFunctional::multipoint(0.0, vec![(0.25, 0.6), (0.5, 1.2), (0.25, 1.8)], 0.0).unwrap(),
        ];
        let k = ConstrainedKernel::impose_sequence(gauss(0.7), &fs).unwrap();
        for y in [0.1, 0.9, 1.5] {
            for f in &fs {
                let v = f.apply(&Section { kernel: &k, y });
                assert!(v.abs() < 1e-13, "{v}");
            }
        }
    }

    #[test]
    fn degenerate_repeat_is_reported() {
        let d = BoundaryFunctional::dirichlet(0.0);
        let err = ConstrainedKernel::impose_sequence(gauss(1.0), &[d.clone(), d]).unwrap_err();
        assert!(matches!(err, Error::DegenerateConstraint { index: 1, .. }), "{err:?}");
    }

    #[test]
    fn order_budget_is_enforced() {
        let k = ConstrainedKernel::impose_sequence(gauss(1.0), &[BoundaryFunctional::neumann(0.0)]).unwrap();
        assert!(k.mixed_partial(2, 0, &0.1, &0.2).is_ok());
        assert!(k.mixed_partial(3, 1, &0.1, &0.2).is_ok());
        assert!(matches!(k.mixed_partial(4, 0, &0.1, &0.2), Err(Error::UnsupportedOrder { .. })));
    }

    fn example_pairs() -> Vec<[BoundaryFunctional<f64>; 2]> {
        vec![
            [BoundaryFunctional::dirichlet(0.0), BoundaryFunctional::dirichlet(1.0)],
            [BoundaryFunctional::dirichlet(0.0), BoundaryFunctional::neumann(1.0)],
            [BoundaryFunctional::neumann(0.0), BoundaryFunctional::neumann(1.0)],
            [BoundaryFunctional::robin(1.0, -0.5, 0.0).unwrap(), BoundaryFunctional::robin(2.0, 1.0, 1.0).unwrap()],
        ]
    }

    proptest! {
        #[test]
        fn annihilation_symmetry_and_preservation(x in 0.0f64..1.0, y in 0.0f64..1.0,
                                                  c in 0.5f64..2.0, pick in 0usize..4) {
            let fs = example_pairs().swap_remove(pick);
            let one = ConstrainedKernel::impose_sequence(gauss(c), &fs[..1]).unwrap();
            let two = one.impose(&fs[1]).unwrap();
            let (s1, s2) = (Section { kernel: &one, y }, Section { kernel: &two, y });
            prop_assert!(fs[0].apply(&s1).abs() < 1e-12);
            for f in &fs {
                prop_assert!(f.apply(&s2).abs() < 1e-12);
            }
            prop_assert!((two.eval(&x, &y) - two.eval(&y, &x)).abs() < 1e-13);
        }

        #[test]
        fn partials_match_finite_differences(x in 0.0f64..1.0, y in 0.0f64..1.0,
                                             c in 0.5f64..2.0, pick in 0usize..4,
                                             m in 0usize..=2, n in 0usize..=2) {
            prop_assume!(m + n >= 1 && m + n <= 2);
            let fs = example_pairs().swap_remove(pick);
            let k = ConstrainedKernel::impose_sequence(gauss(c), &fs).unwrap();
            let h = 1e-5;
            let exact = k.mixed_partial(m, n, &x, &y).unwrap();
            let fd = if m > 0 {
                (k.mixed_partial(m - 1, n, &(x + h), &y).unwrap()
                    - k.mixed_partial(m - 1, n, &(x - h), &y).unwrap()) / (2.0 * h)
            } else {
                (k.mixed_partial(m, n - 1, &x, &(y + h)).unwrap()
                    - k.mixed_partial(m, n - 1, &x, &(y - h)).unwrap()) / (2.0 * h)
            };
            prop_assert!((exact - fd).abs() <= 1e-4 * exact.abs().max(1e-3 * c * c), "{} {}", exact, fd);
        }
    }

    #[test]
    fn gram_matrices_are_positive_definite_at_fifty_digits() {
        let p = Precision::Digits(50);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pairs: Vec<[&str; 2]> = vec![["dirichlet @0", "dirichlet @1"], ["robin 1 -0.5 @0", "neumann @1"]];
        for pair in pairs {
            let fs: Vec<BoundaryFunctional<Mp>> =
                pair.iter().map(|s| crate::functionals::parse_functional(s, p).unwrap()).collect();
            let k = ConstrainedKernel::impose_sequence(GaussianKernel::new(Mp::one_at(p)).into_ref(), &fs).unwrap();
            for _ in 0..5 {
                let pts: Vec<Mp> = (0..6).map(|_| Mp::from_f64(rng.gen_range(0.05..0.95), p)).collect();
                let g = Matrix::from_fn(6, 6, |i, j| k.eval(&pts[i], &pts[j]));
                assert!(cholesky(&g, 1e-40).unwrap().is_factor());
            }
        }
    }
}
