//! Homogenization of boundary data: a smooth `M` with `Lₖ M = dₖ` for every
//! boundary functional, so that `u = v + M` leaves homogeneous conditions
//! for `v` and the right-hand side becomes `f − L M`.
//!
//! Axes are processed in order. Along axis `k` the current map is corrected
//! by `Σₛ χₛ(xₖ) (dₛ − Lₛ M_{k−1})`, where the cardinal polynomials `χₛ`
//! satisfy `Lᵣ χₛ = δᵣₛ`. For Dirichlet data on a rectangle this is the
//! classical two-stage linear blend.

use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::field::{ConstantField, Field, FieldRef};
use crate::functionals::BoundaryFunctional;
use crate::numerics::{lu_factor, Matrix, Real};
use crate::problem::{AxisConditions, BoxDomain};

/// Highest monomial degree tried for cardinal polynomials.
pub const MAX_ANSATZ_DEGREE: usize = 3;

/// `Σ cⱼ (x − shift)^{dⱼ}`.
#[derive(Debug, Clone)]
pub struct ShiftedPolynomial<T> {
    shift: T,
    terms: Vec<(T, usize)>,
}

impl<T: Real> ShiftedPolynomial<T> {
    pub fn derivative(&self, order: usize, x: &T) -> T {
        let s = x.clone() - &self.shift;
        let mut acc = x.zero();
        for (c, d) in &self.terms {
            if *d < order {
                continue;
            }
            let falling: i64 = ((d - order + 1)..=*d).map(|v| v as i64).product();
            let term = c.clone() * &s.powi((d - order) as i32) * &x.lit(falling as f64);
            acc += term;
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }
}

/// Cardinal polynomials `χₛ` with `Lᵣ χₛ = δᵣₛ`, using the first monomial
/// set (ordered by top degree, then lexicographically) whose collocation
/// matrix is nonsingular.
pub fn cardinal_polynomials<T: Real>(
    functionals: &[BoundaryFunctional<T>],
    shift: &T,
    axis: usize,
) -> Result<Vec<ShiftedPolynomial<T>>> {
    let m = functionals.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let candidates = (0..=MAX_ANSATZ_DEGREE).combinations(m).sorted_by_key(|c| (*c.last().unwrap(), c.clone()));
    for degrees in candidates {
        let monomial = |d: usize| ShiftedPolynomial { shift: shift.clone(), terms: vec![(shift.one(), d)] };
        let g = Matrix::from_fn(m, m, |i, j| {
            let p = monomial(degrees[j]);
            functionals[i].apply(&|o: usize, x: &T| p.derivative(o, x))
        });
        let Ok(lu) = lu_factor(&g) else { continue };
        let inv = lu.solve(&Matrix::identity(m, shift.precision()));
        return Ok((0..m)
            .map(|s| ShiftedPolynomial {
                shift: shift.clone(),
                terms: (0..m).map(|j| (inv[(j, s)].clone(), degrees[j])).collect(),
            })
            .collect());
    }
    Err(Error::NoHomogenizer { axis, functionals: functionals.iter().join("; ") })
}

#[derive(Clone)]
struct AxisBlend<T> {
    axis: usize,
    functionals: Vec<BoundaryFunctional<T>>,
    data: Vec<FieldRef<T>>,
    cardinals: Vec<ShiftedPolynomial<T>>,
}

/// The map `M`, evaluable with partial derivatives anywhere in the box.
#[derive(Clone)]
pub struct HomogenizationMap<T> {
    dim: usize,
    blends: Vec<AxisBlend<T>>,
    prec: crate::numerics::Precision,
}

impl<T: Real> HomogenizationMap<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn into_ref(self) -> FieldRef<T> {
        Arc::new(self)
    }

    /// Highest polynomial degree used along each processed axis.
    pub fn degrees(&self) -> Vec<(usize, usize)> {
        self.blends.iter().map(|b| (b.axis, b.cardinals.iter().map(|c| c.degree()).max().unwrap_or(0))).collect()
    }

    /// `∂^orders M_level(p)`, with `M_0 ≡ 0`.
    fn partial_level(&self, level: usize, p: &[T], orders: &[usize]) -> T {
        if level == 0 {
            return T::zero_at(self.prec);
        }
        let blend = &self.blends[level - 1];
        let k = blend.axis;
        let mut acc = self.partial_level(level - 1, p, orders);
        let mut tangential = orders.to_vec();
        tangential[k] = 0;
        let mut q = p.to_vec();
        let mut qo = tangential.clone();
        for ((l, d), chi) in blend.functionals.iter().zip(&blend.data).zip(&blend.cardinals) {
            let weight = chi.derivative(orders[k], &p[k]);
            if weight == weight.zero() {
                continue;
            }
            let mut defect = d.partial(p, &tangential);
            for t in l.terms() {
                q[k] = t.location.clone();
                qo[k] = t.order;
                defect.sub_mul_assign(&t.coeff, &self.partial_level(level - 1, &q, &qo));
            }
            acc.add_mul_assign(&weight, &defect);
        }
        acc
    }
}

impl<T: Real> Field<T> for HomogenizationMap<T> {
    fn value(&self, p: &[T]) -> T {
        let zeros = vec![0; p.len()];
        self.partial_level(self.blends.len(), p, &zeros)
    }

    fn partial(&self, p: &[T], orders: &[usize]) -> T {
        self.partial_level(self.blends.len(), p, orders)
    }

    fn is_zero(&self) -> bool {
        self.blends.is_empty()
    }
}

/// Homogenizer for a box with per-axis conditions. Axes without data (or
/// with identically zero data) contribute nothing.
pub fn homogenize_nd<T: Real>(domain: &BoxDomain<T>, conditions: &[AxisConditions<T>]) -> Result<HomogenizationMap<T>> {
    if conditions.len() != domain.dim() {
        return Err(Error::InvalidProblem("one set of conditions per axis".into()));
    }
    let mut blends = Vec::new();
    let all_zero = conditions.iter().all(|c| c.data.iter().all(|d| d.is_zero()));
    for (axis, c) in conditions.iter().enumerate() {
        if c.functionals.is_empty() || all_zero {
            continue;
        }
        for f in &c.functionals {
            f.check_domain(domain.lo(axis), domain.hi(axis))?;
        }
        let cardinals = cardinal_polynomials(&c.functionals, domain.lo(axis), axis)?;
        blends.push(AxisBlend { axis, functionals: c.functionals.clone(), data: c.data.clone(), cardinals });
    }
    Ok(HomogenizationMap { dim: domain.dim(), blends, prec: domain.precision() })
}

/// Homogenizer for a single axis with constant right-hand sides.
pub fn homogenize_1d<T: Real>(
    l1: BoundaryFunctional<T>,
    l2: BoundaryFunctional<T>,
    interval: (T, T),
) -> Result<HomogenizationMap<T>> {
    let domain = BoxDomain::new(vec![interval])?;
    homogenize_nd(&domain, &[AxisConditions::from_rhs(vec![l1, l2])?])
}

/// Dirichlet data `u(a,y)=g₁, u(b,y)=g₂, u(x,c)=h₁, u(x,d)=h₂` on a rectangle.
pub fn homogenize_2d_dirichlet<T: Real>(
    g1: FieldRef<T>,
    g2: FieldRef<T>,
    h1: FieldRef<T>,
    h2: FieldRef<T>,
    domain: &BoxDomain<T>,
) -> Result<HomogenizationMap<T>> {
    let x = AxisConditions::new(
        vec![BoundaryFunctional::dirichlet(domain.lo(0).clone()), BoundaryFunctional::dirichlet(domain.hi(0).clone())],
        vec![g1, g2],
    )?;
    let y = AxisConditions::new(
        vec![BoundaryFunctional::dirichlet(domain.lo(1).clone()), BoundaryFunctional::dirichlet(domain.hi(1).clone())],
        vec![h1, h2],
    )?;
    homogenize_nd(domain, &[x, y])
}

/// Residual of every boundary condition: `max |Lₖ M − dₖ|` over the given
/// points, where each point's own axis coordinate is ignored.
pub fn boundary_residual<T: Real>(m: &dyn Field<T>, conditions: &[AxisConditions<T>], points: &[Vec<T>]) -> T {
    let mut worst = points.first().map(|p| p[0].zero()).expect("at least one sample point");
    for (axis, c) in conditions.iter().enumerate() {
        for (l, d) in c.functionals.iter().zip(&c.data) {
            for p in points {
                let applied = l.apply(&|o: usize, s: &T| {
                    let mut q = p.clone();
                    q[axis] = s.clone();
                    let mut orders = vec![0; p.len()];
                    orders[axis] = o;
                    m.partial(&q, &orders)
                });
                worst = worst.max_of((applied - &d.value(p)).abs());
            }
        }
    }
    worst
}

/// Constant field helper for tests and examples.
pub fn constant<T: Real>(v: T) -> FieldRef<T> {
    Arc::new(ConstantField(v))
}
