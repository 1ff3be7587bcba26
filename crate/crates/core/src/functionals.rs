//! Boundary conditions as linear functionals: finite combinations of point
//! evaluations of a function or its first derivative.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, FieldRef};
use crate::kernels::KernelRef;
use crate::numerics::{Precision, Real};

/// One term `coeff · v^(order)(location)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub coeff: T,
    pub order: usize,
    pub location: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalKind {
    Dirichlet,
    Neumann,
    Robin,
    MultiPoint,
}

/// `Σ coeffₖ · v^(orderₖ)(locationₖ) = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunctional<T> {
    kind: FunctionalKind,
    terms: Vec<Term<T>>,
    rhs: T,
}

/// Anything with derivative access in one variable.
pub trait Univariate<T> {
    fn derivative(&self, order: usize, x: &T) -> T;
}

impl<T, F: Fn(usize, &T) -> T> Univariate<T> for F {
    fn derivative(&self, order: usize, x: &T) -> T {
        self(order, x)
    }
}

impl<T: Real> BoundaryFunctional<T> {
    /// `v(a)`.
    pub fn dirichlet(a: T) -> Self {
        let one = a.one();
        let rhs = a.zero();
        BoundaryFunctional {
            kind: FunctionalKind::Dirichlet,
            terms: vec![Term { coeff: one, order: 0, location: a }],
            rhs,
        }
    }

    /// `v'(a)`.
    pub fn neumann(a: T) -> Self {
        let one = a.one();
        let rhs = a.zero();
        BoundaryFunctional {
            kind: FunctionalKind::Neumann,
            terms: vec![Term { coeff: one, order: 1, location: a }],
            rhs,
        }
    }

    /// `α·v(a) + β·v'(a)`.
    pub fn robin(alpha: T, beta: T, a: T) -> Result<Self> {
        let zero = a.zero();
        if alpha == zero && beta == zero {
            return Err(Error::InvalidFunctional("robin requires (alpha, beta) != (0, 0)".into()));
        }
        Ok(BoundaryFunctional {
            kind: FunctionalKind::Robin,
            terms: vec![
                Term { coeff: alpha, order: 0, location: a.clone() },
                Term { coeff: beta, order: 1, location: a },
            ],
            rhs: zero,
        })
    }

    /// `v(a) - Σ αⱼ v(ξⱼ)` with right-hand side `ψ`. The points must move
    /// strictly monotonically away from `a`.
    pub fn multipoint(a: T, points: Vec<(T, T)>, psi: T) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidFunctional("multi-point needs at least one interior point".into()));
        }
        let ascending = points[0].1 > a;
        let mut prev = a.clone();
        for (_, xi) in &points {
            let ok = if ascending { *xi > prev } else { *xi < prev };
            if !ok {
                return Err(Error::InvalidFunctional(format!(
                    "multi-point locations must be strictly ordered away from {a}"
                )));
            }
            prev = xi.clone();
        }
        let mut terms = vec![Term { coeff: a.one(), order: 0, location: a }];
        terms.extend(points.into_iter().map(|(alpha, xi)| Term { coeff: -alpha, order: 0, location: xi }));
        Ok(BoundaryFunctional { kind: FunctionalKind::MultiPoint, terms, rhs: psi })
    }

    pub fn with_rhs(mut self, rhs: T) -> Self {
        self.rhs = rhs;
        self
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn rhs(&self) -> &T {
        &self.rhs
    }

    /// The boundary point the condition is attached to (its first term).
    pub fn anchor(&self) -> &T {
        &self.terms[0].location
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }

    pub fn locations(&self) -> impl Iterator<Item = &T> {
        self.terms.iter().map(|t| &t.location)
    }

    pub fn precision(&self) -> Precision {
        self.rhs.precision()
    }

    /// Checks every location against `[lo, hi]`.
    pub fn check_domain(&self, lo: &T, hi: &T) -> Result<()> {
        for loc in self.locations() {
            if loc < lo || loc > hi {
                return Err(Error::InvalidFunctional(format!("location {loc} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// `Σ coeffₖ · v^(orderₖ)(locationₖ)`.
    pub fn apply(&self, v: &impl Univariate<T>) -> T {
        let mut acc = self.rhs.zero();
        for t in &self.terms {
            acc.add_mul_assign(&t.coeff, &v.derivative(t.order, &t.location));
        }
        acc
    }

    /// Applies the functional along `axis` of a multivariate field, giving a
    /// field independent of that coordinate.
    pub fn along_axis(&self, axis: usize, inner: FieldRef<T>) -> AxisFunctional<T> {
        AxisFunctional { functional: self.clone(), axis, inner }
    }

    /// Applies the functional to one slot of a kernel.
    pub fn apply_to_kernel_slot(
        &self,
        kernel: &crate::constrained::ConstrainedKernel<T>,
        slot: Slot,
    ) -> Result<UnivariateTrace<T>> {
        kernel.trace(self, slot)
    }

    /// `first` on the first kernel slot and `second` on the other: `L1ₓ L2ᵧ K(x, y)`.
    pub fn bilinear(
        first: &BoundaryFunctional<T>,
        second: &BoundaryFunctional<T>,
        kernel: &crate::constrained::ConstrainedKernel<T>,
    ) -> Result<T> {
        let trace = kernel.trace(second, Slot::Second)?;
        trace.check_orders(first.max_order())?;
        Ok(first.apply(&trace))
    }
}

impl<T: Real> fmt::Display for BoundaryFunctional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = |v: &T| short_decimal(v);
        match self.kind {
            FunctionalKind::Dirichlet => write!(f, "dirichlet @{}", num(self.anchor()))?,
            FunctionalKind::Neumann => write!(f, "neumann @{}", num(self.anchor()))?,
            FunctionalKind::Robin => {
                write!(f, "robin {} {} @{}", num(&self.terms[0].coeff), num(&self.terms[1].coeff), num(self.anchor()))?
            }
            FunctionalKind::MultiPoint => {
                write!(f, "multipoint @{}", num(self.anchor()))?;
                for t in &self.terms[1..] {
                    write!(f, " {}@{}", num(&(-t.coeff.clone())), num(&t.location))?;
                }
            }
        }
        write!(f, " = {}", num(&self.rhs))
    }
}

fn short_decimal<T: Real>(v: &T) -> String {
    // Shortest f64 form when it round-trips at working precision.
    let f = v.to_f64();
    let s = format!("{f}");
    match T::parse_decimal(&s, v.precision()) {
        Some(back) if back == *v => s,
        _ => v.to_decimal(v.precision().effective_digits() as usize),
    }
}

/// Parses the text form used by the CLI and example listings:
///
/// ```text
/// dirichlet @<a> [= <rhs>]
/// neumann @<a> [= <rhs>]
/// robin <alpha> <beta> @<a> [= <rhs>]
/// multipoint @<a> <alpha1>@<xi1> ... [= <psi>]
/// ```
pub fn parse_functional<T: Real>(text: &str, prec: Precision) -> Result<BoundaryFunctional<T>> {
    let bad = |msg: &str| Error::InvalidFunctional(format!("{msg} in `{text}`"));
    let num = |s: &str| T::parse_decimal(s, prec).ok_or_else(|| bad(&format!("bad number `{s}`")));
    let (lhs, rhs) = match text.split_once('=') {
        Some((l, r)) => (l, Some(r.trim())),
        None => (text, None),
    };
    let mut tokens = lhs.split_whitespace();
    let keyword = tokens.next().ok_or_else(|| bad("empty functional"))?.to_ascii_lowercase();
    let rest: Vec<&str> = tokens.collect();
    fn at<'a>(s: &'a str, text: &str) -> Result<&'a str> {
        s.strip_prefix('@').ok_or_else(|| Error::InvalidFunctional(format!("expected `@<location>` in `{text}`")))
    }
    let functional = match (keyword.as_str(), rest.as_slice()) {
        ("dirichlet", [loc]) => BoundaryFunctional::dirichlet(num(at(loc, text)?)?),
        ("neumann", [loc]) => BoundaryFunctional::neumann(num(at(loc, text)?)?),
        ("robin", [alpha, beta, loc]) => BoundaryFunctional::robin(num(alpha)?, num(beta)?, num(at(loc, text)?)?)?,
        ("multipoint", [loc, points @ ..]) if !points.is_empty() => {
            let pts = points
                .iter()
                .map(|p| {
                    let (w, xi) = p.split_once('@').ok_or_else(|| bad("expected `<alpha>@<xi>`"))?;
                    Ok((num(w)?, num(xi)?))
                })
                .collect::<Result<Vec<_>>>()?;
            BoundaryFunctional::multipoint(num(at(loc, text)?)?, pts, T::zero_at(prec))?
        }
        _ => return Err(bad("unrecognised functional")),
    };
    Ok(match rhs {
        Some(r) => functional.with_rhs(num(r)?),
        None => functional,
    })
}

/// Which kernel argument a functional acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

impl Slot {
    pub fn other(self) -> Slot {
        match self {
            Slot::First => Slot::Second,
            Slot::Second => Slot::First,
        }
    }
}

/// A kernel with one argument consumed by functionals: a function of the
/// remaining (`free`) argument, stored as a combination of base-kernel
/// derivatives `Σ cₖ ∂^{oₖ}_{fixed} R(·, locₖ)`.
#[derive(Debug, Clone)]
pub struct UnivariateTrace<T> {
    base: KernelRef<T>,
    free: Slot,
    atoms: Vec<Term<T>>,
}

impl<T: Real> UnivariateTrace<T> {
    pub(crate) fn new(base: KernelRef<T>, free: Slot, atoms: Vec<Term<T>>) -> Self {
        UnivariateTrace { base, free, atoms }
    }

    pub fn free_slot(&self) -> Slot {
        self.free
    }

    pub(crate) fn atoms(&self) -> &[Term<T>] {
        &self.atoms
    }

    fn check_orders(&self, order: usize) -> Result<()> {
        let fixed = self.atoms.iter().map(|a| a.order).max().unwrap_or(0);
        if order + fixed > self.base.max_order() {
            return Err(Error::UnsupportedOrder { requested: order + fixed, max: self.base.max_order() });
        }
        Ok(())
    }

    /// `d^m/dt^m` of the trace at `t`.
    pub fn try_derivative(&self, m: usize, t: &T) -> Result<T> {
        self.check_orders(m)?;
        let mut acc = t.zero();
        for a in &self.atoms {
            let d = match self.free {
                Slot::First => self.base.mixed_partial(m, a.order, t, &a.location)?,
                Slot::Second => self.base.mixed_partial(a.order, m, &a.location, t)?,
            };
            acc.add_mul_assign(&a.coeff, &d);
        }
        Ok(acc)
    }

    pub fn eval(&self, t: &T) -> T {
        self.derivative(0, t)
    }
}

impl<T: Real> Univariate<T> for UnivariateTrace<T> {
    fn derivative(&self, order: usize, x: &T) -> T {
        self.try_derivative(order, x).expect("trace derivative order within kernel budget")
    }
}

/// `L` applied along one axis of a field: `Σ cₖ ∂_axis^{oₖ} F(p | axis = locₖ)`.
#[derive(Clone)]
pub struct AxisFunctional<T> {
    functional: BoundaryFunctional<T>,
    axis: usize,
    inner: FieldRef<T>,
}

impl<T: Real> AxisFunctional<T> {
    pub fn into_ref(self) -> FieldRef<T> {
        Arc::new(self)
    }
}

impl<T: Real> Field<T> for AxisFunctional<T> {
    fn value(&self, p: &[T]) -> T {
        let zeros = vec![0; p.len()];
        self.partial(p, &zeros)
    }

    fn partial(&self, p: &[T], orders: &[usize]) -> T {
        if orders[self.axis] > 0 || self.inner.is_zero() {
            return p[0].zero();
        }
        let mut q = p.to_vec();
        let mut o = orders.to_vec();
        let mut acc = p[0].zero();
        for t in self.functional.terms() {
            q[self.axis] = t.location.clone();
            o[self.axis] = t.order;
            acc.add_mul_assign(&t.coeff, &self.inner.partial(&q, &o));
        }
        acc
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}
