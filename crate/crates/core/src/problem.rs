//! Problem description shared by the solvers: a box domain, a linear
//! differential operator, boundary functionals per axis and data.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ConstantField, Field, FieldRef};
use crate::functionals::BoundaryFunctional;
use crate::numerics::{Precision, Real};

/// Axis-aligned box `Π [loₖ, hiₖ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain<T> {
    bounds: Vec<(T, T)>,
}

impl<T: Real> BoxDomain<T> {
    pub fn new(bounds: Vec<(T, T)>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 3 {
            return Err(Error::InvalidProblem(format!("{} dimensions (1 to 3 supported)", bounds.len())));
        }
        for (k, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidProblem(format!("empty interval [{lo}, {hi}] on axis {k}")));
            }
        }
        Ok(BoxDomain { bounds })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn lo(&self, axis: usize) -> &T {
        &self.bounds[axis].0
    }

    pub fn hi(&self, axis: usize) -> &T {
        &self.bounds[axis].1
    }

    pub fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    pub fn precision(&self) -> Precision {
        self.bounds[0].0.precision()
    }
}

/// Coefficient of an operator term.
#[derive(Clone)]
pub enum Coefficient<T> {
    Constant(T),
    Variable(FieldRef<T>),
}

impl<T: Real> Coefficient<T> {
    pub fn at(&self, p: &[T]) -> T {
        match self {
            Coefficient::Constant(c) => c.clone(),
            Coefficient::Variable(f) => f.value(p),
        }
    }
}

impl<T: fmt::Display> fmt::Debug for Coefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "{c}"),
            Coefficient::Variable(_) => f.write_str("<variable>"),
        }
    }
}

/// `coeff(p) · ∂^orders`.
#[derive(Clone)]
pub struct OperatorTerm<T> {
    pub coeff: Coefficient<T>,
    pub orders: Vec<usize>,
}

impl<T: fmt::Display> fmt::Debug for OperatorTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}·∂{:?}", self.coeff, self.orders)
    }
}

/// Linear differential operator `Σ aₜ(p) ∂^{αₜ}` with `|αₜ| ≤ 2`.
#[derive(Clone)]
pub struct OperatorSpec<T> {
    terms: Vec<OperatorTerm<T>>,
}

impl<T: Real> OperatorSpec<T> {
    pub fn new(terms: Vec<OperatorTerm<T>>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidProblem("operator has no terms".into()));
        };
        let dim = first.orders.len();
        for t in &terms {
            if t.orders.len() != dim {
                return Err(Error::InvalidProblem("operator terms disagree on dimension".into()));
            }
            let total: usize = t.orders.iter().sum();
            if total > 2 {
                return Err(Error::UnsupportedOrder { requested: total, max: 2 });
            }
        }
        Ok(OperatorSpec { terms })
    }

    /// `Σₖ ∂ₖ²` in `dim` dimensions, scaled by `scale`.
    pub fn laplacian(dim: usize, scale: T) -> Self {
        let terms = (0..dim)
            .map(|k| {
                let mut orders = vec![0; dim];
                orders[k] = 2;
                OperatorTerm { coeff: Coefficient::Constant(scale.clone()), orders }
            })
            .collect();
        OperatorSpec { terms }
    }

    pub fn terms(&self) -> &[OperatorTerm<T>] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms[0].orders.len()
    }

    /// `(L F)(p)`.
    pub fn apply(&self, field: &dyn Field<T>, p: &[T]) -> T {
        let mut acc = p[0].zero();
        for t in &self.terms {
            acc.add_mul_assign(&t.coeff.at(p), &field.partial(p, &t.orders));
        }
        acc
    }
}

impl<T: fmt::Display> fmt::Debug for OperatorSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.terms).finish()
    }
}

/// Boundary functionals acting along one axis, each with its data: a field
/// that does not depend on that axis' coordinate.
#[derive(Clone)]
pub struct AxisConditions<T> {
    pub functionals: Vec<BoundaryFunctional<T>>,
    pub data: Vec<FieldRef<T>>,
}

impl<T: Real> AxisConditions<T> {
    pub fn new(functionals: Vec<BoundaryFunctional<T>>, data: Vec<FieldRef<T>>) -> Result<Self> {
        if functionals.len() != data.len() {
            return Err(Error::InvalidProblem("one data field per boundary functional".into()));
        }
        if functionals.len() > 2 {
            return Err(Error::InvalidProblem("at most two functionals per axis".into()));
        }
        Ok(AxisConditions { functionals, data })
    }

    /// Data taken from each functional's constant right-hand side.
    pub fn from_rhs(functionals: Vec<BoundaryFunctional<T>>) -> Result<Self> {
        let data = functionals.iter().map(|f| Arc::new(ConstantField(f.rhs().clone())) as FieldRef<T>).collect();
        Self::new(functionals, data)
    }

    /// Data generated by applying each functional to a known solution.
    pub fn from_solution(functionals: Vec<BoundaryFunctional<T>>, axis: usize, u: &FieldRef<T>) -> Result<Self> {
        let data = functionals.iter().map(|f| f.along_axis(axis, u.clone()).into_ref()).collect();
        Self::new(functionals, data)
    }

    pub fn none() -> Self {
        AxisConditions { functionals: Vec::new(), data: Vec::new() }
    }
}

impl<T: Real> fmt::Debug for AxisConditions<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.functionals.iter().map(|l| l.to_string())).finish()
    }
}

/// `L u = f` on a box with per-axis boundary conditions.
#[derive(Clone)]
pub struct ProblemSpec<T> {
    pub domain: BoxDomain<T>,
    pub operator: OperatorSpec<T>,
    pub conditions: Vec<AxisConditions<T>>,
    pub rhs: FieldRef<T>,
    pub exact: Option<FieldRef<T>>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(
        domain: BoxDomain<T>,
        operator: OperatorSpec<T>,
        conditions: Vec<AxisConditions<T>>,
        rhs: FieldRef<T>,
    ) -> Result<Self> {
        let dim = domain.dim();
        if operator.dim() != dim || conditions.len() != dim {
            return Err(Error::InvalidProblem(format!(
                "dimension mismatch: domain {dim}, operator {}, conditions {}",
                operator.dim(),
                conditions.len()
            )));
        }
        for (k, c) in conditions.iter().enumerate() {
            for f in &c.functionals {
                f.check_domain(domain.lo(k), domain.hi(k))?;
            }
        }
        Ok(ProblemSpec { domain, operator, conditions, rhs, exact: None })
    }

    pub fn with_exact(mut self, exact: FieldRef<T>) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn precision(&self) -> Precision {
        self.domain.precision()
    }
}

impl<T: Real> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("domain", &self.domain)
            .field("operator", &self.operator)
            .field("conditions", &self.conditions)
            .finish_non_exhaustive()
    }
}
