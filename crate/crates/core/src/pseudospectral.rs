//! Collocation with constrained product kernels on tensor grids.
//!
//! The trial space is spanned by `Πₖ Kₖ(xₖ, x_{j,k})` where each `Kₖ`
//! satisfies the homogeneous boundary functionals of axis `k`, so every
//! trial function satisfies all boundary conditions and only the PDE is
//! collocated, at interior nodes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::constrained::ConstrainedKernel;
use crate::error::{Error, Result, Stage};
use crate::field::{Field, FieldRef};
use crate::homogenization::homogenize_nd;
use crate::kernels::{GaussianKernel, Kernel};
use crate::numerics::{lu_factor, Matrix, Precision, Real};
use crate::problem::{BoxDomain, OperatorSpec, ProblemSpec};

/// Node placement along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridScheme {
    /// `a + (b − a) j / (n + 1)`, `j = 1..n`.
    #[default]
    UniformInterior,
    /// Chebyshev points of the first kind mapped into `(a, b)`.
    ChebyshevInterior,
    /// `a + (b − a) j / (n − 1)`, `j = 0..n−1`, endpoints included.
    UniformClosed,
}

impl FromStr for GridScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform-interior" => Ok(GridScheme::UniformInterior),
            "chebyshev" | "chebyshev-interior" => Ok(GridScheme::ChebyshevInterior),
            "closed" | "uniform-closed" => Ok(GridScheme::UniformClosed),
            _ => Err(Error::InvalidProblem(format!("unknown grid scheme `{s}`"))),
        }
    }
}

/// Tensor grid; points are ordered lexicographically with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    axes: Vec<Vec<T>>,
}

impl<T: Real> Grid<T> {
    pub fn from_axes(axes: Vec<Vec<T>>) -> Self {
        Grid { axes }
    }

    pub fn axes(&self) -> &[Vec<T>] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of flat index `i`.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            let n = self.axes[k].len();
            idx[k] = i % n;
            i /= n;
        }
        idx
    }

    pub fn point(&self, i: usize) -> Vec<T> {
        self.multi_index(i).iter().enumerate().map(|(k, &j)| self.axes[k][j].clone()).collect()
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Nodes along one interval.
pub fn axis_nodes<T: Real>(lo: &T, hi: &T, n: usize, scheme: GridScheme) -> Vec<T> {
    let width = hi.clone() - lo;
    match scheme {
        GridScheme::UniformInterior => {
            (1..=n).map(|j| lo.clone() + &(width.clone() * &lo.ratio(j as i64, (n + 1) as i64))).collect()
        }
        GridScheme::UniformClosed => {
            if n == 1 {
                return vec![lo.clone() + &(width * &lo.ratio(1, 2))];
            }
            (0..n).map(|j| lo.clone() + &(width.clone() * &lo.ratio(j as i64, (n - 1) as i64))).collect()
        }
        GridScheme::ChebyshevInterior => {
            let half = width * &lo.ratio(1, 2);
            let mid = lo.clone() + &half;
            (1..=n)
                .map(|j| {
                    let angle = lo.pi() * &lo.ratio((2 * j - 1) as i64, (2 * n) as i64);
                    mid.clone() - &(half.clone() * &angle.cos())
                })
                .collect()
        }
    }
}

/// Builds the grid and rejects nodes that sit on a boundary functional's
/// anchor point, where constrained basis functions degenerate.
pub fn build_grid<T: Real>(
    domain: &BoxDomain<T>,
    counts: &[usize],
    scheme: GridScheme,
    anchors: &[Vec<T>],
) -> Result<Grid<T>> {
    if counts.len() != domain.dim() {
        return Err(Error::InvalidProblem(format!("grid has {} axes, domain has {}", counts.len(), domain.dim())));
    }
    if counts.iter().any(|&n| n == 0) {
        return Err(Error::InvalidProblem("grid counts must be positive".into()));
    }
    let mut axes = Vec::with_capacity(counts.len());
    for (k, &n) in counts.iter().enumerate() {
        let nodes = axis_nodes(domain.lo(k), domain.hi(k), n, scheme);
        let width = domain.hi(k).clone() - domain.lo(k);
        let tol = width.clone() * &width.lit(domain.precision().tol_pivot());
        for node in &nodes {
            for a in anchors.get(k).into_iter().flatten() {
                if (node.clone() - a).abs() <= tol {
                    return Err(Error::NodeCollision { axis: k, node: node.to_f64() });
                }
            }
        }
        axes.push(nodes);
    }
    Ok(Grid { axes })
}

/// `Πₖ ∂^{αₖ}_{xₖ} Kₖ(xₖ, yₖ)`.
pub fn product_kernel_partial<T: Real>(
    kernels: &[ConstrainedKernel<T>],
    orders: &[usize],
    x: &[T],
    y: &[T],
) -> Result<T> {
    let mut v = x[0].one();
    for (k, kernel) in kernels.iter().enumerate() {
        v *= kernel.mixed_partial(orders[k], 0, &x[k], &y[k])?;
    }
    Ok(v)
}

pub fn product_kernel_eval<T: Real>(kernels: &[ConstrainedKernel<T>], x: &[T], y: &[T]) -> T {
    let zeros = vec![0; x.len()];
    product_kernel_partial(kernels, &zeros, x, y).expect("order zero is always supported")
}

/// `∂^m Kₖ(xᵢ, xⱼ)` on one axis, for each order in use.
struct AxisTables<T> {
    by_order: Vec<Option<Matrix<T>>>,
}

impl<T: Real> AxisTables<T> {
    fn build(kernel: &ConstrainedKernel<T>, nodes: &[T], orders: &[usize]) -> Result<Self> {
        let top = orders.iter().copied().max().unwrap_or(0);
        let mut by_order = vec![None; top + 1];
        for &m in orders {
            if by_order[m].is_some() {
                continue;
            }
            let n = nodes.len();
            let mut data = Vec::with_capacity(n * n);
            for xi in nodes {
                for xj in nodes {
                    data.push(kernel.mixed_partial(m, 0, xi, xj)?);
                }
            }
            by_order[m] = Some(Matrix::from_vec(n, n, data));
        }
        Ok(AxisTables { by_order })
    }

    fn get(&self, m: usize) -> &Matrix<T> {
        self.by_order[m].as_ref().expect("table built for every order in use")
    }
}

fn tables_for<T: Real>(
    grid: &Grid<T>,
    kernels: &[ConstrainedKernel<T>],
    ops: &[&[usize]],
) -> Result<Vec<AxisTables<T>>> {
    (0..grid.dim())
        .map(|k| {
            let orders: Vec<usize> = ops.iter().map(|o| o[k]).chain([0]).collect();
            AxisTables::build(&kernels[k], &grid.axes()[k], &orders)
        })
        .collect()
}

fn assemble_rows<T: Real>(n: usize, row: impl Fn(usize) -> Vec<T> + Sync) -> Matrix<T> {
    let rows: Vec<Vec<T>> = (0..n).into_par_iter().map(&row).collect();
    Matrix::from_vec(n, n, rows.into_iter().flatten().collect())
}

/// `Aᵢⱼ = Πₖ Kₖ(x_{i,k}, x_{j,k})`.
pub fn build_evaluation_matrix<T: Real>(grid: &Grid<T>, kernels: &[ConstrainedKernel<T>]) -> Matrix<T> {
    let zeros = vec![0; grid.dim()];
    let tables = tables_for(grid, kernels, &[&zeros]).expect("order zero is always supported");
    let idx: Vec<Vec<usize>> = (0..grid.len()).map(|i| grid.multi_index(i)).collect();
    assemble_rows(grid.len(), |i| {
        (0..grid.len())
            .map(|j| {
                let mut v = tables[0].get(0)[(idx[i][0], idx[j][0])].clone();
                for k in 1..grid.dim() {
                    v *= &tables[k].get(0)[(idx[i][k], idx[j][k])];
                }
                v
            })
            .collect()
    })
}

/// `(A_L)ᵢⱼ = Σₜ aₜ(xᵢ) Πₖ ∂^{αₜₖ} Kₖ(x_{i,k}, x_{j,k})`.
pub fn build_operator_matrix<T: Real>(
    grid: &Grid<T>,
    kernels: &[ConstrainedKernel<T>],
    op: &OperatorSpec<T>,
) -> Result<Matrix<T>> {
    let orders: Vec<&[usize]> = op.terms().iter().map(|t| t.orders.as_slice()).collect();
    let tables = tables_for(grid, kernels, &orders)?;
    let idx: Vec<Vec<usize>> = (0..grid.len()).map(|i| grid.multi_index(i)).collect();
    let points = grid.points();
    Ok(assemble_rows(grid.len(), |i| {
        let coeffs: Vec<T> = op.terms().iter().map(|t| t.coeff.at(&points[i])).collect();
        (0..grid.len())
            .map(|j| {
                let mut acc = points[i][0].zero();
                for (t, c) in op.terms().iter().zip(&coeffs) {
                    let mut v = c.clone();
                    for k in 0..grid.dim() {
                        v *= &tables[k].get(t.orders[k])[(idx[i][k], idx[j][k])];
                    }
                    acc += v;
                }
                acc
            })
            .collect()
    }))
}

/// `𝐋` with `𝐋·A = A_L`, from `A·𝐋ᵀ = A_Lᵀ` (A symmetric).
pub fn operational_matrix<T: Real>(a: &Matrix<T>, a_l: &Matrix<T>) -> Result<Matrix<T>> {
    let f = lu_factor(a)?;
    Ok(f.solve_transpose(&a_l.transpose()).transpose())
}

/// How the collocation system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Nodal values from `𝐋 u = F`, then `A λ = u`.
    #[default]
    Pseudospectral,
    /// `A_L λ = F`.
    Direct,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Pseudospectral => "ps",
            SolveMode::Direct => "direct",
        })
    }
}

impl FromStr for SolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ps" => Ok(SolveMode::Pseudospectral),
            "direct" => Ok(SolveMode::Direct),
            _ => Err(Error::InvalidProblem(format!("unknown solve mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    pub counts: Vec<usize>,
    pub shape: T,
    pub mode: SolveMode,
    pub scheme: GridScheme,
}

impl<T: Real> SolveOptions<T> {
    pub fn new(counts: Vec<usize>, shape: T) -> Self {
        SolveOptions { counts, shape, mode: SolveMode::default(), scheme: GridScheme::default() }
    }

    pub fn mode(mut self, mode: SolveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn scheme(mut self, scheme: GridScheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// Condition estimates (1-norm) of the factored matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Evaluation matrix `A`.
    pub cond_a: f64,
    /// The matrix the system was solved with: `𝐋` or `A_L`.
    pub cond_system: f64,
}

/// `u_N(p) = Σⱼ λⱼ Πₖ Kₖ(pₖ, x_{j,k}) + M(p)`.
#[derive(Clone)]
pub struct Solution<T> {
    lambda: Vec<T>,
    kernels: Vec<ConstrainedKernel<T>>,
    homogenization: FieldRef<T>,
    grid: Grid<T>,
    nodal: Vec<T>,
    diagnostics: Diagnostics,
}

impl<T: Real> Solution<T> {
    pub(crate) fn new(
        lambda: Vec<T>,
        kernels: Vec<ConstrainedKernel<T>>,
        homogenization: FieldRef<T>,
        grid: Grid<T>,
        nodal: Vec<T>,
        diagnostics: Diagnostics,
    ) -> Self {
        Solution { lambda, kernels, homogenization, grid, nodal, diagnostics }
    }

    pub fn coefficients(&self) -> &[T] {
        &self.lambda
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn kernels(&self) -> &[ConstrainedKernel<T>] {
        &self.kernels
    }

    pub fn homogenization(&self) -> &FieldRef<T> {
        &self.homogenization
    }

    /// Values of the kernel expansion (without `M`) at the grid nodes, as
    /// produced by the solve.
    pub fn nodal_values(&self) -> &[T] {
        &self.nodal
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    /// `∂^orders u_N(p)`.
    pub fn partial_at(&self, p: &[T], orders: &[usize]) -> Result<T> {
        let mut acc = self.homogenization.partial(p, orders);
        for (j, l) in self.lambda.iter().enumerate() {
            let y = self.grid.point(j);
            acc.add_mul_assign(l, &product_kernel_partial(&self.kernels, orders, p, &y)?);
        }
        Ok(acc)
    }

    pub fn evaluate(&self, p: &[T]) -> T {
        let zeros = vec![0; p.len()];
        self.partial_at(p, &zeros).expect("order zero is always supported")
    }

    pub fn evaluate_points(&self, points: &[Vec<T>]) -> Vec<T> {
        points.par_iter().map(|p| self.evaluate(p)).collect()
    }

    /// Values on the tensor grid spanned by `axes`, in lexicographic order,
    /// without forming the full kernel matrix.
    pub fn evaluate_tensor(&self, axes: &[Vec<T>]) -> Vec<T> {
        let dim = self.grid.dim();
        assert_eq!(axes.len(), dim, "evaluation grid dimension");
        // mode-k product with E_k[a][i] = K_k(q_a, x_i), one axis at a time
        let mut shape: Vec<usize> = self.grid.counts();
        let mut data = self.lambda.clone();
        for k in 0..dim {
            let nodes = &self.grid.axes()[k];
            let e: Vec<Vec<T>> =
                axes[k].par_iter().map(|q| nodes.iter().map(|x| self.kernels[k].eval(q, x)).collect()).collect();
            let outer: usize = shape[..k].iter().product();
            let inner: usize = shape[k + 1..].iter().product();
            let (n, m) = (shape[k], axes[k].len());
            let zero = self.lambda[0].zero();
            let mut next = vec![zero; outer * m * inner];
            for o in 0..outer {
                for (a, row) in e.iter().enumerate() {
                    for (i, w) in row.iter().enumerate() {
                        for r in 0..inner {
                            next[(o * m + a) * inner + r].add_mul_assign(w, &data[(o * n + i) * inner + r]);
                        }
                    }
                }
            }
            data = next;
            shape[k] = m;
        }
        let grid = Grid::from_axes(axes.to_vec());
        let points = grid.points();
        data.into_par_iter().zip(points.par_iter()).map(|(v, p)| v + &self.homogenization.value(p)).collect()
    }
}

impl<T: Real> Field<T> for Solution<T> {
    fn value(&self, p: &[T]) -> T {
        self.evaluate(p)
    }

    fn partial(&self, p: &[T], orders: &[usize]) -> T {
        self.partial_at(p, orders).expect("derivative order within kernel budget")
    }
}

impl<T: Real> fmt::Debug for Solution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solution")
            .field("counts", &self.grid.counts())
            .field("diagnostics", &self.diagnostics)
            .finish_non_exhaustive()
    }
}

/// Per-axis kernels carrying that axis' homogeneous boundary functionals.
pub fn constrained_kernels<T: Real>(problem: &ProblemSpec<T>, shape: &T) -> Result<Vec<ConstrainedKernel<T>>> {
    problem
        .conditions
        .iter()
        .map(|c| {
            let base = GaussianKernel::new(shape.clone()).into_ref();
            let homogeneous: Vec<_> = c.functionals.iter().map(|f| f.clone().with_rhs(shape.zero())).collect();
            ConstrainedKernel::impose_sequence(base, &homogeneous)
        })
        .collect()
}

// Point-evaluation functionals make every basis function vanish at their
// anchor, so a node there gives a zero row.
fn vanishes_at_anchor<T: Real>(f: &crate::functionals::BoundaryFunctional<T>) -> bool {
    matches!(f.terms(), [t] if t.order == 0)
}

/// Solves `L u = f` with boundary-condition-satisfying kernels.
pub fn solve<T: Real>(problem: &ProblemSpec<T>, opts: &SolveOptions<T>) -> Result<Solution<T>> {
    let m =
        homogenize_nd(&problem.domain, &problem.conditions).map_err(|e| e.in_stage(Stage::Homogenization))?.into_ref();
    let kernels = constrained_kernels(problem, &opts.shape).map_err(|e| e.in_stage(Stage::KernelConstruction))?;
    let anchors: Vec<Vec<T>> = problem
        .conditions
        .iter()
        .map(|c| c.functionals.iter().filter(|f| vanishes_at_anchor(f)).map(|f| f.anchor().clone()).collect())
        .collect();
    let grid = build_grid(&problem.domain, &opts.counts, opts.scheme, &anchors).map_err(|e| e.in_stage(Stage::Grid))?;

    let assemble = || -> Result<_> {
        let a = build_evaluation_matrix(&grid, &kernels);
        let a_l = build_operator_matrix(&grid, &kernels, &problem.operator)?;
        let f: Vec<T> = grid
            .points()
            .par_iter()
            .map(|p| {
                let mut v = problem.rhs.value(p);
                if !m.is_zero() {
                    v -= problem.operator.apply(m.as_ref(), p);
                }
                v
            })
            .collect();
        Ok((a, a_l, f))
    };
    let (a, a_l, f) = assemble().map_err(|e: Error| e.in_stage(Stage::Assembly))?;

    let linear = || -> Result<_> {
        let fa = lu_factor(&a)?;
        let cond_a = fa.condition_estimate().to_f64();
        match opts.mode {
            SolveMode::Pseudospectral => {
                let op = fa.solve_transpose(&a_l.transpose()).transpose();
                let fl = lu_factor(&op)?;
                let u = fl.solve_vec(&f);
                let lambda = fa.solve_vec(&u);
                Ok((lambda, u, Diagnostics { cond_a, cond_system: fl.condition_estimate().to_f64() }))
            }
            SolveMode::Direct => {
                let fl = lu_factor(&a_l)?;
                let lambda = fl.solve_vec(&f);
                let u = a.matvec(&lambda);
                Ok((lambda, u, Diagnostics { cond_a, cond_system: fl.condition_estimate().to_f64() }))
            }
        }
    };
    let (lambda, nodal, diagnostics) = linear().map_err(|e: Error| e.in_stage(Stage::LinearSolve))?;
    Ok(Solution::new(lambda, kernels, m, grid, nodal, diagnostics))
}

/// Points per axis of the error-reporting grid (boundary included).
pub fn metric_points_per_axis(dim: usize) -> usize {
    match dim {
        1 => 201,
        2 => 51,
        _ => 21,
    }
}

/// Maximum absolute error and relative error (max error over max |exact|)
/// on the standard metric grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub max_abs: f64,
    pub relative: f64,
}

pub fn error_on_metric_grid<T: Real>(
    solution: &Solution<T>,
    exact: &dyn Field<T>,
    domain: &BoxDomain<T>,
) -> ErrorReport {
    let n = metric_points_per_axis(domain.dim());
    let axes: Vec<Vec<T>> =
        (0..domain.dim()).map(|k| axis_nodes(domain.lo(k), domain.hi(k), n, GridScheme::UniformClosed)).collect();
    let approx = solution.evaluate_tensor(&axes);
    let points = Grid::from_axes(axes).points();
    let exact: Vec<T> = points.par_iter().map(|p| exact.value(p)).collect();
    let zero = approx[0].zero();
    let (mut err, mut scale) = (zero.clone(), zero);
    for (a, e) in approx.iter().zip(&exact) {
        err = err.max_of((a.clone() - e).abs());
        scale = scale.max_of(e.abs());
    }
    let rel = if scale == scale.zero() { err.clone() } else { err.clone() / &scale };
    ErrorReport { max_abs: err.to_f64(), relative: rel.to_f64() }
}

/// Convenience: same precision as `problem`.
pub fn precision_of<T: Real>(problem: &ProblemSpec<T>) -> Precision {
    problem.precision()
}

pub(crate) fn zero_map<T: Real>(prec: Precision) -> FieldRef<T> {
    Arc::new(crate::field::ConstantField(T::zero_at(prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExprField, Jet};
    use crate::functionals::BoundaryFunctional;
    use crate::numerics::{Elementary, Mp};
    use crate::problem::{AxisConditions, Coefficient, OperatorTerm};

    #[test]
    fn grid_examples() {
        let d = BoxDomain::new(vec![(0.0, 1.0)]).unwrap();
        let g = build_grid(&d, &[3], GridScheme::UniformInterior, &[vec![0.0, 1.0]]).unwrap();
        assert_eq!(g.axes()[0], vec![0.25, 0.5, 0.75]);
        let c = build_grid(&d, &[4], GridScheme::ChebyshevInterior, &[]).unwrap();
        let pi = std::f64::consts::PI;
        let expect: Vec<f64> = [7.0, 5.0, 3.0, 1.0].iter().map(|k| 0.5 + 0.5 * (k * pi / 8.0).cos()).collect();
        for (u, v) in c.axes()[0].iter().zip(expect) {
            assert!((u - v).abs() < 1e-15);
        }
        let d2 = BoxDomain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let g2 = build_grid(&d2, &[2, 2], GridScheme::UniformInterior, &[]).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(g2.points()[1], vec![third, 2.0 * third]);
        assert_eq!(g2.len(), 4);
        let err = build_grid(&d, &[1], GridScheme::UniformInterior, &[vec![0.5]]).unwrap_err();
        assert!(matches!(err, Error::NodeCollision { axis: 0, .. }));
    }

    fn free(c: f64) -> ConstrainedKernel<f64> {
        ConstrainedKernel::unconstrained(GaussianKernel::new(c).into_ref())
    }

    #[test]
    fn evaluation_matrix_examples() {
        let g = Grid::from_axes(vec![vec![0.5]]);
        assert_eq!(build_evaluation_matrix(&g, &[free(1.0)]).as_slice(), &[1.0]);
        let g = Grid::from_axes(vec![vec![0.25, 0.75]]);
        let a = build_evaluation_matrix(&g, &[free(1.0)]);
        assert!((a[(0, 1)] - 0.778_800_78).abs() < 1e-8);
        let k = ConstrainedKernel::impose_sequence(
            GaussianKernel::new(1.0).into_ref(),
            &[BoundaryFunctional::dirichlet(0.0), BoundaryFunctional::dirichlet(1.0)],
        )
        .unwrap();
        let g = Grid::from_axes(vec![vec![0.1, 0.3], vec![0.2, 0.6, 0.9]]);
        let a = build_evaluation_matrix(&g, &[k.clone(), k]);
        assert!(a.asymmetry().unwrap() < 1e-14);
        let p = [0.4, -0.2, 0.7];
        assert!((product_kernel_eval(&[free(1.0), free(2.0), free(0.5)], &p, &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn operator_matrix_examples() {
        let g = Grid::from_axes(vec![vec![0.5]]);
        let op = OperatorSpec::laplacian(1, 1.0);
        assert!((build_operator_matrix(&g, &[free(1.0)], &op).unwrap()[(0, 0)] + 2.0).abs() < 1e-15);
        let id =
            OperatorSpec::new(vec![OperatorTerm { coeff: Coefficient::Constant(1.0), orders: vec![0, 0] }]).unwrap();
        let g = Grid::from_axes(vec![vec![0.2, 0.7], vec![0.1, 0.5]]);
        let ks = [free(1.3), free(0.8)];
        assert_eq!(build_operator_matrix(&g, &ks, &id).unwrap(), build_evaluation_matrix(&g, &ks));

        // 2D Laplacian rows against finite differences of the product kernel
        let lap = OperatorSpec::laplacian(2, 1.0);
        let al = build_operator_matrix(&g, &ks, &lap).unwrap();
        let h = 1e-4;
        let pts = g.points();
        for i in 0..4 {
            for j in 0..4 {
                let k = |x: f64, y: f64| product_kernel_eval(&ks, &[x, y], &pts[j]);
                let (x, y) = (pts[i][0], pts[i][1]);
                let fd = (k(x + h, y) + k(x - h, y) + k(x, y + h) + k(x, y - h) - 4.0 * k(x, y)) / (h * h);
                assert!((al[(i, j)] - fd).abs() <= 1e-4 * al[(i, j)].abs().max(1e-2));
            }
        }
    }

    #[test]
    fn operational_matrix_identity_cases() {
        let p = Precision::Binary64;
        let al: Matrix<f64> = Matrix::from_f64_rows(&[&[1.0, 2.0], &[3.0, 4.0]], p);
        assert_eq!(operational_matrix(&Matrix::identity(2, p), &al).unwrap(), al);
        let one = |v: f64| Matrix::from_vec(1, 1, vec![v]);
        assert!((operational_matrix(&one(4.0), &one(2.0)).unwrap()[(0, 0)] - 0.5).abs() < 1e-16);
    }

    fn inv_one_plus<S: Elementary>(p: &[S]) -> S {
        (p[0].lit(1.0) + &p[0]).recip()
    }

    fn one_plus<S: Elementary>(p: &[S]) -> S {
        p[0].lit(1.0) + &p[0]
    }

    fn ex1_problem<T: Real>(eps: T) -> ProblemSpec<T> {
        let prec = eps.precision();
        let (z, one) = (T::zero_at(prec), T::one_at(prec));
        let d = BoxDomain::new(vec![(z.clone(), one.clone())]).unwrap();
        let inv = ExprField::new(inv_one_plus::<T>, inv_one_plus::<Jet<T>>).into_ref();
        let op = OperatorSpec::new(vec![
            OperatorTerm { coeff: Coefficient::Constant(eps.clone()), orders: vec![2] },
            OperatorTerm { coeff: Coefficient::Variable(inv), orders: vec![1] },
        ])
        .unwrap();
        let conds = AxisConditions::from_rhs(vec![
            BoundaryFunctional::robin(one.clone(), -eps, z.clone()).unwrap().with_rhs(one.clone()),
            BoundaryFunctional::robin(one.clone(), one.clone(), one.clone()).unwrap().with_rhs(one),
        ])
        .unwrap();
        let f = ExprField::new(one_plus::<T>, one_plus::<Jet<T>>).into_ref();
        ProblemSpec::new(d, op, vec![conds], f).unwrap()
    }

    #[test]
    fn operational_matrix_residual_on_a_small_assembly() {
        let prec = Precision::Digits(50);
        let prob = ex1_problem(Mp::from_ratio(1, 2, prec));
        let ks = constrained_kernels(&prob, &Mp::one_at(prec)).unwrap();
        let anchors = vec![vec![Mp::zero_at(prec), Mp::one_at(prec)]];
        let g = build_grid(&prob.domain, &[16], GridScheme::UniformInterior, &anchors).unwrap();
        let a = build_evaluation_matrix(&g, &ks);
        let al = build_operator_matrix(&g, &ks, &prob.operator).unwrap();
        let l = operational_matrix(&a, &al).unwrap();
        let res = l.matmul(&a).sub(&al).norm_inf();
        assert!(res.to_f64() <= 1e-38 * al.norm_inf().to_f64(), "{res}");

        // rows of A_L against finite differences of the constrained kernel
        let k = &ks[0];
        let h = 1e-6;
        let ff = |x: f64, y: f64| k.eval(&Mp::from_f64(x, prec), &Mp::from_f64(y, prec)).to_f64();
        for (i, j) in [(0usize, 3usize), (7, 7), (15, 2)] {
            let (x, y) = (g.axes()[0][i].to_f64(), g.axes()[0][j].to_f64());
            let d1 = (ff(x + h, y) - ff(x - h, y)) / (2.0 * h);
            let d2 = (ff(x + h, y) - 2.0 * ff(x, y) + ff(x - h, y)) / (h * h);
            let fd = 0.5 * d2 + d1 / (1.0 + x);
            let got = al[(i, j)].to_f64();
            assert!((got - fd).abs() <= 1e-4 * got.abs().max(1e-3), "{got} {fd}");
        }
    }

    #[test]
    fn linear_solution_is_reproduced() {
        // u'' = 0, u(0) = 0, u(1) = 1
        let d = BoxDomain::new(vec![(0.0, 1.0)]).unwrap();
        let conds = AxisConditions::from_rhs(vec![
            BoundaryFunctional::dirichlet(0.0),
            BoundaryFunctional::dirichlet(1.0).with_rhs(1.0),
        ])
        .unwrap();
        let prob =
            ProblemSpec::new(d, OperatorSpec::laplacian(1, 1.0), vec![conds], zero_map(Precision::Binary64)).unwrap();
        let s = solve(&prob, &SolveOptions::new(vec![6], 1.0)).unwrap();
        assert!((s.evaluate(&[0.5]) - 0.5).abs() < 1e-12);
    }

    fn sinusoid<S: Elementary>(p: &[S]) -> S {
        (p[0].clone() * &p[0].lit(2.0)).sin() * (p[1].clone() + &p[1].lit(0.5)).exp()
    }

    #[test]
    fn boundary_conditions_hold_exactly_and_modes_agree() {
        let prec = Precision::Digits(40);
        let u = ExprField::new(sinusoid::<Mp>, sinusoid::<Jet<Mp>>).into_ref();
        let z = Mp::zero_at(prec);
        let one = Mp::one_at(prec);
        let d = BoxDomain::new(vec![(z.clone(), one.clone()), (z.clone(), one.clone())]).unwrap();
        let conds = vec![
            AxisConditions::from_solution(
                vec![BoundaryFunctional::dirichlet(z.clone()), BoundaryFunctional::neumann(one.clone())],
                0,
                &u,
            )
            .unwrap(),
            AxisConditions::from_solution(
                vec![
                    BoundaryFunctional::robin(one.clone(), one.lit(-0.5), z.clone()).unwrap(),
                    BoundaryFunctional::dirichlet(one.clone()),
                ],
                1,
                &u,
            )
            .unwrap(),
        ];
        let op = OperatorSpec::laplacian(2, one.clone());
        let uu = u.clone();
        let rhs = ExprField::new(
            move |p: &[Mp]| op_lap(uu.as_ref(), p),
            |_p: &[Jet<Mp>]| unreachable!("rhs derivatives are never requested"),
        )
        .into_ref();
        let prob = ProblemSpec::new(d, op, conds.clone(), rhs).unwrap().with_exact(u.clone());
        let opts = SolveOptions::new(vec![5, 5], Mp::from_f64(0.5, prec));
        let s = solve(&prob, &opts).unwrap();
        let sd = solve(&prob, &opts.clone().mode(SolveMode::Direct)).unwrap();
        let pts: Vec<Vec<Mp>> =
            (0..7).map(|i| vec![Mp::from_ratio(i, 6, prec), Mp::from_ratio(6 - i, 6, prec)]).collect();
        let res = crate::homogenization::boundary_residual(&s, &conds, &pts);
        assert!(res.to_f64() < 1e-30, "{res}");
        let scale = s.nodal_values().iter().fold(z.clone(), |a, v| a.max_of(v.abs()));
        for (a, b) in s.nodal_values().iter().zip(sd.nodal_values()) {
            assert!(((a.clone() - b).abs() / &scale).to_f64() < 1e-20);
        }
        // nodal values are reproduced by the expansion
        for (i, p) in s.grid().points().iter().enumerate() {
            let v = s.evaluate(p) - &s.homogenization().value(p);
            assert!((v - &s.nodal_values()[i]).abs().to_f64() < 1e-25);
        }
        let err = error_on_metric_grid(&s, u.as_ref(), &prob.domain);
        assert!(err.max_abs < 1e-2, "{err:?}");
        // tensor evaluation agrees with pointwise evaluation
        let axes = vec![vec![Mp::from_f64(0.1, prec), Mp::from_f64(0.8, prec)], vec![Mp::from_f64(0.35, prec)]];
        let t = s.evaluate_tensor(&axes);
        let q = s.evaluate(&[Mp::from_f64(0.8, prec), Mp::from_f64(0.35, prec)]);
        assert!((t[1].clone() - q).abs().to_f64() < 1e-30);
    }

    fn op_lap(u: &dyn Field<Mp>, p: &[Mp]) -> Mp {
        u.partial(p, &[2, 0]) + u.partial(p, &[0, 2])
    }
}
