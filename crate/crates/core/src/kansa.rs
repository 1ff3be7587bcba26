//! Unsymmetric RBF collocation with plain Gaussian product kernels: PDE rows
//! at interior nodes, boundary-condition rows at boundary nodes.

use rayon::prelude::*;

use crate::constrained::ConstrainedKernel;
use crate::error::{Error, Result, Stage};
use crate::functionals::BoundaryFunctional;
use crate::kernels::GaussianKernel;
use crate::numerics::{lu_factor, Matrix, Real};
use crate::problem::ProblemSpec;
use crate::pseudospectral::{
    axis_nodes, build_evaluation_matrix, build_operator_matrix, product_kernel_partial, zero_map, Diagnostics, Grid,
    GridScheme, Solution,
};

/// What a collocation node enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Pde,
    /// Functional `index` of axis `axis`.
    Boundary {
        axis: usize,
        index: usize,
    },
}

/// Assigns each node of a closed grid to the PDE or to one boundary
/// functional. A node on a face takes the functional anchored there; at
/// corners lower axes win.
pub fn classify_nodes<T: Real>(problem: &ProblemSpec<T>, grid: &Grid<T>) -> Vec<RowKind> {
    (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            for (axis, c) in problem.conditions.iter().enumerate() {
                for (index, f) in c.functionals.iter().enumerate() {
                    if *f.anchor() == p[axis] {
                        return RowKind::Boundary { axis, index };
                    }
                }
            }
            RowKind::Pde
        })
        .collect()
}

fn boundary_row<T: Real>(
    kernels: &[ConstrainedKernel<T>],
    grid: &Grid<T>,
    p: &[T],
    axis: usize,
    functional: &BoundaryFunctional<T>,
) -> Result<Vec<T>> {
    (0..grid.len())
        .map(|j| {
            let y = grid.point(j);
            let mut acc = p[0].zero();
            let mut q = p.to_vec();
            let mut orders = vec![0; p.len()];
            for t in functional.terms() {
                q[axis] = t.location.clone();
                orders[axis] = t.order;
                acc.add_mul_assign(&t.coeff, &product_kernel_partial(kernels, &orders, &q, &y)?);
            }
            Ok(acc)
        })
        .collect()
}

/// Solves `problem` on an `n₁×…×n_d` grid that includes the boundary.
pub fn kansa_solve<T: Real>(problem: &ProblemSpec<T>, counts: &[usize], shape: &T) -> Result<Solution<T>> {
    let dim = problem.dim();
    if counts.len() != dim || counts.iter().any(|&n| n < 2) {
        return Err(Error::InvalidProblem(format!("kansa grid needs {dim} counts of at least 2")).in_stage(Stage::Grid));
    }
    let axes: Vec<Vec<T>> = (0..dim)
        .map(|k| axis_nodes(problem.domain.lo(k), problem.domain.hi(k), counts[k], GridScheme::UniformClosed))
        .collect();
    let grid = Grid::from_axes(axes);
    let kernels: Vec<ConstrainedKernel<T>> =
        (0..dim).map(|_| ConstrainedKernel::unconstrained(GaussianKernel::new(shape.clone()).into_ref())).collect();
    let kinds = classify_nodes(problem, &grid);

    let assemble = || -> Result<_> {
        let pde = build_operator_matrix(&grid, &kernels, &problem.operator)?;
        let points = grid.points();
        let rows: Vec<(Vec<T>, T)> = points
            .par_iter()
            .zip(kinds.par_iter())
            .enumerate()
            .map(|(i, (p, kind))| match *kind {
                RowKind::Pde => Ok((pde.row(i).to_vec(), problem.rhs.value(p))),
                RowKind::Boundary { axis, index } => {
                    let c = &problem.conditions[axis];
                    let row = boundary_row(&kernels, &grid, p, axis, &c.functionals[index])?;
                    Ok((row, c.data[index].value(p)))
                }
            })
            .collect::<Result<_>>()?;
        let n = grid.len();
        let (data, rhs): (Vec<Vec<T>>, Vec<T>) = rows.into_iter().unzip();
        Ok((Matrix::from_vec(n, n, data.into_iter().flatten().collect()), rhs))
    };
    let (system, rhs) = assemble().map_err(|e: Error| e.in_stage(Stage::Assembly))?;

    let factor = lu_factor(&system).map_err(|e| e.in_stage(Stage::LinearSolve))?;
    let lambda = factor.solve_vec(&rhs);
    let a = build_evaluation_matrix(&grid, &kernels);
    let cond_a = lu_factor(&a).map(|f| f.condition_estimate().to_f64()).unwrap_or(f64::INFINITY);
    let diagnostics = Diagnostics { cond_a, cond_system: factor.condition_estimate().to_f64() };
    let nodal = a.matvec(&lambda);
    Ok(Solution::new(lambda, kernels, zero_map(problem.precision()), grid, nodal, diagnostics))
}
