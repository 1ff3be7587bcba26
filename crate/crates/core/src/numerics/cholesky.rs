use super::{Matrix, Real};
use crate::error::{Error, Result};

/// Outcome of a Cholesky attempt. Failure is a result, not an error: it
/// means the matrix is not numerically positive definite.
#[derive(Debug, Clone)]
pub enum Cholesky<T> {
    /// Lower-triangular `G` with `G·Gᵀ = A`.
    Factor(Matrix<T>),
    /// A non-positive pivot appeared at this index.
    NotPositiveDefinite { index: usize },
}

impl<T> Cholesky<T> {
    pub fn is_factor(&self) -> bool {
        matches!(self, Cholesky::Factor(_))
    }

    pub fn factor(self) -> Option<Matrix<T>> {
        match self {
            Cholesky::Factor(g) => Some(g),
            Cholesky::NotPositiveDefinite { .. } => None,
        }
    }
}

/// Cholesky factorization of a symmetric matrix.
///
/// Rejects inputs whose asymmetry exceeds `tol_sym` (absolute).
pub fn cholesky<T: Real>(a: &Matrix<T>, tol_sym: f64) -> Result<Cholesky<T>> {
    let asym = a.asymmetry().ok_or_else(|| Error::NotSymmetric { asymmetry: f64::INFINITY })?;
    if asym.to_f64() > tol_sym {
        return Err(Error::NotSymmetric { asymmetry: asym.to_f64() });
    }
    let n = a.rows();
    let mut g = a.clone();
    for j in 0..n {
        let mut d = g[(j, j)].clone();
        for k in 0..j {
            let gjk = g[(j, k)].clone();
            d.sub_mul_assign(&gjk, &gjk);
        }
        if !(d > d.zero()) {
            return Ok(Cholesky::NotPositiveDefinite { index: j });
        }
        let djj = d.sqrt();
        for i in (j + 1)..n {
            let mut s = g[(i, j)].clone();
            for k in 0..j {
                let (gik, gjk) = (g[(i, k)].clone(), g[(j, k)].clone());
                s.sub_mul_assign(&gik, &gjk);
            }
            g[(i, j)] = s / &djj;
        }
        g[(j, j)] = djj;
        for k in (j + 1)..n {
            g[(j, k)] = d.zero();
        }
    }
    Ok(Cholesky::Factor(g))
}
