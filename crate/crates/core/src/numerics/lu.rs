use super::{Matrix, Real};
use crate::error::{Error, Result};

/// LU factorization `P·A = L·U` with partial (row) pivoting.
///
/// `L` has a unit diagonal and is stored below the diagonal of `lu`; `U`
/// occupies the diagonal and above. Elimination order is fixed, so results
/// are bit-reproducible for a given precision.
#[derive(Debug, Clone)]
pub struct LuFactor<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    norm_one: T,
}

/// Factors a square matrix. Fails with [`Error::SingularMatrix`] when a pivot
/// magnitude drops to `tol_pivot · max|A|` or below.
pub fn lu_factor<T: Real>(a: &Matrix<T>) -> Result<LuFactor<T>> {
    assert!(a.is_square(), "lu_factor needs a square matrix");
    let n = a.rows();
    let norm_one = a.norm_one();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    if n == 0 {
        return Ok(LuFactor { lu, perm, norm_one });
    }
    let prec = a[(0, 0)].precision();
    let scale = a.max_abs();
    let threshold = scale.clone() * scale.lit(prec.tol_pivot());

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if !(best > threshold) {
            return Err(Error::SingularMatrix { index: k, magnitude: best.to_f64(), threshold: threshold.to_f64() });
        }
        lu.swap_rows(k, p);
        perm.swap(k, p);

        let (top, bottom) = lu.as_mut_slice().split_at_mut((k + 1) * n);
        let top = &top[k * n..];
        let pivot = top[k].clone();
        for row in bottom.chunks_mut(n) {
            if is_zero(&row[k]) {
                continue;
            }
            let l = row[k].clone() / &pivot;
            for j in (k + 1)..n {
                row[j].sub_mul_assign(&l, &top[j]);
            }
            row[k] = l;
        }
    }
    Ok(LuFactor { lu, perm, norm_one })
}

fn is_zero<T: Real>(x: &T) -> bool {
    *x == x.zero()
}

impl<T: Real> LuFactor<T> {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Smallest pivot magnitude, a cheap singularity indicator.
    pub fn min_pivot(&self) -> Option<T> {
        (0..self.dim()).map(|i| self.lu[(i, i)].abs()).reduce(|a, b| if b < a { b } else { a })
    }

    /// Solves `A·X = B`.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.dim();
        assert_eq!(b.rows(), n, "right-hand side has wrong row count");
        let cols: Vec<Vec<T>> = (0..b.cols())
            .map(|c| {
                let mut x: Vec<T> = (0..n).map(|i| b[(self.perm[i], c)].clone()).collect();
                self.substitute(&mut x);
                x
            })
            .collect();
        Matrix::from_fn(n, b.cols(), |i, c| cols[c][i].clone())
    }

    fn substitute(&self, x: &mut [T]) {
        let n = x.len();
        for i in 0..n {
            let (head, tail) = x.split_at_mut(i);
            let row = self.lu.row(i);
            for j in 0..i {
                tail[0].sub_mul_assign(&row[j], &head[j]);
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut(i + 1);
            let row = self.lu.row(i);
            let xi = &mut head[i];
            for j in (i + 1)..n {
                xi.sub_mul_assign(&row[j], &tail[j - i - 1]);
            }
            *xi /= &row[i];
        }
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.dim());
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        self.substitute(&mut x);
        x
    }

    /// Solves `Aᵀ·X = B`.
    pub fn solve_transpose(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.dim();
        assert_eq!(b.rows(), n, "right-hand side has wrong row count");
        let mut out = b.clone();
        for c in 0..b.cols() {
            let w = self.solve_transpose_vec(&b.col(c));
            for (i, v) in w.into_iter().enumerate() {
                out[(i, c)] = v;
            }
        }
        out
    }

    /// Aᵀ = Uᵀ Lᵀ P: solve Uᵀ z = b, then Lᵀ w = z, then undo the permutation.
    pub fn solve_transpose_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut w = b.to_vec();
        for i in 0..n {
            let (head, tail) = w.split_at_mut(i);
            for j in 0..i {
                tail[0].sub_mul_assign(&self.lu[(j, i)], &head[j]);
            }
            tail[0] /= &self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let (head, tail) = w.split_at_mut(i + 1);
            for j in (i + 1)..n {
                head[i].sub_mul_assign(&self.lu[(j, i)], &tail[j - i - 1]);
            }
        }
        let mut x = w.clone();
        for (i, v) in w.into_iter().enumerate() {
            x[self.perm[i]] = v;
        }
        x
    }

    /// Hager–Higham estimate of `‖A⁻¹‖₁`.
    pub fn inverse_norm_one_estimate(&self) -> T {
        let n = self.dim();
        let zero = self.lu.as_slice().first().map(|v| v.zero());
        let Some(zero) = zero else {
            return T::zero_at(super::Precision::Binary64);
        };
        let mut x: Vec<T> = vec![zero.ratio(1, n as i64); n];
        let mut estimate = zero.clone();
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            estimate = y.iter().fold(zero.clone(), |acc, v| acc + v.abs());
            let xi: Vec<T> = y.iter().map(|v| if *v < zero { zero.lit(-1.0) } else { zero.lit(1.0) }).collect();
            let z = self.solve_transpose_vec(&xi);
            let (mut j, mut zmax) = (0, zero.clone());
            for (i, v) in z.iter().enumerate() {
                if v.abs() > zmax {
                    zmax = v.abs();
                    j = i;
                }
            }
            let ztx = z.iter().zip(&x).fold(zero.clone(), |acc, (a, b)| acc + a.clone() * b);
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![zero.clone(); n];
            x[j] = zero.lit(1.0);
        }
        estimate
    }

    /// 1-norm condition number estimate `‖A‖₁·est(‖A⁻¹‖₁)`.
    pub fn condition_estimate(&self) -> T {
        self.norm_one.clone() * self.inverse_norm_one_estimate()
    }
}

/// Solves `A·X = B` and returns `X` with a 1-norm condition estimate of `A`.
pub fn lu_solve<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<(Matrix<T>, T)> {
    assert_eq!(a.rows(), b.rows(), "right-hand side has wrong row count");
    let f = lu_factor(a)?;
    let x = f.solve(b);
    Ok((x, f.condition_estimate()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Mp, Precision};

    fn hilbert<T: Real>(n: usize, prec: Precision) -> Matrix<T> {
        Matrix::from_fn(n, n, |i, j| T::from_ratio(1, (i + j + 1) as i64, prec))
    }

    #[test]
    fn identity_solve() {
        let p = Precision::Binary64;
        let a: Matrix<f64> = Matrix::identity(3, p);
        let b = Matrix::column(vec![1.0, 2.0, 3.0]);
        let (x, cond) = lu_solve(&a, &b).unwrap();
        assert_eq!(x.into_vec(), vec![1.0, 2.0, 3.0]);
        assert!((cond - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two() {
        let p = Precision::Binary64;
        let a: Matrix<f64> = Matrix::from_f64_rows(&[&[2.0, 1.0], &[1.0, 3.0]], p);
        let (x, _) = lu_solve(&a, &Matrix::column(vec![3.0, 4.0])).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-15 && (x[(1, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hilbert_four_recovers_ones() {
        let p = Precision::Binary64;
        let a: Matrix<f64> = hilbert(4, p);
        let b = Matrix::column(a.matvec(&[1.0; 4]));
        let (x, cond) = lu_solve(&a, &b).unwrap();
        let resid = a.matmul(&x).sub(&b).max_abs();
        assert!(resid <= 1e-10, "{resid}");
        for v in x.as_slice() {
            assert!((v - 1.0).abs() < 1e-9);
        }
        // cond_1(H4) = 28375
        assert!(cond > 1e4 && cond < 3e4, "{cond}");
    }

    #[test]
    fn singular_reports_pivot_index() {
        let p = Precision::Binary64;
        let a: Matrix<f64> = Matrix::from_f64_rows(&[&[1.0, 2.0], &[2.0, 4.0]], p);
        match lu_factor(&a) {
            Err(Error::SingularMatrix { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn transpose_solve_matches_explicit_transpose() {
        let p = Precision::Binary64;
        let a: Matrix<f64> = Matrix::from_f64_rows(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]], p);
        let b = Matrix::column(vec![1.0, -2.0, 0.5]);
        let f = lu_factor(&a).unwrap();
        let x1 = f.solve_transpose(&b);
        let x2 = lu_factor(&a.transpose()).unwrap().solve(&b);
        for (u, v) in x1.as_slice().iter().zip(x2.as_slice()) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn big_float_hilbert_is_accurate() {
        let p = Precision::Digits(60);
        let a: Matrix<Mp> = hilbert(12, p);
        let ones = vec![Mp::one_at(p); 12];
        let b = Matrix::column(a.matvec(&ones));
        let (x, _) = lu_solve(&a, &b).unwrap();
        for v in x.as_slice() {
            assert!((v.clone() - Mp::one_at(p)).abs().to_f64() < 1e-40);
        }
    }
}
