//! Minimal dense linear algebra for the solver kernels.
//!
//! The problems here are small (sensing matrices are `m x n` with `m` in the
//! tens, constraint systems have a few dozen unknowns), so a plain row-major
//! matrix with a Cholesky factorization and a cyclic Jacobi eigensolver covers
//! everything the library needs while staying generic over the scalar type.

use crate::{real, Error, Real, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from a row-major data vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must match dimensions");
        DMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Copies column `j` into a new vector.
    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> DMat<T> {
        let mut t = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self^T * x`.
    pub fn tr_matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DMat<T>) -> DMat<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Gram matrix `self^T * self`.
    pub fn gram(&self) -> DMat<T> {
        let mut g = DMat::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for p in 0..self.cols {
                let rp = r[p];
                if rp == T::zero() {
                    continue;
                }
                for q in p..self.cols {
                    g[(p, q)] += rp * r[q];
                }
            }
        }
        for p in 0..self.cols {
            for q in 0..p {
                g[(p, q)] = g[(q, p)];
            }
        }
        g
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl<T> std::ops::Index<(usize, usize)> for DMat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// `a - b` elementwise.
pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: DMat<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factors `a = L L^T`. Fails on a non-positive pivot.
    pub fn new(a: &DMat<T>) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::invalid("Cholesky needs a square matrix"));
        }
        if !a.is_finite() {
            return Err(Error::numeric("non-finite entries in Cholesky input"));
        }
        let mut l = DMat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s <= T::zero() || !s.is_finite() {
                        return Err(Error::numeric(format!(
                            "Cholesky pivot {i} is not positive ({s})"
                        )));
                    }
                    l[(i, j)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn lower(&self) -> &DMat<T> {
        &self.lower
    }

    /// Solves `L w = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [T]) {
        let n = self.lower.rows();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.lower[(i, k)] * b[k];
            }
            b[i] = s / self.lower[(i, i)];
        }
    }

    /// Solves `L^T x = b` in place.
    pub fn solve_lower_t_in_place(&self, b: &mut [T]) {
        let n = self.lower.rows();
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.lower[(k, i)] * b[k];
            }
            b[i] = s / self.lower[(i, i)];
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        self.solve_lower_t_in_place(&mut x);
        x
    }

    /// `log det A = 2 * sum_i log L_ii`.
    pub fn log_det(&self) -> T {
        let two = real::<T>(2.0);
        (0..self.lower.rows())
            .map(|i| self.lower[(i, i)].ln())
            .sum::<T>()
            * two
    }
}

/// Eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.
///
/// Returns eigenvalues (ascending) and the matrix whose columns are the
/// matching eigenvectors. Intended for the small systems that arise in the
/// consensus constraint analysis (a few dozen rows).
pub fn jacobi_eigh<T: Real>(a: &DMat<T>) -> Result<(Vec<T>, DMat<T>)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::invalid("eigendecomposition needs a square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::numeric("non-finite entries in eigensolver input"));
    }
    let mut m = a.clone();
    let mut v = DMat::identity(n);
    let eps = real::<T>(1e-30);
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= eps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (real::<T>(2.0) * apq);
                let t = {
                    let sign = if theta >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut pairs: Vec<(T, usize)> = (0..n).map(|i| (m[(i, i)], i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    let eigvals: Vec<T> = pairs.iter().map(|&(w, _)| w).collect();
    let mut eigvecs = DMat::zeros(n, n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for k in 0..n {
            eigvecs[(k, new_col)] = v[(k, old_col)];
        }
    }
    Ok((eigvals, eigvecs))
}

/// Applies the Moore-Penrose pseudoinverse of a symmetric PSD matrix (given its
/// eigendecomposition) to a vector.
pub fn pinv_apply<T: Real>(eigvals: &[T], eigvecs: &DMat<T>, b: &[T]) -> Vec<T> {
    let n = eigvals.len();
    let wmax = eigvals.iter().fold(T::zero(), |m, &w| m.max(w.abs()));
    let tol = wmax * real::<T>(1e-12);
    let mut x = vec![T::zero(); n];
    for j in 0..n {
        if eigvals[j].abs() <= tol {
            continue;
        }
        let vj = eigvecs.col(j);
        let coef = dot(&vj, b) / eigvals[j];
        for (xi, &vji) in x.iter_mut().zip(&vj) {
            *xi += coef * vji;
        }
    }
    x
}
