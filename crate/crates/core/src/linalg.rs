//! Small dense linear algebra: complex LU with partial pivoting and a cyclic
//! Jacobi eigensolver for real symmetric matrices.
//!
//! Device matrices here are at most a few dozen rows, so everything is dense
//! and row-major.

use num_complex::Complex;

use crate::scalar::Real;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self[(i, i)]
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// LU factorisation with partial pivoting. Fails when a pivot is zero to
    /// within `dim * eps` of the largest entry.
    pub fn lu(&self) -> Option<Lu<T>> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.max_abs();
        let tiny = T::epsilon() * T::from(n.max(1)).unwrap() * scale;
        if scale == T::zero() {
            return None;
        }
        for col in 0..n {
            let (p, pmag) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > tiny) {
                return None;
            }
            if p != col {
                for j in 0..n {
                    a.swap(col * n + j, p * n + j);
                }
                perm.swap(col, p);
            }
            let pivot = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / pivot;
                if f.re == T::zero() && f.im == T::zero() {
                    continue;
                }
                a[r * n + col] = f;
                for j in col + 1..n {
                    let u = a[col * n + j];
                    a[r * n + j] -= f * u;
                }
            }
        }
        Some(Lu { dim: n, lu: a, perm })
    }

    /// Solves `self * x = b`, or `None` when singular.
    pub fn solve(&self, b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        self.lu().map(|lu| lu.solve(b))
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu()?;
        let n = self.dim;
        let mut inv = Self::zeros(n);
        let mut e = vec![Complex::new(T::zero(), T::zero()); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex::new(T::zero(), T::zero()));
            e[j] = Complex::new(T::one(), T::zero());
            let col = lu.solve(&e);
            for (i, z) in col.into_iter().enumerate() {
                inv[(i, j)] = z;
            }
        }
        Some(inv)
    }
}

impl<T> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Packed LU factors (unit lower triangle below the diagonal) plus row permutation.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    dim: usize,
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Eigenvalues of a real symmetric matrix (row-major, `dim * dim`), ascending.
///
/// Cyclic Jacobi rotations; converges quadratically and is accurate to a few
/// ulps of the spectral radius for the small matrices used here.
pub fn symmetric_eigenvalues<T: Real>(dim: usize, entries: &[T]) -> Vec<T> {
    assert_eq!(entries.len(), dim * dim);
    let n = dim;
    let mut a = entries.to_vec();
    let frob: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::epsilon() * T::epsilon() * frob * frob;

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eig
}
