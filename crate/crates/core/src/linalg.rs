//! Dense exact linear algebra over the rationals. Matrices here are tiny
//! (Picard rank sized), so plain Gaussian elimination is used throughout.

use num_traits::{One, Signed, Zero};

use crate::rational::{dot, zeros, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: zeros(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<Q>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-Q::one()))
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[Q], y: &[Q]) -> Q {
        dot(x, &self.mul_vec(y))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn submatrix(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Q::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &pivot;
                for c in col..n {
                    let v = &f * &a[(col, c)];
                    a[(r, c)] -= v;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(p, row);
            let inv = self[(row, col)].recip();
            for c in 0..self.cols {
                let v = &self[(row, c)] * &inv;
                self[(row, c)] = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for c in 0..self.cols {
                    let v = &f * &self[(row, c)];
                    self[(r, c)] -= v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut a = self.clone();
        let pivots = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = zeros(self.cols);
                v[f] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Unique solution of a square system, `None` when singular.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some((0..n).map(|i| aug[(i, n)].clone()).collect())
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        let cols: Option<Vec<Vec<Q>>> = (0..n)
            .map(|j| {
                let mut e = zeros(n);
                e[j] = Q::one();
                self.solve(&e)
            })
            .collect();
        cols.map(|c| Matrix::from_columns(&c))
    }

    pub fn leading_principal_minors(&self) -> Vec<Q> {
        (1..=self.rows)
            .map(|k| self.submatrix(&(0..k).collect::<Vec<_>>()).det())
            .collect()
    }

    /// Sylvester's criterion on leading minors.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric() && self.leading_principal_minors().iter().all(|m| m.is_positive())
    }

    /// All principal minors nonnegative.
    pub fn is_positive_semidefinite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        (1u64..(1u64 << n)).all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            !self.submatrix(&idx).det().is_negative()
        })
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact `LDL^T` without pivoting for a symmetric matrix. Returns `(L, D)` with
/// unit lower-triangular `L`, or the index of the first zero pivot.
pub fn ldl(m: &Matrix) -> Result<(Matrix, Vec<Q>), usize> {
    let n = m.rows;
    let mut l = Matrix::identity(n);
    let mut d = zeros(n);
    for j in 0..n {
        let mut dj = m[(j, j)].clone();
        for k in 0..j {
            dj -= &l[(j, k)] * &l[(j, k)] * &d[k];
        }
        if dj.is_zero() {
            return Err(j);
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut s = m[(i, j)].clone();
            for k in 0..j {
                s -= &l[(i, k)] * &l[(j, k)] * &d[k];
            }
            l[(i, j)] = s / &d[j];
        }
    }
    Ok((l, d))
}
