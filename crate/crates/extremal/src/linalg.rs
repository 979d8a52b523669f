//! Dense matrices at desk scale.
//!
//! Everything here targets the small dimensions the rest of the crate
//! works in (tens, not thousands): row-major storage, Gauss-Jordan
//! inversion, and a cyclic Jacobi eigensolver that backs the l2
//! operator norm, singular values, and numerical rank.

use crate::error::{Error, Result};
use crate::space::{NormTag, Vector};

/// Relative tolerance documented for the l2 operator norm.
pub const SPECTRAL_REL_TOL: f64 = 1e-10;

/// Sweep budget for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Relative threshold below which a singular value counts as zero.
pub const RANK_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Matrix> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::param("matrix", "matrix must be non-empty"));
        }
        let cols = rows[0].len();
        for r in &rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    expected_rows: rows.len(),
                    expected_cols: cols,
                    rows: rows.len(),
                    cols: r.len(),
                });
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    context: "matrix entries",
                });
            }
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn matvec(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let coords = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&v.coords)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect();
        Ok(Vector { coords })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected_rows: self.cols,
                expected_cols: other.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        let mut out = other.scale(-1.0);
        out = self.sub(&out)?;
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Induced operator norm of a square map for the given norm on both
    /// sides. Row sums for linf, column sums for l1, dominant singular
    /// value for l2 (relative tolerance [`SPECTRAL_REL_TOL`]).
    pub fn operator_norm(&self, norm: NormTag) -> Result<f64> {
        match norm {
            NormTag::Linf => Ok((0..self.rows)
                .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<f64>())
                .fold(0.0, f64::max)),
            NormTag::L1 => Ok((0..self.cols)
                .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
                .fold(0.0, f64::max)),
            NormTag::L2 => {
                let svs = self.singular_values()?;
                Ok(svs.into_iter().fold(0.0, f64::max))
            }
        }
    }

    /// Input direction attaining the operator norm, used as a Lipschitz
    /// witness. Unit norm in the given norm.
    pub fn operator_norm_attainer(&self, norm: NormTag) -> Result<Vector> {
        match norm {
            NormTag::Linf => {
                let (best, _) = (0..self.rows)
                    .map(|i| (i, self.row(i).iter().map(|a| a.abs()).sum::<f64>()))
                    .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
                let coords = self
                    .row(best)
                    .iter()
                    .map(|a| if *a < 0.0 { -1.0 } else { 1.0 })
                    .collect();
                Ok(Vector { coords })
            }
            NormTag::L1 => {
                let (best, _) = (0..self.cols)
                    .map(|j| {
                        (j, (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
                    })
                    .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
                Ok(Vector::unit(self.cols, best))
            }
            NormTag::L2 => {
                let gram = self.transpose().matmul(self)?;
                let (eigs, vecs) = gram.jacobi_symmetric()?;
                let (best, _) = eigs
                    .iter()
                    .enumerate()
                    .fold((0, f64::MIN), |acc, (i, l)| {
                        if *l > acc.1 {
                            (i, *l)
                        } else {
                            acc
                        }
                    });
                let mut coords: Vec<f64> = (0..self.cols).map(|i| vecs.get(i, best)).collect();
                let n = NormTag::L2.norm(&coords);
                if n > 0.0 {
                    for c in coords.iter_mut() {
                        *c /= n;
                    }
                }
                Ok(Vector { coords })
            }
        }
    }

    /// Eigenvalues and eigenvectors of a symmetric matrix by cyclic
    /// Jacobi rotations. Columns of the returned matrix are the
    /// eigenvectors. Errors if the off-diagonal mass has not collapsed
    /// after [`JACOBI_MAX_SWEEPS`] sweeps.
    pub fn jacobi_symmetric(&self) -> Result<(Vec<f64>, Matrix)> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: n,
                expected_cols: n,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        let scale: f64 = self
            .data
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1.0);
        let stop = SPECTRAL_REL_TOL * 1e-3 * scale;

        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a.get(i, j).abs());
                }
            }
            if off <= stop {
                let eigs = (0..n).map(|i| a.get(i, i)).collect();
                return Ok((eigs, v));
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= stop * 1e-3 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    // two-sided rotation annihilating a[p][q]
                    let t = {
                        let tau = (aqq - app) / (2.0 * apq);
                        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        Err(Error::NoConvergence {
            budget: JACOBI_MAX_SWEEPS,
        })
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let gram = self.transpose().matmul(self)?;
        let (eigs, _) = gram.jacobi_symmetric()?;
        let mut svs: Vec<f64> = eigs.into_iter().map(|l| l.max(0.0).sqrt()).collect();
        svs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(svs)
    }

    /// Numerical rank at a relative singular-value threshold.
    pub fn rank(&self, rel_tol: f64) -> Result<usize> {
        let svs = self.singular_values()?;
        let top = svs.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return Ok(0);
        }
        Ok(svs.into_iter().filter(|s| *s > rel_tol * top).count())
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: n,
                expected_cols: n,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot = a.get(col, col).abs();
            for r in (col + 1)..n {
                if a.get(r, col).abs() > pivot {
                    pivot = a.get(r, col).abs();
                    pivot_row = r;
                }
            }
            if pivot < 1e-12 {
                return Err(Error::SingularMatrix { pivot });
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a.get(col, j);
                    a.set(col, j, a.get(pivot_row, j));
                    a.set(pivot_row, j, tmp);
                    let tmp = inv.get(col, j);
                    inv.set(col, j, inv.get(pivot_row, j));
                    inv.set(pivot_row, j, tmp);
                }
            }
            let d = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / d);
                inv.set(col, j, inv.get(col, j) / d);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - factor * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - factor * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }
}
