//! Small dense symmetric linear algebra: Cholesky and cyclic Jacobi.

use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Fails unless the matrix is symmetric to `rel_tol · ‖A‖_F`.
    pub fn ensure_symmetric(&self, rel_tol: f64) -> Result<()> {
        let asymmetry = self.max_asymmetry();
        if asymmetry > rel_tol * self.frobenius_norm() {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
}

impl Cholesky {
    /// Factors `a` without pivoting. Returns `None` when a pivot falls to
    /// `pivot_floor` or below.
    pub fn factor(a: &Matrix, pivot_floor: f64) -> Option<Self> {
        let n = a.dim();
        let mut lower = Matrix::zeros(n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag -= lower[(j, k)] * lower[(j, k)];
            }
            if diag <= pivot_floor || !diag.is_finite() {
                return None;
            }
            let ljj = diag.sqrt();
            lower[(j, j)] = ljj;
            for i in j + 1..n {
                let mut v = a[(i, j)];
                for k in 0..j {
                    v -= lower[(i, k)] * lower[(j, k)];
                }
                lower[(i, j)] = v / ljj;
            }
        }
        Some(Self { lower })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lower.dim();
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[(i, k)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[(k, i)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        y
    }

    pub fn determinant(&self) -> f64 {
        (0..self.lower.dim())
            .map(|i| self.lower[(i, i)].powi(2))
            .product()
    }
}

/// Eigen-decomposition `A = V diag(values) Vᵀ`, eigenvalues ascending and
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

pub const JACOBI_MAX_SWEEPS: usize = 60;
pub const JACOBI_REL_TOL: f64 = 1e-13;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-13 ‖A‖_F`.
pub fn jacobi_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let (m, v) = jacobi_sweeps(a, true)?;
    let v = v.expect("vectors requested");
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, |row, col| v[(row, order[col])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, ascending; same iteration as [`jacobi_eigen`] without
/// accumulating the rotations.
pub fn jacobi_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    let (m, _) = jacobi_sweeps(a, false)?;
    let mut values: Vec<f64> = (0..a.dim()).map(|i| m[(i, i)]).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Runs the sweeps on a copy of the symmetric `a`. Each rotation updates rows
/// `p` and `q` and mirrors them into the columns, so both triangles stay in
/// sync without a second pass.
fn jacobi_sweeps(a: &Matrix, with_vectors: bool) -> Result<(Matrix, Option<Matrix>)> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = with_vectors.then(|| Matrix::identity(n));
    let target = JACOBI_REL_TOL * a.frobenius_norm();

    let off_norm = |m: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += m.data[i * n + j] * m.data[i * n + j];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&m);
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        let d = &mut m.data;
        for p in 0..n {
            for q in p + 1..n {
                let apq = d[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                // Past the early sweeps, an entry that cannot move either
                // diagonal entry is rounding noise: drop it instead of rotating.
                let (app, aqq) = (d[p * n + p], d[q * n + q]);
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    d[p * n + q] = 0.0;
                    d[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let (mpk, mqk) = (d[p * n + k], d[q * n + k]);
                    let (new_p, new_q) = (c * mpk - s * mqk, s * mpk + c * mqk);
                    d[p * n + k] = new_p;
                    d[q * n + k] = new_q;
                    d[k * n + p] = new_p;
                    d[k * n + q] = new_q;
                }
                d[p * n + p] -= t * apq;
                d[q * n + q] += t * apq;
                d[p * n + q] = 0.0;
                d[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let (vkp, vkq) = (v.data[k * n + p], v.data[k * n + q]);
                        v.data[k * n + p] = c * vkp - s * vkq;
                        v.data[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        sweeps += 1;
        off = off_norm(&m);
    }
    Ok((m, v))
}
