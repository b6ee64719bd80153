//! Assembly of the Sinc-Nyström and bordered collocation systems, and a dense LU solver.
//!
//! Logical indices `i, j ∈ -N..=N` are stored at `i + N`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::problem::VolterraProblem;
use crate::sinc_core::{delta_table, SincGrid};
use crate::transforms::{TransformKind, VariableTransform};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let (head, tail) = self.data.split_at_mut(hi * c);
        head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// `matrix · x = rhs` as produced by the assemblers.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

/// Discretized Volterra operator `V[i][j] = k(t_i, t_j) ψ'(jh) h δ_{i-j}` together
/// with the right-hand side samples `g(t_i)`.
fn volterra_operator(
    problem: &VolterraProblem,
    transform: &VariableTransform,
    grid: &SincGrid,
) -> Result<(DenseMatrix, Vec<f64>, Vec<f64>)> {
    let n = grid.len();
    let big_n = grid.truncation() as i64;
    let nodes = transform.nodes(grid);
    let weights = transform.node_weights(grid);
    // δ_k for k = -2N..=2N, stored at k + 2N.
    let deltas = delta_table(2 * grid.truncation());
    let offset = 2 * big_n;

    let mut v = DenseMatrix::zeros(n, n);
    let mut rhs = Vec::with_capacity(n);
    for (row, &ti) in nodes.iter().enumerate() {
        let i = row as i64 - big_n;
        let g = problem.rhs(ti);
        if !g.is_finite() {
            return Err(Error::NonFinite { i, j: None });
        }
        rhs.push(g);
        for (col, &tj) in nodes.iter().enumerate() {
            let j = col as i64 - big_n;
            let k = problem.kernel(ti, tj);
            if !k.is_finite() {
                return Err(Error::NonFinite { i, j: Some(j) });
            }
            v[(row, col)] = k * weights[col] * deltas[(i - j + offset) as usize];
        }
    }
    Ok((v, rhs, nodes))
}

/// `(I - V) u = g` for the SE- or DE-Sinc-Nyström method.
pub fn assemble_nystrom(
    problem: &VolterraProblem,
    transform: &VariableTransform,
    grid: &SincGrid,
) -> Result<AssembledSystem> {
    let (mut matrix, rhs, _) = volterra_operator(problem, transform, grid)?;
    let n = grid.len();
    for i in 0..n {
        for j in 0..n {
            let e = if i == j { 1.0 } else { 0.0 };
            matrix[(i, j)] = e - matrix[(i, j)];
        }
    }
    Ok(AssembledSystem { matrix, rhs })
}

/// `(E - V) c = g` for the bordered SE-Sinc-collocation method.
///
/// The first and last unknowns multiply the linear blends `(b-t)/(b-a)` and
/// `(t-a)/(b-a)`; interior unknowns multiply Sinc functions. The border
/// columns of `V` apply the discretized operator to the blends, summing over
/// all nodes including the endpoints.
pub fn assemble_rz(
    problem: &VolterraProblem,
    transform: &VariableTransform,
    grid: &SincGrid,
) -> Result<AssembledSystem> {
    if transform.kind() != TransformKind::Se {
        return Err(Error::Parameter(
            "the bordered collocation system is defined for the SE transform only".into(),
        ));
    }
    let (v, rhs, nodes) = volterra_operator(problem, transform, grid)?;
    let n = grid.len();
    let left: Vec<f64> = nodes.iter().map(|&t| transform.blend_left(t)).collect();
    let right: Vec<f64> = nodes.iter().map(|&t| transform.blend_right(t)).collect();

    let mut matrix = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let row = v.row(i);
        let p: f64 = row.iter().zip(&left).map(|(a, w)| a * w).sum();
        let q: f64 = row.iter().zip(&right).map(|(a, w)| a * w).sum();
        matrix[(i, 0)] = left[i] - p;
        matrix[(i, n - 1)] = right[i] - q;
        for j in 1..n - 1 {
            let e = if i == j { 1.0 } else { 0.0 };
            matrix[(i, j)] = e - row[j];
        }
    }
    Ok(AssembledSystem { matrix, rhs })
}

/// LU factors with partial (row) pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactorization {
    pub fn new(mut a: DenseMatrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::Dimension {
                expected: n,
                found: a.cols(),
            });
        }
        let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * f64::EPSILON * n as f64;
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|r| (r, a[(r, k)].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs.is_nan() || pivot_abs <= tiny {
                return Err(Error::Singular { pivot: k });
            }
            a.swap_rows(k, p);
            perm.swap(k, p);

            let pivot = a[(k, k)];
            for r in k + 1..n {
                let factor = a[(r, k)] / pivot;
                a[(r, k)] = factor;
                if factor != 0.0 {
                    for c in k + 1..n {
                        let upper = a[(k, c)];
                        a[(r, c)] -= factor * upper;
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows();
        if rhs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: rhs.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, y)| u * y)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }
}

/// Solves `a x = rhs` by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != a.rows() {
        return Err(Error::Dimension {
            expected: a.rows(),
            found: rhs.len(),
        });
    }
    LuFactorization::new(a.clone())?.solve(rhs)
}

/// `‖a x - rhs‖∞ / (‖a‖∞ ‖x‖∞ + ‖rhs‖∞)`.
pub fn relative_residual(a: &DenseMatrix, x: &[f64], rhs: &[f64]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    let r = ax
        .iter()
        .zip(rhs)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bn = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let denom = a.norm_inf() * xn + bn;
    Ok(if denom == 0.0 { r } else { r / denom })
}
