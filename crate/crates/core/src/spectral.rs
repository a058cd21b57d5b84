//! Graph Laplacian, a deterministic Jacobi eigensolver, input-state overlaps
//! and the exact heat trace.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::walk::WeightedGraph;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;

const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// `L = D - A` for a weighted undirected graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LaplacianMatrix(Matrix);

impl LaplacianMatrix {
    /// Wraps a matrix after checking that it is square and symmetric.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), actual: m.cols() });
        }
        if !m.is_symmetric() {
            return Err(Error::InvalidInput("Laplacian must be symmetric".into()));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.0[(i, i)]
    }

    pub fn max_degree(&self) -> f64 {
        (0..self.dim()).map(|i| self.degree(i)).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.0.max_abs() == 0.0
    }

    /// Edges `(u, v, w)` read back from the negative off-diagonal entries.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let w = -self.0[(u, v)];
                if w != 0.0 {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_rows()).expect("matrix serializes")
    }
}

pub fn laplacian(graph: &WeightedGraph) -> LaplacianMatrix {
    let n = graph.n_nodes();
    let mut m = Matrix::zeros(n, n);
    for (u, v, w) in graph.edges() {
        let w = w as f64;
        m[(u, v)] -= w;
        m[(v, u)] -= w;
        m[(u, u)] += w;
        m[(v, v)] += w;
    }
    LaplacianMatrix(m)
}

/// Ascending eigenvalues with orthonormal, sign-normalized eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for k in 0..n {
                scaled[(i, k)] *= self.values[k];
            }
        }
        scaled.matmul(&self.vectors.transpose())
    }

    pub fn values_json(&self) -> String {
        serde_json::to_string(&self.values).expect("eigenvalues serialize")
    }
}

/// Flips the sign so the first entry of (near-)largest magnitude is positive.
fn sign_normalize(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = v.iter().position(|x| x.abs() >= max - 1e-12).unwrap();
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
///
/// Sweeps run in fixed `(p, q)` order until the off-diagonal Frobenius norm
/// drops below `1e-12 * ||L||_F`. Eigenpairs come back sorted ascending;
/// within a degenerate cluster vectors are ordered lexicographically
/// (descending, so a zero matrix yields the identity basis) and
/// re-orthonormalized by Gram-Schmidt.
pub fn eigendecompose(l: &LaplacianMatrix) -> Result<SpectralDecomposition> {
    jacobi(l.matrix())
}

pub(crate) fn jacobi(input: &Matrix) -> Result<SpectralDecomposition> {
    let n = input.rows();
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_REL_TOL * input.norm_frobenius();

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off >= threshold && off > 0.0 {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            sign_normalize(&mut col);
            (a[(k, k)], col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let cluster = &mut pairs[start..end];
            let slots: Vec<f64> = cluster.iter().map(|p| p.0).collect();
            cluster.sort_by(|x, y| lex_cmp(&y.1, &x.1));
            // Only the basis is reordered; eigenvalues keep their ascending slots.
            for (p, &value) in cluster.iter_mut().zip(&slots) {
                p.0 = value;
            }
            gram_schmidt(cluster);
        }
        start = end;
    }

    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, (value, col)) in pairs.into_iter().enumerate() {
        values.push(value);
        for (i, x) in col.into_iter().enumerate() {
            vectors[(i, k)] = x;
        }
    }
    Ok(SpectralDecomposition { values, vectors })
}

fn gram_schmidt(cluster: &mut [(f64, Vec<f64>)]) {
    for i in 0..cluster.len() {
        let (done, rest) = cluster.split_at_mut(i);
        let vi = &mut rest[0].1;
        for (_, vj) in done.iter() {
            let dot: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
            vi.iter_mut().zip(vj).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = vi.iter().map(|x| x * x).sum::<f64>().sqrt();
        vi.iter_mut().for_each(|x| *x /= norm);
        sign_normalize(vi);
    }
}

/// Overlaps `c_k = <v_k|psi>` and their squared moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapVector {
    pub amplitudes: Vec<Complex64>,
    pub probabilities: Vec<f64>,
}

pub fn overlaps(decomp: &SpectralDecomposition, psi: &[Complex64]) -> Result<OverlapVector> {
    let n = decomp.dim();
    if psi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: psi.len() });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("input state has norm {norm}, expected 1")));
    }
    let amplitudes: Vec<Complex64> = (0..n)
        .map(|k| (0..n).map(|i| decomp.vectors[(i, k)] * psi[i]).sum())
        .collect();
    let probabilities = amplitudes.iter().map(|c| c.norm_sqr()).collect();
    Ok(OverlapVector { amplitudes, probabilities })
}

/// `sum_k p_k exp(-tau * lambda_k)` using the true eigenvalues.
pub fn exact_heat_trace(decomp: &SpectralDecomposition, ov: &OverlapVector, tau: f64) -> f64 {
    decomp
        .values
        .iter()
        .zip(&ov.probabilities)
        .map(|(&lambda, &p)| p * (-tau * lambda).exp())
        .sum()
}
