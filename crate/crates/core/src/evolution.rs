//! Time evolution `U = exp(i L t)`, exactly through the spectral theorem and
//! approximately through a first-order Trotter product over edge terms.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spectral::{LaplacianMatrix, SpectralDecomposition};
use crate::walk::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn from_matrix(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.0.adjoint().matmul(&self.0).sub(&CMatrix::identity(self.dim())).max_abs()
    }
}

/// `V diag(exp(i lambda_k t)) V^T`.
pub fn exact_unitary(decomp: &SpectralDecomposition, t: f64) -> UnitaryMatrix {
    let n = decomp.dim();
    let phases: Vec<Complex64> =
        decomp.values.iter().map(|&l| Complex64::from_polar(1.0, l * t)).collect();
    let mut u = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                acc += phase * (decomp.vectors[(i, k)] * decomp.vectors[(j, k)]);
            }
            u[(i, j)] = acc;
        }
    }
    UnitaryMatrix(u)
}

/// One edge's share of the Laplacian: `w` on both diagonal slots, `-w` off
/// the diagonal, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeTerm {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl EdgeTerm {
    pub fn to_matrix(&self, n: usize) -> crate::linalg::Matrix {
        let mut m = crate::linalg::Matrix::zeros(n, n);
        m[(self.u, self.u)] = self.weight;
        m[(self.v, self.v)] = self.weight;
        m[(self.u, self.v)] = -self.weight;
        m[(self.v, self.u)] = -self.weight;
        m
    }

    /// Entries `(diag, off)` of `exp(i theta L_e)` on the `{u, v}` block.
    ///
    /// The block has eigenvalue 0 on `(1,1)` and `2w` on `(1,-1)`.
    fn exp_block(&self, theta: f64) -> (Complex64, Complex64) {
        let e = Complex64::from_polar(1.0, 2.0 * self.weight * theta);
        let one = Complex64::new(1.0, 0.0);
        ((one + e) * 0.5, (one - e) * 0.5)
    }
}

/// Edge terms in sorted `(u, v)` order.
pub fn edge_split(graph: &WeightedGraph) -> Vec<EdgeTerm> {
    graph.edges().map(|(u, v, w)| EdgeTerm { u, v, weight: w as f64 }).collect()
}

pub(crate) fn edge_split_laplacian(l: &LaplacianMatrix) -> Vec<EdgeTerm> {
    l.edges().into_iter().map(|(u, v, weight)| EdgeTerm { u, v, weight }).collect()
}

/// `(prod_e exp(i L_e t / n))^n` with the product taken in term order.
pub fn trotter_unitary(terms: &[EdgeTerm], n_nodes: usize, t: f64, n_steps: usize) -> Result<UnitaryMatrix> {
    if n_steps == 0 {
        return Err(Error::InvalidConfig("Trotter step count must be at least 1".into()));
    }
    for term in terms {
        for x in [term.u, term.v] {
            if x >= n_nodes {
                return Err(Error::NodeOutOfRange { index: x, nodes: n_nodes });
            }
        }
    }
    let theta = t / n_steps as f64;
    let mut step = CMatrix::identity(n_nodes);
    for term in terms {
        // right-multiplication by the edge exponential mixes columns u and v
        let (d, o) = term.exp_block(theta);
        for i in 0..n_nodes {
            let a = step[(i, term.u)];
            let b = step[(i, term.v)];
            step[(i, term.u)] = a * d + b * o;
            step[(i, term.v)] = a * o + b * d;
        }
    }
    Ok(UnitaryMatrix(step.pow(n_steps as u64)))
}

/// Frobenius norm of `U - V`.
pub fn operator_distance(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    Ok(a.0.sub(&b.0).norm_frobenius())
}

/// Distance between the exact and Trotterized unitaries for each step count.
pub fn trotter_convergence(
    decomp: &SpectralDecomposition,
    terms: &[EdgeTerm],
    t: f64,
    steps: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let exact = exact_unitary(decomp, t);
    steps
        .iter()
        .map(|&n| {
            let approx = trotter_unitary(terms, decomp.dim(), t, n)?;
            Ok((n, operator_distance(&exact, &approx)?))
        })
        .collect()
}

pub fn convergence_csv(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("n_steps,distance\n");
    for (n, d) in rows {
        let _ = writeln!(out, "{n},{d:e}");
    }
    out
}
