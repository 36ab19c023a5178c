//! The block saddle-point system of the hybrid formulation and its sparse
//! direct solver.
//!
//! The semi-discrete problem couples the density `w` with the interface
//! multiplier `λ` through the (generally nonsymmetric) block system
//! `[[A, B₁ᵀ], [B_κ, 0]] · [w, λ] = [g, 0]`; `B₁ ≠ B_κ` whenever `κ ≠ 1`.
//! The monolithic matrix is factorized by sparse LU with partial pivoting;
//! the factorization is immutable and can be reused across time steps when
//! the operator does not change.

use std::io::Write as _;
use std::path::Path;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::assembly::SparseMatrix;
use crate::error::{Error, Result};
use crate::fespace::FieldVector;

/// Assembled blocks of one implicit step.
#[derive(Debug, Clone)]
pub struct BlockSaddleSystem {
    pub a: SparseMatrix,
    /// Coupling tested against the multiplier in the primal equation
    /// (`κ = 1` instance).
    pub b1: SparseMatrix,
    /// Constraint block enforcing `w₀ = κw₁` weakly.
    pub bk: SparseMatrix,
    pub rhs_w: Vec<f64>,
    /// Always zero; kept explicit because the residual check reads it.
    pub rhs_lambda: Vec<f64>,
}

impl BlockSaddleSystem {
    pub fn new(a: SparseMatrix, b1: SparseMatrix, bk: SparseMatrix, rhs_w: Vec<f64>) -> Result<Self> {
        let n_w = a.n_rows;
        let n_l = b1.n_rows;
        if a.n_cols != n_w
            || b1.n_cols != n_w
            || bk.n_cols != n_w
            || bk.n_rows != n_l
            || rhs_w.len() != n_w
        {
            return Err(Error::Config(format!(
                "inconsistent saddle block dimensions: A {}×{}, B1 {}×{}, Bk {}×{}, rhs {}",
                a.n_rows, a.n_cols, b1.n_rows, b1.n_cols, bk.n_rows, bk.n_cols, rhs_w.len()
            )));
        }
        Ok(BlockSaddleSystem {
            a,
            b1,
            bk,
            rhs_w,
            rhs_lambda: vec![0.0; n_l],
        })
    }

    pub fn n_w(&self) -> usize {
        self.a.n_rows
    }

    pub fn n_lambda(&self) -> usize {
        self.b1.n_rows
    }

    /// Factorizes the monolithic `(n_w + n_λ)²` matrix.
    pub fn factorize(&self) -> Result<SaddleSolver> {
        let n_w = self.n_w();
        let n_l = self.n_lambda();
        let n = n_w + n_l;
        let mut triplets: Vec<Triplet<usize, usize, f64>> =
            Vec::with_capacity(self.a.nnz() + 2 * self.b1.nnz());
        for (r, c, v) in self.a.triplets() {
            triplets.push(Triplet::new(r, c, v));
        }
        for (r, c, v) in self.b1.triplets() {
            // B₁ᵀ in the upper-right block.
            triplets.push(Triplet::new(c, n_w + r, v));
        }
        for (r, c, v) in self.bk.triplets() {
            triplets.push(Triplet::new(n_w + r, c, v));
        }
        let mat = SparseColMat::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Solve(format!("could not build the saddle matrix: {e:?}")))?;
        let lu = mat
            .sp_lu()
            .map_err(|e| Error::Solve(format!("sparse LU factorization failed: {e:?}")))?;
        Ok(SaddleSolver { lu, n_w, n_l })
    }

    /// Factorize-and-solve convenience; checks residuals.
    pub fn solve(&self) -> Result<(FieldVector, FieldVector)> {
        let solver = self.factorize()?;
        solver.solve(self)
    }

    /// Max-norm residuals of the two block equations.
    pub fn residuals(&self, w: &FieldVector, lambda: &FieldVector) -> (f64, f64) {
        let aw = self.a.matvec(&w.values);
        let btl = self.b1.matvec_transpose(&lambda.values);
        let primal = aw
            .iter()
            .zip(&btl)
            .zip(&self.rhs_w)
            .map(|((a, b), r)| (a + b - r).abs())
            .fold(0.0f64, f64::max);
        let constraint = self
            .bk
            .matvec(&w.values)
            .iter()
            .zip(&self.rhs_lambda)
            .map(|(a, r)| (a - r).abs())
            .fold(0.0f64, f64::max);
        (primal, constraint)
    }
}

/// An immutable sparse LU factorization of one saddle operator.
pub struct SaddleSolver {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n_w: usize,
    n_l: usize,
}

impl SaddleSolver {
    /// Solves for the given system's right-hand side (the system must share
    /// this factorization's operator) and verifies the residuals.
    pub fn solve(&self, system: &BlockSaddleSystem) -> Result<(FieldVector, FieldVector)> {
        let (w, lambda) = self.solve_rhs(&system.rhs_w)?;
        let scale = system
            .rhs_w
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(w.max_abs())
            .max(1e-300);
        let (primal, constraint) = system.residuals(&w, &lambda);
        if primal > 1e-10 * scale {
            return Err(Error::Solve(format!(
                "primal residual {primal:.3e} exceeds 1e-10·{scale:.3e}"
            )));
        }
        if constraint > 1e-10 * w.max_abs().max(1e-300) {
            return Err(Error::Solve(format!(
                "constraint residual {constraint:.3e} exceeds 1e-10·‖w‖"
            )));
        }
        Ok((w, lambda))
    }

    /// Triangular solves only, without residual verification.
    pub fn solve_rhs(&self, rhs_w: &[f64]) -> Result<(FieldVector, FieldVector)> {
        assert_eq!(rhs_w.len(), self.n_w);
        let n = self.n_w + self.n_l;
        let mut rhs = Mat::<f64>::zeros(n, 1);
        for (i, &v) in rhs_w.iter().enumerate() {
            rhs[(i, 0)] = v;
        }
        let sol = self.lu.solve(&rhs);
        let w = FieldVector {
            values: (0..self.n_w).map(|i| sol[(i, 0)]).collect(),
        };
        let lambda = FieldVector {
            values: (0..self.n_l).map(|i| sol[(self.n_w + i, 0)]).collect(),
        };
        w.assert_finite()?;
        lambda.assert_finite()?;
        Ok((w, lambda))
    }
}

/// Writes a matrix in Matrix Market coordinate format (1-based indices).
pub fn write_matrix_market(matrix: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(path.display().to_string(), e);
    writeln!(w, "%%MatrixMarket matrix coordinate real general").map_err(io_err)?;
    writeln!(w, "{} {} {}", matrix.n_rows, matrix.n_cols, matrix.nnz()).map_err(io_err)?;
    for (r, c, v) in matrix.triplets() {
        writeln!(w, "{} {} {}", r + 1, c + 1, v).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
