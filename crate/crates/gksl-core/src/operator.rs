// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex operators on a fixed d-dimensional Hilbert space:
//! Hilbert-Schmidt calculus, traceless/Hermitian splittings, principal
//! square roots, and operator norms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg;

pub type C64 = Complex64;

/// Relative tolerance used when classifying a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1.0e-12;

/// A linear operator on C^d with value semantics. Immutable after
/// construction; all entries are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    /// Wraps a square matrix. Rejects non-square shapes, empty matrices and
    /// non-finite entries.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(CoreError::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(CoreError::UnsupportedDim {
                dim: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        if !linalg::is_finite(&mat) {
            return Err(CoreError::NonFinite);
        }
        Ok(Self { mat })
    }

    /// Builds an operator entrywise. Panics if `f` produces a non-finite
    /// value; use [`Operator::from_matrix`] for untrusted data.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_matrix(DMatrix::from_fn(dim, dim, f)).expect("entries must be finite")
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    /// Adjoint (conjugate transpose) A†.
    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            mat: &self.mat * factor,
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
        }
    }

    /// Hilbert-Schmidt inner product ⟨A,B⟩₂ = tr[A†B], antilinear in `self`.
    pub fn hs_inner(&self, other: &Self) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.mat.iter().zip(other.mat.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Hilbert-Schmidt norm ‖A‖₂ = √tr[A†A].
    pub fn hs_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Uniform (operator) norm ‖A‖∞, the largest singular value.
    pub fn uniform_norm(&self) -> f64 {
        linalg::spectral_norm(&self.mat)
    }

    /// Both standard norms as (‖A‖∞, ‖A‖₂); they satisfy
    /// ‖A‖∞ ≤ ‖A‖₂ ≤ √d·‖A‖∞.
    pub fn norms(&self) -> (f64, f64) {
        (self.uniform_norm(), self.hs_norm())
    }

    /// Splits A = M + αI with tr\[M\] = 0 and α = tr\[A\]/d. Returns (M, α).
    pub fn traceless_part(&self) -> (Self, C64) {
        let d = self.dim();
        let alpha = self.trace() / C64::new(d as f64, 0.0);
        let mut mat = self.mat.clone();
        for i in 0..d {
            mat[(i, i)] -= alpha;
        }
        (Self { mat }, alpha)
    }

    /// Splits X = X_R + i·X_I into Hermitian parts X_R = (X+X†)/2 and
    /// X_I = (X−X†)/2i. Returns (X_R, X_I).
    pub fn herm_split(&self) -> (Self, Self) {
        let adj = self.mat.adjoint();
        let re = (&self.mat + &adj).scale(0.5);
        let im = (&self.mat - &adj) * C64::new(0.0, -0.5);
        (Self { mat: re }, Self { mat: im })
    }

    /// Residual ‖A − A†‖₂.
    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.mat)
    }

    /// True when ‖A − A†‖₂ ≤ tol·(1 + ‖A‖₂).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol * (1.0 + self.hs_norm())
    }

    /// Principal square root of a Hermitian positive-semidefinite operator.
    ///
    /// Eigenvalues in [−tol, 0] with tol = 1e-10·‖A‖∞ are clipped to zero
    /// (rounding can push 1 − tΣV†V slightly negative near t = t₀); anything
    /// below −tol is rejected as `NotPsd`.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let resid = self.hermiticity_residual();
        if resid > 1.0e-8 * (1.0 + self.hs_norm()) {
            return Err(CoreError::NotHermitian { residual: resid });
        }
        let (vals, vecs) = linalg::hermitian_eigen(&self.mat)?;
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1.0e-10 * scale;
        let mut mat = DMatrix::<C64>::zeros(self.dim(), self.dim());
        for (i, &lam) in vals.iter().enumerate() {
            if lam < -tol {
                return Err(CoreError::NotPsd {
                    eigenvalue: lam,
                    tol,
                });
            }
            let root = lam.max(0.0).sqrt();
            if root > 0.0 {
                let v = vecs.column(i);
                for r in 0..self.dim() {
                    for c in 0..self.dim() {
                        mat[(r, c)] += v[r] * v[c].conj() * C64::new(root, 0.0);
                    }
                }
            }
        }
        Ok(Self { mat })
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(CoreError::DimensionMismatch { expected, got })
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must match");
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must match");
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must match");
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl std::ops::Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { mat: -&self.mat }
    }
}

/// Commutator [A, B] = AB − BA.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    &(a * b) - &(b * a)
}

/// Anticommutator {A, B} = AB + BA.
pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    &(a * b) + &(b * a)
}

/// Hermitian, traceless, Hilbert-Schmidt-orthonormal basis of the traceless
/// sector of L(H) — the generalized Gell-Mann matrices, in a fixed order:
/// symmetric and antisymmetric off-diagonal pairs for k < ℓ, then diagonal
/// elements. Length d²−1.
pub fn hermitian_traceless_basis(dim: usize) -> Vec<Operator> {
    let mut basis = Vec::with_capacity(dim * dim - 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..dim {
        for l in (k + 1)..dim {
            basis.push(Operator::from_fn(dim, |r, c| {
                if (r, c) == (k, l) || (r, c) == (l, k) {
                    C64::new(inv_sqrt2, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
            basis.push(Operator::from_fn(dim, |r, c| {
                if (r, c) == (k, l) {
                    C64::new(0.0, -inv_sqrt2)
                } else if (r, c) == (l, k) {
                    C64::new(0.0, inv_sqrt2)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    for m in 1..dim {
        let norm = 1.0 / ((m * (m + 1)) as f64).sqrt();
        basis.push(Operator::from_fn(dim, |r, c| {
            if r != c {
                C64::new(0.0, 0.0)
            } else if r < m {
                C64::new(norm, 0.0)
            } else if r == m {
                C64::new(-(m as f64) * norm, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }));
    }
    basis
}
