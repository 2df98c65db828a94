// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Representations of linear maps on L(H) — Kraus sets, Choi matrices and
//! superoperator matrices — with conversions between them, complete-positivity
//! and unitality checks, and the unitary mixing action on Kraus sets.
//!
//! A map Ψ acts in the Heisenberg picture, Ψ(A) = Σ_j M_j† A M_j. Its Choi
//! matrix is J(Ψ) = Σ_{kℓ} E_{kℓ} ⊗ Ψ(E_{kℓ}) with E_{kℓ} = |e_k⟩⟨e_ℓ|, so
//! J = Σ_j v_j v_j† with v_j = vec(M_j†); Ψ is completely positive exactly
//! when J ⪰ 0. The superoperator matrix acts on column-stacked
//! vectorizations, vec(M†AM) = (Mᵀ ⊗ M†) vec(A).

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::linalg;
use crate::operator::{Operator, C64, HERMITIAN_TOL};

/// Default relative threshold separating genuine Choi rank from rounding
/// noise in [`kraus_from_choi`].
pub const DEFAULT_RANK_TOL: f64 = 1.0e-10;

/// Absolute Frobenius tolerance for the unitarity check in [`KrausSet::mix`].
pub const UNITARY_TOL: f64 = 1.0e-10;

/// An ordered list of Kraus operators of one map on L(H).
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<Operator>,
}

impl KrausSet {
    /// Builds a Kraus set from a nonempty list of equal-dimension operators.
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let dim = match ops.first() {
            Some(op) => op.dim(),
            None => {
                return Err(CoreError::UnsupportedDim {
                    dim: 0,
                    min: 1,
                    max: usize::MAX,
                })
            }
        };
        for op in &ops {
            if op.dim() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: op.dim(),
                });
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    /// Applies the map: Ψ(A) = Σ_j M_j† A M_j. Linear in A and
    /// Hermiticity-preserving.
    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.dim() != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: a.dim(),
            });
        }
        let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
        for m in &self.ops {
            acc += m.matrix().adjoint() * a.matrix() * m.matrix();
        }
        Operator::from_matrix(acc)
    }

    /// Σ_j M_j† M_j.
    pub fn completeness_sum(&self) -> Operator {
        let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
        for m in &self.ops {
            acc += m.matrix().adjoint() * m.matrix();
        }
        Operator::from_matrix(acc).expect("finite by construction")
    }

    /// Unitality check: residual ‖Σ M_j†M_j − I‖₂ and whether it is within
    /// `tol`.
    pub fn is_unital(&self, tol: f64) -> (bool, f64) {
        let residual =
            (self.completeness_sum().matrix() - DMatrix::<C64>::identity(self.dim, self.dim))
                .norm();
        (residual <= tol, residual)
    }

    /// Appends zero operators until the set has length `n`; the represented
    /// map is unchanged.
    pub fn pad_to(&self, n: usize) -> Result<Self> {
        if n < self.ops.len() {
            return Err(CoreError::PadTooSmall {
                requested: n,
                current: self.ops.len(),
            });
        }
        let mut ops = self.ops.clone();
        ops.resize(n, Operator::zeros(self.dim));
        Ok(Self {
            dim: self.dim,
            ops,
        })
    }

    /// Unitary mixing C_j = Σ_k u_{jk} M_k: a new Kraus set of the same map.
    ///
    /// `u` must be unitary within [`UNITARY_TOL`] and at least as large as
    /// the set; the set is zero-padded up to the size of `u` first.
    pub fn mix(&self, u: &DMatrix<C64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: u.ncols(),
            });
        }
        if n < self.ops.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.ops.len(),
                got: n,
            });
        }
        let residual = (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm();
        if residual > UNITARY_TOL {
            return Err(CoreError::NotUnitary { residual });
        }
        let padded = self.pad_to(n)?;
        let mut ops = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
            for (k, op) in padded.ops.iter().enumerate() {
                acc += op.matrix() * u[(j, k)];
            }
            ops.push(Operator::from_matrix(acc)?);
        }
        Ok(Self {
            dim: self.dim,
            ops,
        })
    }
}

/// The Choi matrix of a map on L(H): a d²×d² Hermitian matrix whose
/// positivity certifies complete positivity.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    mat: DMatrix<C64>,
}

impl ChoiMatrix {
    /// Wraps a d²×d² matrix, requiring Hermiticity within 1e-12 relative.
    pub fn new(dim: usize, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != dim * dim || mat.ncols() != dim * dim {
            return Err(CoreError::DimensionMismatch {
                expected: dim * dim,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        if !linalg::is_finite(&mat) {
            return Err(CoreError::NonFinite);
        }
        let residual = linalg::hermiticity_residual(&mat);
        if residual > HERMITIAN_TOL * (1.0 + mat.norm()) {
            return Err(CoreError::NotHermitian { residual });
        }
        Ok(Self { dim, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Smallest eigenvalue; the map is CP when this is ≥ −tol.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = linalg::hermitian_eigen(&self.mat)?;
        Ok(vals.last().copied().unwrap_or(0.0))
    }

    /// CP test at relative tolerance `tol`: min eigenvalue ≥ −tol·‖J‖∞.
    /// Returns the verdict and the min eigenvalue.
    pub fn is_cp(&self, tol: f64) -> Result<(bool, f64)> {
        let (vals, _) = linalg::hermitian_eigen(&self.mat)?;
        let min = vals.last().copied().unwrap_or(0.0);
        let norm = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok((min >= -tol * norm, min))
    }

    /// ‖J‖∞ = max |eigenvalue|.
    pub fn uniform_norm(&self) -> Result<f64> {
        let (vals, _) = linalg::hermitian_eigen(&self.mat)?;
        Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    /// Residual of the unitality condition Σ M_j†M_j = I, read off the Choi
    /// matrix as ‖Σ_k J[(k,·),(k,·)] − I‖₂.
    pub fn unitality_residual(&self) -> f64 {
        let d = self.dim;
        let mut block = DMatrix::<C64>::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.mat[(k * d + a, k * d + b)];
                }
                block[(a, b)] = acc;
            }
        }
        (block - DMatrix::<C64>::identity(d, d)).norm()
    }
}

/// The matrix of a linear map on L(H) acting on column-stacked
/// vectorizations.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix {
    dim: usize,
    mat: DMatrix<C64>,
}

impl SuperMatrix {
    pub fn new(dim: usize, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != dim * dim || mat.ncols() != dim * dim {
            return Err(CoreError::DimensionMismatch {
                expected: dim * dim,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        if !linalg::is_finite(&mat) {
            return Err(CoreError::NonFinite);
        }
        Ok(Self { dim, mat })
    }

    /// The identity map on L(H).
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: DMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Applies the map to an operator via vec/unvec.
    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.dim() != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: a.dim(),
            });
        }
        let v: DVector<C64> = &self.mat * linalg::vec_col(a.matrix());
        Operator::from_matrix(linalg::unvec_col(&v, self.dim))
    }

    /// Composition self ∘ other (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            mat: &self.mat * &other.mat,
        })
    }

    /// n-fold composition by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while n > 0 {
            if n & 1 == 1 {
                acc = Self {
                    dim: self.dim,
                    mat: &acc.mat * &base.mat,
                };
            }
            n >>= 1;
            if n > 0 {
                base = Self {
                    dim: self.dim,
                    mat: &base.mat * &base.mat,
                };
            }
        }
        acc
    }

    /// Trace of the map as a matrix trace of its superoperator.
    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// The same trace via the basis formula Σ_{kℓ} ⟨e_k| Ψ(E_{kℓ}) e_ℓ⟩;
    /// kept as an independent cross-check of the matrix route.
    pub fn trace_via_basis(&self) -> C64 {
        let d = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d {
            for l in 0..d {
                let e = Operator::from_fn(d, |r, c| {
                    if (r, c) == (k, l) {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                let out = self.apply(&e).expect("dims match");
                acc += out.entry(k, l);
            }
        }
        acc
    }

    pub fn hs_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// ‖S1 − S2‖₂ on the underlying d²×d² matrices.
    pub fn hs_distance(&self, other: &Self) -> Result<f64> {
        if other.dim != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok((&self.mat - &other.mat).norm())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            mat: self.mat.scale(factor),
        }
    }
}

impl std::ops::Add for &SuperMatrix {
    type Output = SuperMatrix;
    fn add(self, rhs: &SuperMatrix) -> SuperMatrix {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions must match");
        SuperMatrix {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &SuperMatrix {
    type Output = SuperMatrix;
    fn sub(self, rhs: &SuperMatrix) -> SuperMatrix {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions must match");
        SuperMatrix {
            dim: self.dim,
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Choi matrix of a Kraus set: J = Σ_j v_j v_j† with v_j = vec(M_j†).
pub fn choi_from_kraus(k: &KrausSet) -> ChoiMatrix {
    let d = k.dim();
    let d2 = d * d;
    let mut mat = DMatrix::<C64>::zeros(d2, d2);
    for m in k.ops() {
        let v = linalg::vec_col(&m.matrix().adjoint());
        for r in 0..d2 {
            for c in 0..d2 {
                mat[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    ChoiMatrix { dim: d, mat }
}

/// Deterministic Kraus extraction from a Choi matrix.
///
/// Eigenvalues above `tol`·‖J‖∞ produce the operators √λ·unvec(v)†, ordered
/// by descending eigenvalue; eigenvalues below −`tol`·‖J‖∞ reject the map as
/// not CP. The zero map yields a single zero operator.
pub fn kraus_from_choi(j: &ChoiMatrix, tol: f64) -> Result<KrausSet> {
    let d = j.dim();
    let (vals, vecs) = linalg::hermitian_eigen(&j.mat)?;
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = tol * scale;
    let mut ops = Vec::new();
    for (i, &lam) in vals.iter().enumerate() {
        if lam < -cut {
            return Err(CoreError::NotCp {
                eigenvalue: lam,
                tol: cut,
            });
        }
        if lam > cut {
            let v: DVector<C64> = vecs.column(i).into_owned().scale(lam.sqrt());
            let m = linalg::unvec_col(&v, d).adjoint();
            ops.push(Operator::from_matrix(m)?);
        }
    }
    if ops.is_empty() {
        ops.push(Operator::zeros(d));
    }
    KrausSet::new(ops)
}

/// Superoperator matrix of a Kraus set: Σ_j M_jᵀ ⊗ M_j†.
pub fn super_from_kraus(k: &KrausSet) -> SuperMatrix {
    let d = k.dim();
    let mut mat = DMatrix::<C64>::zeros(d * d, d * d);
    for m in k.ops() {
        mat += m.matrix().transpose().kronecker(&m.matrix().adjoint());
    }
    SuperMatrix { dim: d, mat }
}

/// Index reshuffle from superoperator to Choi:
/// J[k·d+a, ℓ·d+b] = S[b·d+a, ℓ·d+k].
pub fn choi_from_super(s: &SuperMatrix) -> Result<ChoiMatrix> {
    let d = s.dim();
    let mut mat = DMatrix::<C64>::zeros(d * d, d * d);
    for k in 0..d {
        for a in 0..d {
            for l in 0..d {
                for b in 0..d {
                    mat[(k * d + a, l * d + b)] = s.mat[(b * d + a, l * d + k)];
                }
            }
        }
    }
    ChoiMatrix::new(d, mat)
}

/// Inverse reshuffle of [`choi_from_super`].
pub fn super_from_choi(j: &ChoiMatrix) -> SuperMatrix {
    let d = j.dim();
    let mut mat = DMatrix::<C64>::zeros(d * d, d * d);
    for k in 0..d {
        for a in 0..d {
            for l in 0..d {
                for b in 0..d {
                    mat[(b * d + a, l * d + k)] = j.mat[(k * d + a, l * d + b)];
                }
            }
        }
    }
    SuperMatrix { dim: d, mat }
}
