// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense numerical toolkit for quantum dynamical semigroups on small Hilbert
//! spaces: GKSL (Lindblad) generators, channel representations (Kraus, Choi,
//! superoperator), semigroup and Trotter constructions, finite-step generator
//! extraction, and unitary alignment of Kraus sets.
//!
//! Conventions, shared by every module and by the file formats:
//! * vectorization is column-stacking, so the superoperator of A ↦ M†AM is
//!   Mᵀ ⊗ M†;
//! * the Choi matrix of Ψ is Σ_{kℓ} E_{kℓ} ⊗ Ψ(E_{kℓ}) in the standard basis;
//! * eigendecompositions use a deterministic ordering (descending eigenvalue,
//!   phase-fixed eigenvectors) so repeated runs are byte-identical.
//!
//! All values are immutable after construction and every operation is a pure
//! function; everything here is safe to call concurrently.

pub mod align;
pub mod channel;
pub mod error;
pub mod extraction;
pub mod fit;
pub mod generator;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod random;
pub mod semigroup;

pub use align::{align, closeness_experiment, kraus_map_distance, AlignmentResult};
pub use channel::{
    choi_from_kraus, choi_from_super, kraus_from_choi, super_from_choi, super_from_kraus,
    ChoiMatrix, KrausSet, SuperMatrix,
};
pub use error::{CoreError, Result};
pub use extraction::{
    decompose, extract_generator, finite_difference_generator, order_diagnostics,
    ExtractionIntermediate, ExtractionResult, OrderDiagnostics,
};
pub use generator::{generator_distance, GkslGenerator};
pub use operator::{anticommutator, commutator, hermitian_traceless_basis, Operator, C64};
pub use semigroup::{channel_at, psi_step, t0_max, trotter_channel, trotter_convergence, TrotterReport};
