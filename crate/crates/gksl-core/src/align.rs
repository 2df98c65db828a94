// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Unitary alignment of Kraus sets.
//!
//! Kraus operators of one map are unique only up to a unitary mixing
//! C_j = Σ_k u_{jk} B_k. [`align`] exploits that freedom to bring a target
//! set as close as possible to a reference in the stacked Hilbert-Schmidt
//! distance (Σ_j ‖M_j − N_j‖₂²)^{1/2}: a unitary Procrustes problem, solved
//! globally by the polar factor of the overlap matrix.
//! [`closeness_experiment`] probes how that optimal distance shrinks as two
//! maps approach each other — close CP maps admit close Kraus operators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{choi_from_kraus, kraus_from_choi, super_from_kraus, ChoiMatrix, KrausSet, DEFAULT_RANK_TOL};
use crate::error::{CoreError, Result};
use crate::fit;
use crate::linalg;
use crate::operator::{Operator, C64};
use crate::random;

/// An aligned Kraus set with the mixing that produced it.
#[derive(Clone, Debug)]
pub struct AlignmentResult {
    /// The N×N unitary applied to the (padded) target set.
    pub mixing: DMatrix<C64>,
    /// mix(target, mixing): same map as the target, closest to the reference.
    pub aligned: KrausSet,
    pub distance_before: f64,
    pub distance_after: f64,
}

/// (Σ_j ‖A_j − B_j‖₂²)^{1/2} over a common (zero-padded) length.
pub fn stacked_distance(a: &KrausSet, b: &KrausSet) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let n = a.len().max(b.len());
    let ap = a.pad_to(n)?;
    let bp = b.pad_to(n)?;
    let mut acc = 0.0f64;
    for (x, y) in ap.ops().iter().zip(bp.ops().iter()) {
        acc += (x - y).hs_norm().powi(2);
    }
    Ok(acc.sqrt())
}

/// ‖S(K₁) − S(K₂)‖₂ between the represented maps.
pub fn kraus_map_distance(k1: &KrausSet, k2: &KrausSet) -> Result<f64> {
    if k1.dim() != k2.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: k1.dim(),
            got: k2.dim(),
        });
    }
    super_from_kraus(k1).hs_distance(&super_from_kraus(k2))
}

/// Optimally mixes `target` towards `reference`.
///
/// Both sets are zero-padded to N = max(lengths, d²); the overlap matrix
/// S_{jk} = ⟨target_k, reference_j⟩₂ has polar factor U = WV† (from
/// S = WΣV†), which maximizes Re Σ_j ⟨reference_j, Σ_k u_{jk} target_k⟩
/// over the unitary group and hence minimizes the stacked distance.
pub fn align(reference: &KrausSet, target: &KrausSet) -> Result<AlignmentResult> {
    if reference.dim() != target.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: reference.dim(),
            got: target.dim(),
        });
    }
    let d = reference.dim();
    let n = reference.len().max(target.len()).max(d * d);
    let refp = reference.pad_to(n)?;
    let tgtp = target.pad_to(n)?;

    let mut overlap = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            overlap[(j, k)] = tgtp.ops()[k].hs_inner(&refp.ops()[j])?;
        }
    }
    let mixing = linalg::polar_unitary(&overlap)?;
    let aligned = tgtp.mix(&mixing)?;
    let distance_before = stacked_distance(&refp, &tgtp)?;
    let distance_after = stacked_distance(&refp, &aligned)?;
    Ok(AlignmentResult {
        mixing,
        aligned,
        distance_before,
        distance_after,
    })
}

/// One row of a closeness experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosenessRow {
    pub epsilon: f64,
    /// ‖S(base) − S(perturbed)‖₂.
    pub channel_distance: f64,
    /// Stacked Kraus distance after optimal alignment.
    pub aligned_distance: f64,
}

/// The (ε, distance) table of a closeness experiment with the fitted
/// exponent of aligned distance against ε.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub rows: Vec<ClosenessRow>,
    /// Log-log slope of aligned distance vs ε; `None` when distances sit at
    /// the rounding floor. Kraus operators behave like square roots of Choi
    /// data, so values around 0.5 are expected.
    pub fitted_exponent: Option<f64>,
    /// Smallest C with aligned_distance ≤ C·√(channel_distance) over every
    /// row — the square-root sensitivity of Kraus data in one number.
    pub sqrt_law_coefficient: Option<f64>,
}

/// Perturbs `base` by convex Choi mixing with one random CP map,
/// J(ε) = (1−ε)J + ε·J_rand, aligns the deterministic Kraus sets of base and
/// perturbation, and records distances per ε.
///
/// When the base is unital the mixed Kraus set is renormalized on the right
/// by (ΣM†M)^{−1/2}, which restores Σ M_j†M_j = I while staying CP.
pub fn closeness_experiment(
    base: &KrausSet,
    epsilons: &[f64],
    seed: u64,
) -> Result<ClosenessReport> {
    if epsilons.is_empty() {
        return Err(CoreError::InsufficientGrid("empty epsilon grid".into()));
    }
    if epsilons.iter().any(|&e| e <= 0.0 || e >= 1.0) {
        return Err(CoreError::InsufficientGrid(
            "epsilons must lie strictly between 0 and 1".into(),
        ));
    }
    if !epsilons.windows(2).all(|w| w[0] > w[1]) {
        return Err(CoreError::InsufficientGrid(
            "epsilons must be strictly decreasing".into(),
        ));
    }
    let d = base.dim();
    let base_unital = base.is_unital(1.0e-9).0;
    let j_base = choi_from_kraus(base);
    // one fixed perturbation direction for the whole sweep, trace-matched
    // to the base so ε is a meaningful mixing weight
    let mut rng = random::rng_from_seed(seed);
    let j_rand_raw = choi_from_kraus(&random::cp_kraus(&mut rng, d, d * d));
    let trace_ratio = j_base.trace().re / j_rand_raw.trace().re;
    let j_rand = ChoiMatrix::new(d, j_rand_raw.matrix().scale(trace_ratio))?;

    // deterministic Kraus set of the base, used as the alignment reference
    let base_kraus = kraus_from_choi(&j_base, DEFAULT_RANK_TOL)?;

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mixed = ChoiMatrix::new(
            d,
            j_base.matrix().scale(1.0 - eps) + j_rand.matrix().scale(eps),
        )?;
        let mut perturbed = kraus_from_choi(&mixed, DEFAULT_RANK_TOL)?;
        if base_unital {
            perturbed = renormalize_unital(&perturbed)?;
        }
        let channel_distance = kraus_map_distance(&base_kraus, &perturbed)?;
        let alignment = align(&base_kraus, &perturbed)?;
        rows.push(ClosenessRow {
            epsilon: eps,
            channel_distance,
            aligned_distance: alignment.distance_after,
        });
    }
    let floor = 1.0e-13;
    let fitted_exponent = if rows.iter().any(|r| r.aligned_distance <= floor) {
        None
    } else {
        let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
        let dist: Vec<f64> = rows.iter().map(|r| r.aligned_distance).collect();
        fit::loglog_slope(&eps, &dist)
    };
    let sqrt_law_coefficient = rows
        .iter()
        .filter(|r| r.channel_distance > floor)
        .map(|r| r.aligned_distance / r.channel_distance.sqrt())
        .fold(None, |acc: Option<f64>, c| {
            Some(acc.map_or(c, |a| a.max(c)))
        });
    Ok(ClosenessReport {
        rows,
        fitted_exponent,
        sqrt_law_coefficient,
    })
}

/// Right-multiplies every operator by (ΣM†M)^{−1/2}.
fn renormalize_unital(k: &KrausSet) -> Result<KrausSet> {
    let d = k.dim();
    let t = k.completeness_sum();
    let (vals, vecs) = linalg::hermitian_eigen(t.matrix())?;
    let max = vals.first().copied().unwrap_or(0.0);
    let mut w = DMatrix::<C64>::zeros(d, d);
    for (i, &lam) in vals.iter().enumerate() {
        if lam <= 1.0e-12 * max {
            return Err(CoreError::NotPsd {
                eigenvalue: lam,
                tol: 1.0e-12 * max,
            });
        }
        let inv = 1.0 / lam.sqrt();
        let v = vecs.column(i);
        for r in 0..d {
            for c in 0..d {
                w[(r, c)] += v[r] * v[c].conj() * C64::new(inv, 0.0);
            }
        }
    }
    KrausSet::new(
        k.ops()
            .iter()
            .map(|m| Operator::from_matrix(m.matrix() * &w))
            .collect::<Result<Vec<_>>>()?,
    )
}
