// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random instances: Ginibre operators, Haar unitaries, Gaussian
//! Hermitian ensembles, canonical generators, unital Kraus sets and CP maps.
//!
//! Everything draws from a caller-supplied ChaCha stream, so a fixed seed
//! reproduces identical instances across runs and platforms.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausSet;
use crate::error::Result;
use crate::generator::GkslGenerator;
use crate::linalg;
use crate::operator::{Operator, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix: i.i.d. entries scale·(x + iy)/√2 with standard
/// normal x, y, so E|entry|² = scale².
pub fn ginibre(rng: &mut impl Rng, dim: usize, scale: f64) -> Operator {
    let s = scale * std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_fn(dim, |_, _| {
        C64::new(
            s * rng.sample::<f64, _>(StandardNormal),
            s * rng.sample::<f64, _>(StandardNormal),
        )
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of
/// diag(R) folded back in.
pub fn haar_unitary_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    let g = DMatrix::<C64>::from_fn(n, n, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut lambda = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        let rii = r[(i, i)];
        lambda[(i, i)] = if rii.norm() > 0.0 {
            rii / rii.norm()
        } else {
            C64::new(1.0, 0.0)
        };
    }
    q * lambda
}

pub fn haar_unitary(rng: &mut impl Rng, dim: usize) -> Operator {
    Operator::from_matrix(haar_unitary_matrix(rng, dim)).expect("finite by construction")
}

/// Traceless Hermitian operator from the Gaussian (GUE-like) ensemble.
pub fn hermitian_traceless(rng: &mut impl Rng, dim: usize, scale: f64) -> Operator {
    let g = ginibre(rng, dim, scale);
    let (h, _) = g.herm_split();
    h.traceless_part().0
}

/// Random canonical generator: H from the traceless Hermitian ensemble at
/// scale 1, `n_jumps` traceless Ginibre jumps at scale 1/√d.
pub fn generator_with_jumps(rng: &mut impl Rng, dim: usize, n_jumps: usize) -> GkslGenerator {
    assert!(dim >= 2, "generators need dim >= 2");
    let h = hermitian_traceless(rng, dim, 1.0);
    let jumps = (0..n_jumps)
        .map(|_| ginibre(rng, dim, 1.0 / (dim as f64).sqrt()).traceless_part().0)
        .collect();
    GkslGenerator::new(h, jumps)
        .expect("H is Hermitian by construction")
        .canonicalize()
}

/// Random canonical generator with 1..=d²−1 jumps.
pub fn generator(rng: &mut impl Rng, dim: usize) -> GkslGenerator {
    let n_jumps = rng.gen_range(1..=dim * dim - 1);
    generator_with_jumps(rng, dim, n_jumps)
}

/// Kraus set of a random CP map (no completeness constraint), scaled so the
/// expected Choi trace is d.
pub fn cp_kraus(rng: &mut impl Rng, dim: usize, n_ops: usize) -> KrausSet {
    let scale = 1.0 / ((n_ops * dim) as f64).sqrt();
    let ops = (0..n_ops).map(|_| ginibre(rng, dim, scale)).collect();
    KrausSet::new(ops).expect("nonempty by construction")
}

/// Random CP map with 1..=d² Kraus operators.
pub fn cp_map(rng: &mut impl Rng, dim: usize) -> KrausSet {
    let n = rng.gen_range(1..=dim * dim);
    cp_kraus(rng, dim, n)
}

/// Random unital Kraus set: Ginibre operators A_j normalized on the right
/// by (ΣA_j†A_j)^{−1/2}, which enforces Σ M_j†M_j = I exactly.
pub fn unital_kraus(rng: &mut impl Rng, dim: usize, n_ops: usize) -> Result<KrausSet> {
    let raw = cp_kraus(rng, dim, n_ops);
    let t = raw.completeness_sum();
    let (vals, vecs) = linalg::hermitian_eigen(t.matrix())?;
    let mut w = DMatrix::<C64>::zeros(dim, dim);
    for (i, &lam) in vals.iter().enumerate() {
        // ΣA†A of a Ginibre draw is positive definite almost surely
        let inv = 1.0 / lam.max(f64::MIN_POSITIVE).sqrt();
        let v = vecs.column(i);
        for r in 0..dim {
            for c in 0..dim {
                w[(r, c)] += v[r] * v[c].conj() * C64::new(inv, 0.0);
            }
        }
    }
    let ops = raw
        .ops()
        .iter()
        .map(|m| Operator::from_matrix(m.matrix() * &w))
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops)
}
