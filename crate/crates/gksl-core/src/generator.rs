// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! GKSL (Lindblad) generators in the Heisenberg picture,
//!
//!   L(A) = i\[H, A\] + Σ_j (V_j† A V_j − ½{V_j†V_j, A}),
//!
//! with canonicalization to traceless H and jumps, reduction of the jump
//! list to at most d²−1 linearly independent operators, and the trace
//! identity tr\[L\] = −d·Σ_j ‖V_j‖₂² for canonical generators.

use nalgebra::DMatrix;

use crate::channel::SuperMatrix;
use crate::error::{CoreError, Result};
use crate::linalg;
use crate::operator::{Operator, C64, HERMITIAN_TOL};

/// Relative tolerance on tr\[H\] and tr\[V_j\] for the canonical form.
pub const CANONICAL_TOL: f64 = 1.0e-12;

/// Relative rank cut for the jump Gram matrix in [`GkslGenerator::reduce_jumps`]:
/// the list is treated as linearly dependent while its smallest Gram
/// eigenvalue is below 1e-10 times the largest.
pub const GRAM_RANK_TOL: f64 = 1.0e-10;

/// A GKSL generator: Hermitian `h` plus a list of jump operators. The jump
/// list may be empty (pure Hamiltonian flow).
#[derive(Clone, Debug, PartialEq)]
pub struct GkslGenerator {
    dim: usize,
    h: Operator,
    jumps: Vec<Operator>,
}

impl GkslGenerator {
    /// Builds a generator, requiring H = H† within 1e-12 relative and equal
    /// dimensions throughout.
    pub fn new(h: Operator, jumps: Vec<Operator>) -> Result<Self> {
        let residual = h.hermiticity_residual();
        if residual > HERMITIAN_TOL * (1.0 + h.hs_norm()) {
            return Err(CoreError::NotHermitian { residual });
        }
        let dim = h.dim();
        for v in &jumps {
            if v.dim() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        Ok(Self { dim, h, jumps })
    }

    /// The zero generator (H = 0, no jumps).
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            h: Operator::zeros(dim),
            jumps: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.h
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    /// Σ_j V_j†V_j.
    pub fn jump_gram_sum(&self) -> Operator {
        let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
        for v in &self.jumps {
            acc += v.matrix().adjoint() * v.matrix();
        }
        Operator::from_matrix(acc).expect("finite by construction")
    }

    /// Superoperator matrix of L. Satisfies L(I) = 0 and L(A†) = L(A)†.
    pub fn build_super(&self) -> SuperMatrix {
        let d = self.dim;
        let eye = DMatrix::<C64>::identity(d, d);
        // i[H,·]  =  i(I ⊗ H − Hᵀ ⊗ I)
        let hm = self.h.matrix();
        let mut mat = (eye.kronecker(hm) - hm.transpose().kronecker(&eye)) * C64::new(0.0, 1.0);
        for v in &self.jumps {
            let vm = v.matrix();
            let k = vm.adjoint() * vm;
            // V†·V − ½{V†V, ·}
            mat += vm.transpose().kronecker(&vm.adjoint());
            mat -= (eye.kronecker(&k) + k.transpose().kronecker(&eye)).scale(0.5);
        }
        SuperMatrix::new(d, mat).expect("finite by construction")
    }

    /// Largest trace residual of H and the jumps, relative to their scale.
    pub fn canonical_residual(&self) -> f64 {
        let mut r = self.h.trace().norm() / (1.0 + self.h.hs_norm());
        for v in &self.jumps {
            r = r.max(v.trace().norm() / (1.0 + v.hs_norm()));
        }
        r
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_residual() <= CANONICAL_TOL
    }

    fn require_canonical(&self) -> Result<()> {
        let residual = self.canonical_residual();
        if residual > CANONICAL_TOL {
            Err(CoreError::NotCanonical { residual })
        } else {
            Ok(())
        }
    }

    /// Returns an equivalent generator with tr\[H\] = 0 and tr\[V_j\] = 0.
    ///
    /// Scalar parts of the jumps are absorbed into the Hamiltonian:
    /// V_j' = V_j − α_jI with α_j = tr\[V_j\]/d, and
    /// H ← H + Σ_j (α_j V_j'† − ᾱ_j V_j')/2i, then tr\[H\]/d · I is dropped.
    /// The superoperator action is unchanged.
    pub fn canonicalize(&self) -> Self {
        let d = self.dim;
        let mut h = self.h.matrix().clone();
        let mut jumps = Vec::with_capacity(self.jumps.len());
        for v in &self.jumps {
            let (v_prime, alpha) = v.traceless_part();
            let vp = v_prime.matrix();
            // (α V'† − ᾱ V')/2i
            let delta = (vp.adjoint() * alpha - vp * alpha.conj()) * C64::new(0.0, -0.5);
            h += delta;
            jumps.push(v_prime);
        }
        let trace = h.trace() / C64::new(d as f64, 0.0);
        for i in 0..d {
            h[(i, i)] -= trace;
        }
        // products introduce ~1e-16 asymmetry; restore exact Hermiticity
        let h = (&h + h.adjoint()).scale(0.5);
        Self {
            dim: d,
            h: Operator::from_matrix(h).expect("finite by construction"),
            jumps,
        }
    }

    /// Removes linear dependence from a canonical jump list.
    ///
    /// While the Gram matrix G_{jk} = ⟨V_j, V_k⟩₂ has an eigenvalue below
    /// [`GRAM_RANK_TOL`] times its largest, the corresponding unit null
    /// vector becomes the first row of a unitary, the list is rotated by it,
    /// and the first (now zero) operator is dropped. The output has linearly
    /// independent traceless jumps, hence at most d²−1 of them, and the same
    /// superoperator.
    pub fn reduce_jumps(&self) -> Result<Self> {
        self.require_canonical()?;
        // exact zeros first (e.g. the dissipator of a scalar jump)
        let mut ops: Vec<Operator> = self
            .jumps
            .iter()
            .filter(|v| v.hs_norm() > 0.0)
            .cloned()
            .collect();
        loop {
            let n = ops.len();
            if n == 0 {
                break;
            }
            let mut gram = DMatrix::<C64>::zeros(n, n);
            for j in 0..n {
                for k in 0..n {
                    gram[(j, k)] = ops[j].hs_inner(&ops[k])?;
                }
            }
            let (vals, vecs) = linalg::hermitian_eigen(&gram)?;
            if vals[0] <= 0.0 {
                ops.clear();
                break;
            }
            if vals[n - 1] >= GRAM_RANK_TOL * vals[0] {
                break;
            }
            // unit null vector of the Gram matrix as the first unitary row
            let c = vecs.column(n - 1).into_owned();
            let rows = linalg::orthonormalize(vec![c], n);
            let mut rotated = Vec::with_capacity(n);
            for row in &rows {
                let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
                for (k, op) in ops.iter().enumerate() {
                    acc += op.matrix() * row[k];
                }
                rotated.push(Operator::from_matrix(acc)?);
            }
            rotated.remove(0);
            ops = rotated;
        }
        Ok(Self {
            dim: self.dim,
            h: self.h.clone(),
            jumps: ops,
        })
    }

    /// The Remark-1 trace identity for canonical generators: returns
    /// (lhs, rhs) with lhs = Re tr\[L\] and rhs = −d·Σ_j ‖V_j‖₂².
    pub fn trace_identity_check(&self) -> Result<(f64, f64)> {
        self.require_canonical()?;
        let lhs = self.build_super().trace();
        let rhs = -(self.dim as f64)
            * self
                .jumps
                .iter()
                .map(|v| v.hs_norm().powi(2))
                .sum::<f64>();
        debug_assert!(lhs.im.abs() <= 1.0e-12 * (1.0 + lhs.re.abs()));
        Ok((lhs.re, rhs))
    }

    /// Gauge-invariant distance ‖L₁ − L₂‖₂ between superoperators.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if other.dim != self.dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        self.build_super().hs_distance(&other.build_super())
    }
}

/// Free-function spelling of [`GkslGenerator::distance`].
pub fn generator_distance(g1: &GkslGenerator, g2: &GkslGenerator) -> Result<f64> {
    g1.distance(g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::test_support::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn amplitude_damping() -> GkslGenerator {
        GkslGenerator::new(Operator::zeros(2), vec![sigma_minus()]).unwrap()
    }

    fn random_canonical(seed: u64, d: usize, n_jumps: usize) -> GkslGenerator {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let g = random_operator(&mut rng, d);
        let (h_full, _) = g.herm_split();
        let (h, _) = h_full.traceless_part();
        let jumps = (0..n_jumps)
            .map(|_| {
                random_operator(&mut rng, d)
                    .scale_re(1.0 / (d as f64).sqrt())
                    .traceless_part()
                    .0
            })
            .collect();
        GkslGenerator::new(h, jumps).unwrap()
    }

    fn haar(seed: u64, n: usize) -> DMatrix<C64> {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let g = DMatrix::<C64>::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
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

    #[test]
    fn zero_generator_builds_zero_superoperator() {
        let s = GkslGenerator::zero(2).build_super();
        assert!(s.hs_norm() < 1e-15);
    }

    #[test]
    fn amplitude_damping_spectrum() {
        let s = amplitude_damping().build_super();
        let evs = linalg::eigenvalues(s.matrix()).unwrap();
        let expected = [0.0, -0.5, -0.5, -1.0];
        for (e, x) in evs.iter().zip(expected.iter()) {
            assert!((e.re - x).abs() < 1e-12 && e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn generator_annihilates_identity_and_preserves_hermiticity() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for seed in 0..5u64 {
            let d = 2 + (seed % 3) as usize;
            let g = random_canonical(seed, d, 2);
            let s = g.build_super();
            let out = s.apply(&Operator::identity(d)).unwrap();
            assert!(out.hs_norm() < 1e-12 * (1.0 + s.hs_norm()));
            for _ in 0..20 {
                let a = random_operator(&mut rng, d);
                let la = s.apply(&a).unwrap();
                let lad = s.apply(&a.adjoint()).unwrap();
                assert!((&la.adjoint() - &lad).hs_norm() < 1e-12 * (1.0 + la.hs_norm()));
            }
        }
    }

    #[test]
    fn canonicalize_is_noop_on_canonical_input() {
        let g = random_canonical(5, 3, 2);
        let c = g.canonicalize();
        assert!(g.distance(&c).unwrap() < 1e-12);
        assert!(c.is_canonical());
        // idempotent
        let cc = c.canonicalize();
        assert!((cc.hamiltonian() - c.hamiltonian()).hs_norm() < 1e-12);
    }

    #[test]
    fn canonicalize_identity_jump_gives_zero_generator() {
        let g = GkslGenerator::new(Operator::zeros(2), vec![Operator::identity(2)]).unwrap();
        let c = g.canonicalize();
        assert!(c.hamiltonian().hs_norm() < 1e-14);
        assert!(c.jumps()[0].hs_norm() < 1e-14);
        assert!(c.build_super().hs_norm() < 1e-14);
        // reduce_jumps then drops the exact zero
        let r = c.reduce_jumps().unwrap();
        assert!(r.jumps().is_empty());
    }

    #[test]
    fn canonicalize_preserves_superoperator() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for seed in 0..10u64 {
            let d = 2 + (seed % 3) as usize;
            let h = random_operator(&mut rng, d).herm_split().0;
            let jumps: Vec<Operator> = (0..2).map(|_| random_operator(&mut rng, d)).collect();
            let g = GkslGenerator::new(h, jumps).unwrap();
            let c = g.canonicalize();
            assert!(c.is_canonical());
            let dist = g.distance(&c).unwrap();
            let scale = 1.0 + g.build_super().hs_norm();
            assert!(dist < 1e-11 * scale, "seed {seed}: {dist:.3e}");
            // canonical residual of seed {seed} is zero after a second pass
            assert!(c.canonicalize().distance(&c).unwrap() < 1e-12 * scale);
        }
    }

    #[test]
    fn reduce_duplicated_sigma_minus() {
        let g = GkslGenerator::new(Operator::zeros(2), vec![sigma_minus(), sigma_minus()])
            .unwrap();
        let r = g.reduce_jumps().unwrap();
        assert_eq!(r.jumps().len(), 1);
        assert!((r.jumps()[0].hs_norm().powi(2) - 2.0).abs() < 1e-12);
        assert!(g.distance(&r).unwrap() < 1e-12);
    }

    #[test]
    fn reduce_four_random_jumps_at_d2() {
        let g = random_canonical(11, 2, 4);
        let r = g.reduce_jumps().unwrap();
        assert!(r.jumps().len() <= 3); // d² − 1
        assert!(g.distance(&r).unwrap() < 1e-10 * (1.0 + g.build_super().hs_norm()));
    }

    #[test]
    fn reduce_keeps_independent_set() {
        let g = random_canonical(13, 3, 3);
        let r = g.reduce_jumps().unwrap();
        assert_eq!(r.jumps().len(), 3);
        for (a, b) in g.jumps().iter().zip(r.jumps().iter()) {
            assert!((a - b).hs_norm() < 1e-14);
        }
    }

    #[test]
    fn reduce_requires_canonical_input() {
        let g = GkslGenerator::new(Operator::zeros(2), vec![Operator::identity(2)]).unwrap();
        assert!(matches!(
            g.reduce_jumps(),
            Err(CoreError::NotCanonical { .. })
        ));
    }

    #[test]
    fn trace_identity_pure_hamiltonian() {
        let g = GkslGenerator::new(sigma_z().scale_re(0.5), vec![]).unwrap();
        let (lhs, rhs) = g.trace_identity_check().unwrap();
        assert!(lhs.abs() < 1e-12);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn trace_identity_amplitude_damping() {
        let (lhs, rhs) = amplitude_damping().trace_identity_check().unwrap();
        assert!((lhs + 2.0).abs() < 1e-12);
        assert!((rhs + 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_identity_random_d3() {
        for seed in 0..10u64 {
            let g = random_canonical(100 + seed, 3, 3);
            let (lhs, rhs) = g.trace_identity_check().unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
                "lhs {lhs}, rhs {rhs}"
            );
        }
    }

    #[test]
    fn jump_gauge_invariance() {
        let g = random_canonical(17, 3, 3);
        let u = haar(18, 3);
        let mut mixed = Vec::new();
        for j in 0..3 {
            let mut acc = DMatrix::<C64>::zeros(3, 3);
            for (k, v) in g.jumps().iter().enumerate() {
                acc += v.matrix() * u[(j, k)];
            }
            mixed.push(Operator::from_matrix(acc).unwrap());
        }
        let g2 = GkslGenerator::new(g.hamiltonian().clone(), mixed).unwrap();
        assert!(g.distance(&g2).unwrap() < 1e-11 * (1.0 + g.build_super().hs_norm()));
    }

    #[test]
    fn distance_examples() {
        let g = amplitude_damping();
        assert_eq!(g.distance(&g).unwrap(), 0.0);
        let stronger = GkslGenerator::new(
            Operator::zeros(2),
            vec![sigma_minus().scale_re(2f64.sqrt())],
        )
        .unwrap();
        assert!(g.distance(&stronger).unwrap() > 0.5);
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let h = random_operator(&mut rng, 2);
        assert!(matches!(
            GkslGenerator::new(h, vec![]),
            Err(CoreError::NotHermitian { .. })
        ));
    }
}
