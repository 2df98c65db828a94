// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! The semigroup side of the GKSL correspondence: Λ_t = exp(tL), the
//! one-step unital CP map
//!
//!   Ψ_t:  R_0(t) = e^{−itH}·√(I − t·ΣV_j†V_j),   R_j(t) = √t·V_j,
//!
//! valid for 0 ≤ t ≤ t₀ = ‖ΣV_j†V_j‖∞⁻¹, and the product-formula channels
//! Φ_n = Ψ_{t/n}ⁿ whose convergence to exp(tL) is measured by
//! [`trotter_convergence`].

use serde::{Deserialize, Serialize};

use crate::channel::{super_from_kraus, KrausSet, SuperMatrix};
use crate::error::{CoreError, Result};
use crate::fit;
use crate::generator::GkslGenerator;
use crate::linalg;
use crate::operator::{Operator, C64};

/// Default n-grid for convergence sweeps: ≥ 4 values spanning ≥ 2 decades.
pub const DEFAULT_N_GRID: [u64; 5] = [16, 64, 256, 1024, 4096];

/// Errors below this floor (relative to the reference channel norm) make a
/// slope fit meaningless; such sweeps are reported as degenerate.
const DEGENERATE_ERROR_FLOOR: f64 = 1.0e-13;

/// The channel Λ_t = exp(t·L) as a superoperator matrix.
pub fn channel_at(g: &GkslGenerator, t: f64) -> Result<SuperMatrix> {
    if t < 0.0 {
        return Err(CoreError::NegativeTime(t));
    }
    let l = g.build_super();
    let mat = linalg::expm(&l.matrix().scale(t));
    SuperMatrix::new(g.dim(), mat)
}

/// Largest admissible step for [`psi_step`]: ‖Σ V_j†V_j‖∞⁻¹, infinite when
/// all jumps vanish.
pub fn t0_max(g: &GkslGenerator) -> f64 {
    let k = g.jump_gram_sum();
    let norm = k.uniform_norm();
    if norm == 0.0 {
        f64::INFINITY
    } else {
        1.0 / norm
    }
}

/// The one-step unital CP map Ψ_t as a Kraus set of N+1 operators.
pub fn psi_step(g: &GkslGenerator, t: f64) -> Result<KrausSet> {
    if t < 0.0 {
        return Err(CoreError::NegativeTime(t));
    }
    let t_max = t0_max(g);
    if t > t_max {
        return Err(CoreError::StepTooLarge { t, t_max });
    }
    let d = g.dim();
    let k = g.jump_gram_sum();
    let inside = &Operator::identity(d) - &k.scale_re(t);
    let root = inside.psd_sqrt()?;
    let u = linalg::expm(&(g.hamiltonian().matrix() * C64::new(0.0, -t)));
    let r0 = Operator::from_matrix(u * root.matrix())?;
    let mut ops = vec![r0];
    let sqrt_t = t.sqrt();
    for v in g.jumps() {
        ops.push(v.scale_re(sqrt_t));
    }
    KrausSet::new(ops)
}

/// The product-formula channel Φ_n = Ψ_{t/n}ⁿ.
pub fn trotter_channel(g: &GkslGenerator, t: f64, n: u64) -> Result<SuperMatrix> {
    if t < 0.0 {
        return Err(CoreError::NegativeTime(t));
    }
    if n == 0 {
        return Err(CoreError::InsufficientGrid("n must be at least 1".into()));
    }
    let step = super_from_kraus(&psi_step(g, t / n as f64)?);
    Ok(step.pow(n))
}

/// Convergence report for Φ_n → exp(tL).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrotterReport {
    pub t: f64,
    pub n_values: Vec<u64>,
    /// ‖Φ_n − exp(tL)‖₂ per grid point.
    pub errors: Vec<f64>,
    /// Log-log slope of error against n; `None` when the errors sit at the
    /// rounding floor (e.g. the zero generator) and no rate is identifiable.
    pub fitted_slope: Option<f64>,
    /// Whether the errors are nonincreasing up to 10% jitter.
    pub monotone: bool,
}

/// Sweeps Φ_n over `n_values` and fits the convergence rate. The grid must
/// hold at least 4 strictly increasing values spanning two decades, all with
/// n ≥ t/t₀.
pub fn trotter_convergence(g: &GkslGenerator, t: f64, n_values: &[u64]) -> Result<TrotterReport> {
    if n_values.len() < 4 {
        return Err(CoreError::InsufficientGrid(
            "need at least 4 grid points".into(),
        ));
    }
    if !n_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(CoreError::InsufficientGrid(
            "n values must be strictly increasing".into(),
        ));
    }
    let first = n_values[0] as f64;
    let last = *n_values.last().unwrap() as f64;
    if last / first < 100.0 {
        return Err(CoreError::InsufficientGrid(
            "n values must span at least two decades".into(),
        ));
    }
    let reference = channel_at(g, t)?;
    let mut errors = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let phi = trotter_channel(g, t, n)?;
        errors.push(phi.hs_distance(&reference)?);
    }
    let floor = DEGENERATE_ERROR_FLOOR * (1.0 + reference.hs_norm());
    let fitted_slope = if errors.iter().any(|&e| e <= floor) {
        None
    } else {
        let ns: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
        fit::loglog_slope(&ns, &errors)
    };
    let monotone = errors.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    Ok(TrotterReport {
        t,
        n_values: n_values.to_vec(),
        errors,
        fitted_slope,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi_from_super, kraus_from_choi, DEFAULT_RANK_TOL};
    use crate::operator::test_support::*;
    use rand::SeedableRng;

    fn amplitude_damping() -> GkslGenerator {
        GkslGenerator::new(Operator::zeros(2), vec![sigma_minus()]).unwrap()
    }

    fn random_canonical(seed: u64, d: usize, n_jumps: usize) -> GkslGenerator {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let (h, _) = random_operator(&mut rng, d).herm_split().0.traceless_part();
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

    #[test]
    fn channel_at_zero_time_is_identity() {
        let g = random_canonical(1, 3, 2);
        let s = channel_at(&g, 0.0).unwrap();
        assert!(s.hs_distance(&SuperMatrix::identity(3)).unwrap() < 1e-14);
    }

    #[test]
    fn channel_at_rejects_negative_time() {
        assert!(matches!(
            channel_at(&amplitude_damping(), -0.5),
            Err(CoreError::NegativeTime(_))
        ));
    }

    #[test]
    fn amplitude_damping_population_decay() {
        let g = amplitude_damping();
        let e11 = Operator::from_fn(2, |r, c| {
            if (r, c) == (1, 1) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        for t in [0.1, 1.0, 3.0] {
            let s = channel_at(&g, t).unwrap();
            let out = s.apply(&e11).unwrap();
            assert!(
                (out.entry(1, 1).re - (-t).exp()).abs() < 1e-12,
                "t = {t}"
            );
        }
    }

    #[test]
    fn pure_hamiltonian_coherence_phase() {
        let g = GkslGenerator::new(sigma_z().scale_re(0.5), vec![]).unwrap();
        let e01 = Operator::from_fn(2, |r, c| {
            if (r, c) == (0, 1) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let t = 0.7;
        let out = channel_at(&g, t).unwrap().apply(&e01).unwrap();
        let expect = C64::new(t.cos(), t.sin()); // e^{it}
        assert!((out.entry(0, 1) - expect).norm() < 1e-12);
    }

    #[test]
    fn semigroup_law() {
        let g = random_canonical(2, 2, 2);
        let s = channel_at(&g, 0.4).unwrap();
        let t = channel_at(&g, 1.1).unwrap();
        let st = channel_at(&g, 1.5).unwrap();
        let dist = s.compose(&t).unwrap().hs_distance(&st).unwrap();
        assert!(dist < 1e-10 * (1.0 + st.hs_norm()));
    }

    #[test]
    fn channel_is_unital_and_cp() {
        for seed in 0..5u64 {
            let d = 2 + (seed % 2) as usize;
            let g = random_canonical(seed + 10, d, 2);
            for t in [0.1, 0.5, 1.0, 2.0] {
                let s = channel_at(&g, t).unwrap();
                let out = s.apply(&Operator::identity(d)).unwrap();
                assert!((&out - &Operator::identity(d)).hs_norm() < 1e-10);
                let j = choi_from_super(&s).unwrap();
                let min = j.min_eigenvalue().unwrap();
                let norm = j.uniform_norm().unwrap();
                assert!(min >= -1e-9 * norm, "min Choi eigenvalue {min:.3e}");
            }
        }
    }

    #[test]
    fn t0_examples() {
        let g = GkslGenerator::new(Operator::zeros(2), vec![sigma_x()]).unwrap();
        assert!((t0_max(&g) - 1.0).abs() < 1e-12);

        let g = GkslGenerator::new(Operator::zeros(2), vec![]).unwrap();
        assert!(t0_max(&g).is_infinite());

        let g = GkslGenerator::new(
            Operator::zeros(2),
            vec![sigma_minus().scale_re(2f64.sqrt())],
        )
        .unwrap();
        assert!((t0_max(&g) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn psi_step_at_zero_is_identity_plus_zeros() {
        let g = amplitude_damping();
        let k = psi_step(&g, 0.0).unwrap();
        assert_eq!(k.len(), 2);
        assert!((&k.ops()[0] - &Operator::identity(2)).hs_norm() < 1e-14);
        assert!(k.ops()[1].hs_norm() < 1e-14);
    }

    #[test]
    fn psi_step_amplitude_damping_explicit() {
        let k = psi_step(&amplitude_damping(), 0.1).unwrap();
        let r0 = &k.ops()[0];
        assert!((r0.entry(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r0.entry(1, 1) - C64::new(0.9f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(r0.entry(0, 1).norm() < 1e-14 && r0.entry(1, 0).norm() < 1e-14);
        let r1 = &k.ops()[1];
        assert!((r1 - &sigma_minus().scale_re(0.1f64.sqrt())).hs_norm() < 1e-14);
    }

    #[test]
    fn psi_step_is_exactly_unital() {
        for seed in 0..5u64 {
            let g = random_canonical(seed + 20, 3, 3);
            let t = 0.8 * t0_max(&g);
            let k = psi_step(&g, t).unwrap();
            let (ok, resid) = k.is_unital(1e-11);
            assert!(ok, "residual {resid:.3e}");
        }
    }

    #[test]
    fn psi_step_rejects_oversized_step() {
        let g = amplitude_damping();
        let t = t0_max(&g) * 1.01;
        assert!(matches!(
            psi_step(&g, t),
            Err(CoreError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn psi_step_matches_channel_to_first_order() {
        // ‖Ψ_t − Λ_t‖₂ = O(t²): slope 2 on a log-log grid
        let g = random_canonical(31, 2, 2);
        let ts = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
        let mut errs = Vec::new();
        for &t in &ts {
            let psi = super_from_kraus(&psi_step(&g, t).unwrap());
            let lam = channel_at(&g, t).unwrap();
            errs.push(psi.hs_distance(&lam).unwrap());
        }
        let slope = fit::loglog_slope(&ts, &errs).unwrap();
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn trotter_at_t_zero_is_identity() {
        let g = amplitude_damping();
        let s = trotter_channel(&g, 0.0, 16).unwrap();
        assert!(s.hs_distance(&SuperMatrix::identity(2)).unwrap() < 1e-13);
    }

    #[test]
    fn trotter_error_decreases_and_is_first_order() {
        let g = amplitude_damping();
        let report = trotter_convergence(&g, 1.0, &DEFAULT_N_GRID).unwrap();
        assert!(report.monotone);
        // O(1/n): three decades of n gain ≥ two decades of error
        assert!(report.errors.last().unwrap() < &(1e-2 * report.errors[0]));
        let slope = report.fitted_slope.unwrap();
        assert!((-1.15..=-0.85).contains(&slope), "slope {slope}");
    }

    #[test]
    fn trotter_random_generator_slope() {
        let g = random_canonical(41, 3, 3);
        let report = trotter_convergence(&g, 0.5, &DEFAULT_N_GRID).unwrap();
        let slope = report.fitted_slope.unwrap();
        assert!((slope + 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn trotter_zero_generator_is_degenerate() {
        let g = GkslGenerator::zero(2);
        let report = trotter_convergence(&g, 1.0, &DEFAULT_N_GRID).unwrap();
        assert!(report.errors.iter().all(|&e| e < 1e-13));
        assert!(report.fitted_slope.is_none());
    }

    #[test]
    fn trotter_grid_validation() {
        let g = amplitude_damping();
        assert!(matches!(
            trotter_convergence(&g, 1.0, &[16, 32, 64]),
            Err(CoreError::InsufficientGrid(_))
        ));
        assert!(matches!(
            trotter_convergence(&g, 1.0, &[16, 32, 64, 128]),
            Err(CoreError::InsufficientGrid(_))
        ));
        assert!(matches!(
            trotter_convergence(&g, 1.0, &[16, 16, 64, 4096]),
            Err(CoreError::InsufficientGrid(_))
        ));
    }

    #[test]
    fn trotter_respects_t0() {
        // t/n > t₀ must error rather than silently clip
        let g = GkslGenerator::new(
            Operator::zeros(2),
            vec![sigma_minus().scale_re(10.0)], // t₀ = 0.01
        )
        .unwrap();
        assert!(matches!(
            trotter_channel(&g, 1.0, 4),
            Err(CoreError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn trotter_channel_is_cp_and_unital_by_construction() {
        let g = random_canonical(51, 2, 2);
        let s = trotter_channel(&g, 1.0, 64).unwrap();
        let out = s.apply(&Operator::identity(2)).unwrap();
        assert!((&out - &Operator::identity(2)).hs_norm() < 1e-11);
        let kraus = kraus_from_choi(&choi_from_super(&s).unwrap(), DEFAULT_RANK_TOL);
        assert!(kraus.is_ok());
    }
}
