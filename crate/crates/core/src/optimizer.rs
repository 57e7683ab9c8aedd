//! Pump-coefficient optimization for a chosen detection direction.
//!
//! At a fixed signal/idler pair the amplitude is proportional to
//! `sum_nm c_nm (i X)^n (i Y)^m` with `X = w0 k_+x` and `Y = w0 k_+y`, so the
//! detection probability is the squared modulus of that sum. Maximizing it
//! over unit-norm coefficients has a closed form; a seeded projected
//! gradient ascent provides an independent check.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::modes::{ModeExpansion, ModeIndex};

/// Dimensionless detection direction: `X = w0 k_+x = 2 pi w0 nu_+x`, and
/// likewise for Y. The closed form assumes the paraxial regime |X|, |Y| << 1
/// but stays well-defined outside it.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TargetDirection {
    pub x: f64,
    pub y: f64,
}

impl TargetDirection {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// From transverse sum frequencies: `X = 2 pi w0 nu_+x`.
    pub fn from_transverse_frequency(w0: f64, nu_plus_x: f64, nu_plus_y: f64) -> Self {
        Self::new(
            2.0 * std::f64::consts::PI * w0 * nu_plus_x,
            2.0 * std::f64::consts::PI * w0 * nu_plus_y,
        )
    }

    /// Advisory paraxial bound; callers may warn when this is false.
    pub fn is_paraxial(&self) -> bool {
        self.x.abs() <= 0.3 && self.y.abs() <= 0.3
    }
}

/// Which indices participate alongside (0, 0).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum IndexSet {
    /// Every (n, m) != (0, 0) with n + m <= N.
    #[default]
    AllNonzeroOrders,
    /// Only n >= 1 and m >= 1 with n + m <= N.
    StrictlyPositivePairs,
}

impl IndexSet {
    /// Member indices (excluding (0, 0)) in deterministic order.
    pub fn members(&self, max_order: u32) -> Vec<ModeIndex> {
        let mut out = Vec::new();
        for n in 0..=max_order {
            for m in 0..=(max_order - n) {
                if n == 0 && m == 0 {
                    continue;
                }
                if matches!(self, IndexSet::StrictlyPositivePairs) && (n == 0 || m == 0) {
                    continue;
                }
                out.push(ModeIndex::new(n, m));
            }
        }
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    BruteForce,
}

/// An optimized expansion together with its objective value.
#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub expansion: ModeExpansion,
    pub objective: f64,
    pub method: Method,
    /// Total gradient iterations spent (0 for the closed form).
    pub iterations: usize,
}

/// Mode-sum weight at the target: `(i X)^n (i Y)^m`.
fn weight(idx: ModeIndex, t: &TargetDirection) -> C64 {
    C64::new(0.0, t.x).powu(idx.n) * C64::new(0.0, t.y).powu(idx.m)
}

/// Detection objective `M = |sum_nm c_nm (i X)^n (i Y)^m|^2`.
pub fn measurement_objective(expansion: &ModeExpansion, t: &TargetDirection) -> f64 {
    expansion
        .iter()
        .map(|(idx, c)| c * weight(idx, t))
        .sum::<C64>()
        .norm_sqr()
}

/// Closed-form optimum over the chosen index set:
/// `c_00 = 1 / sqrt(1 + S)`, `c_nm = (-i)^(n+m) X^n Y^m / sqrt(1 + S)` with
/// `S = sum X^(2n) Y^(2m)` over the set, so that
/// `arg(c_nm / c_00) = -(n + m) pi / 2` exactly.
pub fn optimal_expansion(
    t: &TargetDirection,
    max_order: u32,
    index_set: IndexSet,
) -> OptimizationResult {
    let members = index_set.members(max_order);
    let mut coefficients = BTreeMap::new();
    coefficients.insert(ModeIndex::new(0, 0), C64::new(1.0, 0.0));
    for idx in members {
        let magnitude = t.x.powi(idx.n as i32) * t.y.powi(idx.m as i32);
        let phase = C64::new(0.0, -1.0).powu(idx.order());
        coefficients.insert(idx, phase * magnitude);
    }
    // ModeExpansion::new normalizes, which divides by sqrt(1 + S) exactly.
    let expansion = ModeExpansion::new(coefficients, max_order)
        .expect("closed-form coefficients are nonzero");
    let objective = measurement_objective(&expansion, t);
    OptimizationResult {
        expansion,
        objective,
        method: Method::ClosedForm,
        iterations: 0,
    }
}

/// Maximizes the objective with projected gradient ascent over the unit
/// coefficient sphere, restarted from 32 seeded random points. Deterministic
/// for a fixed seed; fails if no restart converges.
pub fn brute_force_optimal(
    t: &TargetDirection,
    max_order: u32,
    index_set: IndexSet,
    seed: u64,
) -> Result<OptimizationResult> {
    const RESTARTS: usize = 32;
    const MAX_ITER: usize = 50_000;
    const CHECK_EVERY: usize = 100;
    const OBJECTIVE_TOL: f64 = 1e-12;

    let mut indices = vec![ModeIndex::new(0, 0)];
    indices.extend(index_set.members(max_order));
    let weights: Vec<C64> = indices.iter().map(|&idx| weight(idx, t)).collect();
    let weight_power: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    let step = 1.0 / weight_power.max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<C64>)> = None;
    let mut total_iterations = 0usize;
    let mut any_converged = false;

    for _ in 0..RESTARTS {
        let mut c: Vec<C64> = (0..indices.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        normalize(&mut c);

        let mut checkpoint = objective_of(&c, &weights);
        let mut converged = false;
        for iter in 1..=MAX_ITER {
            let overlap: C64 = c.iter().zip(&weights).map(|(ck, wk)| ck * wk).sum();
            for (ck, wk) in c.iter_mut().zip(&weights) {
                *ck += step * overlap * wk.conj();
            }
            normalize(&mut c);
            total_iterations += 1;
            if iter % CHECK_EVERY == 0 {
                let obj = objective_of(&c, &weights);
                if (obj - checkpoint).abs() < OBJECTIVE_TOL {
                    converged = true;
                    break;
                }
                checkpoint = obj;
            }
        }
        if !converged {
            continue;
        }
        any_converged = true;
        let obj = objective_of(&c, &weights);
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, c));
        }
    }

    let (objective, mut c) = match best {
        Some(b) if any_converged => b,
        _ => {
            return Err(Error::NonConvergence {
                iterations: total_iterations,
            })
        }
    };

    fix_global_phase(&mut c);
    let coefficients: BTreeMap<ModeIndex, C64> =
        indices.into_iter().zip(c).collect();
    let expansion = ModeExpansion::new(coefficients, max_order)?;
    Ok(OptimizationResult {
        expansion,
        objective,
        method: Method::BruteForce,
        iterations: total_iterations,
    })
}

fn normalize(c: &mut [C64]) {
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for v in c.iter_mut() {
        *v /= norm;
    }
}

fn objective_of(c: &[C64], weights: &[C64]) -> f64 {
    c.iter()
        .zip(weights)
        .map(|(ck, wk)| ck * wk)
        .sum::<C64>()
        .norm_sqr()
}

/// Rotates the global phase so the leading coefficient (c_00 when it is
/// nonzero, otherwise the largest one) is real and positive.
fn fix_global_phase(c: &mut [C64]) {
    let reference = if c[0].norm() > 1e-12 {
        c[0]
    } else {
        *c.iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap()
    };
    let rotation = (reference / reference.norm()).conj();
    for v in c.iter_mut() {
        *v *= rotation;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_reference_values() {
        let pure = ModeExpansion::single(ModeIndex::new(0, 0));
        assert!((measurement_objective(&pure, &TargetDirection::new(0.17, -0.4)) - 1.0).abs() < 1e-15);

        let odd = ModeExpansion::single(ModeIndex::new(1, 0));
        assert_eq!(measurement_objective(&odd, &TargetDirection::new(0.0, 0.3)), 0.0);

        // {(0,0): 1/sqrt2, (1,0): -i/sqrt2} at X = 0.1: |1/sqrt2 + (-i)(0.1 i)/sqrt2|^2
        let mut coeffs = BTreeMap::new();
        coeffs.insert(ModeIndex::new(0, 0), C64::new(1.0, 0.0));
        coeffs.insert(ModeIndex::new(1, 0), C64::new(0.0, -1.0));
        let e = ModeExpansion::new(coeffs, 1).unwrap();
        let m = measurement_objective(&e, &TargetDirection::new(0.1, 0.0));
        assert!((m - 0.605).abs() < 1e-15, "m = {m}");
    }

    #[test]
    fn collinear_optimum_is_fundamental() {
        let r = optimal_expansion(&TargetDirection::new(0.0, 0.0), 3, IndexSet::AllNonzeroOrders);
        assert_eq!(
            r.expansion.coefficient(ModeIndex::new(0, 0)),
            C64::new(1.0, 0.0)
        );
        for (idx, c) in r.expansion.iter() {
            if idx != ModeIndex::new(0, 0) {
                assert_eq!(c, C64::new(0.0, 0.0));
            }
        }
        assert!((r.objective - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_pair_example() {
        // X = Y = 0.1 with only the (1,1) partner mode
        let t = TargetDirection::new(0.1, 0.1);
        let r = optimal_expansion(&t, 2, IndexSet::StrictlyPositivePairs);
        let c11 = r.expansion.coefficient(ModeIndex::new(1, 1));
        let expect = 0.01 / 1.0001f64.sqrt();
        assert!((c11.norm() - expect).abs() < 1e-12);
        let c00 = r.expansion.coefficient(ModeIndex::new(0, 0));
        assert!((c00.re - 1.0 / 1.0001f64.sqrt()).abs() < 1e-12);
        // phase: (n+m)(-pi/2) = -pi, i.e. c11 is real negative
        assert!(c11.im.abs() < 1e-15 && c11.re < 0.0);
    }

    #[test]
    fn one_dimensional_target_uses_x_orders_only() {
        let t = TargetDirection::new(0.2, 0.0);
        let r = optimal_expansion(&t, 2, IndexSet::AllNonzeroOrders);
        for (idx, c) in r.expansion.iter() {
            if idx.m > 0 {
                assert_eq!(c, C64::new(0.0, 0.0), "({}, {})", idx.n, idx.m);
            }
        }
        let c1 = r.expansion.coefficient(ModeIndex::new(1, 0));
        let c2 = r.expansion.coefficient(ModeIndex::new(2, 0));
        // c_i0 proportional to (-0.2 i)^i
        assert!((c1.im + 0.2 * r.expansion.coefficient(ModeIndex::new(0, 0)).re).abs() < 1e-12);
        assert!(c1.re.abs() < 1e-15);
        assert!((c2.re + 0.04 * r.expansion.coefficient(ModeIndex::new(0, 0)).re).abs() < 1e-12);
    }

    #[test]
    fn brute_force_matches_closed_form() {
        let t = TargetDirection::new(0.1, 0.1);
        let closed = optimal_expansion(&t, 2, IndexSet::StrictlyPositivePairs);
        let brute = brute_force_optimal(&t, 2, IndexSet::StrictlyPositivePairs, 42).unwrap();
        assert!((closed.objective - brute.objective).abs() < 1e-9);
        for (idx, c) in closed.expansion.iter() {
            let b = brute.expansion.coefficient(idx);
            assert!(
                (c.norm() - b.norm()).abs() < 1e-6,
                "({}, {}) modulus {} vs {}",
                idx.n,
                idx.m,
                c.norm(),
                b.norm()
            );
            if c.norm() > 1e-9 {
                let rel_phase = (b / c).arg().abs();
                assert!(rel_phase < 1e-6, "phase mismatch {rel_phase}");
            }
        }
    }

    #[test]
    fn brute_force_collinear() {
        let r = brute_force_optimal(
            &TargetDirection::new(0.0, 0.0),
            2,
            IndexSet::AllNonzeroOrders,
            7,
        )
        .unwrap();
        let c00 = r.expansion.coefficient(ModeIndex::new(0, 0));
        assert!((c00 - C64::new(1.0, 0.0)).norm() < 1e-6);
        assert!((r.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn brute_force_is_deterministic() {
        let t = TargetDirection::new(0.23, -0.11);
        let a = brute_force_optimal(&t, 2, IndexSet::AllNonzeroOrders, 99).unwrap();
        let b = brute_force_optimal(&t, 2, IndexSet::AllNonzeroOrders, 99).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.iterations, b.iterations);
        for (idx, c) in a.expansion.iter() {
            assert_eq!(c, b.expansion.coefficient(idx));
        }
    }

    #[test]
    fn paraxial_advisory() {
        assert!(TargetDirection::new(0.3, -0.3).is_paraxial());
        assert!(!TargetDirection::new(0.31, 0.0).is_paraxial());
    }
}
