//! Cross-module invariants that tie the independent routes together.

use num_traits::Zero;

use padic_density::characters::fourier_transform;
use padic_density::closed_forms::SigmaFamily;
use padic_density::engine::{fiber_size, triple_for};
use padic_density::oracle::{disc_class, is_maximal, DiscClass, EnumerationPlan};
use padic_density::verify::{sweep, FAMILY_KINDS};
use padic_density::{Int, Rat};

/// The closed-form ŵ stored in each triple must agree with a generic
/// discrete Fourier transform of the raw fiber weight.
#[test]
fn weight_transforms_rederive_from_raw_weights() {
    for p in [2u64, 3, 5] {
        for n in 2..=4usize {
            for kind in FAMILY_KINDS {
                for family in sweep(kind, p) {
                    if n < family.min_degree() {
                        continue;
                    }
                    let t = triple_for(&family, p, n).unwrap();
                    // Raw weight: measure of the fiber over each group
                    // element, i.e. the indicator of the pinned element (or
                    // the constant) divided by the fiber count.
                    let elems = t.group.elements();
                    let fiber = fiber_size(t.hom, p, n);
                    let pinned: Vec<usize> = match &family {
                        SigmaFamily::A1Fixed { b1 } | SigmaFamily::A1FixedAnUnit { b1 } => {
                            let b = b1.rem_euclid(p as i64) as u64;
                            elems.iter().enumerate().filter(|(_, e)| e.payload() == (b, 0))
                                .map(|(i, _)| i).collect()
                        }
                        // Both double-unit families delegate to the triple
                        // pinned at b1 = 1.
                        SigmaFamily::A1UnitAnUnit | SigmaFamily::An1UnitAnUnit => elems
                            .iter()
                            .enumerate()
                            .filter(|(_, e)| e.payload() == (1, 0))
                            .map(|(i, _)| i)
                            .collect(),
                        SigmaFamily::A1A2Fixed { b1, b2 } => {
                            let b = (b1.rem_euclid(p as i64) as u64, b2.rem_euclid(p as i64) as u64);
                            elems.iter().enumerate().filter(|(_, e)| e.payload() == b)
                                .map(|(i, _)| i).collect()
                        }
                        SigmaFamily::AnFixedUnit { bn } => {
                            let b = bn.rem_euclid(p as i64) as u64;
                            elems.iter().enumerate().filter(|(_, e)| e.payload() == (b, 0))
                                .map(|(i, _)| i).collect()
                        }
                        _ => (0..elems.len()).collect(),
                    };
                    let total_mass: Rat = Rat::new(Int::from(1), Int::from(1));
                    let per_elem = total_mass / (&fiber * Rat::from_integer((pinned.len() as u64).into()));
                    let mut w = vec![Rat::zero(); elems.len()];
                    for i in pinned {
                        w[i] = per_elem.clone();
                    }
                    let expected = fourier_transform(t.group, &w);
                    assert_eq!(t.w_hat, expected, "w_hat mismatch for {family:?} p={p} n={n}");
                }
            }
        }
    }
}

/// Valuation ≤ 1 of the discriminant must force maximality, polynomial by
/// polynomial, with both classifications recomputed from scratch.
#[test]
fn squarefree_discriminant_implies_maximality() {
    for (p, n) in [(2u64, 2usize), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)] {
        let plan = EnumerationPlan::new(&SigmaFamily::All, p, n).unwrap();
        for f in plan.polynomials() {
            let class = disc_class(&f);
            let max = is_maximal(&f);
            if class != DiscClass::Val2Plus {
                assert!(max, "non-maximal with unit/val-1 discriminant: {f:?}");
            }
        }
    }
}

/// Per-prime Euler factors from the closed forms coincide with the engine's
/// factors for the product families.
#[test]
fn euler_factor_source_independence() {
    use padic_density::engine::engine_density;
    use padic_density::euler::{local_factor, primes_up_to, DensityKind, EulerSet};
    for &p in &primes_up_to(100) {
        for n in [2usize, 3] {
            for (set, family) in [
                (EulerSet::ConstTerm, SigmaFamily::AnUnit),
                (EulerSet::SubleadingAndConst, SigmaFamily::A1UnitAnUnit),
                (EulerSet::LinearAndConst, SigmaFamily::An1UnitAnUnit),
            ] {
                let e = engine_density(&family, p, n).unwrap();
                assert_eq!(local_factor(set, DensityKind::Sqf, n, p).unwrap(), e.p_sqf);
                assert_eq!(local_factor(set, DensityKind::Max, n, p).unwrap(), e.p_max);
            }
        }
    }
}

/// Enumeration totals match the family's residue box sizes.
#[test]
fn plan_totals_match_family_shapes() {
    for p in [2u64, 3, 5] {
        let p2 = p * p;
        let units = p2 - p;
        for n in 3..=4usize {
            let cases: Vec<(SigmaFamily, u64)> = vec![
                (SigmaFamily::All, p2.pow(n as u32)),
                (SigmaFamily::A1Fixed { b1: 1 }, p2.pow(n as u32 - 1)),
                (SigmaFamily::A1A2Fixed { b1: 1, b2: 0 }, p2.pow(n as u32 - 2)),
                (SigmaFamily::AnUnit, units * p2.pow(n as u32 - 1)),
                (SigmaFamily::AnFixedUnit { bn: 1 }, p2.pow(n as u32 - 1)),
                (SigmaFamily::A1FixedAnUnit { b1: 0 }, units * p2.pow(n as u32 - 2)),
                (SigmaFamily::A1UnitAnUnit, units * units * p2.pow(n as u32 - 2)),
                (SigmaFamily::An1UnitAnUnit, units * units * p2.pow(n as u32 - 2)),
            ];
            for (family, want) in cases {
                let plan = EnumerationPlan::new(&family, p, n).unwrap();
                assert_eq!(plan.total(), want, "box size of {family:?}");
            }
        }
    }
}
