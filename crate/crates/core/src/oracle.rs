//! Ground truth by exhaustive enumeration of a family mod p².
//!
//! Every polynomial in the family's residue box is classified twice: the
//! discriminant valuation comes from an exact integer resultant, and
//! maximality of `Z_p[x]/(f)` comes from Dedekind's criterion. Densities are
//! exact counts over the box size.

use std::collections::HashMap;

use crate::closed_forms::SigmaFamily;
use crate::engine::{DensityResult, Method};
use crate::fp_poly::{disc_mod, div_rem, factor, gcd, PolyMod};
use crate::Rat;

/// Default cap on the number of enumerated polynomials.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Errors raised by the enumeration oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    BudgetExceeded { required: u64 },
    InvalidParams(String),
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::BudgetExceeded { required } => {
                write!(f, "enumeration budget exceeded: needs {required} polynomials")
            }
            OracleError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// p-adic valuation class of a discriminant taken mod p².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscClass {
    Unit,
    Val1,
    Val2Plus,
}

/// Classifies the discriminant valuation of a monic polynomial mod p².
pub fn disc_class(f: &PolyMod) -> DiscClass {
    let p = f.prime();
    let d = disc_mod(f).value;
    if !d.is_multiple_of(p) {
        DiscClass::Unit
    } else if d != 0 {
        DiscClass::Val1
    } else {
        DiscClass::Val2Plus
    }
}

/// Dedekind's criterion on f mod p²: factor f̄ = Π gᵢ^{eᵢ}, set ḡ = Π gᵢ and
/// h̄ = f̄/ḡ, lift to G, H, and test gcd((GH − f)/p mod p, ḡ, h̄) = 1.
pub fn is_maximal(f: &PolyMod) -> bool {
    assert_eq!(f.power(), 2, "Dedekind criterion reads f mod p^2");
    assert!(f.is_monic() && f.degree() >= 1);
    let fbar = f.reduce_to_prime();
    let fact = factor(&fbar);
    let g = fact.radical();
    let (h, rem) = div_rem(&fbar, &g);
    debug_assert!(rem.is_zero());
    let gh = lift_product(&g, &h);
    is_maximal_with_prep(f, &g, &h, &gh)
}

/// Integer coefficients of G·H for the canonical lifts (coefficients in
/// [0, p)) of two mod-p polynomials.
fn lift_product(g: &PolyMod, h: &PolyMod) -> Vec<u64> {
    let mut out = vec![0u64; g.degree() + h.degree() + 1];
    for (i, &a) in g.coeffs().iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in h.coeffs().iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn is_maximal_with_prep(f: &PolyMod, g: &PolyMod, h: &PolyMod, gh: &[u64]) -> bool {
    if h.degree() == 0 {
        // f̄ squarefree: gcd(·, ḡ, 1) = 1.
        return true;
    }
    let p = f.prime();
    let p2 = p * p;
    // F̄ = ((G·H − f)/p) mod p, well-defined from f mod p².
    let mut fray = vec![0u64; f.degree()];
    for (i, slot) in fray.iter_mut().enumerate() {
        let diff = (gh[i] % p2 + p2 - f.coeff(i).value) % p2;
        debug_assert_eq!(diff % p, 0, "GH and f must agree mod p");
        *slot = (diff / p) % p;
    }
    let fray = PolyMod::new(p, 1, &fray);
    gcd(&gcd(&fray, g), h).degree() == 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CoeffRange {
    Free,
    Unit,
    Fixed(u64),
}

impl CoeffRange {
    fn size(&self, p: u64) -> u64 {
        match self {
            CoeffRange::Free => p * p,
            CoeffRange::Unit => p * p - p,
            CoeffRange::Fixed(_) => 1,
        }
    }

    fn values(&self, p: u64) -> Vec<u64> {
        match self {
            CoeffRange::Free => (0..p * p).collect(),
            CoeffRange::Unit => (1..p * p).filter(|v| v % p != 0).collect(),
            CoeffRange::Fixed(r) => vec![*r],
        }
    }
}

/// The residue box a family occupies mod p²: one range per non-leading
/// coefficient, constant coefficient first.
#[derive(Clone, Debug)]
pub struct EnumerationPlan {
    p: u64,
    n: usize,
    ranges: Vec<CoeffRange>,
}

impl EnumerationPlan {
    pub fn new(family: &SigmaFamily, p: u64, n: usize) -> Result<EnumerationPlan, OracleError> {
        if !crate::engine::is_prime(p) {
            return Err(OracleError::InvalidParams(format!("{p} is not prime")));
        }
        if n < family.min_degree() {
            return Err(OracleError::InvalidParams(format!(
                "family {} needs degree >= {}",
                family.cli_name(),
                family.min_degree()
            )));
        }
        // ranges[i] governs the coefficient of x^i; the pinned residues are
        // the parameters reduced mod p.
        let r = |v: i64| v.rem_euclid(p as i64) as u64;
        let mut ranges = vec![CoeffRange::Free; n];
        match family {
            SigmaFamily::All => {}
            SigmaFamily::A1Fixed { b1 } => ranges[n - 1] = CoeffRange::Fixed(r(*b1)),
            SigmaFamily::A1A2Fixed { b1, b2 } => {
                ranges[n - 1] = CoeffRange::Fixed(r(*b1));
                ranges[n - 2] = CoeffRange::Fixed(r(*b2));
            }
            SigmaFamily::AnUnit => ranges[0] = CoeffRange::Unit,
            SigmaFamily::AnFixedUnit { bn } => {
                if r(*bn) == 0 {
                    return Err(OracleError::InvalidParams(format!(
                        "constant coefficient {bn} is not a unit mod {p}"
                    )));
                }
                ranges[0] = CoeffRange::Fixed(r(*bn));
            }
            SigmaFamily::A1FixedAnUnit { b1 } => {
                ranges[n - 1] = CoeffRange::Fixed(r(*b1));
                ranges[0] = CoeffRange::Unit;
            }
            SigmaFamily::A1UnitAnUnit => {
                ranges[n - 1] = CoeffRange::Unit;
                ranges[0] = CoeffRange::Unit;
            }
            SigmaFamily::An1UnitAnUnit => {
                ranges[1] = CoeffRange::Unit;
                ranges[0] = CoeffRange::Unit;
            }
        }
        Ok(EnumerationPlan { p, n, ranges })
    }

    /// Number of polynomials in the box.
    pub fn total(&self) -> u64 {
        self.ranges.iter().map(|r| r.size(self.p)).product()
    }

    /// Odometer enumeration: the constant coefficient varies fastest.
    pub fn polynomials(&self) -> impl Iterator<Item = PolyMod> + '_ {
        let values: Vec<Vec<u64>> = self.ranges.iter().map(|r| r.values(self.p)).collect();
        let total = self.total();
        let p = self.p;
        let n = self.n;
        (0..total).map(move |mut code| {
            let mut coeffs = vec![0u64; n + 1];
            for (i, vals) in values.iter().enumerate() {
                let len = vals.len() as u64;
                coeffs[i] = vals[(code % len) as usize];
                code /= len;
            }
            coeffs[n] = 1;
            PolyMod::new(p, 2, &coeffs)
        })
    }
}

struct ResiduePrep {
    disc_bar: u64,
    g: PolyMod,
    h: PolyMod,
    gh: Vec<u64>,
}

fn prepare(fbar: &PolyMod) -> ResiduePrep {
    let fact = factor(fbar);
    let g = fact.radical();
    let (h, rem) = div_rem(fbar, &g);
    debug_assert!(rem.is_zero());
    let gh = lift_product(&g, &h);
    let disc_bar = disc_mod(&fbar.lift_to_square()).value % fbar.prime();
    ResiduePrep { disc_bar, g, h, gh }
}

/// Exact densities of a family by full enumeration mod p².
///
/// The reduction f̄ determines the radical/cofactor pair and whether the
/// discriminant is a unit, so that work is shared across lifts; only
/// polynomials with non-unit discriminant need the integer resultant.
pub fn enumerate_density(
    family: &SigmaFamily,
    p: u64,
    n: usize,
    budget: u64,
) -> Result<DensityResult, OracleError> {
    let plan = EnumerationPlan::new(family, p, n)?;
    let total = plan.total();
    if total > budget {
        return Err(OracleError::BudgetExceeded { required: total });
    }
    let mut preps: HashMap<Vec<u64>, ResiduePrep> = HashMap::new();
    let mut unit = 0u64;
    let mut val1 = 0u64;
    let mut maximal = 0u64;
    for f in plan.polynomials() {
        let fbar = f.reduce_to_prime();
        let prep = preps.entry(fbar.coeffs().to_vec()).or_insert_with(|| prepare(&fbar));
        let class = if prep.disc_bar != 0 {
            DiscClass::Unit
        } else if disc_mod(&f).value != 0 {
            DiscClass::Val1
        } else {
            DiscClass::Val2Plus
        };
        let max = is_maximal_with_prep(&f, &prep.g, &prep.h, &prep.gh);
        debug_assert!(max || class == DiscClass::Val2Plus,
            "squarefree discriminant must imply maximality");
        match class {
            DiscClass::Unit => unit += 1,
            DiscClass::Val1 => val1 += 1,
            DiscClass::Val2Plus => {}
        }
        if max {
            maximal += 1;
        }
    }
    let frac = |count: u64| Rat::new(count.into(), total.into());
    Ok(DensityResult::new(
        p,
        frac(unit),
        frac(val1),
        frac(maximal),
        Method::Oracle,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    fn fp2(p: u64, coeffs: &[u64]) -> PolyMod {
        PolyMod::new(p, 2, coeffs)
    }

    #[test]
    fn disc_class_cases() {
        assert_eq!(disc_class(&fp2(2, &[1, 1, 1])), DiscClass::Unit); // Δ = −3
        assert_eq!(disc_class(&fp2(3, &[0, 0, 1])), DiscClass::Val2Plus); // Δ = 0
        assert_eq!(disc_class(&fp2(3, &[3, 0, 1])), DiscClass::Val1); // Δ = −12
    }

    #[test]
    fn maximality_cases() {
        assert!(is_maximal(&fp2(2, &[1, 0, 1]))); // Z_2[i]
        assert!(!is_maximal(&fp2(3, &[0, 0, 1]))); // x² ∈ (p, x)²
        assert!(is_maximal(&fp2(2, &[1, 1, 1]))); // squarefree reduction
    }

    #[test]
    fn plan_sizes() {
        let plan = EnumerationPlan::new(&SigmaFamily::All, 2, 2).unwrap();
        assert_eq!(plan.total(), 16);
        assert_eq!(plan.polynomials().count(), 16);
        let plan = EnumerationPlan::new(&SigmaFamily::AnUnit, 3, 2).unwrap();
        assert_eq!(plan.total(), 6 * 9);
        let plan = EnumerationPlan::new(&SigmaFamily::A1UnitAnUnit, 3, 3).unwrap();
        assert_eq!(plan.total(), 36 * 9);
        for f in plan.polynomials() {
            assert!(f.is_monic() && f.degree() == 3);
            assert!(f.coeff(0).value % 3 != 0);
            assert!(f.coeff(2).value % 3 != 0);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_density(&SigmaFamily::All, 5, 4, 1000).unwrap_err();
        assert_eq!(err, OracleError::BudgetExceeded { required: 390625 });
    }

    #[test]
    fn enumerate_examples() {
        // Full family at p = 2, n = 2: 12 of 16 maximal.
        let r = enumerate_density(&SigmaFamily::All, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.p_max, rat(3, 4));
        assert_eq!(r.p0_sqf, rat(1, 2));
        // Odd fixed a1 at (2, 2): all discriminants are units.
        let r = enumerate_density(&SigmaFamily::A1Fixed { b1: 1 }, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.p0_sqf, rat_int(1));
        // Fixed unit constant at p = 3, n = 2 with a non-square residue.
        let r =
            enumerate_density(&SigmaFamily::AnFixedUnit { bn: 2 }, 3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.p_sqf, rat_int(1));
    }

    #[test]
    fn reflection_identifies_the_two_double_unit_families() {
        for (p, n) in [(2u64, 3usize), (3, 3), (3, 4), (5, 2)] {
            let a = enumerate_density(&SigmaFamily::A1UnitAnUnit, p, n, DEFAULT_BUDGET).unwrap();
            let b = enumerate_density(&SigmaFamily::An1UnitAnUnit, p, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(a.p0_sqf, b.p0_sqf);
            assert_eq!(a.p1_sqf, b.p1_sqf);
            assert_eq!(a.p_max, b.p_max);
            // Both also match the family with a1 pinned to the unit 1.
            let c = enumerate_density(&SigmaFamily::A1FixedAnUnit { b1: 1 }, p, n, DEFAULT_BUDGET)
                .unwrap();
            assert_eq!(a.p0_sqf, c.p0_sqf);
            assert_eq!(a.p1_sqf, c.p1_sqf);
            assert_eq!(a.p_max, c.p_max);
        }
    }

    #[test]
    fn maximality_is_lift_invariant() {
        // Dedekind's criterion must not depend on the choice of monic lifts
        // G, H: perturb both by p·(random-ish polynomials) and recompare.
        for p in [2u64, 3] {
            for f in EnumerationPlan::new(&SigmaFamily::All, p, 3).unwrap().polynomials() {
                let fbar = f.reduce_to_prime();
                let fact = factor(&fbar);
                let g = fact.radical();
                let (h, _) = div_rem(&fbar, &g);
                let baseline = is_maximal(&f);
                for salt in 1..=2u64 {
                    // Monic lifts only: perturb the coefficients below the
                    // leading one by multiples of p.
                    let bump = |poly: &PolyMod, s: u64| -> Vec<u64> {
                        let d = poly.degree();
                        poly.coeffs()
                            .iter()
                            .enumerate()
                            .map(|(i, &c)| if i < d { c + p * ((s + i as u64) % p) } else { c })
                            .collect()
                    };
                    let gl = bump(&g, salt);
                    let hl = bump(&h, salt + 1);
                    let mut gh = vec![0u64; g.degree() + h.degree() + 1];
                    for (i, &a) in gl.iter().enumerate() {
                        for (j, &b) in hl.iter().enumerate() {
                            gh[i + j] += a * b;
                        }
                    }
                    assert_eq!(
                        is_maximal_with_prep(&f, &g, &h, &gh),
                        baseline,
                        "lift choice changed the verdict for {f:?}"
                    );
                }
            }
        }
    }
}
