//! The general density formulas evaluated over an admissible triple.
//!
//! An admissible triple packages a finite abelian group G, a monoid
//! homomorphism ψ from monic polynomials over F_p into G, and the Fourier
//! transform ŵ of the weight that encodes how the subset Σ distributes over
//! residues mod p. The three densities are then coefficient extractions:
//!
//! * valuation 0:  Σ_χ ŵ(χ) [L_{χ∘ψ}(T) / L_{χ²∘ψ}(T²)]_n
//! * valuation 1:  (1 − 1/p) Σ_χ ŵ(χ) [Σ_c χ(ψ(x+c))²/(1 + χ(ψ(x+c))T) · …]_{n−2}
//! * maximality:   Σ_χ ŵ(χ) [L_{χ∘ψ}(T) / L_{χ²∘ψ}(T²/p)]_n
//!
//! Per-character bracket values depend only on (p, G, ψ, n), so they are
//! cached and shared across the parameter sweep; ŵ alone carries the
//! parameters.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::characters::{hom_eval, CharError, GroupElem, GroupSpec, HomTag};
use crate::closed_forms::SigmaFamily;
use crate::cyclotomic::{cyclo_mul, CycloError, CycloNum};
use crate::fp_poly::PolyMod;
use crate::series::{l_series_closed, linear_factor_series, LSeriesTag, SeriesError, TruncSeries};
use crate::{rat_int, Int, Rat};

/// Which route produced a density result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Closed,
    Engine,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Engine => "engine",
            Method::Oracle => "oracle",
        }
    }
}

/// The four exact densities of a family at one (p, n), with provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityResult {
    pub p0_sqf: Rat,
    pub p1_sqf: Rat,
    pub p_sqf: Rat,
    pub p_max: Rat,
    pub method: Method,
}

impl DensityResult {
    /// Assembles a result and enforces the structural invariants:
    /// nonnegativity, p_sqf = p0 + p1 ≤ p_max ≤ 1, and p1 = 0 at p = 2.
    pub fn new(p: u64, p0_sqf: Rat, p1_sqf: Rat, p_max: Rat, method: Method) -> Self {
        let p_sqf = &p0_sqf + &p1_sqf;
        assert!(!p0_sqf.is_negative() && !p1_sqf.is_negative(), "negative density");
        assert!(p_sqf <= p_max, "squarefree density exceeds maximality density");
        assert!(p_max <= rat_int(1), "density exceeds 1");
        assert!(p != 2 || p1_sqf.is_zero(), "valuation-1 density must vanish at p = 2");
        DensityResult { p0_sqf, p1_sqf, p_sqf, p_max, method }
    }
}

/// The homomorphism slot of a triple: a tagged map or the trivial map on
/// either domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineHom {
    Trivial,
    TrivialUnitDomain,
    Tag(HomTag),
}

impl EngineHom {
    fn series_tag(&self) -> LSeriesTag {
        match self {
            EngineHom::Trivial => LSeriesTag::AllOne,
            EngineHom::TrivialUnitDomain => LSeriesTag::AllOneUnitDomain,
            EngineHom::Tag(t) => LSeriesTag::Hom(*t),
        }
    }

    pub fn unit_domain(&self) -> bool {
        match self {
            EngineHom::Trivial => false,
            EngineHom::TrivialUnitDomain => true,
            EngineHom::Tag(t) => t.unit_domain(),
        }
    }
}

/// Group, homomorphism tag, and Fourier-transformed weight table for one
/// family at one (p, n).
#[derive(Clone, Debug)]
pub struct AdmissibleTriple {
    pub group: GroupSpec,
    pub hom: EngineHom,
    /// ŵ(χ) aligned with `group.characters()`.
    pub w_hat: Vec<CycloNum>,
    pub unit_domain: bool,
    pub p: u64,
    pub n: usize,
}

/// Errors raised by the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    InvalidParams(String),
    /// An engine output had a nonzero irrational part; this is an internal
    /// invariant violation, never a user error.
    NotRational,
    Series(SeriesError),
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            EngineError::NotRational => write!(f, "engine output is not rational"),
            EngineError::Series(e) => write!(f, "series error: {e}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<SeriesError> for EngineError {
    fn from(e: SeriesError) -> Self {
        EngineError::Series(e)
    }
}

impl From<CycloError> for EngineError {
    fn from(e: CycloError) -> Self {
        match e {
            CycloError::NotRational => EngineError::NotRational,
            CycloError::ConductorMismatch { .. } => {
                EngineError::InvalidParams("conductor mismatch".into())
            }
        }
    }
}

impl From<CharError> for EngineError {
    fn from(e: CharError) -> Self {
        EngineError::InvalidParams(e.to_string())
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn validate(family: &SigmaFamily, p: u64, n: usize) -> Result<(), EngineError> {
    if !is_prime(p) {
        return Err(EngineError::InvalidParams(format!("{p} is not prime")));
    }
    if n < 2 {
        return Err(EngineError::InvalidParams(format!("degree {n} < 2")));
    }
    match family {
        SigmaFamily::A1A2Fixed { .. } if n < 3 => Err(EngineError::InvalidParams(
            "the fixed-a1-a2 family needs degree >= 3".into(),
        )),
        SigmaFamily::AnFixedUnit { bn } if bn.rem_euclid(p as i64) == 0 => Err(
            EngineError::InvalidParams(format!("constant coefficient {bn} is not a unit mod {p}")),
        ),
        _ => Ok(()),
    }
}

/// Builds the admissible triple of a family: the group, the homomorphism,
/// and the closed-form Fourier transform ŵ.
pub fn triple_for(family: &SigmaFamily, p: u64, n: usize) -> Result<AdmissibleTriple, EngineError> {
    validate(family, p, n)?;
    let inv_pn = Rat::new(Int::one(), Int::from(p).pow(n as u32));
    let inv_unit = Rat::new(Int::one(), Int::from(p - 1) * Int::from(p).pow(n as u32 - 1));
    let triple = match family {
        SigmaFamily::All => AdmissibleTriple {
            group: GroupSpec::Trivial,
            hom: EngineHom::Trivial,
            w_hat: vec![CycloNum::from_rational(1, inv_pn)],
            unit_domain: false,
            p,
            n,
        },
        SigmaFamily::AnUnit => AdmissibleTriple {
            group: GroupSpec::Trivial,
            hom: EngineHom::TrivialUnitDomain,
            w_hat: vec![CycloNum::from_rational(1, inv_unit)],
            unit_domain: true,
            p,
            n,
        },
        SigmaFamily::A1Fixed { b1 } => {
            let group = GroupSpec::AdditiveFp(p);
            let gamma = GroupElem::additive(p, b1.rem_euclid(p as i64) as u64);
            AdmissibleTriple {
                group,
                hom: EngineHom::Tag(HomTag::Phi1),
                w_hat: twisted_weights(group, &gamma, &inv_pn)?,
                unit_domain: false,
                p,
                n,
            }
        }
        SigmaFamily::A1A2Fixed { b1, b2 } => {
            let group = GroupSpec::OnePlusY(p);
            let gamma = GroupElem::one_plus_y(
                p,
                b1.rem_euclid(p as i64) as u64,
                b2.rem_euclid(p as i64) as u64,
            );
            AdmissibleTriple {
                group,
                hom: EngineHom::Tag(HomTag::Phi2),
                w_hat: twisted_weights(group, &gamma, &inv_pn)?,
                unit_domain: false,
                p,
                n,
            }
        }
        SigmaFamily::AnFixedUnit { bn } => {
            let group = GroupSpec::MultiplicativeFp(p);
            let gamma = GroupElem::multiplicative(p, bn.rem_euclid(p as i64) as u64);
            AdmissibleTriple {
                group,
                hom: EngineHom::Tag(HomTag::Ev0),
                w_hat: twisted_weights(group, &gamma, &inv_unit)?,
                unit_domain: true,
                p,
                n,
            }
        }
        SigmaFamily::A1FixedAnUnit { b1 } => {
            let group = GroupSpec::AdditiveFp(p);
            let gamma = GroupElem::additive(p, b1.rem_euclid(p as i64) as u64);
            AdmissibleTriple {
                group,
                hom: EngineHom::Tag(HomTag::Phi1UnitDomain),
                w_hat: twisted_weights(group, &gamma, &inv_unit)?,
                unit_domain: true,
                p,
                n,
            }
        }
        SigmaFamily::A1UnitAnUnit | SigmaFamily::An1UnitAnUnit => {
            return triple_for(&SigmaFamily::A1FixedAnUnit { b1: 1 }, p, n)
        }
    };
    Ok(triple)
}

/// ŵ(χ) = scale · χ(γ₀)⁻¹ for every character, aligned with the character
/// enumeration.
fn twisted_weights(
    group: GroupSpec,
    gamma: &GroupElem,
    scale: &Rat,
) -> Result<Vec<CycloNum>, EngineError> {
    group
        .characters()
        .iter()
        .map(|chi| Ok(chi.eval_inv(gamma)?.scale(scale)))
        .collect()
}

/// How many monic degree-n polynomials in the domain map to each group
/// element (the fibers all have the same size).
pub fn fiber_size(hom: EngineHom, p: u64, n: usize) -> Rat {
    let pw = |e: u32| Rat::from_integer(Int::from(p).pow(e));
    match hom {
        EngineHom::Trivial => pw(n as u32),
        EngineHom::TrivialUnitDomain => pw(n as u32 - 1) * rat_int(p as i64 - 1),
        EngineHom::Tag(HomTag::Phi1) => pw(n as u32 - 1),
        EngineHom::Tag(HomTag::Phi2) => pw(n as u32 - 2),
        EngineHom::Tag(HomTag::Ev0) => pw(n as u32 - 1),
        EngineHom::Tag(HomTag::Phi1UnitDomain) => pw(n as u32 - 2) * rat_int(p as i64 - 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum BracketKind {
    Sqf0,
    Sqf1,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct BracketKey {
    p: u64,
    group: GroupSpec,
    hom: EngineHom,
    n: usize,
    kind: BracketKind,
}

/// ψ(x + c) as an element of the target group.
fn psi_linear(hom: EngineHom, p: u64, c: u64) -> GroupElem {
    match hom {
        EngineHom::Trivial | EngineHom::TrivialUnitDomain => GroupSpec::Trivial.identity(),
        EngineHom::Tag(t) => {
            hom_eval(t, &PolyMod::x_plus(p, 1, c)).expect("x + c lies in the domain")
        }
    }
}

/// Per-character bracket values for one (p, group, hom, n, kind), cached.
fn brackets(key: BracketKey) -> Result<Arc<Vec<CycloNum>>, EngineError> {
    static CACHE: OnceLock<Mutex<HashMap<BracketKey, Arc<Vec<CycloNum>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(compute_brackets(key)?);
    cache.lock().unwrap().insert(key, computed.clone());
    Ok(computed)
}

fn compute_brackets(key: BracketKey) -> Result<Vec<CycloNum>, EngineError> {
    let BracketKey { p, group, hom, n, kind } = key;
    let tag = hom.series_tag();
    let trunc = match kind {
        BracketKind::Sqf1 => n - 2,
        _ => n,
    };
    let m = group.exponent();
    let c_range: Vec<u64> = if hom.unit_domain() { (1..p).collect() } else { (0..p).collect() };
    let mut out = Vec::with_capacity(group.characters().len());
    for chi in group.characters() {
        let numer = l_series_closed(tag, &chi, p, trunc)?;
        let chi_sq = chi.square();
        let denom_raw = l_series_closed(tag, &chi_sq, p, trunc)?;
        let z = match kind {
            BracketKind::Max => Rat::new(Int::one(), Int::from(p)),
            _ => Rat::one(),
        };
        let denom = denom_raw.subst_zt2(&z).recip()?;
        let base = numer.mul(&denom)?;
        let bracket = match kind {
            BracketKind::Sqf0 | BracketKind::Max => base.coeff(n).clone(),
            BracketKind::Sqf1 => {
                let mut csum = TruncSeries::zero(m, trunc);
                for &c in &c_range {
                    let gamma = psi_linear(hom, p, c);
                    let e = chi.eval_exponent(&gamma)?;
                    csum = csum.add(&linear_factor_series(m, e, trunc))?;
                }
                csum.mul(&base)?.coeff(n - 2).clone()
            }
        };
        out.push(bracket);
    }
    Ok(out)
}

fn weighted_sum(t: &AdmissibleTriple, kind: BracketKind) -> Result<Rat, EngineError> {
    let key = BracketKey { p: t.p, group: t.group, hom: t.hom, n: t.n, kind };
    let table = brackets(key)?;
    let m = t.group.exponent();
    let mut acc = CycloNum::zero(m);
    for (w, b) in t.w_hat.iter().zip(table.iter()) {
        if w.is_zero() || b.is_zero() {
            continue;
        }
        acc = acc.add(&cyclo_mul(w, b)?)?;
    }
    Ok(acc.to_rational()?)
}

/// Density of valuation-0 (unit) discriminant over the triple's family.
pub fn density_sqf0(t: &AdmissibleTriple) -> Result<Rat, EngineError> {
    weighted_sum(t, BracketKind::Sqf0)
}

/// Density of valuation-1 discriminant; identically zero at p = 2.
pub fn density_sqf1(t: &AdmissibleTriple) -> Result<Rat, EngineError> {
    if t.p == 2 {
        return Ok(Rat::zero());
    }
    let sum = weighted_sum(t, BracketKind::Sqf1)?;
    let factor = rat_int(1) - Rat::new(Int::one(), Int::from(t.p));
    Ok(factor * sum)
}

/// Density of maximality of `Z_p[x]/(f)` over the triple's family.
pub fn density_max(t: &AdmissibleTriple) -> Result<Rat, EngineError> {
    weighted_sum(t, BracketKind::Max)
}

/// All four densities of the triple, with the invariants checked.
pub fn densities(t: &AdmissibleTriple) -> Result<DensityResult, EngineError> {
    let p0 = density_sqf0(t)?;
    let p1 = density_sqf1(t)?;
    let pm = density_max(t)?;
    Ok(DensityResult::new(t.p, p0, p1, pm, Method::Engine))
}

/// Convenience: build the triple for a family and evaluate it.
pub fn engine_density(family: &SigmaFamily, p: u64, n: usize) -> Result<DensityResult, EngineError> {
    densities(&triple_for(family, p, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::fourier_inverse;
    use crate::{rat, rat_int};

    #[test]
    fn trivial_family_examples() {
        // Valuation-0 density of the full family at p = 3, n = 4 is 2/3,
        // from the trivial triple with constant transform 1/81.
        let t = triple_for(&SigmaFamily::All, 3, 4).unwrap();
        assert_eq!(t.w_hat[0].to_rational().unwrap(), rat(1, 81));
        assert_eq!(density_sqf0(&t).unwrap(), rat(2, 3));
        // Maximality density of the full family at p = 2, n = 2 is 3/4.
        let t = triple_for(&SigmaFamily::All, 2, 2).unwrap();
        assert_eq!(density_max(&t).unwrap(), rat(3, 4));
        // Valuation-1 density at p = 3, n = 2 is 2/9.
        let t = triple_for(&SigmaFamily::All, 3, 2).unwrap();
        assert_eq!(density_sqf1(&t).unwrap(), rat(2, 9));
    }

    #[test]
    fn fixed_a1_examples() {
        let t = triple_for(&SigmaFamily::A1Fixed { b1: 0 }, 3, 3).unwrap();
        assert_eq!(density_sqf0(&t).unwrap(), rat(2, 3));
        for b1 in 0..3 {
            let t = triple_for(&SigmaFamily::A1Fixed { b1 }, 3, 4).unwrap();
            assert_eq!(density_max(&t).unwrap(), rat(8, 9));
        }
        // ŵ for the zero-residue parameter is constant 1/p^n.
        let t = triple_for(&SigmaFamily::A1Fixed { b1: 0 }, 3, 3).unwrap();
        for w in &t.w_hat {
            assert_eq!(w.to_rational().unwrap(), rat(1, 27));
        }
    }

    #[test]
    fn unit_constant_examples() {
        let t = triple_for(&SigmaFamily::AnUnit, 2, 3).unwrap();
        assert_eq!(density_sqf0(&t).unwrap(), rat(3, 4));
        assert_eq!(density_sqf1(&t).unwrap(), rat_int(0));
        let t = triple_for(&SigmaFamily::AnUnit, 3, 2).unwrap();
        assert_eq!(density_sqf1(&t).unwrap(), rat(2, 9));
        assert_eq!(t.w_hat[0].to_rational().unwrap(), rat(1, 6));
        let t = triple_for(&SigmaFamily::AnUnit, 2, 2).unwrap();
        assert_eq!(density_max(&t).unwrap(), rat(3, 4));
    }

    #[test]
    fn special_case_degree_two_at_two() {
        // (n, p) = (2, 2): everything hinges on the parity of b1.
        let odd = engine_density(&SigmaFamily::A1Fixed { b1: 1 }, 2, 2).unwrap();
        assert_eq!(odd.p0_sqf, rat_int(1));
        assert_eq!(odd.p_max, rat_int(1));
        let even = engine_density(&SigmaFamily::A1Fixed { b1: 0 }, 2, 2).unwrap();
        assert_eq!(even.p0_sqf, rat_int(0));
        assert_eq!(even.p_max, rat(1, 2));
    }

    #[test]
    fn parameter_validation() {
        assert!(triple_for(&SigmaFamily::All, 4, 3).is_err());
        assert!(triple_for(&SigmaFamily::All, 3, 1).is_err());
        assert!(triple_for(&SigmaFamily::A1A2Fixed { b1: 0, b2: 0 }, 3, 2).is_err());
        assert!(triple_for(&SigmaFamily::AnFixedUnit { bn: 6 }, 3, 2).is_err());
        // Negative parameters reduce mod p.
        let t = triple_for(&SigmaFamily::AnFixedUnit { bn: -1 }, 3, 2).unwrap();
        let s = triple_for(&SigmaFamily::AnFixedUnit { bn: 2 }, 3, 2).unwrap();
        assert_eq!(t.w_hat, s.w_hat);
    }

    #[test]
    fn weights_invert_to_a_probability_distribution() {
        // Fourier inversion of ŵ recovers a nonnegative rational weight whose
        // fiber-weighted total is 1.
        let cases: Vec<(SigmaFamily, u64, usize)> = vec![
            (SigmaFamily::All, 3, 4),
            (SigmaFamily::A1Fixed { b1: 2 }, 5, 3),
            (SigmaFamily::A1A2Fixed { b1: 1, b2: 4 }, 5, 4),
            (SigmaFamily::AnUnit, 3, 3),
            (SigmaFamily::AnFixedUnit { bn: 3 }, 7, 2),
            (SigmaFamily::A1FixedAnUnit { b1: 0 }, 3, 4),
            (SigmaFamily::A1UnitAnUnit, 5, 2),
            (SigmaFamily::A1A2Fixed { b1: 1, b2: 0 }, 2, 3),
        ];
        for (family, p, n) in cases {
            let t = triple_for(&family, p, n).unwrap();
            let fiber = fiber_size(t.hom, p, n);
            let mut total = Rat::zero();
            for gamma in t.group.elements() {
                let w = fourier_inverse(t.group, &t.w_hat, &gamma)
                    .to_rational()
                    .expect("weights must be rational");
                assert!(!w.is_negative(), "negative weight for {family:?}");
                total += &fiber * w;
            }
            assert_eq!(total, rat_int(1), "weights of {family:?} do not sum to 1");
        }
    }

    #[test]
    fn density_result_invariants_enforced() {
        let grid: Vec<(SigmaFamily, u64, usize)> = vec![
            (SigmaFamily::A1A2Fixed { b1: 0, b2: 1 }, 3, 4),
            (SigmaFamily::A1FixedAnUnit { b1: 1 }, 2, 2),
            (SigmaFamily::An1UnitAnUnit, 3, 3),
        ];
        for (family, p, n) in grid {
            let r = engine_density(&family, p, n).unwrap();
            assert_eq!(r.p_sqf, &r.p0_sqf + &r.p1_sqf);
            assert!(r.p_sqf <= r.p_max);
        }
    }
}
