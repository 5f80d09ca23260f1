//! The finite abelian groups receiving the monoid homomorphisms, their
//! character groups, Legendre symbols, and quadratic Gauss sums.
//!
//! Four group shapes occur: the trivial group, the additive group F_p, the
//! multiplicative group F_p^×, and G_p = `1 + yF_p[y]/(y³)`. Character values
//! live in Q(ζ_m) where m is the exponent of the group, so every sum below
//! is exact.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use crate::cyclotomic::{root_of_unity, CycloNum};
use crate::fp_poly::PolyMod;
use crate::Rat;

/// Errors raised by group and character operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharError {
    GroupMismatch,
    /// A unit-domain homomorphism was applied to a polynomial divisible by x.
    DomainViolation,
}

impl std::fmt::Display for CharError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CharError::GroupMismatch => write!(f, "group mismatch"),
            CharError::DomainViolation => {
                write!(f, "unit-domain homomorphism applied to a multiple of x")
            }
        }
    }
}

impl std::error::Error for CharError {}

/// The four group shapes used by the density formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Trivial,
    AdditiveFp(u64),
    MultiplicativeFp(u64),
    /// G_p = `1 + yF_p[y]/(y³)`, elements a₂y² + a₁y + 1.
    OnePlusY(u64),
}

impl GroupSpec {
    pub fn order(&self) -> u64 {
        match *self {
            GroupSpec::Trivial => 1,
            GroupSpec::AdditiveFp(p) => p,
            GroupSpec::MultiplicativeFp(p) => p - 1,
            GroupSpec::OnePlusY(p) => p * p,
        }
    }

    /// Exponent of the group; character values are m-th roots of unity.
    pub fn exponent(&self) -> u64 {
        match *self {
            GroupSpec::Trivial => 1,
            GroupSpec::AdditiveFp(p) => p,
            GroupSpec::MultiplicativeFp(p) => p - 1,
            GroupSpec::OnePlusY(2) => 4,
            GroupSpec::OnePlusY(p) => p,
        }
    }

    pub fn identity(&self) -> GroupElem {
        let data = match *self {
            GroupSpec::Trivial => ElemData::Unit,
            GroupSpec::AdditiveFp(_) => ElemData::Res(0),
            GroupSpec::MultiplicativeFp(_) => ElemData::Res(1),
            GroupSpec::OnePlusY(_) => ElemData::Pair(0, 0),
        };
        GroupElem { group: *self, data }
    }

    /// All elements, in a fixed deterministic order.
    pub fn elements(&self) -> Vec<GroupElem> {
        match *self {
            GroupSpec::Trivial => vec![self.identity()],
            GroupSpec::AdditiveFp(p) => (0..p)
                .map(|c| GroupElem { group: *self, data: ElemData::Res(c) })
                .collect(),
            GroupSpec::MultiplicativeFp(p) => (1..p)
                .map(|c| GroupElem { group: *self, data: ElemData::Res(c) })
                .collect(),
            GroupSpec::OnePlusY(p) => {
                let mut out = Vec::with_capacity((p * p) as usize);
                for a1 in 0..p {
                    for a2 in 0..p {
                        out.push(GroupElem { group: *self, data: ElemData::Pair(a1, a2) });
                    }
                }
                out
            }
        }
    }

    /// All characters in lexicographic index order; the trivial character
    /// comes first.
    pub fn characters(&self) -> Vec<Character> {
        match *self {
            GroupSpec::Trivial => vec![Character { group: *self, index: (0, 0) }],
            GroupSpec::AdditiveFp(p) => (0..p)
                .map(|t| Character { group: *self, index: (t, 0) })
                .collect(),
            GroupSpec::MultiplicativeFp(p) => (0..p - 1)
                .map(|t| Character { group: *self, index: (t, 0) })
                .collect(),
            GroupSpec::OnePlusY(2) => (0..4)
                .map(|t| Character { group: *self, index: (t, 0) })
                .collect(),
            GroupSpec::OnePlusY(p) => {
                let mut out = Vec::with_capacity((p * p) as usize);
                for t1 in 0..p {
                    for t2 in 0..p {
                        out.push(Character { group: *self, index: (t1, t2) });
                    }
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum ElemData {
    Unit,
    Res(u64),
    Pair(u64, u64),
}

/// An element of one of the four groups, in canonical reduced form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupElem {
    group: GroupSpec,
    data: ElemData,
}

impl GroupElem {
    pub fn group(&self) -> GroupSpec {
        self.group
    }

    /// Residue payload; for G_p this is the pair (a₁, a₂).
    pub fn payload(&self) -> (u64, u64) {
        match self.data {
            ElemData::Unit => (0, 0),
            ElemData::Res(c) => (c, 0),
            ElemData::Pair(a1, a2) => (a1, a2),
        }
    }

    pub fn additive(p: u64, c: u64) -> GroupElem {
        GroupElem { group: GroupSpec::AdditiveFp(p), data: ElemData::Res(c % p) }
    }

    pub fn multiplicative(p: u64, c: u64) -> GroupElem {
        let c = c % p;
        assert!(c != 0, "multiplicative payload must be a unit");
        GroupElem { group: GroupSpec::MultiplicativeFp(p), data: ElemData::Res(c) }
    }

    pub fn one_plus_y(p: u64, a1: u64, a2: u64) -> GroupElem {
        GroupElem { group: GroupSpec::OnePlusY(p), data: ElemData::Pair(a1 % p, a2 % p) }
    }

    pub fn is_identity(&self) -> bool {
        *self == self.group.identity()
    }

    pub fn mul(&self, other: &GroupElem) -> Result<GroupElem, CharError> {
        if self.group != other.group {
            return Err(CharError::GroupMismatch);
        }
        let data = match (self.group, self.data, other.data) {
            (GroupSpec::Trivial, _, _) => ElemData::Unit,
            (GroupSpec::AdditiveFp(p), ElemData::Res(a), ElemData::Res(b)) => {
                ElemData::Res((a + b) % p)
            }
            (GroupSpec::MultiplicativeFp(p), ElemData::Res(a), ElemData::Res(b)) => {
                ElemData::Res(a * b % p)
            }
            (GroupSpec::OnePlusY(p), ElemData::Pair(a1, a2), ElemData::Pair(b1, b2)) => {
                // (1 + a₁y + a₂y²)(1 + b₁y + b₂y²) mod y³
                ElemData::Pair((a1 + b1) % p, (a2 + b2 + a1 * b1) % p)
            }
            _ => unreachable!("payload shape matches the group"),
        };
        Ok(GroupElem { group: self.group, data })
    }

    pub fn inverse(&self) -> GroupElem {
        let data = match (self.group, self.data) {
            (GroupSpec::Trivial, _) => ElemData::Unit,
            (GroupSpec::AdditiveFp(p), ElemData::Res(a)) => ElemData::Res((p - a) % p),
            (GroupSpec::MultiplicativeFp(p), ElemData::Res(a)) => ElemData::Res(inv_mod(a, p)),
            (GroupSpec::OnePlusY(p), ElemData::Pair(a1, a2)) => {
                ElemData::Pair((p - a1) % p, (a1 * a1 % p + p - a2) % p)
            }
            _ => unreachable!("payload shape matches the group"),
        };
        GroupElem { group: self.group, data }
    }

    pub fn pow(&self, e: u64) -> GroupElem {
        let mut acc = self.group.identity();
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }
}

/// A character of one of the four groups, identified by its index tuple.
///
/// For G_p with p odd the index is (t₁, t₂) with χ(y²/2 + y + 1) = ζ_p^{t₁}
/// and χ(y² + 1) = ζ_p^{t₂}; for p = 2 the single index t gives
/// χ(y + 1) = ζ₄^t. F_p is indexed by χ(c) = ζ_p^{tc} and F_p^× by
/// χ(g^k) = ζ_{p−1}^{tk} for the smallest primitive root g.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    group: GroupSpec,
    index: (u64, u64),
}

impl Character {
    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn index(&self) -> (u64, u64) {
        self.index
    }

    pub fn trivial(group: GroupSpec) -> Character {
        Character { group, index: (0, 0) }
    }

    pub fn is_trivial(&self) -> bool {
        self.index == (0, 0)
    }

    /// χ^e, reducing the index modulo the relevant orders.
    pub fn pow(&self, e: u64) -> Character {
        let index = match self.group {
            GroupSpec::Trivial => (0, 0),
            GroupSpec::AdditiveFp(p) => (mul_mod(self.index.0, e, p), 0),
            GroupSpec::MultiplicativeFp(2) => (0, 0),
            GroupSpec::MultiplicativeFp(p) => (mul_mod(self.index.0, e, p - 1), 0),
            GroupSpec::OnePlusY(2) => (mul_mod(self.index.0, e, 4), 0),
            GroupSpec::OnePlusY(p) => {
                (mul_mod(self.index.0, e, p), mul_mod(self.index.1, e, p))
            }
        };
        Character { group: self.group, index }
    }

    pub fn square(&self) -> Character {
        self.pow(2)
    }

    /// True iff χ(y² + 1) ≠ 1 on G_p; such characters carry the corrections
    /// beyond the fixed-a₁ family.
    pub fn nontrivial_on_y2(&self) -> bool {
        match self.group {
            GroupSpec::OnePlusY(2) => self.index.0 % 2 == 1,
            GroupSpec::OnePlusY(_) => self.index.1 != 0,
            _ => false,
        }
    }

    /// The exponent e with χ(γ) = ζ_m^e, m the group exponent.
    pub fn eval_exponent(&self, gamma: &GroupElem) -> Result<u64, CharError> {
        if self.group != gamma.group {
            return Err(CharError::GroupMismatch);
        }
        let e = match (self.group, gamma.data) {
            (GroupSpec::Trivial, _) => 0,
            (GroupSpec::AdditiveFp(p), ElemData::Res(c)) => mul_mod(self.index.0, c, p),
            (GroupSpec::MultiplicativeFp(2), _) => 0,
            (GroupSpec::MultiplicativeFp(p), ElemData::Res(c)) => {
                mul_mod(self.index.0, discrete_log(p, c), p - 1)
            }
            (GroupSpec::OnePlusY(2), ElemData::Pair(a1, a2)) => {
                mul_mod(self.index.0, a1 + 2 * a2, 4)
            }
            (GroupSpec::OnePlusY(p), ElemData::Pair(a1, a2)) => {
                // γ = (y²/2 + y + 1)^{a₁} (y² + 1)^{a₂ − a₁²/2}
                let inv2 = inv_mod(2, p);
                let d = (a2 + p - mul_mod(mul_mod(a1, a1, p), inv2, p)) % p;
                (mul_mod(self.index.0, a1, p) + mul_mod(self.index.1, d, p)) % p
            }
            _ => unreachable!("payload shape matches the group"),
        };
        Ok(e)
    }

    /// χ(γ) as an exact root of unity in Q(ζ_m).
    pub fn eval(&self, gamma: &GroupElem) -> Result<CycloNum, CharError> {
        let e = self.eval_exponent(gamma)?;
        Ok(root_of_unity(self.group.exponent(), e as i64))
    }

    /// χ(γ)⁻¹ = χ(γ⁻¹).
    pub fn eval_inv(&self, gamma: &GroupElem) -> Result<CycloNum, CharError> {
        self.eval(&gamma.inverse())
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn discrete_log(p: u64, c: u64) -> u64 {
    static TABLES: OnceLock<Mutex<HashMap<u64, Arc<Vec<u64>>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let table = {
        let mut guard = tables.lock().unwrap();
        guard
            .entry(p)
            .or_insert_with(|| {
                let g = primitive_root(p);
                let mut dlog = vec![0u64; p as usize];
                let mut acc = 1u64;
                for k in 0..p - 1 {
                    dlog[acc as usize] = k;
                    acc = mul_mod(acc, g, p);
                }
                Arc::new(dlog)
            })
            .clone()
    };
    table[(c % p) as usize]
}

/// Smallest positive primitive root mod p.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut prime_factors = Vec::new();
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            prime_factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        prime_factors.push(n);
    }
    (2..p)
        .find(|&g| prime_factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// The monoid homomorphisms from monic polynomials over F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HomTag {
    /// u ↦ its x^{deg−1} coefficient, into additive F_p.
    Phi1,
    /// u ↦ 1 + a₁y + a₂y² from the two top non-leading coefficients, into G_p.
    Phi2,
    /// u ↦ u(0), into F_p^×; defined on polynomials prime to x.
    Ev0,
    /// Phi1 restricted to polynomials prime to x.
    Phi1UnitDomain,
}

impl HomTag {
    pub fn unit_domain(&self) -> bool {
        matches!(self, HomTag::Ev0 | HomTag::Phi1UnitDomain)
    }

    pub fn target(&self, p: u64) -> GroupSpec {
        match self {
            HomTag::Phi1 | HomTag::Phi1UnitDomain => GroupSpec::AdditiveFp(p),
            HomTag::Phi2 => GroupSpec::OnePlusY(p),
            HomTag::Ev0 => GroupSpec::MultiplicativeFp(p),
        }
    }
}

/// Applies the tagged homomorphism to a monic polynomial over F_p.
pub fn hom_eval(tag: HomTag, u: &PolyMod) -> Result<GroupElem, CharError> {
    assert_eq!(u.power(), 1, "homomorphisms act on polynomials over F_p");
    assert!(u.is_monic(), "homomorphisms act on monic polynomials");
    let p = u.prime();
    if tag.unit_domain() && u.eval(0) == 0 {
        return Err(CharError::DomainViolation);
    }
    let d = u.degree();
    let elem = match tag {
        HomTag::Phi1 | HomTag::Phi1UnitDomain => {
            let a1 = if d >= 1 { u.coeff(d - 1).value } else { 0 };
            GroupElem::additive(p, a1)
        }
        HomTag::Phi2 => {
            let a1 = if d >= 1 { u.coeff(d - 1).value } else { 0 };
            let a2 = if d >= 2 { u.coeff(d - 2).value } else { 0 };
            GroupElem::one_plus_y(p, a1, a2)
        }
        HomTag::Ev0 => GroupElem::multiplicative(p, u.eval(0)),
    };
    Ok(elem)
}

/// Legendre symbol (b/p) by Euler's criterion; p must be an odd prime.
pub fn legendre(b: u64, p: u64) -> i64 {
    assert!(p > 2, "Legendre symbol needs an odd prime");
    let b = b % p;
    if b == 0 {
        return 0;
    }
    if pow_mod(b, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Legendre symbol of a signed integer argument.
pub fn legendre_i64(b: i64, p: u64) -> i64 {
    legendre(b.rem_euclid(p as i64) as u64, p)
}

/// Quadratic Gauss sum 𝒢(p; b) = Σ_{c ∈ F_p} e_p(bc²), exactly in Q(ζ_p).
pub fn gauss_sum(p: u64, b: u64) -> CycloNum {
    assert!(p > 2, "Gauss sums are taken at odd primes");
    let mut acc = CycloNum::zero(p);
    for c in 0..p {
        let e = mul_mod(b % p, mul_mod(c, c, p), p);
        acc = acc.add(&root_of_unity(p, e as i64)).unwrap();
    }
    acc
}

/// C_χ = Σ_{c ∈ F_p} χ(cy + 1) for a character of G_p.
pub fn c_chi(chi: &Character) -> CycloNum {
    let p = match chi.group() {
        GroupSpec::OnePlusY(p) => p,
        g => panic!("c_chi is defined on characters of G_p, got {g:?}"),
    };
    let m = chi.group().exponent();
    let mut acc = CycloNum::zero(m);
    for c in 0..p {
        let v = chi.eval(&GroupElem::one_plus_y(p, c, 0)).unwrap();
        acc = acc.add(&v).unwrap();
    }
    acc
}

/// Fourier transform ŵ(χ) = (1/#G) Σ_γ w(γ) χ(γ)⁻¹, with w aligned to
/// `group.elements()` and the result aligned to `group.characters()`.
pub fn fourier_transform(group: GroupSpec, w: &[Rat]) -> Vec<CycloNum> {
    let elems = group.elements();
    assert_eq!(elems.len(), w.len(), "weight table must cover the group");
    let m = group.exponent();
    let inv_order = Rat::new(1.into(), group.order().into());
    group
        .characters()
        .iter()
        .map(|chi| {
            let mut acc = CycloNum::zero(m);
            for (gamma, wg) in elems.iter().zip(w) {
                if wg.is_zero() {
                    continue;
                }
                acc = acc.add(&chi.eval_inv(gamma).unwrap().scale(wg)).unwrap();
            }
            acc.scale(&inv_order)
        })
        .collect()
}

/// Inverse transform w(γ) = Σ_χ ŵ(χ) χ(γ), with ŵ aligned to
/// `group.characters()`.
pub fn fourier_inverse(group: GroupSpec, w_hat: &[CycloNum], gamma: &GroupElem) -> CycloNum {
    let chars = group.characters();
    assert_eq!(chars.len(), w_hat.len(), "transform table must cover the dual group");
    let m = group.exponent();
    let mut acc = CycloNum::zero(m);
    for (chi, wh) in chars.iter().zip(w_hat) {
        if wh.is_zero() {
            continue;
        }
        acc = acc.add(&crate::cyclotomic::cyclo_mul(wh, &chi.eval(gamma).unwrap()).unwrap()).unwrap();
    }
    acc
}
