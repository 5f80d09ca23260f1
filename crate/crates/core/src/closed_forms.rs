//! Closed-form density formulas for the eight coefficient-restricted
//! families, plus the special correction functions they are built from.
//!
//! Every branch here transcribes a finished formula; nothing is re-derived.
//! The [`crate::engine`] evaluates the same densities from the general
//! character-sum formula and the [`crate::oracle`] counts them outright, so
//! any transcription slip shows up as an exact rational mismatch.

use num_traits::{One, Zero};

use crate::characters::{inv_mod, legendre, mul_mod, Character, GroupElem, GroupSpec};

use crate::cyclotomic::{cyclo_mul, CycloNum};
use crate::engine::{DensityResult, EngineError, Method};
use crate::{Int, Rat};

/// The eight coefficient-restricted families of monic degree-n polynomials
/// over Z_p. Integer parameters are reduced mod p at use time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SigmaFamily {
    /// No restriction.
    All,
    /// x^{n−1}-coefficient fixed to b1.
    A1Fixed { b1: i64 },
    /// x^{n−1}- and x^{n−2}-coefficients fixed (needs n ≥ 3).
    A1A2Fixed { b1: i64, b2: i64 },
    /// Constant coefficient a unit.
    AnUnit,
    /// Constant coefficient fixed to a unit bn.
    AnFixedUnit { bn: i64 },
    /// x^{n−1}-coefficient fixed and constant coefficient a unit.
    A1FixedAnUnit { b1: i64 },
    /// x^{n−1}- and constant coefficients both units.
    A1UnitAnUnit,
    /// x- and constant coefficients both units.
    An1UnitAnUnit,
}

impl SigmaFamily {
    pub fn cli_name(&self) -> &'static str {
        match self {
            SigmaFamily::All => "all",
            SigmaFamily::A1Fixed { .. } => "a1",
            SigmaFamily::A1A2Fixed { .. } => "a1a2",
            SigmaFamily::AnUnit => "an-unit",
            SigmaFamily::AnFixedUnit { .. } => "an-fixed",
            SigmaFamily::A1FixedAnUnit { .. } => "a1-an-unit",
            SigmaFamily::A1UnitAnUnit => "unit-unit-1n",
            SigmaFamily::An1UnitAnUnit => "unit-unit-n1n",
        }
    }

    /// Builds a family from a CLI family token and optional parameters.
    pub fn from_flags(
        name: &str,
        b1: Option<i64>,
        b2: Option<i64>,
        bn: Option<i64>,
    ) -> Result<SigmaFamily, String> {
        let need = |v: Option<i64>, flag: &str| v.ok_or(format!("family {name} needs --{flag}"));
        match name {
            "all" => Ok(SigmaFamily::All),
            "a1" => Ok(SigmaFamily::A1Fixed { b1: need(b1, "b1")? }),
            "a1a2" => Ok(SigmaFamily::A1A2Fixed { b1: need(b1, "b1")?, b2: need(b2, "b2")? }),
            "an-unit" => Ok(SigmaFamily::AnUnit),
            "an-fixed" => Ok(SigmaFamily::AnFixedUnit { bn: need(bn, "bn")? }),
            "a1-an-unit" => Ok(SigmaFamily::A1FixedAnUnit { b1: need(b1, "b1")? }),
            "unit-unit-1n" => Ok(SigmaFamily::A1UnitAnUnit),
            "unit-unit-n1n" => Ok(SigmaFamily::An1UnitAnUnit),
            other => Err(format!("unknown family {other}")),
        }
    }

    /// Parameter names and values reduced mod p, as echoed by the CLI.
    pub fn reduced_params(&self, p: u64) -> Vec<(&'static str, u64)> {
        let r = |v: i64| v.rem_euclid(p as i64) as u64;
        match self {
            SigmaFamily::All | SigmaFamily::AnUnit | SigmaFamily::A1UnitAnUnit
            | SigmaFamily::An1UnitAnUnit => vec![],
            SigmaFamily::A1Fixed { b1 } => vec![("b1", r(*b1))],
            SigmaFamily::A1A2Fixed { b1, b2 } => vec![("b1", r(*b1)), ("b2", r(*b2))],
            SigmaFamily::AnFixedUnit { bn } => vec![("bn", r(*bn))],
            SigmaFamily::A1FixedAnUnit { b1 } => vec![("b1", r(*b1))],
        }
    }

    /// Smallest degree the family is defined for.
    pub fn min_degree(&self) -> usize {
        match self {
            SigmaFamily::A1A2Fixed { .. } => 3,
            _ => 2,
        }
    }
}

fn ipow(p: u64, e: u64) -> Int {
    Int::from(p).pow(e as u32)
}

fn rq(num: Int, den: Int) -> Rat {
    Rat::new(num, den)
}

fn sign_pow(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// ι_{n,p}(b): 0 if p ∤ n; otherwise p − 1 at b = 0 and −1 elsewhere.
/// Equals (1/p) Σ_{χ≠1} χ(b)⁻¹ Σ_c χ(c)^n over additive characters.
pub fn iota(n: u64, p: u64, b: u64) -> i64 {
    if !n.is_multiple_of(p) {
        0
    } else if b.is_multiple_of(p) {
        (p - 1) as i64
    } else {
        -1
    }
}

/// δ_{n,p}(b) for odd p: the Gauss-sum evaluation
/// Σ_{c≠0} e_p(ca) p 𝒢(p; cb)^{n−1} collapses to this three-case form.
pub fn delta(n: u64, p: u64, b: u64) -> Int {
    assert!(p > 2, "delta is defined for odd p");
    let b = b % p;
    let minus_one = legendre(p - 1, p);
    if n.is_multiple_of(2) {
        let s = legendre(b, p) * sign_pow_leg(minus_one, n / 2);
        Int::from(s) * ipow(p, n / 2 + 1)
    } else if b != 0 {
        Int::from(-sign_pow_leg(minus_one, (n - 1) / 2)) * ipow(p, n.div_ceil(2))
    } else {
        Int::from(sign_pow_leg(minus_one, (n - 1) / 2) * (p as i64 - 1)) * ipow(p, n.div_ceil(2))
    }
}

fn sign_pow_leg(sym: i64, e: u64) -> i64 {
    if sym == 1 || e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// H_{n,p,t}(b): the double δ-sum entering the valuation-1 correction for
/// the fixed-a₁-a₂ family. Both sums run over 0 ≤ k ≤ n − 2, split by
/// whether p divides n − k.
pub fn h_func(n: u64, p: u64, t: u64, b: u64) -> Int {
    assert!(p > 2, "h_func is defined for odd p");
    assert!(t <= 1, "only t in {{0, 1}} occurs");
    let leg2 = legendre(2, p);
    let mut acc = Int::zero();
    for k in 0..=n - 2 {
        let sign = sign_pow(k.div_ceil(2)) * sign_pow_leg(leg2, k / 2);
        if !(n - k).is_multiple_of(p) {
            let legnk = legendre((n - k) % p, p);
            acc += Int::from(sign * legnk) * delta(k.div_ceil(2) + t + 1, p, b);
        } else {
            acc += Int::from(sign * p as i64) * delta(k.div_ceil(2) + t, p, b);
        }
    }
    acc
}

/// κ_{n,p}(b): gcd(n, p−1) − 1 when b is an n-th power in F_p^×, else −1.
/// Equals (1/(p−1)) Σ_{χ≠1} χ(b)⁻¹ Σ_{c≠0} χ(c)^n over multiplicative
/// characters.
pub fn kappa(n: u64, p: u64, b: u64) -> i64 {
    assert!(p > 2, "kappa is defined for odd p");
    let b = b % p;
    assert!(b != 0, "kappa needs a unit argument");
    let g = gcd_u64(n, p - 1);
    let is_nth_power = crate::characters::pow_mod(b, (p - 1) / g, p) == 1;
    if is_nth_power {
        g as i64 - 1
    } else {
        -1
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// η_p(b): p − 1 at b ≡ 0, −1 otherwise (the full additive character sum
/// Σ_{χ≠1} χ(b)⁻¹).
pub fn eta(p: u64, b: u64) -> i64 {
    if b.is_multiple_of(p) {
        (p - 1) as i64
    } else {
        -1
    }
}

/// (p0, p1, pmax) of the unrestricted family.
fn densities_all(p: u64, n: u64) -> (Rat, Rat, Rat) {
    let pi = Int::from(p);
    let p0 = Rat::one() - rq(Int::one(), pi.clone());
    let pmax = Rat::one() - rq(Int::one(), &pi * &pi);
    let p1 = if p == 2 {
        Rat::zero()
    } else if n == 2 {
        rq(&pi - 1, &pi * &pi)
    } else {
        let pm1sq: Int = (&pi - 1) * (&pi - 1);
        rq(pm1sq.clone(), &pi * &pi * (&pi + 1))
            - rq(Int::from(sign_pow(n)) * pm1sq, ipow(p, n) * (&pi + 1))
    };
    (p0, p1, pmax)
}

fn densities_a1fixed(p: u64, n: u64, b1: i64) -> (Rat, Rat, Rat) {
    let b = b1.rem_euclid(p as i64) as u64;
    if n == 2 && p == 2 {
        return if b == 1 {
            (Rat::one(), Rat::zero(), Rat::one())
        } else {
            (Rat::zero(), Rat::zero(), rq(Int::one(), Int::from(2)))
        };
    }
    let (p0, mut p1, pmax) = densities_all(p, n);
    if p != 2 && n > 2 {
        p1 += rq(
            Int::from(sign_pow(n) * (p as i64 - 1) * iota(n, p, b)),
            ipow(p, n),
        );
    }
    (p0, p1, pmax)
}

fn densities_a1a2fixed(p: u64, n: u64, b1: i64, b2: i64) -> (Rat, Rat, Rat) {
    let (p0, p1, pmax) = densities_a1fixed(p, n, b1);
    if p == 2 {
        return (p0, Rat::zero(), pmax);
    }
    let a1 = b1.rem_euclid(p as i64) as u64;
    let a2 = b2.rem_euclid(p as i64) as u64;
    let half = n / 2;
    let corr_sign = sign_pow(half) * sign_pow_leg(legendre(2, p), half);
    let p1_scale = rq(
        Int::from(sign_pow(n)) * (Int::from(p) - 1),
        ipow(p, n + 1),
    );
    if n.is_multiple_of(p) {
        if a1 != 0 {
            return (p0, p1, pmax);
        }
        let beta = 2 * a2 % p;
        let d = delta(n.div_ceil(2) + 1, p, beta);
        let main = Int::from(corr_sign) * d;
        (
            p0 + rq(main.clone(), ipow(p, n)),
            p1 + &p1_scale * Rat::from_integer(h_func(n, p, 1, beta)),
            pmax + rq(main, ipow(p, n + half)),
        )
    } else {
        let inv_n = inv_mod(n % p, p);
        // 2b₂ − (1 − 1/n) b₁² mod p
        let beta = (2 * a2 % p + p - mul_mod(mul_mod(a1, a1, p), (1 + p - inv_n) % p, p)) % p;
        let legn = legendre(n % p, p);
        let d = delta(n.div_ceil(2), p, beta);
        let main = Int::from(corr_sign * legn) * d;
        (
            p0 + rq(main.clone(), ipow(p, n)),
            p1 + &p1_scale * Rat::from_integer(Int::from(legn) * h_func(n, p, 0, beta)),
            pmax + rq(main, ipow(p, n + half)),
        )
    }
}

fn densities_an_unit(p: u64, n: u64) -> (Rat, Rat, Rat) {
    let pi = Int::from(p);
    let sign = Int::from(sign_pow(n));
    let p0 = rq(pi.clone(), &pi + 1) * (Rat::one() - rq(sign.clone(), ipow(p, n)));
    let ring: Int = &pi * &pi + &pi + 1;
    let pmax = if n % 2 == 1 {
        Rat::one() - rq(Int::one(), ring.clone()) + rq(Int::one(), &ring * ipow(p, 3 * (n - 1) / 2))
    } else {
        Rat::one() - rq(Int::one(), ring.clone()) - rq(&pi + 1, &ring * ipow(p, 3 * n / 2 - 1))
    };
    let p1 = if p == 2 {
        Rat::zero()
    } else {
        let pm1 = &pi - 1;
        let sq: Int = &pm1 * &pm1;
        let head = rq(sq.clone(), &pi * (&pi + 1) * (&pi + 1));
        let tail_a = rq(Int::from(n as i64 - 1) * &sq, &pi + 1);
        let tail_b = rq(&pi * &pm1 * (&pi + 3), (&pi + 1) * (&pi + 1));
        head - rq(sign, ipow(p, n)) * (tail_a - tail_b)
    };
    (p0, p1, pmax)
}

fn densities_an_fixed_unit(p: u64, n: u64, bn: i64) -> (Rat, Rat, Rat) {
    let (mut p0, mut p1, mut pmax) = densities_an_unit(p, n);
    if p == 2 {
        return (p0, p1, pmax);
    }
    let b = bn.rem_euclid(p as i64) as u64;
    let pi = Int::from(p);
    if n % 2 == 1 {
        p1 -= rq((&pi - 1) * Int::from(kappa(n, p, b)), ipow(p, n));
    } else {
        let leg = Int::from(legendre(b, p));
        pmax -= rq(leg.clone(), ipow(p, 3 * n / 2 - 1));
        p0 -= rq(leg.clone(), ipow(p, n - 1));
        p1 += rq((&pi - 1) * Int::from(kappa(n, p, b)), ipow(p, n))
            - rq((&pi - 1) * (&pi - 1) * Int::from(n as i64 / 2 - 1) * leg, ipow(p, n));
    }
    (p0, p1, pmax)
}

fn densities_a1_fixed_an_unit(p: u64, n: u64, b1: i64) -> (Rat, Rat, Rat) {
    let (mut p0, p1, mut pmax) = densities_an_unit(p, n);
    let b = b1.rem_euclid(p as i64) as u64;
    let half = n / 2;
    let e = Int::from(sign_pow(n) * eta(p, b));
    if p == 2 {
        pmax -= rq(e.clone(), ipow(2, n + half - 1));
        p0 -= rq(e, ipow(2, n - 1));
        (p0, Rat::zero(), pmax)
    } else {
        let pm1 = Int::from(p) - 1;
        pmax += rq(e.clone(), &pm1 * ipow(p, n + half - 1));
        p0 += rq(e.clone(), &pm1 * ipow(p, n - 1));
        let count = Int::from(n as i64 - 1 - (p * (n / p)) as i64);
        let p1 = p1 - rq(count * e, ipow(p, n));
        (p0, p1, pmax)
    }
}

/// Exact densities of a family from the closed-form expressions.
pub fn closed_density(family: &SigmaFamily, p: u64, n: usize) -> Result<DensityResult, EngineError> {
    if !crate::engine::is_prime(p) {
        return Err(EngineError::InvalidParams(format!("{p} is not prime")));
    }
    if n < family.min_degree() {
        return Err(EngineError::InvalidParams(format!(
            "family {} needs degree >= {}",
            family.cli_name(),
            family.min_degree()
        )));
    }
    let nu = n as u64;
    let (p0, p1, pmax) = match family {
        SigmaFamily::All => densities_all(p, nu),
        SigmaFamily::A1Fixed { b1 } => densities_a1fixed(p, nu, *b1),
        SigmaFamily::A1A2Fixed { b1, b2 } => densities_a1a2fixed(p, nu, *b1, *b2),
        SigmaFamily::AnUnit => densities_an_unit(p, nu),
        SigmaFamily::AnFixedUnit { bn } => {
            if bn.rem_euclid(p as i64) == 0 {
                return Err(EngineError::InvalidParams(format!(
                    "constant coefficient {bn} is not a unit mod {p}"
                )));
            }
            densities_an_fixed_unit(p, nu, *bn)
        }
        SigmaFamily::A1FixedAnUnit { b1 } => densities_a1_fixed_an_unit(p, nu, *b1),
        SigmaFamily::A1UnitAnUnit | SigmaFamily::An1UnitAnUnit => {
            densities_a1_fixed_an_unit(p, nu, 1)
        }
    };
    Ok(DensityResult::new(p, p0, p1, pmax, Method::Closed))
}

/// The three correction terms separating the fixed-a₁-a₂ family from the
/// fixed-a₁ family, evaluated by direct summation over the characters of
/// G_p with χ(y² + 1) ≠ 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step1Corrections {
    pub d_sqf0: Rat,
    pub d_sqf1: Rat,
    pub d_max: Rat,
}

pub fn step1_char_sums(p: u64, n: usize, b1: i64, b2: i64) -> Step1Corrections {
    if p == 2 {
        return Step1Corrections {
            d_sqf0: Rat::zero(),
            d_sqf1: Rat::zero(),
            d_max: Rat::zero(),
        };
    }
    let n = n as u64;
    let group = GroupSpec::OnePlusY(p);
    let m = group.exponent();
    let gamma0 = GroupElem::one_plus_y(
        p,
        b1.rem_euclid(p as i64) as u64,
        b2.rem_euclid(p as i64) as u64,
    );
    let chars = group.characters();
    let c_table: Vec<CycloNum> = chars.iter().map(crate::characters::c_chi).collect();
    let pos = |chi: &Character| (chi.index().0 * p + chi.index().1) as usize;
    let half = n / 2;

    let mut main = CycloNum::zero(m);
    let mut val1 = CycloNum::zero(m);
    for chi in chars.iter().filter(|c| c.nontrivial_on_y2()) {
        let inv_gamma = chi.eval_inv(&gamma0).unwrap();
        let c_chi_sq = &c_table[pos(&chi.square())];
        // C_χ^{n mod 2} C_{χ²}^{⌊n/2⌋}
        let mut term = c_chi_sq.pow(half as u32);
        if n % 2 == 1 {
            term = cyclo_mul(&term, &c_table[pos(chi)]).unwrap();
        }
        main = main.add(&cyclo_mul(&inv_gamma, &term).unwrap()).unwrap();

        let mut inner = CycloNum::zero(m);
        for k in 0..=n - 2 {
            let mut t = c_table[pos(&chi.pow(n - k))].clone();
            if k % 2 == 1 {
                t = cyclo_mul(&t, &c_table[pos(chi)]).unwrap();
            }
            t = cyclo_mul(&t, &c_chi_sq.pow((k / 2) as u32)).unwrap();
            if k.div_ceil(2) % 2 == 1 {
                t = t.neg();
            }
            inner = inner.add(&t).unwrap();
        }
        val1 = val1.add(&cyclo_mul(&inv_gamma, &inner).unwrap()).unwrap();
    }
    let main: Rat = main.to_rational().expect("step1 main sum is rational");
    let val1: Rat = val1.to_rational().expect("step1 valuation-1 sum is rational");
    let sgn_half = Int::from(sign_pow(half));
    let d_sqf0 = rq(sgn_half.clone(), ipow(p, n)) * &main;
    let d_max = rq(sgn_half, ipow(p, n + half)) * &main;
    let d_sqf1 = rq(Int::from(sign_pow(n)) * (Int::from(p) - 1), ipow(p, n + 1)) * val1;
    Step1Corrections { d_sqf0, d_sqf1, d_max }
}

/// Closed form of Σ_{χ(y²+1)≠1} χ(γ)⁻¹ Π_j C_{χ^{m_j}} for γ = a₂y² + a₁y + 1,
/// as a rational number. The literal sum is [`step2_literal_sum`].
pub fn step2_char_sum(p: u64, a1: u64, a2: u64, exponents: &[u64]) -> Rat {
    assert!(p > 2, "the step2 formula needs odd p");
    let a1 = a1 % p;
    let a2 = a2 % p;
    let k = exponents.len() as u64;
    let t = exponents.iter().filter(|&&m| m % p == 0).count() as u64;
    let m_sigma: u64 = exponents.iter().map(|&m| m % p).sum::<u64>() % p;
    let m_pi = exponents
        .iter()
        .filter(|&&m| m % p != 0)
        .fold(1u64, |acc, &m| mul_mod(acc, m % p, p));
    let value = if m_sigma == 0 {
        if a1 != 0 {
            Int::zero()
        } else {
            Int::from(legendre(m_pi, p)) * ipow(p, t) * delta(k - t + 1, p, 2 * a2 % p)
        }
    } else {
        let inv_ms = inv_mod(m_sigma, p);
        let arg = (2 * a2 % p + p - mul_mod(mul_mod(a1, a1, p), (1 + p - inv_ms) % p, p)) % p;
        Int::from(legendre(mul_mod(m_sigma, m_pi, p), p)) * ipow(p, t) * delta(k - t, p, arg)
    };
    Rat::from_integer(value)
}

/// The literal character sum that [`step2_char_sum`] evaluates in closed
/// form; kept separate so the two can be compared exhaustively.
pub fn step2_literal_sum(p: u64, a1: u64, a2: u64, exponents: &[u64]) -> CycloNum {
    let group = GroupSpec::OnePlusY(p);
    let m = group.exponent();
    let gamma = GroupElem::one_plus_y(p, a1, a2);
    let chars = group.characters();
    let c_table: Vec<CycloNum> = chars.iter().map(crate::characters::c_chi).collect();
    let pos = |chi: &Character| (chi.index().0 * p + chi.index().1) as usize;
    let mut acc = CycloNum::zero(m);
    for chi in chars.iter().filter(|c| c.nontrivial_on_y2()) {
        let mut term = chi.eval_inv(&gamma).unwrap();
        for &e in exponents {
            term = cyclo_mul(&term, &c_table[pos(&chi.pow(e))]).unwrap();
        }
        acc = acc.add(&term).unwrap();
    }
    acc
}
