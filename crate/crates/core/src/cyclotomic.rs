//! Exact arithmetic in the cyclotomic field Q(ζ_m) for small m.
//!
//! Elements are coordinate vectors of length φ(m) in the power basis
//! 1, ζ, …, ζ^{φ(m)−1}, reduced modulo the m-th cyclotomic polynomial Φ_m.
//! The coordinates are arbitrary-precision rationals, so equality is plain
//! componentwise comparison of the canonical form.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::{Int, Rat};

/// Errors raised by cyclotomic arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycloError {
    ConductorMismatch { left: u64, right: u64 },
    /// A value expected to be rational had a nonzero higher coordinate.
    NotRational,
}

impl std::fmt::Display for CycloError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CycloError::ConductorMismatch { left, right } => {
                write!(f, "conductor mismatch: {left} vs {right}")
            }
            CycloError::NotRational => write!(f, "value is not rational"),
        }
    }
}

impl std::error::Error for CycloError {}

pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut phi = m;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            phi -= phi / d;
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Coefficients of Φ_m, low-to-high, computed by exact division of x^m − 1
/// by the product of Φ_d over proper divisors d of m.
fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    if m == 1 {
        return vec![BigInt::from(-1), BigInt::from(1)];
    }
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic; the division is known to be exact.
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for d in (dd..rem.len()).rev() {
        let q = std::mem::take(&mut rem[d]);
        if q.is_zero() {
            continue;
        }
        for (j, c) in den.iter().enumerate().take(dd) {
            let idx = d - dd + j;
            let t = &q * c;
            rem[idx] -= t;
        }
        quot[d - dd] = q;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

struct Basis {
    phi: usize,
    /// rows[j] = coordinates of ζ^{φ+j} in the power basis, j < m.
    rows: Vec<Vec<Rat>>,
}

fn basis(m: u64) -> Arc<Basis> {
    static BASES: OnceLock<Mutex<HashMap<u64, Arc<Basis>>>> = OnceLock::new();
    let bases = BASES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = bases.lock().unwrap();
    if let Some(hit) = guard.get(&m) {
        return hit.clone();
    }
    let cyclo = cyclotomic_poly(m);
    let phi = cyclo.len() - 1;
    // ζ^φ = −(Φ_m − x^φ); higher powers by repeated multiplication by ζ.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m as usize);
    let first: Vec<Rat> = cyclo[..phi]
        .iter()
        .map(|c| Rat::from_integer(-c.clone()))
        .collect();
    rows.push(first);
    for _ in 1..m.max(2) {
        let prev = rows.last().unwrap();
        let mut next = vec![Rat::zero(); phi];
        next[1..phi].clone_from_slice(&prev[..phi - 1]);
        let top = prev[phi - 1].clone();
        if !top.is_zero() {
            for (i, r) in rows[0].iter().enumerate() {
                if !r.is_zero() {
                    next[i] += &top * r;
                }
            }
        }
        rows.push(next);
    }
    let arc = Arc::new(Basis { phi, rows });
    guard.insert(m, arc.clone());
    arc
}

/// Exact element of Q(ζ_m) in canonical reduced coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloNum {
    conductor: u64,
    coords: Vec<Rat>,
}

impl CycloNum {
    pub fn zero(m: u64) -> Self {
        let phi = euler_phi(m) as usize;
        CycloNum { conductor: m, coords: vec![Rat::zero(); phi] }
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, Rat::one())
    }

    pub fn from_rational(m: u64, q: Rat) -> Self {
        let mut z = Self::zero(m);
        z.coords[0] = q;
        z
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &CycloNum) -> Result<(), CycloError> {
        if self.conductor == other.conductor {
            Ok(())
        } else {
            Err(CycloError::ConductorMismatch {
                left: self.conductor,
                right: other.conductor,
            })
        }
    }

    pub fn add(&self, other: &CycloNum) -> Result<CycloNum, CycloError> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycloNum { conductor: self.conductor, coords })
    }

    pub fn sub(&self, other: &CycloNum) -> Result<CycloNum, CycloError> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycloNum { conductor: self.conductor, coords })
    }

    pub fn neg(&self) -> CycloNum {
        CycloNum {
            conductor: self.conductor,
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> CycloNum {
        if s.is_zero() {
            return CycloNum::zero(self.conductor);
        }
        CycloNum {
            conductor: self.conductor,
            coords: self
                .coords
                .iter()
                .map(|a| if a.is_zero() { Rat::zero() } else { a * s })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> CycloNum {
        let mut acc = CycloNum::one(self.conductor);
        for _ in 0..e {
            acc = cyclo_mul(&acc, self).unwrap();
        }
        acc
    }

    /// The constant coordinate, provided every higher coordinate vanishes.
    pub fn to_rational(&self) -> Result<Rat, CycloError> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Ok(self.coords[0].clone())
        } else {
            Err(CycloError::NotRational)
        }
    }

    /// Numerical embedding ζ_m ↦ e^{2πi/m}, for float cross-checks.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.conductor as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coords.iter().enumerate() {
            let x = rat_to_f64(c);
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / m;
            re += x * theta.cos();
            im += x * theta.sin();
        }
        (re, im)
    }
}

fn rat_to_f64(q: &Rat) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let fn_ = bigint_to_f64(n);
    let fd = bigint_to_f64(d);
    fn_ / fd
}

fn bigint_to_f64(x: &Int) -> f64 {
    let (sign, digits) = x.to_u64_digits();
    let mut acc = 0.0f64;
    for &d in digits.iter().rev() {
        acc = acc * 1.8446744073709552e19 + d as f64;
    }
    if sign == num_bigint::Sign::Minus {
        -acc
    } else {
        acc
    }
}

/// ζ_m^k as a canonical element of Q(ζ_m); k is taken mod m.
pub fn root_of_unity(m: u64, k: i64) -> CycloNum {
    let k = k.rem_euclid(m as i64) as u64;
    let b = basis(m);
    let mut z = CycloNum::zero(m);
    if (k as usize) < b.phi {
        z.coords[k as usize] = Rat::one();
    } else {
        z.coords.clone_from_slice(&b.rows[k as usize - b.phi]);
    }
    z
}

/// Product in Q(ζ_m); both operands must share the conductor.
pub fn cyclo_mul(a: &CycloNum, b: &CycloNum) -> Result<CycloNum, CycloError> {
    a.check(b)?;
    let m = a.conductor;
    let bs = basis(m);
    let phi = bs.phi;
    let mut acc = vec![Rat::zero(); 2 * phi - 1];
    for (i, x) in a.coords.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coords.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            acc[i + j] += x * y;
        }
    }
    let mut coords: Vec<Rat> = acc[..phi].to_vec();
    for (idx, c) in acc.iter().enumerate().skip(phi) {
        if c.is_zero() {
            continue;
        }
        for (t, r) in bs.rows[idx - phi].iter().enumerate() {
            if !r.is_zero() {
                coords[t] += c * r;
            }
        }
    }
    Ok(CycloNum { conductor: m, coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};
    use proptest::prelude::*;

    #[test]
    fn roots_of_unity_basics() {
        // ζ_4^2 = −1
        assert_eq!(root_of_unity(4, 2), CycloNum::from_rational(4, rat_int(-1)));
        // ζ_3^2 = −1 − ζ_3
        let z = root_of_unity(3, 2);
        assert_eq!(z.coords(), &[rat_int(-1), rat_int(-1)]);
        // ζ_1^0 = 1
        assert_eq!(root_of_unity(1, 0), CycloNum::one(1));
    }

    #[test]
    fn mul_basics() {
        // (1 + 2ζ_3)^2 = −3
        let mut a = CycloNum::one(3);
        a = a.add(&root_of_unity(3, 1).scale(&rat_int(2))).unwrap();
        let sq = cyclo_mul(&a, &a).unwrap();
        assert_eq!(sq.to_rational().unwrap(), rat_int(-3));
        // ζ_4 · ζ_4^3 = 1
        let prod = cyclo_mul(&root_of_unity(4, 1), &root_of_unity(4, 3)).unwrap();
        assert_eq!(prod.to_rational().unwrap(), rat_int(1));
        // 0 · x = 0
        let z = cyclo_mul(&CycloNum::zero(5), &root_of_unity(5, 3)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn conductor_mismatch_is_an_error() {
        let err = cyclo_mul(&CycloNum::one(3), &CycloNum::one(4)).unwrap_err();
        assert_eq!(err, CycloError::ConductorMismatch { left: 3, right: 4 });
    }

    #[test]
    fn to_rational_cases() {
        assert_eq!(
            CycloNum::from_rational(3, rat_int(-3)).to_rational().unwrap(),
            rat_int(-3)
        );
        assert_eq!(root_of_unity(3, 1).to_rational().unwrap_err(), CycloError::NotRational);
        assert_eq!(root_of_unity(4, 2).to_rational().unwrap(), rat_int(-1));
    }

    #[test]
    fn power_and_vanishing_sums() {
        for m in [1u64, 3, 4, 5, 6, 7, 8, 12] {
            let z = root_of_unity(m, 1);
            assert_eq!(z.pow(m as u32), CycloNum::one(m), "zeta^m != 1 at m={m}");
            if m > 1 {
                let mut sum = CycloNum::zero(m);
                for k in 0..m {
                    sum = sum.add(&root_of_unity(m, k as i64)).unwrap();
                }
                assert!(sum.is_zero(), "root sum nonzero at m={m}");
            }
        }
    }

    fn arb_cyclo(m: u64) -> impl Strategy<Value = CycloNum> {
        let phi = euler_phi(m) as usize;
        proptest::collection::vec((-9i64..=9, 1i64..=4), phi).prop_map(move |v| {
            let mut z = CycloNum::zero(m);
            for (i, (n, d)) in v.into_iter().enumerate() {
                z.coords[i] = rat(n, d);
            }
            z
        })
    }

    fn arb_triple() -> impl Strategy<Value = (CycloNum, CycloNum, CycloNum)> {
        prop::sample::select(vec![1u64, 3, 4, 5, 6, 7, 8, 12])
            .prop_flat_map(|m| (arb_cyclo(m), arb_cyclo(m), arb_cyclo(m)))
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            let ab_c = cyclo_mul(&cyclo_mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = cyclo_mul(&a, &cyclo_mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            let left = cyclo_mul(&a, &b.add(&c).unwrap()).unwrap();
            let right = cyclo_mul(&a, &b).unwrap().add(&cyclo_mul(&a, &c).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            let ab = cyclo_mul(&a, &b).unwrap();
            let ba = cyclo_mul(&b, &a).unwrap();
            prop_assert_eq!(&ab, &ba);
        }

        #[test]
        fn complex_embedding_matches((a, b, _c) in arb_triple()) {
            let exact = cyclo_mul(&a, &b).unwrap().to_complex();
            let (ar, ai) = a.to_complex();
            let (br, bi) = b.to_complex();
            let approx = (ar * br - ai * bi, ar * bi + ai * br);
            prop_assert!((exact.0 - approx.0).abs() < 1e-9);
            prop_assert!((exact.1 - approx.1).abs() < 1e-9);
        }
    }
}
