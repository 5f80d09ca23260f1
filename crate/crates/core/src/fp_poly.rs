//! Dense polynomial arithmetic over Z/p and Z/p².
//!
//! Coefficients are stored low-to-high: `coeffs[i]` is the coefficient of
//! x^i, reduced into [0, p^k). Degrees stay small (the enumeration kernel
//! tops out around 20), so everything is schoolbook.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Integer residue with its modulus carried alongside.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueInt {
    pub value: u64,
    pub modulus: u64,
}

impl ResidueInt {
    pub fn new(value: u64, modulus: u64) -> Self {
        ResidueInt { value: value % modulus, modulus }
    }
}

/// Dense polynomial over Z/p^k with k ∈ {1, 2}.
///
/// Trailing zero coefficients are trimmed, so `coeffs.len()` is degree + 1
/// (the zero polynomial has an empty vector).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMod {
    p: u64,
    k: u8,
    coeffs: Vec<u64>,
}

impl PolyMod {
    /// Builds a polynomial from low-to-high coefficients, reducing mod p^k.
    pub fn new(p: u64, k: u8, coeffs: &[u64]) -> Self {
        assert!(k == 1 || k == 2, "modulus must be p or p^2");
        let m = p.pow(k as u32);
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % m).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyMod { p, k, coeffs: c }
    }

    pub fn zero(p: u64, k: u8) -> Self {
        PolyMod::new(p, k, &[])
    }

    pub fn one(p: u64, k: u8) -> Self {
        PolyMod::new(p, k, &[1])
    }

    /// The monic linear polynomial x + c.
    pub fn x_plus(p: u64, k: u8, c: u64) -> Self {
        PolyMod::new(p, k, &[c, 1])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn power(&self) -> u8 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Coefficient of x^i as a residue (0 beyond the degree).
    pub fn coeff(&self, i: usize) -> ResidueInt {
        ResidueInt::new(self.coeffs.get(i).copied().unwrap_or(0), self.modulus())
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    fn check_compat(&self, other: &PolyMod) -> Result<(), PolyError> {
        if self.p == other.p && self.k == other.k {
            Ok(())
        } else {
            Err(PolyError::ModulusMismatch {
                left: self.modulus(),
                right: other.modulus(),
            })
        }
    }

    pub fn add(&self, other: &PolyMod) -> PolyMod {
        self.check_compat(other).expect("modulus mismatch in add");
        let m = self.modulus();
        let len = self.coeffs.len().max(other.coeffs.len());
        let c: Vec<u64> = (0..len)
            .map(|i| {
                (self.coeffs.get(i).copied().unwrap_or(0) + other.coeffs.get(i).copied().unwrap_or(0)) % m
            })
            .collect();
        PolyMod::new(self.p, self.k, &c)
    }

    pub fn sub(&self, other: &PolyMod) -> PolyMod {
        self.check_compat(other).expect("modulus mismatch in sub");
        let m = self.modulus();
        let len = self.coeffs.len().max(other.coeffs.len());
        let c: Vec<u64> = (0..len)
            .map(|i| {
                (m + self.coeffs.get(i).copied().unwrap_or(0) - other.coeffs.get(i).copied().unwrap_or(0)) % m
            })
            .collect();
        PolyMod::new(self.p, self.k, &c)
    }

    pub fn scale(&self, s: u64) -> PolyMod {
        let m = self.modulus();
        let s = s % m;
        let c: Vec<u64> = self.coeffs.iter().map(|&x| x * s % m).collect();
        PolyMod::new(self.p, self.k, &c)
    }

    pub fn derivative(&self) -> PolyMod {
        let m = self.modulus();
        let c: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| (i as u64 % m) * x % m)
            .collect();
        PolyMod::new(self.p, self.k, &c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus();
        let x = x % m;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % m;
        }
        acc
    }

    /// Reduction mod p of a polynomial given mod p².
    pub fn reduce_to_prime(&self) -> PolyMod {
        PolyMod::new(self.p, 1, &self.coeffs)
    }

    /// Lift mod p → mod p² keeping coefficients in [0, p).
    pub fn lift_to_square(&self) -> PolyMod {
        assert_eq!(self.k, 1, "lift expects a mod-p polynomial");
        PolyMod::new(self.p, 2, &self.coeffs)
    }
}

/// Errors raised by polynomial operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    ModulusMismatch { left: u64, right: u64 },
}

impl std::fmt::Display for PolyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolyError::ModulusMismatch { left, right } => {
                write!(f, "modulus mismatch: {left} vs {right}")
            }
        }
    }
}

impl std::error::Error for PolyError {}

/// Product of two polynomials over the same Z/p^k.
pub fn poly_mul(a: &PolyMod, b: &PolyMod) -> Result<PolyMod, PolyError> {
    a.check_compat(b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(PolyMod::zero(a.p, a.k));
    }
    let m = a.modulus();
    let mut c = vec![0u64; a.coeffs.len() + b.coeffs.len() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % m;
        }
    }
    Ok(PolyMod::new(a.p, a.k, &c))
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a is nonzero mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Euclidean division over F_p (k = 1): returns (q, r) with a = q·b + r.
pub fn div_rem(a: &PolyMod, b: &PolyMod) -> (PolyMod, PolyMod) {
    assert_eq!(a.k, 1, "division lives over F_p");
    assert!(!b.is_zero(), "division by zero polynomial");
    let p = a.p;
    if a.degree() < b.degree() || a.is_zero() {
        return (PolyMod::zero(p, 1), a.clone());
    }
    let lead_inv = inv_mod(*b.coeffs.last().unwrap(), p);
    let mut rem = a.coeffs.clone();
    let mut quot = vec![0u64; a.degree() - b.degree() + 1];
    for d in (b.degree()..=a.degree()).rev() {
        let top = rem[d] % p;
        if top == 0 {
            continue;
        }
        let q = top * lead_inv % p;
        quot[d - b.degree()] = q;
        for (j, &bc) in b.coeffs.iter().enumerate() {
            let idx = d - b.degree() + j;
            rem[idx] = (rem[idx] + p * p - q * bc % p) % p;
        }
    }
    (PolyMod::new(p, 1, &quot), PolyMod::new(p, 1, &rem))
}

/// Monic gcd over F_p; gcd(u, 0) is u made monic.
pub fn gcd(a: &PolyMod, b: &PolyMod) -> PolyMod {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    if x.is_zero() {
        return x;
    }
    let lead = *x.coeffs.last().unwrap();
    if lead == 1 {
        x
    } else {
        x.scale(inv_mod(lead, x.p))
    }
}

fn divides(g: &PolyMod, u: &PolyMod) -> bool {
    let (_, r) = div_rem(u, g);
    r.is_zero()
}

/// True iff the monic polynomial u over F_p has no repeated factor.
pub fn is_squarefree(u: &PolyMod) -> bool {
    assert_eq!(u.power(), 1, "squarefree test lives over F_p");
    assert!(u.is_monic(), "squarefree test expects a monic input");
    if u.degree() == 0 {
        return true;
    }
    gcd(u, &u.derivative()).degree() == 0
}

/// Möbius function on monic polynomials over F_p.
pub fn mobius(u: &PolyMod) -> i64 {
    if !is_squarefree(u) {
        return 0;
    }
    if u.degree() == 0 {
        return 1;
    }
    if factor(u).factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Factorization of a monic polynomial over F_p into monic irreducibles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(PolyMod, u32)>,
}

impl Factorization {
    /// Product of the distinct irreducible factors (the radical).
    pub fn radical(&self) -> PolyMod {
        let (p, k) = match self.factors.first() {
            Some((g, _)) => (g.p, g.k),
            None => return PolyMod::one(2, 1),
        };
        let mut acc = PolyMod::one(p, k);
        for (g, _) in &self.factors {
            acc = poly_mul(&acc, g).unwrap();
        }
        acc
    }

    pub fn reassemble(&self) -> PolyMod {
        let (p, k) = match self.factors.first() {
            Some((g, _)) => (g.p, g.k),
            None => return PolyMod::one(2, 1),
        };
        let mut acc = PolyMod::one(p, k);
        for (g, e) in &self.factors {
            for _ in 0..*e {
                acc = poly_mul(&acc, g).unwrap();
            }
        }
        acc
    }
}

/// Iterator over all monic polynomials of a fixed degree over F_p, in
/// odometer order (constant coefficient varies fastest).
pub fn monic_polys(p: u64, degree: usize) -> impl Iterator<Item = PolyMod> {
    let total = p.pow(degree as u32);
    (0..total).map(move |mut code| {
        let mut coeffs = vec![0u64; degree + 1];
        for c in coeffs.iter_mut().take(degree) {
            *c = code % p;
            code /= p;
        }
        coeffs[degree] = 1;
        PolyMod::new(p, 1, &coeffs)
    })
}

type IrredKey = (u64, usize);

fn irreducible_table(p: u64, max_deg: usize) -> Arc<Vec<PolyMod>> {
    static TABLES: OnceLock<Mutex<HashMap<IrredKey, Arc<Vec<PolyMod>>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().unwrap();
    if let Some(hit) = guard.get(&(p, max_deg)) {
        return hit.clone();
    }
    // Sieve: a monic polynomial of degree d is irreducible iff it has no
    // irreducible factor of degree ≤ d/2, all of which appear earlier.
    let mut table: Vec<PolyMod> = Vec::new();
    for d in 1..=max_deg {
        for u in monic_polys(p, d) {
            let irreducible = table
                .iter()
                .take_while(|g| 2 * g.degree() <= d)
                .all(|g| !divides(g, &u));
            if irreducible {
                table.push(u);
            }
        }
    }
    let arc = Arc::new(table);
    guard.insert((p, max_deg), arc.clone());
    arc
}

/// Complete factorization of a monic non-constant polynomial over F_p by
/// deterministic trial division against the sieved irreducible table.
pub fn factor(u: &PolyMod) -> Factorization {
    assert_eq!(u.power(), 1, "factorization lives over F_p");
    assert!(u.is_monic() && u.degree() >= 1, "factor expects a monic non-constant input");
    let table = irreducible_table(u.p, u.degree() / 2);
    let mut rest = u.clone();
    let mut factors = Vec::new();
    for g in table.iter() {
        if 2 * g.degree() > rest.degree() {
            break;
        }
        let mut mult = 0u32;
        loop {
            let (q, r) = div_rem(&rest, g);
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            factors.push((g.clone(), mult));
        }
        if rest.degree() == 0 {
            break;
        }
    }
    if rest.degree() >= 1 {
        factors.push((rest, 1));
    }
    Factorization { factors }
}

fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for col in 0..n - 1 {
        if m[col][col] == 0 {
            let pivot = (col + 1..n).find(|&r| m[r][col] != 0);
            match pivot {
                Some(r) => {
                    m.swap(col, r);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in col + 1..n {
            for j in col + 1..n {
                let t1 = m[col][col].checked_mul(m[i][j])?;
                let t2 = m[i][col].checked_mul(m[col][j])?;
                m[i][j] = t1.checked_sub(t2)? / prev;
            }
            m[i][col] = 0;
        }
        prev = m[col][col];
    }
    Some(sign * m[n - 1][n - 1])
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for col in 0..n - 1 {
        if m[col][col].is_zero() {
            let pivot = (col + 1..n).find(|&r| !m[r][col].is_zero());
            match pivot {
                Some(r) => {
                    m.swap(col, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in col + 1..n {
            for j in col + 1..n {
                m[i][j] = (&m[col][col] * &m[i][j] - &m[i][col] * &m[col][j]) / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
/// Runs in i128 and falls back to big integers on overflow.
pub fn integer_determinant(m: &[Vec<i128>]) -> BigInt {
    if let Some(d) = bareiss_i128(m.to_vec()) {
        return BigInt::from(d);
    }
    let big: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss_big(big)
}

/// Discriminant of a monic polynomial given mod p², reduced mod p².
///
/// Computed as (−1)^{n(n−1)/2}·Res(f, f′) on integer lifts in [0, p²); the
/// discriminant is an integer polynomial in the coefficients, so the residue
/// does not depend on the lifts.
pub fn disc_mod(f: &PolyMod) -> ResidueInt {
    assert_eq!(f.power(), 2, "discriminant is queried mod p^2");
    assert!(f.is_monic(), "discriminant expects a monic input");
    let n = f.degree();
    assert!(n >= 2, "discriminant needs degree >= 2");
    let m2 = f.modulus() as i128;

    let fc: Vec<i128> = f.coeffs.iter().map(|&c| c as i128).collect();
    // Formal derivative of degree n − 1, taken over the integers.
    let dc: Vec<i128> = (1..=n).map(|i| i as i128 * fc[i]).collect();

    // Sylvester matrix of (f, f') with rows highest-degree first.
    let size = 2 * n - 1;
    let mut mat = vec![vec![0i128; size]; size];
    for (row, mrow) in mat.iter_mut().take(n - 1).enumerate() {
        for (j, &c) in fc.iter().rev().enumerate() {
            mrow[row + j] = c;
        }
    }
    for (row, mrow) in mat.iter_mut().skip(n - 1).enumerate() {
        for (j, &c) in dc.iter().rev().enumerate() {
            mrow[row + j] = c;
        }
    }

    let res = integer_determinant(&mat);
    let signed = if (n * (n - 1) / 2) % 2 == 1 { -res } else { res };
    let reduced = ((signed % m2) + m2) % m2;
    let value = reduced.to_u64_digits().1.first().copied().unwrap_or(0);
    debug_assert!(!reduced.is_negative());
    ResidueInt::new(value, f.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, coeffs: &[u64]) -> PolyMod {
        PolyMod::new(p, 1, coeffs)
    }

    fn fp2(p: u64, coeffs: &[u64]) -> PolyMod {
        PolyMod::new(p, 2, coeffs)
    }

    #[test]
    fn mul_basics() {
        // (x+1)(x+1) over F_2 = x^2 + 1
        let a = fp(2, &[1, 1]);
        assert_eq!(poly_mul(&a, &a).unwrap(), fp(2, &[1, 0, 1]));
        // (x+1)(x+2) over F_3 = x^2 + 2
        let b = poly_mul(&fp(3, &[1, 1]), &fp(3, &[2, 1])).unwrap();
        assert_eq!(b, fp(3, &[2, 0, 1]));
        // (x+3)(x+3) over Z/9 = x^2 + 6x
        let c = poly_mul(&fp2(3, &[3, 1]), &fp2(3, &[3, 1])).unwrap();
        assert_eq!(c, fp2(3, &[0, 6, 1]));
    }

    #[test]
    fn mul_modulus_mismatch() {
        let err = poly_mul(&fp(3, &[1, 1]), &fp(5, &[1, 1])).unwrap_err();
        assert_eq!(err, PolyError::ModulusMismatch { left: 3, right: 5 });
    }

    #[test]
    fn squarefree_cases() {
        assert!(is_squarefree(&fp(2, &[1, 1, 1]))); // x^2+x+1
        assert!(!is_squarefree(&fp(2, &[1, 0, 1]))); // (x+1)^2
        assert!(!is_squarefree(&fp(3, &[0, 0, 0, 1]))); // x^3, zero derivative
    }

    #[test]
    fn mobius_cases() {
        assert_eq!(mobius(&fp(3, &[0, 1])), -1); // x
        assert_eq!(mobius(&fp(3, &[2, 0, 1])), 1); // x^2-1 = (x+1)(x+2)
        assert_eq!(mobius(&fp(3, &[0, 0, 1])), 0); // x^2
    }

    #[test]
    fn factor_cases() {
        let f = factor(&fp(3, &[1, 0, 1])); // x^2+1 irreducible over F_3
        assert_eq!(f.factors, vec![(fp(3, &[1, 0, 1]), 1)]);
        let f = factor(&fp(2, &[1, 0, 1])); // x^2+1 = (x+1)^2 over F_2
        assert_eq!(f.factors, vec![(fp(2, &[1, 1]), 2)]);
        let f = factor(&fp(3, &[0, 2, 0, 1])); // x^3 - x = x(x+1)(x+2)
        assert_eq!(
            f.factors,
            vec![(fp(3, &[0, 1]), 1), (fp(3, &[1, 1]), 1), (fp(3, &[2, 1]), 1)]
        );
    }

    #[test]
    fn factor_reassembles_and_flags_multiplicity() {
        for p in [2u64, 3, 5, 7] {
            for d in 1..=6usize {
                for u in monic_polys(p, d) {
                    let f = factor(&u);
                    assert_eq!(f.reassemble(), u, "reassembly failed for {u:?}");
                    let all_simple = f.factors.iter().all(|(_, e)| *e == 1);
                    assert_eq!(all_simple, is_squarefree(&u));
                    assert_eq!(mobius(&u) != 0, is_squarefree(&u));
                }
            }
        }
    }

    #[test]
    fn disc_quadratic_and_cubic() {
        // x^2+x+1 mod 4: a1^2 - 4a2 = -3 = 1 mod 4
        assert_eq!(disc_mod(&fp2(2, &[1, 1, 1])).value, 1);
        // x^3-x mod 9: -4a^3 - 27b^2 with a=-1,b=0 gives 4
        assert_eq!(disc_mod(&fp2(3, &[0, 8, 0, 1])).value, 4);
        // x^2 mod 9: repeated root
        assert_eq!(disc_mod(&fp2(3, &[0, 0, 1])).value, 0);
    }

    #[test]
    fn disc_matches_closed_forms_exhaustively() {
        // Degree 2: disc = a1^2 - 4 a2; degree 3: standard closed form.
        for p in [2u64, 3, 5] {
            let m = p * p;
            for a1 in 0..m {
                for a2 in 0..m {
                    let f = PolyMod::new(p, 2, &[a2, a1, 1]);
                    let expect = ((a1 * a1 % m) + 3 * m - 4 * a2 % m) % m;
                    assert_eq!(disc_mod(&f).value, expect);
                }
            }
        }
        // Degree 3 via the full formula, exhaustively mod p².
        for p in [2u64, 3, 5] {
            let m = (p * p) as i128;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        let f = PolyMod::new(p, 2, &[c as u64, b as u64, a as u64, 1]);
                        // disc(x^3+ax^2+bx+c) = 18abc - 4a^3c + a^2b^2 - 4b^3 - 27c^2
                        let v = 18 * a * b * c - 4 * a * a * a * c + a * a * b * b
                            - 4 * b * b * b
                            - 27 * c * c;
                        let expect = ((v % m) + m) % m;
                        assert_eq!(disc_mod(&f).value as i128, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn disc_split_polynomials_match_root_products() {
        // For f = prod (x - r_i) with distinct roots over F_p, the
        // discriminant reduces to prod_{i<j} (r_i - r_j)^2 mod p.
        for p in [3u64, 5, 7] {
            let roots: Vec<u64> = (0..3.min(p)).collect();
            let mut f = PolyMod::one(p, 2);
            for &r in &roots {
                f = poly_mul(&f, &PolyMod::x_plus(p, 2, (p * p - r) % (p * p))).unwrap();
            }
            let mut expect = 1u64;
            for i in 0..roots.len() {
                for j in 0..i {
                    let d = (p + roots[i] - roots[j]) % p;
                    expect = expect * (d * d % p) % p;
                }
            }
            assert_eq!(disc_mod(&f).value % p, expect % p);
        }
    }

    #[test]
    fn determinant_falls_back_to_big_integers() {
        // Entries large enough that Bareiss cross-multiplication overflows
        // i128 and the arbitrary-precision path must take over.
        let big = i128::MAX / 3;
        let m = vec![
            vec![big, 1, 0],
            vec![1, big, 1],
            vec![0, 1, big],
        ];
        let b = BigInt::from(big);
        let expect = &b * (&b * &b - 1) - &b;
        assert_eq!(integer_determinant(&m), expect);
        // Sign tracking under a forced pivot swap.
        let m = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(integer_determinant(&m), BigInt::from(-1));
    }

    #[test]
    fn division_round_trip() {
        for p in [2u64, 3, 5] {
            for d in 1..=3usize {
                for u in monic_polys(p, d) {
                    for v in monic_polys(p, 2) {
                        let (q, r) = div_rem(&v, &u);
                        let back = poly_mul(&q, &u).unwrap().add(&r);
                        assert_eq!(back, v);
                        assert!(r.is_zero() || r.degree() < u.degree());
                    }
                }
            }
        }
    }
}
