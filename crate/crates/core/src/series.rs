//! Truncated power series over Q(ζ_m) and the generating series
//! L_ρ(T) = Σ_u ρ(u) T^{deg u} over monic polynomials.
//!
//! Closed forms for L_{χ∘ψ} exist for every homomorphism in play; the brute
//! enumeration below recomputes them term by term and exists purely to check
//! the closed forms.

use num_traits::One;

use crate::characters::{hom_eval, Character, HomTag};
use crate::cyclotomic::{cyclo_mul, root_of_unity, CycloNum};
use crate::fp_poly::monic_polys;
use crate::Rat;

/// Errors raised by series arithmetic and L-series construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    NonUnitConstantTerm,
    Incompatible,
    /// The (tag, character) combination has no closed form.
    UnsupportedCombination,
    BudgetExceeded { required: u64 },
}

impl std::fmt::Display for SeriesError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesError::NonUnitConstantTerm => {
                write!(f, "series reciprocal needs constant term 1")
            }
            SeriesError::Incompatible => write!(f, "series conductor or truncation mismatch"),
            SeriesError::UnsupportedCombination => {
                write!(f, "unsupported (tag, character) combination")
            }
            SeriesError::BudgetExceeded { required } => {
                write!(f, "brute-force budget exceeded: needs {required} polynomials")
            }
        }
    }
}

impl std::error::Error for SeriesError {}

/// Power series truncated at a fixed degree, coefficients in Q(ζ_m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    conductor: u64,
    trunc: usize,
    coeffs: Vec<CycloNum>,
}

impl TruncSeries {
    pub fn zero(conductor: u64, trunc: usize) -> Self {
        TruncSeries {
            conductor,
            trunc,
            coeffs: vec![CycloNum::zero(conductor); trunc + 1],
        }
    }

    pub fn one(conductor: u64, trunc: usize) -> Self {
        let mut s = Self::zero(conductor, trunc);
        s.coeffs[0] = CycloNum::one(conductor);
        s
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, k: usize) -> &CycloNum {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, v: CycloNum) {
        assert_eq!(v.conductor(), self.conductor);
        self.coeffs[k] = v;
    }

    fn check(&self, other: &TruncSeries) -> Result<(), SeriesError> {
        if self.conductor == other.conductor && self.trunc == other.trunc {
            Ok(())
        } else {
            Err(SeriesError::Incompatible)
        }
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b).unwrap())
            .collect();
        Ok(TruncSeries { conductor: self.conductor, trunc: self.trunc, coeffs })
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.check(other)?;
        let mut out = TruncSeries::zero(self.conductor, self.trunc);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > self.trunc {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                let t = cyclo_mul(a, b).map_err(|_| SeriesError::Incompatible)?;
                out.coeffs[i + j] = out.coeffs[i + j].add(&t).unwrap();
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; the constant term must be exactly 1.
    pub fn recip(&self) -> Result<TruncSeries, SeriesError> {
        if self.coeffs[0] != CycloNum::one(self.conductor) {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let mut out = TruncSeries::zero(self.conductor, self.trunc);
        out.coeffs[0] = CycloNum::one(self.conductor);
        for k in 1..=self.trunc {
            let mut acc = CycloNum::zero(self.conductor);
            for j in 1..=k {
                if self.coeffs[j].is_zero() || out.coeffs[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&cyclo_mul(&self.coeffs[j], &out.coeffs[k - j]).unwrap()).unwrap();
            }
            out.coeffs[k] = acc.neg();
        }
        Ok(out)
    }

    /// Substitution T ↦ z T²: coefficient k moves to degree 2k scaled by z^k;
    /// degrees beyond the truncation are dropped.
    pub fn subst_zt2(&self, z: &Rat) -> TruncSeries {
        let mut out = TruncSeries::zero(self.conductor, self.trunc);
        let mut zk = Rat::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if 2 * k > self.trunc {
                break;
            }
            if !c.is_zero() {
                out.coeffs[2 * k] = c.scale(&zk);
            }
            zk *= z;
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> TruncSeries {
        TruncSeries {
            conductor: self.conductor,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }
}

/// Which generating series to build: the all-one series over the full or
/// unit (x ∤ u) domain, or χ∘ψ for a tagged homomorphism ψ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LSeriesTag {
    AllOne,
    AllOneUnitDomain,
    Hom(HomTag),
}

impl LSeriesTag {
    fn unit_domain(&self) -> bool {
        match self {
            LSeriesTag::AllOne => false,
            LSeriesTag::AllOneUnitDomain => true,
            LSeriesTag::Hom(t) => t.unit_domain(),
        }
    }
}

/// Geometric series (1 − pT)⁻¹ = Σ p^k T^k, embedded at the conductor.
fn all_one_series(conductor: u64, p: u64, trunc: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(conductor, trunc);
    let mut v = Rat::one();
    for k in 0..=trunc {
        s.coeffs[k] = CycloNum::from_rational(conductor, v.clone());
        v *= Rat::from_integer(p.into());
    }
    s
}

/// (1 − T)/(1 − pT) = 1 + Σ_{k≥1} (p^k − p^{k−1}) T^k, counting monic
/// polynomials prime to x.
fn all_one_unit_series(conductor: u64, p: u64, trunc: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(conductor, trunc);
    s.coeffs[0] = CycloNum::one(conductor);
    let p_rat = Rat::from_integer(p.into());
    let mut prev = Rat::one();
    for k in 1..=trunc {
        let cur = &prev * &p_rat;
        s.coeffs[k] = CycloNum::from_rational(conductor, &cur - &prev);
        prev = cur;
    }
    s
}

/// The closed form of L_{χ∘ψ}(T), truncated.
///
/// A trivial character routes to the all-one series over the tag's domain;
/// for nontrivial χ the per-homomorphism closed forms are 1 (Phi1, Ev0),
/// 1 + C_χ T (Phi2), and 1 − T (Phi1 on the unit domain).
pub fn l_series_closed(
    tag: LSeriesTag,
    chi: &Character,
    p: u64,
    trunc: usize,
) -> Result<TruncSeries, SeriesError> {
    let m = chi.group().exponent();
    if chi.is_trivial() {
        return Ok(if tag.unit_domain() {
            all_one_unit_series(m, p, trunc)
        } else {
            all_one_series(m, p, trunc)
        });
    }
    let hom = match tag {
        LSeriesTag::Hom(t) => t,
        _ => return Err(SeriesError::UnsupportedCombination),
    };
    if chi.group() != hom.target(p) {
        return Err(SeriesError::UnsupportedCombination);
    }
    let mut s = TruncSeries::one(m, trunc);
    match hom {
        HomTag::Phi1 | HomTag::Ev0 => {}
        HomTag::Phi2 => {
            if trunc >= 1 {
                s.set_coeff(1, crate::characters::c_chi(chi));
            }
        }
        HomTag::Phi1UnitDomain => {
            if trunc >= 1 {
                s.set_coeff(1, CycloNum::from_rational(m, -Rat::one()));
            }
        }
    }
    Ok(s)
}

const BRUTE_BUDGET: u64 = 10_000_000;

/// L_{χ∘ψ}(T) by literal enumeration of monic polynomials, degree by degree.
/// Only used to verify the closed forms.
pub fn l_series_brute(
    tag: LSeriesTag,
    chi: &Character,
    p: u64,
    trunc: usize,
) -> Result<TruncSeries, SeriesError> {
    let required = p.pow(trunc as u32);
    if required > BRUTE_BUDGET {
        return Err(SeriesError::BudgetExceeded { required });
    }
    let m = chi.group().exponent();
    let unit_domain = tag.unit_domain();
    let mut s = TruncSeries::zero(m, trunc);
    for d in 0..=trunc {
        let mut acc = CycloNum::zero(m);
        for u in monic_polys(p, d) {
            if unit_domain && u.eval(0) == 0 {
                continue;
            }
            let term = match tag {
                LSeriesTag::AllOne | LSeriesTag::AllOneUnitDomain => CycloNum::one(m),
                LSeriesTag::Hom(t) => {
                    let gamma = hom_eval(t, &u).expect("domain already filtered");
                    chi.eval(&gamma).map_err(|_| SeriesError::UnsupportedCombination)?
                }
            };
            acc = acc.add(&term).unwrap();
        }
        s.set_coeff(d, acc);
    }
    Ok(s)
}

/// The truncated expansion of γ²/(1 + γT) = Σ_k (−1)^k γ^{k+2} T^k for a
/// root of unity γ = ζ_m^e, the per-root factor of the valuation-1 formula.
pub fn linear_factor_series(m: u64, e: u64, trunc: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(m, trunc);
    for k in 0..=trunc {
        let mut term = root_of_unity(m, (e as i64) * (k as i64 + 2));
        if k % 2 == 1 {
            term = term.neg();
        }
        s.set_coeff(k, term);
    }
    s
}
