//! Cross-verification harness: runs the closed-form, engine, and oracle
//! routes over a parameter grid and compares them for exact equality.

use crate::closed_forms::{closed_density, SigmaFamily};
use crate::engine::{engine_density, DensityResult, EngineError};
use crate::oracle::{enumerate_density, OracleError};

/// Family kinds in CLI naming, in a fixed sweep order.
pub const FAMILY_KINDS: [&str; 8] = [
    "all",
    "a1",
    "a1a2",
    "an-unit",
    "an-fixed",
    "a1-an-unit",
    "unit-unit-1n",
    "unit-unit-n1n",
];

/// Errors from any of the three routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    Engine(EngineError),
    Oracle(OracleError),
}

impl std::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyError::Engine(e) => write!(f, "{e}"),
            VerifyError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for VerifyError {}

impl From<EngineError> for VerifyError {
    fn from(e: EngineError) -> Self {
        VerifyError::Engine(e)
    }
}

impl From<OracleError> for VerifyError {
    fn from(e: OracleError) -> Self {
        VerifyError::Oracle(e)
    }
}

/// One grid cell: all routes evaluated for one (family, p, n).
#[derive(Clone, Debug)]
pub struct GridEntry {
    pub family: SigmaFamily,
    pub p: u64,
    pub n: usize,
    pub closed: DensityResult,
    pub engine: DensityResult,
    pub oracle: Option<DensityResult>,
}

impl GridEntry {
    /// True iff every computed route agrees exactly on all four densities.
    pub fn consistent(&self) -> bool {
        let eq = |a: &DensityResult, b: &DensityResult| {
            a.p0_sqf == b.p0_sqf && a.p1_sqf == b.p1_sqf && a.p_sqf == b.p_sqf && a.p_max == b.p_max
        };
        eq(&self.closed, &self.engine)
            && self.oracle.as_ref().is_none_or(|o| eq(&self.closed, o))
    }
}

/// All parameter instances of a family kind at a prime: fixed parameters
/// sweep a full residue system mod p, unit parameters sweep the units.
pub fn sweep(kind: &str, p: u64) -> Vec<SigmaFamily> {
    let res = || 0..p as i64;
    let units = || 1..p as i64;
    match kind {
        "all" => vec![SigmaFamily::All],
        "a1" => res().map(|b1| SigmaFamily::A1Fixed { b1 }).collect(),
        "a1a2" => res()
            .flat_map(|b1| res().map(move |b2| SigmaFamily::A1A2Fixed { b1, b2 }))
            .collect(),
        "an-unit" => vec![SigmaFamily::AnUnit],
        "an-fixed" => units().map(|bn| SigmaFamily::AnFixedUnit { bn }).collect(),
        "a1-an-unit" => res().map(|b1| SigmaFamily::A1FixedAnUnit { b1 }).collect(),
        "unit-unit-1n" => vec![SigmaFamily::A1UnitAnUnit],
        "unit-unit-n1n" => vec![SigmaFamily::An1UnitAnUnit],
        other => panic!("unknown family kind {other}"),
    }
}

/// Evaluates one grid cell; the oracle route is skipped when `budget` is
/// `None`.
pub fn run_entry(
    family: &SigmaFamily,
    p: u64,
    n: usize,
    budget: Option<u64>,
) -> Result<GridEntry, VerifyError> {
    let closed = closed_density(family, p, n)?;
    let engine = engine_density(family, p, n)?;
    let oracle = match budget {
        Some(b) => Some(enumerate_density(family, p, n, b)?),
        None => None,
    };
    Ok(GridEntry { family: *family, p, n, closed, engine, oracle })
}
