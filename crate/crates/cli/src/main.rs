//! Command-line front end: exact density queries, three-way
//! cross-verification runs, and Euler-product constants.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid flags,
//! 3 enumeration budget exceeded, 4 internal invariant violation.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use padic_density::closed_forms::{closed_density, SigmaFamily};
use padic_density::engine::{engine_density, EngineError};
use padic_density::euler::{euler_constant, primes_up_to, DensityKind, EulerSet};
use padic_density::oracle::{enumerate_density, OracleError, DEFAULT_BUDGET};
use padic_density::verify::{run_entry, sweep, VerifyError, FAMILY_KINDS};
use padic_density::{DensityResult, Rat};

const EXIT_MISMATCH: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_BUDGET: i32 = 3;
const EXIT_INTERNAL: i32 = 4;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => {}
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            std::process::exit(code);
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

fn usage_err(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::NotRational => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Engine(e) => e.into(),
            VerifyError::Oracle(e) => e.into(),
        }
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(usage_err(USAGE.trim()));
    };
    let flags = Flags::parse(&args[1..])?;
    match command.as_str() {
        "density" => cmd_density(&flags),
        "verify" => cmd_verify(&flags),
        "euler" => cmd_euler(&flags),
        "--help" | "-h" | "help" => {
            println!("{}", USAGE.trim());
            Ok(())
        }
        other => Err(usage_err(format!("unknown command {other}\n{}", USAGE.trim()))),
    }
}

const USAGE: &str = "
usage: padic-density <command> [flags]

commands:
  density   exact densities of one family at one (p, n)
            --family {all|a1|a1a2|an-unit|an-fixed|a1-an-unit|unit-unit-1n|unit-unit-n1n}
            --p <prime> --n <degree> [--b1 N] [--b2 N] [--bn N]
            [--method {closed|engine|oracle}] [--format {json|csv}]
            [--budget N] [--deterministic]
  verify    cross-check closed = engine = oracle over a grid
            [--pmax P] [--nmax N] [--budget N] [--families a,b,...]
  euler     Euler-product constant over the local densities
            --set {const|1const|n1const} --kind {sqf|max} --n <degree>
            --bound <prime bound> [--format {json|csv}] [--deterministic]

The enumeration budget defaults to 20000000 polynomials; the PADIC_BUDGET
environment variable overrides it, and --budget overrides both.
";

#[derive(Default)]
struct Flags {
    values: BTreeMap<String, String>,
    deterministic: bool,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, CliError> {
        let mut flags = Flags::default();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(usage_err(format!("unexpected argument {arg}")));
            };
            if name == "deterministic" {
                flags.deterministic = true;
                continue;
            }
            let Some(value) = it.next() else {
                return Err(usage_err(format!("flag --{name} needs a value")));
            };
            flags.values.insert(name.to_string(), value.clone());
        }
        Ok(flags)
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| usage_err(format!("invalid value for --{name}: {raw}"))),
        }
    }

    fn required<T: std::str::FromStr>(&self, name: &str) -> Result<T, CliError> {
        self.parsed(name)?.ok_or_else(|| usage_err(format!("missing required flag --{name}")))
    }
}

fn budget_from(flags: &Flags) -> Result<u64, CliError> {
    if let Some(b) = flags.parsed::<u64>("budget")? {
        return Ok(b);
    }
    match std::env::var("PADIC_BUDGET") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| usage_err(format!("invalid PADIC_BUDGET value {raw}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// One density query, as serialized to stdout.
#[derive(Serialize, Deserialize)]
struct QueryRecord {
    command: String,
    family: String,
    p: u64,
    n: usize,
    params: BTreeMap<String, u64>,
    method: String,
    p0_sqf: String,
    p1_sqf: String,
    p_sqf: String,
    p_max: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
}

impl QueryRecord {
    fn new(
        family: &SigmaFamily,
        p: u64,
        n: usize,
        method: &str,
        result: &DensityResult,
        timing_ms: Option<f64>,
    ) -> QueryRecord {
        QueryRecord {
            command: "density".into(),
            family: family.cli_name().into(),
            p,
            n,
            params: family
                .reduced_params(p)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            method: method.into(),
            p0_sqf: format_rat(&result.p0_sqf),
            p1_sqf: format_rat(&result.p1_sqf),
            p_sqf: format_rat(&result.p_sqf),
            p_max: format_rat(&result.p_max),
            timing_ms,
        }
    }

    fn params_csv(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn to_csv(&self) -> String {
        let mut header = "command,family,p,n,params,method,p0_sqf,p1_sqf,p_sqf,p_max".to_string();
        let mut row = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.command,
            self.family,
            self.p,
            self.n,
            self.params_csv(),
            self.method,
            self.p0_sqf,
            self.p1_sqf,
            self.p_sqf,
            self.p_max
        );
        if let Some(t) = self.timing_ms {
            header.push_str(",timing_ms");
            row.push_str(&format!(",{t}"));
        }
        format!("{header}\n{row}")
    }
}

fn cmd_density(flags: &Flags) -> Result<(), CliError> {
    let family_name: String = flags.required("family")?;
    let p: u64 = flags.required("p")?;
    let n: usize = flags.required("n")?;
    let family = SigmaFamily::from_flags(
        &family_name,
        flags.parsed("b1")?,
        flags.parsed("b2")?,
        flags.parsed("bn")?,
    )
    .map_err(usage_err)?;
    let method = flags.get("method").unwrap_or("closed");
    let budget = budget_from(flags)?;
    let start = Instant::now();
    let result = match method {
        "closed" => closed_density(&family, p, n)?,
        "engine" => engine_density(&family, p, n)?,
        "oracle" => enumerate_density(&family, p, n, budget)?,
        other => return Err(usage_err(format!("unknown method {other}"))),
    };
    let timing = (!flags.deterministic).then(|| start.elapsed().as_secs_f64() * 1e3);
    let record = QueryRecord::new(&family, p, n, method, &result, timing);
    match flags.get("format").unwrap_or("json") {
        "json" => println!("{}", serde_json::to_string(&record).expect("record serializes")),
        "csv" => println!("{}", record.to_csv()),
        other => return Err(usage_err(format!("unknown format {other}"))),
    }
    Ok(())
}

fn describe(result: &DensityResult) -> String {
    format!(
        "p0_sqf={} p1_sqf={} p_sqf={} p_max={}",
        format_rat(&result.p0_sqf),
        format_rat(&result.p1_sqf),
        format_rat(&result.p_sqf),
        format_rat(&result.p_max)
    )
}

fn cmd_verify(flags: &Flags) -> Result<(), CliError> {
    let pmax: u64 = flags.parsed("pmax")?.unwrap_or(3);
    let nmax: usize = flags.parsed("nmax")?.unwrap_or(4);
    let budget = budget_from(flags)?;
    let kinds: Vec<String> = match flags.get("families") {
        None => FAMILY_KINDS.iter().map(|s| s.to_string()).collect(),
        Some(raw) => raw.split(',').map(|s| s.trim().to_string()).collect(),
    };
    for kind in &kinds {
        if !FAMILY_KINDS.contains(&kind.as_str()) {
            return Err(usage_err(format!("unknown family kind {kind}")));
        }
    }
    // Self-test hook: flipping one oracle count must trip the mismatch path.
    let mut inject_fault = std::env::var("PADIC_INJECT_FAULT").is_ok();
    let mut rows = 0u64;
    for p in primes_up_to(pmax) {
        for n in 2..=nmax {
            for kind in &kinds {
                for family in sweep(kind, p) {
                    if n < family.min_degree() {
                        continue;
                    }
                    let mut entry = run_entry(&family, p, n, Some(budget))?;
                    if inject_fault {
                        if let Some(oracle) = entry.oracle.as_mut() {
                            oracle.p_max = &oracle.p_max * Rat::new(1.into(), 2.into());
                            inject_fault = false;
                        }
                    }
                    rows += 1;
                    let params = family
                        .reduced_params(p)
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    if entry.consistent() {
                        println!(
                            "OK family={} p={} n={} params=[{}] closed=engine=oracle {}",
                            family.cli_name(),
                            p,
                            n,
                            params,
                            describe(&entry.closed)
                        );
                    } else {
                        println!(
                            "MISMATCH family={} p={} n={} params=[{}]",
                            family.cli_name(),
                            p,
                            n,
                            params
                        );
                        println!("  closed: {}", describe(&entry.closed));
                        println!("  engine: {}", describe(&entry.engine));
                        if let Some(oracle) = &entry.oracle {
                            println!("  oracle: {}", describe(oracle));
                        }
                        std::process::exit(EXIT_MISMATCH);
                    }
                }
            }
        }
    }
    println!("verified {rows} tuples: closed = engine = oracle");
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct EulerRecord {
    command: String,
    set: String,
    kind: String,
    n: usize,
    prime_bound: u64,
    value: String,
    lower: String,
    upper: String,
    factor_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
}

fn cmd_euler(flags: &Flags) -> Result<(), CliError> {
    let set = EulerSet::from_cli_name(flags.get("set").unwrap_or("const")).map_err(usage_err)?;
    let kind = DensityKind::from_cli_name(flags.get("kind").unwrap_or("sqf")).map_err(usage_err)?;
    let n: usize = flags.required("n")?;
    let bound: u64 = flags.required("bound")?;
    let start = Instant::now();
    let result = euler_constant(set, kind, n, bound)?;
    let timing = (!flags.deterministic).then(|| start.elapsed().as_secs_f64() * 1e3);
    let record = EulerRecord {
        command: "euler".into(),
        set: set.cli_name().into(),
        kind: kind.cli_name().into(),
        n,
        prime_bound: bound,
        value: result.value.to_decimal_string(),
        lower: result.lower.to_decimal_string(),
        upper: result.upper.to_decimal_string(),
        factor_count: result.factor_count,
        timing_ms: timing,
    };
    match flags.get("format").unwrap_or("json") {
        "json" => println!("{}", serde_json::to_string(&record).expect("record serializes")),
        "csv" => {
            let mut header =
                "command,set,kind,n,prime_bound,value,lower,upper,factor_count".to_string();
            let mut row = format!(
                "{},{},{},{},{},{},{},{},{}",
                record.command,
                record.set,
                record.kind,
                record.n,
                record.prime_bound,
                record.value,
                record.lower,
                record.upper,
                record.factor_count
            );
            if let Some(t) = record.timing_ms {
                header.push_str(",timing_ms");
                row.push_str(&format!(",{t}"));
            }
            println!("{header}\n{row}");
        }
        other => return Err(usage_err(format!("unknown format {other}"))),
    }
    Ok(())
}
