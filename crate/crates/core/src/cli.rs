//! Command-line front end: JSON documents in, certificates out.

use std::fs;
use std::io::Read;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::certificate::{audit, to_pretty, BodyDoc, Certificate, Document, Payload, SCHEMA_VERSION};
use crate::certify;
use crate::convex::SymmetricPolytope;
use crate::error::{Error, Result};
use crate::group::FiniteSet;
use crate::john::JohnOptions;
use crate::lattice::Lattice;
use crate::progression::{CosetProgression, DEFAULT_CAP};
use crate::random;
use crate::scalar::{parse_rational, Rational};
use crate::structure::StructureOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Properize,
    John,
    JohnOuter,
    DiscreteJohn,
    Cover,
    Coalesce,
    SumsetStructure,
    Sarkozy,
    Verify,
    DemoCounterexample,
}

#[derive(Debug, Parser)]
#[command(name = "progjohn", version, about = "John-type theorems for progressions and sumsets, with certificates")]
pub struct Args {
    pub command: Command,
    /// Dilation parameter (integer or p/q).
    #[arg(long, default_value = "1")]
    pub t: String,
    /// Number of summands.
    #[arg(long)]
    pub l: Option<u64>,
    /// Target dimension for sumset-structure.
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// N for demo-counterexample.
    #[arg(long, default_value_t = 6)]
    pub n: u64,
    /// Largest set the run may materialize.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = 8)]
    pub retry_limit: usize,
    /// Generate a random input from this seed when --in is absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Input document (standard input when absent).
    #[arg(long = "in")]
    pub input: Option<String>,
    /// Write the output here instead of standard output.
    #[arg(long)]
    pub out: Option<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } | Error::RetryLimit(_) | Error::DimensionLimit { .. } => EXIT_CAP,
        Error::Parse(_) => EXIT_PARSE,
        Error::Audit(_) => EXIT_AUDIT,
        _ => EXIT_HYPOTHESIS,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::GroupMismatch => "group_mismatch",
        Error::CapExceeded { .. } => "cap_exceeded",
        Error::Precondition(_) => "precondition",
        Error::HypothesisNotMet(_) => "hypothesis_not_met",
        Error::Degenerate(_) => "degenerate",
        Error::NotPrimitive(_) => "not_primitive",
        Error::DimensionLimit { .. } => "dimension_limit",
        Error::RetryLimit(_) => "retry_limit",
        Error::Parse(_) => "parse",
        Error::Audit(_) => "audit",
    }
}

/// Runs one command. Returns the exit code and the JSON text for standard
/// output (empty when it went to `--out`).
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let (code, text) = match execute(&args) {
        Ok(pair) => pair,
        Err(e) => {
            let body = json!({"version": SCHEMA_VERSION, "error": {"kind": error_kind(&e), "message": e.to_string()}});
            (exit_code(&e), to_pretty(&body))
        }
    };
    match &args.out {
        Some(path) if code == EXIT_OK || code == EXIT_AUDIT => match fs::write(path, &text) {
            Ok(()) => (code, String::new()),
            Err(e) => (EXIT_PARSE, format!("cannot write {path}: {e}\n")),
        },
        _ => (code, text),
    }
}

fn read_input(args: &Args) -> Result<String> {
    match &args.input {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}"))),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(s)
        }
    }
}

fn rng(args: &Args) -> Option<ChaCha8Rng> {
    match (&args.input, args.seed) {
        (None, Some(seed)) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    }
}

fn progression_input(args: &Args) -> Result<CosetProgression> {
    if let Some(mut r) = rng(args) {
        let shape = random::Shape { max_rank: 2, max_dim: 3, max_size: 2_000, ..Default::default() };
        return Ok(random::progression(&mut r, &shape));
    }
    match Document::parse(&read_input(args)?)?.payload {
        Payload::Progression(p) => p.to_progression(args.cap),
        _ => Err(Error::Parse("expected a progression document".into())),
    }
}

fn set_input(args: &Args) -> Result<FiniteSet> {
    if let Some(mut r) = rng(args) {
        let m = r.gen_range(5..=30);
        let size = r.gen_range(1..=5);
        return Ok(random::cyclic_subset(&mut r, m, size));
    }
    match Document::parse(&read_input(args)?)?.payload {
        Payload::Set(s) => s.to_set(),
        _ => Err(Error::Parse("expected a set document".into())),
    }
}

fn body_input(args: &Args) -> Result<(SymmetricPolytope<Rational>, Lattice<Rational>)> {
    if let Some(mut r) = rng(args) {
        let d = r.gen_range(1..=2);
        return Ok(random::body(&mut r, d));
    }
    match Document::parse(&read_input(args)?)?.payload {
        Payload::Body(b) => b.to_body(),
        _ => Err(Error::Parse("expected a body document".into())),
    }
}

fn require_l(args: &Args) -> Result<u64> {
    match args.l {
        Some(l) if l >= 1 => Ok(l),
        Some(_) => Err(Error::pre("--l must be at least 1")),
        None => Err(Error::Parse("--l is required for this command".into())),
    }
}

fn execute(args: &Args) -> Result<(i32, String)> {
    let t = parse_rational(&args.t).filter(|t| *t > Rational::from_integer(0.into())).ok_or_else(|| Error::Parse(format!("--t must be a positive rational, got {:?}", args.t)))?;
    let cap = args.cap;
    let john_opts = JohnOptions { cap, verify: true, retry_limit: args.retry_limit };
    let cert: Certificate = match args.command {
        Command::Verify => {
            let cert = Certificate::parse(&read_input(args)?)?;
            let report = audit(&cert, cap);
            let code = if report.holds { EXIT_OK } else { EXIT_AUDIT };
            return Ok((code, to_pretty(&report)));
        }
        Command::Properize => certify::properize(&crate::john::gap_john_outer(&progression_input(args)?, &t, &john_opts)?, cap)?,
        Command::John => certify::john(&crate::john::gap_john(&progression_input(args)?, &t, &john_opts)?, cap)?,
        Command::JohnOuter => certify::john_outer(&crate::john::gap_john_outer(&progression_input(args)?, &t, &john_opts)?, cap)?,
        Command::DiscreteJohn => {
            let (body, lattice) = body_input(args)?;
            let dj = crate::john::discrete_john(&body, &lattice, cap)?;
            let mut c = certify::discrete_john(&body, &lattice, &dj)?;
            c.param("input", BodyDoc::of(&body, &lattice));
            c
        }
        Command::Cover => {
            let p = progression_input(args)?;
            let cov = crate::covering::doubling_cover(&p, &t, cap)?;
            certify::cover(&p, &t, &cov)
        }
        Command::Coalesce => {
            let l = require_l(args)?;
            let p = progression_input(args)?;
            certify::coalesce(&crate::coalescence::coalesce(&p, l, &john_opts)?)
        }
        Command::SumsetStructure => {
            let l = require_l(args)?;
            let a = set_input(args)?;
            let opts = StructureOptions { john: john_opts, ..Default::default() };
            certify::sumset_structure(&a, &crate::structure::iterated_structure(&a, l, args.d, &opts)?)
        }
        Command::Sarkozy => {
            let l = require_l(args)?;
            let a = set_input(args)?;
            certify::sarkozy(&a, l, &crate::structure::sarkozy_check(&a, l, cap)?)
        }
        Command::DemoCounterexample => certify::demo_counterexample(&crate::structure::demo_counterexample(args.n, cap)?, cap)?,
    };
    let mut cert = cert;
    cert.param("cap", cap);
    // Nothing is emitted that the oracle cannot re-check under the same cap.
    let report = crate::certificate::audit_strict(&cert, cap)?;
    if !report.holds {
        let bad: Vec<&str> = report.reports.iter().filter(|r| !r.holds).map(|r| r.claim.as_str()).collect();
        return Err(Error::Audit(format!("self-audit rejected claims {bad:?}")));
    }
    if let Some(seed) = args.seed.filter(|_| args.input.is_none()) {
        cert.param("seed", seed);
    }
    Ok((EXIT_OK, cert.to_json()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str, text: &str) -> String {
        let dir = std::env::temp_dir().join(format!("progjohn-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    }

    const P12: &str = r#"{"version": 1, "progression": {"group": {"free_rank": 1}, "dims": ["1", "1"], "steps": [[1], [2]]}}"#;

    #[test]
    fn properize_example() {
        let path = tmp("p12.json", P12);
        let (code, out) = run(["progjohn", "properize", "--t", "1", "--in", &path]);
        assert_eq!(code, 0, "{out}");
        let cert = Certificate::parse(&out).unwrap();
        assert!(cert.result["rank_out"].as_u64().unwrap() <= 1);
        let cpath = tmp("p12.cert.json", &out);
        let (code, report) = run(["progjohn", "verify", "--in", &cpath]);
        assert_eq!(code, 0, "{report}");
    }

    #[test]
    fn sarkozy_example() {
        let path = tmp("z5.json", r#"{"version": 1, "set": {"group": {"free_rank": 0, "moduli": [5]}, "elements": [[0], [1]]}}"#);
        let (code, out) = run(["progjohn", "sarkozy", "--l", "4", "--in", &path]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(Certificate::parse(&out).unwrap().result["holds"], json!(true));
    }

    #[test]
    fn corrupted_cover_fails_verify() {
        let path = tmp("p1.json", r#"{"version": 1, "progression": {"group": {"free_rank": 1}, "dims": ["1"], "steps": [[1]]}}"#);
        let (code, out) = run(["progjohn", "cover", "--t", "3", "--in", &path]);
        assert_eq!(code, 0);
        let mut cert = Certificate::parse(&out).unwrap();
        if let Some(crate::certificate::Object::Set(s)) = cert.objects.get_mut("bases") {
            s.elements.remove(0);
        }
        let cpath = tmp("bad.json", &cert.to_json());
        let (code, report) = run(["progjohn", "verify", "--in", &cpath]);
        assert_eq!(code, EXIT_AUDIT);
        assert!(report.contains("counterexample"));
    }

    #[test]
    fn exit_codes() {
        let bad = tmp("bad.txt", "{");
        assert_eq!(run(["progjohn", "john", "--in", &bad]).0, EXIT_PARSE);
        assert_eq!(run(["progjohn", "nonsense"]).0, EXIT_PARSE);
        assert_eq!(run(["progjohn", "demo-counterexample", "--n", "5"]).0, EXIT_HYPOTHESIS);
        let path = tmp("p12b.json", P12);
        assert_eq!(run(["progjohn", "john", "--cap", "2", "--in", &path]).0, EXIT_CAP);
        assert_eq!(run(["progjohn", "coalesce", "--in", &path]).0, EXIT_PARSE);
    }

    #[test]
    fn seeded_runs_are_byte_stable() {
        for cmd in ["john", "cover", "sarkozy", "discrete-john"] {
            let a = run(["progjohn", cmd, "--seed", "7", "--l", "6"]);
            let b = run(["progjohn", cmd, "--seed", "7", "--l", "6"]);
            assert_eq!(a, b);
        }
    }
}
