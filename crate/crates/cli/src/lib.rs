//! Command-line front end for `qppinv`.
//!
//! [`run`] does all the work and returns the exit status together with the
//! bytes destined for stdout and stderr, so the binary is a thin shell and
//! tests can drive the tool in-process.

use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qppinv::inversion::{
    check_qpp, degree_bound, enumerate_inverses, invert_qpp, DEFAULT_ENUMERATION_LIMIT,
};
use qppinv::lte::{self, Direction, Membership};
use qppinv::modmath::{factorize, Modulus, MAX_MODULUS};
use qppinv::oracle::{verify_two_sided, Sampling, FULL_VERIFY_LIMIT};
use qppinv::{Execution, PolyModN, Qpp};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Above this `N`, `verify` samples unless `--mode full` is given.
pub const DEFAULT_FULL_VERIFY_MAX: u64 = 10_000_000;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const FIXTURE_ENV: &str = "QPPINV_FIXTURE";

#[derive(Debug, Parser)]
#[command(name = "qppinv", version, about = "Least-degree inverses of quadratic permutation polynomials")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Run on a single thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether f1*x + f2*x^2 permutes Z_N.
    Validate(QppArgs),
    /// Compute the least degree and a particular inverse.
    Invert(QppArgs),
    /// List least-degree inverses.
    Enumerate {
        #[command(flatten)]
        qpp: QppArgs,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: u64,
    },
    /// Check that a polynomial inverts a QPP.
    Verify(VerifyArgs),
    /// Interleave or deinterleave a block of N items.
    Permute(PermuteArgs),
    /// Reproduce the LTE inverse table.
    Table {
        /// Fixture CSV; defaults to the bundled table.
        #[arg(long, env = FIXTURE_ENV)]
        fixture: Option<PathBuf>,
        /// Largest inverse set enumerated for the membership check.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        cap: u64,
    },
    /// Upper bound on the inverse degree (largest prime exponent of N).
    Bound {
        #[arg(long, value_parser = parse_modulus)]
        n: Modulus,
    },
}

#[derive(Debug, Args)]
pub struct QppArgs {
    /// Modulus, as an integer or a factorization such as 2^18*3^2*5.
    #[arg(long, value_parser = parse_modulus)]
    pub n: Modulus,
    #[arg(long)]
    pub f1: u64,
    #[arg(long)]
    pub f2: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Full,
    Sample,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON emitted by `invert` ("-" for stdin).
    #[arg(long, conflicts_with_all = ["n", "f1", "f2", "g"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = parse_modulus, requires_all = ["f1", "f2", "g"])]
    pub n: Option<Modulus>,
    #[arg(long)]
    pub f1: Option<u64>,
    #[arg(long)]
    pub f2: Option<u64>,
    /// Candidate inverse, e.g. "31*x + 290*x^2 + 232*x^3".
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PermuteArgs {
    #[arg(long, value_parser = parse_modulus)]
    pub n: Modulus,
    /// Permutation polynomial, e.g. "15*x + 58*x^2".
    #[arg(long)]
    pub poly: String,
    #[arg(long, value_enum, default_value_t = PermuteDirection::Interleave)]
    pub direction: PermuteDirection,
    /// Block file; stdin when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Treat the block as N raw bytes instead of N lines.
    #[arg(long)]
    pub bytes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PermuteDirection {
    Interleave,
    Deinterleave,
}

/// Accepts `1504` or a product of prime powers such as `2^18*3^2*5`.
pub fn parse_modulus(s: &str) -> Result<Modulus, String> {
    let mut n: u64 = 1;
    for factor in s.split(['*', 'x', '·']).map(str::trim) {
        let (base, exp) = factor.split_once('^').unwrap_or((factor, "1"));
        let base: u64 = base
            .trim()
            .parse()
            .map_err(|_| format!("not a non-negative integer: {:?}", base.trim()))?;
        let exp: u32 = exp
            .trim()
            .parse()
            .map_err(|_| format!("bad exponent: {:?}", exp.trim()))?;
        n = base
            .checked_pow(exp)
            .and_then(|p| n.checked_mul(p))
            .ok_or_else(|| format!("N exceeds 2^50 ({MAX_MODULUS})"))?;
    }
    if n < 3 {
        return Err(format!("N must be at least 3, got {n}"));
    }
    factorize(n).map_err(|e| e.to_string())
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Outcome {
    fn new(code: i32, stdout: impl Into<Vec<u8>>) -> Self {
        Outcome {
            code,
            stdout: stdout.into(),
            stderr: String::new(),
        }
    }

    fn error(code: i32, msg: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: Vec::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    pub fn stdout_str(&self) -> &str {
        std::str::from_utf8(&self.stdout).unwrap_or("")
    }
}

/// Parses `args` (program name first) and executes the request. `stdin` is
/// read only by `permute` and by `verify --input -`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::new(code, text)
            } else {
                Outcome {
                    code,
                    stdout: Vec::new(),
                    stderr: text,
                }
            };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let ctx = Ctx {
        format: cli.format,
        exec,
    };
    match cli.command {
        Command::Validate(a) => ctx.validate(&a),
        Command::Invert(a) => ctx.invert(&a),
        Command::Enumerate { qpp, limit } => ctx.enumerate(&qpp, limit),
        Command::Verify(a) => ctx.verify(&a, stdin),
        Command::Permute(a) => ctx.permute(&a, stdin),
        Command::Table { fixture, cap } => ctx.table(fixture, cap),
        Command::Bound { n } => ctx.bound(&n),
    }
}

struct Ctx {
    format: Format,
    exec: Execution,
}

#[derive(Serialize)]
struct ValidateReport {
    n: u64,
    f1: u64,
    f2: u64,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

/// What `invert` prints in JSON mode and `verify --input` reads back.
#[derive(Debug, Serialize, Deserialize)]
pub struct InvertReport {
    pub n: u64,
    pub f1: u64,
    pub f2: u64,
    pub valid: bool,
    pub normalized_changed: bool,
    pub normalized_f1: u64,
    pub normalized_f2: u64,
    pub degree: usize,
    pub bound: u32,
    pub particular: Vec<u64>,
    pub polynomial: String,
    pub count: String,
}

#[derive(Serialize)]
struct EnumerateReport {
    n: u64,
    f1: u64,
    f2: u64,
    degree: usize,
    count: String,
    limit: u64,
    truncated: bool,
    inverses: Vec<Vec<u64>>,
}

#[derive(Serialize)]
struct VerifyReport {
    n: u64,
    f: String,
    g: String,
    mode: &'static str,
    points: u64,
    verified: bool,
}

#[derive(Serialize)]
struct TableRow {
    n: u64,
    f1: u64,
    f2: u64,
    published_degree: usize,
    computed_degree: Option<usize>,
    verifies: bool,
    membership: &'static str,
    count: Option<String>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct TableSummary {
    rows: Vec<TableRow>,
    passed: usize,
    total: usize,
}

#[derive(Serialize)]
struct BoundReport {
    n: u64,
    factors: String,
    bound: u32,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn coeff_list(p: &PolyModN, degree: usize) -> Vec<u64> {
    (1..=degree).map(|k| p.coeff(k)).collect()
}

impl Ctx {
    fn emit<T: Serialize>(&self, code: i32, report: &T, text: String) -> Outcome {
        match self.format {
            Format::Json => Outcome::new(code, json(report)),
            Format::Text => Outcome::new(code, text),
        }
    }

    fn qpp(&self, a: &QppArgs) -> Result<Qpp, Outcome> {
        Qpp::new(a.n.clone(), a.f1, a.f2).map_err(|e| Outcome::error(EXIT_FAILURE, e))
    }

    fn validate(&self, a: &QppArgs) -> Outcome {
        let (valid, violation, reason) = match check_qpp(a.f1, a.f2, &a.n) {
            Ok(()) => (true, None, None),
            Err(v) => (false, Some(v.code().to_string()), Some(v.to_string())),
        };
        let text = match &reason {
            None => format!("valid: {} permutes Z_{}\n", PolyModN::quadratic(a.n.clone(), a.f1, a.f2), a.n.value()),
            Some(r) => format!("invalid: {r} [{}]\n", violation.as_deref().unwrap_or("")),
        };
        let report = ValidateReport {
            n: a.n.value(),
            f1: a.f1,
            f2: a.f2,
            valid,
            violation,
            reason,
        };
        self.emit(if valid { EXIT_OK } else { EXIT_FAILURE }, &report, text)
    }

    fn invert(&self, a: &QppArgs) -> Outcome {
        let q = match self.qpp(a) {
            Ok(q) => q,
            Err(o) => return o,
        };
        let sol = match invert_qpp(&q) {
            Ok(s) => s,
            Err(e) => return Outcome::error(EXIT_FAILURE, e),
        };
        let n = sol.modulus();
        let k = sol.degree();
        let report = InvertReport {
            n: n.value(),
            f1: a.f1,
            f2: a.f2,
            valid: true,
            normalized_changed: sol.normalization_changed(),
            normalized_f1: sol.qpp.f1(),
            normalized_f2: sol.qpp.f2(),
            degree: k,
            bound: degree_bound(n),
            particular: coeff_list(&sol.particular, k),
            polynomial: sol.particular.to_string(),
            count: sol.count.to_string(),
        };
        let mut text = format!("N = {} = {n}\n", n.value());
        text += &format!("f(x) = {}\n", sol.input.as_poly());
        if sol.normalization_changed() {
            text += &format!("normalized: inverting equivalent {}\n", sol.qpp.as_poly());
        }
        text += &format!("least inverse degree K = {k} (bound {})\n", report.bound);
        text += &format!("particular inverse g(x) = {}\n", report.polynomial);
        text += &format!("inverses of degree K: {}\n", report.count);
        self.emit(EXIT_OK, &report, text)
    }

    fn enumerate(&self, a: &QppArgs, limit: u64) -> Outcome {
        let q = match self.qpp(a) {
            Ok(q) => q,
            Err(o) => return o,
        };
        let sol = match invert_qpp(&q) {
            Ok(s) => s,
            Err(e) => return Outcome::error(EXIT_FAILURE, e),
        };
        let k = sol.degree();
        let iter = enumerate_inverses(&sol, limit);
        let truncated = iter.truncated();
        let inverses: Vec<PolyModN> = iter.collect();
        let mut text = String::new();
        for g in &inverses {
            text += &format!("{g}\n");
        }
        if truncated {
            text += &format!("(showing {} of {} inverses)\n", inverses.len(), sol.count);
        }
        let report = EnumerateReport {
            n: sol.modulus().value(),
            f1: a.f1,
            f2: a.f2,
            degree: k,
            count: sol.count.to_string(),
            limit,
            truncated,
            inverses: inverses.iter().map(|g| coeff_list(g, k)).collect(),
        };
        self.emit(EXIT_OK, &report, text)
    }

    fn verify(&self, a: &VerifyArgs, stdin: &mut dyn Read) -> Outcome {
        let (n, f, g) = match self.verify_inputs(a, stdin) {
            Ok(t) => t,
            Err(o) => return o,
        };
        let nv = n.value();
        let mode = a.mode.unwrap_or(if nv <= DEFAULT_FULL_VERIFY_MAX {
            Mode::Full
        } else {
            Mode::Sample
        });
        let (sampling, points, mode_name) = match mode {
            Mode::Full => (Sampling::Full, nv, "full"),
            Mode::Sample => (
                Sampling::Sample {
                    count: a.samples,
                    seed: a.seed,
                },
                a.samples,
                "sample",
            ),
        };
        if mode == Mode::Full && nv > FULL_VERIFY_LIMIT {
            return Outcome::error(
                EXIT_USAGE,
                format!("full verification supports N up to {FULL_VERIFY_LIMIT}; use --mode sample"),
            );
        }
        let verified = match verify_two_sided(&f, &g, sampling, self.exec) {
            Ok(v) => v,
            Err(e) => return Outcome::error(EXIT_FAILURE, e),
        };
        let report = VerifyReport {
            n: nv,
            f: f.to_string(),
            g: g.to_string(),
            mode: mode_name,
            points,
            verified,
        };
        let text = format!(
            "{}: g(f(x)) = f(g(x)) = x {} ({mode_name}, {points} points)\n",
            if verified { "verified" } else { "FAILED" },
            if verified { "holds" } else { "does not hold" },
        );
        self.emit(if verified { EXIT_OK } else { EXIT_FAILURE }, &report, text)
    }

    fn verify_inputs(
        &self,
        a: &VerifyArgs,
        stdin: &mut dyn Read,
    ) -> Result<(Modulus, PolyModN, PolyModN), Outcome> {
        if let Some(path) = &a.input {
            let text = read_source(Some(path), stdin)
                .map_err(|e| Outcome::error(EXIT_USAGE, e))
                .and_then(|b| {
                    String::from_utf8(b).map_err(|_| Outcome::error(EXIT_USAGE, "input is not UTF-8"))
                })?;
            let r: InvertReport = serde_json::from_str(&text)
                .map_err(|e| Outcome::error(EXIT_USAGE, format!("cannot read invert output: {e}")))?;
            let n = parse_modulus(&r.n.to_string()).map_err(|e| Outcome::error(EXIT_USAGE, e))?;
            let f = PolyModN::quadratic(n.clone(), r.f1, r.f2);
            let g = PolyModN::new(n.clone(), r.particular);
            return Ok((n, f, g));
        }
        let (Some(n), Some(f1), Some(f2), Some(g)) = (&a.n, a.f1, a.f2, &a.g) else {
            return Err(Outcome::error(
                EXIT_USAGE,
                "verify needs --input or all of --n, --f1, --f2, --g",
            ));
        };
        let g = PolyModN::parse(g, n.clone()).map_err(|e| Outcome::error(EXIT_USAGE, e))?;
        Ok((n.clone(), PolyModN::quadratic(n.clone(), f1, f2), g))
    }

    fn permute(&self, a: &PermuteArgs, stdin: &mut dyn Read) -> Outcome {
        let poly = match PolyModN::parse(&a.poly, a.n.clone()) {
            Ok(p) => p,
            Err(e) => return Outcome::error(EXIT_USAGE, e),
        };
        let raw = match read_source(a.input.as_ref(), stdin) {
            Ok(b) => b,
            Err(e) => return Outcome::error(EXIT_USAGE, e),
        };
        let direction = match a.direction {
            PermuteDirection::Interleave => Direction::Interleave,
            PermuteDirection::Deinterleave => Direction::Deinterleave,
        };
        let result = if a.bytes {
            lte::permute_block(&poly, &raw, direction)
        } else {
            let text = match String::from_utf8(raw) {
                Ok(t) => t,
                Err(_) => return Outcome::error(EXIT_USAGE, "block is not UTF-8 text; use --bytes"),
            };
            let items: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            if let Some(bad) = items.iter().find(|l| l.parse::<i128>().is_err()) {
                return Outcome::error(EXIT_USAGE, format!("not an integer: {bad:?}"));
            }
            lte::permute_block(&poly, &items, direction).map(|out| {
                out.iter()
                    .flat_map(|s| [s.as_bytes(), b"\n"])
                    .flatten()
                    .copied()
                    .collect()
            })
        };
        match result {
            Ok(bytes) => Outcome::new(EXIT_OK, bytes),
            Err(e @ lte::LteError::LengthMismatch { .. }) => Outcome::error(EXIT_USAGE, e),
            Err(e) => Outcome::error(EXIT_FAILURE, e),
        }
    }

    fn table(&self, fixture: Option<PathBuf>, cap: u64) -> Outcome {
        let entries = match &fixture {
            Some(path) => match lte::load_table(path) {
                Ok(t) => t,
                Err(e) => return Outcome::error(EXIT_FAILURE, format!("{}: {e}", path.display())),
            },
            None => lte::bundled_table(),
        };
        let report = lte::reproduce_table(&entries, cap, self.exec);
        let rows: Vec<TableRow> = report
            .rows
            .iter()
            .map(|r| TableRow {
                n: r.length,
                f1: r.f1,
                f2: r.f2,
                published_degree: r.published_degree,
                computed_degree: r.computed_degree,
                verifies: r.published_verifies,
                membership: match r.membership {
                    Membership::Enumerated => "enumerated",
                    Membership::ZeroDifference => "zero-difference",
                    Membership::NotMember => "not-member",
                },
                count: r.inverse_count.as_ref().map(ToString::to_string),
                passed: r.passed(),
                error: r.error.clone(),
            })
            .collect();
        let passed = rows.iter().filter(|r| r.passed).count();
        let mut text = String::new();
        for r in &rows {
            text += &format!(
                "{} N={:<5} f1={:<4} f2={:<4} K={}/{} {} count={}{}\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.n,
                r.f1,
                r.f2,
                r.computed_degree.map_or("-".into(), |k| k.to_string()),
                r.published_degree,
                r.membership,
                r.count.as_deref().unwrap_or("-"),
                r.error.as_ref().map_or(String::new(), |e| format!(" ({e})")),
            );
        }
        text += &format!("{passed}/{} rows passed\n", rows.len());
        let summary = TableSummary {
            total: rows.len(),
            passed,
            rows,
        };
        let code = if summary.passed == summary.total { EXIT_OK } else { EXIT_FAILURE };
        self.emit(code, &summary, text)
    }

    fn bound(&self, n: &Modulus) -> Outcome {
        let report = BoundReport {
            n: n.value(),
            factors: n.to_string(),
            bound: degree_bound(n),
        };
        let text = format!("{}\n", report.bound);
        self.emit(EXIT_OK, &report, text)
    }
}

fn read_source(path: Option<&PathBuf>, stdin: &mut dyn Read) -> Result<Vec<u8>, String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read(p).map_err(|e| format!("{}: {e}", p.display()))
        }
        _ => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf).map_err(|e| format!("stdin: {e}"))?;
            Ok(buf)
        }
    }
}
