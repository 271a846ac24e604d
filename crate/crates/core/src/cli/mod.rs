//! Command-line front end.
//!
//! Results go to `out` as one [`Envelope`]; progress and diagnostics go to
//! `err`. Exit codes: 0 every executed check passed, 1 some check failed,
//! 2 usage error, 3 a cap stopped the run (partial output is still written),
//! 4 internal error or engine disagreement.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

pub use output::{Caps, Envelope, OutputFormat, RunConfig};

use crate::definability::{analyze_definability, find_discontinuity_witness, Verdict};
use crate::error::Error;
use crate::fsum::EngineConfig;
use crate::padic::{valuation_rational, PadicIntegerSpec, DEFAULT_PRECISION};
use crate::scan::{scan_good_primes, scan_wieferich, ScanOptions};
use crate::verify::{
    self, verify_prop_1_1, verify_section2, verify_section3, verify_section4, verify_section5, verify_thm_1_2, Claim, FContext,
    Section2Params, Section3Params, Section4Params, Section5Params, Status, VerificationReport,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "invbinom",
    version,
    about = "Inverse binomial sums f(n) = Σ C(n,k)^-1: values, valuations, congruence checks and prime scans"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative p-adic precision in digits.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    #[arg(long, global = true, env = "INVBINOM_EXACT_CAP", default_value_t = 5000)]
    pub exact_cap: u64,
    #[arg(long, global = true, env = "INVBINOM_MODULAR_CAP", default_value_t = 1 << 22)]
    pub modular_cap: u64,
    /// Raises the scanners' range ceiling (long-running mode).
    #[arg(long, global = true, env = "INVBINOM_SCAN_CEILING")]
    pub scan_ceiling: Option<u64>,
    #[arg(long, global = true, env = "INVBINOM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Suppresses progress lines on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// ν_p(f(n)) and the leading unit digits.
    Fval {
        n: u64,
        #[arg(long, short)]
        prime: u64,
    },
    /// ν_p(f(m) − f(n)).
    Fdiff {
        m: u64,
        n: u64,
        #[arg(long, short)]
        prime: u64,
    },
    /// Runs a verifier grid.
    Verify(VerifyArgs),
    /// Primes p in [lo, hi) with ν_p(f(n)) > 1 for some 1 ≤ n ≤ p−2.
    ScanGood {
        #[arg(long, default_value_t = 3)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Skips the exact re-check for p ≤ 200.
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 16)]
        chunk: u64,
    },
    /// Primes p in [lo, hi) with 2^(p−1) ≡ 1 mod p².
    ScanWieferich {
        #[arg(long, default_value_t = 2)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 20)]
        chunk: u64,
    },
    /// f along the partial sums of a p-adic integer.
    Definable {
        /// `rational:-1`, `rational:-1/3`, `digits:1,2/0,1` (prefix/period) or `sparse2:1,4,21`.
        #[arg(long)]
        spec: String,
        #[arg(long, short, default_value_t = 2)]
        prime: u64,
        #[arg(long, default_value_t = 10)]
        depth: u64,
    },
    /// m near n (2-adically) with f(m) far from f(n).
    Witness {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps_exp: u32,
        /// Lower bound on the exponent L in m = 2^L − (2^e·t − n).
        #[arg(long)]
        l: Option<u32>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: VerifyTarget,
    #[arg(long, short)]
    pub prime: Option<u64>,
    #[arg(long)]
    pub kmax: Option<u64>,
    #[arg(long)]
    pub emax: Option<u32>,
    /// Upper bound on m and n for the difference-formula sweep.
    #[arg(long, default_value_t = verify::prop11::DEFAULT_BOUND)]
    pub bound: u64,
    /// Random samples for the binomial-product congruence.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyTarget {
    #[value(name = "prop1.1")]
    Prop11,
    #[value(name = "thm1.2")]
    Thm12,
    Sec2,
    Sec3,
    Sec4,
    Sec5,
    All,
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if code == EXIT_PASS { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    run(&cli, out, err)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut (dyn Write + Send)) -> i32 {
    let g = &cli.global;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = g.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return EXIT_INTERNAL;
        }
    };
    let (envelope, code) = pool.install(|| execute(cli, err));
    match envelope {
        Some(env) => {
            if let Err(e) = env.write(g.format, out) {
                let _ = writeln!(err, "error: writing output: {e}");
                return EXIT_INTERNAL;
            }
            code
        }
        None => code,
    }
}

#[derive(Default)]
struct Outcome {
    rows: Vec<Value>,
    pass: u64,
    fail: u64,
    skip: u64,
}

impl Outcome {
    fn push<T: Serialize>(&mut self, row: &T) {
        self.rows.push(serde_json::to_value(row).expect("report rows serialize"));
    }

    fn reports(&mut self, reports: &[VerificationReport]) {
        for r in reports {
            match r.status {
                Status::Pass => self.pass += 1,
                Status::Fail => self.fail += 1,
                Status::Skipped => self.skip += 1,
                Status::Info => {}
            }
            self.push(r);
        }
    }

    fn judge(&mut self, ok: bool) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Fval { .. } => "fval".into(),
        Command::Fdiff { .. } => "fdiff".into(),
        Command::Verify(v) => format!("verify {}", clap::ValueEnum::to_possible_value(&v.target).expect("named").get_name()),
        Command::ScanGood { .. } => "scan-good".into(),
        Command::ScanWieferich { .. } => "scan-wieferich".into(),
        Command::Definable { .. } => "definable".into(),
        Command::Witness { .. } => "witness".into(),
    }
}

fn execute(cli: &Cli, err: &mut (dyn Write + Send)) -> (Option<Envelope>, i32) {
    let g = &cli.global;
    let engine = EngineConfig {
        exact_cap: g.exact_cap,
        modular_cap: g.modular_cap,
        precision: g.precision,
        cross_exact_cap: EngineConfig::default().cross_exact_cap.min(g.exact_cap),
        ..EngineConfig::default()
    };
    if g.exact_cap == 0 || g.modular_cap == 0 || g.precision == 0 || g.scan_ceiling == Some(0) {
        let _ = writeln!(err, "error: caps and precision must be positive");
        return (None, EXIT_USAGE);
    }
    let (prime, checkpoint) = match &cli.command {
        Command::Fval { prime, .. } | Command::Fdiff { prime, .. } | Command::Definable { prime, .. } => (Some(*prime), None),
        Command::Verify(v) => (v.prime, None),
        Command::ScanGood { checkpoint, .. } | Command::ScanWieferich { checkpoint, .. } => {
            (None, checkpoint.as_ref().map(|p| p.display().to_string()))
        }
        Command::Witness { .. } => (Some(2), None),
    };
    let config = RunConfig {
        prime,
        precision: g.precision,
        caps: Caps { exact_n_cap: g.exact_cap, modular_n_cap: g.modular_cap, scan_ceiling: g.scan_ceiling },
        seed: g.seed,
        output: g.format,
        checkpoint_path: checkpoint,
    };
    let ctx = FContext::new(engine);
    let mut outcome = Outcome::default();
    let result = run_command(cli, &ctx, &mut outcome, err);
    let (error, code) = match result {
        Ok(()) => (None, if outcome.fail > 0 { EXIT_FAIL } else { EXIT_PASS }),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let code = match &e {
                e if e.is_cap_exceeded() => EXIT_CAP,
                Error::InvalidArgument(_)
                | Error::InvalidSpec(_)
                | Error::NotPrime(_)
                | Error::NotPadicInteger
                | Error::SparseRequiresTwo
                | Error::BinomialDomain { .. }
                | Error::LargeWieferich(_)
                | Error::Checkpoint(_) => EXIT_USAGE,
                _ => EXIT_INTERNAL,
            };
            if code != EXIT_CAP {
                return (None, code);
            }
            (Some(e.to_string()), code)
        }
    };
    let envelope = Envelope {
        command: command_name(&cli.command),
        config,
        rows: outcome.rows,
        pass_count: outcome.pass,
        fail_count: outcome.fail,
        skip_count: outcome.skip,
        error,
    };
    (Some(envelope), code)
}

#[derive(Serialize)]
struct FvalRow {
    n: u64,
    prime: u64,
    valuation: i64,
    /// Leading base-p digits of the unit part, least significant first.
    unit_digits: Vec<u64>,
    /// Exact value when within the exact cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

#[derive(Serialize)]
struct FdiffRow {
    m: u64,
    n: u64,
    prime: u64,
    valuation: Claim,
}

fn check_prime(p: u64) -> crate::Result<()> {
    if crate::modarith::is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn run_command(cli: &Cli, ctx: &FContext, o: &mut Outcome, err: &mut (dyn Write + Send)) -> crate::Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Fval { n, prime } => {
            check_prime(*prime)?;
            let v = ctx.padic(*n, *prime, g.precision)?;
            let exact = if ctx.exact_feasible(*n) { Some(ctx.exact(*n)?) } else { None };
            if let Some(q) = &exact {
                if valuation_rational(q, *prime)? != v.valuation()? {
                    return Err(Error::EngineDisagreement(format!("f({n}) at p={prime}")));
                }
            }
            o.push(&FvalRow {
                n: *n,
                prime: *prime,
                valuation: v.valuation()?,
                unit_digits: v.unit_digits(),
                exact: exact.map(|q| q.to_string()),
            });
            o.pass += 1;
        }
        Command::Fdiff { m, n, prime } => {
            check_prime(*prime)?;
            let valuation = match ctx.diff(*m, *n, *prime)? {
                Some(d) => Claim::from_diff(d),
                None => Claim::Infinite,
            };
            o.push(&FdiffRow { m: *m, n: *n, prime: *prime, valuation });
            o.pass += 1;
        }
        Command::Verify(v) => run_verify(v, g, ctx, o, err)?,
        Command::ScanGood { lo, hi, depth, no_oracle, checkpoint, chunk } => {
            let opts = ScanOptions {
                depth: *depth,
                oracle_check: !no_oracle,
                ceiling: g.scan_ceiling,
                chunk: *chunk,
                checkpoint: checkpoint.clone(),
                progress: !g.quiet,
            };
            let report = scan_good_primes(*lo, *hi, &opts)?;
            o.pass += report.checked_count;
            o.push(&report);
        }
        Command::ScanWieferich { lo, hi, checkpoint, chunk } => {
            let opts = ScanOptions {
                ceiling: g.scan_ceiling,
                chunk: *chunk,
                checkpoint: checkpoint.clone(),
                progress: !g.quiet,
                ..ScanOptions::default()
            };
            let report = scan_wieferich(*lo, *hi, &opts)?;
            o.pass += report.checked_count;
            o.push(&report);
        }
        Command::Definable { spec, prime, depth } => {
            let spec = PadicIntegerSpec::parse(spec, *prime)?;
            let report = analyze_definability(ctx, &spec, *depth)?;
            for row in &report.rows {
                match row.pass {
                    Some(ok) => o.judge(ok),
                    None => o.skip += 1,
                }
            }
            // A verdict contradicting the theorem's expectation is a failure; an inconclusive window is not.
            if let Some(tag) = report.theorem_tag {
                if report.verdict != Verdict::Inconclusive {
                    o.judge(report.verdict == tag.expects());
                }
            }
            let truncation = report.truncated.clone();
            o.push(&report);
            if let Some(t) = truncation {
                return Err(Error::ModularCapExceeded { n: t.at_n, cap: ctx.config().modular_cap });
            }
        }
        Command::Witness { n, eps_exp, l } => {
            let w = find_discontinuity_witness(ctx, *n, *eps_exp, *l)?;
            o.judge(w.metric_exp == *eps_exp as i64 && w.image_exp <= -1);
            o.push(&w);
        }
    }
    Ok(())
}

fn run_verify(v: &VerifyArgs, g: &GlobalOpts, ctx: &FContext, o: &mut Outcome, err: &mut (dyn Write + Send)) -> crate::Result<()> {
    let all = v.target == VerifyTarget::All;
    let mut progress = |name: &str| {
        if !g.quiet {
            let _ = writeln!(err, "verify {name}");
        }
    };
    if all || v.target == VerifyTarget::Prop11 {
        progress("prop1.1");
        o.reports(&verify_prop_1_1(ctx, v.bound)?);
    }
    if all || v.target == VerifyTarget::Thm12 {
        progress("thm1.2");
        let grids: Vec<(u64, u64, u32)> = match v.prime {
            Some(p) => {
                check_prime(p)?;
                let (k, e) = if p == 2 { (6, 12) } else { (4, 4) };
                vec![(p, v.kmax.unwrap_or(k), v.emax.unwrap_or(e))]
            }
            None => {
                let mut g = vec![(2, v.kmax.unwrap_or(6), v.emax.unwrap_or(12))];
                g.extend([3, 5, 7, 11, 13].map(|p| (p, v.kmax.unwrap_or(4), v.emax.unwrap_or(4))));
                g
            }
        };
        for (p, k, e) in grids {
            let es: Vec<u32> = (1..=e).collect();
            o.reports(&verify_thm_1_2(ctx, p, k, &es)?);
        }
    }
    if all || v.target == VerifyTarget::Sec2 {
        progress("sec2");
        let mut params = Section2Params::default();
        if let Some(p) = v.prime {
            check_prime(p)?;
            params.p_list = vec![p];
        }
        if let Some(e) = v.emax {
            params.e_max = e;
        }
        o.reports(&verify_section2(ctx, &params)?);
    }
    if all || v.target == VerifyTarget::Sec3 {
        progress("sec3");
        let mut params = Section3Params::default();
        if let Some(p) = v.prime {
            check_prime(p)?;
            params.p_list = vec![p];
        }
        if let Some(e) = v.emax {
            params.e_max = e;
        }
        o.reports(&verify_section3(ctx, &params)?);
    }
    if all || v.target == VerifyTarget::Sec4 {
        progress("sec4");
        let mut params = Section4Params::default();
        if let Some(e) = v.emax {
            params.e_max = e;
        }
        o.reports(&verify_section4(ctx, &params)?);
    }
    if all || v.target == VerifyTarget::Sec5 {
        progress("sec5");
        let mut params = Section5Params { seed: g.seed, sample_budget: v.samples, ..Section5Params::default() };
        if let Some(p) = v.prime {
            check_prime(p)?;
            params.p = p;
        }
        o.reports(&verify_section5(ctx, &params)?);
    }
    Ok(())
}
