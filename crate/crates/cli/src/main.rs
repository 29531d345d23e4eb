//! `systole`: command-line frontend for systole-core.
//!
//! Exit codes: 0 on success, 1 for usage or precondition errors, 2 when an
//! internal invariant fails.

mod config;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use systole_core::census::{growth_table, trace_census, CensusQuery, Strategy};
use systole_core::clifford::{cliff_mul, is_spin, star, CliffordElement, SpinCheck, SpinElement};
use systole_core::congruence::{membership_report, CongruenceLevel};
use systole_core::exec::ExecPolicy;
use systole_core::kleinian::{
    certify_square_systole, classify, enumerate_sl2, length_holonomy, trace_identity_sides, ElementType,
    NormalizedTrace, SquareSystoleParams,
};
use systole_core::report::{census_csv, census_summary, growth_csv, to_json, to_json_lines};
use systole_core::salem::{certify_surface_systole, SalemQuartic};
use systole_core::{Error, FieldDescriptor, FieldElement, IntegerRingElement};

use config::Config;

const DEFAULT_TOL: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "systole", version, about = "Exact certification tools for congruence covers and Kleinian trace censuses")]
struct Cli {
    /// TOML file with defaults (d, n, height, tol, n0, l0, out_dir, workers, seed)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for enumeration-backed subcommands
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed recorded in reports; enumeration itself is deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clifford algebra products, reversion and spin checks
    #[command(subcommand)]
    Clifford(CliffordCmd),
    /// Congruence subgroup membership and displacement bounds
    #[command(subcommand)]
    Congruence(CongruenceCmd),
    /// Salem level selection and surface systole certificates
    #[command(subcommand)]
    Salem(SalemCmd),
    /// Kleinian element invariants, certificates and enumeration
    #[command(subcommand)]
    Kleinian(KleinianCmd),
    /// Trace census and growth tables
    #[command(subcommand)]
    Census(CensusCmd),
}

#[derive(Subcommand, Debug)]
enum CliffordCmd {
    /// Product of two elements given as JSON (inline or @file)
    Mul {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reversion x*
    Star {
        #[arg(long)]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    SpinCheck {
        #[arg(long)]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CongruenceCmd {
    /// Membership in Γ(α) and Γ_τ(α) with the real-part bounds
    Check {
        /// Spin element as JSON (inline or @file)
        #[arg(long)]
        element: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum SalemCmd {
    /// Level certificate for s = t + u√D (u = 1, D = t² − 1 by default)
    Certify {
        /// Field code: 0 for Q, otherwise the radicand
        #[arg(long, allow_hyphen_values = true)]
        field: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long = "D", allow_hyphen_values = true)]
        big_d: Option<String>,
        /// Degree used in the norm bound; defaults to the field degree
        #[arg(long = "degree")]
        degree: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct TraceArgs {
    /// Trace such as 3, 0+2*sqrt(-1) or 264
    #[arg(long, allow_hyphen_values = true)]
    trace: String,
    /// Field Q(sqrt(-d)) for traces written without a radical; 0 means Q
    #[arg(long)]
    d: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum KleinianCmd {
    Invariants {
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Certify {
        #[command(flatten)]
        trace: TraceArgs,
        #[arg(long)]
        n0: Option<f64>,
        #[arg(long)]
        l0: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SL(2) elements of bounded height as JSON lines
    Enumerate {
        #[arg(long)]
        d: Option<i64>,
        #[arg(long)]
        height: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        level: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Auto,
    Box,
    TraceDriven,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long)]
    d: Option<i64>,
    #[arg(long)]
    height: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    hol_lo: f64,
    #[arg(long, default_value_t = 2.0 * PI)]
    hol_hi: f64,
}

#[derive(Subcommand, Debug)]
enum CensusCmd {
    /// Census CSV plus a JSON summary
    Run {
        #[command(flatten)]
        common: CensusArgs,
        #[arg(long)]
        max_norm: u64,
        #[arg(long, default_value_t = 0)]
        min_norm: u64,
        #[arg(long)]
        primitive: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        #[arg(long)]
        out: PathBuf,
        /// Summary path; defaults to the CSV path with `.json` appended
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Growth table CSV over increasing norm bounds
    Growth {
        #[command(flatten)]
        common: CensusArgs,
        /// Comma-separated, strictly increasing
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_invariant_violation() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

type Res<T> = Result<T, Failure>;

struct Ctx {
    cfg: Config,
    exec: ExecPolicy,
    seed: Option<u64>,
}

impl Ctx {
    fn emit(&self, text: &str, out: Option<&Path>) -> Res<()> {
        match out {
            Some(p) => write_file(&self.cfg.resolve(p), text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn tol(&self) -> f64 {
        self.cfg.tol.unwrap_or(DEFAULT_TOL)
    }

    fn height(&self, flag: Option<u64>) -> Res<u64> {
        flag.or(self.cfg.height).ok_or_else(|| Failure::Usage("--height is required".into()))
    }

    fn imaginary_field(&self, flag: Option<i64>) -> Res<FieldDescriptor> {
        let d = flag.or(self.cfg.d).ok_or_else(|| Failure::Usage("--d is required".into()))?;
        Ok(FieldDescriptor::imaginary(d)?)
    }
}

fn write_file(path: &Path, text: &str) -> Res<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn read_json_arg(arg: &str) -> Res<String> {
    match arg.strip_prefix('@') {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {p}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn parse_clifford(arg: &str) -> Res<CliffordElement> {
    let text = read_json_arg(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Parse(format!("clifford element: {e}"))))
}

fn json<T: Serialize + ?Sized>(v: &T) -> Res<String> {
    Ok(to_json(v)?)
}

fn trace_field(ctx: &Ctx, d: Option<i64>) -> Res<FieldDescriptor> {
    match d.or(ctx.cfg.d) {
        None | Some(0) => Ok(FieldDescriptor::Rational),
        Some(d) => Ok(FieldDescriptor::imaginary(d)?),
    }
}

fn parse_trace(ctx: &Ctx, t: &TraceArgs) -> Res<NormalizedTrace> {
    let field = trace_field(ctx, t.d)?;
    Ok(NormalizedTrace::new(FieldElement::parse_in(&t.trace, field)?)?)
}

fn run_clifford(ctx: &Ctx, cmd: CliffordCmd) -> Res<()> {
    match cmd {
        CliffordCmd::Mul { a, b, out } => {
            let x = cliff_mul(&parse_clifford(&a)?, &parse_clifford(&b)?)?;
            ctx.emit(&json(&x)?, out.as_deref())
        }
        CliffordCmd::Star { x, out } => ctx.emit(&json(&star(&parse_clifford(&x)?))?, out.as_deref()),
        CliffordCmd::SpinCheck { x, out } => {
            #[derive(Serialize)]
            struct Verdict {
                spin: bool,
                reason: Option<String>,
            }
            let v = match is_spin(&parse_clifford(&x)?) {
                SpinCheck::Spin => Verdict { spin: true, reason: None },
                SpinCheck::NotSpin(r) => Verdict { spin: false, reason: Some(r) },
            };
            ctx.emit(&json(&v)?, out.as_deref())
        }
    }
}

fn run_congruence(ctx: &Ctx, cmd: CongruenceCmd) -> Res<()> {
    let CongruenceCmd::Check { element, alpha, tau, out } = cmd;
    let x = parse_clifford(&element)?;
    let field = x.form().field();
    let s = SpinElement::new(x)?;
    let ring = |v: &str| -> Res<IntegerRingElement> { Ok(IntegerRingElement::new(FieldElement::parse_in(v, field)?)?) };
    let level = CongruenceLevel::new(ring(&alpha)?, tau.as_deref().map(ring).transpose()?)?;
    ctx.emit(&json(&membership_report(&s, &level)?)?, out.as_deref())
}

fn run_salem(ctx: &Ctx, cmd: SalemCmd) -> Res<()> {
    let SalemCmd::Certify { field, t, u, big_d, degree, out } = cmd;
    let code = field.or(ctx.cfg.d).unwrap_or(0);
    let f = FieldDescriptor::from_code(code)?;
    let ring = |v: &str| -> Res<IntegerRingElement> { Ok(IntegerRingElement::new(FieldElement::parse_in(v, f)?)?) };
    let sq = match (u, big_d) {
        (None, None) => SalemQuartic::from_x0(ring(&t)?)?,
        (Some(u), Some(d)) => SalemQuartic::new(ring(&t)?, ring(&u)?, ring(&d)?)?,
        _ => return Err(Failure::Usage("--u and --D must be given together".into())),
    };
    let cert = certify_surface_systole(&sq, degree.unwrap_or(f.degree()))?;
    ctx.emit(&json(&cert)?, out.as_deref())
}

#[derive(Serialize)]
struct InvariantsOut {
    trace: FieldElement,
    sign: i8,
    kind: ElementType,
    length: Option<f64>,
    holonomy: Option<f64>,
    holonomy_reduced: Option<f64>,
    eigenvalue: Option<[f64; 2]>,
    trace_identity: Option<[f64; 2]>,
    tol: f64,
}

fn run_kleinian(ctx: &Ctx, cmd: KleinianCmd) -> Res<()> {
    match cmd {
        KleinianCmd::Invariants { trace, out } => {
            let t = parse_trace(ctx, &trace)?;
            let kind = classify(&t);
            let mut o = InvariantsOut {
                trace: t.value().clone(),
                sign: t.sign(),
                kind,
                length: None,
                holonomy: None,
                holonomy_reduced: None,
                eigenvalue: None,
                trace_identity: None,
                tol: ctx.tol(),
            };
            if kind == ElementType::Loxodromic {
                let inv = length_holonomy(&t)?;
                let (l, r) = trace_identity_sides(t.to_complex(), inv.length);
                if (l - r).abs() > ctx.tol() * r {
                    return Err(Error::invariant(format!("trace identity fails: {l} vs {r}")).into());
                }
                o.length = Some(inv.length);
                o.holonomy = Some(inv.holonomy);
                o.holonomy_reduced = Some(inv.holonomy_reduced);
                o.eigenvalue = Some([inv.eigenvalue_re, inv.eigenvalue_im]);
                o.trace_identity = Some([l, r]);
            }
            ctx.emit(&json(&o)?, out.as_deref())
        }
        KleinianCmd::Certify { trace, n0, l0, out } => {
            let t = parse_trace(ctx, &trace)?;
            let params = match n0.or(ctx.cfg.n0) {
                Some(n0) => SquareSystoleParams::with_n0(n0, l0.or(ctx.cfg.l0))?,
                None => {
                    let mut p = SquareSystoleParams::default();
                    if let Some(l0) = l0.or(ctx.cfg.l0) {
                        p.l0 = l0;
                    }
                    p
                }
            };
            ctx.emit(&json(&certify_square_systole(&t, &params)?)?, out.as_deref())
        }
        KleinianCmd::Enumerate { d, height, level, out } => {
            let f = ctx.imaginary_field(d)?;
            let h = ctx.height(height)?;
            let level = level
                .map(|l| -> Res<IntegerRingElement> { Ok(IntegerRingElement::new(FieldElement::parse_in(&l, f)?)?) })
                .transpose()?;
            let els = enumerate_sl2(f, h, level.as_ref(), &ctx.exec)?;
            ctx.emit(&to_json_lines(&els)?, out.as_deref())
        }
    }
}

fn strategy(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::Auto => Strategy::Auto,
        StrategyArg::Box => Strategy::Box,
        StrategyArg::TraceDriven => Strategy::TraceDriven,
    }
}

fn run_census(ctx: &Ctx, cmd: CensusCmd) -> Res<()> {
    match cmd {
        CensusCmd::Run { common, max_norm, min_norm, primitive, strategy: st, out, summary } => {
            let q = CensusQuery {
                field: ctx.imaginary_field(common.d)?,
                max_norm,
                min_norm,
                hol_lo: common.hol_lo,
                hol_hi: common.hol_hi,
                height: ctx.height(common.height)?,
                primitive_only: primitive,
                strategy: strategy(st),
            };
            let report = trace_census(&q, &ctx.exec)?;
            let out = ctx.cfg.resolve(&out);
            write_file(&out, &census_csv(&report)?)?;
            #[derive(Serialize)]
            struct Summary<'a> {
                #[serde(flatten)]
                inner: systole_core::report::CensusSummary<'a>,
                seed: Option<u64>,
                workers: usize,
                csv: String,
            }
            let s = Summary {
                inner: census_summary(&report),
                seed: ctx.seed,
                workers: ctx.exec.workers(),
                csv: out.display().to_string(),
            };
            let text = json(&s)?;
            let summary = summary.map(|p| ctx.cfg.resolve(&p)).unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".json");
                PathBuf::from(p)
            });
            write_file(&summary, &text)?;
            print!("{text}");
            Ok(())
        }
        CensusCmd::Growth { common, n_list, out } => {
            let f = ctx.imaginary_field(common.d)?;
            let rows = growth_table(f, &n_list, common.hol_lo, common.hol_hi, ctx.height(common.height)?, &ctx.exec)?;
            ctx.emit(&growth_csv(&rows)?, out.as_deref())
        }
    }
}

fn dispatch(cli: Cli) -> Res<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    let workers = cli.workers.or(cfg.workers).unwrap_or(1);
    let exec = ExecPolicy::with_workers(workers)?;
    let ctx = Ctx { seed: cli.seed.or(cfg.seed), cfg, exec };
    match cli.command {
        Command::Clifford(c) => run_clifford(&ctx, c),
        Command::Congruence(c) => run_congruence(&ctx, c),
        Command::Salem(c) => run_salem(&ctx, c),
        Command::Kleinian(c) => run_kleinian(&ctx, c),
        Command::Census(c) => run_census(&ctx, c),
    }
}

/// Parses `argv` and runs it, returning the process exit code.
fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
