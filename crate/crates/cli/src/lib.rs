//! The `kova` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 parse error, 3 analysis error,
//! 4 internal verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kova_core::dsl::{parse_system_with, parse_tensor, ParseError, SystemSpec};
use kova_core::grading::{
    decompose, find_weights, SemiQhDecomposition, DEFAULT_M_MAX, DEFAULT_S_MAX,
};
use kova_core::invsearch::{
    full_scan, ScanKind, ScanOptions, ScanTarget, DEFAULT_FIXED_POINT_K_MAX,
};
use kova_core::kovalevskaya::{
    find_balances, kovalevskaya_matrix, Balance, BalanceOptions, KovalevskayaData, BALANCE_TOL,
    DEDUP_TOL,
};
use kova_core::linalg::PIVOT_TOL;
use kova_core::oracle::{
    flow_pullback_residual, OracleOptions, Verdict, INVARIANT_TOL, NON_INVARIANT_TOL,
};
use kova_core::poly::{Mode, VectorField};
use kova_core::report::{
    field_lines, BalanceReport, DecompositionReport, GradingReport, InputEcho, KovalevskayaReport,
    OptionsEcho, Report, ResonanceReport, ScanJson, TensorReport, Tolerances, VerifyReport,
};
use kova_core::resonance::{
    admissible_degree_window, enumerate_fixed_point, enumerate_semi_qh, fixed_point_window,
    ResonanceOptions, DEFAULT_K_MAX, DEFAULT_TOL,
};
use kova_core::spectrum::{self, Exponent};
use kova_core::tensor::TensorType;
use kova_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "kova",
    version,
    about = "Tensor invariants of polynomial vector fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gradings, balances, Kovalevskaya exponents and invariant scans.
    Analyze(Common),
    /// Balances of the quasi-homogeneous cut.
    Balances(Common),
    /// Kovalevskaya matrices and exponents at every balance.
    Kovalevskaya(Common),
    /// Resonance certificates and degree windows, without solving.
    Resonances(Common),
    /// Invariant scans only.
    Search(Common),
    /// Symbolic and flow-based invariance check of a tensor.
    Verify(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// System file (`.kova`).
    file: PathBuf,
    /// Tensor type; may be repeated.
    #[arg(long = "type", num_args = 2, value_names = ["P", "Q"], action = clap::ArgAction::Append)]
    types: Vec<usize>,
    /// Bound on the resonance order `sum k`.
    #[arg(long)]
    k_max: Option<u32>,
    /// Extra tensor degree to solve (graded) or the only order to report.
    #[arg(long = "degree", allow_hyphen_values = true)]
    degrees: Vec<i64>,
    #[arg(long, default_value_t = DEFAULT_S_MAX)]
    s_max: u32,
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    m_max: u32,
    /// Tolerance for resonance checks on inexact spectra.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Floating-point arithmetic; enables decimal literals.
    #[arg(long)]
    float: bool,
    /// Keep trivial invariants in the reported bases.
    #[arg(long)]
    no_quotient_trivial: bool,
    /// Seed for Newton starts and oracle sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Analyze at the fixed point at the origin instead of a balance.
    #[arg(long)]
    fixed_point: bool,
    /// Tensor file for `verify`.
    #[arg(long)]
    tensor: Option<PathBuf>,
    /// 1-based balance used for exponents (default: exact data first, then
    /// the fewest exponents with positive real part).
    #[arg(long)]
    balance: Option<usize>,
    /// Oracle sample count for `verify`.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Also solve the full field up to this total degree (fixed point).
    #[arg(long)]
    nonlinear_degree: Option<u32>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String, ParseError),
    Analysis(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(..) => EXIT_PARSE,
            Failure::Analysis(_) => EXIT_ANALYSIS,
            Failure::Verification(_) => EXIT_VERIFICATION,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Analysis(m) | Failure::Verification(m) => m.clone(),
            Failure::Parse(file, e) => format!("{file}:{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(m) => Failure::Verification(m),
            Error::Parse(p) => Failure::Parse(String::new(), p),
            other => Failure::Analysis(other.to_string()),
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = std::env::var("KOVA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_ANALYSIS;
        }
    };
    let (name, common) = match &cli.command {
        Command::Analyze(c) => ("analyze", c),
        Command::Balances(c) => ("balances", c),
        Command::Kovalevskaya(c) => ("kovalevskaya", c),
        Command::Resonances(c) => ("resonances", c),
        Command::Search(c) => ("search", c),
        Command::Verify(c) => ("verify", c),
    };
    let outcome = pool.install(|| execute(name, common));
    match outcome {
        Ok((report, code)) => {
            let text = report.to_json();
            let written = match &common.out {
                Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout()
                    .lock()
                    .write_all(text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            for m in &report.messages {
                eprintln!("{m}");
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn types_of(c: &Common) -> Vec<TensorType> {
    c.types
        .chunks(2)
        .map(|pq| TensorType::new(pq[0], pq[1]))
        .collect()
}

struct Context {
    spec: SystemSpec,
    field: VectorField,
    report: Report,
}

fn load(name: &str, c: &Common) -> Result<Context, Failure> {
    let text = read(&c.file)?;
    let mode = if c.float { Mode::Float } else { Mode::Exact };
    let spec = parse_system_with(&text, mode)
        .map_err(|e| Failure::Parse(c.file.display().to_string(), e))?;
    let field = spec
        .to_vector_field()
        .map_err(|e| Failure::Parse(c.file.display().to_string(), e))?;
    let names = spec.variables.clone();
    let input = InputEcho {
        path: Some(c.file.display().to_string()),
        variables: names.clone(),
        mode: if c.float { "float" } else { "exact" }.into(),
        system: spec.to_string(),
        field: field_lines(&field, &names),
    };
    let tolerances = Tolerances {
        rank: PIVOT_TOL,
        resonance: c.tol,
        balance: BALANCE_TOL,
        balance_dedup: DEDUP_TOL,
        oracle_invariant: INVARIANT_TOL,
        oracle_non_invariant: NON_INVARIANT_TOL,
    };
    let options = OptionsEcho {
        k_max: c.k_max.unwrap_or(DEFAULT_K_MAX),
        s_max: c.s_max,
        m_max: c.m_max,
        seed: c.seed,
        quotient_trivial: !c.no_quotient_trivial,
        degrees: c.degrees.clone(),
        types: types_of(c).iter().map(|t| [t.p, t.q]).collect(),
    };
    Ok(Context {
        spec,
        field,
        report: Report::new(name, input, tolerances, options),
    })
}

fn resonance_options(c: &Common) -> ResonanceOptions {
    ResonanceOptions {
        k_max: c.k_max.unwrap_or(DEFAULT_K_MAX),
        tol: c.tol,
    }
}

fn scan_options(c: &Common) -> ScanOptions {
    ScanOptions {
        resonance: resonance_options(c),
        fixed_point_k_max: c.k_max.unwrap_or(DEFAULT_FIXED_POINT_K_MAX),
        quotient_trivial: !c.no_quotient_trivial,
        extra_degrees: c.degrees.clone(),
        nonlinear_degree: c.nonlinear_degree,
        ..ScanOptions::default()
    }
}

/// Graded data: decomposition, balances and their Kovalevskaya data.
struct Graded {
    decomposition: SemiQhDecomposition,
    balances: Vec<Balance>,
    kova: Vec<KovalevskayaData>,
}

fn graded_stage(ctx: &mut Context, c: &Common, with_kova: bool) -> Result<Option<Graded>, Failure> {
    let grading = match ctx.spec.grading() {
        Some(g) => g,
        None => {
            let found = find_weights(&ctx.field, c.s_max, c.m_max);
            ctx.report.gradings = found.iter().map(GradingReport::from).collect();
            match found.first() {
                Some(m) => m.grading.clone(),
                None => return Ok(None),
            }
        }
    };
    let decomposition = decompose(&ctx.field, &grading)?;
    if ctx.report.gradings.is_empty() {
        ctx.report.gradings.push(GradingReport {
            weights: grading.weights.clone(),
            degree: grading.degree,
            sign: decomposition.sign,
            cut_terms: decomposition
                .cut
                .components()
                .iter()
                .map(|p| p.num_terms())
                .sum(),
        });
    }
    let names = &ctx.spec.variables;
    ctx.report.decomposition = Some(DecompositionReport::new(&decomposition, names));
    let opts = BalanceOptions {
        seed: c.seed,
        ..BalanceOptions::default()
    };
    let balances = find_balances(&decomposition.cut, &grading, &opts);
    ctx.report.balances = balances.iter().map(BalanceReport::from).collect();
    let mut kova = Vec::new();
    if with_kova {
        for (i, b) in balances.iter().enumerate() {
            let k = kovalevskaya_matrix(&decomposition.cut, &grading, b)?;
            ctx.report
                .kovalevskaya
                .push(KovalevskayaReport::new(i + 1, &k));
            kova.push(k);
        }
    }
    Ok(Some(Graded {
        decomposition,
        balances,
        kova,
    }))
}

/// The balance whose exponents drive windows and certificates: exact data
/// first, then the fewest exponents with positive real part.
fn chosen_balance(g: &Graded, c: &Common) -> Result<usize, Failure> {
    if let Some(b) = c.balance {
        if b == 0 || b > g.balances.len() {
            return Err(Failure::Usage(format!(
                "--balance {b} is out of range (found {})",
                g.balances.len()
            )));
        }
        return Ok(b - 1);
    }
    let score = |i: usize| {
        let k = &g.kova[i];
        // exponents with positive real part leave the window unbounded
        let positive = k.exponents.iter().filter(|e| e.re() > 0.0).count();
        (
            k.minus_one_witness.is_none(),
            !g.balances[i].is_exact(),
            !k.spectrum_is_exact(),
            positive,
        )
    };
    (0..g.balances.len())
        .min_by_key(|&i| (score(i), i))
        .ok_or_else(|| Failure::Analysis("no nonzero balance of the cut was found".into()))
}

fn use_fixed_point(ctx: &Context, c: &Common, graded: &Option<Graded>) -> bool {
    c.fixed_point || (graded.is_none() && ctx.field.fixes_origin())
}

fn execute(name: &str, c: &Common) -> Result<(Report, i32), Failure> {
    let mut ctx = load(name, c)?;
    if name == "verify" {
        return verify(ctx, c);
    }
    let types = types_of(c);
    let with_kova = name != "balances";
    let graded = if c.fixed_point {
        None
    } else {
        graded_stage(&mut ctx, c, with_kova)?
    };
    if name == "balances" || name == "kovalevskaya" {
        if graded.is_none() {
            return Err(Failure::Analysis(
                "no quasi-homogeneous grading found".into(),
            ));
        }
        return Ok((ctx.report, EXIT_OK));
    }
    let names = ctx.spec.variables.clone();
    if use_fixed_point(&ctx, c, &graded) {
        if !ctx.field.fixes_origin() {
            return Err(Failure::Analysis("the origin is not a fixed point".into()));
        }
        let spec = spectrum::eigenvalues(&ctx.field.linear_part());
        let opts = scan_options(c);
        for &t in &types {
            if name == "resonances" {
                let window = fixed_point_window(&spec, t, opts.fixed_point_k_max, &opts.resonance);
                let orders: Vec<i64> = if c.degrees.is_empty() {
                    (0..=opts.fixed_point_k_max as i64).collect()
                } else {
                    c.degrees.clone()
                };
                let mut groups = Vec::new();
                for k in orders {
                    let k = u32::try_from(k)
                        .map_err(|_| Failure::Usage("fixed-point orders are nonnegative".into()))?;
                    groups.push((
                        k as i64,
                        enumerate_fixed_point(&spec, t, k, &opts.resonance),
                    ));
                }
                ctx.report.resonances.push(ResonanceReport::new(
                    t,
                    ScanKind::FixedPoint,
                    None,
                    &spec,
                    &window,
                    groups,
                ));
            } else {
                let r = full_scan(&ctx.field, ScanTarget::FixedPoint, t, &opts)?;
                ctx.report.scans.push(ScanJson::new(&r, None, &names));
            }
        }
        return Ok((ctx.report, EXIT_OK));
    }
    let g = graded.ok_or_else(|| Failure::Analysis("no quasi-homogeneous grading found".into()))?;
    if types.is_empty() {
        return Ok((ctx.report, EXIT_OK));
    }
    let bi = chosen_balance(&g, c)?;
    let exponents: Vec<Exponent> = g.kova[bi].exponents.clone();
    let grading = &g.decomposition.grading;
    let opts = scan_options(c);
    for &t in &types {
        if name == "resonances" {
            let window = admissible_degree_window(
                &exponents,
                grading.degree,
                t,
                &grading.weights,
                &opts.resonance,
            );
            let degrees = if c.degrees.is_empty() {
                window.degrees.clone()
            } else {
                c.degrees.clone()
            };
            let mut groups = Vec::new();
            for l in degrees {
                groups.push((
                    l,
                    enumerate_semi_qh(&exponents, grading.degree, t, l, &opts.resonance)?,
                ));
            }
            ctx.report.resonances.push(ResonanceReport::new(
                t,
                ScanKind::Graded,
                Some(bi + 1),
                &exponents,
                &window,
                groups,
            ));
        } else {
            let target = ScanTarget::Graded {
                decomposition: &g.decomposition,
                exponents: &exponents,
            };
            let r = full_scan(&ctx.field, target, t, &opts)?;
            ctx.report
                .scans
                .push(ScanJson::new(&r, Some(bi + 1), &names));
        }
    }
    if name == "search" {
        ctx.report.kovalevskaya.clear();
    }
    Ok((ctx.report, EXIT_OK))
}

fn verify(mut ctx: Context, c: &Common) -> Result<(Report, i32), Failure> {
    let path = c
        .tensor
        .as_ref()
        .ok_or_else(|| Failure::Usage("verify needs --tensor FILE".into()))?;
    let text = read(path)?;
    let t = parse_tensor(&text, &ctx.spec)
        .map_err(|e| Failure::Parse(path.display().to_string(), e))?;
    let (symbolic, lie) = t.is_invariant(&ctx.field)?;
    let opts = OracleOptions {
        samples: c.samples,
        seed: c.seed,
        ..OracleOptions::default()
    };
    let oracle = flow_pullback_residual(&ctx.field, &t, &opts)?;
    let names = &ctx.spec.variables;
    let agrees = oracle.agreement_residual < INVARIANT_TOL
        && (symbolic == (oracle.verdict == Verdict::Invariant)
            || oracle.verdict == Verdict::Inconclusive);
    let code = if !agrees {
        ctx.report.messages.push(format!(
            "symbolic and flow checks disagree (agreement residual {:e})",
            oracle.agreement_residual
        ));
        EXIT_VERIFICATION
    } else if symbolic {
        EXIT_OK
    } else {
        ctx.report
            .messages
            .push("the tensor is not invariant under the flow".into());
        EXIT_ANALYSIS
    };
    ctx.report.verify = Some(VerifyReport {
        tensor: TensorReport::new(&t, names),
        symbolic_invariant: symbolic,
        lie_derivative: TensorReport::new(&lie, names),
        oracle,
    });
    Ok((ctx.report, code))
}
