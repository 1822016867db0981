//! The `ncde` command line. Exit codes: 0 on success or when a verdict was
//! produced, 1 when a check fails or the computation errors, 2 on usage
//! errors and malformed input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncde_core::btt::{
    check_condition_iii, check_condition_iii_prime, check_condition_iv, counterexample_fixture,
    default_sample_points, eliminate_log_coefficient, numeric_certificate_for, recurrence_times,
    verify_ncde_detailed, IndependenceReport, MultiplierSpec, SearchSpace, NUMERIC_RANK_TOL,
};
use ncde_core::formal::all_checks;
use ncde_core::funring::{Center, Exponent, FunElem, MonodromyOp, SymbolTable};
use ncde_core::hyperlog::{self, character_identity_check, li_eval};
use ncde_core::linalg::CMatrix;
use ncde_core::ncseries::{shuffle_words, Series};
use ncde_core::solver::{
    euler_solve, group_drift, magnus_solve, picard_solve, solve_with_restarts, GroupSpec, MagnusConfig, MatFun,
    MatPath, PicardConfig, RestartConfig,
};
use ncde_core::{Complex64 as C, Rational};
use serde_json::{json, Map, Value};

use crate::json::{self as fmt, num, CoeffJson, FormatError};
use crate::{matpath, props};

const FORMATS: &str = "\
File formats (all floats carry 17 significant digits):
  series      {\"alphabet\":[\"x0\",\"x1\"],\"max_degree\":N,
               \"terms\":[{\"word\":[\"x0\",\"x1\"],\"coeff\":C}]}
              C is \"p/q\" (rational), {\"re\":..,\"im\":..} (complex) or
              {\"terms\":[...]} (function ring, with a top-level \"symbols\").
              The empty array is the empty word.
  function    {\"symbols\":{\"beta\":1.4142135623730951},
               \"terms\":[{\"a\":{\"1\":\"-1/2\",\"beta\":\"1\"},\"b\":{\"1\":\"0\"},
                          \"p\":0,\"q\":1,\"re\":1.0,\"im\":0.0}]}
              is z^a (1-z)^b log(z)^p log(1/(1-z))^q times re + i im.
  multiplier  {\"symbols\":{..},\"multiplier\":{\"x0\":FUNCTION,\"x1\":FUNCTION}}
              letter order is alphabet order.
  report      {\"verdict\":..,\"witness\":..,\"bounds\":..,\"condition\":..}
  matrix      {\"a\":[[..]],\"b\":[[..]]} for A + sin(t) B; entries are numbers,
              [re, im] or {\"re\":..,\"im\":..}.
  path CSV    t,g00_re,g00_im,...,defect (row-major entries).";

#[derive(Parser, Debug)]
#[command(name = "ncde", version, about = "Noncommutative differential equations: series, certificates, solvers", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shuffle product of two words, as a rational series.
    #[command(after_help = FORMATS)]
    Shuffle(ShuffleArgs),
    /// Operations on series files.
    #[command(after_help = FORMATS)]
    Series(SeriesArgs),
    /// Independence certificates.
    #[command(subcommand)]
    Btt(BttCommand),
    /// Integrate S' = M(t) S from the identity with Picard, restarts or Euler.
    #[command(after_help = FORMATS)]
    Solve(SolveArgs),
    /// Integrate S' = M(t) S with a Magnus integrator.
    #[command(after_help = FORMATS)]
    Magnus(MagnusArgs),
    /// Exact identity checks in the free differential algebra, as a table.
    FormalCheck(FormalArgs),
    /// Hyperlogarithms on {x0, x1}.
    #[command(subcommand)]
    Hyperlog(HyperlogCommand),
    /// Monodromy of function-ring elements.
    #[command(subcommand)]
    Monodromy(MonodromyCommand),
    /// Seeded randomized property suite.
    PropSuite(PropArgs),
}

#[derive(Args, Debug)]
struct ShuffleArgs {
    /// Comma-separated alphabet.
    #[arg(long, default_value = "x0,x1")]
    alphabet: String,
    /// First word, comma-separated letters (empty for the empty word).
    u: String,
    /// Second word.
    v: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesOp {
    Normalize,
    Add,
    Sub,
    Concat,
    Shuffle,
    Pairing,
    Residual,
    Derive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RingKind {
    Rational,
    Complex,
    Fun,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    op: SeriesOp,
    /// Series JSON file.
    #[arg(long)]
    left: PathBuf,
    /// Second series JSON file for binary operations.
    #[arg(long)]
    right: Option<PathBuf>,
    /// Coefficient ring of both files.
    #[arg(long, value_enum, default_value = "rational")]
    ring: RingKind,
    /// Letter for `residual`.
    #[arg(long)]
    letter: Option<String>,
}

#[derive(Args, Debug)]
struct SpaceArgs {
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    a_min: i64,
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    a_max: i64,
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    b_min: i64,
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    b_max: i64,
    /// Also search z^{(k+1) s - l} for this declared symbol s.
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    l_min: i64,
    #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
    l_max: i64,
}

#[derive(Subcommand, Debug)]
enum BttCommand {
    /// Condition iii over an exponent search space.
    #[command(after_help = FORMATS)]
    CheckIii {
        #[arg(long)]
        multiplier: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Condition iv: k-freeness plus condition iii.
    #[command(after_help = FORMATS)]
    CheckIv {
        #[arg(long)]
        multiplier: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Wronskian condition iii' for the given f2 candidates.
    #[command(after_help = FORMATS)]
    CheckIiiPrime {
        #[arg(long)]
        multiplier: PathBuf,
        /// Function JSON for a candidate f2; repeatable.
        #[arg(long, required = true)]
        f2: Vec<PathBuf>,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Check that a function-ring series solves d(S) = M S with <S|1> = 1.
    #[command(after_help = FORMATS)]
    VerifyNcde {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        multiplier: PathBuf,
    },
    /// The one-letter fixture u0 = z^beta with its iii and iii' reports.
    Fixture {
        /// Numeric value of the irrational symbol beta.
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long = "N", default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k_max: u32,
        #[arg(long, default_value_t = 3)]
        l_max: i64,
    },
    /// Numeric rank certificate from {"symbols":..,"functions":[FUNCTION,..]}.
    #[command(after_help = FORMATS)]
    Numeric {
        #[arg(long)]
        functions: PathBuf,
        #[arg(long, default_value_t = NUMERIC_RANK_TOL)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolveMethod {
    Picard,
    Restarts,
    Euler,
}

#[derive(Args, Debug)]
struct MatFunArgs {
    /// `so3_rotor`, `const+sin` or a matrix JSON file.
    #[arg(long, default_value = "so3_rotor")]
    matfun: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    amp: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    freq: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    step: f64,
    /// `orthogonal`, `special-linear` or `unipotent`; adds the defect column.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    matfun: MatFunArgs,
    #[arg(long, value_enum, default_value = "picard")]
    method: SolveMethod,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    /// Piece length for `restarts`.
    #[arg(long, default_value_t = 0.25)]
    piece: f64,
}

#[derive(Args, Debug)]
struct MagnusArgs {
    #[command(flatten)]
    matfun: MatFunArgs,
    /// Classical order of the method.
    #[arg(long, default_value_t = 4)]
    order: usize,
}

#[derive(Args, Debug)]
struct FormalArgs {
    /// Largest weight checked.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..=9))]
    weight: u64,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    z_im: f64,
}

#[derive(Subcommand, Debug)]
enum HyperlogCommand {
    /// Evaluate Li_w(z) for a word over {x0, x1}.
    Eval {
        /// Comma-separated letters, e.g. `x0,x1`.
        #[arg(long)]
        word: String,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Compare sum_w alpha^|w|_x0 beta^|w|_x1 Li_w(z) with z^alpha (1-z)^-beta.
    CharCheck {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long = "N", default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
        /// Truncation error accepted before the check fails.
        #[arg(long, default_value_t = 1e-6)]
        max_err: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CenterArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

impl CenterArg {
    fn op(self) -> MonodromyOp {
        match self {
            CenterArg::Zero => MonodromyOp::D0,
            CenterArg::One => MonodromyOp::D1,
        }
    }
}

#[derive(Subcommand, Debug)]
enum MonodromyCommand {
    /// D^n(f) for a function JSON file.
    #[command(after_help = FORMATS)]
    Apply {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_enum)]
        center: CenterArg,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        n: i64,
    },
    /// Smallest n with max_i |e^{2 i pi n alpha_i} - 1| < eps.
    Recurrence {
        /// Comma-separated real exponents.
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
    /// Recover the log coefficient P1 of f = P0 + P1 L at z.
    #[command(after_help = FORMATS)]
    Eliminate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_enum)]
        center: CenterArg,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
}

#[derive(Args, Debug)]
struct PropArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    cases: usize,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Math(String),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ncde_core::Error> for CliError {
    fn from(e: ncde_core::Error) -> Self {
        CliError::Math(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Math(format!("write failed: {e}"))
    }
}

type Outcome = Result<bool, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Runs the CLI on `argv` (including the program name) against stdout and
/// stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Math(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Shuffle(a) => shuffle(a, out),
        Command::Series(a) => match a.ring {
            RingKind::Rational => series_op::<Rational>(a, out),
            RingKind::Complex => series_op::<C>(a, out),
            RingKind::Fun => series_op::<FunElem>(a, out),
        },
        Command::Btt(c) => btt(c, out),
        Command::Solve(a) => solve(a, out),
        Command::Magnus(a) => magnus(a, out),
        Command::FormalCheck(a) => formal_check(a, out),
        Command::Hyperlog(c) => hyperlog_cmd(c, out),
        Command::Monodromy(c) => monodromy(c, out),
        Command::PropSuite(a) => prop_suite(a, out),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", fmt::to_string(v))?;
    Ok(())
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    fmt::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn shuffle(a: ShuffleArgs, out: &mut dyn Write) -> Outcome {
    let alphabet = fmt::parse_alphabet(&json!(split_list(&a.alphabet)))?;
    let u = alphabet.word(&split_list(&a.u)).map_err(|e| usage(e.to_string()))?;
    let v = alphabet.word(&split_list(&a.v)).map_err(|e| usage(e.to_string()))?;
    let terms = shuffle_words(&u, &v).into_iter().map(|(w, c)| (w, Rational::from_integer(c as i128)));
    let s = Series::from_terms(alphabet, u.len() + v.len(), terms)?;
    emit(out, &fmt::series_to_json(&s, None))?;
    Ok(true)
}

fn series_op<R: CoeffJson>(a: SeriesArgs, out: &mut dyn Write) -> Outcome {
    let mut symbols = SymbolTable::new();
    let left: Series<R> = fmt::series_from_json(&read_json(&a.left)?, &mut symbols)?;
    let mut right = || -> Result<Series<R>, CliError> {
        let path = a.right.as_ref().ok_or_else(|| usage("this operation needs --right"))?;
        Ok(fmt::series_from_json(&read_json(path)?, &mut symbols)?)
    };
    let result = match a.op {
        SeriesOp::Normalize => left,
        SeriesOp::Add => left.add(&right()?)?,
        SeriesOp::Sub => left.sub(&right()?)?,
        SeriesOp::Concat => left.concat_mul(&right()?)?,
        SeriesOp::Shuffle => left.shuffle_mul(&right()?)?,
        SeriesOp::Pairing => {
            let value = left.pairing(&right()?)?;
            emit(out, &json!({ "pairing": value.to_json() }))?;
            return Ok(true);
        }
        SeriesOp::Residual => {
            let name = a.letter.as_deref().ok_or_else(|| usage("residual needs --letter"))?;
            let x = left.alphabet().index_of(name).map_err(|e| usage(e.to_string()))?;
            left.left_residual(x)?
        }
        SeriesOp::Derive => left.coefficientwise_derivation()?,
    };
    emit(out, &fmt::series_to_json(&result, Some(&symbols)))?;
    Ok(true)
}

fn search_space(s: &SpaceArgs, symbols: &SymbolTable) -> Result<SearchSpace, CliError> {
    if s.a_min > s.a_max || s.b_min > s.b_max || s.l_min > s.l_max {
        return Err(usage("empty search range"));
    }
    let grid = SearchSpace::integer_grid(s.a_min, s.a_max, s.b_min, s.b_max);
    match &s.ladder {
        None => Ok(grid),
        Some(name) => {
            let sym = symbols.get(name).map_err(|e| usage(e.to_string()))?;
            Ok(grid.union(&SearchSpace::beta_ladder(&Exponent::symbol(&sym), s.k_max, s.l_min, s.l_max)))
        }
    }
}

fn load_multiplier(path: &Path, symbols: &mut SymbolTable) -> Result<MultiplierSpec, CliError> {
    Ok(fmt::multiplier_from_json(&read_json(path)?, symbols)?)
}

fn report(r: &IndependenceReport, names: &[String], symbols: &SymbolTable) -> Value {
    fmt::report_to_json(r, names, symbols)
}

fn btt(cmd: BttCommand, out: &mut dyn Write) -> Outcome {
    let mut symbols = SymbolTable::new();
    match cmd {
        BttCommand::CheckIii { multiplier, space } => {
            let m = load_multiplier(&multiplier, &mut symbols)?;
            let r = check_condition_iii(&m, &search_space(&space, &symbols)?)?;
            emit(out, &report(&r, m.names(), &symbols))?;
        }
        BttCommand::CheckIv { multiplier, space } => {
            let m = load_multiplier(&multiplier, &mut symbols)?;
            let r = check_condition_iv(&m, &search_space(&space, &symbols)?)?;
            emit(out, &report(&r, m.names(), &symbols))?;
        }
        BttCommand::CheckIiiPrime { multiplier, f2, space } => {
            let m = load_multiplier(&multiplier, &mut symbols)?;
            let candidates = f2
                .iter()
                .map(|p| Ok(fmt::fun_from_json(&read_json(p)?, &mut symbols)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let r = check_condition_iii_prime(&m, &candidates, &search_space(&space, &symbols)?)?;
            emit(out, &report(&r, m.names(), &symbols))?;
        }
        BttCommand::VerifyNcde { series, multiplier } => {
            let s: Series<FunElem> = fmt::series_from_json(&read_json(&series)?, &mut symbols)?;
            let m = load_multiplier(&multiplier, &mut symbols)?;
            let check = verify_ncde_detailed(&s, &m)?;
            let alphabet = s.alphabet();
            let mismatches: Vec<Value> = check.mismatches.iter().map(|w| fmt::word_json(alphabet, w)).collect();
            emit(out, &json!({ "holds": check.holds(), "unit_ok": check.unit_ok, "mismatches": mismatches }))?;
            return Ok(check.holds());
        }
        BttCommand::Fixture { beta, n, k_max, l_max } => {
            let b = Exponent::symbol(&symbols.declare("beta", beta)?);
            let fx = counterexample_fixture(&b, n)?;
            let names = fx.multiplier.names().to_vec();
            let iii = check_condition_iii(&fx.multiplier, &fx.c0_space(k_max, l_max))?;
            let ext = fx.extended_space(k_max, l_max);
            let iii_prime = check_condition_iii_prime(&fx.multiplier, &[FunElem::constant(C::new(1.0, 0.0))], &ext)?;
            emit(
                out,
                &json!({
                    "series": fmt::series_to_json(&fx.series, Some(&symbols)),
                    "multiplier": fmt::multiplier_to_json(&fx.multiplier, &symbols),
                    "iii": report(&iii, &names, &symbols),
                    "iii_prime": report(&iii_prime, &names, &symbols),
                }),
            )?;
        }
        BttCommand::Numeric { functions, tol } => {
            let v = read_json(&functions)?;
            if let Some(sym) = v.get("symbols") {
                fmt::declare_symbols(sym, &mut symbols)?;
            }
            let items = v
                .get("functions")
                .and_then(Value::as_array)
                .ok_or_else(|| usage("expected {\"functions\": [...]}"))?;
            let funcs = items
                .iter()
                .map(|f| Ok(fmt::fun_from_json(f, &mut symbols)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let r = numeric_certificate_for(&funcs, &default_sample_points(), tol)?;
            emit(out, &report(&r, &[], &symbols))?;
        }
    }
    Ok(true)
}

fn hat(x: f64, y: f64, z: f64) -> CMatrix {
    CMatrix::from_real(3, 3, &[0.0, -z, y, z, 0.0, -x, -y, x, 0.0]).expect("3x3")
}

fn parse_matrix(v: &Value) -> Result<CMatrix, CliError> {
    let rows = v.as_array().ok_or_else(|| usage("matrix: expected an array of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| usage("matrix: rows must be arrays"))?
                .iter()
                .map(|e| Ok(fmt::parse_complex(e)?))
                .collect::<Result<Vec<C>, CliError>>()
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let m = CMatrix::from_rows(&rows).map_err(|e| usage(format!("matrix: {e}")))?;
    if !m.is_square() || m.rows() == 0 {
        return Err(usage("matrix: must be square and nonempty"));
    }
    Ok(m)
}

fn build_matfun(a: &MatFunArgs) -> Result<MatFun, CliError> {
    match a.matfun.as_str() {
        "so3_rotor" => Ok(MatFun::so3_rotor(a.amp, a.freq)),
        "const+sin" => Ok(MatFun::const_plus_sin(hat(0.0, 0.0, a.amp), hat(a.amp, 0.0, 0.0))),
        file => {
            let v = read_json(Path::new(file))?;
            let ma = parse_matrix(v.get("a").ok_or_else(|| usage("matrix file needs \"a\""))?)?;
            let mb = match v.get("b") {
                Some(b) => parse_matrix(b)?,
                None => CMatrix::zeros(ma.rows(), ma.rows()),
            };
            if mb.rows() != ma.rows() {
                return Err(usage("matrix: \"a\" and \"b\" differ in size"));
            }
            Ok(MatFun::const_plus_sin(ma, mb))
        }
    }
}

fn group_arg(name: &Option<String>) -> Result<Option<GroupSpec>, CliError> {
    match name {
        None => Ok(None),
        Some(n) => GroupSpec::builtin(n).map(Some).ok_or_else(|| usage(format!("unknown group `{n}`"))),
    }
}

fn check_step(a: &MatFunArgs) -> Result<(), CliError> {
    if !(a.step > 0.0 && a.step.is_finite()) {
        return Err(usage("--step must be positive"));
    }
    Ok(())
}

fn matrix_json(g: &CMatrix) -> Value {
    Value::Array(
        (0..g.rows()).map(|i| Value::Array((0..g.cols()).map(|j| fmt::complex(g[(i, j)])).collect())).collect(),
    )
}

fn emit_path(out: &mut dyn Write, path: &MatPath, a: &MatFunArgs) -> Outcome {
    let group = group_arg(&a.group)?;
    match a.format {
        OutputFormat::Csv => {
            matpath::write_csv(&mut *out, path, group.as_ref()).map_err(|e| CliError::Math(e.to_string()))?;
        }
        OutputFormat::Json => {
            let points: Vec<Value> = path
                .times
                .iter()
                .zip(&path.values)
                .map(|(t, g)| {
                    let mut m = Map::new();
                    m.insert("t".into(), num(*t));
                    m.insert("g".into(), matrix_json(g));
                    if let Some(s) = &group {
                        m.insert("defect".into(), num(s.group_defect(g)));
                    }
                    Value::Object(m)
                })
                .collect();
            emit(
                out,
                &json!({
                    "solver": path.solver,
                    "step": num(path.step),
                    "order": path.order,
                    "group": a.group,
                    "drift": group.as_ref().map(|s| num(group_drift(path, s))),
                    "points": points,
                }),
            )?;
        }
    }
    Ok(true)
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Outcome {
    check_step(&a.matfun)?;
    group_arg(&a.matfun.group)?;
    let m = build_matfun(&a.matfun)?;
    let g0 = CMatrix::identity(m.dim());
    let picard = PicardConfig { step: a.matfun.step, iters: a.iters, tol: a.tol };
    let (t0, t1) = (a.matfun.t0, a.matfun.t1);
    let path = match a.method {
        SolveMethod::Picard => picard_solve(&m, t0, &g0, t1, &picard)?,
        SolveMethod::Restarts => {
            let cfg = RestartConfig { picard, piece: a.piece, ..RestartConfig::default() };
            solve_with_restarts(&m, t0, &g0, t1, &cfg)?
        }
        SolveMethod::Euler => euler_solve(&m, t0, &g0, t1, a.matfun.step)?,
    };
    emit_path(out, &path, &a.matfun)
}

fn magnus(a: MagnusArgs, out: &mut dyn Write) -> Outcome {
    check_step(&a.matfun)?;
    group_arg(&a.matfun.group)?;
    if a.order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let m = build_matfun(&a.matfun)?;
    let g0 = CMatrix::identity(m.dim());
    let cfg = MagnusConfig { step: a.matfun.step, order: a.order };
    let path = magnus_solve(&m, a.matfun.t0, &g0, a.matfun.t1, &cfg)?;
    emit_path(out, &path, &a.matfun)
}

fn formal_check(a: FormalArgs, out: &mut dyn Write) -> Outcome {
    let rows = all_checks(a.weight as usize);
    writeln!(out, "{:<20} {:>6}  result", "check", "weight")?;
    for r in &rows {
        writeln!(out, "{:<20} {:>6}  {}", r.name, r.weight, if r.passed { "pass" } else { "FAIL" })?;
    }
    let passed = rows.iter().all(|r| r.passed);
    writeln!(out, "{} of {} checks passed", rows.iter().filter(|r| r.passed).count(), rows.len())?;
    Ok(passed)
}

fn point(p: &PointArgs) -> Result<C, CliError> {
    if !(p.z.is_finite() && p.z_im.is_finite()) {
        return Err(usage("--z must be finite"));
    }
    Ok(C::new(p.z, p.z_im))
}

fn hyperlog_cmd(cmd: HyperlogCommand, out: &mut dyn Write) -> Outcome {
    match cmd {
        HyperlogCommand::Eval { word, point: p, tol } => {
            let alphabet = hyperlog::alphabet();
            let w = alphabet.word(&split_list(&word)).map_err(|e| usage(e.to_string()))?;
            let v = li_eval(&w, point(&p)?, tol)?;
            emit(
                out,
                &json!({
                    "word": fmt::word_json(&alphabet, &v.word),
                    "z": fmt::complex(v.z),
                    "value": fmt::complex(v.value),
                    "err_est": num(v.err_est),
                    "method": v.method.as_str(),
                }),
            )?;
            Ok(true)
        }
        HyperlogCommand::CharCheck { alpha, beta, point: p, n, tol, max_err } => {
            let z = point(&p)?;
            let c = character_identity_check(alpha, beta, z, n, tol)?;
            let passed = c.abs_err <= max_err;
            emit(
                out,
                &json!({
                    "alpha": num(alpha),
                    "beta": num(beta),
                    "z": fmt::complex(z),
                    "N": n,
                    "lhs": fmt::complex(c.lhs),
                    "rhs": fmt::complex(c.rhs),
                    "abs_err": num(c.abs_err),
                    "passed": passed,
                }),
            )?;
            Ok(passed)
        }
    }
}

fn monodromy(cmd: MonodromyCommand, out: &mut dyn Write) -> Outcome {
    let mut symbols = SymbolTable::new();
    match cmd {
        MonodromyCommand::Apply { f, center, n } => {
            let f = fmt::fun_from_json(&read_json(&f)?, &mut symbols)?;
            emit(out, &fmt::fun_to_json(&center.op().apply(n, &f), &symbols))?;
        }
        MonodromyCommand::Recurrence { alphas, eps, n_max } => {
            let values = split_list(&alphas)
                .into_iter()
                .map(|s| s.parse::<f64>().map_err(|_| usage(format!("invalid exponent `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let n = recurrence_times(&values, eps, n_max)?;
            let defect = ncde_core::btt::recurrence_defect(&values, n);
            emit(out, &json!({ "n": n, "defect": num(defect), "eps": num(eps) }))?;
        }
        MonodromyCommand::Eliminate { f, center, point: p, eps, n_max } => {
            let f = fmt::fun_from_json(&read_json(&f)?, &mut symbols)?;
            let z = point(&p)?;
            let r = eliminate_log_coefficient(&f, center.op(), z, eps, n_max)?;
            emit(
                out,
                &json!({
                    "n": r.n,
                    "center": match center.op().center { Center::Zero => 0, Center::One => 1 },
                    "recovered": fmt::complex(r.recovered),
                    "direct": fmt::complex(r.direct),
                    "abs_err": num((r.recovered - r.direct).norm()),
                }),
            )?;
        }
    }
    Ok(true)
}

fn prop_suite(a: PropArgs, out: &mut dyn Write) -> Outcome {
    if a.cases == 0 {
        return Err(usage("--cases must be positive"));
    }
    let results = props::run_suite(a.seed, a.cases, a.threads).map_err(|e| CliError::Math(e.to_string()))?;
    let rows: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "cases": r.cases,
                "failures": r.failures,
                "first_failure": r.first_failure,
                "max_defect": num(r.max_defect),
            })
        })
        .collect();
    let passed = results.iter().all(|r| r.failures == 0);
    emit(out, &json!({ "seed": a.seed, "cases": a.cases, "passed": passed, "properties": rows }))?;
    Ok(passed)
}
