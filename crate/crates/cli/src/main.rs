//! `pcf`: evaluate parabolic cylinder functions with certified remainder
//! bounds, regenerate the ratio tables and emit plot data.

mod output;
mod regions;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pcf_core::integral::{coefficients, expansion_ibp, fig_weight_curves};
use pcf_core::oracle::{pcf_values, u_and_uprime, u_real, v_ref, vprime_ref};
use pcf_core::poincare::{remainder_bound, whittaker_exact};
use pcf_core::precision::{to_decimal, to_plain_decimal};
use pcf_core::report::{BoundReport, VariationMode};
use pcf_core::tables::{axes, run_table};
use pcf_core::uniform::{coeffs, eval_neg_a, eval_neg_z, eval_pos_z, fig_phi_curves, fig_variations, MAX_ORDER};
use pcf_core::value::LogScaled;
use pcf_core::{PcfError, PrecisionContext};
use rug::{Complex, Float};
use serde_json::{json, Value};

use output::{num, text, Format, Output, Table};
use regions::{regions_table, RegionSpec};

#[derive(Parser)]
#[command(name = "pcf", version, about = "Parabolic cylinder functions with certified remainder bounds")]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 40)]
    digits: u32,
    /// Output format; eval defaults to text, everything else to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid computations (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one expansion (or the oracle) at a point.
    Eval(EvalArgs),
    /// Recompute one of the five ratio tables.
    Table(TableArgs),
    /// Region vertices, boundaries and point classifications.
    Regions(RegionArgs),
    /// Curve data for the coefficient and weight-function plots.
    Figdata(FigArgs),
    /// The uniform-expansion polynomials, or f_k(λ) values.
    Coeffs(CoeffArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Oracle,
    Poincare,
    UniformPos,
    UniformNegz,
    UniformNega,
    Ibp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FunctionArg {
    U,
    Uprime,
    V,
    Vprime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariationArg {
    Piecewise,
    Hyp2f1,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Real part of the argument (the Whittaker variable for poincare).
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Imaginary part of the argument.
    #[arg(long, allow_hyphen_values = true)]
    zi: Option<String>,
    /// Scaled argument for the uniform methods, z = 2t√|a|.
    #[arg(long)]
    t: Option<String>,
    /// Number of terms kept.
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Also compute the true remainder from the oracle.
    #[arg(long)]
    oracle: bool,
    /// Variation bound used by the poincare method.
    #[arg(long, value_enum, default_value = "piecewise")]
    variation: VariationArg,
    #[arg(long, value_enum, default_value = "u")]
    function: FunctionArg,
    /// Exit 1 unless the ratio true/bound is at most 1 (implies --oracle).
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct TableArgs {
    /// 1 to 5.
    which: u32,
    /// Compare with the stored values; exit 1 on any mismatch.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Half-width of the window (default max(4, 4|a|)).
    #[arg(long)]
    extent: Option<f64>,
    /// Classify a grid with this spacing over the upper half of the window.
    #[arg(long)]
    step: Option<f64>,
    /// Classify x,y; may be repeated.
    #[arg(long, allow_hyphen_values = true)]
    point: Vec<String>,
}

#[derive(Args)]
struct FigArgs {
    /// 2, 3 or 4.
    which: u32,
    #[arg(long)]
    samples: Option<usize>,
    /// Upper end of the λ range (figure 4).
    #[arg(long, default_value_t = 20.0)]
    lambda_max: f64,
    /// Fixed z for ρ₁ (figure 4).
    #[arg(long, default_value_t = 10.0)]
    z: f64,
}

#[derive(Args)]
struct CoeffArgs {
    /// Highest index s of φ_s and ψ_s, or the number of f_k with --lambda.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Evaluate f_0..f_{order−1} at this λ instead of printing polynomials.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Numeric(String),
    CheckFailed(String),
}

impl From<PcfError> for CliError {
    fn from(e: PcfError) -> Self {
        if e.is_invalid_input() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("write failed: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("invalid parameters: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return invalid("--jobs must be positive");
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let ctx = PrecisionContext::new(cli.digits)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Eval(args) => {
            let (res, check) = cmd_eval(&args, &ctx)?;
            res.emit(cli.format.unwrap_or(Format::Text), out)?;
            check
        }
        Command::Table(args) => {
            let (res, check) = cmd_table(&args, &ctx)?;
            res.emit(cli.format.unwrap_or(Format::Csv), out)?;
            check
        }
        Command::Regions(args) => {
            cmd_regions(&args)?.emit(cli.format.unwrap_or(Format::Csv), out)?;
            Ok(())
        }
        Command::Figdata(args) => {
            cmd_figdata(&args, &ctx)?.emit(cli.format.unwrap_or(Format::Csv), out)?;
            Ok(())
        }
        Command::Coeffs(args) => {
            cmd_coeffs(&args, &ctx)?.emit(cli.format.unwrap_or(Format::Csv), out)?;
            Ok(())
        }
    }
}

// ---- eval ----

/// The point after method/parameter compatibility checks.
struct EvalPoint {
    a: Float,
    z: Option<Complex>,
    t: Option<Float>,
}

fn parse(ctx: &PrecisionContext, name: &str, s: &str) -> CliResult<Float> {
    ctx.parse(s).map_err(|_| CliError::Invalid(format!("--{name}: cannot parse {s:?}")))
}

fn validate(args: &EvalArgs, ctx: &PrecisionContext) -> CliResult<EvalPoint> {
    use MethodArg::*;
    let p = ctx.bits();
    let a = parse(ctx, "a", &args.a)?;
    let zr = args.z.as_deref().map(|s| parse(ctx, "z", s)).transpose()?;
    let zi = args.zi.as_deref().map(|s| parse(ctx, "zi", s)).transpose()?;
    let t = args.t.as_deref().map(|s| parse(ctx, "t", s)).transpose()?;
    let uniform = matches!(args.method, UniformPos | UniformNegz | UniformNega);
    let complex_ok = matches!(args.method, Oracle | Poincare);

    if zi.is_some() && zr.is_none() {
        return invalid("--zi needs --z");
    }
    if zi.as_ref().is_some_and(|v| !v.is_zero()) && !complex_ok {
        return invalid(format!("{:?} takes a real argument only", args.method));
    }
    match (zr.is_some(), t.is_some()) {
        (true, true) => return invalid("give either --z or --t, not both"),
        (false, false) => return invalid("missing --z (or --t for the uniform methods)"),
        (false, true) if !uniform => return invalid("--t applies to the uniform methods only"),
        _ => {}
    }
    let allowed: &[FunctionArg] = match args.method {
        Oracle | UniformNega => &[FunctionArg::U, FunctionArg::Uprime, FunctionArg::V, FunctionArg::Vprime],
        UniformPos | UniformNegz => &[FunctionArg::U, FunctionArg::Uprime],
        Poincare | Ibp => &[FunctionArg::U],
    };
    if !allowed.contains(&args.function) {
        return invalid(format!("{:?} does not provide {:?}", args.method, args.function));
    }
    if args.method != Oracle && args.n == 0 {
        return invalid("--n must be at least 1");
    }
    if uniform && args.n as usize > MAX_ORDER {
        return invalid(format!("--n exceeds {MAX_ORDER}"));
    }
    let z = zr.map(|re| Complex::with_val(p, (re, zi.unwrap_or_else(|| Float::new(p)))));
    let t = match (t, &z) {
        (Some(t), _) => Some(t),
        (None, Some(z)) if uniform => {
            let x = z.real();
            let need_neg = args.method == UniformNegz;
            if (need_neg && *x > 0) || (!need_neg && *x < 0) {
                return invalid(format!("{:?} needs z of the other sign", args.method));
            }
            if a.is_zero() {
                return invalid("the uniform methods need a ≠ 0");
            }
            let scale = Float::with_val(p, Float::with_val(p, a.abs_ref()).sqrt() * 2u32);
            Some(Float::with_val(p, Float::with_val(p, x.abs_ref()) / scale))
        }
        _ => None,
    };
    Ok(EvalPoint { a, z, t })
}

fn complex_json(c: &Complex, digits: u32) -> Value {
    if c.imag().is_zero() {
        text(to_decimal(c.real(), digits))
    } else {
        json!([to_decimal(c.real(), digits), to_decimal(c.imag(), digits)])
    }
}

fn complex_text(c: &Complex, digits: u32) -> String {
    if c.imag().is_zero() {
        to_plain_decimal(c.real(), digits as usize)
    } else {
        let im = c.imag();
        let sign = if im.is_sign_negative() { "-" } else { "+" };
        let mag = Float::with_val(im.prec(), im.abs_ref());
        format!("{} {sign} {}i", to_plain_decimal(c.real(), digits as usize), to_plain_decimal(&mag, digits as usize))
    }
}

fn opt_f64(v: &Option<Float>) -> Value {
    v.as_ref().map_or(Value::Null, |x| num(x.to_f64()))
}

/// exact / prefactor, the quantity the partial sum approximates.
fn scaled(exact: &LogScaled<Complex>, pref: &LogScaled<Complex>) -> Complex {
    let p = pref.mantissa.prec().0;
    let m = Complex::with_val(p, &exact.mantissa / &pref.mantissa);
    let shift = Float::with_val(p, &exact.logscale - &pref.logscale).exp();
    m * shift
}

fn real_arg(pt: &EvalPoint, p: u32) -> Float {
    Float::with_val(p, pt.z.as_ref().expect("validated").real())
}

/// Runs the selected expansion. Returns the report and the oracle value it
/// is compared with, when requested.
fn expansion(
    args: &EvalArgs,
    pt: &EvalPoint,
    want_exact: bool,
    ctx: &PrecisionContext,
) -> CliResult<(BoundReport, Option<LogScaled<Complex>>, Value)> {
    use FunctionArg::*;
    let p = ctx.bits();
    let n = args.n;
    let (rep, exact, point) = match args.method {
        MethodArg::Poincare => {
            let z = pt.z.as_ref().expect("validated");
            let mode = match args.variation {
                VariationArg::Piecewise => VariationMode::Piecewise,
                VariationArg::Hyp2f1 => VariationMode::Hyp2f1,
            };
            let rep = remainder_bound(&pt.a, z, n, mode, false, ctx)?;
            let exact = if want_exact { Some(whittaker_exact(&pt.a, z, ctx)?) } else { None };
            (rep, exact, Value::Null)
        }
        MethodArg::Ibp => {
            let x = real_arg(pt, p);
            let rep = expansion_ibp(&pt.a, &x, n, false, ctx)?;
            let exact = if want_exact { Some(u_real(&pt.a, &x, ctx)?.0.to_complex()) } else { None };
            (rep, exact, Value::Null)
        }
        MethodArg::UniformPos | MethodArg::UniformNegz => {
            let t = pt.t.as_ref().expect("validated");
            let pair = if args.method == MethodArg::UniformPos {
                eval_pos_z(&pt.a, t, n as usize, false, ctx)?
            } else {
                eval_neg_z(&pt.a, t, n as usize, false, ctx)?
            };
            let z = pair.point.z();
            let exact = if want_exact {
                let (u, up) = u_real(&pt.a, &z, ctx)?;
                Some(if args.function == U { u } else { up }.to_complex())
            } else {
                None
            };
            let point = json!({"z": to_decimal(&z, ctx.digits()), "t": to_decimal(t, ctx.digits()),
                               "tau": to_decimal(&pair.point.tau, ctx.digits())});
            (if args.function == U { pair.value } else { pair.derivative }, exact, point)
        }
        MethodArg::UniformNega => {
            let t = pt.t.as_ref().expect("validated");
            let r = eval_neg_a(&pt.a, t, n as usize, false, ctx)?;
            let z = r.point.z();
            let exact = if want_exact {
                Some(match args.function {
                    U => u_real(&pt.a, &z, ctx)?.0,
                    Uprime => u_real(&pt.a, &z, ctx)?.1,
                    V => v_ref(&pt.a, &z, ctx)?,
                    Vprime => vprime_ref(&pt.a, &z, ctx)?,
                }
                .to_complex())
            } else {
                None
            };
            let point = json!({"z": to_decimal(&z, ctx.digits()), "t": to_decimal(t, ctx.digits()),
                               "tau": to_decimal(&r.point.tau, ctx.digits())});
            let rep = match args.function {
                U => r.u,
                Uprime => r.uprime,
                V => r.v,
                Vprime => r.vprime,
            };
            (rep, exact, point)
        }
        MethodArg::Oracle => unreachable!(),
    };
    Ok((rep, exact, point))
}

fn params_json(args: &EvalArgs, pt: &EvalPoint, digits: u32, extra: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("a".into(), text(to_decimal(&pt.a, digits)));
    if let Some(z) = &pt.z {
        m.insert("z".into(), complex_json(z, digits));
    }
    if let Some(t) = &pt.t {
        m.insert("t".into(), text(to_decimal(t, digits)));
    }
    if args.method != MethodArg::Oracle {
        m.insert("n".into(), json!(args.n));
    }
    if args.method == MethodArg::Poincare {
        m.insert("variation".into(), text(format!("{:?}", args.variation).to_lowercase()));
    }
    m.insert("function".into(), text(format!("{:?}", args.function).to_lowercase()));
    if let Value::Object(e) = extra {
        m.extend(e.into_iter().filter(|(_, v)| !v.is_null()));
    }
    Value::Object(m)
}

fn value_json(v: &LogScaled<Complex>, digits: u32) -> Value {
    json!({"mantissa": complex_json(&v.mantissa, digits), "logscale": to_decimal(&v.logscale, digits)})
}

fn value_text(v: &LogScaled<Complex>, digits: u32) -> String {
    if v.logscale.is_zero() {
        complex_text(&v.mantissa, digits)
    } else {
        format!("({}) * exp({})", complex_text(&v.mantissa, digits), to_decimal(&v.logscale, digits.min(20)))
    }
}

fn fmt_opt(v: &Option<Float>) -> String {
    v.as_ref().map_or("-".into(), |x| to_decimal(x, 6))
}

fn cmd_eval(args: &EvalArgs, ctx: &PrecisionContext) -> CliResult<(Output, CliResult<()>)> {
    let pt = validate(args, ctx)?;
    let digits = ctx.digits();
    // Printed digits stay below the working precision so guard bits never show.
    let shown = digits.saturating_sub(5).clamp(6, 40).min(digits);

    if args.method == MethodArg::Oracle {
        let z = pt.z.as_ref().expect("validated");
        let value = match args.function {
            FunctionArg::U | FunctionArg::Uprime => {
                let (u, up) = u_and_uprime(&pt.a, z, ctx)?;
                if args.function == FunctionArg::U { u } else { up }
            }
            FunctionArg::V | FunctionArg::Vprime => {
                if !z.imag().is_zero() {
                    return invalid("V and V' are evaluated for real z only");
                }
                let vals = pcf_values(&pt.a, &real_arg(&pt, ctx.bits()), ctx)?;
                let v = if args.function == FunctionArg::V { vals.v } else { vals.vprime };
                v.ok_or_else(|| CliError::Invalid("V is undefined where Γ(½+a) has a pole".into()))?.to_complex()
            }
        };
        let plain = LogScaled { mantissa: value.value(), logscale: Float::new(ctx.bits()) };
        let json = json!({
            "params": params_json(args, &pt, digits, Value::Null),
            "method": "oracle",
            "value": value_json(&value, digits),
            "bound": Value::Null,
            "exact_remainder": Value::Null,
            "ratio": Value::Null,
            "region": Value::Null,
            "digits": digits,
        });
        let text_rows = vec![
            ("method".into(), "oracle".into()),
            ("function".into(), format!("{:?}", args.function).to_lowercase()),
            ("value".into(), value_text(&plain, shown)),
            ("digits".into(), digits.to_string()),
        ];
        let mut csv = Table::new(&["method", "function", "mantissa_re", "mantissa_im", "logscale", "digits"]);
        csv.push(vec![
            text("oracle"),
            text(format!("{:?}", args.function).to_lowercase()),
            text(to_decimal(value.mantissa.real(), digits)),
            text(to_decimal(value.mantissa.imag(), digits)),
            text(to_decimal(&value.logscale, digits)),
            json!(digits),
        ]);
        return Ok((Output::Record { json, text: text_rows, csv }, Ok(())));
    }

    let want_exact = args.oracle || args.check;
    let (mut rep, exact, point) = expansion(args, &pt, want_exact, ctx)?;
    let exact_scaled = exact.as_ref().map(|e| scaled(e, &rep.prefactor));
    if let Some(e) = &exact {
        rep.set_exact(e);
    }
    let approx = rep.approximation();
    let region = rep.region.map(|r| r.to_string());
    let json = json!({
        "params": params_json(args, &pt, digits, json!({"point": point})),
        "method": rep.method.as_str(),
        "value": value_json(&approx, digits),
        "bound": opt_f64(&rep.bound),
        "exact_remainder": opt_f64(&rep.exact_remainder),
        "ratio": opt_f64(&rep.ratio),
        "region": region,
        "digits": digits,
        "partial_sum": complex_json(&rep.partial_sum, digits),
        "prefactor": value_json(&rep.prefactor, digits),
        "exact_scaled": exact_scaled.as_ref().map(|c| complex_json(c, digits)),
        "derivative_bound": opt_f64(&rep.derivative_bound),
    });
    let mut text_rows: Vec<(String, String)> = vec![
        ("method".into(), rep.method.as_str().into()),
        ("function".into(), format!("{:?}", args.function).to_lowercase()),
        ("n".into(), args.n.to_string()),
        ("value".into(), value_text(&approx, shown)),
        ("partial sum".into(), complex_text(&rep.partial_sum, shown.min(20))),
    ];
    if let Some(c) = &exact_scaled {
        text_rows.push(("oracle (scaled)".into(), complex_text(c, shown.min(20))));
    }
    text_rows.push(("bound".into(), fmt_opt(&rep.bound)));
    if rep.derivative_bound.is_some() {
        text_rows.push(("derivative bound".into(), fmt_opt(&rep.derivative_bound)));
    }
    text_rows.push(("exact remainder".into(), fmt_opt(&rep.exact_remainder)));
    text_rows.push(("ratio".into(), rep.ratio.as_ref().map_or("-".into(), |r| to_plain_decimal(r, 6))));
    if let Some(r) = &region {
        text_rows.push(("region".into(), r.clone()));
    }
    text_rows.push(("digits".into(), digits.to_string()));

    let mut csv = Table::new(&[
        "method",
        "function",
        "n",
        "partial_sum",
        "exact_scaled",
        "logscale",
        "bound",
        "exact_remainder",
        "ratio",
        "region",
        "digits",
    ]);
    csv.push(vec![
        text(rep.method.as_str()),
        text(format!("{:?}", args.function).to_lowercase()),
        json!(args.n),
        text(complex_text(&rep.partial_sum, digits)),
        exact_scaled.as_ref().map_or(Value::Null, |c| text(complex_text(c, digits))),
        text(to_decimal(&rep.prefactor.logscale, digits)),
        opt_f64(&rep.bound),
        opt_f64(&rep.exact_remainder),
        opt_f64(&rep.ratio),
        region.map_or(Value::Null, text),
        json!(digits),
    ]);

    let check = if args.check {
        match rep.ratio_f64() {
            Some(r) if r <= 1.0 => Ok(()),
            Some(r) => Err(CliError::CheckFailed(format!("ratio {r} exceeds 1"))),
            None => Err(CliError::CheckFailed("no bound is defined for this expansion".into())),
        }
    } else {
        Ok(())
    };
    Ok((Output::Record { json, text: text_rows, csv }, check))
}

// ---- table ----

fn grid_value(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        json!(x as i64)
    } else {
        num(x)
    }
}

fn cmd_table(args: &TableArgs, ctx: &PrecisionContext) -> CliResult<(Output, CliResult<()>)> {
    if !(1..=5).contains(&args.which) {
        return invalid(format!("no table {}; expected 1..5", args.which));
    }
    let run = run_table(args.which, ctx)?;
    let (rname, cname) = axes(args.which);
    let cols: &[&str] = if rname == "n" {
        &["n", "j", "rho", "expected", "pass"]
    } else {
        &["a", "t", "rho", "expected", "pass"]
    };
    let mut t = Table::new(cols);
    for c in &run.cells {
        t.push(vec![grid_value(c.row), grid_value(c.col), num(c.rho), c.expected.map_or(Value::Null, num), json!(c.pass)]);
    }
    let check = if args.check && !run.passed() {
        for c in run.failures() {
            eprintln!(
                "table {} {rname}={} {cname}={}: rho={:.6} expected={} tolerance={}",
                run.which,
                c.row,
                c.col,
                c.rho,
                c.expected.map_or("-".into(), |e| e.to_string()),
                run.tolerance
            );
        }
        let bad = run.failures().count();
        Err(CliError::CheckFailed(format!("table {}: {bad} of {} entries outside tolerance", run.which, run.cells.len())))
    } else {
        Ok(())
    };
    Ok((Output::Table(t), check))
}

// ---- regions ----

fn parse_point(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Invalid(format!("--point expects x,y; got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    if x.is_finite() && y.is_finite() {
        Ok((x, y))
    } else {
        Err(bad())
    }
}

fn cmd_regions(args: &RegionArgs) -> CliResult<Output> {
    if !args.a.is_finite() {
        return invalid("--a must be finite");
    }
    let extent = args.extent.unwrap_or(4.0 * args.a.abs().max(1.0));
    if !(extent > 0.0 && extent.is_finite()) {
        return invalid("--extent must be positive");
    }
    if let Some(h) = args.step {
        if !(h > 0.0) || extent / h > 2000.0 {
            return invalid("--step must be positive and at least extent/2000");
        }
    }
    let points = args.point.iter().map(|s| parse_point(s)).collect::<CliResult<Vec<_>>>()?;
    Ok(Output::Table(regions_table(&RegionSpec { a: args.a, extent, step: args.step, points })))
}

// ---- figdata ----

fn cmd_figdata(args: &FigArgs, ctx: &PrecisionContext) -> CliResult<Output> {
    let samples = args.samples.unwrap_or(if args.which == 4 { 40 } else { 100 });
    if samples == 0 {
        return invalid("--samples must be positive");
    }
    let t = match args.which {
        2 => {
            let mut t = Table::new(&["tau", "phi1", "phi2", "phi3"]);
            for r in fig_phi_curves(samples) {
                t.push(r.iter().map(|&v| num(v)).collect());
            }
            t
        }
        3 => {
            let mut t =
                Table::new(&["s", "tau", "phi", "variation", "majorant", "variation_left", "majorant_left"]);
            for r in fig_variations(samples)? {
                t.push(vec![
                    json!(r.s),
                    num(r.tau),
                    num(r.phi),
                    num(r.variation),
                    num(r.majorant),
                    num(r.variation_left),
                    num(r.majorant_left),
                ]);
            }
            t
        }
        4 => {
            if !(args.lambda_max > 0.0 && args.lambda_max.is_finite()) {
                return invalid("--lambda-max must be positive");
            }
            if !(args.z > 0.0 && args.z.is_finite()) {
                return invalid("--z must be positive");
            }
            let mut t = Table::new(&["lambda", "f1", "m1", "scaled_bound", "rho1", "rho1_limit"]);
            for r in fig_weight_curves(args.lambda_max, samples, args.z, ctx)? {
                t.push(vec![num(r.lambda), num(r.f1), num(r.m1), num(r.scaled_bound), num(r.rho1), num(r.rho1_limit)]);
            }
            t
        }
        w => return invalid(format!("no figure data for {w}; expected 2, 3 or 4")),
    };
    Ok(Output::Table(t))
}

// ---- coeffs ----

fn cmd_coeffs(args: &CoeffArgs, ctx: &PrecisionContext) -> CliResult<Output> {
    match &args.lambda {
        None => {
            if args.order > MAX_ORDER {
                return invalid(format!("--order exceeds {MAX_ORDER}"));
            }
            let table = coeffs(args.order)?;
            let mut t = Table::new(&["family", "s", "degree", "polynomial"]);
            for (family, polys) in [("phi", &table.phi), ("psi", &table.psi)] {
                for (s, poly) in polys.iter().enumerate().take(args.order + 1) {
                    t.push(vec![text(family), json!(s), json!(poly.degree()), text(poly.to_string_in("tau"))]);
                }
            }
            Ok(Output::Table(t))
        }
        Some(l) => {
            if args.order == 0 || args.order > 12 {
                return invalid("--order must be in 1..=12 with --lambda");
            }
            let lam = parse(ctx, "lambda", l)?;
            let fk = coefficients(&lam, args.order as u32, ctx.bits())?;
            let mut t = Table::new(&["k", "lambda", "f_k"]);
            for (k, f) in fk.iter().enumerate() {
                t.push(vec![json!(k), text(to_decimal(&lam, ctx.digits())), text(to_decimal(f, ctx.digits()))]);
            }
            Ok(Output::Table(t))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert!(matches!(CliError::from(PcfError::OutsideRegion), CliError::Invalid(_)));
        assert!(matches!(CliError::from(PcfError::Convergence("x".into())), CliError::Numeric(_)));
        assert!(matches!(CliError::from(PcfError::SelfCheck("x".into())), CliError::Numeric(_)));
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1.5, -2").unwrap(), (1.5, -2.0));
        assert!(parse_point("1").is_err());
        assert!(parse_point("nan,0").is_err());
    }
}
