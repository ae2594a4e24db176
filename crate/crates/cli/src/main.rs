use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use halfint_core::coeffile::CoefficientFile;
use halfint_core::forms::{self, evaluate, parse_formspec, FormError};
use halfint_core::qseries::SeriesError;
use halfint_core::scalar::sign_of;
use halfint_core::{DirichletCharacter, HalfIntegralForm, IntegerSeries, RationalSeries};
use serde_json::{json, Value};

mod signs_cmd;
mod verify_cmd;

const DEFAULT_PREC: u64 = 100_000;
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "halfint",
    version,
    about = "Coefficient tables, Hecke operators and sign statistics for modular forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a coefficient table from a named form or a form expression.
    Build(BuildArgs),
    /// Shimura lift of a half-integral weight table.
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply T(p^2), T(p) or U_m, optionally checking for an eigenform.
    Hecke(HeckeArgs),
    /// Proportions of positive coefficients and sign-change reports.
    Signs(signs_cmd::SignsArgs),
    /// Run a verification suite and emit a JSON report.
    Verify(verify_cmd::VerifyArgs),
}

#[derive(clap::Args)]
struct BuildArgs {
    /// delta, g, Delta, G11, E4, or an expression such as "eta(1)^24".
    #[arg(long)]
    form: String,
    /// Largest exponent to compute.
    #[arg(long, default_value_t = DEFAULT_PREC)]
    prec: u64,
    /// Allow precision above the default limit.
    #[arg(long)]
    large: bool,
    #[arg(long)]
    out: PathBuf,
    /// Weight for expression forms, e.g. 13/2 or 12.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    level: Option<u64>,
    /// trivial:N or kronecker:D/mod:N
    #[arg(long)]
    character: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeckeOp {
    Tsq,
    Tp,
    U,
}

#[derive(clap::Args)]
struct HeckeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    op: HeckeOp,
    /// Prime for tsq/tp, index for u.
    #[arg(long)]
    p: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verify_eigen: bool,
    /// Where to write the eigen report; stdout if absent.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Whether the command's checks passed; errors are reported separately.
type Verdict = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => build(args).map(|_| true),
        Command::Lift { input, t, out } => lift(&input, t, &out).map(|_| true),
        Command::Hecke(args) => hecke(args),
        Command::Signs(args) => signs_cmd::run(args).map(|_| true),
        Command::Verify(args) => verify_cmd::run(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub(crate) fn read_table(path: &Path) -> Result<CoefficientFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse()
        .with_context(|| format!("parsing {}", path.display()))
}

pub(crate) fn read_half_integral(path: &Path) -> Result<(CoefficientFile, HalfIntegralForm)> {
    let file = read_table(path)?;
    let f = file
        .to_half_integral(false)
        .with_context(|| format!("{} is not a half-integral weight table", path.display()))?;
    Ok((file, f))
}

fn write_table(path: &Path, file: &CoefficientFile) -> Result<()> {
    fs::write(path, file.to_text()).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn emit_json(path: Option<&Path>, kind: &str, mut body: Value) -> Result<()> {
    body["schema"] = json!(format!("halfint.{kind}/{SCHEMA_VERSION}"));
    let text = serde_json::to_string_pretty(&body)? + "\n";
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_weight(s: &str) -> Result<u32> {
    let w = match s.strip_suffix("/2") {
        Some(num) => num.parse()?,
        None => 2 * s.parse::<u32>()?,
    };
    Ok(w)
}

fn build(args: BuildArgs) -> Result<()> {
    if args.prec == 0 {
        bail!("precision must be at least 1");
    }
    if args.prec > DEFAULT_PREC {
        if !args.large {
            bail!(
                "precision {} exceeds {DEFAULT_PREC}; pass --large to allow it",
                args.prec
            );
        }
        eprintln!(
            "warning: precision {} needs a lot of memory and time",
            args.prec
        );
    }
    let prec = args.prec;
    let mut file = match args.form.as_str() {
        "delta" => CoefficientFile::from_half_integral("delta", &forms::delta_form(prec)?),
        "g" => CoefficientFile::from_half_integral("g", &forms::g_form(prec)?),
        "Delta" => CoefficientFile::from_integral("Delta", &forms::ramanujan_delta(prec)?),
        "G11" => CoefficientFile::from_integral("G11", &forms::x0_11_form(prec)?),
        "E4" => CoefficientFile::from_integral("E4", &forms::e4_form(prec)?),
        text => build_expression(text, prec)?,
    };
    if let Some(w) = &args.weight {
        file.weight_num = Some(parse_weight(w).with_context(|| format!("bad weight {w:?}"))?);
    }
    if let Some(level) = args.level {
        file.level = Some(level);
        file.character
            .get_or_insert_with(|| DirichletCharacter::trivial(level));
    }
    if let Some(c) = &args.character {
        file.character = Some(c.parse()?);
    }
    write_table(&args.out, &file)
}

/// Tries exact integer arithmetic first and falls back to rationals when an
/// intermediate scalar is not integral.
fn build_expression(text: &str, prec: u64) -> Result<CoefficientFile> {
    let spec = parse_formspec(text)?;
    let id = spec.to_string();
    let end = prec as usize + 1;
    let integer: Result<IntegerSeries, FormError> = evaluate(&spec, end);
    let file = match integer {
        Ok(s) => CoefficientFile::from_series(&id, &s, prec)?,
        Err(FormError::Series(SeriesError::NotRepresentable(_))) => {
            let s: RationalSeries = evaluate(&spec, end)?;
            CoefficientFile::from_series(&id, &s, prec)?
        }
        Err(e) => return Err(e.into()),
    };
    Ok(file)
}

fn lift(input: &Path, t: u64, out: &Path) -> Result<()> {
    let (file, f) = read_half_integral(input)?;
    let lifted = halfint_core::hecke::shimura_lift(&f, t)?;
    write_table(
        out,
        &CoefficientFile::from_integral(&format!("lift({},t={t})", file.form_id), &lifted.lifted),
    )
}

fn hecke(args: HeckeArgs) -> Result<Verdict> {
    use halfint_core::hecke;
    let file = read_table(&args.input)?;
    let p = args.p;
    let (image, report) = match args.op {
        HeckeOp::Tsq => {
            let f = file.to_half_integral(false)?;
            let image = hecke::t_square_half(p, &f)?;
            let report = args
                .verify_eigen
                .then(|| hecke::half_integral_eigen_report(p, &f))
                .transpose()?;
            (
                CoefficientFile::from_half_integral(&format!("T({p}^2) {}", file.form_id), &image),
                report,
            )
        }
        HeckeOp::Tp => {
            let f = file.to_integral()?;
            let image = hecke::t_integral(p, &f)?;
            let report = args
                .verify_eigen
                .then(|| hecke::integral_eigen_report(p, &f))
                .transpose()?;
            (
                CoefficientFile::from_integral(&format!("T({p}) {}", file.form_id), &image),
                report,
            )
        }
        HeckeOp::U => {
            if args.verify_eigen {
                bail!("--verify-eigen applies to tsq and tp only");
            }
            if p == 0 {
                bail!("U index must be positive");
            }
            let coeffs = hecke::u_coeffs(p, &file.coeffs);
            let offset = coeffs
                .iter()
                .position(|a| sign_of(a) != 0)
                .unwrap_or(coeffs.len()) as u64;
            let image = CoefficientFile {
                form_id: format!("U({p}) {}", file.form_id),
                weight_num: file.weight_num,
                level: None,
                character: None,
                offset,
                coeffs,
            };
            (image, None)
        }
    };
    if let Some(out) = &args.out {
        write_table(out, &image)?;
    }
    let Some(report) = report else {
        return Ok(true);
    };
    let pass = report.is_eigen && report.bounds_hold();
    let op = match args.op {
        HeckeOp::Tsq => "tsq",
        _ => "tp",
    };
    emit_json(
        args.json.as_deref(),
        "eigen",
        json!({ "form": file.form_id, "op": op, "pass": pass, "report": report }),
    )?;
    Ok(pass)
}
