use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use halfint_core::forms::plus_space_check;
use halfint_core::hecke::{self, HeckeError};
use halfint_core::signs;
use serde_json::{json, Value};

use crate::{emit_json, read_half_integral, read_table};

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    PlusSpace,
    Recurrence,
    Bounds,
    Prop2,
}

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    suite: Suite,
    /// Report destination; stdout if absent.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Square-free t for the recurrence suite.
    #[arg(long, default_value_t = 1)]
    t: u64,
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    p: Vec<u64>,
    /// Search bound for the prop2 suite; defaults to min(10000, precision).
    #[arg(long = "X")]
    x: Option<u64>,
}

pub fn run(args: VerifyArgs) -> Result<bool> {
    let (name, pass, results) = match args.suite {
        Suite::PlusSpace => {
            let (_, f) = read_half_integral(&args.input)?;
            let violations = plus_space_check(&f);
            let witnesses: Vec<Value> = violations
                .iter()
                .map(|&n| json!({ "n": n, "value": f.coeffs()[n as usize].to_string() }))
                .collect();
            (
                "plus-space",
                violations.is_empty(),
                json!({ "checked_up_to": f.prec(), "violations": witnesses }),
            )
        }
        Suite::Recurrence => {
            let (_, f) = read_half_integral(&args.input)?;
            let mut pass = true;
            let mut reports = Vec::new();
            for &p in &args.p {
                match hecke::recurrence_check(&f, args.t, p) {
                    Ok(r) => {
                        pass &= r.passed;
                        reports.push(json!(r));
                    }
                    Err(e @ HeckeError::NotEigen { .. }) => {
                        pass = false;
                        reports.push(
                            json!({ "t": args.t, "p": p, "passed": false, "error": e.to_string() }),
                        );
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            ("recurrence", pass, json!(reports))
        }
        Suite::Bounds => {
            let file = read_table(&args.input)?;
            let reports = match file.weight_num {
                Some(w) if w % 2 == 0 => {
                    let f = file.to_integral()?;
                    args.p
                        .iter()
                        .map(|&p| hecke::integral_eigen_report(p, &f))
                        .collect::<Result<Vec<_>, _>>()?
                }
                _ => {
                    let f = file.to_half_integral(false)?;
                    args.p
                        .iter()
                        .map(|&p| hecke::half_integral_eigen_report(p, &f))
                        .collect::<Result<Vec<_>, _>>()?
                }
            };
            (
                "bounds",
                reports.iter().all(|r| r.is_eigen && r.bounds_hold()),
                json!(reports),
            )
        }
        Suite::Prop2 => {
            let (_, f) = read_half_integral(&args.input)?;
            let x = args.x.unwrap_or(10_000.min(f.prec()));
            let mut found = Vec::new();
            for &p in &args.p {
                for eps in [1, -1] {
                    found.push(signs::sign_witnesses(&f, p, eps, x)?);
                }
            }
            (
                "prop2",
                found.iter().all(|w| w.found_both()),
                json!({ "X": x, "witnesses": found }),
            )
        }
    };
    let form = read_table(&args.input)?.form_id;
    emit_json(
        args.json.as_deref(),
        "verify",
        json!({ "suite": name, "form": form, "pass": pass, "results": results }),
    )?;
    Ok(pass)
}
