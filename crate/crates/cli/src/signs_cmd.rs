use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use halfint_core::signs::{self, SignStatsReport};
use serde_json::{json, Map, Value};

use crate::{emit_json, read_table};

#[derive(clap::Args)]
pub struct SignsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated subset of tot,fund.
    #[arg(long, default_value = "tot,fund")]
    stats: String,
    #[arg(
        long = "X-list",
        visible_alias = "x-list",
        value_delimiter = ',',
        default_value = "10,100,1000,10000,100000"
    )]
    x_list: Vec<u64>,
    /// Table destination; stdout if absent and no subsequence mode is chosen.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Report signs of a(t n^2).
    #[arg(long)]
    t: Option<u64>,
    /// Report signs of a(t p^(2m)) for m <= m-max, with t from --t or 1.
    #[arg(long)]
    powers_p: Option<u64>,
    #[arg(long, default_value_t = 6)]
    m_max: usize,
    /// Square-free survey restricted by Kronecker conditions, e.g. "3:1,5:-1".
    #[arg(long)]
    dprime: Option<String>,
    /// Subsequence report destination; stdout if absent.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Three decimals below 10⁴, six from there on.
fn decimals(x: u64) -> u32 {
    if x < 10_000 {
        3
    } else {
        6
    }
}

fn parse_dprime(s: &str) -> Result<(Vec<u64>, Vec<i32>)> {
    let mut primes = Vec::new();
    let mut eps = Vec::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (p, e) = part
            .split_once(':')
            .with_context(|| format!("expected p:eps, got {part:?}"))?;
        let e: i32 = e.trim().parse()?;
        if e != 1 && e != -1 {
            bail!("eps must be 1 or -1, got {e}");
        }
        primes.push(p.trim().parse()?);
        eps.push(e);
    }
    Ok((primes, eps))
}

pub fn run(args: SignsArgs) -> Result<()> {
    let file = read_table(&args.input)?;
    let prec = file.precision();
    let mut want_tot = false;
    let mut want_fund = false;
    for s in args.stats.split(',') {
        match s.trim() {
            "tot" => want_tot = true,
            "fund" => want_fund = true,
            other => bail!("unknown statistic {other:?}"),
        }
    }
    let subsequence = args.t.is_some() || args.powers_p.is_some() || args.dprime.is_some();
    let half = if want_fund || subsequence {
        Some(file.to_half_integral(false)?)
    } else {
        None
    };

    if args.csv.is_some() || !subsequence {
        let mut csv = String::from("X,R_tot,R_fund\n");
        for &x in &args.x_list {
            if x == 0 || x > prec {
                bail!("X = {x} is outside 1..={prec}");
            }
            let d = decimals(x);
            let tot = if want_tot {
                SignStatsReport::from_indexed(x, (1..=x).map(|n| (n, &file.coeffs[n as usize])))?
                    .render(d)
            } else {
                String::new()
            };
            let fund = match &half {
                Some(f) if want_fund => signs::r_plus_fund(f, x)?.render(d),
                _ => String::new(),
            };
            let _ = writeln!(csv, "{x},{tot},{fund}");
        }
        match &args.csv {
            Some(path) => {
                fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
            }
            None => print!("{csv}"),
        }
    }

    if !subsequence {
        return Ok(());
    }
    let f = half.expect("loaded above");
    let mut body = Map::new();
    body.insert("form".into(), json!(file.form_id));
    if let (Some(t), None) = (args.t, args.powers_p) {
        let x = (1u64..)
            .take_while(|n| t * n * n <= prec)
            .last()
            .context("t exceeds the precision")?;
        let seq = signs::subseq_t_n2(&f, t, x)?;
        let report = SignStatsReport::from_indexed(x, (1..=x).zip(seq.iter()))?;
        body.insert("t_n2".into(), json!({ "t": t, "report": report }));
    }
    if let Some(p) = args.powers_p {
        let report = signs::power_sequence_signs(&f, args.t.unwrap_or(1), p, args.m_max)?;
        body.insert("powers".into(), json!(report));
    }
    if let Some(spec) = &args.dprime {
        let (primes, eps) = parse_dprime(spec)?;
        let x = *args.x_list.iter().max().context("empty X list")?;
        let survey = signs::squarefree_sign_survey(&f, x, &primes, &eps)?;
        body.insert(
            "dprime".into(),
            json!({ "primes": primes, "eps": eps, "survey": survey }),
        );
    }
    emit_json(args.json.as_deref(), "signs", Value::Object(body))
}
