//! Plain-text coefficient tables.
//!
//! ```text
//! #halfint-coefficients v1
//! #form=delta
//! #weight=13/2
//! #level=4
//! #character=trivial:4
//! #precision=100
//! #offset=1
//! 1	1
//! 4	-56
//! ```
//!
//! Header lines come in this fixed order. Unknown metadata is written as `-`.
//! The body lists `n<TAB>a(n)` for the nonzero coefficients only, with
//! strictly increasing `n <= precision`. Every omitted `n` is zero.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::DirichletCharacter;
use crate::forms::{FormError, HalfIntegralForm, IntegralForm};
use crate::qseries::{Offset, QSeries};
use crate::scalar::Scalar;

pub const MAGIC: &str = "#halfint-coefficients v1";

const KEYS: [&str; 6] = [
    "form",
    "weight",
    "level",
    "character",
    "precision",
    "offset",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("weight {0}/2 is not half-integral")]
    NotHalfIntegral(u32),
    #[error("weight {0}/2 is not integral")]
    NotIntegral(u32),
    #[error("series offset {0} is not a non-negative integer")]
    BadOffset(Offset),
    #[error(transparent)]
    Form(#[from] FormError),
}

fn syntax(line: usize, msg: impl Into<String>) -> CoeffFileError {
    CoeffFileError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// A coefficient table `a(0), …, a(precision)` with optional metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFile {
    pub form_id: String,
    /// Twice the weight.
    pub weight_num: Option<u32>,
    pub level: Option<u64>,
    pub character: Option<DirichletCharacter>,
    /// Exponent of the leading term of the source series; coefficients below
    /// it are zero.
    pub offset: u64,
    /// `coeffs[n] = a(n)`, length `precision + 1`.
    pub coeffs: Vec<BigInt>,
}

impl CoefficientFile {
    pub fn precision(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    /// Reads `a(0..=prec)` from a series with a non-negative integral offset.
    pub fn from_series<T: Scalar>(
        form_id: &str,
        series: &QSeries<T>,
        prec: u64,
    ) -> Result<Self, CoeffFileError> {
        let off = series.offset();
        let offset = match off.to_integer() {
            Some(o) if o >= 0 => o as u64,
            _ => return Err(CoeffFileError::BadOffset(off)),
        };
        let coeffs = (0..=prec)
            .map(|n| {
                let c = series.coeff(n as i64).map_err(FormError::from)?;
                c.to_bigint().ok_or(FormError::NotIntegral(n))
            })
            .collect::<Result<Vec<_>, FormError>>()?;
        Ok(CoefficientFile {
            form_id: form_id.to_string(),
            weight_num: None,
            level: None,
            character: None,
            offset,
            coeffs,
        })
    }

    pub fn from_half_integral(form_id: &str, f: &HalfIntegralForm) -> Self {
        CoefficientFile {
            form_id: form_id.to_string(),
            weight_num: Some(f.weight_num()),
            level: Some(f.level()),
            character: Some(f.character().clone()),
            offset: leading_index(f.coeffs()),
            coeffs: f.coeffs().to_vec(),
        }
    }

    pub fn from_integral(form_id: &str, f: &IntegralForm) -> Self {
        CoefficientFile {
            form_id: form_id.to_string(),
            weight_num: Some(2 * f.weight()),
            level: Some(f.level()),
            character: Some(f.character().clone()),
            offset: leading_index(f.coeffs()),
            coeffs: f.coeffs().to_vec(),
        }
    }

    /// Plus-space membership is not recorded in the file; pass it explicitly.
    pub fn to_half_integral(&self, plus_space: bool) -> Result<HalfIntegralForm, CoeffFileError> {
        let w = self.weight_num.ok_or(CoeffFileError::Missing("weight"))?;
        if w % 2 == 0 {
            return Err(CoeffFileError::NotHalfIntegral(w));
        }
        let level = self.level.ok_or(CoeffFileError::Missing("level"))?;
        let chi = self
            .character
            .clone()
            .unwrap_or_else(|| DirichletCharacter::trivial(level));
        Ok(HalfIntegralForm::new(
            w,
            level,
            chi,
            self.coeffs.clone(),
            plus_space,
        )?)
    }

    pub fn to_integral(&self) -> Result<IntegralForm, CoeffFileError> {
        let w = self.weight_num.ok_or(CoeffFileError::Missing("weight"))?;
        if w % 2 != 0 {
            return Err(CoeffFileError::NotIntegral(w));
        }
        let level = self.level.ok_or(CoeffFileError::Missing("level"))?;
        let chi = self
            .character
            .clone()
            .unwrap_or_else(|| DirichletCharacter::trivial(level));
        Ok(IntegralForm::new(w / 2, level, chi, self.coeffs.clone())?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * self.coeffs.len() / 2 + 128);
        let dash = || "-".to_string();
        out.push_str(MAGIC);
        out.push('\n');
        let _ = writeln!(out, "#form={}", self.form_id);
        let _ = writeln!(
            out,
            "#weight={}",
            self.weight_num.map_or_else(dash, |w| format!("{w}/2"))
        );
        let _ = writeln!(
            out,
            "#level={}",
            self.level.map_or_else(dash, |l| l.to_string())
        );
        let _ = writeln!(
            out,
            "#character={}",
            self.character.as_ref().map_or_else(dash, |c| c.to_string())
        );
        let _ = writeln!(out, "#precision={}", self.precision());
        let _ = writeln!(out, "#offset={}", self.offset);
        for (n, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                let _ = writeln!(out, "{n}\t{a}");
            }
        }
        out
    }
}

fn leading_index(coeffs: &[BigInt]) -> u64 {
    coeffs
        .iter()
        .position(|a| !a.is_zero())
        .unwrap_or(coeffs.len()) as u64
}

fn optional<T>(
    value: &str,
    line: usize,
    parse: impl FnOnce(&str) -> Option<T>,
) -> Result<Option<T>, CoeffFileError> {
    if value == "-" {
        return Ok(None);
    }
    parse(value)
        .map(Some)
        .ok_or_else(|| syntax(line, format!("bad value {value:?}")))
}

impl FromStr for CoefficientFile {
    type Err = CoeffFileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, MAGIC)) => {}
            _ => return Err(syntax(1, format!("expected {MAGIC:?}"))),
        }
        let mut values = Vec::with_capacity(KEYS.len());
        for key in KEYS {
            let (line, text) = lines.next().ok_or(CoeffFileError::Missing(key))?;
            let value = text
                .strip_prefix('#')
                .and_then(|t| t.strip_prefix(key))
                .and_then(|t| t.strip_prefix('='))
                .ok_or_else(|| syntax(line, format!("expected #{key}=")))?;
            values.push((line, value));
        }
        let form_id = values[0].1.to_string();
        let weight_num = optional(values[1].1, values[1].0, |v| {
            v.strip_suffix("/2")?.parse().ok()
        })?;
        let level = optional(values[2].1, values[2].0, |v| v.parse().ok())?;
        let character = optional(values[3].1, values[3].0, |v| v.parse().ok())?;
        let precision: u64 = values[4]
            .1
            .parse()
            .map_err(|_| syntax(values[4].0, "bad precision"))?;
        let offset: u64 = values[5]
            .1
            .parse()
            .map_err(|_| syntax(values[5].0, "bad offset"))?;
        let len = usize::try_from(precision)
            .ok()
            .and_then(|p| p.checked_add(1))
            .ok_or_else(|| syntax(values[4].0, "precision too large"))?;

        let mut coeffs = vec![BigInt::zero(); len];
        let mut last: Option<u64> = None;
        for (line, text) in lines {
            let (n, a) = text
                .split_once('\t')
                .ok_or_else(|| syntax(line, "expected n<TAB>a(n)"))?;
            let n: u64 = n.parse().map_err(|_| syntax(line, "bad index"))?;
            let a: BigInt = a.parse().map_err(|_| syntax(line, "bad coefficient"))?;
            if last.is_some_and(|l| n <= l) {
                return Err(syntax(line, "indices must increase"));
            }
            if n > precision {
                return Err(syntax(
                    line,
                    format!("index {n} beyond precision {precision}"),
                ));
            }
            if n < offset {
                return Err(syntax(line, format!("index {n} below offset {offset}")));
            }
            if a.is_zero() {
                return Err(syntax(line, "zero coefficients are omitted"));
            }
            coeffs[n as usize] = a;
            last = Some(n);
        }
        Ok(CoefficientFile {
            form_id,
            weight_num,
            level,
            character,
            offset,
            coeffs,
        })
    }
}
