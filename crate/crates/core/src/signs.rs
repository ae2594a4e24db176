//! Sign statistics of Fourier coefficients.
//!
//! A sign change is an adjacent pair of opposite signs after zeros have been
//! deleted. Positions are reported as the index of the second entry of the
//! pair, using whatever indexing the caller's sequence carries (`n` for
//! `a(n)`, `t` for square-free surveys, `m` for `a(t p^(2m))`).

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, kronecker, ArithError};
use crate::forms::HalfIntegralForm;
use crate::hecke::{self, HeckeError};
use crate::scalar::sign_of;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignsError {
    #[error("cutoff {x} exceeds the precision {prec}")]
    Range { x: u64, prec: u64 },
    #[error("no nonzero coefficients up to {0}")]
    NoNonzero(u64),
    #[error("primes and signs have different lengths")]
    Mismatched,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// Counts, the exact ratio `n_pos / (n_pos + n_neg)` and the sign changes of
/// an indexed sequence up to the cutoff `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignStatsReport {
    pub x: u64,
    pub n_pos: u64,
    pub n_neg: u64,
    pub n_zero_skipped: u64,
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub ratio_decimal: String,
    pub sign_change_count: u64,
    pub change_positions: Vec<u64>,
}

impl SignStatsReport {
    /// Builds a report from `(index, value)` pairs in increasing index order.
    pub fn from_indexed<'a>(
        x: u64,
        entries: impl IntoIterator<Item = (u64, &'a BigInt)>,
    ) -> Result<Self, SignsError> {
        let (mut n_pos, mut n_neg, mut n_zero) = (0u64, 0u64, 0u64);
        let mut last_sign = 0;
        let mut positions = Vec::new();
        for (n, v) in entries {
            let s = sign_of(v);
            match s {
                1 => n_pos += 1,
                -1 => n_neg += 1,
                _ => {
                    n_zero += 1;
                    continue;
                }
            }
            if last_sign != 0 && s != last_sign {
                positions.push(n);
            }
            last_sign = s;
        }
        let den = n_pos + n_neg;
        if den == 0 {
            return Err(SignsError::NoNonzero(x));
        }
        Ok(SignStatsReport {
            x,
            n_pos,
            n_neg,
            n_zero_skipped: n_zero,
            ratio_num: n_pos,
            ratio_den: den,
            ratio_decimal: render_ratio(n_pos, den, 6),
            sign_change_count: positions.len() as u64,
            change_positions: positions,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio_num as f64 / self.ratio_den as f64
    }

    pub fn render(&self, decimals: u32) -> String {
        render_ratio(self.ratio_num, self.ratio_den, decimals)
    }
}

/// `num/den` rounded half away from zero to `decimals` places.
pub fn render_ratio(num: u64, den: u64, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    let scaled = (2 * num as u128 * scale + den as u128) / (2 * den as u128);
    let int = scaled / scale;
    let frac = scaled % scale;
    if decimals == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac:0width$}", width = decimals as usize)
    }
}

/// Number of sign changes and their 1-based positions.
pub fn sign_changes(seq: &[BigInt]) -> (u64, Vec<u64>) {
    let mut last = 0;
    let mut positions = Vec::new();
    for (i, v) in seq.iter().enumerate() {
        let s = sign_of(v);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            positions.push(i as u64 + 1);
        }
        last = s;
    }
    (positions.len() as u64, positions)
}

pub fn first_negative(f: &HalfIntegralForm) -> Option<u64> {
    (1..=f.prec()).find(|&n| sign_of(&f.coeffs()[n as usize]) < 0)
}

fn check_range(f: &HalfIntegralForm, x: u64) -> Result<(), SignsError> {
    if x > f.prec() {
        return Err(SignsError::Range { x, prec: f.prec() });
    }
    Ok(())
}

/// `[a(t n²)]` for `1 <= n <= x`.
pub fn subseq_t_n2(f: &HalfIntegralForm, t: u64, x: u64) -> Result<Vec<BigInt>, SignsError> {
    let last = t.saturating_mul(x * x);
    check_range(f, last)?;
    Ok((1..=x)
        .map(|n| f.coeffs()[(t * n * n) as usize].clone())
        .collect())
}

/// `#{n <= x : a(n) > 0} / #{n <= x : a(n) != 0}`.
pub fn r_plus_tot(f: &HalfIntegralForm, x: u64) -> Result<SignStatsReport, SignsError> {
    check_range(f, x)?;
    SignStatsReport::from_indexed(x, (1..=x).map(|n| (n, &f.coeffs()[n as usize])))
}

/// `n` qualifies when `(-1)^k n` is a fundamental discriminant (1 included).
pub fn is_fundamental_index(k: u32, n: u64) -> bool {
    let d = if k.is_multiple_of(2) { n as i64 } else { -(n as i64) };
    arith::is_fundamental_discriminant(d).unwrap_or(false)
}

/// Like [`r_plus_tot`], restricted to fundamental-discriminant indices.
pub fn r_plus_fund(f: &HalfIntegralForm, x: u64) -> Result<SignStatsReport, SignsError> {
    check_range(f, x)?;
    let k = f.k();
    let entries = (1..=x)
        .filter(|&n| is_fundamental_index(k, n))
        .map(|n| (n, &f.coeffs()[n as usize]));
    SignStatsReport::from_indexed(x, entries)
}

/// Square-free `t` from `ts` with `(t/p_j) = ε_j` for every `j`.
pub fn dprime_filter(ts: &[u64], primes: &[u64], eps: &[i32]) -> Result<Vec<u64>, SignsError> {
    if primes.len() != eps.len() {
        return Err(SignsError::Mismatched);
    }
    Ok(ts
        .iter()
        .copied()
        .filter(|&t| {
            primes
                .iter()
                .zip(eps)
                .all(|(&p, &e)| kronecker(t as i64, p as i64) == e)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyEntry {
    pub t: u64,
    pub n_t: Option<u64>,
    #[serde(with = "crate::serde_big::opt")]
    pub value: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub entries: Vec<SurveyEntry>,
    /// Statistics over `a(t n_t²)` indexed by `t`; `t` without a nonzero
    /// coefficient in range count as skipped zeros.
    pub stats: SignStatsReport,
}

/// For each square-free `t <= x` (optionally restricted by `(t/p_j) = ε_j`),
/// finds the smallest `n_t` with `a(t n_t²) != 0` within precision.
pub fn squarefree_sign_survey(
    f: &HalfIntegralForm,
    x: u64,
    primes: &[u64],
    eps: &[i32],
) -> Result<SurveyReport, SignsError> {
    check_range(f, x)?;
    let ts: Vec<u64> = (1..=x).filter(|&t| arith::is_squarefree(t)).collect();
    let ts = dprime_filter(&ts, primes, eps)?;
    let prec = f.prec();
    let entries: Vec<SurveyEntry> = ts
        .into_iter()
        .map(|t| {
            let found = (1u64..)
                .take_while(|n| t * n * n <= prec)
                .find(|n| !f.coeffs()[(t * n * n) as usize].is_zero());
            SurveyEntry {
                t,
                n_t: found,
                value: found.map(|n| f.coeffs()[(t * n * n) as usize].clone()),
            }
        })
        .collect();
    let zero = BigInt::zero();
    let stats = SignStatsReport::from_indexed(
        x,
        entries
            .iter()
            .map(|e| (e.t, e.value.as_ref().unwrap_or(&zero))),
    )?;
    Ok(SurveyReport { entries, stats })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: u64,
    #[serde(with = "crate::serde_big")]
    pub value: BigInt,
}

/// Smallest `n, n' <= x` with `(n/p) = ε` and `a(n) < 0`, `a(n') > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignWitnesses {
    pub p: u64,
    pub eps: i32,
    pub negative: Option<Witness>,
    pub positive: Option<Witness>,
}

impl SignWitnesses {
    pub fn found_both(&self) -> bool {
        self.negative.is_some() && self.positive.is_some()
    }
}

pub fn sign_witnesses(
    f: &HalfIntegralForm,
    p: u64,
    eps: i32,
    x: u64,
) -> Result<SignWitnesses, SignsError> {
    check_range(f, x)?;
    let mut out = SignWitnesses {
        p,
        eps,
        negative: None,
        positive: None,
    };
    for n in 1..=x {
        if kronecker(n as i64, p as i64) != eps {
            continue;
        }
        let a = &f.coeffs()[n as usize];
        let slot = match sign_of(a) {
            1 => &mut out.positive,
            -1 => &mut out.negative,
            _ => continue,
        };
        if slot.is_none() {
            *slot = Some(Witness {
                n,
                value: a.clone(),
            });
        }
        if out.found_both() {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSequenceReport {
    pub t: u64,
    pub p: u64,
    /// Terms `m <= direct_terms - 1` were read from the coefficients and
    /// checked against the recurrence; later ones come from the recurrence.
    pub direct_terms: u64,
    #[serde(with = "crate::serde_big::vec")]
    pub terms: Vec<BigInt>,
    pub sign_change_count: u64,
    pub change_positions: Vec<u64>,
}

/// Signs of `a(t p^(2m))` for `0 <= m <= m_max`, extending past the
/// precision of `f` with the recurrence after verifying it on the known terms.
pub fn power_sequence_signs(
    f: &HalfIntegralForm,
    t: u64,
    p: u64,
    m_max: usize,
) -> Result<PowerSequenceReport, SignsError> {
    let check = hecke::recurrence_check(f, t, p)?;
    if !check.passed {
        return Err(HeckeError::NotEigen {
            p,
            detail: format!("recurrence fails at m = {:?}", check.violation),
        }
        .into());
    }
    let k = f.k();
    let chi_tn = arith::chi_t_n(k, f.level(), t, p as i64)?;
    let chi_p = f.character().value(p as i64);
    let terms = hecke::extend_local_sequence(
        &check.terms,
        &check.lambda,
        chi_tn,
        chi_p * chi_p,
        p,
        k,
        m_max,
    );
    // Positions from sign_changes are 1-based; shift to m.
    let (count, positions) = sign_changes(&terms);
    Ok(PowerSequenceReport {
        t,
        p,
        direct_terms: check.terms.len() as u64,
        terms,
        sign_change_count: count,
        change_positions: positions.into_iter().map(|i| i - 1).collect(),
    })
}
