//! Hecke operators, the Shimura lift, eigenvalue extraction and the local
//! checks attached to a `T(p²)` eigenvalue.
//!
//! All operators work on exact coefficient tables and return results whose
//! precision is the largest prefix determined by the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, chi_star, chi_t_n, kronecker, ArithError};
use crate::forms::{FormError, HalfIntegralForm, IntegralForm};
use crate::scalar::sign_of;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeckeError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} divides the level {level}")]
    PDividesLevel { p: u64, level: u64 },
    #[error("t = {t} exceeds the precision {prec}")]
    TBeyondPrecision { t: u64, prec: u64 },
    #[error("operator output would be empty at precision {prec}")]
    NoPrecision { prec: u64 },
    #[error("reference sequence is zero on the shared range")]
    AllZero,
    #[error("weight 1/2 is not supported")]
    WeightOneHalf,
    #[error("form is not an eigenform of T({p}^2): {detail}")]
    NotEigen { p: u64, detail: String },
}

fn pow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

fn check_good_prime(p: u64, level: u64) -> Result<(), HeckeError> {
    if !arith::is_prime(p) {
        return Err(HeckeError::NotPrime(p));
    }
    if level.is_multiple_of(p) {
        return Err(HeckeError::PDividesLevel { p, level });
    }
    Ok(())
}

/// The lift `A(n) = Σ_{d|n} χ_{t,N}(d) d^(k-1) a(t n²/d²)` of a half-integral
/// weight form, together with the source it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub t: u64,
    /// Weight `2k`, level `N/2`, character `χ²`; `A(0)` is set to 0.
    pub lifted: IntegralForm,
    pub source_k: u32,
    pub source_level: u64,
}

impl LiftResult {
    pub fn prec(&self) -> u64 {
        self.lifted.prec()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        self.lifted.coeffs()
    }
}

pub fn shimura_lift(f: &HalfIntegralForm, t: u64) -> Result<LiftResult, HeckeError> {
    if !arith::is_squarefree(t) {
        return Err(ArithError::NotSquarefree(t).into());
    }
    let prec_f = f.prec();
    if t > prec_f {
        return Err(HeckeError::TBeyondPrecision { t, prec: prec_f });
    }
    let k = f.k();
    if k == 0 {
        return Err(HeckeError::WeightOneHalf);
    }
    let level = f.level();
    let mut prec_a = 1u64;
    while t * (prec_a + 1) * (prec_a + 1) <= prec_f {
        prec_a += 1;
    }
    let mut coeffs = vec![BigInt::zero(); prec_a as usize + 1];
    for n in 1..=prec_a {
        let mut acc = BigInt::zero();
        for d in arith::divisors(n) {
            let chi = chi_t_n(k, level, t, d as i64)?;
            if chi == 0 {
                continue;
            }
            let m = n / d;
            let a = f.coeff(t * m * m)?;
            if a.is_zero() {
                continue;
            }
            let term = pow(d, k - 1) * a;
            if chi > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        coeffs[n as usize] = acc;
    }
    let lifted = IntegralForm::new(
        2 * k,
        level / 2,
        f.character().square().with_modulus(level / 2),
        coeffs,
    )?;
    Ok(LiftResult {
        t,
        lifted,
        source_k: k,
        source_level: level,
    })
}

/// `T(p²)` on weight `k + 1/2`:
/// `b(n) = a(p²n) + χ*(p)(n/p)p^(k-1)a(n) + χ(p)²p^(2k-1)a(n/p²)`.
pub fn t_square_half(p: u64, f: &HalfIntegralForm) -> Result<HalfIntegralForm, HeckeError> {
    check_good_prime(p, f.level())?;
    let k = f.k();
    if k == 0 {
        return Err(HeckeError::WeightOneHalf);
    }
    let p2 = p * p;
    let prec = f.prec() / p2;
    if prec == 0 {
        return Err(HeckeError::NoPrecision { prec: f.prec() });
    }
    let middle = BigInt::from(chi_star(f.character(), k, p as i64)) * pow(p, k - 1);
    let chi_p = f.character().value(p as i64);
    let last = BigInt::from(chi_p * chi_p) * pow(p, 2 * k - 1);
    let a = f.coeffs();
    let coeffs = (0..=prec)
        .map(|n| {
            let mut b = a[(p2 * n) as usize].clone();
            let leg = kronecker(n as i64, p as i64);
            if leg != 0 {
                b += &middle * leg * &a[n as usize];
            }
            if n % p2 == 0 {
                b += &last * &a[(n / p2) as usize];
            }
            b
        })
        .collect();
    Ok(f.with_coeffs(coeffs)?)
}

/// `T(p)` on integral weight `w`: `B(n) = A(pn) + ε(p)p^(w-1)A(n/p)`.
pub fn t_integral(p: u64, f: &IntegralForm) -> Result<IntegralForm, HeckeError> {
    check_good_prime(p, f.level())?;
    let prec = f.prec() / p;
    if prec == 0 {
        return Err(HeckeError::NoPrecision { prec: f.prec() });
    }
    let last = BigInt::from(f.character().value(p as i64)) * pow(p, f.weight() - 1);
    let a = f.coeffs();
    let coeffs = (0..=prec)
        .map(|n| {
            let mut b = a[(p * n) as usize].clone();
            if n % p == 0 {
                b += &last * &a[(n / p) as usize];
            }
            b
        })
        .collect();
    Ok(f.with_coeffs(coeffs)?)
}

/// `U_m` on a coefficient table: `b(n) = a(mn)`.
pub fn u_coeffs(m: u64, coeffs: &[BigInt]) -> Vec<BigInt> {
    assert!(m >= 1, "U index must be positive");
    coeffs.iter().step_by(m as usize).cloned().collect()
}

/// Outcome of comparing a sequence with its image under an operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenCheck {
    #[serde(with = "crate::serde_big::opt")]
    pub lambda: Option<BigInt>,
    pub is_eigen: bool,
    pub checked_up_to: u64,
    pub first_violation: Option<u64>,
    pub diagnostic: Option<String>,
}

/// Reads `λ = after(n₀)/before(n₀)` at the first nonzero `before(n₀)` and
/// checks `after(n) = λ·before(n)` over the shared index range.
pub fn extract_eigenvalue(before: &[BigInt], after: &[BigInt]) -> Result<EigenCheck, HeckeError> {
    let len = before.len().min(after.len());
    let n0 = (0..len)
        .find(|&n| !before[n].is_zero())
        .ok_or(HeckeError::AllZero)?;
    let checked_up_to = len as u64 - 1;
    let (lambda, rem) = after[n0].div_rem(&before[n0]);
    if !rem.is_zero() {
        return Ok(EigenCheck {
            lambda: None,
            is_eigen: false,
            checked_up_to,
            first_violation: Some(n0 as u64),
            diagnostic: Some(format!(
                "{} / {} at n = {n0} is not an integer",
                after[n0], before[n0]
            )),
        });
    }
    let violation = (0..len).find(|&n| after[n] != &lambda * &before[n]);
    Ok(EigenCheck {
        is_eigen: violation.is_none(),
        first_violation: violation.map(|n| n as u64),
        diagnostic: violation.map(|n| {
            format!(
                "expected {} at n = {n}, found {}",
                &lambda * &before[n],
                after[n]
            )
        }),
        lambda: Some(lambda),
        checked_up_to,
    })
}

/// `(α_p + β_p, α_p β_p, sign of (α_p − β_p)²)` for the roots of
/// `X² − λX + p^(2k−1)`. A negative sign means a complex-conjugate pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Satake {
    #[serde(with = "crate::serde_big")]
    pub trace: BigInt,
    #[serde(with = "crate::serde_big")]
    pub norm: BigInt,
    pub discriminant_sign: i32,
}

pub fn satake(lambda: &BigInt, p: u64, k: u32) -> Satake {
    let norm = pow(p, 2 * k - 1);
    let disc = lambda * lambda - BigInt::from(4) * &norm;
    Satake {
        trace: lambda.clone(),
        norm,
        discriminant_sign: sign_of(&disc),
    }
}

/// `λ² <= 4p^(2k−1)`.
pub fn deligne_check(lambda: &BigInt, p: u64, k: u32) -> bool {
    lambda * lambda <= BigInt::from(4) * pow(p, 2 * k - 1)
}

/// `|λ| < p^k + p^(k−1)`.
pub fn elementary_bound_check(lambda: &BigInt, p: u64, k: u32) -> bool {
    lambda.abs() < pow(p, k) + pow(p, k - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenReport {
    pub p: u64,
    #[serde(with = "crate::serde_big::opt")]
    pub lambda: Option<BigInt>,
    pub is_eigen: bool,
    pub checked_up_to: u64,
    pub first_violation: Option<u64>,
    pub satake: Option<Satake>,
    pub deligne: Option<bool>,
    pub elementary_bound: Option<bool>,
    pub diagnostic: Option<String>,
}

impl EigenReport {
    /// `k` is half the integral weight the eigenvalue lives in (`2k`).
    pub fn new(p: u64, k: u32, check: EigenCheck) -> Self {
        let lambda = check.lambda.clone().filter(|_| check.is_eigen);
        EigenReport {
            p,
            satake: lambda.as_ref().map(|l| satake(l, p, k)),
            deligne: lambda.as_ref().map(|l| deligne_check(l, p, k)),
            elementary_bound: lambda.as_ref().map(|l| elementary_bound_check(l, p, k)),
            lambda: check.lambda,
            is_eigen: check.is_eigen,
            checked_up_to: check.checked_up_to,
            first_violation: check.first_violation,
            diagnostic: check.diagnostic,
        }
    }

    pub fn bounds_hold(&self) -> bool {
        self.deligne == Some(true) && self.elementary_bound == Some(true)
    }
}

/// `T(p²)` eigen report for a half-integral weight form.
pub fn half_integral_eigen_report(p: u64, f: &HalfIntegralForm) -> Result<EigenReport, HeckeError> {
    let image = t_square_half(p, f)?;
    Ok(EigenReport::new(
        p,
        f.k(),
        extract_eigenvalue(f.coeffs(), image.coeffs())?,
    ))
}

/// `T(p)` eigen report for an integral weight form.
pub fn integral_eigen_report(p: u64, f: &IntegralForm) -> Result<EigenReport, HeckeError> {
    let image = t_integral(p, f)?;
    Ok(EigenReport::new(
        p,
        f.weight() / 2,
        extract_eigenvalue(f.coeffs(), image.coeffs())?,
    ))
}

/// `[a(t p^(2m))]` for `m = 0..=M`, `M` maximal with `t p^(2M) <= prec`.
pub fn local_power_sequence(
    f: &HalfIntegralForm,
    t: u64,
    p: u64,
) -> Result<Vec<BigInt>, HeckeError> {
    check_good_prime(p, f.level())?;
    if !arith::is_squarefree(t) {
        return Err(ArithError::NotSquarefree(t).into());
    }
    if t > f.prec() {
        return Err(HeckeError::TBeyondPrecision { t, prec: f.prec() });
    }
    let mut out = Vec::new();
    let mut idx = t;
    while idx <= f.prec() {
        out.push(f.coeff(idx)?.clone());
        idx = match idx.checked_mul(p * p) {
            Some(i) => i,
            None => break,
        };
    }
    Ok(out)
}

/// Continues `a(t p^(2m))` past the known terms with the local recurrence
/// `c₁ = c₀(λ − χ_{t,N}(p)p^(k−1))`, `c_m = λc_{m−1} − χ(p)²p^(2k−1)c_{m−2}`,
/// returning `m_max + 1` terms. Known terms are kept as given.
pub fn extend_local_sequence(
    known: &[BigInt],
    lambda: &BigInt,
    chi_tn_p: i32,
    chi_p_squared: i32,
    p: u64,
    k: u32,
    m_max: usize,
) -> Vec<BigInt> {
    assert!(!known.is_empty(), "need a(t)");
    let first = lambda - BigInt::from(chi_tn_p) * pow(p, k - 1);
    let norm = BigInt::from(chi_p_squared) * pow(p, 2 * k - 1);
    let mut out: Vec<BigInt> = known.iter().take(m_max + 1).cloned().collect();
    while out.len() <= m_max {
        let m = out.len();
        let next = if m == 1 {
            &out[0] * &first
        } else {
            lambda * &out[m - 1] - &norm * &out[m - 2]
        };
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub t: u64,
    pub p: u64,
    #[serde(with = "crate::serde_big")]
    pub lambda: BigInt,
    #[serde(with = "crate::serde_big::vec")]
    pub terms: Vec<BigInt>,
    /// Largest `m` whose term was compared.
    pub m_max: u64,
    pub max_index_checked: u64,
    pub violation: Option<u64>,
    pub passed: bool,
}

/// Checks the directly computed `a(t p^(2m))` against the recurrence driven
/// by the `T(p²)` eigenvalue of `f`.
pub fn recurrence_check(
    f: &HalfIntegralForm,
    t: u64,
    p: u64,
) -> Result<RecurrenceReport, HeckeError> {
    let report = half_integral_eigen_report(p, f)?;
    let lambda = match (report.is_eigen, report.lambda) {
        (true, Some(l)) => l,
        _ => {
            return Err(HeckeError::NotEigen {
                p,
                detail: report.diagnostic.unwrap_or_default(),
            });
        }
    };
    let terms = local_power_sequence(f, t, p)?;
    let k = f.k();
    let chi_tn = chi_t_n(k, f.level(), t, p as i64)?;
    let chi_p = f.character().value(p as i64);
    let predicted = extend_local_sequence(
        &terms[..1],
        &lambda,
        chi_tn,
        chi_p * chi_p,
        p,
        k,
        terms.len() - 1,
    );
    let violation = (1..terms.len())
        .find(|&m| predicted[m] != terms[m])
        .map(|m| m as u64);
    let m_max = terms.len() as u64 - 1;
    Ok(RecurrenceReport {
        t,
        p,
        lambda,
        m_max,
        max_index_checked: t * (p * p).pow(m_max as u32),
        passed: violation.is_none(),
        violation,
        terms,
    })
}

/// Keeps `a(n)` where `(n/p) = eps`, zero elsewhere; the result is declared
/// on level `N p²`.
pub fn twisted_component(
    f: &HalfIntegralForm,
    p: u64,
    eps: i32,
) -> Result<HalfIntegralForm, HeckeError> {
    check_good_prime(p, f.level())?;
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| {
            if kronecker(n as i64, p as i64) == eps {
                a.clone()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    Ok(f.with_coeffs(coeffs)?.with_level(f.level() * p * p)?)
}
