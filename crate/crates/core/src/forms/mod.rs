//! Modular forms as finalized integer coefficient tables, and constructors
//! for the named forms.

mod spec;

pub use spec::{evaluate, parse_formspec, FormSpec, ParseError, ParseErrorKind};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{ArithError, DirichletCharacter};
use crate::qseries::{self, Offset, QSeries, SeriesError};
use crate::scalar::{ratio, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("coefficient of q^{0} is not an integer")]
    NotIntegral(u64),
    #[error("cannot finalize a series with fractional offset {0}")]
    FractionalOffset(Offset),
    #[error("weight numerator {0} must be odd")]
    EvenWeightNumerator(u32),
    #[error("level {0} must be divisible by 4")]
    LevelNotDivisibleBy4(u64),
    #[error("coefficient a({n}) requested beyond precision {prec}")]
    PastPrecision { n: u64, prec: u64 },
    #[error("series known only below q^{have}, need up to q^{want}")]
    InsufficientPrecision { have: Offset, want: u64 },
    #[error("precision must be at least 1")]
    ZeroPrecision,
}

fn read_integer_coeffs<T: Scalar>(
    series: &QSeries<T>,
    prec: u64,
) -> Result<Vec<BigInt>, FormError> {
    if !series.offset().is_integral() {
        return Err(FormError::FractionalOffset(series.offset()));
    }
    if series.end() < Offset::integer(prec as i64 + 1) {
        return Err(FormError::InsufficientPrecision {
            have: series.end(),
            want: prec,
        });
    }
    (0..=prec)
        .map(|n| {
            series
                .coeff(n as i64)?
                .to_bigint()
                .ok_or(FormError::NotIntegral(n))
        })
        .collect()
}

fn coeff_checked(coeffs: &[BigInt], n: u64) -> Result<&BigInt, FormError> {
    coeffs.get(n as usize).ok_or(FormError::PastPrecision {
        n,
        prec: coeffs.len() as u64 - 1,
    })
}

/// A form of weight `weight_num / 2` (odd numerator) on `Γ₀(N)`, `4 | N`,
/// given by its coefficients `a(0), …, a(prec)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfIntegralForm {
    weight_num: u32,
    level: u64,
    character: DirichletCharacter,
    coeffs: Vec<BigInt>,
    plus_space: bool,
}

impl HalfIntegralForm {
    /// `coeffs[n] = a(n)` for `0 <= n <= prec`.
    pub fn new(
        weight_num: u32,
        level: u64,
        character: DirichletCharacter,
        coeffs: Vec<BigInt>,
        plus_space: bool,
    ) -> Result<Self, FormError> {
        if weight_num.is_multiple_of(2) {
            return Err(FormError::EvenWeightNumerator(weight_num));
        }
        if level == 0 || !level.is_multiple_of(4) {
            return Err(FormError::LevelNotDivisibleBy4(level));
        }
        if coeffs.len() < 2 {
            return Err(FormError::ZeroPrecision);
        }
        Ok(HalfIntegralForm {
            weight_num,
            level,
            character,
            coeffs,
            plus_space,
        })
    }

    /// Finalizes a series with integral offset and integral coefficients,
    /// keeping `a(0..=prec)`.
    pub fn from_series<T: Scalar>(
        series: &QSeries<T>,
        weight_num: u32,
        level: u64,
        character: DirichletCharacter,
        plus_space: bool,
        prec: u64,
    ) -> Result<Self, FormError> {
        HalfIntegralForm::new(
            weight_num,
            level,
            character,
            read_integer_coeffs(series, prec)?,
            plus_space,
        )
    }

    pub fn weight_num(&self) -> u32 {
        self.weight_num
    }

    /// `k` in weight `k + 1/2`.
    pub fn k(&self) -> u32 {
        (self.weight_num - 1) / 2
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn plus_space(&self) -> bool {
        self.plus_space
    }

    /// Largest `n` with `a(n)` known.
    pub fn prec(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn coeff(&self, n: u64) -> Result<&BigInt, FormError> {
        coeff_checked(&self.coeffs, n)
    }

    /// `a(0), …, a(prec)`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Same metadata, new coefficient table.
    pub fn with_coeffs(&self, coeffs: Vec<BigInt>) -> Result<Self, FormError> {
        HalfIntegralForm::new(
            self.weight_num,
            self.level,
            self.character.clone(),
            coeffs,
            self.plus_space,
        )
    }

    pub fn with_level(mut self, level: u64) -> Result<Self, FormError> {
        if level == 0 || !level.is_multiple_of(4) {
            return Err(FormError::LevelNotDivisibleBy4(level));
        }
        self.character = self.character.with_modulus(level);
        self.level = level;
        Ok(self)
    }

    pub fn truncate(&self, prec: u64) -> Self {
        let mut f = self.clone();
        f.coeffs.truncate(prec as usize + 1);
        f
    }
}

/// A form of integral weight with coefficients `A(0), …, A(prec)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralForm {
    weight: u32,
    level: u64,
    character: DirichletCharacter,
    coeffs: Vec<BigInt>,
}

impl IntegralForm {
    pub fn new(
        weight: u32,
        level: u64,
        character: DirichletCharacter,
        coeffs: Vec<BigInt>,
    ) -> Result<Self, FormError> {
        if coeffs.len() < 2 {
            return Err(FormError::ZeroPrecision);
        }
        Ok(IntegralForm {
            weight,
            level,
            character,
            coeffs,
        })
    }

    pub fn from_series<T: Scalar>(
        series: &QSeries<T>,
        weight: u32,
        level: u64,
        character: DirichletCharacter,
        prec: u64,
    ) -> Result<Self, FormError> {
        IntegralForm::new(weight, level, character, read_integer_coeffs(series, prec)?)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn prec(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn coeff(&self, n: u64) -> Result<&BigInt, FormError> {
        coeff_checked(&self.coeffs, n)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: Vec<BigInt>) -> Result<Self, FormError> {
        IntegralForm::new(self.weight, self.level, self.character.clone(), coeffs)
    }
}

/// Weight 13/2 plus-space form on `Γ₀(4)` lifting to Δ:
/// `(1/4)(2 E₄(4z)·Dθ − (DE₄)(4z)·θ)` with `D = q d/dq`.
///
/// `(DE₄)(4z)` is the derivative of `E₄` evaluated at `4z`, not the derivative
/// of `z ↦ E₄(4z)`; only this reading gives `a(4) = -56`.
pub fn delta_form_series(prec: u64) -> Result<QSeries<BigInt>, FormError> {
    if prec == 0 {
        return Err(FormError::ZeroPrecision);
    }
    let end = prec as usize + 1;
    let e4 = qseries::eisenstein_e4::<BigInt>(end.div_ceil(4));
    let e4_at_4z = e4.dilate(4)?.truncate(end);
    let de4_at_4z = e4.derive()?.dilate(4)?.truncate(end);
    let th = qseries::theta::<BigInt>(1, end)?;
    let dth = th.derive()?;
    let lhs = e4_at_4z.mul(&dth).scale(&ratio(2, 1))?;
    let rhs = de4_at_4z.mul(&th);
    Ok(lhs.sub(&rhs)?.scale(&ratio(1, 4))?)
}

pub fn delta_form(prec: u64) -> Result<HalfIntegralForm, FormError> {
    let s = delta_form_series(prec)?;
    HalfIntegralForm::from_series(&s, 13, 4, DirichletCharacter::trivial(4), true, prec)
}

/// `θ(11z)η(2z)η(22z)` to all exponents `<= 4·prec`.
pub fn g_preimage_series(prec: u64) -> Result<QSeries<BigInt>, FormError> {
    let end = 4 * prec as usize + 1;
    let th = qseries::theta::<BigInt>(11, end)?;
    let e2 = qseries::eta::<BigInt>(2, end)?;
    let e22 = qseries::eta::<BigInt>(22, end)?;
    Ok(th
        .mul(&e2.mul(&e22))
        .truncate_abs(Offset::integer(end as i64)))
}

/// Weight 3/2 plus-space form on `Γ₀(44)`: `(θ(11z)η(2z)η(22z)) | U₄`,
/// halved so that the leading coefficient `a(3)` is 1.
pub fn g_form(prec: u64) -> Result<HalfIntegralForm, FormError> {
    if prec == 0 {
        return Err(FormError::ZeroPrecision);
    }
    let s = g_preimage_series(prec)?.u_op(4)?.scale(&ratio(1, 2))?;
    HalfIntegralForm::from_series(&s, 3, 44, DirichletCharacter::trivial(44), true, prec)
}

/// `Δ = η(z)²⁴`, weight 12, level 1.
pub fn ramanujan_delta(prec: u64) -> Result<IntegralForm, FormError> {
    if prec == 0 {
        return Err(FormError::ZeroPrecision);
    }
    let s = qseries::eta::<BigInt>(1, prec as usize + 1)?.pow(24)?;
    IntegralForm::from_series(&s, 12, 1, DirichletCharacter::trivial(1), prec)
}

/// `G = η(z)²η(11z)²`, weight 2, level 11.
pub fn x0_11_form(prec: u64) -> Result<IntegralForm, FormError> {
    if prec == 0 {
        return Err(FormError::ZeroPrecision);
    }
    let end = prec as usize + 1;
    let a = qseries::eta::<BigInt>(1, end)?.pow(2)?;
    let b = qseries::eta::<BigInt>(11, end)?.pow(2)?;
    IntegralForm::from_series(&a.mul(&b), 2, 11, DirichletCharacter::trivial(11), prec)
}

/// `E₄`, weight 4, level 1 (not a cusp form; `A(0) = 1`).
pub fn e4_form(prec: u64) -> Result<IntegralForm, FormError> {
    if prec == 0 {
        return Err(FormError::ZeroPrecision);
    }
    let s = qseries::eisenstein_e4::<BigInt>(prec as usize + 1);
    IntegralForm::from_series(&s, 4, 1, DirichletCharacter::trivial(1), prec)
}

/// Indices `1 <= n <= prec` with `a(n) != 0` although `(-1)^k n ≡ 2, 3 (mod 4)`.
pub fn plus_space_check(f: &HalfIntegralForm) -> Vec<u64> {
    let sign: i64 = if f.k().is_multiple_of(2) { 1 } else { -1 };
    (1..=f.prec())
        .filter(|&n| {
            let r = (sign * n as i64).rem_euclid(4);
            (r == 2 || r == 3) && !f.coeffs[n as usize].is_zero()
        })
        .collect()
}
