//! Truncated q-series with exact coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^(offset + i)` for
//! `0 <= i < prec`. The offset is a rational with denominator dividing 24,
//! which covers every eta quotient. Reading at or past `prec` is an error:
//! the coefficient is unknown, not zero.
//!
//! Series with few nonzero terms (at most `prec / 16`) are stored sparsely,
//! and products with a sparse operand cost `O(prec · nnz)`. Theta series and
//! the pentagonal Euler product have `O(√prec)` terms, so the usual eta/theta
//! constructions stay well below quadratic cost.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{DirichletCharacter, Parity};
use crate::scalar::Scalar;

/// Sparse storage is used when `nnz * SPARSE_RATIO <= prec`.
pub const SPARSE_RATIO: usize = 16;

/// Output chunk length for parallel convolution.
const CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("offset denominator must divide 24, got {num}/{den}")]
    OffsetDenominator { num: i64, den: i64 },
    #[error("offsets {0} and {1} do not differ by an integer")]
    OffsetMismatch(Offset, Offset),
    #[error("coefficient {index} requested but series is only known to {prec} terms")]
    PastPrecision { index: i64, prec: usize },
    #[error("exponent {0} is not on the grid of this series")]
    OffGrid(Offset),
    #[error("U operator needs an integral offset, got {0}")]
    FractionalOffset(Offset),
    #[error("coefficient not representable in this ring after scaling by {0}")]
    NotRepresentable(String),
    #[error("sparse indices must be strictly increasing and below prec")]
    BadSparseIndices,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("theta_psi needs an odd primitive character, got {0}")]
    BadThetaCharacter(String),
    #[error("coefficient at index {0} is not an integer")]
    NotIntegral(usize),
}

/// Exponent offset in units of `1/24`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Offset(i64);

impl Offset {
    pub const ZERO: Offset = Offset(0);

    pub fn integer(n: i64) -> Self {
        Offset(24 * n)
    }

    pub fn from_twenty_fourths(n: i64) -> Self {
        Offset(n)
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, SeriesError> {
        if den == 0 || (24 * num) % den != 0 {
            return Err(SeriesError::OffsetDenominator { num, den });
        }
        Ok(Offset(24 * num / den))
    }

    pub fn twenty_fourths(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 24 == 0
    }

    pub fn to_integer(self) -> Option<i64> {
        self.is_integral().then_some(self.0 / 24)
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(24))
    }

    /// Smallest integer `>= self`.
    pub fn ceil(self) -> i64 {
        Integer::div_ceil(&self.0, &24)
    }

    fn plus_index(self, i: usize) -> Offset {
        Offset(self.0 + 24 * i as i64)
    }
}

impl std::ops::Add for Offset {
    type Output = Offset;
    fn add(self, rhs: Offset) -> Offset {
        Offset(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Offset {
    type Output = Offset;
    fn sub(self, rhs: Offset) -> Offset {
        Offset(self.0 - rhs.0)
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0.gcd(&24);
        if g == 24 {
            write!(f, "{}", self.0 / 24)
        } else {
            write!(f, "{}/{}", self.0 / g, 24 / g)
        }
    }
}

impl std::str::FromStr for Offset {
    type Err = SeriesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeriesError::OffsetDenominator { num: 0, den: 0 };
        match s.split_once('/') {
            Some((n, d)) => Offset::from_ratio(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Offset::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Terms<T> {
    Dense(Vec<T>),
    Sparse(Vec<(usize, T)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    Dense,
    Sparse,
}

/// A truncated power series `Σ_{0<=i<prec} c_i q^(offset + i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<T> {
    offset: Offset,
    prec: usize,
    terms: Terms<T>,
}

impl<T: Scalar> QSeries<T> {
    pub fn zero(offset: Offset, prec: usize) -> Self {
        QSeries {
            offset,
            prec,
            terms: Terms::Sparse(Vec::new()),
        }
    }

    /// The constant series 1 known to `prec` terms.
    pub fn one(prec: usize) -> Self {
        let terms = if prec == 0 {
            Vec::new()
        } else {
            vec![(0, T::one())]
        };
        QSeries {
            offset: Offset::ZERO,
            prec,
            terms: Terms::Sparse(terms),
        }
        .normalized()
    }

    pub fn from_dense(offset: Offset, coeffs: Vec<T>) -> Self {
        QSeries {
            offset,
            prec: coeffs.len(),
            terms: Terms::Dense(coeffs),
        }
        .normalized()
    }

    pub fn from_sparse(
        offset: Offset,
        prec: usize,
        terms: Vec<(usize, T)>,
    ) -> Result<Self, SeriesError> {
        let increasing = terms.windows(2).all(|w| w[0].0 < w[1].0);
        if !increasing || terms.last().is_some_and(|(i, _)| *i >= prec) {
            return Err(SeriesError::BadSparseIndices);
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(QSeries {
            offset,
            prec,
            terms: Terms::Sparse(terms),
        }
        .normalized())
    }

    pub fn offset(&self) -> Offset {
        self.offset
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Exclusive upper bound of the known exponents.
    pub fn end(&self) -> Offset {
        self.offset.plus_index(self.prec)
    }

    pub fn density(&self) -> Density {
        match self.terms {
            Terms::Dense(_) => Density::Dense,
            Terms::Sparse(_) => Density::Sparse,
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.terms {
            Terms::Dense(v) => v.iter().filter(|c| !c.is_zero()).count(),
            Terms::Sparse(v) => v.len(),
        }
    }

    /// Coefficient of `q^(offset + i)`.
    pub fn get(&self, i: usize) -> Result<T, SeriesError> {
        if i >= self.prec {
            return Err(SeriesError::PastPrecision {
                index: i as i64,
                prec: self.prec,
            });
        }
        Ok(match &self.terms {
            Terms::Dense(v) => v[i].clone(),
            Terms::Sparse(v) => match v.binary_search_by_key(&i, |(j, _)| *j) {
                Ok(pos) => v[pos].1.clone(),
                Err(_) => T::zero(),
            },
        })
    }

    /// Coefficient of `q^exponent`.
    pub fn coeff_at(&self, exponent: Offset) -> Result<T, SeriesError> {
        let delta = (exponent - self.offset).twenty_fourths();
        if delta % 24 != 0 {
            return Err(SeriesError::OffGrid(exponent));
        }
        if delta < 0 {
            return Ok(T::zero());
        }
        self.get((delta / 24) as usize)
    }

    /// Coefficient of `q^n` for an integer exponent.
    pub fn coeff(&self, n: i64) -> Result<T, SeriesError> {
        self.coeff_at(Offset::integer(n))
    }

    /// Nonzero terms as `(relative index, coefficient)`.
    pub fn nonzero_terms(&self) -> Vec<(usize, &T)> {
        match &self.terms {
            Terms::Dense(v) => v.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect(),
            Terms::Sparse(v) => v.iter().map(|(i, c)| (*i, c)).collect(),
        }
    }

    pub fn to_dense_vec(&self) -> Vec<T> {
        match &self.terms {
            Terms::Dense(v) => v.clone(),
            Terms::Sparse(v) => {
                let mut out = vec![T::zero(); self.prec];
                for (i, c) in v {
                    out[*i] = c.clone();
                }
                out
            }
        }
    }

    pub fn is_integral(&self) -> bool {
        self.nonzero_terms()
            .iter()
            .all(|(_, c)| c.to_bigint().is_some())
    }

    /// All coefficients as integers; fails at the first non-integral one.
    pub fn to_integers(&self) -> Result<Vec<BigInt>, SeriesError> {
        self.to_dense_vec()
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_bigint().ok_or(SeriesError::NotIntegral(i)))
            .collect()
    }

    fn normalized(self) -> Self {
        let nnz = self.nnz();
        let want_sparse = nnz * SPARSE_RATIO <= self.prec;
        let terms = match (self.terms, want_sparse) {
            (Terms::Dense(v), true) => Terms::Sparse(
                v.into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect(),
            ),
            (Terms::Sparse(v), false) => {
                let mut out = vec![T::zero(); self.prec];
                for (i, c) in v {
                    out[i] = c;
                }
                Terms::Dense(out)
            }
            (terms, _) => terms,
        };
        QSeries { terms, ..self }
    }

    /// Keeps only the first `prec` terms (no-op if already shorter).
    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec);
        let terms = match &self.terms {
            Terms::Dense(v) => Terms::Dense(v[..prec].to_vec()),
            Terms::Sparse(v) => {
                Terms::Sparse(v.iter().filter(|(i, _)| *i < prec).cloned().collect())
            }
        };
        QSeries {
            offset: self.offset,
            prec,
            terms,
        }
        .normalized()
    }

    /// Keeps the exponents strictly below `end`.
    pub fn truncate_abs(&self, end: Offset) -> Self {
        let span = (end - self.offset).twenty_fourths();
        let prec = if span <= 0 {
            0
        } else {
            Integer::div_ceil(&span, &24) as usize
        };
        self.truncate(prec)
    }

    fn map_terms(&self, mut f: impl FnMut(usize, &T) -> T) -> Self {
        let terms = match &self.terms {
            Terms::Dense(v) => Terms::Dense(v.iter().enumerate().map(|(i, c)| f(i, c)).collect()),
            Terms::Sparse(v) => Terms::Sparse(v.iter().map(|(i, c)| (*i, f(*i, c))).collect()),
        };
        QSeries {
            offset: self.offset,
            prec: self.prec,
            terms,
        }
        .normalized_dropping_zeros()
    }

    fn normalized_dropping_zeros(self) -> Self {
        let terms = match self.terms {
            Terms::Sparse(v) => {
                Terms::Sparse(v.into_iter().filter(|(_, c)| !c.is_zero()).collect())
            }
            dense => dense,
        };
        QSeries { terms, ..self }.normalized()
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|_, c| -c.clone())
    }

    /// Exact multiplication by a rational scalar.
    pub fn scale(&self, r: &BigRational) -> Result<Self, SeriesError> {
        let mut failed = false;
        let out = self.map_terms(|_, c| {
            c.scale(r).unwrap_or_else(|| {
                failed = true;
                T::zero()
            })
        });
        if failed {
            Err(SeriesError::NotRepresentable(r.to_string()))
        } else {
            Ok(out)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self, SeriesError> {
        if !(self.offset - other.offset).is_integral() {
            return Err(SeriesError::OffsetMismatch(self.offset, other.offset));
        }
        let offset = self.offset.min(other.offset);
        let end = self.end().min(other.end());
        let prec = ((end - offset).twenty_fourths().max(0) / 24) as usize;
        let mut out = vec![T::zero(); prec];
        for (series, negate) in [(self, false), (other, subtract)] {
            let shift = ((series.offset - offset).twenty_fourths() / 24) as usize;
            for (i, c) in series.nonzero_terms() {
                let j = i + shift;
                if j >= prec {
                    break;
                }
                if negate {
                    out[j] -= c;
                } else {
                    out[j] += c;
                }
            }
        }
        Ok(QSeries::from_dense(offset, out))
    }

    /// Truncated Cauchy product. The kernel is chosen from the operands'
    /// densities: any sparse operand gives an `O(prec · nnz)` product.
    pub fn mul(&self, other: &Self) -> Self {
        let offset = self.offset + other.offset;
        let prec = self.prec.min(other.prec);
        match (&self.terms, &other.terms) {
            (Terms::Sparse(a), Terms::Sparse(b)) => {
                let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                let mut out = vec![T::zero(); prec];
                for (i, x) in short {
                    for (j, y) in long {
                        if i + j >= prec {
                            break;
                        }
                        out[i + j].add_product(x, y);
                    }
                }
                QSeries::from_dense(offset, out)
            }
            (Terms::Sparse(s), Terms::Dense(d)) | (Terms::Dense(d), Terms::Sparse(s)) => {
                QSeries::from_dense(offset, sparse_dense_kernel(s, d, prec))
            }
            (Terms::Dense(a), Terms::Dense(b)) => {
                QSeries::from_dense(offset, schoolbook_kernel(a, b, prec))
            }
        }
    }

    /// Dense×dense schoolbook product regardless of storage.
    pub fn mul_schoolbook(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let out = schoolbook_kernel(&self.to_dense_vec(), &other.to_dense_vec(), prec);
        QSeries::from_dense(self.offset + other.offset, out)
    }

    /// `self^e` by repeated left-to-right multiplication.
    pub fn pow(&self, e: u32) -> Result<Self, SeriesError> {
        if e == 0 {
            return Err(SeriesError::NonPositive("exponent"));
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// `q d/dq`: the coefficient of `q^e` is multiplied by `e`.
    pub fn derive(&self) -> Result<Self, SeriesError> {
        let base = self.offset.twenty_fourths();
        if let Some(o) = self.offset.to_integer() {
            return Ok(self.map_terms(|i, c| c.mul_i64(o + i as i64)));
        }
        let mut failed = false;
        let out = self.map_terms(|i, c| {
            let e = BigRational::new(BigInt::from(base + 24 * i as i64), BigInt::from(24));
            c.scale(&e).unwrap_or_else(|| {
                failed = true;
                T::zero()
            })
        });
        if failed {
            Err(SeriesError::NotRepresentable(format!(
                "exponent of q^({})",
                self.offset
            )))
        } else {
            Ok(out)
        }
    }

    /// Substitutes `q ↦ q^m`.
    pub fn dilate(&self, m: u64) -> Result<Self, SeriesError> {
        if m == 0 {
            return Err(SeriesError::NonPositive("dilation"));
        }
        let m_us = m as usize;
        let terms = self
            .nonzero_terms()
            .into_iter()
            .map(|(i, c)| (i * m_us, c.clone()))
            .collect();
        let offset = Offset(self.offset.0 * m as i64);
        Ok(QSeries {
            offset,
            prec: self.prec * m_us,
            terms: Terms::Sparse(terms),
        }
        .normalized())
    }

    /// `U_m`: the coefficient of `q^n` becomes the coefficient of `q^(mn)`.
    pub fn u_op(&self, m: u64) -> Result<Self, SeriesError> {
        if m == 0 {
            return Err(SeriesError::NonPositive("U index"));
        }
        let o = self
            .offset
            .to_integer()
            .ok_or(SeriesError::FractionalOffset(self.offset))?;
        let m = m as i64;
        let start = Integer::div_ceil(&o, &m);
        let last_known = o + self.prec as i64 - 1;
        let end = Integer::div_floor(&last_known, &m) + 1;
        let prec = (end - start).max(0) as usize;
        let terms = self
            .nonzero_terms()
            .into_iter()
            .filter_map(|(i, c)| {
                let e = o + i as i64;
                (e.rem_euclid(m) == 0).then(|| ((e / m - start) as usize, c.clone()))
            })
            .filter(|(j, _)| *j < prec)
            .collect();
        QSeries::from_sparse(Offset::integer(start), prec, terms)
    }
}

fn sparse_dense_kernel<T: Scalar>(sparse: &[(usize, T)], dense: &[T], prec: usize) -> Vec<T> {
    let mut out = vec![T::zero(); prec];
    let fill = |base: usize, chunk: &mut [T]| {
        for (off, slot) in chunk.iter_mut().enumerate() {
            let i = base + off;
            for (j, s) in sparse {
                if *j > i {
                    break;
                }
                let d = &dense[i - j];
                if !d.is_zero() {
                    slot.add_product(s, d);
                }
            }
        }
    };
    if prec * sparse.len() > 1 << 16 {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| fill(c * CHUNK, chunk));
    } else {
        fill(0, &mut out);
    }
    out
}

fn schoolbook_kernel<T: Scalar>(a: &[T], b: &[T], prec: usize) -> Vec<T> {
    let mut out = vec![T::zero(); prec];
    let fill = |base: usize, chunk: &mut [T]| {
        for (off, slot) in chunk.iter_mut().enumerate() {
            let i = base + off;
            for j in 0..=i {
                if a[j].is_zero() || b[i - j].is_zero() {
                    continue;
                }
                slot.add_product(&a[j], &b[i - j]);
            }
        }
    };
    if prec > CHUNK {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| fill(c * CHUNK, chunk));
    } else {
        fill(0, &mut out);
    }
    out
}

/// `∏_{n>=1}(1 - q^n)` to `prec` terms via the pentagonal number theorem.
pub fn euler<T: Scalar>(prec: usize) -> QSeries<T> {
    let mut terms = Vec::new();
    let mut push = |e: usize, k: usize| {
        if e < prec {
            let c = if k.is_multiple_of(2) { T::one() } else { -T::one() };
            terms.push((e, c));
        }
    };
    push(0, 0);
    let mut k = 1usize;
    while k * (3 * k - 1) / 2 < prec {
        push(k * (3 * k - 1) / 2, k);
        push(k * (3 * k + 1) / 2, k);
        k += 1;
    }
    QSeries::from_sparse(Offset::ZERO, prec, terms).expect("pentagonal exponents increase")
}

/// `η(mz) = q^(m/24) ∏(1 - q^(mn))`, covering every exponent below `end`.
pub fn eta<T: Scalar>(m: u64, end: usize) -> Result<QSeries<T>, SeriesError> {
    if m == 0 {
        return Err(SeriesError::NonPositive("eta dilation"));
    }
    let offset = Offset(m as i64);
    let span = 24 * end as i64 - m as i64;
    let prec = if span <= 0 {
        0
    } else {
        Integer::div_ceil(&span, &24) as usize
    };
    let stride = m as usize;
    let base = euler::<T>(prec.div_ceil(stride));
    let terms = base
        .nonzero_terms()
        .into_iter()
        .map(|(i, c)| (i * stride, c.clone()))
        .filter(|(i, _)| *i < prec)
        .collect();
    QSeries::from_sparse(offset, prec, terms)
}

/// `θ(mz) = Σ_{n∈ℤ} q^(m n²)`.
pub fn theta<T: Scalar>(m: u64, prec: usize) -> Result<QSeries<T>, SeriesError> {
    if m == 0 {
        return Err(SeriesError::NonPositive("theta dilation"));
    }
    let mut terms = Vec::new();
    if prec > 0 {
        terms.push((0, T::one()));
    }
    let two = T::from_i64(2);
    let mut n = 1usize;
    while (m as usize) * n * n < prec {
        terms.push(((m as usize) * n * n, two.clone()));
        n += 1;
    }
    QSeries::from_sparse(Offset::ZERO, prec, terms)
}

/// Unary theta series `Σ_{n∈ℤ} ψ(n) n q^(m n²)` for an odd primitive real `ψ`.
pub fn theta_psi<T: Scalar>(
    psi: &DirichletCharacter,
    m: u64,
    prec: usize,
) -> Result<QSeries<T>, SeriesError> {
    if m == 0 {
        return Err(SeriesError::NonPositive("theta dilation"));
    }
    if psi.parity() != Parity::Odd || !psi.is_primitive() {
        return Err(SeriesError::BadThetaCharacter(psi.to_string()));
    }
    let mut terms = Vec::new();
    let mut n = 1usize;
    while (m as usize) * n * n < prec {
        let v = psi.value(n as i64) as i64;
        if v != 0 {
            terms.push(((m as usize) * n * n, T::from_i64(2 * v * n as i64)));
        }
        n += 1;
    }
    QSeries::from_sparse(Offset::ZERO, prec, terms)
}

/// `E₄ = 1 + 240 Σ σ₃(n) qⁿ`, with `σ₃` from a divisor sieve.
pub fn eisenstein_e4<T: Scalar>(prec: usize) -> QSeries<T> {
    let mut sigma = vec![0u128; prec];
    for d in 1..prec {
        let cube = (d as u128).pow(3);
        let mut n = d;
        while n < prec {
            sigma[n] += cube;
            n += d;
        }
    }
    let coeffs = sigma
        .into_iter()
        .enumerate()
        .map(|(n, s)| {
            if n == 0 {
                T::one()
            } else {
                T::from_bigint(&(BigInt::from(s) * 240))
            }
        })
        .collect();
    QSeries::from_dense(Offset::ZERO, coeffs)
}

impl<T: Scalar + fmt::Display> fmt::Display for QSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.nonzero_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*q^({})", self.offset.plus_index(i))?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^({}))", self.end())
    }
}
