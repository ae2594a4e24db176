//! A small expression language for building q-series from eta, theta and
//! Eisenstein atoms.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := rational '*' factor
//!         | rational
//!         | primary ('^' int)?
//! primary:= atom | '(' expr ')' | 'D(' expr ')' | 'U(' int ',' expr ')'
//! atom   := 'eta(' int ')' | 'theta(' int ')' | 'thetapsi(' sint ',' int ')' | 'E4(' int ')'
//! rational := int ('/' int)?
//! ```
//!
//! Atom arguments are dilations: `eta(2)` is `η(2z)`. `D` is `q d/dq` and
//! `U(m, ·)` picks every `m`-th coefficient. `thetapsi(D, m)` is the unary
//! theta series of the odd primitive character `(D/·)` at `mz`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::FormError;
use crate::arith::{DirichletCharacter, Parity};
use crate::qseries::{self, Offset, QSeries, SeriesError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormSpec {
    Eta(u64),
    Theta(u64),
    ThetaPsi { top: i64, m: u64 },
    E4(u64),
    Const(BigRational),
    Add(Box<FormSpec>, Box<FormSpec>),
    Sub(Box<FormSpec>, Box<FormSpec>),
    Mul(Box<FormSpec>, Box<FormSpec>),
    Pow(Box<FormSpec>, u32),
    Scale(BigRational, Box<FormSpec>),
    D(Box<FormSpec>),
    U(u64, Box<FormSpec>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Expected(&'static str),
    UnknownName(String),
    TrailingInput,
    ArgumentRange(String),
    BadNumber,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnknownName(name) => write!(f, "unknown name {name:?}"),
            ParseErrorKind::TrailingInput => write!(f, "unexpected trailing input"),
            ParseErrorKind::ArgumentRange(msg) => write!(f, "argument out of range: {msg}"),
            ParseErrorKind::BadNumber => write!(f, "number too large"),
        }
    }
}

pub fn parse_formspec(text: &str) -> Result<FormSpec, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let spec = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(ParseErrorKind::TrailingInput));
    }
    Ok(spec)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(ParseErrorKind::Expected(what)))
        }
    }

    fn expr(&mut self) -> Result<FormSpec, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = FormSpec::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = FormSpec::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<FormSpec, ParseError> {
        let mut lhs = self.factor()?;
        while self.eat(b'*') {
            lhs = FormSpec::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<FormSpec, ParseError> {
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let r = self.rational()?;
            let save = self.pos;
            if self.eat(b'*') {
                return Ok(FormSpec::Scale(r, Box::new(self.factor()?)));
            }
            self.pos = save;
            return Ok(FormSpec::Const(r));
        }
        let base = self.primary()?;
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.uint()?;
            if e == 0 || e > u32::MAX as u64 {
                return Err(ParseError {
                    offset: at,
                    kind: ParseErrorKind::ArgumentRange("exponent must be >= 1".into()),
                });
            }
            return Ok(FormSpec::Pow(Box::new(base), e as u32));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<FormSpec, ParseError> {
        if self.eat(b'(') {
            let inner = self.expr()?;
            self.expect(b')', "')'")?;
            return Ok(inner);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(ParseErrorKind::Expected("an atom, '(' or a number")));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .to_string();
        let spec = match name.as_str() {
            "eta" | "theta" | "E4" => {
                self.expect(b'(', "'('")?;
                let m = self.dilation()?;
                self.expect(b')', "')'")?;
                match name.as_str() {
                    "eta" => FormSpec::Eta(m),
                    "theta" => FormSpec::Theta(m),
                    _ => FormSpec::E4(m),
                }
            }
            "thetapsi" => {
                self.expect(b'(', "'('")?;
                self.skip_ws();
                let at = self.pos;
                let top = self.sint()?;
                let ok = DirichletCharacter::kronecker(top, top.unsigned_abs())
                    .is_ok_and(|psi| psi.parity() == Parity::Odd && psi.is_primitive());
                if !ok {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::ArgumentRange(format!(
                            "({top}/.) is not an odd primitive character"
                        )),
                    });
                }
                self.expect(b',', "','")?;
                let m = self.dilation()?;
                self.expect(b')', "')'")?;
                FormSpec::ThetaPsi { top, m }
            }
            "D" => {
                self.expect(b'(', "'('")?;
                let inner = self.expr()?;
                self.expect(b')', "')'")?;
                FormSpec::D(Box::new(inner))
            }
            "U" => {
                self.expect(b'(', "'('")?;
                let m = self.dilation()?;
                self.expect(b',', "','")?;
                let inner = self.expr()?;
                self.expect(b')', "')'")?;
                FormSpec::U(m, Box::new(inner))
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnknownName(name),
                })
            }
        };
        Ok(spec)
    }

    fn dilation(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let m = self.uint()?;
        if m == 0 {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::ArgumentRange("argument must be >= 1".into()),
            });
        }
        Ok(m)
    }

    fn digits(&mut self) -> Result<&str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(ParseErrorKind::Expected("an integer")));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        let at = self.pos;
        self.digits()?.parse().map_err(|_| ParseError {
            offset: at,
            kind: ParseErrorKind::BadNumber,
        })
    }

    fn sint(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat(b'-');
        let at = self.pos;
        let v: i64 = self.digits()?.parse().map_err(|_| ParseError {
            offset: at,
            kind: ParseErrorKind::BadNumber,
        })?;
        Ok(if negative { -v } else { v })
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let num: BigInt = self.digits()?.parse().expect("digits");
        let save = self.pos;
        if self.eat(b'/') {
            let at = self.pos;
            if let Ok(den) = self.digits() {
                let den: BigInt = den.parse().expect("digits");
                if den.is_zero() {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::ArgumentRange("zero denominator".into()),
                    });
                }
                return Ok(BigRational::new(num, den));
            }
            self.pos = save;
        }
        Ok(BigRational::from_integer(num))
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormSpec::Eta(m) => write!(f, "eta({m})"),
            FormSpec::Theta(m) => write!(f, "theta({m})"),
            FormSpec::ThetaPsi { top, m } => write!(f, "thetapsi({top},{m})"),
            FormSpec::E4(m) => write!(f, "E4({m})"),
            FormSpec::Const(r) => write!(f, "{r}"),
            FormSpec::Add(a, b) => write!(f, "({a} + {b})"),
            FormSpec::Sub(a, b) => write!(f, "({a} - {b})"),
            FormSpec::Mul(a, b) => write!(f, "({a} * {b})"),
            FormSpec::Pow(a, e) => match **a {
                FormSpec::Eta(_)
                | FormSpec::Theta(_)
                | FormSpec::ThetaPsi { .. }
                | FormSpec::E4(_)
                | FormSpec::D(_)
                | FormSpec::U(..) => {
                    write!(f, "{a}^{e}")
                }
                _ => write!(f, "({a})^{e}"),
            },
            FormSpec::Scale(r, a) => write!(f, "{r}*({a})"),
            FormSpec::D(a) => write!(f, "D({a})"),
            FormSpec::U(m, a) => write!(f, "U({m}, {a})"),
        }
    }
}

/// Evaluates `spec` as a q-series covering every exponent below `prec`.
pub fn evaluate<T: Scalar>(spec: &FormSpec, prec: usize) -> Result<QSeries<T>, FormError> {
    Ok(eval(spec, prec)?.truncate_abs(Offset::integer(prec as i64)))
}

/// Children are evaluated to the same exponent bound; every atom has a
/// nonnegative offset, so sums and products stay valid below `end`.
fn eval<T: Scalar>(spec: &FormSpec, end: usize) -> Result<QSeries<T>, FormError> {
    let s = match spec {
        FormSpec::Eta(m) => qseries::eta(*m, end)?,
        FormSpec::Theta(m) => qseries::theta(*m, end)?,
        FormSpec::ThetaPsi { top, m } => {
            let psi = DirichletCharacter::kronecker(*top, top.unsigned_abs())?;
            qseries::theta_psi(&psi, *m, end)?
        }
        FormSpec::E4(m) => qseries::eisenstein_e4::<T>(end.div_ceil(*m as usize))
            .dilate(*m)?
            .truncate(end),
        FormSpec::Const(c) => {
            let v = T::one()
                .scale(c)
                .ok_or_else(|| SeriesError::NotRepresentable(c.to_string()))?;
            let terms = if end > 0 && !c.is_zero() {
                vec![(0, v)]
            } else {
                Vec::new()
            };
            QSeries::from_sparse(Offset::ZERO, end, terms)?
        }
        FormSpec::Add(a, b) => eval::<T>(a, end)?.add(&eval(b, end)?)?,
        FormSpec::Sub(a, b) => eval::<T>(a, end)?.sub(&eval(b, end)?)?,
        FormSpec::Mul(a, b) => eval::<T>(a, end)?.mul(&eval(b, end)?),
        FormSpec::Pow(a, e) => eval::<T>(a, end)?.pow(*e)?,
        FormSpec::Scale(r, a) => {
            let inner = eval::<T>(a, end)?;
            if r.is_one() {
                inner
            } else {
                inner.scale(r)?
            }
        }
        FormSpec::D(a) => eval::<T>(a, end)?.derive()?,
        FormSpec::U(m, a) => {
            let inner_end = (*m as usize) * end.saturating_sub(1) + 1;
            eval::<T>(a, inner_end)?.u_op(*m)?
        }
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{delta_form_series, g_form};
    use crate::scalar::ratio;

    fn b(s: FormSpec) -> Box<FormSpec> {
        Box::new(s)
    }

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse_formspec("eta(1)^24").unwrap(),
            FormSpec::Pow(b(FormSpec::Eta(1)), 24)
        );
        assert_eq!(
            parse_formspec("U(4, theta(11)*eta(2)*eta(22))").unwrap(),
            FormSpec::U(
                4,
                b(FormSpec::Mul(
                    b(FormSpec::Mul(b(FormSpec::Theta(11)), b(FormSpec::Eta(2)))),
                    b(FormSpec::Eta(22))
                ))
            )
        );
        assert_eq!(
            parse_formspec("1/4*D(E4(4))").unwrap(),
            FormSpec::Scale(ratio(1, 4), b(FormSpec::D(b(FormSpec::E4(4)))))
        );
        assert_eq!(
            parse_formspec(" thetapsi( -4 , 1 ) ").unwrap(),
            FormSpec::ThetaPsi { top: -4, m: 1 }
        );
        assert_eq!(
            parse_formspec("1 + 3/2").unwrap(),
            FormSpec::Add(
                b(FormSpec::Const(ratio(1, 1))),
                b(FormSpec::Const(ratio(3, 2)))
            )
        );
    }

    #[test]
    fn reports_error_offsets() {
        let text = "1/4*(2*E4(4)*D(theta(1)) - D(E4(4))*theta(1)";
        let err = parse_formspec(text).unwrap_err();
        assert_eq!(err.offset, text.len());
        assert_eq!(err.kind, ParseErrorKind::Expected("')'"));

        let err = parse_formspec("eta(0)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(matches!(err.kind, ParseErrorKind::ArgumentRange(_)));

        let err = parse_formspec("zeta(1)").unwrap_err();
        assert_eq!(
            err,
            ParseError {
                offset: 0,
                kind: ParseErrorKind::UnknownName("zeta".into())
            }
        );

        let err = parse_formspec("eta(1))").unwrap_err();
        assert_eq!(
            err,
            ParseError {
                offset: 6,
                kind: ParseErrorKind::TrailingInput
            }
        );

        assert!(matches!(
            parse_formspec("eta(1)^0").unwrap_err().kind,
            ParseErrorKind::ArgumentRange(_)
        ));
        assert!(matches!(
            parse_formspec("thetapsi(5,1)").unwrap_err().kind,
            ParseErrorKind::ArgumentRange(_)
        ));
        assert!(matches!(
            parse_formspec("U(4 theta(1))").unwrap_err().kind,
            ParseErrorKind::Expected("','")
        ));
        assert!(parse_formspec("").is_err());
    }

    fn ints(s: &QSeries<BigInt>) -> Vec<i64> {
        s.to_dense_vec()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn evaluates_examples() {
        let tau = evaluate::<BigInt>(&parse_formspec("eta(1)^24").unwrap(), 5).unwrap();
        assert_eq!(tau.offset(), Offset::integer(1));
        assert_eq!(ints(&tau), vec![1, -24, 252, -1472]);

        let e4 = evaluate::<BigInt>(&FormSpec::E4(1), 3).unwrap();
        assert_eq!(ints(&e4), vec![1, 240, 2160]);

        let th = evaluate::<BigInt>(&FormSpec::Theta(1), 2).unwrap();
        assert_eq!(ints(&th), vec![1, 2]);
    }

    #[test]
    fn dsl_delta_matches_named_constructor() {
        let spec = parse_formspec("1/4*(2*E4(4)*D(theta(1)) - 1/4*D(E4(4))*theta(1))").unwrap();
        let via_dsl = evaluate::<BigInt>(&spec, 200).unwrap();
        let named = delta_form_series(199).unwrap();
        assert_eq!(via_dsl.to_dense_vec(), named.to_dense_vec());
        let exact = evaluate::<BigRational>(&spec, 200).unwrap();
        assert!(exact.is_integral());
    }

    #[test]
    fn dsl_g_matches_named_constructor() {
        let prec = 300u64;
        let spec = parse_formspec("theta(11)*eta(2)*eta(22)").unwrap();
        let pre = evaluate::<BigInt>(&spec, 4 * prec as usize).unwrap();
        let via_dsl = pre.u_op(4).unwrap();
        let named = g_form(prec).unwrap();
        for n in 0..prec {
            assert_eq!(
                via_dsl.coeff(n as i64).unwrap(),
                named.coeff(n).unwrap() * 2,
                "n = {n}"
            );
        }
        let direct = evaluate::<BigInt>(
            &parse_formspec("1/2*U(4, theta(11)*eta(2)*eta(22))").unwrap(),
            prec as usize,
        )
        .unwrap();
        for n in 0..prec {
            assert_eq!(&direct.coeff(n as i64).unwrap(), named.coeff(n).unwrap());
        }
    }

    #[test]
    fn integer_ring_rejects_non_integral_scalars() {
        let spec = parse_formspec("1/3*theta(1)").unwrap();
        assert!(matches!(
            evaluate::<BigInt>(&spec, 5),
            Err(FormError::Series(SeriesError::NotRepresentable(_)))
        ));
        let r = evaluate::<BigRational>(&spec, 5).unwrap();
        assert_eq!(r.get(1).unwrap(), ratio(2, 3));
    }

    #[test]
    fn fractional_offset_reaching_u_is_rejected() {
        let spec = parse_formspec("U(2, eta(1))").unwrap();
        assert!(matches!(
            evaluate::<BigInt>(&spec, 5),
            Err(FormError::Series(SeriesError::FractionalOffset(_)))
        ));
    }

    #[test]
    fn display_reparses() {
        for text in [
            "eta(1)^24",
            "1/4*(2*E4(4)*D(theta(1)) - 1/4*D(E4(4))*theta(1))",
            "U(4, theta(11)*eta(2)*eta(22))",
            "thetapsi(-3,2) + 5",
        ] {
            let spec = parse_formspec(text).unwrap();
            assert_eq!(parse_formspec(&spec.to_string()).unwrap(), spec);
        }
    }
}
