//! Number-theoretic primitives: Kronecker symbols, real Dirichlet characters,
//! fundamental discriminants, square-free decomposition and divisors.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{0} is not square-free")]
    NotSquarefree(u64),
    #[error("level {0} is not divisible by 4")]
    LevelNotDivisibleBy4(u64),
    #[error("zero is not a discriminant")]
    ZeroDiscriminant,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("kronecker symbol ({top}/.) does not define a character modulo {modulus}")]
    NotACharacter { top: i64, modulus: u64 },
    #[error("invalid character spec {0:?}")]
    BadCharacterSpec(String),
}

/// The extended Kronecker symbol `(a/n)`, defined for every pair of integers.
///
/// `(a/0)` is 1 for `a = ±1` and 0 otherwise.
pub fn kronecker(a: i64, n: i64) -> i32 {
    kronecker_i128(a as i128, n as i128)
}

/// [`kronecker`] over `i128`, used when the top is a product like `N²t`.
pub fn kronecker_i128(a: i128, n: i128) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut sign = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -1;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= twos;
        let r = a.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            sign = -sign;
        }
    }
    sign * jacobi(a.rem_euclid(n), n)
}

/// Jacobi symbol for odd positive `n` and `0 <= a < n`.
fn jacobi(mut a: i128, mut n: i128) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut result = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        let r = n % 8;
        if tz % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `χ_{t,N}(d) = ((-1)^k N² t / d)`, the quadratic character attached to
/// the square-free index `t` of a weight `k + 1/2` form on level `N`.
pub fn chi_t_n(k: u32, level: u64, t: u64, d: i64) -> Result<i32, ArithError> {
    if !level.is_multiple_of(4) {
        return Err(ArithError::LevelNotDivisibleBy4(level));
    }
    if !is_squarefree(t) {
        return Err(ArithError::NotSquarefree(t));
    }
    let sign: i128 = if k.is_multiple_of(2) { 1 } else { -1 };
    let top = sign * (level as i128) * (level as i128) * (t as i128);
    Ok(kronecker_i128(top, d as i128))
}

/// `χ*(a) = (-4/a)^k χ(a)`.
pub fn chi_star(chi: &DirichletCharacter, k: u32, a: i64) -> i32 {
    kronecker(-4, a).pow(k) * chi.value(a)
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Primes `<= limit`, by sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Writes `n = t·m²` with `t` square-free.
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    assert!(n >= 1, "squarefree_decompose needs n >= 1");
    let mut t = 1;
    let mut m = 1;
    for (p, e) in factorize(n) {
        if e % 2 == 1 {
            t *= p;
        }
        m *= p.pow(e / 2);
    }
    (t, m)
}

/// Positive divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors needs n >= 1");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// True iff `d` is the discriminant of a quadratic field, with `1` admitted.
pub fn is_fundamental_discriminant(d: i64) -> Result<bool, ArithError> {
    if d == 0 {
        return Err(ArithError::ZeroDiscriminant);
    }
    if d == 1 {
        return Ok(true);
    }
    match d.rem_euclid(4) {
        1 => Ok(is_squarefree(d.unsigned_abs())),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            Ok((r == 2 || r == 3) && is_squarefree(m.unsigned_abs()))
        }
        _ => Ok(false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// A real Dirichlet character modulo `modulus`, given as the Kronecker symbol
/// `(top/·)` restricted to integers coprime to the modulus.
///
/// The trivial (principal) character mod `N` is stored with `top = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    top: i64,
    modulus: u64,
    is_trivial: bool,
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        DirichletCharacter {
            top: 1,
            modulus,
            is_trivial: true,
        }
    }

    /// Builds `a ↦ (top/a)` on `(ℤ/modulus)^×`; fails unless this is periodic
    /// modulo `modulus`.
    pub fn kronecker(top: i64, modulus: u64) -> Result<Self, ArithError> {
        if modulus == 0 {
            return Err(ArithError::ZeroModulus);
        }
        let chi = DirichletCharacter {
            top,
            modulus,
            is_trivial: false,
        };
        let n = modulus as i64;
        let span = (4 * top.unsigned_abs().max(1))
            .saturating_mul(modulus)
            .min(1 << 20) as i64;
        for a in -span..=span {
            if chi.value(a) != chi.value(a + n) {
                return Err(ArithError::NotACharacter { top, modulus });
            }
        }
        let trivial = (1..=n).all(|a| a.gcd(&n) != 1 || chi.value(a) == 1);
        Ok(DirichletCharacter {
            is_trivial: trivial,
            ..chi
        })
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_trivial(&self) -> bool {
        self.is_trivial
    }

    pub fn value(&self, a: i64) -> i32 {
        if (a.unsigned_abs()).gcd(&self.modulus) != 1 {
            return 0;
        }
        if self.is_trivial {
            1
        } else {
            kronecker(self.top, a)
        }
    }

    pub fn parity(&self) -> Parity {
        if self.value(-1) == -1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Smallest divisor `d` of the modulus through which the character factors.
    pub fn conductor(&self) -> u64 {
        let n = self.modulus;
        for d in divisors(n) {
            let induced = (1..=n)
                .filter(|a| a.gcd(&n) == 1 && a % d == 1 % d)
                .all(|a| self.value(a as i64) == 1);
            if induced {
                return d;
            }
        }
        n
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// `χ²`, which for a real character is the principal character mod `modulus`.
    pub fn square(&self) -> Self {
        DirichletCharacter::trivial(self.modulus)
    }

    /// The same character viewed modulo another modulus with identical prime support.
    pub fn with_modulus(&self, modulus: u64) -> Self {
        DirichletCharacter {
            modulus,
            ..self.clone()
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial {
            write!(f, "trivial:{}", self.modulus)
        } else {
            write!(f, "kronecker:{}/mod:{}", self.top, self.modulus)
        }
    }
}

impl FromStr for DirichletCharacter {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::BadCharacterSpec(s.to_string());
        if let Some(rest) = s.strip_prefix("trivial:") {
            let m: u64 = rest.parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(bad());
            }
            return Ok(DirichletCharacter::trivial(m));
        }
        let rest = s.strip_prefix("kronecker:").ok_or_else(bad)?;
        let (top, modulus) = rest.split_once("/mod:").ok_or_else(bad)?;
        let top: i64 = top.parse().map_err(|_| bad())?;
        let modulus: u64 = modulus.parse().map_err(|_| bad())?;
        DirichletCharacter::kronecker(top, modulus)
    }
}
