//! Exact arithmetic in the rationals and in a quadratic extension field
//! `Q(sqrt(d))` for a square-free integer `d`.
//!
//! Every coefficient in the library is a [`QuadExtScalar`]: a pair
//! `a + b*sqrt(d)` of arbitrary-precision rationals. A scalar with `b = 0`
//! is a plain rational and is compatible with any extension; two scalars
//! with different non-trivial radicands never mix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("radicand {0} is not admissible: it must be square-free and not 0 or 1")]
    InvalidRadicand(i64),
    #[error("scalars live in different quadratic fields (sqrt({0}) vs sqrt({1}))")]
    MismatchedField(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

/// Returns `Err` unless `d` is a square-free integer other than 0 and 1.
pub fn validate_radicand(d: i64) -> Result<(), ScalarError> {
    if d == 0 || d == 1 {
        return Err(ScalarError::InvalidRadicand(d));
    }
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Err(ScalarError::InvalidRadicand(d));
            }
        }
        p += 1;
    }
    Ok(())
}

/// An element `a + b*sqrt(d)` of `Q(sqrt(d))`, exact.
///
/// Canonical form: the rationals are reduced (the backing type guarantees
/// that), and whenever `b = 0` the radicand is cleared to the sentinel 0,
/// so pure rationals compare equal regardless of which field produced them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExtScalar {
    a: Rational,
    b: Rational,
    d: i64,
}

impl QuadExtScalar {
    /// Builds `a + b*sqrt(d)`, validating `d` when `b` is nonzero.
    pub fn new(a: Rational, b: Rational, d: i64) -> Result<Self, ScalarError> {
        if !b.is_zero() {
            validate_radicand(d)?;
        }
        Ok(Self::normalized(a, b, d))
    }

    fn normalized(a: Rational, b: Rational, d: i64) -> Self {
        let d = if b.is_zero() { 0 } else { d };
        QuadExtScalar { a, b, d }
    }

    pub fn zero() -> Self {
        Self::normalized(Rational::zero(), Rational::zero(), 0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::normalized(r, Rational::zero(), 0)
    }

    /// `p/q` as a scalar. Panics if `q = 0`.
    pub fn rational(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: i64) -> Result<Self, ScalarError> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    /// Coordinate on 1.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Coordinate on `sqrt(d)`.
    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    /// The radicand, or `None` for a pure rational.
    pub fn radicand(&self) -> Option<i64> {
        if self.d == 0 {
            None
        } else {
            Some(self.d)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational value, if this scalar lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// The common radicand of two scalars, or an error when they belong to
    /// genuinely different extensions.
    fn join_radicand(&self, rhs: &Self) -> Result<i64, ScalarError> {
        match (self.d, rhs.d) {
            (0, d) | (d, 0) => Ok(d),
            (d1, d2) if d1 == d2 => Ok(d1),
            (d1, d2) => Err(ScalarError::MismatchedField(d1, d2)),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.join_radicand(rhs)?;
        Ok(Self::normalized(&self.a + &rhs.a, &self.b + &rhs.b, d))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.join_radicand(rhs)?;
        Ok(Self::normalized(&self.a - &rhs.a, &self.b - &rhs.b, d))
    }

    /// Exact product, using `sqrt(d)^2 = d`.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.join_radicand(rhs)?;
        // rational factors multiply coordinatewise
        if self.b.is_zero() {
            return Ok(Self::normalized(&self.a * &rhs.a, &self.a * &rhs.b, d));
        }
        if rhs.b.is_zero() {
            return Ok(Self::normalized(&self.a * &rhs.a, &self.b * &rhs.a, d));
        }
        let dr = Rational::from_integer(BigInt::from(d));
        let a = &self.a * &rhs.a + &dr * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(Self::normalized(a, b, d))
    }

    /// Field norm `a^2 - d*b^2`; zero exactly when the scalar is zero.
    pub fn norm(&self) -> Rational {
        let dr = Rational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - dr * &self.b * &self.b
    }

    /// Multiplicative inverse via the field norm.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm();
        // n = 0 with self != 0 would make d a rational square, which the
        // square-free check rules out.
        debug_assert!(!n.is_zero());
        Ok(Self::normalized(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        self.checked_mul(&rhs.inv()?)
    }

    /// Integer power, negative exponents via the inverse.
    pub fn pow(&self, e: i64) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let nr = Rational::from_integer(BigInt::from(n));
        Self::normalized(&self.a * &nr, &self.b * &nr, self.d)
    }

    /// Parses the literal formats `"p/q"` and `"p/q + r/s*sqrt(d)"`
    /// (whitespace-insensitive, any number of `+`/`-` separated terms,
    /// bare `sqrt(d)` allowed). Radicands other than `session_d` are
    /// rejected.
    pub fn parse(input: &str, session_d: i64) -> Result<Self, ScalarError> {
        parse_literal(input, session_d)
    }
}

impl Add for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn add(self, rhs: &QuadExtScalar) -> QuadExtScalar {
        self.checked_add(rhs).expect("scalar field mismatch")
    }
}

impl Sub for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn sub(self, rhs: &QuadExtScalar) -> QuadExtScalar {
        self.checked_sub(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn mul(self, rhs: &QuadExtScalar) -> QuadExtScalar {
        self.checked_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        QuadExtScalar::normalized(-&self.a, -&self.b, self.d)
    }
}

impl Add for QuadExtScalar {
    type Output = QuadExtScalar;
    fn add(self, rhs: QuadExtScalar) -> QuadExtScalar {
        &self + &rhs
    }
}

impl Sub for QuadExtScalar {
    type Output = QuadExtScalar;
    fn sub(self, rhs: QuadExtScalar) -> QuadExtScalar {
        &self - &rhs
    }
}

impl Mul for QuadExtScalar {
    type Output = QuadExtScalar;
    fn mul(self, rhs: QuadExtScalar) -> QuadExtScalar {
        &self * &rhs
    }
}

impl Neg for QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        -&self
    }
}

impl fmt::Display for QuadExtScalar {
    /// Writes the scalar back in the literal format the parser accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let abs_b = self.b.abs();
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{}*sqrt({})", abs_b, self.d)
            } else {
                write!(f, "{}*sqrt({})", abs_b, self.d)
            }
        } else if self.b.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.a, abs_b, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, abs_b, self.d)
        }
    }
}

// ---------------------------------------------------------------------------
// Literal parsing

struct Cursor<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, reason: impl Into<String>) -> ScalarError {
        ScalarError::Parse {
            literal: self.src.to_string(),
            reason: reason.into(),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let neg = self.eat(b'-');
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected a number at offset {}", self.pos)));
        }
        let digits: BigInt = self.src[start..self.pos].parse().expect("digits parse");
        Ok(if neg { -digits } else { digits })
    }

    fn rational(&mut self) -> Result<Rational, ScalarError> {
        let numer = self.integer()?;
        if self.eat(b'/') {
            let denom = self.integer()?;
            if denom.is_zero() {
                return Err(self.err("zero denominator"));
            }
            Ok(Rational::new(numer, denom))
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    fn sqrt_radicand(&mut self) -> Result<i64, ScalarError> {
        // caller has already consumed the 's'
        for c in [b'q', b'r', b't'] {
            if self.bump() != Some(c) {
                return Err(self.err("expected `sqrt(...)`"));
            }
        }
        if !self.eat(b'(') {
            return Err(self.err("expected `(` after sqrt"));
        }
        let d = self.integer()?;
        if !self.eat(b')') {
            return Err(self.err("expected `)` closing sqrt"));
        }
        i64::try_from(d).map_err(|_| self.err("radicand out of range"))
    }
}

fn parse_literal(input: &str, session_d: i64) -> Result<QuadExtScalar, ScalarError> {
    validate_radicand(session_d)?;
    let mut cur = Cursor::new(input);
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    let mut first = true;
    loop {
        let sign = match cur.peek() {
            None if first => return Err(cur.err("empty literal")),
            None => break,
            Some(b'+') => {
                cur.bump();
                false
            }
            Some(b'-') => {
                cur.bump();
                true
            }
            Some(_) if first => false,
            Some(other) => {
                return Err(cur.err(format!(
                    "expected `+` or `-` before next term, found {:?}",
                    other as char
                )))
            }
        };
        first = false;

        // term := rational ['*' sqrt(d)] | sqrt(d)
        let (coeff, is_surd) = if cur.peek() == Some(b's') {
            cur.bump();
            let d = cur.sqrt_radicand()?;
            if d != session_d {
                return Err(cur.err(format!(
                    "radicand {d} does not match the session field sqrt({session_d})"
                )));
            }
            (Rational::one(), true)
        } else {
            let q = cur.rational()?;
            if cur.eat(b'*') {
                if cur.bump() != Some(b's') {
                    return Err(cur.err("expected `sqrt(...)` after `*`"));
                }
                let d = cur.sqrt_radicand()?;
                if d != session_d {
                    return Err(cur.err(format!(
                        "radicand {d} does not match the session field sqrt({session_d})"
                    )));
                }
                (q, true)
            } else {
                (q, false)
            }
        };
        let coeff = if sign { -coeff } else { coeff };
        if is_surd {
            b += coeff;
        } else {
            a += coeff;
        }
    }
    QuadExtScalar::new(a, b, session_d)
}
