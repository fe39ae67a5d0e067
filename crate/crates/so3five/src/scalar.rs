//! Scalars: the exact quadratic field ℚ(√3), floats, and the dynamic
//! [`Scalar`] that carries either kind and promotes to float on mixing.
//!
//! All geometry in this crate is generic over [`Field`], which is
//! implemented for `f32`, `f64`, [`QSqrt3`] and [`Scalar`].

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Environment variable overriding [`DEFAULT_TOL`].
pub const TOL_ENV: &str = "SO3FIVE_TOL";

/// Returns the tolerance from `SO3FIVE_TOL` if it is set and parses as a
/// positive number, otherwise [`DEFAULT_TOL`].
pub fn tolerance_from_env() -> f64 {
    std::env::var(TOL_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOL)
}

/// A commutative ring with unit; the coefficient type of exterior forms.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
}

impl<T> Ring for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + Send
        + Sync
        + 'static
{
}

/// A field containing ℚ(√3), either exactly or approximately.
///
/// Exact implementations ignore the tolerance argument of
/// [`Field::is_negligible`] and test for zero exactly.
pub trait Field: Ring + Div<Output = Self> + Num + fmt::Display {
    /// The rational number `n/d`.
    fn from_ratio(n: i64, d: i64) -> Self;
    /// An arbitrary-precision rational.
    fn from_rational(q: &BigRational) -> Self;
    /// The number √3.
    fn sqrt3() -> Self;
    /// Nearest `f64`.
    fn to_f64(&self) -> f64;
    /// True for exact kinds.
    fn is_exact(&self) -> bool;
    /// Zero test: exact for exact kinds, `|x| <= tol` otherwise.
    fn is_negligible(&self, tol: f64) -> bool;
    /// Converts a float, if the kind can represent floats.
    fn from_f64(x: f64) -> Option<Self>;
    /// Converts a dynamic [`Scalar`], if the kind can represent it.
    fn from_scalar(s: &Scalar) -> Option<Self>;
    /// Converts to a dynamic [`Scalar`].
    fn to_scalar(&self) -> Scalar;

    /// The integer `n`.
    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// Absolute value as `f64`.
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Sign of the number, using the tolerance for inexact kinds.
    fn signum_tol(&self, tol: f64) -> Ordering {
        if self.is_negligible(tol) {
            Ordering::Equal
        } else if self.to_f64() > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// An exact element `a + b·√3` of ℚ(√3) with arbitrary-precision rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt3 {
    a: BigRational,
    b: BigRational,
}

impl QSqrt3 {
    /// Builds `a + b·√3`.
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt3 { a, b }
    }

    /// Builds `(an/ad) + (bn/bd)·√3`.
    pub fn from_parts(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        QSqrt3 {
            a: rat(an, ad),
            b: rat(bn, bd),
        }
    }

    /// Rational part.
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of √3.
    pub fn sqrt3_part(&self) -> &BigRational {
        &self.b
    }

    /// Galois conjugate `a − b·√3`.
    pub fn conjugate(&self) -> Self {
        QSqrt3 {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a² − 3b²`, which vanishes only at zero.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(3, 1) * &self.b * &self.b
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2 = rat(3, 1) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }
}

impl fmt::Debug for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt3", self.b),
            (false, false) => write!(f, "{}+{}*sqrt3", self.a, self.b),
        }
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum())
    }
}

impl Zero for QSqrt3 {
    fn zero() -> Self {
        QSqrt3::default()
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt3 {
    fn one() -> Self {
        QSqrt3 {
            a: BigRational::one(),
            b: BigRational::zero(),
        }
    }
}

impl Add for QSqrt3 {
    type Output = QSqrt3;
    fn add(self, o: QSqrt3) -> QSqrt3 {
        QSqrt3 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Sub for QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, o: QSqrt3) -> QSqrt3 {
        QSqrt3 {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

impl Mul for QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, o: QSqrt3) -> QSqrt3 {
        if self.b.is_zero() && o.b.is_zero() {
            return QSqrt3 {
                a: self.a * o.a,
                b: BigRational::zero(),
            };
        }
        let a = &self.a * &o.a + rat(3, 1) * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        QSqrt3 { a, b }
    }
}

impl Div for QSqrt3 {
    type Output = QSqrt3;
    /// Panics on division by zero, like the rational division it wraps.
    fn div(self, o: QSqrt3) -> QSqrt3 {
        if o.b.is_zero() {
            return QSqrt3 {
                a: self.a / &o.a,
                b: self.b / &o.a,
            };
        }
        let n = o.norm();
        let num = self * o.conjugate();
        QSqrt3 {
            a: num.a / &n,
            b: num.b / n,
        }
    }
}

/// Remainder in a field is always zero; provided so that [`QSqrt3`]
/// satisfies [`num_traits::Num`].
impl Rem for QSqrt3 {
    type Output = QSqrt3;
    fn rem(self, _o: QSqrt3) -> QSqrt3 {
        QSqrt3::zero()
    }
}

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3 {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Sum for QSqrt3 {
    fn sum<I: Iterator<Item = QSqrt3>>(iter: I) -> QSqrt3 {
        iter.fold(QSqrt3::zero(), |acc, x| acc + x)
    }
}

impl Product for QSqrt3 {
    fn product<I: Iterator<Item = QSqrt3>>(iter: I) -> QSqrt3 {
        iter.fold(QSqrt3::one(), |acc, x| acc * x)
    }
}

impl Num for QSqrt3 {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::argument("only radix 10 is supported"));
        }
        match parse_scalar(s)? {
            Scalar::Exact(q) => Ok(q),
            Scalar::Float(_) => Err(Error::parse(0, "decimal literal is not exact")),
        }
    }
}

impl FromStr for QSqrt3 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QSqrt3::from_str_radix(s, 10)
    }
}

impl Field for QSqrt3 {
    fn from_ratio(n: i64, d: i64) -> Self {
        QSqrt3 {
            a: rat(n, d),
            b: BigRational::zero(),
        }
    }
    fn from_rational(q: &BigRational) -> Self {
        QSqrt3 {
            a: q.clone(),
            b: BigRational::zero(),
        }
    }
    fn sqrt3() -> Self {
        QSqrt3 {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * 3f64.sqrt()
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Exact(q) => Some(q.clone()),
            Scalar::Float(_) => None,
        }
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn signum_tol(&self, _tol: f64) -> Ordering {
        self.signum()
    }
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn from_ratio(n: i64, d: i64) -> Self {
                (n as f64 / d as f64) as $t
            }
            fn from_rational(q: &BigRational) -> Self {
                rat_to_f64(q) as $t
            }
            fn sqrt3() -> Self {
                (3.0 as $t).sqrt()
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn is_exact(&self) -> bool {
                false
            }
            fn is_negligible(&self, tol: f64) -> bool {
                (*self as f64).abs() <= tol
            }
            fn from_f64(x: f64) -> Option<Self> {
                Some(x as $t)
            }
            fn from_scalar(s: &Scalar) -> Option<Self> {
                Some(s.to_f64() as $t)
            }
            fn to_scalar(&self) -> Scalar {
                Scalar::Float(*self as f64)
            }
        }
    };
}

float_field!(f64);
float_field!(f32);

/// A coefficient that is either exact in ℚ(√3) or a float.
///
/// Arithmetic between an exact and a float operand yields a float.
#[derive(Clone)]
pub enum Scalar {
    /// Exact `a + b·√3`.
    Exact(QSqrt3),
    /// Approximate real number.
    Float(f64),
}

impl Scalar {
    /// Exact rational `n/d`.
    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::Exact(QSqrt3::from_ratio(n, d))
    }

    /// The exact payload, if any.
    pub fn as_exact(&self) -> Option<&QSqrt3> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    fn binop(
        self,
        o: Scalar,
        exact: impl FnOnce(QSqrt3, QSqrt3) -> QSqrt3,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            (a, b) => Scalar::Float(float(a.to_f64(), b.to_f64())),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}", q),
            Scalar::Float(x) => write!(f, "{:?}", x),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (a, b) => a.to_f64() == b.to_f64(),
        }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::Exact(QSqrt3::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::Exact(QSqrt3::one())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.binop(o, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.binop(o, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.binop(o, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        self.binop(o, |a, b| a / b, |a, b| a / b)
    }
}

impl Rem for Scalar {
    type Output = Scalar;
    fn rem(self, o: Scalar) -> Scalar {
        self.binop(o, |a, b| a % b, |a, b| a % b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Num for Scalar {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::argument("only radix 10 is supported"));
        }
        parse_scalar(s)
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_scalar(s)
    }
}

impl Field for Scalar {
    fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::ratio(n, d)
    }
    fn from_rational(q: &BigRational) -> Self {
        Scalar::Exact(QSqrt3::from_rational(q))
    }
    fn sqrt3() -> Self {
        Scalar::Exact(QSqrt3::sqrt3())
    }
    fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Float(x) => *x,
        }
    }
    fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }
    fn is_negligible(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => x.abs() <= tol,
        }
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Scalar::Float(x))
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        Some(s.clone())
    }
    fn to_scalar(&self) -> Scalar {
        self.clone()
    }
    fn signum_tol(&self, tol: f64) -> Ordering {
        match self {
            Scalar::Exact(q) => q.signum(),
            Scalar::Float(x) if x.abs() <= tol => Ordering::Equal,
            Scalar::Float(x) if *x > 0.0 => Ordering::Greater,
            Scalar::Float(_) => Ordering::Less,
        }
    }
}

/// Parses one rational literal `-?digits(/digits)?` starting at `pos`.
fn parse_rational(text: &str, offset: usize) -> Result<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num.strip_prefix(['-', '+']).unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(Error::parse(offset, format!("expected an integer, found {:?}", num)));
    }
    let n: BigInt = num
        .trim_start_matches('+')
        .parse()
        .map_err(|_| Error::parse(offset, format!("bad integer {:?}", num)))?;
    let d: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            let at = offset + num.len() + 1;
            if d.is_empty() || !d.bytes().all(|c| c.is_ascii_digit()) {
                return Err(Error::parse(at, format!("expected a denominator, found {:?}", d)));
            }
            let d: BigInt = d.parse().map_err(|_| Error::parse(at, "bad denominator"))?;
            if d.is_zero() {
                return Err(Error::parse(at, "zero denominator"));
            }
            d
        }
    };
    Ok(BigRational::new(n, d))
}

/// Parses the coefficient grammar
/// `rational | rational "*sqrt3" | rational "+" rational "*sqrt3" | decimal`.
///
/// A literal containing `.`, `e` or `E` is a decimal and becomes a float.
/// A bare `sqrt3` (optionally signed) is accepted as `1*sqrt3`, and `a-b*sqrt3`
/// as `a+(-b)*sqrt3`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let lead = text.len() - text.trim_start().len();
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::parse(0, "empty scalar"));
    }
    if s.contains(['.', 'e', 'E']) {
        let x: f64 = s
            .parse()
            .map_err(|_| Error::parse(lead, format!("malformed decimal {:?}", s)))?;
        if !x.is_finite() {
            return Err(Error::parse(lead, "decimal must be finite"));
        }
        return Ok(Scalar::Float(x));
    }
    if let Some(head) = s.strip_suffix("sqrt3") {
        // Split "a+b*" / "a-b*" / "b*" / "" / "-".
        let head = head.strip_suffix('*').unwrap_or(head);
        let bytes = head.as_bytes();
        let split = (1..bytes.len())
            .filter(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'+' | b'-'))
            .next_back();
        let (a_text, b_text, b_off) = match split {
            Some(i) => (&head[..i], &head[i..], i),
            None => ("", head, 0),
        };
        let a = if a_text.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(a_text, lead)?
        };
        let b_text = b_text.strip_prefix('+').unwrap_or(b_text);
        let b = match b_text {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_rational(t, lead + b_off)?,
        };
        return Ok(Scalar::Exact(QSqrt3::new(a, b)));
    }
    if s.contains(|c: char| c.is_ascii_alphabetic() || c == '*') {
        let at = s
            .find(|c: char| c.is_ascii_alphabetic() || c == '*')
            .unwrap_or(0);
        return Err(Error::parse(lead + at, format!("unexpected symbol in {:?}", s)));
    }
    Ok(Scalar::Exact(QSqrt3::new(parse_rational(s, lead)?, BigRational::zero())))
}

/// Sum of squares of a slice, as `f64` square root (a Euclidean norm).
pub fn norm_f64<T: Field>(xs: &[T]) -> f64 {
    xs.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

/// Exact sum of squares.
pub fn norm_sq<T: Field>(xs: &[T]) -> T {
    xs.iter()
        .fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse_scalar("3/2*sqrt3").unwrap(),
            Scalar::Exact(QSqrt3::from_parts(0, 1, 3, 2))
        );
        assert_eq!(parse_scalar("-1/2").unwrap(), Scalar::ratio(-1, 2));
        assert!(matches!(parse_scalar("0.25").unwrap(), Scalar::Float(x) if x == 0.25));
        assert_eq!(
            parse_scalar("1/3+-2*sqrt3").unwrap(),
            Scalar::Exact(QSqrt3::from_parts(1, 3, -2, 1))
        );
        assert_eq!(
            parse_scalar("1-2*sqrt3").unwrap(),
            Scalar::Exact(QSqrt3::from_parts(1, 1, -2, 1))
        );
        assert_eq!(parse_scalar("-sqrt3").unwrap(), Scalar::Exact(-QSqrt3::sqrt3()));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_scalar("1/x").unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 2, .. }), "{err:?}");
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("2*pi").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["0", "-1/2", "3/2*sqrt3", "1/3+-2*sqrt3", "0.25"] {
            let s = parse_scalar(text).unwrap();
            assert_eq!(parse_scalar(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn sqrt3_squares_to_three() {
        assert_eq!(QSqrt3::sqrt3() * QSqrt3::sqrt3(), QSqrt3::from_int(3));
    }

    #[test]
    fn mixed_kinds_promote_to_float() {
        let x = Scalar::ratio(1, 2) + Scalar::Float(0.25);
        assert!(matches!(x, Scalar::Float(v) if v == 0.75));
    }

    #[test]
    fn exact_sign() {
        assert_eq!(QSqrt3::from_parts(2, 1, -1, 1).signum(), Ordering::Greater);
        assert_eq!(QSqrt3::from_parts(1, 1, -1, 1).signum(), Ordering::Less);
        assert_eq!(QSqrt3::from_parts(-7, 4, 1, 1).signum(), Ordering::Less);
    }
}
