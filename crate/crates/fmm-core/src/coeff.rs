//! Exact arithmetic in Q(√3).
//!
//! A [`Coefficient`] is `a + b·√3` with rational `a`, `b`. Text form uses the
//! token `s3` for √3: `1/2`, `-2/3*s3`, `1/2+1/6*s3`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Coefficient {
    pub a: Rational,
    pub b: Rational,
}

impl Coefficient {
    pub fn new(a: Rational, b: Rational) -> Self {
        Coefficient { a, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(v: i64) -> Self {
        Coefficient { a: Rational::from_integer(v.into()), b: Rational::zero() }
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Coefficient { a: Rational::new(n.into(), d.into()), b: Rational::zero() }
    }

    /// `(n/d)·√3`.
    pub fn s3(n: i64, d: i64) -> Self {
        Coefficient { a: Rational::zero(), b: Rational::new(n.into(), d.into()) }
    }

    pub fn rational(q: Rational) -> Self {
        Coefficient { a: q, b: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    /// True for `+1` and `-1`.
    pub fn is_unit(&self) -> bool {
        self.b.is_zero() && self.a.abs().is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coefficient { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a² − 3b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(3.into()) * &self.b * &self.b
    }

    /// Exact sign of the real number `a + b√3`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == sb {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sb == 0 {
            return sa;
        }
        // opposite signs: compare a² with 3b²
        match self.norm().cmp(&Rational::zero()) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Coefficient { a: &self.a / &n, b: -(&self.b / &n) })
    }

    pub fn checked_div(&self, rhs: &Coefficient) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Correctly rounded binary64 value of `a + b√3`.
    pub fn to_f64(&self) -> f64 {
        if self.b.is_zero() {
            return rational_to_f64(&self.a);
        }
        let mut bits = 128u32;
        loop {
            let scale = BigInt::one() << bits;
            let root = (BigInt::from(3) * &scale * &scale).sqrt();
            let lo = Rational::new(root.clone(), scale.clone());
            let hi = Rational::new(root + 1, scale);
            let (x, y) = if self.b.is_positive() { (lo, hi) } else { (hi, lo) };
            let f1 = rational_to_f64(&(&self.a + &self.b * x));
            let f2 = rational_to_f64(&(&self.a + &self.b * y));
            if f1 == f2 {
                return f1;
            }
            bits *= 2;
        }
    }
}

fn sign_of(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Correctly rounded (ties to even) conversion of a rational to binary64.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let neg = q.is_negative();
    let n = q.numer().abs();
    let d = q.denom().clone();
    // choose shift so that floor(n·2^s/d) has exactly 53 bits
    let mut s: i64 = 53 - (n.bits() as i64 - d.bits() as i64);
    let (mut m, mut rem, mut den);
    loop {
        let (num, dd) = if s >= 0 { (&n << (s as u64), d.clone()) } else { (n.clone(), &d << ((-s) as u64)) };
        let (qq, rr) = num.div_rem(&dd);
        if qq.bits() > 53 {
            s -= 1;
            continue;
        }
        if qq.bits() < 53 {
            s += 1;
            continue;
        }
        m = qq;
        rem = rr;
        den = dd;
        break;
    }
    // exponent of the result: value ≈ m · 2^{-s}, with 2^52 ≤ m < 2^53
    let min_s = 1074i64;
    if s > min_s {
        // subnormal range: redo with fixed scale
        let shift = s - min_s;
        let full = &m * &den + &rem;
        let dd = &den << (shift as u64);
        let (qq, rr) = full.div_rem(&dd);
        m = qq;
        rem = rr;
        den = dd;
        s = min_s;
    }
    let twice = &rem << 1u64;
    let round_up = match twice.cmp(&den) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => m.is_odd(),
    };
    if round_up {
        m += 1;
    }
    let mf = biguint_to_f64_exact(&m);
    let v = ldexp(mf, -s);
    if neg {
        -v
    } else {
        v
    }
}

fn biguint_to_f64_exact(m: &BigInt) -> f64 {
    // m < 2^54 always fits exactly
    let (_, digits) = m.to_u64_digits();
    digits.first().copied().unwrap_or(0) as f64
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl From<i64> for Coefficient {
    fn from(v: i64) -> Self {
        Coefficient::int(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Coefficient> for &'a Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: &'a Coefficient) -> Coefficient {
                let f: fn(&Coefficient, &Coefficient) -> Coefficient = $body;
                f(self, rhs)
            }
        }
        impl $tr<Coefficient> for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: Coefficient) -> Coefficient {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Coefficient> for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: &'a Coefficient) -> Coefficient {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |x, y| Coefficient { a: &x.a + &y.a, b: &x.b + &y.b });
binop!(Sub, sub, |x, y| Coefficient { a: &x.a - &y.a, b: &x.b - &y.b });
binop!(Mul, mul, |x, y| Coefficient {
    a: &x.a * &y.a + Rational::from_integer(3.into()) * &x.b * &y.b,
    b: &x.a * &y.b + &x.b * &y.a,
});

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { a: -self.a, b: -self.b }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { a: -self.a.clone(), b: -self.b.clone() }
    }
}

impl PartialOrd for Coefficient {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coefficient {
    /// Real-number order.
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*s3", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}*s3", self.a, -self.b.clone())
                } else {
                    write!(f, "{}+{}*s3", self.a, self.b)
                }
            }
        }
    }
}

pub fn format_coeff(x: &Coefficient) -> String {
    x.to_string()
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos + 1, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse::<BigInt>().unwrap())
    }

    /// `['-'] int ['/' int]`
    fn rat(&mut self) -> Result<Rational> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.int()?;
        let d = if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let d = self.int()?;
            if d.is_zero() {
                self.pos = at;
                return Err(Error::Syntax { pos: at + 1, msg: "zero denominator".into() });
            }
            d
        } else {
            BigInt::one()
        };
        let q = Rational::new(n, d);
        Ok(if neg { -q } else { q })
    }

    /// Returns (value, is_radical_term).
    fn term(&mut self) -> Result<(Rational, bool)> {
        let q = self.rat()?;
        if self.s[self.pos..].starts_with(b"*s3") {
            self.pos += 3;
            Ok((q, true))
        } else {
            Ok((q, false))
        }
    }
}

pub fn parse_coeff(text: &str) -> Result<Coefficient> {
    let t = text.trim();
    let mut c = Cursor { s: t.as_bytes(), pos: 0 };
    let mut out = Coefficient::zero();
    let (q, rad) = c.term()?;
    if rad {
        out.b += q;
    } else {
        out.a += q;
    }
    if let Some(op) = c.peek() {
        let neg = match op {
            b'+' => false,
            b'-' => true,
            _ => return c.err("expected '+', '-' or end of token"),
        };
        c.pos += 1;
        let (q, rad) = c.term()?;
        let q = if neg { -q } else { q };
        if rad {
            out.b += q;
        } else {
            out.a += q;
        }
    }
    if c.pos != t.len() {
        return c.err("trailing characters");
    }
    Ok(out)
}

impl FromStr for Coefficient {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_coeff(s)
    }
}

/// Field operation selector for [`coeff_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn coeff_arith(x: &Coefficient, y: &Coefficient, op: ArithOp) -> Result<Coefficient> {
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => x.checked_div(y)?,
    })
}

pub fn coeff_to_float(x: &Coefficient) -> f64 {
    x.to_f64()
}

/// Numeric scalar abstraction shared by the exact and binary64 evaluators.
pub trait Scalar: Clone + fmt::Debug {
    fn zero() -> Self;
    fn from_coeff(c: &Coefficient) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn recip(&self) -> Option<Self>;
}

impl Scalar for Coefficient {
    fn zero() -> Self {
        Coefficient::zero()
    }
    fn from_coeff(c: &Coefficient) -> Self {
        c.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_coeff(c: &Coefficient) -> Self {
        c.to_f64()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_examples() {
        let r3 = Coefficient::s3(1, 1);
        assert_eq!(&r3 * &r3, Coefficient::int(3));
        let q = Coefficient::int(2).checked_div(&r3).unwrap();
        assert_eq!(q, Coefficient::s3(2, 3));
        let x = parse_coeff("1/2+1/6*s3").unwrap();
        let y = parse_coeff("1/2-1/6*s3").unwrap();
        assert_eq!(x + y, Coefficient::one());
        assert_eq!(Coefficient::int(1).checked_div(&Coefficient::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn float_examples() {
        assert_eq!(Coefficient::frac(1, 2).to_f64(), 0.5);
        assert_eq!(Coefficient::s3(1, 2).to_f64(), 0.8660254037844386);
        assert_eq!(Coefficient::s3(2, 3).to_f64(), 1.1547005383792515);
        assert_eq!(Coefficient::frac(1, 3).to_f64(), 1.0 / 3.0);
        assert_eq!(Coefficient::frac(-7, 10).to_f64(), -0.7);
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_coeff("1/2*s3").unwrap(), Coefficient::s3(1, 2));
        assert_eq!(parse_coeff("-2/3*s3").unwrap(), Coefficient::s3(-2, 3));
        let c = parse_coeff("1/2+1/6*s3").unwrap();
        assert_eq!(c, Coefficient::frac(1, 2) + Coefficient::s3(1, 6));
        assert_eq!(format_coeff(&c), "1/2+1/6*s3");
        assert_eq!(format_coeff(&parse_coeff("-1/2-1/6*s3").unwrap()), "-1/2-1/6*s3");
        assert_eq!(format_coeff(&parse_coeff("2/4").unwrap()), "1/2");
        assert!(matches!(parse_coeff("1/0"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_coeff("1/2*s4"), Err(Error::Syntax { .. })));
        assert!(parse_coeff("").is_err());
    }

    #[test]
    fn signum_cases() {
        assert_eq!(parse_coeff("2-1*s3").unwrap().signum(), 1);
        assert_eq!(parse_coeff("1-1*s3").unwrap().signum(), -1);
        assert_eq!(parse_coeff("-2+1*s3").unwrap().signum(), -1);
        assert_eq!(Coefficient::zero().signum(), 0);
    }
}
