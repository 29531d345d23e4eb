//! Exact arithmetic in ℚ and in quadratic fields ℚ(√d).
//!
//! Elements are stored as `a + b√d` with arbitrary-precision rational
//! coordinates. Rings of integers use the half-integer basis `(1 + √d)/2`
//! when `d ≡ 1 (mod 4)`; integrality is decided on doubled coordinates.
//!
//! The compact [`QuadOrder`]/[`QuadInteger`] pair in [`order`] is the fixed
//! width counterpart used by the enumeration code.

pub mod order;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use order::{QuadInteger, QuadOrder};

/// ℚ or a quadratic field ℚ(√d), `d` squarefree and not 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldDescriptor {
    Rational,
    Quadratic(i64),
}

fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

impl FieldDescriptor {
    /// ℚ(√d). Rejects non-squarefree `d` and `d ∈ {0, 1}`.
    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::UnsupportedField(format!(
                "d = {d} must be a squarefree integer other than 0 and 1"
            )));
        }
        Ok(FieldDescriptor::Quadratic(d))
    }

    /// Integer code used on the command line and in reports: `0` is ℚ,
    /// anything else is the radicand.
    pub fn from_code(code: i64) -> Result<Self> {
        if code == 0 {
            Ok(FieldDescriptor::Rational)
        } else {
            Self::quadratic(code)
        }
    }

    /// ℚ(√−d) for a positive squarefree `d` (the Bianchi-group convention).
    pub fn imaginary(d: i64) -> Result<Self> {
        if d <= 0 {
            return Err(Error::UnsupportedField(format!(
                "expected a positive d for Q(sqrt(-d)), got {d}"
            )));
        }
        Self::quadratic(-d)
    }

    pub fn code(self) -> i64 {
        match self {
            FieldDescriptor::Rational => 0,
            FieldDescriptor::Quadratic(d) => d,
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            FieldDescriptor::Rational => 1,
            FieldDescriptor::Quadratic(_) => 2,
        }
    }

    pub fn radicand(self) -> Option<i64> {
        match self {
            FieldDescriptor::Rational => None,
            FieldDescriptor::Quadratic(d) => Some(d),
        }
    }

    pub fn is_real(self) -> bool {
        self.radicand().is_none_or(|d| d > 0)
    }

    pub fn is_imaginary(self) -> bool {
        !self.is_real()
    }

    /// True when the ring of integers needs the half-integer basis.
    pub fn has_half_basis(self) -> bool {
        self.radicand().is_some_and(|d| d.rem_euclid(4) == 1)
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "Q"),
            FieldDescriptor::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

impl Serialize for FieldDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.code())
    }
}

impl<'de> Deserialize<'de> for FieldDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let code = i64::deserialize(d)?;
        FieldDescriptor::from_code(code).map_err(serde::de::Error::custom)
    }
}

/// Exact element `a + b√d` of a [`FieldDescriptor`]. For ℚ, `b` is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    a: BigRational,
    b: BigRational,
    field: FieldDescriptor,
}

/// Binary operations accepted by [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldElement {
    pub fn new(field: FieldDescriptor, a: BigRational, b: BigRational) -> Result<Self> {
        if field == FieldDescriptor::Rational && !b.is_zero() {
            return Err(Error::precondition("rational field elements have no sqrt(d) part"));
        }
        Ok(FieldElement { a, b, field })
    }

    pub fn from_rational(field: FieldDescriptor, a: BigRational) -> Self {
        FieldElement { a, b: BigRational::zero(), field }
    }

    pub fn from_int(field: FieldDescriptor, a: i64) -> Self {
        Self::from_rational(field, rat(a))
    }

    /// `a + b√d` with integer coordinates.
    pub fn from_ints(field: FieldDescriptor, a: i64, b: i64) -> Result<Self> {
        Self::new(field, rat(a), rat(b))
    }

    pub fn zero(field: FieldDescriptor) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: FieldDescriptor) -> Self {
        Self::from_int(field, 1)
    }

    /// √d itself.
    pub fn sqrt_d(field: FieldDescriptor) -> Result<Self> {
        match field {
            FieldDescriptor::Rational => Err(Error::UnsupportedField("Q has no sqrt(d)".into())),
            FieldDescriptor::Quadratic(_) => Ok(FieldElement { a: rat(0), b: rat(1), field }),
        }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Reinterprets a rational element in another field.
    pub fn embed(&self, field: FieldDescriptor) -> Result<Self> {
        if self.field == field {
            return Ok(self.clone());
        }
        if !self.is_rational() {
            return Err(Error::FieldMismatch(self.field, field));
        }
        Ok(Self::from_rational(field, self.a.clone()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    fn d_rat(&self) -> BigRational {
        rat(self.field.radicand().unwrap_or(0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FieldElement { a: &self.a + &other.a, b: &self.b + &other.b, field: self.field })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FieldElement { a: &self.a - &other.a, b: &self.b - &other.b, field: self.field })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.d_rat();
        Ok(FieldElement {
            a: &self.a * &other.a + &self.b * &other.b * d,
            b: &self.a * &other.b + &self.b * &other.a,
            field: self.field,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let inv = other.inverse()?;
        self.try_mul(&inv)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        match self.field {
            FieldDescriptor::Rational => Ok(Self::from_rational(self.field, n.recip())),
            FieldDescriptor::Quadratic(_) => Ok(FieldElement {
                a: &self.a / &n,
                b: -&self.b / &n,
                field: self.field,
            }),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElement { a: &self.a * q, b: &self.b * q, field: self.field }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The non-trivial automorphism `a + b√d ↦ a − b√d`.
    pub fn galois_conj(&self) -> Result<Self> {
        match self.field {
            FieldDescriptor::Rational => Err(Error::UnsupportedField(
                "Q has no non-trivial embedding".into(),
            )),
            FieldDescriptor::Quadratic(_) => Ok(FieldElement {
                a: self.a.clone(),
                b: -&self.b,
                field: self.field,
            }),
        }
    }

    /// Field norm `x·σ(x)`; for ℚ the element itself.
    pub fn norm(&self) -> BigRational {
        match self.field {
            FieldDescriptor::Rational => self.a.clone(),
            FieldDescriptor::Quadratic(_) => &self.a * &self.a - &self.b * &self.b * self.d_rat(),
        }
    }

    /// Trace `x + σ(x)`; for ℚ the element itself.
    pub fn trace(&self) -> BigRational {
        match self.field {
            FieldDescriptor::Rational => self.a.clone(),
            FieldDescriptor::Quadratic(_) => &self.a + &self.a,
        }
    }

    /// Membership in the ring of integers.
    pub fn is_integral(&self) -> bool {
        if self.field.has_half_basis() {
            let two = rat(2);
            let a2 = &self.a * &two;
            let b2 = &self.b * &two;
            a2.is_integer() && b2.is_integer() && (a2.to_integer() - b2.to_integer()).is_even()
        } else {
            self.a.is_integer() && self.b.is_integer()
        }
    }

    /// Exact sign of the element under the identity real embedding.
    pub fn real_sign(&self) -> Result<Ordering> {
        let d = match self.field {
            FieldDescriptor::Rational => return Ok(self.a.cmp(&BigRational::zero())),
            FieldDescriptor::Quadratic(d) if d < 0 => {
                return Err(Error::UnsupportedField(format!(
                    "{} has no real embedding",
                    self.field
                )))
            }
            FieldDescriptor::Quadratic(d) => d,
        };
        let zero = BigRational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        if sb == Ordering::Equal {
            return Ok(sa);
        }
        if sa == Ordering::Equal || sa == sb {
            return Ok(sb);
        }
        // opposite signs: the larger of a² and b²d wins
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat(d);
        Ok(if a2 > b2d { sa } else { sb })
    }

    /// Exact comparison of two elements of a real field.
    pub fn cmp_real(&self, other: &Self) -> Result<Ordering> {
        self.try_sub(other)?.real_sign()
    }

    /// Exact absolute value under the identity embedding.
    pub fn abs_real(&self) -> Result<Self> {
        Ok(if self.real_sign()? == Ordering::Less { -self } else { self.clone() })
    }

    /// Sign of `σ(x)` for a real quadratic field.
    pub fn conj_sign(&self) -> Result<Ordering> {
        self.galois_conj()?.real_sign()
    }

    /// Value under the identity embedding (real fields only).
    pub fn to_f64(&self) -> Result<f64> {
        if self.field.is_imaginary() {
            return Err(Error::UnsupportedField(format!("{} is not real", self.field)));
        }
        let d = self.field.radicand().unwrap_or(0) as f64;
        Ok(rat_to_f64(&self.a) + rat_to_f64(&self.b) * d.sqrt())
    }

    /// Complex embedding; `√d` with `d < 0` maps to `i√|d|`.
    pub fn to_complex(&self) -> Complex64 {
        let a = rat_to_f64(&self.a);
        let b = rat_to_f64(&self.b);
        match self.field.radicand() {
            None => Complex64::new(a, 0.0),
            Some(d) if d > 0 => Complex64::new(a + b * (d as f64).sqrt(), 0.0),
            Some(d) => Complex64::new(a, b * ((-d) as f64).sqrt()),
        }
    }

    /// Parses `s`; a bare rational is placed in `default_field`.
    pub fn parse_in(s: &str, default_field: FieldDescriptor) -> Result<Self> {
        let x: FieldElement = s.parse()?;
        if x.field == FieldDescriptor::Rational {
            x.embed(default_field)
        } else {
            Ok(x)
        }
    }
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // only hit for astronomically large numerators/denominators
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Dispatches one of the four field operations.
pub fn field_arith(x: &FieldElement, y: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
        ArithOp::Div => x.try_div(y),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands live in different fields; use the
            /// `try_*` methods for fallible arithmetic.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field elements must share a field")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -&self.a, b: -&self.b, field: self.field }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            FieldDescriptor::Rational => write!(f, "{}", self.a),
            FieldDescriptor::Quadratic(d) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}*sqrt({})", self.a, -&self.b, d)
                } else {
                    write!(f, "{}+{}*sqrt({})", self.a, self.b, d)
                }
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() || body.starts_with(['+', '-']) {
        return Err(Error::Parse(format!("malformed rational '{s}'")));
    }
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Parse(format!("malformed rational '{s}'")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Parse(format!("malformed rational '{s}'")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    let q = BigRational::new(num, den);
    Ok(if neg { -q } else { q })
}

impl FromStr for FieldElement {
    type Err = Error;

    /// Accepts `"p/q"`, `"a+b*sqrt(d)"`, `"a-b*sqrt(d)"` and `"b*sqrt(d)"`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = compact.find("*sqrt(") else {
            return Ok(FieldElement::from_rational(FieldDescriptor::Rational, parse_rational(&compact)?));
        };
        let head = &compact[..pos];
        let tail = &compact[pos + "*sqrt(".len()..];
        let radicand = tail
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in '{s}'")))?;
        let d: i64 = radicand
            .parse()
            .map_err(|_| Error::Parse(format!("malformed radicand in '{s}'")))?;
        let field = FieldDescriptor::quadratic(d)?;
        let split = head
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && !head[..i].ends_with(['+', '-']))
            .map(|(i, _)| i);
        let (a, b) = match split {
            None => (BigRational::zero(), parse_rational(head)?),
            Some(i) => {
                let a = parse_rational(&head[..i])?;
                let b = parse_rational(&head[i + 1..])?;
                (a, if &head[i..=i] == "-" { -b } else { b })
            }
        };
        FieldElement::new(field, a, b)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A [`FieldElement`] verified to lie in the ring of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct IntegerRingElement(FieldElement);

impl IntegerRingElement {
    pub fn new(x: FieldElement) -> Result<Self> {
        if !x.is_integral() {
            return Err(Error::NotIntegral(x.to_string()));
        }
        Ok(IntegerRingElement(x))
    }

    pub fn from_int(field: FieldDescriptor, n: i64) -> Self {
        IntegerRingElement(FieldElement::from_int(field, n))
    }

    pub fn from_ints(field: FieldDescriptor, a: i64, b: i64) -> Result<Self> {
        Self::new(FieldElement::from_ints(field, a, b)?)
    }

    pub fn as_element(&self) -> &FieldElement {
        &self.0
    }

    pub fn into_element(self) -> FieldElement {
        self.0
    }

    pub fn field(&self) -> FieldDescriptor {
        self.0.field()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<'de> Deserialize<'de> for IntegerRingElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = FieldElement::deserialize(d)?;
        IntegerRingElement::new(x).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for IntegerRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<FieldElement> for IntegerRingElement {
    type Error = Error;
    fn try_from(x: FieldElement) -> Result<Self> {
        IntegerRingElement::new(x)
    }
}

/// Absolute norm `|N(α)|` of the principal ideal `(α)`.
pub fn ideal_norm(alpha: &IntegerRingElement) -> Result<BigUint> {
    if alpha.is_zero() {
        return Err(Error::precondition("the zero ideal has no norm"));
    }
    let n = alpha.as_element().norm();
    debug_assert!(n.is_integer());
    n.to_integer()
        .abs()
        .to_biguint()
        .ok_or_else(|| Error::invariant("norm of an integer is not an integer"))
}

/// Whether `x / α` lies in the ring of integers.
pub fn divides(alpha: &IntegerRingElement, x: &FieldElement) -> Result<bool> {
    if alpha.is_zero() {
        return Err(Error::precondition("divisibility by zero is undefined"));
    }
    let x = x.embed(alpha.field())?;
    Ok(x.try_div(alpha.as_element())?.is_integral())
}

/// `x / α`, failing unless the quotient is integral.
pub fn exact_quotient(x: &FieldElement, alpha: &IntegerRingElement) -> Result<IntegerRingElement> {
    if alpha.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let q = x.embed(alpha.field())?.try_div(alpha.as_element())?;
    IntegerRingElement::new(q)
}
