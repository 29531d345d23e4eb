//! Fixed-width rings of integers `ℤ[ω]` for the enumeration hot loops.
//!
//! `ω = √d`, or `ω = (1 + √d)/2` when `d ≡ 1 (mod 4)`. Elements are pairs
//! `x + yω` of `i64`; norms are taken in `i128`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{FieldDescriptor, FieldElement, IntegerRingElement};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadOrder {
    d: i64,
    half: bool,
    /// `ω² = ω + c` on the half basis, `ω² = c = d` otherwise.
    c: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QuadInteger {
    pub x: i64,
    pub y: i64,
}

impl QuadInteger {
    pub const ZERO: QuadInteger = QuadInteger { x: 0, y: 0 };
    pub const ONE: QuadInteger = QuadInteger { x: 1, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        QuadInteger { x, y }
    }

    pub const fn int(x: i64) -> Self {
        QuadInteger { x, y: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl std::ops::Add for QuadInteger {
    type Output = QuadInteger;
    fn add(self, o: QuadInteger) -> QuadInteger {
        QuadInteger::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for QuadInteger {
    type Output = QuadInteger;
    fn sub(self, o: QuadInteger) -> QuadInteger {
        QuadInteger::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for QuadInteger {
    type Output = QuadInteger;
    fn neg(self) -> QuadInteger {
        QuadInteger::new(-self.x, -self.y)
    }
}

impl QuadOrder {
    pub fn new(field: FieldDescriptor) -> Result<Self> {
        match field {
            FieldDescriptor::Rational => Err(Error::UnsupportedField(
                "the fixed-width order needs a quadratic field".into(),
            )),
            FieldDescriptor::Quadratic(d) => {
                let half = field.has_half_basis();
                Ok(QuadOrder { d, half, c: if half { (d - 1) / 4 } else { d } })
            }
        }
    }

    /// Ring of integers of an imaginary quadratic field.
    pub fn imaginary(field: FieldDescriptor) -> Result<Self> {
        if !field.is_imaginary() {
            return Err(Error::UnsupportedField(format!("{field} is not imaginary quadratic")));
        }
        Self::new(field)
    }

    pub fn field(&self) -> FieldDescriptor {
        FieldDescriptor::Quadratic(self.d)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn has_half_basis(&self) -> bool {
        self.half
    }

    pub fn mul(&self, p: QuadInteger, q: QuadInteger) -> QuadInteger {
        let yy = p.y * q.y;
        if self.half {
            QuadInteger::new(p.x * q.x + self.c * yy, p.x * q.y + p.y * q.x + yy)
        } else {
            QuadInteger::new(p.x * q.x + self.c * yy, p.x * q.y + p.y * q.x)
        }
    }

    /// Multiplication with overflow detection.
    pub fn checked_mul(&self, p: QuadInteger, q: QuadInteger) -> Option<QuadInteger> {
        let yy = p.y.checked_mul(q.y)?;
        let x = p.x.checked_mul(q.x)?.checked_add(self.c.checked_mul(yy)?)?;
        let mut y = p.x.checked_mul(q.y)?.checked_add(p.y.checked_mul(q.x)?)?;
        if self.half {
            y = y.checked_add(yy)?;
        }
        Some(QuadInteger::new(x, y))
    }

    pub fn conj(&self, p: QuadInteger) -> QuadInteger {
        if self.half {
            QuadInteger::new(p.x + p.y, -p.y)
        } else {
            QuadInteger::new(p.x, -p.y)
        }
    }

    pub fn norm(&self, p: QuadInteger) -> i128 {
        let (x, y, c) = (p.x as i128, p.y as i128, self.c as i128);
        if self.half {
            x * x + x * y - c * y * y
        } else {
            x * x - c * y * y
        }
    }

    /// Coordinates of `2p` in the basis `{1, √d}`.
    pub fn doubled(&self, p: QuadInteger) -> (i64, i64) {
        if self.half {
            (2 * p.x + p.y, p.y)
        } else {
            (2 * p.x, 2 * p.y)
        }
    }

    /// Largest absolute integer coordinate, with half-basis coordinates
    /// taken on `{1, √d}` after doubling.
    pub fn height(&self, p: QuadInteger) -> u64 {
        if self.half {
            let (a, b) = self.doubled(p);
            a.unsigned_abs().max(b.unsigned_abs())
        } else {
            p.x.unsigned_abs().max(p.y.unsigned_abs())
        }
    }

    /// `p / q` when the quotient is integral.
    pub fn div_exact(&self, p: QuadInteger, q: QuadInteger) -> Option<QuadInteger> {
        let n = self.norm(q);
        if n == 0 {
            return None;
        }
        let (px, py, qc) = (p.x as i128, p.y as i128, self.conj(q));
        let (cx, cy, c) = (qc.x as i128, qc.y as i128, self.c as i128);
        let x = px * cx + c * py * cy;
        let mut y = px * cy + py * cx;
        if self.half {
            y += py * cy;
        }
        if x % n != 0 || y % n != 0 {
            return None;
        }
        Some(QuadInteger::new((x / n).to_i64()?, (y / n).to_i64()?))
    }

    pub fn divides(&self, q: QuadInteger, p: QuadInteger) -> bool {
        if q.is_zero() {
            return p.is_zero();
        }
        self.div_exact(p, q).is_some()
    }

    /// Residue test `p ≡ r (mod m)`.
    pub fn congruent(&self, p: QuadInteger, r: QuadInteger, m: QuadInteger) -> bool {
        self.divides(m, p - r)
    }

    pub fn pow(&self, p: QuadInteger, e: u32) -> QuadInteger {
        (0..e).fold(QuadInteger::ONE, |acc, _| self.mul(acc, p))
    }

    pub fn is_unit(&self, p: QuadInteger) -> bool {
        self.norm(p).abs() == 1
    }

    /// The torsion units of an imaginary order, in a fixed order.
    pub fn units(&self) -> Vec<QuadInteger> {
        let mut out = vec![QuadInteger::ONE, -QuadInteger::ONE];
        match (self.d, self.half) {
            (-1, _) => out.extend([QuadInteger::new(0, 1), QuadInteger::new(0, -1)]),
            (-3, true) => {
                // ω = (1+√−3)/2 is a primitive sixth root of unity
                out.extend([
                    QuadInteger::new(0, 1),
                    QuadInteger::new(0, -1),
                    QuadInteger::new(-1, 1),
                    QuadInteger::new(1, -1),
                ])
            }
            _ => {}
        }
        out
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self, u: QuadInteger) -> Option<QuadInteger> {
        self.div_exact(QuadInteger::ONE, u)
    }

    /// Complex embedding, `√d ↦ i√|d|` for imaginary fields.
    pub fn to_complex(&self, p: QuadInteger) -> Complex64 {
        let (a, b) = self.doubled(p);
        let s = (self.d.unsigned_abs() as f64).sqrt();
        if self.d < 0 {
            Complex64::new(a as f64 / 2.0, b as f64 * s / 2.0)
        } else {
            Complex64::new((a as f64 + b as f64 * s) / 2.0, 0.0)
        }
    }

    /// Sign of the imaginary part of an element of an imaginary order.
    pub fn imag_sign(&self, p: QuadInteger) -> Ordering {
        p.y.cmp(&0)
    }

    pub fn to_field(&self, p: QuadInteger) -> FieldElement {
        let (a, b) = self.doubled(p);
        let two = BigInt::from(2);
        FieldElement::new(
            self.field(),
            BigRational::new(BigInt::from(a), two.clone()),
            BigRational::new(BigInt::from(b), two),
        )
        .expect("quadratic field accepts a sqrt(d) part")
    }

    pub fn to_ring(&self, p: QuadInteger) -> IntegerRingElement {
        IntegerRingElement::new(self.to_field(p)).expect("order elements are integral")
    }

    /// Inverse of [`QuadOrder::to_field`]; fails off the ring or outside `i64`.
    pub fn from_field(&self, x: &FieldElement) -> Result<QuadInteger> {
        let x = x.embed(self.field())?;
        if !x.is_integral() {
            return Err(Error::NotIntegral(x.to_string()));
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let a2 = (x.rational_part() * &two).to_integer();
        let b2 = (x.irrational_part() * &two).to_integer();
        let too_big = || Error::precondition(format!("{x} does not fit in 64-bit coordinates"));
        let (a2, b2) = (a2.to_i64().ok_or_else(too_big)?, b2.to_i64().ok_or_else(too_big)?);
        if self.half {
            Ok(QuadInteger::new((a2 - b2) / 2, b2))
        } else {
            Ok(QuadInteger::new(a2 / 2, b2 / 2))
        }
    }

    /// All elements of height at most `h`, ordered by `(x, y)`.
    pub fn box_elements(&self, h: u64) -> Vec<QuadInteger> {
        let h = h as i64;
        let mut out = Vec::new();
        if self.half {
            for b in -h..=h {
                for a in -h..=h {
                    if (a - b).rem_euclid(2) == 0 {
                        out.push(QuadInteger::new((a - b) / 2, b));
                    }
                }
            }
        } else {
            for x in -h..=h {
                for y in -h..=h {
                    out.push(QuadInteger::new(x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Elements of norm exactly `n` in an imaginary order.
    pub fn elements_of_norm(&self, n: u64) -> Vec<QuadInteger> {
        debug_assert!(self.d < 0);
        let k: u128 = if self.half { 4 } else { 1 };
        let target = k * n as u128;
        let dd = self.d.unsigned_abs() as u128;
        let mut out = Vec::new();
        let mut b: u128 = 0;
        while dd * b * b <= target {
            let rest = target - dd * b * b;
            let a = isqrt(rest);
            if a * a == rest {
                for sb in signs(b as i64) {
                    for sa in signs(a as i64) {
                        if !self.half {
                            out.push(QuadInteger::new(sa, sb));
                        } else if (sa - sb).rem_euclid(2) == 0 {
                            out.push(QuadInteger::new((sa - sb) / 2, sb));
                        }
                    }
                }
            }
            b += 1;
        }
        out.sort_unstable();
        out
    }

    /// All divisors of a nonzero element of an imaginary order.
    pub fn divisors(&self, m: QuadInteger) -> Vec<QuadInteger> {
        self.bounded_divisors(m, u64::MAX)
    }

    /// Divisors `q` of `m` with both `N(q)` and `N(m/q)` at most `max_norm`.
    pub fn bounded_divisors(&self, m: QuadInteger, max_norm: u64) -> Vec<QuadInteger> {
        let n = self.norm(m).unsigned_abs();
        let n = u64::try_from(n).expect("norm exceeds 64 bits");
        let mut out = Vec::new();
        for nd in integer_divisors(n) {
            if nd > max_norm || n / nd > max_norm {
                continue;
            }
            for q in self.elements_of_norm(nd) {
                if self.divides(q, m) {
                    out.push(q);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Largest norm of an element of height at most `h` in an imaginary order.
    pub fn max_norm_at_height(&self, h: u64) -> u64 {
        let dd = self.d.unsigned_abs();
        if self.half {
            (h * h * (1 + dd)) / 4
        } else {
            h * h * (1 + dd)
        }
    }

    /// Elements with complex modulus at most `r` (imaginary orders only).
    pub fn disk_elements(&self, r: f64) -> Vec<QuadInteger> {
        debug_assert!(self.d < 0);
        let k = if self.half { 4.0 } else { 1.0 };
        let target = k * r.max(0.0) * r.max(0.0);
        let dd = self.d.unsigned_abs() as f64;
        let mut out = Vec::new();
        let mut b = 0i64;
        while dd * (b * b) as f64 <= target {
            let amax = (target - dd * (b * b) as f64).sqrt().floor() as i64 + 1;
            for sb in signs(b) {
                for a in -amax..=amax {
                    if (a * a) as f64 + dd * (b * b) as f64 > target {
                        continue;
                    }
                    if !self.half {
                        out.push(QuadInteger::new(a, sb));
                    } else if (a - sb).rem_euclid(2) == 0 {
                        out.push(QuadInteger::new((a - sb) / 2, sb));
                    }
                }
            }
            b += 1;
        }
        out.sort_unstable();
        out
    }
}

fn signs(v: i64) -> Vec<i64> {
    if v == 0 {
        vec![0]
    } else {
        vec![-v, v]
    }
}

pub(crate) fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

const SMALL_PRIME_LIMIT: u64 = 1 << 16;

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = SMALL_PRIME_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                for j in (i * i..=n).step_by(i) {
                    sieve[j] = false;
                }
            }
            i += 1;
        }
        sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u64).collect()
    })
}

/// Prime factorization by trial division, as `(p, e)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |n: &mut u64, p: u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        push(&mut n, p);
    }
    // remainder past the table: keep going on odd candidates
    let mut p = SMALL_PRIME_LIMIT + 1;
    while (p as u128) * (p as u128) <= n as u128 {
        push(&mut n, p);
        p += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `n > 0`, ascending.
pub fn integer_divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

impl Zero for QuadInteger {
    fn zero() -> Self {
        QuadInteger::ZERO
    }
    fn is_zero(&self) -> bool {
        QuadInteger::is_zero(*self)
    }
}
