//! Bounded-height enumeration of `SL(2, 𝒪_k)`.
//!
//! Three routes: a box sweep over `(a, b, c)` solving for `d`, a sweep over
//! a fixed trace using divisors of `bc = a(T − a) − 1`, and a ball in the
//! principal congruence subgroup `Γ(t)` parametrised by `γ = 1 + tX`.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::normalize_quad;
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::quadfield::{FieldDescriptor, FieldElement, IntegerRingElement, QuadInteger, QuadOrder};

/// Primitive integer representative of a boundary axis, see
/// [`MoebiusElement::axis_key`].
pub type AxisKey = [i64; 6];

/// `[[a, b], [c, d]]` with `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MoebiusElement {
    order: QuadOrder,
    m: [QuadInteger; 4],
}

impl MoebiusElement {
    pub fn new(order: QuadOrder, m: [QuadInteger; 4]) -> Result<Self> {
        let [a, b, c, d] = m;
        let det = order.mul(a, d) - order.mul(b, c);
        if det != QuadInteger::ONE {
            return Err(Error::precondition(format!("determinant is {det:?}, not 1")));
        }
        Ok(MoebiusElement { order, m })
    }

    fn raw(order: QuadOrder, m: [QuadInteger; 4]) -> Self {
        debug_assert!(order.mul(m[0], m[3]) - order.mul(m[1], m[2]) == QuadInteger::ONE);
        MoebiusElement { order, m }
    }

    pub fn from_ring(entries: [&IntegerRingElement; 4]) -> Result<Self> {
        let field = entries[0].field();
        let order = QuadOrder::imaginary(field)?;
        let mut m = [QuadInteger::ZERO; 4];
        for (slot, e) in m.iter_mut().zip(entries) {
            *slot = order.from_field(e.as_element())?;
        }
        Self::new(order, m)
    }

    pub fn identity(order: QuadOrder) -> Self {
        MoebiusElement { order, m: [QuadInteger::ONE, QuadInteger::ZERO, QuadInteger::ZERO, QuadInteger::ONE] }
    }

    pub fn order(&self) -> QuadOrder {
        self.order
    }

    pub fn field(&self) -> FieldDescriptor {
        self.order.field()
    }

    pub fn entries(&self) -> [QuadInteger; 4] {
        self.m
    }

    pub fn ring_entries(&self) -> [IntegerRingElement; 4] {
        self.m.map(|e| self.order.to_ring(e))
    }

    pub fn trace(&self) -> QuadInteger {
        self.m[0] + self.m[3]
    }

    pub fn trace_element(&self) -> FieldElement {
        self.order.to_field(self.trace())
    }

    /// Normalised trace and the sign applied.
    pub fn normalized_trace(&self) -> (QuadInteger, i8) {
        normalize_quad(self.trace())
    }

    pub fn height(&self) -> u64 {
        self.m.iter().map(|&e| self.order.height(e)).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &MoebiusElement) -> MoebiusElement {
        let o = &self.order;
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        MoebiusElement::raw(
            self.order,
            [
                o.mul(a, e) + o.mul(b, g),
                o.mul(a, f) + o.mul(b, h),
                o.mul(c, e) + o.mul(d, g),
                o.mul(c, f) + o.mul(d, h),
            ],
        )
    }

    pub fn inverse(&self) -> MoebiusElement {
        let [a, b, c, d] = self.m;
        MoebiusElement::raw(self.order, [d, -b, -c, a])
    }

    pub fn neg(&self) -> MoebiusElement {
        MoebiusElement::raw(self.order, self.m.map(|e| -e))
    }

    pub fn pow(&self, k: u32) -> MoebiusElement {
        (0..k).fold(MoebiusElement::identity(self.order), |acc, _| acc.mul(self))
    }

    /// `Some(s)` when `γ ≡ s·1 (mod i)` for `s = ±1`; `+1` wins when both hold.
    pub fn congruence_sign(&self, i: QuadInteger) -> Option<i8> {
        let o = &self.order;
        let [a, b, c, d] = self.m;
        if !o.divides(i, b) || !o.divides(i, c) {
            return None;
        }
        for s in [1i8, -1] {
            let one = QuadInteger::int(s as i64);
            if o.congruent(a, one, i) && o.congruent(d, one, i) {
                return Some(s);
            }
        }
        None
    }

    /// Sign `±1` that makes the first nonzero entry positive in `(x, y)` order.
    pub fn psl_sign(&self) -> i8 {
        let first = self.m.iter().find(|e| !e.is_zero()).copied().unwrap_or(QuadInteger::ONE);
        if first > QuadInteger::ZERO {
            1
        } else {
            -1
        }
    }

    /// Representative of `±γ` with [`MoebiusElement::psl_sign`] equal to `+1`.
    pub fn psl_canonical(&self) -> MoebiusElement {
        if self.psl_sign() == 1 {
            *self
        } else {
            self.neg()
        }
    }

    /// The fixed points of `γ` are the roots of `cz² + (d − a)z − b`; the
    /// coefficient vector up to `k^×` scaling identifies the unordered pair.
    /// It is scaled by the conjugate of its first nonzero entry, which makes
    /// that entry a positive integer, then divided by the content.
    pub fn axis_key(&self) -> Option<AxisKey> {
        let o = &self.order;
        let [a, b, c, d] = self.m;
        let v = [c, d - a, -b];
        let f = *v.iter().find(|e| !e.is_zero())?;
        let fc = o.conj(f);
        let w = v.map(|e| o.mul(e, fc));
        let mut key = [w[0].x, w[0].y, w[1].x, w[1].y, w[2].x, w[2].y];
        let g = key.iter().fold(0i64, |g, &k| gcd(g, k.abs()));
        for k in key.iter_mut() {
            *k /= g;
        }
        Some(key)
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Serialize, Deserialize)]
struct MoebiusRepr {
    field: FieldDescriptor,
    a: IntegerRingElement,
    b: IntegerRingElement,
    c: IntegerRingElement,
    d: IntegerRingElement,
}

impl Serialize for MoebiusElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [a, b, c, d] = self.ring_entries();
        MoebiusRepr { field: self.field(), a, b, c, d }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusElement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = MoebiusRepr::deserialize(de)?;
        let order = QuadOrder::imaginary(r.field).map_err(serde::de::Error::custom)?;
        let mut m = [QuadInteger::ZERO; 4];
        for (slot, e) in m.iter_mut().zip([&r.a, &r.b, &r.c, &r.d]) {
            *slot = order.from_field(&e.as_element().embed(r.field).map_err(serde::de::Error::custom)?)
                .map_err(serde::de::Error::custom)?;
        }
        MoebiusElement::new(order, m).map_err(serde::de::Error::custom)
    }
}

fn level_in(order: &QuadOrder, level: Option<&IntegerRingElement>) -> Result<Option<QuadInteger>> {
    match level {
        None => Ok(None),
        Some(l) => {
            let q = order.from_field(l.as_element())?;
            if q.is_zero() {
                return Err(Error::precondition("the level must be nonzero"));
            }
            Ok(Some(q))
        }
    }
}

/// Every `γ ∈ SL(2, 𝒪_k)` of height at most `h`, optionally only those
/// `≡ ±1` modulo `level`. Ordered by `(a, b, c)` with `a, b, c` in
/// [`QuadOrder::box_elements`] order and, on `a = 0`, by `d`.
pub fn enumerate_sl2(
    field: FieldDescriptor,
    h: u64,
    level: Option<&IntegerRingElement>,
    exec: &ExecPolicy,
) -> Result<Vec<MoebiusElement>> {
    if !field.is_imaginary() {
        return Err(Error::UnsupportedField(format!("{field} is not imaginary quadratic")));
    }
    if h == 0 {
        return Err(Error::precondition("height must be at least 1"));
    }
    let order = QuadOrder::imaginary(field)?;
    let level = level_in(&order, level)?;
    Ok(enumerate_sl2_order(&order, h, level, exec))
}

pub fn enumerate_sl2_order(order: &QuadOrder, h: u64, level: Option<QuadInteger>, exec: &ExecPolicy) -> Vec<MoebiusElement> {
    let all = order.box_elements(h);
    let (a_list, bc_list) = match level {
        None => (all.clone(), all.clone()),
        Some(l) => {
            let pm = |e: QuadInteger| order.congruent(e, QuadInteger::ONE, l) || order.congruent(e, -QuadInteger::ONE, l);
            (
                all.iter().copied().filter(|&e| pm(e)).collect(),
                all.iter().copied().filter(|&e| order.divides(l, e)).collect::<Vec<_>>(),
            )
        }
    };
    let chunks = exec.map(&a_list, |&a| {
        let mut out = Vec::new();
        for &b in &bc_list {
            for &c in &bc_list {
                let bc = order.mul(b, c);
                if a.is_zero() {
                    if bc != -QuadInteger::ONE {
                        continue;
                    }
                    for &d in &all {
                        push_checked(order, [a, b, c, d], level, &mut out);
                    }
                } else if let Some(d) = order.div_exact(QuadInteger::ONE + bc, a) {
                    if order.height(d) <= h {
                        push_checked(order, [a, b, c, d], level, &mut out);
                    }
                }
            }
        }
        out
    });
    chunks.into_iter().flatten().collect()
}

fn push_checked(order: &QuadOrder, m: [QuadInteger; 4], level: Option<QuadInteger>, out: &mut Vec<MoebiusElement>) {
    let g = MoebiusElement::raw(*order, m);
    if level.is_none_or(|l| g.congruence_sign(l).is_some()) {
        out.push(g);
    }
}

/// Every `γ` of height at most `h` with `tr γ = t` exactly, ordered by
/// `(a, b, c)`. Off-diagonal entries come from divisors of `a(t − a) − 1`.
pub fn enumerate_by_trace(order: &QuadOrder, t: QuadInteger, h: u64) -> Vec<MoebiusElement> {
    let all = order.box_elements(h);
    let max_norm = order.max_norm_at_height(h);
    let mut out = Vec::new();
    for &a in &all {
        let d = t - a;
        if order.height(d) > h {
            continue;
        }
        let m = order.mul(a, d) - QuadInteger::ONE;
        if m.is_zero() {
            for &c in &all {
                out.push(MoebiusElement::raw(*order, [a, QuadInteger::ZERO, c, d]));
            }
            for &b in all.iter().filter(|b| !b.is_zero()) {
                out.push(MoebiusElement::raw(*order, [a, b, QuadInteger::ZERO, d]));
            }
        } else {
            for b in order.bounded_divisors(m, max_norm) {
                if order.height(b) > h {
                    continue;
                }
                let c = order.div_exact(m, b).expect("divisor");
                if order.height(c) <= h {
                    out.push(MoebiusElement::raw(*order, [a, b, c, d]));
                }
            }
        }
    }
    out.sort_by_key(|g| g.m);
    out
}

/// Elements `γ = 1 + tX` of `Γ(t)` with height at most `h`, one per `±γ`
/// when `−1 ∈ Γ(t)`, sorted by entries.
///
/// Writing `X = [[x, y], [z, w]]`, `det γ = 1` says `x + w = −tκ` with
/// `κ = xw − yz`, so `tr γ = 2 − t²κ` and `γ` is loxodromic iff `κ ≠ 0`
/// (for `N(t) > 4`). `|1 + tx| ≤ √2·h` bounds `|x|, |w|` by
/// `R = (√2·h + 1)/|t|` and `|κ|` by `2R/|t|`.
pub fn congruence_ball(order: &QuadOrder, t: QuadInteger, h: u64, exec: &ExecPolicy) -> Result<Vec<MoebiusElement>> {
    if t.is_zero() {
        return Err(Error::precondition("the level must be nonzero"));
    }
    let tabs = order.to_complex(t).norm();
    let max_entry = {
        let n = order.max_norm_at_height(h) as f64;
        n.sqrt()
    };
    let r = (max_entry + 1.0) / tabs;
    let kappas = order.disk_elements(2.0 * r / tabs + 1e-9);
    let xs = order.disk_elements(r + 1e-9);
    let nt = order.norm(t) as u64;
    let max_norm = order.max_norm_at_height(h) / nt.max(1);
    let t_list: Vec<QuadInteger> = order
        .disk_elements(max_entry / tabs + 1e-9)
        .into_iter()
        .filter(|&z| order.height(order.mul(t, z)) <= h)
        .collect();
    let entry = |x: QuadInteger| order.mul(t, x);
    let one = QuadInteger::ONE;
    let chunks = exec.map(&kappas, |&kappa| {
        let mut out = Vec::new();
        let tk = order.mul(t, kappa);
        for &x in &xs {
            let w = -tk - x;
            let (a, d) = (one + entry(x), one + entry(w));
            if order.height(a) > h || order.height(d) > h {
                continue;
            }
            let p = order.mul(x, w) - kappa;
            let mut push = |y: QuadInteger, z: QuadInteger| {
                let (b, c) = (entry(y), entry(z));
                if order.height(b) <= h && order.height(c) <= h {
                    out.push(MoebiusElement::raw(*order, [a, b, c, d]));
                }
            };
            if p.is_zero() {
                for &z in &t_list {
                    push(QuadInteger::ZERO, z);
                }
                for &y in t_list.iter().filter(|y| !y.is_zero()) {
                    push(y, QuadInteger::ZERO);
                }
            } else {
                for y in order.bounded_divisors(p, max_norm) {
                    let z = order.div_exact(p, y).expect("divisor");
                    push(y, z);
                }
            }
        }
        out
    });
    let mut all: Vec<MoebiusElement> = chunks.into_iter().flatten().collect();
    if order.divides(t, QuadInteger::int(2)) {
        let set: BTreeSet<[QuadInteger; 4]> = all.iter().map(|g| g.psl_canonical().m).collect();
        all = set.into_iter().map(|m| MoebiusElement::raw(*order, m)).collect();
    } else {
        all.sort_by_key(|g| g.m);
    }
    Ok(all)
}
