//! Clifford algebras `𝒞(f, k)` of diagonal forms `−a₀x₀² + a₁x₁² + … + aₙxₙ²`.
//!
//! Basis blades `e_M` are indexed by generator subsets packed into a `u16`,
//! so at most 13 generators (`n ≤ 12`). Elements are sparse maps from masks
//! to exact coefficients, with zeros pruned so that structural equality is
//! algebraic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{FieldDescriptor, FieldElement, IntegerRingElement};

pub type Mask = u16;

pub const MAX_N: usize = 12;

/// `−a₀x₀² + a₁x₁² + … + aₙxₙ²` over ℚ or a quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagonalForm {
    field: FieldDescriptor,
    coefficients: Vec<IntegerRingElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible,
    NotAdmissible(String),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

impl DiagonalForm {
    /// Coefficients `[a₀, a₁, …, aₙ]`; the sign of `a₀` is applied by the form.
    pub fn new(field: FieldDescriptor, coefficients: Vec<IntegerRingElement>) -> Result<Self> {
        if coefficients.len() < 2 || coefficients.len() > MAX_N + 1 {
            return Err(Error::precondition(format!(
                "a diagonal form needs between 2 and {} coefficients, got {}",
                MAX_N + 1,
                coefficients.len()
            )));
        }
        for a in &coefficients {
            if a.field() != field {
                return Err(Error::FieldMismatch(a.field(), field));
            }
            if a.is_zero() {
                return Err(Error::precondition("diagonal coefficients must be nonzero"));
            }
        }
        Ok(DiagonalForm { field, coefficients })
    }

    /// Convenience constructor from rational-integer coefficients.
    pub fn from_ints(field: FieldDescriptor, coefficients: &[i64]) -> Result<Self> {
        let cs = coefficients.iter().map(|&a| IntegerRingElement::from_int(field, a)).collect();
        Self::new(field, cs)
    }

    /// `−x₀² + x₁² + … + xₙ²` over `field`.
    pub fn standard(field: FieldDescriptor, n: usize) -> Result<Self> {
        Self::from_ints(field, &vec![1; n + 1])
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    /// `n`, so that the generators are `e₀, …, eₙ`.
    pub fn n(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn generators(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[IntegerRingElement] {
        &self.coefficients
    }

    pub fn full_mask(&self) -> Mask {
        ((1u32 << self.generators()) - 1) as Mask
    }

    /// `f(e_v)`: `−a₀` for `v = 0`, `a_v` otherwise.
    pub fn value_on_generator(&self, v: usize) -> FieldElement {
        let a = self.coefficients[v].as_element().clone();
        if v == 0 {
            -a
        } else {
            a
        }
    }

    /// Whether `other` is the restriction of `self` to its first generators.
    pub fn restricts_to(&self, other: &DiagonalForm) -> bool {
        self.field == other.field
            && other.coefficients.len() <= self.coefficients.len()
            && self.coefficients[..other.coefficients.len()] == other.coefficients[..]
    }
}

/// Signature `(n, 1)` at the identity embedding and, over a real quadratic
/// field, `σ(a₀) < 0 < σ(a_i)` for `i ≥ 1`.
pub fn admissible_check(f: &DiagonalForm) -> Result<Admissibility> {
    if f.field.is_imaginary() {
        return Err(Error::UnsupportedField(format!("{} is not totally real", f.field)));
    }
    use std::cmp::Ordering::Greater;
    for (i, a) in f.coefficients.iter().enumerate() {
        if a.as_element().real_sign()? != Greater {
            return Ok(Admissibility::NotAdmissible(format!("a{i} = {a} is not positive")));
        }
    }
    if f.field.degree() == 2 {
        for (i, a) in f.coefficients.iter().enumerate() {
            let s = a.as_element().conj_sign()?;
            let ok = if i == 0 { s == std::cmp::Ordering::Less } else { s == Greater };
            if !ok {
                let want = if i == 0 { "negative" } else { "positive" };
                return Ok(Admissibility::NotAdmissible(format!(
                    "sigma(a{i}) = {} is not {want}",
                    a.as_element().galois_conj()?
                )));
            }
        }
    }
    Ok(Admissibility::Admissible)
}

/// Sign of reordering `e_M e_N` into sorted generator order, before squares
/// are contracted.
fn reorder_sign(m: Mask, n: Mask) -> bool {
    let mut swaps = 0u32;
    let mut rest = n;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (m >> (j + 1)).count_ones();
    }
    swaps % 2 == 1
}

/// `e_M · e_N = coeff · e_{M Δ N}`.
pub fn basis_mul(m: Mask, n: Mask, f: &DiagonalForm) -> Result<(FieldElement, Mask)> {
    let full = f.full_mask();
    if m & !full != 0 || n & !full != 0 {
        return Err(Error::precondition(format!(
            "masks {m:#b}, {n:#b} exceed the {} generators of the form",
            f.generators()
        )));
    }
    Ok(basis_mul_unchecked(m, n, f))
}

fn basis_mul_unchecked(m: Mask, n: Mask, f: &DiagonalForm) -> (FieldElement, Mask) {
    let mut coeff = FieldElement::one(f.field);
    let mut common = m & n;
    while common != 0 {
        let v = common.trailing_zeros() as usize;
        common &= common - 1;
        coeff = &coeff * &f.value_on_generator(v);
    }
    if reorder_sign(m, n) {
        coeff = -coeff;
    }
    (coeff, m ^ n)
}

/// Sparse element `Σ s_M e_M` of `𝒞(f, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordElement {
    form: Arc<DiagonalForm>,
    terms: BTreeMap<Mask, FieldElement>,
}

impl CliffordElement {
    pub fn zero(form: Arc<DiagonalForm>) -> Self {
        CliffordElement { form, terms: BTreeMap::new() }
    }

    pub fn scalar(form: Arc<DiagonalForm>, c: FieldElement) -> Result<Self> {
        Self::from_terms(form, [(0, c)])
    }

    pub fn one(form: Arc<DiagonalForm>) -> Self {
        let f = form.field;
        Self::scalar(form, FieldElement::one(f)).expect("1 lives in the form's field")
    }

    /// The generator `e_i`.
    pub fn generator(form: Arc<DiagonalForm>, i: usize) -> Result<Self> {
        if i >= form.generators() {
            return Err(Error::precondition(format!("generator e{i} does not exist")));
        }
        let f = form.field;
        Self::from_terms(form, [(1 << i, FieldElement::one(f))])
    }

    /// Builds an element from `(mask, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(form: Arc<DiagonalForm>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Mask, FieldElement)>,
    {
        let full = form.full_mask();
        let mut out = CliffordElement::zero(form);
        for (m, c) in terms {
            if m & !full != 0 {
                return Err(Error::precondition(format!("mask {m} exceeds the form dimension")));
            }
            let c = c.embed(out.form.field)?;
            out.add_term(m, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Mask, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn form(&self) -> &Arc<DiagonalForm> {
        &self.form
    }

    pub fn terms(&self) -> &BTreeMap<Mask, FieldElement> {
        &self.terms
    }

    pub fn coefficient(&self, m: Mask) -> FieldElement {
        self.terms.get(&m).cloned().unwrap_or_else(|| FieldElement::zero(self.form.field))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    /// Membership in the order spanned by the blades over `𝒪_k`.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(FieldElement::is_integral)
    }

    fn same_form(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.form, &other.form) || self.form == other.form {
            Ok(())
        } else {
            Err(Error::precondition("Clifford elements belong to different forms"))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_form(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-FieldElement::one(self.form.field))
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = CliffordElement::zero(self.form.clone());
        for (&m, x) in &self.terms {
            out.add_term(m, x * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = CliffordElement::one(self.form.clone());
        for _ in 0..e {
            acc = cliff_mul(&acc, self).expect("same form");
        }
        acc
    }
}

/// Bilinear extension of [`basis_mul`].
pub fn cliff_mul(x: &CliffordElement, y: &CliffordElement) -> Result<CliffordElement> {
    x.same_form(y)?;
    let mut out = CliffordElement::zero(x.form.clone());
    for (&m, a) in &x.terms {
        for (&n, b) in &y.terms {
            let (c, mask) = basis_mul_unchecked(m, n, &x.form);
            out.add_term(mask, &(a * b) * &c);
        }
    }
    Ok(out)
}

fn star_sign_negative(m: Mask) -> bool {
    let nu = m.count_ones();
    (nu * nu.saturating_sub(1) / 2) % 2 == 1
}

/// The anti-involution `e_M* = (−1)^{ν(ν−1)/2} e_M`.
pub fn star(x: &CliffordElement) -> CliffordElement {
    let terms = x
        .terms
        .iter()
        .map(|(&m, c)| (m, if star_sign_negative(m) { -c } else { c.clone() }))
        .collect();
    CliffordElement { form: x.form.clone(), terms }
}

/// Coefficient of the empty blade.
pub fn real_part(x: &CliffordElement) -> FieldElement {
    x.coefficient(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum SpinCheck {
    Spin,
    NotSpin(String),
}

impl SpinCheck {
    pub fn is_spin(&self) -> bool {
        matches!(self, SpinCheck::Spin)
    }
}

/// Even support, `x x* = 1`, and `x e_i x*` supported on single generators.
pub fn is_spin(x: &CliffordElement) -> SpinCheck {
    if let Some(m) = x.terms.keys().find(|m| m.count_ones() % 2 == 1) {
        return SpinCheck::NotSpin(format!("odd blade with mask {m} in support"));
    }
    let xs = star(x);
    let norm = cliff_mul(x, &xs).expect("same form");
    if norm != CliffordElement::one(x.form.clone()) {
        return SpinCheck::NotSpin("x x* is not 1".into());
    }
    for i in 0..x.form.generators() {
        let e = CliffordElement::generator(x.form.clone(), i).expect("generator in range");
        let conj = cliff_mul(&cliff_mul(x, &e).expect("same form"), &xs).expect("same form");
        if let Some(m) = conj.terms.keys().find(|m| m.count_ones() != 1) {
            return SpinCheck::NotSpin(format!("x e{i} x* has a component on mask {m}"));
        }
    }
    SpinCheck::Spin
}

/// A [`CliffordElement`] that passed [`is_spin`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinElement {
    element: CliffordElement,
}

impl SpinElement {
    pub fn new(element: CliffordElement) -> Result<Self> {
        match is_spin(&element) {
            SpinCheck::Spin => Ok(SpinElement { element }),
            SpinCheck::NotSpin(why) => Err(Error::precondition(format!("not a spin element: {why}"))),
        }
    }

    pub fn element(&self) -> &CliffordElement {
        &self.element
    }

    pub fn into_element(self) -> CliffordElement {
        self.element
    }

    pub fn form(&self) -> &Arc<DiagonalForm> {
        self.element.form()
    }

    pub fn real_part(&self) -> FieldElement {
        real_part(&self.element)
    }

    /// Spin elements are closed under products.
    pub fn mul(&self, other: &SpinElement) -> Result<SpinElement> {
        Ok(SpinElement { element: cliff_mul(&self.element, &other.element)? })
    }

    /// `s*`, which is `s⁻¹` for spin elements.
    pub fn inverse(&self) -> SpinElement {
        SpinElement { element: star(&self.element) }
    }

    pub fn pow(&self, e: u32) -> SpinElement {
        SpinElement { element: self.element.pow(e) }
    }
}

/// Reinterprets `x` over a form that extends the form of `x`.
pub fn embed_even_subalgebra(x: &CliffordElement, f: Arc<DiagonalForm>) -> Result<CliffordElement> {
    if !f.restricts_to(&x.form) {
        return Err(Error::precondition(
            "the target form does not extend the source form on shared generators",
        ));
    }
    Ok(CliffordElement { form: f, terms: x.terms.clone() })
}

pub fn embed_spin(s: &SpinElement, f: Arc<DiagonalForm>) -> Result<SpinElement> {
    SpinElement::new(embed_even_subalgebra(s.element(), f)?)
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *m != 0 {
                write!(f, "*e")?;
                for v in 0..16 {
                    if m & (1 << v) != 0 {
                        write!(f, "{v}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    field: FieldDescriptor,
    coefficients: Vec<IntegerRingElement>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    form: FormRepr,
    terms: BTreeMap<Mask, FieldElement>,
}

impl Serialize for DiagonalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr { field: self.field, coefficients: self.coefficients.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiagonalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormRepr::deserialize(d)?;
        let cs = r
            .coefficients
            .into_iter()
            .map(|c| IntegerRingElement::new(c.into_element().embed(r.field)?))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        DiagonalForm::new(r.field, cs).map_err(serde::de::Error::custom)
    }
}

impl Serialize for CliffordElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            form: FormRepr { field: self.form.field, coefficients: self.form.coefficients.clone() },
            terms: self.terms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CliffordElement {
    /// `{"form": {"field": d, "coefficients": [...]}, "terms": {"<mask>": "<coeff>"}}`
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            form: DiagonalForm,
            terms: BTreeMap<Mask, FieldElement>,
        }
        let raw = Raw::deserialize(d)?;
        CliffordElement::from_terms(Arc::new(raw.form), raw.terms).map_err(serde::de::Error::custom)
    }
}
