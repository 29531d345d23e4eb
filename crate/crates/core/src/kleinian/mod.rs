//! Elements of `PSL(2, 𝒪_k)` for imaginary quadratic `k`: trace
//! normalisation, classification, length and holonomy, and the certificate
//! that `γ²` realises the systole of `Γ(tr γ)\ℍ³`.

pub mod enumerate;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{FieldDescriptor, FieldElement, IntegerRingElement, QuadInteger, QuadOrder};

pub use enumerate::{congruence_ball, enumerate_by_trace, enumerate_sl2, AxisKey, MoebiusElement};

/// Trace multiplied by the sign `μ = ±1` that puts its argument in `[0, π)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedTrace {
    value: FieldElement,
    sign: i8,
}

impl NormalizedTrace {
    /// Accepts traces in ℚ or an imaginary quadratic field.
    pub fn new(t: FieldElement) -> Result<Self> {
        if t.field().is_real() && t.field() != FieldDescriptor::Rational {
            return Err(Error::UnsupportedField(format!(
                "traces live in Q or an imaginary quadratic field, not {}",
                t.field()
            )));
        }
        // Im(√d) > 0 for d < 0, so the imaginary part has the sign of b
        let b = t.irrational_part();
        let flip = b.is_negative() || (b.is_zero_ref() && t.rational_part().is_negative());
        Ok(if flip {
            NormalizedTrace { value: -t, sign: -1 }
        } else {
            NormalizedTrace { value: t, sign: 1 }
        })
    }

    pub fn from_order(order: &QuadOrder, t: QuadInteger) -> Self {
        Self::new(order.to_field(t)).expect("imaginary order")
    }

    pub fn value(&self) -> &FieldElement {
        &self.value
    }

    /// The sign that was applied to the raw trace.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn field(&self) -> FieldDescriptor {
        self.value.field()
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex()
    }

    pub fn is_real(&self) -> bool {
        self.value.is_rational()
    }
}

trait ZeroRef {
    fn is_zero_ref(&self) -> bool;
}

impl ZeroRef for num_rational::BigRational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Normalises an element of a fixed-width order; returns the sign applied.
pub fn normalize_quad(t: QuadInteger) -> (QuadInteger, i8) {
    if t.y < 0 || (t.y == 0 && t.x < 0) {
        (-t, -1)
    } else {
        (t, 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementType {
    Elliptic,
    ParabolicOrIdentity,
    Loxodromic,
}

/// Real traces of modulus below 2 are elliptic, `±2` parabolic or the
/// identity, everything else loxodromic.
pub fn classify(t: &NormalizedTrace) -> ElementType {
    classify_field(&t.value)
}

fn classify_field(t: &FieldElement) -> ElementType {
    if !t.is_rational() {
        return ElementType::Loxodromic;
    }
    let a = t.rational_part().abs();
    let two = num_rational::BigRational::from_integer(2.into());
    match a.cmp(&two) {
        std::cmp::Ordering::Less => ElementType::Elliptic,
        std::cmp::Ordering::Equal => ElementType::ParabolicOrIdentity,
        std::cmp::Ordering::Greater => ElementType::Loxodromic,
    }
}

/// Same classification for an element of a fixed-width imaginary order.
pub fn classify_quad(t: QuadInteger) -> ElementType {
    if t.y != 0 {
        ElementType::Loxodromic
    } else if t.x.abs() < 2 {
        ElementType::Elliptic
    } else if t.x.abs() == 2 {
        ElementType::ParabolicOrIdentity
    } else {
        ElementType::Loxodromic
    }
}

/// Root of `λ² − tλ + 1` of larger modulus, computed without cancellation.
/// On the unit circle the root with nonnegative imaginary part is returned.
pub fn eigenvalue_of(t: Complex64) -> Complex64 {
    let s = (t * t - 4.0).sqrt();
    let s = if (t.conj() * s).re < 0.0 { -s } else { s };
    let lam = (t + s) / 2.0;
    if (lam.norm() - 1.0).abs() < 1e-12 && lam.im < 0.0 {
        // elliptic: the two roots are conjugate, keep the upper one
        (t - s) / 2.0
    } else {
        lam
    }
}

/// `λ` with `|λ| ≥ 1` and `λ + λ⁻¹ = t`.
pub fn eigenvalue_large(t: &NormalizedTrace) -> Result<Complex64> {
    if classify(t) == ElementType::ParabolicOrIdentity {
        return Err(Error::precondition("parabolic trace ±2 has a repeated eigenvalue"));
    }
    Ok(eigenvalue_of(t.to_complex()))
}

/// Length, holonomy and eigenvalue of a loxodromic element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicInvariant {
    pub length: f64,
    /// `2 Arg λ`, in `(−2π, 2π)`.
    pub holonomy: f64,
    /// `holonomy` reduced to `[0, 2π)`.
    pub holonomy_reduced: f64,
    pub eigenvalue_re: f64,
    pub eigenvalue_im: f64,
    pub kind: ElementType,
}

pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Invariants straight from a complex trace; callers ensure it is loxodromic.
pub fn invariants_of(t: Complex64) -> GeodesicInvariant {
    let lam = eigenvalue_of(t);
    let theta = 2.0 * lam.arg();
    GeodesicInvariant {
        length: 2.0 * lam.norm().ln(),
        holonomy: theta,
        holonomy_reduced: reduce_angle(theta),
        eigenvalue_re: lam.re,
        eigenvalue_im: lam.im,
        kind: ElementType::Loxodromic,
    }
}

/// `ℓ = 2 log|λ|` and `θ = 2 Arg λ`.
pub fn length_holonomy(t: &NormalizedTrace) -> Result<GeodesicInvariant> {
    let kind = classify(t);
    if kind != ElementType::Loxodromic {
        return Err(Error::precondition(format!("trace {} is not loxodromic ({kind:?})", t.value)));
    }
    Ok(invariants_of(t.to_complex()))
}

/// `(4 cosh(ℓ/2), |t − 2| + |t + 2|)`.
pub fn trace_identity_sides(t: Complex64, length: f64) -> (f64, f64) {
    (4.0 * (length / 2.0).cosh(), (t - 2.0).norm() + (t + 2.0).norm())
}

/// Both sides of `tan Arg T(z) = (|z| − |z|⁻¹)/(|z| + |z|⁻¹) · tan Arg z`,
/// `T(z) = z + z⁻¹`.
pub fn arg_tan_relation(z: Complex64) -> Result<(f64, f64)> {
    let r = z.norm();
    if r <= 1.0 {
        return Err(Error::precondition("|z| must exceed 1"));
    }
    let phi = z.arg();
    if (phi.abs() - PI / 2.0).abs() < 1e-12 {
        return Err(Error::precondition("Arg z = ±π/2 has no tangent"));
    }
    let tz = z + z.inv();
    if tz.im == 0.0 && tz.re <= 0.0 {
        return Err(Error::precondition("T(z) lies on the branch cut (−∞, 0]"));
    }
    let lhs = tz.arg().tan();
    let rhs = (r - 1.0 / r) / (r + 1.0 / r) * phi.tan();
    Ok((lhs, rhs))
}

/// Trace residue `(tr γ − 2)/I²` of `γ ≡ ±1 (mod I)`, with the sign used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceResidue {
    pub sign: i8,
    pub trace: IntegerRingElement,
    pub residue: IntegerRingElement,
}

/// For `γ ≡ ±1 (mod I)`, certifies `±tr γ ≡ 2 (mod I²)`.
pub fn trace_mod_level(g: &MoebiusElement, level: &IntegerRingElement) -> Result<TraceResidue> {
    let o = g.order();
    let i = o.from_field(level.as_element())?;
    if i.is_zero() {
        return Err(Error::precondition("the level must be nonzero"));
    }
    let (sign, residue) = trace_residue_quad(g, i)?;
    let tr = if sign == 1 { g.trace() } else { -g.trace() };
    Ok(TraceResidue { sign, trace: o.to_ring(tr), residue: o.to_ring(residue) })
}

/// Fixed-width core of [`trace_mod_level`].
pub fn trace_residue_quad(g: &MoebiusElement, i: QuadInteger) -> Result<(i8, QuadInteger)> {
    let sign = g
        .congruence_sign(i)
        .ok_or_else(|| Error::precondition("the element is not congruent to ±1 modulo the level"))?;
    let o = g.order();
    let tr = if sign == 1 { g.trace() } else { -g.trace() };
    let i2 = o.mul(i, i);
    let r = o
        .div_exact(tr - QuadInteger::int(2), i2)
        .ok_or_else(|| Error::invariant(format!("trace {tr:?} is not 2 modulo the squared level")))?;
    Ok((sign, r))
}

/// `|Pe^{iφ} + 2 + 4ζ|² − |Pe^{iφ} − 2|²` and its closed form
/// `16(1 + Re ζ) + 8P cos φ [1 + Re ζ + Im ζ tan φ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HValue {
    pub definition: f64,
    pub closed_form: f64,
}

pub fn h_function_sides(p: f64, zeta: Complex64, phi: f64) -> Result<HValue> {
    if p <= 1.0 {
        return Err(Error::precondition("P must exceed 1"));
    }
    if phi.abs() >= PI / 2.0 {
        return Err(Error::precondition("phi must lie in (-π/2, π/2)"));
    }
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::precondition("the closed form needs |zeta| = 1"));
    }
    let w = Complex64::from_polar(p, phi);
    let definition = (w + 2.0 + zeta * 4.0).norm_sqr() - (w - 2.0).norm_sqr();
    let closed_form = 16.0 * (1.0 + zeta.re) + 8.0 * p * phi.cos() * (1.0 + zeta.re + zeta.im * phi.tan());
    Ok(HValue { definition, closed_form })
}

/// Closed-form value of `h_{P,ζ}(φ)` after checking it against the definition.
pub fn h_function(p: f64, zeta: Complex64, phi: f64) -> Result<f64> {
    let h = h_function_sides(p, zeta, phi)?;
    let tol = 1e-12 * (p + 6.0) * (p + 6.0);
    if (h.definition - h.closed_form).abs() > tol {
        return Err(Error::invariant(format!(
            "h-function forms disagree: {} vs {}",
            h.definition, h.closed_form
        )));
    }
    Ok(h.closed_form)
}

/// `ε = ½ arctan ½`.
pub fn holonomy_epsilon() -> f64 {
    0.5 * 0.5f64.atan()
}

/// `0 ≤ θ < ε`.
pub fn holonomy_gate(theta: f64) -> bool {
    (0.0..holonomy_epsilon()).contains(&theta)
}

/// `N₀ = 2(4 + √17)`, where `1 − N⁻² − 4N⁻¹` reaches `3/4`.
pub fn default_n0() -> f64 {
    2.0 * (4.0 + 17f64.sqrt())
}

/// Lower bound `1 − N⁻² − 4N⁻¹` for `|R(z, θ)|` once `|z| > N`.
pub fn remainder_lower_bound(n: f64) -> f64 {
    1.0 - n.powi(-2) - 4.0 / n
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareSystoleParams {
    pub n0: f64,
    pub l0: f64,
    pub epsilon: f64,
}

impl Default for SquareSystoleParams {
    fn default() -> Self {
        let n0 = default_n0();
        SquareSystoleParams { n0, l0: 4.0 * n0.ln(), epsilon: holonomy_epsilon() }
    }
}

impl SquareSystoleParams {
    /// Overrides `N₀`; `L₀` follows as `4 log N₀` unless given.
    pub fn with_n0(n0: f64, l0: Option<f64>) -> Result<Self> {
        if n0 <= 2.0 {
            return Err(Error::precondition("N0 must exceed 2"));
        }
        Ok(SquareSystoleParams { n0, l0: l0.unwrap_or(4.0 * n0.ln()), epsilon: holonomy_epsilon() })
    }
}

/// `h_{P,ζ⁻¹}(Arg T(λ²))` with `P = |T(λ²)|` for one torsion unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitCheck {
    pub zeta: String,
    pub h: f64,
    pub nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareSystoleCertificate {
    pub trace: FieldElement,
    pub length: f64,
    pub holonomy: f64,
    pub n0: f64,
    pub l0: f64,
    pub epsilon: f64,
    pub length_gate: bool,
    pub holonomy_gate: bool,
    /// The non-unit case is checked as `|R| > 3/4`, which with `|ζ| ≥ √2`
    /// gives `|ζR| > 3√2/4`.
    pub remainder_condition: String,
    pub remainder_bound_at_n0: f64,
    pub unit_checks: Vec<UnitCheck>,
    pub tol: f64,
    pub certified: bool,
}

/// Torsion units of `𝒪_k` as complex numbers: `±1`, plus `±i` for ℚ(i) and
/// `±ω, ±ω²` (`ω = ½ − i√3/2`) for ℚ(√−3).
pub fn torsion_units(field: FieldDescriptor) -> Result<Vec<Complex64>> {
    let o = QuadOrder::imaginary(field)?;
    Ok(o.units().into_iter().map(|u| o.to_complex(u)).collect())
}

/// `J = {±1, ±i, ±ω, ±ω²}`.
pub fn unit_set_j() -> Vec<Complex64> {
    let w = Complex64::new(0.5, -(3f64.sqrt()) / 2.0);
    let mut out = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), w, w * w];
    let neg: Vec<Complex64> = out.iter().map(|z| -z).collect();
    out.extend(neg);
    out
}

/// Certificate that `γ²` realises the systole of `Γ(t)\ℍ³`: requires
/// `ℓ(t) > L₀` and `0 ≤ θ(t) < ε`.
pub fn certify_square_systole(t: &NormalizedTrace, params: &SquareSystoleParams) -> Result<SquareSystoleCertificate> {
    if !t.value.is_integral() {
        return Err(Error::NotIntegral(t.value.to_string()));
    }
    let inv = length_holonomy(t)?;
    let field = t.field();
    let units = if field == FieldDescriptor::Rational { vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)] } else { torsion_units(field)? };
    let lam = Complex64::new(inv.eigenvalue_re, inv.eigenvalue_im);
    let t2 = lam * lam + (lam * lam).inv();
    let (p, phi) = (t2.norm(), t2.arg());
    let tol = 1e-9 * (p + 6.0) * (p + 6.0);
    let mut unit_checks = Vec::new();
    if p > 1.0 && phi.abs() < PI / 2.0 {
        for z in units {
            let h = h_function(p, z.inv(), phi)?;
            unit_checks.push(UnitCheck { zeta: format!("{}{:+}i", round12(z.re), round12(z.im)), h, nonnegative: h >= -tol });
        }
    }
    let length_gate = inv.length > params.l0;
    let gate = (0.0..params.epsilon).contains(&inv.holonomy_reduced);
    Ok(SquareSystoleCertificate {
        trace: t.value.clone(),
        length: inv.length,
        holonomy: inv.holonomy_reduced,
        n0: params.n0,
        l0: params.l0,
        epsilon: params.epsilon,
        length_gate,
        holonomy_gate: gate,
        remainder_condition: "|R| > 3/4".into(),
        remainder_bound_at_n0: remainder_lower_bound(params.n0),
        unit_checks,
        tol,
        certified: length_gate && gate,
    })
}

fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
