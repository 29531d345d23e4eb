//! Quartic Salem units `λ = t + u√D` over a real quadratic field `K`, their
//! powers, and the congruence level that makes a surface systole a systole
//! of the ambient manifold.
//!
//! `K = ℚ` is accepted as a degenerate mode: the recurrences and level
//! formulas specialise cleanly and give cheap exact fixtures, but there is no
//! Galois conjugate to control.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::clifford::SpinElement;
use crate::congruence::norm_term;
use crate::error::{Error, Result};
use crate::quadfield::{divides, ideal_norm, FieldDescriptor, FieldElement, IntegerRingElement};

/// `λ = t + u√D` with `t² − u²D = 1` and `λ > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SalemQuartic {
    t: IntegerRingElement,
    u: IntegerRingElement,
    #[serde(rename = "D")]
    d: IntegerRingElement,
}

fn field_of(t: &IntegerRingElement) -> FieldDescriptor {
    t.field()
}

impl SalemQuartic {
    pub fn new(t: IntegerRingElement, u: IntegerRingElement, d: IntegerRingElement) -> Result<Self> {
        let field = field_of(&t);
        if field.is_imaginary() {
            return Err(Error::UnsupportedField(format!("{field} is not real")));
        }
        if u.field() != field || d.field() != field {
            return Err(Error::FieldMismatch(u.field(), field));
        }
        let (te, ue, de) = (t.as_element(), u.as_element(), d.as_element());
        if de.real_sign()? != Ordering::Greater {
            return Err(Error::precondition(format!("D = {de} must be positive")));
        }
        let unit = &(te * te) - &(&(ue * ue) * de);
        if !unit.is_one() {
            return Err(Error::precondition(format!("t^2 - u^2 D = {unit}, expected 1")));
        }
        if te.cmp_real(&FieldElement::one(field))? != Ordering::Greater || ue.real_sign()? != Ordering::Greater {
            return Err(Error::precondition("lambda = t + u sqrt(D) must exceed 1 (t > 1, u > 0)"));
        }
        if field.degree() == 2 {
            let s = te.galois_conj()?;
            let s2m1 = &(&s * &s) - &FieldElement::one(field);
            if s2m1.real_sign()? != Ordering::Less {
                return Err(Error::precondition(format!(
                    "|sigma(t)| = |{s}| must be below 1 for a Salem unit"
                )));
            }
        }
        Ok(SalemQuartic { t, u, d })
    }

    /// `λ₀ = x₀ + √(x₀² − 1)`.
    pub fn from_x0(x0: IntegerRingElement) -> Result<Self> {
        let f = x0.field();
        let x = x0.as_element();
        let d = IntegerRingElement::new(&(x * x) - &FieldElement::one(f))?;
        Self::new(x0, IntegerRingElement::from_int(f, 1), d)
    }

    pub fn field(&self) -> FieldDescriptor {
        self.t.field()
    }

    pub fn t(&self) -> &IntegerRingElement {
        &self.t
    }

    pub fn u(&self) -> &IntegerRingElement {
        &self.u
    }

    #[allow(non_snake_case)]
    pub fn D(&self) -> &IntegerRingElement {
        &self.d
    }

    /// `λ` under the identity embeddings.
    pub fn lambda_f64(&self) -> Result<f64> {
        Ok(self.t.as_element().to_f64()? + self.u.as_element().to_f64()? * self.d.as_element().to_f64()?.sqrt())
    }
}

impl<'de> Deserialize<'de> for SalemQuartic {
    fn deserialize<De: serde::Deserializer<'de>>(de: De) -> std::result::Result<Self, De::Error> {
        #[derive(Deserialize)]
        struct Raw {
            t: IntegerRingElement,
            u: IntegerRingElement,
            #[serde(rename = "D")]
            d: IntegerRingElement,
        }
        let r = Raw::deserialize(de)?;
        SalemQuartic::new(r.t, r.u, r.d).map_err(serde::de::Error::custom)
    }
}

/// From a loxodromic spin element of the quaternionic slice:
/// `(|s_ℝ|, 1, s_ℝ² − 1)`.
pub fn salem_from_spin(s: &SpinElement) -> Result<SalemQuartic> {
    let r = s.real_part();
    let field = r.field();
    let abs = r.abs_real()?;
    if abs.cmp_real(&FieldElement::one(field))? != Ordering::Greater {
        return Err(Error::precondition(format!("s_R = {r} is not loxodromic (|s_R| <= 1)")));
    }
    SalemQuartic::from_x0(IntegerRingElement::new(abs)?)
}

/// `λ^{n+1} = t_n + u_n√D`.
pub fn salem_power(sq: &SalemQuartic, n: u32) -> (IntegerRingElement, IntegerRingElement) {
    let (t, u) = if sq.u.as_element().is_one() {
        power_recurrence(sq.t.as_element(), n)
    } else {
        power_direct(sq, n)
    };
    (
        IntegerRingElement::new(t).expect("powers of an integral unit are integral"),
        IntegerRingElement::new(u).expect("powers of an integral unit are integral"),
    )
}

/// `t_n = (x₀² − 1)u_{n−1} + x₀t_{n−1}`, `u_n = x₀u_{n−1} + t_{n−1}`.
fn power_recurrence(x0: &FieldElement, n: u32) -> (FieldElement, FieldElement) {
    let d = &(x0 * x0) - &FieldElement::one(x0.field());
    let mut t = x0.clone();
    let mut u = FieldElement::one(x0.field());
    for _ in 0..n {
        let nt = &(&d * &u) + &(x0 * &t);
        let nu = &(x0 * &u) + &t;
        t = nt;
        u = nu;
    }
    (t, u)
}

fn power_direct(sq: &SalemQuartic, n: u32) -> (FieldElement, FieldElement) {
    let (t0, u0, d) = (sq.t.as_element(), sq.u.as_element(), sq.d.as_element());
    let mut t = t0.clone();
    let mut u = u0.clone();
    for _ in 0..n {
        let nt = &(&t * t0) + &(&(&u * u0) * d);
        let nu = &(&t * u0) + &(&u * t0);
        t = nt;
        u = nu;
    }
    (t, u)
}

/// Smallest `m ∈ {0,1,2}` with `2σ(t_m)² > 1`; always 0 over ℚ.
pub fn choose_rotation_power(sq: &SalemQuartic) -> Result<u32> {
    if sq.field().degree() == 1 {
        return Ok(0);
    }
    for m in 0..3 {
        let (tm, _) = salem_power(sq, m);
        let s = tm.as_element().galois_conj()?;
        let two = FieldElement::from_int(sq.field(), 2);
        let test = &(&two * &(&s * &s)) - &FieldElement::one(sq.field());
        if test.real_sign()? == Ordering::Greater {
            return Ok(m);
        }
    }
    Err(Error::invariant(format!(
        "no m in {{0,1,2}} has sigma(t_m)^2 > 1/2 for t = {}",
        sq.t
    )))
}

/// One exactly decided inequality, both sides printed exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub holds: bool,
}

impl InequalityCheck {
    fn ge(name: &str, lhs: &FieldElement, rhs: &FieldElement) -> Result<Self> {
        Ok(InequalityCheck {
            name: name.into(),
            lhs: lhs.to_string(),
            relation: ">=".into(),
            rhs: rhs.to_string(),
            holds: lhs.cmp_real(rhs)? != Ordering::Less,
        })
    }

    fn eq(name: &str, lhs: &FieldElement, rhs: &FieldElement) -> Self {
        InequalityCheck {
            name: name.into(),
            lhs: lhs.to_string(),
            relation: "==".into(),
            rhs: rhs.to_string(),
            holds: lhs == rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCertificate {
    pub field: FieldDescriptor,
    pub t: IntegerRingElement,
    pub u: IntegerRingElement,
    #[serde(rename = "D")]
    pub d: IntegerRingElement,
    pub m: u32,
    pub l: u32,
    pub t_m: IntegerRingElement,
    pub alpha: IntegerRingElement,
    pub alpha_norm: String,
    pub t_l: IntegerRingElement,
    pub u_l: IntegerRingElement,
    /// Class of `(s^{l+1})_ℝ = t_l` modulo `α`, the order-two residue `τ_l`.
    pub tau_l: FieldElement,
    pub checks: Vec<InequalityCheck>,
    /// Set only by [`certify_surface_systole`].
    pub certified: bool,
}

impl LevelCertificate {
    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `α = 4t_m² − 1`.
pub fn level_for_power(sq: &SalemQuartic, m: u32) -> IntegerRingElement {
    let (tm, _) = salem_power(sq, m);
    let f = sq.field();
    let t = tm.as_element();
    let a = &(&FieldElement::from_int(f, 4) * &(t * t)) - &FieldElement::one(f);
    IntegerRingElement::new(a).expect("integral by construction")
}

/// Level `l = 3(m + 1) − 1` and `α_l = 4t_m² − 1` for the chosen rotation power.
pub fn level_from_salem(sq: &SalemQuartic) -> Result<LevelCertificate> {
    let f = sq.field();
    let m = choose_rotation_power(sq)?;
    let l = 3 * (m + 1) - 1;
    let (tm, um) = salem_power(sq, m);
    let alpha = level_for_power(sq, m);
    let (tl, ul) = salem_power(sq, l);
    let mut checks = Vec::new();

    if f.degree() == 2 {
        let sa = alpha.as_element().galois_conj()?.abs_real()?;
        let lo = InequalityCheck::ge("sigma_alpha_at_least_1", &sa, &FieldElement::one(f))?;
        let hi = InequalityCheck::ge("sigma_alpha_at_most_5", &FieldElement::from_int(f, 5), &sa)?;
        if !lo.holds || !hi.holds {
            return Err(Error::precondition(format!(
                "|sigma(alpha)| = {sa} lies outside [1, 5]; the input is not a Salem unit"
            )));
        }
        checks.push(lo);
        checks.push(hi);
    }

    // λ^{l+1} = (t_m + u_m√D)³ forces u_l = α·u_m and α | t_l² − 1
    let coeff = InequalityCheck::eq("u_l_equals_alpha_u_m", ul.as_element(), &(alpha.as_element() * um.as_element()));
    if !coeff.holds {
        return Err(Error::invariant(format!("u_l = {} differs from alpha * u_m", ul)));
    }
    checks.push(coeff);
    let tl2m1 = &(tl.as_element() * tl.as_element()) - &FieldElement::one(f);
    if !divides(&alpha, &tl2m1)? {
        return Err(Error::invariant("alpha does not divide t_l^2 - 1"));
    }
    let tau = reduce_mod(tl.as_element(), &alpha)?;

    Ok(LevelCertificate {
        field: f,
        t: sq.t.clone(),
        u: sq.u.clone(),
        d: sq.d.clone(),
        m,
        l,
        t_m: tm,
        alpha_norm: ideal_norm(&alpha)?.to_string(),
        alpha,
        t_l: tl,
        u_l: ul,
        tau_l: tau,
        checks,
        certified: false,
    })
}

/// A small representative of `x` modulo a rational-integer or quadratic `α`:
/// rounds the quotient coordinates, so the result is canonical for a fixed `α`.
fn reduce_mod(x: &FieldElement, alpha: &IntegerRingElement) -> Result<FieldElement> {
    let q = x.try_div(alpha.as_element())?;
    let f = x.field();
    let round = |r: &BigRational| r.floor();
    let approx = match f {
        FieldDescriptor::Rational => FieldElement::from_rational(f, round(q.rational_part())),
        FieldDescriptor::Quadratic(_) => FieldElement::new(f, round(q.rational_part()), round(q.irrational_part()))?,
    };
    Ok(x - &(&approx * alpha.as_element()))
}

/// Adds the two sufficient inequalities for the surface systole to be a
/// systole of the manifold:
/// (i) `N(α)²/2^{2d−1} − 1 ≥ t_l` and (ii) `N(α)²/2^{2d−1} ≥ 2t_l`.
pub fn certify_surface_systole(sq: &SalemQuartic, d: u32) -> Result<LevelCertificate> {
    let f = sq.field();
    if d != f.degree() {
        return Err(Error::precondition(format!("degree {d} does not match {f}")));
    }
    let mut cert = level_from_salem(sq)?;
    let a_term = FieldElement::from_rational(f, norm_term(&cert.alpha, d)?);
    let tl = cert.t_l.as_element().clone();
    let one = FieldElement::one(f);
    let i = InequalityCheck::ge("gamma_alpha_real_part", &(&a_term - &one), &tl)?;
    let ii = InequalityCheck::ge("coset_real_part", &a_term, &(&FieldElement::from_int(f, 2) * &tl))?;
    cert.certified = i.holds && ii.holds;
    cert.checks.push(i);
    cert.checks.push(ii);
    Ok(cert)
}

/// Angles left uncovered by the three sets `S_k` on which `cos(2kν) > 0`.
pub const EXCLUDED_ANGLES: [f64; 4] = [PI / 4.0, 3.0 * PI / 8.0, 5.0 * PI / 8.0, 3.0 * PI / 4.0];

/// Smallest `k ∈ {1, 2, 3}` with `cos(2kν) > 0`.
pub fn rotation_witness(nu: f64) -> Option<u32> {
    (1..=3).find(|&k| (2.0 * k as f64 * nu).cos() > 0.0)
}

/// Index `j` of the interval family `S_j` containing `ν ∈ (0, π)`:
/// `S₁ = (0, π/4) ∪ (3π/4, π)`, `S₂ = (3π/8, 5π/8)`,
/// `S₃ = (π/4, 3π/8) ∪ (5π/8, 3π/4)`.
pub fn covering_set(nu: f64) -> Option<u32> {
    let [a, b, c, e] = EXCLUDED_ANGLES;
    if (0.0 < nu && nu < a) || (e < nu && nu < PI) {
        Some(1)
    } else if b < nu && nu < c {
        Some(2)
    } else if (a < nu && nu < b) || (c < nu && nu < e) {
        Some(3)
    } else {
        None
    }
}
