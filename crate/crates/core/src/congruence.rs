//! Principal congruence subgroups `Γ(α)` of spin groups, the index-two
//! extensions `Γ_τ(α)`, and the displacement bounds attached to them.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::clifford::{real_part, SpinElement};
use crate::error::{Error, Result};
use crate::quadfield::{divides, ideal_norm, FieldElement, IntegerRingElement};

/// A level `α` together with an optional square root `τ` of 1 modulo `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceLevel {
    alpha: IntegerRingElement,
    tau: Option<IntegerRingElement>,
}

impl CongruenceLevel {
    pub fn new(alpha: IntegerRingElement, tau: Option<IntegerRingElement>) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::precondition("the level must be nonzero"));
        }
        if let Some(t) = &tau {
            let t = t.as_element().embed(alpha.field())?;
            let t2m1 = &(&t * &t) - &FieldElement::one(alpha.field());
            if !divides(&alpha, &t2m1)? {
                return Err(Error::precondition(format!("tau = {t} does not square to 1 modulo {alpha}")));
            }
        }
        Ok(CongruenceLevel { alpha, tau })
    }

    pub fn alpha(&self) -> &IntegerRingElement {
        &self.alpha
    }

    pub fn tau(&self) -> Option<&IntegerRingElement> {
        self.tau.as_ref()
    }
}

fn require_integral(s: &SpinElement) -> Result<()> {
    if !s.element().is_integral() {
        return Err(Error::precondition("the spin element has non-integral coefficients"));
    }
    Ok(())
}

/// Whether every non-scalar coefficient of `s` lies in `(α)`.
fn nonreal_part_divisible(s: &SpinElement, alpha: &IntegerRingElement) -> Result<bool> {
    for (&m, c) in s.element().terms() {
        if m != 0 && !divides(alpha, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn scalar_congruent(s: &SpinElement, r: &FieldElement, alpha: &IntegerRingElement) -> Result<bool> {
    let diff = real_part(s.element()).try_sub(&r.embed(s.form().field())?)?;
    divides(alpha, &diff)
}

/// `s ≡ 1 (mod α𝒬)`.
pub fn in_gamma_alpha(s: &SpinElement, alpha: &IntegerRingElement) -> Result<bool> {
    require_integral(s)?;
    if alpha.is_zero() {
        return Err(Error::precondition("the level must be nonzero"));
    }
    Ok(nonreal_part_divisible(s, alpha)?
        && scalar_congruent(s, &FieldElement::one(alpha.field()), alpha)?)
}

/// `s ∈ Γ(α)` or `s ≡ τ (mod α𝒬)`.
pub fn in_gamma_tau_alpha(s: &SpinElement, level: &CongruenceLevel) -> Result<bool> {
    require_integral(s)?;
    let tau = level
        .tau
        .as_ref()
        .ok_or_else(|| Error::precondition("the level has no tau representative"))?;
    if !nonreal_part_divisible(s, &level.alpha)? {
        return Ok(false);
    }
    let one = FieldElement::one(level.alpha.field());
    Ok(scalar_congruent(s, &one, &level.alpha)? || scalar_congruent(s, tau.as_element(), &level.alpha)?)
}

fn residue_of(diff: &FieldElement, alpha: &IntegerRingElement) -> Result<IntegerRingElement> {
    let two = FieldElement::from_int(alpha.field(), 2);
    let a2 = alpha.as_element() * alpha.as_element();
    let zeta = (&two * diff).try_div(&a2)?;
    IntegerRingElement::new(zeta.clone())
        .map_err(|_| Error::invariant(format!("real-part residue {zeta} is not integral")))
}

/// `ζ = 2(s_ℝ − 1)/α²`, integral for every `s ∈ Γ(α)`.
pub fn realpart_residue(s: &SpinElement, alpha: &IntegerRingElement) -> Result<IntegerRingElement> {
    if !in_gamma_alpha(s, alpha)? {
        return Err(Error::precondition(format!("the element is not in Gamma({alpha})")));
    }
    let diff = &real_part(s.element()) - &FieldElement::one(alpha.field());
    residue_of(&diff, alpha)
}

/// `2((sr)_ℝ − s_ℝ)/α²` for `r ∈ Γ(α)` and `s − s_ℝ ∈ α𝒬`.
pub fn realpart_residue_shifted(
    s: &SpinElement,
    r: &SpinElement,
    alpha: &IntegerRingElement,
) -> Result<IntegerRingElement> {
    require_integral(s)?;
    if !in_gamma_alpha(r, alpha)? {
        return Err(Error::precondition(format!("r is not in Gamma({alpha})")));
    }
    if !nonreal_part_divisible(s, alpha)? {
        return Err(Error::precondition(format!("s - s_R is not divisible by {alpha}")));
    }
    let sr = s.mul(r)?;
    let diff = &sr.real_part() - &s.real_part();
    residue_of(&diff, alpha)
}

fn degree_divisor(d: u32) -> Result<BigRational> {
    if !(1..=2).contains(&d) {
        return Err(Error::precondition(format!("degree must be 1 or 2, got {d}")));
    }
    Ok(BigRational::from_integer(BigInt::from(2u32).pow(2 * d - 1)))
}

/// `N(α)² / 2^{2d−1}`.
pub fn norm_term(alpha: &IntegerRingElement, d: u32) -> Result<BigRational> {
    let n = BigInt::from(ideal_norm(alpha)?);
    Ok(BigRational::from_integer(&n * &n) / degree_divisor(d)?)
}

/// `N(α)²/2^{2d−1} − 1`, a lower bound for `|r_ℝ|` over loxodromic
/// `r ∈ Γ(α)`. It is attained when `2(r_ℝ − 1)/α² = −1`.
pub fn realpart_lower_bound(alpha: &IntegerRingElement, d: u32) -> Result<BigRational> {
    Ok(norm_term(alpha, d)? - BigRational::one())
}

/// `N(α)²/2^{2d−1} − |s_ℝ|` for elements of the coset `sΓ(α)`.
pub fn shifted_lower_bound(alpha: &IntegerRingElement, s_abs: &FieldElement, d: u32) -> Result<FieldElement> {
    if s_abs.real_sign()? == std::cmp::Ordering::Less {
        return Err(Error::precondition("|s_R| must be nonnegative"));
    }
    let n = FieldElement::from_rational(s_abs.field(), norm_term(alpha, d)?);
    n.try_sub(s_abs)
}

/// `2 arcosh(r)` when `r > 1`, otherwise 0.
pub fn length_lower_bound(r_abs: f64) -> f64 {
    if r_abs > 1.0 {
        2.0 * r_abs.acosh()
    } else {
        0.0
    }
}

/// `N(α)^{n(n+1)/2}`, an upper bound for `[Γ : Γ(α)]`.
pub fn index_upper_bound(alpha: &IntegerRingElement, n: u32) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::precondition(format!("dimension must be at least 2, got {n}")));
    }
    Ok(ideal_norm(alpha)?.pow(n * (n + 1) / 2))
}

/// `⌊classes · |G| / cap⌋`: disjoint orbits, each of size at least `|G|/cap`.
pub fn kissing_lower_bound(num_systole_classes: u64, group_order: u64, isotropy_cap: u64) -> Result<u128> {
    if num_systole_classes == 0 || group_order == 0 || isotropy_cap == 0 {
        return Err(Error::precondition("kissing bound inputs must be positive"));
    }
    Ok(num_systole_classes as u128 * group_order as u128 / isotropy_cap as u128)
}

/// Value of a bound together with the inputs it was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: Vec<(String, String)>,
    pub bound_value: String,
    /// Set when the bound is a float; exact bounds leave it empty.
    pub tol: Option<f64>,
    pub certified: bool,
}

impl BoundReport {
    pub fn exact(name: &str, inputs: Vec<(String, String)>, value: impl ToString) -> Self {
        BoundReport { name: name.into(), inputs, bound_value: value.to_string(), tol: None, certified: true }
    }

    pub fn real(name: &str, inputs: Vec<(String, String)>, value: f64, tol: f64) -> Self {
        BoundReport { name: name.into(), inputs, bound_value: format!("{value}"), tol: Some(tol), certified: true }
    }
}

/// Everything the `congruence check` command reports about one element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub alpha: String,
    pub tau: Option<String>,
    pub in_gamma_alpha: bool,
    pub in_gamma_tau_alpha: Option<bool>,
    pub zeta: Option<String>,
    pub real_part: String,
    pub bounds: Vec<BoundReport>,
}

pub fn membership_report(s: &SpinElement, level: &CongruenceLevel) -> Result<MembershipReport> {
    let alpha = level.alpha();
    let in_alpha = in_gamma_alpha(s, alpha)?;
    let in_tau = match level.tau() {
        Some(_) => Some(in_gamma_tau_alpha(s, level)?),
        None => None,
    };
    let zeta = if in_alpha { Some(realpart_residue(s, alpha)?.to_string()) } else { None };
    let d = alpha.field().degree();
    let echo = vec![("alpha".to_string(), alpha.to_string()), ("d".to_string(), d.to_string())];
    let mut bounds = vec![BoundReport::exact("realpart_lower_bound", echo.clone(), realpart_lower_bound(alpha, d)?)];
    let s_r = s.real_part();
    if let Ok(r) = s_r.abs_real() {
        let mut inputs = echo;
        inputs.push(("s_abs".into(), r.to_string()));
        bounds.push(BoundReport::exact("shifted_lower_bound", inputs, shifted_lower_bound(alpha, &r, d)?));
        let rf = r.to_f64()?;
        bounds.push(BoundReport::real(
            "length_lower_bound",
            vec![("r_abs".into(), r.to_string())],
            length_lower_bound(rf),
            1e-12,
        ));
    }
    Ok(MembershipReport {
        alpha: alpha.to_string(),
        tau: level.tau().map(|t| t.to_string()),
        in_gamma_alpha: in_alpha,
        in_gamma_tau_alpha: in_tau,
        zeta,
        real_part: s_r.to_string(),
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::clifford::{cliff_mul, star, CliffordElement, DiagonalForm};
    use crate::quadfield::FieldDescriptor;
    use std::sync::Arc;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rational
    }

    fn form() -> Arc<DiagonalForm> {
        Arc::new(DiagonalForm::standard(q(), 2).unwrap())
    }

    /// `a + b e01 + c e02 + e e12` with `a² − b² − c² + e² = 1`.
    fn quat(a: i64, b: i64, c: i64, e: i64) -> SpinElement {
        let f = form();
        let terms = [(0, a), (0b011, b), (0b101, c), (0b110, e)].map(|(m, x)| (m, FieldElement::from_int(q(), x)));
        SpinElement::new(CliffordElement::from_terms(f, terms).unwrap()).unwrap()
    }

    fn int(n: i64) -> IntegerRingElement {
        IntegerRingElement::from_int(q(), n)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn membership_examples() {
        let one = SpinElement::new(CliffordElement::one(form())).unwrap();
        let s = quat(3, 2, 2, 0);
        assert!(in_gamma_alpha(&one, &int(7)).unwrap());
        assert!(in_gamma_alpha(&s, &int(2)).unwrap());
        assert!(!in_gamma_alpha(&s, &int(3)).unwrap());
        let level = CongruenceLevel::new(int(4), Some(int(3))).unwrap();
        assert!(in_gamma_tau_alpha(&one, &level).unwrap());
        assert!(!in_gamma_tau_alpha(&s, &level).unwrap());
        assert!(CongruenceLevel::new(int(4), Some(int(2))).is_err());
        assert!(in_gamma_tau_alpha(&s, &CongruenceLevel::new(int(4), None).unwrap()).is_err());
    }

    #[test]
    fn tau_coset_membership() {
        // s³ = 99 + 70 e01 + 70 e02, and 99 ≡ 29 (mod 35) with 29² ≡ 1
        let s3 = quat(3, 2, 2, 0).pow(3);
        assert_eq!(s3, quat(99, 70, 70, 0));
        let level = CongruenceLevel::new(int(35), Some(int(29))).unwrap();
        assert!(!in_gamma_alpha(&s3, &int(35)).unwrap());
        assert!(in_gamma_tau_alpha(&s3, &level).unwrap());
    }

    #[test]
    fn residues() {
        let one = SpinElement::new(CliffordElement::one(form())).unwrap();
        assert_eq!(realpart_residue(&one, &int(5)).unwrap(), int(0));
        assert_eq!(realpart_residue(&quat(3, 2, 2, 0), &int(2)).unwrap(), int(1));
        assert!(realpart_residue(&quat(3, 2, 2, 0), &int(3)).unwrap_err().to_string().contains("not in Gamma"));
        let r = quat(3, 2, 2, 0);
        let s = quat(99, 70, 70, 0);
        let z = realpart_residue_shifted(&s, &r, &int(2)).unwrap();
        let sr = s.mul(&r).unwrap().real_part();
        let expect = &s.real_part() + &FieldElement::from_rational(q(), rat(1, 2)).try_mul(&FieldElement::from_int(q(), 4)).unwrap().try_mul(z.as_element()).unwrap();
        assert_eq!(sr, expect);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(realpart_lower_bound(&int(1), 1).unwrap(), rat(-1, 2));
        assert_eq!(realpart_lower_bound(&int(2), 1).unwrap(), rat(1, 1));
        let f2 = FieldDescriptor::quadratic(2).unwrap();
        let a = IntegerRingElement::from_ints(f2, 3, 1).unwrap();
        assert_eq!(realpart_lower_bound(&a, 2).unwrap(), rat(41, 8));
        assert!(realpart_lower_bound(&int(2), 3).is_err());

        let zero = FieldElement::zero(q());
        assert_eq!(shifted_lower_bound(&int(2), &zero, 1).unwrap(), FieldElement::from_int(q(), 2));
        // 15 has ideal norm 225 in a quadratic field
        let f2 = FieldDescriptor::quadratic(2).unwrap();
        let s26 = FieldElement::from_int(f2, 26);
        let b = shifted_lower_bound(&IntegerRingElement::from_int(f2, 15), &s26, 2).unwrap();
        assert_eq!(b, FieldElement::from_rational(f2, rat(50417, 8)));
        assert_eq!(b.to_f64().unwrap(), 6302.125);
        assert_eq!(
            shifted_lower_bound(&int(15), &FieldElement::from_int(q(), 26), 1).unwrap(),
            FieldElement::from_rational(q(), rat(173, 2))
        );
        assert_eq!(
            shifted_lower_bound(&int(1), &FieldElement::one(q()), 2).unwrap(),
            FieldElement::from_rational(q(), rat(-7, 8))
        );
    }

    #[test]
    fn length_examples() {
        assert_eq!(length_lower_bound(1.0), 0.0);
        assert_eq!(length_lower_bound(0.3), 0.0);
        let l3 = 2.0 * (3.0 + 2.0 * 2f64.sqrt()).ln();
        assert!((length_lower_bound(3.0) - l3).abs() < 1e-12);
        assert!((length_lower_bound(3.0) - 3.525494348078172).abs() < 1e-12);
        assert!((length_lower_bound(1f64.cosh()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn index_and_kissing() {
        assert_eq!(index_upper_bound(&int(1), 2).unwrap(), BigUint::from(1u32));
        assert_eq!(index_upper_bound(&int(15), 2).unwrap(), BigUint::from(3375u32));
        assert_eq!(index_upper_bound(&int(15), 3).unwrap(), BigUint::from(11390625u32));
        assert_eq!(kissing_lower_bound(1, 10, 2).unwrap(), 5);
        assert_eq!(kissing_lower_bound(7, 100, 2).unwrap(), 350);
        assert_eq!(kissing_lower_bound(9, 13, 1).unwrap(), 117);
        assert!(kissing_lower_bound(0, 1, 1).is_err());
    }

    #[test]
    fn bound_monotone_in_norm() {
        let mut prev = realpart_lower_bound(&int(1), 1).unwrap();
        for n in 2..50 {
            let b = realpart_lower_bound(&int(n), 1).unwrap();
            assert!(b > prev);
            prev = b;
        }
    }

    /// Integer points of `a² − b² − c² + e² = 1` in a box.
    fn quaternion_slice(h: i64) -> Vec<SpinElement> {
        let mut out = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                for c in -h..=h {
                    let e2 = 1 - a * a + b * b + c * c;
                    if e2 < 0 {
                        continue;
                    }
                    let e = (e2 as f64).sqrt().round() as i64;
                    if e * e == e2 && e <= h {
                        for e in if e == 0 { vec![0] } else { vec![e, -e] } {
                            out.push(quat(a, b, c, e));
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn empirical_real_part_bound() {
        let slice = quaternion_slice(40);
        for alpha in [2, 3, 4, 5] {
            let a = int(alpha);
            let bound = realpart_lower_bound(&a, 1).unwrap();
            let mut seen = 0;
            for s in &slice {
                if !in_gamma_alpha(s, &a).unwrap() {
                    continue;
                }
                let r = s.real_part().rational_part().abs();
                // loxodromic: |s_R| > 1
                if r > BigRational::one() {
                    assert!(r >= bound, "alpha {alpha}, s_R {r}");
                    seen += 1;
                }
                realpart_residue(s, &a).unwrap();
            }
            assert!(seen > 0, "no loxodromic members for alpha {alpha}");
        }
    }

    #[test]
    fn real_part_bound_is_attained() {
        // ζ = −1 gives s_R = 1 − α²/2 exactly on the bound
        let s = quat(-7, 8, 0, 4);
        let a = int(4);
        assert!(in_gamma_alpha(&s, &a).unwrap());
        assert_eq!(realpart_residue(&s, &a).unwrap(), int(-1));
        assert_eq!(s.real_part().rational_part().abs(), realpart_lower_bound(&a, 1).unwrap());
    }

    #[test]
    fn group_closure_and_normality() {
        let a = int(2);
        let s1 = quat(3, 2, 2, 0);
        let s2 = quat(3, -2, 2, 0);
        assert!(in_gamma_alpha(&s2, &a).unwrap());
        assert!(in_gamma_alpha(&s1.mul(&s2).unwrap(), &a).unwrap());
        assert!(in_gamma_alpha(&s1.inverse(), &a).unwrap());

        let level = CongruenceLevel::new(int(35), Some(int(29))).unwrap();
        let members = [quat(3, 2, 2, 0).pow(3), SpinElement::new(CliffordElement::one(form())).unwrap()];
        let sample: Vec<SpinElement> = quaternion_slice(6).into_iter().take(60).collect();
        for g in &sample {
            for s in &members {
                let conj = cliff_mul(&cliff_mul(g.element(), s.element()).unwrap(), &star(g.element())).unwrap();
                let conj = SpinElement::new(conj).unwrap();
                assert!(in_gamma_tau_alpha(&conj, &level).unwrap());
            }
        }
    }

    #[test]
    fn rejects_rational_elements() {
        let f = form();
        let half = FieldElement::from_rational(q(), rat(1, 2));
        let x = CliffordElement::scalar(f, half).unwrap();
        // not spin anyway, but membership must reject before any test
        assert!(SpinElement::new(x).is_err());
    }
}
