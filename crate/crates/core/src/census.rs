//! Trace census at bounded height: distinct normalised traces `τ̂`,
//! axis-class counts `σ̂`, their ratio `μ̂`, and growth tables in `N`.
//!
//! `σ̂` counts distinct axes among enumerated elements sharing a trace. It
//! is a lower-bound surrogate for the number of primitive conjugacy classes,
//! never the class count itself.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::kleinian::enumerate::enumerate_sl2_order;
use crate::kleinian::{
    classify, classify_quad, enumerate_by_trace, invariants_of, AxisKey, ElementType, NormalizedTrace,
};
use crate::quadfield::{FieldDescriptor, FieldElement, QuadInteger, QuadOrder};

/// Text attached to every report that carries `σ̂`.
pub const SIGMA_NOTE: &str = "sigma_hat counts distinct axes among enumerated elements (surrogate lower bound)";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Picks whichever route is cheaper; both give the same report.
    #[default]
    Auto,
    /// Sweep all of `SL(2)` at the height, then bucket.
    Box,
    /// Enumerate candidate traces first, then their realisations.
    TraceDriven,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusQuery {
    pub field: FieldDescriptor,
    /// Upper bound on `|t|²`.
    pub max_norm: u64,
    /// Lower bound on `|t|²`, zero by default.
    #[serde(default)]
    pub min_norm: u64,
    pub hol_lo: f64,
    pub hol_hi: f64,
    pub height: u64,
    pub primitive_only: bool,
    #[serde(default)]
    pub strategy: Strategy,
}

impl CensusQuery {
    pub fn new(field: FieldDescriptor, max_norm: u64, hol_lo: f64, hol_hi: f64, height: u64) -> Self {
        CensusQuery { field, max_norm, min_norm: 0, hol_lo, hol_hi, height, primitive_only: false, strategy: Strategy::Auto }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.field.is_imaginary() {
            return Err(Error::UnsupportedField(format!("{} is not imaginary quadratic", self.field)));
        }
        if !(0.0 <= self.hol_lo && self.hol_lo <= self.hol_hi && self.hol_hi <= 2.0 * PI) {
            return Err(Error::precondition(format!(
                "holonomy interval [{}, {}] is not inside [0, 2π]",
                self.hol_lo, self.hol_hi
            )));
        }
        if self.height == 0 {
            return Err(Error::precondition("height must be at least 1"));
        }
        if self.min_norm > self.max_norm {
            return Err(Error::precondition("min_norm exceeds max_norm"));
        }
        Ok(())
    }

    fn keeps(&self, norm: u64, theta: f64) -> bool {
        (self.min_norm..=self.max_norm).contains(&norm) && self.hol_lo <= theta && theta <= self.hol_hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub trace: FieldElement,
    pub norm: u64,
    pub length: f64,
    pub holonomy: f64,
    pub holonomy_reduced: f64,
    pub realization_count: u64,
    pub axis_class_count: u64,
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub query: CensusQuery,
    pub records: Vec<TraceRecord>,
    pub tau_hat: u64,
    pub sigma_hat: u64,
    /// `σ̂/τ̂` as an exact fraction, absent when `τ̂ = 0`.
    pub mu_hat: Option<String>,
    pub sigma_note: String,
}

impl CensusReport {
    pub fn mu_hat_exact(&self) -> Option<BigRational> {
        (self.tau_hat > 0).then(|| BigRational::new(BigInt::from(self.sigma_hat), BigInt::from(self.tau_hat)))
    }

    pub fn mu_hat_f64(&self) -> Option<f64> {
        (self.tau_hat > 0).then(|| self.sigma_hat as f64 / self.tau_hat as f64)
    }
}

/// Lattice points of `𝒪_k` with `|z| ≤ r`.
pub fn lattice_count(field: FieldDescriptor, r: f64) -> Result<u64> {
    if !field.is_imaginary() {
        return Err(Error::UnsupportedField(format!("{field} is not imaginary quadratic")));
    }
    if !(r >= 0.0) {
        return Err(Error::precondition("radius must be nonnegative"));
    }
    let o = QuadOrder::imaginary(field)?;
    Ok(o.disk_elements(r).len() as u64)
}

/// `p_k` with `p_0 = 2`, `p_1 = x`, `p_{k+1} = x p_k − p_{k−1}`, so that
/// `p_k(z + z⁻¹) = z^k + z^{−k}`. `None` on overflow.
pub fn power_trace(order: &QuadOrder, x: QuadInteger, k: u32) -> Option<QuadInteger> {
    let (mut prev, mut cur) = (QuadInteger::int(2), x);
    if k == 0 {
        return Some(prev);
    }
    for _ in 1..k {
        let next = order.checked_mul(x, cur)?;
        let next = QuadInteger::new(next.x.checked_sub(prev.x)?, next.y.checked_sub(prev.y)?);
        (prev, cur) = (cur, next);
    }
    Some(cur)
}

fn power_trace_int(x: i128, k: u32) -> Option<i128> {
    let (mut prev, mut cur) = (2i128, x);
    if k == 0 {
        return Some(prev);
    }
    for _ in 1..k {
        let next = x.checked_mul(cur)?.checked_sub(prev)?;
        (prev, cur) = (cur, next);
    }
    Some(cur)
}

/// `false` when `±t = p_k(t')` for some `2 ≤ k ≤ max_k` and integral
/// loxodromic `t'`; candidates satisfy `|t'| ≤ (|t| + 2)^{1/k} + 2`.
pub fn primitive_trace_filter(t: &NormalizedTrace, max_k: u32) -> Result<bool> {
    if classify(t) != ElementType::Loxodromic {
        return Err(Error::precondition("primitivity is tested on loxodromic traces"));
    }
    if !t.value().is_integral() {
        return Err(Error::NotIntegral(t.value().to_string()));
    }
    if max_k < 2 {
        return Err(Error::precondition("max_k must be at least 2"));
    }
    let tabs = t.to_complex().norm();
    if t.field() == FieldDescriptor::Rational {
        let tv = t.value().rational_part().to_integer();
        let tv: i128 = tv.try_into().map_err(|_| Error::precondition("trace too large"))?;
        for k in 2..=max_k {
            let bound = ((tabs + 2.0).powf(1.0 / k as f64) + 2.0).floor() as i128 + 1;
            for c in -bound..=bound {
                if c.abs() <= 2 {
                    continue;
                }
                if let Some(p) = power_trace_int(c, k) {
                    if p == tv || p == -tv {
                        return Ok(false);
                    }
                }
            }
        }
        return Ok(true);
    }
    let order = QuadOrder::imaginary(t.field())?;
    let tq = order.from_field(t.value())?;
    Ok(primitive_quad(&order, tq, max_k))
}

/// Fixed-width core of [`primitive_trace_filter`].
pub fn primitive_quad(order: &QuadOrder, t: QuadInteger, max_k: u32) -> bool {
    let tabs = order.to_complex(t).norm();
    for k in 2..=max_k {
        let bound = (tabs + 2.0).powf(1.0 / k as f64) + 2.0;
        for c in order.disk_elements(bound + 1e-9) {
            if classify_quad(c) != ElementType::Loxodromic {
                continue;
            }
            if let Some(p) = power_trace(order, c, k) {
                if p == t || p == -t {
                    return false;
                }
            }
        }
    }
    true
}

/// Per-trace tallies before statistics: realisations and distinct axes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceGroup {
    pub realizations: u64,
    pub axes: BTreeSet<AxisKey>,
}

/// Raw census data keyed by normalised trace.
pub type RawCensus = BTreeMap<QuadInteger, TraceGroup>;

/// Loxodromic, normalised, in the norm window and in the holonomy interval.
fn admissible_trace(order: &QuadOrder, q: &CensusQuery, t: QuadInteger) -> bool {
    if t.y < 0 || (t.y == 0 && t.x < 0) || classify_quad(t) != ElementType::Loxodromic {
        return false;
    }
    let norm = order.norm(t) as u64;
    if !(q.min_norm..=q.max_norm).contains(&norm) {
        return false;
    }
    q.keeps(norm, invariants_of(order.to_complex(t)).holonomy_reduced)
}

fn choose_strategy(order: &QuadOrder, q: &CensusQuery) -> Strategy {
    match q.strategy {
        Strategy::Auto => {
            let side = (2 * q.height + 1) as f64;
            let box_cost = side.powi(6);
            let traces = order.disk_elements((q.max_norm as f64).sqrt()).len() as f64 / 2.0;
            let trace_cost = traces * side * side * 64.0;
            if box_cost <= trace_cost {
                Strategy::Box
            } else {
                Strategy::TraceDriven
            }
        }
        s => s,
    }
}

/// Groups enumerated elements by normalised trace. Only elements whose trace
/// already is normalised are counted, so `realizations` is a count in `SL(2)`
/// which equals the count in `PSL(2)` of elements with trace `±t`.
pub fn collect_raw(q: &CensusQuery, exec: &ExecPolicy) -> Result<RawCensus> {
    q.validate()?;
    let order = QuadOrder::imaginary(q.field)?;
    let mut raw = RawCensus::new();
    match choose_strategy(&order, q) {
        Strategy::Box | Strategy::Auto => {
            for g in enumerate_sl2_order(&order, q.height, None, exec) {
                let t = g.trace();
                if !admissible_trace(&order, q, t) {
                    continue;
                }
                let e = raw.entry(t).or_default();
                e.realizations += 1;
                e.axes.insert(g.axis_key().expect("loxodromic elements have an axis"));
            }
        }
        Strategy::TraceDriven => {
            let traces: Vec<QuadInteger> = order
                .disk_elements((q.max_norm as f64).sqrt() + 1e-9)
                .into_iter()
                .filter(|&t| admissible_trace(&order, q, t))
                .collect();
            let groups = exec.map(&traces, |&t| {
                let mut grp = TraceGroup::default();
                for g in enumerate_by_trace(&order, t, q.height) {
                    grp.realizations += 1;
                    grp.axes.insert(g.axis_key().expect("loxodromic elements have an axis"));
                }
                grp
            });
            for (t, grp) in traces.into_iter().zip(groups) {
                if grp.realizations > 0 {
                    raw.insert(t, grp);
                }
            }
        }
    }
    Ok(raw)
}

/// Turns raw groups into a report for `q`, dropping groups outside its window.
/// Primitivity uses `max_k = max(2, ⌈ℓ/ℓ_min⌉)` over the kept records.
pub fn finalize(q: &CensusQuery, raw: &RawCensus) -> Result<CensusReport> {
    q.validate()?;
    let order = QuadOrder::imaginary(q.field)?;
    let mut records = Vec::new();
    let mut keys = Vec::new();
    for (&t, grp) in raw {
        if grp.realizations == 0 || !admissible_trace(&order, q, t) {
            continue;
        }
        let inv = invariants_of(order.to_complex(t));
        records.push(TraceRecord {
            trace: order.to_field(t),
            norm: order.norm(t) as u64,
            length: inv.length,
            holonomy: inv.holonomy,
            holonomy_reduced: inv.holonomy_reduced,
            realization_count: grp.realizations,
            axis_class_count: grp.axes.len() as u64,
            primitive: true,
        });
        keys.push(t);
    }
    let l_min = records.iter().map(|r| r.length).fold(f64::INFINITY, f64::min);
    for (r, &t) in records.iter_mut().zip(&keys) {
        let max_k = ((r.length / l_min).ceil() as u32).max(2);
        r.primitive = primitive_quad(&order, t, max_k);
    }
    if q.primitive_only {
        records.retain(|r| r.primitive);
    }
    let tau_hat = records.len() as u64;
    let sigma_hat = records.iter().filter(|r| r.primitive).map(|r| r.axis_class_count).sum();
    let mut report = CensusReport {
        query: q.clone(),
        records,
        tau_hat,
        sigma_hat,
        mu_hat: None,
        sigma_note: SIGMA_NOTE.into(),
    };
    report.mu_hat = report.mu_hat_exact().map(|m| m.to_string());
    Ok(report)
}

pub fn trace_census(q: &CensusQuery, exec: &ExecPolicy) -> Result<CensusReport> {
    let raw = collect_raw(q, exec)?;
    finalize(q, &raw)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u64,
    pub tau_hat: u64,
    pub sigma_hat: u64,
    pub mu_hat: Option<String>,
    /// `N / log N`, absent for `N ≤ 1`.
    pub n_over_log_n: Option<f64>,
    pub mu_hat_log_n_over_n: Option<f64>,
}

/// One census per `N`, all cut from a single enumeration at the largest `N`.
pub fn growth_table(
    field: FieldDescriptor,
    n_list: &[u64],
    hol_lo: f64,
    hol_hi: f64,
    height: u64,
    exec: &ExecPolicy,
) -> Result<Vec<GrowthRow>> {
    if n_list.is_empty() {
        return Err(Error::precondition("N list is empty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("N list must be strictly increasing"));
    }
    let top = CensusQuery::new(field, *n_list.last().unwrap(), hol_lo, hol_hi, height);
    let raw = collect_raw(&top, exec)?;
    let mut rows = Vec::new();
    for &n in n_list {
        let q = CensusQuery { max_norm: n, ..top.clone() };
        let rep = finalize(&q, &raw)?;
        let nl = (n > 1).then(|| n as f64 / (n as f64).ln());
        rows.push(GrowthRow {
            n,
            tau_hat: rep.tau_hat,
            sigma_hat: rep.sigma_hat,
            mu_hat: rep.mu_hat.clone(),
            n_over_log_n: nl,
            mu_hat_log_n_over_n: match (rep.mu_hat_f64(), nl) {
                (Some(m), Some(nl)) => Some(m / nl),
                _ => None,
            },
        });
    }
    if rows.windows(2).any(|w| w[0].tau_hat > w[1].tau_hat) {
        return Err(Error::invariant("tau_hat decreased along the growth table"));
    }
    Ok(rows)
}
