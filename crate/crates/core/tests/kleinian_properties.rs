use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;

use systole_core::census::{lattice_count, primitive_quad, trace_census, CensusQuery, CensusReport, Strategy};
use systole_core::exec::ExecPolicy;
use systole_core::kleinian::enumerate::enumerate_sl2_order;
use systole_core::kleinian::{
    classify_quad, congruence_ball, enumerate_by_trace, invariants_of, normalize_quad, trace_identity_sides,
    ElementType, NormalizedTrace,
};
use systole_core::quadfield::{FieldDescriptor, FieldElement, QuadInteger, QuadOrder};

fn order(d: i64) -> QuadOrder {
    QuadOrder::imaginary(FieldDescriptor::imaginary(d).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_is_idempotent(d in prop::sample::select(vec![1i64, 2, 3, 7, 11]), x in -50i64..50, y in -50i64..50) {
        let o = order(d);
        let t = QuadInteger::new(x, y);
        let (n, s) = normalize_quad(t);
        prop_assert_eq!(normalize_quad(n), (n, 1));
        prop_assert_eq!(if s == 1 { t } else { -t }, n);
        let nt = NormalizedTrace::new(o.to_field(t)).unwrap();
        prop_assert_eq!(nt.value(), &o.to_field(n));
        if !n.is_zero() {
            let arg = o.to_complex(n).arg();
            prop_assert!((0.0..PI).contains(&arg));
        }
    }

    #[test]
    fn lattice_traces_satisfy_the_length_identity(d in prop::sample::select(vec![1i64, 2, 3, 7]), x in -100i64..100, y in -100i64..100) {
        let o = order(d);
        let t = QuadInteger::new(x, y);
        prop_assume!(classify_quad(t) == ElementType::Loxodromic);
        let tc = o.to_complex(t);
        let inv = invariants_of(tc);
        let (l, r) = trace_identity_sides(tc, inv.length);
        prop_assert!((l - r).abs() <= 1e-12 * r);
        prop_assert!((0.0..2.0 * PI).contains(&inv.holonomy_reduced));
        prop_assert!(inv.holonomy > -2.0 * PI && inv.holonomy <= 2.0 * PI);
        prop_assert!((inv.holonomy.rem_euclid(2.0 * PI) - inv.holonomy_reduced).abs() < 1e-12 || (inv.holonomy - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn trace_route_matches_box(d in prop::sample::select(vec![1i64, 2, 3]), x in -4i64..=4, y in -4i64..=4) {
        let o = order(d);
        let t = QuadInteger::new(x, y);
        let h = 2;
        let mut want: Vec<_> = enumerate_sl2_order(&o, h, None, &ExecPolicy::sequential())
            .into_iter()
            .filter(|g| g.trace() == t)
            .map(|g| g.entries())
            .collect();
        want.sort();
        let got: Vec<_> = enumerate_by_trace(&o, t, h).iter().map(|g| g.entries()).collect();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn negative_real_trace_has_full_turn_holonomy() {
    let inv = invariants_of(num_complex::Complex64::new(-3.0, 0.0));
    assert!((inv.holonomy - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn powers_of_enumerated_elements_are_flagged_imprimitive() {
    for d in [1, 3] {
        let o = order(d);
        let mut checked = 0;
        for g in enumerate_sl2_order(&o, 2, None, &ExecPolicy::sequential()) {
            if classify_quad(g.trace()) != ElementType::Loxodromic {
                continue;
            }
            for k in 2..=3u32 {
                let p = g.pow(k);
                let (t, _) = normalize_quad(p.trace());
                assert!(!primitive_quad(&o, t, k), "d = -{d}, trace {t:?} = tr δ^{k}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }
}

#[test]
fn ball_elements_lie_in_the_congruence_subgroup() {
    let o = order(1);
    for (t, h) in [(QuadInteger::new(2, 1), 12), (QuadInteger::int(4), 40), (QuadInteger::new(1, 1), 6)] {
        let ball = congruence_ball(&o, t, h, &ExecPolicy::with_workers(2).unwrap()).unwrap();
        assert!(!ball.is_empty());
        let mut seen = BTreeSet::new();
        for g in &ball {
            assert!(g.height() <= h);
            assert!(g.congruence_sign(t).is_some());
            assert!(seen.insert(g.entries()));
            // trace of an element of Γ(t) is 2 modulo t²
            let (s, _) = systole_core::kleinian::trace_residue_quad(g, t).unwrap();
            assert!(s == 1 || o.divides(t, QuadInteger::int(2)));
        }
    }
}

fn half_plane_bound(field: FieldDescriptor, n: u64) -> u64 {
    (lattice_count(field, (n as f64).sqrt()).unwrap() - 1) / 2 + 1
}

fn check_report(r: &CensusReport) {
    let q = &r.query;
    assert!(r.tau_hat <= half_plane_bound(q.field, q.max_norm));
    assert_eq!(r.tau_hat as usize, r.records.len());
    let sigma: u64 = r.records.iter().filter(|x| x.primitive).map(|x| x.axis_class_count).sum();
    assert_eq!(r.sigma_hat, sigma);
    let traces: BTreeSet<String> = r.records.iter().map(|x| x.trace.to_string()).collect();
    assert_eq!(traces.len(), r.records.len());
    for rec in &r.records {
        assert!(rec.realization_count > 0 && rec.axis_class_count > 0);
        assert!(rec.axis_class_count <= rec.realization_count);
        assert!(q.hol_lo <= rec.holonomy_reduced && rec.holonomy_reduced <= q.hol_hi);
        assert!(rec.norm <= q.max_norm && rec.norm >= q.min_norm);
        let (l, rr) = trace_identity_sides(rec.trace.to_complex(), rec.length);
        assert!((l - rr).abs() <= 1e-12 * rr);
    }
}

#[test]
fn census_reports_are_sound() {
    for d in [1, 2, 3, 7] {
        let f = FieldDescriptor::imaginary(d).unwrap();
        for (n, lo, hi, h) in [(30, 0.0, 2.0 * PI, 3), (50, 0.5, 3.0, 3), (80, 0.0, 0.3, 4)] {
            for primitive_only in [false, true] {
                let q = CensusQuery { primitive_only, ..CensusQuery::new(f, n, lo, hi, h) };
                check_report(&trace_census(&q, &ExecPolicy::sequential()).unwrap());
            }
        }
    }
}

#[test]
fn census_is_deterministic_and_route_independent() {
    let f = FieldDescriptor::imaginary(3).unwrap();
    let base = CensusQuery::new(f, 40, 0.0, 2.0 * PI, 3);
    let a = trace_census(&CensusQuery { strategy: Strategy::Box, ..base.clone() }, &ExecPolicy::with_workers(3).unwrap()).unwrap();
    let b = trace_census(&CensusQuery { strategy: Strategy::TraceDriven, ..base.clone() }, &ExecPolicy::sequential()).unwrap();
    assert_eq!(a.records, b.records);
    let again = trace_census(&CensusQuery { strategy: Strategy::Box, ..base }, &ExecPolicy::sequential()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn census_trace_records_use_exact_strings() {
    let f = FieldDescriptor::imaginary(1).unwrap();
    let r = trace_census(&CensusQuery::new(f, 1, 0.0, 2.0 * PI, 2), &ExecPolicy::sequential()).unwrap();
    let js = serde_json::to_value(&r).unwrap();
    assert_eq!(js["records"][0]["trace"], "0+1*sqrt(-1)");
    assert_eq!(r.records[0].trace, FieldElement::from_ints(f, 0, 1).unwrap());
}
