//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use systole_core::census::{growth_table, lattice_count, trace_census, CensusQuery, Strategy};
use systole_core::clifford::{basis_mul, cliff_mul, is_spin, star, CliffordElement, DiagonalForm, Mask, SpinElement};
use systole_core::congruence::{in_gamma_alpha, length_lower_bound, realpart_residue};
use systole_core::exec::ExecPolicy;
use systole_core::kleinian::{
    arg_tan_relation, certify_square_systole, classify_quad, congruence_ball, eigenvalue_of, enumerate_sl2,
    h_function_sides, invariants_of, trace_identity_sides, trace_mod_level, unit_set_j, ElementType,
    NormalizedTrace, SquareSystoleParams,
};
use systole_core::quadfield::{FieldDescriptor, FieldElement, IntegerRingElement, QuadOrder};
use systole_core::report::{census_csv, growth_csv};
use systole_core::salem::{
    certify_surface_systole, covering_set, level_from_salem, salem_power, SalemQuartic, EXCLUDED_ANGLES,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn q() -> FieldDescriptor {
    FieldDescriptor::Rational
}

fn q2() -> FieldDescriptor {
    FieldDescriptor::quadratic(2).unwrap()
}

fn qi() -> FieldDescriptor {
    FieldDescriptor::imaginary(1).unwrap()
}

/// Generator words reduced by adjacent swaps and contractions,
/// `e₀² = −a₀`, `eᵢ² = aᵢ`.
fn word_product(m: Mask, n: Mask, coeffs: &[FieldElement]) -> (FieldElement, Mask) {
    let f = coeffs[0].field();
    let square = |v: usize| if v == 0 { -coeffs[0].clone() } else { coeffs[v].clone() };
    let mut word: Vec<usize> = (0..16).filter(|v| m >> v & 1 == 1).chain((0..16).filter(|v| n >> v & 1 == 1)).collect();
    let mut c = FieldElement::one(f);
    let mut i = 0;
    while i + 1 < word.len() {
        if word[i] > word[i + 1] {
            word.swap(i, i + 1);
            c = -c;
            i = i.saturating_sub(1);
        } else if word[i] == word[i + 1] {
            c = &c * &square(word[i]);
            word.drain(i..i + 2);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    (c, word.iter().fold(0, |acc, &v| acc | 1 << v))
}

fn random_element(rng: &mut ChaCha8Rng, form: &Arc<DiagonalForm>) -> CliffordElement {
    let f = form.field();
    let full = form.full_mask();
    let terms: Vec<(Mask, FieldElement)> = (0..4)
        .map(|_| {
            let m = rng.gen_range(0..=full);
            let b = if f == q() { 0 } else { rng.gen_range(-3..=3) };
            (m, FieldElement::from_ints(f, rng.gen_range(-5..=5), b).unwrap())
        })
        .collect();
    CliffordElement::from_terms(form.clone(), terms).unwrap()
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0u64;
    let forms = [
        (q(), vec![(2, 0), (1, 0), (-3, 0), (5, 0), (1, 0), (7, 0)]),
        (q2(), vec![(0, 1), (1, 0), (1, 1), (-2, 3), (3, 0), (1, -1)]),
    ];
    for (field, raw) in &forms {
        for n in 1..=5usize {
            let coeffs: Vec<IntegerRingElement> =
                raw[..=n].iter().map(|&(a, b)| IntegerRingElement::from_ints(*field, a, b).unwrap()).collect();
            let plain: Vec<FieldElement> = coeffs.iter().map(|c| c.as_element().clone()).collect();
            let form = DiagonalForm::new(*field, coeffs).map_err(|e| e.to_string())?;
            let full: Mask = (1 << (n + 1)) - 1;
            for m in 0..=full {
                for k in 0..=full {
                    let got = basis_mul(m, k, &form).map_err(|e| e.to_string())?;
                    ensure(got == word_product(m, k, &plain), || format!("basis_mul({m:b},{k:b}) over {field}, n={n}"))?;
                    pairs += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (field, raw) in &forms {
        let coeffs: Vec<IntegerRingElement> =
            raw[..4].iter().map(|&(a, b)| IntegerRingElement::from_ints(*field, a, b).unwrap()).collect();
        let form = Arc::new(DiagonalForm::new(*field, coeffs).unwrap());
        for _ in 0..5_000 {
            let (x, y, z) = (random_element(&mut rng, &form), random_element(&mut rng, &form), random_element(&mut rng, &form));
            let xy = cliff_mul(&x, &y).unwrap();
            let lhs = cliff_mul(&xy, &z).unwrap();
            let rhs = cliff_mul(&x, &cliff_mul(&y, &z).unwrap()).unwrap();
            ensure(lhs == rhs, || "associativity".into())?;
            ensure(star(&xy) == cliff_mul(&star(&y), &star(&x)).unwrap(), || "star reversal".into())?;
            ensure(star(&star(&x)) == x, || "star involution".into())?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("{pairs} mask pairs, 10^4 triples, {:.2}s", t.as_secs_f64()))
}

fn c2() -> Outcome {
    let form = Arc::new(DiagonalForm::standard(q(), 2).unwrap());
    let terms = [(0, 3), (0b011, 2), (0b101, 2)].map(|(m, c)| (m as Mask, FieldElement::from_int(q(), c)));
    let x = CliffordElement::from_terms(form, terms).unwrap();
    ensure(is_spin(&x).is_spin(), || "fixture is not spin".into())?;
    let s = SpinElement::new(x).unwrap();
    let two = IntegerRingElement::from_int(q(), 2);
    ensure(in_gamma_alpha(&s, &two).unwrap(), || "not in Γ(2)".into())?;
    let z = realpart_residue(&s, &two).map_err(|e| e.to_string())?;
    ensure(z == IntegerRingElement::from_int(q(), 1), || format!("ζ = {z}"))?;
    let l = length_lower_bound(3.0);
    ensure((l - 2.0 * 3f64.acosh()).abs() <= 1e-12, || format!("length bound {l}"))?;
    Ok(format!("ζ = 1, length bound {l:.12}"))
}

fn c3() -> Outcome {
    let start = Instant::now();
    for (f, a, b) in [(q(), 2, 0), (q(), 5, 0), (q2(), 2, 1), (q2(), 3, 2)] {
        let x0 = FieldElement::from_ints(f, a, b).unwrap();
        let sq = SalemQuartic::from_x0(IntegerRingElement::new(x0.clone()).unwrap()).map_err(|e| e.to_string())?;
        let d = sq.D().as_element().clone();
        // s^{n+1} = (x₀ + √D)^{n+1} as pairs (t, u) in k × k
        let (mut t, mut u) = (x0.clone(), FieldElement::one(f));
        for n in 0..=50u32 {
            let (rt, ru) = salem_power(&sq, n);
            ensure(rt.as_element() == &t && ru.as_element() == &u, || format!("power {n} over {f}"))?;
            (t, u) = (&(&t * &x0) + &(&u * &d), &(&t * &FieldElement::one(f)) + &(&u * &x0));
        }
    }
    for x in [10i64, 100, 1000] {
        let sq = SalemQuartic::from_x0(IntegerRingElement::from_int(q(), x)).unwrap();
        for n in 1..=50u32 {
            let (t, u) = salem_power(&sq, n);
            let t = t.as_element().to_f64().unwrap();
            let u = u.as_element().to_f64().unwrap();
            let lead_t = 2f64.powi(n as i32) * (x as f64).powi(n as i32 + 1);
            let lead_u = 2f64.powi(n as i32) * (x as f64).powi(n as i32);
            let tol = 2.0 * n as f64 / x as f64;
            ensure((t / lead_t - 1.0).abs() <= tol && (u / lead_u - 1.0).abs() <= tol, || format!("x0 = {x}, n = {n}"))?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("n ≤ 50 exact, ratios within 2n/x0, {:.2}s", t.as_secs_f64()))
}

fn c4() -> Outcome {
    let sq = SalemQuartic::from_x0(IntegerRingElement::from_int(q(), 2)).unwrap();
    let cert = level_from_salem(&sq).map_err(|e| e.to_string())?;
    ensure(cert.l == 2, || format!("l = {}", cert.l))?;
    ensure(cert.alpha == IntegerRingElement::from_int(q(), 15), || format!("α = {}", cert.alpha))?;
    let f3 = FieldDescriptor::quadratic(3).unwrap();
    let lam = FieldElement::from_ints(f3, 2, 1).unwrap();
    let cube = &(&lam * &lam) * &lam;
    ensure(cube.irrational_part() == &num_rational::BigRational::from_integer(15.into()), || format!("λ³ = {cube}"))?;
    let c = certify_surface_systole(&sq, 1).map_err(|e| e.to_string())?;
    ensure(c.certified, || "not certified".into())?;
    let mut logged = Vec::new();
    for name in ["gamma_alpha_real_part", "coset_real_part"] {
        let k = c.check(name).ok_or_else(|| format!("missing check {name}"))?;
        ensure(k.holds, || format!("{name} fails"))?;
        logged.push(format!("{} {} {}", k.lhs, k.relation, k.rhs));
    }
    ensure(logged == ["223/2 >= 26", "225/2 >= 52"], || format!("{logged:?}"))?;
    Ok(format!("l = 2, α = 15, λ³ = {cube}, {}", logged.join(", ")))
}

fn c5() -> Outcome {
    let n = 10_000;
    let (mut checked, mut excluded) = (0, 0);
    for j in 1..=n {
        let nu = PI * j as f64 / (n + 1) as f64;
        if EXCLUDED_ANGLES.iter().any(|&a| (nu - a).abs() < 1e-12) {
            excluded += 1;
            continue;
        }
        let ok = (1..=3).any(|k| (2.0 * k as f64 * nu).cos() > 0.0);
        ensure(ok, || format!("ν = {nu} uncovered"))?;
        let s = covering_set(nu).ok_or_else(|| format!("ν = {nu} in no S_j"))?;
        ensure((2.0 * s as f64 * nu).cos() > 0.0, || format!("S_{s} does not witness ν = {nu}"))?;
        checked += 1;
    }
    Ok(format!("{checked} angles covered, {excluded} excluded, 0 failures"))
}

fn c6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut n, mut arg_pairs, mut worst) = (0, 0, 0f64);
    while n < 10_000 {
        let t = Complex64::new(rng.gen_range(-100.0..=100.0), rng.gen_range(-100.0..=100.0));
        if t.im == 0.0 && t.re.abs() <= 2.0 {
            continue;
        }
        n += 1;
        let inv = invariants_of(t);
        let (l, r) = trace_identity_sides(t, inv.length);
        worst = worst.max((l - r).abs() / r);
        ensure(rel_close(l, r, 1e-12), || format!("trace identity at {t}: {l} vs {r}"))?;
        let lam = eigenvalue_of(t);
        ensure((lam + lam.inv() - t).norm() <= 1e-12 * t.norm(), || format!("T(λ) ≠ t at {t}"))?;
        if let Ok((a, b)) = arg_tan_relation(lam) {
            ensure(rel_close(a, b, 1e-12), || format!("arg-tan at λ = {lam}: {a} vs {b}"))?;
            arg_pairs += 1;
        }
    }
    Ok(format!("{n} traces, {arg_pairs} arg-tan pairs, worst relative gap {worst:.1e}"))
}

fn c7() -> Outcome {
    let start = Instant::now();
    let exec = ExecPolicy::with_workers(4).unwrap();
    let mut total = 0;
    for level in [IntegerRingElement::from_ints(qi(), 1, 1).unwrap(), IntegerRingElement::from_int(qi(), 2)] {
        for h in 1..=6 {
            let els = enumerate_sl2(qi(), h, Some(&level), &exec).map_err(|e| e.to_string())?;
            for g in &els {
                trace_mod_level(g, &level).map_err(|e| format!("level {level}, height {h}: {e}"))?;
            }
            total += els.len();
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("{total} congruence elements, 0 exceptions, {:.2}s", t.as_secs_f64()))
}

fn c8() -> Outcome {
    let minus_one = Complex64::new(-1.0, 0.0);
    let mut count = 0;
    for p in [1.5, 2.0, 10.0, 100.0, 1000.0] {
        for k in -150..=150 {
            let phi = k as f64 * 0.01;
            let h = h_function_sides(p, minus_one, phi).map_err(|e| e.to_string())?;
            let scale = (p + 6.0) * (p + 6.0);
            ensure(h.definition.abs() <= 1e-12 * scale && h.closed_form.abs() <= 1e-12 * scale, || {
                format!("h(P={p}, -1, φ={phi}) = {h:?}")
            })?;
            count += 1;
        }
    }
    for zeta in unit_set_j().into_iter().filter(|z| (z - minus_one).norm() > 1e-9) {
        for p in [2.0, 10.0, 100.0] {
            for k in 1..500 {
                let phi = (k as f64 * 1e-3).atan();
                let h = h_function_sides(p, zeta, phi).map_err(|e| e.to_string())?;
                ensure(h.closed_form > 0.0 && h.definition > 0.0, || format!("h(P={p}, {zeta}, φ={phi}) ≤ 0"))?;
                ensure(rel_close(h.definition, h.closed_form, 1e-12), || format!("forms differ at P={p}, {zeta}, φ={phi}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} grid points"))
}

fn c9() -> Outcome {
    let params = SquareSystoleParams::default();
    let n0 = 264u64 * 264;
    let q = CensusQuery {
        min_norm: n0,
        strategy: Strategy::TraceDriven,
        ..CensusQuery::new(qi(), n0 + 10, 0.0, params.epsilon, 140)
    };
    let report = trace_census(&q, &ExecPolicy::with_workers(4).unwrap()).map_err(|e| e.to_string())?;
    let mut certified = Vec::new();
    for r in &report.records {
        let c = certify_square_systole(&NormalizedTrace::new(r.trace.clone()).unwrap(), &params).map_err(|e| e.to_string())?;
        if c.certified {
            certified.push(r);
        }
    }
    let rec = certified
        .iter()
        .min_by_key(|r| (!r.trace.is_rational(), r.norm))
        .ok_or_else(|| format!("no certified trace among {} census records", report.records.len()))?;
    let order = QuadOrder::imaginary(qi()).unwrap();
    let t = order.from_field(&rec.trace).unwrap();
    let h = (order.norm(t) / 2) as u64;
    let ball = congruence_ball(&order, t, h, &ExecPolicy::with_workers(4).unwrap()).map_err(|e| e.to_string())?;
    let target = 2.0 * rec.length - 1e-9;
    let mut lox = 0;
    let mut shortest = f64::INFINITY;
    for g in &ball {
        if classify_quad(g.trace()) != ElementType::Loxodromic {
            continue;
        }
        lox += 1;
        let l = invariants_of(order.to_complex(g.trace())).length;
        shortest = shortest.min(l);
        ensure(l >= target, || format!("η with trace {:?} has ℓ = {l} < 2ℓ(t) = {}", g.trace(), 2.0 * rec.length))?;
    }
    ensure(lox >= 1000, || format!("only {lox} loxodromic elements in the ball"))?;
    Ok(format!(
        "t = {} (ℓ = {:.6}, {} certified of {}), ball height {h}: {} elements, {lox} loxodromic, min ℓ = {shortest:.9} ≥ 2ℓ(t) = {:.9}",
        rec.trace,
        rec.length,
        certified.len(),
        report.records.len(),
        ball.len(),
        2.0 * rec.length
    ))
}

fn c10() -> Outcome {
    for (r, want) in [(1.0, 5), (2.0, 13), (5.0, 81)] {
        let got = lattice_count(qi(), r).unwrap();
        ensure(got == want, || format!("R = {r}: {got} ≠ {want}"))?;
    }
    let mut out = Vec::new();
    for r in [10.0, 20.0, 40.0] {
        let c = lattice_count(qi(), r).unwrap();
        let gap = (c as f64 / (r * r) - PI).abs();
        ensure(gap <= 4.0 / r, || format!("R = {r}: |count/R² − π| = {gap}"))?;
        out.push(format!("R={r}:{c}"));
    }
    Ok(format!("5, 13, 81 exact; {}", out.join(" ")))
}

/// Saturating height: every `t` with `|t|² ≤ 100` has height at most 10
/// and is the trace of `[[t, −1], [1, 0]]`.
const GROWTH_HEIGHT: u64 = 10;

fn c11() -> Outcome {
    let rows = growth_table(qi(), &[25, 50, 100], 0.0, 2.0 * PI, GROWTH_HEIGHT, &ExecPolicy::with_workers(4).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(rows.windows(2).all(|w| w[0].tau_hat <= w[1].tau_hat), || "tau_hat decreases".into())?;
    // at saturation τ̂ counts every normalised loxodromic lattice point
    for r in &rows {
        let points = lattice_count(qi(), (r.n as f64).sqrt()).unwrap();
        let expect = (points - 1) / 2 + 1 - 3;
        ensure(r.tau_hat == expect, || format!("N = {}: tau_hat {} ≠ {expect}", r.n, r.tau_hat))?;
    }
    let csv = growth_csv(&rows).map_err(|e| e.to_string())?;
    let golden = include_str!("golden/growth_qi.csv");
    ensure(csv == golden, || format!("growth table differs from golden:\n{csv}"))?;
    let trend: Vec<String> = rows.iter().map(|r| format!("N={}:mu={}", r.n, r.mu_hat.as_deref().unwrap_or("-"))).collect();
    Ok(format!("tau_hat non-decreasing, golden match, {}", trend.join(" ")))
}

fn c12() -> Outcome {
    let mut outputs = Vec::new();
    for strategy in [Strategy::Box, Strategy::TraceDriven] {
        let q = CensusQuery { strategy, ..CensusQuery::new(qi(), 60, 0.0, 2.0 * PI, 4) };
        let mut seen = Vec::new();
        for workers in [1, 4, 1, 4] {
            let r = trace_census(&q, &ExecPolicy::with_workers(workers).unwrap()).map_err(|e| e.to_string())?;
            seen.push(census_csv(&r).map_err(|e| e.to_string())?);
        }
        ensure(seen.windows(2).all(|w| w[0] == w[1]), || format!("{strategy:?} output depends on the run"))?;
        outputs.push(seen.pop().unwrap());
    }
    ensure(outputs[0] == outputs[1], || "box and trace-driven routes disagree".into())?;
    Ok(format!("{} bytes identical across workers 1/4 and both routes", outputs[0].len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("C1 clifford axioms", c1),
        ("C2 spin fixture", c2),
        ("C3 salem powers", c3),
        ("C4 level certification", c4),
        ("C5 angle covering", c5),
        ("C6 trace-length identity", c6),
        ("C7 trace mod level", c7),
        ("C8 h-function", c8),
        ("C9 square systole", c9),
        ("C10 gauss circle", c10),
        ("C11 growth table", c11),
        ("C12 determinism", c12),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed.push(name);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
