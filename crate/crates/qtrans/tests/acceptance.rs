//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qtrans --test acceptance -- --nocapture`.
//! Criteria known to fail are listed in `KNOWN_FAILURES`; the test itself
//! fails if any other criterion fails or a known failure starts passing.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use qtrans_core::arith::{int, p_power, rat, residue_valuation};
use qtrans_core::fq_oracle::{estimate_dimension, DEFAULT_BUDGET, DEFAULT_PRIMES};
use qtrans_core::groebner::{groebner_basis, krull_dimension, radical_membership, syzygy_basis};
use qtrans_core::morphism::{
    b_phi_ideal, dagger_pullback, fiber_ideal, generic_fiber_dimension, kernel_vector_fields, qt_check_at,
};
use qtrans_core::padic::{
    coarsen, convolve, direction_balls, direction_germ_count, fourier, fourier_at, germ_rank_schedule, haar_ball,
    mu_n, psi_ball_pushforward, pushforward, self_convolutions, support_germs, IntegerPolyMap, LevelMeasure,
    QuotientWindow,
};
use qtrans_core::poly::rational_rank;
use qtrans_core::stratify::{coarse_and_vertical_audit, functorial_stratify, rank_stratification, validate_stratification};
use qtrans_core::{Ideal, MonomialOrder, PolyRing, Polynomial, PolynomialMorphism, Rational, Verdict};

/// Criterion 5 compares against a closed form that disagrees with the exact
/// integral for `n ≥ 1`; see the detail line it prints.
const KNOWN_FAILURES: &[u32] = &[5];

const LIMIT_VERDICT: Duration = Duration::from_secs(120);
const LIMIT_BLOWUP: Duration = Duration::from_secs(60);
const LIMIT_FOURIER: Duration = Duration::from_secs(300);
const PROPERTY_CASES: u32 = 200;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

type Check = Result<(bool, String), String>;

fn morph(vars: &[&str], comps: &[&str]) -> PolynomialMorphism {
    PolynomialMorphism::parse(vars, comps).expect("catalogued map parses")
}

fn four_lines() -> PolynomialMorphism {
    morph(&["x", "y", "z"], &["x*y*(x+y)*(x+y*z)"])
}

fn cubic() -> PolynomialMorphism {
    morph(&["x", "y", "z"], &["x^2*y*(x+y)"])
}

fn psi() -> PolynomialMorphism {
    morph(&["x", "y", "z", "w"], &["x+z", "x*y+z*w"])
}

fn blowup() -> PolynomialMorphism {
    morph(&["x", "y"], &["x", "x*y"])
}

fn e<E: std::fmt::Debug>(err: E) -> String {
    format!("{err:?}")
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let (ok, detail) = f()?;
    let took = start.elapsed();
    Ok((ok && took <= limit, format!("{detail}; {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs())))
}

fn c1() -> Check {
    timed(LIMIT_VERDICT, || {
        let r = qt_check_at(&four_lines(), &[int(0)]).map_err(e)?;
        let ok = r.fiber_dimension == 4 && r.verdict == Verdict::NotQuasiTransitiveAtFiber;
        Ok((ok, format!("fiber dimension {} ({})", r.fiber_dimension, r.verdict.as_str())))
    })
}

fn c2() -> Check {
    timed(LIMIT_VERDICT, || {
        let g = cubic();
        let r = qt_check_at(&g, &[int(0)]).map_err(e)?;
        let generic = generic_fiber_dimension(&g).map_err(e)?;
        let ok = r.fiber_dimension == 3 && r.verdict == Verdict::QuasiTransitiveAtFiber && generic <= 3;
        Ok((ok, format!("fiber dimension {} ({}), generic {generic}", r.fiber_dimension, r.verdict.as_str())))
    })
}

fn c3() -> Check {
    let psi = psi();
    let ring = psi.ring();
    let p = |s: &str| Polynomial::parse(s, ring).expect("field component parses");
    let v = vec![
        vec![p("-x"), p("y-w"), p("x"), p("0")],
        vec![p("-z"), p("0"), p("z"), p("y-w")],
        vec![p("0"), p("-z"), p("0"), p("x")],
    ];
    let same = kernel_vector_fields(&psi).map_err(e)?.same_module(&v).map_err(e)?;
    let y = [int(0), int(0)];
    let r = qt_check_at(&psi, &y).map_err(e)?;
    let est = estimate_dimension(&fiber_ideal(&psi, &y).map_err(e)?, &DEFAULT_PRIMES, DEFAULT_BUDGET).map_err(e)?;
    let ok = same
        && r.fiber_dimension == 5
        && r.verdict == Verdict::NotQuasiTransitiveAtFiber
        && est.consistent
        && est.estimate == 5;
    Ok((
        ok,
        format!(
            "kernel = <v1,v2,v3>: {same}; fiber dimension {} ({}); oracle slope {:.3} -> {}",
            r.fiber_dimension,
            r.verdict.as_str(),
            est.slope.unwrap_or(f64::NAN),
            est.estimate
        ),
    ))
}

fn c4() -> Check {
    timed(LIMIT_BLOWUP, || {
        let r = qt_check_at(&blowup(), &[int(0), int(0)]).map_err(e)?;
        let mut ok = r.fiber_dimension == 3 && r.verdict == Verdict::NotQuasiTransitiveAtFiber;
        let mut parts = vec![format!("fiber dimension {}", r.fiber_dimension)];
        for p in [2u64, 3, 5] {
            let direct = support_germs(&direction_balls(p, 3, 1).map_err(e)?, 1).map_err(e)?;
            let low = direction_germ_count(p, 2).map_err(e)?;
            let high = direction_germ_count(p, 4).map_err(e)?;
            ok &= direct >= p as usize && high > low;
            parts.push(format!("p={p}: {direct} germs from {p} balls, {low} -> {high} from level 2 to 4"));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// `v_p(j / p^k)`, `None` for zero.
fn dual_valuation(j: u64, p: u64, k: u32) -> Option<i64> {
    (j != 0).then(|| residue_valuation(j, p, k) as i64 - k as i64)
}

fn abs_value(p: u64, v: Option<i64>) -> Rational {
    v.map_or(int(0), |v| p_power(p, -v))
}

/// `p^{-2n}/max(|b|,1)` if `|a| ≤ p^n max(|b|,1)`, else `0`.
fn stated_closed_form(p: u64, n: u32, a: &Rational, b: &Rational) -> Rational {
    let m = b.clone().max(int(1));
    if *a > p_power(p, n as i64) * &m {
        int(0)
    } else {
        p_power(p, -2 * n as i64) / m
    }
}

/// The integral evaluated directly: `y` over `p^n Z_p` gives `p^{-n}` on
/// `|bx| ≤ p^n`, leaving `x` in the ball of radius `min(p^{-n}, p^n/|b|)`.
fn direct_integral(p: u64, n: u32, a: &Rational, b: &Rational) -> Rational {
    let n = n as i64;
    let r = if *b <= p_power(p, 2 * n) { p_power(p, -n) } else { p_power(p, n) / b };
    if a * &r > int(1) {
        int(0)
    } else {
        p_power(p, -n) * r
    }
}

fn c5() -> Check {
    timed(LIMIT_FOURIER, || {
        let mut ok = true;
        let mut parts = Vec::new();
        let mut direct_ok = true;
        for p in [2u64, 3] {
            for n in 0..=2u32 {
                let k = n + 2;
                let mu = mu_n(p, n, k).map_err(e)?;
                let grid = fourier(&mu).map_err(e)?;
                let mut mismatches = 0usize;
                for (j, c) in &grid {
                    let value = c.as_rational().map_err(e)?;
                    let a = abs_value(p, dual_valuation(j[0], p, k));
                    let b = abs_value(p, dual_valuation(j[1], p, k));
                    if value != stated_closed_form(p, n, &a, &b) {
                        mismatches += 1;
                    }
                    direct_ok &= value == direct_integral(p, n, &a, &b);
                }
                ok &= mismatches == 0;
                parts.push(format!("p={p} n={n}: {mismatches}/{} off", grid.len()));
            }
        }
        parts.push(format!("direct integral agrees everywhere: {direct_ok}"));
        Ok((ok, parts.join(", ")))
    })
}

fn c6() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2u64, 3] {
        for n in 0..=1u32 {
            let k = n + 2;
            let lhs = psi_ball_pushforward(p, n, k).map_err(e)?;
            let m = mu_n(p, n, k).map_err(e)?;
            let same = lhs == convolve(&m, &m).map_err(e)?;
            ok &= same;
            parts.push(format!("p={p} n={n}: {same}"));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn c7() -> Check {
    let schedule = germ_rank_schedule(|k| self_convolutions(2, 5, k), 1, 4, 8).map_err(e)?;
    let stable = schedule.len() >= 2 && schedule[schedule.len() - 1].1 == schedule[schedule.len() - 2].1;
    let last = schedule.last().map_or(0, |s| s.1);
    let trail: Vec<String> = schedule.iter().map(|(k, r)| format!("k={k}:{r}")).collect();
    Ok((stable && last == 5, format!("ranks {}", trail.join(" "))))
}

fn radical_equal(a: &Ideal, b: &Ideal) -> Result<bool, String> {
    for g in a.gens() {
        if !radical_membership(g, b).map_err(e)? {
            return Ok(false);
        }
    }
    for g in b.gens() {
        if !radical_membership(g, a).map_err(e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn c8() -> Check {
    let pairs = [
        (morph(&["x", "y"], &["x*y"]), morph(&["x", "y", "t"], &["x", "y"]), vec![int(0)]),
        (morph(&["x", "y"], &["x^2*y*(x+y)"]), morph(&["x", "t", "y"], &["x", "y"]), vec![int(0)]),
        (blowup(), morph(&["x", "y", "t"], &["x", "y"]), vec![int(0), int(0)]),
        (four_lines(), morph(&["x", "y", "z", "t"], &["x", "y", "z"]), vec![int(0)]),
        (morph(&["x", "y"], &["x^2 - y^3"]), morph(&["s", "x", "y", "t"], &["x", "y"]), vec![int(1)]),
    ];
    let mut ok = true;
    for (phi, pr, y) in &pairs {
        let composed = phi.compose(pr).map_err(e)?;
        let direct = b_phi_ideal(&composed).map_err(e)?.into_ideal();
        let w = b_phi_ideal(phi).map_err(e)?.into_ideal();
        let pulled = dagger_pullback(pr, &w).map_err(e)?;
        let shift = (pr.source_dim() - pr.target_dim()) as i64;
        ok &= radical_equal(&direct, &pulled)?;
        ok &= krull_dimension(&pulled).map_err(e)? == krull_dimension(&w).map_err(e)? + shift;
        ok &= qt_check_at(phi, y).map_err(e)?.verdict == qt_check_at(&composed, y).map_err(e)?.verdict;
    }
    Ok((ok, format!("{} catalogued pairs", pairs.len())))
}

fn c9() -> Check {
    let xy = morph(&["x", "y"], &["x*y"]);
    let s = functorial_stratify(&xy).map_err(e)?;
    let valid = validate_stratification(&s.source).map_err(e)?.is_valid()
        && validate_stratification(&s.target).map_err(e)?.is_valid();
    let audit = coarse_and_vertical_audit(&xy, &s.source, &[int(0)]).map_err(e)?;
    let f = four_lines();
    let d = rank_stratification(&f).map_err(e)?;
    let lines = coarse_and_vertical_audit(&f, &d, &[int(0)]).map_err(e)?;
    let ok = valid && audit.strong_thom == Some(true) && lines.vertically_extendable == Some(false);
    Ok((
        ok,
        format!(
            "xy valid {valid}, strongThom {:?}; 4-lines verticallyExtendable {:?}",
            audit.strong_thom, lines.vertically_extendable
        ),
    ))
}

fn c10() -> Check {
    let mut suite: Vec<(String, Ideal)> = Vec::new();
    for (name, phi, y) in [
        ("4-lines fiber", four_lines(), vec![int(0)]),
        ("cubic fiber", cubic(), vec![int(0)]),
        ("psi fiber", psi(), vec![int(0), int(0)]),
        ("blowup fiber", blowup(), vec![int(0), int(0)]),
    ] {
        suite.push((name.to_string(), fiber_ideal(&phi, &y).map_err(e)?));
    }
    let plain: [(&[&str], &[&str]); 8] = [
        (&["x", "y", "z"], &["y - x^2", "z - x^3"]),
        (&["x", "y", "z"], &["x*y", "x*z"]),
        (&["x", "y", "z"], &["x - 1", "y - 2", "z"]),
        (&["x", "y"], &["x^2 - y^3"]),
        (&["x", "y", "z", "w"], &["x*y*z"]),
        (&["x", "y"], &["1"]),
        (&["a", "b", "c", "d", "e", "f"], &["a*e - b*d", "a*f - c*d", "b*f - c*e"]),
        (&["x", "y", "z"], &["x^2 + y^2 - z^2"]),
    ];
    for (vars, gens) in plain {
        let ring = PolyRing::new(vars).map_err(e)?;
        suite.push((gens.join(", "), Ideal::parse(&ring, gens).map_err(e)?));
    }
    let mut disagreements = Vec::new();
    for (name, ideal) in &suite {
        let exact = krull_dimension(ideal).map_err(e)?;
        let est = estimate_dimension(ideal, &DEFAULT_PRIMES, DEFAULT_BUDGET).map_err(e)?;
        if !est.consistent || est.estimate != exact {
            disagreements.push(format!("{name}: exact {exact}, oracle {}", est.estimate));
        }
    }
    let ok = suite.len() >= 10 && disagreements.is_empty();
    Ok((ok, format!("{} ideals, disagreements: [{}]", suite.len(), disagreements.join("; "))))
}

fn small_poly(ring: std::sync::Arc<PolyRing>, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let n = ring.nvars();
    prop::collection::vec((prop::collection::vec(0..=max_deg, n), -3i64..4), 1..4).prop_map(move |terms| {
        let terms = terms.into_iter().filter(|(m, _)| m.iter().sum::<u32>() <= max_deg).map(|(m, c)| (m, int(c))).collect();
        Polynomial::from_terms(&ring, terms)
    })
}

fn small_measure(p: u64, k: u32, d: usize) -> impl Strategy<Value = LevelMeasure> {
    let q = p.pow(k) as i64;
    prop::collection::vec((prop::collection::vec(0..q, d), -5i64..6, 1i64..4), 0..6).prop_map(move |vals| {
        let w = QuotientWindow::new(p, k, d).expect("small window");
        LevelMeasure::from_values(w, vals.into_iter().map(|(x, a, b)| (x, rat(a, b))).collect()).expect("values in window")
    })
}

fn run_property<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|err| format!("{name}: {err}"))
}

fn c11() -> Check {
    let ring = PolyRing::new(&["x", "y", "z"]).map_err(e)?;
    let r = ring.clone();
    let mut failures = Vec::new();
    let mut record = |res: Result<(), String>| {
        if let Err(msg) = res {
            failures.push(msg);
        }
    };

    record(run_property(
        "groebner determinism and criterion",
        prop::collection::vec(small_poly(ring.clone(), 2), 1..4),
        |gens| {
            let gb = groebner_basis(&Ideal::new(&r, gens.clone()).unwrap(), &MonomialOrder::Grevlex).unwrap();
            let mut rev = gens;
            rev.reverse();
            let gb2 = groebner_basis(&Ideal::new(&r, rev).unwrap(), &MonomialOrder::Grevlex).unwrap();
            prop_assert_eq!(gb.polynomials(), gb2.polynomials());
            let n = gb.polynomials().len();
            for i in 0..n {
                for j in i + 1..n {
                    prop_assert!(gb.s_polynomial_remainder(i, j).unwrap().is_zero());
                }
            }
            Ok(())
        },
    ));

    record(run_property(
        "syzygy soundness",
        prop::collection::vec(prop::collection::vec(small_poly(ring.clone(), 2), 2), 2..4),
        |cols| {
            for s in syzygy_basis(&r, &cols).unwrap().generators() {
                for row in 0..2 {
                    let total = s.iter().zip(&cols).fold(Polynomial::zero(&r), |acc, (a, c)| acc.add(&a.mul(&c[row])));
                    prop_assert!(total.is_zero());
                }
            }
            Ok(())
        },
    ));

    record(run_property(
        "annihilator law",
        (small_poly(ring.clone(), 3), prop::collection::vec((-9i64..10, 1i64..5), 3)),
        |(f, pt)| {
            let phi = PolynomialMorphism::new(&r, vec![f]).unwrap();
            let b = b_phi_ideal(&phi).unwrap();
            let point: Vec<Rational> = pt.iter().map(|&(a, d)| rat(a, d)).collect();
            let mut cot_point = point.clone();
            cot_point.extend([int(0), int(0), int(0)]);
            let ideal_rows: Vec<Vec<Rational>> = b
                .ideal()
                .gens()
                .iter()
                .map(|g| (3..6).map(|j| g.coefficient_of(j).evaluate(&cot_point)).collect())
                .collect();
            let field_rows: Vec<Vec<Rational>> =
                b.fields().generators().iter().map(|v| v.iter().map(|c| c.evaluate(&point)).collect()).collect();
            let r1 = rational_rank(ideal_rows.clone());
            prop_assert_eq!(r1, rational_rank(field_rows.clone()));
            prop_assert_eq!(r1, rational_rank(ideal_rows.into_iter().chain(field_rows).collect()));
            Ok(())
        },
    ));

    let chart = IntegerPolyMap::blowup_chart();
    record(run_property("mass conservation", small_measure(3, 2, 2), |mu| {
        prop_assert_eq!(pushforward(&mu, &chart).unwrap().total_mass(), mu.total_mass());
        Ok(())
    }));

    record(run_property(
        "fourier-convolution duality",
        (small_measure(2, 2, 2), small_measure(2, 2, 2), prop::collection::vec(0u64..4, 2)),
        |(mu, nu, j)| {
            let lhs = fourier_at(&convolve(&mu, &nu).unwrap(), &j).unwrap();
            let rhs = fourier_at(&mu, &j).unwrap().mul(&fourier_at(&nu, &j).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    ));

    record(run_property(
        "level refinement",
        (prop::sample::select(vec![2u64, 3]), 1u32..3, 0u32..3, prop::collection::vec(-9i64..9, 2)),
        |(p, k, m, center)| {
            let m = m.min(k);
            let fine = pushforward(&haar_ball(p, k + 1, 2, &center, m, int(1)).unwrap(), &chart).unwrap();
            let coarse = pushforward(&haar_ball(p, k, 2, &center, m, int(1)).unwrap(), &chart).unwrap();
            prop_assert_eq!(coarsen(&fine, k).unwrap(), coarse);
            Ok(())
        },
    ));

    Ok((failures.is_empty(), format!("6 suites x {PROPERTY_CASES} cases; failures: [{}]", failures.join("; "))))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &'static str, fn() -> Check); 11] = [
        (1, "4-lines verdict", c1),
        (2, "cubic verdict", c2),
        (3, "psi kernel and fiber", c3),
        (4, "blowup chart and support germs", c4),
        (5, "Fourier closed form", c5),
        (6, "convolution identity", c6),
        (7, "germ independence", c7),
        (8, "pullback and descent laws", c8),
        (9, "stratification audit", c9),
        (10, "oracle concordance", c10),
        (11, "property suites", c11),
    ];
    let mut outcomes = Vec::new();
    for (id, name, check) in criteria {
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(err) => (false, format!("error: {err}")),
        };
        let o = Outcome { id, name, pass, detail };
        println!("{} [{}] {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
        outcomes.push(o);
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("{} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    assert_eq!(failed, KNOWN_FAILURES, "failing criteria differ from the recorded known failures");
}
