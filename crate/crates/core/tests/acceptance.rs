//! One PASS/FAIL line per acceptance criterion, printed to stderr.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use jetred::algebra::{rational, LaurentPolynomial, PolyRing, Rational, TruncatedSeries};
use jetred::extraction::jet2_of;
use jetred::extraction::jet2_of_composed;
use jetred::minkowski::ScalarJet2;
use jetred::mobius::{canonical_projection, stabilizer_action, MobiusStabilizer};
use jetred::reduction::{d1_closed, d2_closed, d3_closed, dn_closed, invariant_report, relative_gap, trace_invariants};
use jetred::verify::{
    random_full_group_case, random_timelike_jet, relative_residual, run_check, run_named_check, Sample, SuiteConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const SEED: u64 = 20_240_611;

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn config(trials: usize, tol: f64, dim: usize) -> SuiteConfig {
    SuiteConfig { trials, seed: SEED, tol: Some(tol), dim }
}

fn named(name: &str, trials: usize, tol: f64, dim: usize) -> Outcome {
    let (summary, failures) = run_named_check(name, &config(trials, tol, dim)).expect("known check");
    outcome(
        failures.is_empty() && summary.trials == trials,
        format!(
            "{name} n={dim}: {} trials, {} failures, {} rejected, max residual {:.3e} (tol {tol:e})",
            summary.trials,
            failures.len(),
            summary.rejected,
            summary.max_residual
        ),
    )
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let pass = parts.iter().all(|o| o.pass);
    let detail = parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join("; ");
    outcome(pass, detail)
}

fn timed(limit: Duration, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let inner = body();
    let elapsed = start.elapsed();
    outcome(inner.pass && elapsed < limit, format!("{} [{elapsed:.2?} < {limit:?}]", inner.detail))
}

/// Ring of the generic k-jet together with the stabilizer parameters.
fn jet_and_group_ring(k: usize) -> PolyRing {
    let mut symbols: Vec<(String, bool)> = (1..=k).map(|l| (format!("u{l}"), l == 1)).collect();
    symbols.push(("a".into(), true));
    symbols.push(("c".into(), false));
    PolyRing::new(symbols)
}

fn term(ring: &PolyRing, coefficient: Rational, exponents: &[i32]) -> LaurentPolynomial {
    ring.monomial(coefficient, exponents).expect("valid monomial")
}

fn symbolic_reproduction() -> Outcome {
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_jetred")).args(["mobius-symbolic", "--order", "5"]).output();
    let elapsed = start.elapsed();
    let Ok(output) = output else { return outcome(false, "could not run the binary") };
    let text = String::from_utf8_lossy(&output.stdout);
    let expected = "w3 = u1^-3*u3 - 3/2*u1^-4*u2^2\n\
                    w4 = u1^-4*u4 - 6*u1^-5*u2*u3 + 6*u1^-6*u2^3\n\
                    w5 = u1^-5*u5 - 10*u1^-6*u2*u4 + 30*u1^-7*u2^2*u3 - 45/2*u1^-8*u2^4\n";

    // Exact structural comparison, independent of printing.
    let family = jetred::mobius::symbolic_invariants(5).expect("order 5");
    let ring = family.ring().clone();
    let r = |p, q| rational(p, q);
    let sum = |terms: Vec<LaurentPolynomial>| {
        terms.into_iter().fold(ring.zero(), |acc, t| acc.checked_add(&t).expect("same ring"))
    };
    let w3 = sum(vec![term(&ring, r(1, 1), &[-3, 0, 1, 0, 0]), term(&ring, r(-3, 2), &[-4, 2, 0, 0, 0])]);
    let w4 = sum(vec![
        term(&ring, r(1, 1), &[-4, 0, 0, 1, 0]),
        term(&ring, r(-6, 1), &[-5, 1, 1, 0, 0]),
        term(&ring, r(6, 1), &[-6, 3, 0, 0, 0]),
    ]);
    let w5 = sum(vec![
        term(&ring, r(1, 1), &[-5, 0, 0, 0, 1]),
        term(&ring, r(-10, 1), &[-6, 1, 0, 1, 0]),
        term(&ring, r(30, 1), &[-7, 2, 1, 0, 0]),
        term(&ring, r(-45, 2), &[-8, 4, 0, 0, 0]),
    ]);
    let exact = family.symbols() == [w3, w4, w5];
    let limit = Duration::from_secs(1);
    outcome(
        output.status.success() && text == expected && exact && elapsed < limit,
        format!("printed and structural w3..w5 match: {} [{elapsed:.2?} < {limit:?}]", text == expected && exact),
    )
}

fn action_table() -> Outcome {
    let ring = jet_and_group_ring(4);
    let v = |i| ring.var(i);
    let (a, c) = (v(4), v(5));
    let u: Vec<_> = (0..4).map(v).collect();
    let jet = TruncatedSeries::from_derivatives(&u).expect("order 4");
    let moved = stabilizer_action(&jet, &MobiusStabilizer::new(a, c).expect("a invertible")).expect("action");
    let r = |p| rational(p, 1);
    // Exponents over (u1, u2, u3, u4, a, c).
    let table: [Vec<(i64, [i32; 6])>; 4] = [
        vec![(1, [1, 0, 0, 0, 1, 0])],
        vec![(1, [0, 1, 0, 0, 2, 0]), (-2, [1, 0, 0, 0, 1, 1])],
        vec![(1, [0, 0, 1, 0, 3, 0]), (-6, [0, 1, 0, 0, 2, 1]), (6, [1, 0, 0, 0, 1, 2])],
        vec![(1, [0, 0, 0, 1, 4, 0]), (-12, [0, 0, 1, 0, 3, 1]), (36, [0, 1, 0, 0, 2, 2]), (-24, [1, 0, 0, 0, 1, 3])],
    ];
    let expected: Vec<LaurentPolynomial> = table
        .iter()
        .map(|row| row.iter().fold(ring.zero(), |acc, (k, e)| acc.checked_add(&term(&ring, r(*k), e)).expect("ring")))
        .collect();
    let got = moved.derivatives();
    outcome(got == expected, format!("k=4 rows exact: {}", got == expected))
}

fn symbolic_invariance() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for k in 3..=6 {
        let ring = jet_and_group_ring(k);
        let u: Vec<_> = (0..k).map(|i| ring.var(i)).collect();
        let jet = TruncatedSeries::from_derivatives(&u).expect("order k");
        let h = MobiusStabilizer::new(ring.var(k), ring.var(k + 1)).expect("a invertible");
        let moved = stabilizer_action(&jet, &h).expect("action");
        let before = canonical_projection(&jet).expect("u1 invertible");
        let after = canonical_projection(&moved).expect("u1 a invertible");
        let zero = before.len() == k - 2
            && before.iter().zip(&after).all(|(b, a)| a.checked_sub(b).map(|d| d.num_terms() == 0).unwrap_or(false));
        pass &= zero;
        details.push(format!("k={k}: {}", if zero { "0" } else { "nonzero" }));
    }
    outcome(pass, format!("projection∘action − projection {}", details.join(", ")))
}

fn canonical_example() -> Outcome {
    let jet = ScalarJet2::from_slices(
        &[1.0, 0.0, 0.0, 0.0],
        &[&[0.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 2.0, 0.0], &[0.0, 0.0, 0.0, 3.0]],
    )
    .expect("valid jet");
    let report = invariant_report(&jet).expect("timelike");
    let close = |got: &[f64], want: &[f64]| {
        got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-12)
    };
    let pass = close(&report.s, &[6.0, 14.0, 36.0])
        && close(&report.eigenvalues, &[1.0, 2.0, 3.0])
        && close(&report.d_closed, &[-6.0, 14.0, -36.0]);
    outcome(pass, format!("S={:?} eigenvalues={:?} D={:?}", report.s, report.eigenvalues, report.d_closed))
}

fn closed_form_consistency() -> Outcome {
    // Sign constant on the canonical family diag(0, λ1, λ2, λ3) with gradient e0.
    let mut sign_ok = true;
    for l in [[1.0, 2.0, 3.0], [-0.5, 0.25, 4.0], [0.0, 0.0, 0.0], [2.0, 2.0, -1.0]] {
        let diag = [[0.0, 0.0, 0.0, 0.0], [0.0, l[0], 0.0, 0.0], [0.0, 0.0, l[1], 0.0], [0.0, 0.0, 0.0, l[2]]];
        let rows: Vec<&[f64]> = diag.iter().map(|r| r.as_slice()).collect();
        let jet = ScalarJet2::from_slices(&[1.0, 0.0, 0.0, 0.0], &rows).expect("valid");
        let s = trace_invariants(&jet).expect("timelike");
        let d = [d1_closed(&jet), d2_closed(&jet), d3_closed(&jet)].map(|x| x.expect("timelike"));
        sign_ok &= (0..3).all(|k| (s[k] - if k % 2 == 0 { -d[k] } else { d[k] }).abs() <= 1e-12);
    }
    let checked = named("minkowski.closed_form", 1000, 1e-8, 4);
    outcome(sign_ok && checked.pass, format!("canonical-family sign constant holds: {sign_ok}; {}", checked.detail))
}

fn dimension_coherence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let jet = random_timelike_jet(&mut rng, 4).expect("timelike");
        worst = worst.max(relative_gap(dn_closed(&jet).expect("n=4"), d1_closed(&jet).expect("n=4")));
    }
    let identity = outcome(worst <= 1e-12, format!("Dn(n=4) vs D1 over 1000 jets: max gap {worst:.3e} (tol 1e-12)"));

    let (summary, failures) = run_check("dn_invariance", 1e-6, 500, SEED, |rng| {
        let Some((f, g, x)) = random_full_group_case(rng, 5)? else { return Ok(Sample::Reject) };
        let y = g.apply_point(&x)?;
        let before = dn_closed(&jet2_of(&f, &y)?)?;
        let after = dn_closed(&jet2_of_composed(&f, &g, &x)?)?;
        Ok(Sample::Done {
            residual: relative_residual(after, before),
            inputs: json!({ "f": f, "g": g.to_string(), "x": x }),
        })
    });
    let invariance = outcome(
        failures.is_empty() && summary.trials == 500,
        format!(
            "Dn invariance n=5: {} trials, {} failures, {} rejected, max residual {:.3e} (tol 1e-6)",
            summary.trials,
            failures.len(),
            summary.rejected,
            summary.max_residual
        ),
    );
    all(vec![identity, invariance])
}

fn boost_certification() -> Outcome {
    let mut degenerate_ok = true;
    for n in 2..=6 {
        let metric = jetred::minkowski::Metric::new(n).expect("n ≥ 2");
        for v in [metric.basis(0), -metric.basis(0)] {
            degenerate_ok &= jetred::verify::boost_residual(&v).map(|r| r <= 1e-10).unwrap_or(false);
        }
    }
    let sampled = named("minkowski.boost", 1000, 1e-10, 4);
    outcome(degenerate_ok && sampled.pass, format!("±e0 branch n=2..6 exact: {degenerate_ok}; {}", sampled.detail))
}

#[test]
fn acceptance_criteria() {
    let ten = Duration::from_secs(10);
    let criteria: Vec<Criterion> = vec![
        ("symbolic reproduction of w3..w5", Box::new(symbolic_reproduction)),
        ("stabilizer action table at k=4", Box::new(action_table)),
        ("symbolic invariance identity k ≤ 6", Box::new(move || timed(ten, symbolic_invariance))),
        ("Möbius numeric invariance of D1, D2", Box::new(|| named("mobius.full_group_invariance", 500, 1e-9, 4))),
        ("Schwarzian vanishing on Möbius maps", Box::new(|| named("mobius.schwarzian_vanishing", 100, 1e-12, 4))),
        ("Minkowski canonical example", Box::new(canonical_example)),
        ("pipeline vs closed forms", Box::new(move || timed(ten, closed_form_consistency))),
        ("full conformal invariance n=4", Box::new(|| named("minkowski.full_group_invariance", 1000, 1e-6, 4))),
        (
            "independence ranks",
            Box::new(|| {
                all(vec![
                    named("mobius.independence_rank", 100, 0.0, 4),
                    named("minkowski.independence_rank", 100, 0.0, 4),
                    named("minkowski.independence_rank", 100, 0.0, 6),
                ])
            }),
        ),
        ("boost certification", Box::new(boost_certification)),
        ("n-dimensional coherence", Box::new(dimension_coherence)),
        ("chain-rule oracle", Box::new(|| named("minkowski.chain_rule", 200, 1e-8, 4))),
    ];
    let mut failed = Vec::new();
    for (i, (label, run)) in criteria.into_iter().enumerate() {
        let result = run();
        // Written to the raw handle so the table shows without --nocapture.
        let _ = writeln!(
            std::io::stderr().lock(),
            "{} {:>2} {label}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
        if !result.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
