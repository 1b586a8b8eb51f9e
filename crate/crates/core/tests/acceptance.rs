//! Acceptance gate: one pass/fail line per criterion, run sequentially so the
//! runtime budgets are measured without competing test threads.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde_json::Value;

use period_atlas::aronhold::{eval_stj, legendre_restriction, legendre_target_s, legendre_target_t, InvariantPair};
use period_atlas::cubic::{prefactor_branches, TernaryCubic};
use period_atlas::hyperseries::{coefficient_A, gauss_2f1_half, MultiIndex, SeriesConfig};
use period_atlas::oracles::legendre_period_quadrature;
use period_atlas::positive_closure::{is_positively_closed, minpoly_of_sum, AlgebraicElement};
use period_atlas::rational_poly::{BigRational, SparsePolynomial};
use period_atlas::verify::{self, Check, Tolerances};

const SEED: u64 = 20_240_611;

struct Outcome {
    passed: bool,
    summary: String,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, summary: String::new(), failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.passed = false;
            self.failures.push(what.clone());
        }
        if !self.summary.is_empty() {
            self.summary.push_str("; ");
        }
        self.summary.push_str(&what);
    }

    fn check(&mut self, c: &Check) {
        let line = format!("{} {:.2e} <= {:.0e}", c.name, c.measured, c.tolerance);
        if !c.passed {
            self.failures.push(format!("{} (seed {SEED}): {}", c.name, c.detail));
        }
        self.passed &= c.passed;
        if !self.summary.is_empty() {
            self.summary.push_str("; ");
        }
        self.summary.push_str(&line);
    }

    fn budget(&mut self, elapsed: Duration, limit: Duration) {
        self.require(elapsed <= limit, format!("runtime {:.2?} <= {:?}", elapsed, limit));
    }
}

fn oracles() -> Value {
    serde_json::from_str(include_str!("fixtures/oracles.json")).expect("oracle fixture")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pair(v: &Value) -> Complex64 {
    Complex64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn aronhold_derivation() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let (pair, reports) = InvariantPair::derive().expect("derivation");
    let elapsed = start.elapsed();
    for r in &reports {
        o.require(r.kernel_dimension == 1, format!("kernel dim {} at degree {}", r.kernel_dimension, r.degree));
    }
    let s = legendre_restriction(&pair.s).unwrap();
    let t = legendre_restriction(&pair.t).unwrap();
    o.require(s == legendre_target_s(), "S restricts to l^2-l+1");
    o.require(t == legendre_target_t(), "T restricts to 2l^3-3l^2-3l+2");
    let k = |n: i64| BigRational::from_integer(n.into());
    let d = &(&t * &t) - &s.pow(3).scale(&k(4));
    let rel = &(&(&d + &(&s * &s).scale(&k(27))) - &s.scale(&k(54))) + &SparsePolynomial::constant(1, k(27));
    o.require(rel.is_zero(), "relation restricts to 0");
    o.budget(elapsed, Duration::from_secs(600));

    let dir = tempfile::tempdir().unwrap();
    let (_, first) = InvariantPair::load_or_derive(dir.path(), false).unwrap();
    let t0 = Instant::now();
    let (cached, second) = InvariantPair::load_or_derive(dir.path(), false).unwrap();
    o.require(first && !second && cached.s == pair.s && cached.t == pair.t, format!("cached reload {:.2?}", t0.elapsed()));
    let shipped = InvariantPair::shared();
    o.require(shipped.s == pair.s && shipped.t == pair.t, "shipped copy equals fresh derivation");
    o
}

fn sextic(tol: &Tolerances) -> Outcome {
    let mut o = Outcome::new();
    o.check(&verify::sextic_round_trip(SEED, 50, tol));
    o
}

fn prefactor(tol: &Tolerances) -> Outcome {
    let mut o = Outcome::new();
    o.check(&verify::prefactor_relation(SEED, 50, tol));
    o.check(&verify::legendre_prefactor_quartic(SEED, 10, tol));
    // The other two candidates on a Legendre cubic are 1/l^2 and 1/(1-l)^2,
    // so a blanket P^4 = 1 does not hold; report it without gating on it.
    let mut all_one = true;
    let mut factored = true;
    for l in [0.15, 0.3, 0.45, 0.6, 0.85] {
        let (s, t, _) = eval_stj(&TernaryCubic::legendre(c(l))).unwrap();
        let mut p4: Vec<f64> = prefactor_branches(s, t).unwrap().iter().map(|p| p.value.powu(4).re).collect();
        p4.sort_by(f64::total_cmp);
        let mut expect = vec![1.0, 1.0 / (l * l), 1.0 / ((1.0 - l) * (1.0 - l))];
        expect.sort_by(f64::total_cmp);
        factored &= p4.iter().zip(&expect).all(|(a, b)| (a - b).abs() <= 1e-8 * b);
        all_one &= p4.iter().all(|q| (q - 1.0).abs() <= 1e-8);
    }
    let oracle = oracles()["legendre_prefactor_cubic"]["factored"].as_str().unwrap().to_string();
    o.require(factored, format!("candidates are 1/u for u in roots of {oracle}"));
    o.summary.push_str(&format!("; every candidate P^4 = 1: {all_one} (informational)"));
    o
}

fn legendre(tol: &Tolerances) -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    o.check(&verify::legendre_quadrature_ratio(tol));
    o.check(&verify::legendre_series_vs_agm(tol));
    let cfg = SeriesConfig::default().with_max_degree(120).with_radius(0.75);
    let mut series_gap: f64 = 0.0;
    let mut quad_gap: f64 = 0.0;
    for row in oracles()["legendre"].as_array().unwrap() {
        let f = &row["hyp2f1"];
        if let Some(l) = row["lambda"].as_f64() {
            series_gap = series_gap.max((gauss_2f1_half(c(l), &cfg).unwrap().value - f.as_f64().unwrap()).norm());
            let q = legendre_period_quadrature(l).unwrap().value;
            quad_gap = quad_gap.max((q - pair(&row["integral"])).norm() / q.norm());
        } else {
            let l = pair(&row["lambda_complex"]);
            series_gap = series_gap.max((gauss_2f1_half(l, &cfg).unwrap().value - pair(f)).norm());
        }
    }
    o.require(series_gap <= 1e-12, format!("series vs mpmath {series_gap:.1e}"));
    o.require(quad_gap <= 1e-12, format!("quadrature vs mpmath {quad_gap:.1e}"));
    o.budget(start.elapsed(), Duration::from_secs(10));
    o
}

fn annihilators(tol: &Tolerances) -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for n in [2, 3] {
        for chk in verify::annihilator_checks(n, SEED, 20, tol) {
            o.check(&chk);
        }
    }
    o.budget(start.elapsed(), Duration::from_secs(60));
    o
}

fn invariance(tol: &Tolerances) -> Outcome {
    let mut o = Outcome::new();
    for n in [2, 3] {
        for chk in verify::invariance_checks(n, SEED, tol) {
            o.check(&chk);
        }
    }
    o
}

fn k3() -> Outcome {
    let mut o = Outcome::new();
    o.check(&verify::k3_gamma_formula());
    let table = oracles()["k3_coefficients"].as_array().unwrap().clone();
    let mut bad = 0;
    for row in &table {
        let e: Vec<u32> = row["entries"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as u32).collect();
        let expected: BigRational = row["value"].as_str().unwrap().parse().unwrap();
        bad += usize::from(coefficient_A(&MultiIndex::new(3, e).unwrap()) != expected);
    }
    o.require(bad == 0 && table.len() == 70, format!("{} sympy values, {bad} mismatches", table.len()));
    o
}

fn cubic(tol: &Tolerances) -> Outcome {
    let mut o = Outcome::new();
    o.check(&verify::cubic_transport(SEED, 10, tol));
    o.check(&verify::cubic_scaling(SEED, 10, tol));
    o
}

fn positive_closure() -> Outcome {
    let mut o = Outcome::new();
    o.check(&verify::positive_closure_fixtures());
    o.check(&verify::positive_closure_brute_force(SEED, 200));
    let m = SparsePolynomial::from_int_terms(2, &[(&[1, 2], 1), (&[0, 2], 1), (&[1, 1], -1), (&[0, 0], 1)]);
    let roots = [AlgebraicElement::new(m.clone(), 0).unwrap(), AlgebraicElement::new(m, 1).unwrap()];
    let both_closed = roots.iter().all(|s| is_positively_closed(s).unwrap().positively_closed);
    let sum = minpoly_of_sum(&roots[0], &roots[1]).unwrap();
    let verdict = is_positively_closed(&sum).unwrap();
    o.require(
        both_closed && !verdict.positively_closed && verdict.certificate_string().as_deref() == Some("x+1"),
        format!("conjugate roots closed, sum {} rejected", sum.display()),
    );
    o
}

#[test]
fn acceptance() {
    let tol = Tolerances::default();
    println!("acceptance seed {SEED}");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("aronhold derivation", Box::new(aronhold_derivation)),
        ("sextic round trip", Box::new(move || sextic(&tol))),
        ("prefactor relation", Box::new(move || prefactor(&tol))),
        ("legendre oracle", Box::new(move || legendre(&tol))),
        ("annihilator suite", Box::new(move || annihilators(&tol))),
        ("invariance and homogeneity", Box::new(move || invariance(&tol))),
        ("k3 coefficients", Box::new(k3)),
        ("cubic pipeline", Box::new(move || cubic(&tol))),
        ("positive closure", Box::new(positive_closure)),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        println!(
            "criterion {} {:<28} {} [{:.2?}] {}",
            k + 1,
            name,
            if out.passed { "PASS" } else { "FAIL" },
            start.elapsed(),
            out.summary
        );
        if !out.passed {
            for f in &out.failures {
                println!("    {f}");
            }
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
