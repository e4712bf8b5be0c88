//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use gonosomal::analysis::{
    basin_sweep, classify, classify_unnormalized_orbit, eigenvalues_2x2_exact, eigenvalues_4x4,
    find_fixed_points, jacobian_f, jacobian_w, Classification, FixedPointLocation, SweepConfig,
    UnnormalizedVerdict,
};
use gonosomal::operators::{apply_w, reconstruct_next, reduce};
use gonosomal::verify::{
    run_checks, sample_state, CheckId, SuiteConfig, FIXED_POINT_DISTANCE, FIXED_POINT_GRID,
    FIXED_POINT_REFINE, JACOBIAN_STEP, UNIT_MODULUS,
};
use gonosomal::{
    ArithMode, ExactOperator, ExactState, FloatOperator, FloatState, Rational, RawState4, Scalar,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed <= Duration::from_secs(budget_secs)
}

fn criterion_1() -> Outcome {
    let s0 = ExactState::fixed_point();
    let image = apply_w(&s0).expect("W is defined at the fixed point");
    let residual = gonosomal::l1_distance(&image, &s0);
    outcome(
        image == s0 && residual == Rational::from(0),
        format!("W(s0) = {image}, residual {residual}"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let op = FloatOperator::hemophilia();
    let search = match find_fixed_points(&op, FIXED_POINT_GRID, FIXED_POINT_REFINE) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let s0 = FloatState::fixed_point();
    let distances: Vec<f64> = search
        .reports
        .iter()
        .filter_map(|r| match &r.location {
            FixedPointLocation::Population(s) => Some(gonosomal::l1_distance(s, &s0)),
            FixedPointLocation::Reduced(_) => None,
        })
        .collect();
    let elapsed = start.elapsed();
    let passed = distances.len() == 1 && distances[0] < FIXED_POINT_DISTANCE && within(elapsed, 10);
    outcome(
        passed,
        format!(
            "grid {FIXED_POINT_GRID}: {} candidates, {} distinct points, distances to s0 {distances:?}, {elapsed:.2?}",
            search.candidates_examined,
            distances.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let exact = eigenvalues_2x2_exact(&jacobian_f(&gonosomal::ExactReduced::origin()));
    let expected = [Rational::from(1), Rational::from_ratio(-1, 2)];
    let exact_ok = exact
        .as_ref()
        .is_some_and(|ls| ls.contains(&expected[0]) && ls.contains(&expected[1]) && ls[0] != ls[1]);
    let jac = match jacobian_w(&FloatState::fixed_point(), JACOBIAN_STEP) {
        Ok(j) => j,
        Err(e) => return outcome(false, e.to_string()),
    };
    let spectrum = match eigenvalues_4x4(&jac) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let closest = spectrum
        .iter()
        .map(|l| (l.norm() - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let class = classify(&spectrum, UNIT_MODULUS);
    let exact_text = exact.map(|ls| {
        ls.iter()
            .map(Scalar::to_literal)
            .collect::<Vec<_>>()
            .join(", ")
    });
    outcome(
        exact_ok && closest <= UNIT_MODULUS && class == Classification::Nonhyperbolic,
        format!(
            "J_F(0,0) eigenvalues {{{}}}; FD J_W(s0) closest |l|-1 = {closest:.2e}; {class:?}",
            exact_text.unwrap_or_default()
        ),
    )
}

const LEMMA_CHECKS: [CheckId; 6] = [
    CheckId::Lemma1,
    CheckId::Lemma2,
    CheckId::Lemma3,
    CheckId::MonotoneSum,
    CheckId::Commutation,
    CheckId::YVDecay,
];

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut passed = true;
    for (mode, samples, steps) in [(ArithMode::Exact, 1000, 30), (ArithMode::F64, 10_000, 200)] {
        let cfg = SuiteConfig {
            sample_count: samples,
            arithmetic_mode: mode,
            orbit_length: steps,
            ..Default::default()
        };
        match run_checks(&cfg, &LEMMA_CHECKS) {
            Ok(report) => {
                passed &= report.results.len() == LEMMA_CHECKS.len() && report.passed();
                let failures: Vec<String> = report
                    .results
                    .iter()
                    .filter(|r| !r.passed())
                    .map(|r| format!("{}({})", r.check_id, r.failures))
                    .collect();
                parts.push(format!(
                    "{mode} {samples}x{steps}: {}",
                    if failures.is_empty() {
                        "0 failures".into()
                    } else {
                        failures.join(" ")
                    }
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{mode}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        passed && within(elapsed, 120),
        format!("{}; {elapsed:.1?}", parts.join("; ")),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig {
        sample_count: 1,
        arithmetic_mode: ArithMode::Exact,
        ..Default::default()
    };
    let report = match run_checks(&cfg, &[CheckId::LimitEquation]) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let r = &report.results[0];
    let elapsed = start.elapsed();
    outcome(
        r.passed() && within(elapsed, 60),
        format!(
            "{} grid edges, {} failures; {}; {elapsed:.1?}",
            r.samples,
            r.failures,
            r.note.clone().unwrap_or_default()
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cfg = SweepConfig {
        grid_per_axis: 10,
        eps: 1e-4,
        max_iter: 100_000,
        worker_count: 8,
        ..Default::default()
    };
    let records = match basin_sweep(&FloatOperator::hemophilia(), &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let missed: Vec<[usize; 4]> = records
        .iter()
        .filter(|r| r.iterations_to_eps.is_none())
        .map(|r| r.lattice)
        .collect();
    let slowest = records
        .iter()
        .filter_map(|r| r.iterations_to_eps)
        .max()
        .unwrap_or(0);
    outcome(
        missed.is_empty() && within(elapsed, 300),
        format!(
            "{} of {} points reached 1e-4 (slowest {slowest} iterations); not reached: {missed:?}; {elapsed:.1?}",
            records.len() - missed.len(),
            records.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let op = ExactOperator::hemophilia();
    let (mut general_bad, mut reconstruct_bad, mut skipped) = (0, 0, 0);
    for index in 0..1000 {
        let s = sample_state::<Rational>(42, index).expect("samples are valid states");
        let w = apply_w(&s).expect("W is defined off the boundary set");
        if op.apply(&s).map_or(true, |g| g != w) {
            general_bad += 1;
        }
        // reconstruction needs x, u > 0
        match reduce(&s) {
            Ok(r) => {
                if reconstruct_next(&r).map_or(true, |n| n != w) {
                    reconstruct_bad += 1;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    let elapsed = start.elapsed();
    outcome(
        general_bad == 0 && reconstruct_bad == 0 && within(elapsed, 30),
        format!(
            "general != W on {general_bad}/1000; reconstruct != W on {reconstruct_bad}/{} ({skipped} with x or u = 0 skipped); {elapsed:.2?}",
            1000 - skipped
        ),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = gonosomal::cli::run_with(
        std::iter::once("gonosomal").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, out)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let one = dir.path().join("one.csv");
    let eight = dir.path().join("eight.csv");
    let (c1, _) = run_cli(&["sweep", "--workers", "1", "--out", one.to_str().unwrap()]);
    let (c8, _) = run_cli(&["sweep", "--workers", "8", "--out", eight.to_str().unwrap()]);
    let sweep_same = c1 == 0 && c8 == 0 && std::fs::read(&one).ok() == std::fs::read(&eight).ok();
    let verify = [
        "verify",
        "--seed",
        "42",
        "--samples",
        "100",
        "--arith",
        "exact",
    ];
    let (v1, r1) = run_cli(&verify);
    let (v2, r2) = run_cli(&verify);
    let verify_same = v1 == 0 && v2 == 0 && !r1.is_empty() && r1 == r2;
    outcome(
        sweep_same && verify_same,
        format!("sweep CSV 1 vs 8 workers identical: {sweep_same}; verify report repeated identical: {verify_same}"),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let exact = ExactOperator::hemophilia_unnormalized();
    let (two, four) = (Rational::from(2), Rational::from(4));
    let mut homogeneity_bad = 0;
    for index in 0..1000 {
        let s = sample_state::<Rational>(9, index).expect("valid sample");
        let raw = RawState4::new(s.to_array()).expect("nonnegative");
        let lhs = exact
            .apply_unnormalized(&raw.scaled(&two).unwrap())
            .unwrap();
        let rhs = exact
            .apply_unnormalized(&raw)
            .unwrap()
            .scaled(&four)
            .unwrap();
        if lhs != rhs {
            homogeneity_bad += 1;
        }
    }
    let float = FloatOperator::hemophilia_unnormalized();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let (mut origin, mut infinity, mut undecided) = (0, 0, 0);
    for _ in 0..1000 {
        let start = RawState4::new(std::array::from_fn(|_| {
            10f64.powf(rng.random_range(-2.0..1.0))
        }))
        .unwrap();
        match classify_unnormalized_orbit(&float, &start, 1000).map(|o| o.verdict) {
            Ok(UnnormalizedVerdict::Origin) => origin += 1,
            Ok(UnnormalizedVerdict::Infinity) => infinity += 1,
            _ => undecided += 1,
        }
    }
    let elapsed = start.elapsed();
    outcome(
        homogeneity_bad == 0 && undecided == 0 && within(elapsed, 30),
        format!(
            "W_un(2s) != 4 W_un(s) on {homogeneity_bad}/1000; 1000 positive starts: {origin} origin, {infinity} infinity, {undecided} other; {elapsed:.2?}"
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("exact fixed point", criterion_1),
        ("uniqueness on a 20-per-axis grid", criterion_2),
        ("spectrum and classification", criterion_3),
        ("lemma suites, exact and float", criterion_4),
        ("limit-equation root scan", criterion_5),
        ("global attraction sweep", criterion_6),
        ("oracle equivalence", criterion_7),
        ("determinism", criterion_8),
        ("unnormalized mode", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.passed {
            failed += 1;
        }
        println!(
            "criterion {} {}: {name}: {}",
            k + 1,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
