//! Check bodies. The `*_on` functions take explicit inputs so that the
//! suite can be fed corrupted data in its own tests.

use num_complex::Complex64;

use crate::analysis::eigen::{
    classify, eigenvalues_2x2_exact, eigenvalues_4x4, Classification, UNIT_CIRCLE_TOLERANCE,
};
use crate::analysis::fixed_point::{find_fixed_points, fixed_point_residual, FixedPointLocation};
use crate::analysis::jacobian::{jacobian_f, jacobian_w};
use crate::error::{Error, Result};
use crate::operators::{apply_f, apply_f_extended, reduce, GonosomalOperator};
use crate::scalar::Scalar;
use crate::state::{l1_distance, PopulationState, ReducedState};
use crate::verify::sampling::SampleOrbit;
use crate::verify::{CheckId, CheckResult};

/// Float slack for inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-12;
/// Float relative tolerance for the commutation identity.
pub const COMMUTATION_RELATIVE: f64 = 1e-10;
/// Residuals of the limit equation below this count as roots.
pub const LIMIT_ROOT_THRESHOLD: f64 = 1e-9;
/// Roots are allowed within this L-infinity distance of the origin.
pub const LIMIT_ORIGIN_RADIUS: f64 = 2e-3;
/// Grid points per unit length in the limit-equation scan.
pub const LIMIT_GRID_PER_UNIT: usize = 1000;
pub const FIXED_POINT_GRID: usize = 20;
pub const FIXED_POINT_REFINE: f64 = 1e-12;
pub const FIXED_POINT_DISTANCE: f64 = 1e-10;
/// Allowed distance of the leading finite-difference eigenvalue from the unit circle.
pub const UNIT_MODULUS: f64 = 1e-6;
pub const JACOBIAN_STEP: f64 = 1e-4;
pub const Y_V_TAIL_STEPS: usize = 10_000;
pub const Y_V_TAIL_BOUND: f64 = 1e-3;

/// Violation bookkeeping for one sample.
#[derive(Debug, Clone)]
pub(crate) struct Probe<T> {
    slack: T,
    worst: f64,
    failed: bool,
    witness: Option<String>,
}

impl<T: Scalar> Probe<T> {
    pub(crate) fn new(tolerance: f64) -> Self {
        Self {
            slack: T::slack(tolerance),
            worst: 0.0,
            failed: false,
            witness: None,
        }
    }

    /// Records the claim `lhs <= rhs`.
    pub(crate) fn le(&mut self, lhs: &T, rhs: &T, what: impl FnOnce() -> String) {
        if lhs <= rhs {
            return;
        }
        let excess = lhs.clone() - rhs.clone();
        self.worst = self.worst.max(excess.as_f64().max(f64::MIN_POSITIVE));
        if excess > self.slack {
            self.flag(what, lhs, rhs);
        }
    }

    /// Records the claim `a == b` up to the relative slack.
    pub(crate) fn close(&mut self, a: &T, b: &T, what: impl FnOnce() -> String) {
        if a == b {
            return;
        }
        let scale = T::max_of(a.abs(), b.abs());
        let rel = (a.clone() - b.clone()).abs() / scale;
        self.le(&rel, &T::zero(), || {
            format!("{}: {} vs {}", what(), a.to_literal(), b.to_literal())
        });
    }

    /// Records a structural failure (an operation that should not fail did).
    pub(crate) fn fail(&mut self, what: impl FnOnce() -> String) {
        self.worst = f64::INFINITY;
        if !self.failed {
            self.failed = true;
            self.witness = Some(what());
        }
    }

    fn flag(&mut self, what: impl FnOnce() -> String, lhs: &T, rhs: &T) {
        if !self.failed {
            self.failed = true;
            self.witness = Some(format!(
                "{}: {} > {}",
                what(),
                lhs.to_literal(),
                rhs.to_literal()
            ));
        }
    }

    pub(crate) fn failed(&self) -> bool {
        self.failed
    }
}

/// Per-check accumulation over samples, in sample order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    samples: usize,
    failures: usize,
    worst: f64,
    witness: Option<String>,
}

impl Tally {
    pub(crate) fn absorb<T: Scalar>(&mut self, probe: Probe<T>) {
        self.samples += 1;
        self.worst = self.worst.max(probe.worst);
        if probe.failed {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = probe.witness;
            }
        }
    }

    pub(crate) fn finish(self, id: CheckId, tolerance: f64, note: Option<String>) -> CheckResult {
        CheckResult {
            check_id: id.as_str().to_string(),
            samples: self.samples,
            failures: self.failures,
            worst_violation: self.worst,
            tolerance,
            witness: self.witness,
            note,
        }
    }
}

fn q<T: Scalar>(n: i64, d: i64) -> T {
    T::from_ratio(n, d)
}

// ---------------------------------------------------------------- lemma 1

/// Part (i) at `a` and the four chains of part (ii) from `a` to `b = W(a)`,
/// with the middle terms evaluated literally.
fn lemma1_pair<T: Scalar>(
    p: &mut Probe<T>,
    a: &PopulationState<T>,
    b: Option<&PopulationState<T>>,
    at: &dyn Fn() -> String,
) {
    p.le(a.x(), a.u(), || format!("{}: x <= u", at()));
    p.le(a.v(), a.y(), || format!("{}: v <= y", at()));
    p.le(a.y(), a.u(), || format!("{}: y <= u", at()));
    let Some(b) = b else { return };
    let (x, y, u, v) = (a.x().clone(), a.y().clone(), a.u().clone(), a.v().clone());
    let males = u.clone() + v.clone();
    let females = x.clone() + y.clone();
    let chains: [(&str, [T; 5]); 4] = [
        (
            "x",
            [
                q(1, 8),
                u.clone() / (q::<T>(4, 1) * males.clone()),
                b.x().clone(),
                u.clone() / (q::<T>(2, 1) * males.clone()),
                q(1, 2),
            ],
        ),
        (
            "y",
            [
                T::zero(),
                v.clone() / (q::<T>(3, 1) * males.clone()),
                b.y().clone(),
                (u.clone() + q::<T>(2, 1) * v.clone()) / (q::<T>(4, 1) * males.clone()),
                q(1, 2),
            ],
        ),
        (
            "u",
            [
                q(1, 4),
                (q::<T>(2, 1) * x.clone() + y.clone()) / (q::<T>(4, 1) * females.clone()),
                b.u().clone(),
                (q::<T>(3, 1) * x.clone() + q::<T>(2, 1) * y.clone())
                    / (q::<T>(6, 1) * females.clone()),
                q(1, 2),
            ],
        ),
        (
            "v",
            [
                T::zero(),
                y.clone() / (q::<T>(4, 1) * females.clone()),
                b.v().clone(),
                y.clone() / (q::<T>(3, 1) * females.clone()),
                q(1, 3),
            ],
        ),
    ];
    for (name, links) in &chains {
        for k in 0..4 {
            p.le(&links[k], &links[k + 1], || {
                format!("{}: {name} chain link {}", at(), k + 1)
            });
        }
    }
}

pub(crate) fn lemma1_orbit<T: Scalar>(orbit: &SampleOrbit<T>, tolerance: f64) -> Probe<T> {
    let mut p = Probe::new(tolerance);
    for (si, seg) in orbit.segments.iter().enumerate() {
        // part (i) and the chains start at the first image
        for k in 1..seg.len() {
            let at = || format!("{} segment {si} step {k} at {}", orbit.label, seg[k]);
            lemma1_pair(&mut p, &seg[k], seg.get(k + 1), &at);
        }
    }
    p
}

// ---------------------------------------------------------------- lemma 2

fn in_domain<T: Scalar>(p: &mut Probe<T>, r: &ReducedState<T>, at: &dyn Fn() -> String) {
    p.le(&T::zero(), &r.alpha, || format!("{}: 0 <= alpha", at()));
    p.le(&r.alpha, &q(4, 1), || format!("{}: alpha <= 4", at()));
    p.le(&T::zero(), &r.beta, || format!("{}: 0 <= beta", at()));
    p.le(&r.beta, &T::one(), || format!("{}: beta <= 1", at()));
}

pub(crate) fn lemma2_orbit<T: Scalar>(orbit: &SampleOrbit<T>, tolerance: f64) -> Probe<T> {
    let mut p = Probe::new(tolerance);
    for (si, seg) in orbit.segments.iter().enumerate() {
        for (k, s) in seg.iter().enumerate().skip(2) {
            let at = || format!("{} segment {si} step {k} at {s}", orbit.label);
            match reduce(s) {
                Ok(r) => in_domain(&mut p, &r, &at),
                Err(e) => p.fail(|| format!("{}: {e}", at())),
            }
        }
    }
    p
}

/// Lemma 2's bounds on reduced pairs given directly.
pub fn check_lemma2_pairs_on<T: Scalar>(pairs: &[ReducedState<T>], tolerance: f64) -> CheckResult {
    let mut tally = Tally::default();
    for (k, r) in pairs.iter().enumerate() {
        let mut p = Probe::new(tolerance);
        in_domain(&mut p, r, &|| format!("pair {k} {r}"));
        tally.absorb(p);
    }
    tally.finish(CheckId::Lemma2, T::slack(tolerance).as_f64(), None)
}

// ---------------------------------------------------------------- lemma 3

fn lemma3_pair<T: Scalar>(r: &ReducedState<T>, label: &str, tolerance: f64) -> Probe<T> {
    let mut p = Probe::new(tolerance);
    let at = || format!("{label} {r}");
    let (first, second) = match apply_f(r).and_then(|f1| apply_f(&f1).map(|f2| (f1, f2))) {
        Ok(pair) => pair,
        Err(e) => {
            p.fail(|| format!("{}: {e}", at()));
            return p;
        }
    };
    p.le(&T::zero(), &first.alpha, || {
        format!("{}: 0 <= alpha'", at())
    });
    p.le(&first.alpha, &q(2, 1), || format!("{}: alpha' <= 2", at()));
    p.le(&T::zero(), &first.beta, || format!("{}: 0 <= beta'", at()));
    p.le(&first.beta, &T::one(), || format!("{}: beta' <= 1", at()));
    p.le(&first.beta, &first.alpha, || {
        format!("{}: beta' <= alpha'", at())
    });
    p.le(&second.sum(), &first.sum(), || {
        format!("{}: alpha'' + beta'' <= alpha' + beta'", at())
    });
    p
}

/// The four corners of `Delta`, which every lemma 3 run includes.
pub fn delta_corners<T: Scalar>() -> Vec<ReducedState<T>> {
    vec![
        ReducedState::new(T::zero(), T::zero()),
        ReducedState::new(q(4, 1), T::zero()),
        ReducedState::new(T::zero(), T::one()),
        ReducedState::new(q(4, 1), T::one()),
    ]
}

pub fn check_lemma3_on<T: Scalar>(pairs: &[ReducedState<T>], tolerance: f64) -> CheckResult {
    let mut tally = Tally::default();
    for (k, r) in pairs.iter().enumerate() {
        tally.absorb(lemma3_pair(r, &format!("pair {k}"), tolerance));
    }
    tally.finish(CheckId::Lemma3, T::slack(tolerance).as_f64(), None)
}

// ---------------------------------------------------------------- monotone sum

/// `sums[m]` is `alpha + beta` at reduced index `m`; checked from `m = 1`.
fn monotone_sequence<T: Scalar>(p: &mut Probe<T>, sums: &[T], at: &dyn Fn(usize) -> String) {
    for m in 1..sums.len().saturating_sub(1) {
        p.le(&sums[m + 1], &sums[m], || {
            format!("{}: sum at m = {} exceeds sum at m = {m}", at(m), m + 1)
        });
    }
}

pub(crate) fn monotone_orbit<T: Scalar>(orbit: &SampleOrbit<T>, tolerance: f64) -> Probe<T> {
    let mut p = Probe::new(tolerance);
    for (si, seg) in orbit.segments.iter().enumerate() {
        let reduced: Result<Vec<T>> = seg
            .iter()
            .skip(2)
            .map(|s| reduce(s).map(|r| r.sum()))
            .collect();
        match reduced {
            Ok(sums) => monotone_sequence(&mut p, &sums, &|m| {
                format!("{} segment {si} step {}", orbit.label, m + 3)
            }),
            Err(e) => p.fail(|| format!("{} segment {si}: {e}", orbit.label)),
        }
    }
    p
}

/// Monotonicity of explicit reduced-sum sequences (indexed from `m = 0`).
pub fn check_monotone_sequences_on<T: Scalar>(sequences: &[Vec<T>], tolerance: f64) -> CheckResult {
    let mut tally = Tally::default();
    for (k, sums) in sequences.iter().enumerate() {
        let mut p = Probe::new(tolerance);
        monotone_sequence(&mut p, sums, &|_| format!("sequence {k}"));
        tally.absorb(p);
    }
    tally.finish(CheckId::MonotoneSum, T::slack(tolerance).as_f64(), None)
}

// ---------------------------------------------------------------- commutation

/// `reduce(W(s)) = F(reduce(s))` for each consecutive pair of the orbit.
pub(crate) fn commutation_orbit<T: Scalar>(orbit: &SampleOrbit<T>, tolerance: f64) -> Probe<T> {
    let mut p = Probe::new(tolerance);
    for (si, seg) in orbit.segments.iter().enumerate() {
        for (k, w) in seg.windows(2).enumerate() {
            let at = || format!("{} segment {si} step {k} at {}", orbit.label, w[0]);
            let lhs = reduce(&w[1]);
            let rhs = reduce(&w[0]).and_then(|r| apply_f_extended(&r));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => {
                    p.close(&l.alpha, &r.alpha, || format!("{}: alpha", at()));
                    p.close(&l.beta, &r.beta, || format!("{}: beta", at()));
                }
                // x = 0 or u = 0 at the start: outside the identity's hypotheses
                (_, Err(Error::ZeroDenominator)) if k == 0 => {}
                (Err(e), _) | (_, Err(e)) => p.fail(|| format!("{}: {e}", at())),
            }
        }
    }
    p
}

// ---------------------------------------------------------------- y and v decay

/// Bounds `y <= alpha / 2` and `v <= beta / 2` from the third state of each
/// segment on, and the number of states where `y > alpha / 4`.
pub(crate) fn y_v_orbit<T: Scalar>(
    orbit: &SampleOrbit<T>,
    tolerance: f64,
) -> (Probe<T>, usize, usize) {
    let mut p = Probe::new(tolerance);
    let (mut tight, mut seen) = (0, 0);
    let half = q::<T>(1, 2);
    let quarter = q::<T>(1, 4);
    for (si, seg) in orbit.segments.iter().enumerate() {
        for (k, s) in seg.iter().enumerate().skip(2) {
            let at = || format!("{} segment {si} step {k} at {s}", orbit.label);
            let r = match reduce(s) {
                Ok(r) => r,
                Err(e) => {
                    p.fail(|| format!("{}: {e}", at()));
                    continue;
                }
            };
            p.le(s.y(), &(r.alpha.clone() * half.clone()), || {
                format!("{}: y <= alpha / 2", at())
            });
            p.le(s.v(), &(r.beta.clone() * half.clone()), || {
                format!("{}: v <= beta / 2", at())
            });
            if r.alpha > T::zero() {
                seen += 1;
                if *s.y() > r.alpha.clone() * quarter.clone() {
                    tight += 1;
                }
            }
        }
    }
    (p, tight, seen)
}

/// Largest of `y` and `v` over the last tenth of a float orbit from the carrier state.
pub fn y_v_tail_maximum(steps: usize) -> Result<f64> {
    let start = PopulationState::new(0.0, 0.5, 0.5, 0.0)?;
    let mut s = start;
    let mut worst = 0.0f64;
    let tail_from = steps - steps / 10;
    for m in 1..=steps {
        s = crate::operators::apply_w(&s)?;
        if m >= tail_from {
            worst = worst.max(*s.y()).max(*s.v());
        }
    }
    Ok(worst)
}

pub(crate) fn y_v_tail_probe<T: Scalar>() -> Probe<T> {
    let mut p = Probe::new(0.0);
    match y_v_tail_maximum(Y_V_TAIL_STEPS) {
        Ok(tail) => p.le(
            &T::from_f64_value(tail),
            &T::from_f64_value(Y_V_TAIL_BOUND),
            || {
                format!(
                    "carrier orbit: max(y, v) over the last {} of {Y_V_TAIL_STEPS} steps",
                    Y_V_TAIL_STEPS / 10
                )
            },
        ),
        Err(e) => p.fail(|| format!("carrier orbit: {e}")),
    }
    p
}

// ---------------------------------------------------------------- limit equation

/// `|a + b - F_1(a, b) - F_2(a, b)|` for `(a, b)` in `Delta` with `b <= a`.
pub fn check_limit_equation<T: Scalar>(a: &T, b: &T) -> Result<T> {
    let r = ReducedState::checked(a.clone(), b.clone())?;
    if b > a {
        return Err(Error::DomainViolation(format!(
            "limit equation needs b <= a, got ({}, {})",
            a.to_literal(),
            b.to_literal()
        )));
    }
    Ok(limit_equation_signed(&r).abs())
}

fn limit_equation_signed<T: Scalar>(r: &ReducedState<T>) -> T {
    let (a, b) = (r.alpha.clone(), r.beta.clone());
    let c = |k: i64| T::from_ratio(k, 1);
    let ab = a.clone() * b.clone();
    let first =
        (c(6) * b.clone() + c(3) * a.clone() + c(4) * ab.clone()) / (c(6) + c(3) * a.clone());
    let second = (c(3) * a.clone() + c(4) * ab.clone())
        / (c(6) + c(6) * b.clone() + c(3) * a.clone() + c(4) * ab);
    a + b - first - second
}

/// Grid scan of `Delta` intersected with `b <= a`. Points away from the
/// origin must have residual at least the root threshold; sign changes of
/// the signed residual between neighbours are refined by bisection.
pub(crate) fn limit_equation_scan<T: Scalar>(per_unit: usize) -> CheckResult {
    let n = per_unit;
    let h = 1.0 / n as f64;
    let radius = (LIMIT_ORIGIN_RADIUS * n as f64).round() as usize;
    let g =
        |i: usize, j: usize| limit_equation_signed(&ReducedState::new(i as f64 * h, j as f64 * h));
    let threshold = LIMIT_ROOT_THRESHOLD;
    let mut tally = Tally::default();
    let mut min_away = (f64::INFINITY, 0.0, 0.0);
    let mut sign_changes = 0usize;
    let mut previous_row: Vec<f64> = Vec::new();
    for i in 0..=4 * n {
        let row: Vec<f64> = (0..=i.min(n)).map(|j| g(i, j)).collect();
        for (j, &value) in row.iter().enumerate() {
            let mut p = Probe::<f64>::new(0.0);
            let away = i.max(j) > radius;
            if away {
                if value.abs() < min_away.0 {
                    min_away = (value.abs(), i as f64 * h, j as f64 * h);
                }
                p.le(&threshold, &value.abs(), || {
                    format!(
                        "grid point ({}, {}): residual {value:e}",
                        i as f64 * h,
                        j as f64 * h
                    )
                });
                // neighbours already visited: (i, j - 1) and (i - 1, j)
                let mut edges = Vec::new();
                if j > 0 && i.max(j - 1) > radius {
                    edges.push(((i, j - 1), row[j - 1]));
                }
                if let (Some(&below), true) =
                    (previous_row.get(j), i > 0 && (i - 1).max(j) > radius)
                {
                    edges.push(((i - 1, j), below));
                }
                for ((pi, pj), other) in edges {
                    if other.signum() != value.signum() || other == 0.0 || value == 0.0 {
                        sign_changes += 1;
                        let (root, at) = bisect_edge(
                            (pi as f64 * h, pj as f64 * h),
                            (i as f64 * h, j as f64 * h),
                        );
                        p.le(&threshold, &root, || {
                            format!("sign change near ({}, {}): residual {root:e}", at.0, at.1)
                        });
                    }
                }
            }
            tally.absorb(p);
        }
        previous_row = row;
    }
    // pinned values in the working arithmetic
    let mut p = Probe::<T>::new(0.0);
    match (
        check_limit_equation(&T::zero(), &T::zero()),
        check_limit_equation(&T::one(), &T::one()),
    ) {
        (Ok(origin), Ok(one)) => {
            p.le(&origin, &T::zero(), || "residual at (0, 0)".to_string());
            p.le(&T::from_f64_value(threshold), &one, || {
                "residual at (1, 1)".to_string()
            });
        }
        (Err(e), _) | (_, Err(e)) => p.fail(|| e.to_string()),
    }
    tally.absorb(p);
    let note = format!(
        "grid step {h}; smallest residual beyond L-inf {LIMIT_ORIGIN_RADIUS} of the origin: {:e} at ({}, {}); sign changes: {sign_changes}",
        min_away.0, min_away.1, min_away.2
    );
    tally.finish(CheckId::LimitEquation, 0.0, Some(note))
}

/// Minimum of `|g|` along a grid edge, by bisection on the signed residual.
fn bisect_edge(from: (f64, f64), to: (f64, f64)) -> (f64, (f64, f64)) {
    let point = |t: f64| (from.0 + t * (to.0 - from.0), from.1 + t * (to.1 - from.1));
    let value = |t: f64| {
        let (a, b) = point(t);
        limit_equation_signed(&ReducedState::new(a, b))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let sign_lo = value(lo).signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if value(mid).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = if value(lo).abs() <= value(hi).abs() {
        lo
    } else {
        hi
    };
    (value(best).abs(), point(best))
}

// ---------------------------------------------------------------- fixed point and spectrum

pub(crate) fn fixed_point_check<T: Scalar>() -> Result<CheckResult> {
    let op = GonosomalOperator::<f64>::hemophilia();
    let search = find_fixed_points(&op, FIXED_POINT_GRID, FIXED_POINT_REFINE)?;
    let s0 = PopulationState::<f64>::fixed_point();
    let mut p = Probe::<f64>::new(0.0);
    if search.reports.len() != 1 {
        p.fail(|| format!("expected one fixed point, found {}", search.reports.len()));
    }
    let mut distance = f64::NAN;
    if let Some(FixedPointLocation::Population(s)) = search.reports.first().map(|r| &r.location) {
        distance = l1_distance(s, &s0);
        p.le(&distance, &FIXED_POINT_DISTANCE, || {
            format!("fixed point {s} vs (1/2, 0, 1/2, 0)")
        });
    }
    let mut exact = Probe::<T>::new(0.0);
    let residual = fixed_point_residual(
        &GonosomalOperator::<T>::hemophilia(),
        &PopulationState::fixed_point(),
    )?;
    exact.le(&residual, &T::zero(), || {
        "residual of W at (1/2, 0, 1/2, 0)".to_string()
    });
    let mut tally = Tally::default();
    tally.absorb(p);
    tally.absorb(exact);
    let note = format!(
        "grid {FIXED_POINT_GRID}: {} candidates, {} dropped, {} distinct; distance to s0 {distance:e}",
        search.candidates_examined,
        search.warnings.len(),
        search.reports.len()
    );
    Ok(tally.finish(CheckId::FixedPoint, 0.0, Some(note)))
}

pub(crate) fn spectrum_check<T: Scalar>() -> Result<CheckResult> {
    let mut reduced = Probe::<T>::new(0.0);
    let expected = [T::one(), q::<T>(-1, 2)];
    match eigenvalues_2x2_exact(&jacobian_f(&ReducedState::<T>::origin())) {
        Some(found) => {
            for (l, e) in found.iter().zip(&expected) {
                reduced.close(l, e, || {
                    "eigenvalue of the reduced Jacobian at (0, 0)".to_string()
                });
            }
        }
        None => reduced.fail(|| "reduced Jacobian at (0, 0) has no real spectrum".to_string()),
    }
    let mut full = Probe::<f64>::new(0.0);
    let jac = jacobian_w(&PopulationState::fixed_point(), JACOBIAN_STEP)?;
    let spectrum = eigenvalues_4x4(&jac)?;
    let leading = spectrum
        .first()
        .map(|l: &Complex64| l.norm())
        .unwrap_or(f64::NAN);
    full.le(&(leading - 1.0).abs(), &UNIT_MODULUS, || {
        format!("leading eigenvalue modulus {leading}")
    });
    if classify(&spectrum, UNIT_CIRCLE_TOLERANCE) != Classification::Nonhyperbolic {
        full.fail(|| "fixed point classified hyperbolic".to_string());
    }
    let mut tally = Tally::default();
    tally.absorb(reduced);
    tally.absorb(full);
    let listed: Vec<String> = spectrum
        .iter()
        .map(|l| format!("{:.3e}{:+.3e}i", l.re, l.im))
        .collect();
    Ok(tally.finish(
        CheckId::Spectrum,
        0.0,
        Some(format!(
            "finite-difference spectrum at s0: {}",
            listed.join(", ")
        )),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn probe_semantics() {
        let mut p = Probe::<f64>::new(1e-12);
        p.le(&1.0, &1.0, || unreachable!());
        p.le(&(1.0 + 1e-15), &1.0, || unreachable!());
        assert!(!p.failed());
        assert!(p.worst > 0.0 && p.worst <= 1e-12);
        p.le(&2.0, &1.0, || "first".into());
        p.le(&3.0, &1.0, || "second".into());
        assert!(p.failed());
        assert_eq!(p.worst, 2.0);
        assert!(p.witness.as_deref().unwrap().starts_with("first"));

        let mut e = Probe::<Rational>::new(1e-12);
        e.le(&r(1, 3), &r(1, 3), || unreachable!());
        assert!(!e.failed());
        e.le(&(r(1, 3) + r(1, 1_000_000_000_000_000)), &r(1, 3), || {
            "tiny".into()
        });
        assert!(e.failed());
    }

    #[test]
    fn fixed_point_satisfies_every_chain() {
        let s0 = PopulationState::<Rational>::fixed_point();
        let orbit = SampleOrbit::generate("s0", s0, 5, 4096).unwrap();
        assert!(!lemma1_orbit(&orbit, 0.0).failed());
        assert!(!lemma2_orbit(&orbit, 0.0).failed());
        assert!(!monotone_orbit(&orbit, 0.0).failed());
        assert!(!commutation_orbit(&orbit, 0.0).failed());
        let (p, tight, seen) = y_v_orbit(&orbit, 0.0);
        assert!(!p.failed());
        assert_eq!((tight, seen), (0, 0));
    }

    #[test]
    fn carrier_orbit_passes_exactly() {
        let s = PopulationState::new(r(0, 1), r(1, 2), r(1, 2), r(0, 1)).unwrap();
        let orbit = SampleOrbit::generate("carrier", s, 50, 4096).unwrap();
        assert!(!monotone_orbit(&orbit, 0.0).failed());
        assert!(!lemma1_orbit(&orbit, 0.0).failed());
        assert!(!commutation_orbit(&orbit, 0.0).failed());
        let (p, tight, seen) = y_v_orbit(&orbit, 0.0);
        assert!(!p.failed());
        assert!(tight > 0 && seen > 0);
    }

    #[test]
    fn swapped_coordinates_are_caught() {
        let s = PopulationState::new(r(0, 1), r(1, 2), r(1, 2), r(0, 1)).unwrap();
        let orbit = SampleOrbit::generate("carrier", s, 6, 4096).unwrap();
        let mut states = orbit.segments[0].clone();
        states[3] = states[3].swapped(0, 2);
        let corrupted = SampleOrbit::from_states("corrupted", states);
        let p = lemma1_orbit(&corrupted, 0.0);
        assert!(p.failed());
        assert!(p.witness.unwrap().contains("corrupted segment 0 step"));
    }

    #[test]
    fn lemma3_examples() {
        let result = check_lemma3_on(&delta_corners::<Rational>(), 0.0);
        assert_eq!((result.samples, result.failures), (4, 0));
        let corner = apply_f(&ReducedState::new(r(4, 1), r(1, 1))).unwrap();
        assert_eq!((corner.alpha, corner.beta), (r(17, 9), r(7, 10)));
        let edge = apply_f(&ReducedState::new(r(0, 1), r(1, 1))).unwrap();
        assert_eq!((edge.alpha.clone(), edge.beta.clone()), (r(1, 1), r(0, 1)));
        assert!(apply_f(&edge).unwrap().sum() <= r(1, 1));
        // a pair outside Delta cannot be pushed through apply_F
        let bad = check_lemma3_on(&[ReducedState::new(r(5, 1), r(0, 1))], 0.0);
        assert_eq!(bad.failures, 1);
        assert!(bad.witness.is_some());
    }

    #[test]
    fn lemma2_pairs() {
        let ok = check_lemma2_pairs_on(
            &[
                ReducedState::new(r(4, 1), r(1, 1)),
                ReducedState::new(r(0, 1), r(0, 1)),
            ],
            0.0,
        );
        assert_eq!(ok.failures, 0);
        let bad = check_lemma2_pairs_on(&[ReducedState::new(r(41, 10), r(0, 1))], 0.0);
        assert_eq!(bad.failures, 1);
        assert_eq!(bad.worst_violation, 0.1);
        assert!(bad.witness.unwrap().contains("alpha <= 4"));
    }

    #[test]
    fn alpha_four_is_accepted() {
        // y / x = 4 after two steps is attainable only in the limit, so the
        // closed bound is exercised on a state reduced directly
        let s = PopulationState::from_weights(r(1, 8), r(1, 2), r(1, 4), r(1, 4)).unwrap();
        let pair = reduce(&s).unwrap();
        assert_eq!(pair.alpha, r(4, 1));
        assert_eq!(check_lemma2_pairs_on(&[pair], 0.0).failures, 0);
    }

    #[test]
    fn monotone_sequences() {
        let ok =
            check_monotone_sequences_on(&[vec![r(5, 1), r(1, 1), r(1, 2), r(1, 2), r(0, 1)]], 0.0);
        assert_eq!(ok.failures, 0);
        let bad = check_monotone_sequences_on(&[vec![r(0, 1), r(1, 1), r(2, 1), r(3, 1)]], 0.0);
        assert_eq!(bad.failures, 1);
        assert_eq!(bad.worst_violation, 1.0);
        // the m = 0 term is not part of the claim
        let head = check_monotone_sequences_on(&[vec![r(0, 1), r(1, 1), r(1, 1)]], 0.0);
        assert_eq!(head.failures, 0);
    }

    #[test]
    fn commutation_detects_a_wrong_successor() {
        let s = PopulationState::from_weights(r(1, 4), r(1, 4), r(1, 4), r(1, 4)).unwrap();
        let orbit = SampleOrbit::generate("uniform", s.clone(), 3, 4096).unwrap();
        assert!(!commutation_orbit(&orbit, 0.0).failed());
        let corrupted = SampleOrbit::from_states("corrupted", vec![s.clone(), s]);
        assert!(commutation_orbit(&corrupted, 0.0).failed());
    }

    #[test]
    fn limit_equation_values() {
        assert_eq!(check_limit_equation(&r(0, 1), &r(0, 1)).unwrap(), r(0, 1));
        // LHS 2, RHS 13/9 + 7/19 = 310/171
        assert_eq!(
            check_limit_equation(&r(1, 1), &r(1, 1)).unwrap(),
            r(32, 171)
        );
        assert!(matches!(
            check_limit_equation(&r(1, 2), &r(1, 1)),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            check_limit_equation(&r(5, 1), &r(0, 1)),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn limit_equation_matches_its_factored_numerator() {
        // a (12(a-b) + 6(a^2-b^2) + 4ab(a-b) + 6a + 3a^2 + 15ab + 8a^2 b) over a positive denominator
        for (a, b) in [
            (r(1, 1), r(1, 1)),
            (r(3, 7), r(1, 5)),
            (r(4, 1), r(1, 1)),
            (r(1, 1000), r(0, 1)),
        ] {
            let residual = check_limit_equation(&a, &b).unwrap();
            let ab = a.clone() * b.clone();
            let inner = r(12, 1) * (a.clone() - b.clone())
                + r(6, 1) * (a.clone() * a.clone() - b.clone() * b.clone())
                + r(4, 1) * ab.clone() * (a.clone() - b.clone())
                + r(6, 1) * a.clone()
                + r(3, 1) * a.clone() * a.clone()
                + r(15, 1) * ab.clone()
                + r(8, 1) * a.clone() * ab.clone();
            let numerator = a.clone() * inner;
            let denominator = r(3, 1)
                * (r(2, 1) + a.clone())
                * (r(6, 1) + r(6, 1) * b.clone() + r(3, 1) * a.clone() + r(4, 1) * ab);
            assert_eq!(residual, numerator / denominator);
        }
    }

    #[test]
    fn coarse_scan_has_no_spurious_root() {
        let result = limit_equation_scan::<f64>(100);
        assert_eq!(result.failures, 0, "{result:?}");
        let note = result.note.unwrap();
        assert!(note.contains("sign changes: 0"), "{note}");
    }
}
