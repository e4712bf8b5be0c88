//! Executable checks of the lemmas behind the convergence proof, run over
//! sampled orbits in exact or float arithmetic, with a deterministic report.

mod checks;
mod sampling;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ArithMode, Scalar};
use crate::Rational;

pub use checks::{
    check_lemma2_pairs_on, check_lemma3_on, check_limit_equation, check_monotone_sequences_on,
    delta_corners, y_v_tail_maximum, COMMUTATION_RELATIVE, FIXED_POINT_DISTANCE, FIXED_POINT_GRID,
    FIXED_POINT_REFINE, INEQUALITY_SLACK, JACOBIAN_STEP, LIMIT_GRID_PER_UNIT, LIMIT_ORIGIN_RADIUS,
    LIMIT_ROOT_THRESHOLD, UNIT_MODULUS, Y_V_TAIL_BOUND, Y_V_TAIL_STEPS,
};
pub use sampling::{
    sample_boundary_state, sample_reduced, sample_state, SampleOrbit, DENOMINATOR_BOUND,
};

use checks::{Probe, Tally};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    Lemma1,
    Lemma2,
    Lemma3,
    MonotoneSum,
    LimitEquation,
    Commutation,
    YVDecay,
    BoundaryStress,
    FixedPoint,
    Spectrum,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::Lemma1,
        CheckId::Lemma2,
        CheckId::Lemma3,
        CheckId::MonotoneSum,
        CheckId::LimitEquation,
        CheckId::Commutation,
        CheckId::YVDecay,
        CheckId::BoundaryStress,
        CheckId::FixedPoint,
        CheckId::Spectrum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Lemma1 => "lemma1",
            CheckId::Lemma2 => "lemma2",
            CheckId::Lemma3 => "lemma3",
            CheckId::MonotoneSum => "monotone_sum",
            CheckId::LimitEquation => "limit_equation",
            CheckId::Commutation => "commutation",
            CheckId::YVDecay => "y_v_decay",
            CheckId::BoundaryStress => "boundary_stress",
            CheckId::FixedPoint => "fixed_point",
            CheckId::Spectrum => "spectrum",
        }
    }

    fn uses_orbits(self) -> bool {
        matches!(
            self,
            CheckId::Lemma1
                | CheckId::Lemma2
                | CheckId::MonotoneSum
                | CheckId::Commutation
                | CheckId::YVDecay
        )
    }

    /// Float tolerance; exact mode uses zero for every check except the
    /// float-only boundary stress run.
    fn float_tolerance(self) -> f64 {
        match self {
            CheckId::Commutation => COMMUTATION_RELATIVE,
            CheckId::LimitEquation | CheckId::FixedPoint | CheckId::Spectrum => 0.0,
            _ => INEQUALITY_SLACK,
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown check '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub samples: usize,
    pub failures: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub sample_count: usize,
    pub seed: u64,
    pub arithmetic_mode: ArithMode,
    /// Number of `W` steps per sampled orbit.
    pub orbit_length: usize,
    /// Exact orbits are re-anchored once a state needs more bits than this.
    pub anchor_bits: u64,
    /// Worker threads; 0 picks the rayon default. Does not affect results.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            sample_count: 1000,
            seed: 42,
            arithmetic_mode: ArithMode::Exact,
            orbit_length: 30,
            anchor_bits: 4096,
            workers: 0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 1 {
            return Err(Error::DomainViolation(
                "sample_count must be at least 1".into(),
            ));
        }
        if self.orbit_length < 3 {
            return Err(Error::DomainViolation(format!(
                "orbit_length must be at least 3, got {}",
                self.orbit_length
            )));
        }
        if self.anchor_bits < 64 {
            return Err(Error::DomainViolation(format!(
                "anchor_bits must be at least 64, got {}",
                self.anchor_bits
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub results: Vec<CheckResult>,
}

#[derive(Serialize)]
struct ReportHeader<'a> {
    arithmetic: &'a str,
    seed: u64,
    sample_count: usize,
    orbit_length: usize,
    anchor_bits: u64,
    passed: bool,
    tolerances: Tolerances,
}

#[derive(Serialize)]
struct Tolerances {
    inequality: f64,
    commutation_relative: f64,
    limit_root_threshold: f64,
    limit_origin_radius: f64,
    limit_grid_step: f64,
    fixed_point_distance: f64,
    unit_modulus: f64,
    y_v_tail_bound: f64,
    y_v_tail_steps: usize,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    suite: ReportHeader<'a>,
    check: &'a [CheckResult],
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(CheckResult::passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.results.iter().find(|r| !r.passed())
    }

    pub fn result(&self, id: CheckId) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.check_id == id.as_str())
    }

    /// TOML document: a `[suite]` header with the declared tolerances, then
    /// one `[[check]]` record per check in fixed field order.
    pub fn to_toml(&self) -> Result<String> {
        let exact = self.config.arithmetic_mode == ArithMode::Exact;
        let doc = ReportDocument {
            suite: ReportHeader {
                arithmetic: if exact { "exact" } else { "f64" },
                seed: self.config.seed,
                sample_count: self.config.sample_count,
                orbit_length: self.config.orbit_length,
                anchor_bits: self.config.anchor_bits,
                passed: self.passed(),
                tolerances: Tolerances {
                    inequality: if exact { 0.0 } else { INEQUALITY_SLACK },
                    commutation_relative: if exact { 0.0 } else { COMMUTATION_RELATIVE },
                    limit_root_threshold: LIMIT_ROOT_THRESHOLD,
                    limit_origin_radius: LIMIT_ORIGIN_RADIUS,
                    limit_grid_step: 1.0 / LIMIT_GRID_PER_UNIT as f64,
                    fixed_point_distance: FIXED_POINT_DISTANCE,
                    unit_modulus: UNIT_MODULUS,
                    y_v_tail_bound: Y_V_TAIL_BOUND,
                    y_v_tail_steps: Y_V_TAIL_STEPS,
                },
            },
            check: &self.results,
        };
        toml::to_string(&doc).map_err(|e| Error::Parse(format!("cannot serialize report: {e}")))
    }
}

/// Runs every check.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_checks(cfg, &CheckId::ALL)
}

/// Runs the selected checks, reported in `CheckId::ALL` order.
pub fn run_checks(cfg: &SuiteConfig, ids: &[CheckId]) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut selected: Vec<CheckId> = CheckId::ALL
        .into_iter()
        .filter(|id| ids.contains(id))
        .collect();
    selected.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::NoConvergence(format!("cannot start worker pool: {e}")))?;
    let results = pool.install(|| match cfg.arithmetic_mode {
        ArithMode::Exact => run_in::<Rational>(cfg, &selected),
        ArithMode::F64 => run_in::<f64>(cfg, &selected),
    })?;
    Ok(SuiteReport {
        config: cfg.clone(),
        results,
    })
}

fn run_one(cfg: &SuiteConfig, id: CheckId) -> Result<CheckResult> {
    let mut report = run_checks(cfg, &[id])?;
    Ok(report.results.remove(0))
}

pub fn check_lemma1(cfg: &SuiteConfig) -> Result<CheckResult> {
    run_one(cfg, CheckId::Lemma1)
}

pub fn check_lemma2(cfg: &SuiteConfig) -> Result<CheckResult> {
    run_one(cfg, CheckId::Lemma2)
}

pub fn check_lemma3(cfg: &SuiteConfig) -> Result<CheckResult> {
    run_one(cfg, CheckId::Lemma3)
}

pub fn check_monotone_sum(cfg: &SuiteConfig) -> Result<CheckResult> {
    run_one(cfg, CheckId::MonotoneSum)
}

pub fn check_commutation(cfg: &SuiteConfig) -> Result<CheckResult> {
    run_one(cfg, CheckId::Commutation)
}

pub fn check_y_v_decay(cfg: &SuiteConfig) -> Result<CheckResult> {
    run_one(cfg, CheckId::YVDecay)
}

/// Runs the orbit checks on explicit orbits (no carrier-tail run for `y_v_decay`).
pub fn check_orbits_on<T: Scalar>(
    id: CheckId,
    orbits: &[SampleOrbit<T>],
    tolerance: f64,
) -> Result<CheckResult> {
    if !id.uses_orbits() {
        return Err(Error::DomainViolation(format!(
            "check '{id}' does not run on orbits"
        )));
    }
    let mut tally = Tally::default();
    let mut tight = (0, 0);
    for orbit in orbits {
        let probe = orbit_probe(id, orbit, tolerance, &mut tight);
        tally.absorb(probe);
    }
    Ok(tally.finish(id, T::slack(tolerance).as_f64(), None))
}

fn orbit_probe<T: Scalar>(
    id: CheckId,
    orbit: &SampleOrbit<T>,
    tolerance: f64,
    tight: &mut (usize, usize),
) -> Probe<T> {
    match id {
        CheckId::Lemma1 => checks::lemma1_orbit(orbit, tolerance),
        CheckId::Lemma2 => checks::lemma2_orbit(orbit, tolerance),
        CheckId::MonotoneSum => checks::monotone_orbit(orbit, tolerance),
        CheckId::Commutation => checks::commutation_orbit(orbit, tolerance),
        CheckId::YVDecay => {
            let (p, t, s) = checks::y_v_orbit(orbit, tolerance);
            tight.0 += t;
            tight.1 += s;
            p
        }
        _ => unreachable!("not an orbit check"),
    }
}

/// Probes of one sample, plus `(tight, seen)` counts for the y/v bound.
type SampleProbes<T> = (Vec<Probe<T>>, (usize, usize));

fn run_in<T: Scalar>(cfg: &SuiteConfig, selected: &[CheckId]) -> Result<Vec<CheckResult>> {
    let orbit_checks: Vec<CheckId> = selected
        .iter()
        .copied()
        .filter(|id| id.uses_orbits())
        .collect();
    let mut orbit_results = Vec::new();
    if !orbit_checks.is_empty() {
        // one orbit per sample, shared by every orbit check, then dropped
        let per_sample: Vec<SampleProbes<T>> = (0..cfg.sample_count)
            .into_par_iter()
            .map(|index| -> Result<_> {
                let start = sample_state::<T>(cfg.seed, index)?;
                let orbit = SampleOrbit::generate(
                    format!("sample {index}"),
                    start,
                    cfg.orbit_length,
                    cfg.anchor_bits,
                )?;
                let mut tight = (0, 0);
                let probes = orbit_checks
                    .iter()
                    .map(|&id| orbit_probe(id, &orbit, id.float_tolerance(), &mut tight))
                    .collect();
                Ok((probes, tight))
            })
            .collect::<Result<_>>()?;
        let mut tallies = vec![Tally::default(); orbit_checks.len()];
        let mut tight = (0, 0);
        for (probes, t) in per_sample {
            tight.0 += t.0;
            tight.1 += t.1;
            for (tally, probe) in tallies.iter_mut().zip(probes) {
                tally.absorb(probe);
            }
        }
        for (id, mut tally) in orbit_checks.iter().copied().zip(tallies) {
            let mut note = None;
            if id == CheckId::YVDecay {
                tally.absorb(checks::y_v_tail_probe::<T>());
                let tail = y_v_tail_maximum(Y_V_TAIL_STEPS)?;
                note = Some(format!(
                    "y > alpha/4 at {} of {} states with alpha > 0; carrier orbit tail max(y, v) = {tail:e} (computed in f64)",
                    tight.0, tight.1
                ));
            }
            if cfg.arithmetic_mode == ArithMode::Exact && note.is_none() {
                note = Some(format!(
                    "exact orbits re-anchored above {} bits",
                    cfg.anchor_bits
                ));
            }
            orbit_results.push((
                id,
                tally.finish(id, T::slack(id.float_tolerance()).as_f64(), note),
            ));
        }
    }
    selected
        .iter()
        .map(|&id| {
            if let Some(pos) = orbit_results.iter().position(|(o, _)| *o == id) {
                return Ok(orbit_results.swap_remove(pos).1);
            }
            match id {
                CheckId::Lemma3 => Ok(lemma3_suite::<T>(cfg)),
                CheckId::LimitEquation => Ok(checks::limit_equation_scan::<T>(LIMIT_GRID_PER_UNIT)),
                CheckId::BoundaryStress => boundary_suite(cfg),
                CheckId::FixedPoint => checks::fixed_point_check::<T>(),
                CheckId::Spectrum => checks::spectrum_check::<T>(),
                _ => unreachable!("orbit checks handled above"),
            }
        })
        .collect()
}

fn lemma3_suite<T: Scalar>(cfg: &SuiteConfig) -> CheckResult {
    let mut pairs = delta_corners::<T>();
    pairs.extend((0..cfg.sample_count).map(|k| sample_reduced::<T>(cfg.seed, k)));
    check_lemma3_on(&pairs, CheckId::Lemma3.float_tolerance())
}

/// Lemma 1 and 2 checks on float orbits starting near the female-degenerate face.
fn boundary_suite(cfg: &SuiteConfig) -> Result<CheckResult> {
    let tol = CheckId::BoundaryStress.float_tolerance();
    let probes: Vec<Probe<f64>> = (0..cfg.sample_count)
        .into_par_iter()
        .map(|index| -> Result<_> {
            let start = sample_boundary_state(cfg.seed, index)?;
            let orbit = SampleOrbit::generate(
                format!("boundary sample {index}"),
                start,
                cfg.orbit_length,
                u64::MAX,
            )?;
            let first = checks::lemma1_orbit(&orbit, tol);
            Ok(if first.failed() {
                first
            } else {
                checks::lemma2_orbit(&orbit, tol)
            })
        })
        .collect::<Result<_>>()?;
    let mut tally = Tally::default();
    for p in probes {
        tally.absorb(p);
    }
    Ok(tally.finish(
        CheckId::BoundaryStress,
        tol,
        Some("female share in [1e-9, 1e-3], f64 in both modes".into()),
    ))
}
