//! The four commands. Each returns its artifacts as strings; the caller is
//! the single writer.

use std::fmt::Write;

use serde::Serialize;

use crate::analysis::fixed_point::reduced_origin_report;
use crate::analysis::{
    basin_sweep, eigenvalues_2x2_exact, estimate_decay_exponent, find_fixed_points,
    fixed_point_residual, iterate, jacobian_f, CandidateWarning, DecayFit, FixedPointLocation,
    FixedPointReport, IterateOptions, Jacobian, StopReason, SweepConfig, SweepRecord, Trajectory,
};
use crate::cli::svg::{ramp, Frame, Svg};
use crate::cli::CliError;
use crate::error::{Error, Result};
use crate::operators::GonosomalOperator;
use crate::scalar::{ArithMode, Scalar, FLOAT_SUM_TOLERANCE};
use crate::state::{l1_distance, PopulationState, ReducedState};
use crate::verify::{run_checks, CheckId, SuiteConfig, FIXED_POINT_REFINE};
use crate::Rational;

/// What a command produced. `code` is the exit status on success.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub primary: String,
    pub svg: Option<String>,
    pub messages: Vec<String>,
    pub code: i32,
}

impl Artifacts {
    fn ok(primary: String, svg: Option<String>, messages: Vec<String>) -> Self {
        Self {
            primary,
            svg,
            messages,
            code: crate::cli::EXIT_OK,
        }
    }
}

fn is_decimal(literal: &str) -> bool {
    !literal.contains('/') && literal.contains(['.', 'e', 'E'])
}

/// Parses `x,y,u,v`. In exact mode decimals stand for their binary64 value,
/// and a state written with decimals is renormalized when its sum is within
/// float tolerance of one.
pub fn parse_initial<T: Scalar>(text: &str) -> Result<PopulationState<T>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!(
            "initial state needs four comma-separated values, got {}",
            parts.len()
        )));
    }
    let values: Vec<T> = parts
        .iter()
        .map(|p| T::parse_literal(p))
        .collect::<Result<_>>()?;
    let [x, y, u, v]: [T; 4] = values.try_into().expect("four values");
    if T::MODE == ArithMode::Exact && parts.iter().any(|p| is_decimal(p)) {
        let sum = (x.clone() + y.clone() + u.clone() + v.clone()).as_f64();
        if (sum - 1.0).abs() > FLOAT_SUM_TOLERANCE {
            return Err(Error::SumOutOfTolerance {
                sum: sum.to_string(),
            });
        }
        return PopulationState::from_weights(x, y, u, v);
    }
    PopulationState::new(x, y, u, v)
}

pub fn simulate<T: Scalar>(initial: &str, steps: usize, want_svg: bool) -> Result<Artifacts> {
    let start = parse_initial::<T>(initial)?;
    let op = GonosomalOperator::<T>::hemophilia();
    let traj = iterate(&op, &start, &IterateOptions::new(steps, T::zero()))?;
    let s0 = PopulationState::<T>::fixed_point();
    let mut csv = String::from("m,x,y,u,v,alpha,beta,dist\n");
    for (m, s) in traj.states.iter().enumerate() {
        let [x, y, u, v] = s.to_array().map(|c| c.to_literal());
        let (alpha, beta) = match m.checked_sub(2).and_then(|k| traj.reduced.get(k)) {
            Some(r) => (r.alpha.to_literal(), r.beta.to_literal()),
            None => (String::new(), String::new()),
        };
        let dist = l1_distance(s, &s0).to_literal();
        let _ = writeln!(csv, "{m},{x},{y},{u},{v},{alpha},{beta},{dist}");
    }
    let mut messages = Vec::new();
    if traj.stop_reason != StopReason::BudgetExhausted {
        messages.push(format!(
            "stopped after {} of {steps} steps: {}",
            traj.steps_taken, traj.stop_reason
        ));
    }
    let svg = want_svg.then(|| simulate_svg(&traj, initial));
    Ok(Artifacts::ok(csv, svg, messages))
}

fn simulate_svg<T: Scalar>(traj: &Trajectory<T>, initial: &str) -> String {
    let mut svg = Svg::new(900.0, 420.0);
    svg.title(&format!(
        "orbit from ({initial}), {} steps",
        traj.steps_taken
    ));
    svg.text(
        450.0,
        24.0,
        14.0,
        "middle",
        &format!("orbit from ({initial}), {} steps", traj.steps_taken),
    );

    let phase = Frame {
        left: 60.0,
        top: 50.0,
        width: 360.0,
        height: 300.0,
        x_range: (0.0, 4.0),
        y_range: (0.0, 1.0),
    };
    svg.axes(&phase, "alpha = y/x", "beta = v/u");
    let pts: Vec<(f64, f64)> = traj
        .reduced
        .iter()
        .map(|r| r.to_f64())
        .map(|r| {
            (
                phase.px(r.alpha.clamp(0.0, 4.0)),
                phase.py(r.beta.clamp(0.0, 1.0)),
            )
        })
        .collect();
    svg.polyline(&pts, "#3182bd");
    if let Some(&(x, y)) = pts.first() {
        svg.circle(x, y, 3.0, "#3182bd");
    }
    svg.circle(phase.px(0.0), phase.py(0.0), 4.0, "#d62728");

    let steps = traj.steps_taken.max(1) as f64;
    let series = Frame {
        left: 510.0,
        top: 50.0,
        width: 360.0,
        height: 300.0,
        x_range: (0.0, steps),
        y_range: (0.0, 1.0),
    };
    svg.axes(&series, "step m", "frequency");
    let colours = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];
    let names = ["x", "y", "u", "v"];
    for (c, (colour, name)) in colours.iter().zip(names).enumerate() {
        let line: Vec<(f64, f64)> = traj
            .states
            .iter()
            .enumerate()
            .map(|(m, s)| (series.px(m as f64), series.py(s.to_array()[c].as_f64())))
            .collect();
        svg.polyline(&line, colour);
        let ly = 70.0 + 16.0 * c as f64;
        svg.line(820.0, ly - 4.0, 840.0, ly - 4.0, colour);
        svg.text(845.0, ly, 11.0, "start", name);
    }
    svg.finish()
}

pub fn verify(
    mode: ArithMode,
    seed: u64,
    samples: usize,
    suite: &[CheckId],
    steps: usize,
    anchor_bits: u64,
    workers: usize,
) -> Result<Artifacts> {
    let cfg = SuiteConfig {
        sample_count: samples,
        seed,
        arithmetic_mode: mode,
        orbit_length: steps,
        anchor_bits,
        workers,
    };
    let report = run_checks(&cfg, suite)?;
    let mut artifacts = Artifacts::ok(report.to_toml()?, None, Vec::new());
    if let Some(bad) = report.first_failure() {
        artifacts.code = crate::cli::EXIT_CHECK_FAILED;
        artifacts.messages.push(format!(
            "check failed: {} ({} of {} samples, worst violation {:e})",
            bad.check_id, bad.failures, bad.samples, bad.worst_violation
        ));
    }
    Ok(artifacts)
}

pub fn sweep<T: Scalar>(cfg: &SweepConfig, share: f64, want_svg: bool) -> Result<Artifacts> {
    let op = GonosomalOperator::<T>::hemophilia();
    let records = basin_sweep(&op, cfg)?;
    let mut csv = String::from("i,j,k,l,x,y,u,v,iterations,final_distance,stop_reason\n");
    for r in &records {
        let [i, j, k, l] = r.lattice;
        let [x, y, u, v] = r.initial.to_array().map(|c| c.to_literal());
        let iterations = r
            .iterations_to_eps
            .map(|n| n.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            csv,
            "{i},{j},{k},{l},{x},{y},{u},{v},{iterations},{},{}",
            r.final_distance.to_literal(),
            r.stop_reason
        );
    }
    let missed: Vec<&SweepRecord<T>> = records
        .iter()
        .filter(|r| r.iterations_to_eps.is_none())
        .collect();
    let mut messages = vec![format!(
        "{} of {} lattice points reached distance {:e} within {} iterations",
        records.len() - missed.len(),
        records.len(),
        cfg.eps,
        cfg.max_iter
    )];
    for r in &missed {
        messages.push(format!(
            "not reached: lattice {:?}, final distance {:e}, {}",
            r.lattice,
            r.final_distance.as_f64(),
            r.stop_reason
        ));
    }
    let svg = want_svg.then(|| sweep_svg(&records, cfg, share));
    Ok(Artifacts::ok(csv, svg, messages))
}

/// Heatmap over `(x, u)` of the slice `y = share (1 - x - u)`, `v = (1 - share)(1 - x - u)`,
/// using the lattice point nearest to the slice in each cell.
fn sweep_svg<T: Scalar>(records: &[SweepRecord<T>], cfg: &SweepConfig, share: f64) -> String {
    let n = cfg.grid_per_axis;
    let label = format!(
        "basin sweep, slice y = {share}(1-x-u), v = {}(1-x-u), grid {n}",
        1.0 - share
    );
    let mut svg = Svg::new(560.0, 520.0);
    svg.title(&label);
    svg.text(280.0, 24.0, 13.0, "middle", &label);
    let frame = Frame {
        left: 70.0,
        top: 50.0,
        width: 400.0,
        height: 400.0,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
    };
    let cell = 400.0 / (n + 1) as f64;
    let scale = (1.0 + cfg.max_iter as f64).ln();
    let lookup: std::collections::HashMap<[usize; 4], &SweepRecord<T>> =
        records.iter().map(|r| (r.lattice, r)).collect();
    for i in 0..=n {
        for k in 0..=n - i {
            let rest = n - i - k;
            let j = ((share * rest as f64).round() as usize).min(rest);
            let fill = match lookup.get(&[i, j, k, rest - j]) {
                Some(r) => match r.iterations_to_eps {
                    Some(it) => ramp((1.0 + it as f64).ln() / scale),
                    None => "#d62728".to_string(),
                },
                None => "#bdbdbd".to_string(),
            };
            let x = frame.left + i as f64 * cell;
            let y = frame.top + frame.height - (k + 1) as f64 * cell;
            svg.rect(x, y, cell, cell, &fill, Some("white"));
        }
    }
    svg.axes(
        &Frame {
            width: cell * (n + 1) as f64,
            height: cell * (n + 1) as f64,
            ..frame
        },
        "x",
        "u",
    );
    svg.text(
        280.0,
        505.0,
        11.0,
        "middle",
        "colour: log(1 + iterations to eps), pale = fast; red = not reached; grey = excluded",
    );
    svg.finish()
}

#[derive(Serialize)]
struct AnalyzeReport {
    arithmetic: String,
    fixed_points: FixedPointSection,
    reduced: ReducedSection,
    decay: DecaySection,
}

#[derive(Serialize)]
struct FixedPointSection {
    grid: usize,
    candidates_examined: usize,
    distinct: usize,
    points: Vec<PointEntry>,
    warnings: Vec<CandidateWarning>,
}

#[derive(Serialize)]
struct PointEntry {
    state: Vec<f64>,
    residual: f64,
    jacobian_method: String,
    jacobian: Vec<Vec<f64>>,
    /// `[re, im]` pairs, largest modulus first.
    eigenvalues: Vec<[f64; 2]>,
    classification: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_residual: Option<String>,
}

#[derive(Serialize)]
struct ReducedSection {
    point: Vec<f64>,
    residual: f64,
    jacobian_method: String,
    jacobian: Vec<Vec<f64>>,
    eigenvalues: Vec<[f64; 2]>,
    classification: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_eigenvalues: Option<Vec<String>>,
}

#[derive(Serialize)]
struct DecaySection {
    initial: Vec<f64>,
    steps: usize,
    quantity: String,
    fit: DecayFit,
}

fn matrix_rows(jacobian: &Jacobian) -> Vec<Vec<f64>> {
    match jacobian {
        Jacobian::Two(m) => m.iter().map(|r| r.to_vec()).collect(),
        Jacobian::Four(m) => m.iter().map(|r| r.to_vec()).collect(),
    }
}

fn spectrum(report: &FixedPointReport) -> Vec<[f64; 2]> {
    report.eigenvalues.iter().map(|l| [l.re, l.im]).collect()
}

pub fn analyze(mode: ArithMode, grid: usize, steps: usize, want_svg: bool) -> Result<Artifacts> {
    let op = GonosomalOperator::<f64>::hemophilia();
    let search = find_fixed_points(&op, grid, FIXED_POINT_REFINE)?;
    let exact = mode == ArithMode::Exact;
    let mut points = Vec::new();
    for report in &search.reports {
        let FixedPointLocation::Population(s) = &report.location else {
            continue;
        };
        let exact_residual = if exact {
            let snapped = PopulationState::<Rational>::new(
                Rational::from_f64_value(*s.x()),
                Rational::from_f64_value(*s.y()),
                Rational::from_f64_value(*s.u()),
                Rational::from_f64_value(*s.v()),
            );
            match snapped {
                Ok(p) => Some(
                    fixed_point_residual(&GonosomalOperator::<Rational>::hemophilia(), &p)?
                        .to_literal(),
                ),
                Err(_) => None,
            }
        } else {
            None
        };
        points.push(PointEntry {
            state: s.to_array().to_vec(),
            residual: report.residual,
            jacobian_method: "central differences, step 1e-4".into(),
            jacobian: matrix_rows(&report.jacobian),
            eigenvalues: spectrum(report),
            classification: format!("{:?}", report.classification),
            exact_residual,
        });
    }
    if points.is_empty() {
        return Err(Error::NoConvergence(format!(
            "fixed-point search found no point on a {grid}-per-axis grid"
        )));
    }

    let origin = reduced_origin_report();
    let reduced = ReducedSection {
        point: vec![0.0, 0.0],
        residual: origin.residual,
        jacobian_method: "analytic".into(),
        jacobian: matrix_rows(&origin.jacobian),
        eigenvalues: spectrum(&origin),
        classification: format!("{:?}", origin.classification),
        exact_eigenvalues: exact.then(|| {
            eigenvalues_2x2_exact(&jacobian_f(&ReducedState::<Rational>::origin()))
                .map(|ls| ls.iter().map(Scalar::to_literal).collect())
                .unwrap_or_else(|| vec!["irrational".into()])
        }),
    };

    let carrier = PopulationState::<f64>::new(0.0, 0.5, 0.5, 0.0)?;
    let traj = iterate(&op, &carrier, &IterateOptions::new(steps, 0.0))?;
    let fit = estimate_decay_exponent(&traj)?;
    let sums = traj.reduced_sums();
    let decay = DecaySection {
        initial: carrier.to_array().to_vec(),
        steps: traj.steps_taken,
        quantity: "alpha + beta along the orbit, fitted as C m^(-p) on the last half".into(),
        fit,
    };

    let report = AnalyzeReport {
        arithmetic: mode.to_string(),
        fixed_points: FixedPointSection {
            grid,
            candidates_examined: search.candidates_examined,
            distinct: points.len(),
            points,
            warnings: search.warnings,
        },
        reduced,
        decay,
    };
    let text = toml::to_string(&report)
        .map_err(|e| Error::Parse(format!("cannot serialize report: {e}")))?;
    let svg = want_svg.then(|| decay_svg(&sums[1..], &report.decay.fit));
    Ok(Artifacts::ok(text, svg, Vec::new()))
}

/// Log-log plot of `alpha + beta` against `m` with the fitted line.
fn decay_svg(sums: &[f64], fit: &DecayFit) -> String {
    let pts: Vec<(f64, f64)> = sums
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, v)| (((k + 1) as f64).log10(), v.log10()))
        .collect();
    let x_hi = pts.last().map_or(1.0, |p| p.0.ceil().max(1.0));
    let y_lo = pts
        .iter()
        .map(|p| p.1)
        .fold(f64::INFINITY, f64::min)
        .floor();
    let y_hi = pts
        .iter()
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max)
        .ceil();
    let (y_lo, y_hi) = if y_lo < y_hi {
        (y_lo, y_hi)
    } else {
        (y_lo - 1.0, y_lo + 1.0)
    };
    let label = format!("alpha + beta decay, fitted exponent {:.4}", fit.exponent);
    let mut svg = Svg::new(520.0, 420.0);
    svg.title(&label);
    svg.text(260.0, 24.0, 13.0, "middle", &label);
    let f = Frame {
        left: 70.0,
        top: 50.0,
        width: 400.0,
        height: 300.0,
        x_range: (0.0, x_hi),
        y_range: (y_lo, y_hi),
    };
    svg.axes(&f, "log10 m", "log10(alpha + beta)");
    // thin the polyline to about a thousand vertices
    let stride = (pts.len() / 1000).max(1);
    let line: Vec<(f64, f64)> = pts
        .iter()
        .step_by(stride)
        .map(|&(x, y)| (f.px(x), f.py(y)))
        .collect();
    svg.polyline(&line, "#3182bd");
    let ln10 = std::f64::consts::LN_10;
    let fitted = |lx: f64| (fit.log_prefactor - fit.exponent * lx * ln10) / ln10;
    let x0 = pts.get(pts.len() / 2).map_or(0.0, |p| p.0);
    svg.line(
        f.px(x0),
        f.py(fitted(x0)),
        f.px(x_hi),
        f.py(fitted(x_hi)),
        "#d62728",
    );
    svg.finish()
}

/// Maps library errors to exit codes.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::NoConvergence(_)
        | Error::RootFindingStalled { .. }
        | Error::InsufficientData { .. }
        | Error::Overflow { .. }
        | Error::ExactIterationCapExceeded { .. } => crate::cli::EXIT_NUMERIC,
        _ => crate::cli::EXIT_INVALID_INPUT,
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError {
            code: exit_code(&error),
            message: error.to_string(),
        }
    }
}
