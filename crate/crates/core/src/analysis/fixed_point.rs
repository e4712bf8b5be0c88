//! Fixed-point search: lattice scan for residual minima, then damped Newton
//! on `W(s) - s` inside the affine slice `x + y + u + v = 1`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::eigen::{
    classify, eigenvalues_2x2, eigenvalues_4x4, Classification, Mat, UNIT_CIRCLE_TOLERANCE,
};
use crate::analysis::jacobian::{jacobian_f, jacobian_fd};
use crate::analysis::sweep::{barycentric_lattice, lattice_state};
use crate::error::{Error, Result};
use crate::operators::GonosomalOperator;
use crate::scalar::Scalar;
use crate::state::{l1_distance, PopulationState, ReducedState};

pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Candidates closer than this (L1) are merged.
pub const MERGE_DISTANCE: f64 = 1e-6;
/// Step used for the finite-difference Jacobian in reports.
pub const REPORT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum FixedPointLocation {
    Population(PopulationState<f64>),
    Reduced(ReducedState<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Jacobian {
    Two(Mat<f64, 2>),
    Four(Mat<f64, 4>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub location: FixedPointLocation,
    /// L1 norm of `W(s) - s`.
    pub residual: f64,
    pub jacobian: Jacobian,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateWarning {
    pub start: [f64; 4],
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSearch {
    pub reports: Vec<FixedPointReport>,
    /// Candidates dropped because Newton failed or stalled above tolerance.
    pub warnings: Vec<CandidateWarning>,
    pub candidates_examined: usize,
}

/// L1 norm of `W(s) - s`.
pub fn fixed_point_residual<T: Scalar>(
    op: &GonosomalOperator<T>,
    s: &PopulationState<T>,
) -> Result<T> {
    Ok(l1_distance(&op.apply(s)?, s))
}

fn residual_vector(op: &GonosomalOperator<f64>, s: &[f64; 4]) -> Result<[f64; 4]> {
    let image = op.apply_coords(s)?;
    Ok(std::array::from_fn(|k| image[k] - s[k]))
}

fn l1(v: &[f64; 4]) -> f64 {
    v.iter().map(|c| c.abs()).sum()
}

/// Clips to the nonnegative orthant and rescales onto the slice.
fn project(s: [f64; 4]) -> [f64; 4] {
    let clipped = s.map(|c| c.max(0.0));
    let sum: f64 = clipped.iter().sum();
    clipped.map(|c| c / sum)
}

/// Damped Newton in slice coordinates `(x, y, u)` with `v = 1 - x - y - u`.
fn newton(op: &GonosomalOperator<f64>, start: [f64; 4]) -> Result<[f64; 4]> {
    let mut s = start;
    let mut g = residual_vector(op, &s)?;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let norm = l1(&g);
        if norm == 0.0 {
            break;
        }
        let jw = op.jacobian_coords(&s)?;
        // d(W - id)/dz_j for j < 3, eliminating v through the slice constraint
        let jac = Matrix3::from_fn(|k, j| {
            let eye = if k == j { 1.0 } else { 0.0 };
            jw[k][j] - eye - jw[k][3]
        });
        let rhs = Vector3::new(-g[0], -g[1], -g[2]);
        let delta = match jac.lu().solve(&rhs) {
            Some(d) if d.iter().all(|c| c.is_finite()) => d,
            _ => jac
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|e| Error::NoConvergence(format!("singular Newton system: {e}")))?,
        };
        let full = [
            delta[0],
            delta[1],
            delta[2],
            -(delta[0] + delta[1] + delta[2]),
        ];
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1e-6 {
            let trial = project(std::array::from_fn(|k| s[k] + lambda * full[k]));
            if let Ok(gt) = residual_vector(op, &trial) {
                if l1(&gt) < norm {
                    accepted = Some((trial, gt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((next, gn)) = accepted else {
            // no descent left at working precision
            break;
        };
        let moved: f64 = next.iter().zip(&s).map(|(a, b)| (a - b).abs()).sum();
        s = next;
        g = gn;
        if moved < 1e-17 {
            break;
        }
    }
    Ok(s)
}

/// Report for a fixed point of the simplex operator.
pub fn population_report(
    op: &GonosomalOperator<f64>,
    s: &PopulationState<f64>,
) -> Result<FixedPointReport> {
    let residual = fixed_point_residual(op, s)?;
    let map = |p: &[f64; 4]| -> Result<[f64; 4]> {
        let image = op.apply_coords(p)?;
        Ok(std::array::from_fn(|k| image[k]))
    };
    let jac = jacobian_fd(map, &s.to_array(), REPORT_STEP)?;
    let eigenvalues = eigenvalues_4x4(&jac)?;
    Ok(FixedPointReport {
        location: FixedPointLocation::Population(s.clone()),
        residual,
        classification: classify(&eigenvalues, UNIT_CIRCLE_TOLERANCE),
        jacobian: Jacobian::Four(jac),
        eigenvalues,
    })
}

/// Report for the fixed point `(0, 0)` of the reduced map, from its analytic Jacobian.
pub fn reduced_origin_report() -> FixedPointReport {
    let origin = ReducedState::<f64>::origin();
    let jac = jacobian_f(&origin);
    let eigenvalues = eigenvalues_2x2(&jac).to_vec();
    let image = crate::operators::apply_f(&origin).expect("origin lies in the domain");
    FixedPointReport {
        location: FixedPointLocation::Reduced(origin.clone()),
        residual: (image.alpha - origin.alpha).abs() + (image.beta - origin.beta).abs(),
        classification: classify(&eigenvalues, UNIT_CIRCLE_TOLERANCE),
        jacobian: Jacobian::Two(jac),
        eigenvalues,
    }
}

/// Scans the lattice with `grid_per_axis` cells per axis for local minima of
/// the residual, refines each by Newton and keeps the distinct points whose
/// residual is below `refine_tol`.
pub fn find_fixed_points(
    op: &GonosomalOperator<f64>,
    grid_per_axis: usize,
    refine_tol: f64,
) -> Result<FixedPointSearch> {
    if grid_per_axis < 4 {
        return Err(Error::DomainViolation(format!(
            "fixed-point grid needs at least 4 cells per axis, got {grid_per_axis}"
        )));
    }
    let n = grid_per_axis;
    let lattice = barycentric_lattice(n);
    let index: std::collections::HashMap<[usize; 4], usize> =
        lattice.iter().enumerate().map(|(k, p)| (*p, k)).collect();
    let residuals: Vec<f64> = lattice
        .iter()
        .map(|p| {
            let s = lattice_state::<f64>(p, n)?;
            fixed_point_residual(op, &s)
        })
        .collect::<Result<_>>()?;

    // lattice neighbours: move one unit between two coordinates
    let is_local_min = |k: usize| {
        let p = lattice[k];
        for from in 0..4 {
            if p[from] == 0 {
                continue;
            }
            for to in 0..4 {
                if to == from {
                    continue;
                }
                let mut q = p;
                q[from] -= 1;
                q[to] += 1;
                if let Some(&m) = index.get(&q) {
                    if residuals[m] < residuals[k] {
                        return false;
                    }
                }
            }
        }
        true
    };
    let candidates: Vec<usize> = (0..lattice.len()).filter(|&k| is_local_min(k)).collect();

    let mut found: Vec<(PopulationState<f64>, f64)> = Vec::new();
    let mut warnings = Vec::new();
    for &k in &candidates {
        let start = lattice_state::<f64>(&lattice[k], n)?.to_array();
        let refined = newton(op, start).and_then(|s| {
            let state = PopulationState::new(s[0], s[1], s[2], s[3])?;
            let residual = fixed_point_residual(op, &state)?;
            if residual < refine_tol {
                Ok((state, residual))
            } else {
                Err(Error::NoConvergence(format!(
                    "Newton stalled at residual {residual:e}"
                )))
            }
        });
        match refined {
            Ok((state, residual)) => {
                match found
                    .iter_mut()
                    .find(|(f, _)| l1_distance(f, &state) < MERGE_DISTANCE)
                {
                    Some(existing) if residual < existing.1 => *existing = (state, residual),
                    Some(_) => {}
                    None => found.push((state, residual)),
                }
            }
            Err(e) => warnings.push(CandidateWarning {
                start,
                message: e.to_string(),
            }),
        }
    }
    let reports = found
        .iter()
        .map(|(s, _)| population_report(op, s))
        .collect::<Result<_>>()?;
    Ok(FixedPointSearch {
        reports,
        warnings,
        candidates_examined: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn residual_examples() {
        let op = GonosomalOperator::<Rational>::hemophilia();
        let s0 = PopulationState::fixed_point();
        assert_eq!(
            fixed_point_residual(&op, &s0).unwrap(),
            Rational::from_ratio(0, 1)
        );
        let q = |n, d| Rational::from_ratio(n, d);
        let uniform = PopulationState::new(q(1, 4), q(1, 4), q(1, 4), q(1, 4)).unwrap();
        // image (9/48, 13/48, 19/48, 7/48) against 12/48 each: (3 + 1 + 7 + 5) / 48
        assert_eq!(fixed_point_residual(&op, &uniform).unwrap(), q(1, 3));
    }

    #[test]
    fn unique_fixed_point_on_a_coarse_grid() {
        let op = GonosomalOperator::<f64>::hemophilia();
        let search = find_fixed_points(&op, 8, 1e-12).unwrap();
        assert_eq!(search.reports.len(), 1);
        let FixedPointLocation::Population(s) = &search.reports[0].location else {
            panic!()
        };
        assert!(
            l1_distance(s, &PopulationState::fixed_point()) < 1e-10,
            "{s}"
        );
        assert_eq!(
            search.reports[0].classification,
            Classification::Nonhyperbolic
        );
    }

    #[test]
    fn reduced_origin_is_nonhyperbolic() {
        let r = reduced_origin_report();
        assert_eq!(r.residual, 0.0);
        assert_eq!(
            r.eigenvalues,
            vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)]
        );
        assert_eq!(r.classification, Classification::Nonhyperbolic);
    }

    #[test]
    fn grid_too_small() {
        let op = GonosomalOperator::<f64>::hemophilia();
        assert!(find_fixed_points(&op, 3, 1e-12).is_err());
    }
}
