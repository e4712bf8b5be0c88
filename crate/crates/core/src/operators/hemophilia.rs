//! Closed forms for the hemophilia operator on the simplex and its reduced
//! two-dimensional system on the ratios `alpha = y/x`, `beta = v/u`.

use crate::error::{Error, Result, Sex};
use crate::scalar::Scalar;
use crate::state::{PopulationState, ReducedState};

/// Evaluates the closed-form operator on raw coordinates of R^4.
///
/// ```text
/// x' = (2xu + yu)             / (4 (x+y)(u+v))
/// y' = (6xv + 3yu + 4yv)      / (12 (x+y)(u+v))
/// u' = (6xu + 6xv + 3yu + 4yv)/ (12 (x+y)(u+v))
/// v' = (3yu + 4yv)            / (12 (x+y)(u+v))
/// ```
///
/// No simplex validation happens here, only the two denominators are
/// checked. Finite-difference Jacobians and Newton steps use this directly.
pub fn w_formula<T: Scalar>(s: &[T; 4]) -> Result<[T; 4]> {
    let [x, y, u, v] = s.clone();
    let females = x.clone() + y.clone();
    let males = u.clone() + v.clone();
    let floor = T::theta_floor();
    if females <= floor {
        return Err(Error::DegenerateSex(Sex::Female));
    }
    if males <= floor {
        return Err(Error::DegenerateSex(Sex::Male));
    }
    let c = |k: i64| T::from_ratio(k, 1);
    let xu = x.clone() * u.clone();
    let xv = x * v.clone();
    let yu = y.clone() * u;
    let yv = y * v;
    let denom = c(12) * females * males;
    let nx = c(6) * xu.clone() + c(3) * yu.clone();
    let ny = c(6) * xv.clone() + c(3) * yu.clone() + c(4) * yv.clone();
    let nu = c(6) * xu + c(6) * xv + c(3) * yu.clone() + c(4) * yv.clone();
    let nv = c(3) * yu + c(4) * yv;
    Ok([
        nx / denom.clone(),
        ny / denom.clone(),
        nu / denom.clone(),
        nv / denom,
    ])
}

/// One generation of the hemophilia operator.
pub fn apply_w<T: Scalar>(s: &PopulationState<T>) -> Result<PopulationState<T>> {
    let [x, y, u, v] = w_formula(&s.to_array())?;
    PopulationState::new(x, y, u, v)
}

/// The reduced map on the ratios.
///
/// ```text
/// alpha' = (6 beta + 3 alpha + 4 alpha beta) / (6 + 3 alpha)
/// beta'  = (3 alpha + 4 alpha beta) / (6 + 6 beta + 3 alpha + 4 alpha beta)
/// ```
///
/// Rejects pairs outside `[0,4] x [0,1]`.
pub fn apply_f<T: Scalar>(r: &ReducedState<T>) -> Result<ReducedState<T>> {
    if !r.in_domain() {
        return Err(Error::DomainViolation(format!(
            "{r} lies outside [0,4] x [0,1]"
        )));
    }
    apply_f_extended(r)
}

/// The reduced map on the whole nonnegative quadrant.
///
/// The reduction of an arbitrary state (not yet iterated twice) can sit
/// outside `[0,4] x [0,1]` while the recurrence still holds there.
pub fn apply_f_extended<T: Scalar>(r: &ReducedState<T>) -> Result<ReducedState<T>> {
    if !r.is_nonnegative() {
        return Err(Error::DomainViolation(format!("{r} has a negative ratio")));
    }
    let c = |k: i64| T::from_ratio(k, 1);
    let a = r.alpha.clone();
    let b = r.beta.clone();
    let ab4 = c(4) * a.clone() * b.clone();
    let alpha_num = c(6) * b.clone() + c(3) * a.clone() + ab4.clone();
    let alpha_den = c(6) + c(3) * a.clone();
    let beta_num = c(3) * a + ab4;
    let beta_den = c(6) + c(6) * b + beta_num.clone();
    Ok(ReducedState::new(
        alpha_num / alpha_den,
        beta_num / beta_den,
    ))
}

/// Ratios `(y/x, v/u)` of a state.
///
/// Any twice-iterated state has `x >= 1/8` and `u >= 1/4`; callers
/// starting from an arbitrary point should warm up with two steps first.
pub fn reduce<T: Scalar>(s: &PopulationState<T>) -> Result<ReducedState<T>> {
    if s.x().is_zero() || s.u().is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(ReducedState::new(
        s.y().clone() / s.x().clone(),
        s.v().clone() / s.u().clone(),
    ))
}

/// Rebuilds the successor state from the ratios of the current one.
///
/// For every state `s` with `x, u > 0`, `reconstruct_next(reduce(s)) == apply_w(s)`.
/// The new `x` and `u` follow from the ratios alone; the new `y` and `v`
/// come from the updated ratios produced by the reduced map.
pub fn reconstruct_next<T: Scalar>(r: &ReducedState<T>) -> Result<PopulationState<T>> {
    let next = apply_f_extended(r)?;
    let c = |k: i64| T::from_ratio(k, 1);
    let a = r.alpha.clone();
    let b = r.beta.clone();
    let scale = (T::one() + a.clone()) * (T::one() + b.clone());
    let x = (c(2) + a.clone()) / (c(4) * scale.clone());
    let u = (c(6) + c(6) * b.clone() + c(3) * a.clone() + c(4) * a * b) / (c(12) * scale);
    let y = next.alpha * x.clone();
    let v = next.beta * u.clone();
    PopulationState::new(x, y, u, v)
}
