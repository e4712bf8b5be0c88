//! Jacobians of the reduced map (analytic) and of the simplex operator
//! (central differences with one Richardson step, plus an analytic form).

use crate::analysis::eigen::Mat;
use crate::error::{Error, Result, Sex};
use crate::operators::w_formula;
use crate::scalar::Scalar;
use crate::state::{PopulationState, ReducedState};

/// Analytic Jacobian of the reduced map at `r`, rows `(alpha', beta')`,
/// columns `(alpha, beta)`. At the origin this is `[[1/2, 1], [1/2, 0]]`.
pub fn jacobian_f<T: Scalar>(r: &ReducedState<T>) -> Mat<T, 2> {
    let c = |k: i64| T::from_ratio(k, 1);
    let a = r.alpha.clone();
    let b = r.beta.clone();
    let alpha_num = c(6) * b.clone() + c(3) * a.clone() + c(4) * a.clone() * b.clone();
    let alpha_den = c(6) + c(3) * a.clone();
    let beta_num = c(3) * a.clone() + c(4) * a.clone() * b.clone();
    let beta_den = c(6) + c(6) * b.clone() + beta_num.clone();
    let alpha_den2 = alpha_den.clone() * alpha_den.clone();
    let beta_den2 = beta_den.clone() * beta_den.clone();

    let da_da = ((c(3) + c(4) * b.clone()) * alpha_den.clone() - c(3) * alpha_num) / alpha_den2;
    let da_db = (c(6) + c(4) * a.clone()) / alpha_den;
    // beta' = N / (6 + 6 beta + N): d/dalpha = N_alpha (6 + 6 beta) / D^2
    let db_da = (c(3) + c(4) * b.clone()) * (c(6) + c(6) * b) / beta_den2.clone();
    let db_db = (c(4) * a.clone() * beta_den - beta_num * (c(6) + c(4) * a)) / beta_den2;
    [[da_da, da_db], [db_da, db_db]]
}

/// Analytic Jacobian of the closed-form operator viewed as a map on R^4.
pub fn jacobian_w_analytic<T: Scalar>(s: &[T; 4]) -> Result<Mat<T, 4>> {
    let [x, y, u, v] = s.clone();
    let females = x.clone() + y.clone();
    let males = u.clone() + v.clone();
    if females <= T::theta_floor() {
        return Err(Error::DegenerateSex(Sex::Female));
    }
    if males <= T::theta_floor() {
        return Err(Error::DegenerateSex(Sex::Male));
    }
    let c = |k: i64| T::from_ratio(k, 1);
    // numerators over the common denominator 12 (x+y)(u+v), and their gradients
    let numer = [
        c(6) * x.clone() * u.clone() + c(3) * y.clone() * u.clone(),
        c(6) * x.clone() * v.clone() + c(3) * y.clone() * u.clone() + c(4) * y.clone() * v.clone(),
        c(6) * x.clone() * u.clone()
            + c(6) * x.clone() * v.clone()
            + c(3) * y.clone() * u.clone()
            + c(4) * y.clone() * v.clone(),
        c(3) * y.clone() * u.clone() + c(4) * y.clone() * v.clone(),
    ];
    let grad = [
        [
            c(6) * u.clone(),
            c(3) * u.clone(),
            c(6) * x.clone() + c(3) * y.clone(),
            T::zero(),
        ],
        [
            c(6) * v.clone(),
            c(3) * u.clone() + c(4) * v.clone(),
            c(3) * y.clone(),
            c(6) * x.clone() + c(4) * y.clone(),
        ],
        [
            c(6) * (u.clone() + v.clone()),
            c(3) * u.clone() + c(4) * v.clone(),
            c(6) * x.clone() + c(3) * y.clone(),
            c(6) * x.clone() + c(4) * y.clone(),
        ],
        [
            T::zero(),
            c(3) * u.clone() + c(4) * v.clone(),
            c(3) * y.clone(),
            c(4) * y.clone(),
        ],
    ];
    let denom = c(12) * females.clone() * males.clone();
    let d_denom = [
        c(12) * males.clone(),
        c(12) * males,
        c(12) * females.clone(),
        c(12) * females,
    ];
    let denom2 = denom.clone() * denom.clone();
    Ok(std::array::from_fn(|k| {
        std::array::from_fn(|j| {
            grad[k][j].clone() / denom.clone()
                - numer[k].clone() * d_denom[j].clone() / denom2.clone()
        })
    }))
}

/// Central-difference Jacobian of `f` at `s` with one Richardson step:
/// `(4 D(h/2) - D(h)) / 3`.
pub fn jacobian_fd<F, const N: usize>(f: F, s: &[f64; N], h: f64) -> Result<Mat<f64, N>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    if h.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DomainViolation(format!(
            "step size must be positive, got {h}"
        )));
    }
    let central = |step: f64| -> Result<Mat<f64, N>> {
        let mut jac = [[0.0; N]; N];
        for j in 0..N {
            let mut plus = *s;
            let mut minus = *s;
            plus[j] += step;
            minus[j] -= step;
            let fp = f(&plus)?;
            let fm = f(&minus)?;
            for k in 0..N {
                jac[k][j] = (fp[k] - fm[k]) / (2.0 * step);
            }
        }
        Ok(jac)
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok(std::array::from_fn(|k| {
        std::array::from_fn(|j| (4.0 * fine[k][j] - coarse[k][j]) / 3.0)
    }))
}

/// Finite-difference Jacobian of the closed-form operator on R^4 at `s`.
pub fn jacobian_w(s: &PopulationState<f64>, h: f64) -> Result<Mat<f64, 4>> {
    jacobian_fd(w_formula::<f64>, &s.to_array(), h)
}
