//! Eigenvalues of the small Jacobians: closed form for 2x2, characteristic
//! polynomial plus Durand-Kerner for 4x4.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square matrix stored row-major.
pub type Mat<T, const N: usize> = [[T; N]; N];

/// Modulus window around one inside which an eigenvalue counts as on the unit circle.
pub const UNIT_CIRCLE_TOLERANCE: f64 = 1e-8;

/// Durand-Kerner sweep budget.
pub const MAX_SWEEPS: usize = 10_000;

/// Polynomial residual at which Durand-Kerner stops.
pub const ROOT_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Hyperbolic,
    Nonhyperbolic,
}

/// Nonhyperbolic iff some eigenvalue has modulus within `tol` of one.
pub fn classify(eigenvalues: &[Complex64], tol: f64) -> Classification {
    if eigenvalues.iter().any(|l| (l.norm() - 1.0).abs() <= tol) {
        Classification::Nonhyperbolic
    } else {
        Classification::Hyperbolic
    }
}

/// Both eigenvalues of a real 2x2 matrix, larger real part first.
///
/// Real roots use the cancellation-free form `q = -(b + sign(b) sqrt(D)) / 2`,
/// `roots = q, c / q` of the monic characteristic polynomial `l^2 + b l + c`.
pub fn eigenvalues_2x2(m: &Mat<f64, 2>) -> [Complex64; 2] {
    let b = -(m[0][0] + m[1][1]);
    let c = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = b * b - 4.0 * c;
    let mut roots = if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 { [0.0, 0.0] } else { [q, c / q] }.map(|r| Complex64::new(r, 0.0))
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    };
    if roots[1].re > roots[0].re {
        roots.swap(0, 1);
    }
    roots
}

/// Eigenvalues of a 2x2 matrix in its own arithmetic, when the discriminant
/// has an exact square root. Larger eigenvalue first.
pub fn eigenvalues_2x2_exact<T: Scalar>(m: &Mat<T, 2>) -> Option<[T; 2]> {
    let trace = m[0][0].clone() + m[1][1].clone();
    let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    let disc = trace.clone() * trace.clone() - T::from_ratio(4, 1) * det;
    let root = disc.sqrt_exact()?;
    let two = T::from_ratio(2, 1);
    Some([
        (trace.clone() + root.clone()) / two.clone(),
        (trace - root) / two,
    ])
}

/// Characteristic polynomial `det(l I - A)` by Faddeev-LeVerrier.
///
/// Returns coefficients lowest degree first; the leading coefficient is one.
pub fn characteristic_polynomial<T: Scalar, const N: usize>(a: &Mat<T, N>) -> Vec<T> {
    let mut coeffs = vec![T::zero(); N + 1];
    coeffs[N] = T::one();
    // M_0 = 0
    let mut m: Vec<Vec<T>> = vec![vec![T::zero(); N]; N];
    for k in 1..=N {
        // M_k = A M_{k-1} + c_{N-k+1} I
        let mut next = vec![vec![T::zero(); N]; N];
        for i in 0..N {
            for j in 0..N {
                let mut acc = T::zero();
                for l in 0..N {
                    acc += a[i][l].clone() * m[l][j].clone();
                }
                if i == j {
                    acc += coeffs[N - k + 1].clone();
                }
                next[i][j] = acc;
            }
        }
        m = next;
        // c_{N-k} = -tr(A M_k) / k
        let mut trace = T::zero();
        for i in 0..N {
            for l in 0..N {
                trace += a[i][l].clone() * m[l][i].clone();
            }
        }
        coeffs[N - k] = -trace / T::from_ratio(k as i64, 1);
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All roots of a monic polynomial (coefficients lowest degree first) by
/// Durand-Kerner iteration.
pub fn durand_kerner(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs
        .iter()
        .map(|c| Complex64::new(c / lead, 0.0))
        .collect();
    // Cauchy bound on the root moduli
    let radius = 1.0 + monic[..degree].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| seed.powu(k as u32 + 1) * radius / seed.norm().powi(k as i32 + 1))
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut largest_step: f64 = 0.0;
        for k in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    denom *= z[k] - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, f64::EPSILON);
            }
            let step = horner(&monic, z[k]) / denom;
            z[k] -= step;
            largest_step = largest_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        let residual = z
            .iter()
            .map(|&zk| horner(&monic, zk).norm())
            .fold(0.0, f64::max);
        if residual < ROOT_RESIDUAL || largest_step < 4.0 * f64::EPSILON {
            return Ok(z);
        }
    }
    Err(Error::RootFindingStalled { sweeps: MAX_SWEEPS })
}

/// Orders by modulus (largest first), then by argument.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal))
    });
}

/// Eigenvalues of a real 4x4 matrix, sorted by modulus then argument.
pub fn eigenvalues_4x4(m: &Mat<f64, 4>) -> Result<Vec<Complex64>> {
    let coeffs = characteristic_polynomial(m);
    let mut roots = durand_kerner(&coeffs)?;
    for r in &mut roots {
        // clean imaginary dust on real roots
        if r.im.abs() <= 1e-12 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    sort_spectrum(&mut roots);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn assert_multiset_close(got: &[Complex64], want: &[Complex64], tol: f64) {
        let mut used = vec![false; want.len()];
        for g in got {
            let k = (0..want.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| {
                    (want[a] - g)
                        .norm()
                        .partial_cmp(&(want[b] - g).norm())
                        .unwrap()
                })
                .unwrap();
            assert!(
                (want[k] - g).norm() < tol,
                "{g} not within {tol} of {:?}",
                want
            );
            used[k] = true;
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = [[0.5, 1.0], [0.5, 0.0]];
        assert_eq!(
            eigenvalues_2x2(&m),
            [Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)]
        );
        let id = [[1.0, 0.0], [0.0, 1.0]];
        assert_eq!(eigenvalues_2x2(&id), [Complex64::new(1.0, 0.0); 2]);
        let rot = [[0.0, -1.0], [1.0, 0.0]];
        let mut r = eigenvalues_2x2(&rot).to_vec();
        sort_spectrum(&mut r);
        assert_multiset_close(&r, &[Complex64::i(), -Complex64::i()], 1e-15);
        assert_eq!(
            eigenvalues_2x2(&[[0.0, 0.0], [0.0, 0.0]]),
            [Complex64::new(0.0, 0.0); 2]
        );
    }

    #[test]
    fn two_by_two_exact() {
        let q = |n, d| Rational::from_ratio(n, d);
        let m = [[q(1, 2), q(1, 1)], [q(1, 2), q(0, 1)]];
        assert_eq!(eigenvalues_2x2_exact(&m), Some([q(1, 1), q(-1, 2)]));
        let irrational = [[q(1, 1), q(1, 1)], [q(1, 1), q(0, 1)]];
        assert_eq!(eigenvalues_2x2_exact(&irrational), None);
    }

    #[test]
    fn faddeev_leverrier_exact() {
        let q = |n| Rational::from_ratio(n, 1);
        // diag(1, 2, 3): (l-1)(l-2)(l-3) = l^3 - 6 l^2 + 11 l - 6
        let m = [[q(1), q(0), q(0)], [q(0), q(2), q(0)], [q(0), q(0), q(3)]];
        assert_eq!(
            characteristic_polynomial(&m),
            vec![q(-6), q(11), q(-6), q(1)]
        );
        let m = [[q(2), q(1)], [q(1), q(2)]];
        assert_eq!(characteristic_polynomial(&m), vec![q(3), q(-4), q(1)]);
    }

    #[test]
    fn diagonal_four_by_four() {
        let m = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -0.5, 0.0, 0.0],
            [0.0, 0.0, 0.25, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        let l = eigenvalues_4x4(&m).unwrap();
        let want = [1.0, -0.5, 0.25, 0.0].map(|r| Complex64::new(r, 0.0));
        assert_multiset_close(&l, &want, 1e-9);
        assert!((l[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_transform_keeps_the_spectrum() {
        use nalgebra::Matrix4;
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -0.5, 0.25, 0.0));
        let p = Matrix4::new(
            2.0, 1.0, 0.0, 0.3, 0.5, 1.5, -1.0, 0.0, 0.0, 0.7, 1.0, 2.0, 1.0, 0.0, 0.2, 1.0,
        );
        let a = p * d * p.try_inverse().unwrap();
        let m: Mat<f64, 4> = std::array::from_fn(|i| std::array::from_fn(|j| a[(i, j)]));
        let l = eigenvalues_4x4(&m).unwrap();
        let want = [1.0, -0.5, 0.25, 0.0].map(|r| Complex64::new(r, 0.0));
        assert_multiset_close(&l, &want, 1e-9);
    }

    #[test]
    fn complex_pair_and_sorting() {
        // rotation block plus two reals
        let m = [
            [0.0, -2.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.0],
            [0.0, 0.0, 0.0, -3.0],
        ];
        let l = eigenvalues_4x4(&m).unwrap();
        let moduli: Vec<f64> = l.iter().map(|z| z.norm()).collect();
        assert!((moduli[0] - 3.0).abs() < 1e-9);
        assert!((moduli[1] - 2.0).abs() < 1e-9 && (moduli[2] - 2.0).abs() < 1e-9);
        assert!(l[1].im < l[2].im);
        assert!((l[3].re - 0.5).abs() < 1e-9);
    }

    #[test]
    fn matches_nalgebra_schur_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m: Mat<f64, 4> =
                std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
            let ours = eigenvalues_4x4(&m).unwrap();
            let na = nalgebra::Matrix4::from_fn(|i, j| m[i][j]).complex_eigenvalues();
            let theirs: Vec<Complex64> = na.iter().map(|z| Complex64::new(z.re, z.im)).collect();
            assert_multiset_close(&ours, &theirs, 1e-8);
        }
    }

    #[test]
    fn classification_window() {
        let on = [Complex64::new(1.0 + 1e-9, 0.0), Complex64::new(0.2, 0.0)];
        let off = [Complex64::new(0.9, 0.0), Complex64::new(-0.5, 0.0)];
        assert_eq!(
            classify(&on, UNIT_CIRCLE_TOLERANCE),
            Classification::Nonhyperbolic
        );
        assert_eq!(
            classify(&off, UNIT_CIRCLE_TOLERANCE),
            Classification::Hyperbolic
        );
        assert_eq!(
            classify(&[Complex64::new(0.0, -1.0)], UNIT_CIRCLE_TOLERANCE),
            Classification::Nonhyperbolic
        );
    }
}
