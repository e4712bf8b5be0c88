//! Deterministic sampling of states, reduced pairs and orbits.
//!
//! Every sample owns a ChaCha stream keyed by `(purpose, index)`, so a
//! sample does not depend on how many others were drawn before it or on
//! which worker draws it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::operators::apply_w;
use crate::scalar::Scalar;
use crate::state::{PopulationState, ReducedState};

/// Random coordinates are `n / DENOMINATOR_BOUND` before normalization.
pub const DENOMINATOR_BOUND: i64 = 10_000;

/// Samples whose female or male share is below `1 / SEX_SHARE_FLOOR_INV` are redrawn.
pub const SEX_SHARE_FLOOR_INV: i64 = 1_000;

const STATES: u64 = 1;
const REDUCED: u64 = 2;
const BOUNDARY: u64 = 3;

fn stream(seed: u64, purpose: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) | index as u64);
    rng
}

/// Random state with coordinates `n_k / sum(n)`, `n_k` uniform on `0..=10^4`.
/// The same integers are drawn in both arithmetic modes.
pub fn sample_state<T: Scalar>(seed: u64, index: usize) -> Result<PopulationState<T>> {
    let mut rng = stream(seed, STATES, index);
    loop {
        let w: [i64; 4] = std::array::from_fn(|_| rng.random_range(0..=DENOMINATOR_BOUND));
        let total: i64 = w.iter().sum();
        if total == 0
            || (w[0] + w[1]) * SEX_SHARE_FLOOR_INV < total
            || (w[2] + w[3]) * SEX_SHARE_FLOOR_INV < total
        {
            continue;
        }
        let c = |k: usize| T::from_ratio(w[k], total);
        return PopulationState::new(c(0), c(1), c(2), c(3));
    }
}

/// Random pair of `Delta`: `alpha = 4 i / 10^4`, `beta = j / 10^4`.
pub fn sample_reduced<T: Scalar>(seed: u64, index: usize) -> ReducedState<T> {
    let mut rng = stream(seed, REDUCED, index);
    let i = rng.random_range(0..=DENOMINATOR_BOUND);
    let j = rng.random_range(0..=DENOMINATOR_BOUND);
    ReducedState::new(
        T::from_ratio(4 * i, DENOMINATOR_BOUND),
        T::from_ratio(j, DENOMINATOR_BOUND),
    )
}

/// Float state close to the female-degenerate face: `x + y = 10^r` with
/// `r` uniform on `[-9, -3]`, the remaining splits uniform.
pub fn sample_boundary_state(seed: u64, index: usize) -> Result<PopulationState<f64>> {
    let mut rng = stream(seed, BOUNDARY, index);
    let females = 10f64.powf(rng.random_range(-9.0..=-3.0));
    let carrier_share: f64 = rng.random_range(0.0..=1.0);
    let healthy_share: f64 = rng.random_range(0.0..=1.0);
    let males = 1.0 - females;
    PopulationState::from_weights(
        females * (1.0 - carrier_share),
        females * carrier_share,
        males * healthy_share,
        males * (1.0 - healthy_share),
    )
}

/// An orbit of `W` split into exact segments. Inside a segment every state
/// is the image of the previous one; a new segment starts from the last
/// state of the previous one rounded to binary64.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOrbit<T> {
    pub label: String,
    pub segments: Vec<Vec<PopulationState<T>>>,
}

impl<T: Scalar> SampleOrbit<T> {
    /// A single segment taken as given; no consistency check is made.
    pub fn from_states(label: impl Into<String>, states: Vec<PopulationState<T>>) -> Self {
        Self {
            label: label.into(),
            segments: vec![states],
        }
    }

    /// Runs `steps` applications of `W` from `start`, re-anchoring whenever
    /// a state needs more than `anchor_bits` bits. Float orbits never re-anchor.
    pub fn generate(
        label: impl Into<String>,
        start: PopulationState<T>,
        steps: usize,
        anchor_bits: u64,
    ) -> Result<Self> {
        let mut segments = Vec::new();
        let mut current = vec![start];
        for step in 0..steps {
            let next = apply_w(current.last().expect("segments are never empty"))?;
            let heavy = next.bit_size() > anchor_bits && step + 1 < steps;
            current.push(next);
            if heavy {
                let anchor = current.last().expect("just pushed").reanchor()?;
                segments.push(std::mem::replace(&mut current, vec![anchor]));
            }
        }
        segments.push(current);
        Ok(Self {
            label: label.into(),
            segments,
        })
    }

    pub fn steps(&self) -> usize {
        self.segments.iter().map(|s| s.len() - 1).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn samples_are_reproducible_and_mode_independent() {
        for index in 0..50 {
            let a = sample_state::<Rational>(42, index).unwrap();
            let b = sample_state::<Rational>(42, index).unwrap();
            assert_eq!(a, b);
            let f = sample_state::<f64>(42, index).unwrap();
            let diff: f64 = a
                .to_f64()
                .to_array()
                .iter()
                .zip(f.to_array())
                .map(|(p, q)| (p - q).abs())
                .sum();
            assert!(diff < 1e-15);
            let females = a.female_total();
            assert!(females >= Rational::from_ratio(1, 1000));
            assert!(a.male_total() >= Rational::from_ratio(1, 1000));
        }
        assert_ne!(
            sample_state::<f64>(42, 0).unwrap(),
            sample_state::<f64>(43, 0).unwrap()
        );
        assert_ne!(
            sample_state::<f64>(42, 0).unwrap(),
            sample_state::<f64>(42, 1).unwrap()
        );
    }

    #[test]
    fn reduced_samples_lie_in_the_domain() {
        for index in 0..200 {
            assert!(sample_reduced::<Rational>(7, index).in_domain());
        }
    }

    #[test]
    fn boundary_samples_hug_the_female_face() {
        for index in 0..200 {
            let s = sample_boundary_state(7, index).unwrap();
            let f = s.female_total();
            assert!(
                (1e-9 * (1.0 - 1e-12)..=1e-3 * (1.0 + 1e-12)).contains(&f),
                "{f}"
            );
        }
    }

    #[test]
    fn segmented_orbits_count_every_step() {
        let start = sample_state::<Rational>(1, 0).unwrap();
        let orbit = SampleOrbit::generate("s", start.clone(), 12, 512).unwrap();
        assert!(orbit.segments.len() > 1);
        assert_eq!(orbit.steps(), 12);
        assert_eq!(orbit.segments[0][0], start);
        for seg in &orbit.segments {
            for w in seg.windows(2) {
                assert_eq!(w[1], apply_w(&w[0]).unwrap());
            }
        }
        for pair in orbit.segments.windows(2) {
            let last = pair[0].last().unwrap();
            assert!(last.bit_size() > 512);
            assert_eq!(pair[1][0], last.reanchor().unwrap());
        }
        let float = SampleOrbit::generate(
            "f",
            PopulationState::<f64>::new(0.0, 0.5, 0.5, 0.0).unwrap(),
            200,
            4096,
        )
        .unwrap();
        assert_eq!(float.segments.len(), 1);
        assert_eq!(float.steps(), 200);
    }
}
