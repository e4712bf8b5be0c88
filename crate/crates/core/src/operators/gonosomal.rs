//! Quadratic operators assembled from a cross table.

use crate::error::{Error, Result, Sex};
use crate::operators::table::CrossTable;
use crate::scalar::Scalar;
use crate::state::{PopulationState, RawState4};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    /// Divides by the product of the two sub-population totals; acts on the simplex.
    Normalized,
    /// Keeps only the quadratic numerators; acts on the nonnegative orthant of R^n.
    Unnormalized,
}

impl OperatorMode {
    fn name(self) -> &'static str {
        match self {
            OperatorMode::Normalized => "normalized",
            OperatorMode::Unnormalized => "unnormalized",
        }
    }
}

/// Evolution operator generated by a cross table.
///
/// Offspring genotype `k` receives
/// `sum_{i,j} table[i,j][k] * female_i * male_j`, divided by
/// `(sum female)(sum male)` in normalized mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GonosomalOperator<T> {
    table: CrossTable<T>,
    mode: OperatorMode,
}

impl<T: Scalar> GonosomalOperator<T> {
    pub fn new(table: CrossTable<T>, mode: OperatorMode) -> Self {
        Self { table, mode }
    }

    pub fn hemophilia() -> Self {
        Self::new(CrossTable::hemophilia(), OperatorMode::Normalized)
    }

    pub fn hemophilia_unnormalized() -> Self {
        Self::new(CrossTable::hemophilia(), OperatorMode::Unnormalized)
    }

    pub fn table(&self) -> &CrossTable<T> {
        &self.table
    }

    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    fn expect_mode(&self, expected: OperatorMode) -> Result<()> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(Error::WrongMode {
                expected: expected.name(),
                actual: self.mode.name(),
            })
        }
    }

    fn expect_square_four(&self) -> Result<()> {
        if self.table.female_count() == 2 && self.table.male_count() == 2 {
            Ok(())
        } else {
            Err(Error::InvalidTable(format!(
                "population states need a 2 x 2 table, this one is {} x {}",
                self.table.female_count(),
                self.table.male_count()
            )))
        }
    }

    pub fn dimension(&self) -> usize {
        self.table.female_count() + self.table.male_count()
    }

    /// Quadratic numerators `sum_{i,j} table[i,j][k] * f_i * m_j`.
    fn numerators(&self, coords: &[T]) -> Vec<T> {
        let n = self.table.female_count();
        let nu = self.table.male_count();
        let mut out = vec![T::zero(); n + nu];
        for i in 0..n {
            if coords[i].is_zero() {
                continue;
            }
            for j in 0..nu {
                if coords[n + j].is_zero() {
                    continue;
                }
                let weight = coords[i].clone() * coords[n + j].clone();
                for (o, p) in out.iter_mut().zip(self.table.row(i, j)) {
                    if !p.is_zero() {
                        *o += p.clone() * weight.clone();
                    }
                }
            }
        }
        out
    }

    fn totals(&self, coords: &[T]) -> (T, T) {
        let n = self.table.female_count();
        let females = coords[..n].iter().cloned().fold(T::zero(), |a, c| a + c);
        let males = coords[n..].iter().cloned().fold(T::zero(), |a, c| a + c);
        (females, males)
    }

    /// Normalized image of raw coordinates (female types first, then male).
    ///
    /// Only the sub-population totals are checked; the coordinates need not
    /// lie on the simplex.
    pub fn apply_coords(&self, coords: &[T]) -> Result<Vec<T>> {
        self.expect_mode(OperatorMode::Normalized)?;
        if coords.len() != self.dimension() {
            return Err(Error::InvalidTable(format!(
                "expected {} coordinates, got {}",
                self.dimension(),
                coords.len()
            )));
        }
        let (females, males) = self.totals(coords);
        let floor = T::theta_floor();
        if females <= floor {
            return Err(Error::DegenerateSex(Sex::Female));
        }
        if males <= floor {
            return Err(Error::DegenerateSex(Sex::Male));
        }
        let denom = females * males;
        Ok(self
            .numerators(coords)
            .into_iter()
            .map(|c| c / denom.clone())
            .collect())
    }

    /// One generation on the simplex.
    pub fn apply(&self, s: &PopulationState<T>) -> Result<PopulationState<T>> {
        self.expect_square_four()?;
        let next = self.apply_coords(&s.to_array())?;
        let [x, y, u, v]: [T; 4] = next.try_into().expect("four coordinates");
        PopulationState::new(x, y, u, v)
    }

    /// Analytic Jacobian of the normalized map on raw coordinates.
    pub fn jacobian_coords(&self, coords: &[T]) -> Result<Vec<Vec<T>>> {
        self.expect_mode(OperatorMode::Normalized)?;
        let n = self.table.female_count();
        let dim = self.dimension();
        let (females, males) = self.totals(coords);
        if females <= T::theta_floor() {
            return Err(Error::DegenerateSex(Sex::Female));
        }
        if males <= T::theta_floor() {
            return Err(Error::DegenerateSex(Sex::Male));
        }
        let denom = females.clone() * males.clone();
        let numer = self.numerators(coords);
        let mut jac = vec![vec![T::zero(); dim]; dim];
        for (k, row) in jac.iter_mut().enumerate() {
            for (col, entry) in row.iter_mut().enumerate() {
                // derivative of the numerator and of the denominator along coordinate `col`
                let (d_num, d_den) = if col < n {
                    let d: T = (0..self.table.male_count())
                        .map(|j| self.table.row(col, j)[k].clone() * coords[n + j].clone())
                        .fold(T::zero(), |a, b| a + b);
                    (d, males.clone())
                } else {
                    let j = col - n;
                    let d: T = (0..n)
                        .map(|i| self.table.row(i, j)[k].clone() * coords[i].clone())
                        .fold(T::zero(), |a, b| a + b);
                    (d, females.clone())
                };
                *entry = d_num / denom.clone()
                    - numer[k].clone() * d_den / (denom.clone() * denom.clone());
            }
        }
        Ok(jac)
    }

    /// Unnormalized image on R^4.
    ///
    /// Homogeneous of degree two: `W(c s) = c^2 W(s)`. In float mode a
    /// coordinate above the overflow guard raises [`Error::Overflow`].
    pub fn apply_unnormalized(&self, s: &RawState4<T>) -> Result<RawState4<T>> {
        self.expect_mode(OperatorMode::Unnormalized)?;
        self.expect_square_four()?;
        let next: [T; 4] = self
            .numerators(s.coords())
            .try_into()
            .expect("four coordinates");
        if let Some(limit) = T::overflow_limit() {
            if let Some(index) = next.iter().position(|c| !c.is_finite_value() || *c > limit) {
                return Err(Error::Overflow {
                    index,
                    value: next[index].to_literal(),
                });
            }
        }
        RawState4::new(next)
    }
}
