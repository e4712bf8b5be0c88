//! Cross tables: offspring distributions for every (female, male) genotype pair.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Offspring distribution of every cross between a female and a male genotype.
///
/// `rows[i * males + j]` is the distribution produced by female type `i`
/// crossed with male type `j`, listed over the female labels followed by the
/// male labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossTable<T> {
    female: Vec<String>,
    male: Vec<String>,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> CrossTable<T> {
    pub fn new(female: Vec<String>, male: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        if female.is_empty() || male.is_empty() {
            return Err(Error::InvalidTable(
                "both sexes need at least one genotype".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for label in female.iter().chain(&male) {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidTable(format!(
                    "duplicate genotype label '{label}'"
                )));
            }
        }
        let width = female.len() + male.len();
        if rows.len() != female.len() * male.len() {
            return Err(Error::InvalidTable(format!(
                "expected {} crosses, found {}",
                female.len() * male.len(),
                rows.len()
            )));
        }
        for (k, row) in rows.iter().enumerate() {
            let (i, j) = (k / male.len(), k % male.len());
            let cross = format!("({}, {})", female[i], male[j]);
            if row.len() != width {
                return Err(Error::InvalidTable(format!(
                    "cross {cross} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(p) = row.iter().find(|p| p.is_negative() || !p.is_finite_value()) {
                return Err(Error::InvalidTable(format!(
                    "cross {cross} has invalid probability {}",
                    p.to_literal()
                )));
            }
            let sum = row.iter().cloned().fold(T::zero(), |acc, p| acc + p);
            if (sum.clone() - T::one()).abs() > T::sum_tolerance() {
                return Err(Error::InvalidTable(format!(
                    "cross {cross} sums to {}",
                    sum.to_literal()
                )));
            }
        }
        Ok(Self { female, male, rows })
    }

    /// The X-linked hemophilia table; `XhXh` is lethal and absent.
    ///
    /// ```text
    /// XX  x XY  -> 1/2 XX, 1/2 XY
    /// XX  x XhY -> 1/2 XXh, 1/2 XY
    /// XXh x XY  -> 1/4 XX, 1/4 XXh, 1/4 XY, 1/4 XhY
    /// XXh x XhY -> 1/3 XXh, 1/3 XY, 1/3 XhY
    /// ```
    pub fn hemophilia() -> Self {
        let q = |n, d| T::from_ratio(n, d);
        let z = || T::zero();
        let rows = vec![
            vec![q(1, 2), z(), q(1, 2), z()],
            vec![z(), q(1, 2), q(1, 2), z()],
            vec![q(1, 4), q(1, 4), q(1, 4), q(1, 4)],
            vec![z(), q(1, 3), q(1, 3), q(1, 3)],
        ];
        let labels = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self::new(labels(&["XX", "XXh"]), labels(&["XY", "XhY"]), rows)
            .expect("hemophilia table is valid")
    }

    pub fn female_types(&self) -> &[String] {
        &self.female
    }

    pub fn male_types(&self) -> &[String] {
        &self.male
    }

    pub fn female_count(&self) -> usize {
        self.female.len()
    }

    pub fn male_count(&self) -> usize {
        self.male.len()
    }

    /// Offspring distribution of female type `i` crossed with male type `j`.
    pub fn row(&self, i: usize, j: usize) -> &[T] {
        &self.rows[i * self.male.len() + j]
    }

    /// Probability of `label` among the offspring of cross `(i, j)`.
    pub fn entry(&self, i: usize, j: usize, label: &str) -> Option<&T> {
        let k = self
            .female
            .iter()
            .chain(&self.male)
            .position(|l| l == label)?;
        Some(&self.row(i, j)[k])
    }

    /// Serializes to the TOML cross-table document.
    pub fn to_toml(&self) -> String {
        let quote = |labels: &[String]| {
            labels
                .iter()
                .map(|l| format!("{l:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        writeln!(out, "female = [{}]", quote(&self.female)).unwrap();
        writeln!(out, "male = [{}]", quote(&self.male)).unwrap();
        let labels: Vec<&String> = self.female.iter().chain(&self.male).collect();
        for (i, f) in self.female.iter().enumerate() {
            for (j, m) in self.male.iter().enumerate() {
                let entries = self
                    .row(i, j)
                    .iter()
                    .zip(&labels)
                    .filter(|(p, _)| !p.is_zero())
                    .map(|(p, l)| format!("{l:?} = \"{}\"", p.to_literal()))
                    .collect::<Vec<_>>()
                    .join(", ");
                writeln!(
                    out,
                    "\n[[cross]]\nfemale = {f:?}\nmale = {m:?}\noffspring = {{ {entries} }}"
                )
                .unwrap();
            }
        }
        out
    }

    /// Parses the TOML cross-table document. Missing offspring labels are zero.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: TableDoc =
            toml::from_str(text).map_err(|e| Error::Parse(format!("cross table: {e}")))?;
        let labels: Vec<&String> = doc.female.iter().chain(&doc.male).collect();
        let mut rows: Vec<Option<Vec<T>>> = vec![None; doc.female.len() * doc.male.len()];
        for cross in &doc.cross {
            let i = doc.female.iter().position(|l| *l == cross.female);
            let j = doc.male.iter().position(|l| *l == cross.male);
            let (Some(i), Some(j)) = (i, j) else {
                return Err(Error::InvalidTable(format!(
                    "unknown cross ({}, {})",
                    cross.female, cross.male
                )));
            };
            let mut row = vec![T::zero(); labels.len()];
            for (label, p) in &cross.offspring {
                let k = labels.iter().position(|l| *l == label).ok_or_else(|| {
                    Error::InvalidTable(format!("unknown offspring genotype '{label}'"))
                })?;
                row[k] = p.parse()?;
            }
            let slot = &mut rows[i * doc.male.len() + j];
            if slot.is_some() {
                return Err(Error::InvalidTable(format!(
                    "cross ({}, {}) listed twice",
                    cross.female, cross.male
                )));
            }
            *slot = Some(row);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(k, r)| {
                r.ok_or_else(|| {
                    Error::InvalidTable(format!(
                        "missing cross ({}, {})",
                        doc.female[k / doc.male.len()],
                        doc.male[k % doc.male.len()]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.female, doc.male, rows)
    }
}

#[derive(Deserialize)]
struct TableDoc {
    female: Vec<String>,
    male: Vec<String>,
    #[serde(default)]
    cross: Vec<CrossDoc>,
}

#[derive(Deserialize)]
struct CrossDoc {
    female: String,
    male: String,
    offspring: BTreeMap<String, Probability>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Probability {
    Text(String),
    Number(f64),
}

impl Probability {
    fn parse<T: Scalar>(&self) -> Result<T> {
        match self {
            Probability::Text(s) => T::parse_literal(s),
            Probability::Number(x) => Ok(T::from_f64_value(*x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn hemophilia_rows() {
        let t = CrossTable::<Rational>::hemophilia();
        assert_eq!(t.row(0, 0), &[q(1, 2), q(0, 1), q(1, 2), q(0, 1)]);
        assert_eq!(t.entry(0, 0, "XX"), Some(&q(1, 2)));
        assert_eq!(t.entry(0, 1, "XXh"), Some(&q(1, 2)));
        assert!(t.row(1, 0).iter().all(|p| *p == q(1, 4)));
        let last: Rational = t
            .row(1, 1)
            .iter()
            .cloned()
            .fold(Rational::from_ratio(0, 1), |a, b| a + b);
        assert_eq!(last, q(1, 1));
        assert_eq!(t.entry(1, 1, "XX"), Some(&q(0, 1)));
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let t = CrossTable::<Rational>::hemophilia();
        let text = t.to_toml();
        assert_eq!(CrossTable::<Rational>::from_toml(&text).unwrap(), t);
        assert_eq!(
            CrossTable::<f64>::from_toml(&text).unwrap(),
            CrossTable::<f64>::hemophilia()
        );
    }

    #[test]
    fn parses_decimals_and_numbers() {
        let text = r#"
female = ["A"]
male = ["B"]

[[cross]]
female = "A"
male = "B"
offspring = { A = 0.5, B = "0.5" }
"#;
        let t = CrossTable::<Rational>::from_toml(text).unwrap();
        assert_eq!(t.row(0, 0), &[q(1, 2), q(1, 2)]);
    }

    #[test]
    fn rejects_bad_tables() {
        let bad_sum = "female = [\"A\"]\nmale = [\"B\"]\n[[cross]]\nfemale = \"A\"\nmale = \"B\"\noffspring = { A = \"1/2\", B = \"1/3\" }\n";
        assert!(matches!(
            CrossTable::<Rational>::from_toml(bad_sum),
            Err(Error::InvalidTable(_))
        ));
        let missing = "female = [\"A\", \"C\"]\nmale = [\"B\"]\n[[cross]]\nfemale = \"A\"\nmale = \"B\"\noffspring = { A = \"1\" }\n";
        assert!(matches!(
            CrossTable::<Rational>::from_toml(missing),
            Err(Error::InvalidTable(_))
        ));
        let unknown = "female = [\"A\"]\nmale = [\"B\"]\n[[cross]]\nfemale = \"A\"\nmale = \"B\"\noffspring = { Z = \"1\" }\n";
        assert!(CrossTable::<Rational>::from_toml(unknown).is_err());
        let negative = CrossTable::new(
            vec!["A".into()],
            vec!["B".into()],
            vec![vec![q(3, 2), q(-1, 2)]],
        );
        assert!(negative.is_err());
        let duplicate = CrossTable::new(
            vec!["A".into()],
            vec!["A".into()],
            vec![vec![q(1, 2), q(1, 2)]],
        );
        assert!(duplicate.is_err());
    }
}
