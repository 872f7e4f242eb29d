//! Bundled q-expansion data and the line-oriented fixture format.
//!
//! A fixture file holds one JSON record per line:
//!
//! ```text
//! {"name":"h7","weight":"1/2-integral","level":196,"character":28,"trunc":42,"coeffs":[[7,1,1],[14,-1,1],[28,-1,1]],"note":"..."}
//! ```
//!
//! `weight` is either the tag `"1/2-integral"` or an integer weight, `character`
//! is the Kronecker label of the nebentypus, and `coeffs` lists
//! `[exponent, numerator, denominator]` triples. Every exponent up to `trunc`
//! that is not listed is zero. Writing a parsed file back out reproduces it
//! byte for byte.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{QSeries, Rational};

const BUNDLED: &str = include_str!("../data/fixtures.jsonl");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightTag {
    Integer(u32),
    Tag(String),
}

impl WeightTag {
    pub const HALF_INTEGRAL: &'static str = "1/2-integral";

    pub fn half_integral() -> Self {
        WeightTag::Tag(Self::HALF_INTEGRAL.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub name: String,
    pub weight: WeightTag,
    pub level: u64,
    pub character: i64,
    pub trunc: usize,
    pub coeffs: Vec<[i64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FixtureRecord {
    fn validate(&self) -> Result<()> {
        if let WeightTag::Tag(t) = &self.weight {
            if t != WeightTag::HALF_INTEGRAL {
                return Err(Error::FixtureFormat(format!("{}: unknown weight tag {t}", self.name)));
            }
        }
        let mut last = None;
        for &[e, _, den] in &self.coeffs {
            if den <= 0 {
                return Err(Error::FixtureFormat(format!("{}: denominator {den}", self.name)));
            }
            if e < 0 || e as usize > self.trunc {
                return Err(Error::FixtureFormat(format!(
                    "{}: exponent {e} outside 0..={}",
                    self.name, self.trunc
                )));
            }
            if last.is_some_and(|l| l >= e) {
                return Err(Error::FixtureFormat(format!("{}: exponents not increasing", self.name)));
            }
            last = Some(e);
        }
        Ok(())
    }

    pub fn series(&self) -> QSeries {
        let terms = self.coeffs.iter().map(|&[e, num, den]| {
            (e as usize, Rational::new(BigInt::from(num), BigInt::from(den)))
        });
        QSeries::from_sparse(self.trunc, terms).expect("validated record")
    }

    /// Record for `series`; coefficients must fit in `i64`.
    pub fn from_series(
        name: &str,
        weight: WeightTag,
        level: u64,
        character: i64,
        series: &QSeries,
        note: Option<String>,
    ) -> Self {
        let coeffs = series
            .terms()
            .map(|(n, c)| {
                [
                    n as i64,
                    c.numer().to_i64().expect("numerator fits in i64"),
                    c.denom().to_i64().expect("denominator fits in i64"),
                ]
            })
            .collect();
        FixtureRecord {
            name: name.to_string(),
            weight,
            level,
            character,
            trunc: series.trunc(),
            coeffs,
            note,
        }
    }
}

pub fn parse_records(text: &str) -> Result<Vec<FixtureRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let rec: FixtureRecord =
                serde_json::from_str(line).map_err(|e| Error::FixtureFormat(e.to_string()))?;
            rec.validate()?;
            Ok(rec)
        })
        .collect()
}

pub fn write_records(records: &[FixtureRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Named series loaded from a fixture file.
#[derive(Debug, Clone)]
pub struct Fixtures {
    records: Vec<FixtureRecord>,
    series: BTreeMap<String, QSeries>,
}

impl Fixtures {
    pub fn parse(text: &str) -> Result<Self> {
        let records = parse_records(text)?;
        let series = records.iter().map(|r| (r.name.clone(), r.series())).collect();
        Ok(Fixtures { records, series })
    }

    /// The data shipped with the crate: the weight 3/2 basis `h1..h9`, the forms
    /// `g1, l1, f1, f2, f3, h`, the old form and two displayed lifts, and the
    /// diagonal theta series `theta_A1`, `theta_A2`.
    pub fn bundled() -> Self {
        Fixtures::parse(BUNDLED).expect("bundled fixtures are well formed")
    }

    pub fn bundled_text() -> &'static str {
        BUNDLED
    }

    pub fn series(&self, name: &str) -> Result<&QSeries> {
        self.series
            .get(name)
            .ok_or_else(|| Error::UnknownFixture(name.to_string()))
    }

    pub fn record(&self, name: &str) -> Result<&FixtureRecord> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownFixture(name.to_string()))
    }

    pub fn records(&self) -> &[FixtureRecord] {
        &self.records
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.name.as_str())
    }
}

/// Gram matrices `M1..M13` whose theta series span `f1, f2, f3, g1`, in the
/// upper-triangle order `a, b, c, d, e, f` of `[[a,b,c],[b,d,e],[c,e,f]]`.
///
/// `M3` has top-left entry 36. With 34 the determinant is 2576 = 2^4 * 7 * 23,
/// which is incompatible with level 196, and the `g1` combination fails from q^17 on.
pub const THETA_GRAMS: [[i64; 6]; 13] = [
    [26, 8, -8, 24, 4, 24],
    [34, 2, 6, 10, 2, 34],
    [36, 2, -6, 4, 2, 22],
    [56, 0, 14, 2, 0, 28],
    [70, 14, -28, 42, 14, 70],
    [98, 0, 0, 2, 0, 14],
    [98, 0, 0, 4, 2, 8],
    [98, 0, 0, 8, 4, 16],
    [98, 0, 0, 14, 7, 28],
    [98, 0, 0, 14, 0, 98],
    [98, 0, 0, 28, 14, 56],
    [24, 2, 10, 6, 2, 24],
    [34, 2, -2, 10, 4, 10],
];

/// `M3` as it appears in print, kept to document why it is not used.
pub const M3_AS_PRINTED: [i64; 6] = [34, 2, -6, 4, 2, 22];

/// The two diagonal forms `diag(98, 98, 14)` and `diag(98, 2, 14)`.
pub const DIAGONAL_GRAMS: [[i64; 6]; 2] = [[98, 0, 0, 98, 0, 14], [98, 0, 0, 2, 0, 14]];

/// Theta combinations: `(matrix index 1..=13, numerator, denominator)`.
pub fn theta_combination(name: &str) -> Option<&'static [(usize, i64, i64)]> {
    const F1: &[(usize, i64, i64)] = &[(1, -1, 2), (2, 1, 2)];
    const F2: &[(usize, i64, i64)] = &[(4, 1, 2), (7, -1, 2)];
    const F3: &[(usize, i64, i64)] = &[(12, 1, 2), (13, -1, 2)];
    const G1: &[(usize, i64, i64)] = &[
        (3, -1, 4),
        (4, 1, 4),
        (5, 1, 4),
        (6, 1, 4),
        (7, 1, 4),
        (8, -1, 1),
        (9, -1, 2),
        (10, 1, 4),
        (11, 1, 2),
    ];
    match name {
        "f1" => Some(F1),
        "f2" => Some(F2),
        "f3" => Some(F3),
        "g1" => Some(G1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    #[test]
    fn bundled_file_round_trips_byte_for_byte() {
        let records = parse_records(BUNDLED).unwrap();
        assert_eq!(write_records(&records), BUNDLED);
    }

    #[test]
    fn record_rebuilt_from_series_matches() {
        let fx = Fixtures::bundled();
        for rec in fx.records() {
            let rebuilt = FixtureRecord::from_series(
                &rec.name,
                rec.weight.clone(),
                rec.level,
                rec.character,
                &rec.series(),
                rec.note.clone(),
            );
            assert_eq!(&rebuilt, rec);
        }
    }

    #[test]
    fn malformed_records_are_rejected() {
        let bad_exp = r#"{"name":"x","weight":2,"level":1,"character":1,"trunc":3,"coeffs":[[4,1,1]]}"#;
        assert!(parse_records(bad_exp).is_err());
        let bad_tag = r#"{"name":"x","weight":"half","level":1,"character":1,"trunc":3,"coeffs":[]}"#;
        assert!(parse_records(bad_tag).is_err());
        let bad_den = r#"{"name":"x","weight":2,"level":1,"character":1,"trunc":3,"coeffs":[[1,1,0]]}"#;
        assert!(parse_records(bad_den).is_err());
    }

    #[test]
    fn displayed_relations_between_fixtures() {
        let fx = Fixtures::bundled();
        let s = |n: &str| fx.series(n).unwrap();
        let g1 = QSeries::combination(&[int(1), int(-2), int(1)], &[s("h1"), s("h8"), s("h9")]);
        assert!(g1.agrees_with(s("g1"), 42).unwrap());
        let l1 = QSeries::combination(&[int(1), int(1), int(-2)], &[s("h4"), s("h8"), s("h9")]);
        assert!(l1.agrees_with(s("l1"), 42).unwrap());
        assert!(s("f1").agrees_with(s("h5"), 42).unwrap());
        let h = QSeries::combination(&[int(1), int(2)], &[s("g1"), s("l1")]);
        assert!(h.agrees_with(s("h"), 42).unwrap());
        assert_eq!(fx.record("F_old").unwrap().weight, WeightTag::Integer(2));
        assert!(fx.series("nope").is_err());
    }
}
