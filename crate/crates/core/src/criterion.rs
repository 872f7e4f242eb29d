//! Rank prediction for `E(Q(sqrt(d)))`, `E = X_0(49)`, by comparing the
//! number of representations of `d` by two ternary forms. The prediction is
//! conditional on the Birch and Swinnerton-Dyer conjecture.

use serde::{Deserialize, Serialize};

use crate::arith::{kronecker, require_squarefree};
use crate::error::{Error, Result};
use crate::theta::TernaryForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    I,
    Ii,
    Iii,
    NegativeD,
    BothIiAndIii,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::I => "i",
            Case::Ii => "ii",
            Case::Iii => "iii",
            Case::NegativeD => "negative-d",
            Case::BothIiAndIii => "both-ii-and-iii",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionStep {
    /// `d -> -d/7`, using `E(Q(sqrt(d))) ~ E(Q(sqrt(-7 d)))`.
    NegateAndDivideBySeven { from: i64, to: i64 },
    /// Negative `d`: the twist has root number `-1`.
    NegativeShortcut { d: i64 },
}

/// Coefficients `[xx, yy, zz, xy, xz, yz]` of the two forms compared in each case.
pub const CASE_I_FORMS: [[i64; 6]; 2] = [[28, 1, 14, 0, 14, 0], [49, 2, 4, 0, 0, 2]];
pub const CASE_II_FORMS: [[i64; 6]; 2] = [[12, 3, 12, 2, 10, 2], [17, 5, 5, 2, -2, 4]];
/// The first form is `13x^2 + 12y^2 + 12z^2 + 8xy - 8xz + 4yz`, the form of `M1`.
pub const CASE_III_FORMS: [[i64; 6]; 2] = [[13, 12, 12, 8, -8, 4], [17, 5, 17, 2, 6, 2]];
/// The case iii first form with `-4yz`, as printed; it is not equivalent to `M1`.
pub const CASE_III_FIRST_AS_PRINTED: [i64; 6] = [13, 12, 12, 8, -8, -4];

fn case_forms(case: Case) -> Option<&'static [[i64; 6]; 2]> {
    match case {
        Case::I => Some(&CASE_I_FORMS),
        Case::Ii => Some(&CASE_II_FORMS),
        Case::Iii | Case::BothIiAndIii => Some(&CASE_III_FORMS),
        Case::NegativeD => None,
    }
}

/// Number of representations of `d` by each form of the pair.
pub fn count_pair(forms: &[[i64; 6]; 2], d: u64) -> [u64; 2] {
    forms.map(|f| {
        TernaryForm::from_polynomial(f)
            .expect("criterion forms are positive definite")
            .representation_count(d)
    })
}

/// Weight 3/2 form whose coefficient is read off by each case.
pub fn form_index(case: Case) -> Option<u8> {
    match case {
        Case::I => Some(2),
        Case::Ii => Some(3),
        Case::Iii | Case::BothIiAndIii => Some(1),
        Case::NegativeD => None,
    }
}

/// `c_d(f_i)` from the counts: `f2, f3` are (first - second)/2, `f1` is (second - first)/2.
fn coefficient(case: Case, counts: [u64; 2]) -> i64 {
    let diff = (counts[0] as i64 - counts[1] as i64) / 2;
    match case {
        Case::Iii | Case::BothIiAndIii => -diff,
        _ => diff,
    }
}

/// Replaces `d` by `-d/7` when `7 | d`.
pub fn reduce_discriminant(d: i64) -> Result<(i64, Vec<ReductionStep>)> {
    if d == 0 {
        return Err(Error::Zero);
    }
    require_squarefree(d)?;
    let mut trail = Vec::new();
    let mut r = d;
    if r % 7 == 0 {
        let to = -r / 7;
        trail.push(ReductionStep::NegateAndDivideBySeven { from: r, to });
        r = to;
    }
    if r < 0 {
        trail.push(ReductionStep::NegativeShortcut { d: r });
    }
    Ok((r, trail))
}

/// Case for a positive squarefree `d` prime to 7.
pub fn classify(d: i64) -> Result<Case> {
    if d <= 0 {
        return Err(Error::InvalidArgument(format!("{d} is not positive")));
    }
    require_squarefree(d)?;
    match kronecker(d, 7) {
        0 => Err(Error::DivisibleBySeven(d)),
        1 => Ok(Case::I),
        _ => Ok(match d % 8 {
            1 => Case::BothIiAndIii,
            5 => Case::Iii,
            _ => Case::Ii,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub input_d: i64,
    pub reduced_d: i64,
    pub reduction_trail: Vec<ReductionStep>,
    pub case: Case,
    pub counts: Option<[u64; 2]>,
    /// Case ii counts when both ii and iii apply.
    pub secondary_counts: Option<[u64; 2]>,
    pub coefficient: Option<i64>,
    pub form_index: Option<u8>,
    pub predicted_positive_rank: bool,
    pub bsd_conditional: bool,
}

/// The stable JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub d: i64,
    pub reduced_d: i64,
    pub case: String,
    pub counts: Option<[u64; 2]>,
    pub positive_rank_predicted: bool,
    pub bsd_conditional: bool,
}

impl CriterionReport {
    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            d: self.input_d,
            reduced_d: self.reduced_d,
            case: self.case.label().to_string(),
            counts: self.counts,
            positive_rank_predicted: self.predicted_positive_rank,
            bsd_conditional: self.bsd_conditional,
        }
    }
}

pub fn predict(d: i64) -> Result<CriterionReport> {
    let (reduced, trail) = reduce_discriminant(d)?;
    let mut report = CriterionReport {
        input_d: d,
        reduced_d: reduced,
        reduction_trail: trail,
        case: Case::NegativeD,
        counts: None,
        secondary_counts: None,
        coefficient: None,
        form_index: None,
        predicted_positive_rank: true,
        bsd_conditional: true,
    };
    if reduced < 0 {
        return Ok(report);
    }
    let case = classify(reduced)?;
    let n = reduced as u64;
    let counts = count_pair(case_forms(case).expect("positive case"), n);
    let equal = counts[0] == counts[1];
    if case == Case::BothIiAndIii {
        let other = count_pair(&CASE_II_FORMS, n);
        if (other[0] == other[1]) != equal {
            return Err(Error::Inconsistent(format!(
                "cases ii and iii disagree at d = {reduced}: {other:?} vs {counts:?}"
            )));
        }
        report.secondary_counts = Some(other);
    }
    report.case = case;
    report.counts = Some(counts);
    report.coefficient = Some(coefficient(case, counts));
    report.form_index = form_index(case);
    report.predicted_positive_rank = equal;
    Ok(report)
}

/// A representative discriminant for each class, with its weight 3/2 coefficient
/// and central value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompanionRow {
    pub form_index: u8,
    pub d2: i64,
    pub coefficient: i64,
    pub l_value: f64,
}

const fn row(form_index: u8, d2: i64, coefficient: i64, l_value: f64) -> CompanionRow {
    CompanionRow { form_index, d2, coefficient, l_value }
}

/// Rows keyed by `(d/7)`, parity of `d` and `d` (odd) or `d/2` (even) mod 8.
pub const COMPANION_ROWS: [(i8, bool, i64, CompanionRow); 16] = [
    (1, false, 1, row(2, 1, 1, 0.9666)),
    (1, false, 3, row(2, 51, -2, 1.0828)),
    (1, false, 5, row(2, 29, 4, 0.7180)),
    (1, false, 7, row(2, 15, 2, 1.9967)),
    (1, true, 1, row(2, 2, -1, 1.3670)),
    (1, true, 3, row(2, 22, -2, 1.6487)),
    (1, true, 5, row(2, 58, -2, 1.0154)),
    (1, true, 7, row(2, 30, 2, 1.4118)),
    (-1, false, 3, row(3, 3, 1, 2.2323)),
    (-1, false, 7, row(3, 31, -2, 2.777)),
    (-1, true, 1, row(3, 34, 1, 0.6631)),
    (-1, true, 3, row(3, 6, -1, 1.5785)),
    (-1, true, 5, row(3, 26, 2, 3.0332)),
    (-1, true, 7, row(3, 94, 2, 1.5952)),
    (-1, false, 1, row(1, 17, -1, 0.4688)),
    (-1, false, 5, row(1, 5, 1, 0.8646)),
];

pub fn companion(d: i64) -> Result<CompanionRow> {
    classify(d)?;
    let residue = kronecker(d, 7);
    let even = d % 2 == 0;
    let key = if even { (d / 2) % 8 } else { d % 8 };
    COMPANION_ROWS
        .iter()
        .find(|(r, e, k, _)| *r == residue && *e == even && *k == key)
        .map(|&(.., row)| row)
        .ok_or_else(|| Error::Inconsistent(format!("no companion row for d = {d}")))
}
