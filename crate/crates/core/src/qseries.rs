//! Truncated q-expansions with exact rational coefficients, and the rational
//! linear algebra used to project onto subspaces and decompose into spans.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `sum a_n q^n + O(q^{trunc+1})`: coefficients are known exactly for every
/// exponent `0..=trunc`. Equality compares truncation as well as coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn zero(trunc: usize) -> Self {
        QSeries {
            coeffs: vec![Rational::zero(); trunc + 1],
        }
    }

    /// Dense integer coefficients `a_0, a_1, ...`; the truncation is the last index.
    pub fn from_integers(coeffs: &[i64]) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        QSeries {
            coeffs: coeffs.iter().map(|&c| int(c)).collect(),
        }
    }

    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        QSeries { coeffs }
    }

    /// Builds a series from `(exponent, coefficient)` pairs; unlisted exponents are zero.
    pub fn from_sparse<I>(trunc: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut s = QSeries::zero(trunc);
        for (n, c) in terms {
            if n > trunc {
                return Err(Error::BeyondTruncation { index: n, trunc });
            }
            s.coeffs[n] += c;
        }
        Ok(s)
    }

    /// The monomial `c q^n` known through `q^trunc`.
    pub fn monomial(c: Rational, n: usize, trunc: usize) -> Result<Self> {
        QSeries::from_sparse(trunc, [(n, c)])
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<&Rational> {
        self.coeffs.get(n).ok_or(Error::BeyondTruncation {
            index: n,
            trunc: self.trunc(),
        })
    }

    /// Coefficient as an integer; panics if it is not one.
    pub fn int_coeff(&self, n: usize) -> Result<i64> {
        let c = self.coeff(n)?;
        assert!(c.is_integer(), "coefficient of q^{n} is {c}, not an integer");
        Ok(c.to_integer().to_i64().expect("coefficient fits in i64"))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn truncate(&self, trunc: usize) -> Result<Self> {
        if trunc > self.trunc() {
            return Err(Error::InsufficientTruncation {
                needed: trunc,
                have: self.trunc(),
            });
        }
        Ok(QSeries {
            coeffs: self.coeffs[..=trunc].to_vec(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Linear combination `sum c_i g_i`, truncated at the smallest truncation.
    pub fn combination(coeffs: &[Rational], series: &[&QSeries]) -> Self {
        assert_eq!(coeffs.len(), series.len());
        assert!(!series.is_empty());
        let trunc = series.iter().map(|s| s.trunc()).min().unwrap();
        let mut out = QSeries::zero(trunc);
        for (c, s) in coeffs.iter().zip(series) {
            if c.is_zero() {
                continue;
            }
            for (o, a) in out.coeffs.iter_mut().zip(&s.coeffs) {
                *o += c * a;
            }
        }
        out
    }

    /// Compares through `upto`, which may not exceed either truncation.
    pub fn agrees_with(&self, other: &QSeries, upto: usize) -> Result<bool> {
        let have = self.trunc().min(other.trunc());
        if upto > have {
            return Err(Error::InsufficientTruncation { needed: upto, have });
        }
        Ok(self.coeffs[..=upto] == other.coeffs[..=upto])
    }

    /// Compares through the smaller of the two truncations.
    pub fn agrees_through_common(&self, other: &QSeries) -> bool {
        let upto = self.trunc().min(other.trunc());
        self.coeffs[..=upto] == other.coeffs[..=upto]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// First exponent where the two series differ, if any, through the common truncation.
    pub fn first_difference(&self, other: &QSeries) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }
}

impl Add for &QSeries {
    type Output = QSeries;

    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.terms() {
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = !mag.is_one() || n == 0;
            if show_mag {
                if mag.is_integer() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            match n {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc() + 1)
    }
}

/// Solution of a span problem. `unique` is false when the generators are
/// dependent through the compared range; the free coefficients are then 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanSolution {
    pub coeffs: Vec<Rational>,
    pub unique: bool,
}

/// A member of a subspace, with its coordinates in the generating set.
#[derive(Debug, Clone)]
pub struct Combination {
    pub coeffs: Vec<Rational>,
    pub series: QSeries,
}

fn check_upto(series: &[&QSeries], upto: usize) -> Result<()> {
    for s in series {
        if upto > s.trunc() {
            return Err(Error::InsufficientTruncation {
                needed: upto,
                have: s.trunc(),
            });
        }
    }
    Ok(())
}

/// Reduces `m` in place to reduced row echelon form and returns pivot columns.
/// Only the first `ncols` columns are eligible as pivots.
fn rref(m: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (v, pv) in other.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Finds rationals `c_i` with `target = sum c_i g_i` on every exponent `<= upto`.
pub fn solve_in_span(
    target: &QSeries,
    generators: &[&QSeries],
    upto: usize,
) -> Result<Option<SpanSolution>> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    check_upto(generators, upto)?;
    check_upto(&[target], upto)?;
    let k = generators.len();
    let mut m: Vec<Vec<Rational>> = (0..=upto)
        .map(|n| {
            let mut row: Vec<Rational> = generators.iter().map(|g| g.coeffs[n].clone()).collect();
            row.push(target.coeffs[n].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m, k);
    // an all-zero row with a nonzero right-hand side means no solution
    if m[pivots.len()..].iter().any(|row| !row[k].is_zero()) {
        return Ok(None);
    }
    let mut coeffs = vec![Rational::zero(); k];
    for (r, &col) in pivots.iter().enumerate() {
        coeffs[col] = m[r][k].clone();
    }
    Ok(Some(SpanSolution {
        coeffs,
        unique: pivots.len() == k,
    }))
}

/// Basis of `{ sum c_i g_i : coefficient n vanishes for every forbidden n <= upto }`.
///
/// The coordinate vectors are returned in reduced row echelon form, so each
/// basis member has coordinate 1 on its own pivot generator and 0 on the
/// pivots of the others.
pub fn constrained_subspace<F>(
    generators: &[&QSeries],
    forbidden: F,
    upto: usize,
) -> Result<Vec<Combination>>
where
    F: Fn(usize) -> bool,
{
    if generators.is_empty() {
        return Ok(Vec::new());
    }
    check_upto(generators, upto)?;
    let k = generators.len();
    let mut constraints: Vec<Vec<Rational>> = (0..=upto)
        .filter(|&n| forbidden(n))
        .map(|n| generators.iter().map(|g| g.coeffs[n].clone()).collect())
        .collect();
    let pivots = rref(&mut constraints, k);
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();

    let mut kernel: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); k];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -constraints[r][f].clone();
            }
            v
        })
        .collect();
    rref(&mut kernel, k);

    Ok(kernel
        .into_iter()
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .map(|coeffs| {
            let series = QSeries::combination(&coeffs, generators);
            Combination { coeffs, series }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixtures;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_and_truncation() {
        let q = QSeries::monomial(int(1), 1, 5).unwrap();
        let two_q = &q + &q;
        assert_eq!(two_q.coeff(1).unwrap(), &int(2));
        assert_eq!(two_q.coeff(5).unwrap(), &int(0));
        assert_eq!(
            two_q.coeff(6),
            Err(Error::BeyondTruncation { index: 6, trunc: 5 })
        );
        let short = QSeries::zero(3);
        assert_eq!((&two_q + &short).trunc(), 3);
        assert!(two_q.agrees_with(&short, 4).is_err());
        assert!(QSeries::from_sparse(3, [(4, int(1))]).is_err());
        assert_eq!(format!("{}", &two_q - &q), "q + O(q^6)");
    }

    #[test]
    fn fixture_coefficients() {
        let fx = Fixtures::bundled();
        let h8 = fx.series("h8").unwrap();
        assert_eq!(h8.scale(&int(-2)).coeff(8).unwrap(), &int(-2));
        assert_eq!(fx.series("g1").unwrap().coeff(16).unwrap(), &int(-2));
    }

    #[test]
    fn solve_examples() {
        let fx = Fixtures::bundled();
        let g1 = fx.series("g1").unwrap();
        let sol = solve_in_span(g1, &[g1], 42).unwrap().unwrap();
        assert_eq!(sol.coeffs, vec![int(1)]);
        assert!(sol.unique);

        let q = QSeries::monomial(int(1), 1, 4).unwrap();
        let q2 = QSeries::monomial(int(1), 2, 4).unwrap();
        assert!(solve_in_span(&q2, &[&q], 4).unwrap().is_none());
        let sol = solve_in_span(&q, &[&q, &q], 4).unwrap().unwrap();
        assert!(!sol.unique);
        assert_eq!(sol.coeffs, vec![int(1), int(0)]);
        assert!(solve_in_span(&q, &[&q], 5).is_err());
    }

    #[test]
    fn constrained_subspace_small_examples() {
        let q_plus_q2 = QSeries::from_integers(&[0, 1, 1, 0, 0]);
        let basis = constrained_subspace(&[&q_plus_q2], |n| n % 4 == 2, 4).unwrap();
        assert!(basis.is_empty());

        let q = QSeries::from_integers(&[0, 1, 0, 0, 0]);
        let q3 = QSeries::from_integers(&[0, 0, 0, 1, 0]);
        let basis = constrained_subspace(&[&q, &q3], |n| n % 4 == 3, 4).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(basis[0].series.agrees_with(&q, 4).unwrap());
        assert_eq!(basis[0].coeffs, vec![int(1), int(0)]);
    }

    #[test]
    fn plus_space_of_the_bundled_basis() {
        let fx = Fixtures::bundled();
        let hs: Vec<&QSeries> = (1..=9).map(|i| fx.series(&format!("h{i}")).unwrap()).collect();
        let basis = constrained_subspace(&hs, |n| n % 4 == 2 || n % 4 == 3, 42).unwrap();
        assert_eq!(basis.len(), 3);
        for name in ["g1", "l1", "f1"] {
            let member = fx.series(name).unwrap();
            assert!(basis[..]
                .iter()
                .any(|b| b.series.agrees_with(member, 42).unwrap()));
        }
        for b in &basis {
            for n in (0..=42).filter(|n| n % 4 == 2 || n % 4 == 3) {
                assert!(b.series.coeff(n).unwrap().is_zero());
            }
        }
    }

    fn small_series(len: usize) -> impl Strategy<Value = QSeries> {
        prop::collection::vec(-3i64..=3, len).prop_map(|v| QSeries::from_integers(&v))
    }

    proptest! {
        #[test]
        fn span_solutions_recombine_exactly(
            gens in prop::collection::vec(small_series(12), 1..5),
            weights in prop::collection::vec(-4i64..=4, 5),
        ) {
            let refs: Vec<&QSeries> = gens.iter().collect();
            let w: Vec<Rational> = weights[..gens.len()].iter().map(|&x| int(x)).collect();
            let target = QSeries::combination(&w, &refs);
            let sol = solve_in_span(&target, &refs, 11).unwrap().expect("target is in the span");
            let rebuilt = QSeries::combination(&sol.coeffs, &refs);
            prop_assert!(rebuilt.agrees_with(&target, 11).unwrap());
        }

        #[test]
        fn constrained_members_vanish_where_forbidden(
            gens in prop::collection::vec(small_series(16), 1..6),
            modulus in 2usize..5,
        ) {
            let refs: Vec<&QSeries> = gens.iter().collect();
            let basis = constrained_subspace(&refs, |n| n % modulus == 1, 15).unwrap();
            prop_assert!(basis.len() <= gens.len());
            for b in &basis {
                for n in (0..=15).filter(|n| n % modulus == 1) {
                    prop_assert!(b.series.coeff(n).unwrap().is_zero());
                }
            }
        }
    }
}
