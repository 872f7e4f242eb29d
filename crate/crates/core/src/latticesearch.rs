//! Search for even positive definite ternary Gram matrices of a given level
//! and character, and decomposition of target series in their theta span.
//!
//! A form of level `N` has `N A^{-1}` integral, so `det A` divides `N^3`. The
//! search runs over the admissible determinants and solves for the last
//! diagonal entry:
//! `f = (det + a e^2 - 2bce + d c^2) / (ad - b^2)`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::squarefree_decompose;
use crate::error::{Error, Result};
use crate::qseries::{solve_in_span, QSeries, SpanSolution};
use crate::theta::TernaryForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConstraints {
    pub max_entry: i64,
    pub level_divides: u64,
    pub required_squarefree_kernel: i64,
    pub diagonal_only: bool,
    /// Require the level to equal `level_divides` rather than divide it.
    pub exact_level: bool,
    /// Enumerate one representative per signed-permutation orbit.
    pub reduce_symmetry: bool,
}

impl Default for SearchConstraints {
    fn default() -> Self {
        SearchConstraints {
            max_entry: 98,
            level_divides: 196,
            required_squarefree_kernel: 7,
            diagonal_only: false,
            exact_level: true,
            reduce_symmetry: true,
        }
    }
}

impl SearchConstraints {
    pub fn with_max_entry(max_entry: i64) -> Self {
        SearchConstraints { max_entry, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.max_entry < 2 {
            return Err(Error::InvalidArgument(format!("max entry {} is below 2", self.max_entry)));
        }
        if self.level_divides % 4 != 0 {
            return Err(Error::LevelNotDivisibleByFour(self.level_divides));
        }
        Ok(())
    }

    /// Determinants `det | N^3` whose `8 det` has the required squarefree part.
    pub fn admissible_determinants(&self) -> Vec<i64> {
        let n3 = (self.level_divides as i128).pow(3);
        let mut out = Vec::new();
        let mut k: i128 = 1;
        while k * k <= n3 {
            if n3 % k == 0 {
                out.push(k);
                if k * k != n3 {
                    out.push(n3 / k);
                }
            }
            k += 1;
        }
        let mut dets: Vec<i64> = out
            .into_iter()
            .filter(|&det| det <= i64::MAX as i128 / 8)
            .map(|det| det as i64)
            .filter(|&det| {
                squarefree_decompose(8 * det).map(|(s, _)| s) == Ok(self.required_squarefree_kernel)
            })
            .collect();
        dets.sort_unstable();
        dets
    }

    fn accepts(&self, form: &TernaryForm) -> bool {
        let lc = form.level_and_character();
        let level_ok = if self.exact_level {
            lc.level == self.level_divides
        } else {
            self.level_divides % lc.level == 0
        };
        level_ok && lc.squarefree_kernel == self.required_squarefree_kernel
    }
}

/// The 48 signed permutation matrices.
fn signed_permutations() -> Vec<[[i64; 3]; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for signs in 0..8 {
            let mut u = [[0i64; 3]; 3];
            for (col, &row) in perm.iter().enumerate() {
                u[row][col] = if signs >> col & 1 == 1 { -1 } else { 1 };
            }
            out.push(u);
        }
    }
    out
}

/// Lexicographically smallest upper triangle over signed permutations of the variables.
pub fn canonical_form(form: &TernaryForm) -> TernaryForm {
    signed_permutations()
        .into_iter()
        .map(|u| form.transform(u).expect("signed permutations preserve definiteness"))
        .min_by_key(|f| f.upper())
        .expect("nonempty group")
}

/// Bounds for `t` with `alpha t^2 + 2 beta t + gamma <= 0`.
fn interval(alpha: i64, beta: i64, gamma: i64) -> Option<(i64, i64)> {
    let (alpha, beta, gamma) = (alpha as i128, beta as i128, gamma as i128);
    let disc = beta * beta - alpha * gamma;
    if disc < 0 {
        return None;
    }
    let s = disc.isqrt();
    let lo = num_integer::Integer::div_ceil(&(-beta - s), &alpha) as i64;
    let hi = num_integer::Integer::div_floor(&(-beta + s), &alpha) as i64;
    (lo <= hi).then_some((lo, hi))
}

/// Forms with first diagonal entry `a`, as upper triangles.
fn search_row(c: &SearchConstraints, dets: &[i64], a: i64) -> Vec<[i64; 6]> {
    let max = c.max_entry;
    let det_max = *dets.last().expect("nonempty");
    let det_min = dets[0];
    let mut found = Vec::new();
    let d_start = if c.reduce_symmetry { a } else { 2 };
    for d in (d_start..=max).step_by(2) {
        let f_min = if c.reduce_symmetry { d } else { 2 };
        let b_lo = if c.reduce_symmetry || c.diagonal_only { 0 } else { -max };
        let b_hi = if c.diagonal_only { 0 } else { max };
        for b in b_lo..=b_hi {
            let m = a * d - b * b;
            if m <= 0 {
                continue;
            }
            // a e^2 - 2bce + d c^2 = f m - det lies in [f_min m - det_max, max m - det_min]
            let q_max = max * m - det_min;
            let q_min = f_min * m - det_max;
            if q_max < 0 {
                continue;
            }
            // c ranges over the projection of the ellipse q(e, c) <= q_max
            let Some((c_lo, c_hi)) = interval(m, 0, -a * q_max) else {
                continue;
            };
            let c_lo = if c.diagonal_only { 0 } else if c.reduce_symmetry { c_lo.max(0) } else { c_lo.max(-max) };
            let c_hi = if c.diagonal_only { 0 } else { c_hi.min(max) };
            for cc in c_lo..=c_hi {
                let Some((e_lo, e_hi)) = interval(a, -b * cc, d * cc * cc - q_max) else {
                    continue;
                };
                let (e_lo, e_hi) = if c.diagonal_only { (0, 0) } else { (e_lo.max(-max), e_hi.min(max)) };
                for e in e_lo..=e_hi {
                    let q = a * e * e - 2 * b * cc * e + d * cc * cc;
                    if q < q_min {
                        continue;
                    }
                    for &det in dets {
                        let num = det + q;
                        if num % m != 0 {
                            continue;
                        }
                        let f = num / m;
                        if f < f_min || f > max || f % 2 != 0 {
                            continue;
                        }
                        // pairwise minors as a cheap filter before the full test
                        if a * f - cc * cc <= 0 || d * f - e * e <= 0 {
                            continue;
                        }
                        let Ok(form) = TernaryForm::from_upper([a, b, cc, d, e, f]) else {
                            continue;
                        };
                        if c.accepts(&form) {
                            found.push(canonical_form(&form).upper());
                        }
                    }
                }
            }
        }
    }
    found
}

/// Canonical representatives of every form satisfying `c`, in lexicographic order.
pub fn enumerate_candidates(c: &SearchConstraints) -> Result<Vec<TernaryForm>> {
    c.validate()?;
    let dets = c.admissible_determinants();
    if dets.is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<[i64; 6]>> = (2..=c.max_entry)
        .step_by(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| search_row(c, &dets, a))
        .collect();
    let unique: BTreeSet<[i64; 6]> = rows.into_iter().flatten().collect();
    Ok(unique
        .into_iter()
        .map(|u| TernaryForm::from_upper(u).expect("found forms are valid"))
        .collect())
}

/// Decomposition of each target in the span of the pool's theta series through `q^upto`.
pub fn decompose_targets(
    targets: &[&QSeries],
    pool: &[TernaryForm],
    upto: usize,
) -> Result<Vec<Option<SpanSolution>>> {
    if pool.is_empty() {
        return Ok(vec![None; targets.len()]);
    }
    let thetas: Vec<QSeries> = pool.par_iter().map(|f| f.theta_series(upto)).collect();
    let refs: Vec<&QSeries> = thetas.iter().collect();
    targets.iter().map(|t| solve_in_span(t, &refs, upto)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{theta_combination, Fixtures, DIAGONAL_GRAMS, THETA_GRAMS};
    use crate::qseries::rat;

    fn m(i: usize) -> TernaryForm {
        TernaryForm::from_upper(THETA_GRAMS[i - 1]).unwrap()
    }

    #[test]
    fn determinants_for_level_196() {
        let dets = SearchConstraints::default().admissible_determinants();
        let mut expected: Vec<i64> = [2, 8, 32]
            .iter()
            .flat_map(|&p| [7, 343, 16807].map(|q| p * q))
            .collect();
        expected.sort_unstable();
        assert_eq!(dets, expected);
        for i in 1..=13 {
            assert!(dets.contains(&m(i).det()), "M{i}");
        }
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant() {
        let base = canonical_form(&m(5));
        for u in signed_permutations() {
            assert_eq!(canonical_form(&m(5).transform(u).unwrap()), base);
        }
        assert_eq!(signed_permutations().len(), 48);
    }

    #[test]
    fn diagonal_search_finds_the_two_forms() {
        let c = SearchConstraints { diagonal_only: true, ..SearchConstraints::default() };
        let found = enumerate_candidates(&c).unwrap();
        let expected: BTreeSet<_> = DIAGONAL_GRAMS
            .iter()
            .map(|&g| canonical_form(&TernaryForm::from_upper(g).unwrap()))
            .collect();
        assert_eq!(found.into_iter().collect::<BTreeSet<_>>(), expected);
        let fx = Fixtures::bundled();
        for (g, name) in DIAGONAL_GRAMS.iter().zip(["theta_A1", "theta_A2"]) {
            let th = TernaryForm::from_upper(*g).unwrap().theta_series(42);
            assert_eq!(&th, fx.series(name).unwrap());
        }
    }

    #[test]
    fn diagonal_search_with_divisible_level_adds_level_28_forms() {
        let c = SearchConstraints { diagonal_only: true, exact_level: false, ..SearchConstraints::default() };
        let found: Vec<[i64; 6]> = enumerate_candidates(&c).unwrap().iter().map(|f| f.upper()).collect();
        assert_eq!(found.len(), 4);
        assert!(found.contains(&[2, 0, 0, 2, 0, 14]));
        assert!(found.contains(&[14, 0, 0, 14, 0, 14]));
    }

    #[test]
    fn tiny_bound_is_empty() {
        assert!(enumerate_candidates(&SearchConstraints::with_max_entry(2)).unwrap().is_empty());
        assert!(enumerate_candidates(&SearchConstraints::with_max_entry(1)).is_err());
    }

    #[test]
    fn symmetry_reduction_loses_nothing() {
        let reduced = SearchConstraints::with_max_entry(34);
        let full = SearchConstraints { reduce_symmetry: false, ..reduced };
        let a = enumerate_candidates(&reduced).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, enumerate_candidates(&full).unwrap());
        assert!(a.contains(&canonical_form(&m(13))));
        for f in &a {
            let lc = f.level_and_character();
            assert_eq!(lc.level, 196);
            assert_eq!(lc.squarefree_kernel, 7);
        }
    }

    #[test]
    fn decompositions() {
        let fx = Fixtures::bundled();
        let f1 = fx.series("f1").unwrap();
        let g1 = fx.series("g1").unwrap();
        let sol = decompose_targets(&[f1], &[m(1), m(2)], 42).unwrap();
        assert_eq!(sol[0].as_ref().unwrap().coeffs, vec![rat(-1, 2), rat(1, 2)]);
        assert!(decompose_targets(&[f1], &[m(6)], 42).unwrap()[0].is_none());
        let pool: Vec<TernaryForm> = (3..=11).map(m).collect();
        let sol = decompose_targets(&[g1], &pool, 42).unwrap()[0].clone().unwrap();
        assert!(sol.unique);
        let expected: Vec<_> = theta_combination("g1").unwrap().iter().map(|&(_, n, d)| rat(n, d)).collect();
        assert_eq!(sol.coeffs, expected);
    }

    #[test]
    fn theta_series_of_the_thirteen_matrices_are_independent() {
        let thetas: Vec<QSeries> = (1..=13).map(|i| m(i).theta_series(42)).collect();
        let refs: Vec<&QSeries> = thetas.iter().collect();
        let sol = solve_in_span(&QSeries::zero(42), &refs, 42).unwrap().unwrap();
        assert!(sol.unique);
    }
}
