//! Positive definite ternary quadratic forms `Q(v) = v^T A v / 2` with an even
//! integral Gram matrix `A`, their representation numbers and theta series.
//!
//! Enumeration of `{v : Q(v) <= n}` uses the `A = L^T D L` decomposition with
//! denominators cleared, so every bound is an exact integer inequality:
//!
//! * `z^2 * det A <= 2n (ad - b^2)`
//! * `(ad - b^2) y^2 + 2(ae - bc) yz + (af - c^2) z^2 <= 2n a`
//! * `a x^2 + 2(by + cz) x + (dy^2 + 2eyz + fz^2) <= 2n`
//!
//! for `A = [[a,b,c],[b,d,e],[c,e,f]]`. Each line is a one-variable quadratic
//! whose integer solution interval is computed with an integer square root,
//! so no lattice point is lost to rounding.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::squarefree_decompose;
use crate::error::{Error, Result};
use crate::qseries::QSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryForm {
    gram: [[i64; 3]; 3],
}

/// Level, character label `det(2A)` and its squarefree part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCharacter {
    pub level: u64,
    pub char_label: i64,
    pub squarefree_kernel: i64,
}

/// Integers `t` with `alpha t^2 + 2 beta t + gamma <= 0`, for `alpha > 0`.
///
/// The condition is `(alpha t + beta)^2 <= beta^2 - alpha gamma`, and since
/// `alpha t + beta` is an integer this is `|alpha t + beta| <= isqrt(disc)`.
fn quadratic_interval(alpha: i128, beta: i128, gamma: i128) -> Option<(i64, i64)> {
    debug_assert!(alpha > 0);
    let disc = beta * beta - alpha * gamma;
    if disc < 0 {
        return None;
    }
    let s = disc.isqrt();
    let lo = Integer::div_ceil(&(-beta - s), &alpha);
    let hi = Integer::div_floor(&(-beta + s), &alpha);
    (lo <= hi).then_some((lo as i64, hi as i64))
}

impl TernaryForm {
    /// Checks symmetry, even diagonal and positive definiteness.
    pub fn validate(gram: [[i64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Asymmetric);
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            if row[i] % 2 != 0 {
                return Err(Error::OddDiagonal(i));
            }
        }
        let f = TernaryForm { gram };
        let [a, b, _, d, _, _] = f.upper();
        if a <= 0 {
            return Err(Error::NotPositiveDefinite(1));
        }
        if a * d - b * b <= 0 {
            return Err(Error::NotPositiveDefinite(2));
        }
        if f.det() <= 0 {
            return Err(Error::NotPositiveDefinite(3));
        }
        Ok(f)
    }

    /// From the upper triangle `a, b, c, d, e, f`.
    pub fn from_upper(u: [i64; 6]) -> Result<Self> {
        let [a, b, c, d, e, f] = u;
        Self::validate([[a, b, c], [b, d, e], [c, e, f]])
    }

    /// The form `xx x^2 + yy y^2 + zz z^2 + xy xy + xz xz + yz yz`.
    pub fn from_polynomial(coeffs: [i64; 6]) -> Result<Self> {
        let [xx, yy, zz, xy, xz, yz] = coeffs;
        Self::from_upper([2 * xx, xy, xz, 2 * yy, yz, 2 * zz])
    }

    pub fn gram(&self) -> [[i64; 3]; 3] {
        self.gram
    }

    pub fn upper(&self) -> [i64; 6] {
        let g = &self.gram;
        [g[0][0], g[0][1], g[0][2], g[1][1], g[1][2], g[2][2]]
    }

    pub fn det(&self) -> i64 {
        let [a, b, c, d, e, f] = self.upper();
        a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
    }

    /// Adjugate (transposed cofactor matrix); symmetric because `A` is.
    pub fn adjugate(&self) -> [[i64; 3]; 3] {
        let [a, b, c, d, e, f] = self.upper();
        let m11 = d * f - e * e;
        let m12 = c * e - b * f;
        let m13 = b * e - c * d;
        let m22 = a * f - c * c;
        let m23 = b * c - a * e;
        let m33 = a * d - b * b;
        [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]]
    }

    pub fn value(&self, v: [i64; 3]) -> i64 {
        let [a, b, c, d, e, f] = self.upper();
        let [x, y, z] = v;
        (a * x * x + d * y * y + f * z * z) / 2 + b * x * y + c * x * z + e * y * z
    }

    /// `U^T A U`.
    pub fn transform(&self, u: [[i64; 3]; 3]) -> Result<Self> {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += u[k][i] * self.gram[k][l] * u[l][j];
                    }
                }
                out[i][j] = s;
            }
        }
        Self::validate(out)
    }

    /// Range of the last coordinate over `Q(v) <= n`.
    fn z_range(&self, n: u64) -> (i64, i64) {
        let [a, b, _, d, _, _] = self.upper().map(i128::from);
        let m33 = a * d - b * b;
        quadratic_interval(self.det() as i128, 0, -2 * n as i128 * m33).unwrap_or((0, 0))
    }

    /// Range of `y` for fixed `z` over `Q(v) <= n`.
    fn y_range(&self, n: u64, z: i64) -> Option<(i64, i64)> {
        let [a, b, c, d, e, f] = self.upper().map(i128::from);
        let z = z as i128;
        let m22 = a * d - b * b;
        let m23 = a * e - b * c;
        let m33 = a * f - c * c;
        quadratic_interval(m22, m23 * z, m33 * z * z - 2 * n as i128 * a)
    }

    /// Range of `x` for fixed `y, z` over `Q(v) <= n`.
    fn x_range(&self, n: u64, y: i64, z: i64) -> Option<(i64, i64)> {
        let [a, b, c, d, e, f] = self.upper().map(i128::from);
        let (y, z) = (y as i128, z as i128);
        quadratic_interval(
            a,
            b * y + c * z,
            d * y * y + 2 * e * y * z + f * z * z - 2 * n as i128,
        )
    }

    /// Number of `v` in `Z^3` with `Q(v) = n`.
    ///
    /// For each admissible `(y, z)` the equation in `x` is solved directly
    /// (its discriminant must be a perfect square), instead of scanning `x`.
    pub fn representation_count(&self, n: u64) -> u64 {
        let [a, b, c, d, e, f] = self.upper().map(i128::from);
        let (z_lo, z_hi) = self.z_range(n);
        let mut count = 0;
        for z in z_lo..=z_hi {
            let Some((y_lo, y_hi)) = self.y_range(n, z) else {
                continue;
            };
            for y in y_lo..=y_hi {
                let (yy, zz) = (y as i128, z as i128);
                let beta = b * yy + c * zz;
                let gamma = d * yy * yy + 2 * e * yy * zz + f * zz * zz - 2 * n as i128;
                // a x^2 + 2 beta x + gamma = 0
                let disc = beta * beta - a * gamma;
                if disc < 0 {
                    continue;
                }
                let s = disc.isqrt();
                if s * s != disc {
                    continue;
                }
                let roots = if s == 0 { vec![-beta] } else { vec![-beta - s, -beta + s] };
                count += roots.into_iter().filter(|r| r % a == 0).count() as u64;
            }
        }
        count
    }

    /// `theta(q) = sum_n r_Q(n) q^n` through `q^limit`, from one sweep of the
    /// ellipsoid `Q(v) <= limit`. The sweep is split over the last coordinate;
    /// partial histograms are integer vectors, so the sum does not depend on scheduling.
    pub fn theta_counts(&self, limit: usize) -> Vec<u64> {
        let n = limit as u64;
        let (z_lo, z_hi) = self.z_range(n);
        (z_lo..=z_hi)
            .into_par_iter()
            .map(|z| {
                let mut hist = vec![0u64; limit + 1];
                if let Some((y_lo, y_hi)) = self.y_range(n, z) {
                    for y in y_lo..=y_hi {
                        if let Some((x_lo, x_hi)) = self.x_range(n, y, z) {
                            for x in x_lo..=x_hi {
                                hist[self.value([x, y, z]) as usize] += 1;
                            }
                        }
                    }
                }
                hist
            })
            .reduce(
                || vec![0u64; limit + 1],
                |mut acc, h| {
                    acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
                    acc
                },
            )
    }

    pub fn theta_series(&self, limit: usize) -> QSeries {
        let counts: Vec<i64> = self.theta_counts(limit).into_iter().map(|c| c as i64).collect();
        QSeries::from_integers(&counts)
    }

    /// Smallest `N` with `N A^{-1}` integral with even diagonal, and the
    /// character label `det(2A) = 8 det A`.
    pub fn level_and_character(&self) -> LevelCharacter {
        let det = self.det();
        let adj = self.adjugate();
        let mut level: i64 = 1;
        for (i, row) in adj.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                // N m / det must be an integer, and even on the diagonal
                let modulus = if i == j { 2 * det } else { det };
                level = level.lcm(&(modulus / m.gcd(&modulus)));
            }
        }
        let char_label = 8 * det;
        let (kernel, _) = squarefree_decompose(char_label).expect("det is positive");
        LevelCharacter {
            level: level as u64,
            char_label,
            squarefree_kernel: kernel,
        }
    }
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.gram;
        write!(
            f,
            "[[{}, {}, {}], [{}, {}, {}], [{}, {}, {}]]",
            g[0][0], g[0][1], g[0][2], g[1][0], g[1][1], g[1][2], g[2][0], g[2][1], g[2][2]
        )
    }
}
