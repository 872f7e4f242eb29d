//! The newform `F` of level 49 attached to `E1: y^2 + xy = x^3 - x^2 - 2x - 1`,
//! which has complex multiplication by `Q(sqrt(-7))`.

use std::collections::HashMap;
use std::sync::RwLock;

use rayon::prelude::*;

use crate::arith::{is_prime, kronecker, primes_up_to, smallest_prime_factors};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

/// Long Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Curve {
    pub a: [i64; 5],
}

impl Curve {
    pub const E1: Curve = Curve { a: [1, -1, 0, -2, -1] };

    /// `E_d: y^2 = x^3 - 35 d^2 x - 98 d^3`, the quadratic twist of `E1` by `d`.
    pub fn short_twist(d: i64) -> Curve {
        Curve { a: [0, 0, 0, -35 * d * d, -98 * d * d * d] }
    }

    /// `p + 1 - #E(F_p)`.
    pub fn trace_of_frobenius(&self, p: u64) -> i64 {
        p as i64 + 1 - count_points(self, p) as i64
    }
}

/// `#E(F_p)` including the point at infinity.
///
/// For odd `p` the equation is completed to `(2y + a1 x + a3)^2 = disc(x)`,
/// and each `x` contributes `1 + (disc(x)/p)` points, read off a table of squares.
pub fn count_points(curve: &Curve, p: u64) -> u64 {
    if p == 2 {
        return count_points_naive(curve, p);
    }
    let pm = p as i128;
    let [a1, a2, a3, a4, a6] = curve.a.map(|c| (c as i128).rem_euclid(pm));
    let mut is_square = vec![false; p as usize];
    for y in 0..p {
        is_square[((y * y) % p) as usize] = true;
    }
    let mut count = 1;
    for x in 0..pm {
        let rhs = ((x * x % pm + a2 * x) % pm * x + a4 * x + a6) % pm;
        let lin = (a1 * x + a3) % pm;
        let disc = ((lin * lin + 4 * rhs) % pm) as usize;
        count += if disc == 0 {
            1
        } else if is_square[disc] {
            2
        } else {
            0
        };
    }
    count
}

/// `#E(F_p)` by trying every affine pair; quadratic in `p`.
pub fn count_points_naive(curve: &Curve, p: u64) -> u64 {
    let pm = p as i128;
    let [a1, a2, a3, a4, a6] = curve.a.map(|c| (c as i128).rem_euclid(pm));
    let mut count = 1;
    for x in 0..pm {
        for y in 0..pm {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(pm) == 0 {
                count += 1;
            }
        }
    }
    count
}

/// Whether `(7d, 0)` lies on `E_d`. Holds for every `d` since `343 - 245 - 98 = 0`.
pub fn two_torsion_check(d: i64) -> bool {
    let d = d as i128;
    let x = 7 * d;
    x * x * x - 35 * d * d * x - 98 * d * d * d == 0
}

/// Coefficients of `F = sum a_n q^n`, with a cache of prime coefficients.
#[derive(Debug, Default)]
pub struct CmNewform {
    primes: RwLock<HashMap<u64, i64>>,
}

impl CmNewform {
    pub const LEVEL: u64 = 49;

    pub fn new() -> Self {
        Self::default()
    }

    fn compute_ap(p: u64) -> i64 {
        // bad reduction at 7: additive, so the newform coefficient vanishes
        if p == 7 {
            0
        } else {
            Curve::E1.trace_of_frobenius(p)
        }
    }

    pub fn ap(&self, p: u64) -> Result<i64> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p as i64));
        }
        if let Some(&a) = self.primes.read().unwrap().get(&p) {
            return Ok(a);
        }
        let a = Self::compute_ap(p);
        self.primes.write().unwrap().insert(p, a);
        Ok(a)
    }

    /// Fills the cache for all primes up to `limit`, in parallel.
    fn warm(&self, limit: usize) {
        let missing: Vec<u64> = {
            let cache = self.primes.read().unwrap();
            primes_up_to(limit).into_iter().filter(|p| !cache.contains_key(p)).collect()
        };
        let computed: Vec<(u64, i64)> =
            missing.into_par_iter().map(|p| (p, Self::compute_ap(p))).collect();
        self.primes.write().unwrap().extend(computed);
    }

    /// `a_0 = 0, a_1, ..., a_limit`.
    pub fn coefficient_table(&self, limit: usize) -> Vec<i64> {
        self.warm(limit);
        let cache = self.primes.read().unwrap();
        let spf = smallest_prime_factors(limit);
        let mut a = vec![0i64; limit + 1];
        if limit >= 1 {
            a[1] = 1;
        }
        for n in 2..=limit {
            let p = spf[n] as usize;
            let mut m = n / p;
            let mut pk = p;
            while m % p == 0 {
                m /= p;
                pk *= p;
            }
            a[n] = if m > 1 {
                a[pk] * a[m]
            } else if pk == p {
                cache[&(p as u64)]
            } else {
                // a_{p^r} = a_p a_{p^{r-1}} - chi(p) p a_{p^{r-2}}, chi trivial mod 49
                let chi = if p == 7 { 0 } else { 1 };
                cache[&(p as u64)] * a[pk / p] - chi * p as i64 * a[pk / p / p]
            };
        }
        a
    }

    pub fn coefficients(&self, limit: usize) -> QSeries {
        QSeries::from_integers(&self.coefficient_table(limit))
    }

    /// `F_d = sum a_n (d/n) q^n`.
    pub fn twist(&self, d: i64, limit: usize) -> Result<QSeries> {
        if d == 0 {
            return Err(Error::Zero);
        }
        crate::arith::require_squarefree(d)?;
        let a = self.coefficient_table(limit);
        let twisted: Vec<i64> = a
            .iter()
            .enumerate()
            .map(|(n, &an)| an * kronecker(d, n as i64) as i64)
            .collect();
        Ok(QSeries::from_integers(&twisted))
    }

    /// The level 98 old form `F(z) - 2F(2z)`, whose `n`-th coefficient is `a_{2n}`.
    pub fn old_form(&self, limit: usize) -> QSeries {
        let a = self.coefficient_table(limit);
        let b: Vec<i64> = (0..=limit)
            .map(|n| a[n] - if n % 2 == 0 { 2 * a[n / 2] } else { 0 })
            .collect();
        QSeries::from_integers(&b)
    }
}
