//! Central values `L(F_d, 1)` of the quadratic twists of the level 49 newform,
//! and identities relating them to the weight 3/2 coefficients.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    fundamental_discriminant, is_prime, kronecker, require_squarefree, same_padic_square_class,
    Character,
};
use crate::cmform::CmNewform;
use crate::error::{Error, Result};
use crate::halfint::extend_fixture;

/// Smallest tolerance accepted; double precision sums of this length are not trusted below it.
pub const TOLERANCE_FLOOR: f64 = 1e-8;

/// Block length for the partial sums; the blocks are added in index order.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LValueResult {
    pub d: i64,
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub declared_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn newform() -> &'static CmNewform {
    static F: OnceLock<CmNewform> = OnceLock::new();
    F.get_or_init(CmNewform::new)
}

fn check_twist(d: i64) -> Result<()> {
    if d == 0 {
        return Err(Error::Zero);
    }
    require_squarefree(d)?;
    if d % 7 == 0 {
        return Err(Error::DivisibleBySeven(d));
    }
    Ok(())
}

/// `49 D^2`, with `D` the discriminant of `Q(sqrt(d))`.
pub fn conductor_twist(d: i64) -> Result<u64> {
    check_twist(d)?;
    let disc = fundamental_discriminant(d)?.unsigned_abs();
    Ok(49 * disc * disc)
}

/// Root number of `F_d`: `-w_49 (d / -1)` with `w_49 = -1`, so the sign of `d`.
pub fn sign_twist(d: i64) -> Result<i8> {
    check_twist(d)?;
    Ok(if d > 0 { 1 } else { -1 })
}

/// Bound on `2 sum_{n > m} |a_n| / n e^{-cn}` from `|a_n| <= sigma_0(n) sqrt(n) <= 2n`.
fn tail_bound(c: f64, m: usize) -> f64 {
    4.0 * (-c * (m + 1) as f64).exp() / (1.0 - (-c).exp())
}

/// Smallest `m` whose tail bound is below `tol`.
fn terms_for(c: f64, tol: f64) -> usize {
    // closed form, then nudged for rounding
    let raw = ((4.0 / (tol * (1.0 - (-c).exp()))).ln() / c).ceil().max(1.0) as usize;
    let mut m = raw.saturating_sub(2).max(1);
    while tail_bound(c, m) >= tol {
        m += 1;
    }
    m
}

/// `L(F_d, 1)` to within `tol`, or exactly zero when the root number is `-1`.
pub fn l_value(d: i64, tol: f64) -> Result<LValueResult> {
    if !(tol >= TOLERANCE_FLOOR) {
        return Err(Error::ToleranceBelowFloor(tol));
    }
    check_twist(d)?;
    if sign_twist(d)? < 0 {
        return Ok(declared_zero(d));
    }
    let c = 2.0 * PI / (conductor_twist(d)? as f64).sqrt();
    l_value_with_terms(d, terms_for(c, tol))
}

fn declared_zero(d: i64) -> LValueResult {
    LValueResult {
        d,
        value: 0.0,
        terms_used: 0,
        tail_bound: 0.0,
        declared_zero: true,
        reason: Some("root number -1 forces the central value to vanish".into()),
    }
}

/// `2 sum_{n <= terms} a_n (D/n) / n * exp(-2 pi n / sqrt(N_d))` with its tail bound.
pub fn l_value_with_terms(d: i64, terms: usize) -> Result<LValueResult> {
    check_twist(d)?;
    if sign_twist(d)? < 0 {
        return Ok(declared_zero(d));
    }
    let disc = fundamental_discriminant(d)?;
    let c = 2.0 * PI / (conductor_twist(d)? as f64).sqrt();
    let a = newform().coefficient_table(terms);
    let blocks: Vec<f64> = a[1..]
        .par_chunks(BLOCK)
        .enumerate()
        .map(|(b, chunk)| {
            chunk
                .iter()
                .enumerate()
                .map(|(i, &an)| {
                    let n = b * BLOCK + i + 1;
                    let k = kronecker(disc, n as i64);
                    if an == 0 || k == 0 {
                        0.0
                    } else {
                        (an * k as i64) as f64 / n as f64 * (-c * n as f64).exp()
                    }
                })
                .sum()
        })
        .collect();
    Ok(LValueResult {
        d,
        value: 2.0 * blocks.iter().sum::<f64>(),
        terms_used: terms,
        tail_bound: tail_bound(c, terms),
        declared_zero: false,
        reason: None,
    })
}

/// Local correction: 2 when 2 is inert in `Q(sqrt(d))`, otherwise 1.
pub fn c_factor(d: i64) -> u8 {
    if kronecker(d, 2) == -1 {
        2
    } else {
        1
    }
}

/// Checks `b_n = a_n - a_p a_{n/p} + chi(p) p a_{n/p^2}` for `n <= limit`, where
/// `b_n` is `a_n` with the multiples of `p` removed and `chi` is trivial mod 49.
/// The right side is an explicit Dirichlet convolution with the Euler factor.
pub fn euler_factor_identity(p: u64, limit: usize) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p as i64));
    }
    let a = newform().coefficient_table(limit);
    let chi = Character::trivial(49).eval(p as i64) as i64;
    let p = p as usize;
    let factor = [(1usize, 1i64), (p, -a[p]), (p * p, chi * p as i64)];
    for n in 1..=limit {
        let b = if n % p == 0 { 0 } else { a[n] };
        let conv: i64 = factor
            .iter()
            .filter(|(m, _)| n % m == 0)
            .map(|&(m, e)| e * a[n / m])
            .sum();
        if b != conv {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Waldspurger's relation for `f_i` at two discriminants in one square class:
/// `|c_{d1}^2 C(d2) L(d2) chi_28(d2/d1) sqrt(d2) - c_{d2}^2 C(d1) L(d1) sqrt(d1)|`.
pub fn waldspurger_ratio_residual(d1: i64, d2: i64, i: u8, tol: f64) -> Result<f64> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidArgument(format!("form index {i} is not 1, 2 or 3")));
    }
    if d1 <= 0 || d2 <= 0 {
        return Err(Error::InvalidArgument("discriminants must be positive".into()));
    }
    check_twist(d1)?;
    check_twist(d2)?;
    for p in [2, 7] {
        if !same_padic_square_class(d1, d2, p)? {
            return Err(Error::SquareClassMismatch { d1, d2, p });
        }
    }
    let form = extend_fixture(&format!("f{i}"), d1.max(d2) as usize)?;
    let coeff = |d: i64| -> f64 {
        form.series.coeffs()[d as usize].to_f64().expect("finite coefficient")
    };
    let (c1, c2) = (coeff(d1), coeff(d2));
    let l1 = l_value(d1, tol / 10.0)?.value;
    let l2 = l_value(d2, tol / 10.0)?.value;
    let chi = Character::chi28().eval_ratio(d2, d1) as f64;
    let lhs = c1 * c1 * c_factor(d2) as f64 * l2 * chi * (d2 as f64).sqrt();
    let rhs = c2 * c2 * c_factor(d1) as f64 * l1 * (d1 as f64).sqrt();
    Ok((lhs - rhs).abs())
}
