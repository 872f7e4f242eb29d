//! Integer arithmetic: Kronecker symbols, squarefree parts, fundamental
//! discriminants, local square classes and the real characters built on them.

use num_integer::Integer;

use crate::error::{Error, Result};

/// The Kronecker symbol `(a/n)`, defined for every pair of integers.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a.is_even() {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(a.rem_euclid(n), n)
}

/// Jacobi symbol for odd positive `n`.
fn jacobi(a: i64, n: i64) -> i8 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Writes `n = s * f^2` with `s` squarefree carrying the sign of `n`.
pub fn squarefree_decompose(n: i64) -> Result<(i64, u64)> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut m = n.unsigned_abs();
    let mut core: u64 = 1;
    let mut root: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        root *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    core *= m;
    Ok((n.signum() * core as i64, root))
}

/// Returns the largest `p` with `p^2 | n`, or `None` when `n` is squarefree.
fn square_factor(n: i64) -> Option<u64> {
    let (_, f) = squarefree_decompose(n).ok()?;
    if f == 1 {
        None
    } else {
        Some(f)
    }
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && square_factor(n).is_none()
}

/// Rejects zero and non-squarefree integers with a descriptive error.
pub fn require_squarefree(n: i64) -> Result<()> {
    if n == 0 {
        return Err(Error::Zero);
    }
    match square_factor(n) {
        None => Ok(()),
        Some(f) => Err(Error::NotSquarefree { value: n, factor: f }),
    }
}

/// Discriminant of `Q(sqrt(d))` for squarefree `d`.
pub fn fundamental_discriminant(d: i64) -> Result<i64> {
    require_squarefree(d)?;
    Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

/// Smallest-prime-factor table for `0..=limit` (entries 0 and 1 are 0).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            let mut j = i * i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn primes_up_to(limit: usize) -> Vec<u64> {
    smallest_prime_factors(limit)
        .iter()
        .enumerate()
        .filter(|&(i, &s)| i >= 2 && s as usize == i)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Splits `n = p^m * u` with `p` not dividing `u`.
fn split_prime_power(n: i64, p: i64) -> (u32, i64) {
    let mut m = 0;
    let mut u = n;
    while u % p == 0 {
        u /= p;
        m += 1;
    }
    (m, u)
}

/// Whether `d1 / d2` is a square in `Q_p`.
pub fn same_padic_square_class(d1: i64, d2: i64, p: u64) -> Result<bool> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::Zero);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p as i64));
    }
    let p = p as i64;
    let (m1, u1) = split_prime_power(d1, p);
    let (m2, u2) = split_prime_power(d2, p);
    if (m1 + m2) % 2 != 0 {
        return Ok(false);
    }
    if p == 2 {
        return Ok(u1.rem_euclid(8) == u2.rem_euclid(8));
    }
    let product = (u1.rem_euclid(p) * u2.rem_euclid(p)) % p;
    Ok(kronecker(product, p) == 1)
}

/// A real Dirichlet character `n -> (label / n)` that vanishes on integers
/// sharing a factor with `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Character {
    pub label: i64,
    pub modulus: u64,
}

impl Character {
    pub fn new(label: i64, modulus: u64) -> Self {
        Character { label, modulus }
    }

    /// `chi_28 = (28/.)`, the character of the weight 3/2 forms of level 196.
    pub fn chi28() -> Self {
        Character::new(28, 28)
    }

    /// Trivial character modulo `modulus`.
    pub fn trivial(modulus: u64) -> Self {
        Character::new(1, modulus)
    }

    /// The quadratic character of `Q(sqrt(d))`, labelled by its fundamental discriminant.
    pub fn of_quadratic_field(d: i64) -> Result<Self> {
        let disc = fundamental_discriminant(d)?;
        Ok(Character::new(disc, disc.unsigned_abs()))
    }

    pub fn eval(&self, n: i64) -> i8 {
        if self.modulus > 1 && n.unsigned_abs().gcd(&self.modulus) != 1 {
            return 0;
        }
        kronecker(self.label, n)
    }

    /// Value at the rational `num / den`. Only meaningful because the character
    /// is quadratic: `chi(num/den) = chi(num) * chi(den)^{-1} = chi(num) * chi(den)`.
    /// Common factors are cancelled first so that e.g. `chi(26/6) = chi(13/3)`.
    pub fn eval_ratio(&self, num: i64, den: i64) -> i8 {
        let g = num.gcd(&den);
        self.eval(num / g) * self.eval(den / g)
    }

    pub fn is_odd(&self) -> bool {
        self.eval(-1) == -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(3, 7), -1);
        assert_eq!(kronecker(-5, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
        assert_eq!(kronecker(6, 2), 0);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
    }

    fn legendre_by_power(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        let mut r: i64 = 1;
        let mut base = a;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn legendre_agrees_with_euler_criterion() {
        for p in primes_up_to(100).into_iter().filter(|&p| p > 2) {
            for a in -150..150 {
                assert_eq!(kronecker(a, p as i64), legendre_by_power(a, p as i64), "({a}/{p})");
            }
        }
    }

    #[test]
    fn quadratic_reciprocity_for_odd_coprime_pairs() {
        for m in (3..100i64).step_by(2) {
            for n in (3..100i64).step_by(2) {
                if m.gcd(&n) != 1 {
                    continue;
                }
                let sign = if (m % 4 == 3) && (n % 4 == 3) { -1 } else { 1 };
                assert_eq!(kronecker(m, n) * kronecker(n, m), sign, "({m},{n})");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative_in_both_arguments() {
        for a in -200i64..=200 {
            for m in -200i64..=200 {
                for n in [-7i64, -2, 0, 1, 2, 3, 8, 15, 49, 200] {
                    // (a/0) and (0/-1) break multiplicativity, so keep m n away from 0
                    if m * n != 0 {
                        assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
                        assert_eq!(kronecker(m * n, a), kronecker(m, a) * kronecker(n, a));
                    }
                }
            }
        }
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(21952).unwrap(), (7, 56));
        assert_eq!(squarefree_decompose(1).unwrap(), (1, 1));
        assert_eq!(squarefree_decompose(-12).unwrap(), (-3, 2));
        assert_eq!(squarefree_decompose(0), Err(Error::Zero));
        assert_eq!(
            require_squarefree(18),
            Err(Error::NotSquarefree { value: 18, factor: 3 })
        );
    }

    #[test]
    fn fundamental_discriminant_examples() {
        assert_eq!(fundamental_discriminant(5).unwrap(), 5);
        assert_eq!(fundamental_discriminant(15).unwrap(), 60);
        assert_eq!(fundamental_discriminant(-1).unwrap(), -4);
        assert_eq!(fundamental_discriminant(2).unwrap(), 8);
        assert!(fundamental_discriminant(12).is_err());
    }

    #[test]
    fn square_class_examples() {
        assert!(same_padic_square_class(15, 71, 2).unwrap());
        assert!(!same_padic_square_class(1, 5, 2).unwrap());
        assert!(same_padic_square_class(3, 31, 7).unwrap());
        assert!(same_padic_square_class(2, 34, 2).unwrap());
        assert!(!same_padic_square_class(2, 3, 2).unwrap());
        assert!(!same_padic_square_class(7, 1, 7).unwrap());
        assert_eq!(same_padic_square_class(3, 5, 9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn square_class_is_an_equivalence_relation() {
        let sample: Vec<i64> = (-60..=60).filter(|&d| d != 0).collect();
        for p in [2u64, 3, 7] {
            for &a in &sample {
                assert!(same_padic_square_class(a, a, p).unwrap());
                for &b in &sample {
                    let ab = same_padic_square_class(a, b, p).unwrap();
                    assert_eq!(ab, same_padic_square_class(b, a, p).unwrap());
                    if !ab {
                        continue;
                    }
                    for &c in sample.iter().step_by(7) {
                        if same_padic_square_class(b, c, p).unwrap() {
                            assert!(same_padic_square_class(a, c, p).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn characters_vanish_off_their_modulus() {
        let chi = Character::chi28();
        for n in -100i64..100 {
            let expected = kronecker(28, n);
            assert_eq!(chi.eval(n), expected);
            if n.gcd(&28) > 1 {
                assert_eq!(chi.eval(n), 0);
            }
        }
        let chi_d = Character::of_quadratic_field(-3).unwrap();
        assert_eq!(chi_d.label, -3);
        assert_eq!(chi_d.eval(3), 0);
        assert_eq!(Character::trivial(49).eval(7), 0);
        assert_eq!(Character::trivial(49).eval(3), 1);
        assert!(Character::new(-7, 7).is_odd());
        assert_eq!(chi.eval_ratio(71, 15), chi.eval(71) * chi.eval(15));
        assert_eq!(chi.eval_ratio(26, 6), chi.eval(13) * chi.eval(3));
    }
}
