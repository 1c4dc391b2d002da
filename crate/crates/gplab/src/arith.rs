//! Rational-integer workhorses: deterministic 64-bit primality, factorization
//! with a trial-division + Pollard-rho pipeline, divisor enumeration, μ, τ,
//! and exact integer roots. Everything here is pure and thread-safe.

use crate::error::{Error, Result};

const TRIAL_DIVISION_BOUND: u64 = 1_000_000;
/// Pollard-rho gives up after this many iterations per seed; norms in scope
/// (≤ 10¹⁸) factor far earlier.
const RHO_MAX_ITERS: u64 = 1 << 26;

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the fixed witness set is valid for all n < 2⁶⁴.
pub fn is_prime64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho with deterministic seeds; returns a nontrivial
/// factor of composite odd n.
fn pollard_rho(n: u64) -> Result<u64> {
    debug_assert!(n > 1 && !is_prime64(n) && n % 2 == 1);
    for c in 1..64u64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut iters = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
            iters += 1;
            if iters > RHO_MAX_ITERS {
                break;
            }
        }
        if d != n && d != 1 {
            return Ok(d);
        }
    }
    Err(Error::FactorizationBudget(n))
}

/// Complete factorization of n as sorted (prime, exponent) pairs; n = 1 gives
/// the empty list.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, k: u32, out: &mut Vec<(u64, u32)>| {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += k,
            None => out.push((p, k)),
        }
    };
    for p in [2u64, 3, 5] {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k > 0 {
            push(p, k, &mut out);
        }
    }
    // Wheel over 30 starting at 7.
    let mut d = 7u64;
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut step_idx = 0;
    while d <= TRIAL_DIVISION_BOUND && d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            push(d, k, &mut out);
        }
        d += steps[step_idx];
        step_idx = (step_idx + 1) % steps.len();
    }
    if n > 1 {
        if is_prime64(n) || n <= TRIAL_DIVISION_BOUND * TRIAL_DIVISION_BOUND {
            if is_prime64(n) {
                push(n, 1, &mut out);
            } else {
                // Composite with all prime factors > 10⁶: split recursively.
                let mut stack = vec![n];
                while let Some(m) = stack.pop() {
                    if is_prime64(m) {
                        push(m, 1, &mut out);
                        continue;
                    }
                    let d = pollard_rho(m)?;
                    stack.push(d);
                    stack.push(m / d);
                }
            }
        } else {
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                if is_prime64(m) {
                    push(m, 1, &mut out);
                    continue;
                }
                let d = pollard_rho(m)?;
                stack.push(d);
                stack.push(m / d);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// All positive divisors of n, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let fac = factor_u64(n)?;
    let mut divs = vec![1u64];
    for (p, e) in fac {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(prev.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Divisor count τ(n).
pub fn tau(n: u64) -> Result<u64> {
    Ok(factor_u64(n)?
        .iter()
        .map(|&(_, e)| e as u64 + 1)
        .product())
}

/// Möbius μ(n): 0 on non-squarefree, else (−1)^{#prime factors}.
pub fn mobius(n: u64) -> Result<i64> {
    let fac = factor_u64(n)?;
    if fac.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if fac.len() % 2 == 0 { 1 } else { -1 })
}

/// Euler totient φ(n).
pub fn euler_phi(n: u64) -> Result<u64> {
    let mut phi = 1u64;
    for (p, e) in factor_u64(n)? {
        phi *= (p - 1) * p.pow(e - 1);
    }
    Ok(phi)
}

/// ⌊√n⌋, exact.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x > 0 && x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |s| s <= n) {
        x += 1;
    }
    x
}

/// ⌊n^{1/k}⌋, exact for k ≥ 1.
pub fn ikth_root(n: u64, k: u32) -> u64 {
    if k == 1 || n <= 1 {
        return if k == 1 { n } else { n.min(1) };
    }
    if k == 2 {
        return isqrt(n);
    }
    let mut x = (n as f64).powf(1.0 / k as f64).round() as u64 + 1;
    let pow_le = |x: u64| -> bool {
        let mut acc = 1u128;
        for _ in 0..k {
            acc *= x as u128;
            if acc > n as u128 {
                return false;
            }
        }
        true
    };
    while x > 0 && !pow_le(x) {
        x -= 1;
    }
    x
}

/// Modular inverse of a mod m for gcd(a, m) = 1.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Neumaier-compensated accumulator; deterministic for a fixed input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (2..100).filter(|&n| is_prime64(n)).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97
            ]
        );
        assert!(!is_prime64(1));
        assert!(!is_prime64(561)); // Carmichael
        assert!(is_prime64(2_147_483_647));
        assert!(is_prime64(9_223_372_036_854_775_783)); // largest prime < 2⁶³
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_u64(1).unwrap(), vec![]);
        assert_eq!(factor_u64(30030).unwrap().len(), 6);
        assert_eq!(
            factor_u64(2u64.pow(10) * 3 * 49).unwrap(),
            vec![(2, 10), (3, 1), (7, 2)]
        );
        // Semiprime beyond the trial-division bound.
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        assert_eq!(factor_u64(p * q).unwrap(), vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn divisor_and_tau_agree() {
        for n in 1..500u64 {
            let divs = divisors(n).unwrap();
            assert_eq!(divs.len() as u64, tau(n).unwrap());
            assert!(divs.iter().all(|d| n % d == 0));
            let brute: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(divs, brute);
        }
    }

    #[test]
    fn mobius_matches_definition() {
        let expected = [1i64, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1).unwrap(), m);
        }
    }

    #[test]
    fn integer_roots_exact() {
        for n in 0..2000u64 {
            let s = isqrt(n);
            assert!(s * s <= n && (s + 1) * (s + 1) > n);
        }
        assert_eq!(ikth_root(1_000_000, 3), 100);
        assert_eq!(ikth_root(999_999, 3), 99);
        assert_eq!(ikth_root(u64::MAX, 2), u32::MAX as u64);
    }

    #[test]
    fn inverse_mod() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(inv_mod(5, 1), Some(0));
    }

    proptest! {
        #[test]
        fn factorization_roundtrips(n in 1u64..10_000_000_000) {
            let fac = factor_u64(n).unwrap();
            let back: u64 = fac.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(back, n);
            for &(p, _) in &fac {
                prop_assert!(is_prime64(p));
            }
        }

        #[test]
        fn phi_multiplicative(a in 1u64..5000, b in 1u64..5000) {
            prop_assume!(gcd_u64(a, b) == 1);
            prop_assert_eq!(
                euler_phi(a * b).unwrap(),
                euler_phi(a).unwrap() * euler_phi(b).unwrap()
            );
        }

        #[test]
        fn inv_mod_is_inverse(a in 1u64..100_000, m in 2u64..100_000) {
            prop_assume!(gcd_u64(a, m) == 1);
            let inv = inv_mod(a, m).unwrap();
            prop_assert_eq!((a as u128 * inv as u128 % m as u128) as u64, 1 % m);
        }
    }
}
