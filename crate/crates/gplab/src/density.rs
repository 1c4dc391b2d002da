//! Square roots of −1 modulo d, the root-count function ρ, the local density
//! corrections ω and ω₂, and the prime-by-prime density product that
//! normalizes the main-term predictions.

use crate::arith::{factor_u64, inv_mod, Accumulator};
use crate::budget;
use crate::error::{Error, Result};
use num_rational::Ratio;

/// Limit of `partial_density_product` as the prime cutoff grows: the value of
/// ∏_p (1 − ρ(p)/p)(1 − 1/p)^{-1} over primes in increasing order. Each
/// factor equals 1 − χ₄(p)/(p−1), which makes this the Hardy–Littlewood
/// constant of the quadratic polynomial ν² + 1.
pub const DENSITY_CONSTANT: f64 = 1.372_813_462_818_205_9;

/// ρ(d) = #{ν mod d : ν² + 1 ≡ 0}. Multiplicative; ρ(2) = 1, ρ(2^k) = 0 for
/// k ≥ 2, ρ(p^k) = 1 + χ₄(p) for odd p.
pub fn rho(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut out = 1u64;
    for (p, e) in factor_u64(d)? {
        out *= match p % 4 {
            2 => {
                if e >= 2 {
                    0
                } else {
                    1
                }
            }
            1 => 2,
            _ => 0,
        };
        if out == 0 {
            return Ok(0);
        }
    }
    Ok(out)
}

/// ρ(d) for all d ≤ limit, built once from a smallest-prime-factor sieve.
pub struct RhoTable {
    pub limit: u64,
    values: Vec<u32>,
}

impl RhoTable {
    pub fn build(limit: u64) -> Result<Self> {
        budget::charge((limit + 1) * 8)?;
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut values = vec![0u32; n + 1];
        if n >= 1 {
            values[1] = 1;
        }
        for d in 2..=n {
            let p = spf[d] as usize;
            let mut m = d;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let local = match p as u64 % 4 {
                2 => {
                    if e >= 2 {
                        0
                    } else {
                        1
                    }
                }
                1 => 2,
                _ => 0,
            };
            values[d] = values[m] * local;
        }
        Ok(Self {
            limit,
            values,
        })
    }

    pub fn get(&self, d: u64) -> u32 {
        self.values[d as usize]
    }
}

fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    // Moduli coprime; result mod m1·m2.
    let inv = inv_mod(m1 % m2, m2).expect("crt moduli must be coprime");
    let diff = (r2 + m2 - r1 % m2) % m2;
    let k = (diff as u128 * inv as u128 % m2 as u128) as u64;
    r1 + m1 * k
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// One square root of −1 mod p for p ≡ 1 mod 4: c^{(p−1)/4} for the first
/// quadratic non-residue c.
fn root_mod_p(p: u64) -> u64 {
    let mut c = 2u64;
    loop {
        if powmod(c, (p - 1) / 2, p) == p - 1 {
            let r = powmod(c, (p - 1) / 4, p);
            debug_assert_eq!((r as u128 * r as u128 % p as u128) as u64, p - 1);
            return r;
        }
        c += 1;
    }
}

/// Hensel lift of r² ≡ −1 from mod p^j to mod p^{j+1}, iterated to p^k.
fn lift_root(p: u64, k: u32, mut r: u64) -> u64 {
    let mut pj = p;
    for _ in 1..k {
        let pj1 = pj * p;
        // r' = r − (r²+1)·(2r)^{-1} mod p^{j+1}
        let val = ((r as u128 * r as u128 + 1) % pj1 as u128) as u64;
        let inv2r = inv_mod(2 * r % pj1, pj1).expect("2r invertible for odd p");
        let corr = (val as u128 * inv2r as u128 % pj1 as u128) as u64;
        r = (r + pj1 - corr) % pj1;
        pj = pj1;
    }
    debug_assert_eq!(((r as u128 * r as u128 + 1) % pj as u128) as u64, 0);
    r
}

/// All ν ∈ [0, d) with ν² + 1 ≡ 0 mod d, sorted. Tonelli–Shanks at each
/// split prime, Hensel lifting to prime powers, CRT recombination.
pub fn roots_of_minus_one(d: u64) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    if d == 1 {
        return Ok(vec![0]);
    }
    let mut residues: Vec<(u64, u64)> = vec![(0, 1)]; // (root, modulus so far)
    for (p, e) in factor_u64(d)? {
        let pk = p.pow(e);
        let local: Vec<u64> = match p % 4 {
            2 => {
                if e >= 2 {
                    return Ok(vec![]);
                }
                vec![1]
            }
            1 => {
                let r = lift_root(p, e, root_mod_p(p));
                vec![r, pk - r]
            }
            _ => return Ok(vec![]),
        };
        let mut next = Vec::with_capacity(residues.len() * local.len());
        for &(r1, m1) in &residues {
            for &r2 in &local {
                next.push((crt_pair(r1, m1, r2, pk), m1 * pk));
            }
        }
        residues = next;
    }
    let mut out: Vec<u64> = residues.into_iter().map(|(r, _)| r).collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityVariant {
    /// ∏_{p|b} (1 − ρ(p)/p)^{-1}
    Omega,
    /// 2·∏_{p|b, p≠2} (1 − ρ(p)/p)^{-1}
    Omega2,
}

/// Exact local density correction for b; rationals avoid compounding
/// rounding across the millions of terms the main-term sums aggregate.
pub fn density_factor(b: u64, variant: DensityVariant) -> Result<Ratio<i64>> {
    density_factor_omitting(b, variant, None)
}

/// `density_factor` with one prime's local factor omitted; used to isolate
/// the boost that a single prime contributes.
pub fn density_factor_omitting(
    b: u64,
    variant: DensityVariant,
    omit: Option<u64>,
) -> Result<Ratio<i64>> {
    if b == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut out = match variant {
        DensityVariant::Omega => Ratio::from_integer(1i64),
        DensityVariant::Omega2 => Ratio::from_integer(2i64),
    };
    for (p, _) in factor_u64(b)? {
        if omit == Some(p) {
            continue;
        }
        if variant == DensityVariant::Omega2 && p == 2 {
            continue;
        }
        let r = match p % 4 {
            2 => 1,
            1 => 2,
            _ => 0,
        };
        // (1 − r/p)^{-1} = p/(p − r)
        out *= Ratio::new(p as i64, (p - r) as i64);
    }
    Ok(out)
}

/// ∏_{p ≤ limit} (1 − ρ(p)/p)(1 − 1/p)^{-1} over primes in increasing order,
/// accumulated as a compensated sum of logarithms. Converges (conditionally)
/// to DENSITY_CONSTANT.
pub fn partial_density_product(prime_limit: u64) -> Result<f64> {
    if prime_limit < 2 {
        return Err(Error::BadSpec(format!(
            "prime limit {prime_limit} must be at least 2"
        )));
    }
    budget::charge(prime_limit / 8 + 64)?;
    let n = prime_limit as usize;
    let mut composite = vec![false; n + 1];
    let mut acc = Accumulator::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        let mut j = p * p;
        while j <= n {
            composite[j] = true;
            j += p;
        }
        let pf = p as f64;
        let r = match p % 4 {
            2 => 1.0,
            1 => 2.0,
            _ => 0.0,
        };
        acc.add((1.0 - r / pf).ln() - (1.0 - 1.0 / pf).ln());
    }
    Ok(acc.total().exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd_u64;
    use proptest::prelude::*;

    #[test]
    fn rho_examples() {
        assert_eq!(rho(1).unwrap(), 1);
        assert_eq!(rho(65).unwrap(), 4);
        assert_eq!(rho(12).unwrap(), 0);
        assert_eq!(rho(2).unwrap(), 1);
        assert_eq!(rho(0), Err(Error::ZeroArgument));
    }

    #[test]
    fn roots_examples() {
        assert_eq!(roots_of_minus_one(13).unwrap(), vec![5, 8]);
        assert_eq!(roots_of_minus_one(3).unwrap(), Vec::<u64>::new());
        assert_eq!(roots_of_minus_one(2).unwrap(), vec![1]);
        assert_eq!(roots_of_minus_one(65).unwrap(), vec![8, 18, 47, 57]);
    }

    #[test]
    fn roots_match_brute_force_and_rho() {
        for d in 1..=3000u64 {
            let roots = roots_of_minus_one(d).unwrap();
            let brute: Vec<u64> = (0..d)
                .filter(|&v| (v as u128 * v as u128 + 1) % d as u128 == 0)
                .collect();
            assert_eq!(roots, brute, "d = {d}");
            assert_eq!(roots.len() as u64, rho(d).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn rho_table_matches_pointwise() {
        let table = RhoTable::build(5000).unwrap();
        for d in 1..=5000u64 {
            assert_eq!(table.get(d) as u64, rho(d).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn rho_on_primes_follows_the_mod4_character() {
        let mut composite = vec![false; 100_001];
        for p in 2..=100_000usize {
            if composite[p] {
                continue;
            }
            let mut j = p * p;
            while j <= 100_000 {
                composite[j] = true;
                j += p;
            }
            if p == 2 {
                continue;
            }
            let chi4: i64 = if p % 4 == 1 { 1 } else { -1 };
            assert_eq!(rho(p as u64).unwrap() as i64, 1 + chi4);
        }
    }

    #[test]
    fn density_factor_examples() {
        use DensityVariant::*;
        assert_eq!(density_factor(1, Omega).unwrap(), Ratio::from_integer(1));
        assert_eq!(density_factor(10, Omega).unwrap(), Ratio::new(10, 3));
        assert_eq!(density_factor(1, Omega2).unwrap(), Ratio::from_integer(2));
        // Omitting the 5-factor strips exactly (1 − 2/5)^{-1} = 5/3.
        let full = density_factor(10, Omega).unwrap();
        let without = density_factor_omitting(10, Omega, Some(5)).unwrap();
        assert_eq!(full / without, Ratio::new(5, 3));
    }

    #[test]
    fn density_factor_matches_brute_product() {
        for b in 1..=20_000u64 {
            let mut expected = Ratio::from_integer(1i64);
            let mut m = b;
            let mut p = 2u64;
            while p * p <= m {
                if m % p == 0 {
                    while m % p == 0 {
                        m /= p;
                    }
                    let r = rho(p).unwrap() as i64;
                    expected *= Ratio::new(p as i64, p as i64 - r);
                }
                p += 1;
            }
            if m > 1 {
                let r = rho(m).unwrap() as i64;
                expected *= Ratio::new(m as i64, m as i64 - r);
            }
            assert_eq!(
                density_factor(b, DensityVariant::Omega).unwrap(),
                expected,
                "b = {b}"
            );
        }
    }

    #[test]
    fn partial_product_small_limits() {
        // Single factor at p = 2 cancels exactly.
        assert_eq!(partial_density_product(2).unwrap(), 1.0);
        // p ≤ 4 adds the p = 3 factor (1 − 0/3)(1 − 1/3)^{-1} = 3/2.
        assert!((partial_density_product(4).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn partial_product_converges_to_the_constant() {
        let p5 = partial_density_product(100_000).unwrap();
        let p7 = partial_density_product(10_000_000).unwrap();
        // Frozen values from an independent extended-precision evaluation.
        assert!((p5 - 1.372_350_482).abs() < 1e-6, "p5 = {p5}");
        assert!((p7 - 1.372_789_029).abs() < 1e-6, "p7 = {p7}");
        // The tail keeps shrinking toward the recorded limit.
        assert!((p7 - DENSITY_CONSTANT).abs() < (p5 - DENSITY_CONSTANT).abs());
        assert!((p7 - DENSITY_CONSTANT).abs() < 2e-3);
    }

    proptest! {
        #[test]
        fn rho_multiplicative(m in 1u64..1_000_000, n in 1u64..1_000_000) {
            prop_assume!(gcd_u64(m, n) == 1);
            prop_assert_eq!(rho(m * n).unwrap(), rho(m).unwrap() * rho(n).unwrap());
        }

        #[test]
        fn roots_square_to_minus_one(d in 1u64..200_000) {
            let roots = roots_of_minus_one(d).unwrap();
            prop_assert_eq!(roots.len() as u64, rho(d).unwrap());
            for v in roots {
                prop_assert_eq!((v as u128 * v as u128 + 1) % d as u128, 0);
            }
        }
    }
}
