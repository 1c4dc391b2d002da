//! Exact Gaussian-integer arithmetic: norms, units, primary normalization,
//! Euclidean gcd, factorization into primary primes, the least rational
//! multiple M(z), and the small-divisor witness construction.
//!
//! Components are i64 with mandatory i128 intermediates; overflow is a
//! reported error, never silent wraparound.

use crate::arith::factor_u64;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
pub const I: GaussInt = GaussInt { re: 0, im: 1 };
/// The four units of ℤ[i], in the rotation order 1, i, −1, −i.
pub const UNITS: [GaussInt; 4] = [
    GaussInt { re: 1, im: 0 },
    GaussInt { re: 0, im: 1 },
    GaussInt { re: -1, im: 0 },
    GaussInt { re: 0, im: -1 },
];

impl std::fmt::Display for GaussInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, i) => write!(f, "{i}i"),
            (r, 1) => write!(f, "{r}+i"),
            (r, -1) => write!(f, "{r}-i"),
            (r, i) if i > 0 => write!(f, "{r}+{i}i"),
            (r, i) => write!(f, "{r}{i}i"),
        }
    }
}

impl GaussInt {
    pub const ZERO: Self = Self::new(0, 0);
    pub const ONE: Self = Self::new(1, 0);

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(&self) -> bool {
        UNITS.contains(self)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// N(z) = re² + im² as u128; never overflows.
    pub fn norm128(&self) -> u128 {
        let r = self.re as i128;
        let i = self.im as i128;
        (r * r + i * i) as u128
    }

    /// N(z) = re² + im², reported as an error if it exceeds u64.
    pub fn norm(&self) -> Result<u64> {
        u64::try_from(self.norm128()).map_err(|_| Error::Overflow("norm"))
    }

    pub fn checked_add(&self, rhs: Self) -> Result<Self> {
        Ok(Self::new(
            self.re.checked_add(rhs.re).ok_or(Error::Overflow("add"))?,
            self.im.checked_add(rhs.im).ok_or(Error::Overflow("add"))?,
        ))
    }

    pub fn checked_sub(&self, rhs: Self) -> Result<Self> {
        Ok(Self::new(
            self.re.checked_sub(rhs.re).ok_or(Error::Overflow("sub"))?,
            self.im.checked_sub(rhs.im).ok_or(Error::Overflow("sub"))?,
        ))
    }

    /// (a+bi)(c+di) with i128 intermediates; errors if a component leaves i64.
    pub fn checked_mul(&self, rhs: Self) -> Result<Self> {
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (rhs.re as i128, rhs.im as i128);
        let re = a * c - b * d;
        let im = a * d + b * c;
        Ok(Self::new(
            i64::try_from(re).map_err(|_| Error::Overflow("mul"))?,
            i64::try_from(im).map_err(|_| Error::Overflow("mul"))?,
        ))
    }

    /// Euclidean division: q with N(self − q·rhs) ≤ N(rhs)/2.
    pub fn div_rem(&self, rhs: Self) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let n = rhs.norm128() as i128;
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (rhs.re as i128, rhs.im as i128);
        // self·conj(rhs) = (ac+bd) + (bc−ad)i
        let xr = a * c + b * d;
        let xi = b * c - a * d;
        let round_div = |x: i128| -> i128 { (2 * x + n).div_euclid(2 * n) };
        let q = Self::new(
            i64::try_from(round_div(xr)).map_err(|_| Error::Overflow("div"))?,
            i64::try_from(round_div(xi)).map_err(|_| Error::Overflow("div"))?,
        );
        let r = self.checked_sub(q.checked_mul(rhs)?)?;
        debug_assert!(2 * r.norm128() <= rhs.norm128() * 2);
        Ok((q, r))
    }

    /// Exact divisibility test rhs | self.
    pub fn divisible_by(&self, rhs: Self) -> bool {
        if rhs.is_zero() {
            return self.is_zero();
        }
        let n = rhs.norm128() as i128;
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (rhs.re as i128, rhs.im as i128);
        (a * c + b * d).rem_euclid(n) == 0 && (b * c - a * d).rem_euclid(n) == 0
    }

    /// Exact quotient; errors unless rhs | self.
    pub fn exact_div(&self, rhs: Self) -> Result<Self> {
        let (q, r) = self.div_rem(rhs)?;
        if !r.is_zero() {
            return Err(Error::Overflow("exact_div: not divisible"));
        }
        Ok(q)
    }
}

impl std::ops::Add for GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("GaussInt add overflow")
    }
}

impl std::ops::Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("GaussInt sub overflow")
    }
}

impl std::ops::Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("GaussInt mul overflow")
    }
}

impl std::ops::Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

/// The unique associate u·z ≡ 1 mod 2(1+i), defined for odd z ≠ 0.
pub fn primary_associate(z: GaussInt) -> Result<GaussInt> {
    if z.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if z.norm128() % 2 == 0 {
        return Err(Error::EvenArgument(z));
    }
    let two_one_plus_i = GaussInt::new(2, 2);
    let mut found = None;
    for u in UNITS {
        let cand = u.checked_mul(z)?;
        if cand.checked_sub(ONE)?.divisible_by(two_one_plus_i) {
            debug_assert!(found.is_none(), "primary associate must be unique");
            found = Some(cand);
        }
    }
    Ok(found.expect("odd Gaussian integer has a primary associate"))
}

pub fn is_primary(z: GaussInt) -> bool {
    !z.is_zero()
        && z.norm128() % 2 == 1
        && (z - ONE).divisible_by(GaussInt::new(2, 2))
}

/// First-quadrant associate: re > 0, im ≥ 0 (unique for z ≠ 0).
pub fn first_quadrant_associate(z: GaussInt) -> Result<GaussInt> {
    if z.is_zero() {
        return Err(Error::ZeroArgument);
    }
    for u in UNITS {
        let cand = u.checked_mul(z)?;
        if cand.re > 0 && cand.im >= 0 {
            return Ok(cand);
        }
    }
    unreachable!("one of four rotations lands in the closed first quadrant")
}

/// Greatest common divisor by the Euclidean algorithm, normalized to primary
/// form when odd and to the first quadrant when even.
pub fn ggcd(z: GaussInt, w: GaussInt) -> Result<GaussInt> {
    if z.is_zero() && w.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut a, mut b) = (z, w);
    while !b.is_zero() {
        let (_, r) = a.div_rem(b)?;
        a = b;
        b = r;
    }
    if a.norm128() % 2 == 1 {
        primary_associate(a)
    } else {
        first_quadrant_associate(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussFactorization {
    /// One of the four units.
    pub unit: GaussInt,
    /// (prime, exponent) pairs: odd primes in primary form, the even prime as
    /// 1+i; sorted by (norm, re, im).
    pub factors: Vec<(GaussInt, u32)>,
}

impl GaussFactorization {
    /// unit · ∏ primeᵉ, the reconstruction invariant.
    pub fn product(&self) -> Result<GaussInt> {
        let mut acc = self.unit;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p)?;
            }
        }
        Ok(acc)
    }
}

/// Complete factorization of z ≠ 0. Splitting of each rational prime p in the
/// norm follows p mod 4: split for 1, inert for 3, ramified for 2.
pub fn factor_gaussian(z: GaussInt) -> Result<GaussFactorization> {
    if z.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let norm = z.norm()?; // budget: norms beyond u64 are out of scope
    let mut work = z;
    let mut factors: Vec<(GaussInt, u32)> = Vec::new();

    let one_plus_i = GaussInt::new(1, 1);
    let mut ram = 0u32;
    while work.norm128() % 2 == 0 {
        work = work.exact_div(one_plus_i)?;
        ram += 1;
    }
    if ram > 0 {
        factors.push((one_plus_i, ram));
    }

    let odd_norm = work.norm()?;
    for (p, e) in factor_u64(odd_norm)? {
        if p % 4 == 3 {
            // Inert: p itself is prime; primary form is −p.
            debug_assert_eq!(e % 2, 0);
            let prime = GaussInt::new(-(p as i64), 0);
            let mut k = 0u32;
            while work.divisible_by(prime) {
                work = work.exact_div(prime)?;
                k += 1;
            }
            debug_assert_eq!(k, e / 2);
            factors.push((prime, k));
        } else {
            // Split: p = π·conj(π); find π via gcd(p, ν + i), ν² ≡ −1 mod p.
            let nu = crate::density::roots_of_minus_one(p)?[0];
            let pi = ggcd(
                GaussInt::new(p as i64, 0),
                GaussInt::new(nu as i64, 1),
            )?;
            debug_assert_eq!(pi.norm()?, p);
            for prime in [pi, primary_associate(pi.conj())?] {
                let mut k = 0u32;
                while work.divisible_by(prime) {
                    work = work.exact_div(prime)?;
                    k += 1;
                }
                if k > 0 {
                    factors.push((prime, k));
                }
            }
        }
    }
    debug_assert!(work.is_unit());
    factors.sort_by_key(|&(p, _)| (p.norm128(), p.re, p.im));
    let fac = GaussFactorization {
        unit: work,
        factors,
    };
    debug_assert_eq!(fac.product()?, z);
    debug_assert_eq!(fac.product()?.norm128(), norm as u128);
    Ok(fac)
}

/// M(z): least rational m ≥ 1 with z | m. From the factorization: a split
/// π^{k₁}·conj(π)^{k₂} over p contributes p^{max(k₁,k₂)}, an inert p^k
/// contributes p^k, and (1+i)^k contributes 2^{⌈k/2⌉}.
pub fn m_of(z: GaussInt) -> Result<u64> {
    if z.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let fac = factor_gaussian(z)?;
    let mut by_p: Vec<(u64, u32)> = Vec::new(); // (rational prime, needed exponent)
    for &(prime, k) in &fac.factors {
        let (p, need) = if prime == GaussInt::new(1, 1) {
            (2u64, k.div_ceil(2))
        } else if prime.im == 0 {
            ((-prime.re) as u64, k)
        } else {
            (prime.norm()?, k)
        };
        match by_p.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e = (*e).max(need),
            None => by_p.push((p, need)),
        }
    }
    let mut m = 1u64;
    for (p, e) in by_p {
        for _ in 0..e {
            m = m.checked_mul(p).ok_or(Error::Overflow("m_of"))?;
        }
    }
    Ok(m)
}

/// φ over ℤ[i]: the order of (ℤ[i]/zℤ[i])^×.
pub fn euler_phi_zi(z: GaussInt) -> Result<u64> {
    let fac = factor_gaussian(z)?;
    let mut phi = 1u64;
    for &(prime, e) in &fac.factors {
        let np = prime.norm()?;
        let mut local = np - 1;
        for _ in 1..e {
            local = local.checked_mul(np).ok_or(Error::Overflow("phi"))?;
        }
        phi = phi.checked_mul(local).ok_or(Error::Overflow("phi"))?;
    }
    Ok(phi)
}

/// Witness block for a squarefree b: ascending primes interleaved into k
/// blocks by index mod k; the minimum-product block d satisfies d ≤ b^{1/k}
/// and τ(b) ≤ 2^k·τ(d)^k.
fn squarefree_block_witness(primes: &[u64], k: u32) -> u64 {
    if primes.is_empty() {
        return 1;
    }
    let mut best: Option<u128> = None;
    for j in 0..k as usize {
        let prod: u128 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| i % k as usize == j)
            .map(|(_, &p)| p as u128)
            .product();
        best = Some(best.map_or(prod, |b| b.min(prod)));
    }
    best.unwrap() as u64
}

/// A divisor d | n with d ≤ n^{1/k} and τ(n) ≤ 2^{k²}·τ(d)^{k³}, built by
/// splitting n = b₁·b₂²···b_k^k (prime p^e sends ⌊e/k⌋ into b_k and one copy
/// of p into b_{e mod k}) and taking the block witness of each squarefree
/// part together with b_k itself.
pub fn small_divisor_witness(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    assert!(k >= 2, "witness construction requires k >= 2");
    let fac = factor_u64(n)?;
    // parts[r] for r in 1..k collects the squarefree residue-class parts;
    // bk collects p^{⌊e/k⌋}.
    let mut parts: Vec<Vec<u64>> = vec![Vec::new(); k as usize];
    let mut bk = 1u64;
    for (p, e) in fac {
        let r = (e % k) as usize;
        if r > 0 {
            parts[r].push(p);
        }
        for _ in 0..e / k {
            bk = bk.checked_mul(p).ok_or(Error::Overflow("witness"))?;
        }
    }
    let mut d = bk;
    for r in 1..k as usize {
        d = d
            .checked_mul(squarefree_block_witness(&parts[r], k))
            .ok_or(Error::Overflow("witness"))?;
    }
    debug_assert_eq!(n % d, 0);
    Ok(d)
}
