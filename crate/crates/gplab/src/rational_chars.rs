//! Dirichlet characters modulo a rational integer: the full character group
//! with discrete logarithms, conductors, primitivity flags, and exact
//! root-of-unity evaluation.

use crate::arith::{divisors, euler_phi, factor_u64};
use crate::budget;
use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_MODULUS: u64 = 200_000;

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
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

/// Least primitive root mod p^e for odd prime p.
fn primitive_root(p: u64, e: u32) -> u64 {
    let fac = factor_u64(p - 1).expect("p - 1 >= 1");
    let mut g = 2u64;
    loop {
        if fac.iter().all(|&(q, _)| powmod(g, (p - 1) / q, p) != 1) {
            break;
        }
        g += 1;
    }
    if e >= 2 && powmod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g % p.pow(e)
}

fn crt_lift(r: u64, m: u64, full: u64) -> u64 {
    // x ≡ r mod m, x ≡ 1 mod full/m, for coprime cofactors.
    let other = full / m;
    if other == 1 {
        return r % full;
    }
    let inv = crate::arith::inv_mod(other % m, m).expect("cofactors coprime");
    let diff = (r + m - 1 % m) % m;
    let k = (diff as u128 * inv as u128 % m as u128) as u64;
    (1 + other as u128 * k as u128) as u64 % full
}

#[derive(Debug, Clone)]
pub struct DirichletChar {
    /// Exponent of the character on each group generator.
    pub exps: Vec<u64>,
    pub conductor: u64,
    pub primitive: bool,
    pub principal: bool,
    /// Order of the character in the dual group.
    pub order: u64,
}

/// The unit group (ℤ/d)^× together with its full character group.
pub struct DirichletGroup {
    pub modulus: u64,
    pub phi: u64,
    /// lcm of the generator orders; every character value is a power of
    /// e(1/exponent).
    pub exponent: u64,
    gens: Vec<(u64, u64)>,
    dlog: Vec<Option<Vec<u64>>>,
    chars: Vec<DirichletChar>,
    rou: Vec<Complex64>,
}

pub fn dirichlet_group(d: u64) -> Result<DirichletGroup> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    if d > MAX_MODULUS {
        return Err(Error::BadSpec(format!(
            "character modulus {d} exceeds the supported bound {MAX_MODULUS}"
        )));
    }
    budget::charge(d * 64)?;

    let mut gens: Vec<(u64, u64)> = Vec::new();
    for (p, e) in factor_u64(d)? {
        let pe = p.pow(e);
        if p == 2 {
            if e == 2 {
                gens.push((crt_lift(3, 4, d), 2));
            } else if e >= 3 {
                gens.push((crt_lift(pe - 1, pe, d), 2));
                gens.push((crt_lift(5, pe, d), pe / 4));
            }
        } else {
            let g = primitive_root(p, e);
            gens.push((crt_lift(g, pe, d), pe - pe / p));
        }
    }

    let phi = euler_phi(d)?;
    let mut dlog: Vec<Option<Vec<u64>>> = vec![None; d as usize];
    // Odometer over generator exponents; the bijection count certifies that
    // the generators are independent and exhaust the unit group.
    let mut digits = vec![0u64; gens.len()];
    let mut value = 1 % d;
    let mut seen = 0u64;
    loop {
        assert!(
            dlog[value as usize].is_none(),
            "generator enumeration collided at {value} mod {d}"
        );
        dlog[value as usize] = Some(digits.clone());
        seen += 1;
        let mut pos = gens.len();
        while pos > 0 {
            let i = pos - 1;
            digits[i] += 1;
            value = (value as u128 * gens[i].0 as u128 % d as u128) as u64;
            if digits[i] < gens[i].1 {
                break;
            }
            // Wrapped: generator order returns the running product to its
            // state before this digit started, so no correction multiply.
            digits[i] = 0;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
    assert_eq!(seen, phi, "unit group enumeration incomplete for d = {d}");

    let exponent = gens.iter().fold(1u64, |l, &(_, o)| num_integer::lcm(l, o));
    let rou: Vec<Complex64> = (0..exponent)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / exponent as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect();

    // Kernels K_f = {x coprime to d : x ≡ 1 mod f} for every divisor f of d,
    // as dlog vectors.
    let divs = divisors(d)?;
    let kernels: Vec<(u64, Vec<Vec<u64>>)> = divs
        .iter()
        .map(|&f| {
            let mut k = Vec::new();
            let mut x = 1 % d;
            loop {
                if let Some(a) = &dlog[x as usize] {
                    k.push(a.clone());
                }
                x += f;
                if x >= d {
                    break;
                }
            }
            (f, k)
        })
        .collect();

    let phase = |exps: &[u64], a: &[u64]| -> u64 {
        let mut ph = 0u64;
        for (i, (&c, &ai)) in exps.iter().zip(a.iter()).enumerate() {
            let step = exponent / gens[i].1;
            ph = (ph + (c as u128 * ai as u128 % exponent as u128) as u64 * step % exponent)
                % exponent;
        }
        ph
    };

    let mut chars = Vec::with_capacity(phi as usize);
    let mut exps = vec![0u64; gens.len()];
    loop {
        let principal = exps.iter().all(|&c| c == 0);
        let conductor = if principal {
            1
        } else {
            let mut found = d;
            for (f, kernel) in &kernels {
                if *f == d {
                    break;
                }
                if kernel.iter().all(|a| phase(&exps, a) == 0) {
                    found = *f;
                    break;
                }
            }
            found
        };
        let order = exps
            .iter()
            .enumerate()
            .fold(1u64, |l, (i, &c)| {
                let o = gens[i].1;
                num_integer::lcm(l, o / num_integer::gcd(o, c))
            });
        chars.push(DirichletChar {
            exps: exps.clone(),
            conductor,
            primitive: conductor == d,
            principal,
            order,
        });
        let mut pos = gens.len();
        while pos > 0 {
            let i = pos - 1;
            exps[i] += 1;
            if exps[i] < gens[i].1 {
                break;
            }
            exps[i] = 0;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
    assert_eq!(chars.len() as u64, phi);

    Ok(DirichletGroup {
        modulus: d,
        phi,
        exponent,
        gens,
        dlog,
        chars,
        rou,
    })
}

impl DirichletGroup {
    pub fn char_count(&self) -> usize {
        self.chars.len()
    }

    pub fn chars(&self) -> &[DirichletChar] {
        &self.chars
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.gens
    }

    pub fn primitive_indices(&self) -> Vec<usize> {
        (0..self.chars.len())
            .filter(|&i| self.chars[i].primitive)
            .collect()
    }

    pub fn is_unit(&self, n: u64) -> bool {
        self.dlog[(n % self.modulus) as usize].is_some()
    }

    /// χ_idx(n); zero when gcd(n, d) > 1.
    pub fn value(&self, idx: usize, n: u64) -> Complex64 {
        match &self.dlog[(n % self.modulus) as usize] {
            None => Complex64::new(0.0, 0.0),
            Some(a) => {
                let exps = &self.chars[idx].exps;
                let mut ph = 0u64;
                for (i, (&c, &ai)) in exps.iter().zip(a.iter()).enumerate() {
                    let step = self.exponent / self.gens[i].1;
                    ph = (ph
                        + (c as u128 * ai as u128 % self.exponent as u128) as u64 * step
                            % self.exponent)
                        % self.exponent;
                }
                self.rou[ph as usize]
            }
        }
    }

    /// Dense value table [χ(0), …, χ(d−1)].
    pub fn value_table(&self, idx: usize) -> Vec<Complex64> {
        (0..self.modulus).map(|n| self.value(idx, n)).collect()
    }
}
