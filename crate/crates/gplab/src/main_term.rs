//! Predicted main term for the weighted prime-pair counts, the
//! quasi-explicit bias evaluator with supplied zero data, and comparison
//! reports against the observed counts.

use crate::arith::{factor_u64, isqrt, Accumulator};
use crate::chars::{character_table, hecke_eval, CharTable, HeckeChar};
use crate::density::{density_factor_omitting, DensityVariant, DENSITY_CONSTANT};
use crate::error::{Error, Result};
use crate::gauss::GaussInt;
use crate::sieve::{count_weighted, prime_power_map, prime_table, SetB, Weight};
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Squarefree divisors of b with their Möbius signs.
fn squarefree_divisors(b: u64) -> Result<Vec<(u64, i64)>> {
    let mut divs = vec![(1u64, 1i64)];
    for (p, _) in factor_u64(b)? {
        let mut next = Vec::with_capacity(divs.len() * 2);
        for &(d, mu) in &divs {
            next.push((d, mu));
            next.push((d * p, -mu));
        }
        divs = next;
    }
    Ok(divs)
}

/// #{a ∈ (a_lo, a_hi] : gcd(a, b) = 1} by Möbius inversion.
fn coprime_count(a_lo: u64, a_hi: u64, divs: &[(u64, i64)]) -> i64 {
    let mut c = 0i64;
    for &(d, mu) in divs {
        c += mu * ((a_hi / d) as i64 - (a_lo / d) as i64);
    }
    c
}

fn predict_range(
    set: &SetB,
    n_lo: u64,
    n_hi: u64,
    weight: Weight,
    omit: Option<u64>,
) -> Result<f64> {
    let terms: Vec<f64> = set
        .members()
        .par_iter()
        .map(|&b| -> Result<f64> {
            let bb = b * b;
            if bb >= n_hi {
                return Ok(0.0);
            }
            let omega = ratio_f64(density_factor_omitting(b, DensityVariant::Omega, omit)?);
            let divs = squarefree_divisors(b)?;
            let a_hi = isqrt(n_hi - bb);
            let a_lo = isqrt(n_lo.saturating_sub(bb));
            Ok(omega * coprime_count(a_lo, a_hi, &divs) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut acc = Accumulator::new();
    for t in terms {
        acc.add(t);
    }
    let m = DENSITY_CONSTANT * acc.total();
    Ok(match weight {
        Weight::Lambda => m,
        Weight::Unit => m / (n_hi as f64).ln(),
    })
}

/// Main-term prediction Σ_{a²+b²≤X, (a,b)=1, b∈B} ω(b), scaled by the
/// quadratic-residue density constant; unit weight divides by log X as the
/// Λ-to-prime-count proxy.
pub fn predict_main(set: &SetB, x: u64, weight: Weight) -> Result<f64> {
    predict_range(set, 0, x, weight, None)
}

/// Same prediction with the local factor of one prime removed from ω —
/// the denominator of the ω-boost ratio for B inside an arithmetic
/// progression.
pub fn predict_main_omitting(set: &SetB, x: u64, weight: Weight, omit: u64) -> Result<f64> {
    predict_range(set, 0, x, weight, Some(omit))
}

/// Dyadic variant over X < a²+b² ≤ 2X.
pub fn predict_main_dyadic(set: &SetB, x: u64, weight: Weight) -> Result<f64> {
    let hi = x.checked_mul(2).ok_or(Error::Overflow("dyadic range"))?;
    predict_range(set, x, hi, weight, None)
}

/// One supplied zero ρ = β + it of the L-function attached to a character.
#[derive(Clone)]
pub struct ZeroDatum {
    pub beta: f64,
    pub t: f64,
    pub char: HeckeChar,
}

impl ZeroDatum {
    pub fn new(beta: f64, t: f64, char_: HeckeChar) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::BadSpec(format!("beta = {beta} outside (0, 1]")));
        }
        Ok(Self {
            beta,
            t,
            char: char_,
        })
    }
}

/// Reads a zero-scenario file: one `beta t re im index k` record per line,
/// `#` comments and blank lines ignored. Characters are looked up as index
/// `index` in the table mod re+im·i, twisted by angular frequency k; |t| is
/// capped by `t_max`.
pub fn parse_zero_file(path: &str, t_max: f64) -> Result<Vec<ZeroDatum>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    let mut tables: HashMap<(i64, i64), Arc<CharTable>> = HashMap::new();
    let mut zeros = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::BadSpec(format!(
                "line {}: expected `beta t re im index k`, got {} fields",
                lineno + 1,
                fields.len()
            )));
        }
        let parse_err = |what: &str| Error::BadSpec(format!("line {}: bad {what}", lineno + 1));
        let beta: f64 = fields[0].parse().map_err(|_| parse_err("beta"))?;
        let t: f64 = fields[1].parse().map_err(|_| parse_err("t"))?;
        let re: i64 = fields[2].parse().map_err(|_| parse_err("re"))?;
        let im: i64 = fields[3].parse().map_err(|_| parse_err("im"))?;
        let index: usize = fields[4].parse().map_err(|_| parse_err("index"))?;
        let k: i64 = fields[5].parse().map_err(|_| parse_err("k"))?;
        if t.abs() > t_max {
            return Err(Error::BadSpec(format!(
                "line {}: |t| = {} exceeds window {t_max}",
                lineno + 1,
                t.abs()
            )));
        }
        let table = match tables.get(&(re, im)) {
            Some(t) => t.clone(),
            None => {
                let t = Arc::new(character_table(GaussInt::new(re, im))?);
                tables.insert((re, im), t.clone());
                t
            }
        };
        if index >= table.char_count() {
            return Err(Error::BadSpec(format!(
                "line {}: character index {index} out of range (table has {})",
                lineno + 1,
                table.char_count()
            )));
        }
        zeros.push(ZeroDatum::new(beta, t, HeckeChar::new(k, table, index))?);
    }
    Ok(zeros)
}

struct GatedZero<'a> {
    zero: &'a ZeroDatum,
    /// The combined unit character is trivial on i, so the term descends to
    /// ideals; ungated zeros contribute nothing.
    gate: bool,
}

fn gate_zero(z: &ZeroDatum) -> GatedZero<'_> {
    let chi_i = z.char.table.value(z.char.index, GaussInt::new(0, 1));
    let unit = Complex64::from_polar(1.0, z.char.k as f64 * FRAC_PI_2);
    GatedZero {
        zero: z,
        gate: (chi_i * unit - Complex64::new(1.0, 0.0)).norm() < 1e-9,
    }
}

fn quasi_core(set: &SetB, x: u64, zeros: &[ZeroDatum]) -> Result<(Complex64, u64)> {
    for z in zeros {
        if !(z.beta > 0.0 && z.beta <= 1.0) {
            return Err(Error::BadSpec(format!("beta = {} outside (0, 1]", z.beta)));
        }
    }
    let gated: Vec<GatedZero> = zeros.iter().map(gate_zero).collect();
    let partials: Vec<(Complex64, u64)> = set
        .members()
        .par_iter()
        .map(|&b| -> Result<(Complex64, u64)> {
            let bb = b * b;
            if bb >= x {
                return Ok((Complex64::new(0.0, 0.0), 0));
            }
            let w = ratio_f64(density_factor_omitting(b, DensityVariant::Omega2, None)?);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut terms = 0u64;
            for a in 1..=isqrt(x - bb) {
                if (a + b) % 2 == 0 || crate::arith::gcd_u64(a, b) != 1 {
                    continue;
                }
                let n = a * a + bb;
                let z = GaussInt::new(b as i64, a as i64);
                let mut inner = Complex64::new(1.0, 0.0);
                for g in &gated {
                    if !g.gate {
                        continue;
                    }
                    let chi = match hecke_eval(&g.zero.char, z) {
                        Ok(v) => v,
                        Err(Error::NotCoprime { .. }) => Complex64::new(0.0, 0.0),
                        Err(e) => return Err(e),
                    };
                    let nf = n as f64;
                    let rho_pow = Complex64::from_polar(
                        nf.powf(g.zero.beta - 1.0),
                        g.zero.t * nf.ln(),
                    );
                    inner -= chi.conj() * rho_pow;
                }
                acc += w * inner;
                terms += 1;
            }
            Ok((acc, terms))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut re = Accumulator::new();
    let mut im = Accumulator::new();
    let mut terms = 0u64;
    for (c, t) in partials {
        re.add(c.re);
        im.add(c.im);
        terms += t;
    }
    Ok((Complex64::new(re.total(), im.total()), terms))
}

/// Plain ω₂-weighted count over primitive odd pairs — the zero-free value of
/// the quasi-explicit sum, shared enumeration path.
pub fn omega2_weighted_count(set: &SetB, x: u64) -> Result<f64> {
    Ok(DENSITY_CONSTANT * quasi_core(set, x, &[])?.0.re)
}

/// Evaluates Σ ω₂(b)·(1 − Σ_j ξ̄χ̄_j(𝔫)·𝒩𝔫^{ρ_j−1}) over ideals 𝔫 = (b+ia)
/// with gcd(a,b) = 1, a+b odd, b ∈ B, scaled by the density constant. Zeros
/// whose combined character is nontrivial on units are gated out.
pub fn quasi_explicit_eval(set: &SetB, x: u64, zeros: &[ZeroDatum]) -> Result<f64> {
    Ok(DENSITY_CONSTANT * quasi_core(set, x, zeros)?.0.re)
}

/// Observed side of the quasi-explicit comparison: Σ Λ(a²+b²) over primitive
/// odd pairs with b ∈ B. The ω₂ factor lives entirely on the prediction side.
pub fn observed_bias_sum(set: &SetB, x: u64) -> Result<f64> {
    let primes = prime_table(x)?;
    let powers = prime_power_map(x, &primes);
    let partials: Vec<f64> = set
        .members()
        .par_iter()
        .map(|&b| -> Result<f64> {
            let bb = b * b;
            if bb >= x {
                return Ok(0.0);
            }
            let mut acc = Accumulator::new();
            for a in 1..=isqrt(x - bb) {
                if (a + b) % 2 == 0 || crate::arith::gcd_u64(a, b) != 1 {
                    continue;
                }
                let n = a * a + bb;
                if primes.is_prime(n) {
                    acc.add((n as f64).ln());
                } else if let Some(&l) = powers.get(&n) {
                    acc.add(l);
                }
            }
            Ok(acc.total())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut acc = Accumulator::new();
    for p in partials {
        acc.add(p);
    }
    Ok(acc.total())
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PredictionReport {
    pub m_predicted: f64,
    pub s_observed: f64,
    /// (S − M)/M; absent when M = 0.
    pub relative_error: Option<f64>,
    pub bias_factor_applied: bool,
    pub terms: u64,
}

/// Runs the observed count and the prediction side by side. With zeros the
/// comparison switches to the ω₂/Λ convention of the quasi-explicit formula.
pub fn compare_report(
    set: &SetB,
    x: u64,
    weight: Weight,
    zeros: &[ZeroDatum],
) -> Result<PredictionReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let (m, s, terms) = if zeros.is_empty() {
        let count = count_weighted(set, x, weight, true)?;
        (
            predict_main(set, x, weight)?,
            count.s_observed,
            count.pairs_scanned,
        )
    } else {
        if weight != Weight::Lambda {
            return Err(Error::BadSpec(
                "bias comparison is defined for the lambda weight".into(),
            ));
        }
        let (val, terms) = quasi_core(set, x, zeros)?;
        (DENSITY_CONSTANT * val.re, observed_bias_sum(set, x)?, terms)
    };
    let relative_error = if m != 0.0 { Some((s - m) / m) } else { None };
    Ok(PredictionReport {
        m_predicted: m,
        s_observed: s,
        relative_error,
        bias_factor_applied: !zeros.is_empty(),
        terms,
    })
}
