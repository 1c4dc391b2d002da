//! Sparse-set construction and the counting kernel
//! S(B, X) = Σ_{a²+b²≤X, b∈B} w(a²+b²).

use crate::arith::{gcd_u64, ikth_root, isqrt, Accumulator};
use crate::budget;
use crate::error::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

pub use crate::arith::is_prime64;

/// log p if n = p^k (exact perfect-power detection), else 0.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if is_prime64(n) {
        return (n as f64).ln();
    }
    for k in 2..=63u32 {
        if n >> k == 0 {
            break;
        }
        let r = ikth_root(n, k);
        if r < 2 {
            break;
        }
        if r.checked_pow(k) == Some(n) && is_prime64(r) {
            return (r as f64).ln();
        }
    }
    0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    All,
    Primes,
    Squares,
    Multiples,
    Random,
    DigitMissing,
    Explicit,
}

/// Declarative description of the sparse set B: a kind, its parameters, and
/// the interval [lo, hi] the members live in.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseSetSpec {
    pub kind: SetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub interval: [u64; 2],
}

impl SparseSetSpec {
    pub fn new(kind: SetKind, interval: [u64; 2]) -> Self {
        Self {
            kind,
            q: None,
            delta: None,
            seed: None,
            base: None,
            digit: None,
            path: None,
            interval,
        }
    }

    fn check_params(&self) -> Result<()> {
        let allowed: &[&str] = match self.kind {
            SetKind::Multiples => &["q"],
            SetKind::Random => &["delta", "seed"],
            SetKind::DigitMissing => &["base", "digit"],
            SetKind::Explicit => &["path"],
            _ => &[],
        };
        let present = [
            ("q", self.q.is_some()),
            ("delta", self.delta.is_some()),
            ("seed", self.seed.is_some()),
            ("base", self.base.is_some()),
            ("digit", self.digit.is_some()),
            ("path", self.path.is_some()),
        ];
        for (name, is_set) in present {
            let wanted = allowed.contains(&name);
            if is_set && !wanted {
                return Err(Error::BadSpec(format!(
                    "param `{name}` does not apply to kind {:?}",
                    self.kind
                )));
            }
            if !is_set && wanted {
                return Err(Error::BadSpec(format!(
                    "kind {:?} requires param `{name}`",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

/// Materialized sparse set: sorted member list plus a membership bitmap over
/// its interval.
#[derive(Debug, Clone)]
pub struct SetB {
    lo: u64,
    hi: u64,
    members: Vec<u64>,
    bitmap: Vec<u64>,
}

impl SetB {
    /// Builds directly from a list (deduplicated, sorted); empty is allowed.
    pub fn from_list(mut members: Vec<u64>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.first() == Some(&0) {
            return Err(Error::BadSpec("set members must be positive".into()));
        }
        let lo = members.first().copied().unwrap_or(1);
        let hi = members.last().copied().unwrap_or(0);
        let words = if hi >= lo {
            (hi - lo) / 64 + 1
        } else {
            0
        };
        budget::charge(8 * words)?;
        let mut bitmap = vec![0u64; words as usize];
        for &m in &members {
            let off = m - lo;
            bitmap[(off / 64) as usize] |= 1 << (off % 64);
        }
        Ok(Self {
            lo,
            hi,
            members,
            bitmap,
        })
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.lo || n > self.hi {
            return false;
        }
        let off = n - self.lo;
        self.bitmap[(off / 64) as usize] >> (off % 64) & 1 == 1
    }
}

/// Materializes the set described by `spec`; the interval must fit in
/// [1, ⌊√X⌋]. Explicit files are newline/whitespace-delimited integers and
/// are intersected with the interval.
pub fn build_set(spec: &SparseSetSpec, x: u64) -> Result<SetB> {
    let [lo, hi] = spec.interval;
    if lo == 0 {
        return Err(Error::BadSpec("interval must start at 1 or above".into()));
    }
    if lo > hi {
        return Err(Error::BadSpec(format!("empty interval [{lo}, {hi}]")));
    }
    if hi > isqrt(x) {
        return Err(Error::BadSpec(format!(
            "interval end {hi} exceeds ⌊√X⌋ = {}",
            isqrt(x)
        )));
    }
    spec.check_params()?;
    let members: Vec<u64> = match spec.kind {
        SetKind::All => (lo..=hi).collect(),
        SetKind::Primes => (lo..=hi).filter(|&n| is_prime64(n)).collect(),
        SetKind::Squares => {
            let mut c = isqrt(lo);
            while c * c < lo {
                c += 1;
            }
            let mut v = Vec::new();
            while c * c <= hi {
                v.push(c * c);
                c += 1;
            }
            v
        }
        SetKind::Multiples => {
            let q = spec.q.unwrap();
            if q == 0 {
                return Err(Error::BadSpec("multiples requires q ≥ 1".into()));
            }
            let first = lo.div_ceil(q) * q;
            (0..)
                .map(|i| first + i * q)
                .take_while(|&m| m <= hi)
                .collect()
        }
        SetKind::Random => {
            let delta = spec.delta.unwrap();
            let seed = spec.seed.unwrap();
            if !(delta > 0.0 && delta < 0.5) {
                return Err(Error::BadSpec(format!(
                    "random requires 0 < delta < 1/2, got {delta}"
                )));
            }
            let span = hi - lo;
            let target = ((span as f64).powf(1.0 - 2.0 * delta)).floor() as usize;
            let size = (span + 1) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<u64> = sample(&mut rng, size, target.min(size))
                .into_iter()
                .map(|i| lo + i as u64)
                .collect();
            v.sort_unstable();
            v
        }
        SetKind::DigitMissing => {
            let base = spec.base.unwrap();
            let digit = spec.digit.unwrap();
            if base < 2 || digit >= base {
                return Err(Error::BadSpec(format!(
                    "digit_missing requires base ≥ 2 and digit < base, got base {base} digit {digit}"
                )));
            }
            (lo..=hi)
                .filter(|&n| {
                    let mut m = n;
                    while m > 0 {
                        if m % base == digit {
                            return false;
                        }
                        m /= base;
                    }
                    true
                })
                .collect()
        }
        SetKind::Explicit => {
            let path = spec.path.as_ref().unwrap();
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
            let mut v = Vec::new();
            for tok in text.split_whitespace() {
                let n: u64 = tok
                    .parse()
                    .map_err(|_| Error::BadSpec(format!("bad integer `{tok}` in {path}")))?;
                if (lo..=hi).contains(&n) {
                    v.push(n);
                }
            }
            v
        }
    };
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    SetB::from_list(members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Unit,
    Lambda,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub s_observed: f64,
    pub pairs_scanned: u64,
    pub weight: Weight,
    pub coprime_filter: bool,
    #[serde(skip)]
    pub wall_time: Duration,
    pub worker_count: usize,
}

pub(crate) struct PrimeTable {
    limit: u64,
    words: Vec<u64>,
}

impl PrimeTable {
    fn build(limit: u64) -> Result<Self> {
        budget::charge(limit / 8 + 64)?;
        let n = limit + 1;
        let words = (n / 64 + 1) as usize;
        let mut composite = vec![0u64; words];
        let mark = |w: &mut Vec<u64>, i: u64| w[(i / 64) as usize] |= 1 << (i % 64);
        let mut p = 2u64;
        while p * p <= limit {
            if composite[(p / 64) as usize] >> (p % 64) & 1 == 0 {
                let mut m = p * p;
                while m <= limit {
                    mark(&mut composite, m);
                    m += p;
                }
            }
            p += 1;
        }
        Ok(Self {
            limit,
            words: composite,
        })
    }

    #[inline]
    pub(crate) fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.words[(n / 64) as usize] >> (n % 64) & 1 == 0
    }
}

pub(crate) fn prime_table(limit: u64) -> Result<Arc<PrimeTable>> {
    static CACHE: OnceLock<Mutex<Option<Arc<PrimeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.as_ref() {
        if t.limit >= limit {
            return Ok(t.clone());
        }
    }
    let grown = match guard.as_ref() {
        Some(t) => limit.max(t.limit.saturating_mul(2)),
        None => limit,
    };
    let table = Arc::new(PrimeTable::build(grown)?);
    *guard = Some(table.clone());
    Ok(table)
}

/// Λ-values above the prime bitmap: p^k ↦ log p for k ≥ 2, p^k ≤ limit.
pub(crate) fn prime_power_map(limit: u64, primes: &PrimeTable) -> HashMap<u64, f64> {
    let mut map = HashMap::new();
    let mut p = 2u64;
    while p * p <= limit {
        if primes.is_prime(p) {
            let mut v = p * p;
            loop {
                map.insert(v, (p as f64).ln());
                match v.checked_mul(p) {
                    Some(next) if next <= limit => v = next,
                    _ => break,
                }
            }
        }
        p += 1;
    }
    map
}

fn stratum(
    b: u64,
    n_lo: u64,
    n_hi: u64,
    weight: Weight,
    coprime: bool,
    primes: &PrimeTable,
    powers: &HashMap<u64, f64>,
) -> (f64, u64) {
    let bb = b * b;
    if bb >= n_hi {
        return (0.0, 0);
    }
    let mut a = isqrt(n_lo.saturating_sub(bb));
    while a * a + bb <= n_lo {
        a += 1;
    }
    a = a.max(1);
    let a_hi = isqrt(n_hi - bb);
    if a > a_hi {
        return (0.0, 0);
    }
    let mut acc = Accumulator::new();
    for a in a..=a_hi {
        let n = a * a + bb;
        if coprime && gcd_u64(a, b) != 1 {
            continue;
        }
        match weight {
            Weight::Unit => {
                if primes.is_prime(n) {
                    acc.add(1.0);
                }
            }
            Weight::Lambda => {
                if primes.is_prime(n) {
                    acc.add((n as f64).ln());
                } else if let Some(&l) = powers.get(&n) {
                    acc.add(l);
                }
            }
        }
    }
    (acc.total(), a_hi - a + 1)
}

fn count_range(
    set: &SetB,
    n_lo: u64,
    n_hi: u64,
    weight: Weight,
    coprime: bool,
) -> Result<CountReport> {
    let start = Instant::now();
    let primes = prime_table(n_hi)?;
    let powers = match weight {
        Weight::Lambda => prime_power_map(n_hi, &primes),
        Weight::Unit => HashMap::new(),
    };
    // Per-stratum partials collected in b-order, folded sequentially: the
    // result is bitwise independent of the worker count.
    let partials: Vec<(f64, u64)> = set
        .members
        .par_iter()
        .map(|&b| stratum(b, n_lo, n_hi, weight, coprime, &primes, &powers))
        .collect();
    let mut total = Accumulator::new();
    let mut pairs = 0u64;
    for (s, c) in partials {
        total.add(s);
        pairs += c;
    }
    Ok(CountReport {
        s_observed: total.total(),
        pairs_scanned: pairs,
        weight,
        coprime_filter: coprime,
        wall_time: start.elapsed(),
        worker_count: rayon::current_num_threads(),
    })
}

/// S(B, X) over a²+b² ≤ X. Runs on the ambient rayon pool; install a
/// dedicated pool to pin the worker count.
pub fn count_weighted(set: &SetB, x: u64, weight: Weight, coprime: bool) -> Result<CountReport> {
    count_range(set, 0, x, weight, coprime)
}

/// Dyadic variant: X < a²+b² ≤ 2X.
pub fn count_weighted_dyadic(
    set: &SetB,
    x: u64,
    weight: Weight,
    coprime: bool,
) -> Result<CountReport> {
    let hi = x.checked_mul(2).ok_or(Error::Overflow("dyadic range"))?;
    count_range(set, x, hi, weight, coprime)
}

/// Per-stratum breakdown of `count_weighted`: one (b, partial sum, pairs)
/// row per member in ascending order. Folding the rows reproduces the total
/// bitwise.
pub fn count_strata(
    set: &SetB,
    x: u64,
    weight: Weight,
    coprime: bool,
) -> Result<Vec<(u64, f64, u64)>> {
    let primes = prime_table(x)?;
    let powers = match weight {
        Weight::Lambda => prime_power_map(x, &primes),
        Weight::Unit => HashMap::new(),
    };
    Ok(set
        .members
        .par_iter()
        .map(|&b| {
            let (s, c) = stratum(b, 0, x, weight, coprime, &primes, &powers);
            (b, s, c)
        })
        .collect())
}
