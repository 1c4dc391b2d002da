//! Character groups of (ℤ[i]/uℤ[i])^×: canonical residue reduction, a
//! verified generator basis per prime-power component, conductors by
//! sub-modulus restriction, angular twists, and the character-sum checks
//! built on top of them.

use crate::arith::{factor_u64, gcd_u64};
use crate::budget;
use crate::error::{Error, Result};
use crate::gauss::{self, GaussInt};
use num_complex::Complex64;
use std::collections::HashSet;
use std::sync::Arc;

pub const DEFAULT_MODULUS_BOUND: u64 = 200;

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    // g = x·a + y·b with g ≥ 0.
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Row-reduced basis of the lattice uℤ[i] ⊂ ℤ²: vectors (cols, 0) and
/// (h, rows) with rows·cols = 𝒩(u). Maps any Gaussian integer to a canonical
/// representative with 0 ≤ re < cols, 0 ≤ im < rows, and to the dense index
/// im·cols + re.
#[derive(Debug, Clone)]
struct CanonicalMap {
    rows: i64,
    cols: i64,
    h: i64,
}

impl CanonicalMap {
    fn new(u: GaussInt) -> Result<Self> {
        let n = u.norm()? as i64;
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        // (p + qi)(re + im·i) = (p·re − q·im) + (p·im + q·re)i lies in the
        // lattice with imaginary part g = gcd(re, im), the minimum positive
        // one attained.
        let (g, p, q) = egcd(u.im, u.re);
        let h = p * u.re - q * u.im;
        debug_assert_eq!(p * u.im + q * u.re, g);
        let map = Self {
            rows: g,
            cols: n / g,
            h,
        };
        debug_assert_eq!(map.index(u), 0);
        debug_assert_eq!(map.index(GaussInt::new(-u.im, u.re)), 0);
        Ok(map)
    }

    fn size(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    fn reduce(&self, z: GaussInt) -> GaussInt {
        let y = (z.im as i128).rem_euclid(self.rows as i128);
        let t = (z.im as i128 - y) / self.rows as i128;
        let x = (z.re as i128 - t * self.h as i128).rem_euclid(self.cols as i128);
        GaussInt::new(x as i64, y as i64)
    }

    fn index(&self, z: GaussInt) -> usize {
        let r = self.reduce(z);
        (r.im * self.cols + r.re) as usize
    }

    fn from_index(&self, idx: usize) -> GaussInt {
        GaussInt::new(idx as i64 % self.cols, idx as i64 / self.cols)
    }

    fn mul(&self, a: GaussInt, b: GaussInt) -> GaussInt {
        let re = a.re as i128 * b.re as i128 - a.im as i128 * b.im as i128;
        let im = a.re as i128 * b.im as i128 + a.im as i128 * b.re as i128;
        let y = im.rem_euclid(self.rows as i128);
        let t = (im - y) / self.rows as i128;
        let x = (re - t * self.h as i128).rem_euclid(self.cols as i128);
        GaussInt::new(x as i64, y as i64)
    }

    fn pow(&self, base: GaussInt, mut e: u64) -> GaussInt {
        let mut acc = self.reduce(GaussInt::ONE);
        let mut b = self.reduce(base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
}

/// Multiplicative order of x modulo the map's lattice, given a multiple
/// `group_order` of it.
fn order_of(map: &CanonicalMap, x: GaussInt, group_order: u64) -> u64 {
    let one = map.reduce(GaussInt::ONE);
    let mut t = group_order;
    for (q, _) in factor_u64(group_order).expect("group order positive") {
        while t % q == 0 && map.pow(x, t / q) == one {
            t /= q;
        }
    }
    t
}

/// Direct-sum generator basis of an abelian unit group: greedy descent over
/// element orders, keeping a candidate only when its cyclic span meets the
/// current span trivially. The running span certifies independence, and the
/// final size certifies completeness.
fn find_basis(
    map: &CanonicalMap,
    units: &[GaussInt],
    group_order: u64,
) -> Vec<(GaussInt, u64)> {
    let one = map.reduce(GaussInt::ONE);
    let mut ordered: Vec<(u64, GaussInt)> = units
        .iter()
        .map(|&z| (order_of(map, z, group_order), z))
        .collect();
    ordered.sort_by_key(|&(o, z)| (std::cmp::Reverse(o), z.im, z.re));

    let mut span: HashSet<GaussInt> = HashSet::new();
    span.insert(one);
    let mut gens: Vec<(GaussInt, u64)> = Vec::new();
    for &(ord, cand) in &ordered {
        if span.len() as u64 == group_order {
            break;
        }
        if ord == 1 {
            continue;
        }
        let mut powers = Vec::with_capacity(ord as usize - 1);
        let mut cur = map.reduce(cand);
        let mut independent = true;
        for _ in 1..ord {
            if span.contains(&cur) {
                independent = false;
                break;
            }
            powers.push(cur);
            cur = map.mul(cur, cand);
        }
        if !independent {
            continue;
        }
        let old: Vec<GaussInt> = span.iter().copied().collect();
        for p in powers {
            for &s in &old {
                span.insert(map.mul(s, p));
            }
        }
        gens.push((cand, ord));
    }
    assert_eq!(
        span.len() as u64,
        group_order,
        "generator search failed to span the unit group"
    );
    gens
}

struct Component {
    prime: GaussInt,
    e: u32,
    modulus: GaussInt,
    map: CanonicalMap,
    gens: Vec<(GaussInt, u64)>,
    order: u64,
    /// Units ≡ 1 mod prime^f, as local discrete logs, for f = 1..=e.
    kernels: Vec<Vec<Vec<u64>>>,
}

impl Component {
    fn build(prime: GaussInt, e: u32) -> Result<Self> {
        let mut modulus = GaussInt::ONE;
        for _ in 0..e {
            modulus = modulus.checked_mul(prime)?;
        }
        let map = CanonicalMap::new(modulus)?;
        let order = gauss::euler_phi_zi(modulus)?;

        let mut units = Vec::with_capacity(order as usize);
        for idx in 0..map.size() {
            let z = map.from_index(idx);
            if !z.divisible_by(prime) {
                units.push(z);
            }
        }
        assert_eq!(units.len() as u64, order);

        let gens = find_basis(&map, &units, order);

        // Local discrete logs via the generator odometer.
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; map.size()];
        let mut digits = vec![0u64; gens.len()];
        let mut value = map.reduce(GaussInt::ONE);
        loop {
            let idx = map.index(value);
            assert!(dlog[idx].is_none(), "generator odometer collided");
            dlog[idx] = Some(digits.clone());
            let mut pos = gens.len();
            while pos > 0 {
                let i = pos - 1;
                digits[i] += 1;
                value = map.mul(value, map.reduce(gens[i].0));
                if digits[i] < gens[i].1 {
                    break;
                }
                digits[i] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }

        // Kernel of reduction to prime^f: units with v_prime(z − 1) ≥ f.
        let mut kernels: Vec<Vec<Vec<u64>>> = vec![Vec::new(); e as usize];
        for &z in &units {
            let mut w = z.checked_sub(GaussInt::ONE)?;
            let mut val = 0u32;
            while val < e && w != GaussInt::ZERO && w.divisible_by(prime) {
                w = w.exact_div(prime)?;
                val += 1;
            }
            if w == GaussInt::ZERO {
                val = e;
            }
            let a = dlog[map.index(z)].clone().expect("unit has a dlog");
            for f in 1..=val.min(e) {
                kernels[f as usize - 1].push(a.clone());
            }
        }

        Ok(Self {
            prime,
            e,
            modulus,
            map,
            gens,
            order,
            kernels,
        })
    }
}

/// The unit group (ℤ[i]/uℤ[i])^× with generators, orders, and a dense
/// discrete-log table over canonical residues.
pub struct ResidueGroup {
    pub modulus: GaussInt,
    pub order: u64,
    /// Global generators with their orders; ∏ orders = group order.
    pub generators: Vec<(GaussInt, u64)>,
    /// lcm of generator orders.
    pub exponent: u64,
    map: CanonicalMap,
    /// Canonical index → unit ordinal, or -1 for non-units.
    unit_ordinal: Vec<i32>,
    /// Unit ordinal → canonical representative.
    units: Vec<GaussInt>,
    /// Unit ordinal → exponent vector (row-major, stride = #generators).
    dlog_flat: Vec<u64>,
    comps: Vec<Component>,
    /// For each generator, the component it came from.
    gen_comp: Vec<usize>,
}

pub fn residue_group(u: GaussInt) -> Result<ResidueGroup> {
    residue_group_bounded(u, DEFAULT_MODULUS_BOUND)
}

pub fn residue_group_bounded(u: GaussInt, bound: u64) -> Result<ResidueGroup> {
    if u == GaussInt::ZERO {
        return Err(Error::ZeroArgument);
    }
    let m = gauss::m_of(u)?;
    if m > bound {
        return Err(Error::ModulusTooLarge {
            modulus: u,
            m,
            bound,
        });
    }
    let norm = u.norm()?;
    budget::charge(norm * 96)?;
    let map = CanonicalMap::new(u)?;

    let fac = gauss::factor_gaussian(u)?;
    let mut comps = Vec::new();
    for &(p, e) in &fac.factors {
        comps.push(Component::build(p, e)?);
    }

    let order = gauss::euler_phi_zi(u)?;
    let mut generators: Vec<(GaussInt, u64)> = Vec::new();
    let mut gen_comp: Vec<usize> = Vec::new();
    for (ci, comp) in comps.iter().enumerate() {
        // Cofactor ≡ 0 mod every other component, coprime to this one.
        let mut cofactor = GaussInt::ONE;
        for (cj, other) in comps.iter().enumerate() {
            if cj != ci {
                cofactor = cofactor.checked_mul(other.modulus)?;
            }
        }
        let inv = comp
            .map
            .pow(comp.map.reduce(cofactor), comp.order - 1);
        for &(t, ord) in &comp.gens {
            // T = 1 + cofactor·s ≡ t mod this component, ≡ 1 mod the rest.
            let s = comp
                .map
                .mul(comp.map.reduce(t.checked_sub(GaussInt::ONE)?), inv);
            let lifted = map.reduce(GaussInt::ONE.checked_add(cofactor.checked_mul(s)?)?);
            debug_assert_eq!(order_of(&map, lifted, order), ord);
            generators.push((lifted, ord));
            gen_comp.push(ci);
        }
    }

    let mut unit_ordinal = vec![-1i32; map.size()];
    let mut units: Vec<GaussInt> = Vec::with_capacity(order as usize);
    let stride = generators.len();
    let mut dlog_flat: Vec<u64> = Vec::with_capacity(order as usize * stride);
    let mut digits = vec![0u64; stride];
    let mut value = map.reduce(GaussInt::ONE);
    loop {
        let idx = map.index(value);
        assert!(
            unit_ordinal[idx] < 0,
            "global generator enumeration collided at {value}"
        );
        unit_ordinal[idx] = units.len() as i32;
        units.push(value);
        dlog_flat.extend_from_slice(&digits);
        let mut pos = stride;
        while pos > 0 {
            let i = pos - 1;
            digits[i] += 1;
            value = map.mul(value, generators[i].0);
            if digits[i] < generators[i].1 {
                break;
            }
            digits[i] = 0;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
    assert_eq!(units.len() as u64, order, "unit enumeration incomplete");

    let exponent = generators
        .iter()
        .fold(1u64, |l, &(_, o)| num_integer::lcm(l, o));

    Ok(ResidueGroup {
        modulus: u,
        order,
        generators,
        exponent,
        map,
        unit_ordinal,
        units,
        dlog_flat,
        comps,
        gen_comp,
    })
}

impl ResidueGroup {
    /// Exponent vector of z over the group generators; None when z shares a
    /// factor with the modulus.
    pub fn dlog(&self, z: GaussInt) -> Option<&[u64]> {
        let ord = self.unit_ordinal[self.map.index(z)];
        if ord < 0 {
            return None;
        }
        let stride = self.generators.len();
        let start = ord as usize * stride;
        Some(&self.dlog_flat[start..start + stride])
    }

    pub fn is_unit(&self, z: GaussInt) -> bool {
        self.unit_ordinal[self.map.index(z)] >= 0
    }

    pub fn units(&self) -> &[GaussInt] {
        &self.units
    }

    pub fn reduce(&self, z: GaussInt) -> GaussInt {
        self.map.reduce(z)
    }
}

#[derive(Debug, Clone)]
pub struct CharSpec {
    /// Exponent on each group generator.
    pub exps: Vec<u64>,
    pub conductor: GaussInt,
    /// Conductor exponent per prime-power component of the modulus.
    pub comp_exps: Vec<u32>,
    pub primitive: bool,
    pub principal: bool,
    pub order: u64,
}

/// Every character of (ℤ[i]/uℤ[i])^×, with conductors and exact
/// root-of-unity evaluation.
pub struct CharTable {
    pub group: ResidueGroup,
    chars: Vec<CharSpec>,
    rou: Vec<Complex64>,
}

pub fn character_table(u: GaussInt) -> Result<CharTable> {
    character_table_bounded(u, DEFAULT_MODULUS_BOUND)
}

pub fn character_table_bounded(u: GaussInt, bound: u64) -> Result<CharTable> {
    let group = residue_group_bounded(u, bound)?;
    let exponent = group.exponent;
    let rou: Vec<Complex64> = (0..exponent)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / exponent as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect();

    // Generator index ranges per component (generators are grouped).
    let n_comps = group.comps.len();
    let mut ranges: Vec<(usize, usize)> = vec![(usize::MAX, 0); n_comps];
    for (gi, &ci) in group.gen_comp.iter().enumerate() {
        let r = &mut ranges[ci];
        r.0 = r.0.min(gi);
        r.1 = r.1.max(gi + 1);
    }

    let local_phase = |comp: &Component, exps: &[u64], a: &[u64]| -> u64 {
        // Phase in units of 1/local_exponent · lcm over this component only;
        // triviality only needs "≡ 0 mod 1", computed against the local lcm.
        let lexp = comp
            .gens
            .iter()
            .fold(1u64, |l, &(_, o)| num_integer::lcm(l, o));
        let mut ph = 0u64;
        for (i, (&c, &ai)) in exps.iter().zip(a.iter()).enumerate() {
            let step = lexp / comp.gens[i].1;
            ph = (ph + (c as u128 * ai as u128 % lexp as u128) as u64 * step % lexp) % lexp;
        }
        ph
    };

    let mut chars = Vec::with_capacity(group.order as usize);
    let mut exps = vec![0u64; group.generators.len()];
    loop {
        let mut comp_exps: Vec<u32> = Vec::with_capacity(n_comps);
        for (ci, comp) in group.comps.iter().enumerate() {
            let (lo, hi) = ranges[ci];
            let local: &[u64] = if lo == usize::MAX { &[] } else { &exps[lo..hi] };
            let f = if local.iter().all(|&c| c == 0) {
                0
            } else {
                let mut found = comp.e;
                for f in 1..comp.e {
                    if comp.kernels[f as usize - 1]
                        .iter()
                        .all(|a| local_phase(comp, local, a) == 0)
                    {
                        found = f;
                        break;
                    }
                }
                found
            };
            comp_exps.push(f);
        }
        let mut conductor = GaussInt::ONE;
        for (ci, comp) in group.comps.iter().enumerate() {
            for _ in 0..comp_exps[ci] {
                conductor = conductor.checked_mul(comp.prime)?;
            }
        }
        let primitive = group
            .comps
            .iter()
            .zip(comp_exps.iter())
            .all(|(c, &f)| f == c.e);
        let principal = exps.iter().all(|&c| c == 0);
        let order = exps.iter().enumerate().fold(1u64, |l, (i, &c)| {
            let o = group.generators[i].1;
            num_integer::lcm(l, o / num_integer::gcd(o, c))
        });
        chars.push(CharSpec {
            exps: exps.clone(),
            conductor,
            comp_exps,
            primitive,
            principal,
            order,
        });
        let mut pos = exps.len();
        while pos > 0 {
            let i = pos - 1;
            exps[i] += 1;
            if exps[i] < group.generators[i].1 {
                break;
            }
            exps[i] = 0;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
    assert_eq!(chars.len() as u64, group.order);

    Ok(CharTable {
        group,
        chars,
        rou,
    })
}

impl CharTable {
    pub fn char_count(&self) -> usize {
        self.chars.len()
    }

    pub fn chars(&self) -> &[CharSpec] {
        &self.chars
    }

    pub fn primitive_indices(&self) -> Vec<usize> {
        (0..self.chars.len())
            .filter(|&i| self.chars[i].primitive)
            .collect()
    }

    pub fn principal_index(&self) -> usize {
        (0..self.chars.len())
            .find(|&i| self.chars[i].principal)
            .expect("principal character always present")
    }

    fn phase_of(&self, exps: &[u64], a: &[u64]) -> u64 {
        let l = self.group.exponent;
        let mut ph = 0u64;
        for (i, (&c, &ai)) in exps.iter().zip(a.iter()).enumerate() {
            let step = l / self.group.generators[i].1;
            ph = (ph + (c as u128 * ai as u128 % l as u128) as u64 * step % l) % l;
        }
        ph
    }

    /// χ_idx(z); zero when z shares a factor with the modulus.
    pub fn value(&self, idx: usize, z: GaussInt) -> Complex64 {
        match self.group.dlog(z) {
            None => Complex64::new(0.0, 0.0),
            Some(a) => self.rou[self.phase_of(&self.chars[idx].exps, a) as usize],
        }
    }
}

/// A character twisted by the angular frequency k: z ↦ (z/|z|)^k·χ(z),
/// evaluated at the primary associate so the value is well defined on ideals.
#[derive(Clone)]
pub struct HeckeChar {
    pub k: i64,
    pub table: Arc<CharTable>,
    pub index: usize,
}

impl HeckeChar {
    pub fn new(k: i64, table: Arc<CharTable>, index: usize) -> Self {
        Self {
            k,
            table,
            index,
        }
    }
}

pub fn hecke_eval(h: &HeckeChar, z: GaussInt) -> Result<Complex64> {
    if z.norm()? % 2 == 0 {
        return Err(Error::EvenArgument(z));
    }
    let zp = gauss::primary_associate(z)?;
    let Some(a) = h.table.group.dlog(zp) else {
        return Err(Error::NotCoprime {
            arg: z,
            modulus: h.table.group.modulus,
        });
    };
    let chi = h.table.rou[h.table.phase_of(&h.table.chars[h.index].exps, a) as usize];
    let theta = (zp.im as f64).atan2(zp.re as f64);
    Ok(Complex64::from_polar(1.0, h.k as f64 * theta) * chi)
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CharSumCheck {
    pub value: i64,
    pub bound: u64,
    pub pass: bool,
}

/// Σ over primitive rational Dirichlet characters mod d of χ(a), via the
/// multiplicative closed form; checks |S| ≤ gcd(a−1, d).
pub fn primitive_char_sum(a: u64, d: u64) -> Result<CharSumCheck> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    // Every character in the sum vanishes off the unit group.
    let mut value = if gcd_u64(a % d, d) == 1 { 1i64 } else { 0 };
    for (p, k) in factor_u64(d)? {
        let pk = p.pow(k);
        let pk1 = pk / p;
        let phi_pk = (pk - pk1) as i64;
        let phi_pk1 = if k == 1 {
            1
        } else {
            (pk1 - pk1 / p) as i64
        };
        let hi = if a % pk == 1 % pk { phi_pk } else { 0 };
        let lo = if a % pk1 == 1 % pk1 { phi_pk1 } else { 0 };
        value *= hi - lo;
    }
    // gcd(a − 1, d), with gcd(0, d) = d when a ≡ 1.
    let bound = gcd_u64((a % d + d - 1 % d) % d, d);
    Ok(CharSumCheck {
        value,
        bound,
        pass: value.unsigned_abs() <= bound,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GaussSumReport {
    pub p: u64,
    pub k: u32,
    pub l: u32,
    pub chars_qualifying: usize,
    pub max_abs: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

/// For every character mod p^k whose conductor has a component of full
/// exponent k, sums χ(r + i·p^l) over r mod p^k and checks the bound
/// 2·p^{(k+l)/2}.
pub fn gauss_sum_check(p: u64, k: u32, l: u32) -> Result<GaussSumReport> {
    if p == 2 || !crate::arith::is_prime64(p) {
        return Err(Error::BadSpec(format!("p = {p} must be an odd prime")));
    }
    if k == 0 {
        return Err(Error::ZeroArgument);
    }
    let pk = p.pow(k);
    let table = character_table(GaussInt::new(pk as i64, 0))?;
    let pl = p.pow(l) % pk;

    let rows: Vec<Option<&[u64]>> = (0..pk)
        .map(|r| table.group.dlog(GaussInt::new(r as i64, pl as i64)))
        .collect();

    let qualifying: Vec<usize> = (0..table.char_count())
        .filter(|&i| table.chars()[i].comp_exps.iter().copied().max() == Some(k))
        .collect();

    let mut max_abs = 0.0f64;
    for &idx in &qualifying {
        let exps = &table.chars()[idx].exps;
        let mut s = Complex64::new(0.0, 0.0);
        for row in rows.iter().flatten() {
            s += table.rou[table.phase_of(exps, row) as usize];
        }
        max_abs = max_abs.max(s.norm());
    }
    let bound = 2.0 * (p as f64).powf((k + l) as f64 / 2.0);
    Ok(GaussSumReport {
        p,
        k,
        l,
        chars_qualifying: qualifying.len(),
        max_abs,
        bound,
        max_ratio: max_abs / bound,
        pass: max_abs <= bound * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ShortIntervalReport {
    pub sum_abs: f64,
    pub interval_length: f64,
    pub terms: u64,
    pub v_norm: u64,
    /// |sum| / (Y^{1−η} / |u/v|^{2/5}); None for the principal character,
    /// where no cancellation is expected.
    pub ratio: Option<f64>,
    pub principal: bool,
}

/// Σ χ(b + ia) over a ∈ (Y, Y + Y^{1−η}] with a ≡ a0 mod 4 and (a, b) = 1.
pub fn short_interval_char_sum(
    table: &CharTable,
    idx: usize,
    b: u64,
    y: u64,
    eta: f64,
    a0: u64,
) -> Result<ShortIntervalReport> {
    let u = table.group.modulus;
    let nu = u.norm()?;
    if (y as f64) <= (nu as f64).powi(2) {
        return Err(Error::BadSpec(format!(
            "Y = {y} must exceed |u|^4 = {}",
            nu * nu
        )));
    }
    let len = (y as f64).powf(1.0 - eta);
    if len < 1.0 {
        return Err(Error::IntervalEmpty);
    }
    let hi = y + len as u64;
    let mut s = Complex64::new(0.0, 0.0);
    let mut terms = 0u64;
    for a in (y + 1)..=hi {
        if a % 4 != a0 % 4 || gcd_u64(a, b) != 1 {
            continue;
        }
        s += table.value(idx, GaussInt::new(b as i64, a as i64));
        terms += 1;
    }
    let v = gauss::ggcd(u, GaussInt::new(b as i64, 0))?;
    let v_norm = v.norm()?;
    let principal = table.chars()[idx].principal;
    let ratio = if principal {
        None
    } else {
        Some(s.norm() / (len / (nu as f64 / v_norm as f64).powf(0.2)))
    };
    Ok(ShortIntervalReport {
        sum_abs: s.norm(),
        interval_length: len,
        terms,
        v_norm,
        ratio,
        principal,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SmoothedCharSumReport {
    pub sum_abs: f64,
    pub modulus_abs: f64,
    /// |sum| / |u|; None for the principal character.
    pub ratio: Option<f64>,
    pub lattice_points: u64,
    pub principal: bool,
}

/// Σ_z F(𝒩(z)/R²)·χ(z) over the annulus supporting the bump; the smoothed
/// complete character sum is bounded by a constant times |u|.
pub fn polya_vinogradov_check(
    table: &CharTable,
    idx: usize,
    nu: f64,
    radius: f64,
) -> Result<SmoothedCharSumReport> {
    let bump = crate::analysis::make_bump(nu)?;
    let r2 = radius * radius;
    let lim = (radius * (1.0 + nu).sqrt()).ceil() as i64;
    let mut s = Complex64::new(0.0, 0.0);
    let mut pts = 0u64;
    for x in -lim..=lim {
        for y in -lim..=lim {
            let t = (x as f64 * x as f64 + y as f64 * y as f64) / r2;
            let w = bump.eval(t);
            if w == 0.0 {
                continue;
            }
            pts += 1;
            let v = table.value(idx, GaussInt::new(x, y));
            s += w * v;
        }
    }
    let modulus_abs = (table.group.modulus.norm()? as f64).sqrt();
    let principal = table.chars()[idx].principal;
    Ok(SmoothedCharSumReport {
        sum_abs: s.norm(),
        modulus_abs,
        ratio: if principal {
            None
        } else {
            Some(s.norm() / modulus_abs)
        },
        lattice_points: pts,
        principal,
    })
}

/// λ₁(𝔞) = Σ_{𝔡 | 𝔞} χ₁(𝔡) over ideal divisors of the odd ideal (a), for a
/// real character χ₁ with no angular twist. Multiplicative; equals
/// ∏_𝔭 Σ_{j ≤ e_𝔭} χ₁(𝔭)^j.
pub fn lambda1(a: GaussInt, chi1: &HeckeChar) -> Result<i64> {
    if a.norm()? % 2 == 0 {
        return Err(Error::EvenArgument(a));
    }
    if chi1.k != 0 || chi1.table.chars()[chi1.index].order > 2 {
        return Err(Error::BadSpec(
            "lambda1 requires a real character with no angular twist".into(),
        ));
    }
    let fac = gauss::factor_gaussian(a)?;
    let mut out = 1i64;
    for (p, e) in fac.factors {
        let v = chi1.table.value(chi1.index, p);
        debug_assert!(v.im.abs() < 1e-9);
        let c = v.re.round() as i64;
        debug_assert!((v.re - c as f64).abs() < 1e-9);
        let factor = match c {
            1 => e as i64 + 1,
            0 => 1,
            -1 => {
                if e % 2 == 0 {
                    1
                } else {
                    0
                }
            }
            _ => unreachable!("real character values are -1, 0, 1"),
        };
        out *= factor;
    }
    Ok(out)
}

/// Largest deviations from exact orthogonality, in both directions, over the
/// whole table.
pub fn orthogonality_deviation(table: &CharTable) -> (f64, f64) {
    let units = table.group.units();
    let k = table.char_count();
    let mut dev_chars = 0.0f64;
    for i in 0..k {
        if table.chars()[i].principal {
            continue;
        }
        let exps = &table.chars()[i].exps;
        let mut s = Complex64::new(0.0, 0.0);
        for &z in units {
            let a = table.group.dlog(z).expect("enumerated unit");
            s += table.rou[table.phase_of(exps, a) as usize];
        }
        dev_chars = dev_chars.max(s.norm());
    }
    let one = table.group.reduce(GaussInt::ONE);
    let mut dev_residues = 0.0f64;
    for &z in units {
        if z == one {
            continue;
        }
        let a = table.group.dlog(z).expect("enumerated unit");
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..k {
            s += table.rou[table.phase_of(&table.chars()[i].exps, a) as usize];
        }
        dev_residues = dev_residues.max(s.norm());
    }
    (dev_chars, dev_residues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gi(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn residue_group_examples() {
        let g = residue_group(gi(2, 1)).unwrap();
        assert_eq!(g.order, 4);
        assert_eq!(g.generators.len(), 1);
        assert_eq!(g.generators[0].1, 4);

        let g = residue_group(gi(1, 0)).unwrap();
        assert_eq!(g.order, 1);
        assert!(g.generators.is_empty());

        let g = residue_group(gi(3, 0)).unwrap();
        assert_eq!(g.order, 8);
        assert_eq!(g.generators.len(), 1);
        assert_eq!(g.generators[0].1, 8);
    }

    #[test]
    fn group_order_matches_phi_over_a_grid() {
        for re in 1..=10i64 {
            for im in 0..=10i64 {
                let u = gi(re, im);
                if u.norm().unwrap() <= 1 {
                    continue;
                }
                if gauss::m_of(u).unwrap() > 50 {
                    continue;
                }
                let g = residue_group(u).unwrap();
                assert_eq!(g.order, gauss::euler_phi_zi(u).unwrap(), "u = {u}");
                let prod: u64 = g.generators.iter().map(|&(_, o)| o).product();
                assert_eq!(prod, g.order.max(1), "u = {u}");
            }
        }
    }

    #[test]
    fn dlog_reproduces_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &u in &[gi(2, 1), gi(5, 0), gi(3, 0), gi(6, 3), gi(0, 9), gi(4, 2)] {
            let g = residue_group(u).unwrap();
            if g.order <= 1 {
                continue;
            }
            for _ in 0..200 {
                let a = g.units()[rng.gen_range(0..g.units().len())];
                let b = g.units()[rng.gen_range(0..g.units().len())];
                let prod = g.reduce(a.checked_mul(b).unwrap());
                let da = g.dlog(a).unwrap();
                let db = g.dlog(b).unwrap();
                let dp = g.dlog(prod).unwrap();
                for (i, &(_, o)) in g.generators.iter().enumerate() {
                    assert_eq!((da[i] + db[i]) % o, dp[i], "u = {u}");
                }
            }
        }
    }

    #[test]
    fn character_table_examples() {
        let t = character_table(gi(2, 1)).unwrap();
        assert_eq!(t.char_count(), 4);
        assert_eq!(t.primitive_indices().len(), 3);

        let t = character_table(gi(1, 0)).unwrap();
        assert_eq!(t.char_count(), 1);
        assert!(t.chars()[0].principal);
        assert!(t.chars()[0].primitive);

        let t = character_table(gi(5, 0)).unwrap();
        assert_eq!(t.char_count(), 16);
        let (dc, dr) = orthogonality_deviation(&t);
        assert!(dc < 1e-10 && dr < 1e-10, "dc = {dc}, dr = {dr}");
        // Nonprincipal-on-both-components characters are exactly the
        // primitive ones: (4−1)² = 9.
        assert_eq!(t.primitive_indices().len(), 9);
    }

    #[test]
    fn conductors_divide_the_modulus() {
        for &u in &[gi(2, 1), gi(5, 0), gi(3, 0), gi(9, 0), gi(6, 3), gi(2, 2)] {
            let t = character_table(u).unwrap();
            for ch in t.chars() {
                let q = gauss::ggcd(u, ch.conductor).unwrap();
                assert_eq!(
                    q.norm().unwrap(),
                    ch.conductor.norm().unwrap(),
                    "conductor {} does not divide {u}",
                    ch.conductor
                );
                assert_eq!(
                    ch.primitive,
                    ch.conductor.norm().unwrap() == u.norm().unwrap()
                );
            }
        }
    }

    #[test]
    fn orthogonality_small_moduli() {
        for re in 1..=6i64 {
            for im in 0..=6i64 {
                let u = gi(re, im);
                if u.norm().unwrap() <= 1 || gauss::m_of(u).unwrap() > 20 {
                    continue;
                }
                let t = character_table(u).unwrap();
                let (dc, dr) = orthogonality_deviation(&t);
                assert!(dc < 1e-10 && dr < 1e-10, "u = {u}: {dc} {dr}");
            }
        }
    }

    #[test]
    fn hecke_examples() {
        // Principal character, no twist: identically 1 on odd arguments.
        let t = Arc::new(character_table(gi(1, 0)).unwrap());
        let h = HeckeChar::new(0, t.clone(), 0);
        for &z in &[gi(1, 0), gi(1, 2), gi(3, 0), gi(-5, 2)] {
            let v = hecke_eval(&h, z).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }

        // Pure angular twist k = 4: evaluated at the primary associate.
        let h4 = HeckeChar::new(4, t, 0);
        let v = hecke_eval(&h4, gi(1, 2)).unwrap();
        let theta = (-2.0f64).atan2(-1.0);
        let expect = Complex64::from_polar(1.0, 4.0 * theta);
        assert!((v - expect).norm() < 1e-12);

        // Quadratic character mod 3: value ±1 on units.
        let t3 = Arc::new(character_table(gi(3, 0)).unwrap());
        let idx = (0..t3.char_count())
            .find(|&i| t3.chars()[i].order == 2)
            .unwrap();
        let h3 = HeckeChar::new(0, t3, idx);
        for &z in &[gi(1, 0), gi(1, 2), gi(2, 1), gi(1, 4)] {
            if z.norm().unwrap() % 3 == 0 {
                continue;
            }
            let v = hecke_eval(&h3, z).unwrap();
            assert!(v.im.abs() < 1e-12 && (v.re.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hecke_rejects_even_and_noncoprime() {
        let t = Arc::new(character_table(gi(2, 1)).unwrap());
        let h = HeckeChar::new(0, t, 1);
        assert!(matches!(
            hecke_eval(&h, gi(1, 1)),
            Err(Error::EvenArgument(_))
        ));
        assert!(matches!(
            hecke_eval(&h, gi(2, 1).checked_mul(gi(1, 2)).unwrap().checked_mul(gi(2,1)).unwrap()),
            Err(Error::NotCoprime { .. }) | Err(Error::EvenArgument(_))
        ));
        let bad = gi(2, 1).checked_mul(gi(3, 0)).unwrap();
        assert!(matches!(hecke_eval(&h, bad), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn hecke_multiplicative_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &u in &[gi(1, 0), gi(2, 1), gi(3, 0), gi(5, 0)] {
            let t = Arc::new(character_table(u).unwrap());
            for idx in 0..t.char_count() {
                for k in [0i64, 4] {
                    let h = HeckeChar::new(k, t.clone(), idx);
                    let mut done = 0;
                    while done < 500 {
                        let z1 = gi(rng.gen_range(-30..=30), rng.gen_range(-30..=30));
                        let z2 = gi(rng.gen_range(-30..=30), rng.gen_range(-30..=30));
                        let (Ok(a), Ok(b)) = (hecke_eval(&h, z1), hecke_eval(&h, z2)) else {
                            continue;
                        };
                        let Ok(ab) = hecke_eval(&h, z1.checked_mul(z2).unwrap()) else {
                            continue;
                        };
                        assert!((ab - a * b).norm() < 1e-9, "u={u} idx={idx} {z1} {z2}");
                        done += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn primitive_sum_examples() {
        assert_eq!(primitive_char_sum(1, 5).unwrap().value, 3);
        assert_eq!(primitive_char_sum(2, 5).unwrap().value, -1);
        assert_eq!(primitive_char_sum(1, 1).unwrap().value, 1);
    }

    #[test]
    fn primitive_sum_matches_direct_enumeration() {
        for d in 1..=100u64 {
            let g = crate::rational_chars::dirichlet_group(d).unwrap();
            let prim = g.primitive_indices();
            for a in 0..d.max(1) {
                let direct: Complex64 = prim.iter().map(|&i| g.value(i, a)).sum();
                let check = primitive_char_sum(a, d).unwrap();
                assert!(
                    (direct - Complex64::new(check.value as f64, 0.0)).norm() < 1e-8,
                    "a={a} d={d} direct={direct} formula={}",
                    check.value
                );
                assert!(check.pass, "bound failed at a={a} d={d}");
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let r = gauss_sum_check(5, 1, 0).unwrap();
        assert!(r.pass && r.bound > 4.47 && r.bound < 4.48);
        let r = gauss_sum_check(13, 1, 0).unwrap();
        assert!(r.pass);
        let r = gauss_sum_check(5, 2, 1).unwrap();
        assert!(r.pass);
        assert!((r.bound - 2.0 * 5f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn short_interval_examples() {
        let t = character_table(gi(2, 1)).unwrap();
        let prim = t.primitive_indices()[0];
        let r = short_interval_char_sum(&t, prim, 1, 10_000, 0.3, 1).unwrap();
        assert!(r.ratio.unwrap() <= 10.0, "ratio = {:?}", r.ratio);

        let princ = t.principal_index();
        let r = short_interval_char_sum(&t, princ, 1, 10_000, 0.3, 1).unwrap();
        assert!(r.principal && r.ratio.is_none());

        // b divisible by the whole modulus: trivial regime, |sum| ≤ length.
        let t7 = character_table(gi(7, 0)).unwrap();
        let idx = t7.primitive_indices()[0];
        let r = short_interval_char_sum(&t7, idx, 7, 10_000_000, 0.5, 1).unwrap();
        assert_eq!(r.v_norm, 49);
        assert!(r.sum_abs <= r.interval_length);
    }

    #[test]
    fn short_interval_rejects_small_y() {
        let t = character_table(gi(2, 1)).unwrap();
        assert!(short_interval_char_sum(&t, 1, 1, 20, 0.3, 1).is_err());
    }

    #[test]
    fn smoothed_complete_sums_stay_small() {
        let t1 = character_table(gi(1, 0)).unwrap();
        let r = polya_vinogradov_check(&t1, 0, 0.05, 100.0).unwrap();
        assert!(r.principal && r.ratio.is_none());
        // Principal sum tracks the annulus integral π·R²·∫F ≈ π·R²·ν.
        let expect = std::f64::consts::PI * 100.0f64.powi(2) * 0.05;
        assert!((r.sum_abs - expect).abs() < 0.05 * expect, "{}", r.sum_abs);

        for &u in &[gi(2, 1), gi(5, 0)] {
            let t = character_table(u).unwrap();
            for idx in t.primitive_indices() {
                let r = polya_vinogradov_check(&t, idx, 0.05, 1000.0).unwrap();
                assert!(r.ratio.unwrap() < 5.0, "u = {u}, ratio = {:?}", r.ratio);
            }
        }
    }

    #[test]
    fn lambda1_examples() {
        let t3 = Arc::new(character_table(gi(3, 0)).unwrap());
        let idx = (0..t3.char_count())
            .find(|&i| t3.chars()[i].order == 2)
            .unwrap();
        let chi1 = HeckeChar::new(0, t3.clone(), idx);
        assert_eq!(lambda1(gi(1, 0), &chi1).unwrap(), 1);
        // Split primes over 13 ≡ 1 mod 3·4: χ₁(π)·χ₁(π̄) = χ₁(13) = +1.
        for &p in &[gi(-3, 2), gi(2, 1), gi(1, 2), gi(-1, 2)] {
            let v = t3.value(idx, gauss::primary_associate(p).unwrap());
            let l = lambda1(p, &chi1).unwrap();
            if (v.re - 1.0).abs() < 1e-9 {
                assert_eq!(l, 2);
            } else if (v.re + 1.0).abs() < 1e-9 {
                assert_eq!(l, 0);
            } else {
                assert_eq!(l, 1);
            }
        }
    }

    #[test]
    fn lambda1_multiplicative_on_coprime_ideals() {
        let t5 = Arc::new(character_table(gi(5, 0)).unwrap());
        let idx = (0..t5.char_count())
            .find(|&i| !t5.chars()[i].principal && t5.chars()[i].order == 2)
            .unwrap();
        let chi1 = HeckeChar::new(0, t5, idx);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 1000 {
            let a = gi(rng.gen_range(1..=1000), rng.gen_range(0..=1000));
            let b = gi(rng.gen_range(1..=1000), rng.gen_range(0..=1000));
            if a.norm().unwrap() % 2 == 0 || b.norm().unwrap() % 2 == 0 {
                continue;
            }
            if a.norm().unwrap() * b.norm().unwrap() > 1_000_000 {
                continue;
            }
            if !gauss::ggcd(a, b).unwrap().is_unit() {
                continue;
            }
            let la = lambda1(a, &chi1).unwrap();
            let lb = lambda1(b, &chi1).unwrap();
            let lab = lambda1(a.checked_mul(b).unwrap(), &chi1).unwrap();
            assert_eq!(lab, la * lb, "a = {a}, b = {b}");
            done += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn canonical_map_respects_the_lattice(
            re in -20i64..=20, im in -20i64..=20,
            x in -1000i64..=1000, y in -1000i64..=1000,
            s in -50i64..=50, t in -50i64..=50,
        ) {
            let u = gi(re, im);
            prop_assume!(u.norm().unwrap() > 0);
            let map = CanonicalMap::new(u).unwrap();
            let z = gi(x, y);
            let shift = u.checked_mul(gi(s, t)).unwrap();
            let zs = z.checked_add(shift).unwrap();
            prop_assert_eq!(map.index(z), map.index(zs));
            let r = map.reduce(z);
            prop_assert!(r.re >= 0 && r.re < map.cols && r.im >= 0 && r.im < map.rows);
            // Representative differs from z by a lattice element.
            prop_assert!(z.checked_sub(r).unwrap().divisible_by(u));
        }

        #[test]
        fn character_values_multiply(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = character_table(gi(6, 3)).unwrap();
            let units = t.group.units();
            let idx = rng.gen_range(0..t.char_count());
            let a = units[rng.gen_range(0..units.len())];
            let b = units[rng.gen_range(0..units.len())];
            let prod = t.group.reduce(a.checked_mul(b).unwrap());
            let lhs = t.value(idx, prod);
            let rhs = t.value(idx, a) * t.value(idx, b);
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
