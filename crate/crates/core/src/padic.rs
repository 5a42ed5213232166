//! Locally constant measures on `Z_p^d` at a fixed level `k`, stored as exact
//! rational masses of the cosets `x + p^k Z_p^d`.
//!
//! Pushforward along integer polynomial maps, convolution and restriction to
//! balls are exact. Fourier coefficients are elements of `Q(ζ_{p^k})` for
//! the character that is trivial on `Z_p` and nontrivial on `p^{-1} Z_p`;
//! the dual point `j` stands for the frequency `j / p^k`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{check_prime, p_power, residue_valuation, CyclotomicNumber, Integer, Rational};
use crate::error::{Error, Result};
use crate::poly::{rational_rank, PolyRing, Polynomial};

/// Largest `p^k` accepted, so coset coordinates fit comfortably in `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// The finite model of `∏ p^{a_i} Z_p / p^k Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientWindow {
    pub p: u64,
    pub k: u32,
    pub d: usize,
    pub scales: Vec<u32>,
}

impl QuotientWindow {
    pub fn new(p: u64, k: u32, d: usize) -> Result<Self> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::InvalidInput("level must be at least 1".into()));
        }
        let modulus = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if modulus > MAX_MODULUS as u128 {
            return Err(Error::ResourceLimit(format!("p^k = {p}^{k} exceeds {MAX_MODULUS}")));
        }
        Ok(QuotientWindow { p, k, d, scales: vec![0; d] })
    }

    pub fn with_scales(mut self, scales: Vec<u32>) -> Result<Self> {
        if scales.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: scales.len() });
        }
        if let Some(&s) = scales.iter().find(|&&s| s > self.k) {
            return Err(Error::ScaleOutOfRange { scale: s, level: self.k });
        }
        self.scales = scales;
        Ok(self)
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    fn same_group(&self, other: &QuotientWindow) -> bool {
        self.p == other.p && self.k == other.k && self.d == other.d
    }

    /// Whether `x` lies in `∏ p^{a_i} Z_p`.
    pub fn contains(&self, x: &[u64]) -> bool {
        x.iter().zip(&self.scales).all(|(&xi, &a)| residue_valuation(xi, self.p, self.k) >= a)
    }
}

/// A level-`k` measure: mass of each coset, zero masses omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMeasure {
    window: QuotientWindow,
    values: BTreeMap<Vec<u64>, Rational>,
}

impl LevelMeasure {
    pub fn zero(window: QuotientWindow) -> Self {
        LevelMeasure { window, values: BTreeMap::new() }
    }

    /// Builds a measure from coset masses; coordinates are reduced mod
    /// `p^k`, repeated cosets add up.
    pub fn from_values(window: QuotientWindow, values: Vec<(Vec<i64>, Rational)>) -> Result<Self> {
        let q = window.modulus() as i64;
        let mut m = LevelMeasure::zero(window);
        for (x, v) in values {
            if x.len() != m.window.d {
                return Err(Error::DimensionMismatch { expected: m.window.d, found: x.len() });
            }
            let key: Vec<u64> = x.iter().map(|c| c.rem_euclid(q) as u64).collect();
            if !m.window.contains(&key) {
                return Err(Error::WindowMismatch);
            }
            m.add_mass(key, v);
        }
        Ok(m)
    }

    /// Point mass at `x`.
    pub fn delta(window: QuotientWindow, x: &[i64], mass: Rational) -> Result<Self> {
        Self::from_values(window, vec![(x.to_vec(), mass)])
    }

    fn add_mass(&mut self, key: Vec<u64>, v: Rational) {
        if v.is_zero() {
            return;
        }
        match self.values.entry(key) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(v);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn window(&self) -> &QuotientWindow {
        &self.window
    }

    pub fn values(&self) -> &BTreeMap<Vec<u64>, Rational> {
        &self.values
    }

    pub fn get(&self, x: &[u64]) -> Rational {
        self.values.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_mass(&self) -> Rational {
        self.values.values().fold(Rational::zero(), |a, v| a + v)
    }

    pub fn support(&self) -> BTreeSet<Vec<u64>> {
        self.values.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = LevelMeasure::zero(self.window.clone());
        for (x, v) in &self.values {
            out.add_mass(x.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &LevelMeasure) -> Result<Self> {
        if !self.window.same_group(&other.window) {
            return Err(Error::WindowMismatch);
        }
        let mut out = self.clone();
        for (x, v) in &other.values {
            out.add_mass(x.clone(), v.clone());
        }
        Ok(out)
    }
}

/// A polynomial map `Z_p^n -> Z_p^m` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPolyMap {
    ring: Arc<PolyRing>,
    components: Vec<Polynomial>,
    /// Per component: `(coefficient, exponents)`.
    compiled: Vec<Vec<(Integer, Vec<u32>)>>,
}

impl IntegerPolyMap {
    pub fn new(ring: &Arc<PolyRing>, components: Vec<Polynomial>) -> Result<Self> {
        let mut compiled = Vec::new();
        for c in &components {
            if c.ring() != ring {
                return Err(Error::RingMismatch);
            }
            let mut terms = Vec::new();
            for (m, coef) in c.terms() {
                if !coef.is_integer() {
                    return Err(Error::InvalidInput(format!("coefficient {coef} of {c} is not an integer")));
                }
                terms.push((coef.to_integer(), m.clone()));
            }
            compiled.push(terms);
        }
        Ok(IntegerPolyMap { ring: ring.clone(), components, compiled })
    }

    pub fn parse<S: AsRef<str>, T: AsRef<str>>(vars: &[S], components: &[T]) -> Result<Self> {
        let ring = PolyRing::new(vars)?;
        let comps = components.iter().map(|c| Polynomial::parse(c.as_ref(), &ring)).collect::<Result<Vec<_>>>()?;
        Self::new(&ring, comps)
    }

    /// `(x, y) -> (x, xy)`.
    pub fn blowup_chart() -> Self {
        Self::parse(&["x", "y"], &["x", "x*y"]).expect("valid map")
    }

    /// `(x, y, z, w) -> (x + z, xy + zw)`.
    pub fn sum_of_charts() -> Self {
        Self::parse(&["x", "y", "z", "w"], &["x + z", "x*y + z*w"]).expect("valid map")
    }

    pub fn source_dim(&self) -> usize {
        self.ring.nvars()
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// Image of `x` modulo `q`.
    pub fn eval_mod(&self, x: &[u64], q: u64) -> Vec<u64> {
        let qb = q as u128;
        self.compiled
            .iter()
            .map(|terms| {
                let mut acc: u128 = 0;
                for (c, m) in terms {
                    let cm = c.mod_floor(&Integer::from(q)).to_u64().expect("residue fits") as u128;
                    let mut t = cm;
                    for (i, &e) in m.iter().enumerate() {
                        for _ in 0..e {
                            t = t * x[i] as u128 % qb;
                        }
                    }
                    acc = (acc + t) % qb;
                }
                acc as u64
            })
            .collect()
    }
}

/// Uniform measure of total `mass` on `center + p^m Z_p^d`.
pub fn haar_ball(p: u64, k: u32, d: usize, center: &[i64], m: u32, mass: Rational) -> Result<LevelMeasure> {
    let window = QuotientWindow::new(p, k, d)?;
    if m > k {
        return Err(Error::ScaleOutOfRange { scale: m, level: k });
    }
    if center.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: center.len() });
    }
    let mut out = LevelMeasure::zero(window.clone());
    if mass.is_zero() {
        return Ok(out);
    }
    let q = window.modulus();
    let step = p.pow(m);
    let per_axis = p.pow(k - m);
    let cells = (per_axis as u128).pow(d as u32);
    if cells > MAX_MODULUS as u128 {
        return Err(Error::ResourceLimit(format!("ball has {cells} cosets")));
    }
    let each = mass / Rational::from_integer(Integer::from(cells));
    let base: Vec<u64> = center.iter().map(|c| c.rem_euclid(q as i64) as u64).collect();
    let mut idx = vec![0u64; d];
    loop {
        let x: Vec<u64> = base.iter().zip(&idx).map(|(b, j)| (b + j * step) % q).collect();
        out.add_mass(x, each.clone());
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < per_axis {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// `(φ_* μ)(y) = Σ_{φ(x) ≡ y} μ(x)`, at the same level.
pub fn pushforward(mu: &LevelMeasure, phi: &IntegerPolyMap) -> Result<LevelMeasure> {
    if mu.window.d != phi.source_dim() {
        return Err(Error::DimensionMismatch { expected: phi.source_dim(), found: mu.window.d });
    }
    let window = QuotientWindow::new(mu.window.p, mu.window.k, phi.target_dim())?;
    let q = window.modulus();
    let mut out = LevelMeasure::zero(window);
    for (x, v) in &mu.values {
        out.add_mass(phi.eval_mod(x, q), v.clone());
    }
    Ok(out)
}

/// Masses as integers over a common denominator, when they are small enough
/// for machine arithmetic.
fn scaled(mu: &LevelMeasure) -> Option<(Integer, Vec<(&Vec<u64>, i128)>)> {
    let denom = mu.values.values().fold(Integer::one(), |acc, v| acc.lcm(v.denom()));
    let limit = 1i128 << 48;
    let mut out = Vec::with_capacity(mu.values.len());
    for (x, v) in &mu.values {
        let n = (v.numer() * (&denom / v.denom())).to_i128()?;
        if n.abs() >= limit {
            return None;
        }
        out.push((x, n));
    }
    Some((denom, out))
}

fn flat_index(x: &[u64], q: u64) -> usize {
    x.iter().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

fn unflatten(mut i: usize, q: u64, d: usize) -> Vec<u64> {
    let mut x = vec![0u64; d];
    for slot in x.iter_mut().rev() {
        *slot = (i % q as usize) as u64;
        i /= q as usize;
    }
    x
}

const DENSE_LIMIT: u128 = 1 << 24;

/// Group convolution on `(Z/p^k)^d`.
pub fn convolve(mu: &LevelMeasure, nu: &LevelMeasure) -> Result<LevelMeasure> {
    if !mu.window.same_group(&nu.window) {
        return Err(Error::WindowMismatch);
    }
    if mu.window.scales.iter().chain(&nu.window.scales).any(|&a| a != 0) {
        return Err(Error::WindowMismatch);
    }
    let window = QuotientWindow::new(mu.window.p, mu.window.k, mu.window.d)?;
    let q = window.modulus();
    let d = window.d;
    let cells = (q as u128).pow(d as u32);
    if let (Some((da, xa)), Some((db, xb)), true) = (scaled(mu), scaled(nu), cells <= DENSE_LIMIT) {
        let mut acc = vec![0i128; cells as usize];
        let mut z = vec![0u64; d];
        for (x, a) in &xa {
            for (y, b) in &xb {
                for i in 0..d {
                    z[i] = (x[i] + y[i]) % q;
                }
                acc[flat_index(&z, q)] += a * b;
            }
        }
        let denom = da * db;
        let mut out = LevelMeasure::zero(window);
        for (i, v) in acc.into_iter().enumerate() {
            if v != 0 {
                out.values.insert(unflatten(i, q, d), Rational::new(Integer::from(v), denom.clone()));
            }
        }
        return Ok(out);
    }
    let mut acc: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
    for (x, a) in &mu.values {
        for (y, b) in &nu.values {
            let z: Vec<u64> = x.iter().zip(y).map(|(s, t)| (s + t) % q).collect();
            let v = a * b;
            match acc.get_mut(&z) {
                Some(slot) => *slot += v,
                None => {
                    acc.insert(z, v);
                }
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(LevelMeasure { window, values: acc })
}

/// Zeroes every coset outside `p^N Z_p^d`.
pub fn restrict(mu: &LevelMeasure, n: u32) -> Result<LevelMeasure> {
    let w = &mu.window;
    if n > w.k {
        return Err(Error::ScaleOutOfRange { scale: n, level: w.k });
    }
    let scales = w.scales.iter().map(|&a| a.max(n)).collect();
    let window = w.clone().with_scales(scales)?;
    let values = mu
        .values
        .iter()
        .filter(|(x, _)| window.contains(x))
        .map(|(x, v)| (x.clone(), v.clone()))
        .collect();
    Ok(LevelMeasure { window, values })
}

/// The same measure seen at a coarser level `level ≤ k`.
pub fn coarsen(mu: &LevelMeasure, level: u32) -> Result<LevelMeasure> {
    let w = &mu.window;
    if level == 0 || level > w.k {
        return Err(Error::ScaleOutOfRange { scale: level, level: w.k });
    }
    let scales: Vec<u32> = w.scales.iter().map(|&a| a.min(level)).collect();
    let window = QuotientWindow::new(w.p, level, w.d)?.with_scales(scales)?;
    let q = window.modulus();
    let mut out = LevelMeasure::zero(window);
    for (x, v) in &mu.values {
        out.add_mass(x.iter().map(|c| c % q).collect(), v.clone());
    }
    Ok(out)
}

/// Fourier coefficient at the dual point `j` (frequency `j / p^k`).
pub fn fourier_at(mu: &LevelMeasure, j: &[u64]) -> Result<CyclotomicNumber> {
    let w = &mu.window;
    if j.len() != w.d {
        return Err(Error::DimensionMismatch { expected: w.d, found: j.len() });
    }
    let q = w.modulus();
    let exponent = |x: &[u64]| -> usize {
        let mut e: u128 = 0;
        for (a, b) in x.iter().zip(j) {
            e = (e + (*a as u128) * (*b as u128)) % q as u128;
        }
        e as usize
    };
    if let Some((denom, xs)) = scaled(mu) {
        let mut sums = vec![0i128; q as usize];
        for (x, v) in xs {
            sums[exponent(x)] += v;
        }
        let sums = sums.into_iter().map(|s| Rational::new(Integer::from(s), denom.clone())).collect();
        return CyclotomicNumber::from_exponent_sums(w.p, w.k, sums);
    }
    let mut sums = vec![Rational::zero(); q as usize];
    for (x, v) in &mu.values {
        sums[exponent(x)] += v;
    }
    CyclotomicNumber::from_exponent_sums(w.p, w.k, sums)
}

/// Every dual grid point in lexicographic order.
pub fn dual_grid(p: u64, k: u32, d: usize) -> Vec<Vec<u64>> {
    let q = p.pow(k);
    let mut out = Vec::new();
    let mut idx = vec![0u64; d];
    loop {
        out.push(idx.clone());
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < q {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Fourier transform on the full dual grid, lexicographic in `j`.
pub fn fourier(mu: &LevelMeasure) -> Result<Vec<(Vec<u64>, CyclotomicNumber)>> {
    let w = &mu.window;
    let grid = dual_grid(w.p, w.k, w.d);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.into_par_iter().map(|j| fourier_at(mu, &j).map(|c| (j, c))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.into_iter().map(|j| fourier_at(mu, &j).map(|c| (j, c))).collect()
    }
}

/// The frequency `j / p^k` as a rational.
pub fn dual_point_value(p: u64, k: u32, j: u64) -> Rational {
    Rational::new(Integer::from(j), Integer::from(p).pow(k))
}

/// `|j / p^k|_p`, with `|0| = 0`.
pub fn dual_abs(p: u64, k: u32, j: u64) -> Rational {
    if j == 0 {
        return Rational::zero();
    }
    let v = residue_valuation(j, p, k) as i64;
    p_power(p, k as i64 - v)
}

fn check_common(measures: &[LevelMeasure]) -> Result<Option<&QuotientWindow>> {
    let Some(first) = measures.first() else { return Ok(None) };
    if measures.iter().any(|m| !m.window.same_group(&first.window)) {
        return Err(Error::WindowMismatch);
    }
    Ok(Some(&first.window))
}

/// Rank over Q of the restrictions to `p^N Z_p^d`: a lower bound for the
/// dimension of the span of the germs at the origin.
pub fn germ_rank(measures: &[LevelMeasure], n: u32) -> Result<usize> {
    if check_common(measures)?.is_none() {
        return Ok(0);
    }
    let restricted = measures.iter().map(|m| restrict(m, n)).collect::<Result<Vec<_>>>()?;
    let mut columns: BTreeSet<Vec<u64>> = BTreeSet::new();
    for m in &restricted {
        columns.extend(m.values.keys().cloned());
    }
    let rows = restricted.iter().map(|m| columns.iter().map(|c| m.get(c)).collect()).collect();
    Ok(rational_rank(rows))
}

/// Number of distinct sets `support(μ_i) ∩ p^N Z_p^d`.
pub fn support_germs(measures: &[LevelMeasure], n: u32) -> Result<usize> {
    check_common(measures)?;
    let mut seen: BTreeSet<BTreeSet<Vec<u64>>> = BTreeSet::new();
    for m in measures {
        seen.insert(restrict(m, n)?.support());
    }
    Ok(seen.len())
}

/// `φ_*(λ_2 · 1_{p^n Z_p^2})` for `φ(x, y) = (x, xy)`, at level `k`.
pub fn mu_n(p: u64, n: u32, k: u32) -> Result<LevelMeasure> {
    let ball = haar_ball(p, k, 2, &[0, 0], n, p_power(p, -2 * n as i64))?;
    pushforward(&ball, &IntegerPolyMap::blowup_chart())
}

/// `ψ_*(λ_4 · 1_{p^n Z_p^4})` for `ψ(x, y, z, w) = (x + z, xy + zw)`.
pub fn psi_ball_pushforward(p: u64, n: u32, k: u32) -> Result<LevelMeasure> {
    let ball = haar_ball(p, k, 4, &[0, 0, 0, 0], n, p_power(p, -4 * n as i64))?;
    pushforward(&ball, &IntegerPolyMap::sum_of_charts())
}

/// Pushforward along `(x, xy)` of the ball `(0, y_0) + p^m Z_p^2` with
/// normalized mass.
pub fn direction_ball(p: u64, k: u32, m: u32, y0: i64) -> Result<LevelMeasure> {
    let ball = haar_ball(p, k, 2, &[0, y0], m, p_power(p, -2 * m as i64))?;
    pushforward(&ball, &IntegerPolyMap::blowup_chart())
}

/// [`direction_ball`] for `y_0 = 0..p^m - 1`, at level `k`.
pub fn direction_balls(p: u64, k: u32, m: u32) -> Result<Vec<LevelMeasure>> {
    (0..p.pow(m)).map(|y0| direction_ball(p, k, m, y0 as i64)).collect()
}

/// Distinct support germs in `p Z_p^2` of the direction balls at level `k`,
/// using scale `max(1, k / 2)`; the count grows with the level.
pub fn direction_germ_count(p: u64, k: u32) -> Result<usize> {
    let m = (k / 2).max(1);
    support_germs(&direction_balls(p, k, m)?, 1)
}

/// Germ ranks of the given family at increasing levels, stopping once the
/// rank repeats or `max_level` is reached. Returns `(level, rank)` pairs.
pub fn germ_rank_schedule<F>(family: F, n: u32, start: u32, max_level: u32) -> Result<Vec<(u32, usize)>>
where
    F: Fn(u32) -> Result<Vec<LevelMeasure>>,
{
    let mut out: Vec<(u32, usize)> = Vec::new();
    for k in start..=max_level {
        let r = germ_rank(&family(k)?, n)?;
        let stable = out.last().is_some_and(|&(_, prev)| prev == r);
        out.push((k, r));
        if stable {
            break;
        }
    }
    Ok(out)
}

/// `μ_i * μ_i` for `i = 0..count`, at level `k`.
pub fn self_convolutions(p: u64, count: u32, k: u32) -> Result<Vec<LevelMeasure>> {
    (0..count).map(|i| mu_n(p, i, k).and_then(|m| convolve(&m, &m))).collect()
}

/// Text form of a coset or dual point, e.g. `3,0`.
pub fn format_point(x: &[u64]) -> String {
    let parts: Vec<String> = x.iter().map(|c| format!("{c}")).collect();
    parts.join(",")
}

pub fn parse_point(text: &str) -> Result<Vec<i64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad coordinate {s:?}"))))
        .collect()
}
