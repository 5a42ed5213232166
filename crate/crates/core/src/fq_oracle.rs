//! Brute-force point counts over prime fields, used as an independent check
//! on dimensions computed from Gröbner bases.
//!
//! The dimension estimate is the least-squares slope of `ln(count)` against
//! `ln(q)`. It is advisory only: a finite field can see points that the
//! rationals do not and vice versa.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::float::Float;

use crate::arith::check_prime;
use crate::error::{Error, Result};
use crate::groebner::Ideal;
use crate::poly::ModPolynomial;

/// Default cap on the number of evaluated points per prime.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Slopes farther than this from an integer are flagged.
pub const SLOPE_TOLERANCE: f64 = 0.35;

pub const DEFAULT_PRIMES: [u64; 3] = [5, 7, 11];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCount {
    pub prime: u64,
    pub ambient_dim: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimEstimate {
    /// Rounded slope; `-1` when no prime has a point.
    pub estimate: i64,
    pub slope: Option<f64>,
    pub counts: Vec<PointCount>,
    /// Primes dropped because `q^N` exceeded the budget.
    pub skipped: Vec<u64>,
    pub consistent: bool,
}

/// Flattened polynomial for fast evaluation: `(coeff, [(var, exp)])`.
struct Compiled {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl Compiled {
    fn new(p: &ModPolynomial) -> Compiled {
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let vars = m.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                (*c, vars)
            })
            .collect();
        Compiled { terms }
    }

    fn max_exp(&self) -> u32 {
        self.terms.iter().flat_map(|(_, v)| v.iter().map(|&(_, e)| e)).max().unwrap_or(0)
    }

    fn eval(&self, pw: &[Vec<u64>], q: u64) -> u64 {
        let mut acc = 0u64;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(i, e) in vars {
                t = t * pw[i][e as usize] % q;
            }
            acc += t;
            if acc >= q {
                acc -= q;
            }
        }
        acc
    }
}

fn compile(ideal: &Ideal, q: u64) -> Result<Vec<Compiled>> {
    ideal.gens().iter().map(|g| Ok(Compiled::new(&g.reduce_mod_p(q)?))).collect()
}

fn points(q: u64, n: usize, budget: u64) -> Result<u64> {
    let mut total: u128 = 1;
    for _ in 0..n {
        total *= q as u128;
    }
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    Ok(total as u64)
}

fn fill_powers(pw: &mut [Vec<u64>], point: &[u64], q: u64) {
    for (row, &x) in pw.iter_mut().zip(point) {
        for e in 1..row.len() {
            row[e] = row[e - 1] * x % q;
        }
    }
}

/// Visits every point of `F_q^n` whose first coordinate is `first`, calling
/// `visit` with the point and its power table; stops early when `visit`
/// returns `true`.
fn scan_slice<F: FnMut(&[u64], &[Vec<u64>]) -> bool>(q: u64, n: usize, maxe: u32, first: u64, mut visit: F) {
    let mut point = vec![0u64; n];
    if n == 0 {
        let pw: Vec<Vec<u64>> = Vec::new();
        visit(&point, &pw);
        return;
    }
    point[0] = first;
    let mut pw = vec![vec![1u64; maxe as usize + 1]; n];
    loop {
        fill_powers(&mut pw, &point, q);
        if visit(&point, &pw) {
            return;
        }
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            point[i] += 1;
            if point[i] < q {
                break;
            }
            point[i] = 0;
            i -= 1;
        }
    }
}

fn count_slice(gens: &[Compiled], q: u64, n: usize, maxe: u32, first: u64) -> u64 {
    let mut count = 0;
    scan_slice(q, n, maxe, first, |_, pw| {
        if gens.iter().all(|g| g.eval(pw, q) == 0) {
            count += 1;
        }
        false
    });
    count
}

/// Number of common zeros of the generators in `F_q^N`.
pub fn count_points(ideal: &Ideal, q: u64, budget: u64) -> Result<PointCount> {
    check_prime(q)?;
    let n = ideal.ring().nvars();
    points(q, n, budget)?;
    let gens = compile(ideal, q)?;
    let maxe = gens.iter().map(Compiled::max_exp).max().unwrap_or(0);
    let firsts = if n == 0 { 1 } else { q };
    #[cfg(feature = "parallel")]
    let count: u64 = {
        use rayon::prelude::*;
        (0..firsts).into_par_iter().map(|a| count_slice(&gens, q, n, maxe, a)).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let count: u64 = (0..firsts).map(|a| count_slice(&gens, q, n, maxe, a)).sum();
    Ok(PointCount { prime: q, ambient_dim: n, count })
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Dimension estimate from point counts at the given primes. Primes whose
/// enumeration exceeds the budget are skipped; at least two must remain.
pub fn estimate_dimension(ideal: &Ideal, primes: &[u64], budget: u64) -> Result<DimEstimate> {
    let n = ideal.ring().nvars();
    let mut counts = Vec::new();
    let mut skipped = Vec::new();
    let mut smallest_need: Option<u128> = None;
    for &q in primes {
        check_prime(q)?;
        match points(q, n, budget) {
            Ok(_) => counts.push(count_points(ideal, q, budget)?),
            Err(Error::BudgetExceeded { needed, .. }) => {
                skipped.push(q);
                smallest_need = Some(smallest_need.map_or(needed, |s| s.min(needed)));
            }
            Err(e) => return Err(e),
        }
    }
    if counts.len() < 2 {
        if let Some(needed) = smallest_need {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        return Err(Error::InvalidInput(format!("need at least two distinct primes, got {}", counts.len())));
    }
    let positive: Vec<&PointCount> = counts.iter().filter(|c| c.count > 0).collect();
    if positive.is_empty() {
        return Ok(DimEstimate { estimate: -1, slope: None, counts, skipped, consistent: true });
    }
    let xs: Vec<f64> = positive.iter().map(|c| Float::ln(c.prime as f64)).collect();
    let ys: Vec<f64> = positive.iter().map(|c| Float::ln(c.count as f64)).collect();
    let s = slope(&xs, &ys);
    let value = s.unwrap_or_else(|| ys[0] / xs[0]);
    let rounded = Float::round(value);
    let estimate = rounded as i64;
    let close = Float::abs(value - rounded) <= SLOPE_TOLERANCE;
    let consistent = s.is_some() && close && positive.len() == counts.len();
    Ok(DimEstimate { estimate, slope: s, counts, skipped, consistent })
}

/// A witness point of `V(closed) ∖ V(excluded)` over some `F_q`, or `None`
/// when none was found (which proves nothing).
pub fn sample_nonempty(closed: &Ideal, excluded: &Ideal, primes: &[u64], budget: u64) -> Result<Option<(u64, Vec<u64>)>> {
    if closed.ring() != excluded.ring() {
        return Err(Error::RingMismatch);
    }
    let n = closed.ring().nvars();
    for &q in primes {
        check_prime(q)?;
        points(q, n, budget)?;
        let c = compile(closed, q)?;
        let e = compile(excluded, q)?;
        let maxe = c.iter().chain(&e).map(Compiled::max_exp).max().unwrap_or(0);
        let firsts = if n == 0 { 1 } else { q };
        for a in 0..firsts {
            let mut found: Option<Vec<u64>> = None;
            scan_slice(q, n, maxe, a, |pt, pw| {
                if c.iter().all(|g| g.eval(pw, q) == 0) && e.iter().any(|g| g.eval(pw, q) != 0) {
                    found = Some(pt.to_vec());
                    return true;
                }
                false
            });
            if let Some(pt) = found {
                return Ok(Some((q, pt)));
            }
        }
    }
    Ok(None)
}
