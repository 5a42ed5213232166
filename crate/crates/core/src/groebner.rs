//! Buchberger's algorithm over Q for ideals and submodules of free modules,
//! with the ideal operations built on top of it: membership, elimination,
//! intersection, saturation, radical membership, Krull dimension and
//! syzygies.
//!
//! One engine serves both cases. Module elements carry a position on every
//! term and are compared position-over-term (lower position is larger);
//! ideals are the rank-one case. Pairs are selected by sugar degree, ties
//! broken by the lcm in the active order, and pruned with the Gebauer–Möller
//! criteria. The product criterion is only applied in rank one.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::sync::atomic::{AtomicU32, AtomicUsize, Ordering as AtomicOrdering};

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::poly::{MonomialOrder, PolyRing, Polynomial};

/// Largest number of variables the packed monomial representation holds.
pub const MAX_VARS: usize = 24;

/// Caps on a single Gröbner computation. Exceeding one is reported as
/// `Error::ResourceLimit`, never as a truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_basis: usize,
    pub max_degree: u32,
    pub max_reductions: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_basis: 4000, max_degree: 200, max_reductions: 400_000 }
    }
}

static MAX_BASIS: AtomicUsize = AtomicUsize::new(4000);
static MAX_DEGREE: AtomicU32 = AtomicU32::new(200);
static MAX_REDUCTIONS: AtomicUsize = AtomicUsize::new(400_000);

impl Limits {
    /// Current process-wide limits.
    pub fn current() -> Limits {
        Limits {
            max_basis: MAX_BASIS.load(AtomicOrdering::Relaxed),
            max_degree: MAX_DEGREE.load(AtomicOrdering::Relaxed),
            max_reductions: MAX_REDUCTIONS.load(AtomicOrdering::Relaxed),
        }
    }

    pub fn install(self) {
        MAX_BASIS.store(self.max_basis, AtomicOrdering::Relaxed);
        MAX_DEGREE.store(self.max_degree.min(255), AtomicOrdering::Relaxed);
        MAX_REDUCTIONS.store(self.max_reductions, AtomicOrdering::Relaxed);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Mono {
    e: [u8; MAX_VARS],
    deg: u16,
    pos: u16,
    mask: u32,
}

impl Mono {
    fn new(exps: &[u32], pos: usize) -> Result<Mono> {
        let mut e = [0u8; MAX_VARS];
        let mut deg = 0u16;
        let mut mask = 0u32;
        for (i, &x) in exps.iter().enumerate() {
            if x > 255 {
                return Err(Error::ResourceLimit(format!("exponent {x} exceeds 255")));
            }
            e[i] = x as u8;
            deg += x as u16;
            if x > 0 {
                mask |= 1 << (i % 32);
            }
        }
        Ok(Mono { e, deg, pos: pos as u16, mask })
    }

    fn divides(&self, other: &Mono) -> bool {
        self.pos == other.pos
            && self.mask & !other.mask == 0
            && self.deg <= other.deg
            && self.e.iter().zip(&other.e).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Mono) -> Mono {
        let mut e = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.e[i] + other.e[i];
        }
        Mono { e, deg: self.deg + other.deg, pos: self.pos.max(other.pos), mask: self.mask | other.mask }
    }

    /// `self / other`; the caller guarantees divisibility.
    fn div(&self, other: &Mono) -> Mono {
        let mut e = [0u8; MAX_VARS];
        let mut mask = 0;
        for i in 0..MAX_VARS {
            e[i] = self.e[i] - other.e[i];
            if e[i] > 0 {
                mask |= 1 << (i % 32);
            }
        }
        Mono { e, deg: self.deg - other.deg, pos: 0, mask }
    }

    fn lcm(&self, other: &Mono) -> Mono {
        let mut e = [0u8; MAX_VARS];
        let mut deg = 0;
        for i in 0..MAX_VARS {
            e[i] = self.e[i].max(other.e[i]);
            deg += e[i] as u16;
        }
        Mono { e, deg, pos: self.pos, mask: self.mask | other.mask }
    }

    fn coprime(&self, other: &Mono) -> bool {
        self.e.iter().zip(&other.e).all(|(a, b)| *a == 0 || *b == 0)
    }

    fn exps(&self, n: usize) -> Vec<u32> {
        self.e[..n].iter().map(|&x| x as u32).collect()
    }
}

/// A monomial order compiled for packed monomials, position-over-term.
#[derive(Clone, Debug)]
struct TermOrder {
    nvars: usize,
    order: MonomialOrder,
}

impl TermOrder {
    fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        b.pos.cmp(&a.pos).then_with(|| self.cmp_mono(a, b))
    }

    fn cmp_mono(&self, a: &Mono, b: &Mono) -> Ordering {
        let n = self.nvars;
        match &self.order {
            MonomialOrder::Grevlex => a.deg.cmp(&b.deg).then_with(|| {
                for i in (0..n).rev() {
                    if a.e[i] != b.e[i] {
                        return b.e[i].cmp(&a.e[i]);
                    }
                }
                Ordering::Equal
            }),
            MonomialOrder::Lex => a.e[..n].cmp(&b.e[..n]),
            order => {
                let ea: Vec<u32> = a.exps(n);
                let eb: Vec<u32> = b.exps(n);
                order.cmp(&ea, &eb)
            }
        }
    }
}

/// Internal sparse polynomial (or module vector) sorted descending.
#[derive(Clone, Debug, PartialEq, Eq)]
struct EPoly {
    terms: Vec<(Mono, Rational)>,
}

impl EPoly {
    fn lm(&self) -> &Mono {
        &self.terms[0].0
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.first() {
            if !c.is_one() {
                let inv = c.recip();
                for t in &mut self.terms {
                    t.1 *= &inv;
                }
            }
        }
    }

    fn degree(&self) -> u16 {
        self.terms.iter().map(|t| t.0.deg).max().unwrap_or(0)
    }
}

/// `a - c * m * b`, skipping the first term of each input when `skip_lead`.
fn sub_mul(ord: &TermOrder, a: &[(Mono, Rational)], c: &Rational, m: &Mono, b: &[(Mono, Rational)]) -> Vec<(Mono, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut shifted: Option<(Mono, Rational)> = None;
    loop {
        if shifted.is_none() && j < b.len() {
            let (bm, bc) = &b[j];
            let mut mm = m.mul(bm);
            mm.pos = bm.pos;
            shifted = Some((mm, -(c * bc)));
            j += 1;
        }
        match (i < a.len(), &shifted) {
            (false, None) => break,
            (true, None) => {
                out.push(a[i].clone());
                i += 1;
            }
            (false, Some(_)) => out.push(shifted.take().unwrap()),
            (true, Some((sm, _))) => match ord.cmp(&a[i].0, sm) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => out.push(shifted.take().unwrap()),
                Ordering::Equal => {
                    let (sm, sc) = shifted.take().unwrap();
                    let v = &a[i].1 + sc;
                    if !v.is_zero() {
                        out.push((sm, v));
                    }
                    i += 1;
                }
            },
        }
    }
    out
}

struct Reducer<'a> {
    ord: &'a TermOrder,
    basis: &'a [EPoly],
    active: &'a [bool],
}

impl Reducer<'_> {
    fn find(&self, m: &Mono) -> Option<&EPoly> {
        self.basis
            .iter()
            .zip(self.active)
            .find(|(g, &a)| a && g.lm().divides(m))
            .map(|(g, _)| g)
    }

    /// Reduces `f` modulo the active basis; tails too when `full`.
    fn reduce(&self, f: EPoly, full: bool, budget: &mut usize) -> Result<EPoly> {
        let mut done: Vec<(Mono, Rational)> = Vec::new();
        let mut rest = f.terms;
        let mut start = 0;
        while start < rest.len() {
            let (m, c) = &rest[start];
            match self.find(m) {
                Some(g) => {
                    if *budget == 0 {
                        return Err(Error::ResourceLimit("reduction step budget exhausted".into()));
                    }
                    *budget -= 1;
                    let q = m.div(g.lm());
                    let c = c.clone();
                    rest = sub_mul(self.ord, &rest[start + 1..], &c, &q, &g.terms[1..]);
                    start = 0;
                }
                None => {
                    if !full {
                        break;
                    }
                    done.push(rest[start].clone());
                    start += 1;
                }
            }
        }
        if full {
            Ok(EPoly { terms: done })
        } else {
            rest.drain(..start);
            Ok(EPoly { terms: rest })
        }
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
    sugar: u16,
}

fn spoly(ord: &TermOrder, f: &EPoly, g: &EPoly, lcm: &Mono) -> EPoly {
    let mf = lcm.div(f.lm());
    let mg = lcm.div(g.lm());
    let one = Rational::one();
    let mut shifted_f: Vec<(Mono, Rational)> = f.terms[1..]
        .iter()
        .map(|(m, c)| {
            let mut mm = mf.mul(m);
            mm.pos = m.pos;
            (mm, c.clone())
        })
        .collect();
    if shifted_f.is_empty() {
        shifted_f = Vec::new();
    }
    EPoly { terms: sub_mul(ord, &shifted_f, &one, &mg, &g.terms[1..]) }
}

/// Buchberger's algorithm; returns the reduced, monic basis sorted by leading
/// term ascending.
fn buchberger(ord: &TermOrder, input: Vec<EPoly>, module: bool, limits: Limits) -> Result<Vec<EPoly>> {
    let mut budget = limits.max_reductions;
    let mut basis: Vec<EPoly> = Vec::new();
    let mut sugar: Vec<u16> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut input: Vec<EPoly> = input.into_iter().filter(|p| !p.is_zero()).collect();
    input.sort_by(|a, b| ord.cmp(a.lm(), b.lm()).then_with(|| a.terms.len().cmp(&b.terms.len())));

    let mut queue: Vec<(EPoly, u16)> = input.into_iter().map(|p| {
        let s = p.degree();
        (p, s)
    }).collect();
    queue.reverse();

    loop {
        let (h, h_sugar) = if let Some(item) = queue.pop() {
            item
        } else {
            if pairs.is_empty() {
                break;
            }
            let best = pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    a.sugar
                        .cmp(&b.sugar)
                        .then_with(|| ord.cmp(&a.lcm, &b.lcm))
                        .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
                })
                .map(|(k, _)| k)
                .unwrap();
            let pair = pairs.swap_remove(best);
            let s = spoly(ord, &basis[pair.i], &basis[pair.j], &pair.lcm);
            (s, pair.sugar)
        };
        let reducer = Reducer { ord, basis: &basis, active: &active };
        let mut h = reducer.reduce(h, false, &mut budget)?;
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if h.lm().deg as u32 > limits.max_degree || h.degree() as u32 > limits.max_degree {
            return Err(Error::ResourceLimit(format!("basis degree exceeds {}", limits.max_degree)));
        }
        if basis.len() >= limits.max_basis {
            return Err(Error::ResourceLimit(format!("basis size exceeds {}", limits.max_basis)));
        }
        update(&mut basis, &mut sugar, &mut active, &mut pairs, h, h_sugar, module);
    }

    // Minimalize, then interreduce.
    let mut minimal: Vec<EPoly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        if !active[k] {
            continue;
        }
        let redundant = basis.iter().enumerate().any(|(l, other)| {
            l != k && active[l] && other.lm().divides(g.lm()) && (other.lm() != g.lm() || l < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    minimal.sort_by(|a, b| ord.cmp(a.lm(), b.lm()));
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<EPoly> = minimal.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, g)| g.clone()).collect();
        let flags = vec![true; others.len()];
        let reducer = Reducer { ord, basis: &others, active: &flags };
        let g = &minimal[k];
        let tail = EPoly { terms: g.terms[1..].to_vec() };
        let tail = reducer.reduce(tail, true, &mut budget)?;
        let mut terms = vec![g.terms[0].clone()];
        terms.extend(tail.terms);
        let mut p = EPoly { terms };
        p.make_monic();
        reduced.push(p);
    }
    Ok(reduced)
}

fn update(
    basis: &mut Vec<EPoly>,
    sugar: &mut Vec<u16>,
    active: &mut Vec<bool>,
    pairs: &mut Vec<Pair>,
    h: EPoly,
    h_sugar: u16,
    module: bool,
) {
    let k = basis.len();
    let hm = *h.lm();
    let h_sugar = h_sugar.max(h.degree());

    // Candidate pairs with the new element.
    let mut cands: Vec<Pair> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        if !active[i] || g.lm().pos != hm.pos {
            continue;
        }
        let lcm = g.lm().lcm(&hm);
        let s = (sugar[i] + lcm.deg - g.lm().deg).max(h_sugar + lcm.deg - hm.deg);
        cands.push(Pair { i, j: k, lcm, sugar: s });
    }
    let disjoint = |p: &Pair| !module && basis[p.i].lm().coprime(&hm);

    // Chain criterion among the new pairs.
    let mut kept: Vec<Pair> = Vec::new();
    for (a, p) in cands.iter().enumerate() {
        let dominated = cands.iter().enumerate().any(|(b, q)| {
            b != a && q.lcm.divides(&p.lcm) && (q.lcm != p.lcm || b < a)
        });
        if disjoint(p) || !dominated {
            kept.push(p.clone());
        }
    }
    // Among kept pairs with identical lcm keep only one; product criterion.
    let mut new_pairs: Vec<Pair> = Vec::new();
    for p in kept {
        if disjoint(&p) {
            continue;
        }
        if new_pairs.iter().any(|q| q.lcm == p.lcm) {
            continue;
        }
        new_pairs.push(p);
    }
    // Old pairs made redundant by the new leading term.
    pairs.retain(|p| {
        if !hm.divides(&p.lcm) {
            return true;
        }
        let li = basis[p.i].lm().lcm(&hm);
        let lj = basis[p.j].lm().lcm(&hm);
        li == p.lcm || lj == p.lcm
    });
    pairs.extend(new_pairs);

    for (i, g) in basis.iter().enumerate() {
        if active[i] && hm.divides(g.lm()) {
            active[i] = false;
        }
    }
    basis.push(h);
    sugar.push(h_sugar);
    active.push(true);
}

fn check_vars(ring: &PolyRing) -> Result<()> {
    if ring.nvars() > MAX_VARS {
        return Err(Error::ResourceLimit(format!("{} variables exceed the engine maximum of {MAX_VARS}", ring.nvars())));
    }
    Ok(())
}

fn to_epoly(ord: &TermOrder, f: &Polynomial, pos: usize) -> Result<EPoly> {
    let mut terms = f
        .terms()
        .iter()
        .map(|(m, c)| Ok((Mono::new(m, pos)?, c.clone())))
        .collect::<Result<Vec<_>>>()?;
    terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
    Ok(EPoly { terms })
}

fn vector_to_epoly(ord: &TermOrder, v: &[Polynomial]) -> Result<EPoly> {
    let mut terms = Vec::new();
    for (pos, f) in v.iter().enumerate() {
        for (m, c) in f.terms() {
            terms.push((Mono::new(m, pos)?, c.clone()));
        }
    }
    terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
    Ok(EPoly { terms })
}

fn from_epoly(ring: &Arc<PolyRing>, p: &EPoly) -> Polynomial {
    let n = ring.nvars();
    Polynomial::from_terms(ring, p.terms.iter().map(|(m, c)| (m.exps(n), c.clone())).collect())
}

fn epoly_to_vector(ring: &Arc<PolyRing>, p: &EPoly, rank: usize, offset: usize) -> Vec<Polynomial> {
    let n = ring.nvars();
    let mut buckets: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); rank];
    for (m, c) in &p.terms {
        let pos = m.pos as usize;
        if pos >= offset && pos < offset + rank {
            buckets[pos - offset].push((m.exps(n), c.clone()));
        }
    }
    buckets.into_iter().map(|t| Polynomial::from_terms(ring, t)).collect()
}

/// An ideal given by generators; zero generators are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Polynomial>) -> Result<Ideal> {
        for g in &gens {
            if g.ring() != ring {
                return Err(Error::RingMismatch);
            }
        }
        Ok(Ideal { ring: ring.clone(), gens: gens.into_iter().filter(|g| !g.is_zero()).collect() })
    }

    pub fn parse<S: AsRef<str>>(ring: &Arc<PolyRing>, gens: &[S]) -> Result<Ideal> {
        let gens = gens.iter().map(|s| Polynomial::parse(s.as_ref(), ring)).collect::<Result<Vec<_>>>()?;
        Ideal::new(ring, gens)
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Ideal {
        Ideal { ring: ring.clone(), gens: Vec::new() }
    }

    pub fn unit(ring: &Arc<PolyRing>) -> Ideal {
        Ideal { ring: ring.clone(), gens: vec![Polynomial::one(ring)] }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(Ideal { ring: self.ring.clone(), gens })
    }

    pub fn with(&self, extra: Vec<Polynomial>) -> Result<Ideal> {
        self.sum(&Ideal::new(&self.ring, extra)?)
    }

    /// Generated by pairwise products; cuts out the union of the two sets.
    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.mul(b));
            }
        }
        Ok(Ideal { ring: self.ring.clone(), gens })
    }

    /// Re-embeds every generator into `target` with `index_map`.
    pub fn embed(&self, target: &Arc<PolyRing>, index_map: &[usize]) -> Ideal {
        Ideal { ring: target.clone(), gens: self.gens.iter().map(|g| g.embed(target, index_map)).collect() }
    }

    pub fn extend_to(&self, target: &Arc<PolyRing>) -> Ideal {
        Ideal { ring: target.clone(), gens: self.gens.iter().map(|g| g.extend_to(target)).collect() }
    }

    pub fn groebner(&self, order: &MonomialOrder) -> Result<GroebnerBasis> {
        groebner_basis(self, order)
    }

    /// Generators replaced by the reduced grevlex basis.
    pub fn canonical(&self) -> Result<Ideal> {
        let gb = groebner_basis(self, &MonomialOrder::Grevlex)?;
        Ok(Ideal { ring: self.ring.clone(), gens: gb.polynomials().to_vec() })
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(normal_form(f, &groebner_basis(self, &MonomialOrder::Grevlex)?)?.is_zero())
    }

    pub fn is_unit(&self) -> Result<bool> {
        if self.gens.iter().any(|g| g.is_constant() && !g.is_zero()) {
            return Ok(true);
        }
        Ok(groebner_basis(self, &MonomialOrder::Grevlex)?.is_unit())
    }

    pub fn dimension(&self) -> Result<i64> {
        krull_dimension(self)
    }
}

/// A reduced Gröbner basis together with the order it was computed in.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    order: MonomialOrder,
    elems: Vec<EPoly>,
    polys: Vec<Polynomial>,
    reduced: bool,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.order == other.order && self.polys == other.polys
    }
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Monic basis elements, ascending by leading term.
    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant()
    }

    /// Leading exponent vectors in the basis order.
    pub fn leading_monomials(&self) -> Vec<Vec<u32>> {
        let n = self.ring.nvars();
        self.elems.iter().map(|e| e.lm().exps(n)).collect()
    }

    fn term_order(&self) -> TermOrder {
        TermOrder { nvars: self.ring.nvars(), order: self.order.clone() }
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(normal_form(f, self)?.is_zero())
    }

    /// S-polynomial of basis elements `i` and `j` reduced modulo the basis.
    pub fn s_polynomial_remainder(&self, i: usize, j: usize) -> Result<Polynomial> {
        let ord = self.term_order();
        let (a, b) = (&self.elems[i], &self.elems[j]);
        let lcm = a.lm().lcm(b.lm());
        let s = spoly(&ord, a, b, &lcm);
        let flags = vec![true; self.elems.len()];
        let reducer = Reducer { ord: &ord, basis: &self.elems, active: &flags };
        let mut budget = usize::MAX;
        Ok(from_epoly(&self.ring, &reducer.reduce(s, true, &mut budget)?))
    }
}

pub fn groebner_basis(ideal: &Ideal, order: &MonomialOrder) -> Result<GroebnerBasis> {
    groebner_basis_with_limits(ideal, order, Limits::current())
}

/// As `groebner_basis`, with explicit limits instead of the process-wide ones.
pub fn groebner_basis_with_limits(ideal: &Ideal, order: &MonomialOrder, limits: Limits) -> Result<GroebnerBasis> {
    check_vars(&ideal.ring)?;
    let ord = TermOrder { nvars: ideal.ring.nvars(), order: order.clone() };
    let input = ideal.gens.iter().map(|g| to_epoly(&ord, g, 0)).collect::<Result<Vec<_>>>()?;
    let elems = buchberger(&ord, input, false, limits)?;
    let polys = elems.iter().map(|e| from_epoly(&ideal.ring, e)).collect();
    Ok(GroebnerBasis { ring: ideal.ring.clone(), order: order.clone(), elems, polys, reduced: true })
}

pub fn normal_form(f: &Polynomial, gb: &GroebnerBasis) -> Result<Polynomial> {
    f.same_ring(&gb.polys.first().cloned().unwrap_or_else(|| Polynomial::zero(&gb.ring)))?;
    let ord = gb.term_order();
    let flags = vec![true; gb.elems.len()];
    let reducer = Reducer { ord: &ord, basis: &gb.elems, active: &flags };
    let mut budget = usize::MAX;
    let r = reducer.reduce(to_epoly(&ord, f, 0)?, true, &mut budget)?;
    Ok(from_epoly(&gb.ring, &r))
}

/// `I ∩ Q[keep]`, computed with a block order that eliminates the other
/// variables. Generators are returned in the original ring.
pub fn elimination(ideal: &Ideal, keep: &[usize]) -> Result<Ideal> {
    let ring = &ideal.ring;
    let n = ring.nvars();
    let drop: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    if drop.is_empty() {
        return Ok(ideal.clone());
    }
    // Permute so that eliminated variables come first.
    let perm: Vec<usize> = drop.iter().chain(keep.iter()).copied().collect();
    let names: Vec<&str> = perm.iter().map(|&i| ring.names()[i].as_str()).collect();
    let permuted = PolyRing::new(&names)?;
    let mut to_perm = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        to_perm[old] = new;
    }
    let moved = ideal.embed(&permuted, &to_perm);
    let gb = groebner_basis(&moved, &MonomialOrder::elimination(drop.len(), n))?;
    let gens = gb
        .polynomials()
        .iter()
        .filter(|g| g.support().iter().all(|&v| v >= drop.len()))
        .map(|g| g.embed(ring, &perm))
        .collect();
    Ideal::new(ring, gens)
}

/// `I ∩ Q[keep]` as an ideal of the smaller ring on the kept variables.
pub fn eliminate_to_subring(ideal: &Ideal, keep: &[usize]) -> Result<Ideal> {
    let ring = &ideal.ring;
    let names: Vec<&str> = keep.iter().map(|&i| ring.names()[i].as_str()).collect();
    let sub = PolyRing::new(&names)?;
    let elim = elimination(ideal, keep)?;
    let gens = elim
        .gens
        .iter()
        .map(|g| g.restrict_to(&sub, keep).expect("eliminated generator involves dropped variable"))
        .collect();
    Ideal::new(&sub, gens)
}

fn with_aux_variable(ring: &Arc<PolyRing>) -> (Arc<PolyRing>, usize) {
    let ext = ring.extend(&["t_aux"]);
    (ext, ring.nvars())
}

/// `I ∩ J` as `(t I + (1 - t) J) ∩ Q[x]`.
pub fn ideal_intersection(a: &Ideal, b: &Ideal) -> Result<Ideal> {
    if a.ring != b.ring {
        return Err(Error::RingMismatch);
    }
    if a.gens.is_empty() || b.gens.is_empty() {
        return Ok(Ideal::zero(&a.ring));
    }
    let (ext, t) = with_aux_variable(&a.ring);
    let tv = Polynomial::var(&ext, t);
    let one_minus_t = Polynomial::one(&ext).sub(&tv);
    let mut gens = Vec::new();
    for g in &a.gens {
        gens.push(g.extend_to(&ext).mul(&tv));
    }
    for g in &b.gens {
        gens.push(g.extend_to(&ext).mul(&one_minus_t));
    }
    let keep: Vec<usize> = (0..a.ring.nvars()).collect();
    let elim = eliminate_to_subring(&Ideal::new(&ext, gens)?, &keep)?;
    Ok(Ideal { ring: a.ring.clone(), gens: elim.gens.iter().map(|g| g.embed(&a.ring, &keep)).collect() })
}

/// `I : f^∞` as `(I + (1 - t f)) ∩ Q[x]`.
pub fn saturation(ideal: &Ideal, f: &Polynomial) -> Result<Ideal> {
    if f.is_zero() {
        return Err(Error::InvalidInput("cannot saturate by the zero polynomial".into()));
    }
    let ring = &ideal.ring;
    if f.is_constant() {
        return Ok(ideal.clone());
    }
    let (ext, t) = with_aux_variable(ring);
    let mut gens: Vec<Polynomial> = ideal.gens.iter().map(|g| g.extend_to(&ext)).collect();
    gens.push(Polynomial::one(&ext).sub(&Polynomial::var(&ext, t).mul(&f.extend_to(&ext))));
    let keep: Vec<usize> = (0..ring.nvars()).collect();
    let elim = eliminate_to_subring(&Ideal::new(&ext, gens)?, &keep)?;
    Ok(Ideal { ring: ring.clone(), gens: elim.gens.iter().map(|g| g.embed(ring, &keep)).collect() })
}

/// `I : J^∞`, the intersection of the saturations by the generators of `J`.
/// Its zero set is the closure of `V(I) ∖ V(J)`.
pub fn saturation_by_ideal(ideal: &Ideal, by: &Ideal) -> Result<Ideal> {
    if by.gens.is_empty() {
        // V(0) is everything, so nothing survives.
        return Ok(Ideal::unit(&ideal.ring));
    }
    let mut acc: Option<Ideal> = None;
    for g in &by.gens {
        let s = saturation(ideal, g)?;
        if s.is_unit()? {
            continue;
        }
        acc = Some(match acc {
            None => s,
            Some(prev) => ideal_intersection(&prev, &s)?.canonical()?,
        });
    }
    Ok(acc.unwrap_or_else(|| Ideal::unit(&ideal.ring)))
}

/// Whether `f` vanishes on `V(I)` over the algebraic closure.
pub fn radical_membership(f: &Polynomial, ideal: &Ideal) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let gb = groebner_basis(ideal, &MonomialOrder::Grevlex)?;
    radical_membership_with(f, ideal, &gb)
}

/// As `radical_membership`, reusing a grevlex basis of `I` for the cheap
/// checks `f^k ∈ I`, `k ≤ 3`, before the Rabinowitsch test.
pub fn radical_membership_with(f: &Polynomial, ideal: &Ideal, gb: &GroebnerBasis) -> Result<bool> {
    if f.is_zero() || gb.is_unit() {
        return Ok(true);
    }
    let mut power = f.clone();
    for _ in 0..3 {
        if normal_form(&power, gb)?.is_zero() {
            return Ok(true);
        }
        power = power.mul(f);
    }
    let ring = &ideal.ring;
    let (ext, t) = with_aux_variable(ring);
    let mut gens: Vec<Polynomial> = gb.polynomials().iter().map(|g| g.extend_to(&ext)).collect();
    gens.push(Polynomial::one(&ext).sub(&Polynomial::var(&ext, t).mul(&f.extend_to(&ext))));
    Ok(groebner_basis(&Ideal::new(&ext, gens)?, &MonomialOrder::Grevlex)?.is_unit())
}

/// Largest subset of variables containing the support of no leading
/// monomial.
fn max_independent_set(n: usize, leading: &[Vec<u32>]) -> usize {
    let masks: Vec<u32> = leading
        .iter()
        .map(|m| m.iter().enumerate().filter(|(_, &e)| e > 0).fold(0u32, |acc, (i, _)| acc | (1 << i)))
        .collect();
    let mut best = 0;
    for set in 0u32..(1u32 << n) {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        if masks.iter().all(|&m| m & !set != 0) {
            best = size;
        }
    }
    best
}

/// Dimension of `V(I)` over the algebraic closure; `-1` for the unit ideal.
pub fn krull_dimension(ideal: &Ideal) -> Result<i64> {
    let gb = groebner_basis(ideal, &MonomialOrder::Grevlex)?;
    Ok(dimension_from_basis(&gb))
}

pub fn dimension_from_basis(gb: &GroebnerBasis) -> i64 {
    if gb.is_unit() {
        return -1;
    }
    let n = gb.ring.nvars();
    if n > 31 {
        return n as i64;
    }
    max_independent_set(n, &gb.leading_monomials()) as i64
}

/// Generators of a submodule of a free module, plus a position-over-term
/// Gröbner basis of it.
#[derive(Debug, Clone)]
pub struct ModuleBasis {
    ring: Arc<PolyRing>,
    rank: usize,
    elems: Vec<EPoly>,
}

impl ModuleBasis {
    pub fn new(ring: &Arc<PolyRing>, rank: usize, gens: &[Vec<Polynomial>]) -> Result<ModuleBasis> {
        check_vars(ring)?;
        let ord = TermOrder { nvars: ring.nvars(), order: MonomialOrder::Grevlex };
        for g in gens {
            if g.len() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: g.len() });
            }
        }
        let input = gens.iter().map(|g| vector_to_epoly(&ord, g)).collect::<Result<Vec<_>>>()?;
        let elems = buchberger(&ord, input, true, Limits::current())?;
        Ok(ModuleBasis { ring: ring.clone(), rank, elems })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> Vec<Vec<Polynomial>> {
        self.elems.iter().map(|e| epoly_to_vector(&self.ring, e, self.rank, 0)).collect()
    }

    pub fn contains(&self, v: &[Polynomial]) -> Result<bool> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, found: v.len() });
        }
        let ord = TermOrder { nvars: self.ring.nvars(), order: MonomialOrder::Grevlex };
        let flags = vec![true; self.elems.len()];
        let reducer = Reducer { ord: &ord, basis: &self.elems, active: &flags };
        let mut budget = usize::MAX;
        Ok(reducer.reduce(vector_to_epoly(&ord, v)?, true, &mut budget)?.is_zero())
    }
}

/// Generators of the module `{a : Σ a_i c_i = 0}` for columns `c_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyzygyBasis {
    rank: usize,
    gens: Vec<Vec<Polynomial>>,
}

impl SyzygyBasis {
    /// Number of input columns, i.e. the length of every syzygy.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<Polynomial>] {
        &self.gens
    }

    pub fn into_generators(self) -> Vec<Vec<Polynomial>> {
        self.gens
    }
}

/// Syzygies of `columns` (each of common length `m`), from a POT basis of the
/// module generated by `(c_i, e_i)`: elements whose first `m` components
/// vanish carry the relations in their tail.
pub fn syzygy_basis(ring: &Arc<PolyRing>, columns: &[Vec<Polynomial>]) -> Result<SyzygyBasis> {
    check_vars(ring)?;
    let s = columns.len();
    let m = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidInput("syzygy columns have different lengths".into()));
    }
    let ord = TermOrder { nvars: ring.nvars(), order: MonomialOrder::Grevlex };
    let mut input = Vec::with_capacity(s);
    for (i, c) in columns.iter().enumerate() {
        let mut v: Vec<Polynomial> = c.clone();
        for j in 0..s {
            v.push(if i == j { Polynomial::one(ring) } else { Polynomial::zero(ring) });
        }
        input.push(vector_to_epoly(&ord, &v)?);
    }
    let basis = buchberger(&ord, input, true, Limits::current())?;
    let gens = basis
        .iter()
        .filter(|e| e.lm().pos as usize >= m)
        .map(|e| epoly_to_vector(ring, e, s, m))
        .collect();
    Ok(SyzygyBasis { rank: s, gens })
}

/// Squarefree part of `f` over Q: `f / gcd(f, ∂f/∂x_1, …, ∂f/∂x_n)`,
/// normalized to a primitive integer polynomial.
pub fn squarefree_part(f: &Polynomial) -> Result<Polynomial> {
    if f.is_constant() {
        return Ok(f.clone());
    }
    let mut g = f.clone();
    for v in f.support() {
        if g.is_constant() {
            break;
        }
        g = gcd(&g, &f.partial_derivative(v))?;
    }
    if g.is_constant() {
        return Ok(f.primitive());
    }
    f.div_exact(&g)
        .map(|q| q.primitive())
        .ok_or_else(|| Error::ResourceLimit("exact division failed in squarefree part".into()))
}

/// Greatest common divisor through `(a) ∩ (b) = (lcm(a, b))`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    if a.is_zero() {
        return Ok(b.primitive());
    }
    if b.is_zero() {
        return Ok(a.primitive());
    }
    if a.is_constant() || b.is_constant() {
        return Ok(Polynomial::one(a.ring()));
    }
    let ring = a.ring();
    let meet = ideal_intersection(&Ideal::new(ring, vec![a.clone()])?, &Ideal::new(ring, vec![b.clone()])?)?;
    let gb = groebner_basis(&meet, &MonomialOrder::Grevlex)?;
    let lcm = gb.polynomials().first().cloned().ok_or_else(|| Error::ResourceLimit("empty lcm".into()))?;
    a.mul(b)
        .div_exact(&lcm)
        .map(|g| g.primitive())
        .ok_or_else(|| Error::ResourceLimit("exact division failed in gcd".into()))
}

/// Describes the ideal in one line, for diagnostics.
pub fn describe(ideal: &Ideal) -> String {
    let parts: Vec<String> = ideal.gens.iter().map(|g| format!("{g}")).collect();
    format!("({})", parts.join(", "))
}
