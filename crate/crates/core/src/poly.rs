//! Multivariate polynomials over Q with dense exponent vectors, monomial
//! orders, differentiation, polynomial matrices and a small text parser.
//!
//! Polynomials are kept in a canonical form: terms sorted strictly
//! descending in grevlex, no zero coefficients. Gröbner computations use
//! their own ordering internally and convert at the boundary.

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{check_prime, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffDomain {
    Rational,
    PrimeField(u64),
}

/// Variable names of a polynomial ring, in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    names: Vec<String>,
    domain: CoeffDomain,
}

fn valid_identifier(name: &str) -> bool {
    let mut bytes = name.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl PolyRing {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<PolyRing>> {
        Self::with_domain(names, CoeffDomain::Rational)
    }

    pub fn with_domain<S: AsRef<str>>(names: &[S], domain: CoeffDomain) -> Result<Arc<PolyRing>> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        for (i, n) in names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(Error::InvalidInput(alloc::format!("`{n}` is not a valid variable name")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidInput(alloc::format!("duplicate variable `{n}`")));
            }
        }
        if let CoeffDomain::PrimeField(p) = domain {
            check_prime(p)?;
        }
        Ok(Arc::new(PolyRing { names, domain }))
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn domain(&self) -> CoeffDomain {
        self.domain
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_owned()))
    }

    fn fresh(&self, base: &str, taken: &[String]) -> String {
        let mut name = base.to_owned();
        while self.names.contains(&name) || taken.contains(&name) {
            name.push('_');
        }
        name
    }

    /// A ring with `extra` appended, renamed with trailing underscores where
    /// they would collide with existing names.
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> Arc<PolyRing> {
        let mut added: Vec<String> = Vec::new();
        for e in extra {
            let n = self.fresh(e.as_ref(), &added);
            added.push(n);
        }
        let mut names = self.names.clone();
        names.extend(added);
        Arc::new(PolyRing { names, domain: self.domain })
    }

    /// Coordinate ring of the cotangent bundle: base names followed by
    /// `xi1..xin`.
    pub fn cotangent(&self) -> Arc<PolyRing> {
        self.dual_extension("xi")
    }

    pub fn dual_extension(&self, prefix: &str) -> Arc<PolyRing> {
        let duals: Vec<String> = (1..=self.nvars()).map(|i| alloc::format!("{prefix}{i}")).collect();
        self.extend(&duals)
    }

    pub fn with_field(&self, p: u64) -> Result<Arc<PolyRing>> {
        Self::with_domain(&self.names, CoeffDomain::PrimeField(p))
    }
}

/// A monomial order on dense exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    Grevlex,
    /// Consecutive variable blocks, compared block by block; the first block
    /// dominates.
    Block(Vec<(usize, MonomialOrder)>),
}

fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Grevlex => grevlex_cmp(a, b),
            MonomialOrder::Block(blocks) => {
                let mut start = 0;
                for (size, inner) in blocks {
                    let end = (start + size).min(a.len());
                    let o = inner.cmp(&a[start..end], &b[start..end]);
                    if o != Ordering::Equal {
                        return o;
                    }
                    start = end;
                }
                if start < a.len() {
                    grevlex_cmp(&a[start..], &b[start..])
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    /// Grevlex on the first `first` variables, then grevlex on the rest.
    pub fn elimination(first: usize, total: usize) -> MonomialOrder {
        MonomialOrder::Block(vec![
            (first, MonomialOrder::Grevlex),
            (total - first, MonomialOrder::Grevlex),
        ])
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::Grevlex => "grevlex",
            MonomialOrder::Block(_) => "block",
        }
    }
}

impl core::str::FromStr for MonomialOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(MonomialOrder::Lex),
            "grevlex" => Ok(MonomialOrder::Grevlex),
            _ => Err(Error::InvalidInput(alloc::format!("unknown monomial order `{s}`"))),
        }
    }
}

pub type Monomial = Vec<u32>;

/// A polynomial with rational coefficients; terms sorted descending in
/// grevlex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<(Monomial, Rational)>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn normalize(mut terms: Vec<(Monomial, Rational)>) -> Vec<(Monomial, Rational)> {
    terms.sort_by(|a, b| grevlex_cmp(&b.0, &a.0));
    let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 += c,
            _ => {
                if let Some(last) = out.last() {
                    if last.1.is_zero() {
                        out.pop();
                    }
                }
                out.push((m, c));
            }
        }
    }
    if out.last().is_some_and(|t| t.1.is_zero()) {
        out.pop();
    }
    out
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Rational) -> Polynomial {
        Self::from_terms(ring, vec![(vec![0; ring.nvars()], c)])
    }

    pub fn one(ring: &Arc<PolyRing>) -> Polynomial {
        Self::constant(ring, Rational::one())
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Polynomial {
        let mut m = vec![0; ring.nvars()];
        m[i] = 1;
        Polynomial { ring: ring.clone(), terms: vec![(m, Rational::one())] }
    }

    pub fn monomial(ring: &Arc<PolyRing>, exps: Monomial, c: Rational) -> Polynomial {
        Self::from_terms(ring, vec![(exps, c)])
    }

    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<(Monomial, Rational)>) -> Polynomial {
        debug_assert!(terms.iter().all(|t| t.0.len() == ring.nvars()));
        Polynomial { ring: ring.clone(), terms: normalize(terms) }
    }

    /// Terms that are already strictly grevlex-descending and nonzero.
    #[allow(dead_code)]
    pub(crate) fn from_sorted_terms(ring: &Arc<PolyRing>, terms: Vec<(Monomial, Rational)>) -> Polynomial {
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[var]).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.iter().any(|(m, _)| m[i] > 0))
            .collect()
    }

    /// Leading term under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(&a.0, &b.0))
            .map(|(m, c)| (m, c))
    }

    pub fn same_ring(&self, other: &Polynomial) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Divides by the leading coefficient in canonical order.
    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Scales to an integer polynomial with coprime coefficients and positive
    /// leading coefficient.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            let v = (c * Rational::from_integer(den.clone())).to_integer();
            g = g.gcd(&v);
        }
        let mut factor = Rational::new(den, g);
        if self.terms[0].1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match grevlex_cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { ring: self.ring.clone(), terms: out }
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                terms.push((m, ca * cb));
            }
        }
        Polynomial { ring: self.ring.clone(), terms: normalize(terms) }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn partial_derivative(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[var] > 0)
            .map(|(m, c)| {
                let mut m2 = m.clone();
                m2[var] -= 1;
                (m2, c * Rational::from_integer(BigInt::from(m[var])))
            })
            .collect();
        Polynomial { ring: self.ring.clone(), terms: normalize(terms) }
    }

    pub fn derivative_by_name(&self, name: &str) -> Result<Polynomial> {
        Ok(self.partial_derivative(self.ring.index_of(name)?))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.ring.nvars());
        let mut powers: Vec<Vec<Rational>> = point.iter().map(|x| vec![Rational::one(), x.clone()]).collect();
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &point[i];
                    powers[i].push(next);
                }
                t *= &powers[i][e as usize];
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `images[i]` for variable `i`; all images share one ring.
    pub fn substitute(&self, target: &Arc<PolyRing>, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.ring.nvars());
        let mut cache: Vec<Vec<Polynomial>> = images.iter().map(|g| vec![Polynomial::one(target), g.clone()]).collect();
        let mut acc = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Re-embeds into `target`, sending variable `i` to `index_map[i]`.
    pub fn embed(&self, target: &Arc<PolyRing>, index_map: &[usize]) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = vec![0; target.nvars()];
                for (i, &e) in m.iter().enumerate() {
                    m2[index_map[i]] += e;
                }
                (m2, c.clone())
            })
            .collect();
        Polynomial { ring: target.clone(), terms: normalize(terms) }
    }

    /// Embeds into a ring whose first variables are this ring's variables.
    pub fn extend_to(&self, target: &Arc<PolyRing>) -> Polynomial {
        let map: Vec<usize> = (0..self.ring.nvars()).collect();
        self.embed(target, &map)
    }

    /// Restricts to the ring spanned by the listed variables, failing if any
    /// other variable occurs.
    pub fn restrict_to(&self, target: &Arc<PolyRing>, vars: &[usize]) -> Option<Polynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if m.iter().enumerate().any(|(i, &e)| e > 0 && !vars.contains(&i)) {
                return None;
            }
            terms.push((vars.iter().map(|&v| m[v]).collect(), c.clone()));
        }
        Some(Polynomial { ring: target.clone(), terms: normalize(terms) })
    }

    /// Exact quotient by `d`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.terms.first()?;
        let mut rem = self.clone();
        let mut q = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            if rm.iter().zip(dm).any(|(a, b)| a < b) {
                return None;
            }
            let m: Monomial = rm.iter().zip(dm).map(|(a, b)| a - b).collect();
            let c = rc / dc;
            let t = Polynomial { ring: self.ring.clone(), terms: vec![(m.clone(), c.clone())] };
            rem = rem.sub(&t.mul(d));
            q.push((m, c));
        }
        Some(Polynomial::from_terms(&self.ring, q))
    }

    /// True if every term has total degree one in the listed variables.
    pub fn is_linear_in(&self, vars: &[usize]) -> bool {
        self.terms.iter().all(|(m, _)| vars.iter().map(|&v| m[v]).sum::<u32>() == 1)
    }

    /// Coefficient of the listed variable when linear in `vars`, as a
    /// polynomial in the ring.
    pub fn coefficient_of(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[var] == 1)
            .map(|(m, c)| {
                let mut m2 = m.clone();
                m2[var] = 0;
                (m2, c.clone())
            })
            .collect();
        Polynomial { ring: self.ring.clone(), terms: normalize(terms) }
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<ModPolynomial> {
        let ring = self.ring.with_field(p)?;
        let pb = BigInt::from(p);
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let den = c.denom().mod_floor(&pb);
            if den.is_zero() {
                return Err(Error::BadPrime(p));
            }
            let num = c.numer().mod_floor(&pb).to_u64().unwrap();
            let den = den.to_u64().unwrap();
            let v = (num as u128 * mod_inverse(den, p) as u128 % p as u128) as u64;
            if v != 0 {
                terms.push((m.clone(), v));
            }
        }
        Ok(ModPolynomial { ring, p, terms })
    }

    pub fn parse(text: &str, ring: &Arc<PolyRing>) -> Result<Polynomial> {
        Parser { src: text.as_bytes(), pos: 0, ring }.parse_all()
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i128) as u64
}

fn write_monomial(f: &mut fmt::Formatter<'_>, names: &[String], m: &[u32]) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(&names[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let constant = m.iter().all(|&e| e == 0);
            if constant {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, &self.ring.names, m)?;
            }
        }
        Ok(())
    }
}

/// A polynomial over F_p, used by the point-counting oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPolynomial {
    ring: Arc<PolyRing>,
    p: u64,
    terms: Vec<(Monomial, u64)>,
}

impl ModPolynomial {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, point: &[u64]) -> u64 {
        let p = self.p as u128;
        let mut acc: u128 = 0;
        for (m, c) in &self.terms {
            let mut t = *c as u128;
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t * point[i] as u128 % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc as u64
    }
}

impl fmt::Display for ModPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            if m.iter().all(|&e| e == 0) {
                write!(f, "{c}")?;
            } else {
                if *c != 1 {
                    write!(f, "{c}*")?;
                }
                write_monomial(f, &self.ring.names, m)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Arc<PolyRing>,
}

impl Parser<'_> {
    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::SyntaxError { position: self.pos, message: message.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<Polynomial> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        // A leading '-' negates the first term.
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            let e: u32 = e.to_u32().map_or_else(|| self.error("exponent too large"), Ok)?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected an unsigned integer");
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn base(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => {
                let num = self.uint()?;
                let mut value = Rational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den = self.uint()?;
                    if den.is_zero() {
                        return self.error("zero denominator");
                    }
                    value /= Rational::from_integer(den);
                }
                Ok(Polynomial::constant(self.ring, value))
            }
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i = self.ring.index_of(name)?;
                Ok(Polynomial::var(self.ring, i))
            }
            Some(_) => self.error("unexpected character"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// A rectangular matrix of polynomials over one ring, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Arc<PolyRing>,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(ring: &Arc<PolyRing>, rows: usize, cols: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(PolyMatrix { ring: ring.clone(), rows, cols, entries })
    }

    pub fn from_rows(ring: &Arc<PolyRing>, rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        let n = rows.len();
        Self::new(ring, n, cols, rows.into_iter().flatten().collect())
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Polynomial] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Polynomial> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        PolyMatrix { ring: self.ring.clone(), rows: self.cols, cols: self.rows, entries }
    }

    /// Appends `row` at the bottom.
    pub fn stack_row(&self, row: Vec<Polynomial>) -> Result<PolyMatrix> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: row.len() });
        }
        let mut entries = self.entries.clone();
        entries.extend(row);
        Ok(PolyMatrix { ring: self.ring.clone(), rows: self.rows + 1, cols: self.cols, entries })
    }

    pub fn evaluate(&self, point: &[Rational]) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|p| p.evaluate(point)).collect())
            .collect()
    }

    fn determinant(&self, rows: &[usize], cols: &[usize]) -> Polynomial {
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]).clone();
        }
        let mut acc = Polynomial::zero(&self.ring);
        let sub_rows = &rows[1..];
        for (j, &c) in cols.iter().enumerate() {
            let entry = self.get(rows[0], c);
            if entry.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = entry.mul(&self.determinant(sub_rows, &sub_cols));
            acc = if j % 2 == 0 { acc.add(&minor) } else { acc.sub(&minor) };
        }
        acc
    }

    /// All `size × size` minors, row tuples outermost, each tuple in
    /// lexicographic order.
    pub fn minors(&self, size: usize) -> Result<Vec<Polynomial>> {
        if size == 0 || size > self.rows.min(self.cols) {
            return Err(Error::SizeOutOfRange { size, rows: self.rows, cols: self.cols });
        }
        let row_sets = combinations(self.rows, size);
        let col_sets = combinations(self.cols, size);
        let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
        for r in &row_sets {
            for c in &col_sets {
                out.push(self.determinant(r, c));
            }
        }
        Ok(out)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][c].recip();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] * &inv;
                for cc in c..ncols {
                    let v = &rows[rank][cc] * &f;
                    rows[r][cc] -= v;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn ring(names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(names).unwrap()
    }

    #[test]
    fn parse_four_lines() {
        let r = ring(&["x", "y", "z"]);
        let f = Polynomial::parse("x*y*(x+y)*(x+y*z)", &r).unwrap();
        let expected = Polynomial::parse("x^3*y + x^2*y^2 + x^2*y^2*z + x*y^3*z", &r).unwrap();
        assert_eq!(f, expected);
        assert_eq!(f.to_string(), "x^2*y^2*z + x*y^3*z + x^3*y + x^2*y^2");
        let g = Polynomial::parse("x^2*y*(x+y)", &r).unwrap();
        assert_eq!(g.to_string(), "x^3*y + x^2*y^2");
    }

    #[test]
    fn parse_errors() {
        let r = ring(&["x", "y"]);
        assert!(matches!(Polynomial::parse("x+*y", &r), Err(Error::SyntaxError { position: 2, .. })));
        assert_eq!(Polynomial::parse("x+w", &r), Err(Error::UnknownVariable("w".into())));
        assert!(Polynomial::parse("xy", &r).is_err());
        assert!(Polynomial::parse("(x+y", &r).is_err());
        assert!(Polynomial::parse("", &r).is_err());
    }

    #[test]
    fn printing_signs_and_fractions() {
        let r = ring(&["x", "y"]);
        let f = Polynomial::parse("-x^2 + 3/2*y - 1", &r).unwrap();
        assert_eq!(f.to_string(), "-x^2 + 3/2*y - 1");
        assert_eq!(Polynomial::parse(&f.to_string(), &r).unwrap(), f);
        assert_eq!(Polynomial::parse("x - x", &r).unwrap().to_string(), "0");
    }

    #[test]
    fn derivatives() {
        let r = ring(&["x", "y", "z"]);
        let f = Polynomial::parse("x^3*y + x^2*y^2", &r).unwrap();
        assert_eq!(f.partial_derivative(0), Polynomial::parse("3*x^2*y + 2*x*y^2", &r).unwrap());
        let four = Polynomial::parse("x*y*(x+y)*(x+y*z)", &r).unwrap();
        assert_eq!(four.derivative_by_name("z").unwrap(), Polynomial::parse("x^2*y^2 + x*y^3", &r).unwrap());
        assert!(Polynomial::parse("7", &r).unwrap().partial_derivative(0).is_zero());
        assert!(four.derivative_by_name("w").is_err());
    }

    #[test]
    fn minors_examples() {
        let r = ring(&["x", "y", "xi1", "xi2"]);
        let p = |s: &str| Polynomial::parse(s, &r).unwrap();
        let id = PolyMatrix::from_rows(&r, vec![vec![p("1"), p("0")], vec![p("0"), p("1")]]).unwrap();
        assert_eq!(id.minors(2).unwrap(), vec![p("1")]);
        let m = PolyMatrix::from_rows(&r, vec![vec![p("2*x"), p("2*y")], vec![p("xi1"), p("xi2")]]).unwrap();
        assert_eq!(m.minors(2).unwrap(), vec![p("2*x*xi2 - 2*y*xi1")]);
        let j = PolyMatrix::from_rows(&r, vec![vec![p("1"), p("0")], vec![p("y"), p("x")]]).unwrap();
        assert_eq!(j.minors(1).unwrap(), vec![p("1"), p("0"), p("y"), p("x")]);
        assert!(matches!(j.minors(3), Err(Error::SizeOutOfRange { .. })));
    }

    #[test]
    fn mod_p_reduction() {
        let r = ring(&["x", "y"]);
        let f = Polynomial::parse("x^3*y + x^2*y^2", &r).unwrap();
        assert_eq!(f.reduce_mod_p(2).unwrap().to_string(), "x^3*y + x^2*y^2");
        assert!(Polynomial::parse("3*x", &r).unwrap().reduce_mod_p(3).unwrap().is_zero());
        assert_eq!(Polynomial::parse("1/2*x", &r).unwrap().reduce_mod_p(2), Err(Error::BadPrime(2)));
        assert_eq!(Polynomial::parse("1/2*x", &r).unwrap().reduce_mod_p(5).unwrap().to_string(), "3*x");
    }

    #[test]
    fn exact_division() {
        let r = ring(&["x", "y"]);
        let p = |s: &str| Polynomial::parse(s, &r).unwrap();
        assert_eq!(p("x^2 - y^2").div_exact(&p("x + y")), Some(p("x - y")));
        assert_eq!(p("x^2 + y").div_exact(&p("x")), None);
    }

    #[test]
    fn combination_order() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 2), vec![vec![0, 1]]);
        assert_eq!(combinations(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn rank_of_rational_matrix() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rational_rank(m), 1);
    }
}
