//! Stratifications by locally closed pieces indexed by finite posets.
//!
//! A piece is `V(closed) ∖ V(excluded)`; "nothing excluded" is the unit
//! ideal. Larger poset elements are the generic strata: the closure of the
//! piece at `p` must lie in the union of the pieces at `q ≤ p`. All set
//! checks (emptiness, disjointness, covering, closure) are exact, by radical
//! membership.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::groebner::{
    eliminate_to_subring, groebner_basis, krull_dimension, radical_membership_with, saturation_by_ideal,
    squarefree_part, Ideal,
};
use crate::morphism::{b_phi_ideal, conormal_ideal, fiber_ideal_from, kernel_vector_fields, KernelFields};
use crate::poly::{MonomialOrder, PolyMatrix, PolyRing, Polynomial};
use crate::PolynomialMorphism;

/// A finite partial order. `leq(a, b)` means `a ≤ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    le: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds the order from `(a, b)` index pairs meaning `a ≤ b`; reflexive
    /// pairs are implied. Fails unless the relation is antisymmetric and
    /// transitive.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Poset> {
        let n = labels.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!("poset pair ({a}, {b}) out of range")));
            }
            le[a][b] = true;
        }
        let p = Poset { labels, le };
        p.check()?;
        Ok(p)
    }

    /// As `new`, but closes the relation transitively first.
    pub fn generated_by(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Poset> {
        let n = labels.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!("poset pair ({a}, {b}) out of range")));
            }
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        let p = Poset { labels, le };
        p.check()?;
        Ok(p)
    }

    pub fn from_labeled_pairs(labels: Vec<String>, pairs: &[(String, String)]) -> Result<Poset> {
        let idx = |s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::InvalidInput(format!("unknown poset element {s}")))
        };
        let pairs = pairs.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>>>()?;
        Poset::generated_by(labels, &pairs)
    }

    /// A chain with `labels[0]` at the bottom.
    pub fn chain(labels: Vec<String>) -> Poset {
        let n = labels.len();
        let le = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        Poset { labels, le }
    }

    pub fn antichain(labels: Vec<String>) -> Poset {
        let n = labels.len();
        let le = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        Poset { labels, le }
    }

    fn from_matrix(labels: Vec<String>, le: Vec<Vec<bool>>) -> Poset {
        Poset { labels, le }
    }

    fn check(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.le[i][j] && self.le[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "poset relation is not antisymmetric at {} and {}",
                        self.labels[i], self.labels[j]
                    )));
                }
                for k in 0..n {
                    if self.le[i][j] && self.le[j][k] && !self.le[i][k] {
                        return Err(Error::InvalidInput(format!(
                            "poset relation is not transitive at {}, {}, {}",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.le[a][b]
    }

    /// All pairs `a < b`, in index order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Cover relations `a ⋖ b`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.strict_pairs()
            .into_iter()
            .filter(|&(a, b)| !(0..self.len()).any(|c| self.lt(a, c) && self.lt(c, b)))
            .collect()
    }

    pub fn is_chain(&self) -> bool {
        (0..self.len()).all(|a| (0..self.len()).all(|b| self.le[a][b] || self.le[b][a]))
    }

    /// Product order on pairs, labelled `(a,b)`.
    pub fn product(a: &Poset, b: &Poset) -> Poset {
        let mut labels = Vec::new();
        let mut idx = Vec::new();
        for i in 0..a.len() {
            for j in 0..b.len() {
                labels.push(format!("({},{})", a.labels[i], b.labels[j]));
                idx.push((i, j));
            }
        }
        let le = idx
            .iter()
            .map(|&(i, j)| idx.iter().map(|&(k, l)| a.le[i][k] && b.le[j][l]).collect())
            .collect();
        Poset { labels, le }
    }

    /// Disjoint union with every element of `upper` above every element of
    /// `lower`; `lower` comes first in the index order.
    pub fn stack(lower: &Poset, upper: &Poset) -> Poset {
        let (m, n) = (lower.len(), upper.len());
        let mut labels = lower.labels.clone();
        labels.extend(upper.labels.iter().cloned());
        let mut le = vec![vec![false; m + n]; m + n];
        for i in 0..m + n {
            for j in 0..m + n {
                le[i][j] = match (i < m, j < m) {
                    (true, true) => lower.le[i][j],
                    (false, false) => upper.le[i - m][j - m],
                    (true, false) => true,
                    (false, true) => false,
                };
            }
        }
        Poset { labels, le }
    }

    pub fn restrict(&self, keep: &[usize]) -> Poset {
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let le = keep.iter().map(|&i| keep.iter().map(|&j| self.le[i][j]).collect()).collect();
        Poset { labels, le }
    }

    pub fn relabel(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.len());
        self.labels = labels;
    }
}

fn has_unit_generator(i: &Ideal) -> bool {
    i.gens().iter().any(|g| g.is_constant() && !g.is_zero())
}

/// `I · J`, short-circuiting unit factors.
fn product(a: &Ideal, b: &Ideal) -> Result<Ideal> {
    if has_unit_generator(a) {
        return Ok(b.clone());
    }
    if has_unit_generator(b) {
        return Ok(a.clone());
    }
    a.product(b)
}

/// `V(closed) ∖ V(excluded)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocallyClosed {
    pub closed: Ideal,
    pub excluded: Ideal,
}

impl LocallyClosed {
    pub fn new(closed: Ideal, excluded: Ideal) -> Result<Self> {
        if closed.ring() != excluded.ring() {
            return Err(Error::RingMismatch);
        }
        Ok(LocallyClosed { closed, excluded })
    }

    /// The whole affine space.
    pub fn whole(ring: &Arc<PolyRing>) -> Self {
        LocallyClosed { closed: Ideal::zero(ring), excluded: Ideal::unit(ring) }
    }

    pub fn closed_set(closed: Ideal) -> Self {
        let ring = closed.ring().clone();
        LocallyClosed { closed, excluded: Ideal::unit(&ring) }
    }

    pub fn parse(ring: &Arc<PolyRing>, closed: &[&str], excluded: &[&str]) -> Result<Self> {
        LocallyClosed::new(Ideal::parse(ring, closed)?, Ideal::parse(ring, excluded)?)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.closed.ring()
    }

    pub fn is_empty(&self) -> Result<bool> {
        if self.excluded.is_zero_ideal() {
            return Ok(true);
        }
        let gb = groebner_basis(&self.closed, &MonomialOrder::Grevlex)?;
        if gb.is_unit() {
            return Ok(true);
        }
        if has_unit_generator(&self.excluded) {
            return Ok(false);
        }
        for g in self.excluded.gens() {
            if !radical_membership_with(g, &self.closed, &gb)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn intersect(&self, other: &LocallyClosed) -> Result<LocallyClosed> {
        Ok(LocallyClosed { closed: self.closed.sum(&other.closed)?, excluded: product(&self.excluded, &other.excluded)? })
    }

    pub fn meet_closed(&self, z: &Ideal) -> Result<LocallyClosed> {
        Ok(LocallyClosed { closed: self.closed.sum(z)?, excluded: self.excluded.clone() })
    }

    pub fn minus_closed(&self, z: &Ideal) -> Result<LocallyClosed> {
        Ok(LocallyClosed { closed: self.closed.clone(), excluded: product(&self.excluded, z)? })
    }

    /// Ideal of the Zariski closure (up to radical): `closed : excluded^∞`.
    pub fn closure_ideal(&self) -> Result<Ideal> {
        if has_unit_generator(&self.excluded) {
            return Ok(self.closed.clone());
        }
        saturation_by_ideal(&self.closed, &self.excluded)
    }

    /// `self ∖ other` as at most two disjoint pieces, empties dropped.
    pub fn subtract(&self, other: &LocallyClosed) -> Result<Vec<LocallyClosed>> {
        let outside = self.minus_closed(&other.closed)?;
        let inside_excluded = LocallyClosed {
            closed: self.closed.sum(&other.closed)?.sum(&other.excluded)?,
            excluded: self.excluded.clone(),
        };
        let mut out = Vec::new();
        for p in [outside, inside_excluded] {
            if !p.is_empty()? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Whether `self ⊆ ⋃ others`.
    pub fn covered_by(&self, others: &[&LocallyClosed]) -> Result<bool> {
        let mut rest = if self.is_empty()? { Vec::new() } else { vec![self.clone()] };
        for o in others {
            let mut next = Vec::new();
            for r in &rest {
                next.extend(r.subtract(o)?);
            }
            rest = next;
            if rest.is_empty() {
                return Ok(true);
            }
        }
        Ok(rest.is_empty())
    }

    /// Preimage under `f: A^n -> A^1` of a piece of the line.
    pub fn pullback(&self, source: &Arc<PolyRing>, f: &Polynomial) -> Result<LocallyClosed> {
        let pull = |i: &Ideal| -> Result<Ideal> {
            let gens = i.gens().iter().map(|g| g.substitute(source, core::slice::from_ref(f))).collect();
            Ideal::new(source, gens)
        };
        LocallyClosed::new(pull(&self.closed)?, pull(&self.excluded)?)
    }

    pub fn dimension(&self) -> Result<i64> {
        if self.is_empty()? {
            return Ok(-1);
        }
        krull_dimension(&self.closure_ideal()?)
    }
}

/// Pieces indexed by a poset, over an ambient locally closed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratDatum {
    pub ambient: LocallyClosed,
    pub poset: Poset,
    pub pieces: Vec<LocallyClosed>,
}

impl StratDatum {
    pub fn new(ambient: LocallyClosed, poset: Poset, pieces: Vec<LocallyClosed>) -> Result<Self> {
        if poset.len() != pieces.len() {
            return Err(Error::DimensionMismatch { expected: poset.len(), found: pieces.len() });
        }
        if pieces.iter().any(|p| p.ring() != ambient.ring()) {
            return Err(Error::RingMismatch);
        }
        Ok(StratDatum { ambient, poset, pieces })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.ambient.ring()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn piece(&self, label: &str) -> Option<&LocallyClosed> {
        self.poset.index_of(label).map(|i| &self.pieces[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub disjoint: bool,
    pub covering: bool,
    pub continuous: bool,
    pub inside_ambient: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.disjoint && self.covering && self.continuous && self.inside_ambient
    }
}

pub fn validate_stratification(d: &StratDatum) -> Result<ValidationReport> {
    let mut rep = ValidationReport { disjoint: true, covering: true, continuous: true, inside_ambient: true, violations: Vec::new() };
    let labels = d.poset.labels();
    let n = d.len();
    for i in 0..n {
        if !d.pieces[i].covered_by(&[&d.ambient])? {
            rep.inside_ambient = false;
            rep.violations.push(format!("piece {} leaves the ambient set", labels[i]));
        }
        for j in i + 1..n {
            if !d.pieces[i].intersect(&d.pieces[j])?.is_empty()? {
                rep.disjoint = false;
                rep.violations.push(format!("pieces {} and {} intersect", labels[i], labels[j]));
            }
        }
    }
    let all: Vec<&LocallyClosed> = d.pieces.iter().collect();
    if !d.ambient.covered_by(&all)? {
        rep.covering = false;
        rep.violations.push("pieces do not cover the ambient set".into());
    }
    for p in 0..n {
        if d.pieces[p].is_empty()? {
            continue;
        }
        let closure = LocallyClosed::closed_set(d.pieces[p].closure_ideal()?).intersect(&d.ambient)?;
        let below: Vec<&LocallyClosed> = (0..n).filter(|&q| d.poset.leq(q, p)).map(|q| &d.pieces[q]).collect();
        if !closure.covered_by(&below)? {
            rep.continuous = false;
            rep.violations.push(format!("closure of piece {} meets pieces not below it", labels[p]));
        }
    }
    Ok(rep)
}

/// How a closed set is presented, which decides how its singular locus and
/// the critical locus of a function on it are computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    Ambient,
    Hypersurface,
    CompleteIntersection(usize),
    Points,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Ambient,
    Hypersurface(Polynomial),
    Ci(Vec<Polynomial>, usize),
    Points,
}

fn gradient(f: &Polynomial) -> Vec<Polynomial> {
    (0..f.ring().nvars()).map(|j| f.partial_derivative(j)).collect()
}

fn jacobian_rows(gens: &[Polynomial]) -> Vec<Vec<Polynomial>> {
    gens.iter().map(gradient).collect()
}

fn minors_of(ring: &Arc<PolyRing>, rows: Vec<Vec<Polynomial>>, size: usize) -> Result<Vec<Polynomial>> {
    let ncols = ring.nvars();
    if size == 0 {
        return Ok(vec![Polynomial::one(ring)]);
    }
    if size > rows.len() || size > ncols {
        return Ok(Vec::new());
    }
    PolyMatrix::from_rows(ring, rows)?.minors(size)
}

impl Kind {
    fn codim(&self, n: usize) -> usize {
        match self {
            Kind::Ambient => 0,
            Kind::Hypersurface(_) => 1,
            Kind::Ci(_, c) => *c,
            Kind::Points => n,
        }
    }

    fn gens(&self) -> Vec<Polynomial> {
        match self {
            Kind::Ambient | Kind::Points => Vec::new(),
            Kind::Hypersurface(h) => vec![h.clone()],
            Kind::Ci(g, _) => g.clone(),
        }
    }

    /// Ideal of the singular locus, `None` when smooth by construction.
    fn singular_ideal(&self, ring: &Arc<PolyRing>) -> Result<Option<Ideal>> {
        match self {
            Kind::Ambient | Kind::Points => Ok(None),
            Kind::Hypersurface(_) | Kind::Ci(..) => {
                let gens = self.gens();
                let c = self.codim(ring.nvars());
                let mut all = gens.clone();
                all.extend(minors_of(ring, jacobian_rows(&gens), c)?);
                Ok(Some(Ideal::new(ring, all)?))
            }
        }
    }

    /// Ideal of the critical locus of `f` restricted to the smooth part.
    fn critical_ideal(&self, closed: &Ideal, f: &Polynomial) -> Result<Ideal> {
        let ring = closed.ring();
        let n = ring.nvars();
        match self {
            Kind::Points => Ok(closed.clone()),
            _ => {
                let gens = self.gens();
                let c = self.codim(n);
                let mut rows = jacobian_rows(&gens);
                rows.push(gradient(f));
                let mut all = gens;
                let minors = minors_of(ring, rows, c + 1)?;
                if minors.is_empty() {
                    return Ok(closed.clone());
                }
                all.extend(minors);
                Ideal::new(ring, all)
            }
        }
    }
}

fn classify_closed(closed: &Ideal) -> Result<Option<Kind>> {
    let ring = closed.ring();
    let n = ring.nvars() as i64;
    let gb = groebner_basis(closed, &MonomialOrder::Grevlex)?;
    let d = crate::groebner::dimension_from_basis(&gb);
    if d < 0 {
        return Ok(None);
    }
    if d == n {
        return Ok(Some(Kind::Ambient));
    }
    if d == 0 {
        return Ok(Some(Kind::Points));
    }
    if d == n - 1 {
        let mut g = gb.polynomials()[0].clone();
        for p in &gb.polynomials()[1..] {
            if g.is_constant() {
                break;
            }
            g = crate::groebner::gcd(&g, p)?;
        }
        if !g.is_constant() {
            let h = squarefree_part(&g)?;
            if radical_membership_with(&h, closed, &gb)? {
                return Ok(Some(Kind::Hypersurface(h)));
            }
        }
    }
    let c = (n - d) as usize;
    let candidates = [closed.gens().to_vec(), gb.polynomials().to_vec()];
    for gens in candidates {
        if gens.len() != c {
            continue;
        }
        let mut with_minors = gens.clone();
        with_minors.extend(minors_of(ring, jacobian_rows(&gens), c)?);
        if krull_dimension(&Ideal::new(ring, with_minors)?)? < d {
            return Ok(Some(Kind::Ci(gens, c)));
        }
    }
    if let Some(gens) = reduced_ci_search(closed, &gb, c, d)? {
        return Ok(Some(if c == 1 { Kind::Hypersurface(gens[0].clone()) } else { Kind::Ci(gens, c) }));
    }
    Err(Error::PresentationUnsupported(format!(
        "closed set of dimension {d} in {n} variables is neither a hypersurface, a reduced complete intersection nor finite"
    )))
}

/// Looks for `c` squarefree polynomials cutting out `V(closed)` as a
/// generically reduced complete intersection. Candidates are squarefree
/// parts of the basis elements and of the one-variable elimination ideals.
fn reduced_ci_search(closed: &Ideal, gb: &crate::GroebnerBasis, c: usize, d: i64) -> Result<Option<Vec<Polynomial>>> {
    let ring = closed.ring();
    let n = ring.nvars();
    let mut cands: Vec<Polynomial> = Vec::new();
    let mut push = |p: Polynomial| {
        if !p.is_constant() && !cands.contains(&p) {
            cands.push(p);
        }
    };
    for v in 0..n {
        let e = crate::groebner::elimination(closed, &[v])?.canonical()?;
        if let [g] = e.gens() {
            push(squarefree_part(g)?);
        }
    }
    for g in gb.polynomials() {
        push(squarefree_part(g)?);
    }
    if cands.len() > 16 {
        cands.truncate(16);
    }
    let mut members = Vec::new();
    for p in &cands {
        if radical_membership_with(p, closed, gb)? {
            members.push(p.clone());
        }
    }
    // Lower-degree candidates first.
    members.sort_by_key(|p| (p.total_degree(), p.terms().len()));
    for idx in crate::poly::combinations(members.len(), c) {
        let gens: Vec<Polynomial> = idx.iter().map(|&i| members[i].clone()).collect();
        let sub = Ideal::new(ring, gens.clone())?;
        if krull_dimension(&sub)? != d {
            continue;
        }
        if !crate::morphism::inclusion_check(&sub, closed)? {
            continue;
        }
        let mut with_minors = gens.clone();
        with_minors.extend(minors_of(ring, jacobian_rows(&gens), c)?);
        if krull_dimension(&Ideal::new(ring, with_minors)?)? < d {
            return Ok(Some(gens));
        }
    }
    Ok(None)
}

/// A nonempty piece together with a presentation of its closed part.
#[derive(Debug, Clone)]
struct Variety {
    piece: LocallyClosed,
    kind: Kind,
}

/// Presentation of the piece, retrying with the closure ideal when the
/// given closed ideal has components inside the excluded set.
fn classify(piece: &LocallyClosed) -> Result<Option<Variety>> {
    if piece.is_empty()? {
        return Ok(None);
    }
    match classify_closed(&piece.closed) {
        Ok(Some(kind)) => Ok(Some(Variety { piece: piece.clone(), kind })),
        Ok(None) => Ok(None),
        Err(Error::PresentationUnsupported(msg)) => {
            if has_unit_generator(&piece.excluded) {
                return Err(Error::PresentationUnsupported(msg));
            }
            let closure = piece.closure_ideal()?.canonical()?;
            let kind = classify_closed(&closure)?.ok_or_else(|| Error::PresentationUnsupported(msg))?;
            Ok(Some(Variety { piece: LocallyClosed { closed: closure, excluded: piece.excluded.clone() }, kind }))
        }
        Err(e) => Err(e),
    }
}

fn presentation_kind(x: &Ideal, pres: &Presentation) -> Result<Kind> {
    let ring = x.ring();
    match pres {
        Presentation::Ambient => {
            if x.gens().is_empty() || krull_dimension(x)? == ring.nvars() as i64 {
                Ok(Kind::Ambient)
            } else {
                Err(Error::PresentationUnsupported("ambient presentation of a proper subset".into()))
            }
        }
        Presentation::Hypersurface => {
            if x.gens().len() != 1 || x.gens()[0].is_constant() {
                return Err(Error::PresentationUnsupported("hypersurface needs one nonconstant generator".into()));
            }
            Ok(Kind::Hypersurface(squarefree_part(&x.gens()[0])?))
        }
        Presentation::CompleteIntersection(c) => {
            let n = ring.nvars() as i64;
            let c = *c;
            if x.gens().len() != c || krull_dimension(x)? != n - c as i64 {
                return Err(Error::PresentationUnsupported(format!("generators do not form a complete intersection of codimension {c}")));
            }
            if c == 1 {
                return Ok(Kind::Hypersurface(squarefree_part(&x.gens()[0])?));
            }
            let mut with_minors = x.gens().to_vec();
            with_minors.extend(minors_of(ring, jacobian_rows(x.gens()), c)?);
            if krull_dimension(&Ideal::new(ring, with_minors)?)? >= n - c as i64 {
                return Err(Error::PresentationUnsupported("complete intersection is not generically reduced".into()));
            }
            Ok(Kind::Ci(x.gens().to_vec(), c))
        }
        Presentation::Points => {
            if krull_dimension(x)? > 0 {
                return Err(Error::PresentationUnsupported("point presentation of a positive-dimensional set".into()));
            }
            Ok(Kind::Points)
        }
    }
}

fn reg_chain(v: Variety, depth: usize) -> Result<Vec<LocallyClosed>> {
    if depth > 64 {
        return Err(Error::ResourceLimit("singular-locus recursion too deep".into()));
    }
    let ring = v.piece.ring().clone();
    match v.kind.singular_ideal(&ring)? {
        None => Ok(vec![v.piece]),
        Some(sing) => {
            let smooth = v.piece.minus_closed(&sing)?;
            let rest = v.piece.meet_closed(&sing)?;
            let mut chain = match classify(&rest)? {
                Some(r) => reg_chain(r, depth + 1)?,
                None => Vec::new(),
            };
            if !smooth.is_empty()? {
                chain.push(smooth);
            }
            Ok(chain)
        }
    }
}

/// Recursive smooth-locus peeling of `V(x)`: a chain with the smooth locus on
/// top and the stratification of the singular locus below it.
pub fn reg_stratify(x: &Ideal, presentation: &Presentation) -> Result<StratDatum> {
    let kind = presentation_kind(x, presentation)?;
    let ring = x.ring().clone();
    let closed = match &kind {
        Kind::Hypersurface(h) => Ideal::new(&ring, vec![h.clone()])?,
        _ => x.clone(),
    };
    let piece = LocallyClosed::closed_set(closed);
    let chain = if piece.is_empty()? { Vec::new() } else { reg_chain(Variety { piece: piece.clone(), kind }, 0)? };
    let labels = (0..chain.len()).map(|i| format!("r{i}")).collect();
    StratDatum::new(piece, Poset::chain(labels), chain)
}

/// Fitting-type ideals `F_r` (r-minors) of the kernel relation matrix, for
/// `r = 0..=min(n, s)`; `F_0 = (1)`.
fn fitting_ideals(fields: &KernelFields) -> Result<Vec<Ideal>> {
    let ring = fields.ring();
    let mut out = vec![Ideal::unit(ring)];
    if let Some(k) = fields.relation_matrix() {
        for r in 1..=k.rows().min(k.cols()) {
            let minors: Vec<Polynomial> = k.minors(r)?.into_iter().filter(|m| !m.is_zero()).collect();
            if minors.is_empty() {
                break;
            }
            out.push(Ideal::new(ring, minors)?.canonical()?);
        }
    }
    Ok(out)
}

/// Strata on which the fiber dimension of `Im(Dφ)` (n minus the rank of the
/// kernel relation matrix) is constant. The result is a chain; the locus of
/// largest fiber dimension is at the bottom.
pub fn rank_stratification(phi: &PolynomialMorphism) -> Result<StratDatum> {
    let ring = phi.ring().clone();
    let n = ring.nvars();
    let fields = kernel_vector_fields(phi)?;
    let fit = fitting_ideals(&fields)?;
    let mut pieces = Vec::new();
    let mut labels = Vec::new();
    for r in 0..fit.len() {
        let closed = fit.get(r + 1).cloned().unwrap_or_else(|| Ideal::zero(&ring));
        let piece = LocallyClosed::new(closed, fit[r].clone())?;
        if !piece.is_empty()? {
            labels.push(format!("fiberdim{}", n - r));
            pieces.push(piece);
        }
    }
    StratDatum::new(LocallyClosed::whole(&ring), Poset::chain(labels), pieces)
}

/// A map with compatible source and target stratifications; `alpha[i]` is
/// the target index of source piece `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedMorphism {
    pub phi: PolynomialMorphism,
    pub source: StratDatum,
    pub target: StratDatum,
    pub alpha: Vec<usize>,
}

impl StratifiedMorphism {
    pub fn alpha_is_monotone(&self) -> bool {
        let n = self.source.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.source.poset.leq(a, b) || self.target.poset.leq(self.alpha[a], self.alpha[b]))
        })
    }
}

/// Stratification pieces under construction, before labels are assigned.
#[derive(Debug, Clone)]
struct Strat {
    src: Vec<LocallyClosed>,
    src_le: Vec<Vec<bool>>,
    tgt: Vec<LocallyClosed>,
    tgt_le: Vec<Vec<bool>>,
    alpha: Vec<usize>,
}

fn stack_le(lower: &[Vec<bool>], upper: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let (m, n) = (lower.len(), upper.len());
    let mut le = vec![vec![false; m + n]; m + n];
    for i in 0..m + n {
        for j in 0..m + n {
            le[i][j] = match (i < m, j < m) {
                (true, true) => lower[i][j],
                (false, false) => upper[i - m][j - m],
                (true, false) => true,
                (false, true) => false,
            };
        }
    }
    le
}

struct Ctx {
    ring: Arc<PolyRing>,
    tring: Arc<PolyRing>,
    f: Polynomial,
    fitting: Vec<Ideal>,
}

impl Ctx {
    fn trivial(&self, x: LocallyClosed, y: LocallyClosed) -> Strat {
        Strat { src: vec![x], src_le: vec![vec![true]], tgt: vec![y], tgt_le: vec![vec![true]], alpha: vec![0] }
    }

    fn empty_source(&self, y: LocallyClosed) -> Result<Strat> {
        if y.is_empty()? {
            return Ok(Strat { src: vec![], src_le: vec![], tgt: vec![], tgt_le: vec![], alpha: vec![] });
        }
        Ok(Strat { src: vec![], src_le: vec![], tgt: vec![y], tgt_le: vec![vec![true]], alpha: vec![] })
    }

    /// `U`-part above `Z`-part on both sides.
    fn target_glue(&self, u: Strat, z: Strat) -> Strat {
        let offset = z.tgt.len();
        let mut alpha = z.alpha.clone();
        alpha.extend(u.alpha.iter().map(|a| a + offset));
        let mut src = z.src;
        src.extend(u.src);
        let mut tgt = z.tgt;
        tgt.extend(u.tgt);
        Strat { src, src_le: stack_le(&z.src_le, &u.src_le), tgt, tgt_le: stack_le(&z.tgt_le, &u.tgt_le), alpha }
    }

    /// Common refinement of the two target stratifications, then source
    /// pieces indexed by `(S_Z ⊔ S_U) × T` with coordinatewise order.
    fn source_glue(&self, u: Strat, z: Strat) -> Result<Strat> {
        let mut t_idx: Vec<(usize, usize)> = Vec::new();
        let mut tgt = Vec::new();
        for i in 0..u.tgt.len() {
            for j in 0..z.tgt.len() {
                let meet = u.tgt[i].intersect(&z.tgt[j])?;
                if !meet.is_empty()? {
                    t_idx.push((i, j));
                    tgt.push(meet);
                }
            }
        }
        let tgt_le: Vec<Vec<bool>> = t_idx
            .iter()
            .map(|&(i, j)| t_idx.iter().map(|&(k, l)| u.tgt_le[i][k] && z.tgt_le[j][l]).collect())
            .collect();

        let s0_le = stack_le(&z.src_le, &u.src_le);
        // Source pieces of the stacked union, with their target component.
        let mut s0: Vec<(&LocallyClosed, bool, usize)> = Vec::new();
        for (p, &a) in z.src.iter().zip(&z.alpha) {
            s0.push((p, false, a));
        }
        for (p, &a) in u.src.iter().zip(&u.alpha) {
            s0.push((p, true, a));
        }
        let mut s_idx: Vec<(usize, usize)> = Vec::new();
        let mut src = Vec::new();
        for (si, &(piece, from_u, a)) in s0.iter().enumerate() {
            for (ti, &(i, j)) in t_idx.iter().enumerate() {
                if (from_u && i != a) || (!from_u && j != a) {
                    continue;
                }
                let pulled = tgt[ti].pullback(&self.ring, &self.f)?;
                let meet = piece.intersect(&pulled)?;
                if !meet.is_empty()? {
                    s_idx.push((si, ti));
                    src.push(meet);
                }
            }
        }
        let src_le = s_idx
            .iter()
            .map(|&(a, b)| s_idx.iter().map(|&(c, d)| s0_le[a][c] && tgt_le[b][d]).collect())
            .collect();
        let alpha = s_idx.iter().map(|&(_, t)| t).collect();
        Ok(Strat { src, src_le, tgt, tgt_le, alpha })
    }

    /// Squarefree generator of the critical values of `f` on the smooth
    /// variety `x`, as a polynomial in `t`.
    fn critical_values(&self, x: &Variety) -> Result<Polynomial> {
        let crit = x.kind.critical_ideal(&x.piece.closed, &self.f)?;
        let crit = if has_unit_generator(&x.piece.excluded) {
            crit
        } else {
            saturation_by_ideal(&crit, &x.piece.excluded)?
        };
        let n = self.ring.nvars();
        let ext = self.ring.extend(&["t"]);
        let mut gens: Vec<Polynomial> = crit.gens().iter().map(|g| g.extend_to(&ext)).collect();
        gens.push(Polynomial::var(&ext, n).sub(&self.f.extend_to(&ext)));
        let values = eliminate_to_subring(&Ideal::new(&ext, gens)?, &[n])?.canonical()?;
        match values.gens() {
            [] => Err(Error::InvalidInput("critical values are dense in the target".into())),
            [g] => {
                let g = g.embed(&self.tring, &[0]);
                if g.is_constant() {
                    Ok(g)
                } else {
                    squarefree_part(&g)
                }
            }
            _ => Err(Error::ResourceLimit("non-principal ideal of critical values".into())),
        }
    }

    fn recurse(&self, x: &LocallyClosed, y: &LocallyClosed, depth: usize) -> Result<Strat> {
        if depth > 64 {
            return Err(Error::ResourceLimit("stratification recursion too deep".into()));
        }
        let Some(v) = classify(x)? else {
            return self.empty_source(y.clone());
        };
        let x = v.piece.clone();

        // Case 4: peel the smooth locus.
        if let Some(sing) = v.kind.singular_ideal(&self.ring)? {
            let z = x.meet_closed(&sing)?;
            if !z.is_empty()? {
                let u = x.minus_closed(&sing)?;
                let su = self.recurse(&u, y, depth + 1)?;
                let sz = self.recurse(&z, y, depth + 1)?;
                return self.source_glue(su, sz);
            }
        }

        let target_dim = y.dimension()?;
        let h = if target_dim <= 0 { None } else { Some(self.critical_values(&v)?) };
        let zt = match &h {
            Some(h) if !h.is_constant() => {
                let hz = Ideal::new(&self.tring, vec![h.clone()])?;
                let zt = y.meet_closed(&hz)?;
                if zt.is_empty()? {
                    None
                } else {
                    Some((hz, zt))
                }
            }
            _ => None,
        };

        match zt {
            // Case 3: split the target at the critical values.
            Some((hz, zt)) => {
                let ut = y.minus_closed(&hz)?;
                let hf = Ideal::new(&self.ring, vec![h.unwrap().substitute(&self.ring, core::slice::from_ref(&self.f))])?;
                let su = self.recurse(&x.minus_closed(&hf)?, &ut, depth + 1)?;
                let sz = self.recurse(&x.meet_closed(&hf)?, &zt, depth + 1)?;
                Ok(self.target_glue(su, sz))
            }
            None => {
                // Cases 1 and 2: constancy of the fiber dimension of Im(Dφ).
                let mut top = 0;
                for (r, fr) in self.fitting.iter().enumerate() {
                    if x.minus_closed(fr)?.is_empty()? {
                        break;
                    }
                    top = r;
                }
                let drop_locus = &self.fitting[top];
                let z = x.meet_closed(drop_locus)?;
                if z.is_empty()? {
                    return Ok(self.trivial(x, y.clone()));
                }
                let u = x.minus_closed(drop_locus)?;
                let su = self.recurse(&u, y, depth + 1)?;
                let sz = self.recurse(&z, y, depth + 1)?;
                self.source_glue(su, sz)
            }
        }
    }
}

fn datum_from(ambient: LocallyClosed, pieces: Vec<LocallyClosed>, le: Vec<Vec<bool>>, prefix: &str) -> Result<StratDatum> {
    let labels = (0..pieces.len()).map(|i| format!("{prefix}{i}")).collect();
    let poset = Poset::from_matrix(labels, le);
    poset.check()?;
    StratDatum::new(ambient, poset, pieces)
}

/// The functorial stratification of `f: A^n -> A^1`: critical values split
/// the target, singular loci of fibers are peeled, and strata are refined
/// until the fiber dimension of `Im(Dφ)` is constant on each.
pub fn functorial_stratify(phi: &PolynomialMorphism) -> Result<StratifiedMorphism> {
    if phi.target_dim() != 1 {
        return Err(Error::PresentationUnsupported("only maps to the affine line are stratified".into()));
    }
    let ring = phi.ring().clone();
    let tring = PolyRing::new(&["t"])?;
    let fields = kernel_vector_fields(phi)?;
    let ctx = Ctx { ring: ring.clone(), tring: tring.clone(), f: phi.components()[0].clone(), fitting: fitting_ideals(&fields)? };
    let x = LocallyClosed::whole(&ring);
    let y = LocallyClosed::whole(&tring);
    let s = ctx.recurse(&x, &y, 0)?;
    let source = datum_from(x, s.src, s.src_le, "s")?;
    let target = datum_from(y, s.tgt, s.tgt_le, "t")?;
    Ok(StratifiedMorphism { phi: phi.clone(), source, target, alpha: s.alpha })
}

fn check_decomposition(whole: &LocallyClosed, u: &LocallyClosed, z: &LocallyClosed) -> Result<()> {
    let ok = u.covered_by(&[whole])?
        && z.covered_by(&[whole])?
        && u.intersect(z)?.is_empty()?
        && whole.covered_by(&[u, z])?
        && LocallyClosed::closed_set(z.closure_ideal()?).intersect(whole)?.covered_by(&[z])?;
    if ok {
        Ok(())
    } else {
        Err(Error::DecompositionMismatch("pieces are not an open/closed partition".into()))
    }
}

fn to_strat(sm: &StratifiedMorphism) -> Strat {
    let le = |p: &Poset| (0..p.len()).map(|i| (0..p.len()).map(|j| p.leq(i, j)).collect()).collect();
    Strat {
        src: sm.source.pieces.clone(),
        src_le: le(&sm.source.poset),
        tgt: sm.target.pieces.clone(),
        tgt_le: le(&sm.target.poset),
        alpha: sm.alpha.clone(),
    }
}

fn line_ctx(phi: &PolynomialMorphism, tring: &Arc<PolyRing>) -> Result<Ctx> {
    if phi.target_dim() != 1 {
        return Err(Error::PresentationUnsupported("only maps to the affine line are glued".into()));
    }
    Ok(Ctx { ring: phi.ring().clone(), tring: tring.clone(), f: phi.components()[0].clone(), fitting: Vec::new() })
}

/// Glues stratifications over an open `U` and closed `Z` of the target `y`.
/// `a` lives over `U`, `b` over `Z`; target elements of `a` end up above
/// those of `b`, and likewise on the source.
pub fn target_glue(
    x: &LocallyClosed,
    y: &LocallyClosed,
    a: &StratifiedMorphism,
    b: &StratifiedMorphism,
) -> Result<StratifiedMorphism> {
    check_decomposition(y, &a.target.ambient, &b.target.ambient)?;
    check_decomposition(x, &a.source.ambient, &b.source.ambient)?;
    let ctx = line_ctx(&a.phi, y.ring())?;
    let s = ctx.target_glue(to_strat(a), to_strat(b));
    Ok(StratifiedMorphism {
        phi: a.phi.clone(),
        source: datum_from(x.clone(), s.src, s.src_le, "s")?,
        target: datum_from(y.clone(), s.tgt, s.tgt_le, "t")?,
        alpha: s.alpha,
    })
}

/// Glues stratifications of the restrictions to an open `U` (`a`) and a
/// closed `Z` (`b`) of the source `x`.
pub fn source_glue(
    x: &LocallyClosed,
    y: &LocallyClosed,
    a: &StratifiedMorphism,
    b: &StratifiedMorphism,
) -> Result<StratifiedMorphism> {
    check_decomposition(x, &a.source.ambient, &b.source.ambient)?;
    let ctx = line_ctx(&a.phi, y.ring())?;
    let s = ctx.source_glue(to_strat(a), to_strat(b))?;
    Ok(StratifiedMorphism {
        phi: a.phi.clone(),
        source: datum_from(x.clone(), s.src, s.src_le, "s")?,
        target: datum_from(y.clone(), s.tgt, s.tgt_le, "t")?,
        alpha: s.alpha,
    })
}

/// The single-stratum stratification of `phi` restricted to `x` over `y`.
pub fn trivial_stratification(phi: &PolynomialMorphism, x: LocallyClosed, y: LocallyClosed) -> Result<StratifiedMorphism> {
    let source = StratDatum::new(x.clone(), Poset::chain(vec!["s0".into()]), vec![x])?;
    let target = StratDatum::new(y.clone(), Poset::chain(vec!["t0".into()]), vec![y])?;
    Ok(StratifiedMorphism { phi: phi.clone(), source, target, alpha: vec![0] })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub maps_into: bool,
    pub monotone: bool,
    pub smooth: Vec<bool>,
    pub submersive: Vec<bool>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.maps_into && self.monotone && self.smooth.iter().all(|&b| b) && self.submersive.iter().all(|&b| b)
    }
}

/// Exact checks that each source piece maps into its target piece, is
/// smooth, and that `φ` restricted to it is submersive onto that piece.
pub fn regularity_audit(sm: &StratifiedMorphism) -> Result<RegularityReport> {
    let f = sm.phi.components()[0].clone();
    let ring = sm.phi.ring().clone();
    let mut maps_into = true;
    let mut smooth = Vec::new();
    let mut submersive = Vec::new();
    for (p, piece) in sm.source.pieces.iter().enumerate() {
        let t = &sm.target.pieces[sm.alpha[p]];
        let pulled = t.pullback(&ring, &f)?;
        if !piece.covered_by(&[&pulled])? {
            maps_into = false;
        }
        let Some(v) = classify(piece)? else {
            smooth.push(true);
            submersive.push(true);
            continue;
        };
        let sm_ok = match v.kind.singular_ideal(&ring)? {
            None => true,
            Some(sing) => v.piece.meet_closed(&sing)?.is_empty()?,
        };
        smooth.push(sm_ok);
        let sub_ok = if t.dimension()? <= 0 {
            true
        } else {
            let crit = v.kind.critical_ideal(&v.piece.closed, &f)?;
            v.piece.meet_closed(&crit)?.is_empty()?
        };
        submersive.push(sub_ok);
    }
    Ok(RegularityReport { maps_into, monotone: sm.alpha_is_monotone(), smooth, submersive })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceStatus {
    /// The piece misses the fiber.
    Empty,
    /// Smooth of the given codimension; its conormal ideal was used.
    Audited { codim: usize },
    Unaudited(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub fiber: Vec<Rational>,
    pub pieces: Vec<(String, PieceStatus)>,
    pub fiber_dimension: i64,
    pub vertically_extendable: Option<bool>,
    pub coarse: Option<bool>,
    pub strong_thom: Option<bool>,
}

/// Compares the fiber of `B_phi` over `y` with the union of conormal
/// varieties of the pieces of `source` cut by `φ = y`. Every conormal
/// variety of a subvariety of `A^n` has dimension `n`, so a fiber of larger
/// dimension settles the first inclusion negatively even when some pieces
/// cannot be audited.
pub fn coarse_and_vertical_audit(phi: &PolynomialMorphism, source: &StratDatum, y: &[Rational]) -> Result<AuditReport> {
    let ring = phi.ring().clone();
    let n = ring.nvars();
    let b = b_phi_ideal(phi)?;
    let fiber = fiber_ideal_from(phi, &b, y)?;
    let fiber_dimension = krull_dimension(&fiber)?;
    let cot = fiber.ring().clone();
    let eqs: Vec<Polynomial> = phi
        .components()
        .iter()
        .zip(y)
        .map(|(f, yi)| f.sub(&Polynomial::constant(&ring, yi.clone())))
        .collect();
    let fiber_eqs = Ideal::new(&ring, eqs)?;

    let mut statuses = Vec::new();
    let mut conormals: Vec<Ideal> = Vec::new();
    let mut complete = true;
    for (label, piece) in source.poset.labels().iter().zip(&source.pieces) {
        let cut = piece.meet_closed(&fiber_eqs)?;
        let status = match classify(&cut) {
            Ok(None) => PieceStatus::Empty,
            Ok(Some(v)) => {
                let smooth = match v.kind.singular_ideal(&ring)? {
                    None => true,
                    Some(sing) => v.piece.meet_closed(&sing)?.is_empty()?,
                };
                if smooth {
                    let codim = v.kind.codim(n);
                    let closed = match &v.kind {
                        Kind::Points | Kind::Ambient => v.piece.closed.clone(),
                        kind => Ideal::new(&ring, kind.gens())?,
                    };
                    let cn = conormal_ideal(&closed, codim.min(closed.gens().len()))?;
                    let cn = if has_unit_generator(&v.piece.excluded) {
                        cn
                    } else {
                        saturation_by_ideal(&cn, &v.piece.excluded.extend_to(&cot))?
                    };
                    conormals.push(cn);
                    PieceStatus::Audited { codim }
                } else {
                    complete = false;
                    PieceStatus::Unaudited("piece meets the singular locus of its fiber".into())
                }
            }
            Err(Error::PresentationUnsupported(msg)) => {
                complete = false;
                PieceStatus::Unaudited(msg)
            }
            Err(e) => return Err(e),
        };
        statuses.push((label.clone(), status));
    }

    let union = if complete {
        let mut acc: Option<Ideal> = None;
        for cn in conormals {
            acc = Some(match acc {
                None => cn,
                Some(prev) => crate::groebner::ideal_intersection(&prev, &cn)?.canonical()?,
            });
        }
        Some(acc.unwrap_or_else(|| Ideal::unit(&cot)))
    } else {
        None
    };

    let vertically_extendable = if fiber_dimension > n as i64 {
        Some(false)
    } else if let Some(c) = &union {
        Some(crate::morphism::inclusion_check(&fiber, c)?)
    } else {
        None
    };
    let coarse = match &union {
        Some(c) => Some(crate::morphism::inclusion_check(c, &fiber)?),
        None => None,
    };
    let strong_thom = match (vertically_extendable, coarse) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    };
    Ok(AuditReport {
        fiber: y.to_vec(),
        pieces: statuses,
        fiber_dimension,
        vertically_extendable,
        coarse,
        strong_thom,
    })
}

/// Short human-readable description of a piece.
pub fn describe_piece(p: &LocallyClosed) -> String {
    let show = |i: &Ideal| {
        let g: Vec<String> = i.gens().iter().map(|g| g.to_string()).collect();
        format!("({})", g.join(", "))
    };
    format!("V{} \\ V{}", show(&p.closed), show(&p.excluded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn ring(names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(names).unwrap()
    }

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn poset_axioms() {
        assert!(Poset::new(labels(&["a", "b"]), &[(0, 1), (1, 0)]).is_err());
        assert!(Poset::new(labels(&["a", "b", "c"]), &[(0, 1), (1, 2)]).is_err());
        let p = Poset::generated_by(labels(&["a", "b", "c"]), &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2) && p.is_chain());
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
        let prod = Poset::product(&Poset::chain(labels(&["0", "1"])), &Poset::chain(labels(&["0", "1"])));
        assert_eq!(prod.len(), 4);
        assert!(!prod.is_chain());
        assert!(prod.leq(0, 3));
    }

    #[test]
    fn validation_examples() {
        let r = ring(&["x", "y"]);
        let open = LocallyClosed::parse(&r, &[], &["x*y"]).unwrap();
        let curve = LocallyClosed::parse(&r, &["x*y"], &["1"]).unwrap();
        let good = StratDatum::new(
            LocallyClosed::whole(&r),
            Poset::chain(labels(&["0", "1"])),
            vec![curve.clone(), open.clone()],
        )
        .unwrap();
        assert!(validate_stratification(&good).unwrap().is_valid());
        let reversed = StratDatum::new(LocallyClosed::whole(&r), Poset::chain(labels(&["1", "0"])), vec![open, curve]).unwrap();
        let rep = validate_stratification(&reversed).unwrap();
        assert!(!rep.continuous && rep.disjoint && rep.covering);
        let lines = StratDatum::new(
            LocallyClosed::whole(&r),
            Poset::antichain(labels(&["a", "b"])),
            vec![LocallyClosed::parse(&r, &["x"], &["1"]).unwrap(), LocallyClosed::parse(&r, &["y"], &["1"]).unwrap()],
        )
        .unwrap();
        let rep = validate_stratification(&lines).unwrap();
        assert!(!rep.disjoint);
    }

    #[test]
    fn reg_examples() {
        let r = ring(&["x", "y"]);
        let d = reg_stratify(&Ideal::parse(&r, &["x*y"]).unwrap(), &Presentation::Hypersurface).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.poset.is_chain());
        assert!(d.pieces[0].closed.contains(&Polynomial::parse("x", &r).unwrap()).unwrap());
        assert!(validate_stratification(&d).unwrap().is_valid());
        let d = reg_stratify(&Ideal::parse(&r, &["x^2+y^2-1"]).unwrap(), &Presentation::Hypersurface).unwrap();
        assert_eq!(d.len(), 1);
        let d = reg_stratify(&Ideal::parse(&r, &["y^2-x^3"]).unwrap(), &Presentation::Hypersurface).unwrap();
        assert_eq!(d.len(), 2);
        assert!(validate_stratification(&d).unwrap().is_valid());
        let r3 = ring(&["x", "y", "z"]);
        let bad = Ideal::parse(&r3, &["x*y", "x*z"]).unwrap();
        assert!(matches!(reg_stratify(&bad, &Presentation::CompleteIntersection(2)), Err(Error::PresentationUnsupported(_))));
    }

    #[test]
    fn rank_examples() {
        let blow = PolynomialMorphism::parse(&["x", "y"], &["x", "x*y"]).unwrap();
        assert_eq!(rank_stratification(&blow).unwrap().len(), 1);
        let constant = PolynomialMorphism::parse(&["x"], &["3"]).unwrap();
        let d = rank_stratification(&constant).unwrap();
        assert_eq!(d.poset.labels(), &["fiberdim0".to_string()]);
        let cubic = PolynomialMorphism::parse(&["x", "y", "z"], &["x^2*y*(x+y)"]).unwrap();
        let d = rank_stratification(&cubic).unwrap();
        assert_eq!(d.len(), 2);
        assert!(validate_stratification(&d).unwrap().is_valid());
    }

    #[test]
    fn functorial_examples() {
        let id = PolynomialMorphism::parse(&["x"], &["x"]).unwrap();
        let s = functorial_stratify(&id).unwrap();
        assert_eq!((s.source.len(), s.target.len()), (1, 1));

        let sq = PolynomialMorphism::parse(&["x"], &["x^2"]).unwrap();
        let s = functorial_stratify(&sq).unwrap();
        assert_eq!((s.source.len(), s.target.len()), (2, 2));
        assert!(s.source.poset.is_chain() && s.target.poset.is_chain());
        assert!(regularity_audit(&s).unwrap().is_regular());

        let node = PolynomialMorphism::parse(&["x", "y"], &["x*y"]).unwrap();
        let s = functorial_stratify(&node).unwrap();
        assert_eq!((s.source.len(), s.target.len()), (3, 2));
        assert!(s.source.poset.is_chain());
        assert!(validate_stratification(&s.source).unwrap().is_valid());
        assert!(validate_stratification(&s.target).unwrap().is_valid());
        assert!(regularity_audit(&s).unwrap().is_regular());
        let audit = coarse_and_vertical_audit(&node, &s.source, &[int(0)]).unwrap();
        assert_eq!(audit.strong_thom, Some(true));
    }

    #[test]
    fn submersion_audit() {
        let f = PolynomialMorphism::parse(&["x", "y"], &["x"]).unwrap();
        let s = functorial_stratify(&f).unwrap();
        assert_eq!(s.source.len(), 1);
        let audit = coarse_and_vertical_audit(&f, &s.source, &[int(0)]).unwrap();
        assert_eq!(audit.strong_thom, Some(true));
    }

    #[test]
    fn glue_checks_decomposition() {
        let f = PolynomialMorphism::parse(&["x"], &["x"]).unwrap();
        let r = f.ring().clone();
        let t = ring(&["t"]);
        let x = LocallyClosed::whole(&r);
        let y = LocallyClosed::whole(&t);
        let u = trivial_stratification(&f, LocallyClosed::parse(&r, &[], &["x"]).unwrap(), LocallyClosed::parse(&t, &[], &["t"]).unwrap()).unwrap();
        let z = trivial_stratification(&f, LocallyClosed::parse(&r, &["x"], &["1"]).unwrap(), LocallyClosed::parse(&t, &["t"], &["1"]).unwrap()).unwrap();
        let g = target_glue(&x, &y, &u, &z).unwrap();
        assert_eq!(g.target.poset.strict_pairs(), vec![(0, 1)]);
        assert!(g.target.pieces[1].excluded.gens()[0].to_string() == "t");
        assert!(matches!(target_glue(&x, &y, &u, &u), Err(Error::DecompositionMismatch(_))));
    }
}
