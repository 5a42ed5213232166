//! Polynomial maps between affine spaces and the cotangent objects attached
//! to them: kernel vector fields, the pairing ideal `B_phi` in the cotangent
//! ring, fiber ideals of its projection, the fiber-dimension verdict, the
//! dagger correspondence along a submersion, and conormal ideals.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::groebner::{
    eliminate_to_subring, elimination, groebner_basis, krull_dimension, radical_membership_with, syzygy_basis,
    Ideal, ModuleBasis,
};
use crate::poly::{rational_rank, MonomialOrder, PolyMatrix, PolyRing, Polynomial};

/// A map `A^n -> A^m` given by `m` polynomials in `n` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialMorphism {
    ring: Arc<PolyRing>,
    components: Vec<Polynomial>,
}

impl PolynomialMorphism {
    pub fn new(ring: &Arc<PolyRing>, components: Vec<Polynomial>) -> Result<Self> {
        if ring.nvars() == 0 {
            return Err(Error::InvalidInput("morphism needs at least one source variable".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidInput("morphism needs at least one component".into()));
        }
        if components.iter().any(|c| c.ring() != ring) {
            return Err(Error::RingMismatch);
        }
        Ok(PolynomialMorphism { ring: ring.clone(), components })
    }

    pub fn parse<S: AsRef<str>, T: AsRef<str>>(vars: &[S], components: &[T]) -> Result<Self> {
        let ring = PolyRing::new(vars)?;
        let comps = components.iter().map(|c| Polynomial::parse(c.as_ref(), &ring)).collect::<Result<Vec<_>>>()?;
        Self::new(&ring, comps)
    }

    pub fn identity(ring: &Arc<PolyRing>) -> Self {
        let comps = (0..ring.nvars()).map(|i| Polynomial::var(ring, i)).collect();
        PolynomialMorphism { ring: ring.clone(), components: comps }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
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

    /// `m x n` Jacobian matrix.
    pub fn jacobian(&self) -> PolyMatrix {
        let rows = self
            .components
            .iter()
            .map(|f| (0..self.source_dim()).map(|j| f.partial_derivative(j)).collect())
            .collect();
        PolyMatrix::from_rows(&self.ring, rows).expect("jacobian rows have equal length")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolynomialMorphism) -> Result<PolynomialMorphism> {
        if inner.target_dim() != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), found: inner.target_dim() });
        }
        let comps = self.components.iter().map(|f| f.substitute(&inner.ring, &inner.components)).collect();
        PolynomialMorphism::new(&inner.ring, comps)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Vec<Rational> {
        self.components.iter().map(|f| f.evaluate(point)).collect()
    }
}

/// Generators of the module of polynomial vector fields killed by `Dφ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelFields {
    ring: Arc<PolyRing>,
    gens: Vec<Vec<Polynomial>>,
}

impl KernelFields {
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Vec<Polynomial>>) -> Result<Self> {
        let n = ring.nvars();
        for g in &gens {
            if g.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.len() });
            }
        }
        Ok(KernelFields { ring: ring.clone(), gens })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Vec<Polynomial>] {
        &self.gens
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// The `n x s` relation matrix whose columns are the generators.
    pub fn relation_matrix(&self) -> Option<PolyMatrix> {
        if self.gens.is_empty() {
            return None;
        }
        let n = self.ring.nvars();
        let rows = (0..n).map(|i| self.gens.iter().map(|g| g[i].clone()).collect()).collect();
        PolyMatrix::from_rows(&self.ring, rows).ok()
    }

    /// Dimension of the fiber of `Im(Dφ)` at `point`: `n` minus the rank of
    /// the relation matrix there.
    pub fn image_fiber_dimension(&self, point: &[Rational]) -> usize {
        let n = self.ring.nvars();
        let rows: Vec<Vec<Rational>> = self.gens.iter().map(|g| g.iter().map(|c| c.evaluate(point)).collect()).collect();
        n - rational_rank(rows)
    }

    /// Whether both generator sets span the same submodule.
    pub fn same_module(&self, other: &[Vec<Polynomial>]) -> Result<bool> {
        let n = self.ring.nvars();
        let mine = ModuleBasis::new(&self.ring, n, &self.gens)?;
        let theirs = ModuleBasis::new(&self.ring, n, other)?;
        for g in other {
            if !mine.contains(g)? {
                return Ok(false);
            }
        }
        for g in &self.gens {
            if !theirs.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The ideal of pairings `⟨v, ξ⟩` over kernel generators `v`, living in the
/// cotangent ring `Q[x, ξ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BPhiIdeal {
    ideal: Ideal,
    fields: KernelFields,
}

impl BPhiIdeal {
    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn fields(&self) -> &KernelFields {
        &self.fields
    }

    pub fn into_ideal(self) -> Ideal {
        self.ideal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    QuasiTransitiveAtFiber,
    NotQuasiTransitiveAtFiber,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::QuasiTransitiveAtFiber => "quasi_transitive_at_fiber",
            Verdict::NotQuasiTransitiveAtFiber => "not_quasi_transitive_at_fiber",
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QtReport {
    pub fiber: Vec<Rational>,
    pub fiber_dimension: i64,
    pub source_dimension: usize,
    pub verdict: Verdict,
    /// Reduced grevlex basis of the fiber ideal.
    pub certificate: Vec<Polynomial>,
}

pub fn kernel_vector_fields(phi: &PolynomialMorphism) -> Result<KernelFields> {
    let jac = phi.jacobian();
    let columns: Vec<Vec<Polynomial>> = (0..phi.source_dim()).map(|j| jac.column(j)).collect();
    let syz = syzygy_basis(&phi.ring, &columns)?;
    KernelFields::new(&phi.ring, syz.into_generators())
}

/// Pairings of the given fields with the cotangent coordinates.
pub fn pairing_ideal(fields: &KernelFields) -> Result<Ideal> {
    let ring = fields.ring();
    let n = ring.nvars();
    let cot = ring.cotangent();
    let gens = fields
        .generators()
        .iter()
        .map(|v| {
            v.iter().enumerate().fold(Polynomial::zero(&cot), |acc, (j, c)| {
                acc.add(&c.extend_to(&cot).mul(&Polynomial::var(&cot, n + j)))
            })
        })
        .collect();
    Ideal::new(&cot, gens)
}

pub fn b_phi_ideal(phi: &PolynomialMorphism) -> Result<BPhiIdeal> {
    let fields = kernel_vector_fields(phi)?;
    let ideal = pairing_ideal(&fields)?;
    Ok(BPhiIdeal { ideal, fields })
}

fn fiber_equations(phi: &PolynomialMorphism, y: &[Rational], ring: &Arc<PolyRing>) -> Result<Vec<Polynomial>> {
    if y.len() != phi.target_dim() {
        return Err(Error::DimensionMismatch { expected: phi.target_dim(), found: y.len() });
    }
    Ok(phi
        .components
        .iter()
        .zip(y)
        .map(|(f, yi)| f.extend_to(ring).sub(&Polynomial::constant(ring, yi.clone())))
        .collect())
}

/// `B_phi + (φ_i - y_i)` in the cotangent ring.
pub fn fiber_ideal(phi: &PolynomialMorphism, y: &[Rational]) -> Result<Ideal> {
    let b = b_phi_ideal(phi)?;
    fiber_ideal_from(phi, &b, y)
}

pub fn fiber_ideal_from(phi: &PolynomialMorphism, b: &BPhiIdeal, y: &[Rational]) -> Result<Ideal> {
    let ring = b.ideal.ring().clone();
    b.ideal.with(fiber_equations(phi, y, &ring)?)
}

pub fn qt_check_at(phi: &PolynomialMorphism, y: &[Rational]) -> Result<QtReport> {
    let fiber = fiber_ideal(phi, y)?;
    let gb = groebner_basis(&fiber, &MonomialOrder::Grevlex)?;
    let dim = crate::groebner::dimension_from_basis(&gb);
    let n = phi.source_dim();
    let verdict = if dim <= n as i64 { Verdict::QuasiTransitiveAtFiber } else { Verdict::NotQuasiTransitiveAtFiber };
    Ok(QtReport {
        fiber: y.to_vec(),
        fiber_dimension: dim,
        source_dimension: n,
        verdict,
        certificate: gb.polynomials().to_vec(),
    })
}

/// Fiber dimension of `B_phi -> A^m` over a dense subset of the image:
/// dimension of the incidence variety minus dimension of its image.
pub fn generic_fiber_dimension(phi: &PolynomialMorphism) -> Result<i64> {
    let b = b_phi_ideal(phi)?;
    let cot = b.ideal.ring().clone();
    let m = phi.target_dim();
    let ynames: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
    let ring = cot.extend(&ynames);
    let base = cot.nvars();
    let mut gens: Vec<Polynomial> = b.ideal.gens().iter().map(|g| g.extend_to(&ring)).collect();
    for (i, f) in phi.components.iter().enumerate() {
        gens.push(Polynomial::var(&ring, base + i).sub(&f.extend_to(&ring)));
    }
    let incidence = Ideal::new(&ring, gens)?;
    let total = krull_dimension(&incidence)?;
    let keep: Vec<usize> = (base..base + m).collect();
    let image = eliminate_to_subring(&incidence, &keep)?;
    Ok(total - krull_dimension(&image)?)
}

/// Pulls a subvariety `W` of `T*A^m` (an ideal in the target cotangent ring)
/// back along the submersion `ψ`: impose `W(ψ(x), η)` and `ξ = Jac(ψ)^T η`,
/// then eliminate `η`.
pub fn dagger_pullback(psi: &PolynomialMorphism, w: &Ideal) -> Result<Ideal> {
    let n = psi.source_dim();
    let m = psi.target_dim();
    if w.ring().nvars() != 2 * m {
        return Err(Error::DimensionMismatch { expected: 2 * m, found: w.ring().nvars() });
    }
    let jac = psi.jacobian();
    if m > n || jac.minors(m)?.iter().all(Polynomial::is_zero) {
        return Err(Error::NotSubmersion);
    }
    let cot = psi.ring.cotangent();
    let etas: Vec<String> = (1..=m).map(|i| format!("eta{i}")).collect();
    let ring = cot.extend(&etas);
    let eta = |i: usize| Polynomial::var(&ring, 2 * n + i);
    let mut images: Vec<Polynomial> = psi.components.iter().map(|f| f.extend_to(&ring)).collect();
    images.extend((0..m).map(eta));
    let mut gens: Vec<Polynomial> = w.gens().iter().map(|g| g.substitute(&ring, &images)).collect();
    for j in 0..n {
        let mut rel = Polynomial::var(&ring, n + j);
        for i in 0..m {
            rel = rel.sub(&jac.get(i, j).extend_to(&ring).mul(&eta(i)));
        }
        gens.push(rel);
    }
    let keep: Vec<usize> = (0..2 * n).collect();
    let elim = elimination(&Ideal::new(&ring, gens)?, &keep)?;
    let out = elim.gens().iter().map(|g| g.restrict_to(&cot, &keep).expect("eta eliminated")).collect();
    Ideal::new(&cot, out)
}

/// `S + (c+1)-minors of [Jac(S); ξ]` in the cotangent ring of `S`'s ring.
pub fn conormal_ideal(s: &Ideal, codim: usize) -> Result<Ideal> {
    let ring = s.ring();
    let n = ring.nvars();
    let r = s.gens().len();
    if codim > r {
        return Err(Error::SizeOutOfRange { size: codim + 1, rows: r + 1, cols: n });
    }
    let cot = ring.cotangent();
    let mut rows: Vec<Vec<Polynomial>> = s
        .gens()
        .iter()
        .map(|g| (0..n).map(|j| g.partial_derivative(j).extend_to(&cot)).collect())
        .collect();
    rows.push((0..n).map(|j| Polynomial::var(&cot, n + j)).collect());
    let base = s.extend_to(&cot);
    if codim + 1 > n {
        return Ok(base);
    }
    let stacked = PolyMatrix::from_rows(&cot, rows)?;
    base.with(stacked.minors(codim + 1)?)
}

/// `V(A) ⊆ V(B)`: every generator of `B` vanishes on `V(A)`.
pub fn inclusion_check(a: &Ideal, b: &Ideal) -> Result<bool> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch);
    }
    let gb = groebner_basis(a, &MonomialOrder::Grevlex)?;
    for g in b.gens() {
        if !radical_membership_with(g, a, &gb)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mutual inclusion of zero sets.
pub fn same_variety(a: &Ideal, b: &Ideal) -> Result<bool> {
    Ok(inclusion_check(a, b)? && inclusion_check(b, a)?)
}

/// Canonical one-line text of a vector field, e.g. `(x, -y, 0)`.
pub fn format_field(v: &[Polynomial]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Coordinate projection `A^{n+k} -> A^n` onto the first `n` variables.
pub fn coordinate_projection(ring: &Arc<PolyRing>, n: usize) -> Result<PolynomialMorphism> {
    if n == 0 || n > ring.nvars() {
        return Err(Error::InvalidInput(format!("cannot project {} variables onto {n}", ring.nvars())));
    }
    PolynomialMorphism::new(ring, (0..n).map(|i| Polynomial::var(ring, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn morph(vars: &[&str], comps: &[&str]) -> PolynomialMorphism {
        PolynomialMorphism::parse(vars, comps).unwrap()
    }

    fn zeros(m: usize) -> Vec<Rational> {
        vec![int(0); m]
    }

    #[test]
    fn kernels() {
        let blow = morph(&["x", "y"], &["x", "x*y"]);
        assert!(kernel_vector_fields(&blow).unwrap().is_empty());

        let cubic = morph(&["x", "y", "z"], &["x^2*y*(x+y)"]);
        let k = kernel_vector_fields(&cubic).unwrap();
        let r = cubic.ring();
        let p = |s: &str| Polynomial::parse(s, r).unwrap();
        let expected = vec![vec![p("x*(x+2*y)"), p("-y*(3*x+2*y)"), p("0")], vec![p("0"), p("0"), p("1")]];
        assert!(k.same_module(&expected).unwrap());

        let constant = morph(&["x"], &["5"]);
        let k = kernel_vector_fields(&constant).unwrap();
        assert_eq!(pairing_ideal(&k).unwrap().canonical().unwrap().gens()[0].to_string(), "xi1");
    }

    #[test]
    fn fiber_dimensions() {
        let id = morph(&["x"], &["x"]);
        assert_eq!(qt_check_at(&id, &zeros(1)).unwrap().fiber_dimension, 1);
        let blow = morph(&["x", "y"], &["x", "x*y"]);
        let rep = qt_check_at(&blow, &zeros(2)).unwrap();
        assert_eq!(rep.fiber_dimension, 3);
        assert_eq!(rep.verdict, Verdict::NotQuasiTransitiveAtFiber);
        let cubic = morph(&["x", "y", "z"], &["x^2*y*(x+y)"]);
        let rep = qt_check_at(&cubic, &zeros(1)).unwrap();
        assert_eq!(rep.fiber_dimension, 3);
        assert_eq!(rep.verdict, Verdict::QuasiTransitiveAtFiber);
    }

    #[test]
    fn generic_dimensions() {
        assert_eq!(generic_fiber_dimension(&morph(&["x", "y"], &["x"])).unwrap(), 2);
        assert_eq!(generic_fiber_dimension(&morph(&["x"], &["x"])).unwrap(), 1);
    }

    #[test]
    fn conormals() {
        let r = PolyRing::new(&["x", "y"]).unwrap();
        let s = Ideal::parse(&r, &["x", "y"]).unwrap();
        assert_eq!(conormal_ideal(&s, 2).unwrap(), s.extend_to(&r.cotangent()));
        let cn = conormal_ideal(&Ideal::parse(&r, &["x"]).unwrap(), 1).unwrap().canonical().unwrap();
        let names: Vec<String> = cn.gens().iter().map(|g| g.to_string()).collect();
        assert_eq!(names, vec!["xi2", "x"]);
        let cn = conormal_ideal(&Ideal::parse(&r, &["x^2 + y^2 - 1"]).unwrap(), 1).unwrap();
        let cot = r.cotangent();
        let expected = Ideal::parse(&cot, &["x^2 + y^2 - 1", "2*x*xi2 - 2*y*xi1"]).unwrap();
        assert!(same_variety(&cn, &expected).unwrap());
        assert!(matches!(conormal_ideal(&Ideal::parse(&r, &["x"]).unwrap(), 2), Err(Error::SizeOutOfRange { .. })));
    }

    #[test]
    fn inclusions() {
        let r = PolyRing::new(&["x", "y"]).unwrap();
        let i = |g: &[&str]| Ideal::parse(&r, g).unwrap();
        assert!(inclusion_check(&i(&["x^2"]), &i(&["x"])).unwrap());
        assert!(inclusion_check(&i(&["x"]), &i(&["x*y"])).unwrap());
        assert!(!inclusion_check(&i(&["x*y"]), &i(&["x"])).unwrap());
    }

    #[test]
    fn dagger_of_projection() {
        let pr = morph(&["x", "y", "t"], &["x", "y"]);
        let target = PolyRing::new(&["x", "y"]).unwrap().cotangent();
        let w = Ideal::parse(&target, &["x*xi1 - y*xi2"]).unwrap();
        let pulled = dagger_pullback(&pr, &w).unwrap();
        let cot = pr.ring().cotangent();
        let expected = Ideal::parse(&cot, &["x*xi1 - y*xi2", "xi3"]).unwrap();
        assert!(same_variety(&pulled, &expected).unwrap());
        assert!(dagger_pullback(&pr, &Ideal::unit(&target)).unwrap().is_unit().unwrap());
        let whole = dagger_pullback(&pr, &Ideal::zero(&target)).unwrap().canonical().unwrap();
        assert_eq!(whole.gens()[0].to_string(), "xi3");
        let flat = morph(&["x", "y"], &["0"]);
        let w1 = PolyRing::new(&["u"]).unwrap().cotangent();
        assert_eq!(dagger_pullback(&flat, &Ideal::zero(&w1)), Err(Error::NotSubmersion));
    }

    #[test]
    fn composition() {
        let f = morph(&["u", "v"], &["u*v"]);
        let pr = morph(&["x", "y", "t"], &["x", "y"]);
        let c = f.compose(&pr).unwrap();
        assert_eq!(c.components()[0].to_string(), "x*y");
    }
}
