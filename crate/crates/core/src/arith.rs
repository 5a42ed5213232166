//! Exact integers, rationals, p-adic valuations and prime-power cyclotomic
//! numbers.
//!
//! Integers and rationals are the `num` big types. Rationals are always kept
//! in canonical form (reduced, positive denominator) by `num-rational`, and
//! print as `a/b`, or `a` when the denominator is one.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `a`, `-a` or `a/b`, no whitespace.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::SyntaxError {
        position: 0,
        message: alloc::format!("`{text}` is not a rational"),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let unsigned = num.strip_prefix('-').unwrap_or(num);
    if !digits(unsigned) || den.is_some_and(|d| !digits(d)) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    alloc::format!("{r}")
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidPrime(p))
    }
}

/// A p-adic valuation; `Infinite` is the valuation of zero and sits above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtendedValuation {
    Finite(i64),
    Infinite,
}

impl ExtendedValuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedValuation::Finite(v) => Some(v),
            ExtendedValuation::Infinite => None,
        }
    }
}

impl PartialOrd for ExtendedValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedValuation::*;
        match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl core::ops::Add for ExtendedValuation {
    type Output = ExtendedValuation;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedValuation::Finite(a), ExtendedValuation::Finite(b)) => {
                ExtendedValuation::Finite(a + b)
            }
            _ => ExtendedValuation::Infinite,
        }
    }
}

impl fmt::Display for ExtendedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValuation::Finite(v) => write!(f, "{v}"),
            ExtendedValuation::Infinite => f.write_str("inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0;
    let mut n = n.abs();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn val_p(r: &Rational, p: u64) -> Result<ExtendedValuation> {
    check_prime(p)?;
    if r.is_zero() {
        return Ok(ExtendedValuation::Infinite);
    }
    let pb = BigInt::from(p);
    Ok(ExtendedValuation::Finite(
        int_valuation(r.numer(), &pb) - int_valuation(r.denom(), &pb),
    ))
}

/// Valuation of an integer residue `x` in `Z/p^k`, capped at `k` for zero.
pub fn residue_valuation(x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// An element of Q(ζ) with ζ a primitive `p^k`-th root of unity, in the power
/// basis `1, ζ, …, ζ^(φ(p^k)-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    p: u64,
    k: u32,
    coeffs: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn degree(p: u64, k: u32) -> usize {
        (p.pow(k - 1) * (p - 1)) as usize
    }

    pub fn zero(p: u64, k: u32) -> Result<Self> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::InvalidInput("cyclotomic level must be at least 1".into()));
        }
        Ok(CyclotomicNumber {
            p,
            k,
            coeffs: vec![Rational::zero(); Self::degree(p, k)],
        })
    }

    pub fn from_rational(p: u64, k: u32, r: Rational) -> Result<Self> {
        let mut z = Self::zero(p, k)?;
        z.coeffs[0] = r;
        Ok(z)
    }

    /// Builds `Σ coeffs[j] ζ^j` from a coefficient list of exactly the basis
    /// length.
    pub fn from_coeffs(p: u64, k: u32, coeffs: Vec<Rational>) -> Result<Self> {
        let z = Self::zero(p, k)?;
        if coeffs.len() != z.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: z.coeffs.len(),
                found: coeffs.len(),
            });
        }
        Ok(CyclotomicNumber { p, k, coeffs })
    }

    /// ζ^e for any integer exponent.
    pub fn root_power(p: u64, k: u32, e: i64) -> Result<Self> {
        let modulus = p.pow(k) as i64;
        let mut sums = vec![Rational::zero(); modulus as usize];
        sums[e.rem_euclid(modulus) as usize] = Rational::one();
        Self::from_exponent_sums(p, k, sums)
    }

    /// Reduces a group-ring element `Σ_e sums[e] ζ^e`, `e ∈ Z/p^k`, into the
    /// power basis.
    pub fn from_exponent_sums(p: u64, k: u32, mut sums: Vec<Rational>) -> Result<Self> {
        let modulus = p.pow(k) as usize;
        if sums.len() != modulus {
            return Err(Error::DimensionMismatch {
                expected: modulus,
                found: sums.len(),
            });
        }
        reduce_in_place(p, k, &mut sums);
        sums.truncate(Self::degree(p, k));
        Self::from_coeffs(p, k, sums)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.k != other.k {
            Err(Error::LevelMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CyclotomicNumber { p: self.p, k: self.k, coeffs })
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            p: self.p,
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicNumber {
            p: self.p,
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Product, reduced by ζ^(p^(k-1)(p-1)) = -Σ_{j<p-1} ζ^(j p^(k-1)).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let n = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce_in_place(self.p, self.k, &mut prod);
        prod.truncate(n);
        Ok(CyclotomicNumber { p: self.p, k: self.k, coeffs: prod })
    }

    pub fn as_rational(&self) -> Result<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Ok(self.coeffs[0].clone())
        } else {
            Err(Error::NotRational)
        }
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}*z^{j}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Folds every power `≥ φ(p^k)` of ζ back into the power basis, top down.
fn reduce_in_place(p: u64, k: u32, v: &mut Vec<Rational>) {
    let step = p.pow(k - 1) as usize;
    let n = step * (p as usize - 1);
    // ζ^(p^k) = 1 first, so that a group-ring vector of any length folds.
    let modulus = step * p as usize;
    if v.len() > modulus {
        for e in (modulus..v.len()).rev() {
            let c = core::mem::take(&mut v[e]);
            if !c.is_zero() {
                v[e % modulus] += c;
            }
        }
        v.truncate(modulus);
    }
    for e in (n..v.len()).rev() {
        let c = core::mem::take(&mut v[e]);
        if c.is_zero() {
            continue;
        }
        let base = e - n;
        for j in 0..(p as usize - 1) {
            v[base + j * step] -= &c;
        }
    }
    if v.len() < n {
        v.resize(n, Rational::zero());
    }
}

/// `p^e` as a rational, negative exponents allowed.
pub fn p_power(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p);
    if e >= 0 {
        Rational::from_integer(num_traits::pow(base, e as usize))
    } else {
        Rational::new(BigInt::one(), num_traits::pow(base, (-e) as usize))
    }
}

pub fn to_i64(r: &Integer) -> Option<i64> {
    r.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, k: u32, c: &[i64]) -> CyclotomicNumber {
        let mut coeffs: Vec<Rational> = c.iter().map(|&x| int(x)).collect();
        coeffs.resize(CyclotomicNumber::degree(p, k), Rational::zero());
        CyclotomicNumber::from_coeffs(p, k, coeffs).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(val_p(&int(8), 2).unwrap(), ExtendedValuation::Finite(3));
        assert_eq!(val_p(&rat(1, 9), 3).unwrap(), ExtendedValuation::Finite(-2));
        assert_eq!(val_p(&int(0), 5).unwrap(), ExtendedValuation::Infinite);
        assert_eq!(val_p(&int(8), 4), Err(Error::InvalidPrime(4)));
        assert!(ExtendedValuation::Infinite > ExtendedValuation::Finite(1_000_000));
    }

    #[test]
    fn cyclotomic_products() {
        // p = 2, k = 1: ζ = -1.
        let zeta = CyclotomicNumber::root_power(2, 1, 1).unwrap();
        assert_eq!(zeta.mul(&zeta).unwrap(), z(2, 1, &[1]));
        let w = CyclotomicNumber::root_power(3, 1, 1).unwrap();
        assert_eq!(w.mul(&w).unwrap(), z(3, 1, &[-1, -1]));
        let one_plus_w = z(3, 1, &[1, 1]);
        let one_plus_w2 = one_plus_w.sub(&z(3, 1, &[0, 1])).unwrap().add(&w.mul(&w).unwrap()).unwrap();
        assert_eq!(one_plus_w.mul(&one_plus_w2).unwrap(), z(3, 1, &[1]));
        let other = CyclotomicNumber::root_power(3, 2, 1).unwrap();
        assert_eq!(w.mul(&other), Err(Error::LevelMismatch));
    }

    #[test]
    fn as_rational_cases() {
        let mut c = vec![rat(5, 2)];
        c.resize(2, Rational::zero());
        assert_eq!(CyclotomicNumber::from_coeffs(3, 1, c).unwrap().as_rational().unwrap(), rat(5, 2));
        let sum = CyclotomicNumber::from_exponent_sums(3, 1, vec![int(1), int(1), int(1)]).unwrap();
        assert_eq!(sum.as_rational().unwrap(), int(0));
        let w = CyclotomicNumber::root_power(3, 1, 1).unwrap();
        assert_eq!(w.as_rational(), Err(Error::NotRational));
    }

    #[test]
    fn full_root_sums_vanish() {
        for (p, k) in [(2u64, 1u32), (2, 3), (3, 2), (5, 1), (5, 2), (7, 1)] {
            let m = p.pow(k) as usize;
            let s = CyclotomicNumber::from_exponent_sums(p, k, vec![int(1); m]).unwrap();
            assert!(s.is_zero(), "p={p} k={k}");
        }
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1 /2").is_err());
        assert!(parse_rational("").is_err());
    }
}
