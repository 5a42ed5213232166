use std::cmp::Ordering;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use qtrans_core::arith::{format_rational, parse_rational, rat, val_p, ExtendedValuation};
use qtrans_core::{CyclotomicNumber, MonomialOrder, PolyRing, Polynomial, PolynomialMorphism, Rational};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..40).prop_map(|(n, d)| rat(n, d))
}

fn canonical(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

fn polynomial(ring: std::sync::Arc<PolyRing>) -> impl Strategy<Value = Polynomial> {
    let n = ring.nvars();
    prop::collection::vec((prop::collection::vec(0u32..3, n), -5i64..6, 1i64..4), 0..5)
        .prop_map(move |terms| Polynomial::from_terms(&ring, terms.into_iter().map(|(m, a, b)| (m, rat(a, b))).collect()))
}

fn valuation(r: &Rational, p: u64) -> Option<i64> {
    val_p(r, p).unwrap().finite()
}

/// `Σ c_j ζ^j` in floating point.
fn complex_value(c: &CyclotomicNumber) -> (f64, f64) {
    let q = c.prime().pow(c.level()) as f64;
    c.coeffs().iter().enumerate().fold((0.0, 0.0), |(re, im), (j, a)| {
        let a = a.numer().to_string().parse::<f64>().unwrap() / a.denom().to_string().parse::<f64>().unwrap();
        let t = std::f64::consts::TAU * j as f64 / q;
        (re + a * t.cos(), im + a * t.sin())
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rational_ops_stay_canonical(a in rational(), b in rational()) {
        let mut results = vec![&a + &b, &a - &b, &a * &b];
        if !b.is_zero() {
            results.push(&a / &b);
        }
        for r in results {
            prop_assert!(canonical(&r));
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn valuation_laws(a in rational(), b in rational(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let (va, vb) = (valuation(&a, p), valuation(&b, p));
        match (va, vb) {
            (Some(x), Some(y)) => {
                prop_assert_eq!(valuation(&(&a * &b), p), Some(x + y));
                if let Some(s) = valuation(&(&a + &b), p) {
                    prop_assert!(s >= x.min(y));
                }
            }
            _ => prop_assert_eq!(val_p(&(&a * &b), p).unwrap(), ExtendedValuation::Infinite),
        }
    }

    #[test]
    fn roots_of_unity_sum_to_zero(p in prop::sample::select(vec![2u64, 3, 5, 7]), k in 1u32..4) {
        let q = p.pow(k) as i64;
        let mut acc = CyclotomicNumber::zero(p, k).unwrap();
        for e in 0..q {
            acc = acc.add(&CyclotomicNumber::root_power(p, k, e).unwrap()).unwrap();
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn cyclotomic_product_matches_complex(
        p in prop::sample::select(vec![2u64, 3, 5]),
        k in 1u32..3,
        xs in prop::collection::vec(-4i64..5, 20),
        ys in prop::collection::vec(-4i64..5, 20),
    ) {
        let deg = CyclotomicNumber::degree(p, k);
        let a = CyclotomicNumber::from_coeffs(p, k, xs[..deg].iter().map(|&c| rat(c, 1)).collect()).unwrap();
        let b = CyclotomicNumber::from_coeffs(p, k, ys[..deg].iter().map(|&c| rat(c, 1)).collect()).unwrap();
        let (ar, ai) = complex_value(&a);
        let (br, bi) = complex_value(&b);
        let (pr, pi) = complex_value(&a.mul(&b).unwrap());
        prop_assert!((pr - (ar * br - ai * bi)).abs() < 1e-9);
        prop_assert!((pi - (ar * bi + ai * br)).abs() < 1e-9);
    }

    #[test]
    fn monomial_order_axioms(
        a in prop::collection::vec(0u32..4, 4),
        b in prop::collection::vec(0u32..4, 4),
        c in prop::collection::vec(0u32..4, 4),
    ) {
        let one = vec![0u32; 4];
        let shift = |m: &[u32]| -> Vec<u32> { m.iter().zip(&c).map(|(x, y)| x + y).collect() };
        for ord in [MonomialOrder::Lex, MonomialOrder::Grevlex, MonomialOrder::elimination(2, 4)] {
            let ab = ord.cmp(&a, &b);
            prop_assert_eq!(ab, ord.cmp(&b, &a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            prop_assert_eq!(ord.cmp(&shift(&a), &shift(&b)), ab);
            prop_assert_ne!(ord.cmp(&one, &a), Ordering::Greater);
            if ab == Ordering::Less && ord.cmp(&b, &c) == Ordering::Less {
                prop_assert_eq!(ord.cmp(&a, &c), Ordering::Less);
            }
        }
    }

    #[test]
    fn parse_print_roundtrip(f in polynomial(PolyRing::new(&["x", "y", "z"]).unwrap())) {
        let text = f.to_string();
        prop_assert_eq!(Polynomial::parse(&text, f.ring()).unwrap(), f);
    }

    #[test]
    fn jacobian_chain_rule(
        outer in prop::collection::vec(polynomial(PolyRing::new(&["u", "v"]).unwrap()), 2),
        inner in prop::collection::vec(polynomial(PolyRing::new(&["x", "y", "z"]).unwrap()), 2),
        point in prop::collection::vec(rational(), 3),
        project in any::<bool>(),
    ) {
        let src = inner[0].ring().clone();
        let psi_comps = if project {
            vec![Polynomial::var(&src, 0), Polynomial::var(&src, 2)]
        } else {
            inner
        };
        let psi = PolynomialMorphism::new(&src, psi_comps).unwrap();
        let outer_ring = outer[0].ring().clone();
        let phi = PolynomialMorphism::new(&outer_ring, outer).unwrap();
        let comp = phi.compose(&psi).unwrap();
        let lhs = comp.jacobian().evaluate(&point);
        let outer_j = phi.jacobian().evaluate(&psi.evaluate(&point));
        let inner_j = psi.jacobian().evaluate(&point);
        for i in 0..2 {
            for j in 0..3 {
                let rhs = (0..2).fold(Rational::zero(), |acc, l| acc + &outer_j[i][l] * &inner_j[l][j]);
                prop_assert_eq!(&lhs[i][j], &rhs);
            }
        }
    }
}
