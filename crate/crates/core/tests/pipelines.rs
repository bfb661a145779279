use std::collections::BTreeMap;

use loglocal_core::coh_ring::CoeffScalar;
use loglocal_core::givental::{degree_box, i_term_base, i_term_local, p_local_series, q_local_series};
use loglocal_core::toric::{product_from_json, CurveClass, FwpsFactor, NefToricProduct};
use loglocal_core::tropical::{build_q_curve, build_q_curve_with_order, multiplicity};
use loglocal_core::verify::{fleet, sweep, verify_degree};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Polynomials in `(λ, z)` keyed by `(λ power, z power)`.
type Poly = BTreeMap<(i32, i32), BigRational>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(l1, z1), c1) in a {
        for (&(l2, z2), c2) in b {
            *out.entry((l1 + l2, z1 + z2)).or_insert_with(BigRational::zero) += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `z Π°_j Π_{m<e_j} (λ - m z) / (z^{e(d)} Π°_j e_j!)`, computed without the
/// truncated ring.
fn identity_oracle(e: &[u64]) -> Poly {
    let mut acc = Poly::from([((0, 1), BigRational::one())]);
    let mut factorials = BigInt::one();
    let mut total = 0i32;
    for &ej in e.iter().filter(|&&k| k > 0) {
        for m in 0..ej {
            let mut lin = Poly::from([((1, 0), BigRational::one())]);
            if m > 0 {
                lin.insert((0, 1), BigRational::from_integer(-BigInt::from(m)));
            }
            acc = poly_mul(&acc, &lin);
            factorials *= m + 1;
        }
        total += ej as i32;
    }
    acc.into_iter()
        .map(|((l, z), c)| ((l, z - total), c / BigRational::from_integer(factorials.clone())))
        .collect()
}

fn as_scalar(p: &Poly) -> CoeffScalar {
    p.iter()
        .fold(CoeffScalar::zero(), |acc, (&(l, z), c)| acc.add(&CoeffScalar::monomial(c.clone(), l, z)))
}

#[test]
fn identity_component_matches_product_formula() {
    for (name, x) in fleet() {
        let bound = vec![3; x.num_factors()];
        for d in degree_box(&bound) {
            let e = x.tangencies(&d).unwrap();
            let term = i_term_local(&x, &d).unwrap();
            assert_eq!(
                term.body.identity_component(),
                as_scalar(&identity_oracle(&e)),
                "{name} d={d}"
            );
        }
    }
}

#[test]
fn base_identity_component_is_pure_z_power() {
    // without the λ-numerator only 1/(z^{e} Π° e_j!) · z survives
    for (name, x) in fleet() {
        for d in degree_box(&vec![2; x.num_factors()]) {
            let e = x.tangencies(&d).unwrap();
            let total: u64 = e.iter().sum();
            let fact: BigInt = e
                .iter()
                .map(|&k| (1..=k).map(BigInt::from).product::<BigInt>())
                .product();
            let expected = CoeffScalar::monomial(BigRational::new(BigInt::one(), fact), 0, 1 - total as i32);
            assert_eq!(i_term_base(&x, &d).unwrap().body.identity_component(), expected, "{name} d={d}");
        }
    }
}

#[test]
fn q_is_k_dn_p_for_series() {
    for (name, x) in fleet() {
        for d in degree_box(&vec![3; x.num_factors()]) {
            let p = p_local_series(&x, &d).unwrap();
            let q = q_local_series(&x, &d).unwrap();
            let k = BigRational::from_integer(x.point_constant() * x.degree_power(&d));
            assert_eq!(q, k * p, "{name} d={d}");
        }
    }
}

#[test]
fn sweep_is_lexicographic_and_deterministic() {
    let x = fleet().into_iter().find(|g| g.0 == "P1xP2").unwrap().1;
    let a = sweep(&x, &[2, 3]).unwrap();
    let b = sweep(&x, &[2, 3]).unwrap();
    assert_eq!(a, b);
    let ds: Vec<Vec<u64>> = a.reports.iter().map(|r| r.d.clone()).collect();
    let mut sorted = ds.clone();
    sorted.sort();
    assert_eq!(ds, sorted);
    assert_eq!(ds.len(), 11);
    assert!(a.passed());
}

#[test]
fn every_fleet_sweep_passes() {
    for (name, x) in fleet() {
        let s = sweep(&x, &vec![3; x.num_factors()]).unwrap();
        assert!(s.passed(), "{name}: {:?}", s.summary);
    }
}

#[test]
fn weighted_product_from_config() {
    let x = product_from_json(r#"{"factors":[{"weights":[1,1]},{"weights":[1,1,2]}]}"#).unwrap();
    assert_eq!(x.point_constant(), &BigInt::from(2));
    let r = verify_degree(&x, &CurveClass::new(&[2, 1])).unwrap();
    // K d^n = 2 · 2 · 1
    assert_eq!(r.rq_tropical, BigRational::from_integer(4.into()));
    assert!(r.matches, "{:?}", r.failures);
}

#[test]
fn larger_weights() {
    let x = NefToricProduct::new(vec![FwpsFactor::from_weights(&[1, 2, 3]).unwrap()]).unwrap();
    for d in 1..=3u64 {
        let r = verify_degree(&x, &CurveClass::new(&[d])).unwrap();
        assert!(r.matches, "d={d}: {:?}", r.failures);
        assert_eq!(r.rq_closed, BigRational::from_integer(BigInt::from(6 * d * d)));
    }
    let x = NefToricProduct::new(vec![FwpsFactor::from_weights(&[1, 1, 1, 2]).unwrap()]).unwrap();
    let r = verify_degree(&x, &CurveClass::new(&[2])).unwrap();
    assert!(r.matches, "{:?}", r.failures);
}

fn p3() -> NefToricProduct {
    NefToricProduct::new(vec![FwpsFactor::projective(3)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn attachment_order_does_not_matter(order in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(), d1 in 1u64..=2, d2 in 1u64..=2) {
        let x = NefToricProduct::new(vec![FwpsFactor::projective(2), FwpsFactor::from_weights(&[1, 1, 1, 2]).unwrap()]).unwrap();
        let d = CurveClass::new(&[d1, d2]);
        let base = multiplicity(&build_q_curve(&x, &d).unwrap()).unwrap();
        let permuted = multiplicity(&build_q_curve_with_order(&x, &d, &order).unwrap()).unwrap();
        prop_assert_eq!(base, permuted);
    }

    #[test]
    fn p3_correspondence(d in 1u64..=6) {
        let r = verify_degree(&p3(), &CurveClass::new(&[d])).unwrap();
        prop_assert!(r.matches);
        prop_assert_eq!(r.rq_tropical, BigRational::from_integer(BigInt::from(d).pow(3)));
    }
}
