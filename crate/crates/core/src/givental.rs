//! Per-degree terms of the equivariant I-functions of `X` and of the local
//! geometry `Tot(⊕_j O(-D_j))`, and the extraction of the local invariants.
//!
//! For `d ≠ 0` the degree-`d` coefficient of `y^d` is
//!
//! ```text
//! base:  z · e^{Σ L_i H_i / z} · Π_j Π_{m=1}^{e_j} (m z + D_j)^{-1}
//! local: z · e^{Σ L_i H_i / z} · Π_j Π_{m=0}^{e_j-1} (λ − m z − D_j) / Π_{m=1}^{e_j} (m z + D_j)
//! ```
//!
//! with `D_j = Σ_i Q_{ij} H_i` and `L_i = log y_i`. Divisors with `e_j(d) = 0`
//! contribute empty products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coh_ring::{basis_exponents, eta, CoeffScalar, HPoly};
use crate::error::{Error, Result};
use crate::toric::{CurveClass, NefToricProduct};

/// The coefficient of `y^d` in an I-function, including the expanded prefactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ISeriesTerm {
    pub degree: Vec<u64>,
    pub body: HPoly,
}

/// `D_j = Q_{ij} H_i` for the factor `i` owning divisor `j`.
fn divisor_class(x: &NefToricProduct, j: usize) -> HPoly {
    let l = x.divisor_labels()[j];
    let w = x.factors()[l.factor].weights[l.local];
    HPoly::h(x.dims(), l.factor).scale(&CoeffScalar::constant(BigRational::from_integer(
        BigInt::from(w),
    )))
}

/// `exp(Σ_i L_i H_i / z)`, truncated.
pub fn prefactor(x: &NefToricProduct) -> HPoly {
    let bound = x.dims();
    let mut out = HPoly::one(bound);
    for (i, &n) in bound.iter().enumerate() {
        // Σ_{k ≤ n_i} (L_i H_i / z)^k / k!
        let step = HPoly::h(bound, i).scale(&CoeffScalar::log(i).mul(&CoeffScalar::z_power(-1)));
        let mut power = HPoly::one(bound);
        let mut series = HPoly::one(bound);
        for k in 1..=n {
            power = power
                .mul(&step)
                .expect("same bound")
                .scale(&CoeffScalar::constant(BigRational::new(BigInt::one(), BigInt::from(k))));
            series = series.add(&power).expect("same bound");
        }
        out = out.mul(&series).expect("same bound");
    }
    out
}

/// The degree-zero term `z · exp(Σ L_i H_i / z)`, shared by both I-functions.
pub fn degree_zero_term(x: &NefToricProduct) -> ISeriesTerm {
    ISeriesTerm {
        degree: vec![0; x.num_factors()],
        body: prefactor(x).scale(&CoeffScalar::z_power(1)),
    }
}

fn hypergeometric_factor(x: &NefToricProduct, d: &CurveClass, local: bool) -> Result<HPoly> {
    let bound = x.dims();
    let e = x.tangencies(d)?;
    let mut acc = HPoly::constant(bound, CoeffScalar::z_power(1));
    for (j, &ej) in e.iter().enumerate() {
        let dj = divisor_class(x, j);
        for m in 0..ej {
            if local {
                // λ − m z − D_j
                let lin = CoeffScalar::lambda().add(
                    &CoeffScalar::monomial(BigRational::from_integer(BigInt::from(m)), 0, 1).neg(),
                );
                let factor = HPoly::constant(bound, lin).sub(&dj)?;
                acc = acc.mul(&factor)?;
            }
            let inv = HPoly::invert_linear(&BigRational::from_integer(BigInt::from(m + 1)), 1, &dj)?;
            acc = acc.mul(&inv)?;
        }
    }
    Ok(acc)
}

/// Degree-`d` term of the I-function of `X`. `d = 0` gives [`degree_zero_term`].
pub fn i_term_base(x: &NefToricProduct, d: &CurveClass) -> Result<ISeriesTerm> {
    if d.0.len() == x.num_factors() && d.0.iter().all(|&k| k == 0) {
        return Ok(degree_zero_term(x));
    }
    x.check_degree(d)?;
    let body = hypergeometric_factor(x, d, false)?.mul(&prefactor(x))?;
    Ok(ISeriesTerm {
        degree: d.0.clone(),
        body,
    })
}

/// Degree-`d` term of the I-function of the local geometry; `d ≠ 0`.
pub fn i_term_local(x: &NefToricProduct, d: &CurveClass) -> Result<ISeriesTerm> {
    x.check_degree(d)?;
    let body = hypergeometric_factor(x, d, true)?.mul(&prefactor(x))?;
    Ok(ISeriesTerm {
        degree: d.0.clone(),
        body,
    })
}

/// `Π_i (z y_i ∂_{y_i})^{l_i}` acting on a degree-`d` term.
///
/// On `y^d` each factor contributes `z d_i`; on the formal logarithm it acts
/// as `z ∂/∂L_i`.
pub fn dl_operator(x: &NefToricProduct, l: &[u32], term: &ISeriesTerm) -> Result<ISeriesTerm> {
    if l.len() != x.num_factors() || l.iter().zip(x.dims()).any(|(a, b)| a > b) {
        return Err(Error::ExponentOutOfRange {
            exponent: l.to_vec(),
            bound: x.dims().to_vec(),
        });
    }
    let mut body = term.body.clone();
    for (i, &li) in l.iter().enumerate() {
        let zd = CoeffScalar::monomial(BigRational::from_integer(BigInt::from(term.degree[i])), 0, 1);
        for _ in 0..li {
            let chain = body.map_coefficients(|c| c.z_log_derivative(i));
            body = body.scale(&zd).add(&chain)?;
        }
    }
    Ok(ISeriesTerm {
        degree: term.degree.clone(),
        body,
    })
}

/// `|n_X| + r_X`.
fn top_lambda(x: &NefToricProduct) -> i32 {
    (x.dim() + x.num_factors()) as i32
}

fn lambda_pure(d: &CurveClass, c: &CoeffScalar, power: i32) -> Result<BigRational> {
    c.lambda_pure(power).ok_or_else(|| Error::NotLambdaPure {
        degree: d.0.clone(),
        power,
        found: c.to_string(),
    })
}

/// Number of divisors with nonzero tangency, `s(d)`.
pub fn support_size(x: &NefToricProduct, d: &CurveClass) -> Result<usize> {
    Ok(x.tangencies(d)?.iter().filter(|&&k| k != 0).count())
}

/// `p_d`: the identity component of the local I-term at `z^{1-s(d)}` must be
/// `p_d · λ^{s(d)}`, where the `λ^{s(d)}` comes from the `m = 0` factors of
/// the divisors with nonzero tangency. When every tangency is positive,
/// `s(d) = |n_X| + r_X`.
pub fn p_local_series(x: &NefToricProduct, d: &CurveClass) -> Result<BigRational> {
    let term = i_term_local(x, d)?;
    let s = support_size(x, d)? as i32;
    let c = term.body.identity_component().z_coefficient(1 - s);
    lambda_pure(d, &c, s)
}

/// `q_d = η_{n_X,0} · [z^{1-r_X}] (Π_i (z y_i∂_{y_i})^{n_i} I_d)^{[0]}`.
pub fn q_local_series(x: &NefToricProduct, d: &CurveClass) -> Result<BigRational> {
    let term = i_term_local(x, d)?;
    let derived = dl_operator(x, x.dims(), &term)?;
    let top = top_lambda(x);
    let r = x.num_factors() as i32;
    let c = derived.body.identity_component().z_coefficient(1 - r);
    lambda_pure(d, &c, top)?;
    let zero = vec![0; x.num_factors()];
    let paired = eta(x, x.dims(), &zero)?.mul(&c);
    lambda_pure(d, &paired, 0)
}

/// Closed-form `p_d = (-1)^{e(d) - |n_X| - r_X} / Π°_j e_j(d)`.
///
/// When some tangency vanishes this differs from [`p_local_series`] by
/// `(-1)^{|n_X| + r_X - s(d)}`.
pub fn p_closed(x: &NefToricProduct, d: &CurveClass) -> Result<BigRational> {
    let e = x.tangencies(d)?;
    let total: u64 = e.iter().sum();
    let denom: BigInt = e.iter().filter(|&&k| k != 0).map(|&k| BigInt::from(k)).product();
    let sign_odd = (total + top_lambda(x) as u64) % 2 == 1;
    let p = BigRational::new(BigInt::one(), denom);
    Ok(if sign_odd { -p } else { p })
}

/// Closed-form `q_d = K · d^{n_X} · p_d`.
pub fn q_closed(x: &NefToricProduct, d: &CurveClass) -> Result<BigRational> {
    let k = BigRational::from_integer(x.point_constant() * x.degree_power(d));
    Ok(k * p_closed(x, d)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInvariantPair {
    pub p: BigRational,
    pub q: BigRational,
}

pub fn local_invariants_closed(x: &NefToricProduct, d: &CurveClass) -> Result<LocalInvariantPair> {
    Ok(LocalInvariantPair {
        p: p_closed(x, d)?,
        q: q_closed(x, d)?,
    })
}

pub fn local_invariants_series(x: &NefToricProduct, d: &CurveClass) -> Result<LocalInvariantPair> {
    Ok(LocalInvariantPair {
        p: p_local_series(x, d)?,
        q: q_local_series(x, d)?,
    })
}

/// All `0 < d ⪯ d_max` in lexicographic order.
pub fn degree_box(d_max: &[u64]) -> Vec<CurveClass> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for &m in d_max {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=m).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out.into_iter()
        .filter(|v| v.iter().any(|&k| k != 0))
        .map(CurveClass)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorViolation {
    pub degree: Vec<u64>,
    pub function: &'static str,
    pub component: Vec<u32>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct MirrorMapReport {
    pub degrees_checked: usize,
    /// The degree-zero term has `z^0` coefficient exactly `L_i` along `H_i`.
    pub degree_zero_ok: bool,
    pub violations: Vec<MirrorViolation>,
}

impl MirrorMapReport {
    pub fn passed(&self) -> bool {
        self.degree_zero_ok && self.violations.is_empty()
    }
}

fn low_weight_components(bound: &[u32]) -> Vec<Vec<u32>> {
    basis_exponents(bound)
        .into_iter()
        .filter(|e| e.iter().sum::<u32>() <= 1)
        .collect()
}

/// Checks that the mirror maps of `X` and of the local geometry are trivial on
/// the box `0 < d ⪯ d_max`: along `1` and every `H_i`, each degree-`d` term
/// only has powers `z^k` with `k ≤ -1` (so its `z^0` coefficient vanishes).
pub fn mirror_map_check(x: &NefToricProduct, d_max: &[u64]) -> Result<MirrorMapReport> {
    let bound = x.dims();
    let comps = low_weight_components(bound);

    let zero_term = degree_zero_term(x);
    let mut degree_zero_ok = true;
    for e in &comps {
        let c = zero_term.body.component(e).z_coefficient(0);
        let expected = match e.iter().position(|&k| k == 1) {
            Some(i) => CoeffScalar::log(i),
            None => CoeffScalar::zero(),
        };
        degree_zero_ok &= c == expected;
    }

    let mut violations = Vec::new();
    let degrees = degree_box(d_max);
    for d in &degrees {
        let terms = [("base", i_term_base(x, d)?), ("local", i_term_local(x, d)?)];
        for (name, term) in &terms {
            for e in &comps {
                let c = term.body.component(e);
                let z0 = c.z_coefficient(0);
                if !z0.is_zero() {
                    violations.push(MirrorViolation {
                        degree: d.0.clone(),
                        function: name,
                        component: e.clone(),
                        detail: format!("z^0 coefficient {z0}"),
                    });
                } else if let Some(k) = c.max_z_power().filter(|&k| k > -1) {
                    violations.push(MirrorViolation {
                        degree: d.0.clone(),
                        function: name,
                        component: e.clone(),
                        detail: format!("contains z^{k}"),
                    });
                }
            }
        }
    }
    Ok(MirrorMapReport {
        degrees_checked: degrees.len(),
        degree_zero_ok,
        violations,
    })
}
