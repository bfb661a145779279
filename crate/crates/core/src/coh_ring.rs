//! The truncated ring `ℚ[λ, L_1..L_r, z, z⁻¹][H_1..H_r] / (H_i^{n_i+1})`.
//!
//! Coefficients are sparse Laurent polynomials in `λ` and `z` and polynomials
//! in the formal logarithms `L_i = log y_i`. Every series that occurs for a
//! fixed degree has finite support, so no rational-function normalisation
//! is ever needed.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fault::{self, Fault};
use crate::toric::NefToricProduct;

/// A monomial `λ^a · Π L_i^{k_i} · z^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarMonomial {
    pub lambda: i32,
    /// Sorted `(variable, power)` pairs with positive powers.
    pub logs: Vec<(usize, u32)>,
    pub z: i32,
}

impl ScalarMonomial {
    pub fn unit() -> Self {
        ScalarMonomial {
            lambda: 0,
            logs: Vec::new(),
            z: 0,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut logs = Vec::with_capacity(self.logs.len() + other.logs.len());
        let (mut a, mut b) = (self.logs.iter().peekable(), other.logs.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, p)), Some(&&(j, q))) => {
                    if i == j {
                        logs.push((i, p + q));
                        a.next();
                        b.next();
                    } else if i < j {
                        logs.push((i, p));
                        a.next();
                    } else {
                        logs.push((j, q));
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    logs.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    logs.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        ScalarMonomial {
            lambda: self.lambda + other.lambda,
            logs,
            z: self.z + other.z,
        }
    }

    pub fn log_power(&self, var: usize) -> u32 {
        self.logs
            .iter()
            .find(|&&(i, _)| i == var)
            .map_or(0, |&(_, p)| p)
    }
}

/// A coefficient: a finite `ℚ`-combination of [`ScalarMonomial`]s.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffScalar {
    terms: BTreeMap<ScalarMonomial, BigRational>,
}

impl CoeffScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c · λ^lambda · z^z`.
    pub fn monomial(c: BigRational, lambda: i32, z: i32) -> Self {
        let mut s = Self::zero();
        s.add_term(
            ScalarMonomial {
                lambda,
                logs: Vec::new(),
                z,
            },
            c,
        );
        s
    }

    pub fn lambda() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn z_power(k: i32) -> Self {
        Self::monomial(BigRational::one(), 0, k)
    }

    /// The formal logarithm `L_var`.
    pub fn log(var: usize) -> Self {
        let mut s = Self::zero();
        s.add_term(
            ScalarMonomial {
                lambda: 0,
                logs: vec![(var, 1)],
                z: 0,
            },
            BigRational::one(),
        );
        s
    }

    pub fn add_term(&mut self, m: ScalarMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ScalarMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut out = Self::zero();
        if k.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Coefficient of `z^k`, as a scalar without `z`.
    pub fn z_coefficient(&self, k: i32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.z == k {
                let mut m = m.clone();
                m.z = 0;
                out.add_term(m, c.clone());
            }
        }
        out
    }

    pub fn max_z_power(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.z).max()
    }

    pub fn min_z_power(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.z).min()
    }

    /// If the scalar is `c·λ^power` (no `L`, no `z`) return `c`; zero counts as pure.
    pub fn lambda_pure(&self, power: i32) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        (m.lambda == power && m.z == 0 && m.logs.is_empty()).then(|| c.clone())
    }

    /// `z · ∂/∂L_var`.
    pub fn z_log_derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let p = m.log_power(var);
            if p == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.logs = m
                .logs
                .iter()
                .filter_map(|&(i, q)| match (i == var, q) {
                    (true, 1) => None,
                    (true, q) => Some((i, q - 1)),
                    _ => Some((i, q)),
                })
                .collect();
            m2.z += 1;
            out.add_term(m2, c * BigRational::from_integer(BigInt::from(p)));
        }
        out
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for CoeffScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mut parts = Vec::new();
            if m.lambda != 0 {
                parts.push(format!("l^{}", m.lambda));
            }
            for &(i, p) in &m.logs {
                parts.push(format!("L{}^{p}", i + 1));
            }
            if m.z != 0 {
                parts.push(format!("z^{}", m.z));
            }
            let sep = if k == 0 {
                if c.is_negative() { "-" } else { "" }
            } else if c.is_negative() {
                " - "
            } else {
                " + "
            };
            let a = fmt_rational(&c.abs());
            if parts.is_empty() {
                write!(f, "{sep}{a}")?;
            } else if a == "1" {
                write!(f, "{sep}{}", parts.join("*"))?;
            } else {
                write!(f, "{sep}{a}*{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

/// An element of the truncated ring: exponent vectors `m ⪯ n_X` to coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPoly {
    bound: Vec<u32>,
    terms: BTreeMap<Vec<u32>, CoeffScalar>,
}

impl HPoly {
    pub fn zero(bound: &[u32]) -> Self {
        HPoly {
            bound: bound.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(bound: &[u32], c: CoeffScalar) -> Self {
        let mut p = Self::zero(bound);
        p.add_term(vec![0; bound.len()], c);
        p
    }

    pub fn one(bound: &[u32]) -> Self {
        Self::constant(bound, CoeffScalar::one())
    }

    pub fn monomial(bound: &[u32], exponent: Vec<u32>, c: CoeffScalar) -> Result<Self> {
        let mut p = Self::zero(bound);
        if !within(&exponent, bound) {
            return Err(Error::ExponentOutOfRange {
                exponent,
                bound: bound.to_vec(),
            });
        }
        p.add_term(exponent, c);
        Ok(p)
    }

    /// The hyperplane class `H_i`.
    pub fn h(bound: &[u32], i: usize) -> Self {
        let mut e = vec![0; bound.len()];
        e[i] = 1;
        let mut p = Self::zero(bound);
        if bound[i] >= 1 {
            p.add_term(e, CoeffScalar::one());
        }
        p
    }

    fn add_term(&mut self, exponent: Vec<u32>, c: CoeffScalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponent) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn bound(&self) -> &[u32] {
        &self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &CoeffScalar)> {
        self.terms.iter()
    }

    pub fn component(&self, exponent: &[u32]) -> CoeffScalar {
        self.terms.get(exponent).cloned().unwrap_or_default()
    }

    /// Coefficient of `H^0`.
    pub fn identity_component(&self) -> CoeffScalar {
        self.component(&vec![0; self.bound.len()])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.bound != other.bound {
            return Err(Error::GeometryMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&CoeffScalar::constant(-BigRational::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &CoeffScalar) -> Self {
        let mut out = Self::zero(&self.bound);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul(k));
        }
        out
    }

    /// Product in the truncated ring; terms with `m_i > n_i` are dropped.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.bound);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if within(&e, &self.bound) {
                    out.add_term(e, c1.mul(c2));
                }
            }
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&CoeffScalar) -> CoeffScalar) -> Self {
        let mut out = Self::zero(&self.bound);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// `(c·z^k + κ)^{-1} = (c z^k)^{-1} Σ_{j≥0} (-κ/(c z^k))^j` for nilpotent `κ`.
    pub fn invert_linear(c: &BigRational, z_power: i32, kappa: &HPoly) -> Result<HPoly> {
        if c.is_zero() {
            return Err(Error::ZeroLeadingScalar);
        }
        if !kappa.identity_component().is_zero() {
            return Err(Error::Structural(
                "nilpotent part has a nonzero constant term".into(),
            ));
        }
        let inv = CoeffScalar::monomial(c.recip(), 0, -z_power);
        let step = kappa.scale(&inv.neg());
        let mut power = HPoly::one(&kappa.bound);
        let mut sum = HPoly::zero(&kappa.bound);
        while !power.is_zero() {
            sum = sum.add(&power)?;
            power = power.mul(&step)?;
        }
        Ok(sum.scale(&inv))
    }
}

pub fn hpoly_mul(a: &HPoly, b: &HPoly) -> Result<HPoly> {
    a.mul(b)
}

pub fn hpoly_invert_linear(c: &BigRational, z_power: i32, kappa: &HPoly) -> Result<HPoly> {
    HPoly::invert_linear(c, z_power, kappa)
}

fn within(e: &[u32], bound: &[u32]) -> bool {
    e.len() == bound.len() && e.iter().zip(bound).all(|(a, b)| a <= b)
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*H^{e:?}")?;
        }
        Ok(())
    }
}

/// All exponent vectors `m ⪯ bound` in lexicographic order.
pub fn basis_exponents(bound: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

fn check_exponent(x: &NefToricProduct, e: &[u32]) -> Result<()> {
    if !within(e, x.dims()) {
        return Err(Error::ExponentOutOfRange {
            exponent: e.to_vec(),
            bound: x.dims().to_vec(),
        });
    }
    Ok(())
}

fn is_antidiagonal(x: &NefToricProduct, l: &[u32], m: &[u32]) -> bool {
    l.iter().zip(m).zip(x.dims()).all(|((a, b), n)| a + b == *n)
}

fn lambda_exponent(x: &NefToricProduct) -> i32 {
    (x.dim() + x.num_factors()) as i32
}

/// `η_{lm} = K / λ^{|n_X|+r_X}` when `l + m = n_X`, else 0.
pub fn eta(x: &NefToricProduct, l: &[u32], m: &[u32]) -> Result<CoeffScalar> {
    check_exponent(x, l)?;
    check_exponent(x, m)?;
    if !is_antidiagonal(x, l, m) {
        return Ok(CoeffScalar::zero());
    }
    let mut k = BigRational::from_integer(x.point_constant().clone());
    if fault::active() == Fault::EtaSign {
        k = -k;
    }
    Ok(CoeffScalar::monomial(
        k,
        -lambda_exponent(x),
        0,
    ))
}

/// `η^{lm} = λ^{|n_X|+r_X} / K` when `l + m = n_X`, else 0.
pub fn eta_inv(x: &NefToricProduct, l: &[u32], m: &[u32]) -> Result<CoeffScalar> {
    check_exponent(x, l)?;
    check_exponent(x, m)?;
    if !is_antidiagonal(x, l, m) {
        return Ok(CoeffScalar::zero());
    }
    Ok(CoeffScalar::monomial(
        BigRational::from_integer(x.point_constant().clone()).recip(),
        lambda_exponent(x),
        0,
    ))
}

/// The Gram matrix and its inverse on the basis `{H^m}`.
#[derive(Debug, Clone)]
pub struct PairingMatrix {
    pub basis: Vec<Vec<u32>>,
    pub eta: Vec<Vec<CoeffScalar>>,
    pub inverse: Vec<Vec<CoeffScalar>>,
}

impl PairingMatrix {
    pub fn new(x: &NefToricProduct) -> Result<Self> {
        let basis = basis_exponents(x.dims());
        let table = |f: fn(&NefToricProduct, &[u32], &[u32]) -> Result<CoeffScalar>| {
            basis
                .iter()
                .map(|l| basis.iter().map(|m| f(x, l, m)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        };
        Ok(PairingMatrix {
            eta: table(eta)?,
            inverse: table(eta_inv)?,
            basis,
        })
    }

    /// `η · η^{-1}`.
    pub fn product(&self) -> Vec<Vec<CoeffScalar>> {
        let n = self.basis.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = CoeffScalar::zero();
                        for k in 0..n {
                            acc.add_assign(&self.eta[i][k].mul(&self.inverse[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}
