//! Products of fake weighted projective spaces and their curve classes.
//!
//! Divisors are numbered globally in a fixed order: first the non-last
//! divisors of every factor (factor 0's `n_0` divisors, then factor 1's, ...),
//! then the last divisor of each factor in factor order. The last `r_X`
//! global divisors therefore come from distinct factors, and the first
//! `|n_X|` rays form a basis of `N_ℝ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result, Violation};
use crate::lattice::{is_primitive, lattice_index, wps_fan_from_weights, IntVector};

/// One factor `P^G(w)`: weights, primitive rays in ℤ^n and the order of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FwpsFactor {
    pub weights: Vec<u64>,
    pub rays: Vec<IntVector>,
    pub group_order: u64,
}

impl FwpsFactor {
    /// A true weighted projective space; rays are built from the weights.
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        Ok(FwpsFactor {
            weights: weights.to_vec(),
            rays: wps_fan_from_weights(weights)?,
            group_order: 1,
        })
    }

    pub fn with_rays(weights: &[u64], rays: &[Vec<i64>], group_order: u64) -> Self {
        FwpsFactor {
            weights: weights.to_vec(),
            rays: rays.iter().map(|r| IntVector::from_i64s(r)).collect(),
            group_order,
        }
    }

    /// `P^n` with the standard fan.
    pub fn projective(n: usize) -> Self {
        let mut rays: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
        rays.push(IntVector(vec![-BigInt::one(); n]));
        FwpsFactor {
            weights: vec![1; n + 1],
            rays,
            group_order: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len().saturating_sub(1)
    }
}

/// Validation outcome for a list of factors.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `|G_i|` recomputed as `lattice_index(first n_i rays) / w_last`, when defined.
    pub recomputed_group_orders: Vec<Option<String>>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_factors(factors: &[FwpsFactor]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut orders = Vec::new();
    if factors.is_empty() {
        violations.push(Violation {
            factor: 0,
            rule: "nonempty",
            detail: "at least one factor is required".into(),
        });
    }
    for (i, f) in factors.iter().enumerate() {
        let mut bad = |rule: &'static str, detail: String| {
            violations.push(Violation {
                factor: i,
                rule,
                detail,
            })
        };
        let n = f.dim();
        if f.weights.len() < 2 {
            bad("dimension", "a factor needs at least two weights".into());
            orders.push(None);
            continue;
        }
        if f.weights.contains(&0) {
            bad("weights-positive", format!("{:?}", f.weights));
        }
        let g = f.weights.iter().fold(0u64, |g, w| g.gcd(w));
        if g != 1 {
            bad("weights-gcd", format!("gcd of {:?} is {g}", f.weights));
        }
        if f.group_order == 0 {
            bad("group-order", "group order must be positive".into());
        }
        if f.rays.len() != f.weights.len() {
            bad(
                "ray-count",
                format!("{} rays for {} weights", f.rays.len(), f.weights.len()),
            );
            orders.push(None);
            continue;
        }
        if let Some(r) = f.rays.iter().find(|r| r.len() != n) {
            bad("ray-dimension", format!("ray {r} does not lie in Z^{n}"));
            orders.push(None);
            continue;
        }
        for (j, r) in f.rays.iter().enumerate() {
            match is_primitive(r) {
                Ok(true) => {}
                Ok(false) => bad("ray-primitive", format!("ray {} = {r} is not primitive", j + 1)),
                Err(_) => bad("ray-primitive", format!("ray {} is zero", j + 1)),
            }
        }
        let mut sum = IntVector::zeros(n);
        for (r, &w) in f.rays.iter().zip(&f.weights) {
            sum.add_assign_scaled(r, &BigInt::from(w));
        }
        if !sum.is_zero() {
            bad("weight-relation", format!("sum of w_j * ray_j is {sum}, not 0"));
        }
        let w_last = BigInt::from(*f.weights.last().unwrap());
        let recomputed = match lattice_index(&f.rays[..n], n) {
            Ok(idx) => {
                if w_last.is_zero() || !idx.is_multiple_of(&w_last) {
                    bad(
                        "group-order",
                        format!("index {idx} of the first {n} rays is not a multiple of {w_last}"),
                    );
                    None
                } else {
                    let order = idx / &w_last;
                    if order != BigInt::from(f.group_order) {
                        bad(
                            "group-order",
                            format!("declared {} but rays give {order}", f.group_order),
                        );
                    }
                    Some(order.to_string())
                }
            }
            Err(_) => {
                bad("group-order", format!("first {n} rays are linearly dependent"));
                None
            }
        };
        orders.push(recomputed);
    }
    ValidationReport {
        violations,
        recomputed_group_orders: orders,
    }
}

/// Which factor a global divisor belongs to and its position inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisorLabel {
    pub factor: usize,
    pub local: usize,
}

/// A validated product `X = Π P^{G_i}(w^{(i)})` with derived data.
#[derive(Debug, Clone)]
pub struct NefToricProduct {
    factors: Vec<FwpsFactor>,
    dims: Vec<u32>,
    labels: Vec<DivisorLabel>,
    rays: Vec<IntVector>,
    point_constant: BigInt,
}

impl NefToricProduct {
    pub fn new(factors: Vec<FwpsFactor>) -> Result<Self> {
        let report = validate_factors(&factors);
        if !report.is_valid() {
            return Err(Error::InvalidGeometry(report.violations));
        }
        let dims: Vec<u32> = factors.iter().map(|f| f.dim() as u32).collect();
        let total: usize = dims.iter().map(|&n| n as usize).sum();

        let mut labels = Vec::with_capacity(total + factors.len());
        for (i, f) in factors.iter().enumerate() {
            labels.extend((0..f.dim()).map(|k| DivisorLabel { factor: i, local: k }));
        }
        for (i, f) in factors.iter().enumerate() {
            labels.push(DivisorLabel {
                factor: i,
                local: f.dim(),
            });
        }

        let offsets: Vec<usize> = dims
            .iter()
            .scan(0usize, |acc, &n| {
                let o = *acc;
                *acc += n as usize;
                Some(o)
            })
            .collect();
        let rays = labels
            .iter()
            .map(|l| {
                let mut v = IntVector::zeros(total);
                let local = &factors[l.factor].rays[l.local];
                for (k, x) in local.iter().enumerate() {
                    v.0[offsets[l.factor] + k] = x.clone();
                }
                v
            })
            .collect();

        let mut point_constant = BigInt::one();
        for f in &factors {
            point_constant *= f.group_order;
            for &w in &f.weights {
                point_constant *= w;
            }
        }

        Ok(NefToricProduct {
            factors,
            dims,
            labels,
            rays,
            point_constant,
        })
    }

    pub fn factors(&self) -> &[FwpsFactor] {
        &self.factors
    }

    /// `n_X`, the per-factor dimensions.
    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// `|n_X|`, the dimension of `X`.
    pub fn dim(&self) -> usize {
        self.dims.iter().map(|&n| n as usize).sum()
    }

    /// `r_X`, the number of factors.
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// `l_D = |n_X| + r_X`.
    pub fn num_divisors(&self) -> usize {
        self.labels.len()
    }

    pub fn divisor_labels(&self) -> &[DivisorLabel] {
        &self.labels
    }

    /// Primitive generator of the ray of divisor `j`, embedded in ℤ^{|n_X|}.
    pub fn ray(&self, j: usize) -> &IntVector {
        &self.rays[j]
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// Torus weight `Q_{ij}` in the global divisor order.
    pub fn q(&self, i: usize, j: usize) -> u64 {
        let l = self.labels[j];
        if l.factor == i {
            self.factors[i].weights[l.local]
        } else {
            0
        }
    }

    pub fn q_matrix(&self) -> Vec<Vec<u64>> {
        (0..self.num_factors())
            .map(|i| (0..self.num_divisors()).map(|j| self.q(i, j)).collect())
            .collect()
    }

    /// `K = Π|G_i| · Π w_j^{(i)}`, the constant with `[pt] = K·H^{n_X}`.
    pub fn point_constant(&self) -> &BigInt {
        &self.point_constant
    }

    pub fn check_degree(&self, d: &CurveClass) -> Result<()> {
        if d.0.len() != self.num_factors() || d.0.iter().all(|&x| x == 0) {
            return Err(Error::BadDegree(d.0.clone()));
        }
        Ok(())
    }

    /// `e_j(d) = Σ_i Q_{ij} d_i`.
    pub fn tangency(&self, d: &CurveClass, j: usize) -> Result<u64> {
        self.check_degree(d)?;
        if j >= self.num_divisors() {
            return Err(Error::IndexOutOfRange {
                what: "divisor",
                index: j,
                len: self.num_divisors(),
            });
        }
        let l = self.labels[j];
        d.0[l.factor]
            .checked_mul(self.factors[l.factor].weights[l.local])
            .ok_or_else(|| Error::BadDegree(d.0.clone()))
    }

    pub fn tangencies(&self, d: &CurveClass) -> Result<Vec<u64>> {
        (0..self.num_divisors()).map(|j| self.tangency(d, j)).collect()
    }

    /// `e(d) = Σ_j e_j(d) = -d·K_X`.
    pub fn total_tangency(&self, d: &CurveClass) -> Result<u64> {
        self.tangencies(d)?
            .into_iter()
            .try_fold(0u64, |a, e| a.checked_add(e))
            .ok_or_else(|| Error::BadDegree(d.0.clone()))
    }

    /// `N_d = Π_j (-1)^{e_j+1} e_j`.
    pub fn sign_factor(&self, d: &CurveClass) -> Result<BigInt> {
        let mut n = BigInt::one();
        for e in self.tangencies(d)? {
            n *= e;
            if e % 2 == 0 {
                n = -n;
            }
        }
        Ok(n)
    }

    /// `d^{n_X} = Π d_i^{n_i}`.
    pub fn degree_power(&self, d: &CurveClass) -> BigInt {
        d.0.iter()
            .zip(&self.dims)
            .map(|(&di, &ni)| num_traits::pow(BigInt::from(di), ni as usize))
            .product()
    }
}

/// A curve class `d = (d_1, ..., d_{r_X})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CurveClass(pub Vec<u64>);

impl CurveClass {
    pub fn new(d: &[u64]) -> Self {
        CurveClass(d.to_vec())
    }
}

impl std::fmt::Display for CurveClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn config_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

fn parse_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| config_err(path, format!("expected a nonnegative integer, got {v}")))
}

fn parse_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| config_err(path, format!("expected an integer, got {v}")))
}

fn parse_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| config_err(path, format!("expected an array, got {v}")))
}

/// Parses a geometry config: `{"factors": [{"weights": [..], "rays": [[..]..], "group_order": k}]}`.
///
/// `rays` and `group_order` are optional; without rays the factor is a true
/// weighted projective space and must have well-formed weights.
pub fn factors_from_json(text: &str) -> Result<Vec<FwpsFactor>> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        config_err(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| config_err("$", "top level must be an object"))?;
    let factors = obj
        .get("factors")
        .ok_or_else(|| config_err("$", "missing key `factors`"))?;
    let factors = parse_array(factors, "$.factors")?;
    if factors.is_empty() {
        return Err(config_err("$.factors", "at least one factor is required"));
    }
    let mut out = Vec::with_capacity(factors.len());
    for (i, f) in factors.iter().enumerate() {
        let base = format!("$.factors[{i}]");
        let fo = f
            .as_object()
            .ok_or_else(|| config_err(&base, "factor must be an object"))?;
        for key in fo.keys() {
            if !matches!(key.as_str(), "weights" | "rays" | "group_order") {
                return Err(config_err(format!("{base}.{key}"), "unknown key"));
            }
        }
        let wpath = format!("{base}.weights");
        let weights = fo
            .get("weights")
            .ok_or_else(|| config_err(&base, "missing key `weights`"))?;
        let weights = parse_array(weights, &wpath)?
            .iter()
            .enumerate()
            .map(|(k, w)| parse_u64(w, &format!("{wpath}[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let group_order = match fo.get("group_order") {
            Some(v) => parse_u64(v, &format!("{base}.group_order"))?,
            None => 1,
        };
        let factor = match fo.get("rays") {
            Some(rays) => {
                let rpath = format!("{base}.rays");
                let rays = parse_array(rays, &rpath)?
                    .iter()
                    .enumerate()
                    .map(|(k, r)| {
                        let p = format!("{rpath}[{k}]");
                        parse_array(r, &p)?
                            .iter()
                            .enumerate()
                            .map(|(c, x)| parse_i64(x, &format!("{p}[{c}]")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                FwpsFactor::with_rays(&weights, &rays, group_order)
            }
            None => {
                if group_order != 1 {
                    return Err(config_err(
                        format!("{base}.group_order"),
                        "a nontrivial group order requires explicit rays",
                    ));
                }
                FwpsFactor::from_weights(&weights)
                    .map_err(|e| config_err(&wpath, e.to_string()))?
            }
        };
        out.push(factor);
    }
    Ok(out)
}

pub fn product_from_json(text: &str) -> Result<NefToricProduct> {
    NefToricProduct::new(factors_from_json(text)?)
}
