//! Integer linear algebra over ℤ.
//!
//! Everything here is arbitrary precision. The Smith normal form uses a
//! smallest-absolute-value pivot so that results are reproducible across runs.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ℤ^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The `i`-th standard basis vector of ℤ^n.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::RankMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(IntVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn add_assign_scaled(&mut self, other: &Self, k: &BigInt) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * k;
        }
    }

    pub fn gcd(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::zero(), |g, x| g.gcd(x))
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, IntVector::len);
        let mut m = Self::zeros(r, c);
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), r, "ragged columns");
            for i in 0..r {
                m[(i, j)] = v[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::RankMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::Shape {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(p) => {
                        a.swap_rows(k, p);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `S = U·A·V` with `U`, `V` unimodular.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (r, c) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            // smallest |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &s[(i, j)];
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, s, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = s[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..r {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -s[(i, t)].div_floor(&pivot);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !s[(i, t)].is_zero();
            }
            for j in t + 1..c {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -s[(t, j)].div_floor(&pivot);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !s[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offending = (t + 1..r)
                .find(|&i| (t + 1..c).any(|j| !s[(i, j)].is_multiple_of(&pivot)));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, s, v)
}

fn finish(u: IntMatrix, s: IntMatrix, v: IntMatrix) -> SmithForm {
    SmithForm { u, s, v }
}

/// |det| of the square matrix whose columns are `vectors`; the index of the
/// sublattice they generate in ℤ^n.
pub fn lattice_index(vectors: &[IntVector], n: usize) -> Result<BigInt> {
    if vectors.len() != n || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Shape {
            expected: n,
            got: vectors.len(),
        });
    }
    let det = IntMatrix::from_columns(vectors).determinant()?;
    if det.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    Ok(det.abs())
}

pub fn is_primitive(v: &IntVector) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.gcd().is_one())
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Checks `gcd(w) = 1` and that every `n`-subset of the `n+1` weights is coprime.
pub fn check_well_formed(weights: &[u64]) -> Result<()> {
    let err = |reason: String| Error::NotWellFormed {
        weights: weights.to_vec(),
        reason,
    };
    if weights.len() < 2 {
        return Err(err("need at least two weights".into()));
    }
    if weights.contains(&0) {
        return Err(err("weights must be positive".into()));
    }
    if weights.iter().copied().fold(0, gcd_u64) != 1 {
        return Err(err("weights have a common factor".into()));
    }
    for omit in 0..weights.len() {
        let g = weights
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != omit)
            .fold(0, |g, (_, &w)| gcd_u64(g, w));
        if g != 1 {
            return Err(err(format!(
                "weights other than position {} share the factor {g}",
                omit + 1
            )));
        }
    }
    Ok(())
}

/// Primitive rays `Δ(1..n+1)` in ℤ^n of the fan of `P(w)`, with `Σ w_j Δ(j) = 0`.
///
/// The rays are the images of the standard basis under a projection
/// ℤ^{n+1} → ℤ^{n+1}/ℤ·w ≅ ℤ^n read off the Smith form of the column `w`.
/// The result is canonical only up to a unimodular change of coordinates.
pub fn wps_fan_from_weights(weights: &[u64]) -> Result<Vec<IntVector>> {
    check_well_formed(weights)?;
    let m = weights.len();
    let n = m - 1;
    let column = IntMatrix::from_columns(&[IntVector(
        weights.iter().map(|&w| BigInt::from(w)).collect(),
    )]);
    // U·w = ±e_1 since gcd(w) = 1; rows 2.. of U project along w.
    let SmithForm { u, .. } = smith_normal_form(&column);
    Ok((0..m)
        .map(|j| IntVector((1..=n).map(|i| u[(i, j)].clone()).collect()))
        .collect())
}
