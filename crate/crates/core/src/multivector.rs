//! The algebra `A = ℤ[N] ⊗ Λ•M` restricted to monomials `z^n α`.
//!
//! A basis element `e*_S = e*_{s1} ∧ … ∧ e*_{sk}` is keyed by the bitmask of
//! the strictly increasing index set `S`, so ranks are limited to 64.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fault::{self, Fault};
use crate::lattice::IntVector;

pub const MAX_RANK: usize = 64;

type Blade = u64;

#[inline]
fn bits_below(mask: Blade, i: usize) -> u32 {
    (mask & ((1u64 << i) - 1)).count_ones()
}

#[inline]
fn bits_above(mask: Blade, i: usize) -> u32 {
    if i + 1 >= 64 {
        0
    } else {
        (mask >> (i + 1)).count_ones()
    }
}

/// Sign of `e*_S ∧ e*_T` relative to `e*_{S∪T}`; `None` if `S ∩ T ≠ ∅`.
fn wedge_sign(s: Blade, t: Blade) -> Option<bool> {
    if s & t != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = t;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        swaps += bits_above(s, i);
        rest &= rest - 1;
    }
    Some(swaps % 2 == 1)
}

fn check_rank(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::RankMismatch { left: a, right: b });
    }
    Ok(())
}

/// An element of `Λ•M` for `M ≅ ℤ^rank`, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiVector {
    rank: usize,
    terms: BTreeMap<Blade, BigInt>,
}

impl MultiVector {
    pub fn zero(rank: usize) -> Self {
        assert!(rank <= MAX_RANK, "rank {rank} exceeds {MAX_RANK}");
        MultiVector {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(rank: usize, c: impl Into<BigInt>) -> Self {
        let mut m = Self::zero(rank);
        m.add_term(0, c.into());
        m
    }

    pub fn one(rank: usize) -> Self {
        Self::scalar(rank, 1)
    }

    /// `c · e*_{s1} ∧ … ∧ e*_{sk}` for 0-based indices in any order.
    pub fn basis(rank: usize, indices: &[usize], c: impl Into<BigInt>) -> Self {
        let mut acc = Self::scalar(rank, c);
        for &i in indices {
            assert!(i < rank, "index {i} out of rank {rank}");
            acc = acc.wedge(&Self::e(rank, i)).expect("same rank");
        }
        acc
    }

    /// The dual basis covector `e*_i`.
    pub fn e(rank: usize, i: usize) -> Self {
        let mut m = Self::zero(rank);
        m.add_term(1 << i, BigInt::one());
        m
    }

    /// The generator `e*_1 ∧ … ∧ e*_n` of `Λ^n M`.
    pub fn top(rank: usize) -> Self {
        let mut m = Self::zero(rank);
        let mask = if rank == 64 { u64::MAX } else { (1u64 << rank) - 1 };
        m.add_term(mask, BigInt::one());
        m
    }

    /// The covector `Σ v_i e*_i`.
    pub fn from_covector(v: &IntVector) -> Self {
        let mut m = Self::zero(v.len());
        for (i, c) in v.iter().enumerate() {
            m.add_term(1 << i, c.clone());
        }
        m
    }

    fn add_term(&mut self, blade: Blade, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `e*_S` for a strictly increasing 0-based index set.
    pub fn coeff(&self, indices: &[usize]) -> BigInt {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let mask = indices.iter().fold(0u64, |m, &i| m | (1 << i));
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    /// Nonzero components as (strictly increasing index set, coefficient).
    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &BigInt)> {
        self.terms.iter().map(|(&mask, c)| {
            let idx = (0..64).filter(|i| mask >> i & 1 == 1).collect();
            (idx, c)
        })
    }

    /// The grade if homogeneous; `None` for zero or mixed grades.
    pub fn grade(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|b| b.count_ones() as usize);
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    /// Projection onto grade `k`.
    pub fn part(&self, k: usize) -> Self {
        MultiVector {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.count_ones() as usize == k)
                .map(|(&b, c)| (b, c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        let mut out = self.clone();
        for (&b, c) in &other.terms {
            out.add_term(b, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut out = Self::zero(self.rank);
        for (&b, c) in &self.terms {
            out.add_term(b, c * k);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigInt::one())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        let mut out = Self::zero(self.rank);
        for (&s, a) in &self.terms {
            for (&t, b) in &other.terms {
                if let Some(neg) = wedge_sign(s, t) {
                    let p = a * b;
                    out.add_term(s | t, if neg { -p } else { p });
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι_n`: `ι_n(e*_{i1}∧…∧e*_{is}) = Σ_k (-1)^{k-1} n_{ik} e*_{S∖ik}`.
    pub fn contract(&self, n: &IntVector) -> Result<Self> {
        check_rank(n.len(), self.rank)?;
        let mut out = Self::zero(self.rank);
        for (&s, c) in &self.terms {
            let mut rest = s;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if n[i].is_zero() {
                    continue;
                }
                let v = c * &n[i];
                let odd = bits_below(s, i) % 2 == 1 && fault::active() != Fault::ContractionSign;
                out.add_term(s & !(1 << i), if odd { -v } else { v });
            }
        }
        Ok(out)
    }
}

pub fn wedge(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    a.wedge(b)
}

pub fn contract(n: &IntVector, a: &MultiVector) -> Result<MultiVector> {
    a.contract(n)
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.components().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if idx.is_empty() {
                write!(f, "{c}")?;
            } else {
                let names: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
                write!(f, "{c}*{}", names.join("^"))?;
            }
        }
        Ok(())
    }
}

/// A monomial `z^n α` of `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AMonomial {
    pub exponent: IntVector,
    pub alpha: MultiVector,
}

impl AMonomial {
    pub fn new(exponent: IntVector, alpha: MultiVector) -> Result<Self> {
        check_rank(exponent.len(), alpha.rank())?;
        Ok(AMonomial { exponent, alpha })
    }

    /// `z^n · 1`, the label of an exterior marking.
    pub fn pure(exponent: IntVector) -> Self {
        let rank = exponent.len();
        AMonomial {
            exponent,
            alpha: MultiVector::one(rank),
        }
    }

    /// `z^0 · (e*_1 ∧ … ∧ e*_n)`, the label of an interior marking.
    pub fn top_generator(rank: usize) -> Self {
        AMonomial {
            exponent: IntVector::zeros(rank),
            alpha: MultiVector::top(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.alpha.rank()
    }
}

impl fmt::Display for AMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{}·({})", self.exponent, self.alpha)
    }
}

fn fold_args(args: &[AMonomial]) -> Result<(IntVector, MultiVector)> {
    let first = args.first().ok_or(Error::Empty("argument list"))?;
    let mut exp = first.exponent.clone();
    let mut alpha = first.alpha.clone();
    for a in &args[1..] {
        check_rank(first.rank(), a.rank())?;
        exp = exp.checked_add(&a.exponent)?;
        alpha = alpha.wedge(&a.alpha)?;
    }
    Ok((exp, alpha))
}

/// `ℓ_k(z^{n1}α1 ⊗ … ⊗ z^{nk}αk) = z^{Σn} ι_{Σn}(α1 ∧ … ∧ αk)`.
pub fn ell(args: &[AMonomial]) -> Result<AMonomial> {
    let (exp, alpha) = fold_args(args)?;
    let alpha = alpha.contract(&exp)?;
    Ok(AMonomial {
        exponent: exp,
        alpha,
    })
}

/// Product in `A`: exponents add, alphas wedge in argument order.
pub fn a_product(args: &[AMonomial]) -> Result<AMonomial> {
    let (exponent, alpha) = fold_args(args)?;
    Ok(AMonomial { exponent, alpha })
}

/// Index of `z^0 · c·(e*_1∧…∧e*_n)` in `Λ^n M`, i.e. `|c|`.
pub fn top_index(a: &AMonomial) -> Result<BigInt> {
    if !a.exponent.is_zero() {
        return Err(Error::Structural(format!(
            "exponent {} at the sink is not zero",
            a.exponent
        )));
    }
    let n = a.rank();
    if a.alpha.is_zero() {
        return Ok(BigInt::zero());
    }
    if a.alpha.grade() != Some(n) {
        return Err(Error::Structural(format!(
            "ζ = {} is not concentrated in top grade {n}",
            a.alpha
        )));
    }
    Ok(a.alpha.coeff(&(0..n).collect::<Vec<_>>()).abs())
}
