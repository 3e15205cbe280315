//! Exact Smith normal form of sparse integer matrices.
//!
//! Unit pivots are eliminated sparsely first (a boundary matrix is almost
//! entirely reducible this way); whatever is left has no unit entries and is
//! finished densely with arbitrary-precision arithmetic.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::complex::SparseIntMatrix;

/// Scalars the sparse eliminator can work over.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    /// Multiplicative inverse, when this is a unit.
    fn unit_inverse(&self) -> Option<Self>;
    /// `x - f * y`, or `None` on overflow.
    fn sub_mul(x: &Self, f: &Self, y: &Self) -> Option<Self>;
    fn mul(a: &Self, b: &Self) -> Option<Self>;
}

impl Scalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn unit_inverse(&self) -> Option<Self> {
        (*self == 1 || *self == -1).then_some(*self)
    }
    fn sub_mul(x: &Self, f: &Self, y: &Self) -> Option<Self> {
        x.checked_sub(f.checked_mul(*y)?)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn unit_inverse(&self) -> Option<Self> {
        (self.abs().is_one()).then(|| self.clone())
    }
    fn sub_mul(x: &Self, f: &Self, y: &Self) -> Option<Self> {
        Some(x - f * y)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
}

/// Residue modulo the prime `ModP::P`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ModP(u64);

impl ModP {
    pub const P: u64 = 2_147_483_647;

    fn pow(self, mut e: u64) -> Self {
        let (mut base, mut acc) = (self.0, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % Self::P;
            }
            base = base * base % Self::P;
            e >>= 1;
        }
        ModP(acc)
    }
}

impl Scalar for ModP {
    fn from_i64(v: i64) -> Self {
        ModP(v.rem_euclid(Self::P as i64) as u64)
    }
    fn is_nil(&self) -> bool {
        self.0 == 0
    }
    fn unit_inverse(&self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(Self::P - 2))
    }
    fn sub_mul(x: &Self, f: &Self, y: &Self) -> Option<Self> {
        Some(ModP((x.0 + Self::P - f.0 * y.0 % Self::P) % Self::P))
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(ModP(a.0 * b.0 % Self::P))
    }
}

struct Overflow;

type Column<T> = Vec<(u32, T)>;

/// Sparse elimination of unit pivots. Returns the number of pivots and the
/// leftover nonzero columns, none of which contains a unit.
fn eliminate_units<T: Scalar>(m: &SparseIntMatrix) -> Result<(usize, Vec<Column<T>>), Overflow> {
    let mut cols: Vec<Column<T>> = m
        .columns()
        .into_iter()
        .map(|c| c.into_iter().map(|(r, v)| (r as u32, T::from_i64(v))).filter(|e| !e.1.is_nil()).collect())
        .collect();
    let mut rows: Vec<HashSet<u32>> = vec![HashSet::new(); m.rows];
    for (c, col) in cols.iter().enumerate() {
        for (r, _) in col {
            rows[*r as usize].insert(c as u32);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        cols.iter().enumerate().filter(|(_, c)| !c.is_empty()).map(|(i, c)| Reverse((c.len(), i as u32))).collect();
    let mut pivots = 0usize;

    while let Some(Reverse((len, c))) = heap.pop() {
        let ci = c as usize;
        if !alive[ci] || cols[ci].len() != len || len == 0 {
            continue;
        }
        // unit in this column whose row is sparsest
        let Some((pr, pinv)) = cols[ci]
            .iter()
            .filter_map(|(r, v)| v.unit_inverse().map(|inv| (*r, inv)))
            .min_by_key(|(r, _)| rows[*r as usize].len())
        else {
            continue;
        };
        pivots += 1;
        alive[ci] = false;
        let pivot_col = std::mem::take(&mut cols[ci]);
        for (r, _) in &pivot_col {
            rows[*r as usize].remove(&c);
        }
        let targets: Vec<u32> = rows[pr as usize].iter().copied().collect();
        for t in targets {
            let ti = t as usize;
            let a = cols[ti].iter().find(|e| e.0 == pr).expect("row index out of sync").1.clone();
            let f = T::mul(&a, &pinv).ok_or(Overflow)?;
            let old = std::mem::take(&mut cols[ti]);
            let mut merged = Vec::with_capacity(old.len() + pivot_col.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < pivot_col.len() {
                let take_old = j >= pivot_col.len() || (i < old.len() && old[i].0 < pivot_col[j].0);
                let take_piv = i >= old.len() || (j < pivot_col.len() && pivot_col[j].0 < old[i].0);
                if take_old {
                    merged.push(old[i].clone());
                    i += 1;
                } else if take_piv {
                    let (r, y) = &pivot_col[j];
                    let v = T::sub_mul(&T::from_i64(0), &f, y).ok_or(Overflow)?;
                    rows[*r as usize].insert(t);
                    merged.push((*r, v));
                    j += 1;
                } else {
                    let (r, x) = &old[i];
                    let v = T::sub_mul(x, &f, &pivot_col[j].1).ok_or(Overflow)?;
                    if v.is_nil() {
                        rows[*r as usize].remove(&t);
                    } else {
                        merged.push((*r, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            cols[ti] = merged;
            if !cols[ti].is_empty() {
                heap.push(Reverse((cols[ti].len(), t)));
            }
        }
        debug_assert!(rows[pr as usize].is_empty());
    }
    let rest = cols.into_iter().zip(alive).filter(|(c, a)| *a && !c.is_empty()).map(|(c, _)| c).collect();
    Ok((pivots, rest))
}

/// Rank over the integers modulo a large prime. This equals the rational
/// rank unless that prime divides an elementary divisor.
pub fn rank_mod_p(m: &SparseIntMatrix) -> usize {
    match eliminate_units::<ModP>(m) {
        Ok((rank, rest)) => {
            debug_assert!(rest.is_empty());
            rank
        }
        Err(Overflow) => unreachable!("modular arithmetic cannot overflow"),
    }
}

/// Nonzero invariant factors `d_1 | d_2 | ... | d_r` of `m`.
pub fn smith_normal_form(m: &SparseIntMatrix) -> Vec<BigInt> {
    let (units, rest) = match eliminate_units::<i64>(m) {
        Ok((u, rest)) => (u, rest.into_iter().map(|c| c.into_iter().map(|(r, v)| (r, BigInt::from(v))).collect()).collect()),
        Err(Overflow) => match eliminate_units::<BigInt>(m) {
            Ok(x) => x,
            Err(Overflow) => unreachable!("big integers cannot overflow"),
        },
    };
    let mut diag = vec![BigInt::one(); units];
    diag.extend(dense_snf(rest));
    diag
}

/// Dense Smith normal form of the given columns.
fn dense_snf(cols: Vec<Column<BigInt>>) -> Vec<BigInt> {
    if cols.is_empty() {
        return Vec::new();
    }
    let mut row_ids: Vec<u32> = cols.iter().flat_map(|c| c.iter().map(|e| e.0)).collect();
    row_ids.sort_unstable();
    row_ids.dedup();
    let nr = row_ids.len();
    let nc = cols.len();
    let mut a = vec![vec![BigInt::zero(); nc]; nr];
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col {
            a[row_ids.binary_search(&r).unwrap()][c] = v;
        }
    }
    dense_snf_matrix(a)
}

/// Dense Smith normal form; returns the nonzero diagonal.
pub fn dense_snf_matrix(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero magnitude in the trailing block
        let Some((pr, pc)) = (t..nr)
            .flat_map(|r| (t..nc).map(move |c| (r, c)))
            .filter(|&(r, c)| !a[r][c].is_zero())
            .min_by(|&(r1, c1), &(r2, c2)| a[r1][c1].abs().cmp(&a[r2][c2].abs()))
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..nr {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].div_floor(&a[t][t]);
                for c in t..nc {
                    let v = &a[r][c] - &q * &a[t][c];
                    a[r][c] = v;
                }
                if !a[r][t].is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..nc {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &row[c] - &q * &row[t];
                    row[c] = v;
                }
                if !a[t][c].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the new smallest entry of row/column t to the pivot
                let mut best = (t, t);
                for r in t..nr {
                    if !a[r][t].is_zero() && a[r][t].abs() < a[best.0][best.1].abs() {
                        best = (r, t);
                    }
                }
                for c in t..nc {
                    if !a[t][c].is_zero() && a[t][c].abs() < a[best.0][best.1].abs() {
                        best = (t, c);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // row and column clear; enforce divisibility of the trailing block
            let bad = (t + 1..nr).find(|&r| (t + 1..nc).any(|c| !(&a[r][c] % &a[t][t]).is_zero()));
            match bad {
                Some(r) => {
                    for c in t..nc {
                        let v = &a[t][c] + &a[r][c];
                        a[t][c] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(rows: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&SparseIntMatrix::from_dense(rows)).iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(snf(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(snf(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(snf(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(snf(&[vec![1, 1], vec![1, -1]]), vec![1, 2]);
    }

    #[test]
    fn rank_mod_p_matches() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(rank_mod_p(&m), 2);
        assert_eq!(smith_normal_form(&m).len(), 2);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = i64::MAX / 2;
        let m = SparseIntMatrix::from_dense(&[vec![1, big, 0], vec![1, 0, big], vec![0, 1, 1]]);
        let d = smith_normal_form(&m);
        let dense = dense_snf_matrix(m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect());
        assert_eq!(d, dense);
    }
}
