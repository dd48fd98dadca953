//! Exact scalars, partitions and integer sequences, generalized binomials, and
//! the factorial-reciprocal determinant `f^{l/m}`.
//!
//! Reciprocals of factorials of negative integers are read as `0`, and
//! `binomial(n, k)` is `0` for `k < 0`. With these conventions every
//! determinant below is a total function.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type ExactInt = BigInt;
pub type ExactRational = BigRational;

/// A weakly decreasing sequence of nonnegative parts of fixed length.
///
/// Trailing zeros are significant: `(2,1,0)` and `(2,1)` have different lengths,
/// which matters for determinants indexed by `1..=t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<i64>);

impl Partition {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        let ok = parts.iter().all(|&p| p >= 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition(parts))
        } else {
            Err(Error::InvalidPartition(parts))
        }
    }

    pub fn zero(len: usize) -> Self {
        Partition(vec![0; len])
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<i64> {
        self.0
    }

    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Whether `inner ⊆ self`, comparing part by part (missing parts count as 0).
    pub fn contains(&self, inner: &Partition) -> bool {
        let n = self.len().max(inner.len());
        (0..n).all(|i| self.get(i) >= inner.get(i))
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// The conjugate partition; its length is the first part of `self`.
    pub fn conjugate(&self) -> Partition {
        let width = self.get(0).max(0) as usize;
        let parts = (0..width)
            .map(|j| self.0.iter().filter(|&&p| p > j as i64).count() as i64)
            .collect();
        Partition(parts)
    }

    /// The same partition padded with zeros (or with zero parts dropped) to length `len`.
    pub fn with_len(&self, len: usize) -> Result<Partition> {
        if self.0.iter().skip(len).any(|&p| p != 0) {
            return Err(Error::Precondition(format!(
                "partition {:?} has more than {len} nonzero parts",
                self.0
            )));
        }
        let mut parts = self.0.clone();
        parts.resize(len, 0);
        Ok(Partition(parts))
    }

    /// All partitions with at most `rows` parts (padded to exactly `rows`) and parts at most `cols`.
    pub fn all_in_box(rows: usize, cols: i64) -> Vec<Partition> {
        fn rec(rows: usize, max: i64, prefix: &mut Vec<i64>, out: &mut Vec<Partition>) {
            if prefix.len() == rows {
                out.push(Partition(prefix.clone()));
                return;
            }
            for v in (0..=max).rev() {
                prefix.push(v);
                rec(rows, v, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(rows, cols, &mut Vec::new(), &mut out);
        out
    }

    /// Partitions `nu ⊇ self` of length `len` (>= self.len()) with `|nu / self| = extra`.
    pub fn supersets_of_size(&self, len: usize, extra: i64) -> Vec<Partition> {
        fn rec(
            base: &[i64],
            i: usize,
            left: i64,
            prev: i64,
            prefix: &mut Vec<i64>,
            out: &mut Vec<Partition>,
        ) {
            if i == base.len() {
                if left == 0 {
                    out.push(Partition(prefix.clone()));
                }
                return;
            }
            let lo = base[i];
            let hi = (lo + left).min(prev);
            for v in lo..=hi {
                prefix.push(v);
                rec(base, i + 1, left - (v - lo), v, prefix, out);
                prefix.pop();
            }
        }
        let mut base = self.0.clone();
        base.resize(len.max(base.len()), 0);
        let mut out = Vec::new();
        rec(&base, 0, extra, i64::MAX, &mut Vec::new(), &mut out);
        out
    }

    /// Partitions `nu ⊆ self` of the same length with `|self / nu| = removed`.
    pub fn subsets_of_size(&self, removed: i64) -> Vec<Partition> {
        fn rec(
            outer: &[i64],
            i: usize,
            left: i64,
            prev: i64,
            prefix: &mut Vec<i64>,
            out: &mut Vec<Partition>,
        ) {
            if i == outer.len() {
                if left == 0 {
                    out.push(Partition(prefix.clone()));
                }
                return;
            }
            let hi = outer[i].min(prev);
            let lo = (outer[i] - left).max(0);
            for v in (lo..=hi).rev() {
                prefix.push(v);
                rec(outer, i + 1, left - (outer[i] - v), v, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&self.0, 0, removed, i64::MAX, &mut Vec::new(), &mut out);
        out
    }
}

impl Deref for Partition {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl TryFrom<Vec<i64>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<i64>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// A sequence of nonnegative integers with no monotonicity requirement.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntSeq(Vec<i64>);

impl IntSeq {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.iter().all(|&p| p >= 0) {
            Ok(IntSeq(parts))
        } else {
            Err(Error::InvalidSequence(parts))
        }
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }
}

impl Deref for IntSeq {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Partition> for IntSeq {
    fn from(p: Partition) -> Self {
        IntSeq(p.0)
    }
}

impl fmt::Display for IntSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, parts: &[i64]) -> fmt::Result {
    write!(f, "(")?;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{p}")?;
    }
    write!(f, ")")
}

/// A skew diagram `outer / inner`. Cells are `(row, column)`, both 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkewShape {
    outer: Partition,
    inner: Partition,
}

impl SkewShape {
    /// Pads the shorter partition with zeros; fails unless `inner ⊆ outer`.
    pub fn new(outer: Partition, inner: Partition) -> Result<Self> {
        let len = outer.len().max(inner.len());
        let outer = outer.with_len(len)?;
        let inner = inner.with_len(len)?;
        if !outer.contains(&inner) {
            return Err(Error::NotContained {
                outer: outer.into_parts(),
                inner: inner.into_parts(),
            });
        }
        Ok(SkewShape { outer, inner })
    }

    pub fn straight(outer: Partition) -> Self {
        let inner = Partition::zero(outer.len());
        SkewShape { outer, inner }
    }

    pub fn outer(&self) -> &Partition {
        &self.outer
    }

    pub fn inner(&self) -> &Partition {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.outer.len()
    }

    pub fn size(&self) -> i64 {
        self.outer.size() - self.inner.size()
    }

    pub fn contains_cell(&self, (row, col): (usize, usize)) -> bool {
        row < self.rows() && (col as i64) >= self.inner[row] && (col as i64) < self.outer[row]
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        (0..self.rows())
            .flat_map(|i| (self.inner[i]..self.outer[i]).map(move |j| (i, j as usize)))
            .collect()
    }

    /// Reflection across the main diagonal.
    pub fn conjugate(&self) -> SkewShape {
        let outer = self.outer.conjugate();
        let inner = self
            .inner
            .conjugate()
            .with_len(outer.len())
            .expect("conjugate of a contained partition is contained");
        SkewShape { outer, inner }
    }
}

impl fmt::Display for SkewShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.outer, self.inner)
    }
}

/// `n (n-1) ... (n-k+1) / k!` for any integer `n`; `0` when `k < 0`.
pub fn binomial(n: i64, k: i64) -> ExactInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = binomial(n, i) is an integer at every step
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> ExactInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `1/n!`, and `0` for negative `n`.
pub fn inv_factorial(n: i64) -> ExactRational {
    if n < 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::one(), factorial(n as u64))
    }
}

/// Falling factorial `n (n-1) ... (n-k+1)`; `1` when `k = 0`.
pub fn falling_factorial(n: i64, k: i64) -> ExactInt {
    assert!(k >= 0, "falling factorial with negative length");
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i))
}

/// Fraction-free Bareiss elimination with row pivoting.
pub fn det_integer(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Determinant over the rationals: each row is scaled to integers by the lcm of
/// its denominators, then Bareiss runs on the integer matrix.
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let mut scale = BigInt::one();
    let rows = m
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints = row
                .iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect::<Vec<_>>();
            scale *= &lcm;
            ints
        })
        .collect();
    BigRational::new(det_integer(rows), scale)
}

/// `|l/m|! · det(1/(l_i - m_j + j - i)!)`, and `0` when `|l/m| < 0`.
///
/// For partitions `l ⊇ m` this is the number of standard tableaux on `l/m`.
/// Panics if the result is not an integer.
pub fn f_generalized(l: &[i64], m: &[i64]) -> ExactInt {
    assert_eq!(
        l.len(),
        m.len(),
        "f_generalized needs sequences of equal length"
    );
    let t = l.len();
    let total: i64 = l.iter().sum::<i64>() - m.iter().sum::<i64>();
    if total < 0 {
        return BigInt::zero();
    }
    // Row i over the common denominator K_i!, K_i the largest index in the row.
    let mut denom = BigInt::one();
    let mut rows = Vec::with_capacity(t);
    for (i, &li) in l.iter().enumerate() {
        let idx: Vec<i64> = (0..t).map(|j| li - m[j] + j as i64 - i as i64).collect();
        let top = *idx.iter().max().expect("t > 0");
        if top < 0 {
            return BigInt::zero();
        }
        rows.push(
            idx.iter()
                .map(|&k| {
                    if k < 0 {
                        BigInt::zero()
                    } else {
                        falling_factorial(top, top - k)
                    }
                })
                .collect(),
        );
        denom *= factorial(top as u64);
    }
    let numer = det_integer(rows) * factorial(total as u64);
    let (q, r) = numer.div_rem(&denom);
    assert!(
        r.is_zero(),
        "f^{{l/m}} is not an integer for l={l:?}, m={m:?}"
    );
    q
}

/// Sorts `seq_i - i` into strictly decreasing order and returns `seq_{w(i)} - w(i) + i`
/// together with the sign of `w`, or `None` if two of the values `seq_i - i` coincide.
fn straighten(seq: &[i64]) -> Option<(Vec<i64>, i8)> {
    let keys: Vec<i64> = seq.iter().enumerate().map(|(i, &v)| v - i as i64).collect();
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by(|&a, &b| keys[b].cmp(&keys[a]));
    if order.windows(2).any(|w| keys[w[0]] == keys[w[1]]) {
        return None;
    }
    let mut inversions = 0usize;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                inversions += 1;
            }
        }
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    let parts = order
        .iter()
        .enumerate()
        .map(|(i, &w)| keys[w] + i as i64)
        .collect();
    Some((parts, sign))
}

/// Row straightening: permutes the rows of `det(1/(l_i - m_j + j - i)!)` into the
/// partition `λ⁺_i = l_{w(i)} - w(i) + i`. `None` when the determinant has two equal rows.
pub fn sort_rows_to_partition(l: &[i64], base: &Partition) -> Option<(Partition, i8)> {
    debug_assert!(l.iter().zip(base.iter()).all(|(a, b)| a >= b));
    let (parts, sign) = straighten(l)?;
    Some((Partition::new(parts).ok()?, sign))
}

/// Column straightening: `μ⁻_j = m_{w(j)} + j - w(j)`, or `None` on a collision.
pub fn sort_cols_to_partition(m: &[i64]) -> Option<(Partition, i8)> {
    let (parts, sign) = straighten(m)?;
    Some((Partition::new(parts).ok()?, sign))
}

/// Converts an exact rational to an integer, if it is one.
pub fn to_integer(q: &BigRational) -> Option<BigInt> {
    q.is_integer().then(|| q.to_integer())
}

pub fn sign_power(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Converts small exact integers to `i64` for indexing; panics on overflow.
pub fn small(n: &BigInt) -> i64 {
    n.to_i64().expect("value does not fit in i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 0), BigInt::from(1));
        assert_eq!(binomial(-3, 2), BigInt::from(6));
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, -1), BigInt::from(0));
        assert_eq!(binomial(2, 5), BigInt::from(0));
    }

    #[test]
    fn inv_factorial_examples() {
        assert_eq!(inv_factorial(0), BigRational::one());
        assert_eq!(
            inv_factorial(3),
            BigRational::new(BigInt::one(), BigInt::from(6))
        );
        assert!(inv_factorial(-2).is_zero());
    }

    #[test]
    fn inv_factorial_times_factorial_is_one() {
        for n in 0..=50u64 {
            let prod = inv_factorial(n as i64) * BigRational::from(factorial(n));
            assert!(prod.is_one(), "n = {n}");
        }
    }

    #[test]
    fn negative_upper_binomial_reflection() {
        for n in 1..=12 {
            for k in 0..=12 {
                let expected = BigInt::from(sign_power(k)) * binomial(n + k - 1, k);
                assert_eq!(binomial(-n, k), expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn f_generalized_examples() {
        assert_eq!(f_generalized(&[2, 1], &[0, 0]), BigInt::from(2));
        assert_eq!(f_generalized(&[3, 1, 0], &[3, 1, 0]), BigInt::from(1));
        assert_eq!(f_generalized(&[], &[]), BigInt::from(1));
        // l_2 < m_2 for partitions
        assert_eq!(f_generalized(&[3, 1], &[1, 2]), BigInt::from(0));
        assert_eq!(f_generalized(&[1, 0], &[2, 0]), BigInt::from(0));
    }

    #[test]
    fn bareiss_matches_small_cases() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(-1), BigInt::from(0)],
            vec![BigInt::from(-1), BigInt::from(2), BigInt::from(-1)],
            vec![BigInt::from(0), BigInt::from(-1), BigInt::from(2)],
        ];
        assert_eq!(det_integer(m), BigInt::from(4));
        // needs a pivot swap
        let m = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(det_integer(m), BigInt::from(-1));
        let half = BigRational::new(1.into(), 2.into());
        let third = BigRational::new(1.into(), 3.into());
        let m = vec![
            vec![half.clone(), third.clone()],
            vec![BigRational::one(), half.clone()],
        ];
        assert_eq!(
            det_rational(&m),
            BigRational::new(BigInt::from(-1), BigInt::from(12))
        );
    }

    #[test]
    fn straightening_examples() {
        let (lp, s) = sort_rows_to_partition(&[1, 3], &p(&[1, 1])).unwrap();
        assert_eq!((lp.parts(), s), (&[2, 2][..], -1));
        let (lp, s) = sort_rows_to_partition(&[4, 2, 0], &p(&[4, 2, 0])).unwrap();
        assert_eq!((lp.parts(), s), (&[4, 2, 0][..], 1));
        assert!(sort_rows_to_partition(&[2, 3], &p(&[1, 1])).is_none());

        let (mm, s) = sort_cols_to_partition(&[0, 2]).unwrap();
        assert_eq!((mm.parts(), s), (&[1, 1][..], -1));
        let (mm, s) = sort_cols_to_partition(&[3, 1]).unwrap();
        assert_eq!((mm.parts(), s), (&[3, 1][..], 1));
        assert!(sort_cols_to_partition(&[1, 2]).is_none());
    }

    #[test]
    fn partition_validation_and_conjugate() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, -1]).is_err());
        assert_eq!(p(&[3, 1]).conjugate().parts(), &[2, 1, 1]);
        assert_eq!(p(&[0, 0]).conjugate().parts(), &[] as &[i64]);
        assert!(SkewShape::new(p(&[2, 0]), p(&[1, 1])).is_err());
        let s = SkewShape::new(p(&[3, 2]), p(&[1])).unwrap();
        assert_eq!(s.cells(), vec![(0, 1), (0, 2), (1, 0), (1, 1)]);
        assert_eq!(s.conjugate().to_string(), "(2,2,1)/(1,0,0)");
    }

    #[test]
    fn partition_enumerators() {
        assert_eq!(Partition::all_in_box(2, 2).len(), 6);
        let sup = p(&[1, 0]).supersets_of_size(2, 2);
        let got: Vec<_> = sup.iter().map(|q| q.parts().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 1], vec![3, 0]]);
        let sub = p(&[2, 1]).subsets_of_size(1);
        let got: Vec<_> = sub.iter().map(|q| q.parts().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1]]);
    }

    proptest! {
        // Swapping two rows of l (adjusting by the index shift) flips the sign of f^{l/m}.
        #[test]
        fn f_generalized_alternates_under_row_exchange(
            l in proptest::collection::vec(0i64..6, 3),
            m in proptest::collection::vec(0i64..3, 3),
            i in 0usize..2,
        ) {
            let mut swapped = l.clone();
            // exchanging l_i - i with l_{i+1} - (i+1)
            swapped[i] = l[i + 1] - 1;
            swapped[i + 1] = l[i] + 1;
            prop_assume!(swapped[i] >= 0);
            prop_assert_eq!(f_generalized(&swapped, &m), -f_generalized(&l, &m));
        }

        #[test]
        fn straightening_preserves_f(l in proptest::collection::vec(0i64..6, 3)) {
            let m = [0i64, 0, 0];
            let base = Partition::zero(3);
            match sort_rows_to_partition(&l, &base) {
                Some((lp, s)) => prop_assert_eq!(
                    f_generalized(&l, &m),
                    BigInt::from(s) * f_generalized(&lp, &m)
                ),
                None => prop_assert_eq!(f_generalized(&l, &m), BigInt::zero()),
            }
        }
    }
}
