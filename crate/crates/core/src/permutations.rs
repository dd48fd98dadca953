//! 321-avoiding permutations: the `(p, q)` description, the skew shape it
//! determines, labeled skew shapes, and pipe dreams.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{Partition, SkewShape};
use crate::tableaux::{Filling, Flagging};

/// Largest `n` accepted by the pipe dream enumerator.
pub const MAX_PIPE_DREAM_N: usize = 7;

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{one_line:?} is not a bijection on 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// All permutations of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
            let n = used.len();
            if prefix.len() == n {
                out.push(Permutation(prefix.clone()));
                return;
            }
            for v in 1..=n {
                if !used[v - 1] {
                    used[v - 1] = true;
                    prefix.push(v);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[v - 1] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.0
    }

    /// `w(i)` for 1-based `i`; fixed beyond `n`.
    pub fn at(&self, i: usize) -> usize {
        if i > self.n() {
            i
        } else {
            self.0[i - 1]
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Number of inversions `#{a < b : w(a) > w(b)}`.
    pub fn length(&self) -> usize {
        let w = &self.0;
        (0..w.len())
            .map(|a| (a + 1..w.len()).filter(|&b| w[a] > w[b]).count())
            .sum()
    }

    pub fn is_321_avoiding(&self) -> bool {
        // w avoids 321 iff no entry has both a larger entry before it and a smaller one after it
        let w = &self.0;
        let n = w.len();
        let mut suffix_min = vec![usize::MAX; n + 1];
        for i in (0..n).rev() {
            suffix_min[i] = suffix_min[i + 1].min(w[i]);
        }
        let mut prefix_max = 0;
        for j in 0..n {
            if prefix_max > w[j] && suffix_min[j + 1] < w[j] {
                return false;
            }
            prefix_max = prefix_max.max(w[j]);
        }
        true
    }

    /// The same permutation viewed in `S_m`, `m >= n`.
    pub fn extended(&self, m: usize) -> Permutation {
        let mut v = self.0.clone();
        v.extend(self.n() + 1..=m);
        Permutation(v)
    }

    /// Drops trailing fixed points.
    pub fn trimmed(&self) -> Permutation {
        let mut v = self.0.clone();
        while v.last() == Some(&v.len()) {
            v.pop();
        }
        Permutation(v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation(inv)
    }

    /// `w s_k`: swaps positions `k` and `k+1` (1-based).
    pub fn times_simple(&self, k: usize) -> Permutation {
        let mut v = self.extended(self.n().max(k + 1)).0;
        v.swap(k - 1, k);
        Permutation(v)
    }

    /// Positions `k` with `w(k) < w(k+1)`, `1 <= k < n`.
    pub fn ascents(&self) -> Vec<usize> {
        (1..self.n())
            .filter(|&k| self.0[k - 1] < self.0[k])
            .collect()
    }

    pub fn descents(&self) -> Vec<usize> {
        (1..self.n())
            .filter(|&k| self.0[k - 1] > self.0[k])
            .collect()
    }

    /// All reduced words `(k_1, ..., k_l)` with `w = s_{k_1} ... s_{k_l}`.
    pub fn reduced_words(&self) -> Vec<Vec<usize>> {
        if self.is_identity() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for k in self.descents() {
            for mut word in self.times_simple(k).reduced_words() {
                word.push(k);
                out.push(word);
            }
        }
        out
    }

    /// Bruhat order by the rank-matrix criterion; both permutations are padded to a common size.
    pub fn bruhat_le(&self, other: &Permutation) -> bool {
        let n = self.n().max(other.n());
        let (u, w) = (self.extended(n), other.extended(n));
        for i in 1..=n {
            for j in 1..=n {
                let cu = (1..=i).filter(|&a| u.at(a) >= j).count();
                let cw = (1..=i).filter(|&a| w.at(a) >= j).count();
                if cu > cw {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let vals = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidPermutation(format!("bad entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(vals)
    }
}

/// Strictly decreasing positive sequences `p_1 > ... > p_t` and `q_1 > ... > q_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PQData {
    p: Vec<i64>,
    q: Vec<i64>,
}

impl PQData {
    pub fn new(p: Vec<i64>, q: Vec<i64>) -> Result<Self> {
        let valid = |s: &[i64]| s.iter().all(|&x| x > 0) && s.windows(2).all(|w| w[0] > w[1]);
        if p.is_empty() || p.len() != q.len() || !valid(&p) || !valid(&q) {
            return Err(Error::Precondition(format!(
                "p={p:?}, q={q:?} must be non-empty strictly decreasing positive sequences of equal length"
            )));
        }
        Ok(PQData { p, q })
    }

    pub fn p(&self) -> &[i64] {
        &self.p
    }

    pub fn q(&self) -> &[i64] {
        &self.q
    }

    pub fn t(&self) -> usize {
        self.p.len()
    }

    /// All `(p, q)` with `t >= 1` and `p_1, q_1 <= max`.
    pub fn all_bounded(max: i64) -> Vec<PQData> {
        fn decreasing(max: i64, t: usize) -> Vec<Vec<i64>> {
            fn rec(lo: i64, max: i64, t: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
                if prefix.len() == t {
                    let mut v = prefix.clone();
                    v.reverse();
                    out.push(v);
                    return;
                }
                for x in lo..=max {
                    prefix.push(x);
                    rec(x + 1, max, t, prefix, out);
                    prefix.pop();
                }
            }
            let mut out = Vec::new();
            rec(1, max, t, &mut Vec::new(), &mut out);
            out
        }
        let mut out = Vec::new();
        for t in 1..=max.max(0) as usize {
            let seqs = decreasing(max, t);
            for p in &seqs {
                for q in &seqs {
                    out.push(PQData {
                        p: p.clone(),
                        q: q.clone(),
                    });
                }
            }
        }
        out
    }

    /// Whether `q_i >= p_i - 1` for every `i`.
    pub fn is_canonical(&self) -> bool {
        self.p.iter().zip(&self.q).all(|(p, q)| *q >= p - 1)
    }
}

/// `w(p_i) = max(q_i + 1, p_i)`, remaining positions filled with the unused values in increasing order.
pub fn perm_from_pq(pq: &PQData) -> Permutation {
    let targets: Vec<i64> =
        pq.p.iter()
            .zip(&pq.q)
            .map(|(&p, &q)| (q + 1).max(p))
            .collect();
    let n = (*targets.iter().max().expect("t >= 1")).max(pq.p[0]) as usize;
    let mut w = vec![0usize; n];
    let mut used = vec![false; n + 1];
    for (&p, &v) in pq.p.iter().zip(&targets) {
        w[p as usize - 1] = v as usize;
        used[v as usize] = true;
    }
    let mut free = (1..=n).filter(|&v| !used[v]);
    for slot in w.iter_mut().filter(|s| **s == 0) {
        *slot = free.next().expect("as many free values as free positions");
    }
    Permutation(w).trimmed()
}

/// `p` = positions with `w(p) > p` in decreasing order, `q_i = w(p_i) - 1`.
pub fn pq_from_perm(w: &Permutation) -> Result<PQData> {
    if w.is_identity() {
        return Err(Error::InvalidPermutation(
            "the identity has no (p, q) data".into(),
        ));
    }
    if !w.is_321_avoiding() {
        return Err(Error::InvalidPermutation(format!(
            "{w} contains the pattern 321"
        )));
    }
    let p: Vec<i64> = (1..=w.n())
        .rev()
        .filter(|&j| w.at(j) > j)
        .map(|j| j as i64)
        .collect();
    let q = p.iter().map(|&j| w.at(j as usize) as i64 - 1).collect();
    PQData::new(p, q)
}

/// `q'_i = max(q_i, p_i - 1)`.
pub fn q_prime(pq: &PQData) -> PQData {
    let q =
        pq.p.iter()
            .zip(&pq.q)
            .map(|(&p, &q)| q.max(p - 1))
            .collect();
    PQData::new(pq.p.clone(), q).expect("q' is strictly decreasing")
}

/// `λ_i = q_i - t + i` and `μ_j = p_j - (t + 1 - j)`.
pub fn shape_from_pq(pq: &PQData) -> (Partition, Partition) {
    let t = pq.t() as i64;
    let lam = (1..=t).map(|i| pq.q[i as usize - 1] - t + i).collect();
    let mu = (1..=t)
        .map(|j| pq.p[j as usize - 1] - (t + 1 - j))
        .collect();
    (
        Partition::new(lam).expect("q strictly decreasing"),
        Partition::new(mu).expect("p strictly decreasing"),
    )
}

/// Whether `#{a <= p_j : w(a) > q_i} >= 1 + i - j` for all `i, j`.
pub fn satisfies_rank_conditions(w: &Permutation, pq: &PQData) -> bool {
    let t = pq.t();
    (1..=t).all(|i| {
        (1..=t).all(|j| {
            let pj = pq.p[j - 1] as usize;
            let qi = pq.q[i - 1] as usize;
            let count = (1..=pj).filter(|&a| w.at(a) > qi).count() as i64;
            count >= 1 + i as i64 - j as i64
        })
    })
}

/// A skew shape `η/τ` whose boxes carry integer labels, with a row flagging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSkew {
    pub shape: SkewShape,
    pub labels: BTreeMap<(usize, usize), i64>,
    pub flag: Flagging,
    pub e: Vec<i64>,
}

/// The labeled skew shape of a 321-avoiding permutation: the 180 degree rotation of
/// `λ/μ` inside the rectangle of width `λ_1`, with row `i` labeled `e_i, ..., f_i`
/// from left to right.
pub fn bjs_labeled_skew(w: &Permutation) -> Result<LabeledSkew> {
    let pq = pq_from_perm(w)?;
    let (lam, mu) = shape_from_pq(&pq);
    let t = pq.t();
    let eta = (0..t).map(|i| lam[0] - mu[t - 1 - i]).collect();
    let tau = (0..t).map(|i| lam[0] - lam[t - 1 - i]).collect();
    let shape = SkewShape::new(Partition::new(eta)?, Partition::new(tau)?)?;
    let f: Vec<i64> = (0..t).map(|i| pq.p[t - 1 - i]).collect();
    let e: Vec<i64> = (0..t).map(|i| pq.q[t - 1 - i]).collect();
    let labels = shape
        .cells()
        .into_iter()
        .map(|(i, j)| ((i, j), e[i] + shape.inner()[i] - j as i64))
        .collect();
    Ok(LabeledSkew {
        shape,
        labels,
        flag: Flagging::new(f)?,
        e,
    })
}

/// A finite set of crosses `(row, column)`, both 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PipeDream {
    pub crosses: BTreeSet<(usize, usize)>,
}

impl PipeDream {
    pub fn new(crosses: impl IntoIterator<Item = (usize, usize)>) -> Self {
        PipeDream {
            crosses: crosses.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.crosses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crosses.is_empty()
    }

    /// Generators `s_{i+j-1}` read right to left along each row, rows top to bottom.
    pub fn word(&self) -> Vec<usize> {
        let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(i, j) in &self.crosses {
            rows.entry(i).or_default().push(j);
        }
        rows.into_iter()
            .flat_map(|(i, cols)| cols.into_iter().rev().map(move |j| i + j - 1))
            .collect()
    }

    /// The Demazure product of [`PipeDream::word`]: a crossing is absorbed when its
    /// two pipes have already crossed.
    pub fn demazure_product(&self) -> Permutation {
        demazure_product(&self.word())
    }

    /// Row multiplicities: the exponent vector of `x^P` over `x_1..x_n`.
    pub fn row_content(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for &(i, _) in &self.crosses {
            out[i - 1] += 1;
        }
        out
    }
}

impl fmt::Display for PipeDream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .crosses
            .iter()
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Demazure product `s_{k_1} * ... * s_{k_m}`.
pub fn demazure_product(word: &[usize]) -> Permutation {
    let n = word.iter().map(|k| k + 1).max().unwrap_or(0);
    let mut v: Vec<usize> = (1..=n).collect();
    for &k in word {
        if v[k - 1] < v[k] {
            v.swap(k - 1, k);
        }
    }
    Permutation(v).trimmed()
}

/// Pipe dreams inside the staircase `i + j <= n` with Demazure product `w`, having at
/// most `length(w) + max_extra` crosses, or exactly `length(w)` if `reduced_only`.
pub fn enumerate_pipe_dreams(
    w: &Permutation,
    reduced_only: bool,
    max_extra: usize,
) -> Result<Vec<PipeDream>> {
    let n = w.n();
    if n > MAX_PIPE_DREAM_N {
        return Err(Error::TooLarge {
            size: n,
            bound: MAX_PIPE_DREAM_N,
        });
    }
    let target = w.trimmed();
    let len = w.length();
    let max_crosses = if reduced_only { len } else { len + max_extra };
    // cells in reading order: rows top to bottom, right to left
    let cells: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (1..=n - i).rev().map(move |j| (i, j)))
        .collect();

    struct Search<'a> {
        cells: &'a [(usize, usize)],
        target: &'a Permutation,
        reduced_only: bool,
        max_crosses: usize,
        chosen: Vec<(usize, usize)>,
        out: Vec<PipeDream>,
    }

    impl Search<'_> {
        fn run(&mut self, k: usize, current: Vec<usize>) {
            if k == self.cells.len() {
                if Permutation(current).trimmed() == *self.target {
                    self.out.push(PipeDream::new(self.chosen.iter().copied()));
                }
                return;
            }
            self.run(k + 1, current.clone());
            if self.chosen.len() == self.max_crosses {
                return;
            }
            let (i, j) = self.cells[k];
            let g = i + j - 1;
            let ascent = current[g - 1] < current[g];
            if self.reduced_only && !ascent {
                return;
            }
            let mut next = current;
            if ascent {
                next.swap(g - 1, g);
                // the final product dominates every prefix product
                if !Permutation(next.clone()).bruhat_le(self.target) {
                    return;
                }
            }
            self.chosen.push((i, j));
            self.run(k + 1, next);
            self.chosen.pop();
        }
    }

    let mut search = Search {
        cells: &cells,
        target: &target,
        reduced_only,
        max_crosses,
        chosen: Vec::new(),
        out: Vec::new(),
    };
    search.run(0, (1..=n.max(1)).collect());
    let mut out = search.out;
    out.sort();
    Ok(out)
}

/// Sends entry `v` in box `b` to a cross at `(v, ω(b) - v + 1)`.
pub fn tableau_to_pipe_dream(ls: &LabeledSkew, t: &Filling) -> Result<PipeDream> {
    if t.shape() != &ls.shape {
        return Err(Error::Precondition(format!(
            "filling of {} does not match the labeled shape {}",
            t.shape(),
            ls.shape
        )));
    }
    let mut crosses = BTreeSet::new();
    for (&(i, j), set) in t.entries() {
        let omega = ls.labels[&(i, j)];
        let flag = ls.flag.bounds()[i];
        for &v in set {
            if v < 1 || v > flag || v > omega {
                return Err(Error::Precondition(format!(
                    "entry {v} in box ({},{}) violates the flag {flag} or the label {omega}",
                    i + 1,
                    j + 1
                )));
            }
            let cross = (v as usize, (omega - v + 1) as usize);
            if !crosses.insert(cross) {
                return Err(Error::Inconsistent(format!(
                    "two entries map to the cross {cross:?}"
                )));
            }
        }
    }
    Ok(PipeDream { crosses })
}
