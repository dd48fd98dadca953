//! Polynomials in `x_1.., y_1.., b` (with `b` standing for β), the determinant
//! `Δ_{λ/μ}(c; β)`, and the oracles it is checked against.
//!
//! Canonical text order: higher total degree first; within a degree, the
//! exponent vector over `(x_1, x_2, ..., y_1, y_2, ..., b)` is compared
//! lexicographically, larger first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, Partition};
use crate::permutations::{
    bjs_labeled_skew, enumerate_pipe_dreams, pq_from_perm, shape_from_pq, PQData, Permutation,
};
use crate::tableaux::enumerate_flagged_set_valued_capped;

/// Largest `n` for the divided-difference oracle.
pub const MAX_SCHUBERT_N: usize = 7;
/// Largest `n` for the pipe-dream and tableau generating functions.
pub const MAX_GROTHENDIECK_N: usize = 6;

/// Exponents of `x_1.., y_1.., b`, with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    x: Vec<u32>,
    y: Vec<u32>,
    b: u32,
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

impl Monomial {
    pub fn new(x: Vec<u32>, y: Vec<u32>, b: u32) -> Self {
        Monomial {
            x: trim(x),
            y: trim(y),
            b,
        }
    }

    pub fn one() -> Self {
        Monomial::default()
    }

    /// `x_i^e`, 1-based.
    pub fn x_pow(i: usize, e: u32) -> Self {
        let mut x = vec![0; i];
        x[i - 1] = e;
        Monomial::new(x, Vec::new(), 0)
    }

    pub fn y_pow(j: usize, e: u32) -> Self {
        let mut y = vec![0; j];
        y[j - 1] = e;
        Monomial::new(Vec::new(), y, 0)
    }

    pub fn beta_pow(e: u32) -> Self {
        Monomial::new(Vec::new(), Vec::new(), e)
    }

    pub fn x_exp(&self, i: usize) -> u32 {
        self.x.get(i - 1).copied().unwrap_or(0)
    }

    pub fn y_exp(&self, j: usize) -> u32 {
        self.y.get(j - 1).copied().unwrap_or(0)
    }

    pub fn x_exps(&self) -> &[u32] {
        &self.x
    }

    pub fn beta_degree(&self) -> u32 {
        self.b
    }

    pub fn xy_degree(&self) -> u32 {
        self.x.iter().sum::<u32>() + self.y.iter().sum::<u32>()
    }

    pub fn degree(&self) -> u32 {
        self.xy_degree() + self.b
    }

    pub fn is_one(&self) -> bool {
        self.x.is_empty() && self.y.is_empty() && self.b == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let add = |a: &[u32], b: &[u32]| {
            let n = a.len().max(b.len());
            (0..n)
                .map(|k| a.get(k).unwrap_or(&0) + b.get(k).unwrap_or(&0))
                .collect::<Vec<_>>()
        };
        Monomial {
            x: add(&self.x, &other.x),
            y: add(&self.y, &other.y),
            b: self.b + other.b,
        }
    }

    fn with_x(&self, i: usize, e: u32) -> Monomial {
        let mut x = self.x.clone();
        if x.len() < i {
            x.resize(i, 0);
        }
        x[i - 1] = e;
        Monomial::new(x, self.y.clone(), self.b)
    }
}

fn cmp_desc(a: &[u32], b: &[u32]) -> Ordering {
    let n = a.len().max(b.len());
    for k in 0..n {
        let (u, v) = (a.get(k).unwrap_or(&0), b.get(k).unwrap_or(&0));
        match v.cmp(u) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    /// Canonical printing order: the first monomial printed is the smallest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| cmp_desc(&self.x, &other.x))
            .then_with(|| cmp_desc(&self.y, &other.y))
            .then_with(|| other.b.cmp(&self.b))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        let mut push = |name: String, e: u32| match e {
            0 => {}
            1 => factors.push(name),
            _ => factors.push(format!("{name}^{e}")),
        };
        for (k, &e) in self.x.iter().enumerate() {
            push(format!("x{}", k + 1), e);
        }
        for (k, &e) in self.y.iter().enumerate() {
            push(format!("y{}", k + 1), e);
        }
        push("b".into(), self.b);
        write!(f, "{}", factors.join("*"))
    }
}

/// Coefficient rings used here: `BigInt` and `BigRational`.
pub trait Coeff: Clone + fmt::Debug + fmt::Display + PartialEq + Signed + Send + Sync {}
impl<T: Clone + fmt::Debug + fmt::Display + PartialEq + Signed + Send + Sync> Coeff for T {}

/// A polynomial with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    terms: BTreeMap<Monomial, C>,
}

pub type MultiPoly = Poly<BigInt>;

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn x(i: usize) -> Self {
        Poly::monomial(Monomial::x_pow(i, 1), C::one())
    }

    pub fn y(j: usize) -> Self {
        Poly::monomial(Monomial::y_pow(j, 1), C::one())
    }

    pub fn beta() -> Self {
        Poly::monomial(Monomial::beta_pow(1), C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Poly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Product, dropping terms of β-degree above `cap`.
    pub fn mul_capped(&self, other: &Self, cap: Option<u32>) -> Self {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if cap.is_some_and(|k| m1.b + m2.b > k) {
                    continue;
                }
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn beta_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.b).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Drops terms of β-degree above `cap`.
    pub fn truncate_beta(&self, cap: u32) -> Self {
        self.filter(|m| m.b <= cap)
    }

    /// Drops terms of total degree above `cap`.
    pub fn truncate_degree(&self, cap: u32) -> Self {
        self.filter(|m| m.degree() <= cap)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// β = 0.
    pub fn at_beta_zero(&self) -> Self {
        self.truncate_beta(0)
    }

    /// All `y_j = 0`.
    pub fn at_y_zero(&self) -> Self {
        self.filter(|m| m.y.is_empty())
    }

    /// Exchanges `x_i` and `x_{i+1}`.
    pub fn swap_x(&self, i: usize) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (a, b) = (m.x_exp(i), m.x_exp(i + 1));
            out.add_term(m.with_x(i, b).with_x(i + 1, a), c.clone());
        }
        out
    }

    /// Quotient and remainder on division by `x_i - x_{i+1}`, viewing `self` as a
    /// polynomial in `x_i`.
    pub fn div_rem_x_difference(&self, i: usize) -> (Self, Self) {
        let mut by_power: BTreeMap<u32, Poly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            by_power
                .entry(m.x_exp(i))
                .or_default()
                .add_term(m.with_x(i, 0), c.clone());
        }
        let Some(&top) = by_power.keys().next_back() else {
            return (Poly::zero(), Poly::zero());
        };
        let r = Poly::<C>::x(i + 1);
        // synthetic division by (x_i - r)
        let mut quotient = Poly::zero();
        let mut carry = Poly::zero();
        for k in (1..=top).rev() {
            let ck = by_power.remove(&k).unwrap_or_default();
            carry = &ck + &(&r * &carry);
            quotient = &quotient + &(&carry * &Poly::monomial(Monomial::x_pow(i, k - 1), C::one()));
        }
        let c0 = by_power.remove(&0).unwrap_or_default();
        let remainder = &c0 + &(&r * &carry);
        (quotient, remainder)
    }

    /// `∂_i f = (f - s_i f) / (x_i - x_{i+1})`; the division must be exact.
    pub fn divided_difference(&self, i: usize) -> Result<Self> {
        let numerator = self - &self.swap_x(i);
        let (q, r) = numerator.div_rem_x_difference(i);
        if !r.is_zero() {
            return Err(Error::Inconsistent(format!(
                "division by x{i} - x{} left remainder {r}",
                i + 1
            )));
        }
        Ok(q)
    }
}

impl<C: Coeff> std::ops::Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, other: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> std::ops::Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, other: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> std::ops::Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, other: &Poly<C>) -> Poly<C> {
        self.mul_capped(other, None)
    }
}

impl<C: Coeff> std::ops::Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coeff> std::ops::Add for Poly<C> {
    type Output = Poly<C>;
    fn add(self, other: Poly<C>) -> Poly<C> {
        &self + &other
    }
}

impl<C: Coeff> std::ops::Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(self, other: Poly<C>) -> Poly<C> {
        &self - &other
    }
}

impl<C: Coeff> std::ops::Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, other: Poly<C>) -> Poly<C> {
        &self * &other
    }
}

impl<C: Coeff> std::iter::Sum for Poly<C> {
    fn sum<I: Iterator<Item = Poly<C>>>(iter: I) -> Self {
        iter.fold(Poly::zero(), |acc, p| &acc + &p)
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            let body = if m.is_one() {
                abs.to_string()
            } else if abs.is_one() {
                m.to_string()
            } else {
                format!("{abs}*{m}")
            };
            match (k, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn parse_term(term: &str, whole: &str) -> Result<(Monomial, BigInt)> {
    let bad = || Error::Parse(format!("cannot parse term {term:?} in {whole:?}"));
    let mut coeff = BigInt::one();
    let mut mono = Monomial::one();
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(bad());
        }
        if factor.chars().all(|c| c.is_ascii_digit()) {
            coeff *= factor.parse::<BigInt>().map_err(|_| bad())?;
            continue;
        }
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad())?),
            None => (factor, 1),
        };
        let m = match base.as_bytes().first() {
            Some(b'b') if base.len() == 1 => Monomial::beta_pow(exp),
            Some(b'x') | Some(b'y') => {
                let idx: usize = base[1..].parse().map_err(|_| bad())?;
                if idx == 0 {
                    return Err(bad());
                }
                if base.starts_with('x') {
                    Monomial::x_pow(idx, exp)
                } else {
                    Monomial::y_pow(idx, exp)
                }
            }
            _ => return Err(bad()),
        };
        mono = mono.mul(&m);
    }
    Ok((Monomial::new(mono.x, mono.y, mono.b), coeff))
}

impl FromStr for MultiPoly {
    type Err = Error;

    /// Reads the canonical text form (terms in any order).
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = MultiPoly::zero();
        let mut start = 0;
        let bytes = compact.as_bytes();
        let mut pieces = Vec::new();
        for k in 1..=bytes.len() {
            if k == bytes.len() || bytes[k] == b'+' || bytes[k] == b'-' {
                pieces.push(&compact[start..k]);
                start = k;
            }
        }
        for piece in pieces {
            let (negative, body) = match piece.as_bytes()[0] {
                b'-' => (true, &piece[1..]),
                b'+' => (false, &piece[1..]),
                _ => (false, piece),
            };
            let (m, c) = parse_term(body, s)?;
            out.add_term(m, if negative { -c } else { c });
        }
        Ok(out)
    }
}

/// Cap on the β-degree kept in K-theoretic computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeCap(pub u32);

impl DegreeCap {
    pub fn next(self) -> DegreeCap {
        DegreeCap(self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChernMode {
    Cohomology,
    KTheory,
}

/// Variable bounds for `c(i,j) = ∏_{a <= q_i}(1 - u y_a) / ∏_{b <= p_j}(1 - u x_b)`.
///
/// In `KTheory` mode each `x_b` is replaced by `x_b / (1 + β x_b)`, expanded in β.
/// The `y_a` enter as they are: the K-theoretic row root is named `y_a` directly.
/// With `double = false` the numerator is `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMatrixSpec {
    pub row_bounds: Vec<usize>,
    pub col_bounds: Vec<usize>,
    pub mode: ChernMode,
    pub double: bool,
}

impl CMatrixSpec {
    pub fn from_pq(pq: &PQData, mode: ChernMode, double: bool) -> Self {
        CMatrixSpec {
            row_bounds: pq.q().iter().map(|&q| q as usize).collect(),
            col_bounds: pq.p().iter().map(|&p| p as usize).collect(),
            mode,
            double,
        }
    }
}

/// Coefficients of `u^0..=u^max_k` in `c(i,j)`, each truncated at β-degree `cap`.
fn c_series(
    spec: &CMatrixSpec,
    i: usize,
    j: usize,
    max_k: usize,
    cap: DegreeCap,
) -> Vec<MultiPoly> {
    let mul_series = |a: &[MultiPoly], b: &[MultiPoly]| {
        let mut out = vec![MultiPoly::zero(); max_k + 1];
        for (s, pa) in a.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (t, pb) in b.iter().enumerate().take(max_k + 1 - s) {
                if !pb.is_zero() {
                    out[s + t] = &out[s + t] + &pa.mul_capped(pb, Some(cap.0));
                }
            }
        }
        out
    };
    let mut series = vec![MultiPoly::zero(); max_k + 1];
    series[0] = MultiPoly::one();
    if spec.double {
        for a in 1..=spec.row_bounds[i] {
            let mut factor = vec![MultiPoly::zero(); max_k + 1];
            factor[0] = MultiPoly::one();
            if max_k >= 1 {
                factor[1] = -&MultiPoly::y(a);
            }
            series = mul_series(&series, &factor);
        }
    }
    for b in 1..=spec.col_bounds[j] {
        // Σ_m u^m x^m (1 + βx)^{-m}
        let factor: Vec<MultiPoly> = (0..=max_k as u32)
            .map(|m| match spec.mode {
                ChernMode::Cohomology => MultiPoly::monomial(Monomial::x_pow(b, m), BigInt::one()),
                ChernMode::KTheory => {
                    let mut p = MultiPoly::zero();
                    for s in 0..=cap.0 {
                        let mono = Monomial::x_pow(b, m + s).mul(&Monomial::beta_pow(s));
                        p.add_term(mono, binomial(-(m as i64), s as i64));
                    }
                    p
                }
            })
            .collect();
        series = mul_series(&series, &factor);
    }
    series
}

/// Coefficient of `u^k` in `c(i,j)` (0-based `i`, `j`); `0` for `k < 0`.
pub fn c_coeff(spec: &CMatrixSpec, i: usize, j: usize, k: i64, cap: DegreeCap) -> MultiPoly {
    if k < 0 {
        return MultiPoly::zero();
    }
    c_series(spec, i, j, k as usize, cap)
        .pop()
        .expect("k + 1 coefficients")
}

/// Entries `Σ_{k=0}^{cap} binom(λ_i - μ_j + k - 1, k) β^k c_{λ_i - μ_j + j - i + k}(i,j)`;
/// only `k = 0` when `beta_on` is false.
pub fn delta_matrix(
    lam: &Partition,
    mu: &Partition,
    spec: &CMatrixSpec,
    beta_on: bool,
    cap: DegreeCap,
) -> Result<Vec<Vec<MultiPoly>>> {
    let t = lam.len();
    if mu.len() != t || spec.row_bounds.len() != t || spec.col_bounds.len() != t {
        return Err(Error::Precondition(format!(
            "lam {lam}, mu {mu} and the c-matrix bounds must all have the same length"
        )));
    }
    let kmax = if beta_on { cap.0 as i64 } else { 0 };
    let mut matrix = Vec::with_capacity(t);
    for i in 0..t {
        let mut row = Vec::with_capacity(t);
        for j in 0..t {
            let base = lam[i] - mu[j];
            let index = base + j as i64 - i as i64;
            let top = index + kmax;
            if top < 0 {
                row.push(MultiPoly::zero());
                continue;
            }
            let series = c_series(spec, i, j, top as usize, cap);
            let mut entry = MultiPoly::zero();
            for k in 0..=kmax {
                let sub = index + k;
                if sub < 0 {
                    continue;
                }
                let coef = binomial(base + k - 1, k);
                if coef.is_zero() {
                    continue;
                }
                let term = series[sub as usize].mul_capped(
                    &MultiPoly::monomial(Monomial::beta_pow(k as u32), coef),
                    Some(cap.0),
                );
                entry = &entry + &term;
            }
            row.push(entry);
        }
        matrix.push(row);
    }
    Ok(matrix)
}

/// Determinant by Laplace expansion along the first row, truncated at β-degree `cap`.
pub fn det_poly<C: Coeff>(m: &[Vec<Poly<C>>], cap: Option<u32>) -> Poly<C> {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Poly::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly<C>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul_capped(&det_poly(&minor, cap), cap);
        total = if j % 2 == 0 {
            &total + &term
        } else {
            &total - &term
        };
    }
    total
}

/// Reflection across the anti-diagonal: `M'_{i,j} = M_{t-1-j, t-1-i}`.
pub fn antidiagonal_reflect<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let t = m.len();
    (0..t)
        .map(|i| (0..t).map(|j| m[t - 1 - j][t - 1 - i].clone()).collect())
        .collect()
}

/// `Δ_{λ/μ}(c; β)` at a fixed cap, without the stabilization check.
pub fn delta_determinant_at(
    lam: &Partition,
    mu: &Partition,
    spec: &CMatrixSpec,
    beta_on: bool,
    cap: DegreeCap,
) -> Result<MultiPoly> {
    let m = delta_matrix(lam, mu, spec, beta_on, cap)?;
    Ok(det_poly(&m, Some(cap.0)))
}

/// `Δ_{λ/μ}(c; β)`, rejected unless the result at `cap` equals the result at `cap + 1`.
pub fn delta_determinant(
    lam: &Partition,
    mu: &Partition,
    spec: &CMatrixSpec,
    beta_on: bool,
    cap: DegreeCap,
) -> Result<MultiPoly> {
    let a = delta_determinant_at(lam, mu, spec, beta_on, cap)?;
    let needs_check = beta_on || spec.mode == ChernMode::KTheory;
    if needs_check && a != delta_determinant_at(lam, mu, spec, beta_on, cap.next())? {
        return Err(Error::Unstabilized { cap: cap.0 });
    }
    Ok(a)
}

fn require_321(w: &Permutation) -> Result<PQData> {
    if !w.is_321_avoiding() {
        return Err(Error::InvalidPermutation(format!(
            "{w} contains the pattern 321"
        )));
    }
    pq_from_perm(w)
}

/// The cohomological determinant for a 321-avoiding `w` (1 for the identity).
pub fn schubert_determinant(w: &Permutation, double: bool) -> Result<MultiPoly> {
    if w.is_identity() {
        return Ok(MultiPoly::one());
    }
    let pq = require_321(w)?;
    let (lam, mu) = shape_from_pq(&pq);
    let spec = CMatrixSpec::from_pq(&pq, ChernMode::Cohomology, double);
    delta_determinant(&lam, &mu, &spec, false, DegreeCap(0))
}

/// The K-theoretic determinant `Δ_{λ/μ}(c^K; β)` for a 321-avoiding `w`.
pub fn grothendieck_determinant(
    w: &Permutation,
    double: bool,
    cap: DegreeCap,
) -> Result<MultiPoly> {
    if w.is_identity() {
        return Ok(MultiPoly::one());
    }
    let pq = require_321(w)?;
    let (lam, mu) = shape_from_pq(&pq);
    let spec = CMatrixSpec::from_pq(&pq, ChernMode::KTheory, double);
    delta_determinant(&lam, &mu, &spec, true, cap)
}

/// Default β-degree cap for `w`.
pub fn default_cap(w: &Permutation) -> DegreeCap {
    DegreeCap(w.length() as u32 + 4)
}

/// `∏_{i+j <= n} (x_i - y_j)`, the class of the longest permutation of `S_n`.
pub fn top_class(n: usize) -> MultiPoly {
    let mut p = MultiPoly::one();
    for i in 1..n {
        for j in 1..=n - i {
            p = &p * &(&MultiPoly::x(i) - &MultiPoly::y(j));
        }
    }
    p
}

/// Ascent sequences `k_1, k_2, ...` leading from `w` up to the longest element of `S_n`.
pub fn chains_to_top(w: &Permutation, n: usize) -> Vec<Vec<usize>> {
    let w = w.extended(n);
    let asc = w.ascents();
    if asc.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in asc {
        for mut rest in chains_to_top(&w.times_simple(k), n) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Applies `∂_{k_1} ∂_{k_2} ... ∂_{k_m}` to the top class, where `k` is an ascent
/// chain from `w` to the longest element.
pub fn schubert_along_chain(n: usize, chain: &[usize]) -> Result<MultiPoly> {
    let mut p = top_class(n);
    for &k in chain.iter().rev() {
        p = p.divided_difference(k)?;
    }
    Ok(p)
}

/// Double Schubert polynomial by divided differences from the top class.
pub fn schubert_oracle(w: &Permutation) -> Result<MultiPoly> {
    let w = w.trimmed();
    if w.n() > MAX_SCHUBERT_N {
        return Err(Error::TooLarge {
            size: w.n(),
            bound: MAX_SCHUBERT_N,
        });
    }
    let n = w.n().max(1);
    let mut u = w.extended(n);
    let mut chain = Vec::new();
    while let Some(&k) = u.ascents().first() {
        chain.push(k);
        u = u.times_simple(k);
    }
    schubert_along_chain(n, &chain)
}

/// The double cross weight `x_i ⊕ (-y_j) = x_i - y_j - β x_i y_j` for the formal group
/// law `F(a, b) = a + b + β a b`. This is the one convention constant fixing which double
/// Grothendieck polynomial the determinant represents.
pub fn double_cross_weight(i: usize, j: usize) -> MultiPoly {
    let xy = &MultiPoly::x(i) * &MultiPoly::y(j);
    &(&MultiPoly::x(i) - &MultiPoly::y(j)) - &(&MultiPoly::beta() * &xy)
}

fn groth_pipe_sum(w: &Permutation, double: bool, cap: DegreeCap) -> Result<MultiPoly> {
    let ell = w.length() as u32;
    let dreams = enumerate_pipe_dreams(w, false, cap.0 as usize)?;
    let mut total = MultiPoly::zero();
    for pd in dreams {
        let extra = pd.len() as u32 - ell;
        let mut term = MultiPoly::monomial(Monomial::beta_pow(extra), BigInt::one());
        for &(i, j) in &pd.crosses {
            let wt = if double {
                double_cross_weight(i, j)
            } else {
                MultiPoly::x(i)
            };
            term = term.mul_capped(&wt, Some(cap.0));
        }
        total = &total + &term;
    }
    Ok(total)
}

/// `Σ_P β^{|P| - ℓ(w)} ∏_{(i,j) ∈ P} wt(i,j)` over pipe dreams with Demazure product `w`.
pub fn grothendieck_oracle(w: &Permutation, double: bool, cap: DegreeCap) -> Result<MultiPoly> {
    let w = w.trimmed();
    if w.n() > MAX_GROTHENDIECK_N {
        return Err(Error::TooLarge {
            size: w.n(),
            bound: MAX_GROTHENDIECK_N,
        });
    }
    let a = groth_pipe_sum(&w, double, cap)?;
    if a != groth_pipe_sum(&w, double, cap.next())? {
        return Err(Error::Unstabilized { cap: cap.0 });
    }
    Ok(a)
}

fn fsvt_sum(w: &Permutation, cap: DegreeCap) -> Result<MultiPoly> {
    let ls = bjs_labeled_skew(w)?;
    let ell = w.length();
    let n = w.n();
    let fillings =
        enumerate_flagged_set_valued_capped(&ls.shape, &ls.flag, Some(ell + cap.0 as usize))?;
    let mut total = MultiPoly::zero();
    for t in fillings {
        let x = t.content(n);
        let mono = Monomial::new(x, Vec::new(), (t.total_entries() - ell) as u32);
        total.add_term(mono, BigInt::one());
    }
    Ok(total)
}

/// `Σ_T β^{|T| - |σ(w)|} x^T` over flagged set-valued tableaux on the labeled skew shape of `w`.
pub fn fsvt_generating_function(w: &Permutation, cap: DegreeCap) -> Result<MultiPoly> {
    let w = w.trimmed();
    if w.is_identity() {
        return Ok(MultiPoly::one());
    }
    if w.n() > MAX_GROTHENDIECK_N {
        return Err(Error::TooLarge {
            size: w.n(),
            bound: MAX_GROTHENDIECK_N,
        });
    }
    let a = fsvt_sum(&w, cap)?;
    if a != fsvt_sum(&w, cap.next())? {
        return Err(Error::Unstabilized { cap: cap.0 });
    }
    Ok(a)
}

pub type RationalPoly = Poly<BigRational>;

fn elementary(vals: &[RationalPoly], i: usize, deg_cap: u32) -> RationalPoly {
    let mut e = vec![RationalPoly::zero(); i + 1];
    e[0] = RationalPoly::one();
    for v in vals {
        for k in (1..=i).rev() {
            let add = (&e[k - 1] * v).truncate_degree(deg_cap);
            e[k] = &e[k] + &add;
        }
    }
    e.swap_remove(i)
}

fn lex_leading(p: &RationalPoly) -> Option<(Monomial, BigRational)> {
    p.terms()
        .max_by(|a, b| cmp_desc(&b.0.x, &a.0.x))
        .map(|(m, c)| (m.clone(), c.clone()))
}

/// Writes a symmetric polynomial in `x_1..x_n` as a polynomial in `e_1..e_n`; returns
/// the coefficient of each exponent vector `(d_1, ..., d_n)` of `e_1^{d_1} ... e_n^{d_n}`.
pub fn to_elementary_basis(p: &RationalPoly, n: usize) -> Result<BTreeMap<Vec<u32>, BigRational>> {
    let xs: Vec<RationalPoly> = (1..=n).map(RationalPoly::x).collect();
    let es: Vec<RationalPoly> = (0..=n).map(|k| elementary(&xs, k, u32::MAX)).collect();
    let mut rest = p.clone();
    let mut out = BTreeMap::new();
    while let Some((m, c)) = lex_leading(&rest) {
        let a: Vec<u32> = (1..=n).map(|k| m.x_exp(k)).collect();
        if m.x_exps().len() > n || a.windows(2).any(|w| w[0] < w[1]) || !m.y.is_empty() || m.b != 0
        {
            return Err(Error::Precondition(format!(
                "{p} is not symmetric in x1..x{n}"
            )));
        }
        let d: Vec<u32> = (0..n)
            .map(|k| a[k] - a.get(k + 1).copied().unwrap_or(0))
            .collect();
        let mut prod = RationalPoly::one();
        for (k, &dk) in d.iter().enumerate() {
            prod = &prod * &es[k + 1].pow(dk);
        }
        rest = &rest - &prod.scale(&c);
        out.insert(d, c);
    }
    Ok(out)
}

/// Residue of `e_i(1 - e^{-x_1}, ..., 1 - e^{-x_n}) - e_i(x_1, ..., x_n)` modulo
/// `(p_2, ..., p_n) + (x_1, ..., x_n)^{n+1}`, as coefficients of `t^0..=t^n` where
/// `t = p_1`. Modulo `p_2..p_n`, Newton's identities give `e_k = t^k / k!`.
pub fn lemma_powers_residue(n: usize, i: usize) -> Result<Vec<BigRational>> {
    if i == 0 || i > n {
        return Err(Error::Precondition(format!(
            "need 1 <= i <= n, got i={i}, n={n}"
        )));
    }
    let cap = n as u32;
    let one_minus_exp: Vec<RationalPoly> = (1..=n)
        .map(|v| {
            let mut p = RationalPoly::zero();
            for k in 1..=cap {
                let c = BigRational::new(
                    if k % 2 == 1 {
                        BigInt::one()
                    } else {
                        -BigInt::one()
                    },
                    factorial(k as u64),
                );
                p.add_term(Monomial::x_pow(v, k), c);
            }
            p
        })
        .collect();
    let xs: Vec<RationalPoly> = (1..=n).map(RationalPoly::x).collect();
    let diff = &elementary(&one_minus_exp, i, cap) - &elementary(&xs, i, cap);
    let mut residue = vec![BigRational::zero(); n + 1];
    for (d, c) in to_elementary_basis(&diff, n)? {
        let mut coef = c;
        let mut deg = 0usize;
        for (k, &dk) in d.iter().enumerate() {
            let kf = BigRational::new(BigInt::one(), factorial(k as u64 + 1));
            for _ in 0..dk {
                coef *= kf.clone();
            }
            deg += (k + 1) * dk as usize;
        }
        if deg <= n {
            residue[deg] += coef;
        }
    }
    Ok(residue)
}

/// Whether `e_i(1 - e^{-x}) ≡ e_i(x)` modulo `(p_2, ..., p_n) + (x_1, ..., x_n)^{n+1}`.
pub fn verify_lemma_powers(n: usize, i: usize) -> Result<bool> {
    Ok(lemma_powers_residue(n, i)?.iter().all(Zero::is_zero))
}
