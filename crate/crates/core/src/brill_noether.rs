//! Euler characteristics of two-pointed Brill–Noether loci and their special
//! cases, computed exactly by several independent routes.
//!
//! All values assume the locus has the expected dimension `ρ`; the library
//! cannot check that hypothesis.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{
    binomial, det_rational, f_generalized, factorial, falling_factorial, inv_factorial, sign_power,
    sort_rows_to_partition, to_integer, Partition,
};
use crate::tableaux::{count_alpha, count_rho_set_valued, count_standard_or_zero, count_zeta};

/// `(g, r, d, a, b)` with `0 <= a_0 < ... < a_r <= d` and the same for `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BNInstance {
    g: i64,
    r: i64,
    d: i64,
    a: Vec<i64>,
    b: Vec<i64>,
}

impl BNInstance {
    pub fn new(g: i64, r: i64, d: i64, a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        if g < 0 || r < 0 || d < 0 {
            return Err(Error::InvalidInstance(format!(
                "g={g}, r={r}, d={d} must be nonnegative"
            )));
        }
        for (name, s) in [("a", &a), ("b", &b)] {
            let ok = s.len() as i64 == r + 1
                && s.first().is_some_and(|&x| x >= 0)
                && s.last().is_some_and(|&x| x <= d)
                && s.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::InvalidInstance(format!(
                    "{name}={s:?} must be {} strictly increasing integers in 0..={d}",
                    r + 1
                )));
            }
        }
        Ok(BNInstance { g, r, d, a, b })
    }

    /// `a = b = (0, 1, ..., r)`.
    pub fn classical(g: i64, r: i64, d: i64) -> Result<Self> {
        let seq: Vec<i64> = (0..=r).collect();
        BNInstance::new(g, r, d, seq.clone(), seq)
    }

    /// `b = (0, 1, ..., r)`.
    pub fn one_pointed(g: i64, r: i64, d: i64, a: Vec<i64>) -> Result<Self> {
        BNInstance::new(g, r, d, a, (0..=r).collect())
    }

    pub fn g(&self) -> i64 {
        self.g
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn is_one_pointed(&self) -> bool {
        self.b.iter().enumerate().all(|(i, &x)| x == i as i64)
    }

    pub fn is_classical(&self) -> bool {
        self.is_one_pointed() && self.a.iter().enumerate().all(|(i, &x)| x == i as i64)
    }
}

/// `ρ = g - Σ_{i=0}^{r} (g - d + a_i + b_{r-i})`.
pub fn rho(inst: &BNInstance) -> i64 {
    let (g, d, r) = (inst.g, inst.d, inst.r as usize);
    g - (0..=r)
        .map(|i| g - d + inst.a[i] + inst.b[r - i])
        .sum::<i64>()
}

/// `a'_i = a_i + max(0, d - g - a_i - b_{r-i})`.
pub fn a_prime(inst: &BNInstance) -> Vec<i64> {
    let (g, d, r) = (inst.g, inst.d, inst.r as usize);
    (0..=r)
        .map(|i| inst.a[i] + (d - g - inst.a[i] - inst.b[r - i]).max(0))
        .collect()
}

/// `ρ' = g - Σ max(0, a_i + b_{r-i} + g - d)`.
pub fn rho_prime(inst: &BNInstance) -> i64 {
    let (g, d, r) = (inst.g, inst.d, inst.r as usize);
    g - (0..=r)
        .map(|i| (inst.a[i] + inst.b[r - i] + g - d).max(0))
        .sum::<i64>()
}

/// `(ρ', ρ' >= 0)`; a nonnegative `ρ'` guarantees the locus is non-empty.
pub fn nonempty_criterion(inst: &BNInstance) -> (i64, bool) {
    let rp = rho_prime(inst);
    (rp, rp >= 0)
}

/// Smallest `n` making every part of `μ` nonnegative.
pub fn min_n(inst: &BNInstance) -> i64 {
    (inst.b[inst.r as usize] + inst.g - inst.d).max(0)
}

/// `max(2g - 1 - d + b_r, min_n, 0)`.
pub fn default_n(inst: &BNInstance) -> i64 {
    (2 * inst.g - 1 - inst.d + inst.b[inst.r as usize]).max(min_n(inst))
}

/// Shapes of an instance for a normalization `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BNShapes {
    pub n: i64,
    pub lam: Partition,
    pub mu: Partition,
    pub rho: i64,
    pub a_prime: Vec<i64>,
    pub rho_prime: i64,
}

fn lam_from(n: i64, a: &[i64]) -> Vec<i64> {
    let t = a.len() as i64;
    (1..=t).map(|i| n + a[(t - i) as usize] - (t - i)).collect()
}

/// `λ_i = n + a_{r+1-i} - (r+1-i)` and `μ_i = n - b_{i-1} + i - 1 - g + d - r`.
pub fn shapes(inst: &BNInstance, n: Option<i64>) -> Result<BNShapes> {
    let threshold = default_n(inst);
    let n = n.unwrap_or(threshold);
    if n < threshold {
        return Err(Error::InvalidInstance(format!(
            "n={n} is below the validity threshold {threshold}"
        )));
    }
    let (g, r, d) = (inst.g, inst.r, inst.d);
    let mu: Vec<i64> = (1..=r + 1)
        .map(|i| n - inst.b[i as usize - 1] + i - 1 - g + d - r)
        .collect();
    let shapes = BNShapes {
        n,
        lam: Partition::new(lam_from(n, &inst.a))?,
        mu: Partition::new(mu)?,
        rho: rho(inst),
        a_prime: a_prime(inst),
        rho_prime: rho_prime(inst),
    };
    debug_assert_eq!(shapes.rho, g - (shapes.lam.size() - shapes.mu.size()));
    Ok(shapes)
}

fn is_skew(lam: &Partition, mu: &Partition) -> bool {
    lam.iter().zip(mu.iter()).all(|(l, m)| l >= m)
}

/// An Euler characteristic together with the flag raised when `ρ < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerValue {
    pub chi: BigInt,
    /// `ρ < 0`: the locus is expected to be empty and `χ` is reported as `0`.
    pub empty_expected: bool,
}

impl EulerValue {
    fn empty() -> Self {
        EulerValue {
            chi: BigInt::zero(),
            empty_expected: true,
        }
    }

    fn of(chi: BigInt) -> Self {
        EulerValue {
            chi,
            empty_expected: false,
        }
    }
}

/// Nonnegative integer vectors of length `len` summing to `total`.
fn compositions(total: i64, len: usize) -> Vec<Vec<i64>> {
    fn rec(left: i64, len: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == len {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=left {
            prefix.push(x);
            rec(left - x, len, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, len, &mut Vec::new(), &mut out);
    out
}

/// `Σ_{l,m} ∏ binom(μ_i, μ_i - m_i) binom(-λ_i, l_i - λ_i) · g! det(1/(l_i - m_j + j - i)!)`
/// over `m_i <= μ_i`, `l_i >= λ_i`, `|l/m| = |λ/μ| + ρ`.
pub fn euler_thm1_with(sh: &BNShapes) -> BigInt {
    let t = sh.lam.len();
    let mut total = BigInt::zero();
    for split in 0..=sh.rho {
        for dm in compositions(split, t) {
            if dm.iter().zip(sh.mu.iter()).any(|(x, m)| x > m) {
                continue;
            }
            let m: Vec<i64> = sh.mu.iter().zip(&dm).map(|(mu, x)| mu - x).collect();
            let cm: BigInt = sh
                .mu
                .iter()
                .zip(&dm)
                .map(|(&mu, &x)| binomial(mu, x))
                .product();
            for dl in compositions(sh.rho - split, t) {
                let l: Vec<i64> = sh.lam.iter().zip(&dl).map(|(lam, x)| lam + x).collect();
                // equal values l_i - i make the determinant vanish
                if sort_rows_to_partition(&l, &sh.lam).is_none() {
                    continue;
                }
                let cl: BigInt = sh
                    .lam
                    .iter()
                    .zip(&dl)
                    .map(|(&lam, &x)| binomial(-lam, x))
                    .product();
                total += &cm * cl * f_generalized(&l, &m);
            }
        }
    }
    total
}

pub fn euler_thm1(inst: &BNInstance) -> Result<EulerValue> {
    if rho(inst) < 0 {
        return Ok(EulerValue::empty());
    }
    Ok(EulerValue::of(euler_thm1_with(&shapes(inst, None)?)))
}

/// `Σ (-1)^{|λ⁺/λ|} α^{μ/μ⁻} ζ^{λ⁺/λ} f^{λ⁺/μ⁻}` over partitions `μ⁻ ⊆ μ`, `λ⁺ ⊇ λ`
/// with `|μ/μ⁻| + |λ⁺/λ| = ρ`, every factor counted by tableau enumeration.
pub fn euler_tableau_with(sh: &BNShapes) -> Result<BigInt> {
    let t = sh.lam.len();
    let mut total = BigInt::zero();
    for k in 0..=sh.rho {
        for mu_minus in sh.mu.subsets_of_size(k) {
            let alpha = count_alpha(&sh.mu, &mu_minus)?;
            if alpha.is_zero() {
                continue;
            }
            for lam_plus in sh.lam.supersets_of_size(t, sh.rho - k) {
                let zeta = count_zeta(&lam_plus, &sh.lam)?;
                if zeta.is_zero() {
                    continue;
                }
                let f = count_standard_or_zero(&lam_plus, &mu_minus);
                let term = &alpha * zeta * f;
                if (sh.rho - k) % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
        }
    }
    Ok(total)
}

pub fn euler_tableau(inst: &BNInstance) -> Result<EulerValue> {
    if rho(inst) < 0 {
        return Ok(EulerValue::empty());
    }
    Ok(EulerValue::of(euler_tableau_with(&shapes(inst, None)?)?))
}

/// Truncated power series in θ with rational coefficients.
fn series_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len();
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_det(m: &[Vec<Vec<BigRational>>], len: usize) -> Vec<BigRational> {
    let n = m.len();
    if n == 0 {
        let mut one = vec![BigRational::zero(); len];
        one[0] = BigRational::one();
        return one;
    }
    let mut total = vec![BigRational::zero(); len];
    for j in 0..n {
        let minor: Vec<Vec<Vec<BigRational>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, s)| s.clone())
                    .collect()
            })
            .collect();
        let term = series_mul(&m[0][j], &series_det(&minor, len));
        for (acc, v) in total.iter_mut().zip(term) {
            if j % 2 == 0 {
                *acc += v;
            } else {
                *acc -= v;
            }
        }
    }
    total
}

/// `g! · [θ^g] det((1+T)^{-λ_i+μ_j} θ^u / u!)` with `u = λ_i - μ_j + j - i`, where `T`
/// raises the index `u` by one.
pub fn euler_series_with(sh: &BNShapes, g: i64) -> BigInt {
    let t = sh.lam.len();
    let len = g as usize + 1;
    let m: Vec<Vec<Vec<BigRational>>> = (0..t)
        .map(|i| {
            (0..t)
                .map(|j| {
                    let u = sh.lam[i] - sh.mu[j] + j as i64 - i as i64;
                    let e = sh.mu[j] - sh.lam[i];
                    let mut s = vec![BigRational::zero(); len];
                    for (deg, slot) in s.iter_mut().enumerate() {
                        let k = deg as i64 - u;
                        if k >= 0 {
                            *slot = BigRational::from(binomial(e, k)) * inv_factorial(deg as i64);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let det = series_det(&m, len);
    let value = &det[g as usize] * BigRational::from(factorial(g as u64));
    to_integer(&value).expect("the Euler characteristic is an integer")
}

pub fn euler_series(inst: &BNInstance) -> Result<EulerValue> {
    if rho(inst) < 0 {
        return Ok(EulerValue::empty());
    }
    Ok(EulerValue::of(euler_series_with(
        &shapes(inst, None)?,
        inst.g,
    )))
}

fn with_delta(v: &[i64], i: usize, delta: i64) -> Vec<i64> {
    let mut out = v.to_vec();
    out[i] += delta;
    out
}

/// Both sides of `(r+1)(|λ/μ|+1) f^{λ/μ} = Σ (λ_i + r + 2 - i) f^{(λ+ε_i)/μ} - Σ (μ_i + r + 1 - i) f^{λ/(μ-ε_i)}`,
/// with `r + 1` the number of rows and terms for `μ_i = 0` dropped.
pub fn clpt_identity(lam: &Partition, mu: &Partition) -> (BigInt, BigInt) {
    let t = lam.len() as i64;
    let size = lam.size() - mu.size();
    let lhs = BigInt::from(t * (size + 1)) * f_generalized(lam, mu);
    let mut rhs = BigInt::zero();
    for i in 0..lam.len() {
        let row = i as i64 + 1;
        rhs += BigInt::from(lam[i] + t + 1 - row) * f_generalized(&with_delta(lam, i, 1), mu);
        if mu[i] > 0 {
            rhs -= BigInt::from(mu[i] + t - row) * f_generalized(lam, &with_delta(mu, i, -1));
        }
    }
    (lhs, rhs)
}

/// `χ = Σ μ_i f^{λ/(μ-ε_i)} - Σ λ_i f^{(λ+ε_i)/μ}` for `ρ = 1`; also checks [`clpt_identity`].
pub fn clpt_check(inst: &BNInstance) -> Result<BigInt> {
    if rho(inst) != 1 {
        return Err(Error::Precondition(format!(
            "needs rho = 1, got {}",
            rho(inst)
        )));
    }
    let sh = shapes(inst, None)?;
    let (lam, mu) = (&sh.lam, &sh.mu);
    let mut chi = BigInt::zero();
    for i in 0..lam.len() {
        if mu[i] > 0 {
            chi += BigInt::from(mu[i]) * f_generalized(lam, &with_delta(mu, i, -1));
        }
        chi -= BigInt::from(lam[i]) * f_generalized(&with_delta(lam, i, 1), mu);
    }
    if is_skew(lam, mu) {
        let (lhs, rhs) = clpt_identity(lam, mu);
        if lhs != rhs {
            return Err(Error::Inconsistent(format!(
                "standard tableau identity fails for {lam}/{mu}: {lhs} != {rhs}"
            )));
        }
    }
    Ok(chi)
}

fn require_one_pointed(inst: &BNInstance) -> Result<()> {
    if inst.is_one_pointed() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "needs b = (0..{}), got {:?}",
            inst.r, inst.b
        )))
    }
}

/// `λ̄_i = g - d + a_{r+1-i} + i - 1`; parts may be negative.
pub fn reduced_partition(g: i64, d: i64, a: &[i64]) -> Vec<i64> {
    let t = a.len() as i64;
    (1..=t)
        .map(|i| g - d + a[(t - i) as usize] + i - 1)
        .collect()
}

/// `Σ_{l >= λ̄, |l/λ̄| = ρ} ∏ binom(-λ̄_i, l_i - λ̄_i) · g! ∏_{i<j}(l_i - l_j + j - i) / ∏ (l_i + r + 1 - i)!`.
pub fn one_pointed_euler(inst: &BNInstance) -> Result<EulerValue> {
    require_one_pointed(inst)?;
    let rho = rho(inst);
    if rho < 0 {
        return Ok(EulerValue::empty());
    }
    let lam = reduced_partition(inst.g, inst.d, &inst.a);
    let t = lam.len();
    let gfact = BigRational::from(factorial(inst.g as u64));
    let mut total = BigRational::zero();
    for dl in compositions(rho, t) {
        let l: Vec<i64> = lam.iter().zip(&dl).map(|(a, b)| a + b).collect();
        let coef: BigInt = lam
            .iter()
            .zip(&dl)
            .map(|(&x, &k)| binomial(-x, k))
            .product();
        if coef.is_zero() {
            continue;
        }
        let mut vandermonde = BigInt::one();
        for i in 0..t {
            for j in i + 1..t {
                vandermonde *= l[i] - l[j] + (j - i) as i64;
            }
        }
        let mut term = BigRational::from(coef * vandermonde) * &gfact;
        for (i, &li) in l.iter().enumerate() {
            term *= inv_factorial(li + t as i64 - (i as i64 + 1));
        }
        total += term;
    }
    Ok(EulerValue::of(to_integer(&total).ok_or_else(|| {
        Error::Inconsistent(format!("non-integer value {total}"))
    })?))
}

/// `-g! Σ_k (g - d + r + a_k - k) ∏_{i<j}(a_j - a_i + δ^k_j - δ^k_i) / ∏_i (g - d + r + a_i + δ^k_i)!` for `ρ = 1`.
pub fn one_pointed_rho1_delta(inst: &BNInstance) -> Result<BigInt> {
    require_one_pointed(inst)?;
    if rho(inst) != 1 {
        return Err(Error::Precondition(format!(
            "needs rho = 1, got {}",
            rho(inst)
        )));
    }
    let (g, d, r) = (inst.g, inst.d, inst.r);
    let a = &inst.a;
    let t = a.len();
    let mut total = BigRational::zero();
    for k in 0..t {
        let delta = |i: usize| i64::from(i == k);
        let mut num = BigInt::from(g - d + r + a[k] - k as i64);
        for i in 0..t {
            for j in i + 1..t {
                num *= a[j] - a[i] + delta(j) - delta(i);
            }
        }
        let mut term = BigRational::from(num);
        for (i, &ai) in a.iter().enumerate() {
            term *= inv_factorial(g - d + r + ai + delta(i));
        }
        total += term;
    }
    total *= BigRational::from(-factorial(g as u64));
    to_integer(&total).ok_or_else(|| Error::Inconsistent(format!("non-integer value {total}")))
}

/// `(-1)^{ρ'} · #{ρ'-standard set-valued tableaux on λ̄(a')}`, and `0` when `ρ' < 0`.
///
/// When `λ̄(a)` is a partition, `a' = a` and `ρ' = ρ`.
pub fn chan_pflueger_count(inst: &BNInstance) -> Result<EulerValue> {
    require_one_pointed(inst)?;
    if rho(inst) < 0 {
        return Ok(EulerValue::empty());
    }
    let rp = rho_prime(inst);
    if rp < 0 {
        return Ok(EulerValue::of(BigInt::zero()));
    }
    let lam = Partition::new(reduced_partition(inst.g, inst.d, &a_prime(inst)))?;
    Ok(EulerValue::of(
        BigInt::from(sign_power(rp)) * count_rho_set_valued(&lam, rp),
    ))
}

/// `ρ(g, r, d) = g - (r+1)(g - d + r)`.
pub fn classical_rho(g: i64, r: i64, d: i64) -> i64 {
    g - (r + 1) * (g - d + r)
}

/// `(-1)^ρ / ρ! Σ_{|γ|=ρ} f^γ ∏ (s + γ_i - i)_{γ_i} f^{λ+γ}` with `s = g - d + r`, `λ = (s)^{r+1}`.
pub fn classical_euler(g: i64, r: i64, d: i64) -> Result<BigInt> {
    let rho = classical_rho(g, r, d);
    if g < 0 || r < 0 || !(0..=g).contains(&rho) {
        return Err(Error::InvalidInstance(format!(
            "classical formula needs 0 <= rho <= g, got rho={rho} for g={g}, r={r}, d={d}"
        )));
    }
    let s = g - d + r;
    let t = r as usize + 1;
    let zero = Partition::zero(t);
    let mut total = BigInt::zero();
    for gamma in zero.supersets_of_size(t, rho) {
        let f_gamma = count_standard_or_zero(&gamma, &zero);
        let falling: BigInt = gamma
            .iter()
            .enumerate()
            .map(|(i, &gi)| falling_factorial(s + gi - (i as i64 + 1), gi))
            .product();
        if falling.is_zero() {
            continue;
        }
        let outer = Partition::new(gamma.iter().map(|&x| x + s).collect())?;
        total += f_gamma * falling * count_standard_or_zero(&outer, &zero);
    }
    let value = BigRational::new(total * sign_power(rho), factorial(rho as u64));
    to_integer(&value).ok_or_else(|| Error::Inconsistent(format!("non-integer value {value}")))
}

/// `N^r_{g,d} = g! ∏_{i=0}^{r} i! / (s + i)!`.
pub fn castelnuovo_number(g: i64, r: i64, d: i64) -> BigRational {
    let s = g - d + r;
    let mut v = BigRational::from(factorial(g as u64));
    for i in 0..=r {
        v *= BigRational::from(factorial(i as u64)) * inv_factorial(s + i);
    }
    v
}

/// Integer polynomial in `s`, lowest degree first.
type SPoly = Vec<BigInt>;

fn spoly_mul(a: &SPoly, b: &SPoly) -> SPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn spoly_eval(p: &SPoly, s: i64) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * s + c)
}

/// Divides by `(s - root)`, assuming `root` is a root.
fn spoly_deflate(p: &SPoly, root: i64) -> SPoly {
    let n = p.len();
    let mut q = vec![BigInt::zero(); n - 1];
    let mut carry = BigInt::zero();
    for k in (1..n).rev() {
        carry = &p[k] + carry * root;
        q[k - 1] = carry.clone();
    }
    q
}

fn lin(c0: i64, c1: i64) -> SPoly {
    vec![BigInt::from(c0), BigInt::from(c1)]
}

/// Evaluates `num(s) / den(s)` at `s`, cancelling common factors `(s - s0)` first.
fn eval_ratio(mut num: SPoly, mut den: SPoly, s: i64) -> BigRational {
    while spoly_eval(&den, s).is_zero() {
        assert!(
            spoly_eval(&num, s).is_zero(),
            "pole of a closed form at s = {s}"
        );
        num = spoly_deflate(&num, s);
        den = spoly_deflate(&den, s);
    }
    BigRational::new(spoly_eval(&num, s), spoly_eval(&den, s))
}

/// The printed closed forms applicable to `(g, r, d)`, each evaluated exactly. The
/// rational factors in `s` are evaluated with removable zeros of the denominator cancelled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedForms {
    pub castelnuovo: Option<BigInt>,
    pub rho1: Option<BigInt>,
    pub rho2: Option<BigInt>,
    pub rho3: Option<BigInt>,
    pub s_one: Option<BigInt>,
}

impl ClosedForms {
    /// The value from whichever closed form applies (they agree when several do).
    pub fn value(&self) -> Option<&BigInt> {
        self.castelnuovo
            .as_ref()
            .or(self.rho1.as_ref())
            .or(self.rho2.as_ref())
            .or(self.rho3.as_ref())
            .or(self.s_one.as_ref())
    }
}

pub fn closed_forms(g: i64, r: i64, d: i64) -> Result<ClosedForms> {
    let rho = classical_rho(g, r, d);
    let s = g - d + r;
    if g < 0 || r < 0 || !(0..=g).contains(&rho) || !((0..=3).contains(&rho) || s == 1) {
        return Err(Error::InvalidInstance(format!(
            "no closed form for g={g}, r={r}, d={d} (rho={rho}, g-d+r={s})"
        )));
    }
    let int = |q: BigRational| {
        to_integer(&q).ok_or_else(|| Error::Inconsistent(format!("closed form gave {q}")))
    };
    let n = castelnuovo_number(g, r, d);
    let rr = r + 1;
    let sq = |p: &SPoly| spoly_mul(p, p);
    let mut out = ClosedForms::default();
    match rho {
        0 => out.castelnuovo = Some(int(n.clone())?),
        1 => {
            // -g! s (r+1) / (s + r + 1) ∏ i!/(s+i)!
            let f = eval_ratio(lin(0, rr), lin(r + 1, 1), s);
            out.rho1 = Some(int(-f * &n)?);
        }
        2 => {
            let num = spoly_mul(&vec![BigInt::from(rr * rr)], &sq(&lin(0, 1)));
            let den = spoly_mul(&lin(2 * r, 2), &lin(r + 2, 1));
            out.rho2 = Some(int(eval_ratio(num, den, s) * &n)?);
        }
        3 => {
            // (r+1)^2 s^2 [((r+s+1)^2 - 2) s (r+1) - 2]
            let bracket = {
                let sq_term = sq(&lin(r + 1, 1));
                let mut inner = sq_term;
                inner[0] -= 2;
                let mut b = spoly_mul(&inner, &lin(0, rr));
                b[0] -= 2;
                b
            };
            let num = spoly_mul(
                &spoly_mul(&vec![BigInt::from(rr * rr)], &sq(&lin(0, 1))),
                &bracket,
            );
            let den = [
                lin(r - 1, 1),
                lin(r, 1),
                lin(r + 1, 1),
                lin(r + 2, 1),
                lin(r + 3, 1),
            ]
            .iter()
            .fold(vec![BigInt::from(6)], |acc, f| spoly_mul(&acc, f));
            out.rho3 = Some(int(-eval_ratio(num, den, s) * &n)?);
        }
        _ => {}
    }
    if s == 1 {
        out.s_one = Some(binomial(-r - 1, rho));
    }
    Ok(out)
}

/// `det(1/(a_{r-i} + b_j + g - d)!)_{0 <= i,j <= r}`, the coefficient of `θ^{g-ρ}` in the
/// class of the locus; `0` unless `λ/μ` is a skew shape.
pub fn numclass_coefficient(inst: &BNInstance) -> Result<BigRational> {
    numclass_coefficient_with(inst, &shapes(inst, None)?)
}

pub fn numclass_coefficient_with(inst: &BNInstance, sh: &BNShapes) -> Result<BigRational> {
    if !is_skew(&sh.lam, &sh.mu) {
        return Ok(BigRational::zero());
    }
    let r = inst.r as usize;
    let m: Vec<Vec<BigRational>> = (0..=r)
        .map(|i| {
            (0..=r)
                .map(|j| inv_factorial(inst.a[r - i] + inst.b[j] + inst.g - inst.d))
                .collect()
        })
        .collect();
    Ok(det_rational(&m))
}

/// All instances with `g <= g_max`, `r <= r_max`, `d <= d_max(g, r)` and `ρ` in
/// `rho_min..=rho_max`, ordered by `(g, r, d, a, b)`.
pub fn instances(
    g_range: std::ops::RangeInclusive<i64>,
    r_range: std::ops::RangeInclusive<i64>,
    d_max: impl Fn(i64, i64) -> i64,
    rho_range: std::ops::RangeInclusive<i64>,
) -> Vec<BNInstance> {
    let mut out = Vec::new();
    for g in g_range {
        for r in r_range.clone() {
            for d in r.max(0)..=d_max(g, r) {
                let seqs = increasing_sequences(r as usize + 1, d);
                let mut by_sum: BTreeMap<i64, Vec<&Vec<i64>>> = BTreeMap::new();
                for s in &seqs {
                    by_sum.entry(s.iter().sum()).or_default().push(s);
                }
                // ρ = g - (r+1)(g-d) - Σa - Σb
                let base = g - (r + 1) * (g - d);
                for a in &seqs {
                    for target in rho_range.clone() {
                        let want = base - target - a.iter().sum::<i64>();
                        if let Some(bs) = by_sum.get(&want) {
                            for b in bs {
                                out.push(BNInstance {
                                    g,
                                    r,
                                    d,
                                    a: a.clone(),
                                    b: (*b).clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Strictly increasing sequences of length `len` in `0..=max`, lexicographic.
pub fn increasing_sequences(len: usize, max: i64) -> Vec<Vec<i64>> {
    fn rec(lo: i64, max: i64, len: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for x in lo..=max {
            prefix.push(x);
            rec(x + 1, max, len, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, max, len, &mut Vec::new(), &mut out);
    out
}

/// Selection of χ pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    All,
    Thm1,
    Tableau,
    Series,
    Closed,
}

/// χ from every requested and applicable pipeline, keyed by method name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub instance: BNInstance,
    pub shapes: BNShapes,
    pub empty_expected: bool,
    pub values: BTreeMap<&'static str, BigInt>,
    pub numclass: BigRational,
    pub nonempty: bool,
}

impl Evaluation {
    /// Whether every computed χ is the same number.
    pub fn agree(&self) -> bool {
        let mut vals = self.values.values();
        match vals.next() {
            Some(first) => vals.all(|v| v == first),
            None => true,
        }
    }

    pub fn chi(&self) -> Option<&BigInt> {
        self.values.values().next()
    }

    /// `sign(χ) == (-1)^ρ`, or `None` when `χ = 0`. Observed, never assumed.
    pub fn sign_matches_rho(&self) -> Option<bool> {
        let chi = self.chi()?;
        if chi.is_zero() {
            return None;
        }
        Some(chi.is_negative() == (self.shapes.rho % 2 != 0))
    }
}

pub fn evaluate(inst: &BNInstance, method: Method) -> Result<Evaluation> {
    let sh = shapes(inst, None)?;
    let rho = sh.rho;
    let numclass = numclass_coefficient_with(inst, &sh)?;
    let (_, nonempty) = nonempty_criterion(inst);
    let mut values = BTreeMap::new();
    let all = method == Method::All;
    let classical_ok = inst.is_classical() && inst.g - inst.d + inst.r >= 0;
    if method == Method::Closed && !classical_ok {
        return Err(Error::Precondition(
            "closed forms need a classical instance (a = b = 0..r) with g - d + r >= 0".into(),
        ));
    }
    if rho < 0 {
        let tag = match method {
            Method::All | Method::Thm1 => "thm1",
            Method::Tableau => "tableau",
            Method::Series => "series",
            Method::Closed => "closed",
        };
        values.insert(tag, BigInt::zero());
        return Ok(Evaluation {
            instance: inst.clone(),
            shapes: sh,
            empty_expected: true,
            values,
            numclass,
            nonempty,
        });
    }
    if all || method == Method::Thm1 {
        values.insert("thm1", euler_thm1_with(&sh));
    }
    if all || method == Method::Tableau {
        values.insert("tableau", euler_tableau_with(&sh)?);
    }
    if all || method == Method::Series {
        values.insert("series", euler_series_with(&sh, inst.g));
    }
    if all {
        if rho == 1 {
            values.insert("clpt", clpt_check(inst)?);
        }
        if inst.is_one_pointed() {
            values.insert("one_pointed", one_pointed_euler(inst)?.chi);
            values.insert("chan_pflueger", chan_pflueger_count(inst)?.chi);
            if rho == 1 {
                values.insert("one_pointed_delta", one_pointed_rho1_delta(inst)?);
            }
        }
        if rho == 0 {
            let v = numclass.clone() * BigRational::from(factorial(inst.g as u64));
            if let Some(v) = to_integer(&v) {
                values.insert("numclass", v);
            } else {
                return Err(Error::Inconsistent(format!(
                    "g! times the class coefficient is {v}"
                )));
            }
        }
    }
    if classical_ok && (all || method == Method::Closed) {
        if all {
            values.insert("classical", classical_euler(inst.g, inst.r, inst.d)?);
        }
        if let Ok(cf) = closed_forms(inst.g, inst.r, inst.d) {
            if let Some(v) = cf.value() {
                values.insert("closed", v.clone());
            }
        } else if method == Method::Closed {
            return Err(Error::Precondition(format!(
                "no closed form applies (rho={rho})"
            )));
        }
    }
    Ok(Evaluation {
        instance: inst.clone(),
        shapes: sh,
        empty_expected: false,
        values,
        numclass,
        nonempty,
    })
}

/// Whether the determinant-sum, tableau and class values are unchanged from `n` to `n + 1`.
pub fn n_invariant(inst: &BNInstance) -> Result<bool> {
    if rho(inst) < 0 {
        return Ok(true);
    }
    let a = shapes(inst, None)?;
    let b = shapes(inst, Some(a.n + 1))?;
    Ok(euler_thm1_with(&a) == euler_thm1_with(&b)
        && euler_tableau_with(&a)? == euler_tableau_with(&b)?
        && numclass_coefficient_with(inst, &a)? == numclass_coefficient_with(inst, &b)?)
}

/// Evaluates many instances in parallel, preserving order.
pub fn evaluate_many(insts: &[BNInstance], method: Method) -> Vec<Result<Evaluation>> {
    insts.par_iter().map(|i| evaluate(i, method)).collect()
}
