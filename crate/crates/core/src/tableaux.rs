//! Tableau enumerators and counters, with the binomial determinants that count
//! the same objects.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, det_integer, Partition, SkewShape};

/// Comparison required between neighbouring entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Weak,
    Strict,
}

impl Order {
    fn step(self) -> i64 {
        match self {
            Order::Weak => 0,
            Order::Strict => 1,
        }
    }

    fn holds(self, a: i64, b: i64) -> bool {
        a + self.step() <= b
    }
}

/// Constraints for single-valued fillings: orders along rows and down columns,
/// and an inclusive range of allowed entries for each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauRule {
    pub rows: Order,
    pub cols: Order,
    pub bounds: Vec<(i64, i64)>,
}

impl TableauRule {
    /// Row semi-standard: strict rows, weakly increasing columns, row `i` in `1..=mu_i`.
    pub fn row_semistandard(mu: &Partition) -> Self {
        TableauRule {
            rows: Order::Strict,
            cols: Order::Weak,
            bounds: mu.iter().map(|&m| (1, m)).collect(),
        }
    }

    /// Strict with row `i` in `1..=lam_plus_i - 1`.
    pub fn strict_below_outer(lam_plus: &Partition) -> Self {
        TableauRule {
            rows: Order::Strict,
            cols: Order::Strict,
            bounds: lam_plus.iter().map(|&l| (1, l - 1)).collect(),
        }
    }

    /// Strict with row `i` (1-based) in `1..=i-1`.
    pub fn strict_below_row_index(rows: usize) -> Self {
        TableauRule {
            rows: Order::Strict,
            cols: Order::Strict,
            bounds: (0..rows as i64).map(|i| (1, i)).collect(),
        }
    }

    /// Semistandard (weak rows, strict columns) with row `i` in `-lam_i..=-1`.
    pub fn semistandard_negative(lam: &Partition) -> Self {
        TableauRule {
            rows: Order::Weak,
            cols: Order::Strict,
            bounds: lam.iter().map(|&l| (-l, -1)).collect(),
        }
    }
}

/// Set-valued conventions. `Strict` puts every entry of a box below every entry
/// of the boxes to its right and below. `Flagged` only asks `max <= min` along rows
/// and keeps `max < min` down columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetValuedKind {
    Strict,
    Flagged,
}

impl SetValuedKind {
    fn row_order(self) -> Order {
        match self {
            SetValuedKind::Strict => Order::Strict,
            SetValuedKind::Flagged => Order::Weak,
        }
    }
}

/// Row bounds `f_1, ..., f_t` for flagged tableaux.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flagging(Vec<i64>);

impl Flagging {
    pub fn new(bounds: Vec<i64>) -> Result<Self> {
        if bounds.iter().all(|&f| f >= 1) {
            Ok(Flagging(bounds))
        } else {
            Err(Error::Precondition(format!(
                "flag bounds {bounds:?} must be positive"
            )))
        }
    }

    pub fn bounds(&self) -> &[i64] {
        &self.0
    }
}

/// A filling of a skew shape by non-empty sorted sets of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Filling {
    shape: SkewShape,
    entries: BTreeMap<(usize, usize), Vec<i64>>,
}

impl Filling {
    pub fn new(shape: SkewShape, entries: BTreeMap<(usize, usize), Vec<i64>>) -> Result<Self> {
        let cells = shape.cells();
        if entries.len() != cells.len() || cells.iter().any(|c| !entries.contains_key(c)) {
            return Err(Error::Precondition(
                "filling must have exactly one entry set per cell".into(),
            ));
        }
        for set in entries.values() {
            if set.is_empty() || set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Precondition(format!(
                    "entry set {set:?} must be non-empty and strictly increasing"
                )));
            }
        }
        Ok(Filling { shape, entries })
    }

    /// A filling by single values listed in row-major cell order.
    pub fn from_values(shape: SkewShape, values: &[i64]) -> Result<Self> {
        let cells = shape.cells();
        if cells.len() != values.len() {
            return Err(Error::Precondition("one value per cell required".into()));
        }
        let entries = cells
            .into_iter()
            .zip(values)
            .map(|(c, &v)| (c, vec![v]))
            .collect();
        Filling::new(shape, entries)
    }

    pub fn shape(&self) -> &SkewShape {
        &self.shape
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Vec<i64>> {
        &self.entries
    }

    pub fn get(&self, cell: (usize, usize)) -> Option<&[i64]> {
        self.entries.get(&cell).map(Vec::as_slice)
    }

    /// Total number of entries over all boxes.
    pub fn total_entries(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Single values in row-major order, if every box is a singleton.
    pub fn values(&self) -> Option<Vec<i64>> {
        self.entries
            .values()
            .map(|s| (s.len() == 1).then(|| s[0]))
            .collect()
    }

    /// The multiplicity of each value `1..=n`, i.e. the exponent vector of `x^T`.
    pub fn content(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for &v in self.entries.values().flatten() {
            assert!(v >= 1 && v as usize <= n, "entry {v} outside 1..={n}");
            out[v as usize - 1] += 1;
        }
        out
    }

    pub fn transpose(&self) -> Filling {
        let entries = self
            .entries
            .iter()
            .map(|(&(i, j), s)| ((j, i), s.clone()))
            .collect();
        Filling {
            shape: self.shape.conjugate(),
            entries,
        }
    }

    /// Adds `delta * (column index, 1-based)` to every entry.
    pub fn shift_by_column(&self, delta: i64) -> Filling {
        let entries = self
            .entries
            .iter()
            .map(|(&(i, j), s)| {
                (
                    (i, j),
                    s.iter().map(|v| v + delta * (j as i64 + 1)).collect(),
                )
            })
            .collect();
        Filling {
            shape: self.shape.clone(),
            entries,
        }
    }

    pub fn satisfies(&self, rule: &TableauRule) -> bool {
        self.entries.iter().all(|(&(i, j), s)| {
            let v = s[0];
            if s.len() != 1 || v < rule.bounds[i].0 || v > rule.bounds[i].1 {
                return false;
            }
            let left = j > 0 && self.shape.contains_cell((i, j - 1));
            let up = i > 0 && self.shape.contains_cell((i - 1, j));
            (!left || rule.rows.holds(self.entries[&(i, j - 1)][0], v))
                && (!up || rule.cols.holds(self.entries[&(i - 1, j)][0], v))
        })
    }
}

/// Strict tableaux on `λ⁺/λ` with row `i` in `1..=λ⁺_i - 1` correspond to semistandard
/// tableaux with row `i` in `-λ_i..=-1` by subtracting the column index.
pub fn strict_to_semistandard(t: &Filling) -> Filling {
    t.shift_by_column(-1)
}

pub fn semistandard_to_strict(t: &Filling) -> Filling {
    t.shift_by_column(1)
}

struct Walker<'a> {
    shape: &'a SkewShape,
    cells: Vec<(usize, usize)>,
    grid: Vec<Vec<i64>>,
}

impl<'a> Walker<'a> {
    fn new(shape: &'a SkewShape) -> Self {
        let grid = shape.outer().iter().map(|&l| vec![0; l as usize]).collect();
        Walker {
            shape,
            cells: shape.cells(),
            grid,
        }
    }

    fn lower_bound(&self, (i, j): (usize, usize), rule: &TableauRule) -> i64 {
        let mut lo = rule.bounds[i].0;
        if j > 0 && self.shape.contains_cell((i, j - 1)) {
            lo = lo.max(self.grid[i][j - 1] + rule.rows.step());
        }
        if i > 0 && self.shape.contains_cell((i - 1, j)) {
            lo = lo.max(self.grid[i - 1][j] + rule.cols.step());
        }
        lo
    }

    fn count(&mut self, k: usize, rule: &TableauRule) -> u64 {
        if k == self.cells.len() {
            return 1;
        }
        let (i, j) = self.cells[k];
        let lo = self.lower_bound((i, j), rule);
        // the rest of a strict row needs room to the right
        let room = match rule.rows {
            Order::Strict => self.shape.outer()[i] - 1 - j as i64,
            Order::Weak => 0,
        };
        let hi = rule.bounds[i].1 - room;
        let mut total = 0;
        for v in lo..=hi {
            self.grid[i][j] = v;
            total += self.count(k + 1, rule);
        }
        total
    }

    fn collect(&mut self, k: usize, rule: &TableauRule, out: &mut Vec<Vec<i64>>) {
        if k == self.cells.len() {
            out.push(self.cells.iter().map(|&(i, j)| self.grid[i][j]).collect());
            return;
        }
        let (i, j) = self.cells[k];
        let lo = self.lower_bound((i, j), rule);
        for v in lo..=rule.bounds[i].1 {
            self.grid[i][j] = v;
            self.collect(k + 1, rule, out);
        }
    }
}

fn check_rule(shape: &SkewShape, rule: &TableauRule) -> Result<()> {
    if rule.bounds.len() < shape.rows() {
        return Err(Error::Precondition(format!(
            "{} row bounds given for a shape with {} rows",
            rule.bounds.len(),
            shape.rows()
        )));
    }
    Ok(())
}

/// Counts single-valued fillings of `shape` obeying `rule` by backtracking.
pub fn count_fillings(shape: &SkewShape, rule: &TableauRule) -> Result<BigInt> {
    check_rule(shape, rule)?;
    Ok(BigInt::from(Walker::new(shape).count(0, rule)))
}

/// All single-valued fillings obeying `rule`, cells filled row-major with
/// increasing candidate values.
pub fn enumerate_fillings(shape: &SkewShape, rule: &TableauRule) -> Result<Vec<Filling>> {
    check_rule(shape, rule)?;
    let mut raw = Vec::new();
    Walker::new(shape).collect(0, rule, &mut raw);
    Ok(raw
        .into_iter()
        .map(|vals| Filling::from_values(shape.clone(), &vals).expect("walker output is a filling"))
        .collect())
}

/// Number of standard tableaux on `shape`, by removing outer corners one at a time.
pub fn count_standard(shape: &SkewShape) -> BigInt {
    fn rec(outer: &mut Vec<i64>, inner: &[i64], memo: &mut HashMap<Vec<i64>, BigInt>) -> BigInt {
        if outer.as_slice() == inner {
            return BigInt::one();
        }
        if let Some(v) = memo.get(outer.as_slice()) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        for i in 0..outer.len() {
            let corner = outer[i] > inner[i] && (i + 1 == outer.len() || outer[i + 1] < outer[i]);
            if corner {
                outer[i] -= 1;
                total += rec(outer, inner, memo);
                outer[i] += 1;
            }
        }
        memo.insert(outer.clone(), total.clone());
        total
    }
    rec(
        &mut shape.outer().to_vec(),
        shape.inner(),
        &mut HashMap::new(),
    )
}

/// `f^{λ/μ}` for partitions, `0` when `μ ⊄ λ`.
pub fn count_standard_or_zero(outer: &Partition, inner: &Partition) -> BigInt {
    match SkewShape::new(outer.clone(), inner.clone()) {
        Ok(s) => count_standard(&s),
        Err(_) => BigInt::zero(),
    }
}

/// Row semi-standard tableaux on `μ/μ⁻`, row `i` entries in `1..=μ_i`, by enumeration.
pub fn count_alpha(mu: &Partition, mu_minus: &Partition) -> Result<BigInt> {
    let shape = SkewShape::new(mu.clone(), mu_minus.clone())?;
    count_fillings(&shape, &TableauRule::row_semistandard(shape.outer()))
}

/// `det binom(μ_i, μ_i - μ⁻_j + j - i)`.
pub fn alpha_determinant(mu: &Partition, mu_minus: &Partition) -> BigInt {
    let t = mu.len();
    let m = (0..t)
        .map(|i| {
            (0..t)
                .map(|j| binomial(mu[i], mu[i] - mu_minus.get(j) + j as i64 - i as i64))
                .collect()
        })
        .collect();
    det_integer(m)
}

/// Strict tableaux on `λ⁺/λ`, row `i` entries in `1..=λ⁺_i - 1`, by enumeration.
pub fn count_zeta(lam_plus: &Partition, lam: &Partition) -> Result<BigInt> {
    let shape = SkewShape::new(lam_plus.clone(), lam.clone())?;
    count_fillings(&shape, &TableauRule::strict_below_outer(shape.outer()))
}

/// `det binom(λ⁺_i + j - i - 1, λ⁺_i - λ_j + j - i)`.
pub fn zeta_determinant(lam_plus: &Partition, lam: &Partition) -> BigInt {
    let t = lam_plus.len();
    let m = (0..t)
        .map(|i| {
            (0..t)
                .map(|j| {
                    let (i, j) = (i as i64, j as i64);
                    let lp = lam_plus[i as usize];
                    binomial(lp + j - i - 1, lp - lam.get(j as usize) + j - i)
                })
                .collect()
        })
        .collect();
    det_integer(m)
}

/// Strict tableaux on `ν⁺/ν` with row `i` (1-based) entries in `1..=i-1`.
pub fn count_g(nu_plus: &Partition, nu: &Partition) -> Result<BigInt> {
    let shape = SkewShape::new(nu_plus.clone(), nu.clone())?;
    count_fillings(&shape, &TableauRule::strict_below_row_index(shape.rows()))
}

/// Set-valued tableaux on `λ` using each of `1..=|λ|+ρ` exactly once, with
/// `max < min` both along rows and down columns.
///
/// Values are placed in increasing order. The boxes holding a placed value form a
/// partition `S`; the next value either starts a box addable to `S` or joins a
/// corner of `S`.
pub fn count_rho_set_valued(lam: &Partition, rho: i64) -> BigInt {
    assert!(rho >= 0, "rho must be nonnegative");
    fn rec(
        s: &mut Vec<i64>,
        extra: i64,
        lam: &[i64],
        rho: i64,
        memo: &mut HashMap<(Vec<i64>, i64), BigInt>,
    ) -> BigInt {
        let full = s.as_slice() == lam;
        if full && extra == rho {
            return BigInt::one();
        }
        let key = (s.clone(), extra);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        let t = s.len();
        if extra < rho {
            let corners = (0..t)
                .filter(|&i| s[i] > 0 && (i + 1 == t || s[i + 1] < s[i]))
                .count();
            if corners > 0 {
                total += rec(s, extra + 1, lam, rho, memo) * corners;
            }
        }
        for i in 0..t {
            if s[i] < lam[i] && (i == 0 || s[i - 1] > s[i]) {
                s[i] += 1;
                total += rec(s, extra, lam, rho, memo);
                s[i] -= 1;
            }
        }
        memo.insert(key, total.clone());
        total
    }
    let lam = lam.parts();
    rec(&mut vec![0; lam.len()], 0, lam, rho, &mut HashMap::new())
}

/// `Σ g^{ν⁺/ν} f^{ν⁺}` over `ν⁺ ⊇ ν = λ'` with `|ν⁺/ν| = ρ`.
pub fn lenart_rhs(lam: &Partition, rho: i64) -> BigInt {
    assert!(rho >= 0, "rho must be nonnegative");
    let nu = lam.conjugate();
    let len = nu.len() + rho as usize;
    let nu_padded = nu.with_len(len).expect("padding only adds zeros");
    nu_padded
        .supersets_of_size(len, rho)
        .iter()
        .map(|nu_plus| {
            let g = count_g(nu_plus, &nu_padded).expect("supersets contain nu");
            if g.is_zero() {
                return g;
            }
            g * count_standard(&SkewShape::straight(nu_plus.clone()))
        })
        .sum()
}

fn push_subsets(lo: i64, hi: i64, max_len: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    for a in lo..=hi {
        prefix.push(a);
        out.push(prefix.clone());
        if prefix.len() < max_len {
            push_subsets(a + 1, hi, max_len, prefix, out);
        }
        prefix.pop();
    }
}

/// Non-empty subsets of `lo..=hi` with at most `max_len` elements, in lexicographic order.
fn subsets_lex(lo: i64, hi: i64, max_len: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if max_len > 0 {
        push_subsets(lo, hi, max_len, &mut Vec::new(), &mut out);
    }
    out
}

/// All set-valued fillings of the given kind with row `i` entries in `bounds[i]`
/// and at most `max_total` entries overall. Cells are visited row-major and
/// candidate sets are tried in lexicographic order.
pub fn enumerate_set_valued(
    shape: &SkewShape,
    kind: SetValuedKind,
    bounds: &[(i64, i64)],
    max_total: Option<usize>,
) -> Result<Vec<Filling>> {
    if bounds.len() != shape.rows() {
        return Err(Error::Precondition(format!(
            "{} row bounds given for a shape with {} rows",
            bounds.len(),
            shape.rows()
        )));
    }
    let cells = shape.cells();
    let budget = max_total.unwrap_or(usize::MAX);
    if cells.len() > budget {
        return Ok(Vec::new());
    }
    let mut grid: HashMap<(usize, usize), Vec<i64>> = HashMap::new();
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        used: usize,
        cells: &[(usize, usize)],
        shape: &SkewShape,
        kind: SetValuedKind,
        bounds: &[(i64, i64)],
        budget: usize,
        grid: &mut HashMap<(usize, usize), Vec<i64>>,
        out: &mut Vec<Filling>,
    ) {
        if k == cells.len() {
            let entries = cells.iter().map(|c| (*c, grid[c].clone())).collect();
            out.push(Filling {
                shape: shape.clone(),
                entries,
            });
            return;
        }
        let (i, j) = cells[k];
        let mut lo = bounds[i].0;
        if j > 0 && shape.contains_cell((i, j - 1)) {
            let left = *grid[&(i, j - 1)].last().expect("non-empty");
            lo = lo.max(left + kind.row_order().step());
        }
        if i > 0 && shape.contains_cell((i - 1, j)) {
            lo = lo.max(grid[&(i - 1, j)].last().expect("non-empty") + 1);
        }
        // each remaining cell needs at least one entry
        let spare = budget - used - (cells.len() - k - 1);
        for set in subsets_lex(lo, bounds[i].1, spare) {
            let n = set.len();
            grid.insert((i, j), set);
            rec(
                k + 1,
                used + n,
                cells,
                shape,
                kind,
                bounds,
                budget,
                grid,
                out,
            );
        }
        grid.remove(&(i, j));
    }

    rec(
        0, 0, &cells, shape, kind, bounds, budget, &mut grid, &mut out,
    );
    Ok(out)
}

/// Flagged set-valued tableaux: `max <= min` along rows, `max < min` down columns,
/// row `i` entries in `1..=f_i`.
pub fn enumerate_flagged_set_valued(shape: &SkewShape, flag: &Flagging) -> Result<Vec<Filling>> {
    enumerate_flagged_set_valued_capped(shape, flag, None)
}

/// As [`enumerate_flagged_set_valued`], keeping only fillings with at most `max_total` entries.
pub fn enumerate_flagged_set_valued_capped(
    shape: &SkewShape,
    flag: &Flagging,
    max_total: Option<usize>,
) -> Result<Vec<Filling>> {
    if flag.bounds().len() != shape.rows() {
        return Err(Error::Precondition(format!(
            "flag of length {} for a shape with {} rows",
            flag.bounds().len(),
            shape.rows()
        )));
    }
    let bounds: Vec<_> = flag.bounds().iter().map(|&f| (1, f)).collect();
    enumerate_set_valued(shape, SetValuedKind::Flagged, &bounds, max_total)
}
