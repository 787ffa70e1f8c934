//! The mixed-level array and the generic array algebra on it.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::combin::{binomial, checked_product, subsets};
use crate::error::{Error, Result};
use crate::group::Group;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertStatus {
    Verified,
    /// Built by a construction whose output was too large to re-check
    /// within the verification budget.
    Unverified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub strength: u32,
    pub status: CertStatus,
}

impl Certificate {
    pub fn verified(strength: u32) -> Self {
        Certificate { strength, status: CertStatus::Verified }
    }
}

/// A failed balance check: the projection onto `columns` sees `tuple`
/// `observed` times instead of `expected`. `expected` is `None` when the
/// row count is not a multiple of the number of level combinations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrengthWitness {
    pub columns: Vec<usize>,
    pub tuple: Vec<u32>,
    pub observed: u64,
    pub expected: Option<u64>,
}

impl fmt::Display for StrengthWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "columns {:?} see {:?} {} times", self.columns, self.tuple, self.observed)?;
        match self.expected {
            Some(e) => write!(f, ", expected {e}"),
            None => f.write_str(", index is not an integer"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    pub min_distance: u32,
    pub distances: BTreeSet<u32>,
}

/// An r×n integer matrix whose column j takes values in `0..alphabets[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedLevelArray {
    rows: usize,
    alphabets: Vec<u32>,
    data: Vec<u32>,
    cert: Option<Certificate>,
}

impl MixedLevelArray {
    pub fn new(alphabets: Vec<u32>, data: Vec<u32>) -> Result<Self> {
        let n = alphabets.len();
        if n == 0 {
            return Err(Error::InvalidArray("no columns".into()));
        }
        if let Some(&a) = alphabets.iter().find(|&&a| a < 2) {
            return Err(Error::InvalidArray(format!("alphabet size {a} below 2")));
        }
        if data.is_empty() || data.len() % n != 0 {
            return Err(Error::InvalidArray(format!(
                "{} entries do not fill rows of {n}",
                data.len()
            )));
        }
        for (i, &x) in data.iter().enumerate() {
            if x >= alphabets[i % n] {
                return Err(Error::InvalidArray(format!(
                    "entry {x} at row {} column {} exceeds {} levels",
                    i / n,
                    i % n,
                    alphabets[i % n]
                )));
            }
        }
        Ok(MixedLevelArray { rows: data.len() / n, alphabets, data, cert: None })
    }

    pub fn from_rows<R: AsRef<[u32]>>(alphabets: Vec<u32>, rows: &[R]) -> Result<Self> {
        let n = alphabets.len();
        let mut data = Vec::with_capacity(rows.len() * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::InvalidArray(format!("row {i} has {} entries, expected {n}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::new(alphabets, data)
    }

    /// A single column listing `0..s`, written `(s)` in the Kronecker sum.
    pub fn levels(s: u32) -> Result<Self> {
        Self::new(vec![s], (0..s).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[u32] {
        &self.alphabets
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.cols();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.data.chunks_exact(self.cols())
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols() + j]
    }

    pub fn certificate(&self) -> Option<Certificate> {
        self.cert
    }

    pub fn certified_strength(&self) -> Option<u32> {
        self.cert.map(|c| c.strength)
    }

    pub fn with_certificate(mut self, cert: Option<Certificate>) -> Self {
        self.cert = cert;
        self
    }

    /// Same rows, possibly reordered, so certificates survive.
    pub fn sorted(&self) -> Self {
        let mut rows: Vec<&[u32]> = self.iter_rows().collect();
        rows.sort();
        let data = rows.concat();
        MixedLevelArray { rows: self.rows, alphabets: self.alphabets.clone(), data, cert: self.cert }
    }

    /// Rows `start..end` as a new array without a certificate.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        let n = self.cols();
        MixedLevelArray {
            rows: end - start,
            alphabets: self.alphabets.clone(),
            data: self.data[start * n..end * n].to_vec(),
            cert: None,
        }
    }

    fn checked_col(&self, col: usize) -> Result<()> {
        if col >= self.cols() {
            Err(Error::ColumnOutOfRange { col, cols: self.cols() })
        } else {
            Ok(())
        }
    }

    /// Number of row visits a full strength-t check costs.
    pub fn check_cost(&self, t: u32) -> u64 {
        binomial(self.cols(), t as usize).saturating_mul(self.rows as u64)
    }

    /// Balance check of one column subset.
    pub fn check_projection(&self, cols: &[usize]) -> core::result::Result<(), StrengthWitness> {
        let n = self.cols();
        let radices: Vec<u32> = cols.iter().map(|&c| self.alphabets[c]).collect();
        let combos = checked_product(radices.iter().copied()).unwrap_or(u128::MAX);
        let r = self.rows as u128;
        let key = |i: usize| -> u128 {
            cols.iter().fold(0u128, |acc, &c| acc * self.alphabets[c] as u128 + self.data[i * n + c] as u128)
        };
        let decode = |mut k: u128| -> Vec<u32> {
            let mut t = vec![0u32; cols.len()];
            for (slot, &rad) in t.iter_mut().zip(&radices).rev() {
                *slot = (k % rad as u128) as u32;
                k /= rad as u128;
            }
            t
        };
        let mut keys: Vec<u128> = (0..self.rows).map(key).collect();
        keys.sort_unstable();
        let expected = (r % combos == 0).then(|| (r / combos) as u64);
        if expected.is_none() {
            // No count can be right; prefer a missing tuple as the witness.
            let mut next: u128 = 0;
            for &k in &keys {
                if next < k {
                    break;
                }
                next = k + 1;
            }
            if next < combos {
                let observed = keys.iter().filter(|&&k| k == next).count() as u64;
                return Err(StrengthWitness { columns: cols.to_vec(), tuple: decode(next), observed, expected });
            }
            let observed = keys.iter().filter(|&&k| k == keys[0]).count() as u64;
            return Err(StrengthWitness { columns: cols.to_vec(), tuple: decode(keys[0]), observed, expected });
        }
        // Walk the sorted keys against the full range of tuples, reporting
        // the first tuple (present or missing) whose count is wrong.
        let lambda = expected.unwrap_or(0);
        let mut next: u128 = 0;
        let mut i = 0;
        while i < keys.len() {
            let k = keys[i];
            let mut j = i;
            while j < keys.len() && keys[j] == k {
                j += 1;
            }
            if next < k {
                return Err(StrengthWitness { columns: cols.to_vec(), tuple: decode(next), observed: 0, expected });
            }
            let count = (j - i) as u64;
            if count != lambda {
                return Err(StrengthWitness { columns: cols.to_vec(), tuple: decode(k), observed: count, expected });
            }
            next = k + 1;
            i = j;
        }
        if next < combos {
            return Err(StrengthWitness { columns: cols.to_vec(), tuple: decode(next), observed: 0, expected });
        }
        Ok(())
    }

    /// Checks every t-column projection; returns the first failure.
    pub fn check_strength(&self, t: u32) -> core::result::Result<(), StrengthWitness> {
        for cols in subsets(self.cols(), t as usize) {
            self.check_projection(&cols)?;
        }
        Ok(())
    }

    pub fn is_orthogonal_array(&self, t: u32) -> bool {
        t as usize <= self.cols() && self.check_strength(t).is_ok()
    }

    /// Largest t for which the array is an OA of strength t.
    pub fn strength(&self) -> u32 {
        let mut t = 0;
        while (t as usize) < self.cols() && self.is_orthogonal_array(t + 1) {
            t += 1;
        }
        t
    }

    /// Verifies strength `t` if the check fits in `budget`, otherwise
    /// marks the array as built but unverified.
    pub fn certify(mut self, t: u32, budget: u64) -> Result<Self> {
        if t as usize > self.cols() {
            return Err(Error::BadParameter(format!("strength {t} exceeds {} columns", self.cols())));
        }
        if self.check_cost(t) <= budget {
            self.check_strength(t).map_err(Error::StrengthCheckFailed)?;
            self.cert = Some(Certificate::verified(t));
        } else {
            self.cert = Some(Certificate { strength: t, status: CertStatus::Unverified });
        }
        Ok(self)
    }

    /// Exact pairwise distance scan.
    pub fn distance_profile(&self) -> Result<DistanceProfile> {
        if self.rows < 2 {
            return Err(Error::TooFewRows);
        }
        let mut distances = BTreeSet::new();
        for i in 0..self.rows {
            for j in i + 1..self.rows {
                distances.insert(hamming(self.row(i), self.row(j)));
            }
        }
        let min_distance = *distances.iter().next().unwrap();
        Ok(DistanceProfile { min_distance, distances })
    }

    /// Minimal distance by projection. Two rows at distance n-a agree on
    /// some a columns, and agreeing on a columns implies agreeing on
    /// every subset of them, so the largest a with a repeated
    /// projection can be found by bisection. Equal rows give 0.
    pub fn min_distance(&self) -> Option<u32> {
        if self.rows < 2 {
            return None;
        }
        let n = self.cols();
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.has_repeated_projection(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some((n - lo) as u32)
    }

    fn has_repeated_projection(&self, a: usize) -> bool {
        let mut idx: Vec<usize> = (0..self.rows).collect();
        for cols in subsets(self.cols(), a) {
            let proj = |i: usize| cols.iter().map(move |&c| self.entry(i, c));
            idx.sort_unstable_by(|&x, &y| proj(x).cmp(proj(y)));
            if idx.windows(2).any(|w| proj(w[0]).cmp(proj(w[1])) == Ordering::Equal) {
                return true;
            }
        }
        false
    }

    pub fn delete_columns(&self, cols: &[usize]) -> Result<Self> {
        for &c in cols {
            self.checked_col(c)?;
        }
        let keep: Vec<usize> = (0..self.cols()).filter(|c| !cols.contains(c)).collect();
        if keep.is_empty() {
            return Err(Error::EmptyResult);
        }
        let mut out = self.project(&keep);
        out.cert = self.cert.map(|c| Certificate { strength: c.strength.min(keep.len() as u32), ..c });
        Ok(out)
    }

    /// Keeps only `keep`, in that order, without a certificate.
    pub fn project(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for row in self.iter_rows() {
            data.extend(keep.iter().map(|&c| row[c]));
        }
        MixedLevelArray {
            rows: self.rows,
            alphabets: keep.iter().map(|&c| self.alphabets[c]).collect(),
            data,
            cert: None,
        }
    }

    /// Drops the rightmost columns until `n` remain.
    pub fn truncate_columns(&self, n: usize) -> Result<Self> {
        let drop: Vec<usize> = (n..self.cols()).collect();
        self.delete_columns(&drop)
    }

    /// Rows whose entry in `col` equals `symbol`, with `col` removed.
    pub fn derive_subarray(&self, col: usize, symbol: u32, budget: u64) -> Result<Self> {
        self.checked_col(col)?;
        let levels = self.alphabets[col];
        if symbol >= levels {
            return Err(Error::SymbolOutOfRange { symbol, levels });
        }
        if self.cols() == 1 {
            return Err(Error::EmptyResult);
        }
        let keep: Vec<usize> = (0..self.cols()).filter(|&c| c != col).collect();
        let mut data = Vec::new();
        for row in self.iter_rows().filter(|r| r[col] == symbol) {
            data.extend(keep.iter().map(|&c| row[c]));
        }
        if data.is_empty() {
            return Err(Error::InvalidArray(format!("no row has symbol {symbol} in column {col}")));
        }
        let alphabets = keep.iter().map(|&c| self.alphabets[c]).collect();
        let out = MixedLevelArray::new(alphabets, data)?;
        match self.cert {
            Some(c) if c.strength >= 1 => out.certify(c.strength - 1, budget),
            _ => Ok(out),
        }
    }

    /// Prepends a column that numbers consecutive blocks of `block_size` rows.
    pub fn attach_index_column(&self, block_size: usize) -> Result<Self> {
        if block_size == 0 || self.rows % block_size != 0 || self.rows / block_size < 2 {
            return Err(Error::NotDivisible { rows: self.rows, block: block_size });
        }
        let mut alphabets = vec![(self.rows / block_size) as u32];
        alphabets.extend_from_slice(&self.alphabets);
        let mut data = Vec::with_capacity(self.rows * (self.cols() + 1));
        for (i, row) in self.iter_rows().enumerate() {
            data.push((i / block_size) as u32);
            data.extend_from_slice(row);
        }
        MixedLevelArray::new(alphabets, data)
    }

    /// Replaces column `col` by the columns of `b`; level i becomes the
    /// i-th row of `b` in lexicographic order.
    pub fn expansive_replacement(&self, col: usize, b: &MixedLevelArray, budget: u64) -> Result<Self> {
        self.checked_col(col)?;
        let levels = self.alphabets[col] as usize;
        if b.rows() != levels {
            return Err(Error::RowCountMismatch { expected: levels, found: b.rows() });
        }
        let t = self.cert.ok_or(Error::Uncertified)?.strength;
        let need = t.min(b.cols() as u32);
        let tb = match b.cert {
            Some(c) => c.strength,
            None => b.strength(),
        };
        if tb < need {
            return Err(Error::BadParameter(format!(
                "replacement array has strength {tb}, needs {need}"
            )));
        }
        let sorted = b.sorted();
        let mut alphabets = Vec::with_capacity(self.cols() + b.cols() - 1);
        alphabets.extend_from_slice(&self.alphabets[..col]);
        alphabets.extend_from_slice(b.alphabets());
        alphabets.extend_from_slice(&self.alphabets[col + 1..]);
        let mut data = Vec::with_capacity(self.rows * alphabets.len());
        for row in self.iter_rows() {
            data.extend_from_slice(&row[..col]);
            data.extend_from_slice(sorted.row(row[col] as usize));
            data.extend_from_slice(&row[col + 1..]);
        }
        MixedLevelArray::new(alphabets, data)?.certify(t, budget)
    }

    /// Σ k_i(s_i - 1) = r - 1.
    pub fn saturation_check(&self) -> bool {
        let df: u64 = self.alphabets.iter().map(|&s| s as u64 - 1).sum();
        df == self.rows as u64 - 1
    }
}

pub fn hamming(a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u32
}

/// Block matrix with blocks `d_ij + B`, sums taken in `group`.
pub fn kronecker_sum(d: &MixedLevelArray, b: &MixedLevelArray, group: Group) -> Result<MixedLevelArray> {
    let s = group.order();
    if d.alphabets.iter().chain(&b.alphabets).any(|&a| a != s) {
        return Err(Error::AlphabetMismatch(format!("every column must have {s} levels")));
    }
    let (cd, cb) = (d.cols(), b.cols());
    let n = cd * cb;
    let mut data = Vec::with_capacity(d.rows * b.rows * n);
    for drow in d.iter_rows() {
        for brow in b.iter_rows() {
            for &x in drow {
                data.extend(brow.iter().map(|&y| group.add(x, y)));
            }
        }
    }
    MixedLevelArray::new(vec![s; n], data)
}

/// Row (u, v) has entry a_uj·q_j + b_vj over s_j·q_j levels.
pub fn multiply_oa(a: &MixedLevelArray, b: &MixedLevelArray, budget: u64) -> Result<MixedLevelArray> {
    if a.cols() != b.cols() {
        return Err(Error::ShapeMismatch { left: a.cols(), right: b.cols() });
    }
    let ta = a.cert.ok_or(Error::Uncertified)?.strength;
    let tb = b.cert.ok_or(Error::Uncertified)?.strength;
    let alphabets: Vec<u32> = a.alphabets.iter().zip(&b.alphabets).map(|(s, q)| s * q).collect();
    let mut data = Vec::with_capacity(a.rows * b.rows * a.cols());
    for ra in a.iter_rows() {
        for rb in b.iter_rows() {
            data.extend(ra.iter().zip(rb).zip(&b.alphabets).map(|((x, y), q)| x * q + y));
        }
    }
    MixedLevelArray::new(alphabets, data)?.certify(ta.min(tb), budget)
}

/// {d1 + d2 : s1·d1 + s2·d2 = r, 0 ≤ d_i ≤ m_i}: the distances two rows of
/// a saturated strength-2 array with m1 columns of s1 levels and m2 of s2
/// levels can have.
pub fn saturated_hd_formula(r: u64, m1: u64, m2: u64, s1: u64, s2: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for d1 in 0..=m1 {
        let used = s1 * d1;
        if used > r || (r - used) % s2 != 0 {
            continue;
        }
        let d2 = (r - used) / s2;
        if d2 <= m2 {
            out.insert(d1 + d2);
        }
    }
    out
}

/// The two-value form for r = s1², which takes d1 ∈ {m1 - 1, m1}. Values
/// that are not integers are left out.
pub fn saturated_hd_square(s1: u64, s2: u64, m1: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for d1 in [m1.saturating_sub(1), m1] {
        let num = (s1 * s1) as i128 + (s2 as i128 - s1 as i128) * d1 as i128;
        if num >= 0 && num % s2 as i128 == 0 {
            out.insert((num / s2 as i128) as u64);
        }
    }
    out
}
