//! Exact reduced cross-matrices and code certification.
//!
//! For uniform states with unit coefficients every reduced matrix is an
//! integer count matrix over one global denominator, so no amplitudes are
//! ever formed. Entry (x, y) of the (i, j) matrix on parties S counts the
//! ket pairs (u, v) ∈ block_i × block_j with u|S = x, v|S = y and
//! u|S̄ = v|S̄.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::array::hamming;
use crate::code::{CodeParams, QuantumCode};
use crate::combin::{checked_product, subsets};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Cross terms vanish and every reduction is the maximally mixed
    /// state on the chosen parties.
    Strict,
    /// Cross terms vanish and all reductions are equal.
    Definition5,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict-uniform",
            Mode::Definition5 => "definition-5",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCrossMatrix {
    pub i: usize,
    pub j: usize,
    pub subset: Vec<usize>,
    pub dims: Vec<u32>,
    /// Nonzero entries only.
    pub entries: BTreeMap<(Vec<u32>, Vec<u32>), u64>,
    pub normalizer: u64,
}

impl ReducedCrossMatrix {
    pub fn get(&self, x: &[u32], y: &[u32]) -> u64 {
        self.entries.get(&(x.to_vec(), y.to_vec())).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn trace(&self) -> u64 {
        self.entries.iter().filter(|((x, y), _)| x == y).map(|(_, c)| c).sum()
    }

    pub fn transpose(&self) -> Self {
        ReducedCrossMatrix {
            i: self.j,
            j: self.i,
            subset: self.subset.clone(),
            dims: self.dims.clone(),
            entries: self.entries.iter().map(|((x, y), &c)| ((y.clone(), x.clone()), c)).collect(),
            normalizer: self.normalizer,
        }
    }
}

fn split(row: &[u32], subset: &[usize]) -> (Vec<u32>, Vec<u32>) {
    let mut inside = Vec::with_capacity(subset.len());
    let mut outside = Vec::with_capacity(row.len() - subset.len());
    for (c, &v) in row.iter().enumerate() {
        if subset.contains(&c) {
            inside.push(v);
        } else {
            outside.push(v);
        }
    }
    (inside, outside)
}

/// Sort-and-join over the S̄ projection.
pub fn reduced_cross_matrix(code: &QuantumCode, i: usize, j: usize, subset: &[usize]) -> ReducedCrossMatrix {
    let keyed = |b: usize| {
        let mut v: Vec<(Vec<u32>, Vec<u32>)> = code.block(b).map(|r| {
            let (x, rest) = split(r, subset);
            (rest, x)
        }).collect();
        v.sort();
        v
    };
    let (left, right) = (keyed(i), keyed(j));
    let mut entries = BTreeMap::new();
    let (mut a, mut b) = (0, 0);
    while a < left.len() && b < right.len() {
        match left[a].0.cmp(&right[b].0) {
            core::cmp::Ordering::Less => a += 1,
            core::cmp::Ordering::Greater => b += 1,
            core::cmp::Ordering::Equal => {
                let key = &left[a].0;
                let a_end = a + left[a..].iter().take_while(|e| &e.0 == key).count();
                let b_end = b + right[b..].iter().take_while(|e| &e.0 == key).count();
                for u in &left[a..a_end] {
                    for v in &right[b..b_end] {
                        *entries.entry((u.1.clone(), v.1.clone())).or_insert(0) += 1;
                    }
                }
                a = a_end;
                b = b_end;
            }
        }
    }
    ReducedCrossMatrix {
        i,
        j,
        subset: subset.to_vec(),
        dims: subset.iter().map(|&c| code.kets().alphabets()[c]).collect(),
        entries,
        normalizer: code.block_size() as u64,
    }
}

/// Double loop over all ket pairs; the oracle for the join above.
pub fn naive_cross_matrix(code: &QuantumCode, i: usize, j: usize, subset: &[usize]) -> ReducedCrossMatrix {
    let mut entries = BTreeMap::new();
    for u in code.block(i) {
        for v in code.block(j) {
            let (xu, ru) = split(u, subset);
            let (xv, rv) = split(v, subset);
            if ru == rv {
                *entries.entry((xu, xv)).or_insert(0) += 1;
            }
        }
    }
    ReducedCrossMatrix {
        i,
        j,
        subset: subset.to_vec(),
        dims: subset.iter().map(|&c| code.kets().alphabets()[c]).collect(),
        entries,
        normalizer: code.block_size() as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    /// Two kets of different states agree off S: a nonzero (i, j) entry.
    CrossTerm,
    /// Two kets of one state agree off S but not on it.
    OffDiagonal,
    /// A diagonal entry differs from block size / ∏ s_j.
    NonUniform { observed: u64, expected: Option<u64> },
    /// The reductions of states i and j differ.
    Unequal,
    /// The same ket appears twice.
    DuplicateKet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub subset: Vec<usize>,
    pub blocks: (usize, usize),
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub kind: FailureKind,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.blocks;
        match &self.kind {
            FailureKind::CrossTerm => write!(f, "S={:?}: states {i},{j} have cross entry at {:?},{:?}", self.subset, self.x, self.y),
            FailureKind::OffDiagonal => write!(f, "S={:?}: state {i} has off-diagonal entry at {:?},{:?}", self.subset, self.x, self.y),
            FailureKind::NonUniform { observed, expected } => match expected {
                Some(e) => write!(f, "S={:?}: state {i} has diagonal entry {observed} at {:?}, expected {e}", self.subset, self.x),
                None => write!(f, "S={:?}: block size is not a multiple of the reduced dimension", self.subset),
            },
            FailureKind::Unequal => write!(f, "S={:?}: reductions of states {i} and {j} differ at {:?},{:?}", self.subset, self.x, self.y),
            FailureKind::DuplicateKet => write!(f, "ket {:?} appears twice (states {i},{j})", self.x),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct SubsetOutcome {
    strict: Option<Failure>,
    def5: Option<Failure>,
}

fn check_subset(code: &QuantumCode, subset: &[usize]) -> SubsetOutcome {
    let mut recs: Vec<(Vec<u32>, usize, Vec<u32>)> = Vec::with_capacity(code.kets().rows());
    for b in 0..code.blocks() {
        for r in code.block(b) {
            let (x, rest) = split(r, subset);
            recs.push((rest, b, x));
        }
    }
    recs.sort();
    let mut out = SubsetOutcome::default();
    let k = code.blocks();
    let mut per_block: Vec<BTreeMap<(Vec<u32>, Vec<u32>), u64>> = (0..k).map(|_| BTreeMap::new()).collect();
    let fail = |kind, blocks, x: &Vec<u32>, y: &Vec<u32>| Failure { subset: subset.to_vec(), blocks, x: x.clone(), y: y.clone(), kind };
    let mut start = 0;
    while start < recs.len() {
        let end = start + recs[start..].iter().take_while(|e| e.0 == recs[start].0).count();
        let group = &recs[start..end];
        let (first, last) = (&group[0], &group[group.len() - 1]);
        if first.1 != last.1 {
            let f = fail(FailureKind::CrossTerm, (first.1, last.1), &first.2, &last.2);
            out.def5.get_or_insert(f.clone());
            out.strict.get_or_insert(f);
        }
        for u in group {
            for v in group.iter().filter(|v| v.1 == u.1) {
                *per_block[u.1].entry((u.2.clone(), v.2.clone())).or_insert(0) += 1;
                if u.2 != v.2 && out.strict.is_none() {
                    out.strict = Some(fail(FailureKind::OffDiagonal, (u.1, u.1), &u.2, &v.2));
                }
            }
        }
        start = end;
    }
    if out.strict.is_none() {
        let size = code.block_size() as u128;
        let dims = checked_product(subset.iter().map(|&c| code.kets().alphabets()[c])).unwrap_or(u128::MAX);
        let expected = (size % dims == 0).then(|| (size / dims) as u64);
        'blocks: for (b, m) in per_block.iter().enumerate() {
            let diag: Vec<_> = m.iter().filter(|((x, y), _)| x == y).collect();
            if expected.is_none() || (diag.len() as u128) < dims {
                let x = first_missing(subset, code, m);
                let observed = m.get(&(x.clone(), x.clone())).copied().unwrap_or(0);
                out.strict = Some(fail(FailureKind::NonUniform { observed, expected }, (b, b), &x, &x));
                break 'blocks;
            }
            for ((x, _), &c) in diag {
                if Some(c) != expected {
                    out.strict = Some(fail(FailureKind::NonUniform { observed: c, expected }, (b, b), x, x));
                    break 'blocks;
                }
            }
        }
    }
    if out.def5.is_none() {
        for b in 1..k {
            if per_block[b] != per_block[0] {
                let (x, y) = per_block[0]
                    .iter()
                    .find(|(key, c)| per_block[b].get(*key) != Some(c))
                    .map(|(key, _)| key.clone())
                    .or_else(|| per_block[b].keys().find(|key| !per_block[0].contains_key(*key)).cloned())
                    .unwrap();
                out.def5 = Some(fail(FailureKind::Unequal, (0, b), &x, &y));
                break;
            }
        }
    }
    out
}

/// First S-tuple, in lexicographic order, with no diagonal entry.
fn first_missing(subset: &[usize], code: &QuantumCode, m: &BTreeMap<(Vec<u32>, Vec<u32>), u64>) -> Vec<u32> {
    let dims: Vec<u32> = subset.iter().map(|&c| code.kets().alphabets()[c]).collect();
    let mut x = alloc::vec![0u32; dims.len()];
    loop {
        if !m.contains_key(&(x.clone(), x.clone())) {
            return x;
        }
        let mut i = dims.len();
        loop {
            if i == 0 {
                return x;
            }
            i -= 1;
            x[i] += 1;
            if x[i] < dims[i] {
                break;
            }
            x[i] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelResult {
    pub d: u32,
    pub subsets: u64,
    pub strict_failures: u64,
    pub def5_failures: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub params: CodeParams,
    pub mode: Mode,
    pub claimed_d: u32,
    pub levels: Vec<LevelResult>,
    pub strict_pass: bool,
    pub def5_pass: bool,
    /// 1 + the largest d' such that every level up to d' passes.
    pub certified_strict: u32,
    pub certified_def5: u32,
    pub strict_witness: Option<Failure>,
    pub def5_witness: Option<Failure>,
    /// Failing subsets at the claimed d in the selected mode, at most 32.
    pub failed_subsets: Vec<Vec<usize>>,
    pub monotone: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        match self.mode {
            Mode::Strict => self.strict_pass,
            Mode::Definition5 => self.def5_pass,
        }
    }

    pub fn certified(&self) -> u32 {
        match self.mode {
            Mode::Strict => self.certified_strict,
            Mode::Definition5 => self.certified_def5,
        }
    }

    pub fn witness(&self) -> Option<&Failure> {
        match self.mode {
            Mode::Strict => self.strict_witness.as_ref(),
            Mode::Definition5 => self.def5_witness.as_ref(),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "code      {}", self.params)?;
        writeln!(f, "mode      {}", self.mode)?;
        for l in &self.levels {
            writeln!(
                f,
                "d'={}     {} subsets, strict failures {}, definition-5 failures {}",
                l.d, l.subsets, l.strict_failures, l.def5_failures
            )?;
        }
        let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
        writeln!(f, "strict    {} (certified distance {})", verdict(self.strict_pass), self.certified_strict)?;
        writeln!(f, "def-5     {} (certified distance {})", verdict(self.def5_pass), self.certified_def5)?;
        if let Some(w) = self.witness() {
            writeln!(f, "witness   {w}")?;
        }
        write!(f, "verdict   {} at d+1 = {}", verdict(self.passed()), self.claimed_d + 1)
    }
}

/// Checks every party subset of size 0..=d in both modes.
pub fn verify_code(code: &QuantumCode, d: u32, mode: Mode) -> VerificationReport {
    let n = code.kets().cols();
    let mut levels = Vec::new();
    let (mut strict_witness, mut def5_witness) = (None, None);
    let mut failed_subsets = Vec::new();
    let dup = duplicate_ket(code);
    for dd in 0..=d.min(n as u32) {
        let mut level = LevelResult { d: dd, subsets: 0, strict_failures: 0, def5_failures: 0 };
        for subset in subsets(n, dd as usize) {
            level.subsets += 1;
            let mut o = check_subset(code, &subset);
            if o.strict.is_none() {
                o.strict = dup.clone().map(|f| Failure { subset: subset.clone(), ..f });
            }
            let bad = match mode {
                Mode::Strict => o.strict.is_some(),
                Mode::Definition5 => o.def5.is_some(),
            };
            if bad && dd == d && failed_subsets.len() < 32 {
                failed_subsets.push(subset.clone());
            }
            if let Some(w) = o.strict {
                level.strict_failures += 1;
                strict_witness.get_or_insert(w);
            }
            if let Some(w) = o.def5 {
                level.def5_failures += 1;
                def5_witness.get_or_insert(w);
            }
        }
        levels.push(level);
    }
    let certified = |fails: &dyn Fn(&LevelResult) -> bool| {
        levels.iter().take_while(|l| !fails(l)).count() as u32
    };
    let certified_strict = certified(&|l| l.strict_failures > 0);
    let certified_def5 = certified(&|l| l.def5_failures > 0);
    let monotone = levels.iter().skip(certified_strict as usize).all(|l| l.strict_failures > 0);
    let at_d = |fails: &dyn Fn(&LevelResult) -> bool| levels.last().map_or(false, |l| l.d == d && !fails(l));
    VerificationReport {
        params: code.params.clone(),
        mode,
        claimed_d: d,
        strict_pass: at_d(&|l| l.strict_failures > 0),
        def5_pass: at_d(&|l| l.def5_failures > 0),
        levels,
        certified_strict,
        certified_def5,
        strict_witness,
        def5_witness,
        failed_subsets,
        monotone,
    }
}

fn duplicate_ket(code: &QuantumCode) -> Option<Failure> {
    let mut idx: Vec<usize> = (0..code.kets().rows()).collect();
    idx.sort_by(|&a, &b| code.kets().row(a).cmp(code.kets().row(b)));
    idx.windows(2).find(|w| code.kets().row(w[0]) == code.kets().row(w[1])).map(|w| {
        let bs = code.block_size();
        let x = code.kets().row(w[0]).to_vec();
        Failure { subset: Vec::new(), blocks: (w[0] / bs, w[1] / bs), y: x.clone(), x, kind: FailureKind::DuplicateKet }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossValidation {
    pub quantum: bool,
    pub combinatorial: bool,
}

impl CrossValidation {
    pub fn agree(&self) -> bool {
        self.quantum == self.combinatorial
    }
}

/// Runs the strict check at the code's distance and, independently,
/// tests MD(kets) ≥ d+1 with every block of strength ≥ d.
pub fn cross_validate(code: &QuantumCode) -> Result<CrossValidation> {
    if code.provenance.origin.is_none() {
        return Err(Error::ProvenanceMissing);
    }
    let d = code.params.d();
    let quantum = verify_code(code, d, Mode::Strict).strict_pass;
    let kets = code.kets();
    let md_ok = naive_min_distance(kets) >= d + 1;
    let blocks_ok = (0..code.blocks()).all(|b| d == 0 || code.block_array(b).is_orthogonal_array(d));
    Ok(CrossValidation { quantum, combinatorial: md_ok && blocks_ok })
}

fn naive_min_distance(a: &crate::array::MixedLevelArray) -> u32 {
    let mut best = a.cols() as u32;
    for i in 0..a.rows() {
        for j in i + 1..a.rows() {
            best = best.min(hamming(a.row(i), a.row(j)));
        }
    }
    best
}

/// Convenience used by the drivers: strict verification at the code's
/// own distance, turned into an error on failure.
pub fn require_strict(code: &QuantumCode) -> Result<VerificationReport> {
    let report = verify_code(code, code.params.d(), Mode::Strict);
    if report.strict_pass {
        Ok(report)
    } else {
        Err(Error::VerificationFailed(format!(
            "{}: {}",
            code.params,
            report.strict_witness.as_ref().map(|w| format!("{w}")).unwrap_or_default()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::MixedLevelArray;
    use crate::code::Provenance;
    use alloc::vec;

    fn product_state() -> QuantumCode {
        let kets = MixedLevelArray::new(vec![2; 4], vec![0; 4]).unwrap();
        QuantumCode::from_kets(kets, 1, 2, Provenance::default()).unwrap()
    }

    #[test]
    fn single_ket_matrix() {
        let c = product_state();
        let m = reduced_cross_matrix(&c, 0, 0, &[1]);
        assert_eq!(m.get(&[0], &[0]), 1);
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m, naive_cross_matrix(&c, 0, 0, &[1]));
    }

    #[test]
    fn product_state_modes() {
        let c = product_state();
        let strict = verify_code(&c, 1, Mode::Strict);
        assert!(!strict.passed());
        assert!(strict.def5_pass);
        let def5 = verify_code(&c, 1, Mode::Definition5);
        assert!(def5.passed());
        assert!(!def5.strict_pass);
    }

    #[test]
    fn ghz_like_pair() {
        // |000> + |111> is 1-uniform.
        let kets = MixedLevelArray::new(vec![2; 3], vec![0, 0, 0, 1, 1, 1]).unwrap();
        let c = QuantumCode::from_kets(kets, 1, 2, Provenance::default()).unwrap();
        let r = verify_code(&c, 1, Mode::Strict);
        assert!(r.passed(), "{r}");
        assert_eq!(r.certified_strict, 2);
    }
}
