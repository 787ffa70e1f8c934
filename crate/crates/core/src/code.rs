//! Code parameters, orthogonal partitions and the quantum code carrier.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::array::{CertStatus, Certificate, MixedLevelArray};
use crate::combin::checked_product;
use crate::error::{Error, Result};

fn smallest_product(alphabets: &[u32], count: usize) -> u128 {
    let mut sorted = alphabets.to_vec();
    sorted.sort_unstable();
    checked_product(sorted.into_iter().take(count)).unwrap_or(u128::MAX)
}

/// min over |C| = n - 2d of ∏_{j∈C} s_j, which is the product of the
/// n - 2d smallest alphabets; 1 when n = 2d.
pub fn singleton_bound(n: usize, d: u32, alphabets: &[u32]) -> Result<u128> {
    let two_d = 2 * d as usize;
    if n < two_d || alphabets.len() != n {
        return Err(Error::BadGeometry { n, d });
    }
    Ok(smallest_product(alphabets, n - two_d))
}

pub fn m_value(n: usize, d: u32, alphabets: &[u32], k: u128) -> Result<u128> {
    if n < 2 * d as usize + 1 {
        return Err(Error::BadGeometry { n, d });
    }
    let bound = singleton_bound(n, d, alphabets)?;
    bound.checked_sub(k).ok_or(Error::NegativeM { k, bound })
}

/// `[0, upper]` with upper = min∏_{n-2d} - min∏_{n-2d-1}.
pub fn admissible_m_range(n: usize, d: u32, alphabets: &[u32]) -> Result<(u128, u128)> {
    if n < 2 * d as usize + 1 || alphabets.len() != n {
        return Err(Error::BadGeometry { n, d });
    }
    let k = n - 2 * d as usize;
    Ok((0, smallest_product(alphabets, k) - smallest_product(alphabets, k - 1)))
}

/// ((n, K, d+1)) over an alphabet list, with the Singleton arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: u128,
    pub d_plus_1: u32,
    pub alphabets: Vec<u32>,
    pub singleton: u128,
    /// `None` when n = 2d, where m is undefined.
    pub m: Option<u128>,
    pub admissible_upper: Option<u128>,
}

impl CodeParams {
    pub fn new(k: u128, d_plus_1: u32, alphabets: Vec<u32>) -> Result<Self> {
        let n = alphabets.len();
        let d = d_plus_1.saturating_sub(1);
        let singleton = singleton_bound(n, d, &alphabets)?;
        let (m, admissible_upper) = if n > 2 * d as usize {
            (Some(m_value(n, d, &alphabets, k)?), Some(admissible_m_range(n, d, &alphabets)?.1))
        } else if k > singleton {
            return Err(Error::NegativeM { k, bound: singleton });
        } else {
            (None, None)
        };
        Ok(CodeParams { n, k, d_plus_1, alphabets, singleton, m, admissible_upper })
    }

    pub fn d(&self) -> u32 {
        self.d_plus_1.saturating_sub(1)
    }

    /// m inside `[0, upper]`.
    pub fn m_admissible(&self) -> bool {
        match (self.m, self.admissible_upper) {
            (Some(m), Some(u)) => m <= u,
            _ => true,
        }
    }

    /// `a^x b^y ...` with levels in decreasing order.
    pub fn alphabet_string(&self) -> String {
        alphabet_string(&self.alphabets)
    }

    /// Multiset of alphabets as `level -> count`.
    pub fn alphabet_multiset(&self) -> BTreeMap<u32, usize> {
        multiset(&self.alphabets)
    }
}

pub fn multiset(alphabets: &[u32]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &a in alphabets {
        *m.entry(a).or_insert(0) += 1;
    }
    m
}

pub fn alphabet_string(alphabets: &[u32]) -> String {
    let parts: Vec<String> = multiset(alphabets).iter().rev().map(|(a, c)| format!("{a}^{c}")).collect();
    parts.join(" ")
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{},{}))_{{{}}}", self.n, self.k, self.d_plus_1, self.alphabet_string())
    }
}

/// Rows of the parent array split into `blocks` consecutive blocks of
/// `block_size`, each an OA of the certified strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthogonalPartition {
    pub blocks: usize,
    pub block_size: usize,
    pub strength: Certificate,
}

impl OrthogonalPartition {
    /// The trivial partition: the whole array is one block.
    pub fn whole(a: &MixedLevelArray) -> Result<Self> {
        let strength = a.certificate().ok_or(Error::Uncertified)?;
        Ok(OrthogonalPartition { blocks: 1, block_size: a.rows(), strength })
    }

    /// Checks every block of `a` at strength `t`, within `budget`.
    pub fn certify(a: &MixedLevelArray, blocks: usize, t: u32, budget: u64) -> Result<Self> {
        if blocks == 0 || a.rows() % blocks != 0 {
            return Err(Error::NotPartitionable(format!("{} rows into {blocks} blocks", a.rows())));
        }
        let size = a.rows() / blocks;
        let status = if a.check_cost(t) <= budget {
            for b in 0..blocks {
                a.slice_rows(b * size, (b + 1) * size).check_strength(t).map_err(Error::StrengthCheckFailed)?;
            }
            CertStatus::Verified
        } else {
            CertStatus::Unverified
        };
        Ok(OrthogonalPartition { blocks, block_size: size, strength: Certificate { strength: t, status } })
    }
}

/// Sorts the rows, groups them by their first `l` entries and strips
/// those columns. Expects a symmetric OA(s^(d+l), 2d+2l+1, s, d+l) and
/// returns s^l blocks certified at strength d.
pub fn partition_by_prefix(a: &MixedLevelArray, l: usize, budget: u64) -> Result<(MixedLevelArray, OrthogonalPartition)> {
    let n = a.cols();
    if n < 2 * l + 1 || (n - 1 - 2 * l) % 2 != 0 {
        return Err(Error::NotPartitionable(format!("{n} columns do not have the form 2d+2l+1 with l={l}")));
    }
    let d = ((n - 1 - 2 * l) / 2) as u32;
    let sorted = a.sorted();
    let mut sizes: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for row in sorted.iter_rows() {
        *sizes.entry(row[..l].to_vec()).or_insert(0) += 1;
    }
    let first = *sizes.values().next().unwrap();
    if sizes.values().any(|&c| c != first) {
        return Err(Error::NotPartitionable(format!("prefix groups of {l} columns have unequal sizes")));
    }
    let prefix: Vec<usize> = (0..l).collect();
    let mut stripped = if l == 0 { sorted.clone() } else { sorted.delete_columns(&prefix)? };
    let cert = a.certificate().map(|c| Certificate { strength: c.strength.min(stripped.cols() as u32), ..c });
    stripped = stripped.with_certificate(cert);
    let partition = OrthogonalPartition::certify(&stripped, sizes.len(), d, budget)?;
    Ok((stripped, partition))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssetRef {
    pub name: String,
    pub digest: Option<String>,
}

/// What the parent array guaranteed when the code was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OaOrigin {
    pub strength: u32,
    pub partition_strength: u32,
    pub min_distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub theorem: String,
    pub ingredients: Vec<String>,
    pub assets: Vec<AssetRef>,
    pub origin: Option<OaOrigin>,
    pub notes: Vec<String>,
}

/// K basis states, each the uniform superposition of one block of kets.
/// Kets are stored as the rows of one array with blocks consecutive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumCode {
    pub params: CodeParams,
    kets: MixedLevelArray,
    block_size: usize,
    pub provenance: Provenance,
}

impl QuantumCode {
    /// A code from raw kets, as read from a file. `d_plus_1` is the
    /// distance being claimed; nothing is verified here.
    pub fn from_kets(kets: MixedLevelArray, blocks: usize, d_plus_1: u32, provenance: Provenance) -> Result<Self> {
        if blocks == 0 || kets.rows() % blocks != 0 {
            return Err(Error::NotPartitionable(format!("{} kets into {blocks} states", kets.rows())));
        }
        let params = CodeParams::new(blocks as u128, d_plus_1, kets.alphabets().to_vec())?;
        Ok(QuantumCode { params, block_size: kets.rows() / blocks, kets, provenance })
    }

    pub fn kets(&self) -> &MixedLevelArray {
        &self.kets
    }

    pub fn blocks(&self) -> usize {
        self.kets.rows() / self.block_size
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn block(&self, i: usize) -> impl Iterator<Item = &[u32]> + '_ {
        (i * self.block_size..(i + 1) * self.block_size).map(move |r| self.kets.row(r))
    }

    pub fn block_array(&self, i: usize) -> MixedLevelArray {
        self.kets.slice_rows(i * self.block_size, (i + 1) * self.block_size)
    }

    /// Same code with different kets; used to build corrupted copies.
    pub fn with_kets(&self, kets: MixedLevelArray) -> Result<Self> {
        if kets.rows() != self.kets.rows() || kets.alphabets() != self.kets.alphabets() {
            return Err(Error::InvalidArray("replacement kets change the shape".into()));
        }
        Ok(QuantumCode { kets, ..self.clone() })
    }
}

/// A partitioned array as a code: K = number of blocks and d + 1 = min(t' + 1, h) with h
/// the minimal distance of the parent.
pub fn code_from_partitioned_oa(
    parent: MixedLevelArray,
    partition: OrthogonalPartition,
    mut provenance: Provenance,
) -> Result<QuantumCode> {
    if partition.blocks * partition.block_size != parent.rows() {
        return Err(Error::NotPartitionable("partition does not cover the parent".into()));
    }
    let h = parent.min_distance().ok_or(Error::TooFewRows)?;
    let t_prime = partition.strength.strength;
    let d_plus_1 = (t_prime + 1).min(h);
    let strength = parent.certified_strength().unwrap_or(0);
    provenance.origin = Some(OaOrigin { strength, partition_strength: t_prime, min_distance: h });
    QuantumCode::from_kets(parent, partition.blocks, d_plus_1, provenance)
}
