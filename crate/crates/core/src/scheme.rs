//! Difference schemes D_t(r, c, s) and the three families the codes need.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::array::{kronecker_sum, MixedLevelArray};
use crate::combin::subsets;
use crate::construct::{AssetPayload, AssetRegistry};
use crate::error::{Error, Result};
use crate::field::{prime_power, Field};
use crate::group::Group;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceScheme {
    rows: usize,
    cols: usize,
    group: Group,
    data: Vec<u32>,
    strength: u32,
}

/// Where a D(2s, 2s, s) came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSource {
    Algebraic,
    Search,
    Asset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeWitness {
    pub columns: Vec<usize>,
    pub differences: Vec<u32>,
    pub observed: u64,
    pub expected: Option<u64>,
}

impl DifferenceScheme {
    /// Wraps a matrix and checks it at strength `t`.
    pub fn new(group: Group, cols: usize, data: Vec<u32>, t: u32) -> Result<Self> {
        let s = group.order();
        if cols == 0 || data.is_empty() || data.len() % cols != 0 {
            return Err(Error::InvalidArray(format!("{} entries do not fill rows of {cols}", data.len())));
        }
        if let Some(&x) = data.iter().find(|&&x| x >= s) {
            return Err(Error::InvalidArray(format!("entry {x} outside a group of order {s}")));
        }
        let d = DifferenceScheme { rows: data.len() / cols, cols, group, data, strength: 0 };
        d.check(t).map_err(|w| {
            Error::NotADifferenceScheme(format!(
                "columns {:?} see differences {:?} {} times",
                w.columns, w.differences, w.observed
            ))
        })?;
        Ok(DifferenceScheme { strength: t, ..d })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn strength(&self) -> u32 {
        self.strength
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// For each t-subset, the differences (x_1 - x_t, ..., x_{t-1} - x_t)
    /// must hit every element of G^{t-1} equally often.
    pub fn check(&self, t: u32) -> core::result::Result<(), SchemeWitness> {
        is_difference_scheme(self.group, self.cols, &self.data, t)
    }

    pub fn as_array(&self) -> MixedLevelArray {
        MixedLevelArray::new(vec![self.group.order(); self.cols], self.data.clone())
            .expect("scheme entries are in range")
    }

    /// D ⊕ (s): an OA(rs, c, s, t).
    pub fn lift(&self) -> MixedLevelArray {
        let s = self.group.order();
        kronecker_sum(&self.as_array(), &MixedLevelArray::levels(s).unwrap(), self.group)
            .expect("alphabets agree by construction")
    }
}

pub fn is_difference_scheme(
    group: Group,
    cols: usize,
    data: &[u32],
    t: u32,
) -> core::result::Result<(), SchemeWitness> {
    let s = group.order() as u64;
    let rows = (data.len() / cols) as u64;
    let t = t as usize;
    if t < 2 || t > cols {
        return Err(SchemeWitness { columns: Vec::new(), differences: Vec::new(), observed: 0, expected: None });
    }
    let cells = s.pow(t as u32 - 1);
    let expected = (rows % cells == 0).then(|| rows / cells);
    for set in subsets(cols, t) {
        let mut counts = vec![0u64; cells as usize];
        for row in data.chunks_exact(cols) {
            let last = row[set[t - 1]];
            let key = set[..t - 1]
                .iter()
                .fold(0u64, |acc, &c| acc * s + group.sub(row[c], last) as u64);
            counts[key as usize] += 1;
        }
        let short = counts.iter().enumerate().find(|(_, &c)| expected.map_or(c == 0, |e| c < e));
        let bad = short.or_else(|| counts.iter().enumerate().find(|(_, &c)| Some(c) != expected));
        if let Some((key, &c)) = bad {
            let mut differences = vec![0u32; t - 1];
            let mut k = key as u64;
            for slot in differences.iter_mut().rev() {
                *slot = (k % s) as u32;
                k /= s;
            }
            return Err(SchemeWitness { columns: set, differences, observed: c, expected });
        }
    }
    Ok(())
}

/// D(s, s, s): the multiplication table of GF(s).
pub fn d_sss(s: u32) -> Result<DifferenceScheme> {
    let f = Field::new(s)?;
    let data = (0..s).flat_map(|a| (0..s).map(move |b| (a, b))).map(|(a, b)| f.mul(a, b)).collect();
    DifferenceScheme::new(Group::for_order(s), s as usize, data, 2)
}

/// D₃(s², 4, s): rows (0, a, b, a+b) for (a, b) ∈ G², a-major.
pub fn d3_scheme(s: u32) -> Result<DifferenceScheme> {
    if s < 2 {
        return Err(Error::BadParameter(format!("d3 scheme needs s >= 2, got {s}")));
    }
    let g = Group::for_order(s);
    let mut data = Vec::with_capacity((s * s * 4) as usize);
    for a in 0..s {
        for b in 0..s {
            data.extend_from_slice(&[0, a, b, g.add(a, b)]);
        }
    }
    DifferenceScheme::new(g, 4, data, 3)
}

/// D(2s, 2s, s) for a prime power s. Tries the algebraic construction,
/// then a bounded search, then a bundled asset named `ds_{2s}_{2s}_{s}`.
pub fn d_2s(s: u32, assets: Option<&AssetRegistry>) -> Result<(DifferenceScheme, SchemeSource)> {
    prime_power(s as u64).ok_or(Error::NotPrimePower(s as u64))?;
    if let Ok(d) = d_2s_algebraic(s) {
        return Ok((d, SchemeSource::Algebraic));
    }
    if let Ok(d) = d_2s_search(s, 2_000_000) {
        return Ok((d, SchemeSource::Search));
    }
    if let Some(d) = assets.and_then(|reg| d_2s_asset(s, reg).ok()) {
        return Ok((d, SchemeSource::Asset));
    }
    Err(Error::IngredientUnavailable(format!(
        "no D({0},{0},{s}): construction, search and asset registry all failed",
        2 * s
    )))
}

pub fn d_2s_asset(s: u32, reg: &AssetRegistry) -> Result<DifferenceScheme> {
    let name = format!("ds_{0}_{0}_{s}", 2 * s);
    match &reg.get(&name)?.payload {
        AssetPayload::Scheme(d) if d.group().order() == s && d.rows() == 2 * s as usize => Ok(d.clone()),
        _ => Err(Error::IngredientUnavailable(format!("asset {name} is not a D({0},{0},{s})", 2 * s))),
    }
}

/// Algebraic D(2s, 2s, s).
///
/// For s = 2^m: the multiplication table of GF(2s) with every entry
/// reduced to its low m bits. Dropping the top bit is an additive
/// homomorphism GF(2s) → GF(s) with kernel of size 2, so each row
/// difference (a nonzero multiple of the column labels) hits every
/// element of GF(s) exactly twice.
///
/// For odd s: rows (a, ε) and columns (b, δ) with ε, δ ∈ {0, 1}. With ν a
/// nonsquare the four quadrants are
/// `ab`, `ab + a²`, `ab + b²(1 - 1/ν)/4` and `ν·ab + ν·a² + (ν - 1)b²/4`.
/// The difference of two rows is a quadratic in b on each column half,
/// and the coefficients are chosen so the two halves together cover
/// every value twice.
pub fn d_2s_algebraic(s: u32) -> Result<DifferenceScheme> {
    let f = Field::new(s)?;
    let n = 2 * s as usize;
    let mut data = Vec::with_capacity(n * n);
    if s % 2 == 0 {
        let big = Field::new(2 * s)?;
        for x in 0..2 * s {
            for y in 0..2 * s {
                data.push(big.mul(x, y) & (s - 1));
            }
        }
    } else {
        let nu = (1..s).find(|&x| !f.is_square(x)).expect("odd order fields have nonsquares");
        let four = f.add(f.add(1, 1), f.add(1, 1));
        let quarter = f.inv(four)?;
        let c10 = f.mul(quarter, f.sub(1, f.inv(nu)?));
        let c11 = f.mul(quarter, f.sub(nu, 1));
        for a in 0..s {
            for eps in 0..2 {
                for b in 0..s {
                    for delta in 0..2 {
                        let (ab, aa, bb) = (f.mul(a, b), f.mul(a, a), f.mul(b, b));
                        data.push(match (eps, delta) {
                            (0, 0) => ab,
                            (0, _) => f.add(ab, aa),
                            (_, 0) => f.add(ab, f.mul(c10, bb)),
                            _ => f.add(f.mul(nu, f.add(ab, aa)), f.mul(c11, bb)),
                        });
                    }
                }
            }
        }
    }
    DifferenceScheme::new(Group::for_order(s), n, data, 2)
}

/// Backtracking over the cells in column-major order, with the first row
/// and column fixed to zero. Every pair of columns must differ by each
/// group element exactly twice. `node_budget` bounds the placements tried.
pub fn d_2s_search(s: u32, node_budget: u64) -> Result<DifferenceScheme> {
    prime_power(s as u64).ok_or(Error::NotPrimePower(s as u64))?;
    let g = Group::for_order(s);
    let n = 2 * s as usize;
    let mut st = Search {
        g,
        n,
        cells: vec![0; n * n],
        // diff[a][b][v]: rows so far where column b minus column a is v.
        diff: vec![0; n * n * s as usize],
        nodes: 0,
        budget: node_budget,
    };
    for c in 1..n {
        st.place(c, 0, 0);
    }
    if !st.fill(1, 1) {
        return Err(Error::IngredientUnavailable(format!(
            "search for D({n},{n},{s}) gave up after {} nodes",
            st.nodes
        )));
    }
    let data = (0..n).flat_map(|i| (0..n).map(move |c| (i, c))).map(|(i, c)| st.cells[c * n + i]).collect();
    DifferenceScheme::new(g, n, data, 2)
}

struct Search {
    g: Group,
    n: usize,
    cells: Vec<u32>,
    diff: Vec<u32>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn slot(&self, a: usize, b: usize, v: u32) -> usize {
        (a * self.n + b) * self.g.order() as usize + v as usize
    }

    fn fits(&self, c: usize, i: usize, v: u32) -> bool {
        (0..c).all(|a| self.diff[self.slot(a, c, self.g.sub(v, self.cells[a * self.n + i]))] < 2)
    }

    fn place(&mut self, c: usize, i: usize, v: u32) {
        self.cells[c * self.n + i] = v;
        for a in 0..c {
            let k = self.slot(a, c, self.g.sub(v, self.cells[a * self.n + i]));
            self.diff[k] += 1;
        }
    }

    fn unplace(&mut self, c: usize, i: usize) {
        let v = self.cells[c * self.n + i];
        for a in 0..c {
            let k = self.slot(a, c, self.g.sub(v, self.cells[a * self.n + i]));
            self.diff[k] -= 1;
        }
    }

    fn fill(&mut self, c: usize, i: usize) -> bool {
        if c == self.n {
            return true;
        }
        if i == self.n {
            return self.fill(c + 1, 1);
        }
        for v in 0..self.g.order() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            if !self.fits(c, i, v) {
                continue;
            }
            self.place(c, i, v);
            if self.fill(c, i + 1) {
                return true;
            }
            self.unplace(c, i);
        }
        false
    }
}
