//! Plain-text formats: arrays and schemes, ket files, and the JSON code
//! record.
//!
//! Array files start with a header line, `OA r n t` followed by a line of
//! alphabet sizes, or `DS r c s t` for a difference scheme over the
//! default group of order `s`. Every following non-empty line is one row
//! of whitespace-separated symbols. Lines starting with `#` are comments.
//!
//! Ket files hold one basis state per line as `|a,b,c⟩ + |d,e,f⟩ + …`.
//! An optional `# alphabets: …` comment fixes the alphabet sizes, which
//! otherwise default to one more than the largest symbol per party.

use std::fmt::Write as _;

use mqmds_core::code::{AssetRef, OaOrigin};
use mqmds_core::{DifferenceScheme, Group, MixedLevelArray, Provenance, QuantumCode, VerificationReport};
use serde::{Deserialize, Serialize};

use crate::Error;

const KET_CLOSE: char = '⟩';

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers(line: usize, text: &str) -> Result<Vec<u32>, Error> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|_| parse_err(line, format!("`{t}` is not a symbol"))))
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// What an array file holds.
#[derive(Debug, Clone)]
pub enum ArrayFile {
    Oa { array: MixedLevelArray, strength: u32 },
    Ds(DifferenceScheme),
}

pub fn parse_array_file(text: &str) -> Result<ArrayFile, Error> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty array file"))?;
    let mut fields = header.split_whitespace();
    let kind = fields.next().unwrap_or_default();
    let nums = numbers(hl, &fields.collect::<Vec<_>>().join(" "))?;
    match (kind, nums.as_slice()) {
        ("OA", &[r, n, t]) => {
            let (al, alph) = lines.next().ok_or_else(|| parse_err(hl, "missing alphabet line"))?;
            let alphabets = numbers(al, alph)?;
            if alphabets.len() != n as usize {
                return Err(parse_err(al, format!("{} alphabets for {n} columns", alphabets.len())));
            }
            let data = read_rows(lines, n as usize, r as usize)?;
            let array = MixedLevelArray::new(alphabets, data)?;
            Ok(ArrayFile::Oa { array, strength: t })
        }
        ("DS", &[r, c, s, t]) => {
            let data = read_rows(lines, c as usize, r as usize)?;
            Ok(ArrayFile::Ds(DifferenceScheme::new(Group::for_order(s), c as usize, data, t)?))
        }
        _ => Err(parse_err(hl, format!("expected `OA r n t` or `DS r c s t`, found `{header}`"))),
    }
}

fn read_rows<'a>(lines: impl Iterator<Item = (usize, &'a str)>, cols: usize, rows: usize) -> Result<Vec<u32>, Error> {
    let mut data = Vec::with_capacity(rows * cols);
    let mut count = 0;
    let mut last = 1;
    for (ln, line) in lines {
        let row = numbers(ln, line)?;
        if row.len() != cols {
            return Err(parse_err(ln, format!("row has {} entries, expected {cols}", row.len())));
        }
        data.extend(row);
        count += 1;
        last = ln;
    }
    if count != rows {
        return Err(parse_err(last, format!("{count} rows, header says {rows}")));
    }
    Ok(data)
}

pub fn format_oa(array: &MixedLevelArray, strength: u32) -> String {
    let mut out = format!("OA {} {} {strength}\n", array.rows(), array.cols());
    out.push_str(&join(array.alphabets(), " "));
    out.push('\n');
    for row in array.iter_rows() {
        out.push_str(&join(row, " "));
        out.push('\n');
    }
    out
}

pub fn format_ds(scheme: &DifferenceScheme) -> String {
    let mut out = format!("DS {} {} {} {}\n", scheme.rows(), scheme.cols(), scheme.group().order(), scheme.strength());
    for i in 0..scheme.rows() {
        out.push_str(&join(scheme.row(i), " "));
        out.push('\n');
    }
    out
}

fn join(xs: &[u32], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Kets grouped into states, as read from a ket file.
#[derive(Debug, Clone)]
pub struct KetFile {
    pub kets: MixedLevelArray,
    pub states: usize,
}

pub fn parse_kets(text: &str) -> Result<KetFile, Error> {
    let mut alphabets: Option<Vec<u32>> = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim().strip_prefix('#') {
            if let Some(list) = rest.trim().strip_prefix("alphabets:") {
                alphabets = Some(numbers(i + 1, list)?);
            }
        }
    }
    let mut states: Vec<Vec<Vec<u32>>> = Vec::new();
    for (ln, line) in content_lines(text) {
        let mut kets = Vec::new();
        for term in line.split('+') {
            let term = term.trim();
            let inner = term
                .strip_prefix('|')
                .and_then(|t| t.strip_suffix(KET_CLOSE).or_else(|| t.strip_suffix('>')))
                .ok_or_else(|| parse_err(ln, format!("`{term}` is not a ket |a,b,...⟩")))?;
            kets.push(numbers(ln, inner)?);
        }
        states.push(kets);
    }
    let first = states.first().ok_or_else(|| parse_err(1, "no states"))?;
    let n = first[0].len();
    let size = first.len();
    let mut data = Vec::new();
    for (s, kets) in states.iter().enumerate() {
        if kets.len() != size {
            return Err(parse_err(0, format!("state {s} has {} kets, state 0 has {size}", kets.len())));
        }
        for k in kets {
            if k.len() != n {
                return Err(parse_err(0, format!("state {s} has a ket on {} parties, expected {n}", k.len())));
            }
            data.extend_from_slice(k);
        }
    }
    let alphabets = match alphabets {
        Some(a) if a.len() == n => a,
        Some(a) => return Err(parse_err(0, format!("{} alphabets for {n} parties", a.len()))),
        None => (0..n).map(|j| data.iter().skip(j).step_by(n).max().map_or(1, |m| m + 1)).collect(),
    };
    Ok(KetFile { kets: MixedLevelArray::new(alphabets, data)?, states: states.len() })
}

pub fn format_kets(code: &QuantumCode) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", code.params);
    if let Some(m) = code.params.m {
        let _ = writeln!(out, "# m = {m}, singleton = {}", code.params.singleton);
    }
    for line in provenance_lines(&code.provenance) {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# alphabets: {}", join(code.kets().alphabets(), " "));
    for b in 0..code.blocks() {
        let terms: Vec<String> = code.block(b).map(|k| format!("|{}{KET_CLOSE}", join(k, ","))).collect();
        out.push_str(&terms.join(" + "));
        out.push('\n');
    }
    out
}

pub fn provenance_lines(p: &Provenance) -> Vec<String> {
    let mut lines = vec![format!("theorem: {}", p.theorem)];
    lines.extend(p.ingredients.iter().map(|i| format!("ingredient: {i}")));
    for a in &p.assets {
        lines.push(format!("asset: {} sha256 {}", a.name, a.digest.as_deref().unwrap_or("-")));
    }
    if let Some(o) = p.origin {
        lines.push(format!(
            "origin: strength {}, partition strength {}, minimal distance {}",
            o.strength, o.partition_strength, o.min_distance
        ));
    }
    lines.extend(p.notes.iter().map(|n| format!("note: {n}")));
    lines
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: u128,
    pub d_plus_1: u32,
    pub alphabets: Vec<u32>,
    pub m: Option<u128>,
    pub singleton: u128,
    #[serde(default)]
    pub admissible_upper: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetRecordRef {
    pub name: String,
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginRecord {
    pub strength: u32,
    pub partition_strength: u32,
    pub min_distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub theorem: String,
    #[serde(default)]
    pub ingredients: Vec<String>,
    #[serde(default)]
    pub assets: Vec<AssetRecordRef>,
    #[serde(default)]
    pub origin: Option<OriginRecord>,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// The structured export of a code. `basis[i]` lists the kets of the
/// i-th basis state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub params: ParamsRecord,
    pub basis: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    pub provenance: ProvenanceRecord,
}

impl CodeRecord {
    pub fn from_code(code: &QuantumCode) -> Self {
        let p = &code.params;
        let prov = &code.provenance;
        CodeRecord {
            params: ParamsRecord {
                n: p.n,
                k: p.k,
                d_plus_1: p.d_plus_1,
                alphabets: p.alphabets.clone(),
                m: p.m,
                singleton: p.singleton,
                admissible_upper: p.admissible_upper,
            },
            basis: (0..code.blocks()).map(|b| code.block(b).map(<[u32]>::to_vec).collect()).collect(),
            provenance: ProvenanceRecord {
                theorem: prov.theorem.clone(),
                ingredients: prov.ingredients.clone(),
                assets: prov.assets.iter().map(|a| AssetRecordRef { name: a.name.clone(), sha256: a.digest.clone() }).collect(),
                origin: prov.origin.map(|o| OriginRecord {
                    strength: o.strength,
                    partition_strength: o.partition_strength,
                    min_distance: o.min_distance,
                }),
                notes: prov.notes.clone(),
            },
        }
    }

    /// Rebuilds the code and checks the stored parameters against the
    /// recomputed ones.
    pub fn to_code(&self) -> Result<QuantumCode, Error> {
        let states = self.basis.len();
        let mut data = Vec::new();
        let size = self.basis.first().map_or(0, Vec::len);
        for (i, kets) in self.basis.iter().enumerate() {
            if kets.len() != size {
                return Err(parse_err(0, format!("basis state {i} has {} kets, state 0 has {size}", kets.len())));
            }
            for k in kets {
                if k.len() != self.params.n {
                    return Err(parse_err(0, format!("ket of length {} in a code on {} parties", k.len(), self.params.n)));
                }
                data.extend_from_slice(k);
            }
        }
        let kets = MixedLevelArray::new(self.params.alphabets.clone(), data)?;
        let pr = &self.provenance;
        let prov = Provenance {
            theorem: pr.theorem.clone(),
            ingredients: pr.ingredients.clone(),
            assets: pr.assets.iter().map(|a| AssetRef { name: a.name.clone(), digest: a.sha256.clone() }).collect(),
            origin: pr.origin.map(|o| OaOrigin {
                strength: o.strength,
                partition_strength: o.partition_strength,
                min_distance: o.min_distance,
            }),
            notes: pr.notes.clone(),
        };
        let code = QuantumCode::from_kets(kets, states, self.params.d_plus_1, prov)?;
        let recomputed = CodeRecord::from_code(&code).params;
        if recomputed != self.params {
            return Err(parse_err(0, format!("stored parameters {:?} disagree with the basis ({:?})", self.params, recomputed)));
        }
        Ok(code)
    }
}

pub fn format_record(code: &QuantumCode) -> String {
    let mut s = serde_json::to_string(&CodeRecord::from_code(code)).expect("records always serialize");
    s.push('\n');
    s
}

/// Reads a code from either a JSON record or a ket file. Ket files carry
/// no distance, so `d_plus_1` is supplied by the caller.
pub fn parse_code(text: &str, d_plus_1: u32) -> Result<QuantumCode, Error> {
    if text.trim_start().starts_with('{') {
        let rec: CodeRecord = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
        let code = rec.to_code()?;
        if code.params.d_plus_1 == d_plus_1 {
            return Ok(code);
        }
        let mut code = code;
        code.params = mqmds_core::CodeParams::new(code.params.k, d_plus_1, code.params.alphabets.clone())?;
        return Ok(code);
    }
    let f = parse_kets(text)?;
    Ok(QuantumCode::from_kets(f.kets, f.states, d_plus_1, Provenance::default())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub d: u32,
    pub subsets: u64,
    pub strict_failures: u64,
    pub def5_failures: u64,
}

/// JSON form of a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub code: String,
    pub mode: String,
    pub claimed_d: u32,
    pub pass: bool,
    pub strict_pass: bool,
    pub def5_pass: bool,
    pub certified_strict: u32,
    pub certified_def5: u32,
    pub levels: Vec<LevelRecord>,
    pub witness: Option<String>,
    pub failed_subsets: Vec<Vec<usize>>,
}

impl From<&VerificationReport> for ReportRecord {
    fn from(r: &VerificationReport) -> Self {
        ReportRecord {
            code: r.params.to_string(),
            mode: r.mode.to_string(),
            claimed_d: r.claimed_d,
            pass: r.passed(),
            strict_pass: r.strict_pass,
            def5_pass: r.def5_pass,
            certified_strict: r.certified_strict,
            certified_def5: r.certified_def5,
            levels: r
                .levels
                .iter()
                .map(|l| LevelRecord { d: l.d, subsets: l.subsets, strict_failures: l.strict_failures, def5_failures: l.def5_failures })
                .collect(),
            witness: r.witness().map(|w| w.to_string()),
            failed_subsets: r.failed_subsets.clone(),
        }
    }
}
