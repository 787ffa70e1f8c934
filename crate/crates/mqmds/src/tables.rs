//! Table reproduction. Each expected row names a driver and its inputs,
//! the code string the driver must produce, and the cell as printed.
//! Rows whose printed cell disagrees with the construction are marked
//! `typo` and carry a note; they are compared against the corrected
//! value and reported separately.

use std::fmt;

use mqmds_core::theorems::{theorem_52s, theorem_5s2, theorem_s1, theorem_tn};
use mqmds_core::verify::cross_validate;
use mqmds_core::{Context, QuantumCode};
use serde::Deserialize;

use crate::Error;

static TABLES: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tables.toml"));

pub const IDS: [&str; 7] = ["I", "II", "III", "IV", "V", "VI", "VII"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Typo,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct TableRow {
    pub table: String,
    pub theorem: String,
    pub s: u32,
    pub d: Option<u32>,
    pub l: Option<u32>,
    pub s1: Option<u32>,
    pub factors: Option<Vec<u32>>,
    pub q_factors: Option<Vec<u32>>,
    pub expected: String,
    pub expected_m: Option<u64>,
    pub printed: String,
    pub printed_m: Option<u64>,
    pub admissible_upper: Option<u64>,
    pub status: RowStatus,
    pub note: Option<String>,
}

impl TableRow {
    /// Short description of the inputs, e.g. `t4 s=12 d=1 l=1 [2] q=[6, 2]`.
    pub fn inputs(&self) -> String {
        let mut out = format!("{} s={}", self.theorem, self.s);
        if let Some(d) = self.d {
            out += &format!(" d={d}");
        }
        if let Some(l) = self.l {
            out += &format!(" l={l}");
        }
        if let Some(s1) = self.s1 {
            out += &format!(" s1={s1}");
        }
        if let Some(f) = &self.factors {
            out += &format!(" {f:?}");
        }
        if let Some(q) = &self.q_factors {
            out += &format!(" q={q:?}");
        }
        out
    }

    /// Upper estimate of the parent array's row count, used to skip rows
    /// that are too large to verify in reasonable time.
    pub fn estimated_rows(&self) -> u128 {
        let s = self.s as u128;
        match self.theorem.as_str() {
            "t1" => s.pow(3),
            "t2" => 2 * s.pow(3),
            "t3" => s.pow(self.d.unwrap_or(1)),
            _ => s.pow(self.d.unwrap_or(1) + self.l.unwrap_or(0)),
        }
    }

    /// Runs the driver named by the row. Drivers verify their own output.
    pub fn build(&self, ctx: &Context) -> mqmds_core::Result<QuantumCode> {
        let missing = |what: &str| mqmds_core::Error::BadParameter(format!("row {} lacks `{what}`", self.inputs()));
        let factors = self.factors.clone().unwrap_or_else(|| vec![self.s]);
        match self.theorem.as_str() {
            "t1" => theorem_5s2(ctx, self.s, &factors),
            "t2" => theorem_52s(ctx, self.s, &factors),
            "t3" => theorem_s1(ctx, self.s, self.d.ok_or_else(|| missing("d"))?, self.s1.ok_or_else(|| missing("s1"))?),
            "t4" => {
                let codes = theorem_tn(
                    ctx,
                    self.s,
                    self.d.ok_or_else(|| missing("d"))?,
                    self.l.unwrap_or(0),
                    &factors,
                    self.q_factors.as_deref(),
                )?;
                Ok(match codes.second {
                    Some(c) if self.q_factors.is_some() => c,
                    _ => codes.first,
                })
            }
            other => Err(mqmds_core::Error::BadParameter(format!("unknown driver `{other}`"))),
        }
    }
}

pub fn load_rows() -> Result<Vec<TableRow>, Error> {
    #[derive(Deserialize)]
    struct File {
        row: Vec<TableRow>,
    }
    let f: File = toml::from_str(TABLES).map_err(|e| Error::Parse { line: 0, msg: format!("tables.toml: {e}") })?;
    Ok(f.row)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// The construction agrees with the printed cell.
    Match,
    /// The printed cell is a known typo and the construction agrees with
    /// the corrected value.
    TypoCorrected,
    Mismatch { got: String, got_m: Option<u128> },
    /// Built and verified, but the two oracles disagreed.
    OracleDisagreement,
    /// An ingredient could not be resolved.
    Unresolved(String),
    Skipped(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Match => "match",
            Outcome::TypoCorrected => "typo-corrected",
            Outcome::Mismatch { .. } => "MISMATCH",
            Outcome::OracleDisagreement => "ORACLES-DISAGREE",
            Outcome::Unresolved(_) => "unresolved",
            Outcome::Skipped(_) => "skipped",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::Mismatch { .. } | Outcome::OracleDisagreement)
    }
}

#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: TableRow,
    pub outcome: Outcome,
    pub code: Option<String>,
    pub m: Option<u128>,
    pub m_admissible: Option<bool>,
}

impl fmt::Display for RowResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.row;
        write!(f, "{:<4} {:<36} {:<15}", r.table, r.inputs(), self.outcome.label())?;
        match &self.outcome {
            Outcome::Match | Outcome::OracleDisagreement => {
                write!(f, " {} m={}", r.expected, fmt_m(self.m))?;
            }
            Outcome::TypoCorrected => {
                write!(f, " {} m={} (printed {} m={})", r.expected, fmt_m(self.m), r.printed, fmt_m(r.printed_m.map(u128::from)))?;
            }
            Outcome::Mismatch { got, got_m } => {
                write!(f, " got {got} m={}, expected {} m={}", fmt_m(*got_m), r.expected, fmt_m(r.expected_m.map(u128::from)))?;
            }
            Outcome::Unresolved(why) | Outcome::Skipped(why) => write!(f, " {why}")?,
        }
        if self.m_admissible == Some(false) {
            write!(f, " [m above admissible upper {}]", fmt_m(r.admissible_upper.map(u128::from)))?;
        }
        Ok(())
    }
}

fn fmt_m(m: Option<u128>) -> String {
    m.map_or_else(|| "-".into(), |m| m.to_string())
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_s: Option<u32>,
    pub max_rows: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_s: None, max_rows: 20_000 }
    }
}

pub fn check_row(ctx: &Context, row: &TableRow, limits: Limits) -> RowResult {
    let skip = |why: String| RowResult { row: row.clone(), outcome: Outcome::Skipped(why), code: None, m: None, m_admissible: None };
    if let Some(max) = limits.max_s {
        if row.s > max {
            return skip(format!("s > {max}"));
        }
    }
    let est = row.estimated_rows();
    if est > limits.max_rows {
        return skip(format!("about {est} rows exceeds the limit of {}", limits.max_rows));
    }
    let code = match row.build(ctx) {
        Ok(c) => c,
        Err(e) if e.is_ingredient() => {
            return RowResult { row: row.clone(), outcome: Outcome::Unresolved(e.to_string()), code: None, m: None, m_admissible: None }
        }
        Err(e) => {
            return RowResult {
                row: row.clone(),
                outcome: Outcome::Mismatch { got: format!("error: {e}"), got_m: None },
                code: None,
                m: None,
                m_admissible: None,
            }
        }
    };
    let got = code.params.to_string();
    let got_m = code.params.m;
    let agrees = cross_validate(&code).map(|cv| cv.agree() && cv.quantum).unwrap_or(false);
    let outcome = if got != row.expected || got_m != row.expected_m.map(u128::from) {
        Outcome::Mismatch { got: got.clone(), got_m }
    } else if !agrees {
        Outcome::OracleDisagreement
    } else if row.status == RowStatus::Typo {
        Outcome::TypoCorrected
    } else {
        Outcome::Match
    };
    RowResult { row: row.clone(), outcome, code: Some(got), m: got_m, m_admissible: Some(code.params.m_admissible()) }
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub results: Vec<RowResult>,
}

impl Summary {
    pub fn count(&self, label: &str) -> usize {
        self.results.iter().filter(|r| r.outcome.label() == label).count()
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.outcome.is_failure()).count()
    }

    pub fn above_upper(&self) -> usize {
        self.results.iter().filter(|r| r.m_admissible == Some(false)).count()
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rows: {} match, {} typo-corrected, {} mismatch, {} oracle disagreement, {} unresolved, {} skipped; {} with m above the admissible upper end",
            self.results.len(),
            self.count("match"),
            self.count("typo-corrected"),
            self.count("MISMATCH"),
            self.count("ORACLES-DISAGREE"),
            self.count("unresolved"),
            self.count("skipped"),
            self.above_upper()
        )
    }
}

/// Regenerates every row of table `id` (or of all tables for `all`).
pub fn run_table(ctx: &Context, id: &str, limits: Limits) -> Result<Summary, Error> {
    let rows = load_rows()?;
    let wanted: Vec<&TableRow> = rows.iter().filter(|r| id.eq_ignore_ascii_case("all") || r.table == id).collect();
    if wanted.is_empty() {
        return Err(Error::Usage(format!("unknown table `{id}`, expected one of {IDS:?} or `all`")));
    }
    Ok(Summary { results: wanted.into_iter().map(|r| check_row(ctx, r, limits)).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Alphabet tokens sorted by decreasing level, so `6^2 2^1 3^1` and
    /// `6^2 3^1 2^1` compare equal.
    fn canonical(code: &str) -> String {
        let code = code.replace("^{", "^").replace("} ", " ").replace("}}", "}");
        let (head, alph) = code.split_once("_{").unwrap();
        let mut parts: Vec<(u32, &str)> = alph
            .trim_end_matches('}')
            .split_whitespace()
            .map(|t| (t.split('^').next().unwrap().parse().unwrap(), t))
            .collect();
        parts.sort_by_key(|p| std::cmp::Reverse(p.0));
        let parts: Vec<&str> = parts.into_iter().map(|(_, t)| t).collect();
        format!("{head}_{{{}}}", parts.join(" "))
    }

    #[test]
    fn rows_load_and_cover_all_tables() {
        let rows = load_rows().unwrap();
        for id in IDS {
            assert!(rows.iter().any(|r| r.table == id), "table {id} missing");
        }
        for r in &rows {
            if r.status == RowStatus::Typo {
                assert!(r.note.is_some(), "{} has no note", r.inputs());
            } else {
                assert_eq!(r.expected, canonical(&r.printed), "{}", r.inputs());
                assert_eq!(r.expected_m, r.printed_m, "{}", r.inputs());
            }
        }
    }

    #[test]
    fn max_s_skips() {
        let rows = load_rows().unwrap();
        let big = rows.iter().find(|r| r.s == 16).unwrap();
        let res = check_row(&Context::default(), big, Limits { max_s: Some(9), max_rows: 1 << 40 });
        assert!(matches!(res.outcome, Outcome::Skipped(_)));
    }
}
