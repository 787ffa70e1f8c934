//! Argument parsing and the subcommands. `run` returns the exit status so
//! the binary and the tests share one code path.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mqmds_core::theorems::{corollary_5lie, theorem_52s, theorem_5s2, theorem_huan, theorem_s1, theorem_tn};
use mqmds_core::verify::{cross_validate, verify_code};
use mqmds_core::{Context, Mode, QuantumCode};

use crate::assets::{self, AddRequest, Source};
use crate::tables::{self, Limits};
use crate::text::{format_kets, format_record, parse_code, ReportRecord};
use crate::{read_file, write_file, Error, EXIT_USAGE, EXIT_VERIFICATION};

#[derive(Debug, Parser)]
#[command(name = "mqmds", version, about = "Build and verify m-QMDS codes from orthogonal arrays")]
pub struct Cli {
    /// Asset directory; overrides MQMDS_ASSET_DIR and the embedded copy.
    #[arg(long, global = true, value_name = "DIR")]
    pub assets: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a construction, verify the result and write it out.
    Construct(ConstructArgs),
    /// Check a code file at a given distance.
    Verify(VerifyArgs),
    /// Regenerate table rows and compare them with the expected values.
    Tables(TablesArgs),
    /// Inspect or extend the asset registry.
    Assets {
        #[command(subcommand)]
        action: AssetsAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
    C1,
    C2,
    C3,
    T5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ket,
    Record,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    /// The s1 of the divisor constructions; defaults to the single entry
    /// of --factors.
    #[arg(long)]
    pub s1: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<u32>,
    #[arg(long = "q-factors", value_delimiter = ',')]
    pub q_factors: Vec<u32>,
    /// Input code for t5: an asset name or a path to a record file.
    #[arg(long)]
    pub base: Option<String>,
    /// Column to split for t5.
    #[arg(long)]
    pub col: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ket")]
    pub format: Format,
    /// Exit 0 with a warning even when verification fails. The report is
    /// printed unchanged.
    #[arg(long = "unverified-ok")]
    pub unverified_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Def5,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub d: u32,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: ModeArg,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// I to VII, or `all`.
    #[arg(long)]
    pub id: String,
    #[arg(long = "max-s")]
    pub max_s: Option<u32>,
    /// Skip rows whose parent array would have more rows than this.
    #[arg(long = "max-rows", default_value_t = Limits::default().max_rows)]
    pub max_rows: u128,
}

#[derive(Debug, Subcommand)]
pub enum AssetsAction {
    /// Names, parameters and hashes.
    List,
    /// Re-check every entry; exit 4 if any is corrupt.
    Verify,
    /// Check a new array file and, if it passes, add it to the directory.
    Add {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long = "min-distance")]
        min_distance: Option<u32>,
        /// Declare the array as a code: rows split into this many blocks.
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long = "block-strength")]
        block_strength: Option<u32>,
        #[arg(long)]
        note: Option<String>,
    },
    /// Write the embedded asset directory to DIR.
    Export {
        #[arg(long)]
        dir: PathBuf,
    },
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let source = Source::resolve(cli.assets.clone());
    match cli.command {
        Command::Construct(a) => construct(&context(source, err)?, &a, out, err),
        Command::Verify(a) => verify(&a, out),
        Command::Tables(a) => run_tables(&context(source, err)?, &a, out),
        Command::Assets { action } => run_assets(source, action, out, err),
    }
}

/// Loads the registry for the drivers. Corrupt entries are reported and
/// left out, so only constructions that need them are affected.
fn context(source: Source, err: &mut dyn Write) -> Result<Context, Error> {
    let loaded = assets::load(source)?;
    for p in &loaded.problems {
        let _ = writeln!(err, "warning: skipping asset: {p}");
    }
    Ok(Context::new(loaded.registry))
}

fn required<T: Copy>(v: Option<T>, flag: &str, theorem: Theorem) -> Result<T, Error> {
    v.ok_or_else(|| Error::Usage(format!("{theorem:?} needs --{flag}").to_lowercase()))
}

fn build(ctx: &Context, a: &ConstructArgs) -> Result<QuantumCode, Error> {
    let th = a.theorem;
    let factors = || -> Result<Vec<u32>, Error> {
        if a.factors.is_empty() {
            a.s.map(|s| vec![s]).ok_or_else(|| Error::Usage("needs --s or --factors".into()))
        } else {
            Ok(a.factors.clone())
        }
    };
    let q = (!a.q_factors.is_empty()).then_some(a.q_factors.as_slice());
    let s1 = || -> Result<u32, Error> {
        match (a.s1, a.factors.as_slice()) {
            (Some(s1), _) => Ok(s1),
            (None, [s1]) => Ok(*s1),
            _ => Err(Error::Usage("needs --s1 or a single --factors value".into())),
        }
    };
    let code = match th {
        Theorem::T1 => theorem_5s2(ctx, required(a.s, "s", th)?, &factors()?)?,
        Theorem::T2 => theorem_52s(ctx, required(a.s, "s", th)?, &factors()?)?,
        Theorem::T3 => theorem_s1(ctx, required(a.s, "s", th)?, required(a.d, "d", th)?, s1()?)?,
        Theorem::C1 => {
            let d = a.d.unwrap_or(2);
            if d != 1 && d != 2 {
                return Err(Error::Usage(format!("c1 covers d = 1 and d = 2, got {d}")));
            }
            let mut c = theorem_s1(ctx, required(a.s, "s", th)?, d, s1()?)?;
            c.provenance.theorem = "c1".into();
            c
        }
        Theorem::T4 | Theorem::C2 => {
            let s = required(a.s, "s", th)?;
            let d = required(a.d, "d", th)?;
            let l = a.l.unwrap_or(0);
            if th == Theorem::C2 {
                let parts = mqmds_core::field::factorize_prime_powers(s).values();
                let need = 2 * d + 2 * l;
                if let Some(u) = parts.iter().find(|&&u| u < need) {
                    return Err(Error::Usage(format!(
                        "c2 needs every prime-power factor of {s} to be at least 2d+2l = {need}, {u} is not"
                    )));
                }
            }
            let codes = theorem_tn(ctx, s, d, l, &factors()?, q)?;
            let mut c = match (q, codes.second) {
                (Some(_), Some(second)) => second,
                _ => codes.first,
            };
            if th == Theorem::C2 {
                c.provenance.theorem = format!("c2 ({})", c.provenance.theorem);
            }
            c
        }
        Theorem::C3 => corollary_5lie(ctx, required(a.s, "s", th)?, &factors()?)?,
        Theorem::T5 => {
            let base = a.base.as_deref().ok_or_else(|| Error::Usage("t5 needs --base ASSET|PATH".into()))?;
            let q = q.ok_or_else(|| Error::Usage("t5 needs --q-factors".into()))?;
            let input = if ctx.assets.contains(base) {
                mqmds_core::theorems::code_from_asset(ctx, base)?
            } else {
                let text = read_file(std::path::Path::new(base))?;
                let d_plus_1 = a.d.map_or(2, |d| d + 1);
                parse_code(&text, d_plus_1)?
            };
            theorem_huan(ctx, &input, a.col.unwrap_or(0), q)?
        }
    };
    Ok(code)
}

fn construct(ctx: &Context, a: &ConstructArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let code = match build(ctx, a) {
        Ok(c) => c,
        Err(Error::Core(mqmds_core::Error::VerificationFailed(msg))) if a.unverified_ok => {
            let _ = writeln!(err, "warning: construction failed verification: {msg}");
            let _ = writeln!(err, "--unverified-ok: no code written, exiting 0");
            return Ok(0);
        }
        Err(e) => return Err(e),
    };
    let report = verify_code(&code, code.params.d(), Mode::Strict);
    let cv = cross_validate(&code)?;
    let _ = writeln!(err, "{report}");
    let _ = writeln!(
        err,
        "oracles   quantum {} / combinatorial {} ({})",
        pass(cv.quantum),
        pass(cv.combinatorial),
        if cv.agree() { "agree" } else { "DISAGREE" }
    );
    if let Some(m) = code.params.m {
        let _ = writeln!(err, "m         {m} (admissible upper end {})", code.params.admissible_upper.unwrap_or(0));
    }
    for note in &code.provenance.notes {
        let _ = writeln!(err, "note      {note}");
    }
    let ok = report.strict_pass && cv.quantum && cv.combinatorial;
    let text = match a.format {
        Format::Ket => format_kets(&code),
        Format::Record => format_record(&code),
    };
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            let _ = writeln!(err, "wrote     {}", path.display());
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if ok {
        Ok(0)
    } else if a.unverified_ok {
        let _ = writeln!(err, "warning: output is NOT verified (--unverified-ok)");
        Ok(0)
    } else {
        Err(Error::Verification(format!("{} did not pass both oracles", code.params)))
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let text = read_file(&a.code)?;
    let code = parse_code(&text, a.d + 1)?;
    if code.params.n < a.d as usize {
        return Err(Error::Usage(format!("d = {} exceeds the {} parties", a.d, code.params.n)));
    }
    let mode = match a.mode {
        ModeArg::Strict => Mode::Strict,
        ModeArg::Def5 => Mode::Definition5,
    };
    let report = verify_code(&code, a.d, mode);
    if a.json {
        let rec = ReportRecord::from(&report);
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rec).expect("reports always serialize"));
    } else {
        let _ = writeln!(out, "{report}");
    }
    Ok(if report.passed() { 0 } else { EXIT_VERIFICATION })
}

fn run_tables(ctx: &Context, a: &TablesArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let limits = Limits { max_s: a.max_s, max_rows: a.max_rows };
    let summary = tables::run_table(ctx, &a.id, limits)?;
    for r in &summary.results {
        let _ = writeln!(out, "{r}");
    }
    let _ = writeln!(out, "{summary}");
    Ok(if summary.failures() == 0 { 0 } else { EXIT_VERIFICATION })
}

fn run_assets(source: Source, action: AssetsAction, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match action {
        AssetsAction::List | AssetsAction::Verify => {
            let loaded = assets::load(source)?;
            let _ = writeln!(out, "source: {}", loaded.source);
            for e in &loaded.entries {
                let bad = loaded.problems.iter().any(|p| matches!(p, Error::AssetCorrupt { name, .. } if *name == e.name));
                let blocks = e.blocks.map_or(String::new(), |b| format!(" blocks={b}/t'={}", e.block_strength.unwrap_or(0)));
                let _ = writeln!(
                    out,
                    "{:<22} {:<4} r={:<4} n={:<2} alphabets={:?} t={} md={}{} sha256={}{}",
                    e.name,
                    format!("{:?}", e.kind).to_lowercase(),
                    e.rows,
                    e.cols,
                    e.alphabets,
                    e.strength,
                    e.min_distance,
                    blocks,
                    e.sha256,
                    if bad { "  CORRUPT" } else { "" }
                );
            }
            for p in &loaded.problems {
                let _ = writeln!(err, "error: {p}");
            }
            if matches!(action, AssetsAction::Verify) {
                let _ = writeln!(out, "{} of {} assets verified", loaded.registry.len(), loaded.entries.len());
                if !loaded.is_clean() {
                    return Ok(EXIT_VERIFICATION);
                }
            }
            Ok(0)
        }
        AssetsAction::Add { file, name, min_distance, blocks, block_strength, note } => {
            let Source::Dir(dir) = source else {
                return Err(Error::Usage(format!(
                    "assets add writes to a directory: pass --assets DIR or set {}",
                    assets::ENV_VAR
                )));
            };
            let entry = assets::add(&dir, &file, &AddRequest { name, min_distance, blocks, block_strength, note })?;
            let _ = writeln!(out, "added {} ({}) to {}", entry.name, entry.sha256, dir.display());
            Ok(0)
        }
        AssetsAction::Export { dir } => {
            assets::export_embedded(&dir)?;
            let _ = writeln!(out, "wrote the embedded assets to {}", dir.display());
            Ok(0)
        }
    }
}
