//! The asset directory: a `manifest.toml` plus array files.
//!
//! A copy of the shipped directory is compiled into the binary. At run
//! time `--assets DIR` wins over `MQMDS_ASSET_DIR`, which wins over the
//! embedded copy. Each file's SHA-256 must match the manifest, and every
//! record is checked against its declared shape, strength and minimal
//! distance before the registry accepts it.

use std::fmt;
use std::path::{Path, PathBuf};

use mqmds_core::construct::AssetDecl;
use mqmds_core::{AssetPayload, AssetRecord, AssetRegistry};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::text::{parse_array_file, ArrayFile};
use crate::{read_file, write_file, Error};

pub const ENV_VAR: &str = "MQMDS_ASSET_DIR";
pub const MANIFEST: &str = "manifest.toml";

macro_rules! embed {
    ($($file:literal),* $(,)?) => {
        &[$(($file, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/", $file)))),*]
    };
}

static EMBEDDED: &[(&str, &str)] = embed!(
    "manifest.toml",
    "ds_4_4_2.txt",
    "ds_6_6_3.txt",
    "ds_8_8_4.txt",
    "ds_10_10_5.txt",
    "ds_14_14_7.txt",
    "ds_16_16_8.txt",
    "ds_18_18_9.txt",
    "oa_18_5_6_3333.txt",
    "oa_72_5_12_6666.txt",
    "oa_144_5_12_2.txt",
    "oa_100_4_10_2.txt",
    "code_7_8_3_4444222.txt",
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Oa,
    Ds,
    Code,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub kind: Kind,
    pub file: String,
    pub rows: usize,
    pub cols: usize,
    pub alphabets: Vec<u32>,
    pub strength: u32,
    pub min_distance: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_strength: Option<u32>,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct Manifest {
    #[serde(default)]
    asset: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Embedded,
    Dir(PathBuf),
}

impl Source {
    pub fn resolve(flag: Option<PathBuf>) -> Source {
        flag.or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map_or(Source::Embedded, Source::Dir)
    }

    fn read(&self, file: &str) -> Result<String, Error> {
        match self {
            Source::Embedded => EMBEDDED
                .iter()
                .find(|(name, _)| *name == file)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| Error::Usage(format!("`{file}` is not among the embedded assets"))),
            Source::Dir(dir) => read_file(&dir.join(file)),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Embedded => f.write_str("embedded"),
            Source::Dir(d) => write!(f, "{}", d.display()),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Builds the core record for one manifest entry from the file text,
/// checking the digest and that the file header agrees with the entry.
pub fn record_from(entry: &ManifestEntry, text: &str) -> Result<AssetRecord, Error> {
    let corrupt = |reason: String| Error::AssetCorrupt { name: entry.name.clone(), reason };
    let digest = sha256_hex(text.as_bytes());
    if !entry.sha256.eq_ignore_ascii_case(&digest) {
        return Err(corrupt(format!("sha256 is {digest}, manifest says {}", entry.sha256)));
    }
    let parsed = parse_array_file(text).map_err(|e| corrupt(e.to_string()))?;
    let payload = match (entry.kind, parsed) {
        (Kind::Oa, ArrayFile::Oa { array, strength }) if strength == entry.strength => AssetPayload::Array(array),
        (Kind::Code, ArrayFile::Oa { array, strength }) if strength == entry.strength => {
            let blocks = entry.blocks.ok_or_else(|| corrupt("code asset without `blocks`".into()))?;
            let block_strength = entry.block_strength.ok_or_else(|| corrupt("code asset without `block_strength`".into()))?;
            AssetPayload::Partitioned { array, blocks, block_strength }
        }
        (Kind::Ds, ArrayFile::Ds(s)) if s.strength() == entry.strength => AssetPayload::Scheme(s),
        (kind, _) => return Err(corrupt(format!("file does not hold a {kind:?} of strength {}", entry.strength))),
    };
    Ok(AssetRecord {
        name: entry.name.clone(),
        declared: AssetDecl {
            rows: entry.rows,
            cols: entry.cols,
            alphabets: entry.alphabets.clone(),
            strength: entry.strength,
            min_distance: entry.min_distance,
        },
        payload,
        digest: Some(digest),
    })
}

fn insert(reg: &mut AssetRegistry, rec: AssetRecord) -> Result<(), Error> {
    reg.insert(rec).map_err(|e| match e {
        mqmds_core::Error::AssetCorrupt { name, reason } => Error::AssetCorrupt { name, reason },
        other => Error::Core(other),
    })
}

/// A loaded directory. Entries that failed their checks are left out of
/// the registry and listed in `problems`.
#[derive(Debug)]
pub struct Loaded {
    pub source: Source,
    pub registry: AssetRegistry,
    pub entries: Vec<ManifestEntry>,
    pub problems: Vec<Error>,
}

impl Loaded {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

pub fn load(source: Source) -> Result<Loaded, Error> {
    let manifest = read_manifest(&source)?;
    let mut registry = AssetRegistry::new();
    let mut problems = Vec::new();
    for entry in &manifest.asset {
        let checked = source.read(&entry.file).and_then(|text| record_from(entry, &text)).and_then(|r| insert(&mut registry, r));
        if let Err(e) = checked {
            problems.push(match e {
                Error::Io { .. } | Error::Usage(_) => Error::AssetCorrupt { name: entry.name.clone(), reason: e.to_string() },
                e => e,
            });
        }
    }
    Ok(Loaded { source, registry, entries: manifest.asset, problems })
}

fn read_manifest(source: &Source) -> Result<Manifest, Error> {
    let text = source.read(MANIFEST)?;
    toml::from_str(&text).map_err(|e| Error::Parse { line: 0, msg: format!("{MANIFEST}: {e}") })
}

/// What `assets add` needs beyond the file itself.
#[derive(Debug, Clone, Default)]
pub struct AddRequest {
    pub name: Option<String>,
    pub min_distance: Option<u32>,
    pub blocks: Option<usize>,
    pub block_strength: Option<u32>,
    pub note: Option<String>,
}

/// Verifies `file` against the declaration and, only if every check
/// passes, copies it into `dir` and appends a manifest entry.
pub fn add(dir: &Path, file: &Path, req: &AddRequest) -> Result<ManifestEntry, Error> {
    let text = read_file(file)?;
    let file_name = file
        .file_name()
        .and_then(|f| f.to_str())
        .ok_or_else(|| Error::Usage(format!("{} has no file name", file.display())))?
        .to_string();
    let name = req.name.clone().unwrap_or_else(|| file_name.trim_end_matches(".txt").to_string());
    let parsed = parse_array_file(&text)?;
    let entry = match parsed {
        ArrayFile::Oa { array, strength } => ManifestEntry {
            name,
            kind: if req.blocks.is_some() { Kind::Code } else { Kind::Oa },
            file: file_name,
            rows: array.rows(),
            cols: array.cols(),
            alphabets: array.alphabets().to_vec(),
            strength,
            min_distance: req
                .min_distance
                .ok_or_else(|| Error::Usage("an array asset needs a declared --min-distance".into()))?,
            blocks: req.blocks,
            block_strength: req.blocks.map(|_| req.block_strength.unwrap_or(strength.saturating_sub(1))),
            sha256: sha256_hex(text.as_bytes()),
            note: req.note.clone(),
        },
        ArrayFile::Ds(s) => ManifestEntry {
            name,
            kind: Kind::Ds,
            file: file_name,
            rows: s.rows(),
            cols: s.cols(),
            alphabets: vec![s.group().order()],
            strength: s.strength(),
            min_distance: 0,
            blocks: None,
            block_strength: None,
            sha256: sha256_hex(text.as_bytes()),
            note: req.note.clone(),
        },
    };

    let source = Source::Dir(dir.to_path_buf());
    let manifest = if dir.join(MANIFEST).exists() { read_manifest(&source)? } else { Manifest::default() };
    if manifest.asset.iter().any(|e| e.name == entry.name) {
        return Err(Error::Usage(format!("an asset named `{}` already exists", entry.name)));
    }
    if manifest.asset.iter().any(|e| e.file == entry.file) {
        return Err(Error::Usage(format!("file name `{}` is already used by another asset", entry.file)));
    }
    insert(&mut AssetRegistry::new(), record_from(&entry, &text)?)?;

    let target = dir.join(&entry.file);
    if target.exists() && read_file(&target)? != text {
        return Err(Error::Usage(format!("{} exists with different contents", target.display())));
    }
    write_file(&target, &text)?;
    let appended = toml::to_string(&Manifest { asset: vec![entry.clone()] })
        .map_err(|e| Error::Usage(format!("cannot serialize manifest entry: {e}")))?;
    let mut manifest_text = if dir.join(MANIFEST).exists() { read_file(&dir.join(MANIFEST))? } else { String::new() };
    if !manifest_text.is_empty() && !manifest_text.ends_with("\n\n") {
        manifest_text.push('\n');
    }
    manifest_text.push_str(&appended);
    write_file(&dir.join(MANIFEST), &manifest_text)?;
    Ok(entry)
}

/// Writes the embedded directory to `dir`, for use as a starting point
/// for a custom asset directory.
pub fn export_embedded(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    for (name, text) in EMBEDDED {
        write_file(&dir.join(name), text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_registry_is_clean() {
        let loaded = load(Source::Embedded).unwrap();
        assert!(loaded.is_clean(), "{:?}", loaded.problems);
        assert_eq!(loaded.registry.len(), loaded.entries.len());
        assert_eq!(loaded.entries.len() + 1, EMBEDDED.len());
    }

    #[test]
    fn digest_mismatch_is_corrupt() {
        let loaded = load(Source::Embedded).unwrap();
        let entry = &loaded.entries[0];
        let text = Source::Embedded.read(&entry.file).unwrap();
        let mut tampered = text.clone();
        tampered.push('\n');
        assert!(matches!(record_from(entry, &tampered), Err(Error::AssetCorrupt { .. })));
    }
}
