//! Run manifests, CSV output and the persisted table of exact counts.
//!
//! # Count table format
//!
//! A UTF-8 text file. The first two lines are headers:
//!
//! ```text
//! # latpoly count table v1
//! # sha256 <hex digest of every following line, each terminated by '\n'>
//! ```
//!
//! Every further line is one record of whitespace separated fields
//! `model convention dim n constraint value`, with `value` a decimal integer
//! of arbitrary size. Records are sorted by key. A file whose digest does not
//! match its body is refused.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumeration::{self, Constraint, EnsembleSpec, Model};
use crate::error::{Error, Result};
use crate::lattice::AnimalConvention;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

const TABLE_MAGIC: &str = "# latpoly count table v1";

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Model::Tree, Model::Animal, Model::Walk]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfiguration(format!("unknown model {s:?}")))
    }
}

impl FromStr for Constraint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            Constraint::TranslationClasses,
            Constraint::ContainsOrigin,
            Constraint::HalfSpace,
            Constraint::LexStar,
            Constraint::Bridge,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| Error::InvalidConfiguration(format!("unknown constraint {s:?}")))
    }
}

impl FromStr for AnimalConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [AnimalConvention::Site, AnimalConvention::Subgraph]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfiguration(format!("unknown animal convention {s:?}")))
    }
}

// ---------------------------------------------------------------------------
// Manifests

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    /// Rigor labels present in the file.
    pub rigor: Vec<String>,
}

/// Provenance of one CLI run. The id hashes the command name, the config
/// snapshot and the code version; argv, timing and thread count are recorded
/// but do not enter it, so reruns with different parallelism share an id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub id: String,
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub code_version: String,
    pub animal_convention: Option<String>,
    /// Logarithms in every output are natural.
    pub log_convention: String,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
    pub outputs: Vec<OutputRecord>,
}

pub fn manifest_id(command: &str, config: &serde_json::Value, version: &str) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    // serde_json maps are ordered, so this is canonical
    h.update(config.to_string().as_bytes());
    h.update([0]);
    h.update(version.as_bytes());
    hex::encode(&h.finalize()[..8])
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, config: serde_json::Value) -> Self {
        RunManifest {
            id: manifest_id(command, &config, CODE_VERSION),
            command: command.to_string(),
            argv,
            config,
            code_version: CODE_VERSION.to_string(),
            animal_convention: None,
            log_convention: "natural".into(),
            seeds: Vec::new(),
            threads: rayon::current_num_threads(),
            started_unix_ms: 0,
            elapsed_ms: 0,
            outputs: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("manifest-{}.json", self.id)
    }

    /// Writes `manifest-<id>.json` into `dir`. An existing manifest with the
    /// same id is left untouched.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.file_name());
        if path.exists() {
            let old: RunManifest = serde_json::from_str(&fs::read_to_string(&path)?)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            if old.id != self.id {
                return Err(Error::Io(format!("{} holds a different manifest", path.display())));
            }
            return Ok(path);
        }
        fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

// ---------------------------------------------------------------------------
// CSV

/// Rows of string cells. Written with a leading `manifest_id` column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        CsvTable {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<T: ToString>(&mut self, row: impl IntoIterator<Item = T>) {
        let row: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self, manifest_id: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(std::iter::once("manifest_id").chain(self.header.iter().map(String::as_str)))
            .map_err(io)?;
        for r in &self.rows {
            w.write_record(std::iter::once(manifest_id).chain(r.iter().map(String::as_str)))
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self, manifest_id: &str) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                m.insert("manifest_id".into(), manifest_id.into());
                for (h, c) in self.header.iter().zip(r) {
                    m.insert(h.clone(), c.clone().into());
                }
                m.into()
            })
            .collect();
        rows.into()
    }
}

/// Formats a float so that it round-trips and prints identically everywhere.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:e}")
    }
}

// ---------------------------------------------------------------------------
// Count tables

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableKey {
    pub model: Model,
    pub convention: AnimalConvention,
    pub dim: usize,
    pub n: usize,
    pub constraint: Constraint,
}

impl From<&EnsembleSpec> for TableKey {
    fn from(s: &EnsembleSpec) -> Self {
        TableKey {
            model: s.model,
            // the convention only distinguishes animals
            convention: if s.model == Model::Animal {
                s.convention
            } else {
                AnimalConvention::Site
            },
            dim: s.dim,
            n: s.n,
            constraint: s.constraint,
        }
    }
}

impl TableKey {
    pub fn spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            model: self.model,
            dim: self.dim,
            n: self.n,
            constraint: self.constraint,
            convention: self.convention,
        }
    }
}

impl fmt::Display for TableKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.model.name(),
            self.convention.name(),
            self.dim,
            self.n,
            self.constraint.name()
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    pub entries: BTreeMap<TableKey, BigUint>,
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

impl CountTable {
    pub fn get(&self, spec: &EnsembleSpec) -> Option<&BigUint> {
        self.entries.get(&TableKey::from(spec))
    }

    /// Inserts a value; a different value already under the key is an error.
    pub fn insert(&mut self, key: TableKey, value: BigUint) -> Result<()> {
        match self.entries.get(&key) {
            Some(v) if *v != value => Err(Error::Table(format!(
                "conflicting values for [{key}]: {v} vs {value}"
            ))),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(key, value);
                Ok(())
            }
        }
    }

    /// Union of two tables. Fails without modifying `self` on any conflict.
    pub fn merge(&mut self, other: &CountTable) -> Result<()> {
        for (k, v) in &other.entries {
            if let Some(old) = self.entries.get(k) {
                if old != v {
                    return Err(Error::Table(format!(
                        "conflicting values for [{k}]: {old} vs {v}"
                    )));
                }
            }
        }
        for (k, v) in &other.entries {
            self.entries.entry(*k).or_insert_with(|| v.clone());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let body: String = self
            .entries
            .iter()
            .map(|(k, v)| format!("{k} {v}\n"))
            .collect();
        format!("{TABLE_MAGIC}\n# sha256 {}\n{body}", digest(&body))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Table(m);
        let mut lines = text.splitn(3, '\n');
        if lines.next() != Some(TABLE_MAGIC) {
            return Err(bad("missing table header".into()));
        }
        let sum = lines
            .next()
            .and_then(|l| l.strip_prefix("# sha256 "))
            .ok_or_else(|| bad("missing checksum line".into()))?;
        let body = lines.next().unwrap_or("");
        if digest(body) != sum.trim() {
            return Err(bad("checksum mismatch; refusing to load".into()));
        }
        let mut t = CountTable::default();
        for (i, line) in body.lines().enumerate() {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(bad(format!("record {}: expected 6 fields", i + 1)));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| bad(format!("record {}: {e}", i + 1)))
            };
            let key = TableKey {
                model: f[0].parse()?,
                convention: f[1].parse()?,
                dim: num(f[2])?,
                n: num(f[3])?,
                constraint: f[4].parse()?,
            };
            let value = BigUint::parse_bytes(f[5].as_bytes(), 10)
                .ok_or_else(|| bad(format!("record {}: bad integer", i + 1)))?;
            t.insert(key, value)?;
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// A count table backed by a file.
#[derive(Debug)]
pub struct TableStore {
    path: PathBuf,
    table: CountTable,
}

impl TableStore {
    /// Loads `path` if it exists, otherwise starts empty.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let table = if path.exists() {
            CountTable::load(&path)?
        } else {
            CountTable::default()
        };
        Ok(TableStore { path, table })
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }

    /// Looks the count up, or enumerates it and persists the grown table.
    pub fn get_or_compute(&mut self, spec: &EnsembleSpec) -> Result<BigUint> {
        if let Some(v) = self.table.get(spec) {
            return Ok(v.clone());
        }
        let v = enumeration::count(spec)?;
        self.table.insert(TableKey::from(spec), v.clone())?;
        self.table.save(&self.path)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(n: usize) -> TableKey {
        TableKey::from(&EnsembleSpec::trees(2, n, Constraint::TranslationClasses))
    }

    #[test]
    fn parse_names() {
        assert_eq!("walk".parse::<Model>().unwrap(), Model::Walk);
        assert_eq!("lex-star".parse::<Constraint>().unwrap(), Constraint::LexStar);
        assert_eq!("subgraph".parse::<AnimalConvention>().unwrap(), AnimalConvention::Subgraph);
        assert!("polymer".parse::<Model>().is_err());
    }

    #[test]
    fn text_round_trip_with_huge_values() {
        let mut t = CountTable::default();
        t.insert(key(3), BigUint::from(6u8)).unwrap();
        let big = BigUint::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap();
        t.insert(key(40), big).unwrap();
        let back = CountTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn tampering_is_detected() {
        let mut t = CountTable::default();
        t.insert(key(2), BigUint::from(2u8)).unwrap();
        let text = t.to_text().replace(" 2\n", " 3\n");
        assert!(matches!(CountTable::from_text(&text), Err(Error::Table(_))));
        assert!(CountTable::from_text("nonsense").is_err());
    }

    #[test]
    fn conflicting_merge_is_a_hard_error() {
        let mut a = CountTable::default();
        a.insert(key(2), BigUint::from(2u8)).unwrap();
        let mut b = CountTable::default();
        b.insert(key(2), BigUint::from(5u8)).unwrap();
        b.insert(key(3), BigUint::from(6u8)).unwrap();
        let before = a.clone();
        assert!(matches!(a.merge(&b), Err(Error::Table(_))));
        assert_eq!(a, before);
        let mut c = CountTable::default();
        c.insert(key(3), BigUint::from(6u8)).unwrap();
        a.merge(&c).unwrap();
        assert_eq!(a.entries.len(), 2);
    }

    #[test]
    fn manifest_id_ignores_threads_and_argv() {
        let cfg = serde_json::json!({"dim": 2, "n": 4});
        let a = RunManifest::new("enumerate", vec!["--threads".into(), "1".into()], cfg.clone());
        let b = RunManifest::new("enumerate", vec![], cfg);
        assert_eq!(a.id, b.id);
        assert_eq!(a.id.len(), 16);
        let c = RunManifest::new("enumerate", vec![], serde_json::json!({"dim": 3, "n": 4}));
        assert_ne!(a.id, c.id);
    }

    #[test]
    fn csv_carries_manifest_id() {
        let mut t = CsvTable::new(&["n", "count"]);
        t.push(["1", "4"]);
        t.push(["2", "12"]);
        let s = t.to_csv("abc").unwrap();
        assert_eq!(s, "manifest_id,n,count\nabc,1,4\nabc,2,12\n");
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -2.5e-300, 1.0 / 3.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
