//! Line-delimited record files, dataset filters and seeded sampling.
//!
//! Every line of a record file is one [`RecordEnvelope`] serialized as JSON
//! with keys in lexicographic order. A run lives in
//! `<runs_dir>/<run_id>/` with one `<kind>.jsonl` file per record kind and
//! a `manifest.json`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::extract::{InvocationRecord, MethodRecord};
use crate::graph::{HelperChain, Resolution};
use crate::history::HistoryRecord;
use crate::metrics::ScoreCard;
use crate::prompt::GeneratedComment;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Method,
    Invocation,
    Resolution,
    Chain,
    History,
    GeneratedComment,
    Scorecard,
    RunManifest,
}

impl RecordKind {
    pub const ALL: [RecordKind; 8] = [
        RecordKind::Method,
        RecordKind::Invocation,
        RecordKind::Resolution,
        RecordKind::Chain,
        RecordKind::History,
        RecordKind::GeneratedComment,
        RecordKind::Scorecard,
        RecordKind::RunManifest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Method => "method",
            RecordKind::Invocation => "invocation",
            RecordKind::Resolution => "resolution",
            RecordKind::Chain => "chain",
            RecordKind::History => "history",
            RecordKind::GeneratedComment => "generated_comment",
            RecordKind::Scorecard => "scorecard",
            RecordKind::RunManifest => "run_manifest",
        }
    }

    pub fn schema_version(self) -> u32 {
        1
    }

    /// Checks that `payload` deserializes into this kind's record type.
    fn validate_payload(self, payload: &Value) -> std::result::Result<(), serde_json::Error> {
        fn check<T: DeserializeOwned>(v: &Value) -> std::result::Result<(), serde_json::Error> {
            T::deserialize(v).map(|_| ())
        }
        match self {
            RecordKind::Method => check::<MethodRecord>(payload),
            RecordKind::Invocation => check::<InvocationRecord>(payload),
            RecordKind::Resolution => check::<Resolution>(payload),
            RecordKind::Chain => check::<HelperChain>(payload),
            RecordKind::History => check::<HistoryRecord>(payload),
            RecordKind::GeneratedComment => check::<GeneratedComment>(payload),
            RecordKind::Scorecard => check::<ScoreCard>(payload),
            RecordKind::RunManifest => check::<RunManifest>(payload),
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RecordKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Data(format!("unknown record kind {s:?}")))
    }
}

/// Types stored under a fixed [`RecordKind`].
pub trait Record: Serialize + DeserializeOwned {
    const KIND: RecordKind;
}

macro_rules! record_kind {
    ($($ty:ty => $kind:ident),* $(,)?) => {
        $(impl Record for $ty {
            const KIND: RecordKind = RecordKind::$kind;
        })*
    };
}

record_kind! {
    MethodRecord => Method,
    InvocationRecord => Invocation,
    Resolution => Resolution,
    HelperChain => Chain,
    HistoryRecord => History,
    GeneratedComment => GeneratedComment,
    ScoreCard => Scorecard,
    RunManifest => RunManifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordEnvelope {
    pub kind: RecordKind,
    pub schema_version: u32,
    pub payload: Value,
}

impl RecordEnvelope {
    pub fn wrap<T: Record>(record: &T) -> Result<Self> {
        let payload = serde_json::to_value(record)
            .map_err(|e| Error::Data(format!("cannot serialize {} record: {e}", T::KIND)))?;
        Ok(RecordEnvelope {
            kind: T::KIND,
            schema_version: T::KIND.schema_version(),
            payload,
        })
    }

    pub fn decode<T: Record>(&self) -> Result<T> {
        if self.kind != T::KIND {
            return Err(Error::Data(format!(
                "expected a {} record, found {}",
                T::KIND,
                self.kind
            )));
        }
        T::deserialize(&self.payload)
            .map_err(|e| Error::Data(format!("invalid {} payload: {e}", self.kind)))
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.kind.schema_version();
        if self.schema_version != expected {
            return Err(Error::Data(format!(
                "{} record has schema_version {}, expected {expected}",
                self.kind, self.schema_version
            )));
        }
        self.kind
            .validate_payload(&self.payload)
            .map_err(|e| Error::Data(format!("invalid {} payload: {e}", self.kind)))
    }
}

pub fn wrap_all<T: Record>(records: &[T]) -> Result<Vec<RecordEnvelope>> {
    records.iter().map(RecordEnvelope::wrap).collect()
}

pub fn decode_all<T: Record>(envelopes: &[RecordEnvelope]) -> Result<Vec<T>> {
    envelopes.iter().map(RecordEnvelope::decode).collect()
}

/// Writes one envelope per line, replacing `path` atomically. Every record
/// is validated before anything touches the file system.
pub fn write_records(path: &Path, records: &[RecordEnvelope]) -> Result<usize> {
    let mut lines = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        record
            .validate()
            .map_err(|e| Error::Data(format!("record {}: {e}", i + 1)))?;
        // serde_json's map type is ordered, so keys come out sorted.
        let value = serde_json::to_value(record).map_err(|e| Error::Data(e.to_string()))?;
        lines.push(serde_json::to_string(&value).map_err(|e| Error::Data(e.to_string()))?);
    }
    let mut text = String::new();
    for line in &lines {
        text.push_str(line);
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())?;
    Ok(records.len())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Reads every line of `path`, stopping at the first malformed one.
pub fn read_records(path: &Path, kind: Option<RecordKind>) -> Result<Vec<RecordEnvelope>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let malformed = |message: String| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let line = line.map_err(|e| malformed(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let envelope: RecordEnvelope =
            serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        envelope.validate().map_err(|e| malformed(e.to_string()))?;
        if kind.is_none_or(|k| k == envelope.kind) {
            out.push(envelope);
        }
    }
    Ok(out)
}

/// Records that may carry a developer-written comment.
pub trait Commented {
    fn doc_comment(&self) -> Option<&str>;
}

impl Commented for MethodRecord {
    fn doc_comment(&self) -> Option<&str> {
        self.doc_comment.as_deref()
    }
}

/// Records that carry a code/comment alignment score in `[-1, 1]`.
pub trait Aligned {
    fn alignment(&self) -> Option<f64>;
}

impl Aligned for ScoreCard {
    fn alignment(&self) -> Option<f64> {
        Some(self.side / 100.0)
    }
}

/// A method paired with the alignment score of its own comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedMethod {
    pub method: MethodRecord,
    pub side: Option<f64>,
}

impl Commented for AlignedMethod {
    fn doc_comment(&self) -> Option<&str> {
        self.method.doc_comment()
    }
}

impl Aligned for AlignedMethod {
    fn alignment(&self) -> Option<f64> {
        self.side
    }
}

/// Keeps records whose comment is present and not blank.
pub fn filter_commented<T: Commented + Clone>(records: &[T]) -> Vec<T> {
    records
        .iter()
        .filter(|r| r.doc_comment().is_some_and(|c| !c.trim().is_empty()))
        .cloned()
        .collect()
}

/// Keeps records with alignment `≥ threshold`.
pub fn filter_by_alignment<T: Aligned + Clone>(records: &[T], threshold: f64) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let side = r
            .alignment()
            .ok_or_else(|| Error::Data(format!("record {} has no alignment score", i + 1)))?;
        if side >= threshold {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Draws exactly `n_per_class` records from every class without
/// replacement, using ChaCha8 seeded with `seed`. Output is grouped by class
/// in class order and keeps input order within a class.
pub fn stratified_sample<T: Clone, C: Ord + fmt::Debug>(
    records: &[T],
    class_of: impl Fn(&T) -> C,
    n_per_class: usize,
    seed: u64,
) -> Result<Vec<T>> {
    let mut classes: BTreeMap<C, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        classes.entry(class_of(r)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(classes.len() * n_per_class);
    for (class, members) in &classes {
        if members.len() < n_per_class {
            return Err(Error::Data(format!(
                "class {class:?} has {} records, fewer than {n_per_class}",
                members.len()
            )));
        }
        let mut picked = sample(&mut rng, members.len(), n_per_class).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|k| records[members[k]].clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StageCounts {
    pub files_parsed: u64,
    pub methods: u64,
    pub invocations: u64,
    pub dependent: u64,
    pub independent: u64,
    pub history_records: u64,
    pub selected: u64,
    pub comments_generated: u64,
    pub cards_scored: u64,
}

/// Reproducibility record of a run. Timestamps live only here so that
/// record files stay byte-identical across repeated runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config_digest: String,
    pub tool_version: String,
    pub created_at: String,
    pub updated_at: String,
    /// Completion time of each command, keyed by command name.
    #[serde(default)]
    pub stages: BTreeMap<String, String>,
    #[serde(default)]
    pub counts: StageCounts,
}

impl RunManifest {
    pub fn new(run_id: &str, config_digest: &str) -> Self {
        let now = now_rfc3339();
        RunManifest {
            run_id: run_id.to_string(),
            config_digest: config_digest.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_at: now.clone(),
            updated_at: now,
            stages: BTreeMap::new(),
            counts: StageCounts::default(),
        }
    }

    pub fn record_stage(&mut self, stage: &str) {
        let now = now_rfc3339();
        self.stages.insert(stage.to_string(), now.clone());
        self.updated_at = now;
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.counts;
        if c.dependent + c.independent != 0 && c.dependent + c.independent != c.methods {
            return Err(Error::Data(format!(
                "manifest counts {} dependent + {} independent != {} methods",
                c.dependent, c.independent, c.methods
            )));
        }
        Ok(())
    }
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// The directory of one run.
#[derive(Debug, Clone)]
pub struct RunStore {
    dir: PathBuf,
    run_id: String,
}

impl RunStore {
    pub fn new(runs_dir: &Path, run_id: &str) -> Result<Self> {
        let valid = !run_id.is_empty()
            && run_id != "."
            && run_id != ".."
            && run_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
        if !valid {
            return Err(Error::Config(format!(
                "run id {run_id:?} must be non-empty and use only letters, digits, '-', '_' or '.'"
            )));
        }
        Ok(RunStore {
            dir: runs_dir.join(run_id),
            run_id: run_id.to_string(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn path(&self, kind: RecordKind) -> PathBuf {
        self.dir.join(format!("{kind}.jsonl"))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.dir.join("manifest.json")
    }

    /// A named subset of the run's methods, such as `filtered` or `sample`.
    pub fn selection_path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("selection-{name}.jsonl"))
    }

    pub fn write_selection(&self, name: &str, methods: &[MethodRecord]) -> Result<usize> {
        write_records(&self.selection_path(name), &wrap_all(methods)?)
    }

    pub fn read_selection(&self, name: &str) -> Result<Vec<MethodRecord>> {
        let path = self.selection_path(name);
        if !path.is_file() {
            return Err(Error::Data(format!(
                "run {} has no selection named {name:?}",
                self.run_id
            )));
        }
        decode_all(&read_records(&path, Some(RecordKind::Method))?)
    }

    pub fn exists(&self, kind: RecordKind) -> bool {
        self.path(kind).is_file()
    }

    pub fn write<T: Record>(&self, records: &[T]) -> Result<usize> {
        write_records(&self.path(T::KIND), &wrap_all(records)?)
    }

    pub fn read<T: Record>(&self) -> Result<Vec<T>> {
        let path = self.path(T::KIND);
        if !path.is_file() {
            return Err(Error::Data(format!(
                "run {} has no {} records; run the producing command first",
                self.run_id,
                T::KIND
            )));
        }
        decode_all(&read_records(&path, Some(T::KIND))?)
    }

    pub fn load_manifest(&self) -> Result<Option<RunManifest>> {
        let path = self.manifest_path();
        if !path.is_file() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let envelope: RecordEnvelope = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        envelope.validate()?;
        Ok(Some(envelope.decode()?))
    }

    pub fn save_manifest(&self, manifest: &RunManifest) -> Result<()> {
        manifest.validate()?;
        let envelope = RecordEnvelope::wrap(manifest)?;
        let mut text = serde_json::to_string_pretty(
            &serde_json::to_value(&envelope).map_err(|e| Error::Data(e.to_string()))?,
        )
        .map_err(|e| Error::Data(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.manifest_path(), text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;
    use crate::extract::MethodId;

    fn method(name: &str, comment: Option<&str>) -> MethodRecord {
        MethodRecord {
            method_id: MethodId::from(name),
            repo: "r".into(),
            file: "A.java".into(),
            name: name.into(),
            param_count: 0,
            start_line: 1,
            end_line: 2,
            body_text: format!("void {name}() {{}}"),
            doc_comment: comment.map(str::to_string),
            language: Language::Java,
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("method.jsonl");
        let records = wrap_all(&[
            method("a", Some("A.")),
            method("b", None),
            method("c", None),
        ])
        .unwrap();
        assert_eq!(write_records(&path, &records).unwrap(), 3);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("{\"kind\":\"method\",\"payload\":{"));
        assert_eq!(read_records(&path, None).unwrap(), records);

        assert_eq!(write_records(&path, &[]).unwrap(), 0);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
    }

    #[test]
    fn invalid_version_is_rejected_before_writing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("method.jsonl");
        let mut records = wrap_all(&[method("a", None)]).unwrap();
        records[0].schema_version = 99;
        assert!(write_records(&path, &records).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn corrupted_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("method.jsonl");
        let records = wrap_all(&[method("a", None), method("b", None), method("c", None)]).unwrap();
        write_records(&path, &records).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines[1] = "{not json";
        std::fs::write(&path, lines.join("\n")).unwrap();
        match read_records(&path, None) {
            Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_records(&dir.path().join("missing.jsonl"), None).is_err());
    }

    #[test]
    fn kind_filter() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mixed.jsonl");
        let mut records = wrap_all(&[method("a", None)]).unwrap();
        records.extend(
            wrap_all(&[HistoryRecord {
                method_id: "a".into(),
                commit_count: 1,
                author_count: 1,
            }])
            .unwrap(),
        );
        write_records(&path, &records).unwrap();
        let only = read_records(&path, Some(RecordKind::History)).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].kind, RecordKind::History);
        assert!(only[0].decode::<MethodRecord>().is_err());
    }

    #[test]
    fn comment_filter() {
        let ms = [
            method("a", Some("Does a.")),
            method("b", None),
            method("c", Some("  ")),
        ];
        let kept = filter_commented(&ms);
        assert_eq!(kept, [ms[0].clone()]);
        assert!(filter_commented::<MethodRecord>(&[]).is_empty());
        assert_eq!(filter_commented(&kept), kept);
    }

    #[test]
    fn alignment_filter() {
        let rows: Vec<AlignedMethod> = [0.79, 0.80, 0.90]
            .iter()
            .map(|&s| AlignedMethod {
                method: method("m", Some("c")),
                side: Some(s),
            })
            .collect();
        let kept = filter_by_alignment(&rows, 0.8).unwrap();
        assert_eq!(
            kept.iter().map(|r| r.side.unwrap()).collect::<Vec<_>>(),
            [0.80, 0.90]
        );
        assert_eq!(filter_by_alignment(&rows, -1.0).unwrap().len(), 3);
        assert!(filter_by_alignment(&rows, 1.0001).unwrap().is_empty());
        let missing = [AlignedMethod {
            method: method("m", None),
            side: None,
        }];
        assert!(filter_by_alignment(&missing, 0.8).is_err());
    }

    #[test]
    fn sampling() {
        let records: Vec<(u32, bool)> = (0..2000).map(|i| (i, i % 2 == 0)).collect();
        let s = stratified_sample(&records, |r| r.1, 380, 7).unwrap();
        assert_eq!(s.len(), 760);
        assert_eq!(s.iter().filter(|r| r.1).count(), 380);
        assert_eq!(s, stratified_sample(&records, |r| r.1, 380, 7).unwrap());

        let small: Vec<(u32, bool)> = (0..5).map(|i| (i, true)).collect();
        assert_eq!(stratified_sample(&small, |r| r.1, 5, 1).unwrap(), small);
        assert!(stratified_sample(&small, |r| r.1, 6, 1).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = RunStore::new(dir.path(), "run-1").unwrap();
        assert!(store.load_manifest().unwrap().is_none());
        let mut m = RunManifest::new("run-1", "abc");
        m.counts.methods = 3;
        m.counts.dependent = 1;
        m.counts.independent = 2;
        m.record_stage("extract");
        store.save_manifest(&m).unwrap();
        assert_eq!(store.load_manifest().unwrap(), Some(m.clone()));
        m.counts.independent = 5;
        assert!(store.save_manifest(&m).is_err());
        assert!(RunStore::new(dir.path(), "../x").is_err());
        assert_eq!(
            store.path(RecordKind::GeneratedComment),
            dir.path().join("run-1/generated_comment.jsonl")
        );
    }
}
