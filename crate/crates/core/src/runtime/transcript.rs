//! Append-only log of every request the server decoded, field by field.
//! This is what the server operator gets to see, and the evidence base for
//! the secrecy audit.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub arrival_index: u64,
    pub op: String,
    pub raw_fields: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Needle {
    Text(String),
    Bytes(Vec<u8>),
}

impl Needle {
    fn bytes(&self) -> &[u8] {
        match self {
            Needle::Text(s) => s.as_bytes(),
            Needle::Bytes(b) => b,
        }
    }
}

impl From<&str> for Needle {
    fn from(s: &str) -> Self {
        Needle::Text(s.to_owned())
    }
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    needle.is_empty() || haystack.windows(needle.len()).any(|w| w == needle)
}

fn value_contains(value: &Value, needle: &[u8]) -> bool {
    match value {
        Value::String(s) => contains(s.as_bytes(), needle),
        Value::Number(n) => contains(n.to_string().as_bytes(), needle),
        Value::Array(items) => items.iter().any(|v| value_contains(v, needle)),
        Value::Object(map) => map.iter().any(|(k, v)| contains(k.as_bytes(), needle) || value_contains(v, needle)),
        Value::Bool(_) | Value::Null => false,
    }
}

impl TranscriptEntry {
    pub fn contains(&self, needle: &Needle) -> bool {
        value_contains(&self.raw_fields, needle.bytes())
    }
}

#[derive(Default)]
struct Inner {
    entries: Vec<TranscriptEntry>,
    sink: Option<File>,
}

#[derive(Default)]
pub struct Transcript {
    inner: RwLock<Inner>,
}

impl Transcript {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens a line-delimited JSON transcript, keeping earlier entries and
    /// appending new ones to the same file.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let entries = if path.as_ref().exists() { read_entries(path.as_ref())? } else { Vec::new() };
        let sink = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Transcript { inner: RwLock::new(Inner { entries, sink: Some(sink) }) })
    }

    /// Read-only view of a transcript file.
    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        let entries = read_entries(path.as_ref())?;
        Ok(Transcript { inner: RwLock::new(Inner { entries, sink: None }) })
    }

    pub fn append(&self, op: &str, raw_fields: Value) -> io::Result<u64> {
        let mut inner = self.inner.write().expect("transcript lock");
        let arrival_index = inner.entries.last().map_or(0, |e| e.arrival_index + 1);
        let entry = TranscriptEntry { arrival_index, op: op.to_owned(), raw_fields };
        if let Some(sink) = inner.sink.as_mut() {
            let mut line = serde_json::to_vec(&entry).expect("entry serializes");
            line.push(b'\n');
            sink.write_all(&line)?;
            sink.flush()?;
        }
        inner.entries.push(entry);
        Ok(arrival_index)
    }

    pub fn grep(&self, needle: &Needle) -> Vec<TranscriptEntry> {
        let inner = self.inner.read().expect("transcript lock");
        inner.entries.iter().filter(|e| e.contains(needle)).cloned().collect()
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.inner.read().expect("transcript lock").entries.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("transcript lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn read_entries(path: &Path) -> io::Result<Vec<TranscriptEntry>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_grep() {
        assert!(Transcript::in_memory().grep(&"anything".into()).is_empty());
    }

    #[test]
    fn grep_finds_nested_strings() {
        let t = Transcript::in_memory();
        t.append("store", json!({"op": "store", "ciphertext": "AAAA"})).unwrap();
        t.append("share", json!({"op": "share", "original_password": "hunter2!"})).unwrap();
        t.append("access", json!({"op": "access", "timestamp": 1700000000})).unwrap();
        let hits = t.grep(&"hunter2!".into());
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].arrival_index, 1);
        assert_eq!(t.grep(&Needle::Bytes(b"1700000000".to_vec())).len(), 1);
    }

    #[test]
    fn arrival_indices_increase_and_persist() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("transcript.jsonl");
        {
            let t = Transcript::open(&path).unwrap();
            assert_eq!(t.append("a", json!({})).unwrap(), 0);
            assert_eq!(t.append("b", json!({})).unwrap(), 1);
        }
        let t = Transcript::open(&path).unwrap();
        assert_eq!(t.append("c", json!({})).unwrap(), 2);
        let loaded = Transcript::load(&path).unwrap();
        let ops: Vec<_> = loaded.entries().into_iter().map(|e| e.op).collect();
        assert_eq!(ops, ["a", "b", "c"]);
    }
}
