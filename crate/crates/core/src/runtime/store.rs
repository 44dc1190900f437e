//! Blob persistence. Each record is a ciphertext file plus a JSON metadata
//! file carrying the SHA-256 of the blob; loads recompute and compare it.
//!
//! On disk: `<root>/<guid>.blob` and `<root>/<guid>.meta.json`, with share
//! records under `<root>/shares/`. The metadata file is written last and acts
//! as the commit marker.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde_json::{json, Value};
use thiserror::Error;

use super::guid::Guid;
use crate::crypto::sha256_digest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Namespace {
    Objects,
    Shares,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no record with guid {0}")]
    NotFound(Guid),
    #[error("record {guid} is a {found}, not a {expected}")]
    WrongKind { guid: Guid, expected: &'static str, found: String },
    #[error("record {guid} is corrupted: {reason}")]
    Corrupted { guid: Guid, reason: String },
    #[error("storage I/O: {0}")]
    Io(#[from] io::Error),
}

/// A typed record that can be split into a blob and JSON metadata.
pub trait Record: Sized {
    const NAMESPACE: Namespace;
    const KIND: &'static str;

    fn guid(&self) -> Guid;
    fn blob(&self) -> &[u8];
    fn meta(&self) -> Value;
    /// Rebuilds the record; `Err` carries a corruption reason.
    fn from_parts(guid: Guid, blob: Vec<u8>, meta: Value) -> Result<Self, String>;
}

type Entry = (Vec<u8>, Value);

enum Backend {
    Memory(RwLock<HashMap<(Namespace, Guid), Entry>>),
    Dir { root: PathBuf, writer: Mutex<()> },
}

pub struct BlobStore {
    backend: Backend,
}

impl BlobStore {
    pub fn in_memory() -> Self {
        BlobStore { backend: Backend::Memory(RwLock::new(HashMap::new())) }
    }

    /// Opens (creating if needed) a directory-backed store.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(root.join("shares"))?;
        Ok(BlobStore { backend: Backend::Dir { root, writer: Mutex::new(()) } })
    }

    pub fn root(&self) -> Option<&Path> {
        match &self.backend {
            Backend::Memory(_) => None,
            Backend::Dir { root, .. } => Some(root),
        }
    }

    fn dir(root: &Path, ns: Namespace) -> PathBuf {
        match ns {
            Namespace::Objects => root.to_path_buf(),
            Namespace::Shares => root.join("shares"),
        }
    }

    /// Paths of the blob and metadata files for a record.
    pub fn paths(&self, ns: Namespace, guid: Guid) -> Option<(PathBuf, PathBuf)> {
        let root = self.root()?;
        let dir = Self::dir(root, ns);
        Some((dir.join(format!("{guid}.blob")), dir.join(format!("{guid}.meta.json"))))
    }

    pub fn contains(&self, ns: Namespace, guid: Guid) -> bool {
        match &self.backend {
            Backend::Memory(map) => map.read().expect("store lock").contains_key(&(ns, guid)),
            Backend::Dir { .. } => self.paths(ns, guid).is_some_and(|(_, meta)| meta.exists()),
        }
    }

    pub fn list(&self, ns: Namespace) -> Result<Vec<Guid>, StoreError> {
        let mut out: Vec<Guid> = match &self.backend {
            Backend::Memory(map) => {
                map.read().expect("store lock").keys().filter(|(n, _)| *n == ns).map(|(_, g)| *g).collect()
            }
            Backend::Dir { root, .. } => {
                let mut guids = Vec::new();
                for entry in fs::read_dir(Self::dir(root, ns))? {
                    let name = entry?.file_name();
                    let name = name.to_string_lossy();
                    if let Some(stem) = name.strip_suffix(".meta.json") {
                        if let Ok(g) = stem.parse() {
                            guids.push(g);
                        }
                    }
                }
                guids
            }
        };
        out.sort();
        Ok(out)
    }

    pub fn persist<R: Record>(&self, record: &R) -> Result<(), StoreError> {
        let guid = record.guid();
        let blob = record.blob();
        let mut meta = json!({
            "kind": R::KIND,
            "guid": guid,
            "blob_sha256": sha256_digest(blob),
            "record": record.meta(),
        });
        meta[META_SHA256] = json!(meta_digest(&meta));
        match &self.backend {
            Backend::Memory(map) => {
                map.write().expect("store lock").insert((R::NAMESPACE, guid), (blob.to_vec(), meta));
            }
            Backend::Dir { writer, .. } => {
                let _guard = writer.lock().expect("store writer lock");
                let (blob_path, meta_path) = self.paths(R::NAMESPACE, guid).expect("dir backend");
                write_atomically(&blob_path, blob)?;
                let text = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
                write_atomically(&meta_path, &text)?;
            }
        }
        Ok(())
    }

    pub fn load<R: Record>(&self, guid: Guid) -> Result<R, StoreError> {
        let (blob, meta) = match &self.backend {
            Backend::Memory(map) => {
                map.read().expect("store lock").get(&(R::NAMESPACE, guid)).cloned().ok_or(StoreError::NotFound(guid))?
            }
            Backend::Dir { .. } => {
                let (blob_path, meta_path) = self.paths(R::NAMESPACE, guid).expect("dir backend");
                let meta_bytes = match fs::read(&meta_path) {
                    Ok(b) => b,
                    Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(guid)),
                    Err(e) => return Err(e.into()),
                };
                let meta: Value = serde_json::from_slice(&meta_bytes)
                    .map_err(|e| StoreError::Corrupted { guid, reason: format!("metadata: {e}") })?;
                let blob =
                    fs::read(&blob_path).map_err(|e| StoreError::Corrupted { guid, reason: format!("blob: {e}") })?;
                (blob, meta)
            }
        };

        let corrupted = |reason: String| StoreError::Corrupted { guid, reason };
        let mut meta = meta;
        let recorded_meta = meta.as_object_mut().and_then(|m| m.remove(META_SHA256));
        if recorded_meta.as_ref().and_then(Value::as_str) != Some(meta_digest(&meta).as_str()) {
            return Err(corrupted("metadata checksum mismatch".into()));
        }
        if meta.get("guid").and_then(Value::as_str) != Some(guid.to_string().as_str()) {
            return Err(corrupted("metadata belongs to another guid".into()));
        }
        let kind = meta.get("kind").and_then(Value::as_str).unwrap_or_default();
        if kind != R::KIND {
            return Err(StoreError::WrongKind { guid, expected: R::KIND, found: kind.to_owned() });
        }
        let recorded = meta.get("blob_sha256").and_then(Value::as_str).unwrap_or_default();
        let actual = sha256_digest(&blob).to_hex();
        if recorded != actual {
            return Err(corrupted(format!("blob hash {actual} does not match recorded {recorded}")));
        }
        let record_meta = meta.get("record").cloned().unwrap_or(Value::Null);
        R::from_parts(guid, blob, record_meta).map_err(corrupted)
    }
}

const META_SHA256: &str = "meta_sha256";

// serde_json maps are sorted, so the compact encoding is canonical.
fn meta_digest(meta: &Value) -> String {
    sha256_digest(&serde_json::to_vec(meta).expect("metadata serializes")).to_hex()
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq)]
    struct Note {
        guid: Guid,
        body: Vec<u8>,
        label: String,
    }

    impl Record for Note {
        const NAMESPACE: Namespace = Namespace::Objects;
        const KIND: &'static str = "note";

        fn guid(&self) -> Guid {
            self.guid
        }
        fn blob(&self) -> &[u8] {
            &self.body
        }
        fn meta(&self) -> Value {
            json!({ "label": self.label })
        }
        fn from_parts(guid: Guid, body: Vec<u8>, meta: Value) -> Result<Self, String> {
            let label = meta["label"].as_str().ok_or("missing label")?.to_owned();
            Ok(Note { guid, body, label })
        }
    }

    fn note() -> Note {
        Note { guid: Guid::new_random(), body: b"0123456789abcdef".to_vec(), label: "x".into() }
    }

    #[test]
    fn memory_round_trip() {
        let store = BlobStore::in_memory();
        let n = note();
        store.persist(&n).unwrap();
        assert_eq!(store.load::<Note>(n.guid).unwrap(), n);
        assert!(matches!(store.load::<Note>(Guid::new_random()), Err(StoreError::NotFound(_))));
        assert_eq!(store.list(Namespace::Objects).unwrap(), vec![n.guid]);
        assert!(store.list(Namespace::Shares).unwrap().is_empty());
    }

    #[test]
    fn dir_round_trip_survives_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let n = note();
        BlobStore::open(dir.path()).unwrap().persist(&n).unwrap();
        let reopened = BlobStore::open(dir.path()).unwrap();
        assert_eq!(reopened.load::<Note>(n.guid).unwrap(), n);
        assert!(dir.path().join(format!("{}.blob", n.guid)).exists());
        assert!(dir.path().join(format!("{}.meta.json", n.guid)).exists());
    }

    #[test]
    fn flipped_byte_on_disk_is_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let store = BlobStore::open(dir.path()).unwrap();
        let n = note();
        store.persist(&n).unwrap();
        let (blob_path, _) = store.paths(Namespace::Objects, n.guid).unwrap();
        let mut bytes = fs::read(&blob_path).unwrap();
        bytes[3] ^= 0x01;
        fs::write(&blob_path, bytes).unwrap();
        assert!(matches!(store.load::<Note>(n.guid), Err(StoreError::Corrupted { .. })));
    }

    #[test]
    fn edited_metadata_is_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let store = BlobStore::open(dir.path()).unwrap();
        let n = note();
        store.persist(&n).unwrap();
        let (_, meta_path) = store.paths(Namespace::Objects, n.guid).unwrap();
        let text = fs::read_to_string(&meta_path).unwrap();
        fs::write(&meta_path, text.replace("\"label\": \"x\"", "\"label\": \"y\"")).unwrap();
        assert!(matches!(store.load::<Note>(n.guid), Err(StoreError::Corrupted { .. })));
        fs::write(&meta_path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(store.load::<Note>(n.guid), Err(StoreError::Corrupted { .. })));
    }

    #[test]
    fn unknown_guid_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let store = BlobStore::open(dir.path()).unwrap();
        assert!(matches!(store.load::<Note>(Guid::new_random()), Err(StoreError::NotFound(_))));
    }
}
