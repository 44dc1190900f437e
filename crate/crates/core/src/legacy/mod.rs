//! The legacy service's four flows as reverse-engineered: store, download,
//! share, and shared-file access. The flaws are reproduced on purpose.

mod client;
mod server;

pub use client::LegacyClient;

use serde_json::{json, Value};

use crate::crypto::{sha256_digest, Address, CipherBlob, Sha256Digest};
use crate::runtime::{Guid, Namespace, Record};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredObject {
    pub guid: Guid,
    pub ciphertext: CipherBlob,
    pub sha256: Sha256Digest,
}

/// A shared copy: the server decrypted the source with the original password
/// and re-encrypted it under the sharing password's zero-padded key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareRecord {
    pub share_guid: Guid,
    pub source_guid: Guid,
    pub share_ciphertext: CipherBlob,
    pub address: Address,
    pub created_at: u64,
}

fn parse<T: serde::de::DeserializeOwned>(meta: &Value, field: &str) -> Result<T, String> {
    serde_json::from_value(meta.get(field).cloned().unwrap_or(Value::Null)).map_err(|e| format!("{field}: {e}"))
}

impl Record for StoredObject {
    const NAMESPACE: Namespace = Namespace::Objects;
    const KIND: &'static str = "legacy_object";

    fn guid(&self) -> Guid {
        self.guid
    }

    fn blob(&self) -> &[u8] {
        self.ciphertext.as_bytes()
    }

    fn meta(&self) -> Value {
        json!({ "sha256": self.sha256 })
    }

    fn from_parts(guid: Guid, blob: Vec<u8>, meta: Value) -> Result<Self, String> {
        let sha256: Sha256Digest = parse(&meta, "sha256")?;
        if sha256_digest(&blob) != sha256 {
            return Err("object hash does not match ciphertext".into());
        }
        let ciphertext = CipherBlob::new(blob).map_err(|e| e.to_string())?;
        Ok(StoredObject { guid, ciphertext, sha256 })
    }
}

impl Record for ShareRecord {
    const NAMESPACE: Namespace = Namespace::Shares;
    const KIND: &'static str = "legacy_share";

    fn guid(&self) -> Guid {
        self.share_guid
    }

    fn blob(&self) -> &[u8] {
        self.share_ciphertext.as_bytes()
    }

    fn meta(&self) -> Value {
        json!({
            "source_guid": self.source_guid,
            "address": self.address,
            "created_at": self.created_at,
        })
    }

    fn from_parts(share_guid: Guid, blob: Vec<u8>, meta: Value) -> Result<Self, String> {
        Ok(ShareRecord {
            share_guid,
            source_guid: parse(&meta, "source_guid")?,
            share_ciphertext: CipherBlob::new(blob).map_err(|e| e.to_string())?,
            address: parse(&meta, "address")?,
            created_at: parse(&meta, "created_at")?,
        })
    }
}
