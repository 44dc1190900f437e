//! The corrected service. Storage uses a salted PBKDF2 key and a random IV;
//! sharing is done entirely on the client, so the server only ever sees
//! headers, ciphertexts, hashes, addresses and signatures.
//!
//! The legacy access flow (sign a timestamp, server checks the recovered
//! address) is kept, with share keys derived under a separate context string.

mod client;
mod server;

pub use client::HardenedClient;

use serde_json::{json, Value};

use crate::crypto::{hardened_digest, Address, CipherBlob, HardenedHeader, Sha256Digest};
use crate::runtime::{Guid, Namespace, Record};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardenedStoredObject {
    pub guid: Guid,
    pub header: HardenedHeader,
    pub ciphertext: CipherBlob,
    /// Over `header || ciphertext`.
    pub sha256: Sha256Digest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardenedShareRecord {
    pub share_guid: Guid,
    pub header: HardenedHeader,
    pub ciphertext: CipherBlob,
    pub sha256: Sha256Digest,
    pub address: Address,
    pub created_at: u64,
}

fn parse<T: serde::de::DeserializeOwned>(meta: &Value, field: &str) -> Result<T, String> {
    serde_json::from_value(meta.get(field).cloned().unwrap_or(Value::Null)).map_err(|e| format!("{field}: {e}"))
}

fn checked(header: &HardenedHeader, blob: Vec<u8>, sha256: &Sha256Digest) -> Result<CipherBlob, String> {
    let ciphertext = CipherBlob::new(blob).map_err(|e| e.to_string())?;
    if hardened_digest(header, &ciphertext) != *sha256 {
        return Err("object hash does not match header and ciphertext".into());
    }
    Ok(ciphertext)
}

impl Record for HardenedStoredObject {
    const NAMESPACE: Namespace = Namespace::Objects;
    const KIND: &'static str = "hardened_object";

    fn guid(&self) -> Guid {
        self.guid
    }

    fn blob(&self) -> &[u8] {
        self.ciphertext.as_bytes()
    }

    fn meta(&self) -> Value {
        json!({ "header": self.header, "sha256": self.sha256 })
    }

    fn from_parts(guid: Guid, blob: Vec<u8>, meta: Value) -> Result<Self, String> {
        let header = parse(&meta, "header")?;
        let sha256 = parse(&meta, "sha256")?;
        let ciphertext = checked(&header, blob, &sha256)?;
        Ok(HardenedStoredObject { guid, header, ciphertext, sha256 })
    }
}

impl Record for HardenedShareRecord {
    const NAMESPACE: Namespace = Namespace::Shares;
    const KIND: &'static str = "hardened_share";

    fn guid(&self) -> Guid {
        self.share_guid
    }

    fn blob(&self) -> &[u8] {
        self.ciphertext.as_bytes()
    }

    fn meta(&self) -> Value {
        json!({
            "header": self.header,
            "sha256": self.sha256,
            "address": self.address,
            "created_at": self.created_at,
        })
    }

    fn from_parts(share_guid: Guid, blob: Vec<u8>, meta: Value) -> Result<Self, String> {
        let header = parse(&meta, "header")?;
        let sha256 = parse(&meta, "sha256")?;
        let ciphertext = checked(&header, blob, &sha256)?;
        Ok(HardenedShareRecord {
            share_guid,
            header,
            ciphertext,
            sha256,
            address: parse(&meta, "address")?,
            created_at: parse(&meta, "created_at")?,
        })
    }
}
