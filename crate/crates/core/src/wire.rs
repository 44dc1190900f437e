//! Request and response messages. Every request is a JSON object with an
//! `op` discriminator; every response has a `status`. Payload bytes travel as
//! base64, digests and addresses as hex.
//!
//! Note that `share` carries both passwords in the clear. That is the defect
//! being modelled.

use serde::{Deserialize, Serialize};

use crate::crypto::{Address, HardenedHeader, Sha256Digest};
use crate::runtime::{Guid, WireMessage};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreRequest {
    #[serde(with = "crate::encoding::b64")]
    pub ciphertext: Vec<u8>,
    pub sha256: Sha256Digest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchRequest {
    pub guid: Guid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareRequest {
    pub source_guid: Guid,
    pub original_password: String,
    pub sharing_password: String,
    pub address: Address,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRequest {
    pub share_guid: Guid,
    pub timestamp: u64,
    #[serde(with = "crate::encoding::b64")]
    pub signature: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardenedUpload {
    pub header: HardenedHeader,
    #[serde(with = "crate::encoding::b64")]
    pub ciphertext: Vec<u8>,
    /// SHA-256 over the serialized header followed by the ciphertext.
    pub sha256: Sha256Digest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardenedShareUpload {
    pub header: HardenedHeader,
    #[serde(with = "crate::encoding::b64")]
    pub ciphertext: Vec<u8>,
    pub sha256: Sha256Digest,
    pub address: Address,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Request {
    Store(StoreRequest),
    Fetch(FetchRequest),
    Share(ShareRequest),
    Access(AccessRequest),
    Hstore(HardenedUpload),
    Hfetch(FetchRequest),
    HshareUpload(HardenedShareUpload),
    Haccess(AccessRequest),
}

impl Request {
    pub fn op(&self) -> &'static str {
        match self {
            Request::Store(_) => "store",
            Request::Fetch(_) => "fetch",
            Request::Share(_) => "share",
            Request::Access(_) => "access",
            Request::Hstore(_) => "hstore",
            Request::Hfetch(_) => "hfetch",
            Request::HshareUpload(_) => "hshare_upload",
            Request::Haccess(_) => "haccess",
        }
    }
}

impl WireMessage for Request {
    const TAG_FIELD: &'static str = "op";
    const KINDS: &'static [&'static str] =
        &["store", "fetch", "share", "access", "hstore", "hfetch", "hshare_upload", "haccess"];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    HashMismatch,
    MalformedBlob,
    NotFound,
    InvalidPassword,
    StaleTimestamp,
    AuthFailed,
    BadRequest,
    Storage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Response {
    Stored {
        guid: Guid,
    },
    Shared {
        share_guid: Guid,
    },
    Blob {
        #[serde(with = "crate::encoding::b64")]
        ciphertext: Vec<u8>,
    },
    HardenedBlob {
        header: HardenedHeader,
        #[serde(with = "crate::encoding::b64")]
        ciphertext: Vec<u8>,
    },
    Error {
        kind: ErrorKind,
        message: String,
    },
}

impl WireMessage for Response {
    const TAG_FIELD: &'static str = "status";
    const KINDS: &'static [&'static str] = &["stored", "shared", "blob", "hardened_blob", "error"];
}
