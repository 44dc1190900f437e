//! The storage service. One logical state machine: mutations of the blob
//! store are serialized behind a single writer, and every decoded request is
//! appended to the transcript before it is acted on.
//!
//! The legacy and hardened request handlers live in [`crate::legacy`] and
//! [`crate::hardened`]; this module only dispatches.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

use crate::runtime::{frame_decode, frame_encode, BlobStore, Guid, Namespace, Record, StoreError, Transcript};
use crate::wire::{ErrorKind, Request, Response};

/// Maximum accepted distance between a signed timestamp and the server clock.
pub const DEFAULT_FRESHNESS_WINDOW: u64 = 300;
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";

pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{kind:?}: {message}")]
pub struct ServerError {
    pub kind: ErrorKind,
    pub message: String,
}

impl ServerError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        ServerError { kind, message: message.into() }
    }
}

impl From<StoreError> for ServerError {
    fn from(e: StoreError) -> Self {
        let kind = match e {
            StoreError::NotFound(_) | StoreError::WrongKind { .. } => ErrorKind::NotFound,
            StoreError::Corrupted { .. } | StoreError::Io(_) => ErrorKind::Storage,
        };
        ServerError::new(kind, e.to_string())
    }
}

pub fn system_clock() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub struct Server {
    store: BlobStore,
    transcript: Transcript,
    clock: Clock,
    freshness_window: u64,
    password_uses: AtomicU64,
    writer: Mutex<()>,
}

impl Server {
    pub fn new(store: BlobStore, transcript: Transcript) -> Self {
        Server {
            store,
            transcript,
            clock: Arc::new(system_clock),
            freshness_window: DEFAULT_FRESHNESS_WINDOW,
            password_uses: AtomicU64::new(0),
            writer: Mutex::new(()),
        }
    }

    pub fn in_memory() -> Self {
        Self::new(BlobStore::in_memory(), Transcript::in_memory())
    }

    /// Directory-backed server with its transcript beside the blobs.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let store = BlobStore::open(root.as_ref())?;
        let transcript = Transcript::open(root.as_ref().join(TRANSCRIPT_FILE))?;
        Ok(Self::new(store, transcript))
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_freshness_window(mut self, seconds: u64) -> Self {
        self.freshness_window = seconds;
        self
    }

    pub fn now(&self) -> u64 {
        (self.clock)()
    }

    pub fn freshness_window(&self) -> u64 {
        self.freshness_window
    }

    pub fn store(&self) -> &BlobStore {
        &self.store
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// How many times the server has turned a password into a key. Only the
    /// legacy share handler ever does.
    pub fn password_uses(&self) -> u64 {
        self.password_uses.load(Ordering::SeqCst)
    }

    pub(crate) fn note_password_use(&self) {
        self.password_uses.fetch_add(1, Ordering::SeqCst);
    }

    /// Issues a fresh GUID and persists the record built for it, atomically
    /// with respect to other writers.
    pub(crate) fn commit<R: Record>(&self, build: impl FnOnce(Guid) -> R) -> Result<Guid, ServerError> {
        let _guard = self.writer.lock().expect("server writer lock");
        let guid = loop {
            let g = Guid::new_random();
            if !self.store.contains(Namespace::Objects, g) && !self.store.contains(Namespace::Shares, g) {
                break g;
            }
        };
        self.store.persist(&build(guid))?;
        Ok(guid)
    }

    pub(crate) fn check_fresh(&self, timestamp: u64) -> Result<(), ServerError> {
        let now = self.now();
        if now.abs_diff(timestamp) > self.freshness_window {
            return Err(ServerError::new(
                ErrorKind::StaleTimestamp,
                format!("timestamp {timestamp} is outside the {}s window around {now}", self.freshness_window),
            ));
        }
        Ok(())
    }

    pub fn handle(&self, request: Request) -> Response {
        let raw = serde_json::to_value(&request).expect("requests serialize");
        if let Err(e) = self.transcript.append(request.op(), raw) {
            return error_response(ServerError::new(ErrorKind::Storage, format!("transcript: {e}")));
        }
        let result = match &request {
            Request::Store(r) => self.handle_store(r).map(|guid| Response::Stored { guid }),
            Request::Fetch(r) => self.handle_fetch(r).map(|blob| Response::Blob { ciphertext: blob.into_bytes() }),
            Request::Share(r) => self.handle_share(r).map(|share_guid| Response::Shared { share_guid }),
            Request::Access(r) => self.handle_access(r).map(|blob| Response::Blob { ciphertext: blob.into_bytes() }),
            Request::Hstore(r) => self.handle_hstore(r).map(|guid| Response::Stored { guid }),
            Request::Hfetch(r) => self
                .handle_hfetch(r)
                .map(|(header, blob)| Response::HardenedBlob { header, ciphertext: blob.into_bytes() }),
            Request::HshareUpload(r) => self.handle_hshare_upload(r).map(|share_guid| Response::Shared { share_guid }),
            Request::Haccess(r) => self
                .handle_haccess(r)
                .map(|(header, blob)| Response::HardenedBlob { header, ciphertext: blob.into_bytes() }),
        };
        result.unwrap_or_else(error_response)
    }

    /// Decodes one request frame and returns the encoded response frame.
    pub fn handle_frame(&self, bytes: &[u8]) -> Vec<u8> {
        let response = match frame_decode::<Request>(bytes) {
            Ok((request, _)) => self.handle(request),
            Err(e) => error_response(ServerError::new(ErrorKind::BadRequest, e.to_string())),
        };
        frame_encode(&response).unwrap_or_else(|e| {
            frame_encode(&error_response(ServerError::new(ErrorKind::Storage, e.to_string())))
                .expect("error responses are small")
        })
    }
}

fn error_response(e: ServerError) -> Response {
    Response::Error { kind: e.kind, message: e.message }
}
