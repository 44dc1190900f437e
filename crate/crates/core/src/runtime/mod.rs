//! Server-side plumbing: identifiers, framing, persistence and the transcript.

pub mod frame;
pub mod guid;
pub mod store;
pub mod transcript;

pub use frame::{frame_decode, frame_encode, read_frame, write_frame, FrameError, WireMessage, MAX_FRAME_LEN};
pub use guid::Guid;
pub use store::{BlobStore, Namespace, Record, StoreError};
pub use transcript::{Needle, Transcript, TranscriptEntry};
