//! A laboratory reimplementation of a legacy end-to-end-encrypted file storage
//! and sharing service, the attacks that break its confidentiality claims, and
//! a hardened variant of the same flows for side-by-side comparison.
//!
//! Layout:
//!
//! * [`crypto`]: the legacy constructions (zero-padded password keys, zero-IV
//!   AES-256-CBC, double-Keccak share keys) and the hardened primitives
//!   (PBKDF2, random IVs, strength checks).
//! * [`runtime`]: GUIDs, framing, the on-disk blob store and the transcript of
//!   everything the server observes.
//! * [`legacy`] and [`hardened`]: client and server halves of each flow.
//! * [`attack`]: password-space enumeration, the padding-check cracker,
//!   prefix leakage, padding collisions and the secrecy audit.

pub mod attack;
pub mod crypto;
pub mod hardened;
pub mod legacy;
pub mod runtime;
pub mod server;
pub mod transport;
pub mod vectors;
pub mod wire;

mod encoding;

pub use runtime::guid::Guid;
pub use server::Server;
