//! Cryptographic constructions, both the legacy service's and the hardened
//! replacements. Everything here is pure: randomness is always supplied by the
//! caller.

mod cipher;
mod digest;
mod hardened;
mod kdf;
mod policy;
mod share;

pub use cipher::{
    check_padding_only, decrypt_legacy, derive_legacy_key, encrypt_legacy, pkcs7_padding_len, BlockCheck, CipherBlob,
    LegacyKey, BLOCK_LEN, LEGACY_KEY_LEN,
};
pub use digest::{sha256_digest, Sha256Digest};
pub use hardened::{
    decrypt_hardened, encrypt_hardened, hardened_digest, password_strength_check, HardenedHeader, HardenedPolicy,
    HARDENED_HEADER_LEN, HARDENED_VERSION,
};
pub use kdf::{derive_key_kdf, pbkdf2_sha256, DEFAULT_KDF_ITERATIONS, KDF_ITERATION_FLOOR};
pub use policy::{printable_ascii, validate_password, PasswordPolicy, Violation, LEGACY_SPECIALS};
pub use share::{
    derive_hardened_share_keypair, derive_share_keypair, keccak256, sign_timestamp, timestamp_digest,
    verify_timestamp_sig, Address, ShareKeypair, TimestampSignature, HARDENED_SHARE_CONTEXT, LEGACY_SHARE_CONSTANT,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("invalid PKCS7 padding")]
    Padding,
    #[error("key is {len} bytes, the maximum is 32")]
    KeyTooLong { len: usize },
    #[error("ciphertext length {0} is not a positive multiple of 16")]
    BlobLength(usize),
    #[error("sharing password must not be empty")]
    EmptyPassword,
    #[error("derived private scalar is zero modulo the curve order")]
    ZeroScalar,
    #[error("{got} KDF iterations is below the floor of {floor}")]
    KdfIterations { got: u32, floor: u32 },
    #[error("unsupported hardened header version {0}")]
    HeaderVersion(u32),
    #[error("password rejected: {}", policy::describe(.0))]
    Policy(Vec<Violation>),
}
