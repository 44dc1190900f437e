//! Share-link authentication keys: a secp256k1 keypair derived from the
//! sharing password by hashing it twice with Keccak-256, and an
//! Ethereum-style 20-byte address that the server stores in place of the key.

use std::fmt;
use std::str::FromStr;

use k256::ecdsa::{RecoveryId, Signature, SigningKey, VerifyingKey};
use k256::elliptic_curve::ops::Reduce;
use k256::{FieldBytes, NonZeroScalar, Scalar, U256};
use serde::{Deserialize, Serialize};
use sha3::{Digest, Keccak256};

use super::CryptoError;

/// Appended to the sharing password before hashing, as the legacy client does.
pub const LEGACY_SHARE_CONSTANT: &str = "American Psycho";

/// Prepended to the sharing password for hardened share keys so that the two
/// address families never coincide.
pub const HARDENED_SHARE_CONTEXT: &str = "cfs-lab/hardened-share-auth/v1\0";

pub fn keccak256(data: &[u8]) -> [u8; 32] {
    Keccak256::digest(data).into()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(#[serde(with = "crate::encoding::hex_array")] pub [u8; 20]);

impl Address {
    /// Last 20 bytes of Keccak-256 over the 64-byte `x || y` point encoding.
    pub fn from_public_key(key: &VerifyingKey) -> Self {
        let point = key.to_encoded_point(false);
        let digest = keccak256(&point.as_bytes()[1..]);
        let mut out = [0u8; 20];
        out.copy_from_slice(&digest[12..]);
        Address(out)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address(0x{})", self.to_hex())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

impl FromStr for Address {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 20];
        hex::decode_to_slice(s.trim_start_matches("0x"), &mut out)?;
        Ok(Address(out))
    }
}

#[derive(Clone)]
pub struct ShareKeypair {
    private_scalar: [u8; 32],
    signing_key: SigningKey,
    address: Address,
}

impl ShareKeypair {
    /// The raw Keccak output, before reduction modulo the group order.
    pub fn private_scalar(&self) -> &[u8; 32] {
        &self.private_scalar
    }

    /// Uncompressed public point without the 0x04 prefix.
    pub fn public_point(&self) -> [u8; 64] {
        let point = self.signing_key.verifying_key().to_encoded_point(false);
        point.as_bytes()[1..].try_into().expect("uncompressed point is 65 bytes")
    }

    pub fn verifying_key(&self) -> &VerifyingKey {
        self.signing_key.verifying_key()
    }

    pub fn address(&self) -> Address {
        self.address
    }
}

impl fmt::Debug for ShareKeypair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShareKeypair").field("address", &self.address).finish_non_exhaustive()
    }
}

fn keypair_from_material(material: &[u8]) -> Result<ShareKeypair, CryptoError> {
    let private_scalar = keccak256(&keccak256(material));
    let reduced = <Scalar as Reduce<U256>>::reduce_bytes(&FieldBytes::from(private_scalar));
    let scalar = Option::<NonZeroScalar>::from(NonZeroScalar::new(reduced)).ok_or(CryptoError::ZeroScalar)?;
    let signing_key = SigningKey::from(scalar);
    let address = Address::from_public_key(signing_key.verifying_key());
    Ok(ShareKeypair { private_scalar, signing_key, address })
}

/// `Keccak256(Keccak256(password || "American Psycho"))` as a secp256k1
/// private key. The inner digest is fed to the outer hash as raw bytes.
pub fn derive_share_keypair(sharing_password: &str) -> Result<ShareKeypair, CryptoError> {
    if sharing_password.is_empty() {
        return Err(CryptoError::EmptyPassword);
    }
    let mut material = Vec::with_capacity(sharing_password.len() + LEGACY_SHARE_CONSTANT.len());
    material.extend_from_slice(sharing_password.as_bytes());
    material.extend_from_slice(LEGACY_SHARE_CONSTANT.as_bytes());
    keypair_from_material(&material)
}

/// Same construction with a domain-separating prefix instead of the legacy
/// suffix.
pub fn derive_hardened_share_keypair(sharing_password: &str) -> Result<ShareKeypair, CryptoError> {
    if sharing_password.is_empty() {
        return Err(CryptoError::EmptyPassword);
    }
    let mut material = Vec::with_capacity(HARDENED_SHARE_CONTEXT.len() + sharing_password.len());
    material.extend_from_slice(HARDENED_SHARE_CONTEXT.as_bytes());
    material.extend_from_slice(sharing_password.as_bytes());
    keypair_from_material(&material)
}

/// 65-byte recoverable ECDSA signature: `r || s || recovery_id`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct TimestampSignature(pub [u8; 65]);

impl TimestampSignature {
    pub fn as_bytes(&self) -> &[u8; 65] {
        &self.0
    }
}

impl fmt::Debug for TimestampSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimestampSignature({})", hex::encode(self.0))
    }
}

/// Keccak-256 of the decimal ASCII rendering of the timestamp.
pub fn timestamp_digest(timestamp: u64) -> [u8; 32] {
    keccak256(timestamp.to_string().as_bytes())
}

pub fn sign_timestamp(keypair: &ShareKeypair, timestamp: u64) -> TimestampSignature {
    let (sig, recid) = keypair
        .signing_key
        .sign_prehash_recoverable(&timestamp_digest(timestamp))
        .expect("32-byte prehash is always signable");
    let mut out = [0u8; 65];
    out[..64].copy_from_slice(&sig.to_bytes());
    out[64] = recid.to_byte();
    TimestampSignature(out)
}

/// Recovers the signer from the signature and compares its address. Any
/// malformed input yields `false`. Freshness is not checked here.
pub fn verify_timestamp_sig(address: &Address, timestamp: u64, signature: &[u8]) -> bool {
    if signature.len() != 65 {
        return false;
    }
    let Ok(sig) = Signature::from_slice(&signature[..64]) else {
        return false;
    };
    let Some(recid) = RecoveryId::from_byte(signature[64]) else {
        return false;
    };
    match VerifyingKey::recover_from_prehash(&timestamp_digest(timestamp), &sig, recid) {
        Ok(key) => Address::from_public_key(&key) == *address,
        Err(_) => false,
    }
}
