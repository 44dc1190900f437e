use aes::cipher::{BlockDecrypt, BlockEncrypt, KeyInit};
use aes::{Aes256, Aes256Dec, Block};
use serde::{Deserialize, Serialize};

use super::CryptoError;

pub const BLOCK_LEN: usize = 16;
pub const LEGACY_KEY_LEN: usize = 32;

const ZERO_IV: [u8; BLOCK_LEN] = [0; BLOCK_LEN];

/// An AES-256 key made of the password's bytes followed by zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct LegacyKey([u8; LEGACY_KEY_LEN]);

impl LegacyKey {
    pub fn from_bytes(bytes: [u8; LEGACY_KEY_LEN]) -> Self {
        LegacyKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; LEGACY_KEY_LEN] {
        &self.0
    }
}

impl std::fmt::Debug for LegacyKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LegacyKey({})", hex::encode(self.0))
    }
}

/// Ciphertext whose length is a positive multiple of the AES block size.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct CipherBlob(Vec<u8>);

impl CipherBlob {
    pub fn new(bytes: Vec<u8>) -> Result<Self, CryptoError> {
        if bytes.is_empty() || !bytes.len().is_multiple_of(BLOCK_LEN) {
            return Err(CryptoError::BlobLength(bytes.len()));
        }
        Ok(CipherBlob(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn block_count(&self) -> usize {
        self.0.len() / BLOCK_LEN
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[u8]> {
        self.0.chunks_exact(BLOCK_LEN)
    }
}

impl TryFrom<Vec<u8>> for CipherBlob {
    type Error = CryptoError;

    fn try_from(bytes: Vec<u8>) -> Result<Self, Self::Error> {
        CipherBlob::new(bytes)
    }
}

impl From<CipherBlob> for Vec<u8> {
    fn from(blob: CipherBlob) -> Self {
        blob.0
    }
}

impl std::fmt::Debug for CipherBlob {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CipherBlob({} blocks)", self.block_count())
    }
}

/// Zero-pads the password's UTF-8 bytes to 32. Longer passwords are an error,
/// exactly as in the legacy client.
pub fn derive_legacy_key(password: &str) -> Result<LegacyKey, CryptoError> {
    let bytes = password.as_bytes();
    if bytes.len() > LEGACY_KEY_LEN {
        return Err(CryptoError::KeyTooLong { len: bytes.len() });
    }
    let mut key = [0u8; LEGACY_KEY_LEN];
    key[..bytes.len()].copy_from_slice(bytes);
    Ok(LegacyKey(key))
}

/// Returns the padding length if `block` ends in well-formed PKCS7 padding.
/// Every padding byte is checked, not just the last one.
pub fn pkcs7_padding_len(block: &[u8; BLOCK_LEN]) -> Option<usize> {
    let n = block[BLOCK_LEN - 1] as usize;
    if n == 0 || n > BLOCK_LEN {
        return None;
    }
    block[BLOCK_LEN - n..].iter().all(|&b| b as usize == n).then_some(n)
}

pub(crate) fn cbc_encrypt(key: &[u8; 32], iv: &[u8; BLOCK_LEN], plaintext: &[u8]) -> CipherBlob {
    let cipher = Aes256::new(key.into());
    let pad = BLOCK_LEN - plaintext.len() % BLOCK_LEN;
    let mut out = Vec::with_capacity(plaintext.len() + pad);
    out.extend_from_slice(plaintext);
    out.resize(plaintext.len() + pad, pad as u8);

    let mut chain = *iv;
    for chunk in out.chunks_exact_mut(BLOCK_LEN) {
        for (b, c) in chunk.iter_mut().zip(chain.iter()) {
            *b ^= c;
        }
        cipher.encrypt_block(Block::from_mut_slice(chunk));
        chain.copy_from_slice(chunk);
    }
    CipherBlob(out)
}

pub(crate) fn cbc_decrypt(key: &[u8; 32], iv: &[u8; BLOCK_LEN], blob: &CipherBlob) -> Result<Vec<u8>, CryptoError> {
    let cipher = Aes256Dec::new(key.into());
    let mut out = blob.0.clone();
    let mut chain = *iv;
    for chunk in out.chunks_exact_mut(BLOCK_LEN) {
        let mut next = [0u8; BLOCK_LEN];
        next.copy_from_slice(chunk);
        cipher.decrypt_block(Block::from_mut_slice(chunk));
        for (b, c) in chunk.iter_mut().zip(chain.iter()) {
            *b ^= c;
        }
        chain = next;
    }
    let last: &[u8; BLOCK_LEN] = out[out.len() - BLOCK_LEN..].try_into().expect("block sized");
    let pad = pkcs7_padding_len(last).ok_or(CryptoError::Padding)?;
    out.truncate(out.len() - pad);
    Ok(out)
}

/// AES-256-CBC with PKCS7 padding under an all-zero IV. Deterministic.
pub fn encrypt_legacy(plaintext: &[u8], key: &LegacyKey) -> CipherBlob {
    cbc_encrypt(&key.0, &ZERO_IV, plaintext)
}

pub fn decrypt_legacy(blob: &CipherBlob, key: &LegacyKey) -> Result<Vec<u8>, CryptoError> {
    cbc_decrypt(&key.0, &ZERO_IV, blob)
}

/// The last ciphertext block together with the block that chains into it
/// (the zero IV for single-block blobs). That is all a padding check needs.
#[derive(Clone, Copy, Debug)]
pub struct BlockCheck {
    chain: [u8; BLOCK_LEN],
    last: [u8; BLOCK_LEN],
}

impl BlockCheck {
    pub fn new(blob: &CipherBlob) -> Self {
        Self::with_iv(blob, &ZERO_IV)
    }

    pub fn with_iv(blob: &CipherBlob, iv: &[u8; BLOCK_LEN]) -> Self {
        let bytes = blob.as_bytes();
        let n = bytes.len();
        let last = bytes[n - BLOCK_LEN..].try_into().expect("block sized");
        let chain = if n >= 2 * BLOCK_LEN {
            bytes[n - 2 * BLOCK_LEN..n - BLOCK_LEN].try_into().expect("block sized")
        } else {
            *iv
        };
        BlockCheck { chain, last }
    }

    #[inline]
    pub fn accepts(&self, key: &[u8; LEGACY_KEY_LEN]) -> bool {
        let cipher = Aes256Dec::new(key.into());
        let mut block = Block::from(self.last);
        cipher.decrypt_block(&mut block);
        let mut plain = [0u8; BLOCK_LEN];
        for i in 0..BLOCK_LEN {
            plain[i] = block[i] ^ self.chain[i];
        }
        pkcs7_padding_len(&plain).is_some()
    }
}

/// True iff [`decrypt_legacy`] would succeed, computed from the final one or
/// two blocks only.
pub fn check_padding_only(blob: &CipherBlob, key: &LegacyKey) -> bool {
    BlockCheck::new(blob).accepts(&key.0)
}
