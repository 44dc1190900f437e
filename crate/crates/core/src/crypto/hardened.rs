//! The corrected storage construction: PBKDF2-derived keys with a fresh salt
//! and a fresh random IV per encryption.

use std::collections::HashSet;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::cipher::{cbc_decrypt, cbc_encrypt, CipherBlob};
use super::digest::{sha256_digest, Sha256Digest};
use super::kdf::{derive_key_kdf, DEFAULT_KDF_ITERATIONS, KDF_ITERATION_FLOOR};
use super::policy::Violation;
use super::CryptoError;

pub const HARDENED_VERSION: u32 = 1;
/// Serialized header size: version, salt, iv, iterations.
pub const HARDENED_HEADER_LEN: usize = 4 + 16 + 16 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardenedHeader {
    pub version: u32,
    #[serde(with = "crate::encoding::hex_array")]
    pub salt: [u8; 16],
    #[serde(with = "crate::encoding::hex_array")]
    pub iv: [u8; 16],
    pub kdf_iterations: u32,
}

impl HardenedHeader {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R, kdf_iterations: u32) -> Self {
        let mut salt = [0u8; 16];
        let mut iv = [0u8; 16];
        rng.fill_bytes(&mut salt);
        rng.fill_bytes(&mut iv);
        HardenedHeader { version: HARDENED_VERSION, salt, iv, kdf_iterations }
    }

    pub fn to_bytes(&self) -> [u8; HARDENED_HEADER_LEN] {
        let mut out = [0u8; HARDENED_HEADER_LEN];
        out[..4].copy_from_slice(&self.version.to_be_bytes());
        out[4..20].copy_from_slice(&self.salt);
        out[20..36].copy_from_slice(&self.iv);
        out[36..].copy_from_slice(&self.kdf_iterations.to_be_bytes());
        out
    }
}

/// SHA-256 over `header || ciphertext`.
pub fn hardened_digest(header: &HardenedHeader, blob: &CipherBlob) -> Sha256Digest {
    let mut data = Vec::with_capacity(HARDENED_HEADER_LEN + blob.len());
    data.extend_from_slice(&header.to_bytes());
    data.extend_from_slice(blob.as_bytes());
    sha256_digest(&data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardenedPolicy {
    pub min_len: usize,
    pub min_entropy_bits: f64,
    pub kdf_iterations: u32,
}

impl Default for HardenedPolicy {
    fn default() -> Self {
        HardenedPolicy { min_len: 12, min_entropy_bits: 60.0, kdf_iterations: DEFAULT_KDF_ITERATIONS }
    }
}

impl HardenedPolicy {
    pub fn with_iterations(kdf_iterations: u32) -> Self {
        HardenedPolicy { kdf_iterations, ..Self::default() }
    }
}

// Character classes and their pool sizes for the entropy estimate.
fn class_pool(c: char) -> (u8, u32) {
    match c {
        'a'..='z' => (0, 26),
        'A'..='Z' => (1, 26),
        '0'..='9' => (2, 10),
        ' '..='~' => (3, 33),
        _ => (4, 64),
    }
}

/// Heuristic entropy: distinct characters × log2(size of the character
/// classes present). Repeating one character scores as a single draw.
pub(crate) fn estimate_entropy_bits(password: &str) -> f64 {
    let mut classes = [0u32; 5];
    let mut distinct = HashSet::new();
    for c in password.chars() {
        let (class, pool) = class_pool(c);
        classes[class as usize] = pool;
        distinct.insert(c);
    }
    let pool: u32 = classes.iter().sum();
    if pool == 0 {
        return 0.0;
    }
    distinct.len() as f64 * f64::from(pool).log2()
}

pub fn password_strength_check(password: &str, policy: &HardenedPolicy) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let len = password.chars().count();
    if len < policy.min_len {
        violations.push(Violation::TooShort { len, min: policy.min_len });
    }
    let bits = estimate_entropy_bits(password);
    if bits < policy.min_entropy_bits {
        violations.push(Violation::LowEntropy { bits, min_bits: policy.min_entropy_bits });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

pub fn encrypt_hardened<R: RngCore + CryptoRng>(
    plaintext: &[u8],
    password: &str,
    policy: &HardenedPolicy,
    rng: &mut R,
) -> Result<(HardenedHeader, CipherBlob), CryptoError> {
    password_strength_check(password, policy).map_err(CryptoError::Policy)?;
    let header = HardenedHeader::generate(rng, policy.kdf_iterations);
    let key = derive_key_kdf(password, &header.salt, header.kdf_iterations)?;
    Ok((header, cbc_encrypt(&key, &header.iv, plaintext)))
}

/// Inverts [`encrypt_hardened`]. Headers arrive from the server, so the
/// iteration floor is enforced here too.
pub fn decrypt_hardened(header: &HardenedHeader, blob: &CipherBlob, password: &str) -> Result<Vec<u8>, CryptoError> {
    if header.version != HARDENED_VERSION {
        return Err(CryptoError::HeaderVersion(header.version));
    }
    if header.kdf_iterations < KDF_ITERATION_FLOOR {
        return Err(CryptoError::KdfIterations { got: header.kdf_iterations, floor: KDF_ITERATION_FLOOR });
    }
    let key = derive_key_kdf(password, &header.salt, header.kdf_iterations)?;
    cbc_decrypt(&key, &header.iv, blob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn fast_policy() -> HardenedPolicy {
        HardenedPolicy::with_iterations(KDF_ITERATION_FLOOR)
    }

    #[test]
    fn short_password_rejected() {
        let err = password_strength_check("!!!!!!!!", &HardenedPolicy::default()).unwrap_err();
        assert!(err.contains(&Violation::TooShort { len: 8, min: 12 }));
    }

    #[test]
    fn random_mixed_password_accepted() {
        assert_eq!(password_strength_check("q7R!vX2#mK9@zL", &HardenedPolicy::default()), Ok(()));
    }

    #[test]
    fn repeated_character_fails_entropy_floor() {
        let err = password_strength_check("aaaaaaaaaaaa", &HardenedPolicy::default()).unwrap_err();
        assert!(matches!(err.as_slice(), [Violation::LowEntropy { .. }]));
        assert!(password_strength_check("!!!!!!!!!!!!", &HardenedPolicy::default()).is_err());
    }

    #[test]
    fn entropy_estimate() {
        assert_eq!(estimate_entropy_bits(""), 0.0);
        assert!((estimate_entropy_bits("abcdefghijkl") - 12.0 * 26f64.log2()).abs() < 1e-9);
        assert!((estimate_entropy_bits("aaaa") - 26f64.log2()).abs() < 1e-9);
        assert!((estimate_entropy_bits("aA1!") - 4.0 * 95f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn round_trip_and_fresh_randomness() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let pw = "q7R!vX2#mK9@zL";
        let (h1, c1) = encrypt_hardened(b"same input", pw, &fast_policy(), &mut rng).unwrap();
        let (h2, c2) = encrypt_hardened(b"same input", pw, &fast_policy(), &mut rng).unwrap();
        assert_ne!(h1.iv, h2.iv);
        assert_ne!(h1.salt, h2.salt);
        assert_ne!(c1, c2);
        assert_eq!(decrypt_hardened(&h1, &c1, pw).unwrap(), b"same input");
        assert_eq!(decrypt_hardened(&h2, &c2, pw).unwrap(), b"same input");
    }

    #[test]
    fn weak_password_is_a_policy_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let err = encrypt_hardened(b"x", "!!!!!!!!", &fast_policy(), &mut rng).unwrap_err();
        assert!(matches!(err, CryptoError::Policy(_)));
    }

    #[test]
    fn low_iteration_header_refused() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let pw = "q7R!vX2#mK9@zL";
        let (mut header, blob) = encrypt_hardened(b"x", pw, &fast_policy(), &mut rng).unwrap();
        header.kdf_iterations = 1;
        assert!(matches!(decrypt_hardened(&header, &blob, pw), Err(CryptoError::KdfIterations { .. })));
        header.kdf_iterations = KDF_ITERATION_FLOOR;
        header.version = 7;
        assert_eq!(decrypt_hardened(&header, &blob, pw), Err(CryptoError::HeaderVersion(7)));
    }

    #[test]
    fn headers_never_repeat() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut salts = HashSet::new();
        let mut ivs = HashSet::new();
        for _ in 0..10_000 {
            let h = HardenedHeader::generate(&mut rng, DEFAULT_KDF_ITERATIONS);
            assert!(salts.insert(h.salt));
            assert!(ivs.insert(h.iv));
        }
    }

    #[test]
    fn header_serialization_layout() {
        let h = HardenedHeader { version: 1, salt: [0xaa; 16], iv: [0xbb; 16], kdf_iterations: 600_000 };
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..4], &[0, 0, 0, 1]);
        assert_eq!(&bytes[36..], &600_000u32.to_be_bytes());
        let json = serde_json::to_value(h).unwrap();
        assert_eq!(json["salt"], "aa".repeat(16));
        assert_eq!(serde_json::from_value::<HardenedHeader>(json).unwrap(), h);
    }
}
