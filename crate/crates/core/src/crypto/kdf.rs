use sha2::Sha256;

use super::CryptoError;

/// Lowest iteration count [`derive_key_kdf`] accepts.
pub const KDF_ITERATION_FLOOR: u32 = 100_000;
pub const DEFAULT_KDF_ITERATIONS: u32 = 600_000;

/// Raw PBKDF2-HMAC-SHA256 with no parameter checks; used to reproduce
/// published vectors that predate the iteration floor.
pub fn pbkdf2_sha256(password: &[u8], salt: &[u8], iterations: u32, out: &mut [u8]) {
    pbkdf2::pbkdf2_hmac::<Sha256>(password, salt, iterations, out);
}

/// Derives a 32-byte AES key from a password and a 16-byte salt.
pub fn derive_key_kdf(password: &str, salt: &[u8; 16], iterations: u32) -> Result<[u8; 32], CryptoError> {
    if iterations < KDF_ITERATION_FLOOR {
        return Err(CryptoError::KdfIterations { got: iterations, floor: KDF_ITERATION_FLOOR });
    }
    let mut key = [0u8; 32];
    pbkdf2_sha256(password.as_bytes(), salt, iterations, &mut key);
    Ok(key)
}
