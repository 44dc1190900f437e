use serde::{Deserialize, Serialize};

use super::space::{enumerate_partition, PasswordSpace, SpaceError};
use crate::crypto::{derive_legacy_key, BlockCheck, CipherBlob};

/// Number of identical leading 16-byte blocks. Under the zero IV and a shared
/// key this is the number of leading plaintext blocks the two files share.
pub fn prefix_leak(a: &CipherBlob, b: &CipherBlob) -> usize {
    a.blocks().zip(b.blocks()).take_while(|(x, y)| x == y).count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionOutcome {
    /// A wrong password whose decryption of the blob has valid padding.
    pub password: Option<String>,
    /// Wrong passwords tried, including the colliding one.
    pub attempts: u64,
}

/// Walks `space` in order, skipping `true_password`, until a password yields
/// valid padding. Expect about 255 attempts.
pub fn find_padding_collision(
    blob: &CipherBlob,
    space: &PasswordSpace,
    true_password: &str,
) -> Result<CollisionOutcome, SpaceError> {
    let check = BlockCheck::new(blob);
    let mut attempts = 0;
    for pw in enumerate_partition(space, 0, 1)? {
        if pw == true_password {
            continue;
        }
        let Ok(key) = derive_legacy_key(&pw) else { continue };
        attempts += 1;
        if check.accepts(key.as_bytes()) {
            return Ok(CollisionOutcome { password: Some(pw), attempts });
        }
    }
    Ok(CollisionOutcome { password: None, attempts })
}
