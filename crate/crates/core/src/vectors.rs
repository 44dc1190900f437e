//! Checking the share-key and KDF derivations against externally computed
//! vector files (JSON lines).

use serde::{Deserialize, Serialize};

use crate::crypto::{derive_share_keypair, pbkdf2_sha256};

pub const BUNDLED_SHARE_VECTORS: &str = include_str!("../tests/vectors/share_vectors.jsonl");
pub const BUNDLED_KDF_VECTORS: &str = include_str!("../tests/vectors/kdf_vectors.jsonl");

#[derive(Debug, Clone, Deserialize)]
pub struct ShareVector {
    pub password: String,
    pub private_scalar_hex: String,
    pub address_hex: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KdfVector {
    pub password: String,
    pub salt_hex: String,
    pub iterations: u32,
    pub key_hex: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorMismatch {
    pub line: usize,
    pub label: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorReport {
    pub checked: usize,
    pub mismatches: Vec<VectorMismatch>,
}

impl VectorReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.mismatches.is_empty()
    }

    fn mismatch(
        &mut self,
        line: usize,
        label: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) {
        self.mismatches.push(VectorMismatch {
            line,
            label: label.into(),
            expected: expected.into(),
            actual: actual.into(),
        });
    }
}

fn lines<T: for<'de> Deserialize<'de>>(text: &str) -> impl Iterator<Item = (usize, Result<T, String>)> + '_ {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, serde_json::from_str(l).map_err(|e| e.to_string())))
}

pub fn check_share_vectors(text: &str) -> VectorReport {
    let mut report = VectorReport::default();
    for (line, parsed) in lines::<ShareVector>(text) {
        report.checked += 1;
        let v = match parsed {
            Ok(v) => v,
            Err(e) => {
                report.mismatch(line, "parse", "share vector", e);
                continue;
            }
        };
        match derive_share_keypair(&v.password) {
            Ok(kp) => {
                let scalar = hex::encode(kp.private_scalar());
                if !scalar.eq_ignore_ascii_case(&v.private_scalar_hex) {
                    report.mismatch(line, format!("scalar {:?}", v.password), &v.private_scalar_hex, scalar);
                }
                let address = kp.address().to_hex();
                if !address.eq_ignore_ascii_case(v.address_hex.trim_start_matches("0x")) {
                    report.mismatch(line, format!("address {:?}", v.password), &v.address_hex, address);
                }
            }
            Err(e) => report.mismatch(line, format!("derive {:?}", v.password), &v.address_hex, e.to_string()),
        }
    }
    report
}

pub fn check_kdf_vectors(text: &str) -> VectorReport {
    let mut report = VectorReport::default();
    for (line, parsed) in lines::<KdfVector>(text) {
        report.checked += 1;
        let v = match parsed {
            Ok(v) => v,
            Err(e) => {
                report.mismatch(line, "parse", "kdf vector", e);
                continue;
            }
        };
        let (salt, expected) = match (hex::decode(&v.salt_hex), hex::decode(&v.key_hex)) {
            (Ok(s), Ok(k)) => (s, k),
            _ => {
                report.mismatch(line, "hex", "hex salt and key", "undecodable");
                continue;
            }
        };
        let mut out = vec![0u8; expected.len()];
        pbkdf2_sha256(v.password.as_bytes(), &salt, v.iterations, &mut out);
        if out != expected {
            report.mismatch(line, format!("pbkdf2 {:?} c={}", v.password, v.iterations), &v.key_hex, hex::encode(out));
        }
    }
    report
}
