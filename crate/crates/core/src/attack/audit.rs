use serde::{Deserialize, Serialize};

use crate::runtime::{Needle, Transcript};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretExposure {
    pub secret: String,
    /// Arrival indices of transcript entries containing the secret.
    pub entries: Vec<u64>,
    pub ops: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExposureReport {
    pub transcript_entries: usize,
    pub secrets: Vec<SecretExposure>,
}

impl ExposureReport {
    pub fn exposed(&self) -> impl Iterator<Item = &SecretExposure> {
        self.secrets.iter().filter(|s| !s.entries.is_empty())
    }

    pub fn all_exposed(&self) -> bool {
        self.secrets.iter().all(|s| !s.entries.is_empty())
    }

    pub fn none_exposed(&self) -> bool {
        self.exposed().next().is_none()
    }
}

/// Which of `secrets` the server has seen, and where.
pub fn secrecy_audit<S: AsRef<str>>(transcript: &Transcript, secrets: &[S]) -> ExposureReport {
    let secrets = secrets
        .iter()
        .map(|s| {
            let hits = transcript.grep(&Needle::Text(s.as_ref().to_owned()));
            SecretExposure {
                secret: s.as_ref().to_owned(),
                entries: hits.iter().map(|e| e.arrival_index).collect(),
                ops: hits.into_iter().map(|e| e.op).collect(),
            }
        })
        .collect();
    ExposureReport { transcript_entries: transcript.len(), secrets }
}
