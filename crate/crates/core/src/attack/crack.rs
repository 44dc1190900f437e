//! Offline guessing against a stored legacy ciphertext, the way a malicious
//! server would do it. The inner loop only decrypts the final block to test
//! padding; full decryption and scoring happen for survivors only.

use std::ops::Range;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::heuristic::PlaintextScorer;
use super::space::{Odometer, PasswordSpace, SpaceError};
use crate::crypto::{decrypt_legacy, derive_legacy_key, BlockCheck, CipherBlob, LegacyKey};

const SECONDS_PER_YEAR: f64 = 365.25 * 24.0 * 3600.0;
/// Chunks handed out per worker, for load balancing.
const CHUNKS_PER_WORKER: u128 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub password: String,
    pub padding_valid: bool,
    pub score: f64,
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::parse_bytes(text.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom("not a decimal integer"))
    }
}

/// Time to exhaust a space at a given guess rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub space: String,
    #[serde(with = "decimal")]
    pub size: BigUint,
    pub throughput: f64,
    pub seconds: f64,
    pub hours: f64,
    pub years: f64,
}

pub fn extrapolate(space: &PasswordSpace, throughput: f64) -> Result<Projection, SpaceError> {
    if !throughput.is_finite() || throughput <= 0.0 {
        return Err(SpaceError::Invalid(format!("throughput must be positive, got {throughput}")));
    }
    let size = space.size();
    let seconds = size.to_f64().unwrap_or(f64::INFINITY) / throughput;
    Ok(Projection {
        space: space.describe(),
        size,
        throughput,
        seconds,
        hours: seconds / 3600.0,
        years: seconds / SECONDS_PER_YEAR,
    })
}

/// Guess rate at which `space` is exhausted in exactly `hours`.
pub fn throughput_for_hours(space: &PasswordSpace, hours: f64) -> f64 {
    space.size().to_f64().unwrap_or(f64::INFINITY) / (hours * 3600.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackReport {
    pub space: String,
    pub heuristic: String,
    pub parallelism: usize,
    /// Every padding-valid guess, best score first.
    pub candidates: Vec<Candidate>,
    pub guesses_tried: u64,
    pub elapsed: f64,
    pub throughput: f64,
    pub extrapolations: Vec<Projection>,
}

impl CrackReport {
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }

    pub fn plausible(&self, threshold: f64) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(move |c| c.score >= threshold)
    }

    pub fn contains(&self, password: &str) -> bool {
        self.candidates.iter().any(|c| c.password == password)
    }

    /// Adds projections for more spaces at this run's measured rate.
    pub fn project(&mut self, spaces: &[PasswordSpace]) {
        if self.throughput > 0.0 {
            self.extrapolations.extend(spaces.iter().filter_map(|s| extrapolate(s, self.throughput).ok()));
        }
    }
}

fn survivor(blob: &CipherBlob, password: String, key: &[u8; 32], scorer: &dyn PlaintextScorer) -> Candidate {
    let plaintext = decrypt_legacy(blob, &LegacyKey::from_bytes(*key)).expect("padding check passed");
    Candidate { password, padding_valid: true, score: scorer.score(&plaintext) }
}

fn scan_range(
    space: &PasswordSpace,
    range: Range<u128>,
    check: &BlockCheck,
    blob: &CipherBlob,
    scorer: &dyn PlaintextScorer,
) -> (u64, Vec<Candidate>) {
    let mut tried = 0u64;
    let mut found = Vec::new();
    if range.is_empty() {
        return (0, found);
    }
    let mut odo = Odometer::at(space, range.start).expect("range lies inside an enumerable space");
    for step in 0..range.end - range.start {
        if step > 0 {
            odo.advance();
        }
        if !odo.admissible() {
            continue;
        }
        let Some(key) = odo.key() else { continue };
        tried += 1;
        if check.accepts(key) {
            found.push(survivor(blob, odo.password(), key, scorer));
        }
    }
    (tried, found)
}

fn sort_candidates(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.password.cmp(&b.password)));
}

fn pool(parallelism: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build().expect("thread pool")
}

/// Tries every password in `space` against `blob`. The candidate set does not
/// depend on `parallelism`.
pub fn crack(
    blob: &CipherBlob,
    space: &PasswordSpace,
    parallelism: usize,
    scorer: &dyn PlaintextScorer,
) -> Result<CrackReport, SpaceError> {
    let raw = space.raw_len()?;
    let parallelism = parallelism.max(1);
    let chunks = (parallelism as u128 * CHUNKS_PER_WORKER).min(raw.max(1)) as u64;
    let ranges: Vec<Range<u128>> = (0..chunks).map(|i| space.partition_range(i, chunks)).collect::<Result<_, _>>()?;
    let check = BlockCheck::new(blob);

    let started = Instant::now();
    let results: Vec<(u64, Vec<Candidate>)> = pool(parallelism)
        .install(|| ranges.into_par_iter().map(|r| scan_range(space, r, &check, blob, scorer)).collect());
    let elapsed = started.elapsed().as_secs_f64();

    let guesses_tried = results.iter().map(|(t, _)| t).sum();
    let mut candidates: Vec<Candidate> = results.into_iter().flat_map(|(_, c)| c).collect();
    sort_candidates(&mut candidates);
    let throughput = if elapsed > 0.0 { guesses_tried as f64 / elapsed } else { 0.0 };
    let mut report = CrackReport {
        space: space.describe(),
        heuristic: scorer.name(),
        parallelism,
        candidates,
        guesses_tried,
        elapsed,
        throughput,
        extrapolations: Vec::new(),
    };
    report.project(std::slice::from_ref(space));
    Ok(report)
}

/// Dictionary mode: tries each word instead of enumerating a charset.
pub fn crack_wordlist(
    blob: &CipherBlob,
    words: &[String],
    parallelism: usize,
    scorer: &dyn PlaintextScorer,
) -> CrackReport {
    let parallelism = parallelism.max(1);
    let check = BlockCheck::new(blob);
    let started = Instant::now();
    let results: Vec<(u64, Option<Candidate>)> = pool(parallelism).install(|| {
        words
            .par_iter()
            .map(|w| match derive_legacy_key(w) {
                Ok(key) if check.accepts(key.as_bytes()) => {
                    (1, Some(survivor(blob, w.clone(), key.as_bytes(), scorer)))
                }
                Ok(_) => (1, None),
                Err(_) => (0, None),
            })
            .collect()
    });
    let elapsed = started.elapsed().as_secs_f64();
    let guesses_tried = results.iter().map(|(t, _)| t).sum();
    let mut candidates: Vec<Candidate> = results.into_iter().filter_map(|(_, c)| c).collect();
    sort_candidates(&mut candidates);
    candidates.dedup_by(|a, b| a.password == b.password);
    CrackReport {
        space: format!("wordlist of {} entries", words.len()),
        heuristic: scorer.name(),
        parallelism,
        candidates,
        guesses_tried,
        elapsed,
        throughput: if elapsed > 0.0 { guesses_tried as f64 / elapsed } else { 0.0 },
        extrapolations: Vec::new(),
    }
}
