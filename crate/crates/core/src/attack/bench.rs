//! Guess-rate measurement for the legacy padding check and the hardened KDF.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::space::{Odometer, PasswordSpace};
use crate::crypto::{derive_key_kdf, encrypt_legacy, BlockCheck, LegacyKey};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hardware {
    pub cpu_model: String,
    pub logical_cores: usize,
}

impl Hardware {
    pub fn detect() -> Self {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|info| {
                info.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|s| s.trim().to_owned())
            })
            .unwrap_or_else(|| std::env::consts::ARCH.to_owned());
        let logical_cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        Hardware { cpu_model, logical_cores }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub guesses: u64,
    pub elapsed: f64,
    /// Single-threaded legacy guesses per second (key build + last-block check).
    pub throughput_per_core: f64,
    pub hardware: Hardware,
}

/// Runs the cracker's inner loop on one thread over the 6-character legacy
/// space: `warmup` first, then a measured sample of `duration`.
pub fn bench_legacy(duration: Duration, warmup: Duration) -> BenchReport {
    let space = PasswordSpace::legacy(6, 6);
    let blob = encrypt_legacy(&[0x5a; 160], &LegacyKey::from_bytes([0xa5; 32]));
    let check = BlockCheck::new(&blob);
    let mut odo = Odometer::at(&space, 0).expect("6-char space is enumerable");

    let mut run = |budget: Duration| -> (u64, f64) {
        let started = Instant::now();
        let mut guesses = 0u64;
        let mut accepted = 0u64;
        loop {
            for _ in 0..4096 {
                odo.advance();
                if odo.admissible() {
                    if let Some(key) = odo.key() {
                        guesses += 1;
                        accepted += u64::from(check.accepts(key));
                    }
                }
            }
            if started.elapsed() >= budget {
                break;
            }
        }
        std::hint::black_box(accepted);
        (guesses, started.elapsed().as_secs_f64())
    };
    run(warmup);
    let (guesses, elapsed) = run(duration);
    BenchReport { guesses, elapsed, throughput_per_core: guesses as f64 / elapsed, hardware: Hardware::detect() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdfCost {
    pub iterations: u32,
    pub samples: u32,
    pub kdf_seconds_per_guess: f64,
    pub legacy_seconds_per_guess: f64,
    /// How many legacy guesses fit in the time of one KDF guess.
    pub cost_ratio: f64,
}

pub fn bench_kdf(iterations: u32, samples: u32, legacy_throughput: f64) -> KdfCost {
    let samples = samples.max(1);
    let started = Instant::now();
    for i in 0..samples {
        let salt = [i as u8; 16];
        std::hint::black_box(derive_key_kdf("candidate-password", &salt, iterations).expect("iterations above floor"));
    }
    let kdf_seconds_per_guess = started.elapsed().as_secs_f64() / f64::from(samples);
    let legacy_seconds_per_guess = 1.0 / legacy_throughput;
    KdfCost {
        iterations,
        samples,
        kdf_seconds_per_guess,
        legacy_seconds_per_guess,
        cost_ratio: kdf_seconds_per_guess / legacy_seconds_per_guess,
    }
}
