//! Attacks on the legacy service, and the measurements that go with them.

pub mod audit;
pub mod bench;
pub mod crack;
pub mod heuristic;
pub mod leak;
pub mod space;

pub use audit::{secrecy_audit, ExposureReport, SecretExposure};
pub use bench::{bench_kdf, bench_legacy, BenchReport, Hardware, KdfCost};
pub use crack::{crack, crack_wordlist, extrapolate, throughput_for_hours, Candidate, CrackReport, Projection};
pub use heuristic::{scorer_from_spec, MagicBytes, PlaintextScorer, PrintableRatio, PLAUSIBLE_TEXT_THRESHOLD};
pub use leak::{find_padding_collision, prefix_leak, CollisionOutcome};
pub use space::{
    enumerate_partition, enumerate_range, parse_charset, space_size, Candidates, PasswordSpace, SpaceError,
};

/// Time the original analysis reports for exhausting the 6-character legacy
/// space on a laptop.
pub const REPORTED_EXHAUSTION_HOURS: f64 = 30.0;

/// Analytic probability that a random final block carries valid PKCS7
/// padding: Σ_{k=1..16} 256^-k.
pub fn padding_false_accept_rate() -> f64 {
    (1..=16).map(|k| 256f64.powi(-k)).sum()
}
