//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use cfs_lab::attack::{
    bench_kdf, bench_legacy, crack, extrapolate, find_padding_collision, padding_false_accept_rate, prefix_leak,
    secrecy_audit, throughput_for_hours, PasswordSpace, PlaintextScorer, PrintableRatio, REPORTED_EXHAUSTION_HOURS,
};
use cfs_lab::crypto::{
    check_padding_only, derive_hardened_share_keypair, derive_legacy_key, derive_share_keypair, encrypt_legacy,
    password_strength_check, printable_ascii, sha256_digest, sign_timestamp, validate_password, CipherBlob,
    HardenedPolicy, LegacyKey, PasswordPolicy, DEFAULT_KDF_ITERATIONS, KDF_ITERATION_FLOOR,
};
use cfs_lab::hardened::HardenedClient;
use cfs_lab::legacy::{LegacyClient, StoredObject};
use cfs_lab::runtime::{Namespace, StoreError};
use cfs_lab::transport::{ClientError, Loopback};
use cfs_lab::vectors::{check_share_vectors, BUNDLED_SHARE_VECTORS};
use cfs_lab::wire::{AccessRequest, ErrorKind, ShareRequest, StoreRequest};
use cfs_lab::Server;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MIB: usize = 1024 * 1024;
const T0: u64 = 1_700_000_000;

// Hardened runs use the iteration floor to keep the suite within its time
// budget on a single core; the cost-ratio check measures the default.
const SUITE_KDF_ITERATIONS: u32 = KDF_ITERATION_FLOOR;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

struct Clock(Arc<AtomicU64>);

impl Clock {
    fn new() -> Self {
        Clock(Arc::new(AtomicU64::new(T0)))
    }

    fn set(&self, t: u64) {
        self.0.store(t, Ordering::SeqCst);
    }

    fn server(&self) -> Arc<Server> {
        let c = Arc::clone(&self.0);
        Arc::new(Server::in_memory().with_clock(Arc::new(move || c.load(Ordering::SeqCst))))
    }
}

fn legacy_client(server: &Arc<Server>) -> LegacyClient<Loopback> {
    LegacyClient::new(Loopback::new(Arc::clone(server)), PasswordPolicy::legacy())
}

fn hardened_client(server: &Arc<Server>, rng: &mut ChaCha8Rng) -> HardenedClient<Loopback> {
    HardenedClient::with_rng(
        Loopback::new(Arc::clone(server)),
        HardenedPolicy::with_iterations(SUITE_KDF_ITERATIONS),
        StdRng::seed_from_u64(rng.gen()),
    )
}

fn random_string(rng: &mut ChaCha8Rng, len: usize) -> String {
    let charset = printable_ascii();
    (0..len).map(|_| charset[rng.gen_range(0..charset.len())]).collect()
}

fn legacy_password(rng: &mut ChaCha8Rng) -> String {
    let policy = PasswordPolicy::legacy();
    loop {
        let len = rng.gen_range(6..=16);
        let pw = random_string(rng, len);
        if validate_password(&pw, &policy).is_ok() {
            return pw;
        }
    }
}

fn hardened_password(rng: &mut ChaCha8Rng) -> String {
    let policy = HardenedPolicy::default();
    loop {
        let len = rng.gen_range(14..=24);
        let pw = random_string(rng, len);
        if password_strength_check(&pw, &policy).is_ok() {
            return pw;
        }
    }
}

fn random_bytes(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    rng.fill(&mut v[..]);
    v
}

const WORDS: &[&str] = &[
    "the",
    "quarterly",
    "report",
    "is",
    "attached",
    "please",
    "review",
    "before",
    "friday",
    "meeting",
    "budget",
    "numbers",
    "and",
    "notes",
    "from",
    "our",
    "team",
    "project",
    "status",
    "update",
    "with",
    "minor",
    "changes",
];

fn prose(rng: &mut ChaCha8Rng, min_len: usize) -> Vec<u8> {
    let mut s = String::new();
    while s.len() < min_len {
        s.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
        s.push(if rng.gen_ratio(1, 12) { '\n' } else { ' ' });
    }
    s.into_bytes()
}

fn ac1_round_trips() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let started = Instant::now();
    let fixed = [0, 1, 15, 16, 17, MIB];
    let mut total_bytes = 0usize;
    for case in 0..1000 {
        let len = fixed.get(case).copied().unwrap_or_else(|| rng.gen_range(0..=MIB));
        total_bytes += len;
        let data = random_bytes(&mut rng, len);
        let server = Clock::new().server();

        let pw = legacy_password(&mut rng);
        let legacy = legacy_client(&server);
        let guid = legacy.store(&data, &pw).unwrap();
        if legacy.fetch(guid, &pw).unwrap() != data {
            return verdict(false, format!("legacy case {case} ({len} bytes) differs"));
        }

        let pw = hardened_password(&mut rng);
        let hardened = hardened_client(&server, &mut rng);
        let guid = hardened.store(&data, &pw).unwrap();
        if hardened.fetch(guid, &pw).unwrap() != data {
            return verdict(false, format!("hardened case {case} ({len} bytes) differs"));
        }
    }
    let elapsed = started.elapsed();
    verdict(
        elapsed < Duration::from_secs(120),
        format!(
            "1000/1000 cases identical in both flows, {:.0} MiB total, {:.1} s (limit 120 s)",
            total_bytes as f64 / MIB as f64,
            elapsed.as_secs_f64()
        ),
    )
}

fn ac2_prefix_leak() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = 0;
    for n in 0..=8usize {
        for _ in 0..20 {
            let key = derive_legacy_key(&legacy_password(&mut rng)).unwrap();
            let shared = random_bytes(&mut rng, 16 * n);
            let (mut a, mut b) = (shared.clone(), shared);
            let first: u8 = rng.gen();
            a.push(first);
            b.push(first ^ rng.gen_range(1..=255));
            let tail_a = rng.gen_range(0..64);
            let tail_b = rng.gen_range(0..64);
            a.extend(random_bytes(&mut rng, tail_a));
            b.extend(random_bytes(&mut rng, tail_b));
            ok += usize::from(prefix_leak(&encrypt_legacy(&a, &key), &encrypt_legacy(&b, &key)) == n);
        }
    }
    verdict(ok == 180, format!("{ok}/180 pairs report exactly the shared block count"))
}

fn ac3_padding_rate() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let started = Instant::now();
    let expected = padding_false_accept_rate();
    let trials = 1_000_000u64;
    let mut random_key_hits = 0u64;
    let mut password_key_hits = 0u64;
    let mut blob = CipherBlob::new(vec![0; 16]).unwrap();
    for i in 0..trials {
        if i % 1000 == 0 {
            let blocks = rng.gen_range(1..=10);
            blob = CipherBlob::new(random_bytes(&mut rng, 16 * blocks)).unwrap();
        }
        let key = LegacyKey::from_bytes(rng.gen());
        random_key_hits += u64::from(check_padding_only(&blob, &key));
        let pw = random_string(&mut rng, 6);
        password_key_hits += u64::from(check_padding_only(&blob, &derive_legacy_key(&pw).unwrap()));
    }
    let r1 = random_key_hits as f64 / trials as f64;
    let r2 = password_key_hits as f64 / trials as f64;
    let within = |r: f64| (r / expected - 1.0).abs() <= 0.10;
    let elapsed = started.elapsed().as_secs_f64();
    verdict(
        within(r1) && within(r2) && elapsed < 300.0,
        format!(
            "random keys {:.4}%, password keys {:.4}%, analytic {:.4}% (±10% relative), {:.1} s",
            100.0 * r1,
            100.0 * r2,
            100.0 * expected,
            elapsed
        ),
    )
}

fn ac4_padding_collision() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let space = PasswordSpace::from_spec("lower+special", 3, 3, false).unwrap();
    let clock = Clock::new();
    let mut attempts = 0u64;
    let mut accepted = 0;
    let mut gibberish = 0;
    let mut max_score = 0f64;
    for _ in 0..100 {
        let server = clock.server();
        let client = legacy_client(&server);
        let true_pw = legacy_password(&mut rng);
        let text = prose(&mut rng, 150);
        let guid = client.store(&text[..150], &true_pw).unwrap();
        let blob = client.fetch_ciphertext(guid).unwrap();
        assert_eq!(blob.block_count(), 10);

        let outcome = find_padding_collision(&blob, &space, &true_pw).unwrap();
        let Some(wrong) = outcome.password else {
            return verdict(false, "space exhausted without a collision");
        };
        attempts += outcome.attempts;
        let sharing = legacy_password(&mut rng);
        let req = ShareRequest {
            source_guid: guid,
            original_password: wrong,
            sharing_password: sharing.clone(),
            address: derive_share_keypair(&sharing).unwrap().address(),
        };
        let Ok(share) = client.submit_share(req) else { continue };
        accepted += 1;
        let received = client.access_shared(share, &sharing, T0).unwrap();
        let score = PrintableRatio.score(&received);
        max_score = max_score.max(score);
        gibberish += usize::from(score < 0.5);
    }
    // A 100-trial mean has a standard error of about 25 attempts, so it lands
    // outside ±25% roughly 1% of the time. The tolerance is judged on 900
    // further searches pooled with the end-to-end trials.
    let mean_100 = attempts as f64 / 100.0;
    let mut extra_rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..900 {
        let blob = CipherBlob::new(random_bytes(&mut extra_rng, 160)).unwrap();
        attempts += find_padding_collision(&blob, &space, "").unwrap().attempts;
    }
    let mean = attempts as f64 / 1000.0;
    let expected = 1.0 / padding_false_accept_rate();
    let mean_ok = (mean / expected - 1.0).abs() <= 0.25;
    verdict(
        mean_ok && accepted == 100 && gibberish == 100,
        format!(
            "mean attempts {mean:.1} over 1000 searches vs {expected:.1} (±25%), {mean_100:.1} over the first 100; \
             server accepted {accepted}/100; recipient text scored < 0.5 in {gibberish}/100 (max {max_score:.3})"
        ),
    )
}

fn ac5_cracker() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let space = PasswordSpace::from_spec("lower+special", 1, 4, true).unwrap();
    let size: u64 = space.size().try_into().unwrap();
    assert!(size <= 1_000_000);
    let mut recovered = 0;
    let mut invariant = 0;
    let mut slowest = 0f64;
    for _ in 0..100 {
        let planted: String = loop {
            let len = rng.gen_range(1..=4);
            let s: String = (0..len).map(|_| space.charset[rng.gen_range(0..space.charset.len())]).collect();
            if space.contains(&s) {
                break s;
            }
        };
        let len = rng.gen_range(64..2048);
        let text = prose(&mut rng, len);
        let blob = encrypt_legacy(&text, &derive_legacy_key(&planted).unwrap());

        let report = crack(&blob, &space, 4, &PrintableRatio).unwrap();
        slowest = slowest.max(report.elapsed);
        let high: Vec<_> = report.plausible(0.95).collect();
        if high.len() == 1 && high[0].password == planted && report.elapsed < 10.0 {
            recovered += 1;
        }
        let set = |p: usize| -> HashSet<String> {
            crack(&blob, &space, p, &PrintableRatio).unwrap().candidates.into_iter().map(|c| c.password).collect()
        };
        let reference: HashSet<String> = report.candidates.iter().map(|c| c.password.clone()).collect();
        invariant += usize::from([1, 2, 8].into_iter().all(|p| set(p) == reference));
    }
    verdict(
        recovered == 100 && invariant == 100,
        format!(
            "space size {size}; planted password the unique plausible candidate in {recovered}/100, \
             slowest trial {slowest:.2} s at parallelism 4 (limit 10 s); candidate sets equal across 1/2/4/8 \
             in {invariant}/100"
        ),
    )
}

fn ac6_throughput() -> (Verdict, f64) {
    let report = bench_legacy(Duration::from_secs(10), Duration::from_secs(1));
    let rate = report.throughput_per_core;
    let six = PasswordSpace::legacy(6, 6);
    let projection = extrapolate(&six, rate).unwrap();
    let reported_rate = throughput_for_hours(&six, REPORTED_EXHAUSTION_HOURS);
    let factor = rate / reported_rate;
    let size_ok = projection.size.to_string() == "285302545920";
    let v = verdict(
        rate >= 1e6 && size_ok,
        format!(
            "{rate:.3e} guesses/s/core on {} (min 1e6); 6-char space {} exhausted in {:.1} h on one core; \
             {REPORTED_EXHAUSTION_HOURS} h needs {reported_rate:.3e} guesses/s, measured/needed = {factor:.2} ({})",
            report.hardware.cpu_model,
            projection.size,
            projection.hours,
            if (0.1..=10.0).contains(&factor) {
                "within one order of magnitude"
            } else {
                "outside one order of magnitude"
            }
        ),
    );
    (v, rate)
}

fn ac7_secrecy_audit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut errors = Vec::new();
    for i in 0..50 {
        let server = Clock::new().server();
        let client = legacy_client(&server);
        let (orig, sharing, decoy) = (legacy_password(&mut rng), legacy_password(&mut rng), legacy_password(&mut rng));
        let guid = client.store(&prose(&mut rng, 200), &orig).unwrap();
        client.fetch(guid, &orig).unwrap();
        if !secrecy_audit(server.transcript(), &[&orig, &sharing]).none_exposed() {
            errors.push(format!("legacy {i}: store/fetch exposed a password"));
        }
        let share = client.share(guid, &orig, &sharing).unwrap();
        client.access_shared(share, &sharing, T0).unwrap();
        let report = secrecy_audit(server.transcript(), &[&orig, &sharing]);
        if !report.all_exposed() || report.secrets.iter().any(|s| s.ops != ["share"]) {
            errors.push(format!("legacy {i}: expected both passwords in the share request"));
        }
        if !secrecy_audit(server.transcript(), &[&decoy]).none_exposed() {
            errors.push(format!("legacy {i}: decoy reported"));
        }
    }
    for i in 0..50 {
        let server = Clock::new().server();
        let client = hardened_client(&server, &mut rng);
        let (orig, sharing) = (hardened_password(&mut rng), hardened_password(&mut rng));
        let guid = client.store(&prose(&mut rng, 200), &orig).unwrap();
        let share = client.share(guid, &orig, &sharing).unwrap();
        client.access(share, &sharing, T0).unwrap();
        if !secrecy_audit(server.transcript(), &[&orig, &sharing]).none_exposed() {
            errors.push(format!("hardened {i}: password on the wire"));
        }
        // The audit must still see what was sent.
        if !secrecy_audit(server.transcript(), &[share.to_string()]).all_exposed() {
            errors.push(format!("hardened {i}: audit missed the share guid"));
        }
    }
    verdict(
        errors.is_empty(),
        if errors.is_empty() {
            "50 legacy sessions expose both passwords (and only in share); 50 hardened sessions expose neither".into()
        } else {
            errors.join("; ")
        },
    )
}

fn ac8_vectors() -> Verdict {
    let report = check_share_vectors(BUNDLED_SHARE_VECTORS);
    let cli = Command::new(env!("CARGO_BIN_EXE_cfslab")).arg("vectors-check").output().unwrap();
    verdict(
        report.checked >= 10 && report.passed() && cli.status.success(),
        format!(
            "{}/{} share-key vectors match; `cfslab vectors-check` exit {:?}",
            report.checked - report.mismatches.len(),
            report.checked,
            cli.status.code()
        ),
    )
}

fn ac9_access_auth() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let clock = Clock::new();
    let server = clock.server();
    let legacy = legacy_client(&server);
    let hardened = hardened_client(&server, &mut rng);
    let mut counts = [0usize; 8];
    for _ in 0..100 {
        clock.set(T0);
        let data = prose(&mut rng, 100);

        let (orig, sharing, wrong) = (legacy_password(&mut rng), legacy_password(&mut rng), legacy_password(&mut rng));
        let guid = legacy.store(&data, &orig).unwrap();
        let share = legacy.share(guid, &orig, &sharing).unwrap();
        let kind = |r: Result<CipherBlob, ClientError>| r.err().and_then(|e| e.server_kind());
        let now = T0 + rng.gen_range(0..100);
        clock.set(now);
        counts[0] += usize::from(legacy.access_shared(share, &sharing, now).ok().as_deref() == Some(&data[..]));
        counts[1] += usize::from(kind(legacy.access_ciphertext(share, &wrong, now)) == Some(ErrorKind::AuthFailed));
        let sig = sign_timestamp(&derive_share_keypair(&sharing).unwrap(), now).as_bytes().to_vec();
        let shift = rng.gen_range(1..=60);
        let tampered = AccessRequest { share_guid: share, timestamp: now - shift, signature: sig.clone() };
        counts[2] += usize::from(kind(legacy.submit_access(tampered)) == Some(ErrorKind::AuthFailed));
        let replay = AccessRequest { share_guid: share, timestamp: now, signature: sig };
        clock.set(now + 600);
        counts[3] += usize::from(kind(legacy.submit_access(replay)) == Some(ErrorKind::StaleTimestamp));

        clock.set(T0);
        let (orig, sharing, wrong) =
            (hardened_password(&mut rng), hardened_password(&mut rng), hardened_password(&mut rng));
        let guid = hardened.store(&data, &orig).unwrap();
        let share = hardened.share(guid, &orig, &sharing).unwrap();
        let hkind = |r: Result<_, ClientError>| r.err().and_then(|e| e.server_kind());
        clock.set(now);
        counts[4] += usize::from(hardened.access(share, &sharing, now).ok().as_deref() == Some(&data[..]));
        counts[5] += usize::from(hkind(hardened.access_sealed(share, &wrong, now)) == Some(ErrorKind::AuthFailed));
        let sig = sign_timestamp(&derive_hardened_share_keypair(&sharing).unwrap(), now).as_bytes().to_vec();
        let tampered = AccessRequest { share_guid: share, timestamp: now + shift, signature: sig.clone() };
        counts[6] += usize::from(hkind(hardened.submit_access(tampered)) == Some(ErrorKind::AuthFailed));
        let replay = AccessRequest { share_guid: share, timestamp: now, signature: sig };
        clock.set(now + 600);
        counts[7] += usize::from(hkind(hardened.submit_access(replay)) == Some(ErrorKind::StaleTimestamp));
    }
    verdict(
        counts.iter().all(|&c| c == 100),
        format!(
            "legacy: correct {}, wrong password rejected {}, tampered timestamp rejected {}, 10-min replay rejected {}; \
             hardened: {}, {}, {}, {} (of 100 each)",
            counts[0], counts[1], counts[2], counts[3], counts[4], counts[5], counts[6], counts[7]
        ),
    )
}

fn ac10_hardened(legacy_rate: f64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let server = Clock::new().server();
    let client = hardened_client(&server, &mut rng);
    let pw = hardened_password(&mut rng);
    let data = prose(&mut rng, 512);
    let mut guids = HashSet::new();
    let mut ciphertexts = HashSet::new();
    let mut nonces = HashSet::new();
    let mut leaks = 0;
    let mut reference = None;
    for _ in 0..1000 {
        let guid = client.store(&data, &pw).unwrap();
        let (header, blob) = client.fetch_sealed(guid).unwrap();
        guids.insert(guid);
        nonces.insert((header.salt, header.iv));
        match &reference {
            None => reference = Some(blob.clone()),
            Some(first) => leaks += usize::from(prefix_leak(first, &blob) != 0),
        }
        ciphertexts.insert(blob.into_bytes());
    }
    let distinct = guids.len() == 1000 && ciphertexts.len() == 1000 && nonces.len() == 1000;

    let kdf = bench_kdf(DEFAULT_KDF_ITERATIONS, 3, legacy_rate);
    let floor = bench_kdf(KDF_ITERATION_FLOOR, 3, legacy_rate);

    let mut rejected = 0;
    let before = server.transcript().len();
    let mut short: Vec<String> =
        (1..=11).flat_map(|len| (0..20).map(move |_| len)).map(|len| random_string(&mut rng, len)).collect();
    short.extend(["!!!!!!!!".to_owned(), "hunter2!".to_owned(), "Tr0ub4dor&3".to_owned()]);
    for p in &short {
        rejected += usize::from(matches!(client.store(&data, p), Err(ClientError::Policy(_))));
    }
    let no_traffic = server.transcript().len() == before;
    verdict(
        distinct && leaks == 0 && kdf.cost_ratio >= 1e3 && rejected == short.len() && no_traffic,
        format!(
            "1000 duplicate stores: distinct ciphertexts {}, guids {}, salt/iv pairs {}, nonzero prefix_leak {leaks}; \
             KDF cost ratio {:.3e} at {} iterations ({:.3e} at {}), min 1e3; \
             {rejected}/{} passwords under 12 characters rejected before any traffic",
            ciphertexts.len(),
            guids.len(),
            nonces.len(),
            kdf.cost_ratio,
            kdf.iterations,
            floor.cost_ratio,
            floor.iterations,
            short.len()
        ),
    )
}

fn flip_hex_digit(text: &str, field: &str, rng: &mut ChaCha8Rng) -> String {
    let at = text.find(&format!("\"{field}\": \"")).expect("field present") + field.len() + 5;
    let mut bytes = text.as_bytes().to_vec();
    let i = at + rng.gen_range(0..8);
    bytes[i] = if bytes[i] == b'0' { b'1' } else { b'0' };
    String::from_utf8(bytes).unwrap()
}

fn ac11_integrity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let clock = Clock::new();
    let server = clock.server();
    let client = legacy_client(&server);
    let mut mismatch_rejected = 0;
    for _ in 0..100 {
        let blob = encrypt_legacy(&prose(&mut rng, 100), &derive_legacy_key(&legacy_password(&mut rng)).unwrap());
        let mut digest = sha256_digest(blob.as_bytes());
        digest.0[rng.gen_range(0..32)] ^= 1 << rng.gen_range(0..8);
        let req = StoreRequest { ciphertext: blob.into_bytes(), sha256: digest };
        mismatch_rejected +=
            usize::from(client.submit_store(req).err().and_then(|e| e.server_kind()) == Some(ErrorKind::HashMismatch));
    }
    let nothing_stored = server.store().list(Namespace::Objects).unwrap().is_empty();

    let dir = tempfile::tempdir().unwrap();
    let disk = Arc::new(Server::open(dir.path()).unwrap().with_clock(Arc::new(|| T0)));
    let client = legacy_client(&disk);
    let mut detected = 0;
    let faults = ["flip blob byte", "truncate blob", "extend blob", "edit metadata digest", "truncate metadata"];
    for trial in 0..100 {
        let pw = legacy_password(&mut rng);
        let guid = client.store(&prose(&mut rng, 300), &pw).unwrap();
        let (blob_path, meta_path) = disk.store().paths(Namespace::Objects, guid).unwrap();
        let mut blob = fs::read(&blob_path).unwrap();
        let meta = fs::read_to_string(&meta_path).unwrap();
        match trial % faults.len() {
            0 => {
                let i = rng.gen_range(0..blob.len());
                blob[i] ^= rng.gen_range(1..=255);
                fs::write(&blob_path, &blob).unwrap();
            }
            1 => fs::write(&blob_path, &blob[..blob.len() - rng.gen_range(1..=16)]).unwrap(),
            2 => {
                blob.extend(random_bytes(&mut rng, 16));
                fs::write(&blob_path, &blob).unwrap();
            }
            3 => fs::write(&meta_path, flip_hex_digit(&meta, "sha256", &mut rng)).unwrap(),
            _ => fs::write(&meta_path, &meta[..rng.gen_range(1..meta.len())]).unwrap(),
        }
        let on_load = matches!(disk.store().load::<StoredObject>(guid), Err(StoreError::Corrupted { .. }));
        let on_fetch = client.fetch_ciphertext(guid).err().and_then(|e| e.server_kind()) == Some(ErrorKind::Storage);
        detected += usize::from(on_load && on_fetch);
    }
    verdict(
        mismatch_rejected == 100 && nothing_stored && detected == 100,
        format!(
            "tampered hash rejected {mismatch_rejected}/100 (nothing stored: {nothing_stored}); \
             injected disk faults detected {detected}/100 ({})",
            faults.join(", ")
        ),
    )
}

fn run(n: usize, f: impl FnOnce() -> Verdict) -> bool {
    let started = Instant::now();
    let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    });
    println!("AC{n} {} [{:.1} s] {}", if v.pass { "PASS" } else { "FAIL" }, started.elapsed().as_secs_f64(), v.detail);
    v.pass
}

fn main() {
    let mut legacy_rate = 0.0;
    let results = [
        run(1, ac1_round_trips),
        run(2, ac2_prefix_leak),
        run(3, ac3_padding_rate),
        run(4, ac4_padding_collision),
        run(5, ac5_cracker),
        run(6, || {
            let (v, rate) = ac6_throughput();
            legacy_rate = rate;
            v
        }),
        run(7, ac7_secrecy_audit),
        run(8, ac8_vectors),
        run(9, ac9_access_auth),
        run(10, || {
            if legacy_rate == 0.0 {
                legacy_rate = bench_legacy(Duration::from_secs(2), Duration::ZERO).throughput_per_core;
            }
            ac10_hardened(legacy_rate)
        }),
        run(11, ac11_integrity),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
