use std::fmt;
use std::fs;
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use cfs_lab::attack::{
    bench_kdf, bench_legacy, crack, crack_wordlist, extrapolate, find_padding_collision, prefix_leak, scorer_from_spec,
    secrecy_audit, throughput_for_hours, PasswordSpace, PlaintextScorer, PrintableRatio, REPORTED_EXHAUSTION_HOURS,
};
use cfs_lab::crypto::{
    derive_share_keypair, password_strength_check, printable_ascii, validate_password, CipherBlob, CryptoError,
    HardenedPolicy, PasswordPolicy,
};
use cfs_lab::hardened::HardenedClient;
use cfs_lab::legacy::{LegacyClient, StoredObject};
use cfs_lab::runtime::{BlobStore, Namespace, Transcript};
use cfs_lab::server::{system_clock, TRANSCRIPT_FILE};
use cfs_lab::transport::{serve, ClientError, TcpTransport};
use cfs_lab::vectors::{check_kdf_vectors, check_share_vectors, BUNDLED_KDF_VECTORS, BUNDLED_SHARE_VECTORS};
use cfs_lab::wire::ShareRequest;
use cfs_lab::{Guid, Server};
use rand::rngs::OsRng;
use rand::Rng;
use serde_json::json;

use crate::output::Output;
use crate::{Command, Expect, Global, Preset, SpaceArgs};

/// A failure with a fixed exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    Failure { code: 2, message: message.into() }.into()
}

fn failed(message: impl Into<String>) -> anyhow::Error {
    Failure { code: 1, message: message.into() }.into()
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.code;
        }
        if let Some(e) = cause.downcast_ref::<ClientError>() {
            return match e {
                ClientError::Policy(_) | ClientError::Crypto(CryptoError::Policy(_)) => 3,
                ClientError::Server(_) => 4,
                ClientError::Crypto(_) => 5,
                ClientError::Protocol(_) | ClientError::Transport(_) => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<CryptoError>() {
            return if matches!(e, CryptoError::Policy(_)) { 3 } else { 5 };
        }
    }
    1
}

fn guid(text: &str) -> Result<Guid> {
    text.parse().map_err(|e| usage(format!("invalid guid {text:?}: {e}")))
}

fn legacy_policy(global: &Global) -> Result<PasswordPolicy> {
    match global.policy {
        None | Some(Preset::Legacy6) => Ok(PasswordPolicy::legacy()),
        Some(Preset::Legacy8) => Ok(PasswordPolicy::legacy_8()),
        Some(Preset::Hardened) => Err(usage("the hardened preset applies to hstore/hfetch/hshare/haccess")),
    }
}

fn hardened_policy(global: &Global) -> Result<HardenedPolicy> {
    match global.policy {
        None | Some(Preset::Hardened) => Ok(HardenedPolicy::with_iterations(global.kdf_iterations)),
        Some(_) => Err(usage("legacy presets apply to store/fetch/share/access")),
    }
}

fn transport(global: &Global) -> Result<TcpTransport> {
    TcpTransport::new(global.server.as_str()).with_context(|| format!("resolving {}", global.server))
}

fn legacy_client(global: &Global) -> Result<LegacyClient<TcpTransport>> {
    Ok(LegacyClient::new(transport(global)?, legacy_policy(global)?))
}

fn hardened_client(global: &Global) -> Result<HardenedClient<TcpTransport>> {
    Ok(HardenedClient::new(transport(global)?, hardened_policy(global)?))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn plaintext_output(plaintext: Vec<u8>, out: Option<PathBuf>) -> Result<Output> {
    let json = json!({ "bytes": plaintext.len(), "plaintext_hex": hex::encode(&plaintext) });
    match out {
        Some(path) => {
            fs::write(&path, &plaintext).with_context(|| format!("writing {}", path.display()))?;
            let text = format!("wrote {} bytes to {}", plaintext.len(), path.display());
            Ok(Output::new(json!({ "bytes": plaintext.len(), "out": path }), text))
        }
        None => Ok(Output::raw(json, plaintext)),
    }
}

fn space_from_args(args: &SpaceArgs) -> Result<PasswordSpace> {
    if args.min_len == 0 || args.min_len > args.max_len {
        return Err(usage(format!("length range {}..={} is empty", args.min_len, args.max_len)));
    }
    let space = match (args.space.as_deref(), args.charset.as_deref()) {
        (Some("legacy"), _) | (None, None) => {
            let mut space = PasswordSpace::from_policy(&PasswordPolicy::legacy(), args.min_len, args.max_len)?;
            if let Some(r) = args.require_special {
                space.require_special = r;
            }
            space
        }
        (Some(other), _) => return Err(usage(format!("unknown space preset {other:?}; known: legacy"))),
        (None, Some(spec)) => {
            let has_special =
                cfs_lab::attack::parse_charset(spec)?.iter().any(|c| cfs_lab::crypto::LEGACY_SPECIALS.contains(*c));
            PasswordSpace::from_spec(spec, args.min_len, args.max_len, args.require_special.unwrap_or(has_special))?
        }
    };
    Ok(space)
}

fn now_or(timestamp: Option<u64>) -> u64 {
    timestamp.unwrap_or_else(system_clock)
}

pub fn run(global: &Global, command: Command) -> Result<Output> {
    match command {
        Command::Serve { listen, freshness_window } => serve_cmd(global, &listen, freshness_window),
        Command::Store { password, file } => {
            let guid = legacy_client(global)?.store(&read_file(&file)?, &password)?;
            Ok(Output::new(json!({ "guid": guid }), guid.to_string()))
        }
        Command::Fetch { guid: g, password, out } => {
            let plaintext = legacy_client(global)?.fetch(guid(&g)?, &password)?;
            plaintext_output(plaintext, out)
        }
        Command::Share { guid: g, password, sharing_password } => {
            let share = legacy_client(global)?.share(guid(&g)?, &password, &sharing_password)?;
            Ok(Output::new(json!({ "share_guid": share }), share.to_string()))
        }
        Command::Access { share, sharing_password, timestamp, out } => {
            let plaintext =
                legacy_client(global)?.access_shared(guid(&share)?, &sharing_password, now_or(timestamp))?;
            plaintext_output(plaintext, out)
        }
        Command::Hstore { password, file } => {
            let guid = hardened_client(global)?.store(&read_file(&file)?, &password)?;
            Ok(Output::new(json!({ "guid": guid }), guid.to_string()))
        }
        Command::Hfetch { guid: g, password, out } => {
            let plaintext = hardened_client(global)?.fetch(guid(&g)?, &password)?;
            plaintext_output(plaintext, out)
        }
        Command::Hshare { guid: g, password, sharing_password } => {
            let share = hardened_client(global)?.share(guid(&g)?, &password, &sharing_password)?;
            Ok(Output::new(json!({ "share_guid": share }), share.to_string()))
        }
        Command::Haccess { share, sharing_password, timestamp, out } => {
            let plaintext = hardened_client(global)?.access(guid(&share)?, &sharing_password, now_or(timestamp))?;
            plaintext_output(plaintext, out)
        }
        Command::Crack { guid: g, blob_file, space, wordlist, parallelism, heuristic } => {
            crack_cmd(global, g, blob_file, &space, wordlist, parallelism, &heuristic)
        }
        Command::Bench { seconds, warmup, kdf_samples } => bench_cmd(global, seconds, warmup, kdf_samples),
        Command::Extrapolate { throughput, space } => {
            let space = space_from_args(&space)?;
            let p = extrapolate(&space, throughput)?;
            let needed = throughput_for_hours(&space, REPORTED_EXHAUSTION_HOURS);
            let text = format!(
                "space: {}\nsize: {}\nat {:.3e} guesses/s: {:.1} hours ({:.3e} years)\nrate for {} hours: {:.3e} guesses/s",
                p.space, p.size, throughput, p.hours, p.years, REPORTED_EXHAUSTION_HOURS, needed
            );
            let json = json!({ "projection": p, "throughput_for_reported_hours": needed });
            Ok(Output::new(json, text))
        }
        Command::PrefixScan { guids } => prefix_scan_cmd(global, &guids),
        Command::PaddingCollision { guid: g, true_password, space, submit, sharing_password } => {
            padding_collision_cmd(global, &g, &true_password, &space, submit, &sharing_password)
        }
        Command::Audit { transcript, expect, secrets } => audit_cmd(global, transcript, expect, &secrets),
        Command::Genpass { length, count } => genpass_cmd(global, length, count),
        Command::VectorsCheck { share_vectors, kdf_vectors } => vectors_cmd(share_vectors, kdf_vectors),
    }
}

fn serve_cmd(global: &Global, listen: &str, freshness_window: u64) -> Result<Output> {
    let server = match &global.root {
        Some(root) => Server::open(root).with_context(|| format!("opening {}", root.display()))?,
        None => Server::in_memory(),
    };
    let server = Arc::new(server.with_freshness_window(freshness_window));
    let listener = TcpListener::bind(listen).with_context(|| format!("binding {listen}"))?;
    let addr = listener.local_addr()?;
    {
        let mut out = std::io::stdout().lock();
        match global.format {
            crate::output::Format::Json => writeln!(out, "{}", json!({ "listening": addr.to_string() }))?,
            crate::output::Format::Text => writeln!(out, "listening on {addr}")?,
        }
        out.flush()?;
    }
    serve(listener, server)?;
    Ok(Output::new(json!({}), ""))
}

fn fetch_blob(global: &Global, g: Option<String>, blob_file: Option<PathBuf>) -> Result<CipherBlob> {
    match (g, blob_file) {
        (_, Some(path)) => Ok(CipherBlob::new(read_file(&path)?)?),
        (Some(g), None) => {
            let client = LegacyClient::new(transport(global)?, PasswordPolicy::legacy());
            Ok(client.fetch_ciphertext(guid(&g)?)?)
        }
        (None, None) => Err(usage("need --guid or --blob-file")),
    }
}

fn crack_cmd(
    global: &Global,
    g: Option<String>,
    blob_file: Option<PathBuf>,
    space: &SpaceArgs,
    wordlist: Option<PathBuf>,
    parallelism: usize,
    heuristic: &str,
) -> Result<Output> {
    let blob = fetch_blob(global, g, blob_file)?;
    let scorer: Box<dyn PlaintextScorer> = scorer_from_spec(heuristic).map_err(usage)?;
    let report = match wordlist {
        Some(path) => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let words: Vec<String> = text.lines().map(str::to_owned).filter(|w| !w.is_empty()).collect();
            crack_wordlist(&blob, &words, parallelism, scorer.as_ref())
        }
        None => crack(&blob, &space_from_args(space)?, parallelism, scorer.as_ref())?,
    };
    let mut text = format!(
        "space: {}\ntried {} guesses in {:.2} s ({:.3e} guesses/s, parallelism {})\n{} padding-valid candidates\n",
        report.space,
        report.guesses_tried,
        report.elapsed,
        report.throughput,
        report.parallelism,
        report.candidates.len()
    );
    for c in report.candidates.iter().take(10) {
        text.push_str(&format!("  {:.3}  {}\n", c.score, c.password));
    }
    Ok(Output::new(serde_json::to_value(&report)?, text))
}

fn bench_cmd(global: &Global, seconds: f64, warmup: f64, kdf_samples: u32) -> Result<Output> {
    if !(seconds > 0.0 && warmup >= 0.0) {
        return Err(usage("--seconds must be positive and --warmup non-negative"));
    }
    let report = bench_legacy(Duration::from_secs_f64(seconds), Duration::from_secs_f64(warmup));
    let rate = report.throughput_per_core;
    let six = PasswordSpace::legacy(6, 6);
    let spaces = [six.clone(), PasswordSpace::legacy(8, 8), PasswordSpace::legacy(12, 12)];
    let projections = spaces.iter().map(|s| extrapolate(s, rate)).collect::<Result<Vec<_>, _>>()?;
    let reported_rate = throughput_for_hours(&six, REPORTED_EXHAUSTION_HOURS);
    let factor = rate / reported_rate;
    let same_order = (0.1..=10.0).contains(&factor);
    let kdf = (kdf_samples > 0).then(|| bench_kdf(global.kdf_iterations, kdf_samples, rate));

    let mut text = format!(
        "cpu: {} ({} logical cores)\nlegacy guesses: {} in {:.2} s = {:.3e} guesses/s/core\n",
        report.hardware.cpu_model, report.hardware.logical_cores, report.guesses, report.elapsed, rate
    );
    for p in &projections {
        text.push_str(&format!(
            "  {}: size {}, {:.2} hours ({:.3e} years) on one core\n",
            p.space, p.size, p.hours, p.years
        ));
    }
    text.push_str(&format!(
        "{} hours for the 6-character space needs {:.3e} guesses/s; this machine is {:.2}x that ({})\n",
        REPORTED_EXHAUSTION_HOURS,
        reported_rate,
        factor,
        if same_order { "same order of magnitude" } else { "different order of magnitude" }
    ));
    if let Some(k) = &kdf {
        text.push_str(&format!(
            "pbkdf2 {} iterations: {:.1} ms/guess, {:.3e}x the legacy cost\n",
            k.iterations,
            k.kdf_seconds_per_guess * 1e3,
            k.cost_ratio
        ));
    }
    let json = json!({
        "bench": report,
        "projections": projections,
        "reported_hours": REPORTED_EXHAUSTION_HOURS,
        "throughput_for_reported_hours": reported_rate,
        "measured_over_reported": factor,
        "same_order_of_magnitude": same_order,
        "kdf": kdf,
    });
    Ok(Output::new(json, text))
}

fn prefix_scan_cmd(global: &Global, guids: &[String]) -> Result<Output> {
    let blobs: Vec<(Guid, CipherBlob)> = if guids.is_empty() {
        let root = global.root.as_ref().ok_or_else(|| usage("give guids or --root to scan a store"))?;
        let store = BlobStore::open(root)?;
        let mut blobs = Vec::new();
        for g in store.list(Namespace::Objects)? {
            // Hardened objects live in the same namespace; they are skipped.
            if let Ok(obj) = store.load::<StoredObject>(g) {
                blobs.push((g, obj.ciphertext));
            }
        }
        blobs
    } else {
        let client = LegacyClient::new(transport(global)?, PasswordPolicy::legacy());
        guids
            .iter()
            .map(|g| {
                let g = guid(g)?;
                Ok((g, client.fetch_ciphertext(g)?))
            })
            .collect::<Result<_>>()?
    };
    let report_all = !guids.is_empty();
    let mut pairs = Vec::new();
    let mut text = String::new();
    for (i, (ga, a)) in blobs.iter().enumerate() {
        for (gb, b) in &blobs[i + 1..] {
            let n = prefix_leak(a, b);
            if n > 0 || report_all {
                text.push_str(&format!("{ga} {gb} {n} shared blocks ({} bytes)\n", 16 * n));
                pairs.push(json!({ "a": ga, "b": gb, "shared_blocks": n }));
            }
        }
    }
    if text.is_empty() {
        text = format!("no shared prefixes among {} objects", blobs.len());
    }
    Ok(Output::new(json!({ "objects": blobs.len(), "pairs": pairs }), text))
}

fn padding_collision_cmd(
    global: &Global,
    g: &str,
    true_password: &str,
    space: &SpaceArgs,
    submit: bool,
    sharing_password: &str,
) -> Result<Output> {
    let client = LegacyClient::new(transport(global)?, legacy_policy(global)?);
    let source = guid(g)?;
    let blob = client.fetch_ciphertext(source)?;
    let outcome = find_padding_collision(&blob, &space_from_args(space)?, true_password)?;
    let Some(password) = outcome.password.clone() else {
        return Err(failed(format!("no collision after {} attempts", outcome.attempts)));
    };
    let mut json = json!({ "password": password, "attempts": outcome.attempts });
    let mut text = format!("{password:?} has valid padding after {} attempts", outcome.attempts);
    if submit {
        let address = derive_share_keypair(sharing_password)?.address();
        let req = ShareRequest {
            source_guid: source,
            original_password: password.clone(),
            sharing_password: sharing_password.to_owned(),
            address,
        };
        let share = client.submit_share(req)?;
        let received = client.access_shared(share, sharing_password, system_clock())?;
        let score = PrintableRatio.score(&received);
        json["share_guid"] = json!(share);
        json["accepted"] = json!(true);
        json["recipient_score"] = json!(score);
        text.push_str(&format!("\nserver accepted the share as {share}\nrecipient plaintext scores {score:.3}"));
    }
    Ok(Output::new(json, text))
}

fn audit_cmd(
    global: &Global,
    transcript: Option<PathBuf>,
    expect: Option<Expect>,
    secrets: &[String],
) -> Result<Output> {
    let path = match (transcript, &global.root) {
        (Some(p), _) => p,
        (None, Some(root)) => root.join(TRANSCRIPT_FILE),
        (None, None) => return Err(usage("need --transcript or --root")),
    };
    let transcript = Transcript::load(&path).with_context(|| format!("reading {}", path.display()))?;
    let report = secrecy_audit(&transcript, secrets);
    let mut text = format!("{} transcript entries\n", report.transcript_entries);
    for s in &report.secrets {
        if s.entries.is_empty() {
            text.push_str(&format!("{:?}: not seen\n", s.secret));
        } else {
            text.push_str(&format!("{:?}: seen in {} entries ({})\n", s.secret, s.entries.len(), s.ops.join(", ")));
        }
    }
    let out = Output::new(serde_json::to_value(&report)?, text);
    match expect {
        Some(Expect::All) if !report.all_exposed() => {
            out.print(global.format);
            Err(failed("expected every secret to be exposed"))
        }
        Some(Expect::None) if !report.none_exposed() => {
            out.print(global.format);
            Err(failed("expected no secret to be exposed"))
        }
        _ => Ok(out),
    }
}

fn genpass_cmd(global: &Global, length: usize, count: usize) -> Result<Output> {
    let charset = printable_ascii();
    let accept: Box<dyn Fn(&str) -> bool> = match global.policy {
        None | Some(Preset::Hardened) => {
            let policy = hardened_policy(global)?;
            Box::new(move |pw: &str| password_strength_check(pw, &policy).is_ok())
        }
        Some(_) => {
            let policy = legacy_policy(global)?;
            Box::new(move |pw: &str| validate_password(pw, &policy).is_ok())
        }
    };
    let mut passwords = Vec::with_capacity(count);
    let mut attempts = 0u32;
    while passwords.len() < count {
        attempts += 1;
        if attempts > 10_000 {
            return Err(
                Failure { code: 3, message: format!("no password of length {length} satisfies the policy") }.into()
            );
        }
        let pw: String = (0..length).map(|_| charset[OsRng.gen_range(0..charset.len())]).collect();
        if accept(&pw) {
            passwords.push(pw);
            attempts = 0;
        }
    }
    Ok(Output::new(json!({ "passwords": passwords }), passwords.join("\n")))
}

fn vectors_cmd(share_path: Option<PathBuf>, kdf_path: Option<PathBuf>) -> Result<Output> {
    let load = |path: Option<PathBuf>, bundled: &str| -> Result<String> {
        match path {
            Some(p) => fs::read_to_string(&p).with_context(|| format!("reading {}", p.display())),
            None => Ok(bundled.to_owned()),
        }
    };
    let share = check_share_vectors(&load(share_path, BUNDLED_SHARE_VECTORS)?);
    let kdf = check_kdf_vectors(&load(kdf_path, BUNDLED_KDF_VECTORS)?);
    let mut text = format!(
        "share-key vectors: {}/{} ok\nkdf vectors: {}/{} ok\n",
        share.checked - share.mismatches.len(),
        share.checked,
        kdf.checked - kdf.mismatches.len(),
        kdf.checked
    );
    for m in share.mismatches.iter().chain(&kdf.mismatches) {
        text.push_str(&format!("line {}: {}: expected {}, got {}\n", m.line, m.label, m.expected, m.actual));
    }
    let passed = share.passed() && kdf.passed();
    let out = Output::new(json!({ "passed": passed, "share": share, "kdf": kdf }), text);
    if passed {
        Ok(out)
    } else {
        eprint!("{}", out.text);
        Err(failed("vector mismatch"))
    }
}
