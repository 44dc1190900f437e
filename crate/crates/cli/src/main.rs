//! `cfslab`: command-line driver for the storage lab.
//!
//! Exit codes: 0 success, 1 failure, 2 usage, 3 password policy rejection,
//! 4 server rejection, 5 decryption failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "cfslab", version, about = "Legacy and hardened encrypted file storage lab")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Server address for client commands.
    #[arg(long, global = true, env = "CFS_LAB_SERVER", default_value = "127.0.0.1:7745")]
    pub server: String,
    /// Storage root (serve, prefix-scan, audit). `serve` keeps state in memory without it.
    #[arg(long, global = true, env = "CFS_LAB_ROOT")]
    pub root: Option<PathBuf>,
    /// Password policy preset.
    #[arg(long, global = true, value_enum)]
    pub policy: Option<Preset>,
    /// PBKDF2 iterations for hardened encryption.
    #[arg(long, global = true, default_value_t = cfs_lab::crypto::DEFAULT_KDF_ITERATIONS)]
    pub kdf_iterations: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "legacy-6")]
    Legacy6,
    #[value(name = "legacy-8")]
    Legacy8,
    Hardened,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Named preset: `legacy` is the 94 printable characters with a required special.
    #[arg(long, conflicts_with = "charset")]
    pub space: Option<String>,
    /// Character classes joined by `+`: lower, upper, digit, special, symbol, printable.
    #[arg(long)]
    pub charset: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub min_len: usize,
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
    /// Require one of the legacy specials. Defaults to true when the charset has any.
    #[arg(long)]
    pub require_special: Option<bool>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the storage server over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7745")]
        listen: String,
        /// Seconds a signed access timestamp stays valid.
        #[arg(long, default_value_t = cfs_lab::server::DEFAULT_FRESHNESS_WINDOW)]
        freshness_window: u64,
    },
    /// Encrypt a file under the legacy scheme and upload it.
    Store {
        #[arg(long)]
        password: String,
        file: PathBuf,
    },
    /// Download and decrypt a legacy object.
    Fetch {
        #[arg(long)]
        guid: String,
        #[arg(long)]
        password: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Legacy share: sends both passwords to the server.
    Share {
        #[arg(long)]
        guid: String,
        #[arg(long)]
        password: String,
        #[arg(long)]
        sharing_password: String,
    },
    /// Open a legacy share with a signed timestamp.
    Access {
        #[arg(long)]
        share: String,
        #[arg(long)]
        sharing_password: String,
        /// Unix seconds to sign; defaults to now.
        #[arg(long)]
        timestamp: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hardened store: PBKDF2 key, random salt and IV.
    Hstore {
        #[arg(long)]
        password: String,
        file: PathBuf,
    },
    /// Download and decrypt a hardened object.
    Hfetch {
        #[arg(long)]
        guid: String,
        #[arg(long)]
        password: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hardened share: re-encrypts locally, no password leaves the client.
    Hshare {
        #[arg(long)]
        guid: String,
        #[arg(long)]
        password: String,
        #[arg(long)]
        sharing_password: String,
    },
    /// Open a hardened share.
    Haccess {
        #[arg(long)]
        share: String,
        #[arg(long)]
        sharing_password: String,
        #[arg(long)]
        timestamp: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force a legacy ciphertext.
    Crack {
        /// Object to fetch from the server.
        #[arg(long, required_unless_present = "blob_file")]
        guid: Option<String>,
        /// Raw ciphertext file instead of a server object.
        #[arg(long)]
        blob_file: Option<PathBuf>,
        #[command(flatten)]
        space: SpaceArgs,
        /// One candidate per line instead of enumerating a charset.
        #[arg(long, conflicts_with_all = ["space", "charset"])]
        wordlist: Option<PathBuf>,
        #[arg(long, default_value_t = default_parallelism())]
        parallelism: usize,
        /// printable, pdf, png, zip, jpeg or magic:<hex>.
        #[arg(long, default_value = "printable")]
        heuristic: String,
    },
    /// Measure legacy guesses per second and the KDF cost ratio.
    Bench {
        #[arg(long, default_value_t = 10.0)]
        seconds: f64,
        #[arg(long, default_value_t = 1.0)]
        warmup: f64,
        /// KDF samples for the cost ratio; 0 skips it.
        #[arg(long, default_value_t = 3)]
        kdf_samples: u32,
    },
    /// Time to exhaust a password space at a given rate.
    Extrapolate {
        #[arg(long)]
        throughput: f64,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Count shared leading ciphertext blocks between objects.
    PrefixScan {
        /// Objects to compare over the server; without them every object under --root is scanned.
        guids: Vec<String>,
    },
    /// Find a wrong password whose decryption has valid padding.
    PaddingCollision {
        #[arg(long)]
        guid: String,
        /// The real password, excluded from the search.
        #[arg(long)]
        true_password: String,
        #[command(flatten)]
        space: SpaceArgs,
        /// Also submit a share with the colliding password and open it.
        #[arg(long)]
        submit: bool,
        #[arg(long, default_value = "collide-share!")]
        sharing_password: String,
    },
    /// Search the server transcript for secrets.
    Audit {
        /// Transcript file; defaults to the one under --root.
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Fail unless every secret is exposed (`all`) or none is (`none`).
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        #[arg(required = true)]
        secrets: Vec<String>,
    },
    /// Generate random passwords that satisfy a policy.
    Genpass {
        #[arg(long, default_value_t = 14)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Check share-key and KDF derivations against reference vectors.
    VectorsCheck {
        #[arg(long)]
        share_vectors: Option<PathBuf>,
        #[arg(long)]
        kdf_vectors: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    All,
    None,
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format;
    match commands::run(&cli.global, cli.command) {
        Ok(out) => {
            out.print(format);
            ExitCode::SUCCESS
        }
        Err(err) => {
            let code = commands::exit_code(&err);
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
