use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// ML-KEM compression, failure-rate, handshake-size and throughput analyses.
#[derive(Debug, Parser)]
#[command(name = "kemscope", version, about)]
pub struct Cli {
    /// Emit a JSON envelope instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for every random choice; drawn and printed when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// File of `key = value` defaults for flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ciphertext bit length and expansion rate.
    Cer(CerArgs),
    /// Key generation, encapsulation, decapsulation and known-answer tests.
    #[command(subcommand)]
    Kem(KemCommand),
    /// Monte-Carlo decryption failure rate for one quantizer.
    Dfr(DfrArgs),
    /// Compare uniform, Lloyd-Max and semi-compressed quantizers.
    Quantizer(QuantizerArgs),
    /// TLS 1.3 handshake payload model.
    Payload(PayloadArgs),
    /// Sum handshake payload from a segment trace, or emit a synthetic one.
    Trace(TraceArgs),
    /// Handshakes completed under delay and loss.
    Rate(RateArgs),
    /// Throughput of keygen, encaps and decaps.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["table1", "params", "k"])))]
pub struct CerArgs {
    /// The six reference rows (standard and uncompressed presets).
    #[arg(long)]
    pub table1: bool,
    /// Parameter-set name, e.g. ML-KEM-768.
    #[arg(long, conflicts_with_all = ["table1", "k"])]
    pub params: Option<String>,
    /// Module rank for a custom row (needs --du and --dv).
    #[arg(long, requires_all = ["du", "dv"], conflicts_with = "table1")]
    pub k: Option<usize>,
    #[arg(long)]
    pub du: Option<u8>,
    #[arg(long)]
    pub dv: Option<u8>,
    /// Encapsulated information bits K.
    #[arg(long, default_value_t = 256)]
    pub info_bits: u64,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ParamsArg {
    /// Parameter-set name, e.g. ML-KEM-512 or ML-KEM-768-uncompressed.
    #[arg(long, default_value = "ML-KEM-768")]
    pub params: String,
    /// Override the u compression width.
    #[arg(long)]
    pub du: Option<u8>,
    /// Override the v compression width.
    #[arg(long)]
    pub dv: Option<u8>,
}

#[derive(Debug, Subcommand)]
pub enum KemCommand {
    /// Derive a key pair.
    Keygen {
        #[command(flatten)]
        params: ParamsArg,
        /// Explicit 64-byte seed (d || z) in hex instead of --seed.
        #[arg(long)]
        seed_hex: Option<String>,
    },
    /// Encapsulate to an encapsulation key.
    Encaps {
        #[command(flatten)]
        params: ParamsArg,
        /// Encapsulation key in hex, or @FILE holding hex.
        #[arg(long)]
        ek: String,
        /// Explicit 32-byte message seed in hex instead of --seed.
        #[arg(long)]
        seed_hex: Option<String>,
    },
    /// Decapsulate a ciphertext.
    Decaps {
        #[command(flatten)]
        params: ParamsArg,
        /// Decapsulation key in hex, or @FILE holding hex.
        #[arg(long)]
        dk: String,
        /// Ciphertext in hex, or @FILE holding hex.
        #[arg(long)]
        ct: String,
    },
    /// Validate known-answer vectors.
    Kat {
        #[arg(long)]
        file: PathBuf,
        /// Input format; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<KatFormat>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KatFormat {
    /// Line-oriented `name = hex` records.
    Kat,
    /// ACVP JSON test-vector file.
    Acvp,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizerArg {
    Uniform,
    LloydMax,
    SemiCompressed,
}

#[derive(Debug, Args, Serialize)]
pub struct DfrArgs {
    #[arg(long, default_value = "ML-KEM-512")]
    pub params: String,
    #[arg(long, value_enum, default_value = "uniform")]
    pub quantizer: QuantizerArg,
    /// u width (defaults to the parameter set's).
    #[arg(long)]
    pub du: Option<u8>,
    /// v width (defaults to the parameter set's; 12 for semi_compressed).
    #[arg(long)]
    pub dv: Option<u8>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Encapsulations harvested to train Lloyd-Max codebooks.
    #[arg(long, default_value_t = 1000)]
    pub harvest: u64,
    /// Lloyd-Max iteration cap.
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct QuantizerArgs {
    #[arg(long, default_value = "ML-KEM-512")]
    pub params: String,
    /// Comma-separated du:dv pairs.
    #[arg(long, value_delimiter = ',', default_value = "10:4,8:4,6:4")]
    pub pairs: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Encapsulations harvested for training, and again for held-out scoring.
    #[arg(long, default_value_t = 1000)]
    pub harvest: u64,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PayloadArgs {
    /// All ten reference configurations (the default).
    #[arg(long, conflicts_with_all = ["kex", "auth"])]
    pub table2: bool,
    /// Key-exchange group, e.g. X25519MLKEM768.
    #[arg(long, requires = "auth")]
    pub kex: Option<String>,
    /// Authentication scheme: RSA or MLDSA44.
    #[arg(long, requires = "kex")]
    pub auth: Option<String>,
    /// CSV of observed `kex,auth,total` rows to calibrate from instead of
    /// the shipped reference totals.
    #[arg(long, value_name = "FILE")]
    pub observations: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["file", "emit"])))]
pub struct TraceArgs {
    /// Trace file of `c2s,<len>` / `s2c,<len>` lines.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Print the synthetic trace for --kex/--auth instead of analyzing one.
    #[arg(long, requires_all = ["kex", "auth"])]
    pub emit: bool,
    #[arg(long)]
    pub kex: Option<String>,
    #[arg(long)]
    pub auth: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    /// JSON network profile; individual flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub profile: Option<PathBuf>,
    /// One-way delay in milliseconds; a comma list sweeps.
    #[arg(long, value_delimiter = ',')]
    pub delay_ms: Vec<f64>,
    /// Per-packet loss probability; a comma list sweeps.
    #[arg(long, value_delimiter = ',')]
    pub loss: Vec<f64>,
    /// Retransmission timeout in seconds.
    #[arg(long)]
    pub rto: Option<f64>,
    /// Round trips per connection.
    #[arg(long)]
    pub rtts: Option<u32>,
    /// Packets per handshake exposed to loss.
    #[arg(long)]
    pub packets: Option<u32>,
    /// Cryptographic compute per connection in milliseconds.
    #[arg(long, default_value_t = 5.0)]
    pub crypto_ms: f64,
    /// Observation window in seconds.
    #[arg(long, default_value_t = 11.0)]
    pub duration: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Comma-separated parameter-set names.
    #[arg(long, value_delimiter = ',', default_value = "ML-KEM-512,ML-KEM-768,ML-KEM-1024")]
    pub params: Vec<String>,
    /// Minimum timed seconds per operation.
    #[arg(long, default_value_t = 1.0)]
    pub min_duration: f64,
    /// Untimed calls before measurement.
    #[arg(long, default_value_t = 100)]
    pub warmup: u64,
    /// Timed windows per operation.
    #[arg(long, default_value_t = 3)]
    pub repeats: u32,
}
