//! Wall-clock throughput of key generation, encapsulation and
//! decapsulation across parameter sets.
//!
//! Each operation runs a fixed number of untimed warmup calls, then is timed
//! over `repeats` windows that together last at least `min_duration`. Inputs are precomputed from the seed and cycled, so no
//! randomness is drawn inside timed regions. Timed loops are single-threaded.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha3::{Digest, Sha3_256};

use crate::error::{Error, Result};
use crate::mlkem::{decaps, encaps, keygen, Ciphertext, KemParams, KeyPair};

/// Distinct inputs cycled through by each timed loop.
const INPUT_POOL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    #[serde(with = "secs")]
    pub min_duration: Duration,
    pub warmup: u64,
    pub repeats: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            min_duration: Duration::from_secs(1),
            warmup: 100,
            repeats: 3,
        }
    }
}

impl BenchConfig {
    pub fn with_min_duration(min_duration: Duration) -> Self {
        BenchConfig {
            min_duration,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_duration.is_zero() {
            return Err(Error::param("min_duration must be positive"));
        }
        if self.repeats == 0 {
            return Err(Error::param("repeats must be at least 1"));
        }
        Ok(())
    }
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KemOp {
    Keygen,
    Encaps,
    Decaps,
}

impl KemOp {
    pub const ALL: [KemOp; 3] = [KemOp::Keygen, KemOp::Encaps, KemOp::Decaps];

    pub fn as_str(self) -> &'static str {
        match self {
            KemOp::Keygen => "keygen",
            KemOp::Encaps => "encaps",
            KemOp::Decaps => "decaps",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub op_name: KemOp,
    pub params_label: String,
    pub k: usize,
    pub iterations: u64,
    /// Timed seconds, excluding warmup.
    pub wall_time: f64,
    pub ops_per_sec: f64,
    pub warmup_iterations: u64,
    /// Relative standard error of ops/sec across the repeat windows.
    pub rel_std_err: f64,
    /// Hash of the operation's outputs over the input pool; equal seeds
    /// give equal fingerprints.
    pub fingerprint: String,
}

struct Inputs {
    keygen_seeds: Vec<[u8; 64]>,
    encaps_seeds: Vec<[u8; 32]>,
    keys: Vec<KeyPair>,
    cts: Vec<Ciphertext>,
}

fn prepare(params: &KemParams, seed: u64) -> Result<Inputs> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut keygen_seeds = vec![[0u8; 64]; INPUT_POOL];
    let mut encaps_seeds = vec![[0u8; 32]; INPUT_POOL];
    for s in &mut keygen_seeds {
        rng.fill_bytes(s);
    }
    for s in &mut encaps_seeds {
        rng.fill_bytes(s);
    }
    let keys = keygen_seeds
        .iter()
        .map(|s| keygen(params, s))
        .collect::<Result<Vec<_>>>()?;
    let cts = keys
        .iter()
        .zip(&encaps_seeds)
        .map(|(kp, s)| encaps(params, &kp.encaps_key, s).map(|(ct, _)| ct))
        .collect::<Result<Vec<_>>>()?;
    Ok(Inputs {
        keygen_seeds,
        encaps_seeds,
        keys,
        cts,
    })
}

fn run_op(params: &KemParams, inputs: &Inputs, op: KemOp, i: usize) -> Vec<u8> {
    let i = i % INPUT_POOL;
    // Inputs were validated in `prepare`, so these calls cannot fail.
    match op {
        KemOp::Keygen => keygen(params, &inputs.keygen_seeds[i]).expect("valid seed").encaps_key,
        KemOp::Encaps => {
            let (ct, ss) = encaps(params, &inputs.keys[i].encaps_key, &inputs.encaps_seeds[i]).expect("valid key");
            let mut out = ct.0;
            out.extend_from_slice(&ss.0);
            out
        }
        KemOp::Decaps => decaps(params, &inputs.keys[i].decaps_key, &inputs.cts[i]).expect("valid ct").0.to_vec(),
    }
}

fn fingerprint(params: &KemParams, inputs: &Inputs, op: KemOp) -> String {
    let mut h = Sha3_256::new();
    for i in 0..INPUT_POOL {
        h.update(run_op(params, inputs, op, i));
    }
    hex::encode(&h.finalize()[..8])
}

/// Accumulated timing for one (parameter set, operation) cell.
#[derive(Default)]
struct Cell {
    iterations: u64,
    seconds: f64,
    window_rates: Vec<f64>,
}

fn time_window(params: &KemParams, inputs: &Inputs, op: KemOp, window: Duration, cell: &mut Cell) {
    let start = Instant::now();
    let mut n = 0u64;
    loop {
        black_box(run_op(params, inputs, op, cell.iterations as usize + n as usize));
        n += 1;
        if start.elapsed() >= window {
            break;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    cell.iterations += n;
    cell.seconds += secs;
    cell.window_rates.push(n as f64 / secs);
}

/// Times every operation of every set. Each repeat visits all sets and
/// operations in turn, so slow periods on a shared host are spread across
/// the whole table rather than landing on one parameter set.
fn bench_interleaved(sets: &[KemParams], config: &BenchConfig, seed: u64) -> Result<Vec<BenchResult>> {
    config.validate()?;
    let mut inputs = Vec::with_capacity(sets.len());
    for p in sets {
        p.validate()?;
        inputs.push(prepare(p, seed)?);
    }
    for (p, inp) in sets.iter().zip(&inputs) {
        for op in KemOp::ALL {
            for i in 0..config.warmup {
                black_box(run_op(p, inp, op, i as usize));
            }
        }
    }
    let window = config.min_duration / config.repeats;
    let mut cells: Vec<[Cell; 3]> = sets.iter().map(|_| Default::default()).collect();
    for _ in 0..config.repeats {
        for ((p, inp), cell) in sets.iter().zip(&inputs).zip(&mut cells) {
            for (j, op) in KemOp::ALL.into_iter().enumerate() {
                time_window(p, inp, op, window, &mut cell[j]);
            }
        }
    }
    let mut out = Vec::with_capacity(sets.len() * 3);
    for ((p, inp), cell) in sets.iter().zip(&inputs).zip(&cells) {
        for (j, op) in KemOp::ALL.into_iter().enumerate() {
            let c = &cell[j];
            out.push(BenchResult {
                op_name: op,
                params_label: p.label.clone(),
                k: p.k,
                iterations: c.iterations,
                wall_time: c.seconds,
                ops_per_sec: c.iterations as f64 / c.seconds,
                warmup_iterations: config.warmup,
                rel_std_err: rel_std_err(&c.window_rates),
                fingerprint: fingerprint(p, inp, op),
            });
        }
    }
    Ok(out)
}

fn rel_std_err(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt() / mean
}

/// Times keygen, encaps and decaps for one parameter set.
pub fn bench_kem(params: &KemParams, config: &BenchConfig, seed: u64) -> Result<Vec<BenchResult>> {
    bench_interleaved(std::slice::from_ref(params), config, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub op_name: KemOp,
    /// Labels in increasing security order.
    pub order: Vec<String>,
    pub ops_per_sec: Vec<f64>,
    /// Every set with a lower module rank is strictly faster than every set
    /// with a higher one.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSuite {
    pub results: Vec<BenchResult>,
    pub verdicts: Vec<OrderingVerdict>,
}

impl BenchSuite {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn result(&self, label: &str, op: KemOp) -> Option<&BenchResult> {
        self.results.iter().find(|r| r.params_label == label && r.op_name == op)
    }
}

/// Benchmarks at least two parameter sets, ordered by security level
/// (module rank), and checks that throughput falls as security rises.
pub fn bench_suite(param_sets: &[KemParams], config: &BenchConfig, seed: u64) -> Result<BenchSuite> {
    if param_sets.len() < 2 {
        return Err(Error::param("bench suite needs at least two parameter sets"));
    }
    let mut sets = param_sets.to_vec();
    sets.sort_by_key(|p| p.k);
    let results = bench_interleaved(&sets, config, seed)?;
    let verdicts = KemOp::ALL
        .iter()
        .map(|&op| {
            let rows: Vec<&BenchResult> = results.iter().filter(|r| r.op_name == op).collect();
            let pass = rows.iter().all(|a| {
                rows.iter()
                    .filter(|b| b.k > a.k)
                    .all(|b| a.ops_per_sec > b.ops_per_sec)
            });
            OrderingVerdict {
                op_name: op,
                order: rows.iter().map(|r| r.params_label.clone()).collect(),
                ops_per_sec: rows.iter().map(|r| r.ops_per_sec).collect(),
                pass,
            }
        })
        .collect();
    Ok(BenchSuite { results, verdicts })
}
