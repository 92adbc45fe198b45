//! Non-uniform scalar codebooks over `Z_q` and Lloyd-Max training.
//!
//! Distances are measured around the ring (centered mod q), so the cell of
//! the largest level wraps through zero into the cell of the smallest.
//! Levels are integers because decoded values are ring coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlkem::compress::decompress;
use crate::mlkem::params::Q;
use crate::mlkem::pke::CoefficientCodec;
use crate::mlkem::poly::{centered, centered_distance};

/// Largest index width a codebook supports: 2^12 distinct levels do not fit
/// in `[0, q)`.
pub const MAX_CODEBOOK_BITS: u8 = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    bits: u8,
    levels: Vec<u16>,
    boundaries: Vec<f64>,
}

impl Codebook {
    pub fn new(bits: u8, mut levels: Vec<u16>) -> Result<Self> {
        check_codebook_bits(bits)?;
        if levels.len() != 1usize << bits {
            return Err(Error::Quantizer(format!(
                "{} levels given for a {bits}-bit codebook (need {})",
                levels.len(),
                1usize << bits
            )));
        }
        if let Some(&bad) = levels.iter().find(|&&l| l >= Q) {
            return Err(Error::Quantizer(format!("level {bad} outside [0, q)")));
        }
        levels.sort_unstable();
        if levels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Quantizer("codebook levels must be distinct".into()));
        }
        let boundaries = levels.windows(2).map(|w| (w[0] as f64 + w[1] as f64) / 2.0).collect();
        Ok(Codebook {
            bits,
            levels,
            boundaries,
        })
    }

    /// The levels of the uniform `Decompress_d` map.
    pub fn uniform(bits: u8) -> Result<Self> {
        check_codebook_bits(bits)?;
        Self::new(bits, (0..1u16 << bits).map(|c| decompress(c, bits)).collect())
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Index of the nearest level under the centered distance; ties go to
    /// the lower index.
    pub fn quantize(&self, x: u16) -> u16 {
        let len = self.levels.len();
        let pos = self.levels.partition_point(|&l| l < x);
        let hi = pos % len;
        let lo = (pos + len - 1) % len;
        let (dl, dh) = (centered_distance(x, self.levels[lo]), centered_distance(x, self.levels[hi]));
        if dl < dh || (dl == dh && lo < hi) {
            lo as u16
        } else {
            hi as u16
        }
    }

    pub fn dequantize(&self, index: u16) -> Result<u16> {
        self.levels
            .get(index as usize)
            .copied()
            .ok_or_else(|| Error::Quantizer(format!("index {index} out of range for {} levels", self.levels.len())))
    }

    /// Mean squared centered reconstruction error over `samples`.
    pub fn mse(&self, samples: &[u16]) -> f64 {
        mse_of(samples, |x| self.levels[self.quantize(x) as usize])
    }
}

impl CoefficientCodec for Codebook {
    fn bits(&self) -> u8 {
        self.bits
    }

    fn encode(&self, x: u16) -> u16 {
        self.quantize(x)
    }

    fn decode(&self, index: u16) -> u16 {
        self.levels[index as usize]
    }
}

pub(crate) fn check_codebook_bits(bits: u8) -> Result<()> {
    if (1..=MAX_CODEBOOK_BITS).contains(&bits) {
        Ok(())
    } else {
        Err(Error::Quantizer(format!(
            "codebook width {bits} outside 1..={MAX_CODEBOOK_BITS}"
        )))
    }
}

pub(crate) fn mse_of(samples: &[u16], reconstruct: impl Fn(u16) -> u16) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let sse: u64 = samples
        .iter()
        .map(|&x| {
            let e = centered_distance(reconstruct(x), x) as u64;
            e * e
        })
        .sum();
    sse as f64 / samples.len() as f64
}

/// A source of pre-quantization coefficient samples.
pub trait SampleSource {
    fn samples(&self, seed: u64) -> Result<Vec<u16>>;
}

impl SampleSource for [u16] {
    fn samples(&self, _seed: u64) -> Result<Vec<u16>> {
        Ok(self.to_vec())
    }
}

impl SampleSource for Vec<u16> {
    fn samples(&self, _seed: u64) -> Result<Vec<u16>> {
        Ok(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LloydConfig {
    pub max_iterations: usize,
    /// Stop once the relative MSE improvement falls below this.
    pub rel_tolerance: f64,
    /// A level moves only when its cell mean is further than
    /// `0.5 + significance * standard_error` from it.
    pub significance: f64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig {
            max_iterations: 100,
            rel_tolerance: 1e-6,
            significance: 3.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LloydTraining {
    pub codebook: Codebook,
    /// Training MSE of the initial codebook followed by one entry per
    /// completed iteration.
    pub mse_trace: Vec<f64>,
    pub iterations: usize,
}

impl LloydTraining {
    pub fn final_mse(&self) -> f64 {
        *self.mse_trace.last().expect("trace holds the initial MSE")
    }
}

/// Lloyd-Max training on samples drawn from `source`.
pub fn train_lloyd_max(bits: u8, source: &dyn SampleSource, iterations: usize, seed: u64) -> Result<LloydTraining> {
    if iterations == 0 {
        return Err(Error::Quantizer("iterations must be at least 1".into()));
    }
    let samples = source.samples(seed)?;
    train_lloyd_max_with(
        bits,
        &samples,
        LloydConfig {
            max_iterations: iterations,
            ..LloydConfig::default()
        },
    )
}

struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    fn new(samples: &[u16]) -> Result<Self> {
        let mut counts = vec![0u64; Q as usize];
        for &x in samples {
            if x >= Q {
                return Err(Error::input(format!("sample {x} outside [0, q)")));
            }
            counts[x as usize] += 1;
        }
        Ok(Histogram {
            counts,
            total: samples.len() as u64,
        })
    }

    fn present(&self) -> impl Iterator<Item = (u16, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| (x as u16, c))
    }

    fn mse(&self, cb: &Codebook) -> f64 {
        let sse: u64 = self
            .present()
            .map(|(x, c)| {
                let e = centered_distance(x, cb.levels[cb.quantize(x) as usize]) as u64;
                c * e * e
            })
            .sum();
        sse as f64 / self.total as f64
    }
}

#[derive(Default, Clone, Copy)]
struct CellStats {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

/// Lloyd-Max with explicit configuration.
///
/// Starts from the uniform codebook. Each iteration assigns samples to
/// their nearest level, moves every level whose cell mean is significantly
/// more than half a unit away to the rounded mean, and re-seeds empty
/// levels at the worst-served sample values. Training MSE never increases.
pub fn train_lloyd_max_with(bits: u8, samples: &[u16], config: LloydConfig) -> Result<LloydTraining> {
    check_codebook_bits(bits)?;
    if samples.is_empty() {
        return Err(Error::Quantizer("empty training sample set".into()));
    }
    if config.max_iterations == 0 {
        return Err(Error::Quantizer("iterations must be at least 1".into()));
    }
    let hist = Histogram::new(samples)?;
    let mut cb = Codebook::uniform(bits)?;
    let mut mse = hist.mse(&cb);
    let mut trace = vec![mse];
    let mut iterations = 0;

    while iterations < config.max_iterations && mse > 0.0 {
        let Some(next) = lloyd_step(&hist, &cb, config.significance)? else {
            break;
        };
        let next_mse = hist.mse(&next);
        if next_mse > mse {
            break;
        }
        iterations += 1;
        let rel = (mse - next_mse) / mse;
        cb = next;
        mse = next_mse;
        trace.push(mse);
        if rel < config.rel_tolerance {
            break;
        }
    }
    Ok(LloydTraining {
        codebook: cb,
        mse_trace: trace,
        iterations,
    })
}

fn lloyd_step(hist: &Histogram, cb: &Codebook, significance: f64) -> Result<Option<Codebook>> {
    let len = cb.levels.len();
    let mut stats = vec![CellStats::default(); len];
    for (x, c) in hist.present() {
        let j = cb.quantize(x) as usize;
        let off = centered(crate::mlkem::poly::sub_mod(x, cb.levels[j])) as f64;
        let s = &mut stats[j];
        s.n += c;
        s.sum += c as f64 * off;
        s.sum_sq += c as f64 * off * off;
    }

    let mut levels = cb.levels.clone();
    let mut taken: std::collections::HashSet<u16> = levels.iter().copied().collect();
    let mut moved = false;
    let mut empty = Vec::new();
    for (j, s) in stats.iter().enumerate() {
        if s.n == 0 {
            empty.push(j);
            continue;
        }
        let n = s.n as f64;
        let mean = s.sum / n;
        let var = (s.sum_sq / n - mean * mean).max(0.0);
        let se = (var / n).sqrt();
        if mean.abs() <= 0.5 + significance * se {
            continue;
        }
        let target = (levels[j] as i32 + mean.round() as i32).rem_euclid(Q as i32) as u16;
        if taken.contains(&target) {
            continue;
        }
        taken.remove(&levels[j]);
        taken.insert(target);
        levels[j] = target;
        moved = true;
    }

    if !empty.is_empty() {
        let current = Codebook {
            bits: cb.bits,
            boundaries: Vec::new(),
            levels: {
                let mut l = levels.clone();
                l.sort_unstable();
                l
            },
        };
        let mut worst: Vec<(u64, u16)> = hist
            .present()
            .map(|(x, _)| (centered_distance(x, current.levels[current.quantize(x) as usize]) as u64, x))
            .filter(|&(e, _)| e > 0)
            .collect();
        worst.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut candidates = worst.into_iter().map(|(_, x)| x);
        for j in empty {
            if let Some(x) = candidates.by_ref().find(|x| !taken.contains(x)) {
                taken.remove(&levels[j]);
                taken.insert(x);
                levels[j] = x;
                moved = true;
            }
        }
    }

    if !moved {
        return Ok(None);
    }
    Codebook::new(cb.bits, levels).map(Some)
}
