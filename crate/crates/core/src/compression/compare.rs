//! Side-by-side comparison of quantizer strategies: expansion rate,
//! held-out reconstruction error and decryption failure rate.

use serde::{Deserialize, Serialize};

use super::codebook::{mse_of, train_lloyd_max_with, LloydConfig, MAX_CODEBOOK_BITS};
use super::dfr::{derive_seed, estimate_dfr, harvest_coefficients, Harvest};
use super::quantizer::{Component, QuantizerKind, QuantizerSpec, VCodec};
use crate::cer::{CerRecord, DEFAULT_INFO_BITS};
use crate::error::{Error, Result};
use crate::mlkem::KemParams;

const TRAIN_TAG: u64 = 1;
const HELD_OUT_TAG: u64 = 2;
const DFR_TAG: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub trials: u64,
    pub seed: u64,
    /// Encapsulations harvested for training, and again for the held-out set.
    pub harvest_encapsulations: u64,
    pub lloyd: LloydConfig,
}

impl CompareConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        CompareConfig {
            trials,
            seed,
            harvest_encapsulations: 1000,
            lloyd: LloydConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub params: String,
    pub k: usize,
    pub quantizer: QuantizerKind,
    pub du: u8,
    pub dv: u8,
    pub cer: f64,
    /// Mean squared centered error per coefficient over held-out `u` and
    /// `v` coefficients together.
    pub mse: f64,
    pub mse_u: f64,
    pub mse_v: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// Quantizers evaluated, in row order (Lloyd-Max entries carry their
    /// trained codebooks).
    #[serde(skip)]
    pub quantizers: Vec<QuantizerSpec>,
}

/// Compares uniform, Lloyd-Max and semi-compressed quantizers for every
/// `(du, dv)` pair, with default harvesting and training settings.
pub fn compare_quantizers(params: &KemParams, d_pairs: &[(u8, u8)], trials: u64, seed: u64) -> Result<ComparisonReport> {
    compare_quantizers_with(params, d_pairs, CompareConfig::new(trials, seed))
}

/// Rows are sorted by CER (stable, so quantizer order within a CER is
/// uniform, Lloyd-Max, semi-compressed). Lloyd-Max codebooks are trained on
/// one harvest and scored on an independent one. A Lloyd-Max row is
/// produced only when `du` fits a codebook (at most 11 bits); `v` gets its
/// own codebook under the same condition and stays uniform otherwise.
pub fn compare_quantizers_with(params: &KemParams, d_pairs: &[(u8, u8)], config: CompareConfig) -> Result<ComparisonReport> {
    if d_pairs.is_empty() {
        return Err(Error::param("no (du, dv) pairs given"));
    }
    params.validate()?;
    let mut specs: Vec<QuantizerSpec> = Vec::new();
    for (i, &(du, dv)) in d_pairs.iter().enumerate() {
        QuantizerSpec::uniform(du, dv).map_err(|e| Error::Row {
            index: i,
            source: Box::new(e),
        })?;
    }

    let train = harvest_coefficients(params, config.harvest_encapsulations, derive_seed(config.seed, TRAIN_TAG))?;
    let held_out = harvest_coefficients(params, config.harvest_encapsulations, derive_seed(config.seed, HELD_OUT_TAG))?;

    let mut semi_seen = Vec::new();
    for &(du, dv) in d_pairs {
        specs.push(QuantizerSpec::uniform(du, dv)?);
        if du <= MAX_CODEBOOK_BITS {
            // Same training set as `build_quantizer` with this seed.
            let u_cb = train_lloyd_max_with(du, &train.u, config.lloyd)?.codebook;
            let v = if dv <= MAX_CODEBOOK_BITS {
                VCodec::Codebook(train_lloyd_max_with(dv, &train.v, config.lloyd)?.codebook)
            } else {
                VCodec::Uniform(dv)
            };
            specs.push(QuantizerSpec::lloyd_max(u_cb, v)?);
        }
        if !semi_seen.contains(&du) {
            semi_seen.push(du);
            specs.push(QuantizerSpec::semi_compressed(du)?);
        }
    }

    let dfr_seed = derive_seed(config.seed, DFR_TAG);
    let mut rows = Vec::with_capacity(specs.len());
    for spec in &specs {
        let cer = CerRecord::new("", params.k, spec.du, spec.dv, DEFAULT_INFO_BITS)?.cer;
        let (mse, mse_u, mse_v) = held_out_mse(spec, &held_out)?;
        let est = estimate_dfr(params, spec, config.trials, dfr_seed)?;
        rows.push(ComparisonRow {
            params: params.label.clone(),
            k: params.k,
            quantizer: spec.kind,
            du: spec.du,
            dv: spec.dv,
            cer,
            mse,
            mse_u,
            mse_v,
            trials: est.trials,
            failures: est.failures,
            rate: est.rate,
            ci95_low: est.ci95_low,
            ci95_high: est.ci95_high,
            seed: config.seed,
        });
    }

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].cer.total_cmp(&rows[b].cer));
    Ok(ComparisonReport {
        rows: order.iter().map(|&i| rows[i].clone()).collect(),
        quantizers: order.iter().map(|&i| specs[i].clone()).collect(),
    })
}

/// Builds a quantizer of the given kind. Lloyd-Max codebooks are trained on
/// `harvest_encapsulations` encapsulations at `params`, seeded from `seed`
/// the same way [`compare_quantizers`] seeds its training set. `dv` must be
/// 12 (or omitted) for the semi-compressed kind.
pub fn build_quantizer(
    kind: QuantizerKind,
    params: &KemParams,
    du: u8,
    dv: Option<u8>,
    harvest_encapsulations: u64,
    lloyd: LloydConfig,
    seed: u64,
) -> Result<QuantizerSpec> {
    match kind {
        QuantizerKind::Uniform => QuantizerSpec::uniform(du, dv.unwrap_or(params.dv)),
        QuantizerKind::SemiCompressed => match dv {
            Some(dv) if dv != crate::mlkem::params::LOSSLESS_BITS => {
                Err(Error::Quantizer(format!("semi_compressed sends v losslessly; dv={dv} given")))
            }
            _ => QuantizerSpec::semi_compressed(du),
        },
        QuantizerKind::LloydMax => {
            let dv = dv.unwrap_or(params.dv);
            crate::mlkem::params::check_bits("dv", dv)?;
            super::codebook::check_codebook_bits(du)?;
            let train = harvest_coefficients(params, harvest_encapsulations, derive_seed(seed, TRAIN_TAG))?;
            let u = train_lloyd_max_with(du, &train.u, lloyd)?.codebook;
            let v = if dv <= MAX_CODEBOOK_BITS {
                VCodec::Codebook(train_lloyd_max_with(dv, &train.v, lloyd)?.codebook)
            } else {
                VCodec::Uniform(dv)
            };
            QuantizerSpec::lloyd_max(u, v)
        }
    }
}

/// Held-out `(pooled, u, v)` mean squared centered reconstruction error.
pub fn held_out_mse(spec: &QuantizerSpec, samples: &Harvest) -> Result<(f64, f64, f64)> {
    let codecs = spec.codecs()?;
    let c = codecs.as_codecs();
    let mse_u = mse_of(samples.component(Component::U), |x| c.u.decode(c.u.encode(x)));
    let mse_v = mse_of(samples.component(Component::V), |x| c.v.decode(c.v.encode(x)));
    let (nu, nv) = (samples.u.len() as f64, samples.v.len() as f64);
    let pooled = if nu + nv > 0.0 {
        (mse_u * nu + mse_v * nv) / (nu + nv)
    } else {
        0.0
    };
    Ok((pooled, mse_u, mse_v))
}
