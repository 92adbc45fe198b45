//! Monte-Carlo decryption-failure-rate estimation and coefficient
//! harvesting from real encapsulations.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::codebook::SampleSource;
use super::quantizer::{Component, QuantizerSpec};
use crate::error::{Error, Result};
use crate::mlkem::{decaps_with_codecs, encaps_raw, encaps_with_codecs, keygen, KemParams};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Serialize)]
pub struct DfrEstimate {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// The parameter set with `du`/`dv` set to the quantizer's widths.
    pub params: KemParams,
    pub quantizer: QuantizerSpec,
    pub seed: u64,
}

impl DfrEstimate {
    pub fn ci95(&self) -> (f64, f64) {
        (self.ci95_low, self.ci95_high)
    }
}

/// Wilson score interval at 95% confidence; with zero failures the upper
/// end is the rule-of-three bound `3 / trials`.
pub fn confidence_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    if failures == 0 {
        return (0.0, (3.0 / n).min(1.0));
    }
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Deterministic per-trial generator: trial `i` always reads stream `i` of
/// the ChaCha20 key derived from `seed`, independent of scheduling.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Derives an independent sub-seed for a named purpose.
pub(crate) fn derive_seed(seed: u64, tag: u64) -> u64 {
    trial_rng(seed, u64::MAX - tag).next_u64()
}

fn par_count<F>(n: u64, f: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| f(i).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(|i| f(i).map(u64::from)).sum()
    }
}

/// Runs `trials` keygen/encaps/decaps cycles with `quantizer` in place of
/// the ciphertext compression step and counts shared-secret mismatches.
pub fn estimate_dfr(params: &KemParams, quantizer: &QuantizerSpec, trials: u64, seed: u64) -> Result<DfrEstimate> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    params.validate()?;
    let codecs = quantizer.codecs()?;
    let effective = params.with_compression(quantizer.du, quantizer.dv)?;

    let failures = par_count(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let mut kseed = [0u8; 64];
        let mut eseed = [0u8; 32];
        rng.fill_bytes(&mut kseed);
        rng.fill_bytes(&mut eseed);
        let kp = keygen(params, &kseed)?;
        let (ct, ss) = encaps_with_codecs(params, &kp.encaps_key, &eseed, codecs.as_codecs())?;
        let recovered = decaps_with_codecs(params, &kp.decaps_key, &ct, codecs.as_codecs())?;
        Ok(recovered != ss)
    })?;

    let (lo, hi) = confidence_interval(failures, trials);
    Ok(DfrEstimate {
        trials,
        failures,
        rate: failures as f64 / trials as f64,
        ci95_low: lo,
        ci95_high: hi,
        params: effective,
        quantizer: quantizer.clone(),
        seed,
    })
}

/// Pre-compression coefficients collected from encapsulations.
#[derive(Debug, Clone, Default)]
pub struct Harvest {
    pub u: Vec<u16>,
    pub v: Vec<u16>,
}

impl Harvest {
    pub fn component(&self, c: Component) -> &[u16] {
        match c {
            Component::U => &self.u,
            Component::V => &self.v,
        }
    }
}

/// Runs `encapsulations` fresh keygen + encaps cycles and records every
/// coefficient of `u` and `v` before compression.
pub fn harvest_coefficients(params: &KemParams, encapsulations: u64, seed: u64) -> Result<Harvest> {
    if encapsulations == 0 {
        return Err(Error::param("encapsulations must be at least 1"));
    }
    params.validate()?;
    let one = |i: u64| -> Result<Harvest> {
        let mut rng = trial_rng(seed, i);
        let mut kseed = [0u8; 64];
        let mut eseed = [0u8; 32];
        rng.fill_bytes(&mut kseed);
        rng.fill_bytes(&mut eseed);
        let kp = keygen(params, &kseed)?;
        let raw = encaps_raw(params, &kp.encaps_key, &eseed)?;
        Ok(Harvest {
            u: raw.u.iter().flat_map(|p| p.coeffs().iter().copied()).collect(),
            v: raw.v.coeffs().to_vec(),
        })
    };
    let merge = |mut a: Harvest, b: Harvest| {
        a.u.extend(b.u);
        a.v.extend(b.v);
        a
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let parts: Vec<Harvest> = (0..encapsulations).into_par_iter().map(one).collect::<Result<_>>()?;
        Ok(parts.into_iter().fold(Harvest::default(), merge))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..encapsulations).try_fold(Harvest::default(), |acc, i| Ok(merge(acc, one(i)?)))
    }
}

/// A [`SampleSource`] that harvests one ciphertext component from real
/// encapsulations at the given parameters.
#[derive(Debug, Clone)]
pub struct HarvestSource {
    pub params: KemParams,
    pub encapsulations: u64,
    pub component: Component,
}

impl SampleSource for HarvestSource {
    fn samples(&self, seed: u64) -> Result<Vec<u16>> {
        let h = harvest_coefficients(&self.params, self.encapsulations, seed)?;
        Ok(match self.component {
            Component::U => h.u,
            Component::V => h.v,
        })
    }
}
