//! Ciphertext bit length and ciphertext expansion rate (CER).
//!
//! `B_ct = k * n * du + n * dv` and `CER = B_ct / K`, where `K` is the
//! number of encapsulated information bits (256 for ML-KEM).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlkem::params::{check_bits, N};

pub const DEFAULT_INFO_BITS: u64 = 256;

pub fn ciphertext_bits(k: usize, du: u8, dv: u8) -> Result<u64> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    check_bits("du", du)?;
    check_bits("dv", dv)?;
    Ok(k as u64 * N as u64 * du as u64 + N as u64 * dv as u64)
}

/// `B_ct / K` as a float. Use [`CerRecord`] when the exact ratio matters.
pub fn cer(k: usize, du: u8, dv: u8, info_bits: u64) -> Result<f64> {
    Ok(CerRecord::new("", k, du, dv, info_bits)?.cer)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CerConfig {
    pub label: String,
    pub k: usize,
    pub du: u8,
    pub dv: u8,
    #[serde(default = "default_info_bits")]
    pub info_bits: u64,
}

fn default_info_bits() -> u64 {
    DEFAULT_INFO_BITS
}

impl CerConfig {
    pub fn new(label: impl Into<String>, k: usize, du: u8, dv: u8) -> Self {
        CerConfig {
            label: label.into(),
            k,
            du,
            dv,
            info_bits: DEFAULT_INFO_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CerRecord {
    pub label: String,
    pub k: usize,
    pub du: u8,
    pub dv: u8,
    #[serde(rename = "B_ct_bits")]
    pub ciphertext_bits: u64,
    #[serde(rename = "K_bits")]
    pub info_bits: u64,
    #[serde(rename = "CER")]
    pub cer: f64,
}

impl CerRecord {
    pub fn new(label: impl Into<String>, k: usize, du: u8, dv: u8, info_bits: u64) -> Result<Self> {
        if info_bits == 0 {
            return Err(Error::param("K must be positive"));
        }
        let bits = ciphertext_bits(k, du, dv)?;
        Ok(CerRecord {
            label: label.into(),
            k,
            du,
            dv,
            ciphertext_bits: bits,
            info_bits,
            cer: bits as f64 / info_bits as f64,
        })
    }

    /// CER in tenths, rounded half-up with integer arithmetic.
    pub fn cer_tenths(&self) -> u64 {
        (20 * self.ciphertext_bits + self.info_bits) / (2 * self.info_bits)
    }

    /// CER with one decimal, e.g. `"36.0"`.
    pub fn cer_display(&self) -> String {
        let t = self.cer_tenths();
        format!("{}.{}", t / 10, t % 10)
    }
}

pub fn cer_table(configs: &[CerConfig]) -> Result<Vec<CerRecord>> {
    if configs.is_empty() {
        return Err(Error::param("empty configuration list"));
    }
    configs
        .iter()
        .enumerate()
        .map(|(index, c)| {
            CerRecord::new(c.label.clone(), c.k, c.du, c.dv, c.info_bits).map_err(|e| Error::Row {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// The six ML-KEM configurations: lossless `(12, 12)` encoding for each
/// rank, then the FIPS 203 uniform compression settings.
pub fn standard_table_configs() -> Vec<CerConfig> {
    vec![
        CerConfig::new("ML-KEM-512", 2, 12, 12),
        CerConfig::new("ML-KEM-768", 3, 12, 12),
        CerConfig::new("ML-KEM-1024", 4, 12, 12),
        CerConfig::new("ML-KEM-512 (uniform comp.)", 2, 10, 4),
        CerConfig::new("ML-KEM-768 (uniform comp.)", 3, 10, 4),
        CerConfig::new("ML-KEM-1024 (uniform comp.)", 4, 11, 5),
    ]
}

pub fn standard_table() -> Vec<CerRecord> {
    cer_table(&standard_table_configs()).expect("built-in configurations are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlkem::{encaps, keygen, KemParams};
    use proptest::prelude::*;

    #[test]
    fn bit_lengths() {
        assert_eq!(ciphertext_bits(2, 12, 12).unwrap(), 9216);
        assert_eq!(ciphertext_bits(3, 10, 4).unwrap(), 8704);
        assert!(ciphertext_bits(1, 0, 4).is_err());
        assert!(ciphertext_bits(0, 10, 4).is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(cer(2, 12, 12, 256).unwrap(), 36.0);
        assert_eq!(cer(3, 10, 4, 256).unwrap(), 34.0);
        assert_eq!(cer(4, 11, 5, 256).unwrap(), 49.0);
        assert!(cer(2, 10, 4, 0).is_err());
        assert_eq!(CerRecord::new("x", 2, 10, 4, 300).unwrap().cer_display(), "20.5");
    }

    #[test]
    fn table_values() {
        let tenths: Vec<u64> = standard_table().iter().map(CerRecord::cer_tenths).collect();
        assert_eq!(tenths, vec![360, 480, 600, 240, 340, 490]);
        assert!(cer_table(&[]).is_err());
        let single = cer_table(&[CerConfig::new("ML-KEM-512 (uniform comp.)", 2, 10, 4)]).unwrap();
        assert_eq!(single[0].cer_display(), "24.0");
    }

    #[test]
    fn row_errors_carry_index() {
        let rows = [CerConfig::new("ok", 2, 10, 4), CerConfig::new("bad", 2, 13, 4)];
        assert!(matches!(cer_table(&rows), Err(Error::Row { index: 1, .. })));
    }

    #[test]
    fn semi_compressed_row() {
        assert_eq!(CerRecord::new("semi", 2, 10, 12, 256).unwrap().cer, 32.0);
    }

    #[test]
    fn matches_encoded_ciphertext_length() {
        let mut presets = KemParams::standard().to_vec();
        for k in 2..=4 {
            presets.push(KemParams::uncompressed(k).unwrap());
        }
        for p in presets {
            let kp = keygen(&p, &[0u8; 64]).unwrap();
            let (ct, _) = encaps(&p, &kp.encaps_key, &[0u8; 32]).unwrap();
            assert_eq!(ciphertext_bits(p.k, p.du, p.dv).unwrap(), ct.bit_len());
        }
    }

    proptest! {
        #[test]
        fn strictly_increasing_in_each_argument(k in 1usize..4, du in 1u8..12, dv in 1u8..12) {
            let base = cer(k, du, dv, 256).unwrap();
            prop_assert!(cer(k + 1, du, dv, 256).unwrap() > base);
            prop_assert!(cer(k, du + 1, dv, 256).unwrap() > base);
            prop_assert!(cer(k, du, dv + 1, 256).unwrap() > base);
        }
    }
}
