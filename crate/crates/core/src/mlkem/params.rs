//! ML-KEM parameter sets.
//!
//! The ring is fixed (`n = 256`, `q = 3329`); a parameter set chooses the
//! module rank, the two noise widths and the two ciphertext compression
//! widths. Compression widths are free knobs in `1..=12` so that
//! off-standard settings can be exercised; `d = 12` is lossless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ring degree.
pub const N: usize = 256;
/// Coefficient modulus.
pub const Q: u16 = 3329;
/// Width of a lossless coefficient encoding.
pub const LOSSLESS_BITS: u8 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KemParams {
    pub label: String,
    pub k: usize,
    pub eta1: usize,
    pub eta2: usize,
    pub du: u8,
    pub dv: u8,
}

impl KemParams {
    /// Builds and validates a parameter set. Only ranges are enforced here;
    /// use [`KemParams::validate_strict`] to require a FIPS 203 set.
    pub fn new(label: impl Into<String>, k: usize, eta1: usize, eta2: usize, du: u8, dv: u8) -> Result<Self> {
        let p = KemParams {
            label: label.into(),
            k,
            eta1,
            eta2,
            du,
            dv,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn ml_kem_512() -> Self {
        Self::preset("ML-KEM-512", 2, 3, 2, 10, 4)
    }

    pub fn ml_kem_768() -> Self {
        Self::preset("ML-KEM-768", 3, 2, 2, 10, 4)
    }

    pub fn ml_kem_1024() -> Self {
        Self::preset("ML-KEM-1024", 4, 2, 2, 11, 5)
    }

    /// The three FIPS 203 parameter sets, in increasing security order.
    pub fn standard() -> [Self; 3] {
        [Self::ml_kem_512(), Self::ml_kem_768(), Self::ml_kem_1024()]
    }

    /// Same rank and noise as the standard set of rank `k`, but with
    /// lossless `(12, 12)` ciphertext encoding.
    pub fn uncompressed(k: usize) -> Result<Self> {
        let base = Self::standard_for_rank(k)?;
        Ok(Self {
            label: format!("{}-uncompressed", base.label),
            du: LOSSLESS_BITS,
            dv: LOSSLESS_BITS,
            ..base
        })
    }

    pub fn standard_for_rank(k: usize) -> Result<Self> {
        match k {
            2 => Ok(Self::ml_kem_512()),
            3 => Ok(Self::ml_kem_768()),
            4 => Ok(Self::ml_kem_1024()),
            _ => Err(Error::param(format!("no standard parameter set with k = {k}"))),
        }
    }

    /// Looks up a preset by name (`ML-KEM-768`, `mlkem768`, `768`, ...).
    pub fn by_name(name: &str) -> Result<Self> {
        let norm: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let (digits, uncompressed) = match norm.strip_suffix("uncompressed") {
            Some(rest) => (rest.trim_start_matches("mlkem").to_string(), true),
            None => (norm.trim_start_matches("mlkem").to_string(), false),
        };
        let k = match digits.as_str() {
            "512" => 2,
            "768" => 3,
            "1024" => 4,
            _ => return Err(Error::param(format!("unknown parameter set '{name}'"))),
        };
        if uncompressed {
            Self::uncompressed(k)
        } else {
            Self::standard_for_rank(k)
        }
    }

    /// Same parameter set with different compression widths.
    pub fn with_compression(&self, du: u8, dv: u8) -> Result<Self> {
        let label = if self.is_fips() && (du, dv) != (self.du, self.dv) {
            format!("{}(du={du},dv={dv})", self.label)
        } else {
            self.label.clone()
        };
        Self::new(label, self.k, self.eta1, self.eta2, du, dv)
    }

    fn preset(label: &str, k: usize, eta1: usize, eta2: usize, du: u8, dv: u8) -> Self {
        KemParams {
            label: label.to_string(),
            k,
            eta1,
            eta2,
            du,
            dv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.k) {
            return Err(Error::param(format!("k = {} outside 1..=4", self.k)));
        }
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(1..=3).contains(&eta) {
                return Err(Error::param(format!("{name} = {eta} outside 1..=3")));
            }
        }
        check_bits("du", self.du)?;
        check_bits("dv", self.dv)?;
        Ok(())
    }

    /// Rejects anything that is not one of the three FIPS 203 sets.
    pub fn validate_strict(&self) -> Result<()> {
        self.validate()?;
        if self.is_fips() {
            Ok(())
        } else {
            Err(Error::param(format!(
                "(k={}, eta1={}, eta2={}, du={}, dv={}) is not a FIPS 203 parameter set",
                self.k, self.eta1, self.eta2, self.du, self.dv
            )))
        }
    }

    pub fn is_fips(&self) -> bool {
        Self::standard()
            .iter()
            .any(|s| (s.k, s.eta1, s.eta2, s.du, s.dv) == (self.k, self.eta1, self.eta2, self.du, self.dv))
    }

    pub fn encaps_key_len(&self) -> usize {
        384 * self.k + 32
    }

    pub fn decaps_key_len(&self) -> usize {
        768 * self.k + 96
    }

    pub fn ciphertext_len(&self) -> usize {
        32 * (self.k * self.du as usize + self.dv as usize)
    }
}

pub(crate) fn check_bits(name: &str, d: u8) -> Result<()> {
    if (1..=LOSSLESS_BITS).contains(&d) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {d} outside 1..=12")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_and_ciphertext_lengths() {
        let p512 = KemParams::ml_kem_512();
        assert_eq!(p512.encaps_key_len(), 800);
        assert_eq!(p512.decaps_key_len(), 1632);
        assert_eq!(p512.ciphertext_len(), 768);
        assert_eq!(KemParams::ml_kem_768().ciphertext_len(), 1088);
        assert_eq!(KemParams::ml_kem_1024().encaps_key_len(), 1568);
        assert_eq!(KemParams::ml_kem_1024().ciphertext_len(), 1568);
        assert_eq!(KemParams::uncompressed(2).unwrap().ciphertext_len(), 1152);
    }

    #[test]
    fn range_validation() {
        assert!(KemParams::new("x", 0, 2, 2, 10, 4).is_err());
        assert!(KemParams::new("x", 5, 2, 2, 10, 4).is_err());
        assert!(KemParams::new("x", 2, 2, 2, 0, 4).is_err());
        assert!(KemParams::new("x", 2, 2, 2, 10, 13).is_err());
        assert!(KemParams::new("x", 1, 2, 2, 12, 12).is_ok());
    }

    #[test]
    fn strict_mode_rejects_off_standard_sets() {
        assert!(KemParams::ml_kem_768().validate_strict().is_ok());
        let off = KemParams::ml_kem_768().with_compression(6, 4).unwrap();
        assert!(off.validate().is_ok());
        assert!(off.validate_strict().is_err());
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(KemParams::by_name("ML-KEM-768").unwrap(), KemParams::ml_kem_768());
        assert_eq!(KemParams::by_name("mlkem1024").unwrap().k, 4);
        assert_eq!(KemParams::by_name("ML-KEM-512-uncompressed").unwrap().du, 12);
        assert!(KemParams::by_name("ML-KEM-2048").is_err());
    }
}
