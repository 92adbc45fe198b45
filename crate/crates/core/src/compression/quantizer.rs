//! Quantizer strategies for the ciphertext compression step.

use serde::{Deserialize, Serialize};

use super::codebook::Codebook;
use crate::error::{Error, Result};
use crate::mlkem::compress::{compress, decompress};
use crate::mlkem::params::{check_bits, LOSSLESS_BITS};
use crate::mlkem::pke::{CiphertextCodecs, CoefficientCodec, UniformCodec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizerKind {
    Uniform,
    LloydMax,
    SemiCompressed,
}

impl QuantizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuantizerKind::Uniform => "uniform",
            QuantizerKind::LloydMax => "lloyd_max",
            QuantizerKind::SemiCompressed => "semi_compressed",
        }
    }
}

impl std::fmt::Display for QuantizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for QuantizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform" => Ok(QuantizerKind::Uniform),
            "lloyd_max" | "lloyd" => Ok(QuantizerKind::LloydMax),
            "semi_compressed" | "semi" => Ok(QuantizerKind::SemiCompressed),
            other => Err(Error::Quantizer(format!("unknown quantizer kind '{other}'"))),
        }
    }
}

/// Which ciphertext component a coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    U,
    V,
}

/// How the `u` and `v` components of a ciphertext are quantized.
///
/// A Lloyd-Max spec carries a trained codebook for `u`; the `v` codebook is
/// optional and `v` falls back to uniform compression without one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub kind: QuantizerKind,
    pub du: u8,
    pub dv: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_codebook: Option<Codebook>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_codebook: Option<Codebook>,
}

impl QuantizerSpec {
    pub fn uniform(du: u8, dv: u8) -> Result<Self> {
        let spec = QuantizerSpec {
            kind: QuantizerKind::Uniform,
            du,
            dv,
            u_codebook: None,
            v_codebook: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Compresses `u` only; `v` is sent losslessly.
    pub fn semi_compressed(du: u8) -> Result<Self> {
        let spec = QuantizerSpec {
            kind: QuantizerKind::SemiCompressed,
            du,
            dv: LOSSLESS_BITS,
            u_codebook: None,
            v_codebook: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Lloyd-Max codebook on `u`, and on `v` when given; otherwise `v` uses
    /// uniform compression at width `dv`.
    pub fn lloyd_max(u_codebook: Codebook, v: VCodec) -> Result<Self> {
        let (dv, v_codebook) = match v {
            VCodec::Uniform(dv) => (dv, None),
            VCodec::Codebook(cb) => (cb.bits(), Some(cb)),
        };
        let spec = QuantizerSpec {
            kind: QuantizerKind::LloydMax,
            du: u_codebook.bits(),
            dv,
            u_codebook: Some(u_codebook),
            v_codebook,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_bits("du", self.du).map_err(|e| Error::Quantizer(e.to_string()))?;
        check_bits("dv", self.dv).map_err(|e| Error::Quantizer(e.to_string()))?;
        let check_cb = |cb: &Option<Codebook>, d: u8, name: &str| -> Result<()> {
            match cb {
                Some(cb) if cb.levels().len() != 1usize << d => Err(Error::Quantizer(format!(
                    "{name} codebook has {} levels, expected 2^{d}",
                    cb.levels().len()
                ))),
                _ => Ok(()),
            }
        };
        match self.kind {
            QuantizerKind::Uniform | QuantizerKind::SemiCompressed => {
                if self.u_codebook.is_some() || self.v_codebook.is_some() {
                    return Err(Error::Quantizer(format!("{} quantizer takes no codebook", self.kind)));
                }
                if self.kind == QuantizerKind::SemiCompressed && self.dv != LOSSLESS_BITS {
                    return Err(Error::Quantizer("semi_compressed requires dv = 12".into()));
                }
            }
            QuantizerKind::LloydMax => {
                if self.u_codebook.is_none() {
                    return Err(Error::Quantizer("lloyd_max requires a u codebook".into()));
                }
                check_cb(&self.u_codebook, self.du, "u")?;
                check_cb(&self.v_codebook, self.dv, "v")?;
            }
        }
        Ok(())
    }

    /// Coefficient codecs implementing this spec.
    pub fn codecs(&self) -> Result<QuantizerCodecs> {
        self.validate()?;
        let pick = |cb: &Option<Codebook>, d: u8| -> Box<dyn CoefficientCodec> {
            match cb {
                Some(cb) => Box::new(cb.clone()),
                None => Box::new(UniformCodec(d)),
            }
        };
        Ok(QuantizerCodecs {
            u: pick(&self.u_codebook, self.du),
            v: pick(&self.v_codebook, self.dv),
        })
    }

    fn component(&self, c: Component) -> (u8, Option<&Codebook>) {
        match c {
            Component::U => (self.du, self.u_codebook.as_ref()),
            Component::V => (self.dv, self.v_codebook.as_ref()),
        }
    }

    pub fn quantize(&self, x: u16, component: Component) -> Result<u16> {
        if x >= crate::Q {
            return Err(Error::input(format!("coefficient {x} outside [0, q)")));
        }
        Ok(match self.component(component) {
            (_, Some(cb)) => cb.quantize(x),
            (d, None) => compress(x, d),
        })
    }

    pub fn dequantize(&self, index: u16, component: Component) -> Result<u16> {
        match self.component(component) {
            (_, Some(cb)) => cb.dequantize(index),
            (d, None) if (index as u32) < 1u32 << d => Ok(decompress(index, d)),
            (d, None) => Err(Error::Quantizer(format!("index {index} out of range for {d}-bit quantizer"))),
        }
    }

    pub fn label(&self) -> String {
        format!("{}({},{})", self.kind, self.du, self.dv)
    }
}

/// The `v` half of a Lloyd-Max spec.
#[derive(Debug, Clone)]
pub enum VCodec {
    Uniform(u8),
    Codebook(Codebook),
}

/// Owned codecs for a [`QuantizerSpec`].
pub struct QuantizerCodecs {
    u: Box<dyn CoefficientCodec>,
    v: Box<dyn CoefficientCodec>,
}

impl QuantizerCodecs {
    pub fn as_codecs(&self) -> CiphertextCodecs<'_> {
        CiphertextCodecs {
            u: self.u.as_ref(),
            v: self.v.as_ref(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn uniform_delegates_to_compress() {
        let spec = QuantizerSpec::uniform(4, 10).unwrap();
        for x in 0..Q {
            assert_eq!(spec.quantize(x, Component::U).unwrap(), compress(x, 4));
            assert_eq!(spec.quantize(x, Component::V).unwrap(), compress(x, 10));
        }
        for i in 0..16 {
            assert_eq!(spec.dequantize(i, Component::U).unwrap(), decompress(i, 4));
        }
        assert!(spec.dequantize(16, Component::U).is_err());
    }

    #[test]
    fn lloyd_nearest_level() {
        let cb = Codebook::new(1, vec![0, Q / 2]).unwrap();
        let spec = QuantizerSpec::lloyd_max(cb, VCodec::Uniform(4)).unwrap();
        assert_eq!(spec.quantize(100, Component::U).unwrap(), 0);
        assert_eq!(spec.quantize(Q - 1, Component::U).unwrap(), 0);
        assert_eq!(spec.dequantize(1, Component::U).unwrap(), Q / 2);
        assert!(spec.dequantize(2, Component::U).is_err());
        assert_eq!(spec.du, 1);
        assert_eq!(spec.dv, 4);
    }

    #[test]
    fn invalid_specs() {
        assert!(QuantizerSpec::uniform(0, 4).is_err());
        assert!(QuantizerSpec::uniform(10, 13).is_err());
        let semi = QuantizerSpec::semi_compressed(10).unwrap();
        assert_eq!(semi.dv, 12);
        let mut bad = semi.clone();
        bad.dv = 4;
        assert!(bad.validate().is_err());
        let mut bad = QuantizerSpec::uniform(10, 4).unwrap();
        bad.kind = QuantizerKind::LloydMax;
        assert!(bad.validate().is_err());
        bad.u_codebook = Some(Codebook::uniform(4).unwrap());
        assert!(bad.validate().is_err(), "4-bit codebook with du=10");
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("lloyd-max".parse::<QuantizerKind>().unwrap(), QuantizerKind::LloydMax);
        assert_eq!("semi_compressed".parse::<QuantizerKind>().unwrap(), QuantizerKind::SemiCompressed);
        assert!("vq".parse::<QuantizerKind>().is_err());
    }
}
