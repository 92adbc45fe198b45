//! Additive TLS 1.3 handshake payload model.
//!
//! A handshake's transport payload is split into a base term that depends
//! only on the key-exchange family and the authentication scheme, plus the
//! client and server keyshares. The base terms are calibrated from
//! observed totals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlkem::KemParams;

const X25519_SHARE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KexGroup {
    #[serde(rename = "X25519")]
    X25519,
    #[serde(rename = "MLKEM512")]
    MlKem512,
    #[serde(rename = "MLKEM768")]
    MlKem768,
    #[serde(rename = "MLKEM1024")]
    MlKem1024,
    #[serde(rename = "X25519MLKEM768")]
    X25519MlKem768,
}

/// Classical groups carry no KEM material; the two families have separate
/// base overheads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KexFamily {
    Classical,
    KemBearing,
}

impl KexGroup {
    pub const ALL: [KexGroup; 5] = [
        KexGroup::X25519,
        KexGroup::MlKem512,
        KexGroup::MlKem768,
        KexGroup::MlKem1024,
        KexGroup::X25519MlKem768,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KexGroup::X25519 => "X25519",
            KexGroup::MlKem512 => "MLKEM512",
            KexGroup::MlKem768 => "MLKEM768",
            KexGroup::MlKem1024 => "MLKEM1024",
            KexGroup::X25519MlKem768 => "X25519MLKEM768",
        }
    }

    pub fn family(self) -> KexFamily {
        match self {
            KexGroup::X25519 => KexFamily::Classical,
            _ => KexFamily::KemBearing,
        }
    }

    fn kem(self) -> Option<KemParams> {
        match self {
            KexGroup::X25519 => None,
            KexGroup::MlKem512 => Some(KemParams::ml_kem_512()),
            KexGroup::MlKem768 | KexGroup::X25519MlKem768 => Some(KemParams::ml_kem_768()),
            KexGroup::MlKem1024 => Some(KemParams::ml_kem_1024()),
        }
    }

    /// `(client, server)` keyshare bytes: an encapsulation key from the
    /// client, a ciphertext from the server, plus 32 bytes each way for an
    /// X25519 component.
    pub fn keyshare_bytes(self) -> (usize, usize) {
        let x = match self {
            KexGroup::X25519 | KexGroup::X25519MlKem768 => X25519_SHARE,
            _ => 0,
        };
        let (c, s) = self.kem().map_or((0, 0), |p| (p.encaps_key_len(), p.ciphertext_len()));
        (c + x, s + x)
    }

    pub fn kex_bytes(self) -> usize {
        let (c, s) = self.keyshare_bytes();
        c + s
    }
}

impl fmt::Display for KexGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

impl FromStr for KexGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = normalize(s);
        KexGroup::ALL
            .into_iter()
            .find(|g| g.name() == n)
            .ok_or_else(|| Error::input(format!("unknown key-exchange group '{s}'")))
    }
}

/// Look up `(client, server)` keyshare bytes by group name.
pub fn keyshare_bytes(group: &str) -> Result<(usize, usize)> {
    Ok(group.parse::<KexGroup>()?.keyshare_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AuthConfig {
    #[serde(rename = "RSA")]
    Rsa,
    #[serde(rename = "MLDSA44")]
    MlDsa44,
}

impl AuthConfig {
    pub const ALL: [AuthConfig; 2] = [AuthConfig::Rsa, AuthConfig::MlDsa44];

    pub fn name(self) -> &'static str {
        match self {
            AuthConfig::Rsa => "RSA",
            AuthConfig::MlDsa44 => "MLDSA44",
        }
    }

    /// Certificate chain plus signature bytes relative to RSA, as observed
    /// in the reference captures.
    pub fn auth_overhead_bytes(self) -> usize {
        match self {
            AuthConfig::Rsa => 0,
            AuthConfig::MlDsa44 => 5364,
        }
    }
}

impl fmt::Display for AuthConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AuthConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = normalize(s);
        AuthConfig::ALL
            .into_iter()
            .find(|a| a.name() == n)
            .ok_or_else(|| Error::input(format!("unknown authentication scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayloadBreakdown {
    pub kex: KexGroup,
    pub auth: AuthConfig,
    pub base_bytes: u64,
    pub kex_bytes: u64,
    pub total_bytes: u64,
}

/// One measured handshake total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub kex: KexGroup,
    pub auth: AuthConfig,
    pub total_bytes: u64,
}

/// The reference handshake totals, in table order.
pub const TABLE2: [Observation; 10] = {
    use AuthConfig::*;
    use KexGroup::*;
    const fn o(kex: KexGroup, auth: AuthConfig, total_bytes: u64) -> Observation {
        Observation { kex, auth, total_bytes }
    }
    [
        o(X25519, Rsa, 1893),
        o(X25519, MlDsa44, 7257),
        o(X25519MlKem768, Rsa, 4157),
        o(X25519MlKem768, MlDsa44, 9521),
        o(MlKem512, Rsa, 3389),
        o(MlKem512, MlDsa44, 8753),
        o(MlKem768, Rsa, 4093),
        o(MlKem768, MlDsa44, 9457),
        o(MlKem1024, Rsa, 4957),
        o(MlKem1024, MlDsa44, 10321),
    ]
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    pub family: KexFamily,
    pub auth: AuthConfig,
    /// Mean of `total - kex_bytes` over the cell's observations.
    pub base_bytes: f64,
    pub observations: usize,
    /// Max minus min of the per-observation bases.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub cells: Vec<CalibrationCell>,
}

impl Calibration {
    /// Calibration fitted to the reference totals.
    pub fn table2() -> Self {
        calibrate_base(&TABLE2).expect("reference dataset covers every cell")
    }

    /// Calibration from the two RSA bases and the per-scheme auth overheads.
    pub fn from_rsa_bases(kem_bearing: f64, classical: f64) -> Self {
        let mut cells = Vec::new();
        for (family, base) in [(KexFamily::Classical, classical), (KexFamily::KemBearing, kem_bearing)] {
            for auth in AuthConfig::ALL {
                cells.push(CalibrationCell {
                    family,
                    auth,
                    base_bytes: base + auth.auth_overhead_bytes() as f64,
                    observations: 0,
                    spread: 0.0,
                });
            }
        }
        Calibration { cells }
    }

    pub fn base(&self, family: KexFamily, auth: AuthConfig) -> Result<f64> {
        self.cells
            .iter()
            .find(|c| c.family == family && c.auth == auth)
            .map(|c| c.base_bytes)
            .ok_or_else(|| Error::Calibration(format!("no base for ({family:?}, {auth})")))
    }

    /// Largest within-cell disagreement.
    pub fn max_spread(&self) -> f64 {
        self.cells.iter().map(|c| c.spread).fold(0.0, f64::max)
    }
}

/// Fits one base per `(family, auth)` cell. Every cell must be observed.
pub fn calibrate_base(observed: &[Observation]) -> Result<Calibration> {
    if observed.is_empty() {
        return Err(Error::Calibration("no observations".into()));
    }
    let mut groups: BTreeMap<(KexFamily, AuthConfig), Vec<f64>> = BTreeMap::new();
    for o in observed {
        let base = o.total_bytes as f64 - o.kex.kex_bytes() as f64;
        groups.entry((o.kex.family(), o.auth)).or_default().push(base);
    }
    let mut cells = Vec::new();
    for family in [KexFamily::Classical, KexFamily::KemBearing] {
        for auth in AuthConfig::ALL {
            let bases = groups.get(&(family, auth)).ok_or_else(|| {
                Error::Calibration(format!("missing observation for cell ({family:?}, {auth})"))
            })?;
            let mean = bases.iter().sum::<f64>() / bases.len() as f64;
            let max = bases.iter().copied().fold(f64::MIN, f64::max);
            let min = bases.iter().copied().fold(f64::MAX, f64::min);
            cells.push(CalibrationCell {
                family,
                auth,
                base_bytes: mean,
                observations: bases.len(),
                spread: max - min,
            });
        }
    }
    Ok(Calibration { cells })
}

pub fn handshake_payload(kex: KexGroup, auth: AuthConfig, calibration: &Calibration) -> Result<PayloadBreakdown> {
    let base = calibration.base(kex.family(), auth)?.round();
    if base < 0.0 {
        return Err(Error::Calibration(format!("negative base {base} for ({kex}, {auth})")));
    }
    let base = base as u64;
    let kex_bytes = kex.kex_bytes() as u64;
    Ok(PayloadBreakdown {
        kex,
        auth,
        base_bytes: base,
        kex_bytes,
        total_bytes: base + kex_bytes,
    })
}

/// Model predictions for every reference configuration, in table order.
pub fn table2_report(calibration: &Calibration) -> Result<Vec<PayloadBreakdown>> {
    TABLE2
        .iter()
        .map(|o| handshake_payload(o.kex, o.auth, calibration))
        .collect()
}
