//! ML-KEM key generation, encapsulation and decapsulation (the FO transform
//! with implicit rejection over K-PKE).
//!
//! Randomness is always supplied by the caller: a 64-byte seed `d || z` for
//! key generation and a 32-byte message seed for encapsulation.

use serde::{Deserialize, Serialize};

use super::encode::is_reduced_12;
use super::hash;
use super::params::KemParams;
use super::pke::{self, CiphertextCodecs, RawCiphertext, UniformCodec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPair {
    #[serde(with = "hex")]
    pub encaps_key: Vec<u8>,
    #[serde(with = "hex")]
    pub decaps_key: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext(#[serde(with = "hex")] pub Vec<u8>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SharedSecret(#[serde(with = "hex")] pub [u8; 32]);

impl Ciphertext {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn bit_len(&self) -> u64 {
        8 * self.0.len() as u64
    }
}

impl AsRef<[u8]> for Ciphertext {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl SharedSecret {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

fn seed_array<const L: usize>(seed: &[u8], what: &str) -> Result<[u8; L]> {
    seed.try_into()
        .map_err(|_| Error::input(format!("{what} must be {L} bytes, got {}", seed.len())))
}

fn check_len(got: usize, want: usize, what: &str) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::input(format!("{what} has {got} bytes, expected {want}")))
    }
}

pub(crate) fn uniform_codecs(params: &KemParams) -> (UniformCodec, UniformCodec) {
    (UniformCodec(params.du), UniformCodec(params.dv))
}

/// Deterministic key generation from `seed = d || z`.
pub fn keygen(params: &KemParams, seed: &[u8]) -> Result<KeyPair> {
    params.validate()?;
    let seed: [u8; 64] = seed_array(seed, "key generation seed")?;
    let mut d = [0u8; 32];
    let mut z = [0u8; 32];
    d.copy_from_slice(&seed[..32]);
    z.copy_from_slice(&seed[32..]);
    let keys = pke::keygen(params, &d);

    let mut dk = Vec::with_capacity(params.decaps_key_len());
    dk.extend_from_slice(&keys.dk);
    dk.extend_from_slice(&keys.ek);
    dk.extend_from_slice(&hash::h(&keys.ek));
    dk.extend_from_slice(&z);
    Ok(KeyPair {
        encaps_key: keys.ek,
        decaps_key: dk,
    })
}

fn check_encaps_key(params: &KemParams, ek: &[u8]) -> Result<()> {
    params.validate()?;
    check_len(ek.len(), params.encaps_key_len(), "encapsulation key")?;
    if !is_reduced_12(&ek[..384 * params.k]) {
        return Err(Error::input("encapsulation key contains unreduced coefficients"));
    }
    Ok(())
}

/// Encapsulation with the parameter set's uniform compression.
pub fn encaps(params: &KemParams, ek: &[u8], seed: &[u8]) -> Result<(Ciphertext, SharedSecret)> {
    let (u, v) = uniform_codecs(params);
    encaps_with_codecs(params, ek, seed, CiphertextCodecs { u: &u, v: &v })
}

/// Encapsulation with arbitrary ciphertext quantizers.
pub fn encaps_with_codecs(
    params: &KemParams,
    ek: &[u8],
    seed: &[u8],
    codecs: CiphertextCodecs<'_>,
) -> Result<(Ciphertext, SharedSecret)> {
    check_encaps_key(params, ek)?;
    let m: [u8; 32] = seed_array(seed, "encapsulation seed")?;
    let (key, r) = hash::g(&[&m, &hash::h(ek)]);
    let ct = pke::encrypt(params, ek, &m, &r, codecs);
    Ok((Ciphertext(ct), SharedSecret(key)))
}

/// Runs encapsulation but returns the ciphertext components before
/// compression, for harvesting the coefficient distribution.
pub fn encaps_raw(params: &KemParams, ek: &[u8], seed: &[u8]) -> Result<RawCiphertext> {
    check_encaps_key(params, ek)?;
    let m: [u8; 32] = seed_array(seed, "encapsulation seed")?;
    let (_, r) = hash::g(&[&m, &hash::h(ek)]);
    Ok(pke::encrypt_raw(params, ek, &m, &r))
}

/// Decapsulation with the parameter set's uniform compression.
pub fn decaps(params: &KemParams, dk: &[u8], ct: &Ciphertext) -> Result<SharedSecret> {
    let (u, v) = uniform_codecs(params);
    decaps_with_codecs(params, dk, ct, CiphertextCodecs { u: &u, v: &v })
}

/// Decapsulation with arbitrary ciphertext quantizers. Invalid ciphertexts
/// yield the implicit-rejection secret `J(z || c)`, never an error.
pub fn decaps_with_codecs(
    params: &KemParams,
    dk: &[u8],
    ct: &Ciphertext,
    codecs: CiphertextCodecs<'_>,
) -> Result<SharedSecret> {
    params.validate()?;
    let k = params.k;
    check_len(dk.len(), params.decaps_key_len(), "decapsulation key")?;
    let ct_len = 32 * (k * codecs.u.bits() as usize + codecs.v.bits() as usize);
    check_len(ct.0.len(), ct_len, "ciphertext")?;

    let dk_pke = &dk[..384 * k];
    let ek = &dk[384 * k..768 * k + 32];
    let h = &dk[768 * k + 32..768 * k + 64];
    let z = &dk[768 * k + 64..];

    let m = pke::decrypt(params, dk_pke, &ct.0, codecs);
    let (key, r) = hash::g(&[&m, h]);
    let rejected = hash::j(&[z, &ct.0]);
    let reencrypted = pke::encrypt(params, ek, &m, &r, codecs);

    let equal = ct_eq(&ct.0, &reencrypted);
    Ok(SharedSecret(ct_select(equal, &key, &rejected)))
}

/// Returns 0xff when equal, 0x00 otherwise, without data-dependent branches.
fn ct_eq(a: &[u8], b: &[u8]) -> u8 {
    let diff = a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y));
    // diff == 0 -> 0xff, else 0x00
    ((diff as u16).wrapping_sub(1) >> 8) as u8
}

fn ct_select(mask: u8, a: &[u8; 32], b: &[u8; 32]) -> [u8; 32] {
    let mut out = [0u8; 32];
    for i in 0..32 {
        out[i] = (a[i] & mask) | (b[i] & !mask);
    }
    out
}
