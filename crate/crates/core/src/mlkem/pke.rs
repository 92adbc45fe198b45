//! K-PKE, the CPA-secure encryption scheme underneath ML-KEM, with the
//! ciphertext compression step factored out behind [`CoefficientCodec`] so
//! alternative quantizers can be substituted for the uniform one.

use super::compress::{compress, decompress};
use super::encode::{byte_decode, byte_decode_raw, byte_encode};
use super::hash;
use super::ntt::{intt, ntt};
use super::params::{KemParams, N};
use super::poly::{inner_product, NttPolynomial, Polynomial};
use super::sample::{sample_cbd, sample_ntt};

/// Scalar quantizer applied coefficient-wise to a ciphertext component.
pub trait CoefficientCodec: Send + Sync {
    /// Index width in bits; the component is packed with this width.
    fn bits(&self) -> u8;
    /// Maps a coefficient in `[0, q)` to an index in `[0, 2^bits)`.
    fn encode(&self, x: u16) -> u16;
    /// Maps an index back to a coefficient in `[0, q)`.
    fn decode(&self, index: u16) -> u16;
}

/// The FIPS 203 `Compress_d` / `Decompress_d` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformCodec(pub u8);

impl CoefficientCodec for UniformCodec {
    fn bits(&self) -> u8 {
        self.0
    }

    fn encode(&self, x: u16) -> u16 {
        compress(x, self.0)
    }

    fn decode(&self, index: u16) -> u16 {
        decompress(index, self.0)
    }
}

/// Codecs for the `u` and `v` ciphertext components.
#[derive(Clone, Copy)]
pub struct CiphertextCodecs<'a> {
    pub u: &'a dyn CoefficientCodec,
    pub v: &'a dyn CoefficientCodec,
}

/// Pre-compression ciphertext components, as produced inside encryption.
#[derive(Debug, Clone)]
pub struct RawCiphertext {
    pub u: Vec<Polynomial>,
    pub v: Polynomial,
}

pub(crate) struct PkeKeys {
    pub ek: Vec<u8>,
    pub dk: Vec<u8>,
}

fn encode_poly_12(p: &NttPolynomial, out: &mut Vec<u8>) {
    let mut buf = [0u8; 384];
    byte_encode(p.coeffs(), 12, &mut buf);
    out.extend_from_slice(&buf);
}

fn decode_vec_12<T>(bytes: &[u8], wrap: fn([u16; N]) -> T) -> Vec<T> {
    bytes.chunks_exact(384).map(|c| wrap(byte_decode(c, 12))).collect()
}

fn matrix(rho: &[u8; 32], k: usize, transpose: bool) -> Vec<Vec<NttPolynomial>> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let (row, col) = if transpose { (j, i) } else { (i, j) };
                    sample_ntt(hash::xof(rho, col as u8, row as u8))
                })
                .collect()
        })
        .collect()
}

fn noise(eta: usize, seed: &[u8; 32], nonce: &mut u8) -> Polynomial {
    let stream = hash::prf(eta, seed, *nonce);
    *nonce += 1;
    sample_cbd(&stream, eta).expect("PRF output has the CBD length")
}

pub(crate) fn keygen(params: &KemParams, d: &[u8; 32]) -> PkeKeys {
    let k = params.k;
    let (rho, sigma) = hash::g(&[d, &[k as u8]]);
    let a = matrix(&rho, k, false);
    let mut nonce = 0u8;
    let s: Vec<NttPolynomial> = (0..k).map(|_| ntt(&noise(params.eta1, &sigma, &mut nonce))).collect();
    let e: Vec<NttPolynomial> = (0..k).map(|_| ntt(&noise(params.eta1, &sigma, &mut nonce))).collect();

    let mut ek = Vec::with_capacity(params.encaps_key_len());
    for (row, ei) in a.iter().zip(&e) {
        let t = &inner_product(row, &s) + ei;
        encode_poly_12(&t, &mut ek);
    }
    ek.extend_from_slice(&rho);

    let mut dk = Vec::with_capacity(384 * k);
    for si in &s {
        encode_poly_12(si, &mut dk);
    }
    PkeKeys { ek, dk }
}

/// Runs encryption up to (but not including) compression.
pub(crate) fn encrypt_raw(params: &KemParams, ek: &[u8], m: &[u8; 32], r: &[u8; 32]) -> RawCiphertext {
    let k = params.k;
    let t_hat = decode_vec_12(&ek[..384 * k], NttPolynomial::from_reduced);
    let mut rho = [0u8; 32];
    rho.copy_from_slice(&ek[384 * k..384 * k + 32]);
    let a_t = matrix(&rho, k, true);

    let mut nonce = 0u8;
    let y: Vec<NttPolynomial> = (0..k).map(|_| ntt(&noise(params.eta1, r, &mut nonce))).collect();
    let e1: Vec<Polynomial> = (0..k).map(|_| noise(params.eta2, r, &mut nonce)).collect();
    let e2 = noise(params.eta2, r, &mut nonce);

    let u = a_t
        .iter()
        .zip(&e1)
        .map(|(row, e)| &intt(&inner_product(row, &y)) + e)
        .collect();

    let m_bits = byte_decode(m, 1);
    let mut mu = [0u16; N];
    for (o, &b) in mu.iter_mut().zip(&m_bits) {
        *o = decompress(b, 1);
    }
    let v = &(&intt(&inner_product(&t_hat, &y)) + &e2) + &Polynomial::from_reduced(mu);
    RawCiphertext { u, v }
}

pub(crate) fn pack(raw: &RawCiphertext, codecs: CiphertextCodecs<'_>) -> Vec<u8> {
    let (du, dv) = (codecs.u.bits(), codecs.v.bits());
    let mut ct = vec![0u8; 32 * (raw.u.len() * du as usize + dv as usize)];
    let mut idx = [0u16; N];
    let mut off = 0;
    for p in &raw.u {
        for (o, &c) in idx.iter_mut().zip(p.coeffs()) {
            *o = codecs.u.encode(c);
        }
        let len = 32 * du as usize;
        byte_encode(&idx, du, &mut ct[off..off + len]);
        off += len;
    }
    for (o, &c) in idx.iter_mut().zip(raw.v.coeffs()) {
        *o = codecs.v.encode(c);
    }
    byte_encode(&idx, dv, &mut ct[off..]);
    ct
}

pub(crate) fn encrypt(
    params: &KemParams,
    ek: &[u8],
    m: &[u8; 32],
    r: &[u8; 32],
    codecs: CiphertextCodecs<'_>,
) -> Vec<u8> {
    pack(&encrypt_raw(params, ek, m, r), codecs)
}

fn unpack(bytes: &[u8], codec: &dyn CoefficientCodec) -> Polynomial {
    let idx = byte_decode_raw(bytes, codec.bits());
    let mut out = [0u16; N];
    for (o, &i) in out.iter_mut().zip(&idx) {
        *o = codec.decode(i);
    }
    Polynomial::from_reduced(out)
}

pub(crate) fn decrypt(params: &KemParams, dk: &[u8], ct: &[u8], codecs: CiphertextCodecs<'_>) -> [u8; 32] {
    let k = params.k;
    let du = codecs.u.bits() as usize;
    let u_len = 32 * du;
    let u: Vec<NttPolynomial> = ct[..k * u_len]
        .chunks_exact(u_len)
        .map(|c| ntt(&unpack(c, codecs.u)))
        .collect();
    let v = unpack(&ct[k * u_len..], codecs.v);
    let s_hat = decode_vec_12(&dk[..384 * k], NttPolynomial::from_reduced);
    let w = &v - &intt(&inner_product(&s_hat, &u));

    let mut bits = [0u16; N];
    for (o, &c) in bits.iter_mut().zip(w.coeffs()) {
        *o = compress(c, 1);
    }
    let mut m = [0u8; 32];
    byte_encode(&bits, 1, &mut m);
    m
}
