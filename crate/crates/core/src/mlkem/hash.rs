//! The hash, PRF and XOF instantiations used by ML-KEM.

use sha3::digest::{Digest, ExtendableOutput, Update, XofReader};
use sha3::{Sha3_256, Sha3_512, Shake128, Shake256};

/// `G`: SHA3-512 split into two 32-byte halves.
pub fn g(parts: &[&[u8]]) -> ([u8; 32], [u8; 32]) {
    let mut h = Sha3_512::new();
    for p in parts {
        Digest::update(&mut h, p);
    }
    let out = h.finalize();
    let mut a = [0u8; 32];
    let mut b = [0u8; 32];
    a.copy_from_slice(&out[..32]);
    b.copy_from_slice(&out[32..]);
    (a, b)
}

/// `H`: SHA3-256.
pub fn h(data: &[u8]) -> [u8; 32] {
    Sha3_256::digest(data).into()
}

/// `J`: SHAKE256 truncated to 32 bytes.
pub fn j(parts: &[&[u8]]) -> [u8; 32] {
    let mut x = Shake256::default();
    for p in parts {
        x.update(p);
    }
    let mut out = [0u8; 32];
    x.finalize_xof().read(&mut out);
    out
}

/// `PRF_eta(s, b)`: SHAKE256(s || b) producing `64 * eta` bytes.
pub fn prf(eta: usize, seed: &[u8; 32], nonce: u8) -> Vec<u8> {
    let mut x = Shake256::default();
    x.update(seed);
    x.update(&[nonce]);
    let mut out = vec![0u8; 64 * eta];
    x.finalize_xof().read(&mut out);
    out
}

/// SHAKE128 stream seeded with `rho || j || i`, used for matrix sampling.
pub fn xof(rho: &[u8; 32], j: u8, i: u8) -> impl XofReader {
    let mut x = Shake128::default();
    x.update(rho);
    x.update(&[j, i]);
    x.finalize_xof()
}
