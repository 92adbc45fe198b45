//! Uniform coefficient compression, `Compress_d` / `Decompress_d`.
//!
//! Integer-only: `round(2^d * x / q)` with round-half-up is
//! `floor((2^(d+1) * x + q) / (2q))`, and `round(q * c / 2^d)` is
//! `(q * c + 2^(d-1)) >> d`.

use super::params::Q;
use super::poly::Polynomial;

#[inline]
pub fn compress(x: u16, d: u8) -> u16 {
    debug_assert!((1..=12).contains(&d) && x < Q);
    let q = Q as u32;
    let num = ((x as u32) << (d + 1)) + q;
    ((num / (2 * q)) & ((1u32 << d) - 1)) as u16
}

#[inline]
pub fn decompress(c: u16, d: u8) -> u16 {
    debug_assert!((1..=12).contains(&d) && (c as u32) < (1 << d));
    ((Q as u32 * c as u32 + (1 << (d - 1))) >> d) as u16
}

/// Worst-case centered reconstruction error of `decompress(compress(x))`,
/// `round(q / 2^(d+1))`.
pub fn error_bound(d: u8) -> u16 {
    ((Q as u32 + (1 << d)) >> (d + 1)) as u16
}

pub fn compress_poly(p: &Polynomial, d: u8) -> [u16; 256] {
    let mut out = [0u16; 256];
    for (o, &c) in out.iter_mut().zip(p.coeffs()) {
        *o = compress(c, d);
    }
    out
}

pub fn decompress_poly(c: &[u16; 256], d: u8) -> Polynomial {
    let mut out = [0u16; 256];
    for (o, &v) in out.iter_mut().zip(c) {
        *o = decompress(v, d);
    }
    Polynomial::from_reduced(out)
}
