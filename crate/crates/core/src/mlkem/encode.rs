//! `ByteEncode_d` / `ByteDecode_d`: little-endian bit packing of 256
//! `d`-bit integers into `32 * d` bytes.

use super::params::Q;

pub fn byte_encode(values: &[u16; 256], d: u8, out: &mut [u8]) {
    debug_assert_eq!(out.len(), 32 * d as usize);
    let mut acc: u32 = 0;
    let mut bits = 0u32;
    let mut pos = 0;
    for &v in values {
        acc |= (v as u32 & ((1 << d) - 1)) << bits;
        bits += d as u32;
        while bits >= 8 {
            out[pos] = acc as u8;
            pos += 1;
            acc >>= 8;
            bits -= 8;
        }
    }
}

/// Unpacks `d`-bit integers without any modular reduction.
pub fn byte_decode_raw(bytes: &[u8], d: u8) -> [u16; 256] {
    debug_assert_eq!(bytes.len(), 32 * d as usize);
    let mut out = [0u16; 256];
    let mut acc: u32 = 0;
    let mut bits = 0u32;
    let mut bytes = bytes.iter();
    let mask = (1u32 << d) - 1;
    for o in out.iter_mut() {
        while bits < d as u32 {
            acc |= (*bytes.next().expect("length checked") as u32) << bits;
            bits += 8;
        }
        *o = (acc & mask) as u16;
        acc >>= d;
        bits -= d as u32;
    }
    out
}

/// `ByteDecode_d` as specified: for `d = 12` values are reduced mod q.
pub fn byte_decode(bytes: &[u8], d: u8) -> [u16; 256] {
    let mut out = byte_decode_raw(bytes, d);
    if d == 12 {
        for v in out.iter_mut() {
            *v %= Q;
        }
    }
    out
}

/// True when every 12-bit field of `bytes` is already reduced mod q.
pub fn is_reduced_12(bytes: &[u8]) -> bool {
    bytes
        .chunks_exact(384)
        .all(|chunk| byte_decode_raw(chunk, 12).iter().all(|&v| v < Q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_order_is_little_endian() {
        let mut v = [0u16; 256];
        v[0] = 1;
        v[1] = 0b1000;
        let mut out = [0u8; 128];
        byte_encode(&v, 4, &mut out);
        assert_eq!(out[0], 0x81);
        assert!(out[1..].iter().all(|&b| b == 0));
    }

    #[test]
    fn unreduced_twelve_bit_field_detected() {
        let mut bytes = [0u8; 384];
        assert!(is_reduced_12(&bytes));
        // first field = 0xFFF = 4095 >= q
        bytes[0] = 0xFF;
        bytes[1] = 0x0F;
        assert!(!is_reduced_12(&bytes));
        assert_eq!(byte_decode(&bytes, 12)[0], 4095 - Q);
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(d in 1u8..=12, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut v = [0u16; 256];
            for x in v.iter_mut() {
                *x = rng.gen_range(0..(1u32 << d)) as u16;
            }
            let mut bytes = vec![0u8; 32 * d as usize];
            byte_encode(&v, d, &mut bytes);
            prop_assert_eq!(byte_decode_raw(&bytes, d), v);
        }
    }
}
