use sha3::digest::XofReader;

use super::params::{N, Q};
use super::poly::{NttPolynomial, Polynomial};
use crate::error::{Error, Result};

/// Rejection-samples a uniform NTT-domain polynomial from a SHAKE128 stream.
pub fn sample_ntt(mut stream: impl XofReader) -> NttPolynomial {
    let mut out = [0u16; N];
    let mut filled = 0;
    let mut buf = [0u8; 168];
    while filled < N {
        stream.read(&mut buf);
        for c in buf.chunks_exact(3) {
            let d1 = c[0] as u16 | ((c[1] as u16 & 0x0f) << 8);
            let d2 = (c[1] as u16 >> 4) | ((c[2] as u16) << 4);
            for d in [d1, d2] {
                if d < Q && filled < N {
                    out[filled] = d;
                    filled += 1;
                }
            }
        }
    }
    NttPolynomial::from_reduced(out)
}

/// Centered binomial sample: each coefficient is the difference of the
/// popcounts of two consecutive `eta`-bit groups of the stream.
pub fn sample_cbd(bytes: &[u8], eta: usize) -> Result<Polynomial> {
    if !(1..=3).contains(&eta) {
        return Err(Error::param(format!("eta = {eta} outside 1..=3")));
    }
    if bytes.len() < 64 * eta {
        return Err(Error::input(format!(
            "CBD stream of {} bytes, need {}",
            bytes.len(),
            64 * eta
        )));
    }
    let bit = |i: usize| ((bytes[i / 8] >> (i % 8)) & 1) as u16;
    let mut out = [0u16; N];
    for (i, o) in out.iter_mut().enumerate() {
        let base = 2 * i * eta;
        let x: u16 = (0..eta).map(|j| bit(base + j)).sum();
        let y: u16 = (0..eta).map(|j| bit(base + eta + j)).sum();
        *o = (x + Q - y) % Q;
    }
    Ok(Polynomial::from_reduced(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlkem::poly::centered;

    #[test]
    fn all_zero_stream_gives_zero() {
        let p = sample_cbd(&[0u8; 128], 2).unwrap();
        assert!(p.coeffs().iter().all(|&c| c == 0));
    }

    #[test]
    fn all_ones_stream_gives_zero() {
        let p = sample_cbd(&[0xffu8; 128], 2).unwrap();
        assert!(p.coeffs().iter().all(|&c| c == 0));
    }

    #[test]
    fn short_stream_rejected() {
        assert!(matches!(sample_cbd(&[0u8; 127], 2), Err(Error::Input(_))));
        assert!(sample_cbd(&[0u8; 192], 3).is_ok());
    }

    #[test]
    fn coefficients_within_eta() {
        use rand::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for eta in 1..=3 {
            let mut buf = vec![0u8; 64 * eta];
            rng.fill_bytes(&mut buf);
            let p = sample_cbd(&buf, eta).unwrap();
            assert!(p.coeffs().iter().all(|&c| centered(c).unsigned_abs() as usize <= eta));
        }
    }

    #[test]
    fn empirical_mean_and_variance() {
        use rand::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut buf = [0u8; 128];
        let (mut sum, mut sq, mut n) = (0i64, 0i64, 0i64);
        while n < 1_000_000 {
            rng.fill_bytes(&mut buf);
            for &c in sample_cbd(&buf, 2).unwrap().coeffs() {
                let v = centered(c) as i64;
                sum += v;
                sq += v * v;
                n += 1;
            }
        }
        let mean = sum as f64 / n as f64;
        let var = sq as f64 / n as f64 - mean * mean;
        assert!(mean.abs() <= 0.01, "mean {mean}");
        // CBD(eta) has variance eta / 2.
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }
}
