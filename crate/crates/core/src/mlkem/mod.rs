//! Parameterized ML-KEM over `Z_3329[X]/(X^256 + 1)`.

pub mod compress;
pub mod encode;
mod hash;
pub mod kat;
pub mod kem;
pub mod ntt;
pub mod params;
pub mod pke;
pub mod poly;
pub mod sample;

pub use compress::{compress, decompress};
pub use kat::{validate_kat, ValidationReport};
pub use kem::{
    decaps, decaps_with_codecs, encaps, encaps_raw, encaps_with_codecs, keygen, Ciphertext, KeyPair, SharedSecret,
};
pub use ntt::{intt, ntt};
pub use params::{KemParams, N, Q};
pub use pke::{CiphertextCodecs, CoefficientCodec, RawCiphertext, UniformCodec};
pub use poly::{NttPolynomial, Polynomial};
pub use sample::sample_cbd;
