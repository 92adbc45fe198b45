//! Parameterized ML-KEM with configurable ciphertext compression, and the
//! analyses built on it: ciphertext expansion, decryption failure rate
//! under alternative quantizers, TLS 1.3 handshake payload accounting,
//! primitive throughput, and handshake rate under network impairment.

pub mod bench;
pub mod cer;
pub mod compression;
pub mod error;
pub mod handshake;
pub mod mlkem;

pub use error::{Error, Result};
pub use mlkem::{KemParams, N, Q};
