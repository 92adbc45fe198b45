//! Reliability cost of ciphertext compression: alternative quantizers,
//! Lloyd-Max training on harvested coefficients, and Monte-Carlo
//! decryption-failure-rate estimation.

mod codebook;
mod compare;
mod dfr;
mod quantizer;

pub use codebook::{
    train_lloyd_max, train_lloyd_max_with, Codebook, LloydConfig, LloydTraining, SampleSource, MAX_CODEBOOK_BITS,
};
pub use compare::{
    build_quantizer, compare_quantizers, compare_quantizers_with, held_out_mse, CompareConfig, ComparisonReport, ComparisonRow,
};
pub use dfr::{confidence_interval, estimate_dfr, harvest_coefficients, DfrEstimate, Harvest, HarvestSource};
pub use quantizer::{Component, QuantizerCodecs, QuantizerKind, QuantizerSpec, VCodec};
