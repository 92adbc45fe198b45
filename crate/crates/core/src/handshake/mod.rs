//! TLS 1.3 handshake cost models: additive payload accounting, trace-based
//! payload measurement, and handshake throughput under network impairment.

mod payload;
mod rate;
mod trace;

pub use payload::{
    calibrate_base, handshake_payload, keyshare_bytes, table2_report, AuthConfig, Calibration, CalibrationCell,
    KexFamily, KexGroup, Observation, PayloadBreakdown, TABLE2,
};
pub use rate::{simulate_handshake_rate, NetProfile, RateEstimate};
pub use trace::{
    analyze_trace, parse_trace, synthetic_trace, write_trace, Direction, TraceRecord, TraceSummary, SYNTHETIC_MSS,
};
