//! Expected handshake completions under delay and loss.
//!
//! Connections run one after another. Each costs a number of round trips,
//! the cryptographic compute time, and a first-order loss penalty of one
//! retransmission timeout per expected lost packet:
//!
//! `T = rtts * 2 * delay + crypto + packets * loss * rto`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absorbs floating-point error so exact quotients are not floored down.
const FLOOR_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetProfile {
    /// One-way delay in seconds.
    pub one_way_delay: f64,
    /// Per-packet loss probability in `[0, 1)`.
    pub loss_prob: f64,
    /// Retransmission timeout in seconds.
    pub rto: f64,
    /// Round trips per connection: transport setup, handshake, teardown.
    pub rtts_required: u32,
    pub packets_per_handshake: u32,
}

impl Default for NetProfile {
    fn default() -> Self {
        NetProfile {
            one_way_delay: 0.0,
            loss_prob: 0.0,
            rto: 1.0,
            rtts_required: 3,
            packets_per_handshake: 8,
        }
    }
}

impl NetProfile {
    pub fn with_delay(one_way_delay: f64) -> Self {
        NetProfile {
            one_way_delay,
            ..Self::default()
        }
    }

    pub fn with_loss(mut self, loss_prob: f64) -> Self {
        self.loss_prob = loss_prob;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.one_way_delay.is_finite() && self.one_way_delay >= 0.0) {
            return Err(Error::param(format!("delay must be >= 0, got {}", self.one_way_delay)));
        }
        if !(0.0..1.0).contains(&self.loss_prob) {
            return Err(Error::param(format!("loss probability must be in [0, 1), got {}", self.loss_prob)));
        }
        if !(self.rto.is_finite() && self.rto >= 0.0) {
            return Err(Error::param(format!("rto must be >= 0, got {}", self.rto)));
        }
        if self.rtts_required == 0 {
            return Err(Error::param("rtts_required must be at least 1"));
        }
        Ok(())
    }

    /// Expected time for one connection, in seconds.
    pub fn connection_time(&self, crypto_time: f64) -> f64 {
        self.rtts_required as f64 * 2.0 * self.one_way_delay
            + crypto_time
            + self.packets_per_handshake as f64 * self.loss_prob * self.rto
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub profile: NetProfile,
    pub crypto_time: f64,
    pub duration: f64,
    pub connection_time: f64,
    pub completed: u64,
    pub per_second: f64,
}

pub fn simulate_handshake_rate(profile: &NetProfile, crypto_time: f64, duration: f64) -> Result<RateEstimate> {
    profile.validate()?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::param(format!("duration must be > 0, got {duration}")));
    }
    if !(crypto_time.is_finite() && crypto_time >= 0.0) {
        return Err(Error::param(format!("crypto time must be >= 0, got {crypto_time}")));
    }
    let t = profile.connection_time(crypto_time);
    if t <= 0.0 {
        return Err(Error::param("connection time is zero; give a crypto time or delay"));
    }
    let completed = (duration / t + FLOOR_EPSILON).floor() as u64;
    Ok(RateEstimate {
        profile: *profile,
        crypto_time,
        duration,
        connection_time: t,
        completed,
        per_second: completed as f64 / duration,
    })
}
