//! Handshake payload accounting from segment traces.
//!
//! A trace is a text log with one `direction,length` pair per line, where
//! direction is `c2s` or `s2c` and length is the transport payload length
//! of one segment. Blank lines and `#` comments are ignored. The total
//! handshake payload is the sum of all lengths; pure ACKs have length 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::payload::{handshake_payload, AuthConfig, Calibration, KexGroup};
use crate::error::{Error, Result};

/// Maximum segment payload used when splitting synthetic flights.
pub const SYNTHETIC_MSS: u64 = 1448;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "c2s")]
    ClientToServer,
    #[serde(rename = "s2c")]
    ServerToClient,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::ClientToServer => "c2s",
            Direction::ServerToClient => "s2c",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c2s" => Ok(Direction::ClientToServer),
            "s2c" => Ok(Direction::ServerToClient),
            other => Err(Error::input(format!("unknown direction '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub direction: Direction,
    pub payload_len: u64,
}

impl TraceRecord {
    pub fn c2s(payload_len: u64) -> Self {
        TraceRecord {
            direction: Direction::ClientToServer,
            payload_len,
        }
    }

    pub fn s2c(payload_len: u64) -> Self {
        TraceRecord {
            direction: Direction::ServerToClient,
            payload_len,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub total_bytes: u64,
    pub c2s_bytes: u64,
    pub s2c_bytes: u64,
    pub segments: u64,
    pub data_segments: u64,
}

impl TraceSummary {
    /// Combines summaries of two trace fragments.
    pub fn merge(self, other: TraceSummary) -> TraceSummary {
        TraceSummary {
            total_bytes: self.total_bytes + other.total_bytes,
            c2s_bytes: self.c2s_bytes + other.c2s_bytes,
            s2c_bytes: self.s2c_bytes + other.s2c_bytes,
            segments: self.segments + other.segments,
            data_segments: self.data_segments + other.data_segments,
        }
    }
}

pub fn analyze_trace(records: &[TraceRecord]) -> TraceSummary {
    records.iter().fold(TraceSummary::default(), |mut s, r| {
        s.total_bytes += r.payload_len;
        match r.direction {
            Direction::ClientToServer => s.c2s_bytes += r.payload_len,
            Direction::ServerToClient => s.s2c_bytes += r.payload_len,
        }
        s.segments += 1;
        s.data_segments += u64::from(r.payload_len > 0);
        s
    })
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (dir, len) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(line_no, format!("expected 'direction,length', got '{line}'")))?;
        let direction = dir
            .trim()
            .parse::<Direction>()
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        let payload_len = len
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(line_no, format!("invalid payload length '{}'", len.trim())))?;
        out.push(TraceRecord { direction, payload_len });
    }
    Ok(out)
}

pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(r.direction.as_str());
        s.push(',');
        s.push_str(&r.payload_len.to_string());
        s.push('\n');
    }
    s
}

fn push_flight(out: &mut Vec<TraceRecord>, direction: Direction, mut bytes: u64) {
    let ack = match direction {
        Direction::ClientToServer => TraceRecord::s2c(0),
        Direction::ServerToClient => TraceRecord::c2s(0),
    };
    while bytes > 0 {
        let seg = bytes.min(SYNTHETIC_MSS);
        out.push(TraceRecord {
            direction,
            payload_len: seg,
        });
        out.push(ack);
        bytes -= seg;
    }
}

/// A plausible segment trace for one handshake whose payload matches the
/// model: ClientHello with the client keyshare, the server flight with the
/// server keyshare and authentication, and the client Finished, each split
/// into MSS-sized segments and acknowledged by empty segments.
pub fn synthetic_trace(kex: KexGroup, auth: AuthConfig, calibration: &Calibration) -> Result<Vec<TraceRecord>> {
    let p = handshake_payload(kex, auth, calibration)?;
    let (client_share, server_share) = kex.keyshare_bytes();
    let hello_framing = p.base_bytes / 8;
    let finished = p.base_bytes / 32;
    let server_framing = p.base_bytes - hello_framing - finished;

    let mut out = vec![TraceRecord::c2s(0), TraceRecord::s2c(0), TraceRecord::c2s(0)];
    push_flight(&mut out, Direction::ClientToServer, client_share as u64 + hello_framing);
    push_flight(&mut out, Direction::ServerToClient, server_share as u64 + server_framing);
    push_flight(&mut out, Direction::ClientToServer, finished);
    Ok(out)
}
