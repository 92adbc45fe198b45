//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string so the page can stay framework-free;
//! errors come back as a plain message string that JavaScript sees as a
//! thrown value.

use kemscope::cer::{standard_table, CerRecord, DEFAULT_INFO_BITS};
use kemscope::compression::{estimate_dfr, QuantizerSpec};
use kemscope::handshake::{handshake_payload, simulate_handshake_rate, AuthConfig, Calibration, KexGroup, NetProfile};
use kemscope::KemParams;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on Monte-Carlo trials per point, to keep the tab responsive.
pub const MAX_TRIALS: u32 = 20_000;

type JsResult<T> = std::result::Result<T, String>;

fn to_json(value: &impl Serialize) -> JsResult<String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CerView {
    record: CerRecord,
    ciphertext_bytes: u64,
    encaps_key_bytes: usize,
    reference: Vec<CerRecord>,
}

/// Ciphertext expansion of a rank-`k` module with `du`/`dv` compression,
/// alongside the standard table for comparison.
#[wasm_bindgen]
pub fn cer_explorer(k: u32, du: u8, dv: u8) -> JsResult<String> {
    let k = k as usize;
    let params = KemParams::standard_for_rank(k)
        .and_then(|p| p.with_compression(du, dv))
        .map_err(|e| e.to_string())?;
    let record = CerRecord::new(format!("k={k}, du={du}, dv={dv}"), k, du, dv, DEFAULT_INFO_BITS)
        .map_err(|e| e.to_string())?;
    to_json(&CerView {
        ciphertext_bytes: record.ciphertext_bits / 8,
        encaps_key_bytes: params.encaps_key_len(),
        record,
        reference: standard_table(),
    })
}

#[derive(Serialize)]
struct DfrPoint {
    du: u8,
    cer: f64,
    trials: u64,
    failures: u64,
    rate: f64,
    ci95_low: f64,
    ci95_high: f64,
}

/// Monte-Carlo decryption failure rate for every `du` in `du_min..=du_max`
/// at fixed rank `k` and `dv`.
#[wasm_bindgen]
pub fn dfr_curve(k: u32, dv: u8, du_min: u8, du_max: u8, trials: u32, seed: u32) -> JsResult<String> {
    if du_min > du_max {
        return Err(format!("empty du range {du_min}..={du_max}"));
    }
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be in 1..={MAX_TRIALS}"));
    }
    let params = KemParams::standard_for_rank(k as usize).map_err(|e| e.to_string())?;
    let points = (du_min..=du_max)
        .map(|du| {
            let spec = QuantizerSpec::uniform(du, dv)?;
            let est = estimate_dfr(&params, &spec, u64::from(trials), u64::from(seed))?;
            let cer = CerRecord::new("", params.k, du, dv, DEFAULT_INFO_BITS)?.cer;
            Ok(DfrPoint {
                du,
                cer,
                trials: est.trials,
                failures: est.failures,
                rate: est.rate,
                ci95_low: est.ci95_low,
                ci95_high: est.ci95_high,
            })
        })
        .collect::<kemscope::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    to_json(&points)
}

#[derive(Serialize)]
struct RatePoint {
    delay_ms: f64,
    completed: u64,
}

#[derive(Serialize)]
struct HandshakeView {
    kex: KexGroup,
    auth: AuthConfig,
    base_bytes: u64,
    kex_bytes: u64,
    total_bytes: u64,
    connection_time: f64,
    completed: u64,
    per_second: f64,
    delay_sweep: Vec<RatePoint>,
}

/// Handshake payload under the shipped calibration, plus the analytic
/// completion count for the given link and a sweep over one-way delay.
#[wasm_bindgen]
pub fn handshake_model(
    kex: &str,
    auth: &str,
    delay_ms: f64,
    loss: f64,
    crypto_ms: f64,
    duration_s: f64,
) -> JsResult<String> {
    let kex: KexGroup = kex.parse().map_err(|e: kemscope::Error| e.to_string())?;
    let auth: AuthConfig = auth.parse().map_err(|e: kemscope::Error| e.to_string())?;
    let payload = handshake_payload(kex, auth, &Calibration::table2()).map_err(|e| e.to_string())?;
    let rate = |delay_ms: f64| {
        let profile = NetProfile::with_delay(delay_ms / 1000.0).with_loss(loss);
        simulate_handshake_rate(&profile, crypto_ms / 1000.0, duration_s)
    };
    let here = rate(delay_ms).map_err(|e| e.to_string())?;
    let delay_sweep = (0..=20)
        .map(|i| {
            let d = 5.0 * f64::from(i);
            rate(d).map(|r| RatePoint {
                delay_ms: d,
                completed: r.completed,
            })
        })
        .collect::<kemscope::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    to_json(&HandshakeView {
        kex,
        auth,
        base_bytes: payload.base_bytes,
        kex_bytes: payload.kex_bytes,
        total_bytes: payload.total_bytes,
        connection_time: here.connection_time,
        completed: here.completed,
        per_second: here.per_second,
        delay_sweep,
    })
}
