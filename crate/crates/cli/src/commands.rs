//! One adapter per subcommand: parse arguments, seed, call the library,
//! serialize.

use std::path::Path;
use std::time::Duration;

use kemscope::bench::{bench_suite, BenchConfig};
use kemscope::cer::{standard_table, CerRecord};
use kemscope::compression::{build_quantizer, compare_quantizers_with, estimate_dfr, CompareConfig, LloydConfig, QuantizerKind};
use kemscope::handshake::{
    analyze_trace, calibrate_base, handshake_payload, parse_trace, simulate_handshake_rate, synthetic_trace,
    table2_report, write_trace, AuthConfig, Calibration, KexGroup, NetProfile, Observation, PayloadBreakdown,
};
use kemscope::mlkem::kat::{acvp, validate_kat_str, validate_records};
use kemscope::mlkem::{decaps, encaps, keygen, Ciphertext};
use kemscope::KemParams;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::*;
use crate::output::{to_value, Emitter};
use crate::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut out = Emitter {
        json: cli.json,
        seed: None,
    };
    let seed = cli.seed;
    match cli.command {
        Command::Cer(a) => cer(&out, &a),
        Command::Kem(k) => kem(&mut out, seed, k),
        Command::Dfr(a) => dfr(&mut out, seed, &a),
        Command::Quantizer(a) => quantizer(&mut out, seed, &a),
        Command::Payload(a) => payload(&out, &a),
        Command::Trace(a) => trace(&out, &a),
        Command::Rate(a) => rate(&out, &a),
        Command::Bench(a) => bench(&mut out, seed, &a),
    }
}

/// The given seed, or a fresh one announced on stderr.
fn resolve_seed(out: &mut Emitter, seed: Option<u64>) -> u64 {
    let s = seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    });
    out.seed = Some(s);
    s
}

fn seed_bytes(seed: u64, len: usize) -> Vec<u8> {
    let mut buf = vec![0u8; len];
    ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut buf);
    buf
}

fn params_of(p: &ParamsArg) -> Result<KemParams, CliError> {
    let base = KemParams::by_name(&p.params)?;
    Ok(match (p.du, p.dv) {
        (None, None) => base,
        (du, dv) => base.with_compression(du.unwrap_or(base.du), dv.unwrap_or(base.dv))?,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))
}

/// Hex given inline, or `@FILE` holding hex.
fn hex_arg(name: &str, v: &str) -> Result<Vec<u8>, CliError> {
    let text = match v.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?,
        None => v.to_string(),
    };
    hex::decode(text.trim()).map_err(|e| CliError::Usage(format!("--{name}: invalid hex ({e})")))
}

#[derive(Serialize)]
struct CerRow<'a> {
    label: &'a str,
    k: usize,
    du: u8,
    dv: u8,
    #[serde(rename = "B_ct_bits")]
    bits: u64,
    #[serde(rename = "K_bits")]
    info_bits: u64,
    #[serde(rename = "CER")]
    cer: String,
}

fn cer(out: &Emitter, a: &CerArgs) -> Result<(), CliError> {
    let records = if a.table1 {
        standard_table()
    } else {
        let (label, k, du, dv) = match (&a.params, a.k) {
            (Some(name), _) => {
                let p = KemParams::by_name(name)?;
                (p.label.clone(), p.k, a.du.unwrap_or(p.du), a.dv.unwrap_or(p.dv))
            }
            (None, Some(k)) => {
                let (du, dv) = (a.du.unwrap_or_default(), a.dv.unwrap_or_default());
                (format!("k={k},du={du},dv={dv}"), k, du, dv)
            }
            (None, None) => unreachable!("clap requires one source"),
        };
        vec![CerRecord::new(a.label.clone().unwrap_or(label), k, du, dv, a.info_bits)?]
    };
    let rows: Vec<CerRow> = records
        .iter()
        .map(|r| CerRow {
            label: &r.label,
            k: r.k,
            du: r.du,
            dv: r.dv,
            bits: r.ciphertext_bits,
            info_bits: r.info_bits,
            cer: r.cer_display(),
        })
        .collect();
    out.emit("cer", a, &rows, Some(to_value(&records)?))
}

#[derive(Serialize)]
struct KeygenRow<'a> {
    params: &'a str,
    ek: String,
    dk: String,
}

#[derive(Serialize)]
struct EncapsRow<'a> {
    params: &'a str,
    ct: String,
    ss: String,
}

#[derive(Serialize)]
struct DecapsRow<'a> {
    params: &'a str,
    ss: String,
}

#[derive(Serialize)]
struct KatRow {
    index: usize,
    id: String,
    params: String,
    line: usize,
    stages: String,
    passed: bool,
    detail: String,
}

fn kem(out: &mut Emitter, seed: Option<u64>, cmd: KemCommand) -> Result<(), CliError> {
    match cmd {
        KemCommand::Keygen { params, seed_hex } => {
            let p = params_of(&params)?;
            let s = match &seed_hex {
                Some(h) => hex_arg("seed-hex", h)?,
                None => seed_bytes(resolve_seed(out, seed), 64),
            };
            let kp = keygen(&p, &s)?;
            let row = KeygenRow {
                params: &p.label,
                ek: hex::encode(&kp.encaps_key),
                dk: hex::encode(&kp.decaps_key),
            };
            out.emit("kem keygen", &json!({"params": p, "seed_hex": seed_hex}), &[row], None)
        }
        KemCommand::Encaps { params, ek, seed_hex } => {
            let p = params_of(&params)?;
            let ek = hex_arg("ek", &ek)?;
            let s = match &seed_hex {
                Some(h) => hex_arg("seed-hex", h)?,
                None => seed_bytes(resolve_seed(out, seed), 32),
            };
            let (ct, ss) = encaps(&p, &ek, &s)?;
            let row = EncapsRow {
                params: &p.label,
                ct: hex::encode(ct.as_bytes()),
                ss: hex::encode(ss.as_bytes()),
            };
            out.emit("kem encaps", &json!({"params": p, "seed_hex": seed_hex}), &[row], None)
        }
        KemCommand::Decaps { params, dk, ct } => {
            let p = params_of(&params)?;
            let ss = decaps(&p, &hex_arg("dk", &dk)?, &Ciphertext(hex_arg("ct", &ct)?))?;
            let row = DecapsRow {
                params: &p.label,
                ss: hex::encode(ss.as_bytes()),
            };
            out.emit("kem decaps", &json!({ "params": p }), &[row], None)
        }
        KemCommand::Kat { file, format } => {
            let text = read_text(&file)?;
            let is_json = match format {
                Some(f) => matches!(f, KatFormat::Acvp),
                None => file.extension().is_some_and(|e| e == "json"),
            };
            let report = if is_json {
                validate_records(&acvp::records_from_json(&text)?)
            } else {
                validate_kat_str(&text)?
            };
            let rows: Vec<KatRow> = report
                .vectors
                .iter()
                .map(|v| KatRow {
                    index: v.index,
                    id: v.id.clone().unwrap_or_default(),
                    params: v.params.clone(),
                    line: v.line,
                    stages: v.stages.iter().map(|s| s.stage.to_string()).collect::<Vec<_>>().join("+"),
                    passed: v.passed(),
                    detail: v
                        .stages
                        .iter()
                        .find(|s| !s.passed)
                        .map(|s| format!("{}: {}", s.stage, s.detail))
                        .unwrap_or_default(),
                })
                .collect();
            out.emit(
                "kem kat",
                &json!({"file": file, "format": if is_json { "acvp" } else { "kat" }}),
                &rows,
                Some(to_value(&report)?),
            )?;
            let failed: Vec<String> = report
                .failures()
                .map(|v| format!("{} ({})", v.index, v.id.as_deref().unwrap_or("-")))
                .collect();
            if failed.is_empty() {
                eprintln!("{} vectors passed", report.vectors.len());
                Ok(())
            } else {
                Err(CliError::Failure(format!("failing vectors: {}", failed.join(", "))))
            }
        }
    }
}

fn kind_of(q: QuantizerArg) -> QuantizerKind {
    match q {
        QuantizerArg::Uniform => QuantizerKind::Uniform,
        QuantizerArg::LloydMax => QuantizerKind::LloydMax,
        QuantizerArg::SemiCompressed => QuantizerKind::SemiCompressed,
    }
}

fn lloyd_config(iterations: usize) -> LloydConfig {
    LloydConfig {
        max_iterations: iterations,
        ..LloydConfig::default()
    }
}

#[derive(Serialize)]
struct DfrRow<'a> {
    params: &'a str,
    quantizer: QuantizerKind,
    du: u8,
    dv: u8,
    cer: f64,
    trials: u64,
    failures: u64,
    rate: f64,
    ci95_low: f64,
    ci95_high: f64,
    seed: u64,
}

fn dfr(out: &mut Emitter, seed: Option<u64>, a: &DfrArgs) -> Result<(), CliError> {
    let p = KemParams::by_name(&a.params)?;
    let seed = resolve_seed(out, seed);
    let spec = build_quantizer(
        kind_of(a.quantizer),
        &p,
        a.du.unwrap_or(p.du),
        a.dv,
        a.harvest,
        lloyd_config(a.iterations),
        seed,
    )?;
    let est = estimate_dfr(&p, &spec, a.trials, seed)?;
    let row = DfrRow {
        params: &p.label,
        quantizer: spec.kind,
        du: spec.du,
        dv: spec.dv,
        cer: CerRecord::new("", p.k, spec.du, spec.dv, 256)?.cer,
        trials: est.trials,
        failures: est.failures,
        rate: est.rate,
        ci95_low: est.ci95_low,
        ci95_high: est.ci95_high,
        seed,
    };
    out.emit("dfr", a, &[row], None)
}

fn parse_pair(s: &str) -> Result<(u8, u8), CliError> {
    let bad = || CliError::Usage(format!("--pairs: expected du:dv, got '{s}'"));
    let (u, v) = s.trim().split_once(':').ok_or_else(bad)?;
    Ok((u.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?))
}

fn quantizer(out: &mut Emitter, seed: Option<u64>, a: &QuantizerArgs) -> Result<(), CliError> {
    let p = KemParams::by_name(&a.params)?;
    let pairs = a.pairs.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
    let seed = resolve_seed(out, seed);
    let config = CompareConfig {
        harvest_encapsulations: a.harvest,
        lloyd: lloyd_config(a.iterations),
        ..CompareConfig::new(a.trials, seed)
    };
    let report = compare_quantizers_with(&p, &pairs, config)?;
    out.emit("quantizer", a, &report.rows, None)
}

#[derive(Serialize)]
struct PayloadRow {
    kex: KexGroup,
    auth: AuthConfig,
    base: u64,
    kex_bytes: u64,
    total: u64,
}

impl From<&PayloadBreakdown> for PayloadRow {
    fn from(b: &PayloadBreakdown) -> Self {
        PayloadRow {
            kex: b.kex,
            auth: b.auth,
            base: b.base_bytes,
            kex_bytes: b.kex_bytes,
            total: b.total_bytes,
        }
    }
}

#[derive(Deserialize)]
struct ObservationRow {
    kex: String,
    auth: String,
    total: u64,
}

fn load_calibration(path: Option<&Path>) -> Result<Calibration, CliError> {
    let Some(path) = path else {
        return Ok(Calibration::table2());
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))?;
    let mut obs = Vec::new();
    for (i, row) in rdr.deserialize::<ObservationRow>().enumerate() {
        let row = row.map_err(|e| CliError::Failure(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        obs.push(Observation {
            kex: row.kex.parse()?,
            auth: row.auth.parse()?,
            total_bytes: row.total,
        });
    }
    let cal = calibrate_base(&obs)?;
    for c in cal.cells.iter().filter(|c| c.spread > 0.0) {
        eprintln!(
            "calibration: ({:?}, {}) observations disagree by {} bytes; using mean {}",
            c.family, c.auth, c.spread, c.base_bytes
        );
    }
    Ok(cal)
}

fn payload(out: &Emitter, a: &PayloadArgs) -> Result<(), CliError> {
    let cal = load_calibration(a.observations.as_deref())?;
    let rows = match (&a.kex, &a.auth) {
        (Some(k), Some(au)) => vec![handshake_payload(k.parse()?, au.parse()?, &cal)?],
        _ => table2_report(&cal)?,
    };
    let csv_rows: Vec<PayloadRow> = rows.iter().map(PayloadRow::from).collect();
    out.emit(
        "payload",
        a,
        &csv_rows,
        Some(json!({ "rows": rows, "calibration": cal })),
    )
}

#[derive(Serialize)]
struct TraceRow {
    total: u64,
    c2s: u64,
    s2c: u64,
    segments: u64,
    data_segments: u64,
}

fn trace(out: &Emitter, a: &TraceArgs) -> Result<(), CliError> {
    if a.emit {
        let (kex, auth) = (a.kex.as_deref().unwrap_or_default(), a.auth.as_deref().unwrap_or_default());
        let records = synthetic_trace(kex.parse()?, auth.parse()?, &Calibration::table2())?;
        print!("# synthetic {kex} + {auth}\n{}", write_trace(&records));
        return Ok(());
    }
    let path = a.file.as_deref().expect("clap requires --file or --emit");
    let records = parse_trace(&read_text(path)?)?;
    let s = analyze_trace(&records);
    let row = TraceRow {
        total: s.total_bytes,
        c2s: s.c2s_bytes,
        s2c: s.s2c_bytes,
        segments: s.segments,
        data_segments: s.data_segments,
    };
    out.emit("trace", a, &[row], Some(to_value(&s)?))
}

#[derive(Serialize)]
struct RateRow {
    one_way_delay: f64,
    loss_prob: f64,
    rto: f64,
    rtts: u32,
    packets: u32,
    crypto_time: f64,
    duration: f64,
    connection_time: f64,
    completed: u64,
    per_second: f64,
}

fn rate(out: &Emitter, a: &RateArgs) -> Result<(), CliError> {
    let mut base = match &a.profile {
        Some(path) => serde_json::from_str::<NetProfile>(&read_text(path)?)
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        None => NetProfile::default(),
    };
    if let Some(v) = a.rto {
        base.rto = v;
    }
    if let Some(v) = a.rtts {
        base.rtts_required = v;
    }
    if let Some(v) = a.packets {
        base.packets_per_handshake = v;
    }
    let delays: Vec<f64> = if a.delay_ms.is_empty() {
        vec![base.one_way_delay]
    } else {
        a.delay_ms.iter().map(|ms| ms / 1000.0).collect()
    };
    let losses = if a.loss.is_empty() { vec![base.loss_prob] } else { a.loss.clone() };

    let mut estimates = Vec::new();
    for &d in &delays {
        for &l in &losses {
            let profile = NetProfile {
                one_way_delay: d,
                loss_prob: l,
                ..base
            };
            estimates.push(simulate_handshake_rate(&profile, a.crypto_ms / 1000.0, a.duration)?);
        }
    }
    let rows: Vec<RateRow> = estimates
        .iter()
        .map(|e| RateRow {
            one_way_delay: e.profile.one_way_delay,
            loss_prob: e.profile.loss_prob,
            rto: e.profile.rto,
            rtts: e.profile.rtts_required,
            packets: e.profile.packets_per_handshake,
            crypto_time: e.crypto_time,
            duration: e.duration,
            connection_time: e.connection_time,
            completed: e.completed,
            per_second: e.per_second,
        })
        .collect();
    out.emit("rate", a, &rows, Some(to_value(&estimates)?))
}

#[derive(Serialize)]
struct BenchRow<'a> {
    op: &'static str,
    params: &'a str,
    iterations: u64,
    seconds: f64,
    ops_per_sec: f64,
    warmup: u64,
    rel_std_err: f64,
    fingerprint: &'a str,
}

fn bench(out: &mut Emitter, seed: Option<u64>, a: &BenchArgs) -> Result<(), CliError> {
    let sets = a
        .params
        .iter()
        .map(|n| KemParams::by_name(n))
        .collect::<Result<Vec<_>, _>>()?;
    let min_duration = Duration::try_from_secs_f64(a.min_duration)
        .map_err(|_| CliError::Usage(format!("--min-duration: invalid value {}", a.min_duration)))?;
    let config = BenchConfig {
        min_duration,
        warmup: a.warmup,
        repeats: a.repeats,
    };
    let seed = resolve_seed(out, seed);
    let suite = bench_suite(&sets, &config, seed)?;
    let rows: Vec<BenchRow> = suite
        .results
        .iter()
        .map(|r| BenchRow {
            op: r.op_name.as_str(),
            params: &r.params_label,
            iterations: r.iterations,
            seconds: r.wall_time,
            ops_per_sec: r.ops_per_sec,
            warmup: r.warmup_iterations,
            rel_std_err: r.rel_std_err,
            fingerprint: &r.fingerprint,
        })
        .collect();
    out.emit("bench", a, &rows, Some(to_value(&suite)?))?;
    for v in &suite.verdicts {
        eprintln!(
            "ordering {}: {} ({})",
            v.op_name.as_str(),
            if v.pass { "pass" } else { "FAIL" },
            v.order.join(" > ")
        );
    }
    if suite.all_pass() {
        Ok(())
    } else {
        Err(CliError::Failure("throughput does not decrease with security level".into()))
    }
}
