use std::path::PathBuf;
use std::process::{Command, Output};

use kemscope::cer::standard_table;
use kemscope::compression::{compare_quantizers_with, estimate_dfr, CompareConfig, QuantizerSpec};
use kemscope::handshake::{simulate_handshake_rate, table2_report, Calibration, NetProfile};
use kemscope::mlkem::{decaps, encaps, keygen, Ciphertext};
use kemscope::KemParams;
use rand::{RngCore, SeedableRng};
use serde_json::Value;

fn kemscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kemscope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = kemscope(args);
    assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&ok(&a)).unwrap()
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("kemscope-cli-{}-{name}", std::process::id()))
}

fn seed_bytes(seed: u64, len: usize) -> Vec<u8> {
    let mut buf = vec![0u8; len];
    rand_chacha::ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut buf);
    buf
}

#[test]
fn cer_table_matches_library() {
    let out = ok(&["cer", "--table1"]);
    let rows = csv_rows(&out);
    let lib = standard_table();
    assert_eq!(rows.len(), lib.len());
    for (row, rec) in rows.iter().zip(&lib) {
        assert_eq!(&row[0], rec.label.as_str());
        assert_eq!(row[4].parse::<u64>().unwrap(), rec.ciphertext_bits);
        assert_eq!(&row[6], rec.cer_display().as_str());
    }
    assert!(out.starts_with("label,k,du,dv,B_ct_bits,K_bits,CER\n"));

    let custom = csv_rows(&ok(&["cer", "--k", "2", "--du", "10", "--dv", "12"]));
    assert_eq!(&custom[0][6], "32.0");
    let from_preset = csv_rows(&ok(&["cer", "--params", "ML-KEM-768"]));
    assert_eq!(&from_preset[0][6], "34.0");
}

#[test]
fn payload_table_matches_library() {
    let rows = csv_rows(&ok(&["payload", "--table2"]));
    let lib = table2_report(&Calibration::table2()).unwrap();
    assert_eq!(rows.len(), 10);
    for (row, b) in rows.iter().zip(&lib) {
        assert_eq!(&row[0], b.kex.name());
        assert_eq!(row[4].parse::<u64>().unwrap(), b.total_bytes);
    }
    let single = csv_rows(&ok(&["payload", "--kex", "x25519mlkem768", "--auth", "mldsa44"]));
    assert_eq!(&single[0][4], "9521");
}

#[test]
fn payload_calibration_from_observations() {
    let path = tmp("obs.csv");
    let mut text = String::from("kex,auth,total\n");
    for o in kemscope::handshake::TABLE2 {
        text.push_str(&format!("{},{},{}\n", o.kex, o.auth, o.total_bytes));
    }
    std::fs::write(&path, &text).unwrap();
    let rows = csv_rows(&ok(&["payload", "--observations", path.to_str().unwrap()]));
    assert_eq!(&rows[6][4], "4093");

    // Drop the classical rows: calibration must name the missing cell.
    let partial: String = text.lines().filter(|l| !l.starts_with("X25519,")).map(|l| format!("{l}\n")).collect();
    std::fs::write(&path, partial).unwrap();
    let o = kemscope(&["payload", "--observations", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Classical"), "{}", stderr(&o));
}

#[test]
fn kem_pipeline_matches_library() {
    let p = KemParams::ml_kem_768();
    let keys = csv_rows(&ok(&["kem", "keygen", "--params", "ML-KEM-768", "--seed", "5"]));
    let kp = keygen(&p, &seed_bytes(5, 64)).unwrap();
    assert_eq!(&keys[0][1], hex::encode(&kp.encaps_key).as_str());
    assert_eq!(&keys[0][2], hex::encode(&kp.decaps_key).as_str());

    let ek_file = tmp("ek.hex");
    std::fs::write(&ek_file, &keys[0][1]).unwrap();
    let ek_arg = format!("@{}", ek_file.display());
    let enc = csv_rows(&ok(&["kem", "encaps", "--params", "ML-KEM-768", "--ek", &ek_arg, "--seed", "6"]));
    std::fs::remove_file(&ek_file).ok();
    let (ct, ss) = encaps(&p, &kp.encaps_key, &seed_bytes(6, 32)).unwrap();
    assert_eq!(&enc[0][1], hex::encode(ct.as_bytes()).as_str());
    assert_eq!(&enc[0][2], hex::encode(ss.as_bytes()).as_str());

    let dec = csv_rows(&ok(&["kem", "decaps", "--params", "ML-KEM-768", "--dk", &keys[0][2], "--ct", &enc[0][1]]));
    assert_eq!(&dec[0][1], &enc[0][2]);
    let lib = decaps(&p, &kp.decaps_key, &Ciphertext(ct.0)).unwrap();
    assert_eq!(&dec[0][1], hex::encode(lib.as_bytes()).as_str());

    let explicit = csv_rows(&ok(&["kem", "keygen", "--params", "ML-KEM-512", "--seed-hex", &"00".repeat(64)]));
    let kp0 = keygen(&KemParams::ml_kem_512(), &[0u8; 64]).unwrap();
    assert_eq!(&explicit[0][1], hex::encode(&kp0.encaps_key).as_str());
}

#[test]
fn kat_validation_exit_codes() {
    let good = data("mlkem_acvp.kat");
    let out = ok(&["kem", "kat", "--file", good.to_str().unwrap()]);
    assert_eq!(csv_rows(&out).len(), 180);

    let sample = data("acvp_sample.json");
    ok(&["kem", "kat", "--file", sample.to_str().unwrap()]);

    // Corrupt one expected ciphertext in a small file.
    let text = std::fs::read_to_string(&good).unwrap();
    let mut records = kemscope::mlkem::kat::parse_kat(&text).unwrap();
    records.truncate(90);
    let idx = records.iter().position(|r| r.ct.is_some() && r.msg.is_some()).unwrap();
    records[idx].ct.as_mut().unwrap()[0] ^= 0x80;
    let bad = tmp("bad.kat");
    std::fs::write(&bad, kemscope::mlkem::kat::write_kat(&records)).unwrap();
    let o = kemscope(&["kem", "kat", "--file", bad.to_str().unwrap()]);
    std::fs::remove_file(&bad).ok();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("failing vectors: {} ", idx + 1)), "{}", stderr(&o));

    let empty = tmp("empty.kat");
    std::fs::write(&empty, "").unwrap();
    let o = kemscope(&["kem", "kat", "--file", empty.to_str().unwrap()]);
    std::fs::remove_file(&empty).ok();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dfr_matches_library_and_is_reproducible() {
    let args = ["dfr", "--params", "ML-KEM-512", "--du", "7", "--trials", "300", "--seed", "42"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["seed"], 42);
    assert_eq!(a["subcommand"], "dfr");
    assert_eq!(a["params_echo"]["trials"], 300);
    let lib = estimate_dfr(&KemParams::ml_kem_512(), &QuantizerSpec::uniform(7, 4).unwrap(), 300, 42).unwrap();
    assert_eq!(a["results"][0]["failures"], lib.failures);
    assert_eq!(a["results"][0]["ci95_high"], lib.ci95_high);

    let semi = csv_rows(&ok(&["dfr", "--quantizer", "semi-compressed", "--du", "10", "--trials", "20", "--seed", "1"]));
    assert_eq!((&semi[0][3], &semi[0][4]), ("12", "32.0"));
    let o = kemscope(&["dfr", "--quantizer", "semi-compressed", "--dv", "4", "--trials", "5", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quantizer_comparison_matches_library() {
    let v = json(&["quantizer", "--pairs", "10:4,5:4", "--trials", "30", "--harvest", "30", "--seed", "8"]);
    let cfg = CompareConfig {
        harvest_encapsulations: 30,
        ..CompareConfig::new(30, 8)
    };
    let lib = compare_quantizers_with(&KemParams::ml_kem_512(), &[(10, 4), (5, 4)], cfg).unwrap();
    assert_eq!(v["results"], serde_json::to_value(&lib.rows).unwrap());
}

#[test]
fn trace_round_trip_and_errors() {
    let path = tmp("trace.txt");
    let text = ok(&["trace", "--emit", "--kex", "MLKEM1024", "--auth", "MLDSA44"]);
    std::fs::write(&path, text).unwrap();
    let rows = csv_rows(&ok(&["trace", "--file", path.to_str().unwrap()]));
    assert_eq!(&rows[0][0], "10321");

    std::fs::write(&path, "c2s,10\ns2c,ten\n").unwrap();
    let o = kemscope(&["trace", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    std::fs::write(&path, "# nothing\n").unwrap();
    let rows = csv_rows(&ok(&["trace", "--file", path.to_str().unwrap()]));
    std::fs::remove_file(&path).ok();
    assert_eq!(&rows[0][0], "0");
}

#[test]
fn rate_matches_library() {
    let v = json(&["rate", "--delay-ms", "20", "--loss", "0.005"]);
    let lib = simulate_handshake_rate(&NetProfile::with_delay(0.020).with_loss(0.005), 0.005, 11.0).unwrap();
    assert_eq!(v["results"][0]["completed"], lib.completed);

    let profile = tmp("profile.json");
    std::fs::write(&profile, r#"{"one_way_delay": 0.05, "rtts_required": 2}"#).unwrap();
    let rows = csv_rows(&ok(&["rate", "--profile", profile.to_str().unwrap(), "--rtts", "3"]));
    std::fs::remove_file(&profile).ok();
    assert_eq!(&rows[0][8], "36");

    let o = kemscope(&["rate", "--loss", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_shape() {
    let o = kemscope(&["bench", "--min-duration", "0.06", "--warmup", "2", "--seed", "1", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["results"].as_array().unwrap().len(), 9);
    assert_eq!(v["results"]["verdicts"].as_array().unwrap().len(), 3);
    assert!(stderr(&o).contains("ordering keygen"));
    let o = kemscope(&["bench", "--params", "ML-KEM-512"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_defaults_and_overrides() {
    let cfg = tmp("run.conf");
    std::fs::write(&cfg, "seed = 42\ntrials = 300\n[dfr]\ndu = 7\nparams = \"ML-KEM-512\"\n").unwrap();
    let from_file = json(&["--config", cfg.to_str().unwrap(), "dfr"]);
    let explicit = json(&["dfr", "--params", "ML-KEM-512", "--du", "7", "--trials", "300", "--seed", "42"]);
    assert_eq!(from_file["results"], explicit["results"]);
    let overridden = json(&["--config", cfg.to_str().unwrap(), "dfr", "--trials", "50"]);
    std::fs::remove_file(&cfg).ok();
    assert_eq!(overridden["params_echo"]["trials"], 50);
}

#[test]
fn omitted_seed_is_drawn_and_printed() {
    let o = kemscope(&["dfr", "--trials", "5", "--json"]);
    assert!(o.status.success());
    let err = stderr(&o);
    let printed: u64 = err
        .lines()
        .find_map(|l| l.strip_prefix("seed: "))
        .expect("seed printed")
        .parse()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], printed);
}

#[test]
fn usage_errors_exit_2() {
    for args in [&["cer"][..], &["cer", "--table1", "--k", "2"], &["nope"], &["dfr", "--bogus"], &["kem"]] {
        assert_eq!(kemscope(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(kemscope(&["--help"]).status.code(), Some(0));
}
