use kemscope_web::{cer_explorer, dfr_curve, handshake_model, MAX_TRIALS};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("export succeeds")).expect("valid JSON")
}

#[test]
fn cer_explorer_reports_bits_and_reference_table() {
    let v = parse(cer_explorer(3, 10, 4));
    // 3 * 256 * 10 + 256 * 4 bits over a 256-bit key.
    assert_eq!(v["record"]["B_ct_bits"], 8704);
    assert_eq!(v["record"]["CER"], 34.0);
    assert_eq!(v["ciphertext_bytes"], 1088);
    assert_eq!(v["encaps_key_bytes"], 1184);
    assert_eq!(v["reference"].as_array().unwrap().len(), 6);
}

#[test]
fn cer_explorer_rejects_bad_widths() {
    assert!(cer_explorer(2, 0, 4).is_err());
    assert!(cer_explorer(2, 10, 13).is_err());
    assert!(cer_explorer(0, 10, 4).is_err());
}

#[test]
fn dfr_curve_has_one_point_per_width() {
    let v = parse(dfr_curve(2, 4, 5, 10, 50, 7));
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 6);
    assert_eq!(pts[0]["du"], 5);
    // Five bits for u destroys the message; ten bits never fails.
    assert_eq!(pts[0]["failures"], 50);
    assert_eq!(pts[5]["failures"], 0);
    for p in pts {
        let lo = p["ci95_low"].as_f64().unwrap();
        let hi = p["ci95_high"].as_f64().unwrap();
        assert!(lo <= p["rate"].as_f64().unwrap() && p["rate"].as_f64().unwrap() <= hi);
    }
}

#[test]
fn dfr_curve_is_deterministic_per_seed() {
    assert_eq!(dfr_curve(2, 4, 6, 7, 40, 3), dfr_curve(2, 4, 6, 7, 40, 3));
}

#[test]
fn dfr_curve_validates_inputs() {
    assert!(dfr_curve(2, 4, 8, 6, 10, 0).is_err());
    assert!(dfr_curve(2, 4, 6, 8, 0, 0).is_err());
    assert!(dfr_curve(2, 4, 6, 8, MAX_TRIALS + 1, 0).is_err());
}

#[test]
fn handshake_model_matches_observed_payload() {
    let v = parse(handshake_model("X25519MLKEM768", "MLDSA44", 50.0, 0.0, 5.0, 11.0));
    assert_eq!(v["total_bytes"], 9521);
    // 1216 client + 1120 server keyshare bytes.
    assert_eq!(v["kex_bytes"], 2336);
    // Three round trips of 100 ms plus 5 ms of crypto per connection.
    assert!((v["connection_time"].as_f64().unwrap() - 0.305).abs() < 1e-12);
    assert_eq!(v["completed"], 36);
}

#[test]
fn handshake_sweep_decreases_with_delay() {
    let v = parse(handshake_model("mlkem512", "rsa", 20.0, 0.005, 5.0, 11.0));
    let counts: Vec<u64> = v["delay_sweep"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["completed"].as_u64().unwrap())
        .collect();
    assert_eq!(counts.len(), 21);
    assert!(counts.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn handshake_model_rejects_unknown_groups() {
    assert!(handshake_model("P-256", "RSA", 10.0, 0.0, 5.0, 11.0).is_err());
    assert!(handshake_model("MLKEM768", "ECDSA", 10.0, 0.0, 5.0, 11.0).is_err());
    assert!(handshake_model("MLKEM768", "RSA", 10.0, 1.5, 5.0, 11.0).is_err());
}
