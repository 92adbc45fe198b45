use std::collections::BTreeMap;
use std::path::PathBuf;

use kemscope::mlkem::kat::{acvp, parse_kat, validate_kat_str, validate_records, write_kat};
use kemscope::mlkem::validate_kat;
use kemscope::Error;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn official_vectors_pass_for_every_parameter_set() {
    let report = validate_kat(data("mlkem_acvp.kat")).unwrap();
    let failures: Vec<_> = report.failures().map(|v| (v.index, v.id.clone())).collect();
    assert!(failures.is_empty(), "failing vectors: {failures:?}");

    let mut per_set: BTreeMap<&str, usize> = BTreeMap::new();
    for v in &report.vectors {
        *per_set.entry(v.params.as_str()).or_default() += 1;
    }
    assert_eq!(per_set.len(), 3, "{per_set:?}");
    assert_eq!(report.vectors.len(), 180);
    assert!(report.stage_count() >= 180);
}

#[test]
fn corrupted_ciphertext_fails_only_that_vector() {
    let text = std::fs::read_to_string(data("mlkem_acvp.kat")).unwrap();
    let mut records = parse_kat(&text).unwrap();
    records.truncate(120);
    let target = records.iter().position(|r| r.ct.is_some() && r.msg.is_some()).unwrap();
    records[target].ct.as_mut().unwrap()[5] ^= 0x01;

    let report = validate_kat_str(&write_kat(&records)).unwrap();
    let failed: Vec<usize> = report.failures().map(|v| v.index).collect();
    assert_eq!(failed, vec![target + 1]);
}

#[test]
fn acvp_json_adapter() {
    let json = std::fs::read_to_string(data("acvp_sample.json")).unwrap();
    let records = acvp::records_from_json(&json).unwrap();
    assert!(!records.is_empty());
    let report = validate_records(&records);
    assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());

    // Round trip through the text format keeps every field.
    let reparsed = parse_kat(&write_kat(&records)).unwrap();
    assert_eq!(reparsed.len(), records.len());
    for (a, b) in records.iter().zip(&reparsed) {
        assert_eq!((&a.seed, &a.ek, &a.dk, &a.ct, &a.ss), (&b.seed, &b.ek, &b.dk, &b.ct, &b.ss));
    }
}

#[test]
fn malformed_files() {
    assert!(matches!(validate_kat_str(""), Err(Error::Parse { .. })));
    match validate_kat_str("params = ML-KEM-512\nseed = zz\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(validate_kat(data("missing.kat")).is_err());
}
