//! Known-answer test ingestion and validation.
//!
//! Vector files are line oriented. Each record is a block of `name = value`
//! lines; records are separated by blank lines and `#` starts a comment.
//!
//! | field    | meaning                                          |
//! |----------|--------------------------------------------------|
//! | `params` | parameter set name, e.g. `ML-KEM-768` (required) |
//! | `id`     | free-form vector label                           |
//! | `seed`   | 64-byte key generation seed `d \|\| z`           |
//! | `d`, `z` | the two 32-byte halves of `seed`                 |
//! | `ek`     | encapsulation key                                |
//! | `dk`     | decapsulation key                                |
//! | `msg`    | 32-byte encapsulation randomness `m`             |
//! | `ct`     | ciphertext                                       |
//! | `ss`     | shared secret                                    |
//!
//! Which stages run depends on which fields are present: keygen needs a
//! seed plus `ek` and/or `dk`; encaps needs `ek`, `msg`, `ct`, `ss`;
//! decaps needs `dk`, `ct`, `ss`.
//!
//! [`acvp`] converts NIST ACVP `internalProjection.json` files into records.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::kem::{decaps, encaps, keygen, Ciphertext};
use super::params::KemParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatRecord {
    pub params: KemParams,
    pub id: Option<String>,
    /// 1-based line of the record's first field.
    pub line: usize,
    pub seed: Option<Vec<u8>>,
    pub ek: Option<Vec<u8>>,
    pub dk: Option<Vec<u8>>,
    pub msg: Option<Vec<u8>>,
    pub ct: Option<Vec<u8>>,
    pub ss: Option<Vec<u8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Keygen,
    Encaps,
    Decaps,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Keygen => "keygen",
            Stage::Encaps => "encaps",
            Stage::Decaps => "decaps",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageResult {
    pub stage: Stage,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VectorResult {
    /// 1-based position in the file.
    pub index: usize,
    pub id: Option<String>,
    pub params: String,
    pub line: usize,
    pub stages: Vec<StageResult>,
}

impl VectorResult {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub vectors: Vec<VectorResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.vectors.iter().all(VectorResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VectorResult> {
        self.vectors.iter().filter(|v| !v.passed())
    }

    pub fn stage_count(&self) -> usize {
        self.vectors.iter().map(|v| v.stages.len()).sum()
    }
}

#[derive(Default)]
struct Pending {
    line: usize,
    params: Option<KemParams>,
    id: Option<String>,
    seed: Option<Vec<u8>>,
    d: Option<Vec<u8>>,
    z: Option<Vec<u8>>,
    ek: Option<Vec<u8>>,
    dk: Option<Vec<u8>>,
    msg: Option<Vec<u8>>,
    ct: Option<Vec<u8>>,
    ss: Option<Vec<u8>>,
    any: bool,
}

impl Pending {
    fn finish(self) -> Result<KatRecord> {
        let line = self.line;
        let params = self
            .params
            .ok_or_else(|| Error::parse(line, "record has no 'params' field"))?;
        let seed = match (self.seed, self.d, self.z) {
            (Some(s), None, None) => Some(s),
            (None, Some(mut d), Some(z)) => {
                d.extend_from_slice(&z);
                Some(d)
            }
            (None, None, None) => None,
            _ => return Err(Error::parse(line, "give either 'seed' or both 'd' and 'z'")),
        };
        let rec = KatRecord {
            params,
            id: self.id,
            line,
            seed,
            ek: self.ek,
            dk: self.dk,
            msg: self.msg,
            ct: self.ct,
            ss: self.ss,
        };
        if rec.stages().is_empty() {
            return Err(Error::parse(line, "record has no complete keygen, encaps or decaps stage"));
        }
        Ok(rec)
    }
}

impl KatRecord {
    pub fn stages(&self) -> Vec<Stage> {
        let mut out = Vec::new();
        if self.seed.is_some() && (self.ek.is_some() || self.dk.is_some()) {
            out.push(Stage::Keygen);
        }
        if self.ek.is_some() && self.msg.is_some() && self.ct.is_some() && self.ss.is_some() {
            out.push(Stage::Encaps);
        }
        if self.dk.is_some() && self.ct.is_some() && self.ss.is_some() {
            out.push(Stage::Decaps);
        }
        out
    }

    fn run(&self, stage: Stage) -> StageResult {
        let outcome = match stage {
            Stage::Keygen => self.check_keygen(),
            Stage::Encaps => self.check_encaps(),
            Stage::Decaps => self.check_decaps(),
        };
        match outcome {
            Ok(()) => StageResult {
                stage,
                passed: true,
                detail: String::new(),
            },
            Err(detail) => StageResult {
                stage,
                passed: false,
                detail,
            },
        }
    }

    fn check_keygen(&self) -> std::result::Result<(), String> {
        let kp = keygen(&self.params, self.seed.as_deref().unwrap()).map_err(|e| e.to_string())?;
        if let Some(ek) = &self.ek {
            if &kp.encaps_key != ek {
                return Err("encapsulation key mismatch".into());
            }
        }
        if let Some(dk) = &self.dk {
            if &kp.decaps_key != dk {
                return Err("decapsulation key mismatch".into());
            }
        }
        Ok(())
    }

    fn check_encaps(&self) -> std::result::Result<(), String> {
        let (ct, ss) = encaps(&self.params, self.ek.as_deref().unwrap(), self.msg.as_deref().unwrap())
            .map_err(|e| e.to_string())?;
        if Some(&ct.0) != self.ct.as_ref() {
            return Err("ciphertext mismatch".into());
        }
        if Some(&ss.0[..]) != self.ss.as_deref() {
            return Err("shared secret mismatch".into());
        }
        Ok(())
    }

    fn check_decaps(&self) -> std::result::Result<(), String> {
        let ct = Ciphertext(self.ct.clone().unwrap());
        let ss = decaps(&self.params, self.dk.as_deref().unwrap(), &ct).map_err(|e| e.to_string())?;
        if Some(&ss.0[..]) != self.ss.as_deref() {
            return Err("shared secret mismatch".into());
        }
        Ok(())
    }
}

/// Parses a vector file's contents.
pub fn parse_kat(text: &str) -> Result<Vec<KatRecord>> {
    let mut records = Vec::new();
    let mut cur = Pending::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if raw.trim().is_empty() && cur.any {
                records.push(std::mem::take(&mut cur).finish()?);
            }
            continue;
        }
        let (name, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, format!("expected 'name = value', got '{line}'")))?;
        let name = name.trim().to_ascii_lowercase();
        let value = value.trim();
        if !cur.any {
            cur.line = lineno;
            cur.any = true;
        }
        let hex_field = |v: &str| hex::decode(v).map_err(|e| Error::parse(lineno, format!("bad hex in '{name}': {e}")));
        let slot = match name.as_str() {
            "params" => {
                cur.params = Some(KemParams::by_name(value).map_err(|e| Error::parse(lineno, e.to_string()))?);
                continue;
            }
            "id" => {
                cur.id = Some(value.to_string());
                continue;
            }
            "seed" => &mut cur.seed,
            "d" => &mut cur.d,
            "z" => &mut cur.z,
            "ek" => &mut cur.ek,
            "dk" => &mut cur.dk,
            "msg" => &mut cur.msg,
            "ct" => &mut cur.ct,
            "ss" => &mut cur.ss,
            _ => return Err(Error::parse(lineno, format!("unknown field '{name}'"))),
        };
        if slot.is_some() {
            return Err(Error::parse(lineno, format!("duplicate field '{name}'")));
        }
        *slot = Some(hex_field(value)?);
    }
    if cur.any {
        records.push(cur.finish()?);
    }
    if records.is_empty() {
        return Err(Error::parse(0, "no test vectors found"));
    }
    Ok(records)
}

/// Serializes records back into the text format.
pub fn write_kat(records: &[KatRecord]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "params = {}", r.params.label);
        if let Some(id) = &r.id {
            let _ = writeln!(out, "id = {id}");
        }
        let fields = [
            ("seed", &r.seed),
            ("ek", &r.ek),
            ("dk", &r.dk),
            ("msg", &r.msg),
            ("ct", &r.ct),
            ("ss", &r.ss),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                let _ = writeln!(out, "{name} = {}", hex::encode(v));
            }
        }
    }
    out
}

/// Runs every stage of every record.
pub fn validate_records(records: &[KatRecord]) -> ValidationReport {
    let vectors = records
        .iter()
        .enumerate()
        .map(|(i, r)| VectorResult {
            index: i + 1,
            id: r.id.clone(),
            params: r.params.label.clone(),
            line: r.line,
            stages: r.stages().into_iter().map(|s| r.run(s)).collect(),
        })
        .collect();
    ValidationReport { vectors }
}

pub fn validate_kat_str(text: &str) -> Result<ValidationReport> {
    Ok(validate_records(&parse_kat(text)?))
}

/// Reads and validates a vector file.
pub fn validate_kat(path: impl AsRef<Path>) -> Result<ValidationReport> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    validate_kat_str(&text)
}

/// Adapter for NIST ACVP ML-KEM vector sets (`internalProjection.json`).
///
/// Field mapping:
///
/// * keyGen groups: `d` + `z` -> `seed`, `ek` -> `ek`, `dk` -> `dk`
/// * encapsulation groups: `ek`, `dk`, `m` -> `msg`, `c` -> `ct`, `k` -> `ss`
/// * decapsulation groups: group-level `dk`, per-test `c` -> `ct`,
///   `k` -> `ss`
///
/// `tcId` becomes the record `id` and `parameterSet` becomes `params`.
pub mod acvp {
    use serde::Deserialize;

    use super::KatRecord;
    use crate::error::{Error, Result};
    use crate::mlkem::params::KemParams;

    #[derive(Deserialize)]
    struct File {
        #[serde(rename = "testGroups")]
        groups: Vec<Group>,
    }

    #[derive(Deserialize)]
    struct Group {
        #[serde(rename = "parameterSet")]
        parameter_set: String,
        #[serde(default)]
        function: Option<String>,
        #[serde(default)]
        dk: Option<String>,
        tests: Vec<Test>,
    }

    #[derive(Deserialize)]
    struct Test {
        #[serde(rename = "tcId")]
        tc_id: u64,
        d: Option<String>,
        z: Option<String>,
        ek: Option<String>,
        dk: Option<String>,
        m: Option<String>,
        c: Option<String>,
        k: Option<String>,
    }

    fn unhex(v: &Option<String>) -> Result<Option<Vec<u8>>> {
        v.as_deref()
            .map(|s| hex::decode(s).map_err(|e| Error::input(format!("bad hex in ACVP file: {e}"))))
            .transpose()
    }

    pub fn records_from_json(json: &str) -> Result<Vec<KatRecord>> {
        let file: File = serde_json::from_str(json).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let mut out = Vec::new();
        for g in &file.groups {
            let params = KemParams::by_name(&g.parameter_set)?;
            let decaps_group = g.function.as_deref() == Some("decapsulation");
            for t in &g.tests {
                let seed = match (unhex(&t.d)?, unhex(&t.z)?) {
                    (Some(mut d), Some(z)) => {
                        d.extend_from_slice(&z);
                        Some(d)
                    }
                    _ => None,
                };
                let (ek, dk) = if decaps_group {
                    (None, unhex(&g.dk)?)
                } else {
                    (unhex(&t.ek)?, unhex(&t.dk)?)
                };
                out.push(KatRecord {
                    params: params.clone(),
                    id: Some(format!("tc{}", t.tc_id)),
                    line: 0,
                    seed,
                    ek,
                    dk,
                    msg: unhex(&t.m)?,
                    ct: unhex(&t.c)?,
                    ss: unhex(&t.k)?,
                });
            }
        }
        if out.is_empty() {
            return Err(Error::input("ACVP file contains no tests"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_vector() -> String {
        let p = KemParams::ml_kem_512();
        let seed = [7u8; 64];
        let kp = keygen(&p, &seed).unwrap();
        let (ct, ss) = encaps(&p, &kp.encaps_key, &[1u8; 32]).unwrap();
        let rec = KatRecord {
            params: p,
            id: Some("self".into()),
            line: 0,
            seed: Some(seed.to_vec()),
            ek: Some(kp.encaps_key),
            dk: Some(kp.decaps_key),
            msg: Some(vec![1u8; 32]),
            ct: Some(ct.0),
            ss: Some(ss.0.to_vec()),
        };
        write_kat(&[rec.clone(), rec])
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(parse_kat(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_kat("# only a comment\n\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn bad_hex_reports_line() {
        let text = "params = ML-KEM-512\nek = zz\n";
        match parse_kat(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_and_missing_params() {
        assert!(matches!(parse_kat("params = ML-KEM-512\nfoo = 00\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_kat("ek = 00\ndk = 00\nct = 00\nss = 00\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip_through_text_format() {
        let text = sample_vector();
        let recs = parse_kat(&text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].line, 10);
        assert_eq!(recs[0].stages(), vec![Stage::Keygen, Stage::Encaps, Stage::Decaps]);
        let report = validate_records(&recs);
        assert!(report.all_passed());
        assert_eq!(report.stage_count(), 6);
    }

    #[test]
    fn corrupted_ciphertext_fails_only_that_vector() {
        let text = sample_vector();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let ct_line = lines.iter().rposition(|l| l.starts_with("ct = ")).unwrap();
        let mut ct = lines[ct_line].clone().into_bytes();
        let last = ct.len() - 1;
        ct[last] = if ct[last] == b'0' { b'1' } else { b'0' };
        lines[ct_line] = String::from_utf8(ct).unwrap();
        let report = validate_kat_str(&lines.join("\n")).unwrap();
        assert!(!report.all_passed());
        let failed: Vec<_> = report.failures().map(|v| v.index).collect();
        assert_eq!(failed, vec![2]);
        let v = &report.vectors[1];
        assert!(v.stages.iter().any(|s| s.stage == Stage::Encaps && !s.passed));
    }
}
