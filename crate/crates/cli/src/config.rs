//! `--config` files: `key = value` lines supplying default flag values.
//!
//! Keys are long flag names (`-` or `_` separated). Keys before any
//! `[section]` header apply to every subcommand that accepts them; keys
//! under `[name]` apply only when subcommand `name` runs. Values may be
//! quoted. Flags given on the command line take precedence.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    section: Option<String>,
    key: String,
    value: String,
    line: usize,
}

fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut section = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.trim().to_string());
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected 'key = value'", i + 1))?;
        let v = v.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(v);
        out.push(Entry {
            section: section.clone(),
            key: k.trim().replace('_', "-"),
            value: v.to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Returns `argv` extended with flags from the `--config` file, if any.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let entries = parse(&text)?;

    // Walk to the subcommand being invoked.
    let root = Cli::command();
    let mut cmd = &root;
    let mut path_names = Vec::new();
    for a in argv.iter().skip(1) {
        let s = a.to_string_lossy();
        if s.starts_with('-') {
            continue;
        }
        if let Some(sub) = cmd.find_subcommand(s.as_ref()) {
            path_names.push(sub.get_name().to_string());
            cmd = sub;
        }
    }

    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| {
            let s = a.to_string_lossy();
            s.strip_prefix("--").map(|f| f.split('=').next().unwrap_or("").to_string())
        })
        .collect();

    let mut out = argv.clone();
    for e in entries {
        if e.key == "config" {
            continue;
        }
        if let Some(sec) = &e.section {
            if !path_names.contains(sec) {
                continue;
            }
        }
        let arg = cmd
            .get_arguments()
            .chain(root.get_arguments().filter(|a| a.is_global_set()))
            .find(|a| a.get_long() == Some(e.key.as_str()));
        let Some(arg) = arg else {
            eprintln!("config line {}: '{}' does not apply here; ignored", e.line, e.key);
            continue;
        };
        if given.contains(&e.key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match e.value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{}", e.key).into()),
                "false" | "0" | "no" => {}
                other => return Err(format!("config line {}: '{other}' is not a boolean", e.line)),
            },
            _ => {
                out.push(format!("--{}", e.key).into());
                out.push(e.value.into());
            }
        }
    }
    Ok(out)
}
