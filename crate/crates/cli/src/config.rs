//! Merges a JSON config file into the command line.
//!
//! Each key becomes a long flag (`snr1_db` -> `--snr1-db`) inserted right
//! after the subcommand, skipping quantities the user already set on the
//! command line.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::path::Path;

use serde_json::Value;

const SUBCOMMANDS: [&str; 5] = ["region", "sweep", "gap", "mgain", "verify"];
const PER_LINK: [&str; 4] = ["snr1", "snr2", "inr", "snr-side"];
const EXPONENTS: [&str; 3] = ["snr-db", "mu", "nu"];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Quantity a flag sets: `snr1-db` and `snr1` are the same quantity.
fn stem(flag: &str) -> &str {
    let name = flag.split('=').next().unwrap_or(flag);
    if name == "snr-db" {
        return name;
    }
    name.strip_suffix("-db").unwrap_or(name)
}

pub fn expand(args: Vec<String>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args.into_iter().map(OsString::from).collect());
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("invalid config {path}: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path} must hold a JSON object"));
    };

    let given: HashSet<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|f| stem(f).to_string())
        .collect();
    let uses_exponents = EXPONENTS.iter().any(|e| given.contains(*e));
    let uses_links = PER_LINK.iter().any(|e| given.contains(*e));

    let mut extra = Vec::new();
    let mut command = None;
    for (key, v) in map {
        let flag = key.replace('_', "-");
        if flag == "command" {
            command = v.as_str().map(str::to_string);
            continue;
        }
        let s = stem(&flag);
        if flag == "config"
            || given.contains(s)
            || (uses_exponents && PER_LINK.contains(&s))
            || (uses_links && EXPONENTS.contains(&s))
        {
            continue;
        }
        let items = match v {
            Value::Array(items) => items,
            other => vec![other],
        };
        for item in items {
            match item {
                Value::Bool(true) => extra.push(format!("--{flag}")),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => {
                    extra.push(format!("--{flag}"));
                    extra.push(s);
                }
                other => {
                    extra.push(format!("--{flag}"));
                    extra.push(other.to_string());
                }
            }
        }
    }

    let mut out = args;
    let pos = match out.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        Some(p) => p + 1,
        None => match command {
            Some(c) => {
                out.insert(1, c);
                2
            }
            None => out.len(),
        },
    };
    out.splice(pos..pos, extra);
    Ok(out.into_iter().map(OsString::from).collect())
}
