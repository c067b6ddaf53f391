//! `--config FILE`: `key = value` lines turned into `--key value` flags.
//!
//! The flags are inserted right after the subcommand path, so anything given
//! on the command line later wins (every command overrides repeated flags).

use std::ffi::OsString;

/// Subcommands that take a second positional name.
const NESTED: &[&str] = &["lemma-check", "experiment"];

pub fn parse(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        if key.is_empty() || key.starts_with('-') {
            return Err(format!("config line {}: bad key `{key}`", i + 1));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

/// Returns the config path given by `--config PATH` or `--config=PATH`.
fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(|p| p.to_string_lossy().into_owned());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Index just past the subcommand path, given the list of command names.
fn insertion_point(args: &[OsString], commands: &[String]) -> Option<usize> {
    let pos = args.iter().skip(1).position(|a| commands.iter().any(|c| a == c.as_str()))? + 1;
    let nested = NESTED.iter().any(|n| args[pos] == *n);
    Some(if nested { (pos + 2).min(args.len()) } else { pos + 1 })
}

pub fn expand(args: Vec<OsString>, commands: &[String]) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let flags = parse(&text)?;
    let Some(at) = insertion_point(&args, commands) else {
        return Ok(args);
    };
    let mut out = args[..at].to_vec();
    out.extend(flags.into_iter().map(OsString::from));
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
