//! `key = value` config files, merged into the command line as flags that
//! explicit arguments override.

use std::ffi::OsString;

use clap::CommandFactory;

use crate::args::Cli;

const SUBCOMMANDS: [&str; 5] = ["design", "feasible", "simulate", "bounds", "scan"];
const GLOBAL_VALUED: [&str; 5] = ["--seed", "--trials", "--out", "--config", "--workers"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`, got {raw:?}", lineno + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", lineno + 1));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

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

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if SUBCOMMANDS.contains(&a) {
            return Some(i);
        }
        i += if GLOBAL_VALUED.contains(&a) { 2 } else { 1 };
    }
    None
}

/// Turns config pairs into flags understood by `subcommand`.
fn config_tokens(subcommand: &str, pairs: &[(String, String)]) -> Result<Vec<String>, String> {
    let root = Cli::command();
    let sub = root.find_subcommand(subcommand).ok_or_else(|| format!("unknown subcommand {subcommand}"))?;
    let mut tokens = Vec::new();
    for (key, value) in pairs {
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("unknown config key {key:?} for {subcommand}"))?;
        if arg.get_action().takes_values() {
            tokens.push(format!("--{key}"));
            tokens.push(value.split(',').map(str::trim).collect::<Vec<_>>().join(","));
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => tokens.push(format!("--{key}")),
                "false" | "no" | "0" => {}
                other => return Err(format!("config key {key:?} expects true or false, got {other:?}")),
            }
        }
    }
    Ok(tokens)
}

/// Rewrites `args` so values from `--config` come first and explicit flags win.
pub fn merge_config(args: Vec<OsString>, read: impl Fn(&str) -> std::io::Result<String>) -> Result<Vec<OsString>, String> {
    let strings: Vec<String> = match args.iter().map(|a| a.clone().into_string()).collect::<Result<_, _>>() {
        Ok(s) => s,
        Err(_) => return Ok(args),
    };
    let Some(path) = config_path(&strings) else {
        return Ok(args);
    };
    let Some(sub) = subcommand_index(&strings) else {
        return Ok(args);
    };
    let text = read(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let tokens = config_tokens(&strings[sub], &parse_config(&text)?)?;
    let mut merged = vec![strings[0].clone(), strings[sub].clone()];
    merged.extend(tokens);
    merged.extend(strings[1..sub].iter().cloned());
    merged.extend(strings[sub + 1..].iter().cloned());
    Ok(merged.into_iter().map(OsString::from).collect())
}
