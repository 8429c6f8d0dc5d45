//! `key = value` configuration files merged underneath explicit flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use crate::error::{Error, Result};

pub fn parse_config(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::format(
                origin.to_string(),
                format!("line {}: expected 'key = value'", i + 1),
            )
        })?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(Error::format(
                origin.to_string(),
                format!("line {}: empty key", i + 1),
            ));
        }
        let value = v.trim().trim_matches('"').to_string();
        out.insert(key, value);
    }
    Ok(out)
}

fn flag_name(arg: &str) -> Option<&str> {
    let name = arg.strip_prefix("--")?;
    Some(name.split_once('=').map_or(name, |(n, _)| n))
}

/// Pull `--config <file>` out of `args` and append the file's entries for
/// every flag not already given on the command line.
///
/// `true` becomes a bare switch and `false` is dropped; a comma-free value
/// list such as `results = a.json b.json` expands to several values.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            config = Some(
                it.next()
                    .ok_or_else(|| Error::invalid("--config needs a file"))?,
            );
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let path = Path::new(&path);
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let entries = parse_config(&std::fs::read_to_string(path)?, &path.display().to_string())?;
    let given: Vec<String> = rest
        .iter()
        .filter_map(|a| flag_name(&a.to_string_lossy()).map(str::to_string))
        .collect();
    for (k, v) in entries {
        if given.contains(&k) {
            continue;
        }
        match v.as_str() {
            "true" => rest.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                rest.push(format!("--{k}").into());
                rest.extend(v.split_whitespace().map(OsString::from));
            }
        }
    }
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn explicit_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        std::fs::write(
            &cfg,
            "# comment\nseed = 3\ncwd_sigma = 1.5\nlog = true\nexact = false\n",
        )
        .unwrap();
        let args = os(&[
            "tfdkit",
            "transform",
            "--seed=9",
            "--config",
            cfg.to_str().unwrap(),
        ]);
        let out = expand_config(args).unwrap();
        assert_eq!(
            out,
            os(&[
                "tfdkit",
                "transform",
                "--seed=9",
                "--cwd-sigma",
                "1.5",
                "--log"
            ])
        );
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_config("seed 3", "x").is_err());
        assert!(parse_config(" = 3", "x").is_err());
    }
}
