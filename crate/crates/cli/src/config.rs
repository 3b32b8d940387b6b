//! Optional `key=value` defaults file. Each entry becomes `--key value` and
//! is placed ahead of the command-line flags, which therefore win.

use std::ffi::OsString;

use crate::Failure;

/// Parses a defaults file. Blank lines and `#` comments are skipped; keys are
/// flag names without the leading dashes.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, Failure> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Failure::config(format!("config line {}: expected key=value, got {line:?}", n + 1)));
        };
        let k = k.trim();
        if k.is_empty() || k.starts_with('-') || k == "config" {
            return Err(Failure::config(format!("config line {}: invalid key {k:?}", n + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config PATH` / `--config=PATH` from `args` and splices the
/// file's entries in right after the subcommand name.
pub fn expand(mut args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--" {
            break;
        }
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err(Failure::config("--config needs a file path"));
            }
            if path.is_some() {
                return Err(Failure::config("--config given more than once"));
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            if path.is_some() {
                return Err(Failure::config("--config given more than once"));
            }
            path = Some(OsString::from(p));
            args.remove(i);
            continue;
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let entries = parse_config(&text)?;
    // the subcommand is the first argument; without one clap reports the error
    if args.len() < 2 || args[1].to_string_lossy().starts_with('-') {
        return Ok(args);
    }
    let injected = entries.into_iter().flat_map(|(k, v)| [OsString::from(format!("--{k}")), OsString::from(v)]);
    let tail = args.split_off(2);
    args.extend(injected);
    args.extend(tail);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let e = parse_config("# defaults\nsmax = 5\n\ntol=1e-8\n").unwrap();
        assert_eq!(e, vec![("smax".into(), "5".into()), ("tol".into(), "1e-8".into())]);
        assert!(parse_config("smax").is_err());
        assert!(parse_config("--smax=1").is_err());
        assert!(parse_config("config=x").is_err());
    }

    #[test]
    fn entries_go_before_user_flags() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("c.cfg");
        std::fs::write(&f, "smax=5\n").unwrap();
        let args = os(&["hg", "trace", "--config", f.to_str().unwrap(), "--smax", "2"]);
        let got = expand(args).unwrap();
        assert_eq!(got, os(&["hg", "trace", "--smax", "5", "--smax", "2"]));
        let args = os(&["hg", "trace", &format!("--config={}", f.display())]);
        assert_eq!(expand(args).unwrap(), os(&["hg", "trace", "--smax", "5"]));
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(expand(os(&["hg", "trace", "--config", "/nonexistent/x.cfg"])).is_err());
        assert!(expand(os(&["hg", "trace", "--config"])).is_err());
    }
}
