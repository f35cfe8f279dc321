use crate::error::{Error, Result};

/// Expands `--config FILE` into flag arguments.
///
/// The file holds `key=value` lines (keys are long flag names without
/// dashes; blank lines and `#` comments ignored). Injected flags are placed
/// directly after the subcommand so later command-line flags override them.
pub fn expand_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let mut config_path: Option<String> = None;
    let mut rest: Vec<String> = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            match it.next() {
                Some(p) => config_path = Some(p),
                None => return Err(Error::input("--config requires a file path")),
            }
        } else if let Some(p) = arg.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config_path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Input(format!("cannot read config {path}: {e}")))?;
    let mut injected = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Input(format!(
                "config {path}:{}: expected key=value",
                lineno + 1
            )));
        };
        injected.push(format!("--{}", key.trim()));
        injected.push(value.trim().to_string());
    }
    // argv = [bin, subcommand, ...user flags]; inject after the subcommand
    if rest.len() < 2 {
        return Err(Error::input("--config requires a subcommand"));
    }
    let mut out = Vec::with_capacity(rest.len() + injected.len());
    out.push(rest[0].clone());
    out.push(rest[1].clone());
    out.extend(injected);
    out.extend(rest.into_iter().skip(2));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn injects_after_subcommand_and_keeps_user_flags_last() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nk=2\nsamples=32").unwrap();
        let path = f.path().to_str().unwrap().to_string();
        let argv = vec![
            "kporo".into(),
            "porosity".into(),
            "--config".into(),
            path,
            "--k".into(),
            "1".into(),
        ];
        let out = expand_config_args(argv).unwrap();
        assert_eq!(
            out,
            vec!["kporo", "porosity", "--k", "2", "--samples", "32", "--k", "1"]
        );
    }

    #[test]
    fn no_config_is_identity() {
        let argv = vec!["kporo".into(), "verify".into()];
        assert_eq!(expand_config_args(argv.clone()).unwrap(), argv);
    }
}
