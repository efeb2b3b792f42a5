//! `key=value` config files. Keys are long flag names of the subcommand;
//! anything given on the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command};

use crate::CliError;

pub fn load(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1))
        })?;
        let key = key.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("{}:{}: empty key", path.display(), n + 1)));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Usage(format!(
                "{}:{}: duplicate key `{key}`",
                path.display(),
                n + 1
            )));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Appends `--key value` for every config entry the command line left unset.
pub fn merge(
    mut argv: Vec<OsString>,
    command: &mut Command,
    matches: &ArgMatches,
    entries: &[(String, String)],
) -> Result<Vec<OsString>, CliError> {
    command.build();
    let Some((name, sub_matches)) = matches.subcommand() else {
        return Ok(argv);
    };
    let sub = command
        .find_subcommand(name)
        .expect("matched subcommand exists");
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::Usage("config files cannot set `config`".into()));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| {
                CliError::Usage(format!("config key `{key}` is not a flag of `{name}`"))
            })?;
        if sub_matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        if arg.get_action().takes_values() {
            argv.push(format!("--{key}").into());
            argv.extend(value.split_whitespace().map(OsString::from));
        } else {
            match value.as_str() {
                "true" => argv.push(format!("--{key}").into()),
                "false" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "config key `{key}` expects true or false, got `{value}`"
                    )))
                }
            }
        }
    }
    Ok(argv)
}
