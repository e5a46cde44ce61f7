//! `--config` support: TOML keys become flags unless the same flag was given
//! on the command line.
//!
//! Top-level keys set global flags; tables named after subcommands set that
//! subcommand's flags, e.g. `[score]` or `[forge.emit]`.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command, CommandFactory};
use toml::{Table, Value};

use crate::args::Cli;
use crate::exit::Failure;

fn scalar(key: &str, v: &Value) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(Failure::Usage(format!("config key `{key}`: expected a scalar value"))),
    }
}

fn inject(cmd: &Command, matches: &ArgMatches, table: &Table, scope: &str, out: &mut Vec<OsString>) -> Result<(), Failure> {
    for (key, value) in table {
        if value.is_table() {
            continue;
        }
        let long = key.replace('_', "-");
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| Failure::Usage(format!("config key `{key}` is not a flag of `{scope}`")))?;
        let id = arg.get_id().as_str();
        if matches.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = OsString::from(format!("--{long}"));
        match arg.get_action() {
            ArgAction::SetTrue => match value {
                Value::Boolean(true) => out.push(flag),
                Value::Boolean(false) => {}
                _ => return Err(Failure::Usage(format!("config key `{key}`: expected true or false"))),
            },
            ArgAction::Count => {
                let n = value
                    .as_integer()
                    .filter(|n| *n >= 0)
                    .ok_or_else(|| Failure::Usage(format!("config key `{key}`: expected a count")))?;
                out.extend((0..n).map(|_| flag.clone()));
            }
            _ => {
                let values: Vec<String> = match value {
                    Value::Array(items) => items.iter().map(|v| scalar(key, v)).collect::<Result<_, _>>()?,
                    v => vec![scalar(key, v)?],
                };
                let per_occurrence = arg.get_num_args().map_or(1, |r| r.min_values().max(1));
                for chunk in values.chunks(per_occurrence) {
                    out.push(flag.clone());
                    out.extend(chunk.iter().map(OsString::from));
                }
            }
        }
    }
    Ok(())
}

/// Returns `argv` extended with the flags the config file contributes.
pub fn merge(argv: Vec<OsString>, matches: &ArgMatches, path: &Path) -> Result<Vec<OsString>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut root = Cli::command();
    root.build();

    let mut extra = Vec::new();
    inject(&root, matches, &table, "siex", &mut extra)?;
    let (mut cmd, mut m, mut t, mut scope) = (&root, matches, Some(&table), String::from("siex"));
    while let Some((name, sub)) = m.subcommand() {
        cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
        scope = format!("{scope} {name}");
        t = t.and_then(|t| t.get(name)).and_then(Value::as_table);
        if let Some(section) = t {
            inject(cmd, sub, section, &scope, &mut extra)?;
        }
        m = sub;
    }
    let mut out = argv;
    out.extend(extra);
    Ok(out)
}
