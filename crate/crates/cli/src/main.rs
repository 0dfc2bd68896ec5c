mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};

use config::{flag_name, keys_for, Cmd, RunConfig};
use error::CliError;

fn cli() -> Command {
    let mut app = Command::new("crossplat")
        .about("Word embeddings from software Q&A, transferred to ranking and classification")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cmd in Cmd::ALL {
        let mut sub = Command::new(cmd.name()).about(cmd.about()).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("key = value file; flags override it"),
        );
        for key in keys_for(cmd) {
            let mut help = key.help.to_string();
            if let Some(d) = key.default {
                help.push_str(&format!(" [default: {d}]"));
            }
            sub = sub.arg(
                Arg::new(key.name)
                    .long(flag_name(key.name))
                    .value_name("VALUE")
                    .action(ArgAction::Set)
                    .help(help),
            );
        }
        app = app.subcommand(sub);
    }
    app
}

fn run() -> Result<(), CliError> {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            let text = e.render().to_string();
            let text = text.trim_end();
            return Err(CliError::Usage(text.strip_prefix("error: ").unwrap_or(text).to_string()));
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = Cmd::from_name(name).expect("registered subcommand");
    let flags: Vec<(&'static str, String)> = keys_for(cmd)
        .filter_map(|k| sub.get_one::<String>(k.name).map(|v| (k.name, v.clone())))
        .collect();
    let cfg = RunConfig::resolve(cmd, sub.get_one::<PathBuf>("config").map(PathBuf::as_path), flags)?;
    commands::dispatch(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
