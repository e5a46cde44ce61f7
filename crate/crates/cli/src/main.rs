/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout().lock(), $($arg)*)?
    }};
}

mod args;
mod commands;
mod config;
mod exit;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command, ForgeCommand};

fn parse(argv: Vec<OsString>) -> Result<Cli, ExitCode> {
    let clap_exit = |e: clap::Error| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(exit::OK),
            _ => ExitCode::from(exit::USAGE),
        }
    };
    let strict = Cli::command().try_get_matches_from(&argv);
    if let Err(e) = &strict {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            return Err(clap_exit(strict.unwrap_err()));
        }
    }
    // required flags may come from the config file, so look for it leniently
    let lenient = Cli::command().ignore_errors(true).try_get_matches_from(&argv);
    let Some((path, matches)) = lenient
        .ok()
        .and_then(|m| m.get_one::<std::path::PathBuf>("config").cloned().map(|p| (p, m)))
    else {
        let matches = strict.map_err(clap_exit)?;
        return Cli::from_arg_matches(&matches).map_err(clap_exit);
    };
    let merged = config::merge(argv, &matches, &path).map_err(|f| {
        eprintln!("error: {f}");
        ExitCode::from(exit::code_for(&f.into()))
    })?;
    let matches = Cli::command().try_get_matches_from(merged).map_err(clap_exit)?;
    Cli::from_arg_matches(&matches).map_err(clap_exit)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    use commands::{eval, forge};
    match &cli.command {
        Command::Forge(ForgeCommand::Generate(a)) => forge::generate(a, cli.jobs),
        Command::Forge(ForgeCommand::Validate(a)) => forge::validate(a),
        Command::Forge(ForgeCommand::Emit(a)) => forge::emit(a),
        Command::Score(a) => eval::score(a),
        Command::Sigtest(a) => eval::sigtest(a),
        Command::Winrate(a) => eval::winrate(a),
        Command::Curve(a) => eval::curve(a),
        Command::Report(a) => eval::report(a),
        Command::Plot(a) => eval::plot(a),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) if is_broken_pipe(&e) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e))
        }
    }
}
