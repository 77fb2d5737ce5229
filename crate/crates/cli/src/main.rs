use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use focklab_cli::{emit_manifest, run_experiment, write_report, CliError, ExperimentConfig, EXPERIMENTS};

fn common_args(cmd: Command) -> Command {
    cmd.arg(
        Arg::new("out")
            .long("out")
            .value_name("DIR")
            .value_parser(value_parser!(PathBuf))
            .help("directory for the JSON and CSV reports"),
    )
    .arg(
        Arg::new("seed")
            .long("seed")
            .value_name("N")
            .value_parser(value_parser!(u64))
            .help("seed for randomised experiments"),
    )
    .arg(
        Arg::new("rel_tol")
            .long("quad.rel-tol")
            .value_name("X")
            .value_parser(value_parser!(f64))
            .help("relative tolerance of the quadrature"),
    )
    .arg(
        Arg::new("set")
            .long("set")
            .value_name("KEY=VALUE")
            .action(ArgAction::Append)
            .help("override a config key; VALUE is TOML, or a bare string"),
    )
}

fn cli() -> Command {
    let mut cmd = Command::new("focklab")
        .about("Numerical experiments on weighted Fock spaces")
        .subcommand_required(true)
        .subcommand(Command::new("manifest").about("list experiments, parameters and object grammars"))
        .subcommand(common_args(
            Command::new("run").about("run the experiment named in a config file").arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .required(true)
                    .value_parser(value_parser!(PathBuf)),
            ),
        ));
    for e in EXPERIMENTS {
        cmd = cmd.subcommand(common_args(
            Command::new(e.name).about(e.summary).arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .value_parser(value_parser!(PathBuf)),
            ),
        ));
    }
    cmd
}

fn parse_value(text: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

fn load_config(name: Option<&str>, m: &ArgMatches) -> Result<ExperimentConfig, CliError> {
    let mut table = match m.get_one::<PathBuf>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str::<toml::Table>(&text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?
        }
        None => toml::Table::new(),
    };
    for kv in m.get_many::<String>("set").into_iter().flatten() {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        let mut path: Vec<&str> = key.trim().split('.').collect();
        let last = path.pop().unwrap_or_default();
        let mut t = &mut table;
        for part in path {
            t = t
                .entry(part)
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| CliError::Usage(format!("`{part}` is not a table")))?;
        }
        t.insert(last.to_string(), parse_value(value.trim()));
    }
    if let Some(name) = name {
        if let Some(existing) = table.get("experiment").and_then(|v| v.as_str()) {
            if existing != name {
                return Err(CliError::Usage(format!("config is for `{existing}`, not `{name}`")));
            }
        }
        table.insert("experiment".into(), toml::Value::String(name.to_string()));
    }
    let mut config: ExperimentConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("bad config: {e}")))?;
    if let Some(dir) = m.get_one::<PathBuf>("out") {
        config.output.dir = Some(dir.clone());
    }
    if let Some(&seed) = m.get_one::<u64>("seed") {
        config.seed = seed;
    }
    if let Some(&tol) = m.get_one::<f64>("rel_tol") {
        config.quad.rel_tol = tol;
    }
    Ok(config)
}

fn execute(name: Option<&str>, m: &ArgMatches) -> Result<ExitCode, CliError> {
    let config = load_config(name, m)?;
    let report = run_experiment(&config)?;
    let (json, csv) = write_report(&report)?;
    eprintln!(
        "{}: {} rows, {} failures -> {}, {}",
        config.experiment,
        report.rows.len(),
        report.failures,
        json.display(),
        csv.display()
    );
    Ok(if report.failures > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match matches.subcommand() {
        Some(("manifest", _)) => {
            print!("{}", emit_manifest());
            Ok(ExitCode::SUCCESS)
        }
        Some(("run", m)) => execute(None, m),
        Some((name, m)) => execute(Some(name), m),
        None => unreachable!("a subcommand is required"),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("focklab: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Io(_) => 1,
            })
        }
    }
}
