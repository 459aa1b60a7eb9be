//! `dipne-sim <experiment> [--config FILE] [--out FILE] [--json] [--svg FILE] [--key value ...]`
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error,
//! 3 tolerance breach in `oracle-check`.

use std::fs;
use std::process::ExitCode;

use dipne_core::experiments::{run, Config, Experiment};
use dipne_core::Error;

const USAGE: &str = "usage: dipne-sim <experiment> [--config FILE] [--out FILE] [--json] [--svg FILE] [--key value ...]
experiments: interference, kitten, catfit, numberdiff, match, gaussdrive, oracle-check
  --config FILE   flat key = value file; later --key value pairs override it
  --out FILE      write the CSV here instead of stdout
  --json          print a JSON summary to stdout (the CSV then needs --out)
  --svg FILE      also write a line chart of the table
  --keys          list the experiment's keys and defaults";

struct Args {
    experiment: Experiment,
    config: Config,
    out: Option<String>,
    svg: Option<String>,
    json: bool,
    list_keys: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{msg}\n{USAGE}"))
}

fn parse_args(argv: &[String]) -> Result<Args, Error> {
    let mut it = argv.iter();
    let name = it
        .next()
        .ok_or_else(|| usage_error("missing experiment name"))?;
    let experiment = Experiment::parse(name)?;
    let mut file_config = None;
    let mut overrides = Vec::new();
    let (mut out, mut svg, mut json, mut list_keys) = (None, None, false, false);
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| usage_error(format!("{flag} needs a value")))
        };
        match arg.as_str() {
            "--config" => file_config = Some(value("--config")?),
            "--out" => out = Some(value("--out")?),
            "--svg" => svg = Some(value("--svg")?),
            "--json" => json = true,
            "--keys" => list_keys = true,
            flag if flag.starts_with("--") => {
                let key = &flag[2..];
                if let Some((k, v)) = key.split_once('=') {
                    overrides.push((k.to_string(), v.to_string()));
                } else {
                    overrides.push((key.to_string(), value(flag)?));
                }
            }
            other => return Err(usage_error(format!("unexpected argument '{other}'"))),
        }
    }
    let mut config = match file_config {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
            Config::parse(&text)?
        }
        None => Config::new(),
    };
    for (k, v) in overrides {
        config.set(&k, &v);
    }
    Ok(Args {
        experiment,
        config,
        out,
        svg,
        json,
        list_keys,
    })
}

fn write(path: &str, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}"))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.is_empty() || argv.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return if argv.is_empty() {
            ExitCode::from(2)
        } else {
            ExitCode::SUCCESS
        };
    }
    if argv[0] == "--version" {
        println!("dipne-sim {}", dipne_core::VERSION);
        return ExitCode::SUCCESS;
    }
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if args.list_keys {
        for (k, d) in args.experiment.keys() {
            println!("{k} = {d}");
        }
        return ExitCode::SUCCESS;
    }
    let output = match run(args.experiment, &args.config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::InvalidArgument(_) | Error::Leakage { .. } => 2,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    let csv = output.table.to_csv();
    let mut io = Ok(());
    match &args.out {
        Some(path) => io = io.and(write(path, &csv)),
        None if !args.json => print!("{csv}"),
        None => {}
    }
    if let Some(path) = &args.svg {
        match output.table.to_svg() {
            Some(svg) => io = io.and(write(path, &svg)),
            None => eprintln!(
                "note: {} has no chart; --svg ignored",
                args.experiment.name()
            ),
        }
    }
    if args.json {
        let summary = output.table.summary_json();
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary is valid JSON")
        );
    }
    if let Err(e) = io {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if output.tolerance_breach {
        eprintln!("oracle check failed: tolerance exceeded");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
