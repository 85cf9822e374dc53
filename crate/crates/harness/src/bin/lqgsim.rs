use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lqgsim_harness::{
    find, of_module, report, run_experiment, ExperimentConfig, HarnessError, Module, RunRecord, Verdict,
};

#[derive(Parser)]
#[command(name = "lqgsim", version, about = "Run registered experiments and report verdicts")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Root seed for every random stream of the run
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of samples (paths, spheres, fields) where the experiment draws them
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config with `id`, `params`, `seed`, `n`, `out`; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Run {
    /// Experiment name within the module (`lqgsim <module> --list` shows them)
    name: Option<String>,
    /// Parameter override `key=value`, value in JSON (strings may be bare)
    #[arg(long = "param", short = 'p', value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// List the experiments of this module
    #[arg(long)]
    list: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Stable process experiments
    Levy(Run),
    /// Branching process experiments
    Csbp(Run),
    /// Sphere ensemble tail experiments
    Sphere(Run),
    /// Growth bookkeeping experiments
    Qle(Run),
    /// Exact map enumeration experiments
    Maps(Run),
    /// LQG measure experiments
    Lqg(Run),
    /// Aggregate run records into a verdict table
    Report {
        /// Run record JSON files
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
}

fn parse_param(s: &str) -> Result<(String, serde_json::Value), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("`{s}` is not KEY=VALUE"))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

fn run(module: Module, args: Run, global: Global) -> Result<ExitCode, String> {
    if args.list {
        for e in of_module(module) {
            println!("{:<16} {}", e.short_name(), e.claim);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut config = match &global.config {
        Some(path) => ExperimentConfig::from_json_file(path).map_err(|e| e.to_string())?,
        None => ExperimentConfig::new(""),
    };
    if let Some(name) = args.name {
        config.id = format!("{module}-{name}");
    }
    if config.id.is_empty() {
        let names: Vec<&str> = of_module(module).map(|e| e.short_name()).collect();
        return Err(format!("name an experiment: {}", names.join(", ")));
    }
    let exp = find(&config.id).map_err(|e| e.to_string())?;
    if exp.module != module {
        return Err(format!("`{}` belongs to `{}`, not `{module}`", exp.id, exp.module));
    }
    for p in &args.params {
        let (k, v) = parse_param(p)?;
        config.params.insert(k, v);
    }
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(n) = global.n {
        config.n_samples = Some(n);
    }
    if let Some(out) = global.out {
        config.out = out;
    }
    let record = run_experiment(&config).map_err(|e| e.to_string())?;
    let doc = report(std::slice::from_ref(&record)).map_err(|e| e.to_string())?;
    print!("{}", doc.to_text());
    eprintln!(
        "wrote {} and {}",
        record.config.csv_path().display(),
        record.config.json_path().display()
    );
    Ok(exit_code(record.verdict))
}

fn exit_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
        Verdict::Inconclusive => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Levy(a) => run(Module::Levy, a, cli.global),
        Command::Csbp(a) => run(Module::Csbp, a, cli.global),
        Command::Sphere(a) => run(Module::Sphere, a, cli.global),
        Command::Qle(a) => run(Module::Qle, a, cli.global),
        Command::Maps(a) => run(Module::Maps, a, cli.global),
        Command::Lqg(a) => run(Module::Lqg, a, cli.global),
        Command::Report { records } => (|| {
            let records = records
                .iter()
                .map(|p| RunRecord::load(p))
                .collect::<Result<Vec<_>, HarnessError>>()
                .map_err(|e| e.to_string())?;
            let doc = report(&records).map_err(|e| e.to_string())?;
            print!("{}", doc.to_text());
            if let Some(out) = &cli.global.out {
                doc.write(out).map_err(|e| e.to_string())?;
                eprintln!("wrote {}", out.join("report.json").display());
            }
            Ok(exit_code(doc.overall))
        })(),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
