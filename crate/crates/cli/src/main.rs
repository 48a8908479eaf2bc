use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use runsmith_core::formats::{read_input, write_input, ResultFile};
use runsmith_core::generators::{generate, GenParams};
use runsmith_core::harness::{
    play_input, run_experiment, Algorithm, ExperimentRecord, ExperimentSpec, InputSpec, Provenance,
    RunOptions,
};
use runsmith_core::machine::replay;
use runsmith_core::offline::{brute_force_opt, DEFAULT_NODE_BUDGET};
use runsmith_core::Error;

#[derive(Parser)]
#[command(name = "runsmith", version, about = "Up-down run generation with a bounded buffer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated input file.
    Generate(GenerateArgs),
    /// Run one algorithm on an input file and write a JSON result.
    Run(RunArgs),
    /// Run an experiment spec and write one CSV row per trial.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "gen")]
    generator: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    /// Largest in-run displacement for `nearly_sorted`.
    #[arg(long)]
    displacement: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algo: String,
    #[arg(long)]
    m: usize,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<String>,
    /// Node budget for the exhaustive oracle.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Fill the duration_ms column. Rows are then no longer reproducible.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Error::DuplicateKey(k) => eprintln!("duplicate key: {k}"),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Format(_) => 3,
        Error::DuplicateKey(_) => 4,
        Error::BudgetExceeded { .. } => 5,
        _ => 2,
    }
}

fn cmd_generate(a: GenerateArgs) -> runsmith_core::Result<()> {
    let params = GenParams {
        name: a.generator,
        n: a.n,
        m: a.m,
        c: a.c,
        t: a.t,
        runs: a.runs,
        displacement: a.displacement,
    };
    let keys = generate(&params, None, a.seed)?;
    write_input(&a.out, &keys, a.binary)?;
    println!("{}", keys.len());
    Ok(())
}

fn cmd_run(a: RunArgs) -> runsmith_core::Result<()> {
    let algo: Algorithm = a.algo.parse()?;
    let input = read_input(&a.input)?;
    let seed = algo.is_randomized().then_some(a.seed);
    let result = if algo == Algorithm::Oracle {
        let opt = brute_force_opt(&input, a.m, a.budget)?;
        let witness = replay(&input, a.m, &opt.witness)?;
        ResultFile::new(algo.name(), a.m, seed, &witness).with_opt(opt.opt_runs, Provenance::Bruteforce)
    } else {
        let mut spec = ExperimentSpec::new(algo, InputSpec::File(a.input.clone()), a.m);
        spec.eps = a.eps;
        spec.node_budget = Some(a.budget);
        let (output, _) = play_input(&spec, &input, a.seed)?;
        ResultFile::new(algo.name(), a.m, seed, &output)
    };
    result.validate(Some(input.len()))?;
    fs::write(&a.out, serde_json::to_string_pretty(&result)? + "\n")?;
    println!("{}", result.r);
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> runsmith_core::Result<()> {
    let text = fs::read_to_string(&a.spec)?;
    let spec: ExperimentSpec = serde_json::from_str(&text)?;
    let records = run_experiment(&spec, RunOptions { timing: a.timing })?;
    write_csv(&a.out, &records)?;
    for rec in &records {
        if let Some(input) = &rec.realized_input {
            write_input(&realized_path(&a.out, rec.seed), input, false)?;
        }
    }
    println!("{}", records.len());
    Ok(())
}

fn realized_path(csv: &Path, seed: u64) -> PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("bench");
    csv.with_file_name(format!("{stem}.seed{seed}.input.txt"))
}

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, records: &[ExperimentRecord]) -> runsmith_core::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["seed", "r", "opt", "ratio", "mean_run_len", "duration_ms"])
        .map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.run_count.to_string(),
            opt_cell(r.opt),
            opt_cell(r.ratio),
            r.mean_run_length.to_string(),
            opt_cell(r.duration_ms),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}
