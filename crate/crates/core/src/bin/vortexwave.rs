use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vortexwave::cli_io::{
    preset, resume, run_simulation, run_taylor_sweep, write_sweep_csv, CliError, RunSummary, ScenarioConfig,
    TaylorSweepConfig, EXIT_CONFIG, EXIT_FAILURE, EXIT_IO, EXIT_OK,
};
use vortexwave::verify::{run_criterion, selector_ids, SELECTORS};

#[derive(Parser)]
#[command(name = "vortexwave", version, about = "Deep-water waves carrying point vortices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    until: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write diagnostics, snapshots, status and a checkpoint.
    Simulate(Common),
    /// Classify the flat-surface Taylor sign over a grid of vortex strengths.
    SweepTaylor(Common),
    /// Run acceptance batteries: quadrature, taylor, dispersion, rk4, scaling, pair, symmetry, at, energy, all.
    Verify {
        #[arg(default_value = "all")]
        selector: String,
    },
    /// Continue a run from a checkpoint (--config PATH or <--out DIR>/checkpoint.json).
    Resume(Common),
}

fn scenario(args: &Common) -> Result<ScenarioConfig, CliError> {
    let mut c = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either --config or --preset".into())),
        (Some(path), None) => ScenarioConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(CliError::Config("simulate needs --config PATH or --preset NAME".into())),
    };
    if let Some(seed) = args.seed {
        c.seed = seed;
    }
    Ok(c)
}

fn report(summary: &RunSummary) -> i32 {
    println!("status: {} at t = {:.6} after {} steps", summary.status, summary.t, summary.steps);
    if let Some(m) = &summary.message {
        println!("halt: {m}");
    }
    if let Some(lt) = &summary.longtime {
        for m in &lt.monitors {
            println!(
                "monitor {:<16} {}  worst slack {:.3e}",
                m.name,
                if m.passed { "pass" } else { "FAIL" },
                m.worst_slack
            );
        }
    }
    summary.exit_code()
}

fn simulate(args: &Common) -> Result<i32, CliError> {
    let c = scenario(args)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&c.scenario));
    let summary = run_simulation(&c, Some(&out), args.until)?;
    Ok(report(&summary))
}

fn sweep(args: &Common) -> Result<i32, CliError> {
    let config = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<TaylorSweepConfig>(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        (None, Some(name)) => TaylorSweepConfig::preset(name)?,
        (None, None) => TaylorSweepConfig::preset("single")?,
    };
    let result = run_taylor_sweep(&config)?;
    let path = match &args.out {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => p.clone(),
        Some(dir) => dir.join("taylor_sweep.csv"),
        None => PathBuf::from("out").join("taylor_sweep.csv"),
    };
    write_sweep_csv(&result, &path)?;
    println!("{} rows written to {}", result.rows.len(), path.display());
    match result.bracket {
        Some((a, b)) => println!("classification changes between λ²/|y|³ = {a:.6} and {b:.6}"),
        None => println!("no classification change in the sweep"),
    }
    Ok(EXIT_OK)
}

fn verify(selector: &str) -> i32 {
    let Some(ids) = selector_ids(selector) else {
        eprintln!("unknown selector {selector:?}; known: {}", SELECTORS.join(", "));
        return EXIT_CONFIG;
    };
    let mut failed = 0;
    for id in ids {
        let r = run_criterion(id);
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        EXIT_OK
    } else {
        println!("{failed} criterion(s) failed");
        EXIT_FAILURE
    }
}

fn resume_cmd(args: &Common) -> Result<i32, CliError> {
    let path = match (&args.config, &args.out) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => dir.join("checkpoint.json"),
        (None, None) => return Err(CliError::Config("resume needs --config CHECKPOINT or --out DIR".into())),
    };
    let out = args.out.clone().or_else(|| path.parent().map(|p| p.to_path_buf()));
    let summary = resume(&path, out.as_deref(), args.until)?;
    Ok(report(&summary))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::SweepTaylor(a) => sweep(a),
        Command::Verify { selector } => Ok(verify(selector)),
        Command::Resume(a) => resume_cmd(a),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::Io(_) => EXIT_IO,
            }
        }
    };
    ExitCode::from(code as u8)
}
