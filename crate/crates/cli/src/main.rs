//! `distomp`: data generation, single protocol runs, sweeps and theory reports.
//!
//! Exit codes: 0 on success, 1 on a configuration error, 2 on a runtime error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distomp_core::config::CliConfig;
use distomp_core::datagen::{generate_shard, make_sparse_theta, write_shard_file};
use distomp_core::experiments::{simulate, sweep, write_csv, write_manifest, Algorithm};
use distomp_core::theory::check_theorem;
use distomp_core::Error;

#[derive(Parser)]
#[command(name = "distomp", version, about = "Distributed orthogonal matching pursuit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol on one seeded instance.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// single, centralized, ds:L, dj, djf:P or dc
        #[arg(long)]
        algo: String,
        /// Overrides gen.master_seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Success-probability sweep over the theta_min grid; writes CSV and a JSON manifest.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides experiment.output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the recovery conditions for the `theory` section.
    Theory {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dump machine 0 of trial 0 as a binary shard file.
    Datagen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::PatternMismatch(_) | Error::Json(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<CliConfig, Failure> {
    CliConfig::load(path).map_err(|e| Failure::Config(e.to_string()))
}

fn run(cli: Cli, out: &mut String) -> Result<(), Failure> {
    use std::fmt::Write as _;
    match cli.command {
        Command::Simulate { config, algo, seed } => {
            let cfg = load(&config)?;
            let mut gen = cfg.gen().map_err(Failure::from)?.clone();
            if let Some(s) = seed {
                gen.master_seed = s;
            }
            let algo: Algorithm = algo.parse().map_err(Failure::from)?;
            let (run, truth) = simulate(&gen, algo)?;
            let _ = writeln!(out, "algorithm      {}", run.algorithm);
            let _ = writeln!(out, "seed           {}", gen.master_seed);
            let _ = writeln!(out, "estimate       {:?}", run.estimate.sorted());
            let _ = writeln!(out, "support        {:?}", truth.sorted());
            let _ = writeln!(out, "success        {}", run.estimate.same_elements(&truth));
            let _ = writeln!(out, "bits           {}", run.bits);
            let _ = writeln!(out, "rounds         {}", run.rounds);
            let _ = writeln!(out, "machines_used  {}", run.machines_used);
        }
        Command::Sweep { config, out: path, seed } => {
            let cfg = load(&config)?;
            let mut gen = cfg.gen().map_err(Failure::from)?.clone();
            let exp = cfg.experiment().map_err(Failure::from)?.clone();
            if let Some(s) = seed {
                gen.master_seed = s;
            }
            let path = path
                .or_else(|| exp.output.clone())
                .ok_or_else(|| Failure::Config("no output path: pass --out or set experiment.output".into()))?;
            let report = sweep(&gen, &exp)?;
            for p in &report.points {
                eprintln!(
                    "theta_min={} {} {}/{}",
                    p.theta_min, p.algorithm, p.successes, p.trials
                );
            }
            write_csv(&report.points, &path)?;
            let manifest = write_manifest(&gen, &exp, &report, &path)?;
            let _ = writeln!(out, "wrote {} rows to {}", report.points.len(), path.display());
            let _ = writeln!(out, "manifest {}", manifest.display());
            if !report.errors.is_empty() {
                let _ = writeln!(out, "{} failed trials recorded in the manifest", report.errors.len());
            }
        }
        Command::Theory { config } => {
            let cfg = load(&config)?;
            let params = cfg.theory().map_err(Failure::from)?;
            let report = check_theorem(params, cfg.machines_available());
            out.push_str(&report.to_text());
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let json = serde_json::to_string(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
            let _ = writeln!(out, "{json}");
        }
        Command::Datagen { config, out: path, seed } => {
            let cfg = load(&config)?;
            let mut gen = cfg.gen().map_err(Failure::from)?.clone();
            if let Some(s) = seed {
                gen.master_seed = s;
            }
            let theta = make_sparse_theta(&gen)?;
            let shard = generate_shard(&gen, 0, 0, &theta)?;
            write_shard_file(&path, &shard, gen.master_seed)?;
            let _ = writeln!(
                out,
                "wrote shard n={} d={} seed={} to {}",
                shard.samples(),
                shard.dim(),
                gen.master_seed,
                path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    match run(cli, &mut out) {
        Ok(()) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
