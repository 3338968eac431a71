use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dmmop::config::RunConfig;
use dmmop::dump::dump_environments;
use dmmop::exec::Execution;
use dmmop::optimizer::OptimizerKind;
use dmmop::problem::{parse_problem_list, ProblemSpec};
use dmmop::report::{export_landscape_grid, run_benchmark, score_directory, write_outputs, BenchmarkRequest};

#[derive(Parser)]
#[command(name = "dmmop", version, about = "Dynamic multimodal optimization benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an optimizer over problems and seeds, then write the results record.
    Run(RunArgs),
    /// Write the parameters of every environment of a run.
    Dump(DumpArgs),
    /// Sample an environment's fitness on a 2-D grid over [-5, 5]^2.
    Grid(GridArgs),
    /// Re-score snapshots stored by an earlier `run`.
    Score(ScoreArgs),
}

#[derive(Args)]
struct Common {
    /// Run configuration file (flat TOML); defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run every job on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display())),
            None => Ok(RunConfig::default()),
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Problem selection: `P1..P24`, `1-8`, `P2,P5,P13`.
    #[arg(long, default_value = "P1..P24")]
    problems: String,
    /// Seed selection: `1..30`, `1-5`, `3,7`.
    #[arg(long, default_value = "1..30")]
    seeds: String,
    /// crowding-de, random-search or null.
    #[arg(long, default_value = "crowding-de")]
    optimizer: String,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Comma-separated eps_f levels, overriding the configuration.
    #[arg(long)]
    accuracy: Option<String>,
    /// Skip writing per-run snapshot files.
    #[arg(long)]
    no_snapshots: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DumpArgs {
    /// Problem selection: `P1..P24`, `1-8`, `P2,P5,P13`.
    #[arg(long)]
    problems: String,
    /// Seed selection: `1..30`, `1-5`, `3,7`.
    #[arg(long, default_value = "1")]
    seeds: String,
    /// Directory for `P{n}_s{seed}.dump` files; stdout when absent.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GridArgs {
    /// Problem selection: `P1..P24`, `1-8`, `P2,P5,P13`.
    #[arg(long)]
    problems: String,
    /// Seed selection: `1..30`, `1-5`, `3,7`.
    #[arg(long, default_value = "1")]
    seeds: String,
    /// Environment index, starting at 1.
    #[arg(long, default_value_t = 1)]
    env: usize,
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    /// Override the problem's dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value = "grids")]
    out_dir: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory written by `run`.
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    #[arg(long)]
    accuracy: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..").or_else(|| part.split_once('-')) {
            Some((a, b)) => {
                let lo: u64 = a.trim().parse().with_context(|| format!("bad seed `{a}`"))?;
                let hi: u64 = b.trim_start_matches('=').trim().parse().with_context(|| format!("bad seed `{b}`"))?;
                if lo > hi {
                    bail!("empty seed range `{part}`");
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().with_context(|| format!("bad seed `{part}`"))?),
        }
    }
    if out.is_empty() {
        bail!("no seeds given");
    }
    Ok(out)
}

fn apply_accuracy(config: &mut RunConfig, accuracy: Option<&str>) -> Result<()> {
    if let Some(list) = accuracy {
        config.eps_f = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad accuracy `{v}`")))
            .collect::<Result<_>>()?;
        config.validate()?;
    }
    Ok(())
}

fn single<T: Copy>(items: &[T], what: &str) -> Result<T> {
    match items {
        [x] => Ok(*x),
        _ => bail!("`grid` takes exactly one {what}"),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let mut config = args.common.load()?;
    apply_accuracy(&mut config, args.accuracy.as_deref())?;
    let request = BenchmarkRequest {
        problems: parse_problem_list(&args.problems)?,
        seeds: parse_seeds(&args.seeds)?,
        optimizer: args.optimizer.parse::<OptimizerKind>()?,
        config,
        execution: args.common.execution(),
    };
    let output = run_benchmark(&request)?;
    write_outputs(&output, &request.config.accuracy_levels(), &args.out_dir, !args.no_snapshots)?;
    print!("{}", output.table.render());
    for f in &output.failures {
        eprintln!("run {} seed {} failed: {}", f.spec.label(), f.seed, f.message);
    }
    Ok(output.failures.is_empty())
}

fn cmd_dump(args: DumpArgs) -> Result<bool> {
    let config = args.common.load()?;
    for spec in parse_problem_list(&args.problems)? {
        for seed in parse_seeds(&args.seeds)? {
            let text = dump_environments(spec, seed, &config)?;
            match &args.out_dir {
                Some(dir) => write(&dir.join(format!("{}_s{seed}.dump", spec.label())), &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(true)
}

fn cmd_grid(args: GridArgs) -> Result<bool> {
    let config = args.common.load()?;
    let mut spec: ProblemSpec = single(&parse_problem_list(&args.problems)?, "problem")?;
    let seed = single(&parse_seeds(&args.seeds)?, "seed")?;
    if let Some(d) = args.dim {
        spec.dim = d;
    }
    let grid = export_landscape_grid(spec, seed, args.env, args.resolution, &config, args.common.execution())?;
    let stem = format!("{}_s{seed}_e{}", spec.label(), args.env);
    write(&args.out_dir.join(format!("{stem}.csv")), &grid.to_csv())?;
    write(&args.out_dir.join(format!("{stem}_optima.csv")), &grid.optima_csv())?;
    println!("{} samples, max {:.9}", grid.values.len(), grid.max());
    Ok(true)
}

fn cmd_score(args: ScoreArgs) -> Result<bool> {
    let mut config = args.common.load()?;
    apply_accuracy(&mut config, args.accuracy.as_deref())?;
    let (table, _) = score_directory(&args.out_dir, &config.accuracy_levels(), args.common.execution())?;
    write(&args.out_dir.join("results.csv"), &table.to_csv())?;
    write(&args.out_dir.join("results.txt"), &table.render())?;
    print!("{}", table.render());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Dump(a) => cmd_dump(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Score(a) => cmd_score(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("4-5,9").unwrap(), vec![4, 5, 9]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("").is_err());
    }

    #[test]
    fn accuracy_override() {
        let mut c = RunConfig::default();
        apply_accuracy(&mut c, Some("1e-2, 1e-3")).unwrap();
        assert_eq!(c.eps_f, vec![1e-2, 1e-3]);
        assert!(apply_accuracy(&mut c, Some("abc")).is_err());
    }
}
