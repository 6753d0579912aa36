use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ess_core::{make_distribution, GeneratorSpec};
use ess_toolkit::harness::{run_experiment, DistSource, ExperimentConfig, Mode};
use ess_toolkit::io::{write_distribution, DistFormat};
use ess_toolkit::report::ReportFormat;
use ess_toolkit::Result;

#[derive(Parser)]
#[command(name = "ess-toolkit", version, about = "Effective support size estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded estimator trials and write a report.
    Run {
        /// Distribution file (.csv or .json) or generator spec such as `zipf:n=1000,s=1`.
        #[arg(long)]
        dist: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        beta: f64,
        /// Defaults to beta. Unused in unicriterion mode.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_report_format)]
        format: ReportFormat,
        /// Worker threads; 1 runs serially. Defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the exact effective support size and quantile element.
    Exact {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        eps: f64,
    },
    /// Write a generated distribution to a file.
    Gen {
        #[arg(long)]
        spec: GeneratorSpec,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the output file's extension.
        #[arg(long, value_parser = parse_dist_format)]
        format: Option<DistFormat>,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: ess_toolkit::ToolkitError| e.to_string())
}

fn parse_report_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse().map_err(|e: ess_toolkit::ToolkitError| e.to_string())
}

fn parse_dist_format(s: &str) -> std::result::Result<DistFormat, String> {
    s.parse().map_err(|e: ess_toolkit::ToolkitError| e.to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            dist,
            eps,
            beta,
            gamma,
            mode,
            trials,
            seed,
            out,
            format,
            threads,
        } => {
            let config = ExperimentConfig {
                trials,
                master_seed: seed,
                out_path: Some(out),
                format,
                threads,
                ..ExperimentConfig::new(DistSource::parse(&dist)?, eps, beta, gamma.unwrap_or(beta), mode)
            };
            let report = run_experiment(&config)?;
            let s = &report.summary;
            println!(
                "success_rate={} successes={}/{} band=[{}, {}] estimate_mean={} samp_queries={} eval_queries={}",
                s.success_rate,
                s.successes,
                s.trials,
                s.band_low,
                s.band_high,
                s.estimate_mean,
                s.total_samp_queries,
                s.total_eval_queries
            );
        }
        Command::Exact { dist, eps } => {
            let dist = DistSource::parse(&dist)?.load()?;
            let q = dist.exact_quantile(eps)?;
            let ess = dist.exact_ess(eps)?;
            println!("eps={eps} ess={ess} quantile={} quantile_prob={}", q.label, q.prob);
        }
        Command::Gen { spec, out, format } => {
            let dist = make_distribution(&spec)?;
            let format = format.unwrap_or_else(|| DistFormat::from_path(&out));
            write_distribution(&dist, &out, format)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
