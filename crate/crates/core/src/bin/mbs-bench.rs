use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mbs_lie::bench::{self, BenchError, PlotOptions, RunConfig, CONVERGENCE_DTS};

#[derive(Parser)]
#[command(name = "mbs-bench", version, about = "Lie-group integration benchmarks for rigid multibody systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, BenchError> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        for pair in &self.set {
            config.set_pair(pair)?;
        }
        if let Some(dir) = &self.output {
            config.output = dir.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model and write metrics and trajectory CSV files.
    Simulate(RunArgs),
    /// Run both formulations from the same initial state and summarize.
    Compare(RunArgs),
    /// Orientation-error order study on the heavy top.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated step sizes.
        #[arg(long, value_delimiter = ',', default_values_t = CONVERGENCE_DTS.to_vec())]
        dts: Vec<f64>,
    },
    /// Plot CSV columns as an SVG line chart.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        /// SVG file to write.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "t")]
        x: String,
        #[arg(long)]
        log_y: bool,
        #[arg(long)]
        title: Option<String>,
    },
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Simulate(args) => {
            let config = args.load()?;
            let summary = bench::cmd_simulate(&config)?;
            println!("{summary}");
            println!("wrote {}", bench::metrics_path(&config, config.formulation).display());
            println!("wrote {}", bench::trajectory_path(&config, config.formulation).display());
        }
        Command::Compare(args) => {
            let config = args.load()?;
            println!("{}", bench::cmd_compare(&config)?);
        }
        Command::Convergence { run, dts } => {
            let config = run.load()?;
            println!("{}", bench::cmd_convergence(&config, &dts)?);
        }
        Command::Plot {
            input,
            columns,
            output,
            x,
            log_y,
            title,
        } => {
            let options = PlotOptions { x_column: x, log_y, title };
            bench::cmd_plot(&input, &columns, &output, &options)?;
            println!("wrote {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mbs-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
