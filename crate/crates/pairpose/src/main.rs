use std::io::{stderr, stdout};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pairpose::commands::{self, EstimateArgs, MetricsArgs, SweepArgs};

/// Rigid pose estimation from oriented point pairs.
#[derive(Parser)]
#[command(name = "pairpose", version)]
struct Cli {
    /// Worker threads; defaults to all cores. Results do not depend on
    /// this value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a pose from correspondence files.
    Estimate {
        /// Observed scene as ASCII PLY with x y z nx ny nz.
        #[arg(long)]
        scene: PathBuf,
        /// Object model as ASCII PLY with x y z nx ny nz.
        #[arg(long)]
        model: PathBuf,
        /// Scene-to-model correspondence CSV.
        #[arg(long)]
        bcm_s: Option<PathBuf>,
        /// Model-to-scene correspondence CSV.
        #[arg(long)]
        bcm_m: Option<PathBuf>,
        /// JSON array of pose seeds to pool into the ensemble.
        #[arg(long)]
        pr: Option<PathBuf>,
        /// Anchors kept per branch by farthest point sampling.
        #[arg(long, default_value_t = 100)]
        z: usize,
        /// Fraction of pair poses kept after error ranking.
        #[arg(long, default_value_t = 0.10)]
        keep: f64,
        /// Seed for anchor selection.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output pose JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON file for per-branch diagnostics; defaults to a
        /// .diagnostics.json sibling of --out.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Compare a predicted pose against ground truth over a model.
    Metrics {
        /// Predicted pose JSON.
        #[arg(long)]
        pred: PathBuf,
        /// Ground-truth pose JSON.
        #[arg(long)]
        gt: PathBuf,
        /// Model file: oriented-cloud PLY, mesh PLY or OBJ.
        #[arg(long)]
        model: PathBuf,
        /// Absolute pass threshold in meters.
        #[arg(long, conflicts_with = "diam_frac")]
        threshold: Option<f64>,
        /// Pass threshold as a fraction of the model diameter.
        #[arg(long, default_value_t = 0.1)]
        diam_frac: f64,
    },
    /// Run a benchmark sweep from a JSON or TOML config.
    Sweep {
        /// Sweep configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Directory for report.csv and aggregates.json.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the built-in sanity battery.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error[input]: --threads: {e}");
            return ExitCode::from(2);
        }
    }

    let result = match cli.command {
        Command::Estimate {
            scene,
            model,
            bcm_s,
            bcm_m,
            pr,
            z,
            keep,
            seed,
            out,
            diagnostics,
        } => commands::estimate(
            &EstimateArgs {
                scene,
                model,
                bcm_s,
                bcm_m,
                pr,
                z,
                keep_fraction: keep,
                seed,
                out,
                diagnostics,
            },
            &mut stdout(),
            &mut stderr(),
        ),
        Command::Metrics {
            pred,
            gt,
            model,
            threshold,
            diam_frac,
        } => commands::metrics(
            &MetricsArgs {
                pred,
                gt,
                model,
                threshold,
                diam_frac,
            },
            &mut stdout(),
        ),
        Command::Sweep { config, out_dir } => {
            commands::sweep(&SweepArgs { config, out_dir }, &mut stdout())
        }
        Command::Selftest => commands::selftest(&mut stdout()),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
