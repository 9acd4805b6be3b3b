//! `numeral`: normalize digit images, extract octant shadow/centroid
//! features, train and evaluate an MLP classifier.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use numeral_core::error::Error;
use numeral_core::preprocess::ThresholdPolicy;

#[derive(Parser)]
#[command(
    name = "numeral",
    version,
    about = "Handwritten digit recognition pipeline",
    after_help = "Exit codes: 0 success, 1 usage, 2 data error, 3 training divergence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize images to 32x32 binary glyphs written as PGM files.
    Preprocess(PreprocessArgs),
    /// Extract feature vectors from a labeled dataset into a CSV file.
    Extract(ExtractArgs),
    /// Train a classifier and write the model plus a per-epoch SSE log.
    Train(TrainArgs),
    /// Classify images with a saved model, one predicted label per line.
    Predict(PredictArgs),
    /// k-fold cross-validation; writes rates, confusion matrices, and models.
    Cv(CvArgs),
    /// Cross-validate across hidden-layer sizes and write the sweep CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input: PGM file, IDX image file, or directory.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// IDX label file; marks the input as an IDX image file.
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
    /// Flip intensity polarity after loading (for sources scanned or stored
    /// light-on-dark; IDX corpora are already handled).
    #[arg(long)]
    invert: bool,
    /// Binarization threshold: `otsu` or `fixed:<0-255>`.
    #[arg(long, default_value = "otsu", value_parser = parse_threshold, value_name = "POLICY")]
    threshold: ThresholdPolicy,
}

#[derive(Args)]
struct TrainParams {
    /// Learning rate.
    #[arg(long, default_value_t = 0.8)]
    eta: f64,
    /// Momentum term.
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Epoch budget.
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    /// Early-stop threshold on mean per-sample SSE.
    #[arg(long, default_value_t = 0.01)]
    target_sse: f64,
    /// Seed for weight initialization, shuffling, and fold assignment.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output directory for the normalized PGM files.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output CSV path (one row per sample: label, then 88 values).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: TrainParams,
    /// Hidden layer size.
    #[arg(long, default_value_t = 54)]
    hidden: usize,
    /// Model output path.
    #[arg(long, default_value = "model.mlp", value_name = "FILE")]
    out: PathBuf,
    /// Per-epoch SSE log (CSV: epoch,sse).
    #[arg(long, default_value = "train-sse.csv", value_name = "FILE")]
    sse_log: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: TrainParams,
    /// Hidden layer size.
    #[arg(long, default_value_t = 54)]
    hidden: usize,
    /// Number of folds.
    #[arg(long, default_value_t = 3)]
    folds: usize,
    /// Output directory for report.csv, confusion matrices, and fold models.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: TrainParams,
    /// Number of folds.
    #[arg(long, default_value_t = 3)]
    folds: usize,
    /// Comma-separated hidden sizes to evaluate.
    #[arg(
        long,
        default_value = "20,25,30,35,40,45,50,52,53,54,55,60,65,70",
        value_name = "LIST"
    )]
    hidden: String,
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn parse_threshold(s: &str) -> Result<ThresholdPolicy, String> {
    if s.eq_ignore_ascii_case("otsu") {
        return Ok(ThresholdPolicy::Otsu);
    }
    if let Some(t) = s.strip_prefix("fixed:") {
        return t
            .parse::<u8>()
            .map(ThresholdPolicy::Fixed)
            .map_err(|_| format!("fixed threshold must be 0-255, got {t:?}"));
    }
    Err(format!("expected `otsu` or `fixed:<0-255>`, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = match cli.command {
        Command::Preprocess(args) => commands::preprocess(args),
        Command::Extract(args) => commands::extract(args),
        Command::Train(args) => commands::train(args),
        Command::Predict(args) => commands::predict(args),
        Command::Cv(args) => commands::cv(args),
        Command::Sweep(args) => commands::sweep(args),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Divergence { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
