//! Subcommand implementations. Data artifacts go to files (written
//! atomically), logs go to standard error; only `predict` prints to stdout.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use numeral_core::dataset::pgm;
use numeral_core::error::{Error, Result};
use numeral_core::eval::{cross_validate, sweep_hidden, CvReport};
use numeral_core::features::{extract_features, FEATURE_COUNT};
use numeral_core::mlp::{self, MlpLayout, TrainConfig};
use numeral_core::preprocess::normalize_sample;

use crate::io::{featurize, load_labeled, load_unlabeled, write_atomic};
use crate::{CvArgs, ExtractArgs, PredictArgs, PreprocessArgs, SweepArgs, TrainArgs, TrainParams};

const CLASSES: usize = 10;

impl TrainParams {
    fn to_config(&self) -> TrainConfig {
        TrainConfig {
            eta: self.eta,
            alpha: self.alpha,
            max_epochs: self.epochs,
            target_sse: self.target_sse,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    fn log(&self, hidden: usize) {
        eprintln!(
            "config: layout {FEATURE_COUNT}-{hidden}-{CLASSES} eta={} alpha={} epochs={} target_sse={} seed={}",
            self.eta, self.alpha, self.epochs, self.target_sse, self.seed
        );
    }
}

pub fn preprocess(args: PreprocessArgs) -> Result<()> {
    let images = load_unlabeled(&args.input.input, args.input.invert)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;

    let mut written = 0usize;
    let mut skipped = 0usize;
    for (i, img) in images.iter().enumerate() {
        match normalize_sample(img, args.input.threshold) {
            Ok(glyph) => {
                let path = args.out.join(format!("{i:05}.pgm"));
                write_atomic(&path, &pgm::encode_p5(&glyph.to_gray()))?;
                written += 1;
            }
            Err(Error::EmptyGlyph) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    eprintln!("preprocess: wrote {written} glyphs, skipped {skipped} empty");
    Ok(())
}

pub fn extract(args: ExtractArgs) -> Result<()> {
    let set = load_labeled(
        &args.input.input,
        args.input.labels.as_deref(),
        args.input.invert,
    )?;
    let (features, labels, skipped) = featurize(&set, args.input.threshold)?;

    let mut csv = String::new();
    for (row, label) in features.iter().zip(&labels) {
        write!(csv, "{label}").unwrap();
        for v in row {
            write!(csv, ",{v:.9}").unwrap();
        }
        csv.push('\n');
    }
    write_atomic(&args.out, csv.as_bytes())?;
    eprintln!(
        "extract: {} rows from {} ({} empty glyphs skipped)",
        labels.len(),
        set.source,
        skipped
    );
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<()> {
    args.params.log(args.hidden);
    let set = load_labeled(
        &args.input.input,
        args.input.labels.as_deref(),
        args.input.invert,
    )?;
    let (features, labels, skipped) = featurize(&set, args.input.threshold)?;
    if skipped > 0 {
        eprintln!("train: skipped {skipped} empty glyphs");
    }

    let cfg = args.params.to_config();
    let layout = MlpLayout::new(FEATURE_COUNT, args.hidden, CLASSES)?;
    let mut model = mlp::init_model(layout, cfg.seed);
    let history = mlp::train(&mut model, &features, &labels, &cfg)?;

    save_model_atomic(&model, &args.out)?;
    let mut log = String::from("epoch,sse\n");
    for (epoch, sse) in history.epoch_sse.iter().enumerate() {
        writeln!(log, "{},{sse:.9}", epoch + 1).unwrap();
    }
    write_atomic(&args.sse_log, log.as_bytes())?;
    eprintln!(
        "train: {} epochs ({:?}), final sse {:.6}, model -> {}",
        history.epochs_run,
        history.stop,
        history.epoch_sse.last().unwrap_or(&f64::NAN),
        args.out.display()
    );
    Ok(())
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let model = mlp::load_model(&args.model)?;
    if args.input.labels.is_some() {
        eprintln!("predict: --labels is not used; classifying images only");
    }
    let images = load_unlabeled(&args.input.input, args.input.invert)?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for img in &images {
        let glyph = normalize_sample(img, args.input.threshold)?;
        let features = extract_features(&glyph);
        let label = model.classify(features.as_slice())?;
        match writeln!(out, "{label}") {
            Ok(()) => {}
            // Reader went away (e.g. piped into `head`); not an error.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            Err(e) => return Err(Error::io("stdout", e)),
        }
    }
    Ok(())
}

pub fn cv(args: CvArgs) -> Result<()> {
    args.params.log(args.hidden);
    let set = load_labeled(
        &args.input.input,
        args.input.labels.as_deref(),
        args.input.invert,
    )?;
    let (features, labels, skipped) = featurize(&set, args.input.threshold)?;
    if skipped > 0 {
        eprintln!("cv: skipped {skipped} empty glyphs");
    }

    let cfg = args.params.to_config();
    let layout = MlpLayout::new(FEATURE_COUNT, args.hidden, CLASSES)?;
    let report = cross_validate(&features, &labels, layout, &cfg, args.folds)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    write_cv_artifacts(&report, &args.out)?;
    eprintln!(
        "cv: {} folds, rates [{}], average {:.2}",
        args.folds,
        report
            .folds
            .iter()
            .map(|f| format!("{:.2}", f.rate))
            .collect::<Vec<_>>()
            .join(", "),
        report.average
    );
    Ok(())
}

fn write_cv_artifacts(report: &CvReport, dir: &Path) -> Result<()> {
    let mut csv = String::from("fold,rate\n");
    for fold in &report.folds {
        writeln!(csv, "{},{:.2}", fold.fold + 1, fold.rate).unwrap();
    }
    writeln!(csv, "average,{:.2}", report.average).unwrap();
    write_atomic(&dir.join("report.csv"), csv.as_bytes())?;

    for fold in &report.folds {
        write_atomic(
            &dir.join(format!("confusion_fold{}.csv", fold.fold + 1)),
            fold.confusion.to_csv().as_bytes(),
        )?;
    }
    for (i, model) in report.models.iter().enumerate() {
        save_model_atomic(model, &dir.join(format!("model_fold{}.mlp", i + 1)))?;
    }
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let sizes: Vec<usize> = args
        .hidden
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("bad hidden size {t:?}")))
        })
        .collect::<Result<_>>()?;

    let set = load_labeled(
        &args.input.input,
        args.input.labels.as_deref(),
        args.input.invert,
    )?;
    let (features, labels, skipped) = featurize(&set, args.input.threshold)?;
    if skipped > 0 {
        eprintln!("sweep: skipped {skipped} empty glyphs");
    }

    let cfg = args.params.to_config();
    let table = sweep_hidden(&features, &labels, CLASSES, &sizes, &cfg, args.folds)?;
    write_atomic(&args.out, table.to_csv().as_bytes())?;
    eprintln!(
        "sweep: {} sizes over {} folds, best average at hidden={}",
        table.rows.len(),
        args.folds,
        table.best_hidden().expect("nonempty sweep")
    );
    Ok(())
}

fn save_model_atomic(model: &mlp::MlpModel, path: &Path) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    mlp::save_model(model, &tmp)?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
