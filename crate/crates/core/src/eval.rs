//! Stratified k-fold cross-validation, recognition-rate reports with
//! confusion matrices, and the hidden-layer-size sweep.

use crate::error::{Error, Result};
use crate::mlp::{self, MlpLayout, MlpModel, TrainConfig};
use crate::par;
use crate::rng::XorShiftRng;

/// Per-sample fold assignment. Folds are stratified: within every class the
/// fold sizes differ by at most one.
#[derive(Clone, Debug)]
pub struct FoldSpec {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldSpec {
    /// Indices of the training and test partitions for one fold.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

/// Assign every sample to one of `k` folds: shuffle each class with the
/// seeded generator, then deal the class round-robin across folds.
pub fn make_folds(labels: &[usize], k: usize, seed: u64) -> Result<FoldSpec> {
    if k == 0 || labels.len() < k {
        return Err(Error::TooFewSamples {
            have: labels.len(),
            need: k.max(1),
        });
    }
    let classes = labels.iter().max().copied().unwrap_or(0) + 1;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &label) in labels.iter().enumerate() {
        by_class[label].push(i);
    }

    let mut rng = XorShiftRng::new(seed);
    let mut assignments = vec![0usize; labels.len()];
    for members in &mut by_class {
        rng.shuffle(members);
        for (pos, &sample) in members.iter().enumerate() {
            assignments[sample] = pos % k;
        }
    }
    Ok(FoldSpec {
        k,
        assignments,
        seed,
    })
}

/// Counts of (true class, predicted class) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix {
            classes,
            counts: vec![0; classes * classes],
        }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth * self.classes + predicted] += 1;
    }

    pub fn count(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth * self.classes + predicted]
    }

    pub fn row_total(&self, truth: usize) -> usize {
        (0..self.classes).map(|p| self.count(truth, p)).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.classes).map(|c| self.count(c, c)).sum()
    }

    /// Recognition rate in percent: `100 * trace / total`.
    pub fn rate(&self) -> f64 {
        100.0 * self.correct() as f64 / self.total() as f64
    }

    /// `classes x classes` CSV of raw counts, rows are true classes.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for t in 0..self.classes {
            for p in 0..self.classes {
                if p > 0 {
                    out.push(',');
                }
                out.push_str(&self.count(t, p).to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Classify a labeled set and tally the confusion matrix.
pub fn evaluate(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    labels: &[usize],
) -> Result<ConfusionMatrix> {
    if inputs.is_empty() {
        return Err(Error::TooFewSamples { have: 0, need: 1 });
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            found: labels.len(),
        });
    }
    let classes = model.layout().n_out;
    let mut confusion = ConfusionMatrix::new(classes);
    for (x, &label) in inputs.iter().zip(labels) {
        if label >= classes {
            return Err(Error::InvalidLabel { label, classes });
        }
        confusion.record(label, model.classify(x)?);
    }
    Ok(confusion)
}

/// Outcome of one fold: held-out recognition rate plus the confusion matrix.
#[derive(Clone, Debug)]
pub struct FoldReport {
    pub fold: usize,
    pub rate: f64,
    pub confusion: ConfusionMatrix,
}

/// Cross-validation outcome: per-fold reports, the trained fold models (in
/// fold order), and the mean rate.
#[derive(Clone, Debug)]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    pub models: Vec<MlpModel>,
    pub average: f64,
}

/// k-fold cross-validation: per fold, train a fresh model on the other
/// folds and evaluate on the held-out one. Fold `f` derives its seed as
/// `cfg.seed + f` for both weight initialization and epoch shuffling, so
/// folds are independent but reproducible. Folds run in parallel when the
/// `parallel` feature is enabled; reports are assembled in fold order.
pub fn cross_validate(
    inputs: &[Vec<f64>],
    labels: &[usize],
    layout: MlpLayout,
    cfg: &TrainConfig,
    k: usize,
) -> Result<CvReport> {
    let folds = make_folds(labels, k, cfg.seed)?;
    cross_validate_folds(inputs, labels, layout, cfg, &folds)
}

/// As [`cross_validate`] but with a caller-provided fold assignment, so a
/// sweep can reuse one split across layouts.
pub fn cross_validate_folds(
    inputs: &[Vec<f64>],
    labels: &[usize],
    layout: MlpLayout,
    cfg: &TrainConfig,
    folds: &FoldSpec,
) -> Result<CvReport> {
    cfg.validate()?;
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            found: labels.len(),
        });
    }

    let outcomes: Vec<Result<(FoldReport, MlpModel)>> = par::map_range(folds.k, |fold| {
        let (train_idx, test_idx) = folds.split(fold);
        if train_idx.is_empty() || test_idx.is_empty() {
            return Err(Error::TooFewSamples {
                have: inputs.len(),
                need: folds.k,
            });
        }
        let train_x: Vec<Vec<f64>> = train_idx.iter().map(|&i| inputs[i].clone()).collect();
        let train_y: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
        let test_x: Vec<Vec<f64>> = test_idx.iter().map(|&i| inputs[i].clone()).collect();
        let test_y: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();

        let fold_cfg = TrainConfig {
            seed: cfg.seed + fold as u64,
            ..cfg.clone()
        };
        let mut model = mlp::init_model(layout, fold_cfg.seed);
        mlp::train(&mut model, &train_x, &train_y, &fold_cfg)?;
        let confusion = evaluate(&model, &test_x, &test_y)?;
        let report = FoldReport {
            fold,
            rate: confusion.rate(),
            confusion,
        };
        Ok((report, model))
    });

    let mut folds_out = Vec::with_capacity(folds.k);
    let mut models = Vec::with_capacity(folds.k);
    for outcome in outcomes {
        let (report, model) = outcome?;
        folds_out.push(report);
        models.push(model);
    }
    let average = folds_out.iter().map(|f| f.rate).sum::<f64>() / folds_out.len() as f64;
    Ok(CvReport {
        folds: folds_out,
        models,
        average,
    })
}

/// One sweep row: hidden size, per-fold rates, and their mean.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub n_hidden: usize,
    pub fold_rates: Vec<f64>,
    pub average: f64,
}

/// Sweep outcome, rows sorted by hidden size.
#[derive(Clone, Debug)]
pub struct SweepTable {
    pub k: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Hidden size with the best average rate; ties go to the smaller size.
    pub fn best_hidden(&self) -> Option<usize> {
        let mut best: Option<&SweepRow> = None;
        for row in &self.rows {
            if best.is_none_or(|b| row.average > b.average) {
                best = Some(row);
            }
        }
        best.map(|r| r.n_hidden)
    }

    /// CSV with header `n_hidden,fold1,...,foldK,average` and rates printed
    /// to two decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_hidden");
        for f in 1..=self.k {
            out.push_str(&format!(",fold{f}"));
        }
        out.push_str(",average\n");
        for row in &self.rows {
            out.push_str(&row.n_hidden.to_string());
            for rate in &row.fold_rates {
                out.push_str(&format!(",{rate:.2}"));
            }
            out.push_str(&format!(",{:.2}\n", row.average));
        }
        out
    }
}

/// Cross-validate once per hidden size over a shared fold split. Duplicate
/// sizes are collapsed and rows come back sorted ascending. Sweep points run
/// in parallel when the `parallel` feature is enabled.
pub fn sweep_hidden(
    inputs: &[Vec<f64>],
    labels: &[usize],
    classes: usize,
    hidden_sizes: &[usize],
    cfg: &TrainConfig,
    k: usize,
) -> Result<SweepTable> {
    if hidden_sizes.is_empty() {
        return Err(Error::InvalidConfig("hidden size list is empty".into()));
    }
    if inputs.is_empty() {
        return Err(Error::TooFewSamples { have: 0, need: k });
    }
    let mut sizes: Vec<usize> = hidden_sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();

    let n_in = inputs[0].len();
    let folds = make_folds(labels, k, cfg.seed)?;

    let rows: Vec<Result<SweepRow>> = par::map_range(sizes.len(), |si| {
        let h = sizes[si];
        let layout = MlpLayout::new(n_in, h, classes)?;
        let report = cross_validate_folds(inputs, labels, layout, cfg, &folds)?;
        Ok(SweepRow {
            n_hidden: h,
            fold_rates: report.folds.iter().map(|f| f.rate).collect(),
            average: report.average,
        })
    });

    let rows: Result<Vec<SweepRow>> = rows.into_iter().collect();
    Ok(SweepTable { k, rows: rows? })
}
