//! Seeded experiment drivers: temporal edge classification, link prediction
//! against shuffled negatives, σ_t sweeps and normalization ablations.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{dense_embed, EigenOptions};
use crate::embeddings::{edge_embeddings, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{TemporalEdge, TemporalGraph};
use crate::learn::{auc, train_logreg, ClassWeight, LabeledFeatures, LogRegConfig};
use crate::tdlg::{build_cross_tdlg_with_sigma, build_tdlg_with_sigma, normalize, Normalization, Sigma, TdlgConfig};

/// Attempts at drawing a split with both classes on each side.
const MAX_RESAMPLES: u64 = 100;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_INTERVALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub trials: usize,
    /// Trial `i` uses seed `seed + i`.
    pub seed: u64,
}

impl SplitSpec {
    pub fn classification() -> Self {
        SplitSpec {
            train_fraction: 0.7,
            trials: 10,
            seed: DEFAULT_SEED,
        }
    }

    pub fn link_prediction() -> Self {
        SplitSpec {
            trials: 5,
            ..Self::classification()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("need at least one trial".into()));
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

/// Edge features fed to the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Variant {
    /// Rows of the line-graph adjacency itself.
    Sparse,
    /// Top-`k` eigenvectors scaled by their eigenvalues.
    Dense { k: usize },
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Sparse => f.write_str("sparse"),
            Variant::Dense { k } => write!(f, "dense(k={k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkSetting {
    /// Held-out edges from the same (early) time range as training.
    Interpolative,
    /// Edges of the final time interval.
    Extrapolative,
}

impl std::str::FromStr for LinkSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interp" | "interpolative" => Ok(LinkSetting::Interpolative),
            "extrap" | "extrapolative" => Ok(LinkSetting::Extrapolative),
            _ => Err(Error::Config(format!("unknown link-prediction setting {s:?}"))),
        }
    }
}

/// Everything needed to re-run an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: String,
    pub tdlg: TdlgConfig,
    pub split: SplitSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub setting: Option<LinkSetting>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    pub logreg: LogRegConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub auc: f64,
    pub seconds: f64,
    pub train_size: usize,
    pub test_size: usize,
    /// Line-graph scale actually used.
    pub sigma_t: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub mean_auc: f64,
    /// Sample standard deviation of the trial AUCs; needs two trials.
    pub std_auc: Option<f64>,
    /// Half-width `1.96 · std / √trials`.
    pub ci95: Option<f64>,
    pub mean_seconds: f64,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, trials: Vec<TrialResult>) -> Self {
        let aucs: Vec<f64> = trials.iter().map(|t| t.auc).collect();
        let (mean_auc, std_auc, ci95) = mean_ci(&aucs);
        let mean_seconds = trials.iter().map(|t| t.seconds).sum::<f64>() / trials.len().max(1) as f64;
        ExperimentReport {
            config,
            trials,
            mean_auc,
            std_auc,
            ci95,
            mean_seconds,
        }
    }

    pub fn aucs(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.auc).collect()
    }
}

/// Mean, sample std-dev and normal-approximation 95% half-width.
pub fn mean_ci(xs: &[f64]) -> (f64, Option<f64>, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    (mean, Some(sd), Some(1.96 * sd / n.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Table,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Config(format!("unknown report format {s:?}"))),
        }
    }
}

/// Text renderings of a report.
pub trait Render: Serialize {
    fn table(&self) -> String;
    fn csv(&self) -> String;

    fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.json(),
            ReportFormat::Table => self.table(),
            ReportFormat::Csv => self.csv(),
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:6.2}", 100.0 * x)
}

fn opt_pct(x: Option<f64>) -> String {
    x.map(pct).unwrap_or_else(|| "   n/a".into())
}

impl Render for ExperimentReport {
    fn table(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = write!(s, "task: {}", c.task);
        if let Some(v) = c.variant {
            let _ = write!(s, "  variant: {v}");
        }
        if let Some(st) = c.setting {
            let _ = write!(s, "  setting: {st:?}");
        }
        let _ = writeln!(
            s,
            "  normalization: {:?}  sigma: {:?}",
            c.tdlg.normalization, c.tdlg.sigma
        );
        let _ = writeln!(
            s,
            "{:>5} {:>20} {:>8} {:>9} {:>8} {:>8} {:>12}",
            "trial", "seed", "AUC", "seconds", "train", "test", "sigma_t"
        );
        for t in &self.trials {
            let _ = writeln!(
                s,
                "{:>5} {:>20} {:>8} {:>9.3} {:>8} {:>8} {:>12.5e}",
                t.trial,
                t.seed,
                pct(t.auc),
                t.seconds,
                t.train_size,
                t.test_size,
                t.sigma_t
            );
        }
        let _ = writeln!(
            s,
            "mean AUC {} ± {} ({} trials, {:.3} s/trial)",
            pct(self.mean_auc).trim(),
            opt_pct(self.ci95).trim(),
            self.trials.len(),
            self.mean_seconds
        );
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("trial,seed,auc,seconds,train_size,test_size,sigma_t\n");
        for t in &self.trials {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                t.trial, t.seed, t.auc, t.seconds, t.train_size, t.test_size, t.sigma_t
            );
        }
        s
    }
}

fn embed(a: crate::sparse::CsrMatrix, variant: Variant, seed: u64) -> Result<EmbeddingMatrix> {
    match variant {
        Variant::Sparse => Ok(edge_embeddings(a)),
        Variant::Dense { k } => dense_embed(
            &a,
            k,
            &EigenOptions {
                seed,
                ..Default::default()
            },
        ),
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Shuffles `0..len` and cuts it at `round(frac · len)`; redraws (logging the
/// redraw) until both sides contain both classes.
fn split_both_classes(
    labels: &[bool],
    frac: f64,
    seed: u64,
    notes: &mut Vec<String>,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let cut = ((frac * labels.len() as f64).round() as usize).clamp(1, labels.len().saturating_sub(1));
    let mixed = |idx: &[usize]| {
        let pos = idx.iter().filter(|&&i| labels[i]).count();
        pos > 0 && pos < idx.len()
    };
    for sub in 0..MAX_RESAMPLES {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.shuffle(&mut trial_rng(seed, sub));
        let test = idx.split_off(cut);
        if mixed(&idx) && mixed(&test) {
            return Ok((idx, test));
        }
        notes.push(format!("split {sub} had a single-class side; resampled"));
    }
    Err(Error::SingleClass)
}

/// Per trial: line graph over all edges, embedding, random train/test split
/// of the labeled edges, balanced logistic regression, test AUC.
pub fn run_edge_classification(
    g: &TemporalGraph,
    cfg: &TdlgConfig,
    split: &SplitSpec,
    variant: Variant,
) -> Result<ExperimentReport> {
    run_edge_classification_with(
        g,
        cfg,
        split,
        variant,
        &LogRegConfig {
            class_weight: ClassWeight::Balanced,
            ..Default::default()
        },
    )
}

pub fn run_edge_classification_with(
    g: &TemporalGraph,
    cfg: &TdlgConfig,
    split: &SplitSpec,
    variant: Variant,
    logreg: &LogRegConfig,
) -> Result<ExperimentReport> {
    split.validate()?;
    cfg.validate()?;
    let labels = g
        .labels()
        .ok_or_else(|| Error::Config("edge classification needs a label on every edge".into()))?;
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::SingleClass);
    }
    if let Variant::Dense { k } = variant {
        if k == 0 || k > g.m() {
            return Err(Error::Config(format!(
                "dense dimension must lie in 1..={}, got {k}",
                g.m()
            )));
        }
    }
    let sigma = cfg.sigma.resolve(&g.times())?;

    let mut trials = Vec::with_capacity(split.trials);
    for trial in 0..split.trials {
        let seed = split.trial_seed(trial);
        let mut notes = Vec::new();
        let (train, test) = split_both_classes(&labels, split.train_fraction, seed, &mut notes)?;

        let start = Instant::now();
        let inc = g.incidence();
        let mut a = build_tdlg_with_sigma(g, &inc, sigma, cfg)?;
        if cfg.normalization != Normalization::None {
            a = normalize(&a, cfg.normalization)?;
        }
        let x = embed(a, variant, seed)?;
        let y_train = train.iter().map(|&i| labels[i]).collect();
        let model = train_logreg(&LabeledFeatures::new(&x, train.clone(), y_train)?, logreg)?;
        let scores = model.predict_rows(&x, &test)?;
        let seconds = start.elapsed().as_secs_f64();
        if !model.fit.converged {
            notes.push(format!("classifier stopped after {} iterations", model.fit.iterations));
        }

        let y_test: Vec<bool> = test.iter().map(|&i| labels[i]).collect();
        trials.push(TrialResult {
            trial,
            seed,
            auc: auc(&scores, &y_test)?,
            seconds,
            train_size: train.len(),
            test_size: test.len(),
            sigma_t: sigma,
            notes,
        });
    }
    Ok(ExperimentReport::new(
        ExperimentConfig {
            task: "edge-classification".into(),
            tdlg: cfg.clone(),
            split: split.clone(),
            variant: Some(variant),
            setting: None,
            intervals: None,
            logreg: logreg.clone(),
        },
        trials,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSample {
    /// One negative per positive, unlabeled.
    pub edges: Vec<TemporalEdge>,
    /// Rows whose `v` entry was swapped to remove a self-loop.
    pub repairs: usize,
    /// Fewer than two edges: the only permutation reproduces the positives.
    pub degenerate: bool,
}

/// Negatives by independently permuting the `u`, `v` and `t` columns of the
/// edge list. Self-loops created by the shuffle are removed by swapping the
/// offending row's `v` with that of another row chosen so neither row ends up
/// a self-loop. Collisions with real edges are kept.
pub fn sample_negative_edges(g: &TemporalGraph, seed: u64) -> Result<NegativeSample> {
    let m = g.m();
    if m == 0 {
        return Err(Error::InvalidGraph("cannot sample negatives of an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<usize> = g.edges().iter().map(|e| e.u).collect();
    let mut v: Vec<usize> = g.edges().iter().map(|e| e.v).collect();
    let mut t: Vec<f64> = g.edges().iter().map(|e| e.t).collect();
    u.shuffle(&mut rng);
    v.shuffle(&mut rng);
    t.shuffle(&mut rng);

    let mut repairs = 0;
    for r in 0..m {
        if u[r] != v[r] {
            continue;
        }
        let ok = |s: usize, v: &[usize]| s != r && u[r] != v[s] && u[s] != v[r];
        let mut partner = None;
        for _ in 0..32 {
            let s = rng.random_range(0..m);
            if ok(s, &v) {
                partner = Some(s);
                break;
            }
        }
        let s = partner
            .or_else(|| (0..m).find(|&s| ok(s, &v)))
            .ok_or_else(|| Error::InvalidGraph("no column swap removes a shuffled self-loop".into()))?;
        v.swap(r, s);
        repairs += 1;
    }

    let edges = (0..m).map(|i| TemporalEdge::new(u[i], v[i], t[i])).collect();
    Ok(NegativeSample {
        edges,
        repairs,
        degenerate: m < 2,
    })
}

/// Index of the equal-width interval containing `t`; the last interval is
/// closed on the right.
pub fn interval_of(t: f64, lo: f64, hi: f64, intervals: usize) -> usize {
    let w = (hi - lo) / intervals as f64;
    (((t - lo) / w).floor() as usize).min(intervals - 1)
}

/// Per trial: shuffled negatives, equal-width time intervals over all edges,
/// training on a random share of the early edges, testing on the remaining
/// early edges (interpolative) or on the last interval (extrapolative).
/// Test rows are cross line-graph rows against the training edges.
pub fn run_link_prediction(
    g: &TemporalGraph,
    cfg: &TdlgConfig,
    split: &SplitSpec,
    setting: LinkSetting,
    intervals: usize,
) -> Result<ExperimentReport> {
    run_link_prediction_with(g, cfg, split, setting, intervals, &LogRegConfig::default())
}

pub fn run_link_prediction_with(
    g: &TemporalGraph,
    cfg: &TdlgConfig,
    split: &SplitSpec,
    setting: LinkSetting,
    intervals: usize,
    logreg: &LogRegConfig,
) -> Result<ExperimentReport> {
    split.validate()?;
    cfg.validate()?;
    if cfg.normalization != Normalization::None {
        return Err(Error::Config(
            "normalization is not defined for cross line-graph rows".into(),
        ));
    }
    if intervals < 2 {
        return Err(Error::Config("need at least two time intervals".into()));
    }
    let (lo, hi) = g.time_range().ok_or(Error::TooFewEdges(0))?;
    if hi <= lo {
        return Err(Error::Config("link prediction needs a positive time span".into()));
    }

    let mut trials = Vec::with_capacity(split.trials);
    for trial in 0..split.trials {
        let seed = split.trial_seed(trial);
        let mut notes = Vec::new();
        let neg = sample_negative_edges(g, seed)?;
        if neg.repairs > 0 {
            notes.push(format!("{} shuffled self-loops repaired", neg.repairs));
        }
        if neg.degenerate {
            notes.push("negative sample is degenerate".into());
        }
        let all: Vec<TemporalEdge> = g
            .edges()
            .iter()
            .map(|e| TemporalEdge::new(e.u, e.v, e.t).with_label(true))
            .chain(neg.edges.into_iter().map(|e| e.with_label(false)))
            .collect();

        let last = intervals - 1;
        let (early, late): (Vec<usize>, Vec<usize>) =
            (0..all.len()).partition(|&i| interval_of(all[i].t, lo, hi, intervals) < last);
        if early.is_empty() {
            return Err(Error::Config("no edges before the last interval".into()));
        }
        if setting == LinkSetting::Extrapolative && late.is_empty() {
            return Err(Error::Config("last time interval is empty".into()));
        }

        let early_labels: Vec<bool> = early.iter().map(|&i| all[i].label == Some(true)).collect();
        let (tr, te) = split_both_classes(&early_labels, split.train_fraction, seed, &mut notes)?;
        let train_idx: Vec<usize> = tr.iter().map(|&i| early[i]).collect();
        let test_idx: Vec<usize> = match setting {
            LinkSetting::Interpolative => te.iter().map(|&i| early[i]).collect(),
            LinkSetting::Extrapolative => late,
        };
        let y_test: Vec<bool> = test_idx.iter().map(|&i| all[i].label == Some(true)).collect();

        let start = Instant::now();
        let train_g = TemporalGraph::new(g.n(), train_idx.iter().map(|&i| all[i]).collect())?;
        let test_g = TemporalGraph::new(g.n(), test_idx.iter().map(|&i| all[i]).collect())?;
        let sigma = cfg.sigma.resolve(&train_g.times())?;
        let inc = train_g.incidence();
        let a_rr = build_tdlg_with_sigma(&train_g, &inc, sigma, cfg)?;
        let a_er = build_cross_tdlg_with_sigma(&test_g, &train_g, &inc, sigma, cfg)?;
        let x_train = edge_embeddings(a_rr);
        let x_test = edge_embeddings(a_er);
        let y_train = train_g.labels().expect("labels set above");
        let model = train_logreg(&LabeledFeatures::all(&x_train, y_train)?, logreg)?;
        let scores = model.predict_scores(&x_test)?;
        let seconds = start.elapsed().as_secs_f64();
        if !model.fit.converged {
            notes.push(format!("classifier stopped after {} iterations", model.fit.iterations));
        }

        trials.push(TrialResult {
            trial,
            seed,
            auc: auc(&scores, &y_test)?,
            seconds,
            train_size: train_g.m(),
            test_size: test_g.m(),
            sigma_t: sigma,
            notes,
        });
    }
    Ok(ExperimentReport::new(
        ExperimentConfig {
            task: "link-prediction".into(),
            tdlg: cfg.clone(),
            split: split.clone(),
            variant: Some(Variant::Sparse),
            setting: Some(setting),
            intervals: Some(intervals),
            logreg: logreg.clone(),
        },
        trials,
    ))
}

/// Experiment swept by [`sweep_sigma`] and [`normalization_ablation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "task")]
pub enum Task {
    EdgeClassification { variant: Variant },
    LinkPrediction { setting: LinkSetting, intervals: usize },
}

impl Task {
    pub fn run(&self, g: &TemporalGraph, cfg: &TdlgConfig, split: &SplitSpec) -> Result<ExperimentReport> {
        match *self {
            Task::EdgeClassification { variant } => run_edge_classification(g, cfg, split, variant),
            Task::LinkPrediction { setting, intervals } => run_link_prediction(g, cfg, split, setting, intervals),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub label: String,
    pub mean_auc: f64,
    pub ci95: Option<f64>,
    /// Mean AUC divided by the best mean AUC of the sweep.
    pub proportion_of_best: f64,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    pub best: usize,
}

impl SweepReport {
    fn from_reports(parameter: &str, labelled: Vec<(String, ExperimentReport)>) -> Self {
        let best = labelled
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.mean_auc.total_cmp(&b.1 .1.mean_auc).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let best_auc = labelled[best].1.mean_auc;
        let points = labelled
            .into_iter()
            .map(|(label, report)| SweepPoint {
                label,
                mean_auc: report.mean_auc,
                ci95: report.ci95,
                proportion_of_best: report.mean_auc / best_auc,
                report,
            })
            .collect();
        SweepReport {
            parameter: parameter.into(),
            points,
            best,
        }
    }

    pub fn best_point(&self) -> &SweepPoint {
        &self.points[self.best]
    }

    pub fn min_proportion(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.proportion_of_best)
            .fold(f64::INFINITY, f64::min)
    }
}

impl Render for SweepReport {
    fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>12} {:>8} {:>8} {:>10}", self.parameter, "AUC", "±95%", "of best");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:>12} {:>8} {:>8} {:>10.4}{}",
                p.label,
                pct(p.mean_auc),
                opt_pct(p.ci95),
                p.proportion_of_best,
                if i == self.best { "  *" } else { "" }
            );
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = format!("{},mean_auc,ci95,proportion_of_best\n", self.parameter);
        for p in &self.points {
            let ci = p.ci95.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", p.label, p.mean_auc, ci, p.proportion_of_best);
        }
        s
    }
}

/// Runs `task` once per `σ_t / σ_T` ratio.
pub fn sweep_sigma(
    g: &TemporalGraph,
    ratios: &[f64],
    task: Task,
    cfg: &TdlgConfig,
    split: &SplitSpec,
) -> Result<SweepReport> {
    if ratios.is_empty() {
        return Err(Error::Config("empty sigma grid".into()));
    }
    let mut out = Vec::with_capacity(ratios.len());
    for &r in ratios {
        let c = TdlgConfig {
            sigma: Sigma::Ratio(r),
            ..cfg.clone()
        };
        out.push((format!("{r:e}"), task.run(g, &c, split)?));
    }
    Ok(SweepReport::from_reports("sigma_ratio", out))
}

/// Runs `task` without normalization and with each scheme in `schemes`.
pub fn normalization_ablation(
    g: &TemporalGraph,
    schemes: &[Normalization],
    task: Task,
    cfg: &TdlgConfig,
    split: &SplitSpec,
) -> Result<SweepReport> {
    let mut out = Vec::new();
    let mut all = vec![Normalization::None];
    all.extend(schemes.iter().copied().filter(|s| *s != Normalization::None));
    for scheme in all {
        let c = TdlgConfig {
            normalization: scheme,
            ..cfg.clone()
        };
        let name = serde_json::to_value(scheme).expect("enum serializes");
        out.push((name.as_str().unwrap_or_default().to_string(), task.run(g, &c, split)?));
    }
    Ok(SweepReport::from_reports("normalization", out))
}
