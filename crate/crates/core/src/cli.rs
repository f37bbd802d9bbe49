//! Command-line driver. Settings come from flags, then an optional TOML
//! config file (`--config`), then built-in defaults; the resolved settings
//! are echoed in every JSON report.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::eigen::{dense_embed, EigenOptions};
use crate::embeddings::{edge_embeddings, mean_edge_node_embeddings, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{
    load_edge_list_with_stats, write_edge_list, Columns, DatasetManifest, Delimiter, EdgeListFormat, SelfLoopPolicy,
    TemporalGraph,
};
use crate::pipelines::{
    normalization_ablation, run_edge_classification, run_link_prediction, sweep_sigma, LinkSetting, Render,
    ReportFormat, SplitSpec, Task, Variant, DEFAULT_INTERVALS, DEFAULT_SEED,
};
use crate::tdlg::{build_tdlg, normalize, Decay, Normalization, Sigma, TdlgConfig, DEFAULT_SIGMA_RATIO};
use crate::tsbm::{generate_tsbm, verify_theory, write_tags, TsbmParams};

#[derive(Debug, Parser)]
#[command(
    name = "tdlg",
    version,
    about = "Time-decayed line graph embeddings for temporal networks",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the line-graph matrix and write it as COO text or binary CSR (`.bin`).
    Build(RunArgs),
    /// Write edge embeddings, or node embeddings with `--node`.
    Embed {
        #[command(flatten)]
        run: RunArgs,
        /// Mean-edge node embeddings instead of edge embeddings.
        #[arg(long)]
        node: bool,
    },
    /// Temporal edge classification over repeated random splits.
    Classify(RunArgs),
    /// Link prediction against column-shuffled negatives.
    Linkpred(RunArgs),
    /// Sample a temporal stochastic block model.
    Tsbm {
        #[command(flatten)]
        params: TsbmArgs,
        /// Edge list output (`u,v,t[,label]`).
        #[arg(long)]
        out: PathBuf,
        /// Block-tag sidecar, one tag per edge.
        #[arg(long)]
        tags: Option<PathBuf>,
        /// Label edges 1 when intra-community.
        #[arg(long)]
        label_intra: bool,
    },
    /// Compare sampled line-graph block means with their expected values.
    VerifyTheory {
        #[command(flatten)]
        params: TsbmArgs,
        #[arg(long, default_value_t = 0.5)]
        sigma_t: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep σ_t ratios, or normalization schemes with `--ablation`.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated σ_t / σ_T ratios.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-3, 1e-2, 1e-1, 1.0, 10.0])]
        grid: Vec<f64>,
        /// `classify` or `linkpred`.
        #[arg(long, default_value = "classify")]
        task: String,
        /// Compare no/spectral/edge normalization instead of sweeping σ_t.
        #[arg(long)]
        ablation: bool,
    },
}

#[derive(Debug, Args)]
pub struct TsbmArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 40)]
    pub delta: usize,
    #[arg(long, default_value_t = 0.9)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha2: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub mu1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

impl From<&TsbmArgs> for TsbmParams {
    fn from(a: &TsbmArgs) -> Self {
        TsbmParams {
            n: a.n,
            delta: a.delta,
            alpha1: a.alpha1,
            alpha2: a.alpha2,
            mu1: a.mu1,
            mu2: a.mu2,
            sigma1: a.sigma1,
            sigma2: a.sigma2,
            seed: a.seed,
        }
    }
}

/// Flags shared by the data-driven subcommands. Every field is optional so
/// that a config file can fill in what the command line leaves out.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    /// TOML file with any of these settings (flag names with `_`).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Edge-list file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Dataset name looked up in `--manifest`.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// `,`, `tab`, `ws`, or any single character.
    #[arg(long)]
    pub delimiter: Option<String>,
    /// Column order, e.g. `u,v,t,label` or `u,v,label,t`.
    #[arg(long)]
    pub columns: Option<String>,
    /// Labels strictly above this are positive.
    #[arg(long, allow_hyphen_values = true)]
    pub label_threshold: Option<f64>,
    #[arg(long)]
    pub skip_header: Option<bool>,
    /// Drop self-loop rows instead of failing.
    #[arg(long)]
    pub skip_self_loops: Option<bool>,
    /// σ_t as a multiple of the edge-time standard deviation.
    #[arg(long, conflicts_with = "sigma_t")]
    pub sigma_ratio: Option<f64>,
    /// Absolute σ_t.
    #[arg(long)]
    pub sigma_t: Option<f64>,
    #[arg(long)]
    pub decay: Option<String>,
    /// `none`, `spectral` or `edge`.
    #[arg(long)]
    pub normalization: Option<Normalization>,
    #[arg(long)]
    pub weight_cutoff: Option<f64>,
    #[arg(long)]
    pub entry_budget: Option<u64>,
    /// Use `k` eigenvector features instead of sparse rows.
    #[arg(long)]
    pub dense_k: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub train_frac: Option<f64>,
    #[arg(long)]
    pub intervals: Option<usize>,
    /// `interp` or `extrap`.
    #[arg(long)]
    pub setting: Option<LinkSetting>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `json`, `table` or `csv`.
    #[arg(long)]
    pub format: Option<ReportFormat>,
}

macro_rules! merge_fields {
    ($a:ident, $b:ident, $($f:ident),*) => {
        RunArgs { config: $a.config.clone(), $($f: $a.$f.clone().or_else(|| $b.$f.clone()),)* }
    };
}

impl RunArgs {
    /// Fills unset flags from the `--config` file, if one was given.
    pub fn resolve(&self) -> Result<RunArgs> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: RunArgs = toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Ok(merge_fields!(
            self,
            file,
            data,
            dataset,
            manifest,
            delimiter,
            columns,
            label_threshold,
            skip_header,
            skip_self_loops,
            sigma_ratio,
            sigma_t,
            decay,
            normalization,
            weight_cutoff,
            entry_budget,
            dense_k,
            trials,
            seed,
            train_frac,
            intervals,
            setting,
            out,
            format
        ))
    }

    pub fn tdlg_config(&self) -> Result<TdlgConfig> {
        let sigma = match (self.sigma_t, self.sigma_ratio) {
            (Some(_), Some(_)) => return Err(Error::Config("give either sigma_t or sigma_ratio".into())),
            (Some(s), None) => Sigma::Absolute(s),
            (None, r) => Sigma::Ratio(r.unwrap_or(DEFAULT_SIGMA_RATIO)),
        };
        let mut cfg = TdlgConfig {
            sigma,
            ..TdlgConfig::default()
        };
        if let Some(d) = &self.decay {
            cfg.decay = match d.as_str() {
                "gaussian" => Decay::Gaussian,
                "laplacian" => Decay::Laplacian,
                _ => return Err(Error::Config(format!("unknown decay {d:?}"))),
            };
        }
        cfg.normalization = self.normalization.unwrap_or_default();
        cfg.weight_cutoff = self.weight_cutoff;
        if let Some(b) = self.entry_budget {
            cfg.entry_budget = b as u128;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn split(&self, defaults: SplitSpec) -> Result<SplitSpec> {
        let s = SplitSpec {
            train_fraction: self.train_frac.unwrap_or(defaults.train_fraction),
            trials: self.trials.unwrap_or(defaults.trials),
            seed: self.seed.unwrap_or(defaults.seed),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn variant(&self) -> Variant {
        match self.dense_k {
            Some(k) => Variant::Dense { k },
            None => Variant::Sparse,
        }
    }

    /// Loads the graph named by `--data` or `--dataset`/`--manifest`.
    pub fn load_graph(&self, labels: bool) -> Result<TemporalGraph> {
        let (path, mut format) = match (&self.data, &self.dataset) {
            (Some(p), None) => (p.clone(), EdgeListFormat::default()),
            (None, Some(name)) => {
                let manifest = self
                    .manifest
                    .as_ref()
                    .ok_or_else(|| Error::Config("--dataset needs --manifest".into()))?;
                DatasetManifest::load(manifest)?.resolve(name, labels)?
            }
            (Some(_), Some(_)) => return Err(Error::Config("give either --data or --dataset".into())),
            (None, None) => return Err(Error::Config("no input: pass --data or --dataset".into())),
        };
        format.has_labels = labels;
        if let Some(d) = &self.delimiter {
            format.delimiter = d.parse::<Delimiter>()?;
        }
        if let Some(c) = &self.columns {
            format.columns = c.parse::<Columns>()?;
        }
        if let Some(t) = self.label_threshold {
            format.label_threshold = t;
        }
        if let Some(h) = self.skip_header {
            format.skip_header = h;
        }
        if self.skip_self_loops == Some(true) {
            format.self_loops = SelfLoopPolicy::Skip;
        }
        let (g, stats) = load_edge_list_with_stats(&path, &format)?;
        if stats.skipped_self_loops > 0 {
            eprintln!("skipped {} self-loop rows", stats.skipped_self_loops);
        }
        Ok(g)
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Caps the worker pool at `TDLG_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("TDLG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Error::Config(format!("TDLG_THREADS must be a positive integer, got {v:?}")))?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn emit_report(report: &impl Render, run: &RunArgs) -> Result<()> {
    let format = run.format.unwrap_or_default();
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&serde_json::json!({ "run": run, "report": report }))
            .map_err(|e| Error::Format(e.to_string()))?,
        _ => report.render(format),
    };
    emit(&text, run.out.as_deref())
}

fn write_embedding(x: &EmbeddingMatrix, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => x.write(p),
        None => {
            let mut stdout = std::io::BufWriter::new(std::io::stdout().lock());
            x.write_to(&mut stdout)
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(run) => {
            let run = run.resolve()?;
            let g = run.load_graph(false)?;
            let cfg = run.tdlg_config()?;
            let sigma = cfg.sigma.resolve(&g.times())?;
            let mut a = build_tdlg(&g, &g.incidence(), &cfg)?;
            if cfg.normalization != Normalization::None {
                a = normalize(&a, cfg.normalization)?;
            }
            if let Some(p) = &run.out {
                if p.extension().is_some_and(|e| e == "bin") {
                    a.write_binary(p)?;
                } else {
                    a.write_coo(p)?;
                }
            }
            let summary = serde_json::json!({
                "run": run,
                "nodes": g.n(),
                "edges": g.m(),
                "sigma_t": sigma,
                "nnz": a.nnz(),
                "total_sum": a.total_sum(),
            });
            emit(&serde_json::to_string_pretty(&summary).expect("json"), None)
        }
        Command::Embed { run, node } => {
            let run = run.resolve()?;
            let g = run.load_graph(false)?;
            let cfg = run.tdlg_config()?;
            let inc = g.incidence();
            let mut a = build_tdlg(&g, &inc, &cfg)?;
            if cfg.normalization != Normalization::None {
                a = normalize(&a, cfg.normalization)?;
            }
            let y = match run.variant() {
                Variant::Sparse => edge_embeddings(a),
                Variant::Dense { k } => dense_embed(
                    &a,
                    k,
                    &EigenOptions {
                        seed: run.seed.unwrap_or(DEFAULT_SEED),
                        ..Default::default()
                    },
                )?,
            };
            let x = if node { mean_edge_node_embeddings(&inc, &y)? } else { y };
            write_embedding(&x, run.out.as_deref())
        }
        Command::Classify(run) => {
            let run = run.resolve()?;
            let g = run.load_graph(true)?;
            let report = run_edge_classification(
                &g,
                &run.tdlg_config()?,
                &run.split(SplitSpec::classification())?,
                run.variant(),
            )?;
            emit_report(&report, &run)
        }
        Command::Linkpred(run) => {
            let run = run.resolve()?;
            if run.dense_k.is_some() {
                return Err(Error::Config("link prediction uses sparse features only".into()));
            }
            let g = run.load_graph(false)?;
            let report = run_link_prediction(
                &g,
                &run.tdlg_config()?,
                &run.split(SplitSpec::link_prediction())?,
                run.setting.unwrap_or(LinkSetting::Interpolative),
                run.intervals.unwrap_or(DEFAULT_INTERVALS),
            )?;
            emit_report(&report, &run)
        }
        Command::Tsbm {
            params,
            out,
            tags,
            label_intra,
        } => {
            let sample = generate_tsbm(&TsbmParams::from(&params))?;
            let g = if label_intra {
                sample.labeled_by_community()
            } else {
                sample.graph.clone()
            };
            write_edge_list(&g, &out)?;
            if let Some(t) = tags {
                write_tags(&sample.tags, t)?;
            }
            Ok(())
        }
        Command::VerifyTheory {
            params,
            sigma_t,
            trials,
            out,
        } => {
            let report = verify_theory(&TsbmParams::from(&params), sigma_t, trials)?;
            emit(&serde_json::to_string_pretty(&report).expect("json"), out.as_deref())
        }
        Command::Sweep {
            run,
            grid,
            task,
            ablation,
        } => {
            let run = run.resolve()?;
            let (task, split, labels) = match task.as_str() {
                "classify" => (
                    Task::EdgeClassification { variant: run.variant() },
                    run.split(SplitSpec::classification())?,
                    true,
                ),
                "linkpred" => (
                    Task::LinkPrediction {
                        setting: run.setting.unwrap_or(LinkSetting::Interpolative),
                        intervals: run.intervals.unwrap_or(DEFAULT_INTERVALS),
                    },
                    run.split(SplitSpec::link_prediction())?,
                    false,
                ),
                other => return Err(Error::Config(format!("unknown sweep task {other:?}"))),
            };
            let g = run.load_graph(labels)?;
            let cfg = run.tdlg_config()?;
            let report = if ablation {
                normalization_ablation(&g, &[Normalization::Spectral, Normalization::Edge], task, &cfg, &split)?
            } else {
                sweep_sigma(&g, &grid, task, &cfg, &split)?
            };
            emit_report(&report, &run)
        }
    }
}
