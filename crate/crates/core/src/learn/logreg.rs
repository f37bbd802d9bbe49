//! Binary logistic regression trained full-batch with L-BFGS.
//!
//! Minimises
//!
//! ```text
//! Σ_i c_{y_i} · log(1 + exp(-s_i (x_i·β + b))) + (λ/2)‖β‖²,   s_i ∈ {-1, +1}
//! ```
//!
//! with per-class weights `c` and an unregularized bias. Feature rows stay in
//! their native (sparse or dense) storage throughout.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Samples per gradient block; partial sums are reduced in block order so the
/// result does not depend on the number of worker threads.
const BLOCK: usize = 2048;
const MODEL_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeight {
    #[default]
    Uniform,
    /// `N / (2 N_c)` for class `c`.
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    /// L2 strength on the summed loss (1.0 matches the usual `C = 1`).
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the gradient infinity norm, divided by the total sample
    /// weight, falls to this.
    pub tol: f64,
    /// Stop once an iteration lowers the loss by less than this fraction.
    pub ftol: f64,
    pub class_weight: ClassWeight,
    /// L-BFGS memory.
    pub history: usize,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 1.0,
            max_iter: 1000,
            tol: 1e-6,
            ftol: 1e-12,
            class_weight: ClassWeight::Uniform,
            history: 10,
        }
    }
}

/// A selection of rows of a feature matrix together with their labels.
#[derive(Debug, Clone)]
pub struct LabeledFeatures<'a> {
    x: &'a EmbeddingMatrix,
    rows: Vec<usize>,
    y: Vec<bool>,
}

impl<'a> LabeledFeatures<'a> {
    pub fn new(x: &'a EmbeddingMatrix, rows: Vec<usize>, y: Vec<bool>) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: y.len(),
            });
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= x.rows()) {
            return Err(Error::Config(format!("row {r} out of range for {} rows", x.rows())));
        }
        Ok(LabeledFeatures { x, rows, y })
    }

    /// Every row of `x`, labelled by `y`.
    pub fn all(x: &'a EmbeddingMatrix, y: Vec<bool>) -> Result<Self> {
        Self::new(x, (0..x.rows()).collect(), y)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn labels(&self) -> &[bool] {
        &self.y
    }

    /// Per-sample loss weights under `scheme`.
    pub fn sample_weights(&self, scheme: ClassWeight) -> Result<Vec<f64>> {
        let [w0, w1] = class_weights(&self.y, scheme)?;
        Ok(self.y.iter().map(|&l| if l { w1 } else { w0 }).collect())
    }
}

/// `[w_negative, w_positive]`; errors unless both classes occur.
pub fn class_weights(y: &[bool], scheme: ClassWeight) -> Result<[f64; 2]> {
    let pos = y.iter().filter(|&&l| l).count();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok(match scheme {
        ClassWeight::Uniform => [1.0, 1.0],
        ClassWeight::Balanced => {
            let n = y.len() as f64;
            [n / (2.0 * neg as f64), n / (2.0 * pos as f64)]
        }
    })
}

/// Loss and gradient at `params = [β..., b]`.
pub fn objective(data: &LabeledFeatures<'_>, sample_w: &[f64], l2: f64, params: &[f64]) -> (f64, Vec<f64>) {
    let d = data.dim();
    let (beta, bias) = (&params[..d], params[d]);
    let partials: Vec<(f64, Vec<f64>)> = data
        .rows
        .par_chunks(BLOCK)
        .zip(data.y.par_chunks(BLOCK))
        .zip(sample_w.par_chunks(BLOCK))
        .map(|((rows, ys), ws)| {
            let mut loss = 0.0;
            let mut grad = vec![0.0; d + 1];
            for ((&r, &y), &w) in rows.iter().zip(ys).zip(ws) {
                let row = data.x.row(r);
                let z = row.dot(beta) + bias;
                let s = if y { 1.0 } else { -1.0 };
                loss += w * softplus(-s * z);
                // d/dz of w·softplus(-s z)
                let dz = -w * s * sigmoid(-s * z);
                row.axpy(dz, &mut grad[..d]);
                grad[d] += dz;
            }
            (loss, grad)
        })
        .collect();
    let mut loss = 0.5 * l2 * beta.iter().map(|b| b * b).sum::<f64>();
    let mut grad: Vec<f64> = beta.iter().map(|b| l2 * b).chain([0.0]).collect();
    for (l, g) in partials {
        loss += l;
        grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
    }
    (loss, grad)
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Optimiser outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub iterations: usize,
    /// `false` when the iteration cap or a failed line search stopped training.
    pub converged: bool,
    pub grad_norm: f64,
    /// Objective after every accepted step, starting with the initial point.
    pub loss_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: LogRegConfig,
    pub fit: FitReport,
}

pub fn train_logreg(data: &LabeledFeatures<'_>, cfg: &LogRegConfig) -> Result<LogRegModel> {
    let sample_w = data.sample_weights(cfg.class_weight)?;
    let d = data.dim();
    let mut x = vec![0.0; d + 1];
    let (mut f, mut g) = objective(data, &sample_w, cfg.l2, &x);
    if !f.is_finite() {
        return Err(Error::NonFiniteLoss(0));
    }
    let mut history = vec![f];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.history);
    let mut converged = false;
    let mut iterations = 0;
    let gtol = cfg.tol * sample_w.iter().sum::<f64>();

    while iterations < cfg.max_iter {
        if inf_norm(&g) <= gtol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut p = two_loop(&g, &memory);
        let mut slope = dotp(&g, &p);
        if slope >= 0.0 || !slope.is_finite() {
            memory.clear();
            p = g.iter().map(|v| -v).collect();
            slope = dotp(&g, &p);
        }
        let mut step = if memory.is_empty() {
            (1.0 / inf_norm(&g)).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let (ft, gt) = objective(data, &sample_w, cfg.l2, &trial);
            if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };
        if !fn_.is_finite() {
            return Err(Error::NonFiniteLoss(iterations));
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dotp(&s, &y);
        if sy > 1e-12 * dotp(&s, &s).sqrt() * dotp(&y, &y).sqrt() {
            if memory.len() == cfg.history.max(1) {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        let stalled = f - fn_ <= cfg.ftol * f.abs().max(fn_.abs()).max(1.0);
        x = xn;
        f = fn_;
        g = gn;
        history.push(f);
        if stalled {
            converged = true;
            break;
        }
    }
    if !converged && inf_norm(&g) <= gtol {
        converged = true;
    }
    let bias = x[d];
    x.truncate(d);
    Ok(LogRegModel {
        weights: x,
        bias,
        config: cfg.clone(),
        fit: FitReport {
            iterations,
            converged,
            grad_norm: inf_norm(&g),
            loss_history: history,
        },
    })
}

fn two_loop(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dotp(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dotp(s, y) / dotp(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dotp(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

impl LogRegModel {
    /// `σ(x·β + b)` for every row of `x`.
    pub fn predict_scores(&self, x: &EmbeddingMatrix) -> Result<Vec<f64>> {
        self.predict_rows(x, &(0..x.rows()).collect::<Vec<_>>())
    }

    pub fn predict_rows(&self, x: &EmbeddingMatrix, rows: &[usize]) -> Result<Vec<f64>> {
        if x.dim() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.dim(),
            });
        }
        Ok(rows
            .par_iter()
            .map(|&r| sigmoid(x.row(r).dot(&self.weights) + self.bias))
            .collect())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let doc = serde_json::json!({ "format": MODEL_FORMAT, "model": self });
        let text = serde_json::to_string(&doc).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
        match doc.get("format").and_then(|v| v.as_u64()) {
            Some(v) if v == MODEL_FORMAT as u64 => {}
            other => return Err(Error::Format(format!("unsupported model format {other:?}"))),
        }
        serde_json::from_value(doc["model"].take()).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{DenseMatrix, RowRole};

    fn dense(rows: &[Vec<f64>]) -> EmbeddingMatrix {
        EmbeddingMatrix::dense(DenseMatrix::from_rows(rows).unwrap(), RowRole::Edge)
    }

    #[test]
    fn separable_two_points() {
        let x = dense(&[vec![1.0], vec![-1.0]]);
        let data = LabeledFeatures::all(&x, vec![true, false]).unwrap();
        let model = train_logreg(&data, &LogRegConfig::default()).unwrap();
        let p = model.predict_scores(&x).unwrap();
        assert!(p[0] > 0.5 && p[1] < 0.5);
        assert!(model.fit.converged);
    }

    #[test]
    fn balanced_weights_90_10() {
        let y: Vec<bool> = (0..100).map(|i| i < 10).collect();
        let [w0, w1] = class_weights(&y, ClassWeight::Balanced).unwrap();
        assert!((w0 - 100.0 / 180.0).abs() < 1e-15);
        assert!((w1 - 5.0).abs() < 1e-15);
        assert!((w0 - 0.5556).abs() < 1e-4);
        assert_eq!(class_weights(&y, ClassWeight::Uniform).unwrap(), [1.0, 1.0]);
    }

    #[test]
    fn single_class_rejected() {
        let x = dense(&[vec![1.0], vec![2.0]]);
        let data = LabeledFeatures::all(&x, vec![true, true]).unwrap();
        assert!(matches!(
            train_logreg(&data, &LogRegConfig::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn mirrored_data_mirrors_model() {
        let rows = vec![
            vec![1.0, 0.3],
            vec![0.2, -1.0],
            vec![-0.5, 0.4],
            vec![0.9, 0.9],
            vec![-1.2, -0.1],
        ];
        let y = vec![true, false, false, true, true];
        let x = dense(&rows);
        let neg_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        let xn = dense(&neg_rows);
        let cfg = LogRegConfig {
            class_weight: ClassWeight::Balanced,
            ..Default::default()
        };
        let m1 = train_logreg(&LabeledFeatures::all(&x, y.clone()).unwrap(), &cfg).unwrap();
        let m2 = train_logreg(
            &LabeledFeatures::all(&xn, y.iter().map(|l| !l).collect()).unwrap(),
            &cfg,
        )
        .unwrap();
        for (a, b) in m1.weights.iter().zip(&m2.weights) {
            assert!((a - b).abs() < 1e-6, "{a} {b}");
        }
        assert!((m1.bias + m2.bias).abs() < 1e-6);
    }

    #[test]
    fn scores_basic_properties() {
        let model = LogRegModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            config: LogRegConfig::default(),
            fit: FitReport {
                iterations: 0,
                converged: true,
                grad_norm: 0.0,
                loss_history: vec![],
            },
        };
        let x = dense(&[vec![1.0, 2.0], vec![-3.0, 0.5]]);
        assert_eq!(model.predict_scores(&x).unwrap(), vec![0.5, 0.5]);
        let m2 = LogRegModel {
            bias: 1.5,
            weights: vec![2.0, -1.0],
            ..model.clone()
        };
        let zero = dense(&[vec![0.0, 0.0]]);
        assert!((m2.predict_scores(&zero).unwrap()[0] - sigmoid(1.5)).abs() < 1e-15);
        assert!(model.predict_scores(&dense(&[vec![1.0]])).is_err());
    }

    #[test]
    fn zero_columns_do_not_change_scores() {
        let rows = vec![vec![1.0, 0.3], vec![0.2, -1.0], vec![-0.5, 0.4], vec![0.9, 0.9]];
        let padded: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], 0.0, r[1], 0.0]).collect();
        let y = vec![true, false, false, true];
        let cfg = LogRegConfig::default();
        let (x, xp) = (dense(&rows), dense(&padded));
        let m = train_logreg(&LabeledFeatures::all(&x, y.clone()).unwrap(), &cfg).unwrap();
        let mp = train_logreg(&LabeledFeatures::all(&xp, y).unwrap(), &cfg).unwrap();
        let (s, sp) = (m.predict_scores(&x).unwrap(), mp.predict_scores(&xp).unwrap());
        for (a, b) in s.iter().zip(&sp) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn loss_never_increases() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.37;
                vec![t.sin(), (2.0 * t).cos(), t.sin() * t.cos()]
            })
            .collect();
        let y: Vec<bool> = (0..40).map(|i| (i * 7 % 5) < 2).collect();
        let x = dense(&rows);
        let m = train_logreg(&LabeledFeatures::all(&x, y).unwrap(), &LogRegConfig::default()).unwrap();
        assert!(m.fit.loss_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.fit.converged);
    }

    #[test]
    fn save_load_roundtrip() {
        let x = dense(&[vec![1.0], vec![-1.0]]);
        let m = train_logreg(
            &LabeledFeatures::all(&x, vec![true, false]).unwrap(),
            &LogRegConfig::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("model.json");
        m.save(&p).unwrap();
        assert_eq!(LogRegModel::load(&p).unwrap(), m);
        fs::write(&p, r#"{"format":99,"model":{}}"#).unwrap();
        assert!(LogRegModel::load(&p).is_err());
    }
}
