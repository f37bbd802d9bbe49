//! Time-decayed line graph construction.
//!
//! Every temporal edge becomes a line-graph node. Two temporal edges `i`, `j`
//! are joined with weight
//!
//! ```text
//! A[i][j] = (b_i · b_j) * exp(-(t_i - t_j)^2 / (2 sigma^2))
//! ```
//!
//! where `b_i · b_j` counts the endpoints the two edges share (1, or 2 for
//! parallel edges and for the diagonal). Rows are assembled independently by
//! merging the sorted incidence lists of the row edge's two endpoints, which
//! touches `Σ_v deg(v)²` pairs and never materialises a dense `m × m` pass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{population_std, Incidence, TemporalEdge, TemporalGraph};
use crate::sparse::CsrMatrix;

/// Default `sigma_t / sigma_T` ratio.
pub const DEFAULT_SIGMA_RATIO: f64 = 0.1;

/// Default cap on `Σ_v deg(v)²` before construction is refused.
pub const DEFAULT_ENTRY_BUDGET: u128 = 2_000_000_000;

/// Time-decay scale, either absolute or relative to the spread of edge times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma {
    Absolute(f64),
    /// `sigma_t = ratio * sigma_T`, with `sigma_T` the population standard
    /// deviation of the reference edge times.
    Ratio(f64),
}

impl Default for Sigma {
    fn default() -> Self {
        Sigma::Ratio(DEFAULT_SIGMA_RATIO)
    }
}

impl Sigma {
    pub fn resolve(&self, times: &[f64]) -> Result<f64> {
        let s = match *self {
            Sigma::Absolute(s) => s,
            Sigma::Ratio(r) => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::Config(format!("sigma ratio must be positive, got {r}")));
                }
                let std = population_std(times)?;
                if std == 0.0 {
                    return Err(Error::ZeroTimeVariance);
                }
                r * std
            }
        };
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Config(format!("sigma_t must be positive and finite, got {s}")));
        }
        Ok(s)
    }
}

/// Shape of the weight decay in the time difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decay {
    /// `exp(-dt² / (2 sigma²))`
    #[default]
    Gaussian,
    /// `exp(-|dt| / sigma)`
    Laplacian,
}

impl Decay {
    #[inline]
    pub fn weight(self, dt: f64, sigma: f64) -> f64 {
        match self {
            Decay::Gaussian => (-(dt * dt) / (2.0 * sigma * sigma)).exp(),
            Decay::Laplacian => (-dt.abs() / sigma).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    None,
    /// `D^{-1/2} A D^{-1/2}`
    Spectral,
    /// `(D^{-1} A + A D^{-1}) / 2`
    Edge,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Normalization::None),
            "spectral" => Ok(Normalization::Spectral),
            "edge" => Ok(Normalization::Edge),
            _ => Err(Error::Config(format!("unknown normalization {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TdlgConfig {
    pub sigma: Sigma,
    pub decay: Decay,
    pub normalization: Normalization,
    /// Drop entries with weight `<= cutoff`.
    pub weight_cutoff: Option<f64>,
    pub keep_diagonal: bool,
    /// Refuse to build when `Σ deg²` exceeds this many entries.
    pub entry_budget: u128,
}

impl Default for TdlgConfig {
    fn default() -> Self {
        TdlgConfig {
            sigma: Sigma::default(),
            decay: Decay::Gaussian,
            normalization: Normalization::None,
            weight_cutoff: None,
            keep_diagonal: true,
            entry_budget: DEFAULT_ENTRY_BUDGET,
        }
    }
}

impl TdlgConfig {
    pub fn with_sigma(sigma: Sigma) -> Self {
        TdlgConfig {
            sigma,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(tau) = self.weight_cutoff {
            // the largest possible entry is b_i·b_j = 2
            if !(0.0..2.0).contains(&tau) {
                return Err(Error::Config(format!("weight cutoff must lie in [0, 2), got {tau}")));
            }
        }
        Ok(())
    }
}

/// Square adjacency of the time-decayed line graph of `g`, with `sigma_t`
/// resolved from the times of `g`.
pub fn build_tdlg(g: &TemporalGraph, inc: &Incidence, cfg: &TdlgConfig) -> Result<CsrMatrix> {
    let sigma = cfg.sigma.resolve(&g.times())?;
    build_tdlg_with_sigma(g, inc, sigma, cfg)
}

/// [`build_tdlg`] with an already resolved `sigma_t`.
pub fn build_tdlg_with_sigma(g: &TemporalGraph, inc: &Incidence, sigma: f64, cfg: &TdlgConfig) -> Result<CsrMatrix> {
    cfg.validate()?;
    check_sigma(sigma)?;
    if inc.n() != g.n() || inc.nnz() != 2 * g.m() {
        return Err(Error::InvalidGraph("incidence does not belong to this graph".into()));
    }
    let required = inc.clique_work();
    if required > cfg.entry_budget {
        return Err(Error::EntryBudget {
            required,
            budget: cfg.entry_budget,
        });
    }
    let edges = g.edges();
    let rows = edges
        .par_iter()
        .enumerate()
        .map(|(i, e)| line_row(e, Some(i), edges, inc, sigma, cfg))
        .collect();
    Ok(CsrMatrix::from_sorted_rows(g.m(), rows))
}

/// Rectangular `m_test × m_train` matrix whose row `i` holds the shared-endpoint
/// count between test edge `i` and each training edge, decayed by their time
/// difference. `sigma_t` is resolved from the training times only.
pub fn build_cross_tdlg(test: &TemporalGraph, train: &TemporalGraph, cfg: &TdlgConfig) -> Result<CsrMatrix> {
    let sigma = cfg.sigma.resolve(&train.times())?;
    build_cross_tdlg_with_sigma(test, train, &train.incidence(), sigma, cfg)
}

pub fn build_cross_tdlg_with_sigma(
    test: &TemporalGraph,
    train: &TemporalGraph,
    train_inc: &Incidence,
    sigma: f64,
    cfg: &TdlgConfig,
) -> Result<CsrMatrix> {
    cfg.validate()?;
    check_sigma(sigma)?;
    if test.n() != train.n() || train_inc.n() != train.n() {
        return Err(Error::DimensionMismatch {
            expected: train.n(),
            got: test.n(),
        });
    }
    let test_inc = test.incidence();
    let required: u128 = (0..train.n())
        .map(|v| test_inc.degree(v) as u128 * train_inc.degree(v) as u128)
        .sum();
    if required > cfg.entry_budget {
        return Err(Error::EntryBudget {
            required,
            budget: cfg.entry_budget,
        });
    }
    let rows = test
        .edges()
        .par_iter()
        .map(|e| line_row(e, None, train.edges(), train_inc, sigma, cfg))
        .collect();
    Ok(CsrMatrix::from_sorted_rows(train.m(), rows))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "sigma_t must be positive and finite, got {sigma}"
        )))
    }
}

/// One row: all reference edges incident to either endpoint of `e`, in
/// ascending index order. An index present in both endpoint lists shares
/// both endpoints with `e`.
fn line_row(
    e: &TemporalEdge,
    self_index: Option<usize>,
    reference: &[TemporalEdge],
    inc: &Incidence,
    sigma: f64,
    cfg: &TdlgConfig,
) -> (Vec<usize>, Vec<f64>) {
    let (a, b) = (inc.incident(e.u), inc.incident(e.v));
    let mut idx = Vec::with_capacity(a.len() + b.len());
    let mut val = Vec::with_capacity(a.len() + b.len());
    let (mut p, mut q) = (0, 0);
    while p < a.len() || q < b.len() {
        let (j, shared) = match (a.get(p), b.get(q)) {
            (Some(&x), Some(&y)) if x == y => {
                p += 1;
                q += 1;
                (x, 2.0)
            }
            (Some(&x), Some(&y)) if x < y => {
                p += 1;
                (x, 1.0)
            }
            (Some(_), Some(&y)) => {
                q += 1;
                (y, 1.0)
            }
            (Some(&x), None) => {
                p += 1;
                (x, 1.0)
            }
            (None, Some(&y)) => {
                q += 1;
                (y, 1.0)
            }
            (None, None) => unreachable!(),
        };
        if !cfg.keep_diagonal && self_index == Some(j) {
            continue;
        }
        let w = shared * cfg.decay.weight(e.t - reference[j].t, sigma);
        // underflowed weights are structural zeros
        if w == 0.0 || cfg.weight_cutoff.is_some_and(|tau| w <= tau) {
            continue;
        }
        idx.push(j);
        val.push(w);
    }
    (idx, val)
}

/// Degree normalization of a square symmetric matrix.
pub fn normalize(a: &CsrMatrix, scheme: Normalization) -> Result<CsrMatrix> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    if scheme == Normalization::None {
        return Ok(a.clone());
    }
    let d = a.row_sums();
    if let Some(row) = d.iter().position(|&s| s <= 0.0 || !s.is_finite()) {
        return Err(Error::ZeroRowSum { row });
    }
    Ok(match scheme {
        Normalization::Spectral => {
            let inv_sqrt: Vec<f64> = d.iter().map(|s| 1.0 / s.sqrt()).collect();
            a.map_entries(|i, j, w| w * inv_sqrt[i] * inv_sqrt[j])
        }
        Normalization::Edge => a.map_entries(|i, j, w| 0.5 * (w / d[i] + w / d[j])),
        Normalization::None => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs(s: f64) -> TdlgConfig {
        TdlgConfig::with_sigma(Sigma::Absolute(s))
    }

    #[test]
    fn three_edge_path() {
        // a-b, b-c, c-d at t = 0, 0, 1
        let g = TemporalGraph::from_triples(4, &[(0, 1, 0.0), (1, 2, 0.0), (2, 3, 1.0)]).unwrap();
        let a = build_tdlg(&g, &g.incidence(), &abs(1.0)).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.row(0).indices, &[0, 1]);
        assert!((a.get(1, 2) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((a.get(1, 2) - 0.60653).abs() < 1e-5);
        for i in 0..3 {
            assert_eq!(a.get(i, i), 2.0);
        }
        assert!(a.is_symmetric(0.0));
    }

    #[test]
    fn parallel_edges_share_two_endpoints() {
        let g = TemporalGraph::from_triples(2, &[(0, 1, 0.0), (1, 0, 0.0)]).unwrap();
        let a = build_tdlg(&g, &g.incidence(), &abs(1.0)).unwrap();
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(1, 0), 2.0);
    }

    #[test]
    fn diagonal_toggle_and_cutoff() {
        let g = TemporalGraph::from_triples(4, &[(0, 1, 0.0), (1, 2, 0.0), (2, 3, 1.0)]).unwrap();
        let cfg = TdlgConfig {
            keep_diagonal: false,
            ..abs(1.0)
        };
        let a = build_tdlg(&g, &g.incidence(), &cfg).unwrap();
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 4);

        let cfg = TdlgConfig {
            weight_cutoff: Some(0.7),
            ..abs(1.0)
        };
        let a = build_tdlg(&g, &g.incidence(), &cfg).unwrap();
        assert_eq!(a.get(1, 2), 0.0);
        assert_eq!(a.get(0, 1), 1.0);

        let bad = TdlgConfig {
            weight_cutoff: Some(2.0),
            ..abs(1.0)
        };
        assert!(build_tdlg(&g, &g.incidence(), &bad).is_err());
    }

    #[test]
    fn sigma_errors() {
        let g = TemporalGraph::from_triples(3, &[(0, 1, 5.0), (1, 2, 5.0)]).unwrap();
        let inc = g.incidence();
        assert!(build_tdlg(&g, &inc, &abs(0.0)).is_err());
        assert!(matches!(
            build_tdlg(&g, &inc, &TdlgConfig::default()),
            Err(Error::ZeroTimeVariance)
        ));
        assert!(build_tdlg(&g, &inc, &abs(1.0)).is_ok());
    }

    #[test]
    fn sigma_ratio_scales_time_std() {
        let g = TemporalGraph::from_triples(3, &[(0, 1, -1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(Sigma::Ratio(0.5).resolve(&g.times()).unwrap(), 0.5);
        let a = build_tdlg(&g, &g.incidence(), &TdlgConfig::with_sigma(Sigma::Ratio(0.5))).unwrap();
        // dt = 2, sigma = 0.5
        assert!((a.get(0, 1) - (-8.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn entry_budget_guard() {
        let g = TemporalGraph::from_triples(3, &[(0, 1, 0.0), (0, 2, 1.0), (1, 2, 2.0)]).unwrap();
        let cfg = TdlgConfig {
            entry_budget: 11,
            ..abs(1.0)
        };
        // three nodes of degree 2
        assert!(matches!(
            build_tdlg(&g, &g.incidence(), &cfg),
            Err(Error::EntryBudget {
                required: 12,
                budget: 11
            })
        ));
    }

    #[test]
    fn laplacian_decay() {
        let g = TemporalGraph::from_triples(3, &[(0, 1, 0.0), (1, 2, 2.0)]).unwrap();
        let cfg = TdlgConfig {
            decay: Decay::Laplacian,
            ..abs(1.0)
        };
        let a = build_tdlg(&g, &g.incidence(), &cfg).unwrap();
        assert!((a.get(0, 1) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn cross_matrix_rows() {
        // train: a-b @0, c-d @0 ; test: b-c @1 and an isolated e-f
        let train = TemporalGraph::from_triples(6, &[(0, 1, 0.0), (2, 3, 0.0)]).unwrap();
        let test = TemporalGraph::from_triples(6, &[(1, 2, 1.0), (4, 5, 0.0)]).unwrap();
        let x = build_cross_tdlg_with_sigma(&test, &train, &train.incidence(), 1.0, &abs(1.0)).unwrap();
        assert_eq!(x.shape(), (2, 2));
        let e = (-0.5f64).exp();
        assert_eq!(x.row(0).indices, &[0, 1]);
        assert!((x.get(0, 0) - e).abs() < 1e-15 && (x.get(0, 1) - e).abs() < 1e-15);
        assert_eq!(x.row(1).nnz(), 0);
    }

    #[test]
    fn cross_with_itself_is_square_build() {
        let g =
            TemporalGraph::from_triples(4, &[(0, 1, 0.0), (1, 2, 0.3), (2, 3, 1.0), (3, 0, 2.0), (0, 1, 0.1)]).unwrap();
        let cfg = TdlgConfig::default();
        let a = build_tdlg(&g, &g.incidence(), &cfg).unwrap();
        let x = build_cross_tdlg(&g, &g, &cfg).unwrap();
        assert_eq!(a, x);
    }

    #[test]
    fn normalize_two_by_two() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let expected = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for scheme in [Normalization::Spectral, Normalization::Edge] {
            let n = normalize(&a, scheme).unwrap();
            for (i, row) in expected.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    assert!((n.get(i, j) - e).abs() < 1e-15, "{scheme:?}");
                }
            }
        }
        assert_eq!(normalize(&a, Normalization::None).unwrap(), a);
    }

    #[test]
    fn normalize_zero_row_errors() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            normalize(&a, Normalization::Spectral),
            Err(Error::ZeroRowSum { row: 1 })
        ));
    }

    #[test]
    fn edge_normalization_sums_to_m() {
        let g = TemporalGraph::from_triples(
            5,
            &[
                (0, 1, 0.0),
                (1, 2, 0.5),
                (2, 3, 1.0),
                (3, 4, 4.0),
                (4, 0, 2.0),
                (1, 3, 3.0),
            ],
        )
        .unwrap();
        let a = build_tdlg(&g, &g.incidence(), &abs(1.0)).unwrap();
        let n = normalize(&a, Normalization::Edge).unwrap();
        assert!((n.total_sum() - g.m() as f64).abs() < 1e-12);
        assert!(n.row_sums().iter().all(|&s| s >= 0.5 - 1e-12));
        assert!(n.is_symmetric(1e-15));
    }
}
