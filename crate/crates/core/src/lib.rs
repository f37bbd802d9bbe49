//! Time-decayed line graph (TDLG) embeddings for continuous-time temporal
//! networks.
//!
//! Each temporal edge becomes a node of a line graph; two edges are linked
//! with weight (shared endpoints) × exp(−Δt² / 2σ_t²). Rows of that sparse
//! matrix, or its top eigenvectors, serve as edge features for downstream
//! classifiers.
//!
//! ```
//! use tdlg::graph::TemporalGraph;
//! use tdlg::tdlg::{build_tdlg, Sigma, TdlgConfig};
//!
//! let g = TemporalGraph::from_triples(3, &[(0, 1, 0.0), (1, 2, 1.0)]).unwrap();
//! let a = build_tdlg(&g, &g.incidence(), &TdlgConfig::with_sigma(Sigma::Absolute(1.0))).unwrap();
//! assert_eq!(a.get(0, 0), 2.0);
//! assert!((a.get(0, 1) - (-0.5f64).exp()).abs() < 1e-15);
//! ```

pub mod cli;
pub mod eigen;
pub mod embeddings;
pub mod error;
pub mod graph;
pub mod learn;
pub mod pipelines;
pub mod sparse;
pub mod tdlg;
pub mod tsbm;

pub use error::{Error, Result};
pub use graph::{TemporalEdge, TemporalGraph};
pub use sparse::CsrMatrix;
pub use tdlg::{build_cross_tdlg, build_tdlg, Normalization, Sigma, TdlgConfig};
