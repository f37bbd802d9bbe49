//! Edge embeddings (rows of a line-graph matrix) and their aggregation into
//! node embeddings by averaging over incident edges.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Incidence;
use crate::sparse::{CsrMatrix, SparseRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowRole {
    Edge,
    Node,
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Columns `cols` (in that order) as a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out.data[i * cols.len() + k] = self.get(i, c);
            }
        }
        out
    }
}

/// A borrowed feature row.
#[derive(Debug, Clone, Copy)]
pub enum Row<'a> {
    Sparse(SparseRow<'a>),
    Dense(&'a [f64]),
}

impl Row<'_> {
    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        match self {
            Row::Sparse(r) => r.dot(w),
            Row::Dense(r) => r.iter().zip(w).map(|(a, b)| a * b).sum(),
        }
    }

    /// `out += alpha * row`
    #[inline]
    pub fn axpy(&self, alpha: f64, out: &mut [f64]) {
        match self {
            Row::Sparse(r) => {
                for (j, v) in r.iter() {
                    out[j] += alpha * v;
                }
            }
            Row::Dense(r) => {
                for (o, v) in out.iter_mut().zip(r.iter()) {
                    *o += alpha * v;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

/// Feature vectors, one row per edge or per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    storage: Storage,
    role: RowRole,
}

impl EmbeddingMatrix {
    pub fn sparse(m: CsrMatrix, role: RowRole) -> Self {
        EmbeddingMatrix {
            storage: Storage::Sparse(m),
            role,
        }
    }

    pub fn dense(m: DenseMatrix, role: RowRole) -> Self {
        EmbeddingMatrix {
            storage: Storage::Dense(m),
            role,
        }
    }

    pub fn rows(&self) -> usize {
        match &self.storage {
            Storage::Sparse(m) => m.rows(),
            Storage::Dense(m) => m.rows(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Sparse(m) => m.cols(),
            Storage::Dense(m) => m.cols(),
        }
    }

    pub fn role(&self) -> RowRole {
        self.role
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn into_storage(self) -> Storage {
        self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        match &self.storage {
            Storage::Sparse(m) => Row::Sparse(m.row(i)),
            Storage::Dense(m) => Row::Dense(m.row(i)),
        }
    }

    pub fn row_to_dense(&self, i: usize) -> Vec<f64> {
        match self.row(i) {
            Row::Dense(r) => r.to_vec(),
            Row::Sparse(r) => {
                let mut out = vec![0.0; self.dim()];
                for (j, v) in r.iter() {
                    out[j] = v;
                }
                out
            }
        }
    }

    /// Dense rows as CSV, sparse rows as `row col value` triplets.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        match &self.storage {
            Storage::Sparse(m) => m.write_coo_to(w),
            Storage::Dense(m) => {
                for i in 0..m.rows() {
                    let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:e}")).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
                Ok(())
            }
        }
    }
}

/// Row `i` of the line-graph matrix is the embedding of temporal edge `i`.
/// Takes ownership, so no entries are copied.
pub fn edge_embeddings(a: CsrMatrix) -> EmbeddingMatrix {
    EmbeddingMatrix::sparse(a, RowRole::Edge)
}

/// Node embedding = mean of the embeddings of its incident edges
/// (`X = B̃ Y`). Isolated nodes get zero rows.
pub fn mean_edge_node_embeddings(inc: &Incidence, y: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    if inc.nnz() != 2 * y.rows() {
        return Err(Error::DimensionMismatch {
            expected: inc.nnz() / 2,
            got: y.rows(),
        });
    }
    let n = inc.n();
    match y.storage() {
        Storage::Dense(d) => {
            let mut out = DenseMatrix::zeros(n, d.cols());
            out.data
                .par_chunks_mut(d.cols().max(1))
                .enumerate()
                .for_each(|(v, row)| {
                    let edges = inc.incident(v);
                    if edges.is_empty() {
                        return;
                    }
                    for &e in edges {
                        for (o, x) in row.iter_mut().zip(d.row(e)) {
                            *o += x;
                        }
                    }
                    let inv = 1.0 / edges.len() as f64;
                    row.iter_mut().for_each(|o| *o *= inv);
                });
            Ok(EmbeddingMatrix::dense(out, RowRole::Node))
        }
        Storage::Sparse(s) => {
            let rows = (0..n)
                .into_par_iter()
                .map(|v| {
                    let edges = inc.incident(v);
                    let mut acc: Vec<(usize, f64)> = edges.iter().flat_map(|&e| s.row(e).iter()).collect();
                    acc.sort_by_key(|&(j, _)| j);
                    let inv = 1.0 / edges.len().max(1) as f64;
                    let mut idx: Vec<usize> = Vec::with_capacity(acc.len());
                    let mut val: Vec<f64> = Vec::with_capacity(acc.len());
                    for (j, w) in acc {
                        if idx.last() == Some(&j) {
                            *val.last_mut().unwrap() += w;
                        } else {
                            idx.push(j);
                            val.push(w);
                        }
                    }
                    let (idx, val) = idx
                        .into_iter()
                        .zip(val)
                        .filter(|&(_, w)| w != 0.0)
                        .map(|(j, w)| (j, w * inv))
                        .unzip();
                    (idx, val)
                })
                .collect();
            Ok(EmbeddingMatrix::sparse(
                CsrMatrix::from_sorted_rows(s.cols(), rows),
                RowRole::Node,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TemporalGraph;
    use crate::tdlg::{build_tdlg, Sigma, TdlgConfig};

    fn path3() -> TemporalGraph {
        TemporalGraph::from_triples(4, &[(0, 1, 0.0), (1, 2, 0.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn edge_rows_are_matrix_rows() {
        let g = path3();
        let a = build_tdlg(&g, &g.incidence(), &TdlgConfig::with_sigma(Sigma::Absolute(1.0))).unwrap();
        let y = edge_embeddings(a.clone());
        assert_eq!(y.role(), RowRole::Edge);
        let r = y.row_to_dense(1);
        assert_eq!(r[0], 1.0);
        assert_eq!(r[1], 2.0);
        assert!((r[2] - 0.60653).abs() < 1e-5);
        let Storage::Sparse(back) = y.into_storage() else {
            panic!()
        };
        assert_eq!(back, a);
    }

    #[test]
    fn node_means() {
        // node 0: only edge 0; node 1: edges 0 and 1
        let g = TemporalGraph::from_triples(4, &[(0, 1, 0.0), (1, 2, 0.0)]).unwrap();
        let y = EmbeddingMatrix::dense(
            DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            RowRole::Edge,
        );
        let x = mean_edge_node_embeddings(&g.incidence(), &y).unwrap();
        assert_eq!(x.role(), RowRole::Node);
        assert_eq!(x.row_to_dense(0), vec![1.0, 0.0]);
        assert_eq!(x.row_to_dense(1), vec![0.5, 0.5]);
        assert_eq!(x.row_to_dense(2), vec![0.0, 1.0]);
        // node 3 is isolated
        assert_eq!(x.row_to_dense(3), vec![0.0, 0.0]);
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let g =
            TemporalGraph::from_triples(5, &[(0, 1, 0.0), (1, 2, 1.0), (2, 0, 0.5), (3, 4, 2.0), (1, 3, 1.5)]).unwrap();
        let a = build_tdlg(&g, &g.incidence(), &TdlgConfig::default()).unwrap();
        let sparse = mean_edge_node_embeddings(&g.incidence(), &edge_embeddings(a.clone())).unwrap();
        let dense_y = EmbeddingMatrix::dense(DenseMatrix::from_rows(&a.to_dense()).unwrap(), RowRole::Edge);
        let dense = mean_edge_node_embeddings(&g.incidence(), &dense_y).unwrap();
        assert!(sparse.is_sparse() && !dense.is_sparse());
        for v in 0..g.n() {
            let (s, d) = (sparse.row_to_dense(v), dense.row_to_dense(v));
            for (p, q) in s.iter().zip(&d) {
                assert!((p - q).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn size_mismatch() {
        let g = path3();
        let y = EmbeddingMatrix::dense(DenseMatrix::zeros(2, 1), RowRole::Edge);
        assert!(mean_edge_node_embeddings(&g.incidence(), &y).is_err());
    }

    #[test]
    fn export_formats() {
        let y = EmbeddingMatrix::dense(DenseMatrix::from_rows(&[vec![1.0, 0.5]]).unwrap(), RowRole::Edge);
        let mut buf = Vec::new();
        y.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1e0,5e-1\n");
    }
}
