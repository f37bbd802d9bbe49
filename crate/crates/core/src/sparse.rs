//! Compressed sparse row storage for line-graph adjacency and cross matrices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Magic bytes opening a binary CSR dump.
pub const CSR_MAGIC: &[u8; 8] = b"TDLGCSR1";

/// Row-compressed real matrix. Rows are sorted by column and hold no
/// explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub struct SparseRow<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> SparseRow<'a> {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(j, w)| w * dense[j]).sum()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from raw CSR arrays, checking canonical form.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != rows + 1 || row_ptr[0] != 0 || row_ptr[rows] != col_idx.len() {
            return Err(Error::Format("inconsistent row pointer array".into()));
        }
        if col_idx.len() != values.len() {
            return Err(Error::Format("index/value length mismatch".into()));
        }
        for r in 0..rows {
            let (a, b) = (row_ptr[r], row_ptr[r + 1]);
            if a > b {
                return Err(Error::Format(format!("row pointer decreases at row {r}")));
            }
            let idx = &col_idx[a..b];
            if idx.windows(2).any(|w| w[0] >= w[1]) || idx.last().is_some_and(|&j| j >= cols) {
                return Err(Error::Format(format!("row {r} is unsorted or out of range")));
            }
        }
        if values.iter().any(|&w| w == 0.0 || !w.is_finite()) {
            return Err(Error::Format("explicit zero or non-finite value".into()));
        }
        Ok(CsrMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Stacks already-sorted rows.
    pub(crate) fn from_sorted_rows(cols: usize, rows: Vec<(Vec<usize>, Vec<f64>)>) -> Self {
        let nnz = rows.iter().map(|(i, _)| i.len()).sum();
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        let n_rows = rows.len();
        for (idx, val) in rows {
            col_idx.extend(idx);
            values.extend(val);
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            rows: n_rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sums duplicate coordinates and drops zeros.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|&&(i, j, _)| i >= rows || j >= cols) {
            return Err(Error::Format(format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(triplets.len());
        for (i, j, w) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += w;
            } else {
                col_idx.push(j);
                values.push(w);
                row_of.push(i);
                last = Some((i, j));
            }
        }
        let (mut ci, mut vi) = (Vec::with_capacity(col_idx.len()), Vec::with_capacity(values.len()));
        for ((j, w), r) in col_idx.into_iter().zip(values).zip(row_of) {
            if w != 0.0 {
                ci.push(j);
                vi.push(w);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix::from_parts(rows, cols, row_ptr, ci, vi)
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, r) in dense.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            for (j, &w) in r.iter().enumerate() {
                if w != 0.0 {
                    trip.push((i, j, w));
                }
            }
        }
        CsrMatrix::from_triplets(rows, cols, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> SparseRow<'_> {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        SparseRow {
            indices: &self.col_idx[a..b],
            values: &self.values[a..b],
        }
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row(i);
        match r.indices.binary_search(&j) {
            Ok(k) => r.values[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).iter().map(move |(j, w)| (i, j, w)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).sum()).collect()
    }

    pub fn total_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, w| m.max(w.abs()))
    }

    /// `true` when square and every stored `(i, j, w)` has a partner
    /// `(j, i, w')` with `|w - w'| <= tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && self.triplets().all(|(i, j, w)| {
                let r = self.row(j);
                match r.indices.binary_search(&i) {
                    Ok(k) => (r.values[k] - w).abs() <= tol,
                    Err(_) => false,
                }
            })
    }

    /// `y = A x`, parallel over rows.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows).into_par_iter().map(|i| self.row(i).dot(x)).collect())
    }

    pub(crate) fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut()
            .enumerate()
            .for_each(|(i, yi)| *yi = self.row(i).dot(x));
    }

    /// Replaces each stored value `w` at `(i, j)` with `f(i, j, w)`; entries
    /// mapped to zero are removed.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64 + Sync) -> CsrMatrix {
        let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..self.rows)
            .into_par_iter()
            .map(|i| {
                let r = self.row(i);
                let mut idx = Vec::with_capacity(r.nnz());
                let mut val = Vec::with_capacity(r.nnz());
                for (j, w) in r.iter() {
                    let nw = f(i, j, w);
                    if nw != 0.0 {
                        idx.push(j);
                        val.push(nw);
                    }
                }
                (idx, val)
            })
            .collect();
        CsrMatrix::from_sorted_rows(self.cols, rows)
    }

    /// Rows `idx[0], idx[1], ...` as a new matrix with the same columns.
    pub fn select_rows(&self, idx: &[usize]) -> CsrMatrix {
        let rows = idx
            .iter()
            .map(|&i| {
                let r = self.row(i);
                (r.indices.to_vec(), r.values.to_vec())
            })
            .collect();
        CsrMatrix::from_sorted_rows(self.cols, rows)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (i, j, w) in self.triplets() {
            d[i][j] = w;
        }
        d
    }

    /// Coordinate text: `i j w` per line, 0-based, row-major sorted.
    pub fn write_coo(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_coo_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_coo_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:e}")?;
        }
        Ok(())
    }

    /// Reads coordinate text; the shape must be supplied since trailing
    /// empty rows/columns are not recorded.
    pub fn read_coo(path: impl AsRef<Path>, rows: usize, cols: usize) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut trip = Vec::new();
        for (n, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut it = line.split_whitespace();
            let parse_err = || Error::Parse {
                line: n + 1,
                msg: format!("bad coordinate row {line:?}"),
            };
            let i: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(parse_err)?;
            let j: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(parse_err)?;
            let w: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(parse_err)?;
            trip.push((i, j, w));
        }
        CsrMatrix::from_triplets(rows, cols, trip)
    }

    /// Binary dump, all little-endian:
    /// `magic[8] | rows u64 | cols u64 | nnz u64 | row_ptr (rows+1)*u64 |
    /// col_idx nnz*u64 | values nnz*f64`.
    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_binary_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_binary_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(CSR_MAGIC)?;
        for x in [self.rows, self.cols, self.nnz()] {
            w.write_all(&(x as u64).to_le_bytes())?;
        }
        for &p in &self.row_ptr {
            w.write_all(&(p as u64).to_le_bytes())?;
        }
        for &j in &self.col_idx {
            w.write_all(&(j as u64).to_le_bytes())?;
        }
        for &v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary_from(&mut BufReader::new(f)).map_err(|e| match e {
            Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn read_binary_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        let io = |e: std::io::Error| Error::Format(format!("truncated CSR dump: {e}"));
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != CSR_MAGIC {
            return Err(Error::Format("not a CSR dump (bad magic)".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<u64> {
            r.read_exact(&mut word).map_err(io)?;
            Ok(u64::from_le_bytes(word))
        };
        let rows = next(r)? as usize;
        let cols = next(r)? as usize;
        let nnz = next(r)? as usize;
        let row_ptr = (0..=rows).map(|_| next(r).map(|x| x as usize)).collect::<Result<_>>()?;
        let col_idx = (0..nnz).map(|_| next(r).map(|x| x as usize)).collect::<Result<_>>()?;
        let values = (0..nnz).map(|_| next(r).map(f64::from_bits)).collect::<Result<_>>()?;
        CsrMatrix::from_parts(rows, cols, row_ptr, col_idx, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_dense(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.5], vec![0.0, 0.5, 2.0]]).unwrap()
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(1, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (0, 0, 0.0)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn symmetry_and_sums() {
        let m = sample();
        assert!(m.is_symmetric(0.0));
        assert_eq!(m.row_sums(), vec![3.0, 3.5, 2.5]);
        assert_eq!(m.total_sum(), 9.0);
        let asym = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(!asym.is_symmetric(1e-12));
    }

    #[test]
    fn matvec() {
        let m = sample();
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![3.0, 3.5, 2.5]);
        assert!(m.mul_vec(&[1.0]).is_err());
    }

    #[test]
    fn binary_and_coo_roundtrip() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_binary_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], CSR_MAGIC);
        assert_eq!(u64::from_le_bytes(buf[24..32].try_into().unwrap()), 7);
        assert_eq!(buf.len(), 8 + 24 + 4 * 8 + 7 * 16);
        let back = CsrMatrix::read_binary_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.coo");
        m.write_coo(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("0 0 2e0\n0 1 1e0\n1 0"));
        assert_eq!(CsrMatrix::read_coo(&p, 3, 3).unwrap(), m);
    }

    #[test]
    fn bad_binary_rejected() {
        assert!(CsrMatrix::read_binary_from(&mut &b"NOTMAGIC"[..]).is_err());
        let mut buf = Vec::new();
        sample().write_binary_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(CsrMatrix::read_binary_from(&mut buf.as_slice()).is_err());
    }
}
