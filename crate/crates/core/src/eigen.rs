//! Largest-magnitude eigenpairs of sparse symmetric matrices.
//!
//! Lanczos iteration with full (twice-applied classical Gram-Schmidt)
//! reorthogonalization. Ritz values come from an implicit-shift QL sweep on
//! the tridiagonal projection. On breakdown the iteration restarts from a
//! fresh random vector orthogonal to the current basis, so repeated
//! eigenvalues are still recovered with their full multiplicity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::embeddings::{DenseMatrix, EmbeddingMatrix, RowRole};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Relative residual tolerance: `‖Av − λv‖ <= tol * ‖A‖`.
    pub tol: f64,
    /// Largest Krylov basis before giving up; defaults to
    /// `min(m, max(6k, k + 200))`.
    pub max_basis: Option<usize>,
    pub seed: u64,
    /// Scale each eigenvector by its eigenvalue in [`dense_embed`].
    pub scale_by_eigenvalue: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-6,
            max_basis: None,
            seed: 0x7d1_6e16,
            scale_by_eigenvalue: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    /// Sorted by decreasing magnitude.
    pub values: Vec<f64>,
    /// Unit vectors; the largest-magnitude entry of each is positive.
    pub vectors: Vec<Vec<f64>>,
    /// True residual norms `‖A v − λ v‖`.
    pub residuals: Vec<f64>,
    /// Estimate of `‖A‖` used to scale the tolerance.
    pub norm_estimate: f64,
    pub iterations: usize,
}

/// `k` eigenpairs of the symmetric matrix `a` with largest `|λ|`.
///
/// A single Krylov sequence cannot see a second copy of a repeated
/// eigenvalue, so after convergence the found vectors are locked and a short
/// run on their orthogonal complement checks that nothing larger in
/// magnitude was missed. Anything it finds is merged in and the check is
/// repeated.
pub fn top_eigenpairs(a: &CsrMatrix, k: usize, opts: &EigenOptions) -> Result<Eigenpairs> {
    let m = a.rows();
    if a.cols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: a.cols(),
        });
    }
    if k > m {
        return Err(Error::Config(format!("requested {k} eigenpairs of a {m}x{m} matrix")));
    }
    if k == 0 {
        return Ok(Eigenpairs {
            values: vec![],
            vectors: vec![],
            residuals: vec![],
            norm_estimate: 0.0,
            iterations: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let first = lanczos(a, k, &[], opts, &mut rng)?;
    let mut iterations = first.iterations;
    let mut norm_est = first.norm_estimate;
    let mut found = first.pairs;

    while found.len() < m {
        let kth = found.last().map_or(0.0, |p| p.0.abs());
        let locked: Vec<Vec<f64>> = found.iter().map(|p| p.1.clone()).collect();
        // an unconverged probe cannot refute the current set
        let Ok(probe) = lanczos(a, 1, &locked, opts, &mut rng) else {
            break;
        };
        iterations += probe.iterations;
        norm_est = norm_est.max(probe.norm_estimate);
        let slack = opts.tol * norm_est;
        if probe.pairs[0].0.abs() <= kth + slack {
            break;
        }
        let want = k.min(m - found.len());
        let more = lanczos(a, want, &locked, opts, &mut rng)?;
        iterations += more.iterations;
        found.extend(more.pairs);
        let theta: Vec<f64> = found.iter().map(|p| p.0).collect();
        let order = magnitude_order(&theta);
        let mut slots: Vec<Option<(f64, Vec<f64>)>> = found.into_iter().map(Some).collect();
        found = order[..k].iter().map(|&i| slots[i].take().expect("distinct")).collect();
    }

    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (lambda, mut v) in found {
        fix_sign(&mut v);
        let av = a.mul_vec(&v)?;
        let res = av
            .iter()
            .zip(&v)
            .map(|(p, q)| (p - lambda * q).powi(2))
            .sum::<f64>()
            .sqrt();
        values.push(lambda);
        vectors.push(v);
        residuals.push(res);
    }
    Ok(Eigenpairs {
        values,
        vectors,
        residuals,
        norm_estimate: norm_est,
        iterations,
    })
}

struct Run {
    /// `(θ, unit Ritz vector)` sorted by decreasing `|θ|`.
    pairs: Vec<(f64, Vec<f64>)>,
    norm_estimate: f64,
    iterations: usize,
}

/// Lanczos with full reorthogonalization on the orthogonal complement of
/// `locked` (orthonormal columns).
fn lanczos(a: &CsrMatrix, k: usize, locked: &[Vec<f64>], opts: &EigenOptions, rng: &mut ChaCha8Rng) -> Result<Run> {
    let m = a.rows();
    let dim = m - locked.len();
    if k > dim {
        return Err(Error::Config(format!(
            "requested {k} eigenpairs of a {dim}-dimensional subspace"
        )));
    }
    let max_basis = opts.max_basis.unwrap_or_else(|| (6 * k).max(k + 200)).clamp(k, dim);

    let off = locked.len();
    // locked vectors lead the basis so every orthogonalization also removes them
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(off + max_basis);
    basis.extend(locked.iter().cloned());
    let mut alpha: Vec<f64> = Vec::with_capacity(max_basis);
    let mut beta: Vec<f64> = Vec::with_capacity(max_basis);

    let start = random_orthogonal(m, &basis, rng).ok_or_else(|| Error::Config("cannot draw a start vector".into()))?;
    basis.push(start);

    // Gershgorin-style bound; refined by Ritz values below
    let mut norm_est = (0..m)
        .map(|i| a.row(i).values.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut w = vec![0.0; m];
    let mut next_check = k;
    let mut worst = f64::INFINITY;

    loop {
        let j = basis.len() - 1 - off;
        a.mul_vec_into(&basis[off + j], &mut w);
        let aj = dot(&w, &basis[off + j]);
        axpy(-aj, &basis[off + j], &mut w);
        if j > 0 && beta[j - 1] != 0.0 {
            axpy(-beta[j - 1], &basis[off + j - 1], &mut w);
        }
        reorthogonalize(&mut w, &basis);
        reorthogonalize(&mut w, &basis);
        let bj = norm(&w);
        alpha.push(aj);
        let size = j + 1;
        let breakdown = bj <= 1e-10 * norm_est.max(f64::MIN_POSITIVE);

        if size >= k && (size >= next_check || size == max_basis || breakdown) {
            next_check = size + (size / 5).max(10);
            let (theta, s) = tridiagonal_eigen(&alpha, &beta[..size - 1])?;
            let order = magnitude_order(&theta);
            let top = &order[..k];
            let scale = theta
                .iter()
                .fold(0.0f64, |mx, t| mx.max(t.abs()))
                .max(f64::MIN_POSITIVE);
            let tol = opts.tol * scale;
            let abs_worst = top
                .iter()
                .map(|&c| bj * s[c * size + size - 1].abs())
                .fold(0.0, f64::max);
            worst = abs_worst / scale;
            if abs_worst <= tol || size == dim {
                return Ok(Run {
                    pairs: ritz_vectors(&basis[off..], &theta, &s, top, size),
                    norm_estimate: scale,
                    iterations: size,
                });
            }
            norm_est = scale;
        }
        if size == max_basis {
            return Err(Error::NoConvergence {
                iterations: size,
                residual: worst,
                tolerance: opts.tol,
            });
        }
        if breakdown {
            match random_orthogonal(m, &basis, rng) {
                Some(v) => {
                    beta.push(0.0);
                    basis.push(v);
                }
                None => {
                    // basis already spans the subspace; size == dim was handled above
                    return Err(Error::NoConvergence {
                        iterations: size,
                        residual: worst,
                        tolerance: opts.tol,
                    });
                }
            }
        } else {
            beta.push(bj);
            let inv = 1.0 / bj;
            basis.push(w.iter().map(|x| x * inv).collect());
        }
    }
}

fn ritz_vectors(basis: &[Vec<f64>], theta: &[f64], s: &[f64], top: &[usize], size: usize) -> Vec<(f64, Vec<f64>)> {
    let m = basis[0].len();
    top.iter()
        .map(|&c| {
            let coef = &s[c * size..(c + 1) * size];
            let mut v: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|r| basis.iter().zip(coef).map(|(q, &x)| q[r] * x).sum())
                .collect();
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            (theta[c], v)
        })
        .collect()
}

/// Spectral embedding: column `c` is the eigenvector of the `c`-th largest
/// `|λ|`, multiplied by `λ` unless `opts.scale_by_eigenvalue` is off.
pub fn dense_embed(a: &CsrMatrix, k: usize, opts: &EigenOptions) -> Result<EmbeddingMatrix> {
    let pairs = top_eigenpairs(a, k, opts)?;
    let m = a.rows();
    let mut out = DenseMatrix::zeros(m, k);
    for (c, (v, &lambda)) in pairs.vectors.iter().zip(&pairs.values).enumerate() {
        let f = if opts.scale_by_eigenvalue { lambda } else { 1.0 };
        for (r, x) in v.iter().enumerate() {
            out.row_mut(r)[c] = f * x;
        }
    }
    Ok(EmbeddingMatrix::dense(out, RowRole::Edge))
}

/// Indices sorted by decreasing `|θ|`, ties by decreasing `θ`.
fn magnitude_order(theta: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&p, &q| {
        theta[q]
            .abs()
            .total_cmp(&theta[p].abs())
            .then(theta[q].total_cmp(&theta[p]))
    });
    order
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn random_orthogonal(m: usize, basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..4 {
        let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        let n0 = norm(&v);
        reorthogonalize(&mut v, basis);
        reorthogonalize(&mut v, basis);
        let n = norm(&v);
        if n > 1e-8 * n0 {
            v.iter_mut().for_each(|x| *x /= n);
            return Some(v);
        }
    }
    None
}

/// Chunked so the summation order is independent of the thread count.
fn dot(x: &[f64], y: &[f64]) -> f64 {
    let partial: Vec<f64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(b, a)| b.iter_mut().zip(a).for_each(|(q, p)| *q += alpha * p));
}

/// One classical Gram-Schmidt pass: `w -= Q (Qᵀ w)`.
fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    if basis.is_empty() {
        return;
    }
    let h: Vec<f64> = basis.iter().map(|q| dot(q, w)).collect();
    w.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let off = c * CHUNK;
        for (q, &hq) in basis.iter().zip(&h) {
            let qc = &q[off..off + chunk.len()];
            for (x, y) in chunk.iter_mut().zip(qc) {
                *x -= hq * y;
            }
        }
    });
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`. Returns eigenvalues and the eigenvectors
/// stored column-major (`vecs[c * n + r]`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut mm = l;
        while mm < n - 1 && e[mm].abs() > eps * tst1 {
            mm += 1;
        }
        if mm > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence {
                        iterations: iter,
                        residual: e[l].abs(),
                        tolerance: eps * tst1,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[mm];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..mm).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (left, right) = z.split_at_mut((i + 1) * n);
                    let zi = &mut left[i * n..];
                    let zi1 = &mut right[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hh = *b;
                        *b = s * *a + c * hh;
                        *a = c * *a - s * hh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok((d, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_small() {
        // [[2,1],[1,2]] -> 1, 3
        let (vals, vecs) = tridiagonal_eigen(&[2.0, 2.0], &[1.0]).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0).abs() < 1e-14 && (sorted[1] - 3.0).abs() < 1e-14);
        for c in 0..2 {
            let v = &vecs[c * 2..c * 2 + 2];
            let av = [2.0 * v[0] + v[1], v[0] + 2.0 * v[1]];
            assert!((av[0] - vals[c] * v[0]).abs() < 1e-14);
            assert!((av[1] - vals[c] * v[1]).abs() < 1e-14);
        }
        let (vals, _) = tridiagonal_eigen(&[5.0], &[]).unwrap();
        assert_eq!(vals, vec![5.0]);
    }

    #[test]
    fn repeated_eigenvalue_via_restart() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 2.0]]).unwrap();
        let pairs = top_eigenpairs(&a, 3, &EigenOptions::default()).unwrap();
        for (v, &l) in pairs.vectors.iter().zip(&pairs.values) {
            assert!((l - 2.0).abs() < 1e-12);
            let av = a.mul_vec(v).unwrap();
            for (p, q) in av.iter().zip(v) {
                assert!((p - 2.0 * q).abs() < 1e-12);
            }
        }
        // pairwise orthogonal
        for i in 0..3 {
            for j in 0..i {
                assert!(dot(&pairs.vectors[i], &pairs.vectors[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn negative_eigenvalue_ranked_by_magnitude() {
        let a = CsrMatrix::from_dense(&[vec![-5.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let pairs = top_eigenpairs(&a, 1, &EigenOptions::default()).unwrap();
        assert!((pairs.values[0] + 5.0).abs() < 1e-12);
        // sign convention: largest entry positive
        assert!(pairs.vectors[0][0] > 0.0);
    }

    #[test]
    fn too_many_requested() {
        let a = CsrMatrix::from_dense(&[vec![1.0]]).unwrap();
        assert!(top_eigenpairs(&a, 2, &EigenOptions::default()).is_err());
        assert!(top_eigenpairs(&a, 0, &EigenOptions::default())
            .unwrap()
            .values
            .is_empty());
    }

    #[test]
    fn tiny_basis_cap_reports_residual() {
        // path-graph adjacency; 3 vectors cannot resolve the top eigenvalue
        let n = 60;
        let mut trip = vec![];
        for i in 0..n - 1 {
            trip.push((i, i + 1, 1.0));
            trip.push((i + 1, i, 1.0));
        }
        let a = CsrMatrix::from_triplets(n, n, trip).unwrap();
        let opts = EigenOptions {
            max_basis: Some(3),
            ..Default::default()
        };
        match top_eigenpairs(&a, 1, &opts) {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual > 1e-6),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn dense_embed_scales_columns() {
        let a = CsrMatrix::from_dense(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let y = dense_embed(&a, 2, &EigenOptions::default()).unwrap();
        assert!((y.row_to_dense(0)[0] - 3.0).abs() < 1e-12);
        assert!((y.row_to_dense(1)[1] - 1.0).abs() < 1e-12);
        let raw = dense_embed(
            &a,
            1,
            &EigenOptions {
                scale_by_eigenvalue: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((raw.row_to_dense(0)[0] - 1.0).abs() < 1e-12);
    }
}
