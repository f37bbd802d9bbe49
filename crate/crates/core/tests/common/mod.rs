#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdlg::graph::{TemporalEdge, TemporalGraph};
use tdlg::learn::{objective, LabeledFeatures};

/// Dense line-graph adjacency straight from the definition: every ordered
/// pair of edges, shared-endpoint count times Gaussian decay.
pub fn dense_tdlg(g: &TemporalGraph, sigma: f64) -> Vec<Vec<f64>> {
    dense_cross(g, g, sigma)
}

pub fn dense_cross(test: &TemporalGraph, train: &TemporalGraph, sigma: f64) -> Vec<Vec<f64>> {
    test.edges()
        .iter()
        .map(|a| {
            train
                .edges()
                .iter()
                .map(|b| {
                    let shared = [a.u, a.v]
                        .iter()
                        .map(|x| [b.u, b.v].iter().filter(|y| *y == x).count())
                        .sum::<usize>() as f64;
                    let dt = a.t - b.t;
                    shared * (-(dt * dt) / (2.0 * sigma * sigma)).exp()
                })
                .collect()
        })
        .collect()
}

/// Fraction of (positive, negative) pairs ranked correctly, ties ½.
pub fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            den += 1.0;
            num += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    num / den
}

/// Population standard deviation, two-pass.
pub fn pop_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Random graph with `n` nodes and `m` edges; times on a coarse grid so
/// equal timestamps occur.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> TemporalGraph {
    let edges = (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            let v = (u + rng.random_range(1..n)) % n;
            let t = rng.random_range(0..40) as f64 * 0.25;
            TemporalEdge::new(u, v, t)
        })
        .collect();
    TemporalGraph::new(n, edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest relative gap between the analytic gradient and central finite
/// differences, over all coordinates.
pub fn gradient_fd_error(data: &LabeledFeatures<'_>, w: &[f64], l2: f64, params: &[f64]) -> f64 {
    let (_, g) = objective(data, w, l2, params);
    let mut worst: f64 = 0.0;
    for k in 0..params.len() {
        let h = 1e-5 * params[k].abs().max(1.0);
        let mut p = params.to_vec();
        p[k] += h;
        let (fp, _) = objective(data, w, l2, &p);
        p[k] -= 2.0 * h;
        let (fm, _) = objective(data, w, l2, &p);
        let fd = (fp - fm) / (2.0 * h);
        let err = (fd - g[k]).abs() / g[k].abs().max(fd.abs()).max(1.0);
        worst = worst.max(err);
    }
    worst
}
