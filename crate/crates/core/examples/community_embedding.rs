// Dense eigenvector embeddings of a two-community temporal graph. Edge
// embeddings are averaged into node embeddings, and a linear classifier
// separates the communities from eigenvectors two and three.

use tdlg::eigen::{dense_embed, EigenOptions};
use tdlg::embeddings::{mean_edge_node_embeddings, EmbeddingMatrix, Storage};
use tdlg::learn::{train_logreg, LabeledFeatures, LogRegConfig};
use tdlg::tdlg::{build_tdlg_with_sigma, TdlgConfig};
use tdlg::tsbm::{generate_tsbm, TsbmParams};

pub fn run_example() -> tdlg::Result<()> {
    // communities mostly talk internally early on and across later
    let params = TsbmParams::demo(1);
    let sample = generate_tsbm(&params)?;
    let g = &sample.graph;
    let inc = g.incidence();

    for sigma_t in [0.5, 1e6] {
        let a = build_tdlg_with_sigma(g, &inc, sigma_t, &TdlgConfig::default())?;
        let y = dense_embed(&a, 3, &EigenOptions::default())?;
        let x = mean_edge_node_embeddings(&inc, &y)?;
        let Storage::Dense(d) = x.storage() else { unreachable!() };
        let features = EmbeddingMatrix::dense(d.select_columns(&[1, 2]), x.role());

        let labels: Vec<bool> = (0..g.n()).map(|v| params.in_u(v)).collect();
        let model = train_logreg(
            &LabeledFeatures::all(&features, labels.clone())?,
            &LogRegConfig::default(),
        )?;
        let scores = model.predict_scores(&features)?;
        let acc = scores.iter().zip(&labels).filter(|(s, &l)| (**s > 0.5) == l).count() as f64 / labels.len() as f64;
        println!("sigma_t = {sigma_t:e}: training accuracy {acc:.2}");
        for v in [0, 1, g.n() - 2, g.n() - 1] {
            let r = features.row_to_dense(v);
            println!(
                "  node {v:>3} ({}) -> [{:+.4}, {:+.4}]",
                if labels[v] { "U" } else { "V" },
                r[0],
                r[1]
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tdlg::Result<()> {
    run_example()
}
