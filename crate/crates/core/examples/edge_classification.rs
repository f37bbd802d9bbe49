// Temporal edge classification: line-graph rows as sparse features,
// balanced logistic regression, repeated random 70/30 splits.

use tdlg::pipelines::{run_edge_classification, Render, ReportFormat, SplitSpec, Variant};
use tdlg::tdlg::TdlgConfig;
use tdlg::tsbm::{generate_tsbm, TsbmParams};

pub fn run_example() -> tdlg::Result<()> {
    // label: does the edge stay inside a community?
    let params = TsbmParams {
        n: 200,
        delta: 10,
        sigma1: 0.5,
        sigma2: 0.5,
        ..TsbmParams::demo(7)
    };
    let g = generate_tsbm(&params)?.labeled_by_community();

    let split = SplitSpec {
        trials: 3,
        ..SplitSpec::classification()
    };
    let sparse = run_edge_classification(&g, &TdlgConfig::default(), &split, Variant::Sparse)?;
    print!("{}", sparse.render(ReportFormat::Table));

    let dense = run_edge_classification(&g, &TdlgConfig::default(), &split, Variant::Dense { k: 16 })?;
    print!("{}", dense.render(ReportFormat::Table));
    Ok(())
}

#[allow(dead_code)]
fn main() -> tdlg::Result<()> {
    run_example()
}
