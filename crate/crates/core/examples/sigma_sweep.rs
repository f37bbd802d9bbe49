// Sensitivity to the time-decay scale and to matrix normalization.

use tdlg::pipelines::{normalization_ablation, sweep_sigma, Render, ReportFormat, SplitSpec, Task, Variant};
use tdlg::tdlg::{Normalization, TdlgConfig};
use tdlg::tsbm::{generate_tsbm, TsbmParams};

pub fn run_example() -> tdlg::Result<()> {
    let params = TsbmParams {
        n: 120,
        delta: 10,
        sigma1: 0.5,
        sigma2: 0.5,
        ..TsbmParams::demo(5)
    };
    let g = generate_tsbm(&params)?.labeled_by_community();
    let split = SplitSpec {
        trials: 2,
        ..SplitSpec::classification()
    };
    let task = Task::EdgeClassification {
        variant: Variant::Sparse,
    };

    let sweep = sweep_sigma(&g, &[1e-3, 1e-2, 1e-1, 1.0, 10.0], task, &TdlgConfig::default(), &split)?;
    print!("{}", sweep.render(ReportFormat::Table));

    let ablation = normalization_ablation(
        &g,
        &[Normalization::Spectral, Normalization::Edge],
        task,
        &TdlgConfig::default(),
        &split,
    )?;
    print!("{}", ablation.render(ReportFormat::Csv));
    Ok(())
}

#[allow(dead_code)]
fn main() -> tdlg::Result<()> {
    run_example()
}
