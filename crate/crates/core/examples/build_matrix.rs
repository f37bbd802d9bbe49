// Load a small temporal edge list, build its time-decayed line graph,
// normalize it and write it out in both matrix formats.

use tdlg::graph::{parse_edge_list, EdgeListFormat};
use tdlg::sparse::CsrMatrix;
use tdlg::tdlg::{build_tdlg, normalize, Normalization, Sigma, TdlgConfig};

const EDGES: &str = "\
# source,target,time
alice,bob,0
bob,carol,1
carol,alice,1.5
alice,bob,4
dave,carol,9
";

pub fn run_example() -> tdlg::Result<()> {
    let (g, stats) = parse_edge_list(EDGES, &EdgeListFormat::default())?;
    println!("{} nodes, {} edges ({} data rows)", g.n(), g.m(), stats.data_rows);

    // sigma_t relative to the spread of the edge times
    let cfg = TdlgConfig::with_sigma(Sigma::Ratio(0.5));
    println!("sigma_t = {:.4}", cfg.sigma.resolve(&g.times())?);
    let a = build_tdlg(&g, &g.incidence(), &cfg)?;
    for (i, row) in a.to_dense().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:6.3}")).collect();
        println!("  e{i}: {}", cells.join(" "));
    }

    let edge_norm = normalize(&a, Normalization::Edge)?;
    println!(
        "edge-normalized total = {:.6} (edge count {})",
        edge_norm.total_sum(),
        g.m()
    );

    let dir = std::env::temp_dir().join(format!("tdlg-build-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| tdlg::Error::Format(e.to_string()))?;
    let (coo, bin) = (dir.join("a.coo"), dir.join("a.bin"));
    a.write_coo(&coo)?;
    a.write_binary(&bin)?;
    assert_eq!(CsrMatrix::read_binary(&bin)?, a);
    assert_eq!(CsrMatrix::read_coo(&coo, g.m(), g.m())?.nnz(), a.nnz());
    println!("wrote {} and {}", coo.display(), bin.display());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() -> tdlg::Result<()> {
    run_example()
}
