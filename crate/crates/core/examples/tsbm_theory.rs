// Sample temporal SBM graphs and compare line-graph block means with the
// closed-form expected values.

use tdlg::tsbm::{generate_tsbm, theory, verify_theory, BlockTag, TsbmParams};

pub fn run_example() -> tdlg::Result<()> {
    let params = TsbmParams {
        n: 400,
        delta: 20,
        sigma1: 0.0,
        sigma2: 0.0,
        ..TsbmParams::demo(3)
    };
    let sample = generate_tsbm(&params)?;
    println!("sampled {} edges over {} nodes", sample.graph.m(), sample.graph.n());

    let sigma_t = 0.5;
    let th = theory(&params, sigma_t);
    println!("gamma = {:.3e}", th.gamma);

    let report = verify_theory(&params, sigma_t, 3)?;
    println!(
        "{:>5} {:>5} {:>12} {:>12} {:>8}",
        "row", "col", "expected", "sampled", "dev"
    );
    for a in [BlockTag::UU1, BlockTag::UV1, BlockTag::UU2] {
        for b in BlockTag::ALL {
            let c = report.adjacency_cell(a, b);
            let emp = c.empirical.map_or("n/a".to_string(), |e| format!("{e:.4e}"));
            let dev = c.deviation.map_or("n/a".to_string(), |d| format!("{d:.3}"));
            println!("{:>5} {:>5} {:>12.4e} {:>12} {:>8}", c.row, c.col, c.analytic, emp, dev);
        }
    }
    println!("node-embedding cells:");
    for c in &report.node_embedding {
        println!(
            "  {} {:>4}: expected {:.4e}, sampled {:.4e}",
            c.row,
            c.col,
            c.analytic,
            c.empirical.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tdlg::Result<()> {
    run_example()
}
