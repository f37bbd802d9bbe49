mod build_matrix {
    include!("../examples/build_matrix.rs");
}
mod tsbm_theory {
    include!("../examples/tsbm_theory.rs");
}
mod community_embedding {
    include!("../examples/community_embedding.rs");
}
mod edge_classification {
    include!("../examples/edge_classification.rs");
}
mod link_prediction {
    include!("../examples/link_prediction.rs");
}
mod sigma_sweep {
    include!("../examples/sigma_sweep.rs");
}

#[test]
fn build_matrix_runs() {
    build_matrix::run_example().unwrap();
}

#[test]
fn tsbm_theory_runs() {
    tsbm_theory::run_example().unwrap();
}

#[test]
fn community_embedding_runs() {
    community_embedding::run_example().unwrap();
}

#[test]
fn edge_classification_runs() {
    edge_classification::run_example().unwrap();
}

#[test]
fn link_prediction_runs() {
    link_prediction::run_example().unwrap();
}

#[test]
fn sigma_sweep_runs() {
    sigma_sweep::run_example().unwrap();
}
