//! Downstream learners: class-weighted L2 logistic regression and ROC AUC.

mod auc;
mod logreg;

pub use auc::auc;
pub use logreg::{
    class_weights, objective, train_logreg, ClassWeight, FitReport, LabeledFeatures, LogRegConfig, LogRegModel,
};
