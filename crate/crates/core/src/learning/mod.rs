//! Supervised, semi-supervised and active learning with multiscale operators.

mod active;
mod cg;
mod rates;
mod sampling;
mod ssl;

pub use active::{active_learn, Acquisition, AcquisitionState, ActiveOutcome};
pub use cg::{conjugate_gradient, supervised_solve, supervised_solve_with_stats, CgOutcome, ShiftedOperator};
pub use rates::{median, rates_experiment, RatesConfig, RatesRecord, TargetFunction};
pub use sampling::{one_per_class, sample_labels, LabelSampling};
pub use ssl::{argmax, ssl_classify, ssl_classify_dense, LabeledDataset, SslOutcome};
