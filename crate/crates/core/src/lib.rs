//! Fuzzy clustering with principal-axis prototypes and similarity-driven
//! merging of an overspecified initial partition.
//!
//! [`gfc_sd`] is the main entry point; [`fcm_xie_sweep`] is the classical
//! fuzzy c-means plus Xie-Beni sweep used for comparison.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod io;
pub mod linalg;
pub mod merging;
pub mod pipeline;
pub mod rank;
pub mod report;
pub mod validity;

pub use engine::{gfc_fit, ClusterAxes, EngineConfig, FitResult, MembershipMatrix};
pub use error::{Error, Result};
pub use io::{
    gen_gaussian_mixture, load_csv, variance_normalize, LabeledDataset, MixtureGroup, MixtureSpec,
};
pub use linalg::{pnorm_dist, sym_eig, DataMatrix, EigenDecomposition, SymmetricMatrix};
pub use merging::{ClusterModel, DispersionNorm, MergeEvent, MergePolicy, SimilarityMatrix};
pub use pipeline::{
    fcm_xie_sweep, gfc_sd, gfc_sd_from, GfcSdConfig, GfcSdResult, MergeTrace, SweepResult,
};
pub use rank::{mdl_score, select_rank, Spectrum};
pub use report::{read_report, write_report, FitReport, SweepReport};
pub use validity::{align_and_score, xie_beni, ConfusionMatrix};
