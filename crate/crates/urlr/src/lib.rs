//! Robust learning to rank from sparse, noisy pairwise comparison labels.
//!
//! Crowdsourced "A is more X than B" votes are aggregated into a directed,
//! vote-weighted comparison graph. A linear scoring function over node
//! features is fitted jointly with per-comparison outlier variables: the
//! outliers live in the orthogonal complement of the design's column space,
//! where a weighted LASSO regularization path orders comparisons by how
//! early they activate. Pruning the top slice of that order and refitting
//! yields a ranking model that tolerates label error rates well beyond what
//! per-pair majority voting can absorb, because inconsistencies are scored
//! globally rather than pair by pair.
//!
//! The `examples/` directory is the guided tour; each example exercises one
//! capability end to end. A thin `urlr` binary exposes the same pipeline as
//! `fit` / `predict` / `eval` / `sweep` / `synth` / `fixtures` subcommands.

pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod lasso;
pub mod pipeline;
pub mod solver;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
pub use eval::{kendall_correlation, kendall_distance, outlier_roc, EvalReport, RocPoint};
pub use graph::{AnnotationRecord, ComparisonGraph, Edge, IncidenceMatrix, NodeId};
pub use lasso::{lasso_path, lasso_path_projected, OutlierPath, PathSpec};
pub use pipeline::{
    fit, fit_huber_lasso_fl, fit_majority, fit_raw, fit_urlr, Diagnostics, FitResult,
    GlobalScores, Method, PipelineConfig,
};
pub use solver::{DesignSystem, FeatureMatrix, Projection, RankModel, DEFAULT_MU};
pub use synth::{
    condorcet_fixture, generate, ErrorModel, FixtureVariant, GraphTopology, SyntheticDataset,
    SyntheticSpec, ThetaSource,
};
