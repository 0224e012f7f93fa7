//! End-to-end fitting pipelines.
//!
//! `fit_urlr` is the full method: project the weighted design onto the
//! complement of its column space, order edges along the LASSO
//! regularization path, prune the top slice, refit the ranking coefficients
//! on the survivors. The baselines share the same scaffolding:
//!
//! * `raw` - no outlier handling at all;
//! * `majority_vote` - per-pair filtering before an ordinary fit;
//! * `huber_lasso_fl` - detection from the graph topology alone
//!   (featureless design `sqrt(W) C`), then the same pruned refit with
//!   features. Its detection space has dimension `|E| - |V| + c`, against
//!   `|E| - rank(X)` for the feature-based detector; the gap is what makes
//!   feature-based detection effective on sparse graphs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;
use crate::lasso::{lasso_path_projected, OutlierPath, PathSpec};
use crate::solver::{DesignSystem, FeatureMatrix, RankModel, DEFAULT_MU};

/// Which pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Urlr,
    Raw,
    MajorityVote,
    HuberLassoFl,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Urlr,
        Method::Raw,
        Method::MajorityVote,
        Method::HuberLassoFl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Urlr => "urlr",
            Method::Raw => "raw",
            Method::MajorityVote => "majority_vote",
            Method::HuberLassoFl => "huber_lasso_fl",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "urlr" => Ok(Method::Urlr),
            "raw" => Ok(Method::Raw),
            "majority_vote" => Ok(Method::MajorityVote),
            "huber_lasso_fl" => Ok(Method::HuberLassoFl),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected urlr, raw, majority_vote or huber_lasso_fl)"
            ))),
        }
    }
}

/// Knobs shared by every pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub method: Method,
    /// Percentage of edges pruned from the top of the outlier order.
    pub prune_percent: f64,
    /// Ridge stabilizer for the coefficient solves.
    pub mu: f64,
    /// Optional feature reduction applied to the detection design only;
    /// the final refit always uses the original features.
    pub pca_dim: Option<usize>,
    pub path: PathSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Urlr,
            prune_percent: 20.0,
            mu: DEFAULT_MU,
            pca_dim: None,
            path: PathSpec::default(),
        }
    }
}

impl PipelineConfig {
    fn validate(&self, feature_dim: usize) -> Result<()> {
        if !(0.0..100.0).contains(&self.prune_percent) {
            return Err(Error::InvalidPruneRate(self.prune_percent));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if let Some(k) = self.pca_dim {
            if k == 0 || k > feature_dim {
                return Err(Error::InvalidConfig(format!(
                    "pca_dim {k} outside [1, {feature_dim}]"
                )));
            }
        }
        self.path.validate()
    }
}

/// Featureless per-node ranking scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalScores {
    pub theta: Vec<f64>,
}

impl GlobalScores {
    pub fn new(theta: Vec<f64>) -> Self {
        Self { theta }
    }

    /// Shift to mean zero within each connected component; scores are only
    /// identified up to a per-component constant.
    pub fn canonicalize(mut self, graph: &ComparisonGraph) -> Self {
        for component in graph.connected_components() {
            let mean: f64 =
                component.iter().map(|&i| self.theta[i]).sum::<f64>() / component.len() as f64;
            for &i in &component {
                self.theta[i] -= mean;
            }
        }
        self
    }
}

/// Detection-space bookkeeping for one fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_components: usize,
    /// Numerical rank of the feature design used for detection.
    pub design_rank: usize,
    /// `|E| - rank(X)`: residual dimensions available to feature-based detection.
    pub dim_gamma_urlr: usize,
    /// `|E| - |V| + c`: residual dimensions available to featureless detection.
    pub dim_gamma_featureless: usize,
}

/// Everything a pipeline produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted ranking model (always present for the shipped methods).
    pub model: Option<RankModel>,
    /// Outlier ordering; empty for methods that skip path-based detection.
    pub outlier_order: OutlierPath,
    /// Per canonical edge: `true` if the edge survived pruning.
    pub inlier_mask: Vec<bool>,
    pub diagnostics: Diagnostics,
}

impl FitResult {
    pub fn n_pruned(&self) -> usize {
        self.inlier_mask.iter().filter(|&&keep| !keep).count()
    }

    /// Indices of pruned edges in canonical order.
    pub fn pruned_edges(&self) -> Vec<usize> {
        self.inlier_mask
            .iter()
            .enumerate()
            .filter_map(|(k, &keep)| (!keep).then_some(k))
            .collect()
    }
}

fn detection_features(phi: &FeatureMatrix, cfg: &PipelineConfig) -> Result<FeatureMatrix> {
    match cfg.pca_dim {
        Some(k) if k < phi.n_cols() => phi.pca_reduce(k),
        _ => Ok(phi.clone()),
    }
}

fn diagnostics(graph: &ComparisonGraph, design_rank: usize) -> Diagnostics {
    let n_components = graph.connected_components().len();
    let n_edges = graph.n_edges();
    Diagnostics {
        n_nodes: graph.n_nodes(),
        n_edges,
        n_components,
        design_rank,
        dim_gamma_urlr: n_edges.saturating_sub(design_rank),
        dim_gamma_featureless: (n_edges + n_components).saturating_sub(graph.n_nodes()),
    }
}

/// Dispatch to the pipeline selected by `cfg.method`.
pub fn fit(graph: &ComparisonGraph, phi: &FeatureMatrix, cfg: &PipelineConfig) -> Result<FitResult> {
    match cfg.method {
        Method::Urlr => fit_urlr(graph, phi, cfg),
        Method::Raw => fit_raw(graph, phi, cfg),
        Method::MajorityVote => fit_majority(graph, phi, cfg),
        Method::HuberLassoFl => fit_huber_lasso_fl(graph, phi, cfg),
    }
}

/// Joint outlier detection and ranking: path, prune, refit.
pub fn fit_urlr(
    graph: &ComparisonGraph,
    phi: &FeatureMatrix,
    cfg: &PipelineConfig,
) -> Result<FitResult> {
    cfg.validate(phi.n_cols())?;
    let detect_phi = detection_features(phi, cfg)?;
    let detect = DesignSystem::new(graph, &detect_phi)?.with_mu(cfg.mu)?;
    let projection = detect.hat_projection();
    let path = lasso_path_projected(&projection, &cfg.path)?;
    let keep = path.prune(cfg.prune_percent)?;
    let full = DesignSystem::new(graph, phi)?.with_mu(cfg.mu)?;
    let model = full.fit_beta_pruned(&keep)?;
    Ok(FitResult {
        model: Some(model),
        outlier_order: path,
        inlier_mask: keep,
        diagnostics: diagnostics(graph, projection.rank()),
    })
}

/// No outlier handling: fit on every vote.
pub fn fit_raw(
    graph: &ComparisonGraph,
    phi: &FeatureMatrix,
    cfg: &PipelineConfig,
) -> Result<FitResult> {
    cfg.validate(phi.n_cols())?;
    let detect_phi = detection_features(phi, cfg)?;
    let detect = DesignSystem::new(graph, &detect_phi)?.with_mu(cfg.mu)?;
    let rank = detect.hat_projection().rank();
    let full = DesignSystem::new(graph, phi)?.with_mu(cfg.mu)?;
    let keep = vec![true; graph.n_edges()];
    let model = full.fit_beta_pruned(&keep)?;
    Ok(FitResult {
        model: Some(model),
        outlier_order: OutlierPath::empty(),
        inlier_mask: keep,
        diagnostics: diagnostics(graph, rank),
    })
}

/// Per-pair majority filtering, then an ordinary fit on the survivors.
pub fn fit_majority(
    graph: &ComparisonGraph,
    phi: &FeatureMatrix,
    cfg: &PipelineConfig,
) -> Result<FitResult> {
    cfg.validate(phi.n_cols())?;
    let filtered = graph.majority_vote_filter();
    if filtered.n_edges() == 0 {
        return Err(Error::EmptyMajorityGraph);
    }
    let detect_phi = detection_features(phi, cfg)?;
    let detect = DesignSystem::new(graph, &detect_phi)?.with_mu(cfg.mu)?;
    let rank = detect.hat_projection().rank();
    let full = DesignSystem::new(&filtered, phi)?.with_mu(cfg.mu)?;
    let model = full.fit_beta(&vec![0.0; filtered.n_edges()])?;
    let keep: Vec<bool> = graph
        .edges()
        .iter()
        .map(|e| filtered.edge_index(e.src, e.dst).is_some())
        .collect();
    Ok(FitResult {
        model: Some(model),
        outlier_order: OutlierPath::empty(),
        inlier_mask: keep,
        diagnostics: diagnostics(graph, rank),
    })
}

/// Two-step baseline: detect outliers from the graph topology alone, then
/// refit the feature-based model on the survivors.
pub fn fit_huber_lasso_fl(
    graph: &ComparisonGraph,
    phi: &FeatureMatrix,
    cfg: &PipelineConfig,
) -> Result<FitResult> {
    cfg.validate(phi.n_cols())?;
    let featureless = DesignSystem::featureless(graph).with_mu(cfg.mu)?;
    let projection = featureless.hat_projection();
    let path = lasso_path_projected(&projection, &cfg.path)?;
    let keep = path.prune(cfg.prune_percent)?;
    let full = DesignSystem::new(graph, phi)?.with_mu(cfg.mu)?;
    let model = full.fit_beta_pruned(&keep)?;
    // Report the feature-design rank so both detection-space dimensions are
    // visible side by side.
    let detect_phi = detection_features(phi, cfg)?;
    let rank = DesignSystem::new(graph, &detect_phi)?
        .with_mu(cfg.mu)?
        .hat_projection()
        .rank();
    Ok(FitResult {
        model: Some(model),
        outlier_order: path,
        inlier_mask: keep,
        diagnostics: diagnostics(graph, rank),
    })
}

/// Featureless ridge estimate of per-node scores from the votes alone,
/// centered to mean zero per connected component.
pub fn featureless_scores(graph: &ComparisonGraph, mu: f64) -> Result<GlobalScores> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "mu must be positive, got {mu}"
        )));
    }
    let n = graph.n_nodes();
    let c = graph.incidence_matrix();
    // Solve (C^T W C + mu I) theta = C^T W y.
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (k, e) in graph.edges().iter().enumerate() {
        let w = e.weight as f64;
        let (src, dst) = c.row(k);
        a[(src, src)] += w;
        a[(dst, dst)] += w;
        a[(src, dst)] -= w;
        a[(dst, src)] -= w;
        rhs[src] += w;
        rhs[dst] -= w;
    }
    for i in 0..n {
        a[(i, i)] += mu;
    }
    let theta = a
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .solve(&rhs);
    Ok(GlobalScores::new(theta.iter().copied().collect()).canonicalize(graph))
}
