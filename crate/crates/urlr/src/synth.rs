//! Synthetic ground truth, features and corrupted pairwise labels.
//!
//! Each node carries a latent score; every sampled pair is voted toward the
//! larger score unless the vote is corrupted. Corruption comes in three
//! flavours:
//!
//! * `RandomFlip` - a vote is corrupted with fixed probability. With
//!   `outlier_magnitude: None` the corrupted vote is reversed outright; with
//!   `Some(L)` the reversal acts through a latent shift of magnitude `L`
//!   against Gaussian annotator noise `sigma`, so weak corruptions of
//!   well-separated pairs may fail to flip (the magnitude-to-noise ratio
//!   `L / sigma` then controls how detectable planted outliers are).
//! * `UnintentionalQuadratic` - honest mistakes: the flip probability is a
//!   clamped quadratic in the score gap, so close calls are error-prone and
//!   easy pairs are not.
//! * `Mixed` - unintentional mistakes plus a batch of extra uniformly random
//!   votes from careless annotators.
//!
//! `truth_outliers` marks the edges that received corrupted votes, which is
//! what a detector is asked to recover.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AnnotationRecord, ComparisonGraph};
use crate::pipeline::GlobalScores;
use crate::solver::FeatureMatrix;

/// Default coefficients of the unintentional-error curve
/// `q(gap) = 0.05 gap^2 - 0.2 gap + 0.2 = 0.2 (1 - gap/2)^2`.
///
/// For scores drawn uniformly on (-1, 1) the expected error rate is exactly
/// 10%; combined with [`DEFAULT_MIXED_RANDOM_FRACTION`] extra random votes
/// the overall error rate is 25%.
pub const DEFAULT_QUAD_COEFFS: (f64, f64, f64) = (0.05, -0.2, 0.2);
pub const DEFAULT_MIXED_RANDOM_FRACTION: f64 = 0.6;

/// Which pairs get compared, and how many votes each receives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphTopology {
    /// Every unordered pair, one vote each.
    Complete,
    /// `pairs` distinct unordered pairs sampled without replacement.
    RandomPairs { pairs: usize },
    /// Like `RandomPairs` but guaranteed weakly connected (random spanning
    /// tree plus extra pairs).
    RandomConnected { pairs: usize },
    /// `pairs` sampled pairs, each voted on by `votes` independent annotators.
    PerPairVotes { pairs: usize, votes: usize },
}

/// How the latent node scores (and features) are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaSource {
    /// Scores uniform on (-1, 1); feature column 0 carries the score, the
    /// remaining columns are standard-normal distractors.
    Uniform,
    /// Standard-normal features; scores are the given linear functional.
    Linear { beta_true: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    RandomFlip,
    UnintentionalQuadratic {
        #[serde(default = "default_quad_a")]
        a: f64,
        #[serde(default = "default_quad_b")]
        b: f64,
        #[serde(default = "default_quad_c")]
        c: f64,
    },
    Mixed {
        #[serde(default = "default_quad_a")]
        a: f64,
        #[serde(default = "default_quad_b")]
        b: f64,
        #[serde(default = "default_quad_c")]
        c: f64,
        #[serde(default = "default_mixed_fraction")]
        add_random_fraction: f64,
    },
}

fn default_quad_a() -> f64 {
    DEFAULT_QUAD_COEFFS.0
}
fn default_quad_b() -> f64 {
    DEFAULT_QUAD_COEFFS.1
}
fn default_quad_c() -> f64 {
    DEFAULT_QUAD_COEFFS.2
}
fn default_mixed_fraction() -> f64 {
    DEFAULT_MIXED_RANDOM_FRACTION
}

impl ErrorModel {
    pub fn unintentional_default() -> Self {
        let (a, b, c) = DEFAULT_QUAD_COEFFS;
        ErrorModel::UnintentionalQuadratic { a, b, c }
    }

    pub fn mixed_default() -> Self {
        let (a, b, c) = DEFAULT_QUAD_COEFFS;
        ErrorModel::Mixed {
            a,
            b,
            c,
            add_random_fraction: DEFAULT_MIXED_RANDOM_FRACTION,
        }
    }
}

/// Full description of one synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_nodes: usize,
    pub feature_dim: usize,
    pub graph: GraphTopology,
    pub theta_source: ThetaSource,
    /// Annotator noise on the latent comparison.
    pub sigma: f64,
    /// Latent magnitude of a planted corruption; `None` reverses outright.
    pub outlier_magnitude: Option<f64>,
    /// Per-vote corruption probability (`RandomFlip` only).
    pub flip_prob: f64,
    pub error_model: ErrorModel,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_nodes: 30,
            feature_dim: 5,
            graph: GraphTopology::Complete,
            theta_source: ThetaSource::Uniform,
            sigma: 0.1,
            outlier_magnitude: None,
            flip_prob: 0.0,
            error_model: ErrorModel::RandomFlip,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::InvalidConfig("need at least 2 nodes".into()));
        }
        if self.feature_dim == 0 {
            return Err(Error::InvalidConfig("feature_dim must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.flip_prob) {
            return Err(Error::InvalidConfig(format!(
                "flip_prob must lie in [0, 1), got {}",
                self.flip_prob
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        if let Some(l) = self.outlier_magnitude {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "outlier_magnitude must be positive and finite, got {l}"
                )));
            }
        }
        if let ThetaSource::Linear { beta_true } = &self.theta_source {
            if beta_true.len() != self.feature_dim {
                return Err(Error::DimensionMismatch {
                    context: "synth: beta_true length vs feature_dim".into(),
                    expected: self.feature_dim,
                    found: beta_true.len(),
                });
            }
        }
        let total = self.n_nodes * (self.n_nodes - 1) / 2;
        let (pairs, votes) = match self.graph {
            GraphTopology::Complete => (total, 1),
            GraphTopology::RandomPairs { pairs } => (pairs, 1),
            GraphTopology::RandomConnected { pairs } => {
                if pairs < self.n_nodes - 1 {
                    return Err(Error::InvalidConfig(format!(
                        "connected topology needs at least {} pairs, got {pairs}",
                        self.n_nodes - 1
                    )));
                }
                (pairs, 1)
            }
            GraphTopology::PerPairVotes { pairs, votes } => (pairs, votes),
        };
        if pairs == 0 || pairs > total {
            return Err(Error::InvalidConfig(format!(
                "cannot sample {pairs} distinct pairs from {total}"
            )));
        }
        if votes == 0 {
            return Err(Error::InvalidConfig("votes per pair must be >= 1".into()));
        }
        Ok(())
    }

    /// Planted magnitude-to-noise ratio, when both knobs are finite.
    pub fn onr(&self) -> Option<f64> {
        match (self.outlier_magnitude, self.sigma > 0.0) {
            (Some(l), true) => Some(l / self.sigma),
            _ => None,
        }
    }
}

/// A generated dataset plus everything needed to score a method against it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub graph: ComparisonGraph,
    pub phi: FeatureMatrix,
    pub truth_theta: GlobalScores,
    /// Per canonical edge: did this edge receive a corrupted vote?
    pub truth_outliers: Vec<bool>,
    pub truth_beta: Option<Vec<f64>>,
}

impl SyntheticDataset {
    /// Expand the aggregated graph back into one record per vote.
    pub fn records(&self) -> Vec<AnnotationRecord> {
        let mut records = Vec::with_capacity(self.graph.total_votes() as usize);
        for e in self.graph.edges() {
            for _ in 0..e.weight {
                records.push(AnnotationRecord::new(e.src, e.dst));
            }
        }
        records
    }

    pub fn n_outliers(&self) -> usize {
        self.truth_outliers.iter().filter(|&&o| o).count()
    }
}

/// Clamped quadratic flip probability in the absolute score gap.
pub fn unintentional_error_prob(delta_theta: f64, coeffs: (f64, f64, f64)) -> f64 {
    let delta = delta_theta.abs();
    let (a, b, c) = coeffs;
    (a * delta * delta + b * delta + c).clamp(0.0, 1.0)
}

fn draw_theta_and_features(
    spec: &SyntheticSpec,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> (Vec<f64>, FeatureMatrix, Vec<f64>) {
    let d = spec.feature_dim;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    match &spec.theta_source {
        ThetaSource::Uniform => {
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut rows = vec![vec![0.0; d]; n];
            for (i, row) in rows.iter_mut().enumerate() {
                row[0] = theta[i];
                for value in row.iter_mut().skip(1) {
                    *value = normal.sample(rng);
                }
            }
            let mut beta = vec![0.0; d];
            beta[0] = 1.0;
            let phi = FeatureMatrix::from_rows(&rows).expect("finite features");
            (theta, phi, beta)
        }
        ThetaSource::Linear { beta_true } => {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| normal.sample(rng)).collect())
                .collect();
            let theta = rows
                .iter()
                .map(|row| row.iter().zip(beta_true).map(|(x, b)| x * b).sum())
                .collect();
            let phi = FeatureMatrix::from_rows(&rows).expect("finite features");
            (theta, phi, beta_true.clone())
        }
    }
}

fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..n {
        let count = n - 1 - i;
        if idx < count {
            return (i, i + 1 + idx);
        }
        idx -= count;
    }
    unreachable!("pair index out of range")
}

fn sample_distinct_pairs(n: usize, m: usize, rng: &mut ChaCha12Rng) -> Vec<(usize, usize)> {
    let total = n * (n - 1) / 2;
    rand::seq::index::sample(rng, total, m)
        .into_iter()
        .map(|idx| pair_from_index(n, idx))
        .collect()
}

fn sample_connected_pairs(n: usize, m: usize, rng: &mut ChaCha12Rng) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    let tree: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    let complement: Vec<(usize, usize)> = (0..n * (n - 1) / 2)
        .map(|idx| pair_from_index(n, idx))
        .filter(|p| !tree.contains(p))
        .collect();
    let extra = m - pairs.len();
    for idx in rand::seq::index::sample(rng, complement.len(), extra) {
        pairs.push(complement[idx]);
    }
    pairs
}

/// Sample `m` distinct unordered pairs over `n` items (evaluation helper).
pub fn sample_pairs(n: usize, m: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let total = n * (n - 1) / 2;
    if m > total {
        return Err(Error::InvalidConfig(format!(
            "cannot sample {m} distinct pairs from {total}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(sample_distinct_pairs(n, m, &mut rng))
}

struct Vote {
    src: usize,
    dst: usize,
    corrupted: bool,
}

fn cast_vote(
    spec: &SyntheticSpec,
    theta: &[f64],
    pair: (usize, usize),
    rng: &mut ChaCha12Rng,
    noise: Option<&Normal<f64>>,
) -> Vote {
    let (i, j) = pair;
    let (hi, lo) = if theta[i] > theta[j] {
        (i, j)
    } else if theta[j] > theta[i] {
        (j, i)
    } else {
        (i.min(j), i.max(j))
    };
    match &spec.error_model {
        ErrorModel::RandomFlip => {
            let corrupted = rng.random::<f64>() < spec.flip_prob;
            let mut latent = theta[hi] - theta[lo];
            if corrupted {
                latent = match spec.outlier_magnitude {
                    Some(l) => latent - l,
                    None => f64::NEG_INFINITY,
                };
            }
            if let Some(noise) = noise {
                latent += noise.sample(rng);
            }
            let (src, dst) = if latent >= 0.0 { (hi, lo) } else { (lo, hi) };
            Vote {
                src,
                dst,
                corrupted,
            }
        }
        ErrorModel::UnintentionalQuadratic { a, b, c }
        | ErrorModel::Mixed { a, b, c, .. } => {
            let q = unintentional_error_prob(theta[hi] - theta[lo], (*a, *b, *c));
            let corrupted = rng.random::<f64>() < q;
            let (src, dst) = if corrupted { (lo, hi) } else { (hi, lo) };
            Vote {
                src,
                dst,
                corrupted,
            }
        }
    }
}

/// Generate a dataset. Identical specs (including seed) give identical output.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let n = spec.n_nodes;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let (theta, phi, beta) = draw_theta_and_features(spec, n, &mut rng);

    let (pairs, votes_per_pair) = match spec.graph {
        GraphTopology::Complete => {
            let all: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            (all, 1)
        }
        GraphTopology::RandomPairs { pairs } => (sample_distinct_pairs(n, pairs, &mut rng), 1),
        GraphTopology::RandomConnected { pairs } => {
            (sample_connected_pairs(n, pairs, &mut rng), 1)
        }
        GraphTopology::PerPairVotes { pairs, votes } => {
            (sample_distinct_pairs(n, pairs, &mut rng), votes)
        }
    };

    let noise = if spec.sigma > 0.0 {
        Some(Normal::new(0.0, spec.sigma).expect("valid sigma"))
    } else {
        None
    };

    let mut votes: Vec<Vote> = Vec::with_capacity(pairs.len() * votes_per_pair);
    for &pair in &pairs {
        for _ in 0..votes_per_pair {
            votes.push(cast_vote(spec, &theta, pair, &mut rng, noise.as_ref()));
        }
    }

    // Careless annotators: extra uniformly random votes on the sampled pairs.
    if let ErrorModel::Mixed {
        add_random_fraction,
        ..
    } = spec.error_model
    {
        if !(0.0..=10.0).contains(&add_random_fraction) {
            return Err(Error::InvalidConfig(format!(
                "add_random_fraction must lie in [0, 10], got {add_random_fraction}"
            )));
        }
        let n_add = (add_random_fraction * votes.len() as f64).round() as usize;
        for _ in 0..n_add {
            let (i, j) = pairs[rng.random_range(0..pairs.len())];
            let toward_larger = rng.random::<f64>() < 0.5;
            let (hi, lo) = if theta[i] >= theta[j] { (i, j) } else { (j, i) };
            let (src, dst) = if toward_larger { (hi, lo) } else { (lo, hi) };
            votes.push(Vote {
                src,
                dst,
                corrupted: !toward_larger && theta[i] != theta[j],
            });
        }
    }

    let records: Vec<AnnotationRecord> = votes
        .iter()
        .map(|v| AnnotationRecord::new(v.src, v.dst))
        .collect();
    let graph = ComparisonGraph::build(&records, n)?;
    let corrupted_directions: BTreeSet<(usize, usize)> = votes
        .iter()
        .filter(|v| v.corrupted)
        .map(|v| (v.src, v.dst))
        .collect();
    let truth_outliers = graph
        .edges()
        .iter()
        .map(|e| corrupted_directions.contains(&(e.src, e.dst)))
        .collect();

    Ok(SyntheticDataset {
        graph,
        phi,
        truth_theta: GlobalScores::new(theta),
        truth_outliers,
        truth_beta: Some(beta),
    })
}

/// Fresh nodes from the same score/feature law, for held-out evaluation.
pub fn generate_test_set(
    spec: &SyntheticSpec,
    n_test: usize,
    seed: u64,
) -> Result<(FeatureMatrix, Vec<f64>)> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (theta, phi, _) = draw_theta_and_features(spec, n_test, &mut rng);
    Ok((phi, theta))
}

/// Which of the three five-node vote fixtures to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureVariant {
    A,
    B,
    C,
}

impl std::str::FromStr for FixtureVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(FixtureVariant::A),
            "b" => Ok(FixtureVariant::B),
            "c" => Ok(FixtureVariant::C),
            other => Err(Error::InvalidConfig(format!(
                "unknown fixture variant '{other}' (expected a, b or c)"
            ))),
        }
    }
}

/// Five-node fixtures with true order A < B < C < D < E and monotone scalar
/// features. Wrong-direction edges are marked as the planted outliers.
///
/// * `A` - every pair voted 3 times: the four adjacent pairs split 2/1
///   toward the true order, the A-E pair splits 2/1 the wrong way, so the
///   per-pair majority forms a preference cycle.
/// * `B` - as `A` but the A-E pair splits 3/2: majority filtering then
///   leaves a cycle whose net pull is backwards, worse than keeping
///   everything.
/// * `C` - a single vote per pair, one of them (A over E) inconsistent;
///   per-pair filtering has nothing to compare.
pub fn condorcet_fixture(variant: FixtureVariant) -> SyntheticDataset {
    let theta = vec![1.0, 2.0, 3.0, 4.0, 5.0];
    let phi = FeatureMatrix::from_rows(&[
        vec![1.0],
        vec![2.0],
        vec![3.0],
        vec![4.0],
        vec![5.0],
    ])
    .expect("finite features");

    let chain = [(1, 0, 2), (0, 1, 1), (2, 1, 2), (1, 2, 1), (3, 2, 2), (2, 3, 1), (4, 3, 2), (3, 4, 1)];
    let (edges, outlier_directions): (Vec<(usize, usize, u64)>, Vec<(usize, usize)>) =
        match variant {
            FixtureVariant::A => {
                let mut edges = chain.to_vec();
                edges.push((0, 4, 2));
                edges.push((4, 0, 1));
                (edges, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
            }
            FixtureVariant::B => {
                let mut edges = chain.to_vec();
                edges.push((0, 4, 3));
                edges.push((4, 0, 2));
                (edges, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
            }
            FixtureVariant::C => (
                vec![(1, 0, 1), (2, 1, 1), (3, 2, 1), (4, 3, 1), (0, 4, 1)],
                vec![(0, 4)],
            ),
        };

    let graph = ComparisonGraph::from_edges(5, edges).expect("valid fixture");
    let truth_outliers = graph
        .edges()
        .iter()
        .map(|e| outlier_directions.contains(&(e.src, e.dst)))
        .collect();
    SyntheticDataset {
        graph,
        phi,
        truth_theta: GlobalScores::new(theta),
        truth_outliers,
        truth_beta: Some(vec![1.0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agrees_with_theta(ds: &SyntheticDataset) -> Vec<bool> {
        ds.graph
            .edges()
            .iter()
            .map(|e| ds.truth_theta.theta[e.src] > ds.truth_theta.theta[e.dst])
            .collect()
    }

    #[test]
    fn clean_noiseless_generation_agrees_with_truth() {
        let spec = SyntheticSpec {
            n_nodes: 12,
            sigma: 0.0,
            flip_prob: 0.0,
            seed: 7,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.n_outliers(), 0);
        assert!(agrees_with_theta(&ds).iter().all(|&ok| ok));
        assert_eq!(ds.graph.n_edges(), 12 * 11 / 2);
    }

    #[test]
    fn marked_outlier_count_is_binomial() {
        let spec = SyntheticSpec {
            n_nodes: 30,
            sigma: 0.1,
            outlier_magnitude: Some(0.8),
            flip_prob: 0.2,
            seed: 11,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        let n_pairs = 435.0_f64;
        let expected = 0.2 * n_pairs;
        let tolerance = 3.0 * (n_pairs * 0.2 * 0.8).sqrt();
        let got = ds.n_outliers() as f64;
        assert!(
            (got - expected).abs() <= tolerance,
            "marked {got}, expected about {expected}"
        );
    }

    #[test]
    fn per_pair_votes_conserves_vote_budget() {
        let spec = SyntheticSpec {
            n_nodes: 20,
            graph: GraphTopology::PerPairVotes {
                pairs: 40,
                votes: 5,
            },
            sigma: 0.2,
            flip_prob: 0.1,
            outlier_magnitude: None,
            seed: 3,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.graph.total_votes(), 200);
        assert_eq!(ds.records().len(), 200);
    }

    #[test]
    fn same_seed_reproduces_identical_dataset() {
        let spec = SyntheticSpec {
            n_nodes: 25,
            graph: GraphTopology::RandomPairs { pairs: 60 },
            flip_prob: 0.25,
            seed: 99,
            ..SyntheticSpec::default()
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flip_rate_converges_to_flip_prob() {
        let spec = SyntheticSpec {
            n_nodes: 150,
            flip_prob: 0.3,
            outlier_magnitude: None,
            sigma: 0.0,
            seed: 5,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        assert!(ds.graph.n_edges() >= 10_000);
        let rate = ds.n_outliers() as f64 / ds.graph.n_edges() as f64;
        assert!((rate - 0.3).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn forced_reversals_disagree_with_truth() {
        let spec = SyntheticSpec {
            n_nodes: 40,
            flip_prob: 0.25,
            outlier_magnitude: None,
            sigma: 0.0,
            seed: 10,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        let agree = agrees_with_theta(&ds);
        for (k, &outlier) in ds.truth_outliers.iter().enumerate() {
            assert_eq!(outlier, !agree[k], "edge {k}");
        }
    }

    #[test]
    fn finite_magnitude_leaves_wide_gaps_unflipped() {
        // With L = 0.8 and scores on (-1, 1), corrupted pairs with a gap
        // beyond 0.8 survive in the true direction but stay marked.
        let spec = SyntheticSpec {
            n_nodes: 60,
            flip_prob: 0.3,
            outlier_magnitude: Some(0.8),
            sigma: 0.01,
            seed: 21,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        let agree = agrees_with_theta(&ds);
        let marked_unflipped = ds
            .truth_outliers
            .iter()
            .zip(&agree)
            .filter(|&(&o, &a)| o && a)
            .count();
        let marked_flipped = ds
            .truth_outliers
            .iter()
            .zip(&agree)
            .filter(|&(&o, &a)| o && !a)
            .count();
        assert!(marked_flipped > marked_unflipped);
        assert!(marked_unflipped > 0, "expected some unflipped corruptions");
    }

    #[test]
    fn quadratic_error_prob_examples() {
        assert_eq!(unintentional_error_prob(2.0, DEFAULT_QUAD_COEFFS), 0.0);
        assert_eq!(unintentional_error_prob(-2.0, DEFAULT_QUAD_COEFFS), 0.0);
        assert_eq!(unintentional_error_prob(0.7, (0.0, 0.0, 0.5)), 0.5);
        assert_eq!(unintentional_error_prob(0.0, (0.0, 0.0, 2.0)), 1.0);
        assert_eq!(
            unintentional_error_prob(1.0, DEFAULT_QUAD_COEFFS),
            0.05 - 0.2 + 0.2
        );
    }

    #[test]
    fn unintentional_defaults_yield_ten_percent_errors() {
        let spec = SyntheticSpec {
            n_nodes: 120,
            error_model: ErrorModel::unintentional_default(),
            seed: 13,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        let rate = ds.n_outliers() as f64 / ds.graph.n_edges() as f64;
        assert!((rate - 0.10).abs() < 0.015, "unintentional rate {rate}");
    }

    #[test]
    fn mixed_defaults_yield_quarter_errors() {
        let spec = SyntheticSpec {
            n_nodes: 120,
            error_model: ErrorModel::mixed_default(),
            seed: 29,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        // Error ratio over votes: weight on wrong-direction edges / all votes.
        let wrong_votes: u64 = ds
            .graph
            .edges()
            .iter()
            .filter(|e| ds.truth_theta.theta[e.src] < ds.truth_theta.theta[e.dst])
            .map(|e| e.weight)
            .sum();
        let rate = wrong_votes as f64 / ds.graph.total_votes() as f64;
        assert!((rate - 0.25).abs() < 0.02, "mixed error rate {rate}");
    }

    #[test]
    fn unintentional_flips_concentrate_on_small_gaps() {
        let spec = SyntheticSpec {
            n_nodes: 90,
            error_model: ErrorModel::unintentional_default(),
            seed: 31,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        let theta = &ds.truth_theta.theta;
        let mut buckets = vec![(0usize, 0usize); 4]; // gap buckets of width 0.5
        for (k, e) in ds.graph.edges().iter().enumerate() {
            let gap = (theta[e.src] - theta[e.dst]).abs();
            let b = ((gap / 0.5) as usize).min(3);
            buckets[b].1 += 1;
            if ds.truth_outliers[k] {
                buckets[b].0 += 1;
            }
        }
        let rates: Vec<f64> = buckets
            .iter()
            .map(|&(flips, total)| flips as f64 / total.max(1) as f64)
            .collect();
        for pair in rates.windows(2) {
            assert!(
                pair[1] <= pair[0] + 0.03,
                "flip rate not decreasing in gap: {rates:?}"
            );
        }
    }

    #[test]
    fn rejects_oversampled_pairs() {
        let spec = SyntheticSpec {
            n_nodes: 5,
            graph: GraphTopology::RandomPairs { pairs: 11 },
            ..SyntheticSpec::default()
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn connected_topology_is_connected() {
        let spec = SyntheticSpec {
            n_nodes: 50,
            graph: GraphTopology::RandomConnected { pairs: 60 },
            flip_prob: 0.3,
            seed: 77,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.graph.connected_components().len(), 1);
        assert_eq!(ds.graph.total_votes(), 60);
    }

    #[test]
    fn fixture_a_shape_and_truth() {
        let ds = condorcet_fixture(FixtureVariant::A);
        assert_eq!(ds.graph.n_edges(), 10);
        assert_eq!(ds.truth_theta.theta, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(ds.n_outliers(), 5);
        let g = &ds.graph;
        for (src, dst) in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)] {
            assert!(ds.truth_outliers[g.edge_index(src, dst).unwrap()]);
        }
        assert!(!ds.truth_outliers[g.edge_index(4, 0).unwrap()]);
    }

    #[test]
    fn fixture_c_shape_and_truth() {
        let ds = condorcet_fixture(FixtureVariant::C);
        assert_eq!(ds.graph.n_edges(), 5);
        assert_eq!(ds.n_outliers(), 1);
        assert!(ds.truth_outliers[ds.graph.edge_index(0, 4).unwrap()]);
    }

    #[test]
    fn test_set_matches_source_law() {
        let spec = SyntheticSpec {
            n_nodes: 10,
            feature_dim: 3,
            theta_source: ThetaSource::Linear {
                beta_true: vec![1.0, -0.5, 0.25],
            },
            ..SyntheticSpec::default()
        };
        let (phi, theta) = generate_test_set(&spec, 20, 1234).unwrap();
        assert_eq!(phi.n_rows(), 20);
        assert_eq!(phi.n_cols(), 3);
        for i in 0..20 {
            let expected: f64 = phi.row(i)[0] - 0.5 * phi.row(i)[1] + 0.25 * phi.row(i)[2];
            approx::assert_relative_eq!(theta[i], expected, epsilon = 1e-12);
        }
    }
}
