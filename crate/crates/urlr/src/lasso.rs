//! Weighted LASSO regularization path by cyclic coordinate descent.
//!
//! Solves `min 1/2 ||ytilde - Xtilde gamma||^2 + lambda * sum_e w_e |gamma_e|`
//! on a decreasing log-spaced lambda grid with warm starts, and records the
//! lambda at which each coordinate first becomes nonzero. Coordinates that
//! activate early explain large, structured discrepancies between the votes
//! and the fitted ranking; ordering edges by activation lambda yields the
//! outlier ranking.
//!
//! The weighted penalty is handled by the variable rescaling
//! `gamma'_e = w_e * gamma_e`, so the descent core is a plain unweighted
//! LASSO over the rescaled columns `xtilde_e / w_e`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::Projection;

/// Grid and convergence controls for the regularization path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathSpec {
    /// Number of grid points between lambda_max and lambda_max * lambda_min_ratio.
    pub n_lambdas: usize,
    /// Smallest grid lambda as a fraction of lambda_max.
    pub lambda_min_ratio: f64,
    /// Convergence threshold on the largest coefficient change per sweep,
    /// measured in column-norm units.
    pub cd_tolerance: f64,
    /// Sweep budget per grid point.
    pub max_sweeps: usize,
}

impl Default for PathSpec {
    fn default() -> Self {
        Self {
            n_lambdas: 100,
            lambda_min_ratio: 1e-3,
            cd_tolerance: 1e-7,
            max_sweeps: 10_000,
        }
    }
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_lambdas == 0 {
            return Err(Error::InvalidConfig("n_lambdas must be >= 1".into()));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda_min_ratio must lie in (0, 1), got {}",
                self.lambda_min_ratio
            )));
        }
        if !(self.cd_tolerance > 0.0) {
            return Err(Error::InvalidConfig("cd_tolerance must be positive".into()));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Edges ordered by how early their outlier coefficient activates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierPath {
    /// Per edge: lambda at which the coefficient first became nonzero
    /// (0 if it never activated on the grid).
    pub activation_lambda: Vec<f64>,
    /// Edge indices, most outlying first.
    pub order: Vec<usize>,
    /// The lambda grid that was solved.
    pub lambdas: Vec<f64>,
    /// Coefficient snapshots per grid point, in original (unrescaled) variables.
    pub gamma_path: Vec<Vec<f64>>,
    /// |gamma_e| at the grid point where e activated; tie-break key.
    activation_gamma: Vec<f64>,
}

impl OutlierPath {
    /// Path over no edges; placeholder for methods that skip detection.
    pub fn empty() -> Self {
        Self {
            activation_lambda: Vec::new(),
            order: Vec::new(),
            lambdas: Vec::new(),
            gamma_path: Vec::new(),
            activation_gamma: Vec::new(),
        }
    }

    /// Rebuild a path from its persisted activations and order (no
    /// coefficient snapshots).
    pub fn from_parts(activation_lambda: Vec<f64>, order: Vec<usize>) -> Self {
        let n = activation_lambda.len();
        Self {
            activation_lambda,
            order,
            lambdas: Vec::new(),
            gamma_path: Vec::new(),
            activation_gamma: vec![0.0; n],
        }
    }

    pub fn n_edges(&self) -> usize {
        self.activation_lambda.len()
    }

    /// Rank of each edge in the outlier order (0 = most outlying).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (rank, &edge) in self.order.iter().enumerate() {
            ranks[edge] = rank;
        }
        ranks
    }

    /// Inlier mask after removing the top `p_percent` of the outlier order:
    /// `false` for the first `floor(p/100 * n)` edges, `true` elsewhere.
    pub fn prune(&self, p_percent: f64) -> Result<Vec<bool>> {
        if !(0.0..=100.0).contains(&p_percent) {
            return Err(Error::InvalidPruneRate(p_percent));
        }
        let n = self.n_edges();
        let cut = (p_percent * n as f64 / 100.0).floor() as usize;
        let mut keep = vec![true; n];
        for &edge in self.order.iter().take(cut) {
            keep[edge] = false;
        }
        Ok(keep)
    }
}

/// One coordinate-descent problem in rescaled variables.
trait CdProblem {
    fn n(&self) -> usize;
    /// Squared norm of rescaled column e.
    fn col_norm_sq(&self, e: usize) -> f64;
    /// Correlation of rescaled column e with the current residual.
    fn corr(&self, e: usize) -> f64;
    /// Add `delta` to rescaled coefficient e.
    fn shift(&mut self, e: usize, delta: f64);
}

/// Explicit-matrix problem state.
struct DenseProblem {
    cols: Vec<DVector<f64>>,
    norms_sq: Vec<f64>,
    residual: DVector<f64>,
}

impl DenseProblem {
    fn new(xtilde: &DMatrix<f64>, ytilde: &DVector<f64>, weights: &[f64]) -> Self {
        let cols: Vec<DVector<f64>> = (0..xtilde.ncols())
            .map(|e| xtilde.column(e).into_owned() / weights[e])
            .collect();
        let norms_sq = cols.iter().map(|c| c.norm_squared()).collect();
        Self {
            cols,
            norms_sq,
            residual: ytilde.clone(),
        }
    }
}

impl CdProblem for DenseProblem {
    fn n(&self) -> usize {
        self.cols.len()
    }

    fn col_norm_sq(&self, e: usize) -> f64 {
        self.norms_sq[e]
    }

    fn corr(&self, e: usize) -> f64 {
        self.cols[e].dot(&self.residual)
    }

    fn shift(&mut self, e: usize, delta: f64) {
        self.residual.axpy(-delta, &self.cols[e], 1.0);
    }
}

/// Projection-structured state: `Xtilde = (I - H) sqrt(W)` with `H` an exact
/// projector, so correlations reduce to residual lookups and each update
/// costs O(rank) instead of O(edges).
struct ProjectedProblem {
    /// rank x edges; column e is the basis row of edge e.
    basis_t: DMatrix<f64>,
    sqrt_w: DVector<f64>,
    norms_sq: Vec<f64>,
    /// `u = sqrt(W)(y - gamma)`.
    u: DVector<f64>,
    /// `t = U1^T u`.
    t: DVector<f64>,
}

impl ProjectedProblem {
    fn new(proj: &Projection) -> Self {
        let basis_t = proj.basis().transpose();
        let sqrt_w = proj.sqrt_w().clone();
        let norms_sq = (0..proj.n_edges())
            .map(|e| {
                let h_ee = basis_t.column(e).norm_squared();
                let w = sqrt_w[e] * sqrt_w[e];
                ((1.0 - h_ee).max(0.0)) / w
            })
            .collect();
        let u = sqrt_w.clone();
        let t = &basis_t * &u;
        Self {
            basis_t,
            sqrt_w,
            norms_sq,
            u,
            t,
        }
    }
}

impl CdProblem for ProjectedProblem {
    fn n(&self) -> usize {
        self.u.len()
    }

    fn col_norm_sq(&self, e: usize) -> f64 {
        self.norms_sq[e]
    }

    fn corr(&self, e: usize) -> f64 {
        let projected = self.u[e] - self.basis_t.column(e).dot(&self.t);
        projected / self.sqrt_w[e]
    }

    fn shift(&mut self, e: usize, delta: f64) {
        let step = delta / self.sqrt_w[e];
        self.u[e] -= step;
        self.t.axpy(-step, &self.basis_t.column(e).into_owned(), 1.0);
    }
}

fn soft_threshold(z: f64, threshold: f64) -> f64 {
    if z > threshold {
        z - threshold
    } else if z < -threshold {
        z + threshold
    } else {
        0.0
    }
}

fn solve_path<P: CdProblem>(problem: &mut P, weights: &[f64], spec: &PathSpec) -> Result<OutlierPath> {
    spec.validate()?;
    let n = problem.n();
    let mut path = OutlierPath {
        activation_lambda: vec![0.0; n],
        order: (0..n).collect(),
        lambdas: Vec::new(),
        gamma_path: Vec::new(),
        activation_gamma: vec![0.0; n],
    };
    if n == 0 {
        return Ok(path);
    }

    let max_norm_sq = (0..n).map(|e| problem.col_norm_sq(e)).fold(0.0, f64::max);
    let norm_floor = max_norm_sq * 1e-12;
    let live: Vec<bool> = (0..n)
        .map(|e| problem.col_norm_sq(e) > norm_floor && problem.col_norm_sq(e) > 0.0)
        .collect();

    let lambda_max = (0..n)
        .filter(|&e| live[e])
        .map(|e| problem.corr(e).abs())
        .fold(0.0, f64::max);
    if lambda_max <= 0.0 || !lambda_max.is_finite() {
        // Nothing to explain: gamma stays zero along the whole path.
        return Ok(path);
    }
    // Nudge so the argmax coordinate sits exactly at zero on the first grid point.
    let lambda_top = lambda_max * (1.0 + 1e-12);
    let k = spec.n_lambdas;
    path.lambdas = (0..k)
        .map(|i| {
            if k == 1 {
                lambda_top
            } else {
                lambda_top * spec.lambda_min_ratio.powf(i as f64 / (k - 1) as f64)
            }
        })
        .collect();

    // Secondary stop: stationarity within a fixed fraction of the top
    // lambda. Near-saturated fits at the small-lambda tail converge at a
    // crawl in coefficient-change terms while already first-order optimal
    // far beyond any downstream tolerance. In original variables the
    // stationarity residual stays below lambda_top * 1e-6.
    let max_weight = weights.iter().cloned().fold(1.0, f64::max);
    let kkt_stop = lambda_top * 1e-6 / max_weight;

    let mut gamma_scaled = vec![0.0; n];
    for (grid_idx, &lambda) in path.lambdas.clone().iter().enumerate() {
        let mut converged = false;
        let mut last_change = f64::INFINITY;
        for sweep in 0..spec.max_sweeps {
            let mut max_change = 0.0_f64;
            for e in 0..n {
                if !live[e] {
                    continue;
                }
                let norm_sq = problem.col_norm_sq(e);
                let z = problem.corr(e) + norm_sq * gamma_scaled[e];
                let updated = soft_threshold(z, lambda) / norm_sq;
                let delta = updated - gamma_scaled[e];
                if delta != 0.0 {
                    problem.shift(e, delta);
                    gamma_scaled[e] = updated;
                    max_change = max_change.max(delta.abs() * norm_sq.sqrt());
                }
            }
            last_change = max_change;
            if max_change < spec.cd_tolerance {
                converged = true;
                break;
            }
            if max_change < 1e3 * spec.cd_tolerance || sweep % 10 == 9 {
                let worst = (0..n)
                    .filter(|&e| live[e])
                    .map(|e| {
                        let c = problem.corr(e);
                        if gamma_scaled[e] != 0.0 {
                            (c - lambda * gamma_scaled[e].signum()).abs()
                        } else {
                            (c.abs() - lambda).max(0.0)
                        }
                    })
                    .fold(0.0, f64::max);
                if worst <= kkt_stop {
                    converged = true;
                    break;
                }
            }
        }
        if !converged {
            return Err(Error::LassoNonConvergence {
                lambda_index: grid_idx,
                lambda,
                residual: last_change,
                sweeps: spec.max_sweeps,
            });
        }
        let gamma: Vec<f64> = (0..n).map(|e| gamma_scaled[e] / weights[e]).collect();
        for e in 0..n {
            if gamma[e] != 0.0 && path.activation_lambda[e] == 0.0 {
                // Record the bracket top: the last grid lambda at which the
                // coefficient was still zero.
                path.activation_lambda[e] = path.lambdas[grid_idx.saturating_sub(1)];
                path.activation_gamma[e] = gamma[e].abs();
            }
        }
        path.gamma_path.push(gamma);
    }

    path.order.sort_by(|&a, &b| {
        path.activation_lambda[b]
            .partial_cmp(&path.activation_lambda[a])
            .unwrap()
            .then(
                path.activation_gamma[b]
                    .partial_cmp(&path.activation_gamma[a])
                    .unwrap(),
            )
            .then(a.cmp(&b))
    });
    Ok(path)
}

fn validate_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            context: "lasso: weights length vs edges".into(),
            expected: n,
            found: weights.len(),
        });
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 1.0) {
        return Err(Error::InvalidConfig(
            "penalty weights must be finite and >= 1".into(),
        ));
    }
    Ok(())
}

/// Solve the weighted LASSO path for an explicit projected system.
pub fn lasso_path(
    xtilde: &DMatrix<f64>,
    ytilde: &DVector<f64>,
    weights: &[f64],
    spec: &PathSpec,
) -> Result<OutlierPath> {
    if xtilde.nrows() != ytilde.len() {
        return Err(Error::DimensionMismatch {
            context: "lasso: response length vs design rows".into(),
            expected: xtilde.nrows(),
            found: ytilde.len(),
        });
    }
    validate_weights(weights, xtilde.ncols())?;
    let mut problem = DenseProblem::new(xtilde, ytilde, weights);
    solve_path(&mut problem, weights, spec)
}

/// Solve the weighted LASSO path directly on a hat-matrix projection,
/// without materializing `Xtilde`.
pub fn lasso_path_projected(proj: &Projection, spec: &PathSpec) -> Result<OutlierPath> {
    let weights = proj.weights().to_vec();
    validate_weights(&weights, proj.n_edges())?;
    let mut problem = ProjectedProblem::new(proj);
    solve_path(&mut problem, &weights, spec)
}

/// Largest violation of the weighted-LASSO stationarity conditions at
/// `(gamma, lambda)`: active coordinates must sit on the penalty boundary,
/// inactive ones inside it.
pub fn kkt_max_violation(
    xtilde: &DMatrix<f64>,
    ytilde: &DVector<f64>,
    gamma: &[f64],
    lambda: f64,
    weights: &[f64],
) -> f64 {
    let g = DVector::from_column_slice(gamma);
    let residual = ytilde - xtilde * &g;
    let grad = xtilde.transpose() * residual;
    let mut worst = 0.0_f64;
    for e in 0..gamma.len() {
        let bound = lambda * weights[e];
        let violation = if gamma[e] != 0.0 {
            (grad[e] - bound * gamma[e].signum()).abs()
        } else {
            (grad[e].abs() - bound).max(0.0)
        };
        worst = worst.max(violation);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ComparisonGraph;
    use crate::solver::{DesignSystem, FeatureMatrix};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    /// Independent per-lambda solver: accelerated proximal gradient from a
    /// cold start, with restarts, run to tight tolerance.
    pub(crate) fn prox_grad_oracle(
        xtilde: &DMatrix<f64>,
        ytilde: &DVector<f64>,
        weights: &[f64],
        lambda: f64,
    ) -> Vec<f64> {
        let n = xtilde.ncols();
        let gram = xtilde.transpose() * xtilde;
        let xty = xtilde.transpose() * ytilde;
        // Lipschitz constant by power iteration.
        let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let mut lip = 0.0;
        for _ in 0..300 {
            v = &gram * &v;
            lip = v.norm();
            if lip == 0.0 {
                return vec![0.0; n];
            }
            v /= lip;
        }
        let step = 1.0 / (lip * 1.01);
        let objective = |g: &DVector<f64>| {
            let r = ytilde - xtilde * g;
            0.5 * r.norm_squared()
                + lambda * g.iter().zip(weights).map(|(x, w)| w * x.abs()).sum::<f64>()
        };
        let mut gamma: DVector<f64> = DVector::zeros(n);
        let mut z = gamma.clone();
        let mut momentum_t = 1.0_f64;
        let mut prev_obj = f64::INFINITY;
        for it in 0..500_000 {
            let grad = &gram * &z - &xty;
            let mut next = DVector::zeros(n);
            for e in 0..n {
                next[e] = soft_threshold(z[e] - step * grad[e], step * lambda * weights[e]);
            }
            let t_next = (1.0 + (1.0 + 4.0 * momentum_t * momentum_t).sqrt()) / 2.0;
            let mix = (momentum_t - 1.0) / t_next;
            z = &next + (&next - &gamma) * mix;
            let moved = (&next - &gamma).amax();
            gamma = next;
            momentum_t = t_next;
            if it % 50 == 0 {
                let obj = objective(&gamma);
                if obj > prev_obj {
                    momentum_t = 1.0;
                    z = gamma.clone();
                }
                prev_obj = obj;
            }
            if moved < 1e-13 {
                break;
            }
        }
        gamma.iter().copied().collect()
    }

    fn random_projected_system(
        seed: u64,
        n_nodes: usize,
        extra_edges: usize,
        d: usize,
    ) -> (DMatrix<f64>, DVector<f64>, Vec<f64>, crate::solver::Projection) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut triples: Vec<(usize, usize, u64)> = (1..n_nodes)
            .map(|i| (rng.random_range(0..i), i, rng.random_range(1..4)))
            .collect();
        let mut added = 0;
        while added < extra_edges {
            let a = rng.random_range(0..n_nodes);
            let b = rng.random_range(0..n_nodes);
            if a != b && !triples.iter().any(|&(s, t, _)| (s, t) == (a, b)) {
                triples.push((a, b, rng.random_range(1..4)));
                added += 1;
            }
        }
        let g = ComparisonGraph::from_edges(n_nodes, triples).unwrap();
        let phi = FeatureMatrix::new(nalgebra::DMatrix::from_fn(n_nodes, d, |_, _| {
            rng.random_range(-1.0..1.0)
        }))
        .unwrap();
        let sys = DesignSystem::new(&g, &phi).unwrap();
        let proj = sys.hat_projection();
        let xt = proj.xtilde_dense();
        let yt = proj.ytilde().clone();
        let w = proj.weights().to_vec();
        (xt, yt, w, proj)
    }

    #[test]
    fn zero_response_never_activates() {
        let xt = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let yt = DVector::zeros(3);
        let path = lasso_path(&xt, &yt, &[1.0, 1.0, 1.0], &PathSpec::default()).unwrap();
        assert!(path.activation_lambda.iter().all(|&a| a == 0.0));
        assert!(path.gamma_path.is_empty());
        assert_eq!(path.order, vec![0, 1, 2]);
    }

    #[test]
    fn scalar_system_activates_at_lambda_max_and_soft_thresholds() {
        let xt = DMatrix::from_row_slice(1, 1, &[1.0]);
        let yt = DVector::from_column_slice(&[2.0]);
        let path = lasso_path(&xt, &yt, &[1.0], &PathSpec::default()).unwrap();
        assert_relative_eq!(path.activation_lambda[0], 2.0, max_relative = 1e-9);
        // Closed form along the whole grid: gamma(lambda) = S(2, lambda).
        for (i, &lambda) in path.lambdas.iter().enumerate() {
            let expected = soft_threshold(2.0, lambda);
            assert_relative_eq!(path.gamma_path[i][0], expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn first_activation_is_largest_weighted_correlation() {
        let (xt, yt, w, _) = random_projected_system(12, 8, 4, 2);
        let path = lasso_path(&xt, &yt, &w, &PathSpec::default()).unwrap();
        let scores = xt.transpose() * &yt;
        let argmax = (0..w.len())
            .max_by(|&a, &b| {
                (scores[a].abs() / w[a])
                    .partial_cmp(&(scores[b].abs() / w[b]))
                    .unwrap()
            })
            .unwrap();
        assert_eq!(path.order[0], argmax);
    }

    #[test]
    fn path_matches_cold_start_oracle() {
        let spec = PathSpec {
            n_lambdas: 40,
            ..PathSpec::default()
        };
        let (xt, yt, w, _) = random_projected_system(77, 6, 3, 2);
        let path = lasso_path(&xt, &yt, &w, &spec).unwrap();
        for (i, &lambda) in path.lambdas.iter().enumerate() {
            let oracle = prox_grad_oracle(&xt, &yt, &w, lambda);
            for e in 0..w.len() {
                assert!(
                    (path.gamma_path[i][e] - oracle[e]).abs() < 1e-4,
                    "grid {i} edge {e}: {} vs oracle {}",
                    path.gamma_path[i][e],
                    oracle[e]
                );
            }
        }
    }

    #[test]
    fn kkt_holds_on_every_grid_point() {
        let (xt, yt, w, _) = random_projected_system(5, 9, 5, 3);
        let path = lasso_path(&xt, &yt, &w, &PathSpec::default()).unwrap();
        for (i, &lambda) in path.lambdas.iter().enumerate() {
            let violation = kkt_max_violation(&xt, &yt, &path.gamma_path[i], lambda, &w);
            assert!(violation <= 1e-5, "grid {i}: KKT violation {violation}");
        }
    }

    #[test]
    fn projected_and_dense_paths_agree() {
        let (xt, yt, w, proj) = random_projected_system(31, 10, 6, 3);
        let dense = lasso_path(&xt, &yt, &w, &PathSpec::default()).unwrap();
        let structured = lasso_path_projected(&proj, &PathSpec::default()).unwrap();
        assert_eq!(dense.order, structured.order);
        for (a, b) in dense
            .gamma_path
            .last()
            .unwrap()
            .iter()
            .zip(structured.gamma_path.last().unwrap())
        {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn activation_order_invariant_to_common_scaling() {
        let (xt, yt, w, _) = random_projected_system(9, 7, 4, 2);
        let base = lasso_path(&xt, &yt, &w, &PathSpec::default()).unwrap();
        let scaled = lasso_path(&(&xt * 3.0), &(&yt * 3.0), &w, &PathSpec::default()).unwrap();
        assert_eq!(base.order, scaled.order);
    }

    #[test]
    fn warm_start_matches_cold_start_at_final_lambda() {
        let (xt, yt, w, _) = random_projected_system(44, 8, 5, 2);
        let spec = PathSpec::default();
        let path = lasso_path(&xt, &yt, &w, &spec).unwrap();
        let final_lambda = *path.lambdas.last().unwrap();
        // Cold start: a single-point grid pinned at the same lambda.
        let scores = xt.transpose() * &yt;
        let lambda_max = (0..w.len())
            .map(|e| scores[e].abs() / w[e])
            .fold(0.0, f64::max)
            * (1.0 + 1e-12);
        // The cold solve lands on the smallest lambda with no warm start;
        // give it the sweep budget that the pathwise solver never needs.
        let cold_spec = PathSpec {
            n_lambdas: 2,
            lambda_min_ratio: final_lambda / lambda_max,
            max_sweeps: 500_000,
            ..PathSpec::default()
        };
        let cold = lasso_path(&xt, &yt, &w, &cold_spec).unwrap();
        for (a, b) in path
            .gamma_path
            .last()
            .unwrap()
            .iter()
            .zip(cold.gamma_path.last().unwrap())
        {
            assert!((a - b).abs() < 1e-6, "warm {a} vs cold {b}");
        }
    }

    #[test]
    fn active_set_grows_on_most_steps() {
        let (xt, yt, w, _) = random_projected_system(100, 12, 8, 3);
        let path = lasso_path(&xt, &yt, &w, &PathSpec::default()).unwrap();
        let sizes: Vec<usize> = path
            .gamma_path
            .iter()
            .map(|g| g.iter().filter(|&&v| v != 0.0).count())
            .collect();
        let non_decreasing = sizes.windows(2).filter(|w| w[1] >= w[0]).count();
        let total = sizes.len() - 1;
        assert!(
            non_decreasing as f64 >= 0.95 * total as f64,
            "active set shrank too often: {sizes:?}"
        );
    }

    #[test]
    fn non_convergence_reports_grid_index() {
        let (xt, yt, w, _) = random_projected_system(3, 8, 5, 2);
        let spec = PathSpec {
            max_sweeps: 1,
            cd_tolerance: 1e-14,
            ..PathSpec::default()
        };
        match lasso_path(&xt, &yt, &w, &spec) {
            Err(Error::LassoNonConvergence { lambda_index, .. }) => {
                assert!(lambda_index < 100);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn prune_examples() {
        let (xt, yt, w, _) = random_projected_system(8, 7, 5, 2);
        let path = lasso_path(&xt, &yt, &w, &PathSpec::default()).unwrap();
        let n = path.n_edges();
        assert!(path.prune(0.0).unwrap().iter().all(|&k| k));
        assert!(path.prune(100.0).unwrap().iter().all(|&k| !k));
        assert!(path.prune(-1.0).is_err());
        assert!(path.prune(100.5).is_err());

        if n == 10 {
            let keep = path.prune(20.0).unwrap();
            assert_eq!(keep.iter().filter(|&&k| !k).count(), 2);
            assert!(!keep[path.order[0]]);
            assert!(!keep[path.order[1]]);
        }
    }

    #[test]
    fn prune_floor_arithmetic_on_ten_edges() {
        let mut path = OutlierPath::empty();
        path.activation_lambda = vec![0.0; 10];
        path.activation_gamma = vec![0.0; 10];
        path.order = (0..10).rev().collect();
        let keep = path.prune(20.0).unwrap();
        assert_eq!(keep.iter().filter(|&&k| !k).count(), 2);
        assert!(!keep[9] && !keep[8]);
    }
}
