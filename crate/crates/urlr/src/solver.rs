//! Weighted least-squares design for the linear ranking model.
//!
//! The design matrix is `X = sqrt(W) C Phi`: one row per comparison edge,
//! scaled by the square root of its vote count. The ranking coefficients
//! solve a ridge-stabilized normal system, while outlier detection works in
//! the orthogonal complement of `col(X)` exposed by [`DesignSystem::hat_projection`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComparisonGraph;

/// Default ridge stabilizer for the normal equations.
pub const DEFAULT_MU: f64 = 1e-3;

/// Dense N x d feature matrix, one row per graph node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix".into()));
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidConfig(
                "feature rows have inconsistent lengths".into(),
            ));
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    /// Column-centered projection onto the top `target_dim` principal
    /// components. Component signs are fixed so the largest-magnitude entry
    /// of each component is positive.
    pub fn pca_reduce(&self, target_dim: usize) -> Result<FeatureMatrix> {
        let n = self.n_rows();
        let d = self.n_cols();
        let max_dim = (n.saturating_sub(1)).min(d);
        if target_dim < 1 || target_dim > max_dim {
            return Err(Error::InvalidConfig(format!(
                "pca target_dim {target_dim} outside [1, {max_dim}] for a {n}x{d} feature matrix"
            )));
        }
        let mut centered = self.values.clone();
        for j in 0..d {
            let mean = centered.column(j).sum() / n as f64;
            for i in 0..n {
                centered[(i, j)] -= mean;
            }
        }
        let svd = centered.clone().svd(false, true);
        let v_t = svd.v_t.expect("SVD with V requested");
        let mut components = v_t.rows(0, target_dim).into_owned();
        for mut row in components.row_iter_mut() {
            let lead = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0);
            if row[lead] < 0.0 {
                row.neg_mut();
            }
        }
        FeatureMatrix::new(centered * components.transpose())
    }
}

/// Linear ranking model: `score(x) = beta . phi_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankModel {
    pub beta: Vec<f64>,
    pub mu: f64,
}

impl RankModel {
    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// Score every row of `phi`.
    pub fn predict(&self, phi: &FeatureMatrix) -> Result<Vec<f64>> {
        if phi.n_cols() != self.beta.len() {
            return Err(Error::DimensionMismatch {
                context: "predict: feature columns vs model dimension".into(),
                expected: self.beta.len(),
                found: phi.n_cols(),
            });
        }
        let beta = DVector::from_column_slice(&self.beta);
        Ok((phi.matrix() * beta).iter().copied().collect())
    }
}

/// Assembled weighted design for one graph/feature pair.
#[derive(Debug, Clone)]
pub struct DesignSystem {
    x: DMatrix<f64>,
    sqrt_w: DVector<f64>,
    weights: Vec<f64>,
    mu: f64,
}

impl DesignSystem {
    /// Build `X = sqrt(W) C Phi` for a graph and its node features.
    pub fn new(graph: &ComparisonGraph, phi: &FeatureMatrix) -> Result<Self> {
        if phi.n_rows() != graph.n_nodes() {
            return Err(Error::DimensionMismatch {
                context: "design: feature rows vs graph nodes".into(),
                expected: graph.n_nodes(),
                found: phi.n_rows(),
            });
        }
        let d = phi.n_cols();
        let m = graph.n_edges();
        let mut x = DMatrix::zeros(m, d);
        let mut sqrt_w = DVector::zeros(m);
        for (k, e) in graph.edges().iter().enumerate() {
            let sw = (e.weight as f64).sqrt();
            sqrt_w[k] = sw;
            for j in 0..d {
                x[(k, j)] = sw * (phi.matrix()[(e.src, j)] - phi.matrix()[(e.dst, j)]);
            }
        }
        Ok(Self {
            x,
            sqrt_w,
            weights: graph.weights(),
            mu: DEFAULT_MU,
        })
    }

    /// Featureless design `X = sqrt(W) C`, used when outliers are detected
    /// from the graph topology alone.
    pub fn featureless(graph: &ComparisonGraph) -> Self {
        let m = graph.n_edges();
        let n = graph.n_nodes();
        let mut x = DMatrix::zeros(m, n);
        let mut sqrt_w = DVector::zeros(m);
        for (k, e) in graph.edges().iter().enumerate() {
            let sw = (e.weight as f64).sqrt();
            sqrt_w[k] = sw;
            x[(k, e.src)] = sw;
            x[(k, e.dst)] = -sw;
        }
        Self {
            x,
            sqrt_w,
            weights: graph.weights(),
            mu: DEFAULT_MU,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidConfig(format!("mu must be positive, got {mu}")));
        }
        self.mu = mu;
        Ok(self)
    }

    pub fn n_edges(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sqrt_w(&self) -> &DVector<f64> {
        &self.sqrt_w
    }

    /// All-ones response vector, one entry per edge.
    pub fn y(&self) -> DVector<f64> {
        DVector::from_element(self.n_edges(), 1.0)
    }

    fn solve_normal(&self, x_eff: &DMatrix<f64>, v_eff: &DVector<f64>) -> Result<RankModel> {
        let d = self.dim();
        let mut a = x_eff.transpose() * x_eff;
        for j in 0..d {
            a[(j, j)] += self.mu;
        }
        let rhs = x_eff.transpose() * v_eff;
        let chol = a.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let beta = chol.solve(&rhs);
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("ranking coefficients".into()));
        }
        Ok(RankModel {
            beta: beta.iter().copied().collect(),
            mu: self.mu,
        })
    }

    /// Ridge solution `beta = (X^T X + mu I)^{-1} X^T sqrt(W) (y - gamma)`.
    pub fn fit_beta(&self, gamma: &[f64]) -> Result<RankModel> {
        if gamma.len() != self.n_edges() {
            return Err(Error::DimensionMismatch {
                context: "fit: gamma length vs edges".into(),
                expected: self.n_edges(),
                found: gamma.len(),
            });
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gamma".into()));
        }
        let v_eff = DVector::from_iterator(
            self.n_edges(),
            gamma.iter().enumerate().map(|(k, g)| self.sqrt_w[k] * (1.0 - g)),
        );
        self.solve_normal(&self.x, &v_eff)
    }

    /// Refit on the surviving edges only:
    /// `beta = (X^T F X + mu I)^{-1} X^T sqrt(W) F y` with `F = diag(keep)`.
    pub fn fit_beta_pruned(&self, keep: &[bool]) -> Result<RankModel> {
        if keep.len() != self.n_edges() {
            return Err(Error::DimensionMismatch {
                context: "fit: keep mask length vs edges".into(),
                expected: self.n_edges(),
                found: keep.len(),
            });
        }
        if !keep.iter().any(|&k| k) {
            return Err(Error::NoInliers);
        }
        let mut x_eff = self.x.clone();
        for (k, &kept) in keep.iter().enumerate() {
            if !kept {
                x_eff.row_mut(k).fill(0.0);
            }
        }
        let v_eff = DVector::from_iterator(
            self.n_edges(),
            keep.iter()
                .enumerate()
                .map(|(k, &kept)| if kept { self.sqrt_w[k] } else { 0.0 }),
        );
        self.solve_normal(&x_eff, &v_eff)
    }

    /// Orthogonal projection onto the complement of `col(X)`.
    ///
    /// The hat matrix is built from a rank-revealing SVD, so it is an exact
    /// projector (`H^2 = H`, `H^T = H`, `H X = X` to machine precision); the
    /// ridge term only stabilizes the coefficient solves.
    pub fn hat_projection(&self) -> Projection {
        let m = self.n_edges();
        let (u1, rank) = if m == 0 || self.dim() == 0 {
            (DMatrix::zeros(m, 0), 0)
        } else {
            let svd = self.x.clone().svd(true, false);
            let u = svd.u.expect("SVD with U requested");
            let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            let tol = smax * (m.max(self.dim()) as f64) * f64::EPSILON;
            let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
            (u.columns(0, rank).into_owned(), rank)
        };
        // ytilde = (I - H) sqrt(W) y with y = ones.
        let v = self.sqrt_w.clone();
        let ytilde = &v - &u1 * (u1.transpose() * &v);
        Projection {
            u1,
            rank,
            sqrt_w: self.sqrt_w.clone(),
            weights: self.weights.clone(),
            ytilde,
        }
    }
}

/// Basis form of the residual-space projection `(I - H) sqrt(W)`.
#[derive(Debug, Clone)]
pub struct Projection {
    u1: DMatrix<f64>,
    rank: usize,
    sqrt_w: DVector<f64>,
    weights: Vec<f64>,
    ytilde: DVector<f64>,
}

impl Projection {
    pub fn n_edges(&self) -> usize {
        self.sqrt_w.len()
    }

    /// Numerical rank of the design matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn sqrt_w(&self) -> &DVector<f64> {
        &self.sqrt_w
    }

    pub(crate) fn basis(&self) -> &DMatrix<f64> {
        &self.u1
    }

    /// Projected response `ytilde = (I - H) sqrt(W) y`.
    pub fn ytilde(&self) -> &DVector<f64> {
        &self.ytilde
    }

    /// Apply `I - H` to an edge vector.
    pub fn annihilate(&self, v: &DVector<f64>) -> DVector<f64> {
        v - &self.u1 * (self.u1.transpose() * v)
    }

    /// Materialized hat matrix. Quadratic in the edge count; intended for
    /// inspection and tests on small systems.
    pub fn hat_dense(&self) -> DMatrix<f64> {
        &self.u1 * self.u1.transpose()
    }

    /// Materialized `Xtilde = (I - H) sqrt(W)`.
    pub fn xtilde_dense(&self) -> DMatrix<f64> {
        let m = self.n_edges();
        let mut xt = -(&self.u1 * self.u1.transpose());
        for k in 0..m {
            xt[(k, k)] += 1.0;
        }
        for j in 0..m {
            let sw = self.sqrt_w[j];
            for i in 0..m {
                xt[(i, j)] *= sw;
            }
        }
        xt
    }
}
