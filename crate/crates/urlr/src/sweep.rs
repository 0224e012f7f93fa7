//! Multi-seed experiment sweeps over synthetic datasets.
//!
//! One sweep varies a single axis (pruning rate, planted error rate,
//! magnitude-to-noise ratio, or graph density), runs each requested method
//! on the same per-seed datasets, and scores every trial on a held-out test
//! set drawn from the same score law. Trials run concurrently; rows are
//! merged in a deterministic order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{outlier_roc, pair_disagreement};
use crate::pipeline::{fit, FitResult, Method, PipelineConfig};
use crate::solver::DesignSystem;
use crate::synth::{
    generate, generate_test_set, sample_pairs, GraphTopology, SyntheticDataset, SyntheticSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Prune,
    ErrorRate,
    Onr,
    Density,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Prune => "prune",
            SweepAxis::ErrorRate => "error_rate",
            SweepAxis::Onr => "onr",
            SweepAxis::Density => "density",
        }
    }

    /// Grid used when the spec does not pin one.
    pub fn default_values(&self) -> Vec<f64> {
        match self {
            SweepAxis::Prune => vec![0.0, 10.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0],
            SweepAxis::ErrorRate => vec![0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35],
            SweepAxis::Onr => vec![4.0, 5.0, 6.0, 7.0, 8.0, 9.0],
            SweepAxis::Density => vec![1.2, 2.0, 4.0, 8.0],
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prune" => Ok(SweepAxis::Prune),
            "error_rate" => Ok(SweepAxis::ErrorRate),
            "onr" => Ok(SweepAxis::Onr),
            "density" => Ok(SweepAxis::Density),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep axis '{other}' (expected prune, error_rate, onr or density)"
            ))),
        }
    }
}

/// Everything a sweep needs besides the axis and method list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub base: SyntheticSpec,
    pub pipeline: PipelineConfig,
    /// Axis grid; per-axis defaults apply when absent.
    pub axis_values: Option<Vec<f64>>,
    pub holdout_nodes: usize,
    pub holdout_pairs: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            base: SyntheticSpec::default(),
            pipeline: PipelineConfig::default(),
            axis_values: None,
            holdout_nodes: 50,
            holdout_pairs: 200,
        }
    }
}

/// One (method, seed, axis value) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub method: Method,
    pub seed: u64,
    pub axis_value: f64,
    /// Pruning rate in effect for this trial.
    pub p: f64,
    /// Planted per-vote corruption probability in effect.
    pub error_rate: f64,
    pub onr: Option<f64>,
    pub kendall_distance: Option<f64>,
    pub kendall_correlation: Option<f64>,
    pub auc: Option<f64>,
    /// Failure message when the trial errored; metrics are absent then.
    pub error: Option<String>,
}

/// Per (method, axis value) aggregate over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub axis_value: f64,
    pub kendall_distance_mean: Option<f64>,
    pub kendall_distance_std: Option<f64>,
    pub kendall_correlation_mean: Option<f64>,
    pub kendall_correlation_std: Option<f64>,
    pub auc_mean: Option<f64>,
    pub auc_std: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
}

fn holdout_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xB5)
}

struct Holdout {
    phi: crate::solver::FeatureMatrix,
    theta: Vec<f64>,
    pairs: Vec<(usize, usize)>,
}

fn make_holdout(spec: &SweepSpec, trial_spec: &SyntheticSpec) -> Result<Holdout> {
    let hs = holdout_seed(trial_spec.seed);
    let (phi, theta) = generate_test_set(trial_spec, spec.holdout_nodes, hs)?;
    let pairs = sample_pairs(spec.holdout_nodes, spec.holdout_pairs, hs ^ 1)?;
    Ok(Holdout { phi, theta, pairs })
}

fn score_fit(
    result: &FitResult,
    ds: &SyntheticDataset,
    holdout: &Holdout,
    row: &mut TrialRow,
) -> Result<()> {
    let model = result
        .model
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("fit produced no model".into()))?;
    let scores = model.predict(&holdout.phi)?;
    let distance = pair_disagreement(&scores, &holdout.theta, &holdout.pairs)?;
    row.kendall_distance = Some(distance);
    row.kendall_correlation = Some(1.0 - 2.0 * distance);
    if result.outlier_order.n_edges() > 0 {
        let positives = ds.truth_outliers.iter().filter(|&&o| o).count();
        if positives > 0 && positives < ds.truth_outliers.len() {
            let (auc, _) = outlier_roc(&result.outlier_order, &ds.truth_outliers)?;
            row.auc = Some(auc);
        }
    }
    Ok(())
}

fn apply_axis(
    base: &SyntheticSpec,
    pipeline: &PipelineConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<(SyntheticSpec, PipelineConfig)> {
    let mut spec = base.clone();
    let mut cfg = pipeline.clone();
    match axis {
        SweepAxis::Prune => {
            cfg.prune_percent = value;
        }
        SweepAxis::ErrorRate => {
            spec.flip_prob = value;
        }
        SweepAxis::Onr => {
            if spec.sigma <= 0.0 {
                return Err(Error::InvalidConfig(
                    "onr axis needs sigma > 0 in the base spec".into(),
                ));
            }
            spec.outlier_magnitude = Some(value * spec.sigma);
        }
        SweepAxis::Density => {
            let pairs = (value * spec.n_nodes as f64).round() as usize;
            spec.graph = match spec.graph {
                GraphTopology::RandomPairs { .. } => GraphTopology::RandomPairs { pairs },
                GraphTopology::RandomConnected { .. } => {
                    GraphTopology::RandomConnected { pairs }
                }
                GraphTopology::PerPairVotes { votes, .. } => {
                    GraphTopology::PerPairVotes { pairs, votes }
                }
                GraphTopology::Complete => {
                    return Err(Error::InvalidConfig(
                        "density axis needs a pair-sampled topology".into(),
                    ))
                }
            };
        }
    }
    Ok((spec, cfg))
}

fn blank_row(method: Method, seed: u64, value: f64, cfg: &PipelineConfig, spec: &SyntheticSpec) -> TrialRow {
    TrialRow {
        method,
        seed,
        axis_value: value,
        p: cfg.prune_percent,
        error_rate: spec.flip_prob,
        onr: spec.onr(),
        kendall_distance: None,
        kendall_correlation: None,
        auc: None,
        error: None,
    }
}

/// Run one trial group: a dataset shared by all methods.
fn run_group(
    sweep: &SweepSpec,
    axis: SweepAxis,
    value: f64,
    seed: u64,
    methods: &[Method],
) -> Vec<TrialRow> {
    let (trial_spec, cfg) = match apply_axis(&sweep.base, &sweep.pipeline, axis, value) {
        Ok(pair) => pair,
        Err(e) => {
            return methods
                .iter()
                .map(|&m| {
                    let mut row =
                        blank_row(m, seed, value, &sweep.pipeline, &sweep.base);
                    row.error = Some(e.to_string());
                    row
                })
                .collect()
        }
    };
    let trial_spec = SyntheticSpec {
        seed: sweep.base.seed.wrapping_add(seed),
        ..trial_spec
    };
    let prepared = generate(&trial_spec).and_then(|ds| {
        let holdout = make_holdout(sweep, &trial_spec)?;
        Ok((ds, holdout))
    });
    let (ds, holdout) = match prepared {
        Ok(pair) => pair,
        Err(e) => {
            return methods
                .iter()
                .map(|&m| {
                    let mut row = blank_row(m, seed, value, &cfg, &trial_spec);
                    row.error = Some(e.to_string());
                    row
                })
                .collect()
        }
    };

    methods
        .iter()
        .map(|&method| {
            let mut row = blank_row(method, seed, value, &cfg, &trial_spec);
            let method_cfg = PipelineConfig {
                method,
                ..cfg.clone()
            };
            match fit(&ds.graph, &ds.phi, &method_cfg)
                .and_then(|result| score_fit(&result, &ds, &holdout, &mut row))
            {
                Ok(()) => {}
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// Prune-axis trial group: the dataset and the outlier path are independent
/// of the cut, so each method solves one path and replays the cuts.
fn run_prune_group(
    sweep: &SweepSpec,
    values: &[f64],
    seed: u64,
    methods: &[Method],
) -> Vec<TrialRow> {
    let trial_spec = SyntheticSpec {
        seed: sweep.base.seed.wrapping_add(seed),
        ..sweep.base.clone()
    };
    let prepared = generate(&trial_spec).and_then(|ds| {
        let holdout = make_holdout(sweep, &trial_spec)?;
        Ok((ds, holdout))
    });
    let (ds, holdout) = match prepared {
        Ok(pair) => pair,
        Err(e) => {
            let message = e.to_string();
            let mut rows = Vec::with_capacity(methods.len() * values.len());
            for &m in methods {
                for &v in values {
                    let mut row = blank_row(m, seed, v, &sweep.pipeline, &trial_spec);
                    row.p = v;
                    row.error = Some(message.clone());
                    rows.push(row);
                }
            }
            return rows;
        }
    };

    let mut rows = Vec::with_capacity(methods.len() * values.len());
    for &method in methods {
        let uses_path = matches!(method, Method::Urlr | Method::HuberLassoFl);
        if !uses_path {
            // The cut does not apply; one fit serves every axis point.
            let cfg = PipelineConfig {
                method,
                ..sweep.pipeline.clone()
            };
            let fit_outcome = fit(&ds.graph, &ds.phi, &cfg);
            for &v in values {
                let mut row = blank_row(method, seed, v, &cfg, &trial_spec);
                row.p = v;
                match &fit_outcome {
                    Ok(result) => {
                        if let Err(e) = score_fit(result, &ds, &holdout, &mut row) {
                            row.error = Some(e.to_string());
                        }
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
            continue;
        }
        let base_cfg = PipelineConfig {
            method,
            prune_percent: 0.0,
            ..sweep.pipeline.clone()
        };
        match fit(&ds.graph, &ds.phi, &base_cfg) {
            Ok(base_fit) => {
                let full = DesignSystem::new(&ds.graph, &ds.phi)
                    .and_then(|s| s.with_mu(base_cfg.mu));
                for &v in values {
                    let mut row = blank_row(method, seed, v, &base_cfg, &trial_spec);
                    row.p = v;
                    let outcome = full.as_ref().map_err(|e| e.to_string()).and_then(|sys| {
                        let keep = base_fit
                            .outlier_order
                            .prune(v)
                            .map_err(|e| e.to_string())?;
                        let model = sys.fit_beta_pruned(&keep).map_err(|e| e.to_string())?;
                        let replayed = FitResult {
                            model: Some(model),
                            outlier_order: base_fit.outlier_order.clone(),
                            inlier_mask: keep,
                            diagnostics: base_fit.diagnostics,
                        };
                        score_fit(&replayed, &ds, &holdout, &mut row)
                            .map_err(|e| e.to_string())
                    });
                    if let Err(e) = outcome {
                        row.error = Some(e);
                    }
                    rows.push(row);
                }
            }
            Err(e) => {
                for &v in values {
                    let mut row = blank_row(method, seed, v, &base_cfg, &trial_spec);
                    row.p = v;
                    row.error = Some(e.to_string());
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Run the sweep. `jobs` bounds trial concurrency (default: rayon's choice).
pub fn run_sweep(
    sweep: &SweepSpec,
    axis: SweepAxis,
    methods: &[Method],
    n_seeds: u64,
    jobs: Option<usize>,
) -> Result<Vec<TrialRow>> {
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods requested".into()));
    }
    if n_seeds == 0 {
        return Err(Error::InvalidConfig("need at least one seed".into()));
    }
    let values = sweep
        .axis_values
        .clone()
        .unwrap_or_else(|| axis.default_values());
    if values.is_empty() {
        return Err(Error::InvalidConfig("axis grid is empty".into()));
    }

    let work: Vec<u64> = (0..n_seeds).collect();
    let run_all = || -> Vec<TrialRow> {
        if axis == SweepAxis::Prune {
            work.par_iter()
                .flat_map_iter(|&seed| run_prune_group(sweep, &values, seed, methods))
                .collect()
        } else {
            let grid: Vec<(f64, u64)> = values
                .iter()
                .flat_map(|&v| work.iter().map(move |&s| (v, s)))
                .collect();
            grid.par_iter()
                .flat_map_iter(|&(v, s)| run_group(sweep, axis, v, s, methods))
                .collect()
        }
    };
    let mut rows = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    rows.sort_by(|a, b| {
        a.method
            .name()
            .cmp(b.method.name())
            .then(a.seed.cmp(&b.seed))
            .then(a.axis_value.partial_cmp(&b.axis_value).unwrap())
    });
    Ok(rows)
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(std))
}

/// Collapse trial rows into per (method, axis value) means and stds.
pub fn summarize(rows: &[TrialRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, f64)> = rows.iter().map(|r| (r.method, r.axis_value)).collect();
    keys.sort_by(|a, b| {
        a.0.name()
            .cmp(b.0.name())
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    keys.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

    keys.into_iter()
        .map(|(method, value)| {
            let group: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| r.method == method && r.axis_value == value)
                .collect();
            let ok: Vec<&&TrialRow> = group.iter().filter(|r| r.error.is_none()).collect();
            let distances: Vec<f64> = ok.iter().filter_map(|r| r.kendall_distance).collect();
            let correlations: Vec<f64> =
                ok.iter().filter_map(|r| r.kendall_correlation).collect();
            let aucs: Vec<f64> = ok.iter().filter_map(|r| r.auc).collect();
            let (kd_mean, kd_std) = mean_std(&distances);
            let (kc_mean, kc_std) = mean_std(&correlations);
            let (auc_mean, auc_std) = mean_std(&aucs);
            SummaryRow {
                method,
                axis_value: value,
                kendall_distance_mean: kd_mean,
                kendall_distance_std: kd_std,
                kendall_correlation_mean: kc_mean,
                kendall_correlation_std: kc_std,
                auc_mean,
                auc_std,
                n_ok: ok.len(),
                n_failed: group.len() - ok.len(),
            }
        })
        .collect()
}
