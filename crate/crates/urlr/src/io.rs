//! File formats: label/feature/graph CSVs, plain-text models, path dumps,
//! metrics CSVs, result JSON and run manifests.
//!
//! Floats are written with Rust's shortest round-trip formatting so outputs
//! are diff-friendly and byte-stable across reruns.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{AnnotationRecord, ComparisonGraph};
use crate::lasso::OutlierPath;
use crate::pipeline::{Diagnostics, Method, PipelineConfig};
use crate::solver::{FeatureMatrix, RankModel};
use crate::sweep::{SummaryRow, SweepAxis, TrialRow};
use crate::synth::SyntheticDataset;

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| parse_err(path, 0, e.to_string()))
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    idx: usize,
    what: &str,
) -> Result<T> {
    let line = record_line(record);
    let raw = record
        .get(idx)
        .ok_or_else(|| parse_err(path, line, format!("missing {what} column")))?;
    raw.trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what}: '{raw}'")))
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// Labels: `preferred,other[,annotator]`
// ---------------------------------------------------------------------------

pub fn read_labels_csv(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    if headers.len() < 2
        || headers.get(0).map(str::trim) != Some("preferred")
        || headers.get(1).map(str::trim) != Some("other")
    {
        return Err(parse_err(
            path,
            1,
            "expected header 'preferred,other[,annotator]'",
        ));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(path, 0, e.to_string()))?;
        let preferred = parse_field(path, &row, 0, "preferred id")?;
        let other = parse_field(path, &row, 1, "other id")?;
        let annotator = row
            .get(2)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from);
        records.push(AnnotationRecord {
            preferred,
            other,
            annotator,
        });
    }
    Ok(records)
}

pub fn write_labels_csv(path: impl AsRef<Path>, records: &[AnnotationRecord]) -> Result<()> {
    let mut out = String::from("preferred,other,annotator\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.preferred,
            r.other,
            r.annotator.as_deref().unwrap_or("")
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Aggregated graph: `src,dst,weight`
// ---------------------------------------------------------------------------

pub fn write_graph_csv(path: impl AsRef<Path>, graph: &ComparisonGraph) -> Result<()> {
    let mut out = String::from("src,dst,weight\n");
    for e in graph.edges() {
        out.push_str(&format!("{},{},{}\n", e.src, e.dst, e.weight));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_graph_csv(path: impl AsRef<Path>, n_nodes: usize) -> Result<ComparisonGraph> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["src", "dst", "weight"] {
        return Err(parse_err(path, 1, "expected header 'src,dst,weight'"));
    }
    let mut triples = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(path, 0, e.to_string()))?;
        let src = parse_field(path, &row, 0, "src")?;
        let dst = parse_field(path, &row, 1, "dst")?;
        let weight = parse_field(path, &row, 2, "weight")?;
        triples.push((src, dst, weight));
    }
    ComparisonGraph::from_edges(n_nodes, triples)
}

// ---------------------------------------------------------------------------
// Features: `id,f0,f1,...`, rows sorted by id covering 0..N-1
// ---------------------------------------------------------------------------

pub fn read_features_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    if headers.get(0).map(str::trim) != Some("id") || headers.len() < 2 {
        return Err(parse_err(path, 1, "expected header 'id,f0,f1,...'"));
    }
    let d = headers.len() - 1;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(path, 0, e.to_string()))?;
        let id: usize = parse_field(path, &row, 0, "id")?;
        if id != rows.len() {
            return Err(Error::MissingFeatureRow(rows.len()));
        }
        if row.len() != d + 1 {
            return Err(parse_err(
                path,
                record_line(&row),
                format!("expected {} feature values, found {}", d, row.len() - 1),
            ));
        }
        let mut values = Vec::with_capacity(d);
        for j in 0..d {
            values.push(parse_field(path, &row, j + 1, "feature value")?);
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "feature file has no rows"));
    }
    FeatureMatrix::from_rows(&rows)
}

pub fn write_features_csv(path: impl AsRef<Path>, phi: &FeatureMatrix) -> Result<()> {
    let mut header = String::from("id");
    for j in 0..phi.n_cols() {
        header.push_str(&format!(",f{j}"));
    }
    header.push('\n');
    let mut out = header;
    for i in 0..phi.n_rows() {
        out.push_str(&i.to_string());
        for v in phi.row(i) {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Model: plain-text key-value plus one coefficient per line
// ---------------------------------------------------------------------------

pub fn write_model(path: impl AsRef<Path>, model: &RankModel) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("mu {}\n", fmt_f64(model.mu)));
    out.push_str(&format!("dim {}\n", model.dim()));
    out.push_str("beta\n");
    for b in &model.beta {
        out.push_str(&fmt_f64(*b));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<RankModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut mu = None;
    let mut dim = None;
    let mut beta = Vec::new();
    let mut in_beta = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = (i + 1) as u64;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if in_beta {
            beta.push(
                line.parse::<f64>()
                    .map_err(|_| parse_err(path, line_no, format!("invalid coefficient '{line}'")))?,
            );
        } else if let Some(rest) = line.strip_prefix("mu ") {
            mu = Some(rest.parse::<f64>().map_err(|_| {
                parse_err(path, line_no, format!("invalid mu '{rest}'"))
            })?);
        } else if let Some(rest) = line.strip_prefix("dim ") {
            dim = Some(rest.parse::<usize>().map_err(|_| {
                parse_err(path, line_no, format!("invalid dim '{rest}'"))
            })?);
        } else if line == "beta" {
            in_beta = true;
        } else {
            return Err(parse_err(path, line_no, format!("unexpected line '{line}'")));
        }
    }
    let mu = mu.ok_or_else(|| parse_err(path, 0, "missing 'mu'"))?;
    let dim = dim.ok_or_else(|| parse_err(path, 0, "missing 'dim'"))?;
    if beta.len() != dim {
        return Err(parse_err(
            path,
            0,
            format!("dim says {dim} coefficients, found {}", beta.len()),
        ));
    }
    Ok(RankModel { beta, mu })
}

// ---------------------------------------------------------------------------
// Scores: `id,score`
// ---------------------------------------------------------------------------

pub fn write_scores_csv(path: impl AsRef<Path>, scores: &[f64]) -> Result<()> {
    let mut out = String::from("id,score\n");
    for (i, s) in scores.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f64(*s)));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_scores_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["id", "score"] {
        return Err(parse_err(path, 1, "expected header 'id,score'"));
    }
    let mut scores = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(path, 0, e.to_string()))?;
        let id: usize = parse_field(path, &row, 0, "id")?;
        if id != scores.len() {
            return Err(parse_err(
                path,
                record_line(&row),
                format!("ids must be sorted and contiguous; expected {}", scores.len()),
            ));
        }
        scores.push(parse_field(path, &row, 1, "score")?);
    }
    Ok(scores)
}

// ---------------------------------------------------------------------------
// Outlier truth: `edge_index,is_outlier`
// ---------------------------------------------------------------------------

pub fn write_truth_outliers_csv(path: impl AsRef<Path>, truth: &[bool]) -> Result<()> {
    let mut out = String::from("edge_index,is_outlier\n");
    for (k, &t) in truth.iter().enumerate() {
        out.push_str(&format!("{k},{}\n", t as u8));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_truth_outliers_csv(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["edge_index", "is_outlier"] {
        return Err(parse_err(path, 1, "expected header 'edge_index,is_outlier'"));
    }
    let mut truth = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(path, 0, e.to_string()))?;
        let idx: usize = parse_field(path, &row, 0, "edge_index")?;
        if idx != truth.len() {
            return Err(parse_err(
                path,
                record_line(&row),
                "edge indices must be sorted and contiguous",
            ));
        }
        let flag: u8 = parse_field(path, &row, 1, "is_outlier")?;
        truth.push(flag != 0);
    }
    Ok(truth)
}

// ---------------------------------------------------------------------------
// Outlier path dump: `edge_index,src,dst,activation_lambda,rank`
// ---------------------------------------------------------------------------

pub fn write_path_csv(
    path: impl AsRef<Path>,
    outlier_path: &OutlierPath,
    graph: &ComparisonGraph,
) -> Result<()> {
    let ranks = outlier_path.ranks();
    let mut out = String::from("edge_index,src,dst,activation_lambda,rank\n");
    for (k, e) in graph.edges().iter().enumerate() {
        out.push_str(&format!(
            "{k},{},{},{},{}\n",
            e.src,
            e.dst,
            fmt_f64(outlier_path.activation_lambda[k]),
            ranks[k]
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Rebuild enough of a path (activations and order) to score detection.
pub fn read_path_csv(path: impl AsRef<Path>) -> Result<OutlierPath> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>()
        != ["edge_index", "src", "dst", "activation_lambda", "rank"]
    {
        return Err(parse_err(
            path,
            1,
            "expected header 'edge_index,src,dst,activation_lambda,rank'",
        ));
    }
    let mut activation = Vec::new();
    let mut ranked: Vec<(usize, usize)> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(path, 0, e.to_string()))?;
        let idx: usize = parse_field(path, &row, 0, "edge_index")?;
        if idx != activation.len() {
            return Err(parse_err(
                path,
                record_line(&row),
                "edge indices must be sorted and contiguous",
            ));
        }
        activation.push(parse_field::<f64>(path, &row, 3, "activation_lambda")?);
        ranked.push((parse_field::<usize>(path, &row, 4, "rank")?, idx));
    }
    ranked.sort_unstable();
    let order = ranked.into_iter().map(|(_, idx)| idx).collect();
    Ok(OutlierPath::from_parts(activation, order))
}

/// Pruned edges only: `edge_index,src,dst,weight`.
pub fn write_pruned_edges_csv(
    path: impl AsRef<Path>,
    graph: &ComparisonGraph,
    inlier_mask: &[bool],
) -> Result<()> {
    let mut out = String::from("edge_index,src,dst,weight\n");
    for (k, e) in graph.edges().iter().enumerate() {
        if !inlier_mask[k] {
            out.push_str(&format!("{k},{},{},{}\n", e.src, e.dst, e.weight));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Metrics / sweep CSVs
// ---------------------------------------------------------------------------

/// One row of the `method,seed,p,error_rate,onr,kendall_distance,auc` schema.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsRow {
    pub method: String,
    pub seed: Option<u64>,
    pub p: Option<f64>,
    pub error_rate: Option<f64>,
    pub onr: Option<f64>,
    pub kendall_distance: Option<f64>,
    pub auc: Option<f64>,
}

pub const METRICS_HEADER: &str = "method,seed,p,error_rate,onr,kendall_distance,auc";

fn opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_metrics_csv(path: impl AsRef<Path>, rows: &[MetricsRow]) -> Result<()> {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method,
            opt_u64(r.seed),
            opt_f64(r.p),
            opt_f64(r.error_rate),
            opt_f64(r.onr),
            opt_f64(r.kendall_distance),
            opt_f64(r.auc),
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

pub const CURVES_HEADER: &str =
    "axis,axis_value,method,seed,p,error_rate,onr,kendall_distance,kendall_correlation,auc,error";

/// Per-trial curve dump for one sweep axis.
pub fn write_curves_csv(
    path: impl AsRef<Path>,
    axis: SweepAxis,
    rows: &[TrialRow],
) -> Result<()> {
    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            axis.name(),
            fmt_f64(r.axis_value),
            r.method.name(),
            r.seed,
            fmt_f64(r.p),
            fmt_f64(r.error_rate),
            opt_f64(r.onr),
            opt_f64(r.kendall_distance),
            opt_f64(r.kendall_correlation),
            opt_f64(r.auc),
            r.error
                .as_deref()
                .map(|e| e.replace([',', '\n'], ";"))
                .unwrap_or_default(),
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

pub const SUMMARY_HEADER: &str = "axis,axis_value,method,kendall_distance_mean,kendall_distance_std,kendall_correlation_mean,kendall_correlation_std,auc_mean,auc_std,n_ok,n_failed";

pub fn write_summary_csv(
    path: impl AsRef<Path>,
    axis: SweepAxis,
    rows: &[SummaryRow],
) -> Result<()> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            axis.name(),
            fmt_f64(r.axis_value),
            r.method.name(),
            opt_f64(r.kendall_distance_mean),
            opt_f64(r.kendall_distance_std),
            opt_f64(r.kendall_correlation_mean),
            opt_f64(r.kendall_correlation_std),
            opt_f64(r.auc_mean),
            opt_f64(r.auc_std),
            r.n_ok,
            r.n_failed,
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Result JSON and run manifest
// ---------------------------------------------------------------------------

/// Fit summary written next to the model file. Key order is fixed by
/// declaration order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub method: Method,
    pub config: PipelineConfig,
    pub model_file: String,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_pruned: usize,
    pub pruned_edges: Vec<usize>,
    pub diagnostics: Diagnostics,
    pub metrics: FitMetrics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitMetrics {
    /// Largest grid lambda of the outlier path, when one was computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    pub n_grid: usize,
    pub total_votes: u64,
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Reproducibility record for one CLI run. The manifest itself carries
/// timings, so byte-identity is promised for the data outputs, not for it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub config: serde_json::Value,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Export a synthetic dataset in the pipeline's input formats, plus truth
/// files for evaluation.
pub fn write_dataset(dir: impl AsRef<Path>, ds: &SyntheticDataset) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_labels_csv(dir.join("labels.csv"), &ds.records())?;
    write_features_csv(dir.join("features.csv"), &ds.phi)?;
    write_graph_csv(dir.join("graph.csv"), &ds.graph)?;
    write_truth_outliers_csv(dir.join("truth.csv"), &ds.truth_outliers)?;
    write_scores_csv(dir.join("truth_scores.csv"), &ds.truth_theta.theta)?;
    Ok(())
}
