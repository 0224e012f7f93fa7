//! Temporary diagnostics; removed before shipping.

use std::time::Instant;

use urlr::pipeline::{fit_urlr, Method, PipelineConfig};
use urlr::sweep::{run_sweep, summarize, SweepAxis, SweepSpec};
use urlr::synth::{
    condorcet_fixture, FixtureVariant, GraphTopology, SyntheticSpec, ThetaSource,
};

fn main() {
    // Criterion 1: fixture A ordering.
    let t0 = Instant::now();
    let ds = condorcet_fixture(FixtureVariant::A);
    let cfg = PipelineConfig {
        prune_percent: 50.0,
        ..PipelineConfig::default()
    };
    let r = fit_urlr(&ds.graph, &ds.phi, &cfg).unwrap();
    let names = ["A", "B", "C", "D", "E"];
    let order: Vec<String> = r
        .outlier_order
        .order
        .iter()
        .map(|&e| {
            let edge = ds.graph.edges()[e];
            format!("{}->{}", names[edge.src], names[edge.dst])
        })
        .collect();
    println!("fixture A outlier order: {order:?} ({:?})", t0.elapsed());

    // Criterion 2: fixture C.
    let ds_c = condorcet_fixture(FixtureVariant::C);
    let r_c = fit_urlr(&ds_c.graph, &ds_c.phi, &cfg).unwrap();
    let first = ds_c.graph.edges()[r_c.outlier_order.order[0]];
    println!("fixture C first: {}->{}", names[first.src], names[first.dst]);

    // Criterion 4: error-ratio sweep, n=300, 2000 pairs, p=25, 10 seeds.
    let t0 = Instant::now();
    let spec4 = SweepSpec {
        base: SyntheticSpec {
            n_nodes: 300,
            feature_dim: 10,
            graph: GraphTopology::RandomPairs { pairs: 2000 },
            theta_source: ThetaSource::Uniform,
            sigma: 0.0,
            outlier_magnitude: None,
            seed: 4000,
            ..SyntheticSpec::default()
        },
        pipeline: PipelineConfig {
            prune_percent: 25.0,
            ..PipelineConfig::default()
        },
        axis_values: Some(vec![0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35]),
        holdout_nodes: 60,
        holdout_pairs: 200,
    };
    let rows = run_sweep(
        &spec4,
        SweepAxis::ErrorRate,
        &[Method::Urlr, Method::HuberLassoFl, Method::Raw],
        10,
        None,
    )
    .unwrap();
    let n_err = rows.iter().filter(|r| r.error.is_some()).count();
    println!("criterion4 sweep: {} rows, {} errors, {:?}", rows.len(), n_err, t0.elapsed());
    for s in summarize(&rows) {
        println!(
            "  err={:.2} {:<14} corr_mean={:+.4} corr_std={:.4} auc={:?} ok={} fail={}",
            s.axis_value,
            s.method.name(),
            s.kendall_correlation_mean.unwrap_or(f64::NAN),
            s.kendall_correlation_std.unwrap_or(f64::NAN),
            s.auc_mean.map(|a| (a * 1000.0).round() / 1000.0),
            s.n_ok,
            s.n_failed,
        );
    }

    // Criterion 5: sparse graph advantage, |E| = 1.2 |V|.
    let t0 = Instant::now();
    let spec5 = SweepSpec {
        base: SyntheticSpec {
            n_nodes: 300,
            feature_dim: 10,
            graph: GraphTopology::RandomConnected { pairs: 360 },
            theta_source: ThetaSource::Uniform,
            sigma: 0.0,
            outlier_magnitude: None,
            flip_prob: 0.25,
            seed: 5000,
            ..SyntheticSpec::default()
        },
        pipeline: PipelineConfig {
            prune_percent: 25.0,
            ..PipelineConfig::default()
        },
        axis_values: Some(vec![25.0]),
        holdout_nodes: 60,
        holdout_pairs: 200,
    };
    let rows = run_sweep(
        &spec5,
        SweepAxis::Prune,
        &[Method::Urlr, Method::HuberLassoFl],
        10,
        None,
    )
    .unwrap();
    let mean_auc = |m: Method| {
        let v: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == m)
            .filter_map(|r| r.auc)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    println!(
        "criterion5: urlr auc {:.3}, fl auc {:.3}, gap {:.3} ({:?})",
        mean_auc(Method::Urlr),
        mean_auc(Method::HuberLassoFl),
        mean_auc(Method::Urlr) - mean_auc(Method::HuberLassoFl),
        t0.elapsed()
    );

    // Criterion 6: prune curve shape, 25% planted outliers + noise.
    let t0 = Instant::now();
    for sigma in [0.1, 0.15, 0.2] {
        let spec6 = SweepSpec {
            base: SyntheticSpec {
                n_nodes: 60,
                feature_dim: 10,
                graph: GraphTopology::Complete,
                theta_source: ThetaSource::Uniform,
                sigma,
                outlier_magnitude: None,
                flip_prob: 0.25,
                seed: 6000,
                ..SyntheticSpec::default()
            },
            pipeline: PipelineConfig::default(),
            axis_values: Some(vec![0.0, 10.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0]),
            holdout_nodes: 60,
            holdout_pairs: 200,
        };
        let rows = run_sweep(&spec6, SweepAxis::Prune, &[Method::Urlr], 10, None).unwrap();
        let summary = summarize(&rows);
        let curve: Vec<(f64, f64)> = summary
            .iter()
            .map(|s| (s.axis_value, s.kendall_distance_mean.unwrap()))
            .collect();
        println!("criterion6 sigma={sigma}: {curve:?}");
    }
    println!("criterion6 took {:?}", t0.elapsed());

    // Criterion 9: majority crossover, 5 votes per pair, mixed errors.
    let t0 = Instant::now();
    let spec9 = SweepSpec {
        base: SyntheticSpec {
            n_nodes: 100,
            feature_dim: 10,
            graph: GraphTopology::PerPairVotes {
                pairs: 500,
                votes: 5,
            },
            theta_source: ThetaSource::Uniform,
            sigma: 0.0,
            error_model: urlr::synth::ErrorModel::mixed_default(),
            seed: 9000,
            ..SyntheticSpec::default()
        },
        pipeline: PipelineConfig::default(),
        axis_values: Some(vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0]),
        holdout_nodes: 60,
        holdout_pairs: 200,
    };
    let rows = run_sweep(
        &spec9,
        SweepAxis::Prune,
        &[Method::Urlr, Method::MajorityVote, Method::Raw],
        10,
        None,
    )
    .unwrap();
    for s in summarize(&rows) {
        println!(
            "  p={:>4} {:<14} dist_mean={:.4} fail={}",
            s.axis_value,
            s.method.name(),
            s.kendall_distance_mean.unwrap_or(f64::NAN),
            s.n_failed
        );
    }
    println!("criterion9 took {:?}", t0.elapsed());
}
