//! Derivative-free versus backprop on the XOR truth table.

use qperc::dataset::Dataset;
use qperc::metrics::median;

use super::{backprop_run, derivative_free_run, Run, RUN_HEADER};
use crate::config::{ExperimentConfig, Method};
use crate::error::CliError;
use crate::records::{ensure_dir, fmt_f64, fmt_opt, write_csv};

/// Aggregate over the seeds of one method (and learning rate).
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub learning_rate: Option<f64>,
    pub selected: bool,
    pub runs: usize,
    pub reached: usize,
    pub median_iterations_to_accuracy: f64,
    pub median_iterations_to_plateau: f64,
    pub median_final_loss: f64,
    /// Derivative-free only: share of seeds where it reaches 100% strictly
    /// earlier than the selected backprop run on the same seed.
    pub paired_faster_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct XorBench {
    pub derivative_free: Vec<Run>,
    /// One entry per swept learning rate, in config order.
    pub backprop: Vec<(f64, Vec<Run>)>,
    pub best_learning_rate: f64,
    pub summaries: Vec<MethodSummary>,
    pub max_iterations: usize,
}

impl XorBench {
    pub fn best_backprop(&self) -> &[Run] {
        &self
            .backprop
            .iter()
            .find(|(lr, _)| *lr == self.best_learning_rate)
            .expect("best rate is one of the swept rates")
            .1
    }
}

/// Iteration count with "never" mapped past the cap, so it sorts last.
pub fn censored(it: Option<usize>, max_iterations: usize) -> f64 {
    it.map_or((max_iterations + 1) as f64, |i| i as f64)
}

fn summarize(method: Method, learning_rate: Option<f64>, runs: &[Run], max_iterations: usize) -> MethodSummary {
    let acc: Vec<f64> = runs.iter().map(|r| censored(r.first_perfect, max_iterations)).collect();
    let plateau: Vec<f64> = runs.iter().map(|r| censored(r.plateau, max_iterations)).collect();
    let loss: Vec<f64> = runs.iter().map(Run::final_loss).collect();
    MethodSummary {
        method,
        learning_rate,
        selected: false,
        runs: runs.len(),
        reached: runs.iter().filter(|r| r.first_perfect.is_some()).count(),
        median_iterations_to_accuracy: median(&acc).unwrap_or(f64::NAN),
        median_iterations_to_plateau: median(&plateau).unwrap_or(f64::NAN),
        median_final_loss: median(&loss).unwrap_or(f64::NAN),
        paired_faster_fraction: None,
    }
}

pub fn run_xor_bench(cfg: &ExperimentConfig) -> Result<XorBench, CliError> {
    let data = Dataset::xor();
    let df: Vec<Run> = cfg
        .seeds
        .iter()
        .map(|&s| derivative_free_run(&data, cfg, s).map(|r| r.0))
        .collect::<Result<_, _>>()?;
    let mut bp = Vec::new();
    for &lr in &cfg.learning_rates {
        let runs: Vec<Run> = cfg
            .seeds
            .iter()
            .map(|&s| backprop_run(&data, cfg, s, lr).map(|r| r.0))
            .collect::<Result<_, _>>()?;
        bp.push((lr, runs));
    }
    let max = cfg.max_iterations;
    let mut bp_summaries: Vec<MethodSummary> = bp
        .iter()
        .map(|(lr, runs)| summarize(Method::Backprop, Some(*lr), runs, max))
        .collect();
    let best = (0..bp_summaries.len())
        .min_by(|&a, &b| {
            let (x, y) = (&bp_summaries[a], &bp_summaries[b]);
            x.median_iterations_to_accuracy
                .total_cmp(&y.median_iterations_to_accuracy)
                .then(x.median_final_loss.total_cmp(&y.median_final_loss))
                .then(x.learning_rate.unwrap_or(0.0).total_cmp(&y.learning_rate.unwrap_or(0.0)))
        })
        .expect("at least one learning rate");
    bp_summaries[best].selected = true;
    let best_runs = &bp[best].1;
    let faster = df
        .iter()
        .zip(best_runs)
        .filter(|(d, b)| censored(d.first_perfect, max) < censored(b.first_perfect, max))
        .count();
    let mut df_summary = summarize(Method::DerivativeFree, None, &df, max);
    df_summary.selected = true;
    df_summary.paired_faster_fraction = Some(faster as f64 / df.len() as f64);
    let mut summaries = vec![df_summary];
    summaries.extend(bp_summaries);
    Ok(XorBench {
        best_learning_rate: bp[best].0,
        derivative_free: df,
        backprop: bp,
        summaries,
        max_iterations: max,
    })
}

pub fn write_xor_bench(bench: &XorBench, cfg: &ExperimentConfig) -> Result<(), CliError> {
    ensure_dir(&cfg.output_dir)?;
    let mut rows = Vec::new();
    // Sorted by (method, learning rate, seed, iteration).
    let mut all: Vec<&Run> = bench.backprop.iter().flat_map(|(_, r)| r).chain(&bench.derivative_free).collect();
    all.sort_by(|a, b| {
        a.method
            .as_str()
            .cmp(b.method.as_str())
            .then(a.learning_rate.unwrap_or(0.0).total_cmp(&b.learning_rate.unwrap_or(0.0)))
            .then(a.seed.cmp(&b.seed))
    });
    for run in all {
        rows.extend(run.records());
    }
    write_csv(&cfg.output_dir.join("runs.csv"), &RUN_HEADER, &rows)?;

    let summary: Vec<Vec<String>> = bench
        .summaries
        .iter()
        .map(|s| {
            vec![
                s.method.as_str().to_string(),
                fmt_opt(s.learning_rate),
                s.selected.to_string(),
                s.runs.to_string(),
                s.reached.to_string(),
                fmt_f64(s.median_iterations_to_accuracy),
                fmt_f64(s.median_iterations_to_plateau),
                fmt_f64(s.median_final_loss),
                s.paired_faster_fraction.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(
        &cfg.output_dir.join("summary.csv"),
        &[
            "method",
            "learning_rate",
            "selected",
            "runs",
            "reached",
            "median_iterations_to_accuracy",
            "median_iterations_to_plateau",
            "median_final_loss",
            "paired_faster_fraction",
        ],
        &summary,
    )
}

pub fn cmd_xor_bench(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let bench = run_xor_bench(cfg)?;
    log::info!(
        "derivative-free median iterations to 100%: {}; backprop best learning rate {}",
        bench.summaries[0].median_iterations_to_accuracy,
        bench.best_learning_rate
    );
    write_xor_bench(&bench, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            seeds: vec![0, 1, 2],
            max_iterations: 20,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn best_rate_is_the_argmin_of_the_sweep() {
        let bench = run_xor_bench(&small()).unwrap();
        let bp: Vec<&MethodSummary> = bench.summaries.iter().filter(|s| s.method == Method::Backprop).collect();
        assert_eq!(bp.len(), 3);
        assert_eq!(bp.iter().filter(|s| s.selected).count(), 1);
        let chosen = bp.iter().find(|s| s.selected).unwrap();
        for s in &bp {
            assert!(chosen.median_iterations_to_accuracy <= s.median_iterations_to_accuracy);
        }
        assert_eq!(chosen.learning_rate, Some(bench.best_learning_rate));
        assert_eq!(bench.best_backprop().len(), 3);
    }

    #[test]
    fn censoring() {
        assert_eq!(censored(None, 100), 101.0);
        assert_eq!(censored(Some(7), 100), 7.0);
    }
}
