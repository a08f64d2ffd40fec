//! Trains one method on a dataset file and dumps run records and final weights.

use std::fmt::Write as _;
use std::path::Path;

use qperc::baseline_backprop::Mlp;
use qperc::dataset::Dataset;
use qperc::trainer::LayeredNetwork;

use super::{backprop_run, derivative_free_run, Run, RUN_HEADER};
use crate::config::{ExperimentConfig, Method};
use crate::data_file;
use crate::error::{io_error, CliError};
use crate::records::{ensure_dir, fmt_f64, write_csv};

pub enum Trained {
    DerivativeFree(LayeredNetwork),
    Backprop(Mlp),
}

/// Runs every configured seed. Backprop uses the first listed learning rate.
pub fn run_train(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<(Run, Trained)>, CliError> {
    cfg.seeds
        .iter()
        .map(|&seed| match cfg.method {
            Method::DerivativeFree => {
                derivative_free_run(dataset, cfg, seed).map(|(r, res)| (r, Trained::DerivativeFree(res.network)))
            }
            Method::Backprop => {
                backprop_run(dataset, cfg, seed, cfg.learning_rates[0]).map(|(r, res)| (r, Trained::Backprop(res.mlp)))
            }
        })
        .collect()
}

/// Plain-text weights: a `# layer` comment line, then one matrix row per line
/// with `re,im` entries separated by spaces.
pub fn weights_dump(model: &Trained) -> String {
    let mut out = String::new();
    match model {
        Trained::DerivativeFree(net) => {
            for (l, w) in net.layers.iter().enumerate() {
                let _ = writeln!(out, "# layer {l} weights {}x{}", w.rows(), w.cols());
                let _ = write!(out, "{w}");
            }
        }
        Trained::Backprop(mlp) => {
            for (l, layer) in mlp.layers().iter().enumerate() {
                let (r, c) = layer.w.shape();
                let _ = writeln!(out, "# layer {l} weights {r}x{c}");
                for i in 0..r {
                    let row: Vec<String> = layer.w.row(i).iter().map(|&v| format!("{},{}", fmt_f64(v), fmt_f64(0.0))).collect();
                    let _ = writeln!(out, "{}", row.join(" "));
                }
                let _ = writeln!(out, "# layer {l} bias {r}x1");
                for &b in &layer.b {
                    let _ = writeln!(out, "{},{}", fmt_f64(b), fmt_f64(0.0));
                }
            }
        }
    }
    out
}

pub fn cmd_train(cfg: &ExperimentConfig, dataset_path: &Path) -> Result<(), CliError> {
    let dataset = data_file::load(dataset_path)?;
    let runs = run_train(cfg, &dataset)?;
    ensure_dir(&cfg.output_dir)?;
    let rows: Vec<Vec<String>> = runs.iter().flat_map(|(r, _)| r.records()).collect();
    write_csv(&cfg.output_dir.join("runs.csv"), &RUN_HEADER, &rows)?;
    for (run, model) in &runs {
        let path = cfg.output_dir.join(format!("weights-s{}.txt", run.seed));
        std::fs::write(&path, weights_dump(model)).map_err(|e| io_error(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_dataset_trains_and_dumps() {
        let cfg = ExperimentConfig {
            layer_dims: vec![2, 2],
            seeds: vec![3],
            max_iterations: 4,
            ..ExperimentConfig::default()
        };
        let runs = run_train(&cfg, &Dataset::identity()).unwrap();
        assert_eq!(runs[0].0.loss.len(), 4);
        let dump = weights_dump(&runs[0].1);
        assert!(dump.starts_with("# layer 0 weights 2x2\n"));
        assert_eq!(dump.lines().count(), 1 + 2);
    }

    #[test]
    fn backprop_dump_has_biases() {
        let cfg = ExperimentConfig {
            method: Method::Backprop,
            seeds: vec![1],
            max_iterations: 3,
            ..ExperimentConfig::default()
        };
        let runs = run_train(&cfg, &Dataset::xor()).unwrap();
        let dump = weights_dump(&runs[0].1);
        assert!(dump.contains("# layer 1 bias 1x1"));
    }

    #[test]
    fn mismatched_widths_are_usage_errors() {
        let cfg = ExperimentConfig::default();
        let err = run_train(&cfg, &Dataset::identity()).err().unwrap();
        assert_eq!(err.exit_code(), 2);
    }
}
