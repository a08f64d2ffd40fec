pub mod depth;
pub mod markov;
pub mod train;
pub mod xor;

use qperc::baseline_backprop::{train_backprop, BackpropConfig, BackpropResult};
use qperc::dataset::Dataset;
use qperc::metrics::{first_perfect, plateau_onset};
use qperc::trainer::{train, TrainResult, PLATEAU_WINDOW};

use crate::config::{ExperimentConfig, Method};
use crate::error::CliError;
use crate::records::{fmt_f64, fmt_opt};

/// Histories of one training run plus its headline iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub method: Method,
    pub learning_rate: Option<f64>,
    pub seed: u64,
    pub loss: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub table_loss: Vec<f64>,
    pub table_accuracy: Vec<f64>,
    /// First iteration at which every dataset row is correct.
    pub first_perfect: Option<usize>,
    /// Iteration at which the dataset loss plateaus.
    pub plateau: Option<usize>,
}

impl Run {
    pub fn run_id(&self) -> String {
        match self.learning_rate {
            Some(lr) => format!("{}-lr{lr}-s{}", self.method.as_str(), self.seed),
            None => format!("{}-s{}", self.method.as_str(), self.seed),
        }
    }

    pub fn final_loss(&self) -> f64 {
        self.table_loss.last().copied().unwrap_or(f64::NAN)
    }

    /// CSV rows, iterations numbered from 1.
    pub fn records(&self) -> Vec<Vec<String>> {
        (0..self.loss.len())
            .map(|i| {
                vec![
                    self.run_id(),
                    self.method.as_str().to_string(),
                    fmt_opt(self.learning_rate),
                    self.seed.to_string(),
                    (i + 1).to_string(),
                    fmt_f64(self.loss[i]),
                    fmt_f64(self.accuracy[i]),
                    fmt_f64(self.table_loss[i]),
                    fmt_f64(self.table_accuracy[i]),
                ]
            })
            .collect()
    }
}

pub const RUN_HEADER: [&str; 9] = [
    "run_id",
    "method",
    "learning_rate",
    "seed",
    "iteration",
    "loss",
    "accuracy",
    "table_loss",
    "table_accuracy",
];

pub fn derivative_free_run(dataset: &Dataset, cfg: &ExperimentConfig, seed: u64) -> Result<(Run, TrainResult), CliError> {
    let res = train(dataset, &cfg.trainer_config(seed)?)?;
    let run = Run {
        method: Method::DerivativeFree,
        learning_rate: None,
        seed,
        loss: res.loss_history.clone(),
        accuracy: res.accuracy_history.clone(),
        table_loss: res.table_loss_history.clone(),
        table_accuracy: res.table_accuracy_history.clone(),
        first_perfect: res.first_perfect(),
        plateau: res.converged_at,
    };
    Ok((run, res))
}

pub fn backprop_run(
    dataset: &Dataset,
    cfg: &ExperimentConfig,
    seed: u64,
    learning_rate: f64,
) -> Result<(Run, BackpropResult), CliError> {
    let bp = BackpropConfig {
        layer_dims: cfg.baseline_layer_dims.clone(),
        learning_rate,
        max_iterations: cfg.max_iterations,
        accuracy_cutoff: cfg.cutoff,
        seed,
    };
    let res = train_backprop(dataset, &bp)?;
    let run = Run {
        method: Method::Backprop,
        learning_rate: Some(learning_rate),
        seed,
        loss: res.loss_history.clone(),
        accuracy: res.accuracy_history.clone(),
        table_loss: res.table_loss_history.clone(),
        table_accuracy: res.table_accuracy_history.clone(),
        first_perfect: first_perfect(&res.table_accuracy_history),
        plateau: plateau_onset(&res.table_loss_history, cfg.convergence_eps, PLATEAU_WINDOW),
    };
    Ok((run, res))
}
