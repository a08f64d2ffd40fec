//! Per-layer update cost against network depth.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qperc::baseline_backprop::{count_backprop_ops, gradients, Example, Mlp};
use qperc::measurement::MeasurableOperator;
use qperc::quantum_state::{basis_ket, EncodingMode};
use qperc::trainer::{df_update, LayeredNetwork, OpsCounter};

use crate::config::{ExperimentConfig, Method};
use crate::error::CliError;
use crate::records::{ensure_dir, write_csv};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthRow {
    pub method: Method,
    pub depth: usize,
    pub layer_index: usize,
    pub ops: OpsCounter,
    pub wall_ns: u128,
}

impl DepthRow {
    /// Multiplications plus additions.
    pub fn complex_ops(&self) -> u64 {
        self.ops.total()
    }
}

/// Derivative-free rows come from an instrumented update of every layer of a
/// random network; backprop rows from the gradient cost model. Wall time is
/// measured only when `timing` is set, so default output is deterministic.
pub fn run_depth_bench(cfg: &ExperimentConfig) -> Result<Vec<DepthRow>, CliError> {
    let d = cfg.layer_dim;
    let seed = cfg.seeds[0];
    let m = MeasurableOperator::ElementwiseSigmoid;
    let mut rows = Vec::new();
    for &depth in &cfg.depths {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = LayeredNetwork::random(vec![d; depth + 1], cfg.unitarize_mode, EncodingMode::BasisTensor, &mut rng)?;
        let x = basis_ket(0, d)?;
        let inputs = net.layer_inputs(&x, &m, &mut rng)?;
        let mut times = vec![0u128; depth];
        if cfg.timing {
            for (l, t) in times.iter_mut().enumerate() {
                let started = Instant::now();
                df_update(&net.layers[l], std::slice::from_ref(&inputs[l]), &m, net.mode, &mut rng)?;
                *t = started.elapsed().as_nanos();
            }
        }
        let mut ops = vec![OpsCounter::default(); depth];
        net.step_counted(&x, &m, &mut rng, &mut ops)?;
        for (l, o) in ops.into_iter().enumerate() {
            rows.push(DepthRow {
                method: Method::DerivativeFree,
                depth,
                layer_index: l,
                ops: o,
                wall_ns: times[l],
            });
        }

        let mlp = Mlp::random(&vec![d; depth + 1], &mut rng)?;
        let batch: Vec<Example> = vec![(vec![1.0; d], vec![0.0; d])];
        for l in 0..depth {
            let wall_ns = if cfg.timing {
                // Layer l's gradient needs the whole backward pass.
                let started = Instant::now();
                gradients(&mlp, &batch)?;
                started.elapsed().as_nanos()
            } else {
                0
            };
            rows.push(DepthRow {
                method: Method::Backprop,
                depth,
                layer_index: l,
                ops: count_backprop_ops(&mlp, l, batch.len())?,
                wall_ns,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.method
            .as_str()
            .cmp(b.method.as_str())
            .then(a.depth.cmp(&b.depth))
            .then(a.layer_index.cmp(&b.layer_index))
    });
    Ok(rows)
}

pub fn cmd_depth_bench(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let rows = run_depth_bench(cfg)?;
    ensure_dir(&cfg.output_dir)?;
    let out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.as_str().to_string(),
                r.depth.to_string(),
                r.layer_index.to_string(),
                r.complex_ops().to_string(),
                r.wall_ns.to_string(),
            ]
        })
        .collect();
    write_csv(
        &cfg.output_dir.join("depth.csv"),
        &["method", "depth", "layer_index", "complex_ops", "wall_ns"],
        &out,
    )
}
