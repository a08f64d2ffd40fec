//! Classical sigmoid perceptron network trained by backpropagation on the
//! average L1 error. Used as the comparison baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{bits_to_reals, Dataset};
use crate::error::{Error, Result};
use crate::measurement::sigmoid;
use crate::metrics::{mean_l1, score_set, thresholded_correct, OpsCounter};
use crate::real::RealMatrix;

/// `a' = sigmoid(w a + b)` with `w` of shape `out × in`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    pub w: RealMatrix,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

/// Activations of every layer; `activations[0]` is the input.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardCache {
    pub activations: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub dw: Vec<RealMatrix>,
    pub db: Vec<Vec<f64>>,
}

/// Input vector and real-valued target.
pub type Example = (Vec<f64>, Vec<f64>);

impl Mlp {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::EmptyInput("layer list"));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.b.len() != l.w.rows() {
                return Err(Error::lengths(l.b.len(), l.w.rows()));
            }
            if l.w.rows() == 0 || l.w.cols() == 0 {
                return Err(Error::EmptyInput("layer"));
            }
            if let Some(next) = layers.get(k + 1) {
                if next.w.cols() != l.w.rows() {
                    return Err(Error::shapes(l.w.shape(), next.w.shape()));
                }
            }
            if l.w.as_slice().iter().chain(&l.b).any(|v| !v.is_finite()) {
                return Err(Error::Contract("non-finite weight".into()));
            }
        }
        Ok(Self { layers })
    }

    /// Weights and biases drawn from uniform(−1, 1); `dims` lists layer widths
    /// from input to output.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        Self::build(dims, |_, _| rng.random_range(-1.0..1.0))
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        Self::build(dims, |_, _| 0.0)
    }

    fn build(dims: &[usize], mut init: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Contract("an MLP needs at least input and output widths".into()));
        }
        let layers = dims
            .windows(2)
            .map(|d| {
                let w = RealMatrix::from_fn(d[1], d[0], &mut init);
                let b = (0..d[1]).map(|i| init(i, d[0])).collect();
                DenseLayer { w, b }
            })
            .collect();
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Widths from input to output.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].w.cols())
            .chain(self.layers.iter().map(|l| l.w.rows()))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].w.rows()
    }
}

pub fn forward_classical(mlp: &Mlp, x: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
    forward_counted(mlp, x, &mut OpsCounter::default())
}

fn forward_counted(mlp: &Mlp, x: &[f64], ops: &mut OpsCounter) -> Result<(Vec<f64>, ForwardCache)> {
    if x.len() != mlp.input_dim() {
        return Err(Error::lengths(x.len(), mlp.input_dim()));
    }
    let mut activations = vec![x.to_vec()];
    for l in &mlp.layers {
        let a = activations.last().expect("non-empty");
        let (o, i) = l.w.shape();
        let next = (0..o)
            .map(|r| l.b[r] + l.w.row(r).iter().zip(a).map(|(w, x)| w * x).sum::<f64>())
            .map(sigmoid)
            .collect();
        ops.mults(o * i);
        ops.adds(o * i);
        activations.push(next);
    }
    let out = activations.last().expect("non-empty").clone();
    Ok((out, ForwardCache { activations }))
}

/// Mean over the batch of the per-example average L1 error.
pub fn batch_loss(mlp: &Mlp, batch: &[Example]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("batch"));
    }
    let mut total = 0.0;
    for (x, t) in batch {
        let (o, _) = forward_classical(mlp, x)?;
        check_target(&o, t)?;
        total += o.iter().zip(t).map(|(o, t)| (o - t).abs()).sum::<f64>() / o.len() as f64;
    }
    Ok(total / batch.len() as f64)
}

fn check_target(o: &[f64], t: &[f64]) -> Result<()> {
    if o.len() != t.len() {
        return Err(Error::lengths(t.len(), o.len()));
    }
    Ok(())
}

/// Subgradient of `|r|`, zero at `r = 0`.
fn l1_sign(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn gradients(mlp: &Mlp, batch: &[Example]) -> Result<Gradient> {
    gradients_counted(mlp, batch, &mut OpsCounter::default())
}

/// Full backward pass, tallying real multiplications and additions.
pub fn gradients_counted(mlp: &Mlp, batch: &[Example], ops: &mut OpsCounter) -> Result<Gradient> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("batch"));
    }
    let depth = mlp.depth();
    let mut dw: Vec<RealMatrix> = mlp.layers.iter().map(|l| RealMatrix::zeros(l.w.rows(), l.w.cols())).collect();
    let mut db: Vec<Vec<f64>> = mlp.layers.iter().map(|l| vec![0.0; l.b.len()]).collect();
    let m = mlp.output_dim();
    let scale = 1.0 / (batch.len() * m) as f64;
    for (x, t) in batch {
        let (o, cache) = forward_counted(mlp, x, ops)?;
        check_target(&o, t)?;
        let mut delta: Vec<f64> = o
            .iter()
            .zip(t)
            .map(|(&o, &t)| l1_sign(o - t) * scale * (o * (1.0 - o)))
            .collect();
        ops.adds(2 * m);
        ops.mults(3 * m);
        for k in (0..depth).rev() {
            let a = &cache.activations[k];
            let (rows, cols) = mlp.layers[k].w.shape();
            for r in 0..rows {
                for c in 0..cols {
                    dw[k][(r, c)] += delta[r] * a[c];
                }
                db[k][r] += delta[r];
            }
            ops.mults(rows * cols);
            ops.adds(rows * cols + rows);
            if k > 0 {
                delta = backprop_delta(&mlp.layers[k].w, &delta, a, ops);
            }
        }
    }
    Ok(Gradient { dw, db })
}

/// `(wᵀ δ) ⊙ a(1 − a)`.
fn backprop_delta(w: &RealMatrix, delta: &[f64], a: &[f64], ops: &mut OpsCounter) -> Vec<f64> {
    let (rows, cols) = w.shape();
    let out = (0..cols)
        .map(|c| {
            let s: f64 = (0..rows).map(|r| w[(r, c)] * delta[r]).sum();
            s * a[c] * (1.0 - a[c])
        })
        .collect();
    ops.mults(rows * cols + 2 * cols);
    ops.adds((rows - 1) * cols + cols);
    out
}

pub fn backprop_step(mlp: &Mlp, batch: &[Example], learning_rate: f64) -> Result<Mlp> {
    if !(learning_rate >= 0.0 && learning_rate.is_finite()) {
        return Err(Error::Contract(format!("learning rate {learning_rate} must be non-negative")));
    }
    let g = gradients(mlp, batch)?;
    let layers = mlp
        .layers
        .iter()
        .zip(g.dw.iter().zip(&g.db))
        .map(|(l, (dw, db))| {
            let (r, c) = l.w.shape();
            DenseLayer {
                w: RealMatrix::from_fn(r, c, |i, j| l.w[(i, j)] - learning_rate * dw[(i, j)]),
                b: l.b.iter().zip(db).map(|(b, d)| b - learning_rate * d).collect(),
            }
        })
        .collect();
    Mlp::new(layers)
}

/// Real-operation count for layer `layer_index`'s gradient over a batch of
/// `batch_size`: the forward pass from that layer on, the backward chain down
/// to it, and its outer product. Layers before it are only read.
pub fn count_backprop_ops(mlp: &Mlp, layer_index: usize, batch_size: usize) -> Result<OpsCounter> {
    let depth = mlp.depth();
    if layer_index >= depth {
        return Err(Error::Range {
            index: layer_index,
            dim: depth,
        });
    }
    let shapes: Vec<(usize, usize)> = mlp.layers.iter().map(|l| l.w.shape()).collect();
    let m = mlp.output_dim();
    let mut per = OpsCounter::default();
    for &(o, i) in &shapes[layer_index..] {
        per.mults(o * i);
        per.adds(o * i);
    }
    per.mults(3 * m);
    per.adds(2 * m);
    for &(o, i) in &shapes[layer_index + 1..] {
        per.mults(o * i + 2 * i);
        per.adds((o - 1) * i + i);
    }
    let (o, i) = shapes[layer_index];
    per.mults(o * i);
    per.adds(o * i + o);
    let b = batch_size as u64;
    Ok(OpsCounter {
        complex_mults: per.complex_mults * b,
        complex_adds: per.complex_adds * b,
        svd_calls: 0,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackpropConfig {
    pub layer_dims: Vec<usize>,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub accuracy_cutoff: f64,
    pub seed: u64,
}

impl BackpropConfig {
    /// Two inputs, two hidden units, one output.
    pub fn xor(seed: u64, learning_rate: f64) -> Self {
        Self {
            layer_dims: vec![2, 2, 1],
            learning_rate,
            max_iterations: 100,
            accuracy_cutoff: 0.5,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackpropResult {
    pub mlp: Mlp,
    /// Per-iteration L1 error on the random test instance.
    pub loss_history: Vec<f64>,
    /// Per-iteration 0/1 correctness on the random test instance.
    pub accuracy_history: Vec<f64>,
    /// Per-iteration average L1 error over the whole dataset.
    pub table_loss_history: Vec<f64>,
    /// Per-iteration fraction of dataset rows classified correctly.
    pub table_accuracy_history: Vec<f64>,
}

/// Single-instance stochastic gradient descent with the same per-iteration
/// protocol as the derivative-free trainer.
pub fn train_backprop(dataset: &Dataset, config: &BackpropConfig) -> Result<BackpropResult> {
    let dims = &config.layer_dims;
    if dims.first() != Some(&dataset.inputs()) || dims.last() != Some(&dataset.targets()) {
        return Err(Error::Config(format!(
            "layer widths {dims:?} do not match {} inputs and {} targets",
            dataset.inputs(),
            dataset.targets()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut mlp = Mlp::random(dims, &mut rng)?;
    let examples: Vec<Example> = dataset
        .rows()
        .iter()
        .map(|r| (bits_to_reals(&r.input), bits_to_reals(&r.target)))
        .collect();
    let mut out = BackpropResult {
        mlp: mlp.clone(),
        loss_history: Vec::with_capacity(config.max_iterations),
        accuracy_history: Vec::with_capacity(config.max_iterations),
        table_loss_history: Vec::with_capacity(config.max_iterations),
        table_accuracy_history: Vec::with_capacity(config.max_iterations),
    };
    for _ in 0..config.max_iterations {
        let train = rng.random_range(0..examples.len());
        mlp = backprop_step(&mlp, std::slice::from_ref(&examples[train]), config.learning_rate)?;
        let test = rng.random_range(0..examples.len());
        let row = &dataset.rows()[test];
        let (o, _) = forward_classical(&mlp, &examples[test].0)?;
        out.loss_history.push(mean_l1(&o, &row.target));
        out.accuracy_history
            .push(if thresholded_correct(&o, &row.target, config.accuracy_cutoff) { 1.0 } else { 0.0 });
        let (acc, loss) = evaluate_mlp(&mlp, dataset, config.accuracy_cutoff)?;
        out.table_accuracy_history.push(acc);
        out.table_loss_history.push(loss);
    }
    out.mlp = mlp;
    Ok(out)
}

/// `(accuracy, avg_l1)` of the network over every dataset row.
pub fn evaluate_mlp(mlp: &Mlp, dataset: &Dataset, cutoff: f64) -> Result<(f64, f64)> {
    let scored = dataset
        .rows()
        .iter()
        .map(|r| Ok((forward_classical(mlp, &bits_to_reals(&r.input))?.0, r.target.clone())))
        .collect::<Result<Vec<_>>>()?;
    score_set(&scored, cutoff)
}
