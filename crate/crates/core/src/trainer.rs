//! Derivative-free training: `W_new = M(U·Ŷ − W_old)` applied independently to
//! every layer of a stack of padded quantum perceptrons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex_linalg::{outer_product, random_unitary, CMatrix, CVector, Complex, UnitaryMatrix, ZERO};
use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::measurement::MeasurableOperator;
use crate::metrics::{first_perfect, mean_l1, plateau_onset, score_set, thresholded_correct};
pub use crate::metrics::OpsCounter;
use crate::quantum_perceptron::{forward, unitarize, UnitarizeMode};
use crate::quantum_state::{encode_bits, EncodingMode, Ket};

/// Number of consecutive small loss changes that count as a plateau.
pub const PLATEAU_WINDOW: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LossKind {
    /// Mean absolute deviation between decoded scores and targets.
    #[default]
    L1Average,
}

#[derive(Clone, Debug)]
pub struct TrainerConfig {
    /// Widths of the state spaces between layers, input first.
    pub layer_dims: Vec<usize>,
    pub unitarize_mode: UnitarizeMode,
    pub measurable: MeasurableOperator,
    pub max_iterations: usize,
    pub accuracy_cutoff: f64,
    pub loss_kind: LossKind,
    pub seed: u64,
    pub convergence_eps: f64,
    pub encoding: EncodingMode,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            layer_dims: vec![4, 4, 2],
            unitarize_mode: UnitarizeMode::default(),
            measurable: MeasurableOperator::default(),
            max_iterations: 100,
            accuracy_cutoff: 0.5,
            loss_kind: LossKind::L1Average,
            seed: 0,
            convergence_eps: 1e-3,
            encoding: EncodingMode::BasisTensor,
        }
    }
}

impl TrainerConfig {
    /// Two basis-encoded input bits, a two-qubit hidden layer, one output qubit.
    pub fn xor(seed: u64) -> Self {
        Self {
            unitarize_mode: UnitarizeMode::UVDagger,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_dims.len() < 2 {
            return Err(Error::Config("layer_dims needs at least two entries".into()));
        }
        if self.layer_dims.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        if !(self.accuracy_cutoff > 0.0 && self.accuracy_cutoff < 1.0) {
            return Err(Error::Config(format!("cutoff {} must lie in (0, 1)", self.accuracy_cutoff)));
        }
        if !(self.convergence_eps > 0.0) {
            return Err(Error::Config("convergence_eps must be positive".into()));
        }
        if let MeasurableOperator::HermitianProjection(obs) = &self.measurable {
            let dims = padded_dims(&self.layer_dims);
            if dims.iter().any(|&d| d != obs.dim()) {
                return Err(Error::Config(format!(
                    "observable of dimension {} does not fit padded layer dimensions {dims:?}",
                    obs.dim()
                )));
            }
        }
        Ok(())
    }

    /// Checks that the encoded dataset fits the first and last widths.
    pub fn check_dataset(&self, dataset: &Dataset) -> Result<()> {
        let (need_in, need_out) = match self.encoding {
            EncodingMode::BasisTensor => (1usize << dataset.inputs(), 1usize << dataset.targets()),
            EncodingMode::RawVector => (dataset.inputs(), dataset.targets()),
        };
        let dims = &self.layer_dims;
        if dims[0] != need_in || dims[dims.len() - 1] != need_out {
            return Err(Error::Config(format!(
                "layer_dims {dims:?} must start at {need_in} and end at {need_out} for {} inputs and {} targets",
                dataset.inputs(),
                dataset.targets()
            )));
        }
        Ok(())
    }
}

/// Square dimension of each layer: `max(in, out)`.
pub fn padded_dims(layer_dims: &[usize]) -> Vec<usize> {
    layer_dims.windows(2).map(|w| w[0].max(w[1])).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredNetwork {
    /// Square weights `W_ℓ`, one per layer.
    pub layers: Vec<CMatrix>,
    /// `unitarize(W_ℓ)` under `mode`.
    pub unitaries: Vec<UnitaryMatrix>,
    pub layer_dims: Vec<usize>,
    pub mode: UnitarizeMode,
    pub encoding: EncodingMode,
    pub iteration: usize,
    pub loss_history: Vec<f64>,
    pub accuracy_history: Vec<f64>,
}

impl LayeredNetwork {
    /// Wraps explicit layer weights, computing their unitaries.
    pub fn from_weights(
        layers: Vec<CMatrix>,
        layer_dims: Vec<usize>,
        mode: UnitarizeMode,
        encoding: EncodingMode,
    ) -> Result<Self> {
        let dims = padded_dims(&layer_dims);
        if dims.len() != layers.len() {
            return Err(Error::lengths(layers.len(), dims.len()));
        }
        for (w, &d) in layers.iter().zip(&dims) {
            if w.shape() != (d, d) {
                return Err(Error::shapes(w.shape(), (d, d)));
            }
        }
        let unitaries = layers.iter().map(|w| unitarize(w, mode)).collect::<Result<_>>()?;
        Ok(Self {
            layers,
            unitaries,
            layer_dims,
            mode,
            encoding,
            iteration: 0,
            loss_history: Vec::new(),
            accuracy_history: Vec::new(),
        })
    }

    /// Every layer a random unitary.
    pub fn random<R: Rng + ?Sized>(
        layer_dims: Vec<usize>,
        mode: UnitarizeMode,
        encoding: EncodingMode,
        rng: &mut R,
    ) -> Result<Self> {
        let layers = padded_dims(&layer_dims)
            .into_iter()
            .map(|d| random_unitary(d, rng).into_matrix())
            .collect();
        Self::from_weights(layers, layer_dims, mode, encoding)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Padded dimension of layer `l`.
    pub fn layer_dim(&self, l: usize) -> usize {
        self.layers[l].rows()
    }

    /// States entering each layer; entry `depth()` is the network output.
    pub fn layer_inputs<R: Rng + ?Sized>(
        &self,
        x: &Ket,
        m: &MeasurableOperator,
        rng: &mut R,
    ) -> Result<Vec<Ket>> {
        let mut states = vec![x.clone()];
        for l in 0..self.depth() {
            let next = propagate(
                &self.unitaries[l],
                states.last().expect("non-empty"),
                self.layer_dims[l + 1],
                l + 1 < self.depth(),
                m,
                rng,
            )?;
            states.push(next);
        }
        Ok(states)
    }

    /// Output ket, restricted to the last width.
    pub fn forward<R: Rng + ?Sized>(&self, x: &Ket, m: &MeasurableOperator, rng: &mut R) -> Result<Ket> {
        Ok(self.layer_inputs(x, m, rng)?.pop().expect("non-empty"))
    }

    /// One derivative-free iteration on a single instance. Every layer's batch
    /// is taken from the network as it was before the iteration.
    pub fn step<R: Rng + ?Sized>(&mut self, x: &Ket, m: &MeasurableOperator, rng: &mut R) -> Result<()> {
        let mut sink = vec![OpsCounter::default(); self.depth()];
        self.step_counted(x, m, rng, &mut sink)
    }

    /// [`LayeredNetwork::step`] that adds each layer's update cost to `ops[l]`.
    pub fn step_counted<R: Rng + ?Sized>(
        &mut self,
        x: &Ket,
        m: &MeasurableOperator,
        rng: &mut R,
        ops: &mut [OpsCounter],
    ) -> Result<()> {
        if ops.len() != self.depth() {
            return Err(Error::lengths(ops.len(), self.depth()));
        }
        let inputs = self.layer_inputs(x, m, rng)?;
        let mut next = Vec::with_capacity(self.depth());
        for l in 0..self.depth() {
            let (w, _) = df_update_counted(&self.layers[l], std::slice::from_ref(&inputs[l]), m, self.mode, rng, &mut ops[l])?;
            next.push(w);
        }
        self.unitaries = next.iter().map(|w| unitarize(w, self.mode)).collect::<Result<_>>()?;
        self.layers = next;
        self.iteration += 1;
        Ok(())
    }
}

/// `U x` restricted to `out_dim` and renormalized, collapsed by `m` first when
/// `measure` is set and `m` is a projection. A state with no weight in the
/// kept subspace is returned as the zero vector.
fn propagate<R: Rng + ?Sized>(
    u: &UnitaryMatrix,
    x: &Ket,
    out_dim: usize,
    measure: bool,
    m: &MeasurableOperator,
    rng: &mut R,
) -> Result<Ket> {
    let mut y = forward(u, x)?;
    if measure && y.is_normalized() {
        y = m.measure_state(&y, rng)?;
    }
    let kept = CVector::new(y.amplitudes().as_slice()[..out_dim].to_vec())?;
    let n = kept.norm();
    if n == 0.0 {
        return Ok(Ket::from_amplitudes(kept));
    }
    Ok(Ket::from_amplitudes(kept.scale(Complex::new(1.0 / n, 0.0))))
}

/// Encodes bits for the first layer.
pub fn encode_input(bits: &[u8], encoding: EncodingMode) -> Result<Ket> {
    encode_bits(bits, encoding)
}

/// Label ket for target bits.
pub fn encode_label(bits: &[u8], encoding: EncodingMode) -> Result<Ket> {
    encode_bits(bits, encoding)
}

/// Per-target-bit scores in `[0, 1]` from an output ket.
///
/// Basis encoding gives the Born probability that each bit reads 1; raw
/// encoding gives the real part of each amplitude. A zero output scores 0.5.
pub fn decode(output: &Ket, targets: usize, encoding: EncodingMode) -> Vec<f64> {
    let amps = output.amplitudes();
    let total = amps.norm_sqr();
    if total == 0.0 {
        return vec![0.5; targets];
    }
    match encoding {
        EncodingMode::BasisTensor => (0..targets)
            .map(|b| {
                let mask = 1usize << (targets - 1 - b);
                amps.iter()
                    .enumerate()
                    .filter(|(idx, _)| idx & mask != 0)
                    .map(|(_, z)| z.norm_sqr())
                    .sum::<f64>()
                    / total
            })
            .collect(),
        EncodingMode::RawVector => (0..targets).map(|k| amps[k].re).collect(),
    }
}

/// Output layer from `Σ |yᵢ⟩⟨hᵢ|`, where `hᵢ` is the image of input `i` under
/// the hidden layers; hidden layers are random unitaries.
pub fn init_network(dataset: &Dataset, config: &TrainerConfig) -> Result<LayeredNetwork> {
    init_network_with(dataset, config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

pub fn init_network_with<R: Rng + ?Sized>(
    dataset: &Dataset,
    config: &TrainerConfig,
    rng: &mut R,
) -> Result<LayeredNetwork> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    config.validate()?;
    config.check_dataset(dataset)?;
    let dims = padded_dims(&config.layer_dims);
    let depth = dims.len();
    let mut layers: Vec<CMatrix> = dims[..depth - 1]
        .iter()
        .map(|&d| random_unitary(d, rng).into_matrix())
        .collect();
    let d_out = dims[depth - 1];
    layers.push(CMatrix::identity(d_out));
    let mut net = LayeredNetwork::from_weights(layers, config.layer_dims.clone(), config.unitarize_mode, config.encoding)?;
    let mut w = CMatrix::zeros(d_out, d_out);
    for row in dataset.rows() {
        let x = encode_input(&row.input, config.encoding)?;
        let states = net.layer_inputs(&x, &config.measurable, rng)?;
        let h = states[depth - 1].amplitudes().resized(d_out);
        let y = encode_label(&row.target, config.encoding)?.amplitudes().resized(d_out);
        w = w.add(&outer_product(&y, &h))?;
    }
    net.unitaries[depth - 1] = unitarize(&w, config.unitarize_mode)?;
    net.layers[depth - 1] = w;
    Ok(net)
}

/// `U = unitarize(W_old)`, `Ŷ = (1/B) Σ (U xᵢ)⟨xᵢ|`, `W_new = M(U Ŷ − W_old)`.
pub fn df_update<R: Rng + ?Sized>(
    w_old: &CMatrix,
    batch: &[Ket],
    m: &MeasurableOperator,
    mode: UnitarizeMode,
    rng: &mut R,
) -> Result<(CMatrix, UnitaryMatrix)> {
    df_update_counted(w_old, batch, m, mode, rng, &mut OpsCounter::default())
}

/// [`df_update`] tallying complex multiplications, additions and SVDs.
/// Applying `M` is not counted.
pub fn df_update_counted<R: Rng + ?Sized>(
    w_old: &CMatrix,
    batch: &[Ket],
    m: &MeasurableOperator,
    mode: UnitarizeMode,
    rng: &mut R,
    ops: &mut OpsCounter,
) -> Result<(CMatrix, UnitaryMatrix)> {
    if !w_old.is_square() {
        return Err(Error::shapes(w_old.shape(), (w_old.rows(), w_old.rows())));
    }
    if batch.is_empty() {
        return Err(Error::EmptyInput("update batch"));
    }
    let d = w_old.rows();
    let xs: Vec<CVector> = batch
        .iter()
        .map(|x| {
            if x.dim() > d {
                Err(Error::lengths(x.dim(), d))
            } else {
                Ok(x.amplitudes().resized(d))
            }
        })
        .collect::<Result<_>>()?;

    let u = unitarize(w_old, mode)?;
    ops.svd();
    let um = u.matrix();

    let mut y_mat = CMatrix::zeros(d, d);
    for (b, x) in xs.iter().enumerate() {
        let mut y = vec![ZERO; d];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = um[(i, 0)] * x[0];
            for k in 1..d {
                acc += um[(i, k)] * x[k];
            }
            *yi = acc;
        }
        ops.mults(d * d);
        ops.adds(d * (d - 1));
        for i in 0..d {
            for j in 0..d {
                let term = y[i] * x[j].conj();
                if b == 0 {
                    y_mat[(i, j)] = term;
                } else {
                    y_mat[(i, j)] += term;
                }
            }
        }
        ops.mults(d * d);
        if b > 0 {
            ops.adds(d * d);
        }
    }
    let inv_b = Complex::new(1.0 / xs.len() as f64, 0.0);
    for i in 0..d {
        for j in 0..d {
            y_mat[(i, j)] *= inv_b;
        }
    }
    ops.mults(d * d);

    let mut diff = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = um[(i, 0)] * y_mat[(0, j)];
            for k in 1..d {
                acc += um[(i, k)] * y_mat[(k, j)];
            }
            diff[(i, j)] = acc - w_old[(i, j)];
        }
    }
    ops.mults(d * d * d);
    ops.adds(d * d * (d - 1) + d * d);

    let w_new = m.apply_to_matrix(&diff, rng)?;
    Ok((w_new, u))
}

/// Cost of one [`df_update`] of layer `layer_index` with `batch_size` inputs.
/// Depends only on that layer's padded dimension and the batch size.
pub fn count_update_ops(network: &LayeredNetwork, layer_index: usize, batch_size: usize) -> Result<OpsCounter> {
    if layer_index >= network.depth() {
        return Err(Error::Range {
            index: layer_index,
            dim: network.depth(),
        });
    }
    if batch_size == 0 {
        return Err(Error::EmptyInput("update batch"));
    }
    let d = network.layer_dim(layer_index) as u64;
    let b = batch_size as u64;
    Ok(OpsCounter {
        complex_mults: 2 * b * d * d + d * d + d * d * d,
        complex_adds: b * d * (d - 1) + (b - 1) * d * d + d * d * (d - 1) + d * d,
        svd_calls: 1,
    })
}

/// `(accuracy, avg_l1)` of the decoded outputs over `rows`.
pub fn evaluate<R: Rng + ?Sized>(
    network: &LayeredNetwork,
    rows: &[Sample],
    m: &MeasurableOperator,
    cutoff: f64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("evaluation set"));
    }
    let scored = rows
        .iter()
        .map(|r| Ok((predict(network, &r.input, r.target.len(), m, rng)?, r.target.clone())))
        .collect::<Result<Vec<_>>>()?;
    score_set(&scored, cutoff)
}

/// Decoded scores for one input.
pub fn predict<R: Rng + ?Sized>(
    network: &LayeredNetwork,
    input: &[u8],
    targets: usize,
    m: &MeasurableOperator,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let x = encode_input(input, network.encoding)?;
    Ok(decode(&network.forward(&x, m, rng)?, targets, network.encoding))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainResult {
    pub network: LayeredNetwork,
    /// Per-iteration L1 error on the random test instance.
    pub loss_history: Vec<f64>,
    /// Per-iteration 0/1 correctness on the random test instance.
    pub accuracy_history: Vec<f64>,
    /// Per-iteration average L1 error over the whole dataset.
    pub table_loss_history: Vec<f64>,
    /// Per-iteration fraction of dataset rows classified correctly.
    pub table_accuracy_history: Vec<f64>,
    /// Plateau of the dataset loss, see [`plateau_onset`].
    pub converged_at: Option<usize>,
}

impl TrainResult {
    /// First iteration at which every dataset row is classified correctly.
    pub fn first_perfect(&self) -> Option<usize> {
        first_perfect(&self.table_accuracy_history)
    }
}

/// Initializes from `dataset` and runs `max_iterations` derivative-free
/// iterations; instances are drawn uniformly from the dataset rows.
pub fn train(dataset: &Dataset, config: &TrainerConfig) -> Result<TrainResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = init_network_with(dataset, config, &mut rng)?;
    let m = &config.measurable;
    let rows = dataset.rows();
    let iters = config.max_iterations;
    let mut table_loss = Vec::with_capacity(iters);
    let mut table_acc = Vec::with_capacity(iters);
    for _ in 0..iters {
        let train_row = &rows[rng.random_range(0..rows.len())];
        net.step(&encode_input(&train_row.input, config.encoding)?, m, &mut rng)?;
        let test_row = &rows[rng.random_range(0..rows.len())];
        let scores = predict(&net, &test_row.input, dataset.targets(), m, &mut rng)?;
        net.loss_history.push(mean_l1(&scores, &test_row.target));
        let hit = thresholded_correct(&scores, &test_row.target, config.accuracy_cutoff);
        net.accuracy_history.push(if hit { 1.0 } else { 0.0 });
        let (acc, loss) = evaluate(&net, rows, m, config.accuracy_cutoff, &mut rng)?;
        table_acc.push(acc);
        table_loss.push(loss);
    }
    Ok(TrainResult {
        loss_history: net.loss_history.clone(),
        accuracy_history: net.accuracy_history.clone(),
        converged_at: plateau_onset(&table_loss, config.convergence_eps, PLATEAU_WINDOW),
        table_loss_history: table_loss,
        table_accuracy_history: table_acc,
        network: net,
    })
}
