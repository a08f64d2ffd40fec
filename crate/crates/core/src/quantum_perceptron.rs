//! The quantum perceptron: weights from label–input outer products, made
//! unitary through the SVD, applied to an input ket.

use crate::complex_linalg::{outer_product, svd, CMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::quantum_state::Ket;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingPair {
    pub x: Ket,
    pub y: Ket,
}

impl TrainingPair {
    pub fn new(x: Ket, y: Ket) -> Result<Self> {
        if !x.is_normalized() || !y.is_normalized() {
            return Err(Error::Contract("training pair kets must be normalized".into()));
        }
        Ok(Self { x, y })
    }
}

/// Which unitary stands in for `Ŵ = U Σ V†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum UnitarizeMode {
    /// `F̂ = U`.
    #[default]
    UOnly,
    /// `F̂ = U V†`, i.e. `Σ` replaced by the identity (the unitary polar factor).
    UVDagger,
}

/// `Ŵ = Σᵢ |yᵢ⟩⟨xᵢ|`.
pub fn accumulate_weights(pairs: &[TrainingPair]) -> Result<CMatrix> {
    let first = pairs.first().ok_or(Error::EmptyInput("training set"))?;
    let (out_dim, in_dim) = (first.y.dim(), first.x.dim());
    let mut w = CMatrix::zeros(out_dim, in_dim);
    for p in pairs {
        if p.y.dim() != out_dim || p.x.dim() != in_dim {
            return Err(Error::shapes((out_dim, in_dim), (p.y.dim(), p.x.dim())));
        }
        w = w.add(&outer_product(p.y.amplitudes(), p.x.amplitudes()))?;
    }
    Ok(w)
}

/// Zero-pads to `D × D` with `D = max(rows, cols)`.
pub fn pad_square(w: &CMatrix) -> CMatrix {
    let d = w.rows().max(w.cols());
    w.resized(d, d)
}

/// Unitary stand-in for `w_hat`; rectangular input is zero-padded to square first.
pub fn unitarize(w_hat: &CMatrix, mode: UnitarizeMode) -> Result<UnitaryMatrix> {
    let square;
    let w = if w_hat.is_square() {
        w_hat
    } else {
        square = pad_square(w_hat);
        &square
    };
    let d = svd(w)?;
    match mode {
        UnitarizeMode::UOnly => Ok(d.u),
        UnitarizeMode::UVDagger => d.u.compose(&d.v.adjoint()),
    }
}

#[derive(Clone, Debug)]
pub struct QuantumPerceptron {
    w_hat: CMatrix,
    f_hat: UnitaryMatrix,
    mode: UnitarizeMode,
}

impl QuantumPerceptron {
    pub fn from_pairs(pairs: &[TrainingPair], mode: UnitarizeMode) -> Result<Self> {
        Self::from_weights(accumulate_weights(pairs)?, mode)
    }

    pub fn from_weights(w_hat: CMatrix, mode: UnitarizeMode) -> Result<Self> {
        let f_hat = unitarize(&w_hat, mode)?;
        Ok(Self { w_hat, f_hat, mode })
    }

    /// Wraps an explicit forward operator; `w_hat` is taken to be the operator itself.
    pub fn from_unitary(f_hat: UnitaryMatrix, mode: UnitarizeMode) -> Self {
        Self {
            w_hat: f_hat.matrix().clone(),
            f_hat,
            mode,
        }
    }

    pub fn weights(&self) -> &CMatrix {
        &self.w_hat
    }

    pub fn operator(&self) -> &UnitaryMatrix {
        &self.f_hat
    }

    pub fn mode(&self) -> UnitarizeMode {
        self.mode
    }

    /// Padded state-space dimension.
    pub fn dim(&self) -> usize {
        self.f_hat.dim()
    }

    /// `Ŷ = F̂|x⟩`, with `x` zero-padded to the operator dimension.
    pub fn forward(&self, x: &Ket) -> Result<Ket> {
        forward(&self.f_hat, x)
    }
}

pub fn forward(f_hat: &UnitaryMatrix, x: &Ket) -> Result<Ket> {
    if x.dim() > f_hat.dim() {
        return Err(Error::lengths(x.dim(), f_hat.dim()));
    }
    let x = x.padded(f_hat.dim())?;
    let y = f_hat.apply(x.amplitudes())?;
    Ok(Ket::from_amplitudes(y))
}
