//! Measurable operators.
//!
//! Two modes are kept strictly apart: an elementwise sigmoid that squashes the
//! real part of every matrix entry, and a Hermitian observable whose eigenbasis
//! defines projective measurement with Born-rule sampling.

use rand::Rng;

use crate::complex_linalg::{hermitian_eig, CMatrix, Complex, HermitianEig};
use crate::error::{Error, Result};
use crate::quantum_state::Ket;

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// A Hermitian matrix with its cached eigendecomposition.
#[derive(Clone, Debug)]
pub struct Observable {
    h: CMatrix,
    eig: HermitianEig,
}

impl Observable {
    pub fn new(h: CMatrix) -> Result<Self> {
        let eig = hermitian_eig(&h)?;
        Ok(Self { h, eig })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn eigen(&self) -> &HermitianEig {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// `|⟨ξᵢ|ψ⟩|²` for every eigenvector.
    pub fn outcome_probabilities(&self, psi: &Ket) -> Result<Vec<f64>> {
        self.check_state(psi)?;
        let xi = self.eig.vectors.matrix().adjoint();
        let coeffs = xi.matvec(psi.amplitudes())?;
        Ok(coeffs.iter().map(|z| z.norm_sqr()).collect())
    }

    fn check_state(&self, psi: &Ket) -> Result<()> {
        if psi.dim() != self.dim() {
            return Err(Error::lengths(psi.dim(), self.dim()));
        }
        if !psi.is_normalized() {
            return Err(Error::Contract(format!(
                "measurement needs a normalized state (norm = {})",
                psi.norm()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub enum MeasurableOperator {
    #[default]
    ElementwiseSigmoid,
    HermitianProjection(Observable),
}

/// Outcome of a projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub index: usize,
    pub eigenvalue: f64,
    pub collapsed: Ket,
}

impl MeasurableOperator {
    pub fn hermitian(h: CMatrix) -> Result<Self> {
        Ok(Self::HermitianProjection(Observable::new(h)?))
    }

    pub fn observable(&self) -> Result<&Observable> {
        match self {
            Self::HermitianProjection(o) => Ok(o),
            Self::ElementwiseSigmoid => Err(Error::Contract(
                "operation needs a Hermitian measurable operator".into(),
            )),
        }
    }

    /// Entry `(i, j)` becomes `sigmoid(re a[i, j])` with zero imaginary part.
    pub fn apply_elementwise(&self, a: &CMatrix) -> Result<CMatrix> {
        match self {
            Self::ElementwiseSigmoid => Ok(sigmoid_elementwise(a)),
            Self::HermitianProjection(_) => Err(Error::Contract(
                "elementwise application needs the sigmoid measurable operator".into(),
            )),
        }
    }

    /// Samples eigen-index `i` with probability `|⟨ξᵢ|ψ⟩|²` and returns `(λᵢ, ξᵢ)`.
    pub fn project_to_eigenstate<R: Rng + ?Sized>(&self, psi: &Ket, rng: &mut R) -> Result<Projection> {
        let obs = self.observable()?;
        let probs = obs.outcome_probabilities(psi)?;
        let index = sample_index(&probs, rng);
        Ok(Projection {
            index,
            eigenvalue: obs.eig.values[index],
            collapsed: Ket::from_amplitudes(obs.eig.eigenvector(index)),
        })
    }

    /// `re ⟨ψ|h|ψ⟩`.
    pub fn expectation(&self, psi: &Ket) -> Result<f64> {
        let obs = self.observable()?;
        obs.check_state(psi)?;
        let hpsi = obs.h.matvec(psi.amplitudes())?;
        Ok(psi.amplitudes().inner(&hpsi)?.re)
    }

    /// Applies the operator to a weight-shaped matrix.
    ///
    /// Sigmoid mode is elementwise. Projection mode collapses every nonzero
    /// column onto a sampled eigenvector of `h`, keeping the column norm; zero
    /// columns stay zero.
    pub fn apply_to_matrix<R: Rng + ?Sized>(&self, a: &CMatrix, rng: &mut R) -> Result<CMatrix> {
        match self {
            Self::ElementwiseSigmoid => Ok(sigmoid_elementwise(a)),
            Self::HermitianProjection(obs) => {
                if obs.dim() != a.rows() {
                    return Err(Error::shapes(obs.h.shape(), a.shape()));
                }
                let mut out = CMatrix::zeros(a.rows(), a.cols());
                for j in 0..a.cols() {
                    let col = a.column(j);
                    let n = col.norm();
                    if n == 0.0 {
                        continue;
                    }
                    let psi = Ket::from_amplitudes(col.scale(Complex::new(1.0 / n, 0.0)));
                    let psi = crate::quantum_state::normalize(&psi)?;
                    let p = self.project_to_eigenstate(&psi, rng)?;
                    for (i, z) in p.collapsed.amplitudes().iter().enumerate() {
                        out[(i, j)] = z * n;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Measures a propagated state: sigmoid mode leaves it untouched, projection
    /// mode collapses it onto a sampled eigenstate.
    pub fn measure_state<R: Rng + ?Sized>(&self, psi: &Ket, rng: &mut R) -> Result<Ket> {
        match self {
            Self::ElementwiseSigmoid => Ok(psi.clone()),
            Self::HermitianProjection(_) => Ok(self.project_to_eigenstate(psi, rng)?.collapsed),
        }
    }
}

pub fn sigmoid_elementwise(a: &CMatrix) -> CMatrix {
    a.map(|z| Complex::new(sigmoid(z.re), 0.0))
}

/// Inverse-CDF draw from a discrete distribution.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed on the rounding sliver at the top; take the last nonzero outcome.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}
