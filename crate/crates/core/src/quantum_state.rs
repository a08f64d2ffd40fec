//! Kets over [`CVector`]: basis states, bit-string encodings, normalization and
//! Born probabilities.

use crate::complex_linalg::{tensor_product, CVector, Complex};
use crate::error::{Error, Result};

/// Tolerance for the unit-norm flag on a [`Ket`].
pub const NORM_TOL: f64 = 1e-10;

/// Quantum state vector. `normalized` records that `Σ|amp|² = 1` was checked.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: CVector,
    normalized: bool,
}

/// How a classical bit string becomes a ket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EncodingMode {
    /// Tensor product of per-bit basis kets; `k` bits give a `2^k`-dim basis state.
    #[default]
    BasisTensor,
    /// The bits themselves as real amplitudes, normalized. Experimental for non-binary data.
    RawVector,
}

impl Ket {
    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(amps: CVector) -> Self {
        let normalized = (amps.norm_sqr() - 1.0).abs() <= NORM_TOL;
        Self { amps, normalized }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Ok(Self::from_amplitudes(CVector::from_real(values)?))
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.dim()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Zero-padded to `dim`; padding keeps the norm so the flag carries over.
    pub fn padded(&self, dim: usize) -> Result<Ket> {
        if dim < self.dim() {
            return Err(Error::lengths(self.dim(), dim));
        }
        Ok(Ket {
            amps: self.amps.resized(dim),
            normalized: self.normalized,
        })
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Ket) -> Result<Complex> {
        self.amps.inner(&other.amps)
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket::from_amplitudes(tensor_product(&self.amps, &other.amps))
    }
}

/// `|index⟩` in a `dim`-dimensional space.
pub fn basis_ket(index: usize, dim: usize) -> Result<Ket> {
    Ok(Ket {
        amps: CVector::basis(index, dim)?,
        normalized: true,
    })
}

/// Encodes a bit string. In [`EncodingMode::RawVector`] the all-zero string maps
/// to the uniform state, since it has no direction of its own.
pub fn encode_bits(bits: &[u8], mode: EncodingMode) -> Result<Ket> {
    if bits.is_empty() {
        return Err(Error::EmptyInput("bit string"));
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::Contract(format!("bit value {b} is not 0 or 1")));
    }
    match mode {
        EncodingMode::BasisTensor => {
            let mut ket = basis_ket(bits[0] as usize, 2)?;
            for &b in &bits[1..] {
                ket = ket.tensor(&basis_ket(b as usize, 2)?);
            }
            // Products of exact basis kets are exact.
            ket.normalized = true;
            Ok(ket)
        }
        EncodingMode::RawVector => {
            if bits.iter().all(|&b| b == 0) {
                let u = 1.0 / (bits.len() as f64).sqrt();
                return Ket::from_real(&vec![u; bits.len()]);
            }
            let values: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
            normalize(&Ket::from_real(&values)?)
        }
    }
}

/// Integer value of a bit string, most significant bit first.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn normalize(k: &Ket) -> Result<Ket> {
    let n = k.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Degenerate("cannot normalize a zero vector"));
    }
    Ok(Ket {
        amps: k.amps.scale(Complex::new(1.0 / n, 0.0)),
        normalized: true,
    })
}

/// `p[i] = |amps[i]|²` for a normalized ket.
pub fn born_probabilities(k: &Ket) -> Result<Vec<f64>> {
    if !k.normalized {
        return Err(Error::Contract(format!(
            "Born probabilities need a normalized ket (norm = {})",
            k.norm()
        )));
    }
    Ok(k.amps.iter().map(|z| z.norm_sqr()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn reals(k: &Ket) -> Vec<f64> {
        k.amplitudes().iter().map(|z| z.re).collect()
    }

    #[test]
    fn basis_kets() {
        assert_eq!(reals(&basis_ket(0, 2).unwrap()), vec![1.0, 0.0]);
        assert_eq!(reals(&basis_ket(1, 2).unwrap()), vec![0.0, 1.0]);
        assert_eq!(reals(&basis_ket(2, 4).unwrap()), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(basis_ket(2, 2), Err(Error::Range { index: 2, dim: 2 }));
    }

    #[test]
    fn basis_tensor_encoding() {
        let k = encode_bits(&[1, 0], EncodingMode::BasisTensor).unwrap();
        assert_eq!(reals(&k), vec![0.0, 0.0, 1.0, 0.0]);
        let k = encode_bits(&[0, 0], EncodingMode::BasisTensor).unwrap();
        assert_eq!(reals(&k), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(k.is_normalized());
    }

    #[test]
    fn raw_vector_encoding() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let k = encode_bits(&[1, 1], EncodingMode::RawVector).unwrap();
        assert_abs_diff_eq!(reals(&k)[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(reals(&k)[1], h, epsilon = 1e-15);
        let zero = encode_bits(&[0, 0], EncodingMode::RawVector).unwrap();
        assert_abs_diff_eq!(reals(&zero)[0], h, epsilon = 1e-15);
        assert!(zero.is_normalized());
        assert!(encode_bits(&[], EncodingMode::RawVector).is_err());
        assert!(encode_bits(&[2], EncodingMode::BasisTensor).is_err());
    }

    #[test]
    fn normalization_cases() {
        assert_eq!(reals(&normalize(&Ket::from_real(&[2.0, 0.0]).unwrap()).unwrap()), vec![1.0, 0.0]);
        let k = Ket::from_amplitudes(
            CVector::new(vec![Complex::new(0.0, 3.0), Complex::new(4.0, 0.0)]).unwrap(),
        );
        let n = normalize(&k).unwrap();
        assert_abs_diff_eq!(n.amplitudes()[0].im, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(n.amplitudes()[1].re, 0.8, epsilon = 1e-15);
        let p = born_probabilities(&n).unwrap();
        assert_abs_diff_eq!(p[0], 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.64, epsilon = 1e-15);
        assert!(matches!(
            normalize(&Ket::from_real(&[0.0, 0.0]).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn born_probabilities_cases() {
        assert_eq!(born_probabilities(&basis_ket(0, 2).unwrap()).unwrap(), vec![1.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = born_probabilities(&Ket::from_real(&[h, h]).unwrap()).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert!(matches!(
            born_probabilities(&Ket::from_real(&[1.0, 1.0]).unwrap()),
            Err(Error::Contract(_))
        ));
    }

    fn bits_strategy(len: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..=1, len)
    }

    proptest! {
        #[test]
        fn basis_encoding_is_injective(a in bits_strategy(4), b in bits_strategy(4)) {
            let ka = encode_bits(&a, EncodingMode::BasisTensor).unwrap();
            let kb = encode_bits(&b, EncodingMode::BasisTensor).unwrap();
            prop_assert_eq!(a == b, ka == kb);
            prop_assert_eq!(ka, basis_ket(bits_to_index(&a), 16).unwrap());
        }

        #[test]
        fn normalized_probabilities_sum_to_one(
            v in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..9)
        ) {
            let amps = CVector::new(v.iter().map(|&(r, i)| Complex::new(r, i)).collect()).unwrap();
            prop_assume!(amps.norm() > 1e-6);
            let p = born_probabilities(&normalize(&Ket::from_amplitudes(amps)).unwrap()).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn tensor_of_normalized_is_normalized(
            a in proptest::collection::vec(-3.0f64..3.0, 1..5),
            b in proptest::collection::vec(-3.0f64..3.0, 1..5),
        ) {
            let ka = Ket::from_real(&a).unwrap();
            let kb = Ket::from_real(&b).unwrap();
            prop_assume!(ka.norm() > 1e-6 && kb.norm() > 1e-6);
            let t = normalize(&ka).unwrap().tensor(&normalize(&kb).unwrap());
            prop_assert!((t.norm() - 1.0).abs() < 1e-12);
        }
    }
}
