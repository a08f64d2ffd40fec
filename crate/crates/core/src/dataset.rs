//! Binary input/target tables shared by both trainers.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub input: Vec<u8>,
    pub target: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    inputs: usize,
    targets: usize,
    rows: Vec<Sample>,
}

impl Dataset {
    pub fn new(inputs: usize, targets: usize, rows: Vec<Sample>) -> Result<Self> {
        if inputs == 0 || targets == 0 {
            return Err(Error::Contract("datasets need at least one input and one target bit".into()));
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("dataset"));
        }
        for r in &rows {
            if r.input.len() != inputs {
                return Err(Error::lengths(r.input.len(), inputs));
            }
            if r.target.len() != targets {
                return Err(Error::lengths(r.target.len(), targets));
            }
            if r.input.iter().chain(&r.target).any(|&b| b > 1) {
                return Err(Error::Contract("dataset entries must be 0 or 1".into()));
            }
        }
        Ok(Self { inputs, targets, rows })
    }

    /// Two-bit exclusive or: equal inputs give 0.
    pub fn xor() -> Self {
        let rows = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|&[a, b]| Sample {
                input: vec![a, b],
                target: vec![a ^ b],
            })
            .collect();
        Self::new(2, 1, rows).expect("valid table")
    }

    /// One bit mapped to itself.
    pub fn identity() -> Self {
        let rows = (0..2)
            .map(|b| Sample {
                input: vec![b],
                target: vec![b],
            })
            .collect();
        Self::new(1, 1, rows).expect("valid table")
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Bits as 0.0/1.0.
pub fn bits_to_reals(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| f64::from(b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_truth_table() {
        let d = Dataset::xor();
        let t: Vec<u8> = d.rows().iter().map(|r| r.target[0]).collect();
        assert_eq!(t, vec![0, 1, 1, 0]);
        assert_eq!((d.inputs(), d.targets(), d.len()), (2, 1, 4));
    }

    #[test]
    fn validation() {
        assert!(matches!(Dataset::new(2, 1, vec![]), Err(Error::EmptyInput(_))));
        let bad = Sample {
            input: vec![0],
            target: vec![1],
        };
        assert!(Dataset::new(2, 1, vec![bad]).is_err());
        let bad = Sample {
            input: vec![2, 0],
            target: vec![1],
        };
        assert!(Dataset::new(2, 1, vec![bad]).is_err());
    }
}
