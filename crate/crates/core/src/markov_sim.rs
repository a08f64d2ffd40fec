//! Markov chains driven by a unitary: `p[i][j] = |u_ij|²` is the probability of
//! moving to state `i` from state `j`, so every column of `p` is a distribution.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex_linalg::{random_unitary, CMatrix, Complex, UnitaryMatrix, ZERO};
use crate::error::{Error, Result};
use crate::real::RealMatrix;

/// Doubly stochastic matrix `p[(next, current)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    p: RealMatrix,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.p.rows()
    }

    pub fn p(&self) -> &RealMatrix {
        &self.p
    }

    /// `Pr(next = i | current = j)`.
    pub fn prob(&self, next: usize, current: usize) -> f64 {
        self.p[(next, current)]
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochasticity_defect(&self) -> f64 {
        let n = self.n();
        (0..n)
            .flat_map(|k| {
                let row: f64 = (0..n).map(|j| self.p[(k, j)]).sum();
                let col: f64 = (0..n).map(|i| self.p[(i, k)]).sum();
                [(row - 1.0).abs(), (col - 1.0).abs()]
            })
            .fold(0.0, f64::max)
    }

    /// `k`-step transition matrix `p^k`.
    pub fn power(&self, k: usize) -> RealMatrix {
        let mut acc = RealMatrix::identity(self.n());
        for _ in 0..k {
            acc = self.p.matmul(&acc).expect("square");
        }
        acc
    }
}

pub fn transition_probabilities(u: &UnitaryMatrix) -> TransitionMatrix {
    let n = u.dim();
    TransitionMatrix {
        p: RealMatrix::from_fn(n, n, |i, j| u[(i, j)].norm_sqr()),
    }
}

/// Walks `steps` transitions from `start`; the result has `steps + 1` entries.
pub fn sample_chain<R: Rng + ?Sized>(
    t: &TransitionMatrix,
    start: usize,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = t.n();
    if start >= n {
        return Err(Error::Range { index: start, dim: n });
    }
    // Column-wise CDFs so each step is a single uniform draw and a scan.
    let cdfs: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            (0..n)
                .map(|i| {
                    acc += t.prob(i, j);
                    acc
                })
                .collect()
        })
        .collect();
    let mut chain = Vec::with_capacity(steps + 1);
    let mut state = start;
    chain.push(state);
    for _ in 0..steps {
        let cdf = &cdfs[state];
        let r = rng.random::<f64>() * cdf[n - 1];
        state = cdf.iter().position(|&c| r < c).unwrap_or(n - 1);
        chain.push(state);
    }
    Ok(chain)
}

/// Counts of `current → next` over `lag` steps, indexed `[next][current]`.
pub fn transition_counts(chain: &[usize], n: usize, lag: usize) -> Result<Vec<Vec<u64>>> {
    if lag == 0 || chain.len() <= lag {
        return Err(Error::EmptyInput("chain too short for the requested lag"));
    }
    if let Some(&s) = chain.iter().find(|&&s| s >= n) {
        return Err(Error::Range { index: s, dim: n });
    }
    let mut counts = vec![vec![0u64; n]; n];
    for w in chain.windows(lag + 1) {
        counts[w[lag]][w[0]] += 1;
    }
    Ok(counts)
}

/// Empirical `p̂[(next, current)]`, normalized over each current state so it is
/// directly comparable with [`TransitionMatrix::p`]. Unvisited states give zero columns.
pub fn empirical_frequencies(chain: &[usize], n: usize) -> Result<RealMatrix> {
    empirical_k_step(chain, n, 1)
}

pub fn empirical_k_step(chain: &[usize], n: usize, k: usize) -> Result<RealMatrix> {
    let counts = transition_counts(chain, n, k)?;
    let totals: Vec<u64> = (0..n).map(|j| (0..n).map(|i| counts[i][j]).sum()).collect();
    Ok(RealMatrix::from_fn(n, n, |i, j| {
        if totals[j] == 0 {
            0.0
        } else {
            counts[i][j] as f64 / totals[j] as f64
        }
    }))
}

/// Pearson goodness of fit of one-step counts against `t`, pooled over the
/// visited current states. Returns `(statistic, degrees_of_freedom)`; an
/// observed transition with zero exact probability yields an infinite statistic.
pub fn chi_square(counts: &[Vec<u64>], t: &TransitionMatrix) -> (f64, usize) {
    let n = t.n();
    let mut stat = 0.0;
    let mut dof = 0;
    for j in 0..n {
        let total: u64 = (0..n).map(|i| counts[i][j]).sum();
        if total == 0 {
            continue;
        }
        let mut support = 0;
        for i in 0..n {
            let p = t.prob(i, j);
            let observed = counts[i][j] as f64;
            if p <= 0.0 {
                if observed > 0.0 {
                    stat = f64::INFINITY;
                }
                continue;
            }
            support += 1;
            let expected = p * total as f64;
            stat += (observed - expected).powi(2) / expected;
        }
        dof += support.max(1) - 1;
    }
    (stat, dof)
}

/// Named unitaries for chain simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Identity(usize),
    Hadamard,
    Cyclic(usize),
    Random { seed: u64, n: usize },
}

impl Preset {
    pub fn unitary(&self) -> UnitaryMatrix {
        match *self {
            Preset::Identity(n) => UnitaryMatrix::identity(n),
            Preset::Hadamard => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let m = CMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]).expect("2x2");
                UnitaryMatrix::new(m).expect("Hadamard is unitary")
            }
            Preset::Cyclic(n) => {
                // |j⟩ → |j+1 mod n⟩
                let m = CMatrix::from_fn(n, n, |i, j| {
                    if i == (j + 1) % n {
                        Complex::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                });
                UnitaryMatrix::new(m).expect("permutations are unitary")
            }
            Preset::Random { seed, n } => random_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed)),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// `identity`, `identity(n)`, `hadamard`, `cyclic(n)`, `random(seed, n)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], Some(&s[open + 1..s.len() - 1])),
            Some(_) => return Err(Error::Config(format!("malformed preset `{s}`"))),
            None => (s, None),
        };
        let args: Vec<u64> = match args {
            None => Vec::new(),
            Some(a) => a
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad preset argument `{}`", t.trim())))
                })
                .collect::<Result<_>>()?,
        };
        let dim = |v: u64| -> Result<usize> {
            if v == 0 {
                Err(Error::Config("preset dimension must be positive".into()))
            } else {
                Ok(v as usize)
            }
        };
        match (name.trim(), args.as_slice()) {
            ("identity", []) => Ok(Preset::Identity(2)),
            ("identity", [n]) => Ok(Preset::Identity(dim(*n)?)),
            ("hadamard", []) => Ok(Preset::Hadamard),
            ("cyclic", [n]) => Ok(Preset::Cyclic(dim(*n)?)),
            ("random", [seed, n]) => Ok(Preset::Random { seed: *seed, n: dim(*n)? }),
            _ => Err(Error::Config(format!("unknown preset `{s}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Identity(n) => write!(f, "identity({n})"),
            Preset::Hadamard => write!(f, "hadamard"),
            Preset::Cyclic(n) => write!(f, "cyclic({n})"),
            Preset::Random { seed, n } => write!(f, "random({seed}, {n})"),
        }
    }
}
