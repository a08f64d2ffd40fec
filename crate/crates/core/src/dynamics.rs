//! Continuous-time neuron dynamics `τᵢ dZᵢ/dt = −Zᵢ + f((W Z)ᵢ)` integrated with
//! forward Euler, and fixed-point search by running the flow to rest.

use crate::error::{Error, Result};
use crate::measurement::sigmoid;
use crate::real::RealMatrix;

pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Sigmoid,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsState {
    pub z: Vec<f64>,
    pub tau: Vec<f64>,
    pub w: RealMatrix,
    pub f: Activation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub z_star: Vec<f64>,
    pub residual: f64,
    pub steps_used: usize,
}

impl DynamicsState {
    pub fn new(z: Vec<f64>, tau: Vec<f64>, w: RealMatrix) -> Result<Self> {
        let n = z.len();
        if n == 0 {
            return Err(Error::EmptyInput("activation vector"));
        }
        if tau.len() != n {
            return Err(Error::lengths(tau.len(), n));
        }
        if w.shape() != (n, n) {
            return Err(Error::shapes(w.shape(), (n, n)));
        }
        if let Some(t) = tau.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Contract(format!("time constant {t} must be positive")));
        }
        Ok(Self {
            z,
            tau,
            w,
            f: Activation::Sigmoid,
        })
    }

    /// `−z + f(W z)`, the right-hand side without the time constants.
    pub fn drive(&self) -> Vec<f64> {
        let wz = self.w.matvec(&self.z).expect("shape checked at construction");
        self.z
            .iter()
            .zip(wz)
            .map(|(z, a)| -z + self.f.apply(a))
            .collect()
    }

    /// `‖−z + f(W z)‖_∞`.
    pub fn residual(&self) -> f64 {
        self.drive().iter().map(|d| d.abs()).fold(0.0, f64::max)
    }
}

pub fn euler_step(s: &DynamicsState, dt: f64) -> Result<DynamicsState> {
    if !(dt > 0.0) {
        return Err(Error::Contract(format!("step size {dt} must be positive")));
    }
    let drive = s.drive();
    let z = s
        .z
        .iter()
        .zip(&s.tau)
        .zip(drive)
        .map(|((z, tau), d)| z + (dt / tau) * d)
        .collect();
    Ok(DynamicsState { z, ..s.clone() })
}

/// Steps until the residual drops below `eps` or `max_steps` is reached.
/// Non-convergence is reported through `steps_used == max_steps` and the residual.
pub fn integrate_to_fixed_point(
    s: &DynamicsState,
    dt: f64,
    max_steps: usize,
    eps: f64,
) -> Result<FixedPoint> {
    if !(eps > 0.0) {
        return Err(Error::Contract(format!("tolerance {eps} must be positive")));
    }
    let mut state = s.clone();
    let mut steps = 0;
    let mut residual = state.residual();
    while residual >= eps && steps < max_steps {
        state = euler_step(&state, dt)?;
        steps += 1;
        residual = state.residual();
    }
    Ok(FixedPoint {
        z_star: state.z,
        residual,
        steps_used: steps,
    })
}

/// Every intermediate state from `s` through `steps` Euler steps.
pub fn trajectory(s: &DynamicsState, dt: f64, steps: usize) -> Result<Vec<DynamicsState>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s.clone());
    for _ in 0..steps {
        let next = euler_step(out.last().expect("non-empty"), dt)?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_net(n: usize) -> DynamicsState {
        DynamicsState::new(vec![0.0; n], vec![1.0; n], RealMatrix::zeros(n, n)).unwrap()
    }

    /// Random W rescaled to spectral norm 0.1.
    fn contractive(n: usize, seed: u64) -> RealMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let scale = 0.1 / w.spectral_norm();
        RealMatrix::from_fn(n, n, |i, j| w[(i, j)] * scale)
    }

    /// Picard iteration `z ← f(W z)`.
    fn picard(w: &RealMatrix, n: usize) -> Vec<f64> {
        let mut z = vec![0.0; n];
        for _ in 0..200 {
            z = w.matvec(&z).unwrap().into_iter().map(sigmoid).collect();
        }
        z
    }

    #[test]
    fn first_step_from_rest() {
        let next = euler_step(&zero_net(3), 0.1).unwrap();
        for z in next.z {
            assert!((z - 0.05).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_point_is_stationary() {
        let w = contractive(4, 1);
        let z = picard(&w, 4);
        let s = DynamicsState::new(z.clone(), vec![1.0; 4], w).unwrap();
        let next = euler_step(&s, 0.1).unwrap();
        for (a, b) in next.z.iter().zip(&z) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn euler_is_first_order() {
        let w = contractive(5, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z0: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
        let tau: Vec<f64> = (0..5).map(|_| rng.random_range(0.5..2.0)).collect();
        let s = DynamicsState::new(z0, tau, w).unwrap();
        let end = |dt: f64, steps: usize| trajectory(&s, dt, steps).unwrap().pop().unwrap().z;
        let coarse = end(0.1, 100);
        let half = end(0.05, 200);
        let quarter = end(0.025, 400);
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let e1 = diff(&coarse, &half);
        let e2 = diff(&half, &quarter);
        assert!(e1 < 0.1 * 1.0, "difference {e1} should be O(dt)");
        let ratio = e1 / e2;
        assert!((1.7..2.3).contains(&ratio), "halving ratio {ratio}");
    }

    #[test]
    fn zero_weights_converge_to_half() {
        let fp = integrate_to_fixed_point(&zero_net(3), 0.1, 200, 1e-8).unwrap();
        assert!(fp.steps_used < 200);
        assert!(fp.residual < 1e-8);
        for z in fp.z_star {
            assert!((z - 0.5).abs() < 1e-7);
        }
    }

    #[test]
    fn tau_and_dt_scaling_cancel() {
        let w = contractive(3, 3);
        let slow = DynamicsState::new(vec![0.2, 0.4, 0.9], vec![10.0, 20.0, 5.0], w.clone()).unwrap();
        let fast = DynamicsState::new(vec![0.2, 0.4, 0.9], vec![1.0, 2.0, 0.5], w).unwrap();
        let a = trajectory(&slow, 1.0, 50).unwrap();
        let b = trajectory(&fast, 0.1, 50).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (p, q) in x.z.iter().zip(&y.z) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fixed_point_matches_picard_oracle() {
        let w = contractive(6, 11);
        let s = DynamicsState::new(vec![0.0; 6], vec![1.0; 6], w.clone()).unwrap();
        let fp = integrate_to_fixed_point(&s, DEFAULT_DT, DEFAULT_MAX_STEPS, DEFAULT_EPS).unwrap();
        let oracle = picard(&w, 6);
        for (a, b) in fp.z_star.iter().zip(oracle) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn tau_does_not_move_the_fixed_point() {
        let w = contractive(4, 5);
        let base = DynamicsState::new(vec![0.1; 4], vec![1.0, 0.5, 2.0, 1.5], w).unwrap();
        let doubled = DynamicsState {
            tau: base.tau.iter().map(|t| 2.0 * t).collect(),
            ..base.clone()
        };
        let a = integrate_to_fixed_point(&base, 0.1, 100_000, 1e-10).unwrap();
        let b = integrate_to_fixed_point(&doubled, 0.1, 100_000, 1e-10).unwrap();
        for (x, y) in a.z_star.iter().zip(&b.z_star) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn activations_stay_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let w = RealMatrix::from_fn(5, 5, |_, _| rng.random_range(-4.0..4.0));
        let z0: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..=1.0)).collect();
        let s = DynamicsState::new(z0, vec![0.5, 1.0, 1.0, 2.0, 0.7], w).unwrap();
        for st in trajectory(&s, 0.5, 300).unwrap().iter().skip(1) {
            assert!(st.z.iter().all(|&z| z > 0.0 && z < 1.0));
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let fp = integrate_to_fixed_point(&zero_net(2), 0.1, 3, 1e-8).unwrap();
        assert_eq!(fp.steps_used, 3);
        assert!(fp.residual > 1e-8);
    }

    #[test]
    fn invalid_inputs() {
        assert!(euler_step(&zero_net(2), 0.0).is_err());
        assert!(DynamicsState::new(vec![0.0], vec![-1.0], RealMatrix::zeros(1, 1)).is_err());
        assert!(DynamicsState::new(vec![0.0; 2], vec![1.0], RealMatrix::zeros(2, 2)).is_err());
    }
}
