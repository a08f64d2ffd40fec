use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qperc::complex_linalg::random_unitary;
use qperc::dataset::Dataset;
use qperc::markov_sim::transition_probabilities;
use qperc::measurement::MeasurableOperator;
use qperc::quantum_perceptron::{QuantumPerceptron, TrainingPair, UnitarizeMode};
use qperc::quantum_state::basis_ket;
use qperc::trainer::{evaluate, train, TrainerConfig};

#[test]
fn permutation_dataset_is_reproduced_exactly() {
    let perm = [2usize, 0, 3, 1];
    let pairs: Vec<TrainingPair> = perm
        .iter()
        .enumerate()
        .map(|(x, &y)| TrainingPair::new(basis_ket(x, 4).unwrap(), basis_ket(y, 4).unwrap()).unwrap())
        .collect();
    for mode in [UnitarizeMode::UOnly, UnitarizeMode::UVDagger] {
        let p = QuantumPerceptron::from_pairs(&pairs, mode).unwrap();
        for (x, &y) in perm.iter().enumerate() {
            let out = p.forward(&basis_ket(x, 4).unwrap()).unwrap();
            let want = basis_ket(y, 4).unwrap();
            assert!(out.amplitudes().max_abs_diff(want.amplitudes()) < 1e-12);
        }
    }
}

#[test]
fn xor_training_is_reproducible_and_bounded() {
    let data = Dataset::xor();
    let cfg = TrainerConfig::xor(11);
    let a = train(&data, &cfg).unwrap();
    let b = train(&data, &cfg).unwrap();
    assert_eq!(a.table_loss_history, b.table_loss_history);
    assert_eq!(a.loss_history, b.loss_history);
    assert_eq!(a.loss_history.len(), cfg.max_iterations);
    for (&l, &acc) in a.table_loss_history.iter().zip(&a.table_accuracy_history) {
        assert!((0.0..=1.0).contains(&l));
        assert!((0.0..=1.0).contains(&acc));
    }
    for layer in &a.network.unitaries {
        assert!(layer.matrix().unitarity_defect() < 1e-10);
    }
    let c = train(&data, &TrainerConfig::xor(12)).unwrap();
    assert_ne!(a.table_loss_history, c.table_loss_history);
}

#[test]
fn evaluation_of_trained_network_matches_last_table_entry() {
    let data = Dataset::xor();
    let cfg = TrainerConfig::xor(5);
    let res = train(&data, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (acc, loss) = evaluate(
        &res.network,
        data.rows(),
        &MeasurableOperator::ElementwiseSigmoid,
        cfg.accuracy_cutoff,
        &mut rng,
    )
    .unwrap();
    assert!((acc - res.table_accuracy_history.last().unwrap()).abs() < 1e-12);
    assert!((loss - res.table_loss_history.last().unwrap()).abs() < 1e-12);
}

#[test]
fn random_unitaries_drive_doubly_stochastic_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 2..=16 {
        let t = transition_probabilities(&random_unitary(n, &mut rng));
        assert!(t.stochasticity_defect() < 1e-12);
        let t3 = t.power(3);
        for k in 0..n {
            let row: f64 = t3.row(k).iter().sum();
            let col: f64 = (0..n).map(|i| t3[(i, k)]).sum();
            assert!((row - 1.0).abs() < 1e-12 && (col - 1.0).abs() < 1e-12);
        }
    }
}
