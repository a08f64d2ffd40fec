//! Samples a chain from a preset unitary and compares frequencies with `|u_ij|²`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qperc::markov_sim::{empirical_frequencies, sample_chain, transition_probabilities, TransitionMatrix};
use qperc::real::RealMatrix;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::records::{ensure_dir, fmt_f64, write_csv};

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovRun {
    pub transitions: TransitionMatrix,
    pub chain: Vec<usize>,
    pub empirical: RealMatrix,
}

pub fn run_markov(cfg: &ExperimentConfig) -> Result<MarkovRun, CliError> {
    let t = transition_probabilities(&cfg.preset.unitary());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seeds[0]);
    let chain = sample_chain(&t, cfg.start, cfg.steps, &mut rng)?;
    let empirical = empirical_frequencies(&chain, t.n())?;
    Ok(MarkovRun {
        transitions: t,
        chain,
        empirical,
    })
}

/// `(next, current, value)` rows.
fn long_rows(p: &RealMatrix) -> Vec<Vec<String>> {
    let n = p.rows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| vec![i.to_string(), j.to_string(), fmt_f64(p[(i, j)])])
        .collect()
}

pub fn cmd_markov(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let run = run_markov(cfg)?;
    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    write_csv(
        &dir.join("transitions.csv"),
        &["next", "current", "probability"],
        &long_rows(run.transitions.p()),
    )?;
    let chain: Vec<Vec<String>> = run
        .chain
        .iter()
        .enumerate()
        .map(|(k, s)| vec![k.to_string(), s.to_string()])
        .collect();
    write_csv(&dir.join("chain.csv"), &["step", "state"], &chain)?;
    write_csv(
        &dir.join("empirical.csv"),
        &["next", "current", "frequency"],
        &long_rows(&run.empirical),
    )?;
    log::info!(
        "{}: max |empirical - exact| = {:e}",
        cfg.preset,
        run.empirical.max_abs_diff(run.transitions.p())
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qperc::markov_sim::Preset;

    #[test]
    fn random_preset_frequencies_are_close() {
        let cfg = ExperimentConfig {
            preset: Preset::Random { seed: 7, n: 4 },
            ..ExperimentConfig::default()
        };
        let run = run_markov(&cfg).unwrap();
        assert_eq!(run.chain.len(), 100_001);
        assert!(run.empirical.max_abs_diff(run.transitions.p()) <= 0.02);
    }

    #[test]
    fn identity_preset_stays_put() {
        let cfg = ExperimentConfig {
            preset: Preset::Identity(3),
            start: 2,
            steps: 50,
            ..ExperimentConfig::default()
        };
        assert!(run_markov(&cfg).unwrap().chain.iter().all(|&s| s == 2));
        let bad = ExperimentConfig { start: 3, ..cfg };
        assert_eq!(run_markov(&bad).unwrap_err().exit_code(), 2);
    }
}
