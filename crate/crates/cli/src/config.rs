//! Experiment configuration: an `[experiment]` marker followed by flat
//! `key = value` lines. `#` starts a comment. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use qperc::complex_linalg::CMatrix;
use qperc::markov_sim::Preset;
use qperc::measurement::MeasurableOperator;
use qperc::quantum_perceptron::UnitarizeMode;
use qperc::quantum_state::EncodingMode;
use qperc::trainer::TrainerConfig;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    DerivativeFree,
    Backprop,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DerivativeFree => "derivative_free",
            Method::Backprop => "backprop",
        }
    }
}

/// Measurable operator as written in a config file.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurableChoice {
    Sigmoid,
    /// Diagonal observable with these eigenvalues.
    Projection(Vec<f64>),
}

impl MeasurableChoice {
    pub fn build(&self) -> Result<MeasurableOperator, CliError> {
        match self {
            MeasurableChoice::Sigmoid => Ok(MeasurableOperator::ElementwiseSigmoid),
            MeasurableChoice::Projection(values) => Ok(MeasurableOperator::hermitian(CMatrix::diagonal(values))?),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub method: Method,
    pub layer_dims: Vec<usize>,
    pub baseline_layer_dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub max_iterations: usize,
    pub unitarize_mode: UnitarizeMode,
    pub measurable: MeasurableChoice,
    pub encoding: EncodingMode,
    pub learning_rates: Vec<f64>,
    pub cutoff: f64,
    pub convergence_eps: f64,
    pub output_dir: PathBuf,
    pub depths: Vec<usize>,
    pub layer_dim: usize,
    pub timing: bool,
    pub preset: Preset,
    pub steps: usize,
    pub start: usize,
    pub dataset: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            method: Method::DerivativeFree,
            layer_dims: vec![4, 4, 2],
            baseline_layer_dims: vec![2, 2, 1],
            seeds: (0..30).collect(),
            max_iterations: 100,
            unitarize_mode: UnitarizeMode::UVDagger,
            measurable: MeasurableChoice::Sigmoid,
            encoding: EncodingMode::BasisTensor,
            learning_rates: vec![0.1, 0.5, 1.0],
            cutoff: 0.5,
            convergence_eps: 1e-3,
            output_dir: PathBuf::from("out"),
            depths: vec![1, 2, 4, 8, 16, 32],
            layer_dim: 4,
            timing: false,
            preset: Preset::Hadamard,
            steps: 100_000,
            start: 0,
            dataset: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut in_section = false;
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let lineno = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if line != "[experiment]" {
                    return Err(CliError::Usage(format!("line {lineno}: unknown section `{line}`")));
                }
                if in_section {
                    return Err(CliError::Usage(format!("line {lineno}: duplicate [experiment] section")));
                }
                in_section = true;
                continue;
            }
            if !in_section {
                return Err(CliError::Usage(format!(
                    "line {lineno}: settings must follow an [experiment] marker"
                )));
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {lineno}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(CliError::Usage(format!("line {lineno}: `{key}` given twice")));
            }
            seen.push(key.to_string());
            cfg.set(key, value)
                .map_err(|msg| CliError::Usage(format!("line {lineno}: {key}: {msg}")))?;
        }
        if !in_section {
            return Err(CliError::Usage("missing [experiment] section".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "name" => self.name = value.to_string(),
            "method" => {
                self.method = match value {
                    "derivative_free" => Method::DerivativeFree,
                    "backprop" => Method::Backprop,
                    _ => return Err(format!("unknown method `{value}`")),
                }
            }
            "layer_dims" => self.layer_dims = parse_list(value)?,
            "baseline_layer_dims" => self.baseline_layer_dims = parse_list(value)?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "max_iterations" => self.max_iterations = parse_scalar(value)?,
            "unitarize_mode" => {
                self.unitarize_mode = match value {
                    "u_only" => UnitarizeMode::UOnly,
                    "uv_dagger" => UnitarizeMode::UVDagger,
                    _ => return Err(format!("expected u_only or uv_dagger, got `{value}`")),
                }
            }
            "measurable" => self.measurable = parse_measurable(value)?,
            "encoding" => {
                self.encoding = match value {
                    "basis" => EncodingMode::BasisTensor,
                    "raw" => EncodingMode::RawVector,
                    _ => return Err(format!("expected basis or raw, got `{value}`")),
                }
            }
            "learning_rates" => self.learning_rates = parse_list(value)?,
            "cutoff" => self.cutoff = parse_scalar(value)?,
            "convergence_eps" => self.convergence_eps = parse_scalar(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "depths" => self.depths = parse_list(value)?,
            "layer_dim" => self.layer_dim = parse_scalar(value)?,
            "timing" => self.timing = parse_scalar(value)?,
            "preset" => self.preset = value.parse().map_err(|e: qperc::Error| e.to_string())?,
            "steps" => self.steps = parse_scalar(value)?,
            "start" => self.start = parse_scalar(value)?,
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if self.learning_rates.is_empty() || self.learning_rates.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return bad("learning_rates must be a non-empty list of positive numbers".into());
        }
        if self.baseline_layer_dims.len() < 2 || self.baseline_layer_dims.contains(&0) {
            return bad("baseline_layer_dims needs at least two positive widths".into());
        }
        if self.depths.is_empty() || self.depths.contains(&0) {
            return bad("depths must be a non-empty list of positive integers".into());
        }
        if self.layer_dim == 0 {
            return bad("layer_dim must be positive".into());
        }
        if self.steps == 0 {
            return bad("steps must be positive".into());
        }
        self.trainer_config(self.seeds[0])?.validate()?;
        Ok(())
    }

    /// Derivative-free trainer settings for one seed.
    pub fn trainer_config(&self, seed: u64) -> Result<TrainerConfig, CliError> {
        Ok(TrainerConfig {
            layer_dims: self.layer_dims.clone(),
            unitarize_mode: self.unitarize_mode,
            measurable: self.measurable.build()?,
            max_iterations: self.max_iterations,
            accuracy_cutoff: self.cutoff,
            seed,
            convergence_eps: self.convergence_eps,
            encoding: self.encoding,
            ..TrainerConfig::default()
        })
    }
}

fn parse_scalar<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|t| parse_scalar(t.trim())).collect()
}

/// Comma list whose items are integers or ranges `a..b` (exclusive) and `a..=b`.
fn parse_seeds(value: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim) {
        if let Some((a, b)) = item.split_once("..=") {
            let (a, b): (u64, u64) = (parse_scalar(a.trim())?, parse_scalar(b.trim())?);
            out.extend(a..=b);
        } else if let Some((a, b)) = item.split_once("..") {
            let (a, b): (u64, u64) = (parse_scalar(a.trim())?, parse_scalar(b.trim())?);
            out.extend(a..b);
        } else {
            out.push(parse_scalar(item)?);
        }
    }
    Ok(out)
}

/// `sigmoid` or `projection(λ₁, …, λ_D)`.
fn parse_measurable(value: &str) -> Result<MeasurableChoice, String> {
    if value == "sigmoid" {
        return Ok(MeasurableChoice::Sigmoid);
    }
    let inner = value
        .strip_prefix("projection(")
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(|| format!("expected sigmoid or projection(...), got `{value}`"))?;
    let values: Vec<f64> = parse_list(inner)?;
    if values.is_empty() {
        return Err("projection needs at least one eigenvalue".into());
    }
    Ok(MeasurableChoice::Projection(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_round() {
        let text = "\
# xor comparison
[experiment]
name = xor
layer_dims = 4, 4, 2
seeds = 0..3, 10, 20..=21   # mixed
max_iterations = 50
unitarize_mode = u_only
measurable = projection(3, 1, -1, -2)
learning_rates = 0.5
output_dir = results
preset = random(7, 4)
timing = true
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.name, "xor");
        assert_eq!(cfg.seeds, vec![0, 1, 2, 10, 20, 21]);
        assert_eq!(cfg.max_iterations, 50);
        assert_eq!(cfg.unitarize_mode, UnitarizeMode::UOnly);
        assert_eq!(cfg.measurable, MeasurableChoice::Projection(vec![3.0, 1.0, -1.0, -2.0]));
        assert_eq!(cfg.learning_rates, vec![0.5]);
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
        assert_eq!(cfg.preset, Preset::Random { seed: 7, n: 4 });
        assert!(cfg.timing);
    }

    #[test]
    fn defaults_from_empty_section() {
        let cfg = ExperimentConfig::parse("[experiment]\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.seeds.len(), 30);
    }

    #[test]
    fn rejections() {
        let cases = [
            ("", "missing"),
            ("name = x", "marker"),
            ("[experiment]\ncolour = red", "unknown key"),
            ("[experiment]\nseeds = 1\nseeds = 2", "twice"),
            ("[experiment]\nmax_iterations = many", "cannot parse"),
            ("[experiment]\npreset = spiral", "unknown preset"),
            ("[experiment]\n[other]", "unknown section"),
            ("[experiment]\ncutoff = 1.5", "cutoff"),
            ("[experiment]\nlayer_dims = 4", "layer_dims"),
            ("[experiment]\nseeds = ", "seeds"),
            ("[experiment]\nmeasurable = projection(1, 2)", "observable"),
            ("[experiment]\njust words", "key = value"),
        ];
        for (text, needle) in cases {
            let msg = ExperimentConfig::parse(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{text:?} gave {msg:?}");
        }
        let msg = ExperimentConfig::parse("[experiment]\n\nbogus = 1").unwrap_err().to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }
}
