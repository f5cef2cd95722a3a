//! Experiment configuration: TOML with a validating loader.
//!
//! Every validation error names the offending key and its line.

use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[value(rename_all = "lowercase")]
pub enum ModelId {
    Ma2,
    Mg1,
    Stereo,
    Toads,
    Boombust,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Ma2 => "ma2",
            ModelId::Mg1 => "mg1",
            ModelId::Stereo => "stereo",
            ModelId::Toads => "toads",
            ModelId::Boombust => "boombust",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Gaussian,
    Semiparametric,
    SemiparametricShrunk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Sl,
    Abc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    None,
    SinhArcsinh,
    Power,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub id: ModelId,
    /// Raw observed dataset (CSV).
    pub observed: Spanned<PathBuf>,
    /// Seed for the toads auxiliary mixture fit.
    #[serde(default)]
    pub auxiliary_seed: u64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub kind: TransformKind,
    #[serde(default)]
    pub epsilon: Option<Spanned<f64>>,
    #[serde(default)]
    pub delta: Option<Spanned<f64>>,
    /// Draw per-component (epsilon, delta) from this seed instead.
    #[serde(default)]
    pub random_seed: Option<u64>,
    #[serde(default)]
    pub power: Option<Spanned<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub kind: EstimatorKind,
    pub n: Spanned<i64>,
    #[serde(default)]
    pub lambda: Option<Spanned<f64>>,
    /// Tune lambda to this log-likelihood standard deviation.
    #[serde(default)]
    pub target_std: Option<Spanned<f64>>,
    #[serde(default = "default_tune_replicates")]
    pub tune_replicates: usize,
}

fn default_tune_replicates() -> usize {
    50
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub kind: SamplerKind,
    pub iterations: Spanned<i64>,
    pub theta0: Spanned<Vec<f64>>,
    #[serde(default)]
    pub tolerance: Option<Spanned<f64>>,
    /// Simulations for the ABC Mahalanobis covariance.
    #[serde(default = "default_mahalanobis_n")]
    pub mahalanobis_n: usize,
    /// Parameter at which those simulations run; defaults to `theta0`.
    #[serde(default)]
    pub mahalanobis_theta: Option<Vec<f64>>,
    #[serde(default = "default_outlier_z")]
    pub outlier_z: f64,
    #[serde(default = "default_init_retries")]
    pub init_retries: usize,
}

fn default_mahalanobis_n() -> usize {
    1000
}
fn default_outlier_z() -> f64 {
    5.0
}
fn default_init_retries() -> usize {
    semibsl::mcmc::DEFAULT_INIT_RETRIES
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalSection {
    #[serde(default)]
    pub covariance: Option<Spanned<Vec<Vec<f64>>>>,
    #[serde(default)]
    pub diagonal: Option<Spanned<Vec<f64>>>,
    /// Covariance CSV written by a pilot run.
    #[serde(default)]
    pub file: Option<Spanned<PathBuf>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PilotSection {
    #[serde(default)]
    pub burnin: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSection,
    #[serde(default)]
    pub transform: Option<TransformSection>,
    pub estimator: Option<EstimatorSection>,
    pub sampler: SamplerSection,
    pub proposal: Spanned<ProposalSection>,
    #[serde(default)]
    pub pilot: Option<PilotSection>,
}

/// Validated configuration plus the directory relative paths resolve from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
    pub path: PathBuf,
    source: String,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&source, path)
    }

    pub fn parse(source: &str, path: &Path) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(source).map_err(|e| {
            let line = e.span().map(|s| line_of(source, s.start)).unwrap_or(1);
            ConfigError(format!("{}:{line}: {}", path.display(), e.message()))
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let loaded = LoadedConfig { config, base_dir, path: path.to_path_buf(), source: source.to_string() };
        loaded.validate()?;
        Ok(loaded)
    }

    fn err(&self, span: Range<usize>, msg: impl std::fmt::Display) -> ConfigError {
        ConfigError(format!("{}:{}: {msg}", self.path.display(), line_of(&self.source, span.start)))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn n(&self) -> usize {
        self.config.estimator.as_ref().map_or(1, |e| *e.n.get_ref() as usize)
    }

    pub fn iterations(&self) -> usize {
        *self.config.sampler.iterations.get_ref() as usize
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        let obs = &c.model.observed;
        if !self.resolve(obs.get_ref()).is_file() {
            return Err(self.err(obs.span(), format!("model.observed: file {} does not exist", obs.get_ref().display())));
        }
        let it = &c.sampler.iterations;
        if *it.get_ref() < 1 {
            return Err(self.err(it.span(), format!("sampler.iterations must be at least 1, got {}", it.get_ref())));
        }
        match c.sampler.kind {
            SamplerKind::Sl => {
                let est = c.estimator.as_ref().ok_or_else(|| {
                    ConfigError(format!("{}: [estimator] section is required for the sl sampler", self.path.display()))
                })?;
                if *est.n.get_ref() < 3 {
                    return Err(self.err(est.n.span(), format!("estimator.n must be at least 3, got {}", est.n.get_ref())));
                }
                if est.kind == EstimatorKind::SemiparametricShrunk {
                    match (&est.lambda, &est.target_std) {
                        (Some(l), None) => {
                            if !(0.0..=1.0).contains(l.get_ref()) {
                                return Err(self.err(l.span(), format!("estimator.lambda must lie in [0, 1], got {}", l.get_ref())));
                            }
                        }
                        (None, Some(t)) => {
                            if !(*t.get_ref() > 0.0) {
                                return Err(self.err(t.span(), format!("estimator.target_std must be positive, got {}", t.get_ref())));
                            }
                        }
                        _ => {
                            return Err(self.err(
                                est.n.span(),
                                "semiparametric-shrunk needs exactly one of estimator.lambda or estimator.target_std",
                            ))
                        }
                    }
                }
            }
            SamplerKind::Abc => {
                let tol = c.sampler.tolerance.as_ref().ok_or_else(|| {
                    self.err(c.sampler.iterations.span(), "sampler.tolerance is required for the abc sampler")
                })?;
                if !(*tol.get_ref() > 0.0) {
                    return Err(self.err(tol.span(), format!("sampler.tolerance must be positive, got {}", tol.get_ref())));
                }
            }
        }
        if let Some(t) = &c.transform {
            match t.kind {
                TransformKind::SinhArcsinh if t.random_seed.is_none() => {
                    if let Some(d) = &t.delta {
                        if !(*d.get_ref() > 0.0) {
                            return Err(self.err(d.span(), format!("transform.delta must be positive, got {}", d.get_ref())));
                        }
                    }
                }
                TransformKind::Power => match &t.power {
                    Some(p) if *p.get_ref() > 0.0 => {}
                    Some(p) => return Err(self.err(p.span(), format!("transform.power must be positive, got {}", p.get_ref()))),
                    None => return Err(ConfigError(format!("{}: transform.power is required", self.path.display()))),
                },
                _ => {}
            }
        }
        let prop = c.proposal.get_ref();
        let given = [prop.covariance.is_some(), prop.diagonal.is_some(), prop.file.is_some()].iter().filter(|&&b| b).count();
        if given != 1 {
            return Err(self.err(c.proposal.span(), "[proposal] needs exactly one of covariance, diagonal or file"));
        }
        if let Some(f) = &prop.file {
            if !self.resolve(f.get_ref()).is_file() {
                return Err(self.err(f.span(), format!("proposal.file: {} does not exist", f.get_ref().display())));
            }
        }
        if let Some(cov) = &prop.covariance {
            let p = cov.get_ref().len();
            if cov.get_ref().iter().any(|r| r.len() != p) {
                return Err(self.err(cov.span(), "proposal.covariance must be a square matrix"));
            }
        }
        Ok(())
    }

    /// Proposal dimension check and bounds that need the model.
    pub fn check_dimension(&self, p: usize) -> Result<(), ConfigError> {
        let t0 = &self.config.sampler.theta0;
        if t0.get_ref().len() != p {
            return Err(self.err(t0.span(), format!("sampler.theta0 has {} entries, the model has {p} parameters", t0.get_ref().len())));
        }
        let prop = self.config.proposal.get_ref();
        if let Some(c) = &prop.covariance {
            if c.get_ref().len() != p {
                return Err(self.err(c.span(), format!("proposal.covariance is {0}x{0}, expected {p}x{p}", c.get_ref().len())));
            }
        }
        if let Some(d) = &prop.diagonal {
            if d.get_ref().len() != p {
                return Err(self.err(d.span(), format!("proposal.diagonal has {} entries, expected {p}", d.get_ref().len())));
            }
        }
        Ok(())
    }

    pub fn theta0_error(&self, msg: impl std::fmt::Display) -> ConfigError {
        self.err(self.config.sampler.theta0.span(), msg)
    }

    pub fn proposal_error(&self, msg: impl std::fmt::Display) -> ConfigError {
        self.err(self.config.proposal.span(), msg)
    }
}
