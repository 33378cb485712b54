use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use airsent_core::corpus::parse_query;
use airsent_core::model::TrainConfig;
use airsent_core::series::SeriesConfig;
use airsent_core::svm::SvmConfig;
use airsent_core::vectorize::TfidfConfig;
use airsent_core::{Airline, NormalizationConfig, Query};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingOptions {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for TrainingOptions {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainingOptions {
            test_fraction: d.test_fraction,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    pub top_k: usize,
    pub padding: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { top_k: 5, padding: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceOptions {
    pub bind: SocketAddr,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        ServiceOptions {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            static_dir: None,
        }
    }
}

/// Pipeline settings. Relative paths are resolved against the directory of
/// the config file (or the working directory when there is none).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub data_dir: PathBuf,
    pub model: PathBuf,
    pub reports_dir: PathBuf,
    /// Per-airline query overrides; others use the default query.
    pub queries: BTreeMap<Airline, String>,
    pub normalization: NormalizationConfig,
    pub tfidf: TfidfConfig,
    pub svm: SvmConfig,
    pub training: TrainingOptions,
    pub series: SeriesConfig,
    pub report: ReportOptions,
    pub service: ServiceOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data_dir: "data".into(),
            model: "model.json".into(),
            reports_dir: "reports".into(),
            queries: BTreeMap::new(),
            normalization: NormalizationConfig::default(),
            tfidf: TfidfConfig::default(),
            svm: SvmConfig::default(),
            training: TrainingOptions::default(),
            series: SeriesConfig::default(),
            report: ReportOptions::default(),
            service: ServiceOptions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let (mut config, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
                let config: PipelineConfig = toml::from_str(&text)
                    .map_err(|e| CliError::usage(format!("invalid config {}: {e}", p.display())))?;
                (config, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (PipelineConfig::default(), PathBuf::new()),
        };
        config.resolve(&base);
        config.validate()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.data_dir);
        join(&mut self.model);
        join(&mut self.reports_dir);
        if let Some(p) = self.normalization.stopword_file.as_mut() {
            join(p);
        }
        if let Some(p) = self.service.static_dir.as_mut() {
            join(p);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.normalization.validate()?;
        if let Some(p) = &self.normalization.stopword_file {
            if !p.is_file() {
                return Err(CliError::usage(format!("stopword file {} does not exist", p.display())));
            }
        }
        if let Some(p) = &self.service.static_dir {
            if !p.is_dir() {
                return Err(CliError::usage(format!("static directory {} does not exist", p.display())));
            }
        }
        for query in self.queries.values() {
            parse_query(query)?;
        }
        let t = &self.training;
        if !(0.0..1.0).contains(&t.test_fraction) {
            return Err(CliError::usage(format!(
                "test_fraction must be in [0, 1), got {}",
                t.test_fraction
            )));
        }
        self.check_series(self.series.window, self.series.multiplier)?;
        if self.report.top_k == 0 {
            return Err(CliError::usage("report.top_k must be at least 1"));
        }
        Ok(())
    }

    pub fn check_series(&self, window: usize, k: f64) -> Result<(), CliError> {
        if window == 0 {
            return Err(CliError::usage("window must be at least 1"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(CliError::usage(format!("k must be positive, got {k}")));
        }
        Ok(())
    }

    pub fn query(&self, airline: Airline) -> Result<Query, CliError> {
        let source = self.queries.get(&airline).cloned().unwrap_or_else(|| airline.default_query());
        Ok(parse_query(&source)?)
    }

    pub fn train_config(&self, seed: Option<u64>) -> TrainConfig {
        TrainConfig {
            normalization: self.normalization.clone(),
            tfidf: self.tfidf.clone(),
            svm: self.svm.clone(),
            test_fraction: self.training.test_fraction,
            seed: seed.unwrap_or(self.training.seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use airsent_core::svm::KernelChoice;

    #[test]
    fn example_config_loads() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("airsent.example.toml");
        let config = PipelineConfig::load(Some(&path)).unwrap();
        assert_eq!(config.svm.kernel, KernelChoice::Scale);
        assert_eq!(config.series.window, 14);
        assert!(config.model.ends_with("models/sentiment.json"));
        assert!(config.model.is_absolute());
        assert!(config.queries.contains_key(&Airline::Delta));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        for text in ["windw = 3", "[series]\nwindow = 0", "[training]\ntest_fraction = 1.5", "[queries]\ndelta = \"(a\""] {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("c.toml");
            std::fs::write(&path, text).unwrap();
            let err = PipelineConfig::load(Some(&path)).unwrap_err();
            assert_eq!(err.code, crate::EXIT_USAGE, "{text}");
        }
    }

    #[test]
    fn rbf_kernel_table_parses() {
        let config: PipelineConfig = toml::from_str("[svm]\nkernel = { rbf = { sigma = 0.7 } }\nc = 2.0").unwrap();
        assert_eq!(config.svm.kernel, KernelChoice::Rbf { sigma: 0.7 });
        assert_eq!(config.svm.smo.c, 2.0);
    }
}
