use std::fs;
use std::path::{Path, PathBuf};

use nflp::FitConfig;
use serde::{Deserialize, Serialize};

use crate::args::{CommonArgs, FitFlags, Format};
use crate::error::{CliError, Result};

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub response: Option<String>,
    pub covariates: Option<Vec<String>>,
    pub intercept: Option<bool>,
    pub alpha: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub group: Option<String>,
    #[serde(default)]
    pub fit: FitConfig,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings of a run: flags and environment first, then the
/// config file, then defaults.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub response: String,
    pub covariates: Vec<String>,
    pub intercept: bool,
    pub alpha: f64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub fit: FitConfig,
}

fn apply_fit_flags(mut fit: FitConfig, flags: &FitFlags) -> FitConfig {
    if let Some(v) = flags.seed {
        fit.seed = v;
    }
    if let Some(v) = flags.min_omega {
        fit.min_omega = v;
    }
    if let Some(v) = flags.starts {
        fit.n_starts = v;
    }
    if let Some(v) = flags.init_omega {
        fit.init_omega = v;
    }
    if let Some(v) = flags.tol {
        fit.convergence_tol = v;
    }
    if let Some(v) = flags.max_iterations {
        fit.max_iterations = v;
    }
    if let Some(v) = flags.dedup_tol {
        fit.dedup_tol = v;
    }
    fit
}

impl RunConfig {
    pub fn resolve(
        common: &CommonArgs,
        covariates: Option<Vec<String>>,
        no_intercept: bool,
        group: Option<String>,
    ) -> Result<Self> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let input = common
            .input
            .clone()
            .or(file.input)
            .ok_or_else(|| CliError::usage("no input file (use --input)"))?;
        let response = common
            .response
            .clone()
            .or(file.response)
            .ok_or_else(|| CliError::usage("no response column (use --response)"))?;
        let cfg = Self {
            input,
            response,
            covariates: covariates.or(file.covariates).unwrap_or_default(),
            intercept: if no_intercept { false } else { file.intercept.unwrap_or(true) },
            alpha: common.alpha.or(file.alpha).unwrap_or(0.05),
            format: common.format.or(file.format).unwrap_or_default(),
            output: common.output.clone().or(file.output),
            group: group.or(file.group),
            fit: apply_fit_flags(file.fit, &common.fit),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::usage(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.fit.validate().map_err(|e| CliError::usage(e.to_string()))?;
        if self.covariates.iter().any(|c| *c == self.response) {
            return Err(CliError::usage(format!("response '{}' is also listed as a covariate", self.response)));
        }
        for (i, c) in self.covariates.iter().enumerate() {
            if c.is_empty() {
                return Err(CliError::usage("empty covariate name"));
            }
            if self.covariates[..i].contains(c) {
                return Err(CliError::usage(format!("covariate '{c}' listed twice")));
            }
        }
        if !self.intercept && self.covariates.is_empty() {
            return Err(CliError::usage("a model without intercept needs at least one covariate"));
        }
        if self.group.as_ref() == Some(&self.response) {
            return Err(CliError::usage("group column and response are the same"));
        }
        Ok(())
    }
}
