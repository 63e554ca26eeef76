use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::SearchOptions;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerance_success: f64,
    pub tolerance_fail: f64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub format: OutputFormat,
    /// `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance_success: tol::SUCCESS,
            tolerance_fail: tol::FAIL,
            restarts: 50,
            max_iterations: 5000,
            format: OutputFormat::Json,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let (s, f) = (self.tolerance_success, self.tolerance_fail);
        if !(s > 0.0 && s.is_finite()) || !(f > 0.0 && f.is_finite()) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if f <= s {
            return Err(Error::InvalidParameter(format!(
                "tolerance_fail ({f:e}) must exceed tolerance_success ({s:e})"
            )));
        }
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidParameter("restarts and max_iterations must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        Ok(())
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            seed: self.seed,
            restarts: self.restarts,
            max_iter: self.max_iterations,
            tol_success: self.tolerance_success,
            tol_fail: self.tolerance_fail,
        }
    }

    /// Header embedded in every output. The worker count is left out because
    /// outputs do not depend on it.
    pub fn header(&self) -> ConfigHeader {
        ConfigHeader {
            tool: "cohdist".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: self.seed,
            tolerance_success: self.tolerance_success,
            tolerance_fail: self.tolerance_fail,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            conventions: Conventions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub stochastic: String,
    pub vectorization: String,
    pub tensor_order: String,
    pub indices: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            stochastic: "column".into(),
            vectorization: "row-wise".into(),
            tensor_order: "output-reference".into(),
            indices: "0-based".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigHeader {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tolerance_success: f64,
    pub tolerance_fail: f64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub conventions: Conventions,
}

impl ConfigHeader {
    /// `# key=value` comment lines for CSV output.
    pub fn csv_comment(&self) -> String {
        format!(
            "# tool={} version={}\n# seed={} tolerance_success={:e} tolerance_fail={:e} restarts={} max_iterations={}\n# conventions: stochastic={} vectorization={} tensor_order={} indices={}\n",
            self.tool,
            self.version,
            self.seed,
            self.tolerance_success,
            self.tolerance_fail,
            self.restarts,
            self.max_iterations,
            self.conventions.stochastic,
            self.conventions.vectorization,
            self.conventions.tensor_order,
            self.conventions.indices,
        )
    }
}
