use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

pub const DEFAULT_PORT: u16 = 8080;

/// Service settings. Loaded from an optional JSON file, then overridden by
/// `AVLAB_*` environment variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ServiceConfig {
    pub port: u16,
    /// Seed for session ids, k assignment and per-session election draws.
    pub seed: u64,
    /// Currency per unit of scenario utility.
    pub payout_multiplier: f64,
    /// Fixed participation payment, reported alongside the bonus.
    pub base_payout: f64,
    /// Upper bound on the accumulated bonus.
    pub payoff_cap: f64,
    /// Shuffle conditions within each winner-count block.
    pub shuffle: bool,
    /// Event log directory; `None` keeps sessions in memory only.
    pub data_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: DEFAULT_PORT,
            seed: 0,
            payout_multiplier: 1.0,
            base_payout: 1.0,
            payoff_cap: 8.0,
            shuffle: false,
            data_dir: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_file(path: &Path) -> Result<Self, ServiceError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))
    }

    /// Applies `AVLAB_PORT`, `AVLAB_SEED`, `AVLAB_PAYOUT_MULTIPLIER`,
    /// `AVLAB_BASE_PAYOUT`, `AVLAB_PAYOFF_CAP`, `AVLAB_SHUFFLE` and
    /// `AVLAB_DATA_DIR` when set.
    pub fn with_env(mut self) -> Result<Self, ServiceError> {
        fn var<T: std::str::FromStr>(name: &str) -> Result<Option<T>, ServiceError> {
            match env::var(name) {
                Ok(v) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| ServiceError::Config(format!("{name}: cannot parse `{v}`"))),
                Err(_) => Ok(None),
            }
        }
        if let Some(v) = var("AVLAB_PORT")? {
            self.port = v;
        }
        if let Some(v) = var("AVLAB_SEED")? {
            self.seed = v;
        }
        if let Some(v) = var("AVLAB_PAYOUT_MULTIPLIER")? {
            self.payout_multiplier = v;
        }
        if let Some(v) = var("AVLAB_BASE_PAYOUT")? {
            self.base_payout = v;
        }
        if let Some(v) = var("AVLAB_PAYOFF_CAP")? {
            self.payoff_cap = v;
        }
        if let Some(v) = var("AVLAB_SHUFFLE")? {
            self.shuffle = v;
        }
        if let Ok(v) = env::var("AVLAB_DATA_DIR") {
            self.data_dir = Some(PathBuf::from(v));
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ServiceError::Config(format!("{name} must be a non-negative number, got {v}")))
            }
        };
        finite_nonneg("payoutMultiplier", self.payout_multiplier)?;
        finite_nonneg("basePayout", self.base_payout)?;
        finite_nonneg("payoffCap", self.payoff_cap)
    }
}
