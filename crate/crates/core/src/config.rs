use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on dense search cells (boxes and 1-D subset-sum tables).
pub const DEFAULT_CELL_CAP: u64 = 1 << 26;

/// Environment variable overriding [`RunConfig::cell_cap`].
pub const CAP_ENV: &str = "FSLATTICE_CAP";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Largest number of cells any dense reachability table may allocate.
    pub cell_cap: u64,
    /// Ray depth for thin cone generators; `None` picks one from the target.
    pub ray_depth: Option<u32>,
    /// Seed for the sampled geometric checks and random sumset inputs.
    pub seed: u64,
    /// Coordinate bound for the cone completeness sweep.
    pub cone_max: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cell_cap: DEFAULT_CELL_CAP,
            ray_depth: None,
            seed: 0,
            cone_max: 80,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::validation(format!("bad config {}: {e}", path.display())))?;
        cfg.validated()
    }

    /// Applies `FSLATTICE_CAP` if it is set.
    pub fn with_env(mut self) -> Result<Self> {
        if let Ok(raw) = std::env::var(CAP_ENV) {
            self.cell_cap = raw
                .trim()
                .parse()
                .map_err(|e| Error::validation(format!("{CAP_ENV}={raw:?}: {e}")))?;
        }
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.cell_cap == 0 {
            return Err(Error::validation("cell cap must be positive"));
        }
        if self.ray_depth == Some(u32::MAX) {
            return Err(Error::validation("ray depth out of range"));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 7}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.cell_cap, DEFAULT_CELL_CAP);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 7}"#).is_err());
        let zero = RunConfig { cell_cap: 0, ..RunConfig::default() };
        assert!(zero.validated().is_err());
    }
}
