//! Run configuration: read from an optional JSON file, then overridden by flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Where the report goes; not part of the hashed config.
    #[serde(skip_serializing)]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quick: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        overlay!(self, top, case, l, ring, sigma, target, seed, budget, samples, extra, input, out, weights, quick)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn quick(&self) -> bool {
        self.quick.unwrap_or(false)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"case": "b", "ring": "z8", "seed": 3}"#).unwrap();
        let flags = RunConfig { ring: Some("z4".into()), ..Default::default() };
        let cfg = file.overlay(flags);
        assert_eq!((cfg.case.as_deref(), cfg.ring.as_deref(), cfg.seed()), (Some("b"), Some("z4"), 3));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"cases": "b"}"#).is_err());
    }

    #[test]
    fn output_path_is_not_hashed() {
        let cfg = RunConfig { out: Some("x.json".into()), ..Default::default() };
        assert_eq!(serde_json::to_string(&cfg).unwrap(), "{}");
    }
}
