use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thickspray::modesim::SimConfig;
use thickspray::quadrature::QuadratureConfig;

use crate::config::{IllposedConfig, LandauConfig, ModeConfig, RunConfig, ScanConfig};

/// Record of one run. Everything except `timestamp_unix` is a function of
/// the config and the build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub versions: BTreeMap<String, String>,
    pub command: String,
    pub seed_scenario: Option<String>,
    pub config_sha256: String,
    pub config: Value,
    pub defaults: Value,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub summary: Value,
    pub timestamp_unix: u64,
}

pub fn config_hash(canonical: &Value) -> String {
    let bytes = serde_json::to_vec(canonical).expect("value serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn versions() -> BTreeMap<String, String> {
    let mut v = BTreeMap::new();
    v.insert("thickspray-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
    for m in ["thickspray", "profiles", "quadrature", "roots", "dispersion", "hyperbolic", "modesim"] {
        v.insert(m.to_string(), thickspray::VERSION.to_string());
    }
    v
}

/// Every default tolerance and setting, in one place.
pub fn defaults_table() -> Value {
    json!({
        "quadrature": QuadratureConfig::default(),
        "sim": SimConfig::default(),
        "sim_dt": "half of 0.1 / (|k| max|v| + |k| c0)",
        "sim_fit_window": "[0.2, 0.8] t_final",
        "root_tol": crate::config::default_root_tol(),
        "root_min_diameter": 1e-3,
        "root_max_newton_iter": 50,
        "root_derivative_step": 1e-5,
        "winding_max_phase_step": "pi/8",
        "origin_exclusion_halfwidth": "1e-3 c0",
        "verdict_region": "|Re sigma - u0| <= |drift| + 5 (c0 + width), 0 < Im sigma <= strip/2",
        "unstable_root_min_im": "1e-4 c0",
        "eigenmode_max_residual": 1e-8,
        "eigenmode_min_im_over_dv": 3.0,
        "complex_step": 1e-20,
        "overflow_amplitude": thickspray::modesim::OVERFLOW,
        "scan": ScanConfig::default(),
        "landau": LandauConfig::default(),
        "mode": ModeConfig::default(),
        "illposed": IllposedConfig::default(),
        "track_steps": crate::config::default_track_steps(),
    })
}

pub fn build(cfg: &RunConfig, warnings: Vec<String>, outputs: Vec<String>, summary: Value) -> Manifest {
    let canonical = cfg.canonical();
    let timestamp_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Manifest {
        tool: "thickspray".into(),
        versions: versions(),
        command: cfg.command.as_str().into(),
        seed_scenario: cfg.seed_scenario.clone(),
        config_sha256: config_hash(&canonical),
        config: canonical,
        defaults: defaults_table(),
        warnings,
        outputs,
        summary,
        timestamp_unix,
    }
}
