use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thickspray::dispersion::SprayParams;
use thickspray::hyperbolic::SystemCoupling;
use thickspray::modesim::SimConfig;
use thickspray::profiles::VelocityProfile;
use thickspray::quadrature::QuadratureConfig;
use thickspray::roots::SearchRegion;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    DispersionScan,
    Roots,
    ThinSpray,
    LandauCompare,
    Simulate,
    IllposedDemo,
    StabilityCheck,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::DispersionScan => "dispersion-scan",
            Command::Roots => "roots",
            Command::ThinSpray => "thin-spray",
            Command::LandauCompare => "landau-compare",
            Command::Simulate => "simulate",
            Command::IllposedDemo => "illposed-demo",
            Command::StabilityCheck => "stability-check",
        }
    }
}

/// Background state as written in a config. `alpha0` is normally left out
/// and computed from the compatibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub c0: f64,
    pub rho0: f64,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(default)]
    pub u0: f64,
}

impl ParamsSpec {
    pub fn resolve(&self, profile: &VelocityProfile) -> Result<SprayParams, CliError> {
        let mut p = SprayParams::new(self.c0, self.rho0, self.kappa, profile)?.with_u0(self.u0);
        if let Some(a) = self.alpha0 {
            p.alpha0 = a;
            p.validate(profile)?;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { n_re: 100, n_im: 100 }
    }
}

/// Side-by-side evaluation of the spray and Landau dispersion functions
/// along a horizontal line in the `sigma = omega / k` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandauConfig {
    pub k_list: Vec<f64>,
    pub n: usize,
    /// `None`: `[-3 c0, 3 c0]`.
    pub re_range: Option<(f64, f64)>,
    pub im_sigma: f64,
}

impl Default for LandauConfig {
    fn default() -> Self {
        LandauConfig {
            k_list: vec![0.5, 1.0, 2.0],
            n: 201,
            re_range: None,
            im_sigma: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Eigenmode of the most unstable root in the default verdict region.
    MostUnstable,
    /// Eigenmode of the root closest to `(re, im)`.
    Root { re: f64, im: f64 },
    /// Decoupled right-moving acoustic wave.
    Acoustic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeConfig {
    pub k: f64,
    pub initial: InitialState,
}

impl Default for ModeConfig {
    fn default() -> Self {
        ModeConfig {
            k: 8.0,
            initial: InitialState::MostUnstable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IllposedConfig {
    /// Sobolev index of the initial-data norm.
    pub s: f64,
    /// Initial amplitudes scale like `k^-n_exponent`.
    pub n_exponent: f64,
    pub k_list: Vec<f64>,
}

impl Default for IllposedConfig {
    fn default() -> Self {
        IllposedConfig {
            s: 1.0,
            n_exponent: 2.0,
            k_list: vec![8.0, 16.0, 32.0],
        }
    }
}

/// Hyperbolic system coupled to the kinetic phase. `a` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub grad_psi: Vec<f64>,
    pub phi_coeffs: Vec<Vec<f64>>,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<VelocityProfile>,
}

impl SystemSpec {
    pub fn build(&self, fallback: &VelocityProfile) -> Result<SystemCoupling, CliError> {
        let profile = self.profile.clone().unwrap_or_else(|| fallback.clone());
        Ok(SystemCoupling::from_row_major(
            &self.a,
            self.grad_psi.clone(),
            self.phi_coeffs.clone(),
            self.kappa,
            profile,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_scenario: Option<String>,
    #[serde(default = "VelocityProfile::standard_maxwellian")]
    pub profile: VelocityProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<SearchRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_root_tol")]
    pub root_tol: f64,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub landau: LandauConfig,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default)]
    pub illposed: IllposedConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default = "default_track_steps")]
    pub track_steps: usize,
}

pub fn default_root_tol() -> f64 {
    1e-12
}

pub fn default_track_steps() -> usize {
    8
}

impl RunConfig {
    pub fn params(&self) -> Result<SprayParams, CliError> {
        let spec = self
            .params
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("command {} needs \"params\"", self.command.as_str())))?;
        spec.resolve(&self.profile)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.quadrature.validate_for(&self.profile)?;
        self.sim.validate()?;
        let cfg = |m: &str| Err(CliError::Config(m.into()));
        if !(self.root_tol > 0.0) {
            return cfg("root_tol must be positive");
        }
        if self.scan.n_re < 2 || self.scan.n_im < 2 {
            return cfg("scan needs at least 2 points per axis");
        }
        if self.landau.n < 2 || self.landau.k_list.iter().any(|k| *k == 0.0 || !k.is_finite()) {
            return cfg("landau needs n >= 2 and non-zero finite k");
        }
        if self.track_steps == 0 {
            return cfg("track_steps must be positive");
        }
        match self.command {
            Command::StabilityCheck => {
                if self.system.is_none() {
                    return cfg("stability-check needs \"system\"");
                }
            }
            _ => {
                self.params()?;
            }
        }
        if let Some(sw) = &self.kappa_sweep {
            if sw.len() < 2 || sw.windows(2).any(|w| !(w[1] > w[0])) {
                return cfg("kappa_sweep must be increasing with at least 2 entries");
            }
        }
        Ok(())
    }

    /// The config as hashed and recorded: everything except where outputs go.
    pub fn canonical(&self) -> Value {
        let mut c = self.clone();
        c.output_dir = None;
        serde_json::to_value(c).expect("config serializes")
    }
}

/// Settings blocks whose keys override one by one; every other top-level
/// key (profiles, systems) is replaced whole.
const MERGED_BLOCKS: [&str; 8] = ["params", "quadrature", "sim", "region", "scan", "landau", "mode", "illposed"];

/// Overlay `over` onto `base`, both top-level JSON objects.
pub fn merge(base: &mut Value, over: Value) {
    let (Value::Object(b), Value::Object(o)) = (base, over) else {
        return;
    };
    for (k, v) in o {
        match (b.get_mut(&k), v) {
            (Some(Value::Object(slot)), Value::Object(inner)) if MERGED_BLOCKS.contains(&k.as_str()) => {
                slot.extend(inner);
            }
            (_, v) => {
                b.insert(k, v);
            }
        }
    }
}
