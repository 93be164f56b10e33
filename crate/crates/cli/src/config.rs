//! Run configuration: a TOML file validated up front. Unknown keys are
//! rejected so typos cannot silently fall back to defaults.

use crate::error::{CliError, Result};
use argibbs::{GammaPrior, Point, PriorSpec, ProposalSd, UniformPrior, Window};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub window: WindowConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub params: Option<ParamsConfig>,
    #[serde(default)]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub prior: Option<PriorConfig>,
    #[serde(default)]
    pub dmh: Option<DmhSection>,
    #[serde(default)]
    pub pcf: PcfConfig,
    #[serde(default)]
    pub gof: GofConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
        cfg.window.build()?;
        cfg.model.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "shape", rename_all = "lowercase")]
pub enum WindowConfig {
    Disc {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    Rect {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
}

impl WindowConfig {
    pub fn build(&self) -> Result<Window> {
        match *self {
            WindowConfig::Disc { center, radius } => {
                Window::disc(Point::new(center[0], center[1]), radius)
            }
            WindowConfig::Rect {
                x_min,
                y_min,
                x_max,
                y_max,
            } => Window::rect(x_min, y_min, x_max, y_max),
        }
        .map_err(|e| CliError::config(format!("window: {e}")))
    }
}

/// Hard-core mode: a fixed radius (0 disables it) or `"min-distance"`,
/// which fixes it at the minimum pairwise distance observed in the data.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum HardCoreSpec {
    Fixed(f64),
    Mode(String),
}

impl Default for HardCoreSpec {
    fn default() -> Self {
        HardCoreSpec::Fixed(0.0)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub hard_core: HardCoreSpec,
    pub r_max: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hard_core: HardCoreSpec::default(),
            r_max: 100.0,
        }
    }
}

impl ModelConfig {
    fn validate(&self) -> Result<()> {
        match &self.hard_core {
            HardCoreSpec::Fixed(v) if v.is_finite() && *v >= 0.0 => {}
            HardCoreSpec::Fixed(v) => {
                return Err(CliError::config(format!(
                    "model.hard_core must be >= 0, got {v}"
                )))
            }
            HardCoreSpec::Mode(m) if m == "min-distance" => {}
            HardCoreSpec::Mode(m) => {
                return Err(CliError::config(format!(
                    "model.hard_core must be a number or \"min-distance\", got \"{m}\""
                )))
            }
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(CliError::config("model.r_max must be > 0".to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub lambda: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub k: f64,
}

impl ParamsConfig {
    pub fn to_params(self) -> argibbs::ArParams {
        argibbs::ArParams {
            lambda: self.lambda,
            theta1: self.theta1,
            theta2: self.theta2,
            theta3: self.theta3,
            k: self.k,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub replicates: Vec<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub n_patterns: usize,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
    /// Optional initial pattern CSV; the chain starts empty by default.
    pub init: Option<PathBuf>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            n_patterns: 1,
            burn_in: 100_000,
            thin: 1_000,
            seed: 0,
            init: None,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorConfig {
    pub lambda: Option<[f64; 2]>,
    pub theta1: Option<[f64; 2]>,
    pub theta2: Option<[f64; 2]>,
    pub theta3: Option<[f64; 2]>,
    pub k_shape: Option<f64>,
    pub k_rate: Option<f64>,
}

impl PriorConfig {
    /// Fill unspecified entries from the defaults at the resolved hard core.
    pub fn resolve(&self, hard_core: f64) -> PriorSpec {
        let mut prior = PriorSpec::defaults(hard_core);
        let set = |range: Option<[f64; 2]>, slot: &mut UniformPrior| {
            if let Some([lo, hi]) = range {
                *slot = UniformPrior { lo, hi };
            }
        };
        set(self.lambda, &mut prior.lambda);
        set(self.theta1, &mut prior.theta1);
        set(self.theta2, &mut prior.theta2);
        set(self.theta3, &mut prior.theta3);
        if let (Some(shape), Some(rate)) = (self.k_shape, self.k_rate) {
            prior.k = GammaPrior { shape, rate };
        }
        prior
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct DmhSection {
    pub n_outer: u64,
    pub m_inner: u64,
    pub thin: u64,
    pub n_adapt: u64,
    pub seed: u64,
    pub proposal_sd: Option<SdConfig>,
}

impl Default for DmhSection {
    fn default() -> Self {
        DmhSection {
            n_outer: 20_000,
            m_inner: 0,
            thin: 10,
            n_adapt: 2_000,
            seed: 0,
            proposal_sd: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SdConfig {
    pub log_lambda: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub log_theta3: f64,
    pub k: f64,
}

impl SdConfig {
    pub fn to_sd(self) -> ProposalSd {
        ProposalSd {
            log_lambda: self.log_lambda,
            theta1: self.theta1,
            theta2: self.theta2,
            log_theta3: self.log_theta3,
            k: self.k,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PcfConfig {
    /// Smoothing bandwidth; 0 = automatic (`0.1 / sqrt(intensity)`).
    pub delta: f64,
    pub n_boot: usize,
    /// Grid start; 0 = the bandwidth.
    pub r_min: f64,
    pub r_max: f64,
    pub n_radii: usize,
    pub seed: u64,
}

impl Default for PcfConfig {
    fn default() -> Self {
        PcfConfig {
            delta: 0.0,
            n_boot: 999,
            r_min: 0.0,
            r_max: 100.0,
            n_radii: 512,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GofConfig {
    pub n_sims: usize,
    pub sim_burn_in: u64,
    pub seed: u64,
}

impl Default for GofConfig {
    fn default() -> Self {
        GofConfig {
            n_sims: 99,
            sim_burn_in: 100_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("."),
            svg: false,
        }
    }
}
