//! Scenario files. TOML, SI units, unknown keys rejected.

use std::path::{Path, PathBuf};

use ionlink::dynamics::{ChannelSpec, CoherenceDecay, RunMode, ValidationThresholds};
use ionlink::metrics::OracleConfig;
use ionlink::model::{EffectiveParams, FieldStateSpec, FullModelParams};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Relative tolerance on the interaction areas `pi/4` and `pi/2` when the
/// protocol times are given explicitly without `override_times`.
const CANONICAL_TOLERANCE: f64 = 1e-9;
const DEFAULT_TRANSIT_TIME: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    pub full_model: Option<FullModelConfig>,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Transit time through each cavity, s. The couplings then follow from
    /// the canonical areas.
    pub transit_time: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub t_a: Option<f64>,
    pub t_b: Option<f64>,
    /// Accept explicit couplings or times whose areas are not `pi/4, pi/2`.
    #[serde(default)]
    pub override_times: bool,
    pub mode: Option<RunMode>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub gamma_p: f64,
    #[serde(default)]
    pub t_flight: f64,
    #[serde(default)]
    pub coherence: CoherenceDecay,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullModelConfig {
    /// Defaults to the matched value `g_fly exp(eta^2/2)`.
    pub g_ion: Option<f64>,
    pub g_fly: f64,
    pub delta: f64,
    pub nu: f64,
    pub eta: f64,
    #[serde(default = "default_n_field_max")]
    pub n_field_max: usize,
    #[serde(default = "default_n_vib_max")]
    pub n_vib_max: usize,
    #[serde(default = "default_fields")]
    pub fields: Vec<FieldConfig>,
    #[serde(default)]
    pub thresholds: ThresholdsConfig,
}

fn default_n_field_max() -> usize {
    FullModelParams::DEFAULT_N_FIELD_MAX
}

fn default_n_vib_max() -> usize {
    FullModelParams::DEFAULT_N_VIB_MAX
}

fn default_fields() -> Vec<FieldConfig> {
    vec![
        FieldConfig::Fock { n: 0 },
        FieldConfig::Fock { n: 2 },
        FieldConfig::Thermal { nbar: 0.5 },
    ]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldConfig {
    Fock { n: usize },
    Thermal { nbar: f64 },
    Coherent { alpha: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsConfig {
    #[serde(default = "defaults::max_deviation")]
    pub max_deviation: f64,
    #[serde(default = "defaults::max_spread")]
    pub max_spread: f64,
    #[serde(default = "defaults::max_vib_leakage")]
    pub max_vib_leakage: f64,
    #[serde(default = "defaults::min_transfer")]
    pub min_transfer: f64,
}

mod defaults {
    use ionlink::dynamics::ValidationThresholds;

    pub fn max_deviation() -> f64 {
        ValidationThresholds::default().max_deviation
    }
    pub fn max_spread() -> f64 {
        ValidationThresholds::default().max_spread
    }
    pub fn max_vib_leakage() -> f64 {
        ValidationThresholds::default().max_vib_leakage
    }
    pub fn min_transfer() -> f64 {
        ValidationThresholds::default().min_transfer
    }
}

impl Default for ThresholdsConfig {
    fn default() -> Self {
        let d = ValidationThresholds::default();
        Self {
            max_deviation: d.max_deviation,
            max_spread: d.max_spread,
            max_vib_leakage: d.max_vib_leakage,
            min_transfer: d.min_transfer,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_oracle_enabled")]
    pub enabled: bool,
    #[serde(default = "default_oracle_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_oracle_enabled() -> bool {
    true
}

fn default_oracle_samples() -> usize {
    OracleConfig::default().samples
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            enabled: true,
            samples: default_oracle_samples(),
            seed: 0,
        }
    }
}

/// Parameters a sweep axis may vary.
pub const SWEEP_PARAMETERS: [&str; 8] = [
    "gamma",
    "gamma_p",
    "t_flight",
    "transit_time",
    "lambda1",
    "lambda2",
    "t_a",
    "t_b",
];

/// Parameters that move the protocol off its canonical areas.
const TIME_OVERRIDES: [&str; 4] = ["lambda1", "lambda2", "t_a", "t_b"];

/// One fully determined protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub effective: EffectiveParams,
    pub channel: ChannelSpec,
    pub mode: RunMode,
    pub oracle: Option<OracleConfig>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> CliResult<()> {
        self.scenario()?;
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() {
                return Err(CliError::Config("sweep.axes must not be empty".into()));
            }
            for (k, axis) in sweep.axes.iter().enumerate() {
                axis.values()?;
                if sweep.axes[..k].iter().any(|a| a.parameter == axis.parameter) {
                    return Err(CliError::Config(format!("sweep axis `{}` appears twice", axis.parameter)));
                }
                if TIME_OVERRIDES.contains(&axis.parameter.as_str()) && !self.protocol.override_times {
                    return Err(CliError::Config(format!(
                        "sweeping `{}` leaves the canonical areas; set protocol.override_times = true",
                        axis.parameter
                    )));
                }
            }
        }
        if self.oracle.enabled && self.oracle.samples < ionlink::metrics::MIN_ORACLE_SAMPLES {
            return Err(CliError::Config(format!(
                "oracle.samples must be at least {}, got {}",
                ionlink::metrics::MIN_ORACLE_SAMPLES,
                self.oracle.samples
            )));
        }
        Ok(())
    }

    /// The run described by the file.
    pub fn scenario(&self) -> CliResult<Scenario> {
        self.scenario_with(&[], None)
    }

    /// The run with named parameters replaced, as for one sweep point, and
    /// `seed` (when given) replacing the oracle seed.
    pub fn scenario_with(&self, overrides: &[(&str, f64)], seed: Option<u64>) -> CliResult<Scenario> {
        let mut protocol = self.protocol.clone();
        let mut channel = self.channel.clone();
        for &(name, value) in overrides {
            match name {
                "gamma" => channel.gamma = value,
                "gamma_p" => channel.gamma_p = value,
                "t_flight" => channel.t_flight = value,
                "transit_time" => protocol.transit_time = Some(value),
                "lambda1" => protocol.lambda1 = Some(value),
                "lambda2" => protocol.lambda2 = Some(value),
                "t_a" => protocol.t_a = Some(value),
                "t_b" => protocol.t_b = Some(value),
                other => {
                    return Err(CliError::Config(format!(
                        "unknown sweep parameter `{other}`, expected one of {}",
                        SWEEP_PARAMETERS.join(", ")
                    )))
                }
            }
        }
        let effective = protocol.resolve()?;
        let channel = ChannelSpec::new(channel.gamma, channel.gamma_p, channel.t_flight).with_coherence(channel.coherence);
        channel.validate()?;
        let oracle = self.oracle.enabled.then_some(OracleConfig {
            samples: self.oracle.samples,
            seed: seed.unwrap_or(self.oracle.seed),
        });
        Ok(Scenario {
            effective,
            channel,
            mode: protocol.mode.unwrap_or(RunMode::NumericNoisy),
            oracle,
        })
    }

    pub fn full_model(&self) -> CliResult<(FullModelParams, Vec<FieldStateSpec>, ValidationThresholds)> {
        let fm = self
            .full_model
            .as_ref()
            .ok_or_else(|| CliError::Config("validate needs a [full_model] section".into()))?;
        let params = FullModelParams {
            g_ion: fm.g_ion.unwrap_or(fm.g_fly * (fm.eta * fm.eta / 2.0).exp()),
            g_fly: fm.g_fly,
            delta: fm.delta,
            nu: fm.nu,
            eta: fm.eta,
            n_field_max: fm.n_field_max,
            n_vib_max: fm.n_vib_max,
        };
        params.validate()?;
        if fm.fields.is_empty() {
            return Err(CliError::Config("full_model.fields must not be empty".into()));
        }
        let n = fm.n_field_max;
        let fields = fm
            .fields
            .iter()
            .map(|f| match *f {
                FieldConfig::Fock { n: k } => FieldStateSpec::fock(k, n),
                FieldConfig::Thermal { nbar } => FieldStateSpec::thermal(nbar, n),
                FieldConfig::Coherent { alpha } => FieldStateSpec::coherent(alpha, n),
            })
            .collect();
        let t = fm.thresholds;
        let thresholds = ValidationThresholds {
            max_deviation: t.max_deviation,
            max_spread: t.max_spread,
            max_vib_leakage: t.max_vib_leakage,
            min_transfer: t.min_transfer,
        };
        Ok((params, fields, thresholds))
    }
}

impl ProtocolConfig {
    fn resolve(&self) -> CliResult<EffectiveParams> {
        let transit = self.transit_time.unwrap_or(DEFAULT_TRANSIT_TIME);
        if !(transit.is_finite() && transit > 0.0) {
            return Err(CliError::Config(format!("protocol.transit_time must be positive, got {transit}")));
        }
        let base = EffectiveParams::canonical(transit);
        let p = EffectiveParams {
            lambda1: self.lambda1.unwrap_or(base.lambda1),
            lambda2: self.lambda2.unwrap_or(base.lambda2),
            t_a: self.t_a.unwrap_or(base.t_a),
            t_b: self.t_b.unwrap_or(base.t_b),
        };
        p.validate()?;
        if !self.override_times && !p.is_canonical(CANONICAL_TOLERANCE) {
            return Err(CliError::Config(format!(
                "protocol areas lambda1 t_a = {} and lambda2 t_b = {} are not pi/4 and pi/2; \
                 set protocol.override_times = true to run them anyway",
                p.area_a(),
                p.area_b()
            )));
        }
        Ok(p)
    }
}

impl Axis {
    /// Grid values, `start` and `stop` included.
    pub fn values(&self) -> CliResult<Vec<f64>> {
        let bad = |why: &str| CliError::Config(format!("sweep axis `{}`: {why}", self.parameter));
        if !SWEEP_PARAMETERS.contains(&self.parameter.as_str()) {
            return Err(bad(&format!("unknown parameter, expected one of {}", SWEEP_PARAMETERS.join(", "))));
        }
        if self.points == 0 {
            return Err(bad("points must be at least 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(bad("start and stop must be finite"));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.points - 1) as f64;
        match self.scale {
            Scale::Linear => Ok((0..self.points)
                .map(|k| {
                    if k + 1 == self.points {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * k as f64 / last
                    }
                })
                .collect()),
            Scale::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(bad("log scale needs positive start and stop"));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                Ok((0..self.points)
                    .map(|k| {
                        if k + 1 == self.points {
                            self.stop
                        } else {
                            (a + (b - a) * k as f64 / last).exp()
                        }
                    })
                    .collect())
            }
        }
    }
}
