//! JSON experiment configuration and the figure presets.
//!
//! Angles are degrees on this surface and converted to radians at the
//! boundary to the core library. Unknown JSON keys are rejected.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use urafocus_core::focusing;
use urafocus_core::geometry::UraConfig;
use urafocus_core::multiuser::{CodebookKind, RangeRegion};

use crate::error::{CliError, Result};

/// Array description as written in config files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub n1: usize,
    pub n2: usize,
    pub carrier_hz: f64,
    #[serde(default = "default_spacing")]
    pub spacing_factor: f64,
}

fn default_spacing() -> f64 {
    0.5
}

impl ArrayConfig {
    pub fn build(&self) -> Result<UraConfig> {
        UraConfig::new(self.n1, self.n2, self.carrier_hz, self.spacing_factor)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Inclusive linear sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(CliError::Config("sweep count must be >= 1".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BeamdepthSweepConfig {
    pub array: ArrayConfig,
    #[serde(default = "default_theta_deg")]
    pub theta_deg: f64,
    pub phi_deg: SweepSpec,
    /// Focal ranges in meters, one output block per value.
    pub rf_m: Vec<f64>,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EbrdSweepConfig {
    pub n_bs: usize,
    pub carrier_hz: f64,
    #[serde(default = "default_spacing")]
    pub spacing_factor: f64,
    /// Target aspect ratios, mapped to the nearest divisor pairs.
    #[serde(default = "default_etas")]
    pub etas: Vec<f64>,
    #[serde(default = "default_theta_deg")]
    pub theta_deg: f64,
    pub phi_deg: SweepSpec,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_etas() -> Vec<f64> {
    vec![1.0, 4.0, 16.0, 0.016, 0.004]
}

fn default_theta_deg() -> f64 {
    90.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EtaSweepConfig {
    pub n_bs: usize,
    pub carrier_hz: f64,
    #[serde(default = "default_spacing")]
    pub spacing_factor: f64,
    #[serde(default)]
    pub phi_deg: f64,
    #[serde(default = "default_theta_deg")]
    pub theta_deg: f64,
    /// Focal range per row as a fraction of that row's Rayleigh distance.
    #[serde(default = "default_rf_fraction")]
    pub rf_fraction: f64,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_rf_fraction() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ZGridConfig {
    #[serde(default)]
    pub min_m: Option<f64>,
    #[serde(default)]
    pub max_m: Option<f64>,
    #[serde(default = "default_z_points")]
    pub points: usize,
}

fn default_z_points() -> usize {
    4096
}

impl Default for ZGridConfig {
    fn default() -> Self {
        ZGridConfig {
            min_m: None,
            max_m: None,
            points: default_z_points(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GainProfileConfig {
    pub array: ArrayConfig,
    #[serde(default)]
    pub phi_deg: f64,
    #[serde(default = "default_theta_deg")]
    pub theta_deg: f64,
    pub rf_m: f64,
    /// Logarithmic evaluation grid; bounds default to `[1.2 D, 10 R_D]`.
    #[serde(default)]
    pub z_grid: ZGridConfig,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum RegionConfig {
    Ebrd,
    ExtendedNearField,
    FarField,
    Explicit { r_min_m: f64, r_max_m: f64 },
}

impl RegionConfig {
    pub fn to_core(&self) -> RangeRegion {
        match *self {
            RegionConfig::Ebrd => RangeRegion::Ebrd,
            RegionConfig::ExtendedNearField => RangeRegion::ExtendedNearField,
            RegionConfig::FarField => RangeRegion::FarField,
            RegionConfig::Explicit { r_min_m, r_max_m } => {
                RangeRegion::Explicit { r_min_m, r_max_m }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UsersConfig {
    pub count: usize,
    #[serde(default)]
    pub azimuth_deg: f64,
    #[serde(default = "default_theta_deg")]
    pub elevation_deg: f64,
    pub region: RegionConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CodebookKindConfig {
    Polar,
    Dft,
}

impl CodebookKindConfig {
    pub fn to_core(self) -> CodebookKind {
        match self {
            CodebookKindConfig::Polar => CodebookKind::Polar,
            CodebookKindConfig::Dft => CodebookKind::Dft,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SumRateRunConfig {
    /// Curve label in the output (defaults to the codebook name).
    #[serde(default)]
    pub label: Option<String>,
    pub array: ArrayConfig,
    pub codebook: CodebookKindConfig,
    #[serde(default = "default_rings")]
    pub rings: usize,
    #[serde(default)]
    pub az_points: Option<usize>,
    #[serde(default)]
    pub el_points: Option<usize>,
    pub users: UsersConfig,
}

fn default_rings() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SumRateConfig {
    pub runs: Vec<SumRateRunConfig>,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    #[serde(default = "default_n_rf")]
    pub n_rf: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_n_rf() -> usize {
    4
}

/// Top-level experiment document, dispatched on the `experiment` tag.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "experiment", deny_unknown_fields)]
pub enum ExperimentConfig {
    BeamdepthSweep(BeamdepthSweepConfig),
    EbrdSweep(EbrdSweepConfig),
    EtaSweep(EtaSweepConfig),
    GainProfile(GainProfileConfig),
    Sumrate(SumRateConfig),
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Subcommand this configuration belongs to.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExperimentConfig::BeamdepthSweep(_) => "beamdepth",
            ExperimentConfig::EbrdSweep(_) => "ebrd",
            ExperimentConfig::EtaSweep(_) => "eta-sweep",
            ExperimentConfig::GainProfile(_) => "gain-profile",
            ExperimentConfig::Sumrate(_) => "sumrate",
        }
    }

    pub fn out(&self) -> Option<&str> {
        match self {
            ExperimentConfig::BeamdepthSweep(c) => c.out.as_deref(),
            ExperimentConfig::EbrdSweep(c) => c.out.as_deref(),
            ExperimentConfig::EtaSweep(c) => c.out.as_deref(),
            ExperimentConfig::GainProfile(c) => c.out.as_deref(),
            ExperimentConfig::Sumrate(c) => c.out.as_deref(),
        }
    }

    /// Load-time validation: every module precondition that is knowable
    /// without running the experiment.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::BeamdepthSweep(c) => {
                let cfg = c.array.build()?;
                check_angle("theta_deg", c.theta_deg)?;
                c.phi_deg.values()?;
                if c.rf_m.is_empty() {
                    return Err(CliError::Config("rf_m must hold at least one range".into()));
                }
                for &rf in &c.rf_m {
                    if rf < cfg.near_field_min_m() {
                        return Err(CliError::Config(format!(
                            "rf_m {rf} below the near-field floor 1.2 D = {:.4} m",
                            cfg.near_field_min_m()
                        )));
                    }
                }
            }
            ExperimentConfig::EbrdSweep(c) => {
                if c.n_bs == 0 {
                    return Err(CliError::Config("n_bs must be >= 1".into()));
                }
                if c.etas.is_empty() {
                    return Err(CliError::Config("etas must be non-empty".into()));
                }
                check_angle("theta_deg", c.theta_deg)?;
                c.phi_deg.values()?;
            }
            ExperimentConfig::EtaSweep(c) => {
                if c.n_bs == 0 {
                    return Err(CliError::Config("n_bs must be >= 1".into()));
                }
                check_angle("theta_deg", c.theta_deg)?;
                if !(c.rf_fraction > 0.0 && c.rf_fraction < 0.5) {
                    return Err(CliError::Config(format!(
                        "rf_fraction must lie in (0, 0.5), got {}",
                        c.rf_fraction
                    )));
                }
            }
            ExperimentConfig::GainProfile(c) => {
                let cfg = c.array.build()?;
                check_angle("theta_deg", c.theta_deg)?;
                if c.z_grid.points < 2 {
                    return Err(CliError::Config("z_grid.points must be >= 2".into()));
                }
                if c.rf_m < cfg.near_field_min_m() {
                    return Err(CliError::Config(format!(
                        "rf_m {} below the near-field floor 1.2 D = {:.4} m",
                        c.rf_m,
                        cfg.near_field_min_m()
                    )));
                }
            }
            ExperimentConfig::Sumrate(c) => {
                if c.runs.is_empty() {
                    return Err(CliError::Config("sumrate needs at least one run".into()));
                }
                if c.snr_db.is_empty() {
                    return Err(CliError::Config("snr_db must be non-empty".into()));
                }
                if c.n_rf == 0 {
                    return Err(CliError::Config("n_rf must be >= 1".into()));
                }
                for run in &c.runs {
                    run.array.build()?;
                    if run.users.count == 0 {
                        return Err(CliError::Config("users.count must be >= 1".into()));
                    }
                    if run.codebook == CodebookKindConfig::Polar && run.rings == 0 {
                        return Err(CliError::Config(
                            "polar codebooks need rings >= 1".into(),
                        ));
                    }
                    check_angle("users.elevation_deg", run.users.elevation_deg)?;
                }
            }
        }
        Ok(())
    }
}

fn check_angle(name: &str, theta_deg: f64) -> Result<()> {
    if !(theta_deg > 0.0 && theta_deg < 180.0) {
        return Err(CliError::Config(format!(
            "{name} must lie in (0, 180) degrees, got {theta_deg}"
        )));
    }
    Ok(())
}

/// Built-in experiment presets carrying the reference parameters
/// (28 GHz carrier, half-wavelength spacing, 4 RF chains).
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        // azimuth dependence of the window for a 256-element square array
        "fig3" => ExperimentConfig::BeamdepthSweep(BeamdepthSweepConfig {
            array: ArrayConfig {
                n1: 16,
                n2: 16,
                carrier_hz: 28e9,
                spacing_factor: 0.5,
            },
            theta_deg: 90.0,
            phi_deg: SweepSpec {
                start: -60.0,
                stop: 60.0,
                count: 61,
            },
            rf_m: vec![0.2],
            out: None,
        }),
        // aspect-ratio sweep at 4096 elements
        "fig4" => ExperimentConfig::EtaSweep(EtaSweepConfig {
            n_bs: 4096,
            carrier_hz: 28e9,
            spacing_factor: 0.5,
            phi_deg: 0.0,
            theta_deg: 90.0,
            rf_fraction: 0.05,
            out: None,
        }),
        // focusing limit vs azimuth for square, wide, and tall shapes
        "fig5" => ExperimentConfig::EbrdSweep(EbrdSweepConfig {
            n_bs: 4096,
            carrier_hz: 28e9,
            spacing_factor: 0.5,
            etas: default_etas(),
            theta_deg: 90.0,
            phi_deg: SweepSpec {
                start: -80.0,
                stop: 80.0,
                count: 41,
            },
            out: None,
        }),
        // polar vs DFT codebooks, five users inside the EBRD of a 64 x 8
        // array; the grid tops out where the DFT book is still
        // gain-limited (per-user SNR, unit noise, no path loss)
        "fig6" => {
            let array = ArrayConfig {
                n1: 64,
                n2: 8,
                carrier_hz: 28e9,
                spacing_factor: 0.5,
            };
            let users = UsersConfig {
                count: 5,
                azimuth_deg: 0.0,
                elevation_deg: 90.0,
                region: RegionConfig::Ebrd,
            };
            ExperimentConfig::Sumrate(SumRateConfig {
                runs: vec![
                    SumRateRunConfig {
                        label: Some("polar".into()),
                        array: array.clone(),
                        codebook: CodebookKindConfig::Polar,
                        rings: 8,
                        az_points: None,
                        el_points: None,
                        users: users.clone(),
                    },
                    SumRateRunConfig {
                        label: Some("dft".into()),
                        array,
                        codebook: CodebookKindConfig::Dft,
                        rings: 8,
                        az_points: None,
                        el_points: None,
                        users,
                    },
                ],
                snr_db: vec![-20.0, -15.0, -10.0, -5.0, 0.0, 5.0],
                trials: 200,
                n_rf: 4,
                seed: 7,
                out: None,
            })
        }
        // square vs wide array at 1024 elements; both serve the same six
        // users spread over the wide array's focusing region
        "fig7" => {
            let square = ArrayConfig {
                n1: 32,
                n2: 32,
                carrier_hz: 28e9,
                spacing_factor: 0.5,
            };
            let wide = ArrayConfig {
                n1: 128,
                n2: 8,
                carrier_hz: 28e9,
                spacing_factor: 0.5,
            };
            let wide_cfg = wide.build()?;
            let limit = focusing::ebrd(&wide_cfg, 0.0, FRAC_PI_2)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let users = UsersConfig {
                count: 6,
                azimuth_deg: 0.0,
                elevation_deg: 90.0,
                region: RegionConfig::Explicit {
                    r_min_m: wide_cfg.near_field_min_m(),
                    r_max_m: limit.ebrd_m,
                },
            };
            ExperimentConfig::Sumrate(SumRateConfig {
                runs: vec![
                    SumRateRunConfig {
                        label: Some("square-32x32".into()),
                        array: square,
                        codebook: CodebookKindConfig::Polar,
                        rings: 8,
                        az_points: None,
                        el_points: None,
                        users: users.clone(),
                    },
                    SumRateRunConfig {
                        label: Some("wide-128x8".into()),
                        array: wide,
                        codebook: CodebookKindConfig::Polar,
                        rings: 8,
                        az_points: None,
                        el_points: None,
                        users,
                    },
                ],
                snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
                trials: 200,
                n_rf: 4,
                seed: 7,
                out: None,
            })
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; available: fig3, fig4, fig5, fig6, fig7"
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
