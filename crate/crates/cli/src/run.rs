//! Experiment execution and CSV emission.
//!
//! Every document starts with `#`-prefixed metadata (tool version, config
//! hash, seed where randomness is involved) so results are
//! self-describing and reproducible bit for bit from the configuration.
//! Unbounded extents are written as the literal string `inf`.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

use urafocus_core::channel::{array_gain_exact, array_gain_fresnel};
use urafocus_core::focusing::{beamdepth, ebrd, eta_sweep_over};
use urafocus_core::geometry::SphericalPoint;
use urafocus_core::multiuser::{run_monte_carlo, CodebookSpec, SumRateExperiment, UserPlacement};

use crate::config::{ExperimentConfig, SumRateConfig};
use crate::error::{CliError, Result};

/// A rendered CSV document plus the gnuplot recipe for it.
#[derive(Debug, Clone)]
pub struct CsvDocument {
    pub metadata: Vec<String>,
    pub header: String,
    pub rows: Vec<String>,
    /// `(x column, y columns)` for the companion gnuplot script, 1-based.
    pub plot_columns: (usize, Vec<usize>),
}

impl std::fmt::Display for CsvDocument {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for line in &self.metadata {
            writeln!(f, "# {line}")?;
        }
        writeln!(f, "{}", self.header)?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl CsvDocument {
    /// Companion gnuplot script plotting this document.
    pub fn gnuplot_script(&self, csv_path: &str) -> String {
        let (x, ys) = &self.plot_columns;
        let mut out = String::new();
        writeln!(out, "set datafile separator \",\"").unwrap();
        writeln!(out, "set datafile commentschars \"#\"").unwrap();
        writeln!(out, "set key autotitle columnhead").unwrap();
        writeln!(out, "set grid").unwrap();
        let series: Vec<String> = ys
            .iter()
            .map(|y| format!("'{csv_path}' using {x}:{y} with linespoints"))
            .collect();
        writeln!(out, "plot {}", series.join(", \\\n     ")).unwrap();
        writeln!(out, "pause -1 \"press enter to close\"").unwrap();
        out
    }
}

/// First 16 hex characters of the SHA-256 of the canonical JSON form.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        write!(hex, "{byte:02x}").expect("string write");
    }
    hex
}

fn base_metadata(config: &ExperimentConfig) -> Vec<String> {
    vec![
        format!("urafocus v{}", env!("CARGO_PKG_VERSION")),
        format!("experiment: {}", config.kind_name()),
        format!("config sha256: {}", config_hash(config)),
    ]
}

/// Runs a validated configuration and renders its CSV.
pub fn execute(config: &ExperimentConfig) -> Result<CsvDocument> {
    match config {
        ExperimentConfig::BeamdepthSweep(c) => {
            let cfg = c.array.build()?;
            let theta = c.theta_deg.to_radians();
            let mut rows = Vec::new();
            for &rf in &c.rf_m {
                for phi_deg in c.phi_deg.values()? {
                    let phi = phi_deg.to_radians();
                    let res = beamdepth(&cfg, phi, theta, rf)?;
                    rows.push(format!(
                        "{phi},{theta},{rf},{},{},{},{}",
                        res.bd_m, res.rf_min_m, res.rf_max_m, res.alpha_3db
                    ));
                }
            }
            Ok(CsvDocument {
                metadata: base_metadata(config),
                header: "phi_rad,theta_rad,rf_m,bd_m,rf_min_m,rf_max_m,alpha_3db".into(),
                rows,
                plot_columns: (1, vec![4]),
            })
        }
        ExperimentConfig::EbrdSweep(c) => {
            let theta = c.theta_deg.to_radians();
            let mut rows = Vec::new();
            for &target_eta in &c.etas {
                // one realizable configuration per requested ratio
                let sweep = eta_sweep_over(
                    c.n_bs,
                    c.carrier_hz,
                    0.0,
                    std::f64::consts::FRAC_PI_2,
                    0.05,
                    &[target_eta],
                )?;
                let row = sweep
                    .first()
                    .ok_or_else(|| CliError::Domain("empty ratio sweep".into()))?;
                let cfg = urafocus_core::geometry::UraConfig::new(
                    row.n1,
                    row.n2,
                    c.carrier_hz,
                    c.spacing_factor,
                )
                .map_err(CliError::from)?;
                for phi_deg in c.phi_deg.values()? {
                    let phi = phi_deg.to_radians();
                    let res = ebrd(&cfg, phi, theta)?;
                    rows.push(format!("{},{phi},{theta},{}", cfg.eta, res.ebrd_m));
                }
            }
            Ok(CsvDocument {
                metadata: base_metadata(config),
                header: "eta,phi_rad,theta_rad,ebrd_m".into(),
                rows,
                plot_columns: (2, vec![4]),
            })
        }
        ExperimentConfig::EtaSweep(c) => {
            let targets: Vec<f64> = (-6..=6).map(|k| 2f64.powi(k)).collect();
            let rows_data = eta_sweep_over(
                c.n_bs,
                c.carrier_hz,
                c.phi_deg.to_radians(),
                c.theta_deg.to_radians(),
                c.rf_fraction,
                &targets,
            )?;
            let rows = rows_data
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{},{},{},{}",
                        r.eta,
                        r.n1,
                        r.n2,
                        r.rayleigh_m,
                        r.alpha_3db,
                        r.combined_factor,
                        r.rf_m,
                        r.bd_m,
                        r.ebrd_m
                    )
                })
                .collect();
            Ok(CsvDocument {
                metadata: base_metadata(config),
                header:
                    "eta,n1,n2,rayleigh_m,alpha_3db,combined_factor,rf_m,bd_m,ebrd_m"
                        .into(),
                rows,
                plot_columns: (1, vec![8, 9]),
            })
        }
        ExperimentConfig::GainProfile(c) => {
            let cfg = c.array.build()?;
            let phi = c.phi_deg.to_radians();
            let theta = c.theta_deg.to_radians();
            let focus = SphericalPoint::new(phi, theta, c.rf_m).map_err(CliError::from)?;
            let z_lo = c.z_grid.min_m.unwrap_or_else(|| cfg.near_field_min_m());
            let z_hi = c.z_grid.max_m.unwrap_or(10.0 * cfg.rayleigh_m);
            if !(z_hi > z_lo && z_lo > 0.0) {
                return Err(CliError::Domain(format!(
                    "bad evaluation grid [{z_lo}, {z_hi}]"
                )));
            }
            let n = c.z_grid.points;
            let step = (z_hi / z_lo).ln() / (n - 1) as f64;
            let rows = (0..n)
                .map(|i| {
                    let z = if i == n - 1 {
                        z_hi
                    } else {
                        z_lo * (step * i as f64).exp()
                    };
                    let exact = array_gain_exact(&cfg, &focus, z);
                    let closed = array_gain_fresnel(&cfg, phi, theta, c.rf_m, z);
                    format!("{z},{exact},{closed}")
                })
                .collect();
            Ok(CsvDocument {
                metadata: base_metadata(config),
                header: "z_m,gain_exact,gain_fresnel".into(),
                rows,
                plot_columns: (1, vec![2, 3]),
            })
        }
        ExperimentConfig::Sumrate(c) => run_sumrate(config, c),
    }
}

fn run_sumrate(config: &ExperimentConfig, c: &SumRateConfig) -> Result<CsvDocument> {
    let mut metadata = base_metadata(config);
    metadata.push(format!("seed: {}", c.seed));
    metadata.push(format!("trials: {}", c.trials));
    let mut rows = Vec::new();
    for run in &c.runs {
        let array = run.array.build()?;
        let experiment = SumRateExperiment {
            array,
            users: UserPlacement {
                count: run.users.count,
                azimuth_rad: run.users.azimuth_deg.to_radians(),
                elevation_rad: run.users.elevation_deg.to_radians(),
                region: run.users.region.to_core(),
            },
            codebook: CodebookSpec {
                kind: run.codebook.to_core(),
                az_points: run.az_points,
                el_points: run.el_points,
                rings: run.rings,
            },
            n_rf: c.n_rf,
            snr_db: c.snr_db.clone(),
            trials: c.trials,
            seed: c.seed,
        };
        let result = run_monte_carlo(&experiment)?;
        let label = run
            .label
            .clone()
            .unwrap_or_else(|| experiment.codebook.kind.to_string());
        metadata.push(format!(
            "run {label}: {}x{} array, {} users, {} served per trial",
            run.array.n1, run.array.n2, run.users.count, result.served_per_trial
        ));
        for summary in &result.summaries {
            rows.push(format!(
                "{},{label},{},{},{},{},{},{}",
                summary.snr_db,
                experiment.array.eta,
                summary.mean_bps_hz,
                summary.ci95_low,
                summary.ci95_high,
                summary.trials,
                c.seed
            ));
        }
    }
    Ok(CsvDocument {
        metadata,
        header: "snr_db,codebook,eta,mean_sum_rate_bps_hz,ci95_low,ci95_high,trials,seed".into(),
        rows,
        plot_columns: (1, vec![4]),
    })
}

/// Writes the document to `out` (or stdout when absent); optionally drops
/// a gnuplot script next to the CSV.
pub fn write_output(doc: &CsvDocument, out: Option<&Path>, gnuplot: bool) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, doc.to_string())
                .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            if gnuplot {
                let script_path = path.with_extension("gp");
                let script = doc.gnuplot_script(&path.to_string_lossy());
                std::fs::write(&script_path, script)
                    .map_err(|e| CliError::Io(format!("writing {}: {e}", script_path.display())))?;
            }
            Ok(())
        }
        None => {
            if gnuplot {
                return Err(CliError::Config(
                    "--gnuplot needs --out (the script references the CSV file)".into(),
                ));
            }
            print!("{doc}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = preset("fig3").unwrap();
        let b = preset("fig3").unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let c = preset("fig4").unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
        assert_eq!(config_hash(&a).len(), 16);
    }

    #[test]
    fn beamdepth_preset_emits_expected_columns() {
        let cfg = preset("fig3").unwrap();
        let doc = execute(&cfg).unwrap();
        assert_eq!(
            doc.header,
            "phi_rad,theta_rad,rf_m,bd_m,rf_min_m,rf_max_m,alpha_3db"
        );
        assert_eq!(doc.rows.len(), 61);
        // boresight row matches the library call directly
        let cfg_core = urafocus_core::geometry::UraConfig::half_wavelength(16, 16, 28e9).unwrap();
        let direct = urafocus_core::focusing::beamdepth(
            &cfg_core,
            0.0,
            std::f64::consts::FRAC_PI_2,
            0.2,
        )
        .unwrap();
        let boresight_row = &doc.rows[30];
        assert!(boresight_row.starts_with("0,"));
        assert!(boresight_row.contains(&direct.rf_min_m.to_string()));
    }

    #[test]
    fn gain_profile_focal_row_is_unity() {
        let text = r#"{
            "experiment": "gain-profile",
            "array": { "n1": 16, "n2": 16, "carrier_hz": 28e9 },
            "rf_m": 0.2,
            "z_grid": { "min_m": 0.2, "max_m": 0.4, "points": 3 }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let doc = execute(&cfg).unwrap();
        let first: Vec<&str> = doc.rows[0].split(',').collect();
        assert_eq!(first[0], "0.2");
        assert_eq!(first[1], "1");
        assert_eq!(first[2], "1");
    }

    #[test]
    fn document_rendering_shape() {
        let cfg = preset("fig4").unwrap();
        let doc = execute(&cfg).unwrap();
        let text = doc.to_string();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# urafocus v"));
        assert!(text.contains("# config sha256: "));
        let header_line = text
            .lines()
            .find(|l| !l.starts_with('#'))
            .unwrap();
        assert_eq!(
            header_line,
            "eta,n1,n2,rayleigh_m,alpha_3db,combined_factor,rf_m,bd_m,ebrd_m"
        );
        let script = doc.gnuplot_script("fig4.csv");
        assert!(script.contains("using 1:8"));
    }
}
