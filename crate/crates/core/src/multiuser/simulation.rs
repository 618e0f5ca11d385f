//! Seeded downlink sum-rate Monte Carlo.
//!
//! Trials are independent: each derives its own random stream from
//! `(seed, trial index)`, so results are bit-identical regardless of how
//! the trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{los_channel, ComplexVector, PathSpec};
use crate::error::{Error, Result};
use crate::focusing::ebrd;
use crate::geometry::{SphericalPoint, UraConfig};

use super::codebook::{build_dft_codebook, build_polar_codebook, Codebook, CodebookKind};
use super::precoding::{assemble_solution, beam_training, sum_rate, zf_precode};

/// Radial region users are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeRegion {
    /// `[1.2 D, EBRD]`: finite beamdepth available.
    Ebrd,
    /// `[EBRD, R_D]`: near field without a finite 3 dB window.
    ExtendedNearField,
    /// `[R_D, 100 R_D]`.
    FarField,
    /// Caller-chosen bounds in meters.
    Explicit { r_min_m: f64, r_max_m: f64 },
}

/// Users share one direction; ranges are jittered per trial inside
/// per-user cells of the region (uniform in inverse distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPlacement {
    pub count: usize,
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
    pub region: RangeRegion,
}

/// Codebook request for an experiment. Angular grid sizes default to the
/// array's own element counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodebookSpec {
    pub kind: CodebookKind,
    pub az_points: Option<usize>,
    pub el_points: Option<usize>,
    /// Focal rings per angle (polar codebooks only).
    pub rings: usize,
}

/// A complete Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRateExperiment {
    pub array: UraConfig,
    pub users: UserPlacement,
    pub codebook: CodebookSpec,
    /// RF chains; at most this many users are served per trial.
    pub n_rf: usize,
    /// Per-user SNR grid `p_m / sigma^2` in dB (equal power split,
    /// unit noise).
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// One trial at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRateRecord {
    pub snr_db: f64,
    pub codebook: CodebookKind,
    /// Rate per user (zero for users not scheduled that trial).
    pub per_user_bps_hz: Vec<f64>,
    pub sum_bps_hz: f64,
    /// Stream index the trial's randomness was derived from.
    pub trial_seed: u64,
}

/// Mean and normal-approximation 95 % interval over trials at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSummary {
    pub snr_db: f64,
    pub mean_bps_hz: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub trials: u64,
}

/// Full Monte Carlo output: per-trial records plus per-SNR summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun {
    pub records: Vec<SumRateRecord>,
    pub summaries: Vec<SnrSummary>,
    /// Users actually scheduled per trial, `min(count, n_rf)`; when fewer
    /// than `count`, the strongest training gains win.
    pub served_per_trial: usize,
}

/// Runs the experiment. Deterministic for a fixed seed: per-SNR means are
/// reduced in trial order after the parallel section.
pub fn run_monte_carlo(exp: &SumRateExperiment) -> Result<MonteCarloRun> {
    if exp.users.count == 0 {
        return Err(Error::param("users.count", "need at least one user"));
    }
    if exp.n_rf == 0 {
        return Err(Error::param("n_rf", "need at least one RF chain"));
    }
    if exp.snr_db.is_empty() {
        return Err(Error::param("snr_db", "need at least one SNR point"));
    }
    let cfg = &exp.array;
    let book = build_book(cfg, &exp.codebook)?;
    if exp.users.count > book.len() {
        return Err(Error::Domain(format!(
            "{} users but the codebook holds only {} codewords",
            exp.users.count,
            book.len()
        )));
    }
    let (r_min, r_max) = region_bounds(cfg, &exp.users)?;
    let served = exp.users.count.min(exp.n_rf);

    let per_trial: Vec<Vec<SumRateRecord>> = (0..exp.trials)
        .into_par_iter()
        .map(|trial| run_trial(exp, &book, r_min, r_max, served, trial))
        .collect::<Result<_>>()?;
    let records: Vec<SumRateRecord> = per_trial.into_iter().flatten().collect();

    let mut summaries = Vec::with_capacity(exp.snr_db.len());
    if exp.trials > 0 {
        for &snr in &exp.snr_db {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.snr_db == snr)
                .map(|r| r.sum_bps_hz)
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let half = 1.96 * (var / n).sqrt();
            summaries.push(SnrSummary {
                snr_db: snr,
                mean_bps_hz: mean,
                ci95_low: mean - half,
                ci95_high: mean + half,
                trials: exp.trials,
            });
        }
    }
    Ok(MonteCarloRun {
        records,
        summaries,
        served_per_trial: served,
    })
}

fn build_book(cfg: &UraConfig, spec: &CodebookSpec) -> Result<Codebook> {
    match spec.kind {
        CodebookKind::Polar => build_polar_codebook(
            cfg,
            spec.az_points.unwrap_or(cfg.n1),
            spec.el_points.unwrap_or(cfg.n2),
            spec.rings,
        ),
        CodebookKind::Dft => Ok(build_dft_codebook(cfg)),
    }
}

fn region_bounds(cfg: &UraConfig, users: &UserPlacement) -> Result<(f64, f64)> {
    let floor = cfg.near_field_min_m();
    let bounds = match users.region {
        RangeRegion::Ebrd => {
            let limit = ebrd(cfg, users.azimuth_rad, users.elevation_rad)?;
            (floor, limit.ebrd_m)
        }
        RangeRegion::ExtendedNearField => {
            let limit = ebrd(cfg, users.azimuth_rad, users.elevation_rad)?;
            (limit.ebrd_m, cfg.rayleigh_m)
        }
        RangeRegion::FarField => (cfg.rayleigh_m, 100.0 * cfg.rayleigh_m),
        RangeRegion::Explicit { r_min_m, r_max_m } => (r_min_m, r_max_m),
    };
    if bounds.0 < floor * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "user region starts at {:.4} m, below the near-field floor 1.2 D = {floor:.4} m",
            bounds.0
        )));
    }
    if bounds.1 <= bounds.0 {
        return Err(Error::Domain(format!(
            "empty user region [{:.4}, {:.4}] m for this array and direction",
            bounds.0, bounds.1
        )));
    }
    Ok(bounds)
}

fn run_trial(
    exp: &SumRateExperiment,
    book: &Codebook,
    r_min: f64,
    r_max: f64,
    served: usize,
    trial: u64,
) -> Result<Vec<SumRateRecord>> {
    let cfg = &exp.array;
    let count = exp.users.count;
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    rng.set_stream(trial);

    // one inverse-distance cell per user, jittered uniformly inside it
    let inv_lo = 1.0 / r_max;
    let inv_hi = 1.0 / r_min;
    let cell = (inv_hi - inv_lo) / count as f64;
    let mut channels = Vec::with_capacity(count);
    for m in 0..count {
        let inv = inv_lo + cell * (m as f64 + rng.gen_range(0.0..1.0));
        let point = SphericalPoint::new(
            exp.users.azimuth_rad,
            exp.users.elevation_rad,
            1.0 / inv,
        )?;
        channels.push(los_channel(cfg, &[PathSpec::los(point)])?);
    }

    let winners = beam_training(book, &channels)?;
    let gains: Vec<f64> = channels
        .iter()
        .zip(&winners)
        .map(|(h, &w)| h.inner(&book.codewords[w]).norm_sqr())
        .collect();

    // schedule the strongest `served` users
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).expect("finite gains"));
    let mut scheduled: Vec<usize> = order[..served].to_vec();
    scheduled.sort_unstable();

    let analog: Vec<ComplexVector> = scheduled
        .iter()
        .map(|&m| book.codewords[winners[m]].clone())
        .collect();
    let effective: Vec<Vec<_>> = scheduled
        .iter()
        .map(|&m| analog.iter().map(|c| channels[m].inner(c)).collect())
        .collect();
    let zf = zf_precode(&effective)?;

    let served_channels: Vec<ComplexVector> =
        scheduled.iter().map(|&m| channels[m].clone()).collect();
    let mut records = Vec::with_capacity(exp.snr_db.len());
    for &snr in &exp.snr_db {
        let p = 10f64.powf(snr / 10.0);
        let solution = assemble_solution(
            analog.clone(),
            zf.clone(),
            vec![p; served],
            vec![1.0; served],
        );
        let tally = sum_rate(&served_channels, &solution);
        let mut per_user = vec![0.0; count];
        for (slot, &m) in scheduled.iter().enumerate() {
            per_user[m] = tally.per_user_bps_hz[slot];
        }
        records.push(SumRateRecord {
            snr_db: snr,
            codebook: book.kind,
            per_user_bps_hz: per_user,
            sum_bps_hz: tally.sum_bps_hz,
            trial_seed: trial,
        });
    }
    Ok(records)
}
