//! Closed-form beamdepth and beamfocusing-limit analysis.
//!
//! A conjugate-phase beam focused at range `r_f` keeps its gain within
//! 3 dB of the peak over a radial window `[rf_min, rf_max]`. This module
//! solves the Fresnel-gain level set for the window edges, exposes the
//! angle-dependent maximum focusing range (the effective beamfocusing
//! Rayleigh distance, EBRD), and provides a numeric gain-scan window
//! finder that is computationally independent of the closed form.
//!
//! The level-set constant `alpha_3db` is the value of `gamma1 * gamma2`
//! at which the Fresnel-form gain first drops to one half along the ray
//! fixed by `gamma1 / gamma2 = eta * sqrt(beta1 / beta2)`. It depends
//! only on that ratio, so roots are cached per ratio.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::channel::array_gain_exact;
use crate::error::{Error, Result};
use crate::fresnel::fresnel_power_ratio;
use crate::geometry::{SphericalPoint, UraConfig};

/// A radial extent that may be unbounded. Kept as a tagged value rather
/// than an IEEE infinity so tables serialize cleanly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Finite(f64),
    Infinite,
}

impl Extent {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extent::Finite(_))
    }

    /// Finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(*v),
            Extent::Infinite => None,
        }
    }

    /// Collapses to an `f64`, mapping the unbounded case to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            Extent::Finite(v) => *v,
            Extent::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Extent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extent::Finite(v) => write!(f, "{v}"),
            Extent::Infinite => write!(f, "inf"),
        }
    }
}

/// 3 dB window of a focused beam.
///
/// When `degenerate` is set (endfire direction, `beta1 * beta2 = 0`) the
/// closed form does not apply; the window is reported unbounded and the
/// numeric fields carry no information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamdepthResult {
    /// Window length `rf_max - rf_min`, or unbounded.
    pub bd_m: Extent,
    /// Near window edge.
    pub rf_min_m: f64,
    /// Far window edge, or unbounded.
    pub rf_max_m: Extent,
    /// Level-set constant used.
    pub alpha_3db: f64,
    /// Endfire degeneracy flag.
    pub degenerate: bool,
}

/// Effective beamfocusing Rayleigh distance at one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbrdResult {
    /// Maximum focal range with a finite 3 dB window; 0 when degenerate.
    pub ebrd_m: f64,
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
    /// Endfire degeneracy flag.
    pub degenerate: bool,
}

/// One row of an aspect-ratio sweep at fixed total element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSweepRow {
    pub eta: f64,
    pub n1: usize,
    pub n2: usize,
    pub rayleigh_m: f64,
    pub alpha_3db: f64,
    /// `alpha_3db * (eta^2 + 1) / eta`, the geometry factor of the window.
    pub combined_factor: f64,
    /// Focal range used for this row's beamdepth, `rf_fraction * rayleigh_m`.
    pub rf_m: f64,
    pub bd_m: Extent,
    pub ebrd_m: f64,
}

/// Numerically measured 3 dB window from a gain scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanWindow {
    pub lower_m: f64,
    /// `None` when the gain never falls below one half out to the scan limit.
    pub upper_m: Option<f64>,
}

const ALPHA_SCAN_STEP: f64 = 0.01;
const ALPHA_REL_TOL: f64 = 1e-10;

fn alpha_cache() -> &'static RwLock<HashMap<u64, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Level-set constant `gamma1 * gamma2` at which
/// `R(gamma1) R(gamma2) = 1/2` along the ray `gamma1 / gamma2 = ratio`,
/// with `R` the Fresnel power ratio. First crossing only: later crossings
/// belong to sidelobes. Results are cached per ratio; the cache takes
/// concurrent readers and serializes writers.
pub fn alpha_3db_for_ratio(ratio: f64) -> f64 {
    assert!(
        ratio.is_finite() && ratio > 0.0,
        "ray ratio must be positive and finite, got {ratio}"
    );
    let key = ratio.to_bits();
    if let Some(alpha) = alpha_cache().read().expect("alpha cache poisoned").get(&key) {
        return *alpha;
    }
    let alpha = alpha_root(ratio);
    alpha_cache()
        .write()
        .expect("alpha cache poisoned")
        .insert(key, alpha);
    alpha
}

fn alpha_root(ratio: f64) -> f64 {
    let sqrt_ratio = ratio.sqrt();
    let gain = |t: f64| fresnel_power_ratio(t * sqrt_ratio) * fresnel_power_ratio(t / sqrt_ratio);
    let t_star = first_half_crossing(gain);
    t_star * t_star
}

/// Level-set constant of the one-dimensional gain `R(gamma) = 1/2`,
/// expressed as `gamma^2` so the linear-array window formulas take it
/// directly. Computed once.
pub fn alpha_3db_ula() -> f64 {
    static ALPHA_1D: OnceLock<f64> = OnceLock::new();
    *ALPHA_1D.get_or_init(|| {
        let g_star = first_half_crossing(fresnel_power_ratio);
        g_star * g_star
    })
}

/// Scans upward in steps, then bisects the bracket of the first crossing
/// of `gain(t) = 1/2` to `ALPHA_REL_TOL` relative.
fn first_half_crossing(gain: impl Fn(f64) -> f64) -> f64 {
    let mut t = ALPHA_SCAN_STEP;
    while gain(t) >= 0.5 {
        t += ALPHA_SCAN_STEP;
        assert!(t < 1e3, "no 3 dB crossing found");
    }
    let (mut lo, mut hi) = (t - ALPHA_SCAN_STEP, t);
    while hi - lo > ALPHA_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if gain(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Level-set constant for an array at a given direction.
///
/// Errors at endfire-degenerate directions (`beta1 * beta2 = 0`), where
/// the two-factor gain collapses to one dimension; use the linear-array
/// operations there.
pub fn alpha_3db(cfg: &UraConfig, phi_rad: f64, theta_rad: f64) -> Result<f64> {
    let (beta1, beta2) = betas(phi_rad, theta_rad);
    if beta1 <= 0.0 || beta2 <= 0.0 {
        return Err(Error::Domain(format!(
            "degenerate direction (phi = {phi_rad}, theta = {theta_rad}): beta1 * beta2 = 0; \
             the gain is one-dimensional there, see the ULA operations"
        )));
    }
    Ok(alpha_3db_for_ratio(cfg.eta * (beta1 / beta2).sqrt()))
}

fn betas(phi_rad: f64, theta_rad: f64) -> (f64, f64) {
    let sin_th = theta_rad.sin();
    let sin_ph = phi_rad.sin();
    (
        1.0 - sin_th * sin_th * sin_ph * sin_ph,
        sin_th * sin_th,
    )
}

/// 3 dB beamdepth of a beam focused at `(phi, theta, r_f)`.
///
/// The window edges solve `z_eff(z) = z_eff*` with
/// `z_eff* = 4 alpha (eta^2 + 1) / (eta R_D sqrt(beta1 beta2))`:
/// `rf_min = r_f / (1 + a)` and `rf_max = r_f / (1 - a)` with
/// `a = r_f * z_eff*`. For `a >= 1` (focus at or beyond the EBRD) the
/// window is unbounded above.
pub fn beamdepth(cfg: &UraConfig, phi_rad: f64, theta_rad: f64, r_f_m: f64) -> Result<BeamdepthResult> {
    check_focal_range(cfg, r_f_m)?;
    let (beta1, beta2) = betas(phi_rad, theta_rad);
    let angular = (beta1 * beta2).sqrt();
    if angular <= 0.0 {
        return Ok(BeamdepthResult {
            bd_m: Extent::Infinite,
            rf_min_m: r_f_m,
            rf_max_m: Extent::Infinite,
            alpha_3db: 0.0,
            degenerate: true,
        });
    }
    let alpha = alpha_3db_for_ratio(cfg.eta * (beta1 / beta2).sqrt());
    let a = 4.0 * alpha * r_f_m * (cfg.eta * cfg.eta + 1.0) / (cfg.eta * cfg.rayleigh_m * angular);
    Ok(window_from_ratio(r_f_m, a, alpha))
}

fn window_from_ratio(r_f_m: f64, a: f64, alpha: f64) -> BeamdepthResult {
    let rf_min = r_f_m / (1.0 + a);
    if a >= 1.0 {
        BeamdepthResult {
            bd_m: Extent::Infinite,
            rf_min_m: rf_min,
            rf_max_m: Extent::Infinite,
            alpha_3db: alpha,
            degenerate: false,
        }
    } else {
        let rf_max = r_f_m / (1.0 - a);
        BeamdepthResult {
            bd_m: Extent::Finite(rf_max - rf_min),
            rf_min_m: rf_min,
            rf_max_m: Extent::Finite(rf_max),
            alpha_3db: alpha,
            degenerate: false,
        }
    }
}

fn check_focal_range(cfg: &UraConfig, r_f_m: f64) -> Result<()> {
    let min = cfg.near_field_min_m();
    if !r_f_m.is_finite() || r_f_m < min * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "focal range {r_f_m} m below the near-field lower bound 1.2 D = {min} m"
        )));
    }
    Ok(())
}

/// Square-array specialization (`eta = 1`); same window formulas.
pub fn beamdepth_usa(
    cfg: &UraConfig,
    phi_rad: f64,
    theta_rad: f64,
    r_f_m: f64,
) -> Result<BeamdepthResult> {
    if cfg.n1 != cfg.n2 {
        return Err(Error::Domain(format!(
            "square-array beamdepth requires n1 = n2, got {}x{}",
            cfg.n1, cfg.n2
        )));
    }
    beamdepth(cfg, phi_rad, theta_rad, r_f_m)
}

/// Linear-array beamdepth (single row of elements along the y-axis,
/// boresight elevation implied).
///
/// `BD = 8 alpha r_f^2 R_D cos^2(phi) / ((R_D cos^2 phi)^2 - (4 alpha r_f)^2)`
/// when `r_f < R_D cos^2(phi) / (4 alpha)`, else unbounded. Here `alpha`
/// is the one-dimensional level-set constant [`alpha_3db_ula`], found
/// independently of the two-dimensional root.
pub fn beamdepth_ula(cfg: &UraConfig, phi_rad: f64, r_f_m: f64) -> Result<BeamdepthResult> {
    if cfg.n2 != 1 {
        return Err(Error::Domain(format!(
            "linear-array beamdepth requires n2 = 1, got {}x{}",
            cfg.n1, cfg.n2
        )));
    }
    check_focal_range(cfg, r_f_m)?;
    let cos_ph = phi_rad.cos();
    let beta1 = cos_ph * cos_ph;
    let alpha = alpha_3db_ula();
    if beta1 <= 0.0 {
        return Ok(BeamdepthResult {
            bd_m: Extent::Infinite,
            rf_min_m: r_f_m,
            rf_max_m: Extent::Infinite,
            alpha_3db: alpha,
            degenerate: true,
        });
    }
    let a = 4.0 * alpha * r_f_m / (cfg.rayleigh_m * beta1);
    Ok(window_from_ratio(r_f_m, a, alpha))
}

/// Maximum focal range with a finite 3 dB window at a given direction:
/// `ebrd = eta R_D sin(theta) sqrt(1 - sin^2 theta sin^2 phi)
///         / (4 alpha (1 + eta^2))`.
///
/// Degenerate (endfire) directions return zero with the flag set.
pub fn ebrd(cfg: &UraConfig, phi_rad: f64, theta_rad: f64) -> Result<EbrdResult> {
    let (beta1, beta2) = betas(phi_rad, theta_rad);
    let angular = (beta1 * beta2).sqrt();
    if angular <= 0.0 {
        return Ok(EbrdResult {
            ebrd_m: 0.0,
            azimuth_rad: phi_rad,
            elevation_rad: theta_rad,
            degenerate: true,
        });
    }
    let alpha = alpha_3db_for_ratio(cfg.eta * (beta1 / beta2).sqrt());
    let ebrd_m =
        cfg.eta * cfg.rayleigh_m * angular / (4.0 * alpha * (1.0 + cfg.eta * cfg.eta));
    Ok(EbrdResult {
        ebrd_m,
        azimuth_rad: phi_rad,
        elevation_rad: theta_rad,
        degenerate: false,
    })
}

/// Sweeps the width-to-height ratio over `2^-6 ..= 2^6` at a fixed total
/// element count, mapping each target ratio to the nearest realizable
/// divisor pair of `n_bs` (log distance, ties toward the smaller ratio)
/// and deduplicating.
///
/// Each row's beamdepth is evaluated at `r_f = rf_fraction * R_D(eta)`:
/// the focal range must scale with each configuration's own Rayleigh
/// distance for the comparison to be meaningful, since a fixed absolute
/// range drifts from deep near field to far field as the array elongates.
pub fn eta_sweep(
    n_bs: usize,
    carrier_hz: f64,
    phi_rad: f64,
    theta_rad: f64,
    rf_fraction: f64,
) -> Result<Vec<EtaSweepRow>> {
    let targets: Vec<f64> = (-6..=6).map(|k| 2f64.powi(k)).collect();
    eta_sweep_over(n_bs, carrier_hz, phi_rad, theta_rad, rf_fraction, &targets)
}

/// [`eta_sweep`] over caller-chosen target ratios.
pub fn eta_sweep_over(
    n_bs: usize,
    carrier_hz: f64,
    phi_rad: f64,
    theta_rad: f64,
    rf_fraction: f64,
    target_etas: &[f64],
) -> Result<Vec<EtaSweepRow>> {
    if n_bs == 0 {
        return Err(Error::param("n_bs", "element count must be >= 1"));
    }
    if !rf_fraction.is_finite() || rf_fraction <= 0.0 || rf_fraction >= 0.5 {
        return Err(Error::param(
            "rf_fraction",
            format!("must lie in (0, 0.5), got {rf_fraction}"),
        ));
    }
    let mut pairs: Vec<(usize, usize)> = target_etas
        .iter()
        .map(|&eta| nearest_factor_pair(n_bs, eta))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut rows = Vec::with_capacity(pairs.len());
    for (n1, n2) in pairs {
        let cfg = UraConfig::half_wavelength(n1, n2, carrier_hz)?;
        let r_f = rf_fraction * cfg.rayleigh_m;
        if r_f < cfg.near_field_min_m() {
            return Err(Error::Domain(format!(
                "rf_fraction {rf_fraction} puts the focal range {r_f:.4} m below 1.2 D = {:.4} m \
                 for the {n1}x{n2} configuration; raise the fraction or the element count",
                cfg.near_field_min_m()
            )));
        }
        let alpha = alpha_3db(&cfg, phi_rad, theta_rad)?;
        let depth = beamdepth(&cfg, phi_rad, theta_rad, r_f)?;
        let limit = ebrd(&cfg, phi_rad, theta_rad)?;
        rows.push(EtaSweepRow {
            eta: cfg.eta,
            n1,
            n2,
            rayleigh_m: cfg.rayleigh_m,
            alpha_3db: alpha,
            combined_factor: alpha * (cfg.eta * cfg.eta + 1.0) / cfg.eta,
            rf_m: r_f,
            bd_m: depth.bd_m,
            ebrd_m: limit.ebrd_m,
        });
    }
    rows.sort_by(|a, b| a.eta.partial_cmp(&b.eta).expect("finite ratios"));
    Ok(rows)
}

/// Divisor pair `(n1, n2)` of `n_bs` whose ratio `n1/n2` is nearest the
/// target in log distance; ties resolve toward the smaller ratio.
fn nearest_factor_pair(n_bs: usize, target_eta: f64) -> (usize, usize) {
    let mut best = (1, n_bs);
    let mut best_dist = f64::INFINITY;
    for n1 in 1..=n_bs {
        if !n_bs.is_multiple_of(n1) {
            continue;
        }
        let n2 = n_bs / n1;
        let eta = n1 as f64 / n2 as f64;
        let dist = (eta.ln() - target_eta.ln()).abs();
        if dist < best_dist - 1e-12 {
            best = (n1, n2);
            best_dist = dist;
        }
    }
    best
}

/// Default grid size for [`scan_3db_window`].
pub const SCAN_GRID_POINTS: usize = 4096;

/// Measures the 3 dB window by scanning [`array_gain_exact`] on a
/// logarithmic grid over `[1.2 D, 10 R_D]` and bisecting each crossing to
/// `1e-6` relative. Computationally independent of the closed-form window.
///
/// Returns `upper_m = None` when the gain stays above one half out to the
/// scan limit.
pub fn scan_3db_window(cfg: &UraConfig, focus: &SphericalPoint) -> Result<ScanWindow> {
    check_focal_range(cfg, focus.range_m)?;
    let z_lo = cfg.near_field_min_m();
    let z_hi = 10.0 * cfg.rayleigh_m;
    let log_lo = z_lo.ln();
    let step = (z_hi.ln() - log_lo) / (SCAN_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_GRID_POINTS)
        .map(|i| (log_lo + step * i as f64).exp())
        .collect();
    let gain = |z: f64| array_gain_exact(cfg, focus, z);

    // walk outward from the focus in both directions, keeping the last
    // at-or-above-level point as the bracket anchor; the focus itself
    // (gain exactly 1) seeds both anchors, so the bracket stays valid
    // even when the whole window falls between two grid points
    let split = grid.partition_point(|&z| z < focus.range_m);

    let mut lower = z_lo; // window reaches the scan floor unless a crossing appears
    let mut anchor = focus.range_m;
    for i in (0..split).rev() {
        if gain(grid[i]) < 0.5 {
            lower = bisect_crossing(&gain, grid[i], anchor);
            break;
        }
        anchor = grid[i];
    }

    let mut upper = None;
    let mut anchor = focus.range_m;
    for i in split..SCAN_GRID_POINTS {
        if gain(grid[i]) < 0.5 {
            upper = Some(bisect_crossing(&gain, grid[i], anchor));
            break;
        }
        anchor = grid[i];
    }
    Ok(ScanWindow {
        lower_m: lower,
        upper_m: upper,
    })
}

/// Bisects `gain = 1/2` between a point below the level (`below`) and a
/// point at or above it (`above`), to 1e-6 relative.
fn bisect_crossing(gain: &impl Fn(f64) -> f64, below: f64, above: f64) -> f64 {
    let (mut lo, mut hi) = (below, above);
    while (hi - lo).abs() > 1e-6 * hi.abs().max(lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if gain(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
