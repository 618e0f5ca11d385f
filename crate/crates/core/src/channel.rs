//! Spherical-wave element distances, near-field steering vectors, the
//! line-of-sight channel, and the normalized array gain of conjugate-phase
//! beamforming.
//!
//! The array gain comes in two routes that the rest of the crate keeps
//! deliberately separate:
//!
//! * [`array_gain_exact`] sums the quadratic element phases directly
//!   (the summation is separable across the two array axes, so it runs in
//!   `O(n1 + n2)` per evaluation);
//! * [`array_gain_fresnel`] evaluates the closed form in terms of Fresnel
//!   integrals, which is what the beamdepth analysis inverts.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fresnel::fresnel_power_ratio;
use crate::geometry::{DirectionalCosines, SphericalPoint, UraConfig};

/// Which element-distance law a steering vector is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceModel {
    /// Full Pythagorean distance between element and target.
    Exact,
    /// Second-order near-field expansion with the `n1*n2` cross term
    /// dropped; this is the law the closed-form analysis assumes.
    Expanded,
}

/// A unit-norm complex sequence over the array elements, laid out
/// row-major over `(n1, n2)` index pairs in ascending index order.
///
/// Steering vectors, channels, beamformers, and codewords all use this
/// type; steering vectors additionally have every entry at magnitude
/// `1/sqrt(n_bs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn from_entries(entries: Vec<Complex64>) -> Self {
        ComplexVector { entries }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Hermitian inner product `self^H other`.
    ///
    /// Panics if the lengths differ; every caller in this crate pairs
    /// vectors built from the same array.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(
            self.len(),
            other.len(),
            "inner product requires equal lengths"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// In-place scaling by a real factor.
    pub fn scale(&mut self, factor: f64) {
        for e in &mut self.entries {
            *e *= factor;
        }
    }
}

/// One propagation path: a complex gain and the scatterer location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    pub gain: Complex64,
    pub point: SphericalPoint,
}

impl PathSpec {
    /// Unit-gain line-of-sight path.
    pub fn los(point: SphericalPoint) -> Self {
        PathSpec {
            gain: Complex64::new(1.0, 0.0),
            point,
        }
    }
}

/// Exact distance between the `(n1, n2)` element at `(0, n1 d, n2 d)` and
/// the target.
pub fn element_distance_exact(
    cfg: &UraConfig,
    p: &SphericalPoint,
    n1: i64,
    n2: i64,
) -> Result<f64> {
    check_index(cfg, n1, n2)?;
    Ok(exact_distance(cfg.spacing_m, p.range_m, &p.directions(), n1, n2))
}

/// Second-order near-field expansion of the element distance.
///
/// `r - n1 d u_y - n2 d u_z + (n1^2 d^2 / 2r) beta1 + (n2^2 d^2 / 2r) beta2`,
/// optionally minus the `n1 n2 d^2 u_y u_z / r` cross term. The closed-form
/// analysis drops the cross term, so it is off by default everywhere else
/// in the crate.
pub fn element_distance_expanded(
    cfg: &UraConfig,
    p: &SphericalPoint,
    n1: i64,
    n2: i64,
    include_cross_term: bool,
) -> Result<f64> {
    check_index(cfg, n1, n2)?;
    Ok(expanded_distance(
        cfg.spacing_m,
        p.range_m,
        &p.directions(),
        n1,
        n2,
        include_cross_term,
    ))
}

fn check_index(cfg: &UraConfig, n1: i64, n2: i64) -> Result<()> {
    if !cfg.contains_index(n1, n2) {
        return Err(Error::Domain(format!(
            "element index ({n1}, {n2}) outside the {}x{} array",
            cfg.n1, cfg.n2
        )));
    }
    Ok(())
}

fn exact_distance(d: f64, r: f64, dc: &DirectionalCosines, n1: i64, n2: i64) -> f64 {
    let x = r * dc.u_x;
    let y = r * dc.u_y - n1 as f64 * d;
    let z = r * dc.u_z - n2 as f64 * d;
    (x * x + y * y + z * z).sqrt()
}

fn expanded_distance(
    d: f64,
    r: f64,
    dc: &DirectionalCosines,
    n1: i64,
    n2: i64,
    include_cross_term: bool,
) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let d2 = d * d;
    let mut dist = r - n1f * d * dc.u_y - n2f * d * dc.u_z
        + n1f * n1f * d2 * dc.beta1 / (2.0 * r)
        + n2f * n2f * d2 * dc.beta2 / (2.0 * r);
    if include_cross_term {
        dist -= n1f * n2f * d2 * dc.u_y * dc.u_z / r;
    }
    dist
}

/// Near-field steering vector toward `p`.
///
/// Entry `(n1, n2)` is `exp(-j nu (r^(n1,n2) - r)) / sqrt(n_bs)`. Ranges
/// below `1.2 * aperture` only log a warning: the uniform-amplitude model
/// degrades there but the phases stay well defined.
pub fn steering_vector(cfg: &UraConfig, p: &SphericalPoint, model: DistanceModel) -> ComplexVector {
    if p.range_m < cfg.near_field_min_m() * (1.0 - 1e-12) {
        log::warn!(
            "steering range {:.4} m below 1.2 * aperture = {:.4} m",
            p.range_m,
            cfg.near_field_min_m()
        );
    }
    let dc = p.directions();
    let nu = cfg.wavenumber();
    let d = cfg.spacing_m;
    let r = p.range_m;
    let scale = 1.0 / (cfg.n_bs() as f64).sqrt();
    let entries = cfg
        .element_indices()
        .map(|(i, j)| {
            let dist = match model {
                DistanceModel::Exact => exact_distance(d, r, &dc, i, j),
                DistanceModel::Expanded => expanded_distance(d, r, &dc, i, j, false),
            };
            Complex64::from_polar(scale, -nu * (dist - r))
        })
        .collect();
    ComplexVector::from_entries(entries)
}

/// Infinite-range (planar-wave) steering vector for directional cosines
/// `(u_y, u_z)`: entry `(n1, n2)` is `exp(j nu d (n1 u_y + n2 u_z)) / sqrt(n_bs)`.
pub fn planar_wave_vector(cfg: &UraConfig, u_y: f64, u_z: f64) -> ComplexVector {
    let nu_d = cfg.wavenumber() * cfg.spacing_m;
    let scale = 1.0 / (cfg.n_bs() as f64).sqrt();
    let entries = cfg
        .element_indices()
        .map(|(i, j)| Complex64::from_polar(scale, nu_d * (i as f64 * u_y + j as f64 * u_z)))
        .collect();
    ComplexVector::from_entries(entries)
}

/// Line-of-sight multipath channel
/// `h = sqrt(n_bs / L) * sum_l g_l exp(-j nu r_l) b(phi_l, theta_l, r_l)`,
/// with `L` the total number of paths. Steering vectors use the expanded
/// distance law, matching the beamformers the analysis pairs them with.
pub fn los_channel(cfg: &UraConfig, paths: &[PathSpec]) -> Result<ComplexVector> {
    if paths.is_empty() {
        return Err(Error::Domain("los_channel requires at least one path".into()));
    }
    let nu = cfg.wavenumber();
    let scale = (cfg.n_bs() as f64 / paths.len() as f64).sqrt();
    let mut acc = vec![Complex64::new(0.0, 0.0); cfg.n_bs()];
    for path in paths {
        let b = steering_vector(cfg, &path.point, DistanceModel::Expanded);
        let w = path.gain * Complex64::from_polar(1.0, -nu * path.point.range_m) * scale;
        for (a, e) in acc.iter_mut().zip(b.entries()) {
            *a += w * e;
        }
    }
    Ok(ComplexVector::from_entries(acc))
}

/// Normalized array gain of a conjugate-phase beam focused at `focus`,
/// evaluated at `eval_range_m` along the same direction; direct summation
/// of the expanded-model element phases.
///
/// The linear phase terms cancel between beamformer and steering vector,
/// leaving the separable quadratic sum
/// `|S1|^2 |S2|^2 / (n1 n2)^2` with
/// `S_i = sum_n exp(j pi d^2 beta_i z_eff n^2 / lambda)`. Equals 1 exactly
/// at `eval_range_m = focus.range_m`.
pub fn array_gain_exact(cfg: &UraConfig, focus: &SphericalPoint, eval_range_m: f64) -> f64 {
    let dc = focus.directions();
    let z_eff = (eval_range_m - focus.range_m) / (eval_range_m * focus.range_m);
    let d2 = cfg.spacing_m * cfg.spacing_m;
    let a1 = PI * d2 * dc.beta1 * z_eff / cfg.wavelength_m;
    let a2 = PI * d2 * dc.beta2 * z_eff / cfg.wavelength_m;
    let s1 = quadratic_phase_sum(cfg.y_indices(), a1);
    let s2 = quadratic_phase_sum(cfg.z_indices(), a2);
    let g = (s1.norm() / cfg.n1 as f64) * (s2.norm() / cfg.n2 as f64);
    g * g
}

fn quadratic_phase_sum(indices: std::ops::RangeInclusive<i64>, coeff: f64) -> Complex64 {
    indices
        .map(|n| Complex64::from_polar(1.0, coeff * (n * n) as f64))
        .sum()
}

/// Closed-form array gain in terms of Fresnel integrals:
/// `G = R(gamma1) R(gamma2)` with `R(g) = [C^2(g) + S^2(g)] / g^2`,
/// `gamma_i = sqrt(N_i^2 d^2 beta_i z_eff / (2 lambda))`, and
/// `z_eff = |z - r_f| / (z r_f)`.
///
/// Returns 1 at `z = r_f` (the `gamma -> 0` limit), and a degenerate
/// `beta_i = 0` collapses the corresponding factor to 1.
pub fn array_gain_fresnel(cfg: &UraConfig, phi_rad: f64, theta_rad: f64, r_f_m: f64, z_m: f64) -> f64 {
    let (g1, g2) = fresnel_gammas(cfg, phi_rad, theta_rad, r_f_m, z_m);
    fresnel_power_ratio(g1) * fresnel_power_ratio(g2)
}

/// The two Fresnel arguments of the closed-form gain.
pub fn fresnel_gammas(
    cfg: &UraConfig,
    phi_rad: f64,
    theta_rad: f64,
    r_f_m: f64,
    z_m: f64,
) -> (f64, f64) {
    let sin_th = theta_rad.sin();
    let sin_ph = phi_rad.sin();
    let beta1 = 1.0 - sin_th * sin_th * sin_ph * sin_ph;
    let beta2 = sin_th * sin_th;
    let z_eff = ((z_m - r_f_m) / (z_m * r_f_m)).abs();
    let d2 = cfg.spacing_m * cfg.spacing_m;
    let common = d2 * z_eff / (2.0 * cfg.wavelength_m);
    let (n1f, n2f) = (cfg.n1 as f64, cfg.n2 as f64);
    (
        (n1f * n1f * beta1 * common).sqrt(),
        (n2f * n2f * beta2 * common).sqrt(),
    )
}
