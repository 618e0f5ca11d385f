//! Beam-training codebooks.
//!
//! The polar codebook samples jointly in angle and range: an angular grid
//! uniform in the `(u_y, u_z)` directional-cosine plane, and per angle a
//! set of focal rings uniform in inverse distance between the near-field
//! floor `1.2 D` and that angle's EBRD, plus one infinite-range
//! (planar-wave) codeword. The DFT codebook is the standard orthogonal
//! planar-wave grid and carries no range information; the contrast between
//! the two is exactly what range-domain multiplexing buys inside the EBRD.

use crate::channel::{planar_wave_vector, steering_vector, ComplexVector, DistanceModel};
use crate::error::{Error, Result};
use crate::focusing::ebrd;
use crate::geometry::{SphericalPoint, UraConfig};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Polar,
    Dft,
}

impl std::fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CodebookKind::Polar => write!(f, "polar"),
            CodebookKind::Dft => write!(f, "dft"),
        }
    }
}

/// Where a codeword points: directional cosines plus the focal range
/// (`None` for planar-wave codewords).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodewordMeta {
    pub u_y: f64,
    pub u_z: f64,
    pub range_m: Option<f64>,
}

/// An indexed set of unit-norm codewords with generation metadata.
/// Indices are stable: training reports positions into `codewords`.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub kind: CodebookKind,
    pub codewords: Vec<ComplexVector>,
    pub meta: Vec<CodewordMeta>,
    pub az_points: usize,
    pub el_points: usize,
    /// Focal rings per angle (0 for DFT).
    pub rings: usize,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

/// Symmetric grid offsets, same convention as the element indices.
fn grid_offsets(n: usize) -> impl Iterator<Item = i64> {
    let lo = -((n as i64) / 2);
    lo..=lo + n as i64 - 1
}

/// Builds the polar (angle x range) codebook.
///
/// The angular grid is `az_points x el_points`, uniform in
/// `(u_y, u_z) = (sin theta sin phi, cos theta)` with spacing `2/n` per
/// axis; grid points outside the visible disk `u_y^2 + u_z^2 < 1` are
/// skipped. Each angle gets `rings` focal distances placed at the cell
/// midpoints of a uniform inverse-distance split of
/// `[1 / EBRD(phi, theta), 1 / (1.2 D)]`, plus one planar codeword.
/// Every codeword is the conjugate-phase steering vector of its grid
/// point.
pub fn build_polar_codebook(
    cfg: &UraConfig,
    az_points: usize,
    el_points: usize,
    rings: usize,
) -> Result<Codebook> {
    if rings == 0 {
        return Err(Error::param("rings", "polar codebook needs >= 1 ring"));
    }
    if az_points == 0 || el_points == 0 {
        return Err(Error::param(
            "az_points/el_points",
            "angular grid must be non-empty",
        ));
    }
    let r_floor = cfg.near_field_min_m();
    let mut codewords = Vec::new();
    let mut meta = Vec::new();
    for ky in grid_offsets(az_points) {
        let u_y = 2.0 * ky as f64 / az_points as f64;
        for kz in grid_offsets(el_points) {
            let u_z = 2.0 * kz as f64 / el_points as f64;
            if u_y * u_y + u_z * u_z >= 1.0 - 1e-9 {
                continue;
            }
            let theta = u_z.acos();
            let sin_theta = (1.0 - u_z * u_z).sqrt();
            let phi = (u_y / sin_theta).clamp(-1.0, 1.0).asin();
            let limit = ebrd(cfg, phi, theta)?;
            // rings live between the near-field floor and the EBRD; if the
            // EBRD collapses below the floor, all rings sit at the floor
            let r_far = limit.ebrd_m.max(r_floor);
            let inv_far = 1.0 / r_far;
            let inv_near = 1.0 / r_floor;
            for s in 0..rings {
                let inv = inv_far + (s as f64 + 0.5) * (inv_near - inv_far) / rings as f64;
                let r = 1.0 / inv;
                let point = SphericalPoint::new(phi, theta, r)?;
                codewords.push(steering_vector(cfg, &point, DistanceModel::Expanded));
                meta.push(CodewordMeta {
                    u_y,
                    u_z,
                    range_m: Some(r),
                });
            }
            codewords.push(planar_wave_vector(cfg, u_y, u_z));
            meta.push(CodewordMeta {
                u_y,
                u_z,
                range_m: None,
            });
        }
    }
    Ok(Codebook {
        kind: CodebookKind::Polar,
        codewords,
        meta,
        az_points,
        el_points,
        rings,
    })
}

/// Builds the orthogonal DFT codebook: `n1 * n2` planar-wave codewords
/// with entries `exp(j 2 pi (n1 k1 / N1 + n2 k2 / N2)) / sqrt(n_bs)`,
/// i.e. the angular grid `u = k lambda / (d N)` per axis. Mutually
/// orthogonal for any element spacing.
pub fn build_dft_codebook(cfg: &UraConfig) -> Codebook {
    let scale = 1.0 / (cfg.n_bs() as f64).sqrt();
    let (n1f, n2f) = (cfg.n1 as f64, cfg.n2 as f64);
    let u_scale_y = cfg.wavelength_m / (cfg.spacing_m * n1f);
    let u_scale_z = cfg.wavelength_m / (cfg.spacing_m * n2f);
    let mut codewords = Vec::with_capacity(cfg.n_bs());
    let mut meta = Vec::with_capacity(cfg.n_bs());
    for k1 in grid_offsets(cfg.n1) {
        for k2 in grid_offsets(cfg.n2) {
            let entries = cfg
                .element_indices()
                .map(|(i, j)| {
                    let phase = 2.0 * PI * (i as f64 * k1 as f64 / n1f + j as f64 * k2 as f64 / n2f);
                    Complex64::from_polar(scale, phase)
                })
                .collect();
            codewords.push(ComplexVector::from_entries(entries));
            meta.push(CodewordMeta {
                u_y: k1 as f64 * u_scale_y,
                u_z: k2 as f64 * u_scale_z,
                range_m: None,
            });
        }
    }
    Codebook {
        kind: CodebookKind::Dft,
        codewords,
        meta,
        az_points: cfg.n1,
        el_points: cfg.n2,
        rings: 0,
    }
}
