//! Array geometry and target locations.
//!
//! A [`UraConfig`] describes a uniform rectangular array of `n1 x n2`
//! isotropic elements on the y-z plane, together with every purely
//! geometric derived quantity: aperture, Rayleigh distance, and the
//! width-to-height ratio `eta = n1 / n2`.
//!
//! # Angle convention
//!
//! Elevation `theta` is measured **from the z-axis** (the array's vertical
//! axis), not from the horizon. Boresight is therefore `theta = pi/2`,
//! where the z directional cosine `u_z = cos(theta)` vanishes. Azimuth
//! `phi` is measured in the x-y plane from the x-axis, `phi` in
//! `[-pi/2, pi/2]`. Many antenna codebases use elevation-from-horizon;
//! convert before constructing a [`SphericalPoint`].

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Radial lower bound of the uniform-amplitude near-field model, as a
/// multiple of the aperture.
pub const NEAR_FIELD_APERTURE_FACTOR: f64 = 1.2;

/// Uniform rectangular array on the y-z plane.
///
/// `n1` counts elements along the y-axis, `n2` along the z-axis. Element
/// indices run over symmetric integer lists (see [`UraConfig::y_indices`]),
/// so the array is centered on the coordinate origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UraConfig {
    /// Elements along the y-axis.
    pub n1: usize,
    /// Elements along the z-axis.
    pub n2: usize,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Element spacing in meters (same along both axes).
    pub spacing_m: f64,
    /// Wavelength in meters.
    pub wavelength_m: f64,
    /// Total aperture length `d * sqrt(n1^2 + n2^2)` in meters.
    pub aperture_m: f64,
    /// Rayleigh distance `2 D^2 / lambda` in meters.
    pub rayleigh_m: f64,
    /// Width-to-height ratio `n1 / n2`.
    pub eta: f64,
}

impl UraConfig {
    /// Builds an array from element counts, carrier frequency, and spacing
    /// expressed as a multiple of the wavelength (`0.5` for the usual
    /// half-wavelength grid).
    pub fn new(n1: usize, n2: usize, carrier_hz: f64, spacing_factor: f64) -> Result<Self> {
        if n1 == 0 {
            return Err(Error::param("n1", "element count must be >= 1"));
        }
        if n2 == 0 {
            return Err(Error::param("n2", "element count must be >= 1"));
        }
        if !carrier_hz.is_finite() || carrier_hz <= 0.0 {
            return Err(Error::param(
                "carrier_hz",
                format!("must be positive and finite, got {carrier_hz}"),
            ));
        }
        if !spacing_factor.is_finite() || spacing_factor <= 0.0 {
            return Err(Error::param(
                "spacing_factor",
                format!("must be positive and finite, got {spacing_factor}"),
            ));
        }
        let wavelength_m = SPEED_OF_LIGHT / carrier_hz;
        let spacing_m = spacing_factor * wavelength_m;
        let (n1f, n2f) = (n1 as f64, n2 as f64);
        let aperture_m = spacing_m * (n1f * n1f + n2f * n2f).sqrt();
        let rayleigh_m = 2.0 * aperture_m * aperture_m / wavelength_m;
        Ok(UraConfig {
            n1,
            n2,
            carrier_hz,
            spacing_m,
            wavelength_m,
            aperture_m,
            rayleigh_m,
            eta: n1f / n2f,
        })
    }

    /// Half-wavelength spacing shorthand.
    pub fn half_wavelength(n1: usize, n2: usize, carrier_hz: f64) -> Result<Self> {
        Self::new(n1, n2, carrier_hz, 0.5)
    }

    /// Total element count.
    pub fn n_bs(&self) -> usize {
        self.n1 * self.n2
    }

    /// Wavenumber `2 pi f / c = 2 pi / lambda` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength_m
    }

    /// Lower radial bound of the uniform-amplitude near-field model,
    /// `1.2 * aperture`.
    pub fn near_field_min_m(&self) -> f64 {
        NEAR_FIELD_APERTURE_FACTOR * self.aperture_m
    }

    /// Symmetric element indices along the y-axis.
    ///
    /// For odd counts this is `-(n-1)/2 ..= (n-1)/2`; for even counts the
    /// list keeps `n` entries and spans `-n/2 ..= n/2 - 1`.
    pub fn y_indices(&self) -> std::ops::RangeInclusive<i64> {
        symmetric_indices(self.n1)
    }

    /// Symmetric element indices along the z-axis.
    pub fn z_indices(&self) -> std::ops::RangeInclusive<i64> {
        symmetric_indices(self.n2)
    }

    /// All `(n1, n2)` index pairs in row-major order (y index outer,
    /// z index inner, both ascending). This is the layout used by every
    /// steering vector and codeword.
    pub fn element_indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.y_indices()
            .flat_map(move |i| self.z_indices().map(move |j| (i, j)))
    }

    /// Checks that an index pair lies inside the symmetric ranges.
    pub fn contains_index(&self, n1: i64, n2: i64) -> bool {
        self.y_indices().contains(&n1) && self.z_indices().contains(&n2)
    }
}

/// Symmetric index list for `n` elements: starts at `-ceil((n-1)/2)` and
/// holds `n` consecutive integers.
fn symmetric_indices(n: usize) -> std::ops::RangeInclusive<i64> {
    let lo = -((n as i64) / 2);
    lo..=lo + n as i64 - 1
}

/// A point in the array's spherical coordinates: azimuth `phi`, elevation
/// `theta` from the z-axis, and range `r` from the array center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    /// Azimuth in radians, `[-pi/2, pi/2]`.
    pub azimuth_rad: f64,
    /// Elevation from the z-axis in radians, `(0, pi)`.
    pub elevation_rad: f64,
    /// Range in meters, `> 0`.
    pub range_m: f64,
}

/// Directional cosines of a [`SphericalPoint`] plus the two quadratic
/// phase coefficients used by the near-field distance expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalCosines {
    pub u_x: f64,
    pub u_y: f64,
    pub u_z: f64,
    /// `1 - sin^2(theta) sin^2(phi) = 1 - u_y^2`.
    pub beta1: f64,
    /// `1 - cos^2(theta) = sin^2(theta) = 1 - u_z^2`.
    pub beta2: f64,
}

impl SphericalPoint {
    pub fn new(azimuth_rad: f64, elevation_rad: f64, range_m: f64) -> Result<Self> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !azimuth_rad.is_finite() || azimuth_rad.abs() > half_pi {
            return Err(Error::param(
                "azimuth_rad",
                format!("must lie in [-pi/2, pi/2], got {azimuth_rad}"),
            ));
        }
        if !elevation_rad.is_finite()
            || elevation_rad <= 0.0
            || elevation_rad >= std::f64::consts::PI
        {
            return Err(Error::param(
                "elevation_rad",
                format!("must lie in (0, pi), got {elevation_rad}"),
            ));
        }
        if !range_m.is_finite() || range_m <= 0.0 {
            return Err(Error::param(
                "range_m",
                format!("must be positive and finite, got {range_m}"),
            ));
        }
        Ok(SphericalPoint {
            azimuth_rad,
            elevation_rad,
            range_m,
        })
    }

    /// Boresight (`phi = 0`, `theta = pi/2`) at the given range.
    pub fn boresight(range_m: f64) -> Result<Self> {
        Self::new(0.0, std::f64::consts::FRAC_PI_2, range_m)
    }

    /// Same direction, different range.
    pub fn with_range(&self, range_m: f64) -> Result<Self> {
        Self::new(self.azimuth_rad, self.elevation_rad, range_m)
    }

    /// Directional cosines `(u_x, u_y, u_z)` and the coefficients
    /// `beta1`, `beta2`.
    pub fn directions(&self) -> DirectionalCosines {
        let (sin_th, cos_th) = self.elevation_rad.sin_cos();
        let (sin_ph, cos_ph) = self.azimuth_rad.sin_cos();
        let u_y = sin_th * sin_ph;
        let u_z = cos_th;
        DirectionalCosines {
            u_x: sin_th * cos_ph,
            u_y,
            u_z,
            beta1: 1.0 - u_y * u_y,
            beta2: sin_th * sin_th,
        }
    }
}

impl DirectionalCosines {
    /// `sqrt(beta1 * beta2) = sin(theta) sqrt(1 - sin^2(theta) sin^2(phi))`,
    /// the angular factor of the beamfocusing limit. Zero at endfire.
    pub fn angular_factor(&self) -> f64 {
        (self.beta1 * self.beta2).sqrt()
    }
}
