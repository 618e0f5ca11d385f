//! Near-field beamfocusing analysis for uniform rectangular arrays.
//!
//! Large apertures at high carrier frequencies put receivers inside the
//! radiative near field, where a conjugate-phase beam has a finite radial
//! 3 dB extent (its beamdepth) instead of the far field's infinite one.
//! This crate models that regime for a generalized `n1 x n2` rectangular
//! array:
//!
//! * [`geometry`] — array parameterization and directional cosines;
//! * [`fresnel`] — the Fresnel integrals `C(x)`, `S(x)` behind the
//!   closed-form gain;
//! * [`channel`] — spherical-wave steering vectors, line-of-sight
//!   channels, and the normalized array gain (direct summation and
//!   closed form);
//! * [`focusing`] — beamdepth windows, the effective beamfocusing
//!   Rayleigh distance (EBRD), and aspect-ratio sweeps;
//! * [`multiuser`] — polar and DFT codebooks, beam training, hybrid
//!   zero-forcing precoding, and the seeded sum-rate Monte Carlo.
//!
//! Angles follow the convention documented in [`geometry`]: elevation is
//! measured from the z-axis, so boresight is `theta = pi/2`.

pub mod channel;
pub mod error;
pub mod focusing;
pub mod fresnel;
pub mod geometry;
pub mod multiuser;

pub use channel::{ComplexVector, DistanceModel, PathSpec};
pub use error::{Error, Result};
pub use focusing::{BeamdepthResult, EbrdResult, Extent};
pub use geometry::{DirectionalCosines, SphericalPoint, UraConfig, SPEED_OF_LIGHT};
pub use multiuser::{Codebook, CodebookKind, SumRateExperiment, SumRateRecord, UserSpec};
