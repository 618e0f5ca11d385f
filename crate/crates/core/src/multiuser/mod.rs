//! Downlink multiuser machinery: polar and DFT codebooks, beam-sweep
//! training, hybrid precoding with zero-forcing, and the seeded sum-rate
//! Monte Carlo.

mod codebook;
mod precoding;
mod simulation;

pub use codebook::{build_dft_codebook, build_polar_codebook, Codebook, CodebookKind, CodewordMeta};
pub use precoding::{
    assemble_solution, beam_training, hybrid_beam, sum_rate, zf_precode, PrecodingSolution,
    SumRateTally, ZfPrecoder,
};
pub use simulation::{
    run_monte_carlo, CodebookSpec, MonteCarloRun, RangeRegion, SnrSummary, SumRateExperiment,
    SumRateRecord, UserPlacement,
};

use num_complex::Complex64;

use crate::geometry::SphericalPoint;

/// A downlink user: location plus a complex path gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSpec {
    pub point: SphericalPoint,
    pub gain: Complex64,
}

impl UserSpec {
    /// Unit path gain.
    pub fn at(point: SphericalPoint) -> Self {
        UserSpec {
            point,
            gain: Complex64::new(1.0, 0.0),
        }
    }
}
