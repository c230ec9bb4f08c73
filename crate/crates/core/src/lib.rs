//! Spherical, planar and hybrid spherical/planar channel models for
//! ultra-massive MIMO arrays built from subarrays, together with a two-phase
//! channel estimator: reference-subarray parameters are obtained first and
//! then extended geometrically to every subarray pair.
//!
//! Frame: the Tx reference antenna sits at the origin, y points along the
//! azimuth reference toward the receiver and z points up. Both arrays lie in
//! planes parallel to xz. Rx angles are measured in the receiver's facing
//! frame (y mirrored), so a line-of-sight path has `theta_r = -theta_t` and
//! `phi_r = -phi_t`.

pub mod channel;
pub mod error;
pub mod estimation;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod sampler;
pub mod signal;

pub use error::{Error, Result};

pub use channel::{ChannelMatrix, ModelKind};
pub use estimation::{ExtendedParams, ReferenceParamsEstimate};
pub use geometry::{ArrayLayout, GainModel, PathParams, ReflectorPlane, Scene};
pub use signal::{Codebook, Codeword, Observation};

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Point or direction in the Tx frame, meters.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Value reported for dB ratios whose numerator is exactly zero.
pub const DB_FLOOR: f64 = -300.0;

/// `20 log10(num / den)` floored at [`DB_FLOOR`].
pub fn ratio_db(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        return DB_FLOOR;
    }
    (20.0 * (num / den).log10()).max(DB_FLOOR)
}
