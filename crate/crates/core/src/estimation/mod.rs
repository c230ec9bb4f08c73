//! Two-phase channel estimation.
//!
//! Phase 1 produces reference-pair parameters (oracle, grid pursuit or an
//! external file). Phase 2 extends them geometrically to every subarray
//! pair, after which the hybrid channel is reassembled. OMP is provided as a
//! direct channel-estimation baseline.

mod extension;
mod metrics;
mod newton;
mod pursuit;
mod reconstruct;

pub use extension::{
    extend_all, extend_los, extend_nlos, extend_nlos_with, ExtendedEntry, ExtendedParams,
};
pub use metrics::{nmse_db, param_errors, ParamErrors};
pub use newton::{newton_solve, NewtonConfig, NewtonResult};
pub use pursuit::{omp_estimate, phase1_grid, AngleGrid, AngleRange, GridConfig, OmpResult};
pub use reconstruct::reconstruct_hspm;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_azimuth, PathParams, Scene};
use crate::{Error, Result};

/// Where a reference estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateSource {
    Oracle,
    Grid,
    Omp,
    External,
}

/// Reference-pair parameters for every path, LoS first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceParamsEstimate {
    pub paths: Vec<PathParams>,
    pub source: EstimateSource,
}

impl ReferenceParamsEstimate {
    pub fn new(paths: Vec<PathParams>, source: EstimateSource) -> Result<Self> {
        let est = Self { paths, source };
        est.validate()?;
        Ok(est)
    }

    /// Ground truth of a scene.
    pub fn from_scene(scene: &Scene) -> Self {
        Self {
            paths: scene.paths().to_vec(),
            source: EstimateSource::Oracle,
        }
    }

    /// Angles wrapped, distances and amplitudes positive. Amplitudes are not
    /// capped at 1 because estimators may overshoot.
    pub fn validate(&self) -> Result<()> {
        if self.paths.is_empty() {
            return Err(Error::validation("paths", "at least one path"));
        }
        for (i, p) in self.paths.iter().enumerate() {
            let capped = PathParams {
                amp: p.amp.min(1.0),
                ..*p
            };
            capped.validate(i)?;
        }
        Ok(())
    }
}

/// Standard deviations of the Gaussian perturbation applied by
/// [`phase1_oracle`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub dist: f64,
    #[serde(default)]
    pub theta_t: f64,
    #[serde(default)]
    pub phi_t: f64,
    #[serde(default)]
    pub theta_r: f64,
    #[serde(default)]
    pub phi_r: f64,
}

impl Perturbation {
    pub fn angles(sigma: f64) -> Self {
        Self {
            theta_t: sigma,
            phi_t: sigma,
            theta_r: sigma,
            phi_r: sigma,
            ..Self::default()
        }
    }

    fn as_array(&self) -> [f64; 6] {
        [self.amp, self.dist, self.theta_t, self.phi_t, self.theta_r, self.phi_r]
    }
}

/// Ground truth plus independent Gaussian noise per field. Amplitude and
/// distance are reflected to stay positive, azimuths are wrapped and
/// elevations are clamped just inside +-pi/2.
pub fn phase1_oracle(scene: &Scene, perturb: &Perturbation, seed: u64) -> Result<ReferenceParamsEstimate> {
    let sig = perturb.as_array();
    if sig.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::invalid("perturbation deviations must be non-negative"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut paths = Vec::with_capacity(scene.paths().len());
    for p in scene.paths() {
        let mut v = [p.amp, p.dist, p.theta_t, p.phi_t, p.theta_r, p.phi_r];
        for (x, s) in v.iter_mut().zip(sig) {
            // Always draw so the stream does not depend on which fields are zero.
            let z: f64 = Normal::new(0.0, 1.0).expect("unit normal").sample(&mut rng);
            *x += s * z;
        }
        let lim = std::f64::consts::FRAC_PI_2 - 1e-9;
        paths.push(PathParams {
            amp: v[0].abs(),
            dist: v[1].abs(),
            theta_t: wrap_azimuth(v[2]),
            phi_t: v[3].clamp(-lim, lim),
            theta_r: wrap_azimuth(v[4]),
            phi_r: v[5].clamp(-lim, lim),
        });
    }
    Ok(ReferenceParamsEstimate {
        paths,
        source: EstimateSource::Oracle,
    })
}
