//! External reference-parameter estimates: denormalized, radians and meters.
//!
//! ```json
//! {"paths": [{"amp": 1e-4, "dist": 12.0, "theta_t": 0.3, "phi_t": 0.1,
//!             "theta_r": -0.3, "phi_r": -0.1}]}
//! ```
//! Path 0 is the LoS path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::estimation::{EstimateSource, ReferenceParamsEstimate};
use crate::geometry::PathParams;
use crate::Result;

use super::{read_json, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathRecord {
    pub amp: f64,
    pub dist: f64,
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesFile {
    pub paths: Vec<PathRecord>,
}

impl From<&PathParams> for PathRecord {
    fn from(p: &PathParams) -> Self {
        Self {
            amp: p.amp,
            dist: p.dist,
            theta_t: p.theta_t,
            phi_t: p.phi_t,
            theta_r: p.theta_r,
            phi_r: p.phi_r,
        }
    }
}

impl EstimatesFile {
    pub fn into_estimate(self) -> Result<ReferenceParamsEstimate> {
        let paths = self
            .paths
            .iter()
            .map(|r| PathParams {
                amp: r.amp,
                dist: r.dist,
                theta_t: r.theta_t,
                phi_t: r.phi_t,
                theta_r: r.theta_r,
                phi_r: r.phi_r,
            })
            .collect();
        ReferenceParamsEstimate::new(paths, EstimateSource::External)
    }
}

pub fn import_external_estimates(path: &Path) -> Result<ReferenceParamsEstimate> {
    read_json::<EstimatesFile>(path)?.into_estimate()
}

pub fn export_estimates(path: &Path, est: &ReferenceParamsEstimate) -> Result<()> {
    let file = EstimatesFile {
        paths: est.paths.iter().map(PathRecord::from).collect(),
    };
    write_json(path, &file)
}
