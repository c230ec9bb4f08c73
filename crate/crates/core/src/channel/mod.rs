//! Spherical-wave, planar-wave and hybrid channel synthesis, plus the
//! planar-wave approximation error analysis.
//!
//! Every entry is assembled as `amp * exp(-j k D_ref) * exp(-j k (D - D_ref))`
//! where `D_ref` is the reference-pair distance of the path. The excess
//! `D - D_ref` is evaluated without cancellation so that models built along
//! different routes agree to rounding error.

mod approx;

pub use approx::{
    approx_error_report, farfield_metric, pairwise_error_closed_form, pairwise_error_numeric,
    AngularFactor, ApproxErrorReport, ClosedFormOptions,
};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimation::{extend_all, reconstruct_hspm, NewtonConfig, ReferenceParamsEstimate};
use crate::geometry::{
    mirror_point_local, norm_increment, recover_reflector, AmplitudeMode, ArrayLayout, Scene,
};
use crate::{ratio_db, CMatrix, Error, Result, Vec3, C64};

/// Which channel model produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Swm,
    Pwm,
    Hspm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Swm => "swm",
            ModelKind::Pwm => "pwm",
            ModelKind::Hspm => "hspm",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "swm" => Ok(ModelKind::Swm),
            "pwm" => Ok(ModelKind::Pwm),
            "hspm" => Ok(ModelKind::Hspm),
            other => Err(Error::invalid(format!("unknown model `{other}`"))),
        }
    }
}

/// Dense `N_r x N_t` channel tagged with its model and scene fingerprint.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: CMatrix,
    pub model: ModelKind,
    pub scene_hash: String,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix, model: ModelKind, scene_hash: impl Into<String>) -> Result<Self> {
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical("channel matrix has non-finite entries".into()));
        }
        Ok(Self {
            entries,
            model,
            scene_hash: scene_hash.into(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.norm()
    }
}

/// `exp(-j 2 pi x / lambda)` with the whole number of wavelengths removed
/// before the trig call.
pub fn phasor(x: f64, lambda: f64) -> C64 {
    let mut cycles = x / lambda;
    cycles -= cycles.round();
    C64::cis(-2.0 * PI * cycles)
}

/// `amp * exp(-j 2 pi dist / lambda)`.
pub fn path_gain(amp: f64, dist: f64, lambda: f64) -> Result<C64> {
    if !(amp > 0.0 && dist > 0.0 && lambda > 0.0) {
        return Err(Error::invalid(format!(
            "path gain needs positive inputs (amp {amp}, dist {dist}, lambda {lambda})"
        )));
    }
    Ok(phasor(dist, lambda) * amp)
}

/// Steering vector with entries `exp(+j 2 pi d / lambda * psi)`,
/// `psi = x sin(theta) cos(phi) - z sin(phi)` over integer grid coordinates.
fn steering(grid: &[(i64, i64)], d: f64, theta: f64, phi: f64, lambda: f64) -> Vec<C64> {
    let ux = theta.sin() * phi.cos();
    let uz = phi.sin();
    let scale = d / lambda;
    grid.iter()
        .map(|&(x, z)| {
            let mut cycles = scale * (x as f64 * ux - z as f64 * uz);
            cycles -= cycles.round();
            C64::cis(2.0 * PI * cycles)
        })
        .collect()
}

/// Array response of a whole layout, first entry 1.
pub fn array_response(layout: &ArrayLayout, theta: f64, phi: f64, lambda: f64) -> Vec<C64> {
    steering(&layout.grid(), layout.d(), theta, phi, lambda)
}

/// Array response of a single subarray relative to its own reference antenna.
pub fn subarray_response(layout: &ArrayLayout, theta: f64, phi: f64, lambda: f64) -> Vec<C64> {
    steering(&layout.local_grid(), layout.d(), theta, phi, lambda)
}

/// Builds a matrix column by column in parallel. `col(l)` returns column `l`.
pub(crate) fn build_columns<F>(nrows: usize, ncols: usize, col: F) -> Result<CMatrix>
where
    F: Fn(usize) -> Result<Vec<C64>> + Sync + Send,
{
    let cols: Vec<Vec<C64>> = (0..ncols).into_par_iter().map(&col).collect::<Result<_>>()?;
    let mut data = Vec::with_capacity(nrows * ncols);
    for c in cols {
        debug_assert_eq!(c.len(), nrows);
        data.extend(c);
    }
    Ok(CMatrix::from_vec(nrows, ncols, data))
}

enum SwmPath {
    Los {
        r1: Vec3,
    },
    Nlos {
        s_ref: Vec3,
        rs: Vec3,
        normal: Vec3,
    },
}

/// Exact spherical-wave channel: every antenna pair uses its own distance,
/// NLoS paths through the exact specular point on the recovered reflector.
pub fn synth_swm(scene: &Scene) -> Result<ChannelMatrix> {
    let lambda = scene.lambda();
    let tx_pos = scene.tx().positions();
    let rx_pos = scene.rx().positions();
    let r1 = scene.rx_reference();
    let los = *scene.los();
    let mut routes = Vec::with_capacity(scene.paths().len());
    let mut refs = Vec::with_capacity(scene.paths().len());
    for (p, path) in scene.paths().iter().enumerate() {
        refs.push(path_gain(path.amp, path.dist, lambda)?);
        if p == 0 {
            routes.push(SwmPath::Los { r1 });
        } else {
            let rec = recover_reflector(&los, path)?;
            routes.push(SwmPath::Nlos {
                s_ref: rec.s_ref,
                rs: r1 - rec.s_ref,
                normal: rec.normal,
            });
        }
    }
    let scaled = scene.gain_model().amplitude_mode == AmplitudeMode::DistanceScaled;
    let paths = scene.paths();
    let entries = build_columns(rx_pos.len(), tx_pos.len(), |l| {
        let t = tx_pos[l];
        rx_pos
            .iter()
            .map(|r_off| {
                let mut acc = C64::new(0.0, 0.0);
                for (p, route) in routes.iter().enumerate() {
                    let excess = match route {
                        SwmPath::Los { r1 } => norm_increment(r1, &(r_off - t)),
                        SwmPath::Nlos { s_ref, rs, normal } => {
                            let delta = mirror_point_local(normal, &(t - s_ref), &(rs + r_off))?;
                            norm_increment(s_ref, &(delta - t)) + norm_increment(rs, &(r_off - delta))
                        }
                    };
                    let mut term = refs[p] * phasor(excess, lambda);
                    if scaled {
                        let d_ref = paths[p].dist;
                        term *= d_ref / (d_ref + excess);
                    }
                    acc += term;
                }
                Ok(acc)
            })
            .collect()
    })?;
    ChannelMatrix::new(entries, ModelKind::Swm, scene.fingerprint())
}

/// Planar-wave channel evaluated entry by entry from the planar path-length
/// approximation `D_ref - d (psi_t + psi_r)`.
pub fn pwm_elementwise(scene: &Scene) -> Result<ChannelMatrix> {
    let lambda = scene.lambda();
    let tx_grid = scene.tx().grid();
    let rx_grid = scene.rx().grid();
    let (dt, dr) = (scene.tx().d(), scene.rx().d());
    let psi = |(x, z): (i64, i64), theta: f64, phi: f64| {
        x as f64 * theta.sin() * phi.cos() - z as f64 * phi.sin()
    };
    let refs = scene
        .paths()
        .iter()
        .map(|p| path_gain(p.amp, p.dist, lambda))
        .collect::<Result<Vec<_>>>()?;
    let paths = scene.paths();
    let entries = build_columns(rx_grid.len(), tx_grid.len(), |l| {
        Ok(rx_grid
            .iter()
            .map(|&gi| {
                let mut acc = C64::new(0.0, 0.0);
                for (p, path) in paths.iter().enumerate() {
                    let excess = -(dt * psi(tx_grid[l], path.theta_t, path.phi_t)
                        + dr * psi(gi, path.theta_r, path.phi_r));
                    acc += refs[p] * phasor(excess, lambda);
                }
                acc
            })
            .collect())
    })?;
    ChannelMatrix::new(entries, ModelKind::Pwm, scene.fingerprint())
}

/// Planar-wave channel `sum_p g_p a_r a_t^T`.
pub fn synth_pwm(scene: &Scene) -> Result<ChannelMatrix> {
    let entries = pwm_matrix(scene.paths(), scene.tx(), scene.rx(), scene.lambda())?;
    ChannelMatrix::new(entries, ModelKind::Pwm, scene.fingerprint())
}

pub(crate) fn pwm_matrix(
    paths: &[crate::PathParams],
    tx: &ArrayLayout,
    rx: &ArrayLayout,
    lambda: f64,
) -> Result<CMatrix> {
    let mut terms = Vec::with_capacity(paths.len());
    for p in paths {
        terms.push((
            path_gain(p.amp, p.dist, lambda)?,
            array_response(rx, p.theta_r, p.phi_r, lambda),
            array_response(tx, p.theta_t, p.phi_t, lambda),
        ));
    }
    build_columns(rx.n(), tx.n(), |l| {
        Ok((0..rx.n())
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for (g, ar, at) in &terms {
                    acc += *g * (ar[i] * at[l]);
                }
                acc
            })
            .collect())
    })
}

/// Hybrid model: planar inside each subarray pair, with per-pair angles and
/// distances from the geometric extension of the ground-truth reference
/// parameters.
pub fn synth_hspm(scene: &Scene) -> Result<ChannelMatrix> {
    let reference = ReferenceParamsEstimate::from_scene(scene);
    let ext = extend_all(&reference, scene.tx(), scene.rx(), &NewtonConfig::default())?;
    let amps: Vec<f64> = scene.paths().iter().map(|p| p.amp).collect();
    let entries = reconstruct_hspm(&ext, &amps, scene.tx(), scene.rx(), scene.lambda())?;
    ChannelMatrix::new(entries.entries, ModelKind::Hspm, scene.fingerprint())
}

pub fn synth(scene: &Scene, model: ModelKind) -> Result<ChannelMatrix> {
    match model {
        ModelKind::Swm => synth_swm(scene),
        ModelKind::Pwm => synth_pwm(scene),
        ModelKind::Hspm => synth_hspm(scene),
    }
}

/// `20 log10(|A - B|_F / |B|_F)`, floored at -300 dB.
pub fn model_mismatch_db(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::invalid(format!(
            "dimension mismatch {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let den = b.norm();
    if den == 0.0 {
        return Err(Error::invalid("reference matrix has zero norm"));
    }
    Ok(ratio_db((a - b).norm(), den))
}

/// Largest entrywise `|a - b|` relative to the largest `|b|`.
pub fn max_relative_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
