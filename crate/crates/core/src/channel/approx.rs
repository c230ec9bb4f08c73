use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::geometry::{direction, norm_increment, ArrayLayout, Scene};
use crate::{Error, Result};

use super::{model_mismatch_db, phasor, synth_pwm, synth_swm};

/// Second-order angular weighting used by the closed-form error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularFactor {
    /// Exact second-order term of the distance expansion, including the
    /// `x z` cross term.
    Derived,
    /// `x^2 (sin^2 theta cos^2 phi + cos^2 theta) + z^2 cos^2 phi`, which
    /// agrees with `Derived` only at broadside.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormOptions {
    /// Multiplier in front of `|sin(.)|`; 2 is the phasor-difference identity.
    pub prefactor: f64,
    pub angular: AngularFactor,
}

impl Default for ClosedFormOptions {
    fn default() -> Self {
        Self {
            prefactor: 2.0,
            angular: AngularFactor::Derived,
        }
    }
}

impl ClosedFormOptions {
    /// The closed form exactly as printed: prefactor 1, printed angles.
    pub fn printed() -> Self {
        Self {
            prefactor: 1.0,
            angular: AngularFactor::Printed,
        }
    }
}

fn lookup(layout: &ArrayLayout, i: usize, side: &str) -> Result<(i64, i64)> {
    layout.grid().get(i).copied().ok_or_else(|| {
        Error::invalid(format!("{side} antenna index {i} out of range (N = {})", layout.n()))
    })
}

/// `|exp(-j k D_il) - exp(-j k (D_11 + dD_il))|` for the LoS path, where
/// `dD_il` is the planar path-length correction. `i` indexes Rx antennas,
/// `l` Tx antennas.
pub fn pairwise_error_numeric(scene: &Scene, i: usize, l: usize) -> Result<f64> {
    let tx = scene.tx().positions();
    let rx = scene.rx().positions();
    let t = tx.get(l).ok_or_else(|| Error::invalid(format!("Tx antenna index {l} out of range")))?;
    let r = rx.get(i).ok_or_else(|| Error::invalid(format!("Rx antenna index {i} out of range")))?;
    Ok(numeric_entry(scene, t, r))
}

fn numeric_entry(scene: &Scene, t: &crate::Vec3, r: &crate::Vec3) -> f64 {
    let los = scene.los();
    let lambda = scene.lambda();
    let delta = r - t;
    let exact = norm_increment(&scene.rx_reference(), &delta);
    let planar = direction(los.theta_t, los.phi_t).dot(&delta);
    (phasor(exact, lambda) - phasor(planar, lambda)).norm()
}

/// Closed-form second-order approximation of [`pairwise_error_numeric`].
pub fn pairwise_error_closed_form(
    scene: &Scene,
    i: usize,
    l: usize,
    opts: ClosedFormOptions,
) -> Result<f64> {
    let (xr, zr) = lookup(scene.rx(), i, "Rx")?;
    let (xt, zt) = lookup(scene.tx(), l, "Tx")?;
    if scene.tx().d() != scene.rx().d() {
        return Err(Error::invalid("closed form assumes equal spacing on both sides"));
    }
    let los = scene.los();
    let x = (xr - xt) as f64;
    let z = (zr - zt) as f64;
    let (st, ct) = los.theta_t.sin_cos();
    let (sp, cp) = los.phi_t.sin_cos();
    let q = match opts.angular {
        AngularFactor::Derived => {
            x * x * (ct * ct + st * st * sp * sp) + z * z * cp * cp + 2.0 * x * z * st * cp * sp
        }
        AngularFactor::Printed => x * x * (st * st * cp * cp + ct * ct) + z * z * cp * cp,
    };
    let d = scene.tx().d();
    let arg = PI * d * d / (2.0 * los.dist * scene.lambda()) * q;
    Ok(opts.prefactor * arg.sin().abs())
}

fn extent(layout: &ArrayLayout) -> f64 {
    let (mx, mz) = layout.max_offset();
    let x = (mx + 1) as f64 + layout.na_x() as f64;
    let z = (mz + 1) as f64 + layout.na_z() as f64;
    x.hypot(z)
}

/// `pi d^2 L_t L_r / (lambda D_11)`. The aperture `L` counts the largest
/// subarray offset from one, so a single antenna has `L = 2 sqrt 2`.
pub fn farfield_metric(scene: &Scene) -> f64 {
    let d = scene.tx().d();
    PI * d * d * extent(scene.tx()) * extent(scene.rx()) / (scene.lambda() * scene.los().dist)
}

/// Numeric planar-wave error grid for the LoS path and overall mismatch.
#[derive(Debug, Clone)]
pub struct ApproxErrorReport {
    /// `N_r x N_t`; each entry lies in [0, 2].
    pub grid: DMatrix<f64>,
    pub frobenius_rel_db: f64,
    pub farfield_metric: f64,
}

pub fn approx_error_report(scene: &Scene) -> Result<ApproxErrorReport> {
    let tx = scene.tx().positions();
    let rx = scene.rx().positions();
    let grid = DMatrix::from_fn(rx.len(), tx.len(), |i, l| numeric_entry(scene, &tx[l], &rx[i]));
    let swm = synth_swm(scene)?;
    let pwm = synth_pwm(scene)?;
    Ok(ApproxErrorReport {
        grid,
        frobenius_rel_db: model_mismatch_db(&pwm.entries, &swm.entries)?,
        farfield_metric: farfield_metric(scene),
    })
}
