//! Array layouts, scenes, reflector planes and single-bounce specular
//! geometry.

mod layout;
mod reflect;
mod scene;

pub use layout::ArrayLayout;
pub use reflect::{
    mirror_point_local, mirror_reflection_point, recover_reflector, reflector_from_reference_path,
    specular_residual, RecoveredReflector, DEGENERACY_TOL,
};

pub use scene::{AmplitudeMode, GainModel, NlosAngles, PathParams, Scene};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Tolerance for snapping inverse-trig arguments just outside [-1, 1].
pub const TRIG_CLAMP_TOL: f64 = 1e-12;

/// Unit vector leaving the Tx side at azimuth `theta`, elevation `phi`.
pub fn direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, ct * cp, sp)
}

/// Unit vector from the Rx reference antenna toward the last interaction
/// point of a path arriving at `(theta, phi)`, measured in the Rx facing frame.
pub fn rx_direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, -ct * cp, sp)
}

/// `(theta, phi)` of a Tx-side vector. Inverse of [`direction`].
pub fn tx_angles(v: &Vec3) -> (f64, f64) {
    (wrap_azimuth(v.x.atan2(v.y)), elevation(v))
}

/// `(theta, phi)` of an Rx-side vector pointing away from the receiver.
/// Inverse of [`rx_direction`].
pub fn rx_angles(v: &Vec3) -> (f64, f64) {
    (wrap_azimuth(v.x.atan2(-v.y)), elevation(v))
}

fn elevation(v: &Vec3) -> f64 {
    let h = v.x.hypot(v.y);
    v.z.atan2(h)
}

/// Wraps an azimuth into (-pi, pi].
pub fn wrap_azimuth(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// `asin` that snaps arguments within [`TRIG_CLAMP_TOL`] of the boundary and
/// rejects anything further out.
pub fn checked_asin(x: f64, what: &str) -> Result<f64> {
    Ok(clamp_unit(x, what)?.asin())
}

pub fn checked_acos(x: f64, what: &str) -> Result<f64> {
    Ok(clamp_unit(x, what)?.acos())
}

fn clamp_unit(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + TRIG_CLAMP_TOL {
        return Err(Error::degenerate(format!("{what}: argument outside [-1, 1]"), x));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `|x + e| - |x|` without cancellation.
pub fn norm_increment(x: &Vec3, e: &Vec3) -> f64 {
    let num = 2.0 * x.dot(e) + e.norm_squared();
    if num == 0.0 {
        return 0.0;
    }
    num / ((x + e).norm() + x.norm())
}

/// Plane `a x + b y + c z + d = 0`, stored with `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectorPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ReflectorPlane {
    /// Smallest accepted `|c| / |(a, b, c)|` before normalizing to `c = 1`.
    pub const MIN_TILT: f64 = 1e-6;

    /// Plane through `point` with normal `normal`, rescaled so `c = 1`.
    pub fn from_normal_point(normal: &Vec3, point: &Vec3) -> Result<Self> {
        let len = normal.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::degenerate("plane normal has zero length", len));
        }
        let ratio = normal.z.abs() / len;
        if ratio < Self::MIN_TILT {
            return Err(Error::degenerate(
                "plane nearly parallel to z: C component",
                ratio,
            ));
        }
        let n = normal / normal.z;
        Ok(Self {
            a: n.x,
            b: n.y,
            c: 1.0,
            d: -n.dot(point),
        })
    }

    /// Builds from raw coefficients, rescaling to `c = 1`.
    pub fn from_coefficients(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let n = Vec3::new(a, b, c);
        let len = n.norm();
        if !(len.is_finite() && len > 0.0) || !d.is_finite() {
            return Err(Error::validation("plane", "coefficients must be finite and (a, b, c) non-zero"));
        }
        if c.abs() / len < Self::MIN_TILT {
            return Err(Error::degenerate("plane nearly parallel to z: C component", c / len));
        }
        Ok(Self {
            a: a / c,
            b: b / c,
            c: 1.0,
            d: d / c,
        })
    }

    pub fn normal(&self) -> Vec3 {
        Vec3::new(self.a, self.b, self.c)
    }

    pub fn unit_normal(&self) -> Vec3 {
        self.normal().normalize()
    }

    /// `a x + b y + c z + d` at `p`.
    pub fn evaluate(&self, p: &Vec3) -> f64 {
        self.normal().dot(p) + self.d
    }

    /// Signed Euclidean distance from the plane, meters.
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.evaluate(p) / self.normal().norm()
    }

    /// Orthogonal projection of `p` onto the plane.
    pub fn project(&self, p: &Vec3) -> Vec3 {
        let n = self.unit_normal();
        p - n * self.signed_distance(p)
    }
}
