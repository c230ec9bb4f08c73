use crate::{Error, Result, Vec3};

use super::{direction, rx_direction, PathParams, ReflectorPlane, Scene};

/// Smallest accepted magnitude for the denominators of the reflector recovery.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Reflection point on the plane through the origin with unit normal `n`,
/// for endpoints given relative to that origin.
pub fn mirror_point_local(n: &Vec3, t: &Vec3, r: &Vec3) -> Result<Vec3> {
    let st = n.dot(t);
    let sr = n.dot(r);
    if st == 0.0 || sr == 0.0 || st.signum() != sr.signum() {
        return Err(Error::NoSpecularPath(format!(
            "endpoints not strictly on the same side of the plane (signed distances {st:e}, {sr:e})"
        )));
    }
    let r_img = r - n * (2.0 * sr);
    let lambda = st / (st + sr);
    let p = t + (r_img - t) * lambda;
    Ok(p - n * n.dot(&p))
}

/// Specular point on `plane` for a path `t -> S -> r`: `r` is mirrored
/// through the plane and the segment `t -> r'` is intersected with it.
pub fn mirror_reflection_point(plane: &ReflectorPlane, t: &Vec3, r: &Vec3) -> Result<Vec3> {
    let n = plane.unit_normal();
    let origin = plane.project(t);
    Ok(origin + mirror_point_local(&n, &(t - origin), &(r - origin))?)
}

/// Angle between the actual outgoing direction at `s` and the mirror image
/// of the incoming direction. For coplanar rays this is the difference
/// between the angles of incidence and reflection.
pub fn specular_residual(plane: &ReflectorPlane, t: &Vec3, s: &Vec3, r: &Vec3) -> Result<f64> {
    let off = plane.signed_distance(s);
    if off.abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "reflection point is {off:e} m off the plane"
        )));
    }
    let a = s - t;
    let b = r - s;
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::invalid("reflection point coincides with an endpoint"));
    }
    let n = plane.unit_normal();
    let inc = a.normalize();
    let mirrored = inc - n * (2.0 * n.dot(&inc));
    let out = b.normalize();
    Ok(2.0 * (out - mirrored).norm().atan2((out + mirrored).norm()))
}

/// Reflector geometry recovered from a reference-pair path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredReflector {
    /// Reflection point for the reference antennas.
    pub s_ref: Vec3,
    /// Distance from the Tx reference antenna to `s_ref`.
    pub d_ref: f64,
    pub plane: ReflectorPlane,
    /// Unit normal of `plane`.
    pub normal: Vec3,
    /// `(a, b)` of the plane of incidence, normalized to `c = 1`.
    pub incidence: (f64, f64),
}

/// Recovers the reflection point and reflector plane of an NLoS path from
/// reference angles alone, given the LoS path.
///
/// The reflection point is placed with the law of sines in the horizontal
/// projection of the triangle Tx, Rx, S. The plane of incidence is spanned by
/// the departure and LoS directions. The reflector contains the bisector of
/// the incoming and outgoing propagation directions and is orthogonal to the
/// plane of incidence.
pub fn recover_reflector(los: &PathParams, path: &PathParams) -> Result<RecoveredReflector> {
    let d_xy = los.dist * los.phi_t.cos();
    let den = (path.theta_r + path.theta_t).sin() * path.phi_t.cos();
    if den.abs() < DEGENERACY_TOL {
        return Err(Error::degenerate("sin(theta_r + theta_t) cos(phi_t)", den));
    }
    let d_ref = d_xy * (path.theta_r - los.theta_r).sin() / den;
    if !(d_ref > 0.0) {
        return Err(Error::NoSpecularPath(format!(
            "rays do not meet in front of the arrays (distance {d_ref:e})"
        )));
    }
    let u_t = direction(path.theta_t, path.phi_t);
    let s_ref = u_t * d_ref;

    let m = u_t.cross(&direction(los.theta_t, los.phi_t));
    if m.z.abs() < DEGENERACY_TOL {
        return Err(Error::degenerate("incidence plane: C component", m.z));
    }
    let (a11, b11) = (m.x / m.z, m.y / m.z);

    let s = u_t - rx_direction(path.theta_r, path.phi_r);
    if s.norm() < DEGENERACY_TOL {
        return Err(Error::degenerate("bisector of incoming and outgoing rays", s.norm()));
    }
    let theta_s = s.x.atan2(s.y);
    let phi_s = (s.z / s.norm()).clamp(-1.0, 1.0).asin();
    let (sts, cts) = theta_s.sin_cos();
    let (sps, cps) = phi_s.sin_cos();
    let det = cps * (b11 * sts - a11 * cts);
    if det.abs() < DEGENERACY_TOL {
        return Err(Error::degenerate("reflector plane: Cramer determinant", det));
    }
    let a = (cts * cps - sps * b11) / det;
    let b = (sps * a11 - sts * cps) / det;
    let normal = Vec3::new(a, b, 1.0);
    let tilt = 1.0 / normal.norm();
    if tilt < ReflectorPlane::MIN_TILT {
        return Err(Error::degenerate("reflector plane: C component", tilt));
    }
    let plane = ReflectorPlane {
        a,
        b,
        c: 1.0,
        d: -normal.dot(&s_ref),
    };
    Ok(RecoveredReflector {
        s_ref,
        d_ref,
        plane,
        normal: normal * tilt,
        incidence: (a11, b11),
    })
}

/// [`recover_reflector`] for path `p` (0-based, `p >= 1`) of a scene.
pub fn reflector_from_reference_path(scene: &Scene, p: usize) -> Result<RecoveredReflector> {
    if p == 0 || p >= scene.paths().len() {
        return Err(Error::invalid(format!(
            "path index {p} is not an NLoS path of a scene with {} paths",
            scene.paths().len()
        )));
    }
    recover_reflector(&scene.paths()[0], &scene.paths()[p])
}
