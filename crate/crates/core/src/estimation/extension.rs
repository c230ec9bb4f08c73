use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::geometry::{
    checked_asin, direction, norm_increment, recover_reflector, rx_angles, tx_angles, wrap_azimuth,
    ArrayLayout, PathParams, RecoveredReflector,
};
use crate::{Error, Result, Vec3};

use super::newton::{newton_solve, NewtonConfig};
use super::ReferenceParamsEstimate;

/// Parameters of one path for one subarray pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedEntry {
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
    pub dist: f64,
    /// `dist` minus the reference distance, computed without cancellation.
    pub excess: f64,
    /// Reflection point in the Tx frame (NLoS only).
    pub reflection: Option<Vec3>,
    /// Newton iterations spent (NLoS only).
    pub iterations: usize,
}

impl ExtendedEntry {
    fn reference(p: &PathParams, reflection: Option<Vec3>) -> Self {
        Self {
            theta_t: p.theta_t,
            phi_t: p.phi_t,
            theta_r: p.theta_r,
            phi_r: p.phi_r,
            dist: p.dist,
            excess: 0.0,
            reflection,
            iterations: 0,
        }
    }
}

/// LoS parameters for a subarray pair whose reference antennas are offset by
/// `delta_dx = d_tx - d_rx` horizontally and `delta_dz = d_rz - d_tz`
/// vertically (offsets measured downward), so the pair vector is
/// `R_1 + (-delta_dx, 0, -delta_dz)`.
///
/// The horizontal projection is handled first with the law of cosines, then
/// the vertical step in the plane spanned by the new horizontal direction and
/// z. Both distance expressions are cross-checked. The distance is returned
/// as `D_11` plus the law-of-cosines increment in cancellation-free form.
pub fn extend_los(los: &PathParams, delta_dx: f64, delta_dz: f64) -> Result<ExtendedEntry> {
    if delta_dx == 0.0 && delta_dz == 0.0 {
        return Ok(ExtendedEntry::reference(los, None));
    }
    let (st, ct) = los.theta_t.sin_cos();
    let (sp, cp) = los.phi_t.sin_cos();
    let d11 = los.dist;
    let d_xy = d11 * cp;
    let d_xy_new_sq = d_xy * d_xy + delta_dx * delta_dx - 2.0 * delta_dx * d_xy * st;
    if !(d_xy_new_sq > 0.0) {
        return Err(Error::degenerate("horizontal projection of the LoS distance", d_xy_new_sq));
    }
    let d_xy_new = d_xy_new_sq.sqrt();
    let theta_t = los.theta_t - checked_asin(delta_dx * ct / d_xy_new, "LoS azimuth shift")?;

    let h = d11 * sp;
    let d_v = d_xy_new.hypot(h);
    let phi_v = h.atan2(d_xy_new);
    let d_new_sq = delta_dz * delta_dz + d_v * d_v - 2.0 * delta_dz * d_v * phi_v.sin();
    if !(d_new_sq > 0.0) {
        return Err(Error::degenerate("LoS distance", d_new_sq));
    }
    let d_new = d_new_sq.sqrt();
    let phi_t = phi_v - checked_asin(delta_dz * phi_v.cos() / d_new, "LoS elevation shift")?;

    let via_xy = d_xy_new / phi_t.cos();
    if ((via_xy - d_new) / d_new).abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "LoS distance expressions disagree: {via_xy} vs {d_new}"
        )));
    }

    let r1 = direction(los.theta_t, los.phi_t) * d11;
    let excess = norm_increment(&r1, &Vec3::new(-delta_dx, 0.0, -delta_dz));
    Ok(ExtendedEntry {
        theta_t: wrap_azimuth(theta_t),
        phi_t,
        theta_r: wrap_azimuth(los.theta_r - (theta_t - los.theta_t)),
        phi_r: los.phi_r - (phi_t - los.phi_t),
        dist: d11 + excess,
        excess,
        reflection: None,
        iterations: 0,
    })
}

/// NLoS parameters for the pair with Tx subarray offset `t_off` and Rx
/// subarray offset `r_off` (local array coordinates).
pub fn extend_nlos(
    reference: &ReferenceParamsEstimate,
    p: usize,
    t_off: &Vec3,
    r_off: &Vec3,
    cfg: &NewtonConfig,
) -> Result<ExtendedEntry> {
    if p == 0 || p >= reference.paths.len() {
        return Err(Error::invalid(format!("path {p} is not an NLoS path")));
    }
    let los = &reference.paths[0];
    let path = &reference.paths[p];
    let rec = recover_reflector(los, path)?;
    extend_nlos_with(&rec, los, path, t_off, r_off, cfg)
}

/// [`extend_nlos`] with the reflector already recovered.
///
/// The unknown is the displacement `delta` of the reflection point from the
/// reference one. The residual stacks the specular condition (equal direction
/// cosines against the normal), coplanarity of `S` with the plane through
/// `T`, `R` and the normal, and membership in the reflector plane. Newton
/// starts at `delta = 0`.
pub fn extend_nlos_with(
    rec: &RecoveredReflector,
    los: &PathParams,
    path: &PathParams,
    t_off: &Vec3,
    r_off: &Vec3,
    cfg: &NewtonConfig,
) -> Result<ExtendedEntry> {
    if t_off.norm() == 0.0 && r_off.norm() == 0.0 {
        return Ok(ExtendedEntry::reference(path, Some(rec.s_ref)));
    }
    let n = rec.normal;
    let r1 = direction(los.theta_t, los.phi_t) * los.dist;
    let rs = r1 - rec.s_ref;
    // S - T = a + delta, S - R = b + delta.
    let a = rec.s_ref - t_off;
    let b = -(rs + r_off);
    let sides = (n.dot(&a), n.dot(&b));
    if sides.0 == 0.0 || sides.1 == 0.0 || sides.0.signum() != sides.1.signum() {
        return Err(Error::NoSpecularPath(format!(
            "subarray reference antennas lie on opposite sides of the reflector ({:e}, {:e})",
            sides.0, sides.1
        )));
    }
    let rt = r1 + r_off - t_off;
    let c = n.cross(&rt) / rt.norm();

    let residual = |d: &Vec3| {
        let wt = a + d;
        let wr = b + d;
        Vec3::new(n.dot(&wt) / wt.norm() - n.dot(&wr) / wr.norm(), wt.dot(&c), n.dot(d))
    };
    let grad = |w: &Vec3| {
        let len = w.norm();
        n / len - w * (n.dot(w) / (len * len * len))
    };
    let jacobian = |d: &Vec3| {
        let g = grad(&(a + d)) - grad(&(b + d));
        Matrix3::from_rows(&[g.transpose(), c.transpose(), n.transpose()])
    };
    let sol = newton_solve(&residual, Some(&jacobian), Vec3::zeros(), cfg)?;
    let project = |d: Vec3| d - n * n.dot(&d);
    let mut delta = project(sol.x);
    // One extra step from the projected point, then back onto the plane.
    if let Some(step) = jacobian(&delta).lu().solve(&residual(&delta)) {
        let polished = project(delta - step);
        if residual(&polished).norm() <= residual(&delta).norm() {
            delta = polished;
        }
    }
    let wt = a + delta;
    let wr = b + delta;
    if wt.norm() == 0.0 || wr.norm() == 0.0 {
        return Err(Error::degenerate("reflection point coincides with an antenna", 0.0));
    }
    let (theta_t, phi_t) = tx_angles(&wt);
    let (theta_r, phi_r) = rx_angles(&wr);
    let excess = norm_increment(&rec.s_ref, &(delta - t_off)) + norm_increment(&rs, &(r_off - delta));
    Ok(ExtendedEntry {
        theta_t,
        phi_t,
        theta_r,
        phi_r,
        dist: path.dist + excess,
        excess,
        reflection: Some(rec.s_ref + delta),
        iterations: sol.iterations,
    })
}

/// Extended parameters for every `(k_t, k_r, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedParams {
    pub reference: ReferenceParamsEstimate,
    pub k_t: usize,
    pub k_r: usize,
    entries: Vec<ExtendedEntry>,
}

impl ExtendedParams {
    pub fn n_paths(&self) -> usize {
        self.reference.paths.len()
    }

    pub fn get(&self, k_t: usize, k_r: usize, p: usize) -> Option<&ExtendedEntry> {
        if k_t >= self.k_t || k_r >= self.k_r || p >= self.n_paths() {
            return None;
        }
        self.entries.get((k_r * self.k_t + k_t) * self.n_paths() + p)
    }

    pub fn entries(&self) -> &[ExtendedEntry] {
        &self.entries
    }

    /// Builds from entries ordered by `(k_r, k_t, p)`.
    pub fn from_entries(
        reference: ReferenceParamsEstimate,
        k_t: usize,
        k_r: usize,
        entries: Vec<ExtendedEntry>,
    ) -> Result<Self> {
        if entries.len() != k_t * k_r * reference.paths.len() {
            return Err(Error::invalid(format!(
                "expected {} extended entries, got {}",
                k_t * k_r * reference.paths.len(),
                entries.len()
            )));
        }
        Ok(Self {
            reference,
            k_t,
            k_r,
            entries,
        })
    }
}

/// Runs the extension for all subarray pairs and paths.
pub fn extend_all(
    reference: &ReferenceParamsEstimate,
    tx: &ArrayLayout,
    rx: &ArrayLayout,
    cfg: &NewtonConfig,
) -> Result<ExtendedParams> {
    reference.validate()?;
    let los = reference.paths[0];
    let reflectors = reference.paths[1..]
        .iter()
        .map(|p| recover_reflector(&los, p))
        .collect::<Result<Vec<_>>>()?;
    let (kt, kr) = (tx.k(), rx.k());
    let blocks: Vec<Vec<ExtendedEntry>> = (0..kt * kr)
        .into_par_iter()
        .map(|idx| {
            let (k_r, k_t) = (idx / kt, idx % kt);
            let t_off = tx.subarray_offset(k_t)?;
            let r_off = rx.subarray_offset(k_r)?;
            let mut out = Vec::with_capacity(reference.paths.len());
            out.push(extend_los(&los, t_off.x - r_off.x, t_off.z - r_off.z)?);
            for (rec, path) in reflectors.iter().zip(&reference.paths[1..]) {
                out.push(extend_nlos_with(rec, &los, path, &t_off, &r_off, cfg)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    ExtendedParams::from_entries(reference.clone(), kt, kr, blocks.into_iter().flatten().collect())
}
