use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result, Vec3, SPEED_OF_LIGHT};

use super::{
    direction, mirror_reflection_point, recover_reflector, rx_angles, rx_direction, tx_angles,
    wrap_azimuth, ArrayLayout, ReflectorPlane,
};

/// Reference-pair parameters of one propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathParams {
    pub amp: f64,
    pub dist: f64,
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
}

impl PathParams {
    /// Checks ranges; `idx` only decorates the error.
    pub fn validate(&self, idx: usize) -> Result<()> {
        let field = |f: &str| format!("paths[{idx}].{f}");
        let fields = [
            ("amp", self.amp),
            ("dist", self.dist),
            ("theta_t", self.theta_t),
            ("phi_t", self.phi_t),
            ("theta_r", self.theta_r),
            ("phi_r", self.phi_r),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::validation(field(name), "must be finite"));
            }
        }
        if !(self.amp > 0.0 && self.amp <= 1.0) {
            return Err(range(field("amp"), self.amp, 0.0, 1.0));
        }
        if !(self.dist > 0.0) {
            return Err(range(field("dist"), self.dist, 0.0, f64::INFINITY));
        }
        for (name, v) in [("theta_t", self.theta_t), ("theta_r", self.theta_r)] {
            if !(v > -PI && v <= PI) {
                return Err(range(field(name), v, -PI, PI));
            }
        }
        for (name, v) in [("phi_t", self.phi_t), ("phi_r", self.phi_r)] {
            if !(v > -FRAC_PI_2 && v < FRAC_PI_2) {
                return Err(range(field(name), v, -FRAC_PI_2, FRAC_PI_2));
            }
        }
        Ok(())
    }
}

fn range(field: String, value: f64, lo: f64, hi: f64) -> Error {
    Error::Range {
        field,
        value,
        lo,
        hi,
    }
}

/// How per-antenna-pair amplitudes of the spherical model relate to the
/// reference amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    /// Every pair shares the reference amplitude.
    #[default]
    Equal,
    /// Amplitude scales as `D_ref / D`.
    DistanceScaled,
}

/// Parametric path gain: `refl * lambda / (4 pi D) * exp(-k_abs D / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GainModel {
    #[serde(default)]
    pub k_abs: f64,
    #[serde(default)]
    pub amplitude_mode: AmplitudeMode,
}

impl GainModel {
    pub fn amplitude(&self, refl: f64, dist: f64, lambda: f64) -> f64 {
        refl * lambda / (4.0 * PI * dist) * (-self.k_abs * dist / 2.0).exp()
    }

    /// Distance whose modelled amplitude equals `amp`.
    pub fn invert(&self, amp: f64, refl: f64, lambda: f64) -> Result<f64> {
        if !(amp > 0.0 && refl > 0.0 && lambda > 0.0) {
            return Err(Error::invalid("amplitude inversion needs positive inputs"));
        }
        let free = refl * lambda / (4.0 * PI * amp);
        if self.k_abs == 0.0 {
            return Ok(free);
        }
        // The amplitude is strictly decreasing in D and the root lies below `free`.
        let (mut lo, mut hi) = (0.0, free);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.amplitude(refl, mid, lambda) > amp {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Angles of an NLoS path for the reference antennas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlosAngles {
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
    pub refl_coeff: f64,
}

/// A multipath scene between two arrays. Path 0 is the LoS path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    frequency: f64,
    tx: ArrayLayout,
    rx: ArrayLayout,
    paths: Vec<PathParams>,
    refl_coeffs: Vec<f64>,
    gain_model: GainModel,
}

impl Scene {
    /// `refl_coeffs` holds one reflection coefficient per NLoS path.
    pub fn new(
        frequency: f64,
        tx: ArrayLayout,
        rx: ArrayLayout,
        paths: Vec<PathParams>,
        refl_coeffs: Vec<f64>,
        gain_model: GainModel,
    ) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::validation("frequency_hz", "must be positive"));
        }
        let lambda = SPEED_OF_LIGHT / frequency;
        for (name, l) in [("tx.d", &tx), ("rx.d", &rx)] {
            if (l.d() - lambda / 2.0).abs() > 1e-9 * lambda {
                return Err(Error::validation(
                    name,
                    format!("antenna spacing d = {} m must equal lambda/2 = {} m", l.d(), lambda / 2.0),
                ));
            }
        }
        if paths.is_empty() {
            return Err(Error::validation("paths", "need at least the LoS path"));
        }
        if refl_coeffs.len() + 1 != paths.len() {
            return Err(Error::validation(
                "refl_coeff",
                "one reflection coefficient per NLoS path",
            ));
        }
        for (i, p) in paths.iter().enumerate() {
            p.validate(i)?;
        }
        let los = &paths[0];
        if wrap_azimuth(los.theta_r + los.theta_t).abs() > 1e-9 || (los.phi_r + los.phi_t).abs() > 1e-9 {
            return Err(Error::validation(
                "los",
                "LoS arrival angles must be (-theta_t, -phi_t)",
            ));
        }
        for (i, g) in refl_coeffs.iter().enumerate() {
            if !(*g > 0.0 && *g <= 1.0) {
                return Err(range(format!("nlos[{i}].refl_coeff"), *g, 0.0, 1.0));
            }
        }
        if !(gain_model.k_abs.is_finite() && gain_model.k_abs >= 0.0) {
            return Err(Error::validation("gain_model.k_abs", "must be non-negative"));
        }
        Ok(Self {
            frequency,
            tx,
            rx,
            paths,
            refl_coeffs,
            gain_model,
        })
    }

    /// Builds a scene from reference angles. NLoS distances follow from the
    /// reflector geometry and amplitudes from the gain model.
    pub fn from_angles(
        frequency: f64,
        tx: ArrayLayout,
        rx: ArrayLayout,
        d11: f64,
        los_theta_t: f64,
        los_phi_t: f64,
        nlos: &[NlosAngles],
        gain_model: GainModel,
    ) -> Result<Self> {
        if !(d11.is_finite() && d11 > 0.0) {
            return Err(Error::validation("d11_m", "must be positive"));
        }
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::validation("frequency_hz", "must be positive"));
        }
        let lambda = SPEED_OF_LIGHT / frequency;
        let los = PathParams {
            amp: gain_model.amplitude(1.0, d11, lambda),
            dist: d11,
            theta_t: los_theta_t,
            phi_t: los_phi_t,
            theta_r: wrap_azimuth(-los_theta_t),
            phi_r: -los_phi_t,
        };
        los.validate(0)?;
        let r1 = direction(los_theta_t, los_phi_t) * d11;
        let mut paths = vec![los];
        let mut refl = Vec::with_capacity(nlos.len());
        for (i, a) in nlos.iter().enumerate() {
            let mut p = PathParams {
                amp: 1.0,
                dist: 1.0,
                theta_t: a.theta_t,
                phi_t: a.phi_t,
                theta_r: a.theta_r,
                phi_r: a.phi_r,
            };
            p.validate(i + 1)?;
            let rec = recover_reflector(&los, &p)?;
            // The Rx ray must pass through the point found from the Tx ray.
            let back = rx_direction(a.theta_r, a.phi_r);
            let w = rec.s_ref - r1;
            let miss = (w - back * w.dot(&back)).norm();
            if miss > 1e-6 * d11 || w.dot(&back) <= 0.0 {
                return Err(Error::validation(
                    format!("nlos[{i}]"),
                    format!("departure and arrival rays do not intersect (miss {miss:e} m)"),
                ));
            }
            p.dist = rec.d_ref + w.norm();
            p.amp = gain_model.amplitude(a.refl_coeff, p.dist, lambda);
            paths.push(p);
            refl.push(a.refl_coeff);
        }
        Self::new(frequency, tx, rx, paths, refl, gain_model)
    }

    /// Builds a scene from physical reflector planes: each NLoS path is the
    /// specular bounce between the reference antennas.
    pub fn from_reflectors(
        frequency: f64,
        tx: ArrayLayout,
        rx: ArrayLayout,
        d11: f64,
        los_theta_t: f64,
        los_phi_t: f64,
        reflectors: &[(ReflectorPlane, f64)],
        gain_model: GainModel,
    ) -> Result<Self> {
        let r1 = direction(los_theta_t, los_phi_t) * d11;
        let mut nlos = Vec::with_capacity(reflectors.len());
        for (plane, g) in reflectors {
            let s = mirror_reflection_point(plane, &Vec3::zeros(), &r1)?;
            let (theta_t, phi_t) = tx_angles(&s);
            let (theta_r, phi_r) = rx_angles(&(s - r1));
            nlos.push(NlosAngles {
                theta_t,
                phi_t,
                theta_r,
                phi_r,
                refl_coeff: *g,
            });
        }
        Self::from_angles(
            frequency, tx, rx, d11, los_theta_t, los_phi_t, &nlos, gain_model,
        )
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn lambda(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda()
    }

    pub fn tx(&self) -> &ArrayLayout {
        &self.tx
    }

    pub fn rx(&self) -> &ArrayLayout {
        &self.rx
    }

    pub fn paths(&self) -> &[PathParams] {
        &self.paths
    }

    pub fn los(&self) -> &PathParams {
        &self.paths[0]
    }

    pub fn refl_coeffs(&self) -> &[f64] {
        &self.refl_coeffs
    }

    pub fn gain_model(&self) -> &GainModel {
        &self.gain_model
    }

    /// NLoS angles as stored, for re-serialization.
    pub fn nlos_angles(&self) -> Vec<NlosAngles> {
        self.paths[1..]
            .iter()
            .zip(&self.refl_coeffs)
            .map(|(p, g)| NlosAngles {
                theta_t: p.theta_t,
                phi_t: p.phi_t,
                theta_r: p.theta_r,
                phi_r: p.phi_r,
                refl_coeff: *g,
            })
            .collect()
    }

    /// Rx reference antenna in the Tx frame.
    pub fn rx_reference(&self) -> Vec3 {
        let los = self.los();
        direction(los.theta_t, los.phi_t) * los.dist
    }

    pub fn tx_antenna_position(&self, k: usize, n_x: usize, n_z: usize) -> Result<Vec3> {
        self.tx.antenna_position(k, n_x, n_z)
    }

    /// Rx antenna position in the Tx frame.
    pub fn rx_antenna_position(&self, k: usize, n_x: usize, n_z: usize) -> Result<Vec3> {
        Ok(self.rx_reference() + self.rx.antenna_position(k, n_x, n_z)?)
    }

    /// Same paths with different layouts; spacing must still be lambda/2.
    pub fn with_layouts(&self, tx: ArrayLayout, rx: ArrayLayout) -> Result<Self> {
        Self::new(
            self.frequency,
            tx,
            rx,
            self.paths.clone(),
            self.refl_coeffs.clone(),
            self.gain_model,
        )
    }

    /// The scene with Tx and Rx roles exchanged.
    pub fn reversed(&self) -> Result<Self> {
        let paths = self
            .paths
            .iter()
            .map(|p| PathParams {
                amp: p.amp,
                dist: p.dist,
                theta_t: p.theta_r,
                phi_t: p.phi_r,
                theta_r: p.theta_t,
                phi_r: p.phi_t,
            })
            .collect();
        Self::new(
            self.frequency,
            self.rx.clone(),
            self.tx.clone(),
            paths,
            self.refl_coeffs.clone(),
            self.gain_model,
        )
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scene serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
