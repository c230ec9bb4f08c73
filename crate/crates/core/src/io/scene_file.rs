use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_azimuth, ArrayLayout, GainModel, NlosAngles, Scene};
use crate::{Error, Result, SPEED_OF_LIGHT};

use super::{parse_json, read_text, write_bytes};

/// One side of the link. `d_m` defaults to half a wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutRecord {
    pub subarray_offsets: Vec<[u32; 2]>,
    pub na_x: usize,
    pub na_z: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LosRecord {
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
}

/// On-disk scene. Angles in radians, distances in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub frequency_hz: f64,
    pub tx: LayoutRecord,
    pub rx: LayoutRecord,
    pub d11_m: f64,
    pub los: LosRecord,
    #[serde(default)]
    pub nlos: Vec<NlosAngles>,
    #[serde(default)]
    pub gain_model: GainModel,
}

impl LayoutRecord {
    fn from_layout(l: &ArrayLayout) -> Self {
        Self {
            subarray_offsets: l.offsets().iter().map(|&(x, z)| [x, z]).collect(),
            na_x: l.na_x(),
            na_z: l.na_z(),
            d_m: Some(l.d()),
        }
    }

    fn to_layout(&self, side: &str, lambda: f64) -> Result<ArrayLayout> {
        let offsets = self.subarray_offsets.iter().map(|o| (o[0], o[1])).collect();
        ArrayLayout::new(offsets, self.na_x, self.na_z, self.d_m.unwrap_or(lambda / 2.0)).map_err(|e| match e {
            Error::Validation { field, message } => Error::validation(format!("{side}.{field}"), message),
            other => other,
        })
    }
}

impl SceneFile {
    pub fn from_scene(scene: &Scene) -> Self {
        let los = scene.los();
        Self {
            frequency_hz: scene.frequency(),
            tx: LayoutRecord::from_layout(scene.tx()),
            rx: LayoutRecord::from_layout(scene.rx()),
            d11_m: los.dist,
            los: LosRecord {
                theta_t: los.theta_t,
                phi_t: los.phi_t,
                theta_r: los.theta_r,
                phi_r: los.phi_r,
            },
            nlos: scene.nlos_angles(),
            gain_model: *scene.gain_model(),
        }
    }

    pub fn to_scene(&self) -> Result<Scene> {
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return Err(Error::validation("frequency_hz", "must be positive"));
        }
        let lambda = SPEED_OF_LIGHT / self.frequency_hz;
        let tx = self.tx.to_layout("tx", lambda)?;
        let rx = self.rx.to_layout("rx", lambda)?;
        let l = &self.los;
        if wrap_azimuth(l.theta_r + l.theta_t).abs() > 1e-9 {
            return Err(Error::validation("los.theta_r", "must equal -los.theta_t"));
        }
        if (l.phi_r + l.phi_t).abs() > 1e-9 {
            return Err(Error::validation("los.phi_r", "must equal -los.phi_t"));
        }
        Scene::from_angles(
            self.frequency_hz,
            tx,
            rx,
            self.d11_m,
            l.theta_t,
            l.phi_t,
            &self.nlos,
            self.gain_model,
        )
    }
}

/// Parses and validates scene JSON; `origin` only labels errors.
pub fn parse_scene(text: &str, origin: &Path) -> Result<Scene> {
    let file: SceneFile = parse_json(text, origin)?;
    file.to_scene()
}

pub fn load_scene(path: &Path) -> Result<Scene> {
    parse_scene(&read_text(path)?, path)
}

/// JSON text of a scene. Fails if the scene cannot be rebuilt exactly from
/// its reference angles, which is the only form the file stores.
pub fn scene_to_json(scene: &Scene) -> Result<String> {
    let file = SceneFile::from_scene(scene);
    let rebuilt = file.to_scene()?;
    if rebuilt.fingerprint() != scene.fingerprint() {
        return Err(Error::validation(
            "paths",
            "scene distances or amplitudes are not those implied by its angles",
        ));
    }
    let mut s = serde_json::to_string_pretty(&file).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn save_scene(path: &Path, scene: &Scene) -> Result<()> {
    write_bytes(path, scene_to_json(scene)?.as_bytes())
}
