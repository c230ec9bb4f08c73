//! Random scenes for datasets and Monte Carlo runs.
//!
//! Scene `i` of a run with seed `s` is drawn from ChaCha20 seeded with `s`
//! on stream `i`, so any scene can be regenerated on its own and parallel
//! generation is order independent.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::estimation::{extend_all, NewtonConfig, ReferenceParamsEstimate};
use crate::experiment::LayoutSpec;
use crate::geometry::{tx_angles, ArrayLayout, GainModel, ReflectorPlane, Scene};
use crate::{Error, Result, Vec3, SPEED_OF_LIGHT};

/// Independent 64-bit seed number `index` of stream `stream` derived from
/// `seed` (ChaCha20, two words per index).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    /// Scene `i` uses `frequencies_hz[i % len]`.
    pub frequencies_hz: Vec<f64>,
    pub tx: LayoutSpec,
    pub rx: LayoutSpec,
    /// Rx reference antenna box, meters, `[lo, hi]` per axis.
    pub rx_x_m: [f64; 2],
    pub rx_y_m: [f64; 2],
    pub rx_z_m: [f64; 2],
    /// Number of tilted floor-like reflectors, one NLoS path each.
    pub n_reflectors: usize,
    /// Depth of each reflector below the Tx reference antenna.
    pub depth_m: [f64; 2],
    /// Largest `|a|`, `|b|` of the reflector normal `(a, b, 1)`.
    pub max_tilt: f64,
    pub refl_coeff: [f64; 2],
    #[serde(default)]
    pub gain_model: GainModel,
    pub max_attempts: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        let spec = LayoutSpec {
            subarrays_x: 2,
            subarrays_z: 2,
            na_x: 4,
            na_z: 4,
            spacing_lambda: 8.0,
        };
        Self {
            frequencies_hz: vec![0.2e12, 0.4e12, 0.8e12],
            tx: spec,
            rx: spec,
            rx_x_m: [-5.0, 5.0],
            rx_y_m: [10.0, 30.0],
            rx_z_m: [-1.0, 1.0],
            n_reflectors: 1,
            depth_m: [2.0, 4.0],
            max_tilt: 0.3,
            refl_coeff: [0.3, 0.9],
            gain_model: GainModel::default(),
            max_attempts: 1000,
        }
    }
}

fn check_interval(name: &str, r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
        return Err(Error::validation(name, "needs finite lo <= hi"));
    }
    Ok(())
}

fn uniform(rng: &mut ChaCha20Rng, r: [f64; 2]) -> f64 {
    r[0] + (r[1] - r[0]) * rng.random::<f64>()
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frequencies_hz.is_empty() || self.frequencies_hz.iter().any(|f| !(*f > 0.0)) {
            return Err(Error::validation("frequencies_hz", "need positive frequencies"));
        }
        check_interval("rx_x_m", self.rx_x_m)?;
        check_interval("rx_y_m", self.rx_y_m)?;
        check_interval("rx_z_m", self.rx_z_m)?;
        check_interval("depth_m", self.depth_m)?;
        check_interval("refl_coeff", self.refl_coeff)?;
        if self.rx_y_m[0] <= 0.0 {
            return Err(Error::validation("rx_y_m", "receiver must be in front of the transmitter"));
        }
        if self.depth_m[0] <= 0.0 {
            return Err(Error::validation("depth_m", "reflectors must lie below the transmitter"));
        }
        if !(self.refl_coeff[0] > 0.0 && self.refl_coeff[1] <= 1.0) {
            return Err(Error::validation("refl_coeff", "must lie in (0, 1]"));
        }
        if !(self.max_tilt >= 0.0) {
            return Err(Error::validation("max_tilt", "must be non-negative"));
        }
        if self.max_attempts == 0 {
            return Err(Error::validation("max_attempts", "must be positive"));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha20Rng, frequency: f64, tx: &ArrayLayout, rx: &ArrayLayout) -> Result<Scene> {
        let r1 = Vec3::new(uniform(rng, self.rx_x_m), uniform(rng, self.rx_y_m), uniform(rng, self.rx_z_m));
        let (theta, phi) = tx_angles(&r1);
        let mut planes = Vec::with_capacity(self.n_reflectors);
        for _ in 0..self.n_reflectors {
            let t = [-self.max_tilt, self.max_tilt];
            let n = Vec3::new(uniform(rng, t), uniform(rng, t), 1.0);
            let depth = uniform(rng, self.depth_m);
            let plane = ReflectorPlane::from_normal_point(&n, &Vec3::new(0.0, 0.0, -depth))?;
            planes.push((plane, uniform(rng, self.refl_coeff)));
        }
        let scene = Scene::from_reflectors(frequency, tx.clone(), rx.clone(), r1.norm(), theta, phi, &planes, self.gain_model)?;
        // Every antenna pair must still have a specular bounce.
        extend_all(&ReferenceParamsEstimate::from_scene(&scene), scene.tx(), scene.rx(), &NewtonConfig::default())?;
        Ok(scene)
    }
}

/// Scene `index` of the run seeded with `seed`. Draws that hit degenerate
/// geometry are rejected and redrawn.
pub fn sample_scene(cfg: &SamplerConfig, seed: u64, index: u64) -> Result<Scene> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let frequency = cfg.frequencies_hz[(index % cfg.frequencies_hz.len() as u64) as usize];
    let d = SPEED_OF_LIGHT / frequency / 2.0;
    let tx = cfg.tx.layout(d)?;
    let rx = cfg.rx.layout(d)?;
    let mut last = None;
    for _ in 0..cfg.max_attempts {
        match cfg.draw(&mut rng, frequency, &tx, &rx) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(Error::Numerical(format!(
        "no valid scene after {} attempts (last: {})",
        cfg.max_attempts,
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}
