//! Training-set export.
//!
//! `samples.bin` holds `num_samples` tensors of shape `sample_shape`
//! (row-major, channel last, channels `Re y`, `Im y`, `|y|`) as
//! little-endian `f32`. `labels.bin` holds `num_samples` vectors of
//! `label_dim` little-endian `f32` values, fields `LABEL_FIELDS` repeated per
//! path, each min-max normalized with the range recorded in the manifest.
//! Sample `s` is scene `s / snr_db.len()` at SNR `snr_db[s % snr_db.len()]`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{synth, ModelKind};
use crate::experiment::CodebookSpec;
use crate::sampler::{derive_seed, sample_scene, SamplerConfig};
use crate::signal::{normalize_minmax, stack_observations, tensorize};
use crate::{Error, Result, Scene};

use super::{read_json, write_json};

pub const LABEL_FIELDS: [&str; 6] = ["amp", "dist", "theta_t", "phi_t", "theta_r", "phi_r"];
const SAMPLE_CHANNELS: [&str; 3] = ["re", "im", "abs"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub num_scenes: usize,
    #[serde(default)]
    pub sampler: SamplerConfig,
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub codebook: CodebookSpec,
    #[serde(default = "default_truth")]
    pub truth: ModelKind,
}

fn default_truth() -> ModelKind {
    ModelKind::Hspm
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            num_scenes: 1000,
            sampler: SamplerConfig::default(),
            snr_db: vec![-20.0, -10.0, 0.0, 10.0],
            codebook: CodebookSpec::default(),
            truth: ModelKind::Hspm,
        }
    }
}

/// Normalized value `u` maps back to `lo + u (hi - lo)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRange {
    pub field: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub dtype: String,
    pub endianness: String,
    pub sample_shape: [usize; 3],
    pub sample_channels: Vec<String>,
    /// Observed min/max of every sample channel over the whole set.
    pub sample_ranges: Vec<FieldRange>,
    pub num_paths: usize,
    pub label_dim: usize,
    pub label_fields: Vec<String>,
    pub label_ranges: Vec<FieldRange>,
    pub num_scenes: usize,
    pub num_samples: usize,
    pub snr_db: Vec<f64>,
    pub truth_model: ModelKind,
    pub frequencies_hz: Vec<f64>,
    pub seed: u64,
    pub tx_codebook_seed: u64,
    pub rx_codebook_seed: u64,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.dtype != "float32" || self.endianness != "little" {
            return Err(Error::validation("dtype", "only little-endian float32 is supported"));
        }
        if self.sample_shape[2] != SAMPLE_CHANNELS.len() || self.sample_channels.len() != self.sample_shape[2] {
            return Err(Error::validation("sample_shape", "three channels expected"));
        }
        if self.label_dim != LABEL_FIELDS.len() * self.num_paths {
            return Err(Error::validation("label_dim", "must be 6 * num_paths"));
        }
        if self.num_samples != self.num_scenes * self.snr_db.len() {
            return Err(Error::validation("num_samples", "must be num_scenes * len(snr_db)"));
        }
        if self.label_ranges.len() != LABEL_FIELDS.len() {
            return Err(Error::validation("label_ranges", "one range per label field"));
        }
        for r in self.label_ranges.iter().chain(&self.sample_ranges) {
            if !(r.hi > r.lo) {
                return Err(Error::validation(format!("ranges.{}", r.field), "needs hi > lo"));
            }
        }
        Ok(())
    }

    pub fn sample_len(&self) -> usize {
        self.sample_shape.iter().product()
    }
}

pub fn read_manifest(dir: &Path) -> Result<DatasetManifest> {
    let m: DatasetManifest = read_json(&dir.join("manifest.json"))?;
    m.validate()?;
    Ok(m)
}

fn label_vector(scene: &Scene) -> Vec<f64> {
    scene
        .paths()
        .iter()
        .flat_map(|p| [p.amp, p.dist, p.theta_t, p.phi_t, p.theta_r, p.phi_r])
        .collect()
}

/// Min and max with a non-empty span.
fn span(values: impl Iterator<Item = f64>, field: &str) -> FieldRange {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        let pad = lo.abs().max(1e-300) * 1e-6;
        lo -= pad;
        hi += pad;
    }
    FieldRange {
        field: field.to_string(),
        lo,
        hi,
    }
}

fn write_f32(path: &Path, chunks: impl Iterator<Item = f64>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for v in chunks {
        w.write_all(&(v as f32).to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Samples scenes, observes each at every SNR and writes the three files.
/// Scenes and observations are generated in parallel; files are written in
/// sample order.
pub fn export_dataset(cfg: &DatasetConfig, out_dir: &Path, seed: u64) -> Result<DatasetManifest> {
    if cfg.num_scenes == 0 {
        return Err(Error::validation("num_scenes", "must be positive"));
    }
    if cfg.snr_db.is_empty() || cfg.snr_db.iter().any(|s| s.is_nan()) {
        return Err(Error::validation("snr_db", "need at least one SNR"));
    }
    cfg.sampler.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let tx_seed = derive_seed(seed, 1, 0);
    let rx_seed = derive_seed(seed, 2, 0);
    let nsnr = cfg.snr_db.len();

    let per_scene: Vec<(Vec<f64>, Vec<Vec<f64>>, [usize; 3])> = (0..cfg.num_scenes)
        .into_par_iter()
        .map(|i| {
            let scene = sample_scene(&cfg.sampler, seed, i as u64)?;
            let h = synth(&scene, cfg.truth)?;
            let (tcb, rcb) = cfg.codebook.build(scene.tx(), scene.rx(), tx_seed, rx_seed)?;
            let mut tensors = Vec::with_capacity(nsnr);
            let mut shape = [0; 3];
            for (j, &snr) in cfg.snr_db.iter().enumerate() {
                let noise = derive_seed(seed, 3, (i * nsnr + j) as u64);
                let t = tensorize(&stack_observations(&h, &tcb, &rcb, snr, noise)?);
                shape = t.shape;
                tensors.push(t.data);
            }
            Ok((label_vector(&scene), tensors, shape))
        })
        .collect::<Result<_>>()?;

    let shape = per_scene[0].2;
    let label_dim = per_scene[0].0.len();
    if per_scene.iter().any(|s| s.2 != shape || s.0.len() != label_dim) {
        return Err(Error::validation("sampler", "scenes differ in observation shape or path count"));
    }
    let num_paths = label_dim / LABEL_FIELDS.len();

    let field_values = |f: usize| per_scene.iter().flat_map(move |s| s.0.iter().skip(f).step_by(6).copied());
    let label_ranges = vec![
        span(field_values(0), "amp"),
        span(field_values(1), "dist"),
        FieldRange { field: "theta_t".into(), lo: -PI, hi: PI },
        FieldRange { field: "phi_t".into(), lo: -FRAC_PI_2, hi: FRAC_PI_2 },
        FieldRange { field: "theta_r".into(), lo: -PI, hi: PI },
        FieldRange { field: "phi_r".into(), lo: -FRAC_PI_2, hi: FRAC_PI_2 },
    ];
    let sample_ranges = (0..3)
        .map(|c| {
            span(
                per_scene.iter().flat_map(|s| s.1.iter().flat_map(move |t| t.iter().skip(c).step_by(3).copied())),
                SAMPLE_CHANNELS[c],
            )
        })
        .collect();

    let mut labels = Vec::with_capacity(cfg.num_scenes * nsnr * label_dim);
    for (i, s) in per_scene.iter().enumerate() {
        let mut norm = Vec::with_capacity(label_dim);
        for (k, v) in s.0.iter().enumerate() {
            let r = &label_ranges[k % 6];
            norm.extend(normalize_minmax(&[*v], r.lo, r.hi, &format!("scene {i} paths[{}].{}", k / 6, r.field))?);
        }
        for _ in 0..nsnr {
            labels.extend_from_slice(&norm);
        }
    }
    write_f32(&out_dir.join("samples.bin"), per_scene.iter().flat_map(|s| s.1.iter().flatten().copied()))?;
    write_f32(&out_dir.join("labels.bin"), labels.into_iter())?;

    let mut frequencies: Vec<f64> = cfg.sampler.frequencies_hz.clone();
    frequencies.truncate(cfg.num_scenes);
    let manifest = DatasetManifest {
        version: 1,
        dtype: "float32".into(),
        endianness: "little".into(),
        sample_shape: shape,
        sample_channels: SAMPLE_CHANNELS.iter().map(|s| s.to_string()).collect(),
        sample_ranges,
        num_paths,
        label_dim,
        label_fields: LABEL_FIELDS.iter().map(|s| s.to_string()).collect(),
        label_ranges,
        num_scenes: cfg.num_scenes,
        num_samples: cfg.num_scenes * nsnr,
        snr_db: cfg.snr_db.clone(),
        truth_model: cfg.truth,
        frequencies_hz: frequencies,
        seed,
        tx_codebook_seed: tx_seed,
        rx_codebook_seed: rx_seed,
    };
    manifest.validate()?;
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
