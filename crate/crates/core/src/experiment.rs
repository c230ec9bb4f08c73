//! Experiment drivers: model-mismatch sweeps, single estimation runs and
//! Monte Carlo evaluation. All of them are deterministic for fixed inputs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{farfield_metric, model_mismatch_db, synth, synth_hspm, synth_pwm, synth_swm, ModelKind};
use crate::estimation::{
    extend_all, nmse_db, omp_estimate, param_errors, phase1_grid, phase1_oracle, reconstruct_hspm, AngleGrid,
    GridConfig, NewtonConfig, Perturbation, ReferenceParamsEstimate,
};
use crate::geometry::{ArrayLayout, GainModel, ReflectorPlane, Scene};
use crate::sampler::{derive_seed, sample_scene, SamplerConfig};
use crate::signal::{random_codebook, stack_observations, Codebook, Side};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// A regular grid of identical subarrays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub subarrays_x: usize,
    pub subarrays_z: usize,
    pub na_x: usize,
    pub na_z: usize,
    /// Distance between neighbouring subarray reference antennas in
    /// wavelengths; must be a multiple of one half.
    pub spacing_lambda: f64,
}

impl LayoutSpec {
    /// Subarray pitch in antenna spacings.
    pub fn pitch(&self) -> Result<u32> {
        let p = 2.0 * self.spacing_lambda;
        if !(p >= 1.0 && (p - p.round()).abs() < 1e-9 && p <= u32::MAX as f64) {
            return Err(Error::validation(
                "spacing_lambda",
                format!("{} is not a positive multiple of 0.5", self.spacing_lambda),
            ));
        }
        let p = p.round() as u32;
        if (self.subarrays_x > 1 && (p as usize) < self.na_x) || (self.subarrays_z > 1 && (p as usize) < self.na_z) {
            return Err(Error::validation("spacing_lambda", "subarrays overlap"));
        }
        Ok(p)
    }

    pub fn layout(&self, d: f64) -> Result<ArrayLayout> {
        ArrayLayout::regular(self.subarrays_x, self.subarrays_z, self.pitch()?, self.na_x, self.na_z, d)
    }
}

/// Reflector `a x + b y + c z + d = 0` with its reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectorSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub refl_coeff: f64,
}

/// Scene description independent of the carrier: the reflectors are
/// physical planes and the subarray spacing is given in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneTemplate {
    pub frequency_hz: f64,
    pub tx: LayoutSpec,
    pub rx: LayoutSpec,
    pub d11_m: f64,
    pub theta_t: f64,
    pub phi_t: f64,
    #[serde(default)]
    pub reflectors: Vec<ReflectorSpec>,
    #[serde(default)]
    pub gain_model: GainModel,
}

impl SceneTemplate {
    /// 0.4 THz, 2x2 subarrays of 16x16 antennas 32 wavelengths apart on both
    /// sides, 20 m link and one tilted floor reflector 3 m below the Tx.
    pub fn baseline() -> Self {
        let spec = LayoutSpec {
            subarrays_x: 2,
            subarrays_z: 2,
            na_x: 16,
            na_z: 16,
            spacing_lambda: 32.0,
        };
        Self {
            frequency_hz: 0.4e12,
            tx: spec,
            rx: spec,
            d11_m: 20.0,
            theta_t: 20f64.to_radians(),
            phi_t: 5f64.to_radians(),
            reflectors: vec![ReflectorSpec {
                a: 0.2,
                b: -0.02,
                c: 1.0,
                d: 3.0,
                refl_coeff: 0.7,
            }],
            gain_model: GainModel::default(),
        }
    }

    pub fn build(&self) -> Result<Scene> {
        if !(self.frequency_hz > 0.0) {
            return Err(Error::validation("frequency_hz", "must be positive"));
        }
        let d = SPEED_OF_LIGHT / self.frequency_hz / 2.0;
        self.build_with(self.tx.layout(d)?, self.rx.layout(d)?, self.frequency_hz)
    }

    fn build_with(&self, tx: ArrayLayout, rx: ArrayLayout, frequency: f64) -> Result<Scene> {
        let planes = self
            .reflectors
            .iter()
            .map(|r| Ok((ReflectorPlane::from_coefficients(r.a, r.b, r.c, r.d)?, r.refl_coeff)))
            .collect::<Result<Vec<_>>>()?;
        Scene::from_reflectors(frequency, tx, rx, self.d11_m, self.theta_t, self.phi_t, &planes, self.gain_model)
    }

    /// The template at another carrier with subarray reference antennas at
    /// the same physical positions. Antenna counts per subarray are kept,
    /// the antenna spacing follows the new half wavelength and the pitch is
    /// rounded to whole antenna spacings.
    pub fn at_frequency(&self, frequency: f64) -> Result<Scene> {
        if !(frequency > 0.0) {
            return Err(Error::validation("frequency_hz", "must be positive"));
        }
        let d = SPEED_OF_LIGHT / frequency / 2.0;
        let scale = frequency / self.frequency_hz;
        let side = |s: &LayoutSpec| -> Result<ArrayLayout> {
            let pitch = ((s.pitch()? as f64) * scale).round().max(1.0) as u32;
            ArrayLayout::regular(s.subarrays_x, s.subarrays_z, pitch, s.na_x, s.na_z, d)
        };
        self.build_with(side(&self.tx)?, side(&self.rx)?, frequency)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Distance,
    Spacing,
    Frequency,
}

impl SweepAxis {
    pub fn header(&self) -> &'static str {
        match self {
            SweepAxis::Distance => "distance_m",
            SweepAxis::Spacing => "spacing_lambda",
            SweepAxis::Frequency => "frequency_hz",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Distance => "distance",
            SweepAxis::Spacing => "spacing",
            SweepAxis::Frequency => "frequency",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(SweepAxis::Distance),
            "spacing" => Ok(SweepAxis::Spacing),
            "frequency" => Ok(SweepAxis::Frequency),
            _ => Err(Error::invalid(format!("unknown sweep axis `{s}`"))),
        }
    }
}

/// One-dimensional sweep of a scene template. Distances in meters, spacings
/// in wavelengths, frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub points: Vec<f64>,
    pub template: SceneTemplate,
}

impl SweepConfig {
    /// Standard sweeps: distance 5-80 m, spacing 8-128 lambda, frequency 0.1-0.8 THz.
    pub fn standard(axis: SweepAxis) -> Self {
        let mut template = SceneTemplate::baseline();
        let points = match axis {
            SweepAxis::Distance => vec![5.0, 10.0, 20.0, 40.0, 80.0],
            SweepAxis::Spacing => {
                template.d11_m = 40.0;
                vec![8.0, 16.0, 32.0, 64.0, 128.0]
            }
            SweepAxis::Frequency => {
                template.d11_m = 40.0;
                template.frequency_hz = 0.1e12;
                for s in [&mut template.tx, &mut template.rx] {
                    s.na_x = 8;
                    s.na_z = 8;
                    s.spacing_lambda = 8.0;
                }
                vec![0.1e12, 0.2e12, 0.4e12, 0.8e12]
            }
        };
        Self { axis, points, template }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::validation("points", "need at least two points"));
        }
        if self.points.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::validation("points", "must be positive"));
        }
        if self.points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("points", "must be strictly increasing"));
        }
        Ok(())
    }

    pub fn scene_at(&self, value: f64) -> Result<Scene> {
        match self.axis {
            SweepAxis::Distance => SceneTemplate {
                d11_m: value,
                ..self.template.clone()
            }
            .build(),
            SweepAxis::Spacing => {
                let mut t = self.template.clone();
                t.tx.spacing_lambda = value;
                t.rx.spacing_lambda = value;
                t.build()
            }
            SweepAxis::Frequency => self.template.at_frequency(value),
        }
    }
}

/// Mismatches are `20 log10(|H - H_swm|_F / |H_swm|_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mismatch_pwm_db: f64,
    pub mismatch_hspm_db: f64,
    pub farfield_metric: f64,
}

pub fn sweep_row(scene: &Scene, value: f64) -> Result<SweepRow> {
    let s = synth_swm(scene)?;
    let p = synth_pwm(scene)?;
    let h = synth_hspm(scene)?;
    Ok(SweepRow {
        value,
        mismatch_pwm_db: model_mismatch_db(&p.entries, &s.entries)?,
        mismatch_hspm_db: model_mismatch_db(&h.entries, &s.entries)?,
        farfield_metric: farfield_metric(scene),
    })
}

/// Rows in the order of `cfg.points`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.points
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            cfg.scene_at(v)
                .and_then(|s| sweep_row(&s, v))
                .map_err(|e| with_context(e, &format!("points[{i}] = {v}")))
        })
        .collect()
}

/// Prefixes `ctx` while keeping the exit-code class of `e`.
fn with_context(e: Error, ctx: &str) -> Error {
    if e.exit_code() == 3 {
        Error::Numerical(format!("{ctx}: {e}"))
    } else {
        Error::validation(ctx, e.to_string())
    }
}

pub fn write_sweep_csv(path: &Path, axis: SweepAxis, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record([axis.header(), "mismatch_pwm_db", "mismatch_hspm_db", "farfield_metric"])
        .map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            r.value.to_string(),
            r.mismatch_pwm_db.to_string(),
            r.mismatch_hspm_db.to_string(),
            r.farfield_metric.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Numerical(format!("csv: {other:?}")),
    }
}

/// How the reference-pair parameters are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase1Method {
    Oracle,
    Grid,
    Omp,
    External,
}

impl fmt::Display for Phase1Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase1Method::Oracle => "oracle",
            Phase1Method::Grid => "grid",
            Phase1Method::Omp => "omp",
            Phase1Method::External => "external",
        })
    }
}

impl FromStr for Phase1Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Phase1Method::Oracle),
            "grid" => Ok(Phase1Method::Grid),
            "omp" => Ok(Phase1Method::Omp),
            "external" => Ok(Phase1Method::External),
            _ => Err(Error::invalid(format!("unknown phase-1 method `{s}`"))),
        }
    }
}

/// Beam-sweeping codebooks. `n_s` defaults to one stream per subarray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookSpec {
    pub tx_codewords: usize,
    pub rx_codewords: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_s: Option<usize>,
}

impl Default for CodebookSpec {
    fn default() -> Self {
        Self {
            tx_codewords: 4,
            rx_codewords: 4,
            n_s: None,
        }
    }
}

impl CodebookSpec {
    pub fn build(&self, tx: &ArrayLayout, rx: &ArrayLayout, tx_seed: u64, rx_seed: u64) -> Result<(Codebook, Codebook)> {
        let ns_t = self.n_s.unwrap_or(tx.k());
        let ns_r = self.n_s.unwrap_or(rx.k());
        Ok((
            random_codebook(tx, Side::Tx, self.tx_codewords, ns_t, tx_seed)?,
            random_codebook(rx, Side::Rx, self.rx_codewords, ns_r, rx_seed)?,
        ))
    }
}

// Stream tags for seeds derived from a run seed.
const STREAM_TX: u64 = 1;
const STREAM_RX: u64 = 2;
const STREAM_NOISE: u64 = 3;
const STREAM_ORACLE: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub phase1: Phase1Method,
    /// Model used as ground truth.
    pub truth: ModelKind,
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub seed: u64,
    pub codebook: CodebookSpec,
    pub grid: AngleGrid,
    /// Oracle perturbation.
    pub perturbation: Perturbation,
    pub external: Option<ReferenceParamsEstimate>,
    pub newton: NewtonConfig,
    /// When false every runtime is reported as zero so reports are
    /// byte-reproducible.
    pub timing: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            phase1: Phase1Method::Oracle,
            truth: ModelKind::Swm,
            snr_db: f64::INFINITY,
            seed: 0,
            codebook: CodebookSpec::default(),
            grid: AngleGrid::default(),
            perturbation: Perturbation::default(),
            external: None,
            newton: NewtonConfig::default(),
            timing: true,
        }
    }
}

/// Wall-clock milliseconds. `total_ms` is the sum of the stages.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimes {
    pub observe_ms: f64,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub reconstruct_ms: f64,
    pub total_ms: f64,
}

/// Parameter errors are absent for OMP, which never produces paths, and
/// when the estimated path count differs from the scene's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub phase1: Phase1Method,
    pub truth_model: ModelKind,
    /// `null` when noise is disabled.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub scene_hash: String,
    pub nmse_db: f64,
    pub angle_err_db: Option<f64>,
    pub dist_err_db: Option<f64>,
    pub gain_err_db: Option<f64>,
    pub runtime_ms: StageTimes,
}

struct Clock {
    on: bool,
    start: Instant,
}

impl Clock {
    fn start(on: bool) -> Self {
        Self { on, start: Instant::now() }
    }

    fn lap(&mut self) -> f64 {
        let now = Instant::now();
        let ms = (now - self.start).as_secs_f64() * 1e3;
        self.start = now;
        if self.on {
            ms
        } else {
            0.0
        }
    }
}

/// Synthesizes the ground truth, runs Phase 1, Phase 2 and reconstruction,
/// and scores the result against the ground truth.
pub fn run_estimate(scene: &Scene, opts: &EstimateOptions) -> Result<EstimateReport> {
    let mut clock = Clock::start(opts.timing);
    let mut times = StageTimes::default();
    let truth = synth(scene, opts.truth)?;
    let observe = || -> Result<_> {
        let (tcb, rcb) = opts.codebook.build(
            scene.tx(),
            scene.rx(),
            derive_seed(opts.seed, STREAM_TX, 0),
            derive_seed(opts.seed, STREAM_RX, 0),
        )?;
        let obs = stack_observations(&truth, &tcb, &rcb, opts.snr_db, derive_seed(opts.seed, STREAM_NOISE, 0))?;
        Ok((tcb, rcb, obs))
    };
    let n_paths = scene.paths().len();
    let est = match opts.phase1 {
        Phase1Method::Oracle | Phase1Method::External => {
            times.observe_ms = clock.lap();
            let est = if opts.phase1 == Phase1Method::Oracle {
                phase1_oracle(scene, &opts.perturbation, derive_seed(opts.seed, STREAM_ORACLE, 0))?
            } else {
                let e = opts
                    .external
                    .clone()
                    .ok_or_else(|| Error::invalid("external phase 1 needs an estimates file"))?;
                if e.paths.len() != n_paths {
                    return Err(Error::validation(
                        "paths",
                        format!("{} estimated paths for a scene with {n_paths}", e.paths.len()),
                    ));
                }
                e
            };
            times.phase1_ms = clock.lap();
            est
        }
        Phase1Method::Grid => {
            let (tcb, rcb, obs) = observe()?;
            times.observe_ms = clock.lap();
            let cfg = GridConfig {
                grid: opts.grid,
                gain_model: *scene.gain_model(),
                nlos_refl: None,
            };
            let est = phase1_grid(&obs, &tcb, &rcb, &cfg, n_paths)?;
            times.phase1_ms = clock.lap();
            est
        }
        Phase1Method::Omp => {
            let (tcb, rcb, obs) = observe()?;
            times.observe_ms = clock.lap();
            let r = omp_estimate(&obs, &tcb, &rcb, &opts.grid, n_paths)?;
            times.phase1_ms = clock.lap();
            times.total_ms = times.observe_ms + times.phase1_ms;
            return Ok(EstimateReport {
                phase1: opts.phase1,
                truth_model: opts.truth,
                snr_db: finite(opts.snr_db),
                seed: opts.seed,
                scene_hash: scene.fingerprint(),
                nmse_db: nmse_db(&r.channel.entries, &truth.entries)?,
                angle_err_db: None,
                dist_err_db: None,
                gain_err_db: None,
                runtime_ms: times,
            });
        }
    };
    let ext = extend_all(&est, scene.tx(), scene.rx(), &opts.newton)?;
    times.phase2_ms = clock.lap();
    let amps: Vec<f64> = est.paths.iter().map(|p| p.amp).collect();
    let h = reconstruct_hspm(&ext, &amps, scene.tx(), scene.rx(), scene.lambda())?;
    times.reconstruct_ms = clock.lap();
    times.total_ms = times.observe_ms + times.phase1_ms + times.phase2_ms + times.reconstruct_ms;
    let errs = if est.paths.len() == n_paths {
        Some(param_errors(&est, &ReferenceParamsEstimate::from_scene(scene))?)
    } else {
        None
    };
    Ok(EstimateReport {
        phase1: opts.phase1,
        truth_model: opts.truth,
        snr_db: finite(opts.snr_db),
        seed: opts.seed,
        scene_hash: scene.fingerprint(),
        nmse_db: nmse_db(&h.entries, &truth.entries)?,
        angle_err_db: errs.map(|e| e.angle_db),
        dist_err_db: errs.map(|e| e.dist_db),
        gain_err_db: errs.map(|e| e.gain_db),
        runtime_ms: times,
    })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Monte Carlo comparison of estimators over sampled scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default = "default_truth")]
    pub truth: ModelKind,
    pub snr_db: Vec<f64>,
    pub methods: Vec<Phase1Method>,
    #[serde(default)]
    pub codebook: CodebookSpec,
    #[serde(default)]
    pub grid: AngleGrid,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub seed: u64,
}

fn default_truth() -> ModelKind {
    ModelKind::Swm
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            sampler: SamplerConfig::default(),
            truth: ModelKind::Swm,
            snr_db: vec![-10.0, 0.0, 10.0],
            methods: vec![Phase1Method::Oracle, Phase1Method::Grid, Phase1Method::Omp],
            codebook: CodebookSpec::default(),
            grid: AngleGrid::default(),
            perturbation: Perturbation::default(),
            seed: 0,
        }
    }
}

/// `nmse_db_mean` averages the linear squared error ratio before taking dB.
/// Trials whose estimate fails count in `failures` and nowhere else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub snr_db: f64,
    pub method: Phase1Method,
    pub trials: usize,
    pub failures: usize,
    pub nmse_db_mean: f64,
    pub nmse_db_median: f64,
}

/// Trial `t` uses sampled scene `t` and the derived seed `t`; every method
/// and SNR of a trial shares codebooks and the noise realization (scaled).
pub fn run_eval(cfg: &EvalConfig, trials: usize) -> Result<Vec<EvalRow>> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if cfg.methods.contains(&Phase1Method::External) {
        return Err(Error::validation("methods", "external estimates cannot be evaluated here"));
    }
    if cfg.snr_db.is_empty() || cfg.methods.is_empty() {
        return Err(Error::validation("snr_db/methods", "must not be empty"));
    }
    cfg.sampler.validate()?;
    let per_trial: Vec<Vec<Option<f64>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<Vec<Option<f64>>> {
            let scene = sample_scene(&cfg.sampler, cfg.seed, t)?;
            let mut out = Vec::with_capacity(cfg.snr_db.len() * cfg.methods.len());
            for &snr in &cfg.snr_db {
                for &m in &cfg.methods {
                    let opts = EstimateOptions {
                        phase1: m,
                        truth: cfg.truth,
                        snr_db: snr,
                        seed: derive_seed(cfg.seed, 0, t),
                        codebook: cfg.codebook,
                        grid: cfg.grid,
                        perturbation: cfg.perturbation,
                        external: None,
                        newton: NewtonConfig::default(),
                        timing: false,
                    };
                    out.push(match run_estimate(&scene, &opts) {
                        Ok(r) => Some(r.nmse_db),
                        Err(e) if e.exit_code() == 3 => None,
                        Err(e) => return Err(e),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut col = 0;
    for &snr in &cfg.snr_db {
        for &m in &cfg.methods {
            let mut vals: Vec<f64> = per_trial.iter().filter_map(|v| v[col]).collect();
            let failures = trials - vals.len();
            let (mean, median) = if vals.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                vals.sort_by(f64::total_cmp);
                let lin = vals.iter().map(|v| 10f64.powf(v / 10.0)).sum::<f64>() / vals.len() as f64;
                let n = vals.len();
                let med = if n % 2 == 1 { vals[n / 2] } else { 0.5 * (vals[n / 2 - 1] + vals[n / 2]) };
                (10.0 * lin.log10(), med)
            };
            rows.push(EvalRow {
                snr_db: snr,
                method: m,
                trials,
                failures,
                nmse_db_mean: mean,
                nmse_db_median: median,
            });
            col += 1;
        }
    }
    Ok(rows)
}

pub fn write_eval_csv(path: &Path, rows: &[EvalRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["snr_db", "method", "trials", "failures", "nmse_db_mean", "nmse_db_median"])
        .map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            r.snr_db.to_string(),
            r.method.to_string(),
            r.trials.to_string(),
            r.failures.to_string(),
            r.nmse_db_mean.to_string(),
            r.nmse_db_median.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
