//! Beam-domain matching pursuit over a planar-wave angle grid.
//!
//! An atom is the beam-domain image `b_r b_t^T` of a single planar path,
//! with `b_r = W^H a_r` and `b_t = F^T a_t`. Atoms are kept factored; the
//! correlation of every atom with the residual is one product
//! `B_r^H R conj(B_t)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::channel::{array_response, build_columns, ChannelMatrix, ModelKind};
use crate::geometry::{ArrayLayout, GainModel, PathParams};
use crate::signal::{Codebook, Observation};
use crate::{CMatrix, Error, Result, C64};

use super::{EstimateSource, ReferenceParamsEstimate};

/// `n` cell-centre samples of `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AngleRange {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let s = self.step();
        (0..self.n).map(|i| self.lo + (i as f64 + 0.5) * s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub theta_t: AngleRange,
    pub phi_t: AngleRange,
    pub theta_r: AngleRange,
    pub phi_r: AngleRange,
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self::uniform(16, 8)
    }
}

impl AngleGrid {
    /// Azimuth over `(-pi/2, pi/2)`, elevation over `(-pi/4, pi/4)`.
    pub fn uniform(n_theta: usize, n_phi: usize) -> Self {
        let t = AngleRange::new(-FRAC_PI_2, FRAC_PI_2, n_theta);
        let p = AngleRange::new(-FRAC_PI_4, FRAC_PI_4, n_phi);
        Self {
            theta_t: t,
            phi_t: p,
            theta_r: t,
            phi_r: p,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("theta_t", self.theta_t),
            ("phi_t", self.phi_t),
            ("theta_r", self.theta_r),
            ("phi_r", self.phi_r),
        ] {
            if r.n < 2 || !(r.hi > r.lo) {
                return Err(Error::invalid(format!(
                    "grid for {name} needs at least 2 points over a non-empty range"
                )));
            }
        }
        Ok(())
    }
}

/// Settings for [`phase1_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridConfig {
    pub grid: AngleGrid,
    /// Gain model inverted to turn a gain magnitude into a distance.
    pub gain_model: GainModel,
    /// Reflection coefficient assumed for NLoS paths when inverting.
    pub nlos_refl: Option<f64>,
}

struct Dictionary {
    angles: Vec<(f64, f64)>,
    /// `M x G`, columns normalized.
    atoms: CMatrix,
    /// Original column norms.
    norms: Vec<f64>,
}

fn dictionary(
    frame: &CMatrix,
    layout: &ArrayLayout,
    thetas: &AngleRange,
    phis: &AngleRange,
    conjugate_frame: bool,
) -> Result<Dictionary> {
    let lambda = 2.0 * layout.d();
    let proj = if conjugate_frame {
        frame.adjoint()
    } else {
        frame.transpose()
    };
    let mut angles = Vec::with_capacity(thetas.n * phis.n);
    let mut cols = Vec::with_capacity(thetas.n * phis.n);
    let mut norms = Vec::with_capacity(thetas.n * phis.n);
    for t in thetas.points() {
        for p in phis.points() {
            let a = DVector::from_vec(array_response(layout, t, p, lambda));
            let b = &proj * a;
            let nb = b.norm();
            if nb == 0.0 {
                return Err(Error::Numerical("beam-domain atom vanished".into()));
            }
            angles.push((t, p));
            cols.push(b / C64::new(nb, 0.0));
            norms.push(nb);
        }
    }
    Ok(Dictionary {
        angles,
        atoms: CMatrix::from_columns(&cols),
        norms,
    })
}

struct Selected {
    rx: usize,
    tx: usize,
    /// Gain of the unnormalized atom `b_r b_t^T`.
    gain: C64,
}

struct Pursuit {
    selected: Vec<Selected>,
    residual_norms: Vec<f64>,
}

fn pursue(y: &CMatrix, dr: &Dictionary, dt: &Dictionary, n_atoms: usize) -> Result<Pursuit> {
    let m = y.len();
    let vec_y = DVector::from_iterator(m, y.iter().copied());
    let mut residual = y.clone();
    let mut picks: Vec<(usize, usize)> = Vec::new();
    let mut gains = DVector::zeros(0);
    let mut residual_norms = vec![residual.norm()];
    let bt_conj = dt.atoms.conjugate();
    for _ in 0..n_atoms {
        let corr = dr.atoms.adjoint() * &residual * &bt_conj;
        let mut best = (0, 0, -1.0);
        for j in 0..corr.ncols() {
            for i in 0..corr.nrows() {
                let v = corr[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if picks.contains(&(best.0, best.1)) {
            break;
        }
        picks.push((best.0, best.1));
        let cols: Vec<DVector<C64>> = picks
            .iter()
            .map(|&(i, j)| {
                let atom = dr.atoms.column(i) * dt.atoms.column(j).transpose();
                DVector::from_iterator(m, atom.iter().copied())
            })
            .collect();
        let a = CMatrix::from_columns(&cols);
        let svd = a.clone().svd(true, true);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        if !(smin > 1e-12 * smax) {
            return Err(Error::Numerical(format!(
                "least-squares update is singular (singular values {smin:e} / {smax:e})"
            )));
        }
        gains = svd
            .solve(&vec_y, 0.0)
            .map_err(|e| Error::Numerical(format!("least-squares update failed: {e}")))?;
        let fit = &a * &gains;
        residual = CMatrix::from_iterator(y.nrows(), y.ncols(), vec_y.iter().zip(fit.iter()).map(|(a, b)| a - b));
        residual_norms.push(residual.norm());
    }
    let selected = picks
        .iter()
        .zip(gains.iter())
        .map(|(&(rx, tx), g)| Selected {
            rx,
            tx,
            gain: g / C64::new(dr.norms[rx] * dt.norms[tx], 0.0),
        })
        .collect();
    Ok(Pursuit {
        selected,
        residual_norms,
    })
}

fn dictionaries(obs: &Observation, tx_cb: &Codebook, rx_cb: &Codebook, grid: &AngleGrid) -> Result<(Dictionary, Dictionary)> {
    grid.validate()?;
    let f = tx_cb.stacked_frame()?;
    let w = rx_cb.stacked_frame()?;
    if obs.y.nrows() != w.ncols() || obs.y.ncols() != f.ncols() {
        return Err(Error::invalid(format!(
            "observation {:?} does not match codebooks ({} x {})",
            obs.y.shape(),
            w.ncols(),
            f.ncols()
        )));
    }
    let dr = dictionary(&w, &rx_cb.layout, &grid.theta_r, &grid.phi_r, true)?;
    let dt = dictionary(&f, &tx_cb.layout, &grid.theta_t, &grid.phi_t, false)?;
    Ok((dr, dt))
}

/// Distance consistent with both the amplitude model and the phase of `g`.
fn distance_from_gain(g: C64, refl: f64, model: &GainModel, lambda: f64) -> Result<f64> {
    let coarse = model.invert(g.norm(), refl, lambda)?;
    let frac = -g.arg() / (2.0 * std::f64::consts::PI);
    let mut d = lambda * ((coarse / lambda - frac).round() + frac);
    if d <= 0.0 {
        d += lambda * (1.0 - d / lambda).ceil();
    }
    Ok(d)
}

/// On-grid successive path extraction with joint least-squares gains. The
/// strongest path is taken as LoS. Distances invert the gain model and are
/// then moved by less than half a wavelength to match the gain phase.
pub fn phase1_grid(
    obs: &Observation,
    tx_cb: &Codebook,
    rx_cb: &Codebook,
    cfg: &GridConfig,
    n_paths: usize,
) -> Result<ReferenceParamsEstimate> {
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    let (dr, dt) = dictionaries(obs, tx_cb, rx_cb, &cfg.grid)?;
    let run = pursue(&obs.y, &dr, &dt, n_paths)?;
    let lambda = 2.0 * tx_cb.layout.d();
    let mut sel = run.selected;
    sel.sort_by(|a, b| b.gain.norm().total_cmp(&a.gain.norm()));
    let mut paths = Vec::with_capacity(sel.len());
    for (i, s) in sel.iter().enumerate() {
        let refl = if i == 0 { 1.0 } else { cfg.nlos_refl.unwrap_or(1.0) };
        let (theta_r, phi_r) = dr.angles[s.rx];
        let (theta_t, phi_t) = dt.angles[s.tx];
        if s.gain.norm() == 0.0 {
            return Err(Error::Numerical("extracted path has zero gain".into()));
        }
        paths.push(PathParams {
            amp: s.gain.norm(),
            dist: distance_from_gain(s.gain, refl, &cfg.gain_model, lambda)?,
            theta_t,
            phi_t,
            theta_r,
            phi_r,
        });
    }
    ReferenceParamsEstimate::new(paths, EstimateSource::Grid)
}

#[derive(Debug, Clone)]
pub struct OmpResult {
    pub channel: ChannelMatrix,
    /// Residual Frobenius norm before the first and after every iteration.
    pub residual_norms: Vec<f64>,
    /// `(theta_t, phi_t, theta_r, phi_r, gain)` of every selected atom.
    pub atoms: Vec<(f64, f64, f64, f64, C64)>,
}

/// Orthogonal matching pursuit with a planar-wave dictionary; returns the
/// channel `sum g a_r a_t^T` over the selected atoms.
pub fn omp_estimate(
    obs: &Observation,
    tx_cb: &Codebook,
    rx_cb: &Codebook,
    grid: &AngleGrid,
    n_paths: usize,
) -> Result<OmpResult> {
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    let (dr, dt) = dictionaries(obs, tx_cb, rx_cb, grid)?;
    let run = pursue(&obs.y, &dr, &dt, n_paths)?;
    let lambda = 2.0 * tx_cb.layout.d();
    let terms: Vec<(C64, Vec<C64>, Vec<C64>)> = run
        .selected
        .iter()
        .map(|s| {
            let (tr, pr) = dr.angles[s.rx];
            let (tt, pt) = dt.angles[s.tx];
            (
                s.gain,
                array_response(&rx_cb.layout, tr, pr, lambda),
                array_response(&tx_cb.layout, tt, pt, lambda),
            )
        })
        .collect();
    let entries = build_columns(rx_cb.layout.n(), tx_cb.layout.n(), |l| {
        Ok((0..rx_cb.layout.n())
            .map(|i| terms.iter().map(|(g, ar, at)| *g * (ar[i] * at[l])).sum())
            .collect())
    })?;
    let atoms = run
        .selected
        .iter()
        .map(|s| {
            let (tr, pr) = dr.angles[s.rx];
            let (tt, pt) = dt.angles[s.tx];
            (tt, pt, tr, pr, s.gain)
        })
        .collect();
    Ok(OmpResult {
        channel: ChannelMatrix::new(entries, ModelKind::Pwm, String::new())?,
        residual_norms: run.residual_norms,
        atoms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{path_gain, pwm_matrix};
    use crate::estimation::nmse_db;
    use crate::signal::{random_codebook, stack_observations, Side};
    use crate::SPEED_OF_LIGHT;

    const F: f64 = 300e9;

    fn layouts() -> (ArrayLayout, ArrayLayout) {
        let d = SPEED_OF_LIGHT / F / 2.0;
        let l = ArrayLayout::regular(2, 2, 4, 4, 4, d).unwrap();
        (l.clone(), l)
    }

    fn channel(paths: &[PathParams], tx: &ArrayLayout, rx: &ArrayLayout) -> ChannelMatrix {
        let lambda = SPEED_OF_LIGHT / F;
        ChannelMatrix::new(pwm_matrix(paths, tx, rx, lambda).unwrap(), ModelKind::Pwm, "").unwrap()
    }

    fn path(theta_t: f64, phi_t: f64, theta_r: f64, phi_r: f64, dist: f64) -> PathParams {
        let lambda = SPEED_OF_LIGHT / F;
        PathParams {
            amp: GainModel::default().amplitude(1.0, dist, lambda),
            dist,
            theta_t,
            phi_t,
            theta_r,
            phi_r,
        }
    }

    #[test]
    fn on_grid_single_path_exact() {
        let (tx, rx) = layouts();
        let grid = AngleGrid::uniform(8, 4);
        let (ts, ps) = (grid.theta_t.points(), grid.phi_t.points());
        let p = path(ts[5], ps[1], ts[2], ps[2], 7.3);
        let h = channel(&[p], &tx, &rx);
        let tcb = random_codebook(&tx, Side::Tx, 4, 4, 1).unwrap();
        let rcb = random_codebook(&rx, Side::Rx, 4, 4, 2).unwrap();
        let obs = stack_observations(&h, &tcb, &rcb, f64::INFINITY, 0).unwrap();
        let cfg = GridConfig {
            grid,
            ..GridConfig::default()
        };
        let est = phase1_grid(&obs, &tcb, &rcb, &cfg, 1).unwrap();
        let e = est.paths[0];
        assert_eq!((e.theta_t, e.phi_t, e.theta_r, e.phi_r), (p.theta_t, p.phi_t, p.theta_r, p.phi_r));
        assert!((e.amp - p.amp).abs() < 1e-9 * p.amp);
        let g = path_gain(e.amp, e.dist, 2.0 * tx.d()).unwrap();
        let g0 = path_gain(p.amp, p.dist, 2.0 * tx.d()).unwrap();
        assert!((g - g0).norm() < 1e-9 * p.amp);
        assert!((e.dist - p.dist).abs() < 1e-6);

        let omp = omp_estimate(&obs, &tcb, &rcb, &grid, 1).unwrap();
        assert!(nmse_db(&omp.channel.entries, &h.entries).unwrap() <= -100.0);
    }

    #[test]
    fn off_grid_within_half_cell() {
        let (tx, rx) = layouts();
        let grid = AngleGrid::uniform(8, 4);
        let tcb = random_codebook(&tx, Side::Tx, 16, 4, 3).unwrap();
        let rcb = random_codebook(&rx, Side::Rx, 16, 4, 4).unwrap();
        let cfg = GridConfig { grid, ..GridConfig::default() };
        let p = path(0.45, 0.12, -0.33, -0.2, 5.0);
        let h = channel(&[p], &tx, &rx);
        let obs = stack_observations(&h, &tcb, &rcb, f64::INFINITY, 0).unwrap();
        let e = phase1_grid(&obs, &tcb, &rcb, &cfg, 1).unwrap().paths[0];
        let ht = grid.theta_t.step() / 2.0 + 1e-12;
        let hp = grid.phi_t.step() / 2.0 + 1e-12;
        assert!((e.theta_t - p.theta_t).abs() <= ht);
        assert!((e.theta_r - p.theta_r).abs() <= ht);
        assert!((e.phi_t - p.phi_t).abs() <= hp);
        assert!((e.phi_r - p.phi_r).abs() <= hp);
    }

    #[test]
    fn two_paths_at_moderate_snr() {
        let (tx, rx) = layouts();
        let grid = AngleGrid::uniform(8, 4);
        let (ts, ps) = (grid.theta_t.points(), grid.phi_t.points());
        let a = path(ts[1], ps[1], ts[6], ps[2], 5.0);
        let mut b = path(ts[5], ps[2], ts[3], ps[1], 9.0);
        b.amp *= 0.8;
        let h = channel(&[a, b], &tx, &rx);
        let cfg = GridConfig { grid, ..GridConfig::default() };
        let mut hits = 0;
        for seed in 0..100u64 {
            let tcb = random_codebook(&tx, Side::Tx, 4, 4, 2 * seed).unwrap();
            let rcb = random_codebook(&rx, Side::Rx, 4, 4, 2 * seed + 1).unwrap();
            let obs = stack_observations(&h, &tcb, &rcb, 10.0, seed).unwrap();
            let est = phase1_grid(&obs, &tcb, &rcb, &cfg, 2).unwrap();
            let found = |q: &PathParams| {
                est.paths.iter().any(|e| {
                    (e.theta_t - q.theta_t).abs() <= grid.theta_t.step() + 1e-12
                        && (e.theta_r - q.theta_r).abs() <= grid.theta_r.step() + 1e-12
                        && (e.phi_t - q.phi_t).abs() <= grid.phi_t.step() + 1e-12
                        && (e.phi_r - q.phi_r).abs() <= grid.phi_r.step() + 1e-12
                })
            };
            if found(&a) && found(&b) {
                hits += 1;
            }
        }
        assert!(hits >= 90, "{hits} of 100");
    }

    #[test]
    fn omp_residual_non_increasing() {
        let (tx, rx) = layouts();
        let p = path(0.41, 0.07, -0.2, 0.1, 6.0);
        let q = path(-0.3, -0.1, 0.5, 0.2, 8.0);
        let h = channel(&[p, q], &tx, &rx);
        let tcb = random_codebook(&tx, Side::Tx, 4, 4, 5).unwrap();
        let rcb = random_codebook(&rx, Side::Rx, 4, 4, 6).unwrap();
        let obs = stack_observations(&h, &tcb, &rcb, 5.0, 1).unwrap();
        let r = omp_estimate(&obs, &tcb, &rcb, &AngleGrid::default(), 6).unwrap();
        for w in r.residual_norms.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let (tx, rx) = layouts();
        let tcb = random_codebook(&tx, Side::Tx, 4, 4, 5).unwrap();
        let rcb = random_codebook(&rx, Side::Rx, 2, 4, 6).unwrap();
        let h = channel(&[path(0.1, 0.0, -0.1, 0.0, 4.0)], &tx, &rx);
        let obs = stack_observations(&h, &tcb, &tcb.clone(), f64::INFINITY, 0);
        let obs = obs.unwrap();
        assert!(phase1_grid(&obs, &tcb, &rcb, &GridConfig::default(), 1).is_err());
        let bad = GridConfig { grid: AngleGrid::uniform(1, 4), ..GridConfig::default() };
        assert!(phase1_grid(&obs, &tcb, &tcb, &bad, 1).is_err());
        assert!(omp_estimate(&obs, &tcb, &tcb, &AngleGrid::default(), 0).is_err());
    }

    #[test]
    fn gain_phase_distance() {
        let lambda = 1e-3;
        let m = GainModel::default();
        for d in [3.0, 3.0004, 12.71234] {
            let g = path_gain(m.amplitude(1.0, d, lambda), d, lambda).unwrap();
            assert!((distance_from_gain(g, 1.0, &m, lambda).unwrap() - d).abs() < 1e-9);
        }
    }
}
