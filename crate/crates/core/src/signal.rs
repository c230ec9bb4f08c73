//! Hybrid beamforming observation pipeline: codebooks, block-diagonal
//! analog frames, beam-swept received signals and SNR-calibrated noise.
//!
//! Noise is drawn in the combined domain. Block `(c_r, c_t)` uses
//! `ChaCha20Rng::seed_from_u64(seed)` on stream `c_r * C_t + c_t`, so any
//! block can be regenerated on its own.

use std::f64::consts::PI;

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::geometry::ArrayLayout;
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Tx,
    Rx,
}

/// Analog phases (in cycles, one per antenna) and a `K x N_s` digital matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub phases: Vec<f64>,
    pub digital: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub side: Side,
    pub seed: u64,
    pub layout: ArrayLayout,
    pub n_s: usize,
    pub codewords: Vec<Codeword>,
}

/// The first `n_s` columns of the `k x k` identity.
pub fn identity_digital(k: usize, n_s: usize) -> CMatrix {
    CMatrix::from_fn(k, n_s, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `c` codewords with i.i.d. uniform analog phases and identity digital part.
pub fn random_codebook(layout: &ArrayLayout, side: Side, c: usize, n_s: usize, seed: u64) -> Result<Codebook> {
    if c == 0 {
        return Err(Error::invalid("codebook needs at least one codeword"));
    }
    if n_s == 0 || n_s > layout.k() {
        return Err(Error::invalid(format!(
            "number of streams {n_s} must be in 1..={}",
            layout.k()
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let codewords = (0..c)
        .map(|_| Codeword {
            phases: (0..layout.n()).map(|_| rng.random::<f64>()).collect(),
            digital: identity_digital(layout.k(), n_s),
        })
        .collect();
    Ok(Codebook {
        side,
        seed,
        layout: layout.clone(),
        n_s,
        codewords,
    })
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Replaces every digital matrix.
    pub fn with_digital(mut self, digital: CMatrix) -> Result<Self> {
        if digital.nrows() != self.layout.k() {
            return Err(Error::invalid("digital matrix must have K rows"));
        }
        self.n_s = digital.ncols();
        for cw in &mut self.codewords {
            cw.digital = digital.clone();
        }
        Ok(self)
    }

    pub fn frames(&self) -> Result<Vec<CMatrix>> {
        self.codewords
            .iter()
            .map(|cw| assemble_frame(cw, &self.layout))
            .collect()
    }

    /// `[F_1 ... F_C]`, `N x (N_s C)`.
    pub fn stacked_frame(&self) -> Result<CMatrix> {
        let frames = self.frames()?;
        let n = self.layout.n();
        let mut out = CMatrix::zeros(n, self.n_s * frames.len());
        for (c, f) in frames.iter().enumerate() {
            out.view_mut((0, c * self.n_s), (n, self.n_s)).copy_from(f);
        }
        Ok(out)
    }
}

fn check_codeword(cw: &Codeword, layout: &ArrayLayout) -> Result<()> {
    if cw.phases.len() != layout.n() || cw.digital.nrows() != layout.k() {
        return Err(Error::invalid(format!(
            "codeword with {} phases and {} digital rows does not fit a layout with N = {}, K = {}",
            cw.phases.len(),
            cw.digital.nrows(),
            layout.n(),
            layout.k()
        )));
    }
    Ok(())
}

/// Block-diagonal analog matrix, `N x K`, non-zero entries `exp(j 2 pi w) / sqrt(N)`.
pub fn analog_matrix(cw: &Codeword, layout: &ArrayLayout) -> Result<CMatrix> {
    check_codeword(cw, layout)?;
    let n = layout.n();
    let na = layout.na();
    let scale = 1.0 / (n as f64).sqrt();
    let mut m = CMatrix::zeros(n, layout.k());
    for (i, w) in cw.phases.iter().enumerate() {
        m[(i, i / na)] = C64::cis(2.0 * PI * w) * scale;
    }
    Ok(m)
}

/// Analog times digital, `N x N_s`.
pub fn assemble_frame(cw: &Codeword, layout: &ArrayLayout) -> Result<CMatrix> {
    Ok(analog_matrix(cw, layout)? * &cw.digital)
}

fn noise_block(rows: usize, cols: usize, seed: u64, stream: u64) -> CMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// `chol(W^H W)` as the colouring of combined noise.
fn noise_colouring(w: &CMatrix) -> Result<CMatrix> {
    let g = w.adjoint() * w;
    Cholesky::new(g)
        .map(|c| c.l())
        .ok_or_else(|| Error::Numerical("combiner Gram matrix is not positive definite".into()))
}

fn combined(wh_h: &CMatrix, f: &CMatrix, l: Option<&CMatrix>, sigma: f64, seed: u64, stream: u64) -> CMatrix {
    let mut y = wh_h * f;
    if let Some(l) = l {
        if sigma > 0.0 {
            let z = noise_block(l.ncols(), f.ncols(), seed, stream);
            y += l * z * C64::new(sigma, 0.0);
        }
    }
    y
}

/// `W^H H F + W^H N` with `N` i.i.d. circular Gaussian of variance
/// `sigma^2` per entry, drawn directly in the combined domain.
pub fn observe_pair(
    h: &CMatrix,
    f: &CMatrix,
    w: &CMatrix,
    sigma: f64,
    seed: u64,
    stream: u64,
) -> Result<CMatrix> {
    if h.nrows() != w.nrows() || h.ncols() != f.nrows() {
        return Err(Error::invalid(format!(
            "cannot combine H {:?} with F {:?} and W {:?}",
            h.shape(),
            f.shape(),
            w.shape()
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("noise sigma must be finite and non-negative"));
    }
    let l = if sigma > 0.0 { Some(noise_colouring(w)?) } else { None };
    Ok(combined(&(w.adjoint() * h), f, l.as_ref(), sigma, seed, stream))
}

/// Stacked beam-swept observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// `(N_s C_r) x (N_s C_t)`.
    pub y: CMatrix,
    /// `f64::INFINITY` means noise disabled.
    pub snr_db: f64,
    pub noise_seed: u64,
    pub noise_sigma: f64,
    pub tx_seed: u64,
    pub rx_seed: u64,
    /// Pilot length; the matched-filtered model makes it metadata only.
    pub pilot_len: usize,
}

/// Stacks all `C_r x C_t` codeword pairs. `snr_db` is the ratio of the
/// noise-free stacked power to the expected stacked noise power.
pub fn stack_observations(
    h: &ChannelMatrix,
    tx_cb: &Codebook,
    rx_cb: &Codebook,
    snr_db: f64,
    seed: u64,
) -> Result<Observation> {
    let h = &h.entries;
    if h.nrows() != rx_cb.layout.n() || h.ncols() != tx_cb.layout.n() {
        return Err(Error::invalid(format!(
            "channel {:?} does not match codebooks ({} Rx, {} Tx antennas)",
            h.shape(),
            rx_cb.layout.n(),
            tx_cb.layout.n()
        )));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::invalid("snr_db must be a number or +inf"));
    }
    let fs = tx_cb.frames()?;
    let ws = rx_cb.frames()?;
    let whs: Vec<CMatrix> = ws.iter().map(|w| w.adjoint() * h).collect();
    let (ct, cr) = (fs.len(), ws.len());
    let (nst, nsr) = (tx_cb.n_s, rx_cb.n_s);

    let mut clean = CMatrix::zeros(nsr * cr, nst * ct);
    for (r, wh) in whs.iter().enumerate() {
        for (t, f) in fs.iter().enumerate() {
            clean
                .view_mut((r * nsr, t * nst), (nsr, nst))
                .copy_from(&combined(wh, f, None, 0.0, 0, 0));
        }
    }
    if snr_db == f64::INFINITY {
        return Ok(Observation {
            y: clean,
            snr_db,
            noise_seed: seed,
            noise_sigma: 0.0,
            tx_seed: tx_cb.seed,
            rx_seed: rx_cb.seed,
            pilot_len: nst,
        });
    }
    let power = clean.norm_squared();
    let trace: f64 = ws.iter().map(|w| w.norm_squared()).sum();
    let sigma = (power / (10f64.powf(snr_db / 10.0) * nst as f64 * ct as f64 * trace)).sqrt();
    let ls = ws.iter().map(noise_colouring).collect::<Result<Vec<_>>>()?;
    let mut y = CMatrix::zeros(nsr * cr, nst * ct);
    for (r, wh) in whs.iter().enumerate() {
        for (t, f) in fs.iter().enumerate() {
            let stream = (r * ct + t) as u64;
            y.view_mut((r * nsr, t * nst), (nsr, nst))
                .copy_from(&combined(wh, f, Some(&ls[r]), sigma, seed, stream));
        }
    }
    Ok(Observation {
        y,
        snr_db,
        noise_seed: seed,
        noise_sigma: sigma,
        tx_seed: tx_cb.seed,
        rx_seed: rx_cb.seed,
        pilot_len: nst,
    })
}

/// Real tensor in channel-last layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    pub shape: [usize; 3],
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn get(&self, i: usize, j: usize, c: usize) -> f64 {
        self.data[(i * self.shape[1] + j) * self.shape[2] + c]
    }
}

/// `(Re Y, Im Y, |Y|)` per entry, row-major, channel last.
pub fn tensorize(obs: &Observation) -> Tensor3 {
    let (r, c) = obs.y.shape();
    let mut data = Vec::with_capacity(r * c * 3);
    for i in 0..r {
        for j in 0..c {
            let z = obs.y[(i, j)];
            data.extend([z.re, z.im, z.norm()]);
        }
    }
    Tensor3 {
        shape: [r, c, 3],
        data,
    }
}

/// Min-max normalization to [0, 1]. Values outside `[lo, hi]` are an error.
pub fn normalize_minmax(values: &[f64], lo: f64, hi: f64, field: &str) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::invalid(format!("normalization range for {field} needs hi > lo")));
    }
    values
        .iter()
        .map(|&x| {
            if !(x >= lo && x <= hi) {
                return Err(Error::Range {
                    field: field.to_string(),
                    value: x,
                    lo,
                    hi,
                });
            }
            Ok((x - lo) / (hi - lo))
        })
        .collect()
}

pub fn denormalize_minmax(values: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::invalid("normalization range needs hi > lo"));
    }
    Ok(values.iter().map(|&u| lo + u * (hi - lo)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{synth_swm, ModelKind};
    use crate::geometry::tests_support::small_scene;

    fn layout() -> ArrayLayout {
        ArrayLayout::regular(2, 2, 4, 2, 2, 5e-4).unwrap()
    }

    #[test]
    fn seeded_codebooks_repeat() {
        let a = random_codebook(&layout(), Side::Tx, 4, 4, 9).unwrap();
        let b = random_codebook(&layout(), Side::Tx, 4, 4, 9).unwrap();
        assert_eq!(a, b);
        let c = random_codebook(&layout(), Side::Tx, 4, 4, 10).unwrap();
        assert_ne!(a, c);
        assert!(random_codebook(&layout(), Side::Tx, 4, 5, 9).is_err());
    }

    #[test]
    fn constant_modulus_and_block_structure() {
        let l = layout();
        let cb = random_codebook(&l, Side::Rx, 3, 4, 1).unwrap();
        let n = l.n();
        for cw in &cb.codewords {
            let a = analog_matrix(cw, &l).unwrap();
            for i in 0..n {
                for k in 0..l.k() {
                    let z = a[(i, k)];
                    if i / l.na() == k {
                        assert!((z.norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-15);
                    } else {
                        assert_eq!(z, C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_phase_single_subarray() {
        let l = ArrayLayout::new(vec![(0, 0)], 3, 2, 5e-4).unwrap();
        let cw = Codeword {
            phases: vec![0.0; 6],
            digital: identity_digital(1, 1),
        };
        let f = assemble_frame(&cw, &l).unwrap();
        for z in f.iter() {
            assert!((z - C64::new(1.0 / 6f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn column_norms() {
        let l = layout();
        let cb = random_codebook(&l, Side::Tx, 1, 4, 3).unwrap();
        let f = assemble_frame(&cb.codewords[0], &l).unwrap();
        let want = (l.na() as f64).sqrt() / (l.n() as f64).sqrt();
        for c in f.column_iter() {
            assert!((c.norm() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn stacked_dimensions() {
        let l = layout();
        let tx = random_codebook(&l, Side::Tx, 4, 4, 1).unwrap();
        let rx = random_codebook(&l, Side::Rx, 4, 4, 2).unwrap();
        let h = ChannelMatrix::new(CMatrix::from_element(16, 16, C64::new(1.0, 0.5)), ModelKind::Swm, "").unwrap();
        let obs = stack_observations(&h, &tx, &rx, 10.0, 3).unwrap();
        assert_eq!(obs.y.shape(), (16, 16));
        let t = tensorize(&obs);
        assert_eq!(t.shape, [16, 16, 3]);
    }

    #[test]
    fn noiseless_observation_is_projection() {
        let s = small_scene();
        let h = synth_swm(&s).unwrap();
        let tx = random_codebook(s.tx(), Side::Tx, 3, 2, 5).unwrap();
        let rx = random_codebook(s.rx(), Side::Rx, 2, 2, 6).unwrap();
        let obs = stack_observations(&h, &tx, &rx, f64::INFINITY, 0).unwrap();
        let want = rx.stacked_frame().unwrap().adjoint() * &h.entries * tx.stacked_frame().unwrap();
        assert!((&obs.y - want).norm() <= 1e-12 * obs.y.norm());
    }

    #[test]
    fn blocks_match_observe_pair() {
        let s = small_scene();
        let h = synth_swm(&s).unwrap();
        let tx = random_codebook(s.tx(), Side::Tx, 4, 2, 5).unwrap();
        let rx = random_codebook(s.rx(), Side::Rx, 3, 2, 6).unwrap();
        let obs = stack_observations(&h, &tx, &rx, 5.0, 77).unwrap();
        let fs = tx.frames().unwrap();
        let ws = rx.frames().unwrap();
        let (r, t) = (1, 2);
        let blk = observe_pair(&h.entries, &fs[t], &ws[r], obs.noise_sigma, 77, (r * 4 + t) as u64).unwrap();
        assert_eq!(obs.y.view((r * 2, t * 2), (2, 2)).clone_owned(), blk);
    }

    #[test]
    fn zero_noise_pair_and_linearity() {
        let s = small_scene();
        let h1 = synth_swm(&s).unwrap().entries;
        let h2 = h1.map(|z| z * C64::new(0.3, -1.0));
        let tx = random_codebook(s.tx(), Side::Tx, 1, 2, 1).unwrap();
        let rx = random_codebook(s.rx(), Side::Rx, 1, 2, 2).unwrap();
        let f = &tx.frames().unwrap()[0];
        let w = &rx.frames().unwrap()[0];
        let a = observe_pair(&h1, f, w, 0.0, 0, 0).unwrap();
        let b = observe_pair(&h2, f, w, 0.0, 0, 0).unwrap();
        let ab = observe_pair(&(&h1 + &h2), f, w, 0.0, 0, 0).unwrap();
        assert!((ab - (a.clone() + b)).norm() <= 1e-14 * a.norm());
        assert!((a - w.adjoint() * &h1 * f).norm() == 0.0);
        assert!(observe_pair(&h1, w, f, 0.0, 0, 0).is_err());
    }

    #[test]
    fn combined_noise_covariance() {
        let l = layout();
        let tx = random_codebook(&l, Side::Tx, 1, 4, 1).unwrap();
        let rx = random_codebook(&l, Side::Rx, 1, 4, 2).unwrap();
        let f = &tx.frames().unwrap()[0];
        let w = &rx.frames().unwrap()[0];
        let h = CMatrix::zeros(l.n(), l.n());
        let sigma = 0.7;
        let trials = 10_000;
        let mut acc = 0.0;
        for s in 0..trials {
            acc += observe_pair(&h, f, w, sigma, 11, s).unwrap().norm_squared();
        }
        let measured = acc / trials as f64;
        let expected = sigma * sigma * w.norm_squared() * f.ncols() as f64;
        assert!((measured / expected - 1.0).abs() < 0.05, "{measured} vs {expected}");
    }

    #[test]
    fn snr_calibration() {
        let s = small_scene();
        let h = synth_swm(&s).unwrap();
        let tx = random_codebook(s.tx(), Side::Tx, 4, 4, 1).unwrap();
        let rx = random_codebook(s.rx(), Side::Rx, 4, 2, 2).unwrap();
        let clean = stack_observations(&h, &tx, &rx, f64::INFINITY, 0).unwrap().y;
        for snr in [-20.0, -10.0, 0.0, 10.0] {
            let mut noise = 0.0;
            for seed in 0..100 {
                noise += (stack_observations(&h, &tx, &rx, snr, seed).unwrap().y - &clean).norm_squared();
            }
            let realized = 10.0 * (clean.norm_squared() / (noise / 100.0)).log10();
            assert!((realized - snr).abs() < 0.2, "{snr}: {realized}");
        }
    }

    #[test]
    fn tensor_channels() {
        let y = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 - 1.5 * j as f64, 0.0));
        let obs = Observation { y, snr_db: f64::INFINITY, noise_seed: 0, noise_sigma: 0.0, tx_seed: 0, rx_seed: 0, pilot_len: 1 };
        let t = tensorize(&obs);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(t.get(i, j, 1), 0.0);
                assert_eq!(t.get(i, j, 2), t.get(i, j, 0).abs());
            }
        }
    }

    #[test]
    fn minmax() {
        let v = normalize_minmax(&[-1.0, 3.0, 1.0], -1.0, 3.0, "x").unwrap();
        assert_eq!(v, vec![0.0, 1.0, 0.5]);
        let back = denormalize_minmax(&v, -1.0, 3.0).unwrap();
        assert_eq!(back, vec![-1.0, 3.0, 1.0]);
        assert_eq!(normalize_minmax(&[PI], -PI, PI, "theta").unwrap(), vec![1.0]);
        assert!(normalize_minmax(&[1.0], 1.0, 1.0, "x").is_err());
        let err = normalize_minmax(&[4.0], 0.0, 3.0, "dist").unwrap_err();
        assert!(err.to_string().contains("dist"));
    }

    proptest::proptest! {
        #[test]
        fn minmax_round_trip(x in -50.0f64..50.0) {
            let u = normalize_minmax(&[x], -50.0, 50.0, "x").unwrap();
            let b = denormalize_minmax(&u, -50.0, 50.0).unwrap();
            proptest::prop_assert!((b[0] - x).abs() < 1e-12);
        }
    }
}
