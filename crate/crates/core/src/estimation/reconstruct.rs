use crate::channel::{build_columns, path_gain, phasor, subarray_response, ChannelMatrix, ModelKind};
use crate::geometry::ArrayLayout;
use crate::{Error, Result, C64};

use super::ExtendedParams;

/// Assembles the hybrid channel blockwise: block `(k_r, k_t)` is
/// `sum_p g_p a_r a_t^T` with per-pair angles and distances and amplitudes
/// shared across subarrays.
pub fn reconstruct_hspm(
    ext: &ExtendedParams,
    amps: &[f64],
    tx: &ArrayLayout,
    rx: &ArrayLayout,
    lambda: f64,
) -> Result<ChannelMatrix> {
    let np = ext.n_paths();
    if amps.len() != np {
        return Err(Error::invalid(format!("{} amplitudes for {np} paths", amps.len())));
    }
    if ext.k_t != tx.k() || ext.k_r != rx.k() {
        return Err(Error::invalid(format!(
            "extended parameters cover {}x{} subarray pairs, layouts need {}x{}",
            ext.k_t,
            ext.k_r,
            tx.k(),
            rx.k()
        )));
    }
    let refs = ext
        .reference
        .paths
        .iter()
        .zip(amps)
        .map(|(p, a)| path_gain(*a, p.dist, lambda))
        .collect::<Result<Vec<_>>>()?;
    // terms[(k_r * K_t + k_t) * N_p + p] = (gain, a_r, a_t)
    let mut terms = Vec::with_capacity(tx.k() * rx.k() * np);
    for k_r in 0..rx.k() {
        for k_t in 0..tx.k() {
            for (p, g_ref) in refs.iter().enumerate() {
                let e = ext
                    .get(k_t, k_r, p)
                    .ok_or_else(|| Error::invalid(format!("missing entry ({k_t}, {k_r}, {p})")))?;
                terms.push((
                    *g_ref * phasor(e.excess, lambda),
                    subarray_response(rx, e.theta_r, e.phi_r, lambda),
                    subarray_response(tx, e.theta_t, e.phi_t, lambda),
                ));
            }
        }
    }
    let (nat, nar) = (tx.na(), rx.na());
    let kt = tx.k();
    let entries = build_columns(rx.n(), tx.n(), |l| {
        let (k_t, lt) = (l / nat, l % nat);
        Ok((0..rx.n())
            .map(|i| {
                let (k_r, ir) = (i / nar, i % nar);
                let base = (k_r * kt + k_t) * np;
                let mut acc = C64::new(0.0, 0.0);
                for (g, ar, at) in &terms[base..base + np] {
                    acc += *g * (ar[ir] * at[lt]);
                }
                acc
            })
            .collect())
    })?;
    ChannelMatrix::new(entries, ModelKind::Hspm, String::new())
}
