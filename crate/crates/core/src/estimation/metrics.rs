use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_azimuth, PathParams};
use crate::{ratio_db, CMatrix, Error, Result};

use super::ReferenceParamsEstimate;

/// `20 log10(|H_hat - H|_F / |H|_F)`, floored at -300 dB.
pub fn nmse_db(h_hat: &CMatrix, h: &CMatrix) -> Result<f64> {
    if h_hat.shape() != h.shape() {
        return Err(Error::invalid(format!(
            "dimension mismatch {:?} vs {:?}",
            h_hat.shape(),
            h.shape()
        )));
    }
    let den = h.norm();
    if den == 0.0 {
        return Err(Error::invalid("true channel has zero norm"));
    }
    Ok(ratio_db((h_hat - h).norm(), den))
}

/// Normalized parameter errors in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamErrors {
    pub angle_db: f64,
    pub dist_db: f64,
    pub gain_db: f64,
}

fn angle_diff(a: &PathParams, b: &PathParams) -> [f64; 4] {
    [
        wrap_azimuth(a.theta_r - b.theta_r),
        a.phi_r - b.phi_r,
        wrap_azimuth(a.theta_t - b.theta_t),
        a.phi_t - b.phi_t,
    ]
}

fn angle_cost(a: &PathParams, b: &PathParams) -> f64 {
    angle_diff(a, b).iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Exhaustive minimum-total-angle-error assignment with pruning.
fn best_assignment(est: &[PathParams], truth: &[PathParams]) -> Vec<usize> {
    let n = est.len();
    let cost: Vec<Vec<f64>> = est
        .iter()
        .map(|e| truth.iter().map(|t| angle_cost(e, t)).collect())
        .collect();
    let mut best = (f64::INFINITY, (0..n).collect::<Vec<_>>());
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(
        i: usize,
        acc: f64,
        cost: &[Vec<f64>],
        cur: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut (f64, Vec<usize>),
    ) {
        if acc >= best.0 {
            return;
        }
        if i == cost.len() {
            *best = (acc, cur.clone());
            return;
        }
        for j in 0..cost.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(i + 1, acc + cost[i][j], cost, cur, used, best);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(0, 0.0, &cost, &mut cur, &mut used, &mut best);
    best.1
}

/// Angle, distance and amplitude errors after matching estimated paths to
/// true ones. The angle vector stacks `[theta_r, phi_r, theta_t, phi_t]`
/// per path.
pub fn param_errors(est: &ReferenceParamsEstimate, truth: &ReferenceParamsEstimate) -> Result<ParamErrors> {
    if est.paths.len() != truth.paths.len() {
        return Err(Error::invalid(format!(
            "path count mismatch: {} estimated, {} true",
            est.paths.len(),
            truth.paths.len()
        )));
    }
    let assign = best_assignment(&est.paths, &truth.paths);
    let (mut da, mut na, mut dd, mut nd, mut dg, mut ng) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (e, &j) in est.paths.iter().zip(&assign) {
        let t = &truth.paths[j];
        da += angle_diff(e, t).iter().map(|x| x * x).sum::<f64>();
        na += [t.theta_r, t.phi_r, t.theta_t, t.phi_t].iter().map(|x| x * x).sum::<f64>();
        dd += (e.dist - t.dist).powi(2);
        nd += t.dist * t.dist;
        dg += (e.amp - t.amp).powi(2);
        ng += t.amp * t.amp;
    }
    Ok(ParamErrors {
        angle_db: ratio_db(da.sqrt(), na.sqrt()),
        dist_db: ratio_db(dd.sqrt(), nd.sqrt()),
        gain_db: ratio_db(dg.sqrt(), ng.sqrt()),
    })
}
