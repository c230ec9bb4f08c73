use nalgebra::Matrix3;

use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Stop once the residual norm is at or below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried when a full step does not reduce the residual.
    pub max_halvings: usize,
    /// Jacobians with a larger condition estimate are rejected.
    pub max_condition: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            max_halvings: 10,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonResult {
    pub x: Vec3,
    pub iterations: usize,
    pub residual: f64,
}

/// Central differences with step `1e-7 (1 + |x_i|)`.
fn fd_jacobian(f: &dyn Fn(&Vec3) -> Vec3, x: &Vec3) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for c in 0..3 {
        let h = 1e-7 * (1.0 + x[c].abs());
        let mut xp = *x;
        let mut xm = *x;
        xp[c] += h;
        xm[c] -= h;
        j.set_column(c, &((f(&xp) - f(&xm)) / (2.0 * h)));
    }
    j
}

/// Damped Newton iteration for a 3x3 system. Uses `jacobian` when given,
/// central finite differences otherwise.
pub fn newton_solve(
    residual: &dyn Fn(&Vec3) -> Vec3,
    jacobian: Option<&dyn Fn(&Vec3) -> Matrix3<f64>>,
    init: Vec3,
    cfg: &NewtonConfig,
) -> Result<NewtonResult> {
    if !(cfg.tol > 0.0) {
        return Err(Error::invalid("newton tolerance must be positive"));
    }
    let mut x = init;
    let mut f = residual(&x);
    let mut norm = f.norm();
    if !norm.is_finite() {
        return Err(Error::Numerical("residual is not finite at the initial point".into()));
    }
    if norm <= cfg.tol {
        return Ok(NewtonResult {
            x,
            iterations: 0,
            residual: norm,
        });
    }
    for it in 1..=cfg.max_iter {
        let j = match jacobian {
            Some(jf) => jf(&x),
            None => fd_jacobian(residual, &x),
        };
        let sv = j.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || smax / smin > cfg.max_condition {
            return Err(Error::SingularSystem {
                condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
            });
        }
        let step = j
            .lu()
            .solve(&f)
            .ok_or(Error::SingularSystem { condition: f64::INFINITY })?;
        let mut scale = 1.0;
        let mut trial = x - step;
        let mut ft = residual(&trial);
        let mut halvings = 0;
        while !(ft.norm() < norm) && halvings < cfg.max_halvings {
            scale *= 0.5;
            trial = x - step * scale;
            ft = residual(&trial);
            halvings += 1;
        }
        x = trial;
        f = ft;
        norm = f.norm();
        if !norm.is_finite() {
            return Err(Error::Numerical(format!("residual became non-finite at iteration {it}")));
        }
        if norm <= cfg.tol {
            return Ok(NewtonResult {
                x,
                iterations: it,
                residual: norm,
            });
        }
    }
    Err(Error::Convergence {
        iterations: cfg.max_iter,
        residual: norm,
    })
}
