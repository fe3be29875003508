//! Oblique oblimin rotation by gradient projection.
//!
//! T has unit-length columns and the rotated coordinates are `L = A·T^{-T}`.
//! The oblimin criterion with weight γ over a P x d matrix L is
//!
//! ```text
//! f(L) = ¼ Σ (L∘L) ∘ ((I - γ/P·11ᵀ)(L∘L)N),   N = 11ᵀ - I
//! ```
//!
//! which for γ = 0 (quartimin) penalizes every row having weight on more
//! than one axis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObliminConfig {
    pub gamma: f64,
    /// Stop once the projected gradient norm falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ObliminConfig {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            tolerance: 1e-6,
            max_iterations: 1000,
        }
    }
}

/// The oblique rotation (the matrix T); coordinates transform as `A·T^{-T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    pub t: DMatrix<f64>,
}

impl RotationMatrix {
    pub fn identity(d: usize) -> Self {
        Self {
            t: DMatrix::identity(d, d),
        }
    }

    /// The matrix that right-multiplies coordinates: T^{-T}.
    pub fn coordinate_map(&self) -> Result<DMatrix<f64>> {
        self.t
            .clone()
            .try_inverse()
            .map(|inv| inv.transpose())
            .ok_or_else(|| Error::Numerical("oblique rotation matrix is singular".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObliminResult {
    pub rotated: DMatrix<f64>,
    pub rotation: RotationMatrix,
    pub converged: bool,
    pub iterations: usize,
    /// Criterion value at the start and after every accepted step.
    pub criterion_trace: Vec<f64>,
}

/// Oblimin criterion value and its gradient with respect to L.
pub fn oblimin_criterion(l: &DMatrix<f64>, gamma: f64) -> (f64, DMatrix<f64>) {
    let (p, d) = l.shape();
    let l2 = l.component_mul(l);
    let off = DMatrix::from_fn(d, d, |a, b| if a == b { 0.0 } else { 1.0 });
    let mut x = &l2 * off;
    if gamma != 0.0 {
        let col_means = DMatrix::from_fn(1, d, |_, c| x.column(c).sum() / p as f64);
        for r in 0..p {
            for c in 0..d {
                x[(r, c)] -= gamma * col_means[(0, c)];
            }
        }
    }
    let f = l2.component_mul(&x).sum() / 4.0;
    (f, l.component_mul(&x))
}

fn loadings(a: &DMatrix<f64>, t: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let inv = t.clone().try_inverse()?;
    Some((a * inv.transpose(), inv))
}

/// Gradient of f(A·T^{-T}) with respect to T.
fn gradient_t(l: &DMatrix<f64>, gq: &DMatrix<f64>, t_inv: &DMatrix<f64>) -> DMatrix<f64> {
    -(l.transpose() * gq * t_inv).transpose()
}

const MAX_FLAT_STEPS: usize = 10;

/// Rotate `a` (rows = points, columns = axes) to oblimin simple structure.
pub fn oblimin_rotate(a: &DMatrix<f64>, cfg: &ObliminConfig) -> Result<ObliminResult> {
    let (p, d) = a.shape();
    if d < 2 {
        return Err(Error::Input("oblimin rotation needs at least 2 dimensions".into()));
    }
    if p < d || a.rank(1e-12) < d {
        return Err(Error::Input(format!(
            "oblimin rotation needs {d} non-collinear rows"
        )));
    }

    let mut t = DMatrix::<f64>::identity(d, d);
    let (mut l, mut t_inv) = loadings(a, &t).expect("identity is invertible");
    let (mut f, mut gq) = oblimin_criterion(&l, cfg.gamma);
    let mut g = gradient_t(&l, &gq, &t_inv);
    let mut trace = vec![f];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut flat_steps = 0;

    while iterations <= cfg.max_iterations {
        // project onto the tangent space of the unit-column constraint
        let col_dots = DMatrix::from_fn(1, d, |_, c| t.column(c).dot(&g.column(c)));
        let mut gp = g.clone();
        for c in 0..d {
            for r in 0..d {
                gp[(r, c)] -= t[(r, c)] * col_dots[(0, c)];
            }
        }
        let s = gp.norm();
        if s < cfg.tolerance {
            converged = true;
            break;
        }
        if iterations == cfg.max_iterations {
            break;
        }
        iterations += 1;

        step *= 2.0;
        let mut accepted = None;
        for _ in 0..=10 {
            let mut cand = &t - step * &gp;
            for mut col in cand.column_iter_mut() {
                let n = col.norm();
                col /= n;
            }
            if let Some((lc, inv_c)) = loadings(a, &cand) {
                let (fc, gqc) = oblimin_criterion(&lc, cfg.gamma);
                if f - fc > 0.5 * s * s * step {
                    accepted = Some((cand, lc, inv_c, fc, gqc));
                    break;
                }
                if fc <= f && accepted.is_none() {
                    // remember a non-increasing fallback in case the Armijo test never passes
                    accepted = Some((cand, lc, inv_c, fc, gqc));
                    step /= 2.0;
                    continue;
                }
            }
            step /= 2.0;
        }
        let Some((tc, lc, inv_c, fc, gqc)) = accepted else {
            break;
        };
        // flat steps only: stalled at floating-point resolution
        flat_steps = if fc < f { 0 } else { flat_steps + 1 };
        if flat_steps > MAX_FLAT_STEPS {
            break;
        }
        debug_assert!(fc <= f);
        t = tc;
        l = lc;
        t_inv = inv_c;
        f = fc;
        gq = gqc;
        g = gradient_t(&l, &gq, &t_inv);
        trace.push(f);
    }

    if !converged {
        log::warn!("oblimin rotation stopped after {iterations} iterations without converging");
    }
    Ok(ObliminResult {
        rotated: l,
        rotation: RotationMatrix { t },
        converged,
        iterations,
        criterion_trace: trace,
    })
}
