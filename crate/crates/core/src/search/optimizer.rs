//! Box-constrained quasi-Newton descent.
//!
//! BFGS on the free variables with an active set, projected search path and
//! Armijo backtracking. Every accepted step strictly decreases the objective.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub max_iterations: usize,
    /// Max-norm of the projected gradient at which the search stops.
    pub gradient_tolerance: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tolerance: 1e-8,
            armijo: 1e-4,
            max_backtracks: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Projected gradient below tolerance, or no further decrease possible at
    /// machine precision.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonFinite;

/// `x ↦ (f, ∇f)`.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> (f64, Vec<f64>);
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> Objective for F {
    fn evaluate(&mut self, x: &[f64]) -> (f64, Vec<f64>) {
        self(x)
    }
}

fn project(x: &mut DVector<f64>, lower: &[f64], upper: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lower[i], upper[i]);
    }
}

/// Variables pinned at a bound with the gradient pushing outward.
fn active_set(x: &DVector<f64>, g: &DVector<f64>, lower: &[f64], upper: &[f64]) -> Vec<bool> {
    (0..x.len())
        .map(|i| (x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0))
        .collect()
}

fn projected_gradient_norm(g: &DVector<f64>, active: &[bool]) -> f64 {
    g.iter()
        .zip(active)
        .filter(|(_, &a)| !a)
        .fold(0.0, |m, (v, _)| m.max(v.abs()))
}

fn eval(f: &mut impl Objective, x: &DVector<f64>) -> Result<(f64, DVector<f64>), NonFinite> {
    let (v, g) = f.evaluate(x.as_slice());
    if !v.is_finite() || g.iter().any(|d| !d.is_finite()) {
        return Err(NonFinite);
    }
    Ok((v, DVector::from_vec(g)))
}

/// Minimises `f` over the box `[lower, upper]` starting from `x0` (clamped
/// into the box). Fails if the objective or its gradient ever becomes
/// non-finite.
pub fn minimize(
    mut f: impl Objective,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: Options,
) -> Result<Minimum, NonFinite> {
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bound length mismatch");
    let mut x = DVector::from_column_slice(x0);
    project(&mut x, lower, upper);
    let (mut fx, mut g) = eval(&mut f, &x)?;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;

    for iter in 0..opts.max_iterations {
        let active = active_set(&x, &g, lower, upper);
        if projected_gradient_norm(&g, &active) < opts.gradient_tolerance {
            return Ok(Minimum {
                x: x.as_slice().to_vec(),
                value: fx,
                iterations: iter,
                converged: true,
            });
        }

        // quasi-Newton step restricted to the free variables
        let mut g_free = g.clone();
        for (i, &a) in active.iter().enumerate() {
            if a {
                g_free[i] = 0.0;
            }
        }
        let mut d = -(&h * &g_free);
        for (i, &a) in active.iter().enumerate() {
            if a {
                d[i] = 0.0;
            }
        }
        if d.dot(&g_free) >= 0.0 {
            h.fill_with_identity();
            fresh = true;
            d = -g_free.clone();
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let mut trial = &x + step * &d;
            project(&mut trial, lower, upper);
            let s = &trial - &x;
            if s.amax() == 0.0 {
                break;
            }
            let (ft, gt) = eval(&mut f, &trial)?;
            if ft < fx && ft <= fx + opts.armijo * g.dot(&s) {
                accepted = Some((trial, s, ft, gt));
                break;
            }
            step *= 0.5;
        }

        let Some((trial, s, ft, gt)) = accepted else {
            if !fresh {
                // stale curvature: retry once along steepest descent
                h.fill_with_identity();
                fresh = true;
                continue;
            }
            return Ok(Minimum {
                x: x.as_slice().to_vec(),
                value: fx,
                iterations: iter,
                converged: true,
            });
        };

        let y = &gt - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if fresh {
                h *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H ← (I - ρsyᵀ) H (I - ρysᵀ) + ρssᵀ, expanded
            h += (rho * rho * yhy + rho) * (&s * s.transpose())
                - rho * (&hy * s.transpose() + &s * hy.transpose());
            fresh = false;
        }
        x = trial;
        fx = ft;
        g = gt;
    }

    let active = active_set(&x, &g, lower, upper);
    Ok(Minimum {
        converged: projected_gradient_norm(&g, &active) < opts.gradient_tolerance,
        x: x.as_slice().to_vec(),
        value: fx,
        iterations: opts.max_iterations,
    })
}
