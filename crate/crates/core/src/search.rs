//! Derivative-free coordinate pattern search.
//!
//! Polls `x +/- step * e_i` for every coordinate, moving to the first
//! improvement. A sweep without improvement halves the step. Stops when the
//! step drops below `tol` (converged) or the evaluation budget runs out.
//! An optional projection is applied to every trial point, which turns the
//! search into a search on the unit sphere when the projection normalizes.

/// Pattern-search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub initial_step: f64,
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { initial_step: 0.25, tol: 1e-7, max_evals: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Scales `x` to unit Euclidean norm.
pub fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// Minimizes `f` from `x0`; see the module docs for the schedule.
pub fn minimize<F>(f: &F, x0: Vec<f64>, opts: &SearchOptions, project: Option<fn(&mut [f64])>) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut x = x0;
    if let Some(p) = project {
        p(&mut x);
    }
    let mut fx = f(&x);
    let mut evaluations = 1;
    let mut step = opts.initial_step;
    let mut trial = x.clone();
    let n = x.len();

    while step >= opts.tol {
        let mut improved = false;
        for i in 0..n {
            for sign in [1.0, -1.0] {
                if evaluations >= opts.max_evals {
                    return SearchOutcome { x, value: fx, evaluations, converged: false };
                }
                trial.copy_from_slice(&x);
                trial[i] += sign * step;
                if let Some(p) = project {
                    p(&mut trial);
                }
                let ft = f(&trial);
                evaluations += 1;
                if ft < fx {
                    std::mem::swap(&mut x, &mut trial);
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    SearchOutcome { x, value: fx, evaluations, converged: true }
}
