//! Derivative-free multi-start maximisation of nonnegative objectives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::OptimizerConfig;

/// Stand-in for `-ln(0)` so the simplex can move off a zero plateau.
const ZERO_PENALTY: f64 = 1.0e3;
const POLISH_ROUNDS: usize = 4;

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Adaptive Nelder-Mead minimisation from `x0` with an axis-aligned initial
/// simplex of edge `step`. Stops once the spread of function values across
/// the simplex falls below `ftol * (1 + |f_best|)`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], step: f64, max_iters: usize, ftol: f64) -> SimplexOutcome {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut order: Vec<usize> = (0..=n).collect();

    let mut iters = 0;
    let mut converged = false;
    while iters < max_iters {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if values[worst] - values[best] <= ftol * (1.0 + values[best].abs()) {
            converged = true;
            break;
        }
        iters += 1;

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(alpha);
        let fr = f(&xr);
        if fr < values[best] {
            let xe = along(alpha * gamma);
            let fe = f(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = along(alpha * rho);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < fr.min(values[worst]) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                *x = a + sigma * (*x - a);
            }
            values[i] = f(&simplex[i]);
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexOutcome { x: simplex[best].clone(), f: values[best], iters, converged }
}

#[derive(Debug, Clone)]
pub struct MultiStartResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub restarts_converged: usize,
}

/// Maximises a nonnegative `objective` over `R^dim` from `cfg.restarts`
/// uniformly drawn starting points in `[0, 2 pi)^dim`.
///
/// Each run minimises `-ln(objective)` and is re-seeded from its own optimum
/// with a fresh simplex until it stops improving. The best run wins, ties
/// going to the lowest restart index, so the result does not depend on how
/// the restarts are scheduled.
pub fn maximize<F>(objective: F, dim: usize, cfg: &OptimizerConfig) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let neg_log = |x: &[f64]| {
        let v = objective(x);
        if v > 0.0 {
            -v.ln()
        } else {
            ZERO_PENALTY
        }
    };
    let runs: Vec<SimplexOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let x0: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            let mut run = nelder_mead(&neg_log, &x0, 0.6, cfg.max_iters, cfg.objective_tol);
            let mut step = 0.2;
            for _ in 0..POLISH_ROUNDS {
                let next = nelder_mead(&neg_log, &run.x, step, cfg.max_iters, cfg.objective_tol);
                let gain = run.f - next.f;
                let converged = next.converged;
                if next.f <= run.f {
                    run = SimplexOutcome { converged, ..next };
                }
                if gain <= cfg.objective_tol * (1.0 + run.f.abs()) {
                    break;
                }
                step *= 0.5;
            }
            run
        })
        .collect();

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.f < runs[best].f {
            best = i;
        }
    }
    let value = if runs[best].f >= ZERO_PENALTY { 0.0 } else { objective(&runs[best].x) };
    MultiStartResult {
        x: runs[best].x.clone(),
        value,
        restarts_converged: runs.iter().filter(|r| r.converged).count(),
    }
}
