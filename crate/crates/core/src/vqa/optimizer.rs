use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Why a minimization stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub termination: Termination,
}

/// Derivative-free local minimizer. The objective may fail; the optimizer
/// then stops with [`Termination::Failed`] and reports the best point so far.
pub trait Optimizer {
    fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> Result<f64>, x0: &[f64]) -> Minimum;
}

/// Nelder-Mead simplex with dimension-adapted coefficients. Stops when the
/// simplex diameter drops below `tolerance` or after `max_evals` objective
/// calls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMead {
    pub initial_step: f64,
    pub tolerance: f64,
    pub max_evals: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            initial_step: 0.5,
            tolerance: 1e-4,
            max_evals: 500,
        }
    }
}

struct Budget<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    used: usize,
    max: usize,
    best: Option<(Vec<f64>, f64)>,
}

enum Stop {
    Budget,
    Failed(String),
}

impl Budget<'_> {
    fn eval(&mut self, x: &[f64]) -> std::result::Result<f64, Stop> {
        if self.used >= self.max {
            return Err(Stop::Budget);
        }
        self.used += 1;
        let v = (self.f)(x).map_err(|e| Stop::Failed(e.to_string()))?;
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Ok(v)
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let x0 = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| x.iter().zip(x0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
}

impl NelderMead {
    fn run(&self, budget: &mut Budget, x0: &[f64]) -> std::result::Result<(), Stop> {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (
            1.0,
            1.0 + 2.0 / nf,
            0.75 - 1.0 / (2.0 * nf),
            1.0 - 1.0 / nf.max(2.0),
        );
        let mut simplex = vec![(x0.to_vec(), budget.eval(x0)?)];
        for k in 0..n {
            let mut x = x0.to_vec();
            x[k] += self.initial_step;
            let v = budget.eval(&x)?;
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if diameter(&simplex) < self.tolerance {
                return Ok(());
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let (worst, f_worst) = simplex[n].clone();
            let (f_best, f_second) = (simplex[0].1, simplex[n - 1].1);
            let xr = lerp(&centroid, &worst, -alpha);
            let fr = budget.eval(&xr)?;
            if fr < f_best {
                let xe = lerp(&centroid, &worst, -beta);
                let fe = budget.eval(&xe)?;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < f_second {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < f_worst {
                let xc = lerp(&centroid, &xr, gamma);
                let fc = budget.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &worst, gamma);
                let fc = budget.eval(&xc)?;
                (xc, fc)
            };
            if fc < fr.min(f_worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                v.0 = lerp(&x_best, &v.0, delta);
                v.1 = budget.eval(&v.0)?;
            }
        }
    }
}

impl Optimizer for NelderMead {
    fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> Result<f64>, x0: &[f64]) -> Minimum {
        let mut budget = Budget {
            f,
            used: 0,
            max: self.max_evals,
            best: None,
        };
        let termination = match self.run(&mut budget, x0) {
            Ok(()) => Termination::Converged,
            Err(Stop::Budget) => Termination::MaxIterations,
            Err(Stop::Failed(why)) => Termination::Failed(why),
        };
        let (x, value) = budget.best.unwrap_or_else(|| (x0.to_vec(), f64::NAN));
        Minimum {
            x,
            value,
            evaluations: budget.used,
            termination,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn finds_a_quadratic_minimum() {
        let nm = NelderMead { max_evals: 2000, ..Default::default() };
        let mut f = |x: &[f64]| -> Result<f64> {
            Ok(x.iter().enumerate().map(|(k, v)| (k as f64 + 1.0) * (v - 0.3 * k as f64).powi(2)).sum())
        };
        let m = nm.minimize(&mut f, &[1.0; 4]);
        assert_eq!(m.termination, Termination::Converged);
        for (k, v) in m.x.iter().enumerate() {
            assert!((v - 0.3 * k as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead { max_evals: 5000, tolerance: 1e-8, initial_step: 0.5 };
        let mut f = |x: &[f64]| -> Result<f64> { Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)) };
        let m = nm.minimize(&mut f, &[-1.2, 1.0]);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn stops_on_budget_and_failure() {
        let nm = NelderMead { max_evals: 7, ..Default::default() };
        let mut calls = 0;
        let mut f = |x: &[f64]| -> Result<f64> {
            calls += 1;
            Ok(x[0].sin())
        };
        let m = nm.minimize(&mut f, &[0.0, 0.0, 0.0]);
        assert_eq!(m.termination, Termination::MaxIterations);
        assert_eq!(m.evaluations, 7);
        assert_eq!(calls, 7);

        let mut n = 0;
        let mut g = |_: &[f64]| -> Result<f64> {
            n += 1;
            if n > 2 { Err(Error::Config("boom".into())) } else { Ok(n as f64) }
        };
        let m = NelderMead::default().minimize(&mut g, &[0.0, 0.0]);
        assert!(matches!(m.termination, Termination::Failed(ref s) if s.contains("boom")));
        assert_eq!(m.value, 1.0);
    }
}
