//! Derivative-free search over Markov measures.
//!
//! Each row of the transition matrix is parameterized by unconstrained
//! logits on its allowed successors (the first successor is pinned at 0),
//! mapped through a softmax. A seeded multi-start Nelder–Mead maximizes an
//! arbitrary objective of the resulting measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::markov::MarkovMeasure;
use crate::scalar::Scalar;
use crate::sft::Sft;

/// Logits are clamped to this magnitude so that every allowed transition
/// keeps positive probability and the stationary vector stays unique.
const LOGIT_BOUND: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { restarts: 20, max_iter: 2000, tol: 1e-9, seed: 0 }
    }
}

impl OptimizeOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeResult<S> {
    pub measure: MarkovMeasure<S>,
    pub value: S,
    /// Objective spread over the final simplex of the winning run.
    pub residual: S,
    pub evaluations: usize,
    pub parameters: Vec<S>,
}

#[derive(Debug, Clone)]
struct Simplex<S> {
    best: Vec<S>,
    value: S,
    spread: S,
    evaluations: usize,
}

/// Minimizes `f` from `x0` with the textbook Nelder–Mead coefficients.
fn nelder_mead<S: Scalar>(
    f: &mut impl FnMut(&[S]) -> Result<S>,
    x0: &[S],
    step: S,
    max_iter: usize,
    tol: S,
) -> Result<Simplex<S>> {
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[S], evaluations: &mut usize| -> Result<S> {
        *evaluations += 1;
        f(x)
    };
    let mut pts: Vec<Vec<S>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals = pts.iter().map(|p| eval(p, &mut evaluations)).collect::<Result<Vec<_>>>()?;
    let (alpha, gamma, rho, sigma) = (S::one(), S::lit(2.0), S::lit(0.5), S::lit(0.5));
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite objective").then(a.cmp(&b)));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = vals[n] - vals[0];
        let size = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(&a, &b)| (a - b).abs()))
            .fold(S::zero(), S::max);
        if spread <= tol && size <= tol.sqrt() {
            break;
        }
        let centroid: Vec<S> = (0..n)
            .map(|j| pts[..n].iter().map(|p| p[j]).sum::<S>() / S::from_usize_lossy(n))
            .collect();
        let along = |t: S| -> Vec<S> {
            centroid.iter().zip(&pts[n]).map(|(&c, &w)| c + t * (c - w)).collect()
        };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evaluations)?;
        if fr < vals[0] {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evaluations)?;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(rho * alpha);
                let fc = eval(&xc, &mut evaluations)?;
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(&xc, &mut evaluations)?;
                (xc, fc)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<S> = pts[0].iter().zip(&pts[i]).map(|(&b, &p)| b + sigma * (p - b)).collect();
                    vals[i] = eval(&shrunk, &mut evaluations)?;
                    pts[i] = shrunk;
                }
            }
        }
    }
    let (best_i, _) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite").then(a.0.cmp(&b.0)))
        .expect("non-empty simplex");
    let hi = vals.iter().copied().fold(S::neg_infinity(), S::max);
    Ok(Simplex { best: pts[best_i].clone(), value: vals[best_i], spread: hi - vals[best_i], evaluations })
}

/// Maps row logits to Markov measures on a fixed shift.
#[derive(Debug, Clone)]
pub struct LogitChart {
    sft: Sft,
    successors: Vec<Vec<usize>>,
    dim: usize,
}

impl LogitChart {
    pub fn new(sft: &Sft) -> Result<Self> {
        if !sft.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let successors: Vec<Vec<usize>> = (0..sft.alphabet_size()).map(|i| sft.successors(i).collect()).collect();
        let dim = successors.iter().map(|s| s.len() - 1).sum();
        Ok(Self { sft: sft.clone(), successors, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measure<S: Scalar>(&self, params: &[S]) -> Result<MarkovMeasure<S>> {
        let k = self.sft.alphabet_size();
        let bound = S::lit(LOGIT_BOUND);
        let mut transition = SquareMatrix::zeros(k);
        let mut offset = 0;
        for (i, succ) in self.successors.iter().enumerate() {
            let mut logits = Vec::with_capacity(succ.len());
            logits.push(S::zero());
            for &p in &params[offset..offset + succ.len() - 1] {
                logits.push(p.max(-bound).min(bound));
            }
            offset += succ.len() - 1;
            let max = logits.iter().copied().fold(S::neg_infinity(), S::max);
            let weights: Vec<S> = logits.iter().map(|&l| (l - max).exp()).collect();
            let total: S = weights.iter().copied().sum();
            for (&j, w) in succ.iter().zip(weights) {
                transition[(i, j)] = w / total;
            }
        }
        MarkovMeasure::new(&self.sft, transition)
    }
}

/// Maximizes `objective` over Markov measures on `sft` by multi-start
/// Nelder–Mead. Restart 0 starts at the all-zero logits; later restarts draw
/// logits uniformly from `[-2, 2]` with a seeded ChaCha8 generator. Each run
/// is polished by one more Nelder–Mead pass from its best vertex. Ties are
/// broken by the lexicographically smallest parameter vector.
pub fn optimize_markov<S: Scalar>(
    sft: &Sft,
    mut objective: impl FnMut(&MarkovMeasure<S>) -> S,
    options: OptimizeOptions,
) -> Result<OptimizeResult<S>> {
    if options.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let chart = LogitChart::new(sft)?;
    let mut neg = |x: &[S]| -> Result<S> {
        let m = chart.measure(x)?;
        let v = objective(&m);
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        Ok(-v)
    };
    let dim = chart.dim();
    if dim == 0 {
        let value = -neg(&[])?;
        return Ok(OptimizeResult {
            measure: chart.measure(&[])?,
            value,
            residual: S::zero(),
            evaluations: 1,
            parameters: Vec::new(),
        });
    }
    let tol = S::tol(options.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut evaluations = 0usize;
    let mut best: Option<Simplex<S>> = None;
    for restart in 0..options.restarts {
        let x0: Vec<S> = if restart == 0 {
            vec![S::zero(); dim]
        } else {
            (0..dim).map(|_| S::lit(rng.gen_range(-2.0..=2.0))).collect()
        };
        let first = nelder_mead(&mut neg, &x0, S::one(), options.max_iter, tol)?;
        let polished = nelder_mead(&mut neg, &first.best, S::lit(0.05), options.max_iter, tol)?;
        evaluations += first.evaluations + polished.evaluations;
        let run = if polished.value <= first.value { polished } else { first };
        let better = match &best {
            None => true,
            Some(b) => run.value < b.value || (run.value == b.value && run.best < b.best),
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(OptimizeResult {
        measure: chart.measure(&best.best)?,
        value: -best.value,
        residual: best.spread,
        evaluations,
        parameters: best.best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Potential};

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let mut f = |x: &[f64]| Ok((x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2));
        let s = nelder_mead(&mut f, &[0.0, 0.0], 1.0, 2000, 1e-12).unwrap();
        assert!((s.best[0] - 1.0).abs() < 1e-5 && (s.best[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn entropy_maximum_on_full_shift() {
        let r = optimize_markov(&fixtures::full2(), |m: &MarkovMeasure<f64>| m.entropy(), OptimizeOptions::default())
            .unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn entropy_maximum_on_golden_shift() {
        let r = optimize_markov(&fixtures::golden(), |m: &MarkovMeasure<f64>| m.entropy(), OptimizeOptions::default())
            .unwrap();
        let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((r.value - golden).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn free_energy_on_full_shift() {
        let full = fixtures::full2();
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let r = optimize_markov(&full, |m: &MarkovMeasure<f64>| m.entropy() + m.integrate(&phi).unwrap(), OptimizeOptions::default())
            .unwrap();
        let expected = (1.0 + std::f64::consts::E).ln();
        assert!((r.value - expected).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn deterministic_given_seed() {
        let golden = fixtures::golden();
        let phi = Potential::symbolwise(&golden, &[0.3, -0.2], "phi").unwrap();
        let obj = |m: &MarkovMeasure<f64>| m.entropy() + m.integrate(&phi).unwrap();
        let a = optimize_markov(&golden, obj, OptimizeOptions::with_seed(7)).unwrap();
        let b = optimize_markov(&golden, obj, OptimizeOptions::with_seed(7)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.parameters, b.parameters);
    }

    #[test]
    fn non_finite_objective_is_reported() {
        let r = optimize_markov(&fixtures::full2(), |_: &MarkovMeasure<f64>| f64::NAN, OptimizeOptions::default());
        assert_eq!(r.unwrap_err(), Error::NonFiniteObjective);
    }

    #[test]
    fn single_measure_shift_needs_no_search() {
        let r = optimize_markov(&fixtures::cycle2(), |m: &MarkovMeasure<f64>| m.entropy(), OptimizeOptions::default())
            .unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 1);
    }
}
