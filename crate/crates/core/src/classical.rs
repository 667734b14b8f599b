//! Classical topological pressure of locally constant potentials.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{gth_stationary, perron_right, SquareMatrix, PERRON_MAX_ITER};
use crate::markov::MarkovMeasure;
use crate::potential::LocallyConstantPotential;
use crate::recode::to_range_one;
use crate::scalar::Scalar;
use crate::sft::Sft;
use crate::walk::cylinder_log_sum;

/// Relative tolerance on the Perron root.
pub const SPECTRAL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Spectral,
    Cylinder,
    Root,
    DirectInduced,
    NonlinearDirect,
    Variational,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Spectral => "spectral",
            Method::Cylinder => "cylinder",
            Method::Root => "root",
            Method::DirectInduced => "direct_induced",
            Method::NonlinearDirect => "nonlinear_direct",
            Method::Variational => "variational",
        };
        f.write_str(s)
    }
}

/// Convergence bookkeeping attached to every computed pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<S> {
    /// Iterations (power iteration, bisection steps) or the word length `n`.
    pub iterations: usize,
    pub residual: S,
    /// Number of words or cylinders summed, when the method enumerates.
    pub words: usize,
    pub bracket: Option<(S, S)>,
    /// Some exponent exceeded 700; the value is still exact through log-sum-exp.
    pub overflow: bool,
    /// Cylinders only partly inside the counted region (definitional
    /// estimators with a shallow depth).
    pub split_cylinders: usize,
    pub notes: Vec<String>,
}

impl<S: Scalar> Diagnostics<S> {
    pub(crate) fn new(iterations: usize, residual: S) -> Self {
        Self { iterations, residual, words: 0, bracket: None, overflow: false, split_cylinders: 0, notes: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureResult<S> {
    pub value: S,
    pub method: Method,
    pub diagnostics: Diagnostics<S>,
}

/// Transfer matrix `M_ij = A_ij exp(phi(i) - max phi)` and the shift `max phi`.
fn transfer_matrix<S: Scalar>(sft: &Sft, phi: &LocallyConstantPotential<S>) -> Result<(SquareMatrix<S>, S)> {
    if phi.range() != 1 {
        return Err(Error::RangeMismatch(format!(
            "spectral methods need a range-1 potential, got range {}; recode first",
            phi.range()
        )));
    }
    if phi.alphabet_size() != sft.alphabet_size() {
        return Err(Error::RangeMismatch("potential alphabet differs from shift".into()));
    }
    let shift = phi.max_value();
    let weights: Vec<S> = (0..sft.alphabet_size())
        .map(|i| (phi.value(&[i]).expect("range-1 potential defined on every symbol") - shift).exp())
        .collect();
    let m = SquareMatrix::from_fn(sft.alphabet_size(), |i, j| {
        if sft.allowed(i, j) {
            weights[i]
        } else {
            S::zero()
        }
    });
    Ok((m, shift))
}

/// `log rho(M)` with `M_ij = A_ij e^phi(i)`, by power iteration.
pub fn spectral_pressure<S: Scalar>(sft: &Sft, phi: &LocallyConstantPotential<S>) -> Result<PressureResult<S>> {
    if !sft.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let (m, shift) = transfer_matrix(sft, phi)?;
    let perron = perron_right(&m, S::tol(SPECTRAL_TOL), PERRON_MAX_ITER)?;
    Ok(PressureResult {
        value: perron.value.ln() + shift,
        method: Method::Spectral,
        diagnostics: Diagnostics::new(perron.iterations, perron.residual),
    })
}

/// Spectral pressure of a potential of any range, recoding to range 1 first.
pub fn topological_pressure<S: Scalar>(sft: &Sft, phi: &LocallyConstantPotential<S>) -> Result<S> {
    if phi.range() == 1 {
        return Ok(spectral_pressure(sft, phi)?.value);
    }
    let r = to_range_one(sft, &[phi])?;
    Ok(spectral_pressure(&r.sft, &r.potentials[0])?.value)
}

/// `(1/n) ln sum exp(S_n phi)` over admissible `(n + r - 1)`-words.
pub fn cylinder_pressure_estimate<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    n: usize,
) -> Result<PressureResult<S>> {
    if n == 0 || n < phi.range() {
        return Err(Error::InvalidArgument(format!(
            "word count n = {n} must be at least the potential range {}",
            phi.range()
        )));
    }
    let (lse, words, max) = cylinder_log_sum(sft, &[phi], n, |s| s[0])?;
    let mut diagnostics = Diagnostics::new(n, S::zero());
    diagnostics.words = words;
    diagnostics.overflow = max > S::lit(700.0);
    Ok(PressureResult { value: lse / S::from_usize_lossy(n), method: Method::Cylinder, diagnostics })
}

/// The Gibbs (Ruelle–Perron–Frobenius) Markov measure of a range-1 potential,
/// `P_ij = M_ij r_j / (lambda r_i)` with `r` the right Perron vector.
///
/// Works on every irreducible shift; on a period-`p` shift the measure is
/// ergodic rather than mixing.
pub fn rpf_equilibrium<S: Scalar>(sft: &Sft, phi: &LocallyConstantPotential<S>) -> Result<MarkovMeasure<S>> {
    if !sft.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let (m, _) = transfer_matrix(sft, phi)?;
    let perron = perron_right(&m, S::tol(SPECTRAL_TOL), PERRON_MAX_ITER)?;
    let r = &perron.vector;
    let k = sft.alphabet_size();
    let mut p = SquareMatrix::from_fn(k, |i, j| m[(i, j)] * r[j] / (perron.value * r[i]));
    for i in 0..k {
        let total: S = p.row(i).iter().copied().sum();
        for j in 0..k {
            p[(i, j)] /= total;
        }
    }
    let pi = gth_stationary(&p)?;
    MarkovMeasure::with_stationary(sft, p, pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Potential};

    const GOLDEN_LOG: f64 = 0.48121182505960347;

    #[test]
    fn spectral_examples() {
        let full = fixtures::full2();
        let zero = Potential::constant(&full, 0.0, "0");
        assert!((spectral_pressure(&full, &zero).unwrap().value - 2f64.ln()).abs() < 1e-13);
        let golden = fixtures::golden();
        let zero_g = Potential::constant(&golden, 0.0, "0");
        assert!((spectral_pressure(&golden, &zero_g).unwrap().value - GOLDEN_LOG).abs() < 1e-13);
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let expected = (1.0 + std::f64::consts::E).ln();
        assert!((spectral_pressure(&full, &phi).unwrap().value - expected).abs() < 1e-13);
    }

    #[test]
    fn spectral_on_periodic_shift() {
        let cyc = fixtures::cycle2();
        let phi = Potential::symbolwise(&cyc, &[2.0, 0.0], "phi").unwrap();
        // Only one invariant measure: pressure is the average of phi.
        assert!((spectral_pressure(&cyc, &phi).unwrap().value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn spectral_rejects_reducible_and_higher_range() {
        let red = Sft::new(2, &[vec![1, 1], vec![0, 1]]).unwrap();
        let zero = Potential::constant(&red, 0.0, "0");
        assert_eq!(spectral_pressure(&red, &zero).unwrap_err(), Error::NotIrreducible);
        let full = fixtures::full2();
        let two = Potential::from_fn(&full, 2, "two", |w| w[0] as f64 * w[1] as f64).unwrap();
        assert!(matches!(spectral_pressure(&full, &two), Err(Error::RangeMismatch(_))));
        // Pressure of the indicator of "11" on the full shift: log of the
        // Perron root of [[1,1],[1,e]].
        let e = std::f64::consts::E;
        let rho = ((1.0 + e) + ((1.0 - e).powi(2) + 4.0).sqrt()) / 2.0;
        assert!((topological_pressure(&full, &two).unwrap() - rho.ln()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_examples() {
        let full = fixtures::full2();
        let zero = Potential::constant(&full, 0.0, "0");
        let c = cylinder_pressure_estimate(&full, &zero, 10).unwrap();
        assert!((c.value - 2f64.ln()).abs() < 1e-12);
        assert_eq!(c.diagnostics.words, 1024);
        let golden = fixtures::golden();
        let g = cylinder_pressure_estimate(&golden, &Potential::constant(&golden, 0.0, "0"), 10).unwrap();
        // F_12 = 144 words of length 10.
        assert!((g.value - 144f64.ln() / 10.0).abs() < 1e-14);
        assert!((g.value - GOLDEN_LOG).abs() < 0.07);
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let p = cylinder_pressure_estimate(&full, &phi, 12).unwrap();
        assert!((p.value - (1.0 + std::f64::consts::E).ln()).abs() < 1e-12);
    }

    #[test]
    fn cylinder_rejects_short_n() {
        let full = fixtures::full2();
        let two = Potential::from_fn(&full, 2, "two", |_| 0.0).unwrap();
        assert!(cylinder_pressure_estimate(&full, &two, 1).is_err());
    }

    #[test]
    fn rpf_examples() {
        let full = fixtures::full2();
        let mme = rpf_equilibrium(&full, &Potential::constant(&full, 0.0, "0")).unwrap();
        for &p in mme.transition().rows().iter().flatten() {
            assert!((p - 0.5).abs() < 1e-15);
        }
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let mu = rpf_equilibrium(&full, &phi).unwrap();
        let e = std::f64::consts::E;
        assert!((mu.stationary()[0] - e / (1.0 + e)).abs() < 1e-14);
        assert!((mu.transition()[(1, 0)] - 0.7310585786300049).abs() < 1e-14);

        let golden = fixtures::golden();
        let parry = rpf_equilibrium(&golden, &Potential::constant(&golden, 0.0, "0")).unwrap();
        assert!((parry.entropy() - GOLDEN_LOG).abs() < 1e-8);
    }

    #[test]
    fn f32_spectral_pressure_is_close() {
        let full = fixtures::full2();
        let phi = LocallyConstantPotential::<f32>::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let v = spectral_pressure(&full, &phi).unwrap().value;
        assert!((v as f64 - (1.0 + std::f64::consts::E).ln()).abs() < 1e-5);
    }
}
