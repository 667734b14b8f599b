//! Markov measures on a shift: stationary vectors, entropy and integrals of
//! locally constant potentials.

use crate::error::{Error, Result};
use crate::linalg::{gth_stationary, SquareMatrix};
use crate::potential::LocallyConstantPotential;
use crate::scalar::{xlogx, Scalar};
use crate::sft::{Cycle, Sft, Word};

/// A shift-invariant Markov measure: a stochastic matrix supported on the
/// allowed transitions together with a stationary probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure<S> {
    sft: Sft,
    transition: SquareMatrix<S>,
    stationary: Vec<S>,
}

fn check_transition<S: Scalar>(sft: &Sft, transition: &SquareMatrix<S>) -> Result<()> {
    let k = sft.alphabet_size();
    if transition.dim() != k {
        return Err(Error::InvalidTransition(format!("expected {k}x{k} matrix")));
    }
    let row_tol = S::tol(1e-12);
    for i in 0..k {
        let mut total = S::zero();
        for j in 0..k {
            let p = transition[(i, j)];
            if !(p >= S::zero()) || !p.is_finite() {
                return Err(Error::InvalidTransition(format!("entry ({i},{j}) is {p}")));
            }
            if p > S::zero() && !sft.allowed(i, j) {
                return Err(Error::InvalidTransition(format!(
                    "positive probability on forbidden transition {i}->{j}"
                )));
            }
            total += p;
        }
        if (total - S::one()).abs() > row_tol {
            return Err(Error::InvalidTransition(format!("row {i} sums to {total}")));
        }
    }
    Ok(())
}

fn support_is_irreducible<S: Scalar>(transition: &SquareMatrix<S>) -> bool {
    let k = transition.dim();
    let flags: Vec<bool> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| transition[(i, j)] > S::zero())
        .collect();
    Sft::from_flags(k, flags).map(|s| s.is_irreducible()).unwrap_or(false)
}

/// The unique stationary vector of an irreducible transition matrix whose
/// support lies inside `sft`.
pub fn stationary_distribution<S: Scalar>(transition: &SquareMatrix<S>, sft: &Sft) -> Result<Vec<S>> {
    check_transition(sft, transition)?;
    if !support_is_irreducible(transition) {
        return Err(Error::ReducibleSupport);
    }
    gth_stationary(transition)
}

impl<S: Scalar> MarkovMeasure<S> {
    /// Builds the measure from a transition matrix with irreducible support.
    pub fn new(sft: &Sft, transition: SquareMatrix<S>) -> Result<Self> {
        let stationary = stationary_distribution(&transition, sft)?;
        Ok(Self { sft: sft.clone(), transition, stationary })
    }

    /// Builds the measure from a transition matrix and a given stationary
    /// vector; the support need not be irreducible.
    pub fn with_stationary(sft: &Sft, transition: SquareMatrix<S>, stationary: Vec<S>) -> Result<Self> {
        check_transition(sft, &transition)?;
        if stationary.len() != sft.alphabet_size()
            || stationary.iter().any(|&p| !(p >= S::zero()))
            || (stationary.iter().copied().sum::<S>() - S::one()).abs() > S::tol(1e-12)
        {
            return Err(Error::InvalidTransition("stationary vector is not a probability vector".into()));
        }
        let image = transition.vec_mul(&stationary);
        let residual = image
            .iter()
            .zip(&stationary)
            .map(|(&a, &b)| (a - b).abs())
            .fold(S::zero(), S::max);
        if residual > S::tol(1e-10) {
            return Err(Error::InvalidTransition(format!("stationarity residual {residual}")));
        }
        Ok(Self { sft: sft.clone(), transition, stationary })
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn transition(&self) -> &SquareMatrix<S> {
        &self.transition
    }

    pub fn stationary(&self) -> &[S] {
        &self.stationary
    }

    /// Kolmogorov–Sinai entropy in nats, `-sum_i pi_i sum_j P_ij ln P_ij`.
    pub fn entropy(&self) -> S {
        let k = self.sft.alphabet_size();
        let mut h = S::zero();
        for i in 0..k {
            let row: S = (0..k).map(|j| xlogx(self.transition[(i, j)])).sum();
            h -= self.stationary[i] * row;
        }
        h.max(S::zero())
    }

    /// Probability of the cylinder `[word]`.
    pub fn word_probability(&self, word: &[usize]) -> S {
        match word.first() {
            None => S::one(),
            Some(&w0) if w0 < self.sft.alphabet_size() => word
                .windows(2)
                .fold(self.stationary[w0], |acc, w| acc * self.transition[(w[0], w[1])]),
            Some(_) => S::zero(),
        }
    }

    /// `(word, mass)` for every admissible word of length `len`.
    pub fn cylinder_masses(&self, len: usize) -> Result<Vec<(Word, S)>> {
        Ok(self
            .sft
            .enumerate_words(len)?
            .into_iter()
            .map(|w| {
                let p = self.word_probability(&w);
                (w, p)
            })
            .collect())
    }

    /// `sum_w Pr(w) * pot(w)` over admissible windows `w` of the potential's range.
    pub fn integrate(&self, pot: &LocallyConstantPotential<S>) -> Result<S> {
        if pot.alphabet_size() != self.sft.alphabet_size() {
            return Err(Error::RangeMismatch(format!(
                "potential on {} symbols, measure on {}",
                pot.alphabet_size(),
                self.sft.alphabet_size()
            )));
        }
        let mut total = S::zero();
        let mut word = Vec::with_capacity(pot.range());
        for s in 0..self.sft.alphabet_size() {
            let p = self.stationary[s];
            if p > S::zero() {
                word.push(s);
                self.integrate_from(pot, &mut word, p, &mut total)?;
                word.pop();
            }
        }
        Ok(total)
    }

    fn integrate_from(
        &self,
        pot: &LocallyConstantPotential<S>,
        word: &mut Vec<usize>,
        mass: S,
        total: &mut S,
    ) -> Result<()> {
        if word.len() == pot.range() {
            let v = pot.value(word).ok_or_else(|| {
                Error::RangeMismatch(format!("potential undefined on charged word {word:?}"))
            })?;
            *total += mass * v;
            return Ok(());
        }
        let last = *word.last().expect("non-empty");
        for next in 0..self.sft.alphabet_size() {
            let p = self.transition[(last, next)];
            if p > S::zero() {
                word.push(next);
                self.integrate_from(pot, word, mass * p, total)?;
                word.pop();
            }
        }
        Ok(())
    }
}

/// The periodic-orbit measure of `cycle`: deterministic transitions along
/// the cycle and uniform mass on its states. States off the cycle carry no
/// mass; their rows step to their smallest allowed successor so that the
/// matrix stays stochastic.
pub fn cycle_measure<S: Scalar>(sft: &Sft, cycle: &Cycle) -> Result<MarkovMeasure<S>> {
    let k = sft.alphabet_size();
    let _ = Cycle::new(sft, cycle.states().to_vec())?;
    if !cycle.is_simple() {
        // A non-simple cycle visits a state with two different successors.
        return Err(Error::InadmissibleCycle(cycle.states().to_vec()));
    }
    let mut transition = SquareMatrix::zeros(k);
    let mut stationary = vec![S::zero(); k];
    let weight = S::one() / S::from_usize_lossy(cycle.period());
    for (i, j) in cycle.edges() {
        transition[(i, j)] = S::one();
        stationary[i] = weight;
    }
    for i in 0..k {
        if stationary[i] == S::zero() {
            let j = sft.successors(i).next().expect("validated shift");
            transition[(i, j)] = S::one();
        }
    }
    MarkovMeasure::with_stationary(sft, transition, stationary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Potential};

    fn matrix(rows: &[[f64; 2]]) -> SquareMatrix<f64> {
        SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn stationary_examples() {
        let full = fixtures::full2();
        let pi = stationary_distribution(&matrix(&[[0.5, 0.5], [0.5, 0.5]]), &full).unwrap();
        assert_eq!(pi, vec![0.5, 0.5]);
        let pi = stationary_distribution(&matrix(&[[0.0, 1.0], [1.0, 0.0]]), &fixtures::cycle2()).unwrap();
        assert_eq!(pi, vec![0.5, 0.5]);
        // Hand solution of pi = pi P: 0.1 pi_0 = 0.5 pi_1.
        let pi = stationary_distribution(&matrix(&[[0.9, 0.1], [0.5, 0.5]]), &full).unwrap();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-15 && (pi[1] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_errors() {
        let full = fixtures::full2();
        assert_eq!(
            stationary_distribution(&matrix(&[[1.0, 0.0], [0.5, 0.5]]), &full),
            Err(Error::ReducibleSupport)
        );
        assert!(matches!(
            stationary_distribution(&matrix(&[[0.5, 0.5], [0.5, 0.5]]), &fixtures::golden()),
            Err(Error::InvalidTransition(_))
        ));
        assert!(matches!(
            stationary_distribution(&matrix(&[[0.5, 0.6], [0.5, 0.5]]), &full),
            Err(Error::InvalidTransition(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        let full = fixtures::full2();
        let uniform = MarkovMeasure::new(&full, matrix(&[[0.5, 0.5], [0.5, 0.5]])).unwrap();
        assert!((uniform.entropy() - 2f64.ln()).abs() < 1e-15);
        let det = MarkovMeasure::new(&fixtures::cycle2(), matrix(&[[0.0, 1.0], [1.0, 0.0]])).unwrap();
        assert_eq!(det.entropy(), 0.0);
        let bern = MarkovMeasure::new(&full, matrix(&[[0.25, 0.75], [0.25, 0.75]])).unwrap();
        assert!((bern.entropy() - 0.5623351446188083).abs() < 1e-12);
    }

    #[test]
    fn integration_examples() {
        let full = fixtures::full2();
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let uniform = MarkovMeasure::new(&full, matrix(&[[0.5, 0.5], [0.5, 0.5]])).unwrap();
        assert_eq!(uniform.integrate(&phi).unwrap(), 0.5);
        let bern = MarkovMeasure::new(&full, matrix(&[[0.25, 0.75], [0.25, 0.75]])).unwrap();
        assert!((bern.integrate(&phi).unwrap() - 0.25).abs() < 1e-15);
        let c = Potential::constant(&full, 2.5, "c");
        assert!((bern.integrate(&c).unwrap() - 2.5).abs() < 1e-15);
        let other = Potential::symbolwise(&Sft::full(3), &[1.0, 2.0, 3.0], "x").unwrap();
        assert!(matches!(bern.integrate(&other), Err(Error::RangeMismatch(_))));
    }

    #[test]
    fn cycle_measure_examples() {
        let full = fixtures::full2();
        let fixed = cycle_measure::<f64>(&full, &Cycle::new(&full, vec![0]).unwrap()).unwrap();
        assert_eq!(fixed.stationary(), &[1.0, 0.0]);
        assert_eq!(fixed.entropy(), 0.0);
        let two = cycle_measure::<f64>(&full, &Cycle::new(&full, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(two.stationary(), &[0.5, 0.5]);
        assert_eq!(two.entropy(), 0.0);
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        assert_eq!(two.integrate(&phi).unwrap(), 0.5);
    }
}
