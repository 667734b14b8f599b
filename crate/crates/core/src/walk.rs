//! Lexicographic depth-first walk over admissible words with running
//! Birkhoff prefix sums. Every definitional estimator goes through here so
//! that their floating-point reductions happen in one fixed order.

use crate::error::{Error, Result};
use crate::potential::{index_of, LocallyConstantPotential};
use crate::scalar::Scalar;
use crate::sft::{enumeration_cap, Sft};

/// Prefix sums of each potential along the current word:
/// `sums[p][j]` is the sum of the first `j` complete windows of potential `p`
/// (`sums[p][0] == 0`).
pub(crate) type PrefixSums<S> = [Vec<S>];

pub(crate) struct Walk<'a, S> {
    sft: &'a Sft,
    pots: &'a [&'a LocallyConstantPotential<S>],
    len: usize,
    word: Vec<usize>,
    sums: Vec<Vec<S>>,
    leaves: usize,
    cap: usize,
}

impl<'a, S: Scalar> Walk<'a, S> {
    pub(crate) fn new(sft: &'a Sft, pots: &'a [&'a LocallyConstantPotential<S>], len: usize) -> Self {
        Self {
            sft,
            pots,
            len,
            word: Vec::with_capacity(len),
            sums: pots.iter().map(|_| vec![S::zero()]).collect(),
            leaves: 0,
            cap: enumeration_cap(),
        }
    }

    /// Visits every admissible word of length `len`. `keep` is called after
    /// each symbol is placed and may cut the subtree by returning `false`.
    /// Returns the number of leaves visited.
    pub(crate) fn run<K, V>(mut self, mut keep: K, mut visit: V) -> Result<usize>
    where
        K: FnMut(&[usize], &PrefixSums<S>) -> bool,
        V: FnMut(&[usize], &PrefixSums<S>),
    {
        if self.len == 0 {
            return Ok(0);
        }
        for s in 0..self.sft.alphabet_size() {
            self.descend(s, &mut keep, &mut visit)?;
        }
        Ok(self.leaves)
    }

    fn descend<K, V>(&mut self, symbol: usize, keep: &mut K, visit: &mut V) -> Result<()>
    where
        K: FnMut(&[usize], &PrefixSums<S>) -> bool,
        V: FnMut(&[usize], &PrefixSums<S>),
    {
        self.word.push(symbol);
        let d = self.word.len();
        let k = self.sft.alphabet_size();
        for (p, pot) in self.pots.iter().enumerate() {
            let r = pot.range();
            if d >= r {
                let idx = index_of(&self.word[d - r..], k);
                let v = pot.value_at_index(idx).expect("admissible window is defined");
                let last = *self.sums[p].last().expect("prefix starts at zero");
                self.sums[p].push(last + v);
            }
        }
        if keep(&self.word, &self.sums) {
            if d == self.len {
                self.leaves += 1;
                if self.leaves > self.cap {
                    return Err(Error::CapExceeded { cap: self.cap });
                }
                visit(&self.word, &self.sums);
            } else {
                let last = symbol;
                for next in 0..k {
                    if self.sft.allowed(last, next) {
                        self.descend(next, keep, visit)?;
                    }
                }
            }
        }
        for (p, pot) in self.pots.iter().enumerate() {
            if d >= pot.range() {
                self.sums[p].pop();
            }
        }
        self.word.pop();
        Ok(())
    }
}

/// `ln sum exp(exponent(word))` over all admissible words of length
/// `n + r - 1`, where `r` is the largest range among `pots` and the
/// exponent sees `S_n` of each potential. Returns the log-sum, the number of
/// words and the largest exponent.
pub(crate) fn cylinder_log_sum<S: Scalar>(
    sft: &Sft,
    pots: &[&LocallyConstantPotential<S>],
    n: usize,
    mut exponent: impl FnMut(&[S]) -> S,
) -> Result<(S, usize, S)> {
    let r = pots.iter().map(|p| p.range()).max().unwrap_or(1);
    let len = n + r - 1;
    if (sft.count_words(len)) > enumeration_cap() as u128 {
        return Err(Error::CapExceeded { cap: enumeration_cap() });
    }
    let mut exps = Vec::new();
    let mut birkhoff = vec![S::zero(); pots.len()];
    let leaves = Walk::new(sft, pots, len).run(
        |_, _| true,
        |_, sums| {
            for (b, s) in birkhoff.iter_mut().zip(sums) {
                *b = s[n];
            }
            exps.push(exponent(&birkhoff));
        },
    )?;
    let max = exps.iter().copied().fold(S::neg_infinity(), S::max);
    Ok((crate::scalar::log_sum_exp(&exps), leaves, max))
}
