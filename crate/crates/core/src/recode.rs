//! Conjugacies of shift spaces: higher-block recoding and symbol relabelling.

use crate::error::{Error, Result};
use crate::potential::LocallyConstantPotential;
use crate::scalar::Scalar;
use crate::sft::{Sft, Word};

/// A shift rewritten on a new alphabet, with potentials carried along.
#[derive(Debug, Clone)]
pub struct Recoded<S> {
    pub sft: Sft,
    pub potentials: Vec<LocallyConstantPotential<S>>,
    /// Original word represented by each new symbol (length `m` for a
    /// higher-block recoding, length 1 for a permutation).
    pub blocks: Vec<Word>,
}

/// The `m`-block presentation: new symbols are the admissible `m`-words,
/// with an edge `u -> v` when `u` and `v` overlap in `m - 1` symbols. Each
/// potential becomes a range-1 potential whose value on `u` is its value on
/// the leading window of `u`.
pub fn higher_block_recode<S: Scalar>(
    sft: &Sft,
    potentials: &[&LocallyConstantPotential<S>],
    m: usize,
) -> Result<Recoded<S>> {
    let max_range = potentials.iter().map(|p| p.range()).max().unwrap_or(1);
    if m == 0 || m < max_range {
        return Err(Error::RangeMismatch(format!(
            "block length {m} is smaller than potential range {max_range}"
        )));
    }
    for p in potentials {
        if p.alphabet_size() != sft.alphabet_size() {
            return Err(Error::RangeMismatch("potential alphabet differs from shift".into()));
        }
    }
    if m == 1 {
        return Ok(Recoded {
            sft: sft.clone(),
            potentials: potentials.iter().map(|p| (*p).clone()).collect(),
            blocks: (0..sft.alphabet_size()).map(|s| vec![s]).collect(),
        });
    }
    let blocks = sft.enumerate_words(m)?;
    let k = blocks.len();
    let cap = crate::sft::enumeration_cap();
    if k.checked_mul(k).is_none_or(|n| n > cap) {
        return Err(Error::CapExceeded { cap });
    }
    let mut flags = vec![false; k * k];
    for (i, u) in blocks.iter().enumerate() {
        for (j, v) in blocks.iter().enumerate() {
            flags[i * k + j] = u[1..] == v[..m - 1];
        }
    }
    let new_sft = Sft::from_flags(k, flags)?;
    let potentials = potentials
        .iter()
        .map(|p| {
            let r = p.range();
            LocallyConstantPotential::from_fn(&new_sft, 1, p.label().to_string(), |w| {
                p.value(&blocks[w[0]][..r]).expect("window of admissible block")
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Recoded { sft: new_sft, potentials, blocks })
}

/// Relabels symbol `i` as `permutation[i]`.
pub fn permute_symbols<S: Scalar>(
    sft: &Sft,
    potentials: &[&LocallyConstantPotential<S>],
    permutation: &[usize],
) -> Result<Recoded<S>> {
    let k = sft.alphabet_size();
    let mut inverse = vec![usize::MAX; k];
    if permutation.len() != k {
        return Err(Error::NotABijection);
    }
    for (i, &p) in permutation.iter().enumerate() {
        if p >= k || inverse[p] != usize::MAX {
            return Err(Error::NotABijection);
        }
        inverse[p] = i;
    }
    let mut flags = vec![false; k * k];
    for i in 0..k {
        for j in 0..k {
            flags[permutation[i] * k + permutation[j]] = sft.allowed(i, j);
        }
    }
    let new_sft = Sft::from_flags(k, flags)?;
    let potentials = potentials
        .iter()
        .map(|p| {
            LocallyConstantPotential::from_fn(&new_sft, p.range(), p.label().to_string(), |w| {
                let original: Word = w.iter().map(|&s| inverse[s]).collect();
                p.value(&original).expect("relabelled word is admissible")
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Recoded { sft: new_sft, potentials, blocks: inverse.into_iter().map(|s| vec![s]).collect() })
}

/// Recodes to the smallest block length that makes every potential range 1.
pub fn to_range_one<S: Scalar>(sft: &Sft, potentials: &[&LocallyConstantPotential<S>]) -> Result<Recoded<S>> {
    let m = potentials.iter().map(|p| p.range()).max().unwrap_or(1);
    higher_block_recode(sft, potentials, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Potential};

    #[test]
    fn full_shift_two_block() {
        let r = higher_block_recode::<f64>(&fixtures::full2(), &[], 2).unwrap();
        assert_eq!(r.sft.alphabet_size(), 4);
        assert_eq!(r.sft.edge_count(), 8);
    }

    #[test]
    fn golden_two_block() {
        let r = higher_block_recode::<f64>(&fixtures::golden(), &[], 2).unwrap();
        assert_eq!(r.blocks, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(r.sft.adjacency_rows(), vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
    }

    #[test]
    fn one_block_is_identity() {
        let full = fixtures::full2();
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let r = higher_block_recode(&full, &[&phi], 1).unwrap();
        assert_eq!(r.sft, full);
        assert_eq!(r.potentials[0], phi);
    }

    #[test]
    fn block_shorter_than_range_is_rejected() {
        let full = fixtures::full2();
        let two = Potential::from_fn(&full, 2, "two", |w| w[0] as f64 - w[1] as f64).unwrap();
        assert!(matches!(higher_block_recode(&full, &[&two], 1), Err(Error::RangeMismatch(_))));
    }

    #[test]
    fn permutation_examples() {
        let full = fixtures::full2();
        let phi = Potential::symbolwise(&full, &[1.0, 0.0], "phi").unwrap();
        let r = permute_symbols(&full, &[&phi], &[1, 0]).unwrap();
        assert_eq!(r.potentials[0].value(&[0]), Some(0.0));
        assert_eq!(r.potentials[0].value(&[1]), Some(1.0));
        let id = permute_symbols(&full, &[&phi], &[0, 1]).unwrap();
        assert_eq!(id.sft, full);
        assert_eq!(id.potentials[0], phi);
        let g = permute_symbols::<f64>(&fixtures::golden(), &[], &[1, 0]).unwrap();
        assert_eq!(g.sft.adjacency_rows(), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(permute_symbols::<f64>(&full, &[], &[0, 0]).unwrap_err(), Error::NotABijection);
        assert_eq!(permute_symbols::<f64>(&full, &[], &[0]).unwrap_err(), Error::NotABijection);
    }
}
