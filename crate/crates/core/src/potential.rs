//! Locally constant potentials and their Birkhoff sums.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sft::{format_word, Cycle, Sft, Word};

/// A real function of the first `range` symbols of a sequence.
///
/// Values live in a dense table indexed by the base-`k` value of the
/// window; only admissible windows are defined.
#[derive(Debug, Clone, PartialEq)]
pub struct LocallyConstantPotential<S> {
    alphabet_size: usize,
    range: usize,
    values: Vec<S>,
    defined: Vec<bool>,
    label: String,
}

fn table_size(k: usize, range: usize) -> Result<usize> {
    let cap = crate::sft::enumeration_cap();
    let mut size = 1usize;
    for _ in 0..range {
        size = size.checked_mul(k).filter(|&s| s <= cap).ok_or(Error::CapExceeded { cap })?;
    }
    Ok(size)
}

impl<S: Scalar> LocallyConstantPotential<S> {
    /// Builds a potential from `f` evaluated on every admissible `range`-word.
    pub fn from_fn(
        sft: &Sft,
        range: usize,
        label: impl Into<String>,
        mut f: impl FnMut(&[usize]) -> S,
    ) -> Result<Self> {
        if range == 0 {
            return Err(Error::InvalidPotential("range must be positive".into()));
        }
        let k = sft.alphabet_size();
        let size = table_size(k, range)?;
        let mut values = vec![S::zero(); size];
        let mut defined = vec![false; size];
        for word in sft.enumerate_words(range)? {
            let v = f(&word);
            if !v.is_finite() {
                return Err(Error::InvalidPotential(format!(
                    "non-finite value on word {}",
                    format_word(&word, k)
                )));
            }
            let idx = index_of(&word, k);
            values[idx] = v;
            defined[idx] = true;
        }
        Ok(Self { alphabet_size: k, range, values, defined, label: label.into() })
    }

    /// Builds a potential from an explicit table; the table must list every
    /// admissible `range`-word exactly once and nothing else.
    pub fn from_table(
        sft: &Sft,
        range: usize,
        label: impl Into<String>,
        entries: impl IntoIterator<Item = (Word, S)>,
    ) -> Result<Self> {
        let k = sft.alphabet_size();
        let size = table_size(k, range.max(1))?;
        let mut table: Vec<Option<S>> = vec![None; size];
        for (word, v) in entries {
            if word.len() != range || !sft.is_admissible(&word) {
                return Err(Error::InvalidPotential(format!(
                    "entry {} is not an admissible {range}-word",
                    format_word(&word, k)
                )));
            }
            let slot = &mut table[index_of(&word, k)];
            if slot.is_some() {
                return Err(Error::InvalidPotential(format!(
                    "duplicate entry {}",
                    format_word(&word, k)
                )));
            }
            *slot = Some(v);
        }
        Self::from_fn(sft, range, label, |w| table[index_of(w, k)].unwrap_or_else(S::nan)).map_err(|e| match e {
            Error::InvalidPotential(_) => Error::InvalidPotential(format!(
                "table does not cover every admissible {range}-word"
            )),
            other => other,
        })
    }

    /// A range-1 potential with one value per symbol.
    pub fn symbolwise(sft: &Sft, values: &[S], label: impl Into<String>) -> Result<Self> {
        if values.len() != sft.alphabet_size() {
            return Err(Error::InvalidPotential(format!(
                "expected {} symbol values, got {}",
                sft.alphabet_size(),
                values.len()
            )));
        }
        Self::from_fn(sft, 1, label, |w| values[w[0]])
    }

    pub fn constant(sft: &Sft, c: S, label: impl Into<String>) -> Self {
        Self::from_fn(sft, 1, label, |_| c).expect("constant potential is valid")
    }

    /// Values drawn independently and uniformly from `[low, high]`, one per
    /// admissible window in lexicographic order.
    pub fn random<R: Rng + ?Sized>(
        sft: &Sft,
        range: usize,
        low: f64,
        high: f64,
        rng: &mut R,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(low <= high) {
            return Err(Error::InvalidArgument(format!("empty interval [{low}, {high}]")));
        }
        Self::from_fn(sft, range, label, |_| S::lit(rng.gen_range(low..=high)))
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Value on an admissible window of length `range`, or `None`.
    pub fn value(&self, window: &[usize]) -> Option<S> {
        if window.len() != self.range || window.iter().any(|&s| s >= self.alphabet_size) {
            return None;
        }
        let idx = index_of(window, self.alphabet_size);
        self.defined[idx].then(|| self.values[idx])
    }

    #[inline]
    pub(crate) fn value_at_index(&self, idx: usize) -> Option<S> {
        self.defined[idx].then(|| self.values[idx])
    }

    /// `(word, value)` pairs in lexicographic order.
    pub fn entries(&self) -> Vec<(Word, S)> {
        (0..self.values.len())
            .filter(|&i| self.defined[i])
            .map(|i| (word_of(i, self.alphabet_size, self.range), self.values[i]))
            .collect()
    }

    fn defined_values(&self) -> impl Iterator<Item = S> + '_ {
        self.values.iter().zip(&self.defined).filter(|(_, &d)| d).map(|(&v, _)| v)
    }

    pub fn min_value(&self) -> S {
        self.defined_values().fold(S::infinity(), S::min)
    }

    pub fn max_value(&self) -> S {
        self.defined_values().fold(S::neg_infinity(), S::max)
    }

    pub fn is_constant(&self) -> bool {
        self.min_value() == self.max_value()
    }

    /// Whether the table is defined on exactly the admissible words of `sft`.
    pub fn is_defined_on(&self, sft: &Sft) -> bool {
        if sft.alphabet_size() != self.alphabet_size {
            return false;
        }
        (0..self.values.len()).all(|i| self.defined[i] == sft.is_admissible(&word_of(i, self.alphabet_size, self.range)))
    }

    pub fn map(&self, mut f: impl FnMut(S) -> S) -> Self {
        let values = self
            .values
            .iter()
            .zip(&self.defined)
            .map(|(&v, &d)| if d { f(v) } else { S::zero() })
            .collect();
        Self { values, ..self.clone() }
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|v| v * c)
    }

    /// The same function written as a potential of a larger range.
    pub fn extend_range(&self, sft: &Sft, range: usize) -> Result<Self> {
        if range < self.range {
            return Err(Error::RangeMismatch(format!(
                "cannot shrink range {} to {range}",
                self.range
            )));
        }
        if range == self.range {
            return Ok(self.clone());
        }
        let r = self.range;
        Self::from_fn(sft, range, self.label.clone(), |w| {
            self.value(&w[..r]).expect("prefix of admissible word is admissible")
        })
    }

    /// Pointwise combination after lifting both operands to a common range.
    pub fn zip_with(&self, sft: &Sft, other: &Self, mut f: impl FnMut(S, S) -> S) -> Result<Self> {
        if self.alphabet_size != other.alphabet_size {
            return Err(Error::RangeMismatch("potentials live on different alphabets".into()));
        }
        let r = self.range.max(other.range);
        let a = self.extend_range(sft, r)?;
        let b = other.extend_range(sft, r)?;
        Self::from_fn(sft, r, self.label.clone(), |w| {
            f(a.value(w).expect("defined"), b.value(w).expect("defined"))
        })
    }

    pub fn add(&self, sft: &Sft, other: &Self) -> Result<Self> {
        self.zip_with(sft, other, |a, b| a + b)
    }

    pub fn sub(&self, sft: &Sft, other: &Self) -> Result<Self> {
        self.zip_with(sft, other, |a, b| a - b)
    }

    /// `self - beta * other`.
    pub fn sub_scaled(&self, sft: &Sft, beta: S, other: &Self) -> Result<Self> {
        self.zip_with(sft, other, |a, b| a - beta * b)
    }

    /// `S_n phi` on the cylinder of `word`: the sum of the first `n` windows.
    /// The word must have length at least `n + range - 1` and be admissible.
    pub fn cylinder_birkhoff(&self, sft: &Sft, word: &[usize], n: usize) -> Result<S> {
        let need = n + self.range - 1;
        if n == 0 || word.len() < need {
            return Err(Error::WordTooShort { got: word.len(), need });
        }
        if !sft.is_admissible(word) {
            return Err(Error::InadmissibleWord(word.to_vec()));
        }
        let mut total = S::zero();
        for i in 0..n {
            total += self
                .value(&word[i..i + self.range])
                .ok_or_else(|| Error::InadmissibleWord(word.to_vec()))?;
        }
        Ok(total)
    }

    /// Birkhoff sum over one period of the periodic point generated by `cycle`.
    pub fn periodic_birkhoff(&self, cycle: &Cycle) -> Result<S> {
        let mut total = S::zero();
        let mut window = Vec::with_capacity(self.range);
        for i in 0..cycle.period() {
            window.clear();
            window.extend((0..self.range).map(|j| cycle.at(i + j)));
            total += self
                .value(&window)
                .ok_or_else(|| Error::InadmissibleCycle(cycle.states().to_vec()))?;
        }
        Ok(total)
    }
}

#[inline]
pub(crate) fn index_of(word: &[usize], k: usize) -> usize {
    word.iter().fold(0, |acc, &s| acc * k + s)
}

fn word_of(mut idx: usize, k: usize, len: usize) -> Word {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = idx % k;
        idx /= k;
    }
    w
}
