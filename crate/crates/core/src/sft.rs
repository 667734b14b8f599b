//! One-sided subshifts of finite type over the alphabet `0..k`.
//!
//! Points are infinite symbol sequences `x_0 x_1 ...` whose consecutive
//! pairs are allowed by a 0/1 adjacency matrix, and the dynamics is the left
//! shift. The metric is `d(x, y) = 2^-min{i : x_i != y_i}`, so a Bowen ball
//! of length `n` and radius `2^-q` is exactly an `(n + q - 1)`-cylinder.
//! Every enumeration in this module runs in lexicographic order.

use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// A finite admissible (or candidate) word over `0..k`.
pub type Word = Vec<usize>;

/// Default bound on the number of words any enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 26;

static ENUMERATION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ENUMERATION_CAP);

/// Current process-wide enumeration cap.
pub fn enumeration_cap() -> usize {
    ENUMERATION_CAP.load(Ordering::Relaxed)
}

/// Overrides the enumeration cap for subsequent calls.
pub fn set_enumeration_cap(cap: usize) {
    ENUMERATION_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Formats a word as a symbol string: `0101` for `k <= 10`, `3,11,0` beyond.
pub fn format_word(word: &[usize], alphabet_size: usize) -> String {
    if alphabet_size <= 10 {
        word.iter().map(|s| char::from(b'0' + *s as u8)).collect()
    } else {
        word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Parses the inverse of [`format_word`].
pub fn parse_word(text: &str, alphabet_size: usize) -> Result<Word> {
    let bad = || Error::InvalidArgument(format!("cannot parse word {text:?}"));
    let word: Word = if alphabet_size <= 10 {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect::<Result<_>>()?
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if word.is_empty() || word.iter().any(|&s| s >= alphabet_size) {
        return Err(bad());
    }
    Ok(word)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Sft {
    k: usize,
    adjacency: Vec<bool>,
    irreducible: bool,
    primitive: bool,
}

impl fmt::Debug for Sft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sft")
            .field("alphabet_size", &self.k)
            .field("adjacency", &self.adjacency_rows())
            .field("irreducible", &self.irreducible)
            .field("primitive", &self.primitive)
            .finish()
    }
}

impl Sft {
    /// Validates a 0/1 adjacency matrix and classifies the graph.
    pub fn new(alphabet_size: usize, adjacency: &[Vec<u8>]) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::MalformedAdjacency("alphabet is empty".into()));
        }
        if adjacency.len() != alphabet_size {
            return Err(Error::MalformedAdjacency(format!(
                "expected {alphabet_size} rows, found {}",
                adjacency.len()
            )));
        }
        let mut flags = Vec::with_capacity(alphabet_size * alphabet_size);
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != alphabet_size {
                return Err(Error::MalformedAdjacency(format!(
                    "row {i} has length {}, expected {alphabet_size}",
                    row.len()
                )));
            }
            for &a in row {
                match a {
                    0 => flags.push(false),
                    1 => flags.push(true),
                    other => {
                        return Err(Error::MalformedAdjacency(format!(
                            "row {i} contains {other}; entries must be 0 or 1"
                        )))
                    }
                }
            }
        }
        Self::from_flags(alphabet_size, flags)
    }

    pub(crate) fn from_flags(k: usize, adjacency: Vec<bool>) -> Result<Self> {
        debug_assert_eq!(adjacency.len(), k * k);
        for i in 0..k {
            if !(0..k).any(|j| adjacency[i * k + j]) {
                return Err(Error::EmptyRowOrColumn { symbol: i, side: "successor" });
            }
        }
        for j in 0..k {
            if !(0..k).any(|i| adjacency[i * k + j]) {
                return Err(Error::EmptyRowOrColumn { symbol: j, side: "predecessor" });
            }
        }
        let mut sft = Sft { k, adjacency, irreducible: false, primitive: false };
        sft.irreducible = sft.strongly_connected();
        sft.primitive = sft.irreducible && sft.period() == 1;
        Ok(sft)
    }

    /// The full shift on `k` symbols.
    pub fn full(k: usize) -> Self {
        Self::from_flags(k, vec![true; k * k]).expect("full shift is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    #[inline]
    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.k + j]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.k).filter(move |&j| self.allowed(i, j))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&a| a).count()
    }

    pub fn adjacency_rows(&self) -> Vec<Vec<u8>> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| u8::from(self.allowed(i, j))).collect())
            .collect()
    }

    pub fn is_admissible(&self, word: &[usize]) -> bool {
        word.iter().all(|&s| s < self.k) && word.windows(2).all(|w| self.allowed(w[0], w[1]))
    }

    fn reachable_from(&self, start: usize, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.k];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..self.k {
                let edge = if reverse { self.allowed(v, u) } else { self.allowed(u, v) };
                if edge && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn strongly_connected(&self) -> bool {
        self.reachable_from(0, false).iter().all(|&s| s)
            && self.reachable_from(0, true).iter().all(|&s| s)
    }

    /// Period of an irreducible graph: gcd of `level(u) + 1 - level(v)` over
    /// all edges, with BFS levels from symbol 0. Equivalent to checking that
    /// `A^(k^2 - 2k + 2)` is entrywise positive.
    fn period(&self) -> usize {
        let mut level = vec![usize::MAX; self.k];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u) {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g = 0usize;
        for u in 0..self.k {
            for v in self.successors(u) {
                let d = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
                g = gcd(g, d);
            }
        }
        g
    }

    /// Number of admissible words of length `n`, i.e. `1^T A^(n-1) 1`,
    /// saturating at `u128::MAX`.
    pub fn count_words(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        let mut counts = vec![1u128; self.k];
        for _ in 1..n {
            let mut next = vec![0u128; self.k];
            for (i, &c) in counts.iter().enumerate() {
                for j in self.successors(i) {
                    next[j] = next[j].saturating_add(c);
                }
            }
            counts = next;
        }
        counts.into_iter().fold(0u128, |a, c| a.saturating_add(c))
    }

    /// All admissible words of length `n` in lexicographic order.
    pub fn enumerate_words(&self, n: usize) -> Result<Vec<Word>> {
        if n == 0 {
            return Err(Error::InvalidArgument("word length must be positive".into()));
        }
        let cap = enumeration_cap();
        if self.count_words(n) > cap as u128 {
            return Err(Error::CapExceeded { cap });
        }
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(n);
        self.extend_words(&mut word, n, &mut out);
        Ok(out)
    }

    fn extend_words(&self, word: &mut Word, n: usize, out: &mut Vec<Word>) {
        if word.len() == n {
            out.push(word.clone());
            return;
        }
        let candidates: Vec<usize> = match word.last() {
            None => (0..self.k).collect(),
            Some(&last) => self.successors(last).collect(),
        };
        for s in candidates {
            word.push(s);
            self.extend_words(word, n, out);
            word.pop();
        }
    }

    /// All simple cycles of period at most `max_period`, each listed once
    /// with its smallest symbol first; sorted by period, then lexicographically.
    pub fn enumerate_simple_cycles(&self, max_period: usize) -> Result<Vec<Cycle>> {
        if max_period == 0 {
            return Err(Error::InvalidArgument("max_period must be at least 1".into()));
        }
        let cap = enumeration_cap();
        let mut out = Vec::new();
        let mut visited = 0usize;
        for start in 0..self.k {
            let mut path = vec![start];
            let mut on_path = vec![false; self.k];
            on_path[start] = true;
            self.cycle_search(start, &mut path, &mut on_path, max_period, &mut out, &mut visited, cap)?;
        }
        out.sort_by(|a: &Cycle, b: &Cycle| a.period().cmp(&b.period()).then_with(|| a.states.cmp(&b.states)));
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn cycle_search(
        &self,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        max_period: usize,
        out: &mut Vec<Cycle>,
        visited: &mut usize,
        cap: usize,
    ) -> Result<()> {
        *visited += 1;
        if *visited > cap {
            return Err(Error::CapExceeded { cap });
        }
        let last = *path.last().expect("non-empty path");
        for next in self.successors(last) {
            if next == start {
                out.push(Cycle { states: path.clone() });
            } else if next > start && !on_path[next] && path.len() < max_period {
                on_path[next] = true;
                path.push(next);
                self.cycle_search(start, path, on_path, max_period, out, visited, cap)?;
                path.pop();
                on_path[next] = false;
            }
        }
        Ok(())
    }

    /// The sub-shift on the given edge set, relabelled onto the symbols that
    /// the edges touch (in increasing order). Returns the shift and the
    /// original symbol of each new symbol.
    pub fn edge_subshift(&self, edges: &[(usize, usize)]) -> Result<(Sft, Vec<usize>)> {
        let mut symbols: Vec<usize> = edges.iter().flat_map(|&(i, j)| [i, j]).collect();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(Error::EmptySubgraph);
        }
        let pos = |s: usize| symbols.binary_search(&s).expect("symbol collected");
        let k = symbols.len();
        let mut flags = vec![false; k * k];
        for &(i, j) in edges {
            if !self.allowed(i, j) {
                return Err(Error::InadmissibleWord(vec![i, j]));
            }
            flags[pos(i) * k + pos(j)] = true;
        }
        Ok((Sft::from_flags(k, flags)?, symbols))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A primitive periodic orbit, stored as one period of its symbol sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    states: Vec<usize>,
}

impl Cycle {
    /// Validates that `states` closes up in `sft` and is not a power of a
    /// shorter cycle.
    pub fn new(sft: &Sft, states: Vec<usize>) -> Result<Self> {
        let p = states.len();
        let closes = p > 0
            && sft.is_admissible(&states)
            && sft.allowed(states[p - 1], states[0]);
        let primitive = (1..p).filter(|&d| p.is_multiple_of(d)).all(|d| states[d..] != states[..p - d]);
        if !closes || !primitive {
            return Err(Error::InadmissibleCycle(states));
        }
        Ok(Cycle { states })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn period(&self) -> usize {
        self.states.len()
    }

    /// The state at position `i` of the periodic sequence.
    pub fn at(&self, i: usize) -> usize {
        self.states[i % self.states.len()]
    }

    /// Rotation starting at the smallest symbol (ties broken
    /// lexicographically), used to compare cycles up to rotation.
    pub fn canonical(&self) -> Cycle {
        let p = self.period();
        let best = (0..p)
            .map(|r| (0..p).map(|i| self.at(r + i)).collect::<Vec<_>>())
            .min()
            .expect("non-empty cycle");
        Cycle { states: best }
    }

    /// Whether every state is distinct.
    pub fn is_simple(&self) -> bool {
        let mut s = self.states.clone();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.period()).map(|i| (self.at(i), self.at(i + 1))).collect()
    }

    pub fn label(&self, alphabet_size: usize) -> String {
        format_word(&self.states, alphabet_size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn classification_of_fixtures() {
        let full = fixtures::full2();
        assert!(full.is_irreducible() && full.is_primitive());
        let cyc = fixtures::cycle2();
        assert!(cyc.is_irreducible() && !cyc.is_primitive());
        let gold = fixtures::golden();
        assert!(gold.is_primitive());
    }

    #[test]
    fn empty_column_is_rejected() {
        let err = Sft::new(2, &[vec![1, 0], vec![1, 0]]).unwrap_err();
        assert_eq!(err, Error::EmptyRowOrColumn { symbol: 1, side: "predecessor" });
        assert!(matches!(
            Sft::new(2, &[vec![1, 1], vec![1]]),
            Err(Error::MalformedAdjacency(_))
        ));
        assert!(matches!(Sft::new(2, &[vec![1, 2], vec![1, 1]]), Err(Error::MalformedAdjacency(_))));
    }

    #[test]
    fn reducible_graph_is_flagged_not_rejected() {
        let sft = Sft::new(2, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!sft.is_irreducible());
        assert!(!sft.is_primitive());
    }

    #[test]
    fn primitivity_matches_wielandt_power() {
        // Compare the period-based test with A^(k^2-2k+2) > 0 on a few graphs.
        let graphs: Vec<Vec<Vec<u8>>> = vec![
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]],
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
            vec![vec![0, 1, 1, 0], vec![0, 0, 0, 1], vec![0, 0, 0, 1], vec![1, 0, 0, 0]],
            vec![vec![1, 1], vec![1, 0]],
        ];
        for g in graphs {
            let sft = Sft::new(g.len(), &g).unwrap();
            let k = g.len();
            let mut power = g.iter().map(|r| r.iter().map(|&a| a != 0).collect::<Vec<_>>()).collect::<Vec<_>>();
            for _ in 1..(k * k - 2 * k + 2) {
                power = (0..k)
                    .map(|i| (0..k).map(|j| (0..k).any(|l| power[i][l] && g[l][j] != 0)).collect())
                    .collect();
            }
            let positive = power.iter().flatten().all(|&b| b);
            assert_eq!(sft.is_primitive(), positive, "{g:?}");
        }
    }

    #[test]
    fn word_enumeration_examples() {
        assert_eq!(fixtures::full2().enumerate_words(3).unwrap().len(), 8);
        let golden = fixtures::golden().enumerate_words(3).unwrap();
        // Brute-force filter over all 8 binary strings of length 3.
        let brute: Vec<Word> = (0..8usize)
            .map(|b| vec![(b >> 2) & 1, (b >> 1) & 1, b & 1])
            .filter(|w| !w.windows(2).any(|p| p == [1, 1]))
            .collect();
        assert_eq!(golden, brute);
        assert_eq!(golden.len(), 5);
        assert_eq!(fixtures::cycle2().enumerate_words(4).unwrap(), vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
    }

    #[test]
    fn enumeration_respects_cap() {
        let sft = Sft::full(4);
        // 4^14 = 2^28 words exceeds the default cap.
        assert_eq!(sft.enumerate_words(14), Err(Error::CapExceeded { cap: DEFAULT_ENUMERATION_CAP }));
    }

    #[test]
    fn simple_cycle_examples() {
        let labels = |sft: &Sft| {
            sft.enumerate_simple_cycles(2)
                .unwrap()
                .iter()
                .map(|c| c.label(2))
                .collect::<Vec<_>>()
        };
        assert_eq!(labels(&fixtures::full2()), ["0", "1", "01"]);
        assert_eq!(labels(&fixtures::golden()), ["0", "01"]);
        assert_eq!(labels(&fixtures::cycle2()), ["01"]);
    }

    #[test]
    fn cycles_must_be_primitive_and_closed() {
        let full = fixtures::full2();
        assert!(Cycle::new(&full, vec![0, 1, 0, 1]).is_err());
        assert!(Cycle::new(&fixtures::golden(), vec![1]).is_err());
        assert!(Cycle::new(&full, vec![0, 0, 1]).is_ok());
        assert_eq!(Cycle::new(&full, vec![1, 0]).unwrap().canonical().states(), &[0, 1]);
    }

    #[test]
    fn word_text_round_trip() {
        assert_eq!(parse_word("0101", 2).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(format_word(&[3, 11, 0], 12), "3,11,0");
        assert_eq!(parse_word("3,11,0", 12).unwrap(), vec![3, 11, 0]);
        assert!(parse_word("012", 2).is_err());
    }
}
