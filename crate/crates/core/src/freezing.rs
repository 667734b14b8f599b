//! Ergodic ratio optimization `Max^psi(phi)`, the residual entropy
//! `h_inf^psi(phi)`, sweeps of `beta -> P_psi(beta phi)` and the
//! zero-temperature limit.

use crate::error::{Error, Result};
use crate::induced::{bowen_root, induced_equilibrium, InducedProblem};
use crate::markov::MarkovMeasure;
use crate::potential::LocallyConstantPotential;
use crate::scalar::Scalar;
use crate::sft::{Cycle, Sft, Word};

/// Width at which the bisection on `lambda` stops.
pub const RATIO_TOL: f64 = 1e-12;

/// A cycle belongs to the maximizing subgraph when its ratio is within this
/// of the maximum.
pub const SUBGRAPH_TOL: f64 = 1e-9;

/// Default tolerance of [`detect_freezing`].
pub const FREEZING_TOL: f64 = 1e-7;

/// Default step of [`differentiability_check`].
pub const DIFFERENTIABILITY_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct CycleRatioResult<S> {
    /// `max over cycles of S phi / S psi`, equal to the exact ratio of `witness`.
    pub value: S,
    pub witness: Cycle,
    /// Edges lying on some cycle of ratio at least `value - SUBGRAPH_TOL`,
    /// sorted.
    pub subgraph_edges: Vec<(usize, usize)>,
    /// Karp evaluations spent.
    pub iterations: usize,
}

fn symbol_values<S: Scalar>(sft: &Sft, pot: &LocallyConstantPotential<S>) -> Result<Vec<S>> {
    if pot.range() != 1 || pot.alphabet_size() != sft.alphabet_size() {
        return Err(Error::RangeMismatch(format!(
            "{} must be a range-1 potential on the shift; recode first",
            pot.label()
        )));
    }
    Ok((0..sft.alphabet_size()).map(|i| pot.value(&[i]).expect("range-1 potential")).collect())
}

fn scaling_values<S: Scalar>(sft: &Sft, psi: &LocallyConstantPotential<S>) -> Result<Vec<S>> {
    let v = symbol_values(sft, psi)?;
    let min = v.iter().copied().fold(S::infinity(), S::min);
    if !(min > S::zero()) {
        return Err(Error::NonPositiveScaling { min: min.to_f64_lossy() });
    }
    Ok(v)
}

/// Maximum cycle mean of the node weights `w` (edge `i -> j` weighs `w[i]`)
/// by Karp's recurrence, with a maximum-mean cycle read off the optimal
/// walk. Ties go to the smallest state index.
fn karp<S: Scalar>(sft: &Sft, w: &[S]) -> (S, Vec<usize>) {
    let k = sft.alphabet_size();
    let preds: Vec<Vec<usize>> = (0..k).map(|j| (0..k).filter(|&i| sft.allowed(i, j)).collect()).collect();
    let mut d = vec![vec![S::neg_infinity(); k]; k + 1];
    let mut back = vec![vec![usize::MAX; k]; k + 1];
    d[0].fill(S::zero());
    for t in 1..=k {
        for j in 0..k {
            for &i in &preds[j] {
                let cand = d[t - 1][i] + w[i];
                if cand > d[t][j] {
                    d[t][j] = cand;
                    back[t][j] = i;
                }
            }
        }
    }
    let mut best = (S::neg_infinity(), 0usize);
    for v in 0..k {
        if d[k][v] == S::neg_infinity() {
            continue;
        }
        let mean = (0..k)
            .map(|t| (d[k][v] - d[t][v]) / S::from_usize_lossy(k - t))
            .fold(S::infinity(), S::min);
        if mean > best.0 {
            best = (mean, v);
        }
    }
    let mut walk = vec![best.1; k + 1];
    for t in (1..=k).rev() {
        walk[t - 1] = back[t][walk[t]];
    }
    // Split the walk into simple cycles and keep the heaviest.
    let mut stack: Vec<usize> = Vec::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for &v in &walk {
        if let Some(pos) = stack.iter().position(|&s| s == v) {
            cycles.push(stack.split_off(pos));
        }
        stack.push(v);
    }
    let mean_of = |c: &[usize]| c.iter().map(|&s| w[s]).sum::<S>() / S::from_usize_lossy(c.len());
    let cycle = cycles
        .into_iter()
        .map(|c| canonical(&c))
        .max_by(|a, b| {
            mean_of(a)
                .partial_cmp(&mean_of(b))
                .expect("finite weights")
                .then_with(|| b.cmp(a))
        })
        .expect("a walk of k edges on k states repeats a state");
    (best.0, cycle)
}

fn canonical(states: &[usize]) -> Vec<usize> {
    let p = states.len();
    (0..p).map(|r| (0..p).map(|i| states[(r + i) % p]).collect::<Vec<_>>()).min().expect("non-empty")
}

fn cycle_ratio<S: Scalar>(states: &[usize], phi: &[S], psi: &[S]) -> S {
    let a: S = states.iter().map(|&s| phi[s]).sum();
    let b: S = states.iter().map(|&s| psi[s]).sum();
    a / b
}

/// `Max^psi(phi)`: the largest `S phi / S psi` over periodic orbits, found
/// by bisection on `lambda -> max cycle mean of (phi - lambda psi)` and
/// finished with exact cycle ratios.
pub fn max_cycle_ratio<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
) -> Result<CycleRatioResult<S>> {
    if !sft.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let p = symbol_values(sft, phi)?;
    let q = scaling_values(sft, psi)?;
    let shifted = |lambda: S| -> Vec<S> { p.iter().zip(&q).map(|(&a, &b)| a - lambda * b).collect() };
    // Cycle ratios are mediants of the symbol ratios.
    let ratios: Vec<S> = p.iter().zip(&q).map(|(&a, &b)| a / b).collect();
    let mut lo = ratios.iter().copied().fold(S::infinity(), S::min);
    let mut hi = ratios.iter().copied().fold(S::neg_infinity(), S::max);
    let mut iterations = 0;
    let width = S::tol(RATIO_TOL);
    while hi - lo > width * (S::one() + lo.abs().max(hi.abs())) {
        let mid = lo + (hi - lo) / S::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if karp(sft, &shifted(mid)).0 >= S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    iterations += 1;
    let mut witness = karp(sft, &shifted(lo)).1;
    let mut value = cycle_ratio(&witness, &p, &q);
    // Ratio iteration: a cycle of positive mean at the current value has a
    // strictly larger ratio.
    for _ in 0..64 {
        iterations += 1;
        let (mean, c) = karp(sft, &shifted(value));
        let r = cycle_ratio(&c, &p, &q);
        if mean > S::zero() && r > value {
            witness = c;
            value = r;
        } else {
            break;
        }
    }
    let subgraph_edges = critical_edges(sft, &shifted(value), &q);
    Ok(CycleRatioResult { value, witness: Cycle::new(sft, witness)?, subgraph_edges, iterations })
}

/// Edges `(i, j)` closing a walk `j -> ... -> i` whose weight together with
/// `w[i]` is at least `-SUBGRAPH_TOL` times the walk's `psi` mass, found
/// with all-pairs longest paths.
fn critical_edges<S: Scalar>(sft: &Sft, w: &[S], psi: &[S]) -> Vec<(usize, usize)> {
    let k = sft.alphabet_size();
    let mut len = vec![vec![S::neg_infinity(); k]; k];
    for a in 0..k {
        len[a][a] = S::zero();
        for b in sft.successors(a) {
            len[a][b] = len[a][b].max(w[a]);
        }
    }
    for c in 0..k {
        for a in 0..k {
            if len[a][c] == S::neg_infinity() {
                continue;
            }
            for b in 0..k {
                let through = len[a][c] + len[c][b];
                if through > len[a][b] {
                    len[a][b] = through;
                }
            }
        }
    }
    let psi_min = psi.iter().copied().fold(S::infinity(), S::min);
    let slack = S::lit(SUBGRAPH_TOL) * psi_min;
    let mut edges = Vec::new();
    for i in 0..k {
        for j in sft.successors(i) {
            if w[i] + len[j][i] >= -slack {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// `Max^psi(phi)` by listing every simple cycle.
pub fn max_cycle_ratio_brute_force<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
) -> Result<S> {
    let cycles = sft.enumerate_simple_cycles(sft.alphabet_size())?;
    let mut best = S::neg_infinity();
    for c in &cycles {
        best = best.max(phi.periodic_birkhoff(c)? / psi.periodic_birkhoff(c)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HInfinity<S> {
    pub value: S,
    /// Every cycle of the maximizing subgraph attains the maximum ratio, so
    /// `value` is exact; otherwise it is an upper bound.
    pub exact: bool,
    pub max_ratio: CycleRatioResult<S>,
}

/// Weakly connected components of an edge set; when every edge lies on a
/// cycle these are the strongly connected components.
fn edge_components(edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let n = edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for &(i, j) in edges {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => g.1.push((i, j)),
            None => groups.push((root, vec![(i, j)])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

/// `h_inf^psi(phi) = sup { h(mu) / int psi dmu : mu maximizes the ratio }`,
/// computed on the subshift spanned by the maximizing subgraph as the root
/// of `s -> P_sub(-s psi)`; zero on a component that is a single cycle.
pub fn h_infinity<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
) -> Result<HInfinity<S>> {
    let max_ratio = max_cycle_ratio(sft, phi, psi)?;
    if max_ratio.subgraph_edges.is_empty() {
        return Err(Error::EmptySubgraph);
    }
    let p = symbol_values(sft, phi)?;
    let q = scaling_values(sft, psi)?;
    let mut value = S::zero();
    let mut exact = true;
    for component in edge_components(&max_ratio.subgraph_edges) {
        let (sub, symbols) = sft.edge_subshift(&component)?;
        if component.len() == symbols.len() {
            // One successor per state: a single cycle, zero entropy.
            continue;
        }
        let w: Vec<S> = symbols.iter().map(|&s| p[s] - max_ratio.value * q[s]).collect();
        let negated: Vec<S> = w.iter().map(|&x| -x).collect();
        let min_mean = -karp(&sub, &negated).0;
        let psi_min = symbols.iter().map(|&s| q[s]).fold(S::infinity(), S::min);
        if min_mean < -S::lit(SUBGRAPH_TOL) * psi_min {
            exact = false;
        }
        let zero = LocallyConstantPotential::constant(&sub, S::zero(), "0");
        let sub_psi: Vec<S> = symbols.iter().map(|&s| q[s]).collect();
        let sub_psi = LocallyConstantPotential::symbolwise(&sub, &sub_psi, psi.label().to_string())?;
        let h = bowen_root(&InducedProblem::new(&sub, zero, sub_psi, "")?)?.value;
        value = value.max(h);
    }
    Ok(HInfinity { value, exact, max_ratio })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaSweep<S> {
    pub betas: Vec<S>,
    /// `P_psi(beta phi)`
    pub pressures: Vec<S>,
    /// `int phi dmu_beta / int psi dmu_beta` for the Gibbs equilibrium `mu_beta`.
    pub ratios: Vec<S>,
    /// `h(mu_beta) / int psi dmu_beta`
    pub scaled_entropies: Vec<S>,
    pub max_ratio: S,
    pub h_infinity: S,
    pub h_infinity_exact: bool,
    /// `P_psi(beta phi) - (beta Max + h_inf)`
    pub gaps: Vec<S>,
    /// The range-1 presentation is mixing, so every equilibrium is a fully
    /// supported mixing Gibbs measure.
    pub mixing: bool,
}

impl<S: Scalar> BetaSweep<S> {
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// `beta Max + h_inf` at each grid point.
    pub fn asymptote(&self) -> Vec<S> {
        self.betas.iter().map(|&b| b * self.max_ratio + self.h_infinity).collect()
    }
}

fn check_grid<S: Scalar>(grid: &[S]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|b| !b.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("beta grid must be non-empty, finite and strictly increasing".into()));
    }
    Ok(())
}

/// Pressure, equilibrium statistics and the freezing asymptote along a grid
/// of inverse temperatures.
pub fn beta_sweep<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
    betas: &[S],
) -> Result<BetaSweep<S>> {
    check_grid(betas)?;
    let problem = InducedProblem::new(sft, phi.clone(), psi.clone(), "sweep")?.range_one()?;
    let (sft1, phi1, psi1) = (problem.sft(), problem.phi(), problem.psi());
    let h_inf = h_infinity(sft1, phi1, psi1)?;
    let mut sweep = BetaSweep {
        betas: betas.to_vec(),
        pressures: Vec::with_capacity(betas.len()),
        ratios: Vec::with_capacity(betas.len()),
        scaled_entropies: Vec::with_capacity(betas.len()),
        max_ratio: h_inf.max_ratio.value,
        h_infinity: h_inf.value,
        h_infinity_exact: h_inf.exact,
        gaps: Vec::with_capacity(betas.len()),
        mixing: sft1.is_primitive(),
    };
    for &beta in betas {
        let at = problem.with_phi(phi1.scale(beta))?;
        let pressure = bowen_root(&at)?.value;
        let mu = induced_equilibrium(&at)?;
        let psi_mass = mu.integrate(psi1)?;
        sweep.pressures.push(pressure);
        sweep.ratios.push(mu.integrate(phi1)? / psi_mass);
        sweep.scaled_entropies.push(mu.entropy() / psi_mass);
        sweep.gaps.push(pressure - (beta * sweep.max_ratio + sweep.h_infinity));
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FreezingVerdict<S> {
    FrozenAt(S),
    Asymptotic,
    Indeterminate,
}

/// Fewest grid points [`detect_freezing`] will judge.
pub const MIN_SWEEP_POINTS: usize = 6;

/// Reads the freezing behaviour off a sweep.
///
/// * all gaps at most `tol`: frozen from the grid start;
/// * gaps above `tol` followed by a tail at most `tol`: frozen where the
///   tail starts when the presentation is not mixing; on a mixing
///   presentation the tail counts as the decreasing gap below rounding
///   level and the sweep is read as asymptotic;
/// * positive, strictly decreasing gaps (nonincreasing once below `tol`)
///   whose last value is under a tenth of the first: asymptotic;
/// * otherwise indeterminate.
pub fn detect_freezing<S: Scalar>(sweep: &BetaSweep<S>, tol: S) -> FreezingVerdict<S> {
    let g = &sweep.gaps;
    if g.len() < MIN_SWEEP_POINTS || g.len() != sweep.betas.len() {
        return FreezingVerdict::Indeterminate;
    }
    if g.iter().all(|&x| x <= tol) {
        return FreezingVerdict::FrozenAt(sweep.betas[0]);
    }
    let tail = g.iter().rposition(|&x| !(x <= tol)).map_or(0, |i| i + 1);
    if tail < g.len() && !sweep.mixing {
        return FreezingVerdict::FrozenAt(sweep.betas[tail]);
    }
    let head = &g[..tail];
    let head_ok = head.iter().all(|&x| x > S::zero()) && head.windows(2).all(|w| w[1] < w[0]);
    let tail_ok = g[tail.saturating_sub(1)..].windows(2).all(|w| w[1] <= w[0]) && g[tail..].iter().all(|&x| x >= -tol);
    if head_ok && tail_ok && g[g.len() - 1] < g[0] / S::lit(10.0) {
        FreezingVerdict::Asymptotic
    } else {
        FreezingVerdict::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTemperaturePoint<S> {
    pub beta: S,
    /// Masses of every admissible cylinder of length `1..=depth`, shortest first.
    pub masses: Vec<(Word, S)>,
    pub ratio: S,
    /// `|ratio - Max|`
    pub ratio_error: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTemperatureReport<S> {
    pub points: Vec<ZeroTemperaturePoint<S>>,
    pub max_ratio: S,
    /// Largest change of any cylinder mass between consecutive schedule points.
    pub increments: Vec<S>,
    /// `max beta |ratio - Max|` over all but the last schedule point.
    pub rate_constant: S,
    /// `|ratio - Max| <= max(1e-6, C / beta)` at the last point.
    pub rate_ok: bool,
}

impl<S: Scalar> ZeroTemperatureReport<S> {
    pub fn final_increment(&self) -> Option<S> {
        self.increments.last().copied()
    }
}

/// Default schedule `1, 2, 4, ..., 64`.
pub fn default_schedule<S: Scalar>() -> Vec<S> {
    (0..7).map(|i| S::lit(f64::from(1u32 << i))).collect()
}

/// Tracks the Gibbs equilibria of `beta phi` as `beta` grows.
pub fn zero_temperature_limit<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
    schedule: &[S],
    depth: usize,
) -> Result<ZeroTemperatureReport<S>> {
    check_grid(schedule)?;
    if depth == 0 {
        return Err(Error::InvalidArgument("test depth must be at least 1".into()));
    }
    let problem = InducedProblem::new(sft, phi.clone(), psi.clone(), "zero temperature")?.range_one()?;
    let (sft1, phi1, psi1) = (problem.sft(), problem.phi(), problem.psi());
    let max_ratio = max_cycle_ratio(sft1, phi1, psi1)?.value;
    let mut points = Vec::with_capacity(schedule.len());
    for &beta in schedule {
        let mu: MarkovMeasure<S> = induced_equilibrium(&problem.with_phi(phi1.scale(beta))?)?;
        let mut masses = Vec::new();
        for len in 1..=depth {
            masses.extend(mu.cylinder_masses(len)?);
        }
        let ratio = mu.integrate(phi1)? / mu.integrate(psi1)?;
        points.push(ZeroTemperaturePoint { beta, masses, ratio, ratio_error: (ratio - max_ratio).abs() });
    }
    let increments: Vec<S> = points
        .windows(2)
        .map(|w| {
            w[0].masses
                .iter()
                .zip(&w[1].masses)
                .map(|(a, b)| (a.1 - b.1).abs())
                .fold(S::zero(), S::max)
        })
        .collect();
    let (last, rest) = points.split_last().expect("non-empty schedule");
    let rate_constant = rest.iter().map(|p| p.beta.abs() * p.ratio_error).fold(S::zero(), S::max);
    let rate_ok = last.ratio_error <= S::lit(1e-6).max(rate_constant / last.beta.abs());
    Ok(ZeroTemperatureReport { points, max_ratio, increments, rate_constant, rate_ok })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentiabilityReport<S> {
    pub beta: S,
    /// Central difference of `beta -> P_psi(beta phi)`.
    pub derivative: S,
    /// `int phi dmu / int psi dmu` for the equilibrium at `beta`.
    pub ratio: S,
    pub difference: S,
}

/// Compares the slope of the pressure curve at `beta` with the ratio of the
/// equilibrium state there.
pub fn differentiability_check<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
    beta: S,
    step: S,
) -> Result<DifferentiabilityReport<S>> {
    if !(step > S::zero()) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let problem = InducedProblem::new(sft, phi.clone(), psi.clone(), "")?.range_one()?;
    let (phi1, psi1) = (problem.phi(), problem.psi());
    let at = |b: S| -> Result<S> { Ok(bowen_root(&problem.with_phi(phi1.scale(b))?)?.value) };
    let derivative = (at(beta + step)? - at(beta - step)?) / (S::lit(2.0) * step);
    let mu = induced_equilibrium(&problem.with_phi(phi1.scale(beta))?)?;
    let ratio = mu.integrate(phi1)? / mu.integrate(psi1)?;
    Ok(DifferentiabilityReport { beta, derivative, ratio, difference: (derivative - ratio).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Potential};

    fn sym(sft: &Sft, v: &[f64]) -> Potential {
        Potential::symbolwise(sft, v, "p").unwrap()
    }

    #[test]
    fn karp_on_small_graphs() {
        let full = fixtures::full2();
        let (mean, cycle) = karp(&full, &[1.0, -1.0]);
        assert_eq!((mean, cycle), (1.0, vec![0]));
        let (mean, cycle) = karp(&fixtures::cycle2(), &[3.0, -1.0]);
        assert_eq!((mean, cycle), (1.0, vec![0, 1]));
        // Loop at 1 (mean 0.5) beats the 2-cycle (mean 0.25).
        let (mean, cycle) = karp(&full, &[0.0, 0.5]);
        assert_eq!((mean, cycle), (0.5, vec![1]));
    }

    #[test]
    fn max_ratio_examples() {
        let full = fixtures::full2();
        let r = max_cycle_ratio(&full, &sym(&full, &[1.0, 0.0]), &sym(&full, &[1.0, 2.0])).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.witness.states(), &[0]);
        assert_eq!(r.subgraph_edges, vec![(0, 0)]);

        let c = max_cycle_ratio(&full, &sym(&full, &[0.7, 0.7]), &sym(&full, &[1.0, 1.0])).unwrap();
        assert!((c.value - 0.7).abs() < 1e-15);
        assert_eq!(c.subgraph_edges.len(), 4);

        let cyc = fixtures::cycle2();
        let r = max_cycle_ratio(&cyc, &sym(&cyc, &[2.0, 0.0]), &sym(&cyc, &[1.0, 3.0])).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.witness.states(), &[0, 1]);
    }

    #[test]
    fn max_ratio_matches_enumeration() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (_, sft) in fixtures::all() {
            for _ in 0..30 {
                let phi = Potential::random(&sft, 1, -1.0, 1.0, &mut rng, "phi").unwrap();
                let psi = Potential::random(&sft, 1, 0.2, 2.0, &mut rng, "psi").unwrap();
                let fast = max_cycle_ratio(&sft, &phi, &psi).unwrap();
                let slow = max_cycle_ratio_brute_force(&sft, &phi, &psi).unwrap();
                assert!((fast.value - slow).abs() < 1e-12);
                let w = &fast.witness;
                let exact = phi.periodic_birkhoff(w).unwrap() / psi.periodic_birkhoff(w).unwrap();
                assert!((exact - fast.value).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn max_ratio_requires_range_one() {
        let full = fixtures::full2();
        let two = Potential::from_fn(&full, 2, "two", |_| 1.0).unwrap();
        assert!(matches!(max_cycle_ratio(&full, &two, &sym(&full, &[1.0, 1.0])), Err(Error::RangeMismatch(_))));
    }

    #[test]
    fn h_infinity_examples() {
        let full = fixtures::full2();
        let one = sym(&full, &[1.0, 1.0]);
        let h = h_infinity(&full, &sym(&full, &[1.0, 0.0]), &one).unwrap();
        assert_eq!(h.value, 0.0);
        assert!(h.exact);
        let h = h_infinity(&full, &sym(&full, &[0.3, 0.3]), &one).unwrap();
        assert!((h.value - 2f64.ln()).abs() < 1e-12 && h.exact);
        let golden = fixtures::golden();
        let h = h_infinity(&golden, &sym(&golden, &[0.0, 0.0]), &sym(&golden, &[1.0, 2.0])).unwrap();
        // Root of P_golden(-s psi) = 0 with psi = (1, 2): the weights solve
        // e^{-s} + e^{-3s} = 1.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let s = 0.5 * (lo + hi);
            if (-s).exp() + (-3.0 * s).exp() > 1.0 {
                lo = s;
            } else {
                hi = s;
            }
        }
        assert!((h.value - 0.5 * (lo + hi)).abs() < 1e-12, "{}", h.value);
    }

    #[test]
    fn h_infinity_flags_inexact_subgraph() {
        // Two loops of ratio 1 joined through a state of ratio 0: the joined
        // subgraph is not maximizing, but the two loops are separate
        // components, so the value stays exact.
        let sft = Sft::new(3, &[vec![1, 1, 0], vec![0, 0, 1], vec![1, 0, 1]]).unwrap();
        let h = h_infinity(&sft, &sym(&sft, &[1.0, 0.0, 1.0]), &sym(&sft, &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(h.max_ratio.subgraph_edges, vec![(0, 0), (2, 2)]);
        assert_eq!(h.value, 0.0);
        assert!(h.exact);
    }

    #[test]
    fn sweep_examples() {
        let full = fixtures::full2();
        let one = sym(&full, &[1.0, 1.0]);
        let betas: Vec<f64> = (1..=8).map(f64::from).collect();
        let s = beta_sweep(&full, &sym(&full, &[1.0, 0.0]), &one, &betas).unwrap();
        assert!((s.pressures[0] - (1.0 + 1f64.exp()).ln()).abs() < 1e-12);
        for (i, &b) in betas.iter().enumerate() {
            assert!((s.gaps[i] - (-b).exp().ln_1p()).abs() < 1e-12);
            assert!((s.ratios[i] - 1.0 / (1.0 + (-b).exp())).abs() < 1e-12);
        }
        assert_eq!(detect_freezing(&s, FREEZING_TOL), FreezingVerdict::Asymptotic);

        let c = beta_sweep(&full, &sym(&full, &[0.4, 0.4]), &one, &betas).unwrap();
        for (i, &b) in betas.iter().enumerate() {
            assert!((c.pressures[i] - (0.4 * b + 2f64.ln())).abs() < 1e-12);
        }
        assert_eq!(detect_freezing(&c, FREEZING_TOL), FreezingVerdict::FrozenAt(1.0));

        let cyc = fixtures::cycle2();
        let p = beta_sweep(&cyc, &sym(&cyc, &[2.0, -1.0]), &sym(&cyc, &[1.0, 3.0]), &betas).unwrap();
        for (i, &b) in betas.iter().enumerate() {
            assert!((p.pressures[i] - b * 0.25).abs() < 1e-12);
        }
        assert_eq!(detect_freezing(&p, FREEZING_TOL), FreezingVerdict::FrozenAt(1.0));
    }

    #[test]
    fn sweep_invariants_on_golden() {
        let golden = fixtures::golden();
        let betas: Vec<f64> = (0..12).map(|i| -2.0 + 0.5 * i as f64).collect();
        let s = beta_sweep(&golden, &sym(&golden, &[0.3, -0.8]), &sym(&golden, &[1.0, 1.7]), &betas).unwrap();
        for w in s.pressures.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8);
        }
        for w in s.ratios.windows(2) {
            assert!(w[1] >= w[0] - 1e-8);
        }
        assert!(s.gaps.iter().all(|&g| g >= -1e-7));
    }

    #[test]
    fn verdicts_on_synthetic_gaps() {
        let base = |gaps: Vec<f64>, mixing: bool| BetaSweep {
            betas: (0..gaps.len()).map(|i| i as f64).collect(),
            pressures: vec![0.0; gaps.len()],
            ratios: vec![0.0; gaps.len()],
            scaled_entropies: vec![0.0; gaps.len()],
            max_ratio: 0.0,
            h_infinity: 0.0,
            h_infinity_exact: true,
            gaps,
            mixing,
        };
        let frozen_late = base(vec![1.0, 0.5, 0.0, 0.0, 0.0, 0.0], false);
        assert_eq!(detect_freezing(&frozen_late, 1e-7), FreezingVerdict::FrozenAt(2.0));
        let underflow = base(vec![1.0, 0.5, 0.0, 0.0, 0.0, 0.0], true);
        assert_eq!(detect_freezing(&underflow, 1e-7), FreezingVerdict::Asymptotic);
        let bumpy = base(vec![1.0, 0.5, 0.7, 0.2, 0.1, 0.05], true);
        assert_eq!(detect_freezing(&bumpy, 1e-7), FreezingVerdict::Indeterminate);
        let short = base(vec![0.0; 5], true);
        assert_eq!(detect_freezing(&short, 1e-7), FreezingVerdict::Indeterminate);
    }

    #[test]
    fn zero_temperature_examples() {
        let full = fixtures::full2();
        let one = sym(&full, &[1.0, 1.0]);
        let r = zero_temperature_limit(&full, &sym(&full, &[1.0, 0.0]), &one, &default_schedule(), 2).unwrap();
        let last = r.points.last().unwrap();
        assert_eq!(last.beta, 64.0);
        assert!((last.masses[0].1 - 1.0).abs() < 1e-10);
        assert!(last.ratio_error < 1e-10);
        assert!(r.final_increment().unwrap() < 1e-9);
        assert!(r.rate_ok);

        let flat = zero_temperature_limit(&full, &sym(&full, &[0.2, 0.2]), &one, &default_schedule(), 3).unwrap();
        assert!(flat.increments.iter().all(|&d| d < 1e-14));
    }

    #[test]
    fn differentiability_examples() {
        let full = fixtures::full2();
        let one = sym(&full, &[1.0, 1.0]);
        let d = differentiability_check(&full, &sym(&full, &[1.0, 0.0]), &one, 1.0, DIFFERENTIABILITY_STEP).unwrap();
        let e = 1f64.exp();
        assert!((d.derivative - e / (1.0 + e)).abs() < 1e-5);
        assert!(d.difference < 1e-5);
        let c = differentiability_check(&full, &sym(&full, &[0.3, 0.3]), &one, 2.0, DIFFERENTIABILITY_STEP).unwrap();
        assert!((c.derivative - 0.3).abs() < 1e-9);
        let cyc = fixtures::cycle2();
        let p = differentiability_check(&cyc, &sym(&cyc, &[2.0, -1.0]), &sym(&cyc, &[1.0, 3.0]), 0.5, 1e-4).unwrap();
        assert!((p.derivative - 0.25).abs() < 1e-9 && (p.ratio - 0.25).abs() < 1e-12);
    }
}
