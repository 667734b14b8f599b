//! Nonlinear pressure `P^F(Phi)`, the family `G_beta(a, b) = F(a) - beta b`
//! and nonlinear induced pressure `P_psi^F(Phi)`.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classical::{Diagnostics, Method, PressureResult};
use crate::error::{Error, Result};
use crate::induced::level_set_estimate;
use crate::linalg::{symmetric_eigenvalues, SquareMatrix};
use crate::markov::MarkovMeasure;
use crate::optimize::{optimize_markov, OptimizeOptions};
use crate::potential::LocallyConstantPotential;
use crate::recode::{higher_block_recode, permute_symbols, to_range_one};
use crate::report::{Check, Report};
use crate::scalar::Scalar;
use crate::sft::Sft;
use crate::walk::{cylinder_log_sum, Walk};

/// Eigenvalues of `Q` above `-PSD_TOL` count as nonnegative.
const PSD_TOL: f64 = 1e-10;

/// Word length whose Birkhoff averages stand in for the hull of `Phi(X)`
/// when bracketing roots.
pub const HULL_DEPTH: usize = 8;

/// Residual accepted for `P^{G_beta}` at the nonlinear induced root.
pub const ROOT_RESIDUAL: f64 = 1e-6;

/// Gap between the direct and variational values that is flagged for a
/// non-convex `F`.
pub const HEURISTIC_GAP: f64 = 1e-2;

type Evaluator<S> = Arc<dyn Fn(&[S]) -> S + Send + Sync>;

#[derive(Clone)]
pub enum FunctionalKind<S> {
    /// `F(x) = <c, x>`
    Linear(Vec<S>),
    /// `F(x) = x^T Q x + <c, x>` with `Q` symmetric.
    Quadratic { q: SquareMatrix<S>, c: Vec<S> },
    Custom(Evaluator<S>),
}

impl<S: fmt::Debug> fmt::Debug for FunctionalKind<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalKind::Linear(c) => f.debug_tuple("Linear").field(c).finish(),
            FunctionalKind::Quadratic { q, c } => f.debug_struct("Quadratic").field("q", q).field("c", c).finish(),
            FunctionalKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A continuous `F: R^d -> R`.
#[derive(Debug, Clone)]
pub struct NonlinearFunctional<S> {
    dimension: usize,
    kind: FunctionalKind<S>,
    convex: bool,
    label: String,
}

impl<S: Scalar> NonlinearFunctional<S> {
    pub fn linear(c: Vec<S>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidArgument("functional needs dimension at least 1".into()));
        }
        Ok(Self { dimension: c.len(), kind: FunctionalKind::Linear(c), convex: true, label: "linear".into() })
    }

    /// `F = 0` on `R^d`.
    pub fn zero(dimension: usize) -> Result<Self> {
        Self::linear(vec![S::zero(); dimension]).map(|f| f.with_label("zero"))
    }

    /// Convexity is decided from the eigenvalues of `Q`.
    pub fn quadratic(q: SquareMatrix<S>, c: Vec<S>) -> Result<Self> {
        let d = q.dim();
        if d == 0 || c.len() != d {
            return Err(Error::InvalidArgument(format!("quadratic form of size {d} with {} linear terms", c.len())));
        }
        for i in 0..d {
            for j in 0..i {
                if (q[(i, j)] - q[(j, i)]).abs() > S::tol(1e-12) * (S::one() + q[(i, j)].abs()) {
                    return Err(Error::InvalidArgument("quadratic form must be symmetric".into()));
                }
            }
        }
        let convex = symmetric_eigenvalues(&q).iter().all(|&e| e >= -S::lit(PSD_TOL));
        Ok(Self { dimension: d, kind: FunctionalKind::Quadratic { q, c }, convex, label: "quadratic".into() })
    }

    /// `F(x) = x^2` on `R`.
    pub fn square() -> Self {
        Self::quadratic(SquareMatrix::from_fn(1, |_, _| S::one()), vec![S::zero()])
            .expect("1x1 form")
            .with_label("x^2")
    }

    /// An arbitrary evaluator; `convex` is the caller's claim.
    pub fn custom(dimension: usize, convex: bool, f: impl Fn(&[S]) -> S + Send + Sync + 'static) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("functional needs dimension at least 1".into()));
        }
        Ok(Self { dimension, kind: FunctionalKind::Custom(Arc::new(f)), convex, label: "custom".into() })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &FunctionalKind<S> {
        &self.kind
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, FunctionalKind::Linear(_))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluate(&self, x: &[S]) -> S {
        match &self.kind {
            FunctionalKind::Linear(c) => dot(c, x),
            FunctionalKind::Quadratic { q, c } => dot(x, &q.mul_vec(x)) + dot(c, x),
            FunctionalKind::Custom(f) => f(x),
        }
    }

    /// `n F(sums / n)`, written so that a linear `F` returns `<c, sums>`
    /// with no division.
    pub fn extensive(&self, sums: &[S], n: usize) -> S {
        let n_s = S::from_usize_lossy(n);
        match &self.kind {
            FunctionalKind::Linear(c) => dot(c, sums),
            FunctionalKind::Quadratic { q, c } => dot(sums, &q.mul_vec(sums)) / n_s + dot(c, sums),
            FunctionalKind::Custom(f) => {
                let avg: Vec<S> = sums.iter().map(|&s| s / n_s).collect();
                n_s * f(&avg)
            }
        }
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `Phi = (phi_1, ..., phi_d)` on a common shift.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialVector<S> {
    components: Vec<LocallyConstantPotential<S>>,
}

impl<S: Scalar> PotentialVector<S> {
    pub fn new(sft: &Sft, components: Vec<LocallyConstantPotential<S>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("potential vector needs at least one component".into()));
        }
        for c in &components {
            if c.alphabet_size() != sft.alphabet_size() || !c.is_defined_on(sft) {
                return Err(Error::RangeMismatch(format!("component {} does not live on the shift", c.label())));
            }
        }
        Ok(Self { components })
    }

    pub fn single(sft: &Sft, phi: LocallyConstantPotential<S>) -> Result<Self> {
        Self::new(sft, vec![phi])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LocallyConstantPotential<S>] {
        &self.components
    }

    pub fn range(&self) -> usize {
        self.components.iter().map(|c| c.range()).max().unwrap_or(1)
    }

    fn refs(&self) -> Vec<&LocallyConstantPotential<S>> {
        self.components.iter().collect()
    }
}

fn check_dims<S: Scalar>(phi: &PotentialVector<S>, f: &NonlinearFunctional<S>) -> Result<()> {
    if phi.dim() != f.dimension() {
        return Err(Error::InvalidArgument(format!(
            "functional of dimension {} applied to {} potentials",
            f.dimension(),
            phi.dim()
        )));
    }
    Ok(())
}

/// `(1/n) log sum exp[n F(S_n Phi(w) / n)]` over admissible `(n + r - 1)`-words.
pub fn nonlinear_direct<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    f: &NonlinearFunctional<S>,
    n: usize,
) -> Result<PressureResult<S>> {
    check_dims(phi, f)?;
    if n == 0 || n < phi.range() {
        return Err(Error::InvalidArgument(format!("n = {n} is below the common range {}", phi.range())));
    }
    let pots = phi.refs();
    let (lse, words, max) = cylinder_log_sum(sft, &pots, n, |s| f.extensive(s, n))?;
    let mut diagnostics = Diagnostics::new(n, S::zero());
    diagnostics.words = words;
    diagnostics.overflow = max > S::lit(700.0);
    Ok(PressureResult { value: lse / S::from_usize_lossy(n), method: Method::NonlinearDirect, diagnostics })
}

/// Settings shared by the variational nonlinear routines.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NonlinearOptions {
    pub optimize: OptimizeOptions,
    /// Accept a non-convex `F`; the variational value is then only a lower
    /// bound with no matching upper bound.
    pub heuristic: bool,
}

impl NonlinearOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { optimize: OptimizeOptions::with_seed(seed), heuristic: false }
    }
}

#[derive(Debug, Clone)]
pub struct VariationalResult<S> {
    /// Optimal measure, on the range-1 presentation of the inputs.
    pub measure: MarkovMeasure<S>,
    pub value: S,
    pub heuristic: bool,
}

/// Recodes `pots` to range 1 and maximizes `objective(h, integrals)` over
/// Markov measures of the recoded shift.
fn maximize_over_measures<S: Scalar>(
    sft: &Sft,
    pots: &[&LocallyConstantPotential<S>],
    options: OptimizeOptions,
    mut objective: impl FnMut(S, &[S]) -> S,
) -> Result<(MarkovMeasure<S>, S, usize)> {
    let recoded = to_range_one(sft, pots)?;
    let mut integrals = vec![S::zero(); pots.len()];
    let result = optimize_markov(
        &recoded.sft,
        |mu| {
            for (slot, p) in integrals.iter_mut().zip(&recoded.potentials) {
                *slot = mu.integrate(p).unwrap_or(S::nan());
            }
            objective(mu.entropy(), &integrals)
        },
        options,
    )?;
    Ok((result.measure, result.value, result.evaluations))
}

/// `sup { h(mu) + F(int Phi dmu) }` over Markov measures; a lower bound for
/// `P^F(Phi)` that is sharp for convex `F`.
pub fn nonlinear_variational<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    f: &NonlinearFunctional<S>,
    options: NonlinearOptions,
) -> Result<VariationalResult<S>> {
    check_dims(phi, f)?;
    if !f.is_convex() && !options.heuristic {
        return Err(Error::NonConvexWithoutAcknowledgement);
    }
    let (measure, value, _) = maximize_over_measures(sft, &phi.refs(), options.optimize, |h, a| h + f.evaluate(a))?;
    Ok(VariationalResult { measure, value, heuristic: !f.is_convex() })
}

/// Which estimator evaluates `P^{G_beta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GBetaMethod {
    Direct { n: usize },
    Variational(NonlinearOptions),
}

fn scaling_vector<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    psi: &LocallyConstantPotential<S>,
) -> Result<Vec<LocallyConstantPotential<S>>> {
    if psi.alphabet_size() != sft.alphabet_size() || !psi.is_defined_on(sft) {
        return Err(Error::RangeMismatch("psi does not live on the shift".into()));
    }
    let min = psi.min_value();
    if !(min > S::zero()) {
        return Err(Error::NonPositiveScaling { min: min.to_f64_lossy() });
    }
    let mut all = phi.components().to_vec();
    all.push(psi.clone());
    Ok(all)
}

/// `P^{G_beta}(Phi, psi)` with `G_beta(a, b) = F(a) - beta b`.
pub fn g_beta_pressure<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    psi: &LocallyConstantPotential<S>,
    f: &NonlinearFunctional<S>,
    beta: S,
    method: GBetaMethod,
) -> Result<PressureResult<S>> {
    check_dims(phi, f)?;
    let all = scaling_vector(sft, phi, psi)?;
    let pots: Vec<&LocallyConstantPotential<S>> = all.iter().collect();
    let d = phi.dim();
    match method {
        GBetaMethod::Direct { n } => {
            let r = all.iter().map(|p| p.range()).max().unwrap_or(1);
            if n == 0 || n < r {
                return Err(Error::InvalidArgument(format!("n = {n} is below the common range {r}")));
            }
            let (lse, words, max) = cylinder_log_sum(sft, &pots, n, |s| f.extensive(&s[..d], n) - beta * s[d])?;
            let mut diagnostics = Diagnostics::new(n, S::zero());
            diagnostics.words = words;
            diagnostics.overflow = max > S::lit(700.0);
            Ok(PressureResult { value: lse / S::from_usize_lossy(n), method: Method::NonlinearDirect, diagnostics })
        }
        GBetaMethod::Variational(options) => {
            if !f.is_convex() && !options.heuristic {
                return Err(Error::NonConvexWithoutAcknowledgement);
            }
            let (_, value, evaluations) =
                maximize_over_measures(sft, &pots, options.optimize, |h, a| h + f.evaluate(&a[..d]) - beta * a[d])?;
            let mut diagnostics = Diagnostics::new(evaluations, S::zero());
            if !f.is_convex() {
                diagnostics.notes.push("heuristic: F is not convex".into());
            }
            Ok(PressureResult { value, method: Method::Variational, diagnostics })
        }
    }
}

/// Smallest and largest `F` over the Birkhoff averages of all words at
/// depth [`HULL_DEPTH`].
pub fn hull_bounds<S: Scalar>(sft: &Sft, phi: &PotentialVector<S>, f: &NonlinearFunctional<S>) -> Result<(S, S)> {
    check_dims(phi, f)?;
    let pots = phi.refs();
    let n = HULL_DEPTH.max(phi.range());
    let (mut lo, mut hi) = (S::infinity(), S::neg_infinity());
    let mut avg = vec![S::zero(); pots.len()];
    let nn = S::from_usize_lossy(n);
    Walk::new(sft, &pots, n + phi.range() - 1).run(
        |_, _| true,
        |_, sums| {
            for (a, s) in avg.iter_mut().zip(sums) {
                *a = s[n] / nn;
            }
            let v = f.evaluate(&avg);
            lo = lo.min(v);
            hi = hi.max(v);
        },
    )?;
    Ok((lo, hi))
}

/// Maximum number of times the root bracket is doubled before giving up.
const BRACKET_WIDENINGS: usize = 8;

/// Bisection halts once the bracket is this narrow.
const ROOT_WIDTH: f64 = 1e-10;

/// `P_psi^F(Phi)`: the root of the strictly decreasing map
/// `beta -> P^{G_beta}(Phi, psi)`, evaluated variationally.
pub fn nonlinear_induced_root<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    psi: &LocallyConstantPotential<S>,
    f: &NonlinearFunctional<S>,
    options: NonlinearOptions,
) -> Result<PressureResult<S>> {
    check_dims(phi, f)?;
    if !f.is_convex() && !options.heuristic {
        return Err(Error::NonConvexF);
    }
    if !sft.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    scaling_vector(sft, phi, psi)?;
    let (f_min, f_max) = hull_bounds(sft, phi, f)?;
    let (m, big_m) = (psi.min_value(), psi.max_value());
    let log_k = S::from_usize_lossy(sft.alphabet_size()).ln();
    let mut lo = (f_min / big_m).min(f_min / m) - S::one();
    let mut hi = ((log_k + f_max) / m).max((log_k + f_max) / big_m) + S::one();
    let method = GBetaMethod::Variational(options);
    let p = |beta: S| g_beta_pressure(sft, phi, psi, f, beta, method).map(|r| r.value);
    let mut widenings = 0;
    loop {
        let (p_lo, p_hi) = (p(lo)?, p(hi)?);
        if p_lo >= S::zero() && p_hi <= S::zero() {
            break;
        }
        if widenings == BRACKET_WIDENINGS {
            return Err(Error::BracketFailure { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        let width = hi - lo;
        if p_lo < S::zero() {
            lo -= width;
        }
        if p_hi > S::zero() {
            hi += width;
        }
        widenings += 1;
    }
    let bracket = (lo, hi);
    let width_tol = S::tol(ROOT_WIDTH);
    let mut iterations = 0;
    while hi - lo > width_tol && iterations < 200 {
        let mid = lo + (hi - lo) / S::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if p(mid)? > S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = lo + (hi - lo) / S::lit(2.0);
    let mut diagnostics = Diagnostics::new(iterations, p(root)?.abs());
    diagnostics.bracket = Some(bracket);
    if !f.is_convex() {
        diagnostics.notes.push("heuristic: F is not convex, so the root characterization is unproven".into());
    }
    if diagnostics.residual > S::lit(ROOT_RESIDUAL) {
        diagnostics.notes.push(format!("residual {} exceeds {ROOT_RESIDUAL}", diagnostics.residual));
    }
    Ok(PressureResult { value: root, method: Method::Root, diagnostics })
}

/// `(1/T) log sum_{n in S_T} sum_C sup exp[n F(S_n Phi / n)]`, with the
/// same level sets and cylinder convention as the linear direct estimator.
pub fn nonlinear_induced_direct<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    psi: &LocallyConstantPotential<S>,
    f: &NonlinearFunctional<S>,
    t: S,
    q: usize,
) -> Result<PressureResult<S>> {
    check_dims(phi, f)?;
    let all = scaling_vector(sft, phi, psi)?;
    let pots: Vec<&LocallyConstantPotential<S>> = all.iter().collect();
    let d = phi.dim();
    level_set_estimate(sft, &pots, d, t, q, Method::DirectInduced, |s, n| f.extensive(&s[..d], n))
}

/// Streaming `log sum exp`.
#[derive(Debug, Clone, Copy)]
struct LogAccumulator<S> {
    max: S,
    sum: S,
}

impl<S: Scalar> LogAccumulator<S> {
    fn new() -> Self {
        Self { max: S::neg_infinity(), sum: S::zero() }
    }

    fn add(&mut self, x: S) {
        if x == S::neg_infinity() {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + S::one();
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    fn value(&self) -> S {
        if self.max == S::neg_infinity() {
            S::neg_infinity()
        } else {
            self.max + self.sum.ln()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow<S> {
    pub beta: S,
    /// `log I(n)` for `n = 1..=n_max`, where `I(n)` sums
    /// `exp[n F(S_n Phi / n) - beta S_n psi]` over the cylinders with
    /// `S_n psi > T`.
    pub log_increments: Vec<S>,
    /// `log sum_{n <= n_max} I(n)`
    pub log_partial_sum: S,
    /// `I(n_max) > I(n_max - 1)`
    pub growing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan<S> {
    pub rows: Vec<ThresholdRow<S>>,
    /// Last growing and first decaying grid point, when both exist.
    pub threshold: Option<(S, S)>,
}

/// Largest `n_max` accepted by [`r_threshold_scan`].
pub const MAX_SCAN_DEPTH: usize = 24;

/// Partial sums of the series whose convergence in `beta` locates
/// `P_psi^F(Phi)` from above. Each increment `I(n)` is evaluated on the
/// `(n + r - 1)`-cylinders, on which every Birkhoff sum is exact; only the
/// cylinders with `S_n psi > T` contribute.
pub fn r_threshold_scan<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    psi: &LocallyConstantPotential<S>,
    f: &NonlinearFunctional<S>,
    beta_grid: &[S],
    n_max: usize,
    t: S,
) -> Result<ThresholdScan<S>> {
    check_dims(phi, f)?;
    if beta_grid.is_empty() || beta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("beta grid must be non-empty and strictly increasing".into()));
    }
    if !(2..=MAX_SCAN_DEPTH).contains(&n_max) {
        return Err(Error::InvalidArgument(format!("n_max must lie in 2..={MAX_SCAN_DEPTH}, got {n_max}")));
    }
    let all = scaling_vector(sft, phi, psi)?;
    let pots: Vec<&LocallyConstantPotential<S>> = all.iter().collect();
    let d = phi.dim();
    let r = all.iter().map(|p| p.range()).max().unwrap_or(1);
    let mut acc = vec![vec![LogAccumulator::new(); n_max]; beta_grid.len()];
    let mut birkhoff = vec![S::zero(); pots.len()];
    Walk::new(sft, &pots, n_max + r - 1).run(
        |word, sums| {
            if word.len() < r {
                return true;
            }
            let n = word.len() + 1 - r;
            for (b, s) in birkhoff.iter_mut().zip(sums) {
                *b = s[n];
            }
            if birkhoff[d] > t {
                let a = f.extensive(&birkhoff[..d], n);
                for (row, &beta) in acc.iter_mut().zip(beta_grid) {
                    row[n - 1].add(a - beta * birkhoff[d]);
                }
            }
            true
        },
        |_, _| {},
    )?;
    let rows: Vec<ThresholdRow<S>> = acc
        .iter()
        .zip(beta_grid)
        .map(|(row, &beta)| {
            let log_increments: Vec<S> = row.iter().map(LogAccumulator::value).collect();
            let mut total = LogAccumulator::new();
            for &l in &log_increments {
                total.add(l);
            }
            let growing = log_increments[n_max - 1] > log_increments[n_max - 2];
            ThresholdRow { beta, log_increments, log_partial_sum: total.value(), growing }
        })
        .collect();
    let threshold = rows
        .windows(2)
        .find(|w| w[0].growing && !w[1].growing)
        .map(|w| (w[0].beta, w[1].beta));
    Ok(ThresholdScan { rows, threshold })
}

/// Direct and variational values of `P^F` side by side; for a non-convex
/// `F` only the direct value is backed by the definition.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicComparison<S> {
    pub direct: S,
    pub variational: S,
    /// The two differ by more than [`HEURISTIC_GAP`].
    pub flagged: bool,
}

pub fn heuristic_comparison<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    f: &NonlinearFunctional<S>,
    n: usize,
    options: NonlinearOptions,
) -> Result<HeuristicComparison<S>> {
    let direct = nonlinear_direct(sft, phi, f, n)?.value;
    let variational =
        nonlinear_variational(sft, phi, f, NonlinearOptions { heuristic: true, ..options })?.value;
    let flagged = (direct - variational).abs() > S::lit(HEURISTIC_GAP);
    Ok(HeuristicComparison { direct, variational, flagged })
}

/// Tolerances of [`conjugacy_invariance_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugacyTolerances {
    /// Values computed by enumeration or spectrally, under relabelling.
    pub permutation: f64,
    /// Values found by the optimizer, under relabelling.
    pub permutation_variational: f64,
    /// Everything under 2-block recoding.
    pub recoding: f64,
}

impl Default for ConjugacyTolerances {
    fn default() -> Self {
        Self { permutation: 1e-12, permutation_variational: 1e-9, recoding: 1e-6 }
    }
}

/// Word length of the direct estimates compared by the conjugacy check.
pub const CONJUGACY_DEPTH: usize = 10;

/// Compares pressures before and after a seeded random relabelling of the
/// symbols and after 2-block recoding: classical and induced pressure of
/// the first component, `P^F` by enumeration, the nonlinear induced root,
/// and the nonlinear induced direct estimate.
///
/// Under recoding the finite-`n` sums agree only when the original is
/// evaluated on the same words, so the original potentials are first
/// rewritten with range 2.
pub fn conjugacy_invariance_check<S: Scalar>(
    sft: &Sft,
    phi: &PotentialVector<S>,
    psi: &LocallyConstantPotential<S>,
    f: &NonlinearFunctional<S>,
    seed: u64,
    options: NonlinearOptions,
    tol: ConjugacyTolerances,
) -> Result<Report> {
    check_dims(phi, f)?;
    let all = scaling_vector(sft, phi, psi)?;
    let refs: Vec<&LocallyConstantPotential<S>> = all.iter().collect();
    let d = phi.dim();
    let lossy = |x: S| x.to_f64_lossy();
    let t_direct = S::lit(12.0) * psi.min_value();

    let values = |sft: &Sft, pots: &[LocallyConstantPotential<S>]| -> Result<[S; 5]> {
        let vector = PotentialVector::new(sft, pots[..d].to_vec())?;
        let scaling = &pots[d];
        let classical = crate::classical::topological_pressure(sft, &pots[0])?;
        let induced = crate::induced::induced_pressure(sft, &pots[0], scaling)?;
        let direct = nonlinear_direct(sft, &vector, f, CONJUGACY_DEPTH)?.value;
        let root = nonlinear_induced_root(sft, &vector, scaling, f, options)?.value;
        let induced_direct = nonlinear_induced_direct(sft, &vector, scaling, f, t_direct, 2)?.value;
        Ok([classical, induced, direct, root, induced_direct])
    };
    let names = ["classical pressure", "induced pressure", "nonlinear direct", "nonlinear induced root", "nonlinear induced direct"];
    let base = values(sft, &all)?;

    let mut perm: Vec<usize> = (0..sft.alphabet_size()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        perm.rotate_left(1);
    }
    let permuted = permute_symbols(sft, &refs, &perm)?;
    let after_perm = values(&permuted.sft, &permuted.potentials)?;

    let lifted: Vec<LocallyConstantPotential<S>> =
        all.iter().map(|p| p.extend_range(sft, 2.max(p.range()))).collect::<Result<_>>()?;
    let lifted_direct = {
        let vector = PotentialVector::new(sft, lifted[..d].to_vec())?;
        let direct = nonlinear_direct(sft, &vector, f, CONJUGACY_DEPTH)?.value;
        // Depth 3 on the original equals depth 2 on the 2-block alphabet.
        let induced_direct = nonlinear_induced_direct(sft, &vector, &lifted[d], f, t_direct, 3)?.value;
        (direct, induced_direct)
    };
    let blocks = higher_block_recode(sft, &refs, 2.max(refs.iter().map(|p| p.range()).max().unwrap_or(1)))?;
    let after_blocks = values(&blocks.sft, &blocks.potentials)?;

    let mut report = Report::new(format!("conjugacy (permutation {perm:?}, 2-block)"));
    for (i, name) in names.iter().enumerate() {
        let mut c = Check::new(format!("{name} under relabelling"));
        let t = if i == 3 { tol.permutation_variational } else { tol.permutation };
        c.close(lossy(base[i]), lossy(after_perm[i]), t);
        report.push(c);
        let mut c = Check::new(format!("{name} under 2-block recoding"));
        let reference = match i {
            2 => lifted_direct.0,
            4 => lifted_direct.1,
            _ => base[i],
        };
        c.close(lossy(reference), lossy(after_blocks[i]), tol.recoding);
        report.push(c);
    }
    Ok(report)
}
