//! Induced topological pressure `P_psi(phi)`: the root `beta` of
//! `P(phi - beta psi) = 0`, the definitional estimator over the level sets of
//! `S_n psi`, induced equilibrium states, directional derivatives and
//! tangent functionals.

use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{rpf_equilibrium, spectral_pressure, topological_pressure, Diagnostics, Method, PressureResult};
use crate::error::{Error, Result};
use crate::markov::MarkovMeasure;
use crate::optimize::LogitChart;
use crate::potential::LocallyConstantPotential;
use crate::recode::to_range_one;
use crate::report::{Check, Report};
use crate::scalar::{log_sum_exp, Scalar};
use crate::sft::Sft;
use crate::walk::Walk;

/// Bisection stops after this many halvings even if the interval has not
/// collapsed to adjacent floats.
const MAX_BISECTION: usize = 200;

/// A pair `(phi, psi)` with `psi > 0` on a shift.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedProblem<S> {
    sft: Sft,
    phi: LocallyConstantPotential<S>,
    psi: LocallyConstantPotential<S>,
    label: String,
}

impl<S: Scalar> InducedProblem<S> {
    pub fn new(
        sft: &Sft,
        phi: LocallyConstantPotential<S>,
        psi: LocallyConstantPotential<S>,
        label: impl Into<String>,
    ) -> Result<Self> {
        for p in [&phi, &psi] {
            if p.alphabet_size() != sft.alphabet_size() || !p.is_defined_on(sft) {
                return Err(Error::RangeMismatch(format!("potential {} does not live on the shift", p.label())));
            }
        }
        let min = psi.min_value();
        if !(min > S::zero()) {
            return Err(Error::NonPositiveScaling { min: min.to_f64_lossy() });
        }
        Ok(Self { sft: sft.clone(), phi, psi, label: label.into() })
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn phi(&self) -> &LocallyConstantPotential<S> {
        &self.phi
    }

    pub fn psi(&self) -> &LocallyConstantPotential<S> {
        &self.psi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `m = min psi`.
    pub fn min_scaling(&self) -> S {
        self.psi.min_value()
    }

    /// `M = max psi`.
    pub fn max_scaling(&self) -> S {
        self.psi.max_value()
    }

    /// The same pair with `phi` replaced.
    pub fn with_phi(&self, phi: LocallyConstantPotential<S>) -> Result<Self> {
        Self::new(&self.sft, phi, self.psi.clone(), self.label.clone())
    }

    /// The problem on the higher-block presentation where both potentials
    /// have range 1; the problem itself when they already do.
    pub fn range_one(&self) -> Result<Self> {
        if self.phi.range() == 1 && self.psi.range() == 1 {
            return Ok(self.clone());
        }
        let r = to_range_one(&self.sft, &[&self.phi, &self.psi])?;
        let mut pots = r.potentials.into_iter();
        let phi = pots.next().expect("two potentials");
        let psi = pots.next().expect("two potentials");
        Self::new(&r.sft, phi, psi, self.label.clone())
    }
}

/// Range-1 data for repeated evaluations of `beta -> P(phi - beta psi)`.
struct RootSolver<S> {
    sft: Sft,
    phi: Vec<S>,
    psi: Vec<S>,
}

impl<S: Scalar> RootSolver<S> {
    fn new(problem: &InducedProblem<S>) -> Result<Self> {
        if !problem.sft.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let p = problem.range_one()?;
        let values = |pot: &LocallyConstantPotential<S>| -> Vec<S> {
            (0..p.sft.alphabet_size()).map(|i| pot.value(&[i]).expect("range-1 potential")).collect()
        };
        Ok(Self { phi: values(&p.phi), psi: values(&p.psi), sft: p.sft })
    }

    fn pressure(&self, beta: S) -> Result<S> {
        let v: Vec<S> = self.phi.iter().zip(&self.psi).map(|(&a, &b)| a - beta * b).collect();
        let pot = LocallyConstantPotential::symbolwise(&self.sft, &v, "phi - beta psi")?;
        Ok(spectral_pressure(&self.sft, &pot)?.value)
    }

    /// Every ratio `(h + int phi) / int psi` lies in
    /// `[min phi / M, (log k + max phi) / m]` up to sign; the bracket takes
    /// the wider end of each and pads by one.
    fn bracket(&self) -> (S, S) {
        let fold = |v: &[S], f: fn(S, S) -> S, init: S| v.iter().copied().fold(init, f);
        let (min_phi, max_phi) = (fold(&self.phi, S::min, S::infinity()), fold(&self.phi, S::max, S::neg_infinity()));
        let (m, big_m) = (fold(&self.psi, S::min, S::infinity()), fold(&self.psi, S::max, S::neg_infinity()));
        let log_k = S::from_usize_lossy(self.sft.alphabet_size()).ln();
        let lo = (min_phi / big_m).min(min_phi / m) - S::one();
        let hi = ((log_k + max_phi) / m).max((log_k + max_phi) / big_m) + S::one();
        (lo, hi)
    }

    fn bisect(&self) -> Result<PressureResult<S>> {
        let (mut lo, mut hi) = self.bracket();
        let (p_lo, p_hi) = (self.pressure(lo)?, self.pressure(hi)?);
        if !(p_lo >= S::zero() && p_hi <= S::zero()) {
            return Err(Error::BracketFailure { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        let bracket = (lo, hi);
        let mut iterations = 0;
        while iterations < MAX_BISECTION {
            let mid = lo + (hi - lo) / S::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            let p = self.pressure(mid)?;
            iterations += 1;
            if p > S::zero() {
                lo = mid;
            } else if p < S::zero() {
                hi = mid;
            } else {
                lo = mid;
                hi = mid;
            }
        }
        let root = lo + (hi - lo) / S::lit(2.0);
        let mut diagnostics = Diagnostics::new(iterations, self.pressure(root)?.abs());
        diagnostics.bracket = Some(bracket);
        Ok(PressureResult { value: root, method: Method::Root, diagnostics })
    }
}

/// `P_psi(phi)` as the root of `beta -> P(phi - beta psi)`. A constant
/// `psi = s` takes the shortcut `P(phi) / s`.
pub fn bowen_root<S: Scalar>(problem: &InducedProblem<S>) -> Result<PressureResult<S>> {
    if !problem.psi.is_constant() {
        return bowen_root_bisection(problem);
    }
    let s = problem.psi.min_value();
    let value = topological_pressure(&problem.sft, &problem.phi)? / s;
    let residual = RootSolver::new(problem)?.pressure(value)?.abs();
    let mut diagnostics = Diagnostics::new(0, residual);
    diagnostics.notes.push("constant psi: P(phi) / psi".into());
    Ok(PressureResult { value, method: Method::Root, diagnostics })
}

/// The root by bisection, with no constant-`psi` shortcut.
pub fn bowen_root_bisection<S: Scalar>(problem: &InducedProblem<S>) -> Result<PressureResult<S>> {
    RootSolver::new(problem)?.bisect()
}

/// `P_psi(phi)` for a pair given directly.
pub fn induced_pressure<S: Scalar>(
    sft: &Sft,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
) -> Result<S> {
    let problem = InducedProblem::new(sft, phi.clone(), psi.clone(), "")?;
    Ok(bowen_root(&problem)?.value)
}

struct LevelSets<S> {
    exps: Vec<S>,
    split: usize,
    open: bool,
    best: S,
    included: bool,
    excluded: bool,
}

impl<S: Scalar> LevelSets<S> {
    fn flush(&mut self) {
        if self.open && self.included {
            self.exps.push(self.best);
            if self.excluded {
                self.split += 1;
            }
        }
        self.open = false;
        self.best = S::neg_infinity();
        self.included = false;
        self.excluded = false;
    }
}

/// Shared engine of the definitional induced estimators. `pots[psi]` is the
/// scaling potential; `exponent` receives the Birkhoff sums `S_n` of every
/// potential together with `n`.
pub(crate) fn level_set_estimate<S: Scalar>(
    sft: &Sft,
    pots: &[&LocallyConstantPotential<S>],
    psi: usize,
    t: S,
    q: usize,
    method: Method,
    mut exponent: impl FnMut(&[S], usize) -> S,
) -> Result<PressureResult<S>> {
    if !(t > S::zero()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be positive and finite, got {t}")));
    }
    if q == 0 {
        return Err(Error::InvalidArgument("depth q must be at least 1".into()));
    }
    let scaling = pots[psi];
    let m = scaling.min_value();
    if !(m > S::zero()) {
        return Err(Error::NonPositiveScaling { min: m.to_f64_lossy() });
    }
    let n_max = (t / m).floor().to_usize().ok_or_else(|| Error::InvalidArgument("T / min psi too large".into()))?;
    let r_max = pots.iter().map(|p| p.range()).max().unwrap_or(1);
    let state = RefCell::new(LevelSets {
        exps: Vec::new(),
        split: 0,
        open: false,
        best: S::neg_infinity(),
        included: false,
        excluded: false,
    });
    let mut birkhoff = vec![S::zero(); pots.len()];
    let mut members = 0usize;
    for n in 1..=n_max {
        let prefix = n + q - 1;
        let len = prefix.max(n + scaling.range()).max(n + r_max - 1);
        let before = state.borrow().exps.len();
        Walk::new(sft, pots, len).run(
            |word, sums| {
                let ps = &sums[psi];
                let complete = ps.len() - 1;
                let ok = if complete == 0 {
                    true
                } else if complete <= n {
                    ps[complete] <= t
                } else {
                    ps[n + 1] > t
                };
                let mut st = state.borrow_mut();
                if word.len() == prefix {
                    st.flush();
                    st.open = true;
                }
                if !ok && word.len() > prefix {
                    st.excluded = true;
                }
                ok
            },
            |_, sums| {
                for (b, s) in birkhoff.iter_mut().zip(sums) {
                    *b = s[n];
                }
                let e = exponent(&birkhoff, n);
                let mut st = state.borrow_mut();
                st.included = true;
                st.best = st.best.max(e);
            },
        )?;
        let mut st = state.borrow_mut();
        st.flush();
        if st.exps.len() > before {
            members += 1;
        }
    }
    let st = state.into_inner();
    if st.exps.is_empty() {
        return Err(Error::InvalidArgument(format!("no orbit segment fits under T = {t}")));
    }
    let max = st.exps.iter().copied().fold(S::neg_infinity(), S::max);
    let mut diagnostics = Diagnostics::new(members, S::zero());
    diagnostics.words = st.exps.len();
    diagnostics.split_cylinders = st.split;
    diagnostics.overflow = max > S::lit(700.0);
    Ok(PressureResult { value: log_sum_exp(&st.exps) / t, method, diagnostics })
}

/// `(1/T) log sum_{n in S_T} sum_C sup_{x in C, x in X_n} exp(S_n phi(x))`
/// where `X_n = {S_n psi <= T < S_{n+1} psi}`, `S_T` is the set of `n` with
/// `X_n` non-empty, and `C` runs over the `(n + q - 1)`-cylinders meeting
/// `X_n` (distinct such cylinders are `(n, 2^-q)`-separated).
///
/// Membership in `X_n` and the sums are evaluated exactly on words long
/// enough to fix `S_n phi` and `S_{n+1} psi`. A cylinder that meets `X_n`
/// without lying inside it is counted in `diagnostics.split_cylinders`;
/// this cannot happen once `q > range psi`.
pub fn direct_induced_estimate<S: Scalar>(
    problem: &InducedProblem<S>,
    t: S,
    q: usize,
) -> Result<PressureResult<S>> {
    let pots = [&problem.phi, &problem.psi];
    level_set_estimate(&problem.sft, &pots, 1, t, q, Method::DirectInduced, |s, _| s[0])
}

/// `(h(mu) + int phi dmu) / int psi dmu`.
pub fn variational_ratio<S: Scalar>(
    mu: &MarkovMeasure<S>,
    phi: &LocallyConstantPotential<S>,
    psi: &LocallyConstantPotential<S>,
) -> Result<S> {
    Ok((mu.entropy() + mu.integrate(phi)?) / mu.integrate(psi)?)
}

/// The Gibbs measure of `phi - beta* psi` at the root `beta*`. It lives on
/// the range-1 presentation `problem.range_one()`, which is the original
/// shift when both potentials have range 1.
pub fn induced_equilibrium<S: Scalar>(problem: &InducedProblem<S>) -> Result<MarkovMeasure<S>> {
    let p = problem.range_one()?;
    let root = bowen_root(&p)?.value;
    let pot = p.phi.sub_scaled(&p.sft, root, &p.psi)?;
    rpf_equilibrium(&p.sft, &pot)
}

/// Default step sizes for the difference quotients.
pub const DEFAULT_STEPS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientRow<S> {
    pub t: S,
    /// `(P(phi) - P(phi - t g)) / t`
    pub left: S,
    /// `(P(phi + t g) - P(phi)) / t`
    pub right: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalDerivatives<S> {
    pub d_minus: S,
    pub d_plus: S,
    pub table: Vec<QuotientRow<S>>,
}

/// One-sided difference quotients of `t -> P_psi(phi + t g)` at 0.
pub fn directional_derivatives<S: Scalar>(
    problem: &InducedProblem<S>,
    g: &LocallyConstantPotential<S>,
    steps: &[S],
) -> Result<DirectionalDerivatives<S>> {
    if steps.is_empty() || steps.iter().any(|&t| !(t > S::zero())) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("steps must be positive and strictly decreasing".into()));
    }
    let base = bowen_root(problem)?.value;
    let at = |t: S| -> Result<S> {
        let shifted = problem.phi.zip_with(&problem.sft, g, |a, b| a + t * b)?;
        Ok(bowen_root(&problem.with_phi(shifted)?)?.value)
    };
    let mut table = Vec::with_capacity(steps.len());
    for &t in steps {
        let right = (at(t)? - base) / t;
        let left = (base - at(-t)?) / t;
        table.push(QuotientRow { t, left, right });
    }
    let last = table.last().expect("non-empty steps");
    Ok(DirectionalDerivatives { d_minus: last.left, d_plus: last.right, table })
}

/// Slack allowed in the tangent inequality.
pub const TANGENT_SLACK: f64 = 1e-9;

/// Number of random test functions drawn when none are supplied.
pub const DEFAULT_TANGENT_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TangentViolation<S> {
    pub sample: usize,
    /// `P_psi(phi + g) - P_psi(phi)`
    pub increment: S,
    /// `int g dmu / int psi dmu`
    pub bound: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentReport<S> {
    pub samples: usize,
    pub violations: Vec<TangentViolation<S>>,
    /// Smallest `increment - bound` over the samples.
    pub min_margin: S,
}

impl<S: Scalar> TangentReport<S> {
    /// Sampling can refute the tangent property but never certify it.
    pub fn no_violation_found(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Range-1 test functions with entries uniform in `[-1, 1]`.
pub fn tangent_samples<S: Scalar>(sft: &Sft, count: usize, seed: u64) -> Result<Vec<LocallyConstantPotential<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| LocallyConstantPotential::random(sft, 1, -1.0, 1.0, &mut rng, format!("g{i}")))
        .collect()
}

/// Tests `P_psi(phi + g) - P_psi(phi) >= int g dmu / int psi dmu` for each
/// sample `g`. Without samples, draws [`DEFAULT_TANGENT_SAMPLES`] from `seed`.
pub fn tangent_check<S: Scalar>(
    problem: &InducedProblem<S>,
    mu: &MarkovMeasure<S>,
    samples: Option<&[LocallyConstantPotential<S>]>,
    seed: u64,
) -> Result<TangentReport<S>> {
    if mu.sft() != problem.sft() {
        return Err(Error::RangeMismatch("measure lives on a different shift".into()));
    }
    let drawn;
    let samples = match samples {
        Some(s) if !s.is_empty() => s,
        Some(_) => return Err(Error::InvalidArgument("no test functions".into())),
        None => {
            drawn = tangent_samples(problem.sft(), DEFAULT_TANGENT_SAMPLES, seed)?;
            &drawn[..]
        }
    };
    let base = bowen_root(problem)?.value;
    let psi_mass = mu.integrate(&problem.psi)?;
    let mut violations = Vec::new();
    let mut min_margin = S::infinity();
    for (i, g) in samples.iter().enumerate() {
        let shifted = problem.phi.add(&problem.sft, g)?;
        let increment = bowen_root(&problem.with_phi(shifted)?)?.value - base;
        let bound = mu.integrate(g)? / psi_mass;
        let margin = increment - bound;
        min_margin = min_margin.min(margin);
        if margin < -S::lit(TANGENT_SLACK) {
            violations.push(TangentViolation { sample: i, increment, bound });
        }
    }
    Ok(TangentReport { samples: samples.len(), violations, min_margin })
}

/// Tolerances for the property suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteTolerances {
    /// Allowed error on identities.
    pub identity: f64,
    /// Allowed violation of inequalities.
    pub slack: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self { identity: 1e-8, slack: 1e-9 }
    }
}

pub const SUITE_DRAWS: usize = 20;

/// Structural properties of `P_psi` on random draws: monotonicity, the
/// bounds through `min psi` and `max psi`, convexity, the scaling
/// inequalities, subadditivity, invariance under coboundaries, the shift
/// `P_psi(t psi) = t + P_psi(0)`, and the integral bound
/// `int phi dmu <= P_psi(phi) int psi dmu` characterizing invariant measures.
pub fn induced_property_suite<S: Scalar>(problem: &InducedProblem<S>, seed: u64) -> Result<Report> {
    induced_property_suite_with(problem, seed, SUITE_DRAWS, SuiteTolerances::default())
}

pub fn induced_property_suite_with<S: Scalar>(
    problem: &InducedProblem<S>,
    seed: u64,
    draws: usize,
    tol: SuiteTolerances,
) -> Result<Report> {
    let p = problem.range_one()?;
    let sft = &p.sft;
    let psi = &p.psi;
    let k = sft.alphabet_size();
    let f = |x: S| x.to_f64_lossy();
    let pressure = |phi: &LocallyConstantPotential<S>| induced_pressure(sft, phi, psi).map(f);
    let (m, big_m) = (f(p.min_scaling()), f(p.max_scaling()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = LogitChart::new(sft)?;
    let zero = LocallyConstantPotential::constant(sft, S::zero(), "0");
    let p_zero = pressure(&zero)?;

    let mut monotone = Check::new("monotonicity");
    let mut bounds = Check::new("bounds through min and max of psi");
    let mut convex = Check::new("convexity");
    let mut scaling = Check::new("scaling by c >= 1 and c <= 1");
    let mut subadditive = Check::new("subadditivity");
    let mut cohomology = Check::new("invariance under coboundaries");
    let mut along_psi = Check::new("P(t psi) = t + P(0)");
    let mut invariant = Check::new("invariant measures satisfy the integral bound");
    let mut non_invariant = Check::new("non-invariant measures violate the integral bound");

    for d in 0..draws {
        let noise = LocallyConstantPotential::random(sft, 1, -1.0, 1.0, &mut rng, "noise")?;
        let phi = p.phi.add(sft, &noise)?;
        let g = LocallyConstantPotential::random(sft, 1, -1.0, 1.0, &mut rng, "g")?;
        let bump = LocallyConstantPotential::random(sft, 1, 0.0, 1.0, &mut rng, "bump")?;
        let p_phi = pressure(&phi)?;
        let p_g = pressure(&g)?;
        let phi_g = phi.add(sft, &g)?;
        let p_phi_g = pressure(&phi_g)?;


        // As stated, the bounds need `g >= 0`; `bump` is such a `g`. For a
        // general `g` the denominators follow the sign of `inf g`, `sup g`.
        let p_bump = pressure(&phi.add(sft, &bump)?)?;
        bounds.at_most(p_phi + f(bump.min_value()) / big_m, p_bump, tol.slack);
        bounds.at_most(p_bump, p_phi + f(bump.max_value()) / m, tol.slack);
        let (inf_g, sup_g) = (f(g.min_value()), f(g.max_value()));
        let lower = if inf_g >= 0.0 { inf_g / big_m } else { inf_g / m };
        let upper = if sup_g >= 0.0 { sup_g / m } else { sup_g / big_m };
        bounds.at_most(p_phi + lower, p_phi_g, tol.slack);
        bounds.at_most(p_phi_g, p_phi + upper, tol.slack);
        monotone.at_most(p_phi, p_bump, tol.slack);

        let t: f64 = rng.gen_range(0.0..=1.0);
        let mix = phi.zip_with(sft, &g, |a, b| S::lit(t) * a + S::lit(1.0 - t) * b)?;
        convex.at_most(pressure(&mix)?, t * p_phi + (1.0 - t) * p_g, tol.slack);

        let c_up: f64 = rng.gen_range(1.0..=3.0);
        scaling.at_most(pressure(&phi.scale(S::lit(c_up)))?, c_up * p_phi, tol.slack);
        let c_down: f64 = rng.gen_range(-2.0..=1.0);
        scaling.at_most(c_down * p_phi, pressure(&phi.scale(S::lit(c_down)))?, tol.slack);

        subadditive.at_most(p_phi_g, p_phi + p_g, tol.slack);

        let h = LocallyConstantPotential::random(sft, 1, -1.0, 1.0, &mut rng, "h")?;
        let shifted = LocallyConstantPotential::from_fn(sft, 2, "phi + h - h o shift", |w| {
            phi.value(&w[..1]).expect("defined") + h.value(&w[..1]).expect("defined") - h.value(&w[1..]).expect("defined")
        })?;
        cohomology.close(pressure(&shifted)?, p_phi, tol.identity);

        let t_psi = (d % 5) as f64 - 2.0;
        along_psi.close(pressure(&psi.scale(S::lit(t_psi)))?, t_psi + p_zero, tol.identity);

        let logits: Vec<S> = (0..chart.dim()).map(|_| S::lit(rng.gen_range(-2.0..=2.0))).collect();
        let mu = chart.measure(&logits)?;
        invariant.at_most(f(mu.integrate(&phi)?), p_phi * f(mu.integrate(psi)?), tol.slack);

        // The chain of `mu` started from a point mass instead of its
        // stationary vector: for range-1 `h`, `int h o shift - int h` is
        // `(e_j P - e_j) . h`, and `n (h o shift - h)` has pressure `P(0)`.
        let j = d % k;
        let hv: Vec<f64> = (0..k).map(|i| f(h.value(&[i]).expect("defined"))).collect();
        let drift: f64 = (0..k).map(|i| f(mu.transition()[(j, i)]) * hv[i]).sum::<f64>() - hv[j];
        if drift.abs() > 1e-6 {
            let psi_mass = f(psi.value(&[j]).expect("defined"));
            let n = (2.0 * (p_zero * psi_mass).abs().max(1.0) / drift.abs()).ceil() + 1.0;
            let sign = drift.signum();
            let pushed = LocallyConstantPotential::from_fn(sft, 2, "n (h o shift - h)", |w| {
                S::lit(n * sign) * (h.value(&w[1..]).expect("defined") - h.value(&w[..1]).expect("defined"))
            })?;
            let lhs = n * drift.abs();
            let rhs = pressure(&pushed)? * psi_mass;
            non_invariant.record(lhs - rhs - tol.slack);
        }
    }
    let mut report = Report::new(problem.label());
    for c in [monotone, bounds, convex, scaling, subadditive, cohomology, along_psi, invariant, non_invariant] {
        report.push(c);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, Potential};

    const GOLDEN_LOG: f64 = 0.48121182505960347;

    fn problem(sft: &Sft, phi: &[f64], psi: &[f64]) -> InducedProblem<f64> {
        InducedProblem::new(
            sft,
            Potential::symbolwise(sft, phi, "phi").unwrap(),
            Potential::symbolwise(sft, psi, "psi").unwrap(),
            "test",
        )
        .unwrap()
    }

    /// Root of `e^-s + e^-2s = 1` by plain bisection on `u + u^2 = 1`.
    fn golden_oracle() -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + mid * mid < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        -(0.5 * (lo + hi)).ln()
    }

    #[test]
    fn root_examples() {
        let full = fixtures::full2();
        let r = bowen_root(&problem(&full, &[1.0, 0.0], &[1.0, 1.0])).unwrap();
        assert!((r.value - (1.0 + std::f64::consts::E).ln()).abs() < 1e-12);
        let g = bowen_root(&problem(&full, &[0.0, 0.0], &[1.0, 2.0])).unwrap();
        assert!((g.value - golden_oracle()).abs() < 1e-12);
        assert!((g.value - GOLDEN_LOG).abs() < 1e-12);
        assert!(g.diagnostics.residual <= 1e-10);
        let c = bowen_root(&problem(&fixtures::cycle2(), &[2.0, 0.0], &[1.0, 3.0])).unwrap();
        assert!((c.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_psi_shortcut_agrees_with_bisection() {
        let golden = fixtures::golden();
        let p = problem(&golden, &[0.3, -1.2], &[2.5, 2.5]);
        let fast = bowen_root(&p).unwrap().value;
        let slow = bowen_root_bisection(&p).unwrap().value;
        assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn non_positive_psi_is_rejected() {
        let full = fixtures::full2();
        let err = InducedProblem::new(
            &full,
            Potential::constant(&full, 0.0, "0"),
            Potential::symbolwise(&full, &[1.0, 0.0], "psi").unwrap(),
            "",
        )
        .unwrap_err();
        assert_eq!(err, Error::NonPositiveScaling { min: 0.0 });
    }

    #[test]
    fn higher_range_root() {
        // psi counts 2 on the word 11 and 1 elsewhere; against the 2-block
        // recoding done by hand.
        let full = fixtures::full2();
        let psi = Potential::from_fn(&full, 2, "psi", |w| if w == [1, 1] { 2.0 } else { 1.0 }).unwrap();
        let phi = Potential::symbolwise(&full, &[0.5, 0.0], "phi").unwrap();
        let p = InducedProblem::new(&full, phi, psi, "").unwrap();
        let r = to_range_one(&full, &[p.phi(), p.psi()]).unwrap();
        let by_hand = InducedProblem::new(&r.sft, r.potentials[0].clone(), r.potentials[1].clone(), "").unwrap();
        assert!((bowen_root(&p).unwrap().value - bowen_root(&by_hand).unwrap().value).abs() < 1e-14);
    }

    #[test]
    fn direct_estimate_examples() {
        let full = fixtures::full2();
        let flat = problem(&full, &[0.0, 0.0], &[1.0, 1.0]);
        let d = direct_induced_estimate(&flat, 12.0, 1).unwrap();
        assert!((d.value - 2f64.ln()).abs() < 1e-14);
        assert_eq!(d.diagnostics.iterations, 1);
        assert_eq!(d.diagnostics.words, 4096);

        let g = problem(&full, &[0.0, 0.0], &[1.0, 2.0]);
        let d = direct_induced_estimate(&g, 20.0, 1).unwrap();
        assert!((d.value - GOLDEN_LOG).abs() <= 0.08, "{}", d.value);
        let c = problem(&fixtures::cycle2(), &[2.0, 0.0], &[1.0, 3.0]);
        let d = direct_induced_estimate(&c, 24.0, 1).unwrap();
        assert!((d.value - 0.5).abs() <= 0.1, "{}", d.value);
    }

    #[test]
    fn direct_estimate_counts_split_cylinders() {
        let full = fixtures::full2();
        let g = problem(&full, &[0.0, 0.0], &[1.0, 2.0]);
        // With q = 1 the cylinder of length n does not fix S_{n+1} psi.
        let shallow = direct_induced_estimate(&g, 10.0, 1).unwrap();
        assert!(shallow.diagnostics.split_cylinders > 0);
        let deep = direct_induced_estimate(&g, 10.0, 2).unwrap();
        assert_eq!(deep.diagnostics.split_cylinders, 0);
    }

    #[test]
    fn direct_estimate_rejects_bad_arguments() {
        let full = fixtures::full2();
        let g = problem(&full, &[0.0, 0.0], &[1.0, 2.0]);
        assert!(direct_induced_estimate(&g, 0.0, 1).is_err());
        assert!(direct_induced_estimate(&g, 5.0, 0).is_err());
        assert!(direct_induced_estimate(&g, 0.5, 1).is_err());
    }

    #[test]
    fn equilibrium_examples() {
        let full = fixtures::full2();
        let mu = induced_equilibrium(&problem(&full, &[0.0, 0.0], &[1.0, 1.0])).unwrap();
        assert!(mu.transition().rows().iter().flatten().all(|&p| (p - 0.5).abs() < 1e-14));

        let p = problem(&full, &[0.0, 0.0], &[1.0, 2.0]);
        let mu = induced_equilibrium(&p).unwrap();
        let u = (5f64.sqrt() - 1.0) / 2.0;
        for i in 0..2 {
            assert!((mu.transition()[(i, 0)] - u).abs() < 1e-12);
            assert!((mu.transition()[(i, 1)] - u * u).abs() < 1e-12);
        }
        let ratio = variational_ratio(&mu, p.phi(), p.psi()).unwrap();
        assert!((ratio - GOLDEN_LOG).abs() < 1e-7);

        let c = problem(&fixtures::cycle2(), &[2.0, 0.0], &[1.0, 3.0]);
        let mu = induced_equilibrium(&c).unwrap();
        assert_eq!(mu.stationary(), &[0.5, 0.5]);
    }

    #[test]
    fn derivative_examples() {
        let golden = fixtures::golden();
        let p = problem(&golden, &[0.4, -0.3], &[1.0, 1.7]);
        let steps: Vec<f64> = DEFAULT_STEPS.to_vec();
        let along = directional_derivatives(&p, p.psi(), &steps).unwrap();
        assert!((along.d_plus - 1.0).abs() < 1e-8 && (along.d_minus - 1.0).abs() < 1e-8);
        let zero = directional_derivatives(&p, &Potential::constant(&golden, 0.0, "0"), &steps).unwrap();
        assert_eq!((zero.d_minus, zero.d_plus), (0.0, 0.0));
        let h = [0.7, -0.2];
        let cob = Potential::from_fn(&golden, 2, "cob", |w| h[w[0]] - h[w[1]]).unwrap();
        let c = directional_derivatives(&p, &cob, &steps).unwrap();
        assert!(c.d_plus.abs() < 1e-7 && c.d_minus.abs() < 1e-7);

        let g = Potential::symbolwise(&golden, &[1.0, -0.5], "g").unwrap();
        let d = directional_derivatives(&p, &g, &steps).unwrap();
        assert!(d.d_minus <= d.d_plus + 1e-9);
        for w in d.table.windows(2) {
            assert!(w[1].right <= w[0].right + 1e-9);
        }
        assert!(directional_derivatives(&p, &g, &[1e-3, 1e-2]).is_err());
    }

    #[test]
    fn tangent_examples() {
        let full = fixtures::full2();
        let p = problem(&full, &[0.2, -0.4], &[1.0, 1.5]);
        let mu = induced_equilibrium(&p).unwrap();
        let report = tangent_check(&p, &mu, None, 7).unwrap();
        assert_eq!(report.samples, DEFAULT_TANGENT_SAMPLES);
        assert!(report.no_violation_found(), "{:?}", report.violations);

        let flat = problem(&full, &[0.0, 0.0], &[1.0, 1.0]);
        let fixed = crate::markov::cycle_measure(&full, &crate::sft::Cycle::new(&full, vec![0]).unwrap()).unwrap();
        let up = [Potential::symbolwise(&full, &[10.0, 0.0], "g").unwrap()];
        let r = tangent_check(&flat, &fixed, Some(&up), 0).unwrap();
        // log((e^10 + 1) / 2) < 10
        assert_eq!(r.violations.len(), 1);
        let down = [Potential::symbolwise(&full, &[-10.0, 0.0], "g").unwrap()];
        assert!(tangent_check(&flat, &fixed, Some(&down), 0).unwrap().no_violation_found());
        let zero = [Potential::constant(&full, 0.0, "0")];
        let z = tangent_check(&flat, &fixed, Some(&zero), 0).unwrap();
        assert_eq!(z.min_margin, 0.0);
    }

    #[test]
    fn bounds_example() {
        let full = fixtures::full2();
        let p = problem(&full, &[0.0, 0.0], &[1.0, 2.0]);
        let base = bowen_root(&p).unwrap().value;
        let shifted = bowen_root(&p.with_phi(Potential::constant(&full, 0.6, "c")).unwrap()).unwrap().value;
        assert!(shifted - base >= 0.3 - 1e-12 && shifted - base <= 0.6 + 1e-12);
    }

    #[test]
    fn property_suite_passes_on_golden() {
        let golden = fixtures::golden();
        let report = induced_property_suite(&problem(&golden, &[0.1, 0.5], &[1.0, 2.0]), 3).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 9);
    }
}
