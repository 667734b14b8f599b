//! The full verification harness: every property suite on every fixture,
//! collected into one [`Report`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classical::cylinder_pressure_estimate;
use crate::error::Result;
use crate::fixtures;
use crate::freezing::{
    beta_sweep, detect_freezing, differentiability_check, max_cycle_ratio, max_cycle_ratio_brute_force,
    FreezingVerdict, DIFFERENTIABILITY_STEP,
};
use crate::induced::{
    bowen_root, induced_equilibrium, induced_property_suite_with, tangent_check, variational_ratio, SuiteTolerances,
};
use crate::nonlinear::{
    conjugacy_invariance_check, g_beta_pressure, nonlinear_direct, nonlinear_induced_root, ConjugacyTolerances,
    GBetaMethod, NonlinearOptions,
};
use crate::optimize::{optimize_markov, OptimizeOptions};
use crate::report::{Check, Report};
use crate::sft::Sft;
use crate::{Functional, Potential, Problem, Vector};

/// Every tolerance the harness uses, defaulted to the documented values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub suite: SuiteTolerances,
    pub conjugacy: ConjugacyTolerances,
    /// Optimizer value below the root.
    pub sandwich_below: f64,
    /// Optimizer value above the root.
    pub sandwich_above: f64,
    /// Karp against enumeration.
    pub cycle_ratio: f64,
    /// Second differences of the sweep.
    pub convexity: f64,
    /// Gap below zero.
    pub gap: f64,
    /// Ratio condition at a frozen point.
    pub freezing: f64,
    /// Finite-difference slope against the equilibrium ratio.
    pub derivative: f64,
    /// `|P^{G_beta*}|` at the nonlinear root.
    pub root_residual: f64,
    /// Nonlinear root with linear `F` against the Bowen root.
    pub linear_root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            suite: SuiteTolerances::default(),
            conjugacy: ConjugacyTolerances::default(),
            sandwich_below: 1e-4,
            sandwich_above: 1e-6,
            cycle_ratio: 1e-9,
            convexity: 1e-8,
            gap: 1e-7,
            freezing: 1e-7,
            derivative: 1e-5,
            root_residual: 1e-6,
            linear_root: 1e-5,
        }
    }
}

impl Tolerances {
    /// The same value everywhere.
    pub fn uniform(t: f64) -> Self {
        Self {
            suite: SuiteTolerances { identity: t, slack: t },
            conjugacy: ConjugacyTolerances { permutation: t, permutation_variational: t, recoding: t },
            sandwich_below: t,
            sandwich_above: t,
            cycle_ratio: t,
            convexity: t,
            gap: t,
            freezing: t,
            derivative: t,
            root_residual: t,
            linear_root: t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random draws per fixture in the induced property suite.
    pub draws: usize,
    /// Random potential pairs per fixture for the cycle-ratio comparison.
    pub cycle_pairs: usize,
    pub restarts: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, draws: 20, cycle_pairs: 50, restarts: 20, tolerances: Tolerances::default() }
    }
}

fn draw_pair(sft: &Sft, rng: &mut ChaCha8Rng) -> Result<(Potential, Potential)> {
    let phi = Potential::random(sft, 1, -1.0, 1.0, rng, "phi")?;
    let psi = Potential::random(sft, 1, 0.5, 2.0, rng, "psi")?;
    Ok((phi, psi))
}

/// Runs every suite on FULL2, GOLDEN and CYCLE2. Errors from the numerics
/// are recorded as failed checks rather than aborting the run.
pub fn verify_all(options: &VerifyOptions) -> Report {
    let mut report = Report::new("verify");
    for (i, (name, sft)) in fixtures::all().into_iter().enumerate() {
        let seed = options.seed.wrapping_add(i as u64);
        match verify_fixture(&sft, seed, options) {
            Ok(mut r) => {
                r.title = name.to_string();
                report.extend(r);
            }
            Err(e) => {
                let mut c = Check::new(format!("{name}: setup"));
                c.fail(e.to_string());
                report.push(c);
            }
        }
    }
    report.extend(constant_potential_freezing(options.tolerances));
    report
}

/// Runs `body` on a fresh check named `name`; an error fails the check.
fn check(name: &str, body: impl FnOnce(&mut Check) -> Result<()>) -> Check {
    let mut c = Check::new(name);
    if let Err(e) = body(&mut c) {
        c.fail(e.to_string());
    }
    c
}

fn verify_fixture(sft: &Sft, seed: u64, options: &VerifyOptions) -> Result<Report> {
    let tol = options.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (phi, psi) = draw_pair(sft, &mut rng)?;
    let problem = Problem::new(sft, phi.clone(), psi.clone(), "verify")?;
    let root = bowen_root(&problem)?.value;
    let mut report = Report::new("");

    report.extend(induced_property_suite_with(&problem, seed, options.draws, tol.suite)?);

    report.push(check("variational sandwich", |c| {
        let opts = OptimizeOptions { restarts: options.restarts, seed, ..OptimizeOptions::default() };
        let best = optimize_markov(
            sft,
            |mu| variational_ratio(mu, &phi, &psi).unwrap_or(f64::NAN),
            opts,
        )?;
        c.at_most(root - tol.sandwich_below, best.value, 0.0);
        c.at_most(best.value, root, tol.sandwich_above);
        Ok(())
    }));

    report.push(check("equilibrium attains the root", |c| {
        let mu = induced_equilibrium(&problem)?;
        c.close(variational_ratio(&mu, &phi, &psi)?, root, tol.suite.identity);
        let tangent = tangent_check(&problem, &mu, None, seed)?;
        c.record(tangent.min_margin + tol.suite.slack);
        Ok(())
    }));

    report.push(check("linear collapse", |c| {
        let f = Functional::linear(vec![1.0])?;
        let v = Vector::single(sft, phi.clone())?;
        for n in [1, 5, 10] {
            let a = nonlinear_direct(sft, &v, &f, n)?.value;
            let b = cylinder_pressure_estimate(sft, &phi, n)?.value;
            c.record(if a.to_bits() == b.to_bits() { 0.0 } else { -(a - b).abs() });
        }
        Ok(())
    }));

    let nl_options = NonlinearOptions {
        optimize: OptimizeOptions { restarts: options.restarts, seed, ..OptimizeOptions::default() },
        heuristic: false,
    };
    report.push(check("nonlinear root", |c| {
        let v = Vector::single(sft, phi.clone())?;
        let linear = Functional::linear(vec![1.0])?;
        let r = nonlinear_induced_root(sft, &v, &psi, &linear, nl_options)?;
        c.close(r.value, root, tol.linear_root);
        let square = Functional::square();
        let r = nonlinear_induced_root(sft, &v, &psi, &square, nl_options)?;
        let at = g_beta_pressure(sft, &v, &psi, &square, r.value, GBetaMethod::Variational(nl_options))?.value;
        c.close(at, 0.0, tol.root_residual);
        Ok(())
    }));

    report.extend(conjugacy_invariance_check(
        sft,
        &Vector::single(sft, phi.clone())?,
        &psi,
        &Functional::square(),
        seed,
        nl_options,
        tol.conjugacy,
    )?);

    report.push(check("max cycle ratio against enumeration", |c| {
        for _ in 0..options.cycle_pairs {
            let (a, b) = draw_pair(sft, &mut rng)?;
            let fast = max_cycle_ratio(sft, &a, &b)?.value;
            c.close(fast, max_cycle_ratio_brute_force(sft, &a, &b)?, tol.cycle_ratio);
        }
        Ok(())
    }));

    let betas: Vec<f64> = (0..13).map(|i| -2.0 + 0.5 * f64::from(i)).collect();
    let sweep = beta_sweep(sft, &phi, &psi, &betas)?;
    report.push(check("sweep convexity", |c| {
        for w in sweep.pressures.windows(3) {
            c.at_most(0.0, w[0] - 2.0 * w[1] + w[2], tol.convexity);
        }
        Ok(())
    }));
    report.push(check("sweep ratios nondecreasing", |c| {
        for w in sweep.ratios.windows(2) {
            c.at_most(w[0], w[1], tol.convexity);
        }
        Ok(())
    }));
    report.push(check("sweep gap nonnegative", |c| {
        for &g in &sweep.gaps {
            c.at_most(0.0, g, tol.gap);
        }
        Ok(())
    }));
    report.push(check("freezing equivalence", |c| {
        let at_one = betas.iter().position(|&b| b == 1.0).expect("grid contains 1");
        if let FreezingVerdict::FrozenAt(b0) = detect_freezing(&sweep, tol.freezing) {
            if b0 <= 1.0 {
                c.close(sweep.ratios[at_one], sweep.max_ratio, tol.freezing);
                return Ok(());
            }
        }
        c.at_most(sweep.ratios[at_one], sweep.max_ratio, tol.freezing);
        Ok(())
    }));
    report.push(check("pressure slope equals equilibrium ratio", |c| {
        let d = differentiability_check(sft, &phi, &psi, 1.0, DIFFERENTIABILITY_STEP)?;
        c.close(d.derivative, d.ratio, tol.derivative);
        Ok(())
    }));
    Ok(report)
}

/// A constant potential is frozen from the start, with the ratio condition
/// met everywhere.
fn constant_potential_freezing(tol: Tolerances) -> Report {
    let mut report = Report::new("constant");
    report.push(check("freezing equivalence", |c| {
        let sft = fixtures::golden();
        let phi = Potential::constant(&sft, 0.7, "c");
        let psi = Potential::constant(&sft, 1.0, "1");
        let betas: Vec<f64> = (0..8).map(f64::from).collect();
        let sweep = beta_sweep(&sft, &phi, &psi, &betas)?;
        match detect_freezing(&sweep, tol.freezing) {
            FreezingVerdict::FrozenAt(b0) if b0 == betas[0] => c.record(0.0),
            v => c.fail(format!("expected frozen at {}, got {v:?}", betas[0])),
        }
        for &r in &sweep.ratios {
            c.close(r, sweep.max_ratio, tol.freezing);
        }
        Ok(())
    }));
    report
}
