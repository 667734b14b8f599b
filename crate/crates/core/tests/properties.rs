use proptest::prelude::*;
use thermoform::{
    beta_sweep, bowen_root, cylinder_pressure_estimate, max_cycle_ratio, max_cycle_ratio_brute_force,
    permute_symbols, rpf_equilibrium, spectral_pressure, topological_pressure, Potential, Problem, Sft,
};

/// Irreducible shifts on 2 to 4 symbols.
fn irreducible_sft() -> impl Strategy<Value = Sft> {
    (2usize..=4)
        .prop_flat_map(|k| (Just(k), prop::collection::vec(prop::bool::weighted(0.6), k * k)))
        .prop_filter_map("irreducible", |(k, bits)| {
            let rows: Vec<Vec<u8>> = bits.chunks(k).map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect();
            Sft::new(k, &rows).ok().filter(Sft::is_irreducible)
        })
}

fn values(k: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, k)
}

fn shift_with_pair() -> impl Strategy<Value = (Sft, Vec<f64>, Vec<f64>)> {
    irreducible_sft().prop_flat_map(|sft| {
        let k = sft.alphabet_size();
        (Just(sft), values(k, -2.0, 2.0), values(k, 0.2, 3.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pressure_shifts_with_constants((sft, phi, _) in shift_with_pair(), c in -5.0f64..5.0) {
        let p = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let a = spectral_pressure(&sft, &p).unwrap().value;
        let b = spectral_pressure(&sft, &p.map(|v| v + c)).unwrap().value;
        prop_assert!((b - a - c).abs() < 1e-10);
    }

    #[test]
    fn pressure_is_sup_of_gibbs_functional((sft, phi, _) in shift_with_pair()) {
        let p = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let pressure = spectral_pressure(&sft, &p).unwrap().value;
        let mu = rpf_equilibrium(&sft, &p).unwrap();
        prop_assert!((mu.entropy() + mu.integrate(&p).unwrap() - pressure).abs() < 1e-9);
    }

    #[test]
    fn cylinder_estimate_is_exact_on_full_shift(phi in values(3, -1.0, 1.0)) {
        // On a full shift a range-1 sum factorizes, so every n gives the same value.
        let sft = Sft::full(3);
        let p = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let spectral = spectral_pressure(&sft, &p).unwrap().value;
        for n in [1, 4, 7] {
            prop_assert!((cylinder_pressure_estimate(&sft, &p, n).unwrap().value - spectral).abs() < 1e-12);
        }
    }

    #[test]
    fn bowen_root_zeroes_the_pressure((sft, phi, psi) in shift_with_pair()) {
        let phi = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let psi = Potential::symbolwise(&sft, &psi, "psi").unwrap();
        let problem = Problem::new(&sft, phi.clone(), psi.clone(), "").unwrap();
        let root = bowen_root(&problem).unwrap().value;
        let at = topological_pressure(&sft, &phi.sub_scaled(&sft, root, &psi).unwrap()).unwrap();
        prop_assert!(at.abs() < 1e-9, "P(phi - root psi) = {}", at);
    }

    #[test]
    fn relabelling_preserves_pressure((sft, phi, _) in shift_with_pair(), rot in 1usize..4) {
        let k = sft.alphabet_size();
        let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
        let p = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let r = permute_symbols(&sft, &[&p], &perm).unwrap();
        let a = spectral_pressure(&sft, &p).unwrap().value;
        let b = spectral_pressure(&r.sft, &r.potentials[0]).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn karp_matches_enumeration((sft, phi, psi) in shift_with_pair()) {
        let phi = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let psi = Potential::symbolwise(&sft, &psi, "psi").unwrap();
        let fast = max_cycle_ratio(&sft, &phi, &psi).unwrap();
        let slow = max_cycle_ratio_brute_force(&sft, &phi, &psi).unwrap();
        prop_assert!((fast.value - slow).abs() < 1e-9);
        for &(i, j) in &fast.subgraph_edges {
            prop_assert!(sft.allowed(i, j));
        }
    }

    #[test]
    fn sweep_stays_above_its_asymptote((sft, phi, psi) in shift_with_pair()) {
        let phi = Potential::symbolwise(&sft, &phi, "phi").unwrap();
        let psi = Potential::symbolwise(&sft, &psi, "psi").unwrap();
        let betas = [0.0, 1.5, 3.0, 4.5, 6.0];
        let s = beta_sweep(&sft, &phi, &psi, &betas).unwrap();
        for w in s.pressures.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8);
        }
        for i in 0..betas.len() {
            prop_assert!(s.gaps[i] >= -1e-7);
            prop_assert!(s.ratios[i] <= s.max_ratio + 1e-9);
        }
        for w in s.ratios.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
    }
}
