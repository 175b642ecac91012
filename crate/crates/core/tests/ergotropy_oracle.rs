use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qbattery::oracle::{brute_force_ergotropy, hermitian_eigenvalues, random_density_matrix, random_hamiltonian};
use qbattery::{ergotropy, passive_state, spectral_sort, HamiltonianSpec, QuantumState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn draw(seed: u64, dim: usize, rank: usize) -> (QuantumState, HamiltonianSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = random_density_matrix(&mut rng, dim, rank);
    let ham = random_hamiltonian(&mut rng, dim);
    (QuantumState::new(rho).unwrap(), HamiltonianSpec::new(ham).unwrap())
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_brute_force(seed in any::<u64>(), dim in 2usize..=5, rank_frac in 0.0f64..1.0) {
        let rank = 1 + (rank_frac * dim as f64) as usize;
        let (state, ham) = draw(seed, dim, rank.min(dim));
        let result = ergotropy(&state, &ham).unwrap();
        let reference = brute_force_ergotropy(state.matrix(), ham.matrix());
        prop_assert!((result.ergotropy - reference).abs() <= 1e-10,
            "{} vs {}", result.ergotropy, reference);
        prop_assert!(result.ergotropy >= -1e-12);
        prop_assert!((result.ergotropy - result.overlap_form).abs() <= 1e-10);
    }

    #[test]
    fn passive_state_is_a_fixed_point(seed in any::<u64>(), dim in 2usize..=5) {
        let (state, ham) = draw(seed, dim, dim);
        let sigma = passive_state(&state, &ham).unwrap();
        let again = passive_state(&sigma, &ham).unwrap();
        prop_assert!(max_entry(&(sigma.matrix() - again.matrix())) <= 1e-10);
        prop_assert!(ergotropy(&sigma, &ham).unwrap().ergotropy.abs() <= 1e-10);

        // The passive state is unitarily related to the input: same spectrum.
        let a = hermitian_eigenvalues(state.matrix());
        let b = hermitian_eigenvalues(sigma.matrix());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn linear_in_energy_scale(seed in any::<u64>(), dim in 2usize..=5, factor in 0.01f64..100.0) {
        let (state, ham) = draw(seed, dim, dim);
        let base = ergotropy(&state, &ham).unwrap().ergotropy;
        let scaled = ergotropy(&state, &ham.scaled(factor)).unwrap().ergotropy;
        prop_assert!((scaled - factor * base).abs() <= 1e-10 * factor.max(1.0));
    }

    #[test]
    fn spectral_sort_agrees_with_jacobi(seed in any::<u64>(), dim in 1usize..=5) {
        let (state, _) = draw(seed, dim, dim);
        let pairs = spectral_sort(&state);
        let mut reference = hermitian_eigenvalues(state.matrix());
        reference.reverse();
        for ((value, vector), want) in pairs.iter().zip(&reference) {
            prop_assert!((value - want).abs() <= 1e-11);
            let residual = state.matrix() * vector - vector.scale(*value);
            prop_assert!(residual.norm() <= 1e-10);
        }
        for w in pairs.windows(2) {
            prop_assert!(w[0].0 >= w[1].0);
        }
    }
}

#[test]
fn three_level_example_by_hand() {
    // Population inverted onto the top level of an equally spaced ladder.
    let state = QuantumState::diagonal(&[0.1, 0.2, 0.7]).unwrap();
    let ham = HamiltonianSpec::diagonal(&[0.0, 1.0, 2.0]).unwrap();
    let result = ergotropy(&state, &ham).unwrap();
    // Tr(Hρ) = 1.6, passive energy = 0.2 + 2·0.1 = 0.4.
    assert!((result.ergotropy - 1.2).abs() < 1e-14);
    assert!((result.ergotropy - brute_force_ergotropy(state.matrix(), ham.matrix())).abs() < 1e-12);
    assert_eq!(result.passive_state.populations().len(), 3);
}

#[test]
fn qubit_pure_states_along_the_bloch_sphere() {
    let ham = HamiltonianSpec::qubit(1.0);
    for k in 0..=20 {
        let theta = std::f64::consts::PI * k as f64 / 20.0;
        let psi = nalgebra::DVector::from_vec(vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::cis(0.3) * (theta / 2.0).sin(),
        ]);
        let state = QuantumState::pure(&psi).unwrap();
        // A pure state can always be rotated to the ground state.
        let expected = ham.energy(&state) + 0.5;
        let got = ergotropy(&state, &ham).unwrap().ergotropy;
        assert!((got - expected).abs() < 1e-12, "theta = {theta}");
    }
}
