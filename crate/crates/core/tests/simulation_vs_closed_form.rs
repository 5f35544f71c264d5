use ampenc::prelude::*;
use ampenc::simulator::{SampleOptions, run_on, sample_trials_with};
use ampenc::tolerance;
use proptest::prelude::*;

fn instance(values: &[u64], bits: u32, r: f64) -> (DataSet, CompiledProtocol) {
    let data = DataSet::new(values, bits).unwrap();
    let protocol = compile(&data, &ProtocolParams::with_scale(r, 0.01).unwrap()).unwrap();
    (data, protocol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn postselected_state_matches_oracle(
        (bits, values) in (1u32..=8, 1u32..=5).prop_flat_map(|(bits, n)| {
            (Just(bits), prop::collection::vec(0u64..(1 << bits), 1usize << n))
        }),
        scale_factor in 1.0f64..100.0,
    ) {
        prop_assume!(values.iter().any(|&c| c > 0));
        let c_max = *values.iter().max().unwrap() as f64;
        let (data, protocol) = instance(&values, bits, scale_factor * c_max);
        let r = protocol.params.rotation_scale;
        let post = prepare(&protocol, Backend::Sparse).unwrap();
        let oracle = oracle_final_state(&data, r).unwrap();
        for (a, b) in post.cpu_state.iter().zip(&oracle) {
            prop_assert!((a - b).norm() < tolerance::ORACLE);
        }
        prop_assert!((post.p_success - success_probability(&data, r)).abs() < tolerance::ORACLE);
    }
}

#[test]
fn dense_and_sparse_agree_bitwise() {
    let (_, protocol) = instance(&[200, 3, 0, 77, 150, 255, 1, 64, 9, 0, 0, 31, 128, 100, 42, 7], 8, 300.0);
    let dense = run(&protocol).unwrap();
    let sparse: SparseStateVector = run_on(&protocol).unwrap();
    assert_eq!(dense.amplitudes(), sparse.to_dense().amplitudes());
    assert_eq!(measure_flag_postselect(&dense).unwrap(), measure_flag_postselect(&sparse).unwrap());
}

#[test]
fn outliers_wrap_around() {
    // c_out / R is about 4.6 > pi: the amplitude changes sign.
    let r = 55.0;
    let (data, protocol) = instance(&[10, 12, 9, 11, 255, 10, 8, 12], 8, r);
    let post = prepare(&protocol, Backend::Dense).unwrap();
    let norm = (0..data.len()).map(|k| (data.value(k) as f64 / r).sin().powi(2)).sum::<f64>().sqrt();
    for k in 0..data.len() {
        let expected = (data.value(k) as f64 / r).sin() / norm;
        assert!((post.cpu_state[k].re - expected).abs() < tolerance::ORACLE);
    }
    assert!(post.cpu_state[4].re < 0.0);
}

#[test]
fn monte_carlo_rate_is_binomially_consistent() {
    let (data, protocol) = instance(&[3, 1, 2, 0], 2, 16.0);
    let p = success_probability(&data, 16.0);
    assert!((p - 0.013547786143463986).abs() < 1e-15);
    let trials = 100_000;
    let stats = sample_trials(&protocol, trials, 2024).unwrap();
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((stats.empirical_p - p).abs() <= 3.0 * sigma, "{stats:?}");
    assert_eq!(stats.expected_trials, Some(1.0 / stats.empirical_p));
}

#[test]
fn sampling_is_independent_of_backend_and_resimulation() {
    let (_, protocol) = instance(&[5, 9, 2, 14], 4, 12.0);
    let base = sample_trials_with(&protocol, 300, 11, SampleOptions::default()).unwrap();
    for backend in [Backend::Dense, Backend::Sparse] {
        for resimulate in [false, true] {
            let s = sample_trials_with(&protocol, 300, 11, SampleOptions { backend, resimulate }).unwrap();
            assert_eq!(s, base);
        }
    }
}
