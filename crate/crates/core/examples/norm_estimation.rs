// Recover `sum_k c_k^2` from an observed success rate.
//
// ```bash
// cargo run -p ampenc --example norm_estimation
// ```

use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let data = DataSet::new(&[3, 1, 2, 0], 2)?;
    let truth = data.sum_squares();
    for r in [4.0, 8.0, 16.0] {
        let exact = estimate_norm_from_success(success_probability(&data, r), data.qubits(), r);
        let protocol = compile(&data, &ProtocolParams::with_scale(r, 0.01)?)?;
        let stats = sample_trials(&protocol, 200_000, 7)?;
        let sampled = estimate_norm_from_success(stats.empirical_p, data.qubits(), r);
        println!("R = {r:>6}: exact-p estimate {exact:.5}, sampled estimate {sampled:.3}, truth {truth}");
        assert!(exact <= truth);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
