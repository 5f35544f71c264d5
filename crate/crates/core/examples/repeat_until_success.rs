// Seeded repeat-until-success sampling of the flag measurement.
//
// ```bash
// cargo run -p ampenc --example repeat_until_success
// ```

use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let data = DataSet::new(&[3, 1, 2, 0], 2)?;
    let protocol = compile(&data, &ProtocolParams::with_scale(16.0, 0.01)?)?;
    let trials = 100_000;
    let stats = sample_trials(&protocol, trials, 42)?;
    let p = stats.p_success;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    println!("p = {p:.6}, observed {:.6} over {trials} trials ({} successes)", stats.empirical_p, stats.successes);
    println!("expected trials until success: {:.1}", stats.expected_trials.unwrap_or(f64::INFINITY));
    assert!((stats.empirical_p - p).abs() <= 3.0 * sigma);
    assert_eq!(stats, sample_trials(&protocol, trials, 42)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
