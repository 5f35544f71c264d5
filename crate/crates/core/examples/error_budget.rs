// How the error budget sets R, and what that costs in success probability.
//
// ```bash
// cargo run -p ampenc --example error_budget
// ```

use ampenc::analysis::max_relative_error;
use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let data = DataSet::new(&[200, 180, 20, 240, 90, 255, 130, 60], 8)?;
    let rho = density(&data)?;
    println!("rho = {rho:.4}");
    println!("  epsilon          R   max |err|   P(success)   6 eps rho   time model");
    for epsilon in [1e-1, 1e-2, 1e-3, 1e-4] {
        let r = choose_rotation_scale(data.c_max(), epsilon)?;
        let err = max_relative_error(&data, r);
        let p = success_probability(&data, r);
        let bound = success_bound(&data, epsilon)?;
        println!(
            "{epsilon:>9.0e} {r:>10.2} {err:>11.3e} {p:>12.4e} {bound:>11.4e} {:>12.1}",
            time_model(data.qubits(), rho, epsilon)
        );
        assert!(err <= epsilon);
        assert!(p <= bound);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
