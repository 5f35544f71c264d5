// With R below the largest value the outlier's rotation wraps around, so
// its weight in the prepared state is `sin(c/R)`, not `c/R`.
//
// ```bash
// cargo run -p ampenc --example outlier_wraparound
// ```

use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let values = [10, 12, 9, 11, 1000, 10, 8, 12];
    let data = DataSet::new(&values, 10)?;
    // Chosen from the bulk of the data, far below c_max = 1000.
    let params = ProtocolParams::with_scale(60.0, 0.01)?;
    assert!(params.wraps(&data));
    let post = prepare(&compile(&data, &params)?, Backend::Dense)?;
    let target = ideal_target_state(&data)?;
    println!("   k  value   prepared     target");
    for (k, (prepared, ideal)) in post.cpu_state.iter().zip(&target).enumerate() {
        println!("{k:>4} {:>6} {:>10.6} {:>10.6}", data.value(k), prepared.re, ideal.re);
    }
    let oracle = oracle_final_state(&data, params.rotation_scale)?;
    assert!((post.cpu_state[4] - oracle[4]).norm() < 1e-10);
    println!("outlier weight {:.4} instead of {:.4}", post.cpu_state[4].norm_sqr(), target[4].norm_sqr());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
