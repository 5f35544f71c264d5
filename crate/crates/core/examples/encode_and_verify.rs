// Full pipeline: choose R from an error budget, compile, simulate,
// post-select and compare against the closed form and the ideal state.
//
// ```bash
// cargo run -p ampenc --example encode_and_verify
// ```

use ampenc::prelude::*;
use ampenc::tolerance;

pub fn run_example() -> ampenc::Result<()> {
    let data = DataSet::new(&[12, 7, 0, 15, 3, 9, 14, 1], 4)?;
    let epsilon = 1e-3;
    let params = ProtocolParams::from_epsilon(&data, epsilon)?;
    let protocol = compile(&data, &params)?;
    let post = prepare(&protocol, Backend::Dense)?;

    let target = ideal_target_state(&data)?;
    let oracle = oracle_final_state(&data, params.rotation_scale)?;
    println!("R = {:.4}", params.rotation_scale);
    println!("   k  value   prepared     oracle     target");
    for k in 0..data.len() {
        println!(
            "{k:>4} {:>6} {:>10.6} {:>10.6} {:>10.6}",
            data.value(k),
            post.cpu_state[k].re,
            oracle[k].re,
            target[k].re
        );
        assert!((post.cpu_state[k] - oracle[k]).norm() < tolerance::ORACLE);
    }
    println!("P(success) = {:.6e} (closed form {:.6e})", post.p_success, success_probability(&data, params.rotation_scale));
    println!("fidelity with the ideal state: {:.10}", fidelity(&post.cpu_state, &target)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
