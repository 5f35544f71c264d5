// Dense data keeps the success probability flat in `n`; one-hot data loses
// a factor of two per added qubit.
//
// ```bash
// cargo run -p ampenc --example density_scaling
// ```

use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let r = 40.0;
    println!(" n   P(uniform)    P(one-hot)");
    let mut last_onehot: Option<f64> = None;
    for n in 2..=6u32 {
        let len = 1usize << n;
        let uniform = DataSet::new(&vec![25; len], 5)?;
        let mut onehot_values = vec![0; len];
        onehot_values[0] = 25;
        let onehot = DataSet::new(&onehot_values, 5)?;
        let params = ProtocolParams::with_scale(r, 0.01)?;
        let pu = prepare(&compile(&uniform, &params)?, Backend::Sparse)?.p_success;
        let po = prepare(&compile(&onehot, &params)?, Backend::Sparse)?.p_success;
        println!("{n:>2} {pu:>12.6e} {po:>13.6e}");
        if let Some(prev) = last_onehot {
            assert!((po / prev - 0.5f64).abs() < 1e-9);
        }
        last_onehot = Some(po);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
