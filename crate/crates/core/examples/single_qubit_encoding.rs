// Two values on one CPU qubit: inspect the state just before the flag is
// measured, then post-select.
//
// ```bash
// cargo run -p ampenc --example single_qubit_encoding
// ```

use ampenc::prelude::*;
use ampenc::simulator::QuantumState;

pub fn run_example() -> ampenc::Result<()> {
    let data = DataSet::new(&[2, 3], 2)?;
    let params = ProtocolParams::with_scale(8.0, 0.01)?;
    let protocol = compile(&data, &params)?;
    println!("{}", protocol.circuit.to_text());

    let state = run(&protocol)?;
    let layout = *state.layout();
    let flag = 1 << layout.flag();
    for k in 0..2 {
        let i = layout.cpu_index(k);
        let (a0, a1) = (state.amplitude(i).re, state.amplitude(i | flag).re);
        println!("|{k}>: flag amplitudes ({a0:.6}, {a1:.6})");
        let half = data.value(k) as f64 / 8.0;
        assert!((a0 - half.cos() / 2f64.sqrt()).abs() < 1e-12);
        assert!((a1 - half.sin() / 2f64.sqrt()).abs() < 1e-12);
    }

    let post = measure_flag_postselect(&state)?;
    println!("P(flag = 1) = {:.6}", post.p_success);
    println!("CPU state after success: {:?}", post.cpu_state.iter().map(|a| a.re).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
