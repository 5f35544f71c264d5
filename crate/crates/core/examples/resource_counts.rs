// Qubit, gate and depth counts as the CPU register grows.
//
// ```bash
// cargo run -p ampenc --example resource_counts
// ```

use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let bits = 6;
    println!(" n  qubits  extra  memory bits  sim gates  query gates  depth  compression depth");
    for n in 1..=8u32 {
        let values: Vec<u64> = (0..1u64 << n).map(|k| (k * 13 + 5) % 64).collect();
        let data = DataSet::new(&values, bits)?;
        let protocol = compile(&data, &ProtocolParams::from_epsilon(&data, 1e-3)?)?;
        let r = resource_report(&protocol.circuit, &data);
        println!(
            "{n:>2} {:>7} {:>6} {:>12} {:>10} {:>12} {:>6} {:>18}",
            r.quantum_qubits,
            r.extra_qubits,
            r.classical_memory_bits,
            r.simulation_gate_total,
            r.query_model_gate_total,
            r.depth_total,
            r.compression_depth
        );
        assert_eq!(r.extra_qubits, 2 * n as usize);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
