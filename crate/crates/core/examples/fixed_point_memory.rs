// Lay out four five-bit values as memory registers `|k, c_k>`.
//
// ```bash
// cargo run -p ampenc --example fixed_point_memory
// ```

use ampenc::data::{DataSet, build_memory, encode_value};

pub fn run_example() -> ampenc::Result<()> {
    let v = encode_value(5, 5)?;
    println!("5 as a 5-bit value: {v}");
    assert_eq!(v.to_string(), "00101");

    let data = DataSet::new(&[19, 6, 31, 12], 5)?;
    let memory = build_memory(&data);
    for (k, reg) in memory.registers().iter().enumerate() {
        let bits = |b: &[bool]| b.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>();
        println!("register {k}: index {} value {} ({})", bits(&reg.index_bits), bits(&reg.value_bits), reg.value());
        assert_eq!(reg.index() as usize, k);
    }
    println!("memory holds {} bits", memory.total_bits());

    // A length that is not a power of two is padded with zeros.
    let padded = DataSet::new(&[3, 1, 2], 2)?;
    println!("[3, 1, 2] pads to {:?} on {} CPU qubits", padded.raw_values(), padded.qubits());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
