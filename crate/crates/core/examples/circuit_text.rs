// Write a compiled circuit in the text format and read it back.
//
// ```bash
// cargo run -p ampenc --example circuit_text
// ```

use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let data = DataSet::new(&[2, 0, 3, 1], 2)?;
    let protocol = compile(&data, &ProtocolParams::with_scale(8.0, 0.01)?)?;
    let text = protocol.circuit.to_text();
    print!("{text}");
    let parsed = Circuit::parse(&text, protocol.circuit.shared_memory())?;
    assert_eq!(parsed, protocol.circuit);
    println!("# {} gates, depth {}", parsed.len(), depth(&parsed));
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
