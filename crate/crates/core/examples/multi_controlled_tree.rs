// Four-control rotation built from a Toffoli tree with three ancillas.
//
// ```bash
// cargo run -p ampenc --example multi_controlled_tree
// ```

use ampenc::circuit::depth_of;
use ampenc::compiler::compression_tree;
use ampenc::prelude::*;

pub fn run_example() -> ampenc::Result<()> {
    let controls = [0, 1, 2, 3];
    let ancillas = [4, 5, 6];
    let gates = build_multi_controlled(&controls, &ancillas, &Gate::ry(0.7, 7))?;
    for g in &gates {
        println!("{g}");
    }
    assert_eq!(gates.len(), 7);

    println!("controls  toffolis  layers");
    for k in 1..=16usize {
        let controls: Vec<usize> = (0..k).collect();
        let ancillas: Vec<usize> = (k..2 * k).collect();
        let (tree, _) = compression_tree(&controls, &ancillas)?;
        println!("{k:>8}  {:>8}  {:>6}", tree.len(), depth_of(&tree));
    }

    // Too few ancillas is a configuration error.
    assert!(build_multi_controlled(&controls, &ancillas[..2], &Gate::x(7)).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ampenc::Result<()> {
    run_example()
}
