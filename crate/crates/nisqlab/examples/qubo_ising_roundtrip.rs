//! Builds a small QUBO, converts it to the equivalent Ising Hamiltonian, and
//! verifies that both sides assign the same energy to every assignment.

use nisqlab::problems::{index_to_bits, qubo_to_ising, QuboProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut qubo = QuboProblem::new(3);
    qubo.add_interaction(0, 1, 2.0);
    qubo.add_interaction(1, 2, -1.5);
    qubo.add_linear(0, 1.0);
    qubo.add_linear(2, -0.5);
    qubo.add_offset(0.25);

    let ising = qubo_to_ising(&qubo);
    println!("fields:    {:?}", ising.fields());
    println!("offset:    {}", ising.offset());

    println!("\nassignment   qubo energy   ising energy");
    let mut worst = 0.0f64;
    for index in 0..8usize {
        let bits = index_to_bits(index, 3);
        let eq = qubo.energy(&bits);
        let ei = ising.energy_bits(&bits);
        worst = worst.max((eq - ei).abs());
        println!("  {}{}{}        {eq:+10.4}    {ei:+10.4}", bits[0], bits[1], bits[2]);
    }
    println!("\nlargest disagreement: {worst:.3e}");

    // The JSON form round-trips exactly.
    let text = qubo.to_json();
    let back = QuboProblem::from_json(&text)?;
    println!("json round-trip identical: {}", back == qubo);
    Ok(())
}
