//! Prepares the Bell state (|00⟩ + |11⟩)/√2 with a Hadamard and a CNOT and
//! prints the amplitudes and measurement distribution.

use nisqlab::statevector::StateVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let state = StateVector::zero_state(2)?.hadamard(0)?.cnot(0, 1)?;

    println!("amplitudes (qubit 0 is the least significant bit):");
    for (index, amp) in state.amplitudes().iter().enumerate() {
        println!("  |{index:02b}⟩  {:+.12}  {:+.12}i", amp.re, amp.im);
    }

    println!("measurement probabilities:");
    for (index, p) in state.probabilities().iter().enumerate() {
        println!("  {index:02b}  {p:.12}");
    }

    let expected = std::f64::consts::FRAC_1_SQRT_2;
    let err = (state.amplitudes()[0].re - expected).abs()
        + (state.amplitudes()[3].re - expected).abs();
    println!("deviation from (1/√2, 0, 0, 1/√2): {err:.3e}");
    Ok(())
}
