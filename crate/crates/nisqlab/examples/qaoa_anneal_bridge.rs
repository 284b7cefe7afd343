//! Shows that a QAOA circuit with annealing-ramp angles is a Trotterization
//! of continuous-time evolution: as depth grows, the circuit state converges
//! to the integrated state.
//!
//! One QAOA layer applies exp(−iγH) then exp(−iβΣσ_x). The matching
//! continuous generator is s·H + (1−s)·Σσ_x, which in terms of the library's
//! transverse-field mixer (−Σσ_x) means weights (s, −(1−s)).

use nisqlab::problems::{ising_to_diagonal, IsingHamiltonian};
use nisqlab::qaoa::{linear_schedule_params, qaoa_state};
use nisqlab::statevector::{evolve_time_dependent, HamiltonianAt, Mixer, StateVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut h = IsingHamiltonian::new(2);
    h.set_field(0, 0.6);
    h.set_field(1, -0.3);
    h.set_coupling(0, 1, 0.8);
    let diag = ising_to_diagonal(&h)?;

    let total_time = 1.0;
    let continuous = evolve_time_dependent(
        StateVector::uniform_superposition(2)?,
        &HamiltonianAt {
            diag: &diag,
            mixer: Mixer::TransverseField,
            weights: |t: f64| (t / total_time, -(1.0 - t / total_time)),
        },
        0.0,
        total_time,
        1e-4,
    )?;

    println!("fidelity of the p-layer circuit against the continuous state:");
    for p in [1, 2, 4, 8, 16, 32, 64] {
        let params = linear_schedule_params(p, total_time);
        let circuit = qaoa_state(&diag, &params)?;
        let fidelity = circuit.fidelity(&continuous)?;
        println!("  p = {p:>2}: fidelity {fidelity:.10}  (infidelity {:.3e})", 1.0 - fidelity);
    }
    Ok(())
}
