//! # nisqlab
//!
//! A desk-scale laboratory for the NISQ-era algorithms most often proposed for
//! combinatorial optimization — quantum annealing, QAOA, and differentiable
//! quantum circuits — cross-validated against the classical baselines they
//! compete with (brute force, backtracking SAT, simulated annealing, greedy
//! heuristics). Everything runs exactly, in dense state-vector arithmetic, at
//! 14 qubits or fewer.
//!
//! ## Module map
//!
//! | module        | contents                                                              |
//! |---------------|-----------------------------------------------------------------------|
//! | [`statevector`] | dense simulator: gates, diagonal observables, spectra, time evolution |
//! | [`problems`]  | QUBO/Ising encoders: MaxCut, MaxSAT, SK, paint shop, TSP, k-SAT, file I/O |
//! | [`baselines`] | brute force, DPLL with backtrack counting, simulated annealing, greedy |
//! | [`annealing`] | Schrödinger-equation annealing: protocols, excitation metrics, gap scans |
//! | [`qaoa`]      | alternating-operator ansatz, expectation, optimization, sampling       |
//! | [`optim`]     | Nelder–Mead derivative-free minimizer used by the QAOA driver          |
//! | [`dqc`]       | quantum feature maps, parameter-shift derivatives, variational ODE solving |
//! | [`harness`]   | seeded experiment campaigns, CSV/JSON reports, CLI entry points        |
//!
//! ## Trying it out
//!
//! The `examples/` directory is the front door; each file is a runnable,
//! self-contained experiment:
//!
//! ```text
//! cargo run --release --example bell_state
//! cargo run --release --example sat_phase_transition
//! cargo run --release --example anneal_protocols
//! cargo run --release --example qaoa_depth_sweep
//! cargo run --release --example dqc_ode_decay
//! ```
//!
//! The same capabilities are scriptable through the thin `nisqlab` binary
//! (`satscan`, `anneal`, `qaoa`, `dqc`, `paintshop`, `campaign` subcommands).
//!
//! ## Conventions
//!
//! Fixed once, shared by every module:
//!
//! * Qubit `q` is bit `q` of the basis index (qubit 0 = least significant bit).
//! * Rotation gates implement `exp(-i θ P / 2)` for a Pauli generator `P`;
//!   global phase is kept, never silently normalized away.
//! * `σ_z |0⟩ = +|0⟩`; the spin value a *problem encoder* reads from bit `b`
//!   is `σ = 2b − 1`, i.e. bit 1 encodes spin +1 (see [`problems`]).
//! * All randomness flows through explicit `u64` seeds (ChaCha8); identical
//!   seeds give bitwise identical results on every platform.

pub mod annealing;
pub mod baselines;
pub mod dqc;
pub mod harness;
pub mod optim;
pub mod problems;
pub mod qaoa;
pub mod statevector;
