//! Cross-checks the state-vector engine against independent dense-matrix
//! constructions of the same circuits and generators.

mod common;

use common::*;
use nalgebra::DMatrix;
use nisqlab::dqc::{evaluate_model, FeatureMap, FeatureMapKind, QuantumModel, VariationalAnsatz};
use nisqlab::problems::{ising_to_diagonal, IsingHamiltonian};
use nisqlab::qaoa::{linear_schedule_params, qaoa_state};
use nisqlab::statevector::{
    evolve_time_dependent, exact_spectrum, Axis, DiagonalObservable, HamiltonianAt, Mixer,
    PauliTerm, StateVector,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
    let dim = 1usize << n;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

#[test]
fn single_qubit_gates_match_dense_embeddings() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let state = random_state(3, &mut rng);
        let q = rng.gen_range(0..3);
        let theta = rng.gen_range(-6.0..6.0);

        for (axis, dense_gate) in [
            (Axis::X, rx_gate(theta)),
            (Axis::Y, ry_gate(theta)),
            (Axis::Z, rz_gate(theta)),
        ] {
            let lib = state.clone().axis_rotation(q, axis, theta).unwrap();
            let dense = gate_on(3, q, &dense_gate) * to_cvec(state.amplitudes());
            assert!(
                max_amp_diff(&dense, lib.amplitudes()) < 1e-12,
                "axis {axis:?} on qubit {q}"
            );
        }

        let lib = state.clone().hadamard(q).unwrap();
        let dense = gate_on(3, q, &hadamard_gate()) * to_cvec(state.amplitudes());
        assert!(max_amp_diff(&dense, lib.amplitudes()) < 1e-12, "H on {q}");
    }
}

#[test]
fn cnot_matches_the_permutation_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let state = random_state(4, &mut rng);
        let control = rng.gen_range(0..4);
        let mut target = rng.gen_range(0..4);
        while target == control {
            target = rng.gen_range(0..4);
        }
        let lib = state.clone().cnot(control, target).unwrap();
        let dense = cnot_matrix(4, control, target) * to_cvec(state.amplitudes());
        assert!(max_amp_diff(&dense, lib.amplitudes()) < 1e-14);
    }
}

#[test]
fn bell_circuit_matches_hand_computed_amplitudes() {
    let bell = StateVector::zero_state(2)
        .unwrap()
        .hadamard(0)
        .unwrap()
        .cnot(0, 1)
        .unwrap();
    let dense = cnot_matrix(2, 0, 1)
        * gate_on(2, 0, &hadamard_gate())
        * to_cvec(StateVector::zero_state(2).unwrap().amplitudes());
    assert!(max_amp_diff(&dense, bell.amplitudes()) < 1e-15);
}

/// Dense H(t) for the annealing generator used below.
fn dense_hamiltonian(diag: &DiagonalObservable, mixer: Mixer, w: (f64, f64)) -> DMatrix<f64> {
    let n = diag.n_qubits();
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    match mixer {
        Mixer::TransverseField => {
            for i in 0..dim {
                for q in 0..n {
                    h[(i ^ (1 << q), i)] += -w.1;
                }
            }
        }
        Mixer::PlusProjector => {
            for i in 0..dim {
                for j in 0..dim {
                    h[(i, j)] += w.1 / dim as f64;
                }
            }
        }
    }
    for i in 0..dim {
        h[(i, i)] += w.0 * diag.values()[i];
    }
    h
}

#[test]
fn constant_hamiltonian_evolution_matches_the_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let values: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag = DiagonalObservable::new(values).unwrap();

    for mixer in [Mixer::TransverseField, Mixer::PlusProjector] {
        let weights = (0.8, -0.6);
        let h = dense_hamiltonian(&diag, mixer, weights);
        let start = random_state(4, &mut rng);
        let total = 1.3;

        let lib = evolve_time_dependent(
            start.clone(),
            &HamiltonianAt {
                diag: &diag,
                mixer,
                weights: |_| weights,
            },
            0.0,
            total,
            1e-3,
        )
        .unwrap();

        let mut dense =
            expm_neg_i(&h, total) * to_cvec(start.amplitudes());
        let norm = dense.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        dense /= Complex64::from(norm);
        assert!(
            max_amp_diff(&dense, lib.amplitudes()) < 1e-6,
            "mixer {mixer:?}"
        );
    }
}

#[test]
fn exact_spectrum_matches_jacobi_sweeps() {
    // A 5-qubit Hamiltonian with every Pauli axis represented.
    let terms = vec![
        PauliTerm::new(0.7, vec![(0, Axis::Z)]).unwrap(),
        PauliTerm::new(-1.1, vec![(1, Axis::Z), (3, Axis::Z)]).unwrap(),
        PauliTerm::new(0.4, vec![(2, Axis::X)]).unwrap(),
        PauliTerm::new(0.9, vec![(0, Axis::X), (4, Axis::X)]).unwrap(),
        PauliTerm::new(-0.3, vec![(1, Axis::Y), (2, Axis::Y)]).unwrap(),
        PauliTerm::new(0.5, vec![]).unwrap(),
    ];
    let report = exact_spectrum(&terms, 5).unwrap();

    // The same Hamiltonian from explicit Kronecker products. Y ⊗ Y is real,
    // so the whole matrix stays real symmetric.
    let dim = 1usize << 5;
    let x = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let y = CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
    let z = pauli_z();
    let mut dense_c = CMat::zeros(dim, dim);
    let term_of = |coeff: f64, axes: &[(usize, &CMat)]| -> CMat {
        let mut m = identity(dim);
        for &(q, g) in axes {
            m = gate_on(5, q, g) * m;
        }
        m * Complex64::from(coeff)
    };
    dense_c += term_of(0.7, &[(0, &z)]);
    dense_c += term_of(-1.1, &[(1, &z), (3, &z)]);
    dense_c += term_of(0.4, &[(2, &x)]);
    dense_c += term_of(0.9, &[(0, &x), (4, &x)]);
    dense_c += term_of(-0.3, &[(1, &y), (2, &y)]);
    dense_c += term_of(0.5, &[]);

    let mut dense = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            assert!(dense_c[(i, j)].im.abs() < 1e-14, "matrix must be real");
            dense[(i, j)] = dense_c[(i, j)].re;
        }
    }
    let oracle = jacobi_eigenvalues(&dense);
    for (a, b) in report.eigenvalues.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn trotterized_schedule_converges_to_continuous_evolution() {
    let mut h = IsingHamiltonian::new(2);
    h.set_field(0, 0.6);
    h.set_field(1, -0.3);
    h.set_coupling(0, 1, 0.8);
    let diag = ising_to_diagonal(&h).unwrap();
    let total = 1.0;

    // One circuit layer applies exp(−iγH)·exp(−iβΣσ_x); the continuous
    // generator matching it is s·H + (1−s)·Σσ_x, i.e. mixer weight −(1−s)
    // in terms of the transverse-field mixer −Σσ_x.
    let continuous = evolve_time_dependent(
        StateVector::uniform_superposition(2).unwrap(),
        &HamiltonianAt {
            diag: &diag,
            mixer: Mixer::TransverseField,
            weights: |t: f64| (t / total, -(1.0 - t / total)),
        },
        0.0,
        total,
        1e-4,
    )
    .unwrap();

    let infidelity_at = |p: usize| -> f64 {
        let circuit = qaoa_state(&diag, &linear_schedule_params(p, total)).unwrap();
        1.0 - circuit.fidelity(&continuous).unwrap()
    };
    let mut previous = infidelity_at(2);
    for p in [4, 8, 16, 32, 64] {
        let current = infidelity_at(p);
        assert!(
            previous / current > 3.5,
            "infidelity shrank only {previous} → {current} at p = {p}"
        );
        previous = current;
    }
    assert!(previous < 1e-3);
}

#[test]
fn two_qubit_model_matches_a_dense_circuit_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let map = FeatureMap::new(2, FeatureMapKind::FourierDefault);
    let ansatz = VariationalAnsatz::with_random_theta(2, 2, 77);
    let theta = ansatz.theta().to_vec();
    let model = QuantumModel::new(map.clone(), ansatz).unwrap();

    for _ in 0..10 {
        let x = rng.gen_range(-3.0..3.0);
        let lib = evaluate_model(&model, x).unwrap();

        // Dense rebuild: encoding Ry(2·w_q·x) per qubit, then per layer
        // Ry(θ)/Rz(θ′) on each qubit and the CNOT chain 0→1.
        let mut u = identity(4);
        for q in 0..2 {
            u = gate_on(2, q, &ry_gate(2.0 * map.weights()[q] * x)) * u;
        }
        for layer in 0..2 {
            for q in 0..2 {
                let base = (layer * 2 + q) * 2;
                u = gate_on(2, q, &ry_gate(theta[base])) * u;
                u = gate_on(2, q, &rz_gate(theta[base + 1])) * u;
            }
            u = cnot_matrix(2, 0, 1) * u;
        }
        let mut state = CVec::zeros(4);
        state[0] = c(1.0, 0.0);
        let state = u * state;
        let obs = gate_on(2, 0, &pauli_z()) + gate_on(2, 1, &pauli_z());
        let mut expectation = Complex64::default();
        let applied = obs * state.clone();
        for (a, b) in state.iter().zip(applied.iter()) {
            expectation += a.conj() * b;
        }
        assert!(expectation.im.abs() < 1e-12);
        assert!(
            (expectation.re - lib).abs() < 1e-10,
            "x = {x}: dense {} vs library {lib}",
            expectation.re
        );
    }
}
