//! Dense state-vector simulation for systems of up to 14 qubits.
//!
//! The state of an `n`-qubit register is a vector of `2^n` complex amplitudes.
//! Basis states are indexed by integers and **qubit `q` is bit `q` of the
//! index**: index 6 = 0b110 has qubit 0 in |0⟩ and qubits 1 and 2 in |1⟩.
//!
//! Gate conventions:
//!
//! * Rotations implement `exp(-i θ P / 2)` for Pauli generator `P`, so an
//!   X-rotation by π maps |0⟩ to −i|1⟩ (the global phase is physical here and
//!   is never stripped).
//! * `σ_z |0⟩ = +|0⟩`: the Z eigenvalue of bit `b` is `1 − 2b`. Anything that
//!   instead needs the binary-variable spin map `σ = 2b − 1` (the problem
//!   encoders) says so explicitly at its own definition.
//!
//! Gates traverse the amplitude array in bit-strided pairs, so every
//! single-qubit operation is O(2^n) with no matrix allocation. Time-dependent
//! evolution integrates the Schrödinger equation (ħ = 1) with fixed-step RK4,
//! renormalizing after every step.

use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on register width for state-vector storage and evolution.
pub const MAX_QUBITS: usize = 14;

/// Hard cap for dense diagonalization ([`exact_spectrum`]).
pub const MAX_DENSE_QUBITS: usize = 10;

/// Eigenvalues closer than this are treated as one degenerate cluster when
/// spectra are summarized.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    QubitCountOutOfRange(usize),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("control and target qubits must differ (both {0})")]
    ControlEqualsTarget(usize),
    #[error("amplitude vector length {0} is not a power of two in the supported range")]
    BadAmplitudeCount(usize),
    #[error("basis index {index} out of range for dimension {dim}")]
    BasisIndexOutOfRange { index: usize, dim: usize },
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("operand dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("non-finite Hamiltonian weights at t = {t}")]
    NonFiniteHamiltonian { t: f64 },
    #[error("step size must be finite and positive, got {0}")]
    BadStepSize(f64),
    #[error("empty integration window: t0 = {t0}, t1 = {t1}")]
    EmptyWindow { t0: f64, t1: f64 },
    #[error("dense diagonalization supports at most {MAX_DENSE_QUBITS} qubits, got {0}")]
    SpectrumTooLarge(usize),
    #[error("Pauli term qubit indices must be strictly increasing and in range")]
    BadPauliTerm,
}

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A weighted Pauli string: `coefficient · P_{q1} ⊗ P_{q2} ⊗ …` with identity
/// on every unlisted qubit.
#[derive(Clone, Debug)]
pub struct PauliTerm {
    coefficient: f64,
    axes: Vec<(usize, Axis)>,
}

impl PauliTerm {
    /// Qubit indices must be strictly increasing (each qubit at most once).
    pub fn new(coefficient: f64, axes: Vec<(usize, Axis)>) -> Result<Self, StateError> {
        if !axes.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(StateError::BadPauliTerm);
        }
        Ok(Self { coefficient, axes })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn axes(&self) -> &[(usize, Axis)] {
        &self.axes
    }
}

/// An observable diagonal in the computational basis: `values[i]` is its
/// eigenvalue on basis state |i⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalObservable {
    values: Vec<f64>,
}

impl DiagonalObservable {
    /// `values.len()` must be a power of two, 2^1 ..= 2^14.
    pub fn new(values: Vec<f64>) -> Result<Self, StateError> {
        qubits_for_dim(values.len())?;
        Ok(Self { values })
    }

    /// Tabulates `value_of` over all `2^n_qubits` basis indices.
    pub fn from_fn(
        n_qubits: usize,
        value_of: impl FnMut(usize) -> f64,
    ) -> Result<Self, StateError> {
        check_qubit_count(n_qubits)?;
        Ok(Self {
            values: (0..1usize << n_qubits).map(value_of).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spread between the largest and smallest eigenvalue.
    pub fn bandwidth(&self) -> f64 {
        self.max() - self.min()
    }

    /// Indices whose value lies within [`DEGENERACY_TOL`] of the minimum:
    /// the (possibly degenerate) ground space.
    pub fn ground_indices(&self) -> Vec<usize> {
        let lo = self.min();
        (0..self.len())
            .filter(|&i| self.values[i] - lo <= DEGENERACY_TOL)
            .collect()
    }
}

/// Summary of a Hermitian spectrum (or of the worst point of a schedule scan).
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// All eigenvalues, sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Gap from the ground cluster to the first level above it (see
    /// [`DEGENERACY_TOL`]). Zero when no level lies above the cluster.
    pub min_gap: f64,
    /// max − min eigenvalue. Schedule scans instead report the bandwidth of
    /// the problem Hamiltonian (documented at the call site).
    pub bandwidth: f64,
    /// Number of eigenvalues inside the ground cluster.
    pub ground_degeneracy: usize,
}

impl SpectrumReport {
    /// Summarizes an already-computed spectrum. `eigenvalues` need not be
    /// sorted on entry.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("non-finite eigenvalue"));
        let lo = eigenvalues[0];
        let ground_degeneracy = eigenvalues
            .iter()
            .take_while(|&&ev| ev - lo <= DEGENERACY_TOL)
            .count();
        let min_gap = if ground_degeneracy < eigenvalues.len() {
            eigenvalues[ground_degeneracy] - lo
        } else {
            0.0
        };
        let bandwidth = eigenvalues[eigenvalues.len() - 1] - lo;
        Self {
            eigenvalues,
            min_gap,
            bandwidth,
            ground_degeneracy,
        }
    }
}

/// Driving term of an annealing Hamiltonian, applied matrix-free.
///
/// * `TransverseField` is `−Σ_q σ_x^q`; its ground state is |+⟩^⊗n with
///   energy −n.
/// * `PlusProjector` is `|+⟩⟨+|^⊗n` exactly as tabulated in the annealing
///   protocol family — note there is **no** minus sign; schedules that want an
///   attractive projector carry the sign in their weight function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mixer {
    TransverseField,
    PlusProjector,
}

impl Mixer {
    /// Writes `M·ψ` into `out` (overwriting it). Both slices must have equal
    /// power-of-two length. O(n·2ⁿ) for the field, O(2ⁿ) for the projector.
    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), out.len());
        match self {
            Mixer::TransverseField => {
                let n = psi.len().trailing_zeros() as usize;
                for (i, slot) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for q in 0..n {
                        acc += psi[i ^ (1usize << q)];
                    }
                    *slot = -acc;
                }
            }
            Mixer::PlusProjector => {
                // |+⟩⟨+|ψ has the constant entry (Σψ)/2ⁿ.
                let mean = psi.iter().sum::<Complex64>() / psi.len() as f64;
                out.fill(mean);
            }
        }
    }
}

/// Dense register state: `2^n_qubits` complex amplitudes with unit L2 norm.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubit_count(n_qubits: usize) -> Result<(), StateError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(StateError::QubitCountOutOfRange(n_qubits));
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Result<usize, StateError> {
    if !dim.is_power_of_two() {
        return Err(StateError::BadAmplitudeCount(dim));
    }
    let n = dim.trailing_zeros() as usize;
    check_qubit_count(n).map_err(|_| StateError::BadAmplitudeCount(dim))?;
    Ok(n)
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero_state(n_qubits: usize) -> Result<Self, StateError> {
        Self::basis_state(n_qubits, 0)
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self, StateError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(StateError::BasisIndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// |+⟩^⊗n: every amplitude equal to 2^(−n/2).
    pub fn uniform_superposition(n_qubits: usize) -> Result<Self, StateError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n_qubits,
            amps: vec![amp; dim],
        })
    }

    /// Builds a state from raw amplitudes, normalizing them. The length must
    /// be a power of two in 2..=2^14 and the norm nonzero.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateError> {
        let n_qubits = qubits_for_dim(amps.len())?;
        let mut state = Self { n_qubits, amps };
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        state.scale(norm.recip());
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Measurement probability of basis state |index⟩.
    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64, StateError> {
        if self.len() != other.len() {
            return Err(StateError::DimensionMismatch(self.len(), other.len()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|² — phase-invariant overlap.
    pub fn fidelity(&self, other: &Self) -> Result<f64, StateError> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    fn scale(&mut self, factor: f64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), StateError> {
        if qubit >= self.n_qubits {
            return Err(StateError::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Visits every amplitude pair (|…0_q…⟩, |…1_q…⟩) once.
    fn for_each_pair(&mut self, qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let step = 1usize << qubit;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for offset in base..base + step {
                // Split borrow: the two indices differ in bit `qubit` only.
                let (lo, hi) = self.amps.split_at_mut(offset + step);
                f(&mut lo[offset], &mut hi[0]);
            }
            base += step << 1;
        }
    }

    /// Hadamard gate on one qubit. Involution: applying twice is the identity.
    pub fn hadamard(mut self, qubit: usize) -> Result<Self, StateError> {
        self.check_qubit(qubit)?;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        self.for_each_pair(qubit, |a, b| {
            let (x, y) = (*a, *b);
            *a = (x + y) * inv_sqrt2;
            *b = (x - y) * inv_sqrt2;
        });
        Ok(self)
    }

    /// Controlled-NOT: flips `target` where `control` is |1⟩.
    pub fn cnot(mut self, control: usize, target: usize) -> Result<Self, StateError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(StateError::ControlEqualsTarget(control));
        }
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
        Ok(self)
    }

    /// Rotation `exp(-i angle σ_axis / 2)` on one qubit.
    ///
    /// Matrix forms (c = cos(angle/2), s = sin(angle/2)):
    /// X: [[c, -i·s], [-i·s, c]] — Y: [[c, -s], [s, c]] — Z: diag(e^{-i·angle/2}, e^{+i·angle/2}).
    pub fn axis_rotation(mut self, qubit: usize, axis: Axis, angle: f64) -> Result<Self, StateError> {
        self.check_qubit(qubit)?;
        if !angle.is_finite() {
            return Err(StateError::NonFiniteAngle(angle));
        }
        let half = 0.5 * angle;
        let (c, s) = (half.cos(), half.sin());
        match axis {
            Axis::X => {
                let mis = Complex64::new(0.0, -s);
                self.for_each_pair(qubit, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = c * x + mis * y;
                    *b = mis * x + c * y;
                });
            }
            Axis::Y => {
                self.for_each_pair(qubit, |a, b| {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                });
            }
            Axis::Z => {
                let ph0 = Complex64::from_polar(1.0, -half);
                let ph1 = Complex64::from_polar(1.0, half);
                self.for_each_pair(qubit, |a, b| {
                    *a *= ph0;
                    *b *= ph1;
                });
            }
        }
        Ok(self)
    }

    /// Phase operator `exp(-i gamma H)` for a diagonal `H`: multiplies
    /// amplitude `i` by `exp(-i · gamma · values[i])`.
    pub fn diagonal_phase(
        mut self,
        obs: &DiagonalObservable,
        gamma: f64,
    ) -> Result<Self, StateError> {
        if obs.len() != self.len() {
            return Err(StateError::DimensionMismatch(self.len(), obs.len()));
        }
        if !gamma.is_finite() {
            return Err(StateError::NonFiniteAngle(gamma));
        }
        for (a, &v) in self.amps.iter_mut().zip(obs.values()) {
            *a *= Complex64::from_polar(1.0, -gamma * v);
        }
        Ok(self)
    }

    /// ⟨ψ| H |ψ⟩ for diagonal `H`: `Σ_i |amp_i|² · values[i]`.
    pub fn expectation_diagonal(&self, obs: &DiagonalObservable) -> Result<f64, StateError> {
        if obs.len() != self.len() {
            return Err(StateError::DimensionMismatch(self.len(), obs.len()));
        }
        Ok(self
            .amps
            .iter()
            .zip(obs.values())
            .map(|(a, &v)| a.norm_sqr() * v)
            .sum())
    }
}

/// Builds the dense Hermitian matrix of a Pauli-term sum.
///
/// Column `j` of a Pauli string is computed by acting on |j⟩: X and Y flip
/// their bit, Z keeps it; the phase factors are σ_y|b⟩ = i(1−2b)|1−b⟩ and
/// σ_z|b⟩ = (1−2b)|b⟩.
fn pauli_matrix(
    terms: &[PauliTerm],
    n_qubits: usize,
) -> Result<nalgebra::DMatrix<Complex64>, StateError> {
    let dim = 1usize << n_qubits;
    let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for term in terms {
        if term.axes.last().is_some_and(|&(q, _)| q >= n_qubits) {
            return Err(StateError::BadPauliTerm);
        }
        for col in 0..dim {
            let mut row = col;
            let mut phase = Complex64::new(term.coefficient, 0.0);
            for &(q, axis) in &term.axes {
                let bit = (col >> q) & 1;
                let sign = 1.0 - 2.0 * bit as f64;
                match axis {
                    Axis::X => row ^= 1 << q,
                    Axis::Y => {
                        row ^= 1 << q;
                        phase *= Complex64::new(0.0, sign);
                    }
                    Axis::Z => phase *= sign,
                }
            }
            m[(row, col)] += phase;
        }
    }
    Ok(m)
}

/// Dense exact spectrum of a Pauli-term Hamiltonian on `n_qubits ≤ 10`.
pub fn exact_spectrum(
    terms: &[PauliTerm],
    n_qubits: usize,
) -> Result<SpectrumReport, StateError> {
    check_qubit_count(n_qubits)?;
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(StateError::SpectrumTooLarge(n_qubits));
    }
    let m = pauli_matrix(terms, n_qubits)?;
    let eig = m.symmetric_eigen();
    Ok(SpectrumReport::from_eigenvalues(eig.eigenvalues.iter().copied().collect()))
}

/// Time-dependent Hamiltonian `H(t) = w_diag(t)·diag + w_mixer(t)·mixer`.
///
/// The structure (which diagonal, which mixer) is fixed over a run; only the
/// two scalar weights vary with time. This covers every schedule in the
/// annealing and QAOA modules.
pub struct HamiltonianAt<'a, F: Fn(f64) -> (f64, f64)> {
    pub diag: &'a DiagonalObservable,
    pub mixer: Mixer,
    pub weights: F,
}

/// Integrates the Schrödinger equation `dψ/dt = −i H(t) ψ` from `t0` to `t1`
/// with fixed-step RK4 of step `dt`, renormalizing after every step. The last
/// step is shortened to land exactly on `t1`.
///
/// Weights are sampled at `t`, `t + dt/2` and `t + dt` each step; a non-finite
/// weight aborts with an error naming the time.
pub fn evolve_time_dependent<F: Fn(f64) -> (f64, f64)>(
    state: StateVector,
    hamiltonian: &HamiltonianAt<'_, F>,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<StateVector, StateError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(StateError::BadStepSize(dt));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(StateError::EmptyWindow { t0, t1 });
    }
    if hamiltonian.diag.len() != state.len() {
        return Err(StateError::DimensionMismatch(
            state.len(),
            hamiltonian.diag.len(),
        ));
    }

    let mut psi = state;
    let dim = psi.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; dim];
    let mut k2 = vec![zero; dim];
    let mut k3 = vec![zero; dim];
    let mut k4 = vec![zero; dim];
    let mut scratch = vec![zero; dim];
    let mut stage = vec![zero; dim];

    // dψ/dt = −i H(t) ψ
    let rhs = |t: f64,
                   input: &[Complex64],
                   out: &mut [Complex64],
                   scratch: &mut [Complex64]|
     -> Result<(), StateError> {
        let (wd, wm) = (hamiltonian.weights)(t);
        if !(wd.is_finite() && wm.is_finite()) {
            return Err(StateError::NonFiniteHamiltonian { t });
        }
        hamiltonian.mixer.apply_into(input, scratch);
        let values = hamiltonian.diag.values();
        for i in 0..out.len() {
            let h_psi = wd * values[i] * input[i] + wm * scratch[i];
            out[i] = Complex64::new(h_psi.im, -h_psi.re); // −i · h_psi
        }
        Ok(())
    };

    let mut t = t0;
    while t < t1 {
        let h = dt.min(t1 - t);
        rhs(t, &psi.amps, &mut k1, &mut scratch)?;
        for i in 0..dim {
            stage[i] = psi.amps[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &stage, &mut k2, &mut scratch)?;
        for i in 0..dim {
            stage[i] = psi.amps[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &stage, &mut k3, &mut scratch)?;
        for i in 0..dim {
            stage[i] = psi.amps[i] + h * k3[i];
        }
        rhs(t + h, &stage, &mut k4, &mut scratch)?;
        let sixth = h / 6.0;
        for i in 0..dim {
            psi.amps[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NonFiniteHamiltonian { t });
        }
        psi.scale(norm.recip());
        t += h;
    }
    Ok(psi)
}
