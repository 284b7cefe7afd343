//! The alternating-operator ansatz over diagonal cost functions.
//!
//! Cost convention: every encoder in [`crate::problems`] arranges its
//! diagonal so that the quantity to *maximize* is `C(x) = −energy(x)`
//! (cut size, satisfied-clause count, …). The ansatz state is
//!
//! ```text
//! |γ,β⟩ = e^{−iβ_p M} e^{−iγ_p H} ⋯ e^{−iβ_1 M} e^{−iγ_1 H} |+⟩^⊗n
//! ```
//!
//! with `H` the problem diagonal and `M = Σ σ_x`, realized exactly as `n`
//! independent X-rotations by 2β per layer. Expectations are computed from
//! the state vector, not from finite samples; [`sample_bitstrings`] exists
//! separately for distribution realism.

use crate::problems::{index_to_bits, maxsat_diagonal, random_ksat, BitString, ProblemError};
use crate::optim::nelder_mead;
use crate::statevector::{Axis, DiagonalObservable, StateError, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

/// Optimization depth cap: beyond this the angle landscape outgrows the
/// derivative-free search budgets this crate uses.
pub const MAX_DEPTH: usize = 12;

#[derive(Debug, Error)]
pub enum QaoaError {
    #[error("angle vectors must both have length p: gamma {gamma_len}, beta {beta_len}")]
    LengthMismatch { gamma_len: usize, beta_len: usize },
    #[error("angles must be finite")]
    NonFiniteAngle,
    #[error("depth must be between 1 and {MAX_DEPTH}, got {0}")]
    DepthOutOfRange(usize),
    #[error("grid seeding is defined for p = 1 only, got p = {0}")]
    GridNeedsDepthOne(usize),
    #[error("cost maximum {c_max} is not positive; approximation ratios are undefined")]
    NonPositiveCost { c_max: f64 },
    #[error("gate failure probability must lie in [0, 1], got {0}")]
    BadProbability(f64),
    #[error("depth profile is empty")]
    EmptyProfile,
    #[error("need at least one sample")]
    ZeroSamples,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Angle set for a depth-p circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaParams {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self, QaoaError> {
        if gamma.len() != beta.len() || gamma.is_empty() {
            return Err(QaoaError::LengthMismatch {
                gamma_len: gamma.len(),
                beta_len: beta.len(),
            });
        }
        if !gamma.iter().chain(beta.iter()).all(|a| a.is_finite()) {
            return Err(QaoaError::NonFiniteAngle);
        }
        Ok(Self { gamma, beta })
    }

    pub fn p(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Flat layout `[γ_1..γ_p, β_1..β_p]` used by the optimizer.
    fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.gamma.clone();
        flat.extend_from_slice(&self.beta);
        flat
    }

    fn from_flat(flat: &[f64]) -> Self {
        let p = flat.len() / 2;
        Self {
            gamma: flat[..p].to_vec(),
            beta: flat[p..].to_vec(),
        }
    }
}

/// Angles read off a linear annealing ramp of length `total_time`:
/// γ_k = (t_k/T)·Δt and β_k = (1 − t_k/T)·Δt at t_k = k·Δt, the first-order
/// product formula for the interpolating generator `f·H + r·Σσ_x`.
pub fn linear_schedule_params(p: usize, total_time: f64) -> QaoaParams {
    let dt = total_time / p as f64;
    let gamma = (1..=p).map(|k| (k as f64 * dt / total_time) * dt).collect();
    let beta = (1..=p)
        .map(|k| (1.0 - k as f64 * dt / total_time) * dt)
        .collect();
    QaoaParams { gamma, beta }
}

/// Applies the p alternating layers to |+⟩^⊗n.
pub fn qaoa_state(
    problem: &DiagonalObservable,
    params: &QaoaParams,
) -> Result<StateVector, QaoaError> {
    let n = problem.n_qubits();
    let mut state = StateVector::uniform_superposition(n)?;
    for (&gamma, &beta) in params.gamma.iter().zip(&params.beta) {
        state = state.diagonal_phase(problem, gamma)?;
        for q in 0..n {
            state = state.axis_rotation(q, Axis::X, 2.0 * beta)?;
        }
    }
    Ok(state)
}

/// Cost expectation ⟨C⟩ = −⟨H⟩ of the ansatz state.
pub fn qaoa_expectation(
    problem: &DiagonalObservable,
    params: &QaoaParams,
) -> Result<f64, QaoaError> {
    let state = qaoa_state(problem, params)?;
    Ok(-state.expectation_diagonal(problem)?)
}

/// Parameter search strategy. Both run Nelder–Mead locally; they differ in
/// where the simplex starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QaoaStrategy {
    /// Scan a `per_axis × per_axis` grid over γ ∈ [0, 2π), β ∈ [0, π)
    /// (depth 1 only), then refine from the best grid point.
    GridThenLocal { per_axis: usize },
    /// One deterministic annealing-ramp start plus `n_starts − 1` random
    /// starts in the periodic angle box.
    MultistartLocal { n_starts: usize },
}

/// Result of an optimization run.
#[derive(Clone, Debug)]
pub struct QaoaOutcome {
    pub best_params: QaoaParams,
    /// Cost expectation ⟨C⟩ at the best parameters.
    pub expectation: f64,
    /// ⟨C⟩ / C_max with C_max = −min(energy), the exhaustive optimum.
    pub approximation_ratio: f64,
    /// |amplitude|² of the ansatz state at the best parameters.
    pub sample_distribution: Vec<f64>,
    pub n_evaluations: usize,
    /// False when the evaluation budget ran out before the local searches
    /// met their tolerance; the outcome still carries the best point seen.
    pub converged: bool,
}

/// Maximizes ⟨C⟩ over the angles at fixed depth. Never uses more than
/// `budget` expectation evaluations; ties between equally good parameter
/// sets break toward the lexicographically smallest vector so fixtures
/// reproduce.
pub fn optimize_qaoa(
    problem: &DiagonalObservable,
    p: usize,
    strategy: QaoaStrategy,
    budget: usize,
    seed: u64,
) -> Result<QaoaOutcome, QaoaError> {
    if p == 0 || p > MAX_DEPTH {
        return Err(QaoaError::DepthOutOfRange(p));
    }
    let c_max = -problem.min();
    if c_max <= 0.0 {
        return Err(QaoaError::NonPositiveCost { c_max });
    }

    let mut used = 0usize;
    // Minimize ⟨H⟩ = −⟨C⟩.
    let energy_of = |flat: &[f64]| -> f64 {
        let params = QaoaParams::from_flat(flat);
        let state = qaoa_state(problem, &params).expect("angles stay finite");
        state
            .expectation_diagonal(problem)
            .expect("dimensions fixed")
    };

    let mut best_flat: Option<Vec<f64>> = None;
    let mut best_value = f64::INFINITY;
    let improve = |flat: &[f64], value: f64, best_flat: &mut Option<Vec<f64>>, best_value: &mut f64| {
        let better = value < *best_value
            || (value == *best_value
                && best_flat
                    .as_deref()
                    .is_none_or(|b| lexicographically_smaller(flat, b)));
        if better {
            *best_value = value;
            *best_flat = Some(flat.to_vec());
        }
    };

    let mut converged = true;
    match strategy {
        QaoaStrategy::GridThenLocal { per_axis } => {
            if p != 1 {
                return Err(QaoaError::GridNeedsDepthOne(p));
            }
            let per_axis = per_axis.max(2);
            'grid: for i in 0..per_axis {
                for j in 0..per_axis {
                    if used >= budget {
                        converged = false;
                        break 'grid;
                    }
                    let flat = [
                        2.0 * PI * i as f64 / per_axis as f64,
                        PI * j as f64 / per_axis as f64,
                    ];
                    let value = energy_of(&flat);
                    used += 1;
                    improve(&flat, value, &mut best_flat, &mut best_value);
                }
            }
            if used < budget {
                let seed_flat = best_flat.clone().expect("grid evaluated at least once");
                let step = PI / per_axis as f64 / 2.0;
                let mut f = |x: &[f64]| energy_of(x);
                let local = nelder_mead(&mut f, &seed_flat, step, budget - used, 1e-10);
                used += local.n_evaluations;
                converged &= local.converged;
                improve(&local.x, local.value, &mut best_flat, &mut best_value);
            }
        }
        QaoaStrategy::MultistartLocal { n_starts } => {
            let n_starts = n_starts.max(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut starts: Vec<Vec<f64>> = vec![linear_schedule_params(p, 1.0).to_flat()];
            for _ in 1..n_starts {
                let mut flat = Vec::with_capacity(2 * p);
                for _ in 0..p {
                    flat.push(rng.gen_range(0.0..2.0 * PI));
                }
                for _ in 0..p {
                    flat.push(rng.gen_range(0.0..PI));
                }
                starts.push(flat);
            }
            let share = (budget / n_starts).max(1);
            for start in starts {
                if used >= budget {
                    converged = false;
                    break;
                }
                let this_share = share.min(budget - used);
                let mut f = |x: &[f64]| energy_of(x);
                let local = nelder_mead(&mut f, &start, 0.3, this_share, 1e-10);
                used += local.n_evaluations;
                converged &= local.converged;
                improve(&local.x, local.value, &mut best_flat, &mut best_value);
            }
        }
    }

    let best_flat = best_flat.expect("budget ≥ 1 evaluates at least one point");
    let best_params = QaoaParams::from_flat(&best_flat);
    let state = qaoa_state(problem, &best_params)?;
    let expectation = -best_value;
    Ok(QaoaOutcome {
        best_params,
        expectation,
        approximation_ratio: expectation / c_max,
        sample_distribution: state.probabilities(),
        n_evaluations: used,
        converged,
    })
}

fn lexicographically_smaller(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Draws `n_samples` i.i.d. basis states from |amplitude|².
pub fn sample_bitstrings(
    state: &StateVector,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<BitString>, QaoaError> {
    if n_samples == 0 {
        return Err(QaoaError::ZeroSamples);
    }
    let probabilities = state.probabilities();
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for p in &probabilities {
        acc += p;
        cdf.push(acc);
    }
    let n = state.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n_samples)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
            index_to_bits(idx, n)
        })
        .collect();
    Ok(samples)
}

/// One row of [`hardness_sweep_qaoa`]'s long-format table.
#[derive(Clone, Debug)]
pub struct HardnessRow {
    pub ratio: f64,
    pub p: usize,
    pub instance: usize,
    /// ⟨C⟩ / C_max for the MaxSAT cost (satisfied-clause count).
    pub qaoa_ratio: f64,
    /// Exhaustive maximum satisfied-clause count.
    pub sat_optimum: f64,
}

/// Sweeps random 3-SAT clause ratios against QAOA depth: at every
/// (ratio, instance) draws a fresh formula, and for each p in `p_list`
/// optimizes MaxSAT ⟨C⟩ with a 10-start multistart under `budget`
/// evaluations. Deterministic per seed.
pub fn hardness_sweep_qaoa(
    n: usize,
    ratios: &[f64],
    p_list: &[usize],
    instances: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<HardnessRow>, QaoaError> {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &ratio in ratios {
        let m = ((ratio * n as f64).round() as usize).max(1);
        for instance in 0..instances {
            let formula_seed: u64 = seeder.gen();
            let opt_seed: u64 = seeder.gen();
            let formula = random_ksat(n, m, 3, formula_seed)?;
            let diag = maxsat_diagonal(&formula)?;
            let sat_optimum = -diag.min();
            for &p in p_list {
                let outcome = optimize_qaoa(
                    &diag,
                    p,
                    QaoaStrategy::MultistartLocal { n_starts: 10 },
                    budget,
                    opt_seed,
                )?;
                rows.push(HardnessRow {
                    ratio,
                    p,
                    instance,
                    qaoa_ratio: outcome.approximation_ratio,
                    sat_optimum,
                });
            }
        }
    }
    Ok(rows)
}

/// Probability that at least one of `n_gates` independent gates fails:
/// `1 − (1 − p_gate)^n_gates`.
pub fn gate_failure_probability(p_gate: f64, n_gates: u32) -> Result<f64, QaoaError> {
    if !(0.0..=1.0).contains(&p_gate) {
        return Err(QaoaError::BadProbability(p_gate));
    }
    Ok(1.0 - (1.0 - p_gate).powi(n_gates as i32))
}

/// Algorithmic-qubit count from a width → achievable-depth profile:
/// `max_m min(m, d(m))` (the log₂ of the quantum-volume square).
pub fn algorithmic_qubits(depth_profile: &[(usize, usize)]) -> Result<usize, QaoaError> {
    depth_profile
        .iter()
        .map(|&(width, depth)| width.min(depth))
        .max()
        .ok_or(QaoaError::EmptyProfile)
}
