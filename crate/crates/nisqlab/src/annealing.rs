//! Continuous-time annealing dynamics.
//!
//! A run evolves |+⟩^⊗n under `H(t) = w_d(t)·H_problem + w_m(t)·M` where
//! `H_problem` is a [`DiagonalObservable`], `M` one of the two mixers, and the
//! weight pair comes from a [`ProtocolFamily`]. Alongside the integrator sits
//! a dense spectral scan that tracks the instantaneous gap across the
//! schedule, the quantity that decides whether a run can stay adiabatic.

use crate::statevector::{
    evolve_time_dependent, DiagonalObservable, HamiltonianAt, Mixer, SpectrumReport, StateError,
    StateVector, MAX_DENSE_QUBITS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Default schedule window: early enough that the mixer term dominates the
/// inverse-time families at the start, late enough that it has died off at
/// the end.
pub const DEFAULT_T_START: f64 = 0.05;
pub const DEFAULT_T_END: f64 = 50.0;

/// Step-halving agreement demanded by [`run_anneal_checked`].
pub const STEP_CHECK_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum AnnealError {
    #[error("schedule window must satisfy 0 < t_start < t_end, got [{t_start}, {t_end}]")]
    BadWindow { t_start: f64, t_end: f64 },
    #[error("annealing strength must be positive and finite, got {0}")]
    BadStrength(f64),
    #[error("linear schedule needs a positive total time, got {0}")]
    BadTotalTime(f64),
    #[error("dense gap scan supports at most {MAX_DENSE_QUBITS} qubits, got {0}")]
    ScanTooLarge(usize),
    #[error("gap scan needs at least 3 grid points, got {0}")]
    ScanGridTooSmall(usize),
    #[error(
        "gap varies {variation:.0}% between t = {t_before} and t = {t_after}; \
         the grid is too coarse to trust the minimum"
    )]
    GridTooCoarse {
        t_before: f64,
        t_after: f64,
        variation: f64,
    },
    #[error(
        "halving the step moved the ground-state fidelity by {difference:.3e} \
         (tolerance {STEP_CHECK_TOL:.0e}); rerun with a smaller dt"
    )]
    StepTooCoarse { difference: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// The annealing schedule shapes. Weight pairs are `(w_diag, w_mixer)`.
///
/// | family                    | mixer            | w_diag | w_mixer        |
/// |---------------------------|------------------|--------|----------------|
/// | `InverseTimeProjector`    | |+⟩⟨+|^⊗n        | 1      | −g/t           |
/// | `InverseTimeTransverse`   | −Σσ_x            | 1      | g/(n·t)        |
/// | `InverseSquareProjector`  | |+⟩⟨+|^⊗n        | 1      | −g/(ΔE·t²)     |
/// | `Linear`                  | −Σσ_x            | t/T    | 1 − t/T        |
///
/// ΔE is the spectral bandwidth of the problem diagonal, so the
/// inverse-square family self-scales to the instance. The projector rows put
/// the attractive sign in the weight because the projector operator itself is
/// positive; the transverse rows already carry the sign inside the mixer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProtocolFamily {
    InverseTimeProjector,
    InverseTimeTransverse,
    InverseSquareProjector,
    Linear { total_time: f64 },
}

impl ProtocolFamily {
    pub fn label(&self) -> &'static str {
        match self {
            ProtocolFamily::InverseTimeProjector => "projector-1/t",
            ProtocolFamily::InverseTimeTransverse => "transverse-1/t",
            ProtocolFamily::InverseSquareProjector => "projector-1/t2",
            ProtocolFamily::Linear { .. } => "linear",
        }
    }
}

/// A complete annealing specification: family, strength, schedule window,
/// and an optional mixer-sign flip for probing the repulsive variants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealProtocol {
    family: ProtocolFamily,
    strength: f64,
    t_start: f64,
    t_end: f64,
    flip_sign: bool,
}

impl AnnealProtocol {
    /// Projector mixer with weight −g/t over the default window.
    pub fn inverse_time_projector(strength: f64) -> Result<Self, AnnealError> {
        Self::new(ProtocolFamily::InverseTimeProjector, strength)
    }

    /// Transverse-field mixer with weight g/(n·t) over the default window.
    pub fn inverse_time_transverse(strength: f64) -> Result<Self, AnnealError> {
        Self::new(ProtocolFamily::InverseTimeTransverse, strength)
    }

    /// Projector mixer with weight −g/(ΔE·t²) over the default window.
    pub fn inverse_square_projector(strength: f64) -> Result<Self, AnnealError> {
        Self::new(ProtocolFamily::InverseSquareProjector, strength)
    }

    /// Standard interpolation (1−t/T)·mixer + (t/T)·problem on [0, T].
    pub fn linear(total_time: f64) -> Result<Self, AnnealError> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(AnnealError::BadTotalTime(total_time));
        }
        Ok(Self {
            family: ProtocolFamily::Linear { total_time },
            strength: 1.0,
            t_start: 0.0,
            t_end: total_time,
            flip_sign: false,
        })
    }

    fn new(family: ProtocolFamily, strength: f64) -> Result<Self, AnnealError> {
        if !(strength.is_finite() && strength > 0.0) {
            return Err(AnnealError::BadStrength(strength));
        }
        Ok(Self {
            family,
            strength,
            t_start: DEFAULT_T_START,
            t_end: DEFAULT_T_END,
            flip_sign: false,
        })
    }

    /// Replaces the schedule window (inverse-time families need t_start > 0).
    pub fn with_window(mut self, t_start: f64, t_end: f64) -> Result<Self, AnnealError> {
        let min_start_ok = match self.family {
            ProtocolFamily::Linear { .. } => t_start >= 0.0,
            _ => t_start > 0.0,
        };
        if !(min_start_ok && t_end.is_finite() && t_end > t_start) {
            return Err(AnnealError::BadWindow { t_start, t_end });
        }
        self.t_start = t_start;
        self.t_end = t_end;
        Ok(self)
    }

    /// Negates the mixer weight, turning the attractive drive repulsive.
    pub fn with_flipped_sign(mut self) -> Self {
        self.flip_sign = true;
        self
    }

    pub fn family(&self) -> ProtocolFamily {
        self.family
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    pub fn mixer(&self) -> Mixer {
        match self.family {
            ProtocolFamily::InverseTimeProjector | ProtocolFamily::InverseSquareProjector => {
                Mixer::PlusProjector
            }
            ProtocolFamily::InverseTimeTransverse | ProtocolFamily::Linear { .. } => {
                Mixer::TransverseField
            }
        }
    }

    /// Weight pair `(w_diag, w_mixer)` at time `t` for a given problem size
    /// and spectral bandwidth.
    pub fn weights(&self, t: f64, n_qubits: usize, bandwidth: f64) -> (f64, f64) {
        let g = self.strength;
        let (w_diag, w_mixer) = match self.family {
            ProtocolFamily::InverseTimeProjector => (1.0, -g / t),
            ProtocolFamily::InverseTimeTransverse => (1.0, g / (n_qubits as f64 * t)),
            ProtocolFamily::InverseSquareProjector => (1.0, -g / (bandwidth * t * t)),
            ProtocolFamily::Linear { total_time } => {
                let s = t / total_time;
                (s, 1.0 - s)
            }
        };
        if self.flip_sign {
            (w_diag, -w_mixer)
        } else {
            (w_diag, w_mixer)
        }
    }
}

/// Outcome of one annealing run.
#[derive(Clone, Debug)]
pub struct AnnealResult {
    pub final_state: StateVector,
    /// Population of the (possibly degenerate) ground cluster of the problem.
    pub ground_state_fidelity: f64,
    /// ⟨H_problem⟩ − E_min at the end of the run; ≥ 0 up to integrator noise.
    pub residual_energy: f64,
    /// 1 − ground-cluster population.
    pub excitation_number: f64,
}

/// Integrates one protocol run from |+⟩^⊗n with fixed RK4 steps of size `dt`
/// and scores the final state against the problem diagonal.
pub fn run_anneal(
    problem: &DiagonalObservable,
    protocol: &AnnealProtocol,
    dt: f64,
) -> Result<AnnealResult, AnnealError> {
    let n = problem.n_qubits();
    let bandwidth = problem.bandwidth();
    let start = StateVector::uniform_superposition(n)?;
    let hamiltonian = HamiltonianAt {
        diag: problem,
        mixer: protocol.mixer(),
        weights: |t: f64| protocol.weights(t, n, bandwidth),
    };
    let final_state =
        evolve_time_dependent(start, &hamiltonian, protocol.t_start, protocol.t_end, dt)?;

    let ground = problem.ground_indices();
    let fidelity: f64 = ground
        .iter()
        .map(|&i| final_state.probability(i))
        .sum();
    let residual = final_state.expectation_diagonal(problem)? - problem.min();
    Ok(AnnealResult {
        final_state,
        ground_state_fidelity: fidelity,
        residual_energy: residual,
        excitation_number: 1.0 - fidelity,
    })
}

/// Like [`run_anneal`], but reruns at `dt/2` and insists the ground-state
/// fidelity agree within [`STEP_CHECK_TOL`]. Returns the finer result.
pub fn run_anneal_checked(
    problem: &DiagonalObservable,
    protocol: &AnnealProtocol,
    dt: f64,
) -> Result<AnnealResult, AnnealError> {
    let coarse = run_anneal(problem, protocol, dt)?;
    let fine = run_anneal(problem, protocol, dt / 2.0)?;
    let difference = (coarse.ground_state_fidelity - fine.ground_state_fidelity).abs();
    if difference > STEP_CHECK_TOL {
        return Err(AnnealError::StepTooCoarse { difference });
    }
    Ok(fine)
}

/// Random problem instance for protocol comparisons: 2^n energies drawn
/// i.i.d. uniform on [0, 1), so the bandwidth is O(1) for every instance and
/// one strength grid serves them all.
pub fn random_uniform_diagonal(n_qubits: usize, seed: u64) -> Result<DiagonalObservable, StateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DiagonalObservable::from_fn(n_qubits, |_| rng.gen::<f64>())
}

/// One anneal run inside a protocol-comparison sweep.
#[derive(Clone, Debug)]
pub struct ProtocolComparisonRow {
    pub protocol: ProtocolFamily,
    pub strength: f64,
    pub instance_seed: u64,
    pub n_qubits: usize,
    pub excitation: f64,
    pub fidelity: f64,
    pub residual_energy: f64,
}

/// Runs every listed protocol family over a shared strength grid and a shared
/// set of random uniform-energy instances, so rows at the same `(strength,
/// instance)` coordinate differ only in the protocol. Rows come back sorted by
/// (family order as given, strength order as given, instance index) regardless
/// of how the work was scheduled.
pub fn protocol_comparison(
    n_qubits: usize,
    families: &[ProtocolFamily],
    g_grid: &[f64],
    n_instances: usize,
    seed: u64,
    dt: f64,
) -> Result<Vec<ProtocolComparisonRow>, AnnealError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instance_seeds: Vec<u64> = (0..n_instances).map(|_| rng.gen()).collect();
    let problems: Vec<DiagonalObservable> = instance_seeds
        .iter()
        .map(|&s| random_uniform_diagonal(n_qubits, s))
        .collect::<Result<_, _>>()?;

    let mut cells = Vec::new();
    for &family in families {
        for &g in g_grid {
            let protocol = match family {
                ProtocolFamily::InverseTimeProjector => AnnealProtocol::inverse_time_projector(g),
                ProtocolFamily::InverseTimeTransverse => {
                    AnnealProtocol::inverse_time_transverse(g)
                }
                ProtocolFamily::InverseSquareProjector => {
                    AnnealProtocol::inverse_square_projector(g)
                }
                ProtocolFamily::Linear { total_time } => AnnealProtocol::linear(total_time),
            }?;
            for (index, problem) in problems.iter().enumerate() {
                cells.push((protocol, family, g, index, problem));
            }
        }
    }

    cells
        .into_par_iter()
        .map(|(protocol, family, g, index, problem)| {
            let result = run_anneal(problem, &protocol, dt)?;
            Ok(ProtocolComparisonRow {
                protocol: family,
                strength: g,
                instance_seed: instance_seeds[index],
                n_qubits,
                excitation: result.excitation_number,
                fidelity: result.ground_state_fidelity,
                residual_energy: result.residual_energy,
            })
        })
        .collect()
}

/// Mean excitation number of one (protocol, strength) cell of a comparison.
pub fn mean_excitation(
    rows: &[ProtocolComparisonRow],
    family: ProtocolFamily,
    strength: f64,
) -> Option<f64> {
    let cell: Vec<f64> = rows
        .iter()
        .filter(|r| r.protocol == family && r.strength == strength)
        .map(|r| r.excitation)
        .collect();
    if cell.is_empty() {
        None
    } else {
        Some(cell.iter().sum::<f64>() / cell.len() as f64)
    }
}

// ---------------------------------------------------------------------------
// Spectral scan
// ---------------------------------------------------------------------------

/// Instantaneous-gap profile of a protocol over its schedule window.
#[derive(Clone, Debug)]
pub struct GapScan {
    pub times: Vec<f64>,
    /// Gap between the ground cluster and the first level above it, per grid
    /// point.
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub min_gap_time: f64,
    /// Ground-cluster size at the minimum-gap point.
    pub ground_degeneracy_at_min: usize,
    /// Spectral bandwidth of the *problem* diagonal (not of H(t)).
    pub problem_bandwidth: f64,
}

/// Both mixers are real symmetric matrices; so is the full H(t).
fn mixer_matrix(mixer: Mixer, n_qubits: usize) -> nalgebra::DMatrix<f64> {
    let dim = 1usize << n_qubits;
    match mixer {
        Mixer::TransverseField => {
            let mut m = nalgebra::DMatrix::zeros(dim, dim);
            for i in 0..dim {
                for q in 0..n_qubits {
                    m[(i ^ (1usize << q), i)] = -1.0;
                }
            }
            m
        }
        Mixer::PlusProjector => {
            nalgebra::DMatrix::from_element(dim, dim, 1.0 / dim as f64)
        }
    }
}

/// Full spectrum of `diag(d) + w·vvᵀ` with uniform `v_i² = 1/dim`, the shape
/// every projector-mixer H(t) takes. Eigenvalues away from the `d_i` are the
/// roots of the secular equation `1 + (w/dim)·Σ_i 1/(d_i − λ) = 0`; they
/// interlace the sorted `d_i` from below when w < 0 and from above when
/// w > 0, one root per bracket, and the secular function is monotone inside
/// each bracket, so bisection cannot miss. Duplicate `d_i` collapse their
/// bracket to a point, which is itself the correct (degenerate) eigenvalue.
///
/// `diag_sorted` must be ascending. Costs O(dim²) against the O(dim³) of a
/// dense solve, which is what makes fine-grained scans affordable.
fn projector_update_spectrum(diag_sorted: &[f64], w: f64) -> Vec<f64> {
    let dim = diag_sorted.len();
    if w == 0.0 {
        return diag_sorted.to_vec();
    }
    let weight = w / dim as f64;
    let secular =
        |lambda: f64| 1.0 + weight * diag_sorted.iter().map(|&d| 1.0 / (d - lambda)).sum::<f64>();

    // The sign of the secular function at the lower bracket edge is fixed by
    // the sign of w, so each bisection keeps that edge's sign on `lo`.
    let sign_at_lo = if w < 0.0 { 1.0 } else { -1.0 };
    let bisect = |mut lo: f64, mut hi: f64| -> f64 {
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) * sign_at_lo >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let mut out = Vec::with_capacity(dim);
    if w < 0.0 {
        out.push(bisect(diag_sorted[0] + w, diag_sorted[0]));
        for k in 1..dim {
            out.push(bisect(diag_sorted[k - 1], diag_sorted[k]));
        }
    } else {
        for k in 0..dim - 1 {
            out.push(bisect(diag_sorted[k], diag_sorted[k + 1]));
        }
        out.push(bisect(diag_sorted[dim - 1], diag_sorted[dim - 1] + w));
    }
    out
}

/// Diagonalization of H(t) on `n_points` grid times across the protocol
/// window. Fails with [`AnnealError::GridTooCoarse`] when the gap jumps by
/// more than 50% between neighboring grid points, since the reported minimum
/// could then be badly off; retry with more points.
pub fn min_gap_scan(
    problem: &DiagonalObservable,
    protocol: &AnnealProtocol,
    n_points: usize,
) -> Result<GapScan, AnnealError> {
    let n = problem.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(AnnealError::ScanTooLarge(n));
    }
    if n_points < 3 {
        return Err(AnnealError::ScanGridTooSmall(n_points));
    }
    let dim = 1usize << n;
    let bandwidth = problem.bandwidth();
    let use_secular = protocol.mixer() == Mixer::PlusProjector;
    let mixer = (!use_secular).then(|| mixer_matrix(protocol.mixer(), n));
    let mut diag_sorted = problem.values().to_vec();
    diag_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));

    // Inverse-time families have their structure at small t; a linear grid
    // would waste almost all points on the featureless tail. Walk the window
    // geometrically for them, linearly for the linear interpolation.
    let (t0, t1) = protocol.window();
    let times: Vec<f64> = match protocol.family() {
        ProtocolFamily::Linear { .. } => (0..n_points)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n_points - 1) as f64)
            .collect(),
        _ => {
            let ratio = t1 / t0;
            (0..n_points)
                .map(|i| t0 * ratio.powf(i as f64 / (n_points - 1) as f64))
                .collect()
        }
    };

    let mut gaps = Vec::with_capacity(n_points);
    let mut reports = Vec::with_capacity(n_points);
    for &t in &times {
        let (w_diag, w_mixer) = protocol.weights(t, n, bandwidth);
        let eigenvalues: Vec<f64> = if use_secular {
            let mut scaled: Vec<f64> = diag_sorted.iter().map(|&d| w_diag * d).collect();
            if w_diag < 0.0 {
                scaled.reverse();
            }
            projector_update_spectrum(&scaled, w_mixer)
        } else {
            let mixer = mixer.as_ref().expect("dense path keeps the mixer matrix");
            let mut h = mixer * w_mixer;
            for i in 0..dim {
                h[(i, i)] += w_diag * problem.values()[i];
            }
            h.symmetric_eigen().eigenvalues.iter().copied().collect()
        };
        let report = SpectrumReport::from_eigenvalues(eigenvalues);
        gaps.push(report.min_gap);
        reports.push(report);
    }

    for i in 0..n_points - 1 {
        let (a, b) = (gaps[i], gaps[i + 1]);
        let scale = a.max(b);
        if scale > 0.0 && (a - b).abs() / scale > 0.5 {
            return Err(AnnealError::GridTooCoarse {
                t_before: times[i],
                t_after: times[i + 1],
                variation: 100.0 * (a - b).abs() / scale,
            });
        }
    }

    let (min_idx, &min_gap) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite gaps"))
        .expect("grid has at least 3 points");
    Ok(GapScan {
        min_gap,
        min_gap_time: times[min_idx],
        ground_degeneracy_at_min: reports[min_idx].ground_degeneracy,
        problem_bandwidth: bandwidth,
        times,
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{ising_to_diagonal, IsingHamiltonian};

    fn two_spin_problem() -> DiagonalObservable {
        let mut h = IsingHamiltonian::new(2);
        h.set_field(0, 0.4);
        h.set_field(1, -0.7);
        h.set_coupling(0, 1, 0.3);
        ising_to_diagonal(&h).unwrap()
    }

    #[test]
    fn weight_tables_match_definitions() {
        let p1 = AnnealProtocol::inverse_time_projector(3.0).unwrap();
        assert_eq!(p1.weights(2.0, 4, 1.0), (1.0, -1.5));
        assert_eq!(p1.mixer(), Mixer::PlusProjector);

        let p2 = AnnealProtocol::inverse_time_transverse(3.0).unwrap();
        assert_eq!(p2.weights(2.0, 4, 1.0), (1.0, 3.0 / 8.0));
        assert_eq!(p2.mixer(), Mixer::TransverseField);

        let p3 = AnnealProtocol::inverse_square_projector(3.0).unwrap();
        assert_eq!(p3.weights(2.0, 4, 5.0), (1.0, -3.0 / 20.0));
        assert_eq!(p3.mixer(), Mixer::PlusProjector);

        let lin = AnnealProtocol::linear(10.0).unwrap();
        assert_eq!(lin.weights(2.5, 4, 1.0), (0.25, 0.75));
        assert_eq!(lin.mixer(), Mixer::TransverseField);

        let flipped = p1.with_flipped_sign();
        assert_eq!(flipped.weights(2.0, 4, 1.0), (1.0, 1.5));
    }

    #[test]
    fn constructors_validate() {
        assert!(AnnealProtocol::inverse_time_projector(0.0).is_err());
        assert!(AnnealProtocol::inverse_time_projector(f64::NAN).is_err());
        assert!(AnnealProtocol::linear(-1.0).is_err());
        let p = AnnealProtocol::inverse_time_projector(1.0).unwrap();
        assert!(p.with_window(0.0, 10.0).is_err(), "inverse time needs t > 0");
        assert!(p.with_window(1.0, 0.5).is_err());
        assert_eq!(p.window(), (DEFAULT_T_START, DEFAULT_T_END));
    }

    #[test]
    fn comparison_rows_are_deterministic_and_matched() {
        let families = [
            ProtocolFamily::InverseTimeProjector,
            ProtocolFamily::InverseTimeTransverse,
        ];
        let grid = [0.5, 2.0];
        let rows = protocol_comparison(3, &families, &grid, 2, 11, 0.01).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        let rerun = protocol_comparison(3, &families, &grid, 2, 11, 0.01).unwrap();
        for (a, b) in rows.iter().zip(&rerun) {
            assert_eq!(a.protocol, b.protocol);
            assert_eq!(a.excitation, b.excitation);
        }
        // Matched instances: both protocols saw the same seeds in the same order.
        let seeds: Vec<u64> = rows[0..2].iter().map(|r| r.instance_seed).collect();
        let other: Vec<u64> = rows[4..6].iter().map(|r| r.instance_seed).collect();
        assert_eq!(seeds, other);
        assert!(mean_excitation(&rows, ProtocolFamily::InverseTimeProjector, 0.5).is_some());
        assert!(mean_excitation(&rows, ProtocolFamily::InverseTimeProjector, 9.0).is_none());
    }

    #[test]
    fn vanishing_drive_leaves_the_uniform_distribution() {
        // With g ≈ 0 the Hamiltonian is purely diagonal, so probabilities
        // never move: the ground population stays 1/2^n.
        let rows = protocol_comparison(
            3,
            &[ProtocolFamily::InverseTimeProjector],
            &[1e-9],
            2,
            5,
            0.01,
        )
        .unwrap();
        for row in rows {
            assert!(
                (row.excitation - (1.0 - 1.0 / 8.0)).abs() < 1e-6,
                "excitation {}",
                row.excitation
            );
        }
    }

    #[test]
    fn slow_linear_anneal_reaches_the_ground_state() {
        let problem = two_spin_problem();
        let protocol = AnnealProtocol::linear(100.0).unwrap();
        let result = run_anneal(&problem, &protocol, 0.01).unwrap();
        assert!(
            result.ground_state_fidelity > 0.99,
            "fidelity {}",
            result.ground_state_fidelity
        );
        assert!(result.residual_energy >= -1e-9);
        assert!(result.residual_energy < 0.05);
        assert!(
            (result.excitation_number + result.ground_state_fidelity - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn fast_quench_stays_excited() {
        let problem = two_spin_problem();
        let protocol = AnnealProtocol::linear(0.05).unwrap();
        let result = run_anneal(&problem, &protocol, 0.001).unwrap();
        assert!(
            result.ground_state_fidelity < 0.6,
            "a 0.05-time quench should miss, got {}",
            result.ground_state_fidelity
        );
    }

    #[test]
    fn inverse_time_projector_run_completes() {
        let problem = random_uniform_diagonal(3, 4).unwrap();
        let protocol = AnnealProtocol::inverse_time_projector(2.0).unwrap();
        let result = run_anneal(&problem, &protocol, 0.002).unwrap();
        assert!(result.ground_state_fidelity > 0.0 && result.ground_state_fidelity <= 1.0 + 1e-9);
        assert!(result.residual_energy >= -1e-9);
    }

    #[test]
    fn step_check_accepts_fine_and_rejects_coarse() {
        let problem = two_spin_problem();
        let protocol = AnnealProtocol::linear(5.0).unwrap();
        assert!(run_anneal_checked(&problem, &protocol, 0.01).is_ok());
        // A quarter of the whole window per step is hopeless.
        let coarse = run_anneal_checked(&problem, &protocol, 1.25);
        assert!(
            matches!(coarse, Err(AnnealError::StepTooCoarse { .. })),
            "got {coarse:?}"
        );
    }

    #[test]
    fn single_qubit_linear_gap_is_analytic() {
        // H(s) = s·(±1 diagonal) + (1−s)·(−σ_x) has eigenvalues
        // ±√(s² + (1−s)²): the gap is 2√(s² + (1−s)²), minimized at s = 1/2
        // with value √2.
        let mut h = IsingHamiltonian::new(1);
        h.set_field(0, -1.0); // diagonal (−1, +1) under σ = 2b − 1
        let problem = ising_to_diagonal(&h).unwrap();
        let protocol = AnnealProtocol::linear(1.0).unwrap();
        let scan = min_gap_scan(&problem, &protocol, 201).unwrap();
        assert!(
            (scan.min_gap - 2.0_f64.sqrt()).abs() < 1e-3,
            "min gap {} vs √2",
            scan.min_gap
        );
        assert!((scan.min_gap_time - 0.5).abs() < 0.01);
        for (&t, &gap) in scan.times.iter().zip(&scan.gaps) {
            let s = t;
            let expect = 2.0 * (s * s + (1.0 - s) * (1.0 - s)).sqrt();
            assert!((gap - expect).abs() < 1e-9, "t = {t}: {gap} vs {expect}");
        }
        assert_eq!(scan.ground_degeneracy_at_min, 1);
        assert!((scan.problem_bandwidth - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_on_a_sharp_crossing_errors() {
        let problem = DiagonalObservable::new(vec![0.0, 1000.0]).unwrap();
        let protocol = AnnealProtocol::linear(1.0).unwrap();
        let result = min_gap_scan(&problem, &protocol, 3);
        assert!(
            matches!(result, Err(AnnealError::GridTooCoarse { .. })),
            "got {result:?}"
        );
        // The same scan with a dense grid succeeds.
        assert!(min_gap_scan(&problem, &protocol, 4001).is_ok());
    }

    #[test]
    fn scan_rejects_oversized_and_undersized_input() {
        let problem = random_uniform_diagonal(3, 0).unwrap();
        let protocol = AnnealProtocol::linear(1.0).unwrap();
        assert!(matches!(
            min_gap_scan(&problem, &protocol, 2),
            Err(AnnealError::ScanGridTooSmall(2))
        ));
        let big = random_uniform_diagonal(11, 0).unwrap();
        assert!(matches!(
            min_gap_scan(&big, &protocol, 10),
            Err(AnnealError::ScanTooLarge(11))
        ));
    }

    #[test]
    fn uniform_diagonal_is_reproducible_and_in_range() {
        let a = random_uniform_diagonal(4, 9).unwrap();
        let b = random_uniform_diagonal(4, 9).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().iter().all(|&v| (0.0..1.0).contains(&v)));
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn secular_spectrum_matches_dense_diagonalization() {
        for (n, seed) in [(3usize, 5u64), (5, 6)] {
            let problem = random_uniform_diagonal(n, seed).unwrap();
            let mut sorted = problem.values().to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let dim = 1usize << n;
            for w in [-17.0, -1.0, -0.003, 0.25, 4.0] {
                let fast = projector_update_spectrum(&sorted, w);
                let mut h = mixer_matrix(Mixer::PlusProjector, n) * w;
                for i in 0..dim {
                    h[(i, i)] += problem.values()[i];
                }
                let mut dense: Vec<f64> =
                    h.symmetric_eigen().eigenvalues.iter().copied().collect();
                dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (a, b) in fast.iter().zip(&dense) {
                    assert!((a - b).abs() < 1e-8, "w = {w}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn secular_spectrum_handles_degenerate_levels() {
        // All levels equal is the pure unstructured-search Hamiltonian:
        // spectrum {d + w, d×(dim−1)} exactly.
        let sorted = vec![0.25; 8];
        let spec = projector_update_spectrum(&sorted, -2.0);
        assert!((spec[0] - (0.25 - 2.0)).abs() < 1e-12);
        for &ev in &spec[1..] {
            assert!((ev - 0.25).abs() < 1e-12);
        }
        // A partial degeneracy keeps the duplicated level in the spectrum.
        let sorted = vec![0.0, 0.5, 0.5, 1.0];
        let spec = projector_update_spectrum(&sorted, -1.0);
        let mut h = nalgebra::DMatrix::from_element(4, 4, -1.0 / 4.0);
        for (i, &d) in sorted.iter().enumerate() {
            h[(i, i)] += d;
        }
        let mut dense: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in spec.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn projector_scan_gap_shrinks_with_size() {
        let protocol = AnnealProtocol::inverse_time_projector(1.0).unwrap();
        let mut medians = Vec::new();
        for n in [4usize, 6] {
            let mut gaps: Vec<f64> = (0..9)
                .map(|k| {
                    let problem = random_uniform_diagonal(n, 300 + k).unwrap();
                    let mut points = 160;
                    loop {
                        match min_gap_scan(&problem, &protocol, points) {
                            Err(AnnealError::GridTooCoarse { .. }) if points < 6000 => {
                                points *= 2
                            }
                            other => break other.unwrap().min_gap,
                        }
                    }
                })
                .collect();
            gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(gaps[gaps.len() / 2]);
        }
        assert!(
            medians[1] < medians[0],
            "median gap should shrink: {medians:?}"
        );
    }
}
