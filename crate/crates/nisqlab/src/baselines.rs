//! Classical reference solvers. Every quantum result in the crate is judged
//! against one of these: exhaustive search where feasible, DPLL with work
//! counters for SAT, Metropolis simulated annealing for everything else, and
//! the left-to-right greedy rule for paint shop.

use crate::problems::{
    bits_to_index, index_to_bits, BitString, CnfFormula, IsingHamiltonian, PaintShopSequence,
    QuboProblem,
};
use crate::statevector::DiagonalObservable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest variable count [`brute_force_minimum`] will enumerate.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("{0} variables exceed the exhaustive-search bound {MAX_BRUTE_FORCE_VARS}")]
    TooManyVariables(usize),
    #[error("temperatures must satisfy t_initial ≥ t_final > 0, got {t_initial} and {t_final}")]
    BadTemperatureOrder { t_initial: f64, t_final: f64 },
    #[error("schedule needs at least one step")]
    ZeroSteps,
}

// ---------------------------------------------------------------------------
// Objective abstraction
// ---------------------------------------------------------------------------

/// A real-valued function of a bit string that supports cheap single-flip
/// energy differences. Implemented by all three problem forms so the solvers
/// below are form-agnostic.
pub trait Objective {
    fn n_vars(&self) -> usize;

    /// Full energy of an assignment.
    fn energy(&self, bits: &[u8]) -> f64;

    /// Energy change that flipping bit `flip` would cause, without applying
    /// it. Default recomputes both sides; implementors override with an O(n)
    /// or O(1) form.
    fn flip_delta(&self, bits: &[u8], flip: usize) -> f64 {
        let mut flipped = bits.to_vec();
        flipped[flip] ^= 1;
        self.energy(&flipped) - self.energy(bits)
    }
}

impl Objective for QuboProblem {
    fn n_vars(&self) -> usize {
        self.n_vars()
    }

    fn energy(&self, bits: &[u8]) -> f64 {
        QuboProblem::energy(self, bits)
    }

    fn flip_delta(&self, bits: &[u8], flip: usize) -> f64 {
        QuboProblem::flip_delta(self, bits, flip)
    }
}

impl Objective for IsingHamiltonian {
    fn n_vars(&self) -> usize {
        self.n_spins()
    }

    fn energy(&self, bits: &[u8]) -> f64 {
        self.energy_bits(bits)
    }

    fn flip_delta(&self, bits: &[u8], flip: usize) -> f64 {
        // Flipping bit k negates spin σ_k; the affected energy terms are
        // −a_k σ_k − 2 σ_k Σ_m J_km σ_m, so the change is twice their value
        // with the opposite sign applied… collected: 2 σ_k (a_k + 2 Σ J σ).
        let sk = (2 * bits[flip] as i32 - 1) as f64;
        let cross: f64 = (0..self.n_spins())
            .map(|m| self.coupling(flip, m) * (2 * bits[m] as i32 - 1) as f64)
            .sum();
        2.0 * sk * (self.field(flip) + 2.0 * cross)
    }
}

impl Objective for DiagonalObservable {
    fn n_vars(&self) -> usize {
        self.n_qubits()
    }

    fn energy(&self, bits: &[u8]) -> f64 {
        self.values()[bits_to_index(bits)]
    }

    fn flip_delta(&self, bits: &[u8], flip: usize) -> f64 {
        let i = bits_to_index(bits);
        self.values()[i ^ (1 << flip)] - self.values()[i]
    }
}

/// Exhaustive minimization. Ties break toward the lowest basis index, so the
/// result is unique and reproducible.
pub fn brute_force_minimum(obj: &impl Objective) -> Result<(BitString, f64), BaselineError> {
    let n = obj.n_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(BaselineError::TooManyVariables(n));
    }
    let mut best_index = 0;
    let mut best_energy = f64::INFINITY;
    for i in 0..1usize << n {
        let e = obj.energy(&index_to_bits(i, n));
        if e < best_energy {
            best_energy = e;
            best_index = i;
        }
    }
    Ok((index_to_bits(best_index, n), best_energy))
}

// ---------------------------------------------------------------------------
// DPLL with work counters
// ---------------------------------------------------------------------------

/// Outcome of a DPLL run, with the search-effort counters used by the
/// phase-transition experiment. `backtracks ≤ decisions` always: a backtrack
/// is recorded when a decision's first branch fails and the solver flips it.
#[derive(Clone, Debug, PartialEq)]
pub struct SatRunStats {
    pub satisfiable: bool,
    /// A satisfying assignment when one exists (bit i ↔ variable i+1).
    pub assignment: Option<BitString>,
    /// Branch nodes expanded (unit propagation is not a decision).
    pub decisions: u64,
    /// First-branch failures that forced trying the opposite value.
    pub backtracks: u64,
}

/// Davis–Putnam–Logemann–Loveland search: unit propagation to fixpoint, then
/// branch on the lowest-index unassigned variable, true first. No
/// pure-literal elimination, so the work counters reflect raw search.
pub fn dpll_count(f: &CnfFormula) -> SatRunStats {
    let mut stats = SatRunStats {
        satisfiable: false,
        assignment: None,
        decisions: 0,
        backtracks: 0,
    };
    let assignment = vec![None; f.n_vars()];
    let found = search(f, assignment, &mut stats);
    stats.satisfiable = found.is_some();
    stats.assignment = found.map(|assign| {
        assign
            .iter()
            // Variables untouched by the search are don't-cares; fix them to 0.
            .map(|v| v.unwrap_or(false) as u8)
            .collect()
    });
    stats
}

/// Clause status under a partial assignment.
enum ClauseState {
    Satisfied,
    Conflict,
    Unit(i32),
    Open,
}

fn clause_state(clause: &[i32], assignment: &[Option<bool>]) -> ClauseState {
    let mut unassigned = None;
    let mut n_unassigned = 0;
    for &lit in clause {
        match assignment[(lit.unsigned_abs() - 1) as usize] {
            Some(value) => {
                if value == (lit > 0) {
                    return ClauseState::Satisfied;
                }
            }
            None => {
                n_unassigned += 1;
                unassigned = Some(lit);
            }
        }
    }
    match n_unassigned {
        0 => ClauseState::Conflict,
        1 => ClauseState::Unit(unassigned.expect("counted one unassigned literal")),
        _ => ClauseState::Open,
    }
}

/// Returns a satisfying completion of `assignment`, or None if none exists
/// below this node.
fn search(
    f: &CnfFormula,
    mut assignment: Vec<Option<bool>>,
    stats: &mut SatRunStats,
) -> Option<Vec<Option<bool>>> {
    // Unit propagation to fixpoint.
    loop {
        let mut propagated = false;
        let mut all_satisfied = true;
        for clause in f.clauses() {
            match clause_state(clause, &assignment) {
                ClauseState::Satisfied => {}
                ClauseState::Conflict => return None,
                ClauseState::Unit(lit) => {
                    assignment[(lit.unsigned_abs() - 1) as usize] = Some(lit > 0);
                    propagated = true;
                    all_satisfied = false;
                }
                ClauseState::Open => all_satisfied = false,
            }
        }
        if all_satisfied {
            return Some(assignment);
        }
        if !propagated {
            break;
        }
    }

    let var = assignment
        .iter()
        .position(|v| v.is_none())
        .expect("open clauses imply an unassigned variable");
    stats.decisions += 1;

    let mut first = assignment.clone();
    first[var] = Some(true);
    if let Some(solution) = search(f, first, stats) {
        return Some(solution);
    }
    stats.backtracks += 1;

    assignment[var] = Some(false);
    search(f, assignment, stats)
}

// ---------------------------------------------------------------------------
// Simulated annealing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cooling {
    /// T_k = t_initial · r^k with r = (t_final / t_initial)^(1 / n_steps).
    Geometric,
    /// T_k interpolates t_initial → t_final linearly over n_steps.
    Linear,
}

/// Cooling schedule. Temperatures must satisfy `t_initial ≥ t_final > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaSchedule {
    t_initial: f64,
    t_final: f64,
    n_steps: usize,
    cooling: Cooling,
}

impl SaSchedule {
    pub fn new(
        t_initial: f64,
        t_final: f64,
        n_steps: usize,
        cooling: Cooling,
    ) -> Result<Self, BaselineError> {
        if !(t_final > 0.0 && t_initial >= t_final) || !t_initial.is_finite() {
            return Err(BaselineError::BadTemperatureOrder { t_initial, t_final });
        }
        if n_steps == 0 {
            return Err(BaselineError::ZeroSteps);
        }
        Ok(Self {
            t_initial,
            t_final,
            n_steps,
            cooling,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Temperature at proposal `step` ∈ 0..n_steps.
    pub fn temperature(&self, step: usize) -> f64 {
        match self.cooling {
            Cooling::Geometric => {
                let ratio = (self.t_final / self.t_initial).powf(1.0 / self.n_steps as f64);
                self.t_initial * ratio.powi(step as i32)
            }
            Cooling::Linear => {
                let frac = step as f64 / self.n_steps as f64;
                self.t_initial + (self.t_final - self.t_initial) * frac
            }
        }
    }
}

/// Metropolis rule: downhill and level moves always pass; uphill moves pass
/// with probability exp(−ΔE/T).
pub fn metropolis_accept(delta_e: f64, temperature: f64, rng: &mut impl Rng) -> bool {
    if delta_e <= 0.0 {
        return true;
    }
    if temperature <= 0.0 {
        return false;
    }
    rng.gen::<f64>() < (-delta_e / temperature).exp()
}

#[derive(Clone, Debug)]
pub struct SaResult {
    /// Lowest-energy assignment seen anywhere in the run.
    pub best: BitString,
    pub best_energy: f64,
    /// State at the final step (often worse than `best`).
    pub final_state: BitString,
    pub n_accepted: u64,
    /// Current energy after each proposal.
    pub trace: Vec<f64>,
}

/// Single simulated-annealing run: uniform random bit-flip proposals filtered
/// by [`metropolis_accept`] along the cooling schedule, starting from a
/// uniformly random assignment. Deterministic per seed.
pub fn simulated_annealing(
    obj: &impl Objective,
    schedule: &SaSchedule,
    seed: u64,
) -> SaResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = obj.n_vars();
    let mut bits: BitString = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let mut energy = obj.energy(&bits);
    let mut best = bits.clone();
    let mut best_energy = energy;
    let mut n_accepted = 0;
    let mut trace = Vec::with_capacity(schedule.n_steps);

    for step in 0..schedule.n_steps {
        let flip = rng.gen_range(0..n);
        let delta = obj.flip_delta(&bits, flip);
        if metropolis_accept(delta, schedule.temperature(step), &mut rng) {
            bits[flip] ^= 1;
            energy += delta;
            n_accepted += 1;
            if energy < best_energy {
                best_energy = energy;
                best = bits.clone();
            }
        }
        trace.push(energy);
    }

    // Incremental updates accumulate rounding; report exact energies.
    best_energy = obj.energy(&best);
    SaResult {
        best,
        best_energy,
        final_state: bits,
        n_accepted,
        trace,
    }
}

/// Best result over `n_restarts` independent runs (restart seeds drawn from
/// the master seed). Ties keep the earliest restart.
pub fn simulated_annealing_restarts(
    obj: &impl Objective,
    schedule: &SaSchedule,
    seed: u64,
    n_restarts: usize,
) -> SaResult {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_restarts.max(1)).map(|_| seeder.gen()).collect();
    seeds
        .into_iter()
        .map(|s| simulated_annealing(obj, schedule, s))
        .min_by(|a, b| {
            a.best_energy
                .partial_cmp(&b.best_energy)
                .expect("energies are finite")
        })
        .expect("at least one restart")
}

// ---------------------------------------------------------------------------
// Greedy paint shop
// ---------------------------------------------------------------------------

/// Left-to-right greedy heuristic: at each first occurrence pick the color
/// matching the previous position; second occurrences are forced. Returns the
/// per-car coloring and its change count.
pub fn greedy_paintshop(seq: &PaintShopSequence) -> (BitString, usize) {
    let mut coloring = vec![0u8; seq.n_cars()];
    let mut seen = vec![false; seq.n_cars()];
    let mut prev_color = 0u8;
    for &car in seq.cars() {
        let color = if seen[car] {
            1 - coloring[car]
        } else {
            seen[car] = true;
            coloring[car] = prev_color;
            coloring[car]
        };
        prev_color = color;
    }
    let changes = seq.change_count(&coloring);
    (coloring, changes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{
        maxcut_qubo, maxsat_diagonal, qubo_to_ising, random_ksat, sherrington_kirkpatrick,
    };

    #[test]
    fn flip_deltas_match_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut q = QuboProblem::new(4);
        for i in 0..4 {
            q.add_linear(i, rng.gen_range(-2.0..2.0));
            for j in (i + 1)..4 {
                q.add_interaction(i, j, rng.gen_range(-2.0..2.0));
            }
        }
        let h = qubo_to_ising(&q);
        let d = q.to_diagonal().unwrap();
        for i in 0..16usize {
            let bits = index_to_bits(i, 4);
            for flip in 0..4 {
                let mut flipped = bits.clone();
                flipped[flip] ^= 1;
                for (name, delta, expect) in [
                    ("qubo", Objective::flip_delta(&q, &bits, flip), q.energy(&flipped) - q.energy(&bits)),
                    ("ising", Objective::flip_delta(&h, &bits, flip), h.energy_bits(&flipped) - h.energy_bits(&bits)),
                    ("diag", Objective::flip_delta(&d, &bits, flip), Objective::energy(&d, &flipped) - Objective::energy(&d, &bits)),
                ] {
                    assert!(
                        (delta - expect).abs() < 1e-10,
                        "{name} delta at {bits:?} flip {flip}: {delta} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn brute_force_ties_break_to_lowest_index() {
        // Triangle MaxCut: six assignments reach cut 2; index 1 is smallest.
        let q = maxcut_qubo(&[(0, 1), (1, 2), (0, 2)], 3).unwrap();
        let (bits, energy) = brute_force_minimum(&q).unwrap();
        assert_eq!(energy, -2.0);
        assert_eq!(bits_to_index(&bits), 1);
    }

    #[test]
    fn brute_force_rejects_oversized_problems() {
        let q = QuboProblem::new(25);
        assert!(matches!(
            brute_force_minimum(&q),
            Err(BaselineError::TooManyVariables(25))
        ));
    }

    #[test]
    fn dpll_handles_unit_only_formulas() {
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        let stats = dpll_count(&f);
        assert!(!stats.satisfiable);
        assert_eq!(stats.decisions, 0, "pure unit propagation, no branching");
        assert_eq!(stats.backtracks, 0);

        let f = CnfFormula::new(2, vec![vec![1], vec![-1, 2]]).unwrap();
        let stats = dpll_count(&f);
        assert!(stats.satisfiable);
        assert_eq!(stats.assignment, Some(vec![1, 1]));
    }

    #[test]
    fn dpll_counts_flips_on_forced_contradiction() {
        // All four clauses over two variables: UNSAT after one decision whose
        // first branch fails.
        let f = CnfFormula::new(2, vec![vec![1, 2], vec![-1, 2], vec![1, -2], vec![-1, -2]])
            .unwrap();
        let stats = dpll_count(&f);
        assert!(!stats.satisfiable);
        assert_eq!(stats.decisions, 1);
        assert_eq!(stats.backtracks, 1);
    }

    #[test]
    fn dpll_agrees_with_exhaustive_satisfiability() {
        for seed in 0..30 {
            let f = random_ksat(8, 34, 3, seed).unwrap();
            let stats = dpll_count(&f);
            let diag = maxsat_diagonal(&f).unwrap();
            let exhaustive_sat = diag.min() <= -(f.n_clauses() as f64) + 0.5;
            assert_eq!(stats.satisfiable, exhaustive_sat, "seed {seed}");
            assert!(stats.backtracks <= stats.decisions, "seed {seed}");
            if let Some(bits) = stats.assignment {
                assert!(f.is_satisfied(&bits), "seed {seed}: model check");
            }
        }
    }

    #[test]
    fn metropolis_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(metropolis_accept(-1.0, 1e-12, &mut rng));
        assert!(metropolis_accept(0.0, 1e-12, &mut rng));
        assert!(!metropolis_accept(1.0, 0.0, &mut rng));
        assert!(!metropolis_accept(80.0, 1.0, &mut rng), "e^{{-80}} never fires");
    }

    #[test]
    fn metropolis_rate_near_inverse_e() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let accepted = (0..n)
            .filter(|_| metropolis_accept(1.0, 1.0, &mut rng))
            .count();
        let rate = accepted as f64 / n as f64;
        assert!(
            (rate - (-1.0f64).exp()).abs() < 0.01,
            "acceptance rate {rate} vs 1/e"
        );
    }

    #[test]
    fn schedule_shapes() {
        let s = SaSchedule::new(4.0, 0.25, 4, Cooling::Geometric).unwrap();
        assert!((s.temperature(0) - 4.0).abs() < 1e-12);
        // r = (1/16)^(1/4) = 1/2.
        assert!((s.temperature(2) - 1.0).abs() < 1e-12);
        let lin = SaSchedule::new(2.0, 1.0, 2, Cooling::Linear).unwrap();
        assert!((lin.temperature(1) - 1.5).abs() < 1e-12);

        assert!(SaSchedule::new(0.5, 1.0, 10, Cooling::Geometric).is_err());
        assert!(SaSchedule::new(1.0, 0.0, 10, Cooling::Geometric).is_err());
        assert!(SaSchedule::new(1.0, 0.5, 0, Cooling::Geometric).is_err());
    }

    #[test]
    fn annealing_solves_small_maxcut() {
        let q = maxcut_qubo(&[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)], 5).unwrap();
        let (_, optimum) = brute_force_minimum(&q).unwrap();
        let schedule = SaSchedule::new(2.0, 0.01, 5_000, Cooling::Geometric).unwrap();
        let result = simulated_annealing(&q, &schedule, 123);
        assert_eq!(result.best_energy, optimum);
        assert_eq!(result.trace.len(), 5_000);
        assert!((q.energy(&result.best) - result.best_energy).abs() < 1e-12);
    }

    #[test]
    fn annealing_restarts_reach_spin_glass_optimum() {
        let h = sherrington_kirkpatrick(8, 5);
        let (_, optimum) = brute_force_minimum(&h).unwrap();
        let schedule = SaSchedule::new(3.0, 0.05, 2_000, Cooling::Geometric).unwrap();
        let result = simulated_annealing_restarts(&h, &schedule, 9, 5);
        assert!(
            (result.best_energy - optimum).abs() < 1e-9,
            "SA best {} vs optimum {optimum}",
            result.best_energy
        );
    }

    #[test]
    fn annealing_is_deterministic_per_seed() {
        let h = sherrington_kirkpatrick(6, 1);
        let schedule = SaSchedule::new(2.0, 0.1, 500, Cooling::Linear).unwrap();
        let a = simulated_annealing(&h, &schedule, 77);
        let b = simulated_annealing(&h, &schedule, 77);
        assert_eq!(a.best, b.best);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.n_accepted, b.n_accepted);
    }

    #[test]
    fn greedy_paintshop_known_sequences() {
        for (letters, expected) in [("ABAB", 1), ("AABB", 2), ("AA", 1), ("ABBA", 1)] {
            let s = PaintShopSequence::from_letters(letters).unwrap();
            let (coloring, changes) = greedy_paintshop(&s);
            assert_eq!(changes, s.change_count(&coloring), "{letters}: self-consistent");
            assert_eq!(changes, expected, "{letters}");
        }
    }

    #[test]
    fn greedy_never_beats_exhaustive() {
        use crate::problems::paintshop_qubo;
        for seed in 0..10 {
            let s = PaintShopSequence::random(5, seed);
            let (_, greedy) = greedy_paintshop(&s);
            let q = paintshop_qubo(&s);
            let (_, optimum) = brute_force_minimum(&q).unwrap();
            assert!(
                greedy as f64 >= optimum - 1e-9,
                "seed {seed}: greedy {greedy} below optimum {optimum}"
            );
        }
    }
}
