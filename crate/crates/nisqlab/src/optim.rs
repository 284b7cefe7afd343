//! Derivative-free minimization for variational parameter search.
//!
//! A single, deliberately boring Nelder–Mead simplex is enough for the ≤ 10
//! dimensional angle landscapes this crate produces. Two guarantees matter to
//! callers and are upheld here: the evaluation budget is never exceeded, and
//! the reported point is the best ever evaluated, so a run seeded at x₀ can
//! never end worse than f(x₀).

/// Result of a minimization run.
#[derive(Clone, Debug)]
pub struct OptimResult {
    /// Best point evaluated anywhere in the run (not necessarily the final
    /// simplex centroid).
    pub x: Vec<f64>,
    pub value: f64,
    pub n_evaluations: usize,
    /// True when the simplex value spread fell below the tolerance; false
    /// means the evaluation budget ran out first.
    pub converged: bool,
}

struct Tally<'a, F: FnMut(&[f64]) -> f64> {
    f: &'a mut F,
    used: usize,
    budget: usize,
    best_x: Vec<f64>,
    best_value: f64,
}

impl<'a, F: FnMut(&[f64]) -> f64> Tally<'a, F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let v = (self.f)(x);
        if v < self.best_value {
            self.best_value = v;
            self.best_x = x.to_vec();
        }
        Some(v)
    }
}

/// Nelder–Mead simplex minimization with standard coefficients (reflect 1,
/// expand 2, contract 1/2, shrink 1/2).
///
/// The initial simplex is `x0` plus one vertex per coordinate offset by
/// `initial_step`. Stops when the spread between the worst and best simplex
/// values drops to `ftol`, or when `max_evals` function evaluations have been
/// spent, whichever comes first.
pub fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    initial_step: f64,
    max_evals: usize,
    ftol: f64,
) -> OptimResult {
    assert!(!x0.is_empty(), "need at least one dimension");
    assert!(initial_step != 0.0, "zero step makes a degenerate simplex");
    let dim = x0.len();
    let mut tally = Tally {
        f,
        used: 0,
        budget: max_evals,
        best_x: x0.to_vec(),
        best_value: f64::INFINITY,
    };

    // Vertices and values, kept sorted best-first.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut converged = false;

    'run: {
        let Some(v0) = tally.eval(x0) else { break 'run };
        simplex.push((x0.to_vec(), v0));
        for i in 0..dim {
            let mut x = x0.to_vec();
            x[i] += initial_step;
            let Some(v) = tally.eval(&x) else { break 'run };
            simplex.push((x, v));
        }

        loop {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
            let spread = simplex[dim].1 - simplex[0].1;
            if spread <= ftol {
                converged = true;
                break;
            }

            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / dim as f64;
                }
            }
            let worst = simplex[dim].clone();
            let second_worst_value = simplex[dim - 1].1;
            let blend = |alpha: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + alpha * (c - w))
                    .collect()
            };

            let reflected = blend(1.0);
            let Some(v_reflected) = tally.eval(&reflected) else { break };

            if v_reflected < simplex[0].1 {
                // Try to go further in the same direction.
                let expanded = blend(2.0);
                let Some(v_expanded) = tally.eval(&expanded) else { break };
                simplex[dim] = if v_expanded < v_reflected {
                    (expanded, v_expanded)
                } else {
                    (reflected, v_reflected)
                };
                continue;
            }
            if v_reflected < second_worst_value {
                simplex[dim] = (reflected, v_reflected);
                continue;
            }

            // Contract toward the centroid, on whichever side looked better.
            let contracted = if v_reflected < worst.1 {
                blend(0.5)
            } else {
                blend(-0.5)
            };
            let Some(v_contracted) = tally.eval(&contracted) else { break };
            if v_contracted < worst.1.min(v_reflected) {
                simplex[dim] = (contracted, v_contracted);
                continue;
            }

            // Shrink everything toward the best vertex.
            let best = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = entry
                    .0
                    .iter()
                    .zip(&best)
                    .map(|(xi, bi)| bi + 0.5 * (xi - bi))
                    .collect();
                let Some(v) = tally.eval(&x) else { break 'run };
                *entry = (x, v);
            }
        }
    }

    OptimResult {
        x: tally.best_x,
        value: tally.best_value,
        n_evaluations: tally.used,
        converged,
    }
}
