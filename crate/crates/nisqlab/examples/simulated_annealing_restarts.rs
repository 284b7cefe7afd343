//! Runs restarted simulated annealing on a random spin glass and checks the
//! result against exhaustive enumeration.

use nisqlab::baselines::{brute_force_minimum, simulated_annealing_restarts, Cooling, SaSchedule};
use nisqlab::problems::sherrington_kirkpatrick;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 10;
    let problem = sherrington_kirkpatrick(n, 2024);
    let (best_bits, best_energy) = brute_force_minimum(&problem)?;
    println!("exhaustive optimum over 2^{n} states: {best_energy:+.6}");
    println!("optimal assignment: {best_bits:?}\n");

    let schedule = SaSchedule::new(3.0, 0.01, 20_000, Cooling::Geometric)?;
    for restarts in [1, 5, 20] {
        let result = simulated_annealing_restarts(&problem, &schedule, 99, restarts);
        let gap = result.best_energy - best_energy;
        println!(
            "{restarts:>2} restart(s): energy {:+.6}  (gap {:+.2e}, {} acceptances)",
            result.best_energy, gap, result.n_accepted
        );
    }

    println!("\nenergy trace of a single run, every 4000 steps:");
    let single = simulated_annealing_restarts(&problem, &schedule, 99, 1);
    for (step, energy) in single.trace.iter().enumerate().step_by(4_000) {
        println!("  step {step:>6}: {energy:+.4}");
    }
    Ok(())
}
