//! Sweeps the clause-to-variable ratio of random 3-SAT and prints the
//! satisfiable fraction next to the median DPLL backtrack count. The
//! satisfiability probability drops from 1 to 0 around ratio ~4.2 and the
//! search effort peaks in the same window.

use nisqlab::harness::sat_phase_experiment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 16;
    let instances = 60;
    let ratios: Vec<f64> = (2..=16).map(|k| k as f64 * 0.5).collect();

    println!("n = {n}, {instances} instances per ratio\n");
    println!("ratio   P(sat)   median backtracks");
    let rows = sat_phase_experiment(n, &ratios, instances, 7)?;
    for row in &rows {
        let bar = "#".repeat((row.median_backtracks.min(60.0)) as usize);
        println!(
            "{:>5.2}   {:>6.3}   {:>8.1}  {bar}",
            row.ratio, row.p_sat, row.median_backtracks
        );
    }

    let crossing = rows.windows(2).find(|w| w[0].p_sat >= 0.5 && w[1].p_sat < 0.5);
    if let Some(w) = crossing {
        println!(
            "\nP(sat) crosses 0.5 between ratio {} and {}",
            w[0].ratio, w[1].ratio
        );
    }
    Ok(())
}
