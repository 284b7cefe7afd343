//! Measures how the QAOA approximation ratio grows with circuit depth on
//! random spin-glass instances.

use nisqlab::problems::{ising_to_diagonal, sherrington_kirkpatrick};
use nisqlab::qaoa::{optimize_qaoa, QaoaStrategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let instances = 5;
    let depths = [1, 2, 3];
    let budget = 3_000;

    println!("mean approximation ratio over {instances} spin glasses at n = {n}\n");
    println!("  p   mean ratio   per instance");
    for p in depths {
        let mut ratios = Vec::new();
        for k in 0..instances {
            let diag = ising_to_diagonal(&sherrington_kirkpatrick(n, 300 + k))?;
            let outcome = optimize_qaoa(
                &diag,
                p,
                QaoaStrategy::MultistartLocal { n_starts: 8 },
                budget,
                k,
            )?;
            ratios.push(outcome.approximation_ratio);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let detail: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
        println!("  {p}   {mean:>9.4}    {}", detail.join("  "));
    }
    Ok(())
}
