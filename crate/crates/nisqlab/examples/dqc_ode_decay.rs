//! Trains a 4-qubit differentiable circuit to solve df/dx = −f, f(0) = 1 and
//! compares the learned function against e^{−x}.

use nisqlab::dqc::{evaluate_model, FeatureMapKind};
use nisqlab::harness::run_decay_experiment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let run = run_decay_experiment(4, FeatureMapKind::ChebyshevTower, 3, 200, 0)?;

    println!("loss and grid error during training:");
    for row in run.trace.iter().step_by(25) {
        println!(
            "  iter {:>4}: loss {:>10.3e}   max grid error {:>9.3e}",
            row.iter, row.loss, row.max_grid_error
        );
    }

    println!("\nlearned solution vs e^(−x):");
    println!("     x     f̂(x)       exact      error");
    for i in 0..10 {
        let x = 0.9 * i as f64 / 9.0;
        let f = evaluate_model(&run.model, x)?;
        let exact = (-x).exp();
        println!("  {x:.2}   {f:+.6}   {exact:+.6}   {:+.1e}", f - exact);
    }
    println!(
        "\nmax error over the 50-point grid: {:.3e} (200 iterations)",
        run.max_grid_error
    );
    Ok(())
}
