//! Solves a binary paint-shop sequence three ways: exhaustively through its
//! QUBO encoding, with simulated annealing, and with the left-to-right greedy
//! rule.

use nisqlab::baselines::{brute_force_minimum, greedy_paintshop, simulated_annealing_restarts};
use nisqlab::baselines::{Cooling, SaSchedule};
use nisqlab::problems::{paintshop_qubo, PaintShopSequence};

fn show(label: &str, seq: &PaintShopSequence, coloring: &[u8], changes: f64) {
    let colors = seq.position_colors(coloring);
    let paint: String = colors
        .iter()
        .map(|&c| if c == 0 { 'r' } else { 'b' })
        .collect();
    println!("  {label:<9} {changes:>3} changes   paint order {paint}");
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seq = PaintShopSequence::from_letters("ABCABDCEDE")?;
    let letters: String = seq
        .cars()
        .iter()
        .map(|&car| (b'A' + car as u8) as char)
        .collect();
    println!("sequence {letters} ({} cars)\n", seq.n_cars());

    let qubo = paintshop_qubo(&seq);
    let (exact, exact_changes) = brute_force_minimum(&qubo)?;
    show("exact", &seq, &exact, exact_changes);

    let schedule = SaSchedule::new(2.0, 0.01, 5_000, Cooling::Geometric)?;
    let sa = simulated_annealing_restarts(&qubo, &schedule, 4, 5);
    show("annealed", &seq, &sa.best, sa.best_energy);

    let (greedy, greedy_changes) = greedy_paintshop(&seq);
    show("greedy", &seq, &greedy, greedy_changes as f64);

    println!("\nover random sequences the greedy rule is often optimal, never better:");
    for cars in [4, 6, 8] {
        let mut greedy_total = 0usize;
        let mut exact_total = 0.0;
        for seed in 0..20 {
            let seq = PaintShopSequence::random(cars, seed);
            greedy_total += greedy_paintshop(&seq).1;
            exact_total += brute_force_minimum(&paintshop_qubo(&seq))?.1;
        }
        println!(
            "  {cars} cars: greedy mean {:.2}, exact mean {:.2}",
            greedy_total as f64 / 20.0,
            exact_total / 20.0
        );
    }
    Ok(())
}
