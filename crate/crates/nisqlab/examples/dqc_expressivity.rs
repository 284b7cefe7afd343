//! Counts the distinct generator gaps (the model's frequency vocabulary) for
//! the default and tower feature maps. Default weights grow the count
//! linearly with qubit number; tower weights grow it quadratically.

use nisqlab::dqc::{generator_spectrum_expressivity, FeatureMap, FeatureMapKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("  n   default (w_j = 1/2)   tower (w_j = j/2)");
    for n in 2..=10 {
        let default = FeatureMap::new(n, FeatureMapKind::ChebyshevDefault);
        let tower = FeatureMap::new(n, FeatureMapKind::ChebyshevTower);
        println!(
            " {n:>2}   {:>19}   {:>17}",
            generator_spectrum_expressivity(&default)?,
            generator_spectrum_expressivity(&tower)?
        );
    }

    let custom = FeatureMap::with_weights(
        3,
        FeatureMapKind::FourierDefault,
        vec![0.5, 0.5, 2.0],
    )?;
    println!(
        "\ncustom weights (0.5, 0.5, 2.0): {} distinct gaps",
        generator_spectrum_expressivity(&custom)?
    );
    Ok(())
}
