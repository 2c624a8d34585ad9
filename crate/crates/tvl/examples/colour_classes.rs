// Groups the colours of a random square by switcher weight and tests one
// pair for exchangeability under random forbidden sets.

use tvl::classes::{
    classify_colours, test_pair_exchangeable, ClassifierConfig, ColourClassFamily, ExchangeParams,
};
use tvl::constructions::random_latin_square;
use tvl::graph::latin_to_graph;
use tvl::switchers::weight_matrix;

pub fn run_example() -> tvl::Result<(ColourClassFamily, usize, usize)> {
    let g = latin_to_graph(&random_latin_square(12, 3, 50 * 144));
    let w = weight_matrix(&g);
    let cfg = ClassifierConfig::from_quantiles(&w);
    let family = classify_colours(&w, &cfg, &g);
    let r = test_pair_exchangeable(&g, 0, 1, ExchangeParams::new(0.02, 0.1, 0, 8)?, 20, 0)?;
    Ok((family, r.passed, r.trials.len()))
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let (family, passed, trials) = run_example()?;
    for (i, c) in family.classes.iter().enumerate() {
        println!("class {i}: {:?}", c.colours);
    }
    println!("pair (0, 1) exchanged in {passed} of {trials} trials");
    Ok(())
}
