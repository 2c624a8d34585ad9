// Heuristic rainbow matchings on a random order-101 square: a greedy
// nibble, then local switching to grow it.

use tvl::constructions::random_latin_square;
use tvl::graph::latin_to_graph;
use tvl::solvers::{greedy_nibble_matching, local_switch_augment};

pub fn run_example() -> tvl::Result<(usize, usize)> {
    let g = latin_to_graph(&random_latin_square(101, 0, 50 * 101 * 101));
    let m = greedy_nibble_matching(&g, 0.1, 0);
    m.check_in(&g)?;
    let better = local_switch_augment(&g, &m, 10_000, 0)?;
    better.check_in(&g)?;
    Ok((m.len(), better.len()))
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let (nibble, augmented) = run_example()?;
    println!("nibble {nibble}, after switching {augmented}, order 101");
    Ok(())
}
