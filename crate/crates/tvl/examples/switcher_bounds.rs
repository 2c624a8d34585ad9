// Enumerates every order-4 colour switcher of random Latin squares and
// checks the five overlap bounds exactly.

use tvl::constructions::random_latin_square;
use tvl::graph::latin_to_graph;
use tvl::switchers::{check_count_bounds, BoundReport};

pub fn run_example() -> tvl::Result<Vec<(usize, u64, BoundReport)>> {
    Ok((0..200u64)
        .map(|seed| {
            let n = 3 + (seed as usize % 8);
            let sq = random_latin_square(n, seed, 50 * n * n);
            (n, seed, check_count_bounds(&latin_to_graph(&sq)))
        })
        .collect())
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let runs = run_example()?;
    let bad = runs.iter().filter(|(_, _, r)| !r.holds).count();
    let worst = runs
        .iter()
        .flat_map(|(_, _, r)| r.lines.iter())
        .map(|l| l.ratio)
        .fold(0.0, f64::max);
    println!(
        "{} squares, {} with a violated bound, worst count/bound ratio {worst:.3}",
        runs.len(),
        bad
    );
    if let Some((n, seed, r)) = runs.last() {
        println!("order {n} seed {seed}: {} switchers", r.switchers);
        for l in &r.lines {
            println!(
                "  {:<4} max {:>5} bound {:>7}",
                l.label, l.max_count, l.bound
            );
        }
    }
    Ok(())
}
