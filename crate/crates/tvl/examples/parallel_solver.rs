// The parallel exact solver agrees with the sequential one on size.

use tvl::constructions::{cyclic_graph, random_latin_square};
use tvl::graph::{latin_to_graph, ColouredBipartiteGraph};
use tvl::solvers::{max_rainbow_matching_exact, max_rainbow_matching_parallel, DEFAULT_BUDGET};

pub fn instances() -> Vec<(String, ColouredBipartiteGraph)> {
    let mut out: Vec<_> = (2..=10)
        .map(|n| (format!("Z{n}"), cyclic_graph(n)))
        .collect();
    for seed in 0..6 {
        let n = 5 + seed as usize;
        let sq = random_latin_square(n, seed, 50 * n * n);
        out.push((format!("random {n}/{seed}"), latin_to_graph(&sq)));
    }
    out
}

/// `(name, sequential size, parallel size, both optimal)`.
pub fn run_example() -> tvl::Result<Vec<(String, usize, usize, bool)>> {
    instances()
        .into_iter()
        .map(|(name, g)| {
            let s = max_rainbow_matching_exact(&g, DEFAULT_BUDGET);
            let p = max_rainbow_matching_parallel(&g, DEFAULT_BUDGET, 4);
            p.witness.check_in(&g)?;
            Ok((name, s.size, p.size, s.optimal && p.optimal))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for (name, s, p, opt) in run_example()? {
        println!("{name:<14} sequential {s:>2} parallel {p:>2} optimal {opt}");
    }
    Ok(())
}
