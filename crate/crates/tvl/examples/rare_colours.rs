// Rare colours: every colour class has at most N/100 edges and every
// vertex degree at least d, so a rainbow matching of ceil(1.8 d) exists.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tvl::graph::{ColouredBipartiteGraph, Edge, RainbowMatching};
use tvl::solvers::rare_colour_matching;

/// `d` edge-disjoint shifted permutations on `n + n` vertices, cut into
/// colour classes of `n / 100` edges.
pub fn rare_instance(n: usize, d: usize, seed: u64) -> ColouredBipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut tau: Vec<usize> = (0..n).collect();
    sigma.shuffle(&mut rng);
    tau.shuffle(&mut rng);
    let cap = n / 100;
    let mut edges = Vec::new();
    for k in 0..d {
        let mut layer: Vec<(usize, usize)> = (0..n).map(|a| (a, sigma[(tau[a] + k) % n])).collect();
        layer.shuffle(&mut rng);
        for (i, (a, b)) in layer.into_iter().enumerate() {
            edges.push(Edge::new(a, b, k * n.div_ceil(cap) + i / cap));
        }
    }
    ColouredBipartiteGraph::new(n, n, edges).expect("layers are matchings")
}

pub fn run_example() -> tvl::Result<Vec<(u64, RainbowMatching)>> {
    (0..50)
        .map(|seed| {
            let g = rare_instance(500, 5, seed);
            let m = rare_colour_matching(&g, 5)?;
            m.check_in(&g)?;
            Ok((seed, m))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let runs = run_example()?;
    let min = runs.iter().map(|(_, m)| m.len()).min().unwrap_or(0);
    println!(
        "{} instances, smallest rainbow matching {min} (need 9)",
        runs.len()
    );
    Ok(())
}
