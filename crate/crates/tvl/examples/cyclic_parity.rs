// Maximum transversals of cyclic group tables. Even orders stop one
// short of full, odd orders do not.

use tvl::constructions::cyclic_graph;
use tvl::solvers::{max_rainbow_matching_exact, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicRow {
    pub n: usize,
    pub max: usize,
    pub optimal: bool,
    pub nodes: u64,
}

pub fn run_example() -> tvl::Result<Vec<CyclicRow>> {
    Ok((2..=11)
        .map(|n| {
            let g = cyclic_graph(n);
            let r = max_rainbow_matching_exact(&g, DEFAULT_BUDGET);
            r.witness
                .check_in(&g)
                .expect("witness is a rainbow matching");
            CyclicRow {
                n,
                max: r.size,
                optimal: r.optimal,
                nodes: r.nodes,
            }
        })
        .collect())
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for r in run_example()? {
        println!(
            "Z{:<2} max {:>2} optimal {} ({} nodes)",
            r.n, r.max, r.optimal, r.nodes
        );
    }
    Ok(())
}
