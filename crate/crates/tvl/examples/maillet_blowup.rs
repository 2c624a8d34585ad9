// Blows up the table of Z2 by 3x3 blocks. The result has order 6 and,
// whatever the inner blocks, no full transversal.

use tvl::constructions::{group_sum_obstruction, maillet_blowup, FiniteAbelianGroup, MailletSpec};
use tvl::graph::latin_to_graph;
use tvl::solvers::{max_rainbow_matching_exact, DEFAULT_BUDGET};

#[derive(Debug, Clone)]
pub struct BlowupRun {
    pub seed: u64,
    pub order: usize,
    pub latin: bool,
    pub max: usize,
    pub optimal: bool,
}

pub fn run_example() -> tvl::Result<Vec<BlowupRun>> {
    let base = FiniteAbelianGroup::cyclic(2);
    assert_ne!(group_sum_obstruction(&base, 3), 0);
    (0..20)
        .map(|seed| {
            let sq = maillet_blowup(&MailletSpec::random(base.clone(), 3, seed))?;
            let r = max_rainbow_matching_exact(&latin_to_graph(&sq), DEFAULT_BUDGET);
            Ok(BlowupRun {
                seed,
                order: sq.order(),
                latin: sq.is_latin_square(),
                max: r.size,
                optimal: r.optimal,
            })
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for r in run_example()? {
        println!(
            "seed {:>2}: order {} latin {} max transversal {}",
            r.seed, r.order, r.latin, r.max
        );
    }
    Ok(())
}
