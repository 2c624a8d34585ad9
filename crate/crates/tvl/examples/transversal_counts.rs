// Counts full transversals of small cyclic tables.

use tvl::constructions::{group_table, FiniteAbelianGroup};
use tvl::solvers::count_full_transversals;

pub fn run_example() -> tvl::Result<Vec<(usize, u64)>> {
    [1, 3, 5, 7, 9]
        .into_iter()
        .map(|n| {
            Ok((
                n,
                count_full_transversals(&group_table(&FiniteAbelianGroup::cyclic(n)))?,
            ))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for (n, c) in run_example()? {
        println!("Z{n}: {c} full transversals");
    }
    Ok(())
}
