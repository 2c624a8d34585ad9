// Distributive absorption on the Z67 table: three targets, any two of
// which may be left over, wired through an h = 9 template.

use std::collections::BTreeSet;

use tvl::absorption::{build_template, distributive_absorber, DistributiveAbsorber};
use tvl::constructions::cyclic_graph;

pub struct DistributiveRun {
    pub absorber: DistributiveAbsorber,
    /// Number of target subsets of size m0 that absorbed.
    pub choices: usize,
}

pub fn run_example() -> tvl::Result<DistributiveRun> {
    let g = cyclic_graph(67);
    let targets: Vec<_> = g.colour_class(0).take(3).collect();
    let t = build_template(9, 0, 400)?;
    let d = distributive_absorber(&g, &targets, 2, &t, &BTreeSet::new(), &BTreeSet::new())?;
    let choices = d.validate(&g)?;
    Ok(DistributiveRun {
        absorber: d,
        choices,
    })
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let r = run_example()?;
    let d = &r.absorber;
    println!(
        "{} vertices, {} colours, {} small absorbers, ledger gap {}, {} target subsets absorbed",
        d.vertices.len(),
        d.colours.len(),
        d.absorbers.len(),
        d.ledger_gap(),
        r.choices
    );
    Ok(())
}
