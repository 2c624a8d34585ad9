// Edge switchers between two same-coloured edges, and a robustness check
// with a twentieth of the table forbidden at random.

use std::collections::BTreeSet;

use tvl::absorption::{build_edge_switcher, verify_switchable, EdgeSwitcher, SwitchableReport};
use tvl::constructions::cyclic_graph;

pub fn run_example() -> tvl::Result<(EdgeSwitcher, SwitchableReport)> {
    let g = cyclic_graph(31);
    let mut class = g.colour_class(4);
    let (e, f) = (class.next().expect("edge"), class.nth(3).expect("edge"));
    let s = build_edge_switcher(&g, e, f, &BTreeSet::new(), &BTreeSet::new(), 7)?;
    s.validate(&g)?;
    Ok((s, verify_switchable(&g, e, f, 0.05, 3, 50, 11)))
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let (s, r) = run_example()?;
    println!(
        "switcher of order {} on {} vertices",
        s.order,
        s.vertices.len()
    );
    println!(
        "with 5% forbidden: {} of {} trials found a switcher",
        r.passed, r.trials
    );
    Ok(())
}
