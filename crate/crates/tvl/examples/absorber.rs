// An absorber for five colour-0 edges of the Z31 table. Each target's
// vertex set can be added and the whole is still covered exactly rainbow.

use std::collections::BTreeSet;

use tvl::absorption::{absorber_cost, build_absorber, Absorber, Layout};
use tvl::constructions::cyclic_graph;
use tvl::graph::{is_exactly_rainbow_on, Vertex};

pub struct AbsorberRun {
    pub absorber: Absorber,
    pub cost: (usize, usize),
    /// Per target: the returned matching covers V plus that target's ends.
    pub checks: Vec<bool>,
    pub validated: bool,
}

pub fn run_example() -> tvl::Result<AbsorberRun> {
    let g = cyclic_graph(31);
    let targets: Vec<_> = g.colour_class(0).take(5).collect();
    let a = build_absorber(&g, &targets, &BTreeSet::new(), &BTreeSet::new())?;
    let checks = (0..targets.len())
        .map(|j| {
            let Ok(m) = a.absorb(j) else { return false };
            let t = targets[j];
            let mut vs = a.vertices.clone();
            vs.insert(Vertex::A(t.a));
            vs.insert(Vertex::B(t.b));
            is_exactly_rainbow_on(&g, &m, &vs, &a.colours)
        })
        .collect();
    let validated = a.validate(&g).is_ok();
    Ok(AbsorberRun {
        cost: absorber_cost(Layout::Anchored, targets.len()),
        absorber: a,
        checks,
        validated,
    })
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    let r = run_example()?;
    println!(
        "{} vertices, {} colours (expected {:?}); absorb checks {:?}; exhaustive validation {}",
        r.absorber.vertices.len(),
        r.absorber.colours.len(),
        r.cost,
        r.checks,
        r.validated
    );
    Ok(())
}
