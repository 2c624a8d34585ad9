//! Absorption gadgets: edge switchers, absorbers, the robustly matchable
//! template, distributive absorption and a single addition step.
//!
//! Every gadget records the matchings its construction produced, and every
//! gadget has a `validate` that ignores them and searches from scratch.

mod absorber;
mod addition;
mod edge_switcher;
mod template;

pub use absorber::{
    absorber_cost, build_absorber, build_absorber_with, distributive_absorber, Absorber,
    DistributiveAbsorber, Layout, Slot,
};
pub use addition::{addition_step, AdditionState, AdditionStep};
pub use edge_switcher::{
    build_edge_switcher, build_edge_switcher_with, verify_switchable, EdgeSwitcher,
    SwitchableReport, SwitchableTrial,
};
pub use template::{build_template, RobustTemplate, TEMPLATE_MAX_DEGREE};

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{Edge, Vertex};

/// Fan-in of absorbers in the asymptotic argument. Desk-scale runs use a
/// handful of targets instead.
pub const ASYMPTOTIC_FAN_IN: usize = 100;

/// Default number of targets per absorber at desk scale.
pub const DEFAULT_FAN_IN: usize = 5;

pub(crate) fn edge_vertices(e: &Edge) -> [Vertex; 2] {
    [Vertex::A(e.a), Vertex::B(e.b)]
}

pub(crate) fn footprint_of(edges: &[Edge]) -> BTreeSet<Vertex> {
    edges.iter().flat_map(edge_vertices).collect()
}

/// Something that occupies vertices and colours of the host.
pub(crate) trait Footprint {
    fn used_vertices(&self) -> BTreeSet<Vertex>;
    fn used_colours(&self) -> BTreeSet<usize>;
}

/// Builds `count` gadgets that must be pairwise disjoint. Each round runs
/// every pending search in parallel against the current reservations, then
/// accepts results in index order, deferring any that clash with one
/// accepted earlier in the same round. Deterministic for a fixed `build`.
pub(crate) fn assemble_disjoint<T, F>(
    count: usize,
    mut used_v: BTreeSet<Vertex>,
    mut used_c: BTreeSet<usize>,
    build: F,
) -> Result<(Vec<T>, BTreeSet<Vertex>, BTreeSet<usize>)>
where
    T: Footprint + Send,
    F: Fn(usize, &BTreeSet<Vertex>, &BTreeSet<usize>) -> Result<T> + Sync,
{
    let mut done: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let mut pending: Vec<usize> = (0..count).collect();
    while !pending.is_empty() {
        let results: Vec<(usize, Result<T>)> = pending
            .par_iter()
            .map(|&i| (i, build(i, &used_v, &used_c)))
            .collect();
        let mut next = Vec::new();
        for (i, r) in results {
            let g = r?;
            let (vs, cs) = (g.used_vertices(), g.used_colours());
            if vs.iter().any(|v| used_v.contains(v)) || cs.iter().any(|c| used_c.contains(c)) {
                next.push(i);
                continue;
            }
            used_v.extend(vs);
            used_c.extend(cs);
            done[i] = Some(g);
        }
        pending = next;
    }
    Ok((
        done.into_iter().map(|g| g.expect("all built")).collect(),
        used_v,
        used_c,
    ))
}
