use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::edge_switcher::{build_edge_switcher_with, EdgeSwitcher};
use super::template::RobustTemplate;
use super::{assemble_disjoint, edge_vertices, footprint_of, Footprint};
use crate::error::{Error, Result};
use crate::graph::{
    find_exactly_rainbow, is_exactly_rainbow_on, ColouredBipartiteGraph, Edge, Vertex,
};

/// Where the per-target edge switchers attach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Layout {
    /// A separate anchor edge `wx`; every target gets a switcher to it.
    /// `|V| = 6t + 2`, `|C| = 3t + 2` with direct switchers.
    Anchored,
    /// The first target's closing edge is the anchor. `|V| = 6t - 4`,
    /// `|C| = 3t - 1` with direct switchers.
    Pivot,
}

/// `(V, C)` with an exactly-`C`-rainbow perfect matching of `G[V + V(e)]`
/// for every target `e`. Order is `|C|`, with `|V| = 2|C| - 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Absorber {
    pub vertices: BTreeSet<Vertex>,
    pub colours: BTreeSet<usize>,
    pub targets: Vec<Edge>,
    pub order: usize,
    pub layout: Layout,
    // per target: u w (colour d) and x v (colour d')
    #[serde(skip)]
    legs: Vec<[Edge; 2]>,
    // per target: switcher from its closing edge x w to the anchor
    #[serde(skip)]
    switchers: Vec<Option<EdgeSwitcher>>,
}

impl Absorber {
    /// The matching on `V + V(targets[j])` assembled from the gadget parts.
    pub fn absorb(&self, j: usize) -> Result<Vec<Edge>> {
        if j >= self.targets.len() {
            return Err(Error::invalid(format!("target {j} out of range")));
        }
        let mut out: Vec<Edge> = self.legs[j].to_vec();
        for (i, s) in self.switchers.iter().enumerate() {
            let Some(s) = s else { continue };
            // the switcher for j covers the anchor; the others cover their own edge
            out.extend_from_slice(s.matching(i != j));
        }
        out.sort();
        Ok(out)
    }

    /// Re-checks every target by exhaustive search, ignoring the gadget parts.
    pub fn validate(&self, g: &ColouredBipartiteGraph) -> Result<()> {
        if self.vertices.len() + 2 != 2 * self.colours.len() || self.order != self.colours.len() {
            return Err(Error::invalid("absorber sizes do not balance"));
        }
        let failures: Vec<usize> = self
            .targets
            .par_iter()
            .enumerate()
            .filter_map(|(j, e)| {
                let mut vs = self.vertices.clone();
                let ends = edge_vertices(e);
                if ends.iter().any(|v| vs.contains(v)) {
                    return Some(j);
                }
                vs.extend(ends);
                find_exactly_rainbow(g, &vs, &self.colours, &[])
                    .is_none()
                    .then_some(j)
            })
            .collect();
        match failures.first() {
            None => Ok(()),
            Some(j) => Err(Error::invalid(format!("target {j} cannot be absorbed"))),
        }
    }

    /// Checks the assembled matchings of every target.
    pub fn check_witnesses(&self, g: &ColouredBipartiteGraph) -> bool {
        (0..self.targets.len()).all(|j| {
            let mut vs = self.vertices.clone();
            vs.extend(edge_vertices(&self.targets[j]));
            self.absorb(j)
                .is_ok_and(|m| is_exactly_rainbow_on(g, &m, &vs, &self.colours))
        })
    }
}

impl Footprint for Absorber {
    fn used_vertices(&self) -> BTreeSet<Vertex> {
        self.vertices.clone()
    }
    fn used_colours(&self) -> BTreeSet<usize> {
        self.colours.clone()
    }
}

/// Anchored absorber with switchers of order at most 7.
pub fn build_absorber(
    g: &ColouredBipartiteGraph,
    targets: &[Edge],
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
) -> Result<Absorber> {
    build_absorber_with(g, targets, forbidden_v, forbidden_c, Layout::Anchored, 7)
}

/// Builds an absorber for `targets` (pairwise disjoint, one colour `c0`).
///
/// For each pair `d, d'` the targets `u_i v_i` are closed into 4-cycles
/// `u_i w_i x_i v_i` with `u_i w_i` of colour `d` and `x_i v_i` of colour
/// `d'`; the pair is kept when all closing edges `x_i w_i` share a colour.
/// The closing edges are then linked to an anchor by edge switchers.
pub fn build_absorber_with(
    g: &ColouredBipartiteGraph,
    targets: &[Edge],
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
    layout: Layout,
    max_switcher_order: usize,
) -> Result<Absorber> {
    let Some(first) = targets.first() else {
        return Err(Error::invalid("absorber needs at least one target"));
    };
    let c0 = first.colour;
    if targets.iter().any(|e| e.colour != c0 || !g.has_edge(e)) {
        return Err(Error::invalid("targets must be host edges of one colour"));
    }
    let ends = footprint_of(targets);
    if ends.len() != 2 * targets.len() {
        return Err(Error::invalid("targets are not pairwise disjoint"));
    }
    let t = targets.len();
    let bad_v = |v: &Vertex| forbidden_v.contains(v) || ends.contains(v);
    let colours: Vec<usize> = g
        .colours()
        .into_iter()
        .filter(|&x| x != c0 && !forbidden_c.contains(&x))
        .collect();
    let mut last = "absorber cycles";

    for &d in &colours {
        let Some(ws) = targets
            .iter()
            .map(|e| g.partner_of_a(e.a, d).filter(|&w| !bad_v(&Vertex::B(w))))
            .collect::<Option<Vec<usize>>>()
        else {
            continue;
        };
        for &d2 in &colours {
            if d2 == d {
                continue;
            }
            let Some(xs) = targets
                .iter()
                .map(|e| g.partner_of_b(e.b, d2).filter(|&x| !bad_v(&Vertex::A(x))))
                .collect::<Option<Vec<usize>>>()
            else {
                continue;
            };
            let closing: Option<Vec<Edge>> = (0..t)
                .map(|i| g.colour(xs[i], ws[i]).map(|c| Edge::new(xs[i], ws[i], c)))
                .collect();
            let Some(closing) = closing else { continue };
            let shared = closing[0].colour;
            if closing.iter().any(|e| e.colour != shared) {
                continue;
            }
            let legs: Vec<[Edge; 2]> = (0..t)
                .map(|i| {
                    [
                        Edge::new(targets[i].a, ws[i], d),
                        Edge::new(xs[i], targets[i].b, d2),
                    ]
                })
                .collect();
            let mut core: BTreeSet<Vertex> = footprint_of(&closing);
            let mut reserved_v = forbidden_v.clone();
            reserved_v.extend(&ends);
            reserved_v.extend(&core);
            let mut reserved_c = forbidden_c.clone();
            reserved_c.extend([c0, d, d2]);

            let anchor = match (layout, t) {
                (_, 1) | (Layout::Pivot, _) => closing[0],
                (Layout::Anchored, _) => {
                    let found = g
                        .colour_class(shared)
                        .find(|e| edge_vertices(e).iter().all(|v| !reserved_v.contains(v)));
                    match found {
                        Some(e) => e,
                        None => {
                            last = "absorber anchor";
                            continue;
                        }
                    }
                }
            };
            reserved_v.extend(edge_vertices(&anchor));
            core.extend(edge_vertices(&anchor));
            let linked: Vec<usize> = (0..t).filter(|&i| closing[i] != anchor).collect();
            let built = assemble_disjoint(linked.len(), reserved_v, reserved_c, |k, fv, fc| {
                let mut idx = None;
                build_edge_switcher_with(
                    g,
                    &mut idx,
                    closing[linked[k]],
                    anchor,
                    fv,
                    fc,
                    max_switcher_order,
                )
            });
            let Ok((built, _, _)) = built else {
                last = "absorber switchers";
                continue;
            };
            let mut switchers: Vec<Option<EdgeSwitcher>> = vec![None; t];
            let mut vertices = core;
            let mut cs: BTreeSet<usize> = [d, d2].into();
            for (k, s) in linked.iter().zip(built) {
                vertices.extend(&s.vertices);
                cs.extend(&s.colours);
                switchers[*k] = Some(s);
            }
            return Ok(Absorber {
                order: cs.len(),
                vertices,
                colours: cs,
                targets: targets.to_vec(),
                layout,
                legs,
                switchers,
            });
        }
    }
    Err(Error::exhausted(
        last,
        format!("no absorber for {t} targets of colour {c0}"),
    ))
}

/// What a slot of the template's `Z` side stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    /// `targets[i]`.
    Target(usize),
    /// `fixed[i]`, always offered to the template.
    Fixed(usize),
    /// Never offered; only there to keep the template's shape.
    Idle,
}

/// Absorbers for the vertices of a robust template, wired so that any
/// `m0` of the targets can be absorbed together.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributiveAbsorber {
    pub vertices: BTreeSet<Vertex>,
    pub colours: BTreeSet<usize>,
    pub targets: Vec<Edge>,
    pub m0: usize,
    /// Padding edges for the template's `Y` side.
    pub padding: Vec<Edge>,
    pub fixed: Vec<Edge>,
    pub slots: Vec<Slot>,
    pub template: RobustTemplate,
    pub absorbers: Vec<Absorber>,
    // right-hand template index of each absorber target
    #[serde(skip)]
    wiring: Vec<Vec<usize>>,
}

impl DistributiveAbsorber {
    fn edge_at(&self, r: usize) -> Option<Edge> {
        let ys = self.template.y_size();
        if r < ys {
            return Some(self.padding[r]);
        }
        match self.slots[r - ys] {
            Slot::Target(i) => Some(self.targets[i]),
            Slot::Fixed(i) => Some(self.fixed[i]),
            Slot::Idle => None,
        }
    }

    /// Exactly-`C_abs`-rainbow perfect matching of `V_abs + V(E')` where
    /// `E'` is `targets[chosen]`, `|chosen| = m0`. The result is checked
    /// against the host before it is returned.
    pub fn absorb(&self, g: &ColouredBipartiteGraph, chosen: &[usize]) -> Result<Vec<Edge>> {
        let set: BTreeSet<usize> = chosen.iter().copied().collect();
        if set.len() != self.m0 || set.iter().any(|&i| i >= self.targets.len()) {
            return Err(Error::invalid(format!(
                "choose {} distinct targets",
                self.m0
            )));
        }
        let z0: Vec<usize> = self
            .slots
            .iter()
            .enumerate()
            .filter(|(_, s)| match s {
                Slot::Target(i) => set.contains(i),
                Slot::Fixed(_) => true,
                Slot::Idle => false,
            })
            .map(|(z, _)| z)
            .collect();
        let phi = self
            .template
            .matching(&z0)
            .ok_or_else(|| Error::invalid("template has no matching for this choice"))?;
        let mut out = Vec::new();
        for (x, &r) in phi.iter().enumerate() {
            let j = self.wiring[x]
                .iter()
                .position(|&y| y == r)
                .ok_or_else(|| Error::invalid("template matched an unwired slot"))?;
            out.extend(self.absorbers[x].absorb(j)?);
        }
        out.sort();
        let mut vs = self.vertices.clone();
        for &i in &set {
            vs.extend(edge_vertices(&self.targets[i]));
        }
        if !is_exactly_rainbow_on(g, &out, &vs, &self.colours) {
            return Err(Error::invalid("assembled matching is not exactly rainbow"));
        }
        Ok(out)
    }

    /// `|V_abs| - (2|C_abs| - 2 m0)`; zero when the ledgers balance.
    pub fn ledger_gap(&self) -> isize {
        self.vertices.len() as isize - (2 * self.colours.len() as isize - 2 * self.m0 as isize)
    }

    /// Every absorber by exhaustive search, then every choice of `E'`.
    pub fn validate(&self, g: &ColouredBipartiteGraph) -> Result<usize> {
        for a in &self.absorbers {
            a.validate(g)?;
        }
        let mut count = 0;
        for chosen in choose(self.targets.len(), self.m0) {
            self.absorb(g, &chosen)?;
            count += 1;
        }
        Ok(count)
    }
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = choose(n - 1, k);
    for mut s in choose(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out.sort();
    out
}

/// Assembles absorbers along `template` (with `h = 3 |targets|`) so that
/// any `m0` targets can be absorbed. `Y` and the fixed part of `Z` are
/// filled with fresh colour-`c0` padding edges; the `m0` busiest `Z`
/// slots stay idle. Per-vertex absorbers use the pivot layout.
pub fn distributive_absorber(
    g: &ColouredBipartiteGraph,
    targets: &[Edge],
    m0: usize,
    template: &RobustTemplate,
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
) -> Result<DistributiveAbsorber> {
    let m1 = targets.len();
    if m1 == 0 || template.h != 3 * m1 {
        return Err(Error::invalid(format!(
            "template h = {} needs {} targets",
            template.h,
            template.h / 3
        )));
    }
    if m0 > m1 {
        return Err(Error::invalid("m0 exceeds the number of targets"));
    }
    if template.deficiency().0 != 0 {
        return Err(Error::invalid("template fails its matching property"));
    }
    let c0 = targets[0].colour;
    if targets.iter().any(|e| e.colour != c0 || !g.has_edge(e)) {
        return Err(Error::invalid("targets must be host edges of one colour"));
    }
    let ends = footprint_of(targets);
    if ends.len() != 2 * m1 {
        return Err(Error::invalid("targets are not pairwise disjoint"));
    }

    let ys = template.y_size();
    let need = ys + (m1 - m0);
    let pads: Vec<Edge> = g
        .colour_class(c0)
        .filter(|e| {
            edge_vertices(e)
                .iter()
                .all(|v| !ends.contains(v) && !forbidden_v.contains(v))
        })
        .take(need)
        .collect();
    if pads.len() < need {
        return Err(Error::exhausted(
            "padding",
            format!("{} of {need} free colour-{c0} edges", pads.len()),
        ));
    }
    let (padding, fixed) = (pads[..ys].to_vec(), pads[ys..].to_vec());

    // idle slots go where the template is busiest
    let mut by_load: Vec<usize> = (0..template.z_size()).collect();
    by_load.sort_by_key(|&z| (std::cmp::Reverse(template.right_degree(template.z(z))), z));
    let mut slots = vec![Slot::Idle; template.z_size()];
    for (k, &z) in by_load[m0..].iter().enumerate() {
        slots[z] = if k < m1 {
            Slot::Target(k)
        } else {
            Slot::Fixed(k - m1)
        };
    }
    let mut d = DistributiveAbsorber {
        vertices: BTreeSet::new(),
        colours: BTreeSet::new(),
        targets: targets.to_vec(),
        m0,
        padding,
        fixed,
        slots,
        template: template.clone(),
        absorbers: Vec::new(),
        wiring: Vec::new(),
    };
    d.wiring = template
        .adj
        .iter()
        .map(|ns| {
            ns.iter()
                .copied()
                .filter(|&r| d.edge_at(r).is_some())
                .collect()
        })
        .collect();
    let wired: Vec<Vec<Edge>> = d
        .wiring
        .iter()
        .map(|rs| rs.iter().map(|&r| d.edge_at(r).expect("wired")).collect())
        .collect();
    if let Some(x) = wired.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!(
            "template vertex {x} has no live slot"
        )));
    }

    let mut reserved_v = forbidden_v.clone();
    reserved_v.extend(&ends);
    reserved_v.extend(footprint_of(&pads));
    let mut reserved_c = forbidden_c.clone();
    reserved_c.insert(c0);
    let (absorbers, _, _) = assemble_disjoint(template.h, reserved_v, reserved_c, |x, fv, fc| {
        build_absorber_with(g, &wired[x], fv, fc, Layout::Pivot, 7)
    })?;

    let mut vertices = footprint_of(&pads);
    let mut colours = BTreeSet::new();
    for a in &absorbers {
        vertices.extend(&a.vertices);
        colours.extend(&a.colours);
    }
    d.vertices = vertices;
    d.colours = colours;
    d.absorbers = absorbers;
    if d.ledger_gap() != 0 {
        return Err(Error::invalid(format!(
            "vertex ledger off by {}",
            d.ledger_gap()
        )));
    }
    Ok(d)
}

/// Per-target vertex and colour cost of an absorber layout with direct
/// switchers, `(|V|, |C|)`.
pub fn absorber_cost(layout: Layout, t: usize) -> (usize, usize) {
    match (layout, t) {
        (_, 0) => (0, 0),
        (_, 1) => (2, 2),
        (Layout::Anchored, t) => (6 * t + 2, 3 * t + 2),
        (Layout::Pivot, t) => (6 * t - 4, 3 * t - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorption::template::build_template;
    use crate::constructions::cyclic_graph;

    fn disjoint_class(g: &ColouredBipartiteGraph, c: usize, t: usize) -> Vec<Edge> {
        g.colour_class(c).take(t).collect()
    }

    #[test]
    fn single_target_is_a_square() {
        let g = cyclic_graph(7);
        let targets = disjoint_class(&g, 0, 1);
        let a = build_absorber(&g, &targets, &BTreeSet::new(), &BTreeSet::new()).unwrap();
        assert_eq!((a.vertices.len(), a.order), (2, 2));
        assert!(a.check_witnesses(&g));
        a.validate(&g).unwrap();
    }

    #[test]
    fn z31_five_targets_both_layouts() {
        let g = cyclic_graph(31);
        let targets = disjoint_class(&g, 0, 5);
        for layout in [Layout::Anchored, Layout::Pivot] {
            let a =
                build_absorber_with(&g, &targets, &BTreeSet::new(), &BTreeSet::new(), layout, 7)
                    .unwrap();
            assert_eq!((a.vertices.len(), a.order), absorber_cost(layout, 5));
            assert!(a.check_witnesses(&g));
            a.validate(&g).unwrap();
        }
    }

    #[test]
    fn forbidding_every_colour_exhausts() {
        let g = cyclic_graph(31);
        let targets = disjoint_class(&g, 0, 5);
        let fc: BTreeSet<usize> = (1..31).collect();
        let e = build_absorber(&g, &targets, &BTreeSet::new(), &fc).unwrap_err();
        assert!(e.is_exhaustion());
        assert!(e.to_string().contains("absorber cycles"));
    }

    #[test]
    fn distributive_single_target() {
        let g = cyclic_graph(23);
        let t = build_template(3, 2, 40).unwrap();
        let targets = disjoint_class(&g, 0, 1);
        let d =
            distributive_absorber(&g, &targets, 1, &t, &BTreeSet::new(), &BTreeSet::new()).unwrap();
        assert_eq!(d.ledger_gap(), 0);
        assert_eq!(d.validate(&g).unwrap(), 1);
    }

    #[test]
    fn distributive_self_completes_without_targets() {
        let g = cyclic_graph(31);
        let t = build_template(3, 2, 40).unwrap();
        let targets = disjoint_class(&g, 0, 1);
        let d =
            distributive_absorber(&g, &targets, 0, &t, &BTreeSet::new(), &BTreeSet::new()).unwrap();
        let m = d.absorb(&g, &[]).unwrap();
        assert_eq!(d.ledger_gap(), 0);
        assert!(is_exactly_rainbow_on(&g, &m, &d.vertices, &d.colours));
    }

    #[test]
    fn choose_counts() {
        assert_eq!(choose(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(choose(4, 0).len(), 1);
        assert_eq!(choose(6, 3).len(), 20);
    }
}
