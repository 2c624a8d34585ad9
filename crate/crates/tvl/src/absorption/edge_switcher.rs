use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{edge_vertices, Footprint};
use crate::error::{Error, Result};
use crate::graph::{
    find_exactly_rainbow, is_exactly_rainbow_on, ColouredBipartiteGraph, Edge, Vertex,
};
use crate::switchers::{find_switcher, SwitcherIndex};

/// `(V, C)` such that both `G[V + V(e)]` and `G[V + V(f)]` have an
/// exactly-`C`-rainbow perfect matching. Order is `|C|`, with `|V| = 2|C| - 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSwitcher {
    pub vertices: BTreeSet<Vertex>,
    pub colours: BTreeSet<usize>,
    pub between: (Edge, Edge),
    pub order: usize,
    #[serde(skip)]
    pub(crate) for_e: Vec<Edge>,
    #[serde(skip)]
    pub(crate) for_f: Vec<Edge>,
}

impl EdgeSwitcher {
    /// The matching built for `V + V(e)` (`first`) or `V + V(f)`.
    pub fn matching(&self, first: bool) -> &[Edge] {
        if first {
            &self.for_e
        } else {
            &self.for_f
        }
    }

    /// Re-checks the definition by exhaustive search, ignoring the stored
    /// matchings.
    pub fn validate(&self, g: &ColouredBipartiteGraph) -> Result<()> {
        let (e, f) = self.between;
        if self.vertices.len() + 2 != 2 * self.colours.len() || self.order != self.colours.len() {
            return Err(Error::invalid("edge switcher sizes do not balance"));
        }
        for x in [e, f] {
            if !g.has_edge(&x) {
                return Err(Error::invalid(format!("{x:?} is not a host edge")));
            }
            if edge_vertices(&x).iter().any(|v| self.vertices.contains(v)) {
                return Err(Error::invalid("switcher meets its own edges"));
            }
            let mut vs = self.vertices.clone();
            vs.extend(edge_vertices(&x));
            if find_exactly_rainbow(g, &vs, &self.colours, &[]).is_none() {
                return Err(Error::invalid(format!(
                    "no exactly-rainbow matching through {x:?}"
                )));
            }
        }
        Ok(())
    }

    /// Cheap check of the stored matchings only.
    pub fn check_witnesses(&self, g: &ColouredBipartiteGraph) -> bool {
        [(self.between.0, &self.for_e), (self.between.1, &self.for_f)]
            .iter()
            .all(|(x, m)| {
                let mut vs = self.vertices.clone();
                vs.extend(edge_vertices(x));
                is_exactly_rainbow_on(g, m, &vs, &self.colours)
            })
    }
}

impl Footprint for EdgeSwitcher {
    fn used_vertices(&self) -> BTreeSet<Vertex> {
        self.vertices.clone()
    }
    fn used_colours(&self) -> BTreeSet<usize> {
        self.colours.clone()
    }
}

/// Builds an `e,f`-switcher avoiding the forbidden sets. Tries the direct
/// four-vertex construction for every pair `d, d'`, and when the two
/// closing edges differ in colour patches them with a colour switcher of
/// order at most `max_order - 3`.
pub fn build_edge_switcher(
    g: &ColouredBipartiteGraph,
    e: Edge,
    f: Edge,
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
    max_order: usize,
) -> Result<EdgeSwitcher> {
    let mut index = None;
    build_edge_switcher_with(g, &mut index, e, f, forbidden_v, forbidden_c, max_order)
}

/// As [`build_edge_switcher`], reusing (and lazily creating) a switcher index.
pub fn build_edge_switcher_with(
    g: &ColouredBipartiteGraph,
    index: &mut Option<SwitcherIndex>,
    e: Edge,
    f: Edge,
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
    max_order: usize,
) -> Result<EdgeSwitcher> {
    if e == f {
        return Err(Error::invalid("e and f coincide"));
    }
    if e.colour != f.colour {
        return Err(Error::invalid("e and f have different colours"));
    }
    if e.a == f.a || e.b == f.b {
        return Err(Error::invalid("e and f share a vertex"));
    }
    if !g.has_edge(&e) || !g.has_edge(&f) {
        return Err(Error::invalid("e or f is not a host edge"));
    }
    if max_order < 3 {
        return Err(Error::exhausted(
            "edge switcher",
            format!("max order {max_order} below 3"),
        ));
    }
    let c = e.colour;
    let ends: BTreeSet<Vertex> = edge_vertices(&e)
        .into_iter()
        .chain(edge_vertices(&f))
        .collect();
    let bad_v = |v: &Vertex| forbidden_v.contains(v) || ends.contains(v);
    let bad_c = |x: usize| x == c || forbidden_c.contains(&x);
    let colours: Vec<usize> = g.colours().into_iter().filter(|&x| !bad_c(x)).collect();
    let mut split = false;

    for &d in &colours {
        let (Some(w1), Some(w2)) = (g.partner_of_a(e.a, d), g.partner_of_a(f.a, d)) else {
            continue;
        };
        if bad_v(&Vertex::B(w1)) || bad_v(&Vertex::B(w2)) {
            continue;
        }
        for &d2 in &colours {
            if d2 == d {
                continue;
            }
            let (Some(x1), Some(x2)) = (g.partner_of_b(e.b, d2), g.partner_of_b(f.b, d2)) else {
                continue;
            };
            if bad_v(&Vertex::A(x1)) || bad_v(&Vertex::A(x2)) {
                continue;
            }
            let (Some(g1), Some(g2)) = (g.colour(x1, w1), g.colour(x2, w2)) else {
                continue;
            };
            if bad_c(g1) || bad_c(g2) || [d, d2].contains(&g1) || [d, d2].contains(&g2) {
                continue;
            }
            let core = [
                Edge::new(e.a, w1, d),
                Edge::new(x1, e.b, d2),
                Edge::new(f.a, w2, d),
                Edge::new(x2, f.b, d2),
            ];
            let vertices: BTreeSet<Vertex> =
                [Vertex::B(w1), Vertex::A(x1), Vertex::B(w2), Vertex::A(x2)].into();
            if g1 == g2 {
                return Ok(EdgeSwitcher {
                    vertices,
                    colours: [d, d2, g1].into(),
                    between: (e, f),
                    order: 3,
                    for_e: sorted(vec![core[0], core[1], Edge::new(x2, w2, g2)]),
                    for_f: sorted(vec![core[2], core[3], Edge::new(x1, w1, g1)]),
                });
            }
            split = true;
        }
    }
    // every direct attempt closed with two colours; patch them in order
    if split && max_order >= 7 {
        let idx = index.get_or_insert_with(|| SwitcherIndex::build(g));
        for &d in &colours {
            for &d2 in &colours {
                if let Some(s) = patch(
                    g,
                    idx,
                    e,
                    f,
                    d,
                    d2,
                    &bad_v,
                    &bad_c,
                    forbidden_v,
                    forbidden_c,
                    max_order,
                ) {
                    return Ok(s);
                }
            }
        }
    }
    Err(Error::exhausted(
        "edge switcher",
        format!("no switcher of order <= {max_order} for {e:?}, {f:?}"),
    ))
}

#[allow(clippy::too_many_arguments)]
fn patch(
    g: &ColouredBipartiteGraph,
    idx: &SwitcherIndex,
    e: Edge,
    f: Edge,
    d: usize,
    d2: usize,
    bad_v: &dyn Fn(&Vertex) -> bool,
    bad_c: &dyn Fn(usize) -> bool,
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
    max_order: usize,
) -> Option<EdgeSwitcher> {
    if d == d2 {
        return None;
    }
    let w1 = g.partner_of_a(e.a, d)?;
    let w2 = g.partner_of_a(f.a, d)?;
    let x1 = g.partner_of_b(e.b, d2)?;
    let x2 = g.partner_of_b(f.b, d2)?;
    let four = [Vertex::B(w1), Vertex::A(x1), Vertex::B(w2), Vertex::A(x2)];
    if four.iter().any(bad_v) {
        return None;
    }
    let (g1, g2) = (g.colour(x1, w1)?, g.colour(x2, w2)?);
    if g1 == g2 || bad_c(g1) || bad_c(g2) || [d, d2].contains(&g1) || [d, d2].contains(&g2) {
        return None;
    }
    let mut fv = forbidden_v.clone();
    fv.extend(four);
    fv.extend(edge_vertices(&e));
    fv.extend(edge_vertices(&f));
    let mut fc = forbidden_c.clone();
    fc.extend([e.colour, d, d2]);
    let s = find_switcher(idx, g1, g2, &fv, &fc, max_order - 3)?;
    let mut vertices: BTreeSet<Vertex> = four.into();
    vertices.extend(s.vertices());
    let mut colours: BTreeSet<usize> = [d, d2, g1, g2].into();
    colours.extend(s.colour_set());
    let mut for_e = vec![
        Edge::new(e.a, w1, d),
        Edge::new(x1, e.b, d2),
        Edge::new(x2, w2, g2),
    ];
    for_e.extend(&s.m1);
    let mut for_f = vec![
        Edge::new(f.a, w2, d),
        Edge::new(x2, f.b, d2),
        Edge::new(x1, w1, g1),
    ];
    for_f.extend(&s.m2);
    Some(EdgeSwitcher {
        order: colours.len(),
        vertices,
        colours,
        between: (e, f),
        for_e: sorted(for_e),
        for_f: sorted(for_f),
    })
}

fn sorted(mut v: Vec<Edge>) -> Vec<Edge> {
    v.sort();
    v
}

/// One random forbidden pair `(V, C)` and what happened.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchableTrial {
    pub trial: usize,
    pub forbidden_v: BTreeSet<Vertex>,
    pub forbidden_c: BTreeSet<usize>,
    pub order: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchableReport {
    pub e: Edge,
    pub f: Edge,
    pub beta: f64,
    pub k: usize,
    pub trials: usize,
    pub passed: usize,
    /// Failing trials, each a certificate of exhaustion for its forbidden sets.
    pub failures: Vec<SwitchableTrial>,
}

impl SwitchableReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.trials
    }
}

/// Monte-Carlo check of `(beta, k)`-switchability: each trial forbids
/// `floor(beta |G|)` random vertices (away from `e` and `f`) and as many
/// random colours (other than theirs), then asks for a switcher of order
/// at most `k`.
pub fn verify_switchable(
    g: &ColouredBipartiteGraph,
    e: Edge,
    f: Edge,
    beta: f64,
    k: usize,
    trials: usize,
    seed: u64,
) -> SwitchableReport {
    let size = (beta.max(0.0) * g.vertex_count() as f64).floor() as usize;
    let ends: BTreeSet<Vertex> = edge_vertices(&e)
        .into_iter()
        .chain(edge_vertices(&f))
        .collect();
    let pool_v: Vec<Vertex> = (0..g.a_size())
        .map(Vertex::A)
        .chain((0..g.b_size()).map(Vertex::B))
        .filter(|v| !ends.contains(v))
        .collect();
    let pool_c: Vec<usize> = g.colours().into_iter().filter(|&c| c != e.colour).collect();
    let index = if k >= 7 {
        Some(SwitcherIndex::build(g))
    } else {
        None
    };
    let results: Vec<SwitchableTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let fv: BTreeSet<Vertex> = pool_v.choose_multiple(&mut rng, size).copied().collect();
            let fc: BTreeSet<usize> = pool_c.choose_multiple(&mut rng, size).copied().collect();
            let mut idx = index.clone();
            let r = build_edge_switcher_with(g, &mut idx, e, f, &fv, &fc, k);
            SwitchableTrial {
                trial: t,
                forbidden_v: fv,
                forbidden_c: fc,
                order: r.as_ref().ok().map(|s| s.order),
                error: r.err().map(|x| x.to_string()),
            }
        })
        .collect();
    let passed = results.iter().filter(|r| r.order.is_some()).count();
    SwitchableReport {
        e,
        f,
        beta,
        k,
        trials,
        passed,
        failures: results.into_iter().filter(|r| r.order.is_none()).collect(),
    }
}
