//! Properly edge-coloured bipartite graphs and rainbow matchings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latin::{LatinArray, Transversal};

/// An edge `a b` with colour `colour`. `a` indexes class A, `b` class B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub colour: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize, colour: usize) -> Self {
        Edge { a, b, colour }
    }
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.colour].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, colour] = <[usize; 3]>::deserialize(d)?;
        Ok(Edge { a, b, colour })
    }
}

/// A vertex of a bipartite graph. A vertices precede B vertices when flattened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Vertex {
    A(usize),
    B(usize),
}

impl Vertex {
    /// Flat index with A first.
    pub fn flat(self, a_size: usize) -> usize {
        match self {
            Vertex::A(i) => i,
            Vertex::B(j) => a_size + j,
        }
    }
}

/// Bipartite graph with a proper edge colouring.
///
/// Colours are dense ids; `colour_count` is one more than the largest id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredBipartiteGraph {
    a_size: usize,
    b_size: usize,
    edges: Vec<Edge>,
    colour_count: usize,
    // per vertex: (colour, neighbour) sorted by colour
    adj_a: Vec<Vec<(usize, usize)>>,
    adj_b: Vec<Vec<(usize, usize)>>,
    by_colour: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    a: usize,
    b: usize,
    edges: Vec<Edge>,
}

impl ColouredBipartiteGraph {
    /// Builds a graph, rejecting parallel edges and improper colourings.
    pub fn new(a_size: usize, b_size: usize, edges: Vec<Edge>) -> Result<Self> {
        let report = validate(a_size, b_size, &edges);
        if let Some(e) = report.out_of_range.first() {
            return Err(Error::invalid(format!("edge {e:?} out of range")));
        }
        if let Some((e, f)) = report.parallel.first() {
            return Err(Error::invalid(format!("parallel edges {e:?} and {f:?}")));
        }
        if let Some((e, f)) = report.conflicts.first() {
            return Err(Error::invalid(format!(
                "improper colouring: {e:?} and {f:?} share a vertex and colour"
            )));
        }
        Ok(Self::build(a_size, b_size, edges))
    }

    fn build(a_size: usize, b_size: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort();
        let colour_count = edges.iter().map(|e| e.colour + 1).max().unwrap_or(0);
        let mut adj_a = vec![Vec::new(); a_size];
        let mut adj_b = vec![Vec::new(); b_size];
        let mut by_colour = vec![Vec::new(); colour_count];
        for (i, e) in edges.iter().enumerate() {
            adj_a[e.a].push((e.colour, e.b));
            adj_b[e.b].push((e.colour, e.a));
            by_colour[e.colour].push(i);
        }
        for l in adj_a.iter_mut().chain(adj_b.iter_mut()) {
            l.sort();
        }
        ColouredBipartiteGraph {
            a_size,
            b_size,
            edges,
            colour_count,
            adj_a,
            adj_b,
            by_colour,
        }
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    /// Total number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.a_size + self.b_size
    }

    /// Edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn colour_count(&self) -> usize {
        self.colour_count
    }

    /// Colours carried by at least one edge.
    pub fn colours(&self) -> Vec<usize> {
        (0..self.colour_count)
            .filter(|&c| !self.by_colour[c].is_empty())
            .collect()
    }

    /// `(colour, b)` pairs at `a`, sorted by colour.
    pub fn neighbours_a(&self, a: usize) -> &[(usize, usize)] {
        &self.adj_a[a]
    }

    /// `(colour, a)` pairs at `b`, sorted by colour.
    pub fn neighbours_b(&self, b: usize) -> &[(usize, usize)] {
        &self.adj_b[b]
    }

    /// Edges of colour `c`.
    pub fn colour_class(&self, c: usize) -> impl Iterator<Item = Edge> + '_ {
        self.by_colour
            .get(c)
            .into_iter()
            .flatten()
            .map(move |&i| self.edges[i])
    }

    pub fn colour_class_size(&self, c: usize) -> usize {
        self.by_colour.get(c).map_or(0, Vec::len)
    }

    /// Colour of the edge `a b`, if present.
    pub fn colour(&self, a: usize, b: usize) -> Option<usize> {
        self.adj_a
            .get(a)?
            .iter()
            .find(|&&(_, bb)| bb == b)
            .map(|&(c, _)| c)
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.colour(e.a, e.b) == Some(e.colour)
    }

    /// B-neighbour of `a` along colour `c`.
    pub fn partner_of_a(&self, a: usize, c: usize) -> Option<usize> {
        let l = &self.adj_a[a];
        l.binary_search_by_key(&c, |&(cc, _)| cc)
            .ok()
            .map(|i| l[i].1)
    }

    /// A-neighbour of `b` along colour `c`.
    pub fn partner_of_b(&self, b: usize, c: usize) -> Option<usize> {
        let l = &self.adj_b[b];
        l.binary_search_by_key(&c, |&(cc, _)| cc)
            .ok()
            .map(|i| l[i].1)
    }

    /// Neighbour of `v` along colour `c`.
    pub fn partner(&self, v: Vertex, c: usize) -> Option<Vertex> {
        match v {
            Vertex::A(a) => self.partner_of_a(a, c).map(Vertex::B),
            Vertex::B(b) => self.partner_of_b(b, c).map(Vertex::A),
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        match v {
            Vertex::A(a) => self.adj_a[a].len(),
            Vertex::B(b) => self.adj_b[b].len(),
        }
    }

    pub fn min_degree(&self) -> usize {
        self.adj_a
            .iter()
            .chain(self.adj_b.iter())
            .map(Vec::len)
            .min()
            .unwrap_or(0)
    }

    /// Edge joining `u` and `v` if they lie on opposite sides.
    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<Edge> {
        let (a, b) = match (u, v) {
            (Vertex::A(a), Vertex::B(b)) | (Vertex::B(b), Vertex::A(a)) => (a, b),
            _ => return None,
        };
        self.colour(a, b).map(|c| Edge::new(a, b, c))
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.a_size * self.b_size
    }

    pub fn report(&self) -> ValidationReport {
        validate(self.a_size, self.b_size, &self.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: GraphJson = serde_json::from_str(s)?;
        Self::new(j.a, j.b, j.edges)
    }
}

impl Serialize for ColouredBipartiteGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            a: self.a_size,
            b: self.b_size,
            edges: self.edges.clone(),
        }
        .serialize(s)
    }
}

/// Structural report on an edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub proper: bool,
    pub out_of_range: Vec<Edge>,
    pub parallel: Vec<(Edge, Edge)>,
    /// Pairs of same-coloured edges sharing a vertex.
    pub conflicts: Vec<(Edge, Edge)>,
    /// `|E_c|` indexed by colour id.
    pub colour_counts: Vec<usize>,
    pub degrees_a: Vec<usize>,
    pub degrees_b: Vec<usize>,
}

/// Checks properness and simplicity of an edge list and gathers statistics.
pub fn validate(a_size: usize, b_size: usize, edges: &[Edge]) -> ValidationReport {
    let mut out_of_range = Vec::new();
    let mut parallel = Vec::new();
    let mut conflicts = Vec::new();
    let colour_total = edges.iter().map(|e| e.colour + 1).max().unwrap_or(0);
    let mut colour_counts = vec![0; colour_total];
    let mut degrees_a = vec![0; a_size];
    let mut degrees_b = vec![0; b_size];
    let mut pairs: BTreeMap<(usize, usize), Edge> = BTreeMap::new();
    let mut at_a: BTreeMap<(usize, usize), Edge> = BTreeMap::new();
    let mut at_b: BTreeMap<(usize, usize), Edge> = BTreeMap::new();
    for &e in edges {
        if e.a >= a_size || e.b >= b_size {
            out_of_range.push(e);
            continue;
        }
        colour_counts[e.colour] += 1;
        degrees_a[e.a] += 1;
        degrees_b[e.b] += 1;
        if let Some(&f) = pairs.get(&(e.a, e.b)) {
            parallel.push((f, e));
        } else {
            pairs.insert((e.a, e.b), e);
        }
        if let Some(&f) = at_a.get(&(e.a, e.colour)) {
            if f != e {
                conflicts.push((f, e));
            }
        } else {
            at_a.insert((e.a, e.colour), e);
        }
        if let Some(&f) = at_b.get(&(e.b, e.colour)) {
            if f != e && !conflicts.contains(&(f, e)) {
                conflicts.push((f, e));
            }
        } else {
            at_b.insert((e.b, e.colour), e);
        }
    }
    ValidationReport {
        proper: out_of_range.is_empty() && parallel.is_empty() && conflicts.is_empty(),
        out_of_range,
        parallel,
        conflicts,
        colour_counts,
        degrees_a,
        degrees_b,
    }
}

/// The coloured bipartite graph of a Latin array: row `i` is `A(i)`,
/// column `j` is `B(j)` and a filled cell gives an edge of its symbol's colour.
pub fn latin_to_graph(square: &LatinArray) -> ColouredBipartiteGraph {
    let n = square.order();
    let map = square.colour_map();
    let mut edges = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            if let Some(s) = square.get(r, c) {
                edges.push(Edge::new(r, c, map[&s]));
            }
        }
    }
    // the Latin property is exactly properness
    ColouredBipartiteGraph::build(n, n, edges)
}

/// Inverse of [`latin_to_graph`] for complete balanced graphs.
pub fn graph_to_latin(graph: &ColouredBipartiteGraph) -> Result<LatinArray> {
    let n = graph.a_size();
    if graph.b_size() != n {
        return Err(Error::invalid("classes differ in size"));
    }
    if !graph.is_complete() {
        return Err(Error::invalid("graph is not complete bipartite"));
    }
    let report = graph.report();
    if !report.proper {
        return Err(Error::invalid("graph is not properly coloured"));
    }
    let mut cells = vec![None; n * n];
    for e in graph.edges() {
        cells[e.a * n + e.b] = Some(e.colour);
    }
    Ok(LatinArray::from_flat_unchecked(n, cells))
}

/// A matching whose edges have distinct colours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RainbowMatching {
    edges: Vec<Edge>,
}

impl RainbowMatching {
    /// Checks that `edges` form a rainbow matching inside `host`.
    pub fn new(host: &ColouredBipartiteGraph, edges: Vec<Edge>) -> Result<Self> {
        let m = RainbowMatching::unchecked(edges);
        m.check_in(host)?;
        Ok(m)
    }

    pub fn empty() -> Self {
        RainbowMatching { edges: Vec::new() }
    }

    pub(crate) fn unchecked(mut edges: Vec<Edge>) -> Self {
        edges.sort();
        RainbowMatching { edges }
    }

    /// Verifies the matching against `host`.
    pub fn check_in(&self, host: &ColouredBipartiteGraph) -> Result<()> {
        let mut a = BTreeSet::new();
        let mut b = BTreeSet::new();
        let mut c = BTreeSet::new();
        for e in &self.edges {
            if !host.has_edge(e) {
                return Err(Error::invalid(format!("edge {e:?} not in host")));
            }
            if !a.insert(e.a) || !b.insert(e.b) {
                return Err(Error::invalid(format!("edge {e:?} shares a vertex")));
            }
            if !c.insert(e.colour) {
                return Err(Error::invalid(format!("colour {} repeated", e.colour)));
            }
        }
        Ok(())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn colours(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.colour).collect()
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.edges
            .iter()
            .flat_map(|e| [Vertex::A(e.a), Vertex::B(e.b)])
            .collect()
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }
}

/// Reads a rainbow matching of `latin_to_graph(square)` as cells of `square`.
pub fn matching_to_transversal(m: &RainbowMatching, square: &LatinArray) -> Result<Transversal> {
    let g = latin_to_graph(square);
    m.check_in(&g)?;
    Transversal::new(m.edges().iter().map(|e| (e.a, e.b)).collect(), square)
}

/// True when `edges` cover vertex set `vertices` exactly, use each colour of
/// `colours` exactly once and form a matching of `host`.
pub fn is_exactly_rainbow_on(
    host: &ColouredBipartiteGraph,
    edges: &[Edge],
    vertices: &BTreeSet<Vertex>,
    colours: &BTreeSet<usize>,
) -> bool {
    let m = RainbowMatching::unchecked(edges.to_vec());
    m.check_in(host).is_ok() && &m.vertices() == vertices && &m.colours() == colours
}

/// Exhaustive search for an exactly-`colours`-rainbow perfect matching of
/// `host[vertices]` avoiding `banned`. Branches on whichever vertex or
/// colour has the fewest remaining options; meant for gadgets of a few
/// dozen vertices.
pub fn find_exactly_rainbow(
    host: &ColouredBipartiteGraph,
    vertices: &BTreeSet<Vertex>,
    colours: &BTreeSet<usize>,
    banned: &[Edge],
) -> Option<Vec<Edge>> {
    let a_free: BTreeSet<usize> = vertices
        .iter()
        .filter_map(|v| if let Vertex::A(i) = v { Some(*i) } else { None })
        .collect();
    let b_free: BTreeSet<usize> = vertices
        .iter()
        .filter_map(|v| if let Vertex::B(j) = v { Some(*j) } else { None })
        .collect();
    if a_free.len() != b_free.len() || a_free.len() != colours.len() {
        return None;
    }
    let usable = |e: &Edge, st: &ExactState| {
        st.a.contains(&e.a)
            && st.b.contains(&e.b)
            && st.c.contains(&e.colour)
            && !banned.contains(e)
    };
    struct ExactState {
        a: BTreeSet<usize>,
        b: BTreeSet<usize>,
        c: BTreeSet<usize>,
    }
    fn rec(
        host: &ColouredBipartiteGraph,
        st: &mut ExactState,
        usable: &dyn Fn(&Edge, &ExactState) -> bool,
        acc: &mut Vec<Edge>,
    ) -> bool {
        if st.a.is_empty() {
            return true;
        }
        // most constrained A vertex or colour
        let mut best: Option<Vec<Edge>> = None;
        for &a in &st.a {
            let opts: Vec<Edge> = host
                .neighbours_a(a)
                .iter()
                .map(|&(c, b)| Edge::new(a, b, c))
                .filter(|e| usable(e, st))
                .collect();
            if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                best = Some(opts);
            }
        }
        for &c in &st.c {
            if best.as_ref().is_some_and(|b| b.len() <= 1) {
                break;
            }
            let opts: Vec<Edge> = host.colour_class(c).filter(|e| usable(e, st)).collect();
            if best.as_ref().is_none_or(|b| opts.len() < b.len()) {
                best = Some(opts);
            }
        }
        for e in best.unwrap_or_default() {
            st.a.remove(&e.a);
            st.b.remove(&e.b);
            st.c.remove(&e.colour);
            acc.push(e);
            if rec(host, st, usable, acc) {
                return true;
            }
            acc.pop();
            st.a.insert(e.a);
            st.b.insert(e.b);
            st.c.insert(e.colour);
        }
        false
    }
    let mut st = ExactState {
        a: a_free,
        b: b_free,
        c: colours.clone(),
    };
    let mut acc = Vec::new();
    rec(host, &mut st, &usable, &mut acc).then(|| {
        acc.sort();
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::all_latin_squares;

    fn z2() -> LatinArray {
        LatinArray::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn single_cell() {
        let g = latin_to_graph(&LatinArray::from_rows(vec![vec![0]]).unwrap());
        assert_eq!(g.edges(), &[Edge::new(0, 0, 0)]);
    }

    #[test]
    fn z2_colours_are_sums() {
        let g = latin_to_graph(&z2());
        for e in g.edges() {
            assert_eq!(e.colour, (e.a + e.b) % 2);
        }
        let back = graph_to_latin(
            &ColouredBipartiteGraph::new(
                2,
                2,
                vec![
                    Edge::new(0, 0, 0),
                    Edge::new(0, 1, 1),
                    Edge::new(1, 0, 1),
                    Edge::new(1, 1, 0),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(back, z2());
    }

    #[test]
    fn order3_colour_classes_are_perfect_matchings() {
        let squares = all_latin_squares(3);
        assert_eq!(squares.len(), 12);
        for l in squares {
            let g = latin_to_graph(&l);
            for c in 0..3 {
                let class: Vec<_> = g.colour_class(c).collect();
                assert_eq!(class.len(), 3);
                let a: BTreeSet<_> = class.iter().map(|e| e.a).collect();
                let b: BTreeSet<_> = class.iter().map(|e| e.b).collect();
                assert_eq!((a.len(), b.len()), (3, 3));
            }
        }
    }

    #[test]
    fn order4_roundtrip() {
        let squares = all_latin_squares(4);
        assert_eq!(squares.len(), 576);
        for l in squares {
            let g = latin_to_graph(&l);
            assert!(g.report().proper);
            assert_eq!(graph_to_latin(&g).unwrap(), l);
        }
    }

    #[test]
    fn validate_lists_conflict() {
        let edges = vec![Edge::new(0, 0, 0), Edge::new(0, 1, 0)];
        let r = validate(1, 2, &edges);
        assert!(!r.proper);
        assert_eq!(r.conflicts, vec![(edges[0], edges[1])]);
        assert!(ColouredBipartiteGraph::new(1, 2, edges).is_err());
    }

    #[test]
    fn graph_to_latin_rejects_incomplete() {
        let g = ColouredBipartiteGraph::new(2, 2, vec![Edge::new(0, 0, 0)]).unwrap();
        assert!(graph_to_latin(&g).is_err());
    }

    #[test]
    fn diagonal_transversal_of_z3() {
        let l = LatinArray::from_rows(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        let g = latin_to_graph(&l);
        let m = RainbowMatching::new(&g, (0..3).map(|i| Edge::new(i, i, (2 * i) % 3)).collect())
            .unwrap();
        let t = matching_to_transversal(&m, &l).unwrap();
        assert_eq!(t.cells, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(t.symbols(&l), vec![0, 2, 1]);
        let empty = matching_to_transversal(&RainbowMatching::empty(), &l).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn json_shape() {
        let g = latin_to_graph(&z2());
        assert_eq!(
            g.to_json(),
            r#"{"a":2,"b":2,"edges":[[0,0,0],[0,1,1],[1,0,1],[1,1,0]]}"#
        );
        assert_eq!(ColouredBipartiteGraph::from_json(&g.to_json()).unwrap(), g);
    }
}
