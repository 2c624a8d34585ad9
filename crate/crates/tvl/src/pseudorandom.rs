//! Typicality of the associated 3-partite hypergraph and the seven
//! structural pseudorandomness properties, audited by exact counting and
//! greedy disjoint packing.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ColouredBipartiteGraph, Edge, Vertex};

/// 3-partite 3-uniform hypergraph on `A`, `B` and colours `C`; a triple
/// `(a, b, c)` for every colour-`c` edge `ab`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripartiteHypergraph {
    pub a_size: usize,
    pub b_size: usize,
    pub c_size: usize,
    pub triples: Vec<[usize; 3]>,
}

impl TripartiteHypergraph {
    /// Checks that every pair of vertices lies in at most one triple.
    pub fn new(
        a_size: usize,
        b_size: usize,
        c_size: usize,
        mut triples: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let mut ab = BTreeSet::new();
        let mut bc = BTreeSet::new();
        let mut ac = BTreeSet::new();
        for t in &triples {
            if t[0] >= a_size || t[1] >= b_size || t[2] >= c_size {
                return Err(Error::invalid(format!("triple {t:?} out of range")));
            }
            if !ab.insert((t[0], t[1])) || !bc.insert((t[1], t[2])) || !ac.insert((t[0], t[2])) {
                return Err(Error::invalid(format!("triple {t:?} breaks simplicity")));
            }
        }
        triples.sort();
        Ok(TripartiteHypergraph {
            a_size,
            b_size,
            c_size,
            triples,
        })
    }

    /// Vertex degrees per class.
    pub fn degrees(&self) -> [Vec<usize>; 3] {
        let mut d = [
            vec![0; self.a_size],
            vec![0; self.b_size],
            vec![0; self.c_size],
        ];
        for t in &self.triples {
            for k in 0..3 {
                d[k][t[k]] += 1;
            }
        }
        d
    }
}

/// The hypergraph of a properly coloured bipartite graph. Colour ids index
/// the third class directly.
pub fn build_hypergraph(g: &ColouredBipartiteGraph) -> TripartiteHypergraph {
    let triples = g.edges().iter().map(|e| [e.a, e.b, e.colour]).collect();
    TripartiteHypergraph::new(g.a_size(), g.b_size(), g.colour_count(), triples)
        .expect("proper colourings give simple hypergraphs")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalityViolation {
    /// `"AB"`, `"BC"` or `"AC"`.
    pub projection: &'static str,
    /// `"size"`, `"degree"` or `"codegree"`.
    pub kind: &'static str,
    /// Side (0 or 1 within the projection) and vertex indices involved.
    pub side: usize,
    pub vertices: Vec<usize>,
    pub value: usize,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalityReport {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub typical: bool,
    pub violations: Vec<TypicalityViolation>,
}

fn within(value: usize, target: f64, eps: f64) -> bool {
    let v = value as f64;
    let slack = 1e-9 * target.abs().max(1.0);
    v >= (1.0 - eps) * target - slack && v <= (1.0 + eps) * target + slack
}

fn check_bipartite(
    name: &'static str,
    left: usize,
    right: usize,
    pairs: &BTreeSet<(usize, usize)>,
    n: usize,
    p: f64,
    eps: f64,
    out: &mut Vec<TypicalityViolation>,
) {
    let nf = n as f64;
    let mut adj = [vec![BTreeSet::new(); left], vec![BTreeSet::new(); right]];
    for &(x, y) in pairs {
        adj[0][x].insert(y);
        adj[1][y].insert(x);
    }
    for (side, size) in [left, right].into_iter().enumerate() {
        if !within(size, nf, eps) {
            out.push(TypicalityViolation {
                projection: name,
                kind: "size",
                side,
                vertices: vec![],
                value: size,
                target: nf,
            });
        }
        for (v, nb) in adj[side].iter().enumerate() {
            if !within(nb.len(), p * nf, eps) {
                out.push(TypicalityViolation {
                    projection: name,
                    kind: "degree",
                    side,
                    vertices: vec![v],
                    value: nb.len(),
                    target: p * nf,
                });
            }
        }
        for u in 0..size {
            for v in u + 1..size {
                let co = adj[side][u].intersection(&adj[side][v]).count();
                if !within(co, p * p * nf, eps) {
                    out.push(TypicalityViolation {
                        projection: name,
                        kind: "codegree",
                        side,
                        vertices: vec![u, v],
                        value: co,
                        target: p * p * nf,
                    });
                }
            }
        }
    }
}

/// Exact check of class sizes, degrees and same-side codegrees in all three
/// bipartite projections.
pub fn check_typical(h: &TripartiteHypergraph, n: usize, p: f64, epsilon: f64) -> TypicalityReport {
    let ab = h.triples.iter().map(|t| (t[0], t[1])).collect();
    let bc = h.triples.iter().map(|t| (t[1], t[2])).collect();
    let ac = h.triples.iter().map(|t| (t[0], t[2])).collect();
    let mut violations = Vec::new();
    check_bipartite(
        "AB",
        h.a_size,
        h.b_size,
        &ab,
        n,
        p,
        epsilon,
        &mut violations,
    );
    check_bipartite(
        "BC",
        h.b_size,
        h.c_size,
        &bc,
        n,
        p,
        epsilon,
        &mut violations,
    );
    check_bipartite(
        "AC",
        h.a_size,
        h.c_size,
        &ac,
        n,
        p,
        epsilon,
        &mut violations,
    );
    TypicalityReport {
        n,
        p,
        epsilon,
        typical: violations.is_empty(),
        violations,
    }
}

/// How hard the audit works.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    /// Full pair counts for P3 (size-capped); packings run to maximality.
    Exact,
    /// Counting and packing stop once a quota is met.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditConfig {
    pub alpha: f64,
    pub mode: AuditMode,
    /// Random colour sets sampled per instance for P6 and P7.
    pub samples: usize,
    pub seed: u64,
    /// Largest `n` for exact P3 counting.
    pub exact_cap: usize,
    /// Which of P1..P7 to run.
    pub properties: Vec<usize>,
}

impl AuditConfig {
    pub fn new(alpha: f64) -> Self {
        AuditConfig {
            alpha,
            mode: AuditMode::Greedy,
            samples: 8,
            seed: 0,
            exact_cap: 12,
            properties: (1..=7).collect(),
        }
    }
}

/// Nominal value of the constant `k` in P7.
pub const P7_K: usize = 100;

/// One set of a witness family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    pub vertices: Vec<Vertex>,
    pub colours: Vec<usize>,
}

/// A witness family for one instance of a property, with the instance's
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example {
    pub c0: Option<usize>,
    pub d: Option<usize>,
    pub u: Option<Vertex>,
    pub v: Option<Vertex>,
    pub k: Option<usize>,
    pub cbar: Vec<usize>,
    pub sets: Vec<WitnessSet>,
}

impl Example {
    fn new() -> Self {
        Example {
            c0: None,
            d: None,
            u: None,
            v: None,
            k: None,
            cbar: vec![],
            sets: vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub holds: bool,
    pub instances: u64,
    pub failures: u64,
    pub quota: u64,
    /// Smallest family (or count) achieved over instances.
    pub min_found: u64,
    pub note: Option<String>,
    pub example: Option<Example>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudorandomAudit {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub mode: AuditMode,
    /// Every colour has at least `(1 - epsilon) p n` edges.
    pub colour_floor: bool,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
}

fn quota(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else {
        x.ceil() as u64
    }
}

struct Ctx<'g> {
    g: &'g ColouredBipartiteGraph,
    colours: Vec<usize>,
    greedy: bool,
}

fn other_side(v: Vertex) -> bool {
    matches!(v, Vertex::A(_))
}

impl Ctx<'_> {
    fn edge(&self, x: Vertex, y: Vertex) -> Option<Edge> {
        self.g.edge_between(x, y)
    }

    fn nbrs(&self, v: Vertex) -> Vec<(usize, Vertex)> {
        match v {
            Vertex::A(a) => self
                .g
                .neighbours_a(a)
                .iter()
                .map(|&(c, b)| (c, Vertex::B(b)))
                .collect(),
            Vertex::B(b) => self
                .g
                .neighbours_b(b)
                .iter()
                .map(|&(c, a)| (c, Vertex::A(a)))
                .collect(),
        }
    }

    /// `u - w1 = w2 - w3 = w4 - v` with `=` in colour `c0`; `u` in A.
    fn p4_unit(
        &self,
        u: Vertex,
        v: Vertex,
        c0: usize,
        used_v: &BTreeSet<Vertex>,
        used_c: &BTreeSet<usize>,
    ) -> Option<WitnessSet> {
        let fresh = |x: Vertex, extra: &[Vertex]| {
            x != u && x != v && !used_v.contains(&x) && !extra.contains(&x)
        };
        for (c1, w1) in self.nbrs(u) {
            if c1 == c0 || used_c.contains(&c1) || !fresh(w1, &[]) {
                continue;
            }
            let Some(w2) = self.g.partner(w1, c0) else {
                continue;
            };
            if !fresh(w2, &[w1]) {
                continue;
            }
            for (c2, w3) in self.nbrs(w2) {
                if c2 == c0 || c2 == c1 || used_c.contains(&c2) || !fresh(w3, &[w1, w2]) {
                    continue;
                }
                let Some(w4) = self.g.partner(w3, c0) else {
                    continue;
                };
                if !fresh(w4, &[w1, w2, w3]) {
                    continue;
                }
                let Some(e) = self.edge(w4, v) else { continue };
                let c3 = e.colour;
                if c3 == c0 || c3 == c1 || c3 == c2 || used_c.contains(&c3) {
                    continue;
                }
                let mut vs = vec![w1, w2, w3, w4];
                vs.sort();
                let mut cs = vec![c1, c2, c3];
                cs.sort();
                return Some(WitnessSet {
                    vertices: vs,
                    colours: cs,
                });
            }
        }
        None
    }

    /// Alternating path `c0, x1, c0, x2, ..., c0` through fresh vertices
    /// whose non-`c0` colours are `need` distinct members of `pool`.
    fn alt_path(
        &self,
        c0: usize,
        pool: &BTreeSet<usize>,
        need: usize,
        used_v: &BTreeSet<Vertex>,
        budget: &mut usize,
    ) -> Option<WitnessSet> {
        for e in self.g.colour_class(c0) {
            for (x0, x1) in [
                (Vertex::A(e.a), Vertex::B(e.b)),
                (Vertex::B(e.b), Vertex::A(e.a)),
            ] {
                if used_v.contains(&x0) || used_v.contains(&x1) {
                    continue;
                }
                let mut path = vec![x0, x1];
                let mut cols = Vec::new();
                if self.extend_path(c0, pool, need, used_v, &mut path, &mut cols, budget) {
                    let mut vs = path;
                    vs.sort();
                    cols.sort();
                    return Some(WitnessSet {
                        vertices: vs,
                        colours: cols,
                    });
                }
                if *budget == 0 {
                    return None;
                }
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_path(
        &self,
        c0: usize,
        pool: &BTreeSet<usize>,
        need: usize,
        used_v: &BTreeSet<Vertex>,
        path: &mut Vec<Vertex>,
        cols: &mut Vec<usize>,
        budget: &mut usize,
    ) -> bool {
        if cols.len() == need {
            return true;
        }
        let last = *path.last().expect("path starts with an edge");
        for &c in pool {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            if c == c0 || cols.contains(&c) {
                continue;
            }
            let Some(y) = self.g.partner(last, c) else {
                continue;
            };
            if used_v.contains(&y) || path.contains(&y) {
                continue;
            }
            let Some(z) = self.g.partner(y, c0) else {
                continue;
            };
            if used_v.contains(&z) || path.contains(&z) {
                continue;
            }
            path.push(y);
            path.push(z);
            cols.push(c);
            if self.extend_path(c0, pool, need, used_v, path, cols, budget) {
                return true;
            }
            cols.pop();
            path.pop();
            path.pop();
        }
        false
    }

    /// Vertex set carrying a matching of `|r| + 1` colour-`c0` edges and an
    /// exactly-`r`-rainbow matching: one alternating path plus alternating
    /// cycles, as a union of segments.
    fn exact_cover(
        &self,
        c0: usize,
        r: &BTreeSet<usize>,
        used: &BTreeSet<Vertex>,
        path_done: bool,
        budget: &mut usize,
    ) -> Option<Vec<Vertex>> {
        let Some(&m) = r.iter().next() else {
            if path_done {
                return Some(vec![]);
            }
            return self
                .g
                .colour_class(c0)
                .map(|e| [Vertex::A(e.a), Vertex::B(e.b)])
                .find(|p| !used.contains(&p[0]) && !used.contains(&p[1]))
                .map(|p| p.to_vec());
        };
        // the segment holding the least colour is placed first
        for e in self.g.colour_class(c0) {
            for (x0, x1) in [
                (Vertex::A(e.a), Vertex::B(e.b)),
                (Vertex::B(e.b), Vertex::A(e.a)),
            ] {
                if used.contains(&x0) || used.contains(&x1) {
                    continue;
                }
                let mut path = vec![x0, x1];
                let mut cols = Vec::new();
                if let Some(v) =
                    self.segment(c0, r, m, used, path_done, &mut path, &mut cols, budget)
                {
                    return Some(v);
                }
                if *budget == 0 {
                    return None;
                }
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn segment(
        &self,
        c0: usize,
        r: &BTreeSet<usize>,
        m: usize,
        used: &BTreeSet<Vertex>,
        path_done: bool,
        path: &mut Vec<Vertex>,
        cols: &mut Vec<usize>,
        budget: &mut usize,
    ) -> Option<Vec<Vertex>> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let rest_after = |cols: &[usize]| -> BTreeSet<usize> {
            r.iter().copied().filter(|c| !cols.contains(c)).collect()
        };
        let finish = |path: &[Vertex],
                      cols: &[usize],
                      path_flag: bool,
                      budget: &mut usize|
         -> Option<Vec<Vertex>> {
            let mut u2 = used.clone();
            u2.extend(path.iter().copied());
            let rest = self.exact_cover(c0, &rest_after(cols), &u2, path_flag, budget)?;
            let mut out = path.to_vec();
            out.extend(rest);
            Some(out)
        };
        if !path_done && cols.contains(&m) {
            if let Some(v) = finish(path, cols, true, budget) {
                return Some(v);
            }
        }
        let last = *path.last().expect("nonempty");
        for &c in r {
            if cols.contains(&c) {
                continue;
            }
            let Some(y) = self.g.partner(last, c) else {
                continue;
            };
            if y == path[0] {
                if cols.len() + 1 >= 2 && (c == m || cols.contains(&m)) {
                    cols.push(c);
                    let got = finish(path, cols, path_done, budget);
                    cols.pop();
                    if got.is_some() {
                        return got;
                    }
                }
                continue;
            }
            if used.contains(&y) || path.contains(&y) {
                continue;
            }
            let Some(z) = self.g.partner(y, c0) else {
                continue;
            };
            if used.contains(&z) || path.contains(&z) {
                continue;
            }
            path.push(y);
            path.push(z);
            cols.push(c);
            let got = self.segment(c0, r, m, used, path_done, path, cols, budget);
            cols.pop();
            path.pop();
            path.pop();
            if got.is_some() {
                return got;
            }
        }
        None
    }

    /// Union of alternating `c0`/`pool` cycles with exactly `k` non-`c0`
    /// colours, each cycle using at least two.
    fn cycle_cover(
        &self,
        c0: usize,
        pool: &BTreeSet<usize>,
        k: usize,
        used_v: &BTreeSet<Vertex>,
        budget: &mut usize,
    ) -> Option<WitnessSet> {
        let mut vs = Vec::new();
        let mut cs = Vec::new();
        let mut local_v = used_v.clone();
        let mut local_c = BTreeSet::new();
        while cs.len() < k {
            let need = k - cs.len();
            let mut found = None;
            'start: for e in self.g.colour_class(c0) {
                let (x0, x1) = (Vertex::A(e.a), Vertex::B(e.b));
                if local_v.contains(&x0) || local_v.contains(&x1) {
                    continue;
                }
                let mut path = vec![x0, x1];
                let mut cols = Vec::new();
                if self.close_cycle(
                    c0, pool, need, &local_v, &local_c, &mut path, &mut cols, budget,
                ) {
                    found = Some((path, cols));
                    break 'start;
                }
                if *budget == 0 {
                    return None;
                }
            }
            let (path, cols) = found?;
            local_v.extend(&path);
            local_c.extend(&cols);
            vs.extend(path);
            cs.extend(cols);
        }
        vs.sort();
        cs.sort();
        Some(WitnessSet {
            vertices: vs,
            colours: cs,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn close_cycle(
        &self,
        c0: usize,
        pool: &BTreeSet<usize>,
        need: usize,
        used_v: &BTreeSet<Vertex>,
        used_c: &BTreeSet<usize>,
        path: &mut Vec<Vertex>,
        cols: &mut Vec<usize>,
        budget: &mut usize,
    ) -> bool {
        let last = *path.last().expect("nonempty");
        for &c in pool {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            if c == c0 || cols.contains(&c) || used_c.contains(&c) {
                continue;
            }
            let Some(y) = self.g.partner(last, c) else {
                continue;
            };
            let len = cols.len() + 1;
            if y == path[0] {
                // closing: leftover must itself be coverable (0 or >= 2)
                if len >= 2 && (need - len == 0 || need - len >= 2) {
                    cols.push(c);
                    return true;
                }
                continue;
            }
            if len >= need || used_v.contains(&y) || path.contains(&y) {
                continue;
            }
            let Some(z) = self.g.partner(y, c0) else {
                continue;
            };
            if used_v.contains(&z) || path.contains(&z) {
                continue;
            }
            path.push(y);
            path.push(z);
            cols.push(c);
            if self.close_cycle(c0, pool, need, used_v, used_c, path, cols, budget) {
                return true;
            }
            cols.pop();
            path.pop();
            path.pop();
        }
        false
    }

    /// Packs disjoint units found by `unit` until `stop` sets exist (or
    /// none fit).
    fn pack<F>(&self, stop: u64, mut unit: F) -> Vec<WitnessSet>
    where
        F: FnMut(&BTreeSet<Vertex>, &BTreeSet<usize>) -> Option<WitnessSet>,
    {
        let mut used_v = BTreeSet::new();
        let mut used_c = BTreeSet::new();
        let mut out = Vec::new();
        while !(self.greedy && out.len() as u64 >= stop) {
            let Some(w) = unit(&used_v, &used_c) else {
                break;
            };
            used_v.extend(w.vertices.iter().copied());
            used_c.extend(w.colours.iter().copied());
            out.push(w);
        }
        out
    }
}

fn all_vertices(g: &ColouredBipartiteGraph) -> (Vec<Vertex>, Vec<Vertex>) {
    (
        (0..g.a_size()).map(Vertex::A).collect(),
        (0..g.b_size()).map(Vertex::B).collect(),
    )
}

/// Accumulates per-instance outcomes into a [`PropertyResult`].
struct Tally {
    instances: u64,
    failures: u64,
    min_found: u64,
    example: Option<Example>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            instances: 0,
            failures: 0,
            min_found: u64::MAX,
            example: None,
        }
    }

    fn add(&mut self, found: u64, quota: u64, example: impl FnOnce() -> Example) {
        self.instances += 1;
        if found < quota {
            self.failures += 1;
        }
        self.min_found = self.min_found.min(found);
        if self.example.is_none() {
            self.example = Some(example());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.failures += other.failures;
        self.min_found = self.min_found.min(other.min_found);
        if self.example.is_none() {
            self.example = other.example;
        }
        self
    }

    fn finish(self, name: &str, quota: u64, note: Option<String>) -> PropertyResult {
        PropertyResult {
            name: name.into(),
            holds: self.failures == 0,
            instances: self.instances,
            failures: self.failures,
            quota,
            min_found: if self.instances == 0 {
                0
            } else {
                self.min_found
            },
            note,
            example: self.example,
        }
    }
}

fn p3(ctx: &Ctx, n: usize, alpha: f64) -> PropertyResult {
    let g = ctx.g;
    let q = quota(alpha * (n * n) as f64);
    let allowance = (n as f64).sqrt().floor() as u64;
    // rainbow 4-cycles through each edge, keyed by the colours next to it
    type Cyc = ((usize, usize), [Vertex; 4]);
    let through = |e: &Edge| -> Vec<Cyc> {
        let mut out = Vec::new();
        for &(x, a2) in g.neighbours_b(e.b) {
            if a2 == e.a {
                continue;
            }
            for &(y, b2) in g.neighbours_a(e.a) {
                if b2 == e.b || x == y {
                    continue;
                }
                let Some(z) = g.colour(a2, b2) else { continue };
                if z == e.colour || z == x || z == y {
                    continue;
                }
                out.push((
                    (x.min(y), x.max(y)),
                    [Vertex::A(e.a), Vertex::B(e.b), Vertex::A(a2), Vertex::B(b2)],
                ));
            }
        }
        out
    };
    let tallies: Vec<(Tally, u64)> = ctx
        .colours
        .par_iter()
        .map(|&c| {
            let class: Vec<Edge> = g.colour_class(c).collect();
            let cyc: Vec<Vec<Cyc>> = class.iter().map(through).collect();
            let grouped: Vec<HashMap<(usize, usize), Vec<[Vertex; 4]>>> = cyc
                .iter()
                .map(|cs| {
                    let mut m: HashMap<_, Vec<_>> = HashMap::new();
                    for (k, vs) in cs {
                        m.entry(*k).or_default().push(*vs);
                    }
                    m
                })
                .collect();
            let mut t = Tally::new();
            let mut bad_edges = 0;
            for (i, e) in class.iter().enumerate() {
                let mut bad = 0;
                for (j, f) in class.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let mut count = 0u64;
                    'outer: for (key, s1) in &cyc[i] {
                        if let Some(list) = grouped[j].get(key) {
                            for s2 in list {
                                if s1.iter().all(|x| !s2.contains(x)) {
                                    count += 1;
                                    if ctx.greedy && count >= q {
                                        break 'outer;
                                    }
                                }
                            }
                        }
                    }
                    if count < q {
                        bad += 1;
                    }
                    t.instances += 1;
                    t.min_found = t.min_found.min(count);
                    if t.example.is_none() && count > 0 {
                        let mut ex = Example::new();
                        ex.c0 = Some(c);
                        ex.u = Some(Vertex::A(e.a));
                        ex.v = Some(Vertex::A(f.a));
                        t.example = Some(ex);
                    }
                }
                if bad > allowance {
                    bad_edges += 1;
                }
            }
            (t, bad_edges)
        })
        .collect();
    let mut total = Tally::new();
    let mut failing_edges = 0;
    for (t, b) in tallies {
        total = total.merge(t);
        failing_edges += b;
    }
    // an instance here is a pair (e, f); failures count edges e with too
    // many poor partners
    total.failures = failing_edges;
    total.finish(
        "P3",
        q,
        Some(format!("up to {allowance} exceptional partners per edge")),
    )
}

fn p4(ctx: &Ctx, n: usize, alpha: f64) -> PropertyResult {
    let q = quota(alpha * n as f64);
    let (a_side, b_side) = all_vertices(ctx.g);
    let tallies: Vec<Tally> = a_side
        .par_iter()
        .map(|&u| {
            let mut t = Tally::new();
            for &v in &b_side {
                for &c0 in &ctx.colours {
                    let fam = ctx.pack(q, |uv, uc| ctx.p4_unit(u, v, c0, uv, uc));
                    t.add(fam.len() as u64, q, || {
                        let mut ex = Example::new();
                        ex.u = Some(u);
                        ex.v = Some(v);
                        ex.c0 = Some(c0);
                        ex.sets = fam.clone();
                        ex
                    });
                }
            }
            t
        })
        .collect();
    tallies
        .into_iter()
        .fold(Tally::new(), Tally::merge)
        .finish("P4", q, None)
}

fn p5_unit(
    ctx: &Ctx,
    c0: usize,
    d: usize,
    used_v: &BTreeSet<Vertex>,
    used_c: &BTreeSet<usize>,
) -> Option<WitnessSet> {
    for e in ctx.g.colour_class(d) {
        let (x1, x2) = (Vertex::A(e.a), Vertex::B(e.b));
        let (Some(x0), Some(x3)) = (ctx.g.partner(x1, c0), ctx.g.partner(x2, c0)) else {
            continue;
        };
        let ends = [x0, x1, x2, x3];
        if ends.iter().any(|x| used_v.contains(x)) || x0 == x3 {
            continue;
        }
        // x0 is in B and x3 in A: the P4 gadget runs from x3 to x0
        let mut uv = used_v.clone();
        uv.extend(ends);
        let mut uc = used_c.clone();
        uc.insert(d);
        if let Some(w) = ctx.p4_unit(x3, x0, c0, &uv, &uc) {
            let mut vs = w.vertices;
            vs.extend(ends);
            vs.sort();
            return Some(WitnessSet {
                vertices: vs,
                colours: w.colours,
            });
        }
    }
    None
}

fn p5(ctx: &Ctx, n: usize, alpha: f64) -> PropertyResult {
    let q = quota(alpha * n as f64 / 12.0);
    let tallies: Vec<Tally> = ctx
        .colours
        .par_iter()
        .map(|&c0| {
            let mut t = Tally::new();
            for &d in &ctx.colours {
                if d == c0 {
                    continue;
                }
                let fam = ctx.pack(q, |uv, uc| p5_unit(ctx, c0, d, uv, uc));
                t.add(fam.len() as u64, q, || {
                    let mut ex = Example::new();
                    ex.c0 = Some(c0);
                    ex.d = Some(d);
                    ex.sets = fam.clone();
                    ex
                });
            }
            t
        })
        .collect();
    tallies
        .into_iter()
        .fold(Tally::new(), Tally::merge)
        .finish("P5", q, None)
}

const SEARCH_BUDGET: usize = 2_000_000;

fn sample_colours(rng: &mut ChaCha8Rng, pool: &[usize], size: usize) -> Vec<usize> {
    let mut v = pool.to_vec();
    v.shuffle(rng);
    v.truncate(size);
    v.sort();
    v
}

fn p6(ctx: &Ctx, n: usize, alpha: f64, cfg: &AuditConfig) -> PropertyResult {
    let q = quota(alpha * n as f64);
    let kmax = 20.min(ctx.colours.len().saturating_sub(1) / 5);
    let tallies: Vec<Tally> = ctx
        .colours
        .par_iter()
        .map(|&c0| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c0 as u64);
            let others: Vec<usize> = ctx.colours.iter().copied().filter(|&c| c != c0).collect();
            let mut t = Tally::new();
            for k in 0..=kmax {
                // a witness for a set also serves every superset, so the
                // smallest admissible size is the hardest case
                let samples = if k == 0 { 1 } else { cfg.samples };
                for _ in 0..samples {
                    let cbar = sample_colours(&mut rng, &others, 5 * k);
                    let pool: BTreeSet<usize> = cbar.iter().copied().collect();
                    let fam = ctx.pack(q, |uv, _| {
                        let mut budget = SEARCH_BUDGET;
                        ctx.alt_path(c0, &pool, k, uv, &mut budget)
                    });
                    t.add(fam.len() as u64, q, || {
                        let mut ex = Example::new();
                        ex.c0 = Some(c0);
                        ex.k = Some(k);
                        ex.cbar = cbar.clone();
                        ex.sets = fam.clone();
                        ex
                    });
                }
            }
            t
        })
        .collect();
    let note = (kmax < 20).then(|| format!("k limited to {kmax} by the colour count"));
    tallies
        .into_iter()
        .fold(Tally::new(), Tally::merge)
        .finish("P6", q, note)
}

/// Largest `k <= 100` with `k (k + 1) <= |C| - 1`: enough colours for
/// `k + 1` disjoint `k`-sets, so every `k`-set misses one of them.
pub fn p7_k(colour_count: usize) -> usize {
    let mut k = 0;
    while k < P7_K && (k + 1) * (k + 2) < colour_count {
        k += 1;
    }
    k
}

fn p7(ctx: &Ctx, n: usize, alpha: f64, cfg: &AuditConfig) -> PropertyResult {
    let q_sets = quota(alpha * n as f64);
    let q_index = quota(alpha * alpha * n as f64);
    let k = p7_k(ctx.colours.len());
    let note = (k < P7_K).then(|| format!("k clipped from {P7_K} to {k}"));
    let tallies: Vec<Tally> = ctx
        .colours
        .par_iter()
        .map(|&c0| {
            let others: BTreeSet<usize> =
                ctx.colours.iter().copied().filter(|&c| c != c0).collect();
            let others_v: Vec<usize> = others.iter().copied().collect();
            // fixed family of disjoint (V_i, C_i); keep going to maximality
            let full = Ctx {
                g: ctx.g,
                colours: ctx.colours.clone(),
                greedy: false,
            };
            let units = full.pack(0, |uv, uc| {
                let pool: BTreeSet<usize> = others.difference(uc).copied().collect();
                let mut budget = SEARCH_BUDGET;
                if k < 2 {
                    return None;
                }
                full.cycle_cover(c0, &pool, k, uv, &mut budget)
            });
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9);
            rng.set_stream(c0 as u64);
            let mut t = Tally::new();
            for s in 0..cfg.samples.max(1) {
                let size = s % (k + 1);
                let cbar = sample_colours(&mut rng, &others_v, size);
                let mut good = 0u64;
                let mut first_family = Vec::new();
                for unit in &units {
                    if unit.colours.iter().any(|c| cbar.contains(c)) {
                        continue;
                    }
                    let pool: BTreeSet<usize> = cbar.iter().chain(&unit.colours).copied().collect();
                    let fam = ctx.pack(q_sets, |uv, _| {
                        let mut budget = SEARCH_BUDGET;
                        let mut vs = ctx.exact_cover(c0, &pool, uv, false, &mut budget)?;
                        vs.sort();
                        Some(WitnessSet {
                            vertices: vs,
                            colours: pool.iter().copied().collect(),
                        })
                    });
                    if fam.len() as u64 >= q_sets {
                        good += 1;
                        if first_family.is_empty() {
                            first_family = fam;
                        }
                    }
                    if ctx.greedy && good >= q_index {
                        break;
                    }
                }
                t.add(good, q_index, || {
                    let mut ex = Example::new();
                    ex.c0 = Some(c0);
                    ex.k = Some(k);
                    ex.cbar = cbar.clone();
                    ex.sets = units.clone();
                    ex.sets.extend(first_family.iter().cloned());
                    ex
                });
            }
            t
        })
        .collect();
    tallies
        .into_iter()
        .fold(Tally::new(), Tally::merge)
        .finish("P7", q_index, note)
}

/// Audits P1..P7 at the configured `alpha`.
///
/// P1 and P2 are exact. P3 counts disjoint 4-cycle pairs per colour class.
/// P4..P7 greedily pack disjoint witness structures and compare the packing
/// size with the quota; a shortfall is a failure of the packing, not a
/// proof that the property fails. P6 and P7 sample their colour sets.
pub fn audit_pseudorandom(
    g: &ColouredBipartiteGraph,
    n: usize,
    p: f64,
    epsilon: f64,
    cfg: &AuditConfig,
) -> Result<PseudorandomAudit> {
    if cfg.mode == AuditMode::Exact && cfg.properties.contains(&3) && n > cfg.exact_cap {
        return Err(Error::Cap {
            what: "n for exact P3 counting".into(),
            got: n,
            cap: cfg.exact_cap,
        });
    }
    let ctx = Ctx {
        g,
        colours: g.colours(),
        greedy: cfg.mode == AuditMode::Greedy,
    };
    let floor = (1.0 - epsilon) * p * n as f64;
    let colour_floor = ctx
        .colours
        .iter()
        .all(|&c| g.colour_class_size(c) as f64 >= floor - 1e-9);
    let mut properties = Vec::new();
    for &i in &cfg.properties {
        let r = match i {
            1 => {
                let cc = ctx.colours.len();
                let ok = g.a_size() == n
                    && g.b_size() == n
                    && cc >= n
                    && cc as f64 <= (1.0 + epsilon) * n as f64;
                PropertyResult {
                    name: "P1".into(),
                    holds: ok,
                    instances: 1,
                    failures: u64::from(!ok),
                    quota: 1,
                    min_found: u64::from(ok),
                    note: Some(format!("|A|={}, |B|={}, |C|={cc}", g.a_size(), g.b_size())),
                    example: None,
                }
            }
            2 => {
                let rep = check_typical(&build_hypergraph(g), n, p, epsilon);
                PropertyResult {
                    name: "P2".into(),
                    holds: rep.typical,
                    instances: 3,
                    failures: rep.violations.len() as u64,
                    quota: 0,
                    min_found: 0,
                    note: rep
                        .violations
                        .first()
                        .map(|v| format!("{} {} violation", v.projection, v.kind)),
                    example: None,
                }
            }
            3 => p3(&ctx, n, cfg.alpha),
            4 => p4(&ctx, n, cfg.alpha),
            5 => p5(&ctx, n, cfg.alpha),
            6 => p6(&ctx, n, cfg.alpha, cfg),
            7 => p7(&ctx, n, cfg.alpha, cfg),
            other => return Err(Error::invalid(format!("no property P{other}"))),
        };
        properties.push(r);
    }
    let passed = colour_floor && properties.iter().all(|r| r.holds);
    Ok(PseudorandomAudit {
        n,
        p,
        epsilon,
        alpha: cfg.alpha,
        mode: cfg.mode,
        colour_floor,
        properties,
        passed,
    })
}

/// Independent re-check of a witness set from a P4..P7 example; `c0`, `d`,
/// `u`, `v`, `cbar` come from the example.
pub fn check_witness(
    g: &ColouredBipartiteGraph,
    property: &str,
    ex: &Example,
    w: &WitnessSet,
) -> bool {
    use crate::graph::find_exactly_rainbow;
    let vs: BTreeSet<Vertex> = w.vertices.iter().copied().collect();
    let cs: BTreeSet<usize> = w.colours.iter().copied().collect();
    let Some(c0) = ex.c0 else { return false };
    let inside_c0 = g
        .colour_class(c0)
        .filter(|e| vs.contains(&Vertex::A(e.a)) && vs.contains(&Vertex::B(e.b)))
        .count();
    if cs.contains(&c0) || vs.len() != w.vertices.len() {
        return false;
    }
    match property {
        "P4" => {
            let (Some(u), Some(v)) = (ex.u, ex.v) else {
                return false;
            };
            let uv_edge: Vec<Edge> = g.edge_between(u, v).into_iter().collect();
            let mut all = vs.clone();
            all.insert(u);
            all.insert(v);
            vs.len() == 4
                && cs.len() == 3
                && !vs.contains(&u)
                && !vs.contains(&v)
                && inside_c0 >= 2
                && find_exactly_rainbow(g, &all, &cs, &uv_edge).is_some()
        }
        "P5" => {
            let Some(d) = ex.d else { return false };
            let mut with_d = cs.clone();
            with_d.insert(d);
            vs.len() == 8
                && cs.len() == 3
                && !cs.contains(&d)
                && inside_c0 >= 4
                && find_exactly_rainbow(g, &vs, &with_d, &[]).is_some()
        }
        "P6" | "P7" => {
            let k = w.colours.len();
            let pool_ok = property == "P7" || w.colours.iter().all(|c| ex.cbar.contains(c));
            // perfect c0 matching (cycle units) or c0 matching plus two
            // leftover vertices (path units)
            let c0_ok = inside_c0 * 2 == vs.len() && (vs.len() == 2 * k || vs.len() == 2 * k + 2);
            if !pool_ok || !c0_ok {
                return false;
            }
            // a rainbow matching on exactly these colours inside the set
            let sides = |keep: &dyn Fn(&Vertex) -> bool| -> BTreeSet<Vertex> {
                vs.iter().copied().filter(|v| keep(v)).collect()
            };
            if vs.len() == 2 * k {
                return find_exactly_rainbow(g, &vs, &cs, &[]).is_some();
            }
            // drop one A and one B vertex and look for an exact matching
            let a_v = sides(&|v| other_side(*v));
            let b_v = sides(&|v| !other_side(*v));
            a_v.iter().any(|&x| {
                b_v.iter().any(|&y| {
                    let mut s = vs.clone();
                    s.remove(&x);
                    s.remove(&y);
                    find_exactly_rainbow(g, &s, &cs, &[]).is_some()
                })
            })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cyclic_graph;

    #[test]
    fn hypergraph_of_z3() {
        let g = cyclic_graph(3);
        let h = build_hypergraph(&g);
        assert_eq!(h.triples.len(), 9);
        for d in h.degrees() {
            assert!(d.iter().all(|&x| x == 3));
        }
        let empty = ColouredBipartiteGraph::new(0, 0, vec![]).unwrap();
        assert!(build_hypergraph(&empty).triples.is_empty());
        assert!(TripartiteHypergraph::new(2, 2, 2, vec![[0, 0, 0], [0, 0, 1]]).is_err());
    }

    #[test]
    fn group_tables_are_typical() {
        for n in [3, 5, 8] {
            let h = build_hypergraph(&cyclic_graph(n));
            assert!(check_typical(&h, n, 1.0, 0.0).typical);
        }
        let h = build_hypergraph(&cyclic_graph(5));
        let r = check_typical(&h, 5, 0.5, 0.1);
        assert!(!r.typical);
        assert!(r.violations.iter().any(|v| v.kind == "degree"));
    }

    #[test]
    fn p7_clip() {
        assert_eq!(p7_k(7), 2);
        assert_eq!(p7_k(12), 2);
        assert_eq!(p7_k(13), 3);
        assert_eq!(p7_k(100_000), 100);
    }

    #[test]
    fn odd_cyclic_tables_pass_and_witnesses_check() {
        for n in [7, 9] {
            let g = cyclic_graph(n);
            let cfg = AuditConfig::new(1e-4);
            let a = audit_pseudorandom(&g, n, 1.0, 0.5, &cfg).unwrap();
            for r in &a.properties {
                assert!(r.holds, "{r:?}");
            }
            assert!(a.passed);
            for r in &a.properties {
                if let Some(ex) = &r.example {
                    for w in &ex.sets {
                        if r.name != "P3" {
                            assert!(check_witness(&g, &r.name, ex, w), "{} {w:?}", r.name);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rare_colour_fails_floor() {
        // colour 5 used once in an otherwise cyclic 5x5 array minus edges
        let mut edges: Vec<Edge> = cyclic_graph(5).edges().to_vec();
        edges.retain(|e| e.colour != 4 || e.a == 0);
        edges
            .iter_mut()
            .filter(|e| e.colour == 4)
            .for_each(|e| e.colour = 5);
        let g = ColouredBipartiteGraph::new(5, 5, edges).unwrap();
        let cfg = AuditConfig {
            properties: vec![1],
            ..AuditConfig::new(1e-4)
        };
        let a = audit_pseudorandom(&g, 5, 1.0, 0.5, &cfg).unwrap();
        assert!(!a.colour_floor);
        assert!(!a.passed);
    }

    #[test]
    fn exact_mode_cap() {
        let g = cyclic_graph(13);
        let cfg = AuditConfig {
            mode: AuditMode::Exact,
            ..AuditConfig::new(1e-4)
        };
        assert!(matches!(
            audit_pseudorandom(&g, 13, 1.0, 0.5, &cfg),
            Err(Error::Cap { .. })
        ));
    }
}
