//! Colour switchers: pairs of rainbow matchings on the same vertex set whose
//! colour sets differ in one colour, built from pairs of rainbow 4-cycles.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ColouredBipartiteGraph, Edge, RainbowMatching, Vertex};

/// A rainbow 4-cycle `a0 b0 a1 b1`. Its two perfect matchings are
/// `{a0b0, a1b1}` and `{a0b1, a1b0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle4 {
    pub a: [usize; 2],
    pub b: [usize; 2],
    /// Colours of `a0b0, a0b1, a1b0, a1b1`.
    pub colours: [usize; 4],
}

impl Cycle4 {
    pub fn matchings(&self) -> [[Edge; 2]; 2] {
        let [a0, a1] = self.a;
        let [b0, b1] = self.b;
        let c = self.colours;
        [
            [Edge::new(a0, b0, c[0]), Edge::new(a1, b1, c[3])],
            [Edge::new(a0, b1, c[1]), Edge::new(a1, b0, c[2])],
        ]
    }

    /// The matching containing colour `c`, then the other one.
    fn split(&self, c: usize) -> ([Edge; 2], [Edge; 2]) {
        let [p, q] = self.matchings();
        if p.iter().any(|e| e.colour == c) {
            (p, q)
        } else {
            (q, p)
        }
    }

    /// Colour of the edge opposite the colour-`c` edge.
    fn opposite(&self, c: usize) -> usize {
        let (x, _) = self.split(c);
        if x[0].colour == c {
            x[1].colour
        } else {
            x[0].colour
        }
    }

    fn disjoint(&self, o: &Cycle4) -> bool {
        self.a.iter().all(|x| !o.a.contains(x)) && self.b.iter().all(|x| !o.b.contains(x))
    }

    pub fn vertices(&self) -> [Vertex; 4] {
        [
            Vertex::A(self.a[0]),
            Vertex::A(self.a[1]),
            Vertex::B(self.b[0]),
            Vertex::B(self.b[1]),
        ]
    }

    fn sorted_colours(&self) -> [usize; 4] {
        let mut c = self.colours;
        c.sort();
        c
    }
}

/// All rainbow 4-cycles, each listed once with `a0 < a1` and `b0 < b1`.
pub fn rainbow_cycles(g: &ColouredBipartiteGraph) -> Vec<Cycle4> {
    let mut out = Vec::new();
    for a0 in 0..g.a_size() {
        for a1 in a0 + 1..g.a_size() {
            let n1 = g.neighbours_a(a0);
            for (i, &(c00, b0)) in n1.iter().enumerate() {
                let Some(c10) = g.colour(a1, b0) else {
                    continue;
                };
                for &(c01, b1) in &n1[i + 1..] {
                    let Some(c11) = g.colour(a1, b1) else {
                        continue;
                    };
                    let (lo, hi) = if b0 < b1 { (b0, b1) } else { (b1, b0) };
                    let colours = if b0 < b1 {
                        [c00, c01, c10, c11]
                    } else {
                        [c01, c00, c11, c10]
                    };
                    let mut s = colours;
                    s.sort();
                    if s.windows(2).all(|w| w[0] != w[1]) {
                        out.push(Cycle4 {
                            a: [a0, a1],
                            b: [lo, hi],
                            colours,
                        });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// A `c,d`-switcher: rainbow matchings `m1`, `m2` on one vertex set with
/// `C(m1) - {c} = C(m2) - {d}`, whose union is a disjoint union of
/// rainbow 4-cycles. Order is `|m1|`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ColourSwitcher {
    pub m1: Vec<Edge>,
    pub m2: Vec<Edge>,
    pub switch_from: usize,
    pub switch_to: usize,
}

impl ColourSwitcher {
    pub fn order(&self) -> usize {
        self.m1.len()
    }

    /// `C(S) = C(m1) - {c}`.
    pub fn colour_set(&self) -> BTreeSet<usize> {
        self.m1
            .iter()
            .map(|e| e.colour)
            .filter(|&c| c != self.switch_from)
            .collect()
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.m1
            .iter()
            .flat_map(|e| [Vertex::A(e.a), Vertex::B(e.b)])
            .collect()
    }

    /// Swaps the roles of the two matchings.
    pub fn reversed(&self) -> ColourSwitcher {
        ColourSwitcher {
            m1: self.m2.clone(),
            m2: self.m1.clone(),
            switch_from: self.switch_to,
            switch_to: self.switch_from,
        }
    }

    /// Checks every defining condition from scratch against `g`.
    pub fn validate(&self, g: &ColouredBipartiteGraph) -> Result<()> {
        let (c, d) = (self.switch_from, self.switch_to);
        if c == d {
            return Err(Error::invalid("switch colours coincide"));
        }
        let m1 = RainbowMatching::new(g, self.m1.clone())?;
        let m2 = RainbowMatching::new(g, self.m2.clone())?;
        if m1.vertices() != m2.vertices() {
            return Err(Error::invalid("matchings cover different vertices"));
        }
        let (c1, c2) = (m1.colours(), m2.colours());
        if !c1.contains(&c) || !c2.contains(&d) {
            return Err(Error::invalid("switch colours missing"));
        }
        let r1: BTreeSet<_> = c1.iter().copied().filter(|&x| x != c).collect();
        let r2: BTreeSet<_> = c2.iter().copied().filter(|&x| x != d).collect();
        if r1 != r2 {
            return Err(Error::invalid("colour sets differ beyond the switch"));
        }
        if self.m1.iter().any(|e| self.m2.contains(e)) {
            return Err(Error::invalid("matchings share an edge"));
        }
        union_is_rainbow_c4s(&self.m1, &self.m2)
    }
}

fn union_is_rainbow_c4s(m1: &[Edge], m2: &[Edge]) -> Result<()> {
    // with both matchings perfect on the same set, every component of the
    // union is an alternating cycle; each must have length 4 and be rainbow
    let mut at: HashMap<Vertex, Vec<Edge>> = HashMap::new();
    for e in m1.iter().chain(m2) {
        at.entry(Vertex::A(e.a)).or_default().push(*e);
        at.entry(Vertex::B(e.b)).or_default().push(*e);
    }
    for e in m1 {
        let f = at[&Vertex::A(e.a)].iter().find(|x| *x != e).copied();
        let h = at[&Vertex::B(e.b)].iter().find(|x| *x != e).copied();
        let (Some(f), Some(h)) = (f, h) else {
            return Err(Error::invalid("union is not 2-regular"));
        };
        let Some(&back) = at[&Vertex::B(f.b)].iter().find(|x| **x != f) else {
            return Err(Error::invalid("union is not 2-regular"));
        };
        if back.a != h.a {
            return Err(Error::invalid("union has a cycle longer than 4"));
        }
        let cols: BTreeSet<_> = [e.colour, f.colour, h.colour, back.colour].into();
        if cols.len() != 4 {
            return Err(Error::invalid("4-cycle is not rainbow"));
        }
    }
    Ok(())
}

/// An order-4 switcher object `(M1, M2)` as counted by the overlap bounds.
/// `roles` are the colours `c` for which it is a `c,d`-switcher; null
/// switchers (equal colour sets) have four roles.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Object {
    m1: [Edge; 4],
    m2: [Edge; 4],
    from: Option<(usize, usize)>,
}

/// All order-4 switchers of a graph, indexed for lookup.
#[derive(Debug, Clone)]
pub struct SwitcherIndex {
    cycles: Vec<Cycle4>,
    objects: Vec<Object>,
    by_from: BTreeMap<usize, Vec<usize>>,
    pairs_sharing_three: usize,
}

impl SwitcherIndex {
    /// Joins rainbow 4-cycles sharing three colours through a hash on
    /// colour triples, then keeps the pairs whose colours opposite the
    /// switch colours agree.
    pub fn build(g: &ColouredBipartiteGraph) -> Self {
        let cycles = rainbow_cycles(g);
        let mut triples: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
        let mut quads: HashMap<[usize; 4], Vec<usize>> = HashMap::new();
        for (i, cy) in cycles.iter().enumerate() {
            let s = cy.sorted_colours();
            quads.entry(s).or_default().push(i);
            for skip in 0..4 {
                let mut t = [0; 3];
                let mut k = 0;
                for (j, &c) in s.iter().enumerate() {
                    if j != skip {
                        t[k] = c;
                        k += 1;
                    }
                }
                triples.entry(t).or_default().push((i, s[skip]));
            }
        }
        let mut objects = Vec::new();
        let mut pairs_sharing_three = 0;
        let mut keys: Vec<_> = triples.keys().copied().collect();
        keys.sort();
        for key in keys {
            let list = &triples[&key];
            for (x, &(i, c)) in list.iter().enumerate() {
                for &(j, d) in &list[x + 1..] {
                    if c == d {
                        continue;
                    }
                    let (s1, s2) = (&cycles[i], &cycles[j]);
                    if !s1.disjoint(s2) {
                        continue;
                    }
                    pairs_sharing_three += 1;
                    if s1.opposite(c) != s2.opposite(d) {
                        continue;
                    }
                    let (x1, y1) = s1.split(c);
                    let (y2, x2) = s2.split(d);
                    let m1 = [x1[0], x1[1], x2[0], x2[1]];
                    let m2 = [y1[0], y1[1], y2[0], y2[1]];
                    objects.push(Object {
                        m1,
                        m2,
                        from: Some((c, d)),
                    });
                    objects.push(Object {
                        m1: m2,
                        m2: m1,
                        from: Some((d, c)),
                    });
                }
            }
        }
        let mut qkeys: Vec<_> = quads.keys().copied().collect();
        qkeys.sort();
        for key in qkeys {
            let list = &quads[&key];
            for (x, &i) in list.iter().enumerate() {
                for &j in &list[x + 1..] {
                    let (s1, s2) = (&cycles[i], &cycles[j]);
                    if !s1.disjoint(s2) {
                        continue;
                    }
                    let [p1, q1] = s1.matchings();
                    let (first, second) = s2.split(p1[0].colour);
                    let pc: BTreeSet<_> = [p1[0].colour, p1[1].colour].into();
                    let fc: BTreeSet<_> = [first[0].colour, first[1].colour].into();
                    if pc != fc {
                        continue;
                    }
                    // equal pairings: M1 = P1 + the S2 matching coloured like Q1
                    let m1 = [p1[0], p1[1], second[0], second[1]];
                    let m2 = [q1[0], q1[1], first[0], first[1]];
                    objects.push(Object { m1, m2, from: None });
                    objects.push(Object {
                        m1: m2,
                        m2: m1,
                        from: None,
                    });
                }
            }
        }
        for o in &mut objects {
            o.m1.sort();
            o.m2.sort();
        }
        objects.sort_by_key(|x| (x.m1, x.m2));
        let mut by_from: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, o) in objects.iter().enumerate() {
            if let Some((c, _)) = o.from {
                by_from.entry(c).or_default().push(i);
            }
        }
        SwitcherIndex {
            cycles,
            objects,
            by_from,
            pairs_sharing_three,
        }
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Unordered pairs of disjoint rainbow 4-cycles sharing exactly 3 colours.
    pub fn pairs_sharing_three(&self) -> usize {
        self.pairs_sharing_three
    }

    /// Number of order-4 switchers with `c != d`, counting `(M1, M2)` and
    /// `(M2, M1)` separately.
    pub fn proper_count(&self) -> usize {
        self.objects.iter().filter(|o| o.from.is_some()).count()
    }

    /// Number of ordered null pairs `(M1, M2)` with `C(M1) = C(M2)`.
    pub fn null_count(&self) -> usize {
        self.objects.iter().filter(|o| o.from.is_none()).count()
    }

    fn to_switcher(o: &Object) -> ColourSwitcher {
        let (c, d) = o.from.expect("proper switcher");
        ColourSwitcher {
            m1: o.m1.to_vec(),
            m2: o.m2.to_vec(),
            switch_from: c,
            switch_to: d,
        }
    }

    /// All order-4 `c,d`-switchers in lexicographic order.
    pub fn switchers(&self, c: usize, d: usize) -> Vec<ColourSwitcher> {
        self.from_colour(c).filter(|s| s.switch_to == d).collect()
    }

    /// All order-4 switchers that switch `c` out.
    pub fn from_colour(&self, c: usize) -> impl Iterator<Item = ColourSwitcher> + '_ {
        self.by_from
            .get(&c)
            .into_iter()
            .flatten()
            .map(move |&i| Self::to_switcher(&self.objects[i]))
    }

    /// Null pairs as `(m1, m2)`.
    pub fn null_pairs(&self) -> Vec<(Vec<Edge>, Vec<Edge>)> {
        self.objects
            .iter()
            .filter(|o| o.from.is_none())
            .map(|o| (o.m1.to_vec(), o.m2.to_vec()))
            .collect()
    }

    pub fn weights(&self) -> SwitcherWeights {
        let mut w = BTreeMap::new();
        for o in &self.objects {
            if let Some((c, d)) = o.from {
                if c < d {
                    *w.entry((c, d)).or_insert(0) += 1;
                }
            }
        }
        SwitcherWeights { weights: w }
    }

    /// Exact maxima for the five overlap bounds over every instance.
    pub fn bounds(&self, n: usize) -> BoundReport {
        let mut i_map: HashMap<(usize, usize), u64> = HashMap::new();
        let mut ii_map: HashMap<(usize, Vertex), u64> = HashMap::new();
        let mut iii_map: HashMap<(Edge, Edge, usize), u64> = HashMap::new();
        let mut iv_map: HashMap<(Edge, Edge, Vertex), u64> = HashMap::new();
        let mut v_map: HashMap<Edge, u64> = HashMap::new();
        for o in &self.objects {
            let cols: BTreeSet<usize> = o.m1.iter().map(|e| e.colour).collect();
            let roles: Vec<usize> = match o.from {
                Some((c, _)) => vec![c],
                None => cols.iter().copied().collect(),
            };
            let verts: BTreeSet<Vertex> =
                o.m1.iter()
                    .flat_map(|e| [Vertex::A(e.a), Vertex::B(e.b)])
                    .collect();
            for &c in &roles {
                for &c2 in &cols {
                    if c2 != c {
                        *i_map.entry((c, c2)).or_default() += 1;
                    }
                }
                for &v in &verts {
                    *ii_map.entry((c, v)).or_default() += 1;
                }
            }
            let union: Vec<Edge> = o.m1.iter().chain(&o.m2).copied().collect();
            let ucols: BTreeSet<usize> = union.iter().map(|e| e.colour).collect();
            for e in &union {
                *v_map.entry(*e).or_default() += 1;
            }
            for (x, e) in union.iter().enumerate() {
                for f in &union[x + 1..] {
                    if e.colour != f.colour {
                        continue;
                    }
                    let (e, f) = if e < f { (*e, *f) } else { (*f, *e) };
                    for &c2 in &ucols {
                        if c2 != e.colour {
                            *iii_map.entry((e, f, c2)).or_default() += 1;
                        }
                    }
                    for &v in &verts {
                        let touches = |x: &Edge| v == Vertex::A(x.a) || v == Vertex::B(x.b);
                        if !touches(&e) && !touches(&f) {
                            *iv_map.entry((e, f, v)).or_default() += 1;
                        }
                    }
                }
            }
        }
        let n3 = (n as u64).pow(3);
        let mk = |label: &str, max: u64, bound: u64, instances: usize| BoundLine {
            label: label.to_string(),
            instances,
            max_count: max,
            bound,
            ratio: if bound == 0 {
                0.0
            } else {
                max as f64 / bound as f64
            },
            holds: max <= bound,
        };
        let mx = |it: &mut dyn Iterator<Item = u64>| it.max().unwrap_or(0);
        let lines = vec![
            mk("i", mx(&mut i_map.values().copied()), 20 * n3, i_map.len()),
            mk(
                "ii",
                mx(&mut ii_map.values().copied()),
                50 * n3,
                ii_map.len(),
            ),
            mk(
                "iii",
                mx(&mut iii_map.values().copied()),
                1000 * n as u64,
                iii_map.len(),
            ),
            mk(
                "iv",
                mx(&mut iv_map.values().copied()),
                600 * n as u64,
                iv_map.len(),
            ),
            mk("v", mx(&mut v_map.values().copied()), 100 * n3, v_map.len()),
        ];
        BoundReport {
            n,
            switchers: self.objects.len(),
            holds: lines.iter().all(|l| l.holds),
            lines,
        }
    }
}

/// Symmetric switcher weights `w_cd` for `c < d`; absent pairs weigh zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SwitcherWeights {
    pub weights: BTreeMap<(usize, usize), u64>,
}

impl SwitcherWeights {
    pub fn get(&self, c: usize, d: usize) -> u64 {
        let key = if c < d { (c, d) } else { (d, c) };
        self.weights.get(&key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.weights.values().sum()
    }

    /// Nonzero weights sorted ascending.
    pub fn nonzero(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.weights.values().copied().filter(|&w| w > 0).collect();
        v.sort();
        v
    }
}

/// Order-4 `c,d`-switchers of `g`, in lexicographic order.
pub fn enumerate_switchers4(g: &ColouredBipartiteGraph, c: usize, d: usize) -> Vec<ColourSwitcher> {
    if c == d {
        return Vec::new();
    }
    SwitcherIndex::build(g).switchers(c, d)
}

pub fn weight_matrix(g: &ColouredBipartiteGraph) -> SwitcherWeights {
    SwitcherIndex::build(g).weights()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundLine {
    pub label: String,
    /// Number of distinct instances (colour pairs, edge pairs, ...) seen.
    pub instances: usize,
    pub max_count: u64,
    pub bound: u64,
    pub ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub switchers: usize,
    pub holds: bool,
    pub lines: Vec<BoundLine>,
}

/// Checks the five overlap bounds with `n = |A| + |B|`, exactly over all
/// instances that occur.
pub fn check_count_bounds(g: &ColouredBipartiteGraph) -> BoundReport {
    SwitcherIndex::build(g).bounds(g.vertex_count())
}

/// Joins an `a,b`-switcher and a `b,c`-switcher into an `a,c`-switcher.
pub fn compose_switchers(s_ab: &ColourSwitcher, s_bc: &ColourSwitcher) -> Result<ColourSwitcher> {
    let (a, b) = (s_ab.switch_from, s_ab.switch_to);
    if s_bc.switch_from != b {
        return Err(Error::invalid(format!(
            "pivot mismatch: first switches to {b}, second switches from {}",
            s_bc.switch_from
        )));
    }
    let c = s_bc.switch_to;
    if a == b || b == c {
        return Err(Error::invalid("degenerate switcher"));
    }
    if a == c {
        return Err(Error::invalid("composite would switch a colour to itself"));
    }
    if let Some(v) = s_ab.vertices().intersection(&s_bc.vertices()).next() {
        return Err(Error::invalid(format!("shared vertex {v:?}")));
    }
    let mut k1 = s_ab.colour_set();
    k1.extend([a, b]);
    let mut k2 = s_bc.colour_set();
    k2.extend([b, c]);
    if let Some(x) = k1.intersection(&k2).find(|&&x| x != b) {
        return Err(Error::invalid(format!("shared colour {x}")));
    }
    let mut m1: Vec<Edge> = s_ab.m1.iter().chain(&s_bc.m1).copied().collect();
    let mut m2: Vec<Edge> = s_ab.m2.iter().chain(&s_bc.m2).copied().collect();
    m1.sort();
    m2.sort();
    Ok(ColourSwitcher {
        m1,
        m2,
        switch_from: a,
        switch_to: c,
    })
}

/// Replaces `s.m1` inside `m` by `s.m2`.
pub fn apply_switcher(m: &RainbowMatching, s: &ColourSwitcher) -> Result<RainbowMatching> {
    if !s.m1.iter().all(|e| m.edges().contains(e)) {
        return Err(Error::invalid("switcher matching is not contained in m"));
    }
    if m.colours().contains(&s.switch_to) {
        return Err(Error::invalid(format!(
            "colour {} already used by m",
            s.switch_to
        )));
    }
    let mut out: Vec<Edge> = m
        .edges()
        .iter()
        .copied()
        .filter(|e| !s.m1.contains(e))
        .collect();
    out.extend(&s.m2);
    Ok(RainbowMatching::unchecked(out))
}

/// Searches for a `c,d`-switcher avoiding `forbidden_v` and `forbidden_c`,
/// first of order 4 and then as a chain of up to `max_order / 4`
/// order-4 switchers through pivot colours. Deterministic; at most
/// `node_cap` partial chains are tried per chain length.
pub fn find_switcher(
    index: &SwitcherIndex,
    c: usize,
    d: usize,
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
    max_order: usize,
) -> Option<ColourSwitcher> {
    find_switcher_capped(index, c, d, forbidden_v, forbidden_c, max_order, 200_000)
}

pub fn find_switcher_capped(
    index: &SwitcherIndex,
    c: usize,
    d: usize,
    forbidden_v: &BTreeSet<Vertex>,
    forbidden_c: &BTreeSet<usize>,
    max_order: usize,
    node_cap: usize,
) -> Option<ColourSwitcher> {
    if c == d || forbidden_c.contains(&c) || forbidden_c.contains(&d) {
        return None;
    }
    // iterative deepening keeps the order minimal
    for links in 1..=max_order / 4 {
        let mut used_c = forbidden_c.clone();
        used_c.insert(c);
        let mut chain = Vec::new();
        let mut budget = node_cap;
        let mut st = ChainSearch {
            index,
            target: d,
            chain: &mut chain,
            budget: &mut budget,
        };
        if st.extend(c, links, forbidden_v.clone(), used_c) {
            let mut it = chain.into_iter();
            let mut acc = it.next().expect("nonempty chain");
            for s in it {
                acc = compose_switchers(&acc, &s).expect("chain built disjoint");
            }
            return Some(acc);
        }
    }
    None
}

struct ChainSearch<'a> {
    index: &'a SwitcherIndex,
    target: usize,
    chain: &'a mut Vec<ColourSwitcher>,
    budget: &'a mut usize,
}

impl ChainSearch<'_> {
    // used_c: forbidden colours, the start colour, pivots and every colour
    // set already committed
    fn extend(
        &mut self,
        from: usize,
        links: usize,
        used_v: BTreeSet<Vertex>,
        used_c: BTreeSet<usize>,
    ) -> bool {
        let index = self.index;
        for s in index.from_colour(from) {
            if *self.budget == 0 {
                return false;
            }
            *self.budget -= 1;
            let to = s.switch_to;
            if links == 1 && to != self.target {
                continue;
            }
            if links > 1 && (to == self.target || used_c.contains(&to)) {
                continue;
            }
            let cs = s.colour_set();
            if cs.contains(&self.target) || cs.iter().any(|x| used_c.contains(x)) {
                continue;
            }
            let vs = s.vertices();
            if vs.iter().any(|v| used_v.contains(v)) {
                continue;
            }
            let mut v2 = used_v.clone();
            v2.extend(vs);
            let mut c2 = used_c.clone();
            c2.extend(cs);
            c2.insert(to);
            self.chain.push(s);
            if links == 1 || self.extend(to, links - 1, v2, c2) {
                return true;
            }
            self.chain.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cyclic_graph, random_latin_square};
    use crate::graph::latin_to_graph;

    // brute force: ordered pairs of disjoint rainbow 4-cycles, every choice
    // of one matching from each, every (c, d), checked against the definition
    fn oracle_count(g: &ColouredBipartiteGraph) -> (BTreeMap<(usize, usize), u64>, u64) {
        let cycles = rainbow_cycles(g);
        let mut w: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut objects = BTreeSet::new();
        for s1 in &cycles {
            for s2 in &cycles {
                if !s1.disjoint(s2) {
                    continue;
                }
                for x1 in s1.matchings() {
                    for x2 in s2.matchings() {
                        let y1 = s1.matchings().into_iter().find(|m| *m != x1).unwrap();
                        let y2 = s2.matchings().into_iter().find(|m| *m != x2).unwrap();
                        let mut m1: Vec<Edge> = x1.iter().chain(&x2).copied().collect();
                        let mut m2: Vec<Edge> = y1.iter().chain(&y2).copied().collect();
                        m1.sort();
                        m2.sort();
                        for c in m1.iter().map(|e| e.colour) {
                            for d in m2.iter().map(|e| e.colour) {
                                if c == d {
                                    continue;
                                }
                                let s = ColourSwitcher {
                                    m1: m1.clone(),
                                    m2: m2.clone(),
                                    switch_from: c,
                                    switch_to: d,
                                };
                                if s.validate(g).is_ok() && objects.insert(s) {
                                    *w.entry((c.min(d), c.max(d))).or_default() += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        // each unordered {c,d} pair was counted from both orientations
        for v in w.values_mut() {
            *v /= 2;
        }
        (w, objects.len() as u64)
    }

    #[test]
    fn same_colour_pair_is_empty() {
        assert!(enumerate_switchers4(&cyclic_graph(5), 1, 1).is_empty());
    }

    #[test]
    fn group_tables_only_have_null_switchers() {
        for n in [4, 5, 6, 7] {
            let g = cyclic_graph(n);
            let idx = SwitcherIndex::build(&g);
            assert_eq!(idx.proper_count(), 0, "n={n}");
            assert!(idx.weights().weights.is_empty());
            assert_eq!(idx.null_count() > 0, n >= 5, "n={n}");
            for (m1, m2) in idx.null_pairs() {
                let c1: BTreeSet<_> = m1.iter().map(|e| e.colour).collect();
                let c2: BTreeSet<_> = m2.iter().map(|e| e.colour).collect();
                assert_eq!(c1, c2);
                // alternating sums around every 4-cycle vanish
                for e in &m1 {
                    let f = m2.iter().find(|f| f.a == e.a).unwrap();
                    let h = m2.iter().find(|h| h.b == e.b).unwrap();
                    let back = m1.iter().find(|x| x.a == h.a).unwrap();
                    let s = (e.colour + n - f.colour + back.colour + n - h.colour) % n;
                    assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn matches_oracle_on_random_squares() {
        for seed in 0..6 {
            let n = 5 + (seed as usize % 3);
            let g = latin_to_graph(&random_latin_square(n, seed, 300));
            let idx = SwitcherIndex::build(&g);
            let (w, objects) = oracle_count(&g);
            let mine = idx.weights();
            let w: BTreeMap<_, _> = w.into_iter().filter(|&(_, v)| v > 0).collect();
            assert_eq!(mine.weights, w, "seed {seed}");
            assert_eq!(idx.proper_count() as u64, objects);
            assert!(mine.total() <= 4 * idx.pairs_sharing_three() as u64);
            for (&(c, d), &v) in &w {
                let list = idx.switchers(c, d);
                assert_eq!(list.len() as u64, v);
                for s in list {
                    s.validate(&g).unwrap();
                }
                assert_eq!(idx.switchers(d, c).len() as u64, v);
            }
        }
    }

    #[test]
    fn validate_rejects_broken_switchers() {
        let g = latin_to_graph(&random_latin_square(7, 3, 400));
        let idx = SwitcherIndex::build(&g);
        let (&(c, d), _) = idx.weights().weights.iter().next().unwrap();
        let s = idx.switchers(c, d).remove(0);
        s.validate(&g).unwrap();
        s.reversed().validate(&g).unwrap();
        let mut bad = s.clone();
        bad.switch_to = bad.switch_from;
        assert!(bad.validate(&g).is_err());
        let mut bad = s.clone();
        bad.m2 = bad.m1.clone();
        assert!(bad.validate(&g).is_err());
    }

    #[test]
    fn apply_and_reverse() {
        let g = latin_to_graph(&random_latin_square(7, 5, 400));
        let idx = SwitcherIndex::build(&g);
        let (&(c, d), _) = idx.weights().weights.iter().next().unwrap();
        let s = idx.switchers(c, d).remove(0);
        let m = RainbowMatching::new(&g, s.m1.clone()).unwrap();
        let out = apply_switcher(&m, &s).unwrap();
        out.check_in(&g).unwrap();
        assert_eq!(out.vertices(), m.vertices());
        let back = apply_switcher(&out, &s.reversed()).unwrap();
        assert_eq!(back, m);
        let m_with_d = RainbowMatching::new(&g, s.m2.clone()).unwrap();
        assert!(apply_switcher(&m_with_d, &s).is_err());
    }

    #[test]
    fn bounds_on_empty_and_table() {
        let empty = ColouredBipartiteGraph::new(0, 0, vec![]).unwrap();
        let r = check_count_bounds(&empty);
        assert!(r.holds && r.lines.iter().all(|l| l.max_count == 0));
        assert!(check_count_bounds(&cyclic_graph(6)).holds);
    }
}
