use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::footprint_of;
use crate::error::{Error, Result};
use crate::graph::{ColouredBipartiteGraph, Edge, RainbowMatching, Vertex};

/// Longest alternating cycle (in `m_rb` edges) accepted in stage ii.
const MAX_CYCLE: usize = 12;
/// Stage-i candidate pairs tried before giving up.
const CANDIDATE_CAP: usize = 400_000;
/// Search nodes per stage-iii attempt.
const STAGE3_BUDGET: usize = 20_000;

/// Two disjoint matchings plus two spare vertices: `m_id` in colour `c0`
/// only, `m_rb` rainbow. `w_hat` is a B index and `z_hat` an A index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditionState {
    pub c0: usize,
    pub m_id: Vec<Edge>,
    pub m_rb: Vec<Edge>,
    pub w_hat: usize,
    pub z_hat: usize,
}

impl AdditionState {
    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        let mut vs = footprint_of(&self.m_id);
        vs.extend(footprint_of(&self.m_rb));
        vs.insert(Vertex::B(self.w_hat));
        vs.insert(Vertex::A(self.z_hat));
        vs
    }

    /// `C(m_rb)`.
    pub fn colours(&self) -> BTreeSet<usize> {
        self.m_rb.iter().map(|e| e.colour).collect()
    }

    /// Checks the state invariants against `g`.
    pub fn check(&self, g: &ColouredBipartiteGraph) -> Result<()> {
        if self.m_id.iter().any(|e| e.colour != self.c0) {
            return Err(Error::invalid("m_id has an edge outside colour c0"));
        }
        let rb = RainbowMatching::new(g, self.m_rb.clone())?;
        if rb.colours().contains(&self.c0) {
            return Err(Error::invalid("c0 appears in m_rb"));
        }
        for e in &self.m_id {
            if !g.has_edge(e) {
                return Err(Error::invalid(format!("{e:?} not in host")));
            }
        }
        let (id, rbv) = (footprint_of(&self.m_id), rb.vertices());
        if id.len() != 2 * self.m_id.len() {
            return Err(Error::invalid("m_id is not a matching"));
        }
        if id.intersection(&rbv).next().is_some() {
            return Err(Error::invalid("m_id and m_rb share a vertex"));
        }
        let spare = [Vertex::B(self.w_hat), Vertex::A(self.z_hat)];
        if spare.iter().any(|v| id.contains(v) || rbv.contains(v)) {
            return Err(Error::invalid("remainder vertex lies on a matching"));
        }
        Ok(())
    }

    /// A starting state for demonstrations: `rb_len / 2` pairs of `m_rb`
    /// edges that close into 4-cycles with two colour-`c0` edges,
    /// `id_len` colour-`c0` edges, and two spare vertices. Greedy over a
    /// seeded vertex order.
    pub fn demo(
        g: &ColouredBipartiteGraph,
        c0: usize,
        id_len: usize,
        rb_len: usize,
        seed: u64,
    ) -> Result<Self> {
        if !rb_len.is_multiple_of(2) {
            return Err(Error::invalid("rb_len must be even"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order_a: Vec<usize> = (0..g.a_size()).collect();
        let mut order_b: Vec<usize> = (0..g.b_size()).collect();
        order_a.shuffle(&mut rng);
        order_b.shuffle(&mut rng);
        let mut used: BTreeSet<Vertex> = BTreeSet::new();
        let mut used_c: BTreeSet<usize> = [c0].into();
        let mut m_rb = Vec::new();
        'outer: for &a in &order_a {
            if m_rb.len() == rb_len {
                break;
            }
            if used.contains(&Vertex::A(a)) {
                continue;
            }
            let Some(b2) = g.partner_of_a(a, c0) else {
                continue;
            };
            for &b in &order_b {
                if b == b2 || used.contains(&Vertex::B(b)) || used.contains(&Vertex::B(b2)) {
                    continue;
                }
                let Some(a2) = g.partner_of_b(b, c0) else {
                    continue;
                };
                if used.contains(&Vertex::A(a2)) {
                    continue;
                }
                let (Some(c), Some(c2)) = (g.colour(a, b), g.colour(a2, b2)) else {
                    continue;
                };
                if c == c2 || used_c.contains(&c) || used_c.contains(&c2) {
                    continue;
                }
                m_rb.push(Edge::new(a, b, c));
                m_rb.push(Edge::new(a2, b2, c2));
                used.extend([Vertex::A(a), Vertex::B(b), Vertex::A(a2), Vertex::B(b2)]);
                used_c.extend([c, c2]);
                continue 'outer;
            }
        }
        if m_rb.len() < rb_len {
            return Err(Error::exhausted(
                "demo state",
                format!("{} of {rb_len} m_rb edges", m_rb.len()),
            ));
        }
        let mut m_id = Vec::new();
        for &a in &order_a {
            if m_id.len() == id_len {
                break;
            }
            let Some(b) = g.partner_of_a(a, c0) else {
                continue;
            };
            if used.contains(&Vertex::A(a)) || used.contains(&Vertex::B(b)) {
                continue;
            }
            m_id.push(Edge::new(a, b, c0));
            used.extend([Vertex::A(a), Vertex::B(b)]);
        }
        if m_id.len() < id_len {
            return Err(Error::exhausted(
                "demo state",
                format!("{} of {id_len} m_id edges", m_id.len()),
            ));
        }
        let z_hat = order_a
            .iter()
            .copied()
            .find(|&a| !used.contains(&Vertex::A(a)));
        let w_hat = order_b
            .iter()
            .copied()
            .find(|&b| !used.contains(&Vertex::B(b)));
        let (Some(z_hat), Some(w_hat)) = (z_hat, w_hat) else {
            return Err(Error::exhausted("demo state", "no spare vertices"));
        };
        m_rb.sort();
        m_id.sort();
        let s = AdditionState {
            c0,
            m_id,
            m_rb,
            w_hat,
            z_hat,
        };
        s.check(g)?;
        Ok(s)
    }
}

/// One addition step: the new state and the six matchings exchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditionStep {
    pub state: AdditionState,
    pub e1: Vec<Edge>,
    pub f1: Vec<Edge>,
    pub e2: Vec<Edge>,
    pub f2: Vec<Edge>,
    pub e3: Vec<Edge>,
    pub f3: Vec<Edge>,
    pub candidates_tried: usize,
}

// stage-i half: three new edges through two m_id edges
#[derive(Clone, Copy)]
struct Half {
    ids: [Edge; 2],
    news: [Edge; 3],
}

/// Incorporates `x` (A) and `y` (B) into the state.
///
/// Stage i joins `w_hat` to `x` and `y` to `z_hat` by paths through four
/// `m_id` edges `E1`, alternating with six `m_rb` colours `F1`. Stage ii
/// releases each colour of `F1` by taking its alternating cycle `F2` in
/// `m_rb` plus colour-`c0` edges `E2`. Stage iii reuses the surplus colours
/// `C(F2) - C(F1)` on an alternating path `F3` through further `m_id`
/// edges `E3`, whose ends become the new spare pair.
pub fn addition_step(
    g: &ColouredBipartiteGraph,
    state: &AdditionState,
    x: usize,
    y: usize,
) -> Result<AdditionStep> {
    state.check(g)?;
    let before = state.vertex_set();
    if x >= g.a_size()
        || y >= g.b_size()
        || before.contains(&Vertex::A(x))
        || before.contains(&Vertex::B(y))
    {
        return Err(Error::invalid("x and y must be fresh vertices of A and B"));
    }
    let c0 = state.c0;
    let c_add = state.colours();
    if state.m_id.len() < 4 {
        return Err(Error::exhausted(
            "stage i",
            format!("m_id has {} edges, need 4", state.m_id.len()),
        ));
    }
    let rb_by_colour: BTreeMap<usize, Edge> = state.m_rb.iter().map(|e| (e.colour, *e)).collect();
    let rb_by_a: BTreeMap<usize, Edge> = state.m_rb.iter().map(|e| (e.a, *e)).collect();
    let usable = |c: Option<usize>| c.filter(|c| c_add.contains(c));

    // stage i candidates for each half
    let halves = |start: usize, end: usize| -> Vec<Half> {
        let mut out = Vec::new();
        for &p in &state.m_id {
            let Some(c1) = usable(g.colour(p.a, start)) else {
                continue;
            };
            for &q in &state.m_id {
                if q == p {
                    continue;
                }
                let (Some(c2), Some(c3)) = (usable(g.colour(q.a, p.b)), usable(g.colour(end, q.b)))
                else {
                    continue;
                };
                if c1 == c2 || c1 == c3 || c2 == c3 {
                    continue;
                }
                out.push(Half {
                    ids: [p, q],
                    news: [
                        Edge::new(p.a, start, c1),
                        Edge::new(q.a, p.b, c2),
                        Edge::new(end, q.b, c3),
                    ],
                });
            }
        }
        out
    };
    let first = halves(state.w_hat, x);
    let second = halves(y, state.z_hat);
    if first.is_empty() || second.is_empty() {
        return Err(Error::exhausted(
            "stage i",
            "no path through m_id in m_rb colours",
        ));
    }

    let mut cycles: BTreeMap<usize, Option<(Vec<Edge>, Vec<Edge>)>> = BTreeMap::new();
    let mut cycle_of = |c: usize| -> Option<(Vec<Edge>, Vec<Edge>)> {
        cycles
            .entry(c)
            .or_insert_with(|| alternating_cycle(g, c0, rb_by_colour[&c], &rb_by_a))
            .clone()
    };

    let mut tried = 0;
    let mut passed_ii = false;
    for h1 in &first {
        for h2 in &second {
            if tried == CANDIDATE_CAP {
                break;
            }
            if h1.ids.iter().any(|e| h2.ids.contains(e)) {
                continue;
            }
            let f1: Vec<Edge> = h1.news.iter().chain(&h2.news).copied().collect();
            let f1_colours: BTreeSet<usize> = f1.iter().map(|e| e.colour).collect();
            if f1_colours.len() != 6 {
                continue;
            }
            tried += 1;
            // stage ii
            let mut f2 = BTreeSet::new();
            let mut e2 = BTreeSet::new();
            let mut ok = true;
            for &c in &f1_colours {
                match cycle_of(c) {
                    Some((rb, id)) => {
                        f2.extend(rb);
                        e2.extend(id);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            passed_ii = true;
            // stage iii
            let e1: Vec<Edge> = h1.ids.iter().chain(&h2.ids).copied().collect();
            let surplus: BTreeSet<usize> = f2
                .iter()
                .map(|e: &Edge| e.colour)
                .filter(|c| !f1_colours.contains(c))
                .collect();
            let pool: Vec<Edge> = state
                .m_id
                .iter()
                .copied()
                .filter(|e| !e1.contains(e))
                .collect();
            let Some(tail) = stage_three(g, &pool, &surplus) else {
                continue;
            };
            let step = assemble(
                state,
                e1,
                f1,
                e2.into_iter().collect(),
                f2.into_iter().collect(),
                tail,
                tried,
            );
            verify(g, state, &step, x, y)?;
            return Ok(step);
        }
    }
    let stage = match (tried, passed_ii) {
        (0, _) => "stage i",
        (_, false) => "stage ii",
        _ => "stage iii",
    };
    Err(Error::exhausted(
        stage,
        format!("{tried} stage-i candidates tried"),
    ))
}

// the cycle of m_rb + colour-c0 edges through the m_rb edge of colour c,
// as (m_rb edges, c0 edges); None if it leaves V(m_rb) or is too long
fn alternating_cycle(
    g: &ColouredBipartiteGraph,
    c0: usize,
    start: Edge,
    rb_by_a: &BTreeMap<usize, Edge>,
) -> Option<(Vec<Edge>, Vec<Edge>)> {
    let (mut rb, mut id) = (vec![start], Vec::new());
    let mut cur = start;
    loop {
        let a = g.partner_of_b(cur.b, c0)?;
        id.push(Edge::new(a, cur.b, c0));
        let next = *rb_by_a.get(&a)?;
        if next == start {
            return Some((rb, id));
        }
        if rb.len() == MAX_CYCLE {
            return None;
        }
        rb.push(next);
        cur = next;
    }
}

struct Tail {
    e3: Vec<Edge>,
    f3: Vec<Edge>,
    w_hat: usize,
    z_hat: usize,
}

// an alternating path of pool edges and surplus colours, plus alternating
// cycles for whatever the path leaves, using every surplus colour once
fn stage_three(
    g: &ColouredBipartiteGraph,
    pool: &[Edge],
    surplus: &BTreeSet<usize>,
) -> Option<Tail> {
    let by_a: BTreeMap<usize, Edge> = pool.iter().map(|e| (e.a, *e)).collect();
    let mut budget = STAGE3_BUDGET;
    let mut s3 = Stage3 {
        g,
        by_a: &by_a,
        budget: &mut budget,
        used: BTreeSet::new(),
        e3: Vec::new(),
        f3: Vec::new(),
    };
    for &s in pool {
        s3.used.insert(s);
        s3.e3.push(s);
        let mut left = surplus.clone();
        if let Some(end) = s3.path(s.b, &mut left) {
            return Some(Tail {
                e3: s3.e3,
                f3: s3.f3,
                w_hat: end,
                z_hat: s.a,
            });
        }
        s3.used.remove(&s);
        s3.e3.pop();
    }
    None
}

struct Stage3<'a> {
    g: &'a ColouredBipartiteGraph,
    by_a: &'a BTreeMap<usize, Edge>,
    budget: &'a mut usize,
    used: BTreeSet<Edge>,
    e3: Vec<Edge>,
    f3: Vec<Edge>,
}

impl Stage3<'_> {
    fn tick(&mut self) -> bool {
        if *self.budget == 0 {
            return false;
        }
        *self.budget -= 1;
        true
    }

    // extends the path from B vertex `b`; returns the final B end
    fn path(&mut self, b: usize, left: &mut BTreeSet<usize>) -> Option<usize> {
        if !self.tick() {
            return None;
        }
        if self.cycles(left) {
            return Some(b);
        }
        for c in left.clone() {
            let Some(p) = self.step(b, c) else { continue };
            left.remove(&c);
            if let Some(end) = self.path(p.b, left) {
                return Some(end);
            }
            left.insert(c);
            self.undo(p);
        }
        None
    }

    // follows colour c from B vertex b onto an unused pool edge
    fn step(&mut self, b: usize, c: usize) -> Option<Edge> {
        let a = self.g.partner_of_b(b, c)?;
        let p = *self.by_a.get(&a)?;
        if self.used.contains(&p) {
            return None;
        }
        self.used.insert(p);
        self.e3.push(p);
        self.f3.push(Edge::new(a, b, c));
        Some(p)
    }

    fn undo(&mut self, p: Edge) {
        self.used.remove(&p);
        self.e3.pop();
        self.f3.pop();
    }

    // covers `left` exactly by alternating cycles on unused pool edges
    fn cycles(&mut self, left: &mut BTreeSet<usize>) -> bool {
        let Some(&c) = left.iter().next() else {
            return true;
        };
        let starts: Vec<Edge> = self
            .by_a
            .values()
            .copied()
            .filter(|e| !self.used.contains(e))
            .collect();
        for s in starts {
            let Some(p) = self.step(s.b, c) else { continue };
            self.used.insert(s);
            self.e3.push(s);
            left.remove(&c);
            if self.close(s, p.b, left) {
                return true;
            }
            left.insert(c);
            self.used.remove(&s);
            self.e3.pop();
            self.undo(p);
        }
        false
    }

    fn close(&mut self, s: Edge, b: usize, left: &mut BTreeSet<usize>) -> bool {
        if !self.tick() {
            return false;
        }
        if let Some(c) = self.g.colour(s.a, b).filter(|c| left.contains(c)) {
            self.f3.push(Edge::new(s.a, b, c));
            left.remove(&c);
            if self.cycles(left) {
                return true;
            }
            left.insert(c);
            self.f3.pop();
        }
        for c in left.clone() {
            let Some(p) = self.step(b, c) else { continue };
            left.remove(&c);
            if self.close(s, p.b, left) {
                return true;
            }
            left.insert(c);
            self.undo(p);
        }
        false
    }
}

fn assemble(
    state: &AdditionState,
    e1: Vec<Edge>,
    f1: Vec<Edge>,
    e2: Vec<Edge>,
    f2: Vec<Edge>,
    tail: Tail,
    tried: usize,
) -> AdditionStep {
    let drop_id: BTreeSet<Edge> = e1.iter().chain(&tail.e3).copied().collect();
    let mut m_id: Vec<Edge> = state
        .m_id
        .iter()
        .copied()
        .filter(|e| !drop_id.contains(e))
        .collect();
    m_id.extend(&e2);
    let mut m_rb: Vec<Edge> = state
        .m_rb
        .iter()
        .copied()
        .filter(|e| !f2.contains(e))
        .collect();
    m_rb.extend(&f1);
    m_rb.extend(&tail.f3);
    m_id.sort();
    m_rb.sort();
    let sorted = |mut v: Vec<Edge>| {
        v.sort();
        v
    };
    AdditionStep {
        state: AdditionState {
            c0: state.c0,
            m_id,
            m_rb,
            w_hat: tail.w_hat,
            z_hat: tail.z_hat,
        },
        e1: sorted(e1),
        f1: sorted(f1),
        e2,
        f2,
        e3: sorted(tail.e3),
        f3: sorted(tail.f3),
        candidates_tried: tried,
    }
}

fn verify(
    g: &ColouredBipartiteGraph,
    old: &AdditionState,
    step: &AdditionStep,
    x: usize,
    y: usize,
) -> Result<()> {
    let new = &step.state;
    new.check(g)?;
    let removed = step.e1.len() + step.e3.len();
    if new.m_id.len() != old.m_id.len() + 1
        || old.m_id.len() + step.e2.len() != new.m_id.len() + removed
    {
        return Err(Error::invalid("m_id did not grow by exactly one"));
    }
    if new.colours() != old.colours() || new.m_rb.len() != old.m_rb.len() {
        return Err(Error::invalid("m_rb colours changed"));
    }
    let mut want = old.vertex_set();
    want.extend([Vertex::A(x), Vertex::B(y)]);
    if new.vertex_set() != want {
        return Err(Error::invalid("vertex set did not grow by exactly x and y"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cyclic_graph;

    fn fresh(g: &ColouredBipartiteGraph, s: &AdditionState) -> (usize, usize) {
        let vs = s.vertex_set();
        let x = (0..g.a_size())
            .find(|&a| !vs.contains(&Vertex::A(a)))
            .unwrap();
        let y = (0..g.b_size())
            .find(|&b| !vs.contains(&Vertex::B(b)))
            .unwrap();
        (x, y)
    }

    #[test]
    fn z101_five_steps() {
        let g = cyclic_graph(101);
        let mut s = AdditionState::demo(&g, 0, 20, 60, 4).unwrap();
        let colours = s.colours();
        for k in 1..=5 {
            let (x, y) = fresh(&g, &s);
            let before = s.vertex_set().len();
            let step = addition_step(&g, &s, x, y).unwrap();
            assert_eq!(step.e1.len(), 4);
            assert_eq!(step.f1.len(), 6);
            assert_eq!(step.e2.len(), step.f2.len());
            assert_eq!(step.e3.len(), step.f3.len() + 1);
            s = step.state;
            assert_eq!(s.m_id.len(), 20 + k);
            assert_eq!(s.colours(), colours);
            assert_eq!(s.vertex_set().len(), before + 2);
        }
    }

    #[test]
    fn short_m_id_fails_in_stage_one() {
        let g = cyclic_graph(31);
        let s = AdditionState::demo(&g, 0, 3, 10, 1).unwrap();
        let (x, y) = fresh(&g, &s);
        let e = addition_step(&g, &s, x, y).unwrap_err();
        assert!(matches!(e, Error::Exhausted { ref stage, .. } if stage == "stage i"));
    }

    #[test]
    fn stale_vertices_rejected() {
        let g = cyclic_graph(31);
        let s = AdditionState::demo(&g, 0, 6, 10, 1).unwrap();
        let e = s.m_id[0];
        assert!(matches!(
            addition_step(&g, &s, e.a, 0),
            Err(Error::Invalid(_))
        ));
    }
}
