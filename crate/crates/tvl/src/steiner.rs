//! Steiner triple systems and their reduction to coloured bipartite graphs.
//!
//! Points are split at random into `A`, `B`, `C`; a triple `abc` with one
//! point in each part becomes the edge `ab` of colour `c`. A rainbow
//! matching then reads back as a set of disjoint triples.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColouredBipartiteGraph, Edge, RainbowMatching};
use crate::solvers::{greedy_nibble_matching, local_switch_augment, max_rainbow_matching_exact};

/// Set of 3-subsets of `0..n` covering every pair exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSystem {
    pub n: usize,
    pub triples: Vec<[usize; 3]>,
}

impl TripleSystem {
    /// Validates pair coverage; triples are stored sorted.
    pub fn new(n: usize, triples: Vec<[usize; 3]>) -> Result<Self> {
        if n % 6 != 1 && n % 6 != 3 {
            return Err(Error::invalid(format!(
                "no Steiner triple system of order {n}"
            )));
        }
        let mut seen = vec![false; n * n];
        let mut out = Vec::with_capacity(triples.len());
        for mut t in triples {
            t.sort();
            if t[2] >= n || t[0] == t[1] || t[1] == t[2] {
                return Err(Error::invalid(format!("bad triple {t:?}")));
            }
            for (x, y) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                if std::mem::replace(&mut seen[x * n + y], true) {
                    return Err(Error::invalid(format!("pair {x},{y} covered twice")));
                }
            }
            out.push(t);
        }
        if out.len() != n * (n - 1) / 6 {
            return Err(Error::invalid(format!(
                "{} triples, expected {}",
                out.len(),
                n * (n - 1) / 6
            )));
        }
        out.sort();
        Ok(TripleSystem { n, triples: out })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TripleSystem = serde_json::from_str(s)?;
        TripleSystem::new(raw.n, raw.triples)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    /// The same system under a seeded random permutation of the points.
    pub fn relabel(&self, seed: u64) -> TripleSystem {
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let triples = self.triples.iter().map(|t| t.map(|x| perm[x])).collect();
        TripleSystem::new(self.n, triples).expect("relabelling keeps validity")
    }

    /// True when the triples are pairwise disjoint members of the system.
    pub fn is_matching(&self, m: &[[usize; 3]]) -> bool {
        let members: BTreeSet<[usize; 3]> = self.triples.iter().copied().collect();
        let mut points = BTreeSet::new();
        m.iter().all(|t| {
            let mut s = *t;
            s.sort();
            members.contains(&s) && t.iter().all(|&x| points.insert(x))
        })
    }
}

/// Bose's construction of order `3m` for odd `m`: point `3x + i` is
/// `(x, i)`; triples are `{(x,0),(x,1),(x,2)}` and
/// `{(x,i),(y,i),(x o y, i+1)}` with `x o y = (x + y)(m + 1)/2 mod m`.
pub fn bose_sts(m: usize) -> Result<TripleSystem> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "Bose construction needs odd m >= 3, got {m}"
        )));
    }
    let half = m.div_ceil(2);
    let p = |x: usize, i: usize| 3 * x + i % 3;
    let mut triples = Vec::new();
    for x in 0..m {
        triples.push([p(x, 0), p(x, 1), p(x, 2)]);
    }
    for x in 0..m {
        for y in x + 1..m {
            let z = (x + y) * half % m;
            for i in 0..3 {
                triples.push([p(x, i), p(y, i), p(z, i + 1)]);
            }
        }
    }
    TripleSystem::new(3 * m, triples)
}

/// A random three-way split of the points and the graph it induces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub graph: ColouredBipartiteGraph,
    /// Points of each part; graph vertex `i` of A is `a[i]`, colour `k` is `c[k]`.
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    /// Point removed first when `n = 1 mod 6`.
    pub deleted: Option<usize>,
    /// Splits drawn to obtain this one.
    pub attempts: usize,
}

impl Reduction {
    pub fn is_balanced(&self) -> bool {
        self.a.len() == self.b.len() && self.b.len() == self.c.len()
    }

    pub fn parts(&self) -> [usize; 3] {
        [self.a.len(), self.b.len(), self.c.len()]
    }
}

fn split(s: &TripleSystem, parts: &[u8], deleted: Option<usize>, attempts: usize) -> Reduction {
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for (x, &p) in parts.iter().enumerate() {
        if Some(x) == deleted {
            continue;
        }
        [&mut a, &mut b, &mut c][p as usize].push(x);
    }
    let pos = |v: &[usize]| -> BTreeMap<usize, usize> {
        v.iter().enumerate().map(|(i, &x)| (x, i)).collect()
    };
    let (pa, pb, pc) = (pos(&a), pos(&b), pos(&c));
    let mut edges = Vec::new();
    for t in &s.triples {
        if t.iter().any(|&x| Some(x) == deleted) {
            continue;
        }
        for perm in [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ] {
            let (x, y, z) = (t[perm[0]], t[perm[1]], t[perm[2]]);
            if let (Some(&i), Some(&j), Some(&k)) = (pa.get(&x), pb.get(&y), pc.get(&z)) {
                edges.push(Edge::new(i, j, k));
            }
        }
    }
    let graph = ColouredBipartiteGraph::new(a.len(), b.len(), edges)
        .expect("pair uniqueness makes the colouring proper");
    Reduction {
        graph,
        a,
        b,
        c,
        deleted,
        attempts,
    }
}

fn deleted_point(s: &TripleSystem) -> Option<usize> {
    (s.n % 6 == 1).then(|| s.n - 1)
}

fn draw(n: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..3u8)).collect()
}

/// Puts each point in A, B or C with probability 1/3 each. For
/// `n = 1 mod 6` the largest point is deleted first.
pub fn tripartition_reduce(s: &TripleSystem, seed: u64) -> Reduction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    split(s, &draw(s.n, &mut rng), deleted_point(s), 1)
}

/// As [`tripartition_reduce`], redrawing until the three parts have equal
/// size. `None` after `max_attempts` draws.
pub fn tripartition_reduce_balanced(
    s: &TripleSystem,
    seed: u64,
    max_attempts: usize,
) -> Option<Reduction> {
    let deleted = deleted_point(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let live = s.n - usize::from(deleted.is_some());
    for attempt in 1..=max_attempts {
        let parts = draw(s.n, &mut rng);
        let mut count = [0usize; 3];
        for (x, &p) in parts.iter().enumerate() {
            if Some(x) != deleted {
                count[p as usize] += 1;
            }
        }
        if count.iter().all(|&k| 3 * k == live) {
            return Some(split(s, &parts, deleted, attempt));
        }
    }
    None
}

/// The triples `{a, b, c}` behind the edges of `m`.
pub fn matching_from_rainbow(
    s: &TripleSystem,
    m: &RainbowMatching,
    r: &Reduction,
) -> Result<Vec<[usize; 3]>> {
    m.check_in(&r.graph)?;
    let out: Vec<[usize; 3]> = m
        .edges()
        .iter()
        .map(|e| {
            let mut t = [r.a[e.a], r.b[e.b], r.c[e.colour]];
            t.sort();
            t
        })
        .collect();
    if !s.is_matching(&out) {
        return Err(Error::invalid(
            "edges do not come from disjoint triples of the system",
        ));
    }
    Ok(out)
}

/// Settings for [`brouwer_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Redraw splits until balanced (up to `attempts` draws).
    pub balanced: bool,
    pub attempts: usize,
    /// Largest part size solved exactly.
    pub exact_cap: usize,
    pub budget: u64,
    pub heuristic_rounds: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            balanced: true,
            attempts: 10_000,
            exact_cap: 12,
            budget: 50_000_000,
            heuristic_rounds: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub parts: [usize; 3],
    pub attempts: usize,
    pub size: usize,
    /// True when the size is a proven maximum for this split.
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrouwerReport {
    pub n: usize,
    /// `ceil((n - 4) / 3)`.
    pub target: usize,
    pub best_size: usize,
    pub best_seed: Option<u64>,
    pub best: Vec<[usize; 3]>,
    pub achieved: bool,
    pub runs: Vec<SeedRun>,
    /// Balanced splits per draw, over all seeds.
    pub acceptance_rate: f64,
}

/// `ceil((n - 4) / 3)`, zero for `n <= 4`.
pub fn brouwer_target(n: usize) -> usize {
    n.saturating_sub(4).div_ceil(3)
}

/// Reduces `s` under seeds `0..seeds` in parallel, solves each graph
/// (exactly when both sides have at most `exact_cap` vertices) and keeps
/// the largest triple matching; ties go to the smaller seed.
pub fn brouwer_pipeline(s: &TripleSystem, seeds: u64, cfg: &PipelineConfig) -> BrouwerReport {
    let runs: Vec<(SeedRun, Vec<[usize; 3]>)> = (0..seeds)
        .into_par_iter()
        .filter_map(|seed| {
            let r = if cfg.balanced {
                tripartition_reduce_balanced(s, seed, cfg.attempts)?
            } else {
                tripartition_reduce(s, seed)
            };
            let g = &r.graph;
            let (m, optimal) = if g.a_size().max(g.b_size()) <= cfg.exact_cap {
                let x = max_rainbow_matching_exact(g, cfg.budget);
                (x.witness, x.optimal)
            } else {
                let start = greedy_nibble_matching(g, 0.3, seed);
                let m = local_switch_augment(g, &start, cfg.heuristic_rounds, seed)
                    .expect("start is valid");
                (m, false)
            };
            let triples = matching_from_rainbow(s, &m, &r).expect("reduction is sound");
            Some((
                SeedRun {
                    seed,
                    parts: r.parts(),
                    attempts: r.attempts,
                    size: triples.len(),
                    optimal,
                },
                triples,
            ))
        })
        .collect();
    let draws: usize = runs.iter().map(|(r, _)| r.attempts).sum();
    let accepted = runs
        .iter()
        .filter(|(r, _)| r.parts[0] == r.parts[1] && r.parts[1] == r.parts[2])
        .count();
    let best = runs
        .iter()
        .max_by_key(|(r, _)| (r.size, std::cmp::Reverse(r.seed)))
        .cloned();
    let target = brouwer_target(s.n);
    let (best_size, best_seed, best) = match best {
        Some((r, t)) => (r.size, Some(r.seed), t),
        None => (0, None, Vec::new()),
    };
    BrouwerReport {
        n: s.n,
        target,
        best_size,
        best_seed,
        best,
        achieved: best_size >= target,
        acceptance_rate: if draws == 0 {
            0.0
        } else {
            accepted as f64 / draws as f64
        },
        runs: runs.into_iter().map(|(r, _)| r).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> TripleSystem {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        TripleSystem::new(7, lines.to_vec()).unwrap()
    }

    // largest set of disjoint triples, by plain recursion
    fn max_sts_matching(s: &TripleSystem) -> usize {
        fn rec(ts: &[[usize; 3]], i: usize, used: u64, k: usize, best: &mut usize) {
            *best = (*best).max(k);
            for j in i..ts.len() {
                let mask = ts[j].iter().fold(0u64, |m, &x| m | 1 << x);
                if used & mask == 0 {
                    rec(ts, j + 1, used | mask, k + 1, best);
                }
            }
        }
        let mut best = 0;
        rec(&s.triples, 0, 0, 0, &mut best);
        best
    }

    #[test]
    fn bose_sizes() {
        assert_eq!(bose_sts(3).unwrap().triples.len(), 12);
        assert_eq!(bose_sts(5).unwrap().triples.len(), 35);
        assert_eq!(bose_sts(7).unwrap().triples.len(), 70);
        assert!(bose_sts(2).is_err());
        assert!(TripleSystem::new(8, vec![]).is_err());
    }

    #[test]
    fn bose_has_parallel_class() {
        let s = bose_sts(5).unwrap();
        let class: Vec<[usize; 3]> = (0..5).map(|x| [3 * x, 3 * x + 1, 3 * x + 2]).collect();
        assert!(s.is_matching(&class));
    }

    #[test]
    fn reduction_edges_are_crossing_triples() {
        let s = bose_sts(3).unwrap();
        let r = tripartition_reduce_balanced(&s, 1, 10_000).unwrap();
        assert_eq!(r.parts(), [3, 3, 3]);
        let crossing = s
            .triples
            .iter()
            .filter(|t| {
                let mut hit = [0; 3];
                for x in t.iter() {
                    let p = if r.a.contains(x) {
                        0
                    } else if r.b.contains(x) {
                        1
                    } else {
                        2
                    };
                    hit[p] += 1;
                }
                hit == [1, 1, 1]
            })
            .count();
        assert_eq!(r.graph.edges().len(), crossing);
        assert!(r.graph.colour_count() <= 3);
    }

    #[test]
    fn fano_deletes_largest_point() {
        let r = tripartition_reduce(&fano(), 3);
        assert_eq!(r.deleted, Some(6));
        assert!(!r.a.contains(&6) && !r.b.contains(&6) && !r.c.contains(&6));
        assert!(r.graph.report().proper);
    }

    #[test]
    fn reduction_is_sound_and_bounded_on_sts9() {
        let s = bose_sts(3).unwrap();
        let ceiling = max_sts_matching(&s);
        assert_eq!(ceiling, 3);
        for seed in 0..40 {
            let r = tripartition_reduce(&s, seed);
            // every rainbow matching, enumerated over subsets of edges
            let edges = r.graph.edges().to_vec();
            assert!(edges.len() <= 16);
            for mask in 0u32..(1 << edges.len()) {
                let pick: Vec<Edge> = (0..edges.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| edges[i])
                    .collect();
                let Ok(m) = RainbowMatching::new(&r.graph, pick) else {
                    continue;
                };
                let t = matching_from_rainbow(&s, &m, &r).unwrap();
                assert_eq!(t.len(), m.len());
                assert!(t.len() <= ceiling);
            }
        }
    }

    #[test]
    fn empty_matching_maps_to_nothing() {
        let s = bose_sts(3).unwrap();
        let r = tripartition_reduce(&s, 0);
        assert!(matching_from_rainbow(&s, &RainbowMatching::empty(), &r)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn pipeline_on_sts9_is_perfect() {
        let rep = brouwer_pipeline(&bose_sts(3).unwrap(), 10, &PipelineConfig::default());
        assert_eq!(rep.best_size, 3);
        assert!(rep.achieved);
        assert_eq!(rep.target, 2);
    }

    #[test]
    fn json_round_trip_and_relabel() {
        let s = bose_sts(5).unwrap();
        assert_eq!(TripleSystem::from_json(&s.to_json()).unwrap(), s);
        let t = s.relabel(9);
        assert_eq!(t.triples.len(), 35);
        assert_eq!(max_sts_matching(&fano()), 1);
    }
}
