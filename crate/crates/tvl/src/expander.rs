//! Sublinear expanders: extraction, verification against an adversarial
//! edge deletion, and internally disjoint short paths.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Undirected simple graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            n,
            adj: vec![BTreeSet::new(); n],
        }
    }

    /// Builds from an edge list; loops and repeated edges are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::invalid(format!("bad edge ({u},{v})")));
            }
            if !g.adj[u].insert(v) {
                return Err(Error::invalid(format!("repeated edge ({u},{v})")));
            }
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 1..n {
            g.add_edge(u - 1, u);
        }
        g
    }

    /// The `k`-dimensional hypercube.
    pub fn hypercube(k: usize) -> Self {
        let n = 1 << k;
        let mut g = Self::empty(n);
        for u in 0..n {
            for b in 0..k {
                g.add_edge(u, u ^ (1 << b));
            }
        }
        g
    }

    /// Two copies of `K_k` joined by one edge.
    pub fn barbell(k: usize) -> Self {
        let mut g = Self::empty(2 * k);
        for u in 0..k {
            for v in u + 1..k {
                g.add_edge(u, v);
                g.add_edge(k + u, k + v);
            }
        }
        if k > 0 {
            g.add_edge(k - 1, k);
        }
        g
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn neighbours(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `d(G) = 2e(G)/|G|`, zero for the empty graph.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.n as f64
        }
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Induced subgraph on `keep` (sorted), relabelled to `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> SimpleGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Self::empty(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX {
                    g.adj[i].insert(pos[w]);
                }
            }
        }
        g
    }

    /// External neighbourhood `N(U)`.
    pub fn external_neighbourhood(&self, u: &[usize]) -> BTreeSet<usize> {
        let inside: BTreeSet<usize> = u.iter().copied().collect();
        u.iter()
            .flat_map(|&x| self.adj[x].iter().copied())
            .filter(|w| !inside.contains(w))
            .collect()
    }

    /// Connected components, each sorted, in order of least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        q.push_back(w);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Number of labelled 4-cycles: ordered `(w, x, y, z)` of distinct
    /// vertices with `wx, xy, yz, zw` all edges.
    pub fn labelled_c4_count(&self) -> u64 {
        let mut total = 0u64;
        for w in 0..self.n {
            let mut codeg = vec![0u64; self.n];
            for &x in &self.adj[w] {
                for &y in &self.adj[x] {
                    if y != w {
                        codeg[y] += 1;
                    }
                }
            }
            total += codeg.iter().map(|&c| c * c.saturating_sub(1)).sum::<u64>();
        }
        total
    }
}

/// `16 e^4 / n^4 - 6 n^3`, the lower bound for labelled 4-cycles.
pub fn c4_lower_bound(n: usize, e: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (n, e) = (n as f64, e as f64);
    16.0 * e.powi(4) / n.powi(4) - 6.0 * n.powi(3)
}

/// `alpha` and the degree cap `Delta` of an `(alpha, Delta)`-expander.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpanderParams {
    pub alpha: f64,
    pub delta_cap: f64,
}

/// `1 / (16 ln n)`, clamped to 1 for `n <= 2`.
pub fn default_alpha(n: usize) -> f64 {
    if n <= 2 {
        1.0
    } else {
        (1.0 / (16.0 * (n as f64).ln())).min(1.0)
    }
}

/// Largest `|U|` checked: `floor(2n/3)`.
fn max_set(n: usize) -> usize {
    2 * n / 3
}

/// Which procedure looked for violating sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Heuristic,
}

/// A set `U` with `|N_{G-K}(U)| < alpha |U|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub set: Vec<usize>,
    /// Edges of the adversarial subgraph `K` (between `U` and killed vertices).
    pub deleted: Vec<(usize, usize)>,
    /// `N_{G-K}(U)`.
    pub neighbourhood: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub params: ExpanderParams,
    /// Exact mode: the graph is an expander. Heuristic mode: no violation found.
    pub passed: bool,
    pub sets_checked: u64,
    pub witness: Option<Violation>,
}

/// Largest set of outside vertices that `K` can cut off from `u` when every
/// vertex of `K` has degree at most `cap`. Returns the killed vertices.
fn best_kill(g: &SimpleGraph, u: &[usize], in_u: &[bool], cap: usize) -> Vec<usize> {
    if cap == 0 {
        return Vec::new();
    }
    // a vertex can be killed only if all its U-edges fit in its own budget
    let cands: Vec<(usize, Vec<usize>)> = g
        .external_neighbourhood(u)
        .into_iter()
        .map(|v| {
            let nb: Vec<usize> = g.adj[v].iter().copied().filter(|&w| in_u[w]).collect();
            (v, nb)
        })
        .filter(|(_, nb)| nb.len() <= cap)
        .collect();
    let mut load = vec![0usize; g.n];
    let mut cur = Vec::new();
    let mut best = Vec::new();
    fn rec(
        i: usize,
        cands: &[(usize, Vec<usize>)],
        cap: usize,
        load: &mut [usize],
        cur: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if i == cands.len() || cur.len() + (cands.len() - i) <= best.len() {
            return;
        }
        let (v, nb) = &cands[i];
        if nb.iter().all(|&w| load[w] < cap) {
            for &w in nb {
                load[w] += 1;
            }
            cur.push(*v);
            rec(i + 1, cands, cap, load, cur, best);
            cur.pop();
            for &w in nb {
                load[w] -= 1;
            }
        }
        rec(i + 1, cands, cap, load, cur, best);
    }
    rec(0, &cands, cap, &mut load, &mut cur, &mut best);
    best
}

fn kill_greedy(g: &SimpleGraph, u: &[usize], in_u: &[bool], cap: usize) -> Vec<usize> {
    if cap == 0 {
        return Vec::new();
    }
    let mut cands: Vec<(usize, Vec<usize>)> = g
        .external_neighbourhood(u)
        .into_iter()
        .map(|v| {
            (
                v,
                g.adj[v]
                    .iter()
                    .copied()
                    .filter(|&w| in_u[w])
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, nb)| nb.len() <= cap)
        .collect();
    cands.sort_by_key(|(v, nb)| (nb.len(), *v));
    let mut load = vec![0usize; g.n];
    let mut out = Vec::new();
    for (v, nb) in cands {
        if nb.iter().all(|&w| load[w] < cap) {
            for &w in &nb {
                load[w] += 1;
            }
            out.push(v);
        }
    }
    out
}

fn violation_for(g: &SimpleGraph, set: Vec<usize>, killed: &[usize]) -> Violation {
    let mut deleted = Vec::new();
    let set_lookup: BTreeSet<usize> = set.iter().copied().collect();
    for &v in killed {
        for &w in &g.adj[v] {
            if set_lookup.contains(&w) {
                deleted.push((w.min(v), w.max(v)));
            }
        }
    }
    deleted.sort();
    let neighbourhood = g
        .external_neighbourhood(&set)
        .into_iter()
        .filter(|v| !killed.contains(v))
        .collect();
    Violation {
        set,
        deleted,
        neighbourhood,
    }
}

/// Exact cap on vertex count for exhaustive verification.
pub const EXACT_CAP: usize = 14;

fn exact_violation(g: &SimpleGraph, alpha: f64, cap: usize) -> (u64, Option<Violation>) {
    let n = g.n;
    let limit = max_set(n);
    let mut checked = 0;
    // by size, then lexicographic
    for size in 1..=limit {
        let mut found = None;
        for_each_subset(n, size, &mut |set| {
            if found.is_some() {
                return;
            }
            checked += 1;
            let mut in_u = vec![false; n];
            for &x in set {
                in_u[x] = true;
            }
            let nb = g.external_neighbourhood(set).len();
            if (nb as f64) >= alpha * size as f64 + (cap * size) as f64 {
                return;
            }
            let killed = best_kill(g, set, &in_u, cap);
            if ((nb - killed.len()) as f64) < alpha * size as f64 {
                found = Some(violation_for(g, set.to_vec(), &killed));
            }
        });
        if found.is_some() {
            return (checked, found);
        }
    }
    (checked, None)
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, f);
}

fn heuristic_violation(
    g: &SimpleGraph,
    alpha: f64,
    cap: usize,
    seed: u64,
    samples: usize,
) -> (u64, Option<Violation>) {
    let n = g.n;
    let limit = max_set(n);
    let mut checked = 0;
    let check = |set: Vec<usize>, checked: &mut u64| -> Option<Violation> {
        if set.is_empty() || set.len() > limit {
            return None;
        }
        *checked += 1;
        let mut in_u = vec![false; n];
        for &x in &set {
            in_u[x] = true;
        }
        let killed = kill_greedy(g, &set, &in_u, cap);
        let nb = g.external_neighbourhood(&set).len() - killed.len();
        ((nb as f64) < alpha * set.len() as f64).then(|| violation_for(g, set, &killed))
    };
    // whole components, then unions of small components
    let comps = g.components();
    for c in &comps {
        if let Some(v) = check(c.clone(), &mut checked) {
            return (checked, Some(v));
        }
    }
    let mut by_size = comps.clone();
    by_size.sort_by_key(|c| (c.len(), c[0]));
    let mut acc = Vec::new();
    for c in by_size {
        if acc.len() + c.len() > limit {
            break;
        }
        acc.extend(c);
        acc.sort();
        if let Some(v) = check(acc.clone(), &mut checked) {
            return (checked, Some(v));
        }
    }
    // BFS balls and random sets, greedily grown while the ratio drops
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for s in 0..samples {
        if n == 0 {
            break;
        }
        let start = if s < n { s } else { rng.gen_range(0..n) };
        let mut ball = Vec::new();
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = q.pop_front() {
            if ball.len() >= limit {
                break;
            }
            ball.push(u);
            let mut sorted = ball.clone();
            sorted.sort();
            if let Some(v) = check(sorted, &mut checked) {
                return (checked, Some(v));
            }
            let mut nb: Vec<usize> = g.adj[u].iter().copied().collect();
            nb.shuffle(&mut rng);
            for w in nb {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        order.shuffle(&mut rng);
        let k = rng.gen_range(1..=limit.max(1));
        let mut set: Vec<usize> = order[..k.min(n)].to_vec();
        set.sort();
        if let Some(v) = check(set, &mut checked) {
            return (checked, Some(v));
        }
    }
    (checked, None)
}

/// Checks `|N_{H-K}(U)| >= alpha |U|` for all `|U| <= 2n/3` and all `K`
/// with `Delta(K) <= delta_cap`.
///
/// Exact mode enumerates every `U` (up to [`EXACT_CAP`] vertices) and solves
/// the adversary exactly; heuristic mode samples and is one-sided.
pub fn verify_expansion(
    h: &SimpleGraph,
    params: ExpanderParams,
    mode: Mode,
    seed: u64,
) -> Result<VerificationReport> {
    let cap = params.delta_cap.max(0.0).floor() as usize;
    let (sets_checked, witness) = match mode {
        Mode::Exact => {
            if h.n > EXACT_CAP {
                return Err(Error::Cap {
                    what: "vertices for exact verification".into(),
                    got: h.n,
                    cap: EXACT_CAP,
                });
            }
            exact_violation(h, params.alpha, cap)
        }
        Mode::Heuristic => heuristic_violation(h, params.alpha, cap, seed, 4 * h.n + 16),
    };
    Ok(VerificationReport {
        mode,
        params,
        passed: witness.is_none(),
        sets_checked,
        witness,
    })
}

/// One step of the extraction process.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    /// Removed a vertex of degree below half the average degree.
    MinDegree {
        before: usize,
        after: usize,
        vertex: usize,
        degree: usize,
        d_before: f64,
        d_after: f64,
    },
    /// A violating set `U` was found; kept `G - U` (sparse) or
    /// `G[U + N_{G-K}(U)]` (dense).
    Split {
        before: usize,
        after: usize,
        set_size: usize,
        dense: bool,
        d_before: f64,
        d_after: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub h: SimpleGraph,
    /// Original labels of the vertices of `h`.
    pub vertices: Vec<usize>,
    pub params: ExpanderParams,
    pub trace: Vec<Step>,
    /// Procedure that found no violation at the final graph.
    pub certified_by: Mode,
}

/// Runs the extraction process: delete a minimum-degree vertex while
/// `delta < d/2`; otherwise split along a violating set. `alpha` is fixed
/// from the original order; the adversary's degree cap is `alpha d` of the
/// current graph.
pub fn extract_expander(g: &SimpleGraph, seed: u64) -> Extraction {
    extract_expander_with_alpha(g, default_alpha(g.n), seed)
}

/// [`extract_expander`] with an explicit `alpha`.
pub fn extract_expander_with_alpha(g: &SimpleGraph, alpha: f64, seed: u64) -> Extraction {
    let mut cur: Vec<usize> = (0..g.n).collect();
    let mut h = g.clone();
    let mut trace = Vec::new();
    let mut step_seed = seed;
    loop {
        let n_l = h.n;
        let d_l = h.average_degree();
        if n_l > 1 && (h.min_degree() as f64) < d_l / 2.0 {
            let v = (0..n_l)
                .min_by_key(|&v| (h.degree(v), v))
                .expect("nonempty");
            let keep: Vec<usize> = (0..n_l).filter(|&x| x != v).collect();
            let degree = h.degree(v);
            h = h.induced(&keep);
            trace.push(Step::MinDegree {
                before: n_l,
                after: h.n,
                vertex: cur[v],
                degree,
                d_before: d_l,
                d_after: h.average_degree(),
            });
            cur = keep.iter().map(|&i| cur[i]).collect();
            continue;
        }
        let params = ExpanderParams {
            alpha,
            delta_cap: alpha * d_l,
        };
        let mode = if n_l <= EXACT_CAP {
            Mode::Exact
        } else {
            Mode::Heuristic
        };
        step_seed = step_seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let report = verify_expansion(&h, params, mode, step_seed).expect("mode chosen by size");
        let Some(w) = report.witness else {
            return Extraction {
                h,
                vertices: cur,
                params,
                trace,
                certified_by: mode,
            };
        };
        let in_u: BTreeSet<usize> = w.set.iter().copied().collect();
        let rest: Vec<usize> = (0..n_l).filter(|x| !in_u.contains(x)).collect();
        let sparse = h.induced(&rest);
        let (keep, dense) = if !rest.is_empty() && sparse.average_degree() >= d_l {
            (rest, false)
        } else {
            let mut k: Vec<usize> = w.set.iter().chain(&w.neighbourhood).copied().collect();
            k.sort();
            (k, true)
        };
        let next = h.induced(&keep);
        trace.push(Step::Split {
            before: n_l,
            after: next.n,
            set_size: w.set.len(),
            dense,
            d_before: d_l,
            d_after: next.average_degree(),
        });
        h = next;
        cur = keep.iter().map(|&i| cur[i]).collect();
    }
}

/// Result of [`disjoint_short_paths`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathReport {
    pub paths: Vec<Vec<usize>>,
    /// True when fewer than `r` paths were found.
    pub exhausted: bool,
}

/// Up to `r` internally vertex-disjoint `x,y`-paths of length at most
/// `max_len`, found by repeated shortest-path search with removal of the
/// interior vertices used so far.
pub fn disjoint_short_paths(
    h: &SimpleGraph,
    x: usize,
    y: usize,
    r: usize,
    max_len: usize,
    forbidden_vertices: &BTreeSet<usize>,
    forbidden_edges: &BTreeSet<(usize, usize)>,
) -> Result<PathReport> {
    if x == y {
        return Err(Error::invalid("endpoints coincide"));
    }
    if x >= h.n || y >= h.n || forbidden_vertices.contains(&x) || forbidden_vertices.contains(&y) {
        return Err(Error::invalid("endpoint missing or forbidden"));
    }
    let banned_edge = |u: usize, v: usize| forbidden_edges.contains(&(u.min(v), u.max(v)));
    let mut blocked = forbidden_vertices.clone();
    let mut direct_used = false;
    let mut paths = Vec::new();
    while paths.len() < r {
        let mut prev = vec![usize::MAX; h.n];
        let mut dist = vec![usize::MAX; h.n];
        dist[x] = 0;
        let mut q = VecDeque::from([x]);
        while let Some(u) = q.pop_front() {
            if u == y || dist[u] >= max_len {
                continue;
            }
            for &w in &h.adj[u] {
                if dist[w] != usize::MAX || banned_edge(u, w) {
                    continue;
                }
                if w != y && blocked.contains(&w) {
                    continue;
                }
                if u == x && w == y && direct_used {
                    continue;
                }
                dist[w] = dist[u] + 1;
                prev[w] = u;
                q.push_back(w);
            }
        }
        if dist[y] == usize::MAX {
            break;
        }
        let mut p = vec![y];
        while *p.last().expect("nonempty") != x {
            p.push(prev[*p.last().expect("nonempty")]);
        }
        p.reverse();
        if p.len() == 2 {
            direct_used = true;
        }
        blocked.extend(&p[1..p.len() - 1]);
        paths.push(p);
    }
    Ok(PathReport {
        exhausted: paths.len() < r,
        paths,
    })
}
