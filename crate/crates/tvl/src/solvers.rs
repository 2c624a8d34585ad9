//! Maximum rainbow matching search: exact branch-and-bound, transversal
//! counting, a nibble-style heuristic, local augmentation and the 1.8d
//! exchange algorithm for graphs with rare colours.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use petgraph::graph::UnGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ColouredBipartiteGraph, Edge, RainbowMatching};
use crate::latin::LatinArray;

/// Outcome of [`max_rainbow_matching_exact`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactResult {
    pub size: usize,
    pub witness: RainbowMatching,
    /// True when the search completed, so no larger matching exists.
    pub optimal: bool,
    pub nodes: u64,
}

/// Default node budget for exact search.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

struct Search<'g> {
    g: &'g ColouredBipartiteGraph,
    order: Vec<usize>,
    used_b: Vec<bool>,
    used_c: Vec<bool>,
    free_colours: usize,
    free_b: usize,
    cur: Vec<Edge>,
    best: Vec<Edge>,
    nodes: u64,
    budget: u64,
    shared_best: Option<&'g AtomicUsize>,
    shared_nodes: Option<&'g AtomicU64>,
    aborted: bool,
}

impl<'g> Search<'g> {
    fn new(g: &'g ColouredBipartiteGraph, budget: u64) -> Self {
        // fewest options first, ties by index
        let mut order: Vec<usize> = (0..g.a_size()).collect();
        order.sort_by_key(|&a| (g.neighbours_a(a).len(), a));
        let colours = g.colours().len();
        Search {
            g,
            order,
            used_b: vec![false; g.b_size()],
            used_c: vec![false; g.colour_count()],
            free_colours: colours,
            free_b: g.b_size(),
            cur: Vec::new(),
            best: Vec::new(),
            nodes: 0,
            budget,
            shared_best: None,
            shared_nodes: None,
            aborted: false,
        }
    }

    fn best_len(&self) -> usize {
        let local = self.best.len();
        match self.shared_best {
            Some(s) => local.max(s.load(Ordering::Relaxed)),
            None => local,
        }
    }

    fn push(&mut self, e: Edge) {
        self.used_b[e.b] = true;
        self.used_c[e.colour] = true;
        self.free_b -= 1;
        self.free_colours -= 1;
        self.cur.push(e);
    }

    fn pop(&mut self) {
        let e = self.cur.pop().expect("nonempty");
        self.used_b[e.b] = false;
        self.used_c[e.colour] = false;
        self.free_b += 1;
        self.free_colours += 1;
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        let total = match self.shared_nodes {
            Some(s) => s.fetch_add(1, Ordering::Relaxed) + 1,
            None => self.nodes,
        };
        if total > self.budget {
            self.aborted = true;
        }
        !self.aborted
    }

    fn record(&mut self) {
        if self.cur.len() > self.best.len() {
            self.best = self.cur.clone();
            if let Some(s) = self.shared_best {
                s.fetch_max(self.best.len(), Ordering::Relaxed);
            }
        }
    }

    fn dfs(&mut self, i: usize) {
        if !self.tick() {
            return;
        }
        self.record();
        let remaining = self.order.len() - i;
        let bound = self.cur.len() + remaining.min(self.free_b).min(self.free_colours);
        if bound <= self.best_len() || i == self.order.len() {
            return;
        }
        let a = self.order[i];
        let g = self.g;
        for &(c, b) in g.neighbours_a(a) {
            if !self.used_b[b] && !self.used_c[c] {
                self.push(Edge::new(a, b, c));
                self.dfs(i + 1);
                self.pop();
                if self.aborted {
                    return;
                }
            }
        }
        self.dfs(i + 1);
    }
}

/// Exact maximum rainbow matching by branch-and-bound over the A side.
///
/// Deterministic. When the node budget runs out the best matching found so
/// far is returned with `optimal = false`.
pub fn max_rainbow_matching_exact(g: &ColouredBipartiteGraph, budget: u64) -> ExactResult {
    let mut s = Search::new(g, budget);
    s.best = greedy_rainbow(g, &s.order);
    s.dfs(0);
    ExactResult {
        size: s.best.len(),
        optimal: !s.aborted,
        nodes: s.nodes,
        witness: RainbowMatching::unchecked(s.best),
    }
}

/// Parallel variant: branches on the first vertex of the search order are
/// explored on a rayon pool of `threads` workers. The size matches the
/// sequential solver; the witness may differ.
pub fn max_rainbow_matching_parallel(
    g: &ColouredBipartiteGraph,
    budget: u64,
    threads: usize,
) -> ExactResult {
    use rayon::prelude::*;
    if g.a_size() == 0 || threads <= 1 {
        return max_rainbow_matching_exact(g, budget);
    }
    let base = Search::new(g, budget);
    let order = base.order.clone();
    let seed = greedy_rainbow(g, &order);
    let shared_best = AtomicUsize::new(seed.len());
    let shared_nodes = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    let a0 = order[0];
    let mut branches: Vec<Option<Edge>> = g
        .neighbours_a(a0)
        .iter()
        .map(|&(c, b)| Some(Edge::new(a0, b, c)))
        .collect();
    branches.push(None);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let found = Mutex::new(vec![seed]);
    pool.install(|| {
        branches.par_iter().for_each(|first| {
            let mut s = Search::new(g, budget);
            s.order = order.clone();
            s.shared_best = Some(&shared_best);
            s.shared_nodes = Some(&shared_nodes);
            if let Some(e) = first {
                s.push(*e);
            }
            s.dfs(1);
            if s.aborted {
                aborted.store(true, Ordering::Relaxed);
            }
            found.lock().expect("lock").push(s.best);
        })
    });
    let best = found
        .into_inner()
        .expect("lock")
        .into_iter()
        .max_by_key(|m| m.len())
        .unwrap_or_default();
    ExactResult {
        size: best.len(),
        optimal: !aborted.load(Ordering::Relaxed),
        nodes: shared_nodes.load(Ordering::Relaxed),
        witness: RainbowMatching::unchecked(best),
    }
}

fn greedy_rainbow(g: &ColouredBipartiteGraph, order: &[usize]) -> Vec<Edge> {
    let mut used_b = vec![false; g.b_size()];
    let mut used_c = vec![false; g.colour_count()];
    let mut out = Vec::new();
    for &a in order {
        if let Some(&(c, b)) = g
            .neighbours_a(a)
            .iter()
            .find(|&&(c, b)| !used_b[b] && !used_c[c])
        {
            used_b[b] = true;
            used_c[c] = true;
            out.push(Edge::new(a, b, c));
        }
    }
    out
}

fn symbol_rows(square: &LatinArray, cap: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let n = square.order();
    if n > cap {
        return Err(Error::Cap {
            what: "order".into(),
            got: n,
            cap,
        });
    }
    let map = square.colour_map();
    if map.len() > 64 {
        return Err(Error::Cap {
            what: "symbol count".into(),
            got: map.len(),
            cap: 64,
        });
    }
    Ok((0..n)
        .map(|r| {
            (0..n)
                .filter_map(|c| square.get(r, c).map(|s| (c, map[&s])))
                .collect()
        })
        .collect())
}

/// Number of transversals with `n` cells. Order capped at 12.
pub fn count_full_transversals(square: &LatinArray) -> Result<u64> {
    let rows = symbol_rows(square, 12)?;
    fn rec(r: usize, rows: &[Vec<(usize, usize)>], cols: u64, syms: u64) -> u64 {
        if r == rows.len() {
            return 1;
        }
        let mut total = 0;
        for &(c, s) in &rows[r] {
            if cols >> c & 1 == 0 && syms >> s & 1 == 0 {
                total += rec(r + 1, rows, cols | 1 << c, syms | 1 << s);
            }
        }
        total
    }
    Ok(rec(0, &rows, 0, 0))
}

/// Finds one transversal with `n` cells, if any. Order capped at 64.
pub fn find_full_transversal(square: &LatinArray) -> Result<Option<Vec<(usize, usize)>>> {
    find_full_transversal_through(square, None)
}

/// [`find_full_transversal`] restricted to transversals using `cell`.
///
/// Branches on whichever row, column or (when there are exactly `n`
/// symbols) symbol has the fewest live cells, and backtracks as soon as
/// one has none.
pub fn find_full_transversal_through(
    square: &LatinArray,
    cell: Option<(usize, usize)>,
) -> Result<Option<Vec<(usize, usize)>>> {
    let rows = symbol_rows(square, 64)?;
    let n = rows.len();
    let mut symbols = 0;
    for row in &rows {
        for &(_, s) in row {
            symbols = symbols.max(s + 1);
        }
    }
    let mut sym = vec![[NONE; 64]; n];
    let mut col_of = vec![[NONE; 64]; n];
    let mut lines = Lines {
        fr: 0,
        fc: 0,
        fs: 0,
        row_cols: [0; 64],
        col_rows: [0; 64],
        sym_rows: [0; 64],
    };
    for (r, row) in rows.iter().enumerate() {
        for &(c, s) in row {
            sym[r][c] = s as u8;
            col_of[r][s] = c as u8;
            lines.row_cols[r] |= 1 << c;
            lines.col_rows[c] |= 1 << r;
            lines.sym_rows[s] |= 1 << r;
        }
    }
    let full = |k: usize| if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    (lines.fr, lines.fc, lines.fs) = (full(n), full(n), full(symbols));
    let mut st = Dfs {
        sym,
        col_of,
        symbols_primary: symbols == n,
        path: Vec::with_capacity(n),
    };
    if let Some((r, c)) = cell {
        if r >= n || c >= n || st.sym[r][c] == NONE {
            return Err(Error::invalid(format!("no cell at ({r}, {c})")));
        }
        lines = st.place(&lines, r, c);
        st.path.push((r, c));
    }
    if !st.go(&lines) {
        return Ok(None);
    }
    st.path.sort();
    Ok(Some(st.path))
}

const NONE: u8 = u8::MAX;

// free rows/columns/symbols, and for each line the cells not yet blocked
// by a used symbol (rows, columns) or a used column (symbols)
#[derive(Clone)]
struct Lines {
    fr: u64,
    fc: u64,
    fs: u64,
    row_cols: [u64; 64],
    col_rows: [u64; 64],
    sym_rows: [u64; 64],
}

struct Dfs {
    sym: Vec<[u8; 64]>,
    col_of: Vec<[u8; 64]>,
    symbols_primary: bool,
    path: Vec<(usize, usize)>,
}

fn bits(m: u64) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

impl Dfs {
    fn place(&self, l: &Lines, r: usize, c: usize) -> Lines {
        let s = self.sym[r][c] as usize;
        let mut out = l.clone();
        out.fr &= !(1 << r);
        out.fc &= !(1 << c);
        out.fs &= !(1 << s);
        for r2 in bits(out.fr) {
            let c2 = self.col_of[r2][s];
            if c2 != NONE {
                out.row_cols[r2] &= !(1 << c2);
                out.col_rows[c2 as usize] &= !(1 << r2);
            }
            let s2 = self.sym[r2][c];
            if s2 != NONE {
                out.sym_rows[s2 as usize] &= !(1 << r2);
            }
        }
        out
    }

    fn go(&mut self, l: &Lines) -> bool {
        if l.fr == 0 {
            return true;
        }
        // most constrained line: 0 row, 1 column, 2 symbol
        let mut best = (u32::MAX, 0, 0);
        for r in bits(l.fr) {
            best = best.min(((l.row_cols[r] & l.fc).count_ones(), 0, r));
        }
        for c in bits(l.fc) {
            best = best.min(((l.col_rows[c] & l.fr).count_ones(), 1, c));
        }
        if self.symbols_primary {
            for s in bits(l.fs) {
                best = best.min(((l.sym_rows[s] & l.fr).count_ones(), 2, s));
            }
        }
        let (count, kind, i) = best;
        if count == 0 {
            return false;
        }
        let cells: Vec<(usize, usize)> = match kind {
            0 => bits(l.row_cols[i] & l.fc).map(|c| (i, c)).collect(),
            1 => bits(l.col_rows[i] & l.fr).map(|r| (r, i)).collect(),
            _ => bits(l.sym_rows[i] & l.fr)
                .map(|r| (r, self.col_of[r][i] as usize))
                .collect(),
        };
        for (r, c) in cells {
            let next = self.place(l, r, c);
            self.path.push((r, c));
            if self.go(&next) {
                return true;
            }
            self.path.pop();
        }
        false
    }
}

/// Largest transversal size of a full Latin square given as row-major
/// symbols `0..n`, searching only sizes `>= floor`. Returns `floor - 1`
/// style values when nothing reaches the floor. Orders up to 32.
pub fn max_transversal_at_least(cells: &[u8], n: usize, floor: usize) -> usize {
    fn rec(
        r: usize,
        n: usize,
        cells: &[u8],
        cols: u32,
        syms: u32,
        size: usize,
        skips_left: usize,
        best: &mut usize,
    ) {
        if size > *best {
            *best = size;
        }
        if r == n || size + (n - r) <= *best {
            return;
        }
        for c in 0..n {
            let s = cells[r * n + c] as u32;
            if cols >> c & 1 == 0 && syms >> s & 1 == 0 {
                rec(
                    r + 1,
                    n,
                    cells,
                    cols | 1 << c,
                    syms | 1 << s,
                    size + 1,
                    skips_left,
                    best,
                );
                if *best == n {
                    return;
                }
            }
        }
        if skips_left > 0 {
            rec(r + 1, n, cells, cols, syms, size, skips_left - 1, best);
        }
    }
    let mut best = 0;
    rec(0, n, cells, 0, 0, 0, n - floor.min(n), &mut best);
    best
}

/// Size of a maximum matching ignoring colours (an upper bound for rainbow).
pub fn max_matching_size(g: &ColouredBipartiteGraph) -> usize {
    let mut ug = UnGraph::<(), ()>::with_capacity(g.vertex_count(), g.edges().len());
    let nodes: Vec<_> = (0..g.vertex_count()).map(|_| ug.add_node(())).collect();
    for e in g.edges() {
        ug.add_edge(nodes[e.a], nodes[g.a_size() + e.b], ());
    }
    petgraph::algo::maximum_matching(&ug).len()
}

/// Randomised bite-then-clean rounds followed by greedy completion.
///
/// In each round every free A vertex bites with probability `bite`,
/// proposing a random edge to a free B vertex in a free colour. Proposals
/// are processed in random order and clashing ones dropped.
pub fn greedy_nibble_matching(g: &ColouredBipartiteGraph, bite: f64, seed: u64) -> RainbowMatching {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bite = bite.clamp(1e-6, 1.0);
    let mut used_a = vec![false; g.a_size()];
    let mut used_b = vec![false; g.b_size()];
    let mut used_c = vec![false; g.colour_count()];
    let mut m = Vec::new();
    let mut idle = 0;
    while idle < 3 {
        let mut proposals = Vec::new();
        for a in 0..g.a_size() {
            if used_a[a] || !rng.gen_bool(bite) {
                continue;
            }
            let opts: Vec<_> = g
                .neighbours_a(a)
                .iter()
                .filter(|&&(c, b)| !used_b[b] && !used_c[c])
                .collect();
            if let Some(&&(c, b)) = opts.choose(&mut rng) {
                proposals.push(Edge::new(a, b, c));
            }
        }
        if proposals.is_empty() {
            idle += 1;
            continue;
        }
        idle = 0;
        proposals.shuffle(&mut rng);
        for e in proposals {
            if !used_b[e.b] && !used_c[e.colour] {
                used_a[e.a] = true;
                used_b[e.b] = true;
                used_c[e.colour] = true;
                m.push(e);
            }
        }
    }
    let mut rest: Vec<Edge> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| !used_a[e.a] && !used_b[e.b] && !used_c[e.colour])
        .collect();
    rest.shuffle(&mut rng);
    for e in rest {
        if !used_a[e.a] && !used_b[e.b] && !used_c[e.colour] {
            used_a[e.a] = true;
            used_b[e.b] = true;
            used_c[e.colour] = true;
            m.push(e);
        }
    }
    RainbowMatching::unchecked(m)
}

/// Random local search that never shrinks the matching.
///
/// Each round inserts a random non-matching edge and evicts the matching
/// edges clashing with it (at its endpoints or its colour). The move is
/// kept when at most one edge was evicted, after which free edges are
/// added greedily.
pub fn local_switch_augment(
    g: &ColouredBipartiteGraph,
    m: &RainbowMatching,
    rounds: usize,
    seed: u64,
) -> Result<RainbowMatching> {
    m.check_in(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = g.a_size().min(g.b_size()).min(g.colours().len());
    let mut at_a: Vec<Option<Edge>> = vec![None; g.a_size()];
    let mut at_b: Vec<Option<Edge>> = vec![None; g.b_size()];
    let mut at_c: Vec<Option<Edge>> = vec![None; g.colour_count()];
    let mut size = 0;
    let put = |e: Edge,
               at_a: &mut Vec<Option<Edge>>,
               at_b: &mut Vec<Option<Edge>>,
               at_c: &mut Vec<Option<Edge>>| {
        at_a[e.a] = Some(e);
        at_b[e.b] = Some(e);
        at_c[e.colour] = Some(e);
    };
    let take = |e: Edge,
                at_a: &mut Vec<Option<Edge>>,
                at_b: &mut Vec<Option<Edge>>,
                at_c: &mut Vec<Option<Edge>>| {
        at_a[e.a] = None;
        at_b[e.b] = None;
        at_c[e.colour] = None;
    };
    for &e in m.edges() {
        put(e, &mut at_a, &mut at_b, &mut at_c);
        size += 1;
    }
    let edges = g.edges();
    let fill = |at_a: &mut Vec<Option<Edge>>,
                at_b: &mut Vec<Option<Edge>>,
                at_c: &mut Vec<Option<Edge>>,
                size: &mut usize| {
        for a in 0..g.a_size() {
            if at_a[a].is_some() {
                continue;
            }
            for &(c, b) in g.neighbours_a(a) {
                if at_b[b].is_none() && at_c[c].is_none() {
                    let e = Edge::new(a, b, c);
                    at_a[a] = Some(e);
                    at_b[b] = Some(e);
                    at_c[c] = Some(e);
                    *size += 1;
                    break;
                }
            }
        }
    };
    fill(&mut at_a, &mut at_b, &mut at_c, &mut size);
    for _ in 0..rounds {
        if size >= upper || edges.is_empty() {
            break;
        }
        let e = edges[rng.gen_range(0..edges.len())];
        if at_a[e.a] == Some(e) {
            continue;
        }
        let mut clash: Vec<Edge> = [at_a[e.a], at_b[e.b], at_c[e.colour]]
            .into_iter()
            .flatten()
            .collect();
        clash.sort();
        clash.dedup();
        if clash.len() > 1 {
            continue;
        }
        for &f in &clash {
            take(f, &mut at_a, &mut at_b, &mut at_c);
            size -= 1;
        }
        put(e, &mut at_a, &mut at_b, &mut at_c);
        size += 1;
        fill(&mut at_a, &mut at_b, &mut at_c, &mut size);
    }
    let out: Vec<Edge> = at_a.into_iter().flatten().collect();
    Ok(RainbowMatching::unchecked(out))
}

/// Rainbow matching with at least `ceil(1.8 d)` edges when every colour is
/// rare and the minimum degree is at least `d`.
///
/// Keeps a maximal rainbow matching and, while it is short, replaces an edge
/// `a_i b_i` whose endpoints both have degree at least `4d` by two edges
/// `a_i b'`, `a' b_i` to unmatched vertices in two fresh colours.
pub fn rare_colour_matching(g: &ColouredBipartiteGraph, d: usize) -> Result<RainbowMatching> {
    let n = g.a_size().max(g.b_size());
    let cap = n / 100;
    if d > cap {
        return Err(Error::invalid(format!("d = {d} exceeds N/100 = {cap}")));
    }
    if let Some(c) = g
        .colours()
        .into_iter()
        .find(|&c| g.colour_class_size(c) > cap)
    {
        return Err(Error::invalid(format!(
            "colour {c} has {} edges, more than N/100 = {cap}",
            g.colour_class_size(c)
        )));
    }
    if g.min_degree() < d {
        return Err(Error::invalid(format!(
            "minimum degree {} below d = {d}",
            g.min_degree()
        )));
    }
    let target = (9 * d).div_ceil(5);
    let mut used_a = vec![false; g.a_size()];
    let mut used_b = vec![false; g.b_size()];
    let mut used_c = vec![false; g.colour_count()];
    let mut m: Vec<Edge> = Vec::new();
    let extend =
        |m: &mut Vec<Edge>, used_a: &mut [bool], used_b: &mut [bool], used_c: &mut [bool]| {
            for e in g.edges() {
                if !used_a[e.a] && !used_b[e.b] && !used_c[e.colour] {
                    used_a[e.a] = true;
                    used_b[e.b] = true;
                    used_c[e.colour] = true;
                    m.push(*e);
                }
            }
        };
    loop {
        extend(&mut m, &mut used_a, &mut used_b, &mut used_c);
        if m.len() >= target {
            return Ok(RainbowMatching::unchecked(m));
        }
        let mut swap = None;
        'outer: for (i, e) in m.iter().enumerate() {
            if g.neighbours_a(e.a).len() < 4 * d || g.neighbours_b(e.b).len() < 4 * d {
                continue;
            }
            for &(c1, b1) in g.neighbours_a(e.a) {
                if used_b[b1] || used_c[c1] {
                    continue;
                }
                for &(c2, a2) in g.neighbours_b(e.b) {
                    if !used_a[a2] && !used_c[c2] && c2 != c1 {
                        swap = Some((i, Edge::new(e.a, b1, c1), Edge::new(a2, e.b, c2)));
                        break 'outer;
                    }
                }
            }
        }
        match swap {
            Some((i, e1, e2)) => {
                let old = m.swap_remove(i);
                used_c[old.colour] = false;
                for e in [e1, e2] {
                    used_a[e.a] = true;
                    used_b[e.b] = true;
                    used_c[e.colour] = true;
                    m.push(e);
                }
            }
            None => {
                return Err(Error::exhausted(
                    "1.8d exchange",
                    format!(
                        "maximal rainbow matching of size {} < {target} with no exchangeable edge",
                        m.len()
                    ),
                ))
            }
        }
    }
}

/// Rainbow graph on `n + n` vertices: `d` vertices on each side are joined
/// to every vertex of the other side, every edge in its own colour.
/// Every vertex has degree at least `d` and no rainbow matching exceeds `2d`.
pub fn two_blob_graph(n: usize, d: usize) -> ColouredBipartiteGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a < d || b < d {
                edges.push(Edge::new(a, b, edges.len()));
            }
        }
    }
    ColouredBipartiteGraph::new(n, n, edges).expect("rainbow graph is proper")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cyclic_graph, group_table, FiniteAbelianGroup};
    use crate::latin::{all_latin_squares, Transversal};

    // exhaustive oracle over injective partial maps, no pruning
    pub(crate) fn naive_max(g: &ColouredBipartiteGraph) -> usize {
        fn rec(
            g: &ColouredBipartiteGraph,
            a: usize,
            used_b: &mut Vec<bool>,
            used_c: &mut Vec<bool>,
        ) -> usize {
            if a == g.a_size() {
                return 0;
            }
            let mut best = rec(g, a + 1, used_b, used_c);
            for b in 0..g.b_size() {
                if let Some(c) = g.colour(a, b) {
                    if !used_b[b] && !used_c[c] {
                        used_b[b] = true;
                        used_c[c] = true;
                        best = best.max(1 + rec(g, a + 1, used_b, used_c));
                        used_b[b] = false;
                        used_c[c] = false;
                    }
                }
            }
            best
        }
        rec(
            g,
            0,
            &mut vec![false; g.b_size()],
            &mut vec![false; g.colour_count()],
        )
    }

    #[test]
    fn small_cyclic_maxima() {
        assert_eq!(
            max_rainbow_matching_exact(&cyclic_graph(2), DEFAULT_BUDGET).size,
            1
        );
        let r7 = max_rainbow_matching_exact(&cyclic_graph(7), DEFAULT_BUDGET);
        assert_eq!((r7.size, r7.optimal), (7, true));
        r7.witness.check_in(&cyclic_graph(7)).unwrap();
        let r4 = max_rainbow_matching_exact(&cyclic_graph(4), DEFAULT_BUDGET);
        assert_eq!((r4.size, r4.optimal), (3, true));
        assert_eq!(naive_max(&cyclic_graph(4)), 3);
    }

    #[test]
    fn order3_squares_agree_with_naive() {
        for n in 1..=3 {
            for l in all_latin_squares(n) {
                let g = crate::graph::latin_to_graph(&l);
                assert_eq!(
                    max_rainbow_matching_exact(&g, DEFAULT_BUDGET).size,
                    naive_max(&g)
                );
            }
        }
    }

    #[test]
    fn budget_exhaustion_flags_non_optimal() {
        let r = max_rainbow_matching_exact(&cyclic_graph(8), 10);
        assert!(!r.optimal);
        r.witness.check_in(&cyclic_graph(8)).unwrap();
    }

    #[test]
    fn transversal_counts() {
        let count =
            |n| count_full_transversals(&group_table(&FiniteAbelianGroup::cyclic(n))).unwrap();
        assert_eq!(count(2), 0);
        assert_eq!(count(3), 3);
        assert_eq!(count(5), 15);
        assert_eq!(count(7), 133);
        let big = group_table(&FiniteAbelianGroup::cyclic(13));
        assert!(count_full_transversals(&big).is_err());
    }

    #[test]
    fn finder_agrees_with_counter() {
        for sq in all_latin_squares(4) {
            let found = find_full_transversal(&sq).unwrap();
            assert_eq!(found.is_some(), count_full_transversals(&sq).unwrap() > 0);
            if let Some(cells) = found {
                assert!(Transversal::new(cells, &sq).unwrap().is_full(&sq));
            }
        }
        // holes and a fifth symbol
        let arr = LatinArray::new(vec![
            vec![Some(0), Some(1), None],
            vec![Some(1), Some(4), Some(0)],
            vec![None, Some(0), Some(1)],
        ])
        .unwrap();
        let cells = find_full_transversal(&arr).unwrap().unwrap();
        assert!(Transversal::new(cells, &arr).unwrap().is_full(&arr));
        let z6 = group_table(&FiniteAbelianGroup::cyclic(6));
        assert_eq!(
            find_full_transversal_through(&z6, Some((0, 0))).unwrap(),
            None
        );
        let z7 = group_table(&FiniteAbelianGroup::cyclic(7));
        let t = find_full_transversal_through(&z7, Some((3, 5)))
            .unwrap()
            .unwrap();
        assert!(t.contains(&(3, 5)));
    }

    #[test]
    fn nibble_basics() {
        for seed in 0..10 {
            let m = greedy_nibble_matching(&cyclic_graph(3), 0.5, seed);
            assert!(m.len() >= 2);
        }
        let mut edges = Vec::new();
        for a in 0..50 {
            for b in 0..50 {
                edges.push(Edge::new(a, b, a * 50 + b));
            }
        }
        let g = ColouredBipartiteGraph::new(50, 50, edges).unwrap();
        assert_eq!(greedy_nibble_matching(&g, 0.1, 1).len(), 50);
    }

    #[test]
    fn augment_reaches_full_on_z9() {
        let g = cyclic_graph(9);
        let start = greedy_nibble_matching(&g, 0.2, 0);
        let out = local_switch_augment(&g, &start, 10_000, 0).unwrap();
        out.check_in(&g).unwrap();
        assert_eq!(out.len(), 9);
    }

    #[test]
    fn rare_colour_preconditions_and_blob() {
        let g = two_blob_graph(400, 4);
        assert!(rare_colour_matching(&g, 0).is_ok());
        let m = rare_colour_matching(&g, 4).unwrap();
        m.check_in(&g).unwrap();
        assert_eq!(m.len(), 8);
        assert_eq!(max_matching_size(&g), 8);
        assert!(rare_colour_matching(&g, 5).is_err());
    }
}
