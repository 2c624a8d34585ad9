use std::collections::BTreeSet;

use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Degree bound of the template in the asymptotic argument.
pub const TEMPLATE_MAX_DEGREE: usize = 100;

/// Largest `h` whose subset checks are run by default.
pub const TEMPLATE_H_CAP: usize = 15;

/// Bipartite graph between `X` (`h` vertices) and `Y + Z` (`2h/3` each)
/// such that for every `Z0` in `Z` of size `h/3`, `X` has a perfect
/// matching into `Y + Z0`.
///
/// Right-hand vertices are numbered `0..2h/3` for `Y` then `2h/3..4h/3` for `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RobustTemplate {
    pub h: usize,
    /// `adj[x]` lists the right-hand neighbours of `x`, sorted.
    pub adj: Vec<Vec<usize>>,
    pub max_degree: usize,
    /// Number of `Z0` subsets checked when the template was certified.
    pub subsets_checked: usize,
}

impl RobustTemplate {
    pub fn y_size(&self) -> usize {
        2 * self.h / 3
    }

    pub fn z_size(&self) -> usize {
        2 * self.h / 3
    }

    /// Right-hand index of `Z` vertex `z`.
    pub fn z(&self, z: usize) -> usize {
        self.y_size() + z
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Degree of right-hand vertex `r`.
    pub fn right_degree(&self, r: usize) -> usize {
        self.adj.iter().filter(|n| n.contains(&r)).count()
    }

    /// A perfect matching of `X` into `Y + z0` (`z0` given as `Z` indices),
    /// as `X -> right-hand index`.
    pub fn matching(&self, z0: &[usize]) -> Option<Vec<usize>> {
        let right: BTreeSet<usize> = (0..self.y_size())
            .chain(z0.iter().map(|&z| self.z(z)))
            .collect();
        let (size, pairs) = match_into(&self.adj, &right);
        (size == self.h).then(|| {
            let mut out = vec![0; self.h];
            for (x, r) in pairs {
                out[x] = r;
            }
            out
        })
    }

    /// Largest shortfall `h - matching size` over all `Z0`, and the number
    /// of subsets checked. Zero means the template property holds.
    pub fn deficiency(&self) -> (usize, usize) {
        deficiency(&self.adj, self.h)
    }
}

fn match_into(adj: &[Vec<usize>], right: &BTreeSet<usize>) -> (usize, Vec<(usize, usize)>) {
    let h = adj.len();
    let r_ids: Vec<usize> = right.iter().copied().collect();
    let mut g = UnGraph::<(), ()>::new_undirected();
    let xs: Vec<_> = (0..h).map(|_| g.add_node(())).collect();
    let rs: Vec<_> = r_ids.iter().map(|_| g.add_node(())).collect();
    for (x, ns) in adj.iter().enumerate() {
        for r in ns {
            if let Ok(pos) = r_ids.binary_search(r) {
                g.add_edge(xs[x], rs[pos], ());
            }
        }
    }
    let m = maximum_matching(&g);
    let pairs = (0..h)
        .filter_map(|x| m.mate(xs[x]).map(|r| (x, r_ids[r.index() - h])))
        .collect();
    (m.len(), pairs)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn deficiency(adj: &[Vec<usize>], h: usize) -> (usize, usize) {
    let ys = 2 * h / 3;
    let all = subsets(ys, h / 3);
    let worst = all
        .iter()
        .map(|z0| {
            let right: BTreeSet<usize> = (0..ys).chain(z0.iter().map(|z| ys + z)).collect();
            h - match_into(adj, &right).0
        })
        .max()
        .unwrap_or(0);
    (worst, all.len())
}

/// Samples templates in which each `x` joins `degree` random right-hand
/// vertices, starting at degree 2 and raising it after each failed
/// attempt, until one passes the exhaustive check over every `Z0`. The
/// winner is then pruned: edges are dropped greedily while the property
/// still holds.
pub fn build_template(h: usize, seed: u64, attempts: usize) -> Result<RobustTemplate> {
    if h < 3 || !h.is_multiple_of(3) {
        return Err(Error::invalid(format!(
            "h = {h} must be a positive multiple of 3"
        )));
    }
    if h > TEMPLATE_H_CAP {
        return Err(Error::Cap {
            what: "template h".into(),
            got: h,
            cap: TEMPLATE_H_CAP,
        });
    }
    let right = 4 * h / 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = usize::MAX;
    for attempt in 0..attempts {
        let degree = (2 + attempt / 4).min(right);
        let pool: Vec<usize> = (0..right).collect();
        let mut adj: Vec<Vec<usize>> = (0..h)
            .map(|_| {
                let mut ns: Vec<usize> = pool.choose_multiple(&mut rng, degree).copied().collect();
                ns.sort();
                ns
            })
            .collect();
        let (def, _) = deficiency(&adj, h);
        best = best.min(def);
        if def > 0 {
            continue;
        }
        prune(&mut adj, h);
        let (def, checked) = deficiency(&adj, h);
        debug_assert_eq!(def, 0);
        let max_degree = (0..right)
            .map(|r| adj.iter().filter(|n| n.contains(&r)).count())
            .chain(adj.iter().map(Vec::len))
            .max()
            .unwrap_or(0);
        if max_degree > TEMPLATE_MAX_DEGREE {
            continue;
        }
        return Ok(RobustTemplate {
            h,
            adj,
            max_degree,
            subsets_checked: checked,
        });
    }
    Err(Error::exhausted(
        "template",
        format!("{attempts} attempts, best deficiency {best}"),
    ))
}

fn prune(adj: &mut [Vec<usize>], h: usize) {
    // drop edges at lightly loaded right-hand vertices first so that load
    // concentrates on a few; callers park idle slots there
    let mut order: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(x, ns)| ns.iter().map(move |&r| (x, r)))
        .collect();
    let load = |r: usize, adj: &[Vec<usize>]| adj.iter().filter(|n| n.contains(&r)).count();
    order.sort_by_key(|&(x, r)| (load(r, adj), x, r));
    for (x, r) in order {
        let pos = adj[x].iter().position(|&y| y == r).expect("edge present");
        adj[x].remove(pos);
        if deficiency(adj, h).0 > 0 {
            adj[x].insert(pos, r);
        }
    }
}
