// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Oracles here are written independently of the library searches.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use tvl::constructions::{group_table, FiniteAbelianGroup};
use tvl::expander::{verify_expansion, ExpanderParams, Mode, SimpleGraph};
use tvl::latin::for_each_latin_square;
use tvl::solvers::{count_full_transversals, max_rainbow_matching_exact, DEFAULT_BUDGET};

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }
    };
}

example!(absorber);
example!(addition_steps);
example!(cyclic_parity);
example!(distributive_absorber);
example!(exhaustive_small_orders);
example!(expander_extraction);
example!(four_cycles);
example!(hall_paige);
example!(maillet_blowup);
example!(parallel_solver);
example!(pseudorandom_audit);
example!(rare_colours);
example!(robust_template);
example!(steiner_brouwer);
example!(switcher_bounds);

/// Frozen after agreeing with `permutation_oracle`.
const FULL_TRANSVERSALS: [(usize, u64); 3] = [(3, 3), (5, 15), (7, 133)];

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

// for every column permutation: longest prefix-free set of distinct symbols
fn permutation_oracle(cells: &[usize], n: usize, perms: &[Vec<usize>]) -> (usize, u64) {
    let mut best = 0;
    let mut full = 0;
    for p in perms {
        // largest subset of rows with distinct symbols along p: brute force
        for mask in 0u32..1 << n {
            let k = mask.count_ones() as usize;
            if k <= best && k < n {
                continue;
            }
            let syms: BTreeSet<usize> = (0..n)
                .filter(|r| mask >> r & 1 == 1)
                .map(|r| cells[r * n + p[r]])
                .collect();
            if syms.len() == k {
                best = best.max(k);
                if k == n {
                    full += 1;
                }
            }
        }
    }
    (best, full)
}

fn naive_c4(g: &SimpleGraph) -> u64 {
    let n = g.vertex_count();
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if distinct
                        && g.has_edge(a, b)
                        && g.has_edge(b, c)
                        && g.has_edge(c, d)
                        && g.has_edge(d, a)
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

// every K with max degree <= cap, every U with |U| <= 2n/3
fn naive_expander(g: &SimpleGraph, alpha: f64, cap: usize) -> bool {
    let edges = g.edges();
    let n = g.vertex_count();
    for mask in 0u64..1 << edges.len() {
        let mut deg = vec![0; n];
        let mut adj = vec![BTreeSet::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                deg[u] += 1;
                deg[v] += 1;
            } else {
                adj[u].insert(v);
                adj[v].insert(u);
            }
        }
        if deg.iter().any(|&d| d > cap) {
            continue;
        }
        for set in 1u32..1 << n {
            let size = set.count_ones() as usize;
            if size > 2 * n / 3 {
                continue;
            }
            let nb: BTreeSet<usize> = (0..n)
                .filter(|&u| set >> u & 1 == 1)
                .flat_map(|u| adj[u].iter().copied())
                .filter(|&v| set >> v & 1 == 0)
                .collect();
            if (nb.len() as f64) < alpha * size as f64 {
                return false;
            }
        }
    }
    true
}

fn expander_corpus() -> Vec<(String, SimpleGraph)> {
    let mut out = vec![
        ("K4".to_string(), SimpleGraph::complete(4)),
        ("K5".to_string(), SimpleGraph::complete(5)),
        ("C6".to_string(), SimpleGraph::cycle(6)),
        ("C10".to_string(), SimpleGraph::cycle(10)),
        ("P7".to_string(), SimpleGraph::path(7)),
        ("P10".to_string(), SimpleGraph::path(10)),
        ("Q3".to_string(), SimpleGraph::hypercube(3)),
        ("barbell3".to_string(), SimpleGraph::barbell(3)),
        (
            "star9".to_string(),
            SimpleGraph::new(10, &(1..10).map(|v| (0, v)).collect::<Vec<_>>()).unwrap(),
        ),
        ("empty5".to_string(), SimpleGraph::empty(5)),
    ];
    let mut seed = 0;
    while out.len() < 30 {
        let n = 4 + (seed % 7) as usize;
        let g = SimpleGraph::gnp(n, 0.35, seed);
        if g.edge_count() <= 12 {
            out.push((format!("gnp{n}/{seed}"), g));
        }
        seed += 1;
    }
    out
}

type Check = Box<dyn Fn() -> Result<String, String>>;

fn ensure(ok: bool, what: String) -> Result<String, String> {
    if ok {
        Ok(what)
    } else {
        Err(what)
    }
}

fn criteria() -> Vec<(&'static str, Check)> {
    vec![
        (
            "exhaustive orders 4 and 5",
            Box::new(|| {
                let s = exhaustive_small_orders::run_example().map_err(|e| e.to_string())?;
                let perms = permutations(4);
                let mut mismatches = 0;
                for_each_latin_square(4, |cells| {
                    let cs: Vec<usize> = cells.iter().map(|&c| c as usize).collect();
                    let (best, _) = permutation_oracle(&cs, 4, &perms);
                    if tvl::solvers::max_transversal_at_least(cells, 4, 0) != best {
                        mismatches += 1;
                    }
                });
                ensure(
                    s[0].squares == 576
                        && s[1].squares == 161_280
                        && s[0].min_max_transversal >= 3
                        && s[1].min_max_transversal >= 4
                        && s[1].without_full == 0
                        && mismatches == 0,
                    format!(
                        "{} and {} squares; min max transversal {} / {}; order 5 without full: {}; oracle mismatches {}",
                        s[0].squares, s[1].squares, s[0].min_max_transversal, s[1].min_max_transversal, s[1].without_full, mismatches
                    ),
                )
            }),
        ),
        (
            "cyclic parity obstruction",
            Box::new(|| {
                let rows = cyclic_parity::run_example().map_err(|e| e.to_string())?;
                let bad: Vec<usize> = rows
                    .iter()
                    .filter(|r| !r.optimal || r.max != if r.n % 2 == 0 { r.n - 1 } else { r.n })
                    .map(|r| r.n)
                    .collect();
                ensure(
                    bad.is_empty(),
                    format!("n = 2..11 exact, mismatches at {bad:?}"),
                )
            }),
        ),
        (
            "full transversal counts",
            Box::new(|| {
                let mut got = Vec::new();
                for (n, frozen) in FULL_TRANSVERSALS {
                    let sq = group_table(&FiniteAbelianGroup::cyclic(n));
                    let cells: Vec<usize> = sq.cells().iter().map(|c| c.expect("full")).collect();
                    let (_, oracle) = permutation_oracle_full(&cells, n);
                    let lib = count_full_transversals(&sq).map_err(|e| e.to_string())?;
                    got.push((n, lib, oracle, frozen));
                }
                ensure(
                    got.iter().all(|&(_, l, o, f)| l == f && o == f),
                    format!("(n, library, oracle, frozen) {got:?}"),
                )
            }),
        ),
        (
            "blow-up of Z2 by 3",
            Box::new(|| {
                let runs = maillet_blowup::run_example().map_err(|e| e.to_string())?;
                let ok = runs
                    .iter()
                    .filter(|r| r.order == 6 && r.latin && r.optimal && r.max == 5)
                    .count();
                ensure(
                    ok == 20,
                    format!(
                        "{ok} of {} colourings have max transversal exactly 5",
                        runs.len()
                    ),
                )
            }),
        ),
        (
            "complete mappings of abelian groups",
            Box::new(|| {
                let rows = hall_paige::run_example().map_err(|e| e.to_string())?;
                let bad: Vec<&str> = rows
                    .iter()
                    .filter(|r| r.has_complete_mapping != r.sylow_test)
                    .map(|r| r.label.as_str())
                    .collect();
                ensure(
                    bad.is_empty(),
                    format!(
                        "{} groups of order <= 16, disagreements {bad:?}",
                        rows.len()
                    ),
                )
            }),
        ),
        (
            "switcher overlap bounds",
            Box::new(|| {
                let runs = switcher_bounds::run_example().map_err(|e| e.to_string())?;
                let bad = runs.iter().filter(|(_, _, r)| !r.holds).count();
                let total: usize = runs.iter().map(|(_, _, r)| r.switchers).sum();
                ensure(
                    bad == 0,
                    format!(
                        "{} squares, {total} switchers, {bad} violations",
                        runs.len()
                    ),
                )
            }),
        ),
        (
            "labelled 4-cycle lower bound",
            Box::new(|| {
                let rows = four_cycles::run_example().map_err(|e| e.to_string())?;
                let bad = rows.iter().filter(|r| (r.count as f64) < r.bound).count();
                // recount the small ones by brute force
                let mut rng_seed = 7u64;
                let mut recount_bad = 0;
                for n in 1..=12 {
                    for _ in 0..5 {
                        rng_seed += 1;
                        let g = SimpleGraph::gnp(n, 0.5, rng_seed);
                        if g.labelled_c4_count() != naive_c4(&g) {
                            recount_bad += 1;
                        }
                    }
                }
                ensure(
                    bad == 0 && recount_bad == 0,
                    format!("{} graphs, {bad} below bound; brute-force recount mismatches {recount_bad}", rows.len()),
                )
            }),
        ),
        (
            "expander extraction",
            Box::new(|| {
                let runs = expander_extraction::run_example().map_err(|e| e.to_string())?;
                let bad_runs = runs
                    .iter()
                    .filter(|r| !(r.degree_ok() && r.trace_ok()))
                    .count();
                let mut disagree = Vec::new();
                let corpus = expander_corpus();
                for (name, g) in &corpus {
                    for (alpha, cap) in [(0.5, 0), (0.5, 1), (1.0, 1), (0.3, 2)] {
                        let p = ExpanderParams {
                            alpha,
                            delta_cap: cap as f64,
                        };
                        let r =
                            verify_expansion(g, p, Mode::Exact, 0).map_err(|e| e.to_string())?;
                        if r.passed != naive_expander(g, alpha, cap) {
                            disagree.push(format!("{name}@{alpha}/{cap}"));
                        }
                    }
                }
                ensure(
                    bad_runs == 0 && disagree.is_empty(),
                    format!(
                        "{} G(50,0.3) runs, {bad_runs} failing; {} corpus graphs x 4 parameter sets, disagreements {disagree:?}",
                        runs.len(),
                        corpus.len()
                    ),
                )
            }),
        ),
        (
            "pseudorandom group tables",
            Box::new(|| {
                let audits = pseudorandom_audit::run_example().map_err(|e| e.to_string())?;
                let failed: Vec<String> = audits
                    .iter()
                    .flat_map(|a| {
                        a.properties
                            .iter()
                            .filter(|p| !p.holds)
                            .map(move |p| format!("Z{}:{}", a.n, p.name))
                    })
                    .collect();
                ensure(
                    audits.iter().all(|a| a.passed),
                    format!("Z7, Z9, Z11 at p=1, eps=0.5, alpha=1e-4; failures {failed:?}"),
                )
            }),
        ),
        (
            "gadget validation",
            Box::new(|| {
                let err = |e: tvl::Error| e.to_string();
                let ts = robust_template::run_example().map_err(err)?;
                let t_ok =
                    ts.iter().map(|t| t.deficiency()).collect::<Vec<_>>() == vec![(0, 20), (0, 70)];
                let a = absorber::run_example().map_err(err)?;
                let a_ok = a.checks.iter().all(|&c| c) && a.checks.len() == 5 && a.validated;
                let d = distributive_absorber::run_example().map_err(err)?;
                let d_ok = d.choices == 3 && d.absorber.ledger_gap() == 0;
                let ledger = addition_steps::run_example().map_err(err)?;
                let s_ok = ledger.len() == 6
                    && ledger.iter().all(|l| {
                        l.m_id == 20 + l.step
                            && l.m_rb == 60
                            && l.vertices == 162 + 2 * l.step
                            && l.colours_unchanged
                    });
                ensure(
                    t_ok && a_ok && d_ok && s_ok,
                    format!(
                        "template {t_ok}, absorber {}/5, distributive {} of 3 subsets, addition ledgers {s_ok}",
                        a.checks.iter().filter(|&&c| c).count(),
                        d.choices
                    ),
                )
            }),
        ),
        (
            "rare colour matching",
            Box::new(|| {
                let runs = rare_colours::run_example().map_err(|e| e.to_string())?;
                let min = runs.iter().map(|(_, m)| m.len()).min().unwrap_or(0);
                ensure(
                    runs.len() == 50 && min >= 9,
                    format!("{} instances, smallest {min} >= 9", runs.len()),
                )
            }),
        ),
        (
            "triple system matchings",
            Box::new(|| {
                let start = Instant::now();
                let rs = steiner_brouwer::run_example().map_err(|e| e.to_string())?;
                let took = start.elapsed();
                let sizes: Vec<usize> = rs.iter().map(|r| r.best_size).collect();
                ensure(
                    sizes[0] == 3
                        && sizes[1] >= 4
                        && sizes[2] >= 6
                        && took < Duration::from_secs(120),
                    format!(
                        "STS(9) {}, STS(15) {}, STS(21) {} in {:.1?}",
                        sizes[0], sizes[1], sizes[2], took
                    ),
                )
            }),
        ),
        (
            "determinism and parallel agreement",
            Box::new(|| {
                let runs = parallel_solver::run_example().map_err(|e| e.to_string())?;
                let bad: Vec<&String> = runs
                    .iter()
                    .filter(|(_, s, p, o)| s != p || !o)
                    .map(|r| &r.0)
                    .collect();
                let reruns_equal = parallel_solver::instances().iter().all(|(_, g)| {
                    max_rainbow_matching_exact(g, DEFAULT_BUDGET)
                        == max_rainbow_matching_exact(g, DEFAULT_BUDGET)
                });
                ensure(
                    bad.is_empty() && reruns_equal,
                    format!(
                        "{} instances, parallel size mismatches {bad:?}, sequential reruns identical {reruns_equal}",
                        runs.len()
                    ),
                )
            }),
        ),
    ]
}

fn permutation_oracle_full(cells: &[usize], n: usize) -> (usize, u64) {
    let mut full = 0;
    for p in permutations(n) {
        let syms: BTreeSet<usize> = (0..n).map(|r| cells[r * n + p[r]]).collect();
        if syms.len() == n {
            full += 1;
        }
    }
    (n, full)
}

fn main() {
    let mut failed = 0;
    for (i, (name, check)) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let r = check();
        let took = start.elapsed();
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag} {name}: {detail} [{:.1?}]",
            i + 1,
            took
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
