//! Command-line front end. `run` parses arguments, dispatches, and maps
//! errors to exit codes: 0 ok, 1 precondition, 2 exhaustion, 64 usage.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::absorption::{
    addition_step, build_absorber_with, build_template, distributive_absorber, AdditionState,
    Layout,
};
use crate::classes::{classify_colours, test_pair_exchangeable, ClassifierConfig, ExchangeParams};
use crate::constructions::{cyclic_graph, property_p_violation, Family};
use crate::error::{Error, Result};
use crate::expander::{
    default_alpha, extract_expander, verify_expansion, ExpanderParams, Mode, SimpleGraph,
};
use crate::graph::{latin_to_graph, ColouredBipartiteGraph, Edge, Vertex};
use crate::latin::LatinArray;
use crate::pseudorandom::{audit_pseudorandom, AuditConfig, AuditMode};
use crate::solvers::{
    count_full_transversals, greedy_nibble_matching, local_switch_augment,
    max_rainbow_matching_exact, max_rainbow_matching_parallel, DEFAULT_BUDGET,
};
use crate::steiner::{
    bose_sts, brouwer_pipeline, tripartition_reduce, tripartition_reduce_balanced, PipelineConfig,
    TripleSystem,
};
use crate::switchers::{check_count_bounds, enumerate_switchers4, weight_matrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "tvl",
    version,
    about = "Transversals, rainbow matchings and switching gadgets"
)]
struct Cli {
    /// Master seed; the TVL_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel searches.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// cyclic | abelian:<f1>x<f2>.. | maillet:<m>:<factors> | random:<seed>:<burnin>
    #[arg(long, default_value = "cyclic")]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    /// Latin square JSON {"n","cells"} or graph JSON {"a","b","edges"}.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a Latin square.
    Gen(Source),
    /// Maximum rainbow matching.
    Solve {
        #[command(flatten)]
        src: Source,
        #[arg(long, conflicts_with_all = ["nibble", "augment"])]
        exact: bool,
        #[arg(long, conflicts_with = "augment")]
        nibble: bool,
        #[arg(long)]
        augment: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0.1)]
        bite: f64,
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
    },
    /// Order-4 colour switchers.
    Switchers {
        #[command(flatten)]
        src: Source,
        /// Switchers for one pair "c,d".
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        matrix: bool,
        #[arg(long)]
        bounds: bool,
    },
    /// Colour classes from switcher weights.
    Classes {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        w0: Option<u64>,
        #[arg(long)]
        w1: Option<u64>,
        #[arg(long)]
        w2: Option<u64>,
        #[arg(long)]
        quantiles: bool,
        /// Exchange test for a pair "c,d".
        #[arg(long)]
        test_pair: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        big_l: usize,
        #[arg(long, default_value_t = 8)]
        ell: usize,
    },
    /// Expander extraction and verification.
    Expander {
        /// gnp:<n>:<p> | complete:<n> | cycle:<n> | path:<n> | hypercube:<k> | barbell:<k>
        #[arg(long, default_value = "gnp:50:0.3")]
        graph: String,
        #[arg(long, conflicts_with = "verify")]
        extract: bool,
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Heuristic)]
        mode: ModeArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Proper-pseudorandomness audit.
    Audit {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-4)]
        alpha: f64,
        /// e.g. "1-7" or "1,3,5".
        #[arg(long, default_value = "1-7")]
        properties: String,
        #[arg(long, value_enum, default_value_t = AuditModeArg::Greedy)]
        mode: AuditModeArg,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Absorbers on colour-c0 targets.
    Absorb {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 5)]
        targets: usize,
        /// Built-in instance: Z31 (or Z67 with --distributive).
        #[arg(long)]
        demo: bool,
        #[arg(long, value_enum, default_value_t = LayoutArg::Anchored)]
        layout: LayoutArg,
        /// Distributive absorber over a template with h = 3 * targets.
        #[arg(long)]
        distributive: bool,
        #[arg(long, default_value_t = 2)]
        m0: usize,
        #[arg(long, default_value_t = 0)]
        c0: usize,
    },
    /// Robustly matchable template.
    Template {
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 400)]
        attempts: usize,
    },
    /// Addition steps on a demo state.
    Addstep {
        #[command(flatten)]
        src: Source,
        /// JSON list of [x, y] pairs (or {"pairs": [...]}).
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Number of steps on fresh vertices when --pairs is absent.
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, default_value_t = 20)]
        id_edges: usize,
        #[arg(long, default_value_t = 60)]
        rb_edges: usize,
        #[arg(long, default_value_t = 0)]
        c0: usize,
    },
    /// Steiner triple systems.
    Sts {
        #[arg(long)]
        construct: Option<String>,
        #[arg(long, default_value_t = 5)]
        m: usize,
        /// STS JSON {"n","triples"} instead of a construction.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "brouwer")]
        reduce: bool,
        /// Redraw splits until balanced.
        #[arg(long)]
        balanced: bool,
        #[arg(long)]
        brouwer: bool,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
    },
    /// Summary of one instance.
    Report(Source),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum AuditModeArg {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum LayoutArg {
    Anchored,
    Pivot,
}

/// A command's result: JSON always, plus an optional flat table for CSV.
struct Output {
    json: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
}

impl Output {
    fn json(v: impl Serialize) -> Result<Self> {
        Ok(Output {
            json: serde_json::to_value(v)?,
            table: None,
        })
    }

    fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header, rows));
        self
    }
}

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_exhaustion() {
                EXIT_EXHAUSTED
            } else {
                EXIT_PRECONDITION
            }
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let seed = match std::env::var("TVL_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::invalid(format!("TVL_SEED={s:?} is not a u64")))?,
        Err(_) => cli.seed,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let threads = cli.threads.max(1);
    let result = pool.install(|| dispatch(cli.cmd, seed, threads))?;
    let text = match cli.format {
        Format::Json => {
            let mut s = String::new();
            render(&result.json, &mut s);
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&result)?,
    };
    match cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cmd: Cmd, seed: u64, threads: usize) -> Result<Output> {
    match cmd {
        Cmd::Gen(src) => {
            let sq = src.square(None)?;
            let rows = sq
                .rows()
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| c.map_or(String::new(), |x| x.to_string()))
                        .collect()
                })
                .collect();
            Ok(Output::json(&sq)?.with_table(vec![], rows))
        }
        Cmd::Solve {
            src,
            nibble,
            augment,
            budget,
            bite,
            rounds,
            ..
        } => {
            let g = src.graph(None)?;
            let (method, m, optimal, nodes) = if nibble {
                (
                    "nibble",
                    greedy_nibble_matching(&g, bite, seed),
                    false,
                    None,
                )
            } else if augment {
                let start = greedy_nibble_matching(&g, bite, seed);
                (
                    "augment",
                    local_switch_augment(&g, &start, rounds, seed)?,
                    false,
                    None,
                )
            } else {
                let r = if threads > 1 {
                    max_rainbow_matching_parallel(&g, budget, threads)
                } else {
                    max_rainbow_matching_exact(&g, budget)
                };
                ("exact", r.witness, r.optimal, Some(r.nodes))
            };
            let rows = edge_rows(m.edges());
            let mut j = json!({"size": m.len(), "optimal": optimal, "method": method});
            if let Some(nodes) = nodes {
                j["nodes"] = json!(nodes);
            }
            j["matching"] = serde_json::to_value(m.edges())?;
            Ok(Output {
                json: j,
                table: None,
            }
            .with_table(vec!["a", "b", "colour"], rows))
        }
        Cmd::Switchers {
            src, pair, bounds, ..
        } => {
            let g = src.graph(None)?;
            if let Some(p) = pair {
                let (c, d) = parse_pair(&p)?;
                if c == d {
                    return Err(Error::invalid("switcher pair needs two distinct colours"));
                }
                let list = enumerate_switchers4(&g, c, d);
                return Ok(Output {
                    json: json!({"c": c, "d": d, "count": list.len(), "switchers": serde_json::to_value(&list)?}),
                    table: None,
                });
            }
            if bounds {
                let r = check_count_bounds(&g);
                let rows = r
                    .lines
                    .iter()
                    .map(|l| {
                        vec![
                            l.label.clone(),
                            l.instances.to_string(),
                            l.max_count.to_string(),
                            l.bound.to_string(),
                            fmt_float(l.ratio),
                            l.holds.to_string(),
                        ]
                    })
                    .collect();
                return Ok(Output::json(&r)?.with_table(
                    vec!["label", "instances", "max_count", "bound", "ratio", "holds"],
                    rows,
                ));
            }
            let w = weight_matrix(&g);
            let list: Vec<Value> = w
                .weights
                .iter()
                .map(|(&(c, d), &x)| json!({"c": c, "d": d, "w": x}))
                .collect();
            let rows = w
                .weights
                .iter()
                .map(|(&(c, d), &x)| vec![c.to_string(), d.to_string(), x.to_string()])
                .collect();
            Ok(Output {
                json: json!({"total": w.total(), "weights": list}),
                table: None,
            }
            .with_table(vec!["c", "d", "w_cd"], rows))
        }
        Cmd::Classes {
            src,
            w0,
            w1,
            w2,
            quantiles,
            test_pair,
            trials,
            epsilon,
            eta,
            big_l,
            ell,
        } => {
            let g = src.graph(None)?;
            let weights = weight_matrix(&g);
            let cfg = match (w0, w1, w2) {
                (Some(a), Some(b), Some(c)) if !quantiles => ClassifierConfig::new(a, b, c)?,
                (None, None, None) => ClassifierConfig::from_quantiles(&weights),
                _ if quantiles => ClassifierConfig::from_quantiles(&weights),
                _ => return Err(Error::invalid("give all of --w0 --w1 --w2, or --quantiles")),
            };
            let family = classify_colours(&weights, &cfg, &g);
            let mut j = json!({"config": serde_json::to_value(cfg)?, "family": serde_json::to_value(&family)?});
            if let Some(p) = test_pair {
                let (c, d) = parse_pair(&p)?;
                let params = ExchangeParams::new(epsilon, eta, big_l, ell)?;
                let r = test_pair_exchangeable(&g, c, d, params, trials, seed)?;
                j["exchange"] = json!({
                    "c": c, "d": d, "passed": r.passed, "trials": r.trials.len(),
                    "all_pass": r.all_pass(), "exhausted_at_order": r.exhausted_at_order,
                });
            }
            let rows = family
                .classes
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    let cs: Vec<String> = k.colours.iter().map(|c| c.to_string()).collect();
                    vec![i.to_string(), k.colours.len().to_string(), cs.join(" ")]
                })
                .collect();
            Ok(Output {
                json: j,
                table: None,
            }
            .with_table(vec!["class", "size", "colours"], rows))
        }
        Cmd::Expander {
            graph,
            verify,
            mode,
            alpha,
            delta,
            ..
        } => {
            let h = parse_simple_graph(&graph, seed)?;
            if verify {
                let a = alpha.unwrap_or_else(|| default_alpha(h.vertex_count()));
                let cap = delta.unwrap_or((a * h.average_degree()).floor());
                let m = match mode {
                    ModeArg::Exact => Mode::Exact,
                    ModeArg::Heuristic => Mode::Heuristic,
                };
                let r = verify_expansion(
                    &h,
                    ExpanderParams {
                        alpha: a,
                        delta_cap: cap,
                    },
                    m,
                    seed,
                )?;
                return Output::json(&r);
            }
            let ex = match alpha {
                Some(a) => crate::expander::extract_expander_with_alpha(&h, a, seed),
                None => extract_expander(&h, seed),
            };
            let trace = serde_json::to_value(&ex.trace)?;
            let rows = ex
                .trace
                .iter()
                .enumerate()
                .map(|(i, s)| vec![i.to_string(), serde_json::to_string(s).unwrap_or_default()])
                .collect();
            Ok(Output {
                json: json!({
                    "n": h.vertex_count(),
                    "average_degree": h.average_degree(),
                    "vertices": ex.vertices,
                    "edges": ex.h.edge_count(),
                    "result_average_degree": ex.h.average_degree(),
                    "result_min_degree": ex.h.min_degree(),
                    "params": serde_json::to_value(ex.params)?,
                    "certified_by": serde_json::to_value(ex.certified_by)?,
                    "trace": trace,
                }),
                table: None,
            }
            .with_table(vec!["step", "detail"], rows))
        }
        Cmd::Audit {
            src,
            p,
            epsilon,
            alpha,
            properties,
            mode,
            samples,
        } => {
            let g = src.graph(None)?;
            let mut cfg = AuditConfig::new(alpha);
            cfg.mode = match mode {
                AuditModeArg::Exact => AuditMode::Exact,
                AuditModeArg::Greedy => AuditMode::Greedy,
            };
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.properties = parse_range(&properties)?;
            let r = audit_pseudorandom(&g, g.a_size(), p, epsilon, &cfg)?;
            let rows = r
                .properties
                .iter()
                .map(|x| {
                    vec![
                        x.name.clone(),
                        x.holds.to_string(),
                        x.instances.to_string(),
                        x.failures.to_string(),
                        x.quota.to_string(),
                        x.min_found.to_string(),
                    ]
                })
                .collect();
            Ok(Output::json(&r)?.with_table(
                vec![
                    "property",
                    "holds",
                    "instances",
                    "failures",
                    "quota",
                    "min_found",
                ],
                rows,
            ))
        }
        Cmd::Absorb {
            src,
            targets,
            demo,
            layout,
            distributive,
            m0,
            c0,
        } => {
            let g = if demo {
                cyclic_graph(if distributive { 67 } else { 31 })
            } else {
                src.graph(Some(31))?
            };
            let (targets, m0) = if demo && distributive {
                (3, 2)
            } else {
                (targets, m0)
            };
            let es: Vec<Edge> = g.colour_class(c0).take(targets).collect();
            if es.len() < targets {
                return Err(Error::invalid(format!(
                    "colour {c0} has only {} edges",
                    es.len()
                )));
            }
            if distributive {
                let t = build_template(3 * targets, seed, 400)?;
                let d = distributive_absorber(&g, &es, m0, &t, &BTreeSet::new(), &BTreeSet::new())?;
                let choices = d.validate(&g)?;
                return Ok(Output {
                    json: json!({
                        "vertices": vertex_list(&d.vertices),
                        "colours": d.colours,
                        "targets": serde_json::to_value(&d.targets)?,
                        "m0": d.m0,
                        "absorbers": d.absorbers.len(),
                        "ledger_gap": d.ledger_gap(),
                        "choices_validated": choices,
                    }),
                    table: None,
                });
            }
            let lay = match layout {
                LayoutArg::Anchored => Layout::Anchored,
                LayoutArg::Pivot => Layout::Pivot,
            };
            let a = build_absorber_with(&g, &es, &BTreeSet::new(), &BTreeSet::new(), lay, 7)?;
            a.validate(&g)?;
            let checks: Vec<Value> = (0..a.targets.len())
                .map(|j| json!({"target": j, "ok": a.absorb(j).is_ok()}))
                .collect();
            Ok(Output {
                json: json!({
                    "vertices": vertex_list(&a.vertices),
                    "colours": a.colours,
                    "targets": serde_json::to_value(&a.targets)?,
                    "order": a.order,
                    "layout": serde_json::to_value(a.layout)?,
                    "checks": checks,
                }),
                table: None,
            })
        }
        Cmd::Template { h, attempts } => {
            let t = build_template(h, seed, attempts)?;
            let rows = t
                .adj
                .iter()
                .enumerate()
                .flat_map(|(x, ns)| ns.iter().map(move |r| vec![x.to_string(), r.to_string()]))
                .collect();
            Ok(Output::json(&t)?.with_table(vec!["x", "right"], rows))
        }
        Cmd::Addstep {
            src,
            pairs,
            steps,
            id_edges,
            rb_edges,
            c0,
        } => {
            let g = src.graph(Some(101))?;
            let mut state = AdditionState::demo(&g, c0, id_edges, rb_edges, seed)?;
            let given: Option<Vec<(usize, usize)>> = match pairs {
                Some(p) => Some(read_pairs(&p)?),
                None => None,
            };
            let count = given.as_ref().map_or(steps, Vec::len);
            let mut log = Vec::new();
            let mut rows = Vec::new();
            for k in 0..count {
                let (x, y) = match &given {
                    Some(list) => list[k],
                    None => fresh_pair(&g, &state)?,
                };
                let step = addition_step(&g, &state, x, y)?;
                let entry = json!({
                    "step": k + 1, "x": x, "y": y,
                    "m_id": step.state.m_id.len(), "m_rb": step.state.m_rb.len(),
                    "vertices": step.state.vertex_set().len(),
                    "e1": step.e1.len(), "f1": step.f1.len(), "e2": step.e2.len(),
                    "f2": step.f2.len(), "e3": step.e3.len(), "f3": step.f3.len(),
                });
                rows.push(
                    [
                        k + 1,
                        x,
                        y,
                        step.state.m_id.len(),
                        step.state.m_rb.len(),
                        step.state.vertex_set().len(),
                    ]
                    .iter()
                    .map(|v| v.to_string())
                    .collect(),
                );
                log.push(entry);
                state = step.state;
            }
            Ok(Output {
                json: json!({"steps": log, "state": serde_json::to_value(&state)?}),
                table: None,
            }
            .with_table(vec!["step", "x", "y", "m_id", "m_rb", "vertices"], rows))
        }
        Cmd::Sts {
            construct,
            m,
            input,
            reduce,
            balanced,
            brouwer,
            seeds,
        } => {
            let s = match (&input, construct.as_deref()) {
                (Some(p), _) => TripleSystem::from_json(&std::fs::read_to_string(p)?)?,
                (None, None | Some("bose")) => bose_sts(m)?,
                (None, Some(other)) => {
                    return Err(Error::invalid(format!("unknown construction {other:?}")))
                }
            };
            if brouwer {
                let cfg = PipelineConfig::default();
                let r = brouwer_pipeline(&s, seeds, &cfg);
                let rows = r
                    .runs
                    .iter()
                    .map(|x| {
                        vec![
                            x.seed.to_string(),
                            x.size.to_string(),
                            x.optimal.to_string(),
                            x.attempts.to_string(),
                        ]
                    })
                    .collect();
                return Ok(
                    Output::json(&r)?.with_table(vec!["seed", "size", "optimal", "attempts"], rows)
                );
            }
            if reduce {
                let r = if balanced {
                    tripartition_reduce_balanced(&s, seed, 100_000)
                        .ok_or_else(|| Error::exhausted("balanced split", "100000 draws"))?
                } else {
                    tripartition_reduce(&s, seed)
                };
                let rows = edge_rows(r.graph.edges());
                return Ok(Output::json(&r)?.with_table(vec!["a", "b", "colour"], rows));
            }
            let rows = s
                .triples
                .iter()
                .map(|t| t.iter().map(|x| x.to_string()).collect())
                .collect();
            Ok(Output::json(&s)?.with_table(vec!["x", "y", "z"], rows))
        }
        Cmd::Report(src) => {
            let sq = src.square_opt()?;
            let g = src.graph(None)?;
            let k = g.a_size().max(g.b_size());
            let exact = (k <= 12).then(|| max_rainbow_matching_exact(&g, DEFAULT_BUDGET));
            let full = match &sq {
                Some(s) if s.order() <= 9 && s.is_latin_square() => {
                    Some(count_full_transversals(s)?)
                }
                _ => None,
            };
            let v = g.report();
            Ok(Output {
                json: json!({
                    "a": g.a_size(),
                    "b": g.b_size(),
                    "edges": g.edges().len(),
                    "colours": g.colours().len(),
                    "proper": v.proper,
                    "complete": g.is_complete(),
                    "latin": sq.as_ref().map(LatinArray::is_latin_square),
                    "min_degree": g.min_degree(),
                    "property_p": property_p_violation(&g).is_none(),
                    "max_rainbow_matching": exact.as_ref().map(|r| r.size),
                    "optimal": exact.as_ref().map(|r| r.optimal),
                    "full_transversals": full,
                }),
                table: None,
            })
        }
    }
}

impl Source {
    fn square_opt(&self) -> Result<Option<LatinArray>> {
        match &self.input {
            Some(p) => Ok(LatinArray::from_json(&std::fs::read_to_string(p)?).ok()),
            None => Family::parse(&self.family)?.square(self.n).map(Some),
        }
    }

    fn square(&self, default_n: Option<usize>) -> Result<LatinArray> {
        match &self.input {
            Some(p) => LatinArray::from_json(&std::fs::read_to_string(p)?),
            None => Family::parse(&self.family)?.square(self.n.or(default_n)),
        }
    }

    fn graph(&self, default_n: Option<usize>) -> Result<ColouredBipartiteGraph> {
        match &self.input {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                match LatinArray::from_json(&text) {
                    Ok(sq) => Ok(latin_to_graph(&sq)),
                    Err(_) => ColouredBipartiteGraph::from_json(&text),
                }
            }
            None => Ok(latin_to_graph(&self.square(default_n)?)),
        }
    }
}

fn fresh_pair(g: &ColouredBipartiteGraph, s: &AdditionState) -> Result<(usize, usize)> {
    let vs = s.vertex_set();
    let x = (0..g.a_size()).find(|&a| !vs.contains(&Vertex::A(a)));
    let y = (0..g.b_size()).find(|&b| !vs.contains(&Vertex::B(b)));
    match (x, y) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(Error::exhausted("addition", "no fresh vertices left")),
    }
}

fn read_pairs(p: &PathBuf) -> Result<Vec<(usize, usize)>> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p)?)?;
    let list = v.get("pairs").cloned().unwrap_or(v);
    let raw: Vec<[usize; 2]> = serde_json::from_value(list)?;
    Ok(raw.into_iter().map(|[x, y]| (x, y)).collect())
}

fn vertex_list(vs: &BTreeSet<Vertex>) -> Vec<String> {
    vs.iter()
        .map(|v| match v {
            Vertex::A(i) => format!("a{i}"),
            Vertex::B(j) => format!("b{j}"),
        })
        .collect()
}

fn edge_rows(edges: &[Edge]) -> Vec<Vec<String>> {
    edges
        .iter()
        .map(|e| vec![e.a.to_string(), e.b.to_string(), e.colour.to_string()])
        .collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let mut it = s.split(',').map(|t| t.trim().parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(c)), Some(Ok(d)), None) => Ok((c, d)),
        _ => Err(Error::invalid(format!("expected \"c,d\", got {s:?}"))),
    }
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::invalid(format!("bad property list {s:?}"));
    let mut out = BTreeSet::new();
    for part in s.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (
                    a.trim().parse::<usize>().map_err(|_| bad())?,
                    b.trim().parse::<usize>().map_err(|_| bad())?,
                );
                out.extend(a..=b);
            }
            None => {
                out.insert(part.trim().parse::<usize>().map_err(|_| bad())?);
            }
        }
    }
    if out.is_empty() || out.iter().any(|&p| !(1..=7).contains(&p)) {
        return Err(bad());
    }
    Ok(out.into_iter().collect())
}

fn parse_simple_graph(s: &str, seed: u64) -> Result<SimpleGraph> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::invalid(format!("bad graph spec {s:?}"));
    let int = |t: &str| t.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["gnp", n, p] => {
            let p: f64 = p.parse().map_err(|_| bad())?;
            if !(0.0..=1.0).contains(&p) {
                return Err(bad());
            }
            Ok(SimpleGraph::gnp(int(n)?, p, seed))
        }
        ["complete", n] => Ok(SimpleGraph::complete(int(n)?)),
        ["cycle", n] => Ok(SimpleGraph::cycle(int(n)?)),
        ["path", n] => Ok(SimpleGraph::path(int(n)?)),
        ["hypercube", k] => Ok(SimpleGraph::hypercube(int(k)?)),
        ["barbell", k] => Ok(SimpleGraph::barbell(int(k)?)),
        _ => Err(bad()),
    }
}

/// Formats a float with 12 significant digits, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&e) {
        let s = format!("{x:.11e}");
        let (mant, exp) = s.split_once('e').expect("exponent form");
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{mant}e{exp}");
    }
    let s = format!("{:.*}", (11 - e).max(0) as usize, x);
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// Compact JSON with fields in insertion order and floats via [`fmt_float`].
pub fn render(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => out.push_str(&u.to_string()),
            (_, Some(i), _) => out.push_str(&i.to_string()),
            (_, _, Some(f)) => out.push_str(&fmt_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("string"));
                out.push(':');
                render(x, out);
            }
            out.push('}');
        }
    }
}

fn to_csv(o: &Output) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    match &o.table {
        Some((header, rows)) => {
            if !header.is_empty() {
                w.write_record(header).map_err(csv_err)?;
            }
            for r in rows {
                w.write_record(r).map_err(csv_err)?;
            }
        }
        None => {
            // top-level scalars as field,value
            w.write_record(["field", "value"]).map_err(csv_err)?;
            if let Value::Object(m) = &o.json {
                for (k, v) in m {
                    let mut s = String::new();
                    match v {
                        Value::String(t) => s.push_str(t),
                        other => render(other, &mut s),
                    }
                    w.write_record([k.as_str(), s.as_str()]).map_err(csv_err)?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("tvl").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(2.0), "2.0");
        assert_eq!(fmt_float(123456.5), "123456.5");
        assert_eq!(fmt_float(0.0527), "0.0527");
        assert_eq!(fmt_float(-1.25e-7), "-1.25e-7");
        assert_eq!(fmt_float(0.0), "0.0");
    }

    #[test]
    fn gen_cyclic_four() {
        let (code, out, _) = call(&["gen", "--family", "cyclic", "--n", "4"]);
        assert_eq!(code, 0);
        let sq = LatinArray::from_json(out.trim()).unwrap();
        assert_eq!(sq.order(), 4);
        assert!(sq.is_latin_square());
    }

    #[test]
    fn solve_even_cyclic() {
        let (code, out, _) = call(&["solve", "--exact", "--n", "6"]);
        assert_eq!(code, 0);
        assert!(out.starts_with(r#"{"size":5,"optimal":true"#), "{out}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = call(&["solve", "--frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn precondition_and_exhaustion_codes() {
        assert_eq!(call(&["template", "--h", "4"]).0, EXIT_PRECONDITION);
        assert_eq!(
            call(&["template", "--h", "9", "--attempts", "0"]).0,
            EXIT_EXHAUSTED
        );
        assert_eq!(call(&["sts", "--m", "4"]).0, EXIT_PRECONDITION);
    }

    #[test]
    fn csv_weights() {
        let (code, out, _) = call(&[
            "switchers",
            "--matrix",
            "--family",
            "random:3:400",
            "--n",
            "5",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("c,d,w_cd\n"));
    }

    #[test]
    fn reruns_are_identical() {
        let args = [
            "sts",
            "--brouwer",
            "--seeds",
            "20",
            "--m",
            "5",
            "--threads",
            "3",
        ];
        let (_, a, _) = call(&args);
        let (_, b, _) = call(&args);
        assert_eq!(a, b);
        assert!(a.contains(r#""achieved":true"#));
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_range("0-2").is_err());
        assert_eq!(parse_pair("3, 4").unwrap(), (3, 4));
    }
}
