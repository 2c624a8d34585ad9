//! Colour classes from switcher weights, and Monte-Carlo exchangeability
//! tests for colour pairs.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expander::{extract_expander, SimpleGraph};
use crate::graph::{ColouredBipartiteGraph, Vertex};
use crate::switchers::{find_switcher, ColourSwitcher, SwitcherIndex, SwitcherWeights};

/// Weight cut points. Pairs with `w <= w0` are very light, `w <= w1` light,
/// `w > w2` heavy; `(w1, w2]` is split into factor-2 bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierConfig {
    pub w0: u64,
    pub w1: u64,
    pub w2: u64,
    pub band_count: usize,
    /// Soft cap on how many large classes one colour may join.
    pub multiplicity_cap: usize,
}

impl ClassifierConfig {
    pub fn new(w0: u64, w1: u64, w2: u64) -> Result<Self> {
        if !(w0 <= w1 && w1 <= w2) {
            return Err(Error::invalid(format!(
                "thresholds out of order: {w0}, {w1}, {w2}"
            )));
        }
        let mut cfg = ClassifierConfig {
            w0,
            w1,
            w2,
            band_count: 0,
            multiplicity_cap: 4,
        };
        cfg.band_count = cfg.bands().len();
        Ok(cfg)
    }

    /// Thresholds at the 50%, 75% and 95% points of the nonzero weights.
    pub fn from_quantiles(weights: &SwitcherWeights) -> Self {
        Self::from_quantile_points(weights, [0.5, 0.75, 0.95])
    }

    pub fn from_quantile_points(weights: &SwitcherWeights, q: [f64; 3]) -> Self {
        let nz = weights.nonzero();
        let at = |p: f64| -> u64 {
            if nz.is_empty() {
                return 0;
            }
            // nearest rank
            let k = ((p * nz.len() as f64).ceil() as usize).clamp(1, nz.len());
            nz[k - 1]
        };
        let (w0, w1, w2) = (at(q[0]), at(q[1]), at(q[2]));
        Self::new(w0, w1.max(w0), w2.max(w1).max(w0)).expect("ordered by construction")
    }

    /// Half-open bands `(lo, hi]` covering `(w1, w2]`, with `hi <= 2 lo`
    /// except for a first band starting at zero.
    pub fn bands(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut lo = self.w1;
        while lo < self.w2 {
            let hi = (lo * 2).max(lo + 1).min(self.w2);
            out.push((lo, hi));
            lo = hi;
        }
        out
    }
}

/// Where a class came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassSource {
    Heavy {
        weight: u64,
    },
    Band {
        band: usize,
        /// Average degree of the auxiliary graph the extraction started from.
        input_degree: f64,
        degree: f64,
        min_degree: usize,
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColourClass {
    pub colours: Vec<usize>,
    pub source: ClassSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColourClassFamily {
    pub classes: Vec<ColourClass>,
    pub total_weight: u64,
    /// Weight of pairs not contained in any class.
    pub uncovered_weight: u64,
    /// For each colour, the number of classes of size above two containing it.
    pub multiplicity: BTreeMap<usize, usize>,
    /// Colours whose multiplicity exceeds the configured cap.
    pub over_cap: Vec<usize>,
}

/// Heavy pairs become 2-classes; each moderate band's auxiliary graph on
/// colours is peeled by repeated expander extraction, one class per round.
pub fn classify_colours(
    weights: &SwitcherWeights,
    cfg: &ClassifierConfig,
    graph: &ColouredBipartiteGraph,
) -> ColourClassFamily {
    let colours = graph.colours();
    let pos: BTreeMap<usize, usize> = colours.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut classes = Vec::new();
    for (&(c, d), &w) in &weights.weights {
        if w > cfg.w2 {
            classes.push(ColourClass {
                colours: vec![c, d],
                source: ClassSource::Heavy { weight: w },
            });
        }
    }
    for (band, &(lo, hi)) in cfg.bands().iter().enumerate() {
        let mut aux = SimpleGraph::empty(colours.len());
        for (&(c, d), &w) in &weights.weights {
            if w > lo && w <= hi {
                if let (Some(&i), Some(&j)) = (pos.get(&c), pos.get(&d)) {
                    aux.add_edge(i, j);
                }
            }
        }
        while aux.edge_count() > 0 {
            let input_degree = aux.average_degree();
            let ex = extract_expander(&aux, band as u64);
            if ex.h.edge_count() == 0 {
                break;
            }
            let members: Vec<usize> = ex.vertices.iter().map(|&i| colours[i]).collect();
            classes.push(ColourClass {
                colours: members,
                source: ClassSource::Band {
                    band,
                    input_degree,
                    degree: ex.h.average_degree(),
                    min_degree: ex.h.min_degree(),
                    steps: ex.trace.len(),
                },
            });
            // drop the edges the class now covers
            let inside: BTreeSet<usize> = ex.vertices.iter().copied().collect();
            let mut next = SimpleGraph::empty(colours.len());
            for (u, v) in aux.edges() {
                if !(inside.contains(&u) && inside.contains(&v)) {
                    next.add_edge(u, v);
                }
            }
            aux = next;
        }
    }
    let sets: Vec<BTreeSet<usize>> = classes
        .iter()
        .map(|k| k.colours.iter().copied().collect())
        .collect();
    let uncovered_weight = weights
        .weights
        .iter()
        .filter(|(&(c, d), _)| !sets.iter().any(|s| s.contains(&c) && s.contains(&d)))
        .map(|(_, &w)| w)
        .sum();
    let mut multiplicity = BTreeMap::new();
    for s in sets.iter().filter(|s| s.len() > 2) {
        for &c in s {
            *multiplicity.entry(c).or_insert(0) += 1;
        }
    }
    let over_cap = multiplicity
        .iter()
        .filter(|(_, &m)| m > cfg.multiplicity_cap)
        .map(|(&c, _)| c)
        .collect();
    ColourClassFamily {
        classes,
        total_weight: weights.total(),
        uncovered_weight,
        multiplicity,
        over_cap,
    }
}

/// Parameters of the exchange game: forbidden sets have size at most
/// `floor(epsilon |G|) + big_l`, witnesses have order at most `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangeParams {
    pub epsilon: f64,
    pub eta: f64,
    pub big_l: usize,
    pub ell: usize,
}

impl ExchangeParams {
    pub fn new(epsilon: f64, eta: f64, big_l: usize, ell: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) || !(0.0..1.0).contains(&eta) {
            return Err(Error::invalid("epsilon and eta must lie in [0, 1)"));
        }
        Ok(ExchangeParams {
            epsilon,
            eta,
            big_l,
            ell,
        })
    }

    fn budget(&self, size: usize) -> usize {
        (self.epsilon * size as f64).floor() as usize + self.big_l
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeTrial {
    pub trial: usize,
    pub forbidden_vertices: Vec<Vertex>,
    pub forbidden_colours: Vec<usize>,
    pub witness: Option<ColourSwitcher>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeReport {
    pub c: usize,
    pub d: usize,
    pub params: ExchangeParams,
    pub passed: usize,
    pub trials: Vec<ExchangeTrial>,
    /// Largest order searched when a trial failed.
    pub exhausted_at_order: Option<usize>,
}

impl ExchangeReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.trials.len()
    }
}

fn trial_rng(seed: u64, c: usize, d: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((c as u64) << 40) ^ ((d as u64) << 20) ^ trial as u64);
    rng
}

/// Forbidden sets of trial `trial`: prefixes of seeded shuffles, so a
/// smaller budget always forbids a subset.
fn forbidden_for(
    g: &ColouredBipartiteGraph,
    c: usize,
    d: usize,
    trial: usize,
    seed: u64,
    params: &ExchangeParams,
) -> (Vec<Vertex>, Vec<usize>) {
    let mut rng = trial_rng(seed, c, d, trial);
    let mut vs: Vec<Vertex> = (0..g.a_size())
        .map(Vertex::A)
        .chain((0..g.b_size()).map(Vertex::B))
        .collect();
    vs.shuffle(&mut rng);
    let mut cs: Vec<usize> = g
        .colours()
        .into_iter()
        .filter(|&x| x != c && x != d)
        .collect();
    cs.shuffle(&mut rng);
    let budget = params.budget(g.vertex_count());
    vs.truncate(budget);
    cs.truncate(budget);
    (vs, cs)
}

/// Plays `trials` rounds: sample forbidden sets, then search for a
/// `c,d`-switcher of order at most `ell` avoiding them.
pub fn test_pair_exchangeable(
    graph: &ColouredBipartiteGraph,
    c: usize,
    d: usize,
    params: ExchangeParams,
    trials: usize,
    seed: u64,
) -> Result<ExchangeReport> {
    let index = SwitcherIndex::build(graph);
    test_pair_exchangeable_with(&index, graph, c, d, params, trials, seed)
}

/// As [`test_pair_exchangeable`] with a prebuilt index.
pub fn test_pair_exchangeable_with(
    index: &SwitcherIndex,
    graph: &ColouredBipartiteGraph,
    c: usize,
    d: usize,
    params: ExchangeParams,
    trials: usize,
    seed: u64,
) -> Result<ExchangeReport> {
    if c == d {
        return Err(Error::invalid("exchange test needs two distinct colours"));
    }
    let results: Vec<ExchangeTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (fv, fc) = forbidden_for(graph, c, d, t, seed, &params);
            let fvs: BTreeSet<Vertex> = fv.iter().copied().collect();
            let fcs: BTreeSet<usize> = fc.iter().copied().collect();
            let witness = find_switcher(index, c, d, &fvs, &fcs, params.ell);
            ExchangeTrial {
                trial: t,
                forbidden_vertices: fv,
                forbidden_colours: fc,
                witness,
            }
        })
        .collect();
    let passed = results.iter().filter(|t| t.witness.is_some()).count();
    Ok(ExchangeReport {
        c,
        d,
        params,
        passed,
        exhausted_at_order: (passed < results.len()).then_some(params.ell),
        trials: results,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassExchangeReport {
    pub colours: Vec<usize>,
    /// Colours failing at least one pairwise test inside the class.
    pub failing: Vec<usize>,
    pub allowed: usize,
    pub passed: bool,
}

/// A class passes when at most `eta |C|` of its colours fail some pairwise
/// exchange test against another member.
pub fn test_class_exchangeable(
    graph: &ColouredBipartiteGraph,
    class: &[usize],
    params: ExchangeParams,
    trials: usize,
    seed: u64,
) -> Result<ClassExchangeReport> {
    let index = SwitcherIndex::build(graph);
    let mut failing = BTreeSet::new();
    for (i, &c) in class.iter().enumerate() {
        for &d in &class[i + 1..] {
            let r = test_pair_exchangeable_with(&index, graph, c, d, params, trials, seed)?;
            if !r.all_pass() {
                failing.insert(c);
                failing.insert(d);
            }
        }
    }
    let allowed = (params.eta * class.len() as f64).floor() as usize;
    Ok(ClassExchangeReport {
        colours: class.to_vec(),
        passed: failing.len() <= allowed,
        failing: failing.into_iter().collect(),
        allowed,
    })
}

/// Checks the degree guarantees recorded for every band class.
pub fn band_classes_respect_degrees(family: &ColourClassFamily) -> bool {
    family.classes.iter().all(|k| match k.source {
        ClassSource::Heavy { .. } => k.colours.len() == 2,
        ClassSource::Band {
            input_degree,
            degree,
            min_degree,
            ..
        } => degree >= input_degree / 2.0 && min_degree as f64 >= degree / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cyclic_graph, random_latin_square};
    use crate::graph::latin_to_graph;

    #[test]
    fn empty_weights_give_empty_family() {
        let g = cyclic_graph(7);
        let w = SwitcherWeights::default();
        let cfg = ClassifierConfig::from_quantiles(&w);
        let f = classify_colours(&w, &cfg, &g);
        assert!(f.classes.is_empty());
        assert_eq!(f.uncovered_weight, 0);
        // group tables carry no proper switchers, so the same holds there
        let w = SwitcherIndex::build(&g).weights();
        assert_eq!(w.total(), 0);
        assert!(classify_colours(&w, &cfg, &g).classes.is_empty());
    }

    #[test]
    fn bands_double() {
        let cfg = ClassifierConfig::new(1, 3, 40).unwrap();
        let b = cfg.bands();
        assert_eq!(b.first().unwrap().0, 3);
        assert_eq!(b.last().unwrap().1, 40);
        assert!(b.iter().all(|&(lo, hi)| hi <= 2 * lo.max(1) && lo < hi));
        assert!(b.windows(2).all(|w| w[0].1 == w[1].0));
        assert!(ClassifierConfig::new(3, 2, 4).is_err());
    }

    #[test]
    fn classify_random_square() {
        let g = latin_to_graph(&random_latin_square(10, 5, 2000));
        let w = SwitcherIndex::build(&g).weights();
        let cfg = ClassifierConfig::from_quantiles(&w);
        let f = classify_colours(&w, &cfg, &g);
        assert!(f.uncovered_weight <= f.total_weight);
        assert!(band_classes_respect_degrees(&f));
        for k in &f.classes {
            if k.colours.len() == 2 {
                assert!(w.get(k.colours[0], k.colours[1]) > 0);
            }
        }
        // everything heavy when the heavy cut is below every weight
        let all = ClassifierConfig::new(0, 0, 0).unwrap();
        let f = classify_colours(&w, &all, &g);
        assert_eq!(f.classes.len(), w.nonzero().len());
        assert_eq!(f.uncovered_weight, 0);
    }

    #[test]
    fn exchange_without_adversary() {
        let g = latin_to_graph(&random_latin_square(8, 3, 2000));
        let idx = SwitcherIndex::build(&g);
        let (&(c, d), _) = idx.weights().weights.iter().find(|(_, &w)| w > 0).unwrap();
        let p = ExchangeParams::new(0.0, 0.0, 0, 4).unwrap();
        let r = test_pair_exchangeable(&g, c, d, p, 1, 0).unwrap();
        assert!(r.all_pass());
        r.trials[0].witness.as_ref().unwrap().validate(&g).unwrap();
        assert!(test_pair_exchangeable(&g, c, c, p, 1, 0).is_err());
    }

    #[test]
    fn exchange_fails_with_certificate() {
        let g = cyclic_graph(5);
        let p = ExchangeParams::new(0.0, 0.0, 0, 12).unwrap();
        let r = test_pair_exchangeable(&g, 0, 1, p, 2, 0).unwrap();
        assert_eq!(r.passed, 0);
        assert_eq!(r.exhausted_at_order, Some(12));
    }

    #[test]
    fn exchange_is_monotone() {
        let g = latin_to_graph(&random_latin_square(9, 2, 2000));
        let idx = SwitcherIndex::build(&g);
        let pairs: Vec<(usize, usize)> = idx.weights().weights.keys().copied().take(6).collect();
        for (c, d) in pairs {
            let strong = ExchangeParams::new(0.2, 0.0, 2, 8).unwrap();
            let weak = ExchangeParams::new(0.1, 0.0, 1, 8).unwrap();
            let rs = test_pair_exchangeable_with(&idx, &g, c, d, strong, 10, 9).unwrap();
            let rw = test_pair_exchangeable_with(&idx, &g, c, d, weak, 10, 9).unwrap();
            for (s, w) in rs.trials.iter().zip(&rw.trials) {
                assert!(w
                    .forbidden_vertices
                    .iter()
                    .all(|v| s.forbidden_vertices.contains(v)));
                if s.witness.is_some() {
                    assert!(w.witness.is_some());
                }
            }
        }
    }
}
