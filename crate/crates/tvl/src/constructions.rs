//! Group tables, Maillet blow-ups, random Latin squares and complete mappings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{latin_to_graph, ColouredBipartiteGraph, Vertex};
use crate::latin::{LatinArray, Transversal};

/// A finite abelian group `Z_{f1} x ... x Z_{fk}`.
///
/// Elements are indexed in mixed radix with the first factor most significant.
/// The empty factor list is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.iter().any(|&f| f < 2) {
            return Err(Error::invalid("cyclic factors must be at least 2"));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    /// `Z_n`; `Z_1` is the trivial group.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "order must be positive");
        FiniteAbelianGroup {
            factors: if n == 1 { vec![] } else { vec![n] },
        }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    /// Coordinates of element `i`.
    pub fn element(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, &f) in self.factors.iter().enumerate().rev() {
            out[k] = i % f;
            i /= f;
        }
        out
    }

    pub fn index(&self, x: &[usize]) -> usize {
        self.factors
            .iter()
            .zip(x)
            .fold(0, |acc, (&f, &xi)| acc * f + xi % f)
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let (x, y) = (self.element(i), self.element(j));
        let s: Vec<usize> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        self.index(&s)
    }

    pub fn neg(&self, i: usize) -> usize {
        let x = self.element(i);
        let s: Vec<usize> = x
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| (f - a) % f)
            .collect();
        self.index(&s)
    }

    /// `m * x` for element index `x`.
    pub fn scale(&self, x: usize, m: usize) -> usize {
        let v: Vec<usize> = self
            .element(x)
            .iter()
            .zip(&self.factors)
            .map(|(&a, &f)| (a * (m % f)) % f)
            .collect();
        self.index(&v)
    }

    /// True when the Sylow 2-subgroup is trivial or not cyclic.
    pub fn sylow2_trivial_or_noncyclic(&self) -> bool {
        self.factors.iter().filter(|&&f| f % 2 == 0).count() != 1
    }

    /// Parses `"2x4"` style factor lists.
    pub fn parse(s: &str) -> Result<Self> {
        let factors = s
            .split('x')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad factor {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let factors: Vec<usize> = factors.into_iter().filter(|&f| f != 1).collect();
        Self::new(factors)
    }

    pub fn label(&self) -> String {
        if self.factors.is_empty() {
            return "Z1".into();
        }
        self.factors
            .iter()
            .map(|f| format!("Z{f}"))
            .collect::<Vec<_>>()
            .join("x")
    }
}

/// Every abelian group of order `n` in invariant-factor form `f1 | f2 | ... | fk`.
pub fn abelian_groups_of_order(n: usize) -> Vec<FiniteAbelianGroup> {
    fn rec(rest: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 1 {
            out.push(cur.clone());
            return;
        }
        for f in 2..=rest {
            if rest.is_multiple_of(f) && f % min == 0 {
                cur.push(f);
                rec(rest / f, f, cur, out);
                cur.pop();
            }
        }
    }
    let mut lists = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut lists);
    lists
        .into_iter()
        .filter(|l| l.windows(2).all(|w| w[1] % w[0] == 0))
        .map(|factors| FiniteAbelianGroup { factors })
        .collect()
}

/// The addition table: cell `(i, j)` holds the index of `elem(i) + elem(j)`.
pub fn group_table(group: &FiniteAbelianGroup) -> LatinArray {
    let n = group.order();
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cells.push(Some(group.add(i, j)));
        }
    }
    LatinArray::from_flat_unchecked(n, cells)
}

/// `G(H)` for the cyclic group of order `n`.
pub fn cyclic_graph(n: usize) -> ColouredBipartiteGraph {
    latin_to_graph(&group_table(&FiniteAbelianGroup::cyclic(n)))
}

/// `m * sum(H)`; a nonzero value rules out a full transversal of the blow-up.
pub fn group_sum_obstruction(group: &FiniteAbelianGroup, m: usize) -> usize {
    let total = (0..group.order()).fold(0, |acc, v| group.add(acc, v));
    group.scale(total, m)
}

/// Blow-up of a group table by blocks of size `m`.
#[derive(Debug, Clone)]
pub struct MailletSpec {
    pub base: FiniteAbelianGroup,
    pub m: usize,
    /// `inner[v][w]` is an `m x m` Latin square on `0..m` used for block `(v, w)`.
    pub inner: Vec<Vec<Vec<Vec<usize>>>>,
}

impl MailletSpec {
    /// Cyclic-shift inner blocks: `block(i, j) = (i + j) mod m`.
    pub fn cyclic(base: FiniteAbelianGroup, m: usize) -> Self {
        let h = base.order();
        let block: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).map(|j| (i + j) % m).collect())
            .collect();
        MailletSpec {
            base,
            m,
            inner: vec![vec![block; h]; h],
        }
    }

    /// Independent random inner blocks.
    pub fn random(base: FiniteAbelianGroup, m: usize, seed: u64) -> Self {
        let h = base.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inner = (0..h)
            .map(|_| {
                (0..h)
                    .map(|_| {
                        let sq = random_latin_square(m, rng.gen(), 50 * m * m);
                        (0..m)
                            .map(|i| (0..m).map(|j| sq.get(i, j).unwrap()).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        MailletSpec { base, m, inner }
    }
}

/// Replaces every vertex of `G(H)` by `m` copies; the edges between
/// `A_v` and `B_w` are coloured by the `m` colours of block `C_{v+w}`.
pub fn maillet_blowup(spec: &MailletSpec) -> Result<LatinArray> {
    let h = spec.base.order();
    let m = spec.m;
    if m == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if spec.inner.len() != h || spec.inner.iter().any(|r| r.len() != h) {
        return Err(Error::invalid("inner colourings must be indexed by H x H"));
    }
    for row in &spec.inner {
        for block in row {
            if block.len() != m || block.iter().any(|r| r.len() != m) {
                return Err(Error::invalid("inner block has the wrong shape"));
            }
            if block.iter().flatten().any(|&s| s >= m) {
                return Err(Error::invalid("inner block uses more than m colours"));
            }
            LatinArray::from_rows(block.clone())?;
        }
    }
    let n = m * h;
    let mut cells = vec![None; n * n];
    for v in 0..h {
        for w in 0..h {
            let base = spec.base.add(v, w) * m;
            for i in 0..m {
                for j in 0..m {
                    cells[(v * m + i) * n + w * m + j] = Some(base + spec.inner[v][w][i][j]);
                }
            }
        }
    }
    Ok(LatinArray::from_flat_unchecked(n, cells))
}

/// Latin square of order `n` from a Jacobson-Matthews walk of `burn_in`
/// steps started at the cyclic table. Deterministic in `(n, seed, burn_in)`.
pub fn random_latin_square(n: usize, seed: u64, burn_in: usize) -> LatinArray {
    assert!(n >= 1, "order must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cube = IncidenceCube::cyclic(n);
    let mut steps = 0;
    while steps < burn_in || cube.improper.is_some() {
        if n < 3 {
            // orders 1 and 2 have nothing to walk on beyond symbol swaps
            if n == 2 && rng.gen_bool(0.5) {
                cube = IncidenceCube::from_square(&[1, 0, 0, 1], 2);
            }
            break;
        }
        cube.step(&mut rng);
        steps += 1;
    }
    cube.to_latin()
}

struct IncidenceCube {
    n: usize,
    v: Vec<i8>,
    improper: Option<(usize, usize, usize)>,
}

impl IncidenceCube {
    fn cyclic(n: usize) -> Self {
        let sq: Vec<usize> = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Self::from_square(&sq, n)
    }

    fn from_square(sq: &[usize], n: usize) -> Self {
        let mut v = vec![0i8; n * n * n];
        for r in 0..n {
            for c in 0..n {
                v[(r * n + c) * n + sq[r * n + c]] = 1;
            }
        }
        IncidenceCube {
            n,
            v,
            improper: None,
        }
    }

    fn at(&self, r: usize, c: usize, s: usize) -> i8 {
        self.v[(r * self.n + c) * self.n + s]
    }

    fn bump(&mut self, r: usize, c: usize, s: usize, d: i8) {
        let n = self.n;
        self.v[(r * n + c) * n + s] += d;
    }

    fn ones(&self, f: impl Fn(usize) -> (usize, usize, usize)) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| {
                let (r, c, s) = f(i);
                self.at(r, c, s) == 1
            })
            .collect()
    }

    fn step(&mut self, rng: &mut impl Rng) {
        let n = self.n;
        let (r, c, s, r2, c2, s2) = match self.improper {
            None => {
                let (r, c, s) = loop {
                    let (r, c, s) = (
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                    );
                    if self.at(r, c, s) == 0 {
                        break (r, c, s);
                    }
                };
                let r2 = self.ones(|i| (i, c, s))[0];
                let c2 = self.ones(|i| (r, i, s))[0];
                let s2 = self.ones(|i| (r, c, i))[0];
                (r, c, s, r2, c2, s2)
            }
            Some((r, c, s)) => {
                let pick =
                    |v: Vec<usize>, rng: &mut dyn rand::RngCore| v[rng.gen_range(0..v.len())];
                let r2 = pick(self.ones(|i| (i, c, s)), rng);
                let c2 = pick(self.ones(|i| (r, i, s)), rng);
                let s2 = pick(self.ones(|i| (r, c, i)), rng);
                (r, c, s, r2, c2, s2)
            }
        };
        self.bump(r, c, s, 1);
        self.bump(r, c2, s2, 1);
        self.bump(r2, c, s2, 1);
        self.bump(r2, c2, s, 1);
        self.bump(r, c, s2, -1);
        self.bump(r, c2, s, -1);
        self.bump(r2, c, s, -1);
        self.bump(r2, c2, s2, -1);
        self.improper = if self.at(r2, c2, s2) < 0 {
            Some((r2, c2, s2))
        } else {
            None
        };
    }

    fn to_latin(&self) -> LatinArray {
        let n = self.n;
        let mut cells = vec![None; n * n];
        for r in 0..n {
            for c in 0..n {
                cells[r * n + c] = (0..n).find(|&s| self.at(r, c, s) == 1);
            }
        }
        LatinArray::from_flat_unchecked(n, cells)
    }
}

/// Default cap on group order for [`complete_mapping_exists`].
pub const COMPLETE_MAPPING_CAP: usize = 16;

/// Searches the group table for a full transversal.
pub fn complete_mapping_exists(
    group: &FiniteAbelianGroup,
    cap: usize,
) -> Result<(bool, Option<Transversal>)> {
    let n = group.order();
    if n > cap {
        return Err(Error::Cap {
            what: "group order".into(),
            got: n,
            cap,
        });
    }
    let table = group_table(group);
    // shifting every column by g maps transversals to transversals, so
    // some transversal meets (0, 0) if any exists
    match crate::solvers::find_full_transversal_through(&table, Some((0, 0)))? {
        Some(cells) => Ok((true, Some(Transversal::new(cells, &table)?))),
        None => Ok((false, None)),
    }
}

/// A pair of length-3 paths with the same colour pattern whose closing
/// edges have different colours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyPViolation {
    pub pattern: (usize, usize, usize),
    pub first: [Vertex; 4],
    pub second: [Vertex; 4],
}

/// Looks for a violation of Property P: vertex-disjoint paths
/// `x0 x1 x2 x3` (starting in A) with equal colour sequences must have
/// closing edges `x3 x0` of equal colour.
pub fn property_p_violation(g: &ColouredBipartiteGraph) -> Option<PropertyPViolation> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(usize, usize, usize), Vec<([Vertex; 4], usize)>> = BTreeMap::new();
    for a in 0..g.a_size() {
        for &(c1, b1) in g.neighbours_a(a) {
            for &(c2, a2) in g.neighbours_b(b1) {
                if a2 == a {
                    continue;
                }
                for &(c3, b3) in g.neighbours_a(a2) {
                    if b3 == b1 {
                        continue;
                    }
                    if let Some(close) = g.colour(a, b3) {
                        let p = [Vertex::A(a), Vertex::B(b1), Vertex::A(a2), Vertex::B(b3)];
                        groups.entry((c1, c2, c3)).or_default().push((p, close));
                    }
                }
            }
        }
    }
    for (pattern, paths) in groups {
        for (i, (p, cp)) in paths.iter().enumerate() {
            for (q, cq) in &paths[i + 1..] {
                if cp != cq && p.iter().all(|v| !q.contains(v)) {
                    return Some(PropertyPViolation {
                        pattern,
                        first: *p,
                        second: *q,
                    });
                }
            }
        }
    }
    None
}

/// A named square family: `cyclic`, `abelian:<f1>x<f2>...`,
/// `maillet:<m>:<factors>` or `random:<seed>:<burnin>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Cyclic,
    Abelian(FiniteAbelianGroup),
    Maillet { m: usize, base: FiniteAbelianGroup },
    Random { seed: u64, burn_in: usize },
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad number {t:?} in family {s:?}")))
        };
        match parts.as_slice() {
            ["cyclic"] => Ok(Family::Cyclic),
            ["abelian", f] => Ok(Family::Abelian(FiniteAbelianGroup::parse(f)?)),
            ["maillet", m, f] => Ok(Family::Maillet {
                m: num(m)? as usize,
                base: FiniteAbelianGroup::parse(f)?,
            }),
            ["random", seed, burn] => Ok(Family::Random {
                seed: num(seed)?,
                burn_in: num(burn)? as usize,
            }),
            ["random"] => Ok(Family::Random {
                seed: 0,
                burn_in: 0,
            }),
            _ => Err(Error::invalid(format!("unknown family {s:?}"))),
        }
    }

    /// The square of order `n`; families that fix their own order check
    /// `n` against it when given.
    pub fn square(&self, n: Option<usize>) -> Result<LatinArray> {
        let fixed = |order: usize| match n {
            Some(k) if k != order => Err(Error::invalid(format!(
                "family has order {order}, asked for {k}"
            ))),
            _ => Ok(()),
        };
        let need = || {
            n.filter(|&k| k >= 1)
                .ok_or_else(|| Error::invalid("family needs a positive --n"))
        };
        match self {
            Family::Cyclic => Ok(group_table(&FiniteAbelianGroup::cyclic(need()?))),
            Family::Abelian(g) => {
                fixed(g.order())?;
                Ok(group_table(g))
            }
            Family::Maillet { m, base } => {
                fixed(m * base.order())?;
                maillet_blowup(&MailletSpec::cyclic(base.clone(), *m))
            }
            Family::Random { seed, burn_in } => {
                let k = need()?;
                let burn = if *burn_in == 0 { 50 * k * k } else { *burn_in };
                Ok(random_latin_square(k, *seed, burn))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert_eq!(
            group_table(&FiniteAbelianGroup::cyclic(1)).rows(),
            vec![vec![Some(0)]]
        );
        let z2 = LatinArray::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(group_table(&FiniteAbelianGroup::cyclic(2)), z2);
        let v4 = group_table(&FiniteAbelianGroup::new(vec![2, 2]).unwrap());
        assert!(v4.is_latin_square());
    }

    #[test]
    fn sums() {
        let z = FiniteAbelianGroup::cyclic;
        assert_eq!(group_sum_obstruction(&z(3), 1), 0);
        assert_eq!(group_sum_obstruction(&z(2), 1), 1);
        assert_eq!(group_sum_obstruction(&z(4), 1), 2);
        assert_eq!(group_sum_obstruction(&z(2), 2), 0);
        let v4 = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(group_sum_obstruction(&v4, 1), 0);
    }

    #[test]
    fn invariant_factor_lists() {
        let labels = |n| {
            abelian_groups_of_order(n)
                .into_iter()
                .map(|g| g.factors().to_vec())
                .collect::<Vec<_>>()
        };
        assert_eq!(labels(8), vec![vec![2, 2, 2], vec![2, 4], vec![8]]);
        assert_eq!(labels(16).len(), 5);
        assert_eq!(labels(12), vec![vec![2, 6], vec![12]]);
        assert_eq!(labels(1), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn blowup_degenerate_and_shape() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let b1 = maillet_blowup(&MailletSpec::cyclic(z2.clone(), 1)).unwrap();
        assert_eq!(b1, group_table(&z2));
        let b3 = maillet_blowup(&MailletSpec::random(z2.clone(), 3, 4)).unwrap();
        assert!(b3.is_latin_square());
        assert_eq!(b3.order(), 6);
        let mut bad = MailletSpec::cyclic(z2, 2);
        bad.inner[0][0] = vec![vec![0, 0], vec![1, 1]];
        assert!(maillet_blowup(&bad).is_err());
    }

    #[test]
    fn random_squares_are_latin() {
        assert_eq!(random_latin_square(1, 9, 10).rows(), vec![vec![Some(0)]]);
        for seed in 0..20 {
            for n in [2, 3, 4, 7] {
                let l = random_latin_square(n, seed, 100);
                assert!(l.is_latin_square(), "n={n} seed={seed}");
            }
        }
        assert_eq!(
            random_latin_square(6, 3, 500),
            random_latin_square(6, 3, 500)
        );
    }

    #[test]
    fn property_p_in_tables() {
        for g in [
            FiniteAbelianGroup::cyclic(5),
            FiniteAbelianGroup::new(vec![2, 4]).unwrap(),
        ] {
            assert_eq!(
                property_p_violation(&latin_to_graph(&group_table(&g))),
                None
            );
        }
        // a non-group square of order 5 breaks it
        let l = LatinArray::from_rows(vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 3, 4, 0, 1],
            vec![3, 4, 1, 2, 0],
            vec![4, 2, 0, 1, 3],
        ])
        .unwrap();
        assert!(property_p_violation(&latin_to_graph(&l)).is_some());
    }

    #[test]
    fn parse_labels() {
        let g = FiniteAbelianGroup::parse("2x4").unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.sylow2_trivial_or_noncyclic());
        assert!(!FiniteAbelianGroup::parse("12")
            .unwrap()
            .sylow2_trivial_or_noncyclic());
        assert!(FiniteAbelianGroup::parse("15")
            .unwrap()
            .sylow2_trivial_or_noncyclic());
    }

    #[test]
    fn family_names_parse() {
        assert_eq!(
            Family::parse("cyclic")
                .unwrap()
                .square(Some(4))
                .unwrap()
                .order(),
            4
        );
        assert_eq!(
            Family::parse("abelian:2x2")
                .unwrap()
                .square(None)
                .unwrap()
                .order(),
            4
        );
        assert_eq!(
            Family::parse("maillet:3:2")
                .unwrap()
                .square(None)
                .unwrap()
                .order(),
            6
        );
        let r = Family::parse("random:7:500")
            .unwrap()
            .square(Some(6))
            .unwrap();
        assert!(r.is_latin_square());
        assert!(Family::parse("abelian:2x2")
            .unwrap()
            .square(Some(5))
            .is_err());
        assert!(Family::parse("cyclic").unwrap().square(None).is_err());
        assert!(Family::parse("dihedral").is_err());
    }
}
