//! Latin arrays and transversals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n x n` grid where every symbol occurs at most once per row and column.
///
/// Cells may be empty. With exactly `n` symbols and no empty cell this is a
/// Latin square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinArray {
    n: usize,
    cells: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct LatinArrayJson {
    n: usize,
    cells: Vec<Vec<Option<usize>>>,
}

impl LatinArray {
    /// Builds an array from rows, rejecting repeated symbols in a row or column.
    pub fn new(rows: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("grid is not square"));
        }
        let cells: Vec<Option<usize>> = rows.into_iter().flatten().collect();
        let arr = LatinArray { n, cells };
        arr.check()?;
        Ok(arr)
    }

    /// Builds a fully filled array.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(Some).collect())
                .collect(),
        )
    }

    pub(crate) fn from_flat_unchecked(n: usize, cells: Vec<Option<usize>>) -> Self {
        debug_assert_eq!(cells.len(), n * n);
        LatinArray { n, cells }
    }

    fn check(&self) -> Result<()> {
        let n = self.n;
        let mut seen = std::collections::HashSet::new();
        for r in 0..n {
            seen.clear();
            for c in 0..n {
                if let Some(s) = self.get(r, c) {
                    if !seen.insert(s) {
                        return Err(Error::invalid(format!("symbol {s} repeated in row {r}")));
                    }
                }
            }
        }
        for c in 0..n {
            seen.clear();
            for r in 0..n {
                if let Some(s) = self.get(r, c) {
                    if !seen.insert(s) {
                        return Err(Error::invalid(format!("symbol {s} repeated in column {c}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Symbol at row `r`, column `c`.
    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.cells[r * self.n + c]
    }

    /// Row-major cells.
    pub fn cells(&self) -> &[Option<usize>] {
        &self.cells
    }

    pub fn rows(&self) -> Vec<Vec<Option<usize>>> {
        self.cells
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.to_vec())
            .collect()
    }

    /// Distinct symbols in first-appearance (row-major) order.
    pub fn symbols(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        self.cells
            .iter()
            .flatten()
            .copied()
            .filter(|s| seen.insert(*s))
            .collect()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols().len()
    }

    pub fn is_filled(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn is_latin_square(&self) -> bool {
        self.is_filled() && self.symbol_count() == self.n
    }

    /// Map from symbol to colour id used by [`crate::graph::latin_to_graph`].
    ///
    /// Dense symbol sets `{0..k-1}` map to themselves. Anything else is
    /// numbered by first appearance.
    pub fn colour_map(&self) -> std::collections::BTreeMap<usize, usize> {
        let syms = self.symbols();
        let k = syms.len();
        if syms.iter().all(|&s| s < k) {
            syms.into_iter().map(|s| (s, s)).collect()
        } else {
            syms.into_iter().enumerate().map(|(i, s)| (s, i)).collect()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LatinArrayJson {
            n: self.n,
            cells: self.rows(),
        })
        .expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: LatinArrayJson = serde_json::from_str(s)?;
        if j.cells.len() != j.n {
            return Err(Error::invalid("cells length differs from n"));
        }
        Self::new(j.cells)
    }
}

impl Serialize for LatinArray {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatinArrayJson {
            n: self.n,
            cells: self.rows(),
        }
        .serialize(s)
    }
}

/// A set of cells sharing no row, column or symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transversal {
    pub cells: Vec<(usize, usize)>,
}

impl Transversal {
    /// Checks the transversal against `square`.
    pub fn new(cells: Vec<(usize, usize)>, square: &LatinArray) -> Result<Self> {
        let n = square.order();
        let mut rows = vec![false; n];
        let mut cols = vec![false; n];
        let mut syms = std::collections::HashSet::new();
        for &(r, c) in &cells {
            if r >= n || c >= n {
                return Err(Error::invalid(format!("cell ({r},{c}) out of range")));
            }
            let s = square
                .get(r, c)
                .ok_or_else(|| Error::invalid(format!("cell ({r},{c}) is empty")))?;
            if rows[r] || cols[c] || !syms.insert(s) {
                return Err(Error::invalid(format!("cell ({r},{c}) clashes")));
            }
            rows[r] = true;
            cols[c] = true;
        }
        Ok(Transversal { cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_full(&self, square: &LatinArray) -> bool {
        self.cells.len() == square.order()
    }

    pub fn symbols(&self, square: &LatinArray) -> Vec<usize> {
        self.cells
            .iter()
            .map(|&(r, c)| square.get(r, c).expect("checked on construction"))
            .collect()
    }
}

/// All Latin squares of order `n` on symbols `0..n`, in lexicographic order.
///
/// Intended for `n <= 5` (161280 squares at `n = 5`).
pub fn all_latin_squares(n: usize) -> Vec<LatinArray> {
    let mut out = Vec::new();
    for_each_latin_square(n, |cells| {
        out.push(LatinArray::from_flat_unchecked(
            n,
            cells.iter().map(|&s| Some(s as usize)).collect(),
        ))
    });
    out
}

/// Calls `f` on the row-major cells of every Latin square of order `n`.
pub fn for_each_latin_square(n: usize, mut f: impl FnMut(&[u8])) {
    if n == 0 {
        return;
    }
    let mut cells = vec![0u8; n * n];
    let mut row_used = vec![0u32; n];
    let mut col_used = vec![0u32; n];
    fn rec(
        pos: usize,
        n: usize,
        cells: &mut [u8],
        row_used: &mut [u32],
        col_used: &mut [u32],
        f: &mut dyn FnMut(&[u8]),
    ) {
        if pos == n * n {
            f(cells);
            return;
        }
        let (r, c) = (pos / n, pos % n);
        let free = !(row_used[r] | col_used[c]) & ((1u32 << n) - 1);
        let mut bits = free;
        while bits != 0 {
            let s = bits.trailing_zeros();
            bits &= bits - 1;
            cells[pos] = s as u8;
            row_used[r] |= 1 << s;
            col_used[c] |= 1 << s;
            rec(pos + 1, n, cells, row_used, col_used, f);
            row_used[r] &= !(1 << s);
            col_used[c] &= !(1 << s);
        }
    }
    rec(0, n, &mut cells, &mut row_used, &mut col_used, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_repeats() {
        assert!(LatinArray::from_rows(vec![vec![0, 0], vec![1, 0]]).is_err());
        assert!(LatinArray::from_rows(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(LatinArray::new(vec![vec![Some(0), None], vec![None, Some(0)]]).is_ok());
    }

    #[test]
    fn square_counts() {
        // 1, 2, 12, 576 Latin squares of orders 1..=4
        let counts: Vec<usize> = (1..=4).map(|n| all_latin_squares(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 12, 576]);
    }

    #[test]
    fn json_roundtrip() {
        let l = LatinArray::new(vec![vec![Some(0), None], vec![Some(1), Some(0)]]).unwrap();
        let s = l.to_json();
        assert_eq!(s, r#"{"n":2,"cells":[[0,null],[1,0]]}"#);
        assert_eq!(LatinArray::from_json(&s).unwrap(), l);
    }

    #[test]
    fn colour_map_policy() {
        let dense = LatinArray::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(dense.colour_map().get(&1), Some(&1));
        let sparse = LatinArray::from_rows(vec![vec![7, 3], vec![3, 7]]).unwrap();
        assert_eq!(sparse.colour_map().get(&7), Some(&0));
        assert_eq!(sparse.colour_map().get(&3), Some(&1));
    }
}
