//! Enumeration of the cells of `cell(n, w)` / `desc(n, w)` and sparse
//! boundary matrices.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symbols::{ComplexSpec, Label, Symbol, Variant};

/// Calls `visit` once for every cell of `spec` (of dimension `dim`, if given),
/// in generation order.
pub fn for_each_cell(spec: &ComplexSpec, dim: Option<usize>, mut visit: impl FnMut(Symbol)) {
    let n = spec.n;
    let blocks = dim.map(|d| n.checked_sub(d));
    if let Some(None) = blocks {
        return;
    }
    let mut walker = Walker {
        spec: *spec,
        target_blocks: blocks.flatten(),
        used: vec![false; n + 1],
        raw: Vec::with_capacity(2 * n),
        placed: 0,
        nblocks: 0,
    };
    walker.blocks(&mut visit);
}

struct Walker {
    spec: ComplexSpec,
    target_blocks: Option<usize>,
    used: Vec<bool>,
    raw: Vec<Label>,
    placed: usize,
    nblocks: usize,
}

impl Walker {
    fn blocks(&mut self, visit: &mut impl FnMut(Symbol)) {
        let n = self.spec.n;
        let remaining = n - self.placed;
        if remaining == 0 {
            if self.target_blocks.is_none_or(|t| t == self.nblocks) {
                visit(Symbol::from_raw(self.raw.clone()));
            }
            return;
        }
        if let Some(t) = self.target_blocks {
            // each later block holds between 1 and w labels
            let left = t.saturating_sub(self.nblocks);
            if left == 0 || remaining < left || remaining > left * self.spec.w {
                return;
            }
        }
        let mark = self.raw.len();
        if self.nblocks > 0 {
            self.raw.push(0);
        }
        self.nblocks += 1;
        for size in 1..=self.spec.w.min(remaining) {
            self.block(size, visit);
        }
        self.nblocks -= 1;
        self.raw.truncate(mark);
    }

    /// Extends the current block by `left` more labels, then continues.
    fn block(&mut self, left: usize, visit: &mut impl FnMut(Symbol)) {
        if left == 0 {
            self.blocks(visit);
            return;
        }
        let n = self.spec.n;
        let desc = self.spec.variant == Variant::Desc;
        // in the descending variant the next label must be below the previous one in the block
        let cap = match (desc, self.raw.last()) {
            (true, Some(&l)) if l != 0 => l as usize - 1,
            _ => n,
        };
        for l in 1..=cap {
            if self.used[l] {
                continue;
            }
            self.used[l] = true;
            self.raw.push(l as Label);
            self.placed += 1;
            self.block(left - 1, visit);
            self.placed -= 1;
            self.raw.pop();
            self.used[l] = false;
        }
    }
}

/// All cells of `spec` (of dimension `dim`, if given) in increasing cell order.
pub fn enumerate_cells(spec: &ComplexSpec, dim: Option<usize>) -> Vec<Symbol> {
    let mut out = Vec::new();
    for_each_cell(spec, dim, |s| out.push(s));
    out.par_sort_unstable();
    out
}

/// Number of cells in each dimension `0..=max_dimension`.
pub fn cell_counts(spec: &ComplexSpec) -> Vec<u128> {
    let n = spec.n;
    let w = spec.w.min(n);
    let binom = |a: usize, b: usize| -> u128 { (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128) };
    let orderings = |s: usize| -> u128 {
        match spec.variant {
            Variant::Full => (1..=s as u128).product(),
            Variant::Desc => 1,
        }
    };
    // ways[r][b] = arrangements of r labels into b ordered blocks
    let mut ways = vec![vec![0u128; n + 1]; n + 1];
    ways[0][0] = 1;
    for r in 1..=n {
        for b in 1..=r {
            ways[r][b] = (1..=w.min(r)).map(|s| binom(r, s) * orderings(s) * ways[r - s][b - 1]).sum();
        }
    }
    let top = spec.max_dimension();
    (0..=top).map(|d| ways[n][n - d]).collect()
}

/// Dense index of the cells of one dimension, in cell order.
#[derive(Debug, Clone, Default)]
pub struct CellIndex {
    cells: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl CellIndex {
    pub fn new(spec: &ComplexSpec, dim: usize) -> Self {
        Self::from_sorted(enumerate_cells(spec, Some(dim)))
    }

    pub fn from_sorted(cells: Vec<Symbol>) -> Self {
        let index = cells.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        CellIndex { cells, index }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.cells[i]
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }
}

/// Sparse integer matrix in coordinate form.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)`, 0-based, no zeros.
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(c, &v)| (r, c, v)))
            .collect();
        SparseIntMatrix { rows: rows.len(), cols, entries }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Entries grouped by column, each sorted by row.
    pub fn columns(&self) -> Vec<Vec<(usize, i64)>> {
        let mut cols = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.entries {
            cols[c].push((r, v));
        }
        for col in &mut cols {
            col.sort_unstable_by_key(|e| e.0);
        }
        cols
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] += v;
        }
        d
    }

    /// `self * other`, with `i128` accumulation.
    pub fn mul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut acc: HashMap<(usize, usize), i128> = HashMap::new();
        for &(r, k, v) in &self.entries {
            for &(c, w) in &by_row[k] {
                *acc.entry((r, c)).or_default() += v as i128 * w as i128;
            }
        }
        let mut entries: Vec<(usize, usize, i64)> = acc
            .into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((r, c), v)| (r, c, i64::try_from(v).expect("product entry exceeds i64")))
            .collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
        SparseIntMatrix { rows: self.rows, cols: other.cols, entries }
    }

    /// Coordinate triplet text: a `rows cols nnz` header, then one 1-based
    /// `r c v` line per entry.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for &(r, c, v) in &self.entries {
            let _ = writeln!(s, "{} {} {}", r + 1, c + 1, v);
        }
        s
    }

    pub fn from_triplets(text: &str) -> crate::Result<Self> {
        let err = |d: String| crate::Error::Parse { what: "triplet matrix", detail: d };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| err("missing header".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(format!("bad header token {t:?}"))))
            .collect::<crate::Result<_>>()?;
        let [rows, cols, nnz] = header[..] else {
            return Err(err("header must be `rows cols nnz`".into()));
        };
        let mut entries = Vec::with_capacity(nnz);
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            let [r, c, v] = t[..] else {
                return Err(err(format!("bad entry line {line:?}")));
            };
            let r: usize = r.parse().map_err(|_| err(format!("bad row {r:?}")))?;
            let c: usize = c.parse().map_err(|_| err(format!("bad column {c:?}")))?;
            let v: i64 = v.parse().map_err(|_| err(format!("bad value {v:?}")))?;
            if r == 0 || r > rows || c == 0 || c > cols {
                return Err(err(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            entries.push((r - 1, c - 1, v));
        }
        if entries.len() != nnz {
            return Err(err(format!("header says {nnz} entries, found {}", entries.len())));
        }
        Ok(SparseIntMatrix { rows, cols, entries })
    }
}

/// Matrix of the boundary from `dim`-cells (columns) to `(dim-1)`-cells
/// (rows), both indexed in cell order.
pub fn boundary_matrix(spec: &ComplexSpec, dim: usize) -> SparseIntMatrix {
    assert!(dim >= 1, "boundary_matrix needs dim >= 1");
    let rows = CellIndex::new(spec, dim - 1);
    let cols = CellIndex::new(spec, dim);
    boundary_matrix_between(&rows, &cols)
}

pub fn boundary_matrix_between(rows: &CellIndex, cols: &CellIndex) -> SparseIntMatrix {
    let entries: Vec<Vec<(usize, usize, i64)>> = cols
        .cells()
        .par_iter()
        .enumerate()
        .map(|(c, cell)| {
            let mut col: Vec<(usize, usize, i64)> = cell
                .faces()
                .into_iter()
                .filter_map(|(f, k)| rows.get(&f).map(|r| (r, c, k)))
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect();
    SparseIntMatrix { rows: rows.len(), cols: cols.len(), entries: entries.into_iter().flatten().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[Symbol]) -> Vec<String> {
        let mut out: Vec<String> = v.iter().map(Symbol::to_string).collect();
        out.sort();
        out
    }

    #[test]
    fn counts_small() {
        let full = ComplexSpec::full(3, 2).unwrap();
        assert_eq!(enumerate_cells(&full, None).len(), 18);
        assert_eq!(cell_counts(&full), vec![6, 12]);
        let desc = ComplexSpec::desc(3, 2).unwrap();
        assert_eq!(cell_counts(&desc), vec![6, 6]);
        assert_eq!(
            names(&enumerate_cells(&desc, Some(1))),
            vec!["1|3 2", "2 1|3", "2|3 1", "3 1|2", "3 2|1", "3|2 1"]
        );
        let one = ComplexSpec::full(1, 1).unwrap();
        assert_eq!(names(&enumerate_cells(&one, Some(0))), vec!["1"]);
        assert_eq!(cell_counts(&one), vec![1]);
        assert!(enumerate_cells(&full, Some(5)).is_empty());
    }

    #[test]
    fn counts_agree_with_enumeration() {
        for n in 1..=6 {
            for w in 1..=n {
                for v in [Variant::Full, Variant::Desc] {
                    let spec = ComplexSpec::new(n, w, v).unwrap();
                    let counts = cell_counts(&spec);
                    for (d, &c) in counts.iter().enumerate() {
                        assert_eq!(enumerate_cells(&spec, Some(d)).len() as u128, c, "{spec} dim {d}");
                    }
                }
            }
        }
        assert_eq!(cell_counts(&ComplexSpec::full(6, 2).unwrap()).iter().sum::<u128>(), 9360);
        assert_eq!(cell_counts(&ComplexSpec::full(6, 6).unwrap()).iter().sum::<u128>(), 23040);
    }

    #[test]
    fn enumeration_is_sorted_and_in_spec() {
        let spec = ComplexSpec::desc(5, 3).unwrap();
        let cells = enumerate_cells(&spec, None);
        assert!(cells.windows(2).all(|p| p[0] < p[1]));
        assert!(cells.iter().all(|s| spec.contains(s).unwrap()));
    }

    #[test]
    fn small_boundary_matrices() {
        let m = boundary_matrix(&ComplexSpec::full(2, 2).unwrap(), 1);
        assert_eq!((m.rows, m.cols), (2, 2));
        for col in m.columns() {
            let mut vals: Vec<i64> = col.iter().map(|e| e.1).collect();
            vals.sort();
            assert_eq!(vals, vec![-1, 1]);
        }
        let spec = ComplexSpec::desc(3, 2).unwrap();
        let m = boundary_matrix(&spec, 1);
        assert_eq!((m.rows, m.cols, m.nnz()), (6, 6, 12));
        let top = boundary_matrix(&spec, 2);
        assert_eq!((top.rows, top.cols), (6, 0));
    }

    #[test]
    fn triplet_round_trip() {
        let m = boundary_matrix(&ComplexSpec::full(3, 2).unwrap(), 1);
        let text = m.to_triplets();
        assert!(text.starts_with("6 12 24\n"));
        assert_eq!(SparseIntMatrix::from_triplets(&text).unwrap(), m);
        assert!(SparseIntMatrix::from_triplets("2 2 1\n3 1 1\n").is_err());
    }
}
