//! The key function, the total order on cells, and the discrete gradient
//! field it induces on `cell(n, 2)` and `desc(n, w)`.
//!
//! A block is a *follower* when the block before it is a singleton smaller
//! than each of its labels. Each block contributes the pair
//! `(n + 1 - first label, size)`, or `(0, size)` for a follower, to the key,
//! and cells are ordered lexicographically by key. Comparing `n + 1 - a`
//! against `n + 1 - b` is the same as comparing `b` against `a`, so the order
//! does not depend on `n` and is implemented directly as [`Ord`] for
//! [`Symbol`]. Ties between equal keys are broken by the flattened label
//! sequence, the lexicographically smaller sequence being the greater cell
//! (so `1|2 3` sits above `1|3 2`, as it must for `z(1|2 3)` to have
//! `1|2 3` as its greatest cell).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::enumerate_cells;
use crate::error::{Error, Result};
use crate::symbols::{ComplexSpec, Label, Symbol, Variant};

/// Whether `block` is a follower of `prev`.
pub fn is_follower(prev: Option<&[Label]>, block: &[Label]) -> bool {
    match prev {
        Some([u]) => block.iter().all(|x| x > u),
        _ => false,
    }
}

/// Block-wise sort key: followers first, then non-followers by descending
/// first label, then size.
fn block_cmp(a_prev: Option<&[Label]>, a: &[Label], b_prev: Option<&[Label]>, b: &[Label]) -> Ordering {
    let fa = is_follower(a_prev, a);
    let fb = is_follower(b_prev, b);
    let by_first = match (fa, fb) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => b[0].cmp(&a[0]),
    };
    by_first.then(a.len().cmp(&b.len()))
}

/// Lexicographic comparison of keys only (no tie-break).
pub fn key_cmp(a: &Symbol, b: &Symbol) -> Ordering {
    let mut ia = a.blocks();
    let mut ib = b.blocks();
    let (mut pa, mut pb) = (None, None);
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let o = block_cmp(pa, x, pb, y);
                if o != Ordering::Equal {
                    return o;
                }
                pa = Some(x);
                pb = Some(y);
            }
        }
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        key_cmp(self, other)
            .then_with(|| other.labels().cmp(self.labels()))
            .then_with(|| self.num_blocks().cmp(&other.num_blocks()))
            .then_with(|| self.raw().cmp(other.raw()))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of two cells of level `n`; errors when either is not of level `n`.
pub fn compare(a: &Symbol, b: &Symbol, n: usize) -> Result<Ordering> {
    for s in [a, b] {
        if !s.is_level(n) {
            return Err(Error::LevelMismatch { expected: n, found: s.len() });
        }
    }
    Ok(a.cmp(b))
}

/// The key of a cell: one `(first-entry, size)` pair per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Key(pub Vec<(usize, usize)>);

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("{a},{b}")).collect();
        write!(f, "({})", parts.join("; "))
    }
}

/// Key of `s` at level `n`.
pub fn key(s: &Symbol, n: usize) -> Key {
    let mut prev = None;
    let mut out = Vec::with_capacity(s.num_blocks());
    for b in s.blocks() {
        let first = if is_follower(prev, b) { 0 } else { n + 1 - b[0] as usize };
        out.push((first, b.len()));
        prev = Some(b);
    }
    Key(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MatchState {
    Critical,
    /// Matched with a coface.
    PairedUp(Symbol),
    /// Matched with a face.
    PairedDown(Symbol),
}

impl MatchState {
    pub fn is_critical(&self) -> bool {
        matches!(self, MatchState::Critical)
    }
}

pub fn greatest_face(s: &Symbol) -> Option<Symbol> {
    s.faces().into_iter().map(|(f, _)| f).max()
}

pub fn least_coface(s: &Symbol, spec: &ComplexSpec) -> Option<Symbol> {
    s.cofaces(spec).into_iter().min()
}

/// Matching state of a cell of `spec`: `[f, g]` is a pair exactly when `f`
/// is the greatest face of `g` and `g` is the least coface of `f`.
pub fn match_state(s: &Symbol, spec: &ComplexSpec) -> MatchState {
    if let Some(f) = greatest_face(s) {
        if least_coface(&f, spec).as_ref() == Some(s) {
            return MatchState::PairedDown(f);
        }
    }
    if let Some(g) = least_coface(s, spec) {
        if greatest_face(&g).as_ref() == Some(s) {
            return MatchState::PairedUp(g);
        }
    }
    MatchState::Critical
}

/// Closed-form criticality: consecutive singletons decrease, and
/// - `cell(n, 2)`: every descending 2-block is a follower;
/// - `desc(n, w)`: every non-singleton block has `w` labels and is a follower.
///
/// Errors for `cell(n, w)` with `w != 2` and for width 1, where no closed
/// form is provided.
pub fn is_critical(s: &Symbol, spec: &ComplexSpec) -> Result<bool> {
    check_supported(spec)?;
    if !spec.contains(s)? {
        return Err(Error::NotInComplex(s.to_string()));
    }
    Ok(critical_shape(s, spec))
}

pub(crate) fn critical_shape(s: &Symbol, spec: &ComplexSpec) -> bool {
    let mut prev: Option<&[Label]> = None;
    for b in s.blocks() {
        if let (Some(&[u]), &[v]) = (prev, b) {
            if u < v {
                return false;
            }
        }
        if b.len() > 1 {
            let ok = match spec.variant {
                Variant::Full => b[0] < b[1] || is_follower(prev, b),
                Variant::Desc => b.len() == spec.w && is_follower(prev, b),
            };
            if !ok {
                return false;
            }
        }
        prev = Some(b);
    }
    true
}

/// Specs with a closed-form critical set, a factorization and an FI_d action.
pub fn check_supported(spec: &ComplexSpec) -> Result<()> {
    match (spec.variant, spec.w) {
        (_, 1) => Err(Error::UnsupportedSpec(format!("{spec}: width 1 has no pairs"))),
        (Variant::Full, 2) | (Variant::Desc, _) => Ok(()),
        (Variant::Full, _) => Err(Error::UnsupportedSpec(format!(
            "{spec}: critical cells are only characterized for width 2"
        ))),
    }
}

/// All critical cells of dimension `dim` by the closed form, in increasing order.
pub fn critical_cells(spec: &ComplexSpec, dim: usize) -> Result<Vec<Symbol>> {
    check_supported(spec)?;
    Ok(enumerate_cells(spec, Some(dim)).into_iter().filter(|s| critical_shape(s, spec)).collect())
}

/// The matching state of every cell of a complex.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub spec: ComplexSpec,
    cells: Vec<Symbol>,
    states: Vec<MatchState>,
    index: HashMap<Symbol, usize>,
}

/// Result of the matching audit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub spec: String,
    pub cells: usize,
    pub pairs: usize,
    pub critical_by_dim: Vec<usize>,
    /// Pairs whose partner does not point back, or partners outside the complex.
    pub involution_failures: Vec<String>,
    /// Cells where the closed form disagrees with the matching.
    pub predicate_mismatches: Vec<String>,
    /// Strongly connected sets of matched cells, each carrying a closed walk.
    pub closed_walks: Vec<Vec<String>>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.involution_failures.is_empty() && self.predicate_mismatches.is_empty() && self.closed_walks.is_empty()
    }
}

impl GradientField {
    pub fn compute(spec: &ComplexSpec) -> Self {
        let cells = enumerate_cells(spec, None);
        let states: Vec<MatchState> = cells.par_iter().map(|s| match_state(s, spec)).collect();
        let index = cells.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        GradientField { spec: *spec, cells, states, index }
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn state(&self, s: &Symbol) -> Option<&MatchState> {
        self.index.get(s).map(|&i| &self.states[i])
    }

    pub fn critical(&self) -> impl Iterator<Item = &Symbol> + '_ {
        self.cells.iter().zip(&self.states).filter(|(_, st)| st.is_critical()).map(|(s, _)| s)
    }

    pub fn critical_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.spec.max_dimension() + 1];
        for s in self.critical() {
            counts[s.dimension()] += 1;
        }
        counts
    }

    /// Pairs `[f, g]` with `f` a face of `g`.
    pub fn pairs(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> + '_ {
        self.cells.iter().zip(&self.states).filter_map(|(s, st)| match st {
            MatchState::PairedUp(g) => Some((s, g)),
            _ => None,
        })
    }

    fn involution_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (s, st) in self.cells.iter().zip(&self.states) {
            let (partner, back) = match st {
                MatchState::Critical => continue,
                MatchState::PairedUp(g) => (g, MatchState::PairedDown(s.clone())),
                MatchState::PairedDown(f) => (f, MatchState::PairedUp(s.clone())),
            };
            if self.state(partner) != Some(&back) {
                out.push(format!("{s} -> {partner}"));
            }
        }
        out
    }

    fn predicate_mismatches(&self) -> Vec<String> {
        if check_supported(&self.spec).is_err() {
            return Vec::new();
        }
        self.cells
            .iter()
            .zip(&self.states)
            .filter(|(s, st)| critical_shape(s, &self.spec) != st.is_critical())
            .map(|(s, st)| format!("{s}: matching says {st:?}"))
            .collect()
    }

    /// Closed V-walks: cycles in the digraph on matched-up cells with an edge
    /// `f -> f'` whenever `f' != f` is a matched-up face of `f`'s partner.
    pub fn closed_walks(&self) -> Vec<Vec<Symbol>> {
        let mut graph = DiGraph::<usize, ()>::new();
        let mut node: HashMap<usize, NodeIndex> = HashMap::new();
        for (i, st) in self.states.iter().enumerate() {
            if matches!(st, MatchState::PairedUp(_)) {
                node.insert(i, graph.add_node(i));
            }
        }
        for (&i, &from) in &node {
            let MatchState::PairedUp(g) = &self.states[i] else { unreachable!() };
            for (f, _) in g.faces() {
                if let Some(&j) = self.index.get(&f) {
                    if j != i {
                        if let Some(&to) = node.get(&j) {
                            graph.add_edge(from, to, ());
                        }
                    }
                }
            }
        }
        petgraph::algo::tarjan_scc(&graph)
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let mut v: Vec<Symbol> = c.iter().map(|&x| self.cells[graph[x]].clone()).collect();
                v.sort();
                v
            })
            .collect()
    }

    pub fn audit(&self) -> AuditReport {
        AuditReport {
            spec: self.spec.to_string(),
            cells: self.cells.len(),
            pairs: self.pairs().count(),
            critical_by_dim: self.critical_counts(),
            involution_failures: self.involution_failures(),
            predicate_mismatches: self.predicate_mismatches(),
            closed_walks: self
                .closed_walks()
                .into_iter()
                .map(|c| c.iter().map(Symbol::to_string).collect())
                .collect(),
        }
    }
}

/// Searches `spec` for closed V-walks. An empty result means the field is gradient.
pub fn verify_acyclic(spec: &ComplexSpec) -> Vec<Vec<Symbol>> {
    GradientField::compute(spec).closed_walks()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    #[test]
    fn keys_from_face_coface_figure() {
        let cases = [
            ("6|2|1 3|4|9 8|5|7", "(4,1; 8,1; 9,2; 6,1; 0,2; 5,1; 0,1)"),
            ("6|2|1 3|4|9 8|7 5", "(4,1; 8,1; 9,2; 6,1; 0,2; 3,2)"),
        ];
        for (s, k) in cases {
            assert_eq!(key(&sym(s), 9).to_string(), k);
        }
        assert_eq!(key(&sym("1"), 1).0, vec![(1, 1)]);
    }

    #[test]
    fn order_examples() {
        assert!(sym("2 1") < sym("1 2"));
        // the paired face sits above its coface: (.., 5,1; 0,1) beats (.., 3,2)
        assert!(sym("6|2|1 3|4|9 8|7 5") < sym("6|2|1 3|4|9 8|5|7"));
        assert_eq!(compare(&sym("1|2"), &sym("1|2"), 2), Ok(Ordering::Equal));
        assert!(compare(&sym("1|2"), &sym("1|3"), 2).is_err());
    }

    #[test]
    fn order_matches_key_lexicographic() {
        let spec = ComplexSpec::full(4, 4).unwrap();
        let cells = enumerate_cells(&spec, None);
        for a in cells.iter().step_by(7) {
            for b in cells.iter().step_by(5) {
                let (ka, kb) = (key(a, 4), key(b, 4));
                let pad = |k: &Key| {
                    let mut v: Vec<usize> = k.0.iter().flat_map(|&(x, y)| [x, y]).collect();
                    v.resize(8, 0);
                    v
                };
                let lex = pad(&ka).cmp(&pad(&kb));
                if lex != Ordering::Equal {
                    assert_eq!(a.cmp(b), lex, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn face_coface_pairing() {
        let spec = ComplexSpec::full(9, 2).unwrap();
        let f = sym("6|2|1 3|4|9 8|5|7");
        let g = sym("6|2|1 3|4|9 8|7 5");
        assert_eq!(match_state(&f, &spec), MatchState::PairedUp(g.clone()));
        assert_eq!(match_state(&g, &spec), MatchState::PairedDown(f));
    }

    #[test]
    fn small_gradient_fields() {
        let field = GradientField::compute(&ComplexSpec::full(2, 2).unwrap());
        let crit: Vec<String> = field.critical().map(Symbol::to_string).collect();
        assert_eq!(crit, vec!["2|1", "1 2"]);
        assert_eq!(field.state(&sym("1|2")), Some(&MatchState::PairedUp(sym("2 1"))));

        let field = GradientField::compute(&ComplexSpec::desc(3, 2).unwrap());
        let mut crit: Vec<String> = field.critical().map(Symbol::to_string).collect();
        crit.sort();
        assert_eq!(crit, vec!["1|3 2", "3|2|1"]);
    }

    #[test]
    fn closed_form_examples() {
        let full = ComplexSpec::full(3, 2).unwrap();
        assert!(is_critical(&sym("1|3 2"), &full).unwrap());
        assert!(!is_critical(&sym("2|3 1"), &full).unwrap());
        assert!(is_critical(&sym("1|2 3"), &full).unwrap());
        let desc = ComplexSpec::desc(9, 3).unwrap();
        assert!(is_critical(&sym("1|9 6 4|7|2|8 5 3"), &desc).unwrap());
        // 3 and 2 are below the singleton 5, so 8 3 2 is not a follower
        assert!(!is_critical(&sym("1|9 6 4|7|5|8 3 2"), &desc).unwrap());
        let wide = ComplexSpec::full(3, 3).unwrap();
        assert!(matches!(is_critical(&sym("1|3 2"), &wide), Err(Error::UnsupportedSpec(_))));
    }

    #[test]
    fn audits_pass_small() {
        for spec in [
            ComplexSpec::full(1, 1).unwrap(),
            ComplexSpec::full(4, 2).unwrap(),
            ComplexSpec::desc(5, 3).unwrap(),
        ] {
            let report = GradientField::compute(&spec).audit();
            assert!(report.passed(), "{report:?}");
        }
    }
}
