//! The cycles `z(e)` attached to critical cells, and reduction of arbitrary
//! cycles to coordinates in that basis.
//!
//! A critical cell factors uniquely into irreducibles read left to right:
//! a singleton followed by a descending follower block of full width is a
//! *wheel*, an ascending 2-block (width 2 only) is a *pair*, and everything
//! else is a *singleton*. Wheels and pairs are the barriers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morse::{check_supported, critical_shape, is_follower, match_state, MatchState};
use crate::symbols::{Chain, Coeff, ComplexSpec, Label, Symbol, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    Singleton,
    Pair,
    Wheel,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    /// The factor's blocks, as they appear in the cell.
    pub blocks: Vec<Vec<Label>>,
}

impl Factor {
    pub fn is_barrier(&self) -> bool {
        self.kind != FactorKind::Singleton
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.blocks.iter().flatten().copied()
    }

    /// The cycle of this irreducible: the singleton itself, `a b + b a` for a
    /// pair, and the boundary of the descending block on all labels for a wheel.
    pub fn cycle(&self) -> Chain {
        match self.kind {
            FactorKind::Singleton => Chain::from_symbol(Symbol::block(&self.blocks[0]).expect("valid block")),
            FactorKind::Pair => {
                let (a, b) = (self.blocks[0][0], self.blocks[0][1]);
                let mut c = Chain::new();
                c.add_term(Symbol::block(&[a, b]).expect("valid block"), 1);
                c.add_term(Symbol::block(&[b, a]).expect("valid block"), 1);
                c
            }
            FactorKind::Wheel => {
                let mut all: Vec<Label> = self.labels().collect();
                all.sort_unstable_by(|x, y| y.cmp(x));
                Symbol::block(&all).expect("valid block").boundary()
            }
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = Symbol::from_blocks(&self.blocks).map_err(|_| fmt::Error)?;
        match self.kind {
            FactorKind::Singleton => write!(f, "{s}"),
            FactorKind::Pair => write!(f, "pair({s})"),
            FactorKind::Wheel => write!(f, "wheel({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BarrierFactorization {
    pub factors: Vec<Factor>,
}

impl BarrierFactorization {
    pub fn barriers(&self) -> usize {
        self.factors.iter().filter(|f| f.is_barrier()).count()
    }

    /// The cell the factors concatenate to.
    pub fn symbol(&self) -> Symbol {
        Symbol::from_blocks(self.factors.iter().flat_map(|f| f.blocks.iter())).expect("factors of a cell")
    }

    /// Number of blocks before the position right after the `k`-th barrier
    /// (`k = 0` is the front).
    pub fn insertion_block(&self, k: usize) -> Option<usize> {
        if k == 0 {
            return Some(0);
        }
        let mut seen = 0;
        let mut blocks = 0;
        for f in &self.factors {
            blocks += f.blocks.len();
            if f.is_barrier() {
                seen += 1;
                if seen == k {
                    return Some(blocks);
                }
            }
        }
        None
    }
}

impl fmt::Display for BarrierFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(Factor::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn check_critical(e: &Symbol, spec: &ComplexSpec) -> Result<()> {
    check_supported(spec)?;
    if !spec.contains(e)? {
        return Err(Error::NotInComplex(e.to_string()));
    }
    if !critical_shape(e, spec) {
        return Err(Error::NotCritical(e.to_string()));
    }
    Ok(())
}

/// Unique factorization of a critical cell into singletons, pairs and wheels.
pub fn factorize(e: &Symbol, spec: &ComplexSpec) -> Result<BarrierFactorization> {
    check_critical(e, spec)?;
    Ok(factorize_shape(e, spec))
}

/// Factorization of a cell already known to be critical. Works on injected
/// cells (any label set).
pub(crate) fn factorize_shape(e: &Symbol, spec: &ComplexSpec) -> BarrierFactorization {
    let wheel_len = match spec.variant {
        Variant::Full => 2,
        Variant::Desc => spec.w,
    };
    let blocks: Vec<&[Label]> = e.blocks().collect();
    let mut factors = Vec::new();
    let mut i = 0;
    while i < blocks.len() {
        let b = blocks[i];
        let next = blocks.get(i + 1).copied();
        let wheel = b.len() == 1
            && next.is_some_and(|nb| nb.len() == wheel_len && nb[0] > nb[1] && is_follower(Some(b), nb));
        if wheel {
            factors.push(Factor { kind: FactorKind::Wheel, blocks: vec![b.to_vec(), next.unwrap().to_vec()] });
            i += 2;
        } else if b.len() == 1 {
            factors.push(Factor { kind: FactorKind::Singleton, blocks: vec![b.to_vec()] });
            i += 1;
        } else {
            debug_assert!(b.len() == 2 && b[0] < b[1] && spec.variant == Variant::Full);
            factors.push(Factor { kind: FactorKind::Pair, blocks: vec![b.to_vec()] });
            i += 1;
        }
    }
    BarrierFactorization { factors }
}

/// The basis cycle of a critical cell: the concatenation product of the
/// cycles of its factors.
pub fn z_cycle(e: &Symbol, spec: &ComplexSpec) -> Result<Chain> {
    check_critical(e, spec)?;
    Ok(z_cycle_shape(e, spec))
}

pub(crate) fn z_cycle_shape(e: &Symbol, spec: &ComplexSpec) -> Chain {
    let fac = factorize_shape(e, spec);
    let mut it = fac.factors.iter();
    let mut acc = it.next().expect("nonempty cell").cycle();
    for f in it {
        acc = acc.concat(&f.cycle()).expect("factors have disjoint labels");
    }
    acc
}

/// Coordinates of a homology class in the basis of cycles `z(e)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisCoordinates {
    pub spec: ComplexSpec,
    pub dim: usize,
    pub coords: BTreeMap<Symbol, Coeff>,
}

impl BasisCoordinates {
    pub fn zero(spec: ComplexSpec, dim: usize) -> Self {
        BasisCoordinates { spec, dim, coords: BTreeMap::new() }
    }

    pub fn unit(spec: ComplexSpec, e: Symbol) -> Self {
        let dim = e.dimension();
        let mut c = Self::zero(spec, dim);
        c.coords.insert(e, 1);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, e: &Symbol) -> Coeff {
        self.coords.get(e).copied().unwrap_or(0)
    }

    pub fn add(&mut self, e: Symbol, k: Coeff) {
        if k == 0 {
            return;
        }
        let v = self.coords.entry(e.clone()).or_insert(0);
        *v = v.checked_add(k).expect("coordinate overflow");
        if *v == 0 {
            self.coords.remove(&e);
        }
    }

    pub fn add_scaled(&mut self, other: &BasisCoordinates, k: Coeff) {
        for (e, &v) in &other.coords {
            self.add(e.clone(), v.checked_mul(k).expect("coordinate overflow"));
        }
    }

    pub fn scaled(&self, k: Coeff) -> Self {
        let mut out = Self::zero(self.spec, self.dim);
        out.add_scaled(self, k);
        out
    }

    /// The cycle `sum a_e z(e)`.
    pub fn to_chain(&self) -> Chain {
        let mut c = Chain::new();
        for (e, &a) in &self.coords {
            c.add_scaled(&z_cycle_shape(e, &self.spec), a);
        }
        c
    }

    /// Coordinates as a dense vector over `basis` (critical cells in order).
    pub fn dense(&self, basis: &[Symbol]) -> Vec<Coeff> {
        basis.iter().map(|e| self.get(e)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.coords.iter().rev().map(|(e, &k)| (e.to_string(), serde_json::Value::from(k))).collect();
        serde_json::Value::Object(map)
    }
}

impl fmt::Display for BasisCoordinates {
    /// Written as a combination of basis cycles, e.g. `-z(1|3 2) + z(1|2 3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, &k)) in self.coords.iter().rev().enumerate() {
            let mag = k.unsigned_abs();
            match (i, k < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            if mag != 1 {
                write!(f, "{mag}·")?;
            }
            write!(f, "z({e})")?;
        }
        Ok(())
    }
}

/// Expresses a cycle supported in `spec` in the basis `z(e)`.
///
/// Repeatedly takes the greatest cell `m` of the residual: a critical `m` is
/// cancelled by a multiple of `z(m)` and recorded; a cell matched upward with
/// `g` is cancelled by a multiple of the boundary of `g`. Both steps strictly
/// lower the greatest cell.
pub fn reduce_to_basis(c: &Chain, spec: &ComplexSpec) -> Result<BasisCoordinates> {
    check_supported(spec)?;
    let Some(dim) = c.dimension() else {
        return Ok(BasisCoordinates::zero(*spec, 0));
    };
    if let Some((bad, _)) = c.iter().find(|(s, _)| !s.is_level(spec.n) || !spec.admits(s)) {
        return Err(Error::NotInComplex(bad.to_string()));
    }
    if !c.boundary().is_empty() {
        return Err(Error::NotACycle);
    }
    let mut out = BasisCoordinates::zero(*spec, dim);
    let mut residual = c.clone();
    while let Some((m, a)) = residual.max_term() {
        let m = m.clone();
        match match_state(&m, spec) {
            MatchState::Critical => {
                if !critical_shape(&m, spec) {
                    return Err(Error::NotCritical(m.to_string()));
                }
                let z = z_cycle_shape(&m, spec);
                let k = a * z.coeff(&m);
                out.add(m.clone(), k);
                residual.add_scaled(&z, -k);
            }
            MatchState::PairedUp(g) => {
                let dg = g.boundary();
                residual.add_scaled(&dg, -a * dg.coeff(&m));
            }
            MatchState::PairedDown(_) => return Err(Error::MatchedDownMaximum(m.to_string())),
        }
        if residual.max_term().is_some_and(|(next, _)| *next >= m) {
            return Err(Error::StalledReduction(m.to_string()));
        }
    }
    Ok(out)
}

/// Whether two cycles of the same dimension and labels represent the same class.
pub fn homologous(c1: &Chain, c2: &Chain, spec: &ComplexSpec) -> Result<bool> {
    if let (Some(d1), Some(d2)) = (c1.dimension(), c2.dimension()) {
        if d1 != d2 {
            return Err(Error::DimensionMismatch { expected: d1, found: d2 });
        }
    }
    Ok(reduce_to_basis(c1, spec)?.coords == reduce_to_basis(c2, spec)?.coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::critical_cells;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    fn chain(terms: &[(&str, Coeff)]) -> Chain {
        terms.iter().map(|&(s, k)| (sym(s), k)).collect()
    }

    #[test]
    fn factorizations() {
        let full5 = ComplexSpec::full(5, 2).unwrap();
        let f = factorize(&sym("2|5 3|1 4"), &full5).unwrap();
        assert_eq!(f.to_string(), "[wheel(2|5 3), pair(1 4)]");
        assert_eq!(f.barriers(), 2);
        let f = factorize(&sym("3|2|1"), &ComplexSpec::full(3, 2).unwrap()).unwrap();
        assert_eq!(f.to_string(), "[3, 2, 1]");
        assert_eq!(f.barriers(), 0);
        let desc = ComplexSpec::desc(9, 3).unwrap();
        let f = factorize(&sym("1|9 6 4|7|2|8 5 3"), &desc).unwrap();
        assert_eq!(f.to_string(), "[wheel(1|9 6 4), 7, wheel(2|8 5 3)]");
        assert!(matches!(factorize(&sym("1|9 6 4|7|5|8 3 2"), &desc), Err(Error::NotCritical(_))));
    }

    #[test]
    fn wheel_cycle_matches_boundary_example() {
        let spec = ComplexSpec::full(3, 2).unwrap();
        let expected = chain(&[
            ("1|3 2", 1),
            ("3 1|2", 1),
            ("3|2 1", 1),
            ("3 2|1", -1),
            ("2|3 1", -1),
            ("2 1|3", -1),
        ]);
        assert_eq!(z_cycle(&sym("1|3 2"), &spec).unwrap(), expected);
        assert_eq!(z_cycle(&sym("3|2|1"), &spec).unwrap(), chain(&[("3|2|1", 1)]));
    }

    #[test]
    fn concatenated_cycle() {
        let spec = ComplexSpec::full(5, 2).unwrap();
        let z = z_cycle(&sym("2|5 3|1 4"), &spec).unwrap();
        assert_eq!(z.len(), 12);
        let wheel = sym("3 2 1").boundary().relabel(|l| [0, 2, 3, 5].get(l as usize).copied()).unwrap();
        let pair = chain(&[("1 4", 1), ("4 1", 1)]);
        assert_eq!(z, wheel.concat(&pair).unwrap());
        assert!(z.boundary().is_empty());
    }

    #[test]
    fn basis_cycles_reduce_to_units() {
        for spec in [ComplexSpec::full(4, 2).unwrap(), ComplexSpec::desc(5, 3).unwrap()] {
            for dim in 0..=spec.max_dimension() {
                for e in critical_cells(&spec, dim).unwrap() {
                    let z = z_cycle(&e, &spec).unwrap();
                    assert!(z.boundary().is_empty());
                    let (top, k) = z.max_term().unwrap();
                    assert_eq!(top, &e);
                    assert_eq!(k.abs(), 1);
                    assert_eq!(reduce_to_basis(&z, &spec).unwrap(), BasisCoordinates::unit(spec, e));
                }
            }
        }
    }

    #[test]
    fn transposed_wheel_reduction() {
        let spec = ComplexSpec::full(3, 2).unwrap();
        let z = z_cycle(&sym("1|3 2"), &spec).unwrap();
        let swapped = z.relabel(|l| Some([0, 1, 3, 2][l as usize])).unwrap();
        let r = reduce_to_basis(&swapped, &spec).unwrap();
        let expected: BTreeMap<Symbol, Coeff> = [("1|3 2", -1), ("1|2 3", 1), ("2 3|1", -1)].iter().map(|&(s, k)| (sym(s), k)).collect();
        assert_eq!(r.coords, expected);
    }

    #[test]
    fn reduction_errors() {
        let spec = ComplexSpec::full(2, 2).unwrap();
        assert_eq!(reduce_to_basis(&chain(&[("1 2", 1)]), &spec), Err(Error::NotACycle));
        let spec3 = ComplexSpec::full(3, 2).unwrap();
        assert!(matches!(reduce_to_basis(&chain(&[("3 2 1", 1)]), &spec3), Err(Error::NotInComplex(_))));
        assert!(reduce_to_basis(&Chain::new(), &spec).unwrap().is_zero());
    }

    #[test]
    fn swapped_singletons_are_homologous() {
        let spec = ComplexSpec::full(4, 2).unwrap();
        let z14 = chain(&[("1 4", 1), ("4 1", 1)]);
        let a = z14.concat(&chain(&[("2|3", 1)])).unwrap();
        let b = z14.concat(&chain(&[("3|2", 1)])).unwrap();
        assert!(homologous(&a, &b, &spec).unwrap());
        let e = sym("4|3|1 2");
        let z = z_cycle(&e, &spec).unwrap();
        assert!(!homologous(&z, &z.scaled(2), &spec).unwrap());
    }
}
