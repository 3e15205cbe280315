//! Cells of `cell(n)` written as symbols, and integer chains of them.
//!
//! A symbol is a permutation of its labels cut into ordered blocks by bars,
//! written like `6|2|1 3|4|9 8|5|7`. Symbols here are *injected* cells: the
//! label set is any set of distinct positive integers, so relabeling and
//! concatenation stay inside the same type. A symbol is a cell of level `n`
//! when its labels are exactly `1..=n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = u8;

/// Exact integer coefficient of a chain term.
pub type Coeff = i64;

pub const MAX_LABEL: usize = Label::MAX as usize;

const BAR: Label = 0;

/// Largest block the face enumeration accepts (subsets are walked as bitmasks).
const MAX_BLOCK: usize = 40;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    // Labels in order, with `BAR` between consecutive blocks.
    raw: Vec<Label>,
}

impl Symbol {
    /// Builds a symbol from its blocks, checking that blocks are nonempty and
    /// labels are distinct and positive.
    pub fn from_blocks<I, B>(blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: AsRef<[Label]>,
    {
        let mut raw = Vec::new();
        let mut seen = [false; MAX_LABEL + 1];
        for (i, block) in blocks.into_iter().enumerate() {
            let block = block.as_ref();
            if block.is_empty() {
                return Err(Error::EmptyBlock);
            }
            if i > 0 {
                raw.push(BAR);
            }
            for &l in block {
                if l == BAR {
                    return Err(Error::LabelOutOfRange { label: 0, n: MAX_LABEL });
                }
                if std::mem::replace(&mut seen[l as usize], true) {
                    return Err(Error::DuplicateLabel(l));
                }
                raw.push(l);
            }
        }
        if raw.is_empty() {
            return Err(Error::EmptyBlock);
        }
        Ok(Symbol { raw })
    }

    /// Single block with the given labels in order.
    pub fn block(labels: &[Label]) -> Result<Self> {
        Self::from_blocks([labels])
    }

    pub(crate) fn from_raw(raw: Vec<Label>) -> Self {
        debug_assert!(!raw.is_empty() && raw[0] != BAR && *raw.last().unwrap() != BAR);
        Symbol { raw }
    }

    pub(crate) fn raw(&self) -> &[Label] {
        &self.raw
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[Label]> + '_ {
        self.raw.split(|&l| l == BAR)
    }

    pub fn block_vec(&self) -> Vec<Vec<Label>> {
        self.blocks().map(<[Label]>::to_vec).collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.raw.iter().filter(|&&l| l == BAR).count() + 1
    }

    /// Number of labels.
    pub fn len(&self) -> usize {
        self.raw.len() + 1 - self.num_blocks()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sum over blocks of `|block| - 1`.
    pub fn dimension(&self) -> usize {
        self.len() - self.num_blocks()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.raw.iter().copied().filter(|&l| l != BAR)
    }

    pub fn label_set(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.labels().collect();
        v.sort_unstable();
        v
    }

    pub fn max_label(&self) -> Label {
        self.labels().max().unwrap_or(0)
    }

    /// True when the labels are exactly `1..=n`.
    pub fn is_level(&self, n: usize) -> bool {
        self.len() == n && self.max_label() as usize == n
    }

    /// Checks that the labels are exactly `1..=n`, reporting the first defect.
    pub fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        if n > MAX_LABEL {
            return Err(Error::LevelTooLarge(n));
        }
        let mut seen = vec![false; n + 1];
        for l in self.labels() {
            if l as usize > n {
                return Err(Error::LabelOutOfRange { label: l as u32, n });
            }
            seen[l as usize] = true;
        }
        match (1..=n).find(|&i| !seen[i]) {
            Some(missing) => Err(Error::MissingLabel(missing as Label)),
            None => Ok(()),
        }
    }

    /// Parses `text` and requires the labels to be exactly `1..=n`.
    pub fn parse_level(text: &str, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        let s = parse_blocks(text, n)?;
        s.check_level(n)?;
        Ok(s)
    }

    /// `self | other`. Label sets must be disjoint.
    pub fn concat(&self, other: &Symbol) -> Result<Symbol> {
        let mut mine = [false; MAX_LABEL + 1];
        for l in self.labels() {
            mine[l as usize] = true;
        }
        if let Some(l) = other.labels().find(|&l| mine[l as usize]) {
            return Err(Error::OverlappingLabels(l));
        }
        let mut raw = Vec::with_capacity(self.raw.len() + other.raw.len() + 1);
        raw.extend_from_slice(&self.raw);
        raw.push(BAR);
        raw.extend_from_slice(&other.raw);
        Ok(Symbol { raw })
    }

    /// Applies a label map to every label. The map must be defined and
    /// injective on this symbol's labels.
    pub fn relabel(&self, phi: impl Fn(Label) -> Option<Label>) -> Result<Symbol> {
        let mut hit = [false; MAX_LABEL + 1];
        let mut raw = Vec::with_capacity(self.raw.len());
        for &l in &self.raw {
            if l == BAR {
                raw.push(BAR);
                continue;
            }
            let image = phi(l).filter(|&x| x != BAR).ok_or(Error::UnmappedLabel(l))?;
            if std::mem::replace(&mut hit[image as usize], true) {
                return Err(Error::NotInjective(image));
            }
            raw.push(image);
        }
        Ok(Symbol { raw })
    }

    /// Every block rearranged into descending order, with the product of the
    /// signs of the sorting permutations.
    pub fn sorted_descending(&self) -> (Symbol, Coeff) {
        let mut raw = Vec::with_capacity(self.raw.len());
        let mut sign = 1;
        for (i, block) in self.blocks().enumerate() {
            if i > 0 {
                raw.push(BAR);
            }
            let ascents = block
                .iter()
                .enumerate()
                .map(|(a, x)| block[a + 1..].iter().filter(|y| *y > x).count())
                .sum::<usize>();
            if ascents % 2 == 1 {
                sign = -sign;
            }
            let mut b = block.to_vec();
            b.sort_unstable_by(|x, y| y.cmp(x));
            raw.extend_from_slice(&b);
        }
        (Symbol { raw }, sign)
    }

    pub fn is_descending(&self) -> bool {
        self.blocks().all(|b| b.windows(2).all(|p| p[0] > p[1]))
    }

    pub fn max_block_len(&self) -> usize {
        self.blocks().map(<[Label]>::len).max().unwrap_or(0)
    }

    /// The signed faces: every way of splitting one block into two, with the
    /// coefficient it carries in the boundary.
    ///
    /// Splitting block `B` into `B1|B2`, where `B1` keeps the inherited order
    /// of a nonempty proper subset and `B2` is the rest, has coefficient
    /// `(-1)^(|B1|+1) * sign(sigma)` with `B1 B2 = B o sigma`, times
    /// `(-1)^d` where `d` is the total dimension of the blocks before `B`.
    pub fn faces(&self) -> Vec<(Symbol, Coeff)> {
        let blocks: Vec<&[Label]> = self.blocks().collect();
        let mut out = Vec::new();
        let mut offset = 0usize;
        let mut before = 0usize;
        for block in blocks.iter() {
            let len = block.len();
            assert!(len <= MAX_BLOCK, "block of {len} labels is too large to split");
            let start = offset;
            offset += len + 1;
            let dim_before = before;
            before += len - 1;
            if len < 2 {
                continue;
            }
            let prefix = &self.raw[..start];
            let suffix = &self.raw[(start + len).min(self.raw.len())..];
            let full: u64 = (1u64 << len) - 1;
            for mask in 1..full {
                let first = mask.count_ones() as usize;
                // inversions of the position sequence [positions in mask, positions not in mask]
                let mut inversions = 0usize;
                let mut outside_before = 0usize;
                for p in 0..len {
                    if mask >> p & 1 == 1 {
                        inversions += outside_before;
                    } else {
                        outside_before += 1;
                    }
                }
                let sign: Coeff = if (dim_before + first + 1 + inversions) % 2 == 0 { 1 } else { -1 };
                let mut raw = Vec::with_capacity(self.raw.len() + 1);
                raw.extend_from_slice(prefix);
                raw.extend((0..len).filter(|p| mask >> p & 1 == 1).map(|p| block[p]));
                raw.push(BAR);
                raw.extend((0..len).filter(|p| mask >> p & 1 == 0).map(|p| block[p]));
                raw.extend_from_slice(suffix);
                out.push((Symbol { raw }, sign));
            }
        }
        out
    }

    pub fn boundary(&self) -> Chain {
        let mut c = Chain::new();
        for (f, s) in self.faces() {
            c.add_term(f, s);
        }
        c
    }

    /// All cofaces inside `spec`: each adjacent pair of blocks merged by an
    /// order-preserving shuffle, keeping only merges that stay in the complex.
    pub fn cofaces(&self, spec: &ComplexSpec) -> Vec<Symbol> {
        let blocks: Vec<&[Label]> = self.blocks().collect();
        let mut out = Vec::new();
        for i in 0..blocks.len().saturating_sub(1) {
            let (a, b) = (blocks[i], blocks[i + 1]);
            let total = a.len() + b.len();
            if total > spec.w {
                continue;
            }
            let mut emit = |merged: Vec<Label>| {
                let mut raw = Vec::with_capacity(self.raw.len());
                for (k, blk) in blocks.iter().enumerate() {
                    if k == i + 1 {
                        continue;
                    }
                    if !raw.is_empty() {
                        raw.push(BAR);
                    }
                    if k == i {
                        raw.extend_from_slice(&merged);
                    } else {
                        raw.extend_from_slice(blk);
                    }
                }
                out.push(Symbol { raw });
            };
            match spec.variant {
                Variant::Desc => {
                    let mut merged: Vec<Label> = a.iter().chain(b).copied().collect();
                    merged.sort_unstable_by(|x, y| y.cmp(x));
                    emit(merged);
                }
                Variant::Full => {
                    for merged in shuffles(a, b) {
                        emit(merged);
                    }
                }
            }
        }
        out
    }
}

/// Every interleaving of `a` and `b` that keeps the order inside each.
fn shuffles(a: &[Label], b: &[Label]) -> Vec<Vec<Label>> {
    fn go(a: &[Label], b: &[Label], cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if a.is_empty() || b.is_empty() {
            let mut v = cur.clone();
            v.extend_from_slice(a);
            v.extend_from_slice(b);
            out.push(v);
            return;
        }
        cur.push(a[0]);
        go(&a[1..], b, cur, out);
        cur.pop();
        cur.push(b[0]);
        go(a, &b[1..], cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(a, b, &mut Vec::with_capacity(a.len() + b.len()), &mut out);
    out
}

fn parse_blocks(text: &str, max: usize) -> Result<Symbol> {
    let err = |detail: String| Error::Parse { what: "symbol", detail };
    let text = text.trim();
    if text.is_empty() {
        return Err(err("empty input".into()));
    }
    let mut blocks = Vec::new();
    for part in text.split('|') {
        let mut block = Vec::new();
        for tok in part.split_whitespace() {
            let v: u32 = tok.parse().map_err(|_| err(format!("bad label {tok:?}")))?;
            if v == 0 || v as usize > max {
                return Err(Error::LabelOutOfRange { label: v, n: max });
            }
            block.push(v as Label);
        }
        blocks.push(block);
    }
    Symbol::from_blocks(blocks)
}

impl FromStr for Symbol {
    type Err = Error;

    /// Parses an injected cell with arbitrary labels in `1..=255`.
    fn from_str(s: &str) -> Result<Self> {
        parse_blocks(s, MAX_LABEL)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut prev_bar = true;
        for &l in &self.raw {
            if l == BAR {
                f.write_str("|")?;
                prev_bar = true;
            } else {
                if !prev_bar {
                    f.write_str(" ")?;
                }
                write!(f, "{l}")?;
                prev_bar = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `cell(n, w)`: every block has at most `w` labels.
    Full,
    /// `desc(n, w)`: additionally every block is in descending order.
    #[serde(alias = "descending")]
    Desc,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "cell" => Ok(Variant::Full),
            "desc" | "descending" => Ok(Variant::Desc),
            other => Err(Error::Parse { what: "variant", detail: format!("{other:?}") }),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::Desc => "desc",
        })
    }
}

/// Which subcomplex of `cell(n)` we are working in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub n: usize,
    pub w: usize,
    pub variant: Variant,
}

impl ComplexSpec {
    pub fn new(n: usize, w: usize, variant: Variant) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        if n > MAX_LABEL {
            return Err(Error::LevelTooLarge(n));
        }
        if w == 0 {
            return Err(Error::ZeroWidth);
        }
        Ok(ComplexSpec { n, w, variant })
    }

    pub fn full(n: usize, w: usize) -> Result<Self> {
        Self::new(n, w, Variant::Full)
    }

    pub fn desc(n: usize, w: usize) -> Result<Self> {
        Self::new(n, w, Variant::Desc)
    }

    /// Same width and variant at another level.
    pub fn at_level(&self, n: usize) -> Result<Self> {
        Self::new(n, self.w, self.variant)
    }

    /// Top dimension: `n` minus the least possible number of blocks.
    pub fn max_dimension(&self) -> usize {
        let w = self.w.min(self.n);
        self.n - self.n.div_ceil(w)
    }

    /// Membership test for a symbol whose level has already been checked.
    pub fn admits(&self, s: &Symbol) -> bool {
        s.max_block_len() <= self.w && (self.variant == Variant::Full || s.is_descending())
    }

    /// `in_complex`: errors when `s` is not a symbol of level `n`.
    pub fn contains(&self, s: &Symbol) -> Result<bool> {
        if !s.is_level(self.n) {
            return Err(Error::LevelMismatch { expected: self.n, found: s.len() });
        }
        Ok(self.admits(s))
    }
}

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Variant::Full => write!(f, "cell({}, {})", self.n, self.w),
            Variant::Desc => write!(f, "desc({}, {})", self.n, self.w),
        }
    }
}

/// A finite integer combination of symbols sharing a dimension and a label
/// set. Terms are kept in the cell order (see [`crate::morse`]), so the last
/// term is the greatest cell.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Chain {
    terms: BTreeMap<Symbol, Coeff>,
}

impl Chain {
    pub fn new() -> Self {
        Chain { terms: BTreeMap::new() }
    }

    pub fn from_symbol(s: Symbol) -> Self {
        let mut c = Chain::new();
        c.add_term(s, 1);
        c
    }

    /// Collects terms, checking that they share a dimension and a label set.
    pub fn from_terms(terms: impl IntoIterator<Item = (Symbol, Coeff)>) -> Result<Self> {
        let mut c = Chain::new();
        let mut shape: Option<(usize, Vec<Label>)> = None;
        for (s, k) in terms {
            match &shape {
                None => shape = Some((s.dimension(), s.label_set())),
                Some((dim, labels)) => {
                    if s.dimension() != *dim {
                        return Err(Error::DimensionMismatch { expected: *dim, found: s.dimension() });
                    }
                    if s.label_set() != *labels {
                        return Err(Error::LabelSetMismatch);
                    }
                }
            }
            c.add_term(s, k);
        }
        Ok(c)
    }

    /// Adds `k * s`. Zero coefficients are dropped.
    ///
    /// Panics if the coefficient overflows `i64`.
    pub fn add_term(&mut self, s: Symbol, k: Coeff) {
        if k == 0 {
            return;
        }
        debug_assert!(self.terms.keys().next().is_none_or(|t| t.dimension() == s.dimension()));
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(k);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().checked_add(k).expect("chain coefficient overflow");
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, other: &Chain, k: Coeff) {
        if k == 0 {
            return;
        }
        for (s, &c) in &other.terms {
            self.add_term(s.clone(), c.checked_mul(k).expect("chain coefficient overflow"));
        }
    }

    pub fn scaled(&self, k: Coeff) -> Chain {
        let mut out = Chain::new();
        out.add_scaled(self, k);
        out
    }

    pub fn coeff(&self, s: &Symbol) -> Coeff {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Symbol, Coeff)> + ExactSizeIterator {
        self.terms.iter().map(|(s, &k)| (s, k))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The greatest cell with its coefficient.
    pub fn max_term(&self) -> Option<(&Symbol, Coeff)> {
        self.terms.last_key_value().map(|(s, &k)| (s, k))
    }

    pub fn dimension(&self) -> Option<usize> {
        self.terms.keys().next().map(Symbol::dimension)
    }

    pub fn label_set(&self) -> Option<Vec<Label>> {
        self.terms.keys().next().map(Symbol::label_set)
    }

    pub fn boundary(&self) -> Chain {
        let mut out = Chain::new();
        for (s, &k) in &self.terms {
            for (f, sign) in s.faces() {
                out.add_term(f, sign * k);
            }
        }
        out
    }

    pub fn relabel(&self, phi: impl Fn(Label) -> Option<Label>) -> Result<Chain> {
        let mut out = Chain::new();
        for (s, &k) in &self.terms {
            out.add_term(s.relabel(&phi)?, k);
        }
        Ok(out)
    }

    /// Bilinear concatenation product `self | other`.
    pub fn concat(&self, other: &Chain) -> Result<Chain> {
        let mut out = Chain::new();
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                out.add_term(a.concat(b)?, x.checked_mul(y).expect("chain coefficient overflow"));
            }
        }
        Ok(out)
    }

    /// The signed projection of `cell(n, w)` onto `desc(n, w)`.
    pub fn desc_project(&self) -> Chain {
        let mut out = Chain::new();
        for (s, &k) in &self.terms {
            let (d, sign) = s.sorted_descending();
            out.add_term(d, sign * k);
        }
        out
    }

    /// True when every term is a cell of `spec`.
    pub fn supported_in(&self, spec: &ComplexSpec) -> bool {
        self.terms.keys().all(|s| s.is_level(spec.n) && spec.admits(s))
    }

    pub fn to_file(&self, n: usize) -> ChainFile {
        ChainFile {
            n,
            dimension: self.dimension().unwrap_or(0),
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(s, &coeff)| ChainTerm { symbol: s.to_string(), coeff })
                .collect(),
        }
    }
}

impl FromIterator<(Symbol, Coeff)> for Chain {
    fn from_iter<T: IntoIterator<Item = (Symbol, Coeff)>>(iter: T) -> Self {
        let mut c = Chain::new();
        for (s, k) in iter {
            c.add_term(s, k);
        }
        c
    }
}

impl fmt::Display for Chain {
    /// Greatest cell first, e.g. `1|3 2 - 2 1|3 + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, &k)) in self.terms.iter().rev().enumerate() {
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
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    pub symbol: String,
    pub coeff: Coeff,
}

/// On-disk chain document: level and dimension header plus a term list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub n: usize,
    pub dimension: usize,
    pub terms: Vec<ChainTerm>,
}

impl ChainFile {
    /// Parses every term at level `n` and checks the declared dimension.
    pub fn to_chain(&self) -> Result<Chain> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let s = Symbol::parse_level(&t.symbol, self.n)?;
            if s.dimension() != self.dimension {
                return Err(Error::DimensionMismatch { expected: self.dimension, found: s.dimension() });
            }
            terms.push((s, t.coeff));
        }
        Chain::from_terms(terms)
    }
}
