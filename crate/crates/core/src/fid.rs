//! FI_d morphisms and their action on homology.
//!
//! A morphism `[n] -> [m]` is an injection `phi` with a coloring of
//! `[m] \ phi([n])` by `0..d`. It factors uniquely as a permutation after a
//! sequence of single insertions, and acts on a homology class through that
//! factorization: an insertion of color `k` puts a new top label right after
//! the `k`-th barrier of each basis cell, and a permutation relabels the
//! basis cycles and reduces the result back to coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{factorize_shape, reduce_to_basis, z_cycle_shape, BasisCoordinates};
use crate::complex::SparseIntMatrix;
use crate::error::{Error, Result};
use crate::morse::{check_supported, critical_cells, critical_shape};
use crate::perm::Permutation;
use crate::snf::smith_normal_form;
use crate::symbols::{Chain, Coeff, ComplexSpec, Label, Symbol, Variant, MAX_LABEL};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FidMorphism {
    n: usize,
    m: usize,
    /// `phi[i - 1]` is the image of `i`.
    phi: Vec<Label>,
    /// Color of every label of `[m]` outside the image.
    colors: BTreeMap<Label, usize>,
    d: usize,
}

impl FidMorphism {
    pub fn new(n: usize, m: usize, phi: Vec<Label>, colors: BTreeMap<Label, usize>, d: usize) -> Result<Self> {
        let bad = |s: String| Err(Error::InvalidMorphism(s));
        if d == 0 {
            return bad("d must be at least 1".into());
        }
        if m > MAX_LABEL {
            return Err(Error::LevelTooLarge(m));
        }
        if n > m {
            return bad(format!("source {n} exceeds target {m}"));
        }
        if phi.len() != n {
            return bad(format!("phi has {} values for a source of size {n}", phi.len()));
        }
        let mut hit = vec![false; m + 1];
        for &x in &phi {
            if x == 0 || x as usize > m {
                return Err(Error::LabelOutOfRange { label: x as u32, n: m });
            }
            if std::mem::replace(&mut hit[x as usize], true) {
                return Err(Error::NotInjective(x));
            }
        }
        for (&x, &k) in &colors {
            if x == 0 || x as usize > m || hit[x as usize] {
                return bad(format!("color given for {x}, which is not in the complement of the image"));
            }
            if k >= d {
                return Err(Error::ColorOutOfRange { k, d });
            }
        }
        if let Some(x) = (1..=m).find(|&x| !hit[x] && !colors.contains_key(&(x as Label))) {
            return bad(format!("no color for {x}"));
        }
        Ok(FidMorphism { n, m, phi, colors, d })
    }

    pub fn identity(n: usize, d: usize) -> Result<Self> {
        Self::new(n, n, (1..=n).map(|i| i as Label).collect(), BTreeMap::new(), d)
    }

    /// The inclusion `[n] -> [n+1]` with the new label colored `k`.
    pub fn insertion(n: usize, k: usize, d: usize) -> Result<Self> {
        let colors = BTreeMap::from([((n + 1) as Label, k)]);
        Self::new(n, n + 1, (1..=n).map(|i| i as Label).collect(), colors, d)
    }

    pub fn from_permutation(sigma: &Permutation, d: usize) -> Result<Self> {
        Self::new(sigma.len(), sigma.len(), sigma.images().to_vec(), BTreeMap::new(), d)
    }

    /// Uniformly random morphism `[n] -> [m]`.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, d: usize, rng: &mut R) -> Result<Self> {
        let p = Permutation::random(m, rng);
        let phi = p.images()[..n].to_vec();
        let colors = p.images()[n..].iter().map(|&x| (x, rng.random_range(0..d))).collect();
        Self::new(n, m, phi, colors, d)
    }

    pub fn source(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phi(&self) -> &[Label] {
        &self.phi
    }

    pub fn colors(&self) -> &BTreeMap<Label, usize> {
        &self.colors
    }

    /// `second o self`: first `self`, then `second`.
    pub fn then(&self, second: &FidMorphism) -> Result<FidMorphism> {
        compose(second, self)
    }

    /// Canonical factorization as a permutation after insertions.
    pub fn decompose(&self) -> Decomposition {
        let mut images = self.phi.clone();
        let complement: Vec<Label> = (1..=self.m as Label).filter(|x| !self.phi.contains(x)).collect();
        images.extend(&complement);
        let colors = complement.iter().map(|x| self.colors[x]).collect();
        Decomposition {
            sigma: Permutation::from_images(images).expect("phi plus its complement is a permutation"),
            colors,
        }
    }
}

/// `second o first`. A label outside the image of the composite keeps the
/// color it has under `second` if it is outside `second`'s image, and
/// otherwise inherits the color of its preimage under `first`.
pub fn compose(second: &FidMorphism, first: &FidMorphism) -> Result<FidMorphism> {
    if first.m != second.n {
        return Err(Error::LevelMismatch { expected: second.n, found: first.m });
    }
    if first.d != second.d {
        return Err(Error::InvalidMorphism(format!("d mismatch: {} vs {}", first.d, second.d)));
    }
    let phi: Vec<Label> = first.phi.iter().map(|&x| second.phi[x as usize - 1]).collect();
    let mut colors = second.colors.clone();
    for (&x, &k) in &first.colors {
        colors.insert(second.phi[x as usize - 1], k);
    }
    FidMorphism::new(first.n, second.m, phi, colors, first.d)
}

impl fmt::Display for FidMorphism {
    /// `n=3;m=5;phi=4,1,5;colors=2:2,3:1;d=3`, colors keyed by the uncovered label.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi: Vec<String> = self.phi.iter().map(|x| x.to_string()).collect();
        let colors: Vec<String> = self.colors.iter().map(|(x, k)| format!("{x}:{k}")).collect();
        write!(f, "n={};m={};phi={};colors={};d={}", self.n, self.m, phi.join(","), colors.join(","), self.d)
    }
}

impl FromStr for FidMorphism {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |d: String| Error::Parse { what: "morphism", detail: d };
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| err(format!("expected key=value, got {part:?}")))?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return Err(err(format!("repeated field {k:?}")));
            }
        }
        let num = |k: &str| -> Result<usize> {
            fields.get(k).ok_or_else(|| err(format!("missing {k}")))?.parse().map_err(|_| err(format!("bad {k}")))
        };
        let (n, m, d) = (num("n")?, num("m")?, num("d")?);
        let list = |k: &str| fields.get(k).copied().unwrap_or("").split(',').map(str::trim).filter(|t| !t.is_empty());
        let phi = list("phi")
            .map(|t| t.parse::<Label>().map_err(|_| err(format!("bad phi value {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut colors = BTreeMap::new();
        for t in list("colors") {
            let (x, k) = t.split_once(':').ok_or_else(|| err(format!("bad color {t:?}")))?;
            let x: Label = x.trim().parse().map_err(|_| err(format!("bad color label {x:?}")))?;
            let k: usize = k.trim().parse().map_err(|_| err(format!("bad color value {k:?}")))?;
            colors.insert(x, k);
        }
        // Colors may also be keyed by position n+1..=m of the canonical
        // permutation; position n+i stands for the i-th uncovered label.
        let complement: Vec<Label> = (1..=m.min(MAX_LABEL) as Label).filter(|x| !phi.contains(x)).collect();
        let positional: Vec<Label> = (n + 1..=m.min(MAX_LABEL)).map(|x| x as Label).collect();
        if !colors.keys().copied().eq(complement.iter().copied()) && colors.keys().copied().eq(positional) {
            colors = colors.into_values().zip(&complement).map(|(k, &x)| (x, k)).collect();
        }
        FidMorphism::new(n, m, phi, colors, d)
    }
}

/// A morphism written as `sigma o i_{c_r} o ... o i_{c_1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Agrees with `phi` on `[n]` and is increasing on `n+1..=m`.
    pub sigma: Permutation,
    /// `c_1, ..., c_{m-n}`: `c_1` is applied first.
    pub colors: Vec<usize>,
}

impl Decomposition {
    pub fn recompose(&self, n: usize, d: usize) -> Result<FidMorphism> {
        let mut acc = FidMorphism::identity(n, d)?;
        for (i, &k) in self.colors.iter().enumerate() {
            acc = compose(&FidMorphism::insertion(n + i, k, d)?, &acc)?;
        }
        compose(&FidMorphism::from_permutation(&self.sigma, d)?, &acc)
    }
}

/// Number of colors for the FI_d structure on `H_dim`: one more than the
/// number of barriers of a basis cell.
pub fn color_count(spec: &ComplexSpec, dim: usize) -> Result<usize> {
    check_supported(spec)?;
    Ok(match spec.variant {
        Variant::Full => dim + 1,
        Variant::Desc => dim / (spec.w - 1) + 1,
    })
}

/// A homology class in basis coordinates, with its color count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyClass {
    pub coords: BasisCoordinates,
    pub d: usize,
}

impl HomologyClass {
    pub fn new(coords: BasisCoordinates) -> Result<Self> {
        let d = color_count(&coords.spec, coords.dim)?;
        Ok(HomologyClass { coords, d })
    }

    /// Class of the basis cycle `z(e)`.
    pub fn basis(spec: &ComplexSpec, e: Symbol) -> Result<Self> {
        crate::basis::factorize(&e, spec)?;
        Self::new(BasisCoordinates::unit(*spec, e))
    }

    /// Class of an arbitrary cycle.
    pub fn of_cycle(c: &Chain, spec: &ComplexSpec) -> Result<Self> {
        let mut coords = reduce_to_basis(c, spec)?;
        if let Some(d) = c.dimension() {
            coords.dim = d;
        }
        Self::new(coords)
    }

    pub fn level(&self) -> usize {
        self.coords.spec.n
    }

    pub fn spec(&self) -> &ComplexSpec {
        &self.coords.spec
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coords)
    }
}

/// `[sigma]` applied to a class: relabel the basis cycles (sorting blocks
/// with sign in the descending variant) and reduce.
pub fn act_perm(h: &HomologyClass, sigma: &Permutation) -> Result<HomologyClass> {
    let spec = *h.spec();
    if sigma.len() != spec.n {
        return Err(Error::LevelMismatch { expected: spec.n, found: sigma.len() });
    }
    if sigma.is_identity() {
        return Ok(h.clone());
    }
    let mut image = Chain::new();
    for (e, &a) in &h.coords.coords {
        let moved = z_cycle_shape(e, &spec).relabel(|x| Some(sigma.apply(x)))?;
        let moved = match spec.variant {
            Variant::Full => moved,
            Variant::Desc => moved.desc_project(),
        };
        image.add_scaled(&moved, a);
    }
    let mut coords = reduce_to_basis(&image, &spec)?;
    coords.dim = h.coords.dim;
    Ok(HomologyClass { coords, d: h.d })
}

/// `i_k(e)`: the singleton `n + 1` inserted right after the `k`-th barrier
/// of the critical cell `e` (at the front for `k = 0`).
pub fn insert_after_barrier(e: &Symbol, spec: &ComplexSpec, k: usize) -> Result<Symbol> {
    let fac = factorize_shape(e, spec);
    let at = fac.insertion_block(k).ok_or(Error::ColorOutOfRange { k, d: fac.barriers() + 1 })?;
    let new = (spec.n + 1) as Label;
    let mut blocks = e.block_vec();
    blocks.insert(at, vec![new]);
    Symbol::from_blocks(blocks)
}

/// `[i_k]` applied to a class.
pub fn act_insert(h: &HomologyClass, k: usize) -> Result<HomologyClass> {
    if k >= h.d {
        return Err(Error::ColorOutOfRange { k, d: h.d });
    }
    let spec = *h.spec();
    let up = spec.at_level(spec.n + 1)?;
    let mut coords = BasisCoordinates::zero(up, h.coords.dim);
    for (e, &a) in &h.coords.coords {
        let e2 = insert_after_barrier(e, &spec, k)?;
        if !critical_shape(&e2, &up) {
            return Err(Error::NotCritical(e2.to_string()));
        }
        coords.add(e2, a);
    }
    Ok(HomologyClass { coords, d: h.d })
}

/// Action of a general morphism through its canonical factorization.
pub fn act(h: &HomologyClass, m: &FidMorphism) -> Result<HomologyClass> {
    if m.source() != h.level() {
        return Err(Error::LevelMismatch { expected: h.level(), found: m.source() });
    }
    if m.d() != h.d {
        return Err(Error::InvalidMorphism(format!("morphism has d = {}, class needs d = {}", m.d(), h.d)));
    }
    let dec = m.decompose();
    let mut cur = h.clone();
    for &k in &dec.colors {
        cur = act_insert(&cur, k)?;
    }
    act_perm(&cur, &dec.sigma)
}

/// Unit classes of all basis cycles of `H_dim(spec)`.
pub fn basis_classes(spec: &ComplexSpec, dim: usize) -> Result<Vec<HomologyClass>> {
    critical_cells(spec, dim)?
        .into_iter()
        .map(|e| HomologyClass::new(BasisCoordinates::unit(*spec, e)))
        .collect()
}

/// Outcome of a verification sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub property: String,
    pub spec: String,
    pub dim: usize,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    fn new(property: &str, spec: &ComplexSpec, dim: usize) -> Self {
        SweepReport { property: property.into(), spec: spec.to_string(), dim, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    fn absorb(&mut self, results: Vec<Result<Option<String>>>) {
        for r in results {
            self.checked += 1;
            match r {
                Ok(None) => {}
                Ok(Some(msg)) => self.failures.push(msg),
                Err(e) => self.failures.push(format!("error: {e}")),
            }
        }
    }
}

/// `[i_k] o [sigma] = [sigma~] o [i_k]` for every basis class, every
/// `sigma` in `S_n` and every color `k`, where `sigma~` fixes `n + 1`.
pub fn check_commute(spec: &ComplexSpec, dim: usize) -> Result<SweepReport> {
    let classes = basis_classes(spec, dim)?;
    let d = color_count(spec, dim)?;
    let perms = Permutation::all(spec.n);
    let jobs: Vec<(&HomologyClass, &Permutation, usize)> =
        classes.iter().flat_map(|h| perms.iter().flat_map(move |s| (0..d).map(move |k| (h, s, k)))).collect();
    let results = jobs
        .par_iter()
        .map(|&(h, sigma, k)| {
            let lhs = act_insert(&act_perm(h, sigma)?, k)?;
            let rhs = act_perm(&act_insert(h, k)?, &sigma.extend(spec.n + 1))?;
            Ok((lhs != rhs).then(|| format!("{h}, sigma={sigma}, k={k}: {lhs} vs {rhs}")))
        })
        .collect();
    let mut report = SweepReport::new("commute", spec, dim);
    report.absorb(results);
    Ok(report)
}

/// `[(n+1 n+2)] o [i_k] o [i_l] = [i_l] o [i_k]` for every basis class and
/// every pair of colors.
pub fn check_unordered(spec: &ComplexSpec, dim: usize) -> Result<SweepReport> {
    let classes = basis_classes(spec, dim)?;
    let d = color_count(spec, dim)?;
    let swap = Permutation::transposition(spec.n + 2, (spec.n + 1) as Label, (spec.n + 2) as Label)?;
    let jobs: Vec<(&HomologyClass, usize, usize)> =
        classes.iter().flat_map(|h| (0..d).flat_map(move |k| (0..d).map(move |l| (h, k, l)))).collect();
    let results = jobs
        .par_iter()
        .map(|&(h, k, l)| {
            let lhs = act_perm(&act_insert(&act_insert(h, l)?, k)?, &swap)?;
            let rhs = act_insert(&act_insert(h, k)?, l)?;
            Ok((lhs != rhs).then(|| format!("{h}, k={k}, l={l}: {lhs} vs {rhs}")))
        })
        .collect();
    let mut report = SweepReport::new("unordered", spec, dim);
    report.absorb(results);
    Ok(report)
}

/// A random integer combination of basis classes (coefficients in `-2..=2`).
fn random_class(spec: &ComplexSpec, dim: usize, basis: &[Symbol], rng: &mut StdRng) -> Result<HomologyClass> {
    let mut coords = BasisCoordinates::zero(*spec, dim);
    for e in basis {
        coords.add(e.clone(), rng.random_range(-2..=2));
    }
    if coords.is_zero() {
        if let Some(e) = basis.first() {
            coords.add(e.clone(), 1);
        }
    }
    HomologyClass::new(coords)
}

/// `act(h, m2 o m1) = act(act(h, m1), m2)` on `samples` random composable
/// pairs, each raising the level by 0 to `max_step` labels.
pub fn check_functor(spec: &ComplexSpec, dim: usize, samples: usize, max_step: usize, seed: u64) -> Result<SweepReport> {
    let d = color_count(spec, dim)?;
    let basis = critical_cells(spec, dim)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(samples);
    for _ in 0..samples {
        let h = random_class(spec, dim, &basis, &mut rng)?;
        let a = rng.random_range(0..=max_step);
        let b = rng.random_range(0..=max_step);
        let m1 = FidMorphism::random(spec.n, spec.n + a, d, &mut rng)?;
        let m2 = FidMorphism::random(spec.n + a, spec.n + a + b, d, &mut rng)?;
        cases.push((h, m1, m2));
    }
    let results = cases
        .par_iter()
        .map(|(h, m1, m2)| {
            let lhs = act(h, &compose(m2, m1)?)?;
            let rhs = act(&act(h, m1)?, m2)?;
            Ok((lhs != rhs).then(|| format!("{h}, m1={m1}, m2={m2}: {lhs} vs {rhs}")))
        })
        .collect();
    let mut report = SweepReport::new("functor", spec, dim);
    report.absorb(results);
    Ok(report)
}

/// Every morphism `[n] -> [m]` with `d` colors.
pub fn all_morphisms(n: usize, m: usize, d: usize) -> Result<Vec<FidMorphism>> {
    let mut out = Vec::new();
    let extra = m - n;
    for p in Permutation::all(m) {
        // one representative per injection: the complement must be increasing
        let rest = &p.images()[n..];
        if rest.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let total = d.pow(extra as u32);
        for code in 0..total {
            let mut c = code;
            let mut colors = BTreeMap::new();
            for &x in rest {
                colors.insert(x, c % d);
                c /= d;
            }
            out.push(FidMorphism::new(n, m, p.images()[..n].to_vec(), colors, d)?);
        }
    }
    Ok(out)
}

/// Span check at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationLevel {
    pub level: usize,
    pub basis: usize,
    pub images: usize,
    pub rank: usize,
    pub unit_divisors: bool,
}

impl GenerationLevel {
    pub fn spans(&self) -> bool {
        self.rank == self.basis && self.unit_divisors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub spec: String,
    pub dim: usize,
    pub generator_levels: Vec<usize>,
    pub levels: Vec<GenerationLevel>,
}

impl GenerationReport {
    pub fn passed(&self) -> bool {
        !self.levels.is_empty() && self.levels.iter().all(GenerationLevel::spans)
    }
}

/// Levels holding the candidate generators of `H_dim`: every level up to
/// `3 dim` for width 2, and the single level `b (w + 1)` for the descending
/// variant, where `b = dim / (w - 1)`.
pub fn generator_levels(variant: Variant, w: usize, dim: usize) -> Vec<usize> {
    match variant {
        Variant::Full => (1..=3 * dim.max(1)).collect(),
        Variant::Desc => vec![(dim / (w - 1)).max(1) * (w + 1)],
    }
}

/// Checks that the images of the generators under all morphisms into each
/// level in `levels` span the integral lattice of `H_dim` at that level.
pub fn check_generation(variant: Variant, w: usize, dim: usize, levels: &[usize]) -> Result<GenerationReport> {
    let gen_levels = generator_levels(variant, w, dim);
    let probe = ComplexSpec::new(levels.iter().copied().max().unwrap_or(1), w, variant)?;
    check_supported(&probe)?;
    let mut generators = Vec::new();
    for &g in &gen_levels {
        if g <= dim {
            continue;
        }
        let spec = ComplexSpec::new(g, w, variant)?;
        generators.extend(basis_classes(&spec, dim)?);
    }
    let mut out = Vec::new();
    for &level in levels {
        let spec = ComplexSpec::new(level, w, variant)?;
        let basis = critical_cells(&spec, dim)?;
        let d = color_count(&spec, dim)?;
        let mut jobs = Vec::new();
        for g in &generators {
            if g.level() <= level {
                for m in all_morphisms(g.level(), level, d)? {
                    jobs.push((g, m));
                }
            }
        }
        let images: Vec<HomologyClass> = jobs.par_iter().map(|(g, m)| act(g, m)).collect::<Result<_>>()?;
        let row: BTreeMap<&Symbol, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut entries = Vec::new();
        for (c, img) in images.iter().enumerate() {
            for (e, &v) in &img.coords.coords {
                entries.push((row[e], c, v));
            }
        }
        let mat = SparseIntMatrix { rows: basis.len(), cols: images.len(), entries };
        let divisors = smith_normal_form(&mat);
        out.push(GenerationLevel {
            level,
            basis: basis.len(),
            images: images.len(),
            rank: divisors.len(),
            unit_divisors: divisors.iter().all(|x| x == &num_bigint::BigInt::from(1)),
        });
    }
    Ok(GenerationReport { spec: format!("{variant}(n, {w})"), dim, generator_levels: gen_levels, levels: out })
}

/// Barrier count is preserved by permutations: every basis cell in the
/// support of `sigma . z(e)` has as many barriers as `e`.
pub fn check_barrier_preservation(spec: &ComplexSpec, dim: usize) -> Result<SweepReport> {
    let classes = basis_classes(spec, dim)?;
    let perms = Permutation::all(spec.n);
    let jobs: Vec<(&HomologyClass, &Permutation)> =
        classes.iter().flat_map(|h| perms.iter().map(move |s| (h, s))).collect();
    let results = jobs
        .par_iter()
        .map(|&(h, sigma)| {
            let e = h.coords.coords.keys().next().expect("unit class");
            let b = factorize_shape(e, spec).barriers();
            let img = act_perm(h, sigma)?;
            let bad: Vec<String> = img
                .coords
                .coords
                .keys()
                .filter(|f| factorize_shape(f, spec).barriers() != b)
                .map(Symbol::to_string)
                .collect();
            Ok((!bad.is_empty()).then(|| format!("{e} under {sigma}: {}", bad.join(", "))))
        })
        .collect();
    let mut report = SweepReport::new("barrier-count", spec, dim);
    report.absorb(results);
    Ok(report)
}

/// A barrier-free basis cycle commutes with a fresh singleton: for every
/// label `i` of `[n+1]`, `z(e)|i` and `i|z(e)` are homologous, with `e` the
/// barrier-free critical cell on the remaining labels.
pub fn check_singleton_slide(spec: &ComplexSpec) -> Result<SweepReport> {
    check_supported(spec)?;
    let up = spec.at_level(spec.n + 1)?;
    let mut report = SweepReport::new("singleton-slide", &up, 0);
    let mut results = Vec::new();
    for i in 1..=up.n as Label {
        let rest: Vec<Label> = (1..=up.n as Label).rev().filter(|&x| x != i).collect();
        let e = Symbol::from_blocks(rest.iter().map(|&x| [x]))?;
        let z = Chain::from_symbol(e.clone());
        let single = Chain::from_symbol(Symbol::block(&[i])?);
        let after = z.concat(&single)?;
        let before = single.concat(&z)?;
        results.push(
            crate::basis::homologous(&after, &before, &up)
                .map(|same| (!same).then(|| format!("z({e})|{i} vs {i}|z({e})"))),
        );
    }
    report.absorb(results);
    Ok(report)
}

/// Shifts every label of `e` up by `by`.
fn shift(e: &Symbol, by: usize) -> Result<Symbol> {
    e.relabel(|x| Label::try_from(x as usize + by).ok())
}

/// A critical cell ending in a barrier followed by any critical cell on
/// higher labels is critical. Checked for all splits `n = n1 + n2`.
pub fn check_barrier_concatenation(spec: &ComplexSpec) -> Result<SweepReport> {
    check_supported(spec)?;
    let mut report = SweepReport::new("barrier-concatenation", spec, 0);
    let mut results = Vec::new();
    for n1 in 1..spec.n {
        let left = spec.at_level(n1)?;
        let right = spec.at_level(spec.n - n1)?;
        let lefts: Vec<Symbol> = (0..=left.max_dimension())
            .map(|j| critical_cells(&left, j))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .filter(|e| factorize_shape(e, &left).factors.last().is_some_and(|f| f.is_barrier()))
            .collect();
        let rights: Vec<Symbol> = (0..=right.max_dimension())
            .map(|j| critical_cells(&right, j))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for e1 in &lefts {
            for e2 in &rights {
                let joined = e1.concat(&shift(e2, n1)?)?;
                results.push(Ok((!critical_shape(&joined, spec)).then(|| format!("{joined} is not critical"))));
            }
        }
    }
    report.absorb(results);
    Ok(report)
}

/// Insertions keep the dimension and barrier count and raise the level by one.
pub fn check_insertion_shape(spec: &ComplexSpec, dim: usize) -> Result<SweepReport> {
    let d = color_count(spec, dim)?;
    let up = spec.at_level(spec.n + 1)?;
    let mut results = Vec::new();
    for e in critical_cells(spec, dim)? {
        let b = factorize_shape(&e, spec).barriers();
        for k in 0..d {
            results.push(insert_after_barrier(&e, spec, k).map(|e2| {
                let ok = e2.dimension() == dim
                    && e2.is_level(spec.n + 1)
                    && critical_shape(&e2, &up)
                    && factorize_shape(&e2, &up).barriers() == b;
                (!ok).then(|| format!("i_{k}({e}) = {e2}"))
            }));
        }
    }
    let mut report = SweepReport::new("insertion-shape", spec, dim);
    report.absorb(results);
    Ok(report)
}

/// Coordinates of a class as `(critical cell, coefficient)` pairs, greatest first.
pub fn class_terms(h: &HomologyClass) -> Vec<(String, Coeff)> {
    h.coords.coords.iter().rev().map(|(e, &k)| (e.to_string(), k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    #[test]
    fn composition_example() {
        let first = FidMorphism::new(3, 4, vec![3, 2, 4], BTreeMap::from([(1, 2)]), 3).unwrap();
        let second = FidMorphism::new(4, 5, vec![2, 1, 4, 5], BTreeMap::from([(3, 1)]), 3).unwrap();
        let c = compose(&second, &first).unwrap();
        assert_eq!(c.phi(), &[4, 1, 5]);
        assert_eq!(c.colors(), &BTreeMap::from([(2, 2), (3, 1)]));
        assert_eq!(c.to_string(), "n=3;m=5;phi=4,1,5;colors=2:2,3:1;d=3");
        assert_eq!(c.to_string().parse::<FidMorphism>().unwrap(), c);
        let id = FidMorphism::identity(5, 3).unwrap();
        assert_eq!(compose(&id, &c).unwrap(), c);
    }

    #[test]
    fn decomposition_example() {
        let m: FidMorphism = "n=3;m=5;phi=4,1,5;colors=2:2,3:1;d=3".parse().unwrap();
        assert_eq!("n=3;m=5;phi=4,1,5;colors=4:2,5:1;d=3".parse::<FidMorphism>().unwrap(), m);
        let dec = m.decompose();
        assert_eq!(dec.sigma.to_string(), "(1 4 2)(3 5)");
        assert_eq!(dec.colors, vec![2, 1]);
        assert_eq!(dec.recompose(3, 3).unwrap(), m);
        let id = FidMorphism::identity(4, 2).unwrap().decompose();
        assert!(id.sigma.is_identity() && id.colors.is_empty());
    }

    #[test]
    fn morphism_validation() {
        assert!("n=2;m=3;phi=1,1;colors=3:0;d=2".parse::<FidMorphism>().is_err());
        assert!("n=2;m=3;phi=1,2;colors=;d=2".parse::<FidMorphism>().is_err());
        assert!(matches!(
            "n=2;m=3;phi=1,2;colors=3:2;d=2".parse::<FidMorphism>(),
            Err(Error::ColorOutOfRange { k: 2, d: 2 })
        ));
    }

    #[test]
    fn high_insertions() {
        let spec = ComplexSpec::full(5, 2).unwrap();
        let e = sym("2|5 3|1 4");
        let got: Vec<String> = (0..3).map(|k| insert_after_barrier(&e, &spec, k).unwrap().to_string()).collect();
        assert_eq!(got, vec!["6|2|5 3|1 4", "2|5 3|6|1 4", "2|5 3|1 4|6"]);
        let h = HomologyClass::basis(&spec, e).unwrap();
        assert_eq!(h.d, 3);
        assert!(matches!(act_insert(&h, 3), Err(Error::ColorOutOfRange { .. })));

        let one = ComplexSpec::full(1, 2).unwrap();
        let h = HomologyClass::basis(&one, sym("1")).unwrap();
        assert_eq!(class_terms(&act_insert(&h, 0).unwrap()), vec![("2|1".to_string(), 1)]);
    }

    #[test]
    fn transposition_action() {
        let spec = ComplexSpec::full(3, 2).unwrap();
        let h = HomologyClass::basis(&spec, sym("1|3 2")).unwrap();
        let r = act_perm(&h, &Permutation::transposition(3, 2, 3).unwrap()).unwrap();
        let mut terms = class_terms(&r);
        terms.sort();
        assert_eq!(terms, vec![("1|2 3".to_string(), 1), ("1|3 2".to_string(), -1), ("2 3|1".to_string(), -1)]);
        assert_eq!(act_perm(&h, &Permutation::identity(3)).unwrap(), h);
        let vertex = HomologyClass::basis(&spec, sym("3|2|1")).unwrap();
        for s in Permutation::all(3) {
            assert_eq!(act_perm(&vertex, &s).unwrap(), vertex);
        }
    }

    #[test]
    fn sweeps_small() {
        let spec = ComplexSpec::full(3, 2).unwrap();
        assert!(check_commute(&spec, 1).unwrap().passed());
        assert!(check_unordered(&spec, 1).unwrap().passed());
        assert!(check_functor(&spec, 1, 10, 2, 7).unwrap().passed());
        let desc = ComplexSpec::desc(3, 2).unwrap();
        assert!(check_commute(&desc, 1).unwrap().passed());
    }

    #[test]
    fn generation_small() {
        let r = check_generation(Variant::Full, 2, 1, &[3, 4]).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
