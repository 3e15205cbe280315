//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and
//! exits nonzero when the outcome differs from the expected one.
//!
//! Criterion 2 is expected to fail on exactly one printed key value, which
//! contradicts the key definition (see the decisions ledger). Every other
//! criterion must pass.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::Instant;

use diskstrip::basis::{reduce_to_basis, z_cycle, BasisCoordinates};
use diskstrip::complex::{enumerate_cells, SparseIntMatrix};
use diskstrip::fid::{self, compose, FidMorphism, SweepReport};
use diskstrip::homology::{homology, verify_morse_counts};
use diskstrip::morse::{critical_cells, key, match_state, GradientField, MatchState};
use diskstrip::snf::smith_normal_form;
use diskstrip::{Chain, ComplexSpec, Label, Symbol, Variant};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(what.into());
        }
    }
}

fn sym(s: &str) -> Symbol {
    s.parse().unwrap()
}

fn chain(terms: &[(&str, i64)]) -> Chain {
    terms.iter().map(|&(s, k)| (sym(s), k)).collect()
}

fn blocks(s: &Symbol) -> Vec<Vec<Label>> {
    s.block_vec()
}

// ---------------------------------------------------------------- oracles

/// Key straight from the definition: per block, 0 for a follower (previous
/// block a singleton below every label) else n+1 minus the first label, then
/// the block size.
fn oracle_key(s: &Symbol, n: usize) -> Vec<usize> {
    let bs = blocks(s);
    let mut out = Vec::new();
    for (i, b) in bs.iter().enumerate() {
        let follower = i > 0 && bs[i - 1].len() == 1 && b.iter().all(|&x| x > bs[i - 1][0]);
        out.push(if follower { 0 } else { n + 1 - b[0] as usize });
        out.push(b.len());
    }
    out
}

fn format_key(k: &[usize]) -> String {
    let parts: Vec<String> = k.chunks(2).map(|p| format!("{},{}", p[0], p[1])).collect();
    format!("({})", parts.join("; "))
}

/// Lexicographic comparison of zero-padded keys.
fn key_less(a: &[usize], b: &[usize]) -> bool {
    let len = a.len().max(b.len());
    let pad = |k: &[usize]| {
        let mut v = k.to_vec();
        v.resize(len, 0);
        v
    };
    pad(a) < pad(b)
}

/// Whether the V-walk digraph of the matching has a cycle (Kahn's algorithm).
fn has_closed_walk(spec: &ComplexSpec) -> bool {
    let cells = enumerate_cells(spec, None);
    let up: HashMap<Symbol, Symbol> = cells
        .iter()
        .filter_map(|s| match match_state(s, spec) {
            MatchState::PairedUp(g) => Some((s.clone(), g)),
            _ => None,
        })
        .collect();
    let ids: HashMap<&Symbol, usize> = up.keys().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    let mut indeg = vec![0usize; ids.len()];
    for (f, g) in &up {
        for (face, _) in g.faces() {
            if &face != f {
                if let Some(&j) = ids.get(&face) {
                    out[ids[f]].push(j);
                    indeg[j] += 1;
                }
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..ids.len()).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop_front() {
        seen += 1;
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    seen != ids.len()
}

/// Rank over the rationals by fraction-free elimination.
fn rational_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            let (a, b) = (rows[rank][c], rows[r][c]);
            if b != 0 {
                for k in 0..cols {
                    rows[r][k] = rows[r][k] * a - rows[rank][k] * b;
                }
                let g = rows[r].iter().fold(0i128, |g, &x| gcd(g, x));
                if g > 1 {
                    rows[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Whether the row vectors span all of Z^cols: integer row echelon form by
/// extended-gcd row operations, then every pivot must be a unit.
fn spans_lattice(mut rows: Vec<Vec<i128>>, cols: usize) -> bool {
    let mut top = 0;
    for c in 0..cols {
        // fold every row's entry in column c into row `top`
        let Some(p) = (top..rows.len()).find(|&r| rows[r][c] != 0) else { return false };
        rows.swap(top, p);
        for r in top + 1..rows.len() {
            while rows[r][c] != 0 {
                let q = rows[top][c] / rows[r][c];
                for k in c..cols {
                    rows[top][k] -= q * rows[r][k];
                }
                rows.swap(top, r);
            }
        }
        if rows[top][c].abs() != 1 {
            return false;
        }
        top += 1;
    }
    true
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let golden = chain(&[("1|3 2", 1), ("3 1|2", 1), ("3|2 1", 1), ("3 2|1", -1), ("2|3 1", -1), ("2 1|3", -1)]);
    o.check(sym("3 2 1").boundary() == golden, "d(3 2 1) differs from the six-term chain");
    let mut checked = 0;
    for n in 1..=6 {
        let spec = ComplexSpec::full(n, n).unwrap();
        for s in enumerate_cells(&spec, None) {
            // face count: each block of size k splits in 2^k - 2 ways
            let expected: usize = blocks(&s).iter().map(|b| (1usize << b.len()) - 2).sum();
            o.check(s.faces().len() == expected, format!("face count of {s}"));
            o.check(s.boundary().boundary().is_empty(), format!("dd({s}) != 0"));
            checked += 1;
        }
    }
    // n! 2^(n-1) symbols at level n
    let expected: usize = (1..=6usize).map(|n| (1..=n).product::<usize>() << (n - 1)).sum();
    o.check(checked == expected, format!("enumerated {checked} cells, expected {expected}"));
    o.notes.push(format!("dd = 0 on {checked} cells of cell(n), n <= 6"));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let printed = [
        ("6|2|1 3|4|9 8|5|7", "(4,1; 8,1; 9,2; 6,1; 0,2; 5,1; 0,1)"),
        ("6|2|1 3|4|9 8|7|5", "(4,1; 8,1; 9,2; 6,1; 0,2; 3,1; 5,1)"),
        ("6|2|1 3|4|9|8|7 5", "(4,1; 8,1; 9,2; 6,1; 0,1; 2,1; 3,2)"),
        ("6|2|1 3|4|8|9|7 5", "(4,1; 8,1; 9,2; 6,1; 0,1; 1,1; 3,2)"),
        ("6|2|1|3|4|9 8|7 5", "(4,1; 8,1; 9,1; 0,1; 0,1; 0,2; 3,2)"),
        ("6|2|3|1|4|9 8|7 5", "(4,1; 8,1; 0,1; 9,1; 0,1; 0,2; 3,2)"),
        ("2 6|1 3|4|9 8|5|7", "(8,2; 9,2; 6,1; 0,2; 5,1; 0,1)"),
        ("6 2|1 3|4|9 8|5|7", "(4,2; 9,2; 6,1; 0,2; 5,1; 0,1)"),
        ("6|2|1 3|4|9 8|5 7", "(4,1; 8,1; 9,2; 6,1; 0,2; 5,2)"),
        ("6|2|1 3|4|9 8|7 5", "(4,1; 8,1; 9,2; 6,1; 0,2; 3,2)"),
    ];
    for (s, want) in printed {
        let got = key(&sym(s), 9).to_string();
        let oracle = format_key(&oracle_key(&sym(s), 9));
        o.check(got == oracle, format!("key({s}) = {got} disagrees with the definition {oracle}"));
        o.check(got == want, format!("key({s}) = {got}, printed {want}"));
    }
    let spec = ComplexSpec::full(9, 2).unwrap();
    let f = sym("6|2|1 3|4|9 8|5|7");
    let g = sym("6|2|1 3|4|9 8|7 5");
    // local check: f is the greatest face of g, g the least coface of f
    let greatest_face = g.faces().into_iter().map(|(s, _)| s).max().unwrap();
    let least_coface = f.cofaces(&spec).into_iter().min().unwrap();
    o.check(greatest_face == f, format!("greatest face of g is {greatest_face}"));
    o.check(least_coface == g, format!("least coface of f is {least_coface}"));
    o.check(match_state(&f, &spec) == MatchState::PairedUp(g.clone()), "f not matched up with g");
    o.check(match_state(&g, &spec) == MatchState::PairedDown(f), "g not matched down with f");
    o
}

fn criterion_3_specs() -> Vec<ComplexSpec> {
    let mut v: Vec<ComplexSpec> = (2..=6).map(|n| ComplexSpec::full(n, 2).unwrap()).collect();
    for w in 2..=4 {
        for n in 1..=7 {
            v.push(ComplexSpec::desc(n, w).unwrap());
        }
    }
    v
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    for spec in criterion_3_specs() {
        let r = verify_morse_counts(&spec);
        o.check(r.passed(), format!("{spec}: betti {:?} critical {:?} torsion-free {}", r.betti, r.critical, r.torsion_free));
        if spec.variant == Variant::Desc {
            for (j, &b) in r.betti.iter().enumerate() {
                o.check(j % (spec.w - 1) == 0 || b == 0, format!("{spec}: H_{j} = {b} nonzero"));
            }
        }
    }
    for (spec, want) in [
        (ComplexSpec::desc(3, 2).unwrap(), vec![1, 1]),
        (ComplexSpec::full(3, 2).unwrap(), vec![1, 7]),
        (ComplexSpec::full(2, 2).unwrap(), vec![1, 1]),
    ] {
        let got = homology(&spec, true).betti;
        o.check(got == want, format!("{spec}: betti {got:?}, expected {want:?}"));
    }
    // Euler characteristic of the 6-vertex, 12-edge complex cell(3, 2)
    let full3 = ComplexSpec::full(3, 2).unwrap();
    let (v, e) = (enumerate_cells(&full3, Some(0)).len() as i64, enumerate_cells(&full3, Some(1)).len() as i64);
    o.check((v, e) == (6, 12) && 1 - 7 == v - e, "cell(3, 2) Euler characteristic");
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let specs = (1..=5)
        .map(|n| ComplexSpec::full(n, 2).unwrap())
        .chain((1..=6).map(|n| ComplexSpec::desc(n, 3).unwrap()));
    for spec in specs {
        let walks = GradientField::compute(&spec).closed_walks();
        o.check(walks.is_empty(), format!("{spec}: {} closed walks", walks.len()));
        o.check(!has_closed_walk(&spec), format!("{spec}: cycle found by the topological-order oracle"));
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for spec in criterion_3_specs() {
        for dim in 0..=spec.max_dimension() {
            for e in critical_cells(&spec, dim).unwrap() {
                count += 1;
                let z = z_cycle(&e, &spec).unwrap();
                o.check(z.boundary().is_empty(), format!("{spec}: dz({e}) != 0"));
                o.check(z.coeff(&e).abs() == 1, format!("{spec}: coefficient of {e} in z({e}) is {}", z.coeff(&e)));
                let ke = oracle_key(&e, spec.n);
                for (f, _) in z.iter() {
                    o.check(!key_less(&ke, &oracle_key(f, spec.n)), format!("{spec}: {f} has a greater key than {e}"));
                    o.check(f <= &e, format!("{spec}: {f} above {e} in z({e})"));
                }
                let r = reduce_to_basis(&z, &spec);
                o.check(r.as_ref() == Ok(&BasisCoordinates::unit(spec, e.clone())), format!("{spec}: reduce(z({e})) = {r:?}"));
            }
        }
    }
    o.notes.push(format!("{count} basis cycles"));
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let spec = ComplexSpec::full(3, 2).unwrap();
    let z = z_cycle(&sym("1|3 2"), &spec).unwrap();
    let swapped = z.relabel(|x| Some([0, 1, 3, 2][x as usize])).unwrap();
    let got = reduce_to_basis(&swapped, &spec).unwrap().coords;
    let want: BTreeMap<Symbol, i64> = [("1|3 2", -1), ("1|2 3", 1), ("2 3|1", -1)].iter().map(|&(s, k)| (sym(s), k)).collect();
    o.check(got == want, format!("got {got:?}"));
    // the claimed combination really is homologous: the difference is a boundary
    let mut combo = Chain::new();
    for (e, k) in &want {
        combo.add_scaled(&z_cycle(e, &spec).unwrap(), *k);
    }
    combo.add_scaled(&swapped, -1);
    o.check(reduce_to_basis(&combo, &spec).unwrap().is_zero(), "difference not null-homologous");
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let spec = ComplexSpec::full(5, 2).unwrap();
    let pair = |a: Label, b: Label| chain(&[(&format!("{a} {b}"), 1), (&format!("{b} {a}"), 1)]);
    let one = Chain::from_symbol(sym("1"));
    let classes = [
        one.concat(&pair(2, 3)).unwrap().concat(&pair(4, 5)).unwrap(),
        one.concat(&pair(4, 5)).unwrap().concat(&pair(2, 3)).unwrap(),
        pair(4, 5).concat(&one).unwrap().concat(&pair(2, 3)).unwrap(),
    ];
    let basis = critical_cells(&spec, 2).unwrap();
    let rows: Vec<Vec<i128>> = classes
        .iter()
        .map(|c| {
            o.check(c.boundary().is_empty(), format!("{c} is not a cycle"));
            reduce_to_basis(c, &spec).unwrap().dense(&basis).into_iter().map(i128::from).collect()
        })
        .collect();
    let rank = rational_rank(rows);
    o.check(rank == 3, format!("rank {rank}"));
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let first: FidMorphism = "n=3;m=4;phi=3,2,4;colors=1:2;d=3".parse().unwrap();
    let second: FidMorphism = "n=4;m=5;phi=2,1,4,5;colors=3:1;d=3".parse().unwrap();
    let c = compose(&second, &first).unwrap();
    o.check(c.phi() == [4, 1, 5], format!("composite injection {:?}", c.phi()));
    o.check(c.colors() == &BTreeMap::from([(2, 2), (3, 1)]), format!("composite colors {:?}", c.colors()));
    let dec = c.decompose();
    o.check(dec.sigma.to_string() == "(1 4 2)(3 5)", format!("sigma = {}", dec.sigma));
    o.check(dec.colors == [2, 1], format!("colors {:?}", dec.colors));
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..1000 {
        let n = rng.random_range(0..=6);
        let m = n + rng.random_range(0..=4);
        let d = rng.random_range(1..=4);
        let mor = FidMorphism::random(n, m, d, &mut rng).unwrap();
        let dec = mor.decompose();
        // canonical form: agrees with phi on [n], increasing beyond
        let imgs = dec.sigma.images();
        o.check(imgs[..n] == *mor.phi() && imgs[n..].windows(2).all(|w| w[0] < w[1]), format!("{mor}: sigma {:?}", imgs));
        o.check(dec.recompose(n, d).as_ref() == Ok(&mor), format!("{mor} does not round-trip"));
    }
    o
}

fn sweep_specs() -> Vec<(ComplexSpec, usize)> {
    vec![
        (ComplexSpec::full(2, 2).unwrap(), 1),
        (ComplexSpec::full(3, 2).unwrap(), 1),
        (ComplexSpec::full(4, 2).unwrap(), 1),
        (ComplexSpec::full(4, 2).unwrap(), 2),
        (ComplexSpec::desc(3, 2).unwrap(), 1),
        (ComplexSpec::desc(4, 2).unwrap(), 1),
        (ComplexSpec::desc(4, 3).unwrap(), 2),
        (ComplexSpec::desc(5, 3).unwrap(), 2),
    ]
}

fn absorb(o: &mut Outcome, r: &SweepReport, require_nonempty: bool) {
    o.check(r.failures.is_empty(), format!("{} on {} degree {}: {:?}", r.property, r.spec, r.dim, r.failures.iter().take(3).collect::<Vec<_>>()));
    if require_nonempty {
        o.check(r.checked > 0, format!("{} on {} degree {}: nothing checked", r.property, r.spec, r.dim));
    }
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let mut total = 0;
    for (i, (spec, j)) in sweep_specs().into_iter().enumerate() {
        for r in [
            fid::check_commute(&spec, j).unwrap(),
            fid::check_unordered(&spec, j).unwrap(),
            fid::check_functor(&spec, j, 200, 2, 900 + i as u64).unwrap(),
        ] {
            total += r.checked;
            absorb(&mut o, &r, true);
        }
    }
    o.notes.push(format!("{total} identities checked"));
    o
}

/// Coordinate matrix (rows = images) of all morphism images of the
/// generators at `level`.
fn image_rows(variant: Variant, w: usize, j: usize, level: usize) -> (Vec<Vec<i128>>, usize) {
    let gen_levels = fid::generator_levels(variant, w, j);
    let spec = ComplexSpec::new(level, w, variant).unwrap();
    let basis = critical_cells(&spec, j).unwrap();
    let d = fid::color_count(&spec, j).unwrap();
    let mut rows = Vec::new();
    for g in gen_levels.into_iter().filter(|&g| g > j && g <= level) {
        let gspec = ComplexSpec::new(g, w, variant).unwrap();
        for h in fid::basis_classes(&gspec, j).unwrap() {
            for m in fid::all_morphisms(g, level, d).unwrap() {
                let img = fid::act(&h, &m).unwrap();
                rows.push(img.coords.dense(&basis).into_iter().map(i128::from).collect());
            }
        }
    }
    (rows, basis.len())
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    for (variant, w, j, levels) in [(Variant::Full, 2, 1, vec![4, 5]), (Variant::Desc, 2, 1, vec![4, 5]), (Variant::Desc, 3, 2, vec![5, 6])] {
        let r = fid::check_generation(variant, w, j, &levels).unwrap();
        o.check(r.passed(), format!("{variant} w={w} j={j}: {:?}", r.levels));
        for level in levels {
            let (rows, cols) = image_rows(variant, w, j, level);
            let m = SparseIntMatrix {
                rows: cols,
                cols: rows.len(),
                entries: rows
                    .iter()
                    .enumerate()
                    .flat_map(|(c, row)| row.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(r, &v)| (r, c, v as i64)))
                    .collect(),
            };
            let divisors = smith_normal_form(&m);
            o.check(divisors.len() == cols, format!("{variant} w={w} n={level}: rank {} of {cols}", divisors.len()));
            o.check(spans_lattice(rows, cols), format!("{variant} w={w} n={level}: images do not span the lattice"));
        }
    }
    o
}

fn criterion_11() -> Outcome {
    let mut o = Outcome::new();
    let mut concat_checked = 0;
    for (spec, j) in sweep_specs() {
        absorb(&mut o, &fid::check_barrier_preservation(&spec, j).unwrap(), true);
        absorb(&mut o, &fid::check_singleton_slide(&spec).unwrap(), true);
        absorb(&mut o, &fid::check_insertion_shape(&spec, j).unwrap(), true);
        let r = fid::check_barrier_concatenation(&spec).unwrap();
        concat_checked += r.checked;
        absorb(&mut o, &r, false);
    }
    // one level up as well, where concatenation has more instances
    for spec in [ComplexSpec::full(5, 2).unwrap(), ComplexSpec::desc(6, 3).unwrap()] {
        let r = fid::check_barrier_concatenation(&spec).unwrap();
        concat_checked += r.checked;
        absorb(&mut o, &r, true);
    }
    o.check(concat_checked > 0, "concatenation never exercised");
    o.notes.push(format!("{concat_checked} concatenations"));
    o
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "boundary golden value and dd = 0 on cell(n), n <= 6", criterion_1),
        (2, "face/coface keys and the f/g pairing in cell(9, 2)", criterion_2),
        (3, "Betti numbers equal critical counts, no torsion, vanishing degrees", criterion_3),
        (4, "no closed V-walks", criterion_4),
        (5, "basis cycles: closed, leading cell, unit coordinates", criterion_5),
        (6, "transposed wheel reduces to -z(1|3 2) + z(1|2 3) - z(2 3|1)", criterion_6),
        (7, "three degree 2 classes of cell(5, 2) have rank 3", criterion_7),
        (8, "FI_d composition, decomposition, 1000 round trips", criterion_8),
        (9, "insertions commute with permutations, unordered insertions, functoriality", criterion_9),
        (10, "finite generation by lattice span", criterion_10),
        (11, "barrier properties", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let t = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {id}: {title} [{:.1?}]", t.elapsed());
        for n in o.notes.iter().take(8) {
            println!("    {n}");
        }
        let expected = if id == 2 {
            // the single misprinted value, and nothing else
            !o.passed && o.notes == ["key(6|2|1 3|4|8|9|7 5) = (4,1; 8,1; 9,2; 6,1; 0,1; 0,1; 3,2), printed (4,1; 8,1; 9,2; 6,1; 0,1; 1,1; 3,2)"]
        } else {
            o.passed
        };
        if !expected {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcome as expected (criterion 2 fails only on the misprinted key)");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
