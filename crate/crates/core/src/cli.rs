//! Command-line front end. `run` parses arguments, dispatches, and returns
//! the text to print together with an exit code; the binary only forwards.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::basis::{factorize, reduce_to_basis, z_cycle};
use crate::complex::{boundary_matrix, cell_counts};
use crate::error::Error;
use crate::fid::{self, act, FidMorphism, HomologyClass, SweepReport};
use crate::homology::{homology, verify_morse_counts};
use crate::morse::{critical_cells, GradientField};
use crate::repro;
use crate::symbols::{ChainFile, ComplexSpec, Symbol, Variant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE_GUARD: i32 = 3;

pub const CACHE_ENV: &str = "DISKSTRIP_CACHE_DIR";

/// Largest full-variant level accepted without `--force`.
pub const MAX_FULL_LEVEL: usize = 8;
/// Largest total cell count accepted without `--force`.
pub const MAX_CELLS: u128 = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "diskstrip", version, about = "Homology of cell(n, w) and desc(n, w) via discrete Morse theory")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Directory for cached reports.
    #[arg(long, env = CACHE_ENV, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Run even when the size guard would refuse.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Table,
    Json,
    /// Coordinate triplets; only meaningful for matrix exports.
    CoordinateMatrix,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpecArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub w: usize,
    #[arg(long, default_value = "full")]
    pub variant: Variant,
}

impl SpecArgs {
    fn spec(&self) -> Result<ComplexSpec, Error> {
        ComplexSpec::new(self.n, self.w, self.variant)
    }
}

/// Width and variant without a level (the level comes from the input).
#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, default_value_t = 2)]
    pub w: usize,
    #[arg(long, default_value = "full")]
    pub variant: Variant,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cell enumeration statistics.
    Complex {
        #[command(subcommand)]
        cmd: ComplexCmd,
    },
    /// Integral homology.
    Homology {
        #[command(subcommand)]
        cmd: HomologyCmd,
    },
    /// Discrete gradient field.
    Morse {
        #[command(subcommand)]
        cmd: MorseCmd,
    },
    /// Basis cycles and coordinates.
    Basis {
        #[command(subcommand)]
        cmd: BasisCmd,
    },
    /// FI_d action on homology.
    Fid {
        #[command(subcommand)]
        cmd: FidCmd,
    },
    /// Matrix exports.
    Export {
        #[command(subcommand)]
        cmd: ExportCmd,
    },
    /// Worked examples recomputed.
    Repro {
        #[command(subcommand)]
        cmd: ReproCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum ComplexCmd {
    /// Cell counts per dimension.
    Stats(SpecArgs),
}

#[derive(Debug, Subcommand)]
pub enum HomologyCmd {
    /// Betti numbers, optionally with torsion and the Morse count comparison.
    Betti {
        #[command(flatten)]
        spec: SpecArgs,
        /// Run the exact Smith normal form and report torsion.
        #[arg(long)]
        torsion: bool,
        /// Compare with critical-cell counts; exit 1 on mismatch.
        #[arg(long)]
        check_morse: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum MorseCmd {
    /// Critical cells from the closed form.
    Critical {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Matching audit: involution, closed form, closed walks.
    Audit(SpecArgs),
}

#[derive(Debug, Subcommand)]
pub enum BasisCmd {
    /// The basis cycle z(e) of a critical cell as a chain file.
    Show {
        #[arg(long)]
        cell: String,
        /// Level; defaults to the largest label of the cell.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Basis coordinates of a cycle read from a chain file.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Commute,
    Unordered,
    Functor,
    Generation,
    BarrierCount,
    SingletonSlide,
    BarrierConcat,
    InsertionShape,
}

#[derive(Debug, Subcommand)]
pub enum FidCmd {
    /// Image of a class under a morphism.
    Act {
        /// A critical cell (its basis class) or a chain file path.
        #[arg(long)]
        class: String,
        /// Morphism text, e.g. `n=3;m=5;phi=4,1,5;colors=2:1,3:0;d=2`.
        #[arg(long)]
        morphism: String,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Sweep one of the structural properties.
    Verify {
        #[arg(long, value_enum)]
        property: Property,
        #[command(flatten)]
        spec: SpecArgs,
        /// Homology degree.
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample count for the functor sweep.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Triplet,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum ExportCmd {
    /// Boundary matrix from `dim`-cells to `(dim-1)`-cells.
    Boundary {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        dim: usize,
        /// Overrides the global format.
        #[arg(long = "as", value_enum)]
        matrix_format: Option<MatrixFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReproCmd {
    /// Recompute one figure (ids 2, 6-14).
    Figure {
        #[arg(long)]
        id: u32,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn verdict(passed: bool, stdout: String) -> Self {
        Outcome { code: if passed { EXIT_OK } else { EXIT_VERIFY_FAILED }, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: msg.into() }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { Outcome::ok(text) } else { Outcome::fail(code, text) };
        }
    };
    let request: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cache = match (&cli.cache_dir, cli.no_cache) {
        (Some(dir), false) if cacheable(&cli.command) => Some(Cache::new(dir, &request)),
        _ => None,
    };
    let mut warnings = String::new();
    if let Some(c) = &cache {
        match c.load() {
            Ok(Some(hit)) => return hit,
            Ok(None) => {}
            Err(msg) => warnings.push_str(&format!("warning: {msg}; recomputing\n")),
        }
    }
    let mut out = match dispatch(&cli) {
        Ok(o) => o,
        Err(Failure::Guard(msg)) => Outcome::fail(EXIT_RESOURCE_GUARD, msg),
        Err(Failure::Input(e)) => Outcome::fail(EXIT_USAGE, format!("error: {e}\n")),
        Err(Failure::Io(msg)) => Outcome::fail(EXIT_USAGE, format!("error: {msg}\n")),
    };
    if let Some(c) = &cache {
        if out.code == EXIT_OK || out.code == EXIT_VERIFY_FAILED {
            if let Err(msg) = c.store(&out) {
                warnings.push_str(&format!("warning: could not write cache entry: {msg}\n"));
            }
        }
    }
    out.stderr.insert_str(0, &warnings);
    out
}

enum Failure {
    Guard(String),
    Input(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn cacheable(cmd: &Command) -> bool {
    // basis/fid act read files whose contents are not part of the request
    matches!(cmd, Command::Complex { .. } | Command::Homology { .. } | Command::Morse { .. })
        || matches!(cmd, Command::Fid { cmd: FidCmd::Verify { .. } })
}

/// Refuses specs whose enumeration would be too large.
pub fn guard(spec: &ComplexSpec, force: bool) -> std::result::Result<(), String> {
    if force {
        return Ok(());
    }
    if spec.variant == Variant::Full && spec.n > MAX_FULL_LEVEL {
        return Err(format!(
            "refusing {spec}: full variant above n = {MAX_FULL_LEVEL} needs --force\n"
        ));
    }
    let total: u128 = cell_counts(spec).iter().sum();
    if total > MAX_CELLS {
        return Err(format!("refusing {spec}: {total} cells exceeds {MAX_CELLS}; pass --force to run anyway\n"));
    }
    Ok(())
}

fn guarded(spec: &ComplexSpec, force: bool) -> Res<()> {
    guard(spec, force).map_err(Failure::Guard)
}

fn render<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        _ => table(),
    }
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: &Cli) -> Res<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Complex { cmd: ComplexCmd::Stats(a) } => {
            let spec = a.spec()?;
            let counts: Vec<String> = cell_counts(&spec).iter().map(u128::to_string).collect();
            let total: u128 = cell_counts(&spec).iter().sum();
            let value = json!({ "spec": spec, "cells": counts, "total": total.to_string() });
            Ok(Outcome::ok(render(fmt, &value, || {
                let mut s = format!("{spec}\n");
                for (j, c) in counts.iter().enumerate() {
                    s += &format!("  dim {j}: {c}\n");
                }
                s + &format!("  total: {total}\n")
            })))
        }
        Command::Homology { cmd: HomologyCmd::Betti { spec, torsion, check_morse } } => {
            let spec = spec.spec()?;
            guarded(&spec, cli.force)?;
            if *check_morse {
                let r = verify_morse_counts(&spec);
                let passed = r.passed();
                let value = json!({ "report": r, "passed": passed });
                return Ok(Outcome::verdict(passed, render(fmt, &value, || {
                    format!(
                        "{spec}\n  betti:    {}\n  critical: {}\n  torsion-free: {}\n  euler: {} (cells) {} (betti)\n  {}\n",
                        list(&r.betti),
                        list(&r.critical),
                        r.torsion_free,
                        r.euler_from_cells,
                        r.euler_from_betti,
                        if passed { "PASS" } else { "FAIL" }
                    )
                })));
            }
            let h = homology(&spec, *torsion);
            Ok(Outcome::ok(render(fmt, &h, || {
                let mut s = format!("{spec}\n  betti: {}\n", list(&h.betti));
                if let Some(t) = &h.torsion {
                    for (j, divs) in t.iter().enumerate().filter(|(_, d)| !d.is_empty()) {
                        s += &format!("  torsion in dim {j}: {}\n", divs.join(" "));
                    }
                    if t.iter().all(Vec::is_empty) {
                        s += "  torsion: none\n";
                    }
                }
                s
            })))
        }
        Command::Morse { cmd: MorseCmd::Critical { spec, dim } } => {
            let spec = spec.spec()?;
            guarded(&spec, cli.force)?;
            let dims: Vec<usize> = match dim {
                Some(d) => vec![*d],
                None => (0..=spec.max_dimension()).collect(),
            };
            let mut by_dim = serde_json::Map::new();
            let mut s = format!("{spec}\n");
            for d in dims {
                let cells = critical_cells(&spec, d)?;
                s += &format!("  dim {d} ({}):\n", cells.len());
                for e in cells.iter().rev() {
                    s += &format!("    {e}\n");
                }
                by_dim.insert(d.to_string(), json!(cells.iter().rev().map(Symbol::to_string).collect::<Vec<_>>()));
            }
            let value = json!({ "spec": spec, "critical": by_dim });
            Ok(Outcome::ok(render(fmt, &value, || s)))
        }
        Command::Morse { cmd: MorseCmd::Audit(a) } => {
            let spec = a.spec()?;
            guarded(&spec, cli.force)?;
            let r = GradientField::compute(&spec).audit();
            let passed = r.passed();
            Ok(Outcome::verdict(passed, render(fmt, &r, || {
                format!(
                    "{}\n  cells: {}\n  pairs: {}\n  critical: {}\n  involution failures: {}\n  closed-form mismatches: {}\n  closed walks: {}\n  {}\n",
                    r.spec,
                    r.cells,
                    r.pairs,
                    list(&r.critical_by_dim),
                    r.involution_failures.len(),
                    r.predicate_mismatches.len(),
                    r.closed_walks.len(),
                    if passed { "PASS" } else { "FAIL" }
                )
            })))
        }
        Command::Basis { cmd: BasisCmd::Show { cell, n, family } } => {
            let e: Symbol = cell.parse()?;
            let n = n.unwrap_or(e.max_label() as usize);
            let spec = ComplexSpec::new(n, family.w, family.variant)?;
            let fac = factorize(&e, &spec)?;
            let z = z_cycle(&e, &spec)?;
            let file = z.to_file(n);
            Ok(Outcome::ok(match fmt {
                Format::Json => serde_json::to_string_pretty(&file).expect("chain file serializes") + "\n",
                _ => format!("z({e}) with factors {fac}\n{}\n", serde_json::to_string_pretty(&file).expect("chain file serializes")),
            }))
        }
        Command::Basis { cmd: BasisCmd::Reduce { input, family } } => {
            let file = read_chain_file(input)?;
            let spec = ComplexSpec::new(file.n, family.w, family.variant)?;
            let coords = reduce_to_basis(&file.to_chain()?, &spec)?;
            Ok(Outcome::ok(match fmt {
                Format::Json => serde_json::to_string_pretty(&coords.to_json()).expect("json") + "\n",
                _ => format!("{coords}\n"),
            }))
        }
        Command::Fid { cmd: FidCmd::Act { class, morphism, family } } => {
            let m: FidMorphism = morphism.parse()?;
            let path = Path::new(class);
            let spec = ComplexSpec::new(m.source(), family.w, family.variant)?;
            let h = if path.exists() {
                let file = read_chain_file(path)?;
                HomologyClass::of_cycle(&file.to_chain()?, &spec)?
            } else {
                HomologyClass::basis(&spec, Symbol::parse_level(class, m.source())?)?
            };
            let img = act(&h, &m)?;
            let value = json!({ "source": h.coords.to_json(), "morphism": m.to_string(), "image": img.coords.to_json() });
            Ok(Outcome::ok(render(fmt, &value, || format!("{h}\n  -> {img}\n"))))
        }
        Command::Fid { cmd: FidCmd::Verify { property, spec, j, seed, samples } } => {
            let s = spec.spec()?;
            guarded(&s.at_level(s.n + 2)?, cli.force)?;
            if *property == Property::Generation {
                let cutoff = *fid::generator_levels(s.variant, s.w, *j).last().expect("nonempty");
                let levels: Vec<usize> = (cutoff + 1..=s.n).collect();
                if levels.is_empty() {
                    return Err(Failure::Input(Error::InvalidMorphism(format!(
                        "--n must exceed the generator level {cutoff}"
                    ))));
                }
                let r = fid::check_generation(s.variant, s.w, *j, &levels)?;
                let passed = r.passed();
                return Ok(Outcome::verdict(passed, render(fmt, &r, || {
                    let mut t = format!("generation for {} in degree {j}, generators at levels {:?}\n", r.spec, r.generator_levels);
                    for l in &r.levels {
                        t += &format!(
                            "  n = {}: basis {}, images {}, rank {}, unit divisors {}\n",
                            l.level, l.basis, l.images, l.rank, l.unit_divisors
                        );
                    }
                    t + if passed { "  PASS\n" } else { "  FAIL\n" }
                })));
            }
            let r: SweepReport = match property {
                Property::Commute => fid::check_commute(&s, *j)?,
                Property::Unordered => fid::check_unordered(&s, *j)?,
                Property::Functor => fid::check_functor(&s, *j, *samples, 2, *seed)?,
                Property::BarrierCount => fid::check_barrier_preservation(&s, *j)?,
                Property::SingletonSlide => fid::check_singleton_slide(&s)?,
                Property::BarrierConcat => fid::check_barrier_concatenation(&s)?,
                Property::InsertionShape => fid::check_insertion_shape(&s, *j)?,
                Property::Generation => unreachable!(),
            };
            let passed = r.passed();
            Ok(Outcome::verdict(passed, render(fmt, &r, || {
                let mut t = format!("{} on {} in degree {}: {} checked, {} failed\n", r.property, r.spec, r.dim, r.checked, r.failures.len());
                for f in r.failures.iter().take(20) {
                    t += &format!("  {f}\n");
                }
                t + if passed { "  PASS\n" } else { "  FAIL\n" }
            })))
        }
        Command::Export { cmd: ExportCmd::Boundary { spec, dim, matrix_format, out } } => {
            let s = spec.spec()?;
            guarded(&s, cli.force)?;
            if *dim == 0 || *dim > s.max_dimension() {
                return Err(Failure::Input(Error::DimensionMismatch { expected: s.max_dimension(), found: *dim }));
            }
            let m = boundary_matrix(&s, *dim);
            let as_json = match matrix_format {
                Some(f) => *f == MatrixFormat::Json,
                None => fmt == Format::Json,
            };
            let text = if as_json {
                serde_json::to_string(&m).expect("matrix serializes") + "\n"
            } else {
                m.to_triplets()
            };
            match out {
                Some(p) => {
                    fs::write(p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                    Ok(Outcome::ok(format!("wrote {}x{} matrix ({} nonzeros) to {}\n", m.rows, m.cols, m.nnz(), p.display())))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Command::Repro { cmd: ReproCmd::Figure { id } } => {
            let r = repro::figure(*id)?;
            let passed = r.passed();
            Ok(Outcome::verdict(passed, render(fmt, &r, || {
                let mut t = format!("figure {}: {}\n", r.id, r.title);
                for c in &r.checks {
                    t += &format!("  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name);
                    if !c.passed {
                        t += &format!(": {}", c.detail);
                    }
                    t += "\n";
                }
                t + if passed { "PASS\n" } else { "FAIL\n" }
            })))
        }
    }
}

fn read_chain_file(path: &Path) -> Res<ChainFile> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: not a chain file: {e}", path.display())))
}

/// One cached report, addressed by a digest of the request.
struct Cache {
    path: PathBuf,
    request: String,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    version: String,
    request: String,
    outcome: Outcome,
}

impl Cache {
    fn new(dir: &Path, args: &[String]) -> Self {
        // drop flags that do not change the result
        let mut kept = Vec::new();
        let mut skip_next = false;
        for a in args {
            if skip_next {
                skip_next = false;
                continue;
            }
            match a.as_str() {
                "--cache-dir" => skip_next = true,
                "--no-cache" => {}
                _ if a.starts_with("--cache-dir=") => {}
                _ => kept.push(a.as_str()),
            }
        }
        let request = kept.join("\u{1f}");
        let digest = hex::encode(Sha256::digest(format!("{}\u{1e}{request}", env!("CARGO_PKG_VERSION"))));
        Cache { path: dir.join(format!("{digest}.json")), request }
    }

    fn load(&self) -> std::result::Result<Option<Outcome>, String> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("unreadable cache entry {}: {e}", self.path.display())),
        };
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(entry) if entry.request == self.request && entry.version == env!("CARGO_PKG_VERSION") => {
                Ok(Some(entry.outcome))
            }
            Ok(_) => Err(format!("cache entry {} belongs to another request", self.path.display())),
            Err(e) => Err(format!("corrupt cache entry {}: {e}", self.path.display())),
        }
    }

    fn store(&self, out: &Outcome) -> std::io::Result<()> {
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir)?;
        }
        let entry = CacheEntry {
            version: env!("CARGO_PKG_VERSION").into(),
            request: self.request.clone(),
            outcome: Outcome { stderr: String::new(), ..out.clone() },
        };
        let tmp = self.path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(&entry).expect("entry serializes"))?;
        fs::rename(tmp, &self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("diskstrip").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["homology"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["complex", "stats", "--n", "x"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["basis", "show", "--cell", "1 1"]).code, EXIT_USAGE);
    }

    #[test]
    fn guard_refuses_large_full() {
        let o = run_args(&["homology", "betti", "--n", "9"]);
        assert_eq!(o.code, EXIT_RESOURCE_GUARD, "{o:?}");
        assert!(guard(&ComplexSpec::desc(9, 2).unwrap(), false).is_ok());
    }

    #[test]
    fn desc_betti() {
        let o = run_args(&["--format", "json", "homology", "betti", "--n", "3", "--variant", "desc"]);
        assert_eq!(o.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["betti"], json!([1, 1]));
    }
}
