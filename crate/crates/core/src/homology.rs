//! Integral homology of a complex from its boundary matrices, and the
//! comparison with critical-cell counts.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{boundary_matrix_between, cell_counts, CellIndex};
use crate::morse::GradientField;
use crate::snf::{rank_mod_p, smith_normal_form};
use crate::symbols::{ComplexSpec, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub spec: ComplexSpec,
    /// Betti number per dimension `0..=max_dimension`.
    pub betti: Vec<u64>,
    /// Elementary divisors greater than 1 per dimension, as decimal strings.
    /// `None` when only ranks were computed.
    pub torsion: Option<Vec<Vec<String>>>,
}

impl HomologySummary {
    pub fn euler_characteristic(&self) -> i128 {
        self.betti.iter().enumerate().map(|(j, &b)| if j % 2 == 0 { b as i128 } else { -(b as i128) }).sum()
    }

    pub fn is_torsion_free(&self) -> Option<bool> {
        self.torsion.as_ref().map(|t| t.iter().all(Vec::is_empty))
    }
}

/// Homology of `spec`. With `torsion`, every boundary matrix goes through the
/// exact Smith normal form; otherwise ranks are computed modulo a large prime.
pub fn homology(spec: &ComplexSpec, torsion: bool) -> HomologySummary {
    let top = spec.max_dimension();
    let indices: Vec<CellIndex> = (0..=top).into_par_iter().map(|d| CellIndex::new(spec, d)).collect();
    // ranks[j] = rank of the boundary from j-cells, j = 1..=top
    let reductions: Vec<(usize, Vec<BigInt>)> = (1..=top)
        .into_par_iter()
        .map(|j| {
            let m = boundary_matrix_between(&indices[j - 1], &indices[j]);
            if torsion {
                let d = smith_normal_form(&m);
                (d.len(), d)
            } else {
                (rank_mod_p(&m), Vec::new())
            }
        })
        .collect();
    let rank = |j: usize| if j >= 1 && j <= top { reductions[j - 1].0 } else { 0 };
    let betti = (0..=top).map(|j| (indices[j].len() - rank(j) - rank(j + 1)) as u64).collect();
    let torsion = torsion.then(|| {
        (0..=top)
            .map(|j| {
                if j < top {
                    reductions[j].1.iter().filter(|d| !d.is_one()).map(BigInt::to_string).collect()
                } else {
                    Vec::new()
                }
            })
            .collect()
    });
    HomologySummary { spec: *spec, betti, torsion }
}

/// Comparison of Betti numbers with the number of critical cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseCountReport {
    pub spec: ComplexSpec,
    pub betti: Vec<u64>,
    pub critical: Vec<usize>,
    pub torsion_free: bool,
    /// Dimensions where a width-`w` descending complex has nonzero homology
    /// although `w - 1` does not divide the dimension.
    pub vanishing_failures: Vec<usize>,
    pub euler_from_cells: i128,
    pub euler_from_betti: i128,
}

impl MorseCountReport {
    pub fn passed(&self) -> bool {
        self.torsion_free
            && self.vanishing_failures.is_empty()
            && self.euler_from_cells == self.euler_from_betti
            && self.betti.len() == self.critical.len()
            && self.betti.iter().zip(&self.critical).all(|(&b, &c)| b as usize == c)
    }
}

pub fn verify_morse_counts(spec: &ComplexSpec) -> MorseCountReport {
    let h = homology(spec, true);
    let critical = GradientField::compute(spec).critical_counts();
    let vanishing_failures = match spec.variant {
        Variant::Desc if spec.w > 1 => {
            (0..h.betti.len()).filter(|&j| j % (spec.w - 1) != 0 && h.betti[j] != 0).collect()
        }
        _ => Vec::new(),
    };
    let euler_from_cells = cell_counts(spec)
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { c as i128 } else { -(c as i128) })
        .sum();
    MorseCountReport {
        spec: *spec,
        torsion_free: h.is_torsion_free().unwrap_or(false),
        euler_from_betti: h.euler_characteristic(),
        betti: h.betti,
        critical,
        vanishing_failures,
        euler_from_cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_small_homology() {
        let cases = [
            (ComplexSpec::desc(3, 2).unwrap(), vec![1, 1]),
            (ComplexSpec::full(3, 2).unwrap(), vec![1, 7]),
            (ComplexSpec::full(2, 2).unwrap(), vec![1, 1]),
            (ComplexSpec::full(1, 1).unwrap(), vec![1]),
        ];
        for (spec, betti) in cases {
            for torsion in [false, true] {
                let h = homology(&spec, torsion);
                assert_eq!(h.betti, betti, "{spec}");
                if torsion {
                    assert_eq!(h.is_torsion_free(), Some(true));
                }
            }
        }
    }

    #[test]
    fn hexagon_invariant_factors() {
        let m = crate::complex::boundary_matrix(&ComplexSpec::desc(3, 2).unwrap(), 1);
        assert_eq!(smith_normal_form(&m), vec![BigInt::one(); 5]);
    }

    #[test]
    fn morse_counts_small() {
        for spec in [ComplexSpec::full(4, 2).unwrap(), ComplexSpec::desc(5, 3).unwrap(), ComplexSpec::full(1, 1).unwrap()] {
            let r = verify_morse_counts(&spec);
            assert!(r.passed(), "{r:?}");
        }
    }
}
