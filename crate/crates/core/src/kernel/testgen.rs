//! Seeded random generators for terms, cells, sets and points. Shared by the
//! oracle test suites, the benchmarks and the frozen randomized regression
//! entries of the corpus.

use super::cell::{BasicCell, Rel};
use super::set::SemilinearSet;
use crate::linalg::LinTerm;
use crate::rat::{frac, Rat};
use rand::Rng;

/// Rational with numerator in [-bound, bound] and denominator in [1, bound].
pub fn random_rat<R: Rng>(rng: &mut R, bound: i64) -> Rat {
    frac(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> Vec<Rat> {
    (0..dim).map(|_| random_rat(rng, bound)).collect()
}

pub fn random_term<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> LinTerm {
    loop {
        let t = LinTerm {
            coeffs: (0..dim).map(|_| random_rat(rng, bound)).collect(),
            constant: random_rat(rng, bound),
        };
        if !t.is_const() {
            return t;
        }
    }
}

/// Random cell with up to `max_atoms` atoms. Equalities are kept rare so
/// generated sets are not usually empty.
pub fn random_cell<R: Rng>(rng: &mut R, dim: usize, max_atoms: usize, bound: i64) -> BasicCell {
    let mut c = BasicCell::new(dim);
    for _ in 0..rng.gen_range(0..=max_atoms) {
        let rel = match rng.gen_range(0..6) {
            0 => Rel::Eq,
            1 | 2 => Rel::Lt,
            _ => Rel::Le,
        };
        c.push(random_term(rng, dim, bound), rel);
    }
    c
}

pub fn random_set<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_cells: usize,
    max_atoms: usize,
    bound: i64,
) -> SemilinearSet {
    let cells = (0..rng.gen_range(1..=max_cells))
        .map(|_| random_cell(rng, dim, max_atoms, bound))
        .collect();
    SemilinearSet::from_cells(dim, cells)
}

/// All rationals p/q in [lo, hi] with 1 <= q <= max_den, sorted and distinct.
/// The scan grid for brute-force membership oracles.
pub fn grid_rationals(lo: i64, hi: i64, max_den: i64) -> Vec<Rat> {
    let mut out: Vec<Rat> = Vec::new();
    for q in 1..=max_den {
        for p in lo * q..=hi * q {
            out.push(frac(p, q));
        }
    }
    out.sort();
    out.dedup();
    out
}
