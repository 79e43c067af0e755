//! Sign-invariant cell decomposition (graph/band construction).
//!
//! `decompose_space` partitions Q^dim into cells on which every given term
//! keeps a constant sign. Working from the last coordinate down, terms that
//! mention it become graphs `x_last = g(x')`; the base space is decomposed
//! against the remaining terms plus all pairwise graph differences, and each
//! base cell is stacked into sections and open bands. Every emitted cell is
//! nonempty (it carries a sample point), relatively open in its affine hull,
//! and its hull is exactly its equality system.

use super::cell::{BasicCell, Rel};
use super::set::SemilinearSet;
use crate::linalg::{rref_eqs, LinTerm};
use crate::rat::{rat, Rat};
use num_traits::{One, Zero};
use std::collections::HashSet;

/// Term `x_last - g(x')` over `g.arity() + 1` variables.
fn graph_term(g: &LinTerm) -> LinTerm {
    let mut coeffs: Vec<Rat> = g.coeffs.iter().map(|c| -c.clone()).collect();
    coeffs.push(Rat::one());
    LinTerm {
        coeffs,
        constant: -g.constant.clone(),
    }
}

pub fn decompose_space(dim: usize, terms: &[LinTerm]) -> Vec<(BasicCell, Vec<Rat>)> {
    if dim == 0 {
        return vec![(BasicCell::new(0), Vec::new())];
    }
    let last = dim - 1;
    let mut funcs: Vec<LinTerm> = Vec::new();
    let mut base_terms: Vec<LinTerm> = Vec::new();
    let mut seen: HashSet<(Vec<Rat>, Rat)> = HashSet::new();
    let mut push_base = |t: LinTerm, base_terms: &mut Vec<LinTerm>| {
        if t.is_const() {
            return; // constant sign everywhere
        }
        let w = t.canonical_wall();
        if seen.insert((w.coeffs.clone(), w.constant.clone())) {
            base_terms.push(w);
        }
    };
    for t in terms {
        if t.is_const() {
            continue;
        }
        let c = t.coeffs[last].clone();
        if c.is_zero() {
            push_base(t.drop_var(last), &mut base_terms);
        } else {
            let mut rest = t.clone();
            rest.coeffs[last] = Rat::zero();
            let g = rest.scale(&(-Rat::one() / c)).drop_var(last);
            if !funcs.contains(&g) {
                funcs.push(g);
            }
        }
    }
    // Graph order must be constant on each base cell.
    for i in 0..funcs.len() {
        for j in (i + 1)..funcs.len() {
            push_base(funcs[i].sub(&funcs[j]), &mut base_terms);
        }
    }

    let mut out = Vec::new();
    for (bc, bs) in decompose_space(last, &base_terms) {
        // Distinct graph levels over this base cell, bottom to top. Graphs
        // that agree at the sample agree on the whole cell (their difference
        // is a base term).
        let mut vals: Vec<(Rat, usize)> = funcs
            .iter()
            .enumerate()
            .map(|(k, g)| (g.eval(&bs), k))
            .collect();
        vals.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut levels: Vec<(Rat, usize)> = Vec::new();
        for (v, k) in vals {
            if levels.last().map_or(true, |(lv, _)| *lv != v) {
                levels.push((v, k));
            }
        }
        let lift = bc.cylinder(last, 1);
        if levels.is_empty() {
            let mut s = bs.clone();
            s.push(rat(0));
            out.push((lift, s));
            continue;
        }
        {
            // open band below the lowest graph
            let (v0, k0) = &levels[0];
            let cell = lift.clone().with(graph_term(&funcs[*k0]), Rel::Lt);
            let mut s = bs.clone();
            s.push(v0.clone() - rat(1));
            out.push((cell, s));
        }
        for (pos, (v, k)) in levels.iter().enumerate() {
            let cell = lift.clone().with(graph_term(&funcs[*k]), Rel::Eq);
            let mut s = bs.clone();
            s.push(v.clone());
            out.push((cell, s));
            let band = match levels.get(pos + 1) {
                Some((vn, kn)) => {
                    let cell = lift
                        .clone()
                        .with(graph_term(&funcs[*k]).neg(), Rel::Lt)
                        .with(graph_term(&funcs[*kn]), Rel::Lt);
                    let mut s = bs.clone();
                    s.push((v.clone() + vn.clone()) * crate::rat::frac(1, 2));
                    (cell, s)
                }
                None => {
                    let cell = lift.clone().with(graph_term(&funcs[*k]).neg(), Rel::Lt);
                    let mut s = bs.clone();
                    s.push(v.clone() + rat(1));
                    (cell, s)
                }
            };
            out.push(band);
        }
    }
    out
}

/// Cells of the induced decomposition lying inside `s`, with samples.
/// Sign-invariance makes the sample decide membership for the whole cell.
pub fn cells_of(s: &SemilinearSet) -> Vec<(BasicCell, Vec<Rat>)> {
    decompose_space(s.dim(), &s.all_terms())
        .into_iter()
        .filter(|(_, p)| s.contains(p))
        .collect()
}

/// Dimension of a cell produced by `decompose_space`: its affine hull is its
/// equality system, so no promotion pass is needed.
pub fn decomposed_dim(c: &BasicCell) -> usize {
    c.dim() - rref_eqs(c.dim(), &c.eq).rank()
}

impl SemilinearSet {
    /// Partition of the set into nonempty pairwise disjoint cells, each
    /// relatively open in its affine hull.
    pub fn cell_decompose(&self) -> Vec<BasicCell> {
        cells_of(self).into_iter().map(|(c, _)| c).collect()
    }
}
