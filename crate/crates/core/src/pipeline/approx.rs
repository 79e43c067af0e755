//! Essential-approximation synthesis.
//!
//! Given a component whose uniform closure is a single flat family `Z`, the
//! synthesizer lists half-flat families `H_1, …, H_ℓ` inside `Z` such that on
//! each output part every `H_j(b)` is an essential half-flat of the fiber
//! `X_b` and every essential half-flat of `X_b` shares its boundary with some
//! `H_j(b)`. Candidate boundary walls are the strict atoms of the
//! top-dimensional cells of the total relation, reduced modulo `Z`; each wall
//! yields four oriented candidates, and each candidate's essentiality region
//! over the parameters is computed exactly by a first-order witness
//! construction (a point of the boundary together with a cube radius whose
//! cube meets `X` and `H` identically).
//!
//! The output also records, for every sub-collection `J ⊆ [ℓ]`, the constant
//! dimensions of `P_J ∩ X_b` and `P_J ∖ X_b`, where `P_J` is the piece of `Z`
//! on the `J`-side of the boundaries; parts are refined until these
//! dimensions are constant.

use super::closure::{FlatFamilyAnn, UniformClosureAnn, SYNTH_CELL_BUDGET};
use super::PipelineError;
use crate::families::ParamFamily;
use crate::kernel::{
    affine_hull, cells_of, decompose_space, Atom, BasicCell, Dim, HalfFlat, Rel, SemilinearSet,
};
use crate::linalg::LinTerm;
use crate::rat::Rat;
use num_traits::{One, Zero};

/// A family of parallel half-flat fibers `H_b = Z_b ∩ {x : cut(x, b) REL 0}`
/// carried by a flat family. The member-coordinate part of the cut is
/// constant in `b` and never vanishes on the carrier, so every nonempty
/// fiber is a proper half-flat of dimension `flat.fiber_dim()`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfFlatFamilyAnn {
    flat: FlatFamilyAnn,
    cut: Atom,
}

impl HalfFlatFamilyAnn {
    pub fn new(flat: FlatFamilyAnn, cut: Atom) -> Result<HalfFlatFamilyAnn, PipelineError> {
        if cut.rel == Rel::Eq {
            return Err(PipelineError::AnnotationInvalid(
                "half-flat cut must be strict or weak, not an equation".into(),
            ));
        }
        let ambient = flat.member_dim() + flat.param_dim();
        if cut.term.arity() != ambient {
            return Err(PipelineError::AnnotationInvalid(format!(
                "cut arity {} does not match ambient dimension {}",
                cut.term.arity(),
                ambient
            )));
        }
        let reduced = flat.total().system().reduce_term(&cut.term);
        if reduced.coeffs[..flat.member_dim()]
            .iter()
            .all(|c| c.is_zero())
        {
            return Err(PipelineError::AnnotationInvalid(
                "cut does not slice the fibers of the carrier flat family".into(),
            ));
        }
        Ok(HalfFlatFamilyAnn { flat, cut })
    }

    pub fn flat(&self) -> &FlatFamilyAnn {
        &self.flat
    }

    pub fn cut(&self) -> &Atom {
        &self.cut
    }

    pub fn member_dim(&self) -> usize {
        self.flat.member_dim()
    }

    pub fn param_dim(&self) -> usize {
        self.flat.param_dim()
    }

    /// The graph `{(x, b) : x ∈ H_b}` as a semilinear set.
    pub fn as_total_set(&self) -> SemilinearSet {
        let mut cell = self.flat.total().as_cell();
        cell.push(self.cut.term.clone(), self.cut.rel);
        SemilinearSet::from_cell(cell)
    }

    /// The boundary `Z_b ∩ {cut = 0}` as a flat family.
    pub fn boundary(&self) -> Result<FlatFamilyAnn, PipelineError> {
        let mut rows = self.flat.total().rows().to_vec();
        rows.push(self.cut.term.clone());
        let ambient = self.flat.member_dim() + self.flat.param_dim();
        let flat = crate::kernel::Flat::from_eqs(ambient, &rows)?;
        FlatFamilyAnn::new(self.flat.member_dim(), self.flat.param_dim(), flat)
    }

    /// The fiber over a concrete parameter point, `None` when empty.
    pub fn fiber_halfflat(&self, b: &[Rat]) -> Option<HalfFlat> {
        let carrier = self.flat.fiber_flat(b)?;
        let cut = Atom::new(self.cut.term.substitute_tail(b), self.cut.rel);
        HalfFlat::new(carrier, cut).ok()
    }
}

/// Constant dimensions of the two sides of one piece `P_J` of the carrier:
/// `meet` is `dim(P_J ∩ X_b)` and `diff` is `dim(P_J ∖ X_b)`, both constant
/// over the part (`None` meaning empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartDims {
    pub mask: usize,
    pub meet: Dim,
    pub diff: Dim,
}

/// One part of a uniform essential approximation.
#[derive(Debug, Clone)]
pub struct EssentialApproxAnn {
    pub part: SemilinearSet,
    pub sample: Vec<Rat>,
    pub halfflats: Vec<HalfFlatFamilyAnn>,
    /// Entry `mask` describes `P_J` for `J = {j : mask >> j & 1 = 1}`.
    pub dims: Vec<PartDims>,
}

/// Synthesize the essential approximation of component `label` over one
/// closure part. The closure must consist of a single flat family.
pub fn synth_essential_approx(
    f: &ParamFamily,
    label: &str,
    closure: &UniformClosureAnn,
) -> Result<Vec<EssentialApproxAnn>, PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    approx_parts(m, f.param_dim(), f.relation(pos), closure, SYNTH_CELL_BUDGET)
}

/// Worker shared with the uniformity check and the reduction driver.
pub(crate) fn approx_parts(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    closure: &UniformClosureAnn,
    cell_budget: usize,
) -> Result<Vec<EssentialApproxAnn>, PipelineError> {
    if closure.len() != 1 {
        return Err(PipelineError::NeedsSinglePart(format!(
            "essential approximation needs a single-flat closure, got length {}",
            closure.len()
        )));
    }
    let z = &closure.flats[0];
    let part = &closure.part;
    let d = z.fiber_dim();
    let total = x.intersect(&part.cylinder(0, m)).prune();

    // Candidate boundary walls: strict atoms of the top-dimensional cells,
    // reduced modulo the carrier and normalized. Walls parallel to the
    // fibers cut nothing and are skipped.
    let cells = cells_of(&total);
    if cells.len() > cell_budget {
        return Err(PipelineError::BudgetExceeded(format!(
            "essential approximation saw {} cells (budget {})",
            cells.len(),
            cell_budget
        )));
    }
    let mut walls: Vec<LinTerm> = Vec::new();
    for (cell, _) in &cells {
        let hull = affine_hull(cell)?;
        let fdim = {
            let xrows: Vec<Vec<Rat>> = hull.rows().iter().map(|r| r.coeffs[..m].to_vec()).collect();
            m - crate::linalg::rank_of(&xrows)
        };
        if fdim != d {
            continue;
        }
        for t in cell.lt.iter().chain(cell.le.iter()) {
            let red = z.total().system().reduce_term(t);
            let w = red.canonical_wall();
            if w.is_const() || w.coeffs[..m].iter().all(|c| c.is_zero()) {
                continue;
            }
            if !walls.contains(&w) {
                walls.push(w);
            }
        }
    }

    // Four oriented candidates per wall, each with its exact essentiality
    // region over the parameters.
    struct Cand {
        wall: usize,
        half: HalfFlatFamilyAnn,
        region: SemilinearSet,
    }
    let mut cands: Vec<Cand> = Vec::new();
    for (wi, w) in walls.iter().enumerate() {
        for (term, rel) in [
            (w.clone(), Rel::Lt),
            (w.clone(), Rel::Le),
            (w.neg(), Rel::Lt),
            (w.neg(), Rel::Le),
        ] {
            let half = HalfFlatFamilyAnn::new(z.clone(), Atom::new(term, rel))?;
            let region = witness_set(m, n, &total, z, &half, part)?
                .eliminate_tail(m + 1)
                .intersect(part)
                .prune();
            if !region.is_empty() {
                cands.push(Cand {
                    wall: wi,
                    half,
                    region,
                });
            }
        }
    }

    // Split the part by essentiality patterns, then by the dimension profile
    // of the pieces `P_J`; both splits are unions of regions of a single
    // sign-invariant decomposition of the parameter space.
    let mut region_walls: Vec<LinTerm> = Vec::new();
    for c in &cands {
        region_walls.extend(c.region.all_terms());
    }
    region_walls.extend(part.all_terms());

    let mut out: Vec<EssentialApproxAnn> = Vec::new();
    let mut patterns: Vec<(Vec<bool>, SemilinearSet, Vec<Rat>)> = Vec::new();
    for (cell, sample) in decompose_space(n, &region_walls) {
        if !part.contains(&sample) {
            continue;
        }
        let pat: Vec<bool> = cands.iter().map(|c| c.region.contains(&sample)).collect();
        let piece = SemilinearSet::from_cell(cell);
        match patterns.iter_mut().find(|g| g.0 == pat) {
            Some(g) => g.1 = g.1.union_(&piece),
            None => patterns.push((pat, piece, sample)),
        }
    }

    for (pat, sub_part, sample) in patterns {
        let sub_part = sub_part.prune();
        // One representative per boundary: first essential orientation of
        // each wall, then merge walls whose boundaries coincide over the
        // sub-part.
        let mut reps: Vec<&Cand> = Vec::new();
        for wi in 0..walls.len() {
            if let Some(c) = cands
                .iter()
                .zip(&pat)
                .find(|(c, on)| **on && c.wall == wi)
                .map(|(c, _)| c)
            {
                reps.push(c);
            }
        }
        let lifted = sub_part.cylinder(0, m);
        let mut keep = vec![true; reps.len()];
        for i in 0..reps.len() {
            for j in 0..i {
                if !keep[j] {
                    continue;
                }
                let bi = reps[i].half.boundary()?.as_total_set().intersect(&lifted);
                let bj = reps[j].half.boundary()?.as_total_set().intersect(&lifted);
                if bi.set_eq(&bj) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let halfflats: Vec<HalfFlatFamilyAnn> = reps
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(c, _)| c.half.clone())
            .collect();

        // Dimension profile of every piece of the carrier, refined until the
        // two side dimensions are constant per final part.
        let l = halfflats.len();
        let z_set = z.as_total_set();
        let mut side_profiles: Vec<(Vec<(usize, SemilinearSet)>, Vec<(usize, SemilinearSet)>)> =
            Vec::new();
        for mask in 0..1usize << l {
            let mut p = z_set.clone();
            for (j, h) in halfflats.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    p = p.intersect(&h.as_total_set());
                } else {
                    p = p.subtract(&h.as_total_set());
                }
            }
            p = p.intersect(&lifted).prune();
            let meet = dim_profile(m, &p.intersect(&total).prune())?;
            let diff = dim_profile(m, &p.subtract(&total).prune())?;
            side_profiles.push((meet, diff));
        }

        let mut dim_walls: Vec<LinTerm> = sub_part.all_terms();
        for (meet, diff) in &side_profiles {
            for (_, act) in meet.iter().chain(diff.iter()) {
                dim_walls.extend(act.all_terms());
            }
        }
        let mut fine: Vec<(Vec<PartDims>, SemilinearSet, Vec<Rat>)> = Vec::new();
        for (cell, s) in decompose_space(n, &dim_walls) {
            if !sub_part.contains(&s) {
                continue;
            }
            let dims: Vec<PartDims> = side_profiles
                .iter()
                .enumerate()
                .map(|(mask, (meet, diff))| PartDims {
                    mask,
                    meet: profile_at(meet, &s),
                    diff: profile_at(diff, &s),
                })
                .collect();
            let piece = SemilinearSet::from_cell(cell);
            match fine.iter_mut().find(|g| g.0 == dims) {
                Some(g) => g.1 = g.1.union_(&piece),
                None => fine.push((dims, piece, s)),
            }
        }
        if fine.is_empty() {
            // The sub-part had no decomposition region of its own sample;
            // cannot happen, but keep the sub-part intact if it does.
            out.push(EssentialApproxAnn {
                part: sub_part,
                sample,
                halfflats,
                dims: Vec::new(),
            });
            continue;
        }
        for (dims, piece, s) in fine {
            out.push(EssentialApproxAnn {
                part: piece.prune(),
                sample: s,
                halfflats: halfflats.clone(),
                dims,
            });
        }
    }
    Ok(out)
}

/// Activity profile of the fiber dimension of a set over `(x, b)`: pairs of
/// a fiber dimension and the parameter region where some cell of that
/// dimension is active. The fiber dimension at `b` is the maximum over the
/// active entries.
fn dim_profile(
    m: usize,
    t: &SemilinearSet,
) -> Result<Vec<(usize, SemilinearSet)>, PipelineError> {
    let mut out: Vec<(usize, SemilinearSet)> = Vec::new();
    for (cell, _) in cells_of(t) {
        let hull = affine_hull(&cell)?;
        let xrows: Vec<Vec<Rat>> = hull.rows().iter().map(|r| r.coeffs[..m].to_vec()).collect();
        let fdim = m - crate::linalg::rank_of(&xrows);
        let active = SemilinearSet::from_cell(cell).eliminate_head(m).prune();
        match out.iter_mut().find(|(d, _)| *d == fdim) {
            Some((_, a)) => *a = a.union_(&active).prune(),
            None => out.push((fdim, active)),
        }
    }
    Ok(out)
}

fn profile_at(profile: &[(usize, SemilinearSet)], b: &[Rat]) -> Dim {
    profile
        .iter()
        .filter(|(_, a)| a.contains(b))
        .map(|(d, _)| *d)
        .max()
}

/// Witness set of a half-flat family candidate: the set of `(b, a, ε)` with
/// `b` in the parameter set, `a` on the boundary of `H_b`, `0 < ε ≤ 1`, and
/// the `ε`-cube around `a` meeting `X_b` and `H_b` identically. Projecting
/// out `(a, ε)` gives the parameters where `H_b` is an essential half-flat
/// of `X_b`. Coordinates are `(b, a, ε, x)` before the final elimination of
/// `x`; callers receive the set over `(b, a, ε)`.
pub(crate) fn witness_set(
    m: usize,
    n: usize,
    total: &SemilinearSet,
    z: &FlatFamilyAnn,
    h: &HalfFlatFamilyAnn,
    y: &SemilinearSet,
) -> Result<SemilinearSet, PipelineError> {
    let nn = n + m + 1 + m;

    // Domain: a on the boundary fiber, 0 < ε ≤ 1, b in the parameter set.
    let mut dom = BasicCell::new(n + m + 1);
    for row in z.total().rows() {
        dom.push(remap_term(row, n + m + 1, |j| if j < m { n + j } else { j - m }), Rel::Eq);
    }
    dom.push(
        remap_term(&h.cut().term, n + m + 1, |j| if j < m { n + j } else { j - m }),
        Rel::Eq,
    );
    let mut eps_pos = LinTerm::zero(n + m + 1);
    eps_pos.coeffs[n + m] = -Rat::one();
    dom.push(eps_pos, Rel::Lt);
    let mut eps_cap = LinTerm::zero(n + m + 1);
    eps_cap.coeffs[n + m] = Rat::one();
    eps_cap.constant = -Rat::one();
    dom.push(eps_cap, Rel::Le);
    let dom_set = SemilinearSet::from_cell(dom).intersect(&y.cylinder(n, m + 1));

    // Violations: some x in the ε-cube around a lies in exactly one of X_b
    // and H_b. Constraining by the domain before projecting out x keeps the
    // inconsistent violation cells from surviving into the subtraction fold.
    let sd = total.sym_diff(&h.as_total_set()).prune();
    let sd_r = remap_set(&sd, nn, |j| if j < m { n + m + 1 + j } else { j - m });
    let mut cube = BasicCell::new(nn);
    for i in 0..m {
        let mut up = LinTerm::zero(nn);
        up.coeffs[n + m + 1 + i] = Rat::one();
        up.coeffs[n + i] = -Rat::one();
        up.coeffs[n + m] = -Rat::one();
        cube.push(up, Rel::Lt);
        let mut lo = LinTerm::zero(nn);
        lo.coeffs[n + m + 1 + i] = -Rat::one();
        lo.coeffs[n + i] = Rat::one();
        lo.coeffs[n + m] = -Rat::one();
        cube.push(lo, Rel::Lt);
    }
    let bad = sd_r
        .intersect(&SemilinearSet::from_cell(cube))
        .intersect(&dom_set.cylinder(n + m + 1, m))
        .prune()
        .eliminate_tail(m)
        .prune();

    Ok(dom_set.subtract(&bad).prune())
}

/// Reindex the coordinates of every atom of a set; `map` sends old
/// positions to new ones, unmapped new positions are free.
pub(crate) fn remap_set(
    s: &SemilinearSet,
    new_dim: usize,
    map: impl Fn(usize) -> usize + Copy,
) -> SemilinearSet {
    let cells: Vec<BasicCell> = s
        .cells
        .iter()
        .map(|c| c.map_terms(new_dim, |t| remap_term(t, new_dim, map)))
        .collect();
    SemilinearSet::from_cells(new_dim, cells)
}

pub(crate) fn remap_term(
    t: &LinTerm,
    new_dim: usize,
    map: impl Fn(usize) -> usize,
) -> LinTerm {
    let mut out = LinTerm::zero(new_dim);
    out.constant = t.constant.clone();
    for (j, c) in t.coeffs.iter().enumerate() {
        if !c.is_zero() {
            out.coeffs[map(j)] = c.clone();
        }
    }
    out
}
