//! Uniform-closure synthesis.
//!
//! For one component `X` of a parametric family the synthesizer partitions
//! the parameter set into finitely many semilinear parts and, on each part,
//! produces the tuple of flat families whose fibers give the flat closure of
//! every fiber of `X`: `fcl(X_b) = Z_1(b) ∪ … ∪ Z_ℓ(b)` for all `b` in the
//! part. The construction decomposes the total member-of relation into
//! relatively open cells; each cell contributes its affine hull as a
//! candidate flat family, active exactly on the parameters where the cell
//! has a nonempty fiber, and parts are the regions where the activity
//! pattern is constant.

use super::PipelineError;
use crate::families::ParamFamily;
use crate::kernel::{affine_hull, cells_of, decompose_space, Flat, SemilinearSet};
use crate::linalg::{rank_of, LinTerm};
use crate::rat::Rat;

/// Cap on decomposition cells examined by one synthesizer call.
pub const SYNTH_CELL_BUDGET: usize = 1 << 12;

/// A family of parallel flat fibers `Z_b = {x : R(x, b) = 0}`, stored as one
/// flat in the product space with coordinates `(x, b)`. Wherever a fiber is
/// nonempty it has the same dimension, recorded in `fiber_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatFamilyAnn {
    member_dim: usize,
    param_dim: usize,
    total: Flat,
    fiber_dim: usize,
}

impl FlatFamilyAnn {
    pub fn new(
        member_dim: usize,
        param_dim: usize,
        total: Flat,
    ) -> Result<FlatFamilyAnn, PipelineError> {
        if total.ambient() != member_dim + param_dim {
            return Err(PipelineError::AnnotationInvalid(format!(
                "flat family lives in dimension {}, want {} + {}",
                total.ambient(),
                member_dim,
                param_dim
            )));
        }
        let fiber_dim = member_dim - member_rank(member_dim, total.rows());
        Ok(FlatFamilyAnn {
            member_dim,
            param_dim,
            total,
            fiber_dim,
        })
    }

    pub fn member_dim(&self) -> usize {
        self.member_dim
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn total(&self) -> &Flat {
        &self.total
    }

    /// Dimension of every nonempty fiber.
    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    /// The graph `{(x, b) : x ∈ Z_b}` as a semilinear set.
    pub fn as_total_set(&self) -> SemilinearSet {
        self.total.as_set()
    }

    /// Parameters whose fiber is nonempty.
    pub fn consistency_set(&self) -> SemilinearSet {
        self.total.as_set().eliminate_head(self.member_dim)
    }

    /// The fiber over a concrete parameter point, `None` when empty.
    pub fn fiber_flat(&self, b: &[Rat]) -> Option<Flat> {
        assert_eq!(b.len(), self.param_dim, "parameter arity mismatch");
        let rows: Vec<LinTerm> = self
            .total
            .rows()
            .iter()
            .map(|r| r.substitute_tail(b))
            .collect();
        Flat::from_eqs(self.member_dim, &rows).ok()
    }
}

/// One part of a uniform closure: on `part` the flat closure of every fiber
/// is the union of the listed flat-family fibers, all of them nonempty,
/// pairwise incomparable, with weakly decreasing fiber dimensions. An empty
/// `flats` list means every fiber of the component is empty on the part.
#[derive(Debug, Clone)]
pub struct UniformClosureAnn {
    pub part: SemilinearSet,
    pub sample: Vec<Rat>,
    pub flats: Vec<FlatFamilyAnn>,
}

impl UniformClosureAnn {
    /// Number of flat families (the closure length `ℓ`).
    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// Largest fiber dimension, `None` when all fibers are empty.
    pub fn fiber_dim(&self) -> Option<usize> {
        self.flats.first().map(|z| z.fiber_dim())
    }
}

/// Rank of the member-coordinate part of a row system.
fn member_rank(member_dim: usize, rows: &[LinTerm]) -> usize {
    let xrows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.coeffs[..member_dim].to_vec())
        .collect();
    rank_of(&xrows)
}

/// Synthesize the uniform closure of component `label`: a partition of the
/// parameter set together with the closure flat families on each part.
pub fn synth_uniform_closure(
    f: &ParamFamily,
    label: &str,
) -> Result<Vec<UniformClosureAnn>, PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    closure_parts(m, f.param_dim(), f.relation(pos), f.param_set(), SYNTH_CELL_BUDGET)
}

/// Worker shared with the uniformity check and the reduction driver: `x` is
/// a member-of relation over `(x, b)` and `y` the parameter set.
pub(crate) fn closure_parts(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
    cell_budget: usize,
) -> Result<Vec<UniformClosureAnn>, PipelineError> {
    let total = x.intersect(&y.cylinder(0, m)).prune();

    // Candidate flat families: affine hulls of the relatively open cells of
    // the total relation, each active where its cell has a nonempty fiber.
    struct Cand {
        flat: Flat,
        fiber_dim: usize,
        active: SemilinearSet,
    }
    let cells = cells_of(&total);
    if cells.len() > cell_budget {
        return Err(PipelineError::BudgetExceeded(format!(
            "closure synthesis saw {} cells (budget {})",
            cells.len(),
            cell_budget
        )));
    }
    let mut cands: Vec<Cand> = Vec::new();
    for (cell, _) in &cells {
        let flat = affine_hull(cell)?;
        let active = SemilinearSet::from_cell(cell.clone())
            .eliminate_head(m)
            .prune();
        match cands.iter_mut().find(|c| c.flat == flat) {
            Some(c) => c.active = c.active.union_(&active).prune(),
            None => {
                let fiber_dim = m - member_rank(m, flat.rows());
                cands.push(Cand {
                    flat,
                    fiber_dim,
                    active,
                });
            }
        }
    }

    // Parts: parameter regions on which the set of active candidates is
    // constant. Including the walls of `y` keeps membership in `y` constant
    // per region.
    let mut walls: Vec<LinTerm> = Vec::new();
    for c in &cands {
        walls.extend(c.active.all_terms());
    }
    walls.extend(y.all_terms());
    let regions = decompose_space(n, &walls);
    if regions.len() > cell_budget {
        return Err(PipelineError::BudgetExceeded(format!(
            "closure synthesis saw {} parameter regions (budget {})",
            regions.len(),
            cell_budget
        )));
    }

    let mut groups: Vec<(Vec<bool>, SemilinearSet, Vec<Rat>)> = Vec::new();
    for (cell, sample) in regions {
        if !y.contains(&sample) {
            continue;
        }
        let pat: Vec<bool> = cands.iter().map(|c| c.active.contains(&sample)).collect();
        let piece = SemilinearSet::from_cell(cell);
        match groups.iter_mut().find(|g| g.0 == pat) {
            Some(g) => g.1 = g.1.union_(&piece),
            None => groups.push((pat, piece, sample)),
        }
    }

    let mut out = Vec::new();
    for (pat, part, sample) in groups {
        let part = part.prune();
        let active: Vec<&Cand> = cands
            .iter()
            .zip(&pat)
            .filter(|(_, on)| **on)
            .map(|(c, _)| c)
            .collect();

        // Drop families whose fibers are covered by another active family
        // throughout the part; on ties keep the earlier one.
        let lifted = part.cylinder(0, m);
        let mut covered = vec![vec![false; active.len()]; active.len()];
        for i in 0..active.len() {
            for j in 0..active.len() {
                if i != j {
                    covered[i][j] = active[i]
                        .flat
                        .as_set()
                        .intersect(&lifted)
                        .subtract(&active[j].flat.as_set())
                        .is_empty();
                }
            }
        }
        let mut keep = vec![true; active.len()];
        for i in 0..active.len() {
            for j in 0..active.len() {
                if i != j && covered[i][j] && (!covered[j][i] || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut flats: Vec<FlatFamilyAnn> = Vec::new();
        for (i, c) in active.iter().enumerate() {
            if keep[i] {
                flats.push(FlatFamilyAnn {
                    member_dim: m,
                    param_dim: n,
                    total: c.flat.clone(),
                    fiber_dim: c.fiber_dim,
                });
            }
        }
        flats.sort_by(|a, b| b.fiber_dim.cmp(&a.fiber_dim));
        out.push(UniformClosureAnn {
            part,
            sample,
            flats,
        });
    }
    Ok(out)
}

/// Check a closure annotation against the family at one parameter point:
/// the union of the fiber flats must equal the flat closure of the fiber.
pub fn verify_closure_at(
    f: &ParamFamily,
    label: &str,
    ann: &UniformClosureAnn,
    b: &[Rat],
) -> Result<bool, PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    if !ann.part.contains(b) {
        return Ok(false);
    }
    let fiber = f.relation(pos).substitute_tail(b);
    let closure = fiber.flat_closure();
    let mut union = SemilinearSet::empty(m);
    for z in &ann.flats {
        match z.fiber_flat(b) {
            Some(fl) => union = union.union_(&fl.as_set()),
            None => return Ok(false),
        }
    }
    Ok(closure.set_eq(&union))
}
