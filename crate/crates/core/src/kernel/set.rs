use super::cell::{BasicCell, Rel};
use super::KernelError;
use crate::linalg::LinTerm;
use crate::rat::Rat;

/// Dimension with `None` standing for -infinity (the empty set). The derived
/// `Option` ordering (`None` below every `Some`) is exactly the intended one.
pub type Dim = Option<usize>;

/// Hard pruning kicks in once a Boolean fold carries more than this many
/// cells; found adequate for every corpus family.
const PRUNE_THRESHOLD: usize = 24;

/// Subsumption trimming runs only when a fold accumulator holds between
/// these many cells: below the minimum the fold cannot blow up, above the
/// maximum the quadratic pass would cost more than it saves.
const SUBSUME_MIN: usize = 5;
const SUBSUME_MAX: usize = 48;

/// Finite union of basic cells in Q^dim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearSet {
    dim: usize,
    pub cells: Vec<BasicCell>,
}

impl SemilinearSet {
    pub fn empty(dim: usize) -> Self {
        SemilinearSet { dim, cells: vec![] }
    }

    pub fn full(dim: usize) -> Self {
        SemilinearSet {
            dim,
            cells: vec![BasicCell::new(dim)],
        }
    }

    pub fn from_cells(dim: usize, cells: Vec<BasicCell>) -> Self {
        for c in &cells {
            assert_eq!(c.dim(), dim, "cell arity must match set dim");
        }
        SemilinearSet { dim, cells }
    }

    pub fn from_cell(cell: BasicCell) -> Self {
        SemilinearSet {
            dim: cell.dim(),
            cells: vec![cell],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_point(&self, p: &[Rat]) -> Result<(), KernelError> {
        if p.len() != self.dim {
            return Err(KernelError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Exact membership by direct evaluation of every atom.
    pub fn contains(&self, p: &[Rat]) -> bool {
        self.cells.iter().any(|c| c.contains(p))
    }

    /// Exact emptiness (Fourier–Motzkin per cell).
    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|c| c.is_empty_cell())
    }

    /// Drops empty cells (exact per-cell emptiness). Not required for
    /// correctness anywhere, but keeps Boolean-operation folds small.
    pub fn prune(&self) -> SemilinearSet {
        let cells = self
            .cells
            .iter()
            .filter_map(|c| c.reduce())
            .filter(|c| !c.is_empty_cell())
            .collect();
        SemilinearSet {
            dim: self.dim,
            cells,
        }
    }

    /// Hard-prunes only once the union grows past `bound` cells; the
    /// threshold keeps complement folds from exploding while sparing small
    /// sets the per-cell emptiness cost.
    fn prune_if_large(self, bound: usize) -> SemilinearSet {
        if self.cells.len() > bound {
            self.prune()
        } else {
            self
        }
    }

    /// Drops empty cells and then every cell contained in another kept cell.
    /// Denotation-preserving, so safe anywhere; quadratic in the cell count.
    fn reduce_subsumed(&self) -> SemilinearSet {
        let cells: Vec<BasicCell> = self
            .cells
            .iter()
            .filter_map(|c| c.reduce())
            .filter(|c| !c.is_empty_cell())
            .collect();
        let mut kept = vec![true; cells.len()];
        for i in 0..cells.len() {
            if !kept[i] {
                continue;
            }
            for j in 0..cells.len() {
                if j != i && kept[j] && cell_contains(&cells[i], &cells[j]) {
                    kept[j] = false;
                }
            }
        }
        let cells = cells
            .into_iter()
            .zip(kept)
            .filter_map(|(c, keep)| keep.then_some(c))
            .collect();
        SemilinearSet {
            dim: self.dim,
            cells,
        }
    }

    /// Trim applied between subtract-fold steps. The negated-atom split
    /// leaves branches that overlap (often duplicating a whole cell), and
    /// those overlaps compound multiplicatively across the fold; dropping
    /// subsumed cells keeps the accumulator near its minimal form.
    fn trim_fold(self) -> SemilinearSet {
        let n = self.cells.len();
        if n < SUBSUME_MIN {
            self
        } else if n <= SUBSUME_MAX {
            self.reduce_subsumed()
        } else {
            self.prune()
        }
    }

    /// `self ∩ ¬cell` in one step: each own cell is split against the negated
    /// atoms of `cell`.
    fn intersect_neg_cell(&self, cell: &BasicCell) -> SemilinearSet {
        let Some(cell) = cell.reduce() else {
            return self.clone(); // cell empty: nothing to remove
        };
        if cell.atom_count() == 0 {
            return SemilinearSet::empty(self.dim); // cell is everything
        }
        let mut neg: Vec<(LinTerm, Rel)> = Vec::new();
        for atom in cell.atoms() {
            match atom.rel {
                Rel::Eq => {
                    neg.push((atom.term.clone(), Rel::Lt));
                    neg.push((atom.term.neg(), Rel::Lt));
                }
                Rel::Lt => neg.push((atom.term.neg(), Rel::Le)),
                Rel::Le => neg.push((atom.term.neg(), Rel::Lt)),
            }
        }
        let mut cells = Vec::new();
        for own in &self.cells {
            for (t, rel) in &neg {
                if let Some(c) = own.clone().with(t.clone(), *rel).reduce() {
                    cells.push(c);
                }
            }
        }
        SemilinearSet {
            dim: self.dim,
            cells,
        }
    }

    /// Projection forgetting coordinate `i`: `p` is in the result iff some
    /// value can be inserted at position `i` to land in `self`.
    pub fn eliminate(&self, i: usize) -> SemilinearSet {
        assert!(i < self.dim, "eliminate: no such coordinate");
        let cells: Vec<BasicCell> = self
            .cells
            .iter()
            .filter_map(|c| c.reduce())
            .map(|c| c.eliminate_var(i))
            .filter_map(|c| c.reduce())
            .collect();
        SemilinearSet {
            dim: self.dim - 1,
            cells,
        }
    }

    /// Projection forgetting the last `k` coordinates.
    pub fn eliminate_tail(&self, k: usize) -> SemilinearSet {
        let mut s = self.clone();
        for _ in 0..k {
            s = s.eliminate(s.dim - 1);
        }
        s
    }

    /// Projection forgetting the first `k` coordinates.
    pub fn eliminate_head(&self, k: usize) -> SemilinearSet {
        let mut s = self.clone();
        for _ in 0..k {
            s = s.eliminate(0);
        }
        s
    }

    pub fn union_(&self, other: &SemilinearSet) -> SemilinearSet {
        assert_eq!(self.dim, other.dim);
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        SemilinearSet {
            dim: self.dim,
            cells,
        }
    }

    pub fn intersect(&self, other: &SemilinearSet) -> SemilinearSet {
        assert_eq!(self.dim, other.dim);
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                if let Some(c) = a.meet(b).reduce() {
                    cells.push(c);
                }
            }
        }
        SemilinearSet {
            dim: self.dim,
            cells,
        }
        .prune_if_large(PRUNE_THRESHOLD)
    }

    pub fn complement(&self) -> SemilinearSet {
        SemilinearSet::full(self.dim).subtract(self)
    }

    pub fn subtract(&self, other: &SemilinearSet) -> SemilinearSet {
        assert_eq!(self.dim, other.dim);
        let mut acc = self.clone();
        for cell in &other.cells {
            acc = acc.intersect_neg_cell(cell).trim_fold();
            if acc.cells.is_empty() {
                break;
            }
        }
        acc
    }

    pub fn sym_diff(&self, other: &SemilinearSet) -> SemilinearSet {
        self.subtract(other).union_(&other.subtract(self))
    }

    /// Walls (canonical non-constant atom terms) of both sets, deduplicated.
    /// `None` when a joint sign decomposition would be too costly, in which
    /// case comparisons fall back to the subtract fold.
    fn joint_walls(&self, other: &SemilinearSet) -> Option<Vec<LinTerm>> {
        if self.dim == 0 {
            return None;
        }
        let mut walls: Vec<LinTerm> = Vec::new();
        for t in self.all_terms().into_iter().chain(other.all_terms()) {
            let w = t.canonical_wall();
            if !w.is_const() && !walls.contains(&w) {
                walls.push(w);
            }
        }
        let budget = match self.dim {
            1 => 512,
            2 => 96,
            3 => 40,
            _ => 0,
        };
        (walls.len() <= budget).then_some(walls)
    }

    /// Semantic inclusion. In low dimension, membership is compared on a
    /// joint sign decomposition (membership is constant on each cell);
    /// otherwise via emptiness of the difference.
    pub fn is_subset_of(&self, other: &SemilinearSet) -> bool {
        assert_eq!(self.dim, other.dim);
        if let Some(walls) = self.joint_walls(other) {
            return super::decompose::decompose_space(self.dim, &walls)
                .into_iter()
                .all(|(_, p)| !self.contains(&p) || other.contains(&p));
        }
        self.subtract(other).is_empty()
    }

    /// Semantic equality; the same two strategies as `is_subset_of`.
    pub fn set_eq(&self, other: &SemilinearSet) -> bool {
        assert_eq!(self.dim, other.dim);
        if let Some(walls) = self.joint_walls(other) {
            return super::decompose::decompose_space(self.dim, &walls)
                .into_iter()
                .all(|(_, p)| self.contains(&p) == other.contains(&p));
        }
        self.sym_diff(other).is_empty()
    }

    /// Dimension as the maximum of per-cell (promoted) dimensions.
    pub fn dimension(&self) -> Dim {
        self.cells.iter().filter_map(|c| c.cell_dim()).max()
    }

    /// Local dimension at `p`: the maximum dimension among cells whose
    /// Euclidean closure contains `p`; `None` when `p` is outside the closure.
    pub fn local_dimension(&self, p: &[Rat]) -> Dim {
        assert_eq!(p.len(), self.dim);
        self.cells
            .iter()
            .filter_map(|c| {
                let d = c.cell_dim()?; // skips empty cells
                if c.relax().contains(p) {
                    Some(d)
                } else {
                    None
                }
            })
            .max()
    }

    /// Euclidean closure: strict atoms of each nonempty cell relaxed.
    pub fn closure(&self) -> SemilinearSet {
        let cells = self
            .cells
            .iter()
            .filter(|c| !c.is_empty_cell())
            .map(|c| c.relax())
            .collect();
        SemilinearSet {
            dim: self.dim,
            cells,
        }
    }

    /// Fixes the last `vals.len()` coordinates (fibering a relation).
    pub fn substitute_tail(&self, vals: &[Rat]) -> SemilinearSet {
        let cells = self
            .cells
            .iter()
            .map(|c| c.substitute_tail(vals))
            .filter_map(|c| c.reduce())
            .collect();
        SemilinearSet {
            dim: self.dim - vals.len(),
            cells,
        }
    }

    /// Fixes the first `vals.len()` coordinates.
    pub fn substitute_head(&self, vals: &[Rat]) -> SemilinearSet {
        let cells = self
            .cells
            .iter()
            .map(|c| c.substitute_head(vals))
            .filter_map(|c| c.reduce())
            .collect();
        SemilinearSet {
            dim: self.dim - vals.len(),
            cells,
        }
    }

    /// Adds `k` unconstrained coordinates at position `at`.
    pub fn cylinder(&self, at: usize, k: usize) -> SemilinearSet {
        let cells = self.cells.iter().map(|c| c.cylinder(at, k)).collect();
        SemilinearSet {
            dim: self.dim + k,
            cells,
        }
    }

    /// Product set (self in the leading block).
    pub fn product(&self, other: &SemilinearSet) -> SemilinearSet {
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                cells.push(a.product(b));
            }
        }
        SemilinearSet {
            dim: self.dim + other.dim,
            cells,
        }
    }

    /// One rational point of the set (first nonempty cell, deterministic
    /// back-substitution). `EmptyInput` when the set is empty.
    pub fn sample_point(&self) -> Result<Vec<Rat>, KernelError> {
        for cell in &self.cells {
            if let Some(p) = super::sample::sample_cell(cell) {
                debug_assert!(self.contains(&p));
                return Ok(p);
            }
        }
        Err(KernelError::EmptyInput)
    }

    /// All atom terms of all cells (for arrangement construction).
    pub fn all_terms(&self) -> Vec<LinTerm> {
        let mut out = Vec::new();
        for c in &self.cells {
            for a in c.atoms() {
                out.push(a.term);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, rat};

    fn term(c: &[i64], k: i64) -> LinTerm {
        LinTerm::from_ints(c, k)
    }

    /// Open unit square.
    fn square() -> SemilinearSet {
        SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(term(&[-1, 0], 0), Rel::Lt)
                .with(term(&[1, 0], -1), Rel::Lt)
                .with(term(&[0, -1], 0), Rel::Lt)
                .with(term(&[0, 1], -1), Rel::Lt),
        )
    }

    #[test]
    fn membership_examples() {
        let s = square();
        assert!(s.contains(&[frac(1, 2), frac(1, 2)]));
        assert!(!s.contains(&[rat(0), frac(1, 2)]));
        assert!(!s.contains(&[rat(2), rat(2)]));
    }

    #[test]
    fn elimination_of_a_graph() {
        // y = x + 1 in R^2, eliminate y: every x qualifies.
        let s = SemilinearSet::from_cell(BasicCell::new(2).with(term(&[1, -1], 1), Rel::Eq));
        let e = s.eliminate(1);
        assert_eq!(e.dim(), 1);
        assert!(e.contains(&[rat(17)]));
        assert!(!e.is_empty());
        assert!(e.set_eq(&SemilinearSet::full(1)));
    }

    #[test]
    fn boolean_laws_on_examples() {
        let s = square();
        let c = s.complement();
        assert!(s.intersect(&c).is_empty());
        assert!(s.union_(&c).set_eq(&SemilinearSet::full(2)));
        assert!(s.sym_diff(&s).is_empty());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(SemilinearSet::empty(3).dimension(), None);
        assert_eq!(SemilinearSet::full(3).dimension(), Some(3));
        assert_eq!(square().dimension(), Some(2));
        // Diagonal described with weak inequalities only.
        let diag = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(term(&[1, -1], 0), Rel::Le)
                .with(term(&[-1, 1], 0), Rel::Le),
        );
        assert_eq!(diag.dimension(), Some(1));
    }

    #[test]
    fn local_dimension_at_cross_center() {
        // Union of the two axes in R^2.
        let cross = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2).with(term(&[1, 0], 0), Rel::Eq),
                BasicCell::new(2).with(term(&[0, 1], 0), Rel::Eq),
            ],
        );
        assert_eq!(cross.local_dimension(&[rat(0), rat(0)]), Some(1));
        assert_eq!(cross.local_dimension(&[rat(1), rat(1)]), None);
        // Point on one axis only.
        assert_eq!(cross.local_dimension(&[rat(0), rat(5)]), Some(1));
    }

    #[test]
    fn sample_point_hits_the_set() {
        let s = square();
        let p = s.sample_point().unwrap();
        assert!(s.contains(&p));
        assert!(SemilinearSet::empty(2).sample_point().is_err());
    }
}
