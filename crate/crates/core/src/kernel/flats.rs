//! Flats, half-flats, cubes, and the flat-topology operators: flat closure,
//! boundary, essential boundary, essential half-flats and essential
//! approximations.

use super::cell::{Atom, BasicCell, Rel};
use super::decompose::{cells_of, decomposed_dim};
use super::set::SemilinearSet;
use super::KernelError;
use crate::linalg::{rref_eqs, LinTerm, RrefSystem};
use crate::rat::Rat;
use num_traits::{One, Zero};

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut v = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            v += x * y;
        }
    }
    v
}

/// Affine subspace of Q^ambient, kept in canonical reduced-echelon form so
/// that two equal flats compare equal structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct Flat {
    ambient: usize,
    sys: RrefSystem,
    point: Vec<Rat>,
    basis: Vec<Vec<Rat>>,
}

impl Flat {
    pub fn from_eqs(ambient: usize, eqs: &[LinTerm]) -> Result<Flat, KernelError> {
        let sys = rref_eqs(ambient, eqs);
        if sys.inconsistent {
            return Err(KernelError::EmptyFlat);
        }
        let point = sys.particular_point().expect("consistent system");
        let basis = sys.nullspace_basis();
        Ok(Flat {
            ambient,
            sys,
            point,
            basis,
        })
    }

    pub fn full(ambient: usize) -> Flat {
        Flat::from_eqs(ambient, &[]).expect("no constraints")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn affine_dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical equality rows (each `row = 0` on the flat).
    pub fn rows(&self) -> &[LinTerm] {
        &self.sys.rows
    }

    pub fn system(&self) -> &RrefSystem {
        &self.sys
    }

    pub fn point(&self) -> &[Rat] {
        &self.point
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        self.sys.rows.iter().all(|r| r.eval(p).is_zero())
    }

    /// Whether `v` lies in the direction space.
    pub fn direction_contains(&self, v: &[Rat]) -> bool {
        self.sys.rows.iter().all(|r| dot(&r.coeffs, v).is_zero())
    }

    pub fn contains_flat(&self, other: &Flat) -> bool {
        self.contains_point(&other.point)
            && other.basis.iter().all(|v| self.direction_contains(v))
    }

    pub fn as_cell(&self) -> BasicCell {
        let mut c = BasicCell::new(self.ambient);
        for r in &self.sys.rows {
            c.push(r.clone(), Rel::Eq);
        }
        c
    }

    pub fn as_set(&self) -> SemilinearSet {
        SemilinearSet::from_cell(self.as_cell())
    }
}

/// Nonempty proper portion of a flat cut by one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfFlat {
    flat: Flat,
    cut: Atom,
}

impl HalfFlat {
    pub fn new(flat: Flat, cut: Atom) -> Result<HalfFlat, KernelError> {
        if cut.rel == Rel::Eq {
            return Err(KernelError::DegenerateHalfFlat(
                "cut must be a strict or weak inequality".into(),
            ));
        }
        if cut.term.arity() != flat.ambient() {
            return Err(KernelError::DimensionMismatch {
                expected: flat.ambient(),
                got: cut.term.arity(),
            });
        }
        let h = HalfFlat { flat, cut };
        let hs = h.as_set();
        if hs.is_empty() {
            return Err(KernelError::DegenerateHalfFlat("half-flat is empty".into()));
        }
        if h.flat.as_set().subtract(&hs).is_empty() {
            return Err(KernelError::DegenerateHalfFlat(
                "half-flat equals its ambient flat".into(),
            ));
        }
        Ok(h)
    }

    pub fn flat(&self) -> &Flat {
        &self.flat
    }

    pub fn cut(&self) -> &Atom {
        &self.cut
    }

    pub fn ambient(&self) -> usize {
        self.flat.ambient()
    }

    pub fn as_set(&self) -> SemilinearSet {
        SemilinearSet::from_cell(
            self.flat
                .as_cell()
                .with(self.cut.term.clone(), self.cut.rel),
        )
    }

    /// The boundary flat `Z ∩ {cut = 0}`; a (d-1)-flat for a valid half-flat.
    pub fn boundary_flat(&self) -> Flat {
        let mut eqs = self.flat.rows().to_vec();
        eqs.push(self.cut.term.clone());
        Flat::from_eqs(self.flat.ambient(), &eqs)
            .expect("a proper nonempty half-flat has a boundary")
    }
}

/// Open axis-aligned cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub center: Vec<Rat>,
    pub radius: Rat,
}

impl Cube {
    pub fn new(center: Vec<Rat>, radius: Rat) -> Cube {
        assert!(radius > Rat::zero(), "cube radius must be positive");
        Cube { center, radius }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn as_cell(&self) -> BasicCell {
        let n = self.dim();
        let mut c = BasicCell::new(n);
        for i in 0..n {
            let mut up = LinTerm::zero(n);
            up.coeffs[i] = Rat::one();
            up.constant = -&self.center[i] - &self.radius;
            c.push(up, Rel::Lt);
            let mut lo = LinTerm::zero(n);
            lo.coeffs[i] = -Rat::one();
            lo.constant = &self.center[i] - &self.radius;
            c.push(lo, Rel::Lt);
        }
        c
    }

    pub fn as_set(&self) -> SemilinearSet {
        SemilinearSet::from_cell(self.as_cell())
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        self.as_cell().contains(p)
    }
}

/// Smallest flat containing a nonempty cell.
pub fn affine_hull(c: &BasicCell) -> Result<Flat, KernelError> {
    let p = c.promote().ok_or(KernelError::EmptyInput)?;
    Flat::from_eqs(c.dim(), &p.eq)
}

/// Union of the Euclidean closures of the d-dimensional decomposition cells.
fn dim_closure(s: &SemilinearSet, d: usize) -> SemilinearSet {
    let cells = cells_of(s)
        .into_iter()
        .filter(|(c, _)| decomposed_dim(c) == d)
        .map(|(c, _)| c.relax())
        .collect();
    SemilinearSet::from_cells(s.dim(), cells)
}

impl SemilinearSet {
    /// Affine hulls of the cells, deduplicated and pruned of hulls contained
    /// in other hulls.
    pub fn flat_hulls(&self) -> Vec<Flat> {
        let mut hulls: Vec<Flat> = Vec::new();
        for c in &self.cells {
            let Some(p) = c.promote() else {
                continue; // empty cell
            };
            let f = Flat::from_eqs(self.dim(), &p.eq).expect("nonempty cell has a hull");
            if !hulls.iter().any(|g| g.contains_flat(&f)) {
                hulls.retain(|g| !f.contains_flat(g));
                hulls.push(f);
            }
        }
        hulls
    }

    /// Closure in the flat topology: the union of the cell hulls.
    pub fn flat_closure(&self) -> SemilinearSet {
        let mut out = SemilinearSet::empty(self.dim());
        for f in self.flat_hulls() {
            out = out.union_(&f.as_set());
        }
        out
    }

    /// The flat closure when it is a single flat.
    pub fn single_flat_closure(&self) -> Result<Flat, KernelError> {
        let mut hulls = self.flat_hulls();
        if hulls.len() == 1 {
            Ok(hulls.pop().expect("one hull"))
        } else {
            Err(KernelError::ClosureNotAFlat)
        }
    }

    /// Topological boundary of `self` within the flat `z`:
    /// `cl(S) ∩ cl(Z \ S)`.
    pub fn boundary_in_flat(&self, z: &Flat) -> Result<SemilinearSet, KernelError> {
        if !self.is_subset_of(&z.as_set()) {
            return Err(KernelError::NotASubset);
        }
        let outside = z.as_set().subtract(self);
        Ok(self.closure().intersect(&outside.closure()))
    }

    /// Essential boundary: points of `Z = fcl(self)` with full-dimensional
    /// contact on both sides. Requires the flat closure to be a single flat.
    pub fn essential_boundary(&self) -> Result<SemilinearSet, KernelError> {
        let z = self.single_flat_closure()?;
        let d = z.affine_dim();
        let inside = dim_closure(self, d);
        let outside = dim_closure(&z.as_set().subtract(self), d);
        Ok(inside.intersect(&outside))
    }

    /// Whether `h` is an essential half-flat for `self`, together with a
    /// rational witness point on success.
    ///
    /// The witness set `W = {a ∈ bd(H) : ∃ε ∈ (0,1], cube(a,ε) ∩ S = cube(a,ε) ∩ H}`
    /// is constructed symbolically over the coordinates `(a, ε, x)`: the bad
    /// region `∃x: |x−a| < ε ∧ x ∈ S Δ H` is eliminated, complemented within
    /// the domain `a ∈ bd(H), 0 < ε ≤ 1`, and ε is projected out.
    pub fn is_essential_halfflat(
        &self,
        h: &HalfFlat,
    ) -> Result<(bool, Option<Vec<Rat>>), KernelError> {
        let z = self.single_flat_closure()?;
        if z != *h.flat() {
            return Err(KernelError::ClosureMismatch);
        }
        let n = self.dim();
        // Coordinates: a at 0..n, ε at n, x at n+1..2n+1. Pruning before the
        // lift keeps the elimination and the complement fold small.
        let sym = self.sym_diff(&h.as_set()).prune().cylinder(0, n + 1);
        let mut cube = BasicCell::new(2 * n + 1);
        for i in 0..n {
            let mut up = LinTerm::zero(2 * n + 1);
            up.coeffs[n + 1 + i] = Rat::one();
            up.coeffs[i] = -Rat::one();
            up.coeffs[n] = -Rat::one();
            cube.push(up, Rel::Lt); // x_i - a_i - ε < 0
            let mut lo = LinTerm::zero(2 * n + 1);
            lo.coeffs[i] = Rat::one();
            lo.coeffs[n + 1 + i] = -Rat::one();
            lo.coeffs[n] = -Rat::one();
            cube.push(lo, Rel::Lt); // a_i - x_i - ε < 0
        }
        let bad = sym
            .intersect(&SemilinearSet::from_cell(cube))
            .eliminate_tail(n)
            .prune();
        let mut eps_bounds = BasicCell::new(n + 1);
        let mut low = LinTerm::zero(n + 1);
        low.coeffs[n] = -Rat::one();
        eps_bounds.push(low, Rel::Lt); // 0 < ε
        let mut high = LinTerm::zero(n + 1);
        high.coeffs[n] = Rat::one();
        high.constant = -Rat::one();
        eps_bounds.push(high, Rel::Le); // ε ≤ 1
        let domain = h
            .boundary_flat()
            .as_set()
            .cylinder(n, 1)
            .intersect(&SemilinearSet::from_cell(eps_bounds));
        let w = domain.subtract(&bad).eliminate(n);
        if w.is_empty() {
            Ok((false, None))
        } else {
            let d = z.affine_dim();
            assert_eq!(
                w.dimension(),
                Some(d - 1),
                "witness set of an essential half-flat has dimension d-1"
            );
            let p = w.sample_point()?;
            Ok((true, Some(p)))
        }
    }

    /// One essential half-flat per distinct boundary: the candidate
    /// boundaries are the (d-1)-flats of `fcl(esb(self))`, and for each the
    /// four half-flats (two sides, strict or weak) are tested in order.
    pub fn essential_approximation(&self) -> Result<Vec<HalfFlat>, KernelError> {
        let z = self.single_flat_closure()?;
        let d = z.affine_dim();
        let esb = self.essential_boundary()?;
        let mut out = Vec::new();
        for f in esb.flat_hulls() {
            if f.affine_dim() + 1 != d {
                continue;
            }
            let cut = f
                .rows()
                .iter()
                .map(|r| z.system().reduce_term(r))
                .find(|r| !r.is_const());
            let Some(t) = cut else {
                continue; // boundary not proper in Z; cannot happen for esb flats
            };
            let t = t.normalize();
            let candidates = [
                (t.clone(), Rel::Lt),
                (t.clone(), Rel::Le),
                (t.neg(), Rel::Lt),
                (t.neg(), Rel::Le),
            ];
            for (term, rel) in candidates {
                let Ok(h) = HalfFlat::new(z.clone(), Atom::new(term, rel)) else {
                    continue;
                };
                if self.is_essential_halfflat(&h)?.0 {
                    out.push(h);
                    break;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, rat};

    fn t(c: &[i64], k: i64) -> LinTerm {
        LinTerm::from_ints(c, k)
    }

    fn halfplane_ge(coeffs: &[i64], k: i64) -> SemilinearSet {
        // coeffs·x + k >= 0
        SemilinearSet::from_cell(BasicCell::new(coeffs.len()).with(t(coeffs, k).neg(), Rel::Le))
    }

    #[test]
    fn affine_hull_examples() {
        // {y=0, 0<x<1} -> line y=0
        let c = BasicCell::new(2)
            .with(t(&[0, 1], 0), Rel::Eq)
            .with(t(&[-1, 0], 0), Rel::Lt)
            .with(t(&[1, 0], -1), Rel::Lt);
        let f = affine_hull(&c).unwrap();
        assert_eq!(f.affine_dim(), 1);
        assert!(f.contains_point(&[rat(5), rat(0)]));
        assert!(!f.contains_point(&[rat(0), rat(1)]));
        // {x<=0, x>=0} -> line x=0 via promotion
        let c = BasicCell::new(2)
            .with(t(&[1, 0], 0), Rel::Le)
            .with(t(&[-1, 0], 0), Rel::Le);
        let f = affine_hull(&c).unwrap();
        assert_eq!(f.affine_dim(), 1);
        assert!(f.contains_point(&[rat(0), rat(-3)]));
        // empty cell
        let c = BasicCell::new(1)
            .with(t(&[1], 0), Rel::Lt)
            .with(t(&[-1], 0), Rel::Lt);
        assert_eq!(affine_hull(&c), Err(KernelError::EmptyInput));
    }

    #[test]
    fn flat_closure_examples() {
        // open segment -> its line
        let seg = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[0, 1], 0), Rel::Eq)
                .with(t(&[-1, 0], 0), Rel::Lt)
                .with(t(&[1, 0], -1), Rel::Lt),
        );
        let line = SemilinearSet::from_cell(BasicCell::new(2).with(t(&[0, 1], 0), Rel::Eq));
        assert!(seg.flat_closure().set_eq(&line));
        // dim preserved, idempotent, contains S
        let fcl = seg.flat_closure();
        assert_eq!(fcl.dimension(), seg.dimension());
        assert!(fcl.flat_closure().set_eq(&fcl));
        assert!(seg.is_subset_of(&fcl));
        // two crossing open segments -> two lines
        let seg2 = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[1, 0], 0), Rel::Eq)
                .with(t(&[0, -1], -1), Rel::Lt)
                .with(t(&[0, 1], -1), Rel::Lt),
        );
        let cross = seg.union_(&seg2);
        assert_eq!(cross.flat_hulls().len(), 2);
        // a point on a line is swallowed by the line's hull
        let pt = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[1, 0], -7), Rel::Eq)
                .with(t(&[0, 1], 0), Rel::Eq),
        );
        assert_eq!(seg.union_(&pt).flat_hulls().len(), 1);
    }

    #[test]
    fn boundary_of_halfplane_is_its_line() {
        let s = halfplane_ge(&[1, 0], 0); // x >= 0
        let z = Flat::full(2);
        let bd = s.boundary_in_flat(&z).unwrap();
        let line = SemilinearSet::from_cell(BasicCell::new(2).with(t(&[1, 0], 0), Rel::Eq));
        assert!(bd.set_eq(&line));
        // bd of S = Z is empty
        let all = SemilinearSet::full(2);
        assert!(all.boundary_in_flat(&z).unwrap().is_empty());
        // not-a-subset is rejected
        let w = Flat::from_eqs(2, &[t(&[0, 1], 0)]).unwrap();
        assert_eq!(s.boundary_in_flat(&w), Err(KernelError::NotASubset));
    }

    #[test]
    fn boundary_of_halfflat_is_its_cut_flat() {
        // H = {x = 0, y > 0} inside Z = {x = 0}
        let z = Flat::from_eqs(2, &[t(&[1, 0], 0)]).unwrap();
        let h = HalfFlat::new(z.clone(), Atom::new(t(&[0, -1], 0), Rel::Lt)).unwrap();
        let bd = h.as_set().boundary_in_flat(&z).unwrap();
        assert!(bd.set_eq(&h.boundary_flat().as_set()));
        assert_eq!(h.boundary_flat().affine_dim(), 0);
    }

    #[test]
    fn halfflat_validity_checks() {
        let z = Flat::full(2);
        // fine
        assert!(HalfFlat::new(z.clone(), Atom::new(t(&[1, 0], 0), Rel::Lt)).is_ok());
        // equality cut rejected
        assert!(HalfFlat::new(z.clone(), Atom::new(t(&[1, 0], 0), Rel::Eq)).is_err());
        // cut constant on Z rejected (empty or improper)
        assert!(HalfFlat::new(z.clone(), Atom::new(t(&[0, 0], 1), Rel::Lt)).is_err());
        assert!(HalfFlat::new(z, Atom::new(t(&[0, 0], -1), Rel::Lt)).is_err());
    }

    #[test]
    fn essential_boundary_examples() {
        // half-plane: esb = its line
        let s = halfplane_ge(&[1, 0], 0);
        let line = SemilinearSet::from_cell(BasicCell::new(2).with(t(&[1, 0], 0), Rel::Eq));
        assert!(s.essential_boundary().unwrap().set_eq(&line));
        // plane minus a point: esb empty
        let pt = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[1, 0], 0), Rel::Eq)
                .with(t(&[0, 1], 0), Rel::Eq),
        );
        let s = SemilinearSet::full(2).subtract(&pt);
        assert!(s.essential_boundary().unwrap().is_empty());
        // dimension property: if nonempty, dim = d - 1
        let q = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[-1, 0], 0), Rel::Lt)
                .with(t(&[0, -1], 0), Rel::Lt),
        );
        let esb = q.essential_boundary().unwrap();
        assert_eq!(esb.dimension(), Some(1));
        // union of closure not a flat -> error
        let two_lines = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2).with(t(&[1, 0], 0), Rel::Eq),
                BasicCell::new(2).with(t(&[0, 1], 0), Rel::Eq),
            ],
        );
        assert_eq!(
            two_lines.essential_boundary(),
            Err(KernelError::ClosureNotAFlat)
        );
    }

    /// Lattice oracle for the quadrant example: a ∈ esb(S) iff both S and its
    /// complement in Z have full local dimension at a.
    #[test]
    fn essential_boundary_matches_local_dimension_oracle() {
        let s = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[-1, 0], 0), Rel::Lt)
                .with(t(&[0, -1], 0), Rel::Lt),
        );
        let esb = s.essential_boundary().unwrap();
        let z = SemilinearSet::full(2);
        let complement = z.subtract(&s);
        for num_x in -4..=4 {
            for num_y in -4..=4 {
                let p = vec![frac(num_x, 2), frac(num_y, 2)];
                let expected =
                    s.local_dimension(&p) == Some(2) && complement.local_dimension(&p) == Some(2);
                assert_eq!(
                    esb.contains(&p),
                    expected,
                    "esb membership at {p:?} disagrees with the local-dimension oracle"
                );
            }
        }
        // expected shape: two weak rays
        let rays = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2)
                    .with(t(&[1, 0], 0), Rel::Eq)
                    .with(t(&[0, -1], 0), Rel::Le),
                BasicCell::new(2)
                    .with(t(&[0, 1], 0), Rel::Eq)
                    .with(t(&[-1, 0], 0), Rel::Le),
            ],
        );
        assert!(esb.set_eq(&rays));
    }

    #[test]
    fn essential_halfflat_on_a_line_family_member() {
        // S = {x=0, y>=0} ∪ {x=0, y=-1} in Z = {x=0}; H = the upper half-line.
        let z = Flat::from_eqs(2, &[t(&[1, 0], 0)]).unwrap();
        let s = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2)
                    .with(t(&[1, 0], 0), Rel::Eq)
                    .with(t(&[0, -1], 0), Rel::Le),
                BasicCell::new(2)
                    .with(t(&[1, 0], 0), Rel::Eq)
                    .with(t(&[0, 1], 1), Rel::Eq),
            ],
        );
        let h = HalfFlat::new(z, Atom::new(t(&[0, -1], 0), Rel::Le)).unwrap();
        let (ok, witness) = s.is_essential_halfflat(&h).unwrap();
        assert!(ok);
        // the only boundary point of H is the origin
        assert_eq!(witness.unwrap(), vec![rat(0), rat(0)]);
        // the full flat has no essential half-flat
        let full = SemilinearSet::from_cell(BasicCell::new(2).with(t(&[1, 0], 0), Rel::Eq));
        let z = Flat::from_eqs(2, &[t(&[1, 0], 0)]).unwrap();
        let h = HalfFlat::new(z, Atom::new(t(&[0, -1], 0), Rel::Le)).unwrap();
        assert_eq!(full.is_essential_halfflat(&h).unwrap(), (false, None));
    }

    #[test]
    fn essential_halfflat_quadrant_minus_point() {
        // Q = {x>0, y>0} minus the point (1,1); H = {x > 0} in Z = R^2.
        let pt = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[1, 0], -1), Rel::Eq)
                .with(t(&[0, 1], -1), Rel::Eq),
        );
        let q = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[-1, 0], 0), Rel::Lt)
                .with(t(&[0, -1], 0), Rel::Lt),
        )
        .subtract(&pt);
        let h = HalfFlat::new(Flat::full(2), Atom::new(t(&[-1, 0], 0), Rel::Lt)).unwrap();
        let (ok, witness) = q.is_essential_halfflat(&h).unwrap();
        assert!(ok);
        let w = witness.unwrap();
        // witnesses live on {x=0, y>0}
        assert!(w[0].is_zero() && w[1] > rat(0));
        // the closed version {x >= 0} is not essential for Q
        let h = HalfFlat::new(Flat::full(2), Atom::new(t(&[-1, 0], 0), Rel::Le)).unwrap();
        assert!(!q.is_essential_halfflat(&h).unwrap().0);
    }

    #[test]
    fn essential_approximation_examples() {
        // half-plane -> exactly one half-flat with boundary x=0
        let s = halfplane_ge(&[1, 0], 0);
        let ea = s.essential_approximation().unwrap();
        assert_eq!(ea.len(), 1);
        let bd = ea[0].boundary_flat();
        assert!(bd.contains_point(&[rat(0), rat(9)]));
        assert_eq!(bd.affine_dim(), 1);
        // a flat has an empty approximation
        let flat = SemilinearSet::from_cell(BasicCell::new(2).with(t(&[0, 1], 0), Rel::Eq));
        assert!(flat.essential_approximation().unwrap().is_empty());
        // open quadrant -> two half-flats, the open sides
        let q = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[-1, 0], 0), Rel::Lt)
                .with(t(&[0, -1], 0), Rel::Lt),
        );
        let ea = q.essential_approximation().unwrap();
        assert_eq!(ea.len(), 2);
        for h in &ea {
            assert_eq!(h.cut().rel, Rel::Lt);
            assert!(q.is_subset_of(&h.as_set()));
        }
    }

    #[test]
    fn esb_is_contained_in_bd() {
        let s = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t(&[-1, 0], 0), Rel::Lt)
                .with(t(&[0, -1], 0), Rel::Le),
        );
        let esb = s.essential_boundary().unwrap();
        let bd = s.boundary_in_flat(&Flat::full(2)).unwrap();
        assert!(esb.is_subset_of(&bd));
    }
}
