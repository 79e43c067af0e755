use crate::linalg::{rref_eqs, LinTerm};
use crate::rat::Rat;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Relation of an atom `term REL 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rel {
    Eq,
    Lt,
    Le,
}

/// A single constraint `term REL 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub term: LinTerm,
    pub rel: Rel,
}

impl Atom {
    pub fn new(term: LinTerm, rel: Rel) -> Self {
        Atom { term, rel }
    }

    pub fn holds_at(&self, p: &[Rat]) -> bool {
        let v = self.term.eval(p);
        match self.rel {
            Rel::Eq => v.is_zero(),
            Rel::Lt => v.is_negative(),
            Rel::Le => !v.is_positive(),
        }
    }
}

/// Conjunction of affine constraints over Q^dim: `eq = 0`, `lt < 0`, `le <= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicCell {
    dim: usize,
    pub eq: Vec<LinTerm>,
    pub lt: Vec<LinTerm>,
    pub le: Vec<LinTerm>,
}

impl BasicCell {
    pub fn new(dim: usize) -> Self {
        BasicCell {
            dim,
            eq: Vec::new(),
            lt: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn push(&mut self, term: LinTerm, rel: Rel) {
        assert_eq!(term.arity(), self.dim, "atom arity must match cell dim");
        match rel {
            Rel::Eq => self.eq.push(term),
            Rel::Lt => self.lt.push(term),
            Rel::Le => self.le.push(term),
        }
    }

    pub fn with(mut self, term: LinTerm, rel: Rel) -> Self {
        self.push(term, rel);
        self
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.eq
            .iter()
            .map(|t| Atom::new(t.clone(), Rel::Eq))
            .chain(self.lt.iter().map(|t| Atom::new(t.clone(), Rel::Lt)))
            .chain(self.le.iter().map(|t| Atom::new(t.clone(), Rel::Le)))
    }

    pub fn atom_count(&self) -> usize {
        self.eq.len() + self.lt.len() + self.le.len()
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        assert_eq!(p.len(), self.dim);
        self.eq.iter().all(|t| t.eval(p).is_zero())
            && self.lt.iter().all(|t| t.eval(p).is_negative())
            && self.le.iter().all(|t| !t.eval(p).is_positive())
    }

    /// Normalizes atoms, resolves ground (constant) atoms and deduplicates.
    /// Returns `None` when a ground atom is violated, i.e. the cell is
    /// syntactically empty.
    pub fn reduce(&self) -> Option<BasicCell> {
        let mut out = BasicCell::new(self.dim);
        let mut seen: std::collections::HashSet<(Vec<Rat>, Rat, Rel)> =
            std::collections::HashSet::new();
        let mut push = |out: &mut BasicCell, t: LinTerm, rel: Rel| -> bool {
            if t.is_const() {
                return match rel {
                    Rel::Eq => t.constant.is_zero(),
                    Rel::Lt => t.constant.is_negative(),
                    Rel::Le => !t.constant.is_positive(),
                };
            }
            let n = t.normalize();
            if seen.insert((n.coeffs.clone(), n.constant.clone(), rel)) {
                out.push(n, rel);
            }
            true
        };
        for t in &self.eq {
            if !push(&mut out, t.clone(), Rel::Eq) {
                return None;
            }
        }
        for t in &self.lt {
            if !push(&mut out, t.clone(), Rel::Lt) {
                return None;
            }
        }
        for t in &self.le {
            if !push(&mut out, t.clone(), Rel::Le) {
                return None;
            }
        }
        Some(out)
    }

    /// Strict atoms relaxed to weak ones. For a nonempty cell this is exactly
    /// the Euclidean closure (segment-density argument for convex cells).
    pub fn relax(&self) -> BasicCell {
        let mut c = self.clone();
        c.le.extend(c.lt.drain(..));
        c
    }

    /// Eliminates coordinate `i`: equality substitution when possible,
    /// otherwise one Fourier–Motzkin step. The result has arity `dim - 1` and
    /// its solution set is the projection of this cell.
    pub fn eliminate_var(&self, i: usize) -> BasicCell {
        assert!(i < self.dim);
        if let Some(pos) = self.eq.iter().position(|t| !t.coeffs[i].is_zero()) {
            let piv = &self.eq[pos];
            let inv = -(Rat::from_integer(1.into()) / piv.coeffs[i].clone());
            let mut expr = piv.scale(&inv);
            expr.coeffs[i] = Rat::zero();
            let mut out = BasicCell::new(self.dim - 1);
            for (k, t) in self.eq.iter().enumerate() {
                if k != pos {
                    out.eq.push(t.substitute_var(i, &expr));
                }
            }
            for t in &self.lt {
                out.lt.push(t.substitute_var(i, &expr));
            }
            for t in &self.le {
                out.le.push(t.substitute_var(i, &expr));
            }
            return out;
        }
        let mut out = BasicCell::new(self.dim - 1);
        let mut lowers: Vec<(LinTerm, bool)> = Vec::new(); // (term, strict)
        let mut uppers: Vec<(LinTerm, bool)> = Vec::new();
        let mut visit = |t: &LinTerm, strict: bool, out: &mut BasicCell| {
            let c = &t.coeffs[i];
            if c.is_zero() {
                let dropped = t.drop_var(i);
                if strict {
                    out.lt.push(dropped);
                } else {
                    out.le.push(dropped);
                }
            } else if c.is_positive() {
                uppers.push((t.clone(), strict));
            } else {
                lowers.push((t.clone(), strict));
            }
        };
        for t in &self.eq {
            out.eq.push(t.drop_var(i)); // coefficient is zero here
        }
        for t in &self.lt {
            visit(t, true, &mut out);
        }
        for t in &self.le {
            visit(t, false, &mut out);
        }
        for (lo, lo_strict) in &lowers {
            for (up, up_strict) in &uppers {
                // lo has c_i < 0, up has c_i > 0; positive combination kills x_i.
                let a = up.coeffs[i].clone(); // > 0
                let b = -lo.coeffs[i].clone(); // > 0
                let mut combined = lo.scale(&a).add(&up.scale(&b));
                combined.coeffs[i] = Rat::zero();
                let combined = combined.drop_var(i).normalize();
                if *lo_strict || *up_strict {
                    out.lt.push(combined);
                } else {
                    out.le.push(combined);
                }
            }
        }
        out
    }

    /// Exact emptiness via elimination down to ground atoms.
    pub fn is_empty_cell(&self) -> bool {
        let Some(mut c) = self.reduce() else {
            return true;
        };
        while c.dim > 0 {
            // Prefer equality substitution; otherwise eliminate the variable
            // with the fewest lower*upper pairings to limit blowup.
            let var = if let Some(t) = c.eq.first() {
                t.coeffs.iter().position(|x| !x.is_zero())
            } else {
                let mut best: Option<(usize, usize)> = None;
                for i in 0..c.dim {
                    let mut lows = 0usize;
                    let mut ups = 0usize;
                    let mut occurs = false;
                    for t in c.lt.iter().chain(&c.le) {
                        let cf = &t.coeffs[i];
                        if cf.is_positive() {
                            ups += 1;
                            occurs = true;
                        } else if cf.is_negative() {
                            lows += 1;
                            occurs = true;
                        }
                    }
                    if occurs {
                        let cost = lows * ups;
                        if best.map_or(true, |(_, bc)| cost < bc) {
                            best = Some((i, cost));
                        }
                    }
                }
                best.map(|(i, _)| i)
            };
            let Some(i) = var else {
                // No variable occurs in any atom; remaining constraints are
                // ground and `reduce` already validated them.
                return false;
            };
            let next = c.eliminate_var(i);
            match next.reduce() {
                Some(r) => c = r,
                None => return true,
            }
        }
        false
    }

    /// Promotes weak inequalities that admit no strict solution inside the
    /// cell to equalities, iterating to a fixpoint. Returns `None` when the
    /// cell is empty. The resulting cell describes the same set and its
    /// equality part spans the affine hull.
    pub fn promote(&self) -> Option<BasicCell> {
        let mut c = self.reduce()?;
        if c.is_empty_cell() {
            return None;
        }
        loop {
            let mut promoted = None;
            for idx in 0..c.le.len() {
                let mut probe = c.clone();
                let t = probe.le.remove(idx);
                probe.lt.push(t.clone());
                if probe.is_empty_cell() {
                    promoted = Some(idx);
                    break;
                }
            }
            match promoted {
                Some(idx) => {
                    let t = c.le.remove(idx);
                    c.eq.push(t);
                    c = c.reduce().expect("promotion preserves nonemptiness");
                }
                None => break,
            }
        }
        Some(c)
    }

    /// Dimension of the cell (None for empty): ambient dim minus the rank of
    /// the promoted equality system.
    pub fn cell_dim(&self) -> Option<usize> {
        let p = self.promote()?;
        Some(self.dim - rref_eqs(self.dim, &p.eq).rank())
    }

    /// Fixes the last `vals.len()` coordinates.
    pub fn substitute_tail(&self, vals: &[Rat]) -> BasicCell {
        let mut out = BasicCell::new(self.dim - vals.len());
        for t in &self.eq {
            out.eq.push(t.substitute_tail(vals));
        }
        for t in &self.lt {
            out.lt.push(t.substitute_tail(vals));
        }
        for t in &self.le {
            out.le.push(t.substitute_tail(vals));
        }
        out
    }

    /// Fixes the first `vals.len()` coordinates.
    pub fn substitute_head(&self, vals: &[Rat]) -> BasicCell {
        let mut out = BasicCell::new(self.dim - vals.len());
        for t in &self.eq {
            out.eq.push(t.substitute_head(vals));
        }
        for t in &self.lt {
            out.lt.push(t.substitute_head(vals));
        }
        for t in &self.le {
            out.le.push(t.substitute_head(vals));
        }
        out
    }

    /// Adds `k` unconstrained coordinates at position `at`.
    pub fn cylinder(&self, at: usize, k: usize) -> BasicCell {
        let mut out = BasicCell::new(self.dim + k);
        for t in &self.eq {
            out.eq.push(t.insert_vars(at, k));
        }
        for t in &self.lt {
            out.lt.push(t.insert_vars(at, k));
        }
        for t in &self.le {
            out.le.push(t.insert_vars(at, k));
        }
        out
    }

    /// Conjunction of two cells over the product space (self first).
    pub fn product(&self, other: &BasicCell) -> BasicCell {
        let mut out = self.cylinder(self.dim, other.dim);
        let lifted = other.cylinder(0, self.dim);
        out.eq.extend(lifted.eq);
        out.lt.extend(lifted.lt);
        out.le.extend(lifted.le);
        out
    }

    /// Applies `f` to every atom term. `f` must produce terms of arity
    /// `new_dim`.
    pub fn map_terms(&self, new_dim: usize, f: impl Fn(&LinTerm) -> LinTerm) -> BasicCell {
        let mut out = BasicCell::new(new_dim);
        for t in &self.eq {
            out.push(f(t), Rel::Eq);
        }
        for t in &self.lt {
            out.push(f(t), Rel::Lt);
        }
        for t in &self.le {
            out.push(f(t), Rel::Le);
        }
        out
    }

    /// Conjunction of two cells over the same space.
    pub fn meet(&self, other: &BasicCell) -> BasicCell {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        out.eq.extend(other.eq.iter().cloned());
        out.lt.extend(other.lt.iter().cloned());
        out.le.extend(other.le.iter().cloned());
        out
    }
}
