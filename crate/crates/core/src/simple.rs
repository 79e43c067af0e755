//! Simple families (points and half-lines), the critical relation
//! `E_{J,J′}`, grid extremal counts `δ_E`, dependence reduction of pieces,
//! and the integer exponent `s` with `π(t) = Θ(t^s)`.

use crate::families::{CompositeSpace, FamilyError, ParamFamily};
use crate::kernel::{
    affine_hull, cells_of, BasicCell, Flat, KernelError, Rel, SemilinearSet,
};
use crate::linalg::{rank_of, rref_eqs, LinTerm};
use crate::rat::{rat, Rat};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimpleError {
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("bad kind: {0}")]
    BadKind(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    Points,
    HalfLines,
}

/// One index of a simple family: `m_i` affine polynomials over the `n`
/// parameters. A Points member is the single point `(f_1(b),…,f_m(b))`;
/// a HalfLines member is `{(f_1(b),…,f_{m−1}(b), y) : y ≥ f_m(b)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleIndex {
    pub label: String,
    pub kind: IndexKind,
    pub polys: Vec<LinTerm>,
}

impl SimpleIndex {
    /// Dimension of the member space `R^{m_i}`.
    pub fn member_dim(&self) -> usize {
        self.polys.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFamily {
    pub param_dim: usize,
    pub indices: Vec<SimpleIndex>,
}

impl SimpleFamily {
    pub fn new(param_dim: usize, indices: Vec<SimpleIndex>) -> SimpleFamily {
        for ix in &indices {
            assert!(!ix.polys.is_empty(), "index needs at least one polynomial");
            for p in &ix.polys {
                assert_eq!(p.arity(), param_dim, "polynomial arity must be n");
            }
        }
        SimpleFamily { param_dim, indices }
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.indices.iter().position(|i| i.label == label)
    }
}

/// Bridges a simple family to the general parameterized-family machinery.
/// The relation of a Points index is the graph of `b ↦ (f_1(b),…,f_m(b))`;
/// a HalfLines index additionally frees the last member coordinate above
/// `f_m(b)`.
pub fn as_param_family(s: &SimpleFamily) -> ParamFamily {
    let n = s.param_dim;
    let mut relations = Vec::new();
    let mut parts: Vec<(String, usize)> = Vec::new();
    for ix in &s.indices {
        let m = ix.member_dim();
        let total = m + n;
        let mut cell = BasicCell::new(total);
        for (c, f) in ix.polys.iter().enumerate() {
            let lifted = f.insert_vars(0, m);
            let xc = LinTerm::var(total, c);
            match (ix.kind, c + 1 == m) {
                (IndexKind::HalfLines, true) => {
                    // f_m(b) − x_m ≤ 0
                    cell.push(lifted.sub(&xc), Rel::Le);
                }
                _ => cell.push(lifted.sub(&xc), Rel::Eq),
            }
        }
        relations.push(SemilinearSet::from_cell(cell));
        parts.push((ix.label.clone(), m));
    }
    let space = CompositeSpace::new(
        &parts
            .iter()
            .map(|(l, d)| (l.as_str(), *d))
            .collect::<Vec<_>>(),
    );
    ParamFamily::new(space, n, SemilinearSet::full(n), relations)
        .expect("simple families are always well-formed")
}

/// The critical relation `E_{J,J′} ⊆ U_{J,J′}` of a simple family.
/// Coordinates of `U_{J,J′}` are the blocks of the indices of `J` in index
/// order (width `m_i` for `i ∈ J′`, width `m_i − 1` otherwise); the paper's
/// `J′-first` product order differs only by a coordinate permutation, which
/// affects none of the derived quantities.
#[derive(Debug, Clone)]
pub struct CriticalRelation {
    pub j: Vec<String>,
    pub j_prime: Vec<String>,
    /// index positions behind `j`, ascending
    pub positions: Vec<usize>,
    /// coordinate block widths per element of `j`
    pub blocks: Vec<usize>,
    /// the eliminated form over `U_{J,J′}`
    pub relation: SemilinearSet,
    /// the set of `(x̄, α, b)` satisfying the pre-elimination definition
    pub provenance_set: SemilinearSet,
    /// human-readable rendering of the ∃α∃b definition
    pub provenance: String,
}

impl CriticalRelation {
    pub fn grid_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// A critical witness `(α, b)` for a point of `E`, extracted from the
    /// provenance set by exact sampling. `None` when `x̄ ∉ E`.
    pub fn witness(&self, x: &[Rat]) -> Option<(Rat, Vec<Rat>)> {
        let fiber = self.provenance_set.substitute_head(x);
        let p = fiber.sample_point().ok()?;
        Some((p[0].clone(), p[1..].to_vec()))
    }

    pub fn delta_on_grid(&self, w: &GridSpec) -> Result<usize, SimpleError> {
        delta_on_grid(&self.relation, &self.blocks, w)
    }

    pub fn delta_search(
        &self,
        t: usize,
        strategies: &[DeltaStrategy],
        seed: u64,
    ) -> Result<(usize, GridSpec), SimpleError> {
        let (count, mut w) = delta_search(&self.relation, &self.blocks, t, strategies, seed)?;
        w.j = self.j.clone();
        w.j_prime = self.j_prime.clone();
        Ok((count, w))
    }
}

/// Builds `E_{J,J′}` per the critical-parameter definition: conjunction over
/// `i ∈ J` of (a) the probe point of `P(x̄,α)` lying on the member, and (b)
/// the member's defining tuple `(f_{i,1}(b),…,f_{i,m_i}(b))` belonging to
/// `P(x̄,α)` exactly when `i ∈ J′` (the "only if" for a half-line index
/// outside `J′` becomes a disequality, expanded as a union of strict
/// branches). The parameters `b` and then `α` are eliminated exactly.
pub fn build_critical_relation(
    s: &SimpleFamily,
    j_labels: &[&str],
    j_prime_labels: &[&str],
) -> Result<CriticalRelation, SimpleError> {
    let mut positions: Vec<usize> = Vec::new();
    for l in j_labels {
        let p = s
            .position(l)
            .ok_or_else(|| SimpleError::ArityMismatch(format!("unknown index '{l}'")))?;
        positions.push(p);
    }
    positions.sort();
    positions.dedup();
    let mut prime_positions: Vec<usize> = Vec::new();
    for l in j_prime_labels {
        let p = s
            .position(l)
            .ok_or_else(|| SimpleError::ArityMismatch(format!("unknown index '{l}'")))?;
        if !positions.contains(&p) {
            return Err(SimpleError::ArityMismatch(format!(
                "index '{l}' of J′ is not in J"
            )));
        }
        prime_positions.push(p);
    }
    prime_positions.sort();
    prime_positions.dedup();

    let blocks: Vec<usize> = positions
        .iter()
        .map(|&p| {
            let m = s.indices[p].member_dim();
            if prime_positions.contains(&p) {
                m
            } else {
                m - 1
            }
        })
        .collect();
    let du: usize = blocks.iter().sum();
    let n = s.param_dim;
    let total = du + 1 + n; // x̄, then α, then b
    let alpha = LinTerm::var(total, du);

    let mut pre = SemilinearSet::full(total);
    let mut rendered: Vec<String> = Vec::new();
    let mut offset = 0usize;
    for (k, &p) in positions.iter().enumerate() {
        let ix = &s.indices[p];
        let m = ix.member_dim();
        let in_prime = prime_positions.contains(&p);
        let lift = |f: &LinTerm| f.insert_vars(0, du + 1);
        let constraint = if in_prime {
            // the defining tuple equals x_i (this also puts x_i on the member)
            let mut cell = BasicCell::new(total);
            for (c, f) in ix.polys.iter().enumerate() {
                cell.push(lift(f).sub(&LinTerm::var(total, offset + c)), Rel::Eq);
            }
            rendered.push(format!("[{}] f(b) = x_{}", ix.label, k + 1));
            SemilinearSet::from_cell(cell)
        } else {
            // probe point (x_i, α): target of coordinate c of the defining
            // tuple is x_{i,c} below the last coordinate and α at it
            let target = |c: usize| {
                if c + 1 == m {
                    alpha.clone()
                } else {
                    LinTerm::var(total, offset + c)
                }
            };
            match ix.kind {
                IndexKind::Points => {
                    // (a) forces the tuple onto the probe point while (b)
                    // forbids it: the union of disequality branches is empty
                    let mut eqs = BasicCell::new(total);
                    for (c, f) in ix.polys.iter().enumerate() {
                        eqs.push(lift(f).sub(&target(c)), Rel::Eq);
                    }
                    let mut cells = Vec::new();
                    for (c, f) in ix.polys.iter().enumerate() {
                        let d = lift(f).sub(&target(c));
                        cells.push(eqs.clone().with(d.clone(), Rel::Lt));
                        cells.push(eqs.clone().with(d.neg(), Rel::Lt));
                    }
                    rendered.push(format!(
                        "[{}] f(b) = (x_{}, α) and f(b) ∉ P  (unsatisfiable)",
                        ix.label,
                        k + 1
                    ));
                    SemilinearSet::from_cells(total, cells)
                }
                IndexKind::HalfLines => {
                    // (a): first m−1 coordinates pinned, f_m(b) ≤ α;
                    // (b): endpoint ≠ (x_i, α), branched over < and >
                    let mut eqs = BasicCell::new(total);
                    for (c, f) in ix.polys.iter().enumerate().take(m - 1) {
                        eqs.push(lift(f).sub(&target(c)), Rel::Eq);
                    }
                    let last = lift(&ix.polys[m - 1]).sub(&alpha);
                    let below = eqs.clone().with(last.clone(), Rel::Lt);
                    let above = eqs
                        .clone()
                        .with(last.clone(), Rel::Le)
                        .with(last.neg(), Rel::Lt);
                    rendered.push(format!(
                        "[{}] f_(<m)(b) = x_{} and f_m(b) ≤ α and f_m(b) ≠ α",
                        ix.label,
                        k + 1
                    ));
                    SemilinearSet::from_cells(total, vec![below, above])
                }
            }
        };
        pre = pre.intersect(&constraint).prune();
        offset += blocks[k];
    }

    let relation = pre.eliminate_tail(n).eliminate_tail(1).prune();
    let j: Vec<String> = positions
        .iter()
        .map(|&p| s.indices[p].label.clone())
        .collect();
    let j_prime: Vec<String> = prime_positions
        .iter()
        .map(|&p| s.indices[p].label.clone())
        .collect();
    let provenance = format!(
        "∃α ∃b ∈ R^{}: {}",
        n,
        if rendered.is_empty() {
            "true".to_string()
        } else {
            rendered.join(" and ")
        }
    );
    Ok(CriticalRelation {
        j,
        j_prime,
        positions,
        blocks,
        relation,
        provenance_set: pre,
        provenance,
    })
}

/// A sub-grid: per element of `J` a finite list of tuples, full-width for
/// `J′` indices and one coordinate short for the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub j: Vec<String>,
    pub j_prime: Vec<String>,
    pub parts: Vec<Vec<Vec<Rat>>>,
}

impl GridSpec {
    pub fn t(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }
}

/// Exact `|E ∩ W|`: enumerates the cartesian product of the parts and tests
/// membership. Duplicate tuples within a part are counted once.
pub fn delta_on_grid(
    e: &SemilinearSet,
    blocks: &[usize],
    w: &GridSpec,
) -> Result<usize, SimpleError> {
    if w.parts.len() != blocks.len() {
        return Err(SimpleError::ArityMismatch(format!(
            "{} grid parts for {} blocks",
            w.parts.len(),
            blocks.len()
        )));
    }
    let mut parts: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(blocks.len());
    for (k, part) in w.parts.iter().enumerate() {
        let mut seen: Vec<Vec<Rat>> = Vec::new();
        for tuple in part {
            if tuple.len() != blocks[k] {
                return Err(SimpleError::ArityMismatch(format!(
                    "tuple of width {} in block of width {}",
                    tuple.len(),
                    blocks[k]
                )));
            }
            if !seen.contains(tuple) {
                seen.push(tuple.clone());
            }
        }
        parts.push(seen);
    }
    if parts.iter().any(|p| p.is_empty()) {
        return Ok(0);
    }
    let mut count = 0usize;
    let mut odo = vec![0usize; parts.len()];
    loop {
        let point: Vec<Rat> = odo
            .iter()
            .enumerate()
            .flat_map(|(k, &i)| parts[k][i].iter().cloned())
            .collect();
        if e.contains(&point) {
            count += 1;
        }
        let mut k = parts.len();
        loop {
            if k == 0 {
                return Ok(count);
            }
            k -= 1;
            odo[k] += 1;
            if odo[k] < parts[k].len() {
                break;
            }
            odo[k] = 0;
            if k == 0 {
                return Ok(count);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaStrategy {
    /// Per piece of `E`, a grid along per-block directions inside the piece
    /// (base point = the piece sample, step chosen below the strict slack).
    PieceGrids,
    /// Integer boxes at the origin; exhaustive part-size compositions with
    /// parts ≤ 4 when t ≤ 12, balanced sizes beyond.
    IntegerBoxes,
    /// Rational-step local search from the best deterministic grid.
    HillClimb { iters: usize },
}

impl DeltaStrategy {
    pub fn default_suite() -> Vec<DeltaStrategy> {
        vec![
            DeltaStrategy::PieceGrids,
            DeltaStrategy::IntegerBoxes,
            DeltaStrategy::HillClimb { iters: 200 },
        ]
    }
}

/// Balanced allocation of `t` over the blocks; zero-width blocks hold at
/// most one (empty) tuple.
fn balanced_sizes(t: usize, blocks: &[usize]) -> Option<Vec<usize>> {
    let wide: Vec<usize> = (0..blocks.len()).filter(|&k| blocks[k] > 0).collect();
    let mut sizes = vec![0usize; blocks.len()];
    let mut budget = t;
    for k in 0..blocks.len() {
        if blocks[k] == 0 {
            if budget == 0 {
                return None;
            }
            sizes[k] = 1;
            budget -= 1;
        }
    }
    if wide.is_empty() {
        return (budget == 0).then_some(sizes);
    }
    for (pos, &k) in wide.iter().enumerate() {
        let share = budget / wide.len() + usize::from(pos < budget % wide.len());
        if share == 0 {
            return None;
        }
        sizes[k] = share;
    }
    Some(sizes)
}

/// All compositions of `t` into the blocks with every part in `1..=cap`
/// (zero-width blocks forced to 1).
fn compositions(t: usize, blocks: &[usize], cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; blocks.len()];
    fn rec(
        k: usize,
        left: usize,
        blocks: &[usize],
        cap: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == blocks.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = if blocks[k] == 0 { 1 } else { cap.min(left) };
        for s in 1..=hi {
            if s > left {
                break;
            }
            cur[k] = s;
            rec(k + 1, left - s, blocks, cap, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, t, blocks, cap, &mut cur, &mut out);
    out
}

/// Ordered factorizations of `size` into `width` positive factors.
fn box_shapes(size: usize, width: usize) -> Vec<Vec<usize>> {
    if width == 0 {
        return if size == 1 { vec![vec![]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(left: usize, width: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if width == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for d in 1..=left {
            if left % d == 0 {
                cur.push(d);
                rec(left / d, width - 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(size, width, &mut cur, &mut out);
    out
}

fn integer_box(shape: &[usize]) -> Vec<Vec<Rat>> {
    let mut tuples = vec![Vec::new()];
    for &side in shape {
        let mut next = Vec::new();
        for t in &tuples {
            for v in 0..side {
                let mut u = t.clone();
                u.push(rat(v as i64));
                next.push(u);
            }
        }
        tuples = next;
    }
    tuples
}

/// Direction of the flat supported inside one coordinate block, if any.
fn block_direction(flat: &Flat, offset: usize, width: usize, du: usize) -> Option<Vec<Rat>> {
    if width == 0 {
        return None;
    }
    let mut rows: Vec<LinTerm> = flat
        .rows()
        .iter()
        .map(|r| {
            let mut h = r.clone();
            h.constant = Rat::zero();
            h
        })
        .collect();
    for c in 0..du {
        if c < offset || c >= offset + width {
            rows.push(LinTerm::var(du, c));
        }
    }
    let basis = rref_eqs(du, &rows).nullspace_basis();
    basis.into_iter().find(|v| v.iter().any(|x| !x.is_zero()))
}

/// Piece-grid construction: base point plus multiples of per-block
/// directions, with a step small enough that the whole grid keeps every
/// strict inequality of the piece.
fn piece_grid(
    cell: &BasicCell,
    sample: &[Rat],
    blocks: &[usize],
    sizes: &[usize],
) -> Option<Vec<Vec<Vec<Rat>>>> {
    let du = cell.dim();
    let flat = affine_hull(cell).ok()?;
    let mut dirs: Vec<Option<Vec<Rat>>> = Vec::new();
    let mut offset = 0usize;
    for (k, &w) in blocks.iter().enumerate() {
        if w == 0 {
            if sizes[k] != 1 {
                return None;
            }
            dirs.push(None);
        } else {
            let v = block_direction(&flat, offset, w, du)?;
            dirs.push(Some(v));
        }
        offset += w;
    }
    // step below the slack of every strict atom across the whole grid
    let mut eps = rat(1);
    for a in &cell.lt {
        let slack = -a.eval(sample); // > 0 on the sample
        let mut span = Rat::zero();
        for (k, d) in dirs.iter().enumerate() {
            if let Some(v) = d {
                let dot: Rat = a.coeffs.iter().zip(v).map(|(c, x)| c * x).sum();
                span += crate::rat::abs(&dot) * rat(sizes[k] as i64 - 1);
            }
        }
        let bound = slack / (span + rat(1));
        if bound < eps {
            eps = bound;
        }
    }
    let mut parts = Vec::new();
    let mut offset = 0usize;
    for (k, &w) in blocks.iter().enumerate() {
        let mut tuples = Vec::new();
        match &dirs[k] {
            None => tuples.push(Vec::new()),
            Some(v) => {
                for jj in 0..sizes[k] {
                    let tuple: Vec<Rat> = (offset..offset + w)
                        .map(|c| &sample[c] + &eps * rat(jj as i64) * &v[c])
                        .collect();
                    tuples.push(tuple);
                }
            }
        }
        parts.push(tuples);
        offset += w;
    }
    Some(parts)
}

/// Certified lower bound for `δ_E(t)` over the strategy suite, with the
/// witness sub-grid. Deterministic for a fixed seed.
pub fn delta_search(
    e: &SemilinearSet,
    blocks: &[usize],
    t: usize,
    strategies: &[DeltaStrategy],
    seed: u64,
) -> Result<(usize, GridSpec), SimpleError> {
    let empty_grid = GridSpec {
        j: Vec::new(),
        j_prime: Vec::new(),
        parts: vec![Vec::new(); blocks.len()],
    };
    if t < blocks.len() || blocks.is_empty() {
        return Ok((0, empty_grid));
    }
    let mut best: Option<(usize, GridSpec)> = None;
    let consider = |count: usize, parts: Vec<Vec<Vec<Rat>>>, best: &mut Option<(usize, GridSpec)>| {
        if best.as_ref().map_or(true, |(c, _)| count > *c) {
            *best = Some((
                count,
                GridSpec {
                    j: Vec::new(),
                    j_prime: Vec::new(),
                    parts,
                },
            ));
        }
    };
    for strategy in strategies {
        match strategy {
            DeltaStrategy::PieceGrids => {
                if let Some(sizes) = balanced_sizes(t, blocks) {
                    for (cell, sample) in cells_of(e) {
                        if let Some(parts) = piece_grid(&cell, &sample, blocks, &sizes) {
                            let w = GridSpec {
                                j: Vec::new(),
                                j_prime: Vec::new(),
                                parts: parts.clone(),
                            };
                            let c = delta_on_grid(e, blocks, &w)?;
                            consider(c, parts, &mut best);
                        }
                    }
                }
            }
            DeltaStrategy::IntegerBoxes => {
                let sizing: Vec<Vec<usize>> = if t <= 12 {
                    compositions(t, blocks, 4)
                } else {
                    balanced_sizes(t, blocks).into_iter().collect()
                };
                for sizes in sizing {
                    let shapes_per: Vec<Vec<Vec<usize>>> = blocks
                        .iter()
                        .zip(&sizes)
                        .map(|(&w, &s)| box_shapes(s, w))
                        .collect();
                    if shapes_per.iter().any(|v| v.is_empty()) {
                        continue;
                    }
                    let mut odo = vec![0usize; blocks.len()];
                    loop {
                        let parts: Vec<Vec<Vec<Rat>>> = odo
                            .iter()
                            .enumerate()
                            .map(|(k, &i)| integer_box(&shapes_per[k][i]))
                            .collect();
                        let w = GridSpec {
                            j: Vec::new(),
                            j_prime: Vec::new(),
                            parts: parts.clone(),
                        };
                        let c = delta_on_grid(e, blocks, &w)?;
                        consider(c, parts, &mut best);
                        let mut k = blocks.len();
                        let mut done = false;
                        loop {
                            if k == 0 {
                                done = true;
                                break;
                            }
                            k -= 1;
                            odo[k] += 1;
                            if odo[k] < shapes_per[k].len() {
                                break;
                            }
                            odo[k] = 0;
                            if k == 0 {
                                done = true;
                                break;
                            }
                        }
                        if done {
                            break;
                        }
                    }
                }
            }
            DeltaStrategy::HillClimb { iters } => {
                let (mut cur_count, mut cur) = match &best {
                    Some((c, w)) if !w.parts.iter().any(|p| p.is_empty()) => (*c, w.clone()),
                    _ => continue, // nothing to start from
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let steps = [
                    rat(1),
                    crate::rat::frac(1, 2),
                    crate::rat::frac(1, 4),
                    crate::rat::frac(1, 8),
                ];
                for _ in 0..*iters {
                    let movable: Vec<usize> =
                        (0..blocks.len()).filter(|&k| blocks[k] > 0).collect();
                    if movable.is_empty() {
                        break;
                    }
                    let k = movable[rng.gen_range(0..movable.len())];
                    let ti = rng.gen_range(0..cur.parts[k].len());
                    let c = rng.gen_range(0..blocks[k]);
                    let step = steps[rng.gen_range(0..steps.len())].clone();
                    let sign = if rng.gen_bool(0.5) { rat(1) } else { rat(-1) };
                    let mut cand = cur.clone();
                    cand.parts[k][ti][c] = &cand.parts[k][ti][c] + step * sign;
                    let moved = cand.parts[k][ti].clone();
                    if cand.parts[k]
                        .iter()
                        .enumerate()
                        .any(|(o, tu)| o != ti && *tu == moved)
                    {
                        continue;
                    }
                    let count = delta_on_grid(e, blocks, &cand)?;
                    if count > cur_count {
                        cur_count = count;
                        cur = cand;
                    }
                }
                consider(cur_count, cur.parts, &mut best);
            }
        }
    }
    Ok(best.unwrap_or((0, empty_grid)))
}

/// One cell of the critical relation: a relatively open subset of its
/// affine hull, plus the dependence analysis against the relation's blocks.
#[derive(Debug, Clone)]
pub struct Piece {
    pub cell: BasicCell,
    pub flat: Flat,
    pub sample: Vec<Rat>,
    /// least block whose deleting projection is injective on the flat
    pub dropped_block: Option<usize>,
    pub reduced_j: Vec<String>,
    pub reduced_j_prime: Vec<String>,
}

/// Least block whose deletion leaves the flat's direction space intact,
/// i.e. whose coordinate subspace meets the direction space only in `{0}`.
/// `None` means the piece is independent. Zero-width blocks always drop.
pub fn is_dependent(flat: &Flat, blocks: &[usize]) -> Option<usize> {
    let basis = flat.basis();
    let k = basis.len();
    let mut offset = 0usize;
    for (bi, &w) in blocks.iter().enumerate() {
        if w == 0 {
            return Some(bi);
        }
        let rows: Vec<Vec<Rat>> = basis
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(c, _)| *c < offset || *c >= offset + w)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        if rank_of(&rows) == k {
            return Some(bi);
        }
        offset += w;
    }
    None
}

/// Disjoint pieces of `E_{J,J′}`: relatively open cells with their affine
/// hulls and dependence status.
pub fn piece_decompose(e: &CriticalRelation) -> Result<Vec<Piece>, SimpleError> {
    let mut out = Vec::new();
    for (cell, sample) in cells_of(&e.relation) {
        let flat = affine_hull(&cell)?;
        let dropped_block = is_dependent(&flat, &e.blocks);
        let (reduced_j, reduced_j_prime) = match dropped_block {
            None => (e.j.clone(), e.j_prime.clone()),
            Some(bi) => {
                let lbl = &e.j[bi];
                (
                    e.j.iter().filter(|l| *l != lbl).cloned().collect(),
                    e.j_prime.iter().filter(|l| *l != lbl).cloned().collect(),
                )
            }
        };
        out.push(Piece {
            cell,
            flat,
            sample,
            dropped_block,
            reduced_j,
            reduced_j_prime,
        });
    }
    Ok(out)
}

/// The reduction chain of one piece of one `(J, J′)` pair.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReductionChain {
    pub j: Vec<String>,
    pub j_prime: Vec<String>,
    pub piece: usize,
    /// labels dropped, in order
    pub dropped: Vec<String>,
    pub final_j: Vec<String>,
    pub contributes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExponentCertificate {
    pub s: usize,
    pub chains: Vec<ReductionChain>,
}

/// The integer exponent `s` with `π(t) = Θ(t^s)`: over every `J′ ⊆ J ⊆ I`,
/// decompose `E_{J,J′}` into pieces and drop dependent blocks (deleting the
/// block's coordinates from the piece) until independent; `s` is the largest
/// surviving `|J|`.
pub fn exponent(s: &SimpleFamily) -> Result<(usize, ExponentCertificate), SimpleError> {
    let r = s.indices.len();
    let mut chains = Vec::new();
    let mut best = 0usize;
    for j_mask in 0..1usize << r {
        let j_positions: Vec<usize> = (0..r).filter(|i| j_mask >> i & 1 == 1).collect();
        let labels: Vec<&str> = j_positions
            .iter()
            .map(|&p| s.indices[p].label.as_str())
            .collect();
        // sub-masks of j_mask, including empty and full
        let mut sub = j_mask;
        loop {
            let jp_labels: Vec<&str> = (0..r)
                .filter(|i| sub >> i & 1 == 1)
                .map(|p| s.indices[p].label.as_str())
                .collect();
            let e = build_critical_relation(s, &labels, &jp_labels)?;
            for (piece_idx, piece) in piece_decompose(&e)?.into_iter().enumerate() {
                let mut cell = piece.cell;
                let mut blocks = e.blocks.clone();
                let mut live: Vec<String> = e.j.clone();
                let mut live_prime: Vec<String> = e.j_prime.clone();
                let mut dropped = Vec::new();
                loop {
                    let flat = affine_hull(&cell)?;
                    match is_dependent(&flat, &blocks) {
                        None => break,
                        Some(bi) => {
                            let offset: usize = blocks[..bi].iter().sum();
                            for c in (offset..offset + blocks[bi]).rev() {
                                cell = cell.eliminate_var(c);
                            }
                            let lbl = live.remove(bi);
                            live_prime.retain(|l| *l != lbl);
                            dropped.push(lbl);
                            blocks.remove(bi);
                        }
                    }
                }
                let contributes = live.len();
                best = best.max(contributes);
                chains.push(ReductionChain {
                    j: e.j.clone(),
                    j_prime: e.j_prime.clone(),
                    piece: piece_idx,
                    dropped,
                    final_j: live,
                    contributes,
                });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & j_mask;
        }
    }
    Ok((best, ExponentCertificate { s: best, chains }))
}

// --- JSON form ---------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct IndexRepr {
    label: String,
    kind: String,
    polys: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SimpleRepr {
    param_dim: usize,
    indices: Vec<IndexRepr>,
}

impl Serialize for SimpleFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SimpleRepr {
            param_dim: self.param_dim,
            indices: self
                .indices
                .iter()
                .map(|ix| IndexRepr {
                    label: ix.label.clone(),
                    kind: match ix.kind {
                        IndexKind::Points => "points".into(),
                        IndexKind::HalfLines => "halflines".into(),
                    },
                    polys: ix
                        .polys
                        .iter()
                        .map(crate::kernel::json::term_to_vec)
                        .collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SimpleFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SimpleRepr::deserialize(deserializer)?;
        let mut indices = Vec::with_capacity(repr.indices.len());
        for ix in repr.indices {
            let kind = match ix.kind.as_str() {
                "points" => IndexKind::Points,
                "halflines" => IndexKind::HalfLines,
                other => {
                    return Err(D::Error::custom(format!(
                        "bad kind '{other}': want points|halflines"
                    )))
                }
            };
            let mut polys = Vec::with_capacity(ix.polys.len());
            for p in &ix.polys {
                polys.push(
                    crate::kernel::json::term_from_vec(repr.param_dim, p)
                        .map_err(D::Error::custom)?,
                );
            }
            if polys.is_empty() {
                return Err(D::Error::custom("index needs at least one polynomial"));
            }
            indices.push(SimpleIndex {
                label: ix.label,
                kind,
                polys,
            });
        }
        Ok(SimpleFamily::new(repr.param_dim, indices))
    }
}
