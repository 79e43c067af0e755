//! Composite spaces and parameterized families: fibers, the family
//! transformations (clone, Boolean extension, restriction), exact trace
//! enumeration over the parameter space, forced-shatter counting, shatter
//! lower-bound search strategies, and the log-log density estimate.

use crate::kernel::{KernelError, SemilinearSet};
use crate::rat::{fmt_rat, parse_rat, rat, Rat};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameter point lies outside Y")]
    ParamOutsideY,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("restriction is empty")]
    EmptyRestriction,
    #[error("parameter set Y is empty")]
    EmptyParamSet,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("unknown index label '{0}'")]
    BadLabel(String),
    #[error("duplicate point in component '{0}'")]
    DuplicatePoint(String),
    #[error("bad Boolean table: {0}")]
    BadTable(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Disjoint union of Euclidean spaces `V = ⊔ V[i]`, `V[i] = Q^{m_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(parts: &[(&str, usize)]) -> CompositeSpace {
        let labels: Vec<String> = parts.iter().map(|(l, _)| l.to_string()).collect();
        let dims: Vec<usize> = parts.iter().map(|&(_, d)| d).collect();
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), labels.len(), "index labels must be distinct");
        assert!(dims.iter().all(|&d| d >= 1), "component dims must be >= 1");
        CompositeSpace { labels, dims }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim_of(&self, pos: usize) -> usize {
        self.dims[pos]
    }

    pub fn position(&self, label: &str) -> Result<usize, FamilyError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| FamilyError::BadLabel(label.to_string()))
    }
}

/// Indexed family `𝒳 = (X_b)_{b ∈ Y}`: per index a total relation
/// `Z_i ⊆ Q^{m_i + n}` (coordinates: x then b) and the parameter set `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFamily {
    space: CompositeSpace,
    param_dim: usize,
    param_set: SemilinearSet,
    relations: Vec<SemilinearSet>,
}

impl ParamFamily {
    pub fn new(
        space: CompositeSpace,
        param_dim: usize,
        param_set: SemilinearSet,
        relations: Vec<SemilinearSet>,
    ) -> Result<ParamFamily, FamilyError> {
        if param_set.dim() != param_dim {
            return Err(FamilyError::DimensionMismatch(format!(
                "param_set dim {} != param_dim {}",
                param_set.dim(),
                param_dim
            )));
        }
        if relations.len() != space.len() {
            return Err(FamilyError::DimensionMismatch(format!(
                "{} relations for {} indices",
                relations.len(),
                space.len()
            )));
        }
        for (i, z) in relations.iter().enumerate() {
            let want = space.dim_of(i) + param_dim;
            if z.dim() != want {
                return Err(FamilyError::DimensionMismatch(format!(
                    "relation '{}' has dim {}, want {}",
                    space.labels()[i],
                    z.dim(),
                    want
                )));
            }
        }
        if param_set.is_empty() {
            return Err(FamilyError::EmptyParamSet);
        }
        Ok(ParamFamily {
            space,
            param_dim,
            param_set,
            relations,
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn param_set(&self) -> &SemilinearSet {
        &self.param_set
    }

    pub fn relations(&self) -> &[SemilinearSet] {
        &self.relations
    }

    pub fn relation(&self, pos: usize) -> &SemilinearSet {
        &self.relations[pos]
    }

    /// Member fiber `X_b[i]` for every index, by substitution of `b`.
    pub fn fiber(&self, b: &[Rat]) -> Result<Vec<SemilinearSet>, FamilyError> {
        if b.len() != self.param_dim {
            return Err(FamilyError::DimensionMismatch(format!(
                "parameter has {} coords, want {}",
                b.len(),
                self.param_dim
            )));
        }
        if !self.param_set.contains(b) {
            return Err(FamilyError::ParamOutsideY);
        }
        Ok(self
            .relations
            .iter()
            .map(|z| z.substitute_tail(b))
            .collect())
    }

    /// Parameter region `{b ∈ Y : x ∈ X_b[pos]}` of one probe point.
    pub fn membership_region(&self, pos: usize, x: &[Rat]) -> SemilinearSet {
        self.relations[pos]
            .substitute_head(x)
            .intersect(&self.param_set)
    }
}

/// `ℓ` copies of every index; the copy relations are shared. Labels become
/// `label#j`, j = 1..ℓ.
pub fn clone_family(f: &ParamFamily, l: usize) -> ParamFamily {
    assert!(l >= 1, "clone multiplicity must be at least 1");
    let mut parts: Vec<(String, usize)> = Vec::new();
    let mut relations = Vec::new();
    for (i, label) in f.space.labels().iter().enumerate() {
        for j in 1..=l {
            parts.push((format!("{label}#{j}"), f.space.dim_of(i)));
            relations.push(f.relations[i].clone());
        }
    }
    let space = CompositeSpace {
        labels: parts.iter().map(|(l, _)| l.clone()).collect(),
        dims: parts.iter().map(|&(_, d)| d).collect(),
    };
    ParamFamily::new(space, f.param_dim, f.param_set.clone(), relations)
        .expect("clone preserves validity")
}

/// Adjoins an index whose fibers are the Boolean combination given by
/// `table` of the fibers at `j_labels` (all of one dimension). `table[s]`
/// is the output for the membership assignment with bit k of `s` standing
/// for membership in the k-th listed component.
pub fn boolean_extend(
    f: &ParamFamily,
    j_labels: &[&str],
    table: &[bool],
    new_label: &str,
) -> Result<ParamFamily, FamilyError> {
    if j_labels.is_empty() {
        return Err(FamilyError::BadTable("no input components".into()));
    }
    let positions: Vec<usize> = j_labels
        .iter()
        .map(|l| f.space.position(l))
        .collect::<Result<_, _>>()?;
    let m = f.space.dim_of(positions[0]);
    if positions.iter().any(|&p| f.space.dim_of(p) != m) {
        return Err(FamilyError::DimensionMismatch(
            "Boolean extension needs components of equal dimension".into(),
        ));
    }
    if table.len() != 1 << positions.len() {
        return Err(FamilyError::BadTable(format!(
            "table has {} rows, want {}",
            table.len(),
            1 << positions.len()
        )));
    }
    let total = m + f.param_dim;
    let complements: Vec<SemilinearSet> = positions
        .iter()
        .map(|&p| f.relations[p].complement())
        .collect();
    let mut new_rel = SemilinearSet::empty(total);
    for (s, &value) in table.iter().enumerate() {
        if !value {
            continue;
        }
        let mut acc = SemilinearSet::full(total);
        for (k, &p) in positions.iter().enumerate() {
            if s >> k & 1 == 1 {
                acc = acc.intersect(&f.relations[p]);
            } else {
                acc = acc.intersect(&complements[k]);
            }
        }
        new_rel = new_rel.union_(&acc);
    }
    let mut parts: Vec<(String, usize)> = f
        .space
        .labels()
        .iter()
        .zip(&f.space.dims)
        .map(|(l, &d)| (l.clone(), d))
        .collect();
    parts.push((new_label.to_string(), m));
    let space = CompositeSpace {
        labels: parts.iter().map(|(l, _)| l.clone()).collect(),
        dims: parts.iter().map(|&(_, d)| d).collect(),
    };
    let mut relations = f.relations.clone();
    relations.push(new_rel);
    ParamFamily::new(space, f.param_dim, f.param_set.clone(), relations)
}

/// Restriction `𝒳 ↾ Y′` (parameter set intersected with `y_new`).
pub fn restrict_params(f: &ParamFamily, y_new: &SemilinearSet) -> Result<ParamFamily, FamilyError> {
    let y = f.param_set.intersect(y_new);
    if y.is_empty() {
        return Err(FamilyError::EmptyRestriction);
    }
    ParamFamily::new(f.space.clone(), f.param_dim, y, f.relations.clone())
}

/// Index restriction `𝒳[J]`.
pub fn component_restrict(f: &ParamFamily, j_labels: &[&str]) -> Result<ParamFamily, FamilyError> {
    if j_labels.is_empty() {
        return Err(FamilyError::EmptyRestriction);
    }
    let mut parts = Vec::new();
    let mut relations = Vec::new();
    for l in j_labels {
        let p = f.space.position(l)?;
        parts.push((f.space.labels()[p].clone(), f.space.dim_of(p)));
        relations.push(f.relations[p].clone());
    }
    let space = CompositeSpace {
        labels: parts.iter().map(|(l, _)| l.clone()).collect(),
        dims: parts.iter().map(|&(_, d)| d).collect(),
    };
    ParamFamily::new(space, f.param_dim, f.param_set.clone(), relations)
}

/// Finite test set `A ⊆ V`, points tagged by index label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedPointSet {
    pub entries: Vec<PointEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointEntry {
    pub index: String,
    pub coords: Vec<Rat>,
}

impl IndexedPointSet {
    pub fn empty() -> IndexedPointSet {
        IndexedPointSet {
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, index: &str, coords: Vec<Rat>) {
        self.entries.push(PointEntry {
            index: index.to_string(),
            coords,
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Resolves labels to positions, validates dimensions and per-index
    /// distinctness, and returns points in canonical order (index position,
    /// then lexicographic coordinates). Trace bitmasks refer to this order.
    pub fn resolved(&self, space: &CompositeSpace) -> Result<Vec<(usize, Vec<Rat>)>, FamilyError> {
        let mut pts = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let pos = space.position(&e.index)?;
            if e.coords.len() != space.dim_of(pos) {
                return Err(FamilyError::DimensionMismatch(format!(
                    "point in '{}' has {} coords, want {}",
                    e.index,
                    e.coords.len(),
                    space.dim_of(pos)
                )));
            }
            pts.push((pos, e.coords.clone()));
        }
        pts.sort();
        for w in pts.windows(2) {
            if w[0] == w[1] {
                return Err(FamilyError::DuplicatePoint(
                    space.labels()[w[0].0].to_string(),
                ));
            }
        }
        Ok(pts)
    }
}

/// One realizable membership pattern with a nonempty parameter witness
/// region. Bits follow the canonical point order of `IndexedPointSet::resolved`.
#[derive(Debug, Clone)]
pub struct Trace {
    pub bits: Vec<bool>,
    pub witness_region: SemilinearSet,
}

impl Trace {
    pub fn mask(&self) -> u128 {
        assert!(self.bits.len() <= 128);
        self.bits
            .iter()
            .enumerate()
            .fold(0u128, |m, (k, &b)| if b { m | 1 << k } else { m })
    }
}

/// Membership regions of the points of `a` in parameter space, in the
/// canonical point order.
fn membership_regions(
    f: &ParamFamily,
    pts: &[(usize, Vec<Rat>)],
) -> Vec<SemilinearSet> {
    pts.iter()
        .map(|(pos, x)| f.relations[*pos].substitute_head(x))
        .collect()
}

/// Exact trace enumeration. The parameter space is decomposed along every
/// atom of every point's membership region (and of `Y`); on each
/// decomposition cell all memberships are constant, so evaluating at the
/// cell's exact sample yields the pattern, and the witness region of a
/// pattern is the union of its cells. Traces are emitted in the order a
/// depth-first membership split would produce ("in" before "out" at each
/// point).
pub fn trace_set(f: &ParamFamily, a: &IndexedPointSet) -> Result<Vec<Trace>, FamilyError> {
    let pts = a.resolved(f.space())?;
    let regions = membership_regions(f, &pts);
    let mut terms = f.param_set.all_terms();
    for r in &regions {
        terms.extend(r.all_terms());
    }
    let mut by_pattern: std::collections::HashMap<Vec<bool>, Vec<crate::kernel::BasicCell>> =
        std::collections::HashMap::new();
    for (cell, sample) in crate::kernel::decompose_space(f.param_dim, &terms) {
        if !f.param_set.contains(&sample) {
            continue;
        }
        let bits: Vec<bool> = regions.iter().map(|r| r.contains(&sample)).collect();
        by_pattern.entry(bits).or_default().push(cell);
    }
    let mut keys: Vec<Vec<bool>> = by_pattern.keys().cloned().collect();
    keys.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            if x != y {
                // true branches first, matching the depth-first split
                return if *x {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
            }
        }
        std::cmp::Ordering::Equal
    });
    Ok(keys
        .into_iter()
        .map(|bits| {
            let cells = by_pattern.remove(&bits).unwrap();
            Trace {
                witness_region: SemilinearSet::from_cells(f.param_dim, cells),
                bits,
            }
        })
        .collect())
}

/// Indices (by position) hit by a trace.
fn hit_positions(bits: &[bool], pts: &[(usize, Vec<Rat>)]) -> Vec<usize> {
    let mut hit: Vec<usize> = bits
        .iter()
        .zip(pts)
        .filter(|(b, _)| **b)
        .map(|(_, (pos, _))| *pos)
        .collect();
    hit.sort();
    hit.dedup();
    hit
}

/// Traces whose pattern hits every index of `J` (`𝒳 ∩_J A`). `J = ∅`
/// reduces to `trace_set`.
pub fn forced_trace_set(
    f: &ParamFamily,
    a: &IndexedPointSet,
    j_labels: &[&str],
) -> Result<Vec<Trace>, FamilyError> {
    let wanted: Vec<usize> = j_labels
        .iter()
        .map(|l| f.space.position(l))
        .collect::<Result<_, _>>()?;
    let pts = a.resolved(f.space())?;
    let traces = trace_set(f, a)?;
    Ok(traces
        .into_iter()
        .filter(|tr| {
            let hit = hit_positions(&tr.bits, &pts);
            wanted.iter().all(|j| hit.contains(j))
        })
        .collect())
}

/// Configuration strategies for shatter lower bounds. Each strategy is run
/// once for every nonempty subset of the index set (points are allocated to
/// the subset's components as evenly as possible).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// k-th point of a component at (k, k, ..., k).
    Diagonal,
    /// k-th point at (k, -k, k, ...): alternating signs.
    AntiDiagonal,
    /// Lexicographic integer grid fill per component.
    Grid,
    /// Rational-step local search from the diagonal start.
    HillClimb { iters: usize, restarts: usize },
}

impl Strategy {
    pub fn name(&self) -> String {
        match self {
            Strategy::Diagonal => "diagonal".into(),
            Strategy::AntiDiagonal => "antidiagonal".into(),
            Strategy::Grid => "grid".into(),
            Strategy::HillClimb { iters, restarts } => {
                format!("hillclimb[{iters}x{restarts}]")
            }
        }
    }

    /// The default suite used by the CLI and the density estimate.
    pub fn default_suite() -> Vec<Strategy> {
        vec![
            Strategy::Diagonal,
            Strategy::AntiDiagonal,
            Strategy::Grid,
            Strategy::HillClimb {
                iters: 200,
                restarts: 2,
            },
        ]
    }
}

/// Evenly spreads `t` points over the components listed in `subset`.
fn allocate(t: usize, subset: &[usize]) -> Vec<usize> {
    let k = subset.len();
    let mut counts = vec![t / k; k];
    for c in counts.iter_mut().take(t % k) {
        *c += 1;
    }
    counts
}

fn deterministic_config(
    space: &CompositeSpace,
    subset: &[usize],
    t: usize,
    strategy: &Strategy,
) -> IndexedPointSet {
    let counts = allocate(t, subset);
    let mut a = IndexedPointSet::empty();
    for (&pos, &cnt) in subset.iter().zip(&counts) {
        let m = space.dim_of(pos);
        for r in 1..=cnt {
            let coords: Vec<Rat> = match strategy {
                Strategy::Diagonal | Strategy::HillClimb { .. } => {
                    (0..m).map(|_| rat(r as i64)).collect()
                }
                Strategy::AntiDiagonal => (0..m)
                    .map(|c| {
                        if c % 2 == 0 {
                            rat(r as i64)
                        } else {
                            rat(-(r as i64))
                        }
                    })
                    .collect(),
                Strategy::Grid => {
                    // lexicographic fill of {0..side-1}^m
                    let mut side = 1usize;
                    while side.pow(m as u32) < cnt {
                        side += 1;
                    }
                    let mut v = r - 1;
                    let mut coords = vec![rat(0); m];
                    for c in (0..m).rev() {
                        coords[c] = rat((v % side) as i64);
                        v /= side;
                    }
                    coords
                }
            };
            a.push(&space.labels()[pos], coords);
        }
    }
    a
}

/// Score of a configuration: total trace count, or the forced count when a
/// forced index set is prescribed. Counts patterns only — no witness
/// regions are assembled, so this is the hot path of the search.
fn score_config(
    f: &ParamFamily,
    a: &IndexedPointSet,
    forced: Option<&[usize]>,
) -> Result<usize, FamilyError> {
    let pts = a.resolved(f.space())?;
    let regions = membership_regions(f, &pts);
    let mut terms = f.param_set.all_terms();
    for r in &regions {
        terms.extend(r.all_terms());
    }
    let mut patterns: std::collections::HashSet<Vec<bool>> = std::collections::HashSet::new();
    for (_, sample) in crate::kernel::decompose_space(f.param_dim, &terms) {
        if !f.param_set.contains(&sample) {
            continue;
        }
        let bits: Vec<bool> = regions.iter().map(|r| r.contains(&sample)).collect();
        patterns.insert(bits);
    }
    match forced {
        None => Ok(patterns.len()),
        Some(wanted) => Ok(patterns
            .iter()
            .filter(|bits| {
                let hit = hit_positions(bits, &pts);
                wanted.iter().all(|j| hit.contains(j))
            })
            .count()),
    }
}

fn hill_climb(
    f: &ParamFamily,
    start: &IndexedPointSet,
    iters: usize,
    seed: u64,
    forced: Option<&[usize]>,
) -> Result<(IndexedPointSet, usize), FamilyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = [rat(1), crate::rat::frac(1, 2), crate::rat::frac(1, 4), crate::rat::frac(1, 8)];
    let mut best = start.clone();
    let mut best_score = score_config(f, &best, forced)?;
    if best.is_empty() {
        return Ok((best, best_score));
    }
    for _ in 0..iters {
        let k = rng.gen_range(0..best.entries.len());
        let c = rng.gen_range(0..best.entries[k].coords.len());
        let step = steps[rng.gen_range(0..steps.len())].clone();
        let sign = if rng.gen_bool(0.5) { rat(1) } else { rat(-1) };
        let mut cand = best.clone();
        cand.entries[k].coords[c] = &cand.entries[k].coords[c] + step * sign;
        if cand.resolved(f.space()).is_err() {
            continue; // collision within a component
        }
        let s = score_config(f, &cand, forced)?;
        if s > best_score {
            best = cand;
            best_score = s;
        }
    }
    Ok((best, best_score))
}

/// Report of one lower-bound run at a fixed `t`.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub t: usize,
    pub count: usize,
    /// Forced counts per nonempty `J ⊆ I`, in subset-bitmask order.
    pub forced: Vec<(Vec<String>, usize)>,
    pub config: IndexedPointSet,
    pub strategy: String,
    pub seed: u64,
    pub millis: u128,
}

impl TraceReport {
    /// Fixed CSV header: t, count, one forced column per nonempty J, then
    /// strategy/seed/millis.
    pub fn csv_header(space: &CompositeSpace) -> String {
        let mut cols = vec!["t".to_string(), "count".to_string()];
        for j in nonempty_subsets(space.len()) {
            let labels: Vec<&str> = j.iter().map(|&p| space.labels()[p].as_str()).collect();
            cols.push(format!("forced_{}", labels.join("+")));
        }
        cols.extend([
            "strategy".to_string(),
            "seed".to_string(),
            "millis".to_string(),
        ]);
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.t.to_string(), self.count.to_string()];
        for (_, c) in &self.forced {
            cols.push(c.to_string());
        }
        cols.extend([
            self.strategy.clone(),
            self.seed.to_string(),
            self.millis.to_string(),
        ]);
        cols.join(",")
    }
}

/// Nonempty subsets of `0..k` in bitmask order.
pub fn nonempty_subsets(k: usize) -> Vec<Vec<usize>> {
    (1..1usize << k)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Best configuration of size `t` over the strategy suite, maximizing the
/// trace count (or the forced count for `forced_labels`). Deterministic for
/// a fixed seed: candidates are scored in parallel and merged by maximal
/// count, then smallest candidate index.
pub fn best_config(
    f: &ParamFamily,
    t: usize,
    strategies: &[Strategy],
    seed: u64,
    forced_labels: Option<&[&str]>,
) -> Result<(IndexedPointSet, usize, String), FamilyError> {
    let forced_positions: Option<Vec<usize>> = match forced_labels {
        None => None,
        Some(ls) => Some(
            ls.iter()
                .map(|l| f.space.position(l))
                .collect::<Result<_, _>>()?,
        ),
    };
    let forced = forced_positions.as_deref();
    // Enumerate candidate tasks.
    let mut tasks: Vec<(usize, Strategy, Vec<usize>, u64)> = Vec::new();
    let mut task_id = 0usize;
    for strategy in strategies {
        for subset in nonempty_subsets(f.space.len()) {
            match strategy {
                Strategy::HillClimb { iters, restarts } => {
                    for r in 0..*restarts {
                        let task_seed = seed
                            .wrapping_mul(0x9E3779B97F4A7C15)
                            .wrapping_add((task_id as u64) << 8 | r as u64);
                        tasks.push((
                            task_id,
                            Strategy::HillClimb {
                                iters: *iters,
                                restarts: 1,
                            },
                            subset.clone(),
                            task_seed,
                        ));
                        task_id += 1;
                    }
                }
                s => {
                    tasks.push((task_id, s.clone(), subset.clone(), seed));
                    task_id += 1;
                }
            }
        }
    }
    let results: Result<Vec<(usize, usize, IndexedPointSet, String)>, FamilyError> = tasks
        .par_iter()
        .map(|(id, strategy, subset, task_seed)| {
            let start = deterministic_config(&f.space, subset, t, strategy);
            let (cfg, score) = match strategy {
                Strategy::HillClimb { iters, .. } => {
                    hill_climb(f, &start, *iters, *task_seed, forced)?
                }
                _ => {
                    let s = score_config(f, &start, forced)?;
                    (start, s)
                }
            };
            Ok((*id, score, cfg, strategy.name()))
        })
        .collect();
    let mut results = results?;
    results.sort_by_key(|(id, _, _, _)| *id);
    let best = results
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("at least one strategy task");
    Ok((best.2, best.1, best.3))
}

/// Lower-bound run: best configuration over the strategies plus all forced
/// counts for that configuration.
pub fn shatter_lower(
    f: &ParamFamily,
    t: usize,
    strategies: &[Strategy],
    seed: u64,
) -> Result<TraceReport, FamilyError> {
    let started = std::time::Instant::now();
    let (config, count, strategy) = if t == 0 {
        (IndexedPointSet::empty(), 1, "empty".to_string())
    } else {
        best_config(f, t, strategies, seed, None)?
    };
    let traces = trace_set(f, &config)?;
    debug_assert_eq!(traces.len(), count);
    let pts = config.resolved(f.space())?;
    let mut forced = Vec::new();
    for subset in nonempty_subsets(f.space.len()) {
        let labels: Vec<String> = subset
            .iter()
            .map(|&p| f.space.labels()[p].clone())
            .collect();
        let c = traces
            .iter()
            .filter(|tr| {
                let hit = hit_positions(&tr.bits, &pts);
                subset.iter().all(|j| hit.contains(j))
            })
            .count();
        forced.push((labels, c));
    }
    Ok(TraceReport {
        t,
        count,
        forced,
        config,
        strategy,
        seed,
        millis: started.elapsed().as_millis(),
    })
}

/// Least-squares line through `(x, y)` pairs; returns (slope, intercept).
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

/// Fit summary of a log-log density estimate.
#[derive(Debug, Clone)]
pub struct ExponentReport {
    pub slope: f64,
    pub nearest: i64,
    pub residual: f64,
    pub t_min: usize,
    pub t_max: usize,
    pub counts: Vec<(usize, usize)>,
}

fn fit_counts(counts: &[(usize, usize)]) -> Result<ExponentReport, FamilyError> {
    if counts.len() < 2 {
        return Err(FamilyError::DegenerateFit(
            "need at least two t values".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(t, c)| ((t as f64).ln(), (c.max(1) as f64).ln()))
        .collect();
    let (slope, _) = least_squares(&pts);
    let nearest = slope.round() as i64;
    Ok(ExponentReport {
        slope,
        nearest,
        residual: (slope - nearest as f64).abs(),
        t_min: counts.iter().map(|c| c.0).min().unwrap_or(0),
        t_max: counts.iter().map(|c| c.0).max().unwrap_or(0),
        counts: counts.to_vec(),
    })
}

/// Log-log least-squares slope over `shatter_lower` counts.
pub fn vc_density_estimate(
    f: &ParamFamily,
    t_range: &[usize],
    strategies: &[Strategy],
    seed: u64,
) -> Result<ExponentReport, FamilyError> {
    let counts: Result<Vec<(usize, usize)>, FamilyError> = t_range
        .par_iter()
        .map(|&t| {
            let task_seed = seed.wrapping_add((t as u64) << 32);
            Ok((t, shatter_lower(f, t, strategies, task_seed)?.count))
        })
        .collect();
    fit_counts(&counts?)
}

/// Slope of the forced-shatter counts for one index set `J`.
pub fn forced_density_estimate(
    f: &ParamFamily,
    t_range: &[usize],
    j_labels: &[&str],
    strategies: &[Strategy],
    seed: u64,
) -> Result<ExponentReport, FamilyError> {
    let counts: Result<Vec<(usize, usize)>, FamilyError> = t_range
        .par_iter()
        .map(|&t| {
            let task_seed = seed.wrapping_add((t as u64) << 32);
            let (_, score, _) = best_config(f, t, strategies, task_seed, Some(j_labels))?;
            Ok((t, score))
        })
        .collect();
    fit_counts(&counts?)
}

/// Empirical VC dimension of the trace family on `t` points plus the
/// Sauer-Shelah bound `count ≤ Σ_{i ≤ d*} C(t, i)`.
pub fn sauer_shelah_check(traces: &[Trace], t: usize) -> bool {
    let masks: Vec<u128> = traces.iter().map(|tr| tr.mask()).collect();
    let dstar = empirical_vc_dim(&masks, t);
    let mut bound: u128 = 0;
    for i in 0..=dstar {
        bound = bound.saturating_add(binom(t, i));
    }
    (masks.len() as u128) <= bound
}

/// Largest size of a shattered subset of the `t` points. Subsets are probed
/// by increasing size; a shattered set of size s has every subset shattered,
/// so the first size with no shattered subset ends the search.
pub fn empirical_vc_dim(masks: &[u128], t: usize) -> usize {
    let mut dstar = 0;
    for s in 1..=t {
        let mut any = false;
        let mut subset: Vec<usize> = (0..s).collect();
        loop {
            let sub_mask: u128 = subset.iter().fold(0u128, |m, &i| m | 1 << i);
            let patterns: std::collections::HashSet<u128> =
                masks.iter().map(|&m| m & sub_mask).collect();
            if patterns.len() == 1 << s {
                any = true;
                break;
            }
            // next combination
            let mut i = s;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if subset[i] != i + t - s {
                    subset[i] += 1;
                    for j in i + 1..s {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    subset.clear();
                    break;
                }
            }
            if subset.is_empty() {
                break;
            }
        }
        if any {
            dstar = s;
        } else {
            break;
        }
    }
    dstar
}

pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut v: u128 = 1;
    for i in 0..k {
        v = v * (n - i) as u128 / (i + 1) as u128;
    }
    v
}

// --- JSON forms ------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct IndexRepr {
    label: String,
    dim: usize,
    relation: SemilinearSet,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    indices: Vec<IndexRepr>,
    param_dim: usize,
    param_set: SemilinearSet,
}

impl Serialize for ParamFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FamilyRepr {
            indices: self
                .space
                .labels()
                .iter()
                .enumerate()
                .map(|(i, l)| IndexRepr {
                    label: l.clone(),
                    dim: self.space.dim_of(i),
                    relation: self.relations[i].clone(),
                })
                .collect(),
            param_dim: self.param_dim,
            param_set: self.param_set.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParamFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(deserializer)?;
        let parts: Vec<(String, usize)> = repr
            .indices
            .iter()
            .map(|i| (i.label.clone(), i.dim))
            .collect();
        let space = CompositeSpace {
            labels: parts.iter().map(|(l, _)| l.clone()).collect(),
            dims: parts.iter().map(|&(_, d)| d).collect(),
        };
        ParamFamily::new(
            space,
            repr.param_dim,
            repr.param_set,
            repr.indices.into_iter().map(|i| i.relation).collect(),
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    index: String,
    coords: Vec<String>,
}

impl Serialize for IndexedPointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<PointRepr> = self
            .entries
            .iter()
            .map(|e| PointRepr {
                index: e.index.clone(),
                coords: e.coords.iter().map(fmt_rat).collect(),
            })
            .collect();
        reprs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexedPointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let reprs: Vec<PointRepr> = Vec::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(reprs.len());
        for r in reprs {
            let mut coords = Vec::with_capacity(r.coords.len());
            for c in &r.coords {
                coords.push(parse_rat(c).map_err(D::Error::custom)?);
            }
            entries.push(PointEntry {
                index: r.index,
                coords,
            });
        }
        Ok(IndexedPointSet { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{BasicCell, Rel};
    use crate::linalg::LinTerm;
    use crate::rat::frac;

    fn t_(c: &[i64], k: i64) -> LinTerm {
        LinTerm::from_ints(c, k)
    }

    /// Original crosses family: single index, members are infinite crosses
    /// centered at the parameter.
    pub fn crosses() -> ParamFamily {
        // Z = {(x, y, a, b) : x = a or y = b}
        let z = SemilinearSet::from_cells(
            4,
            vec![
                BasicCell::new(4).with(t_(&[1, 0, -1, 0], 0), Rel::Eq),
                BasicCell::new(4).with(t_(&[0, 1, 0, -1], 0), Rel::Eq),
            ],
        );
        ParamFamily::new(
            CompositeSpace::new(&[("1", 2)]),
            2,
            SemilinearSet::full(2),
            vec![z],
        )
        .unwrap()
    }

    /// Original pairs family: members {(a-1,b+1), (a+1,b-1)}.
    pub fn pairs() -> ParamFamily {
        let cell = |dx: i64, dy: i64| {
            BasicCell::new(4)
                .with(t_(&[1, 0, -1, 0], -dx), Rel::Eq)
                .with(t_(&[0, 1, 0, -1], -dy), Rel::Eq)
        };
        let z = SemilinearSet::from_cells(4, vec![cell(-1, 1), cell(1, -1)]);
        ParamFamily::new(
            CompositeSpace::new(&[("1", 2)]),
            2,
            SemilinearSet::full(2),
            vec![z],
        )
        .unwrap()
    }

    /// Triple family: {x} ⊔ {y} ⊔ {(x,y)} over R ⊔ R ⊔ R^2, parameters (x,y).
    pub fn triples() -> ParamFamily {
        let z1 = SemilinearSet::from_cell(BasicCell::new(3).with(t_(&[1, -1, 0], 0), Rel::Eq));
        let z2 = SemilinearSet::from_cell(BasicCell::new(3).with(t_(&[1, 0, -1], 0), Rel::Eq));
        let z3 = SemilinearSet::from_cell(
            BasicCell::new(4)
                .with(t_(&[1, 0, -1, 0], 0), Rel::Eq)
                .with(t_(&[0, 1, 0, -1], 0), Rel::Eq),
        );
        ParamFamily::new(
            CompositeSpace::new(&[("1", 1), ("2", 1), ("3", 2)]),
            2,
            SemilinearSet::full(2),
            vec![z1, z2, z3],
        )
        .unwrap()
    }

    fn diagonal_config(labels_counts: &[(&str, usize, usize)]) -> IndexedPointSet {
        // (label, dim, count)
        let mut a = IndexedPointSet::empty();
        for &(l, m, cnt) in labels_counts {
            for k in 1..=cnt {
                a.push(l, (0..m).map(|_| rat(k as i64)).collect());
            }
        }
        a
    }

    #[test]
    fn fiber_examples() {
        let f = crosses();
        let fib = f.fiber(&[rat(0), rat(0)]).unwrap();
        let cross0 = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2).with(t_(&[1, 0], 0), Rel::Eq),
                BasicCell::new(2).with(t_(&[0, 1], 0), Rel::Eq),
            ],
        );
        assert!(fib[0].set_eq(&cross0));
        let f = pairs();
        let fib = f.fiber(&[rat(0), rat(0)]).unwrap();
        assert!(fib[0].contains(&[rat(-1), rat(1)]));
        assert!(fib[0].contains(&[rat(1), rat(-1)]));
        assert!(!fib[0].contains(&[rat(0), rat(0)]));
        // outside Y
        let restricted = restrict_params(
            &f,
            &SemilinearSet::from_cell(BasicCell::new(2).with(t_(&[1, 0], 0), Rel::Le)),
        )
        .unwrap();
        assert_eq!(
            restricted.fiber(&[rat(1), rat(0)]),
            Err(FamilyError::ParamOutsideY)
        );
    }

    #[test]
    fn trace_counts_on_the_diagonal() {
        // crosses: 1 + t + C(t,2) patterns on the diagonal
        let f = crosses();
        let a = diagonal_config(&[("1", 2, 3)]);
        let traces = trace_set(&f, &a).unwrap();
        assert_eq!(traces.len(), 7);
        // pairs: only singletons on the diagonal
        let f = pairs();
        let traces = trace_set(&f, &a).unwrap();
        assert_eq!(traces.len(), 4);
        // empty A: one empty pattern
        let traces = trace_set(&f, &IndexedPointSet::empty()).unwrap();
        assert_eq!(traces.len(), 1);
        assert!(traces[0].bits.is_empty());
    }

    /// Reference enumeration: depth-first split of Y by each membership
    /// region, "in" before "out", pruning empty branches.
    fn trace_set_dfs(f: &ParamFamily, a: &IndexedPointSet) -> Vec<Trace> {
        let pts = a.resolved(f.space()).unwrap();
        let regions = membership_regions(f, &pts);
        fn rec(
            k: usize,
            region: SemilinearSet,
            regions: &[SemilinearSet],
            bits: &mut Vec<bool>,
            out: &mut Vec<Trace>,
        ) {
            if region.is_empty() {
                return;
            }
            if k == regions.len() {
                out.push(Trace {
                    bits: bits.clone(),
                    witness_region: region,
                });
                return;
            }
            bits.push(true);
            rec(k + 1, region.intersect(&regions[k]), regions, bits, out);
            bits.pop();
            bits.push(false);
            rec(k + 1, region.subtract(&regions[k]), regions, bits, out);
            bits.pop();
        }
        let mut out = Vec::new();
        rec(0, f.param_set().clone(), &regions, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn trace_set_matches_dfs_oracle() {
        let cases: Vec<(ParamFamily, IndexedPointSet)> = vec![
            (crosses(), diagonal_config(&[("1", 2, 3)])),
            (pairs(), {
                let mut a = IndexedPointSet::empty();
                for k in 1..=3i64 {
                    a.push("1", vec![rat(k), rat(-k)]);
                }
                a
            }),
            (
                triples(),
                diagonal_config(&[("1", 1, 2), ("2", 1, 1), ("3", 2, 1)]),
            ),
        ];
        for (f, a) in cases {
            let fast = trace_set(&f, &a).unwrap();
            let slow = trace_set_dfs(&f, &a);
            assert_eq!(
                fast.iter().map(|t| t.bits.clone()).collect::<Vec<_>>(),
                slow.iter().map(|t| t.bits.clone()).collect::<Vec<_>>(),
                "pattern lists (and their order) must agree"
            );
            for (tf, ts) in fast.iter().zip(&slow) {
                assert!(
                    tf.witness_region.set_eq(&ts.witness_region),
                    "witness regions must agree as sets"
                );
            }
        }
    }

    #[test]
    fn trace_witnesses_reproduce_their_patterns() {
        let f = crosses();
        let a = diagonal_config(&[("1", 2, 4)]);
        let pts = a.resolved(f.space()).unwrap();
        for tr in trace_set(&f, &a).unwrap() {
            let b = tr.witness_region.sample_point().unwrap();
            let fib = f.fiber(&b).unwrap();
            for (bit, (pos, x)) in tr.bits.iter().zip(&pts) {
                assert_eq!(fib[*pos].contains(x), *bit);
            }
        }
    }

    /// Small-oracle completeness: every pattern found by scanning a dense
    /// rational grid of parameters is in the trace set, and conversely.
    #[test]
    fn trace_completeness_against_grid_scan() {
        let f = crosses();
        let a = diagonal_config(&[("1", 2, 3)]);
        let pts = a.resolved(f.space()).unwrap();
        let traces = trace_set(&f, &a).unwrap();
        let mut found: std::collections::HashSet<Vec<bool>> =
            traces.iter().map(|tr| tr.bits.clone()).collect();
        let grid = crate::kernel::testgen::grid_rationals(-1, 4, 2);
        let mut scanned = std::collections::HashSet::new();
        for bx in &grid {
            for by in &grid {
                let b = vec![bx.clone(), by.clone()];
                let fib = f.fiber(&b).unwrap();
                let bits: Vec<bool> = pts.iter().map(|(p, x)| fib[*p].contains(x)).collect();
                scanned.insert(bits);
            }
        }
        // the scan is complete for this family at this grid resolution
        assert_eq!(scanned.len(), found.len());
        for bits in scanned {
            assert!(found.remove(&bits), "scanned pattern missing from traces");
        }
    }

    #[test]
    fn forced_traces_on_the_triple_family() {
        let f = triples();
        // diagonal split: k points to 1, k to 2, rest to 3
        let a = {
            let mut a = IndexedPointSet::empty();
            a.push("1", vec![rat(1)]);
            a.push("1", vec![rat(2)]);
            a.push("2", vec![rat(1)]);
            a.push("2", vec![rat(2)]);
            a.push("3", vec![rat(1), rat(1)]);
            a.push("3", vec![rat(2), rat(2)]);
            a
        };
        let all = trace_set(&f, &a).unwrap().len();
        let forced_13 = forced_trace_set(&f, &a, &["1", "3"]).unwrap().len();
        assert!(forced_13 <= all);
        // hitting 3 pins x and y: bounded by the points allotted to 3
        assert_eq!(forced_13, 2);
        // J = ∅ equals trace_set
        assert_eq!(forced_trace_set(&f, &a, &[]).unwrap().len(), all);
        // J = I with an index missing from A forces nothing
        let b = diagonal_config(&[("1", 1, 2)]);
        assert_eq!(
            forced_trace_set(&f, &b, &["1", "2", "3"]).unwrap().len(),
            0
        );
    }

    #[test]
    fn clone_of_a_family_keeps_counts_at_matched_configs() {
        let f = crosses();
        let g = clone_family(&f, 2);
        assert_eq!(g.space().len(), 2);
        assert_eq!(g.space().labels(), &["1#1".to_string(), "1#2".to_string()]);
        // embedding A into slot 1 preserves the count
        let a = diagonal_config(&[("1", 2, 3)]);
        let a_in_clone = {
            let mut b = IndexedPointSet::empty();
            for e in &a.entries {
                b.push("1#1", e.coords.clone());
            }
            b
        };
        assert_eq!(
            trace_set(&f, &a).unwrap().len(),
            trace_set(&g, &a_in_clone).unwrap().len()
        );
        // merge map: a clone config folds onto the base index; counts dominate
        let mut spread = IndexedPointSet::empty();
        spread.push("1#1", vec![rat(1), rat(1)]);
        spread.push("1#2", vec![rat(2), rat(2)]);
        spread.push("1#2", vec![rat(3), rat(3)]);
        let merged = {
            let mut b = IndexedPointSet::empty();
            for e in &spread.entries {
                b.push("1", e.coords.clone());
            }
            b
        };
        assert!(
            trace_set(&g, &spread).unwrap().len() <= trace_set(&f, &merged).unwrap().len(),
            "clone trace count is bounded by the merged-configuration count"
        );
        // clone with l = 1 is isomorphic
        let h = clone_family(&f, 1);
        let a1 = {
            let mut b = IndexedPointSet::empty();
            for e in &a.entries {
                b.push("1#1", e.coords.clone());
            }
            b
        };
        assert_eq!(
            trace_set(&h, &a1).unwrap().len(),
            trace_set(&f, &a).unwrap().len()
        );
    }

    #[test]
    fn boolean_extension_tables() {
        let f = triples();
        // projection onto the first argument duplicates component 1
        let g = boolean_extend(&f, &["1", "2"], &[false, true, false, true], "p").unwrap();
        let b = vec![frac(1, 2), frac(-3, 2)];
        let fib_f = f.fiber(&b).unwrap();
        let fib_g = g.fiber(&b).unwrap();
        assert!(fib_g[3].set_eq(&fib_f[0]));
        // AND of components 1 and 2: {x} ∩ {y}, nonempty only when x = y
        let g = boolean_extend(&f, &["1", "2"], &[false, false, false, true], "and").unwrap();
        let fib = g.fiber(&vec![rat(2), rat(2)]).unwrap();
        assert!(fib[3].contains(&[rat(2)]));
        let fib = g.fiber(&vec![rat(2), rat(3)]).unwrap();
        assert!(fib[3].is_empty());
        // XOR memberships match the table on sampled points
        let g = boolean_extend(&f, &["1", "2"], &[false, true, true, false], "xor").unwrap();
        for (x, (by, bx)) in [(1i64, (2i64, 1i64)), (2, (2, 2)), (3, (4, 5))] {
            let b = vec![rat(bx), rat(by)];
            let fib = g.fiber(&b).unwrap();
            let in1 = fib[0].contains(&[rat(x)]);
            let in2 = fib[1].contains(&[rat(x)]);
            assert_eq!(fib[3].contains(&[rat(x)]), in1 ^ in2);
        }
        // sandwich at fixed configurations: count(F) <= count(F')
        let a = diagonal_config(&[("1", 1, 2), ("2", 1, 2)]);
        let cf = trace_set(&f, &a).unwrap().len();
        let cg = trace_set(&g, &a).unwrap().len();
        assert!(cf <= cg);
    }

    #[test]
    fn restriction_monotonicity() {
        let f = crosses();
        let a = diagonal_config(&[("1", 2, 4)]);
        let full_count = trace_set(&f, &a).unwrap().len();
        // identity restriction
        let id = restrict_params(&f, &SemilinearSet::full(2)).unwrap();
        assert_eq!(trace_set(&id, &a).unwrap().len(), full_count);
        // restriction to the open unit square
        let square = SemilinearSet::from_cell(
            BasicCell::new(2)
                .with(t_(&[-1, 0], 0), Rel::Lt)
                .with(t_(&[1, 0], -1), Rel::Lt)
                .with(t_(&[0, -1], 0), Rel::Lt)
                .with(t_(&[0, 1], -1), Rel::Lt),
        );
        let r = restrict_params(&f, &square).unwrap();
        assert!(trace_set(&r, &a).unwrap().len() <= full_count);
        // empty restriction rejected
        let below = SemilinearSet::from_cell(BasicCell::new(2).with(t_(&[1, 0], 1), Rel::Lt));
        assert!(matches!(
            restrict_params(&r, &below.intersect(&below.complement())),
            Err(FamilyError::EmptyRestriction)
        ));
        // component restriction: traces of the restriction are projections
        let f3 = triples();
        let a3 = diagonal_config(&[("1", 1, 2), ("2", 1, 2)]);
        let j = component_restrict(&f3, &["1"]).unwrap();
        let a1 = diagonal_config(&[("1", 1, 2)]);
        assert!(trace_set(&j, &a1).unwrap().len() <= trace_set(&f3, &a3).unwrap().len());
    }

    #[test]
    fn product_bound_on_index_split() {
        // |𝒳[I] ∩ A| ≤ |𝒳[I₁] ∩ A[I₁]| · |𝒳[I₂] ∩ A[I₂]| for I = I₁ ∪ I₂
        let f = triples();
        let a = {
            let mut a = IndexedPointSet::empty();
            a.push("1", vec![rat(1)]);
            a.push("1", vec![rat(2)]);
            a.push("2", vec![rat(1)]);
            a.push("3", vec![rat(1), rat(1)]);
            a
        };
        let whole = trace_set(&f, &a).unwrap().len();
        let f12 = component_restrict(&f, &["1", "2"]).unwrap();
        let f3 = component_restrict(&f, &["3"]).unwrap();
        let a12 = {
            let mut b = IndexedPointSet::empty();
            b.push("1", vec![rat(1)]);
            b.push("1", vec![rat(2)]);
            b.push("2", vec![rat(1)]);
            b
        };
        let a3 = {
            let mut b = IndexedPointSet::empty();
            b.push("3", vec![rat(1), rat(1)]);
            b
        };
        let c12 = trace_set(&f12, &a12).unwrap().len();
        let c3 = trace_set(&f3, &a3).unwrap().len();
        assert!(whole <= c12 * c3);
    }

    #[test]
    fn forced_decomposition_bound() {
        // |trace_set| ≤ Σ_J |forced(J-exact)|: the P_J partition
        let f = triples();
        let a = diagonal_config(&[("1", 1, 2), ("2", 1, 2)]);
        let pts = a.resolved(f.space()).unwrap();
        let traces = trace_set(&f, &a).unwrap();
        let mut per_class = std::collections::HashMap::new();
        for tr in &traces {
            *per_class
                .entry(hit_positions(&tr.bits, &pts))
                .or_insert(0usize) += 1;
        }
        let mut sum = 0usize;
        for subset in std::iter::once(Vec::new()).chain(nonempty_subsets(f.space().len())) {
            let labels: Vec<&str> = subset
                .iter()
                .map(|&p| f.space().labels()[p].as_str())
                .collect();
            sum += forced_trace_set(&f, &a, &labels).unwrap().len();
        }
        assert!(traces.len() <= sum);
        // and the exact partition classes add up to the total
        assert_eq!(per_class.values().sum::<usize>(), traces.len());
    }

    #[test]
    fn shatter_lower_examples() {
        let f = crosses();
        let r = shatter_lower(&f, 4, &[Strategy::Diagonal], 0).unwrap();
        assert_eq!(r.count, 11); // 1 + 4 + C(4,2)
        let r = shatter_lower(&f, 0, &[Strategy::Diagonal], 0).unwrap();
        assert_eq!(r.count, 1);
        // pairs: the anti-diagonal chain beats the diagonal
        let f = pairs();
        let r = shatter_lower(&f, 4, &Strategy::default_suite(), 0).unwrap();
        assert_eq!(r.count, 2 * 4 - 1); // empty + singletons + chain pairs
    }

    #[test]
    fn density_estimates_land_near_the_truth() {
        // pairs: counts 2t-1 fit slope near 1 (the anti-diagonal chain)
        let f = pairs();
        let ts: Vec<usize> = (2..=8).collect();
        let suite = [Strategy::Diagonal, Strategy::AntiDiagonal, Strategy::Grid];
        let rep = vc_density_estimate(&f, &ts, &suite, 0).unwrap();
        assert_eq!(rep.nearest, 1);
        assert!(
            (rep.slope - 1.0).abs() < 0.2,
            "pairs slope {} should be within 0.2 of 1",
            rep.slope
        );
        // crosses: counts binom(t,<=2); at desk scale the fitted slope is
        // pinned (the asymptotic 2 is approached only at much larger t)
        let f = crosses();
        let rep = vc_density_estimate(&f, &ts, &[Strategy::Diagonal], 0).unwrap();
        assert!(
            (rep.slope - 1.6143).abs() < 0.01,
            "crosses slope {} drifted from its frozen desk-scale value",
            rep.slope
        );
        assert_eq!(rep.nearest, 2);
        // degenerate input
        assert!(matches!(
            vc_density_estimate(&f, &[3], &[Strategy::Diagonal], 0),
            Err(FamilyError::DegenerateFit(_))
        ));
    }

    #[test]
    fn sauer_shelah_holds_on_trace_sets() {
        for (f, a) in [
            (crosses(), diagonal_config(&[("1", 2, 5)])),
            (pairs(), diagonal_config(&[("1", 2, 5)])),
            (
                triples(),
                diagonal_config(&[("1", 1, 2), ("2", 1, 2), ("3", 2, 2)]),
            ),
        ] {
            let traces = trace_set(&f, &a).unwrap();
            assert!(sauer_shelah_check(&traces, a.len()));
        }
    }

    #[test]
    fn empirical_vc_dim_examples() {
        // all 8 patterns on 3 points: VC dim 3
        let masks: Vec<u128> = (0..8).collect();
        assert_eq!(empirical_vc_dim(&masks, 3), 3);
        // singletons + empty on 4 points: VC dim 1
        let masks: Vec<u128> = vec![0, 1, 2, 4, 8];
        assert_eq!(empirical_vc_dim(&masks, 4), 1);
        assert_eq!(empirical_vc_dim(&[0], 4), 0);
    }

    #[test]
    fn family_json_round_trip() {
        let f = triples();
        let text = serde_json::to_string(&f).unwrap();
        let back: ParamFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["indices"][0]["label"], "1");
        assert_eq!(v["indices"][2]["dim"], 2);
        assert_eq!(v["param_dim"], 2);
    }

    #[test]
    fn config_json_round_trip() {
        let mut a = IndexedPointSet::empty();
        a.push("1", vec![frac(1, 2), rat(-3)]);
        a.push("2", vec![rat(0)]);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"[{"index":"1","coords":["1/2","-3"]},{"index":"2","coords":["0"]}]"#);
        let back: IndexedPointSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn duplicate_points_are_rejected_per_index() {
        let f = triples();
        let mut a = IndexedPointSet::empty();
        a.push("1", vec![rat(1)]);
        a.push("1", vec![rat(1)]);
        assert!(matches!(
            trace_set(&f, &a),
            Err(FamilyError::DuplicatePoint(_))
        ));
        // the same coordinates under different indices are fine
        let mut a = IndexedPointSet::empty();
        a.push("1", vec![rat(1)]);
        a.push("2", vec![rat(1)]);
        assert!(trace_set(&f, &a).is_ok());
    }

    #[test]
    fn csv_schema_is_stable() {
        let f = triples();
        let header = TraceReport::csv_header(f.space());
        assert_eq!(
            header,
            "t,count,forced_1,forced_2,forced_1+2,forced_3,forced_1+3,forced_2+3,forced_1+2+3,strategy,seed,millis"
        );
        let rep = shatter_lower(&f, 2, &[Strategy::Diagonal], 0).unwrap();
        let row = rep.csv_row();
        assert_eq!(row.split(',').count(), header.split(',').count());
    }
}
