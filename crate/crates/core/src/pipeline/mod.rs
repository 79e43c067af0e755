//! Reduction pipeline from parametric semilinear families to simple form.
//!
//! The synthesizers ([`synth_uniform_closure`], [`synth_essential_approx`])
//! partition the parameter set and annotate each part with the flat families
//! describing the fibers; [`check_uniform`] verifies the recursive
//! uniformity property; [`decompose_at`] and [`deconstruct_at`] rewrite one
//! component at a time, guided by the lexicographically decreasing
//! complexity triple, with window certificates ([`window1_search`],
//! [`window2_search`]) justifying each rewrite on a nested parameter cell;
//! [`reduce_to_simple`] drives the rewriting to completion and converts the
//! surviving flat and half-flat components to simple form; and
//! [`theorem_exponent`] combines everything into the per-part exponent of a
//! family's shatter function.

mod approx;
mod closure;
mod simplify;
mod transforms;
mod uniform;
mod windows;

pub use approx::{synth_essential_approx, EssentialApproxAnn, HalfFlatFamilyAnn, PartDims};
pub use closure::{
    synth_uniform_closure, verify_closure_at, FlatFamilyAnn, UniformClosureAnn, SYNTH_CELL_BUDGET,
};
pub use simplify::ComponentShape;
pub use transforms::{decompose_at, deconstruct_at, StepKind, TransformRecord};
pub use uniform::{check_uniform, UniformReport};
pub use windows::{
    dyadic_clearance, verify_window1, verify_window2, window1_search, window1_search_with_depth,
    window2_search, window2_search_with_depth, WindowCert, WINDOW_DEPTH_BUDGET,
};

use crate::families::{restrict_params, FamilyError, ParamFamily};
use crate::kernel::{KernelError, SemilinearSet};
use crate::simple::{exponent, ExponentCertificate, SimpleError, SimpleFamily, SimpleIndex};
use approx::approx_parts;
use closure::closure_parts;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use simplify::classify_component;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("family is not uniform: {0}")]
    NotUniform(String),
    #[error("annotation invalid: {0}")]
    AnnotationInvalid(String),
    #[error("single-part annotation required: {0}")]
    NeedsSinglePart(String),
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Simple(#[from] SimpleError),
}

/// Complexity of a family: `alpha` is the largest closure fiber dimension
/// over the non-exceptional components, `beta` the largest closure length
/// among components attaining `alpha`, and `gamma` how many components
/// attain the pair. Constant-empty, flat, and half-flat components are
/// exceptional and count as `(0, 0)`; a family whose components are all
/// exceptional has triple `(0, 0, 0)` and is fully reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityTriple {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl ComplexityTriple {
    pub fn is_terminal(&self) -> bool {
        self.gamma == 0
    }

    /// Strict lexicographic comparison used by the descent argument.
    pub fn lex_less(&self, other: &ComplexityTriple) -> bool {
        (self.alpha, self.beta, self.gamma) < (other.alpha, other.beta, other.gamma)
    }
}

/// Per-component complexity: `None` for exceptional components, otherwise
/// the pair `(fiber dimension, closure length)` on the family's parameter
/// set. Errors when a component's closure needs a parameter partition.
pub fn component_complexity(
    f: &ParamFamily,
    label: &str,
) -> Result<Option<(usize, usize)>, PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    match classify_component(m, f.param_dim(), f.relation(pos), f.param_set())? {
        ComponentShape::Empty | ComponentShape::Flat(_) | ComponentShape::HalfFlat(_) => Ok(None),
        ComponentShape::General => {
            let parts = closure_parts(
                m,
                f.param_dim(),
                f.relation(pos),
                f.param_set(),
                SYNTH_CELL_BUDGET,
            )?;
            if parts.len() != 1 {
                return Err(PipelineError::NotUniform(format!(
                    "component '{label}': closure synthesis needs {} parameter parts",
                    parts.len()
                )));
            }
            let ann = &parts[0];
            Ok(Some((
                ann.fiber_dim().unwrap_or(0),
                ann.len(),
            )))
        }
    }
}

/// Complexity triple of the whole family over its parameter set.
pub fn complexity(f: &ParamFamily) -> Result<ComplexityTriple, PipelineError> {
    let mut best: Option<(usize, usize)> = None;
    let mut gamma = 0usize;
    for label in f.space().labels() {
        if let Some(pair) = component_complexity(f, label)? {
            match best {
                Some(b) if pair < b => {}
                Some(b) if pair == b => gamma += 1,
                _ => {
                    best = Some(pair);
                    gamma = 1;
                }
            }
        }
    }
    let (alpha, beta) = best.unwrap_or((0, 0));
    Ok(ComplexityTriple { alpha, beta, gamma })
}

/// One driver step: which transform ran where, the complexity before it,
/// the shatter constants, the window certificates, the parameter cell the
/// certificates hold on, and a hash of the family afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub index: String,
    pub triple: ComplexityTriple,
    pub new_labels: Vec<String>,
    pub r: usize,
    pub s: usize,
    pub windows: Vec<WindowCert>,
    pub u: SemilinearSet,
    pub family_hash: String,
}

/// A note attached to the final conversion of one component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversionNote {
    pub index: String,
    pub note: String,
}

/// Replayable record of a full reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub input_hash: String,
    pub steps: Vec<ReductionStep>,
    /// Constant-empty components dropped during conversion.
    pub dropped: Vec<String>,
    pub notes: Vec<ConversionNote>,
    pub output_hash: String,
}

impl ReductionTrace {
    /// Re-run the reduction on `f` and compare every recorded hash; the
    /// driver is deterministic, so a clean replay reproduces the trace.
    pub fn replay(&self, f: &ParamFamily) -> Result<bool, PipelineError> {
        let (_, again) = reduce_to_simple(f)?;
        Ok(again == *self)
    }
}

pub(crate) fn hash_json<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("serializable");
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

const DRIVER_STEP_BUDGET: usize = 64;

/// Resource budgets for the reduction driver. `cell_budget` caps the cell
/// and region counts the synthesizers may enumerate; `window_depth` caps how
/// many dyadic radii past the start the window searches may try. Budgets
/// gate errors only — they never change a successful result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    pub cell_budget: usize,
    pub window_depth: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            cell_budget: SYNTH_CELL_BUDGET,
            window_depth: WINDOW_DEPTH_BUDGET,
        }
    }
}

/// Reduce a uniform family to a simple one, tracking the nested parameter
/// cell on which the window certificates hold. Components of the final
/// family are converted in place: flats become points components, half-flats
/// become half-lines components, constant-empty components are dropped.
pub fn reduce_to_simple(
    f: &ParamFamily,
) -> Result<(SimpleFamily, ReductionTrace), PipelineError> {
    reduce_to_simple_with(f, &ReduceOptions::default())
}

/// [`reduce_to_simple`] with explicit budgets.
pub fn reduce_to_simple_with(
    f: &ParamFamily,
    opts: &ReduceOptions,
) -> Result<(SimpleFamily, ReductionTrace), PipelineError> {
    let input_hash = hash_json(f);
    let mut fam = f.clone();
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut last_triple: Option<ComplexityTriple> = None;

    loop {
        if steps.len() > DRIVER_STEP_BUDGET {
            return Err(PipelineError::BudgetExceeded(format!(
                "reduction driver exceeded {DRIVER_STEP_BUDGET} steps"
            )));
        }
        let triple = complexity(&fam)?;
        if let Some(prev) = last_triple {
            if !triple.lex_less(&prev) {
                return Err(PipelineError::AnnotationInvalid(format!(
                    "complexity triple failed to decrease: {prev:?} then {triple:?}"
                )));
            }
        }
        if triple.is_terminal() {
            break;
        }
        last_triple = Some(triple);

        // Least-label component attaining the maximal (alpha, beta).
        let labels: Vec<String> = fam.space().labels().to_vec();
        let mut target: Option<String> = None;
        for label in &labels {
            if component_complexity(&fam, label)? == Some((triple.alpha, triple.beta)) {
                target = Some(label.clone());
                break;
            }
        }
        let label = target.expect("gamma > 0 means some component attains the maximum");
        let pos = fam.space().position(&label)?;
        let m = fam.space().dim_of(pos);
        let n = fam.param_dim();

        let parts = closure_parts(m, n, fam.relation(pos), fam.param_set(), opts.cell_budget)?;
        if parts.len() != 1 {
            return Err(PipelineError::NotUniform(format!(
                "component '{label}': closure synthesis needs {} parameter parts",
                parts.len()
            )));
        }
        let ann = parts.into_iter().next().unwrap();

        let mut u = fam.param_set().clone();
        let mut windows: Vec<WindowCert> = Vec::new();
        let (next, record) = if triple.beta > 1 {
            // Window per retained constituent, nested so the cells shrink
            // together.
            let top = ann.flats[0].fiber_dim();
            let l_cut = (1..ann.flats.len())
                .find(|&k| ann.flats[k].fiber_dim() < top)
                .unwrap_or(ann.flats.len());
            for k in 0..l_cut {
                let others: Vec<FlatFamilyAnn> = ann
                    .flats
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, z)| z.clone())
                    .collect();
                let cert = window1_search_with_depth(
                    m,
                    n,
                    fam.relation(pos),
                    &u,
                    &ann.flats[k],
                    &others,
                    opts.window_depth,
                )?;
                u = cert.u.clone();
                windows.push(cert);
            }
            decompose_at(&fam, &label, &ann)?
        } else {
            let eas = approx_parts(m, n, fam.relation(pos), &ann, opts.cell_budget)?;
            if eas.len() != 1 {
                return Err(PipelineError::NotUniform(format!(
                    "component '{label}': essential approximation needs {} parameter parts",
                    eas.len()
                )));
            }
            let ea = eas.into_iter().next().unwrap();
            for j in 0..ea.halfflats.len() {
                let cert = window2_search_with_depth(
                    m,
                    n,
                    fam.relation(pos),
                    &u,
                    &ann.flats[0],
                    j,
                    &ea.halfflats,
                    opts.window_depth,
                )?;
                u = cert.u.clone();
                windows.push(cert);
            }
            deconstruct_at(&fam, &label, &ann, &ea)?
        };

        fam = restrict_params(&next, &u)?;
        steps.push(ReductionStep {
            kind: record.kind,
            index: record.index,
            triple,
            new_labels: record.new_labels,
            r: record.r,
            s: record.s,
            windows,
            u,
            family_hash: hash_json(&fam),
        });
    }

    // Convert the fully reduced family.
    let mut indices: Vec<SimpleIndex> = Vec::new();
    let mut dropped: Vec<String> = Vec::new();
    let mut notes: Vec<ConversionNote> = Vec::new();
    let labels: Vec<String> = fam.space().labels().to_vec();
    for (pos, label) in labels.iter().enumerate() {
        let m = fam.space().dim_of(pos);
        let shape =
            classify_component(m, fam.param_dim(), fam.relation(pos), fam.param_set())?;
        let (mut index, new_notes) = match shape {
            ComponentShape::Empty => {
                dropped.push(label.clone());
                notes.push(ConversionNote {
                    index: label.clone(),
                    note: "constant-empty component dropped; it traces nothing".to_string(),
                });
                continue;
            }
            ComponentShape::Flat(z) => simplify::flat_to_simple(&z),
            ComponentShape::HalfFlat(h) => simplify::halfflat_to_simple(&h)?,
            ComponentShape::General => {
                return Err(PipelineError::AnnotationInvalid(format!(
                    "component '{label}' is neither empty, flat, nor half-flat after reduction"
                )))
            }
        };
        index.label = label.clone();
        for note in new_notes {
            notes.push(ConversionNote {
                index: label.clone(),
                note,
            });
        }
        indices.push(index);
    }
    let simple = SimpleFamily::new(fam.param_dim(), indices);
    let output_hash = hash_json(&simple);
    let trace = ReductionTrace {
        input_hash,
        steps,
        dropped,
        notes,
        output_hash,
    };
    Ok((simple, trace))
}

/// Exponent of one parameter part together with its reduction artifacts.
#[derive(Debug, Clone)]
pub struct PartExponent {
    pub part: SemilinearSet,
    pub s: usize,
    pub trace: ReductionTrace,
    pub certificate: ExponentCertificate,
}

const REFINE_ROUND_BUDGET: usize = 6;

/// Shatter-function exponent of a family: partition the parameter set until
/// every component's closure (and, for single-flat closures, essential
/// approximation) is single-part, reduce each part to simple form, compute
/// the exponent there, and return the maximum with the per-part artifacts.
pub fn theorem_exponent(
    f: &ParamFamily,
) -> Result<(usize, Vec<PartExponent>), PipelineError> {
    theorem_exponent_with(f, &ReduceOptions::default())
}

/// [`theorem_exponent`] with explicit budgets.
pub fn theorem_exponent_with(
    f: &ParamFamily,
    opts: &ReduceOptions,
) -> Result<(usize, Vec<PartExponent>), PipelineError> {
    // Refine the parameter set.
    let mut parts: Vec<SemilinearSet> = vec![f.param_set().clone()];
    for _round in 0..REFINE_ROUND_BUDGET {
        let mut refined: Vec<SemilinearSet> = Vec::new();
        let mut changed = false;
        for part in &parts {
            let mut split: Option<Vec<SemilinearSet>> = None;
            for pos in 0..f.space().labels().len() {
                let m = f.space().dim_of(pos);
                let anns =
                    closure_parts(m, f.param_dim(), f.relation(pos), part, opts.cell_budget)?;
                if anns.len() > 1 {
                    split = Some(anns.into_iter().map(|a| a.part).collect());
                    break;
                }
                if anns.len() == 1 && anns[0].len() == 1 {
                    let eas = approx_parts(
                        m,
                        f.param_dim(),
                        f.relation(pos),
                        &anns[0],
                        opts.cell_budget,
                    )?;
                    if eas.len() > 1 {
                        split = Some(eas.into_iter().map(|a| a.part).collect());
                        break;
                    }
                }
            }
            match split {
                Some(pieces) => {
                    changed = true;
                    refined.extend(pieces.into_iter().filter(|p| !p.is_empty()));
                }
                None => refined.push(part.clone()),
            }
        }
        parts = refined;
        if !changed {
            break;
        }
    }

    let mut out: Vec<PartExponent> = Vec::new();
    let mut best = 0usize;
    for part in parts {
        let restricted = restrict_params(f, &part)?;
        let (simple, trace) = reduce_to_simple_with(&restricted, opts)?;
        let (s, certificate) = exponent(&simple)?;
        best = best.max(s);
        out.push(PartExponent {
            part,
            s,
            trace,
            certificate,
        });
    }
    Ok((best, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::CompositeSpace;
    use crate::kernel::{BasicCell, Rel};
    use crate::linalg::LinTerm;
    use crate::rat::Rat;

    fn t_(c: &[i64], k: i64) -> LinTerm {
        LinTerm::from_ints(c, k)
    }

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&k| Rat::from_integer(k.into())).collect()
    }

    fn one_component(label: &str, m: usize, n: usize, z: SemilinearSet) -> ParamFamily {
        ParamFamily::new(
            CompositeSpace::new(&[(label, m)]),
            n,
            SemilinearSet::full(n),
            vec![z],
        )
        .unwrap()
    }

    /// Crosses: members {x₁ = b₁} ∪ {x₂ = b₂} in R² over b ∈ R².
    fn crosses() -> ParamFamily {
        let z = SemilinearSet::from_cells(
            4,
            vec![
                BasicCell::new(4).with(t_(&[1, 0, -1, 0], 0), Rel::Eq),
                BasicCell::new(4).with(t_(&[0, 1, 0, -1], 0), Rel::Eq),
            ],
        );
        one_component("S", 2, 2, z)
    }

    /// Pairs on a line: members {b, b+1} ⊆ R over b ∈ R.
    fn pairs() -> ParamFamily {
        let z = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2).with(t_(&[1, -1], 0), Rel::Eq),
                BasicCell::new(2).with(t_(&[1, -1], -1), Rel::Eq),
            ],
        );
        one_component("P", 1, 1, z)
    }

    /// Cross with four diagonal points at b + (±1, ±1).
    fn cross_plus_points() -> ParamFamily {
        let mut cells = vec![
            BasicCell::new(4).with(t_(&[1, 0, -1, 0], 0), Rel::Eq),
            BasicCell::new(4).with(t_(&[0, 1, 0, -1], 0), Rel::Eq),
        ];
        for dx in [-1i64, 1] {
            for dy in [-1i64, 1] {
                cells.push(
                    BasicCell::new(4)
                        .with(t_(&[1, 0, -1, 0], -dx), Rel::Eq)
                        .with(t_(&[0, 1, 0, -1], -dy), Rel::Eq),
                );
            }
        }
        one_component("S", 2, 2, SemilinearSet::from_cells(4, cells))
    }

    /// Half-line members {x ≥ b} ⊆ R over b ∈ R.
    fn halfline() -> ParamFamily {
        let z = SemilinearSet::from_cell(BasicCell::new(2).with(t_(&[-1, 1], 0), Rel::Le));
        one_component("H", 1, 1, z)
    }

    /// Vertical-line members {x₁ = b} ⊆ R² over b ∈ R.
    fn line_family() -> ParamFamily {
        let z = SemilinearSet::from_cell(BasicCell::new(3).with(t_(&[1, 0, -1], 0), Rel::Eq));
        one_component("L", 2, 1, z)
    }

    /// Open quadrant above b with the point b + (1, 1) removed.
    fn quadrant() -> ParamFamily {
        let full = SemilinearSet::from_cell(
            BasicCell::new(4)
                .with(t_(&[-1, 0, 1, 0], 0), Rel::Lt)
                .with(t_(&[0, -1, 0, 1], 0), Rel::Lt),
        );
        let dot = SemilinearSet::from_cell(
            BasicCell::new(4)
                .with(t_(&[1, 0, -1, 0], -1), Rel::Eq)
                .with(t_(&[0, 1, 0, -1], -1), Rel::Eq),
        );
        one_component("Q", 2, 2, full.subtract(&dot))
    }

    /// Members switch shape across b₁ = 0: a horizontal line {x₂ = b₂} for
    /// b₁ < 0, the single point (b₁, b₂) for b₁ ≥ 0.
    fn mixing() -> ParamFamily {
        let line = BasicCell::new(4)
            .with(t_(&[0, 1, 0, -1], 0), Rel::Eq)
            .with(t_(&[0, 0, 1, 0], 0), Rel::Lt);
        let point = BasicCell::new(4)
            .with(t_(&[1, 0, -1, 0], 0), Rel::Eq)
            .with(t_(&[0, 1, 0, -1], 0), Rel::Eq)
            .with(t_(&[0, 0, -1, 0], 0), Rel::Le);
        one_component("M", 2, 2, SemilinearSet::from_cells(4, vec![line, point]))
    }

    #[test]
    fn closure_of_crosses_is_two_line_families() {
        let f = crosses();
        let parts = synth_uniform_closure(&f, "S").unwrap();
        assert_eq!(parts.len(), 1);
        let ann = &parts[0];
        assert_eq!(ann.len(), 2);
        assert!(ann.flats.iter().all(|z| z.fiber_dim() == 1));
        assert!(verify_closure_at(&f, "S", ann, &rats(&[2, -3])).unwrap());
    }

    #[test]
    fn closure_of_cross_plus_points_keeps_the_point_constituents() {
        let f = cross_plus_points();
        let parts = synth_uniform_closure(&f, "S").unwrap();
        assert_eq!(parts.len(), 1);
        let ann = &parts[0];
        assert_eq!(ann.len(), 6);
        let dims: Vec<usize> = ann.flats.iter().map(|z| z.fiber_dim()).collect();
        assert_eq!(dims, vec![1, 1, 0, 0, 0, 0]);
        assert!(verify_closure_at(&f, "S", ann, &rats(&[0, 5])).unwrap());
    }

    #[test]
    fn closure_partitions_the_mixing_family() {
        let f = mixing();
        let parts = synth_uniform_closure(&f, "M").unwrap();
        assert!(parts.len() >= 2, "expected a split, got {}", parts.len());
        for ann in &parts {
            assert_eq!(ann.len(), 1, "each part is a single flat family here");
            let expect_line = ann.sample[0] < Rat::from_integer(0.into());
            let want = usize::from(expect_line);
            assert_eq!(ann.flats[0].fiber_dim(), want);
        }
    }

    #[test]
    fn closure_of_constant_empty_family_is_empty_annotation() {
        let f = one_component("E", 1, 1, SemilinearSet::empty(2));
        let parts = synth_uniform_closure(&f, "E").unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].is_empty());
    }

    #[test]
    fn essential_approx_of_halfline_family() {
        let f = halfline();
        let closure = synth_uniform_closure(&f, "H").unwrap();
        assert_eq!(closure.len(), 1);
        assert_eq!(closure[0].len(), 1);
        assert_eq!(closure[0].flats[0].fiber_dim(), 1);
        let eas = synth_essential_approx(&f, "H", &closure[0]).unwrap();
        assert_eq!(eas.len(), 1);
        let ea = &eas[0];
        assert_eq!(ea.halfflats.len(), 1);
        assert_eq!(ea.halfflats[0].cut().rel, Rel::Le);
        // The fiber at b = 0 is exactly {x ≥ 0}.
        let h = ea.halfflats[0].fiber_halfflat(&rats(&[0])).unwrap();
        assert!(h.as_set().set_eq(&SemilinearSet::from_cell(
            BasicCell::new(1).with(t_(&[-1], 0), Rel::Le)
        )));
        // P_{∅} = Z ∖ H never meets X; P_{1} = H keeps dimension in X and
        // drops it in the difference.
        assert_eq!(ea.dims.len(), 2);
        assert_eq!(ea.dims[0].meet, None);
        assert_eq!(ea.dims[1].meet, Some(1));
        assert_eq!(ea.dims[1].diff, None);
    }

    #[test]
    fn essential_approx_of_flat_family_is_empty() {
        let f = line_family();
        let closure = synth_uniform_closure(&f, "L").unwrap();
        assert_eq!(closure.len(), 1);
        let eas = synth_essential_approx(&f, "L", &closure[0]).unwrap();
        assert_eq!(eas.len(), 1);
        assert!(eas[0].halfflats.is_empty());
        assert_eq!(eas[0].dims.len(), 1);
        assert_eq!(eas[0].dims[0].meet, Some(1));
        assert_eq!(eas[0].dims[0].diff, None);
    }

    #[test]
    fn essential_approx_of_quadrant_finds_both_walls() {
        let f = quadrant();
        let closure = synth_uniform_closure(&f, "Q").unwrap();
        assert_eq!(closure.len(), 1);
        assert_eq!(closure[0].len(), 1);
        assert_eq!(closure[0].flats[0].fiber_dim(), 2);
        let eas = synth_essential_approx(&f, "Q", &closure[0]).unwrap();
        assert_eq!(eas.len(), 1);
        let ea = &eas[0];
        assert_eq!(ea.halfflats.len(), 2, "walls x₁ = b₁ and x₂ = b₂");
        for h in &ea.halfflats {
            assert_eq!(h.cut().rel, Rel::Lt, "the quadrant is open");
        }
        // Only the full sub-collection keeps dimension on the meet side; its
        // difference is the removed point.
        for pd in &ea.dims {
            if pd.mask == 3 {
                assert_eq!(pd.meet, Some(2));
                assert_eq!(pd.diff, Some(0));
            } else {
                assert_eq!(pd.meet, None);
            }
        }
    }

    #[test]
    fn check_uniform_accepts_quadrant_and_rejects_mixing() {
        let q = check_uniform(&quadrant(), "Q").unwrap();
        assert!(q.uniform, "clauses: {:?}", q.clauses);
        let m = check_uniform(&mixing(), "M").unwrap();
        assert!(!m.uniform);
        assert!(m
            .clauses
            .iter()
            .any(|c| c.contains("splits the parameter set")));
    }

    #[test]
    fn check_uniform_flat_family_case_b_empty_approximation() {
        let r = check_uniform(&line_family(), "L").unwrap();
        assert!(r.uniform);
        assert!(r.clauses.iter().any(|c| c.contains("0 essential")));
    }

    #[test]
    fn window1_separates_the_cross_lines() {
        let f = crosses();
        let parts = synth_uniform_closure(&f, "S").unwrap();
        let ann = &parts[0];
        let others = vec![ann.flats[1].clone()];
        let cert = window1_search(2, 2, f.relation(0), f.param_set(), &ann.flats[0], &others)
            .unwrap();
        assert!(verify_window1(&cert, 2, 2, f.relation(0), &ann.flats[0], &others));
        assert!(!cert.u.is_empty());
    }

    #[test]
    fn window1_trivial_for_a_single_constant_flat() {
        let f = line_family();
        let parts = synth_uniform_closure(&f, "L").unwrap();
        let cert =
            window1_search(2, 1, f.relation(0), f.param_set(), &parts[0].flats[0], &[]).unwrap();
        assert!(verify_window1(&cert, 2, 1, f.relation(0), &parts[0].flats[0], &[]));
        assert_eq!(cert.radius, Rat::from_integer(1.into()));
    }

    #[test]
    fn window2_isolates_the_halfline_boundary() {
        let f = halfline();
        let closure = synth_uniform_closure(&f, "H").unwrap();
        let eas = synth_essential_approx(&f, "H", &closure[0]).unwrap();
        let hs = eas[0].halfflats.clone();
        let cert = window2_search(
            1,
            1,
            f.relation(0),
            f.param_set(),
            &closure[0].flats[0],
            0,
            &hs,
        )
        .unwrap();
        assert!(verify_window2(&cert, 1, f.relation(0), &closure[0].flats[0], 0, &hs));
    }

    #[test]
    fn decompose_crosses_matches_the_fiber_union() {
        let f = crosses();
        let parts = synth_uniform_closure(&f, "S").unwrap();
        let (g, rec) = decompose_at(&f, "S", &parts[0]).unwrap();
        assert_eq!(rec.kind, StepKind::Decompose);
        assert_eq!(rec.r, 3);
        assert_eq!(
            g.space().labels(),
            &["S.1".to_string(), "S.2".to_string(), "S.3".to_string()]
        );
        // The new fibers partition the old one at a sample parameter.
        let b = rats(&[1, 2]);
        let old = f.relation(0).substitute_tail(&b);
        let union = g
            .relation(0)
            .substitute_tail(&b)
            .union_(&g.relation(1).substitute_tail(&b))
            .union_(&g.relation(2).substitute_tail(&b));
        assert!(old.set_eq(&union));
        assert!(g.relation(2).is_empty(), "cross is covered by its closure");
    }

    #[test]
    fn decompose_single_flat_family_adds_empty_residue() {
        let f = line_family();
        let parts = synth_uniform_closure(&f, "L").unwrap();
        let (g, rec) = decompose_at(&f, "L", &parts[0]).unwrap();
        assert_eq!(rec.r, 2);
        assert_eq!(g.space().labels().len(), 2);
        assert!(g.relation(1).is_empty());
        let b = rats(&[4]);
        assert!(f
            .relation(0)
            .substitute_tail(&b)
            .set_eq(&g.relation(0).substitute_tail(&b)));
    }

    #[test]
    fn deconstruct_halfline_yields_halfflat_flat_and_empty_residues() {
        let f = halfline();
        let closure = synth_uniform_closure(&f, "H").unwrap();
        let eas = synth_essential_approx(&f, "H", &closure[0]).unwrap();
        let (g, rec) = deconstruct_at(&f, "H", &closure[0], &eas[0]).unwrap();
        assert_eq!(rec.kind, StepKind::Deconstruct);
        assert_eq!(rec.r, 4);
        assert_eq!(
            g.space().labels(),
            &[
                "H.h1".to_string(),
                "H.z".to_string(),
                "H.p0".to_string(),
                "H.p1".to_string()
            ]
        );
        let b = rats(&[-2]);
        assert!(g.relation(0).substitute_tail(&b).set_eq(&f.relation(0).substitute_tail(&b)));
        assert!(g.relation(2).is_empty());
        assert!(g.relation(3).is_empty());
        // Old fiber = (H.h1 fiber), a Boolean combination of the new ones.
        let old = f.relation(0).substitute_tail(&b);
        assert!(old.set_eq(&g.relation(0).substitute_tail(&b)));
    }

    #[test]
    fn deconstruct_quadrant_produces_the_seven_constituents() {
        let f = quadrant();
        let closure = synth_uniform_closure(&f, "Q").unwrap();
        let eas = synth_essential_approx(&f, "Q", &closure[0]).unwrap();
        let (g, rec) = deconstruct_at(&f, "Q", &closure[0], &eas[0]).unwrap();
        assert_eq!(rec.r, 7);
        assert_eq!(g.space().labels().len(), 7);
        // Reconstruction at a sample parameter: X = (P₃ side complemented
        // within its piece) — check via the recorded Boolean shape instead:
        // X = (H₁ ∩ H₂) ∖ P₃-part.
        let b = rats(&[0, 0]);
        let h1 = g.relation(0).substitute_tail(&b);
        let h2 = g.relation(1).substitute_tail(&b);
        let p3 = g.relation(6).substitute_tail(&b);
        let rebuilt = h1.intersect(&h2).subtract(&p3);
        assert!(f.relation(0).substitute_tail(&b).set_eq(&rebuilt));
    }

    #[test]
    fn complexity_triples_of_the_examples() {
        assert_eq!(
            complexity(&crosses()).unwrap(),
            ComplexityTriple {
                alpha: 1,
                beta: 2,
                gamma: 1
            }
        );
        assert_eq!(
            complexity(&quadrant()).unwrap(),
            ComplexityTriple {
                alpha: 2,
                beta: 1,
                gamma: 1
            }
        );
        // Flat and half-flat families are exceptional.
        assert_eq!(
            complexity(&line_family()).unwrap(),
            ComplexityTriple {
                alpha: 0,
                beta: 0,
                gamma: 0
            }
        );
        assert_eq!(
            complexity(&halfline()).unwrap(),
            ComplexityTriple {
                alpha: 0,
                beta: 0,
                gamma: 0
            }
        );
    }

    #[test]
    fn reduce_crosses_to_simple_has_exponent_two() {
        let f = crosses();
        let (simple, trace) = reduce_to_simple(&f).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].kind, StepKind::Decompose);
        assert_eq!(trace.dropped, vec!["S.3".to_string()]);
        assert_eq!(simple.indices.len(), 2);
        let (s, _) = exponent(&simple).unwrap();
        assert_eq!(s, 2);
        assert!(trace.replay(&f).unwrap());
    }

    #[test]
    fn reduce_pairs_to_simple_has_exponent_one() {
        let f = pairs();
        let (simple, trace) = reduce_to_simple(&f).unwrap();
        assert_eq!(simple.indices.len(), 2);
        let (s, _) = exponent(&simple).unwrap();
        assert_eq!(s, 1);
        assert!(!trace.steps.is_empty());
        for step in &trace.steps {
            assert!(step.r >= 1 && step.s >= 1);
        }
    }

    #[test]
    fn reduce_halfline_converts_in_place() {
        let f = halfline();
        let (simple, trace) = reduce_to_simple(&f).unwrap();
        assert!(trace.steps.is_empty(), "already exceptional");
        assert_eq!(simple.indices.len(), 1);
        assert_eq!(simple.indices[0].kind, crate::simple::IndexKind::HalfLines);
        // Member {x ≥ b} keeps its threshold b.
        assert_eq!(simple.indices[0].polys, vec![t_(&[1], 0)]);
    }

    #[test]
    fn theorem_exponent_splits_the_mixing_family() {
        let (s, parts) = theorem_exponent(&mixing()).unwrap();
        assert!(parts.len() >= 2);
        assert_eq!(s, 1);
    }

    #[test]
    fn reduction_trace_serializes_and_round_trips() {
        let f = crosses();
        let (_, trace) = reduce_to_simple(&f).unwrap();
        let text = serde_json::to_string(&trace).unwrap();
        let back: ReductionTrace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, trace);
    }
}
