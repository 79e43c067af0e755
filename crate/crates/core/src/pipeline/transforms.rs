//! Structural transforms on parametric families.
//!
//! `decompose_at` splits a component whose closure has length `ℓ > 1` into
//! its intersections with the top block of closure constituents plus a
//! residue; `deconstruct_at` replaces a component with single-flat closure
//! by the half-flat families of its essential approximation, the carrier
//! flat, and one lower-dimensional piece per sub-collection of boundaries.
//! Both return the rewritten family together with the bookkeeping constants
//! of the shatter-function comparison: `r` for reconstructing the old
//! component from the new ones and `s` for the reverse direction through
//! the windows.

use super::approx::EssentialApproxAnn;
use super::closure::UniformClosureAnn;
use super::PipelineError;
use crate::families::{CompositeSpace, ParamFamily};
use crate::kernel::SemilinearSet;
use serde::{Deserialize, Serialize};

/// What a reduction step did to the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Decompose,
    Deconstruct,
}

/// Bookkeeping of one structural transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub kind: StepKind,
    pub index: String,
    /// Labels of the components that replaced `index`.
    pub new_labels: Vec<String>,
    /// Forward shatter constant: the old component is a Boolean combination
    /// of this many new ones.
    pub r: usize,
    /// Backward shatter constant through the window arguments.
    pub s: usize,
}

fn rebuild(
    f: &ParamFamily,
    pos: usize,
    new_parts: Vec<(String, usize, SemilinearSet)>,
) -> Result<ParamFamily, PipelineError> {
    let old = f.space();
    let mut parts: Vec<(String, usize)> = Vec::new();
    let mut relations: Vec<SemilinearSet> = Vec::new();
    for i in 0..old.labels().len() {
        if i == pos {
            for (label, dim, rel) in &new_parts {
                parts.push((label.clone(), *dim));
                relations.push(rel.clone());
            }
        } else {
            parts.push((old.labels()[i].clone(), old.dim_of(i)));
            relations.push(f.relation(i).clone());
        }
    }
    let borrowed: Vec<(&str, usize)> = parts.iter().map(|(l, d)| (l.as_str(), *d)).collect();
    let space = CompositeSpace::new(&borrowed);
    Ok(ParamFamily::new(
        space,
        f.param_dim(),
        f.param_set().clone(),
        relations,
    )?)
}

/// Split component `label` along its closure constituents. With fiber
/// dimensions sorted weakly decreasing, the cut point `ℓ′` is the smallest
/// index where the dimension drops (or the full length when it never does);
/// the new components are the intersections with the first `ℓ′` constituents
/// and the residue of the component off all of them.
pub fn decompose_at(
    f: &ParamFamily,
    label: &str,
    ann: &UniformClosureAnn,
) -> Result<(ParamFamily, TransformRecord), PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    let l = ann.flats.len();
    if l == 0 {
        return Err(PipelineError::AnnotationInvalid(
            "decomposition needs a nonempty closure".into(),
        ));
    }
    if !f.param_set().subtract(&ann.part).is_empty() {
        return Err(PipelineError::AnnotationInvalid(
            "closure annotation does not cover the parameter set".into(),
        ));
    }
    let top = ann.flats[0].fiber_dim();
    let l_cut = (1..l)
        .find(|&k| ann.flats[k].fiber_dim() < top)
        .unwrap_or(l);

    let x = f.relation(pos);
    let mut new_parts: Vec<(String, usize, SemilinearSet)> = Vec::new();
    let mut residue = x.clone();
    for (j, z) in ann.flats.iter().take(l_cut).enumerate() {
        let z_set = z.as_total_set();
        new_parts.push((
            format!("{label}.{}", j + 1),
            m,
            x.intersect(&z_set).prune(),
        ));
        residue = residue.subtract(&z_set);
    }
    new_parts.push((format!("{label}.{}", l_cut + 1), m, residue.prune()));

    let new_labels: Vec<String> = new_parts.iter().map(|(l, _, _)| l.clone()).collect();
    let record = TransformRecord {
        kind: StepKind::Decompose,
        index: label.to_string(),
        new_labels,
        r: l_cut + 1,
        s: (l_cut + 1) << l_cut,
    };
    Ok((rebuild(f, pos, new_parts)?, record))
}

/// Replace component `label` (single-flat closure, essential approximation
/// `ea`) by the `ℓ` half-flat families, the carrier flat, and for every
/// `J ⊆ [ℓ]` the side of the piece `P_J` that drops dimension: `P_J ∩ X`
/// when its dimension is below the fiber dimension, `P_J ∖ X` otherwise.
pub fn deconstruct_at(
    f: &ParamFamily,
    label: &str,
    closure: &UniformClosureAnn,
    ea: &EssentialApproxAnn,
) -> Result<(ParamFamily, TransformRecord), PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    if closure.len() != 1 {
        return Err(PipelineError::AnnotationInvalid(format!(
            "deconstruction needs a single-flat closure, got length {}",
            closure.len()
        )));
    }
    if !f.param_set().subtract(&ea.part).is_empty() {
        return Err(PipelineError::AnnotationInvalid(
            "essential-approximation annotation does not cover the parameter set".into(),
        ));
    }
    let z = &closure.flats[0];
    let d = z.fiber_dim();
    let l = ea.halfflats.len();
    if ea.dims.len() != 1 << l {
        return Err(PipelineError::AnnotationInvalid(format!(
            "essential approximation records {} side dimensions for {} half-flats",
            ea.dims.len(),
            l
        )));
    }

    let x = f.relation(pos);
    let z_set = z.as_total_set();
    let mut new_parts: Vec<(String, usize, SemilinearSet)> = Vec::new();
    for (j, h) in ea.halfflats.iter().enumerate() {
        new_parts.push((format!("{label}.h{}", j + 1), m, h.as_total_set()));
    }
    new_parts.push((format!("{label}.z"), m, z_set.clone()));
    for mask in 0..1usize << l {
        let mut p = z_set.clone();
        for (j, h) in ea.halfflats.iter().enumerate() {
            if mask >> j & 1 == 1 {
                p = p.intersect(&h.as_total_set());
            } else {
                p = p.subtract(&h.as_total_set());
            }
        }
        let side = if ea.dims[mask].meet < Some(d) {
            p.intersect(x)
        } else {
            p.subtract(x)
        };
        new_parts.push((format!("{label}.p{mask}"), m, side.prune()));
    }

    let new_labels: Vec<String> = new_parts.iter().map(|(l, _, _)| l.clone()).collect();
    let record = TransformRecord {
        kind: StepKind::Deconstruct,
        index: label.to_string(),
        new_labels,
        r: l + 1 + (1 << l),
        s: (l + 1 + (1 << l)) << l,
    };
    Ok((rebuild(f, pos, new_parts)?, record))
}
