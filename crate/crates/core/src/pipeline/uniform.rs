//! Recursive uniformity check.
//!
//! A component is uniform over its parameter set when (a) every fiber is
//! empty, or (b) its closure is a single flat family, it has a uniform
//! essential approximation, and for every sub-collection `J` of boundaries
//! one side of the piece `P_J` drops dimension everywhere and is itself
//! uniform, or (c) its closure has several flat families and each
//! intersection with one of them is uniform. The check reports the clause
//! trail; a failure names the first component and clause that broke.

use super::approx::approx_parts;
use super::closure::{closure_parts, SYNTH_CELL_BUDGET};
use super::PipelineError;
use crate::families::ParamFamily;
use crate::kernel::SemilinearSet;

/// Outcome of a uniformity check with the recursion trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformReport {
    pub uniform: bool,
    pub clauses: Vec<String>,
}

/// Check component `label` for uniformity over the family's parameter set.
pub fn check_uniform(f: &ParamFamily, label: &str) -> Result<UniformReport, PipelineError> {
    let pos = f.space().position(label)?;
    let m = f.space().dim_of(pos);
    let mut clauses = Vec::new();
    let uniform = check_rec(
        m,
        f.param_dim(),
        f.relation(pos),
        f.param_set(),
        label,
        0,
        &mut clauses,
    )?;
    Ok(UniformReport { uniform, clauses })
}

fn check_rec(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
    path: &str,
    depth: usize,
    out: &mut Vec<String>,
) -> Result<bool, PipelineError> {
    if depth > 2 * m + 4 {
        return Err(PipelineError::BudgetExceeded(format!(
            "uniformity recursion exceeded depth {} at {path}",
            2 * m + 4
        )));
    }
    let parts = closure_parts(m, n, x, y, SYNTH_CELL_BUDGET)?;
    if parts.is_empty() {
        out.push(format!("{path}: empty parameter set, vacuously uniform"));
        return Ok(true);
    }
    if parts.len() > 1 {
        out.push(format!(
            "{path}: closure synthesis splits the parameter set into {} parts",
            parts.len()
        ));
        return Ok(false);
    }
    let ann = &parts[0];
    if ann.flats.is_empty() {
        out.push(format!("{path}: every fiber is empty"));
        return Ok(true);
    }
    let l = ann.flats.len();
    if l > 1 {
        out.push(format!(
            "{path}: closure of length {l}, checking each constituent intersection"
        ));
        for (j, z) in ann.flats.iter().enumerate() {
            let xj = x.intersect(&z.as_total_set()).prune();
            if !check_rec(
                m,
                n,
                &xj,
                &ann.part,
                &format!("{path}∩Z{}", j + 1),
                depth + 1,
                out,
            )? {
                return Ok(false);
            }
        }
        return Ok(true);
    }

    // Single-flat closure: the essential approximation must itself be
    // uniform over the whole part, and every piece must drop dimension on
    // one side, recursively uniformly.
    let d = ann.flats[0].fiber_dim();
    let eas = approx_parts(m, n, x, ann, SYNTH_CELL_BUDGET)?;
    if eas.len() > 1 {
        out.push(format!(
            "{path}: essential approximation splits the parameter set into {} parts",
            eas.len()
        ));
        return Ok(false);
    }
    let ea = &eas[0];
    out.push(format!(
        "{path}: single flat of fiber dimension {d}, {} essential boundaries",
        ea.halfflats.len()
    ));
    let z_set = ann.flats[0].as_total_set();
    for pd in &ea.dims {
        let mut p = z_set.clone();
        for (j, h) in ea.halfflats.iter().enumerate() {
            if pd.mask >> j & 1 == 1 {
                p = p.intersect(&h.as_total_set());
            } else {
                p = p.subtract(&h.as_total_set());
            }
        }
        let (side, side_name) = if pd.meet < Some(d) {
            (p.intersect(x).prune(), "meet")
        } else if pd.diff < Some(d) {
            (p.subtract(x).prune(), "difference")
        } else {
            out.push(format!(
                "{path}: piece {} keeps dimension {d} on both sides",
                pd.mask
            ));
            return Ok(false);
        };
        if !check_rec(
            m,
            n,
            &side,
            &ea.part,
            &format!("{path}·P{}({side_name})", pd.mask),
            depth + 1,
            out,
        )? {
            return Ok(false);
        }
    }
    Ok(true)
}
