//! Conversion of flat and half-flat components to simple form.
//!
//! After the reduction driver has exhausted its transforms, every surviving
//! component is constant-empty, a flat family, or a half-flat family. A
//! change of member coordinates (constant across the parameters, hence
//! trace-preserving fiber by fiber) rewrites a flat family as a tuple of
//! affine coordinate polynomials — a points component — and a half-flat
//! family as the same with a final half-line coordinate, normalized so the
//! free ray points upward.

use super::approx::HalfFlatFamilyAnn;
use super::closure::{closure_parts, FlatFamilyAnn, SYNTH_CELL_BUDGET};
use super::PipelineError;
use crate::kernel::{cells_of, Atom, Rel, SemilinearSet};
use crate::linalg::{rank_of, rref_eqs, LinTerm};
use crate::rat::Rat;
use crate::simple::{IndexKind, SimpleIndex};
use num_traits::Zero;

/// Shape of a component over a parameter set.
#[derive(Debug, Clone)]
pub enum ComponentShape {
    /// Every fiber is empty.
    Empty,
    Flat(FlatFamilyAnn),
    HalfFlat(HalfFlatFamilyAnn),
    /// None of the above.
    General,
}

/// Decide whether a component is constant-empty, a flat family, or a
/// half-flat family over `y`.
pub(crate) fn classify_component(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
) -> Result<ComponentShape, PipelineError> {
    let y_cyl = y.cylinder(0, m);
    let xr = x.intersect(&y_cyl).prune();
    if xr.is_empty() {
        return Ok(ComponentShape::Empty);
    }
    let parts = closure_parts(m, n, x, y, SYNTH_CELL_BUDGET)?;
    if parts.len() != 1 || parts[0].flats.len() != 1 {
        return Ok(ComponentShape::General);
    }
    let z = parts[0].flats[0].clone();
    let z_restricted = z.as_total_set().intersect(&y_cyl);
    if xr.set_eq(&z_restricted) {
        return Ok(ComponentShape::Flat(z));
    }

    // Half-flat candidates: walls of the cells of the restricted component,
    // reduced modulo the carrier, in both orientations and both strictness
    // levels.
    let mut walls: Vec<LinTerm> = Vec::new();
    for (cell, _) in cells_of(&xr) {
        for t in cell.lt.iter().chain(cell.le.iter()) {
            let w = z.total().system().reduce_term(t).canonical_wall();
            if w.is_const() || w.coeffs[..m].iter().all(|c| c.is_zero()) {
                continue;
            }
            if !walls.contains(&w) {
                walls.push(w);
            }
        }
    }
    for w in walls {
        for (term, rel) in [
            (w.clone(), Rel::Lt),
            (w.clone(), Rel::Le),
            (w.neg(), Rel::Lt),
            (w.neg(), Rel::Le),
        ] {
            let h = HalfFlatFamilyAnn::new(z.clone(), Atom::new(term, rel))?;
            if xr.set_eq(&h.as_total_set().intersect(&y_cyl)) {
                return Ok(ComponentShape::HalfFlat(h));
            }
        }
    }
    Ok(ComponentShape::General)
}

/// Solve the residual coordinates of a flat family after the change of
/// basis `x = T x′`: with `kernel_basis` spanning the fiber direction space
/// and `completion` the remaining columns of `T`, every completion
/// coordinate is an affine function of the parameters, returned in order.
fn solved_polys(
    m: usize,
    n: usize,
    rows: &[LinTerm],
    completion: &[Vec<Rat>],
) -> Vec<LinTerm> {
    let c = completion.len();
    // Row j of the residual system: Σ_r (A_j · w_r) x″_r + B_j · b + c_j = 0.
    let mut residual: Vec<LinTerm> = Vec::new();
    for row in rows {
        let mut t = LinTerm::zero(c + n);
        for (r, w) in completion.iter().enumerate() {
            t.coeffs[r] = row.coeffs[..m]
                .iter()
                .zip(w)
                .map(|(a, b)| a * b)
                .sum::<Rat>();
        }
        for k in 0..n {
            t.coeffs[c + k] = row.coeffs[m + k].clone();
        }
        t.constant = row.constant.clone();
        residual.push(t);
    }
    let sys = rref_eqs(c + n, &residual);
    let mut polys = Vec::with_capacity(c);
    for r in 0..c {
        // The completion columns have full rank, so x″_r is pivoted; its
        // reduction modulo the system is an affine function of b alone
        // (consistency rows vanish on the parameter part).
        let red = sys.reduce_term(&LinTerm::var(c + n, r));
        debug_assert!(red.coeffs[..c].iter().all(|v| v.is_zero()));
        let mut f = LinTerm::zero(n);
        for k in 0..n {
            f.coeffs[k] = red.coeffs[c + k].clone();
        }
        f.constant = red.constant;
        polys.push(f);
    }
    polys
}

/// Greedily extend a direction basis to all of member space with standard
/// unit vectors; returns the chosen completion columns.
fn complete_basis(m: usize, basis: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut current: Vec<Vec<Rat>> = basis.to_vec();
    let mut completion = Vec::new();
    for i in 0..m {
        if rank_of(&current) == m {
            break;
        }
        let mut e = vec![Rat::zero(); m];
        e[i] = Rat::from_integer(1.into());
        current.push(e.clone());
        if rank_of(&current) == current.len() {
            completion.push(e);
        } else {
            current.pop();
        }
    }
    completion
}

/// Rewrite a flat family as a points component: one affine polynomial per
/// non-fiber coordinate. A full-dimensional family (no polynomials) is
/// replaced by the constant point at the origin of a one-dimensional member
/// space, which traces identically.
pub(crate) fn flat_to_simple(z: &FlatFamilyAnn) -> (SimpleIndex, Vec<String>) {
    let m = z.member_dim();
    let n = z.param_dim();
    let mut notes = Vec::new();
    let xrows: Vec<Vec<Rat>> = z.total().rows().iter().map(|r| r.coeffs[..m].to_vec()).collect();
    let kernel_basis = rref_eqs_from_rows(m, &xrows).nullspace_basis();
    let completion = complete_basis(m, &kernel_basis);
    let mut polys = solved_polys(m, n, z.total().rows(), &completion);
    if polys.is_empty() {
        notes.push(
            "full-dimensional fibers replaced by the constant point 0, which traces identically"
                .to_string(),
        );
        polys.push(LinTerm::zero(n));
    }
    (
        SimpleIndex {
            label: String::new(),
            kind: IndexKind::Points,
            polys,
        },
        notes,
    )
}

/// Rewrite a half-flat family as a half-lines component: the residual
/// polynomials followed by the half-line threshold, with the free ray
/// normalized to point upward (negating the cut coordinate when needed) and
/// strict cuts closed.
pub(crate) fn halfflat_to_simple(
    h: &HalfFlatFamilyAnn,
) -> Result<(SimpleIndex, Vec<String>), PipelineError> {
    let z = h.flat();
    let m = z.member_dim();
    let n = z.param_dim();
    let mut notes = Vec::new();

    let xrows: Vec<Vec<Rat>> = z.total().rows().iter().map(|r| r.coeffs[..m].to_vec()).collect();
    let kernel_basis = rref_eqs_from_rows(m, &xrows).nullspace_basis();
    let cut = h.cut();
    let cut_x: Vec<Rat> = cut.term.coeffs[..m].to_vec();
    let dot = |v: &[Rat]| -> Rat { cut_x.iter().zip(v).map(|(a, b)| a * b).sum() };

    // Split the fiber directions into the cut direction and the boundary
    // directions (annotation validity guarantees the cut meets the fibers).
    let pivot = kernel_basis
        .iter()
        .position(|v| !dot(v).is_zero())
        .ok_or_else(|| {
            PipelineError::AnnotationInvalid(
                "half-flat cut vanishes on the fiber directions".into(),
            )
        })?;
    let lambda = dot(&kernel_basis[pivot]);
    let mut directions: Vec<Vec<Rat>> = Vec::new();
    for (i, v) in kernel_basis.iter().enumerate() {
        if i == pivot {
            continue;
        }
        let scale = dot(v) / &lambda;
        let adjusted: Vec<Rat> = v
            .iter()
            .zip(&kernel_basis[pivot])
            .map(|(vi, pi)| vi - &scale * pi)
            .collect();
        directions.push(adjusted);
    }
    directions.push(kernel_basis[pivot].clone());

    let completion = complete_basis(m, &directions);
    let mut polys = solved_polys(m, n, z.total().rows(), &completion);

    // The cut in the new coordinates: λ x′_cut + Σ_r μ_r x″_r + cut_b(b),
    // with the residuals substituted by their solved polynomials.
    let mut e = LinTerm::zero(n);
    for k in 0..n {
        e.coeffs[k] = cut.term.coeffs[m + k].clone();
    }
    e.constant = cut.term.constant.clone();
    for (r, w) in completion.iter().enumerate() {
        let mu = dot(w);
        if !mu.is_zero() {
            e = e.add(&polys[r].scale(&mu));
        }
    }
    // Member condition: λ y + e(b) REL 0. With λ < 0 the ray is bounded
    // below by −e/λ already; with λ > 0 it is bounded above, so the cut
    // coordinate is negated, giving the threshold e/λ.
    let threshold = if lambda > Rat::zero() {
        notes.push("half-line orientation flipped to point upward".to_string());
        e.scale(&(Rat::from_integer(1.into()) / &lambda))
    } else {
        e.scale(&(Rat::from_integer((-1).into()) / &lambda))
    };
    if cut.rel == Rel::Lt {
        notes.push("strict half-flat cut closed during conversion".to_string());
    }
    polys.push(threshold);
    Ok((
        SimpleIndex {
            label: String::new(),
            kind: IndexKind::HalfLines,
            polys,
        },
        notes,
    ))
}

fn rref_eqs_from_rows(arity: usize, rows: &[Vec<Rat>]) -> crate::linalg::RrefSystem {
    let terms: Vec<LinTerm> = rows
        .iter()
        .map(|r| LinTerm {
            coeffs: r.clone(),
            constant: Rat::zero(),
        })
        .collect();
    rref_eqs(arity, &terms)
}
