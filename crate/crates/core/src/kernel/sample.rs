//! Exact rational point sampling for basic cells.
//!
//! Elimination runs forward recording one frame per variable; a concrete
//! point is then rebuilt backwards, choosing midpoints between the tightest
//! bounds. Every choice is deterministic.

use super::cell::{BasicCell, Rel};
use crate::linalg::LinTerm;
use crate::rat::{frac, rat, Rat};
use num_traits::{One, Zero};

enum Frame {
    /// x_i equals the recorded expression in the remaining variables.
    Eq { at: usize, expr: LinTerm },
    /// x_i is bracketed by the recorded bounds (term, is_strict).
    Bounds {
        at: usize,
        lowers: Vec<(LinTerm, bool)>,
        uppers: Vec<(LinTerm, bool)>,
    },
}

/// Returns a point of `cell`, or `None` when the cell is empty.
pub fn sample_cell(cell: &BasicCell) -> Option<Vec<Rat>> {
    let mut cur = cell.reduce()?;
    let mut frames: Vec<Frame> = Vec::new();

    while cur.dim() > 0 {
        let n = cur.dim();
        // Prefer an equality pivot.
        let pivot = cur
            .eq
            .iter()
            .find_map(|t| t.coeffs.iter().position(|c| !c.is_zero()).map(|i| (i, t.clone())));
        if let Some((i, t)) = pivot {
            let c = t.coeffs[i].clone();
            let mut rest = t.clone();
            rest.coeffs[i] = Rat::zero();
            let expr = rest.scale(&(-Rat::one() / c));
            let next = cur.map_terms(n - 1, |a| a.substitute_var(i, &expr));
            frames.push(Frame::Eq {
                at: i,
                expr: expr.drop_var(i),
            });
            cur = next.reduce()?;
            continue;
        }

        // No equalities mention any variable; choose the cheapest variable.
        let cost = |i: usize| {
            let lows = cur
                .lt
                .iter()
                .chain(cur.le.iter())
                .filter(|t| t.coeffs[i] < Rat::zero())
                .count();
            let ups = cur
                .lt
                .iter()
                .chain(cur.le.iter())
                .filter(|t| t.coeffs[i] > Rat::zero())
                .count();
            lows * ups
        };
        let i = (0..n).min_by_key(|&i| (cost(i), i)).unwrap();

        let mut lowers: Vec<(LinTerm, bool)> = Vec::new();
        let mut uppers: Vec<(LinTerm, bool)> = Vec::new();
        let mut kept = BasicCell::new(n - 1);
        let mut combos: Vec<(LinTerm, bool, LinTerm, bool)> = Vec::new();
        for (t, rel) in cur
            .lt
            .iter()
            .map(|t| (t, Rel::Lt))
            .chain(cur.le.iter().map(|t| (t, Rel::Le)))
        {
            let c = t.coeffs[i].clone();
            if c.is_zero() {
                kept.push(t.drop_var(i), rel);
                continue;
            }
            let mut rest = t.clone();
            rest.coeffs[i] = Rat::zero();
            let bound = rest.scale(&(-Rat::one() / &c)).drop_var(i);
            let strict = rel == Rel::Lt;
            if c > Rat::zero() {
                uppers.push((bound, strict));
            } else {
                lowers.push((bound, strict));
            }
        }
        for (lo, ls) in &lowers {
            for (up, us) in &uppers {
                combos.push((lo.clone(), *ls, up.clone(), *us));
            }
        }
        for (lo, ls, up, us) in combos {
            // lower <(=) x_i <(=) upper collapses to lower - upper REL 0.
            let rel = if ls || us { Rel::Lt } else { Rel::Le };
            kept.push(lo.sub(&up), rel);
        }
        for t in &cur.eq {
            kept.push(t.drop_var(i), Rel::Eq);
        }
        frames.push(Frame::Bounds {
            at: i,
            lowers,
            uppers,
        });
        cur = kept.reduce()?;
    }

    // Rebuild the point back-to-front.
    let mut p: Vec<Rat> = Vec::new();
    for frame in frames.iter().rev() {
        match frame {
            Frame::Eq { at, expr } => {
                let v = expr.eval(&p);
                p.insert(*at, v);
            }
            Frame::Bounds { at, lowers, uppers } => {
                let lo = lowers
                    .iter()
                    .map(|(t, s)| (t.eval(&p), *s))
                    .max_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
                let up = uppers
                    .iter()
                    .map(|(t, s)| (t.eval(&p), *s))
                    .min_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
                let v = match (lo, up) {
                    (None, None) => rat(0),
                    (Some((l, ls)), None) => {
                        if ls {
                            l + rat(1)
                        } else {
                            l
                        }
                    }
                    (None, Some((u, us))) => {
                        if us {
                            u - rat(1)
                        } else {
                            u
                        }
                    }
                    (Some((l, _)), Some((u, _))) => (l + u) * frac(1, 2),
                };
                p.insert(*at, v);
            }
        }
    }
    Some(p)
}
