//! Window search for the two separation lemmas.
//!
//! A window is a rational cube `C` in the member space together with a
//! parameter cell `U` such that, uniformly over `U`, the cube isolates one
//! closure constituent: for the first lemma `C ∩ X_b = C ∩ Z_b ≠ ∅` while
//! `C` misses the other closure flats; for the second `C ∩ X_b = C ∩ H_b ≠ ∅`
//! while every other half-flat of the approximation meets `C` in either all
//! of `C ∩ Z_b` or nothing. Candidates are dyadic cubes centered on an exact
//! rational witness sampled from the appropriate first-order set; every
//! candidate is certified symbolically, so a returned window is always
//! correct and failure is always a budget exhaustion, never a proof of
//! impossibility.

use super::approx::{remap_term, witness_set, HalfFlatFamilyAnn};
use super::closure::FlatFamilyAnn;
use super::PipelineError;
use crate::kernel::{Cube, Rel, SemilinearSet};
use crate::rat::{fmt_rat, parse_rat, Rat};
use num_traits::One;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dyadic shrink budget: candidate radii run through `2^-k` for `k` up to
/// this depth past the starting radius.
pub const WINDOW_DEPTH_BUDGET: usize = 12;

/// A certified window: cube center and radius, the parameter cell on which
/// the certificate holds, and the shatter-constant contribution of the
/// separation step it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCert {
    pub center: Vec<Rat>,
    pub radius: Rat,
    pub u: SemilinearSet,
    pub r: usize,
}

impl WindowCert {
    pub fn cube(&self) -> Cube {
        Cube::new(self.center.clone(), self.radius.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct WindowCertRepr {
    center: Vec<String>,
    radius: String,
    u: SemilinearSet,
    r: usize,
}

impl Serialize for WindowCert {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        WindowCertRepr {
            center: self.center.iter().map(fmt_rat).collect(),
            radius: fmt_rat(&self.radius),
            u: self.u.clone(),
            r: self.r,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for WindowCert {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = WindowCertRepr::deserialize(de)?;
        let mut center = Vec::with_capacity(repr.center.len());
        for s in &repr.center {
            center.push(parse_rat(s).map_err(D::Error::custom)?);
        }
        Ok(WindowCert {
            center,
            radius: parse_rat(&repr.radius).map_err(D::Error::custom)?,
            u: repr.u,
            r: repr.r,
        })
    }
}

fn pow2_inverse(k: usize) -> Rat {
    let mut r = Rat::one();
    let half = Rat::new(1.into(), 2.into());
    for _ in 0..k {
        r *= &half;
    }
    r
}

/// Search a window certifying the first separation lemma for the closure
/// constituent `z` of the component `x` against the other constituents
/// `others`, over the parameter cell `y`.
pub fn window1_search(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
    z: &FlatFamilyAnn,
    others: &[FlatFamilyAnn],
) -> Result<WindowCert, PipelineError> {
    window1_search_with_depth(m, n, x, y, z, others, WINDOW_DEPTH_BUDGET)
}

pub fn window1_search_with_depth(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
    z: &FlatFamilyAnn,
    others: &[FlatFamilyAnn],
    depth: usize,
) -> Result<WindowCert, PipelineError> {
    let y_cyl = y.cylinder(0, m);
    let x_total = x.intersect(&y_cyl).prune();
    let z_set = z.as_total_set();

    // Joint interior witness: a point of X on Z, off the other flats, and
    // outside the closure of the portion of Z it does not cover. Around such
    // a point a small enough product cube satisfies all three certificates.
    let mut good = x_total.intersect(&z_set);
    for w in others {
        good = good.subtract(&w.as_total_set());
    }
    good = good.prune();
    let rest = z_set.intersect(&y_cyl).subtract(&good).prune();
    let witness_region = good.subtract(&rest.closure()).prune();
    let p = witness_region.sample_point().map_err(|_| {
        PipelineError::AnnotationInvalid(
            "no interior witness for the separation window: the constituent is nowhere \
             relatively interior to the component"
                .into(),
        )
    })?;
    let a0 = p[..m].to_vec();
    let b0 = p[m..].to_vec();

    for k in 0..=depth {
        let r = pow2_inverse(k);
        let cube = Cube::new(a0.clone(), r.clone());
        let u = Cube::new(b0.clone(), r.clone()).as_set().intersect(y).prune();
        let cube_cyl = cube.as_set().cylinder(m, n);
        let u_cyl = u.cylinder(0, m);

        // (1) the cube meets every fiber of Z over U
        let hit = z_set.intersect(&cube_cyl).eliminate_head(m);
        if !u.subtract(&hit).is_empty() {
            continue;
        }
        // (2) inside the cube, X and Z agree over U
        if !x
            .sym_diff(&z_set)
            .intersect(&cube_cyl)
            .intersect(&u_cyl)
            .is_empty()
        {
            continue;
        }
        // (3) the cube misses every other constituent over U
        if others.iter().any(|w| {
            !w.as_total_set()
                .intersect(&cube_cyl)
                .intersect(&u_cyl)
                .is_empty()
        }) {
            continue;
        }
        return Ok(WindowCert {
            center: a0,
            radius: r,
            u,
            r: 2,
        });
    }
    Err(PipelineError::SearchBudgetExceeded(format!(
        "window search exhausted dyadic depth {depth}; the separation lemma guarantees a \
         window exists, so a larger budget will eventually find one"
    )))
}

/// Re-check a window certificate for the first separation lemma.
pub fn verify_window1(
    cert: &WindowCert,
    m: usize,
    n: usize,
    x: &SemilinearSet,
    z: &FlatFamilyAnn,
    others: &[FlatFamilyAnn],
) -> bool {
    let _ = n;
    let cube_cyl = cert.cube().as_set().cylinder(m, cert.u.dim());
    let u_cyl = cert.u.cylinder(0, m);
    let z_set = z.as_total_set();
    let hit = z_set.intersect(&cube_cyl).eliminate_head(m);
    cert.u.subtract(&hit).is_empty()
        && x.sym_diff(&z_set)
            .intersect(&cube_cyl)
            .intersect(&u_cyl)
            .is_empty()
        && others.iter().all(|w| {
            w.as_total_set()
                .intersect(&cube_cyl)
                .intersect(&u_cyl)
                .is_empty()
        })
}

/// Search a window certifying the second separation lemma for the half-flat
/// `hs[h_idx]` of the essential approximation of `x` (with carrier `z`),
/// over the parameter cell `y`.
pub fn window2_search(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
    z: &FlatFamilyAnn,
    h_idx: usize,
    hs: &[HalfFlatFamilyAnn],
) -> Result<WindowCert, PipelineError> {
    window2_search_with_depth(m, n, x, y, z, h_idx, hs, WINDOW_DEPTH_BUDGET)
}

#[allow(clippy::too_many_arguments)]
pub fn window2_search_with_depth(
    m: usize,
    n: usize,
    x: &SemilinearSet,
    y: &SemilinearSet,
    z: &FlatFamilyAnn,
    h_idx: usize,
    hs: &[HalfFlatFamilyAnn],
    depth: usize,
) -> Result<WindowCert, PipelineError> {
    let h = &hs[h_idx];
    let y_cyl = y.cylinder(0, m);
    let x_total = x.intersect(&y_cyl).prune();

    // Essentiality witnesses (b, a, ε), restricted to boundary points away
    // from the other boundaries so the cube can take a side of each.
    let mut wset = witness_set(m, n, &x_total, z, h, y)?;
    for (i, hi) in hs.iter().enumerate() {
        if i == h_idx {
            continue;
        }
        let bd = hi.boundary()?;
        let mut cell = crate::kernel::BasicCell::new(n + m + 1);
        for row in bd.total().rows() {
            cell.push(
                remap_term(row, n + m + 1, |j| if j < m { n + j } else { j - m }),
                Rel::Eq,
            );
        }
        wset = wset.subtract(&SemilinearSet::from_cell(cell));
    }
    wset = wset.prune();
    let wit = wset.sample_point().map_err(|_| {
        PipelineError::AnnotationInvalid(
            "no essentiality witness away from the other boundaries".into(),
        )
    })?;
    let b0 = wit[..n].to_vec();
    let a0 = wit[n..n + m].to_vec();
    let eps0 = wit[n + m].clone();

    // Start at the first dyadic radius at most half the witness radius.
    let mut k0 = 0usize;
    while pow2_inverse(k0) * Rat::from_integer(2.into()) > eps0 {
        k0 += 1;
    }

    let h_set = h.as_total_set();
    let z_set = z.as_total_set();
    for k in k0..=k0 + depth {
        let r = pow2_inverse(k);
        let cube = Cube::new(a0.clone(), r.clone());
        let u = Cube::new(b0.clone(), r.clone()).as_set().intersect(y).prune();
        let cube_cyl = cube.as_set().cylinder(m, n);
        let u_cyl = u.cylinder(0, m);

        // (1) the cube meets every fiber of H over U
        let hit = h_set.intersect(&cube_cyl).eliminate_head(m);
        if !u.subtract(&hit).is_empty() {
            continue;
        }
        // (2) inside the cube, X and H agree over U
        if !x
            .sym_diff(&h_set)
            .intersect(&cube_cyl)
            .intersect(&u_cyl)
            .is_empty()
        {
            continue;
        }
        // (3) every other half-flat meets the cube in C ∩ Z_b or not at all
        let ok = hs.iter().enumerate().all(|(i, hi)| {
            if i == h_idx {
                return true;
            }
            let hi_set = hi.as_total_set();
            let inside = hi_set.intersect(&cube_cyl).intersect(&u_cyl);
            inside.is_empty()
                || z_set
                    .subtract(&hi_set)
                    .intersect(&cube_cyl)
                    .intersect(&u_cyl)
                    .is_empty()
        });
        if !ok {
            continue;
        }
        return Ok(WindowCert {
            center: a0,
            radius: r,
            u,
            r: 2,
        });
    }
    Err(PipelineError::SearchBudgetExceeded(format!(
        "window search exhausted dyadic depth {depth} below radius {}; the separation lemma \
         guarantees a window exists, so a larger budget will eventually find one",
        fmt_rat(&eps0)
    )))
}

/// Re-check a window certificate for the second separation lemma.
pub fn verify_window2(
    cert: &WindowCert,
    m: usize,
    x: &SemilinearSet,
    z: &FlatFamilyAnn,
    h_idx: usize,
    hs: &[HalfFlatFamilyAnn],
) -> bool {
    let h = &hs[h_idx];
    let cube_cyl = cert.cube().as_set().cylinder(m, cert.u.dim());
    let u_cyl = cert.u.cylinder(0, m);
    let h_set = h.as_total_set();
    let z_set = z.as_total_set();
    let hit = h_set.intersect(&cube_cyl).eliminate_head(m);
    cert.u.subtract(&hit).is_empty()
        && x.sym_diff(&h_set)
            .intersect(&cube_cyl)
            .intersect(&u_cyl)
            .is_empty()
        && hs.iter().enumerate().all(|(i, hi)| {
            if i == h_idx {
                return true;
            }
            let hi_set = hi.as_total_set();
            let inside = hi_set.intersect(&cube_cyl).intersect(&u_cyl);
            inside.is_empty()
                || z_set
                    .subtract(&hi_set)
                    .intersect(&cube_cyl)
                    .intersect(&u_cyl)
                    .is_empty()
        })
}

/// Smallest wall distance heuristic used by tests: the largest dyadic radius
/// whose cube at `center` stays inside `set`.
pub fn dyadic_clearance(set: &SemilinearSet, center: &[Rat], depth: usize) -> Option<Rat> {
    for k in 0..=depth {
        let r = pow2_inverse(k);
        let cube = Cube::new(center.to_vec(), r.clone());
        if cube.as_set().subtract(set).is_empty() {
            return Some(r);
        }
    }
    None
}
