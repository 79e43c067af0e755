//! JSON form of semilinear sets:
//! `{"dim": m, "cells": [{"eq": [[a1..am,b]...], "lt": [...], "le": [...]}]}`
//! with every rational rendered as a string `"p"` or `"p/q"`. The atom vector
//! `[a1..am, b]` encodes `a·x + b REL 0`. Round-trips are bit-exact.

use super::cell::{BasicCell, Rel};
use super::set::SemilinearSet;
use super::KernelError;
use crate::linalg::LinTerm;
use crate::rat::{fmt_rat, parse_rat};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct CellRepr {
    #[serde(default)]
    eq: Vec<Vec<String>>,
    #[serde(default)]
    lt: Vec<Vec<String>>,
    #[serde(default)]
    le: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SetRepr {
    dim: usize,
    cells: Vec<CellRepr>,
}

pub(crate) fn term_to_vec(t: &LinTerm) -> Vec<String> {
    t.coeffs
        .iter()
        .chain(std::iter::once(&t.constant))
        .map(fmt_rat)
        .collect()
}

pub(crate) fn term_from_vec(dim: usize, v: &[String]) -> Result<LinTerm, KernelError> {
    if v.len() != dim + 1 {
        return Err(KernelError::BadJson(format!(
            "atom vector has {} entries, want {}",
            v.len(),
            dim + 1
        )));
    }
    let mut vals = Vec::with_capacity(v.len());
    for s in v {
        vals.push(parse_rat(s).map_err(KernelError::BadRational)?);
    }
    let constant = vals.pop().expect("dim + 1 entries");
    Ok(LinTerm {
        coeffs: vals,
        constant,
    })
}

fn to_repr(s: &SemilinearSet) -> SetRepr {
    SetRepr {
        dim: s.dim(),
        cells: s
            .cells
            .iter()
            .map(|c| CellRepr {
                eq: c.eq.iter().map(term_to_vec).collect(),
                lt: c.lt.iter().map(term_to_vec).collect(),
                le: c.le.iter().map(term_to_vec).collect(),
            })
            .collect(),
    }
}

fn from_repr(r: &SetRepr) -> Result<SemilinearSet, KernelError> {
    let mut cells = Vec::with_capacity(r.cells.len());
    for c in &r.cells {
        let mut cell = BasicCell::new(r.dim);
        for v in &c.eq {
            cell.push(term_from_vec(r.dim, v)?, Rel::Eq);
        }
        for v in &c.lt {
            cell.push(term_from_vec(r.dim, v)?, Rel::Lt);
        }
        for v in &c.le {
            cell.push(term_from_vec(r.dim, v)?, Rel::Le);
        }
        cells.push(cell);
    }
    Ok(SemilinearSet::from_cells(r.dim, cells))
}

impl Serialize for SemilinearSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_repr(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SemilinearSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SetRepr::deserialize(deserializer)?;
        from_repr(&repr).map_err(D::Error::custom)
    }
}

/// Canonical JSON text of a set.
pub fn set_to_json(s: &SemilinearSet) -> String {
    serde_json::to_string(&to_repr(s)).expect("set serialization cannot fail")
}

pub fn set_from_json(text: &str) -> Result<SemilinearSet, KernelError> {
    let repr: SetRepr =
        serde_json::from_str(text).map_err(|e| KernelError::BadJson(e.to_string()))?;
    from_repr(&repr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;

    #[test]
    fn round_trip_is_bit_exact() {
        let s = SemilinearSet::from_cells(
            2,
            vec![
                BasicCell::new(2)
                    .with(
                        LinTerm {
                            coeffs: vec![frac(1, 3), frac(-7, 2)],
                            constant: frac(5, 6),
                        },
                        Rel::Lt,
                    )
                    .with(LinTerm::from_ints(&[1, 1], 0), Rel::Eq),
                BasicCell::new(2).with(LinTerm::from_ints(&[0, 2], -3), Rel::Le),
            ],
        );
        let text = set_to_json(&s);
        let back = set_from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(set_to_json(&back), text);
    }

    #[test]
    fn schema_shape() {
        let s = SemilinearSet::from_cell(BasicCell::new(1).with(LinTerm::from_ints(&[2], 1), Rel::Lt));
        let v: serde_json::Value = serde_json::from_str(&set_to_json(&s)).unwrap();
        assert_eq!(v["dim"], 1);
        assert_eq!(v["cells"][0]["lt"][0][0], "2");
        assert_eq!(v["cells"][0]["lt"][0][1], "1");
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(
            set_from_json("{\"dim\": 1, \"cells\": [{\"eq\": [[\"1\"]]}]}"),
            Err(KernelError::BadJson(_))
        ));
        assert!(matches!(
            set_from_json("{\"dim\": 1, \"cells\": [{\"eq\": [[\"x\", \"1\"]]}]}"),
            Err(KernelError::BadRational(_))
        ));
        assert!(set_from_json("not json").is_err());
        // missing relation keys default to empty
        let s = set_from_json("{\"dim\": 2, \"cells\": [{}]}").unwrap();
        assert!(s.set_eq(&SemilinearSet::full(2)));
    }
}
