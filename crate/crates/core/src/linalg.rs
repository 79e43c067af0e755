//! Affine terms and exact Gaussian elimination.

use crate::rat::{fmt_rat, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Affine form `coeffs · x + constant` over a fixed ambient arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinTerm {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl LinTerm {
    pub fn zero(arity: usize) -> Self {
        LinTerm {
            coeffs: vec![Rat::zero(); arity],
            constant: Rat::zero(),
        }
    }

    pub fn constant(arity: usize, c: Rat) -> Self {
        let mut t = LinTerm::zero(arity);
        t.constant = c;
        t
    }

    /// The coordinate function `x_i`.
    pub fn var(arity: usize, i: usize) -> Self {
        let mut t = LinTerm::zero(arity);
        t.coeffs[i] = Rat::one();
        t
    }

    /// Builds from integer data, mostly for tests and the corpus.
    pub fn from_ints(coeffs: &[i64], constant: i64) -> Self {
        LinTerm {
            coeffs: coeffs.iter().map(|&c| crate::rat::rat(c)).collect(),
            constant: crate::rat::rat(constant),
        }
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, p: &[Rat]) -> Rat {
        debug_assert_eq!(p.len(), self.arity());
        let mut v = self.constant.clone();
        for (c, x) in self.coeffs.iter().zip(p) {
            if !c.is_zero() {
                v += c * x;
            }
        }
        v
    }

    pub fn is_const(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn neg(&self) -> Self {
        LinTerm {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            constant: -self.constant.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity(), other.arity());
        LinTerm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        LinTerm {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            constant: &self.constant * k,
        }
    }

    /// Divides by the gcd of the integerized coefficients so that the term has
    /// coprime integer entries. The sign is preserved. Keeping atoms in this
    /// primitive form bounds coefficient growth across elimination rounds.
    pub fn normalize(&self) -> Self {
        let mut lcm = BigInt::one();
        for c in self.coeffs.iter().chain(std::iter::once(&self.constant)) {
            lcm = lcm.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        let scaled: Vec<BigInt> = self
            .coeffs
            .iter()
            .chain(std::iter::once(&self.constant))
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        for v in &scaled {
            gcd = gcd.gcd(v);
        }
        if gcd.is_zero() {
            return LinTerm::zero(self.arity());
        }
        let k = Rat::new(lcm, gcd);
        self.scale(&k)
    }

    /// Primitive form with positive leading nonzero coefficient; identifies a
    /// term with its negation (useful for wall deduplication).
    pub fn canonical_wall(&self) -> Self {
        let n = self.normalize();
        let lead = n
            .coeffs
            .iter()
            .chain(std::iter::once(&n.constant))
            .find(|c| !c.is_zero());
        match lead {
            Some(c) if c.is_negative() => n.neg(),
            _ => n,
        }
    }

    /// Substitutes `x_i := expr` (expr must not mention `x_i`), then removes
    /// coordinate `i`. Result arity is one less.
    pub fn substitute_var(&self, i: usize, expr: &LinTerm) -> LinTerm {
        debug_assert!(expr.coeffs[i].is_zero());
        let ci = self.coeffs[i].clone();
        let mut t = if ci.is_zero() {
            self.clone()
        } else {
            let mut t = self.clone();
            for (k, e) in expr.coeffs.iter().enumerate() {
                if !e.is_zero() {
                    t.coeffs[k] = &t.coeffs[k] + &(&ci * e);
                }
            }
            t.constant = &t.constant + &(&ci * &expr.constant);
            t.coeffs[i] = Rat::zero();
            t
        };
        t.coeffs.remove(i);
        t
    }

    /// Drops coordinate `i` (which must have zero coefficient).
    pub fn drop_var(&self, i: usize) -> LinTerm {
        debug_assert!(self.coeffs[i].is_zero());
        let mut t = self.clone();
        t.coeffs.remove(i);
        t
    }

    /// Inserts `k` fresh (zero-coefficient) coordinates at position `at`.
    pub fn insert_vars(&self, at: usize, k: usize) -> LinTerm {
        let mut coeffs = Vec::with_capacity(self.arity() + k);
        coeffs.extend_from_slice(&self.coeffs[..at]);
        coeffs.extend(std::iter::repeat(Rat::zero()).take(k));
        coeffs.extend_from_slice(&self.coeffs[at..]);
        LinTerm {
            coeffs,
            constant: self.constant.clone(),
        }
    }

    /// Fixes the last `vals.len()` coordinates to the given values.
    pub fn substitute_tail(&self, vals: &[Rat]) -> LinTerm {
        let keep = self.arity() - vals.len();
        let mut constant = self.constant.clone();
        for (c, v) in self.coeffs[keep..].iter().zip(vals) {
            if !c.is_zero() {
                constant += c * v;
            }
        }
        LinTerm {
            coeffs: self.coeffs[..keep].to_vec(),
            constant,
        }
    }

    /// Fixes the first `vals.len()` coordinates to the given values.
    pub fn substitute_head(&self, vals: &[Rat]) -> LinTerm {
        let k = vals.len();
        let mut constant = self.constant.clone();
        for (c, v) in self.coeffs[..k].iter().zip(vals) {
            if !c.is_zero() {
                constant += c * v;
            }
        }
        LinTerm {
            coeffs: self.coeffs[k..].to_vec(),
            constant,
        }
    }

    pub fn render(&self, vars: &[String]) -> String {
        let mut parts = Vec::new();
        for (c, v) in self.coeffs.iter().zip(vars) {
            if !c.is_zero() {
                parts.push(format!("{}*{v}", fmt_rat(c)));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(fmt_rat(&self.constant));
        }
        parts.join(" + ")
    }
}

/// Row-reduced system of affine equations `row = 0`, canonicalized so two
/// systems with the same solution set have identical rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RrefSystem {
    pub arity: usize,
    pub rows: Vec<LinTerm>,
    pub pivots: Vec<usize>,
    pub inconsistent: bool,
}

/// Gauss–Jordan reduction over the rationals.
pub fn rref_eqs(arity: usize, eqs: &[LinTerm]) -> RrefSystem {
    let mut rows: Vec<LinTerm> = eqs.to_vec();
    let mut out: Vec<LinTerm> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut inconsistent = false;
    for col in 0..arity {
        let Some(pos) = rows.iter().position(|r| !r.coeffs[col].is_zero()) else {
            continue;
        };
        let mut piv = rows.swap_remove(pos);
        let inv = Rat::one() / piv.coeffs[col].clone();
        piv = piv.scale(&inv);
        for r in rows.iter_mut() {
            let c = r.coeffs[col].clone();
            if !c.is_zero() {
                *r = r.sub(&piv.scale(&c));
            }
        }
        for r in out.iter_mut() {
            let c = r.coeffs[col].clone();
            if !c.is_zero() {
                *r = r.sub(&piv.scale(&c));
            }
        }
        out.push(piv);
        pivots.push(col);
    }
    for r in &rows {
        // Leftover rows have no variable part.
        if !r.constant.is_zero() {
            inconsistent = true;
        }
    }
    // Canonicalize each row to primitive integer form (pivot stays positive:
    // it was 1 before normalization, and normalize preserves sign).
    let out = out.iter().map(|r| r.normalize()).collect();
    RrefSystem {
        arity,
        rows: out,
        pivots,
        inconsistent,
    }
}

impl RrefSystem {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// A particular solution (free variables set to 0). `None` if inconsistent.
    pub fn particular_point(&self) -> Option<Vec<Rat>> {
        if self.inconsistent {
            return None;
        }
        let mut p = vec![Rat::zero(); self.arity];
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            // row: a*x_col + (free part, all zero here) + const = 0
            p[col] = -(&row.constant / &row.coeffs[col]);
        }
        Some(p)
    }

    /// Basis of the solution set's direction space.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rat>> {
        let pivot_set: std::collections::HashSet<usize> = self.pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.arity {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); self.arity];
            v[free] = Rat::one();
            for (row, &col) in self.rows.iter().zip(&self.pivots) {
                if !row.coeffs[free].is_zero() {
                    v[col] = -(&row.coeffs[free] / &row.coeffs[col]);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Reduces `t` modulo the row space: eliminates every pivot coordinate.
    pub fn reduce_term(&self, t: &LinTerm) -> LinTerm {
        let mut t = t.clone();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let c = t.coeffs[col].clone();
            if !c.is_zero() {
                let k = &c / &row.coeffs[col];
                t = t.sub(&row.scale(&k));
            }
        }
        t
    }
}

/// Rank of a plain rational matrix given by rows.
pub fn rank_of(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let arity = rows[0].len();
    let eqs: Vec<LinTerm> = rows
        .iter()
        .map(|r| LinTerm {
            coeffs: r.clone(),
            constant: Rat::zero(),
        })
        .collect();
    rref_eqs(arity, &eqs).rank()
}

/// Solves `A x = b` (A given by rows). Returns any solution.
pub fn solve_linear(a_rows: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let arity = a_rows.first().map(|r| r.len()).unwrap_or(0);
    let eqs: Vec<LinTerm> = a_rows
        .iter()
        .zip(b)
        .map(|(r, bv)| LinTerm {
            coeffs: r.clone(),
            constant: -bv.clone(),
        })
        .collect();
    rref_eqs(arity, &eqs).particular_point()
}
