//! Bounded exact enumeration of primitive vectors of a hyperbolic lattice.
//!
//! For a positive anchor `h` the slice `q(h,z) = c` meets `h^⊥` in a negative
//! definite form, so vectors of fixed square in the slice lie on an ellipsoid.
//! Each slice is searched with a Fincke–Pohst recursion over all coordinates
//! but a pivot, using exact rational interval bounds; the last free coordinate
//! is solved from the quadratic equation and the pivot from the slice
//! equation.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{rat, Rational};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};

/// Search window: anchor, bound on the pairing with the anchor, and the
/// target square (`q(z,z) = -square`; `0` means isotropic).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumWindow {
    pub anchor: LatticeVec,
    pub height_bound: u64,
    pub square: i64,
}

impl EnumWindow {
    pub fn new(anchor: LatticeVec, height_bound: u64, square: i64) -> Self {
        EnumWindow {
            anchor,
            height_bound,
            square,
        }
    }

    pub fn with_square(&self, square: i64) -> Self {
        EnumWindow {
            square,
            ..self.clone()
        }
    }
}

/// Precomputed data for the slice searches of one (lattice, anchor) pair.
///
/// With `g = G h` and a pivot coordinate `p` (`g_p != 0`), a point of the slice
/// `q(h,z) = c` is fixed by its other coordinates `y`: `g_p z = w(y)` with
/// `w_p = c - sum g_k y_k` and `w_k = g_p y_k`. Then `-q(w,w)` is a positive
/// definite quadratic `y^T A y + 2 c a^T y - c^2 G_pp` and the target
/// `q(z,z) = -d` reads `(y - c mu)^T A (y - c mu) = g_p^2 d + c^2 k0` with
/// `mu = -A^{-1} a` and `k0 = G_pp + a^T A^{-1} a`.
struct SliceSearch {
    rank: usize,
    /// permutation: position -> original coordinate; position 0 is the pivot
    perm: Vec<usize>,
    /// `G h` in permuted order
    coeff: Vec<i64>,
    /// LDL^T of `A` over the non-pivot positions (index i is position i+1)
    diag: Vec<Rational>,
    upper: Vec<Vec<Rational>>,
    mu: Vec<Rational>,
    k0: Rational,
}

impl SliceSearch {
    fn new(lattice: &QuadLattice, anchor: &[i64]) -> Result<Self> {
        let r = lattice.rank();
        let m = lattice.norm(anchor)?;
        if m <= 0 {
            return Err(Error::NotPositive(crate::arith::fmt_vec(anchor)));
        }
        let g = lattice.pairing_vector(anchor)?;
        let pivot = (0..r)
            .max_by_key(|&i| {
                (
                    g[i] != 0,
                    std::cmp::Reverse(g[i].abs()),
                    std::cmp::Reverse(i),
                )
            })
            .expect("rank is positive");
        let mut perm = vec![pivot];
        perm.extend((0..r).filter(|&i| i != pivot));
        let coeff: Vec<i64> = perm.iter().map(|&i| g[i]).collect();
        let gram = |a: usize, b: usize| BigInt::from(lattice.gram()[(perm[a], perm[b])]);
        let gp = BigInt::from(coeff[0]);

        // columns of M: position k -> g_p e_k - g_k e_p
        let n = r - 1;
        let col = |k: usize| -> Vec<BigInt> {
            let mut v = vec![BigInt::zero(); r];
            v[k + 1] = gp.clone();
            v[0] = -BigInt::from(coeff[k + 1]);
            v
        };
        let gmul = |v: &[BigInt]| -> Vec<BigInt> {
            (0..r)
                .map(|i| (0..r).fold(BigInt::zero(), |acc, j| acc + gram(i, j) * &v[j]))
                .collect()
        };
        let dot = |x: &[BigInt], y: &[BigInt]| {
            x.iter()
                .zip(y)
                .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
        };
        let cols: Vec<Vec<BigInt>> = (0..n).map(col).collect();
        let gcols: Vec<Vec<BigInt>> = cols.iter().map(|c| gmul(c)).collect();
        let a_mat: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Rational::from_integer(-dot(&cols[i], &gcols[j])))
                    .collect()
            })
            .collect();
        // linear coefficient per unit of c: -M^T G e_p
        let a_lin: Vec<Rational> = (0..n)
            .map(|i| {
                Rational::from_integer(
                    -gram(i + 1, 0) * &gp + gram(0, 0) * BigInt::from(coeff[i + 1]),
                )
            })
            .collect();

        let mut diag = vec![Rational::zero(); n];
        let mut upper = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let mut d = a_mat[i][i].clone();
            for k in 0..i {
                d -= &diag[k] * &upper[k][i] * &upper[k][i];
            }
            if !d.is_positive() {
                let s = lattice.signature();
                return Err(Error::WrongSignature {
                    expected_neg: r - 1,
                    pos: s.pos,
                    neg: s.neg,
                    zero: s.zero,
                });
            }
            for j in i + 1..n {
                let mut s = a_mat[i][j].clone();
                for k in 0..i {
                    s -= &diag[k] * &upper[k][i] * &upper[k][j];
                }
                upper[i][j] = s / &d;
            }
            diag[i] = d;
        }
        let (mu, k0) = if n == 0 {
            (vec![], Rational::from_integer(gram(0, 0)))
        } else {
            let inv =
                crate::arith::rational_inverse(&a_mat).expect("definite matrix is invertible");
            let ainv_a: Vec<Rational> = (0..n)
                .map(|i| (0..n).map(|j| &inv[i][j] * &a_lin[j]).sum())
                .collect();
            let k0 = Rational::from_integer(gram(0, 0))
                + a_lin
                    .iter()
                    .zip(&ainv_a)
                    .map(|(x, y)| x * y)
                    .sum::<Rational>();
            (ainv_a.into_iter().map(|v| -v).collect(), k0)
        };
        Ok(SliceSearch {
            rank: r,
            perm,
            coeff,
            diag,
            upper,
            mu,
            k0,
        })
    }

    /// All integer z (original coordinates, possibly imprimitive) with
    /// `q(h,z) = c` and `q(z,z) = -d`.
    fn slice(&self, c: i64, d: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let gp = self.coeff[0] as i128;
        let budget =
            Rational::from_integer(BigInt::from(gp * gp * d as i128)) + &self.k0 * rat(c) * rat(c);
        if budget.is_negative() {
            return out;
        }
        let centre: Vec<Rational> = self.mu.iter().map(|m| m * rat(c)).collect();
        let mut y = vec![0i64; self.rank - 1];
        if y.is_empty() {
            if budget.is_zero() {
                self.emit(c, &y, &mut out);
            }
            return out;
        }
        self.recurse(y.len() - 1, c, &centre, budget, &mut y, &mut out);
        out
    }

    fn emit(&self, c: i64, y: &[i64], out: &mut Vec<Vec<i64>>) {
        let rest: i128 = y
            .iter()
            .zip(&self.coeff[1..])
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        let num = c as i128 - rest;
        let den = self.coeff[0] as i128;
        if num % den != 0 {
            return;
        }
        let Ok(zp) = i64::try_from(num / den) else {
            return;
        };
        let mut orig = vec![0i64; self.rank];
        orig[self.perm[0]] = zp;
        for (k, &v) in y.iter().enumerate() {
            orig[self.perm[k + 1]] = v;
        }
        out.push(orig);
    }

    fn recurse(
        &self,
        level: usize,
        c: i64,
        centre0: &[Rational],
        budget: Rational,
        y: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let centre = self.centre(level, centre0, y);
        let d = &self.diag[level];
        if level == 0 {
            // solve d (t - centre)^2 = budget exactly
            let Some(s) = rational_sqrt(&(&budget / d)) else {
                return;
            };
            for t in [&centre + &s, &centre - &s] {
                if t.is_integer() {
                    if let Some(v) = t.to_integer().to_i64() {
                        y[0] = v;
                        self.emit(c, y, out);
                    }
                }
                if s.is_zero() {
                    break;
                }
            }
            y[0] = 0;
            return;
        }
        let Some((lo, hi)) = integer_interval(d, &centre, &budget) else {
            return;
        };
        for t in lo..=hi {
            y[level] = t;
            let dev = rat(t) - &centre;
            let used = d * &dev * &dev;
            self.recurse(level - 1, c, centre0, &budget - used, y, out);
        }
        y[level] = 0;
    }

    /// Conditional centre of coordinate `i` given the coordinates above it.
    fn centre(&self, i: usize, centre0: &[Rational], y: &[i64]) -> Rational {
        let mut s = centre0[i].clone();
        for j in i + 1..y.len() {
            if !self.upper[i][j].is_zero() {
                s -= &self.upper[i][j] * (rat(y[j]) - &centre0[j]);
            }
        }
        s
    }
}

/// Exact square root of a nonnegative rational, if it is a square.
fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

/// Integer range of t with `d (t - centre)^2 <= budget`, exactly.
fn integer_interval(d: &Rational, centre: &Rational, budget: &Rational) -> Option<(i64, i64)> {
    if budget.is_negative() {
        return None;
    }
    let ok = |t: i64| {
        let dev = rat(t) - centre;
        d * &dev * &dev <= *budget
    };
    let cf = centre.to_f64()?;
    let rf = (budget / d).to_f64()?.max(0.0).sqrt();
    // widen the float estimate by one on each side, then tighten exactly
    let mut lo = (cf - rf).floor() as i64 - 1;
    let mut hi = (cf + rf).ceil() as i64 + 1;
    while lo <= hi && !ok(lo) {
        lo += 1;
    }
    if lo > hi {
        return None;
    }
    while ok(lo - 1) {
        lo -= 1;
    }
    while !ok(hi) {
        hi -= 1;
    }
    while ok(hi + 1) {
        hi += 1;
    }
    Some((lo, hi))
}

fn validate(lattice: &QuadLattice, w: &EnumWindow) -> Result<()> {
    lattice.ensure_nondegenerate()?;
    lattice.ensure_hyperbolic()?;
    lattice.check_dim(&w.anchor)?;
    if lattice.norm(&w.anchor)? <= 0 {
        return Err(Error::NotPositive(w.anchor.to_string()));
    }
    if w.height_bound > i64::MAX as u64 / 4 {
        return Err(Error::InvalidWindow("height bound too large".into()));
    }
    Ok(())
}

fn run_slices(
    lattice: &QuadLattice,
    w: &EnumWindow,
    slices: std::ops::RangeInclusive<i64>,
    target_norm: i64,
) -> Result<Vec<LatticeVec>> {
    let search = SliceSearch::new(lattice, &w.anchor)?;
    let per_slice: Vec<Result<Vec<LatticeVec>>> = slices
        .into_par_iter()
        .map(|c| {
            let mut found = Vec::new();
            for z in search.slice(c, -target_norm) {
                let z = LatticeVec(z);
                if z.is_zero() || lattice.norm(&z)? != target_norm || z.content() != 1 {
                    continue;
                }
                found.push(lattice.canonical_wall(&w.anchor, &z)?);
            }
            Ok(found)
        })
        .collect();
    let mut all = Vec::new();
    for s in per_slice {
        all.extend(s?);
    }
    all.sort();
    all.dedup();
    Ok(all)
}

/// All primitive `z` with `q(z,z) = -d` and `0 <= q(h,z) <= H`, sign-canonical,
/// sorted and duplicate-free.
pub fn enum_negative_primitive(lattice: &QuadLattice, w: &EnumWindow) -> Result<Vec<LatticeVec>> {
    validate(lattice, w)?;
    if w.square <= 0 {
        return Err(Error::InvalidWindow(format!(
            "square must be positive for negative vectors, got {}",
            w.square
        )));
    }
    run_slices(lattice, w, 0..=w.height_bound as i64, -w.square)
}

/// All primitive isotropic `z` with `0 < q(h,z) <= H`, sorted.
pub fn enum_isotropic_primitive(lattice: &QuadLattice, w: &EnumWindow) -> Result<Vec<LatticeVec>> {
    validate(lattice, w)?;
    if w.square != 0 {
        return Err(Error::InvalidWindow(format!(
            "isotropic enumeration needs square 0, got {}",
            w.square
        )));
    }
    if w.height_bound == 0 {
        return Ok(vec![]);
    }
    run_slices(lattice, w, 1..=w.height_bound as i64, 0)
}

/// Negative vectors for several squares at once, keyed by square.
pub fn enum_negative_squares(
    lattice: &QuadLattice,
    anchor: &LatticeVec,
    height: u64,
    squares: &[i64],
) -> Result<Vec<(i64, Vec<LatticeVec>)>> {
    squares
        .iter()
        .map(|&d| {
            let w = EnumWindow::new(anchor.clone(), height, d);
            enum_negative_primitive(lattice, &w).map(|v| (d, v))
        })
        .collect()
}

/// Height of a vector relative to an anchor, `|q(h,z)|`.
pub fn height(lattice: &QuadLattice, anchor: &[i64], z: &[i64]) -> Result<u64> {
    Ok(lattice.pair(anchor, z)?.unsigned_abs())
}
