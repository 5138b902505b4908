//! Closed geodesics cut out by walls in rank-3 hyperbolic lattices.
//!
//! For a wall `z` the complement `N = z^⊥` carries a binary form of signature
//! (1,1). When it is anisotropic its proper automorphism group is infinite
//! cyclic; the generator comes from the smallest solution of
//! `t^2 - Δ u^2 = 4` and translates the geodesic `ℙ⁺(N ⊗ ℝ)` by
//! `ℓ = arccosh(t/2)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rational_inverse, BigVec, IntMatrix, Rational};
use crate::enumeration::{enum_negative_primitive, EnumWindow};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};

/// Proper automorph of a binary form `a x^2 + 2b xy + c y^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryAutomorph {
    pub gram: IntMatrix,
    /// discriminant of the primitive form `(a, 2b, c) / content`
    #[serde(with = "crate::arith::big_int_serde")]
    pub discriminant: BigInt,
    #[serde(with = "crate::arith::big_int_serde")]
    pub t: BigInt,
    #[serde(with = "crate::arith::big_int_serde")]
    pub u: BigInt,
    /// rows of the 2x2 matrix acting on column vectors
    pub matrix: Vec<BigVec>,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `log lambda_max`
    pub length: f64,
}

impl BinaryAutomorph {
    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.matrix[i].0[j]
    }

    fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        let e = |i, j| self.entry(i, j).to_f64().unwrap_or(f64::INFINITY);
        vec![
            e(0, 0) * x[0] + e(0, 1) * x[1],
            e(1, 0) * x[0] + e(1, 1) * x[1],
        ]
    }
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Smallest `u > 0` (with its `t > 0`) solving `t^2 - Δ u^2 = 4`; `Δ` positive
/// and not a square.
fn norm_four_solution(delta: &BigInt) -> (BigInt, BigInt) {
    let four = BigInt::from(4);
    if *delta <= BigInt::from(16) {
        // Lagrange's criterion needs sqrt(Δ) > 4; tiny cases by search
        let mut u = BigInt::one();
        loop {
            let v = delta * &u * &u + &four;
            if is_square(&v) {
                return (v.sqrt(), u);
            }
            u += 1;
        }
    }
    // continued fraction of sqrt(Δ); every primitive solution is a convergent
    let a0 = delta.sqrt();
    let (mut m, mut d, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let mut best: Option<(BigInt, BigInt)> = None;
    loop {
        if let Some((_, u)) = &best {
            if q > *u {
                return best.unwrap();
            }
        }
        let v = &p * &p - delta * &q * &q;
        let cand = if v == four {
            Some((p.clone(), q.clone()))
        } else if v.is_one() {
            Some((&p * 2, &q * 2))
        } else {
            None
        };
        if let Some(c) = cand {
            if best.as_ref().is_none_or(|b| c.1 < b.1) {
                best = Some(c);
            }
        }
        m = &d * &a - &m;
        d = (delta - &m * &m) / &d;
        a = (&a0 + &m) / &d;
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
}

/// Fundamental proper automorph of an anisotropic binary form of signature
/// (1,1), given by its Gram matrix `[[a,b],[b,c]]`.
pub fn form_automorph(gram: &IntMatrix) -> Result<BinaryAutomorph> {
    if gram.rows() != 2 || gram.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: gram.rows(),
        });
    }
    if gram[(0, 1)] != gram[(1, 0)] {
        return Err(Error::NotSymmetric);
    }
    let (a, b, c) = (
        BigInt::from(gram[(0, 0)]),
        BigInt::from(gram[(0, 1)]),
        BigInt::from(gram[(1, 1)]),
    );
    if &b * &b - &a * &c <= BigInt::zero() {
        return Err(Error::Precondition(
            "binary form is not of signature (1,1)".into(),
        ));
    }
    let bb = &b * 2;
    let content = a.gcd(&bb).gcd(&c);
    let (a1, b1, c1) = (&a / &content, &bb / &content, &c / &content);
    let delta = &b1 * &b1 - &a1 * &c1 * 4;
    if is_square(&delta) {
        return Err(Error::CuspBounded(format!(
            "form [[{a},{b}],[{b},{c}]] represents zero"
        )));
    }
    let (t, u) = norm_four_solution(&delta);
    let m = [
        [(&t - &b1 * &u) / 2, -(&c1 * &u)],
        [&a1 * &u, (&t + &b1 * &u) / 2],
    ];
    // exact check M^T G M = G
    let g = [[a.clone(), b.clone()], [b.clone(), c.clone()]];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = BigInt::zero();
            for k in 0..2 {
                for l in 0..2 {
                    s += &m[k][i] * &g[k][l] * &m[l][j];
                }
            }
            if s != g[i][j] {
                return Err(Error::NotIsometry);
            }
        }
    }
    let tf = t.to_f64().unwrap_or(f64::INFINITY);
    let det = (&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0])
        .to_f64()
        .unwrap_or(f64::NAN);
    let disc = (tf * tf - 4.0 * det).max(0.0).sqrt();
    let lambda_max = (tf + disc) / 2.0;
    // product of the eigenvalues is det = 1; avoids cancellation in t - disc
    let lambda_min = det / lambda_max;
    let length = if tf < 1e150 {
        (tf / 2.0).acosh()
    } else {
        lambda_max.ln()
    };
    Ok(BinaryAutomorph {
        gram: gram.clone(),
        discriminant: delta,
        t,
        u,
        matrix: m.into_iter().map(|r| BigVec(r.to_vec())).collect(),
        lambda_max,
        lambda_min,
        length,
    })
}

/// Closed geodesic `ℙ⁺(z^⊥)` in a rank-3 lattice of signature (1,2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub plane: IntMatrix,
    pub wall: LatticeVec,
    pub complement_basis: Vec<LatticeVec>,
    pub complement_gram: IntMatrix,
    pub automorph: BinaryAutomorph,
    pub length: f64,
    /// `arccosh q(x, g x)` at the base point
    pub length_check: f64,
    /// normalized point on the geodesic, ambient coordinates
    pub base_point: Vec<f64>,
    /// unit tangent at the base point, ambient coordinates
    pub direction: Vec<f64>,
    /// smallest cusp height along one period, once computed
    pub cusp_clearance: Option<f64>,
}

impl GeodesicReport {
    /// Point at arc length `s` from the base point.
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        let (ch, sh) = (s.cosh(), s.sinh());
        self.base_point
            .iter()
            .zip(&self.direction)
            .map(|(x, v)| ch * x + sh * v)
            .collect()
    }

    /// The automorph extended to the ambient space by fixing the wall, as a
    /// rational matrix on column vectors.
    pub fn ambient_automorph(&self) -> Result<Vec<Vec<Rational>>> {
        let b: Vec<&LatticeVec> = vec![
            &self.complement_basis[0],
            &self.complement_basis[1],
            &self.wall,
        ];
        let bm: Vec<Vec<Rational>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| Rational::from_integer(b[j][i].into()))
                    .collect()
            })
            .collect();
        let inv = rational_inverse(&bm).ok_or(Error::Degenerate)?;
        let mut d = vec![vec![Rational::zero(); 3]; 3];
        for i in 0..2 {
            for j in 0..2 {
                d[i][j] = Rational::from_integer(self.automorph.entry(i, j).clone());
            }
        }
        d[2][2] = Rational::one();
        let mul = |x: &Vec<Vec<Rational>>, y: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
            (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| (0..3).map(|k| &x[i][k] * &y[k][j]).sum())
                        .collect()
                })
                .collect()
        };
        Ok(mul(&mul(&bm, &d), &inv))
    }
}

/// Eigenvector of `[[a,b],[b,c]]` for eigenvalue `lam`.
fn eigvec(a: f64, b: f64, c: f64, lam: f64) -> [f64; 2] {
    if b != 0.0 {
        if (lam - a).abs() >= (lam - c).abs() {
            [b, lam - a]
        } else {
            [lam - c, b]
        }
    } else if (a - lam).abs() <= (c - lam).abs() {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

pub(crate) fn ensure_plane(p: &QuadLattice) -> Result<()> {
    p.ensure_nondegenerate()?;
    let s = p.signature();
    if p.rank() != 3 || s.as_tuple() != (1, 2, 0) {
        return Err(Error::WrongSignature {
            expected_neg: 2,
            pos: s.pos,
            neg: s.neg,
            zero: s.zero,
        });
    }
    Ok(())
}

/// Length of the closed geodesic cut out by the wall `z`.
pub fn closed_geodesic_length(p: &QuadLattice, z: &LatticeVec) -> Result<GeodesicReport> {
    ensure_plane(p)?;
    p.check_dim(z)?;
    if p.norm(z)? >= 0 {
        return Err(Error::NotNegative(z.to_string()));
    }
    let comp = p.orthogonal_complement(z)?;
    let auto = form_automorph(&comp.gram)?;
    let (a, b, c) = (
        comp.gram[(0, 0)] as f64,
        comp.gram[(0, 1)] as f64,
        comp.gram[(1, 1)] as f64,
    );
    let mid = (a + c) / 2.0;
    let rad = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    let qn =
        |x: &[f64], y: &[f64]| a * x[0] * y[0] + b * (x[0] * y[1] + x[1] * y[0]) + c * x[1] * y[1];
    let mut x = eigvec(a, b, c, mid + rad);
    let mut v = eigvec(a, b, c, mid - rad);
    let nx = qn(&x, &x).sqrt();
    let nv = (-qn(&v, &v)).sqrt();
    x = [x[0] / nx, x[1] / nx];
    v = [v[0] / nv, v[1] / nv];
    let gx = auto.apply_f64(&x);
    let length_check = qn(&x, &gx).max(1.0).acosh();
    let lift = |w: [f64; 2]| -> Vec<f64> {
        (0..3)
            .map(|i| w[0] * comp.basis[0][i] as f64 + w[1] * comp.basis[1][i] as f64)
            .collect()
    };
    Ok(GeodesicReport {
        plane: p.gram().clone(),
        wall: z.clone(),
        length: auto.length,
        length_check,
        base_point: lift(x),
        direction: lift(v),
        complement_basis: comp.basis,
        complement_gram: comp.gram,
        automorph: auto,
        cusp_clearance: None,
    })
}

/// Closed geodesics for every wall of the given squares within the window
/// whose complement is anisotropic.
pub fn geodesic_walls(
    p: &QuadLattice,
    squares: &[i64],
    window: &EnumWindow,
) -> Result<Vec<GeodesicReport>> {
    ensure_plane(p)?;
    let mut out = Vec::new();
    for &d in squares {
        for z in enum_negative_primitive(p, &window.with_square(d))? {
            match closed_geodesic_length(p, &z) {
                Ok(r) => out.push(r),
                Err(Error::CuspBounded(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
