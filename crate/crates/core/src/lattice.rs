//! Integral quadratic lattices: form evaluation, signature, primitivity,
//! divisibility, reflections, isometries and orthogonal complements.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    ck_add, ck_mul, gcd_slice, integer_kernel, lagrange_diagonalize, narrow, rational_inverse,
    IntMatrix, Rational,
};
use crate::error::{Error, Result};

/// Integer coordinate vector in the standard basis of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVec(pub Vec<i64>);

impl LatticeVec {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVec(coords)
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVec(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        LatticeVec(self.0.iter().map(|&x| -x).collect())
    }

    /// Content (gcd of the coordinates).
    pub fn content(&self) -> i64 {
        gcd_slice(&self.0)
    }

    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.content() == 1)
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        self.0
            .iter()
            .map(|&x| Rational::from_integer(BigInt::from(x)))
            .collect()
    }
}

impl Deref for LatticeVec {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticeVec {
    fn from(v: Vec<i64>) -> Self {
        LatticeVec(v)
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::arith::fmt_vec(&self.0))
    }
}

/// Free-standing primitivity test.
pub fn is_primitive(x: &LatticeVec) -> Result<bool> {
    x.is_primitive()
}

/// Inertia of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.pos, self.neg, self.zero)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.pos == 1 && self.zero == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.pos, self.neg, self.zero)
    }
}

/// Rank-r integral symmetric bilinear form given by its Gram matrix.
///
/// Signature and determinant are computed once at construction. Degenerate
/// forms can be constructed (the period module needs them) but every
/// operation other than [`QuadLattice::signature`] rejects them.
#[derive(Clone, Debug)]
pub struct QuadLattice {
    label: Option<String>,
    gram: IntMatrix,
    signature: Signature,
    det: BigInt,
}

impl PartialEq for QuadLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for QuadLattice {}

impl QuadLattice {
    pub fn new(gram: IntMatrix, label: Option<String>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        if gram.rows() == 0 {
            return Err(Error::Precondition("rank must be positive".into()));
        }
        let n = gram.rows();
        for i in 0..n {
            for j in 0..i {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let ((pos, neg, zero), det) = lagrange_diagonalize(&gram.to_rational());
        debug_assert!(det.is_integer());
        Ok(QuadLattice {
            label,
            gram,
            signature: Signature { pos, neg, zero },
            det: det.to_integer(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?, None)
    }

    /// Diagonal form `diag(entries)`.
    pub fn diag(entries: &[i64]) -> Result<Self> {
        let label = entries
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",");
        Self::new(IntMatrix::diagonal(entries), Some(format!("diag:{label}")))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn determinant(&self) -> &BigInt {
        &self.det
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det.is_zero()
    }

    pub fn ensure_nondegenerate(&self) -> Result<()> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::Degenerate)
        }
    }

    /// Requires signature `(1, rank-1)`.
    pub fn ensure_hyperbolic(&self) -> Result<()> {
        let s = self.signature;
        if s.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::WrongSignature {
                expected_neg: self.rank() - 1,
                pos: s.pos,
                neg: s.neg,
                zero: s.zero,
            })
        }
    }

    pub(crate) fn check_dim(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `x^T G y` without the nondegeneracy check.
    pub(crate) fn pair(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let n = self.rank();
        let mut acc = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in 0..n {
                row = ck_add(row, self.gram[(i, j)] as i128 * y[j] as i128)?;
            }
            acc = ck_add(acc, ck_mul(x[i] as i128, row)?)?;
        }
        narrow(acc)
    }

    /// `G z`: the pairings of `z` with the basis vectors.
    pub fn pairing_vector(&self, z: &[i64]) -> Result<Vec<i64>> {
        self.check_dim(z)?;
        self.gram.mul_vec(z)
    }

    pub(crate) fn norm(&self, x: &[i64]) -> Result<i64> {
        self.pair(x, x)
    }

    pub(crate) fn pair_big2(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let gy = self.gram.mul_vec_big(y);
        x.iter()
            .zip(&gy)
            .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
    }

    pub(crate) fn pair_rat(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let n = self.rank();
        let mut acc = Rational::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = Rational::zero();
            for j in 0..n {
                let g = self.gram[(i, j)];
                if g != 0 && !y[j].is_zero() {
                    row += &y[j] * BigInt::from(g);
                }
            }
            acc += &x[i] * row;
        }
        acc
    }

    pub(crate) fn pair_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.rank();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.gram[(i, j)] as f64 * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// Exact value of the bilinear form `x^T G y`.
    pub fn eval_form(&self, x: &LatticeVec, y: &LatticeVec) -> Result<i64> {
        self.ensure_nondegenerate()?;
        self.pair(x, y)
    }

    /// gcd of the pairings of `z` with every basis vector.
    pub fn divisibility(&self, z: &LatticeVec) -> Result<i64> {
        self.ensure_nondegenerate()?;
        if z.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(gcd_slice(&self.pairing_vector(z)?))
    }

    /// Integral reflection `x -> x - 2 q(x,z)/q(z,z) z`.
    pub fn reflection(&self, z: &LatticeVec) -> Result<Isometry> {
        self.ensure_nondegenerate()?;
        if z.is_zero() {
            return Err(Error::ZeroVector);
        }
        let qz = self.norm(z)?;
        if qz == 0 {
            return Err(Error::Isotropic(z.to_string()));
        }
        let gz = self.pairing_vector(z)?;
        let n = self.rank();
        let mut m = IntMatrix::identity(n);
        for (j, &p) in gz.iter().enumerate() {
            let num = 2 * p as i128;
            if num % qz as i128 != 0 {
                return Err(Error::NonIntegralReflection(z.to_string()));
            }
            let coef = num / qz as i128;
            for i in 0..n {
                let v = m[(i, j)] as i128 - ck_mul(coef, z[i] as i128)?;
                m[(i, j)] = narrow(v)?;
            }
        }
        Ok(Isometry { matrix: m })
    }

    /// True iff `M^T G M = G` exactly.
    pub fn is_isometry(&self, m: &IntMatrix) -> bool {
        if m.rows() != self.rank() || m.cols() != self.rank() {
            return false;
        }
        let lhs = m.transpose().mul(&self.gram).and_then(|t| t.mul(m));
        matches!(lhs, Ok(l) if l == self.gram)
    }

    /// Saturated sublattice `z^⊥` with its induced Gram matrix.
    pub fn orthogonal_complement(&self, z: &LatticeVec) -> Result<Complement> {
        self.ensure_nondegenerate()?;
        if z.is_zero() {
            return Err(Error::ZeroVector);
        }
        let gz = self.pairing_vector(z)?;
        let basis: Vec<LatticeVec> = integer_kernel(&[gz], self.rank())?
            .into_iter()
            .map(LatticeVec)
            .collect();
        let gram = self.induced_gram(&basis)?;
        Ok(Complement { basis, gram })
    }

    /// Gram matrix of the given vectors.
    pub fn induced_gram(&self, basis: &[LatticeVec]) -> Result<IntMatrix> {
        let k = basis.len();
        let mut g = IntMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = self.pair(&basis[i], &basis[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Whether two positive (rational) vectors lie in the same component of
    /// the positive cone, i.e. pair positively.
    pub fn same_positive_component(&self, x: &[Rational], y: &[Rational]) -> Result<bool> {
        self.ensure_nondegenerate()?;
        self.ensure_hyperbolic()?;
        for v in [x, y] {
            if v.len() != self.rank() {
                return Err(Error::DimensionMismatch {
                    expected: self.rank(),
                    found: v.len(),
                });
            }
            if !self.pair_rat(v, v).is_positive() {
                return Err(Error::NotPositive(crate::arith::fmt_vec(v)));
            }
        }
        Ok(self.pair_rat(x, y).is_positive())
    }

    /// Sign-canonical representative of the wall `±z` relative to the anchor
    /// `h`: pairing with `h` positive, or the lexicographically larger of `±z`
    /// when the pairing vanishes.
    pub fn canonical_wall(&self, h: &[i64], z: &LatticeVec) -> Result<LatticeVec> {
        let p = self.pair(h, z)?;
        Ok(match p.signum() {
            1 => z.clone(),
            -1 => z.neg(),
            _ => {
                let n = z.neg();
                if n > *z {
                    n
                } else {
                    z.clone()
                }
            }
        })
    }

    pub(crate) fn gram_inverse(&self) -> Result<Vec<Vec<Rational>>> {
        rational_inverse(&self.gram.to_rational()).ok_or(Error::Degenerate)
    }
}

impl fmt::Display for QuadLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram
            .to_rows()
            .iter()
            .map(|r| crate::arith::fmt_vec(r))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Basis and Gram matrix of an orthogonal complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complement {
    pub basis: Vec<LatticeVec>,
    pub gram: IntMatrix,
}

/// Integer matrix preserving a form, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Isometry {
    matrix: IntMatrix,
}

impl Isometry {
    /// Verifies `M^T G M = G`.
    pub fn new(lattice: &QuadLattice, matrix: IntMatrix) -> Result<Self> {
        if lattice.is_isometry(&matrix) {
            Ok(Isometry { matrix })
        } else {
            Err(Error::NotIsometry)
        }
    }

    pub fn identity(rank: usize) -> Self {
        Isometry {
            matrix: IntMatrix::identity(rank),
        }
    }

    #[cfg(test)]
    pub(crate) fn from_matrix_unchecked(matrix: IntMatrix) -> Self {
        Isometry { matrix }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &[i64]) -> Result<LatticeVec> {
        self.matrix.mul_vec(x).map(LatticeVec)
    }

    pub fn apply_big(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec_big(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        Ok(Isometry {
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }

    /// `G^{-1} M^T G`, which is integral for any isometry.
    pub fn inverse(&self, lattice: &QuadLattice) -> Result<Isometry> {
        let ginv = lattice.gram_inverse()?;
        let mtg = self.matrix.transpose().mul(lattice.gram())?.to_rational();
        let n = lattice.rank();
        let mut inv = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Rational::zero();
                for k in 0..n {
                    acc += &ginv[i][k] * &mtg[k][j];
                }
                if !acc.is_integer() {
                    return Err(Error::NotIsometry);
                }
                inv[(i, j)] = acc.to_integer().to_i64().ok_or(Error::Overflow)?;
            }
        }
        Ok(Isometry { matrix: inv })
    }

    pub fn determinant(&self) -> i64 {
        self.matrix.determinant().to_integer().to_i64().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == IntMatrix::identity(self.matrix.rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVec {
        LatticeVec(c.to_vec())
    }

    fn u_plus_neg2() -> QuadLattice {
        QuadLattice::from_rows(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]).unwrap()
    }

    #[test]
    fn eval_form_examples() {
        let l = QuadLattice::diag(&[1, -1, -1]).unwrap();
        assert_eq!(l.eval_form(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap(), 0);
        let u = QuadLattice::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(u.eval_form(&v(&[1, 0]), &v(&[0, 1])).unwrap(), 1);
        let l = QuadLattice::diag(&[2, -2, -2, -2]).unwrap();
        assert_eq!(
            l.eval_form(&v(&[1, 1, 0, 0]), &v(&[1, 1, 0, 0])).unwrap(),
            0
        );
        assert!(matches!(
            l.eval_form(&v(&[1, 0]), &v(&[1, 0, 0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(
            QuadLattice::diag(&[1, -1, -1])
                .unwrap()
                .signature()
                .as_tuple(),
            (1, 2, 0)
        );
        let u = QuadLattice::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(u.signature().as_tuple(), (1, 1, 0));
        assert_eq!(
            QuadLattice::diag(&[0, -2]).unwrap().signature().as_tuple(),
            (0, 1, 1)
        );
    }

    #[test]
    fn primitivity() {
        assert!(!v(&[2, 4]).is_primitive().unwrap());
        assert!(v(&[1, 0, 0]).is_primitive().unwrap());
        assert_eq!(v(&[0, 0]).is_primitive(), Err(Error::ZeroVector));
    }

    #[test]
    fn divisibility_examples() {
        let l = u_plus_neg2();
        assert_eq!(l.divisibility(&v(&[0, 0, 1])).unwrap(), 2);
        assert_eq!(l.divisibility(&v(&[1, -1, 0])).unwrap(), 1);
        let l = QuadLattice::diag(&[1, -1]).unwrap();
        assert_eq!(l.divisibility(&v(&[1, 0])).unwrap(), 1);
        assert_eq!(l.divisibility(&v(&[0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn reflection_examples() {
        let l = QuadLattice::diag(&[2, -2]).unwrap();
        let r = l.reflection(&v(&[0, 1])).unwrap();
        assert_eq!(r.matrix(), &IntMatrix::diagonal(&[1, -1]));
        let l4 = QuadLattice::diag(&[2, -2, -2, -2]).unwrap();
        let r4 = l4.reflection(&v(&[0, 1, 0, 0])).unwrap();
        assert_eq!(r4.matrix(), &IntMatrix::diagonal(&[1, -1, 1, 1]));
        assert!(matches!(
            l.reflection(&v(&[1, 1])),
            Err(Error::Isotropic(_))
        ));
        let l = QuadLattice::diag(&[1, -4]).unwrap();
        assert!(matches!(
            l.reflection(&v(&[1, 1])),
            Err(Error::NonIntegralReflection(_))
        ));
    }

    #[test]
    fn isometry_examples() {
        let l = QuadLattice::diag(&[2, -2]).unwrap();
        assert!(l.is_isometry(&IntMatrix::identity(2)));
        let r = l.reflection(&v(&[0, 1])).unwrap();
        assert!(l.is_isometry(r.matrix()));
        let l = QuadLattice::diag(&[1, -1]).unwrap();
        assert!(!l.is_isometry(&IntMatrix::diagonal(&[2, 1])));
        assert!(!l.is_isometry(&IntMatrix::identity(3)));
    }

    #[test]
    fn isometry_inverse() {
        let l = u_plus_neg2();
        let a = l.reflection(&v(&[0, 1, 1])).unwrap();
        let b = l.reflection(&v(&[1, -1, 0])).unwrap();
        let ab = a.compose(&b).unwrap();
        let inv = ab.inverse(&l).unwrap();
        assert!(ab.compose(&inv).unwrap().is_identity());
        assert_eq!(ab.determinant(), 1);
        assert_eq!(a.determinant(), -1);
    }

    #[test]
    fn complement_examples() {
        let l = QuadLattice::diag(&[1, -1, -1]).unwrap();
        let c = l.orthogonal_complement(&v(&[0, 0, 1])).unwrap();
        assert_eq!(c.basis, vec![v(&[1, 0, 0]), v(&[0, 1, 0])]);
        assert_eq!(c.gram, IntMatrix::diagonal(&[1, -1]));
        let c = l.orthogonal_complement(&v(&[0, 1, 1])).unwrap();
        assert_eq!(c.basis, vec![v(&[1, 0, 0]), v(&[0, 1, -1])]);
        assert_eq!(c.gram, IntMatrix::diagonal(&[1, -2]));
        let l = QuadLattice::diag(&[2, -2]).unwrap();
        let c = l.orthogonal_complement(&v(&[0, 1])).unwrap();
        assert_eq!(c.basis, vec![v(&[1, 0])]);
        assert_eq!(c.gram, IntMatrix::diagonal(&[2]));
        assert_eq!(l.orthogonal_complement(&v(&[0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn positive_components() {
        let l = QuadLattice::diag(&[1, -1, -1]).unwrap();
        let r = |c: &[i64]| v(c).to_rational();
        assert!(l
            .same_positive_component(&r(&[1, 0, 0]), &r(&[2, 1, 0]))
            .unwrap());
        assert!(!l
            .same_positive_component(&r(&[1, 0, 0]), &r(&[-1, 0, 0]))
            .unwrap());
        assert!(matches!(
            l.same_positive_component(&r(&[1, 1, 0]), &r(&[1, 0, 0])),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn degenerate_rejected() {
        let l = QuadLattice::diag(&[1, 0]).unwrap();
        assert_eq!(l.signature().as_tuple(), (1, 0, 1));
        assert_eq!(
            l.eval_form(&v(&[1, 0]), &v(&[1, 0])),
            Err(Error::Degenerate)
        );
        assert_eq!(l.reflection(&v(&[1, 0])).unwrap_err(), Error::Degenerate);
    }

    #[test]
    fn canonical_sign() {
        let l = QuadLattice::diag(&[1, -1, -1]).unwrap();
        let h = [1, 0, 0];
        assert_eq!(
            l.canonical_wall(&h, &v(&[0, -1, 0])).unwrap(),
            v(&[0, 1, 0])
        );
        assert_eq!(
            l.canonical_wall(&h, &v(&[-1, 1, 1])).unwrap(),
            v(&[1, -1, -1])
        );
    }
}
