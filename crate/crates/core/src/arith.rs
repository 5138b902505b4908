//! Exact integer and rational linear algebra used throughout the crate.
//!
//! Small integer data is stored as `i64`; every intermediate product is formed
//! in `i128` with overflow checks so that no result ever wraps silently.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

#[inline]
pub(crate) fn ck_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn ck_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn ck_sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn narrow(a: i128) -> Result<i64> {
    i64::try_from(a).map_err(|_| Error::Overflow)
}

/// Nonnegative gcd of a slice; 0 for the empty or all-zero slice.
pub fn gcd_slice(xs: &[i64]) -> i64 {
    xs.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g >= 0.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Formats an integer vector as `(a,b,c)`.
pub fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<i64>>", try_from = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i128;
                for k in 0..self.cols {
                    acc = ck_add(acc, self[(i, k)] as i128 * other[(k, j)] as i128)?;
                }
                out[(i, j)] = narrow(acc)?;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = 0i128;
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = ck_add(acc, *a as i128 * *b as i128)?;
                }
                narrow(acc)
            })
            .collect()
    }

    pub fn mul_vec_big(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + b * *a)
            })
            .collect()
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|&x| Rational::from_integer(x.into()))
                    .collect()
            })
            .collect()
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square());
        rational_det(&self.to_rational())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(rows)
    }
}

pub fn rat(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

pub fn rat_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Scales a rational vector by a positive factor so that it becomes a
/// primitive integer vector.
pub fn primitive_integer_multiple(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let scale = Rational::from_integer(lcm);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &scale).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn big_to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or(Error::Overflow))
        .collect()
}

pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Big-integer vector serialized as JSON numbers when they fit in `i64` and as
/// decimal strings otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BigVec(pub Vec<BigInt>);

impl Serialize for BigVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            match x.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BigVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| {
                let text = match v {
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::String(s) => s,
                    other => {
                        return Err(serde::de::Error::custom(format!("not an integer: {other}")))
                    }
                };
                text.parse::<BigInt>().map_err(serde::de::Error::custom)
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(BigVec)
    }
}

/// Serde adapter for a single `BigInt` with the same encoding as [`BigVec`].
pub mod big_int_serde {
    use super::*;

    pub fn serialize<S: serde::Serializer>(
        x: &BigInt,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match x.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&x.to_string()),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigInt, D::Error> {
        let text = match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s,
            other => return Err(serde::de::Error::custom(format!("not an integer: {other}"))),
        };
        text.parse::<BigInt>().map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Display for BigVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&fmt_vec(&self.0))
    }
}

/// Counts of positive, negative and zero entries after an exact congruence
/// diagonalization of a symmetric rational matrix, together with the product
/// of the diagonal (the determinant).
pub(crate) fn lagrange_diagonalize(sym: &[Vec<Rational>]) -> ((usize, usize, usize), Rational) {
    let n = sym.len();
    let mut a: Vec<Vec<Rational>> = sym.to_vec();
    let (mut pos, mut neg) = (0usize, 0usize);
    let mut det = Rational::one();
    for k in 0..n {
        let diag = (k..n).find(|&i| !a[i][i].is_zero());
        let pivot = match diag {
            Some(i) => Some(i),
            None => {
                // all remaining diagonal entries vanish; fold an off-diagonal pair
                let pair = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_zero());
                pair.map(|(i, j)| {
                    for c in 0..n {
                        let v = a[j][c].clone();
                        a[i][c] += v;
                    }
                    for r in 0..n {
                        let v = a[r][j].clone();
                        a[r][i] += v;
                    }
                    i
                })
            }
        };
        let Some(p) = pivot else {
            return ((pos, neg, n - k), Rational::zero());
        };
        a.swap(k, p);
        for row in a.iter_mut() {
            row.swap(k, p);
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        det *= &d;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &d;
            for j in k + 1..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for i in k + 1..n {
            a[i][k] = Rational::zero();
            a[k][i] = Rational::zero();
        }
    }
    ((pos, neg, 0), det)
}

pub(crate) fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap(k, p);
            det = -det;
        }
        let d = a[k][k].clone();
        det *= &d;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &d;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    det
}

/// Inverse of a square rational matrix, `None` when singular.
pub(crate) fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        let d = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v = &*v / &d;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..2 * n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Basis (as rows) of the integer right kernel `{x in Z^n : A x = 0}` of an
/// integer matrix given by its rows. The basis spans the full saturated kernel.
pub fn integer_kernel(rows: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i128).collect())
        .collect();
    let col_op = |m: &mut Vec<Vec<i128>>,
                  p: usize,
                  j: usize,
                  s: i128,
                  t: i128,
                  x: i128,
                  y: i128|
     -> Result<()> {
        // (col_p, col_j) <- (s*col_p + t*col_j, x*col_p + y*col_j)
        for row in m.iter_mut() {
            let (cp, cj) = (row[p], row[j]);
            row[p] = ck_add(ck_mul(s, cp)?, ck_mul(t, cj)?)?;
            row[j] = ck_add(ck_mul(x, cp)?, ck_mul(y, cj)?)?;
        }
        Ok(())
    };
    let mut p = 0usize;
    for i in 0..a.len() {
        if p >= n {
            break;
        }
        for j in p + 1..n {
            let (x, y) = (a[i][p], a[i][j]);
            if y == 0 {
                continue;
            }
            if x == 0 {
                for row in a.iter_mut().chain(u.iter_mut()) {
                    row.swap(p, j);
                }
                continue;
            }
            let (g, s, t) = ext_gcd(x, y);
            col_op(&mut a, p, j, s, t, -y / g, x / g)?;
            col_op(&mut u, p, j, s, t, -y / g, x / g)?;
        }
        if a[i][p] != 0 {
            p += 1;
        }
    }
    let basis: Vec<Vec<i64>> = (p..n)
        .map(|j| {
            u.iter()
                .map(|row| narrow(row[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    hermite_rows(&basis)
}

/// Row-style Hermite normal form of the lattice spanned by the given rows:
/// echelon form, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`. Zero rows are dropped.
pub fn hermite_rows(rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    if rows.is_empty() {
        return Ok(vec![]);
    }
    let n = rows[0].len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut r = 0usize;
    for c in 0..n {
        if r >= a.len() {
            break;
        }
        for i in r + 1..a.len() {
            let (x, y) = (a[r][c], a[i][c]);
            if y == 0 {
                continue;
            }
            if x == 0 {
                a.swap(r, i);
                continue;
            }
            let (g, s, t) = ext_gcd(x, y);
            let (ra, ri) = (a[r].clone(), a[i].clone());
            for k in 0..n {
                a[r][k] = ck_add(ck_mul(s, ra[k])?, ck_mul(t, ri[k])?)?;
                a[i][k] = ck_add(ck_mul(-y / g, ra[k])?, ck_mul(x / g, ri[k])?)?;
            }
        }
        if a[r][c] == 0 {
            continue;
        }
        if a[r][c] < 0 {
            for v in a[r].iter_mut() {
                *v = -*v;
            }
        }
        let piv = a[r][c];
        for i in 0..r {
            let q = a[i][c].div_euclid(piv);
            if q != 0 {
                for k in 0..n {
                    a[i][k] = ck_sub(a[i][k], ck_mul(q, a[r][k])?)?;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.into_iter()
        .map(|row| row.into_iter().map(narrow).collect())
        .collect()
}

/// Basis (HNF rows) of the saturation `(span_Q S) ∩ Z^n` of the given rows.
pub fn saturate_rows(rows: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let nonzero: Vec<Vec<i64>> = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Ok(vec![]);
    }
    let k = integer_kernel(&nonzero, n)?;
    if k.is_empty() {
        return Ok((0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect());
    }
    integer_kernel(&k, n)
}

/// Integer floor of the square root of a nonnegative rational.
pub(crate) fn floor_sqrt_rational(x: &Rational) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let f = x.floor().to_integer();
    f.sqrt()
}

pub(crate) fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_single_functional() {
        // pairing with z=(0,1,1) in diag(1,-1,-1)
        let k = integer_kernel(&[vec![0, -1, -1]], 3).unwrap();
        assert_eq!(k, vec![vec![1, 0, 0], vec![0, 1, -1]]);
    }

    #[test]
    fn saturation_divides_out_content() {
        let s = saturate_rows(&[vec![0, 2, 0]], 3).unwrap();
        assert_eq!(s, vec![vec![0, 1, 0]]);
        let s = saturate_rows(&[vec![2, 0], vec![0, 3]], 2).unwrap();
        assert_eq!(s, vec![vec![1, 0], vec![0, 1]]);
        let s = saturate_rows(&[vec![2, 2, 4], vec![1, 1, 3]], 3).unwrap();
        assert_eq!(s, vec![vec![1, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&[vec![2, 4], vec![1, 3]]).unwrap();
        let b = hermite_rows(&[vec![1, 3], vec![3, 7]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn diagonalization_counts() {
        let m = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let ((p, n, z), det) = lagrange_diagonalize(&m.to_rational());
        assert_eq!((p, n, z), (1, 1, 0));
        assert_eq!(det, rat(-1));
        let m = IntMatrix::diagonal(&[0, -2]);
        assert_eq!(lagrange_diagonalize(&m.to_rational()).0, (0, 1, 1));
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12, 18), (-7, 5), (0, 4), (9, 0), (-6, -15)] {
            let (g, s, t) = ext_gcd(a, b);
            assert_eq!(s * a + t * b, g);
            assert_eq!(g, (a as i64).gcd(&(b as i64)) as i128);
        }
    }
}
