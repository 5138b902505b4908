//! Picard-type sublattices: saturation of class sets, the positivity
//! criterion for projectivity, and primitive extension to a projective
//! sublattice of corank two.

use serde::{Deserialize, Serialize};

use crate::arith::{hermite_rows, lagrange_diagonalize, saturate_rows, IntMatrix};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice, Signature};

/// Primitive sublattice with its induced form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicardSpec {
    pub ambient: IntMatrix,
    /// Hermite-normal basis vectors of the sublattice
    pub basis: Vec<LatticeVec>,
    pub gram: IntMatrix,
    pub signature: Signature,
}

impl PicardSpec {
    /// Saturates the span of `vectors` and records the induced form.
    pub fn new(lattice: &QuadLattice, vectors: &[LatticeVec]) -> Result<Self> {
        for v in vectors {
            lattice.check_dim(v)?;
        }
        let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.0.clone()).collect();
        let basis: Vec<LatticeVec> = saturate_rows(&rows, lattice.rank())?
            .into_iter()
            .map(LatticeVec)
            .collect();
        let gram = lattice.induced_gram(&basis)?;
        let ((pos, neg, zero), _) = lagrange_diagonalize(&gram.to_rational());
        Ok(PicardSpec {
            ambient: lattice.gram().clone(),
            basis,
            gram,
            signature: Signature { pos, neg, zero },
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Whether `x` lies in the sublattice.
    pub fn contains(&self, x: &LatticeVec) -> Result<bool> {
        let mut rows: Vec<Vec<i64>> = self.basis.iter().map(|b| b.0.clone()).collect();
        let before = hermite_rows(&rows)?;
        rows.push(x.0.clone());
        Ok(hermite_rows(&rows)? == before)
    }

    /// Whether every basis vector of `other` lies in this sublattice.
    pub fn contains_all(&self, other: &PicardSpec) -> Result<bool> {
        for b in &other.basis {
            if !self.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Ambient coordinates of `sum c_i b_i`.
    pub fn embed(&self, coeffs: &[i64]) -> LatticeVec {
        let n = self.ambient.rows();
        let mut v = vec![0i64; n];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for i in 0..n {
                v[i] += c * b[i];
            }
        }
        LatticeVec(v)
    }
}

/// Smallest primitive sublattice containing every class in `classes`.
pub fn picard_closure(lattice: &QuadLattice, classes: &[LatticeVec]) -> Result<PicardSpec> {
    if classes.is_empty() {
        return Err(Error::Precondition("no classes given".into()));
    }
    if classes.iter().all(|z| z.is_zero()) {
        return Err(Error::ZeroVector);
    }
    PicardSpec::new(lattice, classes)
}

/// True iff the induced form takes a positive value, i.e. has a positive
/// eigenvalue.
pub fn is_projective_type(n: &PicardSpec) -> bool {
    n.signature.pos >= 1
}

/// A vector of positive square in the sublattice, searched in growing
/// coefficient boxes; `None` exactly when the form has no positive direction.
pub fn projective_witness(n: &PicardSpec) -> Option<LatticeVec> {
    if !is_projective_type(n) {
        return None;
    }
    let mut b = 1;
    loop {
        if let Some(c) = positive_in_box(&n.gram, b) {
            return Some(n.embed(&c));
        }
        b += 1;
    }
}

/// First coefficient vector in `[-b,b]^k` of positive square, if any.
pub fn positive_in_box(gram: &IntMatrix, b: i64) -> Option<Vec<i64>> {
    let k = gram.rows();
    let mut c = vec![-b; k];
    if k == 0 {
        return None;
    }
    loop {
        let mut s: i128 = 0;
        for i in 0..k {
            for j in 0..k {
                s += c[i] as i128 * gram[(i, j)] as i128 * c[j] as i128;
            }
        }
        if s > 0 {
            return Some(c);
        }
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            if c[i] < b {
                c[i] += 1;
                break;
            }
            c[i] = -b;
            i += 1;
        }
    }
}

/// Node budget of the extension search.
const MAX_NODES: usize = 100_000;

/// Primitive sublattice `N' ⊇ N` of rank `rank L - 2` and signature
/// `(1, rank N' - 1)`.
///
/// Depth-first greedy extension: basis vectors of `L` in index order first,
/// then the nonzero vectors of `[-bound, bound]^r`; each step saturates and
/// branches with more than one positive direction are abandoned.
pub fn deformation_target(lattice: &QuadLattice, n: &PicardSpec, bound: i64) -> Result<PicardSpec> {
    lattice.ensure_nondegenerate()?;
    lattice.ensure_hyperbolic()?;
    let r = lattice.rank();
    if r < 3 || n.rank() > r - 2 {
        return Err(Error::Precondition(format!(
            "sublattice rank {} exceeds ambient rank minus two ({})",
            n.rank(),
            r.saturating_sub(2)
        )));
    }
    let target = r - 2;
    let good = |s: &PicardSpec| s.rank() == target && s.signature.as_tuple() == (1, target - 1, 0);
    if good(n) {
        return Ok(n.clone());
    }
    let mut cands: Vec<LatticeVec> = (0..r).map(|i| LatticeVec::basis(r, i)).collect();
    let mut extra: Vec<LatticeVec> = Vec::new();
    let mut c = vec![-bound; r];
    'outer: loop {
        let v = LatticeVec(c.clone());
        // one of each pair ±v
        if !v.is_zero()
            && v.0.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
            && !cands.contains(&v)
        {
            extra.push(v);
        }
        let mut i = 0;
        loop {
            if i == r {
                break 'outer;
            }
            if c[i] < bound {
                c[i] += 1;
                break;
            }
            c[i] = -bound;
            i += 1;
        }
    }
    extra.sort_by_key(|v| (v.iter().map(|x| x.abs()).max().unwrap_or(0), v.0.clone()));
    cands.extend(extra);

    let mut nodes = 0usize;
    fn dfs(
        l: &QuadLattice,
        cur: &PicardSpec,
        cands: &[LatticeVec],
        from: usize,
        good: &dyn Fn(&PicardSpec) -> bool,
        nodes: &mut usize,
    ) -> Result<Option<PicardSpec>> {
        if good(cur) {
            return Ok(Some(cur.clone()));
        }
        if cur.rank() >= l.rank() - 2 {
            return Ok(None);
        }
        for (i, v) in cands.iter().enumerate().skip(from) {
            *nodes += 1;
            if *nodes > MAX_NODES {
                return Ok(None);
            }
            if cur.contains(v)? {
                continue;
            }
            let mut vs = cur.basis.clone();
            vs.push(v.clone());
            let next = PicardSpec::new(l, &vs)?;
            if next.rank() != cur.rank() + 1 || next.signature.pos > 1 {
                continue;
            }
            if let Some(found) = dfs(l, &next, cands, i + 1, good, nodes)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
    dfs(lattice, n, &cands, 0, &good, &mut nodes)?.ok_or(Error::NoExtension { bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVec {
        LatticeVec(c.to_vec())
    }

    #[test]
    fn closure_examples() {
        let l = QuadLattice::diag(&[1, -1, -1]).unwrap();
        let n = picard_closure(&l, &[v(&[0, 2, 0])]).unwrap();
        assert_eq!(n.basis, vec![v(&[0, 1, 0])]);
        assert_eq!(n.gram, IntMatrix::diagonal(&[-1]));

        let n = picard_closure(&l, &[v(&[1, 1, 0]), v(&[1, -1, 0]), v(&[0, 0, 3])]).unwrap();
        assert_eq!(n.rank(), 3);
        assert_eq!(n.gram, *l.gram());

        let n = picard_closure(&l, &[v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(n.gram, IntMatrix::diagonal(&[-1, -1]));

        assert_eq!(picard_closure(&l, &[v(&[0, 0, 0])]), Err(Error::ZeroVector));
        assert!(matches!(
            picard_closure(&l, &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn projectivity_examples() {
        let l = QuadLattice::diag(&[2, -2, -2]).unwrap();
        let n = picard_closure(&l, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        assert!(is_projective_type(&n));
        let w = projective_witness(&n).unwrap();
        assert!(l.eval_form(&w, &w).unwrap() > 0);

        let n = picard_closure(&l, &[v(&[0, 1, 0])]).unwrap();
        assert!(!is_projective_type(&n));
        assert_eq!(projective_witness(&n), None);

        // isotropic plus negative: Gram diag(0,-2) after basis change
        let u = QuadLattice::from_rows(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]).unwrap();
        let n = picard_closure(&u, &[v(&[1, 0, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(n.gram, IntMatrix::diagonal(&[0, -2]));
        assert_eq!(n.signature.as_tuple(), (0, 1, 1));
        assert!(!is_projective_type(&n));
    }

    #[test]
    fn deformation_examples() {
        let l = QuadLattice::diag(&[1, -1, -1, -1, -1]).unwrap();
        let n = picard_closure(&l, &[v(&[0, 1, 0, 0, 0])]).unwrap();
        let t = deformation_target(&l, &n, 1).unwrap();
        assert_eq!(
            t.basis,
            vec![
                v(&[1, 0, 0, 0, 0]),
                v(&[0, 1, 0, 0, 0]),
                v(&[0, 0, 1, 0, 0])
            ]
        );
        assert_eq!(t.signature.as_tuple(), (1, 2, 0));
        assert!(t.contains_all(&n).unwrap());
        assert!(is_projective_type(&t));

        assert_eq!(deformation_target(&l, &t, 1).unwrap(), t);

        let big = picard_closure(
            &l,
            &[
                v(&[0, 1, 0, 0, 0]),
                v(&[0, 0, 1, 0, 0]),
                v(&[0, 0, 0, 1, 0]),
                v(&[0, 0, 0, 0, 1]),
            ],
        )
        .unwrap();
        assert!(matches!(
            deformation_target(&l, &big, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn deformation_needs_non_basis_vectors() {
        // N = span{e1 + e2}, isotropic; extension must avoid a degenerate
        // result and keep one positive direction
        let l = QuadLattice::diag(&[1, -1, -1, -1]).unwrap();
        let n = picard_closure(&l, &[v(&[1, 1, 0, 0])]).unwrap();
        let t = deformation_target(&l, &n, 1).unwrap();
        assert_eq!(t.rank(), 2);
        assert_eq!(t.signature.as_tuple(), (1, 1, 0));
        assert!(t.contains_all(&n).unwrap());
    }
}
