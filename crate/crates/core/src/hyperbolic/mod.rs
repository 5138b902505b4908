//! Hyperboloid model of the projectivized positive cone.
//!
//! Points are normalized to `q(x,x) = 1`; distances are
//! `d(x,y) = arccosh q(x,y)` and the distance to the hyperplane `z^⊥` is
//! `arcsinh(|q(x,z)| / sqrt(-q(z,z)))`. Incidence questions are answered in
//! exact arithmetic before any float is formed.

mod cusps;
mod density;
mod geodesic;

pub use cusps::{cusp_clearance, CuspReport, GeodesicClearance};
pub use density::{density_probe, DensityConfig, DensityPoint, DensityReport, WindowSchedule};
pub use geodesic::{
    closed_geodesic_length, form_automorph, geodesic_walls, BinaryAutomorph, GeodesicReport,
};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{rational_to_f64, Rational};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};

/// Point of hyperbolic space, `q(x,x) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub coords: Vec<f64>,
}

impl HPoint {
    /// Normalizes a positive float vector.
    pub fn new(lattice: &QuadLattice, x: &[f64]) -> Result<Self> {
        check_len(lattice, x.len())?;
        let n = lattice.pair_f64(x, x);
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::NotPositive(format!("{x:?}")));
        }
        let s = n.sqrt();
        Ok(HPoint {
            coords: x.iter().map(|v| v / s).collect(),
        })
    }

    /// Normalizes an exactly positive rational vector.
    pub fn from_rational(lattice: &QuadLattice, x: &[Rational]) -> Result<Self> {
        check_len(lattice, x.len())?;
        if !lattice.pair_rat(x, x).is_positive() {
            return Err(Error::NotPositive(crate::arith::fmt_vec(x)));
        }
        let f: Vec<f64> = x.iter().map(rational_to_f64).collect();
        HPoint::new(lattice, &f)
    }

    pub fn from_lattice(lattice: &QuadLattice, x: &LatticeVec) -> Result<Self> {
        let f: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        if lattice.norm(x)? <= 0 {
            return Err(Error::NotPositive(x.to_string()));
        }
        HPoint::new(lattice, &f)
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }
}

fn check_len(lattice: &QuadLattice, n: usize) -> Result<()> {
    if n != lattice.rank() {
        return Err(Error::DimensionMismatch {
            expected: lattice.rank(),
            found: n,
        });
    }
    Ok(())
}

/// Hyperbolic distance between two normalized points.
pub fn h_distance(lattice: &QuadLattice, x: &HPoint, y: &HPoint) -> Result<f64> {
    check_len(lattice, x.rank())?;
    check_len(lattice, y.rank())?;
    let c = lattice.pair_f64(&x.coords, &y.coords);
    if c <= 0.0 {
        return Err(Error::DifferentComponents);
    }
    Ok(dist_from_pairing(lattice, &x.coords, &y.coords, c))
}

/// `arccosh(c)`, evaluated through `sinh(d/2) = sqrt(-q(x-y))/2` near the
/// diagonal where arccosh loses half its digits.
fn dist_from_pairing(lattice: &QuadLattice, x: &[f64], y: &[f64], c: f64) -> f64 {
    if c < 2.0 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let m = -lattice.pair_f64(&diff, &diff);
        2.0 * (m.max(0.0).sqrt() / 2.0).asinh()
    } else {
        c.acosh()
    }
}

/// Distance from a normalized point to the wall `z^⊥`.
pub fn wall_distance(lattice: &QuadLattice, x: &HPoint, z: &LatticeVec) -> Result<f64> {
    check_len(lattice, x.rank())?;
    let qz = lattice.norm(z)?;
    if qz >= 0 {
        return Err(Error::NotNegative(z.to_string()));
    }
    let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
    let p = lattice.pair_f64(&x.coords, &zf);
    Ok((p.abs() / (-(qz as f64)).sqrt()).asinh())
}

/// Wall distance of a rational positive point; exactly zero iff the point
/// lies on the wall.
pub fn wall_distance_exact(lattice: &QuadLattice, x: &[Rational], z: &LatticeVec) -> Result<f64> {
    check_len(lattice, x.len())?;
    let qz = lattice.norm(z)?;
    if qz >= 0 {
        return Err(Error::NotNegative(z.to_string()));
    }
    let qxx = lattice.pair_rat(x, x);
    if !qxx.is_positive() {
        return Err(Error::NotPositive(crate::arith::fmt_vec(x)));
    }
    let qxz = lattice.pair_rat(x, &z.to_rational());
    if qxz.is_zero() {
        return Ok(0.0);
    }
    // |q(x,z)|^2 / (q(x,x) |q(z,z)|), exact up to the final conversion
    let r = &qxz * &qxz / (qxx * Rational::from_integer((-qz).into()));
    Ok(rational_to_f64(&r).sqrt().asinh())
}

/// Orthonormal frame of the tangent space at `c`, for the positive definite
/// form `-q` restricted to `c^⊥`.
fn tangent_frame(lattice: &QuadLattice, c: &[f64]) -> Vec<Vec<f64>> {
    let n = c.len();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let p = lattice.pair_f64(&v, c);
        for (vk, ck) in v.iter_mut().zip(c) {
            *vk -= p * ck;
        }
        for u in &frame {
            let p = -lattice.pair_f64(&v, u);
            for (vk, uk) in v.iter_mut().zip(u) {
                *vk -= p * uk;
            }
        }
        let m = -lattice.pair_f64(&v, &v);
        if m > 1e-9 {
            let s = m.sqrt();
            frame.push(v.iter().map(|x| x / s).collect());
        }
        if frame.len() == n - 1 {
            break;
        }
    }
    frame
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

/// `N` points drawn from the hyperbolic volume on the closed ball of radius
/// `R` about `center`.
///
/// Each sample owns a ChaCha8 stream: seeded from `seed`, stream number equal
/// to the sample index. A radius `rho ~ U[0,R]` is accepted with probability
/// `(sinh rho / sinh R)^(n-1)` and the direction is a normalized Gaussian in
/// the tangent frame. Output does not depend on the worker count.
pub fn sample_ball(
    lattice: &QuadLattice,
    center: &HPoint,
    radius: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<HPoint>> {
    check_len(lattice, center.rank())?;
    lattice.ensure_hyperbolic()?;
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::Precondition(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if n == 0 {
        return Err(Error::Precondition(
            "sample count must be at least 1".into(),
        ));
    }
    let c = &center.coords;
    let frame = tangent_frame(lattice, c);
    let dim = frame.len();
    let ln_sinh_r = ln_sinh(radius);
    let pts = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            loop {
                let rho = radius * rng.random::<f64>();
                let accept = if dim <= 1 || rho == 0.0 {
                    1.0
                } else {
                    ((dim as f64 - 1.0) * (ln_sinh(rho) - ln_sinh_r)).exp()
                };
                if rng.random::<f64>() >= accept {
                    continue;
                }
                let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    continue;
                }
                let (ch, sh) = (rho.cosh(), rho.sinh());
                let mut x: Vec<f64> = c.iter().map(|v| ch * v).collect();
                for (gk, u) in g.iter().zip(&frame) {
                    let w = sh * gk / norm;
                    for (xi, ui) in x.iter_mut().zip(u) {
                        *xi += w * ui;
                    }
                }
                let Ok(p) = HPoint::new(lattice, &x) else {
                    continue;
                };
                match h_distance(lattice, center, &p) {
                    Ok(d) if d <= radius => return p,
                    _ => continue,
                }
            }
        })
        .collect();
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::lattice::Isometry;

    fn l3() -> QuadLattice {
        QuadLattice::diag(&[1, -1, -1]).unwrap()
    }

    #[test]
    fn distance_examples() {
        let l = l3();
        let x = HPoint::new(&l, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(h_distance(&l, &x, &x).unwrap(), 0.0);
        let y = HPoint::new(&l, &[2.0, 1.0, 0.0]).unwrap();
        let d = h_distance(&l, &x, &y).unwrap();
        assert!((d - (2.0 / 3f64.sqrt()).acosh()).abs() < 1e-12);
        assert!((d - 0.549306).abs() < 1e-6);
        let neg = HPoint::new(&l, &[-1.0, 0.0, 0.0]).unwrap();
        assert_eq!(h_distance(&l, &x, &neg), Err(Error::DifferentComponents));
    }

    #[test]
    fn wall_distance_examples() {
        let l = QuadLattice::diag(&[1, -1, -1, -1]).unwrap();
        let x = HPoint::new(&l, &[2.0, 1.0, 0.0, 0.0]).unwrap();
        let z = LatticeVec(vec![0, 1, 0, 0]);
        let d = wall_distance(&l, &x, &z).unwrap();
        assert!((d - (1.0 / 3f64.sqrt()).asinh()).abs() < 1e-12);
        let on = vec![rat(2), rat(0), rat(1), rat(0)];
        assert_eq!(wall_distance_exact(&l, &on, &z).unwrap(), 0.0);
        let off = vec![rat(2), rat(1), rat(0), rat(0)];
        assert!((wall_distance_exact(&l, &off, &z).unwrap() - d).abs() < 1e-12);
        assert!(matches!(
            wall_distance(&l, &x, &LatticeVec(vec![1, 0, 0, 0])),
            Err(Error::NotNegative(_))
        ));
    }

    #[test]
    fn isometry_invariance() {
        let l = l3();
        let g = l.reflection(&LatticeVec(vec![1, 1, 1])).unwrap();
        let g = g
            .compose(&l.reflection(&LatticeVec(vec![0, 1, 0])).unwrap())
            .unwrap();
        let x = HPoint::new(&l, &[3.0, 1.0, 2.0]).unwrap();
        let y = HPoint::new(&l, &[5.0, -2.0, 1.0]).unwrap();
        let apply = |g: &Isometry, p: &HPoint| {
            let m = g.matrix();
            let v: Vec<f64> = (0..3)
                .map(|i| (0..3).map(|j| m[(i, j)] as f64 * p.coords[j]).sum())
                .collect();
            HPoint { coords: v }
        };
        let d0 = h_distance(&l, &x, &y).unwrap();
        let d1 = h_distance(&l, &apply(&g, &x), &apply(&g, &y)).unwrap();
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn sampling_contract() {
        let l = QuadLattice::diag(&[1, -1, -1, -1]).unwrap();
        let c = HPoint::new(&l, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let pts = sample_ball(&l, &c, 1.5, 300, 7).unwrap();
        assert_eq!(pts.len(), 300);
        for p in &pts {
            assert!((l.pair_f64(&p.coords, &p.coords) - 1.0).abs() < 1e-12);
            assert!(h_distance(&l, &c, p).unwrap() <= 1.5);
        }
        assert_eq!(pts, sample_ball(&l, &c, 1.5, 300, 7).unwrap());
        assert_ne!(pts, sample_ball(&l, &c, 1.5, 300, 8).unwrap());

        let tiny = sample_ball(&l, &c, 1e-12, 1, 3).unwrap();
        let err: f64 = tiny[0]
            .coords
            .iter()
            .zip(&c.coords)
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(err < 1e-9);
    }

    #[test]
    fn sampling_rejects_bad_input() {
        let l = l3();
        let c = HPoint::new(&l, &[1.0, 0.0, 0.0]).unwrap();
        assert!(sample_ball(&l, &c, 0.0, 5, 1).is_err());
        assert!(sample_ball(&l, &c, 1.0, 0, 1).is_err());
    }
}
