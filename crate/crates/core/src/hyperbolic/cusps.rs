//! Cusp heights along closed geodesics.
//!
//! The height of a normalized point `x` in the cusp of a primitive isotropic
//! `c` is `β_c(x) = 1/q(x,c)`; larger values are deeper in the cusp. This is
//! a monotone reparametrization of the Busemann function, used as a
//! convention.

use serde::{Deserialize, Serialize};

use super::geodesic::{ensure_plane, GeodesicReport};
use crate::enumeration::{enum_isotropic_primitive, EnumWindow};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicClearance {
    pub wall: LatticeVec,
    pub length: f64,
    /// deepest cusp height along one period
    pub max_beta: f64,
    /// smallest over the period of the deepest cusp height at each point
    pub clearance: f64,
    /// `threshold - clearance`
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspReport {
    pub anchor: LatticeVec,
    pub cusp_height: u64,
    pub cusps: Vec<LatticeVec>,
    /// no cusp inside the window: the quotient is treated as compact and the
    /// core is everything
    pub compact: bool,
    pub samples_per_period: usize,
    /// max over geodesics of `max_beta`
    pub threshold: Option<f64>,
    pub geodesics: Vec<GeodesicClearance>,
    pub all_meet_core: bool,
}

/// Cusp heights along one period of every geodesic, the compact-core
/// threshold they define, and each geodesic's margin below it.
pub fn cusp_clearance(
    p: &QuadLattice,
    anchor: &LatticeVec,
    cusp_height: u64,
    geodesics: &mut [GeodesicReport],
    samples_per_period: usize,
) -> Result<CuspReport> {
    ensure_plane(p)?;
    if samples_per_period == 0 {
        return Err(Error::Precondition(
            "need at least one sample per period".into(),
        ));
    }
    let cusps = enum_isotropic_primitive(p, &EnumWindow::new(anchor.clone(), cusp_height, 0))?;
    if cusps.is_empty() {
        return Ok(CuspReport {
            anchor: anchor.clone(),
            cusp_height,
            cusps,
            compact: true,
            samples_per_period,
            threshold: None,
            geodesics: Vec::new(),
            all_meet_core: true,
        });
    }
    let h: Vec<f64> = anchor.iter().map(|&v| v as f64).collect();
    let cf: Vec<Vec<f64>> = cusps
        .iter()
        .map(|c| c.iter().map(|&v| v as f64).collect())
        .collect();
    let mut rows = Vec::with_capacity(geodesics.len());
    for g in geodesics.iter_mut() {
        if p.pair_f64(&g.base_point, &h) < 0.0 {
            g.base_point.iter_mut().for_each(|v| *v = -*v);
            g.direction.iter_mut().for_each(|v| *v = -*v);
        }
        let mut max_beta = f64::NEG_INFINITY;
        let mut clearance = f64::INFINITY;
        for k in 0..samples_per_period {
            let x = g.point_at(g.length * k as f64 / samples_per_period as f64);
            let deepest = cf
                .iter()
                .map(|c| 1.0 / p.pair_f64(&x, c))
                .fold(f64::NEG_INFINITY, f64::max);
            max_beta = max_beta.max(deepest);
            clearance = clearance.min(deepest);
        }
        g.cusp_clearance = Some(clearance);
        rows.push((g.wall.clone(), g.length, max_beta, clearance));
    }
    let threshold = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let geodesics: Vec<GeodesicClearance> = rows
        .into_iter()
        .map(|(wall, length, max_beta, clearance)| GeodesicClearance {
            wall,
            length,
            max_beta,
            clearance,
            margin: threshold - clearance,
        })
        .collect();
    let all_meet_core = geodesics
        .iter()
        .all(|g| g.max_beta.is_finite() && g.margin >= 0.0);
    Ok(CuspReport {
        anchor: anchor.clone(),
        cusp_height,
        cusps,
        compact: false,
        samples_per_period,
        threshold: (!geodesics.is_empty()).then_some(threshold),
        geodesics,
        all_meet_core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::geodesic_walls;

    #[test]
    fn anisotropic_plane_is_compact() {
        let p = QuadLattice::diag(&[1, -3, -3]).unwrap();
        let a = LatticeVec(vec![1, 0, 0]);
        let mut gs = geodesic_walls(&p, &[3], &EnumWindow::new(a.clone(), 3, 0)).unwrap();
        let r = cusp_clearance(&p, &a, 10, &mut gs, 64).unwrap();
        assert!(r.compact && r.cusps.is_empty() && r.threshold.is_none());
    }

    #[test]
    fn cusps_in_split_plane() {
        let p = QuadLattice::diag(&[1, -1, -1]).unwrap();
        let a = LatticeVec(vec![1, 0, 0]);
        let mut gs =
            geodesic_walls(&p, &[2, 3, 5, 6, 7], &EnumWindow::new(a.clone(), 3, 0)).unwrap();
        assert!(gs.len() >= 5);
        let r = cusp_clearance(&p, &a, 5, &mut gs, 128).unwrap();
        assert!(!r.compact);
        assert!(r.threshold.unwrap().is_finite());
        assert!(r.all_meet_core);
        assert!(r.geodesics.iter().all(|g| g.margin > 0.0));
    }
}
