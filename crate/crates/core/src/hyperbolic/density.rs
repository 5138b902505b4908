//! Covering-radius probe for wall families of growing square.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_ball, HPoint};
use crate::enumeration::{enum_negative_primitive, height, EnumWindow};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};

/// Height window used for walls of square `-d`, `d <= D`: `base + slope·D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub base: u64,
    pub slope: u64,
}

impl WindowSchedule {
    pub fn height(&self, d: i64) -> u64 {
        self.base + self.slope * d as u64
    }
}

impl Default for WindowSchedule {
    fn default() -> Self {
        WindowSchedule { base: 2, slope: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    pub anchor: LatticeVec,
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    /// increasing bounds `D` on `-q(z,z)`
    pub d_schedule: Vec<i64>,
    pub window: WindowSchedule,
}

impl DensityConfig {
    /// Defaults: radius 1.5, 2000 samples, seed 7, `D = 1..=d_max`.
    pub fn new(anchor: LatticeVec, d_max: i64) -> Self {
        DensityConfig {
            anchor,
            radius: 1.5,
            samples: 2000,
            seed: 7,
            d_schedule: (1..=d_max).collect(),
            window: WindowSchedule::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub d: i64,
    pub height: u64,
    pub wall_count: usize,
    /// max over samples of the distance to the nearest wall; `None` when no
    /// wall is present (infinite)
    pub f: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub config: DensityConfig,
    pub curve: Vec<DensityPoint>,
    /// no walls at any `D`
    pub no_walls: bool,
    /// hyperbolic dimension below 3
    pub outside_regime: bool,
}

impl DensityReport {
    pub fn is_nonincreasing(&self) -> bool {
        let v: Vec<f64> = self
            .curve
            .iter()
            .map(|p| p.f.unwrap_or(f64::INFINITY))
            .collect();
        v.windows(2).all(|w| w[1] <= w[0])
    }

    /// Plot-ready CSV with columns `D,f_D,wall_count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("D,f_D,wall_count\n");
        for p in &self.curve {
            let f = match p.f {
                Some(v) => format!("{v:.12}"),
                None => "inf".to_string(),
            };
            s.push_str(&format!("{},{},{}\n", p.d, f, p.wall_count));
        }
        s
    }
}

/// Samples the ball around the anchor and records, for each `D`, the largest
/// distance from a sample to the nearest wall of square in `[-D, -1]`.
pub fn density_probe(lattice: &QuadLattice, cfg: &DensityConfig) -> Result<DensityReport> {
    lattice.ensure_nondegenerate()?;
    lattice.ensure_hyperbolic()?;
    let sched = &cfg.d_schedule;
    if sched.is_empty() || sched[0] < 1 || sched.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidWindow(
            "d schedule must be a nonempty increasing list of positive integers".into(),
        ));
    }
    let center = HPoint::from_lattice(lattice, &cfg.anchor)?;
    let d_max = *sched.last().unwrap();
    let h_max = cfg.window.height(d_max);
    let r = lattice.rank();

    // walls with their level: the first schedule entry whose window holds them
    let mut walls: Vec<(usize, Vec<f64>)> = Vec::new();
    for d in 1..=d_max {
        let w = EnumWindow::new(cfg.anchor.clone(), h_max, d);
        for z in enum_negative_primitive(lattice, &w)? {
            let ht = height(lattice, &cfg.anchor, &z)?;
            let level = sched
                .iter()
                .position(|&dd| dd >= d && cfg.window.height(dd) >= ht);
            if let Some(level) = level {
                let scale = (d as f64).sqrt();
                let gz = lattice.pairing_vector(&z)?;
                walls.push((level, gz.iter().map(|&v| v as f64 / scale).collect()));
            }
        }
    }
    walls.sort_by_key(|w| w.0);
    let mut counts = vec![0usize; sched.len()];
    for (lvl, _) in &walls {
        counts[*lvl] += 1;
    }

    let samples = sample_ball(lattice, &center, cfg.radius, cfg.samples, cfg.seed)?;
    let k = sched.len();
    let per_sample: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|p| {
            let mut mins = vec![f64::INFINITY; k];
            for (lvl, gz) in &walls {
                let mut s = 0.0;
                for i in 0..r {
                    s += p.coords[i] * gz[i];
                }
                let s = s.abs();
                if s < mins[*lvl] {
                    mins[*lvl] = s;
                }
            }
            for i in 1..k {
                mins[i] = mins[i].min(mins[i - 1]);
            }
            mins
        })
        .collect();

    let mut curve = Vec::with_capacity(k);
    let mut total = 0;
    for (i, &d) in sched.iter().enumerate() {
        total += counts[i];
        let worst = per_sample.iter().map(|m| m[i]).fold(0.0f64, f64::max);
        curve.push(DensityPoint {
            d,
            height: cfg.window.height(d),
            wall_count: total,
            f: worst.is_finite().then(|| worst.asinh()),
        });
    }
    Ok(DensityReport {
        config: cfg.clone(),
        no_walls: walls.is_empty(),
        outside_regime: r < 4,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstructed_family_has_no_walls() {
        // x^2 - 3y^2 = -1 has no solution mod 3
        let l = QuadLattice::diag(&[1, -3]).unwrap();
        let mut cfg = DensityConfig::new(LatticeVec(vec![1, 0]), 1);
        cfg.samples = 50;
        let rep = density_probe(&l, &cfg).unwrap();
        assert!(rep.no_walls);
        assert!(rep.outside_regime);
        assert_eq!(rep.curve[0].f, None);
        assert!(rep.to_csv().contains("1,inf,0"));
    }

    #[test]
    fn curve_is_nonincreasing() {
        let l = QuadLattice::diag(&[1, -1, -1, -1]).unwrap();
        let mut cfg = DensityConfig::new(LatticeVec(vec![1, 0, 0, 0]), 6);
        cfg.samples = 200;
        let rep = density_probe(&l, &cfg).unwrap();
        assert!(!rep.no_walls && !rep.outside_regime);
        assert!(rep.is_nonincreasing());
        assert!(rep
            .curve
            .windows(2)
            .all(|w| w[0].wall_count <= w[1].wall_count));
    }

    #[test]
    fn bad_schedule() {
        let l = QuadLattice::diag(&[1, -1, -1, -1]).unwrap();
        let mut cfg = DensityConfig::new(LatticeVec(vec![1, 0, 0, 0]), 3);
        cfg.d_schedule = vec![2, 1];
        assert!(matches!(
            density_probe(&l, &cfg),
            Err(Error::InvalidWindow(_))
        ));
    }
}
