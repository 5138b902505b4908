//! Versioned report envelope, run configuration and revalidation.
//!
//! Every report carries the schema version, the fully resolved configuration
//! (including the Gram matrix actually used) and the float tolerances. A
//! report can be re-read and its claims rechecked against the embedded
//! configuration without access to the original inputs.

use serde::{Deserialize, Serialize};

use crate::arith::{saturate_rows, IntMatrix};
use crate::chambers::{Arrangement, Chamber, FaceCheck, FaceOrbitReport, Wall};
use crate::enumeration::{height, EnumWindow};
use crate::error::{Error, Result};
use crate::hyperbolic::{CuspReport, DensityReport, GeodesicReport};
use crate::lattice::{LatticeVec, QuadLattice, Signature};
use crate::orbits::OrbitReport;
use crate::period::{is_projective_type, PicardSpec};

pub const SCHEMA: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// incidence, signature and lattice decisions are exact
    pub exact_arithmetic: bool,
    /// `|q(x,x) - 1|` after normalization
    pub normalization: f64,
    /// distance changes under isometries
    pub isometry_invariance: f64,
    /// closed geodesic length against the translation-length check
    pub geodesic_length: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact_arithmetic: true,
            normalization: 1e-12,
            isometry_invariance: 1e-12,
            geodesic_length: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// as given: preset name, `diag:` string or file path
    pub source: String,
    pub label: String,
    pub gram: Vec<Vec<i64>>,
}

impl LatticeSpec {
    pub fn new(source: &str, l: &QuadLattice) -> Self {
        LatticeSpec {
            source: source.to_string(),
            label: l.label().unwrap_or("").to_string(),
            gram: l.gram().to_rows(),
        }
    }

    pub fn lattice(&self) -> Result<QuadLattice> {
        QuadLattice::new(
            IntMatrix::from_rows(self.gram.clone())?,
            Some(self.label.clone()),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfig {
    /// `reflections` or a generator file path
    pub source: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<i64>,
    pub height: u64,
    pub word_cap: usize,
    pub height_cap: u64,
    pub generator_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub d_max: i64,
    pub window_base: u64,
    pub window_slope: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspConfig {
    pub cusp_height: u64,
    pub samples_per_period: usize,
}

/// Fully resolved inputs of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub lattice: LatticeSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<LatticeVec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall: Option<LatticeVec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<LatticeVec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cusps: Option<CuspConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json_out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_out: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub result: serde_json::Value,
}

impl Report {
    pub fn new<T: Serialize>(config: RunConfig, result: &T) -> Result<Self> {
        Ok(Report {
            schema: SCHEMA.to_string(),
            command: config.command.clone(),
            config,
            tolerances: Tolerances::default(),
            result: serde_json::to_value(result)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text)?;
        if r.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", r.schema)));
        }
        Ok(r)
    }

    fn payload<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        Ok(serde_json::from_value(self.result.clone())?)
    }
}

/// Result of `lattice info`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeInfo {
    pub label: String,
    pub rank: usize,
    pub gram: IntMatrix,
    pub signature: Signature,
    pub determinant: String,
    pub hyperbolic: bool,
}

impl LatticeInfo {
    pub fn of(l: &QuadLattice) -> Self {
        LatticeInfo {
            label: l.label().unwrap_or("").to_string(),
            rank: l.rank(),
            gram: l.gram().clone(),
            signature: l.signature(),
            determinant: l.determinant().to_string(),
            hyperbolic: l.signature().is_hyperbolic(),
        }
    }
}

/// Result of `enum`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumResult {
    pub window: EnumWindow,
    pub count: usize,
    pub vectors: Vec<LatticeVec>,
}

/// Result of the `chambers` subcommands. Sign vectors are listed alongside
/// the walls they refer to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChamberResult {
    pub window_anchor: LatticeVec,
    pub perturbed_anchor: bool,
    pub walls: Vec<Wall>,
    pub chamber: Chamber,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<FaceCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossed: Option<LatticeVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbour: Option<Chamber>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_orbits: Option<FaceOrbitReport>,
}

impl ChamberResult {
    pub fn new(a: &Arrangement, chamber: Chamber) -> Self {
        ChamberResult {
            window_anchor: a.window_anchor.clone(),
            perturbed_anchor: a.perturbed,
            walls: a.walls.clone(),
            chamber,
            faces: Vec::new(),
            crossed: None,
            neighbour: None,
            face_orbits: None,
        }
    }
}

/// Outcome of rechecking a report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub checks: usize,
    pub discrepancies: Vec<String>,
}

impl Validation {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.discrepancies.push(what());
        }
    }

    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Rechecks every claim of a report that can be verified from its embedded
/// configuration.
pub fn revalidate(report: &Report) -> Result<Validation> {
    let l = report.config.lattice.lattice()?;
    let mut v = Validation::default();
    let cmd = report.command.as_str();
    match cmd {
        "lattice info" => {
            let info: LatticeInfo = report.payload()?;
            v.check(info.signature == l.signature(), || "signature".into());
            v.check(info.determinant == l.determinant().to_string(), || {
                "determinant".into()
            });
            v.check(info.rank == l.rank(), || "rank".into());
        }
        "enum" => {
            let r: EnumResult = report.payload()?;
            v.check(r.count == r.vectors.len(), || "count".into());
            v.check(r.vectors.windows(2).all(|w| w[0] < w[1]), || "order".into());
            let target = -r.window.square;
            for z in &r.vectors {
                v.check(l.norm(z)? == target, || format!("square of {z}"));
                v.check(z.is_primitive()?, || format!("{z} not primitive"));
                let h = height(&l, &r.window.anchor, z)?;
                v.check(h <= r.window.height_bound, || format!("{z} outside window"));
                v.check(l.canonical_wall(&r.window.anchor, z)? == *z, || {
                    format!("{z} not canonical")
                });
            }
        }
        "orbits" => {
            let r: OrbitReport = report.payload()?;
            for c in &r.classes {
                let rep = &c.representative;
                v.check(l.norm(rep)? == c.square, || format!("square of {rep}"));
                v.check(l.divisibility(rep)? == c.divisibility, || {
                    format!("divisibility of {rep}")
                });
                for m in &c.input_members {
                    v.check(
                        l.norm(m)? == c.square && l.divisibility(m)? == c.divisibility,
                        || format!("invariants of {m} differ from {rep}"),
                    );
                }
            }
        }
        c if c.starts_with("chambers") => revalidate_chambers(&l, report, &mut v)?,
        "hyp density" => {
            let r: DensityReport = report.payload()?;
            v.check(r.is_nonincreasing(), || "curve increases".into());
            v.check(
                r.curve
                    .windows(2)
                    .all(|w| w[0].wall_count <= w[1].wall_count),
                || "wall counts decrease".into(),
            );
            v.check(r.no_walls == r.curve.iter().all(|p| p.f.is_none()), || {
                "no-walls flag".into()
            });
        }
        "hyp geodesic" => {
            let rs: Vec<GeodesicReport> = report.payload()?;
            for r in &rs {
                revalidate_geodesic(&l, r, &report.tolerances, &mut v)?;
            }
        }
        "hyp cusps" => {
            let r: CuspReport = report.payload()?;
            for c in &r.cusps {
                v.check(l.norm(c)? == 0 && c.is_primitive()?, || format!("cusp {c}"));
                v.check(l.pair(&r.anchor, c)? > 0, || {
                    format!("cusp {c} orientation")
                });
            }
            v.check(r.compact == r.cusps.is_empty(), || "compact flag".into());
            for g in &r.geodesics {
                v.check(g.margin >= 0.0 && g.max_beta.is_finite(), || {
                    format!("margin of {}", g.wall)
                });
            }
        }
        c if c.starts_with("period") => {
            let n: PicardSpec = report.payload()?;
            v.check(n.ambient == *l.gram(), || "ambient".into());
            v.check(l.induced_gram(&n.basis)? == n.gram, || {
                "induced Gram".into()
            });
            let again = PicardSpec::new(&l, &n.basis)?;
            v.check(again.basis == n.basis, || "basis not saturated".into());
            v.check(again.signature == n.signature, || "signature".into());
            let sat = saturate_rows(
                &report
                    .config
                    .vectors
                    .iter()
                    .map(|x| x.0.clone())
                    .collect::<Vec<_>>(),
                l.rank(),
            )?;
            for b in sat {
                v.check(n.contains(&LatticeVec(b.clone()))?, || {
                    "input classes not contained".into()
                });
            }
            if c == "period deform" {
                let t = l.rank() - 2;
                v.check(n.rank() == t, || "target rank".into());
                v.check(n.signature.as_tuple() == (1, t - 1, 0), || {
                    "target signature".into()
                });
                v.check(is_projective_type(&n), || "not projective".into());
            }
        }
        other => return Err(Error::Parse(format!("unknown report command {other:?}"))),
    }
    Ok(v)
}

fn revalidate_chambers(l: &QuadLattice, report: &Report, v: &mut Validation) -> Result<()> {
    let r: ChamberResult = report.payload()?;
    let walls: Vec<LatticeVec> = r.walls.iter().map(|w| w.vector.clone()).collect();
    let a = Arrangement::from_walls(
        l,
        r.window_anchor.clone(),
        walls.clone(),
        report.config.squares.clone(),
        report.config.height.unwrap_or(0),
    )?;
    v.check(a.walls == r.walls, || "wall list".into());
    let located = a.locate_integer(&r.chamber.point.0)?;
    v.check(located.signs == r.chamber.signs, || "chamber signs".into());
    let mut faces: Vec<&FaceCheck> = r.faces.iter().collect();
    if let Some(fo) = &r.face_orbits {
        faces.extend(fo.faces.iter());
        let n: usize = fo.orbits.iter().map(|o| o.len()).sum();
        v.check(n == fo.faces.len(), || "orbit partition".into());
        v.check(fo.orbit_count == fo.orbits.len(), || "orbit count".into());
    }
    for f in faces {
        if let (true, Some(w)) = (f.is_face, &f.witness) {
            let wi = a
                .wall_index(&f.wall)
                .ok_or_else(|| Error::UnknownWall(f.wall.to_string()))?;
            v.check(a.verify_witness(&r.chamber, wi, &w.0), || {
                format!("witness for {}", f.wall)
            });
        }
    }
    if let (Some(w), Some(n)) = (&r.crossed, &r.neighbour) {
        let wi = a
            .wall_index(w)
            .ok_or_else(|| Error::UnknownWall(w.to_string()))?;
        let again = a.locate_integer(&n.point.0)?;
        v.check(again.signs == n.signs, || "neighbour signs".into());
        let flips: Vec<usize> = (0..n.signs.len())
            .filter(|&i| n.signs[i] != r.chamber.signs[i])
            .collect();
        v.check(flips == vec![wi], || {
            format!("neighbour differs outside {w}")
        });
    }
    Ok(())
}

fn revalidate_geodesic(
    l: &QuadLattice,
    r: &GeodesicReport,
    tol: &Tolerances,
    v: &mut Validation,
) -> Result<()> {
    v.check(r.plane == *l.gram(), || "plane".into());
    let comp = l.orthogonal_complement(&r.wall)?;
    v.check(comp.gram == r.complement_gram, || {
        format!("complement of {}", r.wall)
    });
    let a = crate::hyperbolic::form_automorph(&r.complement_gram)?;
    v.check(a.matrix == r.automorph.matrix, || {
        format!("automorph for {}", r.wall)
    });
    v.check(
        (r.length - r.length_check).abs() <= tol.geodesic_length,
        || format!("length check for {}", r.wall),
    );
    Ok(())
}
