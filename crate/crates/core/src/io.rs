//! Lattice files, bundled presets and text parsing of vectors.
//!
//! Lattice files are JSON objects `{"label": ..., "rank": n, "gram": [[..]]}`.
//! Presets ship inside the crate; setting `CONEKIT_DATA_DIR` makes
//! `<dir>/<name>.json` take precedence over the bundled copy.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::IntMatrix;
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};

pub const DATA_DIR_ENV: &str = "CONEKIT_DATA_DIR";

const PRESETS: &[(&str, &str)] = &[
    (
        "anisotropic3",
        include_str!("../data/presets/anisotropic3.json"),
    ),
    (
        "minkowski3",
        include_str!("../data/presets/minkowski3.json"),
    ),
    (
        "minkowski4",
        include_str!("../data/presets/minkowski4.json"),
    ),
    (
        "pell-plane",
        include_str!("../data/presets/pell-plane.json"),
    ),
    ("u", include_str!("../data/presets/u.json")),
    (
        "u-plus-2neg2",
        include_str!("../data/presets/u-plus-2neg2.json"),
    ),
    (
        "u-plus-neg2",
        include_str!("../data/presets/u-plus-neg2.json"),
    ),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub label: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
}

impl LatticeFile {
    pub fn from_lattice(l: &QuadLattice) -> Self {
        LatticeFile {
            label: l.label().unwrap_or("").to_string(),
            rank: l.rank(),
            gram: l.gram().to_rows(),
        }
    }

    pub fn into_lattice(self) -> Result<QuadLattice> {
        if self.gram.len() != self.rank {
            return Err(Error::Parse(format!(
                "rank {} does not match a Gram matrix with {} rows",
                self.rank,
                self.gram.len()
            )));
        }
        QuadLattice::new(IntMatrix::from_rows(self.gram)?, Some(self.label))
    }
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

pub fn parse_lattice_json(text: &str) -> Result<QuadLattice> {
    let f: LatticeFile = serde_json::from_str(text)?;
    f.into_lattice()
}

pub fn read_lattice_file(path: &Path) -> Result<QuadLattice> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_lattice_json(&text)
}

/// `diag:a,b,...` inline lattice.
pub fn parse_diag(spec: &str) -> Result<QuadLattice> {
    let body = spec
        .strip_prefix("diag:")
        .ok_or_else(|| Error::Parse(format!("expected diag:a,b,..., got {spec}")))?;
    let entries = parse_ints(body)?;
    if entries.is_empty() {
        return Err(Error::Parse("empty diagonal".into()));
    }
    Ok(QuadLattice::diag(&entries)?.with_label(spec))
}

/// Preset by name, or an inline `diag:` lattice.
pub fn load_preset(name: &str) -> Result<QuadLattice> {
    if name.starts_with("diag:") {
        return parse_diag(name);
    }
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        let p = Path::new(&dir).join(format!("{name}.json"));
        if p.is_file() {
            return read_lattice_file(&p);
        }
    }
    match PRESETS.iter().find(|p| p.0 == name) {
        Some((_, text)) => parse_lattice_json(text),
        None => Err(Error::UnknownPreset(name.to_string())),
    }
}

/// Resolves a lattice argument: `diag:` syntax, an existing file, or a preset.
pub fn resolve_lattice(source: &str) -> Result<QuadLattice> {
    if source.starts_with("diag:") {
        return parse_diag(source);
    }
    let p = Path::new(source);
    if p.is_file() {
        return read_lattice_file(p);
    }
    load_preset(source)
}

pub fn parse_ints(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
        })
        .collect()
}

/// One vector, `"1,0,-2"`.
pub fn parse_vector(text: &str) -> Result<LatticeVec> {
    let v = parse_ints(text)?;
    if v.is_empty() {
        return Err(Error::Parse(format!("empty vector {text:?}")));
    }
    Ok(LatticeVec(v))
}

/// Several vectors separated by semicolons, `"0,1,0;0,0,1"`.
pub fn parse_vectors(text: &str) -> Result<Vec<LatticeVec>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_vector)
        .collect()
}

/// Rational vector, entries `p` or `p/q`.
pub fn parse_rational_vector(text: &str) -> Result<Vec<crate::arith::Rational>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<crate::arith::Rational>()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
        })
        .collect()
}

/// First positive vector among the basis vectors, then `{0,1}` vectors, then
/// vectors of growing sup-norm.
pub fn default_anchor(l: &QuadLattice) -> Result<LatticeVec> {
    let r = l.rank();
    for i in 0..r {
        let e = LatticeVec::basis(r, i);
        if l.norm(&e)? > 0 {
            return Ok(e);
        }
    }
    for mask in 1u64..(1u64 << r.min(20)) {
        let v = LatticeVec((0..r).map(|i| ((mask >> i) & 1) as i64).collect());
        if l.norm(&v)? > 0 {
            return Ok(v);
        }
    }
    for b in 1..=8i64 {
        let mut c = vec![-b; r];
        loop {
            let v = LatticeVec(c.clone());
            if v.iter().any(|x| x.abs() == b) && l.norm(&v)? > 0 {
                return Ok(v);
            }
            let mut i = 0;
            while i < r && c[i] == b {
                c[i] = -b;
                i += 1;
            }
            if i == r {
                break;
            }
            c[i] += 1;
        }
    }
    Err(Error::Precondition(
        "no positive vector found for a default anchor".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_examples() {
        assert_eq!(
            load_preset("diag:1,-1,-1").unwrap().gram(),
            &IntMatrix::diagonal(&[1, -1, -1])
        );
        let u = load_preset("u").unwrap();
        assert_eq!(u.gram().to_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            load_preset("nosuch").unwrap_err(),
            Error::UnknownPreset("nosuch".into())
        );
        for name in preset_names() {
            let l = load_preset(name).unwrap();
            assert_eq!(l.label(), Some(name));
            assert!(l.signature().is_hyperbolic(), "{name}");
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(
            parse_vector(" 1, 0,-2 ").unwrap(),
            LatticeVec(vec![1, 0, -2])
        );
        assert_eq!(
            parse_vectors("0,1,0;0,0,1").unwrap(),
            vec![LatticeVec(vec![0, 1, 0]), LatticeVec(vec![0, 0, 1])]
        );
        assert!(matches!(parse_vector("1,x"), Err(Error::Parse(_))));
        assert!(matches!(parse_diag("diag:"), Err(Error::Parse(_))));
        let r = parse_rational_vector("1/2,3").unwrap();
        assert_eq!(r[0], crate::arith::Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn lattice_file_round_trip() {
        let l = load_preset("u-plus-neg2").unwrap();
        let text = serde_json::to_string(&LatticeFile::from_lattice(&l)).unwrap();
        assert_eq!(parse_lattice_json(&text).unwrap().gram(), l.gram());
        let bad = r#"{"label":"x","rank":3,"gram":[[1,0],[0,-1]]}"#;
        assert!(matches!(parse_lattice_json(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn anchors() {
        assert_eq!(
            default_anchor(&load_preset("u").unwrap()).unwrap(),
            LatticeVec(vec![1, 1])
        );
        assert_eq!(
            default_anchor(&load_preset("u-plus-neg2").unwrap()).unwrap(),
            LatticeVec(vec![1, 1, 0])
        );
        assert_eq!(
            default_anchor(&load_preset("minkowski4").unwrap()).unwrap(),
            LatticeVec(vec![1, 0, 0, 0])
        );
    }
}
