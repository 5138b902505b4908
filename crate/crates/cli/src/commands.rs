use std::io::Write;
use std::path::{Path, PathBuf};

use conekit_core::chambers::Chamber;
use conekit_core::enumeration::{enum_isotropic_primitive, enum_negative_primitive, EnumWindow};
use conekit_core::hyperbolic::{
    geodesic_walls, CuspReport, DensityConfig, GeodesicReport, WindowSchedule,
};
use conekit_core::io::{
    default_anchor, parse_rational_vector, parse_vector, parse_vectors, resolve_lattice,
};
use conekit_core::orbits::{reflection_group, ClosurePolicy, GroupSpec};
use conekit_core::period::projective_witness;
use conekit_core::report::{
    ChamberResult, CuspConfig, EnumResult, GroupConfig, LatticeInfo, LatticeSpec, ProbeConfig,
    RunConfig,
};
use conekit_core::{
    build_arrangement, closed_geodesic_length, cusp_clearance, deformation_target, density_probe,
    is_projective_type, orbit_decompose, picard_closure, Arrangement, Error, IntMatrix, Isometry,
    LatticeVec, QuadLattice, Report, Result,
};
use serde::Deserialize;

use crate::args::*;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Lattice(LatticeCmd::Info { lattice, output }) => {
            let (src, l) = load(&lattice)?;
            let cfg = base_config("lattice info", &src, &l);
            emit(
                &Report::new(cfg, &LatticeInfo::of(&l))?,
                output.out.as_deref(),
            )
        }
        Command::Enum(a) => enum_cmd(a),
        Command::Orbits(a) => orbits_cmd(a),
        Command::Chambers(c) => chambers_cmd(c),
        Command::Hyp(HypCmd::Density(a)) => density_cmd(a),
        Command::Hyp(HypCmd::Geodesic(a)) => {
            let (mut cfg, l, anchor) = geodesic_setup("hyp geodesic", &a)?;
            let geos = geodesics(&l, &a, &anchor)?;
            cfg.json_out = path_string(a.output.out.as_deref());
            emit(&Report::new(cfg, &geos)?, a.output.out.as_deref())
        }
        Command::Hyp(HypCmd::Cusps {
            geo,
            cusp_height,
            samples_per_period,
        }) => {
            let (mut cfg, l, anchor) = geodesic_setup("hyp cusps", &geo)?;
            let mut geos = geodesics(&l, &geo, &anchor)?;
            let r: CuspReport =
                cusp_clearance(&l, &anchor, cusp_height, &mut geos, samples_per_period)?;
            cfg.cusps = Some(CuspConfig {
                cusp_height,
                samples_per_period,
            });
            cfg.json_out = path_string(geo.output.out.as_deref());
            emit(&Report::new(cfg, &r)?, geo.output.out.as_deref())
        }
        Command::Period(p) => period_cmd(p),
    }
}

fn load(arg: &LatticeArg) -> Result<(String, QuadLattice)> {
    let src = match (&arg.lattice, &arg.preset) {
        (Some(s), None) | (None, Some(s)) => s.clone(),
        (Some(_), Some(_)) => {
            return Err(Error::Parse(
                "give either --lattice or --preset, not both".into(),
            ))
        }
        (None, None) => return Err(Error::Parse("missing --lattice or --preset".into())),
    };
    let l = resolve_lattice(&src)?;
    Ok((src, l))
}

fn base_config(command: &str, src: &str, l: &QuadLattice) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        lattice: LatticeSpec::new(src, l),
        ..Default::default()
    }
}

fn anchor_of(l: &QuadLattice, text: Option<&str>) -> Result<LatticeVec> {
    let a = match text {
        Some(t) => parse_vector(t)?,
        None => default_anchor(l)?,
    };
    if a.len() != l.rank() {
        return Err(Error::Parse(format!(
            "anchor {a} has {} coordinates, lattice rank is {}",
            a.len(),
            l.rank()
        )));
    }
    Ok(a)
}

fn squares_of(squares: &[i64]) -> Result<Vec<i64>> {
    if squares.is_empty() {
        return Err(Error::Parse("--squares needs at least one value".into()));
    }
    let mut out = Vec::with_capacity(squares.len());
    for &d in squares {
        if d == 0 {
            return Err(Error::Parse("wall squares must be nonzero".into()));
        }
        out.push(d.abs());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn path_string(p: Option<&Path>) -> Option<String> {
    p.map(|p| p.display().to_string())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::Io(format!("stdout: {e}")))
}

/// JSON report to a file, or to standard output.
fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    let text = report.to_json()?;
    match out {
        Some(p) => write_file(p, &text),
        None => write_stdout(&text),
    }
}

fn enum_cmd(a: EnumArgs) -> Result<()> {
    let (src, l) = load(&a.lattice)?;
    let anchor = anchor_of(&l, a.window.anchor.as_deref())?;
    let d = a.square.abs();
    let window = EnumWindow::new(anchor.clone(), a.window.height, d);
    let vectors = if d == 0 {
        enum_isotropic_primitive(&l, &window)?
    } else {
        enum_negative_primitive(&l, &window)?
    };
    let mut text = String::new();
    for v in &vectors {
        text.push_str(
            &v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        text.push('\n');
    }
    write_stdout(&text)?;

    let mut cfg = base_config("enum", &src, &l);
    cfg.anchor = Some(anchor);
    cfg.height = Some(a.window.height);
    cfg.squares = vec![d];
    cfg.json_out = path_string(a.out.as_deref());
    let result = EnumResult {
        window,
        count: vectors.len(),
        vectors,
    };
    let report = Report::new(cfg, &result)?.to_json()?;
    match &a.out {
        Some(p) => write_file(p, &report),
        None => {
            eprint!("{report}");
            Ok(())
        }
    }
}

#[derive(Deserialize)]
struct GroupFile {
    name: String,
    generators: Vec<Vec<Vec<i64>>>,
}

/// Group from `--group`, with its configuration record.
fn group_of(
    l: &QuadLattice,
    g: &GroupArgs,
    squares: &[i64],
    anchor: &LatticeVec,
    height: u64,
) -> Result<(GroupSpec, GroupConfig)> {
    let height_cap = g.height_cap.unwrap_or(height);
    let gen_height = g.group_height.unwrap_or(height);
    let policy = ClosurePolicy::new(anchor.clone(), g.word_cap, height_cap);
    let (spec, sq, gh) = if g.group == "reflections" {
        let w = EnumWindow::new(anchor.clone(), gen_height, 1);
        let spec = reflection_group(l, squares, &w, g.word_cap)?.with_policy(policy);
        (spec, squares.to_vec(), gen_height)
    } else {
        let path = PathBuf::from(&g.group);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let f: GroupFile = serde_json::from_str(&text)?;
        let gens = f
            .generators
            .into_iter()
            .map(|rows| Isometry::new(l, IntMatrix::from_rows(rows)?))
            .collect::<Result<Vec<_>>>()?;
        (GroupSpec::new(l, f.name, gens, policy)?, Vec::new(), 0)
    };
    let cfg = GroupConfig {
        source: g.group.clone(),
        squares: sq,
        height: gh,
        word_cap: g.word_cap,
        height_cap,
        generator_count: spec.len(),
    };
    Ok((spec, cfg))
}

fn orbits_cmd(a: OrbitArgs) -> Result<()> {
    let (src, l) = load(&a.lattice)?;
    let anchor = anchor_of(&l, a.window.anchor.as_deref())?;
    let squares = squares_of(&a.squares)?;
    let h = a.window.height;
    let mut vectors = Vec::new();
    for &d in &squares {
        vectors.extend(enum_negative_primitive(
            &l,
            &EnumWindow::new(anchor.clone(), h, d),
        )?);
    }
    let (group, gcfg) = group_of(&l, &a.group, &squares, &anchor, h)?;
    let r = orbit_decompose(&l, &vectors, &group)?;
    let mut cfg = base_config("orbits", &src, &l);
    cfg.anchor = Some(anchor);
    cfg.height = Some(h);
    cfg.squares = squares;
    cfg.group = Some(gcfg);
    cfg.json_out = path_string(a.output.out.as_deref());
    emit(&Report::new(cfg, &r)?, a.output.out.as_deref())
}

fn arrangement_of(
    a: &ArrangementArgs,
    command: &str,
) -> Result<(RunConfig, QuadLattice, Arrangement, Chamber)> {
    let (src, l) = load(&a.lattice)?;
    let anchor = anchor_of(&l, a.window.anchor.as_deref())?;
    let squares = squares_of(&a.squares)?;
    let window = EnumWindow::new(anchor.clone(), a.window.height, 1);
    let arr = build_arrangement(&l, &squares, &window, None)?;
    let mut cfg = base_config(command, &src, &l);
    cfg.anchor = Some(anchor);
    cfg.height = Some(a.window.height);
    cfg.squares = squares;
    cfg.json_out = path_string(a.output.out.as_deref());
    let chamber = match &a.point {
        Some(p) => {
            let x = parse_rational_vector(p)?;
            cfg.point = Some(x.iter().map(|q| q.to_string()).collect());
            arr.locate_chamber(&x)?
        }
        None => arr.base_chamber(),
    };
    Ok((cfg, l, arr, chamber))
}

fn chambers_cmd(c: ChamberCmd) -> Result<()> {
    match c {
        ChamberCmd::Locate(a) => {
            let (cfg, _, arr, ch) = arrangement_of(&a, "chambers locate")?;
            emit(
                &Report::new(cfg, &ChamberResult::new(&arr, ch))?,
                a.output.out.as_deref(),
            )
        }
        ChamberCmd::Faces(a) => {
            let (cfg, _, arr, ch) = arrangement_of(&a, "chambers faces")?;
            let faces = arr.faces(&ch)?;
            let mut r = ChamberResult::new(&arr, ch);
            r.faces = faces;
            emit(&Report::new(cfg, &r)?, a.output.out.as_deref())
        }
        ChamberCmd::Cross { arr: a, wall } => {
            let (mut cfg, l, arr, ch) = arrangement_of(&a, "chambers cross")?;
            let z = parse_vector(&wall)?;
            let z = l.canonical_wall(&arr.window_anchor.0, &z)?;
            let next = arr.cross_wall(&ch, &z)?;
            cfg.wall = Some(z.clone());
            let mut r = ChamberResult::new(&arr, ch);
            r.crossed = Some(z);
            r.neighbour = Some(next);
            emit(&Report::new(cfg, &r)?, a.output.out.as_deref())
        }
        ChamberCmd::AutOrbits { arr: a, group } => {
            let (mut cfg, l, arr, ch) = arrangement_of(&a, "chambers aut-orbits")?;
            let anchor = cfg.anchor.clone().expect("anchor is set");
            let (g, gcfg) = group_of(&l, &group, &cfg.squares, &anchor, a.window.height)?;
            let fo = arr.face_orbit_count(&ch, &g)?;
            cfg.group = Some(gcfg);
            let mut r = ChamberResult::new(&arr, ch);
            r.face_orbits = Some(fo);
            emit(&Report::new(cfg, &r)?, a.output.out.as_deref())
        }
    }
}

fn density_cmd(a: DensityArgs) -> Result<()> {
    let (src, l) = load(&a.lattice)?;
    let anchor = anchor_of(&l, a.anchor.as_deref())?;
    if a.d_max < 1 {
        return Err(Error::Parse("--d-max must be at least 1".into()));
    }
    if !(a.radius.is_finite() && a.radius > 0.0) {
        return Err(Error::Parse("--radius must be positive".into()));
    }
    if a.samples == 0 {
        return Err(Error::Parse("--samples must be at least 1".into()));
    }
    let dc = DensityConfig {
        anchor: anchor.clone(),
        radius: a.radius,
        samples: a.samples,
        seed: a.seed,
        d_schedule: (1..=a.d_max).collect(),
        window: WindowSchedule {
            base: a.window_base,
            slope: a.window_slope,
        },
    };
    let r = density_probe(&l, &dc)?;
    let csv = r.to_csv();
    match &a.csv {
        Some(p) => write_file(p, &csv)?,
        None => write_stdout(&csv)?,
    }
    if let Some(out) = &a.out {
        let mut cfg = base_config("hyp density", &src, &l);
        cfg.anchor = Some(anchor);
        cfg.probe = Some(ProbeConfig {
            radius: a.radius,
            samples: a.samples,
            seed: a.seed,
            d_max: a.d_max,
            window_base: a.window_base,
            window_slope: a.window_slope,
        });
        cfg.json_out = path_string(Some(out));
        cfg.csv_out = path_string(a.csv.as_deref());
        write_file(out, &Report::new(cfg, &r)?.to_json()?)?;
    }
    Ok(())
}

fn geodesic_setup(command: &str, a: &GeodesicArgs) -> Result<(RunConfig, QuadLattice, LatticeVec)> {
    let (src, l) = load(&a.lattice)?;
    let anchor = anchor_of(&l, a.anchor.as_deref())?;
    let mut cfg = base_config(command, &src, &l);
    cfg.anchor = Some(anchor.clone());
    match &a.wall {
        Some(w) => cfg.wall = Some(parse_vector(w)?),
        None => {
            cfg.squares = squares_of(&a.squares)?;
            cfg.height = Some(a.height);
        }
    }
    Ok((cfg, l, anchor))
}

fn geodesics(
    l: &QuadLattice,
    a: &GeodesicArgs,
    anchor: &LatticeVec,
) -> Result<Vec<GeodesicReport>> {
    match &a.wall {
        Some(w) => Ok(vec![closed_geodesic_length(l, &parse_vector(w)?)?]),
        None => geodesic_walls(
            l,
            &squares_of(&a.squares)?,
            &EnumWindow::new(anchor.clone(), a.height, 1),
        ),
    }
}

fn period_cmd(p: PeriodCmd) -> Result<()> {
    let (command, a, bound) = match p {
        PeriodCmd::Picard(a) => ("period picard", a, None),
        PeriodCmd::Projective(a) => ("period projective", a, None),
        PeriodCmd::Deform { args, bound } => ("period deform", args, Some(bound)),
    };
    let (src, l) = load(&a.lattice)?;
    let classes = parse_vectors(&a.classes)?;
    let n = picard_closure(&l, &classes)?;
    let mut cfg = base_config(command, &src, &l);
    cfg.vectors = classes;
    cfg.search_bound = bound;
    cfg.json_out = path_string(a.output.out.as_deref());
    let result = match (command, bound) {
        ("period projective", _) => {
            let mut v = serde_json::to_value(&n)?;
            v["projective"] = serde_json::json!(is_projective_type(&n));
            v["witness"] = serde_json::to_value(projective_witness(&n))?;
            v
        }
        (_, Some(b)) => serde_json::to_value(deformation_target(&l, &n, b)?)?,
        _ => serde_json::to_value(&n)?,
    };
    emit(&Report::new(cfg, &result)?, a.output.out.as_deref())
}
