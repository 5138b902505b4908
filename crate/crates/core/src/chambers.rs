//! Wall-and-chamber structure of the positive cone relative to a finite window
//! of walls.
//!
//! A chamber is recorded by an integer representative of an interior ray and
//! its sign vector against the sorted wall list. Face tests are decided in
//! exact rational arithmetic: a linear program with a uniform slack variable
//! settles whether the open polyhedral piece of the wall is nonempty, and a
//! cutting-plane loop on the concave restriction of the form decides whether
//! that piece meets the positive cone.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    floor_sqrt_rational, primitive_integer_multiple, rat, rational_inverse, BigVec, Rational,
};
use crate::enumeration::{enum_negative_primitive, height, EnumWindow};
use crate::error::{Error, Result};
use crate::lattice::{LatticeVec, QuadLattice};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::orbits::{enumerate_elements, search_words, GroupSpec, GroupWord, OrbitStatus};

/// Rounds of the cutting-plane loop before a face test gives up undecided.
const MAX_CUTS: usize = 80;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub vector: LatticeVec,
    /// `q(z,z)`, negative
    pub square: i64,
    pub divisibility: i64,
}

/// Finite wall arrangement in the positive cone.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub lattice: QuadLattice,
    /// integer anchor of the enumeration window; walls are sign-canonical
    /// relative to it
    pub window_anchor: LatticeVec,
    /// base point of the arrangement, off every wall
    pub anchor: BigVec,
    pub perturbed: bool,
    pub squares: Vec<i64>,
    pub height: u64,
    pub expanded_by: Option<String>,
    pub walls: Vec<Wall>,
    pairing: Vec<Vec<i64>>,
    index: HashMap<LatticeVec, usize>,
}

/// Chamber: an interior ray and its signs against every wall.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Chamber {
    pub point: BigVec,
    pub signs: Vec<i8>,
}

impl PartialEq for Chamber {
    fn eq(&self, other: &Self) -> bool {
        self.signs == other.signs
    }
}

impl Eq for Chamber {}

/// Result of a face test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceCheck {
    pub wall: LatticeVec,
    pub is_face: bool,
    /// interior point of the face, when it is one
    pub witness: Option<BigVec>,
    /// false only when the cutting-plane loop hit its round limit
    pub certified: bool,
}

fn dot_big(x: &[BigInt], y: &[i64]) -> BigInt {
    x.iter()
        .zip(y)
        .fold(BigInt::zero(), |acc, (a, &b)| acc + a * b)
}

fn dot_rat(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn sign(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Arrangement {
    /// Builds an arrangement from explicit walls (deduplicated and sorted).
    pub fn from_walls(
        lattice: &QuadLattice,
        window_anchor: LatticeVec,
        walls: Vec<LatticeVec>,
        squares: Vec<i64>,
        height: u64,
    ) -> Result<Self> {
        lattice.ensure_nondegenerate()?;
        lattice.ensure_hyperbolic()?;
        lattice.check_dim(&window_anchor)?;
        if lattice.norm(&window_anchor)? <= 0 {
            return Err(Error::NotPositive(window_anchor.to_string()));
        }
        let mut vecs = Vec::with_capacity(walls.len());
        for z in walls {
            if !z.is_primitive()? {
                return Err(Error::Precondition(format!("wall {z} is not primitive")));
            }
            if lattice.norm(&z)? >= 0 {
                return Err(Error::NotNegative(z.to_string()));
            }
            vecs.push(lattice.canonical_wall(&window_anchor, &z)?);
        }
        vecs.sort();
        vecs.dedup();
        let walls: Vec<Wall> = vecs
            .into_iter()
            .map(|z| {
                Ok(Wall {
                    square: lattice.norm(&z)?,
                    divisibility: lattice.divisibility(&z)?,
                    vector: z,
                })
            })
            .collect::<Result<_>>()?;
        let pairing = walls
            .iter()
            .map(|w| lattice.pairing_vector(&w.vector))
            .collect::<Result<Vec<_>>>()?;
        let index = walls
            .iter()
            .enumerate()
            .map(|(i, w)| (w.vector.clone(), i))
            .collect();
        let (anchor, perturbed) = perturb_anchor(lattice, &window_anchor, &pairing)?;
        Ok(Arrangement {
            lattice: lattice.clone(),
            window_anchor,
            anchor: BigVec(anchor),
            perturbed,
            squares,
            height,
            expanded_by: None,
            walls,
            pairing,
            index,
        })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn wall_index(&self, z: &LatticeVec) -> Option<usize> {
        self.index.get(z).copied()
    }

    /// Canonical wall index for an arbitrary (possibly unoriented) vector.
    pub fn find_wall(&self, z: &LatticeVec) -> Result<Option<usize>> {
        Ok(self.wall_index(&self.lattice.canonical_wall(&self.window_anchor, z)?))
    }

    fn signs_of(&self, x: &[BigInt]) -> Vec<i8> {
        self.pairing
            .iter()
            .map(|gz| sign(&dot_big(x, gz)))
            .collect()
    }

    /// Chamber containing the anchor.
    pub fn base_chamber(&self) -> Chamber {
        Chamber {
            signs: self.signs_of(&self.anchor.0),
            point: self.anchor.clone(),
        }
    }

    /// Sign vector of a rational positive point.
    pub fn locate_chamber(&self, x: &[Rational]) -> Result<Chamber> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: x.len(),
            });
        }
        self.locate_integer(&primitive_integer_multiple(x))
    }

    /// Sign vector of an integer representative of a positive ray.
    pub fn locate_integer(&self, x: &[BigInt]) -> Result<Chamber> {
        let l = &self.lattice;
        if !l.pair_big2(x, x).is_positive() {
            return Err(Error::NotPositive(crate::arith::fmt_vec(x)));
        }
        if !l.pair_big2(x, &self.anchor.0).is_positive() {
            return Err(Error::DifferentComponents);
        }
        let signs = self.signs_of(x);
        if let Some(i) = signs.iter().position(|&s| s == 0) {
            return Err(Error::OnWall(self.walls[i].vector.to_string()));
        }
        Ok(Chamber {
            point: BigVec(x.to_vec()),
            signs,
        })
    }

    fn require_wall(&self, z: &LatticeVec) -> Result<usize> {
        self.find_wall(z)?
            .ok_or_else(|| Error::UnknownWall(z.to_string()))
    }

    /// Exact face test for a wall of the arrangement.
    pub fn is_face(&self, chamber: &Chamber, wall: &LatticeVec) -> Result<FaceCheck> {
        let wi = self.require_wall(wall)?;
        self.face_check(chamber, wi)
    }

    fn face_check(&self, chamber: &Chamber, wi: usize) -> Result<FaceCheck> {
        let wall = self.walls[wi].vector.clone();
        let outcome = FaceSearch::new(self, chamber, wi).run()?;
        Ok(match outcome {
            FaceOutcome::Face(y) => {
                debug_assert!(self.verify_witness(chamber, wi, &y));
                FaceCheck {
                    wall,
                    is_face: true,
                    witness: Some(BigVec(y)),
                    certified: true,
                }
            }
            FaceOutcome::NotFace => FaceCheck {
                wall,
                is_face: false,
                witness: None,
                certified: true,
            },
            FaceOutcome::Undecided => FaceCheck {
                wall,
                is_face: false,
                witness: None,
                certified: false,
            },
        })
    }

    /// Exact recheck of a face witness against every wall.
    pub fn verify_witness(&self, chamber: &Chamber, wi: usize, y: &[BigInt]) -> bool {
        let l = &self.lattice;
        if y.len() != self.rank() {
            return false;
        }
        if !l.pair_big2(y, y).is_positive() || !l.pair_big2(y, &chamber.point.0).is_positive() {
            return false;
        }
        self.pairing.iter().enumerate().all(|(j, gz)| {
            let s = sign(&dot_big(y, gz));
            if j == wi {
                s == 0
            } else {
                s == chamber.signs[j]
            }
        })
    }

    /// All faces of a chamber, one test per wall.
    pub fn faces(&self, chamber: &Chamber) -> Result<Vec<FaceCheck>> {
        let checks: Vec<Result<FaceCheck>> = (0..self.walls.len())
            .into_par_iter()
            .map(|wi| self.face_check(chamber, wi))
            .collect();
        checks.into_iter().collect()
    }

    /// Neighbouring chamber across a face, with the point used to reach it.
    pub fn cross_wall(&self, chamber: &Chamber, wall: &LatticeVec) -> Result<Chamber> {
        let wi = self.require_wall(wall)?;
        let check = self.face_check(chamber, wi)?;
        let Some(BigVec(y)) = check.witness else {
            return Err(Error::NotAFace(self.walls[wi].vector.to_string()));
        };
        let w = &self.walls[wi].vector;
        let s = chamber.signs[wi];
        let l = &self.lattice;
        let mut k = BigInt::one();
        for _ in 0..256 {
            let x: Vec<BigInt> = y
                .iter()
                .zip(w.iter())
                .map(|(a, &b)| &k * a + BigInt::from(s as i64 * b))
                .collect();
            if l.pair_big2(&x, &x).is_positive() && l.pair_big2(&x, &chamber.point.0).is_positive()
            {
                let signs = self.signs_of(&x);
                let flipped = signs.iter().enumerate().all(|(j, &t)| {
                    if j == wi {
                        t == -s
                    } else {
                        t == chamber.signs[j]
                    }
                });
                if flipped {
                    let x = primitive_integer_multiple(
                        &x.iter()
                            .map(|v| Rational::from_integer(v.clone()))
                            .collect::<Vec<_>>(),
                    );
                    return Ok(Chamber {
                        point: BigVec(x),
                        signs,
                    });
                }
            }
            k *= 2;
        }
        Err(Error::Precondition("could not step across the wall".into()))
    }

    fn maps_chamber(&self, g: &crate::lattice::Isometry, from: &Chamber, to: &Chamber) -> bool {
        let gx = g.apply_big(&from.point.0);
        self.pairing
            .iter()
            .zip(&to.signs)
            .all(|(gz, &s)| sign(&dot_big(&gx, gz)) == s)
    }

    /// Group words (within the policy's word cap) mapping the chamber's
    /// interior point back into the chamber.
    pub fn chamber_stabilizer(
        &self,
        chamber: &Chamber,
        group: &GroupSpec,
    ) -> Result<(Vec<GroupWord>, bool)> {
        group.verify(&self.lattice)?;
        search_words(group, group.policy.word_cap, |g| {
            Ok(self.maps_chamber(g, chamber, chamber))
        })
    }

    /// Faces of a chamber partitioned under its stabilizer.
    pub fn face_orbit_count(
        &self,
        chamber: &Chamber,
        group: &GroupSpec,
    ) -> Result<FaceOrbitReport> {
        let checks = self.faces(chamber)?;
        let undecided = checks.iter().filter(|c| !c.certified).count();
        let faces: Vec<FaceCheck> = checks.into_iter().filter(|c| c.is_face).collect();
        let (stab, closed) = self.chamber_stabilizer(chamber, group)?;

        let pos: HashMap<&LatticeVec, usize> = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (&f.wall, i))
            .collect();
        let mut parent: Vec<usize> = (0..faces.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &stab {
            for (i, f) in faces.iter().enumerate() {
                let img = self
                    .lattice
                    .canonical_wall(&self.window_anchor, &e.isometry.apply(&f.wall)?)?;
                if let Some(&j) = pos.get(&img) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut orbits: HashMap<usize, Vec<LatticeVec>> = HashMap::new();
        for i in 0..faces.len() {
            let r = find(&mut parent, i);
            orbits.entry(r).or_default().push(faces[i].wall.clone());
        }
        let mut orbits: Vec<Vec<LatticeVec>> = orbits.into_values().collect();
        for o in orbits.iter_mut() {
            o.sort();
        }
        orbits.sort();
        let status = if closed && undecided == 0 {
            OrbitStatus::CompleteWithinWindow
        } else {
            OrbitStatus::Capped
        };
        Ok(FaceOrbitReport {
            height: self.height,
            squares: self.squares.clone(),
            wall_count: self.walls.len(),
            group: group.name.clone(),
            word_cap: group.policy.word_cap,
            stabilizer_size: stab.len(),
            stabilizer_closed: closed,
            orbit_count: orbits.len(),
            faces,
            orbits,
            undecided,
            status,
        })
    }

    /// A group word mapping one chamber onto another, if one exists within
    /// the word cap.
    pub fn chamber_equivalent(
        &self,
        from: &Chamber,
        to: &Chamber,
        group: &GroupSpec,
    ) -> Result<Option<GroupWord>> {
        group.verify(&self.lattice)?;
        let ball = enumerate_elements(group, group.policy.word_cap)?;
        Ok(ball
            .elements
            .into_iter()
            .find(|e| self.maps_chamber(&e.isometry, from, to)))
    }
}

/// Faces of one chamber grouped into stabilizer orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceOrbitReport {
    pub height: u64,
    pub squares: Vec<i64>,
    pub wall_count: usize,
    pub group: String,
    pub word_cap: usize,
    pub stabilizer_size: usize,
    pub stabilizer_closed: bool,
    pub orbit_count: usize,
    pub faces: Vec<FaceCheck>,
    pub orbits: Vec<Vec<LatticeVec>>,
    /// face tests that hit the cutting-plane limit
    pub undecided: usize,
    pub status: OrbitStatus,
}

/// Walls for each square inside the window, optionally closed up under a
/// group (kept within the group's height cap).
pub fn build_arrangement(
    lattice: &QuadLattice,
    squares: &[i64],
    window: &EnumWindow,
    group: Option<&GroupSpec>,
) -> Result<Arrangement> {
    let mut walls = Vec::new();
    for &d in squares {
        walls.extend(enum_negative_primitive(lattice, &window.with_square(d))?);
    }
    let mut height_used = window.height_bound;
    if let Some(g) = group {
        g.verify(lattice)?;
        let anchor = &window.anchor;
        let cap = g.policy.height_cap.max(window.height_bound);
        height_used = cap;
        let mut seen: std::collections::HashSet<LatticeVec> = walls.iter().cloned().collect();
        let mut queue: std::collections::VecDeque<LatticeVec> = walls.iter().cloned().collect();
        while let Some(z) = queue.pop_front() {
            for gen in &g.generators {
                let img = lattice.canonical_wall(anchor, &gen.apply(&z)?)?;
                if height(lattice, anchor, &img)? <= cap && seen.insert(img.clone()) {
                    if seen.len() > g.policy.max_visited {
                        return Err(Error::Precondition(
                            "wall expansion exceeded visit cap".into(),
                        ));
                    }
                    walls.push(img.clone());
                    queue.push_back(img);
                }
            }
        }
    }
    let mut a = Arrangement::from_walls(
        lattice,
        window.anchor.clone(),
        walls,
        squares.to_vec(),
        height_used,
    )?;
    a.expanded_by = group.map(|g| g.name.clone());
    Ok(a)
}

/// Moves an anchor lying on walls into a chamber interior:
/// `N h + u` with `u = (1, t, t^2, ...)` missing every wall through `h`.
fn perturb_anchor(
    lattice: &QuadLattice,
    h: &[i64],
    pairing: &[Vec<i64>],
) -> Result<(Vec<BigInt>, bool)> {
    let hb: Vec<BigInt> = h.iter().map(|&x| BigInt::from(x)).collect();
    let through: Vec<&Vec<i64>> = pairing
        .iter()
        .filter(|gz| dot_big(&hb, gz).is_zero())
        .collect();
    if through.is_empty() {
        return Ok((hb, false));
    }
    let r = h.len();
    for t in 2i64.. {
        let u: Vec<BigInt> = (0..r as u32).map(|k| BigInt::from(t).pow(k)).collect();
        if through.iter().any(|gz| dot_big(&u, gz).is_zero()) {
            continue;
        }
        // N large enough to keep every nonzero sign of h and positivity
        let mut n = BigInt::one();
        for gz in pairing {
            let hz = dot_big(&hb, gz);
            if !hz.is_zero() {
                let uz = dot_big(&u, gz).abs();
                let need = uz / hz.abs() + 1;
                if need > n {
                    n = need;
                }
            }
        }
        loop {
            let x: Vec<BigInt> = hb.iter().zip(&u).map(|(a, b)| &n * a + b).collect();
            let ok = lattice.pair_big2(&x, &x).is_positive()
                && lattice.pair_big2(&x, &hb).is_positive()
                && pairing.iter().all(|gz| {
                    let s = sign(&dot_big(&x, gz));
                    let sh = sign(&dot_big(&hb, gz));
                    s != 0 && (sh == 0 || s == sh)
                });
            if ok {
                return Ok((x, true));
            }
            n *= 2;
        }
    }
    unreachable!()
}

enum FaceOutcome {
    Face(Vec<BigInt>),
    NotFace,
    Undecided,
}

/// Data for deciding whether one wall supports a face of one chamber.
///
/// Coordinates `y` live on the slice `{q(y,w) = 0, q(y,p) = 1}` where `p` is
/// the projection of the chamber point to `w^⊥`; on that slice `-q(y,y)` is
/// convex, and every positive point of the right component meets it.
struct FaceSearch<'a> {
    arr: &'a Arrangement,
    chamber: &'a Chamber,
    wi: usize,
    gram: Vec<Vec<Rational>>,
    gp: Vec<Rational>,
    gw: Vec<Rational>,
    qpp: Rational,
    /// box half-widths; y = v - m with 0 <= v <= 2m
    half: Vec<Rational>,
}

impl<'a> FaceSearch<'a> {
    fn new(arr: &'a Arrangement, chamber: &'a Chamber, wi: usize) -> Self {
        let l = &arr.lattice;
        let r = l.rank();
        let gram = l.gram().to_rational();
        let a: Vec<Rational> = chamber
            .point
            .0
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        let w = &arr.walls[wi].vector;
        let wr = w.to_rational();
        let gw: Vec<Rational> = arr.pairing[wi].iter().map(|&x| rat(x)).collect();
        let qaw = dot_rat(&a, &gw);
        let qww = rat(arr.walls[wi].square);
        let ratio = &qaw / &qww;
        let p: Vec<Rational> = a.iter().zip(&wr).map(|(ai, wi)| ai - &ratio * wi).collect();
        let gp: Vec<Rational> = (0..r).map(|i| dot_rat(&gram[i], &p)).collect();
        let qpp = dot_rat(&p, &gp);
        debug_assert!(qpp.is_positive());
        // majorant 2 (Gp)(Gp)^T / q(p,p) - G is positive definite and is
        // below 2/q(p,p) on the positive part of the slice
        let maj: Vec<Vec<Rational>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| &gp[i] * &gp[j] * rat(2) / &qpp - &gram[i][j])
                    .collect()
            })
            .collect();
        let inv = rational_inverse(&maj).expect("majorant is definite");
        let half = (0..r)
            .map(|i| {
                let b = rat(2) / &qpp * &inv[i][i];
                Rational::from_integer(floor_sqrt_rational(&b) + 1)
            })
            .collect();
        FaceSearch {
            arr,
            chamber,
            wi,
            gram,
            gp,
            gw,
            qpp,
            half,
        }
    }

    fn rank(&self) -> usize {
        self.gram.len()
    }

    fn q(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let gy: Vec<Rational> = (0..self.rank())
            .map(|i| dot_rat(&self.gram[i], y))
            .collect();
        dot_rat(x, &gy)
    }

    /// Adds `coef·y (rel) rhs` in box coordinates, with extra trailing
    /// variable coefficients.
    fn add_row(
        &self,
        lp: &mut LinearProgram,
        coef: &[Rational],
        extra: &[Rational],
        rel: Relation,
        rhs: Rational,
    ) {
        let mut row: Vec<Rational> = coef.to_vec();
        row.extend_from_slice(extra);
        let shift = dot_rat(coef, &self.half);
        lp.add(row, rel, rhs + shift);
    }

    fn base_lp(&self, strict_slack: bool) -> LinearProgram {
        let r = self.rank();
        let mut lp = LinearProgram::new(r + 1);
        let zero = [Rational::zero()];
        self.add_row(&mut lp, &self.gw, &zero, Relation::Eq, Rational::zero());
        self.add_row(&mut lp, &self.gp, &zero, Relation::Eq, Rational::one());
        for (j, gz) in self.arr.pairing.iter().enumerate() {
            if j == self.wi {
                continue;
            }
            let s = self.chamber.signs[j] as i64;
            let coef: Vec<Rational> = gz.iter().map(|&x| rat(s * x)).collect();
            if strict_slack {
                // s q(y,z) - slack >= 0 with slack = sigma - 1
                self.add_row(
                    &mut lp,
                    &coef,
                    &[-Rational::one()],
                    Relation::Ge,
                    -Rational::one(),
                );
            } else {
                self.add_row(&mut lp, &coef, &zero, Relation::Ge, Rational::zero());
            }
        }
        for i in 0..r {
            let mut row = vec![Rational::zero(); r + 1];
            row[i] = Rational::one();
            lp.add(row, Relation::Le, &self.half[i] * rat(2));
        }
        lp
    }

    fn point(&self, x: &[Rational]) -> Vec<Rational> {
        x.iter().zip(&self.half).map(|(v, m)| v - m).collect()
    }

    fn strictly_inside(&self, y: &[Rational]) -> bool {
        self.arr.pairing.iter().enumerate().all(|(j, gz)| {
            if j == self.wi {
                return true;
            }
            let v: Rational = y.iter().zip(gz).map(|(a, &b)| a * rat(b)).sum();
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            s == self.chamber.signs[j]
        })
    }

    fn run(&self) -> Result<FaceOutcome> {
        let r = self.rank();
        // phase A: largest uniform slack
        let mut lp = self.base_lp(true);
        let mut obj = vec![Rational::zero(); r + 1];
        obj[r] = Rational::one();
        lp.objective = obj;
        let mut sigma_row = vec![Rational::zero(); r + 1];
        sigma_row[r] = Rational::one();
        lp.add(sigma_row, Relation::Le, rat(2));
        let interior = match lp.solve() {
            LpOutcome::Optimal { x, .. } => {
                if x[r] <= Rational::one() {
                    return Ok(FaceOutcome::NotFace);
                }
                self.point(&x[..r])
            }
            LpOutcome::Infeasible => return Ok(FaceOutcome::NotFace),
            LpOutcome::Unbounded => unreachable!("slack is bounded"),
        };

        let positive = if self.q(&interior, &interior).is_positive() {
            interior.clone()
        } else {
            // phase B: cutting planes for min -q(y,y) over the closed piece
            let t_lo = -(Rational::one() / &self.qpp);
            let mut lp = self.base_lp(false);
            let mut obj = vec![Rational::zero(); r + 1];
            obj[r] = -Rational::one();
            lp.objective = obj;
            let mut cut_at = interior.clone();
            let mut found = None;
            for _ in 0..MAX_CUTS {
                // t >= q(yk,yk) - 2 q(yk, y)
                let gy: Vec<Rational> = (0..r)
                    .map(|i| dot_rat(&self.gram[i], &cut_at) * rat(2))
                    .collect();
                let rhs = self.q(&cut_at, &cut_at) - &t_lo;
                self.add_row(&mut lp, &gy, &[Rational::one()], Relation::Ge, rhs);
                let LpOutcome::Optimal { x, .. } = lp.solve() else {
                    return Ok(FaceOutcome::Undecided);
                };
                let t = &x[r] + &t_lo;
                if !t.is_negative() {
                    return Ok(FaceOutcome::NotFace);
                }
                let y = self.point(&x[..r]);
                if self.q(&y, &y).is_positive() {
                    found = Some(y);
                    break;
                }
                cut_at = y;
            }
            match found {
                Some(y) => y,
                None => return Ok(FaceOutcome::Undecided),
            }
        };

        // move toward the strict interior point while staying positive
        let mut lambda = Rational::new(1.into(), 2.into());
        for _ in 0..128 {
            let y: Vec<Rational> = positive
                .iter()
                .zip(&interior)
                .map(|(p, i)| (Rational::one() - &lambda) * p + &lambda * i)
                .collect();
            if self.q(&y, &y).is_positive() && self.strictly_inside(&y) {
                let yi = primitive_integer_multiple(&y);
                if self.arr.verify_witness(self.chamber, self.wi, &yi) {
                    return Ok(FaceOutcome::Face(yi));
                }
            }
            lambda /= rat(2);
        }
        Ok(FaceOutcome::Undecided)
    }
}
