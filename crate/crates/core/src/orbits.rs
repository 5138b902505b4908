//! Generator-specified arithmetic groups and orbit decomposition of walls.
//!
//! A group is given by explicit isometries (closed under inverses). Orbits of
//! walls are found by a breadth-first closure that stays inside a height
//! window around an anchor; walls are unoriented, so every vector is
//! sign-canonicalized before it is looked up.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::enumeration::{enum_negative_primitive, height, EnumWindow};
use crate::error::{Error, Result};
use crate::lattice::{Isometry, LatticeVec, QuadLattice};

/// Caps bounding every search over the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosurePolicy {
    /// anchor used for sign canonicalization and heights
    pub anchor: LatticeVec,
    /// longest group word explored by element searches
    pub word_cap: usize,
    /// walls with `|q(anchor, z)|` above this are not explored
    pub height_cap: u64,
    /// hard limit on the number of vectors visited by one closure
    pub max_visited: usize,
}

impl ClosurePolicy {
    pub fn new(anchor: LatticeVec, word_cap: usize, height_cap: u64) -> Self {
        ClosurePolicy {
            anchor,
            word_cap,
            height_cap,
            max_visited: 200_000,
        }
    }
}

/// A finite generating set of isometries together with its search caps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub generators: Vec<Isometry>,
    pub policy: ClosurePolicy,
}

impl GroupSpec {
    /// Checks each generator, adds missing inverses, deduplicates and sorts
    /// so that results never depend on the order generators were supplied in.
    pub fn new(
        lattice: &QuadLattice,
        name: impl Into<String>,
        generators: Vec<Isometry>,
        policy: ClosurePolicy,
    ) -> Result<Self> {
        let mut set: Vec<Isometry> = Vec::with_capacity(generators.len() * 2);
        for g in generators {
            if !lattice.is_isometry(g.matrix()) {
                return Err(Error::NotIsometry);
            }
            let inv = g.inverse(lattice)?;
            set.push(g);
            set.push(inv);
        }
        set.retain(|g| !g.is_identity());
        set.sort();
        set.dedup();
        lattice.check_dim(&policy.anchor)?;
        Ok(GroupSpec {
            name: name.into(),
            generators: set,
            policy,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn with_policy(mut self, policy: ClosurePolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Group generated by a subset of the generators (used to compare orbit
    /// counts across nested groups).
    pub fn restricted(&self, lattice: &QuadLattice, keep: &[usize]) -> Result<Self> {
        let gens = keep.iter().map(|&i| self.generators[i].clone()).collect();
        GroupSpec::new(
            lattice,
            format!("{}-sub", self.name),
            gens,
            self.policy.clone(),
        )
    }

    pub fn verify(&self, lattice: &QuadLattice) -> Result<()> {
        if self
            .generators
            .iter()
            .all(|g| lattice.is_isometry(g.matrix()))
        {
            Ok(())
        } else {
            Err(Error::NotIsometry)
        }
    }
}

/// Integral reflections in all enumerated negative vectors of the given
/// squares inside the window. Non-integral reflections are skipped.
pub fn reflection_group(
    lattice: &QuadLattice,
    squares: &[i64],
    window: &EnumWindow,
    word_cap: usize,
) -> Result<GroupSpec> {
    let mut gens = Vec::new();
    for &d in squares {
        for z in enum_negative_primitive(lattice, &window.with_square(d))? {
            match lattice.reflection(&z) {
                Ok(r) => gens.push(r),
                Err(Error::NonIntegralReflection(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let sq: Vec<String> = squares.iter().map(|d| d.to_string()).collect();
    let policy = ClosurePolicy::new(window.anchor.clone(), word_cap, window.height_bound);
    GroupSpec::new(
        lattice,
        format!("reflections[{}]@H{}", sq.join(","), window.height_bound),
        gens,
        policy,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    CompleteWithinWindow,
    Capped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub representative: LatticeVec,
    pub members_found: usize,
    /// members of the input that fell into this class
    pub input_members: Vec<LatticeVec>,
    pub square: i64,
    pub divisibility: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub group: String,
    pub generator_count: usize,
    pub height_cap: u64,
    pub classes: Vec<OrbitClass>,
    /// vectors reached by the closure that were not in the input
    pub new_vectors: Vec<LatticeVec>,
    /// generator images that left the height window
    pub escaped: usize,
    pub status: OrbitStatus,
}

impl OrbitReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: Vec::new() }
    }
    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Partitions wall vectors into orbits of the group, exploring the closure
/// inside the policy's height window.
pub fn orbit_decompose(
    lattice: &QuadLattice,
    vectors: &[LatticeVec],
    group: &GroupSpec,
) -> Result<OrbitReport> {
    group.verify(lattice)?;
    let anchor = &group.policy.anchor;
    let cap = group.policy.height_cap;

    let mut index: HashMap<LatticeVec, usize> = HashMap::new();
    let mut nodes: Vec<LatticeVec> = Vec::new();
    let mut uf = UnionFind::new();
    let mut queue = VecDeque::new();
    let mut inputs: Vec<LatticeVec> = Vec::new();

    for v in vectors {
        if !v.is_primitive()? {
            return Err(Error::Precondition(format!("{v} is not primitive")));
        }
        let c = lattice.canonical_wall(anchor, v)?;
        if !index.contains_key(&c) {
            index.insert(c.clone(), nodes.len());
            nodes.push(c.clone());
            uf.add();
            queue.push_back(c.clone());
        }
        inputs.push(c);
    }
    inputs.sort();
    inputs.dedup();

    let mut escaped = 0usize;
    let mut status = OrbitStatus::CompleteWithinWindow;
    while let Some(v) = queue.pop_front() {
        let vi = index[&v];
        for g in &group.generators {
            let w = lattice.canonical_wall(anchor, &g.apply(&v)?)?;
            if height(lattice, anchor, &w)? > cap {
                escaped += 1;
                continue;
            }
            let wi = match index.get(&w) {
                Some(&i) => i,
                None => {
                    if nodes.len() >= group.policy.max_visited {
                        status = OrbitStatus::Capped;
                        continue;
                    }
                    let i = uf.add();
                    index.insert(w.clone(), i);
                    nodes.push(w.clone());
                    queue.push_back(w);
                    i
                }
            };
            uf.union(vi, wi);
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..nodes.len() {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    let input_set: HashSet<&LatticeVec> = inputs.iter().collect();
    let mut classes = Vec::new();
    for members in groups.values() {
        let rep = members.iter().map(|&i| &nodes[i]).min().unwrap().clone();
        let mut ins: Vec<LatticeVec> = members
            .iter()
            .map(|&i| &nodes[i])
            .filter(|v| input_set.contains(v))
            .cloned()
            .collect();
        ins.sort();
        classes.push(OrbitClass {
            square: lattice.norm(&rep)?,
            divisibility: lattice.divisibility(&rep)?,
            representative: rep,
            members_found: members.len(),
            input_members: ins,
        });
    }
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    let mut new_vectors: Vec<LatticeVec> = nodes
        .iter()
        .filter(|v| !input_set.contains(v))
        .cloned()
        .collect();
    new_vectors.sort();

    Ok(OrbitReport {
        group: group.name.clone(),
        generator_count: group.len(),
        height_cap: cap,
        classes,
        new_vectors,
        escaped,
        status,
    })
}

/// A group element together with a word in the (sorted) generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupWord {
    pub word: Vec<usize>,
    pub isometry: Isometry,
}

/// Group elements reachable by words of length at most `word_cap`.
#[derive(Clone, Debug)]
pub struct ElementBall {
    pub elements: Vec<GroupWord>,
    /// true when no word of length `word_cap + 1` produces a new element
    pub closed: bool,
}

/// Breadth-first enumeration of distinct group elements by word length.
pub fn enumerate_elements(group: &GroupSpec, word_cap: usize) -> Result<ElementBall> {
    let rank = group.policy.anchor.len();
    let id = Isometry::identity(rank);
    let mut seen: HashSet<Isometry> = HashSet::new();
    seen.insert(id.clone());
    let mut elements = vec![GroupWord {
        word: vec![],
        isometry: id,
    }];
    let mut layer = vec![0usize];
    for _ in 0..word_cap {
        let mut next = Vec::new();
        for &e in &layer {
            for (gi, g) in group.generators.iter().enumerate() {
                let m = g.compose(&elements[e].isometry)?;
                if seen.insert(m.clone()) {
                    let mut word = vec![gi];
                    word.extend(&elements[e].word);
                    elements.push(GroupWord { word, isometry: m });
                    next.push(elements.len() - 1);
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    let mut closed = true;
    'outer: for &e in &layer {
        for g in &group.generators {
            if !seen.contains(&g.compose(&elements[e].isometry)?) {
                closed = false;
                break 'outer;
            }
        }
    }
    Ok(ElementBall { elements, closed })
}

/// Elements of the ball of radius `word_cap` satisfying a predicate.
pub fn search_words<F>(
    group: &GroupSpec,
    word_cap: usize,
    mut pred: F,
) -> Result<(Vec<GroupWord>, bool)>
where
    F: FnMut(&Isometry) -> Result<bool>,
{
    let ball = enumerate_elements(group, word_cap)?;
    let mut hits = Vec::new();
    for e in ball.elements {
        if pred(&e.isometry)? {
            hits.push(e);
        }
    }
    Ok((hits, ball.closed))
}

/// What a stabilizer must fix.
#[derive(Clone, Debug)]
pub enum StabilizerTarget {
    /// an oriented vector, fixed exactly
    Vector(LatticeVec),
    /// an unoriented wall `±z`
    Wall(LatticeVec),
    /// a positive ray given by an integer representative
    Point(Vec<BigInt>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub word_cap: usize,
    pub elements: Vec<GroupWord>,
    /// the whole group was enumerated within the word cap
    pub closed: bool,
}

/// All words of length at most the policy's word cap fixing the target.
pub fn stabilizer_search(
    lattice: &QuadLattice,
    target: &StabilizerTarget,
    group: &GroupSpec,
) -> Result<StabilizerReport> {
    group.verify(lattice)?;
    let cap = group.policy.word_cap;
    let (elements, closed) = search_words(group, cap, |g| {
        Ok(match target {
            StabilizerTarget::Vector(v) => g.apply(v)? == *v,
            StabilizerTarget::Wall(z) => {
                let gz = g.apply(z)?;
                gz == *z || gz == z.neg()
            }
            // an isometry mapping a positive ray to itself fixes the vector
            StabilizerTarget::Point(x) => g.apply_big(x) == *x,
        })
    })?;
    Ok(StabilizerReport {
        word_cap: cap,
        elements,
        closed,
    })
}
